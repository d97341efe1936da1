mod common;

use common::{chart, decile_grid, random_monomial_case, rng, EXPONENTS};
use num_complex::Complex64;
use num_traits::Signed;
use polycycle_core::quadrature::{iterated_quadrature, saddle_path, PlanarForm};
use polycycle_core::rational::{int, rat, to_f64};
use polycycle_core::{
    compensator, elementary_mellin, monomial_mellin, pole_vector, pullback_form, validate_chart,
    Differential, FormSeries, Monomial, MultiIndex,
};
use rand::Rng;

fn oracle_form(m: &Monomial) -> PlanarForm {
    match m.differential {
        Differential::Dx => PlanarForm::monomial_dx(m.m, m.n),
        Differential::Dy => PlanarForm::monomial_dy(m.m, m.n),
    }
}

#[test]
fn random_monomial_words_match_quadrature() {
    let mut r = rng(2024);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let case = random_monomial_case(&mut r);
        let chart = case.chart();
        let series = monomial_mellin(&case.monomials, &chart).inverse_mellin();
        let forms: Vec<PlanarForm> = case.monomials.iter().map(oracle_form).collect();
        for t in decile_grid() {
            let oracle = iterated_quadrature(&forms, &saddle_path(&chart, t).unwrap(), 1e-13)
                .unwrap()
                .value;
            let symbolic = series.eval_precise(t);
            let rel = (symbolic - oracle).abs() / oracle.abs();
            worst = worst.max(rel);
            assert!(rel <= 1e-8, "{case:?} t={t}: {symbolic} vs {oracle}");
        }
    }
    assert!(worst < 1e-8);
}

#[test]
fn pulled_back_dy_forms_match_quadrature() {
    let mut r = rng(7);
    for _ in 0..20 {
        let (l1, l2) = EXPONENTS[r.gen_range(0..3)];
        let c = chart(l1, l2, 3);
        let m = r.gen_range(-2..=5);
        let n = r.gen_range(-2..=5);
        let form = FormSeries::new().with_dy(m, n, int(1)).exact();
        let pulled = pullback_form(&c, &form);
        assert!(pulled.dy().is_empty());
        let series = elementary_mellin(&[pulled], &c, 100)
            .unwrap()
            .to_rational_mellin()
            .inverse_mellin();
        for &t in &[0.2, 0.5, 0.8] {
            let oracle = iterated_quadrature(
                &[PlanarForm::monomial_dy(m, n)],
                &saddle_path(&c, t).unwrap(),
                1e-13,
            )
            .unwrap()
            .value;
            let rel = (series.eval_precise(t) - oracle).abs() / oracle.abs();
            assert!(rel < 1e-9, "dy ({m},{n}) λ=({l1},{l2}) t={t}");
        }
    }
}

#[test]
fn pullback_is_linear() {
    let c = chart(2, 3, 2);
    let f = FormSeries::new().with_dx(1, 0, int(2)).with_dy(0, 1, rat(1, 3));
    let g = FormSeries::new().with_dy(0, 1, int(1)).with_dy(2, -1, int(-4));
    let mut sum = FormSeries::new();
    for (k, v) in f.dx().iter().chain(g.dx()) {
        sum = sum.with_dx(k.0, k.1, v.clone());
    }
    for (k, v) in f.dy().iter().chain(g.dy()) {
        sum = sum.with_dy(k.0, k.1, v.clone());
    }
    let pf = pullback_form(&c, &f);
    let pg = pullback_form(&c, &g);
    let ps = pullback_form(&c, &sum);
    for (k, v) in ps.dx() {
        let expected = pf.dx().get(k).cloned().unwrap_or_default() + pg.dx().get(k).cloned().unwrap_or_default();
        assert_eq!(v, &expected);
    }
}

#[test]
fn compensator_bounded_by_pole_distance() {
    let mut r = rng(99);
    for _ in 0..200 {
        let case = random_monomial_case(&mut r);
        let c = case.chart();
        let alpha = MultiIndex::new(case.monomials.iter().map(|m| (m.m, m.n)).collect());
        let poles = pole_vector(&alpha, &c);
        let ell = compensator(&alpha, &c);
        let s = Complex64::new(r.gen_range(-8.0..8.0), r.gen_range(-3.0..3.0));
        let rho = poles
            .iter()
            .map(|v| (s + to_f64(v)).norm())
            .fold(f64::INFINITY, f64::min);
        let bound = rho.powi(-(alpha.len() as i32 + 1));
        assert!(ell.eval_complex(s).norm() <= bound * (1.0 + 1e-9));
    }
}

#[test]
fn poles_lie_on_lattice_and_below_bound() {
    let mut r = rng(5);
    for _ in 0..200 {
        let case = random_monomial_case(&mut r);
        let c = case.chart();
        let alpha = MultiIndex::new(case.monomials.iter().map(|m| (m.m, m.n)).collect());
        let spacing = c.lattice_spacing();
        let l = alpha.len() as i64;
        let top = int(l * c.pole_bound() as i64) * (c.lambda1().recip() + c.lambda2().recip());
        for (a, _) in compensator(&alpha, &c).poles() {
            assert!((&a / &spacing).is_integer());
            assert!(-a <= top);
        }
    }
}

#[test]
fn kept_terms_respect_envelope() {
    let mut r = rng(17);
    for _ in 0..20 {
        let c = chart(1, 2, 1);
        let forms: Vec<FormSeries> = (0..2)
            .map(|_| {
                let mut f = FormSeries::new().with_envelope(2.0).with_truncation(4);
                for m in 0..=2 {
                    for n in 0..=2 {
                        let bound = 2.0 * 2f64.powi(-(m + n) as i32);
                        let v: f64 = r.gen_range(-1.0..1.0) * bound;
                        f = f.with_dx_f64(m, n, v);
                    }
                }
                f
            })
            .collect();
        let (_, forms) = validate_chart(&c, &forms).unwrap();
        let series = elementary_mellin(&forms, &c, 8).unwrap();
        for (alpha, coeff) in series.terms() {
            let bound = series.envelope() * 2f64.powi(-(alpha.weight(c.pole_bound()) as i32));
            assert!(to_f64(&coeff.abs()) <= bound);
        }
    }
}

#[test]
fn truncation_residual_is_sound() {
    // Exact form x⁰y⁰ dx + Σ 4^{-k} x^k y^k dx, truncated at total weight 4.
    let c = chart(1, 1, 1);
    let mut form = FormSeries::new();
    let mut dx = Vec::new();
    for k in 0..=4i64 {
        let coeff = 4f64.powi(-k as i32);
        form = form.with_dx_f64(k + 1, k, coeff);
        dx.push((k + 1, k, coeff));
    }
    let form = form.exact();
    let series = elementary_mellin(&[form], &c, 5).unwrap();
    let kept = series.to_rational_mellin().inverse_mellin();
    let oracle = PlanarForm::from_terms(&dx, &[]);
    for t in decile_grid() {
        let value = iterated_quadrature(std::slice::from_ref(&oracle), &saddle_path(&c, t).unwrap(), 1e-13)
            .unwrap()
            .value;
        assert!((value - kept.eval(t)).abs() <= series.discarded_bound(t) + 1e-14);
    }
}

#[test]
fn general_form_matches_sum_of_monomials() {
    let c = chart(2, 3, 2);
    let form = FormSeries::new()
        .with_dx(1, 0, int(1))
        .with_dx(-1, 2, rat(1, 8))
        .with_dy(0, 1, rat(-1, 4))
        .exact();
    let series = elementary_mellin(&[form.clone(), form], &c, 40).unwrap();
    let monos = [
        (Monomial::dx(1, 0), rat(1, 1)),
        (Monomial::dx(-1, 2), rat(1, 8)),
        (Monomial::dy(0, 1), rat(-1, 4)),
    ];
    let mut expected = polycycle_core::RationalMellin::zero();
    for (a, ca) in &monos {
        for (b, cb) in &monos {
            expected = expected.add(&monomial_mellin(&[*a, *b], &c).scale(&(ca * cb)));
        }
    }
    assert_eq!(series.to_rational_mellin(), expected);
}
