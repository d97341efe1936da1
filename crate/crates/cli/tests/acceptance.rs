//! End-to-end acceptance run: one PASS/FAIL line per criterion.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use common::{
    binomial, chart, closed_form_corpus, decile_grid, fine_grid, random_invertible,
    random_mellin, random_monomial_case, random_quasiunipotent, rng, witt_dimension,
};
use polycycle_core::lie::{
    extend_automorphism, hall_basis, induced_quasiunipotence, is_quasiunipotent, var_check,
    Annihilator, QMatrix, QuasiUnipotence,
};
use polycycle_core::quadrature::{
    iterated_quadrature, saddle_arc, saddle_path, ParamPath, PathPiece, PlanarForm,
};
use polycycle_core::rational::{binomial as exact_binomial, int};
use polycycle_core::{
    certify_zero_free, decompose, elementary_mellin, evaluate, monomial_mellin, partial_fractions,
    partial_sum, tail_bound, validate_chart, AlgebraElement, Differential, ElementarySymbol,
    FormSeries, LogMonomialSeries, Poly, Rational, RationalMellin, ZeroCertificate,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn monomial_exactness() -> Outcome {
    let start = Instant::now();
    let mut r = rng(2024);
    let mut worst = 0.0f64;
    let cases = 120;
    for _ in 0..cases {
        let case = random_monomial_case(&mut r);
        let chart = case.chart();
        let series = monomial_mellin(&case.monomials, &chart).inverse_mellin();
        let forms: Vec<PlanarForm> = case
            .monomials
            .iter()
            .map(|m| match m.differential {
                Differential::Dx => PlanarForm::monomial_dx(m.m, m.n),
                Differential::Dy => PlanarForm::monomial_dy(m.m, m.n),
            })
            .collect();
        for t in decile_grid() {
            let path = saddle_path(&chart, t).map_err(|e| e.to_string())?;
            let oracle = iterated_quadrature(&forms, &path, 1e-13)
                .map_err(|e| e.to_string())?
                .value;
            worst = worst.max((series.eval_precise(t) - oracle).abs() / oracle.abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst <= 1e-8 && secs <= 60.0,
        format!("{cases} words, max rel err {worst:.2e}, {secs:.2} s"),
    )
}

fn worked_case() -> Outcome {
    let c = chart(1, 1, 1);
    let forms = [
        FormSeries::new().with_dx(1, 0, int(1)).exact(),
        FormSeries::new().with_dx(0, 1, int(1)).exact(),
    ];
    let (c, forms) = validate_chart(&c, &forms).map_err(|e| e.to_string())?;
    let mellin = elementary_mellin(&forms, &c, 100)
        .map_err(|e| e.to_string())?
        .to_rational_mellin();
    let den = &Poly::linear(int(1)).pow(2) * &Poly::linear(int(2));
    let expected = partial_fractions(&Poly::one(), &den, &[(int(1), 2), (int(2), 1)])
        .map_err(|e| e.to_string())?;
    let time = LogMonomialSeries::from_terms([
        (int(2), 0, int(1)),
        (int(1), 0, int(-1)),
        (int(1), 1, int(-1)),
    ]);
    let oracle = iterated_quadrature(
        &[PlanarForm::monomial_dx(1, 0), PlanarForm::monomial_dx(0, 1)],
        &saddle_path(&c, 0.25).map_err(|e| e.to_string())?,
        1e-13,
    )
    .map_err(|e| e.to_string())?
    .value;
    let value = mellin.inverse_mellin().eval_precise(0.25);
    check(
        mellin == expected
            && mellin.inverse_mellin() == time
            && (value - 0.1590736).abs() <= 1e-6
            && (oracle - 0.1590736).abs() <= 1e-6,
        format!("M = 1/((s+1)^2(s+2)), f(0.25) = {value:.9}, oracle {oracle:.9}"),
    )
}

/// Term-by-term rule with the binomial factor, extended bilinearly.
fn convolve_oracle(f: &RationalMellin, g: &RationalMellin) -> RationalMellin {
    let mut out = RationalMellin::zero();
    for (a, k, c) in f.terms() {
        for (b, l, d) in g.terms() {
            let factor = Rational::from_integer(exact_binomial((k + l - 2) as u64, (k - 1) as u64));
            out = out.add(&RationalMellin::pole(a + b, k + l - 1, c * d * factor).unwrap());
        }
    }
    out
}

fn convolution_algebra() -> Outcome {
    let simple = RationalMellin::simple(int(1)).convolve(&RationalMellin::simple(int(2)))
        == RationalMellin::simple(int(3));
    let double = RationalMellin::pole(int(1), 2, int(1))
        .unwrap()
        .convolve(&RationalMellin::simple(int(2)))
        == RationalMellin::pole(int(3), 2, int(1)).unwrap();
    let mut r = rng(11);
    let mut pairs = 0;
    for _ in 0..50 {
        let f = random_mellin(&mut r);
        let g = random_mellin(&mut r);
        let h = f.convolve(&g);
        if h == convolve_oracle(&f, &g)
            && h.inverse_mellin() == f.inverse_mellin().mul(&g.inverse_mellin())
            && h.inverse_mellin().mellin() == h
        {
            pairs += 1;
        }
    }
    let k2l2 = RationalMellin::pole(int(1), 2, int(1))
        .unwrap()
        .convolve(&RationalMellin::pole(int(2), 2, int(1)).unwrap());
    let factor_two = k2l2 == RationalMellin::pole(int(3), 3, int(2)).unwrap();
    check(
        simple && double && pairs == 50 && factor_two,
        format!(
            "identities {simple}/{double}, exact duality on {pairs}/50 pairs, k=l=2 factor 2: {factor_two}"
        ),
    )
}

fn random_form(r: &mut ChaCha8Rng) -> PlanarForm {
    let dx: Vec<(i64, i64, f64)> = (0..3)
        .map(|_| (r.gen_range(1..=3), r.gen_range(0..=2), r.gen_range(-1.0..1.0)))
        .collect();
    let dy: Vec<(i64, i64, f64)> = (0..2)
        .map(|_| (r.gen_range(0..=2), r.gen_range(1..=3), r.gen_range(-1.0..1.0)))
        .collect();
    PlanarForm::from_terms(&dx, &dy)
}

/// A saddle arc followed by straight segments through random points.
fn random_path(r: &mut ChaCha8Rng, pieces: usize) -> ParamPath {
    let t = r.gen_range(0.1..0.6);
    let mut list = saddle_arc(1.0, 1.0, t, t, 1.0).unwrap().pieces().to_vec();
    let mut at = list[0].end();
    for _ in 1..pieces {
        let next = (r.gen_range(0.2..1.5), r.gen_range(0.2..1.5));
        list.push(PathPiece::Segment { from: at, to: next });
        at = next;
    }
    ParamPath::new(list)
}

fn chen_decomposition() -> Outcome {
    let mut r = rng(3);
    let mut instances = 0;
    let mut worst = 0.0f64;
    let mut counts_ok = true;
    for k in 1..=3 {
        for m in 1..=3 {
            let poly = decompose(k, m);
            counts_ok &= poly.terms().len() as u64 == binomial((k + m - 1) as u64, (m - 1) as u64);
            for _ in 0..3 {
                let forms: Vec<PlanarForm> = (0..k).map(|_| random_form(&mut r)).collect();
                let path = random_path(&mut r, m);
                let full = iterated_quadrature(&forms, &path, 1e-12)
                    .map_err(|e| e.to_string())?
                    .value;
                let split: f64 = evaluate(&poly, |s: &ElementarySymbol| {
                    iterated_quadrature(&forms[s.start - 1..s.end], &path.piece(s.piece - 1), 1e-12)
                        .ok()
                        .map(|q| q.value)
                })
                .map_err(|e| e.to_string())?;
                worst = worst.max((full - split).abs());
                instances += 1;
            }
        }
    }
    check(
        worst <= 1e-6 && counts_ok && instances >= 20,
        format!("{instances} instances, max abs err {worst:.2e}, term counts match: {counts_ok}"),
    )
}

fn tail_soundness() -> Outcome {
    let mut violations = 0;
    let mut checked = 0;
    for f in closed_form_corpus() {
        let e = AlgebraElement::exact(f.mellin.clone(), f.length);
        for p in 1..=6 {
            let partial = partial_sum(&e, p).map_err(|e| e.to_string())?;
            for t in fine_grid() {
                let value = (f.value)(t);
                let remainder = (value - partial.eval(t)).abs();
                let rounding = 4.0 * f64::EPSILON * (value.abs() + partial.abs_envelope(t));
                let bound = tail_bound(&e, p, t).map_err(|e| e.to_string())?;
                if remainder > bound + rounding {
                    violations += 1;
                }
                checked += 1;
            }
        }
    }
    check(
        violations == 0,
        format!(
            "{violations} violations in {checked} checks (double-precision evaluation allowance 4 eps)"
        ),
    )
}

fn zero_free() -> Outcome {
    let c = chart(1, 1, 1);
    let forms = [
        FormSeries::new().with_dx(1, 0, int(1)).exact(),
        FormSeries::new().with_dx(0, 1, int(1)).exact(),
    ];
    let (c, forms) = validate_chart(&c, &forms).map_err(|e| e.to_string())?;
    let f = AlgebraElement::from_mellin_series(
        &elementary_mellin(&forms, &c, 100).map_err(|e| e.to_string())?,
    );
    let ZeroCertificate::ZeroFree { t_star, .. } = certify_zero_free(&f, 6, 1.0) else {
        return Err("worked case not certified".into());
    };
    let oracle_forms = [PlanarForm::monomial_dx(1, 0), PlanarForm::monomial_dx(0, 1)];
    let mut sign_changes = 0;
    let mut previous = None;
    for i in 1..=400 {
        // log-spaced levels in (1e-8, t*)
        let t = (1e-8f64.ln() + (t_star.ln() - 1e-8f64.ln()) * i as f64 / 401.0).exp();
        let v = iterated_quadrature(&oracle_forms, &saddle_path(&c, t).unwrap(), 1e-12)
            .map_err(|e| e.to_string())?
            .value;
        if let Some(p) = previous {
            if v == 0.0 || (v > 0.0) != (p > 0.0) {
                sign_changes += 1;
            }
        }
        previous = Some(v);
    }
    let closed = AlgebraElement::exact(
        closed_form_corpus()
            .into_iter()
            .find(|f| f.name == "dx, x^-1 y dx")
            .unwrap()
            .mellin,
        2,
    );
    let cancelled = f.sub(&closed);
    let vanishes = cancelled
        .expansion()
        .terms()
        .all(|(mu, _, _)| *mu >= int(11));
    let order = matches!(
        certify_zero_free(&cancelled, 10, 1.0),
        ZeroCertificate::ZeroToOrder { order: 10, .. }
    );
    check(
        t_star > 0.0 && sign_changes == 0 && vanishes && order,
        format!(
            "t* = {t_star:.6}, oracle sign changes on (0, t*): {sign_changes}, cancelled combination vanishes to order 10: {}",
            vanishes && order
        ),
    )
}

fn lie_module() -> Outcome {
    let mut witt = true;
    for n in 1..=3 {
        let alg = hall_basis(n, 6).map_err(|e| e.to_string())?;
        for k in 1..=6 {
            witt &= alg.dim(k) as u64 == witt_dimension(n as u64, k as u64);
        }
    }

    let mut r = rng(21);
    let mut identity = 0;
    for i in 0..10 {
        let n = 2 + i % 2;
        let alg = hall_basis(n, 2).map_err(|e| e.to_string())?;
        let a = random_invertible(&mut r, n);
        let report = var_check(&alg, &a, 1, 1, 5, i as u64).map_err(|e| e.to_string())?;
        if report.identity_holds && report.identity_checks == 5 {
            identity += 1;
        }
    }

    let mut r = rng(31);
    let mut propagated = 0;
    for i in 0..20 {
        let n = 2 + i % 2;
        let a = random_quasiunipotent(&mut r, n);
        let certified = is_quasiunipotent(&a).map_err(|e| e.to_string())?.holds();
        let alg = hall_basis(n, 4).map_err(|e| e.to_string())?;
        let all = induced_quasiunipotence(&alg, &a)
            .map_err(|e| e.to_string())?
            .iter()
            .all(QuasiUnipotence::holds);
        let functorial = {
            let b = random_invertible(&mut r, n);
            extend_automorphism(&alg, &(&a * &b)).ok()
                == extend_automorphism(&alg, &a)
                    .and_then(|x| Ok(x.compose(&extend_automorphism(&alg, &b)?)))
                    .ok()
        };
        if certified && all && functorial {
            propagated += 1;
        }
    }

    let fixed = |rows: &[&[i64]]| is_quasiunipotent(&QMatrix::from_i64(rows).unwrap()).unwrap();
    let unipotent = matches!(
        fixed(&[&[1, 1], &[0, 1]]),
        QuasiUnipotence::Yes { annihilator: Annihilator { m: 1, n: 2 }, .. }
    );
    let eigen_two = match fixed(&[&[2, 0], &[0, 1]]) {
        QuasiUnipotence::No { witness, .. } => witness == Poly::from_i64(&[-2, 1]),
        _ => false,
    };
    let rotation = matches!(
        fixed(&[&[0, -1], &[1, 0]]),
        QuasiUnipotence::Yes { annihilator: Annihilator { m: 4, n: 1 }, .. }
    );
    check(
        witt && identity == 10 && propagated == 20 && unipotent && eigen_two && rotation,
        format!(
            "Witt n<=3 K<=6: {witt}, Var identity {identity}/10, propagation to gr^4 {propagated}/20, fixed (true, false, true): ({unipotent}, {}, {rotation})",
            !eigen_two
        ),
    )
}

fn run_cli(command: &str, config: &Path, out: &Path) -> Result<i32, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_polycycle"))
        .arg(command)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    Ok(status.status.code().unwrap_or(-1))
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn cli_determinism() -> Outcome {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut identical = true;
    let mut verify_code = None;
    for command in ["expand", "verify"] {
        let config = configs.join(format!("{command}.toml"));
        let a = tmp.path().join(format!("{command}-a"));
        let b = tmp.path().join(format!("{command}-b"));
        let code_a = run_cli(command, &config, &a)?;
        let code_b = run_cli(command, &config, &b)?;
        if command == "verify" {
            verify_code = Some(code_a);
        } else if code_a != 0 {
            return Err(format!("expand exited {code_a}"));
        }
        identical &= code_a == code_b && read_dir_sorted(&a) == read_dir_sorted(&b);
    }
    check(
        identical && verify_code == Some(0),
        format!("byte-identical reruns: {identical}, verify on bundled corpus exit {verify_code:?}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("monomial exactness", monomial_exactness),
        ("worked l=2 case", worked_case),
        ("convolution algebra", convolution_algebra),
        ("Chen decomposition", chen_decomposition),
        ("tail-bound soundness", tail_soundness),
        ("zero-free certification", zero_free),
        ("Lie module", lie_module),
        ("CLI determinism", cli_determinism),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {} {name}: {detail}", i + 1);
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
