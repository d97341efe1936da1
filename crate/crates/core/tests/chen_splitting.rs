mod common;

use common::{binomial, rng};
use polycycle_core::quadrature::{iterated_quadrature, saddle_arc, ParamPath, PathPiece, PlanarForm};
use polycycle_core::{decompose, evaluate, ElementarySymbol};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-12;

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
    let arc = saddle_arc(1.0, 1.0, t, t, 1.0).unwrap();
    let mut list = arc.pieces().to_vec();
    let mut at = list[0].end();
    for _ in 1..pieces {
        let next = (r.gen_range(0.2..1.5), r.gen_range(0.2..1.5));
        list.push(PathPiece::Segment { from: at, to: next });
        at = next;
    }
    ParamPath::new(list)
}

fn split_value(forms: &[PlanarForm], path: &ParamPath) -> f64 {
    let poly = decompose(forms.len(), path.pieces().len());
    evaluate(&poly, |s: &ElementarySymbol| {
        iterated_quadrature(&forms[s.start - 1..s.end], &path.piece(s.piece - 1), TOL)
            .ok()
            .map(|q| q.value)
    })
    .unwrap()
}

#[test]
fn splitting_matches_full_path() {
    let mut r = rng(3);
    let mut instances = 0;
    for k in 1..=3 {
        for m in 1..=3 {
            for _ in 0..3 {
                let forms: Vec<PlanarForm> = (0..k).map(|_| random_form(&mut r)).collect();
                let path = random_path(&mut r, m);
                let full = iterated_quadrature(&forms, &path, TOL).unwrap().value;
                let split = split_value(&forms, &path);
                assert!((full - split).abs() < 1e-6, "k={k} m={m}: {full} vs {split}");
                instances += 1;
            }
        }
    }
    assert!(instances >= 20);
}

#[test]
fn halves_of_the_worked_arc() {
    let t: f64 = 0.25;
    let forms = [PlanarForm::monomial_dx(1, 0), PlanarForm::monomial_dx(0, 1)];
    let first = saddle_arc(1.0, 1.0, t, t, 0.5).unwrap();
    let second = saddle_arc(1.0, 1.0, t, 0.5, 1.0).unwrap();
    let path = ParamPath::new(vec![first.pieces()[0].clone(), second.pieces()[0].clone()]);
    let value = split_value(&forms, &path);
    assert!((value - (t * t - t - t * t.ln())).abs() < 1e-10);
    assert!((value - 0.159_073_6).abs() < 1e-6);
}

#[test]
fn refinement_is_coherent() {
    let mut r = rng(8);
    for _ in 0..5 {
        let forms: Vec<PlanarForm> = (0..3).map(|_| random_form(&mut r)).collect();
        let t = r.gen_range(0.1..0.5);
        let coarse = random_path(&mut r, 2);
        let x_mid = (t + 1.0) / 2.0;
        let mut fine = saddle_arc(1.0, 1.0, t, t, x_mid).unwrap().pieces().to_vec();
        fine.extend(saddle_arc(1.0, 1.0, t, x_mid, 1.0).unwrap().pieces().iter().cloned());
        let whole = saddle_arc(1.0, 1.0, t, t, 1.0).unwrap().pieces()[0].clone();
        let arc_end = whole.end();
        let seg = match &coarse.pieces()[1] {
            PathPiece::Segment { to, .. } => PathPiece::Segment { from: arc_end, to: *to },
            _ => unreachable!(),
        };
        fine.push(seg.clone());
        let coarse = ParamPath::new(vec![whole, seg]);
        let fine = ParamPath::new(fine);
        assert!((split_value(&forms, &coarse) - split_value(&forms, &fine)).abs() < 1e-8);
    }
}

#[test]
fn term_counts_match_binomial() {
    for k in 1..=6 {
        for m in 1..=6 {
            assert_eq!(
                decompose(k, m).terms().len() as u64,
                binomial((k + m - 1) as u64, (m - 1) as u64)
            );
        }
    }
}
