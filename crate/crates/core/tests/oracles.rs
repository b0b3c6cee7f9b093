//! Checks against frozen reference outputs in `tests/fixtures/` (regenerate
//! with the scripts there) and against brute-force reimplementations.

mod common;

use common::{correlation_cases, tokenizer_cases, welch_cases};
use wordgate::data::tokenize;
use wordgate::eval_word::{average_ranks, pearson, spearman};
use wordgate::stats::{regularized_incomplete_beta, student_t_cdf, welch_t_test};

#[test]
fn treebank_fixture_parity() {
    let cases = tokenizer_cases();
    assert_eq!(cases.len(), 500);
    for c in &cases {
        assert_eq!(tokenize(&c.text), c.tokens, "{:?}", c.text);
    }
}

#[test]
fn welch_matches_reference() {
    let cases = welch_cases();
    assert_eq!(cases.len(), 50);
    for (i, c) in cases.iter().enumerate() {
        let r = welch_t_test(&c.a, &c.b).unwrap();
        assert!(
            (r.t - c.t).abs() <= 1e-9 * c.t.abs().max(1.0),
            "case {i}: t {} vs {}",
            r.t,
            c.t
        );
        assert!(
            (r.p_two_sided - c.p).abs() <= 1e-6,
            "case {i}: p {} vs {}",
            r.p_two_sided,
            c.p
        );
    }
}

#[test]
fn correlations_match_reference() {
    for (i, c) in correlation_cases().iter().enumerate() {
        assert!((pearson(&c.x, &c.y).unwrap() - c.pearson).abs() <= 1e-12, "case {i}");
        assert!((spearman(&c.x, &c.y).unwrap() - c.spearman).abs() <= 1e-12, "case {i}");
    }
}

/// Rank of each value as (number strictly below) + (number equal + 1) / 2.
fn brute_ranks(xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .map(|&x| {
            let below = xs.iter().filter(|&&y| y < x).count() as f64;
            let equal = xs.iter().filter(|&&y| y == x).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect()
}

#[test]
fn ranks_match_counting() {
    for c in correlation_cases() {
        assert_eq!(average_ranks(&c.x), brute_ranks(&c.x));
        assert_eq!(average_ranks(&c.y), brute_ranks(&c.y));
    }
}

/// Composite Simpson quadrature of the Student-t density.
fn t_cdf_quadrature(t: f64, dof: f64) -> f64 {
    let ln_norm =
        lanczos_ln_gamma((dof + 1.0) / 2.0) - lanczos_ln_gamma(dof / 2.0) - 0.5 * (dof * std::f64::consts::PI).ln();
    let density = |x: f64| (ln_norm - (dof + 1.0) / 2.0 * (1.0 + x * x / dof).ln()).exp();
    let n = 20_000;
    let h = t.abs() / n as f64;
    let mut s = density(0.0) + density(t.abs());
    for k in 1..n {
        s += density(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    let half = s * h / 3.0;
    if t >= 0.0 {
        0.5 + half
    } else {
        0.5 - half
    }
}

/// Lanczos approximation (g = 7, n = 9), independent of the crate's backend.
fn lanczos_ln_gamma(x: f64) -> f64 {
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + 7.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

#[test]
fn t_cdf_matches_quadrature() {
    for dof in [1.0, 2.5, 7.0, 30.0] {
        for t in [-6.0, -2.0, -0.3, 0.0, 0.8, 1.96, 4.5] {
            let q = t_cdf_quadrature(t, dof);
            let c = student_t_cdf(t, dof).unwrap();
            assert!((q - c).abs() < 1e-9, "dof {dof} t {t}: {c} vs {q}");
        }
    }
}

#[test]
fn incomplete_beta_closed_forms() {
    // I_x(a, 1) = x^a and I_x(1, b) = 1 - (1 - x)^b
    for x in [0.01, 0.2, 0.5, 0.77, 0.99] {
        for p in [0.5, 1.0, 3.0, 12.5] {
            assert!((regularized_incomplete_beta(p, 1.0, x).unwrap() - x.powf(p)).abs() < 1e-13);
            assert!((regularized_incomplete_beta(1.0, p, x).unwrap() - (1.0 - (1.0 - x).powf(p))).abs() < 1e-13);
        }
    }
}
