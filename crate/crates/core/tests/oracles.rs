//! Frozen reference values computed independently with exact integer
//! arithmetic (Python `fractions`/`int`).

use anosov_tori::catalog::{growth_rate_table, ln_big};
use anosov_tori::linalg::{classify_hyperbolic, smith_normal_form, Hyperbolicity};
use anosov_tori::periodic::union_counts;
use anosov_tori::torus::lower_degree_witnesses;
use anosov_tori::{count_bounds, count_fixed, mat_pow, minimal_degree_m, rational_inverse, torus_degree, IntMatrix2};
use num_bigint::BigInt;

const CAT_FIX: [u64; 14] = [1, 5, 16, 45, 121, 320, 841, 2205, 5776, 15125, 39601, 103680, 271441, 710645];
const CAT_UNION: [u64; 14] = [1, 5, 20, 60, 180, 480, 1320, 3480, 9240, 24240, 63840, 167160, 438600, 1148400];
const CAT_UPPER_14: u64 = 1_149_822;

fn cat() -> IntMatrix2 {
    IntMatrix2::cat_map()
}

#[test]
fn fixed_counts_through_14() {
    for (i, &c) in CAT_FIX.iter().enumerate() {
        assert_eq!(count_fixed(&cat(), i as u64 + 1), BigInt::from(c), "n = {}", i + 1);
    }
}

#[test]
fn union_counts_through_14() {
    let got = union_counts(&cat(), 14, 5_000_000).unwrap();
    let want: Vec<Option<u64>> = CAT_UNION.iter().map(|&c| Some(c)).collect();
    assert_eq!(got, want);
}

#[test]
fn count_bounds_frozen() {
    let want = [(1, 1), (5, 6), (16, 22), (45, 67), (121, 188), (320, 508)];
    for (i, &(lo, hi)) in want.iter().enumerate() {
        let b = count_bounds(&cat(), i as u64 + 1);
        assert_eq!((b.lower, b.upper), (BigInt::from(lo), BigInt::from(hi)), "n = {}", i + 1);
    }
    assert_eq!(count_bounds(&cat(), 14).upper, BigInt::from(CAT_UPPER_14));
}

#[test]
fn growth_gaps_frozen() {
    let rep = growth_rate_table(&cat(), 14, 5_000_000).unwrap();
    let gaps = [0.061, 0.076, 0.067, 0.064, 0.057, 0.052, 0.047, 0.043, 0.040, 0.037, 0.034];
    for (row, want) in rep.rows[3..].iter().zip(gaps) {
        assert!(((row.rate() - row.h_top).abs() - want).abs() < 5e-4, "n = {}", row.n);
    }
    assert!((rep.rows[13].rate() - (CAT_UNION[13] as f64).ln() / 14.0).abs() < 1e-15);
}

#[test]
fn minimal_degrees() {
    let cases: [([[i64; 2]; 2], [i64; 2], u64, [i64; 2]); 6] = [
        ([[2, 1], [1, 1]], [1, 0], 1, [0, -1]),
        ([[2, 1], [1, 1]], [0, 0], 1, [0, 0]),
        ([[3, 1], [2, 1]], [0, 1], 2, [-1, 2]),
        ([[3, 1], [2, 1]], [1, 0], 1, [0, -1]),
        ([[2, 1], [5, 3]], [1, 0], 3, [2, -5]),
        ([[5, 4], [1, 1]], [1, 1], 4, [-4, 3]),
    ];
    for (rows, deg, m, deg_g) in cases {
        let a = IntMatrix2::from_rows(rows);
        assert_eq!(minimal_degree_m(&a, deg).unwrap(), m, "{rows:?} {deg:?}");
        assert_eq!(torus_degree(&a, deg, m).unwrap(), deg_g, "{rows:?} {deg:?}");
        assert_eq!(lower_degree_witnesses(&a, deg).unwrap().len() as u64, m - 1);
    }
}

#[test]
fn smith_forms() {
    let cases: [([[i64; 2]; 2], i64, i64); 4] =
        [([[1, 1], [1, 0]], 1, 1), ([[2, 0], [0, 3]], 1, 6), ([[4, 2], [2, 2]], 2, 2), ([[5, 3], [3, 2]], 1, 1)];
    for (rows, d1, d2) in cases {
        let s = smith_normal_form(&IntMatrix2::from_rows(rows)).unwrap();
        assert_eq!((s.d1, s.d2), (BigInt::from(d1), BigInt::from(d2)), "{rows:?}");
    }
}

#[test]
fn powers_and_inverses() {
    // Fibonacci: catⁿ = [[F(2n+1), F(2n)], [F(2n), F(2n-1)]].
    let p = mat_pow(&cat(), 10);
    assert_eq!(p, IntMatrix2::from_rows([[10946, 6765], [6765, 4181]]));
    let inv = rational_inverse(&cat().identity_minus()).unwrap();
    let v = inv.apply_int([1, 0]);
    assert_eq!(v.to_f64(), [0.0, -1.0]);
    assert_eq!(classify_hyperbolic(&IntMatrix2::from_rows([[1, 1], [0, 1]])), Hyperbolicity::NotHyperbolic);
    assert_eq!(classify_hyperbolic(&IntMatrix2::from_rows([[1, 1], [1, 0]])), Hyperbolicity::Hyperbolic);
    assert_eq!(classify_hyperbolic(&IntMatrix2::from_rows([[2, 0], [0, 1]])), Hyperbolicity::NotUnimodular);
}

#[test]
fn large_counts_use_big_integers() {
    // |Fix(A^100)| = L_200 - 2 for the cat map.
    let c = count_fixed(&cat(), 100);
    assert_eq!(c.to_string(), "627376215338105766356982006981782561278125");
    assert!((ln_big(&c) / 100.0 - 0.962_423_650_1).abs() < 1e-9);
}
