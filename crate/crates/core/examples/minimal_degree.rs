//! Minimal torus degree `m` and `deg g` for a few matrices and force degrees.
//!
//! cargo run --example minimal_degree

use anosov_tori::torus::lower_degree_witnesses;
use anosov_tori::{classify_hyperbolic, minimal_degree_m, torus_degree, IntMatrix2};

fn main() -> anosov_tori::Result<()> {
    let cases = [
        ([[2, 1], [1, 1]], [1, 0]),
        ([[3, 1], [2, 1]], [0, 1]),
        ([[2, 1], [5, 3]], [1, 0]),
        ([[5, 4], [1, 1]], [1, 1]),
    ];
    for (rows, deg_h) in cases {
        let a = IntMatrix2::from_rows(rows);
        let m = minimal_degree_m(&a, deg_h)?;
        let deg_g = torus_degree(&a, deg_h, m)?;
        println!("A = {a} ({}), deg h = {deg_h:?}: m = {m}, deg g = {deg_g:?}", classify_hyperbolic(&a));
        for (mp, v) in lower_degree_witnesses(&a, deg_h)? {
            println!("    m' = {mp}: m'(I - A)^-1 deg h = ({}, {}) is not integral", v.0[0], v.0[1]);
        }
    }
    Ok(())
}
