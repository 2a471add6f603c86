//! Twisted cocycle equation `η(ω + α) = A·η(ω) + r(ω)` for degree-0 `r`.
//!
//! The solution is split along the hyperbolic eigenlines. On E^s the
//! recursion runs forward from the past, on E^u backward from the future:
//!
//! ```text
//! π^s η(ω) =  Σ_{k≥1} λ_s^{k-1} P_s r(ω − kα)
//! π^u η(ω) = −Σ_{k≥0} λ_u^{-k-1} P_u r(ω + kα)
//! ```
//!
//! Both sums are truncated at the length returned by [`truncation_length`].

use rayon::prelude::*;

use crate::circle::{degree_from_samples, wrap01, PeriodicMap, SampledMap, Vec2};
use crate::error::{Error, Result};
use crate::linalg::{eigen_split, mat_vec, norm_inf_f64, IntMatrix2};

#[derive(Clone, Debug, PartialEq)]
pub struct CocycleSolution {
    /// η on the grid `j / grid_size`.
    pub samples: SampledMap,
    /// Number of series terms kept.
    pub terms: usize,
    /// A-priori bound on the dropped tails (sup-norm).
    pub trunc_bound: f64,
    /// Linear-interpolation error estimate from second differences of the grid.
    pub interp_estimate: f64,
    /// `max_j ‖η(ω_j + α) − Aη(ω_j) − r(ω_j)‖∞` with `η(ω_j + α)` interpolated.
    pub residual: f64,
}

impl CocycleSolution {
    pub fn eval(&self, omega: f64) -> Vec2 {
        self.samples.eval(omega)
    }
}

/// Smallest `N ≥ 1` with `r_norm · ρ^N / (1 − ρ) ≤ tol`.
pub fn truncation_length(r_norm: f64, rho: f64, tol: f64) -> usize {
    assert!(rho > 0.0 && rho < 1.0, "rho must lie in (0, 1)");
    assert!(tol > 0.0, "tol must be positive");
    if r_norm <= 0.0 {
        return 1;
    }
    let mut n = 1usize;
    let mut tail = r_norm * rho / (1.0 - rho);
    while tail > tol {
        tail *= rho;
        n += 1;
    }
    n
}

/// Evaluation points `ω ± kα` are formed as `ω + k·α` in one fused step and
/// reduced mod 1 before every lookup.
#[inline]
fn shifted(omega: f64, k: f64, alpha: f64) -> f64 {
    wrap01(k.mul_add(alpha, omega))
}

pub fn solve_twisted_cocycle<M: PeriodicMap + ?Sized>(
    a: &IntMatrix2,
    alpha: f64,
    r: &M,
    grid_size: usize,
    tol: f64,
) -> Result<CocycleSolution> {
    let split = eigen_split(a)?;
    assert!(grid_size >= 2, "grid must have at least two points");

    let closed: Vec<Vec2> = (0..=grid_size).map(|j| r.eval(j as f64 / grid_size as f64)).collect();
    let deg = degree_from_samples(&closed)?.degree;
    if deg != [0, 0] {
        return Err(Error::NonzeroDegree(deg[0], deg[1]));
    }

    let rho = split.rho();
    let proj_norm = norm_inf_f64(&split.p_u) + norm_inf_f64(&split.p_s);
    let r_norm = r.sup_norm() * proj_norm;
    let terms = truncation_length(r_norm, rho, tol);
    let trunc_bound = r_norm * rho.powi(terms as i32) / (1.0 - rho);

    let (lu, ls) = (split.lambda_u, split.lambda_s);
    let values: Vec<Vec2> = (0..grid_size)
        .into_par_iter()
        .map(|j| {
            let omega = j as f64 / grid_size as f64;
            // Scalar-weighted sums of r; projections applied once at the end.
            let mut stable = [0.0; 2];
            let mut w = 1.0;
            for k in 1..=terms {
                let v = r.eval(shifted(omega, -(k as f64), alpha));
                stable[0] += w * v[0];
                stable[1] += w * v[1];
                w *= ls;
            }
            let mut unstable = [0.0; 2];
            let mut w = 1.0 / lu;
            for k in 0..=terms {
                let v = r.eval(shifted(omega, k as f64, alpha));
                unstable[0] += w * v[0];
                unstable[1] += w * v[1];
                w /= lu;
            }
            let s = mat_vec(&split.p_s, stable);
            let u = mat_vec(&split.p_u, unstable);
            [s[0] - u[0], s[1] - u[1]]
        })
        .collect();

    let samples = SampledMap::new(values);
    let residual = cocycle_residual(a, alpha, r, &samples);
    let interp_estimate = interpolation_estimate(samples.values());
    Ok(CocycleSolution { samples, terms, trunc_bound, interp_estimate, residual })
}

/// `max_j ‖η(ω_j + α) − A η(ω_j) − r(ω_j)‖∞` over the grid of `eta`.
pub fn cocycle_residual<M: PeriodicMap + ?Sized>(a: &IntMatrix2, alpha: f64, r: &M, eta: &SampledMap) -> f64 {
    let am = a.to_f64();
    let n = eta.len();
    eta.values()
        .par_iter()
        .enumerate()
        .map(|(j, &e)| {
            let omega = j as f64 / n as f64;
            let lhs = eta.eval(omega + alpha);
            let ae = mat_vec(&am, e);
            let rv = r.eval(omega);
            (lhs[0] - ae[0] - rv[0]).abs().max((lhs[1] - ae[1] - rv[1]).abs())
        })
        .reduce(|| 0.0, f64::max)
}

/// Max second difference over 4: bounds the linear-interpolation error for a
/// function whose slope may jump inside a cell.
fn interpolation_estimate(v: &[Vec2]) -> f64 {
    let n = v.len();
    (0..n)
        .map(|j| {
            let (p, c, q) = (v[(j + n - 1) % n], v[j], v[(j + 1) % n]);
            (p[0] - 2.0 * c[0] + q[0]).abs().max((p[1] - 2.0 * c[1] + q[1]).abs())
        })
        .fold(0.0, f64::max)
        / 4.0
}

/// True iff the periodic sample grid (closed by its first sample) winds
/// zero times in both coordinates.
pub fn degree_zero_check(samples: &[Vec2]) -> bool {
    if samples.is_empty() {
        return true;
    }
    let mut closed = samples.to_vec();
    closed.push(samples[0]);
    matches!(degree_from_samples(&closed), Ok(d) if d.degree == [0, 0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::FnMap;

    #[test]
    fn truncation_examples() {
        // 0.382^22 / 0.618 = 1.03e-9 > 1e-9, so one more term is needed.
        assert_eq!(truncation_length(1.0, 0.382, 1e-9), 23);
        assert_eq!(truncation_length(0.0, 0.382, 1e-9), 1);
        assert_eq!(truncation_length(1.0, 0.5, 0.25), 3);
    }

    #[test]
    fn zero_force() {
        let r = SampledMap::new(vec![[0.0, 0.0]; 8]);
        let sol = solve_twisted_cocycle(&IntMatrix2::cat_map(), 0.414, &r, 64, 1e-9).unwrap();
        assert!(sol.samples.values().iter().all(|v| *v == [0.0, 0.0]));
        assert_eq!(sol.residual, 0.0);
    }

    #[test]
    fn constant_force_matches_fixed_point() {
        let r = SampledMap::new(vec![[0.3, 0.1]; 16]);
        let sol = solve_twisted_cocycle(&IntMatrix2::cat_map(), 2f64.sqrt() - 1.0, &r, 256, 1e-12).unwrap();
        for v in sol.samples.values() {
            assert!((v[0] + 0.1).abs() < 1e-10 && (v[1] + 0.2).abs() < 1e-10, "{v:?}");
        }
        assert!(sol.residual < 1e-10);
    }

    #[test]
    fn rejects_nonzero_degree() {
        let r = FnMap(|w: f64| [w, 0.0]);
        let err = solve_twisted_cocycle(&IntMatrix2::cat_map(), 0.3, &r, 128, 1e-9).unwrap_err();
        assert!(matches!(err, Error::NonzeroDegree(1, 0)));
    }

    #[test]
    fn rejects_non_hyperbolic() {
        let r = SampledMap::new(vec![[0.0, 0.0]]);
        let rot = IntMatrix2::from_rows([[0, -1], [1, 0]]);
        assert!(matches!(solve_twisted_cocycle(&rot, 0.3, &r, 8, 1e-9), Err(Error::NotHyperbolic(_))));
    }

    #[test]
    fn degree_zero_examples() {
        assert!(degree_zero_check(&[[0.2, 0.3]; 10]));
        let ramp: Vec<Vec2> = (0..32).map(|j| [j as f64 / 32.0, 0.0]).collect();
        assert!(!degree_zero_check(&ramp));
    }
}
