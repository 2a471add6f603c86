//! The invariant-torus catalog and the growth-rate report.
//!
//! Every invariant torus of degree `m` is a translate `ĝ + p` of the base
//! section by a periodic point `p` of `A`, and a point of least period `k`
//! yields a torus invariant under `φᵏ`. Counting tori therefore reduces to
//! counting periodic points, independently of the force `h`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::circle::{torus_distance, wrap01, ForceMap, Vec2};
use crate::error::{Error, Result};
use crate::linalg::{eigen_split, mat_vec, norm_inf_f64, IntMatrix2};
use crate::periodic::{count_bounds, periodic_points_up_to, union_counts, CountBounds};
use crate::torus::{build_base_torus, invariance_residual, minimal_degree_m, TorusDescriptor, TorusSolution};

/// Pairwise branch distance at fiber 0 above which branches count as distinct.
pub const DISTINCTNESS_THRESHOLD: f64 = 1e-6;

/// At most this many fibers are used when verifying each descriptor.
pub const MAX_VERIFY_FIBERS: usize = 256;

/// Side of the x-lattice used by [`conjugacy_check`].
pub const CONJUGACY_LATTICE: usize = 16;

/// A quasi-periodically forced affine map `(ω, x) ↦ (ω + α, Ax + h(ω))`.
#[derive(Clone, Debug)]
pub struct System {
    pub a: IntMatrix2,
    pub alpha: f64,
    pub force: ForceMap,
}

/// Numerical knobs shared by the solvers and the catalog.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    pub grid: usize,
    pub mode_cutoff: usize,
    pub tol: f64,
    pub budget: u64,
    /// Largest acceptable base invariance residual.
    pub residual_ceiling: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self { grid: 4096, mode_cutoff: 64, tol: 1e-9, budget: crate::periodic::DEFAULT_BUDGET, residual_ceiling: 1e-5 }
    }
}

/// `log |λ_u|`, the topological entropy of both `A` on T² and the skew product.
pub fn topological_entropy(a: &IntMatrix2) -> Result<f64> {
    Ok(eigen_split(a)?.lambda_u.abs().ln())
}

/// Natural log of a positive big integer without overflowing `f64`.
pub fn ln_big(x: &BigInt) -> f64 {
    assert!(x.is_positive(), "log of non-positive integer");
    match x.to_f64() {
        Some(f) if f.is_finite() => f.ln(),
        _ => {
            let shift = x.bits().saturating_sub(64);
            let top = (x >> shift).to_f64().expect("64-bit prefix fits");
            top.ln() + shift as f64 * std::f64::consts::LN_2
        }
    }
}

/// One catalog entry together with its verification outcome.
#[derive(Clone, Debug)]
pub struct CheckedDescriptor {
    pub descriptor: TorusDescriptor,
    /// `φ_m^k`-invariance residual at the descriptor's period `k`.
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CountRow {
    pub n: usize,
    pub exact: Option<u64>,
    pub bounds: CountBounds,
}

#[derive(Clone, Debug)]
pub struct TorusCatalog {
    pub m: u64,
    pub horizon: usize,
    pub base: Arc<TorusSolution>,
    pub descriptors: Vec<CheckedDescriptor>,
    pub counts: Vec<CountRow>,
    pub exact: bool,
    pub base_residual: f64,
    pub branch_separation: f64,
}

impl TorusCatalog {
    pub fn count(&self, n: usize) -> Option<u64> {
        self.counts.get(n.checked_sub(1)?)?.exact
    }

    pub fn all_passed(&self) -> bool {
        self.descriptors.iter().all(|d| d.passed)
    }

    pub fn max_descriptor_residual(&self) -> f64 {
        self.descriptors.iter().map(|d| d.residual).fold(0.0, f64::max)
    }
}

/// Iterate the induced map `k` times from `(ω', x)`, reducing mod 1 each step.
fn induced_orbit(am: &[[f64; 2]; 2], h: &ForceMap, m: u64, alpha: f64, omega: f64, x: Vec2, k: usize) -> Vec2 {
    let mut x = [wrap01(x[0]), wrap01(x[1])];
    for j in 0..k {
        let w = wrap01(m as f64 * omega + j as f64 * alpha);
        let hv = h.evaluate_lift(w);
        let ax = mat_vec(am, x);
        x = [wrap01(ax[0] + hv[0]), wrap01(ax[1] + hv[1])];
    }
    x
}

/// Error-growth factor for a `k`-step residual: `Σ_{j<k} C |λ_u|ʲ`.
fn propagation_factor(a: &IntMatrix2, k: usize) -> Result<f64> {
    let s = eigen_split(a)?;
    let c = norm_inf_f64(&s.p_u) + norm_inf_f64(&s.p_s);
    Ok((0..k).map(|j| c * s.lambda_u.abs().powi(j as i32)).sum())
}

fn verify_descriptor(
    sys: &System,
    am: &[[f64; 2]; 2],
    d: TorusDescriptor,
    fibers: &[f64],
    factor: f64,
) -> CheckedDescriptor {
    let base = &d.base;
    let k = d.period;
    let shift = base.rotation();
    let residual = fibers
        .iter()
        .map(|&w| {
            let start = d.eval_lift(w);
            let end = induced_orbit(am, &sys.force, d.m, sys.alpha, w, start, k);
            torus_distance(end, d.eval_lift(w + k as f64 * shift))
        })
        .fold(0.0, f64::max);
    // Off-grid fibers see up to twice the on-grid residual.
    let tolerance = factor * 2.0 * base.residual_sup.max(1e-15) + 1e-9;
    CheckedDescriptor { descriptor: d, residual, tolerance, passed: residual <= tolerance }
}

fn verify_fibers(grid: usize) -> Vec<f64> {
    let stride = grid.div_ceil(MAX_VERIFY_FIBERS).max(1);
    (0..grid).step_by(stride).map(|j| j as f64 / grid as f64).collect()
}

/// Build the base torus and translate it by every periodic point of period
/// at most `n`, verifying each translate.
pub fn enumerate_tori(sys: &System, n: usize, settings: &SolverSettings) -> Result<TorusCatalog> {
    let m = minimal_degree_m(&sys.a, sys.force.degree)?;
    let base = Arc::new(build_base_torus(&sys.a, sys.alpha, &sys.force, m, settings.grid, settings.tol)?);
    enumerate_with_base(sys, base, n, settings)
}

/// Like [`enumerate_tori`] but with a precomputed (possibly altered) base.
pub fn enumerate_with_base(sys: &System, base: Arc<TorusSolution>, n: usize, settings: &SolverSettings) -> Result<TorusCatalog> {
    let m = base.m;
    let branch_separation = base.branch_separation();
    if m >= 2 && branch_separation <= DISTINCTNESS_THRESHOLD {
        return Err(Error::DistinctnessFailure { m, distance: branch_separation });
    }

    let points = periodic_points_up_to(&sys.a, n as u64, settings.budget)?;
    let counts = (1..=n)
        .map(|k| CountRow {
            n: k,
            exact: points.exact.then(|| points.points.iter().filter(|p| p.period <= k).count() as u64),
            bounds: count_bounds(&sys.a, k as u64),
        })
        .collect();

    let am = sys.a.to_f64();
    let fibers = verify_fibers(base.grid_size());
    let max_period = points.points.iter().map(|p| p.period).max().unwrap_or(1);
    let factors: Vec<f64> = (0..=max_period).map(|k| propagation_factor(&sys.a, k)).collect::<Result<_>>()?;
    let descriptors = points
        .points
        .par_iter()
        .map(|p| {
            let d = TorusDescriptor { base: base.clone(), translate: p.point, period: p.period, m };
            verify_descriptor(sys, &am, d, &fibers, factors[p.period])
        })
        .collect();

    Ok(TorusCatalog {
        m,
        horizon: n,
        base_residual: base.residual_sup,
        base,
        descriptors,
        counts,
        exact: points.exact,
        branch_separation,
    })
}

/// Period-1 residual of the translate `ĝ + p` on the base grid.
pub fn translate_residual(sys: &System, base: &TorusSolution, p: Vec2) -> f64 {
    let shifted = TorusSolution {
        grid: base.grid.iter().map(|g| [g[0] + p[0], g[1] + p[1]]).collect(),
        modes: {
            let mut modes = base.modes.clone();
            let c = base.mode_cutoff;
            modes[c][0].re += p[0];
            modes[c][1].re += p[1];
            modes
        },
        ..base.clone()
    };
    invariance_residual(&shifted, &sys.a, sys.alpha, &sys.force, base.m, base.grid_size())
}

/// Max over grid fibers and a 16×16 lattice of `x` of the distance between
/// `φ_mⁿ(T_g(ω', x))` and `T_g(φ_{m,0}ⁿ(ω', x))`, with `T_g(ω', x) = (ω', x + ĝ(ω'))`.
pub fn conjugacy_check(sys: &System, base: &TorusSolution, n: usize, grid: usize) -> f64 {
    let am = sys.a.to_f64();
    let m = base.m;
    let shift = base.rotation();
    let lattice: Vec<Vec2> = (0..CONJUGACY_LATTICE)
        .flat_map(|i| (0..CONJUGACY_LATTICE).map(move |l| [i as f64, l as f64]))
        .map(|[i, l]| [i / CONJUGACY_LATTICE as f64, l / CONJUGACY_LATTICE as f64])
        .collect();
    (0..grid)
        .into_par_iter()
        .map(|j| {
            let w = j as f64 / grid as f64;
            let forces: Vec<Vec2> =
                (0..n).map(|s| sys.force.evaluate_lift(wrap01(m as f64 * w + s as f64 * sys.alpha))).collect();
            let g0 = base.eval_lift(w);
            let gn = base.eval_lift(w + n as f64 * shift);
            lattice
                .iter()
                .map(|&x| {
                    let mut left = [wrap01(x[0] + g0[0]), wrap01(x[1] + g0[1])];
                    let mut right = x;
                    for hv in &forces {
                        let al = mat_vec(&am, left);
                        left = [wrap01(al[0] + hv[0]), wrap01(al[1] + hv[1])];
                        let ar = mat_vec(&am, right);
                        right = [wrap01(ar[0]), wrap01(ar[1])];
                    }
                    torus_distance(left, [right[0] + gn[0], right[1] + gn[1]])
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthRow {
    pub n: usize,
    #[serde(serialize_with = "crate::linalg::serialize_big")]
    pub lower: BigInt,
    pub exact: Option<u64>,
    #[serde(serialize_with = "crate::linalg::serialize_big")]
    pub upper: BigInt,
    pub rate_lower: f64,
    pub rate_exact: Option<f64>,
    pub rate_upper: f64,
    pub h_top: f64,
}

impl GrowthRow {
    /// Best available rate: exact when enumerated, else the lower bound.
    pub fn rate(&self) -> f64 {
        self.rate_exact.unwrap_or(self.rate_lower)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthSummary {
    pub h_top: f64,
    /// `|rate(n_max) − h_top|` using the best available rate.
    pub final_gap: f64,
    pub final_gap_lower: f64,
    pub final_gap_upper: f64,
    /// `rate_lower` is nondecreasing from `n = 2` on.
    pub lower_monotone: bool,
    pub last_exact_n: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub rows: Vec<GrowthRow>,
    pub summary: GrowthSummary,
}

impl GrowthReport {
    /// `E(n) = max_{n ≤ k ≤ n_max} |rate(k) − h_top|`, the decreasing
    /// envelope of the gap sequence starting at `from`.
    pub fn gap_envelope(&self, from: usize) -> Vec<(usize, f64)> {
        let rows: Vec<&GrowthRow> = self.rows.iter().filter(|r| r.n >= from).collect();
        let mut env = vec![0.0; rows.len()];
        let mut run = 0.0f64;
        for (i, r) in rows.iter().enumerate().rev() {
            run = run.max((r.rate() - r.h_top).abs());
            env[i] = run;
        }
        rows.iter().zip(env).map(|(r, e)| (r.n, e)).collect()
    }
}

pub fn growth_rate_table(a: &IntMatrix2, n_max: usize, budget: u64) -> Result<GrowthReport> {
    let h_top = topological_entropy(a)?;
    let exact = union_counts(a, n_max as u64, budget)?;
    let rows: Vec<GrowthRow> = (1..=n_max)
        .map(|n| {
            let b = count_bounds(a, n as u64);
            let nf = n as f64;
            let ex = exact[n - 1];
            GrowthRow {
                n,
                rate_lower: ln_big(&b.lower) / nf,
                rate_upper: ln_big(&b.upper) / nf,
                rate_exact: ex.map(|c| (c as f64).ln() / nf),
                lower: b.lower,
                exact: ex,
                upper: b.upper,
                h_top,
            }
        })
        .collect();
    let last = rows.last().expect("n_max >= 1");
    let summary = GrowthSummary {
        h_top,
        final_gap: (last.rate() - h_top).abs(),
        final_gap_lower: (last.rate_lower - h_top).abs(),
        final_gap_upper: (last.rate_upper - h_top).abs(),
        lower_monotone: rows.windows(2).filter(|w| w[0].n >= 2).all(|w| w[1].rate_lower >= w[0].rate_lower),
        last_exact_n: rows.iter().rev().find(|r| r.exact.is_some()).map(|r| r.n),
    };
    Ok(GrowthReport { rows, summary })
}

/// Maximum `n` accepted by [`estimate_entropy_separated`].
pub const SEPARATED_MAX_N: usize = 8;
/// Maximum grid density accepted by [`estimate_entropy_separated`].
pub const SEPARATED_MAX_GRID: usize = 512;

/// Greedy `(n, ε)`-separated set for `x ↦ Ax` on the `g × g` lattice of T²,
/// in row-major order. Returns its cardinality. Works for any integer
/// matrix (no hyperbolicity check), which lets tests probe degenerate maps.
pub fn separated_set_size(a: &[[i64; 2]; 2], n: usize, eps: f64, g: usize) -> usize {
    assert!(n >= 1 && g >= 1);
    let gi = g as i64;
    let npts = g * g;
    // Orbits in lattice units, exact mod g.
    let mut orbits = vec![[0u32; 2]; npts * n];
    for idx in 0..npts {
        let (mut x, mut y) = ((idx / g) as i64, (idx % g) as i64);
        for t in 0..n {
            orbits[idx * n + t] = [x as u32, y as u32];
            (x, y) = ((a[0][0] * x + a[0][1] * y).rem_euclid(gi), (a[1][0] * x + a[1][1] * y).rem_euclid(gi));
        }
    }
    let limit = eps * g as f64;
    let circ = |p: u32, q: u32| {
        let d = p.abs_diff(q);
        d.min(g as u32 - d) as f64
    };
    let separated = |i: usize, j: usize| {
        (0..n).any(|t| {
            let (p, q) = (orbits[i * n + t], orbits[j * n + t]);
            circ(p[0], q[0]).max(circ(p[1], q[1])) > limit
        })
    };

    // Conflicts are within `limit` at t = 0, so bucket by initial position.
    let cell = (limit.floor() as usize).clamp(1, g);
    let cells = g.div_ceil(cell);
    let reach = (limit / cell as f64).ceil() as i64 + 1;
    let mut offsets: Vec<usize> = (-reach..=reach).map(|d| d.rem_euclid(cells as i64) as usize).collect();
    offsets.sort_unstable();
    offsets.dedup();
    let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); cells * cells];
    let mut count = 0;
    for idx in 0..npts {
        let (cx, cy) = ((idx / g) / cell, (idx % g) / cell);
        let ok = offsets.iter().all(|&dx| {
            offsets.iter().all(|&dy| {
                let b = ((cx + dx) % cells) * cells + (cy + dy) % cells;
                buckets[b].iter().all(|&j| separated(idx, j as usize))
            })
        });
        if ok {
            buckets[cx * cells + cy].push(idx as u32);
            count += 1;
        }
    }
    count
}

/// `(1/n) log |S|` for a greedy `(n, ε)`-separated set `S` of the toral
/// automorphism on a `grid × grid` lattice.
///
/// Diagnostic only: the lattice caps `|S|` at `grid²` and the `ε`-packing
/// contributes a `(2/n) log(1/ε)`-sized bias at small `n`.
pub fn estimate_entropy_separated(a: &IntMatrix2, n: usize, eps: f64, grid: usize) -> Result<f64> {
    crate::linalg::require_hyperbolic(a)?;
    if n == 0 || n > SEPARATED_MAX_N || grid > SEPARATED_MAX_GRID {
        return Err(Error::CostGuard(format!(
            "n = {n} (max {SEPARATED_MAX_N}), grid = {grid} (max {SEPARATED_MAX_GRID})"
        )));
    }
    let size = separated_set_size(&a.to_i64()?, n, eps, grid);
    Ok((size as f64).ln() / n as f64)
}

/// `(1/(n−1)) log(|S_n| / |S_1|)` for the same greedy sets: dividing out the
/// one-step packing count removes most of the `ε` bias. Needs `n ≥ 2`.
pub fn estimate_entropy_separated_ratio(a: &IntMatrix2, n: usize, eps: f64, grid: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::CostGuard(format!("ratio estimate needs n >= 2, got {n}")));
    }
    let raw_n = estimate_entropy_separated(a, n, eps, grid)? * n as f64;
    let raw_1 = estimate_entropy_separated(a, 1, eps, grid)?;
    Ok((raw_n - raw_1) / (n - 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_values() {
        let h = |rows| topological_entropy(&IntMatrix2::from_rows(rows)).unwrap();
        assert!((h([[2, 1], [1, 1]]) - 0.962_423_650_1).abs() < 1e-10);
        assert!((h([[1, 1], [1, 0]]) - 0.481_211_825_0).abs() < 1e-10);
        assert!((h([[3, 1], [2, 1]]) - 1.316_957_896_9).abs() < 1e-10);
    }

    #[test]
    fn ln_big_handles_huge_values() {
        let x = BigInt::from(1u8) << 2000usize;
        assert!((ln_big(&x) - 2000.0 * std::f64::consts::LN_2).abs() < 1e-9);
        assert!((ln_big(&BigInt::from(20)) - 20f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn growth_small() {
        let rep = growth_rate_table(&IntMatrix2::cat_map(), 3, 1000).unwrap();
        let counts: Vec<_> = rep.rows.iter().map(|r| r.exact.unwrap()).collect();
        assert_eq!(counts, vec![1, 5, 20]);
        let rates: Vec<_> = rep.rows.iter().map(|r| r.rate()).collect();
        assert_eq!(rates[0], 0.0);
        assert!((rates[1] - 0.80472).abs() < 1e-5);
        assert!((rates[2] - 0.99857).abs() < 1e-5);
        for r in &rep.rows {
            assert!(r.rate_lower <= r.rate_upper);
        }
    }

    #[test]
    fn growth_single_row() {
        let rep = growth_rate_table(&IntMatrix2::cat_map(), 1, 10).unwrap();
        assert_eq!(rep.rows[0].rate(), 0.0);
    }

    #[test]
    fn growth_falls_back_to_bounds() {
        let rep = growth_rate_table(&IntMatrix2::cat_map(), 6, 100).unwrap();
        assert!(rep.rows[4].exact.is_none());
        assert_eq!(rep.summary.last_exact_n, Some(4));
        assert_eq!(rep.rows[5].rate(), rep.rows[5].rate_lower);
    }

    #[test]
    fn cost_guard() {
        let cat = IntMatrix2::cat_map();
        assert!(matches!(estimate_entropy_separated(&cat, 9, 0.1, 64), Err(Error::CostGuard(_))));
        assert!(matches!(estimate_entropy_separated(&cat, 2, 0.1, 1024), Err(Error::CostGuard(_))));
    }

    #[test]
    fn coarse_separation_is_small() {
        let v = separated_set_size(&[[2, 1], [1, 1]], 1, 0.5, 64);
        assert!(v <= 4, "{v}");
        assert!(v >= 1);
    }
}
