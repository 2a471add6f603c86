//! The base invariant torus.
//!
//! Everything here lives in the induced system: variable `ω' = ω/m`,
//! rotation `α/m`, force `ω' ↦ h(mω')`. A degree-`m` torus over T is the
//! 1-periodic section `ĝ` of that system read back as `g(ω) = ĝ(ω/m)`.
//!
//! With `deg_g = m (I − A)⁻¹ deg_h` the periodic part `r̃ = ĝ − deg_g·ω'`
//! solves `r̃(ω' + α/m) = A r̃(ω') + s(mω') − deg_g α/m`, which is diagonal in
//! Fourier space:
//!
//! * `a_0 = (I − A)⁻¹ (b_0 − deg_g α/m)`
//! * `a_{km} = (e^{2πikα} I − A)⁻¹ b_k` for `k ≠ 0`
//! * `a_j = 0` when `m ∤ j`.
//!
//! A non-smooth remainder is handled separately by the cocycle series and
//! added on top.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::circle::{torus_distance, ForceMap, Rescaled, TorusPoint, Vec2};
use crate::cocycle::{solve_twisted_cocycle, CocycleSolution};
use crate::error::{Error, Result};
use crate::linalg::{rational_inverse, require_hyperbolic, IntMatrix2, RatVec2};
use crate::periodic::RationalPoint2;

/// `(I − A)⁻¹ deg_h` in exact arithmetic.
fn degree_preimage(a: &IntMatrix2, deg_h: [i64; 2]) -> Result<RatVec2> {
    require_hyperbolic(a)?;
    Ok(rational_inverse(&a.identity_minus())?.apply_int(deg_h))
}

/// Least `m ≥ 1` with `m (I − A)⁻¹ deg_h ∈ ℤ²`.
pub fn minimal_degree_m(a: &IntMatrix2, deg_h: [i64; 2]) -> Result<u64> {
    let v = degree_preimage(a, deg_h)?;
    let m = v.denominator_lcm();
    m.to_u64().ok_or_else(|| Error::Overflow(m.to_string()))
}

/// `m (I − A)⁻¹ deg_h`, which must be integral.
pub fn torus_degree(a: &IntMatrix2, deg_h: [i64; 2], m: u64) -> Result<[i64; 2]> {
    let v = degree_preimage(a, deg_h)?.scale(&BigInt::from(m));
    if !v.is_integral() {
        return Err(Error::NonIntegralDegree(m));
    }
    let to_i = |x: &num_rational::BigRational| {
        x.to_integer().to_i64().ok_or_else(|| Error::Overflow(x.to_string()))
    };
    Ok([to_i(&v.0[0])?, to_i(&v.0[1])?])
}

/// For each `m' < m`, the non-integral vector `m' (I − A)⁻¹ deg_h`: the
/// witness that no lower-degree torus exists.
pub fn lower_degree_witnesses(a: &IntMatrix2, deg_h: [i64; 2]) -> Result<Vec<(u64, RatVec2)>> {
    let v = degree_preimage(a, deg_h)?;
    let m = minimal_degree_m(a, deg_h)?;
    Ok((1..m).map(|mp| (mp, v.scale(&BigInt::from(mp)))).collect())
}

/// The base (period-1) invariant section of the induced system.
#[derive(Clone, Debug)]
pub struct TorusSolution {
    pub m: u64,
    pub n: u64,
    pub deg_g: [i64; 2],
    /// Rotation of the original system; the induced rotation is `alpha / m`.
    pub alpha: f64,
    /// Largest `|j|` with a stored mode.
    pub mode_cutoff: usize,
    /// `a_j` for both components, indexed `j + mode_cutoff`.
    pub modes: Vec<[Complex64; 2]>,
    /// Correction from the sampled remainder, if any.
    pub eta: Option<CocycleSolution>,
    /// Lift `g̃(ω')` at `ω' = j / grid.len()`.
    pub grid: Vec<Vec2>,
    pub residual_sup: f64,
    /// `min_k |det(e^{2πikα} I − A)|` over the solved modes.
    pub min_mode_det: f64,
}

impl TorusSolution {
    pub fn rotation(&self) -> f64 {
        self.alpha / self.m as f64
    }

    pub fn grid_size(&self) -> usize {
        self.grid.len()
    }

    pub fn mode(&self, j: i64) -> [Complex64; 2] {
        let c = self.mode_cutoff as i64;
        if j.abs() > c {
            [Complex64::zero(); 2]
        } else {
            self.modes[(j + c) as usize]
        }
    }

    /// `Σ a_j e^{2πijω'}` (real part), summed over multiples of `m` only.
    pub fn eval_modes(&self, omega: f64) -> Vec2 {
        let c = self.mode_cutoff;
        let m = self.m as usize;
        let step = Complex64::from_polar(1.0, TAU * self.m as f64 * omega);
        let mut acc = [self.modes[c][0].re, self.modes[c][1].re];
        let mut z = Complex64::new(1.0, 0.0);
        for j in (m..=c).step_by(m) {
            z *= step;
            for (i, slot) in acc.iter_mut().enumerate() {
                *slot += (self.modes[c + j][i] * z + self.modes[c - j][i] * z.conj()).re;
            }
        }
        acc
    }

    /// 1-periodic part of the lift: Fourier modes plus the cocycle correction.
    pub fn eval_periodic(&self, omega: f64) -> Vec2 {
        let mut v = self.eval_modes(omega);
        if let Some(eta) = &self.eta {
            let e = eta.eval(omega);
            v[0] += e[0];
            v[1] += e[1];
        }
        v
    }

    pub fn eval_lift(&self, omega: f64) -> Vec2 {
        let p = self.eval_periodic(omega);
        [self.deg_g[0] as f64 * omega + p[0], self.deg_g[1] as f64 * omega + p[1]]
    }

    pub fn eval_torus(&self, omega: f64) -> TorusPoint {
        TorusPoint::from_lift(self.eval_lift(omega))
    }

    /// The degree-`m` section over the original base: `g(ω) = ĝ(ω/m)`.
    pub fn eval_original(&self, omega: f64) -> TorusPoint {
        self.eval_torus(omega / self.m as f64)
    }

    /// Branch values `ĝ(j/m)`, `j = 0..m`, at fiber ω = 0.
    pub fn branch_values(&self) -> Vec<TorusPoint> {
        (0..self.m).map(|j| self.eval_torus(j as f64 / self.m as f64)).collect()
    }

    /// Smallest pairwise torus distance between branch values (∞ for m = 1).
    pub fn branch_separation(&self) -> f64 {
        let b = self.branch_values();
        let mut best = f64::INFINITY;
        for i in 0..b.len() {
            for j in i + 1..b.len() {
                best = best.min(b[i].distance(&b[j]));
            }
        }
        best
    }

    /// Copy with `a_j += delta` (and `a_{-j}` conjugated), grid and residual
    /// recomputed. Used for fault injection.
    pub fn with_perturbed_mode(&self, j: i64, delta: [Complex64; 2], a: &IntMatrix2, h: &ForceMap) -> TorusSolution {
        let mut out = self.clone();
        let c = self.mode_cutoff as i64;
        assert!(j.abs() <= c, "mode out of range");
        for i in 0..2 {
            if j == 0 {
                out.modes[c as usize][i] += Complex64::new(delta[i].re, 0.0);
            } else {
                out.modes[(j + c) as usize][i] += delta[i];
                out.modes[(c - j) as usize][i] += delta[i].conj();
            }
        }
        out.refresh(a, h);
        out
    }

    fn refresh(&mut self, a: &IntMatrix2, h: &ForceMap) {
        let n = self.grid.len();
        self.grid = (0..n).into_par_iter().map(|j| self.eval_lift(j as f64 / n as f64)).collect();
        self.residual_sup = invariance_residual(self, a, self.alpha, h, self.m, n);
    }
}

/// A translate `ĝ + p` of the base section by a periodic point of `A`.
#[derive(Clone, Debug)]
pub struct TorusDescriptor {
    pub base: Arc<TorusSolution>,
    pub translate: RationalPoint2,
    /// Least period of `translate` under `A`.
    pub period: usize,
    pub m: u64,
}

impl TorusDescriptor {
    pub fn eval_lift(&self, omega: f64) -> Vec2 {
        let g = self.base.eval_lift(omega);
        let p = self.translate.to_f64();
        [g[0] + p[0], g[1] + p[1]]
    }
}

fn solve_mode(a: &[[f64; 2]; 2], z: Complex64, b: [Complex64; 2]) -> ([Complex64; 2], f64) {
    // (zI − A)⁻¹ b by adjugate over determinant.
    let m00 = z - a[0][0];
    let m11 = z - a[1][1];
    let m01 = Complex64::new(-a[0][1], 0.0);
    let m10 = Complex64::new(-a[1][0], 0.0);
    let det = m00 * m11 - m01 * m10;
    let x = [(m11 * b[0] - m01 * b[1]) / det, (m00 * b[1] - m10 * b[0]) / det];
    (x, det.norm())
}

/// Fourier solve for the trigonometric part of `h` (any remainder is ignored).
pub fn solve_fourier_torus(a: &IntMatrix2, alpha: f64, h: &ForceMap, m: u64, grid: usize) -> Result<TorusSolution> {
    require_hyperbolic(a)?;
    let deg_g = torus_degree(a, h.degree, m)?;
    let am = a.to_f64();
    let k_max = h.mode_cutoff();
    let cutoff = k_max * m as usize;
    let mut modes = vec![[Complex64::zero(); 2]; 2 * cutoff + 1];

    let shift = alpha / m as f64;
    let b0 = [
        Complex64::new(h.modes[0].coeff(0).re - deg_g[0] as f64 * shift, 0.0),
        Complex64::new(h.modes[1].coeff(0).re - deg_g[1] as f64 * shift, 0.0),
    ];
    let (a0, _) = solve_mode(&am, Complex64::new(1.0, 0.0), b0);
    modes[cutoff] = [Complex64::new(a0[0].re, 0.0), Complex64::new(a0[1].re, 0.0)];

    let mut min_mode_det = f64::INFINITY;
    for k in 1..=k_max as i64 {
        let b = [h.modes[0].coeff(k), h.modes[1].coeff(k)];
        if b[0].norm() == 0.0 && b[1].norm() == 0.0 {
            continue;
        }
        // Mode j = km rotates by e^{2πi j α/m} = e^{2πikα}.
        let z = Complex64::from_polar(1.0, TAU * k as f64 * alpha);
        let (x, det) = solve_mode(&am, z, b);
        min_mode_det = min_mode_det.min(det);
        let j = k as usize * m as usize;
        modes[cutoff + j] = x;
        modes[cutoff - j] = [x[0].conj(), x[1].conj()];
    }

    let mut sol = TorusSolution {
        m,
        n: 1,
        deg_g,
        alpha,
        mode_cutoff: cutoff,
        modes,
        eta: None,
        grid: Vec::new(),
        residual_sup: 0.0,
        min_mode_det,
    };
    sol.grid = vec![[0.0; 2]; grid];
    sol.refresh(a, &h.trig_part());
    Ok(sol)
}

/// Fourier solve of the trigonometric part plus the cocycle series for the
/// sampled remainder, evaluated in the induced system.
pub fn build_base_torus(a: &IntMatrix2, alpha: f64, h: &ForceMap, m: u64, grid: usize, tol: f64) -> Result<TorusSolution> {
    let mut sol = solve_fourier_torus(a, alpha, h, m, grid)?;
    if let Some(r) = &h.remainder {
        let induced = Rescaled { inner: r.as_ref(), factor: m };
        sol.eta = Some(solve_twisted_cocycle(a, alpha / m as f64, &induced, grid, tol)?);
        sol.refresh(a, h);
    }
    Ok(sol)
}

/// `d(ĝ(ω'_j + α/m), A ĝ(ω'_j) + h(m ω'_j))` at `ω'_j = j / grid`, with `d`
/// the per-coordinate circle distance.
pub fn residual_profile(sol: &TorusSolution, a: &IntMatrix2, alpha: f64, h: &ForceMap, m: u64, grid: usize) -> Vec<f64> {
    let am = a.to_f64();
    let shift = alpha / m as f64;
    (0..grid)
        .into_par_iter()
        .map(|j| {
            let w = j as f64 / grid as f64;
            let g = sol.eval_lift(w);
            let hv = h.evaluate_lift(crate::circle::wrap01(m as f64 * w));
            let rhs = [
                am[0][0] * g[0] + am[0][1] * g[1] + hv[0],
                am[1][0] * g[0] + am[1][1] * g[1] + hv[1],
            ];
            torus_distance(sol.eval_lift(w + shift), rhs)
        })
        .collect()
}

/// Max of [`residual_profile`].
pub fn invariance_residual(sol: &TorusSolution, a: &IntMatrix2, alpha: f64, h: &ForceMap, m: u64, grid: usize) -> f64 {
    residual_profile(sol, a, alpha, h, m, grid).into_iter().fold(0.0, f64::max)
}
