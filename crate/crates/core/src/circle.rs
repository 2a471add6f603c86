//! Maps T → T² presented as an integer degree plus a 1-periodic part.
//!
//! A [`ForceMap`] stores the lift `h(ω) = deg·ω + s(ω) + r(ω)` where `s` is a
//! Hermitian trigonometric polynomial `Σ b_k e^{2πikω}` and `r` an optional
//! degree-0 remainder held as a uniform grid with periodic linear
//! interpolation.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec2 = [f64; 2];

/// Largest wrapped increment accepted by [`degree_from_samples`].
pub const MAX_WRAPPED_INCREMENT: f64 = 0.45;

/// Reduce to the canonical representative in `[0, 1)`.
#[inline]
pub fn wrap01(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Signed distance to the nearest integer, in `[-1/2, 1/2]`.
#[inline]
pub fn wrap_centered(x: f64) -> f64 {
    x - x.round()
}

/// Per-coordinate circle distance `min(frac, 1 - frac)`, max over both.
#[inline]
pub fn torus_distance(p: Vec2, q: Vec2) -> f64 {
    wrap_centered(p[0] - q[0]).abs().max(wrap_centered(p[1] - q[1]).abs())
}

/// A point of T² with both coordinates in `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint(pub Vec2);

impl TorusPoint {
    pub fn from_lift(v: Vec2) -> Self {
        TorusPoint([wrap01(v[0]), wrap01(v[1])])
    }

    pub fn distance(&self, other: &TorusPoint) -> f64 {
        torus_distance(self.0, other.0)
    }
}

/// Anything that evaluates to a 1-periodic ℝ²-valued function of ω.
pub trait PeriodicMap: Sync {
    fn eval(&self, omega: f64) -> Vec2;

    /// An upper bound (or, for sampled maps, the exact value) of the sup-norm.
    fn sup_norm(&self) -> f64;
}

/// Real trigonometric polynomial `Σ_{|k|≤K} b_k e^{2πikω}` with
/// `b_{-k} = conj(b_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    /// Coefficients indexed by `k + cutoff`.
    coeffs: Vec<Complex64>,
}

impl TrigPoly {
    pub fn zero(cutoff: usize) -> Self {
        Self { coeffs: vec![Complex64::new(0.0, 0.0); 2 * cutoff + 1] }
    }

    /// Build from `(k, b_k)` pairs; the conjugate mode at `-k` is filled in.
    /// `b_0` must be real. A pair listed twice (including as `±k`) must agree.
    pub fn from_modes(cutoff: usize, modes: &[(i64, Complex64)]) -> std::result::Result<Self, String> {
        let mut p = Self::zero(cutoff);
        let mut set = vec![false; 2 * cutoff + 1];
        for &(k, b) in modes {
            if k.unsigned_abs() as usize > cutoff {
                return Err(format!("mode k = {k} exceeds cutoff {cutoff}"));
            }
            if k == 0 && b.im != 0.0 {
                return Err("mode k = 0 must be real".into());
            }
            for (kk, bb) in [(k, b), (-k, b.conj())] {
                let idx = (kk + cutoff as i64) as usize;
                if set[idx] && p.coeffs[idx] != bb {
                    return Err(format!("mode k = {kk} given inconsistently (Hermitian symmetry)"));
                }
                p.coeffs[idx] = bb;
                set[idx] = true;
            }
        }
        Ok(p)
    }

    /// Build from a full coefficient vector indexed `k + cutoff`, averaging
    /// `b_k` with `conj(b_{-k})` to enforce symmetry.
    pub fn from_coeffs_symmetrized(coeffs: Vec<Complex64>) -> Self {
        assert!(coeffs.len() % 2 == 1, "coefficient vector must have odd length");
        let k_max = coeffs.len() / 2;
        let mut out = coeffs.clone();
        for k in 0..=k_max {
            let avg = (coeffs[k_max + k] + coeffs[k_max - k].conj()) * 0.5;
            out[k_max + k] = avg;
            out[k_max - k] = avg.conj();
        }
        Self { coeffs: out }
    }

    pub fn cutoff(&self) -> usize {
        self.coeffs.len() / 2
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        let c = self.cutoff() as i64;
        if k.abs() > c {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + c) as usize]
        }
    }

    /// Nonzero modes as `(k, b_k)`, ascending in `k`.
    pub fn modes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let c = self.cutoff() as i64;
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, b)| (i as i64 - c, *b))
            .filter(|(_, b)| b.norm() != 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|b| b.norm() == 0.0)
    }

    pub fn is_hermitian(&self) -> bool {
        let c = self.cutoff() as i64;
        (0..=c).all(|k| self.coeff(k) == self.coeff(-k).conj())
    }

    /// `Σ |b_k|`, a bound on the sup-norm.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|b| b.norm()).sum()
    }

    pub fn eval(&self, omega: f64) -> f64 {
        let c = self.cutoff();
        let base = Complex64::from_polar(1.0, TAU * omega);
        let mut z = Complex64::new(1.0, 0.0);
        let mut acc = self.coeffs[c].re;
        for k in 1..=c {
            z *= base;
            // b_k z + b_{-k} conj(z) = 2 Re(b_k z) under Hermitian symmetry
            let s = self.coeffs[c + k] * z + self.coeffs[c - k] * z.conj();
            debug_assert!(s.im.abs() < 1e-12 * (1.0 + s.re.abs()));
            acc += s.re;
        }
        acc
    }

    pub fn add(&self, other: &TrigPoly) -> TrigPoly {
        let c = self.cutoff().max(other.cutoff());
        let coeffs = (-(c as i64)..=c as i64).map(|k| self.coeff(k) + other.coeff(k)).collect();
        TrigPoly { coeffs }
    }
}

/// Samples of a 1-periodic map on the uniform grid `j/N`, evaluated by
/// periodic linear interpolation.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledMap {
    values: Vec<Vec2>,
}

impl SampledMap {
    pub fn new(values: Vec<Vec2>) -> Self {
        assert!(!values.is_empty(), "sampled map needs at least one sample");
        Self { values }
    }

    pub fn from_fn(n: usize, f: impl Fn(f64) -> Vec2) -> Self {
        Self::new((0..n).map(|j| f(j as f64 / n as f64)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Vec2] {
        &self.values
    }

    /// Component-wise sum on a shared grid.
    pub fn add(&self, other: &SampledMap) -> SampledMap {
        assert_eq!(self.len(), other.len());
        let values =
            self.values.iter().zip(&other.values).map(|(a, b)| [a[0] + b[0], a[1] + b[1]]).collect();
        SampledMap { values }
    }
}

impl PeriodicMap for SampledMap {
    fn eval(&self, omega: f64) -> Vec2 {
        let n = self.values.len();
        let t = wrap01(omega) * n as f64;
        let i = (t.floor() as usize).min(n - 1);
        let w = t - i as f64;
        let a = self.values[i];
        let b = self.values[(i + 1) % n];
        [a[0] + w * (b[0] - a[0]), a[1] + w * (b[1] - a[1])]
    }

    fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v[0].abs().max(v[1].abs())).fold(0.0, f64::max)
    }
}

/// `ω ↦ inner(m·ω)`, the force seen by the induced system.
pub struct Rescaled<'a, M: ?Sized> {
    pub inner: &'a M,
    pub factor: u64,
}

impl<M: PeriodicMap + ?Sized> PeriodicMap for Rescaled<'_, M> {
    fn eval(&self, omega: f64) -> Vec2 {
        self.inner.eval(wrap01(self.factor as f64 * omega))
    }

    fn sup_norm(&self) -> f64 {
        self.inner.sup_norm()
    }
}

/// Wraps a closure. The sup-norm is estimated on a 4096-point grid, so only
/// use this for maps whose sup is attained (or nearly so) there.
pub struct FnMap<F>(pub F);

impl<F: Fn(f64) -> Vec2 + Sync> PeriodicMap for FnMap<F> {
    fn eval(&self, omega: f64) -> Vec2 {
        (self.0)(omega)
    }

    fn sup_norm(&self) -> f64 {
        (0..=4096)
            .map(|j| {
                let v = (self.0)(j as f64 / 4096.0);
                v[0].abs().max(v[1].abs())
            })
            .fold(0.0, f64::max)
    }
}

/// Named continuous degree-0 waveforms for remainders.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Waveform {
    /// `4|ω − ½| − 1`: +1 at ω = 0, −1 at ω = ½.
    Triangle,
    /// Rises linearly from −1 to +1 on `[0, 0.9]`, returns linearly on `[0.9, 1]`.
    SawtoothSmoothed,
}

impl Waveform {
    pub fn eval(self, omega: f64) -> f64 {
        let w = wrap01(omega);
        match self {
            Waveform::Triangle => 4.0 * (w - 0.5).abs() - 1.0,
            Waveform::SawtoothSmoothed => {
                const RISE: f64 = 0.9;
                if w <= RISE {
                    -1.0 + 2.0 * w / RISE
                } else {
                    1.0 - 2.0 * (w - RISE) / (1.0 - RISE)
                }
            }
        }
    }

    /// Amplitude-scaled samples on `n` points, same waveform in both components.
    pub fn sample(self, amplitude: f64, n: usize) -> SampledMap {
        SampledMap::from_fn(n, |w| {
            let v = amplitude * self.eval(w);
            [v, v]
        })
    }
}

/// A force `h: T → T²` as degree + trig polynomial + optional remainder.
#[derive(Clone, Debug, PartialEq)]
pub struct ForceMap {
    pub degree: [i64; 2],
    pub modes: [TrigPoly; 2],
    pub remainder: Option<Arc<SampledMap>>,
}

impl ForceMap {
    pub fn zero() -> Self {
        Self::trig([0, 0], TrigPoly::zero(0), TrigPoly::zero(0))
    }

    pub fn constant(c: Vec2) -> Self {
        let p = |x: f64| TrigPoly::from_modes(0, &[(0, Complex64::new(x, 0.0))]).unwrap();
        Self::trig([0, 0], p(c[0]), p(c[1]))
    }

    pub fn trig(degree: [i64; 2], s1: TrigPoly, s2: TrigPoly) -> Self {
        Self { degree, modes: [s1, s2], remainder: None }
    }

    pub fn with_remainder(mut self, r: SampledMap) -> Self {
        self.remainder = Some(Arc::new(r));
        self
    }

    /// Same degree and modes, remainder dropped.
    pub fn trig_part(&self) -> ForceMap {
        ForceMap { degree: self.degree, modes: self.modes.clone(), remainder: None }
    }

    pub fn mode_cutoff(&self) -> usize {
        self.modes[0].cutoff().max(self.modes[1].cutoff())
    }

    pub fn is_zero(&self) -> bool {
        self.degree == [0, 0]
            && self.modes.iter().all(TrigPoly::is_zero)
            && self.remainder.as_ref().is_none_or(|r| r.sup_norm() == 0.0)
    }

    pub fn evaluate_lift(&self, omega: f64) -> Vec2 {
        let mut v = [
            self.degree[0] as f64 * omega + self.modes[0].eval(omega),
            self.degree[1] as f64 * omega + self.modes[1].eval(omega),
        ];
        if let Some(r) = &self.remainder {
            let rv = r.eval(omega);
            v[0] += rv[0];
            v[1] += rv[1];
        }
        v
    }

    pub fn evaluate_torus(&self, omega: f64) -> TorusPoint {
        TorusPoint::from_lift(self.evaluate_lift(omega))
    }
}

pub fn evaluate_lift(h: &ForceMap, omega: f64) -> Vec2 {
    h.evaluate_lift(omega)
}

pub fn evaluate_torus(h: &ForceMap, omega: f64) -> TorusPoint {
    h.evaluate_torus(omega)
}

/// Winding numbers of a sampled map plus the largest wrapped increment seen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DegreeEstimate {
    pub degree: [i64; 2],
    pub max_increment: f64,
}

/// Winding number per component from samples at `ω = j/N`, `j = 0..=N`
/// (the last sample is the value at ω = 1). Values may be lifts or torus
/// coordinates: increments are wrapped to `[-½, ½]` before summing.
pub fn degree_from_samples(samples: &[Vec2]) -> Result<DegreeEstimate> {
    let mut total = [0.0f64; 2];
    let mut max_increment = 0.0f64;
    for (i, pair) in samples.windows(2).enumerate() {
        for c in 0..2 {
            let d = wrap_centered(pair[1][c] - pair[0][c]);
            if d.abs() >= MAX_WRAPPED_INCREMENT {
                return Err(Error::UndersampledLift { index: i, increment: d });
            }
            max_increment = max_increment.max(d.abs());
            total[c] += d;
        }
    }
    Ok(DegreeEstimate { degree: [total[0].round() as i64, total[1].round() as i64], max_increment })
}

/// Result of [`fit_modes`]: the truncated polynomial and the sup-norm of the
/// discarded tail on the sample grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeFit {
    pub poly: TrigPoly,
    pub tail_sup: f64,
}

/// DFT of degree-0 samples at `ω = j/N`, keeping `|k| ≤ cutoff`.
pub fn fit_modes(samples: &[f64], cutoff: usize) -> Result<ModeFit> {
    let n = samples.len();
    if n < 2 * cutoff + 2 {
        return Err(Error::CutoffTooLarge { cutoff, samples: n });
    }
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    let coeffs: Vec<Complex64> = (-(cutoff as i64)..=cutoff as i64)
        .map(|k| buf[k.rem_euclid(n as i64) as usize] * scale)
        .collect();
    let poly = TrigPoly::from_coeffs_symmetrized(coeffs);
    let tail_sup = samples
        .iter()
        .enumerate()
        .map(|(j, &x)| (x - poly.eval(j as f64 / n as f64)).abs())
        .fold(0.0, f64::max);
    Ok(ModeFit { poly, tail_sup })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lift_pure_degree() {
        let h = ForceMap::trig([1, 0], TrigPoly::zero(0), TrigPoly::zero(0));
        assert_eq!(h.evaluate_lift(0.25), [0.25, 0.0]);
    }

    #[test]
    fn lift_cosine() {
        let s1 = TrigPoly::from_modes(1, &[(1, c(0.05, 0.0))]).unwrap();
        let h = ForceMap::trig([0, 0], s1, TrigPoly::zero(0));
        let v = h.evaluate_lift(0.0);
        assert!((v[0] - 0.1).abs() < 1e-15 && v[1] == 0.0);
    }

    #[test]
    fn lift_at_zero_sums_real_modes() {
        let s1 = TrigPoly::from_modes(3, &[(0, c(0.1, 0.0)), (2, c(0.02, 0.0)), (3, c(-0.03, 0.0))]).unwrap();
        let s2 = TrigPoly::from_modes(1, &[(1, c(0.2, 0.0))]).unwrap();
        let h = ForceMap::trig([0, 0], s1.clone(), s2.clone());
        let sum = |p: &TrigPoly| p.modes().map(|(_, b)| b.re).sum::<f64>();
        let v = h.evaluate_lift(0.0);
        assert!((v[0] - sum(&s1)).abs() < 1e-15);
        assert!((v[1] - sum(&s2)).abs() < 1e-15);
    }

    #[test]
    fn torus_reduction() {
        let near = |p: TorusPoint, q: Vec2| (p.0[0] - q[0]).abs() < 1e-12 && (p.0[1] - q[1]).abs() < 1e-12;
        assert!(near(TorusPoint::from_lift([2.9, 1.8]), [0.9, 0.8]));
        assert!(near(TorusPoint::from_lift([-0.1, -0.2]), [0.9, 0.8]));
        assert_eq!(TorusPoint::from_lift([0.0, 1.0]).0, [0.0, 0.0]);
        assert_eq!(TorusPoint::from_lift([-1e-18, 0.0]).0, [0.0, 0.0]);
    }

    #[test]
    fn hermitian_construction() {
        let p = TrigPoly::from_modes(2, &[(2, c(0.0, -0.1))]).unwrap();
        assert_eq!(p.coeff(-2), c(0.0, 0.1));
        assert!(p.is_hermitian());
        assert!(TrigPoly::from_modes(1, &[(0, c(0.1, 0.2))]).is_err());
        assert!(TrigPoly::from_modes(1, &[(1, c(0.1, 0.0)), (-1, c(0.2, 0.0))]).is_err());
        assert!(TrigPoly::from_modes(1, &[(1, c(0.1, 0.2)), (-1, c(0.1, -0.2))]).is_ok());
        assert!(TrigPoly::from_modes(1, &[(2, c(0.1, 0.0))]).is_err());
    }

    fn samples(n: usize, f: impl Fn(f64) -> Vec2) -> Vec<Vec2> {
        (0..=n).map(|j| f(j as f64 / n as f64)).collect()
    }

    #[test]
    fn degree_identity() {
        let s = samples(64, |w| [wrap01(w), 0.0]);
        assert_eq!(degree_from_samples(&s).unwrap().degree, [1, 0]);
    }

    #[test]
    fn degree_mixed() {
        let s = samples(256, |w| [wrap01(2.0 * w + 0.1 * (TAU * w).sin()), wrap01(-w)]);
        let est = degree_from_samples(&s).unwrap();
        assert_eq!(est.degree, [2, -1]);
        assert!(est.max_increment < 0.02);
    }

    #[test]
    fn degree_constant() {
        let s = samples(16, |_| [0.3, 0.7]);
        let est = degree_from_samples(&s).unwrap();
        assert_eq!(est.degree, [0, 0]);
        assert_eq!(est.max_increment, 0.0);
    }

    #[test]
    fn degree_undersampled() {
        let s = samples(4, |w| [wrap01(2.0 * w), 0.0]);
        assert!(matches!(degree_from_samples(&s), Err(Error::UndersampledLift { .. })));
    }

    #[test]
    fn fit_cosine() {
        let s: Vec<f64> = (0..64).map(|j| 0.1 * (TAU * j as f64 / 64.0).cos()).collect();
        let fit = fit_modes(&s, 2).unwrap();
        assert!((fit.poly.coeff(1) - c(0.05, 0.0)).norm() < 1e-12);
        assert!((fit.poly.coeff(-1) - c(0.05, 0.0)).norm() < 1e-12);
        for k in [-2, 0, 2] {
            assert!(fit.poly.coeff(k).norm() < 1e-12);
        }
        assert!(fit.tail_sup < 1e-12);
    }

    #[test]
    fn fit_zero() {
        let fit = fit_modes(&[0.0; 32], 3).unwrap();
        assert!(fit.poly.is_zero());
    }

    #[test]
    fn fit_sine() {
        let s: Vec<f64> = (0..64).map(|j| 0.2 * (2.0 * TAU * j as f64 / 64.0).sin()).collect();
        let fit = fit_modes(&s, 2).unwrap();
        assert!((fit.poly.coeff(2) - c(0.0, -0.1)).norm() < 1e-12);
        assert!((fit.poly.coeff(-2) - c(0.0, 0.1)).norm() < 1e-12);
    }

    #[test]
    fn fit_cutoff_guard() {
        assert!(matches!(fit_modes(&[0.0; 9], 4), Err(Error::CutoffTooLarge { .. })));
        assert!(fit_modes(&[0.0; 10], 4).is_ok());
    }

    #[test]
    fn interpolation_is_periodic_and_linear() {
        let m = SampledMap::new(vec![[0.0, 1.0], [1.0, 0.0]]);
        assert_eq!(m.eval(0.25), [0.5, 0.5]);
        assert_eq!(m.eval(0.75), [0.5, 0.5]);
        assert_eq!(m.eval(1.5), [1.0, 0.0]);
        assert_eq!(m.sup_norm(), 1.0);
    }

    #[test]
    fn waveforms() {
        assert_eq!(Waveform::Triangle.eval(0.0), 1.0);
        assert_eq!(Waveform::Triangle.eval(0.5), -1.0);
        assert!((Waveform::SawtoothSmoothed.eval(0.9) - 1.0).abs() < 1e-15);
        assert!((Waveform::SawtoothSmoothed.eval(0.0) + 1.0).abs() < 1e-15);
        assert!((Waveform::SawtoothSmoothed.eval(0.999_999_9) + 1.0).abs() < 1e-5);
    }
}
