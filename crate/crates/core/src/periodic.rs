//! Periodic points of a hyperbolic automorphism of T².
//!
//! `Fix(Aⁿ)` is the kernel of `Aⁿ − I` acting on T². With the Smith form
//! `U (Aⁿ − I) V = diag(d1, d2)` it is exactly
//! `{ V·(i/d1, j/d2) mod 1 : 0 ≤ i < d1, 0 ≤ j < d2 }`, so `|Fix(Aⁿ)| = |det(Aⁿ − I)|`.
//! All points are exact rationals; deduplication never touches floats.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{mat_pow, require_hyperbolic, smith_normal_form, IntMatrix2};

/// Default cap on the number of points materialized by an enumeration.
pub const DEFAULT_BUDGET: u64 = 5_000_000;

/// A point of T² with reduced rational coordinates in `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalPoint2 {
    pub x: Rational64,
    pub y: Rational64,
}

impl RationalPoint2 {
    /// Reduce `(num_x / den, num_y / den)` mod 1.
    pub fn new(num_x: i64, num_y: i64, den: i64) -> Self {
        assert!(den > 0, "denominator must be positive");
        Self {
            x: Rational64::new(num_x.rem_euclid(den), den),
            y: Rational64::new(num_y.rem_euclid(den), den),
        }
    }

    pub fn origin() -> Self {
        Self::new(0, 0, 1)
    }

    pub fn to_f64(&self) -> [f64; 2] {
        let f = |r: &Rational64| *r.numer() as f64 / *r.denom() as f64;
        [f(&self.x), f(&self.y)]
    }

    /// Common-denominator form `(X, Y, D)`.
    fn common(&self) -> (i128, i128, i128) {
        let d = self.x.denom().lcm(self.y.denom());
        let sx = d / self.x.denom();
        let sy = d / self.y.denom();
        ((*self.x.numer() * sx) as i128, (*self.y.numer() * sy) as i128, d as i128)
    }

    /// `A·p mod 1`, exactly.
    pub fn apply(&self, a: &[[i64; 2]; 2]) -> RationalPoint2 {
        let (x, y, d) = self.common();
        let (nx, ny) = apply_mod(a, x, y, d);
        RationalPoint2::new(nx as i64, ny as i64, d as i64)
    }

    /// Least `k ≥ 1` with `Aᵏ p = p`, searching up to `limit` steps.
    pub fn least_period(&self, a: &[[i64; 2]; 2], limit: usize) -> Option<usize> {
        let (x0, y0, d) = self.common();
        let (mut x, mut y) = (x0, y0);
        for k in 1..=limit {
            (x, y) = apply_mod(a, x, y, d);
            if x == x0 && y == y0 {
                return Some(k);
            }
        }
        None
    }
}

#[inline]
fn apply_mod(a: &[[i64; 2]; 2], x: i128, y: i128, d: i128) -> (i128, i128) {
    (
        (a[0][0] as i128 * x + a[0][1] as i128 * y).rem_euclid(d),
        (a[1][0] as i128 * x + a[1][1] as i128 * y).rem_euclid(d),
    )
}

impl fmt::Display for RationalPoint2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A periodic point together with its least period.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PeriodicPoint {
    pub period: usize,
    pub point: RationalPoint2,
}

/// Periodic points up to a horizon, sorted by `(period, x, y)`.
#[derive(Clone, Debug)]
pub struct PeriodicPointSet {
    pub points: Vec<PeriodicPoint>,
    pub n_max: usize,
    /// True iff `points` is the complete set; otherwise only `bounds` is filled.
    pub exact: bool,
    pub bounds: CountBounds,
}

impl PeriodicPointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &RationalPoint2) -> bool {
        self.points.iter().any(|q| q.point == *p)
    }

    /// Points whose least period divides `n`, i.e. `Fix(Aⁿ)` ∩ this set.
    pub fn dividing(&self, n: usize) -> impl Iterator<Item = &PeriodicPoint> {
        self.points.iter().filter(move |p| n.is_multiple_of(p.period))
    }
}

/// `|Fix(Aⁿ)| ≤ |P(A; n)| ≤ Σ_{k≤n} |Fix(Aᵏ)|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountBounds {
    #[serde(serialize_with = "crate::linalg::serialize_big")]
    pub lower: BigInt,
    #[serde(serialize_with = "crate::linalg::serialize_big")]
    pub upper: BigInt,
}

/// `|det(Aⁿ − I)|`.
pub fn count_fixed(a: &IntMatrix2, n: u64) -> BigInt {
    assert!(n >= 1, "period must be positive");
    mat_pow(a, n).minus_identity().det().abs()
}

pub fn count_bounds(a: &IntMatrix2, n: u64) -> CountBounds {
    let lower = count_fixed(a, n);
    let upper = (1..=n).map(|k| count_fixed(a, k)).sum();
    CountBounds { lower, upper }
}

fn budget_error(needed: &BigInt, budget: u64) -> Error {
    Error::BudgetExceeded { needed: needed.to_string(), budget }
}

/// Points of `Fix(Aⁿ)` in Smith-form order (row-major over `(i, j)`).
fn fixed_point_list(a: &IntMatrix2, n: u64, budget: u64) -> Result<Vec<RationalPoint2>> {
    let count = count_fixed(a, n);
    if count > BigInt::from(budget) {
        return Err(budget_error(&count, budget));
    }
    let snf = smith_normal_form(&mat_pow(a, n).minus_identity())?;
    let small = |x: &BigInt| x.to_i64().ok_or_else(|| Error::Overflow(x.to_string()));
    let d1 = small(&snf.d1)?;
    let d2 = small(&snf.d2)?;
    let e = (d2 / d1) as i128;
    let reduce = |x: &BigInt| -> Result<i128> { Ok(small(&x.mod_floor(&BigInt::from(d2)))? as i128) };
    let (v00, v01, v10, v11) = (reduce(&snf.v.a)?, reduce(&snf.v.b)?, reduce(&snf.v.c)?, reduce(&snf.v.d)?);
    let d = d2 as i128;

    let mut out = Vec::with_capacity((d1 * d2) as usize);
    for i in 0..d1 as i128 {
        for j in 0..d as i128 {
            let x = (v00 * i * e + v01 * j).rem_euclid(d);
            let y = (v10 * i * e + v11 * j).rem_euclid(d);
            out.push(RationalPoint2::new(x as i64, y as i64, d2));
        }
    }
    Ok(out)
}

/// `Fix(Aⁿ)` with least periods attached.
pub fn fixed_points(a: &IntMatrix2, n: u64, budget: u64) -> Result<PeriodicPointSet> {
    require_hyperbolic(a)?;
    let am = a.to_i64()?;
    let mut points: Vec<PeriodicPoint> = fixed_point_list(a, n, budget)?
        .into_iter()
        .map(|p| {
            let period = p.least_period(&am, n as usize).expect("Smith-form point is fixed by A^n");
            PeriodicPoint { period, point: p }
        })
        .collect();
    points.sort();
    Ok(PeriodicPointSet { points, n_max: n as usize, exact: true, bounds: count_bounds(a, n) })
}

/// Incremental union `Fix(A) ∪ Fix(A²) ∪ …`, one period at a time.
pub struct PeriodicPointEnumerator {
    a: IntMatrix2,
    a_small: [[i64; 2]; 2],
    seen: HashMap<RationalPoint2, usize>,
    horizon: usize,
    budget: u64,
    /// Σ_{k ≤ horizon} |Fix(Aᵏ)|, the work done so far.
    generated: u64,
}

impl PeriodicPointEnumerator {
    pub fn new(a: &IntMatrix2, budget: u64) -> Result<Self> {
        require_hyperbolic(a)?;
        Ok(Self { a: a.clone(), a_small: a.to_i64()?, seen: HashMap::new(), horizon: 0, budget, generated: 0 })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.seen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seen.is_empty()
    }

    /// Add `Fix(A^{horizon+1})`. Fails without changing state if the
    /// cumulative work would exceed the budget.
    pub fn advance(&mut self) -> Result<usize> {
        let k = self.horizon + 1;
        let count = count_fixed(&self.a, k as u64);
        let total = count.clone() + self.generated;
        if total > BigInt::from(self.budget) {
            return Err(budget_error(&total, self.budget));
        }
        for p in fixed_point_list(&self.a, k as u64, self.budget)? {
            if !self.seen.contains_key(&p) {
                let period = p.least_period(&self.a_small, k).expect("Smith-form point is fixed by A^k");
                self.seen.insert(p, period);
            }
        }
        self.generated = total.to_u64().expect("bounded by budget");
        self.horizon = k;
        Ok(self.seen.len())
    }

    pub fn into_set(self) -> PeriodicPointSet {
        let mut points: Vec<PeriodicPoint> =
            self.seen.into_iter().map(|(point, period)| PeriodicPoint { period, point }).collect();
        points.sort();
        let n = self.horizon.max(1) as u64;
        PeriodicPointSet { points, n_max: self.horizon, exact: true, bounds: count_bounds(&self.a, n) }
    }
}

/// `P(A; n) = ∪_{k≤n} Fix(Aᵏ)`, or only its bounds when the union-bound
/// work exceeds `budget`.
pub fn periodic_points_up_to(a: &IntMatrix2, n: u64, budget: u64) -> Result<PeriodicPointSet> {
    require_hyperbolic(a)?;
    assert!(n >= 1, "horizon must be positive");
    let bounds = count_bounds(a, n);
    if bounds.upper > BigInt::from(budget) {
        return Ok(PeriodicPointSet { points: Vec::new(), n_max: n as usize, exact: false, bounds });
    }
    let mut en = PeriodicPointEnumerator::new(a, budget)?;
    for _ in 0..n {
        en.advance()?;
    }
    Ok(en.into_set())
}

/// Exact `|P(A; n)|` for `n = 1..=n_max` while within budget.
pub fn union_counts(a: &IntMatrix2, n_max: u64, budget: u64) -> Result<Vec<Option<u64>>> {
    let mut en = PeriodicPointEnumerator::new(a, budget)?;
    let mut out = Vec::with_capacity(n_max as usize);
    let mut stopped = false;
    for _ in 0..n_max {
        if !stopped {
            match en.advance() {
                Ok(c) => {
                    out.push(Some(c as u64));
                    continue;
                }
                Err(Error::BudgetExceeded { .. }) => stopped = true,
                Err(e) => return Err(e),
            }
        }
        out.push(None);
    }
    Ok(out)
}

/// True iff `Aᵏ p ≡ p` exactly.
pub fn is_fixed_by_power(a: &IntMatrix2, k: u64, p: &RationalPoint2) -> bool {
    let (x, y, d) = p.common();
    let m = mat_pow(a, k);
    let big = |v: i128| BigInt::from(v);
    let [nx, ny] = m.apply(&[big(x), big(y)]);
    let d = big(d);
    (nx - big(x)).mod_floor(&d).is_zero() && (ny - big(y)).mod_floor(&d).is_zero()
}
