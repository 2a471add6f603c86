//! Exact 2×2 integer and rational matrix algebra.
//!
//! Entries are arbitrary-precision: |det(Aⁿ − I)| grows like λ_uⁿ and the
//! periodic-point counts built on it must be exact. Floating point only
//! appears in [`HyperbolicSplitting`], which the function-space solvers use.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Row-major 2×2 integer matrix `[[a, b], [c, d]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix2 {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl IntMatrix2 {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>, d: impl Into<BigInt>) -> Self {
        Self { a: a.into(), b: b.into(), c: c.into(), d: d.into() }
    }

    pub fn from_rows(rows: [[i64; 2]; 2]) -> Self {
        Self::new(rows[0][0], rows[0][1], rows[1][0], rows[1][1])
    }

    pub fn identity() -> Self {
        Self::new(1, 0, 0, 1)
    }

    /// The Arnold cat map `[[2, 1], [1, 1]]`.
    pub fn cat_map() -> Self {
        Self::from_rows([[2, 1], [1, 1]])
    }

    pub fn det(&self) -> BigInt {
        det2(self)
    }

    pub fn trace(&self) -> BigInt {
        &self.a + &self.d
    }

    pub fn minus_identity(&self) -> Self {
        Self::new(&self.a - 1, self.b.clone(), self.c.clone(), &self.d - 1)
    }

    /// `I - self`.
    pub fn identity_minus(&self) -> Self {
        Self::new(1 - &self.a, -&self.b, -&self.c, 1 - &self.d)
    }

    pub fn apply(&self, v: &[BigInt; 2]) -> [BigInt; 2] {
        [&self.a * &v[0] + &self.b * &v[1], &self.c * &v[0] + &self.d * &v[1]]
    }

    /// Entries as `f64`, row-major.
    pub fn to_f64(&self) -> [[f64; 2]; 2] {
        let f = |x: &BigInt| x.to_f64().unwrap_or(f64::NAN);
        [[f(&self.a), f(&self.b)], [f(&self.c), f(&self.d)]]
    }

    /// Entries as `i64`, row-major, if they all fit.
    pub fn to_i64(&self) -> Result<[[i64; 2]; 2]> {
        let f = |x: &BigInt| x.to_i64().ok_or_else(|| Error::Overflow(x.to_string()));
        Ok([[f(&self.a)?, f(&self.b)?], [f(&self.c)?, f(&self.d)?]])
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> BigInt {
        let r0 = self.a.abs() + self.b.abs();
        let r1 = self.c.abs() + self.d.abs();
        r0.max(r1)
    }
}

impl Mul for &IntMatrix2 {
    type Output = IntMatrix2;

    fn mul(self, o: &IntMatrix2) -> IntMatrix2 {
        IntMatrix2::new(
            &self.a * &o.a + &self.b * &o.c,
            &self.a * &o.b + &self.b * &o.d,
            &self.c * &o.a + &self.d * &o.c,
            &self.c * &o.b + &self.d * &o.d,
        )
    }
}

impl fmt::Display for IntMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// Exact rational 2-vector; `BigRational` keeps every entry reduced with a
/// positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatVec2(pub [BigRational; 2]);

impl RatVec2 {
    pub fn from_ints(x: i64, y: i64) -> Self {
        Self([BigRational::from_integer(x.into()), BigRational::from_integer(y.into())])
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        let k = BigRational::from_integer(k.clone());
        Self([&self.0[0] * &k, &self.0[1] * &k])
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|x| x.is_integer())
    }

    /// Least common multiple of the (reduced) denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.0[0].denom().lcm(self.0[1].denom())
    }

    pub fn to_f64(&self) -> [f64; 2] {
        [self.0[0].to_f64().unwrap_or(f64::NAN), self.0[1].to_f64().unwrap_or(f64::NAN)]
    }
}

/// Exact rational 2×2 matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatMatrix2(pub [[BigRational; 2]; 2]);

impl RatMatrix2 {
    pub fn identity() -> Self {
        let one = BigRational::one;
        let zero = BigRational::zero;
        Self([[one(), zero()], [zero(), one()]])
    }

    pub fn apply(&self, v: &RatVec2) -> RatVec2 {
        let m = &self.0;
        RatVec2([
            &m[0][0] * &v.0[0] + &m[0][1] * &v.0[1],
            &m[1][0] * &v.0[0] + &m[1][1] * &v.0[1],
        ])
    }

    pub fn apply_int(&self, v: [i64; 2]) -> RatVec2 {
        self.apply(&RatVec2::from_ints(v[0], v[1]))
    }

    pub fn to_f64(&self) -> [[f64; 2]; 2] {
        let f = |x: &BigRational| x.to_f64().unwrap_or(f64::NAN);
        let m = &self.0;
        [[f(&m[0][0]), f(&m[0][1])], [f(&m[1][0]), f(&m[1][1])]]
    }

    pub fn mul_int(&self, m: &IntMatrix2) -> RatMatrix2 {
        let r = |x: &BigInt| BigRational::from_integer(x.clone());
        let s = &self.0;
        let (a, b, c, d) = (r(&m.a), r(&m.b), r(&m.c), r(&m.d));
        RatMatrix2([
            [&s[0][0] * &a + &s[0][1] * &c, &s[0][0] * &b + &s[0][1] * &d],
            [&s[1][0] * &a + &s[1][1] * &c, &s[1][0] * &b + &s[1][1] * &d],
        ])
    }
}

impl fmt::Display for RatMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.0;
        write!(f, "[[{}, {}], [{}, {}]]", m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

/// Outcome of [`classify_hyperbolic`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hyperbolicity {
    Hyperbolic,
    NotHyperbolic,
    NotUnimodular,
}

impl fmt::Display for Hyperbolicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Hyperbolicity::Hyperbolic => "hyperbolic",
            Hyperbolicity::NotHyperbolic => "not hyperbolic",
            Hyperbolicity::NotUnimodular => "not unimodular",
        })
    }
}

pub fn det2(m: &IntMatrix2) -> BigInt {
    &m.a * &m.d - &m.b * &m.c
}

/// Exact hyperbolicity test for a candidate GL(2, ℤ) matrix.
///
/// det = +1: hyperbolic iff |tr| > 2. det = −1: hyperbolic iff tr ≠ 0.
pub fn classify_hyperbolic(m: &IntMatrix2) -> Hyperbolicity {
    let det = m.det();
    let tr = m.trace();
    if det.is_one() {
        if tr.abs() > BigInt::from(2) {
            Hyperbolicity::Hyperbolic
        } else {
            Hyperbolicity::NotHyperbolic
        }
    } else if det == -BigInt::one() {
        if tr.is_zero() {
            Hyperbolicity::NotHyperbolic
        } else {
            Hyperbolicity::Hyperbolic
        }
    } else {
        Hyperbolicity::NotUnimodular
    }
}

pub(crate) fn require_hyperbolic(m: &IntMatrix2) -> Result<()> {
    match classify_hyperbolic(m) {
        Hyperbolicity::Hyperbolic => Ok(()),
        other => Err(Error::NotHyperbolic(format!("{m} is {other}"))),
    }
}

/// Exact inverse over ℚ via adjugate / determinant.
pub fn rational_inverse(m: &IntMatrix2) -> Result<RatMatrix2> {
    let det = m.det();
    if det.is_zero() {
        return Err(Error::SingularMatrix);
    }
    let q = |x: BigInt| BigRational::new(x, det.clone());
    Ok(RatMatrix2([
        [q(m.d.clone()), q(-&m.b)],
        [q(-&m.c), q(m.a.clone())],
    ]))
}

/// `Aⁿ` by binary exponentiation; `n = 0` gives the identity.
pub fn mat_pow(m: &IntMatrix2, mut n: u64) -> IntMatrix2 {
    let mut result = IntMatrix2::identity();
    let mut base = m.clone();
    while n > 0 {
        if n & 1 == 1 {
            result = &result * &base;
        }
        n >>= 1;
        if n > 0 {
            base = &base * &base;
        }
    }
    result
}

/// `U·M·V = diag(d1, d2)` with `U`, `V` unimodular, `0 < d1 | d2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub u: IntMatrix2,
    pub v: IntMatrix2,
    pub d1: BigInt,
    pub d2: BigInt,
}

/// Working state: the matrix being reduced plus the row (`u`) and column
/// (`v`) transforms applied so far.
struct SnfState {
    m: [[BigInt; 2]; 2],
    u: [[BigInt; 2]; 2],
    v: [[BigInt; 2]; 2],
}

impl SnfState {
    fn swap_rows(&mut self) {
        self.m.swap(0, 1);
        self.u.swap(0, 1);
    }

    fn swap_cols(&mut self) {
        for row in self.m.iter_mut().chain(self.v.iter_mut()) {
            row.swap(0, 1);
        }
    }

    /// row[dst] -= q * row[src]
    fn row_axpy(&mut self, dst: usize, src: usize, q: &BigInt) {
        for mat in [&mut self.m, &mut self.u] {
            for j in 0..2 {
                let t = q * &mat[src][j];
                mat[dst][j] -= t;
            }
        }
    }

    /// col[dst] -= q * col[src]
    fn col_axpy(&mut self, dst: usize, src: usize, q: &BigInt) {
        for mat in [&mut self.m, &mut self.v] {
            for row in mat.iter_mut() {
                let t = q * &row[src];
                row[dst] -= t;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for mat in [&mut self.m, &mut self.u] {
            for x in mat[i].iter_mut() {
                *x = -&*x;
            }
        }
    }
}

/// Smith normal form by gcd row/column reduction.
///
/// The pivot is the nonzero entry of least absolute value, ties broken in
/// row-major order, so the transforms are deterministic.
pub fn smith_normal_form(m: &IntMatrix2) -> Result<SmithForm> {
    if m.det().is_zero() {
        return Err(Error::SingularMatrix);
    }
    let one = BigInt::one;
    let zero = BigInt::zero;
    let mut st = SnfState {
        m: [[m.a.clone(), m.b.clone()], [m.c.clone(), m.d.clone()]],
        u: [[one(), zero()], [zero(), one()]],
        v: [[one(), zero()], [zero(), one()]],
    };

    loop {
        // Move the minimal nonzero entry to (0, 0).
        let mut pivot = (0, 0);
        let mut best: Option<BigInt> = None;
        for i in 0..2 {
            for j in 0..2 {
                let x = st.m[i][j].abs();
                if !x.is_zero() && best.as_ref().is_none_or(|b| x < *b) {
                    best = Some(x);
                    pivot = (i, j);
                }
            }
        }
        if pivot.0 == 1 {
            st.swap_rows();
        }
        if pivot.1 == 1 {
            st.swap_cols();
        }

        let p = st.m[0][0].clone();
        let q_row = st.m[1][0].div_floor(&p);
        st.row_axpy(1, 0, &q_row);
        let q_col = st.m[0][1].div_floor(&p);
        st.col_axpy(1, 0, &q_col);
        if !st.m[1][0].is_zero() || !st.m[0][1].is_zero() {
            continue;
        }
        // Diagonal now; enforce d1 | d2 by folding row 1 into row 0.
        if !st.m[1][1].is_multiple_of(&st.m[0][0]) {
            st.row_axpy(0, 1, &-one());
            continue;
        }
        break;
    }

    if st.m[0][0].is_negative() {
        st.negate_row(0);
    }
    if st.m[1][1].is_negative() {
        st.negate_row(1);
    }
    let [[u00, u01], [u10, u11]] = st.u;
    let [[v00, v01], [v10, v11]] = st.v;
    let [[d1, _], [_, d2]] = st.m;
    Ok(SmithForm {
        u: IntMatrix2::new(u00, u01, u10, u11),
        v: IntMatrix2::new(v00, v01, v10, v11),
        d1,
        d2,
    })
}

/// Real eigen-data of a hyperbolic A: eigenvalues, unit eigenvectors and the
/// spectral projections onto E^u along E^s and vice versa.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperbolicSplitting {
    pub lambda_u: f64,
    pub lambda_s: f64,
    pub v_u: [f64; 2],
    pub v_s: [f64; 2],
    pub p_u: [[f64; 2]; 2],
    pub p_s: [[f64; 2]; 2],
}

impl HyperbolicSplitting {
    /// Contraction ratio of both geometric series: max(|λ_s|, 1/|λ_u|).
    pub fn rho(&self) -> f64 {
        self.lambda_s.abs().max(1.0 / self.lambda_u.abs())
    }

    pub fn project_u(&self, x: [f64; 2]) -> [f64; 2] {
        mat_vec(&self.p_u, x)
    }

    pub fn project_s(&self, x: [f64; 2]) -> [f64; 2] {
        mat_vec(&self.p_s, x)
    }
}

pub(crate) fn mat_vec(m: &[[f64; 2]; 2], x: [f64; 2]) -> [f64; 2] {
    [m[0][0] * x[0] + m[0][1] * x[1], m[1][0] * x[0] + m[1][1] * x[1]]
}

pub(crate) fn norm_inf_f64(m: &[[f64; 2]; 2]) -> f64 {
    (m[0][0].abs() + m[0][1].abs()).max(m[1][0].abs() + m[1][1].abs())
}

fn eigenvector(a: &[[f64; 2]; 2], lambda: f64) -> [f64; 2] {
    // Null vector of (A − λI): take whichever row gives the larger candidate.
    let c1 = [a[0][1], lambda - a[0][0]];
    let c2 = [lambda - a[1][1], a[1][0]];
    let n1 = c1[0].hypot(c1[1]);
    let n2 = c2[0].hypot(c2[1]);
    let (v, n) = if n1 >= n2 { (c1, n1) } else { (c2, n2) };
    let mut v = [v[0] / n, v[1] / n];
    if v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0) {
        v = [-v[0], -v[1]];
    }
    v
}

pub fn eigen_split(m: &IntMatrix2) -> Result<HyperbolicSplitting> {
    require_hyperbolic(m)?;
    let a = m.to_f64();
    let tr = a[0][0] + a[1][1];
    let det = m.det().to_f64().unwrap_or(f64::NAN);
    // Hyperbolicity keeps the discriminant >= 5.
    let sq = (tr * tr - 4.0 * det).sqrt();
    let lambda_u = if tr >= 0.0 { (tr + sq) / 2.0 } else { (tr - sq) / 2.0 };
    let lambda_s = det / lambda_u;
    let gap = lambda_u - lambda_s;
    let p_u = [
        [(a[0][0] - lambda_s) / gap, a[0][1] / gap],
        [a[1][0] / gap, (a[1][1] - lambda_s) / gap],
    ];
    let p_s = [
        [1.0 - p_u[0][0], -p_u[0][1]],
        [-p_u[1][0], 1.0 - p_u[1][1]],
    ];
    Ok(HyperbolicSplitting {
        lambda_u,
        lambda_s,
        v_u: eigenvector(&a, lambda_u),
        v_s: eigenvector(&a, lambda_s),
        p_u,
        p_s,
    })
}

pub(crate) fn serialize_big<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}
