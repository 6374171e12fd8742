//! Sparse formal Laurent series in up to three formal variables with
//! quarter-integer exponents, over any coefficient type that supports
//! addition and scalar multiplication.
//!
//! Exponents are stored in quarter units, so z^{1/2} has stored exponent 2
//! and the fractional powers produced by monomial prefactors like
//! (-q^4 z)^{∂/4} stay exact integers.  Each series carries a per-variable
//! truncation window; multiplication drops terms outside it, and the
//! operator pipelines choose windows from homogeneity bookkeeping so that
//! every coefficient inside the window is exact.

use crate::scalars::Scalar;
use std::collections::BTreeMap;
use thiserror::Error;

pub const VAR_Z: usize = 0;
pub const VAR_W: usize = 1;
pub const VAR_W2: usize = 2;
pub const NVARS: usize = 3;

/// Exponent tuple in quarter units.
pub type Expo = [i64; NVARS];

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("residue in variable {var}: exponent {found} is not an integer power, lattice mismatch")]
    ResidueLattice { var: usize, found: i64 },
}

/// Per-variable inclusive truncation window, in quarter units.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub min: Expo,
    pub max: Expo,
}

impl Window {
    /// Window unbounded for practical purposes in every variable.
    pub fn all() -> Window {
        Window {
            min: [i64::MIN / 4; NVARS],
            max: [i64::MAX / 4; NVARS],
        }
    }

    /// Restrict one variable to [lo, hi] quarter units.
    pub fn clamp(mut self, var: usize, lo: i64, hi: i64) -> Window {
        self.min[var] = lo;
        self.max[var] = hi;
        self
    }

    pub fn contains(&self, e: &Expo) -> bool {
        (0..NVARS).all(|i| self.min[i] <= e[i] && e[i] <= self.max[i])
    }

    fn intersect(&self, other: &Window) -> Window {
        let mut w = *self;
        for i in 0..NVARS {
            w.min[i] = w.min[i].max(other.min[i]);
            w.max[i] = w.max[i].min(other.max[i]);
        }
        w
    }
}

/// Coefficient requirements for series arithmetic.
pub trait Coeff: Clone {
    fn czero() -> Self;
    fn cis_zero(&self) -> bool;
    fn cadd_assign(&mut self, other: &Self);
    fn cmul_scalar(&self, s: &Scalar) -> Self;
}

impl Coeff for Scalar {
    fn czero() -> Self {
        Scalar::zero()
    }
    fn cis_zero(&self) -> bool {
        self.is_zero()
    }
    fn cadd_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn cmul_scalar(&self, s: &Scalar) -> Self {
        self * s
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series<T: Coeff> {
    pub terms: BTreeMap<Expo, T>,
    pub window: Window,
}

impl<T: Coeff> Series<T> {
    pub fn new(window: Window) -> Series<T> {
        Series {
            terms: BTreeMap::new(),
            window,
        }
    }

    pub fn monomial(window: Window, e: Expo, c: T) -> Series<T> {
        let mut s = Series::new(window);
        s.insert_add(e, c);
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Add c at exponent e; terms outside the window are the truncation and
    /// are dropped.
    pub fn insert_add(&mut self, e: Expo, c: T) {
        if c.cis_zero() || !self.window.contains(&e) {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                o.get_mut().cadd_assign(&c);
                if o.get().cis_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, rhs: &Series<T>) -> Series<T> {
        let mut out = Series::new(self.window.intersect(&rhs.window));
        for (e, c) in self.terms.iter().chain(rhs.terms.iter()) {
            out.insert_add(*e, c.clone());
        }
        out
    }

    pub fn scale(&self, s: &Scalar) -> Series<T> {
        let mut out = Series::new(self.window);
        for (e, c) in &self.terms {
            out.insert_add(*e, c.cmul_scalar(s));
        }
        out
    }

    /// Multiply by a series with plain Scalar coefficients.
    pub fn mul_scalar_series(&self, rhs: &Series<Scalar>) -> Series<T> {
        let mut out = Series::new(self.window.intersect(&rhs.window));
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let mut e = *ea;
                for i in 0..NVARS {
                    e[i] += eb[i];
                }
                out.insert_add(e, ca.cmul_scalar(cb));
            }
        }
        out
    }

    /// Shift all exponents by e0.
    pub fn shift(&self, e0: Expo) -> Series<T> {
        let mut out = Series::new(self.window);
        for (e, c) in &self.terms {
            let mut f = *e;
            for i in 0..NVARS {
                f[i] += e0[i];
            }
            out.insert_add(f, c.clone());
        }
        out
    }

    /// Coefficient of var^{−1}: picks terms with quarter-exponent −4 in var
    /// and erases that variable.  Any term with a fractional exponent of var
    /// signals broken phase/weight bookkeeping upstream.
    pub fn residue(&self, var: usize) -> Result<Series<T>, SeriesError> {
        for e in self.terms.keys() {
            if e[var].rem_euclid(4) != 0 {
                return Err(SeriesError::ResidueLattice {
                    var,
                    found: e[var],
                });
            }
        }
        let mut w = self.window;
        w.min[var] = 0;
        w.max[var] = 0;
        let mut out = Series::new(w);
        for (e, c) in &self.terms {
            if e[var] == -4 {
                let mut f = *e;
                f[var] = 0;
                out.insert_add(f, c.clone());
            }
        }
        Ok(out)
    }

    /// Coefficient at an exact exponent tuple.
    pub fn coeff(&self, e: &Expo) -> T {
        self.terms.get(e).cloned().unwrap_or_else(T::czero)
    }

    /// Coefficient of var^{k/4} viewed as a series in the other variables.
    pub fn coeff_var(&self, var: usize, quarter: i64) -> Series<T> {
        let mut w = self.window;
        w.min[var] = 0;
        w.max[var] = 0;
        let mut out = Series::new(w);
        for (e, c) in &self.terms {
            if e[var] == quarter {
                let mut f = *e;
                f[var] = 0;
                out.insert_add(f, c.clone());
            }
        }
        out
    }
}

impl Series<Scalar> {
    pub fn one(window: Window) -> Series<Scalar> {
        Series::monomial(window, [0; NVARS], Scalar::one())
    }

    pub fn mul(&self, rhs: &Series<Scalar>) -> Series<Scalar> {
        self.mul_scalar_series(rhs)
    }
}

/// Side of the contour a pole ratio lies on, fixing the geometric-series
/// direction of 1/(1 − ratio).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    /// |ratio| < 1: expand in nonnegative powers of the ratio.
    Small,
}

/// Geometric expansion of 1/(1 − c · num_var/den_var) in the region where
/// the ratio is small, to order N in the ratio.
///
/// A pole at w = c·z enclosed by the w-contour corresponds to the factor
/// 1/(1 − c z/w) expanded for |z/w| small (num_var = z); a pole left outside
/// corresponds to 1/(1 − w/(c z)) expanded for |w/z| small.
pub fn expand_rational_factor(
    window: Window,
    c: &Scalar,
    num_var: usize,
    den_var: usize,
    n: u32,
) -> Series<Scalar> {
    let mut out = Series::new(window);
    let mut acc = Scalar::one();
    for k in 0..=n as i64 {
        let mut e = [0i64; NVARS];
        e[num_var] += 4 * k;
        e[den_var] -= 4 * k;
        out.insert_add(e, acc.clone());
        acc = &acc * c;
    }
    out
}

/// Geometric expansion of 1/(1 − c · num_var²/(den1·den2)) style ratios with
/// an arbitrary quarter-unit exponent step per variable, to order N.
pub fn expand_geometric(window: Window, c: &Scalar, step: Expo, n: u32) -> Series<Scalar> {
    let mut out = Series::new(window);
    let mut acc = Scalar::one();
    for k in 0..=n as i64 {
        let e = [step[0] * k, step[1] * k, step[2] * k];
        out.insert_add(e, acc.clone());
        acc = &acc * c;
    }
    out
}

/// Expansion of the infinite product ratio (a·x; q^4)_∞ / (b·x; q^4)_∞ where
/// x is the monomial step·(variables), to order N in x.
pub fn expand_poch_ratio_series(
    window: Window,
    a: &Scalar,
    b: &Scalar,
    step: Expo,
    n: u32,
) -> Series<Scalar> {
    let exp = crate::scalars::expand_poch_ratio(a, b, n);
    let mut out = Series::new(window);
    for k in 0..=n as i64 {
        let e = [step[0] * k, step[1] * k, step[2] * k];
        out.insert_add(e, exp.coeff(k as usize).clone());
    }
    out
}
