//! Arithmetic in the ring Z[ζ], ζ⁴ = −1.
//!
//! ζ is a primitive 8th root of unity, so ζ² plays the role of (−1)^{1/2}
//! and ζ itself of (−1)^{1/4}.  Elements are stored on the power basis
//! 1, ζ, ζ², ζ³ with exact integer coordinates; division is handled one
//! level up, at the rational-function layer, via the adjoint and norm.

use num::{BigInt, Integer, Signed, Zero};
use num_complex::Complex64;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cyclo(pub [BigInt; 4]);

impl Default for Cyclo {
    fn default() -> Self {
        Cyclo([
            BigInt::zero(),
            BigInt::zero(),
            BigInt::zero(),
            BigInt::zero(),
        ])
    }
}

impl Cyclo {
    pub fn zero() -> Self {
        Cyclo::default()
    }

    pub fn one() -> Self {
        Cyclo::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        let mut c = Cyclo::default();
        c.0[0] = n.into();
        c
    }

    pub fn from_big(n: BigInt) -> Self {
        let mut c = Cyclo::default();
        c.0[0] = n;
        c
    }

    /// ζ^k for any integer k (ζ⁸ = 1).
    pub fn zeta_pow(k: i64) -> Self {
        let k = k.rem_euclid(8);
        let mut c = Cyclo::default();
        if k < 4 {
            c.0[k as usize] = 1.into();
        } else {
            c.0[(k - 4) as usize] = (-1).into();
        }
        c
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|r| r.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.0[1].is_zero() && self.0[2].is_zero() && self.0[3].is_zero()
    }

    /// True for ±1 and ±ζ^k: the "obvious" units whose inverse is again a
    /// power of ζ.  (Z[ζ] has further units like 1+√2; they never need
    /// special treatment here.)
    pub fn as_unit_zeta(&self) -> Option<i64> {
        let mut hit = None;
        for (i, v) in self.0.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            if hit.is_some() {
                return None;
            }
            if *v == BigInt::from(1) {
                hit = Some(i as i64);
            } else if *v == BigInt::from(-1) {
                hit = Some(i as i64 + 4);
            } else {
                return None;
            }
        }
        hit
    }

    /// Galois conjugate ζ ↦ ζ^a for odd a.
    fn conjugate(&self, a: i64) -> Cyclo {
        let mut out = Cyclo::default();
        for (i, v) in self.0.iter().enumerate() {
            if !v.is_zero() {
                let k = (a * i as i64).rem_euclid(8);
                if k < 4 {
                    out.0[k as usize] += v;
                } else {
                    out.0[(k - 4) as usize] -= v;
                }
            }
        }
        out
    }

    /// Product of the three nontrivial Galois conjugates, so that
    /// self · adjoint(self) = norm(self) ∈ Z.
    pub fn adjoint(&self) -> Cyclo {
        &(&self.conjugate(3) * &self.conjugate(5)) * &self.conjugate(7)
    }

    /// Field norm down to Q; a rational integer, positive for nonzero input.
    pub fn norm(&self) -> BigInt {
        let p = self * &self.adjoint();
        debug_assert!(
            p.0[1].is_zero() && p.0[2].is_zero() && p.0[3].is_zero(),
            "norm must be rational"
        );
        p.0[0].clone()
    }

    /// Gcd of the four coordinates (non-negative); 0 only for zero.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for v in &self.0 {
            if !v.is_zero() {
                g = g.gcd(v);
            }
        }
        g
    }

    /// Exact division by a rational integer; panics if not divisible.
    pub fn div_int(&self, d: &BigInt) -> Cyclo {
        let mut out = Cyclo::default();
        for (i, v) in self.0.iter().enumerate() {
            let (q, r) = v.div_rem(d);
            assert!(r.is_zero(), "inexact integer division in Z[zeta]");
            out.0[i] = q;
        }
        out
    }

    pub fn eval(&self) -> Complex64 {
        let zeta = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut p = Complex64::new(1.0, 0.0);
        for v in &self.0 {
            acc += p * big_to_f64(v);
            p *= zeta;
        }
        acc
    }
}

pub fn big_to_f64(n: &BigInt) -> f64 {
    num::ToPrimitive::to_f64(n).unwrap_or(f64::NAN)
}

impl Add for Cyclo {
    type Output = Cyclo;
    fn add(self, rhs: Cyclo) -> Cyclo {
        let mut out = self;
        for i in 0..4 {
            out.0[i] += &rhs.0[i];
        }
        out
    }
}

impl AddAssign<&Cyclo> for Cyclo {
    fn add_assign(&mut self, rhs: &Cyclo) {
        for i in 0..4 {
            self.0[i] += &rhs.0[i];
        }
    }
}

impl Sub for Cyclo {
    type Output = Cyclo;
    fn sub(self, rhs: Cyclo) -> Cyclo {
        let mut out = self;
        for i in 0..4 {
            out.0[i] -= &rhs.0[i];
        }
        out
    }
}

impl Neg for Cyclo {
    type Output = Cyclo;
    fn neg(self) -> Cyclo {
        let mut out = self;
        for i in 0..4 {
            out.0[i] = -std::mem::take(&mut out.0[i]);
        }
        out
    }
}

impl Mul for Cyclo {
    type Output = Cyclo;
    fn mul(self, rhs: Cyclo) -> Cyclo {
        (&self).mul(&rhs)
    }
}

impl Mul<&Cyclo> for &Cyclo {
    type Output = Cyclo;
    fn mul(self, rhs: &Cyclo) -> Cyclo {
        let mut out = Cyclo::default();
        for i in 0..4 {
            if self.0[i].is_zero() {
                continue;
            }
            for j in 0..4 {
                if rhs.0[j].is_zero() {
                    continue;
                }
                let p = &self.0[i] * &rhs.0[j];
                let k = i + j;
                if k < 4 {
                    out.0[k] += p;
                } else {
                    out.0[k - 4] -= p; // ζ⁴ = −1
                }
            }
        }
        out
    }
}

impl fmt::Debug for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, v) in self.0.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            if first {
                first = false;
                if v.is_negative() {
                    write!(f, "-")?;
                }
            } else if v.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = v.abs();
            match i {
                0 => write!(f, "{}", a)?,
                _ => {
                    if a == BigInt::from(1) {
                        write!(f, "zeta^{}", i)?;
                    } else {
                        write!(f, "{}*zeta^{}", a, i)?;
                    }
                }
            }
        }
        Ok(())
    }
}
