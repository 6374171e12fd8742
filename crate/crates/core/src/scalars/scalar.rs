//! The exact coefficient field: rational functions in q over Q(ζ), ζ⁴ = −1.
//!
//! q is a free transcendental, so every verified identity holds identically
//! in q rather than at sampled values.  Internally the variable is
//! s = q^{1/2}; the global branch choice is (−1)^{1/2} := ζ² and
//! (−1)^{1/4} := ζ.

use super::cyclo::{big_to_f64, Cyclo};
use super::poly::Poly;
use num::{BigInt, Integer, One, Signed};
use num_complex::Complex64;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub};

/// Exact element num / (scl · den) with Z[ζ]-integral num and den.
///
/// Canonical form, so equality is plain structural comparison: den is the
/// unique primitive associate with rational positive leading coefficient,
/// gcd(num, den) is trivial, scl is a positive integer coprime to the
/// integer content of num, and zero is 0/(1·1).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Scalar {
    num: Poly,
    den: Poly,
    scl: BigInt,
}

impl Scalar {
    pub fn new(num: Poly, den: Poly) -> Scalar {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Scalar::zero();
        }
        let v = num.valuation().min(den.valuation());
        let (mut num, mut den) = if v > 0 {
            (num.unshift(v), den.unshift(v))
        } else {
            (num, den)
        };
        if !den.is_monomial() && !num.is_monomial() {
            let g = num.gcd(&den);
            if !g.is_one() {
                num = num.div_exact(&g);
                den = den.div_exact(&g);
            }
        }
        Scalar::from_coprime(num, den, BigInt::one())
    }

    /// Restore canonical form for a fraction whose polynomial parts are
    /// already coprime: normalize the denominator's associate class (folding
    /// the compensating unit or adjoint into the numerator) and cancel the
    /// integer content against the scale.
    fn from_coprime(mut num: Poly, mut den: Poly, mut scl: BigInt) -> Scalar {
        if num.is_zero() {
            return Scalar::zero();
        }
        debug_assert!(!den.is_zero() && scl.is_positive());
        if !den.is_one() {
            let lc = den.leading().clone();
            match lc.as_unit_zeta() {
                Some(0) => {}
                Some(k) => {
                    let u = Cyclo::zeta_pow(-k);
                    num = num.scale(&u);
                    den = den.scale(&u);
                }
                None => {
                    let adj = lc.adjoint();
                    num = num.scale(&adj);
                    den = den.scale(&adj);
                }
            }
            let c = den.content();
            if !c.is_one() {
                den = den.div_int(&c);
                scl *= c;
            }
        }
        if !scl.is_one() {
            let g = num.content().gcd(&scl);
            if !g.is_one() {
                num = num.div_int(&g);
                scl /= g;
            }
        }
        Scalar { num, den, scl }
    }

    pub fn zero() -> Scalar {
        Scalar {
            num: Poly::zero(),
            den: Poly::one(),
            scl: BigInt::one(),
        }
    }

    pub fn one() -> Scalar {
        Scalar {
            num: Poly::one(),
            den: Poly::one(),
            scl: BigInt::one(),
        }
    }

    pub fn from_int(n: i64) -> Scalar {
        Scalar {
            num: Poly::constant(Cyclo::from_int(n)),
            den: Poly::one(),
            scl: BigInt::one(),
        }
    }

    pub fn from_rational(num: i64, den: i64) -> Scalar {
        assert!(den != 0, "zero denominator");
        let sign = if den < 0 { -1 } else { 1 };
        Scalar::from_coprime(
            Poly::constant(Cyclo::from_int(sign * num)),
            Poly::one(),
            BigInt::from(den.unsigned_abs()),
        )
    }

    pub fn from_cyclo(c: Cyclo) -> Scalar {
        Scalar {
            num: Poly::constant(c),
            den: Poly::one(),
            scl: BigInt::one(),
        }
    }

    /// q^n for integer n of either sign.
    pub fn q_pow(n: i64) -> Scalar {
        Scalar::s_pow(2 * n)
    }

    /// q^{k/2} for integer k of either sign (s = q^{1/2}).
    pub fn s_pow(k: i64) -> Scalar {
        if k >= 0 {
            Scalar {
                num: Poly::monomial(Cyclo::one(), k as usize),
                den: Poly::one(),
                scl: BigInt::one(),
            }
        } else {
            Scalar {
                num: Poly::one(),
                den: Poly::monomial(Cyclo::one(), (-k) as usize),
                scl: BigInt::one(),
            }
        }
    }

    /// ζ^k.
    pub fn zeta_pow(k: i64) -> Scalar {
        Scalar::from_cyclo(Cyclo::zeta_pow(k))
    }

    /// The monomial (−1)^{j/4} q^{a·j/2} = ζ^j s^{a·j}, used when resolving
    /// operator-valued exponents like (−q^4 z)^{∂/4} on a weight block.
    pub fn phase_mono(zeta_exp: i64, s_exp: i64) -> Scalar {
        Scalar::zeta_pow(zeta_exp) * Scalar::s_pow(s_exp)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one() && self.scl.is_one()
    }

    pub fn inv(&self) -> Scalar {
        assert!(!self.is_zero(), "inverting zero");
        Scalar::from_coprime(
            self.den.mul_int(&self.scl),
            self.num.clone(),
            BigInt::one(),
        )
    }

    pub fn pow(&self, n: i64) -> Scalar {
        if n < 0 {
            return self.inv().pow(-n);
        }
        let mut acc = Scalar::one();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Order of vanishing at s = 0 (valuation in s = q^{1/2}); `None` for the
    /// zero scalar.  Negative values indicate a pole at s = 0.
    pub fn s_valuation(&self) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        Some(self.num.valuation() as i64 - self.den.valuation() as i64)
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    /// The polynomial part of the denominator; the full denominator is
    /// `denom_scale` times this.
    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn denom_scale(&self) -> &BigInt {
        &self.scl
    }

    /// Evaluate at a numeric q > 0 with ζ = e^{iπ/4}.
    pub fn eval(&self, q: f64) -> Complex64 {
        let s = Complex64::new(q.sqrt(), 0.0);
        self.num.eval(s) / (self.den.eval(s) * big_to_f64(&self.scl))
    }

    /// Canonical integer-coefficient (numerator, denominator) strings.
    pub fn canonical_strings(&self) -> (String, String) {
        (
            format!("{}", self.num),
            format!("{}", self.den.mul_int(&self.scl)),
        )
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den && self.scl == rhs.scl {
            let t = self.num.add(&rhs.num);
            if t.is_zero() {
                return Scalar::zero();
            }
            let g = t.gcd(&self.den);
            return Scalar::from_coprime(
                t.div_exact(&g),
                self.den.div_exact(&g),
                self.scl.clone(),
            );
        }
        // Knuth's fraction addition: cancel gcds before forming products so
        // the expensive polynomial gcd only ever sees the small cofactors.
        let s0 = self.scl.gcd(&rhs.scl);
        let ra = self.scl.clone() / &s0;
        let rb = rhs.scl.clone() / &s0;
        let g0 = self.den.gcd(&rhs.den);
        if g0.is_one() {
            let t = self
                .num
                .mul(&rhs.den)
                .mul_int(&rb)
                .add(&rhs.num.mul(&self.den).mul_int(&ra));
            if t.is_zero() {
                return Scalar::zero();
            }
            return Scalar::from_coprime(t, self.den.mul(&rhs.den), s0 * ra * rb);
        }
        let b1 = self.den.div_exact(&g0);
        let d1 = rhs.den.div_exact(&g0);
        let t = self
            .num
            .mul(&d1)
            .mul_int(&rb)
            .add(&rhs.num.mul(&b1).mul_int(&ra));
        if t.is_zero() {
            return Scalar::zero();
        }
        let g1 = t.gcd(&g0);
        Scalar::from_coprime(
            t.div_exact(&g1),
            b1.mul(&rhs.den.div_exact(&g1)),
            s0 * ra * rb,
        )
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs.clone())
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            num: self.num.neg(),
            den: self.den,
            scl: self.scl,
        }
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() || rhs.is_zero() {
            return Scalar::zero();
        }
        // Cross-cancel before multiplying; canonical inputs leave only the
        // integer content for from_coprime to settle.
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        Scalar::from_coprime(
            self.num.div_exact(&g1).mul(&rhs.num.div_exact(&g2)),
            self.den.div_exact(&g2).mul(&rhs.den.div_exact(&g1)),
            self.scl.clone() * &rhs.scl,
        )
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        &self * &rhs.inv()
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() && self.scl.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den.mul_int(&self.scl))
        }
    }
}
