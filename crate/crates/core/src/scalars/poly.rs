//! Dense univariate polynomials over Z[ζ], used as numerators and
//! denominators of [`Scalar`](super::Scalar).
//!
//! The variable is s = q^{1/2}; half-integer powers of q appearing in the
//! operator prefactors become integer powers of s.  Z[ζ] is a principal
//! ideal domain, so Gauss's lemma applies: a primitive polynomial divides
//! an integral one over the field iff it divides it over the ring, and the
//! quotient is again integral.  That keeps every routine here fraction-free.

use super::cyclo::Cyclo;
use num::{BigInt, Integer, One, Zero};
use num_complex::Complex64;
use std::fmt;

/// Coefficients in ascending degree, no trailing zeros.  Empty = 0.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Poly(pub Vec<Cyclo>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn one() -> Self {
        Poly(vec![Cyclo::one()])
    }

    pub fn constant(c: Cyclo) -> Self {
        let mut p = Poly(vec![c]);
        p.trim();
        p
    }

    /// c · s^k, k ≥ 0.
    pub fn monomial(c: Cyclo, k: usize) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Cyclo::zero(); k + 1];
        v[k] = c;
        Poly(v)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn is_one(&self) -> bool {
        self.0.len() == 1 && self.0[0] == Cyclo::one()
    }

    /// True if the polynomial is a single term c·s^k.
    pub fn is_monomial(&self) -> bool {
        !self.0.is_empty() && self.0[..self.0.len() - 1].iter().all(|c| c.is_zero())
    }

    pub fn leading(&self) -> &Cyclo {
        self.0.last().expect("leading coefficient of zero polynomial")
    }

    /// Lowest nonzero degree (0 for the zero polynomial).
    pub fn valuation(&self) -> usize {
        self.0.iter().position(|c| !c.is_zero()).unwrap_or(0)
    }

    fn trim(&mut self) {
        while self.0.last().map_or(false, |c| c.is_zero()) {
            self.0.pop();
        }
    }

    pub fn add(&self, rhs: &Poly) -> Poly {
        let n = self.0.len().max(rhs.0.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.0.get(i).cloned().unwrap_or_default();
            let b = rhs.0.get(i).cloned().unwrap_or_default();
            v.push(a + b);
        }
        let mut p = Poly(v);
        p.trim();
        p
    }

    pub fn sub(&self, rhs: &Poly) -> Poly {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|c| -c.clone()).collect())
    }

    pub fn mul(&self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Cyclo::zero(); self.0.len() + rhs.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.0.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let p = a * b;
                v[i + j] += &p;
            }
        }
        let mut p = Poly(v);
        p.trim();
        p
    }

    pub fn scale(&self, c: &Cyclo) -> Poly {
        let mut p = Poly(self.0.iter().map(|a| a * c).collect());
        p.trim();
        p
    }

    /// Multiply by s^k.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Cyclo::zero(); k];
        v.extend(self.0.iter().cloned());
        Poly(v)
    }

    /// Divide out s^k; panics if not divisible.
    pub fn unshift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        assert!(self.valuation() >= k, "polynomial not divisible by s^{}", k);
        Poly(self.0[k..].to_vec())
    }

    /// Exact division by a divisor whose quotient has Z[ζ] coefficients
    /// (true whenever the divisor is primitive, by Gauss's lemma); panics
    /// otherwise.
    pub fn div_exact(&self, rhs: &Poly) -> Poly {
        assert!(!rhs.is_zero(), "polynomial division by zero");
        if self.is_zero() {
            return Poly::zero();
        }
        assert!(self.0.len() >= rhs.0.len(), "inexact polynomial division");
        let lb = rhs.leading();
        let unit = lb.as_unit_zeta();
        let (adj, nrm) = match unit {
            Some(_) => (Cyclo::one(), BigInt::one()),
            None => (lb.adjoint(), lb.norm()),
        };
        let mut rem = self.0.clone();
        let mut quot = vec![Cyclo::zero(); self.0.len() - rhs.0.len() + 1];
        for i in (rhs.0.len() - 1..self.0.len()).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let q = match unit {
                Some(k) => &rem[i] * &Cyclo::zeta_pow(-k),
                None => (&rem[i] * &adj).div_int(&nrm),
            };
            let off = i + 1 - rhs.0.len();
            for (j, b) in rhs.0.iter().enumerate() {
                if !b.is_zero() {
                    let p = &q * b;
                    rem[off + j] = std::mem::take(&mut rem[off + j]) - p;
                }
            }
            quot[off] = q;
        }
        assert!(
            rem.iter().all(|c| c.is_zero()),
            "inexact polynomial division"
        );
        let mut q = Poly(quot);
        q.trim();
        q
    }

    /// Gcd of the integer contents of all coefficients; 1 for the zero
    /// polynomial, so dividing by it is always safe.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.0 {
            if !c.is_zero() {
                g = g.gcd(&c.content());
                if g.is_one() {
                    return g;
                }
            }
        }
        if g.is_zero() {
            BigInt::one()
        } else {
            g
        }
    }

    /// Exact division of every coefficient by a rational integer.
    pub fn div_int(&self, d: &BigInt) -> Poly {
        Poly(self.0.iter().map(|c| c.div_int(d)).collect())
    }

    /// Multiply every coefficient by a rational integer.
    pub fn mul_int(&self, n: &BigInt) -> Poly {
        if n.is_zero() {
            return Poly::zero();
        }
        self.scale(&Cyclo::from_big(n.clone()))
    }

    /// Divide out the integer content, leaving Z-primitive coefficients.
    fn primitive_part(&self) -> Poly {
        let content = self.content();
        if content.is_one() {
            return self.clone();
        }
        self.div_int(&content)
    }

    /// The canonical representative of this polynomial's associate class:
    /// primitive, with rational positive leading coefficient whenever the
    /// class contains such a representative (it always does after
    /// multiplying by the adjoint of the leading coefficient).  Unique
    /// because the only rational units of Z[ζ] are ±1.
    pub fn normalize_assoc(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let lc = self.leading();
        let scaled = match lc.as_unit_zeta() {
            Some(0) => self.clone(),
            Some(k) => self.scale(&Cyclo::zeta_pow(-k)),
            None => self.scale(&lc.adjoint()),
        };
        scaled.primitive_part()
    }

    /// Fraction-free remainder: lc(b)^k · a mod b for the k eliminations
    /// actually performed, so no coefficient inversions occur.
    fn pseudo_rem(&self, b: &Poly) -> Poly {
        let lb = b.leading();
        let lb_is_one = *lb == Cyclo::one();
        let mut r = self.0.clone();
        while r.last().map_or(false, |c| c.is_zero()) {
            r.pop();
        }
        while r.len() >= b.0.len() {
            let lr = r.pop().expect("nonempty remainder");
            if !lr.is_zero() {
                if !lb_is_one {
                    for c in r.iter_mut() {
                        if !c.is_zero() {
                            *c = &*c * lb;
                        }
                    }
                }
                let off = r.len() + 1 - b.0.len();
                for (j, bc) in b.0[..b.0.len() - 1].iter().enumerate() {
                    if !bc.is_zero() {
                        let p = &lr * bc;
                        r[off + j] = std::mem::take(&mut r[off + j]) - p;
                    }
                }
            }
            while r.last().map_or(false, |c| c.is_zero()) {
                r.pop();
            }
        }
        Poly(r)
    }

    /// True when self divides other over the field; requires self to be
    /// primitive so that the pseudo-remainder test is exact.
    fn divides(&self, other: &Poly) -> bool {
        other.pseudo_rem(self).is_zero()
    }

    /// Gcd in canonical associate form, computed as a primitive remainder
    /// sequence to keep coefficient growth in check.  A single-prime modular
    /// image certifies coprimality up front and bounds the gcd degree, so the
    /// expensive exact remainder sequence can stop as soon as a candidate of
    /// that degree divides both inputs.
    pub fn gcd(&self, rhs: &Poly) -> Poly {
        if self.is_zero() {
            return rhs.normalize_assoc();
        }
        if rhs.is_zero() {
            return self.normalize_assoc();
        }
        let v = self.valuation().min(rhs.valuation());
        if self.is_monomial() || rhs.is_monomial() {
            return Poly::monomial(Cyclo::one(), v);
        }
        if v > 0 {
            return self.unshift(v).gcd(&rhs.unshift(v)).shift(v);
        }
        let a0 = self.primitive_part();
        let b0 = rhs.primitive_part();
        let mut bound = modular::gcd_degree_bound(&a0, &b0);
        if bound == Some(0) {
            return Poly::one();
        }
        let (mut a, mut b) = if a0.degree() >= b0.degree() {
            (a0.clone(), b0.clone())
        } else {
            (b0.clone(), a0.clone())
        };
        while !b.is_zero() {
            // Every remainder is a multiple of the gcd, so a candidate at the
            // bounded degree either is the gcd or lowers the bound.
            if bound.map_or(false, |d| b.degree() <= d) {
                if b.divides(&a0) && b.divides(&b0) {
                    return b.normalize_assoc();
                }
                bound = if b.degree() > 0 {
                    Some(b.degree() - 1)
                } else {
                    None
                };
            }
            let r = a.pseudo_rem(&b).primitive_part();
            a = b;
            b = r;
        }
        a.normalize_assoc()
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.0.iter().rev() {
            acc = acc * s + c.eval();
        }
        acc
    }
}

/// Single-prime modular image of polynomials over Q(ζ), used only to bound
/// gcd degrees.  ζ is sent to an element of order 8 in Z_p, so the image is a
/// ring homomorphism and deg gcd mod p ≥ deg gcd exactly.
mod modular {
    use super::Poly;
    use num::bigint::BigInt;
    use num::{ToPrimitive, Zero};

    const P: u64 = 998_244_353; // 2^23·7·17 + 1, so 8 | p−1

    fn mulmod(a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % P as u128) as u64
    }

    fn powmod(mut b: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, b);
            }
            b = mulmod(b, b);
            e >>= 1;
        }
        acc
    }

    fn invmod(a: u64) -> u64 {
        powmod(a, P - 2)
    }

    fn big_mod(n: &BigInt) -> u64 {
        let p = BigInt::from(P);
        let mut r = n % &p;
        if r.sign() == num::bigint::Sign::Minus {
            r += &p;
        }
        r.to_u64().expect("reduced residue fits u64")
    }

    /// Image of a polynomial under s ↦ s, ζ ↦ w; None if the image
    /// degenerates.
    fn image(poly: &Poly, w: u64) -> Option<Vec<u64>> {
        let mut out = Vec::with_capacity(poly.0.len());
        for c in &poly.0 {
            let mut acc = 0u64;
            let mut wp = 1u64;
            for comp in &c.0 {
                if !comp.is_zero() {
                    acc = (acc + mulmod(big_mod(comp), wp)) % P;
                }
                wp = mulmod(wp, w);
            }
            out.push(acc);
        }
        while out.last() == Some(&0) {
            out.pop();
        }
        if out.is_empty() {
            return None;
        }
        Some(out)
    }

    fn euclid(mut a: Vec<u64>, mut b: Vec<u64>) -> usize {
        loop {
            if b.is_empty() {
                return a.len() - 1;
            }
            let lb_inv = invmod(*b.last().expect("nonempty"));
            while a.len() >= b.len() {
                let la = *a.last().expect("nonempty");
                a.pop();
                if la != 0 {
                    let f = mulmod(la, lb_inv);
                    let off = a.len() + 1 - b.len();
                    for (j, &bc) in b[..b.len() - 1].iter().enumerate() {
                        a[off + j] = (a[off + j] + P - mulmod(f, bc)) % P;
                    }
                }
                while a.last() == Some(&0) {
                    a.pop();
                }
            }
            std::mem::swap(&mut a, &mut b);
        }
    }

    /// Upper bound for the degree of gcd(a, b); None when the prime is
    /// unusable for these inputs.
    pub fn gcd_degree_bound(a: &Poly, b: &Poly) -> Option<usize> {
        let w = powmod(3, (P - 1) / 8);
        debug_assert_eq!(powmod(w, 4), P - 1);
        let va = image(a, w)?;
        let vb = image(b, w)?;
        // The image can drop degree when a leading coefficient vanishes
        // mod p; that loses the bound property, so give up in that case.
        if va.len() != a.0.len() || vb.len() != b.0.len() {
            return None;
        }
        Some(euclid(va, vb))
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let coeff = if c.is_rational() {
                format!("{}", c)
            } else {
                format!("({})", c)
            };
            if k == 0 {
                write!(f, "{}", coeff)?;
            } else {
                let q_part = if k % 2 == 0 {
                    if k == 2 {
                        "q".to_string()
                    } else {
                        format!("q^{}", k / 2)
                    }
                } else {
                    format!("q^({}/2)", k)
                };
                if coeff == "1" {
                    write!(f, "{}", q_part)?;
                } else {
                    write!(f, "{}*{}", coeff, q_part)?;
                }
            }
        }
        Ok(())
    }
}
