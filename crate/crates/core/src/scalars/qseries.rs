//! q-combinatorial constants and truncated q-Pochhammer expansions.

use super::{Scalar, ScalarError};

/// A half-integer stored as twice its value, so mode indices of both the
/// Neveu-Schwarz (half-odd) and Ramond (integer) sectors share one type.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Half(pub i64);

impl Half {
    pub fn int(n: i64) -> Half {
        Half(2 * n)
    }

    pub fn twice(self) -> i64 {
        self.0
    }

    pub fn is_int(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn as_int(self) -> i64 {
        debug_assert!(self.is_int());
        self.0 / 2
    }

    pub fn neg(self) -> Half {
        Half(-self.0)
    }
}

impl std::fmt::Display for Half {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_int() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// The symmetric q-integer [n] = (q^n − q^{−n})/(q − q^{−1}).
pub fn q_int(n: i64) -> Scalar {
    let m = n.abs();
    let mut acc = Scalar::zero();
    // [n] = q^{n-1} + q^{n-3} + ... + q^{1-n}
    let mut k = m - 1;
    while k >= -(m - 1) && m > 0 {
        acc += &Scalar::q_pow(k);
        k -= 2;
    }
    if n < 0 {
        -acc
    } else {
        acc
    }
}

/// η_m = q^{2m} + q^{−2m}.
pub fn eta(m: Half) -> Scalar {
    Scalar::s_pow(2 * m.twice()) + Scalar::s_pow(-2 * m.twice())
}

/// q^{4k} for half-integer k.
fn q4_pow(k: Half) -> Scalar {
    Scalar::s_pow(4 * k.twice())
}

/// X_{k,l} = (q^{4k} − q^{4l})/(1 − q^{4(k+l)}); antisymmetric, undefined on k+l = 0.
pub fn x_coeff(k: Half, l: Half) -> Result<Scalar, ScalarError> {
    if k.twice() + l.twice() == 0 {
        return Err(ScalarError::SingularXCoeff { k, l });
    }
    let num = q4_pow(k) - q4_pow(l);
    let den = Scalar::one() - Scalar::s_pow(4 * (k.twice() + l.twice()));
    Ok(num / den)
}

/// Finite q-shifted factorial (a; q^4)_n = ∏_{j=0}^{n-1} (1 − a q^{4j}).
pub fn poch_finite(a: &Scalar, n: u32) -> Scalar {
    let mut acc = Scalar::one();
    for j in 0..n as i64 {
        acc = &acc * &(Scalar::one() - a * &Scalar::q_pow(4 * j));
    }
    acc
}

/// γ_n = (q^2; q^4)_n / (q^4; q^4)_n.
pub fn gamma_coeff(n: u32) -> Scalar {
    poch_finite(&Scalar::q_pow(2), n) / poch_finite(&Scalar::q_pow(4), n)
}

/// Truncated power-series expansion of a ratio (a u; q^4)_∞ / (b u; q^4)_∞.
#[derive(Clone, Debug, PartialEq)]
pub struct QSeriesExpansion {
    pub coeffs: Vec<Scalar>,
}

impl QSeriesExpansion {
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &Scalar {
        &self.coeffs[n]
    }

    pub fn mul(&self, rhs: &QSeriesExpansion) -> QSeriesExpansion {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        let mut out = vec![Scalar::zero(); n];
        for i in 0..n {
            for j in 0..n - i {
                let p = &self.coeffs[i] * &rhs.coeffs[j];
                out[i + j] += &p;
            }
        }
        QSeriesExpansion { coeffs: out }
    }
}

/// Expansion of f(u) = (a u; q^4)_∞ / (b u; q^4)_∞ to order N via the
/// q-difference equation f(u)(1 − b u) = f(q⁴ u)(1 − a u), which gives the
/// first-order recurrence c_n = c_{n−1} (b − a q^{4(n−1)}) / (1 − q^{4n}).
/// Each coefficient costs one small multiplication, avoiding the huge
/// factorial denominators of the termwise double-sum convolution.
pub fn expand_poch_ratio(a: &Scalar, b: &Scalar, n_max: u32) -> QSeriesExpansion {
    let mut coeffs = Vec::with_capacity(n_max as usize + 1);
    let mut c = Scalar::one();
    coeffs.push(c.clone());
    for n in 1..=n_max as i64 {
        let step = (b.clone() - (a * &Scalar::q_pow(4 * (n - 1))))
            / (Scalar::one() - Scalar::q_pow(4 * n));
        c = &c * &step;
        coeffs.push(c.clone());
    }
    QSeriesExpansion { coeffs }
}

/// Finite Pochhammer with arbitrary base step: (x; t^2)_n = ∏_{j<n}(1 − x t^{2j}),
/// with t = q^2 fixed, x given as an s-power.
fn poch_t2(x_s_exp: i64, n: i64) -> Scalar {
    // t = q^2 means t^{2j} = q^{4j} = s^{8j}
    let mut acc = Scalar::one();
    for j in 0..n {
        acc = &acc * &(Scalar::one() - Scalar::s_pow(x_s_exp + 8 * j));
    }
    acc
}

/// Per-pair report for the finite-sum identity behind the two-point function.
#[derive(Debug, Clone)]
pub struct XIdentityReport {
    pub n: i64,
    pub m: i64,
    pub full_sum_ok: bool,
    pub partial_sums_ok: bool,
}

impl XIdentityReport {
    pub fn passed(&self) -> bool {
        self.full_sum_ok && self.partial_sums_ok
    }
}

/// Summand of the reduced identity at a given a (t = q^2):
///   (t^{1+2n}; t^2)_{a−1}/(t^{2+2n}; t^2)_{a−1}
/// · (t^{2m−2a+2}; t^2)_a/(t^{2m−2a+1}; t^2)_a · t^a/(1 − t^{2(n+a)}).
fn reduced_summand(n: i64, m: i64, a: i64) -> Scalar {
    // t^k = q^{2k} = s^{4k}
    let f1 = poch_t2(4 * (1 + 2 * n), a - 1) / poch_t2(4 * (2 + 2 * n), a - 1);
    let f2 = poch_t2(4 * (2 * m - 2 * a + 2), a) / poch_t2(4 * (2 * m - 2 * a + 1), a);
    let f3 = Scalar::s_pow(4 * a) / (Scalar::one() - Scalar::s_pow(8 * (n + a)));
    f1 * f2 * f3
}

/// Checks the reduced form of the two-point identity by literal summation:
/// 1 + (1 − t^{−1})(1 + t^{2n}) Σ_{a=1}^{m} (summand) must equal
/// (t^{2m} − t^{2n})/(1 − t^{2(n+m)}) = X_{m,n}, and the partial sums over
/// a = m−k..m must match their closed form for each k = 0..m−1.
pub fn verify_x_identity(n: i64, m: i64) -> XIdentityReport {
    assert!(n >= 0 && m >= 0 && n + m > 0);
    let t = |k: i64| Scalar::s_pow(4 * k);
    let prefactor = (Scalar::one() - t(-1)) * (Scalar::one() + t(2 * n));

    let summands: Vec<Scalar> = (1..=m).map(|a| reduced_summand(n, m, a)).collect();
    let mut full = Scalar::zero();
    for s in &summands {
        full += s;
    }
    let lhs = Scalar::one() + prefactor.clone() * full;
    let rhs = (t(2 * m) - t(2 * n)) / (Scalar::one() - t(2 * (n + m)));
    let full_sum_ok = lhs == rhs;

    // Partial-sum closed form: Σ_{a=m−k}^{m} (summand)
    //   = t^{m−k} (t^{1+2n};t^2)_{m−k−1}/(t^{2+2n};t^2)_{m−k−1}
    //   · (t^{2k+2};t^2)_{m−k}/((1−t)(t^{2k+3};t^2)_{m−k−1}) · 1/(1−t^{2(n+m)});
    // at k = m−1 it telescopes to (t^{2m}−t^{2n})/(1−t^{2(n+m)}).
    let mut partial_sums_ok = true;
    let mut acc = Scalar::zero();
    for k in 0..m {
        acc += &summands[(m - k - 1) as usize];
        let closed = t(m - k)
            * (poch_t2(4 * (1 + 2 * n), m - k - 1) / poch_t2(4 * (2 + 2 * n), m - k - 1))
            * (poch_t2(4 * (2 * k + 2), m - k)
                / ((Scalar::one() - t(1)) * poch_t2(4 * (2 * k + 3), m - k - 1)))
            / (Scalar::one() - t(2 * (n + m)));
        if acc != closed {
            partial_sums_ok = false;
        }
    }

    XIdentityReport {
        n,
        m,
        full_sum_ok,
        partial_sums_ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_int_small() {
        assert_eq!(q_int(1), Scalar::one());
        assert_eq!(q_int(0), Scalar::zero());
        assert_eq!(q_int(2), Scalar::q_pow(1) + Scalar::q_pow(-1));
        // defining ratio
        let lhs = &q_int(5) * &(Scalar::q_pow(1) - Scalar::q_pow(-1));
        assert_eq!(lhs, Scalar::q_pow(5) - Scalar::q_pow(-5));
    }

    #[test]
    fn eta_small() {
        assert_eq!(eta(Half::int(0)), Scalar::from_int(2));
        assert_eq!(eta(Half::int(1)), Scalar::q_pow(2) + Scalar::q_pow(-2));
        assert_eq!(eta(Half(1)), Scalar::q_pow(1) + Scalar::q_pow(-1));
    }

    #[test]
    fn x_coeff_examples() {
        for n in -3..4i64 {
            if n != 0 {
                assert!(x_coeff(Half::int(n), Half::int(n)).unwrap().is_zero());
            }
        }
        assert_eq!(
            x_coeff(Half::int(1), Half::int(0)).unwrap(),
            -Scalar::one()
        );
        let x = x_coeff(Half(1), Half(3)).unwrap();
        let expect = (Scalar::q_pow(2) - Scalar::q_pow(6))
            / (Scalar::one() - Scalar::q_pow(8));
        assert_eq!(x, expect);
        assert!(x_coeff(Half(3), Half(-3)).is_err());
    }

    #[test]
    fn x_coeff_antisymmetry() {
        for a in -4..5i64 {
            for b in -4..5i64 {
                if a + b == 0 {
                    continue;
                }
                let x = x_coeff(Half(a), Half(b)).unwrap();
                let y = x_coeff(Half(b), Half(a)).unwrap();
                assert!((x + y).is_zero(), "X({},{}) not antisymmetric", a, b);
            }
        }
    }

    #[test]
    fn gamma_matches_series() {
        let series = expand_poch_ratio(&Scalar::q_pow(2), &Scalar::one(), 10);
        assert!(series.coeff(0).is_one());
        assert_eq!(
            gamma_coeff(1),
            (Scalar::one() - Scalar::q_pow(2)) / (Scalar::one() - Scalar::q_pow(4))
        );
        for n in 0..=10u32 {
            assert_eq!(
                &gamma_coeff(n),
                series.coeff(n as usize),
                "gamma_{} disagrees with the product expansion",
                n
            );
        }
    }

    #[test]
    fn poch_ratio_inverse_pair() {
        let a = Scalar::q_pow(2);
        let b = Scalar::q_pow(-1);
        let f = expand_poch_ratio(&a, &b, 8);
        let g = expand_poch_ratio(&b, &a, 8);
        let prod = f.mul(&g);
        assert!(prod.coeff(0).is_one());
        for n in 1..=8 {
            assert!(prod.coeff(n).is_zero(), "order {} residual", n);
        }
    }

    #[test]
    fn poch_ratio_identical_cancels() {
        let a = Scalar::q_pow(3);
        let f = expand_poch_ratio(&a, &a, 6);
        assert!(f.coeff(0).is_one());
        for n in 1..=6 {
            assert!(f.coeff(n).is_zero());
        }
    }

    #[test]
    fn x_identity_small() {
        assert!(verify_x_identity(1, 0).passed());
        assert!(verify_x_identity(2, 3).passed());
        assert!(verify_x_identity(0, 1).passed());
    }
}
