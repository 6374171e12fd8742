//! Pfaffian of an antisymmetric matrix over the exact coefficient field.

use super::{Scalar, ScalarError};

/// Pf(B) by expansion along the first row:
/// Pf(B) = Σ_{j>0} (−1)^j b_{0j} Pf(B with rows/cols 0, j removed).
///
/// Rejects odd dimension and non-antisymmetric input.  Pf(B)² = det(B).
pub fn pfaffian(b: &[Vec<Scalar>]) -> Result<Scalar, ScalarError> {
    let n = b.len();
    if n % 2 != 0 {
        return Err(ScalarError::OddPfaffian { size: n });
    }
    for (i, row) in b.iter().enumerate() {
        if row.len() != n {
            return Err(ScalarError::NotSquare);
        }
        for j in 0..=i {
            if b[i][j] != -b[j][i].clone() {
                return Err(ScalarError::NotAntisymmetric { row: i, col: j });
            }
        }
    }
    Ok(pf_rec(b))
}

fn pf_rec(b: &[Vec<Scalar>]) -> Scalar {
    let n = b.len();
    if n == 0 {
        return Scalar::one();
    }
    if n == 2 {
        return b[0][1].clone();
    }
    let mut acc = Scalar::zero();
    for j in 1..n {
        if b[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Scalar>> = (1..n)
            .filter(|&r| r != j)
            .map(|r| {
                (1..n)
                    .filter(|&c| c != j)
                    .map(|c| b[r][c].clone())
                    .collect()
            })
            .collect();
        let sign = if j % 2 == 1 { 1 } else { -1 };
        let term = Scalar::from_int(sign) * b[0][j].clone() * pf_rec(&minor);
        acc += &term;
    }
    acc
}

/// Determinant by fraction-free-ish Gaussian elimination over the field,
/// used as the independent oracle for Pf² = det.
pub fn determinant(b: &[Vec<Scalar>]) -> Scalar {
    let n = b.len();
    let mut m: Vec<Vec<Scalar>> = b.to_vec();
    let mut det = Scalar::one();
    for col in 0..n {
        let pivot = match (col..n).find(|&r| !m[r][col].is_zero()) {
            Some(p) => p,
            None => return Scalar::zero(),
        };
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det = det * p.clone();
        let pinv = p.inv();
        let prow: Vec<Scalar> = m[col].iter().map(|x| x * &pinv).collect();
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for c in col..n {
                let sub = &f * &prow[c];
                m[r][c] = &m[r][c] - &sub;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::qseries::{x_coeff, Half};

    fn antisym_from_upper(n: usize, f: impl Fn(usize, usize) -> Scalar) -> Vec<Vec<Scalar>> {
        let mut m = vec![vec![Scalar::zero(); n]; n];
        for i in 0..n {
            for j in i + 1..n {
                m[i][j] = f(i, j);
                m[j][i] = -m[i][j].clone();
            }
        }
        m
    }

    #[test]
    fn two_by_two() {
        let b = antisym_from_upper(2, |_, _| Scalar::q_pow(3));
        assert_eq!(pfaffian(&b).unwrap(), Scalar::q_pow(3));
    }

    #[test]
    fn four_by_four_textbook() {
        // entries b_{ij} = q^{i+2j} — generic enough
        let b = antisym_from_upper(4, |i, j| Scalar::q_pow(i as i64 + 2 * j as i64));
        let pf = pfaffian(&b).unwrap();
        let expect = &b[0][1] * &b[2][3]
            - (&b[0][2] * &b[1][3])
            + &b[0][3] * &b[1][2];
        assert_eq!(pf, expect);
    }

    #[test]
    fn pf_squared_is_det() {
        for n in [2usize, 4, 6] {
            let b = antisym_from_upper(n, |i, j| {
                x_coeff(Half::int(j as i64 + 1), Half::int(i as i64)).unwrap()
            });
            let pf = pfaffian(&b).unwrap();
            let det = determinant(&b);
            assert_eq!(&pf * &pf, det, "Pf^2 != det at size {}", n);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let b = vec![vec![Scalar::zero(); 3]; 3];
        assert!(pfaffian(&b).is_err());
        let mut b = vec![vec![Scalar::zero(); 2]; 2];
        b[0][1] = Scalar::one();
        b[1][0] = Scalar::one();
        assert!(pfaffian(&b).is_err());
    }
}
