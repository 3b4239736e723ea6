//! Arbitrary-precision integer matrices and the exact linear algebra the
//! triple calculus needs: determinants and integer inverses of unimodular
//! matrices via rational Gauss-Jordan elimination.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Dense row-major matrix of `BigInt`. Indices are 0-based here; the public
/// operation layer speaks 1-based labels and translates at the boundary.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    n: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(n: usize) -> Self {
        IntMatrix {
            n,
            data: vec![BigInt::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let n = rows.len();
        for r in &rows {
            if r.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: r.len(),
                });
            }
        }
        Ok(IntMatrix {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.n).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.n {
            self.data.swap(i * self.n + c, j * self.n + c);
        }
    }

    pub fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.n {
            self.data.swap(r * self.n + i, r * self.n + j);
        }
    }

    /// row[target] += sign * row[source]
    pub fn row_addmul(&mut self, target: usize, source: usize, sign: i8) {
        for c in 0..self.n {
            let s = self[(source, c)].clone();
            let t = &mut self[(target, c)];
            if sign >= 0 {
                *t += s;
            } else {
                *t -= s;
            }
        }
    }

    /// col[target] += sign * col[source]
    pub fn col_addmul(&mut self, target: usize, source: usize, sign: i8) {
        for r in 0..self.n {
            let s = self[(r, source)].clone();
            let t = &mut self[(r, target)];
            if sign >= 0 {
                *t += s;
            } else {
                *t -= s;
            }
        }
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = IntMatrix::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    pub fn entries_nonnegative(&self) -> Result<()> {
        for i in 0..self.n {
            for j in 0..self.n {
                if self[(i, j)].is_negative() {
                    return Err(Error::NegativeEntry {
                        row: i + 1,
                        col: j + 1,
                    });
                }
            }
        }
        Ok(())
    }

    /// (inverse, determinant) of a unimodular matrix, by exact rational
    /// Gauss-Jordan. Fails with `DetNotUnit` when `det` is not +1 or -1.
    pub fn unimodular_inverse(&self) -> Result<(IntMatrix, i8)> {
        let n = self.n;
        let mut a: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| BigRational::from_integer(self[(i, j)].clone()))
                    .collect()
            })
            .collect();
        let mut inv: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            BigRational::one()
                        } else {
                            BigRational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        let mut det = BigRational::one();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r][col].is_zero());
            let Some(p) = pivot else {
                return Err(Error::DetNotUnit(BigInt::zero()));
            };
            if p != col {
                a.swap(p, col);
                inv.swap(p, col);
                det = -det;
            }
            let pv = a[col][col].clone();
            det *= &pv;
            for j in 0..n {
                a[col][j] /= &pv;
                inv[col][j] /= &pv;
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let factor = a[r][col].clone();
                for j in 0..n {
                    let t = &factor * &a[col][j];
                    a[r][j] -= t;
                    let t = &factor * &inv[col][j];
                    inv[r][j] -= t;
                }
            }
        }
        if !det.is_integer() {
            return Err(Error::DetNotUnit(det.to_integer()));
        }
        let det_int = det.to_integer();
        if det_int.abs() != BigInt::one() {
            return Err(Error::DetNotUnit(det_int));
        }
        let mut out = IntMatrix::zero(n);
        for i in 0..n {
            for j in 0..n {
                debug_assert!(inv[i][j].is_integer());
                out[(i, j)] = inv[i][j].to_integer();
            }
        }
        let sign = if det_int.is_negative() { -1 } else { 1 };
        Ok((out, sign))
    }

    pub fn determinant(&self) -> BigInt {
        let n = self.n;
        let mut a: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| BigRational::from_integer(self[(i, j)].clone()))
                    .collect()
            })
            .collect();
        let mut det = BigRational::one();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r][col].is_zero());
            let Some(p) = pivot else {
                return BigInt::zero();
            };
            if p != col {
                a.swap(p, col);
                det = -det;
            }
            let pv = a[col][col].clone();
            det *= &pv;
            for r in col + 1..n {
                if a[r][col].is_zero() {
                    continue;
                }
                let factor = &a[r][col] / &pv;
                for j in col..n {
                    let t = &factor * &a[col][j];
                    a[r][j] -= t;
                }
            }
        }
        det.to_integer()
    }

    pub fn max_abs_entry(&self) -> BigInt {
        self.data
            .iter()
            .map(|x| x.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.n + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "[")?;
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_identity() {
        let m = IntMatrix::identity(3);
        let (inv, det) = m.unimodular_inverse().unwrap();
        assert!(inv.is_identity());
        assert_eq!(det, 1);
    }

    #[test]
    fn inverse_of_shear() {
        let m = IntMatrix::from_i64_rows(&[&[1, 1], &[0, 1]]).unwrap();
        let (inv, det) = m.unimodular_inverse().unwrap();
        assert_eq!(det, 1);
        let expect = IntMatrix::from_i64_rows(&[&[1, -1], &[0, 1]]).unwrap();
        assert_eq!(inv, expect);
        assert!(m.mul(&inv).is_identity());
    }

    #[test]
    fn inverse_of_negative_det() {
        let m = IntMatrix::from_i64_rows(&[&[0, 1], &[1, 0]]).unwrap();
        let (inv, det) = m.unimodular_inverse().unwrap();
        assert_eq!(det, -1);
        assert!(m.mul(&inv).is_identity());
    }

    #[test]
    fn non_unimodular_rejected() {
        let m = IntMatrix::from_i64_rows(&[&[2, 0], &[0, 2]]).unwrap();
        assert!(matches!(
            m.unimodular_inverse(),
            Err(Error::DetNotUnit(d)) if d == BigInt::from(4)
        ));
        let s = IntMatrix::from_i64_rows(&[&[1, 1], &[1, 1]]).unwrap();
        assert!(matches!(s.unimodular_inverse(), Err(Error::DetNotUnit(_))));
    }

    #[test]
    fn inverse_three_by_three() {
        let m = IntMatrix::from_i64_rows(&[&[2, 1, 1], &[0, 1, 2], &[1, 1, 1]]).unwrap();
        let (inv, det) = m.unimodular_inverse().unwrap();
        assert_eq!(det, -1);
        assert!(m.mul(&inv).is_identity());
        // first column of the inverse is (1, -2, 1)
        assert_eq!(inv.col(0), vec![BigInt::from(1), BigInt::from(-2), BigInt::from(1)]);
    }

    #[test]
    fn determinant_matches_inverse_sign() {
        let m = IntMatrix::from_i64_rows(&[&[2, 1, 0], &[1, 1, 0], &[1, 1, 1]]).unwrap();
        assert_eq!(m.determinant(), BigInt::one());
        let (_, det) = m.unimodular_inverse().unwrap();
        assert_eq!(det, 1);
    }
}
