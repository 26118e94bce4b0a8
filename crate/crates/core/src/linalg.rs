//! Dense exact linear algebra over the rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::biset::Rational;
use crate::error::{Error, Result};

pub fn big(r: &Rational) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// Back to `i128` fractions; `None` on overflow.
pub fn small(r: &BigRational) -> Option<Rational> {
    Some(Rational::new(r.numer().to_i128()?, r.denom().to_i128()?))
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut [Vec<BigRational>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(k) = (r..rows).find(|&k| !m[k][c].is_zero()) else { continue };
        m.swap(r, k);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for k in 0..rows {
            if k != r && !m[k][c].is_zero() {
                let f = m[k][c].clone();
                let (top, bottom) = if k < r {
                    let (a, b) = m.split_at_mut(r);
                    (&mut a[k], &b[0])
                } else {
                    let (a, b) = m.split_at_mut(k);
                    (&mut b[0], &a[r])
                };
                for (x, y) in top.iter_mut().zip(bottom) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// The unique solution of `a x = b`.
pub fn solve(a: &[Vec<BigRational>], b: &[BigRational]) -> Result<Vec<BigRational>> {
    let n = a.first().map_or(0, |r| r.len());
    let mut m: Vec<Vec<BigRational>> =
        a.iter().zip(b).map(|(row, v)| row.iter().cloned().chain(std::iter::once(v.clone())).collect()).collect();
    let pivots = rref(&mut m);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &c)| i != c) {
        return Err(Error::NoUniqueSolution);
    }
    if m[n..].iter().any(|row| !row[n].is_zero()) {
        return Err(Error::NoUniqueSolution);
    }
    Ok(m[..n].iter().map(|row| row[n].clone()).collect())
}

pub fn rank(a: &[Vec<BigRational>]) -> usize {
    let mut m = a.to_vec();
    rref(&mut m).len()
}
