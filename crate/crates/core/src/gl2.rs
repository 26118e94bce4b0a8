//! 2x2 matrices over F_p, acting on `S/Z(S)` and on the maximal subgroups.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::inv_mod;

/// `[[a, b], [c, d]]` over F_p. Column `k` is the image of basis vector `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mat2 {
    pub p: u32,
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
}

impl Mat2 {
    pub fn new(p: u32, a: i64, b: i64, c: i64, d: i64) -> Self {
        let m = p as i64;
        let r = |v: i64| v.rem_euclid(m) as u32;
        Mat2 { p, a: r(a), b: r(b), c: r(c), d: r(d) }
    }

    pub fn identity(p: u32) -> Self {
        Self::new(p, 1, 0, 0, 1)
    }

    pub fn diag(p: u32, x: i64, y: i64) -> Self {
        Self::new(p, x, 0, 0, y)
    }

    pub fn det(&self) -> u32 {
        let p = self.p as u64;
        ((self.a as u64 * self.d as u64 + p * p - self.b as u64 * self.c as u64) % p) as u32
    }

    pub fn is_invertible(&self) -> bool {
        self.det() != 0
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let p = self.p as u64;
        let f = |x: u32, y: u32, u: u32, v: u32| {
            ((x as u64 * y as u64 + u as u64 * v as u64) % p) as u32
        };
        Mat2 {
            p: self.p,
            a: f(self.a, o.a, self.b, o.c),
            b: f(self.a, o.b, self.b, o.d),
            c: f(self.c, o.a, self.d, o.c),
            d: f(self.c, o.b, self.d, o.d),
        }
    }

    pub fn inverse(&self) -> Result<Mat2> {
        let det = self.det();
        if det == 0 {
            return Err(Error::SingularMatrix);
        }
        let i = inv_mod(det as u64, self.p as u64) as i64;
        Ok(Mat2::new(
            self.p,
            i * self.d as i64,
            -i * self.b as i64,
            -i * self.c as i64,
            i * self.a as i64,
        ))
    }

    pub fn apply(&self, v: (u32, u32)) -> (u32, u32) {
        let p = self.p as u64;
        (
            ((self.a as u64 * v.0 as u64 + self.b as u64 * v.1 as u64) % p) as u32,
            ((self.c as u64 * v.0 as u64 + self.d as u64 * v.1 as u64) % p) as u32,
        )
    }

    pub fn is_upper_triangular(&self) -> bool {
        self.c == 0
    }

    /// All of GL_2(p).
    pub fn all_invertible(p: u32) -> Vec<Mat2> {
        let mut out = Vec::new();
        for a in 0..p {
            for b in 0..p {
                for c in 0..p {
                    for d in 0..p {
                        let m = Mat2 { p, a, b, c, d };
                        if m.is_invertible() {
                            out.push(m);
                        }
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

/// Line index of a nonzero vector of F_p^2: `(1, i) -> i`, `(0, 1) -> p`.
pub fn line_of_vector(p: u32, v: (u32, u32)) -> usize {
    if v.0 == 0 {
        p as usize
    } else {
        (v.1 as u64 * inv_mod(v.0 as u64, p as u64) % p as u64) as usize
    }
}

/// Spanning vector of line `i`.
pub fn line_vector(p: u32, i: usize) -> (u32, u32) {
    if i == p as usize {
        (0, 1)
    } else {
        (1, i as u32)
    }
}
