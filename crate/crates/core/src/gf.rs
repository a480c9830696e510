//! Small prime-field linear algebra and polynomial evaluation used by the
//! singular-locus dimension estimator.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::poly::Poly;

/// A polynomial with coefficients reduced mod `p`, for fast evaluation at
/// prime-field points.
#[derive(Debug, Clone)]
pub struct ModPoly {
    pub p: u64,
    terms: Vec<(u64, Vec<(usize, u32)>)>,
}

impl ModPoly {
    pub fn reduce(poly: &Poly, p: u64) -> Self {
        let pb = BigInt::from(p);
        let mut terms = Vec::new();
        for (e, c) in poly.terms() {
            let r = c.mod_floor(&pb).to_u64().expect("residue fits u64");
            if r == 0 {
                continue;
            }
            let vars: Vec<(usize, u32)> = e
                .0
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(j, &k)| (j, k))
                .collect();
            terms.push((r, vars));
        }
        ModPoly { p, terms }
    }

    pub fn eval(&self, point: &[u64]) -> u64 {
        let p = self.p;
        let mut acc: u64 = 0;
        for (c, vars) in &self.terms {
            let mut t = *c;
            for &(j, k) in vars {
                t = mulmod(t, powmod(point[j], u64::from(k), p), p);
            }
            acc = (acc + t) % p;
        }
        acc
    }
}

pub fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn powmod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    base %= p;
    let mut acc: u64 = 1 % p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, p);
        }
        base = mulmod(base, base, p);
        exp >>= 1;
    }
    acc
}

fn invmod(a: u64, p: u64) -> u64 {
    // p prime, a nonzero mod p.
    powmod(a, p - 2, p)
}

/// Rank of a matrix over F_p by Gaussian elimination. Rows are modified
/// in place.
pub fn rank_mod_p(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let nrows = rows.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = rows[0].len();
    let mut rank = 0;
    let mut col = 0;
    while rank < nrows && col < ncols {
        let pivot = (rank..nrows).find(|&i| rows[i][col] % p != 0);
        let Some(pivot) = pivot else {
            col += 1;
            continue;
        };
        rows.swap(rank, pivot);
        let inv = invmod(rows[rank][col] % p, p);
        for j in col..ncols {
            rows[rank][j] = mulmod(rows[rank][j] % p, inv, p);
        }
        for i in 0..nrows {
            if i != rank && rows[i][col] % p != 0 {
                let factor = rows[i][col] % p;
                for j in col..ncols {
                    let sub = mulmod(factor, rows[rank][j], p);
                    rows[i][j] = (rows[i][j] + p - sub % p) % p;
                }
            }
        }
        rank += 1;
        col += 1;
    }
    rank
}
