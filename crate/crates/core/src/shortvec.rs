//! Enumeration of lattice vectors of a given norm in a definite lattice.
//!
//! The Gram matrix is diagonalised as `Q(x) = Σ dᵢ (xᵢ + Σ_{j>i} μᵢⱼ xⱼ)²`
//! over Q, and coordinates are fixed from the last one down, each interval
//! bounded by the norm budget that is left. All arithmetic is exact.

use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{Lattice, Vector};

pub const DEFAULT_VECTOR_CAP: u64 = 1_000_000;

/// All nonzero vectors `x` with `x² = n`, in lexicographic order.
///
/// `l` must be definite and `n` must have the sign of the form; `n = 0`
/// gives an empty list.
pub fn vectors_of_norm(l: &Lattice, n: &BigInt, cap: u64) -> Result<Vec<Vector>> {
    let mut out = vectors_up_to_norm(l, n, cap, |x| x == n)?;
    out.sort();
    Ok(out)
}

/// All nonzero vectors with `0 < |x²| ≤ |bound|`, lexicographically ordered.
pub fn vectors_up_to(l: &Lattice, bound: &BigInt, cap: u64) -> Result<Vec<Vector>> {
    let mut out = vectors_up_to_norm(l, bound, cap, |_| true)?;
    out.sort();
    Ok(out)
}

fn vectors_up_to_norm(
    l: &Lattice,
    bound: &BigInt,
    cap: u64,
    keep: impl Fn(&BigInt) -> bool,
) -> Result<Vec<Vector>> {
    if l.is_degenerate() {
        return Err(Error::DegenerateLattice);
    }
    let sig = l.signature();
    if !sig.is_definite() {
        return Err(Error::IndefiniteLattice);
    }
    let rank = l.rank();
    if rank == 0 || bound.is_zero() {
        return Ok(Vec::new());
    }
    let negative = sig.positive == 0;
    if negative != bound.is_negative() {
        return Err(Error::InvalidParameter(format!(
            "norm {bound} has the wrong sign for a {} definite lattice",
            if negative { "negative" } else { "positive" }
        )));
    }
    let sign = if negative { BigInt::from(-1) } else { BigInt::from(1) };
    let gram = l.gram().scaled(&sign);
    let budget = BigRational::from_integer(bound * &sign);

    let (d, mu) = ldl(&gram);
    let mut found = Vec::new();
    let mut x = vec![BigInt::zero(); rank];
    enumerate(rank, rank, &d, &mu, &budget, &mut x, &mut |x: &[BigInt]| {
        if x.iter().all(Zero::is_zero) {
            return Ok(());
        }
        let v = Vector(x.to_vec());
        let norm = l.norm(&v);
        if keep(&norm) {
            if found.len() as u64 >= cap {
                return Err(Error::CapExceeded { cap });
            }
            found.push(v);
        }
        Ok(())
    })?;
    Ok(found)
}

/// `G = Lᵀ D L` with unit upper-triangular `L` (stored as `mu[i][j]`, j > i).
fn ldl(g: &crate::matrix::IntMatrix) -> (Vec<BigRational>, Vec<Vec<BigRational>>) {
    let n = g.nrows();
    let mut a = g.to_rational();
    let mut d = vec![BigRational::zero(); n];
    let mut mu = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        d[i] = a[(i, i)].clone();
        for j in i + 1..n {
            mu[i][j] = &a[(i, j)] / &d[i];
        }
        for j in i + 1..n {
            for k in i + 1..n {
                let t = &mu[i][j] * &a[(i, k)];
                a[(j, k)] -= t;
            }
        }
    }
    (d, mu)
}

fn enumerate(
    rank: usize,
    level: usize,
    d: &[BigRational],
    mu: &[Vec<BigRational>],
    budget: &BigRational,
    x: &mut Vec<BigInt>,
    visit: &mut impl FnMut(&[BigInt]) -> Result<()>,
) -> Result<()> {
    if level == 0 {
        return visit(x);
    }
    let i = level - 1;
    let center: BigRational = (i + 1..rank).map(|j| &mu[i][j] * BigRational::from_integer(x[j].clone())).sum();
    // (xᵢ + c)² ≤ budget / dᵢ
    let t = budget / &d[i];
    let r: BigInt = Roots::sqrt(&t.floor().to_integer()) + 1;
    let lo = (-&center - BigRational::from_integer(r.clone())).ceil().to_integer();
    let hi = (-&center + BigRational::from_integer(r)).floor().to_integer();
    let mut xi = lo;
    while xi <= hi {
        let y = BigRational::from_integer(xi.clone()) + &center;
        let used = &d[i] * &y * &y;
        if used <= *budget {
            x[i] = xi.clone();
            let rest = budget - used;
            enumerate(rank, i, d, mu, &rest, x, visit)?;
        }
        xi += 1;
    }
    x[i] = BigInt::zero();
    Ok(())
}
