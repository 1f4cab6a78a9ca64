//! Finite-order isometries, their fixed lattices and their action on the
//! discriminant group.
//!
//! Matrices act on coordinate columns: column `j` is the image of basis
//! vector `j`, and `Pᵀ G P = G`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::disc::discriminant_form;
use crate::error::{Error, Result};
use crate::lattice::{orthogonal_complement, Lattice, Sublattice, Vector};
use crate::matrix::{IntMatrix, RatMatrix};

pub const DEFAULT_ORDER_CAP: u32 = 120;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isometry {
    lattice: Lattice,
    matrix: IntMatrix,
    order: u32,
}

impl Isometry {
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        Vector(self.matrix.mul_vec(&v.0))
    }

    pub fn compose(&self, other: &Isometry) -> Result<Isometry> {
        make_isometry(&self.lattice, self.matrix.mul(&other.matrix))
    }

    pub fn is_identity(&self) -> bool {
        self.order == 1
    }
}

/// Validates `p` as an isometry of `l` and computes its order (at most
/// [`DEFAULT_ORDER_CAP`]).
pub fn make_isometry(l: &Lattice, p: IntMatrix) -> Result<Isometry> {
    make_isometry_with_cap(l, p, DEFAULT_ORDER_CAP)
}

pub fn make_isometry_with_cap(l: &Lattice, p: IntMatrix, cap: u32) -> Result<Isometry> {
    let n = l.rank();
    if p.nrows() != n || p.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: p.nrows() });
    }
    if &p.transpose().mul(l.gram()).mul(&p) != l.gram() {
        return Err(Error::NotAnIsometry);
    }
    let id = IntMatrix::identity(n);
    let mut power = p.clone();
    for k in 1..=cap {
        if power == id {
            return Ok(Isometry { lattice: l.clone(), matrix: p, order: k });
        }
        power = power.mul(&p);
    }
    Err(Error::OrderCapExceeded { cap })
}

fn reflection_matrix(l: &Lattice, v: &Vector) -> Result<IntMatrix> {
    l.check_vector(v)?;
    let sq = l.norm(v);
    let pairings = l.pairings_with_basis(v);
    if sq.is_zero() || pairings.iter().any(|p| !(BigInt::from(2) * p).is_multiple_of(&sq)) {
        return Err(Error::NonIntegralReflection { square: sq });
    }
    let n = l.rank();
    let mut m = IntMatrix::identity(n);
    for j in 0..n {
        let k = BigInt::from(2) * &pairings[j] / &sq;
        for i in 0..n {
            m[(i, j)] -= &k * &v.0[i];
        }
    }
    Ok(m)
}

/// `x ↦ x − (2(x,v)/v²) v`.
pub fn reflection(l: &Lattice, v: &Vector) -> Result<Isometry> {
    make_isometry(l, reflection_matrix(l, v)?)
}

/// `x ↦ −x + (2(x,v)/v²) v`, fixing `v` and negating `v^⊥`.
pub fn negated_reflection(l: &Lattice, v: &Vector) -> Result<Isometry> {
    make_isometry(l, reflection_matrix(l, v)?.neg())
}

/// `T_G(L)` (fixed vectors of every generator) and `S_G(L) = T_G(L)^⊥`.
pub fn invariant_and_coinvariant(l: &Lattice, gens: &[Isometry]) -> Result<(Sublattice, Sublattice)> {
    let n = l.rank();
    let id = IntMatrix::identity(n);
    let mut stacked = IntMatrix::zeros(0, n);
    for g in gens {
        if g.lattice() != l {
            return Err(Error::GramMismatch);
        }
        stacked = stacked.vstack(&g.matrix().sub(&id));
    }
    let fixed = if stacked.nrows() == 0 { id } else { stacked.kernel() };
    let t = Sublattice::new(l.clone(), fixed)?;
    let s = orthogonal_complement(&t);
    Ok((t, s))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DiscClass {
    Trivial,
    MinusIdentity,
    Other,
}

impl DiscClass {
    pub fn tag(&self) -> &'static str {
        match self {
            DiscClass::Trivial => "trivial",
            DiscClass::MinusIdentity => "minus",
            DiscClass::Other => "other",
        }
    }

    pub fn parse(s: &str) -> Option<DiscClass> {
        match s {
            "trivial" => Some(DiscClass::Trivial),
            "minus" | "minus-identity" => Some(DiscClass::MinusIdentity),
            "other" => Some(DiscClass::Other),
            _ => None,
        }
    }
}

impl fmt::Display for DiscClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// The automorphism of `A_L` induced by an isometry: `images[i]` is the image
/// of generator `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscAction {
    pub orders: Vec<BigInt>,
    pub images: Vec<Vec<BigInt>>,
    pub classification: DiscClass,
}

impl DiscAction {
    /// The action restricted to the `i`-th cyclic factor, if it preserves it:
    /// the multiplier `k` with `gᵢ ↦ k gᵢ`.
    pub fn multiplier(&self, i: usize) -> Option<BigInt> {
        let img = &self.images[i];
        if img.iter().enumerate().all(|(j, c)| j == i || c.is_zero()) {
            Some(img[i].clone())
        } else {
            None
        }
    }
}

/// Transports the dual-lattice lifts of the generators of `A_L` through `g`.
pub fn disc_action(g: &Isometry) -> Result<DiscAction> {
    let d = discriminant_form(g.lattice())?;
    let p = g.matrix().to_rational();
    let orders = d.form().orders().to_vec();
    let mut images = Vec::new();
    for lift in d.lifts() {
        images.push(d.class_of(&p.mul_vec(lift))?);
    }
    let m = orders.len();
    let is_scalar = |k: i64| {
        (0..m).all(|i| {
            (0..m).all(|j| {
                let want = if i == j { BigInt::from(k).mod_floor(&orders[j]) } else { BigInt::zero() };
                images[i][j] == want
            })
        })
    };
    let classification = if is_scalar(1) {
        DiscClass::Trivial
    } else if is_scalar(-1) {
        DiscClass::MinusIdentity
    } else {
        DiscClass::Other
    };
    Ok(DiscAction { orders, images, classification })
}

/// Extends isometries of a primitive sublattice `M` of a unimodular lattice
/// by the identity on `M^⊥`. Each input must act on the lattice `M` itself
/// (Gram matrix of the basis of `M`) and trivially on `A_M`.
pub fn extend_to_unimodular(m: &Sublattice, gens: &[Isometry]) -> Result<Vec<Isometry>> {
    let l = m.ambient();
    if !l.is_unimodular() {
        return Err(Error::NotUnimodular);
    }
    if !m.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    let mlat = m.lattice()?;
    for g in gens {
        if g.lattice() != &mlat {
            return Err(Error::GramMismatch);
        }
        if disc_action(g)?.classification != DiscClass::Trivial {
            return Err(Error::DiscActionNontrivial);
        }
    }
    let k = orthogonal_complement(m);
    let r = m.rank();
    let n = l.rank();
    // columns of `b` are the basis of M followed by the basis of M^⊥
    let b = m.basis().vstack(k.basis()).transpose().to_rational();
    let b_inv = b.inverse().expect("M ⊕ M^⊥ has full rank");
    let mut out = Vec::new();
    for g in gens {
        let mut block = RatMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                block[(i, j)] = if i < r && j < r {
                    BigRational::from_integer(g.matrix()[(i, j)].clone())
                } else if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                };
            }
        }
        let q = b.mul(&block).mul(&b_inv);
        let q = q.to_integer().expect("trivial action on A_M makes the extension integral");
        let ext = make_isometry(l, q)?;
        debug_assert!((0..r).all(|i| {
            let v = m.basis_vector(i);
            let img = ext.apply(&v);
            let want = m.to_ambient(&g.apply(&Vector::unit(r, i)));
            img == want
        }));
        out.push(ext);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn beauville_plane() -> Lattice {
        Lattice::from_i64(&[[6, 0], [0, -4]]).unwrap()
    }

    #[test]
    fn minus_identity_on_u() {
        let u = Lattice::hyperbolic_plane();
        let g = make_isometry(&u, IntMatrix::identity(2).neg()).unwrap();
        assert_eq!(g.order(), 2);
        let (t, s) = invariant_and_coinvariant(&u, &[g]).unwrap();
        assert_eq!(t.rank(), 0);
        assert_eq!(s.rank(), 2);
    }

    #[test]
    fn shear_is_not_an_isometry() {
        let u = Lattice::hyperbolic_plane();
        assert_eq!(make_isometry(&u, IntMatrix::from_i64(&[[1, 1], [0, 1]])).unwrap_err(), Error::NotAnIsometry);
    }

    #[test]
    fn beauville_involution() {
        let l = beauville_plane();
        let g = make_isometry(&l, IntMatrix::from_i64(&[[5, 4], [-6, -5]])).unwrap();
        assert_eq!(g.order(), 2);
        let r = negated_reflection(&l, &Vector::from_i64(&[1, -1])).unwrap();
        assert_eq!(r, g);
        let (t, s) = invariant_and_coinvariant(&l, &[g.clone()]).unwrap();
        assert_eq!(t.gram(), IntMatrix::from_i64(&[[2]]));
        assert_eq!(s.gram(), IntMatrix::from_i64(&[[-12]]));
        let act = disc_action(&g).unwrap();
        assert_eq!(act.classification, DiscClass::MinusIdentity);
    }

    #[test]
    fn reflection_swaps_hyperbolic_pair() {
        let u = Lattice::hyperbolic_plane();
        let r = reflection(&u, &Vector::from_i64(&[1, -1])).unwrap();
        assert_eq!(r.matrix(), &IntMatrix::from_i64(&[[0, 1], [1, 0]]));
    }

    #[test]
    fn non_integral_reflection() {
        let l = Lattice::from_i64(&[[4]]).unwrap();
        assert!(reflection(&l, &Vector::from_i64(&[1])).is_ok());
        let u = Lattice::hyperbolic_plane();
        assert_eq!(
            reflection(&u, &Vector::from_i64(&[1, 2])).unwrap_err(),
            Error::NonIntegralReflection { square: int(4) }
        );
    }

    #[test]
    fn a2_rotation() {
        let a2 = Lattice::from_i64(&[[2, -1], [-1, 2]]).unwrap();
        let g = make_isometry(&a2, IntMatrix::from_i64(&[[0, -1], [1, -1]])).unwrap();
        assert_eq!(g.order(), 3);
        let (t, s) = invariant_and_coinvariant(&a2, &[g]).unwrap();
        assert_eq!((t.rank(), s.rank()), (0, 2));
    }

    #[test]
    fn minus_identity_on_two_torsion_acts_trivially() {
        let l = Lattice::from_i64(&[[0, 1, 0], [1, 0, 0], [0, 0, -2]]).unwrap();
        let g = make_isometry(&l, IntMatrix::identity(3).neg()).unwrap();
        assert_eq!(disc_action(&g).unwrap().classification, DiscClass::Trivial);
    }

    #[test]
    fn extension_from_u_summand() {
        let l = Lattice::from_i64(&[[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]).unwrap();
        let m = l.sublattice(IntMatrix::from_i64(&[[1, 0, 0, 0], [0, 1, 0, 0]])).unwrap();
        let g = make_isometry(&m.lattice().unwrap(), IntMatrix::identity(2).neg()).unwrap();
        let ext = extend_to_unimodular(&m, &[g]).unwrap();
        let want = IntMatrix::from_i64(&[[-1, 0, 0, 0], [0, -1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]);
        assert_eq!(ext[0].matrix(), &want);
    }

    #[test]
    fn nontrivial_disc_action_blocks_extension() {
        let u = Lattice::hyperbolic_plane();
        let m = u.sublattice(IntMatrix::from_i64(&[[1, 2]])).unwrap();
        let g = make_isometry(&m.lattice().unwrap(), IntMatrix::identity(1).neg()).unwrap();
        assert_eq!(disc_action(&g).unwrap().classification, DiscClass::MinusIdentity);
        assert_eq!(extend_to_unimodular(&m, &[g]).unwrap_err(), Error::DiscActionNontrivial);
    }
}
