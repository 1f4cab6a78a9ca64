//! Integer lattices given by a Gram matrix, sublattices and vectors.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::{content, inertia, IntMatrix};

/// A coordinate vector with respect to the basis of some lattice.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vector(pub Vec<BigInt>);

impl Vector {
    pub fn from_i64(v: &[i64]) -> Self {
        Vector(v.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zero(n: usize) -> Self {
        Vector(vec![BigInt::zero(); n])
    }

    /// The `i`-th standard basis vector of length `n`.
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zero(n);
        v.0[i] = BigInt::one();
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    /// gcd of the coordinates.
    pub fn content(&self) -> BigInt {
        content(&self.0)
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    pub fn scaled(&self, k: &BigInt) -> Vector {
        Vector(self.0.iter().map(|x| x * k).collect())
    }

    pub fn add(&self, other: &Vector) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Vector {
        Vector(self.0.iter().map(|x| -x).collect())
    }

    /// Largest absolute coordinate.
    pub fn height(&self) -> BigInt {
        self.0.iter().map(|x| x.abs()).max().unwrap_or_default()
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
}

impl Signature {
    pub fn is_definite(&self) -> bool {
        self.positive == 0 || self.negative == 0
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.positive, self.negative)
    }
}

/// A lattice: a free Z-module with a symmetric integral bilinear form,
/// represented by its Gram matrix in a fixed basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    gram: IntMatrix,
    degenerate: bool,
}

impl Lattice {
    /// Builds a nondegenerate lattice.
    pub fn new(gram: IntMatrix) -> Result<Self> {
        let l = Self::with_radical(gram)?;
        if l.degenerate {
            return Err(Error::DegenerateLattice);
        }
        Ok(l)
    }

    /// Builds a lattice whose Gram matrix may be singular. Most operations
    /// refuse such lattices; use [`Lattice::radical_quotient`] to get a
    /// nondegenerate one.
    pub fn with_radical(gram: IntMatrix) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::NotSquare { rows: gram.nrows(), cols: gram.ncols() });
        }
        if !gram.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        let degenerate = gram.determinant().is_zero();
        Ok(Lattice { gram, degenerate })
    }

    pub fn from_i64<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        Self::new(IntMatrix::from_i64(rows))
    }

    /// The rank-1 lattice `<q>`.
    pub fn rank_one(q: impl Into<BigInt>) -> Result<Self> {
        Self::new(IntMatrix::diagonal(&[q.into()]))
    }

    /// The hyperbolic plane U.
    pub fn hyperbolic_plane() -> Self {
        Self::from_i64(&[[0, 1], [1, 0]]).unwrap()
    }

    /// The zero lattice.
    pub fn zero() -> Self {
        Lattice { gram: IntMatrix::zeros(0, 0), degenerate: false }
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.nrows()
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.gram[(i, i)].is_even())
    }

    pub fn determinant(&self) -> BigInt {
        self.gram.determinant()
    }

    pub fn is_unimodular(&self) -> bool {
        self.determinant().abs().is_one()
    }

    pub fn signature(&self) -> Signature {
        let (positive, negative, _) = inertia(&self.gram);
        Signature { positive, negative }
    }

    pub fn is_definite(&self) -> bool {
        !self.degenerate && self.signature().is_definite()
    }

    pub fn pairing(&self, x: &Vector, y: &Vector) -> BigInt {
        let gy = self.gram.mul_vec(&y.0);
        x.0.iter().zip(&gy).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self, x: &Vector) -> BigInt {
        self.pairing(x, x)
    }

    /// Pairings of `v` with the basis vectors, i.e. `G v`.
    pub fn pairings_with_basis(&self, v: &Vector) -> Vec<BigInt> {
        self.gram.mul_vec(&v.0)
    }

    /// Invariant factors (> 1) of the discriminant group `L^∨/L`.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.gram.smith().diag.into_iter().filter(|d| !d.is_one() && !d.is_zero()).collect()
    }

    pub fn check_vector(&self, v: &Vector) -> Result<()> {
        if v.len() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), found: v.len() });
        }
        Ok(())
    }

    fn require_nondegenerate(&self) -> Result<()> {
        if self.degenerate {
            Err(Error::DegenerateLattice)
        } else {
            Ok(())
        }
    }

    /// Quotient by the radical `{x : (x, L) = 0}`; the result is nondegenerate.
    pub fn radical_quotient(&self) -> Lattice {
        if !self.degenerate {
            return self.clone();
        }
        let radical = self.gram.kernel();
        // A complement to the saturated radical: the rows of V⁻¹ beyond the radical's rank.
        let s = radical.smith();
        let n = self.rank();
        let comp = s.v_inv.select_rows(s.rank..n);
        let gram = comp.mul(&self.gram).mul(&comp.transpose());
        Lattice::new(gram).expect("quotient by the radical is nondegenerate")
    }

    /// Orthogonal direct sum with block-diagonal Gram matrix.
    pub fn direct_sum(&self, other: &Lattice) -> Lattice {
        Lattice { gram: self.gram.block_diag(&other.gram), degenerate: self.degenerate || other.degenerate }
    }

    /// `self^{⊕k}`.
    pub fn power(&self, k: usize) -> Lattice {
        (0..k).fold(Lattice::zero(), |acc, _| acc.direct_sum(self))
    }

    /// `L(n)`: the Gram matrix multiplied by `n`.
    pub fn rescale(&self, n: &BigInt) -> Result<Lattice> {
        if n.is_zero() {
            return Err(Error::InvalidParameter("rescaling factor must be nonzero".into()));
        }
        Ok(Lattice { gram: self.gram.scaled(n), degenerate: self.degenerate })
    }

    /// The positive generator of `(v, L)`.
    pub fn divisibility(&self, v: &Vector) -> Result<BigInt> {
        self.check_vector(v)?;
        if v.is_zero() {
            return Err(Error::ZeroVector);
        }
        let d = content(&self.pairings_with_basis(v));
        if d.is_zero() {
            return Err(Error::DegenerateLattice);
        }
        Ok(d)
    }

    /// Sublattice spanned by the given rows (in this lattice's coordinates).
    pub fn sublattice(&self, basis: IntMatrix) -> Result<Sublattice> {
        Sublattice::new(self.clone(), basis)
    }

    pub fn info(&self) -> Result<LatticeInfo> {
        lattice_info(self)
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rank())
            .map(|i| self.gram.row(i).iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "gram[{}]", rows.join(";"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeInfo {
    pub rank: usize,
    pub signature: Signature,
    pub determinant: BigInt,
    pub even: bool,
    /// Invariant factors of the discriminant group (all > 1).
    pub disc_invariant_factors: Vec<BigInt>,
}

impl LatticeInfo {
    pub fn disc_length(&self) -> usize {
        self.disc_invariant_factors.len()
    }

    pub fn disc_order(&self) -> BigInt {
        self.disc_invariant_factors.iter().product()
    }
}

/// Rank, signature, determinant, parity and discriminant group shape.
pub fn lattice_info(l: &Lattice) -> Result<LatticeInfo> {
    l.require_nondegenerate()?;
    Ok(LatticeInfo {
        rank: l.rank(),
        signature: l.signature(),
        determinant: l.determinant(),
        even: l.is_even(),
        disc_invariant_factors: l.invariant_factors(),
    })
}

/// A sublattice of an ambient lattice, given by basis rows in ambient coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sublattice {
    ambient: Lattice,
    basis: IntMatrix,
    primitive: bool,
}

impl Sublattice {
    pub fn new(ambient: Lattice, basis: IntMatrix) -> Result<Self> {
        if basis.ncols() != ambient.rank() {
            return Err(Error::DimensionMismatch { expected: ambient.rank(), found: basis.ncols() });
        }
        if basis.rank() != basis.nrows() {
            return Err(Error::DependentRows);
        }
        let primitive = basis.nrows() == 0 || basis.row_saturation() == basis.hermite();
        Ok(Sublattice { ambient, basis, primitive })
    }

    pub fn ambient(&self) -> &Lattice {
        &self.ambient
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.nrows()
    }

    pub fn is_primitive(&self) -> bool {
        self.primitive
    }

    pub fn basis_vector(&self, i: usize) -> Vector {
        Vector(self.basis.row(i).to_vec())
    }

    /// Gram matrix of the basis rows, `B G Bᵀ`.
    pub fn gram(&self) -> IntMatrix {
        self.basis.mul(self.ambient.gram()).mul(&self.basis.transpose())
    }

    /// The sublattice as a lattice in its own right. Sublattices of a
    /// nondegenerate lattice may themselves be degenerate (isotropic lines).
    pub fn lattice(&self) -> Result<Lattice> {
        Lattice::new(self.gram())
    }

    /// Maps coordinates with respect to the sublattice basis to ambient coordinates.
    pub fn to_ambient(&self, coords: &Vector) -> Vector {
        Vector(self.basis.vec_mul(&coords.0))
    }

    pub fn contains(&self, v: &Vector) -> bool {
        let stacked = self.basis.vstack(&IntMatrix::from_rows(vec![v.0.clone()]).unwrap());
        if stacked.rank() > self.rank() {
            return false;
        }
        stacked.hermite() == self.basis.hermite()
    }
}

/// `span_Q(S) ∩ L`, marked primitive.
pub fn saturate(s: &Sublattice) -> Sublattice {
    if s.rank() == 0 {
        return s.clone();
    }
    Sublattice { ambient: s.ambient.clone(), basis: s.basis.row_saturation(), primitive: true }
}

/// `{x ∈ L : (x, S) = 0}`; always primitive.
pub fn orthogonal_complement(s: &Sublattice) -> Sublattice {
    let n = s.ambient.rank();
    let basis = if s.rank() == 0 {
        IntMatrix::identity(n)
    } else {
        s.basis.mul(s.ambient.gram()).kernel()
    };
    Sublattice { ambient: s.ambient.clone(), basis, primitive: true }
}
