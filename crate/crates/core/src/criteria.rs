//! Embeddings into Mukai lattices, hyperbolic-plane detection, Mukai vector
//! arithmetic and the numerical criteria built on them.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::catalog::DeformationType;
use crate::disc::{discriminant_form, primitive_gluings, DEFAULT_GROUP_CAP};
use crate::error::{Error, Result};
use crate::isometry::DiscClass;
use crate::lattice::{orthogonal_complement, Lattice, Sublattice, Vector};
use crate::matrix::{content, xgcd, IntMatrix};
use crate::shortvec::{vectors_of_norm, DEFAULT_VECTOR_CAP};
use crate::verdict::{SearchBound, Verdict};

/// Bound on the number of candidate vectors examined by [`contains_u`].
pub const DEFAULT_CANDIDATE_CAP: u64 = 1_000_000;
const RESIDUE_SCAN_CAP: u64 = 1 << 20;

fn int(x: i64) -> BigInt {
    BigInt::from(x)
}

fn u_block(g: &IntMatrix, at: usize) -> bool {
    g[(at, at)].is_zero() && g[(at + 1, at + 1)].is_zero() && g[(at, at + 1)].is_one()
}

/// `v = e + (s/2) f` in the first hyperbolic plane of a unimodular lattice,
/// together with `v^⊥`.
pub fn embed_corank1(lambda: &Lattice, s: &BigInt) -> Result<(Vector, Sublattice)> {
    if s.is_odd() {
        return Err(Error::OddSquare(s.clone()));
    }
    if s.is_zero() {
        return Err(Error::InvalidParameter("square 0 gives a degenerate complement".into()));
    }
    if !lambda.is_unimodular() {
        return Err(Error::NotUnimodular);
    }
    let g = lambda.gram();
    if lambda.rank() < 2 || !u_block(g, 0) || (2..lambda.rank()).any(|j| !g[(0, j)].is_zero() || !g[(1, j)].is_zero()) {
        return Err(Error::InvalidParameter("lattice does not start with a hyperbolic plane".into()));
    }
    let mut coords = vec![BigInt::zero(); lambda.rank()];
    coords[0] = BigInt::one();
    coords[1] = s / 2;
    let v = Vector(coords);
    let line = lambda.sublattice(IntMatrix::from_rows(vec![v.0.clone()])?)?;
    Ok((v, orthogonal_complement(&line)))
}

/// Checks that the first four coordinates span `U ⊕ U`, orthogonal to the rest.
fn has_two_u(l: &Lattice) -> bool {
    let g = l.gram();
    let n = l.rank();
    n >= 4
        && u_block(g, 0)
        && u_block(g, 2)
        && (0..2).all(|i| (2..4).all(|j| g[(i, j)].is_zero()))
        && (0..4).all(|i| (4..n).all(|j| g[(i, j)].is_zero()))
}

/// The hypothesis of the Eichler criterion: `v² = w²` and
/// `[v/div(v)] = [w/div(w)]` in `A_L`. Needs `L = U ⊕ U ⊕ L'` with the two
/// planes on the first four coordinates.
pub fn eichler_equivalent(l: &Lattice, v: &Vector, w: &Vector) -> Result<bool> {
    if !has_two_u(l) {
        return Err(Error::MissingU2);
    }
    l.check_vector(v)?;
    l.check_vector(w)?;
    if l.norm(v) != l.norm(w) {
        return Ok(false);
    }
    let d = discriminant_form(l)?;
    let class = |x: &Vector| -> Result<Vec<BigInt>> {
        let div = l.divisibility(x)?;
        let lifted: Vec<BigRational> = x.0.iter().map(|c| BigRational::new(c.clone(), div.clone())).collect();
        d.class_of(&lifted)
    };
    Ok(class(v)? == class(w)?)
}

/// Reasons why a lattice cannot contain `U` as a direct summand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UCertificate {
    Definite,
    /// Every pairing is divisible by `m > 1`, so every divisibility is at least `m`.
    ScaledGram { m: BigInt },
    /// `l(A_L) > rank − 2`, while `L = U ⊕ K` would force `l(A_L) = l(A_K) ≤ rank − 2`.
    LengthObstruction { length: usize, rank: usize },
    /// Every isotropic vector is congruent mod `p` to a vector `v` with
    /// `G v ≡ 0 mod p`, so has divisibility divisible by `p`.
    RepresentedValues { p: u64 },
}

impl UCertificate {
    pub fn tag(&self) -> &'static str {
        match self {
            UCertificate::Definite => "definite",
            UCertificate::ScaledGram { .. } => "scaled-gram",
            UCertificate::LengthObstruction { .. } => "length-obstruction",
            UCertificate::RepresentedValues { .. } => "represented-values",
        }
    }

    /// Re-runs the check behind the certificate.
    pub fn recheck(&self, l: &Lattice) -> bool {
        match self {
            UCertificate::Definite => l.is_definite(),
            UCertificate::ScaledGram { m } => *m > BigInt::one() && l.gram().entries().all(|x| x.is_multiple_of(m)),
            UCertificate::LengthObstruction { length, rank } => {
                *rank == l.rank() && l.invariant_factors().len() == *length && *length + 2 > *rank
            }
            UCertificate::RepresentedValues { p } => residue_scan(l, *p) == Some(true),
        }
    }
}

impl fmt::Display for UCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UCertificate::Definite => write!(f, "definite"),
            UCertificate::ScaledGram { m } => write!(f, "scaled-gram (all pairings divisible by {m})"),
            UCertificate::LengthObstruction { length, rank } => {
                write!(f, "length-obstruction (l(A) = {length} > rank - 2 = {})", *rank as i64 - 2)
            }
            UCertificate::RepresentedValues { p } => write!(f, "represented-values (isotropic vectors have divisibility divisible by {p})"),
        }
    }
}

/// A hyperbolic pair `e, f` and the complement `K` with `L = U ⊕ K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct USplit {
    pub e: Vector,
    pub f: Vector,
    pub complement: Sublattice,
}

impl USplit {
    pub fn complement_lattice(&self) -> Lattice {
        self.complement.lattice().expect("complement of a hyperbolic plane is nondegenerate")
    }

    /// `e² = f² = 0`, `(e, f) = 1`, and `e, f` with the complement basis form a basis of `L`.
    pub fn validate(&self, l: &Lattice) -> bool {
        let k = self.complement.basis();
        let full = IntMatrix::from_rows(vec![self.e.0.clone(), self.f.0.clone()]).unwrap().vstack(k);
        l.norm(&self.e).is_zero()
            && l.norm(&self.f).is_zero()
            && l.pairing(&self.e, &self.f).is_one()
            && full.nrows() == l.rank()
            && full.determinant().abs().is_one()
            && (0..k.nrows()).all(|i| {
                let v = Vector(k.row(i).to_vec());
                l.pairing(&v, &self.e).is_zero() && l.pairing(&v, &self.f).is_zero()
            })
    }
}

pub type UVerdict = Verdict<USplit, UCertificate>;

/// Completes an isotropic vector of divisibility 1 to a hyperbolic pair and
/// splits off the plane.
pub fn split_u(l: &Lattice, e: &Vector) -> Result<Option<USplit>> {
    l.check_vector(e)?;
    if !l.norm(e).is_zero() || e.is_zero() {
        return Ok(None);
    }
    let pairings = l.pairings_with_basis(e);
    let (g, coeffs) = xgcd(&pairings);
    if !g.is_one() {
        return Ok(None);
    }
    let mut x = Vector(coeffs);
    if l.norm(&x).is_odd() {
        // shift by a vector of e^⊥ with odd square, if there is one
        let line = l.sublattice(IntMatrix::from_rows(vec![e.0.clone()])?)?;
        let perp = orthogonal_complement(&line);
        match (0..perp.rank()).map(|i| perp.basis_vector(i)).find(|y| l.norm(y).is_odd()) {
            Some(y) => x = x.add(&y),
            None => return Ok(None),
        }
    }
    // f = x − (x²/2) e
    let half = l.norm(&x) / 2;
    let f = x.sub(&e.scaled(&half));
    let plane = l.sublattice(IntMatrix::from_rows(vec![e.0.clone(), f.0.clone()])?)?;
    let complement = orthogonal_complement(&plane);
    let split = USplit { e: e.clone(), f, complement };
    let k = split.complement_lattice();
    assert_eq!(k.determinant(), -l.determinant(), "det(U ⊕ K) = −det K");
    assert!(split.validate(l), "hyperbolic splitting");
    Ok(Some(split))
}

fn syntactic_u(l: &Lattice) -> Option<Vector> {
    let g = l.gram();
    (0..l.rank()).find(|&i| g[(i, i)].is_zero() && content(g.row(i)).is_one()).map(|i| Vector::unit(l.rank(), i))
}

/// `Some(true)` when the mod-`p` scan certifies that no isotropic vector has
/// divisibility prime to `p`; `None` when the scan is too large.
fn residue_scan(l: &Lattice, p: u64) -> Option<bool> {
    let n = l.rank();
    let total = (p as u128).checked_pow(n as u32)?;
    if total > RESIDUE_SCAN_CAP as u128 || n == 0 {
        return None;
    }
    let pm = p as i128;
    let modulus = if l.is_even() { 2 * pm } else { pm };
    let g: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| l.gram()[(i, j)].mod_floor(&BigInt::from(2 * p)).to_i128().unwrap()).collect())
        .collect();
    let mut x = vec![0i128; n];
    for _ in 0..total {
        let gx: Vec<i128> = (0..n).map(|i| (0..n).map(|j| g[i][j] * x[j]).sum::<i128>()).collect();
        let sq: i128 = (0..n).map(|i| x[i] * gx[i]).sum::<i128>();
        if sq.rem_euclid(modulus) == 0 && gx.iter().any(|v| v.rem_euclid(pm) != 0) {
            return Some(false);
        }
        for xi in x.iter_mut() {
            *xi += 1;
            if *xi < pm {
                break;
            }
            *xi = 0;
        }
    }
    Some(true)
}

fn prime_divisors(n: &BigInt) -> Vec<u64> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut p = 2u64;
    while BigInt::from(p * p) <= n && p < 1_000_000 {
        let bp = BigInt::from(p);
        if n.is_multiple_of(&bp) {
            out.push(p);
            while n.is_multiple_of(&bp) {
                n /= &bp;
            }
        }
        p += 1;
    }
    if n > BigInt::one() {
        if let Some(q) = n.to_u64() {
            out.push(q);
        }
    }
    out
}

/// Certificates that rule out a `U` summand, in a fixed order.
pub fn u_certificate(l: &Lattice) -> Option<UCertificate> {
    if l.is_definite() || l.rank() < 2 {
        return Some(UCertificate::Definite);
    }
    let m = content(&l.gram().entries().cloned().collect::<Vec<_>>());
    if m > BigInt::one() {
        return Some(UCertificate::ScaledGram { m });
    }
    let length = l.invariant_factors().len();
    if length + 2 > l.rank() {
        return Some(UCertificate::LengthObstruction { length, rank: l.rank() });
    }
    for p in prime_divisors(&l.determinant()) {
        if residue_scan(l, p) == Some(true) {
            return Some(UCertificate::RepresentedValues { p });
        }
    }
    None
}

/// Decides whether `L ≅ U ⊕ K`: a hyperbolic pair read off the basis, then
/// the fixed certificates, then a search for an isotropic vector of
/// divisibility 1 with coordinates up to `height`.
pub fn contains_u(l: &Lattice, height: u64) -> Result<UVerdict> {
    contains_u_with_hints(l, &[], height, DEFAULT_CANDIDATE_CAP)
}

/// As [`contains_u`], trying the given isotropic vectors first.
pub fn contains_u_with_hints(l: &Lattice, hints: &[Vector], height: u64, cap: u64) -> Result<UVerdict> {
    if l.is_degenerate() {
        return Err(Error::DegenerateLattice);
    }
    for e in hints.iter().cloned().chain(syntactic_u(l)) {
        if let Some(split) = split_u(l, &e)? {
            return Ok(Verdict::Yes(split));
        }
    }
    if let Some(cert) = u_certificate(l) {
        debug_assert!(cert.recheck(l));
        return Ok(Verdict::No(cert));
    }
    bounded_u_search(l, height, cap)
}

fn bounded_u_search(l: &Lattice, height: u64, cap: u64) -> Result<UVerdict> {
    let n = l.rank();
    let g: Option<Vec<Vec<i128>>> =
        (0..n).map(|i| (0..n).map(|j| l.gram()[(i, j)].to_i64().map(i128::from)).collect()).collect();
    let unknown = |c: u64| Ok(Verdict::Unknown(SearchBound { height, candidates: c }));
    let Some(g) = g else {
        return unknown(0);
    };
    let mut examined = 0u64;
    for h in 1..=height as i128 {
        let side = 2 * h + 1;
        let shell = (side as u128).checked_pow(n as u32).map(|t| t - ((side - 2) as u128).pow(n as u32));
        match shell {
            Some(s) if (examined as u128) + s <= cap as u128 => {}
            _ => return unknown(examined),
        }
        let mut x = vec![-h; n];
        loop {
            let on_shell = x.iter().any(|c| c.abs() == h);
            let first = x.iter().find(|c| **c != 0).copied().unwrap_or(0);
            if on_shell && first > 0 {
                examined += 1;
                let gx: Vec<i128> = (0..n).map(|i| (0..n).map(|j| g[i][j] * x[j]).sum()).collect();
                let sq: i128 = (0..n).map(|i| x[i] * gx[i]).sum();
                if sq == 0 && gx.iter().fold(0i128, |a, &b| a.gcd(&b)) == 1 {
                    let e = Vector(x.iter().map(|&c| BigInt::from(c)).collect());
                    if let Some(split) = split_u(l, &e)? {
                        return Ok(Verdict::Yes(split));
                    }
                }
            }
            let mut i = 0;
            loop {
                if i == n {
                    break;
                }
                x[i] += 1;
                if x[i] <= h {
                    break;
                }
                x[i] = -h;
                i += 1;
            }
            if i == n {
                break;
            }
        }
    }
    unknown(examined)
}

/// A Mukai vector `(r, l, s)` with `l` in a Néron–Severi lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MukaiVector {
    pub r: BigInt,
    pub l: Vector,
    pub s: BigInt,
    /// Whether `l` is the class of an effective divisor; supplied by the caller.
    pub l_effective: bool,
    pub ns: Lattice,
}

impl MukaiVector {
    pub fn new(ns: Lattice, r: BigInt, l: Vector, s: BigInt, l_effective: bool) -> Result<Self> {
        ns.check_vector(&l)?;
        Ok(MukaiVector { r, l, s, l_effective, ns })
    }

    pub fn square(&self) -> BigInt {
        self.ns.norm(&self.l) - BigInt::from(2) * &self.r * &self.s
    }

    /// `−v`. For `l ≠ 0` exactly one of `l` and `−l` is taken to be effective.
    pub fn neg(&self) -> MukaiVector {
        MukaiVector {
            r: -&self.r,
            l: self.l.neg(),
            s: -&self.s,
            l_effective: if self.l.is_zero() { self.l_effective } else { !self.l_effective },
            ns: self.ns.clone(),
        }
    }
}

/// `(v, w) = l₁·l₂ − r₁s₂ − r₂s₁`.
pub fn mukai_pairing(v: &MukaiVector, w: &MukaiVector) -> Result<BigInt> {
    if v.ns != w.ns {
        return Err(Error::GramMismatch);
    }
    Ok(v.ns.pairing(&v.l, &w.l) - &v.r * &w.s - &w.r * &v.s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MukaiClass {
    Positive,
    NegativeOfPositive,
    Neither,
}

impl MukaiClass {
    pub fn tag(&self) -> &'static str {
        match self {
            MukaiClass::Positive => "positive",
            MukaiClass::NegativeOfPositive => "negative-of-positive",
            MukaiClass::Neither => "neither",
        }
    }
}

fn is_positive(v: &MukaiVector) -> bool {
    v.square() >= BigInt::from(2)
        && (v.r.is_positive()
            || (v.r.is_zero() && !v.l.is_zero() && v.l_effective)
            || (v.r.is_zero() && v.l.is_zero() && v.s.is_positive()))
}

pub fn classify_mukai_vector(v: &MukaiVector) -> MukaiClass {
    if is_positive(v) {
        MukaiClass::Positive
    } else if is_positive(&v.neg()) {
        MukaiClass::NegativeOfPositive
    } else {
        MukaiClass::Neither
    }
}

/// Which Mukai lattice the algebraic part lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MukaiTarget {
    L24,
    L8,
}

/// `Yes` means the manifold is a numerical moduli space.
pub fn numerical_moduli_check(algebraic_part: &Lattice, _target: MukaiTarget, height: u64) -> Result<UVerdict> {
    contains_u(algebraic_part, height)
}

/// Candidates for the algebraic part of the Mukai lattice: primitive gluings
/// of the Picard lattice with the rank-one complement of `H²`.
pub fn algebraic_part_candidates(pic: &Lattice, t: DeformationType) -> Result<Vec<Lattice>> {
    let w = Lattice::rank_one(t.complement_square()?)?;
    Ok(primitive_gluings(pic, &w, None, DEFAULT_GROUP_CAP)?.into_iter().map(|g| g.lattice).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Symplectic,
    NonSymplectic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Final {
    Induced,
    NotInduced,
    Unknown,
}

impl Final {
    pub fn tag(&self) -> &'static str {
        match self {
            Final::Induced => "Induced",
            Final::NotInduced => "NotInduced",
            Final::Unknown => "Unknown",
        }
    }
}

#[derive(Clone, Debug)]
pub struct InducedReport {
    pub disc_action: DiscClass,
    pub candidates: Vec<Lattice>,
    pub verdicts: Vec<UVerdict>,
    /// Number of vectors of square −2 in the co-invariant lattice (symplectic mode).
    pub symplectic_minus2: Option<usize>,
    pub final_verdict: Final,
}

#[derive(Clone, Debug)]
pub struct InducedQuery<'a> {
    pub x_type: DeformationType,
    pub t_x: &'a Lattice,
    pub order: u64,
    pub mode: Mode,
    pub disc_action: DiscClass,
    /// The co-invariant lattice `S_G(X)`, needed for the symplectic count.
    pub coinvariant: Option<&'a Lattice>,
    pub height: u64,
    pub group_cap: u64,
    pub candidate_cap: u64,
}

/// The numerical criterion for a group of prime order to be induced.
pub fn induced_check(q: &InducedQuery<'_>) -> Result<InducedReport> {
    let w = match q.x_type {
        DeformationType::K3n(_) | DeformationType::Kum(_) => Lattice::rank_one(q.x_type.complement_square()?)?,
        other => return Err(Error::UnsupportedType(other.to_string())),
    };
    let symplectic_minus2 = match (q.mode, q.coinvariant) {
        (Mode::Symplectic, Some(s)) if s.rank() > 0 => {
            if s.signature().positive != 0 || !s.is_definite() {
                return Err(Error::InvalidParameter("co-invariant lattice must be negative definite".into()));
            }
            Some(vectors_of_norm(s, &int(-2), DEFAULT_VECTOR_CAP)?.len())
        }
        (Mode::Symplectic, Some(_)) => Some(0),
        _ => None,
    };
    if q.disc_action != DiscClass::Trivial {
        return Ok(InducedReport {
            disc_action: q.disc_action,
            candidates: vec![],
            verdicts: vec![],
            symplectic_minus2,
            final_verdict: Final::NotInduced,
        });
    }
    let gluings = primitive_gluings(q.t_x, &w, Some(q.order), q.group_cap)?;
    let hints_in_t: Vec<Vector> = syntactic_u(q.t_x).into_iter().collect();
    let mut candidates = Vec::new();
    let mut verdicts = Vec::new();
    for g in gluings {
        // T's own hyperbolic vectors, rewritten in the basis of the gluing
        let inv = g.basis.inverse().expect("gluing basis is invertible").transpose();
        let hints: Vec<Vector> = hints_in_t
            .iter()
            .filter_map(|e| {
                let mut full: Vec<BigRational> = e.0.iter().map(|c| BigRational::from_integer(c.clone())).collect();
                full.extend((0..w.rank()).map(|_| BigRational::zero()));
                let coords = inv.mul_vec(&full);
                coords.iter().all(|c| c.is_integer()).then(|| Vector(coords.into_iter().map(|c| c.to_integer()).collect()))
            })
            .collect();
        let v = contains_u_with_hints(&g.lattice, &hints, q.height, q.candidate_cap)?;
        candidates.push(g.lattice);
        verdicts.push(v);
    }
    let final_verdict = if verdicts.iter().any(Verdict::is_yes) {
        Final::Induced
    } else if verdicts.iter().all(Verdict::is_no) {
        Final::NotInduced
    } else {
        Final::Unknown
    };
    Ok(InducedReport { disc_action: q.disc_action, candidates, verdicts, symplectic_minus2, final_verdict })
}
