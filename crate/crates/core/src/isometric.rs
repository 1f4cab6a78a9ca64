//! Isometry testing for lattices of small rank.
//!
//! Invariants are compared first. Rank 2 indefinite lattices are then decided
//! by reduction of binary forms, definite lattices by backtracking over short
//! vectors, and anything else by a bounded search for a base change.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::disc::{discriminant_form, DEFAULT_GROUP_CAP};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, Vector};
use crate::matrix::{xgcd, IntMatrix};
use crate::shortvec::{vectors_of_norm, DEFAULT_VECTOR_CAP};
use crate::verdict::{SearchBound, Verdict};

const SEARCH_CAP: u64 = 1_000_000;
const RESIDUE_CAP: u64 = 1 << 20;

/// Why two lattices are not isometric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Distinction {
    Signature,
    Parity,
    Determinant,
    RepresentedValues { modulus: u64 },
    DiscForm,
    /// Exhaustive search over all candidate images found nothing.
    Exhausted,
}

impl fmt::Display for Distinction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distinction::Signature => write!(f, "signature"),
            Distinction::Parity => write!(f, "parity"),
            Distinction::Determinant => write!(f, "determinant"),
            Distinction::RepresentedValues { modulus } => write!(f, "represented values mod {modulus}"),
            Distinction::DiscForm => write!(f, "discriminant form"),
            Distinction::Exhausted => write!(f, "exhaustive search"),
        }
    }
}

/// `Yes(P)` means `Pᵀ G_L P = G_M`; the columns of `P` are the images in `L`
/// of the basis of `M`.
pub type IsometryVerdict = Verdict<IntMatrix, Distinction>;

pub fn is_isometric_small(l: &Lattice, m: &Lattice, bound: u64) -> Result<IsometryVerdict> {
    if l.rank() != m.rank() {
        return Err(Error::RankMismatch { left: l.rank(), right: m.rank() });
    }
    if l.signature() != m.signature() {
        return Ok(Verdict::No(Distinction::Signature));
    }
    if l.is_even() != m.is_even() {
        return Ok(Verdict::No(Distinction::Parity));
    }
    if l.determinant() != m.determinant() {
        return Ok(Verdict::No(Distinction::Determinant));
    }
    if let Some(modulus) = represented_values_differ(l, m) {
        return Ok(Verdict::No(Distinction::RepresentedValues { modulus }));
    }
    if l.is_even() && l.rank() > 0 {
        let dl = discriminant_form(l)?;
        let dm = discriminant_form(m)?;
        match dl.form().is_isometric(dm.form(), DEFAULT_GROUP_CAP) {
            Ok(false) => return Ok(Verdict::No(Distinction::DiscForm)),
            Ok(true) | Err(Error::CapExceeded { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    let n = l.rank();
    let verdict = if n == 0 {
        Verdict::Yes(IntMatrix::identity(0))
    } else if n == 1 {
        // equal determinants already force equal Gram matrices
        Verdict::Yes(IntMatrix::identity(1))
    } else if n == 2 && !l.is_definite() {
        binary_isometry(l.gram(), m.gram())
    } else if l.is_definite() {
        definite_isometry(l, m)?
    } else {
        bounded_isometry(l, m, bound)
    };
    if let Verdict::Yes(p) = &verdict {
        assert_eq!(&p.transpose().mul(l.gram()).mul(p), m.gram(), "isometry witness");
    }
    Ok(verdict)
}

fn residue_moduli(l: &Lattice) -> Vec<u64> {
    let mut out = vec![4u64, 8, 3, 9, 5];
    if let Some(d) = l.determinant().abs().to_u64() {
        out.extend([d, 2 * d, 4 * d]);
    }
    let mut seen = BTreeSet::new();
    out.retain(|&m| m >= 2 && seen.insert(m));
    out
}

/// The set `{ xᵀ G x mod m : x ∈ (Z/m)ⁿ }`, if small enough to enumerate.
pub fn represented_values(g: &IntMatrix, m: u64) -> Option<BTreeSet<u64>> {
    let n = g.nrows();
    let total = (m as u128).checked_pow(n as u32)?;
    if total > RESIDUE_CAP as u128 {
        return None;
    }
    let mi = m as i128;
    let gm: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| g[(i, j)].mod_floor(&BigInt::from(m)).to_i128().unwrap()).collect())
        .collect();
    let mut out = BTreeSet::new();
    let mut x = vec![0i128; n];
    for _ in 0..total {
        let mut s = 0i128;
        for i in 0..n {
            if x[i] == 0 {
                continue;
            }
            let mut row = 0i128;
            for j in 0..n {
                row = (row + gm[i][j] * x[j]) % mi;
            }
            s = (s + x[i] * row) % mi;
        }
        out.insert(s as u64);
        for xi in x.iter_mut() {
            *xi += 1;
            if *xi < mi {
                break;
            }
            *xi = 0;
        }
    }
    Some(out)
}

fn represented_values_differ(l: &Lattice, m: &Lattice) -> Option<u64> {
    residue_moduli(l).into_iter().find(|&md| {
        match (represented_values(l.gram(), md), represented_values(m.gram(), md)) {
            (Some(a), Some(b)) => a != b,
            _ => false,
        }
    })
}

fn mat2(a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) -> IntMatrix {
    IntMatrix::from_rows(vec![vec![a.clone(), b.clone()], vec![c.clone(), d.clone()]]).unwrap()
}

fn inverse2(p: &IntMatrix) -> IntMatrix {
    // unimodular, so the adjugate over the determinant is integral
    let det = p.determinant();
    debug_assert!(det.abs().is_one());
    let (a, b, c, d) = (&p[(0, 0)], &p[(0, 1)], &p[(1, 0)], &p[(1, 1)]);
    mat2(&(d * &det), &(-b * &det), &(-c * &det), &(a * &det))
}

/// A canonical invariant of an indefinite binary lattice together with the
/// base change reaching the corresponding normal form.
#[derive(Clone, Debug)]
struct Normal {
    gram: IntMatrix,
    /// `basisᵀ G basis = gram`.
    basis: IntMatrix,
}

/// Normal forms `[[0, h], [h, t]]`, `0 ≤ t < 2h`, one per isotropic line.
fn isotropic_normal_forms(g: &IntMatrix) -> Vec<Normal> {
    let (a, b, c) = (&g[(0, 0)], &g[(0, 1)], &g[(1, 1)]);
    let disc = b * b - a * c;
    let h = num_integer::Roots::sqrt(&disc);
    debug_assert_eq!(&h * &h, disc);
    let mut lines: Vec<(BigInt, BigInt)> = Vec::new();
    if a.is_zero() {
        lines.push((BigInt::one(), BigInt::zero()));
        lines.push((-c, BigInt::from(2) * b));
    } else {
        // a x² + 2b x y + c y² = 0  ⇔  x / y = (-b ± h) / a
        lines.push((-b + &h, a.clone()));
        lines.push((-b - &h, a.clone()));
    }
    let mut out = Vec::new();
    for (p, q) in lines {
        let gcd = p.gcd(&q);
        let (p, q) = (p / &gcd, q / &gcd);
        let (_, co) = xgcd(&[p.clone(), q.clone()]);
        // det [[p, -v], [q, u]] = pu + qv = 1
        let (mut xp, mut xq) = (-&co[1], co[0].clone());
        let e = Vector(vec![p.clone(), q.clone()]);
        let pair = |x: &Vector, y: &Vector| -> BigInt {
            let gx = g.mul_vec(&x.0);
            y.0.iter().zip(&gx).map(|(s, t)| s * t).sum()
        };
        let mut m = pair(&e, &Vector(vec![xp.clone(), xq.clone()]));
        if m.is_negative() {
            xp = -xp;
            xq = -xq;
            m = -m;
        }
        debug_assert_eq!(m, h);
        let t = pair(&Vector(vec![xp.clone(), xq.clone()]), &Vector(vec![xp.clone(), xq.clone()]));
        // x ↦ x + k e changes t by 2km
        let k = -t.div_floor(&(BigInt::from(2) * &m));
        let xp = xp + &k * &p;
        let xq = xq + &k * &q;
        let basis = mat2(&p, &xp, &q, &xq);
        let gram = basis.transpose().mul(g).mul(&basis);
        out.push(Normal { gram, basis });
    }
    out
}

/// Coefficients `(A, B, C)` of `A x² + B xy + C y²` for a Gram matrix.
fn coeffs(g: &IntMatrix) -> (BigInt, BigInt, BigInt) {
    (g[(0, 0)].clone(), BigInt::from(2) * &g[(0, 1)], g[(1, 1)].clone())
}

fn is_reduced(a: &BigInt, b: &BigInt, s: &BigInt) -> bool {
    // |√Δ − 2|A|| < B < √Δ with Δ not a square and s = ⌊√Δ⌋
    let two_a = BigInt::from(2) * a.abs();
    b <= s && &(&two_a - b) <= s && &(b + &two_a) > s
}

/// One step of the reduction operator; returns the substitution matrix.
fn rho(g: &IntMatrix, s: &BigInt) -> IntMatrix {
    let (_, b, c) = coeffs(g);
    let two_c = BigInt::from(2) * c.abs();
    // B' = -B + 2Ct lies in (-|C|, |C|] if |C| > √Δ, else in (√Δ - 2|C|, √Δ)
    let lo: BigInt = if c.abs() > *s { -c.abs() + 1 } else { s - &two_c + 1 };
    let target: BigInt = (-&b - &lo).mod_floor(&two_c) + &lo;
    let t = (&target + &b) / (BigInt::from(2) * &c);
    debug_assert_eq!(-&b + BigInt::from(2) * &c * &t, target);
    mat2(&BigInt::zero(), &BigInt::from(-1), &BigInt::one(), &t)
}

/// Reduces `g` and returns the reduced Gram matrix with its base change.
fn reduce(g: &IntMatrix, s: &BigInt) -> (IntMatrix, IntMatrix) {
    let mut basis = IntMatrix::identity(2);
    let mut cur = g.clone();
    loop {
        let (a, b, _) = coeffs(&cur);
        if is_reduced(&a, &b, s) {
            return (cur, basis);
        }
        let step = rho(&cur, s);
        cur = step.transpose().mul(&cur).mul(&step);
        basis = basis.mul(&step);
    }
}

fn reduced_cycle(g: &IntMatrix, s: &BigInt) -> Vec<Normal> {
    let (start, basis) = reduce(g, s);
    let mut out = vec![Normal { gram: start.clone(), basis: basis.clone() }];
    let mut cur = start.clone();
    let mut acc = basis;
    loop {
        let step = rho(&cur, s);
        cur = step.transpose().mul(&cur).mul(&step);
        acc = acc.mul(&step);
        if cur == start {
            return out;
        }
        out.push(Normal { gram: cur.clone(), basis: acc.clone() });
    }
}

/// Decides isometry of two indefinite binary lattices with equal determinant.
fn binary_isometry(gl: &IntMatrix, gm: &IntMatrix) -> IsometryVerdict {
    // discriminant of the form (A, B, C) = (g₀₀, 2g₀₁, g₁₁)
    let disc = BigInt::from(4) * (&gl[(0, 1)] * &gl[(0, 1)] - &gl[(0, 0)] * &gl[(1, 1)]);
    let s = num_integer::Roots::sqrt(&disc);
    let (left, right): (Vec<Normal>, Vec<Normal>) = if &s * &s == disc {
        (isotropic_normal_forms(gl), isotropic_normal_forms(gm))
    } else {
        // GL₂ classes: the proper class of M or of its mirror image
        let flip = mat2(&BigInt::one(), &BigInt::zero(), &BigInt::zero(), &BigInt::from(-1));
        let (rm, bm) = reduce(gm, &s);
        let mirrored = flip.transpose().mul(gm).mul(&flip);
        let (rf, bf) = reduce(&mirrored, &s);
        (
            reduced_cycle(gl, &s),
            vec![Normal { gram: rm, basis: bm }, Normal { gram: rf, basis: flip.mul(&bf) }],
        )
    };
    for x in &left {
        for y in &right {
            if x.gram == y.gram {
                // x.basisᵀ G_L x.basis = y.basisᵀ G_M y.basis
                return Verdict::Yes(x.basis.mul(&inverse2(&y.basis)));
            }
        }
    }
    Verdict::No(Distinction::Exhausted)
}

fn definite_isometry(l: &Lattice, m: &Lattice) -> Result<IsometryVerdict> {
    let n = l.rank();
    let gm = m.gram();
    let mut cands = Vec::with_capacity(n);
    let mut examined = 0u64;
    for i in 0..n {
        match vectors_of_norm(l, &gm[(i, i)], DEFAULT_VECTOR_CAP) {
            Ok(v) => {
                examined += v.len() as u64;
                cands.push(v)
            }
            Err(Error::CapExceeded { .. }) => {
                return Ok(Verdict::Unknown(SearchBound { height: 0, candidates: DEFAULT_VECTOR_CAP }))
            }
            Err(e) => return Err(e),
        }
    }
    let mut chosen: Vec<Vector> = Vec::new();
    let mut nodes = 0u64;
    let found = backtrack(l, gm, &cands, &mut chosen, &mut nodes);
    match found {
        Some(true) => Ok(Verdict::Yes(columns(&chosen))),
        Some(false) => Ok(Verdict::No(Distinction::Exhausted)),
        None => Ok(Verdict::Unknown(SearchBound { height: 0, candidates: examined + nodes })),
    }
}

fn columns(vs: &[Vector]) -> IntMatrix {
    let n = vs.len();
    IntMatrix::from_rows((0..n).map(|i| vs.iter().map(|v| v.0[i].clone()).collect()).collect()).unwrap()
}

/// `None` when the node cap is hit.
fn backtrack(l: &Lattice, gm: &IntMatrix, cands: &[Vec<Vector>], chosen: &mut Vec<Vector>, nodes: &mut u64) -> Option<bool> {
    let k = chosen.len();
    if k == cands.len() {
        return Some(true);
    }
    for v in &cands[k] {
        *nodes += 1;
        if *nodes > SEARCH_CAP {
            return None;
        }
        if (0..k).all(|j| l.pairing(v, &chosen[j]) == gm[(k, j)]) {
            chosen.push(v.clone());
            match backtrack(l, gm, cands, chosen, nodes) {
                Some(true) => return Some(true),
                None => return None,
                Some(false) => {}
            }
            chosen.pop();
        }
    }
    Some(false)
}

/// Searches the box of the given height for images of the basis of `M`.
fn bounded_isometry(l: &Lattice, m: &Lattice, bound: u64) -> IsometryVerdict {
    let n = l.rank();
    let gm = m.gram();
    let h = bound as i64;
    let side = (2 * bound + 1) as u128;
    let unknown = |c: u64| Verdict::Unknown(SearchBound { height: bound, candidates: c });
    if side.checked_pow(n as u32).map_or(true, |t| t > SEARCH_CAP as u128) {
        return unknown(0);
    }
    let total = side.pow(n as u32) as u64;
    let mut by_norm: Vec<Vec<Vector>> = vec![Vec::new(); n];
    let mut x = vec![-h; n];
    for _ in 0..total {
        let v = Vector(x.iter().map(|&c| BigInt::from(c)).collect());
        if !v.is_zero() {
            let q = l.norm(&v);
            for i in 0..n {
                if q == gm[(i, i)] {
                    by_norm[i].push(v.clone());
                }
            }
        }
        for xi in x.iter_mut() {
            *xi += 1;
            if *xi <= h {
                break;
            }
            *xi = -h;
        }
    }
    let mut chosen = Vec::new();
    let mut nodes = 0u64;
    match backtrack(l, gm, &by_norm, &mut chosen, &mut nodes) {
        // equal determinants force |det P| = 1 once the Gram matrix matches
        Some(true) => Verdict::Yes(columns(&chosen)),
        _ => unknown(total + nodes),
    }
}
