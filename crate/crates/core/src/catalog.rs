//! Named lattices, Beauville–Bogomolov lattices of the known deformation
//! types, Mukai lattices and a few constructions built from them.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::disc::{discriminant_form, primitive_gluings, two_elementary_invariants, Gluing, TwoElemInvariants};
use crate::error::{Error, Result};
use crate::isometric::is_isometric_small;
use crate::lattice::{orthogonal_complement, Lattice, Sublattice, Vector};
use crate::matrix::IntMatrix;

/// `3·E6⁻¹` for the Cartan matrix returned by [`e6`].
pub const E6_DUAL_TIMES_3: [[i64; 6]; 6] = [
    [4, 5, 6, 4, 2, 3],
    [5, 10, 12, 8, 4, 6],
    [6, 12, 18, 12, 6, 9],
    [4, 8, 12, 10, 5, 6],
    [2, 4, 6, 5, 4, 3],
    [3, 6, 9, 6, 3, 6],
];

fn int(x: i64) -> BigInt {
    BigInt::from(x)
}

/// Cartan matrix of a tree given by its edges.
fn dynkin(n: usize, edges: &[(usize, usize)]) -> Lattice {
    let mut g = IntMatrix::zeros(n, n);
    for i in 0..n {
        g[(i, i)] = int(2);
    }
    for &(a, b) in edges {
        g[(a, b)] = int(-1);
        g[(b, a)] = int(-1);
    }
    Lattice::new(g).expect("Cartan matrices of ADE type are nondegenerate")
}

fn chain(n: usize) -> Vec<(usize, usize)> {
    (1..n).map(|i| (i - 1, i)).collect()
}

pub fn a(k: usize) -> Result<Lattice> {
    if k == 0 {
        return Err(Error::InvalidParameter("A_k needs k >= 1".into()));
    }
    Ok(dynkin(k, &chain(k)))
}

pub fn d(k: usize) -> Result<Lattice> {
    if k < 4 {
        return Err(Error::InvalidParameter("D_k needs k >= 4".into()));
    }
    let mut edges = chain(k - 1);
    edges.push((k - 3, k - 1));
    Ok(dynkin(k, &edges))
}

/// Chain `0-1-2-3-4` with node 5 attached to node 2.
pub fn e6() -> Lattice {
    let mut edges = chain(5);
    edges.push((2, 5));
    dynkin(6, &edges)
}

pub fn e7() -> Lattice {
    let mut edges = chain(6);
    edges.push((3, 6));
    dynkin(7, &edges)
}

pub fn e8() -> Lattice {
    let mut edges = chain(7);
    edges.push((4, 7));
    dynkin(8, &edges)
}

/// `E6^∨(s)`: Gram matrix `s·E6⁻¹`, even and integral exactly when `3 | s`.
pub fn e6_dual(scale: &BigInt) -> Result<Lattice> {
    if scale.is_zero() || !scale.is_multiple_of(&int(3)) {
        return Err(Error::NonIntegralDual { scale: scale.clone() });
    }
    let k = scale / 3;
    Lattice::new(IntMatrix::from_i64(&E6_DUAL_TIMES_3).scaled(&k))
}

pub fn u() -> Lattice {
    Lattice::hyperbolic_plane()
}

/// `Λ24 = U⁴ ⊕ E8(−1)²`, the Mukai lattice of a K3 surface. The first two
/// coordinates span the distinguished hyperbolic plane.
pub fn lambda24() -> Lattice {
    let e8m = e8().rescale(&int(-1)).unwrap();
    u().power(4).direct_sum(&e8m.power(2))
}

/// `Λ8 = U⁴`, the Mukai lattice of an abelian surface.
pub fn lambda8() -> Lattice {
    u().power(4)
}

/// `Λ24 ⊕ U`.
pub fn lambda26() -> Lattice {
    lambda24().direct_sum(&u())
}

/// `⟨2⟩ ⊕ ⟨−2⟩^k`.
pub fn epw(k: usize) -> Result<Lattice> {
    if k == 0 {
        return Err(Error::InvalidParameter("epw(k) needs k >= 1".into()));
    }
    Ok(Lattice::rank_one(2)?.direct_sum(&Lattice::rank_one(-2)?.power(k)))
}

/// The known deformation types of irreducible symplectic manifolds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DeformationType {
    K3n(u64),
    Kum(u64),
    Og6,
    Og10,
}

impl DeformationType {
    pub fn k3n(n: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("K3[n] needs n >= 2, got {n}")));
        }
        Ok(DeformationType::K3n(n))
    }

    pub fn kum(n: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("Kummer type needs n >= 2, got {n}")));
        }
        Ok(DeformationType::Kum(n))
    }

    /// Parses `k3n`, `kum`, `og6` or `og10`; the first two need `n`.
    pub fn parse(tag: &str, n: Option<u64>) -> Result<Self> {
        let need = |n: Option<u64>| n.ok_or_else(|| Error::InvalidParameter(format!("{tag} needs a parameter n")));
        match tag.to_ascii_lowercase().as_str() {
            "k3n" => Self::k3n(need(n)?),
            "kum" => Self::kum(need(n)?),
            "og6" => Ok(DeformationType::Og6),
            "og10" => Ok(DeformationType::Og10),
            other => Err(Error::UnsupportedType(other.to_string())),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            DeformationType::K3n(_) => "k3n",
            DeformationType::Kum(_) => "kum",
            DeformationType::Og6 => "og6",
            DeformationType::Og10 => "og10",
        }
    }

    pub fn parameter(&self) -> Option<u64> {
        match self {
            DeformationType::K3n(n) | DeformationType::Kum(n) => Some(*n),
            _ => None,
        }
    }

    /// Square of a generator of `H²(X)^⊥` in the Mukai lattice, for the
    /// types embedded as corank-1 sublattices.
    pub fn complement_square(&self) -> Result<BigInt> {
        match self {
            DeformationType::K3n(n) => Ok(int(2 * *n as i64 - 2)),
            DeformationType::Kum(n) => Ok(int(2 * *n as i64 + 2)),
            other => Err(Error::UnsupportedType(other.to_string())),
        }
    }

    pub fn mukai_lattice(&self) -> Lattice {
        match self {
            DeformationType::K3n(_) => lambda24(),
            DeformationType::Kum(_) => lambda8(),
            DeformationType::Og6 => lambda8(),
            DeformationType::Og10 => lambda26(),
        }
    }
}

impl fmt::Display for DeformationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeformationType::K3n(n) => write!(f, "K3[{n}]"),
            DeformationType::Kum(n) => write!(f, "Kum{n}"),
            DeformationType::Og6 => write!(f, "OG6"),
            DeformationType::Og10 => write!(f, "OG10"),
        }
    }
}

/// The Beauville–Bogomolov lattice `H²(X, Z)`.
pub fn bb(t: DeformationType) -> Result<Lattice> {
    let u3 = u().power(3);
    let e8m2 = e8().rescale(&int(-1))?.power(2);
    match t {
        DeformationType::K3n(n) if n >= 2 => Ok(u3.direct_sum(&e8m2).direct_sum(&Lattice::rank_one(2 - 2 * n as i64)?)),
        DeformationType::Kum(n) if n >= 2 => Ok(u3.direct_sum(&Lattice::rank_one(-2 - 2 * n as i64)?)),
        DeformationType::Og6 => Ok(u3.direct_sum(&Lattice::rank_one(-2)?.power(2))),
        DeformationType::Og10 => Ok(u3.direct_sum(&e8m2).direct_sum(&a(2)?.rescale(&int(-1))?)),
        _ => Err(Error::InvalidParameter(format!("{t} needs n >= 2"))),
    }
}

/// Looks up a lattice by name: `U`, `A<k>`, `D<k>`, `E6`, `E7`, `E8`,
/// `E6v` (needs a scale), `<q>` style rank one lattices as `rank1`
/// (needs a scale), `L24`, `L8`, `L26`, `epw` and `bb-<type>` (with `n`
/// where the type needs it). A scale other than `E6v`'s and `rank1`'s
/// rescales the result.
pub fn named_lattice(name: &str, scale: Option<&BigInt>, n: Option<u64>) -> Result<Lattice> {
    let lower = name.to_ascii_lowercase();
    let base = match lower.as_str() {
        "e6v" => {
            let s = scale.ok_or_else(|| Error::InvalidParameter("E6v needs a scale".into()))?;
            return e6_dual(s);
        }
        "rank1" => {
            let s = scale.ok_or_else(|| Error::InvalidParameter("rank1 needs a value".into()))?;
            return Lattice::new(IntMatrix::diagonal(&[s.clone()]));
        }
        "u" => u(),
        "e6" => e6(),
        "e7" => e7(),
        "e8" => e8(),
        "l24" => lambda24(),
        "l8" => lambda8(),
        "l26" => lambda26(),
        "epw" => epw(n.ok_or_else(|| Error::InvalidParameter("epw needs k".into()))? as usize)?,
        _ => {
            if let Some(tag) = lower.strip_prefix("bb-") {
                bb(DeformationType::parse(tag, n)?)?
            } else if let Some(k) = parse_indexed(&lower, 'a') {
                a(k)?
            } else if let Some(k) = parse_indexed(&lower, 'd') {
                d(k)?
            } else {
                return Err(Error::UnknownName(name.to_string()));
            }
        }
    };
    match scale {
        Some(s) => base.rescale(s),
        None => Ok(base),
    }
}

fn parse_indexed(name: &str, letter: char) -> Option<usize> {
    let rest = name.strip_prefix(letter)?;
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}

/// The `Γ_v` construction: glue `w^⊥ ⊂ Λ24` with `⟨−6⟩` along the unique
/// graph of order 2.
#[derive(Clone, Debug)]
pub struct GammaV {
    pub lattice: Lattice,
    pub complement: Sublattice,
    pub gluing: Gluing,
}

pub fn gamma_v(ambient: &Lattice, w: &Vector) -> Result<GammaV> {
    ambient.check_vector(w)?;
    let sq = ambient.norm(w);
    if sq != int(2) {
        return Err(Error::WrongSquare { expected: int(2), found: sq });
    }
    if !w.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    let line = ambient.sublattice(IntMatrix::from_rows(vec![w.0.clone()])?)?;
    let complement = orthogonal_complement(&line);
    let wperp = complement.lattice()?;
    let sigma = Lattice::rank_one(-6)?;
    let mut gl: Vec<Gluing> = primitive_gluings(&wperp, &sigma, None, 10_000)?
        .into_iter()
        .filter(|g| g.glue_order() == 2)
        .collect();
    if gl.len() != 1 {
        return Err(Error::InvalidParameter(format!("expected one order-2 gluing, found {}", gl.len())));
    }
    let gluing = gl.remove(0);
    assert!(gluing.lattice.is_even());
    Ok(GammaV { lattice: gluing.lattice.clone(), complement, gluing })
}

/// Divisibility values of `T` allowed by the classification of extremal
/// rays, imported as facts.
pub fn section_div_table(t: DeformationType) -> Result<&'static [i64]> {
    match t {
        DeformationType::K3n(_) => Ok(&[2]),
        DeformationType::Kum(_) => Ok(&[2]),
        DeformationType::Og10 => Ok(&[1, 3]),
        DeformationType::Og6 => Err(Error::UnsupportedType("og6".into())),
    }
}

/// The rank-2 lattice spanned by the fibre class `D` and the section divisor `T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionLattice {
    pub lattice: Lattice,
    pub canonical_name: &'static str,
    pub div: i64,
    pub t_square: BigInt,
}

/// `[[0, d], [d, t]]` in the basis `(D, T)`.
pub fn section_gram(d: i64, t: &BigInt) -> Result<Lattice> {
    Lattice::new(IntMatrix::from_rows(vec![vec![int(0), int(d)], vec![int(d), t.clone()]])?)
}

/// Complements that the invariant lattice may meet in the ambient Mukai
/// lattice, used to cross-check which divisibilities survive the torsion
/// constraint for an involution.
fn section_complements(t: DeformationType) -> Result<Vec<Lattice>> {
    Ok(match t {
        DeformationType::K3n(n) => vec![Lattice::zero(), Lattice::rank_one(2 * n as i64 - 2)?],
        DeformationType::Kum(n) => vec![Lattice::zero(), Lattice::rank_one(2 * n as i64 + 2)?],
        DeformationType::Og10 => vec![Lattice::zero(), Lattice::rank_one(2)?, Lattice::rank_one(6)?, a(2)?],
        DeformationType::Og6 => return Err(Error::UnsupportedType("og6".into())),
    })
}

/// Whether some `[[0, d], [d, t]]` glues with one of the allowed complements
/// to a lattice with 2-torsion discriminant group.
pub fn section_div_survives(t: DeformationType, d: i64) -> Result<bool> {
    for w in section_complements(t)? {
        for r in (0..2 * d).step_by(2) {
            let c = section_gram(d, &int(r))?;
            let found = if w.rank() == 0 {
                c.invariant_factors().iter().all(|f| f == &int(2))
            } else {
                !primitive_gluings(&c, &w, Some(2), 10_000)?.is_empty()
            };
            if found {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

pub fn lagrangian_section_lattice(t: DeformationType) -> Result<SectionLattice> {
    let (d, t_square) = match t {
        DeformationType::K3n(n) => (2, int(-2 * (n as i64 + 3))),
        DeformationType::Kum(n) => (2, int(2 * n as i64 + 2)),
        DeformationType::Og10 => {
            let mut allowed = Vec::new();
            for &d in section_div_table(t)? {
                if section_div_survives(t, d)? {
                    allowed.push(d);
                }
            }
            if allowed != [1] {
                return Err(Error::InvalidParameter(format!("unexpected surviving divisibilities {allowed:?}")));
            }
            // with d = 1 the class only depends on t mod 2, so any even t will do
            (1, int(0))
        }
        DeformationType::Og6 => return Err(Error::UnsupportedType("og6".into())),
    };
    if !section_div_table(t)?.contains(&d) {
        return Err(Error::InvalidParameter(format!("divisibility {d} not allowed for {t}")));
    }
    let lattice = section_gram(d, &t_square)?;
    let candidates: [(&'static str, Lattice); 3] = [
        ("U", u()),
        ("U(2)", u().rescale(&int(2))?),
        ("<2>+<-2>", Lattice::from_i64(&[[2, 0], [0, -2]])?),
    ];
    for (name, c) in candidates {
        if is_isometric_small(&lattice, &c, 4)?.is_yes() {
            return Ok(SectionLattice { lattice, canonical_name: name, div: d, t_square });
        }
    }
    Err(Error::InvalidParameter(format!("section lattice {lattice} has no canonical name")))
}

/// Data of the example of a lagrangian fibration without section on a
/// manifold of type K3[n] with a degree-2 polarisation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoSectionExample {
    pub lattice: Lattice,
    pub f: Vector,
    pub f_square: BigInt,
    pub f_div: BigInt,
    /// `(T, F) = div(T) = 2` is impossible because `div(F) ∤ 2`.
    pub section_pairing_possible: bool,
    /// Whether some `[[0, d], [d, t]]` with `div(F) | d` is 2-elementary.
    pub two_elementary_possible: bool,
}

/// `F = 3H − δ` in `bb(K3[n])` with `H = e + f` in the first hyperbolic plane.
pub fn no_section_example(n: u64) -> Result<NoSectionExample> {
    let lattice = bb(DeformationType::k3n(n)?)?;
    let rank = lattice.rank();
    let mut coords = vec![BigInt::zero(); rank];
    coords[0] = int(3);
    coords[1] = int(3);
    coords[rank - 1] = int(-1);
    let f = Vector(coords);
    let f_square = lattice.norm(&f);
    let f_div = lattice.divisibility(&f)?;
    let section_div = section_div_table(DeformationType::K3n(n))?;
    let section_pairing_possible = section_div.iter().any(|&d| int(d).is_multiple_of(&f_div));
    let mut two_elementary_possible = false;
    // multiples d of div(F) up to 4·div(F); t only matters mod 2d
    for k in 1..=4 {
        let d = (&f_div * int(k)).try_into().unwrap_or(i64::MAX);
        for t in (0..2 * d).step_by(2) {
            let c = section_gram(d, &int(t))?;
            if two_elementary_invariants(&c).is_ok() {
                two_elementary_possible = true;
            }
        }
    }
    Ok(NoSectionExample { lattice, f, f_square, f_div, section_pairing_possible, two_elementary_possible })
}

/// Raised when the assigned invariants cannot belong to any lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsistencyWarning {
    pub message: String,
}

/// `(r, a, δ) ↦ (r − 1, a + 1, 1)`.
pub fn assignment_to_k3(inv: TwoElemInvariants) -> Result<(TwoElemInvariants, Option<ConsistencyWarning>)> {
    if !inv.is_consistent() || inv.r == 0 {
        return Err(Error::InvalidParameter(format!("invalid invariants {inv}")));
    }
    let out = TwoElemInvariants { r: inv.r - 1, a: inv.a + 1, delta: 1 };
    let warning = (out.a > out.r)
        .then(|| ConsistencyWarning { message: format!("a = {} exceeds r = {}; no lattice has these invariants", out.a, out.r) });
    Ok((out, warning))
}

/// The discriminant group's invariant factors predicted by the table.
pub fn bb_expected_invariant_factors(t: DeformationType) -> Vec<BigInt> {
    match t {
        DeformationType::K3n(n) => vec![int(2 * n as i64 - 2)],
        DeformationType::Kum(n) => vec![int(2 * n as i64 + 2)],
        DeformationType::Og6 => vec![int(2), int(2)],
        DeformationType::Og10 => vec![int(3)],
    }
}

/// Whether the discriminant form of `l` is isometric to that of `m`.
pub fn same_disc_form(l: &Lattice, m: &Lattice) -> Result<bool> {
    let dl = discriminant_form(l)?;
    let dm = discriminant_form(m)?;
    dl.form().is_isometric(dm.form(), 10_000)
}
