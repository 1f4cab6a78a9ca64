//! The regression table of published lattice facts behind `verify-paper`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use quadlat_core::catalog::{
    a, bb, e6_dual, e8, epw, gamma_v, lagrangian_section_lattice, lambda24, no_section_example,
    same_disc_form, u, DeformationType,
};
use quadlat_core::criteria::{
    contains_u, induced_check, InducedQuery, Mode, UCertificate, DEFAULT_CANDIDATE_CAP,
};
use quadlat_core::disc::{
    discriminant_form, isotropic_subgroups, nikulin_equal, overlattice_from_isotropic, primitive_gluings,
    two_elementary_invariants, TwoElemInvariants, DEFAULT_GROUP_CAP,
};
use quadlat_core::isometric::is_isometric_small;
use quadlat_core::isometry::{invariant_and_coinvariant, make_isometry, reflection, DiscClass};
use quadlat_core::matrix::IntMatrix;
use quadlat_core::verdict::Verdict;
use quadlat_core::{Lattice, Result, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub id: &'static str,
    pub claim: &'static str,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
}

type CheckFn = fn() -> Result<(String, String)>;

/// `(id, claim, check)`; a check returns `(expected, computed)` and passes
/// when the two agree.
pub const CHECKS: &[(&str, &str, CheckFn)] = &[
    ("bb-table", "A of the four Beauville-Bogomolov lattices: Z/(2n-2), Z/(2n+2), (Z/2)^2, Z/3", bb_table),
    ("order3-A2", "T_g(Λ24) ≅ A2 for T ≅ <6>, which contains no U", order3_a2),
    ("order3-E6v", "T_g(Λ24) ≅ A2⊕E6v(-3) for T ≅ <6>⊕E6v(-3), which contains no U", order3_e6v),
    ("beauville-involution", "δ ↦ 4H-5δ; 2H-3δ has square -12 and divisibility 2", beauville),
    ("e8-example", "<2>⊕E8(-2) ≅ <2>⊕<-2>^8", e8_example),
    ("epw-families", "epw(k) is 2-elementary with rank k+1, a = r and δ = 1", epw_families),
    ("gamma-v", "Γ_v with σ² = -6 has the invariants of U^3⊕E8(-1)^2⊕A2(-1)", gamma_v_check),
    ("lagrangian-table", "section lattices: U(2) for odd n, <2>⊕<-2> for even n, U for OG10", lagrangian_table),
    ("no-section-example", "F = 3H-δ has square 0 and divisibility 3", no_section),
    ("torsion-property", "A_{T_G(L)} is of |G| torsion", torsion_property),
    ("overlattice-roundtrip", "overlattices correspond to isotropic subgroups H, with A_M = H^⊥/H", overlattice_roundtrip),
];

pub fn check_ids() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.0).collect()
}

pub fn run_check(id: &str) -> Option<Check> {
    let (id, claim, f) = CHECKS.iter().find(|c| c.0 == id)?;
    Some(match f() {
        Ok((expected, computed)) => Check { id, claim, pass: expected == computed, expected, computed },
        Err(e) => Check { id, claim, expected: String::new(), computed: format!("error: {e}"), pass: false },
    })
}

pub fn run_all() -> Vec<Check> {
    CHECKS.iter().filter_map(|c| run_check(c.0)).collect()
}

fn int(x: i64) -> BigInt {
    BigInt::from(x)
}

fn group_name(factors: &[BigInt]) -> String {
    if factors.is_empty() {
        return "0".into();
    }
    factors.iter().map(|f| format!("Z/{f}")).collect::<Vec<_>>().join("+")
}

fn bb_table() -> Result<(String, String)> {
    let mut expected = Vec::new();
    let mut computed = Vec::new();
    let cases = [
        (DeformationType::K3n(2), vec![2]),
        (DeformationType::K3n(3), vec![4]),
        (DeformationType::K3n(10), vec![18]),
        (DeformationType::Kum(2), vec![6]),
        (DeformationType::Kum(3), vec![8]),
        (DeformationType::Og6, vec![2, 2]),
        (DeformationType::Og10, vec![3]),
    ];
    for (t, table) in cases {
        let table: Vec<BigInt> = table.into_iter().map(int).collect();
        expected.push(format!("{t}: {}", group_name(&table)));
        computed.push(format!("{t}: {}", group_name(&bb(t)?.invariant_factors())));
    }
    Ok((expected.join(", "), computed.join(", ")))
}

fn induced_query<'a>(t: &'a Lattice, order: u64) -> InducedQuery<'a> {
    InducedQuery {
        x_type: DeformationType::K3n(2),
        t_x: t,
        order,
        mode: Mode::NonSymplectic,
        disc_action: DiscClass::Trivial,
        coinvariant: None,
        height: 3,
        group_cap: DEFAULT_GROUP_CAP,
        candidate_cap: DEFAULT_CANDIDATE_CAP,
    }
}

fn verdict_tag(v: &Verdict<quadlat_core::criteria::USplit, UCertificate>) -> String {
    match v {
        Verdict::Yes(_) => "Yes".into(),
        Verdict::No(c) => format!("No({})", c.tag()),
        Verdict::Unknown(b) => format!("Unknown({b})"),
    }
}

fn order3_a2() -> Result<(String, String)> {
    let t = Lattice::rank_one(6)?;
    let gluings = primitive_gluings(&t, &Lattice::rank_one(2)?, Some(3), DEFAULT_GROUP_CAP)?;
    let a2 = a(2)?;
    let names: Vec<String> = gluings
        .iter()
        .map(|g| Ok(if is_isometric_small(&g.lattice, &a2, 4)?.is_yes() { "A2".to_string() } else { g.lattice.to_string() }))
        .collect::<Result<_>>()?;
    let report = induced_check(&induced_query(&t, 3))?;
    let computed = format!(
        "candidates [{}]; contains_U(A2) = {}; {}",
        names.join(", "),
        verdict_tag(&contains_u(&a2, 3)?),
        report.final_verdict.tag()
    );
    Ok(("candidates [A2]; contains_U(A2) = No(definite); NotInduced".into(), computed))
}

fn order3_e6v() -> Result<(String, String)> {
    let e6v = e6_dual(&int(-3))?;
    let t = Lattice::rank_one(6)?.direct_sum(&e6v);
    let target = a(2)?.direct_sum(&e6v);
    let gluings = primitive_gluings(&t, &Lattice::rank_one(2)?, Some(3), DEFAULT_GROUP_CAP)?;
    let mut names = Vec::new();
    for g in &gluings {
        let m = &g.lattice;
        let same_genus = m.rank() == target.rank()
            && m.signature() == target.signature()
            && m.determinant() == target.determinant()
            && same_disc_form(m, &target)?;
        names.push(if same_genus { "A2+E6v(-3)".to_string() } else { m.to_string() });
    }
    let lengths: Vec<String> = gluings.iter().map(|g| g.lattice.invariant_factors().len().to_string()).collect();
    let report = induced_check(&induced_query(&t, 3))?;
    let states: Vec<&str> = report.verdicts.iter().map(|v| v.state()).collect();
    let computed = format!(
        "candidates [{}]; l(A) = [{}]; contains U: [{}]; {}",
        names.join(", "),
        lengths.join(", "),
        states.join(", "),
        report.final_verdict.tag()
    );
    Ok(("candidates [A2+E6v(-3)]; l(A) = [6]; contains U: [No]; NotInduced".into(), computed))
}

fn beauville() -> Result<(String, String)> {
    let l = Lattice::from_i64(&[[6, 0], [0, -4]])?;
    let g = make_isometry(&l, IntMatrix::from_i64(&[[5, 4], [-6, -5]]))?;
    let (t, s) = invariant_and_coinvariant(&l, &[g.clone()])?;
    let image = g.apply(&Vector::from_i64(&[0, 1]));
    let sv = s.basis_vector(0);
    let sv = if sv.0[0].is_negative() { sv.neg() } else { sv };
    let tv = t.basis_vector(0);
    let tv = if tv.0[0].is_negative() { tv.neg() } else { tv };
    // 2H - 3δ inside bb(K3[3]) with H = e + 3f
    let big = bb(DeformationType::K3n(3))?;
    let mut coords = vec![BigInt::zero(); big.rank()];
    coords[0] = &sv.0[0] * int(1);
    coords[1] = &sv.0[0] * int(3);
    coords[big.rank() - 1] = sv.0[1].clone();
    let div = big.divisibility(&Vector(coords))?;
    let computed = format!(
        "order {}; δ ↦ {}H{:+}δ; T = <{}H{:+}δ> of square {}; S = <{}H{:+}δ> of square {}, div {div}",
        g.order(),
        image.0[0],
        image.0[1],
        tv.0[0],
        tv.0[1],
        l.norm(&tv),
        sv.0[0],
        sv.0[1],
        l.norm(&sv)
    );
    Ok(("order 2; δ ↦ 4H-5δ; T = <1H-1δ> of square 2; S = <2H-3δ> of square -12, div 2".into(), computed))
}

fn e8_example() -> Result<(String, String)> {
    let left = Lattice::rank_one(2)?.direct_sum(&e8().rescale(&int(-2))?);
    let right = Lattice::rank_one(2)?.direct_sum(&Lattice::rank_one(-2)?.power(8));
    let computed = format!(
        "{} and {}; nikulin_equal = {}",
        two_elementary_invariants(&left)?,
        two_elementary_invariants(&right)?,
        nikulin_equal(&left, &right)?
    );
    Ok(("(9, 9, 1) and (9, 9, 1); nikulin_equal = true".into(), computed))
}

fn epw_families() -> Result<(String, String)> {
    let mut expected = Vec::new();
    let mut computed = Vec::new();
    for k in 1..=10 {
        expected.push(TwoElemInvariants::new(k + 1, k + 1, 1)?.to_string());
        computed.push(two_elementary_invariants(&epw(k)?)?.to_string());
    }
    Ok((expected.join(" "), computed.join(" ")))
}

fn gamma_v_check() -> Result<(String, String)> {
    let l = lambda24();
    let mut w = vec![BigInt::zero(); 24];
    w[0] = BigInt::one();
    w[1] = BigInt::one();
    let g = gamma_v(&l, &Vector(w))?;
    let m = &g.lattice;
    let og10 = bb(DeformationType::Og10)?;
    let computed = format!(
        "rank {}, signature ({}, {}), |det| {}, even {}, disc form of bb(og10) {}, glue order {}, summands primitive {}",
        m.rank(),
        m.signature().positive,
        m.signature().negative,
        m.determinant().abs(),
        m.is_even(),
        same_disc_form(m, &og10)?,
        g.gluing.glue_order(),
        g.gluing.summands_primitive()
    );
    Ok((
        "rank 24, signature (3, 21), |det| 3, even true, disc form of bb(og10) true, glue order 2, summands primitive true"
            .into(),
        computed,
    ))
}

fn lagrangian_table() -> Result<(String, String)> {
    let mut expected = Vec::new();
    let mut computed = Vec::new();
    for n in [2u64, 3, 4, 5] {
        let name = if n % 2 == 1 { "U(2)" } else { "<2>+<-2>" };
        for t in [DeformationType::K3n(n), DeformationType::Kum(n)] {
            expected.push(format!("{t}: {name}"));
            computed.push(format!("{t}: {}", lagrangian_section_lattice(t)?.canonical_name));
        }
    }
    expected.push("k3n(2): T^2 = -10".into());
    computed.push(format!("k3n(2): T^2 = {}", lagrangian_section_lattice(DeformationType::K3n(2))?.t_square));
    expected.push("og10: U".into());
    computed.push(format!("og10: {}", lagrangian_section_lattice(DeformationType::Og10)?.canonical_name));
    Ok((expected.join(", "), computed.join(", ")))
}

fn no_section() -> Result<(String, String)> {
    let ex = no_section_example(10)?;
    let computed = format!(
        "F^2 = {}, div(F) = {}, (T,F) = 2 possible: {}, 2-elementary section lattice possible: {}",
        ex.f_square, ex.f_div, ex.section_pairing_possible, ex.two_elementary_possible
    );
    Ok(("F^2 = 0, div(F) = 3, (T,F) = 2 possible: false, 2-elementary section lattice possible: false".into(), computed))
}

/// One of id, −id, swap, −swap on a hyperbolic plane.
fn plane_block(k: usize) -> [[i64; 2]; 2] {
    match k {
        0 => [[1, 0], [0, 1]],
        1 => [[-1, 0], [0, -1]],
        2 => [[0, 1], [1, 0]],
        _ => [[0, -1], [-1, 0]],
    }
}

fn random_root(rng: &mut ChaCha8Rng, l: &Lattice) -> Vector {
    loop {
        let v = Vector((0..l.rank()).map(|_| int(rng.gen_range(-1..=1))).collect());
        let n = l.norm(&v);
        if n == int(2) || n == int(-2) {
            return v;
        }
    }
}

/// A finite-order isometry of `U³` (block permutation with plane signs and
/// swaps) or of `U ⊕ E8(−1)` (plane element times a word in simple
/// reflections), conjugated by reflections in random roots.
pub fn random_finite_isometry(rng: &mut ChaCha8Rng, l: &Lattice, u3: bool) -> Result<quadlat_core::isometry::Isometry> {
    let n = l.rank();
    let mut p = IntMatrix::zeros(n, n);
    if u3 {
        let mut perm = [0usize, 1, 2];
        for i in (1..3).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        for (src, &dst) in perm.iter().enumerate() {
            let b = plane_block(rng.gen_range(0..4));
            for i in 0..2 {
                for j in 0..2 {
                    p[(2 * dst + i, 2 * src + j)] = int(b[i][j]);
                }
            }
        }
    } else {
        p = IntMatrix::identity(n);
        let b = plane_block(rng.gen_range(0..4));
        for i in 0..2 {
            for j in 0..2 {
                p[(i, j)] = int(b[i][j]);
            }
        }
        for _ in 0..rng.gen_range(1..=10) {
            let r = reflection(l, &Vector::unit(n, 2 + rng.gen_range(0..8)))?;
            p = p.mul(r.matrix());
        }
    }
    for _ in 0..rng.gen_range(1..=3) {
        let r = reflection(l, &random_root(rng, l))?;
        p = r.matrix().mul(&p).mul(r.matrix());
    }
    make_isometry(l, p)
}

fn torsion_property() -> Result<(String, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let u3 = u().power(3);
    let ue8 = u().direct_sum(&e8().rescale(&int(-1))?);
    let mut failures = Vec::new();
    for case in 0..50 {
        let (l, is_u3) = if case % 2 == 0 { (&u3, true) } else { (&ue8, false) };
        let g = random_finite_isometry(&mut rng, l, is_u3)?;
        let (t, _) = invariant_and_coinvariant(l, &[g.clone()])?;
        if t.rank() == 0 {
            continue;
        }
        let exponent = t.lattice()?.invariant_factors().last().cloned().unwrap_or_else(BigInt::one);
        if !(int(g.order() as i64) % &exponent).is_zero() {
            failures.push(format!("case {case}: order {} exponent {exponent}", g.order()));
        }
    }
    let computed = if failures.is_empty() { "50 isometries, exponent divides order".to_string() } else { failures.join("; ") };
    Ok(("50 isometries, exponent divides order".into(), computed))
}

/// Even lattices of rank at most 4 with `|det| ≤ 48`: rank one lattices, small
/// binary forms and sums of a few standard pieces.
pub fn overlattice_corpus() -> Vec<Lattice> {
    let mut out: Vec<Lattice> = Vec::new();
    let mut push = |l: Lattice| {
        if l.is_even() && l.determinant().abs() <= int(48) && !out.contains(&l) {
            out.push(l);
        }
    };
    for k in 1..=24i64 {
        for s in [2 * k, -2 * k] {
            if let Ok(l) = Lattice::rank_one(s) {
                push(l);
            }
        }
    }
    for x in -3i64..=3 {
        for y in 0i64..=3 {
            for z in x..=3 {
                if let Ok(l) = Lattice::from_i64(&[[2 * x, y], [y, 2 * z]]) {
                    push(l);
                }
            }
        }
    }
    let pieces: Vec<Lattice> = [
        Lattice::rank_one(2),
        Lattice::rank_one(-2),
        Lattice::rank_one(4),
        Lattice::rank_one(-6),
        Ok(u()),
        Lattice::from_i64(&[[0, 2], [2, 0]]),
        a(2),
        a(2).and_then(|l| l.rescale(&int(-1))),
        a(3),
        quadlat_core::catalog::d(4),
    ]
    .into_iter()
    .map(|l| l.expect("corpus piece"))
    .collect();
    for x in &pieces {
        for y in &pieces {
            let s = x.direct_sum(y);
            if s.rank() <= 4 {
                push(s.clone());
                for z in &pieces {
                    let t = s.direct_sum(z);
                    if t.rank() <= 4 {
                        push(t);
                    }
                }
            }
        }
    }
    out
}

fn overlattice_roundtrip() -> Result<(String, String)> {
    let corpus = overlattice_corpus();
    let mut subgroups = 0usize;
    let mut failures = Vec::new();
    for l in &corpus {
        let d = discriminant_form(l)?;
        let f = d.form();
        let elements = f.elements(DEFAULT_GROUP_CAP)?;
        for h in isotropic_subgroups(f, DEFAULT_GROUP_CAP)? {
            subgroups += 1;
            let over = overlattice_from_isotropic(&d, &h, DEFAULT_GROUP_CAP)?;
            let m = &over.lattice;
            let ho = h.order() as i64;
            let big = |x: &[u64]| x.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>();
            // q-values over H^⊥ against those of A_M, each with multiplicity |H|
            let mut perp: Vec<_> = elements
                .iter()
                .filter(|x| h.elements().iter().all(|y| f.b_value(&big(x), &big(y)).is_zero()))
                .map(|x| f.q_value(&big(x)))
                .collect();
            perp.sort();
            let dm = discriminant_form(m)?;
            let mut am: Vec<_> = dm
                .form()
                .elements(DEFAULT_GROUP_CAP)?
                .iter()
                .flat_map(|x| std::iter::repeat(dm.form().q_value(&big(x))).take(ho as usize))
                .collect();
            am.sort();
            let ok = m.is_even()
                && over.index == ho as u64
                && m.determinant().abs() * int(ho * ho) == l.determinant().abs()
                && perp == am;
            if !ok {
                failures.push(format!("{l} with |H| = {ho}"));
            }
        }
    }
    let computed = if failures.is_empty() {
        format!("{} lattices, {subgroups} isotropic subgroups, all consistent", corpus.len())
    } else {
        failures.join("; ")
    };
    Ok((format!("{} lattices, {subgroups} isotropic subgroups, all consistent", corpus.len()), computed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_unique() {
        let mut ids = check_ids();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), CHECKS.len());
    }

    #[test]
    fn corpus_is_large_and_bounded() {
        let c = overlattice_corpus();
        assert!(c.len() > 150);
        assert!(c.iter().all(|l| l.rank() <= 4 && l.is_even() && l.determinant().abs() <= int(48)));
    }
}
