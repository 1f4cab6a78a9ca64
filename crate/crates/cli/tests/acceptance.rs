//! One PASS/FAIL line per acceptance criterion. Each criterion is checked
//! twice: through the `verify-paper` table and against an independent
//! computation with the naive oracles of the core test suite.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};

use common::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use quadlat_cli::verify;
use quadlat_core::catalog::{
    a, bb, e6_dual, e8, epw, gamma_v, lagrangian_section_lattice, lambda24, no_section_example, DeformationType,
};
use quadlat_core::criteria::{contains_u, induced_check, Final, InducedQuery, Mode, UCertificate, DEFAULT_CANDIDATE_CAP};
use quadlat_core::disc::{isotropic_subgroups, discriminant_form, primitive_gluings, two_elementary_invariants, DEFAULT_GROUP_CAP};
use quadlat_core::isometry::{invariant_and_coinvariant, make_isometry, DiscClass};
use quadlat_core::matrix::IntMatrix;
use quadlat_core::shortvec::{vectors_of_norm, DEFAULT_VECTOR_CAP};
use quadlat_core::verdict::Verdict;
use quadlat_core::{Lattice, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(), String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn int(x: i64) -> BigInt {
    BigInt::from(x)
}

fn table(id: &str) -> Outcome {
    let c = verify::run_check(id).ok_or_else(|| format!("no check {id}"))?;
    ensure(c.pass, format!("verify-paper: expected {:?}, computed {:?}", c.expected, c.computed))
}

/// Elements of the discriminant group, found by closing the columns of `G⁻¹` mod 1.
fn oracle_group(l: &Lattice) -> Vec<Vec<BigRational>> {
    disc_group(&gram_i64(l))
}

fn oracle_q_histogram(l: &Lattice) -> Vec<BigRational> {
    let g = gram_i64(l);
    q_histogram(&g, &disc_group(&g))
}

fn is_two_torsion(x: &[BigRational]) -> bool {
    x.iter().all(|c| (c * BigRational::from_integer(int(2))).is_integer())
}

fn bb_table() -> Outcome {
    table("bb-table")?;
    let cases = [
        (DeformationType::K3n(2), vec![2]),
        (DeformationType::K3n(3), vec![4]),
        (DeformationType::K3n(10), vec![18]),
        (DeformationType::Kum(2), vec![6]),
        (DeformationType::Kum(3), vec![8]),
        (DeformationType::Og6, vec![2, 2]),
        (DeformationType::Og10, vec![3]),
    ];
    for (t, want) in cases {
        let l = bb(t).map_err(|e| e.to_string())?;
        let want: Vec<BigInt> = want.into_iter().map(int).collect();
        ensure(l.invariant_factors() == want, format!("{t}: {:?}", l.invariant_factors()))?;
        // size and exponent of the brute-force group
        let group = oracle_group(&l);
        let order: BigInt = want.iter().product();
        ensure(BigInt::from(group.len()) == order, format!("{t}: oracle group of size {}", group.len()))?;
        let exponent = want.last().unwrap();
        let has_full_order = group.iter().any(|x| {
            let den = x.iter().fold(BigInt::one(), |acc, c| num_integer::Integer::lcm(&acc, c.denom()));
            &den == exponent
        });
        ensure(has_full_order, format!("{t}: no element of order {exponent}"))?;
    }
    Ok(())
}

fn query(t: &Lattice) -> InducedQuery<'_> {
    InducedQuery {
        x_type: DeformationType::K3n(2),
        t_x: t,
        order: 3,
        mode: Mode::NonSymplectic,
        disc_action: DiscClass::Trivial,
        coinvariant: None,
        height: 3,
        group_cap: DEFAULT_GROUP_CAP,
        candidate_cap: DEFAULT_CANDIDATE_CAP,
    }
}

fn order3_a2() -> Outcome {
    table("order3-A2")?;
    let t = Lattice::rank_one(6).unwrap();
    let gl = primitive_gluings(&t, &Lattice::rank_one(2).unwrap(), Some(3), DEFAULT_GROUP_CAP).map_err(|e| e.to_string())?;
    ensure(gl.len() == 1, format!("{} gluings", gl.len()))?;
    let m = &gl[0].lattice;
    // the only even positive definite binary form of determinant 3 is A2
    let g = gram_i64(m);
    ensure(m.rank() == 2 && m.is_even() && g[0][0] > 0 && det(&g) == BigRational::from_integer(int(3)), format!("{m}"))?;
    ensure(contains_u(m, 3).unwrap().certificate() == Some(&UCertificate::Definite), "contains_U(A2) is not No(definite)")?;
    let r = induced_check(&query(&t)).map_err(|e| e.to_string())?;
    ensure(r.final_verdict == Final::NotInduced, format!("final {}", r.final_verdict.tag()))
}

fn order3_e6v() -> Outcome {
    table("order3-E6v")?;
    let e6v = e6_dual(&int(-3)).unwrap();
    let t = Lattice::rank_one(6).unwrap().direct_sum(&e6v);
    let target = a(2).unwrap().direct_sum(&e6v);
    let gl = primitive_gluings(&t, &Lattice::rank_one(2).unwrap(), Some(3), DEFAULT_GROUP_CAP).map_err(|e| e.to_string())?;
    ensure(gl.len() == 1, format!("{} gluings", gl.len()))?;
    let m = &gl[0].lattice;
    ensure(m.determinant() == target.determinant() && m.signature() == target.signature(), "invariants differ")?;
    ensure(oracle_q_histogram(m) == oracle_q_histogram(&target), "discriminant forms differ")?;
    // every element is 3-torsion, so l(A) is log_3 |A|
    let group = oracle_group(m);
    ensure(group.iter().all(|x| x.iter().all(|c| (c * BigRational::from_integer(int(3))).is_integer())), "not 3-elementary")?;
    ensure(group.len() == 729 && m.invariant_factors().len() == 6, format!("|A| = {}", group.len()))?;
    let r = induced_check(&query(&t)).map_err(|e| e.to_string())?;
    match (&r.final_verdict, &r.verdicts[..]) {
        (Final::NotInduced, [Verdict::No(c)]) => ensure(c.recheck(m), format!("certificate {c} does not recheck")),
        (Final::Unknown, [Verdict::Unknown(_)]) => Ok(()),
        (f, _) => Err(format!("final {}", f.tag())),
    }
}

fn beauville() -> Outcome {
    table("beauville-involution")?;
    let g = [[6i64, 0], [0, -4]];
    let p = [[5i64, 4], [-6, -5]];
    // PᵀGP = G by hand
    for i in 0..2 {
        for j in 0..2 {
            let s: i64 = (0..2).flat_map(|k| (0..2).map(move |l| (k, l))).map(|(k, l)| p[k][i] * g[k][l] * p[l][j]).sum();
            ensure(s == g[i][j], "P does not preserve G")?;
        }
    }
    let l = Lattice::from_i64(&g).unwrap();
    let iso = make_isometry(&l, IntMatrix::from_i64(&p)).map_err(|e| e.to_string())?;
    let (t, s) = invariant_and_coinvariant(&l, &[iso]).map_err(|e| e.to_string())?;
    let gv = |v: [i64; 2]| norm(&g.iter().map(|r| r.to_vec()).collect::<Vec<_>>(), &v);
    ensure(gv([1, -1]) == 2 && gv([2, -3]) == -12, "squares")?;
    ensure(t.contains(&Vector::from_i64(&[1, -1])) && t.rank() == 1, "invariant lattice")?;
    ensure(s.contains(&Vector::from_i64(&[2, -3])) && s.rank() == 1, "co-invariant lattice")?;
    // divisibility of 2H - 3δ in bb(K3[3]) with H = e + 3f: gcd of the pairings with the basis
    let big = bb(DeformationType::K3n(3)).unwrap();
    let gb = gram_i64(&big);
    let mut x = vec![0i64; big.rank()];
    x[0] = 2;
    x[1] = 6;
    x[big.rank() - 1] = -3;
    ensure(norm(&gb, &x) == -12, "square in bb")?;
    let pairings: Vec<BigInt> = gb.iter().map(|row| int(row.iter().zip(&x).map(|(a, b)| a * b).sum())).collect();
    ensure(gcd_all(&pairings) == int(2), format!("div {}", gcd_all(&pairings)))
}

fn e8_example() -> Outcome {
    table("e8-example")?;
    let left = Lattice::rank_one(2).unwrap().direct_sum(&e8().rescale(&int(-2)).unwrap());
    let right = Lattice::rank_one(2).unwrap().direct_sum(&Lattice::rank_one(-2).unwrap().power(8));
    for l in [&left, &right] {
        let group = oracle_group(l);
        ensure(group.len() == 512 && group.iter().all(|x| is_two_torsion(x)), "not (Z/2)^9")?;
        let inv = two_elementary_invariants(l).map_err(|e| e.to_string())?;
        ensure((inv.r, inv.a, inv.delta) == (9, 9, 1), format!("{inv}"))?;
    }
    ensure(oracle_q_histogram(&left) == oracle_q_histogram(&right), "q histograms differ")
}

fn epw_families() -> Outcome {
    table("epw-families")?;
    for k in 1..=10usize {
        let l = epw(k).unwrap();
        let group = oracle_group(&l);
        ensure(group.len() == 1 << (k + 1) && group.iter().all(|x| is_two_torsion(x)), format!("k = {k}"))?;
        let odd = group.iter().any(|x| !qform(&gram_i64(&l), x).is_integer());
        ensure(l.rank() == k + 1 && odd, format!("k = {k}: δ = 0"))?;
    }
    Ok(())
}

fn gamma_v_check() -> Outcome {
    table("gamma-v")?;
    let mut w = vec![BigInt::zero(); 24];
    w[0] = BigInt::one();
    w[1] = BigInt::one();
    let g = gamma_v(&lambda24(), &Vector(w)).map_err(|e| e.to_string())?;
    let m = &g.lattice;
    let gm = gram_i64(m);
    ensure(m.rank() == 24 && m.is_even(), "rank or parity")?;
    ensure(det(&gm).abs() == BigRational::from_integer(int(3)), format!("det {}", det(&gm)))?;
    let sig = m.signature();
    ensure((sig.positive, sig.negative) == (3, 21), format!("signature {sig}"))?;
    let og10 = bb(DeformationType::Og10).unwrap();
    ensure(oracle_q_histogram(m) == oracle_q_histogram(&og10), "discriminant forms differ")?;
    ensure(g.gluing.summands_primitive() && g.gluing.glue_order() == 2, "gluing")
}

fn lagrangian_table() -> Outcome {
    table("lagrangian-table")?;
    // U(2) halves to the even U, <2>+<-2> halves to an odd lattice
    let classify = |l: &Lattice| -> &'static str {
        let g = gram_i64(l);
        let d = det(&g);
        if d == BigRational::from_integer(int(-1)) && l.is_even() {
            return "U";
        }
        if d != BigRational::from_integer(int(-4)) || g.iter().flatten().any(|x| x % 2 != 0) {
            return "?";
        }
        if g[0][0] % 4 == 0 && g[1][1] % 4 == 0 {
            "U(2)"
        } else {
            "<2>+<-2>"
        }
    };
    for n in [2u64, 3, 4, 5] {
        let want = if n % 2 == 1 { "U(2)" } else { "<2>+<-2>" };
        for t in [DeformationType::K3n(n), DeformationType::Kum(n)] {
            let s = lagrangian_section_lattice(t).map_err(|e| e.to_string())?;
            ensure(classify(&s.lattice) == want && s.canonical_name == want, format!("{t}: {}", s.lattice))?;
        }
    }
    let s = lagrangian_section_lattice(DeformationType::K3n(2)).unwrap();
    ensure(s.t_square == int(-10), format!("T^2 = {}", s.t_square))?;
    let o = lagrangian_section_lattice(DeformationType::Og10).map_err(|e| e.to_string())?;
    ensure(classify(&o.lattice) == "U", format!("og10: {}", o.lattice))
}

fn no_section() -> Outcome {
    table("no-section-example")?;
    let l = bb(DeformationType::K3n(10)).unwrap();
    let g = gram_i64(&l);
    let mut f = vec![0i64; l.rank()];
    f[0] = 3;
    f[1] = 3;
    f[l.rank() - 1] = -1;
    let pairings: Vec<BigInt> = g.iter().map(|row| int(row.iter().zip(&f).map(|(a, b)| a * b).sum())).collect();
    ensure(norm(&g, &f) == 0 && gcd_all(&pairings) == int(3), "F")?;
    let ex = no_section_example(10).map_err(|e| e.to_string())?;
    // (T, F) = div(T) = 2 needs div(F) | 2
    ensure(!ex.section_pairing_possible && !ex.two_elementary_possible, "a section lattice was found")
}

fn mat_pow_is_identity(p: &IntMatrix, k: u32) -> bool {
    let mut acc = IntMatrix::identity(p.nrows());
    for _ in 0..k {
        acc = acc.mul(p);
    }
    acc == IntMatrix::identity(p.nrows())
}

fn torsion_property() -> Outcome {
    table("torsion-property")?;
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let u3 = Lattice::hyperbolic_plane().power(3);
    let ue8 = Lattice::hyperbolic_plane().direct_sum(&e8().rescale(&int(-1)).unwrap());
    let mut nontrivial = 0;
    for case in 0..50 {
        let (l, is_u3) = if case % 2 == 0 { (&u3, true) } else { (&ue8, false) };
        let g = verify::random_finite_isometry(&mut rng, l, is_u3).map_err(|e| e.to_string())?;
        let order = g.order();
        ensure(mat_pow_is_identity(g.matrix(), order), "g^order != 1")?;
        let (t, _) = invariant_and_coinvariant(l, &[g.clone()]).map_err(|e| e.to_string())?;
        if t.rank() == 0 {
            continue;
        }
        let tl = t.lattice().map_err(|e| e.to_string())?;
        let group = oracle_group(&tl);
        let k = BigRational::from_integer(int(order as i64));
        ensure(group.iter().all(|x| x.iter().all(|c| (c * &k).is_integer())), format!("case {case}: not {order}-torsion"))?;
        if group.len() > 1 {
            nontrivial += 1;
        }
    }
    ensure(nontrivial >= 10, format!("only {nontrivial} cases with a nontrivial discriminant group"))
}

fn overlattice_roundtrip() -> Outcome {
    table("overlattice-roundtrip")?;
    let corpus = overlattice_corpus();
    ensure(corpus.len() > 150, "corpus too small")?;
    for l in &corpus {
        let g = gram_i64(l);
        let oracle = isotropic_subgroups_oracle(&g, &disc_group(&g));
        let d = discriminant_form(l).unwrap();
        let ours = isotropic_subgroups(d.form(), DEFAULT_GROUP_CAP).map_err(|e| e.to_string())?;
        ensure(oracle.len() == ours.len(), format!("{l}: {} vs {} isotropic subgroups", oracle.len(), ours.len()))?;
    }
    Ok(())
}

fn random_definite(rng: &mut ChaCha8Rng) -> Lattice {
    loop {
        let n = rng.gen_range(1..=4);
        let b: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-2..=2)).collect()).collect();
        let mut g = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                g[i][j] = (0..n).map(|k| b[k][i] * b[k][j]).sum();
            }
        }
        if rng.gen_bool(0.5) {
            g.iter_mut().flatten().for_each(|x| *x = -*x);
        }
        if let Ok(l) = Lattice::from_i64(&g) {
            return l;
        }
    }
}

fn short_vector_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    for _ in 0..20 {
        let l = random_definite(&mut rng);
        let g = gram_i64(&l);
        let sign = if l.signature().positive > 0 { 1 } else { -1 };
        for n in 1..=8 {
            let got: Vec<Vec<i64>> = vectors_of_norm(&l, &int(sign * n), DEFAULT_VECTOR_CAP)
                .map_err(|e| e.to_string())?
                .iter()
                .map(to_vec_i64)
                .collect();
            ensure(got == box_vectors(&g, sign * n), format!("gram {g:?}, norm {}", sign * n))?;
        }
    }
    Ok(())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("bb-table", bb_table),
        ("order3-A2", order3_a2),
        ("order3-E6v", order3_e6v),
        ("beauville-involution", beauville),
        ("e8-example", e8_example),
        ("epw-families", epw_families),
        ("gamma-v", gamma_v_check),
        ("lagrangian-table", lagrangian_table),
        ("no-section-example", no_section),
        ("torsion-property", torsion_property),
        ("overlattice-roundtrip", overlattice_roundtrip),
        ("short-vector-oracle", short_vector_oracle),
    ];
    let mut failed = 0;
    for (id, f) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(()) => println!("PASS {id}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {id}: {msg}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
