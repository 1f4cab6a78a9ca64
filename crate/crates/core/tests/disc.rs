mod common;

use common::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use quadlat_core::catalog::{e8, epw};
use quadlat_core::disc::{
    discriminant_form, isotropic_subgroups, nikulin_equal, overlattice_from_isotropic, primitive_gluings,
    two_elementary_invariants, DiscriminantForm, TwoElemInvariants, DEFAULT_GROUP_CAP,
};
use quadlat_core::{Error, Lattice};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn int(x: i64) -> BigInt {
    BigInt::from(x)
}

fn even_lattice() -> impl Strategy<Value = Lattice> {
    (1usize..=4).prop_flat_map(|n| {
        prop::collection::vec(-5i64..=5, n * n).prop_filter_map("degenerate", move |xs| {
            let mut rows = vec![vec![0i64; n]; n];
            for i in 0..n {
                for j in i..n {
                    let v = if i == j { 2 * xs[i * n + j] } else { xs[i * n + j] };
                    rows[i][j] = v;
                    rows[j][i] = v;
                }
            }
            Lattice::from_i64(&rows).ok()
        })
    })
}

/// Library elements of `A_L`, mapped to fractional coordinates.
fn library_group(d: &DiscriminantForm) -> Vec<Vec<BigRational>> {
    let mut out: Vec<Vec<BigRational>> =
        d.form().elements(DEFAULT_GROUP_CAP).unwrap().iter().map(|x| frac_vec(&d.lift(x))).collect();
    out.sort();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn group_order_is_det_and_form_is_consistent(l in even_lattice()) {
        prop_assume!(l.determinant().abs() <= int(400));
        let d = discriminant_form(&l).unwrap();
        let f = d.form();
        prop_assert_eq!(f.order(), l.determinant().abs());
        let two = BigRational::from_integer(int(2));
        for i in 0..f.length() {
            for j in 0..f.length() {
                let mut x = vec![BigInt::zero(); f.length()];
                let mut y = x.clone();
                x[i] += 1;
                y[j] += 1;
                let s: Vec<BigInt> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
                let lhs = f.q_value(&s) - f.q_value(&x) - f.q_value(&y) - &two * f.b_value(&x, &y);
                prop_assert!((lhs / &two).is_integer());
            }
        }
    }

    #[test]
    fn disc_form_matches_brute_force(l in even_lattice()) {
        prop_assume!(l.determinant().abs() <= int(64));
        let g = gram_i64(&l);
        let d = discriminant_form(&l).unwrap();
        let oracle = disc_group(&g);
        prop_assert_eq!(library_group(&d), oracle.clone());
        let mut lib_q: Vec<BigRational> = d
            .form()
            .elements(DEFAULT_GROUP_CAP)
            .unwrap()
            .iter()
            .map(|x| d.form().q_value(&x.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>()))
            .collect();
        lib_q.sort();
        prop_assert_eq!(lib_q, q_histogram(&g, &oracle));
    }

    #[test]
    fn two_elementary_invariants_survive_base_change(k in 0usize..4, seed in 0u64..1000) {
        let pieces = [
            Lattice::rank_one(2).unwrap(),
            Lattice::rank_one(-2).unwrap(),
            Lattice::from_i64(&[[0, 2], [2, 0]]).unwrap(),
            Lattice::hyperbolic_plane(),
        ];
        let mut l = pieces[k].clone();
        for p in pieces.iter().skip(k % 2) {
            l = l.direct_sum(p);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_unimodular(&mut rng, l.rank(), 6);
        let m = conjugate(&l, &p);
        prop_assert_eq!(two_elementary_invariants(&l).unwrap(), two_elementary_invariants(&m).unwrap());
    }
}

#[test]
fn overlattice_roundtrip_on_corpus() {
    let corpus = overlattice_corpus();
    assert!(corpus.len() > 150, "corpus size {}", corpus.len());
    let mut nontrivial = 0;
    for l in &corpus {
        let g = gram_i64(l);
        let d = discriminant_form(l).unwrap();
        let group = disc_group(&g);
        let subgroups = isotropic_subgroups(d.form(), DEFAULT_GROUP_CAP).unwrap();
        let mut mapped: Vec<Vec<Vec<BigRational>>> = subgroups
            .iter()
            .map(|h| {
                let mut e: Vec<Vec<BigRational>> = h.elements().iter().map(|x| frac_vec(&d.lift(x))).collect();
                e.sort();
                e
            })
            .collect();
        mapped.sort();
        assert_eq!(mapped, isotropic_subgroups_oracle(&g, &group), "gram {g:?}");

        for (h, hs) in subgroups.iter().zip(subgroups.iter().map(|h| {
            let mut e: Vec<Vec<BigRational>> = h.elements().iter().map(|x| frac_vec(&d.lift(x))).collect();
            e.sort();
            e
        })) {
            let over = overlattice_from_isotropic(&d, h, DEFAULT_GROUP_CAP).unwrap();
            let m = &over.lattice;
            let order = h.order() as i64;
            assert!(m.is_even());
            assert_eq!(over.index, order as u64);
            assert_eq!(m.determinant().abs() * int(order * order), l.determinant().abs());
            // M = B L B^T and L ⊆ M
            let n = l.rank();
            let b: Vec<Vec<BigRational>> = (0..n).map(|i| (0..n).map(|j| over.basis[(i, j)].clone()).collect()).collect();
            for i in 0..n {
                for j in 0..n {
                    let v: BigRational = (0..n)
                        .flat_map(|k| (0..n).map(move |t| (k, t)))
                        .map(|(k, t)| &b[i][k] * BigRational::from_integer(int(g[k][t])) * &b[j][t])
                        .sum();
                    assert_eq!(v, BigRational::from_integer(m.gram()[(i, j)].clone()));
                }
            }
            let binv = inverse_rat(&b);
            assert!(binv.iter().flatten().all(|x| x.is_integer()), "L ⊄ M");
            // disc form of M against H^⊥/H computed in A_L
            let perp: Vec<Vec<BigRational>> = group
                .iter()
                .filter(|x| hs.iter().all(|y| bform(&g, x, y).is_integer()))
                .cloned()
                .collect();
            let gm = gram_i64(m);
            let am = disc_group(&gm);
            assert_eq!(perp.len(), am.len() * hs.len());
            let mut expected: Vec<BigRational> =
                q_histogram(&gm, &am).into_iter().flat_map(|q| std::iter::repeat(q).take(hs.len())).collect();
            expected.sort();
            assert_eq!(q_histogram(&g, &perp), expected, "gram {g:?}");
            if h.order() > 1 {
                nontrivial += 1;
            }
        }
    }
    assert!(nontrivial > 20);
}

/// The glue subgroups of T ⊕ W meet neither summand's discriminant group.
#[test]
fn gluings_are_the_transversal_isotropic_subgroups() {
    let cases = [
        (Lattice::rank_one(6).unwrap(), Lattice::rank_one(2).unwrap()),
        (Lattice::from_i64(&[[0, 2], [2, 0]]).unwrap(), Lattice::rank_one(2).unwrap()),
        (Lattice::rank_one(2).unwrap(), Lattice::rank_one(-2).unwrap()),
        (Lattice::rank_one(4).unwrap(), Lattice::rank_one(-4).unwrap()),
        (Lattice::from_i64(&[[2, 1], [1, 2]]).unwrap(), Lattice::rank_one(-6).unwrap()),
        (Lattice::rank_one(2).unwrap().power(2), Lattice::rank_one(-2).unwrap().power(2)),
        (Lattice::rank_one(12).unwrap(), Lattice::rank_one(-4).unwrap()),
    ];
    for (t, w) in &cases {
        let sum = t.direct_sum(w);
        let g = gram_i64(&sum);
        let group = disc_group(&g);
        let tr = t.rank();
        let mut expected: Vec<Vec<Vec<BigRational>>> = isotropic_subgroups_oracle(&g, &group)
            .into_iter()
            .filter(|h| {
                h.iter().all(|x| {
                    let t_zero = x[..tr].iter().all(Zero::is_zero);
                    let w_zero = x[tr..].iter().all(Zero::is_zero);
                    t_zero == w_zero
                })
            })
            .collect();
        expected.sort();
        let ds = discriminant_form(&sum).unwrap();
        let gluings = primitive_gluings(t, w, None, DEFAULT_GROUP_CAP).unwrap();
        let mut got: Vec<Vec<Vec<BigRational>>> = gluings
            .iter()
            .map(|gl| {
                let mut e: Vec<Vec<BigRational>> = gl.glue.elements().iter().map(|x| frac_vec(&ds.lift(x))).collect();
                e.sort();
                e
            })
            .collect();
        got.sort();
        assert_eq!(got, expected, "{:?} + {:?}", t.gram(), w.gram());
        for gl in &gluings {
            assert!(gl.summands_primitive());
            assert!(gl.lattice.is_even());
        }
    }
}

#[test]
fn disc_form_examples() {
    assert!(discriminant_form(&Lattice::hyperbolic_plane()).unwrap().form().is_trivial());
    let k = quadlat_core::catalog::bb(quadlat_core::catalog::DeformationType::K3n(2)).unwrap();
    let f = discriminant_form(&k).unwrap();
    assert_eq!(f.form().orders(), &[int(2)]);
    assert_eq!(f.form().q_generator(0), &BigRational::new(int(3), int(2)));
    let o = quadlat_core::catalog::bb(quadlat_core::catalog::DeformationType::Og10).unwrap();
    let f = discriminant_form(&o).unwrap();
    assert_eq!(f.form().orders(), &[int(3)]);
    assert_eq!(f.form().q_generator(0), &BigRational::new(int(4), int(3)));
    assert!(matches!(discriminant_form(&Lattice::rank_one(3).unwrap()), Err(Error::OddLattice)));
}

#[test]
fn two_elementary_examples() {
    let u2 = Lattice::from_i64(&[[0, 2], [2, 0]]).unwrap();
    assert_eq!(two_elementary_invariants(&u2).unwrap(), TwoElemInvariants::new(2, 2, 0).unwrap());
    let pm = Lattice::from_i64(&[[2, 0], [0, -2]]).unwrap();
    assert_eq!(two_elementary_invariants(&pm).unwrap(), TwoElemInvariants::new(2, 2, 1).unwrap());
    let a = Lattice::rank_one(2).unwrap().direct_sum(&e8().rescale(&int(-2)).unwrap());
    let b = Lattice::rank_one(2).unwrap().direct_sum(&Lattice::rank_one(-2).unwrap().power(8));
    let nine = TwoElemInvariants::new(9, 9, 1).unwrap();
    assert_eq!(two_elementary_invariants(&a).unwrap(), nine);
    assert_eq!(two_elementary_invariants(&b).unwrap(), nine);
    assert!(nikulin_equal(&a, &b).unwrap());
    for k in 1..=10 {
        let inv = two_elementary_invariants(&epw(k).unwrap()).unwrap();
        assert_eq!(inv, TwoElemInvariants::new(k + 1, k + 1, 1).unwrap());
    }
    assert!(matches!(two_elementary_invariants(&Lattice::rank_one(6).unwrap()), Err(Error::NotTwoElementary)));
    assert!(matches!(nikulin_equal(&u2, &Lattice::rank_one(2).unwrap().power(2)), Err(Error::DefiniteLattice) | Err(Error::RankMismatch { .. })));
}

#[test]
fn isotropic_subgroup_examples() {
    let l = Lattice::rank_one(6).unwrap().direct_sum(&Lattice::rank_one(2).unwrap());
    let d = discriminant_form(&l).unwrap();
    let subs = isotropic_subgroups(d.form(), DEFAULT_GROUP_CAP).unwrap();
    assert_eq!(subs.iter().map(|h| h.order()).collect::<Vec<_>>(), vec![1, 2]);
    let a2 = overlattice_from_isotropic(&d, &subs[1], DEFAULT_GROUP_CAP).unwrap().lattice;
    assert_eq!(a2.determinant(), int(3));
    assert!(a2.is_definite());
    let g = primitive_gluings(&Lattice::rank_one(6).unwrap(), &Lattice::rank_one(2).unwrap(), Some(3), DEFAULT_GROUP_CAP).unwrap();
    assert_eq!(g.len(), 1);
    assert_eq!(g[0].lattice.determinant(), int(3));
    let u2 = Lattice::from_i64(&[[0, 2], [2, 0]]).unwrap();
    let g = primitive_gluings(&u2, &Lattice::rank_one(2).unwrap(), Some(2), DEFAULT_GROUP_CAP).unwrap();
    assert_eq!(g.len(), 1);
    assert_eq!(g[0].glue_order(), 1);
}
