#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use quadlat_core::matrix::IntMatrix;
use quadlat_core::{Lattice, Vector};
use rand::Rng;

pub fn rat(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

pub fn gram_i64(l: &Lattice) -> Vec<Vec<i64>> {
    let n = l.rank();
    (0..n).map(|i| (0..n).map(|j| l.gram()[(i, j)].to_i64().unwrap()).collect()).collect()
}

/// Gauss-Jordan inverse over the rationals.
pub fn inverse(g: &[Vec<i64>]) -> Vec<Vec<BigRational>> {
    let a: Vec<Vec<BigRational>> =
        g.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect()).collect();
    inverse_rat(&a)
}

pub fn inverse_rat(g: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let n = g.len();
    let mut a: Vec<Vec<BigRational>> = g
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero()).expect("singular");
        a.swap(c, p);
        let inv = a[c][c].recip();
        for x in a[c].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for k in 0..2 * n {
                    let t = &a[c][k] * &f;
                    a[r][k] = &a[r][k] - t;
                }
            }
        }
    }
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}

pub fn det(g: &[Vec<i64>]) -> BigRational {
    let n = g.len();
    let mut a: Vec<Vec<BigRational>> =
        g.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect()).collect();
    let mut d = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            a.swap(c, p);
            d = -d;
        }
        d = &d * &a[c][c];
        for r in c + 1..n {
            let f = &a[r][c] / &a[c][c];
            for k in c..n {
                let t = &a[c][k] * &f;
                a[r][k] = &a[r][k] - t;
            }
        }
    }
    d
}

pub fn norm(g: &[Vec<i64>], x: &[i64]) -> i64 {
    (0..x.len()).map(|i| (0..x.len()).map(|j| x[i] * g[i][j] * x[j]).sum::<i64>()).sum()
}

/// All vectors of square `n` in a definite lattice, by scanning the box
/// `|x_i| ≤ sqrt(|n| · |G⁻¹_ii|)`.
pub fn box_vectors(g: &[Vec<i64>], n: i64) -> Vec<Vec<i64>> {
    let inv = inverse(g);
    let bounds: Vec<i64> = (0..g.len())
        .map(|i| {
            let t = (&inv[i][i] * BigRational::from_integer(n.into())).abs();
            let mut b = 0i64;
            while BigRational::from_integer(((b + 1) * (b + 1)).into()) <= t {
                b += 1;
            }
            b
        })
        .collect();
    let mut out = Vec::new();
    let mut x: Vec<i64> = bounds.iter().map(|b| -b).collect();
    loop {
        if norm(g, &x) == n && x.iter().any(|&c| c != 0) {
            out.push(x.clone());
        }
        let mut i = 0;
        while i < x.len() {
            x[i] += 1;
            if x[i] <= bounds[i] {
                break;
            }
            x[i] = -bounds[i];
            i += 1;
        }
        if i == x.len() {
            break;
        }
    }
    out.sort();
    out
}

pub fn to_vec_i64(v: &Vector) -> Vec<i64> {
    v.0.iter().map(|c| c.to_i64().unwrap()).collect()
}

/// A random unimodular matrix: a product of elementary operations.
pub fn random_unimodular<R: Rng>(rng: &mut R, n: usize, steps: usize) -> IntMatrix {
    let mut p = IntMatrix::identity(n);
    if n < 2 {
        if rng.gen_bool(0.5) {
            p.negate_row(0);
        }
        return p;
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n);
        while j == i {
            j = rng.gen_range(0..n);
        }
        match rng.gen_range(0..3) {
            0 => p.add_row_multiple(i, j, &BigInt::from(rng.gen_range(-2i64..=2))),
            1 => p.swap_rows(i, j),
            _ => p.negate_row(i),
        }
    }
    p
}

pub fn conjugate(l: &Lattice, p: &IntMatrix) -> Lattice {
    Lattice::new(p.transpose().mul(l.gram()).mul(p)).unwrap()
}

/// The discriminant group by brute force: closure of the columns of `G⁻¹`
/// modulo `Z^n`, each element a coordinate vector with entries in `[0, 1)`.
pub fn disc_group(g: &[Vec<i64>]) -> Vec<Vec<BigRational>> {
    let inv = inverse(g);
    let n = g.len();
    let gens: Vec<Vec<BigRational>> = (0..n).map(|j| (0..n).map(|i| frac(&inv[i][j])).collect()).collect();
    closure(&gens, n)
}

pub fn frac(x: &BigRational) -> BigRational {
    x - x.floor()
}

pub fn closure(gens: &[Vec<BigRational>], n: usize) -> Vec<Vec<BigRational>> {
    let mut seen = vec![vec![BigRational::zero(); n]];
    let mut i = 0;
    while i < seen.len() {
        for g in gens {
            let s: Vec<BigRational> = seen[i].iter().zip(g).map(|(a, b)| frac(&(a + b))).collect();
            if !seen.contains(&s) {
                seen.push(s);
            }
        }
        i += 1;
    }
    seen.sort();
    seen
}

pub fn qform(g: &[Vec<i64>], x: &[BigRational]) -> BigRational {
    let n = x.len();
    let mut s = BigRational::zero();
    for i in 0..n {
        for j in 0..n {
            s += &x[i] * BigRational::from_integer(g[i][j].into()) * &x[j];
        }
    }
    s
}

pub fn mod2(x: &BigRational) -> BigRational {
    let two = BigRational::from_integer(2.into());
    x - (x / &two).floor() * two
}

pub fn bform(g: &[Vec<i64>], x: &[BigRational], y: &[BigRational]) -> BigRational {
    let n = x.len();
    let mut s = BigRational::zero();
    for i in 0..n {
        for j in 0..n {
            s += &x[i] * BigRational::from_integer(g[i][j].into()) * &y[j];
        }
    }
    s
}

/// Sorted multiset of `q` values mod 2 over a list of elements.
pub fn q_histogram(g: &[Vec<i64>], elems: &[Vec<BigRational>]) -> Vec<BigRational> {
    let mut h: Vec<BigRational> = elems.iter().map(|x| mod2(&qform(g, x))).collect();
    h.sort();
    h
}

pub fn gcd_all(xs: &[BigInt]) -> BigInt {
    xs.iter().fold(BigInt::zero(), |a, b| a.gcd(b))
}

/// All isotropic subgroups of a brute-force discriminant group, each as a
/// sorted element list; grown one generator at a time.
pub fn isotropic_subgroups_oracle(g: &[Vec<i64>], group: &[Vec<BigRational>]) -> Vec<Vec<Vec<BigRational>>> {
    let n = g.len();
    let zero2 = BigRational::zero();
    let iso: Vec<&Vec<BigRational>> = group.iter().filter(|x| mod2(&qform(g, x)) == zero2).collect();
    let mut found = vec![vec![vec![BigRational::zero(); n]]];
    let mut i = 0;
    while i < found.len() {
        let cur = found[i].clone();
        for x in &iso {
            if cur.contains(x) {
                continue;
            }
            let mut gens = cur.clone();
            gens.push((*x).clone());
            let h = closure(&gens, n);
            if h.iter().all(|y| mod2(&qform(g, y)) == zero2) && !found.contains(&h) {
                found.push(h);
            }
        }
        i += 1;
    }
    found.sort();
    found
}

pub fn frac_vec(x: &[BigRational]) -> Vec<BigRational> {
    x.iter().map(frac).collect()
}

/// Even lattices of rank at most 4 with `|det| ≤ 48`.
pub fn overlattice_corpus() -> Vec<Lattice> {
    let mut out: Vec<Lattice> = Vec::new();
    let mut push = |l: Lattice| {
        if l.is_even() && l.determinant().abs() <= BigInt::from(48) && !out.contains(&l) {
            out.push(l);
        }
    };
    for k in 1..=24i64 {
        push(Lattice::rank_one(2 * k).unwrap());
        push(Lattice::rank_one(-2 * k).unwrap());
    }
    for a in -3i64..=3 {
        for b in 0i64..=3 {
            for c in a..=3 {
                if let Ok(l) = Lattice::from_i64(&[[2 * a, b], [b, 2 * c]]) {
                    push(l);
                }
            }
        }
    }
    let pieces: Vec<Lattice> = vec![
        Lattice::rank_one(2).unwrap(),
        Lattice::rank_one(-2).unwrap(),
        Lattice::rank_one(4).unwrap(),
        Lattice::rank_one(-6).unwrap(),
        Lattice::hyperbolic_plane(),
        Lattice::from_i64(&[[0, 2], [2, 0]]).unwrap(),
        Lattice::from_i64(&[[2, 1], [1, 2]]).unwrap(),
        Lattice::from_i64(&[[-2, 1], [1, -2]]).unwrap(),
        Lattice::from_i64(&[[2, -1, 0], [-1, 2, -1], [0, -1, 2]]).unwrap(),
        Lattice::from_i64(&[[2, 0, -1, 0], [0, 2, -1, 0], [-1, -1, 2, -1], [0, 0, -1, 2]]).unwrap(),
    ];
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
