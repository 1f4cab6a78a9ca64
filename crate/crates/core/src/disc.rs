//! Discriminant groups of even lattices and their quadratic forms.
//!
//! `A_L = L^∨/L` is computed from the Smith form `U G V = D` of the Gram
//! matrix: the generator of the factor `Z/dᵢ` lifts to the dual vector
//! `V eᵢ / dᵢ`, and a dual vector `x` has class `(U G x) mod d`. Values of
//! the quadratic form live in `Q/2Z`, values of the bilinear form in `Q/Z`;
//! both are kept as exact reduced rationals.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::matrix::{IntMatrix, RatMatrix};

/// Default bound on `|A|` for anything that enumerates group elements.
pub const DEFAULT_GROUP_CAP: u64 = 10_000;

const SUBGROUP_COUNT_CAP: usize = 200_000;
const ISOMETRY_NODE_CAP: u64 = 5_000_000;

/// Reduces a rational into `[0, m)`.
fn reduce_mod(x: &BigRational, m: i64) -> BigRational {
    let m = BigRational::from_integer(BigInt::from(m));
    let k = (x / &m).floor();
    x - k * m
}

pub(crate) fn mod2(x: &BigRational) -> BigRational {
    reduce_mod(x, 2)
}

pub(crate) fn mod1(x: &BigRational) -> BigRational {
    reduce_mod(x, 1)
}

/// A finite abelian group `⊕ Z/dᵢ` (with `d₁ | d₂ | …`) carrying a
/// `Q/2Z`-valued quadratic form and its `Q/Z`-valued bilinear form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteQuadraticForm {
    orders: Vec<BigInt>,
    q: Vec<BigRational>,
    b: Vec<Vec<BigRational>>,
}

impl FiniteQuadraticForm {
    pub fn new(orders: Vec<BigInt>, q: Vec<BigRational>, b: Vec<Vec<BigRational>>) -> Result<Self> {
        let n = orders.len();
        if q.len() != n || b.len() != n || b.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: q.len() });
        }
        if orders.iter().any(|d| *d <= BigInt::one()) {
            return Err(Error::InvalidParameter("invariant factors must exceed 1".into()));
        }
        if orders.windows(2).any(|w| !w[1].is_multiple_of(&w[0])) {
            return Err(Error::InvalidParameter("invariant factors must form a divisor chain".into()));
        }
        let q: Vec<BigRational> = q.iter().map(mod2).collect();
        let b: Vec<Vec<BigRational>> = b.iter().map(|r| r.iter().map(mod1).collect()).collect();
        for i in 0..n {
            let d = BigRational::from_integer(orders[i].clone());
            // q(x) ≡ b(x, x) mod 1, and d·gᵢ = 0 forces d²q ≡ 0 mod 2 and d·b ≡ 0 mod 1
            if !mod1(&(&q[i] - &b[i][i])).is_zero() || !mod2(&(&d * &d * &q[i])).is_zero() {
                return Err(Error::InvalidParameter(format!("inconsistent value on generator {i}")));
            }
            for j in 0..n {
                if b[i][j] != b[j][i] || !mod1(&(&d * &b[i][j])).is_zero() {
                    return Err(Error::InvalidParameter(format!("inconsistent pairing ({i},{j})")));
                }
            }
        }
        Ok(FiniteQuadraticForm { orders, q, b })
    }

    pub fn trivial() -> Self {
        FiniteQuadraticForm { orders: vec![], q: vec![], b: vec![] }
    }

    pub fn orders(&self) -> &[BigInt] {
        &self.orders
    }

    /// `|A|`.
    pub fn order(&self) -> BigInt {
        self.orders.iter().product()
    }

    /// Minimal number of generators `l(A)`.
    pub fn length(&self) -> usize {
        self.orders.len()
    }

    pub fn exponent(&self) -> BigInt {
        self.orders.last().cloned().unwrap_or_else(BigInt::one)
    }

    pub fn is_trivial(&self) -> bool {
        self.orders.is_empty()
    }

    pub fn is_two_elementary(&self) -> bool {
        self.orders.iter().all(|d| *d == BigInt::from(2))
    }

    /// `q(gᵢ)` in `[0, 2)`.
    pub fn q_generator(&self, i: usize) -> &BigRational {
        &self.q[i]
    }

    /// `b(gᵢ, gⱼ)` in `[0, 1)`.
    pub fn b_generator(&self, i: usize, j: usize) -> &BigRational {
        &self.b[i][j]
    }

    /// `q(x)` for `x = Σ xᵢ gᵢ`, reduced into `[0, 2)`.
    pub fn q_value(&self, x: &[BigInt]) -> BigRational {
        let mut s = BigRational::zero();
        for i in 0..x.len() {
            let xi = BigRational::from_integer(x[i].clone());
            s += &xi * &xi * &self.q[i];
            for j in i + 1..x.len() {
                let xj = BigRational::from_integer(x[j].clone());
                s += BigRational::from_integer(BigInt::from(2)) * &xi * &xj * &self.b[i][j];
            }
        }
        mod2(&s)
    }

    /// `b(x, y)` reduced into `[0, 1)`.
    pub fn b_value(&self, x: &[BigInt], y: &[BigInt]) -> BigRational {
        let mut s = BigRational::zero();
        for i in 0..x.len() {
            for j in 0..y.len() {
                s += BigRational::from_integer(&x[i] * &y[j]) * &self.b[i][j];
            }
        }
        mod1(&s)
    }

    /// The form `-q` on the same group.
    pub fn negated(&self) -> Self {
        FiniteQuadraticForm {
            orders: self.orders.clone(),
            q: self.q.iter().map(|x| mod2(&-x)).collect(),
            b: self.b.iter().map(|r| r.iter().map(|x| mod1(&-x)).collect()).collect(),
        }
    }

    /// Elements as coordinate tuples, in lexicographic order. Fails if `|A| > cap`.
    pub fn elements(&self, cap: u64) -> Result<Vec<Vec<u64>>> {
        let a = Arith::new(self, cap)?;
        Ok((0..a.size).map(|i| a.decode(i)).collect())
    }

    /// Decides whether two finite quadratic forms are isometric, prime by prime.
    pub fn is_isometric(&self, other: &FiniteQuadraticForm, cap: u64) -> Result<bool> {
        if self.orders != other.orders {
            return Ok(false);
        }
        if self.is_trivial() {
            return Ok(true);
        }
        let a = Arith::new(self, cap)?;
        let b = Arith::new(other, cap)?;
        if a.histogram() != b.histogram() {
            return Ok(false);
        }
        for p in prime_factors(a.exponent) {
            if !p_parts_isometric(&a, &b, p)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for FiniteQuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .orders
            .iter()
            .zip(&self.q)
            .map(|(d, q)| format!("Z/{d}[q={q}]"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Small-integer arithmetic on a finite quadratic form: values are kept as
/// numerators over the exponent `e` of the group (`q` mod `2e`, `b` mod `e`).
#[derive(Clone, Debug)]
pub(crate) struct Arith {
    pub orders: Vec<u64>,
    pub exponent: u64,
    pub size: usize,
    qn: Vec<i128>,
    bn: Vec<Vec<i128>>,
}

impl Arith {
    pub fn new(f: &FiniteQuadraticForm, cap: u64) -> Result<Self> {
        let size = f.order();
        if size > BigInt::from(cap) {
            return Err(Error::CapExceeded { cap });
        }
        let orders: Vec<u64> = f.orders.iter().map(|d| d.to_u64().unwrap()).collect();
        let e = f.exponent();
        let er = BigRational::from_integer(e.clone());
        let to_num = |x: &BigRational| -> i128 {
            let n = x * &er;
            debug_assert!(n.is_integer());
            n.to_integer().to_i128().unwrap()
        };
        let exponent = e.to_u64().unwrap();
        Ok(Arith {
            size: size.to_usize().unwrap(),
            qn: f.q.iter().map(to_num).collect(),
            bn: f.b.iter().map(|r| r.iter().map(to_num).collect()).collect(),
            orders,
            exponent,
        })
    }

    pub fn decode(&self, mut idx: usize) -> Vec<u64> {
        let mut x = vec![0; self.orders.len()];
        for i in (0..self.orders.len()).rev() {
            let d = self.orders[i] as usize;
            x[i] = (idx % d) as u64;
            idx /= d;
        }
        x
    }

    pub fn encode(&self, x: &[u64]) -> usize {
        x.iter().zip(&self.orders).fold(0usize, |acc, (&xi, &d)| acc * d as usize + xi as usize)
    }

    pub fn add(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        x.iter().zip(y).zip(&self.orders).map(|((a, b), d)| (a + b) % d).collect()
    }

    pub fn element_order(&self, x: &[u64]) -> u64 {
        x.iter().zip(&self.orders).fold(1u64, |acc, (&a, &d)| acc.lcm(&(d / a.gcd(&d))))
    }

    /// `q(x)·e mod 2e`.
    pub fn q(&self, x: &[u64]) -> i128 {
        let m = 2 * self.exponent as i128;
        let mut s: i128 = 0;
        for i in 0..x.len() {
            let xi = x[i] as i128;
            s = (s + xi * xi % m * self.qn[i]) % m;
            for j in i + 1..x.len() {
                s = (s + 2 * xi * (x[j] as i128) % m * self.bn[i][j]) % m;
            }
        }
        s.rem_euclid(m)
    }

    /// `b(x, y)·e mod e`.
    pub fn b(&self, x: &[u64], y: &[u64]) -> i128 {
        let m = self.exponent as i128;
        let mut s: i128 = 0;
        for i in 0..x.len() {
            if x[i] == 0 {
                continue;
            }
            for j in 0..y.len() {
                s = (s + (x[i] as i128) * (y[j] as i128) % m * self.bn[i][j]) % m;
            }
        }
        s.rem_euclid(m)
    }

    /// Rational value of `q(x)` in `[0, 2)`.
    pub fn q_rational(&self, x: &[u64]) -> BigRational {
        BigRational::new(BigInt::from(self.q(x)), BigInt::from(self.exponent))
    }

    fn histogram(&self) -> Vec<(u64, i128, usize)> {
        let mut counts = std::collections::BTreeMap::new();
        for i in 0..self.size {
            let x = self.decode(i);
            *counts.entry((self.element_order(&x), self.q(&x))).or_insert(0usize) += 1;
        }
        counts.into_iter().map(|((o, q), c)| (o, q, c)).collect()
    }

    /// The subgroup generated by `base` (as a membership mask) and `x`.
    fn extend(&self, base: &[usize], x: &[u64]) -> Vec<usize> {
        let mut mask = vec![false; self.size];
        let ord = self.element_order(x);
        let mut out = Vec::new();
        for &h in base {
            let hv = self.decode(h);
            let mut cur = hv.clone();
            for _ in 0..ord {
                let idx = self.encode(&cur);
                if !mask[idx] {
                    mask[idx] = true;
                    out.push(idx);
                }
                cur = self.add(&cur, x);
            }
        }
        out.sort_unstable();
        out
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Generators of the p-primary part: `(dᵢ / p^vᵢ)·gᵢ` for each factor divisible by `p`.
fn p_part_generators(a: &Arith, p: u64) -> Vec<Vec<u64>> {
    let n = a.orders.len();
    let mut gens = Vec::new();
    for i in 0..n {
        let d = a.orders[i];
        if d % p != 0 {
            continue;
        }
        let mut pp = 1;
        while d % (pp * p) == 0 {
            pp *= p;
        }
        let mut g = vec![0; n];
        g[i] = (d / pp) % d;
        gens.push(g);
    }
    gens
}

fn p_parts_isometric(a: &Arith, b: &Arith, p: u64) -> Result<bool> {
    let ga = p_part_generators(a, p);
    let gb_part: Vec<Vec<u64>> = {
        // elements of B's p-part: order a power of p
        (0..b.size)
            .map(|i| b.decode(i))
            .filter(|x| {
                let mut o = b.element_order(x);
                while o % p == 0 {
                    o /= p;
                }
                o == 1
            })
            .collect()
    };
    let target_size = gb_part.len();
    let candidates: Vec<Vec<&Vec<u64>>> = ga
        .iter()
        .map(|g| {
            let (o, q) = (a.element_order(g), a.q(g));
            gb_part.iter().filter(|y| b.element_order(y) == o && b.q(y) == q).collect()
        })
        .collect();
    let mut images: Vec<Vec<u64>> = Vec::new();
    let mut nodes = 0u64;
    fn dfs(
        a: &Arith,
        b: &Arith,
        ga: &[Vec<u64>],
        cands: &[Vec<&Vec<u64>>],
        images: &mut Vec<Vec<u64>>,
        target: usize,
        nodes: &mut u64,
    ) -> Result<bool> {
        *nodes += 1;
        if *nodes > ISOMETRY_NODE_CAP {
            return Err(Error::CapExceeded { cap: ISOMETRY_NODE_CAP });
        }
        let k = images.len();
        if k == ga.len() {
            let mut span = vec![b.encode(&vec![0; b.orders.len()])];
            for y in images.iter() {
                span = b.extend(&span, y);
            }
            return Ok(span.len() == target);
        }
        for &y in &cands[k] {
            let ok = (0..k).all(|j| b.b(y, &images[j]) == a.b(&ga[k], &ga[j]));
            if !ok {
                continue;
            }
            images.push(y.clone());
            if dfs(a, b, ga, cands, images, target, nodes)? {
                return Ok(true);
            }
            images.pop();
        }
        Ok(false)
    }
    dfs(a, b, &ga, &candidates, &mut images, target_size, &mut nodes)
}

/// A subgroup of a finite quadratic form, stored with all of its elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DiscSubgroup {
    generators: Vec<Vec<u64>>,
    elements: Vec<Vec<u64>>,
}

impl DiscSubgroup {
    /// The subgroup generated by `generators` inside `form`.
    pub fn generated_by(form: &FiniteQuadraticForm, generators: Vec<Vec<u64>>, cap: u64) -> Result<Self> {
        let a = Arith::new(form, cap)?;
        for g in &generators {
            if g.len() != a.orders.len() {
                return Err(Error::DimensionMismatch { expected: a.orders.len(), found: g.len() });
            }
        }
        let generators: Vec<Vec<u64>> =
            generators.into_iter().map(|g| g.iter().zip(&a.orders).map(|(x, d)| x % d).collect()).collect();
        let mut span = vec![0usize];
        for g in &generators {
            span = a.extend(&span, g);
        }
        let elements = span.into_iter().map(|i| a.decode(i)).collect();
        Ok(DiscSubgroup { generators, elements })
    }

    pub fn trivial(form: &FiniteQuadraticForm) -> Self {
        DiscSubgroup { generators: vec![], elements: vec![vec![0; form.length()]] }
    }

    pub fn generators(&self) -> &[Vec<u64>] {
        &self.generators
    }

    /// All elements, sorted lexicographically.
    pub fn elements(&self) -> &[Vec<u64>] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, x: &[u64]) -> bool {
        self.elements.binary_search_by(|e| e.as_slice().cmp(x)).is_ok()
    }

    pub fn is_isotropic(&self, form: &FiniteQuadraticForm) -> bool {
        let to_big = |x: &Vec<u64>| x.iter().map(|&v| BigInt::from(v)).collect::<Vec<_>>();
        self.elements.iter().all(|x| form.q_value(&to_big(x)).is_zero())
    }
}

/// The discriminant form of a lattice together with the data needed to move
/// between dual vectors and group elements.
#[derive(Clone, Debug)]
pub struct DiscriminantForm {
    lattice: Lattice,
    form: FiniteQuadraticForm,
    /// Generator lifts in `L^∨`, in lattice coordinates.
    lifts: Vec<Vec<BigRational>>,
    /// Rows of `U` for the nontrivial invariant factors.
    reduce: Vec<Vec<BigInt>>,
}

impl DiscriminantForm {
    pub fn form(&self) -> &FiniteQuadraticForm {
        &self.form
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn lifts(&self) -> &[Vec<BigRational>] {
        &self.lifts
    }

    /// Class in `A_L` of a dual vector given in lattice coordinates.
    pub fn class_of(&self, x: &[BigRational]) -> Result<Vec<BigInt>> {
        let g = self.lattice.gram().to_rational();
        let y = g.mul_vec(x);
        if y.iter().any(|v| !v.is_integer()) {
            return Err(Error::InvalidParameter("vector is not in the dual lattice".into()));
        }
        let y: Vec<BigInt> = y.into_iter().map(|v| v.to_integer()).collect();
        Ok(self
            .reduce
            .iter()
            .zip(self.form.orders())
            .map(|(row, d)| row.iter().zip(&y).map(|(a, b)| a * b).sum::<BigInt>().mod_floor(d))
            .collect())
    }

    /// Lift of a group element to a dual vector (lattice coordinates).
    pub fn lift(&self, x: &[u64]) -> Vec<BigRational> {
        let n = self.lattice.rank();
        let mut v = vec![BigRational::zero(); n];
        for (c, l) in x.iter().zip(&self.lifts) {
            if *c == 0 {
                continue;
            }
            let c = BigRational::from_integer(BigInt::from(*c));
            for k in 0..n {
                v[k] += &c * &l[k];
            }
        }
        v
    }

    pub fn class_of_small(&self, x: &[BigRational]) -> Result<Vec<u64>> {
        Ok(self.class_of(x)?.iter().map(|v| v.to_u64().unwrap()).collect())
    }
}

/// Computes `(A_L, q_L)` for an even nondegenerate lattice.
pub fn discriminant_form(l: &Lattice) -> Result<DiscriminantForm> {
    if l.is_degenerate() {
        return Err(Error::DegenerateLattice);
    }
    if !l.is_even() {
        return Err(Error::OddLattice);
    }
    let n = l.rank();
    let s = l.gram().smith();
    let idx: Vec<usize> = (0..n).filter(|&i| !s.diag[i].is_one()).collect();
    let orders: Vec<BigInt> = idx.iter().map(|&i| s.diag[i].clone()).collect();
    let lifts: Vec<Vec<BigRational>> = idx
        .iter()
        .map(|&i| (0..n).map(|k| BigRational::new(s.v[(k, i)].clone(), s.diag[i].clone())).collect())
        .collect();
    let reduce: Vec<Vec<BigInt>> = idx.iter().map(|&i| s.u.row(i).to_vec()).collect();
    let g = l.gram().to_rational();
    let pair = |x: &[BigRational], y: &[BigRational]| -> BigRational {
        x.iter().zip(&g.mul_vec(y)).map(|(a, b)| a * b).sum()
    };
    let m = lifts.len();
    let q: Vec<BigRational> = lifts.iter().map(|x| pair(x, x)).collect();
    let b: Vec<Vec<BigRational>> =
        (0..m).map(|i| (0..m).map(|j| pair(&lifts[i], &lifts[j])).collect()).collect();
    // q(gᵢ + gⱼ) - q(gᵢ) - q(gⱼ) ≡ 2 b(gᵢ, gⱼ) mod 2, evaluated on the actual lifts
    for i in 0..m {
        for j in 0..m {
            let sum: Vec<BigRational> = lifts[i].iter().zip(&lifts[j]).map(|(a, c)| a + c).collect();
            let lhs = pair(&sum, &sum) - &q[i] - &q[j];
            let two = BigRational::from_integer(BigInt::from(2));
            debug_assert!(mod2(&(lhs - two * &b[i][j])).is_zero());
        }
    }
    let form = FiniteQuadraticForm::new(orders, q, b)?;
    Ok(DiscriminantForm { lattice: l.clone(), form, lifts, reduce })
}

/// The invariants `(r, a, δ)` of a 2-elementary lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TwoElemInvariants {
    pub r: usize,
    pub a: usize,
    pub delta: u8,
}

impl TwoElemInvariants {
    pub fn new(r: usize, a: usize, delta: u8) -> Result<Self> {
        if a > r || delta > 1 {
            return Err(Error::InvalidParameter(format!("({r}, {a}, {delta}) violates a ≤ r, δ ∈ {{0,1}}")));
        }
        Ok(TwoElemInvariants { r, a, delta })
    }

    pub fn is_consistent(&self) -> bool {
        self.a <= self.r && self.delta <= 1
    }
}

impl fmt::Display for TwoElemInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.r, self.a, self.delta)
    }
}

pub fn two_elementary_invariants(l: &Lattice) -> Result<TwoElemInvariants> {
    let d = discriminant_form(l)?;
    let f = d.form();
    if !f.is_two_elementary() {
        return Err(Error::NotTwoElementary);
    }
    // q takes values in (1/2)Z and 2b ∈ Z, so integrality on generators is integrality everywhere
    let delta = if (0..f.length()).all(|i| f.q_generator(i).is_integer()) { 0 } else { 1 };
    Ok(TwoElemInvariants { r: l.rank(), a: f.length(), delta })
}

/// Compares `(rank, signature, a, δ)`; for indefinite 2-elementary even
/// lattices these determine the isometry class.
pub fn nikulin_equal(l: &Lattice, m: &Lattice) -> Result<bool> {
    let il = two_elementary_invariants(l)?;
    let im = two_elementary_invariants(m)?;
    if l.is_definite() || m.is_definite() {
        return Err(Error::DefiniteLattice);
    }
    Ok(il == im && l.signature() == m.signature())
}

/// All isotropic subgroups of `A`, ordered by size and then by element list.
pub fn isotropic_subgroups(form: &FiniteQuadraticForm, cap: u64) -> Result<Vec<DiscSubgroup>> {
    let a = Arith::new(form, cap)?;
    let isotropic: Vec<Vec<u64>> = (0..a.size).map(|i| a.decode(i)).filter(|x| a.q(x) == 0).collect();
    let found = subgroup_closure(&a, &isotropic, |h, x| h.iter().all(|&e| a.b(&a.decode(e), x) == 0))?;
    Ok(to_subgroups(&a, found))
}

/// All subgroups of `A` (no form condition).
pub fn all_subgroups(form: &FiniteQuadraticForm, cap: u64) -> Result<Vec<DiscSubgroup>> {
    let a = Arith::new(form, cap)?;
    let elems: Vec<Vec<u64>> = (0..a.size).map(|i| a.decode(i)).collect();
    let found = subgroup_closure(&a, &elems, |_, _| true)?;
    Ok(to_subgroups(&a, found))
}

/// Breadth-first closure: every subgroup generated by a sequence of allowed
/// elements, each compatible with what was generated before it.
fn subgroup_closure(
    a: &Arith,
    allowed: &[Vec<u64>],
    compatible: impl Fn(&[usize], &[u64]) -> bool,
) -> Result<Vec<(Vec<usize>, Vec<Vec<u64>>)>> {
    let zero = vec![0usize];
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    seen.insert(zero.clone());
    let mut out = vec![(zero, Vec::new())];
    let mut frontier = 0;
    while frontier < out.len() {
        let (h, gens) = out[frontier].clone();
        frontier += 1;
        for x in allowed {
            let xi = a.encode(x);
            if h.binary_search(&xi).is_ok() || !compatible(&h, x) {
                continue;
            }
            let ext = a.extend(&h, x);
            if seen.insert(ext.clone()) {
                if out.len() >= SUBGROUP_COUNT_CAP {
                    return Err(Error::CapExceeded { cap: SUBGROUP_COUNT_CAP as u64 });
                }
                let mut g = gens.clone();
                g.push(x.clone());
                out.push((ext, g));
            }
        }
    }
    Ok(out)
}

fn to_subgroups(a: &Arith, found: Vec<(Vec<usize>, Vec<Vec<u64>>)>) -> Vec<DiscSubgroup> {
    let mut subs: Vec<DiscSubgroup> = found
        .into_iter()
        .map(|(idx, gens)| DiscSubgroup { generators: gens, elements: idx.into_iter().map(|i| a.decode(i)).collect() })
        .collect();
    subs.sort_by(|x, y| x.order().cmp(&y.order()).then_with(|| x.elements.cmp(&y.elements)));
    subs
}

/// An even overlattice `M ⊇ L`, with its basis in `L ⊗ Q` coordinates (rows).
#[derive(Clone, Debug)]
pub struct Overlattice {
    pub lattice: Lattice,
    pub basis: RatMatrix,
    pub index: u64,
}

/// The overlattice of `L` obtained by adjoining lifts of an isotropic subgroup.
///
/// Besides evenness and the index, the discriminant form of the result is
/// checked against `H^⊥/H` through the explicit map `H^⊥ → A_M`.
pub fn overlattice_from_isotropic(d: &DiscriminantForm, h: &DiscSubgroup, cap: u64) -> Result<Overlattice> {
    let form = d.form();
    if !h.is_isotropic(form) {
        return Err(Error::NotIsotropic);
    }
    let l = d.lattice();
    let n = l.rank();
    let lifts: Vec<Vec<BigRational>> = h.generators().iter().map(|g| d.lift(g)).collect();
    let mut rows: Vec<Vec<BigRational>> =
        (0..n).map(|i| (0..n).map(|j| BigRational::from_integer(BigInt::from((i == j) as i64))).collect()).collect();
    rows.extend(lifts);
    let stacked = RatMatrix::from_rows(rows);
    let den = stacked.denominator();
    let scaled: Vec<Vec<BigInt>> = stacked
        .to_rows()
        .iter()
        .map(|r| r.iter().map(|x| (x * BigRational::from_integer(den.clone())).to_integer()).collect())
        .collect();
    let hnf = IntMatrix::from_rows(scaled)?.hermite();
    let basis = RatMatrix::from_rows(
        hnf.to_rows()
            .into_iter()
            .map(|r| r.into_iter().map(|x| BigRational::new(x, den.clone())).collect())
            .collect(),
    );
    let gram_q = basis.mul(&l.gram().to_rational()).mul(&basis.transpose());
    let gram = gram_q.to_integer().expect("isotropic gluing yields an integral lattice");
    let m = Lattice::new(gram)?;
    assert!(m.is_even(), "isotropic gluing yields an even lattice");

    let den_pow = num_traits::pow(den.clone(), n);
    let index_big = (&den_pow / hnf.determinant().abs()).to_u64().unwrap();
    assert_eq!(index_big as usize, h.order(), "overlattice index equals |H|");
    let over = Overlattice { lattice: m, basis, index: index_big };
    verify_overlattice_disc(d, h, &over, cap)?;
    Ok(over)
}

/// Checks that `y ↦ [lift(y)]` is a surjection `H^⊥ → A_M` with kernel `H`
/// preserving `q`, and that `|A_M| = |A_L| / |H|²`.
fn verify_overlattice_disc(d: &DiscriminantForm, h: &DiscSubgroup, over: &Overlattice, cap: u64) -> Result<()> {
    let a = Arith::new(d.form(), cap)?;
    let dm = discriminant_form(&over.lattice)?;
    let am = Arith::new(dm.form(), cap.max(1))?;
    let hsq = (h.order() * h.order()) as usize;
    assert_eq!(am.size * hsq, a.size, "|A_M| = |A_L| / |H|^2");
    let inv = over.basis.inverse().expect("overlattice basis is invertible");
    let inv_t = inv.transpose();
    let mut image = BTreeSet::new();
    for i in 0..a.size {
        let y = a.decode(i);
        if !h.generators().iter().all(|g| a.b(g, &y) == 0) {
            continue;
        }
        let lift = d.lift(&y);
        let in_m = inv_t.mul_vec(&lift);
        let cls = dm.class_of_small(&in_m)?;
        assert_eq!(am.q_rational(&cls), a.q_rational(&y), "q is preserved on H^perp");
        let zero = cls.iter().all(|&c| c == 0);
        assert_eq!(zero, h.contains(&y), "kernel of H^perp -> A_M is H");
        image.insert(cls);
    }
    assert_eq!(image.len(), am.size, "H^perp -> A_M is onto");
    Ok(())
}

/// An overlattice of `T ⊕ W` in which both summands stay primitive.
#[derive(Clone, Debug)]
pub struct Gluing {
    pub lattice: Lattice,
    /// Basis rows in `(T ⊕ W) ⊗ Q` coordinates.
    pub basis: RatMatrix,
    /// The glue subgroup, as a subgroup of `A_{T⊕W}`.
    pub glue: DiscSubgroup,
    pub t_rank: usize,
}

impl Gluing {
    pub fn glue_order(&self) -> usize {
        self.glue.order()
    }

    /// `M ∩ (T ⊗ Q) = T` and `M ∩ (W ⊗ Q) = W`, checked directly on the basis.
    pub fn summands_primitive(&self) -> bool {
        let n = self.basis.nrows();
        let t = self.t_rank;
        let check = |keep: std::ops::Range<usize>, drop: std::ops::Range<usize>| -> bool {
            // integer combinations killing the dropped coordinates must be integral on the kept ones
            let den = self.basis.denominator();
            let cols: Vec<Vec<BigInt>> = drop
                .clone()
                .map(|j| (0..n).map(|i| (&self.basis[(i, j)] * BigRational::from_integer(den.clone())).to_integer()).collect())
                .collect();
            if cols.is_empty() {
                return true;
            }
            let kernel = IntMatrix::from_rows(cols).unwrap().kernel();
            (0..kernel.nrows()).all(|r| {
                keep.clone().all(|j| {
                    let s: BigRational = (0..n)
                        .map(|i| BigRational::from_integer(kernel[(r, i)].clone()) * &self.basis[(i, j)])
                        .sum();
                    s.is_integer()
                })
            })
        };
        check(0..t, t..n) && check(t..n, 0..t)
    }
}

/// All even overlattices of `T ⊕ W` in which `T` and `W` are primitive, i.e.
/// gluings along graphs of anti-isometries between subgroups of `A_T` and
/// `A_W`. With `torsion = Some(m)` only results whose discriminant group has
/// exponent dividing `m` are kept.
pub fn primitive_gluings(t: &Lattice, w: &Lattice, torsion: Option<u64>, cap: u64) -> Result<Vec<Gluing>> {
    let dt = discriminant_form(t)?;
    let dw = discriminant_form(w)?;
    let sum = t.direct_sum(w);
    let ds = discriminant_form(&sum)?;
    let at = Arith::new(dt.form(), cap)?;
    let aw = Arith::new(dw.form(), cap)?;

    // graphs are enumerated from the smaller side
    let t_small = at.size <= aw.size;
    let (small, big, dsmall) = if t_small { (&at, &aw, &dt) } else { (&aw, &at, &dw) };
    let subgroups = all_subgroups(dsmall.form(), cap)?;

    let mut glues: Vec<DiscSubgroup> = Vec::new();
    for k in &subgroups {
        for phi in anti_isometric_embeddings(small, big, k)? {
            // graph {(x, φ x)} mapped into A_{T⊕W}
            let mut gens = Vec::new();
            for (x, y) in k.generators().iter().zip(&phi) {
                let (xt, xw) = if t_small { (x, y) } else { (y, x) };
                let mut lift = dt.lift(xt);
                lift.extend(dw.lift(xw));
                gens.push(ds.class_of_small(&lift)?);
            }
            glues.push(DiscSubgroup::generated_by(ds.form(), gens, cap)?);
        }
    }
    glues.sort_by(|x, y| x.order().cmp(&y.order()).then_with(|| x.elements().cmp(y.elements())));

    let mut out = Vec::new();
    for glue in glues {
        let over = overlattice_from_isotropic(&ds, &glue, cap)?;
        if let Some(m) = torsion {
            let exp = over.lattice.invariant_factors().last().cloned().unwrap_or_else(BigInt::one);
            if !BigInt::from(m).is_multiple_of(&exp) {
                continue;
            }
        }
        let g = Gluing { lattice: over.lattice, basis: over.basis, glue, t_rank: t.rank() };
        debug_assert!(g.summands_primitive());
        out.push(g);
    }
    Ok(out)
}

/// Injective homomorphisms `φ: K → B` with `q_B(φ x) = -q_A(x)`, described by
/// the images of `K`'s stored generators.
fn anti_isometric_embeddings(a: &Arith, b: &Arith, k: &DiscSubgroup) -> Result<Vec<Vec<Vec<u64>>>> {
    let gens = k.generators();
    if gens.is_empty() {
        return Ok(vec![vec![]]);
    }
    let neg_q = |x: &[u64]| (2 * a.exponent as i128 - a.q(x)).rem_euclid(2 * a.exponent as i128);
    // compare values as rationals, since the exponents of A and B differ
    let same = |qa_num: i128, ea: u64, qb_num: i128, eb: u64| qa_num * eb as i128 == qb_num * ea as i128;
    let b_elems: Vec<Vec<u64>> = (0..b.size).map(|i| b.decode(i)).collect();
    let cands: Vec<Vec<&Vec<u64>>> = gens
        .iter()
        .map(|g| {
            let o = a.element_order(g);
            let target = neg_q(g);
            b_elems
                .iter()
                .filter(|y| o % b.element_order(y) == 0 && same(target, a.exponent, b.q(y), b.exponent))
                .collect()
        })
        .collect();

    let k_elems: Vec<Vec<u64>> = k.elements().to_vec();
    let mut out = Vec::new();
    let mut choice: Vec<usize> = vec![0; gens.len()];
    if cands.iter().any(Vec::is_empty) {
        return Ok(out);
    }
    loop {
        let images: Vec<Vec<u64>> = choice.iter().zip(&cands).map(|(&c, cs)| cs[c].clone()).collect();
        if let Some(()) = check_anti_embedding(a, b, gens, &images, &k_elems, &neg_q, &same) {
            out.push(images);
        }
        // odometer over candidate choices
        let mut i = 0;
        loop {
            if i == choice.len() {
                return Ok(out);
            }
            choice[i] += 1;
            if choice[i] < cands[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

fn check_anti_embedding(
    a: &Arith,
    b: &Arith,
    gens: &[Vec<u64>],
    images: &[Vec<u64>],
    k_elems: &[Vec<u64>],
    neg_q: &dyn Fn(&[u64]) -> i128,
    same: &dyn Fn(i128, u64, i128, u64) -> bool,
) -> Option<()> {
    // extend along the generators, checking well-definedness
    let mut map: std::collections::HashMap<Vec<u64>, Vec<u64>> = std::collections::HashMap::new();
    map.insert(vec![0; a.orders.len()], vec![0; b.orders.len()]);
    let mut queue = vec![vec![0; a.orders.len()]];
    while let Some(x) = queue.pop() {
        let fx = map[&x].clone();
        for (g, y) in gens.iter().zip(images) {
            let nx = a.add(&x, g);
            let ny = b.add(&fx, y);
            match map.get(&nx) {
                Some(prev) if *prev != ny => return None,
                Some(_) => {}
                None => {
                    map.insert(nx.clone(), ny);
                    queue.push(nx);
                }
            }
        }
    }
    debug_assert_eq!(map.len(), k_elems.len());
    let image: HashSet<&Vec<u64>> = map.values().collect();
    if image.len() != map.len() {
        return None;
    }
    for (x, y) in &map {
        if !same(neg_q(x), a.exponent, b.q(y), b.exponent) {
            return None;
        }
    }
    Some(())
}
