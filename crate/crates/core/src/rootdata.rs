//! Type B and D root data on `Z^m`, Weyl groups as signed permutations,
//! Weyl characters and Kostant's theorem for the standard Levi subgroups.
//!
//! Roots are integer vectors in the standard coordinates. Weights are stored
//! doubled so that the half sum of positive roots in type B is integral.
//! Positivity is lexicographic: a root is positive when its first nonzero
//! coordinate is positive, which makes `e_1 - e_2, ..., e_{m-1} - e_m` and
//! `e_m` (type B) or `e_{m-1} + e_m` (type D) the simple roots.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use itertools::Itertools;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::exactnum::GaussianRational;

/// Largest rank for which the full Weyl group is enumerated.
pub const MAX_WEYL_RANK: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Kind {
    B,
    D,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RootDatum {
    pub kind: Kind,
    pub rank: usize,
}

pub type Root = Vec<i64>;

/// A weight in doubled coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Weight {
    pub doubled: Vec<i64>,
}

impl Weight {
    pub fn from_doubled(doubled: Vec<i64>) -> Self {
        Weight { doubled }
    }

    /// Weight with integral coordinates.
    pub fn integral(coords: &[i64]) -> Self {
        Weight { doubled: coords.iter().map(|c| 2 * c).collect() }
    }

    pub fn zero(m: usize) -> Self {
        Weight { doubled: vec![0; m] }
    }

    pub fn rank(&self) -> usize {
        self.doubled.len()
    }

    pub fn is_integral(&self) -> bool {
        self.doubled.iter().all(|c| c % 2 == 0)
    }

    /// True coordinates, when they are all integers.
    pub fn coords(&self) -> Option<Vec<i64>> {
        self.is_integral().then(|| self.doubled.iter().map(|c| c / 2).collect())
    }

    pub fn add(&self, other: &Weight) -> Weight {
        Weight { doubled: self.doubled.iter().zip(&other.doubled).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Weight) -> Weight {
        Weight { doubled: self.doubled.iter().zip(&other.doubled).map(|(a, b)| a - b).collect() }
    }

    /// Twice the pairing with a cocharacter given in integer coordinates.
    pub fn pairing_doubled(&self, cochar: &[i64]) -> i64 {
        self.doubled.iter().zip(cochar).map(|(a, b)| a * b).sum()
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = self.doubled.iter().map(|&c| if c % 2 == 0 { format!("{}", c / 2) } else { format!("{c}/2") });
        write!(f, "({})", parts.format(", "))
    }
}

/// Signed permutation `v -> w v` with `(w v)[perm[i]] = signs[i] * v[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct WeylElement {
    pub signs: Vec<i8>,
    pub perm: Vec<usize>,
}

impl WeylElement {
    pub fn identity(m: usize) -> Self {
        WeylElement { signs: vec![1; m], perm: (0..m).collect() }
    }

    /// Reflection in `e_i`: negates coordinate `i`.
    pub fn sign_flip(m: usize, i: usize) -> Self {
        let mut w = Self::identity(m);
        w.signs[i] = -1;
        w
    }

    pub fn transposition(m: usize, i: usize, j: usize) -> Self {
        let mut w = Self::identity(m);
        w.perm.swap(i, j);
        w
    }

    /// Longest element: `-1`.
    pub fn longest(m: usize) -> Self {
        WeylElement { signs: vec![-1; m], perm: (0..m).collect() }
    }

    pub fn rank(&self) -> usize {
        self.perm.len()
    }

    pub fn act(&self, v: &[i64]) -> Vec<i64> {
        let mut out = vec![0; v.len()];
        for (i, &x) in v.iter().enumerate() {
            out[self.perm[i]] += self.signs[i] as i64 * x;
        }
        out
    }

    pub fn act_weight(&self, w: &Weight) -> Weight {
        Weight { doubled: self.act(&w.doubled) }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &WeylElement) -> WeylElement {
        let m = self.rank();
        let mut perm = vec![0; m];
        let mut signs = vec![0; m];
        for i in 0..m {
            let j = other.perm[i];
            perm[i] = self.perm[j];
            signs[i] = other.signs[i] * self.signs[j];
        }
        WeylElement { signs, perm }
    }

    pub fn inverse(&self) -> WeylElement {
        let m = self.rank();
        let mut perm = vec![0; m];
        let mut signs = vec![0; m];
        for i in 0..m {
            perm[self.perm[i]] = i;
            signs[self.perm[i]] = self.signs[i];
        }
        WeylElement { signs, perm }
    }

    pub fn negative_count(&self) -> usize {
        self.signs.iter().filter(|&&s| s < 0).count()
    }
}

pub fn is_positive(v: &[i64]) -> bool {
    v.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
}

fn neg(v: &[i64]) -> Vec<i64> {
    v.iter().map(|x| -x).collect()
}

/// Positive roots of type `kind` supported on `coords` inside `Z^m`.
pub fn positive_roots_on(kind: Kind, m: usize, coords: &[usize]) -> Vec<Root> {
    let mut out = Vec::new();
    for (a, &i) in coords.iter().enumerate() {
        for &j in &coords[a + 1..] {
            for sj in [-1, 1] {
                let mut v = vec![0; m];
                v[i] = 1;
                v[j] = sj;
                out.push(v);
            }
        }
        if kind == Kind::B {
            let mut v = vec![0; m];
            v[i] = 1;
            out.push(v);
        }
    }
    out
}

/// Signed permutations of `coords`, identity elsewhere.
fn weyl_on(kind: Kind, m: usize, coords: &[usize]) -> Vec<WeylElement> {
    let n = coords.len();
    let mut out = Vec::new();
    for p in (0..n).permutations(n) {
        for mask in 0u32..(1 << n) {
            if kind == Kind::D && mask.count_ones() % 2 == 1 {
                continue;
            }
            let mut w = WeylElement::identity(m);
            for a in 0..n {
                w.perm[coords[a]] = coords[p[a]];
                w.signs[coords[a]] = if mask >> a & 1 == 1 { -1 } else { 1 };
            }
            out.push(w);
        }
    }
    out
}

impl RootDatum {
    pub fn new(kind: Kind, rank: usize) -> Result<Self> {
        if rank == 0 {
            return domain("root datum rank must be at least 1");
        }
        Ok(RootDatum { kind, rank })
    }

    /// The datum of `SO(V)` for `dim V = d`.
    pub fn for_dimension(d: usize) -> Result<Self> {
        if d < 2 {
            return domain("dimension must be at least 2");
        }
        Self::new(if d % 2 == 1 { Kind::B } else { Kind::D }, d / 2)
    }

    pub fn positive_roots(&self) -> Vec<Root> {
        positive_roots_on(self.kind, self.rank, &(0..self.rank).collect::<Vec<_>>())
    }

    pub fn roots(&self) -> Vec<Root> {
        let pos = self.positive_roots();
        let mut all: Vec<Root> = pos.iter().map(|r| neg(r)).collect();
        all.extend(pos);
        all
    }

    /// Coroots in the same coordinates: `2 alpha / (alpha, alpha)`.
    pub fn coroots(&self) -> Vec<Root> {
        self.roots().into_iter().map(|r| if r.iter().filter(|&&x| x != 0).count() == 1 { r.iter().map(|x| 2 * x).collect() } else { r }).collect()
    }

    pub fn rho(&self) -> Weight {
        let m = self.rank as i64;
        let doubled = (0..m)
            .map(|i| match self.kind {
                Kind::B => 2 * m - 1 - 2 * i,
                Kind::D => 2 * (m - 1 - i),
            })
            .collect();
        Weight { doubled }
    }

    pub fn is_dominant(&self, w: &Weight) -> bool {
        self.positive_roots().iter().all(|a| w.pairing_doubled(a) >= 0)
    }

    /// Whether `w` is an integral weight of the special orthogonal group.
    pub fn is_group_weight(&self, w: &Weight) -> bool {
        w.rank() == self.rank && w.is_integral()
    }
}

pub fn weyl_enumerate(datum: &RootDatum) -> Result<Vec<WeylElement>> {
    if datum.rank > MAX_WEYL_RANK {
        return Err(Error::Resource(format!("Weyl group of rank {} exceeds the guard {}", datum.rank, MAX_WEYL_RANK)));
    }
    Ok(weyl_on(datum.kind, datum.rank, &(0..datum.rank).collect::<Vec<_>>()))
}

/// `Phi(w) = Phi^+ ∩ (-w Phi^+)` relative to the positive system `positive`.
pub fn inversion_set(w: &WeylElement, positive: &[Root]) -> Vec<Root> {
    positive
        .iter()
        .filter_map(|b| {
            let a = neg(&w.act(b));
            is_positive(&a).then_some(a)
        })
        .collect()
}

pub fn length(w: &WeylElement, datum: &RootDatum) -> usize {
    inversion_set(w, &datum.positive_roots()).len()
}

pub fn sign(w: &WeylElement, datum: &RootDatum) -> i8 {
    if length(w, datum) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// The standard Levi subgroups. `M1` has Levi factor `GL_2 × SO(d-4)`, `M2`
/// has `GL_1 × SO(d-2)`, `M12` has `GL_1 × GL_1 × SO(d-4)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum LeviLabel {
    G,
    M1,
    M2,
    M12,
}

impl fmt::Display for LeviLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LeviLabel::G => "G",
            LeviLabel::M1 => "M1",
            LeviLabel::M2 => "M2",
            LeviLabel::M12 => "M12",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for LeviLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "G" => Ok(LeviLabel::G),
            "M1" => Ok(LeviLabel::M1),
            "M2" => Ok(LeviLabel::M2),
            "M12" => Ok(LeviLabel::M12),
            _ => Err(Error::Parse(format!("unknown Levi label {s:?}"))),
        }
    }
}

/// Roots, Weyl group and half-sum of a standard Levi inside a root datum.
#[derive(Debug, Clone)]
pub struct LeviSystem {
    pub label: LeviLabel,
    pub positive: Vec<Root>,
    pub weyl: Vec<WeylElement>,
    pub rho: Weight,
}

pub fn levi_system(datum: &RootDatum, label: LeviLabel) -> Result<LeviSystem> {
    let m = datum.rank;
    if datum.rank > MAX_WEYL_RANK {
        return Err(Error::Resource(format!("rank {m} exceeds the guard {MAX_WEYL_RANK}")));
    }
    let needed = match label {
        LeviLabel::G => 1,
        LeviLabel::M2 => 1,
        LeviLabel::M1 | LeviLabel::M12 => 2,
    };
    if m < needed {
        return domain(format!("Levi {label} needs rank at least {needed}"));
    }
    let tail: Vec<usize> = match label {
        LeviLabel::G => (0..m).collect(),
        LeviLabel::M2 => (1..m).collect(),
        LeviLabel::M1 | LeviLabel::M12 => (2..m).collect(),
    };
    let mut positive = positive_roots_on(datum.kind, m, &tail);
    let mut weyl = weyl_on(datum.kind, m, &tail);
    if label == LeviLabel::M1 {
        let mut a = vec![0; m];
        a[0] = 1;
        a[1] = -1;
        positive.push(a);
        let swap = WeylElement::transposition(m, 0, 1);
        let swapped: Vec<_> = weyl.iter().map(|w| swap.compose(w)).collect();
        weyl.extend(swapped);
    }
    let mut rho = vec![0; m];
    for a in &positive {
        for (r, x) in rho.iter_mut().zip(a) {
            *r += x;
        }
    }
    Ok(LeviSystem { label, positive, weyl, rho: Weight { doubled: rho } })
}

impl LeviSystem {
    pub fn contains_root(&self, a: &[i64]) -> bool {
        self.positive.iter().any(|b| b.as_slice() == a || neg(b) == a)
    }

    pub fn sign(&self, w: &WeylElement) -> i8 {
        if inversion_set(w, &self.positive).len() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn is_dominant(&self, w: &Weight) -> bool {
        self.positive.iter().all(|a| w.pairing_doubled(a) >= 0)
    }
}

/// Minimal length representatives of `Omega_M \ Omega`, i.e. the `w` with
/// `Phi(w)` disjoint from the roots of the Levi.
pub fn kostant_reps(datum: &RootDatum, label: LeviLabel) -> Result<Vec<WeylElement>> {
    let levi = levi_system(datum, label)?;
    let pos = datum.positive_roots();
    Ok(weyl_enumerate(datum)?
        .into_iter()
        .filter(|w| inversion_set(w, &pos).iter().all(|a| !levi.contains_root(a)))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CohomologyEntry {
    pub element: WeylElement,
    pub degree: usize,
    /// Highest weight `w(lambda + rho) - rho` of the Levi constituent.
    pub weight: Weight,
}

/// Kostant's description of `H^*(Lie N, V_lambda)` as Levi representations.
pub fn kostant_cohomology(datum: &RootDatum, label: LeviLabel, lambda: &Weight) -> Result<Vec<CohomologyEntry>> {
    check_highest_weight(datum, lambda)?;
    let pos = datum.positive_roots();
    let lr = lambda.add(&datum.rho());
    let rho = datum.rho();
    Ok(kostant_reps(datum, label)?
        .into_iter()
        .map(|w| {
            let degree = inversion_set(&w, &pos).len();
            let weight = w.act_weight(&lr).sub(&rho);
            CohomologyEntry { element: w, degree, weight }
        })
        .collect())
}

fn check_highest_weight(datum: &RootDatum, lambda: &Weight) -> Result<()> {
    if !datum.is_group_weight(lambda) || !datum.is_dominant(lambda) {
        return domain(format!("{lambda} is not a dominant integral weight of rank {}", datum.rank));
    }
    Ok(())
}

/// The cocharacters used for truncation: `varpi_1 = e_1 + e_2`, `varpi_2 = 2 e_1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Coweight {
    Varpi1,
    Varpi2,
}

impl Coweight {
    pub fn vector(&self, m: usize) -> Vec<i64> {
        let mut v = vec![0; m];
        match self {
            Coweight::Varpi1 => {
                v[0] = 1;
                v[1] = 1;
            }
            Coweight::Varpi2 => v[0] = 2,
        }
        v
    }

    /// `<-rho, varpi>`, doubled.
    pub fn standard_cutoff_doubled(&self, datum: &RootDatum) -> i64 {
        -datum.rho().pairing_doubled(&self.vector(datum.rank))
    }
}

/// Keeps entries whose weight pairs with every `varpi` above its cutoff.
/// Cutoffs are doubled; `None` means minus infinity.
pub fn truncate_cohomology(entries: &[CohomologyEntry], pairings: &[(Coweight, Option<i64>)]) -> Vec<CohomologyEntry> {
    entries
        .iter()
        .filter(|e| {
            pairings.iter().all(|(c, t)| match t {
                None => true,
                Some(t) => e.weight.pairing_doubled(&c.vector(e.weight.rank())) > *t,
            })
        })
        .cloned()
        .collect()
}

/// Laurent polynomial in `m` variables with integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Laurent {
    pub terms: BTreeMap<Vec<i64>, i64>,
}

impl Laurent {
    pub fn zero() -> Self {
        Laurent::default()
    }

    pub fn monomial(exp: Vec<i64>, c: i64) -> Self {
        let mut l = Laurent::zero();
        l.add_term(exp, c);
        l
    }

    pub fn add_term(&mut self, exp: Vec<i64>, c: i64) {
        if c == 0 {
            return;
        }
        match self.terms.entry(exp) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0 {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add(&self, other: &Laurent) -> Laurent {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }

    pub fn scale(&self, c: i64) -> Laurent {
        if c == 0 {
            return Laurent::zero();
        }
        Laurent { terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    pub fn mul(&self, other: &Laurent) -> Laurent {
        let mut acc: HashMap<Vec<i64>, i64> = HashMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<i64> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_insert(0) += c1 * c2;
            }
        }
        Laurent { terms: acc.into_iter().filter(|(_, c)| *c != 0).collect() }
    }

    /// Exact quotient by `1 - x^{-alpha}`; `None` if the division leaves a remainder.
    pub fn div_one_minus_inverse(&self, alpha: &[i64]) -> Option<Laurent> {
        let lead = alpha.iter().position(|&x| x != 0)?;
        let s = alpha[lead];
        // Group exponents into lines `base + k alpha` with `base[lead] = 0`.
        let mut lines: HashMap<Vec<i64>, BTreeMap<i64, i64>> = HashMap::new();
        for (e, c) in &self.terms {
            let k = e[lead] * s;
            let base: Vec<i64> = e.iter().zip(alpha).map(|(x, a)| x - k * a).collect();
            lines.entry(base).or_default().insert(k, *c);
        }
        // Q(mu) = sum_{j >= 0} P(mu + j alpha).
        let mut out = Laurent::zero();
        for (base, line) in lines {
            let (&kmin, _) = line.iter().next().unwrap();
            let (&kmax, _) = line.iter().next_back().unwrap();
            let mut run = 0;
            for k in (kmin..=kmax).rev() {
                run += line.get(&k).copied().unwrap_or(0);
                if k == kmin {
                    if run != 0 {
                        return None;
                    }
                } else if run != 0 {
                    let exp = base.iter().zip(alpha).map(|(x, a)| x + k * a).collect();
                    out.terms.insert(exp, run);
                }
            }
        }
        Some(out)
    }

    pub fn eval(&self, point: &[GaussianRational]) -> Result<GaussianRational> {
        let mut total = GaussianRational::zero();
        for (e, c) in &self.terms {
            total = total + monomial_value(e, point)?.scale_int(*c);
        }
        Ok(total)
    }
}

pub fn monomial_value(exp: &[i64], point: &[GaussianRational]) -> Result<GaussianRational> {
    let mut v = GaussianRational::one();
    for (&k, z) in exp.iter().zip(point) {
        if k != 0 {
            v = v * z.pow(k)?;
        }
    }
    Ok(v)
}

fn alternating_numerator(positive: &[Root], weyl: &[WeylElement], nu: &Weight, rho: &Weight) -> Result<Laurent> {
    let nr = nu.add(rho);
    let mut num = Laurent::zero();
    for w in weyl {
        let e = w.act_weight(&nr).sub(rho);
        let Some(exp) = e.coords() else {
            return domain(format!("{nu} + rho has non-integral Weyl translates"));
        };
        let sign = if inversion_set(w, positive).len() % 2 == 0 { 1 } else { -1 };
        num.add_term(exp, sign);
    }
    Ok(num)
}

fn divide_by_denominator(mut num: Laurent, positive: &[Root]) -> Result<Laurent> {
    for a in positive {
        num = num
            .div_one_minus_inverse(a)
            .ok_or_else(|| Error::Domain("Weyl numerator not divisible by the denominator".into()))?;
    }
    Ok(num)
}

/// Formal character of the irreducible representation of highest weight `lambda`.
pub fn formal_character(datum: &RootDatum, lambda: &Weight) -> Result<Laurent> {
    check_highest_weight(datum, lambda)?;
    let pos = datum.positive_roots();
    let num = alternating_numerator(&pos, &weyl_enumerate(datum)?, lambda, &datum.rho())?;
    divide_by_denominator(num, &pos)
}

/// Formal character of the Levi representation of highest weight `nu`.
pub fn levi_character(levi: &LeviSystem, nu: &Weight) -> Result<Laurent> {
    if !levi.is_dominant(nu) {
        return domain(format!("{nu} is not dominant for the Levi {}", levi.label));
    }
    let num = alternating_numerator(&levi.positive, &levi.weyl, nu, &levi.rho)?;
    divide_by_denominator(num, &levi.positive)
}

/// Both sides of the Euler characteristic form of Kostant's theorem:
/// `sum_w (-1)^{l(w)} ch_M(w(lambda+rho)-rho)` and `ch(lambda) * prod_{N}(1 - e^{-alpha})`,
/// the latter expanded as `sum_k (-1)^k ch Lambda^k(n^*)` by subset sums.
pub fn kostant_euler_sides(datum: &RootDatum, label: LeviLabel, lambda: &Weight) -> Result<(Laurent, Laurent)> {
    let levi = levi_system(datum, label)?;
    let mut lhs = Laurent::zero();
    for e in kostant_cohomology(datum, label, lambda)? {
        let ch = levi_character(&levi, &e.weight)?;
        lhs = lhs.add(&ch.scale(if e.degree % 2 == 0 { 1 } else { -1 }));
    }
    let nil: Vec<Root> = datum.positive_roots().into_iter().filter(|a| !levi.contains_root(a)).collect();
    let mut exterior = Laurent::zero();
    for k in 0..=nil.len() {
        for subset in nil.iter().combinations(k) {
            let mut exp = vec![0; datum.rank];
            for a in subset {
                for (x, y) in exp.iter_mut().zip(a) {
                    *x -= y;
                }
            }
            exterior.add_term(exp, if k % 2 == 0 { 1 } else { -1 });
        }
    }
    let rhs = formal_character(datum, lambda)?.mul(&exterior);
    Ok((lhs, rhs))
}

/// Dominant integral weights with coordinates bounded by `bound` in absolute value.
pub fn dominant_weights(datum: &RootDatum, bound: i64) -> Vec<Weight> {
    (0..datum.rank)
        .map(|_| -bound..=bound)
        .multi_cartesian_product()
        .map(|c| Weight::integral(&c))
        .filter(|w| datum.is_dominant(w))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KostantFailure {
    pub datum: RootDatum,
    pub levi: LeviLabel,
    pub lambda: Vec<i64>,
    pub what: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KostantReport {
    pub max_rank: usize,
    pub bound: i64,
    pub identities_checked: usize,
    pub truncations_checked: usize,
    pub failures: Vec<KostantFailure>,
}

impl KostantReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.identities_checked > 0
    }
}

/// For `B_m` and `D_m` with `2 <= m <= max_rank`, every standard Levi and every
/// dominant `lambda` with `|lambda_i| <= bound`: the Euler identity, and the
/// agreement of `<w(lambda+rho) - rho, varpi> > <-rho, varpi>` with
/// `<w(lambda+rho), varpi> > 0` for every `w`.
pub fn verify_kostant(max_rank: usize, bound: i64) -> Result<KostantReport> {
    let mut report = KostantReport { max_rank, bound, identities_checked: 0, truncations_checked: 0, failures: vec![] };
    for kind in [Kind::B, Kind::D] {
        for m in 2..=max_rank {
            let datum = RootDatum::new(kind, m)?;
            let rho = datum.rho();
            let weyl = weyl_enumerate(&datum)?;
            for lambda in dominant_weights(&datum, bound) {
                let coords = lambda.coords().expect("integral");
                for label in [LeviLabel::M1, LeviLabel::M2, LeviLabel::M12] {
                    let (lhs, rhs) = kostant_euler_sides(&datum, label, &lambda)?;
                    report.identities_checked += 1;
                    if lhs != rhs {
                        report.failures.push(KostantFailure { datum, levi: label, lambda: coords.clone(), what: "Euler identity".into() });
                    }
                }
                for c in [Coweight::Varpi1, Coweight::Varpi2] {
                    let v = c.vector(m);
                    let cutoff = c.standard_cutoff_doubled(&datum);
                    for w in &weyl {
                        let shifted = w.act_weight(&lambda.add(&rho));
                        report.truncations_checked += 1;
                        if (shifted.sub(&rho).pairing_doubled(&v) > cutoff) != (shifted.pairing_doubled(&v) > 0) {
                            report.failures.push(KostantFailure {
                                datum,
                                levi: LeviLabel::G,
                                lambda: coords.clone(),
                                what: format!("truncation along {c:?} at {w:?}"),
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

/// How a torus coordinate sits in the real torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CoordKind {
    /// Nonzero real number.
    Split,
    /// Point on the unit circle.
    Compact,
    /// Any other nonzero complex number, as in a `Res_{C/R} G_m` factor.
    Complex,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TorusPoint {
    pub coords: Vec<GaussianRational>,
    pub pattern: Vec<CoordKind>,
}

impl TorusPoint {
    pub fn new(coords: Vec<GaussianRational>) -> Result<Self> {
        if coords.iter().any(|z| z.is_zero()) {
            return domain("torus coordinates must be nonzero");
        }
        let pattern = coords
            .iter()
            .map(|z| {
                if z.is_real() {
                    CoordKind::Split
                } else if z.norm() == num_traits::One::one() {
                    CoordKind::Compact
                } else {
                    CoordKind::Complex
                }
            })
            .collect();
        Ok(TorusPoint { coords, pattern })
    }

    pub fn root_value(&self, a: &[i64]) -> Result<GaussianRational> {
        monomial_value(a, &self.coords)
    }

    pub fn check_regular(&self, datum: &RootDatum) -> Result<()> {
        for a in datum.positive_roots() {
            if self.root_value(&a)? == GaussianRational::one() {
                return Err(Error::Singular(format!("root {a:?} takes the value 1")));
            }
        }
        Ok(())
    }
}

/// Character value `Delta^{-1} sum_w eps(w) (w lambda)(gamma) prod_{Phi(w)} alpha^{-1}(gamma)`
/// with `Delta = prod_{alpha > 0} (1 - alpha^{-1}(gamma))`.
pub fn weyl_character(datum: &RootDatum, lambda: &Weight, gamma: &TorusPoint) -> Result<GaussianRational> {
    check_highest_weight(datum, lambda)?;
    if gamma.coords.len() != datum.rank {
        return domain("torus point has the wrong rank");
    }
    gamma.check_regular(datum)?;
    let pos = datum.positive_roots();
    let lam = lambda.coords().expect("checked integral");
    let mut sum = GaussianRational::zero();
    for w in weyl_enumerate(datum)? {
        let inv = inversion_set(&w, &pos);
        let mut exp = w.act(&lam);
        for a in &inv {
            for (x, y) in exp.iter_mut().zip(a) {
                *x -= y;
            }
        }
        let t = gamma.root_value(&exp)?;
        sum = if inv.len() % 2 == 0 { sum + t } else { sum - t };
    }
    let mut delta = GaussianRational::one();
    for a in &pos {
        let v = gamma.root_value(&neg(a))?;
        delta = delta * (GaussianRational::one() - v);
    }
    sum.div(&delta)
}
