//! Discrete series constants.
//!
//! Herb's partition formula for products of type B, D and A1 real root
//! systems, the explicit cone tables for rank-two systems, and the signed
//! subset sums whose vanishing drives the endoscopic cancellation.
//!
//! The normalizing constant in Herb's formula depends only on the ambient
//! data and never on the subset being summed over, so it is dropped here.

use itertools::Itertools;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, invalid, Error, Result};
use crate::exactnum::Rational;

/// Largest index set accepted by the partition enumerators.
pub const MAX_PARTITION_SET: usize = 14;

/// A partition of an ordered index set into blocks of size one or two.
///
/// Blocks are stored in a canonical enumeration: pairs first (sorted by
/// smallest element, each pair sorted), then singletons. When a singleton is
/// marked it is stored last.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Partition2 {
    pub blocks: Vec<Vec<usize>>,
    pub marked: Option<usize>,
}

impl Partition2 {
    pub fn singletons(&self) -> Vec<usize> {
        self.blocks.iter().filter(|b| b.len() == 1).map(|b| b[0]).collect()
    }

    pub fn pairs(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.blocks.iter().filter(|b| b.len() == 2)
    }

    /// Sign of the permutation that lays the blocks out left to right in the
    /// stored order, each pair in increasing order.
    pub fn sign(&self) -> i8 {
        let seq: Vec<usize> = self.blocks.iter().flatten().copied().collect();
        permutation_sign(&seq)
    }
}

/// Sign of the permutation sorting `seq`, by counting inversions.
pub fn permutation_sign(seq: &[usize]) -> i8 {
    let mut inv = 0usize;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

fn perfect_matchings(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let first = items[0];
    let mut out = Vec::new();
    for k in 1..items.len() {
        let rest: Vec<usize> = items[1..].iter().enumerate().filter(|(i, _)| i + 1 != k).map(|(_, &x)| x).collect();
        for mut m in perfect_matchings(&rest) {
            m.insert(0, vec![first, items[k]]);
            out.push(m);
        }
    }
    out
}

fn canonical(mut pairs: Vec<Vec<usize>>, singles: &[usize], marked: Option<usize>) -> Partition2 {
    pairs.sort();
    let mut blocks = pairs;
    blocks.extend(singles.iter().map(|&s| vec![s]));
    Partition2 { blocks, marked }
}

fn sorted_set(index_set: &[usize]) -> Result<Vec<usize>> {
    if index_set.len() > MAX_PARTITION_SET {
        return Err(Error::Resource(format!("index set of size {} exceeds {}", index_set.len(), MAX_PARTITION_SET)));
    }
    let mut v = index_set.to_vec();
    v.sort();
    if v.windows(2).any(|w| w[0] == w[1]) {
        return domain("index set has repeated elements");
    }
    Ok(v)
}

/// Partitions into pairs with at most one singleton, with their signs.
pub fn partitions_le2(index_set: &[usize]) -> Result<Vec<(Partition2, i8)>> {
    let items = sorted_set(index_set)?;
    let mut out = Vec::new();
    if items.len() % 2 == 0 {
        for m in perfect_matchings(&items) {
            out.push(canonical(m, &[], None));
        }
    } else {
        for &s in &items {
            let rest: Vec<usize> = items.iter().copied().filter(|&x| x != s).collect();
            for m in perfect_matchings(&rest) {
                out.push(canonical(m, &[s], None));
            }
        }
    }
    Ok(out.into_iter().map(|p| {
        let s = p.sign();
        (p, s)
    }).collect())
}

/// Partitions of an even set with exactly two singletons, one of them marked.
/// The marked singleton is enumerated after the unmarked one.
pub fn partitions_prime(index_set: &[usize]) -> Result<Vec<(Partition2, i8)>> {
    let items = sorted_set(index_set)?;
    if items.len() % 2 == 1 {
        return invalid("partitions with a marked singleton need an even index set");
    }
    let mut out = Vec::new();
    for (&s, &t) in items.iter().tuple_combinations() {
        let rest: Vec<usize> = items.iter().copied().filter(|&x| x != s && x != t).collect();
        for m in perfect_matchings(&rest) {
            out.push(canonical(m.clone(), &[t, s], Some(s)));
            out.push(canonical(m, &[s, t], Some(t)));
        }
    }
    Ok(out.into_iter().map(|p| {
        let s = p.sign();
        (p, s)
    }).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CKind {
    C1,
    C2B,
    C2D,
}

/// `c1(a) = [a > 0]`.
pub fn c1(a: &Rational) -> u8 {
    a.is_positive() as u8
}

/// `c2B(a, b) = [0 < a < b or 0 < -b < a]`.
pub fn c2b(a: &Rational, b: &Rational) -> u8 {
    let zero = Rational::zero();
    ((&zero < a && a < b) || (zero < -b.clone() && -b.clone() < *a)) as u8
}

/// `c2D(a, b) = [a > |b|]`.
pub fn c2d(a: &Rational, b: &Rational) -> u8 {
    (*a > b.abs()) as u8
}

pub fn c_function(kind: CKind, args: &[Rational]) -> Result<u8> {
    match (kind, args) {
        (CKind::C1, [a]) => Ok(c1(a)),
        (CKind::C2B, [a, b]) => Ok(c2b(a, b)),
        (CKind::C2D, [a, b]) => Ok(c2d(a, b)),
        _ => invalid(format!("{kind:?} called with {} arguments", args.len())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FactorKind {
    B,
    D,
    A1,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Factor {
    pub kind: FactorKind,
    pub support: Vec<usize>,
}

/// A product of real root systems on disjoint coordinate sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProductRootSystem {
    pub factors: Vec<Factor>,
}

impl ProductRootSystem {
    pub fn new(factors: Vec<Factor>) -> Result<Self> {
        let all: Vec<usize> = factors.iter().flat_map(|f| f.support.iter().copied()).collect();
        if all.iter().duplicates().next().is_some() {
            return invalid("factor supports must be disjoint");
        }
        for f in &factors {
            if f.kind == FactorKind::A1 && f.support.len() != 1 {
                return invalid("an A1 factor lives on a single coordinate");
            }
            if f.kind == FactorKind::D && f.support.len() % 2 == 1 {
                return invalid("a type D factor needs an even support for -1 to lie in its Weyl group");
            }
        }
        Ok(ProductRootSystem { factors })
    }
}

/// Parity of the ambient special orthogonal group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn of(d: usize) -> Parity {
        if d % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Parity::Odd => "odd",
            Parity::Even => "even",
        })
    }
}

/// The restricted character direction fed to Herb's formula.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HerbInput {
    pub mu: Vec<Rational>,
}

fn factor_sum(f: &Factor, mu: &[Rational]) -> Result<i64> {
    let get = |i: usize| mu.get(i).ok_or_else(|| Error::Invalid(format!("coordinate {i} missing from mu")));
    match f.kind {
        FactorKind::A1 => Ok(c1(get(f.support[0])?) as i64),
        FactorKind::B | FactorKind::D => {
            let mut total = 0i64;
            for (p, s) in partitions_le2(&f.support)? {
                let mut v = 1i64;
                for b in &p.blocks {
                    v *= match (f.kind, b.len()) {
                        (_, 1) => c1(get(b[0])?) as i64,
                        (FactorKind::B, _) => c2b(get(b[0])?, get(b[1])?) as i64,
                        _ => c2d(get(b[0])?, get(b[1])?) as i64,
                    };
                    if v == 0 {
                        break;
                    }
                }
                total += s as i64 * v;
            }
            Ok(total)
        }
    }
}

/// Herb's partition sum without its constant prefactor. The multiple sum
/// over partitions of each factor factorizes into a product of per-factor sums.
pub fn herb_sum(sys: &ProductRootSystem, input: &HerbInput, parity: Parity) -> Result<i64> {
    if parity == Parity::Even && sys.factors.iter().any(|f| f.kind == FactorKind::B) {
        return invalid("type B factors do not occur in the even case");
    }
    let mut v = 1;
    for f in &sys.factors {
        v *= factor_sum(f, &input.mu)?;
        if v == 0 {
            break;
        }
    }
    Ok(v)
}

/// The three real root systems of rank two used for the Levi `M12`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Rank2System {
    /// All of `±e1, ±e2, ±e1±e2`.
    B2,
    /// `±e1±e2`.
    D2,
    /// `±e1, ±e2`: the endoscopic variant.
    Endos,
}

/// The eight open cones cut out by the axes and diagonals, numbered 1 to 8
/// counterclockwise from `0 < x2 < x1`. `None` on a wall.
pub fn cone_index(v: &(Rational, Rational)) -> Option<u8> {
    let (x1, x2) = v;
    let z = Rational::zero();
    if x1.is_zero() || x2.is_zero() || x1 == x2 || *x1 == -x2.clone() {
        return None;
    }
    let table = [
        z < *x2 && x2 < x1,
        z < *x1 && x1 < x2,
        z < -x1.clone() && -x1.clone() < *x2,
        z < *x2 && *x2 < -x1.clone(),
        x1 < x2 && *x2 < z,
        x2 < x1 && *x1 < z,
        z < *x1 && *x1 < -x2.clone(),
        z < -x2.clone() && -x2.clone() < *x1,
    ];
    table.iter().position(|&b| b).map(|i| i as u8 + 1)
}

/// A point in each cone, by cone number.
pub fn cone_representative(cone: u8) -> (i64, i64) {
    match cone {
        1 => (2, 1),
        2 => (1, 2),
        3 => (-1, 2),
        4 => (-2, 1),
        5 => (-2, -1),
        6 => (-1, -2),
        7 => (1, -2),
        _ => (2, -1),
    }
}

/// The eight signed permutations of the plane.
fn b2_weyl() -> Vec<[[i64; 2]; 2]> {
    let mut out = Vec::new();
    for swap in [false, true] {
        for s1 in [1, -1] {
            for s2 in [1, -1] {
                out.push(if swap { [[0, s1], [s2, 0]] } else { [[s1, 0], [0, s2]] });
            }
        }
    }
    out
}

fn apply2(w: &[[i64; 2]; 2], v: &(Rational, Rational)) -> (Rational, Rational) {
    let f = |r: usize| &v.0 * Rational::from_integer(w[r][0].into()) + &v.1 * Rational::from_integer(w[r][1].into());
    (f(0), f(1))
}

fn wall(what: &str) -> Error {
    Error::Singular(format!("{what} lies on a wall"))
}

/// Four times the discrete series constant of a rank-two system at `(x, chi)`.
///
/// For the full `B2` system the table is read off for `x` in cone (V), where
/// `4^{-1} c = (II) + (VIII)`; other cones are moved there by the Weyl group,
/// under which the constant is invariant.
pub fn cone_constant_2d(x: &(Rational, Rational), chi: &(Rational, Rational), sys: Rank2System) -> Result<i64> {
    match sys {
        Rank2System::B2 => {
            let cx = cone_index(x).ok_or_else(|| wall("x"))?;
            cone_index(chi).ok_or_else(|| wall("chi"))?;
            let r = cone_representative(cx);
            let rep = (Rational::from_integer(r.0.into()), Rational::from_integer(r.1.into()));
            let w = b2_weyl().into_iter().find(|w| cone_index(&apply2(w, &rep)) == Some(5)).expect("Weyl group is transitive on cones");
            let c = cone_index(&apply2(&w, chi)).expect("Weyl group preserves walls");
            Ok(4 * (c == 2 || c == 8) as i64)
        }
        Rank2System::D2 => {
            let (s, d) = (&x.0 + &x.1, &x.0 - &x.1);
            let (cs, cd) = (&chi.0 + &chi.1, &chi.0 - &chi.1);
            if s.is_zero() || d.is_zero() {
                return Err(wall("x"));
            }
            if cs.is_zero() || cd.is_zero() {
                return Err(wall("chi"));
            }
            Ok(4 * ((s * cs).is_negative() && (d * cd).is_negative()) as i64)
        }
        Rank2System::Endos => {
            if x.0.is_zero() || x.1.is_zero() {
                return Err(wall("x"));
            }
            if chi.0.is_zero() || chi.1.is_zero() {
                return Err(wall("chi"));
            }
            Ok(4 * ((&x.0 * &chi.0).is_negative() && (&x.1 * &chi.1).is_negative()) as i64)
        }
    }
}

/// Twice the indicator `[x chi < 0]`: the constant of the rank-one system `{±alpha}`.
pub fn rank_one_constant(x: &Rational, chi: &Rational) -> Result<i64> {
    if x.is_zero() {
        return Err(wall("x"));
    }
    if chi.is_zero() {
        return Err(wall("chi"));
    }
    Ok(2 * (x * chi).is_negative() as i64)
}

/// `omega_0(A)`: sign of the shuffle listing the complement of `A` before `A`.
pub fn omega0_sign(a: &[usize], r: usize) -> i8 {
    let mut seq: Vec<usize> = (0..r).filter(|i| !a.contains(i)).collect();
    seq.extend(a.iter().copied().sorted());
    permutation_sign(&seq)
}

/// `epsilon_i(A) = +1` if `i` lies in `A`, `-1` otherwise.
pub fn epsilon_in(i: usize, a: &[usize]) -> i8 {
    if a.contains(&i) {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Vanishing {
    pub m: Vec<i64>,
    pub n: i64,
}

fn ceil_half(n: usize) -> usize {
    n.div_ceil(2)
}

/// The root system attached to a subset `A` of `[r]`, with `[0, r_plus)` the
/// coordinates where the torus element is positive. `None` when `-1` is not
/// in the Weyl group, in which case the constant vanishes.
pub fn system_for_subset(parity: Parity, r: usize, r_plus: usize, t: usize, a: &[usize]) -> Option<ProductRootSystem> {
    let in_a = |i: &usize| a.contains(i);
    let plus: Vec<usize> = (0..r_plus).collect();
    let minus: Vec<usize> = (r_plus..r).collect();
    let ap: Vec<usize> = plus.iter().copied().filter(in_a).collect();
    let acp: Vec<usize> = plus.iter().copied().filter(|i| !in_a(i)).collect();
    let am: Vec<usize> = minus.iter().copied().filter(in_a).collect();
    let acm: Vec<usize> = minus.iter().copied().filter(|i| !in_a(i)).collect();
    if am.len() % 2 == 1 || acm.len() % 2 == 1 {
        return None;
    }
    if parity == Parity::Even && (ap.len() % 2 == 1 || acp.len() % 2 == 1) {
        return None;
    }
    let plus_kind = if parity == Parity::Odd { FactorKind::B } else { FactorKind::D };
    let mut factors = vec![
        Factor { kind: plus_kind, support: ap },
        Factor { kind: plus_kind, support: acp },
        Factor { kind: FactorKind::D, support: am },
        Factor { kind: FactorKind::D, support: acm },
    ];
    factors.extend((0..t).map(|j| Factor { kind: FactorKind::A1, support: vec![r + j] }));
    Some(ProductRootSystem::new(factors).expect("supports are disjoint and even where required"))
}

/// Sign attached to `A` in the subset sums: `(-1)^{|A| + ceil(|A|/2)}` in the
/// odd case and `(-1)^{|A|/2}` in the even case, times `omega_0(A)`.
pub fn subset_weight(parity: Parity, a: &[usize], r: usize) -> i64 {
    let k = a.len();
    let e = match parity {
        Parity::Odd => k + ceil_half(k),
        Parity::Even => k / 2,
    };
    omega0_sign(a, r) as i64 * if e % 2 == 0 { 1 } else { -1 }
}

/// Checks that `mu` has nonzero entries of pairwise distinct absolute value.
pub fn check_regular(mu: &[Rational]) -> Result<()> {
    for (i, a) in mu.iter().enumerate() {
        if a.is_zero() {
            return Err(Error::Singular(format!("mu[{i}] is zero")));
        }
        for b in &mu[i + 1..] {
            if a.abs() == b.abs() {
                return Err(Error::Singular("mu has two coordinates of equal absolute value".into()));
            }
        }
    }
    Ok(())
}

/// `M_i = sum_A eps_i(A) w(A) cbar(A)` and `N = sum_A w(A) cbar(A)` over the
/// admissible subsets `A` of `[r]`. `mu` has `r + t` coordinates, the last
/// `t` belonging to the `A1` factors.
pub fn vanishing_quantities(r: usize, t: usize, parity: Parity, r_plus: usize, mu: &[Rational]) -> Result<Vanishing> {
    if r_plus > r {
        return invalid("the positive block cannot exceed r");
    }
    if mu.len() != r + t {
        return invalid(format!("mu must have {} coordinates", r + t));
    }
    if r > MAX_PARTITION_SET {
        return Err(Error::Resource(format!("r = {r} exceeds {MAX_PARTITION_SET}")));
    }
    if parity == Parity::Even && (r % 2 == 1 || r_plus % 2 == 1) {
        return invalid("the even case needs r and the positive block to be even");
    }
    check_regular(mu)?;
    let input = HerbInput { mu: mu.to_vec() };
    let terms: Vec<(Vec<usize>, i64)> = (0u32..1 << r)
        .into_par_iter()
        .filter_map(|mask| {
            let a: Vec<usize> = (0..r).filter(|i| mask >> i & 1 == 1).collect();
            let sys = system_for_subset(parity, r, r_plus, t, &a)?;
            let c = herb_sum(&sys, &input, parity).expect("validated system");
            Some((a.clone(), subset_weight(parity, &a, r) * c))
        })
        .collect();
    let mut m = vec![0; r];
    let mut n = 0;
    for (a, v) in terms {
        n += v;
        for (i, mi) in m.iter_mut().enumerate() {
            *mi += epsilon_in(i, &a) as i64 * v;
        }
    }
    Ok(Vanishing { m, n })
}

/// `sum_{B ⊂ [t]} (-1)^{|B|}`.
pub fn alternating_subset_sum(t: usize) -> i64 {
    (0u32..1 << t).map(|b| if b.count_ones() % 2 == 0 { 1 } else { -1 }).sum()
}

/// `sum_{B ⊂ [t]} upsilon_j(B) (-1)^{|B|}` with `upsilon_j(B) = ±1` by membership.
pub fn weighted_alternating_subset_sum(t: usize, j: usize) -> i64 {
    (0u32..1 << t)
        .map(|b| {
            let s = if b.count_ones() % 2 == 0 { 1 } else { -1 };
            let u = if b >> j & 1 == 1 { 1 } else { -1 };
            s * u
        })
        .sum()
}

/// Which quantities a sweep expects to vanish.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VanishingClaim {
    pub n: bool,
    pub m: bool,
}

/// The claims for a given `(parity, r)`: in the odd case `N = 0` from `r = 3`
/// and `M_i = 0` from `r = 5`; in the even case `N = 0` for `r` in `{4, 6}`
/// and `M_i = 0` at `r = 6`.
pub fn vanishing_claim(parity: Parity, r: usize) -> VanishingClaim {
    match parity {
        Parity::Odd => VanishingClaim { n: r >= 3, m: r >= 5 },
        Parity::Even => VanishingClaim { n: r == 4 || r == 6, m: r == 6 },
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VanishingWitness {
    pub t: usize,
    pub r_plus: usize,
    pub mu: Vec<String>,
    pub values: Vanishing,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VanishingReport {
    pub parity: Parity,
    pub r: usize,
    pub claim: VanishingClaim,
    pub seed: u64,
    pub samples_per_config: usize,
    pub configurations: usize,
    pub failures: Vec<VanishingWitness>,
}

impl VanishingReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.configurations > 0
    }
}

/// A regular `mu`: nonzero rationals with pairwise distinct absolute values.
pub fn random_regular_mu(len: usize, rng: &mut impl rand::Rng) -> Vec<Rational> {
    loop {
        let mu: Vec<Rational> = (0..len)
            .map(|_| {
                let num: i64 = rng.gen_range(1..=60) * if rng.gen_bool(0.5) { 1 } else { -1 };
                Rational::new(num.into(), rng.gen_range(1..=4i64).into())
            })
            .collect();
        if check_regular(&mu).is_ok() {
            return mu;
        }
    }
}

/// Sweeps `t` in `{0, 1}`, every admissible size of the positive block and
/// `samples` random regular `mu` per configuration. A witness is recorded
/// whenever a claimed quantity does not vanish. Each configuration draws from
/// its own stream, so the report does not depend on scheduling.
pub fn verify_vanishing(parity: Parity, r: usize, samples: usize, seed: u64) -> Result<VanishingReport> {
    use rand::SeedableRng;
    let claim = vanishing_claim(parity, r);
    let mut configs = Vec::new();
    for t in 0..=1 {
        for r_plus in 0..=r {
            if parity == Parity::Even && (r % 2 == 1 || r_plus % 2 == 1) {
                continue;
            }
            configs.push((t, r_plus));
        }
    }
    if configs.is_empty() {
        return invalid(format!("no configurations for r = {r} in the {parity} case"));
    }
    let failures: Vec<Vec<VanishingWitness>> = configs
        .par_iter()
        .enumerate()
        .map(|(k, &(t, r_plus))| -> Result<Vec<VanishingWitness>> {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let mut out = Vec::new();
            for _ in 0..samples {
                let mu = random_regular_mu(r + t, &mut rng);
                let v = vanishing_quantities(r, t, parity, r_plus, &mu)?;
                if (claim.n && v.n != 0) || (claim.m && v.m.iter().any(|&x| x != 0)) {
                    out.push(VanishingWitness { t, r_plus, mu: mu.iter().map(crate::exactnum::format_rational).collect(), values: v });
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(VanishingReport {
        parity,
        r,
        claim,
        seed,
        samples_per_config: samples,
        configurations: configs.len(),
        failures: failures.into_iter().flatten().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    #[test]
    fn partition_examples() {
        let p = partitions_le2(&[]).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].1, 1);
        let p = partitions_le2(&[1, 2]).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].0.blocks, vec![vec![1, 2]]);
        assert_eq!(partitions_le2(&[1, 2, 3]).unwrap().len(), 3);
        assert_eq!(partitions_prime(&[1, 2]).unwrap().len(), 2);
        assert!(partitions_prime(&[]).unwrap().is_empty());
        assert_eq!(partitions_prime(&[1, 2, 3, 4]).unwrap().len(), 12);
        assert!(partitions_prime(&[1, 2, 3]).is_err());
        assert!(matches!(partitions_le2(&(0..15).collect::<Vec<_>>()), Err(Error::Resource(_))));
    }

    #[test]
    fn partition_signs() {
        // {1,3},{2}: sequence 1,3,2 has one inversion.
        let p = partitions_le2(&[1, 2, 3]).unwrap();
        let find = |blocks: Vec<Vec<usize>>| p.iter().find(|(q, _)| q.blocks == blocks).unwrap().1;
        assert_eq!(find(vec![vec![1, 3], vec![2]]), -1);
        assert_eq!(find(vec![vec![2, 3], vec![1]]), 1);
        assert_eq!(find(vec![vec![1, 2], vec![3]]), 1);
        // Marked singleton placed last.
        let q = partitions_prime(&[1, 2]).unwrap();
        for (part, s) in q {
            assert_eq!(s, if part.marked == Some(2) { 1 } else { -1 });
        }
    }

    #[test]
    fn c_function_examples() {
        assert_eq!(c_function(CKind::C1, &[int(-1)]).unwrap(), 0);
        assert_eq!(c_function(CKind::C2B, &[int(1), int(2)]).unwrap(), 1);
        assert_eq!(c_function(CKind::C2D, &[int(2), int(-1)]).unwrap(), 1);
        assert_eq!(c2b(&int(3), &int(-2)), 1);
        assert_eq!(c2b(&int(-1), &int(2)), 0);
        assert!(c_function(CKind::C1, &[]).is_err());
    }

    #[test]
    fn herb_examples() {
        let empty = ProductRootSystem::new(vec![]).unwrap();
        let inp = HerbInput { mu: vec![int(2)] };
        assert_eq!(herb_sum(&empty, &inp, Parity::Odd).unwrap(), 1);
        let a1 = ProductRootSystem::new(vec![Factor { kind: FactorKind::A1, support: vec![0] }]).unwrap();
        assert_eq!(herb_sum(&a1, &inp, Parity::Odd).unwrap(), 1);
        assert!(ProductRootSystem::new(vec![Factor { kind: FactorKind::D, support: vec![0] }]).is_err());
        assert!(ProductRootSystem::new(vec![
            Factor { kind: FactorKind::B, support: vec![0, 1] },
            Factor { kind: FactorKind::D, support: vec![1, 2] },
        ])
        .is_err());
    }

    #[test]
    fn cone_examples() {
        let x = (int(-3), int(1));
        assert_eq!(cone_constant_2d(&x, &(int(2), int(1)), Rank2System::D2).unwrap(), 4);
        assert_eq!(cone_constant_2d(&(int(-2), int(1)), &(int(1), int(2)), Rank2System::D2).unwrap(), 0);
        // Endoscopic system: x in cone (V), chi in (I) or (II).
        let x5 = (int(-2), int(-1));
        assert_eq!(cone_constant_2d(&x5, &(int(2), int(1)), Rank2System::Endos).unwrap(), 4);
        assert_eq!(cone_constant_2d(&x5, &(int(-2), int(1)), Rank2System::Endos).unwrap(), 0);
        // B2 table in cones (V) and (IV).
        assert_eq!(cone_constant_2d(&x5, &(int(1), int(2)), Rank2System::B2).unwrap(), 4);
        assert_eq!(cone_constant_2d(&x5, &(int(2), int(-1)), Rank2System::B2).unwrap(), 4);
        assert_eq!(cone_constant_2d(&x5, &(int(2), int(1)), Rank2System::B2).unwrap(), 0);
        let x4 = (int(-2), int(1));
        assert_eq!(cone_constant_2d(&x4, &(int(2), int(1)), Rank2System::B2).unwrap(), 4);
        assert_eq!(cone_constant_2d(&x4, &(int(1), int(-2)), Rank2System::B2).unwrap(), 4);
        assert_eq!(cone_constant_2d(&x4, &(int(1), int(2)), Rank2System::B2).unwrap(), 0);
        assert!(matches!(cone_constant_2d(&(int(1), int(1)), &(int(2), int(1)), Rank2System::B2), Err(Error::Singular(_))));
    }

    #[test]
    fn cone_numbering() {
        for c in 1..=8u8 {
            let (a, b) = cone_representative(c);
            assert_eq!(cone_index(&(int(a), int(b))), Some(c));
        }
        assert_eq!(cone_index(&(int(0), int(1))), None);
    }

    #[test]
    fn subset_sums_in_t() {
        for t in 2..6 {
            assert_eq!(alternating_subset_sum(t), 0);
            for j in 0..t {
                assert_eq!(weighted_alternating_subset_sum(t, j), 0);
            }
        }
        assert_eq!(alternating_subset_sum(0), 1);
    }

    #[test]
    fn small_r_witness() {
        let v = vanishing_quantities(2, 0, Parity::Odd, 0, &[int(2), int(1)]).unwrap();
        assert_eq!(v, Vanishing { m: vec![-2, -2], n: 0 });
    }

    #[test]
    fn sweeps_small() {
        let odd = verify_vanishing(Parity::Odd, 5, 4, 7).unwrap();
        assert!(odd.passed(), "{odd:?}");
        let even = verify_vanishing(Parity::Even, 4, 4, 7).unwrap();
        assert!(even.passed(), "{even:?}");
        assert_eq!(verify_vanishing(Parity::Odd, 3, 3, 1).unwrap(), verify_vanishing(Parity::Odd, 3, 3, 1).unwrap());
    }

    #[test]
    fn r_two_is_not_claimed() {
        // With M claimed at r = 2 the sweep must fail.
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3);
        let mu = random_regular_mu(2, &mut rng);
        let v = vanishing_quantities(2, 0, Parity::Odd, 0, &mu).unwrap();
        assert!(v.m.iter().any(|&x| x != 0));
        assert!(!vanishing_claim(Parity::Odd, 2).m);
    }

    #[test]
    fn regularity_is_enforced() {
        assert!(vanishing_quantities(3, 0, Parity::Odd, 1, &[int(1), int(-1), rat(1, 2)]).is_err());
        assert!(vanishing_quantities(3, 0, Parity::Even, 2, &[int(1), int(2), int(3)]).is_err());
    }
}
