//! Elliptic endoscopic data of `SO(V)` and bi-elliptic `G`-endoscopic data
//! of its standard Levis, described purely by parameters.
//!
//! A datum for `G` is a pair of quasi-split special orthogonal groups
//! `SO(d+, delta+) x SO(d-, delta-)`. In the odd case the discriminants are
//! trivial and `d+ + d- = d + 1`; in the even case `d+ + d- = d` and
//! `delta+ delta- = delta`.

use std::cmp::Ordering;
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::dsconst::Parity;
use crate::error::{domain, invalid, Error, Result};
use crate::exactnum::{
    format_rational, int, is_prime, least_nonresidue, padic_valuation, prime_divisors, squareclass_of, Rational,
    SquareClass, SquareContext,
};
use crate::rootdata::LeviLabel;

/// Where the discriminants live. The global context enumerates square
/// classes supported on a fixed finite set of primes together with `-1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum EndoContext {
    RealR,
    LocalQp(u64),
    GlobalQ(Vec<u64>),
}

impl EndoContext {
    pub fn square_context(&self) -> SquareContext {
        match self {
            EndoContext::RealR => SquareContext::RealR,
            EndoContext::LocalQp(p) => SquareContext::LocalQp(*p),
            EndoContext::GlobalQ(_) => SquareContext::GlobalQ,
        }
    }

    /// All square classes available in this context.
    pub fn square_classes(&self) -> Result<Vec<SquareClass>> {
        let ctx = self.square_context();
        let reps: Vec<Rational> = match self {
            EndoContext::RealR => vec![int(1), int(-1)],
            EndoContext::LocalQp(p) => {
                if !is_prime(*p) {
                    return domain(format!("{p} is not prime"));
                }
                let units: Vec<i64> = if *p == 2 { vec![1, 3, 5, 7] } else { vec![1, least_nonresidue(*p) as i64] };
                units.iter().flat_map(|&u| [int(u), int(u) * int(*p as i64)]).collect()
            }
            EndoContext::GlobalQ(primes) => {
                if let Some(p) = primes.iter().find(|p| !is_prime(**p)) {
                    return domain(format!("{p} is not prime"));
                }
                let primes: Vec<u64> = primes.iter().copied().sorted().dedup().collect();
                let mut out = Vec::new();
                for subset in primes.iter().powerset() {
                    let n: BigInt = subset.iter().map(|&&p| BigInt::from(p)).product();
                    out.push(Rational::from_integer(n.clone()));
                    out.push(Rational::from_integer(-n));
                }
                out
            }
        };
        reps.iter().map(|r| squareclass_of(r, ctx)).collect()
    }

    fn contains(&self, class: &SquareClass) -> Result<bool> {
        Ok(self.square_classes()?.contains(class))
    }
}

impl std::str::FromStr for EndoContext {
    type Err = Error;
    /// `real`, `qp:<p>` or `global:<p1>,<p2>,...` (possibly empty after the colon).
    fn from_str(s: &str) -> Result<Self> {
        if s == "real" {
            return Ok(EndoContext::RealR);
        }
        if let Some(p) = s.strip_prefix("qp:") {
            return p.parse().map(EndoContext::LocalQp).map_err(|_| Error::Parse(format!("bad prime {p:?}")));
        }
        if let Some(list) = s.strip_prefix("global:") {
            let primes = list
                .split(',')
                .filter(|x| !x.is_empty())
                .map(|x| x.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad prime {x:?}"))))
                .collect::<Result<Vec<_>>>()?;
            return Ok(EndoContext::GlobalQ(primes));
        }
        Err(Error::Parse(format!("unknown context {s:?}")))
    }
}

/// Parameters `(d+, delta+, d-, delta-)` of an elliptic endoscopic datum.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct EndoParams {
    pub parity: Parity,
    pub d_plus: usize,
    pub delta_plus: SquareClass,
    pub d_minus: usize,
    pub delta_minus: SquareClass,
}

/// Excluded factors: split `SO(2)` and a zero-dimensional space with nontrivial discriminant.
fn excluded_factor(dim: usize, delta: &SquareClass) -> bool {
    (dim == 2 && delta.is_trivial()) || (dim == 0 && !delta.is_trivial())
}

fn class_key(c: &SquareClass) -> (i8, BigInt) {
    // Trivial class first, then by representative.
    let r = c.representative();
    (if c.is_trivial() { 0 } else { 1 }, r.numer() * r.denom())
}

impl EndoParams {
    /// Validates the parameters as a datum for `SO` of dimension `d` and discriminant `delta`.
    pub fn new(d: usize, delta: &SquareClass, d_plus: usize, delta_plus: SquareClass, d_minus: usize, delta_minus: SquareClass) -> Result<Self> {
        let parity = Parity::of(d);
        let ctx = delta.context();
        if delta_plus.context() != ctx || delta_minus.context() != ctx {
            return invalid("discriminants from different contexts");
        }
        match parity {
            Parity::Odd => {
                if d_plus % 2 == 0 || d_minus % 2 == 0 || d_plus + d_minus != d + 1 {
                    return invalid(format!("odd data need odd d+ + d- = {}", d + 1));
                }
                if !delta_plus.is_trivial() || !delta_minus.is_trivial() {
                    return invalid("odd data have trivial discriminants");
                }
            }
            Parity::Even => {
                if d_plus % 2 == 1 || d_minus % 2 == 1 || d_plus + d_minus != d {
                    return invalid(format!("even data need even d+ + d- = {d}"));
                }
                if delta_plus.mul(&delta_minus)? != *delta {
                    return invalid("delta+ delta- must equal delta");
                }
                if excluded_factor(d_plus, &delta_plus) || excluded_factor(d_minus, &delta_minus) {
                    return invalid("a factor is split SO(2) or a nontrivial SO(0)");
                }
            }
        }
        Ok(EndoParams { parity, d_plus, delta_plus, d_minus, delta_minus })
    }

    pub fn dim(&self) -> usize {
        match self.parity {
            Parity::Odd => self.d_plus + self.d_minus - 1,
            Parity::Even => self.d_plus + self.d_minus,
        }
    }

    pub fn delta(&self) -> SquareClass {
        self.delta_plus.mul(&self.delta_minus).expect("same context")
    }

    pub fn swapped(&self) -> EndoParams {
        EndoParams {
            parity: self.parity,
            d_plus: self.d_minus,
            delta_plus: self.delta_minus.clone(),
            d_minus: self.d_plus,
            delta_minus: self.delta_plus.clone(),
        }
    }

    fn order_key(&self) -> (usize, (i8, BigInt), usize, (i8, BigInt)) {
        (self.d_plus, class_key(&self.delta_plus), self.d_minus, class_key(&self.delta_minus))
    }

    /// The representative of the swap class with the larger `(d+, delta+)`.
    /// The trivial datum is thus `(d, delta, 0, 1)` (even) or `(d, 1, 1, 1)` (odd),
    /// never the representative with `s = -1`.
    pub fn canonical(&self) -> EndoParams {
        let s = self.swapped();
        match self.order_key().cmp(&s.order_key()) {
            Ordering::Less => s,
            _ => self.clone(),
        }
    }

    /// Whether `H` is the quasi-split inner form `G*`.
    pub fn is_principal(&self) -> bool {
        let small = |d: usize| d <= 1;
        small(self.d_plus) || small(self.d_minus)
    }

    pub fn factors(&self) -> [SoGroup; 2] {
        [
            SoGroup { dim: self.d_plus, delta_trivial: self.delta_plus.is_trivial() },
            SoGroup { dim: self.d_minus, delta_trivial: self.delta_minus.is_trivial() },
        ]
    }
}

impl fmt::Display for EndoParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.d_plus, self.delta_plus, self.d_minus, self.delta_minus)
    }
}

/// Every elliptic datum for `SO(d, delta)` (not up to swap).
pub fn enumerate_elliptic_all(d: usize, delta: &SquareClass, context: &EndoContext) -> Result<Vec<EndoParams>> {
    if delta.context() != context.square_context() {
        return domain("delta does not live in the requested context");
    }
    if !context.contains(delta)? {
        return domain(format!("delta = {delta} is not supported on the prime set"));
    }
    let classes = context.square_classes()?;
    let one = SquareClass::one(context.square_context());
    let mut out = Vec::new();
    match Parity::of(d) {
        Parity::Odd => {
            for dp in (1..=d).step_by(2) {
                out.push(EndoParams::new(d, delta, dp, one.clone(), d + 1 - dp, one.clone())?);
            }
        }
        Parity::Even => {
            for dp in (0..=d).step_by(2) {
                for dl in &classes {
                    let dm = delta.mul(dl)?;
                    if let Ok(e) = EndoParams::new(d, delta, dp, dl.clone(), d - dp, dm) {
                        out.push(e);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Elliptic data for `SO(d, delta)` up to swapping, one canonical representative each.
pub fn enumerate_elliptic(d: usize, delta: &SquareClass, context: &EndoContext) -> Result<Vec<EndoParams>> {
    let mut reps: Vec<EndoParams> = enumerate_elliptic_all(d, delta, context)?.iter().map(EndoParams::canonical).collect();
    reps.sort_by(|a, b| b.order_key().cmp(&a.order_key()));
    reps.dedup();
    Ok(reps)
}

/// `|Out(H, s, eta)|`.
pub fn out_group_size(params: &EndoParams) -> usize {
    match params.parity {
        Parity::Odd => {
            if params.d_plus == params.d_minus {
                2
            } else {
                1
            }
        }
        Parity::Even => {
            if params.d_plus * params.d_minus == 0 {
                1
            } else if params.d_plus == params.d_minus && params.delta().is_trivial() {
                4
            } else {
                2
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Invariants

/// A quasi-split special orthogonal group, remembered only by dimension and
/// whether its discriminant is trivial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SoGroup {
    pub dim: usize,
    pub delta_trivial: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GroupLabel {
    So(SoGroup),
    Gl(usize),
}

/// Tamagawa numbers. `SO(n)` with `n >= 3` and the anisotropic `SO(2)` give 2;
/// the split `SO(2) = GL_1`, `SO(1)`, `SO(0)` and every `GL_j` give 1.
pub fn tamagawa(label: GroupLabel) -> Rational {
    match label {
        GroupLabel::So(g) if g.dim >= 3 || (g.dim == 2 && !g.delta_trivial) => int(2),
        _ => int(1),
    }
}

/// `(k'(G), k(G))` for a group with an elliptic maximal torus over R.
pub fn k_invariants(label: GroupLabel) -> Result<(u64, u64)> {
    match label {
        GroupLabel::So(g) => {
            let m = g.dim / 2;
            if m == 0 {
                Ok((1, 1))
            } else {
                Ok((1 << m, 1 << (m - 1)))
            }
        }
        GroupLabel::Gl(j) if j == 1 || j == 2 => Ok((1, 1)),
        GroupLabel::Gl(j) => Err(Error::Unsupported(format!("GL_{j} has no elliptic maximal torus over R"))),
    }
}

fn tamagawa_product(labels: &[GroupLabel]) -> Rational {
    labels.iter().fold(Rational::one(), |acc, l| acc * tamagawa(*l))
}

fn k_product(labels: &[GroupLabel]) -> Result<Rational> {
    let mut acc = Rational::one();
    for l in labels {
        acc *= int(k_invariants(*l)?.1 as i64);
    }
    Ok(acc)
}

/// `iota(G, H) = tau(G) tau(H)^{-1} |Out(H, s, eta)|^{-1}`.
pub fn iota(g_dim: usize, g_delta_trivial: bool, h: &EndoParams) -> Rational {
    let g = tamagawa(GroupLabel::So(SoGroup { dim: g_dim, delta_trivial: g_delta_trivial }));
    let [hp, hm] = h.factors();
    g / tamagawa_product(&[GroupLabel::So(hp), GroupLabel::So(hm)]) / int(out_group_size(h) as i64)
}

/// `n^G_M`, the order of the group of automorphisms of `A_M` induced by `G`.
pub fn n_g_m(levi: LeviLabel) -> u64 {
    match levi {
        LeviLabel::M12 => 8,
        LeviLabel::M1 | LeviLabel::M2 => 2,
        LeviLabel::G => 1,
    }
}

/// The general linear part of a standard Levi.
pub fn gl_part(levi: LeviLabel) -> Vec<GroupLabel> {
    match levi {
        LeviLabel::M12 => vec![GroupLabel::Gl(1), GroupLabel::Gl(1)],
        LeviLabel::M1 => vec![GroupLabel::Gl(2)],
        LeviLabel::M2 => vec![GroupLabel::Gl(1)],
        LeviLabel::G => vec![],
    }
}

/// The index set `I_S` carrying the positional parameter `A`.
pub fn index_set(levi: LeviLabel) -> Vec<usize> {
    match levi {
        LeviLabel::M2 => vec![1],
        LeviLabel::M1 | LeviLabel::M12 => vec![1, 2],
        LeviLabel::G => vec![],
    }
}

/// The admissible values of `A`.
pub fn admissible_subsets(levi: LeviLabel) -> Vec<Vec<usize>> {
    match levi {
        LeviLabel::M1 => vec![vec![], vec![1, 2]],
        _ => index_set(levi).into_iter().powerset().collect(),
    }
}

/// Dimension of the orthogonal part `W_i` of a standard Levi.
pub fn so_part_dim(levi: LeviLabel, d: usize) -> usize {
    d - 2 * index_set(levi).len()
}

/// Cuspidality over R of `SO(n, delta)`: odd `n` always; even `n` iff `delta = (-1)^{n/2}`.
pub fn so_is_cuspidal_r(dim: usize, delta_sign: i8) -> bool {
    dim % 2 == 1 || delta_sign == if (dim / 2) % 2 == 0 { 1 } else { -1 }
}

/// Cuspidality over R of a standard Levi of `SO(V)` with `disc(V)` of sign `delta_sign`.
/// The general linear factors `GL_1`, `GL_2` are cuspidal.
pub fn is_cuspidal_r(levi: LeviLabel, d: usize, delta_sign: i8) -> bool {
    so_is_cuspidal_r(so_part_dim(levi, d), delta_sign)
}

fn real_sign(c: &SquareClass) -> Result<i8> {
    match c {
        SquareClass::Real(s) => Ok(*s),
        SquareClass::Global(n) => Ok(if n.sign() == num_bigint::Sign::Minus { -1 } else { 1 }),
        SquareClass::Local { .. } => domain("a p-adic square class has no real sign"),
    }
}

/// Both factors of `H` cuspidal over R.
pub fn endoscopic_is_cuspidal_r(h: &EndoParams) -> Result<bool> {
    Ok(so_is_cuspidal_r(h.d_plus, real_sign(&h.delta_plus)?) && so_is_cuspidal_r(h.d_minus, real_sign(&h.delta_minus)?))
}

/// Unramified at an odd prime: in the even case both discriminants need even valuation.
pub fn is_unramified_at_p(params: &EndoParams, p: u64) -> Result<bool> {
    if p == 2 || !is_prime(p) {
        return domain(format!("{p} is not an odd prime"));
    }
    if params.parity == Parity::Odd {
        return Ok(true);
    }
    let even_val = |c: &SquareClass| -> Result<bool> {
        match c {
            SquareClass::Local { p: q, odd_valuation, .. } if *q == p => Ok(!odd_valuation),
            SquareClass::Global(n) => Ok(padic_valuation(&Rational::from_integer(n.clone()), p)? % 2 == 0),
            _ => domain("square class does not determine a valuation at p"),
        }
    };
    Ok(even_val(&params.delta_plus)? && even_val(&params.delta_minus)?)
}

/// Primes at which some datum in the list ramifies (for global square classes).
pub fn ramified_primes(params: &EndoParams) -> Vec<u64> {
    let mut out = Vec::new();
    for c in [&params.delta_plus, &params.delta_minus] {
        if let SquareClass::Global(n) = c {
            out.extend(prime_divisors(n));
        }
    }
    out.sort();
    out.dedup();
    out.retain(|&p| p != 2);
    out
}

// ---------------------------------------------------------------------------
// G-endoscopic data for Levis

/// A bi-elliptic `G`-endoscopic datum `(A, d+, delta+, d-, delta-)` for a standard Levi.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct GEndoParams {
    pub levi: LeviLabel,
    /// Positions of the `+1` entries of `s` on the general linear part.
    pub subset: Vec<usize>,
    /// The underlying datum for the orthogonal part of the Levi.
    pub base: EndoParams,
}

impl GEndoParams {
    pub fn new(levi: LeviLabel, subset: Vec<usize>, base: EndoParams) -> Result<Self> {
        if levi == LeviLabel::G {
            return domain("G-endoscopic data are for proper Levis");
        }
        if !admissible_subsets(levi).contains(&subset) {
            return invalid(format!("A = {subset:?} is not admissible for {levi}"));
        }
        let g = GEndoParams { levi, subset, base };
        if g.base.parity == Parity::Even {
            let h = g.to_eg_unchecked();
            if excluded_factor(h.0, &g.base.delta_plus) || excluded_factor(h.1, &g.base.delta_minus) {
                return invalid("the induced datum for G has an excluded factor");
            }
        }
        Ok(g)
    }

    pub fn complement(&self) -> Vec<usize> {
        index_set(self.levi).into_iter().filter(|i| !self.subset.contains(i)).collect()
    }

    fn to_eg_unchecked(&self) -> (usize, usize) {
        (self.base.d_plus + 2 * self.subset.len(), self.base.d_minus + 2 * self.complement().len())
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.dim() + 2 * index_set(self.levi).len()
    }

    /// The induced elliptic datum for `G`.
    pub fn to_eg(&self) -> EndoParams {
        let (dp, dm) = self.to_eg_unchecked();
        EndoParams {
            parity: self.base.parity,
            d_plus: dp,
            delta_plus: self.base.delta_plus.clone(),
            d_minus: dm,
            delta_minus: self.base.delta_minus.clone(),
        }
    }

    /// The underlying elliptic datum for `M`.
    pub fn to_em(&self) -> EndoParams {
        self.base.clone()
    }

    pub fn swapped(&self) -> GEndoParams {
        GEndoParams { levi: self.levi, subset: self.complement(), base: self.base.swapped() }
    }

    fn order_key(&self) -> impl Ord {
        let h = self.to_eg();
        (h.order_key(), self.base.order_key(), self.subset.clone())
    }

    pub fn canonical(&self) -> GEndoParams {
        let s = self.swapped();
        if self.order_key() < s.order_key() {
            s
        } else {
            self.clone()
        }
    }

    /// `|Out_G(e)|`: trivial in the odd case; in the even case the simultaneous
    /// outer automorphism survives unless `d+ d- = 0`.
    pub fn out_g_size(&self) -> usize {
        match self.base.parity {
            Parity::Odd => 1,
            Parity::Even => {
                if self.base.d_plus * self.base.d_minus == 0 {
                    1
                } else {
                    2
                }
            }
        }
    }

    /// The groups making up `M' = M^GL x SO(d+) x SO(d-)`.
    pub fn m_prime_groups(&self) -> Vec<GroupLabel> {
        let mut v = gl_part(self.levi);
        v.extend(self.base.factors().map(GroupLabel::So));
        v
    }
}

impl fmt::Display for GEndoParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = self.subset.iter().map(|i| i.to_string()).join(",");
        write!(f, "{} A={{{}}} {}", self.levi, a, self.base)
    }
}

/// All bi-elliptic `G`-endoscopic data for `levi` (not up to swap).
pub fn enumerate_g_endoscopy_all(levi: LeviLabel, d: usize, delta: &SquareClass, context: &EndoContext) -> Result<Vec<GEndoParams>> {
    if levi == LeviLabel::G {
        return domain("G-endoscopic data are for proper Levis");
    }
    let w = so_part_dim(levi, d);
    if w == 0 {
        return domain("the orthogonal part of the Levi is trivial");
    }
    let mut out = Vec::new();
    for base in enumerate_elliptic_all(w, delta, context)? {
        for a in admissible_subsets(levi) {
            if let Ok(g) = GEndoParams::new(levi, a, base.clone()) {
                out.push(g);
            }
        }
    }
    Ok(out)
}

/// Bi-elliptic `G`-endoscopic data up to simultaneous swapping.
pub fn enumerate_g_endoscopy(levi: LeviLabel, d: usize, delta: &SquareClass, context: &EndoContext) -> Result<Vec<GEndoParams>> {
    let mut v: Vec<GEndoParams> = enumerate_g_endoscopy_all(levi, d, delta, context)?.iter().map(GEndoParams::canonical).collect();
    v.sort_by(|a, b| b.order_key().cmp(&a.order_key()));
    v.dedup();
    Ok(v)
}

/// Both sides of `tau(G)/tau(H) * tau(M')/tau(M) = k(H)/k(G) * k(M)/k(M')`.
pub fn tau_k_sides(g: &GEndoParams, g_delta_trivial: bool) -> Result<(Rational, Rational)> {
    let d = g.ambient_dim();
    let big = GroupLabel::So(SoGroup { dim: d, delta_trivial: g_delta_trivial });
    let h = g.to_eg();
    let hs: Vec<GroupLabel> = h.factors().map(GroupLabel::So).to_vec();
    let mut m = gl_part(g.levi);
    m.push(GroupLabel::So(SoGroup { dim: so_part_dim(g.levi, d), delta_trivial: g_delta_trivial }));
    let mp = g.m_prime_groups();
    let lhs = tamagawa(big) / tamagawa_product(&hs) * tamagawa_product(&mp) / tamagawa_product(&m);
    let rhs = k_product(&hs)? / k_product(&[big])? * k_product(&m)? / k_product(&mp)?;
    Ok((lhs, rhs))
}

pub fn tau_k_identity_check(g: &GEndoParams, g_delta_trivial: bool) -> Result<bool> {
    let (l, r) = tau_k_sides(g, g_delta_trivial)?;
    Ok(l == r)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TauKReport {
    pub d_min: usize,
    pub d_max: usize,
    pub contexts: Vec<String>,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl TauKReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.checked > 0
    }
}

/// Runs `tau_k_identity_check` on every `G`-endoscopic datum of every proper
/// Levi, for `d_min <= d <= d_max` and every discriminant of each context
/// (trivial only in odd dimension).
pub fn verify_tau_k(d_min: usize, d_max: usize, contexts: &[EndoContext]) -> Result<TauKReport> {
    let mut report = TauKReport { d_min, d_max, contexts: vec![], checked: 0, failures: vec![] };
    for ctx in contexts {
        report.contexts.push(format!("{ctx:?}"));
        for d in d_min..=d_max {
            let deltas = match Parity::of(d) {
                Parity::Odd => vec![SquareClass::one(ctx.square_context())],
                Parity::Even => ctx.square_classes()?,
            };
            for delta in &deltas {
                for levi in [LeviLabel::M1, LeviLabel::M2, LeviLabel::M12] {
                    for g in enumerate_g_endoscopy_all(levi, d, delta, ctx)? {
                        report.checked += 1;
                        let (l, r) = tau_k_sides(&g, delta.is_trivial())?;
                        if l != r {
                            report.failures.push(format!("d={d} delta={delta} {g}: {l} != {r}"));
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

/// A row of the enumeration table as served to the command line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EndoRow {
    pub case: String,
    pub dplus: usize,
    pub deltaplus: String,
    pub dminus: usize,
    pub deltaminus: String,
    pub out: usize,
    pub iota: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cuspidal: Option<bool>,
    /// Odd primes where a discriminant ramifies (global context only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ramified: Option<Vec<u64>>,
}

impl EndoRow {
    pub fn for_group(d: usize, delta: &SquareClass, h: &EndoParams) -> Result<Self> {
        let cuspidal = match delta.context() {
            SquareContext::LocalQp(_) => None,
            _ => Some(endoscopic_is_cuspidal_r(h)?),
        };
        Ok(EndoRow {
            case: format!("SO({d})"),
            dplus: h.d_plus,
            deltaplus: h.delta_plus.to_string(),
            dminus: h.d_minus,
            deltaminus: h.delta_minus.to_string(),
            out: out_group_size(h),
            iota: format_rational(&iota(d, delta.is_trivial(), h)),
            subset: None,
            cuspidal,
            ramified: matches!(delta.context(), SquareContext::GlobalQ).then(|| ramified_primes(h)),
        })
    }

    pub fn for_levi(d: usize, delta: &SquareClass, g: &GEndoParams) -> Result<Self> {
        let h = g.to_eg();
        let mut row = Self::for_group(d, delta, &h)?;
        row.case = g.levi.to_string();
        row.dplus = g.base.d_plus;
        row.dminus = g.base.d_minus;
        row.out = g.out_g_size();
        row.subset = Some(format!("{{{}}}", g.subset.iter().map(|i| i.to_string()).join(",")));
        Ok(row)
    }
}
