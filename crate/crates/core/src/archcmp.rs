//! Archimedean comparisons on the non-elliptic tori of the standard Levis.
//!
//! Every quantity is normalized by the positive factor
//! `delta_P(gamma)^{1/2} Delta_M(gamma)^{-1}`, which both sides of each
//! identity share. The Kostant-Weyl side is computed from Kostant's theorem
//! and Levi Weyl numerators; the character side is computed from the full
//! Weyl group and discrete series constants. The two paths share only the
//! root datum.

use std::sync::Arc;

use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dsconst::{cone_constant_2d, cone_representative, rank_one_constant, Parity, Rank2System};
use crate::error::{domain, Error, Result};
use crate::exactnum::{exact_root, format_rational, int, rat, GaussianRational, Rational};
use crate::rootdata::{
    inversion_set, kostant_cohomology, levi_system, truncate_cohomology, weyl_enumerate, Coweight, LeviLabel, LeviSystem,
    Root, RootDatum, TorusPoint, Weight, WeylElement,
};

/// Precomputed Weyl data for one root datum.
struct WeylData {
    element: WeylElement,
    /// Sum of the roots in `Phi(w)`.
    inversion_sum: Vec<i64>,
    odd: bool,
}

struct Tables {
    datum: RootDatum,
    positive: Vec<Root>,
    weyl: Vec<WeylData>,
    m12: LeviSystem,
    m2: LeviSystem,
    m1: LeviSystem,
}

impl Tables {
    fn new(datum: RootDatum) -> Result<Self> {
        let positive = datum.positive_roots();
        let weyl = weyl_enumerate(&datum)?
            .into_iter()
            .map(|w| {
                let inv = inversion_set(&w, &positive);
                let mut inversion_sum = vec![0; datum.rank];
                for a in &inv {
                    for (s, x) in inversion_sum.iter_mut().zip(a) {
                        *s += x;
                    }
                }
                WeylData { element: w, inversion_sum, odd: inv.len() % 2 == 1 }
            })
            .collect();
        Ok(Tables {
            datum,
            positive,
            weyl,
            m12: levi_system(&datum, LeviLabel::M12)?,
            m2: levi_system(&datum, LeviLabel::M2)?,
            m1: levi_system(&datum, LeviLabel::M1)?,
        })
    }

    fn levi(&self, label: LeviLabel) -> &LeviSystem {
        match label {
            LeviLabel::M1 => &self.m1,
            LeviLabel::M2 => &self.m2,
            _ => &self.m12,
        }
    }
}

/// A Levi, an ambient dimension and the highest weight of the coefficient system.
#[derive(Clone, Serialize)]
pub struct ArchCase {
    pub levi: LeviLabel,
    pub d: usize,
    pub lambda: Weight,
    #[serde(skip)]
    tables: Arc<Tables>,
}

impl std::fmt::Debug for ArchCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ArchCase({}, d={}, lambda={})", self.levi, self.d, self.lambda)
    }
}

impl ArchCase {
    pub fn new(levi: LeviLabel, d: usize, lambda: Weight) -> Result<Self> {
        if d < 7 {
            return domain("archimedean comparisons need d >= 7");
        }
        if levi == LeviLabel::G {
            return domain("the comparisons concern proper Levis");
        }
        if levi == LeviLabel::M2 && d % 2 == 0 {
            return domain("M2 has no R-elliptic maximal torus when d is even");
        }
        let datum = RootDatum::for_dimension(d)?;
        if !datum.is_group_weight(&lambda) || !datum.is_dominant(&lambda) {
            return domain(format!("{lambda} is not a dominant integral weight"));
        }
        Ok(ArchCase { levi, d, lambda, tables: Arc::new(Tables::new(datum)?) })
    }

    /// Same Levi and dimension with another highest weight, reusing tables.
    pub fn with_lambda(&self, lambda: Weight) -> Result<Self> {
        if !self.tables.datum.is_group_weight(&lambda) || !self.tables.datum.is_dominant(&lambda) {
            return domain(format!("{lambda} is not a dominant integral weight"));
        }
        Ok(ArchCase { lambda, ..self.clone() })
    }

    pub fn parity(&self) -> Parity {
        Parity::of(self.d)
    }

    pub fn rank(&self) -> usize {
        self.d / 2
    }

    /// `q(G)` for `SO(d-2, 2)`: half the dimension of the symmetric space.
    pub fn q_of_group(&self) -> usize {
        self.d - 2
    }

    fn lambda_coords(&self) -> Vec<i64> {
        self.lambda.coords().expect("validated integral")
    }

    fn lambda_plus_rho(&self) -> Weight {
        self.lambda.add(&self.tables.datum.rho())
    }

    /// Number of compact coordinates of the torus for this Levi.
    pub fn circle_count(&self) -> usize {
        match self.levi {
            LeviLabel::M2 => self.rank() - 1,
            _ => self.rank() - 2,
        }
    }
}

/// A point of the maximal torus of a Levi.
///
/// For `M1` the first two coordinates are `a + bi` and `a - bi`; for `M2`
/// the first coordinate is `a`; for `M12` the first two are `a` and `b`. The
/// remaining coordinates lie on the unit circle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GammaSample {
    pub a: Rational,
    pub b: Option<Rational>,
    pub circle: Vec<GaussianRational>,
}

impl GammaSample {
    pub fn coords(&self, levi: LeviLabel) -> Result<Vec<GaussianRational>> {
        let mut z = Vec::with_capacity(self.circle.len() + 2);
        match levi {
            LeviLabel::M1 => {
                let b = self.b.clone().ok_or_else(|| Error::Invalid("M1 samples need b".into()))?;
                z.push(GaussianRational::new(self.a.clone(), b.clone()));
                z.push(GaussianRational::new(self.a.clone(), -b));
            }
            LeviLabel::M2 => z.push(GaussianRational::real(self.a.clone())),
            LeviLabel::M12 => {
                let b = self.b.clone().ok_or_else(|| Error::Invalid("M12 samples need b".into()))?;
                z.push(GaussianRational::real(self.a.clone()));
                z.push(GaussianRational::real(b));
            }
            LeviLabel::G => return domain("no sample layout for G"),
        }
        z.extend(self.circle.iter().cloned());
        Ok(z)
    }

    pub fn describe(&self) -> String {
        let b = self.b.as_ref().map(format_rational).unwrap_or_else(|| "-".into());
        let c: Vec<String> = self.circle.iter().map(|z| z.to_string()).collect();
        format!("a={} b={} circle=[{}]", format_rational(&self.a), b, c.join(", "))
    }
}

/// Integer powers of each coordinate, cached over a symmetric exponent range.
struct Powers {
    bound: i64,
    table: Vec<Vec<GaussianRational>>,
}

impl Powers {
    fn new(z: &[GaussianRational], bound: i64) -> Result<Self> {
        let mut table = Vec::with_capacity(z.len());
        for x in z {
            let inv = x.inv()?;
            let mut row = vec![GaussianRational::one(); (2 * bound + 1) as usize];
            for k in 1..=bound {
                row[(bound + k) as usize] = &row[(bound + k - 1) as usize] * x;
                row[(bound - k) as usize] = &row[(bound - k + 1) as usize] * &inv;
            }
            table.push(row);
        }
        Ok(Powers { bound, table })
    }

    fn monomial(&self, exp: &[i64]) -> GaussianRational {
        let mut v: Option<GaussianRational> = None;
        for (row, &k) in self.table.iter().zip(exp) {
            if k == 0 {
                continue;
            }
            assert!(k.abs() <= self.bound, "exponent {k} outside the cached range");
            let p = &row[(self.bound + k) as usize];
            v = Some(match v {
                None => p.clone(),
                Some(acc) => &acc * p,
            });
        }
        v.unwrap_or_else(GaussianRational::one)
    }
}

fn exponent_bound(case: &ArchCase) -> i64 {
    let m = case.rank() as i64;
    case.lambda_coords().iter().map(|x| x.abs()).max().unwrap_or(0) + 2 * m + 2
}

fn point(case: &ArchCase, g: &GammaSample) -> Result<(TorusPoint, Powers)> {
    let z = g.coords(case.levi)?;
    if z.len() != case.rank() {
        return domain(format!("sample has {} coordinates, expected {}", z.len(), case.rank()));
    }
    let tp = TorusPoint::new(z)?;
    tp.check_regular(&case.tables.datum)?;
    let pw = Powers::new(&tp.coords, exponent_bound(case))?;
    Ok((tp, pw))
}

fn neg(v: &[i64]) -> Vec<i64> {
    v.iter().map(|x| -x).collect()
}

fn delta_levi(levi: &LeviSystem, pw: &Powers) -> GaussianRational {
    let mut d = GaussianRational::one();
    for a in &levi.positive {
        d = d * (GaussianRational::one() - pw.monomial(&neg(a)));
    }
    d
}

/// Product of the norms `|alpha(gamma)|^2` over roots of the unipotent radical.
fn radical_norm(tables: &Tables, levi: &LeviSystem, pw: &Powers) -> Rational {
    let mut n = Rational::one();
    for a in tables.positive.iter().filter(|a| !levi.contains_root(a)) {
        n *= pw.monomial(a).norm();
    }
    n
}

fn fourth_root(x: &Rational) -> Result<Rational> {
    exact_root(x, 4).ok_or_else(|| Error::Domain(format!("{} is not a fourth power", format_rational(x))))
}

// ---------------------------------------------------------------------------
// Kostant-Weyl side

/// `Delta_M(gamma) Tr(gamma, H^*(Lie N, V)_{> t})` by Kostant's theorem,
/// with the standard cutoffs on the given coweights.
fn truncated_trace(case: &ArchCase, label: LeviLabel, coweights: &[Coweight], pw: &Powers) -> Result<GaussianRational> {
    let datum = &case.tables.datum;
    let levi = case.tables.levi(label);
    let entries = kostant_cohomology(datum, label, &case.lambda)?;
    let cut: Vec<(Coweight, Option<i64>)> = coweights.iter().map(|c| (*c, Some(c.standard_cutoff_doubled(datum)))).collect();
    let mut total = GaussianRational::zero();
    for e in truncate_cohomology(&entries, &cut) {
        let nu = e.weight.coords().expect("integral weight");
        let mut inner = GaussianRational::zero();
        for w in &levi.weyl {
            let inv = inversion_set(w, &levi.positive);
            let mut exp = w.act(&nu);
            for a in &inv {
                for (x, y) in exp.iter_mut().zip(a) {
                    *x -= y;
                }
            }
            let t = pw.monomial(&exp);
            inner = if inv.len() % 2 == 0 { inner + t } else { inner - t };
        }
        total = if e.degree % 2 == 0 { total + inner } else { total - inner };
    }
    Ok(total)
}

/// The Weyl element induced on the torus of `M12` by the normalizer element
/// exchanging the two parabolics: `s_{e2}` for odd `d`, `s_{e2} s_{e3}` for even `d`.
pub fn omega0(d: usize) -> WeylElement {
    let m = d / 2;
    let mut w = WeylElement::sign_flip(m, 1);
    if d % 2 == 0 {
        w.signs[2] = -1;
    }
    w
}

/// The normalized Kostant-Weyl term `L_M`.
pub fn l_m_normalized(case: &ArchCase, g: &GammaSample) -> Result<GaussianRational> {
    let (tp, pw) = point(case, g)?;
    match case.levi {
        LeviLabel::M1 => truncated_trace(case, LeviLabel::M1, &[Coweight::Varpi1], &pw),
        LeviLabel::M2 => Ok(truncated_trace(case, LeviLabel::M2, &[Coweight::Varpi2], &pw)?.scale_int(2)),
        LeviLabel::M12 => {
            let b = g.b.as_ref().expect("M12 sample has b");
            if b.abs().is_one() {
                return Err(Error::Singular("|b| = 1 is a wall".into()));
            }
            let t = &case.tables;
            let both = [Coweight::Varpi1, Coweight::Varpi2];
            let t1 = truncated_trace(case, LeviLabel::M12, &both, &pw)?;
            // Conjugate point under omega0.
            let mut zp = tp.coords.clone();
            zp[1] = zp[1].inv()?;
            if case.d % 2 == 0 {
                zp[2] = zp[2].inv()?;
            }
            let pwp = Powers::new(&zp, pw.bound)?;
            let y = fourth_root(&(radical_norm(t, &t.m12, &pwp) / radical_norm(t, &t.m12, &pw)))?;
            let ratio = delta_levi(&t.m12, &pw).div(&delta_levi(&t.m12, &pwp))?;
            let t2 = (&ratio * &truncated_trace(case, LeviLabel::M12, &both, &pwp)?).scale(&y);
            // Contribution of the parabolic with Levi M2.
            let mut dm = GaussianRational::one();
            for a in t.m2.positive.iter().filter(|a| !t.m12.contains_root(a)) {
                let v = pw.monomial(a);
                let vi = pw.monomial(&neg(a));
                dm = dm * (GaussianRational::one() - v) * (GaussianRational::one() - vi);
            }
            let x4 = dm.norm() * radical_norm(t, &t.m2, &pw) / radical_norm(t, &t.m12, &pw);
            let x = fourth_root(&x4)?;
            let ratio3 = delta_levi(&t.m12, &pw).div(&delta_levi(&t.m2, &pw))?;
            let t3 = (&ratio3 * &truncated_trace(case, LeviLabel::M2, &[Coweight::Varpi2], &pw)?).scale(&x);
            Ok(t1 + t2 - t3)
        }
        LeviLabel::G => domain("no Kostant-Weyl term for G"),
    }
}

fn pairs_positive(v: &Weight, coweights: &[Vec<i64>]) -> bool {
    coweights.iter().all(|c| v.pairing_doubled(c) > 0)
}

/// The three indicators `N_1, N_2, N_3` of a Weyl element:
/// `N_1` tests both `varpi_1, varpi_2`; `N_2` tests their `omega0`-translates;
/// `N_3` tests `varpi_2` alone.
pub fn n_indicator(case: &ArchCase, w: &WeylElement, which: u8) -> Result<u8> {
    let m = case.rank();
    let v = w.act_weight(&case.lambda_plus_rho());
    let p1 = Coweight::Varpi1.vector(m);
    let p2 = Coweight::Varpi2.vector(m);
    let o = omega0(case.d);
    let r = match which {
        1 => pairs_positive(&v, &[p1, p2]),
        2 => pairs_positive(&v, &[o.act(&p1), o.act(&p2)]),
        3 => pairs_positive(&v, &[p2]),
        _ => return domain("indicator index must be 1, 2 or 3"),
    };
    Ok(r as u8)
}

/// `L_M` for `M12` through the closed coefficient patterns in `N_1, N_2, N_3`,
/// chosen by the range of `b`: odd `d` uses `N1 - N2 + N3` for `0 < b < 1`,
/// `N1 - N2 - N3` for `b > 1` and `N1 + N2 - N3` for `b < 0`; even `d` uses
/// `N1 + N2 - N3`. `pattern_b` selects the range, normally `b` itself.
pub fn l_m12_by_pattern(case: &ArchCase, g: &GammaSample, pattern_b: &Rational) -> Result<GaussianRational> {
    if case.levi != LeviLabel::M12 {
        return domain("the pattern form is specific to M12");
    }
    let (_, pw) = point(case, g)?;
    let coeffs: [i64; 3] = if case.d % 2 == 0 || pattern_b.is_negative() {
        [1, 1, -1]
    } else if *pattern_b < Rational::one() {
        [1, -1, 1]
    } else {
        [1, -1, -1]
    };
    let lam = case.lambda_coords();
    let mut total = GaussianRational::zero();
    for wd in &case.tables.weyl {
        let c: i64 = (1..=3).map(|i| coeffs[i as usize - 1] * n_indicator(case, &wd.element, i).unwrap() as i64).sum();
        if c == 0 {
            continue;
        }
        let t = weyl_term(wd, &lam, &pw).scale_int(c);
        total = total + t;
    }
    Ok(total)
}

fn weyl_term(wd: &WeylData, lam: &[i64], pw: &Powers) -> GaussianRational {
    let mut exp = wd.element.act(lam);
    for (x, y) in exp.iter_mut().zip(&wd.inversion_sum) {
        *x -= y;
    }
    let t = pw.monomial(&exp);
    if wd.odd {
        -t
    } else {
        t
    }
}

// ---------------------------------------------------------------------------
// Character side

/// Sign `(-1)^{#positive roots of R sending gamma into ]0, 1[}`.
fn eps_from_values(values: &[Rational]) -> i64 {
    let n = values.iter().filter(|v| v.is_positive() && *v < &Rational::one()).count();
    if n % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Position of `x = (log|a|, log|b|)` as a rational point in the same open cone.
pub fn log_cone_point(a: &Rational, b: &Rational) -> Result<(Rational, Rational)> {
    let (aa, bb) = (a.abs(), b.abs());
    let one = Rational::one();
    if aa == one || bb == one || aa == bb || &aa * &bb == one {
        return Err(Error::Singular("x lies on a wall of the plane".into()));
    }
    let x1_pos = aa > one;
    let x2_pos = bb > one;
    let x1_gt_x2 = aa > bb;
    let sum_pos = &aa * &bb > one;
    for c in 1..=8u8 {
        let (p, q) = cone_representative(c);
        if (p > 0) == x1_pos && (q > 0) == x2_pos && (p > q) == x1_gt_x2 && (p + q > 0) == sum_pos {
            return Ok((int(p), int(q)));
        }
    }
    unreachable!("every off-wall point lies in a cone")
}

/// Sign data of the real roots of `M12` at `gamma`.
struct M12Reality {
    /// Real root system of `gamma` in the split component, if `-1` lies in its Weyl group.
    system: Option<Rank2System>,
    eps_r: i64,
    eps_endos: i64,
    x: (Rational, Rational),
}

fn m12_reality(case: &ArchCase, a: &Rational, b: &Rational) -> Result<M12Reality> {
    let ab = a * b;
    let a_over_b = a / b;
    let values: Vec<Rational> = if case.parity() == Parity::Odd {
        vec![a.clone(), b.clone(), ab.clone(), a_over_b]
    } else {
        vec![ab.clone(), a_over_b]
    };
    let eps_r = eps_from_values(&values);
    let eps_endos = eps_from_values(&[a.clone(), b.clone()]);
    let system = if ab.is_negative() {
        None
    } else if case.parity() == Parity::Odd && a.is_positive() {
        Some(Rank2System::B2)
    } else {
        Some(Rank2System::D2)
    };
    Ok(M12Reality { system, eps_r, eps_endos, x: log_cone_point(a, b)? })
}

fn character_sum<F>(case: &ArchCase, pw: &Powers, mut n: F) -> Result<GaussianRational>
where
    F: FnMut(&Weight) -> Result<i64>,
{
    let lam = case.lambda_coords();
    let lr = case.lambda_plus_rho();
    let mut total = GaussianRational::zero();
    for wd in &case.tables.weyl {
        let c = n(&wd.element.act_weight(&lr))?;
        if c == 0 {
            continue;
        }
        total = total + weyl_term(wd, &lam, pw).scale_int(c);
    }
    Ok(total)
}

fn doubled_to_rational(v: i64) -> Rational {
    rat(v, 2)
}

/// The normalized character sum `(-1)^{q(G)} eps_R(gamma) sum_w eps(w) n(gamma, wB) (w lambda)(gamma) prod alpha^{-1}(gamma)`.
pub fn phi_normalized(case: &ArchCase, g: &GammaSample) -> Result<GaussianRational> {
    let (_, pw) = point(case, g)?;
    let sign_q = if case.q_of_group() % 2 == 0 { 1 } else { -1 };
    match case.levi {
        LeviLabel::M1 | LeviLabel::M2 => {
            // The split component is one-dimensional.
            let (val, proj): (Rational, fn(&Weight) -> i64) = if case.levi == LeviLabel::M1 {
                let b = g.b.as_ref().expect("M1 sample has b");
                (&g.a * &g.a + b * b, |w: &Weight| w.doubled[0] + w.doubled[1])
            } else {
                (g.a.clone(), |w: &Weight| w.doubled[0])
            };
            if val.is_negative() {
                return Ok(GaussianRational::zero());
            }
            let eps = eps_from_values(&[val.clone()]);
            let x = if val < Rational::one() { int(-1) } else if val > Rational::one() { int(1) } else { return Err(Error::Singular("x = 0".into())) };
            let s = character_sum(case, &pw, |w| rank_one_constant(&x, &doubled_to_rational(proj(w))))?;
            Ok(s.scale_int(sign_q * eps))
        }
        LeviLabel::M12 => {
            let b = g.b.as_ref().expect("M12 sample has b");
            let re = m12_reality(case, &g.a, b)?;
            let Some(sys) = re.system else {
                return Ok(GaussianRational::zero());
            };
            let s = character_sum(case, &pw, |w| {
                let chi = (doubled_to_rational(w.doubled[0]), doubled_to_rational(w.doubled[1]));
                cone_constant_2d(&re.x, &chi, sys)
            })?;
            Ok(s.scale_int(sign_q * re.eps_r))
        }
        LeviLabel::G => domain("no character sum for G"),
    }
}

/// The endoscopic variant for odd `M12`, using the constants of `{±e1, ±e2}`
/// but the sign `eps_R` of the full real root system. Zero unless `a, b > 0`.
pub fn phi_endos_normalized(case: &ArchCase, g: &GammaSample) -> Result<GaussianRational> {
    if case.levi != LeviLabel::M12 || case.parity() != Parity::Odd {
        return Err(Error::Unsupported("the endoscopic variant is defined for odd M12".into()));
    }
    let (_, pw) = point(case, g)?;
    let b = g.b.as_ref().expect("M12 sample has b");
    let re = m12_reality(case, &g.a, b)?;
    if !(g.a.is_positive() && b.is_positive()) {
        return Ok(GaussianRational::zero());
    }
    let s = character_sum(case, &pw, |w| {
        let chi = (doubled_to_rational(w.doubled[0]), doubled_to_rational(w.doubled[1]));
        cone_constant_2d(&re.x, &chi, Rank2System::Endos)
    })?;
    let sign_q = if case.q_of_group() % 2 == 0 { 1 } else { -1 };
    Ok(s.scale_int(sign_q * re.eps_r))
}

// ---------------------------------------------------------------------------
// Sampling and verification

/// Where a sample is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GammaRange {
    /// `a^2 + b^2 < 1` for `M1`; `0 < a < 1` for `M2`; `ab > 0` with `x1 < -|x2|` for `M12`.
    Stated,
    /// `a < 0` for `M2`; `ab < 0` for `M12`: the character side must vanish.
    Vanishing,
    /// Outside the stated range, where the identity is not claimed.
    OutOfRange,
}

impl std::str::FromStr for GammaRange {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stated" => Ok(GammaRange::Stated),
            "vanishing" => Ok(GammaRange::Vanishing),
            "out-of-range" => Ok(GammaRange::OutOfRange),
            _ => Err(Error::Parse(format!("unknown range {s:?}"))),
        }
    }
}

fn random_rational(rng: &mut ChaCha8Rng, lo: i64, hi: i64, den: i64) -> Rational {
    rat(rng.gen_range(lo..=hi), rng.gen_range(1..=den))
}

fn random_circle(rng: &mut ChaCha8Rng, count: usize) -> Vec<GaussianRational> {
    (0..count).map(|_| GaussianRational::circle_point(&rat(rng.gen_range(1..=40), rng.gen_range(41..=80)))).collect()
}

/// Draws a regular sample in the requested range.
pub fn sample_gamma(case: &ArchCase, range: GammaRange, rng: &mut ChaCha8Rng) -> Result<GammaSample> {
    for _ in 0..1000 {
        let circle = random_circle(rng, case.circle_count());
        let g = match (case.levi, range) {
            (LeviLabel::M1, GammaRange::Stated) => {
                let a = rat(rng.gen_range(-9..=9), 14);
                let b = rat(rng.gen_range(1..=9), 14) * int(if rng.gen_bool(0.5) { 1 } else { -1 });
                GammaSample { a, b: Some(b), circle }
            }
            (LeviLabel::M1, GammaRange::OutOfRange) => {
                let a = rat(rng.gen_range(8..=20), 7);
                let b = rat(rng.gen_range(1..=20), 7);
                GammaSample { a, b: Some(b), circle }
            }
            (LeviLabel::M2, GammaRange::Stated) => GammaSample { a: rat(rng.gen_range(1..=19), 20), b: None, circle },
            (LeviLabel::M2, GammaRange::Vanishing) => GammaSample { a: -random_rational(rng, 1, 30, 7), b: None, circle },
            (LeviLabel::M12, _) => {
                let b = random_rational(rng, 1, 12, 7);
                let lim = if b < Rational::one() { b.clone() } else { b.recip() };
                let a = &lim * rat(rng.gen_range(1..=9), 10);
                let (a, b) = match range {
                    GammaRange::Stated => {
                        if rng.gen_bool(0.5) {
                            (a, b)
                        } else {
                            (-a, -b)
                        }
                    }
                    GammaRange::Vanishing => {
                        if rng.gen_bool(0.5) {
                            (-a, b)
                        } else {
                            (a, -b)
                        }
                    }
                    GammaRange::OutOfRange => (random_rational(rng, 1, 12, 5), random_rational(rng, 1, 12, 5)),
                };
                GammaSample { a, b: Some(b), circle }
            }
            _ => return domain(format!("no {range:?} range for {}", case.levi)),
        };
        let ok = match point(case, &g) {
            Ok(_) => true,
            Err(Error::Singular(_)) => false,
            Err(e) => return Err(e),
        };
        let off_wall = match (case.levi, &g.b) {
            (LeviLabel::M12, Some(b)) => log_cone_point(&g.a, b).is_ok(),
            (LeviLabel::M1, Some(b)) => &g.a * &g.a + b * b != Rational::one(),
            _ => g.a != Rational::one(),
        };
        if ok && off_wall {
            return Ok(g);
        }
    }
    Err(Error::Resource("could not draw a regular sample".into()))
}

/// Both sides of the comparison identity at one sample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentitySides {
    pub lhs: GaussianRational,
    pub rhs: GaussianRational,
}

/// Evaluates the identity the range asserts:
/// `M1`: `Phi = 2 (-1)^{q+1} L`; `M2`: `Phi = (-1)^{q+1} L`;
/// `M12`: `4 (-1)^q L = Phi + Phi_endos` (odd) or `= Phi` (even).
/// In a vanishing range the sides are `Phi` (plus `Phi_endos`) against 0.
pub fn identity_sides(case: &ArchCase, g: &GammaSample, range: GammaRange) -> Result<IdentitySides> {
    let q = case.q_of_group() as i64;
    let sq = if q % 2 == 0 { 1 } else { -1 };
    let phi = phi_normalized(case, g)?;
    let phi_total = if case.levi == LeviLabel::M12 && case.parity() == Parity::Odd {
        phi + phi_endos_normalized(case, g)?
    } else {
        phi
    };
    if range == GammaRange::Vanishing {
        return Ok(IdentitySides { lhs: phi_total, rhs: GaussianRational::zero() });
    }
    let l = l_m_normalized(case, g)?;
    let lhs = match case.levi {
        LeviLabel::M1 => l.scale_int(-2 * sq),
        LeviLabel::M2 => l.scale_int(-sq),
        _ => l.scale_int(4 * sq),
    };
    Ok(IdentitySides { lhs, rhs: phi_total })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArchWitness {
    pub index: usize,
    pub gamma: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub case: String,
    pub d: usize,
    pub lambda: String,
    pub range: GammaRange,
    pub samples: usize,
    pub seed: u64,
    pub failures: Vec<ArchWitness>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64 + 1);
    rng
}

/// Checks the comparison identity on `samples` exact samples. Each sample is
/// drawn from its own stream so the report does not depend on scheduling.
pub fn verify_identity(case: &ArchCase, range: GammaRange, samples: usize, seed: u64) -> Result<IdentityReport> {
    let results: Vec<Result<Option<ArchWitness>>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i);
            let g = sample_gamma(case, range, &mut rng)?;
            let s = identity_sides(case, &g, range)?;
            Ok((s.lhs != s.rhs).then(|| ArchWitness { index: i, gamma: g.describe(), lhs: s.lhs.to_string(), rhs: s.rhs.to_string() }))
        })
        .collect();
    let mut failures = Vec::new();
    for r in results {
        if let Some(w) = r? {
            failures.push(w);
        }
    }
    Ok(IdentityReport {
        case: case.levi.to_string(),
        d: case.d,
        lambda: case.lambda.to_string(),
        range,
        samples,
        seed,
        failures,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SymmetryMode {
    /// `(a, b) -> (b, a)`.
    Swap,
    /// `a -> 1/a`.
    Invert,
}

/// Checks the behaviour of the character sums of odd `M12` under swapping
/// `a, b` or inverting `a`. Normalized values are rescaled by the ratio of
/// normalizing factors, which is exact because `delta_P^{1/2}` is a fourth
/// root of a product of norms and `Delta_M` does not involve `a, b`.
pub fn verify_symmetry(case: &ArchCase, g: &GammaSample, mode: SymmetryMode) -> Result<bool> {
    if case.levi != LeviLabel::M12 || case.parity() != Parity::Odd {
        return Err(Error::Unsupported("symmetry checks are for odd M12".into()));
    }
    let b = g.b.clone().ok_or_else(|| Error::Invalid("M12 samples need b".into()))?;
    if !(&g.a * &b).is_positive() {
        return domain("symmetry checks need ab > 0");
    }
    if g.a == b {
        return domain("swap needs a != b");
    }
    let g2 = match mode {
        SymmetryMode::Swap => GammaSample { a: b.clone(), b: Some(g.a.clone()), circle: g.circle.clone() },
        SymmetryMode::Invert => GammaSample { a: g.a.recip(), b: Some(b.clone()), circle: g.circle.clone() },
    };
    let (_, pw1) = point(case, g)?;
    let (_, pw2) = point(case, &g2)?;
    let t = &case.tables;
    let ratio = GaussianRational::real(fourth_root(&(radical_norm(t, &t.m12, &pw2) / radical_norm(t, &t.m12, &pw1)))?)
        .div(&delta_levi(&t.m12, &pw2))?;
    let ratio = &ratio * &delta_levi(&t.m12, &pw1);
    let phi_ok = phi_normalized(case, g)? == &phi_normalized(case, &g2)? * &ratio;
    let weight = |x: &GammaSample| -> Result<i64> {
        let r = m12_reality(case, &x.a, x.b.as_ref().unwrap())?;
        Ok(r.eps_r * r.eps_endos)
    };
    let lhs = phi_endos_normalized(case, g)?.scale_int(weight(g)?);
    let rhs = (&phi_endos_normalized(case, &g2)? * &ratio).scale_int(weight(&g2)?);
    let endos_ok = match mode {
        SymmetryMode::Swap => lhs == -rhs,
        SymmetryMode::Invert => lhs == rhs,
    };
    Ok(phi_ok && endos_ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case(levi: LeviLabel, d: usize, lam: &[i64]) -> ArchCase {
        ArchCase::new(levi, d, Weight::integral(lam)).unwrap()
    }

    #[test]
    fn omega0_lengths() {
        let b = RootDatum::for_dimension(7).unwrap();
        let dd = RootDatum::for_dimension(8).unwrap();
        assert_eq!(crate::rootdata::sign(&omega0(7), &b), -1);
        assert_eq!(crate::rootdata::sign(&omega0(8), &dd), 1);
    }

    #[test]
    fn m1_identity_small() {
        let c = case(LeviLabel::M1, 7, &[0, 0, 0]);
        let r = verify_identity(&c, GammaRange::Stated, 6, 1).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
    }

    #[test]
    fn m2_identity_and_vanishing() {
        let c = case(LeviLabel::M2, 7, &[1, 0, 0]);
        assert!(verify_identity(&c, GammaRange::Stated, 6, 2).unwrap().passed());
        assert!(verify_identity(&c, GammaRange::Vanishing, 6, 2).unwrap().passed());
    }

    #[test]
    fn m12_identity_odd_and_even() {
        for d in [7, 8] {
            let lam = vec![1; d / 2];
            let c = case(LeviLabel::M12, d, &lam);
            let r = verify_identity(&c, GammaRange::Stated, 6, 3).unwrap();
            assert!(r.passed(), "d={d} {:?}", r.failures);
            assert!(verify_identity(&c, GammaRange::Vanishing, 4, 3).unwrap().passed());
        }
    }

    #[test]
    fn pattern_matches_kostant_in_range() {
        let c = case(LeviLabel::M12, 7, &[1, 0, 0]);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..6 {
            let g = sample_gamma(&c, GammaRange::Stated, &mut rng).unwrap();
            let b = g.b.clone().unwrap();
            assert_eq!(l_m12_by_pattern(&c, &g, &b).unwrap(), l_m_normalized(&c, &g).unwrap());
        }
    }

    #[test]
    fn vanishing_in_mixed_sign_region() {
        let c = case(LeviLabel::M12, 9, &[0, 0, 0, 0]);
        let g = GammaSample { a: rat(1, 5), b: Some(rat(-1, 2)), circle: random_circle(&mut ChaCha8Rng::seed_from_u64(3), 2) };
        assert!(phi_normalized(&c, &g).unwrap().is_zero());
        assert!(phi_endos_normalized(&c, &g).unwrap().is_zero());
        let m2 = case(LeviLabel::M2, 7, &[0, 0, 0]);
        let g = GammaSample { a: rat(-3, 2), b: None, circle: random_circle(&mut ChaCha8Rng::seed_from_u64(4), 2) };
        assert!(phi_normalized(&m2, &g).unwrap().is_zero());
    }

    #[test]
    fn log_cone_points() {
        assert_eq!(log_cone_point(&rat(1, 4), &rat(1, 2)).unwrap(), (int(-2), int(-1)));
        assert_eq!(log_cone_point(&rat(1, 4), &int(2)).unwrap(), (int(-2), int(1)));
        assert!(log_cone_point(&int(2), &rat(1, 2)).is_err());
    }

    #[test]
    fn symmetry_swap_and_invert() {
        let c = case(LeviLabel::M12, 7, &[2, 1, 1]);
        let circle = random_circle(&mut ChaCha8Rng::seed_from_u64(5), 1);
        for (a, b) in [(rat(1, 3), rat(3, 4)), (rat(2, 5), rat(7, 3)), (rat(5, 2), rat(1, 7))] {
            let g = GammaSample { a, b: Some(b), circle: circle.clone() };
            assert!(verify_symmetry(&c, &g, SymmetryMode::Swap).unwrap());
            assert!(verify_symmetry(&c, &g, SymmetryMode::Invert).unwrap());
        }
    }

    #[test]
    fn m1_outside_range_fails() {
        let c = case(LeviLabel::M1, 7, &[1, 1, 0]);
        let r = verify_identity(&c, GammaRange::OutOfRange, 4, 9).unwrap();
        assert_eq!(r.failures.len(), 4);
    }

    #[test]
    fn wrong_pattern_is_detected() {
        let c = case(LeviLabel::M12, 7, &[1, 1, 0]);
        let g = GammaSample { a: rat(1, 4), b: Some(rat(3, 2)), circle: random_circle(&mut ChaCha8Rng::seed_from_u64(8), 1) };
        let l = l_m_normalized(&c, &g).unwrap();
        assert_eq!(l_m12_by_pattern(&c, &g, &rat(3, 2)).unwrap(), l);
        assert_ne!(l_m12_by_pattern(&c, &g, &rat(1, 2)).unwrap(), l);
    }

    #[test]
    fn reports_are_deterministic() {
        let c = case(LeviLabel::M12, 8, &[1, 0, 0, 0]);
        let r1 = verify_identity(&c, GammaRange::Stated, 5, 42).unwrap();
        let r2 = verify_identity(&c, GammaRange::Stated, 5, 42).unwrap();
        assert_eq!(serde_json::to_string(&r1).unwrap(), serde_json::to_string(&r2).unwrap());
    }

    #[test]
    fn rejects_even_m2() {
        assert!(ArchCase::new(LeviLabel::M2, 8, Weight::zero(4)).is_err());
    }
}
