//! Sign bookkeeping for transfer factors at the real place.
//!
//! Everything here is a closed parity formula. Transfer factors themselves
//! are never built; the functions only track the signs relating different
//! normalizations.

use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::dsconst::Parity;
use crate::endoscopy::admissible_subsets;
use crate::error::{domain, invalid, Error, Result};
use crate::exactnum::{int, Rational};
use crate::rootdata::LeviLabel;

/// `(-1)^k` for any integer `k`.
fn pm(k: i64) -> i8 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn ceil_half(k: i64) -> i64 {
    k.div_euclid(2) + k.rem_euclid(2)
}

fn floor_half(k: i64) -> i64 {
    k.div_euclid(2)
}

fn triangular(k: i64) -> i64 {
    k * (k + 1) / 2
}

/// `q(SO(a, b)) = ab/2`, half the dimension of the symmetric space.
pub fn q_compact_dim(a: u64, b: u64) -> Rational {
    int((a * b) as i64) / int(2)
}

fn check_subset(levi: LeviLabel, subset: &[usize]) -> Result<()> {
    if levi == LeviLabel::G {
        return domain("subsets are attached to proper Levis");
    }
    if admissible_subsets(levi).iter().any(|a| a == subset) {
        Ok(())
    } else {
        invalid(format!("subset {subset:?} is not admissible for {levi}"))
    }
}

/// Sign of the Weyl element relating the two Borels on the torus of `M'`.
pub fn det_omega0(subset: &[usize], m_minus: u64, levi: LeviLabel) -> Result<i8> {
    check_subset(levi, subset)?;
    let m = m_minus as i64;
    Ok(match subset {
        [] | [1, 2] => 1,
        [1] => pm(m),
        [2] => pm(m + 1),
        _ => unreachable!("checked above"),
    })
}

pub fn sun(subset: &[usize]) -> Result<i8> {
    match subset {
        [] | [2] => Ok(1),
        [1] | [1, 2] => Ok(-1),
        _ => invalid(format!("{subset:?} is not a subset of {{1, 2}}")),
    }
}

/// Parameters of one sign computation.
///
/// `m` is the absolute rank of `G`; `m_plus`, `m_minus` those of the two
/// factors of `H`; `(p, q)` the signature of the underlying real quadratic
/// space and `delta_sign` the sign of its discriminant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignCase {
    pub levi: LeviLabel,
    pub parity: Parity,
    pub m: u64,
    pub m_plus: u64,
    pub m_minus: u64,
    pub p: u64,
    pub q: u64,
    pub delta_sign: i8,
}

impl SignCase {
    /// The case for `G` of signature `(d-2, 2)`, which is the one the Shimura
    /// variety uses.
    pub fn new(levi: LeviLabel, parity: Parity, m_plus: u64, m_minus: u64) -> Result<Self> {
        let m = m_plus + m_minus;
        if m < 2 {
            return invalid("the rank of G must be at least 2");
        }
        let (p, delta_sign) = match parity {
            Parity::Odd => (2 * m - 1, 1),
            Parity::Even => (2 * m - 2, pm(m as i64)),
        };
        Self::with_signature(levi, parity, m_plus, m_minus, p, 2, delta_sign)
    }

    pub fn with_signature(levi: LeviLabel, parity: Parity, m_plus: u64, m_minus: u64, p: u64, q: u64, delta_sign: i8) -> Result<Self> {
        let m = m_plus + m_minus;
        let d = match parity {
            Parity::Odd => 2 * m + 1,
            Parity::Even => 2 * m,
        };
        if p + q != d {
            return invalid(format!("signature ({p}, {q}) does not have dimension {d}"));
        }
        if delta_sign != 1 && delta_sign != -1 {
            return invalid("the discriminant sign must be +1 or -1");
        }
        Ok(SignCase { levi, parity, m, m_plus, m_minus, p, q, delta_sign })
    }
}

/// The sign `c` with `Delta_{j,B} = c Delta_Wh` as a function of the signature
/// only. This is the specialized table, used without its hypotheses.
pub fn whittaker_sign_by_q(parity: Parity, m: u64, m_plus: u64, m_minus: u64, q: u64) -> Result<i8> {
    let (mp, mm) = (m_plus as i64, m_minus as i64);
    match (parity, q) {
        (Parity::Odd, 2) => Ok(pm(1 + ceil_half(mp))),
        (Parity::Odd, 0) => Ok(pm(ceil_half(mp))),
        (Parity::Odd, 1) => Ok(pm(floor_half(mp))),
        (Parity::Even, 0) => Ok(pm(floor_half(mm))),
        (Parity::Even, 2) if m % 2 == 1 && m_plus == 1 => Ok(pm(floor_half(mm) + 1)),
        (Parity::Even, 2) => Ok(pm(floor_half(mm))),
        _ => Err(Error::Unsupported(format!("no tabulated sign for {parity} case with q = {q}"))),
    }
}

/// The sign between `Delta_{j,B}` and the Whittaker normalization (type I
/// when `4 | d`), under the hypotheses that make the count of negative
/// definite planes explicit.
pub fn whittaker_comparison_sign(case: &SignCase) -> Result<i8> {
    let (m, mp, mm, p, q) = (case.m as i64, case.m_plus as i64, case.m_minus as i64, case.p as i64, case.q as i64);
    if p <= q {
        return domain(format!("signature ({p}, {q}) needs p > q"));
    }
    match case.parity {
        Parity::Odd => {
            let ok = if q % 2 == 0 { q / 2 <= ceil_half(mp) } else { (q - 1) / 2 <= floor_half(mp) };
            if !ok {
                return domain(format!("q = {q} is too large for m+ = {mp}"));
            }
            let e = if case.delta_sign > 0 {
                ceil_half(m) + ceil_half(mp) + ceil_half(m - p)
            } else {
                floor_half(m) + floor_half(mp) + ceil_half(m - p)
            };
            Ok(pm(e))
        }
        Parity::Even => {
            if q % 2 == 1 {
                return domain("even dimension with odd q is not cuspidal");
            }
            if m % 2 == 1 {
                if q / 2 <= floor_half(mp) {
                    Ok(pm(floor_half(mm)))
                } else if mp == 1 && q == 2 {
                    Ok(pm(mm / 2 - 1))
                } else {
                    domain(format!("q = {q} is too large for m+ = {mp}"))
                }
            } else if q / 2 <= ceil_half(mp) {
                Ok(pm(floor_half(mm)))
            } else {
                domain(format!("q = {q} is too large for m+ = {mp}"))
            }
        }
    }
}

/// The same comparison for the type II Whittaker datum, which exists when `4 | d`.
pub fn whittaker_comparison_sign_type_ii(case: &SignCase) -> Result<i8> {
    if case.parity != Parity::Even || case.m % 2 == 1 {
        return domain("a second Whittaker datum exists only when 4 divides d");
    }
    Ok(whittaker_comparison_sign(case)? * pm(case.m_minus as i64))
}

/// Ranks `(n+, n-)` of the orthogonal parts of `M'`.
fn levi_ranks(case: &SignCase, subset: &[usize]) -> Result<(u64, u64)> {
    let gl_rank = |a: &[usize]| -> u64 {
        match case.levi {
            LeviLabel::M1 => 2 * (a.len() as u64 / 2),
            _ => a.len() as u64,
        }
    };
    let all = match case.levi {
        LeviLabel::M2 => vec![1],
        _ => vec![1, 2],
    };
    let complement: Vec<usize> = all.into_iter().filter(|i| !subset.contains(i)).collect();
    let (a, b) = (gl_rank(subset), gl_rank(&complement));
    if a > case.m_plus || b > case.m_minus {
        return invalid(format!("ranks ({}, {}) cannot absorb {subset:?}", case.m_plus, case.m_minus));
    }
    Ok((case.m_plus - a, case.m_minus - b))
}

fn check_coverage(case: &SignCase, subset: &[usize]) -> Result<()> {
    check_subset(case.levi, subset)?;
    match (case.parity, case.levi, subset) {
        (Parity::Even, LeviLabel::M2, _) => domain("M2 carries no elliptic elements in even dimension"),
        (Parity::Even, _, [_]) => domain("singleton subsets break cuspidality in even dimension"),
        _ => Ok(()),
    }
}

/// The constant making `tasho(A) Delta_{j_M, B_M}^A` satisfy the product
/// formula, computed as the product of three signs: `(-1)^{q(G)+q(H)+q(M)+q(M')}`,
/// the Whittaker comparison for `M'` inside `M` and the one for `H` inside `G`.
pub fn tasho(case: &SignCase, subset: &[usize]) -> Result<i8> {
    check_coverage(case, subset)?;
    let (n_plus, n_minus) = levi_ranks(case, subset)?;
    let m = case.m as i64;
    let (np, nm) = (n_plus as i64, n_minus as i64);
    match case.parity {
        Parity::Odd => {
            let (q_m, q_m_prime_gl, q_levi_signature) = match case.levi {
                LeviLabel::M12 => (0, 0, 0),
                LeviLabel::M1 => (1, 1, 0),
                LeviLabel::M2 => (m - 1, 0, 1),
                LeviLabel::G => unreachable!("checked above"),
            };
            let q_g = 2 * m - 1;
            let q_h = triangular(case.m_plus as i64) + triangular(case.m_minus as i64);
            let q_m_prime = triangular(np) + triangular(nm) + q_m_prime_gl;
            let sign_levi = whittaker_sign_by_q(Parity::Odd, n_plus + n_minus, n_plus, n_minus, q_levi_signature)?;
            let sign_group = whittaker_sign_by_q(Parity::Odd, case.m, case.m_plus, case.m_minus, 2)?;
            Ok(pm(q_g + q_h + q_m + q_m_prime) * sign_levi * sign_group)
        }
        Parity::Even => {
            // Every real group here is a torus times some SO(a, b) with a, b
            // even, plus one GL_2 in both M and M' for M1: the q-sum is even.
            let sign_levi = whittaker_sign_by_q(Parity::Even, n_plus + n_minus, n_plus, n_minus, 0)?;
            let mut sign_group = whittaker_sign_by_q(Parity::Even, case.m, case.m_plus, case.m_minus, 2)?;
            if case.m % 2 == 1 && case.m_plus == 1 {
                // The fixed datum differs from a convenient one by a transposition.
                sign_group = -sign_group;
            }
            Ok(sign_levi * sign_group)
        }
    }
}

/// `tasho(A)^{-1} tasho(empty)`.
pub fn tasho_ratio(case: &SignCase, subset: &[usize]) -> Result<i8> {
    Ok(tasho(case, subset)? * tasho(case, &[])?)
}

/// The ratio as tabulated in closed form.
pub fn tasho_ratio_table(subset: &[usize], m_minus: u64) -> Result<i8> {
    match subset {
        [] => Ok(1),
        [1, 2] => Ok(-1),
        [1] | [2] => Ok(pm(m_minus as i64 + 1)),
        _ => invalid(format!("{subset:?} is not a subset of {{1, 2}}")),
    }
}

/// `sun(A) = tasho(A)^{-1} tasho(empty) det(omega_0)`.
pub fn check_sun_identity(case: &SignCase, subset: &[usize]) -> Result<bool> {
    let rhs = tasho_ratio(case, subset)? * det_omega0(subset, case.m_minus, case.levi)?;
    Ok(sun(subset)? == rhs)
}

/// One row of the sign table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignRow {
    pub levi: LeviLabel,
    pub parity: Parity,
    pub m: u64,
    pub m_plus: u64,
    pub m_minus: u64,
    pub subset: Vec<usize>,
    pub det_omega0: i8,
    pub sun: i8,
    pub tasho: i8,
    pub ratio: i8,
    pub ratio_table: i8,
    pub identity: bool,
}

/// Every covered `(case, A)` with `m_min <= m <= m_max`.
pub fn sign_rows(m_min: u64, m_max: u64) -> Result<Vec<SignRow>> {
    let mut rows = Vec::new();
    for levi in [LeviLabel::M12, LeviLabel::M1, LeviLabel::M2] {
        for parity in [Parity::Odd, Parity::Even] {
            for m in m_min.max(2)..=m_max {
                for m_plus in 0..=m {
                    let case = SignCase::new(levi, parity, m_plus, m - m_plus)?;
                    for subset in admissible_subsets(levi) {
                        if check_coverage(&case, &subset).is_err() || levi_ranks(&case, &subset).is_err() || levi_ranks(&case, &[]).is_err() {
                            continue;
                        }
                        let ratio = tasho_ratio(&case, &subset)?;
                        rows.push(SignRow {
                            levi,
                            parity,
                            m,
                            m_plus,
                            m_minus: case.m_minus,
                            det_omega0: det_omega0(&subset, case.m_minus, levi)?,
                            sun: sun(&subset)?,
                            tasho: tasho(&case, &subset)?,
                            ratio,
                            ratio_table: tasho_ratio_table(&subset, case.m_minus)?,
                            identity: check_sun_identity(&case, &subset)?,
                            subset,
                        });
                    }
                }
            }
        }
    }
    Ok(rows)
}

fn subset_label(a: &[usize]) -> String {
    let inner: Vec<String> = a.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

pub fn sign_table_tsv(rows: &[SignRow]) -> String {
    let mut out = String::from("levi\tparity\tm\tm_plus\tm_minus\tA\tdet_omega0\tsun\ttasho\tratio\tratio_table\tidentity\n");
    for r in rows {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.levi,
            r.parity,
            r.m,
            r.m_plus,
            r.m_minus,
            subset_label(&r.subset),
            r.det_omega0,
            r.sun,
            r.tasho,
            r.ratio,
            r.ratio_table,
            r.identity
        )
        .expect("writing to a string");
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignInvariantReport {
    pub m_max: u64,
    pub sun_checked: usize,
    pub type_ii_checked: usize,
    pub failures: Vec<String>,
}

impl SignInvariantReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.sun_checked > 0
    }
}

/// The `sun` identity on every covered `(case, A)` with `m <= m_max`, and the
/// factor `(-1)^{m-}` between the two Whittaker data when `4 | d`.
pub fn verify_sign_invariants(m_max: u64) -> Result<SignInvariantReport> {
    let rows = sign_rows(2, m_max)?;
    let mut failures: Vec<String> = rows
        .iter()
        .filter(|r| !r.identity || r.ratio != r.ratio_table)
        .map(|r| format!("{} {} m+={} m-={} A={}", r.levi, r.parity, r.m_plus, r.m_minus, subset_label(&r.subset)))
        .collect();
    let mut type_ii_checked = 0;
    for m in (4..=m_max.max(4)).step_by(2).filter(|&m| m <= m_max) {
        for m_plus in 1..=m {
            let case = SignCase::new(LeviLabel::G, Parity::Even, m_plus, m - m_plus)?;
            let one = whittaker_comparison_sign(&case)?;
            let two = whittaker_comparison_sign_type_ii(&case)?;
            type_ii_checked += 1;
            if two != one * pm(case.m_minus as i64) {
                failures.push(format!("type II m+={m_plus} m-={}", case.m_minus));
            }
        }
    }
    Ok(SignInvariantReport { m_max, sun_checked: rows.len(), type_ii_checked, failures })
}

// ---------------------------------------------------------------------------
// Waldspurger's formula

/// Pinning invariant of the pinning giving the type I Whittaker datum.
pub const TYPE_I_ETA: i8 = -1;

/// `c_i = (-1)^{i+1}` for `i = 1..m`: the definiteness signs of a type I
/// Whittaker decomposition.
pub fn alternating_definiteness(m: usize) -> Vec<i8> {
    (1..=m).map(|i| pm(i as i64 + 1)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WaldspurgerSign {
    /// Sign of the explicit formula, product over `i <= m-`.
    pub raw: i8,
    /// `sign(eta)^{m-} prod_{i <= m- < k} sign(Re y_i - Re y_k)`.
    pub reduced: i8,
    pub agree: bool,
    /// `epsilon_L = (-1)^{m-}`.
    pub epsilon_l: i8,
    /// Sign of `epsilon_L Delta_Wal Delta_IV / Delta*_Wh`; `Delta_IV > 0`.
    pub pinning_vs_whittaker: i8,
}

fn sign_of(x: &Rational) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Evaluates the explicit formula at a torus element given by the real parts
/// `y` of its unit-circle coordinates.
pub fn waldspurger_sign(y: &[Rational], m_minus: usize, eta: i8, c: &[i8]) -> Result<WaldspurgerSign> {
    if eta != 1 && eta != -1 {
        return invalid("eta must be +1 or -1");
    }
    if m_minus > y.len() || c.len() < m_minus {
        return invalid("m- exceeds the number of coordinates");
    }
    if let Some(v) = y.iter().find(|v| v.abs() >= Rational::one()) {
        return domain(format!("real part {v} is not in (-1, 1)"));
    }
    for i in 0..y.len() {
        if y[i + 1..].contains(&y[i]) {
            return Err(Error::Singular(format!("coordinate real parts coincide at {}", y[i])));
        }
    }
    let mut raw: i8 = 1;
    for i in 0..m_minus {
        let mut s = eta * c[i] * sign_of(&(Rational::one() + &y[i]));
        for k in (0..y.len()).filter(|&k| k != i) {
            s *= sign_of(&(&y[i] - &y[k]));
        }
        raw *= s;
    }
    let mut cross: i8 = 1;
    for i in 0..m_minus {
        for k in m_minus..y.len() {
            cross *= sign_of(&(&y[i] - &y[k]));
        }
    }
    let reduced = if m_minus % 2 == 0 { 1 } else { eta } * cross;
    let epsilon_l = pm(m_minus as i64);
    debug_assert!(!cross.is_zero());
    Ok(WaldspurgerSign { raw, reduced, agree: raw == reduced, epsilon_l, pinning_vs_whittaker: epsilon_l * raw * cross })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WaldspurgerWitness {
    pub y: Vec<String>,
    pub m_minus: usize,
    pub eta: i8,
    pub sign: WaldspurgerSign,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WaldspurgerReport {
    pub configurations: usize,
    pub m_max: usize,
    pub seed: u64,
    pub failures: Vec<WaldspurgerWitness>,
}

impl WaldspurgerReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.configurations > 0
    }
}

/// Random configurations with `m <= m_max`, alternating definiteness signs and
/// random `eta`. A configuration fails when the raw and reduced signs differ,
/// or when `eta` is the type I value and the pinning comparison is not `+1`.
pub fn verify_waldspurger(configurations: usize, m_max: usize, seed: u64) -> Result<WaldspurgerReport> {
    use rand::{seq::SliceRandom, Rng, SeedableRng};
    if m_max == 0 {
        return invalid("m_max must be positive");
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for _ in 0..configurations {
        let m = rng.gen_range(1..=m_max);
        let m_minus = rng.gen_range(0..=m);
        let eta: i8 = if rng.gen_bool(0.5) { 1 } else { -1 };
        let mut nums: Vec<i64> = (-59..=59).collect();
        nums.shuffle(&mut rng);
        let y: Vec<Rational> = nums[..m].iter().map(|&n| crate::exactnum::rat(n, 60)).collect();
        let sign = waldspurger_sign(&y, m_minus, eta, &alternating_definiteness(m))?;
        if !sign.agree || (eta == TYPE_I_ETA && sign.pinning_vs_whittaker != 1) {
            failures.push(WaldspurgerWitness { y: y.iter().map(|v| v.to_string()).collect(), m_minus, eta, sign });
        }
    }
    Ok(WaldspurgerReport { configurations, m_max, seed, failures })
}

/// `(m - p)(m + 1 - p)/2` and `ceil((m - p)/2)` have the same parity.
pub fn parity_lemma_holds(m: i64, p: i64) -> bool {
    let x = m - p;
    (x * (x + 1) / 2).rem_euclid(2) == ceil_half(x).rem_euclid(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    #[test]
    fn q_examples() {
        assert_eq!(q_compact_dim(4, 3), int(6));
        assert_eq!(q_compact_dim(5, 0), int(0));
        assert_eq!(q_compact_dim(2, 2), int(2));
        assert_eq!(q_compact_dim(3, 1), rat(3, 2));
    }

    #[test]
    fn det_and_sun_tables() {
        assert_eq!(det_omega0(&[], 3, LeviLabel::M12).unwrap(), 1);
        assert_eq!(det_omega0(&[1], 3, LeviLabel::M12).unwrap(), -1);
        assert_eq!(det_omega0(&[2], 3, LeviLabel::M12).unwrap(), 1);
        assert_eq!(det_omega0(&[1, 2], 4, LeviLabel::M1).unwrap(), 1);
        assert!(det_omega0(&[1], 4, LeviLabel::M1).is_err());
        assert!(det_omega0(&[2], 4, LeviLabel::M2).is_err());
        assert_eq!(sun(&[]).unwrap(), 1);
        assert_eq!(sun(&[1]).unwrap(), -1);
        assert_eq!(sun(&[2]).unwrap(), 1);
        assert_eq!(sun(&[1, 2]).unwrap(), -1);
    }

    #[test]
    fn tasho_values() {
        for m in 3..12 {
            for m_plus in 0..=m {
                for (levi, parity) in [(LeviLabel::M12, Parity::Odd), (LeviLabel::M1, Parity::Odd), (LeviLabel::M2, Parity::Odd), (LeviLabel::M12, Parity::Even), (LeviLabel::M1, Parity::Even)] {
                    let case = SignCase::new(levi, parity, m_plus, m - m_plus).unwrap();
                    if levi_ranks(&case, &[]).is_err() {
                        continue;
                    }
                    assert_eq!(tasho(&case, &[]).unwrap(), -1, "{case:?}");
                    for a in admissible_subsets(levi) {
                        let Ok(r) = tasho_ratio(&case, &a) else { continue };
                        assert_eq!(r, tasho_ratio_table(&a, case.m_minus).unwrap(), "{case:?} {a:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn tasho_coverage() {
        let even = SignCase::new(LeviLabel::M12, Parity::Even, 3, 3).unwrap();
        assert!(tasho(&even, &[1]).is_err());
        let even_m2 = SignCase::new(LeviLabel::M2, Parity::Even, 3, 3).unwrap();
        assert!(tasho(&even_m2, &[]).is_err());
        let tight = SignCase::new(LeviLabel::M12, Parity::Odd, 0, 4).unwrap();
        assert!(tasho(&tight, &[1]).is_err());
    }

    #[test]
    fn sun_identity_everywhere() {
        let rows = sign_rows(3, 12).unwrap();
        assert!(rows.len() > 100);
        assert!(rows.iter().all(|r| r.identity && r.ratio == r.ratio_table), "{:?}", rows.iter().find(|r| !r.identity));
        let tsv = sign_table_tsv(&rows[..2]);
        assert!(tsv.starts_with("levi\tparity"));
        assert_eq!(tsv.lines().count(), 3);
    }

    #[test]
    fn whittaker_examples() {
        // Odd, q = 2: (-1)^{1 + ceil(m+/2)}.
        for m_plus in 1..6 {
            let c = SignCase::new(LeviLabel::G, Parity::Odd, m_plus, 3).unwrap();
            assert_eq!(whittaker_comparison_sign(&c).unwrap(), pm(1 + ceil_half(m_plus as i64)));
        }
        // Even, m odd, q = 0: (-1)^{floor(m-/2)}.
        let c = SignCase::with_signature(LeviLabel::G, Parity::Even, 2, 3, 10, 0, -1).unwrap();
        assert_eq!(whittaker_comparison_sign(&c).unwrap(), -1);
        // Even, m odd, m+ = 1, q = 2: (-1)^{m-/2 - 1}.
        for m_minus in [2, 4, 6] {
            let c = SignCase::new(LeviLabel::G, Parity::Even, 1, m_minus).unwrap();
            assert_eq!(whittaker_comparison_sign(&c).unwrap(), pm(m_minus as i64 / 2 - 1));
        }
        let bad = SignCase::with_signature(LeviLabel::G, Parity::Odd, 1, 3, 3, 6, 1).unwrap();
        assert!(whittaker_comparison_sign(&bad).is_err());
        let too_big = SignCase::with_signature(LeviLabel::G, Parity::Odd, 1, 4, 7, 4, 1).unwrap();
        assert!(whittaker_comparison_sign(&too_big).is_err());
    }

    #[test]
    fn general_formula_specializes() {
        // For odd d the discriminant sign is (-1)^q.
        for m in 2..20u64 {
            for m_plus in 0..=m {
                for q in 0..=2u64 {
                    let c = SignCase::with_signature(LeviLabel::G, Parity::Odd, m_plus, m - m_plus, 2 * m + 1 - q, q, pm(q as i64)).unwrap();
                    if let Ok(s) = whittaker_comparison_sign(&c) {
                        assert_eq!(s, whittaker_sign_by_q(Parity::Odd, m, m_plus, m - m_plus, q).unwrap(), "{c:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn type_ii_relation() {
        for m_plus in 1..6u64 {
            for m_minus in 0..6u64 {
                if (m_plus + m_minus) % 2 == 1 || m_plus + m_minus < 4 {
                    continue;
                }
                let c = SignCase::new(LeviLabel::G, Parity::Even, m_plus, m_minus).unwrap();
                let one = whittaker_comparison_sign(&c).unwrap();
                assert_eq!(whittaker_comparison_sign_type_ii(&c).unwrap(), one * pm(m_minus as i64));
            }
        }
        let odd_m = SignCase::new(LeviLabel::G, Parity::Even, 2, 3).unwrap();
        assert!(whittaker_comparison_sign_type_ii(&odd_m).is_err());
    }

    #[test]
    fn waldspurger_basics() {
        let y = vec![rat(1, 2), rat(-1, 3)];
        let w = waldspurger_sign(&y, 0, TYPE_I_ETA, &[]).unwrap();
        assert_eq!((w.raw, w.reduced, w.epsilon_l), (1, 1, 1));
        let w = waldspurger_sign(&y, 1, TYPE_I_ETA, &alternating_definiteness(2)).unwrap();
        assert_eq!(w.epsilon_l, -1);
        assert!(w.agree);
        assert_eq!(w.pinning_vs_whittaker, 1);
        assert!(matches!(waldspurger_sign(&[rat(1, 2), rat(1, 2)], 1, 1, &[1]), Err(Error::Singular(_))));
        assert!(waldspurger_sign(&[int(1)], 1, 1, &[1]).is_err());
    }

    #[test]
    fn parity_lemma_range() {
        for m in 0..=40 {
            for p in 0..=m {
                assert!(parity_lemma_holds(m, p));
            }
        }
        // The proofs also apply it with p > m.
        for m in 0..=40 {
            for p in m..=2 * m + 1 {
                assert!(parity_lemma_holds(m, p));
            }
        }
    }

    #[test]
    fn suites_pass() {
        let w = verify_waldspurger(100, 6, 3).unwrap();
        assert!(w.passed(), "{:?}", w.failures);
        let s = verify_sign_invariants(7).unwrap();
        assert!(s.passed(), "{:?}", s.failures);
        assert!(s.type_ii_checked > 0);
    }
}
