//! Quadratic spaces over Q and their local invariants.
//!
//! Spaces are stored diagonalized. The discriminant carries the extra
//! `(-1)^{d/2}` in even dimension, so hyperbolic sums have trivial
//! discriminant.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::exactnum::{
    hilbert_symbol, int, padic_valuation, prime_divisors, squareclass_of, Place, Rational, SquareClass, SquareContext,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuadraticSpace {
    diag: Vec<Rational>,
}

impl QuadraticSpace {
    pub fn from_diag(diag: Vec<Rational>) -> Result<Self> {
        if diag.is_empty() {
            return domain("a quadratic space needs dimension at least 1");
        }
        if diag.iter().any(|a| a.is_zero()) {
            return domain("diagonal entries must be nonzero");
        }
        Ok(QuadraticSpace { diag })
    }

    pub fn from_ints(diag: &[i64]) -> Result<Self> {
        Self::from_diag(diag.iter().map(|&a| int(a)).collect())
    }

    pub fn diag(&self) -> &[Rational] {
        &self.diag
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn det(&self) -> Rational {
        self.diag.iter().fold(Rational::one(), |acc, a| acc * a)
    }

    /// Determinant with the even-dimensional sign correction, as a rational.
    pub fn signed_det(&self) -> Rational {
        let d = self.dim();
        let det = self.det();
        if d % 2 == 0 && (d / 2) % 2 == 1 {
            -det
        } else {
            det
        }
    }

    /// Orthogonal sum.
    pub fn direct_sum(&self, other: &QuadraticSpace) -> QuadraticSpace {
        let mut diag = self.diag.clone();
        diag.extend(other.diag.iter().cloned());
        QuadraticSpace { diag }
    }

    /// Primes at which some Hilbert symbol of the diagonal can be nontrivial.
    pub fn bad_primes(&self) -> Vec<u64> {
        let mut set = BTreeSet::from([2u64]);
        for a in &self.diag {
            set.extend(prime_divisors(a.numer()));
            set.extend(prime_divisors(a.denom()));
        }
        set.into_iter().collect()
    }
}

/// Congruence diagonalization by symmetric row and column elimination.
pub fn diagonalize(gram: &[Vec<Rational>]) -> Result<QuadraticSpace> {
    let n = gram.len();
    if n == 0 || gram.iter().any(|r| r.len() != n) {
        return domain("Gram matrix must be square and nonempty");
    }
    for i in 0..n {
        for j in 0..i {
            if gram[i][j] != gram[j][i] {
                return domain("Gram matrix must be symmetric");
            }
        }
    }
    let mut a: Vec<Vec<Rational>> = gram.to_vec();
    let mut diag = Vec::with_capacity(n);
    for k in 0..n {
        if a[k][k].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !a[j][j].is_zero()) {
                a.swap(k, j);
                for row in a.iter_mut() {
                    row.swap(k, j);
                }
            } else if let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) {
                // Replace basis vector e_k by e_k + e_j.
                for c in 0..n {
                    let v = a[j][c].clone();
                    a[k][c] += v;
                }
                for row in a.iter_mut() {
                    let v = row[j].clone();
                    row[k] += v;
                }
            } else {
                return Err(Error::Singular("degenerate Gram matrix".into()));
            }
        }
        let pivot = a[k][k].clone();
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &pivot;
            for c in 0..n {
                let v = &f * &a[k][c];
                a[i][c] -= v;
            }
            for row in a.iter_mut() {
                let v = &f * &row[k];
                row[i] -= v;
            }
        }
        diag.push(pivot);
    }
    QuadraticSpace::from_diag(diag)
}

pub fn discriminant(q: &QuadraticSpace) -> SquareClass {
    squareclass_of(&q.signed_det(), SquareContext::GlobalQ).expect("nonzero determinant")
}

pub fn hasse_invariant(q: &QuadraticSpace, v: Place) -> Result<i8> {
    let mut s = 1;
    for i in 0..q.dim() {
        for j in i + 1..q.dim() {
            s *= hilbert_symbol(&q.diag[i], &q.diag[j], v)?;
        }
    }
    Ok(s)
}

/// `(positive count, negative count)`.
pub fn signature(q: &QuadraticSpace) -> (usize, usize) {
    let p = q.diag.iter().filter(|a| a.is_positive()).count();
    (p, q.dim() - p)
}

/// Hasse invariant that a quasi-split space of dimension `d` and
/// discriminant `delta` has at the finite place `v`.
pub fn quasi_split_hasse(d: usize, delta: &Rational, v: Place) -> Result<i8> {
    if let Place::Real = v {
        return domain("quasi_split_hasse is for finite places");
    }
    let m = d / 2;
    let minus_one = int(-1);
    let mm = hilbert_symbol(&minus_one, &minus_one, v)?;
    let pow = |s: i8, e: usize| if e % 2 == 0 { 1 } else { s };
    if d % 2 == 1 {
        let c = if m % 2 == 0 { delta.clone() } else { -delta.clone() };
        Ok(pow(mm, m * (m.saturating_sub(1)) / 2) * pow(hilbert_symbol(&minus_one, &c, v)?, m))
    } else {
        let e1 = (m - 1) * (m.saturating_sub(2)) / 2;
        Ok(pow(mm, e1) * pow(hilbert_symbol(&minus_one, &(-delta.clone()), v)?, m - 1))
    }
}

/// Signature of the quasi-split real form with the given discriminant sign.
pub fn quasi_split_signature(d: usize, delta_sign: i8) -> (usize, usize) {
    let m = d / 2;
    if d % 2 == 1 {
        let target = if m % 2 == 0 { 1 } else { -1 };
        if delta_sign == target {
            (m + 1, m)
        } else {
            (m, m + 1)
        }
    } else if delta_sign < 0 {
        (m + 1, m - 1)
    } else {
        (m, m)
    }
}

pub fn is_quasi_split_local(q: &QuadraticSpace, v: Place) -> Result<bool> {
    let delta = q.signed_det();
    match v {
        Place::Real => {
            let sign = if delta.is_positive() { 1 } else { -1 };
            Ok(signature(q) == quasi_split_signature(q.dim(), sign))
        }
        Place::Prime(_) => Ok(hasse_invariant(q, v)? == quasi_split_hasse(q.dim(), &delta, v)?),
    }
}

/// Quasi-split at `p` with discriminant of even valuation.
pub fn is_perfect(q: &QuadraticSpace, p: u64) -> Result<bool> {
    if p == 2 {
        return Err(Error::Unsupported("perfectness is only defined at odd primes".into()));
    }
    let v = Place::prime(p)?;
    Ok(is_quasi_split_local(q, v)? && padic_valuation(&q.signed_det(), p)? % 2 == 0)
}

/// Whether a space of dimension `d`, discriminant `delta`, signature
/// `(d-2, 2)` at infinity exists whose special orthogonal group is
/// quasi-split at every finite place.
///
/// Decided by the product formula for Hasse invariants. In even dimension
/// the group of `V` equals the group of any rescaling `cV`, which changes the
/// Hasse invariant by `(c, delta)_v`; so a place where `delta` is not a local
/// square leaves the invariant free and the product can always be balanced.
pub fn exists_global_form(d: usize, delta: &SquareClass) -> Result<bool> {
    if d < 3 {
        return domain("exists_global_form needs d >= 3");
    }
    let SquareClass::Global(n) = delta else {
        return domain("exists_global_form needs a global square class");
    };
    let sign_ok = if d % 2 == 1 || (d / 2) % 2 == 0 { n.is_positive() } else { n.is_negative() };
    if !sign_ok {
        return Ok(false);
    }
    let delta_q = Rational::from_integer(n.clone());
    let mut places: BTreeSet<u64> = prime_divisors(n).into_iter().collect();
    places.insert(2);
    let mut product = {
        let mut diag = vec![int(1); d - 2];
        diag.extend([int(-1), int(-1)]);
        hasse_invariant(&QuadraticSpace::from_diag(diag)?, Place::Real)?
    };
    for p in places {
        let v = Place::Prime(p);
        if d % 2 == 0 && !is_local_square(&delta_q, p)? {
            return Ok(true);
        }
        product *= quasi_split_hasse(d, &delta_q, v)?;
    }
    Ok(product == 1)
}

fn is_local_square(x: &Rational, p: u64) -> Result<bool> {
    Ok(squareclass_of(x, SquareContext::LocalQp(p))? == SquareClass::one(SquareContext::LocalQp(p)))
}

/// The standard quasi-split model: hyperbolic planes plus a line
/// `<(-1)^m delta>` (odd `d`) or the norm plane `<1, -delta>` (even `d`).
pub fn quasi_split_model(d: usize, delta: &Rational) -> Result<QuadraticSpace> {
    if d == 0 || delta.is_zero() {
        return domain("quasi_split_model needs d >= 1 and nonzero delta");
    }
    let m = d / 2;
    let mut diag = Vec::with_capacity(d);
    let planes = if d % 2 == 1 { m } else { m - 1 };
    for _ in 0..planes {
        diag.push(int(1));
        diag.push(int(-1));
    }
    if d % 2 == 1 {
        diag.push(if m % 2 == 0 { delta.clone() } else { -delta.clone() });
    } else {
        diag.push(int(1));
        diag.push(-delta.clone());
    }
    QuadraticSpace::from_diag(diag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;
    use num_bigint::BigInt;

    fn gram_of(q: &QuadraticSpace) -> Vec<Vec<Rational>> {
        let n = q.dim();
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { q.diag()[i].clone() } else { int(0) }).collect())
            .collect()
    }

    #[test]
    fn diagonalize_examples() {
        let id = diagonalize(&gram_of(&QuadraticSpace::from_ints(&[1, 1, 1]).unwrap())).unwrap();
        assert_eq!(id, QuadraticSpace::from_ints(&[1, 1, 1]).unwrap());
        let hyp = diagonalize(&[vec![int(0), int(1)], vec![int(1), int(0)]]).unwrap();
        assert_eq!(hyp.diag(), &[int(2), rat(-1, 2)]);
        assert_eq!(discriminant(&hyp), SquareClass::Global(BigInt::from(1)));
        assert!(diagonalize(&[vec![int(1), int(1)], vec![int(1), int(1)]]).is_err());
    }

    #[test]
    fn discriminant_examples() {
        let g = |n: i64| SquareClass::Global(BigInt::from(n));
        assert_eq!(discriminant(&QuadraticSpace::from_ints(&[1, -1]).unwrap()), g(1));
        assert_eq!(discriminant(&QuadraticSpace::from_ints(&[12]).unwrap()), g(3));
        assert_eq!(discriminant(&QuadraticSpace::from_ints(&[1, 1]).unwrap()), g(-1));
    }

    #[test]
    fn signature_examples() {
        assert_eq!(signature(&QuadraticSpace::from_ints(&[1, 1, -1]).unwrap()), (2, 1));
        assert_eq!(signature(&QuadraticSpace::from_ints(&[-1]).unwrap()), (0, 1));
        assert_eq!(signature(&QuadraticSpace::from_ints(&[1, -1]).unwrap()), (1, 1));
    }

    #[test]
    fn hasse_examples() {
        let ones = QuadraticSpace::from_ints(&[1; 6]).unwrap();
        for v in [Place::Real, Place::Prime(2), Place::Prime(3)] {
            assert_eq!(hasse_invariant(&ones, v).unwrap(), 1);
        }
        let q = QuadraticSpace::from_ints(&[-1, -1]).unwrap();
        assert_eq!(hasse_invariant(&q, Place::Real).unwrap(), -1);
    }

    #[test]
    fn real_quasi_split_table() {
        // d = 7, m = 3: (4,3) when delta = (-1)^3 = -1.
        let q = QuadraticSpace::from_ints(&[1, 1, 1, 1, -1, -1, -1]).unwrap();
        assert_eq!(q.signed_det(), int(-1));
        assert!(is_quasi_split_local(&q, Place::Real).unwrap());
        let q = QuadraticSpace::from_ints(&[1, 1, 1, 1, 1, -1, -1]).unwrap();
        assert!(!is_quasi_split_local(&q, Place::Real).unwrap());
    }

    #[test]
    fn perfect_examples() {
        let hyp = QuadraticSpace::from_ints(&[1, -1, 1, -1]).unwrap();
        assert!(is_perfect(&hyp, 3).unwrap());
        assert!(is_perfect(&hyp, 2).is_err());
        // d even with delta = p: odd valuation.
        let q = quasi_split_model(4, &int(5)).unwrap();
        assert!(is_quasi_split_local(&q, Place::Prime(5)).unwrap());
        assert!(!is_perfect(&q, 5).unwrap());
        // d = 6, delta = 9u with u a nonresidue mod 5.
        let q = quasi_split_model(6, &int(18)).unwrap();
        assert!(is_perfect(&q, 5).unwrap());
        assert_ne!(hasse_invariant(&q, Place::Prime(5)).unwrap(), 0);
    }

    #[test]
    fn global_existence_examples() {
        let g = |n: i64| SquareClass::Global(BigInt::from(n));
        assert!(exists_global_form(11, &g(1)).unwrap());
        assert!(!exists_global_form(7, &g(1)).unwrap());
        assert!(!exists_global_form(9, &g(1)).unwrap());
        assert!(exists_global_form(8, &g(2)).unwrap());
        assert!(exists_global_form(2, &g(1)).is_err());
        // sign precondition
        assert!(!exists_global_form(7, &g(-1)).unwrap());
    }
}
