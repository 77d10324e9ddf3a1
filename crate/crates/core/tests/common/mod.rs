//! Independent Witt-class oracle for quadratic forms over Q_p, p odd.
//!
//! A diagonal form over Q_p splits as f0 + p f1 with unit forms f0, f1, and
//! its Witt class is determined by the Witt classes of the two residue forms
//! over F_p. Those are reduced here by brute force, never through Hilbert
//! symbols.

#![allow(dead_code)]

/// `x` is a nonzero square mod `p`, checked by enumeration.
pub fn is_square_mod(x: i64, p: i64) -> bool {
    let x = x.rem_euclid(p);
    (1..p).any(|t| (t * t) % p == x)
}

/// Anisotropic representative of a Witt class over F_p: at most two entries.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResidueWitt {
    pub entries: Vec<i64>,
}

impl ResidueWitt {
    pub fn add(&mut self, x: i64, p: i64) {
        let x = x.rem_euclid(p);
        match self.entries.as_slice() {
            [] => self.entries = vec![x],
            [y] => {
                if is_square_mod(-x * y, p) {
                    self.entries.clear();
                } else {
                    self.entries.push(x);
                }
            }
            [y, z] => {
                // Ternary forms over F_p are isotropic: y + z + x = H + <-xyz>.
                self.entries = vec![(-x * y % p * z).rem_euclid(p)];
            }
            _ => unreachable!("anisotropic forms over F_p have dimension <= 2"),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `x = p^v u` with `u` prime to `p`.
pub fn split(mut x: i64, p: i64) -> (u32, i64) {
    assert_ne!(x, 0);
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    (v, x)
}

/// Residue Witt classes `(W(f0), W(f1))` of a diagonal integer form.
pub fn witt_class(diag: &[i64], p: i64) -> (ResidueWitt, ResidueWitt) {
    let mut w0 = ResidueWitt::default();
    let mut w1 = ResidueWitt::default();
    for &a in diag {
        let (v, u) = split(a, p);
        if v % 2 == 0 {
            w0.add(u, p);
        } else {
            w1.add(u, p);
        }
    }
    (w0, w1)
}

/// Whether two diagonal forms of equal dimension are isometric over Q_p:
/// `q1 - q2` must be hyperbolic.
pub fn isometric(q1: &[i64], q2: &[i64], p: i64) -> bool {
    assert_eq!(q1.len(), q2.len());
    let mut diff: Vec<i64> = q1.to_vec();
    diff.extend(q2.iter().map(|x| -x));
    let (w0, w1) = witt_class(&diff, p);
    w0.is_zero() && w1.is_zero()
}

/// Discriminant (`det`, times `(-1)^{d/2}` in even dimension) reduced to `p^{v mod 2} u`.
pub fn signed_det_class(diag: &[i64], p: i64) -> i64 {
    let d = diag.len();
    let mut v = 0u32;
    let mut u = if d % 2 == 1 || (d / 2) % 2 == 0 { 1 } else { -1 };
    for &a in diag {
        let (va, ua) = split(a, p);
        v += va;
        u = (u * ua).rem_euclid(p);
    }
    if v % 2 == 1 {
        u * p
    } else {
        u
    }
}

/// The quasi-split shape: hyperbolic planes plus `<(-1)^m delta>` in odd
/// dimension, or `<1, -delta>` in even dimension.
pub fn quasi_split_shape(d: usize, delta: i64) -> Vec<i64> {
    let m = d / 2;
    let planes = if d % 2 == 1 { m } else { m - 1 };
    let mut out = Vec::with_capacity(d);
    for _ in 0..planes {
        out.extend([1, -1]);
    }
    if d % 2 == 1 {
        out.push(if m % 2 == 0 { delta } else { -delta });
    } else {
        out.extend([1, -delta]);
    }
    out
}

/// Oracle verdict for quasi-splitness over Q_p.
pub fn oracle_quasi_split(diag: &[i64], p: i64) -> bool {
    let delta = signed_det_class(diag, p);
    isometric(diag, &quasi_split_shape(diag.len(), delta), p)
}

/// Least quadratic nonresidue mod `p`, by enumeration.
pub fn nonresidue(p: i64) -> i64 {
    (2..p).find(|&x| !is_square_mod(x, p)).expect("odd prime has a nonresidue")
}
