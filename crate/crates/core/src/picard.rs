//! Numerical divisor classes on the blown-up ruled surface.
//!
//! A class is written in the basis `e*(C_o)`, `e*(F)` (a fiber), the four
//! exceptional curves `s_i` over the section's half-period points and the four
//! exceptional curves `r_i` over the opposite fixed points. The pairing is
//! hyperbolic on the pullback part and `-1` on each exceptional curve.
//! Fibers are identified numerically, so `e*(S_k + S_j)` has fiber
//! coefficient 2.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_rational::Rational64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PicardError {
    #[error("invalid invariants: {0}")]
    InvalidInvariants(String),
    #[error("parity violation: {0}")]
    ParityViolation(String),
}

/// Integer class `a·e*(C_o) + b·e*(F) + Σ s_i·s_i + Σ r_i·r_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct DivisorClass {
    pub section: i64,
    pub fiber: i64,
    pub s: [i64; 4],
    pub r: [i64; 4],
}

impl DivisorClass {
    pub const ZERO: DivisorClass = DivisorClass {
        section: 0,
        fiber: 0,
        s: [0; 4],
        r: [0; 4],
    };

    pub fn new(section: i64, fiber: i64, s: [i64; 4], r: [i64; 4]) -> Self {
        DivisorClass {
            section,
            fiber,
            s,
            r,
        }
    }

    /// `e*(C_o)`.
    pub fn section_class() -> Self {
        DivisorClass {
            section: 1,
            ..Self::ZERO
        }
    }

    /// `e*(F)` for any fiber `F`.
    pub fn fiber_class() -> Self {
        DivisorClass {
            fiber: 1,
            ..Self::ZERO
        }
    }

    /// The exceptional curve `s_i`.
    pub fn s_exceptional(i: usize) -> Self {
        let mut s = [0; 4];
        s[i] = 1;
        DivisorClass { s, ..Self::ZERO }
    }

    /// The exceptional curve `r_i`.
    pub fn r_exceptional(i: usize) -> Self {
        let mut r = [0; 4];
        r[i] = 1;
        DivisorClass { r, ..Self::ZERO }
    }

    /// Coefficients in the order `section, fiber, s0..s3, r0..r3`.
    pub fn from_coefficients(c: [i64; 10]) -> Self {
        DivisorClass {
            section: c[0],
            fiber: c[1],
            s: [c[2], c[3], c[4], c[5]],
            r: [c[6], c[7], c[8], c[9]],
        }
    }

    pub fn coefficients(&self) -> [i64; 10] {
        let mut c = [0; 10];
        c[0] = self.section;
        c[1] = self.fiber;
        c[2..6].copy_from_slice(&self.s);
        c[6..].copy_from_slice(&self.r);
        c
    }

    pub fn intersect(&self, other: &DivisorClass) -> i64 {
        let exc: i64 = (0..4)
            .map(|i| self.s[i] * other.s[i] + self.r[i] * other.r[i])
            .sum();
        self.section * other.fiber + self.fiber * other.section - exc
    }

    pub fn self_intersection(&self) -> i64 {
        self.intersect(self)
    }

    pub fn dot_canonical(&self) -> i64 {
        self.intersect(&canonical_class())
    }

    /// Arithmetic genus `1 + (D² + D·K)/2` from adjunction.
    pub fn adjunction_genus(&self) -> Rational64 {
        Rational64::from_integer(1)
            + Rational64::new(self.self_intersection() + self.dot_canonical(), 2)
    }

    /// Divides every coefficient by `m`, failing unless all are multiples.
    pub fn divide_exact(&self, m: i64) -> Result<DivisorClass, PicardError> {
        if m <= 0 {
            return Err(PicardError::InvalidInvariants(format!(
                "divisor m = {m} must be positive"
            )));
        }
        let c = self.coefficients();
        if let Some(bad) = c.iter().find(|&&x| x % m != 0) {
            return Err(PicardError::InvalidInvariants(format!(
                "coefficient {bad} is not divisible by m = {m}"
            )));
        }
        let mut out = [0; 10];
        for (o, x) in out.iter_mut().zip(c) {
            *o = x / m;
        }
        Ok(Self::from_coefficients(out))
    }
}

/// Free-function form of [`DivisorClass::intersect`].
pub fn intersect(d: &DivisorClass, e: &DivisorClass) -> i64 {
    d.intersect(e)
}

/// `K = -2·e*(C_o) + Σ s_i + Σ r_i`.
pub fn canonical_class() -> DivisorClass {
    DivisorClass::new(-2, 0, [1; 4], [1; 4])
}

/// `e*(-2C_o)`, the pullback of the quotient surface's canonical class.
pub fn pulled_back_quotient_canonical() -> DivisorClass {
    DivisorClass {
        section: -2,
        ..DivisorClass::ZERO
    }
}

impl Add for DivisorClass {
    type Output = DivisorClass;
    fn add(self, o: DivisorClass) -> DivisorClass {
        let mut c = self.coefficients();
        for (x, y) in c.iter_mut().zip(o.coefficients()) {
            *x += y;
        }
        DivisorClass::from_coefficients(c)
    }
}

impl Neg for DivisorClass {
    type Output = DivisorClass;
    fn neg(self) -> DivisorClass {
        self * -1
    }
}

impl Sub for DivisorClass {
    type Output = DivisorClass;
    fn sub(self, o: DivisorClass) -> DivisorClass {
        self + (-o)
    }
}

impl Mul<i64> for DivisorClass {
    type Output = DivisorClass;
    fn mul(self, k: i64) -> DivisorClass {
        let mut c = self.coefficients();
        for x in c.iter_mut() {
            *x *= k;
        }
        DivisorClass::from_coefficients(c)
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.coefficients();
        let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for DivisorClass {
    type Err = PicardError;

    /// Ten integers separated by commas or whitespace.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|p| !p.is_empty())
            .collect();
        if parts.len() != 10 {
            return Err(PicardError::InvalidInvariants(format!(
                "a class needs 10 integers, got {}",
                parts.len()
            )));
        }
        let mut c = [0; 10];
        for (slot, p) in c.iter_mut().zip(parts) {
            *slot = p
                .parse()
                .map_err(|_| PicardError::InvalidInvariants(format!("not an integer: {p:?}")))?;
        }
        Ok(Self::from_coefficients(c))
    }
}

/// A class known to be the pullback of a class `Λ` on the quotient surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TauInvariantClass(DivisorClass);

impl TauInvariantClass {
    /// Accepts `d` when both `D²` and `D·e*(-2C_o)` are even.
    pub fn new(d: DivisorClass) -> Result<Self, PicardError> {
        let sq = d.self_intersection();
        if sq % 2 != 0 {
            return Err(PicardError::ParityViolation(format!(
                "self-intersection {sq} is odd"
            )));
        }
        let k = d.intersect(&pulled_back_quotient_canonical());
        if k % 2 != 0 {
            return Err(PicardError::ParityViolation(format!(
                "canonical pairing {k} is odd"
            )));
        }
        Ok(TauInvariantClass(d))
    }

    pub fn class(&self) -> &DivisorClass {
        &self.0
    }

    /// `Λ²` on the quotient.
    pub fn lambda_square(&self) -> i64 {
        self.0.self_intersection() / 2
    }

    /// `Λ·K̃` on the quotient.
    pub fn lambda_dot_canonical(&self) -> i64 {
        self.0.intersect(&pulled_back_quotient_canonical()) / 2
    }

    /// Arithmetic genus of `Λ`.
    pub fn tilde_genus(&self) -> Rational64 {
        Rational64::from_integer(1)
            + Rational64::new(self.lambda_square() + self.lambda_dot_canonical(), 2)
    }
}

/// Convenience wrapper: checks parity and returns `g̃`.
pub fn tilde_genus(d: &DivisorClass) -> Result<Rational64, PicardError> {
    Ok(TauInvariantClass::new(*d)?.tilde_genus())
}

pub fn sum_of_squares(v: &[i64; 4]) -> i64 {
    v.iter().map(|x| x * x).sum()
}

fn negated(v: &[i64; 4]) -> [i64; 4] {
    [-v[0], -v[1], -v[2], -v[3]]
}

fn check_type(gamma: &[i64; 4]) -> Result<(), PicardError> {
    if gamma.iter().any(|&g| g < 0) {
        return Err(PicardError::InvalidInvariants(format!(
            "type {gamma:?} has a negative entry"
        )));
    }
    Ok(())
}

/// `e*(nC_o + (2d-1)F) - ρ s_0 - Σ γ_i r_i`.
pub fn cover_class(n: i64, d: i64, rho: i64, gamma: [i64; 4]) -> Result<DivisorClass, PicardError> {
    if n < 1 {
        return Err(PicardError::InvalidInvariants(format!(
            "degree n = {n} must be at least 1"
        )));
    }
    if d < 1 {
        return Err(PicardError::InvalidInvariants(format!(
            "order d = {d} must be at least 1"
        )));
    }
    if rho < 1 || rho > 2 * d - 1 || rho % 2 == 0 {
        return Err(PicardError::InvalidInvariants(format!(
            "ramification {rho} must be odd and between 1 and {}",
            2 * d - 1
        )));
    }
    check_type(&gamma)?;
    Ok(DivisorClass::new(
        n,
        2 * d - 1,
        [-rho, 0, 0, 0],
        negated(&gamma),
    ))
}

/// Image class of a cover whose factorization has degree `m`: the cover
/// class divided by `m`, which must be exact.
pub fn reduced_image_class(
    n: i64,
    d: i64,
    rho: i64,
    gamma: [i64; 4],
    m: i64,
) -> Result<DivisorClass, PicardError> {
    cover_class(n, d, rho, gamma)?.divide_exact(m)
}

/// Where the two marked points of an NLS/Toda or sine-Gordon cover project.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Placement {
    /// Both project to the half-period with this index.
    SamePointHalfPeriod(usize),
    /// Distinct projections, neither a half-period.
    DistinctGeneric,
    /// Distinct half-periods `k != j`.
    DistinctHalfPeriods(usize, usize),
}

impl Placement {
    fn validate(&self) -> Result<(), PicardError> {
        let bad = |i: usize| i > 3;
        match *self {
            Placement::SamePointHalfPeriod(i) if bad(i) => Err(PicardError::InvalidInvariants(
                format!("half-period index {i} out of range"),
            )),
            Placement::DistinctHalfPeriods(k, j) if bad(k) || bad(j) || k == j => {
                Err(PicardError::InvalidInvariants(format!(
                    "half-period pair ({k}, {j}) must be distinct indices in 0..4"
                )))
            }
            _ => Ok(()),
        }
    }
}

/// The residue mod 2 each type entry must have for a given placement.
pub fn placement_parities(n: i64, placement: Placement) -> [i64; 4] {
    let base = n.rem_euclid(2);
    let mut p = [base; 4];
    if let Placement::DistinctHalfPeriods(k, j) = placement {
        p[k] = 1 - base;
        p[j] = 1 - base;
    }
    p
}

/// Class of the lifted curve for the NLS/Toda and sine-Gordon cases.
pub fn nls_sg_class(
    n: i64,
    placement: Placement,
    gamma: [i64; 4],
) -> Result<DivisorClass, PicardError> {
    if n < 1 {
        return Err(PicardError::InvalidInvariants(format!(
            "degree n = {n} must be at least 1"
        )));
    }
    placement.validate()?;
    check_type(&gamma)?;
    let want = placement_parities(n, placement);
    for i in 0..4 {
        if gamma[i].rem_euclid(2) != want[i] {
            return Err(PicardError::ParityViolation(format!(
                "type entry {i} is {} but must be {} mod 2 (n = {n}, {placement:?})",
                gamma[i], want[i]
            )));
        }
    }
    let mut s = [0; 4];
    match placement {
        Placement::SamePointHalfPeriod(i) => s[i] = -2,
        Placement::DistinctGeneric => {}
        Placement::DistinctHalfPeriods(k, j) => {
            s[k] = -1;
            s[j] = -1;
        }
    }
    Ok(DivisorClass::new(n, 2, s, negated(&gamma)))
}

/// The index whose parity differs from the other three, if unique.
pub fn parity_exceptional_index(alpha: &[i64; 4]) -> Option<usize> {
    (0..4).find(|&k| {
        (0..4)
            .filter(|&j| j != k)
            .all(|j| (alpha[k] + 1 - alpha[j]).rem_euclid(2) == 0)
    })
}

/// `e*(nC_o + S_k) - s_k - Σ α_i r_i` with `2n + 1 = α⁽²⁾`.
pub fn exceptional_class(alpha: [i64; 4]) -> Result<DivisorClass, PicardError> {
    check_type(&alpha)?;
    let a2 = sum_of_squares(&alpha);
    if a2 % 2 == 0 {
        return Err(PicardError::ParityViolation(format!(
            "sum of squares {a2} is even"
        )));
    }
    let k = parity_exceptional_index(&alpha).ok_or_else(|| {
        PicardError::ParityViolation(format!("{alpha:?} has no unique entry of distinct parity"))
    })?;
    let mut s = [0; 4];
    s[k] = -1;
    Ok(DivisorClass::new((a2 - 1) / 2, 1, s, negated(&alpha)))
}

/// Whether `d` descends to a class with `Λ² = Λ·K̃ = -1`.
pub fn is_exceptional_first_kind(d: &DivisorClass) -> bool {
    match TauInvariantClass::new(*d) {
        Ok(t) => t.lambda_square() == -1 && t.lambda_dot_canonical() == -1,
        Err(_) => false,
    }
}
