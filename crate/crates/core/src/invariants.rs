//! Numerical invariants of hyperelliptic covers of an elliptic curve.
//!
//! Three problem cases are covered: the `d`-th KdV flow (a cover marked at a
//! Weierstrass point), NLS/Toda (two points exchanged by the involution) and
//! sine-Gordon (two Weierstrass points). The checkers never fail on bad data;
//! they return a [`Report`] with one [`Verdict`] per clause, and a cover is
//! admissible when every required clause holds.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Rational64;
use thiserror::Error;

use crate::picard::{self, PicardError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantsError {
    #[error("invalid invariants: {0}")]
    InvalidInvariants(String),
    #[error("parity violation: {0}")]
    ParityViolation(String),
}

impl From<PicardError> for InvariantsError {
    fn from(e: PicardError) -> Self {
        match e {
            PicardError::InvalidInvariants(s) => InvariantsError::InvalidInvariants(s),
            PicardError::ParityViolation(s) => InvariantsError::ParityViolation(s),
        }
    }
}

/// Intersection numbers `γ_i ≥ 0` with the four exceptional curves over the
/// half-periods, indexed like [`crate::elliptic::HalfPeriodIndex`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeVector([i64; 4]);

impl TypeVector {
    pub fn new(gamma: [i64; 4]) -> Result<Self, InvariantsError> {
        if gamma.iter().any(|&g| g < 0) {
            return Err(InvariantsError::InvalidInvariants(format!(
                "type {gamma:?} has a negative entry"
            )));
        }
        Ok(TypeVector(gamma))
    }

    pub fn components(&self) -> [i64; 4] {
        self.0
    }

    /// `γ⁽¹⁾ = Σ γ_i`.
    pub fn sum(&self) -> i64 {
        self.0.iter().sum()
    }

    /// `γ⁽²⁾ = Σ γ_i²`.
    pub fn sum_of_squares(&self) -> i64 {
        self.0.iter().map(|g| g * g).sum()
    }
}

impl fmt::Display for TypeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "{a},{b},{c},{d}")
    }
}

impl FromStr for TypeVector {
    type Err = InvariantsError;

    /// Four non-negative integers separated by commas, e.g. `2,1,1,1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(InvariantsError::InvalidInvariants(format!(
                "a type needs 4 entries, got {}",
                parts.len()
            )));
        }
        let mut g = [0; 4];
        for (slot, p) in g.iter_mut().zip(parts) {
            *slot = p.parse().map_err(|_| {
                InvariantsError::InvalidInvariants(format!("not an integer: {p:?}"))
            })?;
        }
        TypeVector::new(g)
    }
}

/// Claimed invariants of a KdV cover: degree `n`, osculating order `d`,
/// arithmetic genus `g`, ramification `ρ` at the marked point, degree `m` of
/// the map onto its image in the surface, and type `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverInvariants {
    pub n: i64,
    pub d: i64,
    pub g: i64,
    pub rho: i64,
    pub m: i64,
    pub gamma: TypeVector,
}

/// Where the two marked points of an NLS/Toda or sine-Gordon cover project.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Projection {
    Same,
    DistinctGeneric,
    DistinctHalfPeriods,
}

impl FromStr for Projection {
    type Err = InvariantsError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "same" => Ok(Projection::Same),
            "distinct-generic" | "distinct" => Ok(Projection::DistinctGeneric),
            "distinct-half-periods" => Ok(Projection::DistinctHalfPeriods),
            other => Err(InvariantsError::InvalidInvariants(format!(
                "unknown projection {other:?}"
            ))),
        }
    }
}

impl fmt::Display for Projection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Projection::Same => "same",
            Projection::DistinctGeneric => "distinct-generic",
            Projection::DistinctHalfPeriods => "distinct-half-periods",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseLabel {
    KdV { d: i64 },
    NlsToda(Projection),
    SineGordon(Projection),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    /// `lhs ≤ rhs`
    Le,
    /// `lhs = rhs`
    Eq,
    /// `lhs` divides `rhs`
    Divides,
}

impl Relation {
    pub fn symbol(&self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "==",
            Relation::Divides => "divides",
        }
    }

    fn holds(&self, lhs: i64, rhs: i64) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Divides => lhs > 0 && rhs % lhs == 0,
        }
    }
}

/// Outcome of one named clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub clause: &'static str,
    pub ok: bool,
    pub lhs: i64,
    pub rhs: i64,
    pub relation: Relation,
    /// Informational clauses are reported but do not affect admissibility.
    pub informational: bool,
}

impl Verdict {
    pub fn new(clause: &'static str, lhs: i64, relation: Relation, rhs: i64) -> Self {
        Verdict {
            clause,
            ok: relation.holds(lhs, rhs),
            lhs,
            rhs,
            relation,
            informational: false,
        }
    }

    pub fn informational(mut self) -> Self {
        self.informational = true;
        self
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match (self.ok, self.informational) {
            (true, _) => "ok",
            (false, true) => "note",
            (false, false) => "FAIL",
        };
        write!(
            f,
            "{status} {}: {} {} {}",
            self.clause,
            self.lhs,
            self.relation.symbol(),
            self.rhs
        )
    }
}

/// All verdicts of one check, in a fixed clause order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Report {
    pub verdicts: Vec<Verdict>,
}

impl Report {
    fn push(&mut self, v: Verdict) {
        self.verdicts.push(v);
    }

    pub fn admissible(&self) -> bool {
        self.verdicts.iter().all(|v| v.ok || v.informational)
    }

    /// Failed required clauses.
    pub fn violations(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts.iter().filter(|v| !v.ok && !v.informational)
    }

    pub fn get(&self, clause: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.clause == clause)
    }

    pub fn extend(&mut self, other: Report) {
        self.verdicts.extend(other.verdicts);
    }
}

fn parity_mismatches(gamma: &[i64; 4], want: &[i64; 4]) -> i64 {
    gamma
        .iter()
        .zip(want)
        .filter(|(g, w)| g.rem_euclid(2) != w.rem_euclid(2))
        .count() as i64
}

/// Constraints on a KdV cover: ramification, divisibility, type parity and
/// the genus/degree inequalities derived from the surface.
pub fn check_kdv(inv: &CoverInvariants) -> Report {
    let CoverInvariants {
        n,
        d,
        g,
        rho,
        m,
        gamma,
    } = *inv;
    let q = 2 * d - 1;
    let mut r = Report::default();
    let out_of_domain = [n < 1, d < 1, g < 0, rho < 1, m < 1]
        .iter()
        .filter(|&&b| b)
        .count() as i64;
    r.push(Verdict::new("kdv.domain", out_of_domain, Relation::Eq, 0));
    r.push(Verdict::new(
        "kdv.ramification-odd",
        rho.rem_euclid(2),
        Relation::Eq,
        1,
    ));
    r.push(Verdict::new("kdv.ramification-bound", rho, Relation::Le, q));
    r.push(Verdict::new(
        "kdv.image-degree-divides",
        m,
        Relation::Divides,
        n.gcd(&q).gcd(&rho),
    ));
    let want = [n + 1, n, n, n];
    r.push(Verdict::new(
        "kdv.type-parity",
        parity_mismatches(&gamma.0, &want),
        Relation::Eq,
        0,
    ));
    let (g1, g2) = (gamma.sum(), gamma.sum_of_squares());
    r.push(Verdict::new(
        "kdv.genus-vs-type-sum",
        2 * g + 1,
        Relation::Le,
        g1,
    ));
    if rho == 1 {
        r.push(Verdict::new(
            "kdv.unramified-birational",
            m,
            Relation::Eq,
            1,
        ));
    }
    r.push(Verdict::new(
        "kdv.type-square-bound",
        g2,
        Relation::Le,
        2 * q * (n - m) + 4 * m * m - rho * rho,
    ));
    let lhs = (2 * g + 1) * (2 * g + 1);
    r.push(Verdict::new(
        "kdv.genus-square-bound",
        lhs,
        Relation::Le,
        8 * q * (n - m) + 13 * m * m - 4 * rho * rho,
    ));
    r.push(Verdict::new(
        "kdv.genus-square-coarse",
        lhs,
        Relation::Le,
        8 * q * n + q * q,
    ));
    if rho == 1 {
        r.push(Verdict::new(
            "kdv.genus-square-unramified",
            lhs,
            Relation::Le,
            8 * q * (n - 1) + 9,
        ));
    }
    r
}

/// Constraints on an NLS/Toda cover of degree `n` and genus `g`.
///
/// The two marked points are exchanged by the involution, so every type
/// entry has the parity of `n` whatever the projection.
pub fn check_nls_toda(n: i64, g: i64, gamma: &TypeVector, projection: Projection) -> Report {
    let mut r = Report::default();
    let out_of_domain = [n < 1, g < 0].iter().filter(|&&b| b).count() as i64;
    r.push(Verdict::new("nls.domain", out_of_domain, Relation::Eq, 0));
    r.push(Verdict::new(
        "nls.type-parity",
        parity_mismatches(&gamma.0, &[n; 4]),
        Relation::Eq,
        0,
    ));
    r.push(Verdict::new(
        "nls.genus-vs-type-sum",
        2 * g + 2,
        Relation::Le,
        gamma.sum(),
    ));
    let (g2, lhs) = (gamma.sum_of_squares(), (g + 1) * (g + 1));
    match projection {
        Projection::DistinctGeneric | Projection::DistinctHalfPeriods => {
            r.push(Verdict::new(
                "nls.type-square-distinct",
                g2,
                Relation::Le,
                4 * n,
            ));
            r.push(Verdict::new(
                "nls.genus-square-distinct",
                lhs,
                Relation::Le,
                4 * n,
            ));
        }
        Projection::Same if n % 2 == 0 => {
            r.push(Verdict::new(
                "nls.type-square-same-even",
                g2,
                Relation::Le,
                4 * n - 4,
            ));
            r.push(Verdict::new(
                "nls.genus-square-same-even",
                lhs,
                Relation::Le,
                4 * n - 4,
            ));
        }
        Projection::Same => {
            r.push(Verdict::new(
                "nls.type-square-same-odd",
                g2,
                Relation::Le,
                4 * n - 8,
            ));
            r.push(Verdict::new(
                "nls.genus-square-same-odd",
                lhs,
                Relation::Le,
                4 * n - 8,
            ));
        }
    }
    r
}

/// Constraints on a sine-Gordon cover of degree `n` and genus `g`.
///
/// For distinct projections both `g² ≤ 4n` (required) and the sharper
/// `g² ≤ 4n − 2` (informational) are reported.
pub fn check_sine_gordon(n: i64, g: i64, gamma: &TypeVector, projection: Projection) -> Report {
    let mut r = Report::default();
    let out_of_domain = [n < 1, g < 0].iter().filter(|&&b| b).count() as i64;
    r.push(Verdict::new("sg.domain", out_of_domain, Relation::Eq, 0));
    let mismatches = parity_mismatches(&gamma.0, &[n; 4]);
    let expected = if projection == Projection::DistinctHalfPeriods {
        2
    } else {
        0
    };
    r.push(Verdict::new(
        "sg.type-parity",
        mismatches,
        Relation::Eq,
        expected,
    ));
    r.push(Verdict::new(
        "sg.genus-vs-type-sum",
        2 * g,
        Relation::Le,
        gamma.sum(),
    ));
    let (g2, lhs) = (gamma.sum_of_squares(), g * g);
    match projection {
        Projection::DistinctGeneric | Projection::DistinctHalfPeriods => {
            r.push(Verdict::new(
                "sg.type-square-distinct",
                g2,
                Relation::Le,
                4 * n,
            ));
            r.push(Verdict::new(
                "sg.genus-square-distinct",
                lhs,
                Relation::Le,
                4 * n,
            ));
            r.push(
                Verdict::new(
                    "sg.genus-square-distinct-strict",
                    lhs,
                    Relation::Le,
                    4 * n - 2,
                )
                .informational(),
            );
        }
        Projection::Same if n % 2 == 0 => {
            r.push(Verdict::new(
                "sg.type-square-same-even",
                g2,
                Relation::Le,
                4 * n - 4,
            ));
            r.push(Verdict::new(
                "sg.genus-square-same-even",
                lhs,
                Relation::Le,
                4 * n - 4,
            ));
        }
        Projection::Same => {
            r.push(Verdict::new(
                "sg.type-square-same-odd",
                g2,
                Relation::Le,
                4 * n - 8,
            ));
            r.push(Verdict::new(
                "sg.genus-square-same-odd",
                lhs,
                Relation::Le,
                4 * n - 8,
            ));
        }
    }
    r
}

/// Dispatches on the case label. `d` is taken from the label for KdV.
pub fn check_cover(case: CaseLabel, inv: &CoverInvariants) -> Report {
    match case {
        CaseLabel::KdV { d } => check_kdv(&CoverInvariants { d, ..*inv }),
        CaseLabel::NlsToda(p) => check_nls_toda(inv.n, inv.g, &inv.gamma, p),
        CaseLabel::SineGordon(p) => check_sine_gordon(inv.n, inv.g, &inv.gamma, p),
    }
}

/// `(2d − 1)(2n − 2) + 3`, the value of `γ⁽²⁾` for a smooth rational image.
pub fn rational_type_target(n: i64, d: i64) -> i64 {
    (2 * d - 1) * (2 * n - 2) + 3
}

/// Degree `n` solving `γ⁽²⁾ = (2d − 1)(2n − 2) + 3`, if it is a positive integer.
pub fn degree_from_type(gamma: &TypeVector, d: i64) -> Option<i64> {
    let q = 2 * d - 1;
    let num = gamma.sum_of_squares() - 3;
    if num < 0 || num % (2 * q) != 0 {
        return None;
    }
    let n = num / (2 * q) + 1;
    (n >= 1).then_some(n)
}

/// An unramified, birational KdV type together with its genus and checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedCover {
    pub gamma: TypeVector,
    pub n: i64,
    pub g: i64,
    pub report: Report,
}

impl TypedCover {
    fn build(gamma: TypeVector, n: i64, d: i64) -> Self {
        let g = (gamma.sum() - 1) / 2;
        let report = check_kdv(&CoverInvariants {
            n,
            d,
            g,
            rho: 1,
            m: 1,
            gamma,
        });
        TypedCover {
            gamma,
            n,
            g,
            report,
        }
    }
}

/// All types with `γ⁽²⁾ = (2d − 1)(2n − 2) + 3` and the KdV parity, in
/// lexicographic order, each with `g = (γ⁽¹⁾ − 1)/2` and its checks.
pub fn enumerate_types(n: i64, d: i64) -> Result<Vec<TypedCover>, InvariantsError> {
    if n < 1 || d < 1 {
        return Err(InvariantsError::InvalidInvariants(format!(
            "need n, d >= 1, got n = {n}, d = {d}"
        )));
    }
    let target = rational_type_target(n, d);
    let want = [n + 1, n, n, n];
    let ok = |x: i64, i: usize| (x - want[i]).rem_euclid(2) == 0;
    let mut out = Vec::new();
    for a in 0..=target.isqrt() {
        if !ok(a, 0) {
            continue;
        }
        let ra = target - a * a;
        for b in (0..=ra.isqrt()).filter(|&b| ok(b, 1)) {
            let rb = ra - b * b;
            for c in (0..=rb.isqrt()).filter(|&c| ok(c, 2)) {
                let rc = rb - c * c;
                let e = rc.isqrt();
                if e * e == rc && ok(e, 3) {
                    out.push(TypedCover::build(TypeVector([a, b, c, e]), n, d));
                }
            }
        }
    }
    Ok(out)
}

/// One output of the constructive type generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructedType {
    pub cover: TypedCover,
    /// The even offset `2ε` with `γ = (2d − 1)μ + 2ε`.
    pub two_epsilon: [i64; 4],
}

/// Absolute offsets `|2ε_i|` of the two admissible patterns.
fn epsilon_patterns(d: i64, k: usize) -> [[i64; 4]; 2] {
    let mut a = [2 * d - 2; 4];
    a[k] = 0;
    let mut b = if d % 2 == 1 { [d - 1; 4] } else { [d; 4] };
    b[k] = if d % 2 == 1 { d + 1 } else { d - 2 };
    [a, b]
}

/// Types `γ = (2d − 1)μ + 2ε` for every admissible offset pattern and sign
/// choice with `γ ≥ 0`, deduplicated and sorted.
///
/// For `2ε = (0, 2d−2, 2d−2, 2d−2)` the report also compares `g` and `n`
/// with their closed forms in `μ`, and every report records that the image
/// in the quotient surface has genus zero.
pub fn construct_types(
    d: i64,
    k: usize,
    mu: [i64; 4],
) -> Result<Vec<ConstructedType>, InvariantsError> {
    if d < 2 {
        return Err(InvariantsError::InvalidInvariants(format!(
            "order d = {d} must be at least 2"
        )));
    }
    if k > 3 {
        return Err(InvariantsError::InvalidInvariants(format!(
            "index k = {k} out of range"
        )));
    }
    let mu = TypeVector::new(mu)?;
    let mv = mu.components();
    if (1..4).any(|j| (mv[0] + 1 - mv[j]).rem_euclid(2) != 0) {
        return Err(InvariantsError::ParityViolation(format!(
            "μ = {mu} must satisfy μ₀ + 1 ≡ μ_j (mod 2)"
        )));
    }
    let q = 2 * d - 1;
    let mut seen = std::collections::BTreeMap::new();
    for pattern in epsilon_patterns(d, k) {
        for signs in 0u32..16 {
            let mut eps = pattern;
            for (i, e) in eps.iter_mut().enumerate() {
                if signs >> i & 1 == 1 {
                    *e = -*e;
                }
            }
            let gamma: Vec<i64> = (0..4).map(|i| q * mv[i] + eps[i]).collect();
            let Ok(gamma) = TypeVector::new([gamma[0], gamma[1], gamma[2], gamma[3]]) else {
                continue;
            };
            seen.entry(gamma).or_insert(eps);
        }
    }
    let closed_pattern = [0, 2 * d - 2, 2 * d - 2, 2 * d - 2];
    let mut out = Vec::new();
    for (gamma, eps) in seen {
        let Some(n) = degree_from_type(&gamma, d) else {
            continue;
        };
        let mut cover = TypedCover::build(gamma, n, d);
        let class = picard::cover_class(n, d, 1, gamma.components())?;
        let tilde = picard::tilde_genus(&class)?;
        cover.report.push(Verdict::new(
            "construct.tilde-genus-zero",
            tilde_numerator(tilde),
            Relation::Eq,
            0,
        ));
        if gamma
            .components()
            .iter()
            .zip(mv)
            .map(|(g, m)| g - q * m)
            .eq(closed_pattern)
        {
            let mu1 = mu.sum();
            let mu2 = mu.sum_of_squares();
            cover.report.push(Verdict::new(
                "construct.genus-closed-form",
                2 * cover.g + 1,
                Relation::Eq,
                q * mu1 + 6 * (d - 1),
            ));
            cover.report.push(Verdict::new(
                "construct.degree-closed-form",
                2 * n,
                Relation::Eq,
                q * mu2 + 4 * (d - 1) * (mv[1] + mv[2] + mv[3]) + 6 * d - 7,
            ));
        }
        out.push(ConstructedType {
            cover,
            two_epsilon: eps,
        });
    }
    Ok(out)
}

/// `4g̃` for a genus known to be a multiple of `1/4`.
fn tilde_numerator(t: Rational64) -> i64 {
    (t * Rational64::from_integer(4)).to_integer()
}

/// The six constructive families of NLS/Toda and sine-Gordon covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Odd degree NLS/Toda.
    NlsOdd,
    /// Even degree NLS/Toda.
    NlsEven,
    /// Even degree sine-Gordon, projections at two distinct half-periods.
    SineGordonEvenDistinct,
    /// Odd degree sine-Gordon, projections at two distinct half-periods.
    SineGordonOddDistinct,
    /// Even degree sine-Gordon, both points over the origin.
    SineGordonEvenSame,
    /// Odd degree sine-Gordon, both points over the origin.
    SineGordonOddSame,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::NlsOdd,
        Family::NlsEven,
        Family::SineGordonEvenDistinct,
        Family::SineGordonOddDistinct,
        Family::SineGordonEvenSame,
        Family::SineGordonOddSame,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Family::NlsOdd => "nls-odd",
            Family::NlsEven => "nls-even",
            Family::SineGordonEvenDistinct => "sg-even-distinct",
            Family::SineGordonOddDistinct => "sg-odd-distinct",
            Family::SineGordonEvenSame => "sg-even-same",
            Family::SineGordonOddSame => "sg-odd-same",
        }
    }

    fn degree_parity(&self) -> i64 {
        match self {
            Family::NlsOdd | Family::SineGordonOddDistinct | Family::SineGordonOddSame => 1,
            _ => 0,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = InvariantsError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let idx = match s {
            "nls-odd" | "6.13" => 0,
            "nls-even" | "6.14" => 1,
            "sg-even-distinct" | "6.15" => 2,
            "sg-odd-distinct" | "6.16" => 3,
            "sg-even-same" | "6.17" => 4,
            "sg-odd-same" | "6.18" => 5,
            other => {
                return Err(InvariantsError::InvalidInvariants(format!(
                    "unknown family {other:?}"
                )))
            }
        };
        Ok(Family::ALL[idx])
    }
}

/// Input of a family map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilySpec {
    pub family: Family,
    pub alpha: [i64; 4],
    /// For the NLS families: whether the marked point lies over a half-period.
    pub at_half_period: bool,
    /// For even degree sine-Gordon with same projection: the index in 1..=3
    /// whose parity differs.
    pub j0: Option<usize>,
}

/// Genus, degree and cross-checks produced by a family map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyOutput {
    pub g: i64,
    pub n: i64,
    pub projection: Projection,
    pub report: Report,
}

/// Genus and degree of the cover built from `α`, with the degree parity and
/// the genus restriction for its case checked.
pub fn family_params(spec: &FamilySpec) -> Result<FamilyOutput, InvariantsError> {
    let alpha = TypeVector::new(spec.alpha)?;
    let a = alpha.components();
    let (a1, a2) = (alpha.sum(), alpha.sum_of_squares());
    let parity_err = |msg: String| Err(InvariantsError::ParityViolation(msg));
    let (g, n, projection) = match spec.family {
        Family::NlsOdd => {
            if spec.at_half_period {
                (a1 + 1, a2 + a1 + 3, Projection::Same)
            } else {
                (a1 + 1, a2 + a1 + 1, Projection::DistinctGeneric)
            }
        }
        Family::NlsEven => {
            if a == [0; 4] {
                return Err(InvariantsError::InvalidInvariants(
                    "α must be non-zero".into(),
                ));
            }
            match (a1 % 2 == 1, spec.at_half_period) {
                (false, false) => (a1 - 1, a2, Projection::DistinctGeneric),
                (true, true) => (a1 - 1, a2 + 1, Projection::Same),
                _ => {
                    return parity_err(format!(
                        "α⁽¹⁾ = {a1} needs the point {} a half-period",
                        if a1 % 2 == 1 { "at" } else { "away from" }
                    ))
                }
            }
        }
        Family::SineGordonEvenDistinct => {
            if (a[2] + a[3]) % 2 == 0 {
                return parity_err(format!("α₂ + α₃ = {} must be odd", a[2] + a[3]));
            }
            (
                a1 + 1,
                a2 + a[0] + a[1] + 1,
                Projection::DistinctHalfPeriods,
            )
        }
        Family::SineGordonOddDistinct => {
            if (a[0] + a[1]) % 2 == 1 {
                return parity_err(format!("α₀ + α₁ = {} must be even", a[0] + a[1]));
            }
            (
                a1 + 1,
                a2 + a[2] + a[3] + 1,
                Projection::DistinctHalfPeriods,
            )
        }
        Family::SineGordonEvenSame => {
            let j0 = match spec.j0 {
                Some(j) if (1..=3).contains(&j) => j,
                other => {
                    return Err(InvariantsError::InvalidInvariants(format!(
                        "j0 must be one of 1, 2, 3, got {other:?}"
                    )))
                }
            };
            if (0..4).any(|i| i != j0 && (a[j0] + 1 - a[i]).rem_euclid(2) != 0) {
                return parity_err(format!("α = {alpha} needs α_{j0} + 1 ≡ α_i for i ≠ {j0}"));
            }
            (a1, a2 + 1, Projection::Same)
        }
        Family::SineGordonOddSame => (a1 + 2, a2 + a1 + 3, Projection::Same),
    };
    let mut report = Report::default();
    report.push(Verdict::new(
        "family.degree-parity",
        n.rem_euclid(2),
        Relation::Eq,
        spec.family.degree_parity(),
    ));
    let nls = matches!(spec.family, Family::NlsOdd | Family::NlsEven);
    let restriction = match (nls, projection) {
        (true, Projection::Same) if n % 2 == 0 => Verdict::new(
            "nls.genus-square-same-even",
            (g + 1) * (g + 1),
            Relation::Le,
            4 * n - 4,
        ),
        (true, Projection::Same) => Verdict::new(
            "nls.genus-square-same-odd",
            (g + 1) * (g + 1),
            Relation::Le,
            4 * n - 8,
        ),
        (true, _) => Verdict::new(
            "nls.genus-square-distinct",
            (g + 1) * (g + 1),
            Relation::Le,
            4 * n,
        ),
        (false, Projection::Same) if n % 2 == 0 => {
            Verdict::new("sg.genus-square-same-even", g * g, Relation::Le, 4 * n - 4)
        }
        (false, Projection::Same) => {
            Verdict::new("sg.genus-square-same-odd", g * g, Relation::Le, 4 * n - 8)
        }
        (false, _) => Verdict::new(
            "sg.genus-square-distinct-strict",
            g * g,
            Relation::Le,
            4 * n - 2,
        ),
    };
    report.push(restriction);
    Ok(FamilyOutput {
        g,
        n,
        projection,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tv(g: [i64; 4]) -> TypeVector {
        TypeVector::new(g).unwrap()
    }

    fn kdv(n: i64, d: i64, g: i64, rho: i64, m: i64, gamma: [i64; 4]) -> Report {
        check_kdv(&CoverInvariants {
            n,
            d,
            g,
            rho,
            m,
            gamma: tv(gamma),
        })
    }

    fn failed(r: &Report) -> Vec<&'static str> {
        r.violations().map(|v| v.clause).collect()
    }

    #[test]
    fn kdv_examples() {
        let r = kdv(3, 1, 2, 1, 1, [2, 1, 1, 1]);
        assert!(r.admissible(), "{:?}", failed(&r));
        let tight = r.get("kdv.genus-square-unramified").unwrap();
        assert_eq!((tight.lhs, tight.rhs), (25, 25));
        assert_eq!(
            failed(&kdv(3, 1, 3, 1, 1, [2, 1, 1, 1]))[0],
            "kdv.genus-vs-type-sum"
        );
        assert!(failed(&kdv(2, 2, 1, 2, 1, [1, 0, 0, 0])).contains(&"kdv.ramification-odd"));
        assert!(failed(&kdv(3, 1, 1, 1, 1, [1, 1, 1, 1])).contains(&"kdv.type-parity"));
    }

    #[test]
    fn kdv_divisibility() {
        let r = kdv(6, 2, 0, 3, 3, [1, 0, 0, 0]);
        assert!(r.get("kdv.image-degree-divides").unwrap().ok);
        let r = kdv(4, 2, 0, 3, 3, [1, 0, 0, 0]);
        assert!(!r.get("kdv.image-degree-divides").unwrap().ok);
        assert!(r.get("kdv.unramified-birational").is_none());
    }

    #[test]
    fn nls_examples() {
        assert!(check_nls_toda(4, 2, &tv([2, 2, 2, 2]), Projection::DistinctGeneric).admissible());
        assert!(check_nls_toda(4, 3, &tv([2, 2, 2, 2]), Projection::DistinctGeneric).admissible());
        assert!(check_nls_toda(5, 2, &tv([1, 1, 1, 3]), Projection::Same).admissible());
        let r = check_nls_toda(5, 2, &tv([1, 1, 3, 3]), Projection::Same);
        assert_eq!(failed(&r), vec!["nls.type-square-same-odd"]);
    }

    #[test]
    fn sine_gordon_examples() {
        let r = check_sine_gordon(4, 3, &tv([2, 2, 1, 1]), Projection::DistinctHalfPeriods);
        assert!(r.admissible());
        let strict = r.get("sg.genus-square-distinct-strict").unwrap();
        assert!(strict.ok && strict.informational && strict.rhs == 14);
        let r = check_sine_gordon(2, 3, &tv([1, 1, 1, 1]), Projection::Same);
        assert!(failed(&r).contains(&"sg.genus-square-same-even"));
        let r = check_sine_gordon(1, 0, &tv([0; 4]), Projection::Same);
        assert!(failed(&r).contains(&"sg.type-square-same-odd"));
    }

    #[test]
    fn strict_sine_gordon_bound_is_informational() {
        // g² = 16 = 4n passes the required clause and misses the strict one
        let r = check_sine_gordon(4, 4, &tv([2, 2, 2, 2]), Projection::DistinctGeneric);
        assert!(r.admissible());
        assert!(!r.get("sg.genus-square-distinct-strict").unwrap().ok);
    }

    #[test]
    fn enumeration_examples() {
        let g = |n, d| -> Vec<[i64; 4]> {
            enumerate_types(n, d)
                .unwrap()
                .iter()
                .map(|t| t.gamma.components())
                .collect()
        };
        assert_eq!(g(1, 1), vec![[0, 1, 1, 1]]);
        assert_eq!(g(2, 1), vec![[1, 0, 0, 2], [1, 0, 2, 0], [1, 2, 0, 0]]);
        assert_eq!(g(3, 1), vec![[2, 1, 1, 1]]);
        let t = &enumerate_types(3, 1).unwrap()[0];
        assert_eq!(t.g, 2);
        assert!(t.report.admissible());
        assert!(enumerate_types(0, 1).is_err());
    }

    #[test]
    fn construction_examples() {
        let out = construct_types(2, 0, [0, 1, 1, 1]).unwrap();
        let t = out
            .iter()
            .find(|t| t.cover.gamma.components() == [0, 5, 5, 5])
            .unwrap();
        assert_eq!((t.cover.n, t.cover.g), (13, 7));
        assert_eq!(
            t.cover
                .report
                .get("construct.genus-closed-form")
                .unwrap()
                .rhs,
            15
        );
        assert_eq!(
            t.cover
                .report
                .get("construct.degree-closed-form")
                .unwrap()
                .rhs,
            26
        );
        assert!(t.cover.report.admissible());

        let out = construct_types(2, 3, [0, 1, 1, 1]).unwrap();
        let t = out
            .iter()
            .find(|t| t.cover.gamma.components() == [2, 5, 5, 3])
            .unwrap();
        assert_eq!((t.cover.n, t.cover.g), (11, 7));
        assert_eq!(t.two_epsilon, [2, 2, 2, 0]);

        assert!(matches!(
            construct_types(2, 0, [1, 1, 1, 1]),
            Err(InvariantsError::ParityViolation(_))
        ));
        assert!(construct_types(1, 0, [0, 1, 1, 1]).is_err());
        assert!(construct_types(2, 4, [0, 1, 1, 1]).is_err());
    }

    #[test]
    fn construction_is_sorted_and_unique() {
        let out = construct_types(3, 1, [1, 2, 0, 2]).unwrap();
        let gammas: Vec<_> = out.iter().map(|t| t.cover.gamma).collect();
        let mut sorted = gammas.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(gammas, sorted);
        assert!(!gammas.is_empty());
    }

    #[test]
    fn family_examples() {
        let spec = |family, alpha, at_half_period, j0| FamilySpec {
            family,
            alpha,
            at_half_period,
            j0,
        };
        let o = family_params(&spec(Family::NlsOdd, [0; 4], false, None)).unwrap();
        assert_eq!((o.g, o.n), (1, 1));
        let o = family_params(&spec(
            Family::SineGordonEvenSame,
            [1, 0, 1, 1],
            false,
            Some(1),
        ))
        .unwrap();
        assert_eq!((o.g, o.n), (3, 4));
        assert_eq!(o.report.get("sg.genus-square-same-even").unwrap().rhs, 12);
        let o = family_params(&spec(Family::SineGordonOddSame, [0; 4], false, None)).unwrap();
        assert_eq!((o.g, o.n), (2, 3));
        let v = o.report.get("sg.genus-square-same-odd").unwrap();
        assert_eq!((v.lhs, v.rhs), (4, 4));
        assert!(o.report.admissible());
    }

    #[test]
    fn family_preconditions() {
        let spec = |family, alpha, at_half_period, j0| FamilySpec {
            family,
            alpha,
            at_half_period,
            j0,
        };
        assert!(family_params(&spec(Family::NlsEven, [0; 4], false, None)).is_err());
        assert!(matches!(
            family_params(&spec(Family::NlsEven, [1, 0, 0, 0], false, None)),
            Err(InvariantsError::ParityViolation(_))
        ));
        assert!(family_params(&spec(Family::NlsEven, [1, 0, 0, 0], true, None)).is_ok());
        assert!(family_params(&spec(
            Family::SineGordonEvenDistinct,
            [0, 0, 1, 1],
            false,
            None
        ))
        .is_err());
        assert!(family_params(&spec(
            Family::SineGordonOddDistinct,
            [1, 0, 0, 0],
            false,
            None
        ))
        .is_err());
        assert!(family_params(&spec(
            Family::SineGordonEvenSame,
            [1, 0, 0, 0],
            false,
            Some(0)
        ))
        .is_err());
        assert!(family_params(&spec(
            Family::SineGordonEvenSame,
            [1, 0, 0, 0],
            false,
            Some(1)
        ))
        .is_err());
    }

    #[test]
    fn parsing() {
        assert_eq!("2,1,1,1".parse::<TypeVector>().unwrap(), tv([2, 1, 1, 1]));
        assert_eq!(
            "(0, 5, 5, 5)".parse::<TypeVector>().unwrap(),
            tv([0, 5, 5, 5])
        );
        assert!("1,2,3".parse::<TypeVector>().is_err());
        assert!("1,2,3,-1".parse::<TypeVector>().is_err());
        assert_eq!(
            "6.17".parse::<Family>().unwrap(),
            Family::SineGordonEvenSame
        );
        assert_eq!(
            "sg-odd-same".parse::<Family>().unwrap(),
            Family::SineGordonOddSame
        );
    }
}
