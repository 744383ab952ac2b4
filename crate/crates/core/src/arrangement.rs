//! Families of rotated flats `F_k = r^k(F_0)` and hyperplanes
//! `H_l = r^l(H_0)` in `B_{p,q}`, built from a rational boost and a rational
//! rotation, together with their intersection matrix.
//!
//! Angles never appear: a rotation is a rational point `(c, s)` on the unit
//! circle, so `tan(k theta) = s_k / c_k` is an exact rational.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::rational::{format_rational, int, rat, serde_rat};
use crate::exactla::{Rational, RatVec, RationalMatrix};
use crate::grassmann::{intersect_flat_hyperplane, Flat, Hyperplane, IntersectionVerdict, NClause, Translate, VerdictTag};
use crate::isometry::Isometry;
use crate::qlattice::{standard_lattice, LatticeKind, QuadLattice};

/// Coefficients of `phi(e_1) = a e_1 + b f_1` for a boost `phi` of `<e_1, f_1>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoostParams {
    #[serde(with = "serde_rat")]
    pub a: Rational,
    #[serde(with = "serde_rat")]
    pub b: Rational,
}

impl BoostParams {
    /// Requires `a^2 - b^2 = 1` and `a > b >= 0` (`b = 0` is the identity).
    pub fn new(a: Rational, b: Rational) -> Result<Self> {
        let out = Self { a, b };
        out.validate()?;
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        if &self.a * &self.a - &self.b * &self.b != Rational::one() || self.b.is_negative() || self.a <= self.b {
            return Err(Error::InvalidBoost);
        }
        Ok(())
    }

    /// The default boost `(5/4, 3/4)`, with eigenvalues 2 and 1/2.
    pub fn standard() -> Self {
        Self { a: rat(5, 4), b: rat(3, 4) }
    }
}

/// `(a_m, b_m)` for `phi^m`, via `a_m +- b_m = (a +- b)^m`.
pub fn boost_power(base: &BoostParams, m: u32) -> BoostParams {
    let up = pow(&(&base.a + &base.b), m);
    let down = pow(&(&base.a - &base.b), m);
    let half = rat(1, 2);
    let out = BoostParams { a: (&up + &down) * &half, b: (&up - &down) * &half };
    debug_assert!(out.validate().is_ok());
    out
}

fn pow(x: &Rational, m: u32) -> Rational {
    num_traits::pow(x.clone(), m as usize)
}

/// A rational point `(cos, sin)` on the unit circle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RotationPair {
    #[serde(with = "serde_rat")]
    pub c: Rational,
    #[serde(with = "serde_rat")]
    pub s: Rational,
}

impl RotationPair {
    /// A base rotation: `c^2 + s^2 = 1` and `s < 0` (clockwise, small angle).
    pub fn new(c: Rational, s: Rational) -> Result<Self> {
        let out = Self { c, s };
        out.validate()?;
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.on_circle() || !self.s.is_negative() {
            return Err(Error::InvalidRotation);
        }
        Ok(())
    }

    pub fn on_circle(&self) -> bool {
        &self.c * &self.c + &self.s * &self.s == Rational::one()
    }

    /// `((1 - t^2)/(1 + t^2), -2t/(1 + t^2))`, the half-angle parametrization.
    pub fn from_t(t: &Rational) -> Result<Self> {
        let t2 = t * t;
        let den = Rational::one() + &t2;
        Self::new((Rational::one() - &t2) / &den, -(int(2) * t) / den)
    }

    pub fn identity() -> Self {
        Self { c: Rational::one(), s: Rational::zero() }
    }

    /// Composition of rotations (angle addition).
    pub fn compose(&self, o: &RotationPair) -> RotationPair {
        RotationPair {
            c: &self.c * &o.c - &self.s * &o.s,
            s: &self.s * &o.c + &self.c * &o.s,
        }
    }

    /// `tan` of the angle, `None` at a pole (`c = 0`).
    pub fn tan(&self) -> Option<Rational> {
        (!self.c.is_zero()).then(|| &self.s / &self.c)
    }
}

/// `k`-th power of the rotation `[[c, -s], [s, c]]` by repeated squaring.
pub fn rotation_power(r: &RotationPair, k: u32) -> RotationPair {
    let mut result = RotationPair::identity();
    let mut base = r.clone();
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            result = result.compose(&base);
        }
        base = base.compose(&base);
        e >>= 1;
    }
    result
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrangementSpec {
    pub p: usize,
    pub q: usize,
    pub boost: BoostParams,
    pub m: u32,
    pub rotation: RotationPair,
    pub n: usize,
    /// Treatment of the `N^perp ∩ L = 0` clause in the intersection verdicts.
    /// `H_0`'s normal lies in `<e_1, f_1, ..., f_p>` ⊂ `N^perp`, so the
    /// clause never holds literally for this family; the default skips it.
    #[serde(default = "default_n_clause")]
    pub n_clause: NClause,
}

fn default_n_clause() -> NClause {
    NClause::Skip
}

impl ArrangementSpec {
    pub fn new(p: usize, q: usize, boost: BoostParams, m: u32, rotation: RotationPair, n: usize) -> Result<Self> {
        let spec = Self { p, q, boost, m, rotation, n, n_clause: NClause::Skip };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 2 || self.p > self.q {
            return Err(Error::InvalidArrangement(format!(
                "need 2 <= p <= q, got p={}, q={}",
                self.p, self.q
            )));
        }
        self.boost.validate()?;
        self.rotation.validate()
    }

    pub fn lattice(&self) -> QuadLattice {
        standard_lattice(LatticeKind::Bpq, Some((self.p, self.q))).expect("p, q >= 1")
    }

    pub fn boost_m(&self) -> BoostParams {
        boost_power(&self.boost, self.m)
    }

    /// `lambda = b_m e_1 + a_m f_1 + f_2 + ... + f_p`.
    pub fn lambda(&self) -> RatVec {
        let bm = self.boost_m();
        let mut v = vec![Rational::zero(); self.p + self.q];
        v[0] = bm.b;
        v[self.p] = bm.a;
        for j in 1..self.p {
            v[self.p + j] = Rational::one();
        }
        v
    }

    /// The isometry rotating `<e_1, e_2>` and `<f_1, f_2>` by `rot`.
    pub fn rotation_isometry(&self, rot: &RotationPair) -> Isometry {
        let n = self.p + self.q;
        let mut m = RationalMatrix::identity(n);
        for base in [0, self.p] {
            m[(base, base)] = rot.c.clone();
            m[(base + 1, base)] = rot.s.clone();
            m[(base, base + 1)] = -rot.s.clone();
            m[(base + 1, base + 1)] = rot.c.clone();
        }
        Isometry::from_matrix(m, &self.lattice()).expect("rotation preserves B_{p,q}")
    }
}

#[derive(Debug, Clone)]
pub struct Family {
    pub lattice: QuadLattice,
    pub flats: Vec<Flat>,
    pub hyperplanes: Vec<Hyperplane>,
}

/// `F_0` standard, `H_0` from `lambda`, and `F_k`, `H_l` for `0 <= k, l <= n`.
pub fn build_family(spec: &ArrangementSpec) -> Result<Family> {
    spec.validate()?;
    let l = spec.lattice();
    let f0 = Flat::standard(spec.p, spec.q, &l)?;
    let h0 = Hyperplane::new(spec.lambda(), &l)?;
    let rotations: Vec<Isometry> = (0..=spec.n)
        .map(|k| spec.rotation_isometry(&rotation_power(&spec.rotation, k as u32)))
        .collect();
    let flats = rotations.iter().map(|r| f0.translate(r)).collect::<Result<Vec<_>>>()?;
    let hyperplanes = rotations.iter().map(|r| h0.translate(r)).collect::<Result<Vec<_>>>()?;
    Ok(Family { lattice: l, flats, hyperplanes })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InequalityOutcome {
    Holds,
    Fails,
    /// `cos(k theta) = 0`: the tangent is undefined and the predicate is false.
    TangentPole,
}

impl InequalityOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, InequalityOutcome::Holds)
    }
}

/// `-(a_m + b_m) <= tan(k theta) <= -(a_m - b_m)`, decided exactly.
pub fn inequality_predicate(spec: &ArrangementSpec, k: u32) -> Result<InequalityOutcome> {
    if k == 0 {
        return Err(Error::InvalidArrangement("inequality is stated for k >= 1".into()));
    }
    let bm = spec.boost_m();
    Ok(inequality_at(&bm, &rotation_power(&spec.rotation, k)))
}

fn inequality_at(bm: &BoostParams, rk: &RotationPair) -> InequalityOutcome {
    match rk.tan() {
        None => InequalityOutcome::TangentPole,
        Some(t) => {
            let lower = -(&bm.a + &bm.b);
            let upper = -(&bm.a - &bm.b);
            if lower <= t && t <= upper {
                InequalityOutcome::Holds
            } else {
                InequalityOutcome::Fails
            }
        }
    }
}

/// Rows `(k, tan(k theta), lower, upper)` for `k = 1..=n`; `tan` is `"pole"`
/// where undefined.
pub fn plot_rows(spec: &ArrangementSpec) -> Vec<[String; 4]> {
    let bm = spec.boost_m();
    let lower = format_rational(&-(&bm.a + &bm.b));
    let upper = format_rational(&-(&bm.a - &bm.b));
    let mut rk = RotationPair::identity();
    (1..=spec.n)
        .map(|k| {
            rk = rk.compose(&spec.rotation);
            let tan = rk.tan().map_or_else(|| "pole".to_string(), |t| format_rational(&t));
            [k.to_string(), tan, lower.clone(), upper.clone()]
        })
        .collect()
}

/// Verdicts `entries[l][k]` for `H_l ∩ F_k`.
#[derive(Debug, Clone)]
pub struct IntersectionMatrix {
    pub entries: Vec<Vec<IntersectionVerdict>>,
    /// Diagonal all `Point` and strict upper triangle all `Empty`.
    pub lower_triangular: bool,
    /// `tag(H_l ∩ F_k) = tag(H_0 ∩ F_{k-l})` for every `k >= l`.
    pub shift_consistent: bool,
}

impl IntersectionMatrix {
    pub fn tags(&self) -> Vec<Vec<VerdictTag>> {
        self.entries.iter().map(|r| r.iter().map(IntersectionVerdict::tag).collect()).collect()
    }

    /// One line per `l`, cells from `{E, P, D}`, LF line endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.tags() {
            let cells: Vec<String> = row.iter().map(|t| t.letter().to_string()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

impl Serialize for IntersectionMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            size: usize,
            entries: &'a [Vec<IntersectionVerdict>],
            lower_triangular: bool,
            shift_consistent: bool,
        }
        Wire {
            size: self.entries.len(),
            entries: &self.entries,
            lower_triangular: self.lower_triangular,
            shift_consistent: self.shift_consistent,
        }
        .serialize(s)
    }
}

pub fn intersection_matrix(spec: &ArrangementSpec) -> Result<IntersectionMatrix> {
    let fam = build_family(spec)?;
    let size = spec.n + 1;
    let cells: Vec<IntersectionVerdict> = (0..size * size)
        .into_par_iter()
        .map(|idx| {
            let (l, k) = (idx / size, idx % size);
            intersect_flat_hyperplane(&fam.flats[k], &fam.hyperplanes[l], spec.n_clause)
        })
        .collect::<Result<Vec<_>>>()?;
    let entries: Vec<Vec<IntersectionVerdict>> = cells.chunks(size).map(<[_]>::to_vec).collect();

    let lower_triangular = (0..size).all(|l| {
        entries[l][l].tag() == VerdictTag::Point && (l + 1..size).all(|k| entries[l][k].tag() == VerdictTag::Empty)
    });
    let shift_consistent = (0..size).all(|l| (l..size).all(|k| entries[l][k].tag() == entries[0][k - l].tag()));
    Ok(IntersectionMatrix { entries, lower_triangular, shift_consistent })
}

/// Rotation parameters scanned by [`search_parameters`], in order.
pub fn t_scan() -> Vec<Rational> {
    [10, 16, 20, 32, 40, 64, 80, 128, 160, 256].iter().map(|&d| rat(1, d)).collect()
}

pub const MAX_M: u32 = 64;

/// Integer form `(C + iS) / D` of a rational point on the unit circle; powers
/// are Gaussian-integer powers, which avoids gcd reductions in long scans.
#[derive(Debug, Clone)]
struct GaussianRotation {
    c: BigInt,
    s: BigInt,
}

impl GaussianRotation {
    fn of(r: &RotationPair) -> Self {
        let den = r.c.denom().lcm(r.s.denom());
        let scale = |x: &Rational| (x * Rational::from_integer(den.clone())).to_integer();
        Self { c: scale(&r.c), s: scale(&r.s) }
    }

    fn one() -> Self {
        Self { c: BigInt::one(), s: BigInt::zero() }
    }

    fn mul(&self, o: &Self) -> Self {
        Self { c: &self.c * &o.c - &self.s * &o.s, s: &self.s * &o.c + &self.c * &o.s }
    }

    /// `lower <= s / c <= upper`, decided by cross-multiplication.
    fn tan_within(&self, lower: &Rational, upper: &Rational) -> bool {
        if self.c.is_zero() {
            return false;
        }
        let (s, c) = if self.c.is_negative() { (-&self.s, -&self.c) } else { (self.s.clone(), self.c.clone()) };
        &s * lower.denom() >= lower.numer() * &c && &s * upper.denom() <= upper.numer() * &c
    }
}

/// Smallest `m <= 64`, then the first `t` in [`t_scan`], such that the
/// inequality holds for every `k = 1..=n`.
pub fn search_parameters(p: usize, q: usize, n: usize, boost: &BoostParams) -> Result<(u32, Rational)> {
    if n == 0 {
        return Err(Error::InvalidArrangement("n must be >= 1".into()));
    }
    if p < 2 || p > q {
        return Err(Error::InvalidArrangement(format!("need 2 <= p <= q, got p={p}, q={q}")));
    }
    boost.validate()?;
    let ts = t_scan();
    let rotations: Vec<GaussianRotation> =
        ts.iter().map(|t| RotationPair::from_t(t).map(|r| GaussianRotation::of(&r))).collect::<Result<_>>()?;
    for m in 0..=MAX_M {
        let bm = boost_power(boost, m);
        let lower = -(&bm.a + &bm.b);
        let upper = -(&bm.a - &bm.b);
        for (t, w) in ts.iter().zip(&rotations) {
            let mut z = GaussianRotation::one();
            let ok = (1..=n).all(|_| {
                z = z.mul(w);
                z.tan_within(&lower, &upper)
            });
            if ok {
                return Ok((m, t.clone()));
            }
        }
    }
    Err(Error::SearchExhausted { max_m: MAX_M, t_count: ts.len() })
}

/// Convenience: a spec with searched parameters and the default boost.
pub fn auto_spec(p: usize, q: usize, n: usize) -> Result<ArrangementSpec> {
    let boost = BoostParams::standard();
    let (m, t) = search_parameters(p, q, n, &boost)?;
    ArrangementSpec::new(p, q, boost, m, RotationPair::from_t(&t)?, n)
}
