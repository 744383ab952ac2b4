//! The symmetric space of `SO(p,q)` as the Grassmannian of positive definite
//! `p`-planes, with flats (`V = U_1 + ... + U_p + N`) and hyperplanes
//! (`V = P + L`, `L` a negative line) inside it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::rational::{is_zero_vec, serde_rat, unit_vec};
use crate::exactla::{Inertia, Rational, RatVec, RationalMatrix, Subspace};
use crate::isometry::Isometry;
use crate::qlattice::{LatticeRef, QuadLattice};

/// A positive definite `p`-plane.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrPoint {
    plane: Subspace,
}

impl GrPoint {
    pub fn new(plane: Subspace, l: &QuadLattice) -> Result<Self> {
        if !plane.is_positive_definite(l)? {
            return Err(Error::NotPositivePlane(plane.dim()));
        }
        Ok(Self { plane })
    }

    pub fn plane(&self) -> &Subspace {
        &self.plane
    }

    pub fn dim(&self) -> usize {
        self.plane.dim()
    }
}

impl Serialize for GrPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.plane.serialize(s)
    }
}

/// A decomposition `V = U_1 + ... + U_p + N` into pairwise orthogonal
/// hyperbolic planes `U_i` and a negative definite remainder `N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flat {
    lattice: QuadLattice,
    u: Vec<Subspace>,
    n: Subspace,
}

impl Flat {
    pub fn new(u_bases: &[RationalMatrix], n_basis: &RationalMatrix, l: &QuadLattice) -> Result<Self> {
        let u: Vec<Subspace> = u_bases.iter().map(Subspace::span).collect();
        Self::from_subspaces(u, Subspace::span(n_basis), l)
    }

    pub fn from_subspaces(u: Vec<Subspace>, n: Subspace, l: &QuadLattice) -> Result<Self> {
        if u.is_empty() {
            return Err(Error::NoBlocks);
        }
        let rank = l.rank();
        for (i, ui) in u.iter().enumerate() {
            let found = ui.restricted_definiteness(l)?;
            if found != Inertia::new(1, 1, 0) {
                return Err(Error::WrongInertia {
                    component: format!("U_{}", i + 1),
                    expected: (1, 1, 0),
                    found: found.as_tuple(),
                });
            }
        }
        let found = n.restricted_definiteness(l)?;
        if found != Inertia::new(0, n.dim(), 0) {
            return Err(Error::WrongInertia {
                component: "N".into(),
                expected: (0, n.dim(), 0),
                found: found.as_tuple(),
            });
        }
        let parts: Vec<&Subspace> = u.iter().chain(std::iter::once(&n)).collect();
        for a in 0..parts.len() {
            for b in a + 1..parts.len() {
                if !parts[a].is_orthogonal_to(parts[b], l)? {
                    return Err(Error::NotOrthogonal(a + 1, b + 1));
                }
            }
        }
        let total = parts
            .iter()
            .try_fold(Subspace::zero(rank), |acc, s| acc.join(s))?;
        if total.dim() != rank || parts.iter().map(|s| s.dim()).sum::<usize>() != rank {
            return Err(Error::NotSpanning);
        }
        Ok(Self { lattice: l.clone(), u, n })
    }

    /// `<e_1,f_1> + ... + <e_p,f_p> + <f_{p+1},...,f_q>` in `B_{p,q}` coordinates
    /// (`e_i` is coordinate `i-1`, `f_j` is coordinate `p+j-1`).
    pub fn standard(p: usize, q: usize, l: &QuadLattice) -> Result<Self> {
        if p == 0 || p > q || l.rank() != p + q {
            return Err(Error::InvalidArrangement(format!("standard flat needs 1 <= p <= q, got ({p},{q})")));
        }
        let n = p + q;
        let u = (0..p)
            .map(|i| Subspace::from_vectors(n, &[unit_vec(n, i), unit_vec(n, p + i)]))
            .collect::<Result<Vec<_>>>()?;
        let nvecs: Vec<RatVec> = (2 * p..n).map(|j| unit_vec(n, j)).collect();
        Self::from_subspaces(u, Subspace::from_vectors(n, &nvecs)?, l)
    }

    pub fn lattice(&self) -> &QuadLattice {
        &self.lattice
    }

    pub fn blocks(&self) -> &[Subspace] {
        &self.u
    }

    pub fn remainder(&self) -> &Subspace {
        &self.n
    }

    pub fn p(&self) -> usize {
        self.u.len()
    }

    /// Coordinates of `v` split along the decomposition: one vector per `U_i`
    /// followed by the `N` component.
    pub fn components(&self, v: &[Rational]) -> Result<Vec<RatVec>> {
        let parts: Vec<&Subspace> = self.u.iter().chain(std::iter::once(&self.n)).collect();
        let mut basis = RationalMatrix::zeros(0, self.lattice.rank());
        for s in &parts {
            basis = basis.vstack(s.basis());
        }
        // v = c^T basis  <=>  basis^T c = v
        let coeffs = basis.transpose().inverse()?.apply(v)?;
        let mut offset = 0;
        Ok(parts
            .iter()
            .map(|s| {
                let mut out = vec![Rational::from_integer(0.into()); self.lattice.rank()];
                for k in 0..s.dim() {
                    for (j, x) in s.basis().row(k).iter().enumerate() {
                        out[j] += &coeffs[offset + k] * x;
                    }
                }
                offset += s.dim();
                out
            })
            .collect())
    }
}

/// A negative vector `lambda` with `L = <lambda>` and `P = lambda^perp`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hyperplane {
    lattice: QuadLattice,
    lambda: RatVec,
    l: Subspace,
    p: Subspace,
}

impl Hyperplane {
    pub fn new(lambda: RatVec, l: &QuadLattice) -> Result<Self> {
        if lambda.len() != l.rank() {
            return Err(Error::DimensionMismatch { expected: l.rank(), found: lambda.len() });
        }
        if is_zero_vec(&lambda) {
            return Err(Error::ZeroVector);
        }
        if l.norm(&lambda)? >= Rational::from_integer(0.into()) {
            return Err(Error::NonNegativeVector);
        }
        let line = Subspace::line(&lambda);
        let p = line.perp(l)?;
        Ok(Self { lattice: l.clone(), lambda, l: line, p })
    }

    pub fn lattice(&self) -> &QuadLattice {
        &self.lattice
    }

    pub fn lambda(&self) -> &[Rational] {
        &self.lambda
    }

    pub fn normal_line(&self) -> &Subspace {
        &self.l
    }

    pub fn plane(&self) -> &Subspace {
        &self.p
    }

    /// Whether a Grassmannian point lies on this hyperplane (`V' ⊂ P`).
    pub fn contains(&self, x: &GrPoint) -> bool {
        x.plane().is_subspace_of(&self.p)
    }
}

/// How the clause `N^perp ∩ L = {0}` of general position is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NClause {
    /// Evaluate as stated; with `N = 0` it always fails.
    Enforce,
    /// Skip only when `dim N = 0`.
    #[default]
    SkipIfTrivial,
    /// Never evaluate; only the dimension conditions `dim P∩U_i = 1` are used.
    Skip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneralPosition {
    Weak,
    Strong,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DegenerateReason {
    /// `dim P ∩ U_i != 1` (index is 1-based).
    DimNotOne(usize),
    NClauseFails,
}

impl std::fmt::Display for DegenerateReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DegenerateReason::DimNotOne(i) => write!(f, "DimNotOne({i})"),
            DegenerateReason::NClauseFails => write!(f, "NClauseFails"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IntersectionVerdict {
    Empty,
    Point(GrPoint),
    Degenerate(DegenerateReason),
}

impl IntersectionVerdict {
    pub fn tag(&self) -> VerdictTag {
        match self {
            IntersectionVerdict::Empty => VerdictTag::Empty,
            IntersectionVerdict::Point(_) => VerdictTag::Point,
            IntersectionVerdict::Degenerate(_) => VerdictTag::Degenerate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VerdictTag {
    Empty,
    Point,
    Degenerate,
}

impl VerdictTag {
    /// Single-letter CSV cell.
    pub fn letter(&self) -> char {
        match self {
            VerdictTag::Empty => 'E',
            VerdictTag::Point => 'P',
            VerdictTag::Degenerate => 'D',
        }
    }
}

impl Serialize for IntersectionVerdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            tag: VerdictTag,
            #[serde(skip_serializing_if = "Option::is_none")]
            point: Option<&'a Subspace>,
            #[serde(skip_serializing_if = "Option::is_none")]
            reason: Option<String>,
        }
        let (point, reason) = match self {
            IntersectionVerdict::Point(x) => (Some(x.plane()), None),
            IntersectionVerdict::Degenerate(r) => (None, Some(r.to_string())),
            IntersectionVerdict::Empty => (None, None),
        };
        Wire { tag: self.tag(), point, reason }.serialize(s)
    }
}

fn check_same(f: &Flat, h: &Hyperplane) -> Result<()> {
    if f.lattice != h.lattice {
        return Err(Error::LatticeMismatch);
    }
    Ok(())
}

fn n_clause_holds(f: &Flat, h: &Hyperplane, policy: NClause) -> Result<bool> {
    match policy {
        NClause::Skip => return Ok(true),
        NClause::SkipIfTrivial if f.n.dim() == 0 => return Ok(true),
        _ => {}
    }
    Ok(f.n.perp(&f.lattice)?.intersect(&h.l)?.dim() == 0)
}

/// The lines `P ∩ U_i`, in block order.
pub fn block_intersections(f: &Flat, h: &Hyperplane) -> Result<Vec<Subspace>> {
    check_same(f, h)?;
    f.u.iter().map(|ui| h.p.intersect(ui)).collect()
}

pub fn general_position(f: &Flat, h: &Hyperplane, mode: GeneralPosition, policy: NClause) -> Result<bool> {
    let lines = block_intersections(f, h)?;
    if lines.iter().any(|x| x.dim() != 1) || !n_clause_holds(f, h, policy)? {
        return Ok(false);
    }
    if mode == GeneralPosition::Strong {
        for x in &lines {
            if !x.is_positive_definite(&f.lattice)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Decides whether the flat and hyperplane meet in the Grassmannian. When
/// every `P ∩ U_i` is a line, they meet iff all lines are positive, and then
/// the unique common point is the sum of those lines.
pub fn intersect_flat_hyperplane(f: &Flat, h: &Hyperplane, policy: NClause) -> Result<IntersectionVerdict> {
    let lines = block_intersections(f, h)?;
    if let Some(i) = lines.iter().position(|x| x.dim() != 1) {
        return Ok(IntersectionVerdict::Degenerate(DegenerateReason::DimNotOne(i + 1)));
    }
    if !n_clause_holds(f, h, policy)? {
        return Ok(IntersectionVerdict::Degenerate(DegenerateReason::NClauseFails));
    }
    for x in &lines {
        if !x.is_positive_definite(&f.lattice)? {
            return Ok(IntersectionVerdict::Empty);
        }
    }
    let plane = lines
        .iter()
        .try_fold(Subspace::zero(f.lattice.rank()), |acc, x| acc.join(x))?;
    let point = GrPoint::new(plane, &f.lattice)?;
    debug_assert!(h.contains(&point));
    Ok(IntersectionVerdict::Point(point))
}

/// Sign patterns `s` for which the element acting by `s_i` on `U_i` and by
/// the identity on `N` maps `lambda` into `L`. All-plus comes first.
pub fn stabilizer_sign_patterns(f: &Flat, h: &Hyperplane, policy: NClause) -> Result<Vec<Vec<i8>>> {
    if !general_position(f, h, GeneralPosition::Weak, policy)? {
        return Err(Error::NotInGeneralPosition);
    }
    sign_patterns_fixing(f, h)
}

/// The enumeration behind [`stabilizer_sign_patterns`] without the general
/// position precondition, for probing degenerate pairs.
pub fn sign_patterns_fixing(f: &Flat, h: &Hyperplane) -> Result<Vec<Vec<i8>>> {
    check_same(f, h)?;
    let comps = f.components(&h.lambda)?;
    let p = f.p();
    let n = f.lattice.rank();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << p) {
        let signs: Vec<i8> = (0..p).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
        let mut image = comps[p].clone();
        for (i, s) in signs.iter().enumerate() {
            for j in 0..n {
                if *s > 0 {
                    image[j] += &comps[i][j];
                } else {
                    image[j] -= &comps[i][j];
                }
            }
        }
        if h.l.contains(&image) {
            out.push(signs);
        }
    }
    Ok(out)
}

/// Objects that an isometry moves around.
pub trait Translate: Sized {
    fn translate(&self, g: &Isometry) -> Result<Self>;
}

fn check_lattice(g: &Isometry, l: &QuadLattice) -> Result<()> {
    if g.lattice() != l {
        return Err(Error::LatticeMismatch);
    }
    Ok(())
}

impl Translate for Flat {
    fn translate(&self, g: &Isometry) -> Result<Self> {
        check_lattice(g, &self.lattice)?;
        let u = self.u.iter().map(|s| s.image(g.matrix())).collect::<Result<Vec<_>>>()?;
        let n = self.n.image(g.matrix())?;
        Ok(Flat { lattice: self.lattice.clone(), u, n })
    }
}

impl Translate for Hyperplane {
    fn translate(&self, g: &Isometry) -> Result<Self> {
        check_lattice(g, &self.lattice)?;
        Ok(Hyperplane {
            lattice: self.lattice.clone(),
            lambda: g.apply(&self.lambda)?,
            l: self.l.image(g.matrix())?,
            p: self.p.image(g.matrix())?,
        })
    }
}

impl Translate for GrPoint {
    fn translate(&self, g: &Isometry) -> Result<Self> {
        Ok(GrPoint { plane: self.plane.image(g.matrix())? })
    }
}

pub fn translate<T: Translate>(g: &Isometry, obj: &T) -> Result<T> {
    obj.translate(g)
}

#[derive(Serialize, Deserialize)]
struct FlatWire {
    lattice: LatticeRef,
    #[serde(rename = "U")]
    u: Vec<Subspace>,
    #[serde(rename = "N")]
    n: Subspace,
}

impl Serialize for Flat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FlatWire { lattice: LatticeRef::of(&self.lattice), u: self.u.clone(), n: self.n.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Flat {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = FlatWire::deserialize(d)?;
        let l = w.lattice.build().map_err(D::Error::custom)?;
        Flat::from_subspaces(w.u, w.n, &l).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct HyperplaneWire {
    lattice: LatticeRef,
    #[serde(with = "serde_rat::vec")]
    lambda: RatVec,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    l: Option<Subspace>,
    #[serde(rename = "P", default, skip_serializing_if = "Option::is_none")]
    p: Option<Subspace>,
}

impl Serialize for Hyperplane {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        HyperplaneWire {
            lattice: LatticeRef::of(&self.lattice),
            lambda: self.lambda.clone(),
            l: Some(self.l.clone()),
            p: Some(self.p.clone()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Hyperplane {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = HyperplaneWire::deserialize(d)?;
        let l = w.lattice.build().map_err(D::Error::custom)?;
        let h = Hyperplane::new(w.lambda, &l).map_err(D::Error::custom)?;
        if w.l.is_some_and(|x| x != h.l) || w.p.is_some_and(|x| x != h.p) {
            return Err(D::Error::custom("L/P disagree with lambda"));
        }
        Ok(h)
    }
}
