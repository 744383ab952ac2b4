use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::congruence::{inertia, Inertia};
use super::matrix::RationalMatrix;
use super::rational::{dot, serde_rat, Rational, RatVec};
use crate::error::{Error, Result};
use crate::qlattice::QuadLattice;

/// A rational subspace of `Q^n`, stored by its reduced row-echelon basis.
/// Two subspaces are equal iff their bases are identical.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: RationalMatrix,
}

impl Subspace {
    /// Row space of `vectors`.
    pub fn span(vectors: &RationalMatrix) -> Self {
        let (basis, _) = vectors.rref();
        Self {
            ambient: vectors.ncols(),
            basis,
        }
    }

    pub fn from_vectors(ambient: usize, vectors: &[RatVec]) -> Result<Self> {
        Ok(Self::span(&RationalMatrix::from_rows(ambient, vectors)?))
    }

    pub fn zero(ambient: usize) -> Self {
        Self {
            ambient,
            basis: RationalMatrix::zeros(0, ambient),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Self {
            ambient,
            basis: RationalMatrix::identity(ambient),
        }
    }

    pub fn line(v: &[Rational]) -> Self {
        Self::span(&RationalMatrix::from_rows(v.len(), &[v.to_vec()]).expect("row length"))
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &RationalMatrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<RatVec> {
        self.basis.rows_vec()
    }

    fn check_ambient(&self, n: usize) -> Result<()> {
        if self.ambient != n {
            return Err(Error::DimensionMismatch {
                expected: self.ambient,
                found: n,
            });
        }
        Ok(())
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other.ambient)?;
        if self.dim() == 0 || other.dim() == 0 {
            return Ok(Self::zero(self.ambient));
        }
        // alpha * A = beta * B  <=>  [alpha | beta] * [A; -B] = 0
        let stacked = self.basis.vstack(&other.basis.scaled(&(-Rational::from_integer(1.into()))));
        let coeffs = stacked.transpose().kernel();
        let k = self.dim();
        let mut vectors = Vec::with_capacity(coeffs.nrows());
        for r in 0..coeffs.nrows() {
            let alpha = &coeffs.row(r)[..k];
            let v: RatVec = (0..self.ambient)
                .map(|j| (0..k).map(|i| &alpha[i] * &self.basis[(i, j)]).sum())
                .collect();
            vectors.push(v);
        }
        Self::from_vectors(self.ambient, &vectors)
    }

    /// Sum `self + other`.
    pub fn join(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other.ambient)?;
        Ok(Self::span(&self.basis.vstack(&other.basis)))
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        if v.len() != self.ambient {
            return false;
        }
        let extra = RationalMatrix::from_rows(self.ambient, &[v.to_vec()]).expect("row length");
        self.basis.vstack(&extra).rank() == self.dim()
    }

    pub fn is_subspace_of(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.basis_vectors().iter().all(|v| other.contains(v))
    }

    /// Orthogonal complement `{x : x^T G a = 0 for all a in self}`.
    pub fn perp(&self, l: &QuadLattice) -> Result<Self> {
        self.check_ambient(l.rank())?;
        if self.dim() == 0 {
            return Ok(Self::full(self.ambient));
        }
        let constraints = &self.basis * l.gram_q();
        Ok(Self::span(&constraints.kernel()))
    }

    /// Gram matrix of the form restricted to this subspace's basis.
    pub fn restricted_gram(&self, l: &QuadLattice) -> Result<RationalMatrix> {
        self.check_ambient(l.rank())?;
        Ok(&(&self.basis * l.gram_q()) * &self.basis.transpose())
    }

    /// Inertia of the form restricted to this subspace.
    pub fn restricted_definiteness(&self, l: &QuadLattice) -> Result<Inertia> {
        Ok(inertia(&self.restricted_gram(l)?))
    }

    pub fn is_positive_definite(&self, l: &QuadLattice) -> Result<bool> {
        Ok(self.restricted_definiteness(l)? == Inertia::new(self.dim(), 0, 0))
    }

    /// Image under the linear map `g` (acting on column vectors).
    pub fn image(&self, g: &RationalMatrix) -> Result<Self> {
        self.check_ambient(g.ncols())?;
        Ok(Self::span(&(&self.basis * &g.transpose())))
    }

    /// True iff every basis vector pairs to zero with every basis vector of
    /// `other` under the form.
    pub fn is_orthogonal_to(&self, other: &Self, l: &QuadLattice) -> Result<bool> {
        self.check_ambient(other.ambient)?;
        self.check_ambient(l.rank())?;
        let g = l.gram_q();
        Ok(self.basis_vectors().iter().all(|a| {
            let ga = g.apply(a).expect("gram shape");
            other.basis_vectors().iter().all(|b| dot(&ga, b) == Rational::from_integer(0.into()))
        }))
    }
}

impl std::fmt::Debug for Subspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Subspace(ambient={}, basis={:?})", self.ambient, self.basis)
    }
}

#[derive(Serialize, Deserialize)]
struct SubspaceWire {
    ambient: usize,
    #[serde(with = "serde_rat::rows")]
    basis: Vec<RatVec>,
}

impl Serialize for Subspace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SubspaceWire {
            ambient: self.ambient,
            basis: self.basis_vectors(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Subspace {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = SubspaceWire::deserialize(d)?;
        Subspace::from_vectors(w.ambient, &w.basis).map_err(serde::de::Error::custom)
    }
}
