//! Orientation signs in the Cartan tangent model `p ≅ M_{p×q}`.
//!
//! `K = S(O(p) × O(q))` acts on `p` by `C ↦ D C S^{-1}`. Inside `p` we use the
//! diagonal part `p1` (matrices with entries only at `(i, i)`, `i <= p`) and
//! `p2 = {C : C v = 0}` for an admissible unit vector `v`.

use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::rational::{dot, rat, serde_rat};
use crate::exactla::{Rational, RatVec, RationalMatrix};
use crate::isometry::Isometry;
use crate::qlattice::{standard_lattice, LatticeKind};

/// Unit vector `v ∈ Q^q` with `v_j != 0` for `j <= p` and `v_j = 0` for `j > p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibleV {
    pub p: usize,
    #[serde(with = "serde_rat::vec")]
    pub v: RatVec,
}

impl AdmissibleV {
    pub fn new(p: usize, q: usize, v: RatVec) -> Result<Self> {
        if p == 0 || p > q {
            return Err(Error::InadmissibleV(format!("need 1 <= p <= q, got p={p}, q={q}")));
        }
        if v.len() != q {
            return Err(Error::InadmissibleV(format!("expected length {q}, got {}", v.len())));
        }
        if let Some(j) = v[..p].iter().position(Zero::is_zero) {
            return Err(Error::InadmissibleV(format!("coordinate {} is zero", j + 1)));
        }
        if let Some(j) = v[p..].iter().position(|x| !x.is_zero()) {
            return Err(Error::InadmissibleV(format!("coordinate {} must be zero", p + j + 1)));
        }
        if !dot(&v, &v).is_one() {
            return Err(Error::InadmissibleV("squared norm is not 1".into()));
        }
        Ok(Self { p, v })
    }

    /// Inverse stereographic image of `u ∈ Q^{p-1}` on the unit sphere in
    /// `Q^p`, padded with zeros to length `q`.
    pub fn from_stereographic(p: usize, q: usize, u: &[Rational]) -> Result<Self> {
        if u.len() + 1 != p {
            return Err(Error::InadmissibleV(format!("need {} parameters, got {}", p.saturating_sub(1), u.len())));
        }
        let n2 = dot(u, u);
        let den = &n2 + Rational::one();
        let mut v: RatVec = u.iter().map(|x| Rational::from_integer(2.into()) * x / &den).collect();
        v.push((n2 - Rational::one()) / &den);
        v.resize(q, Rational::zero());
        Self::new(p, q, v)
    }

    /// Rejection sampling over stereographic images of small rationals.
    pub fn random<R: Rng>(p: usize, q: usize, rng: &mut R) -> Result<Self> {
        loop {
            let u: RatVec = (1..p).map(|_| rat(rng.gen_range(-9..=9), rng.gen_range(1..=9))).collect();
            match Self::from_stereographic(p, q, &u) {
                Ok(v) => return Ok(v),
                Err(Error::InadmissibleV(msg)) if msg.contains("is zero") => continue,
                Err(e) => return Err(e),
            }
        }
    }

    pub fn q(&self) -> usize {
        self.v.len()
    }

    fn check(&self, p: usize, q: usize) -> Result<()> {
        if self.p != p || self.q() != q {
            return Err(Error::InadmissibleV(format!(
                "vector is for (p, q) = ({}, {}), not ({p}, {q})",
                self.p,
                self.q()
            )));
        }
        Ok(())
    }
}

/// A tangent vector at the base point, as a `p × q` matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartanTangent {
    pub mat: RationalMatrix,
}

impl CartanTangent {
    pub fn new(mat: RationalMatrix) -> Self {
        Self { mat }
    }

    /// `p × q` matrix with `d_i` at `(i, i)`.
    pub fn diagonal(d: &[Rational], q: usize) -> Self {
        let mut m = RationalMatrix::zeros(d.len(), q);
        for (i, x) in d.iter().enumerate() {
            m[(i, i)] = x.clone();
        }
        Self { mat: m }
    }

    /// `C ↦ D C S^{-1}` for orthogonal `D`, `S`.
    pub fn act(&self, diamond: &RationalMatrix, star: &RationalMatrix) -> Result<Self> {
        Ok(Self { mat: diamond.try_mul(&self.mat)?.try_mul(&star.transpose())? })
    }

    fn vectorize(&self) -> RatVec {
        self.mat.entries().to_vec()
    }
}

/// `diag(1, ..., 1, -1)` on `R^p` and `I - 2 v v^T` on `R^q`.
pub fn k_blocks(p: usize, q: usize, v: &AdmissibleV) -> Result<(RationalMatrix, RationalMatrix)> {
    v.check(p, q)?;
    let mut diamond = RationalMatrix::identity(p);
    diamond[(p - 1, p - 1)] = -Rational::one();
    let mut star = RationalMatrix::identity(q);
    let two = Rational::from_integer(2.into());
    for i in 0..q {
        for j in 0..q {
            star[(i, j)] = &star[(i, j)] - &two * &v.v[i] * &v.v[j];
        }
    }
    Ok((diamond, star))
}

/// `k = R^{e_p} ∘ R^v` as a block-diagonal isometry of `B_{p,q}`.
pub fn build_k(p: usize, q: usize, v: &AdmissibleV) -> Result<Isometry> {
    let (diamond, star) = k_blocks(p, q, v)?;
    let l = standard_lattice(LatticeKind::Bpq, Some((p, q)))?;
    Isometry::from_matrix(diamond.block_diag(&star), &l)
}

/// The `p1`-component `(A_1, ..., A_p)` of `X = A + C` with `C v = 0`, i.e.
/// `A_i = (X v)_i / v_i`.
pub fn project_p1(x: &CartanTangent, v: &AdmissibleV) -> Result<RatVec> {
    let (p, q) = (x.mat.nrows(), x.mat.ncols());
    if p != v.p || q != v.q() {
        return Err(Error::DimensionMismatch { expected: v.p * v.q(), found: p * q });
    }
    let xv = x.mat.apply(&v.v)?;
    let a: RatVec = xv.iter().zip(&v.v).map(|(num, vi)| num / vi).collect();
    let residual = x.mat.sub(&CartanTangent::diagonal(&a, q).mat).apply(&v.v)?;
    debug_assert!(residual.iter().all(Zero::is_zero));
    Ok(a)
}

/// Matrix of `d ↦ project_p1(k · diag(d))` on `p1`; column `i` is the image of `E_ii`.
pub fn pi_k_matrix(p: usize, q: usize, v: &AdmissibleV) -> Result<RationalMatrix> {
    let (diamond, star) = k_blocks(p, q, v)?;
    projection_matrix(&diamond, &star, v)
}

fn projection_matrix(diamond: &RationalMatrix, star: &RationalMatrix, v: &AdmissibleV) -> Result<RationalMatrix> {
    let (p, q) = (v.p, v.q());
    let mut out = RationalMatrix::zeros(p, p);
    for i in 0..p {
        let mut d = vec![Rational::zero(); p];
        d[i] = Rational::one();
        let a = project_p1(&CartanTangent::diagonal(&d, q).act(diamond, star)?, v)?;
        for (j, aj) in a.into_iter().enumerate() {
            out[(j, i)] = aj;
        }
    }
    Ok(out)
}

/// Basis of `p2` as `pq`-vectors (row-major), oriented so that the standard
/// `p1` basis followed by it has positive determinant.
pub fn p2_basis(v: &AdmissibleV) -> Vec<RatVec> {
    let (p, q) = (v.p, v.q());
    // rows of the map vec(C) ↦ C v
    let mut eq = RationalMatrix::zeros(p, p * q);
    for i in 0..p {
        for j in 0..q {
            eq[(i, i * q + j)] = v.v[j].clone();
        }
    }
    let mut basis = eq.kernel().rows_vec();
    if !basis.is_empty() && wedge_det(&p1_basis(p, q), &basis).is_negative() {
        basis[0] = basis[0].iter().map(|x| -x).collect();
    }
    basis
}

fn p1_basis(p: usize, q: usize) -> Vec<RatVec> {
    (0..p)
        .map(|i| {
            let mut e = vec![Rational::zero(); p * q];
            e[i * q + i] = Rational::one();
            e
        })
        .collect()
}

fn wedge_det(first: &[RatVec], rest: &[RatVec]) -> Rational {
    let cols: Vec<RatVec> = first.iter().chain(rest).cloned().collect();
    let n = cols.len();
    RationalMatrix::from_rows(n, &cols)
        .and_then(|m| m.transpose().determinant())
        .expect("square by construction")
}

fn is_orthogonal(m: &RationalMatrix) -> bool {
    m.is_square() && (&m.transpose() * m).is_identity()
}

/// Sign of `det[k(E_11) … k(E_pp) | p2 basis]` for `k = (diamond, star)`.
pub fn epsilon_general(diamond: &RationalMatrix, star: &RationalMatrix, v: &AdmissibleV) -> Result<i32> {
    let (p, q) = (v.p, v.q());
    if diamond.nrows() != p || star.nrows() != q || !is_orthogonal(diamond) || !is_orthogonal(star) {
        return Err(Error::NotOrthogonalPair);
    }
    if diamond.determinant()? * star.determinant()? != Rational::one() {
        return Err(Error::NotOrthogonalPair);
    }
    let images = (0..p)
        .map(|i| {
            let mut d = vec![Rational::zero(); p];
            d[i] = Rational::one();
            CartanTangent::diagonal(&d, q).act(diamond, star).map(|c| c.vectorize())
        })
        .collect::<Result<Vec<_>>>()?;
    let det = wedge_det(&images, &p2_basis(v));
    Ok(if det.is_zero() { 0 } else if det.is_positive() { 1 } else { -1 })
}

/// Summary used by the CLI: the matrix, its determinant and whether it equals
/// `(-1)^{p-1}`.
#[derive(Debug, Clone)]
pub struct SignReport {
    pub matrix: RationalMatrix,
    pub det: Rational,
    pub claim_holds: bool,
}

pub fn sign_report(p: usize, q: usize, v: &AdmissibleV) -> Result<SignReport> {
    let matrix = pi_k_matrix(p, q, v)?;
    let det = matrix.determinant()?;
    let expected = if p % 2 == 1 { Rational::one() } else { -Rational::one() };
    let mut diag = vec![-Rational::one(); p];
    diag[p - 1] = Rational::one();
    let claim_holds = det == expected && matrix == RationalMatrix::diagonal(&diag);
    Ok(SignReport { matrix, det, claim_holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::rational::int;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn av(p: usize, q: usize, v: &[(i64, i64)]) -> AdmissibleV {
        AdmissibleV::new(p, q, v.iter().map(|&(n, d)| rat(n, d)).collect()).unwrap()
    }

    fn diag(d: &[i64]) -> RationalMatrix {
        RationalMatrix::diagonal(&d.iter().map(|&x| int(x)).collect::<Vec<_>>())
    }

    #[test]
    fn build_k_examples() {
        let k = build_k(2, 2, &av(2, 2, &[(3, 5), (4, 5)])).unwrap();
        let m = k.matrix();
        assert_eq!(m[(0, 0)], int(1));
        assert_eq!(m[(1, 1)], int(-1));
        assert_eq!((m[(2, 2)].clone(), m[(2, 3)].clone()), (rat(7, 25), rat(-24, 25)));
        assert_eq!((m[(3, 2)].clone(), m[(3, 3)].clone()), (rat(-24, 25), rat(-7, 25)));
        let k = build_k(1, 2, &av(1, 2, &[(1, 1), (0, 1)])).unwrap();
        assert_eq!(*k.matrix(), diag(&[-1, -1, 1]));
        assert!(AdmissibleV::new(2, 2, vec![int(1), int(0)]).is_err());
        assert!(AdmissibleV::new(1, 2, vec![int(0), int(1)]).is_err());
        assert!(AdmissibleV::new(2, 2, vec![int(1), int(1)]).is_err());
    }

    #[test]
    fn project_examples() {
        let v = av(2, 2, &[(3, 5), (4, 5)]);
        let (diamond, star) = k_blocks(2, 2, &v).unwrap();
        let x = CartanTangent::diagonal(&[int(1), int(0)], 2).act(&diamond, &star).unwrap();
        assert_eq!(project_p1(&x, &v).unwrap(), vec![int(-1), int(0)]);
        // a p2 element: rows orthogonal to v
        let c = RationalMatrix::from_rows(2, &[vec![int(4), int(-3)], vec![int(-8), int(6)]]).unwrap();
        assert_eq!(project_p1(&CartanTangent::new(c), &v).unwrap(), vec![int(0), int(0)]);
        let zero = CartanTangent::new(RationalMatrix::zeros(2, 2));
        assert_eq!(project_p1(&zero, &v).unwrap(), vec![int(0), int(0)]);
    }

    #[test]
    fn pi_k_examples() {
        let m = pi_k_matrix(2, 2, &av(2, 2, &[(3, 5), (4, 5)])).unwrap();
        assert_eq!(m, diag(&[-1, 1]));
        assert_eq!(m.determinant().unwrap(), int(-1));
        let m = pi_k_matrix(3, 3, &av(3, 3, &[(1, 3), (2, 3), (2, 3)])).unwrap();
        assert_eq!(m, diag(&[-1, -1, 1]));
        assert_eq!(m.determinant().unwrap(), int(1));
        let m = pi_k_matrix(1, 2, &av(1, 2, &[(1, 1), (0, 1)])).unwrap();
        assert_eq!(m, diag(&[1]));
        assert!(sign_report(3, 3, &av(3, 3, &[(1, 3), (2, 3), (2, 3)])).unwrap().claim_holds);
    }

    #[test]
    fn stereographic_points() {
        let v = AdmissibleV::from_stereographic(2, 3, &[rat(1, 2)]).unwrap();
        assert_eq!(v.v, vec![rat(4, 5), rat(-3, 5), int(0)]);
        let v = AdmissibleV::from_stereographic(1, 1, &[]).unwrap();
        assert_eq!(v.v, vec![int(-1)]);
        assert!(AdmissibleV::from_stereographic(2, 2, &[int(1)]).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let v = AdmissibleV::random(4, 5, &mut rng).unwrap();
            assert_eq!(dot(&v.v, &v.v), int(1));
        }
    }

    #[test]
    fn epsilon_examples() {
        let v = av(3, 4, &[(1, 3), (2, 3), (2, 3), (0, 1)]);
        assert_eq!(epsilon_general(&RationalMatrix::identity(3), &RationalMatrix::identity(4), &v).unwrap(), 1);
        let (d, s) = k_blocks(3, 4, &v).unwrap();
        assert_eq!(epsilon_general(&d, &s, &v).unwrap(), 1);
        let v2 = av(2, 2, &[(3, 5), (4, 5)]);
        let (d, s) = k_blocks(2, 2, &v2).unwrap();
        assert_eq!(epsilon_general(&d, &s, &v2).unwrap(), -1);
        // det product -1 is outside S(O(p) x O(q))
        assert!(matches!(
            epsilon_general(&diag(&[1, -1]), &RationalMatrix::identity(2), &v2),
            Err(Error::NotOrthogonalPair)
        ));
        assert!(epsilon_general(&diag(&[2, 1]), &diag(&[1, 1]), &v2).is_err());
    }

    #[test]
    fn epsilon_degenerate_and_swap() {
        let v = av(2, 2, &[(3, 5), (4, 5)]);
        // first column of the rotation is orthogonal to v, so E_11 lands in p2
        let rot = RationalMatrix::from_rows(2, &[vec![rat(4, 5), rat(3, 5)], vec![rat(-3, 5), rat(4, 5)]]).unwrap();
        assert_eq!(epsilon_general(&RationalMatrix::identity(2), &rot, &v).unwrap(), 0);
        let swap = RationalMatrix::from_i64_rows(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(epsilon_general(&swap, &swap, &v).unwrap(), -1);
    }
}
