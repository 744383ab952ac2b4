//! Root vectors and orthogonality predicates on Grassmannian points.

use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::rational::{format_rational, int_vec};
use crate::exactla::{inertia, Rational, RationalMatrix, Subspace};
use crate::qlattice::QuadLattice;

/// An integer vector with `δ·δ = -2`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RootVector {
    pub coords: Vec<i64>,
}

impl RootVector {
    pub fn new(coords: Vec<i64>, l: &QuadLattice) -> Result<Self> {
        if l.eval_form(&coords, &coords)? != -2 {
            return Err(Error::NotARoot);
        }
        Ok(Self { coords })
    }

    pub fn to_rational(&self) -> Vec<Rational> {
        int_vec(&self.coords)
    }

    /// Lift from sublattice coordinates at `indices` into rank `n`.
    pub fn embed(&self, n: usize, indices: &[usize]) -> RootVector {
        let mut coords = vec![0; n];
        for (&i, &x) in indices.iter().zip(&self.coords) {
            coords[i] = x;
        }
        RootVector { coords }
    }
}

/// All roots with coordinates in `[-bound, bound]`, sorted lexicographically.
pub fn enumerate_roots(l: &QuadLattice, bound: u32) -> Vec<RootVector> {
    let n = l.rank();
    if n == 0 {
        return Vec::new();
    }
    let b = bound as i64;
    let shards: Vec<Vec<Vec<i64>>> = match Ldl::new(l) {
        Some(ldl) => (-b..=b).into_par_iter().map(|last| ldl.search(b, last)).collect(),
        None => (-b..=b).into_par_iter().map(|last| gram_search(l.gram(), b, last)).collect(),
    };
    let mut out: Vec<RootVector> = shards.into_iter().flatten().map(|coords| RootVector { coords }).collect();
    out.sort();
    out.dedup();
    out
}

/// Roots of the sublattice spanned by the coordinates in `indices`,
/// embedded back into `l`.
pub fn enumerate_roots_in(l: &QuadLattice, indices: &[usize], bound: u32) -> Result<Vec<RootVector>> {
    if let Some(&bad) = indices.iter().find(|&&i| i >= l.rank()) {
        return Err(Error::DimensionMismatch { expected: l.rank(), found: bad + 1 });
    }
    let sub = QuadLattice::new(l.sub_gram(indices))?;
    let mut out: Vec<RootVector> =
        enumerate_roots(&sub, bound).iter().map(|r| r.embed(l.rank(), indices)).collect();
    out.sort();
    Ok(out)
}

/// Exhaustive scan of the box; exponential, for cross-checking only.
pub fn enumerate_roots_naive(l: &QuadLattice, bound: u32) -> Vec<RootVector> {
    let n = l.rank();
    let b = bound as i64;
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut x = vec![-b; n];
    loop {
        if l.eval_form(&x, &x).ok() == Some(-2) {
            out.push(RootVector { coords: x.clone() });
        }
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if x[i] < b {
                x[i] += 1;
                break;
            }
            x[i] = -b;
        }
    }
}

/// `Q(x) = Σ_i d_i (x_i + Σ_{j>i} mu[i][j] x_j)^2`; exists when every leading
/// principal minor is nonzero.
struct Ldl {
    d: Vec<Rational>,
    mu: Vec<Vec<Rational>>,
}

impl Ldl {
    fn new(l: &QuadLattice) -> Option<Self> {
        let n = l.rank();
        let mut a: Vec<Vec<Rational>> = (0..n).map(|i| l.gram_q().row(i).to_vec()).collect();
        let mut d = Vec::with_capacity(n);
        let mut mu = vec![vec![Rational::zero(); n]; n];
        for i in 0..n {
            let piv = a[i][i].clone();
            if piv.is_zero() {
                return None;
            }
            for j in i + 1..n {
                mu[i][j] = &a[i][j] / &piv;
            }
            for j in i + 1..n {
                for k in i + 1..n {
                    let t = &mu[i][j] * &a[i][k];
                    a[j][k] -= t;
                }
            }
            d.push(piv);
        }
        Some(Self { d, mu })
    }

    /// Depth-first over `x_{n-1}, x_{n-2}, ..., x_0` with `x_{n-1} = last`.
    fn search(&self, b: i64, last: i64) -> Vec<Vec<i64>> {
        let n = self.d.len();
        let target = Rational::from_integer((-2).into());
        // slack[k][i]: bound on |Σ_{k<j<i} mu[k][j] x_j| + |x_k| when x_i.. are fixed
        let slack: Vec<Vec<Rational>> = (0..n)
            .map(|k| {
                (0..=n)
                    .map(|i| {
                        if i <= k {
                            return Rational::zero();
                        }
                        let s: Rational = (k + 1..i).map(|j| self.mu[k][j].abs()).sum();
                        (s + Rational::from_integer(1.into())) * Rational::from_integer(b.into())
                    })
                    .collect()
            })
            .collect();
        let mut x = vec![0i64; n];
        let mut partial = vec![Rational::zero(); n];
        let mut out = Vec::new();
        self.descend(n - 1, last, b, &target, &slack, &mut x, &mut partial, &Rational::zero(), &mut out);
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn descend(
        &self,
        i: usize,
        xi: i64,
        b: i64,
        target: &Rational,
        slack: &[Vec<Rational>],
        x: &mut Vec<i64>,
        partial: &mut Vec<Rational>,
        fixed: &Rational,
        out: &mut Vec<Vec<i64>>,
    ) {
        x[i] = xi;
        let xi_q = Rational::from_integer(xi.into());
        let saved: Vec<Rational> = partial[..i].to_vec();
        for k in 0..i {
            if !self.mu[k][i].is_zero() {
                partial[k] += &self.mu[k][i] * &xi_q;
            }
        }
        let yi = &xi_q + &partial[i];
        let fixed = fixed + &self.d[i] * &yi * &yi;

        let (mut lo, mut hi) = (Rational::zero(), Rational::zero());
        for k in 0..i {
            let s = partial[k].abs();
            let r = &slack[k][i];
            let max2 = (&s + r) * (&s + r);
            let min = if &s > r { &s - r } else { Rational::zero() };
            let min2 = &min * &min;
            if self.d[k].is_positive() {
                lo += &self.d[k] * min2;
                hi += &self.d[k] * max2;
            } else {
                lo += &self.d[k] * max2;
                hi += &self.d[k] * min2;
            }
        }
        let need = target - &fixed;
        if need >= lo && need <= hi {
            if i == 0 {
                if need.is_zero() {
                    out.push(x.clone());
                }
            } else {
                for v in -b..=b {
                    self.descend(i - 1, v, b, target, slack, x, partial, &fixed, out);
                }
            }
        }
        partial[..i].clone_from_slice(&saved);
    }
}

/// Fallback when the form has a vanishing leading minor: termwise interval
/// bounds on the Gram expansion, assigning from the last coordinate.
fn gram_search(g: &[Vec<i64>], b: i64, last: i64) -> Vec<Vec<i64>> {
    let n = g.len();
    let mut x = vec![0i64; n];
    let mut out = Vec::new();
    gram_descend(g, b, n - 1, last, &mut x, &mut out);
    out
}

fn gram_descend(g: &[Vec<i64>], b: i64, i: usize, xi: i64, x: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
    let n = g.len();
    x[i] = xi;
    let b = b as i128;
    // x[i..] assigned, x[..i] free
    let (mut fixed, mut lo, mut hi) = (0i128, 0i128, 0i128);
    for j in 0..n {
        for k in j..n {
            let c = g[j][k] as i128 * if j == k { 1 } else { 2 };
            if c == 0 {
                continue;
            }
            match (j >= i, k >= i) {
                (true, true) => fixed += c * x[j] as i128 * x[k] as i128,
                (false, false) if j == k => {
                    if c > 0 {
                        hi += c * b * b
                    } else {
                        lo += c * b * b
                    }
                }
                (false, false) => {
                    lo -= c.abs() * b * b;
                    hi += c.abs() * b * b;
                }
                _ => {
                    let a = if j >= i { x[j] } else { x[k] } as i128;
                    lo -= (c * a).abs() * b;
                    hi += (c * a).abs() * b;
                }
            }
        }
    }
    let need = -2 - fixed;
    if need < lo || need > hi {
        return;
    }
    if i == 0 {
        if need == 0 {
            out.push(x.clone());
        }
        return;
    }
    for v in -(b as i64)..=(b as i64) {
        gram_descend(g, b as i64, i - 1, v, x, out);
    }
    x[i - 1] = 0;
}

/// `u ⊆ δ^⊥`: every basis vector of `u` pairs to zero with `delta`.
pub fn plane_orthogonal_to(u: &Subspace, delta: &[Rational], l: &QuadLattice) -> Result<bool> {
    if u.ambient() != l.rank() || delta.len() != l.rank() {
        return Err(Error::DimensionMismatch { expected: l.rank(), found: u.ambient().max(delta.len()) });
    }
    for b in u.basis_vectors() {
        if !l.pair(&b, delta)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// First root in list order whose hyperplane contains `u`.
pub fn any_root_orthogonal(u: &Subspace, roots: &[RootVector], l: &QuadLattice) -> Result<Option<RootVector>> {
    for r in roots {
        if plane_orthogonal_to(u, &r.to_rational(), l)? {
            return Ok(Some(r.clone()));
        }
    }
    Ok(None)
}

/// A positive-definite symmetric rational matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InnerProduct {
    beta: RationalMatrix,
}

impl InnerProduct {
    pub fn new(beta: RationalMatrix) -> Result<Self> {
        if !beta.is_square() {
            return Err(Error::NotSquare { rows: beta.nrows(), cols: beta.ncols() });
        }
        if !beta.is_symmetric() {
            return Err(Error::NotPositiveDefinite);
        }
        let n = beta.nrows();
        if inertia(&beta).as_tuple() != (n, 0, 0) {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Self { beta })
    }

    pub fn identity(n: usize) -> Self {
        Self { beta: RationalMatrix::identity(n) }
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.beta
    }

    pub fn dim(&self) -> usize {
        self.beta.nrows()
    }

    pub fn pair(&self, x: &[Rational], y: &[Rational]) -> Result<Rational> {
        let by = self.beta.apply(y)?;
        Ok(x.iter().zip(&by).map(|(a, b)| a * b).sum())
    }

    /// `beta / det(beta)^{1/n}` in floating point, for display only.
    pub fn unit_volume_display(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let det = self.beta.determinant().ok().and_then(|d| d.to_f64()).unwrap_or(1.0);
        let scale = det.powf(1.0 / n as f64);
        (0..n)
            .map(|i| self.beta.row(i).iter().map(|x| x.to_f64().unwrap_or(f64::NAN) / scale).collect())
            .collect()
    }

    pub fn describe(&self) -> Vec<Vec<String>> {
        (0..self.dim()).map(|i| self.beta.row(i).iter().map(format_rational).collect()).collect()
    }
}

/// `basis(P)^T β basis(L) = 0` for a line `L` complementary to `P`.
pub fn beta_orthogonal(beta: &InnerProduct, p_sub: &Subspace, l_sub: &Subspace) -> Result<bool> {
    let n = beta.dim();
    if p_sub.ambient() != n || l_sub.ambient() != n {
        return Err(Error::DimensionMismatch { expected: n, found: p_sub.ambient().max(l_sub.ambient()) });
    }
    if l_sub.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: l_sub.dim() });
    }
    if p_sub.join(l_sub)?.dim() != n || p_sub.dim() + 1 != n {
        return Err(Error::NotSpanning);
    }
    let lv = &l_sub.basis_vectors()[0];
    for pv in p_sub.basis_vectors() {
        if !beta.pair(&pv, lv)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::rational::{int, unit_vec};
    use crate::qlattice::{e8_gram, k3_block, standard_lattice, LatticeKind};

    fn lat(kind: LatticeKind, pq: Option<(usize, usize)>) -> QuadLattice {
        standard_lattice(kind, pq).unwrap()
    }

    #[test]
    fn roots_small() {
        let h = lat(LatticeKind::Hyperbolic, None);
        let r = enumerate_roots(&h, 1);
        assert_eq!(r, vec![RootVector { coords: vec![-1, 1] }, RootVector { coords: vec![1, -1] }]);
        assert!(enumerate_roots(&lat(LatticeKind::Bpq, Some((1, 1))), 10).is_empty());
        let b13 = lat(LatticeKind::Bpq, Some((1, 3)));
        assert_eq!(enumerate_roots(&b13, 2), enumerate_roots_naive(&b13, 2));
    }

    #[test]
    fn roots_e8() {
        let e8 = lat(LatticeKind::E8Neg, None);
        let r = enumerate_roots(&e8, 6);
        assert_eq!(r.len(), 240);
        assert!(r.iter().all(|x| e8.eval_form(&x.coords, &x.coords).unwrap() == -2));
        let negs: Vec<RootVector> = r.iter().map(|x| RootVector { coords: x.coords.iter().map(|c| -c).collect() }).collect();
        assert!(negs.iter().all(|x| r.binary_search(x).is_ok()));
    }

    #[test]
    fn roots_k3_block() {
        let k3 = lat(LatticeKind::K3, None);
        let idx: Vec<usize> = k3_block("e8", 1).unwrap().collect();
        let r = enumerate_roots_in(&k3, &idx, 6).unwrap();
        assert_eq!(r.len(), 240);
        assert!(r.iter().all(|x| k3.eval_form(&x.coords, &x.coords).unwrap() == -2));
    }

    #[test]
    fn orthogonality_examples() {
        let b12 = lat(LatticeKind::Bpq, Some((1, 2)));
        let u = Subspace::line(&unit_vec(3, 0));
        assert!(plane_orthogonal_to(&u, &unit_vec(3, 1), &b12).unwrap());
        assert!(!plane_orthogonal_to(&u, &[int(1), int(1), int(0)], &b12).unwrap());
        assert!(plane_orthogonal_to(&u, &[int(0)], &b12).is_err());
    }

    fn k3_plane(perturb: bool) -> (QuadLattice, Subspace, Vec<RootVector>) {
        let k3 = lat(LatticeKind::K3, None);
        let e8 = k3_block("e8", 1).unwrap();
        let idx: Vec<usize> = e8.clone().collect();
        let roots = enumerate_roots_in(&k3, &idx, 6).unwrap();
        let mut u1 = vec![int(0); 22];
        let mut vs = Vec::new();
        for h in 1..=3 {
            let r = k3_block("h", h).unwrap();
            let mut v = vec![int(0); 22];
            v[r.start] = int(1);
            v[r.start + 1] = int(1);
            vs.push(v);
        }
        if perturb {
            // (20, 20) in H_1 plus rho = G^{-1}·1 in the E8 block: rho·α = -height(α)
            let g = RationalMatrix::from_i64_rows(&e8_gram());
            let rho = g.inverse().unwrap().apply(&vec![int(1); 8]).unwrap();
            u1[0] = int(20);
            u1[1] = int(20);
            for (i, x) in e8.zip(rho) {
                u1[i] = x;
            }
            vs[0] = u1;
        }
        let u = Subspace::from_vectors(22, &vs).unwrap();
        assert!(u.is_positive_definite(&k3).unwrap());
        (k3, u, roots)
    }

    #[test]
    fn any_root_examples() {
        let (k3, u, roots) = k3_plane(false);
        assert_eq!(any_root_orthogonal(&u, &roots, &k3).unwrap(), Some(roots[0].clone()));
        let (k3, u, roots) = k3_plane(true);
        assert_eq!(any_root_orthogonal(&u, &roots, &k3).unwrap(), None);
        assert_eq!(any_root_orthogonal(&u, &[], &k3).unwrap(), None);
    }

    #[test]
    fn beta_examples() {
        let id = InnerProduct::identity(2);
        let e1 = Subspace::line(&[int(1), int(0)]);
        assert!(beta_orthogonal(&id, &e1, &Subspace::line(&[int(0), int(1)])).unwrap());
        assert!(!beta_orthogonal(&id, &e1, &Subspace::line(&[int(1), int(1)])).unwrap());
        let b = InnerProduct::new(RationalMatrix::from_i64_rows(&[vec![1, 0], vec![0, 2]])).unwrap();
        let p = Subspace::line(&[int(1), int(1)]);
        assert!(beta_orthogonal(&b, &p, &Subspace::line(&[int(2), int(-1)])).unwrap());
        assert!(beta_orthogonal(&b, &p, &p).is_err());
        assert!(InnerProduct::new(RationalMatrix::from_i64_rows(&[vec![0, 1], vec![1, 0]])).is_err());
        let shown = b.unit_volume_display();
        assert!((shown[0][0] * shown[1][1] - 1.0).abs() < 1e-12);
    }
}
