//! Isometries of `Lambda (x) Q`: certification, reflections, Cartan–Dieudonné
//! factorization, spinor norms and congruence-subgroup membership.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::rational::{is_zero_vec, primitive_direction, serde_rat, sub_vec};
use crate::exactla::{diagonalize, Rational, RatVec, RationalMatrix};
use crate::qlattice::{LatticeRef, QuadLattice};

/// A rational matrix `g` with `g^T G g = G` for the Gram matrix `G` of its lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Isometry {
    matrix: RationalMatrix,
    lattice: QuadLattice,
    det: i32,
}

impl Isometry {
    pub fn from_matrix(m: RationalMatrix, l: &QuadLattice) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
        }
        if m.nrows() != l.rank() {
            return Err(Error::DimensionMismatch { expected: l.rank(), found: m.nrows() });
        }
        let g = l.gram_q();
        if &(&m.transpose() * g) * &m != *g {
            return Err(Error::FormNotPreserved);
        }
        let det = m.determinant()?;
        let det = if det.is_one() { 1 } else { -1 };
        Ok(Self { matrix: m, lattice: l.clone(), det })
    }

    pub fn identity(l: &QuadLattice) -> Self {
        Self { matrix: RationalMatrix::identity(l.rank()), lattice: l.clone(), det: 1 }
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.matrix
    }

    pub fn lattice(&self) -> &QuadLattice {
        &self.lattice
    }

    pub fn det(&self) -> i32 {
        self.det
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity()
    }

    /// `self * other` (apply `other` first).
    pub fn compose(&self, other: &Isometry) -> Result<Isometry> {
        if self.lattice != other.lattice {
            return Err(Error::LatticeMismatch);
        }
        Ok(Isometry {
            matrix: &self.matrix * &other.matrix,
            lattice: self.lattice.clone(),
            det: self.det * other.det,
        })
    }

    pub fn inverse(&self) -> Isometry {
        // g^{-1} = G^{-1} g^T G
        let g = self.lattice.gram_q();
        let ginv = g.inverse().expect("gram is nondegenerate");
        Isometry {
            matrix: &(&ginv * &self.matrix.transpose()) * g,
            lattice: self.lattice.clone(),
            det: self.det,
        }
    }

    pub fn apply(&self, v: &[Rational]) -> Result<RatVec> {
        self.matrix.apply(v)
    }
}

/// The reflection `z -> z - 2 (z.x)/(x.x) x`.
pub fn reflection(x: &[Rational], l: &QuadLattice) -> Result<Isometry> {
    let nn = l.norm(x)?;
    if nn.is_zero() {
        return Err(Error::IsotropicVector);
    }
    let n = l.rank();
    let gx = l.gram_q().apply(x)?;
    let c = Rational::from_integer(BigInt::from(2)) / nn;
    let mut m = RationalMatrix::identity(n);
    for i in 0..n {
        if x[i].is_zero() {
            continue;
        }
        let ci = &c * &x[i];
        for j in 0..n {
            if !gx[j].is_zero() {
                m[(i, j)] -= &ci * &gx[j];
            }
        }
    }
    Ok(Isometry { matrix: m, lattice: l.clone(), det: -1 })
}

/// Product `R^{x_1} R^{x_2} ... R^{x_k}` as a matrix.
pub fn reflection_product(xs: &[RatVec], l: &QuadLattice) -> Result<RationalMatrix> {
    let mut m = RationalMatrix::identity(l.rank());
    for x in xs {
        m = &m * reflection(x, l)?.matrix();
    }
    Ok(m)
}

/// Writes `g` as a product of reflections, returning the reflection vectors
/// `x_1, ..., x_k` with `g = R^{x_1} ... R^{x_k}` and `k <= 2 * rank`.
///
/// Works through an orthogonal basis `u_1, ..., u_n` of anisotropic vectors.
/// With `h` the current residual (all earlier `u_j` fixed), if `w = h u_i - u_i`
/// is anisotropic then `R^w` maps `h u_i` to `u_i`; otherwise `R^{h u_i + u_i}`
/// followed by `R^{u_i}` does. Every vector used is orthogonal to the earlier
/// `u_j`, so those stay fixed. Vectors are returned as primitive integer
/// directions.
pub fn cartan_dieudonne(g: &Isometry) -> Vec<RatVec> {
    let l = g.lattice();
    let basis = diagonalize(l.gram_q()).transform;
    let mut h = g.matrix().clone();
    let mut applied: Vec<RatVec> = Vec::new();
    let reflect = |x: RatVec, h: &mut RationalMatrix, applied: &mut Vec<RatVec>| {
        let r = reflection(&x, l).expect("anisotropic by construction");
        *h = r.matrix() * &*h;
        applied.push(primitive_direction(&x));
    };
    for i in 0..l.rank() {
        let u = basis.column(i);
        let hu = h.apply(&u).expect("square");
        let w = sub_vec(&hu, &u);
        if is_zero_vec(&w) {
            continue;
        }
        if !l.norm(&w).expect("rank").is_zero() {
            reflect(w, &mut h, &mut applied);
        } else {
            let z: RatVec = hu.iter().zip(&u).map(|(a, b)| a + b).collect();
            reflect(z, &mut h, &mut applied);
            reflect(u, &mut h, &mut applied);
        }
    }
    debug_assert!(h.is_identity());
    // R_k ... R_1 g = I, and each R is an involution.
    applied
}

/// A class in `Q^x / (Q^x)^2`, represented by a squarefree integer.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SquareClass {
    pub representative: BigInt,
    pub real_sign: i32,
}

impl SquareClass {
    pub fn one() -> Self {
        Self { representative: BigInt::one(), real_sign: 1 }
    }

    /// Class of a nonzero rational `n/d`, i.e. of `n*d`.
    pub fn of(r: &Rational) -> Self {
        assert!(!r.is_zero(), "square class of zero");
        let rep = squarefree_part(&(r.numer() * r.denom()));
        Self { real_sign: if rep.is_negative() { -1 } else { 1 }, representative: rep }
    }

    pub fn mul(&self, other: &SquareClass) -> SquareClass {
        let g = self.representative.gcd(&other.representative);
        let rep = (&self.representative * &other.representative) / (&g * &g);
        SquareClass { real_sign: if rep.is_negative() { -1 } else { 1 }, representative: rep }
    }
}

impl Serialize for SquareClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire {
            class: serde_json::Value,
            real_sign: i32,
        }
        let class = match self.representative.to_i64() {
            Some(i) => serde_json::Value::from(i),
            None => serde_json::Value::from(self.representative.to_string()),
        };
        Wire { class, real_sign: self.real_sign }.serialize(s)
    }
}

/// Squarefree part of a nonzero integer, keeping the sign. Trial division.
pub fn squarefree_part(n: &BigInt) -> BigInt {
    assert!(!n.is_zero());
    let sign = if n.is_negative() { -BigInt::one() } else { BigInt::one() };
    if let Some(m) = n.abs().to_u64() {
        return sign * BigInt::from(squarefree_u64(m));
    }
    let mut m = n.abs();
    let mut out = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= m {
        let mut e = 0u32;
        while (&m % &p).is_zero() {
            m /= &p;
            e += 1;
        }
        if e % 2 == 1 {
            out *= &p;
        }
        p += if p == BigInt::from(2) { 1 } else { 2 };
    }
    out * m * sign
}

fn squarefree_u64(mut m: u64) -> u64 {
    let mut out = 1u64;
    let mut p = 2u64;
    while p <= m / p {
        let mut e = 0u32;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        if e % 2 == 1 {
            out *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    out * m
}

/// Spinor norm of an explicit reflection factorization.
pub fn spinor_norm_of(xs: &[RatVec], l: &QuadLattice) -> Result<SquareClass> {
    xs.iter().try_fold(SquareClass::one(), |acc, x| {
        let n = l.norm(x)?;
        if n.is_zero() {
            return Err(Error::IsotropicVector);
        }
        Ok(acc.mul(&SquareClass::of(&n)))
    })
}

/// Product of `x_i . x_i` over a Cartan–Dieudonné factorization, modulo squares.
pub fn spinor_norm(g: &Isometry) -> SquareClass {
    spinor_norm_of(&cartan_dieudonne(g), g.lattice()).expect("factors are anisotropic")
}

/// `g == I (mod modulus)` entrywise, for integral `g` of determinant one.
pub fn in_congruence_subgroup(g: &Isometry, modulus: u64) -> Result<bool> {
    if modulus == 0 {
        return Err(Error::BadModulus);
    }
    if !g.matrix().is_integral() {
        return Err(Error::NonIntegralMatrix);
    }
    if g.det() != 1 {
        return Err(Error::DetMinusOne);
    }
    let n = BigInt::from(modulus);
    let m = g.matrix();
    Ok((0..m.nrows()).all(|i| {
        (0..m.ncols()).all(|j| {
            let target = if i == j { BigInt::one() } else { BigInt::zero() };
            (m[(i, j)].to_integer() - target).mod_floor(&n).is_zero()
        })
    }))
}

#[derive(Serialize, Deserialize)]
struct IsometryWire {
    #[serde(with = "serde_rat::rows")]
    matrix: Vec<RatVec>,
    lattice: LatticeRef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    det: Option<String>,
}

impl Serialize for Isometry {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        IsometryWire {
            matrix: self.matrix.rows_vec(),
            lattice: LatticeRef::of(&self.lattice),
            det: Some(if self.det == 1 { "+1" } else { "-1" }.to_string()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Isometry {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = IsometryWire::deserialize(d)?;
        let l = w.lattice.build().map_err(D::Error::custom)?;
        let m = RationalMatrix::from_rows(l.rank(), &w.matrix).map_err(D::Error::custom)?;
        let g = Isometry::from_matrix(m, &l).map_err(D::Error::custom)?;
        if let Some(det) = w.det {
            let claimed = match det.trim() {
                "+1" | "1" => 1,
                "-1" => -1,
                other => return Err(D::Error::custom(format!("bad det `{other}`"))),
            };
            if claimed != g.det() {
                return Err(D::Error::custom("stated det disagrees with matrix"));
            }
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::rational::{int, int_vec, rat, unit_vec};
    use crate::qlattice::{standard_lattice, LatticeKind};

    fn bpq(p: usize, q: usize) -> QuadLattice {
        standard_lattice(LatticeKind::Bpq, Some((p, q))).unwrap()
    }

    fn boost() -> RationalMatrix {
        RationalMatrix::from_rows(2, &[vec![rat(5, 4), rat(3, 4)], vec![rat(3, 4), rat(5, 4)]]).unwrap()
    }

    #[test]
    fn from_matrix_examples() {
        let g = Isometry::from_matrix(RationalMatrix::identity(5), &bpq(2, 3)).unwrap();
        assert_eq!(g.det(), 1);
        let b = Isometry::from_matrix(boost(), &bpq(1, 1)).unwrap();
        assert_eq!(b.det(), 1);
        let scale = RationalMatrix::from_i64_rows(&[vec![2, 0], vec![0, 1]]);
        assert_eq!(Isometry::from_matrix(scale, &bpq(1, 1)), Err(Error::FormNotPreserved));
        let rect = RationalMatrix::zeros(2, 3);
        assert!(matches!(Isometry::from_matrix(rect, &bpq(1, 1)), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn reflection_examples() {
        let l = bpq(1, 1);
        let r = reflection(&unit_vec(2, 0), &l).unwrap();
        assert_eq!(*r.matrix(), RationalMatrix::from_i64_rows(&[vec![-1, 0], vec![0, 1]]));
        let r = reflection(&unit_vec(2, 1), &l).unwrap();
        assert_eq!(*r.matrix(), RationalMatrix::from_i64_rows(&[vec![1, 0], vec![0, -1]]));
        assert_eq!(reflection(&int_vec(&[1, 1]), &l), Err(Error::IsotropicVector));
    }

    #[test]
    fn cartan_dieudonne_examples() {
        let l = bpq(2, 1);
        assert!(cartan_dieudonne(&Isometry::identity(&l)).is_empty());

        let r = reflection(&unit_vec(3, 0), &l).unwrap();
        let xs = cartan_dieudonne(&r);
        assert_eq!(xs, vec![unit_vec(3, 0)]);

        let euclid = QuadLattice::new(vec![vec![1, 0], vec![0, 1]]).unwrap();
        let neg = Isometry::from_matrix(RationalMatrix::diagonal(&[int(-1), int(-1)]), &euclid).unwrap();
        let xs = cartan_dieudonne(&neg);
        assert_eq!(xs, vec![unit_vec(2, 0), unit_vec(2, 1)]);
        assert_eq!(reflection_product(&xs, &euclid).unwrap(), *neg.matrix());
    }

    #[test]
    fn cartan_dieudonne_isotropic_step() {
        // On H the basis vectors are isotropic; the orthogonal basis is not.
        let h = standard_lattice(LatticeKind::Hyperbolic, None).unwrap();
        let swap = Isometry::from_matrix(RationalMatrix::from_i64_rows(&[vec![0, 1], vec![1, 0]]), &h).unwrap();
        let xs = cartan_dieudonne(&swap);
        assert_eq!(reflection_product(&xs, &h).unwrap(), *swap.matrix());
        let t = Isometry::from_matrix(RationalMatrix::from_i64_rows(&[vec![-1, 0], vec![0, -1]]), &h).unwrap();
        let xs = cartan_dieudonne(&t);
        assert!(xs.len() <= 4);
        assert_eq!(reflection_product(&xs, &h).unwrap(), *t.matrix());
    }

    #[test]
    fn spinor_norm_examples() {
        let l = bpq(1, 1);
        let s = spinor_norm(&reflection(&unit_vec(2, 0), &l).unwrap());
        assert_eq!(s, SquareClass { representative: 1.into(), real_sign: 1 });
        let s = spinor_norm(&reflection(&unit_vec(2, 1), &l).unwrap());
        assert_eq!(s, SquareClass { representative: (-1).into(), real_sign: -1 });

        let b = Isometry::from_matrix(boost(), &l).unwrap();
        assert_eq!(spinor_norm(&b), SquareClass { representative: 2.into(), real_sign: 1 });
        // the hand factorization R^{e_1} R^{(3,-1)}
        let hand = vec![unit_vec(2, 0), int_vec(&[3, -1])];
        assert_eq!(reflection_product(&hand, &l).unwrap(), boost());
        assert_eq!(spinor_norm_of(&hand, &l).unwrap(), spinor_norm(&b));
    }

    #[test]
    fn squarefree() {
        assert_eq!(squarefree_part(&BigInt::from(72)), BigInt::from(2));
        assert_eq!(squarefree_part(&BigInt::from(-8)), BigInt::from(-2));
        assert_eq!(squarefree_part(&BigInt::from(1)), BigInt::from(1));
        assert_eq!(squarefree_part(&BigInt::from(49 * 3)), BigInt::from(3));
        assert_eq!(SquareClass::of(&rat(3, 4)).representative, BigInt::from(3));
        assert_eq!(SquareClass::of(&rat(-1, 8)).representative, BigInt::from(-2));
    }

    #[test]
    fn congruence_examples() {
        let l = QuadLattice::new(vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, -1, 0], vec![0, 0, 0, -1]])
            .unwrap();
        assert!(in_congruence_subgroup(&Isometry::identity(&l), 8).unwrap());
        let g = Isometry::from_matrix(RationalMatrix::diagonal(&int_vec(&[-1, -1, 1, 1])), &l).unwrap();
        assert!(in_congruence_subgroup(&g, 2).unwrap());
        assert!(!in_congruence_subgroup(&g, 4).unwrap());
        let b = Isometry::from_matrix(boost(), &bpq(1, 1)).unwrap();
        assert_eq!(in_congruence_subgroup(&b, 4), Err(Error::NonIntegralMatrix));
        let r = reflection(&unit_vec(4, 0), &l).unwrap();
        assert_eq!(in_congruence_subgroup(&r, 2), Err(Error::DetMinusOne));
        assert_eq!(in_congruence_subgroup(&g, 0), Err(Error::BadModulus));
    }

    #[test]
    fn inverse_and_compose() {
        let l = bpq(1, 1);
        let b = Isometry::from_matrix(boost(), &l).unwrap();
        assert!(b.compose(&b.inverse()).unwrap().is_identity());
        let other = Isometry::identity(&bpq(2, 1));
        assert_eq!(b.compose(&other), Err(Error::LatticeMismatch));
    }

    #[test]
    fn json_roundtrip() {
        let b = Isometry::from_matrix(boost(), &bpq(1, 1)).unwrap();
        let s = serde_json::to_string(&b).unwrap();
        assert_eq!(
            s,
            r#"{"matrix":[["5/4","3/4"],["3/4","5/4"]],"lattice":{"kind":"bpq","p":1,"q":1},"det":"+1"}"#
        );
        let back: Isometry = serde_json::from_str(&s).unwrap();
        assert_eq!(back, b);
        let bad = r#"{"matrix":[["2","0"],["0","1"]],"lattice":{"kind":"bpq","p":1,"q":1}}"#;
        assert!(serde_json::from_str::<Isometry>(bad).is_err());
        let sc = serde_json::to_string(&spinor_norm(&b)).unwrap();
        assert_eq!(sc, r#"{"class":2,"real_sign":1}"#);
    }
}
