//! Integral quadratic lattices given by Gram matrices, and their
//! classification by signature, parity and determinant.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::{bareiss_determinant, inertia, Rational, RationalMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LatticeKind {
    /// Diagonal form `diag(1^p, (-1)^q)`.
    Bpq,
    /// The hyperbolic plane `[[0,1],[1,0]]`.
    Hyperbolic,
    E8Neg,
    E8Pos,
    /// `H^3 + (-E8)^2`, rank 22.
    K3,
}

impl LatticeKind {
    pub fn name(&self) -> &'static str {
        match self {
            LatticeKind::Bpq => "bpq",
            LatticeKind::Hyperbolic => "hyperbolic",
            LatticeKind::E8Neg => "e8_neg",
            LatticeKind::E8Pos => "e8_pos",
            LatticeKind::K3 => "k3",
        }
    }
}

impl FromStr for LatticeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "bpq" => LatticeKind::Bpq,
            "hyperbolic" | "h" => LatticeKind::Hyperbolic,
            "e8_neg" | "-e8" | "e8neg" => LatticeKind::E8Neg,
            "e8_pos" | "e8" | "e8pos" => LatticeKind::E8Pos,
            "k3" => LatticeKind::K3,
            other => return Err(Error::UnknownKind(other.to_string())),
        })
    }
}

/// Wire form of a named lattice: `{"kind": "...", "p": int, "q": int}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeDescriptor {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
}

impl LatticeDescriptor {
    pub fn build(&self) -> Result<QuadLattice> {
        let kind: LatticeKind = self.kind.parse()?;
        let params = match (self.p, self.q) {
            (Some(p), Some(q)) => Some((p, q)),
            _ => None,
        };
        standard_lattice(kind, params)
    }
}

/// A lattice on the wire: a named descriptor or an explicit Gram matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LatticeRef {
    Custom { kind: String, gram: Vec<Vec<i64>> },
    Named(LatticeDescriptor),
}

impl LatticeRef {
    pub fn of(l: &QuadLattice) -> Self {
        match l.descriptor() {
            Some(d) => LatticeRef::Named(d.clone()),
            None => LatticeRef::Custom { kind: "custom".into(), gram: l.gram().to_vec() },
        }
    }

    pub fn build(&self) -> Result<QuadLattice> {
        match self {
            LatticeRef::Named(d) => d.build(),
            LatticeRef::Custom { gram, .. } => QuadLattice::new(gram.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticeClass {
    pub signature: (usize, usize),
    pub parity: Parity,
    pub det: BigInt,
    pub unimodular: bool,
}

/// A nondegenerate integral symmetric bilinear form on `Z^n`.
#[derive(Clone)]
pub struct QuadLattice {
    gram: Vec<Vec<i64>>,
    gram_q: RationalMatrix,
    det: BigInt,
    name: Option<String>,
    descriptor: Option<LatticeDescriptor>,
}

impl PartialEq for QuadLattice {
    fn eq(&self, other: &Self) -> bool {
        self.gram == other.gram
    }
}

impl Eq for QuadLattice {}

impl fmt::Debug for QuadLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuadLattice")
            .field("name", &self.name)
            .field("gram", &self.gram)
            .finish()
    }
}

impl QuadLattice {
    /// Validates symmetry and nondegeneracy. The rank-0 lattice is allowed
    /// and acts as the unit for [`combine`].
    pub fn new(gram: Vec<Vec<i64>>) -> Result<Self> {
        let n = gram.len();
        for (i, row) in gram.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare { rows: n, cols: row.len() });
            }
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::NotSymmetric(i, j));
                }
            }
        }
        let det = gram_determinant(&gram);
        if det.is_zero() {
            return Err(Error::DegenerateForm);
        }
        let gram_q = RationalMatrix::from_i64_rows(&gram);
        let gram_q = if n == 0 { RationalMatrix::zeros(0, 0) } else { gram_q };
        Ok(Self {
            gram,
            gram_q,
            det,
            name: None,
            descriptor: None,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    fn with_descriptor(mut self, d: LatticeDescriptor) -> Self {
        self.descriptor = Some(d);
        self
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn gram_q(&self) -> &RationalMatrix {
        &self.gram_q
    }

    pub fn det(&self) -> &BigInt {
        &self.det
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn descriptor(&self) -> Option<&LatticeDescriptor> {
        self.descriptor.as_ref()
    }

    /// `x^T G y` for integer vectors.
    pub fn eval_form(&self, x: &[i64], y: &[i64]) -> Result<i64> {
        self.check_len(x.len())?;
        self.check_len(y.len())?;
        let mut acc: i128 = 0;
        for (i, row) in self.gram.iter().enumerate() {
            if x[i] == 0 {
                continue;
            }
            let gy: i128 = row.iter().zip(y).map(|(&g, &v)| g as i128 * v as i128).sum();
            acc += x[i] as i128 * gy;
        }
        i64::try_from(acc).map_err(|_| Error::Parse("form value overflows i64".into()))
    }

    /// `x^T G y` for rational vectors.
    pub fn pair(&self, x: &[Rational], y: &[Rational]) -> Result<Rational> {
        self.check_len(x.len())?;
        self.check_len(y.len())?;
        let mut acc = Rational::zero();
        for (i, row) in self.gram.iter().enumerate() {
            if x[i].is_zero() {
                continue;
            }
            let mut gy = Rational::zero();
            for (j, &g) in row.iter().enumerate() {
                if g != 0 && !y[j].is_zero() {
                    gy += &y[j] * Rational::from_integer(g.into());
                }
            }
            acc += &x[i] * gy;
        }
        Ok(acc)
    }

    pub fn norm(&self, x: &[Rational]) -> Result<Rational> {
        self.pair(x, x)
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), found: n });
        }
        Ok(())
    }

    pub fn classify(&self) -> LatticeClass {
        classify_gram(&self.gram).expect("lattice gram is nondegenerate by construction")
    }

    /// Gram matrix of the sublattice spanned by `indices`.
    pub fn sub_gram(&self, indices: &[usize]) -> Vec<Vec<i64>> {
        indices
            .iter()
            .map(|&i| indices.iter().map(|&j| self.gram[i][j]).collect())
            .collect()
    }
}

pub fn gram_determinant(gram: &[Vec<i64>]) -> BigInt {
    bareiss_determinant(
        gram.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect(),
    )
}

/// Classifies an arbitrary symmetric integer matrix; fails when degenerate.
pub fn classify_gram(gram: &[Vec<i64>]) -> Result<LatticeClass> {
    let det = gram_determinant(gram);
    if det.is_zero() {
        return Err(Error::DegenerateForm);
    }
    let sig = if gram.is_empty() {
        (0, 0)
    } else {
        let i = inertia(&RationalMatrix::from_i64_rows(gram));
        (i.plus, i.minus)
    };
    let parity = if gram.iter().enumerate().all(|(i, r)| r[i] % 2 == 0) {
        Parity::Even
    } else {
        Parity::Odd
    };
    Ok(LatticeClass {
        signature: sig,
        parity,
        unimodular: det.abs().is_one(),
        det,
    })
}

/// Simple-root Gram matrix of E8 (Bourbaki labelling: chain 1-3-4-5-6-7-8
/// with node 2 attached to node 4).
pub fn e8_gram() -> Vec<Vec<i64>> {
    const EDGES: [(usize, usize); 7] = [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)];
    let mut g = vec![vec![0i64; 8]; 8];
    for (i, row) in g.iter_mut().enumerate() {
        row[i] = 2;
    }
    for (a, b) in EDGES {
        g[a][b] = -1;
        g[b][a] = -1;
    }
    g
}

pub fn bpq_gram(p: usize, q: usize) -> Vec<Vec<i64>> {
    let n = p + q;
    (0..n)
        .map(|i| (0..n).map(|j| if i != j { 0 } else if i < p { 1 } else { -1 }).collect())
        .collect()
}

pub fn standard_lattice(kind: LatticeKind, params: Option<(usize, usize)>) -> Result<QuadLattice> {
    let descriptor = LatticeDescriptor {
        kind: kind.name().to_string(),
        p: None,
        q: None,
    };
    let lattice = match kind {
        LatticeKind::Bpq => {
            let (p, q) = params
                .filter(|&(p, q)| p >= 1 && q >= 1)
                .ok_or_else(|| Error::MissingParams("bpq".into()))?;
            return Ok(QuadLattice::new(bpq_gram(p, q))?
                .with_name(format!("B_{{{p},{q}}}"))
                .with_descriptor(LatticeDescriptor { p: Some(p), q: Some(q), ..descriptor }));
        }
        LatticeKind::Hyperbolic => QuadLattice::new(vec![vec![0, 1], vec![1, 0]])?.with_name("H"),
        LatticeKind::E8Pos => QuadLattice::new(e8_gram())?.with_name("E8"),
        LatticeKind::E8Neg => {
            let g = e8_gram().into_iter().map(|r| r.into_iter().map(|x| -x).collect()).collect();
            QuadLattice::new(g)?.with_name("-E8")
        }
        LatticeKind::K3 => {
            let h = standard_lattice(LatticeKind::Hyperbolic, None)?;
            let e8 = standard_lattice(LatticeKind::E8Pos, None)?;
            let hhh = combine(&combine(&h, &h, false), &h, false);
            combine(&combine(&hhh, &e8, true), &e8, true).with_name("K3")
        }
    };
    Ok(lattice.with_descriptor(descriptor))
}

/// Orthogonal direct sum `a + (+-1) b`.
pub fn combine(a: &QuadLattice, b: &QuadLattice, negate_b: bool) -> QuadLattice {
    let (na, nb) = (a.rank(), b.rank());
    if nb == 0 {
        return a.clone();
    }
    let sign = if negate_b { -1 } else { 1 };
    let mut gram = vec![vec![0i64; na + nb]; na + nb];
    for i in 0..na {
        gram[i][..na].copy_from_slice(&a.gram[i]);
    }
    for i in 0..nb {
        for j in 0..nb {
            gram[na + i][na + j] = sign * b.gram[i][j];
        }
    }
    QuadLattice::new(gram).expect("direct sum of nondegenerate forms is nondegenerate")
}

/// Index ranges of the hyperbolic and `-E8` summands of the K3 lattice.
pub fn k3_block(name: &str, index: usize) -> Option<std::ops::Range<usize>> {
    match (name, index) {
        ("h", 1..=3) => Some(2 * (index - 1)..2 * index),
        ("e8", 1..=2) => Some(6 + 8 * (index - 1)..6 + 8 * index),
        _ => None,
    }
}
