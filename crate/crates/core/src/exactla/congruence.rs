//! Symmetric congruence diagonalization over the rationals.

use num_traits::{Signed, Zero};

use super::matrix::RationalMatrix;
use super::rational::Rational;

/// Counts of positive, negative and zero squares of a symmetric form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize)]
pub struct Inertia {
    pub plus: usize,
    pub minus: usize,
    pub zero: usize,
}

impl Inertia {
    pub fn new(plus: usize, minus: usize, zero: usize) -> Self {
        Self { plus, minus, zero }
    }

    pub fn as_tuple(&self) -> (usize, usize, usize) {
        (self.plus, self.minus, self.zero)
    }

    pub fn dim(&self) -> usize {
        self.plus + self.minus + self.zero
    }
}

impl std::ops::Add for Inertia {
    type Output = Inertia;
    fn add(self, o: Inertia) -> Inertia {
        Inertia::new(self.plus + o.plus, self.minus + o.minus, self.zero + o.zero)
    }
}

/// Result of diagonalizing a symmetric matrix `m`:
/// `transform^T * m * transform = diag(diagonal)` with `transform` invertible.
/// The columns of `transform` form an orthogonal basis for the form.
#[derive(Debug, Clone)]
pub struct Diagonalization {
    pub diagonal: Vec<Rational>,
    pub transform: RationalMatrix,
}

impl Diagonalization {
    pub fn inertia(&self) -> Inertia {
        let mut out = Inertia::default();
        for d in &self.diagonal {
            if d.is_positive() {
                out.plus += 1;
            } else if d.is_negative() {
                out.minus += 1;
            } else {
                out.zero += 1;
            }
        }
        out
    }
}

/// Diagonalizes a symmetric matrix by simultaneous row and column operations.
/// When every remaining diagonal entry vanishes but an off-diagonal entry
/// `m[i][j]` does not, row/column `j` is first added to row/column `i`,
/// which makes the new diagonal entry `2 m[i][j]` nonzero.
pub fn diagonalize(m: &RationalMatrix) -> Diagonalization {
    assert!(m.is_symmetric(), "congruence diagonalization needs a symmetric matrix");
    let n = m.nrows();
    let mut a = m.clone();
    let mut t = RationalMatrix::identity(n);

    for k in 0..n {
        let pivot = match (k..n).find(|&i| !a[(i, i)].is_zero()) {
            Some(i) => i,
            None => {
                let off = (k..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .find(|&(i, j)| !a[(i, j)].is_zero());
                match off {
                    Some((i, j)) => {
                        add_to(&mut a, &mut t, i, j);
                        i
                    }
                    None => break,
                }
            }
        };
        swap_sym(&mut a, &mut t, k, pivot);
        let d = a[(k, k)].clone();
        for i in k + 1..n {
            if a[(i, k)].is_zero() {
                continue;
            }
            let f = &a[(i, k)] / &d;
            for j in 0..n {
                let delta = &f * &a[(k, j)];
                a[(i, j)] -= delta;
            }
            for j in 0..n {
                let delta = &f * &a[(j, k)];
                a[(j, i)] -= delta;
            }
            for j in 0..n {
                let delta = &f * &t[(j, k)];
                t[(j, i)] -= delta;
            }
        }
    }
    Diagonalization {
        diagonal: (0..n).map(|i| a[(i, i)].clone()).collect(),
        transform: t,
    }
}

pub fn inertia(m: &RationalMatrix) -> Inertia {
    diagonalize(m).inertia()
}

fn swap_sym(a: &mut RationalMatrix, t: &mut RationalMatrix, i: usize, j: usize) {
    if i == j {
        return;
    }
    a.swap_rows(i, j);
    for r in 0..a.nrows() {
        let x = a[(r, i)].clone();
        a[(r, i)] = a[(r, j)].clone();
        a[(r, j)] = x;
    }
    for r in 0..t.nrows() {
        let x = t[(r, i)].clone();
        t[(r, i)] = t[(r, j)].clone();
        t[(r, j)] = x;
    }
}

// row_i += row_j, col_i += col_j
fn add_to(a: &mut RationalMatrix, t: &mut RationalMatrix, i: usize, j: usize) {
    let n = a.nrows();
    for c in 0..n {
        let v = a[(j, c)].clone();
        a[(i, c)] += v;
    }
    for r in 0..n {
        let v = a[(r, j)].clone();
        a[(r, i)] += v;
    }
    for r in 0..n {
        let v = t[(r, j)].clone();
        t[(r, i)] += v;
    }
}
