//! The end-to-end acceptance checks, shared by the CLI and the test suite.
//! Every check is deterministic for a given seed.

use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arrangement::{
    auto_spec, build_family, inequality_predicate, intersection_matrix, rotation_power, ArrangementSpec,
    BoostParams, RotationPair,
};
use crate::error::Result;
use crate::exactla::rational::{int, int_vec, rat};
use crate::exactla::{inertia, RatVec, RationalMatrix, Subspace};
use crate::grassmann::{
    general_position, intersect_flat_hyperplane, sign_patterns_fixing, stabilizer_sign_patterns, Flat, GeneralPosition,
    Hyperplane, IntersectionVerdict, NClause, Translate,
};
use crate::isometry::{cartan_dieudonne, reflection, reflection_product, spinor_norm, spinor_norm_of, Isometry, SquareClass};
use crate::obstruct::{enumerate_roots, enumerate_roots_naive};
use crate::qlattice::{standard_lattice, LatticeKind, Parity, QuadLattice};
use crate::signcalc::{pi_k_matrix, AdmissibleV};

pub const DEFAULT_SEED: u64 = 20240531;

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    #[serde(skip)]
    pub elapsed_ms: u128,
    pub limit_ms: Option<u128>,
    pub detail: String,
}

impl CheckOutcome {
    /// `PASS  3 lemma-implication  (412 ms)  <detail>`
    pub fn line(&self) -> String {
        let limit = self.limit_ms.map_or(String::new(), |l| format!(" / limit {l} ms"));
        format!(
            "{} {} {:<20} ({} ms{}) {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed_ms,
            limit,
            self.detail
        )
    }
}

pub const CHECKS: [(u8, &str); 8] = [
    (1, "sign-claim"),
    (2, "arrangement-pattern"),
    (3, "lemma-implication"),
    (4, "stabilizer-claim"),
    (5, "spinor-norm"),
    (6, "root-enumeration"),
    (7, "lattice-classes"),
    (8, "exact-linalg"),
];

/// Runs check `id` (1..=8); `None` for an unknown id.
pub fn run_check(id: u8, seed: u64) -> Option<CheckOutcome> {
    let (limit, f): (Option<u64>, fn(u64) -> Result<(bool, String)>) = match id {
        1 => (Some(10_000), sign_claim),
        2 => (None, arrangement_pattern),
        3 => (None, lemma_implication),
        4 => (None, stabilizer_claim),
        5 => (Some(10_000), spinor_checks),
        6 => (None, root_enumeration),
        7 => (Some(1_000), lattice_classes),
        8 => (Some(5_000), exact_linalg),
        _ => return None,
    };
    let name = CHECKS[id as usize - 1].1;
    let start = Instant::now();
    let result = f(seed);
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match result {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    if let Some(l) = limit {
        if elapsed > Duration::from_millis(l) {
            passed = false;
            detail.push_str("; over time limit");
        }
    }
    Some(CheckOutcome {
        id,
        name,
        passed,
        elapsed_ms: elapsed.as_millis(),
        limit_ms: limit.map(u128::from),
        detail,
    })
}

pub fn run_all(seed: u64) -> Vec<CheckOutcome> {
    CHECKS.iter().filter_map(|&(id, _)| run_check(id, seed)).collect()
}

fn bpq(p: usize, q: usize) -> QuadLattice {
    standard_lattice(LatticeKind::Bpq, Some((p, q))).expect("p, q >= 1")
}

fn rng(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Random integer vector with entries in `[-r, r]`.
pub fn random_int_vec<R: Rng>(rng: &mut R, n: usize, r: i64) -> Vec<i64> {
    (0..n).map(|_| rng.gen_range(-r..=r)).collect()
}

/// Random anisotropic integer vector of `l`.
pub fn random_anisotropic<R: Rng>(rng: &mut R, l: &QuadLattice, r: i64) -> RatVec {
    loop {
        let x = random_int_vec(rng, l.rank(), r);
        if l.eval_form(&x, &x).map_or(false, |n| n != 0) {
            return int_vec(&x);
        }
    }
}

/// Random invertible integer matrix with entries in `[-r, r]`.
pub fn random_invertible<R: Rng>(rng: &mut R, n: usize, r: i64) -> RationalMatrix {
    loop {
        let rows: Vec<Vec<i64>> = (0..n).map(|_| random_int_vec(rng, n, r)).collect();
        let m = RationalMatrix::from_i64_rows(&rows);
        if !m.determinant().expect("square").is_zero() {
            return m;
        }
    }
}

fn sign_claim(seed: u64) -> Result<(bool, String)> {
    let mut rng = rng(seed, 1);
    let mut cases = 0;
    for p in 1..=6 {
        for q in p..=6 {
            let mut diag = vec![-int(1); p];
            diag[p - 1] = int(1);
            let expected = RationalMatrix::diagonal(&diag);
            let det = if p % 2 == 1 { int(1) } else { int(-1) };
            for _ in 0..25 {
                let v = AdmissibleV::random(p, q, &mut rng)?;
                let m = pi_k_matrix(p, q, &v)?;
                if m != expected || m.determinant()? != det {
                    return Ok((false, format!("counterexample p={p}, q={q}, v={:?}", v.v)));
                }
                cases += 1;
            }
        }
    }
    Ok((true, format!("{cases} cases exact")))
}

fn arrangement_pattern(_seed: u64) -> Result<(bool, String)> {
    let mut parts = Vec::new();
    let mut ok = true;
    for (p, q) in [(2, 3), (3, 3), (3, 4)] {
        let start = Instant::now();
        let spec = auto_spec(p, q, 5)?;
        let m = intersection_matrix(&spec)?;
        let ms = start.elapsed().as_millis();
        let case_ok = m.lower_triangular && m.shift_consistent && ms < 30_000;
        ok &= case_ok;
        let row0: String = m.tags()[0].iter().map(|t| t.letter()).collect();
        parts.push(format!("({p},{q}) m={} row0={row0}{}", spec.m, if case_ok { "" } else { " FAILED" }));
    }
    Ok((ok, parts.join("; ")))
}

fn lemma_implication(_seed: u64) -> Result<(bool, String)> {
    let boosts = [(rat(5, 4), rat(3, 4)), (rat(5, 3), rat(4, 3)), (rat(13, 12), rat(5, 12))];
    let ts = [rat(1, 10), rat(1, 16), rat(1, 32)];
    let (mut combos, mut exercised, mut violations) = (0, 0, Vec::new());
    for (a, b) in &boosts {
        let boost = BoostParams::new(a.clone(), b.clone())?;
        for m in 0..=3 {
            for t in &ts {
                combos += 1;
                let spec = ArrangementSpec::new(2, 3, boost.clone(), m, RotationPair::from_t(t)?, 0)?;
                let fam = build_family(&spec)?;
                let (f0, h0) = (&fam.flats[0], &fam.hyperplanes[0]);
                for k in 1..=12u32 {
                    if !inequality_predicate(&spec, k)?.holds() {
                        continue;
                    }
                    exercised += 1;
                    let r = spec.rotation_isometry(&rotation_power(&spec.rotation, k));
                    let fk = f0.translate(&r)?;
                    let verdict = intersect_flat_hyperplane(&fk, h0, spec.n_clause)?;
                    if verdict != IntersectionVerdict::Empty {
                        violations.push(format!("a={a}, b={b}, m={m}, t={t}, k={k}: {:?}", verdict.tag()));
                    }
                }
            }
        }
    }
    let ok = violations.is_empty() && combos >= 20 && exercised > 0;
    let mut detail = format!("{combos} combos, {exercised} implications exercised, {} violations", violations.len());
    if let Some(v) = violations.first() {
        detail.push_str(&format!("; first: {v}"));
    }
    Ok((ok, detail))
}

fn stabilizer_claim(seed: u64) -> Result<(bool, String)> {
    let mut rng = rng(seed, 4);
    let mut checked = 0;
    for (p, q) in [(2, 3), (3, 4)] {
        let l = bpq(p, q);
        let f0 = Flat::standard(p, q, &l)?;
        let mut found = 0;
        let mut tries = 0;
        while found < 50 {
            tries += 1;
            if tries > 100_000 {
                return Ok((false, format!("could not sample 50 strong pairs in B_{{{p},{q}}}")));
            }
            let x = random_int_vec(&mut rng, p + q, 3);
            if l.eval_form(&x, &x)? >= 0 {
                continue;
            }
            let h = Hyperplane::new(int_vec(&x), &l)?;
            if !general_position(&f0, &h, GeneralPosition::Strong, NClause::Enforce)? {
                continue;
            }
            let patterns = stabilizer_sign_patterns(&f0, &h, NClause::Enforce)?;
            if patterns != vec![vec![1i8; p]] {
                return Ok((false, format!("nontrivial stabilizer for lambda={x:?}")));
            }
            found += 1;
        }
        checked += found;
    }
    // lambda with no U_i-component for some i
    let degenerate: [(usize, usize, Vec<i64>); 5] = [
        (2, 3, vec![0, 1, 0, 2, 1]),
        (2, 3, vec![1, 0, 2, 0, 1]),
        (3, 4, vec![0, 1, 1, 0, 2, 2, 1]),
        (3, 4, vec![1, 0, 1, 2, 0, 2, 1]),
        (3, 4, vec![0, 0, 1, 0, 0, 2, 1]),
    ];
    for (p, q, x) in &degenerate {
        let l = bpq(*p, *q);
        let f0 = Flat::standard(*p, *q, &l)?;
        let h = Hyperplane::new(int_vec(x), &l)?;
        let patterns = sign_patterns_fixing(&f0, &h)?;
        if patterns.len() < 2 {
            return Ok((false, format!("degenerate lambda={x:?} shows only the trivial pattern")));
        }
    }
    Ok((true, format!("{checked} strong pairs trivial; {} degenerate pairs nontrivial", degenerate.len())))
}

fn spinor_checks(seed: u64) -> Result<(bool, String)> {
    let mut rng = rng(seed, 5);
    let l = bpq(2, 3);
    for _ in 0..100 {
        let x = random_anisotropic(&mut rng, &l, 4);
        let expected = if l.norm(&x)? > int(0) { 1 } else { -1 };
        let tau = spinor_norm(&reflection(&x, &l)?);
        if tau.real_sign != expected {
            return Ok((false, format!("real sign mismatch for x={x:?}")));
        }
    }
    let mut max_factors = 0;
    let mut prev: Option<(Isometry, SquareClass)> = None;
    for _ in 0..200 {
        let k = rng.gen_range(1..=4);
        let xs: Vec<RatVec> = (0..k).map(|_| random_anisotropic(&mut rng, &l, 3)).collect();
        let g = Isometry::from_matrix(reflection_product(&xs, &l)?, &l)?;
        let factors = cartan_dieudonne(&g);
        max_factors = max_factors.max(factors.len());
        if factors.len() > 2 * l.rank() || reflection_product(&factors, &l)? != *g.matrix() {
            return Ok((false, format!("Cartan-Dieudonne failed for factors {xs:?}")));
        }
        let tau = spinor_norm(&g);
        if tau != spinor_norm_of(&xs, &l)? {
            return Ok((false, format!("spinor norm depends on the factorization {xs:?}")));
        }
        if let Some((h, tau_h)) = &prev {
            if spinor_norm(&g.compose(h)?) != tau.mul(tau_h) {
                return Ok((false, "spinor norm not multiplicative".into()));
            }
        }
        prev = Some((g, tau));
    }
    Ok((true, format!("100 reflections, 200 products; max {max_factors} factors")))
}

fn root_enumeration(_seed: u64) -> Result<(bool, String)> {
    let h = standard_lattice(LatticeKind::Hyperbolic, None)?;
    let nh = enumerate_roots(&h, 1).len();
    let n11 = enumerate_roots(&bpq(1, 1), 10).len();
    let start = Instant::now();
    let ne8 = enumerate_roots(&standard_lattice(LatticeKind::E8Neg, None)?, 6).len();
    let e8_ms = start.elapsed().as_millis();
    let small: Vec<QuadLattice> = vec![
        h.clone(),
        bpq(1, 1),
        bpq(1, 2),
        bpq(2, 2),
        bpq(1, 3),
        QuadLattice::new(vec![vec![-2, 1, 0], vec![1, -2, 1], vec![0, 1, -2]])?,
        QuadLattice::new(vec![vec![0, 1, 0, 0], vec![1, 0, 0, 0], vec![0, 0, -2, 1], vec![0, 0, 1, 2]])?,
    ];
    let mut mismatches = 0;
    for l in &small {
        for bound in 1..=3 {
            if enumerate_roots(l, bound) != enumerate_roots_naive(l, bound) {
                mismatches += 1;
            }
        }
    }
    let ok = nh == 2 && n11 == 0 && ne8 == 240 && e8_ms < 60_000 && mismatches == 0;
    Ok((
        ok,
        format!("H:{nh} B11:{n11} -E8:{ne8}; pruned vs naive mismatches: {mismatches}"),
    ))
}

fn lattice_classes(_seed: u64) -> Result<(bool, String)> {
    let k3 = standard_lattice(LatticeKind::K3, None)?.classify();
    if k3.signature != (3, 19) || k3.parity != Parity::Even || !k3.unimodular {
        return Ok((false, format!("K3 classified as {k3:?}")));
    }
    for p in 1..=10 {
        for q in 1..=10 {
            let c = bpq(p, q).classify();
            if c.signature != (p, q) || c.parity != Parity::Odd || !c.unimodular {
                return Ok((false, format!("B_{{{p},{q}}} classified as {c:?}")));
            }
        }
    }
    Ok((true, "K3 (3,19) even unimodular; 100 B_{p,q} odd unimodular".into()))
}

fn exact_linalg(seed: u64) -> Result<(bool, String)> {
    let mut rng = rng(seed, 8);
    let lattices = [bpq(2, 3), bpq(3, 4), standard_lattice(LatticeKind::E8Neg, None)?];
    for _ in 0..100 {
        let n = rng.gen_range(2..=7);
        let m = RationalMatrix::from_i64_rows(&{
            let mut rows = vec![vec![0i64; n]; n];
            for i in 0..n {
                for j in i..n {
                    let x = rng.gen_range(-4..=4);
                    rows[i][j] = x;
                    rows[j][i] = x;
                }
            }
            rows
        });
        let p = random_invertible(&mut rng, n, 3);
        let congruent = &(&p.transpose() * &m) * &p;
        if inertia(&congruent) != inertia(&m) {
            return Ok((false, "inertia changed under congruence".into()));
        }

        let l = &lattices[rng.gen_range(0..lattices.len())];
        let dim = l.rank();
        let a = random_subspace(&mut rng, dim);
        let b = random_subspace(&mut rng, dim);
        if a.join(&b)?.dim() + a.intersect(&b)?.dim() != a.dim() + b.dim() {
            return Ok((false, "dimension formula failed".into()));
        }
        if a.perp(l)?.perp(l)? != a || a.perp(l)?.dim() + a.dim() != dim {
            return Ok((false, "perp is not an involution".into()));
        }
    }
    Ok((true, "100 congruences, 100 subspace pairs".into()))
}

fn random_subspace<R: Rng>(rng: &mut R, n: usize) -> Subspace {
    let k = rng.gen_range(0..=n);
    let vs: Vec<RatVec> = (0..k).map(|_| int_vec(&random_int_vec(rng, n, 2))).collect();
    Subspace::from_vectors(n, &vs).expect("ambient matches")
}
