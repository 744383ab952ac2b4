use geocycle::exactla::rational::{int, int_vec, rat};
use geocycle::exactla::{inertia, RatVec, RationalMatrix, Subspace};
use geocycle::isometry::{cartan_dieudonne, reflection, reflection_product, spinor_norm, spinor_norm_of, Isometry};
use geocycle::qlattice::{classify_gram, combine, standard_lattice, LatticeKind, QuadLattice};
use num_traits::Zero;
use proptest::prelude::*;

fn bpq(p: usize, q: usize) -> QuadLattice {
    standard_lattice(LatticeKind::Bpq, Some((p, q))).unwrap()
}

fn symmetric(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(-3i64..=3, n * n).prop_map(move |e| {
        let mut m = vec![vec![0; n]; n];
        for i in 0..n {
            for j in i..n {
                m[i][j] = e[i * n + j];
                m[j][i] = e[i * n + j];
            }
        }
        m
    })
}

fn square(n: usize, r: i64) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-r..=r, n), n)
}

fn vectors(n: usize, max: usize) -> impl Strategy<Value = Vec<RatVec>> {
    prop::collection::vec(prop::collection::vec(-2i64..=2, n), 0..=max)
        .prop_map(|vs| vs.iter().map(|v| int_vec(v)).collect())
}

fn anisotropic(l: QuadLattice, r: i64) -> impl Strategy<Value = RatVec> {
    let n = l.rank();
    prop::collection::vec(-r..=r, n)
        .prop_filter("anisotropic", move |x| l.eval_form(x, x).unwrap() != 0)
        .prop_map(|x| int_vec(&x))
}

fn b23() -> QuadLattice {
    bpq(2, 3)
}

fn mat_i128(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] as i128 * b[k][j] as i128).sum::<i128>() as i64).collect())
        .collect()
}

fn transpose(a: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i]).collect()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn sylvester_invariance((gram, g) in (1usize..=5).prop_flat_map(|n| (symmetric(n), square(n, 3)))) {
        let gq = RationalMatrix::from_i64_rows(&g);
        prop_assume!(!gq.determinant().unwrap().is_zero());
        prop_assume!(classify_gram(&gram).is_ok());
        let congruent = mat_i128(&mat_i128(&transpose(&g), &gram), &g);
        let a = classify_gram(&gram).unwrap();
        let b = classify_gram(&congruent).unwrap();
        prop_assert_eq!(a.signature, b.signature);
        // same count via the rational diagonalization
        let i = inertia(&RationalMatrix::from_i64_rows(&gram));
        prop_assert_eq!((i.plus, i.minus), a.signature);
    }

    #[test]
    fn combine_adds_signatures(p1 in 1usize..4, q1 in 1usize..4, p2 in 1usize..4, q2 in 1usize..4) {
        let a = bpq(p1, q1);
        let b = bpq(p2, q2);
        prop_assert_eq!(combine(&a, &b, false).classify().signature, (p1 + p2, q1 + q2));
        prop_assert_eq!(combine(&a, &a, true).classify().signature, (p1 + q1, q1 + p1));
    }

    #[test]
    fn dimension_formula(a in vectors(5, 5), b in vectors(5, 5)) {
        let a = Subspace::from_vectors(5, &a).unwrap();
        let b = Subspace::from_vectors(5, &b).unwrap();
        prop_assert_eq!(a.intersect(&b).unwrap().dim() + a.join(&b).unwrap().dim(), a.dim() + b.dim());
    }

    #[test]
    fn perp_involution(p in 1usize..4, q in 1usize..4, vs in vectors(7, 7)) {
        let l = bpq(p, q);
        let n = p + q;
        let vs: Vec<RatVec> = vs.into_iter().map(|mut v| { v.truncate(n); v }).collect();
        let a = Subspace::from_vectors(n, &vs).unwrap();
        let pp = a.perp(&l).unwrap().perp(&l).unwrap();
        prop_assert_eq!(pp, a);
    }

    #[test]
    fn canonical_basis(vs in vectors(5, 4), mix in square(4, 3)) {
        let a = Subspace::from_vectors(5, &vs).unwrap();
        let k = a.dim();
        let m = RationalMatrix::from_i64_rows(&mix.iter().take(k).map(|r| r[..k].to_vec()).collect::<Vec<_>>());
        prop_assume!(k == 0 || !m.determinant().unwrap().is_zero());
        let scrambled = if k == 0 { a.basis().clone() } else { &m * a.basis() };
        let b = Subspace::span(&scrambled);
        prop_assert_eq!(b.basis(), a.basis());
    }

    #[test]
    fn inertia_additivity(p in 1usize..4, q in 1usize..4, vs in vectors(7, 3), ws in vectors(7, 3)) {
        let l = bpq(p, q);
        let n = p + q;
        let cut = |v: Vec<RatVec>| -> Vec<RatVec> { v.into_iter().map(|mut x| { x.truncate(n); x }).collect() };
        let a = Subspace::from_vectors(n, &cut(vs)).unwrap();
        let perp = a.perp(&l).unwrap();
        // project the second family into a^perp by intersecting spans
        let b = Subspace::from_vectors(n, &cut(ws)).unwrap().intersect(&perp).unwrap();
        prop_assume!(a.intersect(&b).unwrap().dim() == 0);
        prop_assert!(a.is_orthogonal_to(&b, &l).unwrap());
        let sum = a.join(&b).unwrap();
        prop_assert_eq!(
            sum.restricted_definiteness(&l).unwrap(),
            a.restricted_definiteness(&l).unwrap() + b.restricted_definiteness(&l).unwrap()
        );
    }

    #[test]
    fn reflection_properties(x in anisotropic(b23(), 4), c in prop_oneof![-5i64..=-1, 1i64..=5], d in 1i64..=4) {
        let l = b23();
        let r = reflection(&x, &l).unwrap();
        prop_assert!((r.matrix() * r.matrix()).is_identity());
        prop_assert_eq!(r.det(), -1);
        prop_assert_eq!(r.matrix().determinant().unwrap(), int(-1));
        let cx: RatVec = x.iter().map(|t| t * rat(c, d)).collect();
        prop_assert_eq!(reflection(&cx, &l).unwrap(), r.clone());
        let expected = if l.norm(&x).unwrap() > int(0) { 1 } else { -1 };
        prop_assert_eq!(spinor_norm(&r).real_sign, expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cartan_dieudonne_reconstructs(xs in prop::collection::vec(anisotropic(b23(), 3), 1..=6)) {
        let l = b23();
        let g = Isometry::from_matrix(reflection_product(&xs, &l).unwrap(), &l).unwrap();
        let factors = cartan_dieudonne(&g);
        prop_assert!(factors.len() <= 2 * l.rank());
        prop_assert_eq!(&reflection_product(&factors, &l).unwrap(), g.matrix());
        // independence of the factorization
        prop_assert_eq!(spinor_norm_of(&factors, &l).unwrap(), spinor_norm_of(&xs, &l).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn spinor_multiplicative(
        xs in prop::collection::vec(anisotropic(b23(), 3), 1..=3),
        ys in prop::collection::vec(anisotropic(b23(), 3), 1..=3),
        y in anisotropic(b23(), 3),
    ) {
        let l = b23();
        let g = Isometry::from_matrix(reflection_product(&xs, &l).unwrap(), &l).unwrap();
        let h = Isometry::from_matrix(reflection_product(&ys, &l).unwrap(), &l).unwrap();
        prop_assert_eq!(spinor_norm(&g.compose(&h).unwrap()), spinor_norm(&g).mul(&spinor_norm(&h)));
        // inserting R^y R^y changes the factorization but not g
        let mut longer = xs.clone();
        longer.push(y.clone());
        longer.push(y);
        prop_assert_eq!(&reflection_product(&longer, &l).unwrap(), g.matrix());
        prop_assert_eq!(spinor_norm_of(&longer, &l).unwrap(), spinor_norm(&g));
    }
}
