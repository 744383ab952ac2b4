use criterion::{black_box, criterion_group, criterion_main, Criterion};
use geocycle::arrangement::{auto_spec, intersection_matrix, search_parameters, BoostParams};
use geocycle::exactla::rational::int_vec;
use geocycle::exactla::RationalMatrix;
use geocycle::isometry::{cartan_dieudonne, reflection_product, spinor_norm, Isometry};
use geocycle::obstruct::enumerate_roots;
use geocycle::qlattice::{standard_lattice, LatticeKind};
use geocycle::signcalc::{pi_k_matrix, AdmissibleV};
use rand::SeedableRng;

fn roots(c: &mut Criterion) {
    let e8 = standard_lattice(LatticeKind::E8Neg, None).unwrap();
    c.bench_function("enumerate_roots -E8 bound 6", |b| b.iter(|| enumerate_roots(black_box(&e8), 6)));
}

fn arrangement(c: &mut Criterion) {
    let spec = auto_spec(3, 4, 5).unwrap();
    c.bench_function("intersection_matrix (3,4) n=5", |b| b.iter(|| intersection_matrix(black_box(&spec)).unwrap()));
    let boost = BoostParams::standard();
    c.bench_function("search_parameters n=1e6 (exhausts)", |b| {
        b.iter(|| search_parameters(2, 3, black_box(1_000_000), &boost).unwrap_err())
    });
}

fn signs(c: &mut Criterion) {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let vs: Vec<(usize, usize, AdmissibleV)> = (1..=6)
        .flat_map(|p| (p..=6).map(move |q| (p, q)))
        .map(|(p, q)| (p, q, AdmissibleV::random(p, q, &mut rng).unwrap()))
        .collect();
    c.bench_function("pi_k_matrix sweep p<=q<=6", |b| {
        b.iter(|| {
            for (p, q, v) in &vs {
                black_box(pi_k_matrix(*p, *q, v).unwrap());
            }
        })
    });
}

fn isometries(c: &mut Criterion) {
    let l = standard_lattice(LatticeKind::Bpq, Some((2, 3))).unwrap();
    let xs = vec![int_vec(&[1, 2, 0, 1, 1]), int_vec(&[0, 1, 1, 2, 0]), int_vec(&[2, 1, 1, 0, 1])];
    let g = Isometry::from_matrix(reflection_product(&xs, &l).unwrap(), &l).unwrap();
    c.bench_function("cartan_dieudonne B_{2,3}", |b| b.iter(|| cartan_dieudonne(black_box(&g))));
    c.bench_function("spinor_norm B_{2,3}", |b| b.iter(|| spinor_norm(black_box(&g))));
    let k3 = standard_lattice(LatticeKind::K3, None).unwrap();
    c.bench_function("determinant K3 gram", |b| {
        b.iter(|| RationalMatrix::determinant(black_box(k3.gram_q())).unwrap())
    });
}

criterion_group!(benches, roots, arrangement, signs, isometries);
criterion_main!(benches);
