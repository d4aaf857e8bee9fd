//! Benchmarks for the enumeration-heavy primitives: Jordan types from rank
//! sequences, the bordered-matrix edge counts, orbit classification sweeps,
//! Hall-Littlewood expansions, and one parabolic induction matrix.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use std::sync::Arc;

use finq_core::field::{Fe, FieldSpec};
use finq_core::matrix::{jordan_type, Matrix};
use finq_core::orbit::{classify_gl, count_k, count_l};
use finq_core::parabolic::{build_parabolic, levi_pairs, par_induce, InvariantFn, SettingKind};
use finq_core::partition::Partition;
use finq_core::symfunc::{hl_q, xi_coeff, TParam};

fn f(q: u64) -> Arc<FieldSpec> {
    FieldSpec::parse_q(&q.to_string()).unwrap()
}

fn bench_jordan_type(c: &mut Criterion) {
    let f3 = f(3);
    // a busy nilpotent 6x6 matrix
    let mut m = Matrix::zero(6, 6, f3.clone());
    for i in 0..5 {
        m.set(i, i + 1, Fe::ONE);
    }
    m.set(0, 3, Fe(2));
    m.set(1, 4, Fe(1));
    c.bench_function("jordan_type 6x6 F_3", |b| {
        b.iter(|| jordan_type(black_box(&m)).unwrap())
    });
}

fn bench_classify(c: &mut Criterion) {
    let f3 = f(3);
    let m = Matrix::from_ints(
        f3.clone(),
        &[&[1, 2, 0, 1], &[0, 1, 1, 0], &[2, 0, 1, 1], &[0, 0, 2, 2]],
    );
    c.bench_function("classify_gl 4x4 F_3", |b| {
        b.iter(|| classify_gl(black_box(&m)).unwrap())
    });
}

fn bench_count_l(c: &mut Criterion) {
    let f3 = f(3);
    let mu = Partition::new(vec![2, 1, 1]);
    let lam = Partition::new(vec![2, 2, 1]);
    c.bench_function("count_l mu=[2,1,1] q=3", |b| {
        b.iter(|| count_l(black_box(&lam), black_box(&mu), &f3).unwrap())
    });
}

fn bench_count_k(c: &mut Criterion) {
    let f9 = FieldSpec::new(3, 2).unwrap();
    let mu = Partition::new(vec![1, 1]);
    let lam = Partition::new(vec![2, 1, 1]);
    c.bench_function("count_k mu=[1,1] q=3", |b| {
        b.iter(|| count_k(black_box(&lam), black_box(&mu), &f9).unwrap())
    });
}

fn bench_hl(c: &mut Criterion) {
    c.bench_function("hl_q [3,2,1] symbolic", |b| {
        let lam = Partition::new(vec![3, 2, 1]);
        b.iter(|| hl_q(black_box(&lam), &TParam::Symbolic, 6).unwrap())
    });
    c.bench_function("xi_coeff [4,2]/[2,2] t=1/3", |b| {
        let lam = Partition::new(vec![4, 2]);
        let mu = Partition::new(vec![2, 2]);
        let t = finq_core::ratio::q_ratio(1, 3);
        b.iter(|| xi_coeff(black_box(&lam), black_box(&mu), &t).unwrap())
    });
}

fn bench_induce(c: &mut Criterion) {
    let f3 = f(3);
    let p = build_parabolic(SettingKind::Gl, &f3, 1, 2).unwrap();
    let ((la, lb), _, _) = levi_pairs(&p).unwrap().into_iter().next().unwrap();
    let phi = InvariantFn::levi_indicator(SettingKind::Gl, 1, 2, la, lb);
    c.bench_function("par_induce gl(3) split (1,2) q=3", |b| {
        b.iter(|| par_induce(black_box(&phi), &p).unwrap())
    });
}

criterion_group!(
    benches,
    bench_jordan_type,
    bench_classify,
    bench_count_l,
    bench_count_k,
    bench_hl,
    bench_induce
);
criterion_main!(benches);
