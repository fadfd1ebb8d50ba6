use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use eave_bench::Fixture;
use eave_core::schemes::{assemble, solve, SchemeKind};
use eave_core::vem::StabChoice;

fn assembly(c: &mut Criterion) {
    let mut group = c.benchmark_group("assemble");
    for r in [16, 32, 64] {
        let fx = Fixture::new(r);
        let cases = [
            ("fe", SchemeKind::Fe, &fx.triangles),
            ("eafe", SchemeKind::Eafe, &fx.triangles),
            ("eave-sv", SchemeKind::Eave(StabChoice::DofScalar), &fx.voronoi),
            ("meave", SchemeKind::Meave, &fx.hexa_dual),
        ];
        for (name, kind, mesh) in cases {
            group.bench_with_input(BenchmarkId::new(name, r), mesh, |b, m| {
                b.iter(|| assemble(kind, black_box(m), &fx.spec).unwrap())
            });
        }
    }
    group.finish();
}

fn assemble_and_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    group.sample_size(20);
    for r in [16, 32] {
        let fx = Fixture::new(r);
        let system = assemble(SchemeKind::Meave, &fx.hexa_dual, &fx.spec).unwrap();
        group.bench_with_input(BenchmarkId::new("meave", r), &system, |b, s| b.iter(|| solve(black_box(s)).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, assembly, assemble_and_solve);
criterion_main!(benches);
