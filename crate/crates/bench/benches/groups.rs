use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use hb_core::{all_subgroups, brute_force_subgroups, character_table, make_ambient, subgroup_domain, verify_elementary};

fn enumeration(c: &mut Criterion) {
    let mut g = c.benchmark_group("enumerate");
    for n in [4u32, 8, 16] {
        g.bench_with_input(BenchmarkId::new("parameterized", n), &n, |b, &n| {
            b.iter(|| all_subgroups(black_box(n), black_box(n), None).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("brute_force", n), &n, |b, &n| {
            b.iter(|| brute_force_subgroups(black_box(n), black_box(n)).unwrap())
        });
    }
    g.finish();
}

fn domains(c: &mut Criterion) {
    let ambient = make_ambient(6, 6).unwrap();
    let list = all_subgroups(6, 6, None).unwrap();
    c.bench_function("domains/verify_all_6x6", |b| {
        b.iter(|| {
            list.iter()
                .all(|h| verify_elementary(&subgroup_domain(&ambient, h).unwrap(), h).unwrap().pass)
        })
    });
}

fn characters(c: &mut Criterion) {
    let g = make_ambient(8, 8).unwrap();
    c.bench_function("characters/table_8x8", |b| b.iter(|| character_table(black_box(&g)).unwrap()));
}

criterion_group!(benches, enumeration, domains, characters);
criterion_main!(benches);
