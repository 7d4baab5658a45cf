use criterion::{criterion_group, criterion_main, Criterion};

use betarep_bench::{digits, system};
use betarep_core::engine::{represent, DomainSpec, Policy};
use betarep_core::parse::{parse_minpoly, parse_rational};
use betarep_core::spectrum::enumerate_spectrum;
use betarep_core::{NumberField, PrecCtx};

fn bench_represent(c: &mut Criterion) {
    let mut g = c.benchmark_group("represent");
    g.sample_size(20);

    let binary = system("x-2");
    let bd = digits(&binary, "0..1");
    let x = binary.field().from_rational(parse_rational("1/3").unwrap());
    let dom = DomainSpec::for_value(&binary, bd, parse_rational("1/16").unwrap(), &x).unwrap();
    let policy = Policy::default();
    g.bench_function("binary_one_third", |b| {
        b.iter(|| represent(&binary, &dom, &x, &policy).unwrap())
    });

    let golden = system("x^2-x-1");
    let gd = digits(&golden, "0..1");
    let x = golden.field().from_rational(parse_rational("13/21").unwrap());
    let dom = DomainSpec::for_value(&golden, gd, parse_rational("1/16").unwrap(), &x).unwrap();
    g.bench_function("golden_13_over_21", |b| {
        b.iter(|| represent(&golden, &dom, &x, &policy).unwrap())
    });

    let salem = system("x^4-x^3-x^2-x+1");
    let sd = digits(&salem, "-2..2");
    let x = salem.field().from_rational(parse_rational("1/7").unwrap());
    let dom = DomainSpec::for_value(&salem, sd, parse_rational("1/16").unwrap(), &x).unwrap();
    g.bench_function("salem_one_seventh", |b| {
        b.iter(|| represent(&salem, &dom, &x, &policy).unwrap())
    });

    g.finish();
}

fn bench_root_isolation(c: &mut Criterion) {
    let lehmer = parse_minpoly("x^10+x^9-x^7-x^6-x^5-x^4-x^3+x+1").unwrap();
    c.bench_function("isolate_lehmer_degree_ten", |b| {
        b.iter(|| NumberField::new(lehmer.clone(), PrecCtx::default()).unwrap())
    });
}

fn bench_spectrum(c: &mut Criterion) {
    let golden = system("x^2-x-1");
    let gd = digits(&golden, "0..1");
    let mut g = c.benchmark_group("spectrum");
    g.sample_size(10);
    g.bench_function("golden_level_ten", |b| {
        b.iter(|| enumerate_spectrum(&golden, &gd, 10, None, 1 << 20).unwrap())
    });
    g.finish();
}

criterion_group!(benches, bench_represent, bench_root_isolation, bench_spectrum);
criterion_main!(benches);
