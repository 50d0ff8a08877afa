use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion, Throughput};

use sbvr2ocl_bench::{Fixture, BANK_VOCAB};
use sbvr2ocl_core::eval::{CompiledInvariant, CompiledRule, EnumConfig, Enumerator, Schema};
use sbvr2ocl_core::mapper::map_rule;
use sbvr2ocl_core::ocl::{print_ocl_file, typecheck};
use sbvr2ocl_core::sbvr::parse_rules;
use sbvr2ocl_core::transpile;
use sbvr2ocl_core::vocabulary::load_vocabulary;

fn front_end(c: &mut Criterion) {
    let f = Fixture::bank();
    let mut g = c.benchmark_group("front_end");
    g.throughput(Throughput::Elements(f.rules.len() as u64));
    g.bench_function("load_vocabulary", |b| b.iter(|| load_vocabulary(black_box(BANK_VOCAB)).unwrap()));
    g.bench_function("parse_rules", |b| b.iter(|| parse_rules(black_box(f.source), &f.vocab)));
    g.finish();
}

fn back_end(c: &mut Criterion) {
    let f = Fixture::bank();
    let constraints: Vec<_> = f
        .rules
        .iter()
        .filter_map(|r| map_rule(r, &f.vocab, &f.model).constraint)
        .collect();
    let mut g = c.benchmark_group("back_end");
    g.throughput(Throughput::Elements(f.rules.len() as u64));
    g.bench_function("map_rule", |b| {
        b.iter(|| {
            for r in &f.rules {
                black_box(map_rule(r, &f.vocab, &f.model));
            }
        })
    });
    g.bench_function("typecheck", |b| {
        b.iter(|| {
            for con in &constraints {
                black_box(typecheck(con, &f.model).unwrap());
            }
        })
    });
    g.bench_function("print", |b| b.iter(|| print_ocl_file(black_box(&constraints))));
    g.bench_function("transpile", |b| b.iter(|| transpile(black_box(f.source), &f.vocab, &f.model)));
    g.finish();
}

fn evaluation(c: &mut Criterion) {
    let f = Fixture::oracle();
    let schema = Schema::new(&f.model);
    let cfg = EnumConfig { max_per_class: 1, include_missing: true, ..EnumConfig::default() };
    let compiled: Vec<_> = f
        .rules
        .iter()
        .map(|r| {
            let con = map_rule(r, &f.vocab, &f.model).constraint.unwrap();
            (
                CompiledRule::new(r, &schema).unwrap(),
                CompiledInvariant::new(&con, &f.model, &schema).unwrap(),
            )
        })
        .collect();

    let mut g = c.benchmark_group("evaluation");
    g.bench_function("enumerate", |b| {
        b.iter_batched(
            || Enumerator::new(&schema, &cfg).unwrap(),
            |mut e| {
                let mut n = 0u64;
                while e.next().is_some() {
                    n += 1;
                }
                n
            },
            BatchSize::SmallInput,
        )
    });
    g.bench_function("compare_all_rules", |b| {
        b.iter_batched(
            || Enumerator::new(&schema, &cfg).unwrap(),
            |mut e| {
                let mut agree = 0u64;
                while let Some(p) = e.next() {
                    for (sbvr, ocl) in &compiled {
                        agree += u64::from(ocl.eval(p).as_bool() == Some(sbvr.eval(p)));
                    }
                }
                agree
            },
            BatchSize::SmallInput,
        )
    });
    g.finish();
}

criterion_group!(benches, front_end, back_end, evaluation);
criterion_main!(benches);
