use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use htnact::acting::exec_all;
use htnact::fixtures;
use htnact::io::parse_domain;
use htnact::oracle::Oracle;
use htnact::strategy::{RandomStrategy, ScriptedStrategy};
use htnact::trace::run;
use htnact::verify::{equivalence, Search, DEFAULT_MAX_NODES};
use htnact::ExecOptions;
use htnact_bench::{random, rover};

fn parsing(c: &mut Criterion) {
    c.bench_function("parse rover.htn", |b| b.iter(|| parse_domain(black_box(fixtures::ROVER_HTN)).unwrap()));
}

fn stepping(c: &mut Criterion) {
    let inst = rover();
    c.bench_function("exec_all on the rover start", |b| {
        b.iter(|| exec_all(&inst.engine, black_box(&inst.initial), ExecOptions::default()))
    });
    c.bench_function("scripted walkthrough", |b| {
        b.iter(|| {
            let mut s = ScriptedStrategy::new(fixtures::walkthrough_choices());
            run(&inst.engine, inst.initial.clone(), &mut s, 100, ExecOptions::default()).unwrap()
        })
    });
    let instances = random(20);
    c.bench_function("random runs on 20 generated problems", |b| {
        b.iter(|| {
            for (k, i) in instances.iter().enumerate() {
                let mut s = RandomStrategy::new(k as u64);
                black_box(run(&i.engine, i.initial.clone(), &mut s, 300, ExecOptions::default()).unwrap());
            }
        })
    });
}

fn exhaustive(c: &mut Criterion) {
    let inst = rover();
    c.bench_function("oracle on rover, depth 3", |b| {
        let oracle = Oracle::new(&inst.engine.domain, &inst.engine.universe);
        b.iter(|| oracle.solutions_bounded(&inst.initial.network, &inst.initial.state, 3).unwrap())
    });
    c.bench_function("all traces of rover", |b| {
        b.iter(|| Search::new(&inst.engine, DEFAULT_MAX_NODES).outcomes(&inst.initial).unwrap())
    });
    let instances = random(10);
    let mut g = c.benchmark_group("suites");
    g.sample_size(10);
    g.bench_function("equivalence on 10 generated problems", |b| b.iter(|| equivalence(&instances)));
    g.finish();
}

criterion_group!(benches, parsing, stepping, exhaustive);
criterion_main!(benches);
