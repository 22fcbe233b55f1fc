use std::collections::BTreeSet;

use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vanet_core::crypto::{encode_id, EgGroup, EgKeyPair, SsKeyPair};
use vanet_core::edge::{detect_poc_excluding, filter_dsg};
use vanet_core::messages::{Message, PlainReport, Wire};
use vanet_core::oracle::random_instance;
use vanet_core::sim::{presets, run, ModelKind};
use vanet_core::{Event, VehicleId};

fn crypto(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let ss = SsKeyPair::generate(128, &mut rng);
    let pk = ss.public_key();
    let m = encode_id(&VehicleId::new("CAR00042").unwrap());
    let ct = pk.encrypt(&m).unwrap();
    c.bench_function("ss_encrypt_id", |b| b.iter(|| pk.encrypt(black_box(&m)).unwrap()));
    c.bench_function("ss_decrypt_id", |b| b.iter(|| ss.decrypt(black_box(&ct))));

    let keys = EgKeyPair::generate(&EgGroup::standard(), &mut rng);
    let msg = b"congested at RSU001";
    let sig = keys.sign(msg, &mut rng).to_bytes();
    c.bench_function("eg_sign", |b| b.iter(|| keys.sign(black_box(msg), &mut rng)));
    c.bench_function("eg_verify", |b| b.iter(|| keys.public().verify_bytes(black_box(msg), &sig)));
}

fn graph(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let graphs: Vec<_> = (0..64).map(|_| random_instance(&mut rng, 12).dsg()).collect();
    let none = BTreeSet::new();
    c.bench_function("detect_poc_12", |b| {
        b.iter(|| graphs.iter().filter(|g| detect_poc_excluding(g, &none).is_some()).count())
    });
    c.bench_function("filter_dsg_12", |b| {
        b.iter(|| {
            for g in &graphs {
                let first = g.ids().next().unwrap().clone();
                black_box(filter_dsg(g, &first));
            }
        })
    });
}

fn wire(c: &mut Criterion) {
    let frame = Message::Report(PlainReport { v_id: VehicleId::numbered(7), event: Event::Congested }).to_bytes();
    c.bench_function("decode_report", |b| b.iter(|| Message::from_bytes(black_box(&frame)).unwrap()));
}

fn simulation(c: &mut Criterion) {
    let mut g = c.benchmark_group("simulation");
    g.sample_size(10);
    g.bench_function("accuracy_point_proposed", |b| {
        b.iter_batched(|| presets::accuracy(0, ModelKind::Proposed, 30.0), |s| run(&s).unwrap(), BatchSize::SmallInput)
    });
    g.bench_function("census_upper_100", |b| {
        b.iter_batched(
            || presets::census(ModelKind::Proposed, 100, 3, true),
            |s| run(&s).unwrap(),
            BatchSize::SmallInput,
        )
    });
    g.finish();
}

criterion_group!(benches, crypto, graph, wire, simulation);
criterion_main!(benches);
