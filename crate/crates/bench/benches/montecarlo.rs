use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use ratiolist::analysis::{mc_list_error, DecoderSpec};
use ratiolist::channel::Channel;
use ratiolist::decoding::Metric;
use ratiolist_bench::{bsc_instance, matched};

fn decode_trials(c: &mut Criterion) {
    // packed distance path: binary channel, matched metric
    let (channel, codebook) = bsc_instance(20, 4096, 11);
    let metric = matched(&channel);
    c.bench_function("mc_list_error_packed_n20_m4096_t100", |b| {
        b.iter(|| {
            mc_list_error(
                black_box(&channel),
                black_box(&codebook),
                &metric,
                &DecoderSpec::top_l(32),
                100,
                3,
            )
            .unwrap()
        })
    });

    // generic scoring path: erasure channel keeps the packed engine off
    let bec = Channel::bec(0.2).unwrap();
    let (_, codebook) = bsc_instance(12, 256, 13);
    let erasures = Metric::ErasuresOnly(bec.clone());
    c.bench_function("mc_list_error_generic_n12_m256_t100", |b| {
        b.iter(|| {
            mc_list_error(
                black_box(&bec),
                black_box(&codebook),
                &erasures,
                &DecoderSpec::top_l(8),
                100,
                3,
            )
            .unwrap()
        })
    });
}

criterion_group!(benches, decode_trials);
criterion_main!(benches);
