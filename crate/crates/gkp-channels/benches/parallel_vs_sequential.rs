use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use gkp_channels::decoders::{optimize_decoder, Decoder, DEFAULT_HALF_WIDTH};
use gkp_channels::fock_oracle::{wigner_raster, FockCode, FockConfig, GridSpec};
use gkp_channels::grn_channel::{gamma_grn_avg_with, GrnVariance, GRN_CONV_TOL, GRN_NODES};
use gkp_channels::ptd_channel::{average, PtdKernel, QuadratureSpec};
use gkp_channels::Exec;
use std::time::Duration;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn sb_average(c: &mut Criterion) {
    let k = PtdKernel::new(0.4).unwrap();
    let mut g = c.benchmark_group("sb_average_beta0.4");
    for (name, exec) in MODES {
        let spec = QuadratureSpec { certify: false, exec, ..QuadratureSpec::default() };
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| average(black_box(&k), &Decoder::StandardBinning, &spec).unwrap())
        });
    }
    g.finish();
}

fn decoder_table(c: &mut Criterion) {
    let k = PtdKernel::new(0.3).unwrap();
    let mut g = c.benchmark_group("decoder_table_41");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| optimize_decoder(0.3, 41, DEFAULT_HALF_WIDTH, |s| Ok(k.gamma_syn(s)), exec).unwrap())
        });
    }
    g.finish();
}

fn grn_average(c: &mut Criterion) {
    let v = GrnVariance::explicit(0.05).unwrap();
    let mut g = c.benchmark_group("grn_average");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| gamma_grn_avg_with(black_box(v), GRN_NODES, GRN_CONV_TOL, exec).unwrap())
        });
    }
    g.finish();
}

fn wigner(c: &mut Criterion) {
    let cfg = FockConfig { n_max: 80, ..FockConfig::default() };
    let code = FockCode::new(0.4, &cfg).unwrap();
    let state = vec![(1.0, code.word(0).to_vec())];
    let grid = GridSpec { q_range: (-6.0, 6.0), p_range: (-6.0, 6.0), resolution: 25 };
    let mut g = c.benchmark_group("wigner_raster_25");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| wigner_raster(black_box(&state), &grid, exec).unwrap()));
    }
    g.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10).measurement_time(Duration::from_secs(5));
    targets = sb_average, decoder_table, grn_average, wigner
}
criterion_main!(benches);
