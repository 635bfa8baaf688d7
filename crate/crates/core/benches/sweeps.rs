use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ves_core::rte::{run_square_wave_numeric, square_wave_result, NumericOptions};
use ves_core::sweep::{log_grid, map_sequential};
use ves_core::verify::{draw_plant, trial_rng};
use ves_core::{ChargeDischargeFlows, Phase, Plant, ScheduleSpec, VesCoefficients};

fn numeric_point(v: &VesCoefficients, delta_p: f64, t_p: f64) -> f64 {
    let opts = NumericOptions {
        record_trace: false,
        ..NumericOptions::default()
    };
    let spec = ScheduleSpec::new(delta_p, t_p, 1, Phase::DownUp).unwrap();
    run_square_wave_numeric(&spec, v, &opts).unwrap().1.eta_rt
}

fn closed_form_draw(i: &usize) -> f64 {
    let mut rng = trial_rng(1, 0, *i);
    let plant = draw_plant(&mut rng, true);
    let v = VesCoefficients::new(&plant);
    let flows = ChargeDischargeFlows::new(&v, 0.2 * plant.baseline.p_hvac_b).unwrap();
    let spec = ScheduleSpec::new(flows.delta_p, 1800.0, 10, Phase::UpDown).unwrap();
    square_wave_result(&spec, &flows).unwrap().eta_rt
}

fn numeric_curve(c: &mut Criterion) {
    let plant = Plant::reference().with_r_oa(0.5).unwrap();
    let v = VesCoefficients::new(&plant);
    let delta_p = 0.2 * plant.baseline.p_hvac_b;
    let mut group = c.benchmark_group("numeric_tp_curve");
    group.sample_size(10);
    for points in [15, 60] {
        let grid = log_grid(60.0, 18_000.0, points);
        group.bench_with_input(BenchmarkId::new("sequential", points), &grid, |b, g| {
            b.iter(|| map_sequential(black_box(g), |t| numeric_point(&v, delta_p, *t)))
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", points), &grid, |b, g| {
            b.iter(|| {
                ves_core::sweep::map_parallel(black_box(g), |t| numeric_point(&v, delta_p, *t))
            })
        });
    }
    group.finish();
}

fn random_draws(c: &mut Criterion) {
    let mut group = c.benchmark_group("closed_form_draws");
    for n in [1_000usize, 10_000] {
        let idx: Vec<usize> = (0..n).collect();
        group.bench_with_input(BenchmarkId::new("sequential", n), &idx, |b, idx| {
            b.iter(|| map_sequential(black_box(idx), closed_form_draw))
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("parallel", n), &idx, |b, idx| {
            b.iter(|| ves_core::sweep::map_parallel(black_box(idx), closed_form_draw))
        });
    }
    group.finish();
}

criterion_group!(benches, numeric_curve, random_draws);
criterion_main!(benches);
