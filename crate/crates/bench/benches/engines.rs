use criterion::{black_box, criterion_group, criterion_main, Criterion};

use qhe_bench::{reference_cell, reference_laser};
use qhe_core::oracle::{self, RootBracket};
use qhe_core::{lwi, photocell, CellVariant};

fn laser(c: &mut Criterion) {
    let config = reference_laser();
    c.bench_function("exact_coherent_efficiency", |b| {
        b.iter(|| lwi::exact_coherent_efficiency(black_box(&config), 0.1))
    });
    let bracket = RootBracket::laser_default(&config);
    c.bench_function("threshold_root_solve", |b| {
        b.iter(|| oracle::threshold_root_solve(black_box(&config), 0.1, &bracket))
    });
}

fn photocell_curves(c: &mut Criterion) {
    let (cell, rates) = reference_cell(CellVariant::ThreeLevelCoherent);
    c.bench_function("steady_state_at_rates", |b| {
        b.iter(|| photocell::steady_state_at_rates(black_box(&cell), &rates))
    });
    c.bench_function("power_current_curve_256", |b| {
        b.iter(|| photocell::power_current_curve(black_box(&cell), &rates, 256))
    });
    c.bench_function("max_power_point", |b| {
        b.iter(|| photocell::max_power_point(black_box(&cell), &rates, 256))
    });
}

fn relaxation(c: &mut Criterion) {
    let (cell, rates) = reference_cell(CellVariant::ThreeLevelCoherent);
    let generator = photocell::CellModel::new(&cell, &rates)
        .unwrap()
        .generator(rates.extraction_rate)
        .unwrap();
    c.bench_function("relax_three_level", |b| {
        b.iter(|| oracle::relax(black_box(&generator), 1e-14))
    });
}

criterion_group!(benches, laser, photocell_curves, relaxation);
criterion_main!(benches);
