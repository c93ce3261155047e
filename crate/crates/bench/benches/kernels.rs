use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use iwk_core::epsilon::{gauss_sum, XiSign};
use iwk_core::iwasawa::{DeRhamChar, IwasawaCtx, IwasawaElt};
use iwk_core::regulator::{cyclo_regulator, dlog, twist_ladder, ColemanSeries};
use iwk_core::series::Series;

const P: u32 = 5;
const PREC: u32 = 30;
const D: usize = 64;
const D_T: usize = 32;

fn sample(ctx: &IwasawaCtx) -> Series {
    let coeffs: Vec<i64> = (0..D as i64).map(|i| (7 * i * i + 3 * i + 1) % 97).collect();
    Series::from_i64s(ctx.padic(), D, &coeffs)
}

fn series_kernels(c: &mut Criterion) {
    let ctx = IwasawaCtx::new(P, PREC, D_T, D).unwrap();
    let f = sample(&ctx);
    let g = f.phi();
    c.bench_function("series_mul", |b| b.iter(|| black_box(&f).mul(black_box(&g))));
    c.bench_function("series_phi", |b| b.iter(|| black_box(&f).phi()));
    c.bench_function("series_psi", |b| b.iter(|| black_box(&f).psi()));
    c.bench_function("twist_ladder_r3", |b| b.iter(|| twist_ladder(black_box(&g.sub(&g.psi().phi())), 3).unwrap()));
}

fn iwasawa_kernels(c: &mut Criterion) {
    let ctx = IwasawaCtx::new(P, PREC, D_T, D).unwrap();
    let y = dlog(&ColemanSeries::g_c(ctx.padic(), D, 2).unwrap()).unwrap();
    let reg = cyclo_regulator(&ctx, &y, 1).unwrap();
    let m: &IwasawaElt = &reg.measure;
    c.bench_function("elt_mul", |b| b.iter(|| black_box(m).mul(black_box(m))));
    c.bench_function("elt_twist", |b| b.iter(|| black_box(m).twist(3)));
    c.bench_function("cyclo_regulator_level1", |b| b.iter(|| cyclo_regulator(&ctx, black_box(&y), 1).unwrap()));
    let eta = DeRhamChar::new(ctx.padic(), 0, 1, 1, 1).unwrap();
    c.bench_function("gauss_sum_conductor_p2", |b| b.iter(|| gauss_sum(&ctx, black_box(&eta), XiSign::Plus).unwrap()));
}

criterion_group!(benches, series_kernels, iwasawa_kernels);
criterion_main!(benches);
