// scratch exploration of acceptance-parameter choices; not part of the crate API
use std::sync::Arc;
use std::time::Instant;

use mfnls_core::data::{make_initial_data, DataRecipe, RecipeKind};
use mfnls_core::grid::GridSpec;
use mfnls_core::harness::{sweep_rate, SweepConfig};
use mfnls_core::potential::{
    measure_convolution_rate, GaussianProfile, ProfileParams, ProfileRegistry,
};
use mfnls_core::resonance::{self, WitnessParams};

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "conv".into());
    match which.as_str() {
        "conv" => conv_rates(),
        "sweep" => biscatter_1d(),
        "scan" => scan(),
        "witness" => witness(),
        "drift" => drift(),
        "boxdouble" => box_double(),
        "threed" => three_d(),
        other => eprintln!("unknown mode {other}"),
    }
}

fn three_d() {
    let pi = std::f64::consts::PI;
    let t0 = Instant::now();
    let grid = GridSpec::new(3, &[64, 64, 64], &[4.0 * pi; 3], true).unwrap();
    let gauss = Arc::new(GaussianProfile::new(3, 1.0, 0.35).unwrap());
    let recipe = DataRecipe::new(RecipeKind::SmoothRandom, 1.0, 1.0, 7, 8.0);
    let data = make_initial_data(&recipe, &grid).unwrap();
    println!("data built, {:?}", t0.elapsed());
    let mut sup = Vec::new();
    for n in [32u64, 128] {
        let pair =
            mfnls_core::harness::run_pair(&data, gauss.clone(), n, 0.2, 1.0, 1e-3, 100).unwrap();
        println!(
            "N = {n}: supDiff {:.6e} mass {:.2e} energy {:.2e}  ({:?})",
            pair.sup_diff,
            pair.cubic.mass_drift().max(pair.hartree.mass_drift()),
            pair.cubic.energy_drift().max(pair.hartree.energy_drift()),
            t0.elapsed()
        );
        sup.push(pair.sup_diff);
    }
    let ratio = sup[0] / sup[1];
    let slope_1d = 0.3696;
    let expected = 4f64.powf(slope_1d);
    println!(
        "ratio {:.4}, 1D-slope prediction {:.4}, consistency factor {:.3}",
        ratio,
        expected,
        (ratio / expected).max(expected / ratio)
    );
    println!("elapsed {:?}", t0.elapsed());
}

fn box_double() {
    let pi = std::f64::consts::PI;
    let t0 = Instant::now();

    // 1D sweeps at L and 2L with wavenumber-keyed data
    for (label, kind, cutoff) in [
        ("hq q=1", RecipeKind::HqLimited, 20.0),
        ("smooth", RecipeKind::SmoothRandom, 8.0),
    ] {
        let mut slopes = Vec::new();
        for (n, l) in [(512usize, 16.0 * pi), (1024, 32.0 * pi)] {
            let cfg = SweepConfig {
                grid: GridSpec::line(n, l, true).unwrap(),
                recipe: DataRecipe::new(kind, 1.0, 1.0, 7, cutoff),
                profile: Arc::new(GaussianProfile::new(1, 1.0, 0.35).unwrap()),
                beta: 0.2,
                n_list: (5..=10).map(|p| 1u64 << p).collect(),
                t_final: 1.0,
                dt: 1e-3,
                stride: 10,
                skip_dt_check: true,
            };
            slopes.push(sweep_rate(&cfg).unwrap().fit.slope);
        }
        println!(
            "sweep {label}: L slope {:.4}, 2L slope {:.4}, rel change {:.3e}",
            slopes[0],
            slopes[1],
            ((slopes[1] - slopes[0]) / slopes[0]).abs()
        );
    }

    // convolution rate at L and 2L
    let registry = ProfileRegistry::with_builtins();
    let shifted = registry
        .build(
            "shifted-gaussian",
            &ProfileParams {
                dim: 1,
                b0: 1.0,
                sigma: 0.5,
                shift: 0.5,
                radius: 1.0,
            },
        )
        .unwrap();
    let n_list: Vec<u64> = (4..=12).map(|p| 1u64 << p).collect();
    let mut slopes = Vec::new();
    for (n, l) in [(1024usize, 16.0 * pi), (2048, 32.0 * pi)] {
        let grid = GridSpec::line(n, l, false).unwrap();
        let smooth = make_initial_data(
            &DataRecipe::new(RecipeKind::SmoothRandom, 1.0, 1.0, 7, 8.0),
            &grid,
        )
        .unwrap();
        slopes.push(
            measure_convolution_rate(shifted.as_ref(), &smooth, 1.0, &n_list, 0.25)
                .unwrap()
                .slope,
        );
    }
    println!(
        "convrate: L slope {:.4}, 2L slope {:.4}, rel change {:.3e}",
        slopes[0],
        slopes[1],
        ((slopes[1] - slopes[0]) / slopes[0]).abs()
    );

    // witness: local slope between N=16 and 32, default vs refined grid
    let gauss3 = GaussianProfile::new(3, 1.0, 1.0).unwrap();
    let local_slope = |refine: bool| -> f64 {
        let f_at = |n: u64| -> f64 {
            let mut p = WitnessParams::new(n, 0.25, 1.0).unwrap();
            if refine {
                p = p.refined();
            }
            let grid = resonance::witness_grid(&p).unwrap();
            let d = resonance::build_resonant_datum(&p, &grid).unwrap();
            let f = resonance::duhamel_forcing(&d, &gauss3, 1.0, None).unwrap();
            mfnls_core::norms::sobolev_norm(&f, 1.0)
        };
        (f_at(32) / f_at(16)).ln() / 2f64.ln()
    };
    let coarse = local_slope(false);
    let fine = local_slope(true);
    println!(
        "witness local slope N=16..32: coarse {coarse:.4}, refined {fine:.4}, rel change {:.3e}",
        ((fine - coarse) / coarse).abs()
    );
    println!("elapsed {:?}", t0.elapsed());
}

fn scan() {
    let pi = std::f64::consts::PI;
    let grid = GridSpec::line(512, 16.0 * pi, true).unwrap();
    let n_list: Vec<u64> = (5..=10).map(|p| 1u64 << p).collect();
    for sigma in [0.35, 0.5, 0.7, 1.0, 1.4] {
        for cutoff in [10.0, 14.0, 20.0] {
            let gauss = Arc::new(GaussianProfile::new(1, 1.0, sigma).unwrap());
            let mut line = format!("sigma {sigma:.2} cutoff {cutoff:4.1}:");
            for (kind, c) in [
                (RecipeKind::HqLimited, cutoff),
                (RecipeKind::SmoothRandom, 8.0),
            ] {
                let cfg = SweepConfig {
                    grid: grid.clone(),
                    recipe: DataRecipe::new(kind, 1.0, 1.0, 7, c),
                    profile: gauss.clone(),
                    beta: 0.2,
                    n_list: n_list.clone(),
                    t_final: 1.0,
                    dt: 1e-3,
                    stride: 10,
                    skip_dt_check: true,
                };
                match sweep_rate(&cfg) {
                    Ok(out) => line.push_str(&format!("  {:?} {:+.4}", kind, out.fit.slope)),
                    Err(e) => line.push_str(&format!("  {kind:?} ERR({e})")),
                }
            }
            println!("{line}");
        }
    }
}

fn conv_rates() {
    let pi = std::f64::consts::PI;
    let grid = GridSpec::line(1024, 16.0 * pi, false).unwrap();
    let registry = ProfileRegistry::with_builtins();
    let n_list: Vec<u64> = (4..=12).map(|p| 1u64 << p).collect();
    let beta = 0.25;

    // (a) non-even profile + smooth data -> -beta
    let shifted = registry
        .build(
            "shifted-gaussian",
            &ProfileParams {
                dim: 1,
                b0: 1.0,
                sigma: 0.5,
                shift: 0.5,
                radius: 1.0,
            },
        )
        .unwrap();
    let smooth = make_initial_data(
        &DataRecipe::new(RecipeKind::SmoothRandom, 1.0, 1.0, 7, 8.0),
        &grid,
    )
    .unwrap();
    let fit = measure_convolution_rate(shifted.as_ref(), &smooth, 1.0, &n_list, beta).unwrap();
    println!("(a) non-even smooth: slope {:.4} (want -0.25 +- 10%)", fit.slope);

    // (b) even profile + smooth data -> -2 beta
    let gauss = Arc::new(GaussianProfile::new(1, 1.0, 0.5).unwrap());
    let fit = measure_convolution_rate(gauss.as_ref(), &smooth, 1.0, &n_list, beta).unwrap();
    println!("(b) even smooth:     slope {:.4} (want -0.50 +- 10%)", fit.slope);

    // (c) even profile + H^1-limited data -> -beta
    let rough = make_initial_data(
        &DataRecipe::new(RecipeKind::HqLimited, 1.0, 1.0, 7, 48.0),
        &grid,
    )
    .unwrap();
    let fit = measure_convolution_rate(gauss.as_ref(), &rough, 1.0, &n_list, beta).unwrap();
    println!("(c) even rough:      slope {:.4} (want -0.25 +- 20%)", fit.slope);
    for (n, v) in &fit.samples {
        println!("    N = {n:5}  value {v:.6e}");
    }
}

fn biscatter_1d() {
    let pi = std::f64::consts::PI;
    let t0 = Instant::now();
    let grid = GridSpec::line(512, 16.0 * pi, true).unwrap();
    let gauss = Arc::new(GaussianProfile::new(1, 1.0, 0.5).unwrap());
    let n_list: Vec<u64> = (5..=10).map(|p| 1u64 << p).collect();

    for (label, kind, cutoff, want) in [
        ("hq-limited q=1", RecipeKind::HqLimited, 20.0, "[-0.26,-0.14]"),
        ("smooth", RecipeKind::SmoothRandom, 8.0, "[-0.50,-0.30]"),
    ] {
        let cfg = SweepConfig {
            grid: grid.clone(),
            recipe: DataRecipe::new(kind, 1.0, 1.0, 7, cutoff),
            profile: gauss.clone(),
            beta: 0.2,
            n_list: n_list.clone(),
            t_final: 1.0,
            dt: 1e-3,
            stride: 10,
            skip_dt_check: false,
        };
        match sweep_rate(&cfg) {
            Ok(out) => {
                println!(
                    "{label}: slope {:.4} want {want}  (loglog power {:.4}, dt-check {:.3e}, mass {:.2e}, energy {:.2e})",
                    out.fit.slope,
                    out.loglog_fit.slope,
                    out.dt_consistency,
                    out.mass_drift_max,
                    out.energy_drift_max
                );
                for r in &out.rows {
                    println!("    N = {:5}  supDiff {:.6e}", r.n, r.sup_diff);
                }
            }
            Err(e) => println!("{label}: ERROR {e}"),
        }
    }
    println!("elapsed {:?}", t0.elapsed());
}

fn witness() {
    let t0 = Instant::now();
    let gauss = GaussianProfile::new(3, 1.0, 1.0).unwrap();
    let n_list: Vec<u64> = (4..=9).map(|p| 1u64 << p).collect();
    for q in [1.0, 2.0] {
        let out = resonance::verify_lower_bound(&gauss, 0.25, q, &n_list, 1.0).unwrap();
        println!(
            "q = {q}: slope {:.4} (want -{:.3} +- 15%), band {:.3}, dominance {:.2}",
            out.fit.slope,
            0.25 * q,
            out.band_factor,
            out.dominance_ratio
        );
        for r in &out.rows {
            println!(
                "    N = {:4} F_h1 {:.4e} rescaled {:.4e} mid {:.3e} other {:.3e}",
                r.n, r.f_h1, r.rescaled, r.mid_slab, r.other_slab_max
            );
        }
        let ab = resonance::ablation_check(&gauss, 0.25, q, 512, 1.0).unwrap();
        println!(
            "  ablation at N=512: resonant {:.4e} ablated {:.4e} ratio {:.2}",
            ab.resonant, ab.ablated, ab.ratio
        );
    }
    println!("elapsed {:?}", t0.elapsed());

    // grid refinement stability at the smallest N
    let p = WitnessParams::new(16, 0.25, 1.0).unwrap();
    let coarse = {
        let grid = resonance::witness_grid(&p).unwrap();
        let d = resonance::build_resonant_datum(&p, &grid).unwrap();
        let f = resonance::duhamel_forcing(&d, &gauss, 1.0, None).unwrap();
        mfnls_core::norms::sobolev_norm(&f, 1.0)
    };
    let fine = {
        let p = p.refined();
        let grid = resonance::witness_grid(&p).unwrap();
        let d = resonance::build_resonant_datum(&p, &grid).unwrap();
        let f = resonance::duhamel_forcing(&d, &gauss, 1.0, None).unwrap();
        mfnls_core::norms::sobolev_norm(&f, 1.0)
    };
    println!(
        "refinement at N=16: coarse {coarse:.6e} fine {fine:.6e} rel change {:.3e}",
        (fine - coarse).abs() / coarse
    );
}

fn drift() {
    let pi = std::f64::consts::PI;
    let grid = GridSpec::line(512, 16.0 * pi, true).unwrap();
    let gauss = Arc::new(GaussianProfile::new(1, 1.0, 0.5).unwrap());
    for (label, kind, cutoff) in [
        ("hq q=1", RecipeKind::HqLimited, 20.0),
        ("smooth", RecipeKind::SmoothRandom, 8.0),
    ] {
        let data = make_initial_data(&DataRecipe::new(kind, 1.0, 1.0, 7, cutoff), &grid).unwrap();
        let pair =
            mfnls_core::harness::run_pair(&data, gauss.clone(), 32, 0.2, 1.0, 1e-3, 10);
        match pair {
            Ok(p) => println!(
                "{label}: mass {:.3e}/{:.3e} energy {:.3e}/{:.3e}",
                p.cubic.mass_drift(),
                p.hartree.mass_drift(),
                p.cubic.energy_drift(),
                p.hartree.energy_drift()
            ),
            Err(e) => println!("{label}: ERROR {e}"),
        }
    }
}
