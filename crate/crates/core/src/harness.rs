//! Paired cubic / Hartree solves across dyadic N with rate fitting.
//!
//! One cubic reference run is shared by the whole sweep (it does not depend
//! on N); per-N Hartree runs execute in parallel and results merge in N
//! order, so output is deterministic for a fixed config and seed.

use std::sync::Arc;

use rayon::prelude::*;

use crate::data::{make_initial_data, DataRecipe};
use crate::error::{Error, Result};
use crate::evolution::{self, CubicCoupling, EvolutionRun, EvolutionSpec, HartreeCoupling};
use crate::fit::{self, FitModel, RateFit};
use crate::grid::{GridSpec, SpectralField};
use crate::norms;
use crate::potential::InteractionProfile;

/// Mass and energy conservation required of every accepted run.
pub const MASS_DRIFT_LIMIT: f64 = 1e-10;
pub const ENERGY_DRIFT_LIMIT: f64 = 1e-6;

pub struct PairOutcome {
    pub cubic: EvolutionRun,
    pub hartree: EvolutionRun,
    pub sup_diff: f64,
}

/// Solve both flows from identical data and take the sup-in-time H^1
/// difference over the shared snapshots. Conservation failures are errors.
pub fn run_pair(
    data: &SpectralField,
    profile: Arc<dyn InteractionProfile>,
    n: u64,
    beta: f64,
    t_final: f64,
    dt: f64,
    stride: usize,
) -> Result<PairOutcome> {
    let grid = data.grid().clone();
    let cubic_spec = EvolutionSpec::new(
        Arc::new(CubicCoupling {
            b0: profile.coupling(),
        }),
        grid.clone(),
        dt,
        t_final,
        stride,
    )?;
    let hartree_spec = EvolutionSpec::new(
        Arc::new(HartreeCoupling::new(profile, n, beta)?),
        grid,
        dt,
        t_final,
        stride,
    )?;
    let cubic = evolution::solve(&cubic_spec, data)?;
    let hartree = evolution::solve(&hartree_spec, data)?;
    check_conservation(&cubic)?;
    check_conservation(&hartree)?;
    let sup_diff = norms::trajectory_sup_h1_diff(&cubic, &hartree)?;
    Ok(PairOutcome {
        cubic,
        hartree,
        sup_diff,
    })
}

fn check_conservation(run: &EvolutionRun) -> Result<()> {
    let mass = run.mass_drift();
    if mass > MASS_DRIFT_LIMIT {
        return Err(Error::ConservationViolated(format!(
            "{}: relative mass drift {mass:.3e} above {MASS_DRIFT_LIMIT:e}",
            run.label
        )));
    }
    let energy = run.energy_drift();
    if energy > ENERGY_DRIFT_LIMIT {
        return Err(Error::ConservationViolated(format!(
            "{}: relative energy drift {energy:.3e} above {ENERGY_DRIFT_LIMIT:e}",
            run.label
        )));
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct SweepRow {
    pub n: u64,
    pub beta: f64,
    pub q: f64,
    pub t_final: f64,
    pub dt: f64,
    pub sup_diff: f64,
    pub mass_drift_max: f64,
    pub energy_drift_max: f64,
}

pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub fit: RateFit,
    pub loglog_fit: RateFit,
    /// Relative change of the largest-N supDiff under dt -> dt/2.
    pub dt_consistency: f64,
    pub mass_drift_max: f64,
    pub energy_drift_max: f64,
}

pub struct SweepConfig {
    pub grid: GridSpec,
    pub recipe: DataRecipe,
    pub profile: Arc<dyn InteractionProfile>,
    pub beta: f64,
    pub n_list: Vec<u64>,
    pub t_final: f64,
    pub dt: f64,
    pub stride: usize,
    /// Skip the dt/2 rerun (used by spot checks that only need the rows).
    pub skip_dt_check: bool,
}

/// Dyadic-N rate sweep of `sup_t ||phi - phi_N||_{H^1}`.
///
/// Guards: the N list must be dyadic with at least 4 entries; the grid must
/// resolve four times the largest contraction wavenumber `N_max^beta`; a
/// sweep whose differences all sit at the numerical floor is rejected as
/// degenerate; a fitted slope that comes out positive is rejected.
pub fn sweep_rate(cfg: &SweepConfig) -> Result<SweepOutcome> {
    let data = make_initial_data(&cfg.recipe, &cfg.grid)?;
    sweep_rate_with_data(cfg, &data)
}

/// Sweep with externally supplied initial data (box-doubling spot checks
/// embed a previously built field).
pub fn sweep_rate_with_data(cfg: &SweepConfig, data: &SpectralField) -> Result<SweepOutcome> {
    if cfg.n_list.len() < 4 {
        return Err(Error::TooFewSamples {
            needed: 4,
            got: cfg.n_list.len(),
        });
    }
    if !fit::is_dyadic(&cfg.n_list) {
        return Err(Error::InvalidParameter(
            "sweep requires dyadic N_list".into(),
        ));
    }
    if data.grid() != &cfg.grid {
        return Err(Error::GridMismatch("sweep data grid differs from config".into()));
    }
    let n_max = *cfg.n_list.last().expect("nonempty");
    let needed = 4.0 * (n_max as f64).powf(cfg.beta);
    let kmax = cfg.grid.max_wavenumber();
    if kmax < needed {
        return Err(Error::Resolution(format!(
            "largest grid wavenumber {kmax:.2} is below 4 N_max^beta = {needed:.2}"
        )));
    }
    // the cubic reference does not depend on N: solve it once
    let cubic_spec = EvolutionSpec::new(
        Arc::new(CubicCoupling {
            b0: cfg.profile.coupling(),
        }),
        cfg.grid.clone(),
        cfg.dt,
        cfg.t_final,
        cfg.stride,
    )?;
    let cubic = evolution::solve(&cubic_spec, &data)?;
    check_conservation(&cubic)?;

    let per_n: Vec<(u64, EvolutionRun, f64)> = cfg
        .n_list
        .par_iter()
        .map(|&n| {
            let spec = EvolutionSpec::new(
                Arc::new(HartreeCoupling::new(cfg.profile.clone(), n, cfg.beta)?),
                cfg.grid.clone(),
                cfg.dt,
                cfg.t_final,
                cfg.stride,
            )?;
            let run = evolution::solve(&spec, &data)?;
            check_conservation(&run)?;
            let sup = norms::trajectory_sup_h1_diff(&cubic, &run)?;
            Ok((n, run, sup))
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(per_n.len());
    let mut mass_drift_max = cubic.mass_drift();
    let mut energy_drift_max = cubic.energy_drift();
    for (n, hartree, sup_diff) in &per_n {
        let mass = cubic.mass_drift().max(hartree.mass_drift());
        let energy = cubic.energy_drift().max(hartree.energy_drift());
        mass_drift_max = mass_drift_max.max(mass);
        energy_drift_max = energy_drift_max.max(energy);
        rows.push(SweepRow {
            n: *n,
            beta: cfg.beta,
            q: cfg.recipe.q,
            t_final: cfg.t_final,
            dt: cfg.dt,
            sup_diff: *sup_diff,
            mass_drift_max: mass,
            energy_drift_max: energy,
        });
    }

    let samples: Vec<(u64, f64)> = rows.iter().map(|r| (r.n, r.sup_diff)).collect();
    let fit = fit::fit_rate_windowed(&samples, FitModel::PurePower)?;
    let loglog_fit = fit::fit_rate_windowed(&samples, FitModel::PowerWithLogLog)?;
    if fit.slope > 0.0 {
        return Err(Error::DegenerateSamples(format!(
            "fitted slope {:.3} is positive; differences must shrink with N",
            fit.slope
        )));
    }

    let dt_consistency = if cfg.skip_dt_check {
        0.0
    } else {
        let coarse = rows.last().expect("nonempty").sup_diff;
        let refined = run_pair(
            &data,
            cfg.profile.clone(),
            n_max,
            cfg.beta,
            cfg.t_final,
            cfg.dt / 2.0,
            cfg.stride * 2,
        )?
        .sup_diff;
        (refined - coarse).abs() / coarse.max(f64::MIN_POSITIVE)
    };

    Ok(SweepOutcome {
        rows,
        fit,
        loglog_fit,
        dt_consistency,
        mass_drift_max,
        energy_drift_max,
    })
}

/// CSV for the sweep rows: one line per N.
pub fn sweep_csv(outcome: &SweepOutcome) -> String {
    let mut s = String::from("N,beta,q,T,dt,supDiff,mass_drift_max,energy_drift_max\n");
    for r in &outcome.rows {
        s.push_str(&format!(
            "{},{:.6e},{:.6e},{:.6e},{:.6e},{:.12e},{:.6e},{:.6e}\n",
            r.n, r.beta, r.q, r.t_final, r.dt, r.sup_diff, r.mass_drift_max, r.energy_drift_max
        ));
    }
    s
}
