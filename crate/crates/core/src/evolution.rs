//! Strang split-step integration of the cubic NLS and the Hartree-type NLS.
//!
//! Both flows share one step path: a half kinetic substep (exact in Fourier),
//! an exact gauge-rotation substep `phi <- phi * exp(-i pot dt)` where the
//! potential is a Fourier multiplier applied to the spectral density |phi|^2,
//! and another half kinetic substep. The two equations differ only in that
//! density multiplier, which is what makes the delta-profile Hartree flow
//! bit-identical to the cubic flow.
//!
//! Both substeps preserve |phi| pointwise, so mass is conserved to rounding
//! regardless of step size; energy oscillates at O(dt^2) without secular
//! drift.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, SpectralField, MAX_DIM};
use crate::norms;
use crate::potential::InteractionProfile;

/// Factor above the initial physical maximum at which a run is declared
/// blown up. Defocusing runs should never get near it.
pub const BLOWUP_FACTOR: f64 = 1e6;

/// The nonlinear coupling seen by the splitting scheme: a multiplier applied
/// to the spectral density `|phi|^2` to produce the gauge potential.
pub trait NonlinearCoupling: Send + Sync {
    fn label(&self) -> String;
    fn density_multiplier(&self, k: &[f64; MAX_DIM]) -> Complex64;
}

/// Local cubic coupling `b0 |phi|^2 phi`: constant density multiplier.
pub struct CubicCoupling {
    pub b0: f64,
}

impl NonlinearCoupling for CubicCoupling {
    fn label(&self) -> String {
        "cubic-nls".into()
    }
    fn density_multiplier(&self, _k: &[f64; MAX_DIM]) -> Complex64 {
        Complex64::new(self.b0, 0.0)
    }
}

/// Nonlocal coupling `(V_N * |phi|^2) phi` with the contraction evaluated
/// from the analytic transform of the profile.
pub struct HartreeCoupling {
    profile: Arc<dyn InteractionProfile>,
    n: u64,
    beta: f64,
}

impl HartreeCoupling {
    pub fn new(profile: Arc<dyn InteractionProfile>, n: u64, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "beta must lie in (0, 1), got {beta}"
            )));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("N must be at least 1".into()));
        }
        Ok(HartreeCoupling { profile, n, beta })
    }
}

impl NonlinearCoupling for HartreeCoupling {
    fn label(&self) -> String {
        format!("hartree-nls[{} N={}]", self.profile.name(), self.n)
    }
    fn density_multiplier(&self, k: &[f64; MAX_DIM]) -> Complex64 {
        let s = (self.n as f64).powf(-self.beta);
        self.profile.fourier(&[k[0] * s, k[1] * s, k[2] * s])
    }
}

/// One full run: equation, grid, step size, final time, snapshot stride.
pub struct EvolutionSpec {
    pub coupling: Arc<dyn NonlinearCoupling>,
    pub grid: GridSpec,
    pub dt: f64,
    pub t_final: f64,
    pub stride: usize,
}

impl EvolutionSpec {
    pub fn new(
        coupling: Arc<dyn NonlinearCoupling>,
        grid: GridSpec,
        dt: f64,
        t_final: f64,
        stride: usize,
    ) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
        if !(t_final >= 0.0) || !t_final.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "final time must be nonnegative, got {t_final}"
            )));
        }
        if t_final > 0.0 && dt > t_final * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "dt = {dt} exceeds final time {t_final}"
            )));
        }
        if stride == 0 {
            return Err(Error::InvalidParameter("stride must be at least 1".into()));
        }
        Ok(EvolutionSpec {
            coupling,
            grid,
            dt,
            t_final,
            stride,
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Diagnostics {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub h1: f64,
}

/// Time-stamped trajectory of one solver together with its conservation
/// diagnostics.
pub struct EvolutionRun {
    pub label: String,
    pub dt: f64,
    pub t_final: f64,
    pub snapshots: Vec<(f64, SpectralField)>,
    pub diagnostics: Vec<Diagnostics>,
}

impl EvolutionRun {
    pub fn final_field(&self) -> &SpectralField {
        &self.snapshots.last().expect("run has snapshots").1
    }

    /// Largest relative mass deviation from the initial snapshot.
    pub fn mass_drift(&self) -> f64 {
        let m0 = self.diagnostics[0].mass;
        if m0 == 0.0 {
            return 0.0;
        }
        self.diagnostics
            .iter()
            .map(|d| (d.mass - m0).abs() / m0)
            .fold(0.0, f64::max)
    }

    /// Largest relative energy deviation from the initial snapshot.
    pub fn energy_drift(&self) -> f64 {
        let e0 = self.diagnostics[0].energy;
        if e0 == 0.0 {
            return 0.0;
        }
        self.diagnostics
            .iter()
            .map(|d| (d.energy - e0).abs() / e0.abs())
            .fold(0.0, f64::max)
    }
}

/// Precomputed per-mode tables for one step size.
pub struct Stepper {
    grid: GridSpec,
    half_kinetic: Vec<Complex64>,
    density_multiplier: Vec<Complex64>,
    dt: f64,
}

impl Stepper {
    pub fn new(grid: &GridSpec, coupling: &dyn NonlinearCoupling, dt: f64) -> Result<Self> {
        let k2 = grid.k_squared();
        let half_kinetic: Vec<Complex64> = k2
            .iter()
            .map(|&kk| Complex64::from_polar(1.0, -0.5 * dt * kk))
            .collect();
        let mask = if grid.dealias {
            Some(grid.dealias_mask())
        } else {
            None
        };
        let mut density_multiplier = Vec::with_capacity(grid.total_modes());
        for idx in 0..grid.total_modes() {
            let k = grid.wavenumber_at(idx);
            let v = coupling.density_multiplier(&k);
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFiniteMultiplier(k[0], k[1], k[2]));
            }
            let m = mask.as_ref().map_or(1.0, |m| m[idx]);
            density_multiplier.push(v * m);
        }
        Ok(Stepper {
            grid: grid.clone(),
            half_kinetic,
            density_multiplier,
            dt,
        })
    }

    /// One Strang step in place. Returns the maximum physical |phi| seen,
    /// for the blow-up guard.
    pub fn step(&self, field: &mut SpectralField) -> Result<f64> {
        if field.grid() != &self.grid {
            return Err(Error::GridMismatch("stepper grid differs from field".into()));
        }
        let half = &self.half_kinetic;
        field
            .coeffs_mut()
            .par_iter_mut()
            .zip(half.par_iter())
            .for_each(|(c, h)| *c *= h);

        let mut phys = field.to_physical();
        let density: Vec<Complex64> = phys
            .par_iter()
            .map(|v| Complex64::new(v.norm_sqr(), 0.0))
            .collect();
        let mut rho = SpectralField::from_physical(&self.grid, &density)?;
        rho.coeffs_mut()
            .par_iter_mut()
            .zip(self.density_multiplier.par_iter())
            .for_each(|(c, m)| *c *= m);
        let pot = rho.to_physical();

        let dt = self.dt;
        let max_abs = phys
            .par_iter_mut()
            .zip(pot.par_iter())
            .map(|(v, p)| {
                // the potential of a real interaction is real; drop rounding dust
                *v *= Complex64::from_polar(1.0, -p.re * dt);
                let m = v.norm();
                // NaN would silently lose against max; promote it so the
                // blow-up guard sees it
                if m.is_nan() {
                    f64::INFINITY
                } else {
                    m
                }
            })
            .reduce(|| 0.0, f64::max);

        *field = SpectralField::from_physical(&self.grid, &phys)?;
        field
            .coeffs_mut()
            .par_iter_mut()
            .zip(half.par_iter())
            .for_each(|(c, h)| *c *= h);
        Ok(max_abs)
    }
}

/// One cubic-NLS Strang step with exact substeps.
pub fn step_cubic(state: &SpectralField, dt: f64, b0: f64) -> Result<SpectralField> {
    let stepper = Stepper::new(state.grid(), &CubicCoupling { b0 }, dt)?;
    let mut out = state.clone();
    stepper.step(&mut out)?;
    Ok(out)
}

/// One Hartree-NLS Strang step; the nonlinear substep is exact because
/// `V_N * |phi|^2` is pointwise constant along the substep flow.
pub fn step_hartree(
    state: &SpectralField,
    dt: f64,
    profile: Arc<dyn InteractionProfile>,
    n: u64,
    beta: f64,
) -> Result<SpectralField> {
    let stepper = Stepper::new(state.grid(), &HartreeCoupling::new(profile, n, beta)?, dt)?;
    let mut out = state.clone();
    stepper.step(&mut out)?;
    Ok(out)
}

/// Hamiltonian of the flow: `int |grad phi|^2 + (1/2) int (mult * |phi|^2) |phi|^2`,
/// which for the cubic coupling is `int |grad phi|^2 + (b0/2) int |phi|^4`.
pub fn energy(state: &SpectralField, coupling: &dyn NonlinearCoupling) -> Result<f64> {
    let grid = state.grid();
    let k2 = grid.k_squared();
    let kinetic: f64 = state
        .coeffs()
        .iter()
        .zip(k2.iter())
        .map(|(c, &kk)| kk * c.norm_sqr())
        .sum();

    let phys = state.to_physical();
    let density: Vec<Complex64> = phys
        .iter()
        .map(|v| Complex64::new(v.norm_sqr(), 0.0))
        .collect();
    let rho = SpectralField::from_physical(grid, &density)?;
    let pot = rho
        .apply_multiplier(|k| coupling.density_multiplier(k))?
        .to_physical();
    let dv = grid.cell_volume();
    let interaction: f64 = pot
        .iter()
        .zip(phys.iter())
        .map(|(p, v)| p.re * v.norm_sqr())
        .sum::<f64>()
        * dv
        * 0.5;
    Ok(kinetic + interaction)
}

/// Integrate the flow, recording snapshots and diagnostics every `stride`
/// steps (plus the initial and final states). A trailing partial step is
/// taken explicitly when dt does not divide the final time.
pub fn solve(spec: &EvolutionSpec, initial: &SpectralField) -> Result<EvolutionRun> {
    if initial.grid() != &spec.grid {
        return Err(Error::GridMismatch("initial data grid differs from spec".into()));
    }
    let stepper = Stepper::new(&spec.grid, spec.coupling.as_ref(), spec.dt)?;
    let initial_max = initial
        .to_physical()
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    let ceiling = BLOWUP_FACTOR * initial_max;

    let mut run = EvolutionRun {
        label: spec.coupling.label(),
        dt: spec.dt,
        t_final: spec.t_final,
        snapshots: Vec::new(),
        diagnostics: Vec::new(),
    };
    let record = |t: f64, f: &SpectralField, run: &mut EvolutionRun| -> Result<()> {
        let mass = f.l2_norm().powi(2);
        let en = energy(f, spec.coupling.as_ref())?;
        let h1 = norms::sobolev_norm(f, 1.0);
        run.snapshots.push((t, f.clone()));
        run.diagnostics.push(Diagnostics {
            t,
            mass,
            energy: en,
            h1,
        });
        Ok(())
    };

    let mut field = initial.clone();
    record(0.0, &field, &mut run)?;
    if spec.t_final == 0.0 {
        return Ok(run);
    }

    let steps_exact = spec.t_final / spec.dt;
    let full_steps = (steps_exact + 1e-12).floor() as usize;
    let remainder = spec.t_final - full_steps as f64 * spec.dt;
    let has_partial = remainder > 1e-12 * spec.t_final.max(spec.dt);

    for s in 1..=full_steps {
        let max_abs = stepper.step(&mut field)?;
        let t = s as f64 * spec.dt;
        if !max_abs.is_finite() || (ceiling > 0.0 && max_abs > ceiling) {
            return Err(Error::BlowUp { t, max_abs });
        }
        let is_last = s == full_steps && !has_partial;
        if s % spec.stride == 0 || is_last {
            record(t, &field, &mut run)?;
        }
    }
    if has_partial {
        let tail = Stepper::new(&spec.grid, spec.coupling.as_ref(), remainder)?;
        let max_abs = tail.step(&mut field)?;
        if !max_abs.is_finite() || (ceiling > 0.0 && max_abs > ceiling) {
            return Err(Error::BlowUp {
                t: spec.t_final,
                max_abs,
            });
        }
        record(spec.t_final, &field, &mut run)?;
    }
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{DeltaProfile, GaussianProfile};
    use approx::assert_abs_diff_eq;

    fn plane_wave(grid: &GridSpec, bin: usize, amp: f64) -> SpectralField {
        let mut f = SpectralField::zeros(grid);
        f.coeffs_mut()[bin] = Complex64::new(amp * grid.volume().sqrt(), 0.0);
        f
    }

    fn random_field(grid: &GridSpec, seed: u64) -> SpectralField {
        let mut state = seed.wrapping_mul(0x2545f4914f6cdd1d).wrapping_add(7);
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let n = grid.total_modes();
        let coeffs: Vec<Complex64> = (0..n)
            .map(|i| {
                // smooth spectral envelope: a few low modes carry the field
                let m = grid.signed_index(0, grid.decode(i)[0]) as f64;
                let decay = (-(m / 3.0) * (m / 3.0)).exp();
                Complex64::new(next() * decay, next() * decay)
            })
            .collect();
        SpectralField::from_coeffs(grid, coeffs).unwrap()
    }

    #[test]
    fn zero_field_stays_zero() {
        let grid = GridSpec::line(32, 4.0, true).unwrap();
        let z = SpectralField::zeros(&grid);
        let out = step_cubic(&z, 1e-2, 1.0).unwrap();
        assert_eq!(out.l2_norm(), 0.0);
    }

    #[test]
    fn plane_wave_exact_rotation() {
        // a e^{ikx} solves both flows with phase rate |k|^2 + b0 |a|^2
        let grid = GridSpec::line(64, 4.0, true).unwrap();
        let (bin, amp, b0) = (3usize, 0.7, 1.3);
        let k = grid.wavenumber(0, bin);
        let f = plane_wave(&grid, bin, amp);
        let t = 0.25;
        let coupling: Arc<dyn NonlinearCoupling> = Arc::new(CubicCoupling { b0 });
        let spec = EvolutionSpec::new(coupling, grid.clone(), 1e-3, t, 50).unwrap();
        let run = solve(&spec, &f).unwrap();
        let expect = Complex64::from_polar(
            amp * grid.volume().sqrt(),
            -(k * k + b0 * amp * amp) * t,
        );
        let got = run.final_field().coeffs()[bin];
        assert!((got - expect).norm() <= 1e-12 * expect.norm());

        // hartree sees the same zero-mode coupling regardless of profile
        let profile = Arc::new(GaussianProfile::new(1, b0, 1.0).unwrap());
        let hc: Arc<dyn NonlinearCoupling> =
            Arc::new(HartreeCoupling::new(profile, 64, 0.25).unwrap());
        let hspec = EvolutionSpec::new(hc, grid.clone(), 1e-3, t, 50).unwrap();
        let hrun = solve(&hspec, &f).unwrap();
        let hgot = hrun.final_field().coeffs()[bin];
        assert!((hgot - expect).norm() <= 1e-12 * expect.norm());
    }

    #[test]
    fn t_zero_gives_single_snapshot() {
        let grid = GridSpec::line(16, 1.0, true).unwrap();
        let f = random_field(&grid, 5);
        let spec = EvolutionSpec::new(
            Arc::new(CubicCoupling { b0: 1.0 }),
            grid,
            1e-3,
            0.0,
            10,
        )
        .unwrap();
        let run = solve(&spec, &f).unwrap();
        assert_eq!(run.snapshots.len(), 1);
        assert_eq!(run.final_field().coeffs(), f.coeffs());
    }

    #[test]
    fn mass_conserved_on_random_data() {
        let grid = GridSpec::line(64, 8.0, true).unwrap();
        let f = random_field(&grid, 11);
        let spec = EvolutionSpec::new(
            Arc::new(CubicCoupling { b0: 1.0 }),
            grid,
            1e-3,
            1.0,
            100,
        )
        .unwrap();
        let run = solve(&spec, &f).unwrap();
        assert!(run.mass_drift() <= 1e-10, "drift {}", run.mass_drift());
    }

    #[test]
    fn gauge_covariance() {
        let grid = GridSpec::line(32, 4.0, true).unwrap();
        let f = random_field(&grid, 23);
        let theta = Complex64::from_polar(1.0, 1.1);
        let spec = EvolutionSpec::new(
            Arc::new(CubicCoupling { b0: 0.8 }),
            grid,
            2e-3,
            0.2,
            25,
        )
        .unwrap();
        let a = solve(&spec, &f).unwrap();
        let b = solve(&spec, &f.scaled(theta)).unwrap();
        let rotated = a.final_field().scaled(theta);
        let diff = rotated.sub(b.final_field()).unwrap().l2_norm();
        assert!(diff <= 1e-12 * rotated.l2_norm().max(1.0));
    }

    #[test]
    fn delta_profile_matches_cubic_bitwise() {
        let grid = GridSpec::line(64, 8.0, true).unwrap();
        let f = random_field(&grid, 31);
        let b0 = 1.7;
        let cubic = step_cubic(&f, 1e-3, b0).unwrap();
        let delta = Arc::new(DeltaProfile::new(b0).unwrap());
        let hartree = step_hartree(&f, 1e-3, delta, 32, 0.5).unwrap();
        assert_eq!(cubic.coeffs(), hartree.coeffs());
    }

    #[test]
    fn hartree_approaches_cubic_as_n_grows() {
        let grid = GridSpec::line(64, 8.0, true).unwrap();
        let f = random_field(&grid, 41);
        let b0 = 1.0;
        let cubic = step_cubic(&f, 1e-3, b0).unwrap();
        let profile = Arc::new(GaussianProfile::new(1, b0, 1.0).unwrap());
        let mut first = 0.0;
        let mut last = f64::INFINITY;
        for n in [4u64, 16, 64, 256, 1024, 4096, 16384] {
            let h = step_hartree(&f, 1e-3, profile.clone(), n, 0.25).unwrap();
            let d = h.sub(&cubic).unwrap().l2_norm();
            assert!(d < last);
            if n == 4 {
                first = d;
            }
            last = d;
        }
        assert!(last < first / 15.0, "first {first:.3e}, last {last:.3e}");
    }

    #[test]
    fn energy_of_single_mode() {
        // volume-1 box: cubic energy |k|^2 |a|^2 + (b0/2) |a|^4
        let grid = GridSpec::line(32, 1.0, false).unwrap();
        let (bin, amp, b0) = (2usize, 0.9, 1.4);
        let k = grid.wavenumber(0, bin);
        let f = plane_wave(&grid, bin, amp);
        let e = energy(&f, &CubicCoupling { b0 }).unwrap();
        let expect = k * k * amp * amp + 0.5 * b0 * amp.powi(4);
        assert_abs_diff_eq!(e, expect, epsilon = 1e-10 * expect);

        let profile = Arc::new(GaussianProfile::new(1, b0, 1.0).unwrap());
        let hc = HartreeCoupling::new(profile, 16, 0.25).unwrap();
        let eh = energy(&f, &hc).unwrap();
        assert_abs_diff_eq!(eh, expect, epsilon = 1e-10 * expect);

        let z = SpectralField::zeros(&grid);
        assert_eq!(energy(&z, &CubicCoupling { b0 }).unwrap(), 0.0);
    }

    #[test]
    fn second_order_in_dt() {
        let grid = GridSpec::line(64, 8.0, true).unwrap();
        let f = random_field(&grid, 53);
        let t = 0.2;
        let run_with = |dt: f64| {
            let spec = EvolutionSpec::new(
                Arc::new(CubicCoupling { b0: 1.0 }),
                grid.clone(),
                dt,
                t,
                usize::MAX,
            )
            .unwrap();
            solve(&spec, &f).unwrap().final_field().clone()
        };
        let reference = run_with(5e-4);
        let e1 = run_with(4e-3).sub(&reference).unwrap().l2_norm();
        let e2 = run_with(2e-3).sub(&reference).unwrap().l2_norm();
        let ratio = e1 / e2;
        assert!(
            (3.3..=4.7).contains(&ratio),
            "expected second order, got ratio {ratio}"
        );
    }

    #[test]
    fn partial_final_step() {
        let grid = GridSpec::line(32, 4.0, true).unwrap();
        let f = plane_wave(&grid, 1, 0.5);
        let spec = EvolutionSpec::new(
            Arc::new(CubicCoupling { b0 : 1.0 }),
            grid.clone(),
            3e-3,
            0.01, // 3 full steps + 0.001 partial
            1,
        )
        .unwrap();
        let run = solve(&spec, &f).unwrap();
        let k = grid.wavenumber(0, 1);
        let expect = Complex64::from_polar(
            0.5 * grid.volume().sqrt(),
            -(k * k + 0.25) * 0.01,
        );
        assert!((run.final_field().coeffs()[1] - expect).norm() < 1e-12);
        assert_abs_diff_eq!(run.snapshots.last().unwrap().0, 0.01, epsilon = 1e-15);
    }

    #[test]
    fn guard_trips_on_non_finite_data() {
        let grid = GridSpec::line(16, 1.0, true).unwrap();
        let mut f = SpectralField::zeros(&grid);
        f.coeffs_mut()[0] = Complex64::new(f64::INFINITY, 0.0);
        let spec = EvolutionSpec::new(
            Arc::new(CubicCoupling { b0: 1.0 }),
            grid,
            1e-3,
            0.01,
            1,
        )
        .unwrap();
        assert!(matches!(solve(&spec, &f), Err(Error::BlowUp { .. })));
    }
}
