//! Frequency-slab witness for the sharpness of the comparison rate.
//!
//! The datum concentrates its spectrum on two xi_1 slabs of width `N^{-beta}`,
//! one at the origin with amplitude `N^{beta/2}` and one at `N^{beta}` with
//! amplitude `N^{-beta (q - 1/2)}`, each crossed with the unit square in the
//! transverse frequencies. Driving the deviation forcing
//!
//! ```text
//!   F(t) = int_0^t e^{i (t - t') Delta} [ (W_N * |phi|^2) phi ](t') dt',
//!   phi(t') = e^{i t' Delta} f,
//! ```
//!
//! the width/center matching makes one cross pairing non-oscillatory in t',
//! so the mid-frequency output slab survives the time integral and its H^1
//! mass scales like `N^{-q beta}`. Relocating the second slab to `-N^{beta}`
//! (the ablation variant) moves the surviving pairing to the mirror slab and
//! leaves only an oscillatory contribution at `+N^{beta}`, which is the
//! falsifiable signature of the mechanism.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fit::{self, FitModel, RateFit};
use crate::grid::{GridSpec, SpectralField};
use crate::norms;
use crate::potential::InteractionProfile;

/// Defaults sized so that N <= 2^9 at beta = 0.25 stays at desk scale.
pub const DEFAULT_MODES_PER_BUMP: usize = 4;
pub const DEFAULT_TRANSVERSE_MODES: usize = 32;
/// Transverse frequency half-range; outputs live in (-1, 2), products never
/// reach past +-2, so a half-range of 4 leaves no wraparound.
const TRANSVERSE_HALF_RANGE: f64 = 4.0;

#[derive(Clone, Copy, Debug)]
pub struct WitnessParams {
    pub n: u64,
    pub beta: f64,
    pub q: f64,
    pub modes_per_bump: usize,
    pub transverse_modes: usize,
    /// Move the second slab to `-N^beta`, destroying the resonant pairing in
    /// the mid-frequency output slab.
    pub ablated: bool,
}

impl WitnessParams {
    pub fn new(n: u64, beta: f64, q: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "beta must lie in (0, 1), got {beta}"
            )));
        }
        if !(q >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "the witness needs q >= 1, got {q}"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidParameter("witness needs N >= 2".into()));
        }
        Ok(WitnessParams {
            n,
            beta,
            q,
            modes_per_bump: DEFAULT_MODES_PER_BUMP,
            transverse_modes: DEFAULT_TRANSVERSE_MODES,
            ablated: false,
        })
    }

    pub fn ablated(mut self) -> Self {
        self.ablated = true;
        self
    }

    /// Grid-refinement variant: twice the modes per bump and per transverse
    /// axis at fixed frequency ranges.
    pub fn refined(mut self) -> Self {
        self.modes_per_bump *= 2;
        self.transverse_modes *= 2;
        self
    }

    pub fn n_beta(&self) -> f64 {
        (self.n as f64).powf(self.beta)
    }

    pub fn bump_width(&self) -> f64 {
        (self.n as f64).powf(-self.beta)
    }
}

/// The witness datum with its slab bookkeeping.
pub struct ResonantDatum {
    pub params: WitnessParams,
    pub grid: GridSpec,
    /// The datum, rescaled to `||f||_{H^q} = 1` exactly.
    pub field: SpectralField,
    /// `(left_edge, amplitude)` of the two xi_1 slabs; widths are
    /// `bump_width`, amplitudes are the raw (pre-normalization) values.
    pub slabs: [(f64, f64); 2],
    /// Scale applied to the raw slab profile to reach unit H^q norm.
    pub normalization: f64,
    /// Spectral support as `(flat index, coefficient)` pairs.
    support: Vec<(usize, Complex64)>,
}

/// Anisotropic grid sized for the construction: xi_1 spacing `N^{-beta}/mpb`
/// covering `+-(2 N^beta + 2 N^{-beta})` plus margin, and two transverse axes
/// with `transverse_modes` modes over `[-4, 4)`.
pub fn witness_grid(params: &WitnessParams) -> Result<GridSpec> {
    let w = params.bump_width();
    let spacing = w / params.modes_per_bump as f64;
    let half_range = 2.0 * params.n_beta() + 1.0 + 2.0 * w + 4.0 * spacing;
    let mut n1 = 2 * (half_range / spacing).ceil() as usize;
    n1 = (n1 + 15) / 16 * 16;
    let l1 = std::f64::consts::TAU / spacing;
    let nt = params.transverse_modes;
    let lt = std::f64::consts::TAU * nt as f64 / (2.0 * TRANSVERSE_HALF_RANGE);
    GridSpec::new(3, &[n1, nt, nt], &[l1, lt, lt], false)
}

/// Place the two-slab datum on the grid. Every coefficient outside the slabs
/// is an exact zero. Hard error when the grid cannot resolve the construction.
pub fn build_resonant_datum(params: &WitnessParams, grid: &GridSpec) -> Result<ResonantDatum> {
    if grid.dim() != 3 {
        return Err(Error::Resolution(
            "the witness is a 3D construction; need a 3-axis grid".into(),
        ));
    }
    let w = params.bump_width();
    let nb = params.n_beta();
    if grid.spacing(0) > w / 4.0 * (1.0 + 1e-12) {
        return Err(Error::Resolution(format!(
            "xi_1 spacing {} resolves fewer than 4 modes per width-{w} bump",
            grid.spacing(0)
        )));
    }
    if grid.nyquist(0) < 2.0 * nb + 1.0 {
        return Err(Error::Resolution(format!(
            "xi_1 range {} does not extend past 2 N^beta + 1 = {}",
            grid.nyquist(0),
            2.0 * nb + 1.0
        )));
    }
    for axis in 1..3 {
        if grid.spacing(axis) > 0.25 * (1.0 + 1e-12) || grid.nyquist(axis) < 3.0 {
            return Err(Error::Resolution(format!(
                "transverse axis {axis} needs spacing <= 1/4 and range >= 3"
            )));
        }
    }

    let second_center = if params.ablated { -nb } else { nb };
    let amp0 = nb.sqrt(); // N^{beta/2}
    let amp1 = (params.n as f64).powf(-params.beta * (params.q - 0.5));
    let slabs = [(0.0, amp0), (second_center, amp1)];

    let cell = (grid.spacing(0) * grid.spacing(1) * grid.spacing(2)
        / std::f64::consts::TAU.powi(3))
    .sqrt();

    let in_window = |x: f64, left: f64, width: f64| x >= left - 1e-12 && x < left + width - 1e-12;

    let mut field = SpectralField::zeros(grid);
    let mut support = Vec::new();
    for idx in 0..grid.total_modes() {
        let k = grid.wavenumber_at(idx);
        if !in_window(k[1], 0.0, 1.0) || !in_window(k[2], 0.0, 1.0) {
            continue;
        }
        let amp = if in_window(k[0], slabs[0].0, w) {
            slabs[0].1
        } else if in_window(k[0], slabs[1].0, w) {
            slabs[1].1
        } else {
            continue;
        };
        let c = Complex64::new(amp * cell, 0.0);
        field.coeffs_mut()[idx] = c;
        support.push((idx, c));
    }
    let per_bump = params.modes_per_bump * (4 * grid.modes(1) / 32) * (4 * grid.modes(2) / 32);
    if support.len() != 2 * per_bump {
        return Err(Error::Resolution(format!(
            "expected {} support modes, placed {}",
            2 * per_bump,
            support.len()
        )));
    }
    // the construction pins ||f||_{H^q} = 1 exactly
    let raw_norm = norms::sobolev_norm(&field, params.q);
    let normalization = 1.0 / raw_norm;
    let scale = Complex64::new(normalization, 0.0);
    let field = field.scaled(scale);
    for (_, c) in support.iter_mut() {
        *c *= scale;
    }
    Ok(ResonantDatum {
        params: *params,
        grid: grid.clone(),
        field,
        slabs,
        normalization,
        support,
    })
}

/// Count of xi_1 columns carrying nonzero coefficients.
pub fn nonzero_xi1_columns(datum: &ResonantDatum) -> usize {
    let mut cols = std::collections::BTreeSet::new();
    for &(idx, _) in &datum.support {
        cols.insert(datum.grid.decode(idx)[0]);
    }
    cols.len()
}

/// Default quadrature step, the stated bound `2 pi / (20 xi_{1,max}^2)`.
pub fn default_quadrature_step(grid: &GridSpec) -> f64 {
    let k1 = grid.nyquist(0);
    std::f64::consts::TAU / (20.0 * k1 * k1)
}

/// Accumulate `sum_i w_i e^{i t_i |k|^2} ghat(t_i)` over a composite
/// trapezoid with `nodes + 1` evenly spaced nodes on `[t0, t1]`.
fn accumulate(
    datum: &ResonantDatum,
    profile: &dyn InteractionProfile,
    t0: f64,
    t1: f64,
    nodes: usize,
    acc: &mut [Complex64],
) -> Result<()> {
    let grid = &datum.grid;
    let k2 = grid.k_squared();
    let (n, beta) = (datum.params.n, datum.params.beta);
    let wdev: Vec<Complex64> = (0..grid.total_modes())
        .map(|idx| profile.deviation(&grid.wavenumber_at(idx), n, beta))
        .collect();

    let dt = (t1 - t0) / nodes as f64;
    // e^{i t |k|^2} advanced one node at a time
    let base: Vec<Complex64> = k2
        .par_iter()
        .map(|&kk| Complex64::from_polar(1.0, dt * kk))
        .collect();
    let mut rot: Vec<Complex64> = k2
        .par_iter()
        .map(|&kk| Complex64::from_polar(1.0, t0 * kk))
        .collect();

    let mut phi_hat = SpectralField::zeros(grid);
    for node in 0..=nodes {
        let t = t0 + node as f64 * dt;
        let weight = if node == 0 || node == nodes {
            0.5 * dt
        } else {
            dt
        };
        // phi(t) = e^{it Delta} f, sparse in frequency
        phi_hat.coeffs_mut().fill(Complex64::default());
        for &(idx, c) in &datum.support {
            phi_hat.coeffs_mut()[idx] = c * Complex64::from_polar(1.0, -t * k2[idx]);
        }
        let phi_phys = phi_hat.to_physical();
        let density: Vec<Complex64> = phi_phys
            .par_iter()
            .map(|v| Complex64::new(v.norm_sqr(), 0.0))
            .collect();
        let mut pot_hat = SpectralField::from_physical(grid, &density)?;
        pot_hat
            .coeffs_mut()
            .par_iter_mut()
            .zip(wdev.par_iter())
            .for_each(|(c, m)| *c *= m);
        let pot_phys = pot_hat.to_physical();
        let forcing: Vec<Complex64> = pot_phys
            .par_iter()
            .zip(phi_phys.par_iter())
            .map(|(p, v)| p * v)
            .collect();
        let forcing_hat = SpectralField::from_physical(grid, &forcing)?;

        acc.par_iter_mut()
            .zip(forcing_hat.coeffs().par_iter())
            .zip(rot.par_iter())
            .for_each(|((a, g), r)| *a += weight * r * g);
        rot.par_iter_mut()
            .zip(base.par_iter())
            .for_each(|(r, b)| *r *= b);
    }
    Ok(())
}

/// The Duhamel forcing `F(t)` driven by the free flow of the datum.
///
/// `step` defaults to `2 pi / (20 xi_{1,max}^2)`; a coarser request is a hard
/// error since the fast phase would be undersampled.
pub fn duhamel_forcing(
    datum: &ResonantDatum,
    profile: &dyn InteractionProfile,
    t: f64,
    step: Option<f64>,
) -> Result<SpectralField> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "forcing time must be nonnegative, got {t}"
        )));
    }
    let bound = default_quadrature_step(&datum.grid);
    let step = step.unwrap_or(bound);
    if step > bound * (1.0 + 1e-12) {
        return Err(Error::QuadratureStep(format!(
            "step {step:.3e} exceeds the phase-resolution bound {bound:.3e}"
        )));
    }
    let mut out = SpectralField::zeros(&datum.grid);
    if t == 0.0 {
        return Ok(out);
    }
    let nodes = (t / step).ceil() as usize;
    let mut acc = vec![Complex64::default(); datum.grid.total_modes()];
    accumulate(datum, profile, 0.0, t, nodes, &mut acc)?;
    let k2 = datum.grid.k_squared();
    out.coeffs_mut()
        .par_iter_mut()
        .zip(acc.par_iter())
        .zip(k2.par_iter())
        .for_each(|((c, a), &kk)| {
            *c = a * Complex64::from_polar(1.0, -t * kk);
        });
    Ok(out)
}

/// Two-stage accumulation used by the staging test: `[0, t]` then `[t, 2t]`
/// with the same node spacing reproduces the single-call `F(2t)`.
pub fn duhamel_forcing_staged(
    datum: &ResonantDatum,
    profile: &dyn InteractionProfile,
    t: f64,
    step: f64,
) -> Result<SpectralField> {
    let nodes = (t / step).ceil() as usize;
    let mut acc = vec![Complex64::default(); datum.grid.total_modes()];
    accumulate(datum, profile, 0.0, t, nodes, &mut acc)?;
    accumulate(datum, profile, t, 2.0 * t, nodes, &mut acc)?;
    let k2 = datum.grid.k_squared();
    let mut out = SpectralField::zeros(&datum.grid);
    out.coeffs_mut()
        .par_iter_mut()
        .zip(acc.par_iter())
        .zip(k2.par_iter())
        .for_each(|((c, a), &kk)| {
            *c = a * Complex64::from_polar(1.0, -2.0 * t * kk);
        });
    Ok(out)
}

/// H^1 mass of the xi_1 window `[center - half, center + half)`.
pub fn slab_h1_mass(field: &SpectralField, center: f64, half: f64) -> f64 {
    let grid = field.grid();
    let mut acc = 0.0;
    for (idx, c) in field.coeffs().iter().enumerate() {
        let k = grid.wavenumber_at(idx);
        if k[0] >= center - half && k[0] < center + half {
            acc += (1.0 + k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) * c.norm_sqr();
        }
    }
    acc.sqrt()
}

/// Union of xi_1 output windows reachable from the datum slabs: differences
/// of slab frequencies convolved once more with the slabs.
pub fn output_windows(datum: &ResonantDatum) -> Vec<(f64, f64)> {
    let w = datum.params.bump_width();
    let data: Vec<(f64, f64)> = datum.slabs.iter().map(|&(l, _)| (l, l + w)).collect();
    let mut density = Vec::new();
    for &(a0, a1) in &data {
        for &(b0, b1) in &data {
            density.push((a0 - b1, a1 - b0));
        }
    }
    let mut out = Vec::new();
    for &(d0, d1) in &density {
        for &(a0, a1) in &data {
            out.push((d0 + a0, d1 + a1));
        }
    }
    merge_windows(out)
}

fn merge_windows(mut w: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    w.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in w {
        match merged.last_mut() {
            Some(last) if lo <= last.1 + 1e-12 => last.1 = last.1.max(hi),
            _ => merged.push((lo, hi)),
        }
    }
    merged
}

#[derive(Clone, Debug)]
pub struct WitnessRow {
    pub n: u64,
    pub f_h1: f64,
    /// `N^{q beta} ||F||_{H^1}`; flat across the sweep when the rate is sharp.
    pub rescaled: f64,
    /// H^1 mass of the mid-frequency output slab `(N^beta, N^beta + N^{-beta})`.
    pub mid_slab: f64,
    /// Largest H^1 mass among the other output slabs.
    pub other_slab_max: f64,
}

#[derive(Clone, Debug)]
pub struct WitnessOutcome {
    pub rows: Vec<WitnessRow>,
    pub fit: RateFit,
    pub band_factor: f64,
    /// mid-slab over next-largest slab at the largest N
    pub dominance_ratio: f64,
    pub slope_pass: bool,
    pub band_pass: bool,
    pub pass: bool,
}

fn witness_row(params: &WitnessParams, profile: &dyn InteractionProfile, t: f64) -> Result<WitnessRow> {
    let grid = witness_grid(params)?;
    let datum = build_resonant_datum(params, &grid)?;
    let f = duhamel_forcing(&datum, profile, t, None)?;
    let w = params.bump_width();
    let nb = params.n_beta();
    let half = 3.0 * w;
    let mid = slab_h1_mass(&f, nb + 0.5 * w, half);
    let others = [
        slab_h1_mass(&f, 0.0, half),
        slab_h1_mass(&f, -nb + 0.5 * w, half),
        slab_h1_mass(&f, 2.0 * nb + w, half),
    ];
    let qb = params.q * params.beta;
    let f_h1 = norms::sobolev_norm(&f, 1.0);
    Ok(WitnessRow {
        n: params.n,
        f_h1,
        rescaled: (params.n as f64).powf(qb) * f_h1,
        mid_slab: mid,
        other_slab_max: others.iter().fold(0.0f64, |m, &v| m.max(v)),
    })
}

/// Sweep the witness over a dyadic N list, fit the decay of `||F(t)||_{H^1}`,
/// and check it against the predicted exponent `-q beta`: slope within 15%
/// and the rescaled values within a factor-2 band.
pub fn verify_lower_bound(
    profile: &dyn InteractionProfile,
    beta: f64,
    q: f64,
    n_list: &[u64],
    t: f64,
) -> Result<WitnessOutcome> {
    if n_list.len() < 4 {
        return Err(Error::TooFewSamples {
            needed: 4,
            got: n_list.len(),
        });
    }
    if !fit::is_dyadic(n_list) {
        return Err(Error::InvalidParameter(
            "witness sweep requires a strictly increasing dyadic N list".into(),
        ));
    }
    let rows: Vec<WitnessRow> = n_list
        .par_iter()
        .map(|&n| witness_row(&WitnessParams::new(n, beta, q)?, profile, t))
        .collect::<Result<_>>()?;
    let samples: Vec<(u64, f64)> = rows.iter().map(|r| (r.n, r.f_h1)).collect();
    let fit = fit::fit_rate(&samples, FitModel::PurePower)?;
    let qb = q * beta;
    let slope_pass = fit.slope >= -1.15 * qb && fit.slope <= -0.85 * qb;
    let rescaled_max = rows.iter().map(|r| r.rescaled).fold(0.0f64, f64::max);
    let rescaled_min = rows.iter().map(|r| r.rescaled).fold(f64::INFINITY, f64::min);
    let band_factor = rescaled_max / rescaled_min;
    let band_pass = band_factor <= 2.0;
    let last = rows.last().expect("nonempty");
    let dominance_ratio = last.mid_slab / last.other_slab_max.max(f64::MIN_POSITIVE);
    Ok(WitnessOutcome {
        rows,
        fit,
        band_factor,
        dominance_ratio,
        slope_pass,
        band_pass,
        pass: slope_pass && band_pass,
    })
}

#[derive(Clone, Debug)]
pub struct AblationReport {
    pub n: u64,
    /// Mid-slab H^1 mass with the resonant configuration.
    pub resonant: f64,
    /// Mid-slab H^1 mass with the second slab mirrored to `-N^beta`.
    pub ablated: f64,
    pub ratio: f64,
}

/// Compare the mid-frequency output slab between the resonant and the
/// mirrored configuration at one N. The mechanism predicts a drop of order
/// `N^{2 beta}` once the stationary pairing is removed.
pub fn ablation_check(
    profile: &dyn InteractionProfile,
    beta: f64,
    q: f64,
    n: u64,
    t: f64,
) -> Result<AblationReport> {
    let base = WitnessParams::new(n, beta, q)?;
    let resonant = witness_row(&base, profile, t)?.mid_slab;
    let ablated_params = base.ablated();
    let grid = witness_grid(&ablated_params)?;
    let datum = build_resonant_datum(&ablated_params, &grid)?;
    let f = duhamel_forcing(&datum, profile, t, None)?;
    let w = ablated_params.bump_width();
    let nb = ablated_params.n_beta();
    let ablated = slab_h1_mass(&f, nb + 0.5 * w, 3.0 * w);
    Ok(AblationReport {
        n,
        resonant,
        ablated,
        ratio: resonant / ablated.max(f64::MIN_POSITIVE),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::GaussianProfile;

    fn gaussian() -> GaussianProfile {
        GaussianProfile::new(3, 1.0, 1.0).unwrap()
    }

    #[test]
    fn datum_support_counts() {
        let params = WitnessParams::new(64, 0.25, 1.0).unwrap();
        let grid = witness_grid(&params).unwrap();
        let datum = build_resonant_datum(&params, &grid).unwrap();
        assert_eq!(nonzero_xi1_columns(&datum), 2 * params.modes_per_bump);
        // raw low bump contributes O(1) L^2 mass: amp^2 x width = 1 exactly
        let low: f64 = datum
            .support
            .iter()
            .filter(|&&(idx, _)| grid.wavenumber_at(idx)[0] < 1.0)
            .map(|&(_, c)| c.norm_sqr() / (datum.normalization * datum.normalization))
            .sum();
        let expect = params.n_beta() * params.bump_width() / std::f64::consts::TAU.powi(3);
        assert!((low - expect).abs() <= 1e-10 * expect);
    }

    #[test]
    fn hq_norm_pinned_and_raw_norm_bounded_across_sweep() {
        let mut raw = Vec::new();
        for n in [16u64, 64, 256] {
            let params = WitnessParams::new(n, 0.25, 1.0).unwrap();
            let grid = witness_grid(&params).unwrap();
            let datum = build_resonant_datum(&params, &grid).unwrap();
            let hq = norms::sobolev_norm(&datum.field, params.q);
            assert!((hq - 1.0).abs() <= 1e-12);
            raw.push(1.0 / datum.normalization);
        }
        let max = raw.iter().fold(0.0f64, |m, &v| m.max(v));
        let min = raw.iter().fold(f64::INFINITY, |m, &v| m.min(v));
        assert!(max / min <= 2.0, "raw H^q mass varies too much: {raw:?}");
    }

    #[test]
    fn under_resolved_grid_is_hard_error() {
        let params = WitnessParams::new(256, 0.25, 1.0).unwrap();
        // coarse xi_1 spacing: fails the 4-modes-per-bump precondition
        let bad = GridSpec::new(3, &[64, 32, 32], &[16.0, 25.13, 25.13], false).unwrap();
        assert!(matches!(
            build_resonant_datum(&params, &bad),
            Err(Error::Resolution(_))
        ));
    }

    #[test]
    fn forcing_zero_at_time_zero_and_with_delta_profile() {
        let params = WitnessParams::new(16, 0.25, 1.0).unwrap();
        let grid = witness_grid(&params).unwrap();
        let datum = build_resonant_datum(&params, &grid).unwrap();
        let f0 = duhamel_forcing(&datum, &gaussian(), 0.0, None).unwrap();
        assert_eq!(f0.l2_norm(), 0.0);

        let delta = crate::potential::DeltaProfile::new(1.0).unwrap();
        let f = duhamel_forcing(&datum, &delta, 0.5, None).unwrap();
        assert_eq!(f.l2_norm(), 0.0);
    }

    #[test]
    fn quadrature_step_guard() {
        let params = WitnessParams::new(16, 0.25, 1.0).unwrap();
        let grid = witness_grid(&params).unwrap();
        let datum = build_resonant_datum(&params, &grid).unwrap();
        let bound = default_quadrature_step(&grid);
        assert!(matches!(
            duhamel_forcing(&datum, &gaussian(), 1.0, Some(4.0 * bound)),
            Err(Error::QuadratureStep(_))
        ));
    }

    #[test]
    fn staged_accumulation_matches_single_call() {
        let params = WitnessParams::new(16, 0.25, 1.0).unwrap();
        let grid = witness_grid(&params).unwrap();
        let datum = build_resonant_datum(&params, &grid).unwrap();
        let p = gaussian();
        let t = 0.2;
        let step_bound = default_quadrature_step(&grid);
        let nodes = (t / step_bound).ceil() as usize;
        let step = t / nodes as f64;
        let single = duhamel_forcing(&datum, &p, 2.0 * t, Some(step)).unwrap();
        let staged = duhamel_forcing_staged(&datum, &p, t, step).unwrap();
        let scale = single.l2_norm();
        let diff = single.sub(&staged).unwrap().l2_norm();
        assert!(diff <= 1e-12 * scale, "diff {diff:.3e} vs scale {scale:.3e}");
    }

    #[test]
    fn output_support_windows_hold() {
        let params = WitnessParams::new(32, 0.25, 1.0).unwrap();
        let grid = witness_grid(&params).unwrap();
        let datum = build_resonant_datum(&params, &grid).unwrap();
        let f = duhamel_forcing(&datum, &gaussian(), 0.3, None).unwrap();
        let windows = output_windows(&datum);
        let peak = f.coeffs().iter().map(|c| c.norm()).fold(0.0f64, f64::max);
        for (idx, c) in f.coeffs().iter().enumerate() {
            let k = f.grid().wavenumber_at(idx);
            let inside_xi1 = windows.iter().any(|&(lo, hi)| k[0] >= lo - 1e-9 && k[0] < hi + 1e-9);
            let inside_transverse =
                (-1.0 - 1e-9..2.0 + 1e-9).contains(&k[1]) && (-1.0 - 1e-9..2.0 + 1e-9).contains(&k[2]);
            if !(inside_xi1 && inside_transverse) {
                assert!(
                    c.norm() <= 1e-12 * peak,
                    "leak at xi = {k:?}: {} vs peak {peak}",
                    c.norm()
                );
            }
        }
    }
}
