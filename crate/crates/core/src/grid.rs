//! Periodic-box spectral grids and dual-represented complex fields.
//!
//! A field lives on a rectangular box `[0, L_1) x ... x [0, L_d)` with
//! periodic boundary conditions, `d <= 3`. Coefficients are stored in DFT bin
//! order per axis (bins `0..n/2-1` then `-n/2..-1`), row-major with axis 0
//! slowest. The transform pair is normalized so that the discrete Parseval
//! identity is exact:
//!
//! ```text
//!   sum_j |f(x_j)|^2 dV  ==  sum_k |c_k|^2
//! ```
//!
//! so every L^2-based norm can be read off the coefficients directly. A
//! constant `c` on a volume-1 box has a single zero-mode coefficient `c`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 3;

const TAU: f64 = std::f64::consts::TAU;

/// Discretization of a periodic box: mode counts and side lengths per axis.
///
/// Inactive axes (beyond `dim`) are stored with one mode and unit length so
/// loops can always run over three axes.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    dim: usize,
    modes: [usize; MAX_DIM],
    lengths: [f64; MAX_DIM],
    pub dealias: bool,
}

impl GridSpec {
    pub fn new(dim: usize, modes: &[usize], lengths: &[f64], dealias: bool) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidParameter(format!(
                "dim must be 1, 2 or 3, got {dim}"
            )));
        }
        if modes.len() != dim || lengths.len() != dim {
            return Err(Error::InvalidParameter(format!(
                "expected {dim} mode counts and lengths, got {} and {}",
                modes.len(),
                lengths.len()
            )));
        }
        let mut m = [1usize; MAX_DIM];
        let mut l = [1.0f64; MAX_DIM];
        for a in 0..dim {
            if modes[a] == 0 || modes[a] % 2 != 0 {
                return Err(Error::InvalidParameter(format!(
                    "modes per axis must be positive and even, got {} on axis {a}",
                    modes[a]
                )));
            }
            if !(lengths[a] > 0.0) || !lengths[a].is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "box length must be positive and finite, got {} on axis {a}",
                    lengths[a]
                )));
            }
            m[a] = modes[a];
            l[a] = lengths[a];
        }
        Ok(GridSpec {
            dim,
            modes: m,
            lengths: l,
            dealias,
        })
    }

    /// 1D grid on `[0, length)`, the workhorse for rate sweeps.
    pub fn line(modes: usize, length: f64, dealias: bool) -> Result<Self> {
        Self::new(1, &[modes], &[length], dealias)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modes(&self, axis: usize) -> usize {
        self.modes[axis]
    }

    pub fn length(&self, axis: usize) -> f64 {
        self.lengths[axis]
    }

    /// Wavenumber spacing `2*pi / L_a`.
    pub fn spacing(&self, axis: usize) -> f64 {
        TAU / self.lengths[axis]
    }

    pub fn total_modes(&self) -> usize {
        self.modes.iter().product()
    }

    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }

    /// Volume element of the physical collocation grid.
    pub fn cell_volume(&self) -> f64 {
        self.volume() / self.total_modes() as f64
    }

    /// Signed integer index of a DFT bin: `0..n/2-1, -n/2..-1` (and 0 for a
    /// trivial single-mode axis).
    pub fn signed_index(&self, axis: usize, bin: usize) -> i64 {
        let n = self.modes[axis];
        if bin <= (n - 1) / 2 {
            bin as i64
        } else {
            bin as i64 - n as i64
        }
    }

    /// Physical wavenumber of a DFT bin on one axis.
    pub fn wavenumber(&self, axis: usize, bin: usize) -> f64 {
        self.signed_index(axis, bin) as f64 * self.spacing(axis)
    }

    /// Largest representable wavenumber magnitude on one axis (`n/2 * dk`).
    pub fn nyquist(&self, axis: usize) -> f64 {
        (self.modes[axis] / 2) as f64 * self.spacing(axis)
    }

    /// Largest axis Nyquist wavenumber of the grid.
    pub fn max_wavenumber(&self) -> f64 {
        (0..self.dim)
            .map(|a| self.nyquist(a))
            .fold(0.0f64, f64::max)
    }

    /// Per-axis wavenumber table in bin order.
    pub fn axis_wavenumbers(&self, axis: usize) -> Vec<f64> {
        (0..self.modes[axis])
            .map(|b| self.wavenumber(axis, b))
            .collect()
    }

    /// Decompose a flat row-major index into per-axis bins.
    pub fn decode(&self, idx: usize) -> [usize; MAX_DIM] {
        let n1 = self.modes[1];
        let n2 = self.modes[2];
        let b2 = idx % n2;
        let rest = idx / n2;
        let b1 = rest % n1;
        let b0 = rest / n1;
        [b0, b1, b2]
    }

    /// Wavenumber vector at a flat index (trailing components 0 for low dim).
    pub fn wavenumber_at(&self, idx: usize) -> [f64; MAX_DIM] {
        let bins = self.decode(idx);
        let mut k = [0.0; MAX_DIM];
        for a in 0..self.dim {
            k[a] = self.wavenumber(a, bins[a]);
        }
        k
    }

    /// |k|^2 table over all modes in storage order.
    pub fn k_squared(&self) -> Vec<f64> {
        let kt: Vec<Vec<f64>> = (0..MAX_DIM).map(|a| self.axis_wavenumbers(a)).collect();
        let mut out = Vec::with_capacity(self.total_modes());
        for &k0 in &kt[0] {
            for &k1 in &kt[1] {
                for &k2 in &kt[2] {
                    out.push(k0 * k0 + k1 * k1 + k2 * k2);
                }
            }
        }
        out
    }

    /// True if the mode survives the 2/3 dealias rule on every axis.
    pub fn keeps_mode(&self, bins: &[usize; MAX_DIM]) -> bool {
        for a in 0..self.dim {
            let m = self.signed_index(a, bins[a]).unsigned_abs() as usize;
            if 3 * m > self.modes[a] {
                return false;
            }
        }
        true
    }

    /// Dealias mask in storage order: 1 where kept, 0 where zeroed.
    pub fn dealias_mask(&self) -> Vec<f64> {
        (0..self.total_modes())
            .map(|i| if self.keeps_mode(&self.decode(i)) { 1.0 } else { 0.0 })
            .collect()
    }

    fn flat_modes(&self) -> [usize; MAX_DIM] {
        self.modes
    }
}

thread_local! {
    static PLAN_CACHE: RefCell<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> =
        RefCell::new(HashMap::new());
}

fn plan(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    PLAN_CACHE.with(|c| {
        c.borrow_mut()
            .entry((len, forward))
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                if forward {
                    planner.plan_fft_forward(len)
                } else {
                    planner.plan_fft_inverse(len)
                }
            })
            .clone()
    })
}

/// Unnormalized in-place DFT along `axis` of a row-major array.
fn fft_along(data: &mut [Complex64], shape: &[usize; MAX_DIM], axis: usize, forward: bool) {
    let n = shape[axis];
    if n == 1 {
        return;
    }
    let stride: usize = shape[axis + 1..].iter().product();
    let block = n * stride;
    let fft = plan(n, forward);
    let scratch_len = fft.get_inplace_scratch_len();
    if stride == 1 {
        data.par_chunks_mut(n).for_each_init(
            || vec![Complex64::default(); scratch_len],
            |scratch, lane| fft.process_with_scratch(lane, scratch),
        );
    } else {
        data.par_chunks_mut(block).for_each_init(
            || {
                (
                    vec![Complex64::default(); n],
                    vec![Complex64::default(); scratch_len],
                )
            },
            |(lane, scratch), chunk| {
                for o in 0..stride {
                    for i in 0..n {
                        lane[i] = chunk[o + i * stride];
                    }
                    fft.process_with_scratch(lane, scratch);
                    for i in 0..n {
                        chunk[o + i * stride] = lane[i];
                    }
                }
            },
        );
    }
}

/// Complex field on a periodic box, stored as spectral coefficients.
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: &GridSpec) -> Self {
        SpectralField {
            grid: grid.clone(),
            coeffs: vec![Complex64::default(); grid.total_modes()],
        }
    }

    pub fn from_coeffs(grid: &GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.total_modes() {
            return Err(Error::DimensionMismatch {
                expected: grid.total_modes(),
                got: coeffs.len(),
            });
        }
        Ok(SpectralField {
            grid: grid.clone(),
            coeffs,
        })
    }

    /// Forward transform of physical samples (row-major collocation values).
    pub fn from_physical(grid: &GridSpec, samples: &[Complex64]) -> Result<Self> {
        if samples.len() != grid.total_modes() {
            return Err(Error::DimensionMismatch {
                expected: grid.total_modes(),
                got: samples.len(),
            });
        }
        let mut data = samples.to_vec();
        let shape = grid.flat_modes();
        for a in 0..MAX_DIM {
            fft_along(&mut data, &shape, a, true);
        }
        let scale = grid.volume().sqrt() / grid.total_modes() as f64;
        data.par_iter_mut().for_each(|c| *c *= scale);
        Ok(SpectralField {
            grid: grid.clone(),
            coeffs: data,
        })
    }

    /// Inverse transform to physical collocation values.
    pub fn to_physical(&self) -> Vec<Complex64> {
        let mut data = self.coeffs.clone();
        let shape = self.grid.flat_modes();
        for a in 0..MAX_DIM {
            fft_along(&mut data, &shape, a, false);
        }
        let scale = 1.0 / self.grid.volume().sqrt();
        data.par_iter_mut().for_each(|c| *c *= scale);
        data
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Apply a Fourier multiplier `m(k)`; the grid is unchanged.
    pub fn apply_multiplier<F>(&self, m: F) -> Result<Self>
    where
        F: Fn(&[f64; MAX_DIM]) -> Complex64 + Sync,
    {
        let mut out = self.clone();
        let grid = &self.grid;
        let kt: Vec<Vec<f64>> = (0..MAX_DIM).map(|a| grid.axis_wavenumbers(a)).collect();
        let n1 = grid.modes(1);
        let n2 = grid.modes(2);
        let mut bad: Option<[f64; MAX_DIM]> = None;
        for (idx, c) in out.coeffs.iter_mut().enumerate() {
            let b2 = idx % n2;
            let rest = idx / n2;
            let k = [kt[0][rest / n1], kt[1][rest % n1], kt[2][b2]];
            let v = m(&k);
            if !v.re.is_finite() || !v.im.is_finite() {
                bad = Some(k);
                break;
            }
            *c *= v;
        }
        if let Some(k) = bad {
            return Err(Error::NonFiniteMultiplier(k[0], k[1], k[2]));
        }
        Ok(out)
    }

    /// Free propagator `e^{it Delta}`: multiplier `e^{-i t |k|^2}`.
    pub fn propagate_free(&self, t: f64) -> Self {
        let k2 = self.grid.k_squared();
        let mut out = self.clone();
        out.coeffs
            .par_iter_mut()
            .zip(k2.par_iter())
            .for_each(|(c, &kk)| {
                *c *= Complex64::from_polar(1.0, -t * kk);
            });
        out
    }

    /// Physical-space pointwise product; dealiased afterwards when the grid
    /// has the dealias flag set.
    pub fn pointwise_product(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
        if a.grid != b.grid {
            return Err(Error::GridMismatch(
                "pointwise product requires identical grids".into(),
            ));
        }
        let pa = a.to_physical();
        let pb = b.to_physical();
        let prod: Vec<Complex64> = pa
            .par_iter()
            .zip(pb.par_iter())
            .map(|(x, y)| x * y)
            .collect();
        let mut out = SpectralField::from_physical(&a.grid, &prod)?;
        if a.grid.dealias {
            out.dealias();
        }
        Ok(out)
    }

    /// Zero all modes above 2/3 of the per-axis maximum.
    pub fn dealias(&mut self) {
        let grid = self.grid.clone();
        for (idx, c) in self.coeffs.iter_mut().enumerate() {
            if !grid.keeps_mode(&grid.decode(idx)) {
                *c = Complex64::default();
            }
        }
    }

    /// Coefficient-space L^2 norm (equals the physical L^2 norm by Parseval).
    pub fn l2_norm(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Hermitian inner product `<self, other>` (conjugate-linear in self).
    pub fn inner(&self, other: &SpectralField) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("inner product grids differ".into()));
        }
        Ok(self
            .coeffs
            .iter()
            .zip(other.coeffs.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= s);
        out
    }

    pub fn add(&self, other: &SpectralField) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("sum grids differ".into()));
        }
        let mut out = self.clone();
        out.coeffs
            .iter_mut()
            .zip(other.coeffs.iter())
            .for_each(|(a, b)| *a += b);
        Ok(out)
    }

    pub fn sub(&self, other: &SpectralField) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("difference grids differ".into()));
        }
        let mut out = self.clone();
        out.coeffs
            .iter_mut()
            .zip(other.coeffs.iter())
            .for_each(|(a, b)| *a -= b);
        Ok(out)
    }

    /// Flat binary layout: `dim` and per-axis mode counts as little-endian
    /// u64, per-axis lengths as little-endian f64, then interleaved re/im f64
    /// for every coefficient in row-major bin order.
    pub fn write_binary<W: std::io::Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(&(self.grid.dim() as u64).to_le_bytes())?;
        for a in 0..self.grid.dim() {
            w.write_all(&(self.grid.modes(a) as u64).to_le_bytes())?;
        }
        for a in 0..self.grid.dim() {
            w.write_all(&self.grid.length(a).to_le_bytes())?;
        }
        for c in &self.coeffs {
            w.write_all(&c.re.to_le_bytes())?;
            w.write_all(&c.im.to_le_bytes())?;
        }
        Ok(())
    }

    /// The same band-limited periodic function on the box with every active
    /// axis doubled: coefficients land on the even sub-lattice, scaled by
    /// `sqrt(V'/V)` so the represented function is pointwise identical.
    pub fn embed_doubled(&self) -> Result<Self> {
        let g = &self.grid;
        let modes: Vec<usize> = (0..g.dim()).map(|a| 2 * g.modes(a)).collect();
        let lengths: Vec<f64> = (0..g.dim()).map(|a| 2.0 * g.length(a)).collect();
        let doubled = GridSpec::new(g.dim(), &modes, &lengths, g.dealias)?;
        let scale = (doubled.volume() / g.volume()).sqrt();
        let mut out = SpectralField::zeros(&doubled);
        for (idx, c) in self.coeffs.iter().enumerate() {
            let bins = g.decode(idx);
            let mut new_idx = 0usize;
            for a in 0..MAX_DIM {
                let n_new = doubled.modes(a);
                let m = g.signed_index(a, bins[a]) * if a < g.dim() { 2 } else { 1 };
                let bin = if m >= 0 {
                    m as usize
                } else {
                    (m + n_new as i64) as usize
                };
                new_idx = new_idx * n_new + bin;
            }
            out.coeffs[new_idx] = c * scale;
        }
        Ok(out)
    }

    pub fn read_binary<R: std::io::Read>(r: &mut R, dealias: bool) -> Result<Self> {
        let mut u = [0u8; 8];
        r.read_exact(&mut u)?;
        let dim = u64::from_le_bytes(u) as usize;
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::MalformedFile(format!("bad dim {dim}")));
        }
        let mut modes = Vec::with_capacity(dim);
        for _ in 0..dim {
            r.read_exact(&mut u)?;
            modes.push(u64::from_le_bytes(u) as usize);
        }
        let mut lengths = Vec::with_capacity(dim);
        for _ in 0..dim {
            r.read_exact(&mut u)?;
            lengths.push(f64::from_le_bytes(u));
        }
        let grid = GridSpec::new(dim, &modes, &lengths, dealias)
            .map_err(|e| Error::MalformedFile(e.to_string()))?;
        let mut coeffs = Vec::with_capacity(grid.total_modes());
        for _ in 0..grid.total_modes() {
            r.read_exact(&mut u)?;
            let re = f64::from_le_bytes(u);
            r.read_exact(&mut u)?;
            let im = f64::from_le_bytes(u);
            coeffs.push(Complex64::new(re, im));
        }
        SpectralField::from_coeffs(&grid, coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn seeded_field(grid: &GridSpec, seed: u64) -> SpectralField {
        // cheap deterministic coefficients for transform tests
        let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let coeffs = (0..grid.total_modes())
            .map(|_| Complex64::new(next(), next()))
            .collect();
        SpectralField::from_coeffs(grid, coeffs).unwrap()
    }

    #[test]
    fn constant_field_zero_mode() {
        // constant c on a volume-1 box -> single zero-mode coefficient c
        let grid = GridSpec::line(16, 1.0, false).unwrap();
        let c = Complex64::new(0.7, -0.2);
        let samples = vec![c; 16];
        let f = SpectralField::from_physical(&grid, &samples).unwrap();
        assert_abs_diff_eq!(f.coeffs()[0].re, 0.7, epsilon = 1e-14);
        assert_abs_diff_eq!(f.coeffs()[0].im, -0.2, epsilon = 1e-14);
        for &c in &f.coeffs()[1..] {
            assert!(c.norm() < 1e-14);
        }
    }

    #[test]
    fn plane_wave_single_bin() {
        let n = 32;
        let grid = GridSpec::line(n, 1.0, false).unwrap();
        let k = grid.wavenumber(0, 3);
        let samples: Vec<Complex64> = (0..n)
            .map(|j| Complex64::from_polar(1.0, k * j as f64 / n as f64))
            .collect();
        let f = SpectralField::from_physical(&grid, &samples).unwrap();
        for (idx, c) in f.coeffs().iter().enumerate() {
            if idx == 3 {
                assert_abs_diff_eq!(c.re, 1.0, epsilon = 1e-13);
            } else {
                assert!(c.norm() < 1e-13, "leaked into bin {idx}");
            }
        }
    }

    #[test]
    fn round_trip_1d() {
        let grid = GridSpec::line(64, 5.0, false).unwrap();
        let f = seeded_field(&grid, 11);
        let g = SpectralField::from_physical(&grid, &f.to_physical()).unwrap();
        for (a, b) in f.coeffs().iter().zip(g.coeffs()) {
            assert!((a - b).norm() <= 1e-12 * f.l2_norm());
        }
    }

    #[test]
    fn round_trip_3d_anisotropic() {
        let grid = GridSpec::new(3, &[8, 4, 6], &[2.0, 3.0, 1.5], false).unwrap();
        let f = seeded_field(&grid, 3);
        let g = SpectralField::from_physical(&grid, &f.to_physical()).unwrap();
        let scale = f.l2_norm();
        for (a, b) in f.coeffs().iter().zip(g.coeffs()) {
            assert!((a - b).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn parseval_exact() {
        for seed in 0..20 {
            let grid = GridSpec::new(2, &[16, 12], &[2.5, 7.0], false).unwrap();
            let f = seeded_field(&grid, seed);
            let phys = f.to_physical();
            let phys_l2 = (phys.iter().map(|v| v.norm_sqr()).sum::<f64>()
                * grid.cell_volume())
            .sqrt();
            assert_abs_diff_eq!(phys_l2, f.l2_norm(), epsilon = 1e-12 * f.l2_norm());
        }
    }

    #[test]
    fn multiplier_identity_and_unitary_inverse() {
        let grid = GridSpec::line(32, 4.0, false).unwrap();
        let f = seeded_field(&grid, 5);
        let id = f.apply_multiplier(|_| Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(f.coeffs(), id.coeffs());

        let t = 0.37;
        let back = f.propagate_free(t).propagate_free(-t);
        for (a, b) in f.coeffs().iter().zip(back.coeffs()) {
            assert!((a - b).norm() <= 1e-12);
        }
    }

    #[test]
    fn propagator_preserves_moduli() {
        let grid = GridSpec::line(32, 4.0, false).unwrap();
        let f = seeded_field(&grid, 9);
        let g = f.propagate_free(0.91);
        for (a, b) in f.coeffs().iter().zip(g.coeffs()) {
            assert!((a.norm() - b.norm()).abs() <= 1e-14 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn multiplier_rejects_non_finite() {
        let grid = GridSpec::line(8, 1.0, false).unwrap();
        let f = seeded_field(&grid, 1);
        let r = f.apply_multiplier(|k| Complex64::new(1.0 / k[0], 0.0));
        assert!(matches!(r, Err(Error::NonFiniteMultiplier(..))));
    }

    #[test]
    fn product_of_plane_waves() {
        let n = 32;
        let grid = GridSpec::line(n, 2.0, false).unwrap();
        let mut a = SpectralField::zeros(&grid);
        let mut b = SpectralField::zeros(&grid);
        a.coeffs_mut()[2] = Complex64::new(1.0, 0.0); // bin 2
        b.coeffs_mut()[3] = Complex64::new(1.0, 0.0); // bin 3
        let p = SpectralField::pointwise_product(&a, &b).unwrap();
        // e^{ik1 x} * e^{ik2 x} -> bin 5, amplitude 1/sqrt(V)
        let expect = 1.0 / grid.volume().sqrt();
        for (idx, c) in p.coeffs().iter().enumerate() {
            if idx == 5 {
                assert_abs_diff_eq!(c.re, expect, epsilon = 1e-13);
            } else {
                assert!(c.norm() < 1e-13);
            }
        }
    }

    #[test]
    fn product_identity_and_modulus() {
        let n = 16;
        let grid = GridSpec::line(n, 1.0, false).unwrap();
        let ones = vec![Complex64::new(1.0, 0.0); n];
        let one = SpectralField::from_physical(&grid, &ones).unwrap();
        let f = seeded_field(&grid, 2);
        let p = SpectralField::pointwise_product(&one, &f).unwrap();
        for (a, b) in p.coeffs().iter().zip(f.coeffs()) {
            assert!((a - b).norm() <= 1e-13);
        }

        // |e^{ikx}|^2 == 1
        let mut w = SpectralField::zeros(&grid);
        w.coeffs_mut()[4] = Complex64::new(1.0, 0.0);
        let wphys = w.to_physical();
        let conj = SpectralField::from_physical(
            &grid,
            &wphys.iter().map(|c| c.conj()).collect::<Vec<_>>(),
        )
        .unwrap();
        let m = SpectralField::pointwise_product(&conj, &w).unwrap();
        assert_abs_diff_eq!(m.coeffs()[0].re, 1.0, epsilon = 1e-13);
        for &c in &m.coeffs()[1..] {
            assert!(c.norm() < 1e-13);
        }
    }

    #[test]
    fn dealias_zeroes_top_third() {
        let grid = GridSpec::line(12, 1.0, true).unwrap();
        let coeffs = vec![Complex64::new(1.0, 0.0); 12];
        let mut f = SpectralField::from_coeffs(&grid, coeffs).unwrap();
        f.dealias();
        // keep |m| <= 4 for n = 12
        for bin in 0..12 {
            let m = grid.signed_index(0, bin).unsigned_abs();
            if m <= 4 {
                assert_eq!(f.coeffs()[bin].re, 1.0);
            } else {
                assert_eq!(f.coeffs()[bin].re, 0.0);
            }
        }
    }

    #[test]
    fn linearity_of_transform() {
        let grid = GridSpec::line(48, 3.0, false).unwrap();
        let f = seeded_field(&grid, 21);
        let g = seeded_field(&grid, 22);
        let alpha = Complex64::new(0.3, -1.1);
        let lhs = SpectralField::from_physical(
            &grid,
            &f.to_physical()
                .iter()
                .zip(g.to_physical().iter())
                .map(|(a, b)| alpha * a + b)
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let rhs = f.scaled(alpha).add(&g).unwrap();
        let scale = rhs.l2_norm();
        for (a, b) in lhs.coeffs().iter().zip(rhs.coeffs()) {
            assert!((a - b).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn embedding_preserves_the_function() {
        let grid = GridSpec::new(2, &[8, 6], &[2.0, 3.0], true).unwrap();
        let f = seeded_field(&grid, 4);
        let g = f.embed_doubled().unwrap();
        assert_eq!(g.grid().modes(0), 16);
        assert_abs_diff_eq!(g.grid().length(1), 6.0, epsilon = 1e-15);
        // norms scale with sqrt of the volume ratio (here 2 doublings)
        assert_abs_diff_eq!(g.l2_norm(), 2.0 * f.l2_norm(), epsilon = 1e-12);
        // pointwise values agree on the shared collocation points
        let pf = f.to_physical();
        let pg = g.to_physical();
        // original point (j0, j1) maps to (j0, j1) of the doubled grid since
        // x = j L / n is unchanged under L -> 2L, n -> 2n
        for j0 in 0..8 {
            for j1 in 0..6 {
                let a = pf[j0 * 6 + j1];
                let b = pg[j0 * 12 + j1];
                assert!((a - b).norm() <= 1e-12, "mismatch at ({j0},{j1})");
            }
        }
    }

    #[test]
    fn binary_round_trip() {
        let grid = GridSpec::new(2, &[8, 6], &[2.0, 1.5], false).unwrap();
        let f = seeded_field(&grid, 77);
        let mut buf = Vec::new();
        f.write_binary(&mut buf).unwrap();
        // header: dim (8) + 2 modes (16) + 2 lengths (16) + 48 coeffs * 16
        assert_eq!(buf.len(), 8 + 16 + 16 + 48 * 16);
        let g = SpectralField::read_binary(&mut buf.as_slice(), false).unwrap();
        assert_eq!(f.grid(), g.grid());
        assert_eq!(f.coeffs(), g.coeffs());
    }
}
