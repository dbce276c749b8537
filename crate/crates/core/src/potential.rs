//! Interaction profiles and their contracted convolution operators.
//!
//! A profile is the unscaled interaction `V` known through its analytic
//! Fourier transform. The contraction `V_N(x) = N^{d beta} V(N^beta x)` never
//! touches physical space here: its action on a field is the multiplier
//! `Vhat(k N^{-beta})`, exact at every grid mode. The mean-field deviation
//! `W_N = V_N - b0 delta` is the multiplier `Vhat(k N^{-beta}) - b0`, pinned
//! to zero at k = 0.
//!
//! Profiles are trait objects selected by name through [`ProfileRegistry`],
//! so solver and harness code is generic over the interaction family.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fit::{self, FitModel, RateFit};
use crate::grid::{SpectralField, MAX_DIM};
use crate::norms;
use crate::quad;

/// Parameters understood by the built-in profile factories.
#[derive(Clone, Debug)]
pub struct ProfileParams {
    pub dim: usize,
    /// Coupling constant `b0 = int V`.
    pub b0: f64,
    /// Width of the Gaussian profiles.
    pub sigma: f64,
    /// Center offset of the non-even Gaussian, along axis 0.
    pub shift: f64,
    /// Support radius of the compactly supported bump.
    pub radius: f64,
}

impl Default for ProfileParams {
    fn default() -> Self {
        ProfileParams {
            dim: 1,
            b0: 1.0,
            sigma: 1.0,
            shift: 0.5,
            radius: 1.0,
        }
    }
}

/// An interaction `V` with analytic Fourier data and the moments the
/// convolution estimates are stated with.
pub trait InteractionProfile: Send + Sync {
    fn name(&self) -> &str;

    /// `b0 = int V = Vhat(0)`.
    fn coupling(&self) -> f64;

    /// Analytic Fourier transform `Vhat(xi)`, Hermitian for real `V`.
    fn fourier(&self, xi: &[f64; MAX_DIM]) -> Complex64;

    /// `int |x| V(x) dx`, the constant in the first-order multiplier bound.
    fn first_moment(&self) -> f64;

    fn is_even(&self) -> bool;

    fn is_nonnegative(&self) -> bool;

    /// Deviation multiplier `What_N(xi) = Vhat(xi N^{-beta}) - b0`, exactly
    /// zero at the origin.
    fn deviation(&self, xi: &[f64; MAX_DIM], n: u64, beta: f64) -> Complex64 {
        if xi[0] == 0.0 && xi[1] == 0.0 && xi[2] == 0.0 {
            return Complex64::default();
        }
        let s = (n as f64).powf(-beta);
        self.fourier(&[xi[0] * s, xi[1] * s, xi[2] * s]) - self.coupling()
    }
}

// ---------------------------------------------------------------------------
// Built-in profiles

/// Isotropic Gaussian `V(x) = b0 (2 pi sigma^2)^{-d/2} exp(-|x|^2 / 2 sigma^2)`.
pub struct GaussianProfile {
    b0: f64,
    sigma: f64,
    dim: usize,
}

impl GaussianProfile {
    pub fn new(dim: usize, b0: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !(b0 > 0.0) {
            return Err(Error::InvalidParameter(
                "gaussian profile needs sigma > 0 and b0 > 0".into(),
            ));
        }
        Ok(GaussianProfile { b0, sigma, dim })
    }
}

/// `E|X|` for a standard normal in d dimensions.
fn std_normal_abs_moment(dim: usize) -> f64 {
    use std::f64::consts::PI;
    match dim {
        1 => (2.0 / PI).sqrt(),
        2 => (PI / 2.0).sqrt(),
        _ => 2.0 * (2.0 / PI).sqrt(),
    }
}

impl InteractionProfile for GaussianProfile {
    fn name(&self) -> &str {
        "gaussian"
    }
    fn coupling(&self) -> f64 {
        self.b0
    }
    fn fourier(&self, xi: &[f64; MAX_DIM]) -> Complex64 {
        let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        Complex64::new(self.b0 * (-0.5 * self.sigma * self.sigma * k2).exp(), 0.0)
    }
    fn first_moment(&self) -> f64 {
        self.b0 * self.sigma * std_normal_abs_moment(self.dim)
    }
    fn is_even(&self) -> bool {
        true
    }
    fn is_nonnegative(&self) -> bool {
        true
    }
}

/// Gaussian translated along axis 0: non-even, so the deviation multiplier
/// carries a first-order term `-i b0 shift xi_1 N^{-beta}` near the origin.
pub struct ShiftedGaussianProfile {
    b0: f64,
    sigma: f64,
    shift: f64,
    moment: OnceLock<f64>,
}

impl ShiftedGaussianProfile {
    pub fn new(dim: usize, b0: f64, sigma: f64, shift: f64) -> Result<Self> {
        if dim != 1 {
            return Err(Error::InvalidParameter(
                "shifted-gaussian is a 1D diagnostic profile".into(),
            ));
        }
        if !(sigma > 0.0) || !(b0 > 0.0) {
            return Err(Error::InvalidParameter(
                "shifted-gaussian profile needs sigma > 0 and b0 > 0".into(),
            ));
        }
        Ok(ShiftedGaussianProfile {
            b0,
            sigma,
            shift,
            moment: OnceLock::new(),
        })
    }
}

impl InteractionProfile for ShiftedGaussianProfile {
    fn name(&self) -> &str {
        "shifted-gaussian"
    }
    fn coupling(&self) -> f64 {
        self.b0
    }
    fn fourier(&self, xi: &[f64; MAX_DIM]) -> Complex64 {
        let k2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        let mag = self.b0 * (-0.5 * self.sigma * self.sigma * k2).exp();
        Complex64::from_polar(mag, -self.shift * xi[0])
    }
    fn first_moment(&self) -> f64 {
        *self.moment.get_or_init(|| {
            let (b0, s, a) = (self.b0, self.sigma, self.shift);
            let density = move |x: f64| {
                let u = (x - a) / s;
                x.abs() * b0 * (-0.5 * u * u).exp()
                    / (s * (2.0 * std::f64::consts::PI).sqrt())
            };
            let r = a.abs() + 14.0 * s;
            quad::integrate(&density, -r, 0.0, 1e-13) + quad::integrate(&density, 0.0, r, 1e-13)
        })
    }
    fn is_even(&self) -> bool {
        self.shift == 0.0
    }
    fn is_nonnegative(&self) -> bool {
        true
    }
}

/// Compactly supported smooth bump: tensor product of 1D mollifiers
/// `h(u) = exp(-1/(1-u^2))` rescaled to `[-radius, radius]` per axis, with the
/// 1D factor transform tabulated by quadrature.
pub struct BumpProfile {
    b0: f64,
    radius: f64,
    dim: usize,
    table: Vec<f64>,
    table_step: f64,
    mollifier_mass: f64,
    moment: OnceLock<f64>,
}

fn mollifier(u: f64) -> f64 {
    if u.abs() < 1.0 {
        (-1.0 / (1.0 - u * u)).exp()
    } else {
        0.0
    }
}

const BUMP_TABLE_MAX: f64 = 64.0;
const BUMP_TABLE_STEP: f64 = 1.0 / 32.0;

impl BumpProfile {
    pub fn new(dim: usize, b0: f64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !(b0 > 0.0) {
            return Err(Error::InvalidParameter(
                "bump profile needs radius > 0 and b0 > 0".into(),
            ));
        }
        let mass = quad::integrate(mollifier, -1.0, 1.0, 1e-13);
        let len = (BUMP_TABLE_MAX / BUMP_TABLE_STEP) as usize + 4;
        let table: Vec<f64> = (0..len)
            .map(|i| Self::factor_transform_direct(i as f64 * BUMP_TABLE_STEP, mass))
            .collect();
        Ok(BumpProfile {
            b0,
            radius,
            dim,
            table,
            table_step: BUMP_TABLE_STEP,
            mollifier_mass: mass,
            moment: OnceLock::new(),
        })
    }

    /// `(1/mass) int_{-1}^{1} h(u) cos(s u) du`
    fn factor_transform_direct(s: f64, mass: f64) -> f64 {
        quad::integrate(|u| mollifier(u) * (s * u).cos(), -1.0, 1.0, 1e-13) / mass
    }

    /// Transform of one normalized 1D factor at wavenumber `xi`, by cubic
    /// Lagrange interpolation on the table (the transform is even, so the
    /// node below zero reflects).
    fn factor(&self, xi: f64) -> f64 {
        let s = (xi * self.radius).abs();
        if s >= BUMP_TABLE_MAX {
            return Self::factor_transform_direct(s, self.mollifier_mass);
        }
        let x = s / self.table_step;
        let i = (x.floor() as usize).min(self.table.len() - 3);
        let t = x - i as f64;
        let p0 = if i == 0 { self.table[1] } else { self.table[i - 1] };
        let (p1, p2, p3) = (self.table[i], self.table[i + 1], self.table[i + 2]);
        -p0 * t * (t - 1.0) * (t - 2.0) / 6.0
            + p1 * (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0
            - p2 * (t + 1.0) * t * (t - 2.0) / 2.0
            + p3 * (t + 1.0) * t * (t - 1.0) / 6.0
    }
}

impl InteractionProfile for BumpProfile {
    fn name(&self) -> &str {
        "bump"
    }
    fn coupling(&self) -> f64 {
        self.b0
    }
    fn fourier(&self, xi: &[f64; MAX_DIM]) -> Complex64 {
        let mut v = self.b0;
        for &x in xi.iter().take(self.dim) {
            v *= self.factor(x);
        }
        Complex64::new(v, 0.0)
    }
    fn first_moment(&self) -> f64 {
        *self.moment.get_or_init(|| {
            let mass = self.mollifier_mass;
            let g = move |u: f64| mollifier(u) / mass;
            let m = match self.dim {
                1 => quad::integrate(move |u| u.abs() * g(u), -1.0, 1.0, 1e-12),
                2 => quad::integrate(
                    move |u| {
                        g(u) * quad::integrate(
                            move |v| (u * u + v * v).sqrt() * g(v),
                            -1.0,
                            1.0,
                            1e-10,
                        )
                    },
                    -1.0,
                    1.0,
                    1e-9,
                ),
                _ => quad::integrate(
                    move |u| {
                        g(u) * quad::integrate(
                            move |v| {
                                g(v) * quad::integrate(
                                    move |w| (u * u + v * v + w * w).sqrt() * g(w),
                                    -1.0,
                                    1.0,
                                    1e-9,
                                )
                            },
                            -1.0,
                            1.0,
                            1e-8,
                        )
                    },
                    -1.0,
                    1.0,
                    1e-7,
                ),
            };
            self.b0 * self.radius * m
        })
    }
    fn is_even(&self) -> bool {
        true
    }
    fn is_nonnegative(&self) -> bool {
        true
    }
}

/// Exact delta multiplier (`Vhat == b0`): the degenerate override under which
/// the Hartree flow coincides with the cubic flow and `W_N` vanishes.
pub struct DeltaProfile {
    b0: f64,
}

impl DeltaProfile {
    pub fn new(b0: f64) -> Result<Self> {
        if !(b0 > 0.0) {
            return Err(Error::InvalidParameter("delta profile needs b0 > 0".into()));
        }
        Ok(DeltaProfile { b0 })
    }
}

impl InteractionProfile for DeltaProfile {
    fn name(&self) -> &str {
        "delta"
    }
    fn coupling(&self) -> f64 {
        self.b0
    }
    fn fourier(&self, _xi: &[f64; MAX_DIM]) -> Complex64 {
        Complex64::new(self.b0, 0.0)
    }
    fn first_moment(&self) -> f64 {
        0.0
    }
    fn is_even(&self) -> bool {
        true
    }
    fn is_nonnegative(&self) -> bool {
        true
    }
}

// ---------------------------------------------------------------------------
// Registry

pub type ProfileFactory =
    Box<dyn Fn(&ProfileParams) -> Result<Arc<dyn InteractionProfile>> + Send + Sync>;

/// Name-keyed registry of interaction profiles; new families can be plugged
/// in beside the built-ins.
pub struct ProfileRegistry {
    factories: BTreeMap<String, ProfileFactory>,
}

impl ProfileRegistry {
    pub fn empty() -> Self {
        ProfileRegistry {
            factories: BTreeMap::new(),
        }
    }

    pub fn with_builtins() -> Self {
        let mut reg = Self::empty();
        reg.register("gaussian", |p| {
            Ok(Arc::new(GaussianProfile::new(p.dim, p.b0, p.sigma)?) as _)
        });
        reg.register("shifted-gaussian", |p| {
            Ok(Arc::new(ShiftedGaussianProfile::new(p.dim, p.b0, p.sigma, p.shift)?) as _)
        });
        reg.register("bump", |p| {
            Ok(Arc::new(BumpProfile::new(p.dim, p.b0, p.radius)?) as _)
        });
        reg.register("delta", |p| Ok(Arc::new(DeltaProfile::new(p.b0)?) as _));
        reg
    }

    pub fn register<F>(&mut self, name: &str, factory: F)
    where
        F: Fn(&ProfileParams) -> Result<Arc<dyn InteractionProfile>> + Send + Sync + 'static,
    {
        self.factories.insert(name.to_string(), Box::new(factory));
    }

    pub fn build(&self, name: &str, params: &ProfileParams) -> Result<Arc<dyn InteractionProfile>> {
        match self.factories.get(name) {
            Some(f) => f(params),
            None => Err(Error::InvalidParameter(format!(
                "unknown profile '{name}'; available: {}",
                self.names().join(", ")
            ))),
        }
    }

    pub fn names(&self) -> Vec<String> {
        self.factories.keys().cloned().collect()
    }
}

// ---------------------------------------------------------------------------
// Operations

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "beta must lie in (0, 1), got {beta}"
        )));
    }
    Ok(())
}

/// `V_N * f` as the multiplier `Vhat(k N^{-beta})`.
pub fn convolve_scaled(
    f: &SpectralField,
    profile: &dyn InteractionProfile,
    n: u64,
    beta: f64,
) -> Result<SpectralField> {
    check_beta(beta)?;
    let s = (n as f64).powf(-beta);
    f.apply_multiplier(|k| profile.fourier(&[k[0] * s, k[1] * s, k[2] * s]))
}

/// `W_N * f` as the multiplier `Vhat(k N^{-beta}) - b0`; the zero mode of the
/// output is exactly zero.
pub fn convolve_deviation(
    f: &SpectralField,
    profile: &dyn InteractionProfile,
    n: u64,
    beta: f64,
) -> Result<SpectralField> {
    check_beta(beta)?;
    f.apply_multiplier(|k| profile.deviation(k, n, beta))
}

/// Per-N values `||W_N * f|| / ||D^s f||` over a dyadic sweep, with the
/// fitted log-log slope. The expected slope is `-beta * s` for profiles with a
/// first-order transform zero and `-2 beta` (capped by the data regularity)
/// for even profiles.
pub fn measure_convolution_rate(
    profile: &dyn InteractionProfile,
    f: &SpectralField,
    s: f64,
    n_list: &[u64],
    beta: f64,
) -> Result<RateFit> {
    check_beta(beta)?;
    if n_list.len() < 4 {
        return Err(Error::TooFewSamples {
            needed: 4,
            got: n_list.len(),
        });
    }
    if !fit::is_dyadic(n_list) {
        return Err(Error::InvalidParameter(
            "rate measurement requires a strictly increasing dyadic N list".into(),
        ));
    }
    let denom = norms::homogeneous_norm(f, s);
    if denom == 0.0 || f.l2_norm() == 0.0 {
        return Err(Error::InvalidParameter(
            "rate measurement needs a nonzero field with finite homogeneous norm".into(),
        ));
    }
    let samples: Vec<(u64, f64)> = n_list
        .iter()
        .map(|&n| {
            let w = convolve_deviation(f, profile, n, beta)?;
            Ok((n, w.l2_norm() / denom))
        })
        .collect::<Result<_>>()?;
    fit::fit_rate(&samples, FitModel::PurePower)
}

/// Outcome of one bilinear pairing test.
#[derive(Clone, Debug)]
pub struct BilinearReport {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// Checks `|int (W_N * f1) conj(f2)| <= ||xV||_1 N^{-beta} |||grad|^{1/2} f1||
/// |||grad|^{1/2} f2||` in its discrete Plancherel form, with no hidden
/// constants.
pub fn bilinear_pairing_bound_check(
    f1: &SpectralField,
    f2: &SpectralField,
    profile: &dyn InteractionProfile,
    n: u64,
    beta: f64,
) -> Result<BilinearReport> {
    check_beta(beta)?;
    if f1.grid() != f2.grid() {
        return Err(Error::GridMismatch(
            "bilinear pairing requires identical grids".into(),
        ));
    }
    let grid = f1.grid();
    let mut pairing = Complex64::default();
    for (idx, (a, b)) in f1.coeffs().iter().zip(f2.coeffs()).enumerate() {
        let k = grid.wavenumber_at(idx);
        pairing += profile.deviation(&k, n, beta) * a * b.conj();
    }
    let lhs = pairing.norm();
    let rhs = profile.first_moment()
        * (n as f64).powf(-beta)
        * norms::homogeneous_norm(f1, 0.5)
        * norms::homogeneous_norm(f2, 0.5);
    let pass = lhs <= rhs * (1.0 + 1e-12) + f64::MIN_POSITIVE;
    Ok(BilinearReport { lhs, rhs, pass })
}
