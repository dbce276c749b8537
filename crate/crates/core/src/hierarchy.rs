//! Norm algebra for factorized marginal hierarchies.
//!
//! Level-k quantities of factorized states reduce exactly to one-particle
//! inner products: the 2k-variable kernels are never materialized outside of
//! test oracles. With `a = ||phi_N||_{H^1}^2`, `b = ||phi||_{H^1}^2` and
//! `c = <<grad> phi_N, <grad> phi>`, the level-k kernel difference satisfies
//!
//! ```text
//!   ||G_{N,k} - G_k||_{H^1} = sqrt(a^{2k} + b^{2k} - 2 |c|^{2k})
//! ```

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::SpectralField;
use crate::norms;

/// `||S^{(alpha,k)} gamma^(k)||_{L^2}` of the pure factorized level-k kernel:
/// equals `||phi||_{H^alpha}^{2k}`.
pub fn tensor_level_norm(phi: &SpectralField, alpha: f64, k: u32) -> f64 {
    norms::sobolev_norm(phi, alpha).powi(2 * k as i32)
}

/// Weighted inner product `<<grad>^alpha f, <grad>^alpha g>`.
fn weighted_inner(f: &SpectralField, g: &SpectralField, alpha: f64) -> Result<Complex64> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch("hierarchy states live on different grids".into()));
    }
    let k2 = f.grid().k_squared();
    Ok(f.coeffs()
        .iter()
        .zip(g.coeffs())
        .zip(k2.iter())
        .map(|((a, b), &kk)| (1.0 + kk).powf(alpha) * a.conj() * b)
        .sum())
}

/// The three H^1 pair invariants `(a, b, |c|)` that drive every level,
/// all computed by the same weighted sum so identical arguments give an
/// exactly zero radicand.
fn pair_data(phi_n: &SpectralField, phi: &SpectralField) -> Result<(f64, f64, f64)> {
    let a = weighted_inner(phi_n, phi_n, 1.0)?.re;
    let b = weighted_inner(phi, phi, 1.0)?.re;
    let c = weighted_inner(phi_n, phi, 1.0)?.norm();
    Ok((a, b, c))
}

/// `||G_{N,k} - G_k||_{H^1}` of the level-k factorized kernels, by the exact
/// closed form. The radicand is nonnegative by Cauchy-Schwarz; rounding dust
/// below 1e-12 relative is clamped to zero.
pub fn tensor_difference_norm(
    phi_n: &SpectralField,
    phi: &SpectralField,
    k: u32,
) -> Result<f64> {
    let (a, b, c) = pair_data(phi_n, phi)?;
    Ok(difference_from_pair(a, b, c, k))
}

fn difference_from_pair(a: f64, b: f64, c: f64, k: u32) -> f64 {
    let m = a.max(b);
    if m == 0.0 {
        return 0.0;
    }
    let p = 2 * k as i32;
    let radicand = (a / m).powi(p) + (b / m).powi(p) - 2.0 * (c / m).powi(p);
    let clamped = if radicand < 0.0 && radicand > -1e-12 {
        0.0
    } else {
        radicand.max(0.0)
    };
    m.powi(k as i32) * clamped.sqrt()
}

#[derive(Clone, Debug)]
pub struct BinomialReport {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// Checks the level-k difference bound
/// `||G_{N,k} - G_k||_{H^1} <= 2k (3 C1)^{2k-1} ||phi_N - phi||_{H^1}`
/// under the hypotheses `||phi_N||_{H^1} <= C1`, `||phi||_{H^1} <= C1`.
/// A hypothesis violation is reported as an error, distinct from a bound
/// failure.
pub fn binomial_bound_check(
    phi_n: &SpectralField,
    phi: &SpectralField,
    k: u32,
    c1: f64,
) -> Result<BinomialReport> {
    let hn = norms::sobolev_norm(phi_n, 1.0);
    let h = norms::sobolev_norm(phi, 1.0);
    let slack = c1 * (1.0 + 1e-12);
    if hn > slack || h > slack {
        return Err(Error::HypothesisViolated(format!(
            "H^1 norms {hn:.6e}, {h:.6e} exceed C1 = {c1:.6e}"
        )));
    }
    let lhs = tensor_difference_norm(phi_n, phi, k)?;
    let diff = norms::sobolev_norm(&phi_n.sub(phi)?, 1.0);
    let rhs = 2.0 * k as f64 * (3.0 * c1).powi(2 * k as i32 - 1) * diff;
    let pass = lhs <= rhs * (1.0 + 1e-12) + f64::MIN_POSITIVE;
    Ok(BinomialReport { lhs, rhs, pass })
}

/// Geometric master norm of a pure factorized hierarchy:
/// `sum_{k>=1} Z^{-k} ||phi||_{H^alpha}^{2k} = r / (1 - r)` with
/// `r = ||phi||_{H^alpha}^2 / Z`. Divergence (`r >= 1`) is an error.
pub fn master_norm_factorized(phi: &SpectralField, alpha: f64, z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::InvalidParameter(format!("Z must be positive, got {z}")));
    }
    let r = norms::sobolev_norm(phi, alpha).powi(2) / z;
    if r >= 1.0 {
        return Err(Error::Divergent(format!(
            "master norm needs ||phi||_{{H^alpha}}^2 / Z < 1, got {r}"
        )));
    }
    Ok(r / (1.0 - r))
}

/// Level norm of a finite convex mixture `sum_i w_i |phi_i><phi_i|^{tensor k}`
/// via the Gram matrix of weighted inner products.
pub fn mixture_level_norm(
    states: &[(f64, SpectralField)],
    alpha: f64,
    k: u32,
) -> Result<f64> {
    let m = states.len();
    let mut acc = 0.0;
    for i in 0..m {
        for j in 0..m {
            let c = weighted_inner(&states[i].1, &states[j].1, alpha)?.norm();
            acc += states[i].0 * states[j].0 * c.powi(2 * k as i32);
        }
    }
    Ok(acc.max(0.0).sqrt())
}

#[derive(Clone, Debug)]
pub struct HierarchyDifference {
    pub value: f64,
    /// Levels actually summed.
    pub k_used: u32,
    /// Certified bound on the discarded tail.
    pub tail_bound: f64,
    /// Closed-form envelope `sum_k Z^{-k} 2k (3 C1)^{2k-1} ||phi_N - phi||`.
    pub envelope: f64,
}

/// Master-norm distance between the two factorized hierarchies, summed level
/// by level with a certified geometric tail.
///
/// Convergence needs `Z > (3 max(||phi_N||, ||phi||)_{H^1})^2`; levels are
/// added until the tail bound drops below 1e-12 of the partial sum (or the
/// explicit `k_max` is reached).
pub fn hierarchy_difference_master_norm(
    phi_n: &SpectralField,
    phi: &SpectralField,
    z: f64,
    k_max: Option<u32>,
) -> Result<HierarchyDifference> {
    let (a, b, c) = pair_data(phi_n, phi)?;
    let c1 = a.max(b).sqrt();
    if c1 == 0.0 {
        return Ok(HierarchyDifference {
            value: 0.0,
            k_used: 0,
            tail_bound: 0.0,
            envelope: 0.0,
        });
    }
    let rho = (3.0 * c1).powi(2) / z;
    if rho >= 1.0 {
        return Err(Error::Divergent(format!(
            "need Z > (3 C1)^2 = {:.6e}, got Z = {z:.6e}",
            (3.0 * c1).powi(2)
        )));
    }
    let diff_h1 = norms::sobolev_norm(&phi_n.sub(phi)?, 1.0);
    // sum_{k > K} k rho^k = rho^{K+1} ((K+1) - K rho) / (1 - rho)^2
    let tail_after = |kk: u32| {
        let kf = kk as f64;
        diff_h1 * (2.0 / (3.0 * c1)) * rho.powi(kk as i32 + 1) * ((kf + 1.0) - kf * rho)
            / ((1.0 - rho) * (1.0 - rho))
    };
    let envelope = diff_h1 * (2.0 / (3.0 * c1)) * rho / ((1.0 - rho) * (1.0 - rho));

    let cap = k_max.unwrap_or(10_000);
    let mut value = 0.0;
    let mut k_used = 0;
    for k in 1..=cap {
        value += z.powi(-(k as i32)) * difference_from_pair(a, b, c, k);
        k_used = k;
        let tail = tail_after(k);
        if k_max.is_none() && tail <= 1e-12 * value.max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Ok(HierarchyDifference {
        value,
        k_used,
        tail_bound: tail_after(k_used),
        envelope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use approx::assert_abs_diff_eq;

    fn mode_state(grid: &GridSpec, bin: usize, amp: Complex64) -> SpectralField {
        let mut f = SpectralField::zeros(grid);
        f.coeffs_mut()[bin] = amp;
        f
    }

    #[test]
    fn level_norm_closed_form() {
        let grid = GridSpec::line(16, 1.0, false).unwrap();
        // single mode m: H^alpha norm (1+k^2)^{alpha/2} |a|
        let f = mode_state(&grid, 3, Complex64::new(0.0, 0.8));
        let k = grid.wavenumber(0, 3);
        for lvl in 1..=4u32 {
            let expect = ((1.0 + k * k) * 0.64).powi(lvl as i32);
            assert_abs_diff_eq!(
                tensor_level_norm(&f, 1.0, lvl),
                expect,
                epsilon = 1e-10 * expect
            );
        }
        // unit H^alpha norm: level norm 1 at every k
        let unit = mode_state(&grid, 0, Complex64::new(1.0, 0.0));
        for lvl in [1u32, 2, 7] {
            assert_abs_diff_eq!(tensor_level_norm(&unit, 2.0, lvl), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn difference_identical_and_orthogonal() {
        let grid = GridSpec::line(16, 1.0, false).unwrap();
        let f = mode_state(&grid, 2, Complex64::new(0.5, 0.1));
        assert_eq!(tensor_difference_norm(&f, &f, 3).unwrap(), 0.0);

        // orthogonal unit-H^1 states at level 1: sqrt(2)
        let k1 = grid.wavenumber(0, 1);
        let k2 = grid.wavenumber(0, 2);
        let a = mode_state(&grid, 1, Complex64::new(1.0 / (1.0 + k1 * k1).sqrt(), 0.0));
        let b = mode_state(&grid, 2, Complex64::new(1.0 / (1.0 + k2 * k2).sqrt(), 0.0));
        assert_abs_diff_eq!(
            tensor_difference_norm(&a, &b, 1).unwrap(),
            2.0f64.sqrt(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn difference_symmetric_and_triangle() {
        let grid = GridSpec::line(32, 2.0, false).unwrap();
        let mk = |seed: u64| {
            let coeffs: Vec<Complex64> = (0..32)
                .map(|i| {
                    let x = ((i + 1) as f64) * (seed as f64 + 0.7);
                    Complex64::new((0.05 * x).sin(), (0.03 * x).cos()) / (1.0 + i as f64)
                })
                .collect();
            SpectralField::from_coeffs(&grid, coeffs).unwrap()
        };
        let (a, b, c) = (mk(1), mk(2), mk(3));
        for k in 1..=4u32 {
            let ab = tensor_difference_norm(&a, &b, k).unwrap();
            let ba = tensor_difference_norm(&b, &a, k).unwrap();
            assert_abs_diff_eq!(ab, ba, epsilon = 1e-12 * ab.max(1.0));
            let ac = tensor_difference_norm(&a, &c, k).unwrap();
            let cb = tensor_difference_norm(&c, &b, k).unwrap();
            assert!(ab <= ac + cb + 1e-10);
        }
    }

    #[test]
    fn master_norm_geometric_values() {
        let grid = GridSpec::line(16, 1.0, false).unwrap();
        let unit = mode_state(&grid, 0, Complex64::new(1.0, 0.0));
        // ||phi||_{H^alpha} = 1, Z = 2: sum 2^{-k} = 1
        assert_abs_diff_eq!(
            master_norm_factorized(&unit, 1.0, 2.0).unwrap(),
            1.0,
            epsilon = 1e-14
        );
        // Z = 4: (1/4) / (3/4) = 1/3
        assert_abs_diff_eq!(
            master_norm_factorized(&unit, 1.0, 4.0).unwrap(),
            1.0 / 3.0,
            epsilon = 1e-14
        );
        // Z equal to the squared norm diverges
        assert!(matches!(
            master_norm_factorized(&unit, 1.0, 1.0),
            Err(Error::Divergent(_))
        ));
    }

    #[test]
    fn master_norm_monotone_in_z() {
        let grid = GridSpec::line(16, 1.0, false).unwrap();
        let f = mode_state(&grid, 1, Complex64::new(0.4, 0.3));
        let floor = norms::sobolev_norm(&f, 1.0).powi(2);
        let mut last = f64::INFINITY;
        for z in [1.05, 1.5, 3.0, 8.0, 100.0].map(|m| m * floor) {
            let v = master_norm_factorized(&f, 1.0, z).unwrap();
            assert!(v < last);
            last = v;
        }
    }

    #[test]
    fn binomial_bound_and_hypothesis() {
        let grid = GridSpec::line(16, 1.0, false).unwrap();
        let k1 = grid.wavenumber(0, 1);
        let k2 = grid.wavenumber(0, 2);
        let a = mode_state(&grid, 1, Complex64::new(0.5 / (1.0 + k1 * k1).sqrt(), 0.0));
        let b = mode_state(&grid, 2, Complex64::new(0.3 / (1.0 + k2 * k2).sqrt(), 0.0));
        let rep = binomial_bound_check(&a, &b, 3, 1.0).unwrap();
        assert!(rep.pass);
        let same = binomial_bound_check(&a, &a, 4, 1.0).unwrap();
        assert_eq!(same.lhs, 0.0);
        assert!(same.pass);
        // C1 below the actual norms is a hypothesis violation, not a failure
        assert!(matches!(
            binomial_bound_check(&a, &b, 2, 1e-3),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn hierarchy_difference_tail_certified() {
        let grid = GridSpec::line(32, 2.0, false).unwrap();
        let mk = |amp: f64, bin: usize| {
            mode_state(&grid, bin, Complex64::new(amp, 0.02))
        };
        let a = mk(0.31, 1);
        let b = mk(0.27, 2);
        let h = hierarchy_difference_master_norm(&a, &b, 30.0, None).unwrap();
        assert!(h.value > 0.0);
        assert!(h.tail_bound <= 1e-12 * h.value);
        assert!(h.value <= h.envelope * (1.0 + 1e-9));
        // doubling k_max beyond the certified point changes nothing measurable
        let fixed = hierarchy_difference_master_norm(&a, &b, 30.0, Some(2 * h.k_used)).unwrap();
        assert!((fixed.value - h.value).abs() <= 1e-12 * h.value);

        // identical states: exact zero
        let same = hierarchy_difference_master_norm(&a, &a, 30.0, None).unwrap();
        assert_eq!(same.value, 0.0);

        // convergence precondition enforced
        assert!(matches!(
            hierarchy_difference_master_norm(&a, &b, 1e-3, None),
            Err(Error::Divergent(_))
        ));
    }

    #[test]
    fn mixture_reduces_to_pure_case() {
        let grid = GridSpec::line(16, 1.0, false).unwrap();
        let f = mode_state(&grid, 1, Complex64::new(0.6, 0.1));
        let pure = tensor_level_norm(&f, 1.0, 2);
        let mixed = mixture_level_norm(&[(1.0, f.clone())], 1.0, 2).unwrap();
        assert_abs_diff_eq!(pure, mixed, epsilon = 1e-12 * pure);
    }
}
