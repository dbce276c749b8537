//! Sobolev and diagnostic norms, all evaluated in wavenumber space where the
//! discretization makes them exact; only the L^6 factor of the scattering
//! diagnostic touches the physical grid.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolution::EvolutionRun;
use crate::grid::SpectralField;

/// `H^s` norm: `(sum_k (1 + |k|^2)^s |c_k|^2)^{1/2}`. `H^0` is the L^2 norm.
pub fn sobolev_norm(f: &SpectralField, s: f64) -> f64 {
    let k2 = f.grid().k_squared();
    f.coeffs()
        .iter()
        .zip(k2.iter())
        .map(|(c, &kk)| (1.0 + kk).powf(s) * c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Homogeneous `D^s` norm with weight `|k|^s`; the zero mode contributes
/// nothing at any `s`, so `s = 0` gives the L^2 norm of the mean-zero part.
pub fn homogeneous_norm(f: &SpectralField, s: f64) -> f64 {
    let k2 = f.grid().k_squared();
    f.coeffs()
        .iter()
        .zip(k2.iter())
        .map(|(c, &kk)| if kk == 0.0 { 0.0 } else { kk.powf(s) * c.norm_sqr() })
        .sum::<f64>()
        .sqrt()
}

/// `H^1` distance between two fields on the same grid.
pub fn h1_distance(a: &SpectralField, b: &SpectralField) -> Result<f64> {
    Ok(sobolev_norm(&a.sub(b)?, 1.0))
}

/// Grid L^6 norm with volume weights.
pub fn grid_l6(f: &SpectralField) -> f64 {
    let dv = f.grid().cell_volume();
    (f.to_physical()
        .iter()
        .map(|v| v.norm_sqr().powi(3))
        .sum::<f64>()
        * dv)
        .powf(1.0 / 6.0)
}

/// `sup_t ||phi_A(t) - phi_B(t)||_{H^1}` over the shared snapshot times.
pub fn trajectory_sup_h1_diff(a: &EvolutionRun, b: &EvolutionRun) -> Result<f64> {
    if a.snapshots.len() != b.snapshots.len() {
        return Err(Error::TimeGridMismatch(format!(
            "{} vs {} snapshots",
            a.snapshots.len(),
            b.snapshots.len()
        )));
    }
    let mut sup = 0.0f64;
    for ((ta, fa), (tb, fb)) in a.snapshots.iter().zip(&b.snapshots) {
        if (ta - tb).abs() > 1e-12 * (1.0 + ta.abs()) {
            return Err(Error::TimeGridMismatch(format!(
                "snapshot times {ta} and {tb} differ"
            )));
        }
        if fa.grid() != fb.grid() {
            return Err(Error::GridMismatch("snapshot grids differ".into()));
        }
        sup = sup.max(h1_distance(fa, fb)?);
    }
    Ok(sup)
}

/// Discrete `||<grad> phi||_{L^2_t L^6_x}`: trapezoid in time of the squared
/// grid L^6 norm of `<grad> phi`. Reported as a diagnostic only.
pub fn strichartz_diagnostic(run: &EvolutionRun) -> f64 {
    let values: Vec<f64> = run
        .snapshots
        .iter()
        .map(|(_, f)| {
            let weighted = f
                .apply_multiplier(|k| {
                    Complex64::new((1.0 + k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt(), 0.0)
                })
                .expect("finite multiplier");
            grid_l6(&weighted)
        })
        .collect();
    if values.is_empty() {
        return 0.0;
    }
    if values.len() == 1 {
        return (run.dt * values[0] * values[0]).sqrt();
    }
    let mut acc = 0.0;
    for i in 0..values.len() - 1 {
        let dt = run.snapshots[i + 1].0 - run.snapshots[i].0;
        acc += 0.5 * dt * (values[i] * values[i] + values[i + 1] * values[i + 1]);
    }
    acc.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_and_unit_modes() {
        let grid = GridSpec::line(16, 1.0, false).unwrap();
        let z = SpectralField::zeros(&grid);
        assert_eq!(sobolev_norm(&z, 1.0), 0.0);
        assert_eq!(homogeneous_norm(&z, 0.5), 0.0);

        let mut unit = SpectralField::zeros(&grid);
        unit.coeffs_mut()[0] = Complex64::new(1.0, 0.0);
        for s in [-1.0, 0.0, 0.3, 2.0] {
            assert_abs_diff_eq!(sobolev_norm(&unit, s), 1.0, epsilon = 1e-15);
        }
        assert_eq!(homogeneous_norm(&unit, 0.0), 0.0);
    }

    #[test]
    fn single_mode_values() {
        let grid = GridSpec::line(32, 2.0, false).unwrap();
        let mut f = SpectralField::zeros(&grid);
        f.coeffs_mut()[4] = Complex64::new(0.0, 0.7);
        let k = grid.wavenumber(0, 4);
        let s = 1.3;
        assert_abs_diff_eq!(
            sobolev_norm(&f, s),
            (1.0 + k * k).powf(s / 2.0) * 0.7,
            epsilon = 1e-13
        );
        assert_abs_diff_eq!(
            homogeneous_norm(&f, s),
            k.abs().powf(s) * 0.7,
            epsilon = 1e-13
        );
    }

    #[test]
    fn h0_equals_l2_and_monotone_in_s() {
        let grid = GridSpec::line(64, 3.0, false).unwrap();
        let coeffs: Vec<Complex64> = (0..64)
            .map(|i| Complex64::new((i as f64 * 0.11).sin(), (i as f64 * 0.07).cos()))
            .collect();
        let f = SpectralField::from_coeffs(&grid, coeffs).unwrap();
        assert_abs_diff_eq!(
            sobolev_norm(&f, 0.0),
            f.l2_norm(),
            epsilon = 1e-12 * f.l2_norm()
        );
        let mut last = 0.0;
        for s in [-0.5, 0.0, 0.5, 1.0, 1.5] {
            let v = sobolev_norm(&f, s);
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn triangle_inequality_spot_check() {
        let grid = GridSpec::line(32, 1.0, false).unwrap();
        let mk = |seed: u64| {
            let coeffs: Vec<Complex64> = (0..32)
                .map(|i| {
                    let x = ((i as u64 + 1) * (seed + 3)) as f64;
                    Complex64::new((x * 0.013).sin(), (x * 0.029).cos())
                })
                .collect();
            SpectralField::from_coeffs(&grid, coeffs).unwrap()
        };
        for seed in 0..10 {
            let (a, b) = (mk(seed), mk(seed + 100));
            let sum = a.add(&b).unwrap();
            for s in [0.0, 1.0] {
                assert!(sobolev_norm(&sum, s) <= sobolev_norm(&a, s) + sobolev_norm(&b, s) + 1e-12);
            }
        }
    }

    #[test]
    fn l6_of_plane_wave() {
        // |a e^{ikx}|_{L^6} = |a| V^{1/6}
        let grid = GridSpec::line(32, 2.0, false).unwrap();
        let mut f = SpectralField::zeros(&grid);
        f.coeffs_mut()[3] = Complex64::new(0.5 * grid.volume().sqrt(), 0.0);
        assert_abs_diff_eq!(
            grid_l6(&f),
            0.5 * grid.volume().powf(1.0 / 6.0),
            epsilon = 1e-12
        );
    }
}
