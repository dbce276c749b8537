//! Log-log slope fitting for convergence-rate sweeps.

use crate::error::{Error, Result};

/// Threshold below which a sweep is considered numerically degenerate: the
/// measured differences carry no rate information.
pub const DEGENERATE_FLOOR: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FitModel {
    /// `err ~ C * N^slope`
    PurePower,
    /// `err ~ C * N^slope * (ln N)^c`; the reported slope is the power.
    PowerWithLogLog,
}

/// A fitted set of `(N, error)` samples.
#[derive(Clone, Debug)]
pub struct RateFit {
    /// Samples actually used by the fit, sorted by N.
    pub samples: Vec<(u64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of `ln ln N` when the model includes it.
    pub loglog_coeff: Option<f64>,
    /// Per-sample residuals of `ln(err)` against the fitted model.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub model: FitModel,
    /// Smallest-N sample dropped by the fit-window rule, if any.
    pub discarded: Option<u64>,
}

/// True when every N is a power of two and the list is strictly increasing.
pub fn is_dyadic(n_list: &[u64]) -> bool {
    n_list.windows(2).all(|w| w[0] < w[1]) && n_list.iter().all(|&n| n.is_power_of_two())
}

/// Least-squares fit of `ln(err)` against the chosen model.
pub fn fit_rate(samples: &[(u64, f64)], model: FitModel) -> Result<RateFit> {
    if samples.len() < 4 {
        return Err(Error::TooFewSamples {
            needed: 4,
            got: samples.len(),
        });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by_key(|&(n, _)| n);
    if sorted.iter().all(|&(_, e)| e.abs() <= DEGENERATE_FLOOR) {
        return Err(Error::DegenerateSamples(format!(
            "all {} errors are at or below {DEGENERATE_FLOOR:e}",
            sorted.len()
        )));
    }
    if let Some(&(n, e)) = sorted.iter().find(|&&(_, e)| !(e > 0.0) || !e.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "error value {e} at N = {n} is not positive and finite"
        )));
    }

    let ln_n: Vec<f64> = sorted.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let ln_e: Vec<f64> = sorted.iter().map(|&(_, e)| e.ln()).collect();

    let (intercept, slope, loglog_coeff, predicted) = match model {
        FitModel::PurePower => {
            let (a, b) = lsq2(&ln_n, &ln_e);
            let pred: Vec<f64> = ln_n.iter().map(|&x| a + b * x).collect();
            (a, b, None, pred)
        }
        FitModel::PowerWithLogLog => {
            let ln_ln_n: Vec<f64> = ln_n.iter().map(|&x| x.ln()).collect();
            let (a, b, c) = lsq3(&ln_n, &ln_ln_n, &ln_e);
            let pred: Vec<f64> = ln_n
                .iter()
                .zip(&ln_ln_n)
                .map(|(&x, &y)| a + b * x + c * y)
                .collect();
            (a, b, Some(c), pred)
        }
    };

    let residuals: Vec<f64> = ln_e
        .iter()
        .zip(&predicted)
        .map(|(&v, &p)| v - p)
        .collect();
    let max_residual = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    if !slope.is_finite() {
        return Err(Error::DegenerateSamples("fitted slope is not finite".into()));
    }
    Ok(RateFit {
        samples: sorted,
        slope,
        intercept,
        loglog_coeff,
        residuals,
        max_residual,
        model,
        discarded: None,
    })
}

/// Fit with the preasymptotic window rule: when the smallest-N residual
/// exceeds three times the median residual magnitude, that one sample is
/// discarded and the fit redone. At most one sample is ever dropped.
pub fn fit_rate_windowed(samples: &[(u64, f64)], model: FitModel) -> Result<RateFit> {
    let full = fit_rate(samples, model)?;
    if full.samples.len() < 5 {
        return Ok(full);
    }
    let mut mags: Vec<f64> = full.residuals.iter().map(|r| r.abs()).collect();
    mags.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = mags[mags.len() / 2];
    let smallest = full.residuals[0].abs();
    if median > 0.0 && smallest > 3.0 * median {
        let dropped = full.samples[0].0;
        let mut refit = fit_rate(&full.samples[1..], model)?;
        refit.discarded = Some(dropped);
        return Ok(refit);
    }
    Ok(full)
}

fn lsq2(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let det = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / det;
    let intercept = (sy - slope * sx) / n;
    (intercept, slope)
}

/// Normal equations for `y = a + b x + c z`.
fn lsq3(x: &[f64], z: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sz: f64 = z.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let szz: f64 = z.iter().map(|v| v * v).sum();
    let sxz: f64 = x.iter().zip(z).map(|(a, b)| a * b).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let szy: f64 = z.iter().zip(y).map(|(a, b)| a * b).sum();
    let mut m = [
        [n, sx, sz, sy],
        [sx, sxx, sxz, sxy],
        [sz, sxz, szz, szy],
    ];
    // gaussian elimination with partial pivoting on the 3x3 system
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        m.swap(col, pivot);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..4 {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    let c = m[2][3] / m[2][2];
    let b = (m[1][3] - m[1][2] * c) / m[1][1];
    let a = (m[0][3] - m[0][1] * b - m[0][2] * c) / m[0][0];
    (a, b, c)
}
