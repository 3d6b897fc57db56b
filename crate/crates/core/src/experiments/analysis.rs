use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// SPAM-corrected probabilities and the number of values clamped into `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpamCorrected {
    pub values: Vec<f64>,
    pub clamp_events: usize,
}

/// Forward confusion: `p_raw = ε_d + p(1 − ε_b − ε_d)`.
pub fn spam_apply(p: f64, dark_error: f64, bright_error: f64) -> f64 {
    dark_error + p * (1.0 - bright_error - dark_error)
}

/// Inverts the two-outcome confusion matrix for each raw bright probability.
pub fn spam_correct(raw: &[f64], dark_error: f64, bright_error: f64) -> Result<SpamCorrected> {
    let det = 1.0 - bright_error - dark_error;
    if det.abs() < 1e-12 || !det.is_finite() {
        return Err(Error::SingularConfusion { det });
    }
    let mut clamp_events = 0;
    let values = raw
        .iter()
        .map(|&r| {
            let p = (r - dark_error) / det;
            if !(0.0..=1.0).contains(&p) {
                clamp_events += 1;
            }
            p.clamp(0.0, 1.0)
        })
        .collect();
    Ok(SpamCorrected { values, clamp_events })
}

/// Least-squares fit of `y = c₀ + c₁cos x + c₂sin x`.
pub fn fit_sinusoid(x: &[f64], y: &[f64]) -> Result<[f64; 3]> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), found: y.len() });
    }
    if x.len() < 3 {
        return Err(Error::InvalidArgument("sinusoid fit needs at least three points".into()));
    }
    let mut ata = Matrix3::zeros();
    let mut aty = Vector3::zeros();
    for (&xi, &yi) in x.iter().zip(y) {
        let row = Vector3::new(1.0, xi.cos(), xi.sin());
        ata += row * row.transpose();
        aty += row * yi;
    }
    let c = ata
        .lu()
        .solve(&aty)
        .ok_or_else(|| Error::InvalidArgument("sinusoid fit is degenerate for these sample points".into()))?;
    Ok([c[0], c[1], c[2]])
}

/// Vertex of the parabola through the sample maximum and its neighbors.
/// Returns `(center, height)`; falls back to the raw maximum at an edge.
pub fn parabolic_peak(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.is_empty() {
        return Err(Error::InvalidArgument("peak fit needs matching, non-empty samples".into()));
    }
    let k = y
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("non-empty");
    if k == 0 || k + 1 == x.len() {
        return Ok((x[k], y[k]));
    }
    let (x0, x1, x2) = (x[k - 1], x[k], x[k + 1]);
    let (y0, y1, y2) = (y[k - 1], y[k], y[k + 1]);
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let a = (d12 - d01) / (x2 - x0);
    if !(a < 0.0) {
        return Ok((x1, y1));
    }
    let b = d01 - a * (x0 + x1);
    let c = y0 - a * x0 * x0 - b * x0;
    let center = -b / (2.0 * a);
    Ok((center, c - b * b / (4.0 * a)))
}
