use serde::{Deserialize, Serialize};

use super::sequence::{sequence_su2, CompositePulse};
use super::su2::M2;
use crate::dressing::target_for_fraction;
use crate::error::{Error, Result};
use crate::quantum::metrics::pauli_coefficients_su2;
use crate::quantum::{rotation_vector, Operator};

fn to_m2(op: &Operator) -> Result<M2> {
    if op.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: op.dim() });
    }
    op.ensure_unitary()?;
    let m = op.matrix();
    Ok(M2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]))
}

/// Residual error of `achieved` relative to `target` in the transverse
/// Pauli components.
///
/// With `D = target†·achieved` normalized to SU(2) and written as
/// `c₀I − i(c_x X + c_y Y + c_z Z)`, the error is `c_x² + c_y²`, the
/// probability weight of the X/Y part. Phase errors (`c_z`) are left to a
/// spin echo and do not count.
pub fn xy_error(achieved: &Operator, target: &Operator) -> Result<f64> {
    let a = to_m2(achieved)?;
    let t = to_m2(target)?;
    Ok(xy_error_su2(&a, &t))
}

pub(crate) fn xy_error_su2(achieved: &M2, target: &M2) -> f64 {
    let d = target.adjoint() * achieved;
    let [_, cx, cy, _] = pauli_coefficients_su2(&d);
    cx * cx + cy * cy
}

/// Transverse rotation angle `√(a_x² + a_y²)` of the axis-angle vector of
/// `target†·achieved`.
pub fn xy_angle(achieved: &Operator, target: &Operator) -> Result<f64> {
    let a = to_m2(achieved)?;
    let t = to_m2(target)?;
    let d = t.adjoint() * a;
    let op = Operator::new(crate::quantum::CMatrix::from_row_slice(2, 2, &[d[(0, 0)], d[(0, 1)], d[(1, 0)], d[(1, 1)]]))?;
    let v = rotation_vector(&op)?;
    Ok(v[0].hypot(v[1]))
}

/// A closed interval of Rabi fractions sampled on a uniform grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
    pub samples: usize,
}

impl Band {
    pub fn new(lo: f64, hi: f64, samples: usize) -> Self {
        Self { lo, hi, samples }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::InvalidArgument("band must have at least one sample".into()));
        }
        if !(self.lo >= 0.0) || !(self.hi >= self.lo) || !self.hi.is_finite() {
            return Err(Error::InvalidArgument(format!("invalid band [{}, {}]", self.lo, self.hi)));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        if self.samples == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.samples - 1) as f64;
        (0..self.samples)
            .map(|k| if k + 1 == self.samples { self.hi } else { self.lo + step * k as f64 })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    #[default]
    Max,
    Mean,
}

impl Aggregation {
    pub fn apply(self, values: &[f64]) -> f64 {
        match self {
            Aggregation::Max => values.iter().copied().fold(0.0, f64::max),
            Aggregation::Mean => values.iter().sum::<f64>() / values.len().max(1) as f64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobustnessSpec {
    pub crosstalk_band: Band,
    pub fluctuation_band: Band,
    #[serde(default)]
    pub aggregation: Aggregation,
    /// Weights `(w₀, w₁)` of the combined objective `w₀e₀ + w₁e₁`.
    #[serde(default = "unit_weights")]
    pub weights: [f64; 2],
}

fn unit_weights() -> [f64; 2] {
    [1.0, 1.0]
}

impl Default for RobustnessSpec {
    fn default() -> Self {
        Self {
            crosstalk_band: Band::new(0.0, 0.05, 21),
            fluctuation_band: Band::new(0.90, 1.05, 21),
            aggregation: Aggregation::Max,
            weights: unit_weights(),
        }
    }
}

impl RobustnessSpec {
    pub fn validate(&self) -> Result<()> {
        self.crosstalk_band.validate()?;
        self.fluctuation_band.validate()?;
        if self.weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidArgument("weights must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandKind {
    Crosstalk,
    Fluctuation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleError {
    pub band: BandKind,
    pub fraction: f64,
    pub xy_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub e0: f64,
    pub e1: f64,
    pub combined: f64,
    pub per_sample: Vec<SampleError>,
}

/// Precomputed targets for repeated evaluation against one spec.
#[derive(Clone, Debug)]
pub struct Evaluator {
    spec: RobustnessSpec,
    crosstalk: Vec<(f64, M2)>,
    fluctuation: Vec<(f64, M2)>,
}

fn target_m2(ratio: f64, fraction: f64) -> Result<M2> {
    to_m2(&target_for_fraction(ratio, fraction)?)
}

impl Evaluator {
    pub fn new(detuning_ratio: f64, spec: &RobustnessSpec) -> Result<Self> {
        spec.validate()?;
        let build = |band: &Band| -> Result<Vec<(f64, M2)>> {
            band.grid().into_iter().map(|f| Ok((f, target_m2(detuning_ratio, f)?))).collect()
        };
        Ok(Self {
            spec: spec.clone(),
            crosstalk: build(&spec.crosstalk_band)?,
            fluctuation: build(&spec.fluctuation_band)?,
        })
    }

    pub fn spec(&self) -> &RobustnessSpec {
        &self.spec
    }

    fn band_errors(seq: &CompositePulse, samples: &[(f64, M2)]) -> Vec<f64> {
        samples.iter().map(|(f, t)| xy_error_su2(&sequence_su2(seq, *f), t)).collect()
    }

    /// `(e₀, e₁)` under an explicit aggregation.
    pub fn band_values(&self, seq: &CompositePulse, aggregation: Aggregation) -> (f64, f64) {
        let e0 = aggregation.apply(&Self::band_errors(seq, &self.crosstalk));
        let e1 = aggregation.apply(&Self::band_errors(seq, &self.fluctuation));
        (e0, e1)
    }

    pub fn combined(&self, seq: &CompositePulse, aggregation: Aggregation) -> f64 {
        let (e0, e1) = self.band_values(seq, aggregation);
        self.spec.weights[0] * e0 + self.spec.weights[1] * e1
    }

    pub fn report(&self, seq: &CompositePulse) -> ErrorReport {
        let c = Self::band_errors(seq, &self.crosstalk);
        let f = Self::band_errors(seq, &self.fluctuation);
        let e0 = self.spec.aggregation.apply(&c);
        let e1 = self.spec.aggregation.apply(&f);
        let mut per_sample = Vec::with_capacity(c.len() + f.len());
        per_sample.extend(self.crosstalk.iter().zip(&c).map(|((fr, _), e)| SampleError {
            band: BandKind::Crosstalk,
            fraction: *fr,
            xy_error: *e,
        }));
        per_sample.extend(self.fluctuation.iter().zip(&f).map(|((fr, _), e)| SampleError {
            band: BandKind::Fluctuation,
            fraction: *fr,
            xy_error: *e,
        }));
        ErrorReport {
            e0,
            e1,
            combined: self.spec.weights[0] * e0 + self.spec.weights[1] * e1,
            per_sample,
        }
    }
}

/// XY error per band against the dressed basis at each sampled Rabi fraction.
///
/// Results are scale-free; `nominal_rabi` only has to be positive.
pub fn evaluate(seq: &CompositePulse, spec: &RobustnessSpec, nominal_rabi: f64) -> Result<ErrorReport> {
    if !(nominal_rabi > 0.0) {
        return Err(Error::InvalidArgument(format!("nominal_rabi must be positive, got {nominal_rabi}")));
    }
    seq.validate()?;
    Ok(Evaluator::new(seq.nominal_detuning_ratio, spec)?.report(seq))
}

/// XY error of `seq` at a single Rabi fraction.
pub fn xy_error_at(seq: &CompositePulse, fraction: f64) -> Result<f64> {
    Ok(xy_error_su2(&sequence_su2(seq, fraction), &target_m2(seq.nominal_detuning_ratio, fraction)?))
}
