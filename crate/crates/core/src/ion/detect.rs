use super::{LevelScheme, NoiseModel};
use crate::quantum::{CMatrix, QuantumState, C64};

/// Outcome of a bright/dark detection.
#[derive(Clone, Debug)]
pub struct Detection {
    pub p_bright: f64,
    /// State conditioned on a bright result (unconditional state when `p_bright = 0`).
    pub bright: QuantumState,
    /// State conditioned on a dark result (unconditional state when `p_bright = 1`).
    pub dark: QuantumState,
    /// Outcome-averaged post-measurement state.
    pub unconditional: QuantumState,
}

/// Bright-manifold population of a state.
pub fn bright_population(scheme: &LevelScheme, state: &QuantumState) -> f64 {
    scheme.bright_levels().iter().map(|&i| state.population(i)).sum()
}

/// `p_bright` for the detection POVM.
pub fn bright_probability(scheme: &LevelScheme, state: &QuantumState, noise: &NoiseModel) -> f64 {
    let pb = bright_population(scheme, state).clamp(0.0, 1.0);
    (pb * (1.0 - noise.spam_bright_error) + (1.0 - pb) * noise.spam_dark_error).clamp(0.0, 1.0)
}

/// Fluorescence detection as a two-outcome POVM.
///
/// Scattering destroys every coherence involving the S(F=1) levels; the
/// remaining (dark) block is untouched. Misclassification mixes the two
/// blocks into both conditional states.
pub fn detect(scheme: &LevelScheme, state: &QuantumState, noise: &NoiseModel) -> Detection {
    let dim = state.dim();
    let rho = state.density();
    let bright = scheme.bright_levels();
    let mut is_bright = vec![false; dim];
    for &i in &bright {
        is_bright[i] = true;
    }
    let mut b_block = CMatrix::zeros(dim, dim);
    let mut d_block = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            match (is_bright[i], is_bright[j]) {
                (true, true) if i == j => b_block[(i, i)] = rho[(i, i)],
                (false, false) => d_block[(i, j)] = rho[(i, j)],
                _ => {}
            }
        }
    }
    let unconditional = &b_block + &d_block;
    let p_bright = bright_probability(scheme, state, noise);
    let eb = noise.spam_bright_error;
    let ed = noise.spam_dark_error;
    let labels = state.labels().to_vec();
    let conditional = |wb: f64, wd: f64, p: f64| {
        if p > 0.0 {
            let m = (&b_block * C64::new(wb, 0.0) + &d_block * C64::new(wd, 0.0)) / C64::new(p, 0.0);
            QuantumState::from_density_unchecked(m, labels.clone())
        } else {
            QuantumState::from_density_unchecked(unconditional.clone(), labels.clone())
        }
    };
    Detection {
        p_bright,
        bright: conditional(1.0 - eb, ed, p_bright),
        dark: conditional(eb, 1.0 - ed, 1.0 - p_bright),
        unconditional: QuantumState::from_density_unchecked(unconditional.clone(), labels.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn level(s: &LevelScheme, id: &str) -> QuantumState {
        QuantumState::basis(s.dim(), s.index(id).unwrap())
    }

    #[test]
    fn spam_defaults() {
        let s = LevelScheme::yb171();
        let n = NoiseModel::default();
        assert!((detect(&s, &level(&s, "1"), &n).p_bright - 0.995).abs() < 1e-15);
        assert!((detect(&s, &level(&s, "0"), &n).p_bright - 0.002).abs() < 1e-15);
        assert!((detect(&s, &level(&s, "D"), &n).p_bright - 0.002).abs() < 1e-15);
    }

    #[test]
    fn conditional_states_are_normalized() {
        let s = LevelScheme::yb171();
        let n = NoiseModel::default();
        let mut amps = crate::quantum::CVector::zeros(s.dim());
        amps[0] = C64::new(0.6, 0.0);
        amps[1] = C64::new(0.0, 0.8);
        let st = QuantumState::pure(amps, None).unwrap();
        let d = detect(&s, &st, &n);
        assert!((d.bright.trace() - 1.0).abs() < 1e-12);
        assert!((d.dark.trace() - 1.0).abs() < 1e-12);
        assert!(d.unconditional.coherence(0, 1).norm() < 1e-15);
        d.bright.validate().unwrap();
        d.dark.validate().unwrap();
    }
}
