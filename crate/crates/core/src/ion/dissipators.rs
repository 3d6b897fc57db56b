use super::{LevelScheme, Manifold, NoiseModel};
use crate::error::Result;
use crate::quantum::CollapseOp;

/// Weighted collapse channels sharing the scheme's dimension.
pub type Dissipator = Vec<(CollapseOp, f64)>;

/// `(from, to, weight)` triples for relaxation out of D(F=2). Weights from
/// each source sum to one.
pub fn repump_branching(scheme: &LevelScheme) -> Result<Vec<(usize, usize, f64)>> {
    if let Some(branches) = &scheme.repump.branching {
        let mut out = Vec::with_capacity(branches.len());
        for b in branches {
            out.push((scheme.index(&b.from)?, scheme.index(&b.to)?, b.weight));
        }
        // normalize per source
        let mut totals = vec![0.0; scheme.dim()];
        for &(f, _, w) in &out {
            totals[f] += w;
        }
        return Ok(out
            .into_iter()
            .filter(|&(f, _, _)| totals[f] > 0.0)
            .map(|(f, t, w)| (f, t, w / totals[f]))
            .collect());
    }
    let bright = scheme.bright_levels();
    let mut out = Vec::new();
    for from in scheme.indices_where(|l| l.manifold == Manifold::DMetastable) {
        let m = scheme.levels[from].m_f;
        let targets: Vec<usize> = bright
            .iter()
            .copied()
            .filter(|&t| (scheme.levels[t].m_f - m).abs() <= 1)
            .collect();
        let w = 1.0 / targets.len().max(1) as f64;
        out.extend(targets.into_iter().map(|t| (from, t, w)));
    }
    Ok(out)
}

fn sink_channels(scheme: &LevelScheme, rate: f64) -> Dissipator {
    let bright = scheme.bright_levels();
    let dim = scheme.dim();
    let mut out = Vec::new();
    if bright.is_empty() {
        return out;
    }
    for from in scheme.indices_where(|l| l.manifold == Manifold::DRepumpSink) {
        for &to in &bright {
            out.push((CollapseOp::transition(dim, to, from), rate / bright.len() as f64));
        }
    }
    out
}

/// 935 nm repump: D(F=2) sublevels to S(F=1) at the configured rate and
/// branching, plus the optional F=1 sink channel.
pub fn build_repump_dissipator(scheme: &LevelScheme) -> Result<Dissipator> {
    let rate = scheme.repump.rate_per_s;
    let dim = scheme.dim();
    let mut out = Vec::new();
    if rate > 0.0 {
        for (from, to, w) in repump_branching(scheme)? {
            if w > 0.0 {
                out.push((CollapseOp::transition(dim, to, from), rate * w));
            }
        }
    }
    if scheme.repump.sink_rate_per_s > 0.0 {
        out.extend(sink_channels(scheme, scheme.repump.sink_rate_per_s));
    }
    Ok(out)
}

/// S–D dephasing plus spontaneous D decay, tuned so that S–D coherence
/// decays at 1/T₂ and D population at 1/T_D.
pub fn build_noise_dissipator(scheme: &LevelScheme, noise: &NoiseModel) -> Result<Dissipator> {
    let dim = scheme.dim();
    let mut out = Vec::new();
    let dephasing = noise.dephasing_rate()?;
    let d_levels = scheme.d_levels();
    if dephasing > 0.0 && !d_levels.is_empty() {
        out.push((CollapseOp::projector(dim, &d_levels), dephasing));
    }
    let decay = noise.d_decay_rate();
    if decay > 0.0 {
        for (from, to, w) in repump_branching(scheme)? {
            if w > 0.0 {
                out.push((CollapseOp::transition(dim, to, from), decay * w));
            }
        }
        out.extend(sink_channels(scheme, decay));
    }
    Ok(out)
}

/// Off-resonant P₁/₂ → D₃/₂ leakage while detection light is on.
pub fn build_detection_leak(scheme: &LevelScheme, noise: &NoiseModel) -> Dissipator {
    let dim = scheme.dim();
    let mut sinks = scheme.indices_where(|l| l.manifold == Manifold::DRepumpSink);
    if sinks.is_empty() {
        sinks = scheme.indices_where(|l| l.manifold == Manifold::DMetastable);
    }
    let mut out = Vec::new();
    if noise.detection_leak_rate <= 0.0 || sinks.is_empty() {
        return out;
    }
    for from in scheme.bright_levels() {
        for &to in &sinks {
            out.push((CollapseOp::transition(dim, to, from), noise.detection_leak_rate / sinks.len() as f64));
        }
    }
    out
}
