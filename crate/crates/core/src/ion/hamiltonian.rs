//! Rotating-frame drive Hamiltonians.
//!
//! A tone addressed to transition `p` at detuning `δ` (laser minus line)
//! also drives every other allowed transition `q` of the same kind within
//! the scheme's cutoff, at detuning `δ_q = δ + 2π(ν_p − ν_q)`. Each coupled
//! pair fixes the frame relation `E_lower − E_upper = δ_q`; the frame is
//! solved by breadth-first search from anchor levels held at zero.

use std::collections::VecDeque;
use std::f64::consts::PI;

use super::{LevelScheme, Manifold, Pulse};
use crate::error::{Error, Result};
use crate::quantum::{CMatrix, Operator, C64};

#[derive(Clone, Debug)]
struct Coupling {
    tone: usize,
    lower: usize,
    upper: usize,
    /// Matrix element `H[lower, upper]` per unit of the tone's Rabi frequency.
    unit: C64,
}

/// Frame and coupling structure for a set of simultaneous tones.
///
/// The diagonal depends only on detunings, so a shaped pulse reuses one
/// frame and rescales the couplings slice by slice.
#[derive(Clone, Debug)]
pub struct DriveFrame {
    diag: Vec<f64>,
    couplings: Vec<Coupling>,
    n_tones: usize,
}

fn anchor_priority(scheme: &LevelScheme, idx: usize) -> (u8, usize) {
    let l = &scheme.levels[idx];
    let class = match (l.manifold, l.f) {
        (Manifold::SGround, 1) => 0,
        (Manifold::SGround, _) => 1,
        _ => 2,
    };
    (class, idx)
}

impl DriveFrame {
    pub fn new(scheme: &LevelScheme, tones: &[&Pulse]) -> Result<Self> {
        let dim = scheme.dim();
        let mut edges: Vec<(usize, usize, f64)> = Vec::new();
        let mut couplings = Vec::new();
        for (k, pulse) in tones.iter().enumerate() {
            let driven = scheme.transition(&pulse.drive)?;
            let nu_p = scheme.transition_frequency_hz(driven)?;
            for q in scheme.transitions.iter().filter(|q| q.allowed && q.kind == driven.kind) {
                let nu_q = scheme.transition_frequency_hz(q)?;
                if (nu_q - nu_p).abs() > scheme.drive_cutoff_hz {
                    continue;
                }
                let lower = scheme.index(&q.lower)?;
                let upper = scheme.index(&q.upper)?;
                let delta_q = pulse.detuning + 2.0 * PI * (nu_p - nu_q);
                edges.push((lower, upper, delta_q));
                couplings.push(Coupling {
                    tone: k,
                    lower,
                    upper,
                    unit: C64::from_polar(0.5 * q.strength, -pulse.phase),
                });
            }
        }

        let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dim];
        for &(l, u, d) in &edges {
            // E_l − E_u = d
            adjacency[l].push((u, -d));
            adjacency[u].push((l, d));
        }
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by_key(|&i| anchor_priority(scheme, i));

        let mut diag: Vec<Option<f64>> = vec![None; dim];
        for &root in &order {
            if diag[root].is_some() || adjacency[root].is_empty() {
                continue;
            }
            diag[root] = Some(0.0);
            let mut queue = VecDeque::from([root]);
            while let Some(i) = queue.pop_front() {
                let ei = diag[i].expect("visited");
                for &(j, offset) in &adjacency[i] {
                    let ej = ei + offset;
                    match diag[j] {
                        None => {
                            diag[j] = Some(ej);
                            queue.push_back(j);
                        }
                        Some(existing) => {
                            let scale = 1.0 + existing.abs().max(ej.abs());
                            if (existing - ej).abs() > 1e-9 * scale {
                                return Err(Error::FrameConflict(scheme.levels[j].id.clone()));
                            }
                        }
                    }
                }
            }
        }

        Ok(Self {
            diag: diag.into_iter().map(|d| d.unwrap_or(0.0)).collect(),
            couplings,
            n_tones: tones.len(),
        })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// Hamiltonian with instantaneous Rabi frequency `rabis[k]` for tone `k`.
    pub fn matrix(&self, rabis: &[f64]) -> CMatrix {
        assert_eq!(rabis.len(), self.n_tones, "one Rabi frequency per tone");
        let n = self.dim();
        let mut m = CMatrix::zeros(n, n);
        for (i, d) in self.diag.iter().enumerate() {
            m[(i, i)] = C64::new(*d, 0.0);
        }
        for c in &self.couplings {
            let v = c.unit * rabis[c.tone];
            m[(c.lower, c.upper)] += v;
            m[(c.upper, c.lower)] += v.conj();
        }
        m
    }

    pub fn hamiltonian(&self, rabis: &[f64]) -> Operator {
        Operator::new(self.matrix(rabis)).expect("square by construction")
    }
}

/// Rotating-frame Hamiltonian of one tone at `rabi_scale` times its peak Rabi
/// frequency: `δ` on the lower level relative to the upper,
/// `H[lower, upper] = (Ω·rabi_scale/2)·e^{−iφ}`, and Zeeman-split spectator
/// lines of the same kind driven at their own detunings.
pub fn build_drive_hamiltonian(scheme: &LevelScheme, pulse: &Pulse, rabi_scale: f64) -> Result<Operator> {
    let frame = DriveFrame::new(scheme, &[pulse])?;
    Ok(frame.hamiltonian(&[pulse.rabi * rabi_scale]))
}
