//! Closed-form propagators for the two-level pulse Hamiltonian, used in the
//! optimizer's inner loop.

use nalgebra::Matrix2;

use crate::quantum::C64;

pub type M2 = Matrix2<C64>;

/// `exp(−iHt)` for `H = [[δ, (Ω/2)e^{−iφ}], [(Ω/2)e^{iφ}, 0]]`.
///
/// Writing `H = (δ/2)I + K` with `K² = w²I`, `w = √(δ²/4 + Ω²/4)`:
/// `exp(−iHt) = e^{−iδt/2}(cos(wt) I − i sin(wt)/w K)`.
pub fn pulse_propagator(delta: f64, rabi: f64, phi: f64, t: f64) -> M2 {
    let half_d = 0.5 * delta;
    let c = C64::from_polar(0.5 * rabi, -phi);
    let w = (half_d * half_d + c.norm_sqr()).sqrt();
    let (cos, sinc) = if w * t == 0.0 {
        (1.0, t)
    } else {
        ((w * t).cos(), (w * t).sin() / w)
    };
    let i = C64::i();
    let global = C64::from_polar(1.0, -half_d * t);
    let a = C64::new(cos, 0.0) - i * sinc * half_d;
    let d = C64::new(cos, 0.0) + i * sinc * half_d;
    let b = -i * sinc * c;
    let cc = -i * sinc * c.conj();
    M2::new(a, b, cc, d) * global
}
