//! Real roots of a monic cubic given its elementary symmetric functions.
//!
//! The symmetry module reduces the two-site eigenproblem to a cubic whose
//! coefficients are the elementary symmetric functions of the three roots:
//!
//!   x³ − e₁x² + e₂x − e₃ = 0,   e₁ = Σxᵢ, e₂ = Σxᵢxⱼ, e₃ = x₁x₂x₃.
//!
//! Physical inputs always have three real, non-negative roots, frequently
//! with a near-double pair close to zero (nearly pure states). The solver
//! locates the largest root by the trigonometric method plus Newton polish,
//! then deflates to a quadratic solved in closed form; that keeps tiny root
//! pairs accurate to absolute round-off instead of the √ε loss a bare
//! trigonometric evaluation would leave. A genuinely complex pair is
//! rejected instead of silently returning garbage.

use crate::{Error, Result};

/// Relative slack allowed on the discriminant before a complex pair is an error.
const COMPLEX_PAIR_TOL: f64 = 1e-8;

/// Solve x³ − e₁x² + e₂x − e₃ = 0 for three real roots, ascending.
pub fn roots_from_symmetric_functions(e1: f64, e2: f64, e3: f64) -> Result<[f64; 3]> {
    // Depressed cubic t³ + p t + q with x = t + e1/3.
    let shift = e1 / 3.0;
    let p = e2 - e1 * e1 / 3.0;
    let q = -2.0 * e1 * e1 * e1 / 27.0 + e1 * e2 / 3.0 - e3;

    let scale = (e1.abs() + e2.abs().sqrt() + e3.abs().cbrt()).max(1e-300);

    // Largest-magnitude root from the closed form.
    let seed = if p >= 0.0 {
        // Three real roots force p ≤ 0; a positive p beyond round-off means
        // a complex pair. p enters the discriminant cubed, hence the square
        // on the scale.
        if p > COMPLEX_PAIR_TOL * scale * scale {
            return Err(Error::Numerical(format!(
                "cubic has a complex conjugate pair (p = {p:.3e} > 0)"
            )));
        }
        (-q).cbrt() + shift
    } else {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = 3.0 * q / (p * m);
        if arg.abs() > 1.0 + COMPLEX_PAIR_TOL {
            return Err(Error::Numerical(format!(
                "cubic has a complex conjugate pair (acos argument {arg:.6})"
            )));
        }
        let phi = arg.clamp(-1.0, 1.0).acos() / 3.0;
        let mut best = 0.0f64;
        for k in 0..3 {
            let angle = phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0;
            let r = m * angle.cos() + shift;
            if r.abs() > best.abs() {
                best = r;
            }
        }
        best
    };
    let big = newton_polish(seed, e1, e2, e3);

    // Deflate: x³ − e1x² + e2x − e3 = (x − big)(x² − bx + c).
    let b = e1 - big;
    let c = if big.abs() > 1e-100 {
        e3 / big
    } else {
        e2 - big * b
    };
    let disc = b * b - 4.0 * c;
    if disc < -COMPLEX_PAIR_TOL * scale * scale {
        return Err(Error::Numerical(format!(
            "cubic has a complex conjugate pair (deflated discriminant {disc:.3e})"
        )));
    }
    let sq = disc.max(0.0).sqrt();
    // Stable quadratic: compute the root far from cancellation first.
    let (r1, r2) = if b >= 0.0 {
        let r = 0.5 * (b + sq);
        (r, if r != 0.0 { c / r } else { 0.0 })
    } else {
        let r = 0.5 * (b - sq);
        (r, if r != 0.0 { c / r } else { 0.0 })
    };

    let mut roots = [big, r1, r2];
    roots.sort_by(|a, b| a.partial_cmp(b).expect("cubic roots are finite"));
    Ok(roots)
}

fn newton_polish(x0: f64, e1: f64, e2: f64, e3: f64) -> f64 {
    let mut x = x0;
    for _ in 0..3 {
        let f = ((x - e1) * x + e2) * x - e3;
        let df = (3.0 * x - 2.0 * e1) * x + e2;
        // Skip the step near a multiple root where f' degenerates.
        if df.abs() < 1e-14 * (x * x).max(1.0) {
            break;
        }
        let step = f / df;
        if !step.is_finite() {
            break;
        }
        x -= step;
    }
    x
}
