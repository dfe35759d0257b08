//! Wootters concurrence and entanglement of formation for two qubits.
//!
//! The concurrence of a two-site state ρ comes from the spectrum of ρρ̃,
//! where ρ̃ = (σʸ⊗σʸ) ρ* (σʸ⊗σʸ) is the time-reversed matrix (conjugation in
//! the standard basis). With √λ₁ ≥ √λ₂ ≥ √λ₃ ≥ √λ₄ the square roots of its
//! eigenvalues,
//!
//!   C = max{0, √λ₁ − √λ₂ − √λ₃ − √λ₄},
//!   E_f = −x log₂x − (1−x) log₂(1−x),  x = ½ + √(1−C²)/2.
//!
//! The production route avoids a general non-symmetric eigensolver: ρρ̃ is
//! isospectral to the Hermitian √ρ ρ̃ √ρ, whose spectrum is real and
//! non-negative up to round-off. The non-symmetric route (complex Schur on
//! the literal product) is kept as an independent cross-check.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

use crate::reduced::{clip_nonnegative, TwoSiteDensityMatrix};
use crate::{Error, Result};

/// Spectrum data of ρρ̃ together with the derived entanglement measures.
#[derive(Debug, Clone, Copy)]
pub struct ConcurrenceReport {
    /// √λ₁ ≥ √λ₂ ≥ √λ₃ ≥ √λ₄.
    pub roots: [f64; 4],
    pub concurrence: f64,
    pub eof: f64,
    /// x = ½ + √(1−C²)/2, the entropy argument.
    pub ef_argument: f64,
}

/// σʸ⊗σʸ is the antidiagonal (−1, 1, 1, −1) in the standard basis.
const Y_SIGNS: [f64; 4] = [-1.0, 1.0, 1.0, -1.0];

fn spin_flip_matrix(m: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    Matrix4::from_fn(|k, l| m[(3 - k, 3 - l)].conj() * (Y_SIGNS[k] * Y_SIGNS[l]))
}

/// Time-reversed density matrix ρ̃ = (σʸ⊗σʸ) ρ* (σʸ⊗σʸ). An involution that
/// preserves trace and positivity.
pub fn spin_flip(rho: &TwoSiteDensityMatrix) -> TwoSiteDensityMatrix {
    let (i, j) = rho.sites();
    TwoSiteDensityMatrix::new_unchecked(spin_flip_matrix(rho.matrix()), i, j)
}

/// Flip a pure two-qubit state: |ψ̃⟩ = (σʸ⊗σʸ)|ψ*⟩.
pub(crate) fn flip_state(v: &Vector4<Complex64>) -> Vector4<Complex64> {
    Vector4::from_fn(|k, _| v[3 - k].conj() * Y_SIGNS[k])
}

/// Hermitian square root of a PSD matrix via its eigendecomposition.
fn psd_sqrt(m: &Matrix4<Complex64>) -> Result<Matrix4<Complex64>> {
    let eig = nalgebra::SymmetricEigen::new(*m);
    let mut d = Matrix4::<Complex64>::zeros();
    for k in 0..4 {
        let v = clip_nonnegative(eig.eigenvalues[k], "matrix under square root")?;
        d[(k, k)] = Complex64::new(v.sqrt(), 0.0);
    }
    Ok(eig.eigenvectors * d * eig.eigenvectors.adjoint())
}

/// Eigenvalues of ρρ̃ below this are eigensolver noise from rank-deficient
/// inputs; the square root would amplify them to ~1e−7, so they are zeroed.
/// Backward error of the 4×4 eigensolves is a few ε·‖ρρ̃‖ ≤ 1e−15. The
/// closed-form root routes apply the same floor so both paths treat the
/// noise scale identically.
pub(crate) const SPECTRUM_NOISE_FLOOR: f64 = 1e-14;

fn report_from_spectrum(mut lambdas: [f64; 4]) -> ConcurrenceReport {
    for l in lambdas.iter_mut() {
        if *l < SPECTRUM_NOISE_FLOOR {
            *l = 0.0;
        }
    }
    lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let roots = [
        lambdas[0].sqrt(),
        lambdas[1].sqrt(),
        lambdas[2].sqrt(),
        lambdas[3].sqrt(),
    ];
    let concurrence = (roots[0] - roots[1] - roots[2] - roots[3]).clamp(0.0, 1.0);
    let ef_argument = 0.5 + (1.0 - concurrence * concurrence).max(0.0).sqrt() / 2.0;
    ConcurrenceReport {
        roots,
        concurrence,
        eof: entanglement_of_formation(concurrence),
        ef_argument,
    }
}

/// Eigenvalues of ρρ̃ deeper than −1e−9 indicate an unphysical input.
const PRODUCT_SPECTRUM_FAIL: f64 = 1e-9;

fn clip_product_eigenvalue(v: f64) -> Result<f64> {
    if v < -PRODUCT_SPECTRUM_FAIL {
        Err(Error::Numerical(format!(
            "ρρ̃ spectrum has eigenvalue {v:.3e} below −{PRODUCT_SPECTRUM_FAIL:.0e}"
        )))
    } else {
        Ok(v.max(0.0))
    }
}

/// Concurrence and entanglement of formation via the Hermitian-form route.
pub fn concurrence(rho: &TwoSiteDensityMatrix) -> Result<ConcurrenceReport> {
    let tilde = spin_flip_matrix(rho.matrix());
    let root = psd_sqrt(rho.matrix())?;
    let m = root * tilde * root;
    let m = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = nalgebra::SymmetricEigen::new(m);
    let mut lambdas = [0.0; 4];
    for (slot, &v) in lambdas.iter_mut().zip(eig.eigenvalues.iter()) {
        *slot = clip_product_eigenvalue(v)?;
    }
    Ok(report_from_spectrum(lambdas))
}

/// Independent cross-check: eigenvalues of the literal non-Hermitian product
/// ρρ̃ from a complex Schur decomposition. Separate code path from
/// [`concurrence`]; used by the verification suites.
pub fn concurrence_product_route(rho: &TwoSiteDensityMatrix) -> Result<ConcurrenceReport> {
    let product = rho.matrix() * spin_flip_matrix(rho.matrix());
    let schur = nalgebra::Schur::try_new(product, 1e-14, 0)
        .ok_or_else(|| Error::Numerical("complex Schur iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    let mut lambdas = [0.0; 4];
    for (k, slot) in lambdas.iter_mut().enumerate() {
        let z = t[(k, k)];
        if z.im.abs() > PRODUCT_SPECTRUM_FAIL {
            return Err(Error::Numerical(format!(
                "ρρ̃ spectrum has complex eigenvalue {z}"
            )));
        }
        *slot = clip_product_eigenvalue(z.re)?;
    }
    Ok(report_from_spectrum(lambdas))
}

/// Concurrence |⟨ψ|ψ̃⟩| of a pure two-qubit state.
pub fn pure_concurrence(state: &Vector4<Complex64>) -> f64 {
    state.dotc(&flip_state(state)).norm()
}

/// Concurrence of the equal mixture of two pure states with equal pure-state
/// concurrences c: returns min{c, |d|} with d = ⟨α₊|α̃₋⟩.
///
/// States must be normalized and satisfy the equal-concurrence hypothesis
/// within 1e−10, otherwise the closed form does not apply and the call is
/// rejected.
pub fn mixture_concurrence(
    alpha_plus: &Vector4<Complex64>,
    alpha_minus: &Vector4<Complex64>,
) -> Result<f64> {
    for (name, v) in [("α₊", alpha_plus), ("α₋", alpha_minus)] {
        let norm = v.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Config(format!("{name} is not normalized: ‖·‖ = {norm}")));
        }
    }
    let c_plus = pure_concurrence(alpha_plus);
    let c_minus = pure_concurrence(alpha_minus);
    if (c_plus - c_minus).abs() > 1e-10 {
        return Err(Error::Numerical(format!(
            "mixture formula needs equal pure-state concurrences, got {c_plus:.12} vs {c_minus:.12}"
        )));
    }
    let d = alpha_plus.dotc(&flip_state(alpha_minus)).norm();
    Ok(c_plus.min(d))
}

/// Outcome of the convexity diagnostic C((ρ₊+ρ₋)/2) ≤ ½(C(ρ₊)+C(ρ₋)).
#[derive(Debug, Clone, Copy)]
pub struct ConvexityDiagnostic {
    pub mixture_value: f64,
    pub average_value: f64,
    pub satisfied: bool,
}

/// Convexity slack: a violation beyond this indicates an implementation bug.
pub const CONVEXITY_SLACK: f64 = 1e-10;

pub fn convexity_check(
    rho_plus: &TwoSiteDensityMatrix,
    rho_minus: &TwoSiteDensityMatrix,
) -> Result<ConvexityDiagnostic> {
    let mixed = TwoSiteDensityMatrix::new_unchecked(
        (rho_plus.matrix() + rho_minus.matrix()) * Complex64::new(0.5, 0.0),
        rho_plus.sites().0,
        rho_plus.sites().1,
    );
    let mixture_value = concurrence(&mixed)?.concurrence;
    let average_value =
        0.5 * (concurrence(rho_plus)?.concurrence + concurrence(rho_minus)?.concurrence);
    Ok(ConvexityDiagnostic {
        mixture_value,
        average_value,
        satisfied: mixture_value <= average_value + CONVEXITY_SLACK,
    })
}

/// E_f(C): the closed form in the concurrence, with the C → 0, 1 endpoint
/// limits taken exactly to avoid 0·log 0.
pub fn entanglement_of_formation(c: f64) -> f64 {
    let c = c.clamp(0.0, 1.0);
    if c == 0.0 {
        return 0.0;
    }
    if c == 1.0 {
        return 1.0;
    }
    let x = 0.5 + (1.0 - c * c).sqrt() / 2.0;
    let h = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    h(x) + h(1.0 - x)
}
