//! Seeded random generators for states, density matrices, and pattern
//! instances, shared by the test suites and the `verify` command.
//!
//! Structured forms are sampled directly on their positive-semidefinite
//! manifolds (through the pattern's symmetry-adapted eigenblocks), so no
//! rejection loop is needed and every sample is a valid density matrix.

use nalgebra::{Matrix2, Matrix3, Matrix4, Vector4};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::reduced::TwoSiteDensityMatrix;
use crate::symmetry::{IsingForm, U1BrokenForm, Z2Form};

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Full-rank random density matrix ρ = GG†/Tr(GG†) from a complex Ginibre G.
pub fn random_density_matrix(rng: &mut ChaCha8Rng) -> TwoSiteDensityMatrix {
    let g = Matrix4::from_fn(|_, _| random_complex(rng));
    let mut m = g * g.adjoint();
    let trace = m.trace().re;
    m /= c64(trace, 0.0);
    TwoSiteDensityMatrix::new(m, 0, 1).expect("Ginibre construction is PSD with unit trace")
}

/// Normalized random two-qubit state.
pub fn random_pure_two_qubit(rng: &mut ChaCha8Rng) -> Vector4<Complex64> {
    let v = Vector4::from_fn(|_, _| random_complex(rng));
    let n = v.norm();
    v / c64(n, 0.0)
}

/// Haar-ish random SU(2) element from a normalized complex pair.
pub fn random_single_qubit_unitary(rng: &mut ChaCha8Rng) -> Matrix2<Complex64> {
    loop {
        let a = random_complex(rng);
        let b = random_complex(rng);
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if n < 1e-3 {
            continue;
        }
        let (a, b) = (a / n, b / n);
        return Matrix2::new(a, -b.conj(), b, a.conj());
    }
}

/// U ⊗ V with independent random single-qubit factors.
pub fn random_local_unitary(rng: &mut ChaCha8Rng) -> Matrix4<Complex64> {
    let u = random_single_qubit_unitary(rng);
    let v = random_single_qubit_unitary(rng);
    Matrix4::from_fn(|r, q| u[(r >> 1, q >> 1)] * v[(r & 1, q & 1)])
}

/// Two pure states with equal concurrence, mirroring a pair of broken-
/// symmetry partners: a random real state and its image under a shared real
/// local rotation (which preserves the pure-state concurrence), with the
/// representative sign of the partner chosen so the flip overlaps
/// ⟨α₊|α̃₊⟩ and ⟨α₊|α̃₋⟩ carry the same sign. That alignment is the regime
/// where the two-pure-state mixture formula applies; an arbitrary relative
/// phase between the overlaps would change the mixture's spectrum while
/// leaving both ingredients of the formula fixed.
pub fn random_equal_concurrence_pair(
    rng: &mut ChaCha8Rng,
) -> (Vector4<Complex64>, Vector4<Complex64>) {
    let v = Vector4::from_fn(|_, _| c64(rng.gen_range(-1.0_f64..1.0), 0.0));
    let plus = v / c64(v.norm(), 0.0);
    let rot = |theta: f64| {
        Matrix2::new(
            c64(theta.cos(), 0.0),
            c64(-theta.sin(), 0.0),
            c64(theta.sin(), 0.0),
            c64(theta.cos(), 0.0),
        )
    };
    let u = rot(rng.gen_range(0.0..std::f64::consts::TAU));
    let w = rot(rng.gen_range(0.0..std::f64::consts::TAU));
    let local = Matrix4::from_fn(|r, q| u[(r >> 1, q >> 1)] * w[(r & 1, q & 1)]);
    let mut minus = local * plus;
    let self_overlap = plus.dotc(&crate::entangle::flip_state(&plus)).re;
    let cross_overlap = plus.dotc(&crate::entangle::flip_state(&minus)).re;
    if self_overlap * cross_overlap < 0.0 {
        minus = -minus;
    }
    (plus, minus)
}

/// Z2 pattern sample: non-negative diagonal with a PSD middle block.
pub fn random_z2_form(rng: &mut ChaCha8Rng) -> Z2Form {
    let pop_uu: f64 = rng.gen_range(0.0..1.0);
    let pop_ud: f64 = rng.gen_range(0.0..1.0);
    let pop_du: f64 = rng.gen_range(0.0..1.0);
    let pop_dd: f64 = rng.gen_range(0.0..1.0);
    let bound = (pop_ud * pop_du).sqrt();
    let exchange = rng.gen_range(-1.0..1.0) * bound;
    let trace = pop_uu + pop_ud + pop_du + pop_dd;
    Z2Form {
        pop_uu: pop_uu / trace,
        pop_ud: pop_ud / trace,
        pop_du: pop_du / trace,
        pop_dd: pop_dd / trace,
        exchange: exchange / trace,
    }
}

/// U(1)-broken pattern sample via its eigenblocks: two free non-negative
/// antisymmetric-sector eigenvalues plus a random PSD 2×2 symmetric block.
pub fn random_u1_form(rng: &mut ChaCha8Rng) -> U1BrokenForm {
    let anti_outer: f64 = rng.gen_range(0.0..1.0); // A − f
    let anti_inner: f64 = rng.gen_range(0.0..1.0); // B − C
    // PSD 2×2 block [[A+f, 2a], [2a, B+C]] from a real Gram construction.
    let g = Matrix2::new(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    );
    let s = g * g.transpose();
    let trace = anti_outer + anti_inner + s[(0, 0)] + s[(1, 1)];
    let (anti_outer, anti_inner) = (anti_outer / trace, anti_inner / trace);
    let s = s / trace;
    U1BrokenForm {
        pop_uu: (anti_outer + s[(0, 0)]) / 2.0,
        pop_ud: (anti_inner + s[(1, 1)]) / 2.0,
        double_flip: (s[(0, 0)] - anti_outer) / 2.0,
        exchange: (s[(1, 1)] - anti_inner) / 2.0,
        single_flip: s[(0, 1)] / 2.0,
    }
}

/// Ising pattern sample via its eigenblocks: one antisymmetric-sector
/// eigenvalue (B − C) plus a random PSD 3×3 symmetric-sector block.
pub fn random_ising_form(rng: &mut ChaCha8Rng) -> IsingForm {
    let anti: f64 = rng.gen_range(0.0..1.0); // B − C
    let g = Matrix3::from_fn(|_, _| rng.gen_range(-1.0..1.0));
    let s = g * g.transpose();
    let trace = anti + s[(0, 0)] + s[(1, 1)] + s[(2, 2)];
    let anti = anti / trace;
    let s = s / trace;
    let s2 = std::f64::consts::SQRT_2;
    IsingForm {
        pop_uu: s[(0, 0)],
        pop_ud: (s[(1, 1)] + anti) / 2.0,
        pop_dd: s[(2, 2)],
        exchange: (s[(1, 1)] - anti) / 2.0,
        double_flip: s[(0, 2)],
        single_flip_up: s[(0, 1)] / s2,
        single_flip_down: s[(1, 2)] / s2,
    }
}
