//! Two-site reduced density matrices and correlator extraction.
//!
//! The two-site state of spins i and j lives in the standard basis
//! {|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩} (index 2·sᵢ + sⱼ with s = 0 for ↑). Its entries
//! are expectation values of products of P↑ = (1+σᶻ)/2, P↓ = (1−σᶻ)/2 and
//! σ± = (σˣ ± iσʸ)/2 on the two sites; equivalently ρ is fixed by the sixteen
//! real Pauli components Tr(ρ σ^μ⊗σ^ν).
//!
//! Both model Hamiltonians are real, so every ρ produced here is real; the
//! storage stays complex anyway so that time reversal (complex conjugation in
//! this basis) acts honestly.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;

use crate::solver::{StateVector, ThermalEnsemble};
use crate::{Error, Result};

/// Hermiticity scrub limit: deviations beyond this are an error, not noise.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Eigenvalues of ρ in [−PSD_CLIP, 0) are treated as zero; more negative is
/// an error, not silently fixed.
pub const PSD_CLIP: f64 = 1e-12;
/// Trace must be 1 within this.
pub const TRACE_TOL: f64 = 1e-10;

/// Validated two-site density matrix: Hermitian, unit trace, PSD.
#[derive(Debug, Clone)]
pub struct TwoSiteDensityMatrix {
    matrix: Matrix4<Complex64>,
    site_i: usize,
    site_j: usize,
}

impl TwoSiteDensityMatrix {
    /// Validate and store. The matrix is scrubbed to (ρ + ρ†)/2; asymmetry
    /// beyond [`HERMITICITY_TOL`] is an error rather than silently fixed, as
    /// is a trace away from 1 or an eigenvalue below −[`PSD_CLIP`].
    pub fn new(matrix: Matrix4<Complex64>, site_i: usize, site_j: usize) -> Result<Self> {
        let adj = matrix.adjoint();
        let asym = (matrix - adj).map(|z| z.norm()).max();
        if asym > HERMITICITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "Hermiticity deviation {asym:.3e} exceeds {HERMITICITY_TOL:.0e}"
            )));
        }
        let matrix = (matrix + adj) * Complex64::new(0.5, 0.0);
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "trace {trace} is not 1"
            )));
        }
        let rho = Self {
            matrix,
            site_i,
            site_j,
        };
        rho.eigenvalues()?;
        Ok(rho)
    }

    /// For matrices produced by internal operations that preserve validity.
    pub(crate) fn new_unchecked(matrix: Matrix4<Complex64>, site_i: usize, site_j: usize) -> Self {
        Self {
            matrix,
            site_i,
            site_j,
        }
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.matrix
    }

    pub fn sites(&self) -> (usize, usize) {
        (self.site_i, self.site_j)
    }

    /// Ascending eigenvalues with tiny negatives clipped to zero.
    pub fn eigenvalues(&self) -> Result<[f64; 4]> {
        let eig = nalgebra::SymmetricEigen::new(self.matrix);
        let mut vals = [0.0; 4];
        for (slot, &v) in vals.iter_mut().zip(eig.eigenvalues.iter()) {
            *slot = clip_nonnegative(v, "density matrix")?;
        }
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(vals)
    }
}

/// Clip a nominally non-negative eigenvalue; reject genuine negativity.
pub(crate) fn clip_nonnegative(v: f64, what: &str) -> Result<f64> {
    if v < -PSD_CLIP {
        Err(Error::InvalidDensityMatrix(format!(
            "{what} has eigenvalue {v:.3e} below −{PSD_CLIP:.0e}"
        )))
    } else {
        Ok(v.max(0.0))
    }
}

/// Insert two-site bits (a = 2·sᵢ + sⱼ) into the environment configuration
/// `rest`, producing a full basis index.
fn compose_index(rest: usize, a: usize, site_i: usize, site_j: usize) -> usize {
    let (lo, hi) = if site_i < site_j {
        (site_i, site_j)
    } else {
        (site_j, site_i)
    };
    let low = rest & ((1usize << lo) - 1);
    let mid = (rest >> lo) & ((1usize << (hi - 1 - lo)) - 1);
    let high = rest >> (hi - 1);
    let mut idx = low | (mid << (lo + 1)) | (high << (hi + 1));
    if (a >> 1) & 1 == 1 {
        idx |= 1 << site_i;
    }
    if a & 1 == 1 {
        idx |= 1 << site_j;
    }
    idx
}

fn partial_trace(psi: &[Complex64], num_sites: usize, site_i: usize, site_j: usize) -> Matrix4<Complex64> {
    let rest_dim = 1usize << (num_sites - 2);
    let mut rho = Matrix4::<Complex64>::zeros();
    let mut amps = [Complex64::default(); 4];
    for rest in 0..rest_dim {
        for (a, amp) in amps.iter_mut().enumerate() {
            *amp = psi[compose_index(rest, a, site_i, site_j)];
        }
        for a in 0..4 {
            for b in 0..4 {
                rho[(a, b)] += amps[a] * amps[b].conj();
            }
        }
    }
    rho
}

/// Trace out everything except sites i and j of a pure state.
pub fn reduce_pure(psi: &StateVector, site_i: usize, site_j: usize) -> Result<TwoSiteDensityMatrix> {
    let n = psi.num_sites();
    check_sites(n, site_i, site_j)?;
    let rho = partial_trace(psi.amplitudes(), n, site_i, site_j);
    TwoSiteDensityMatrix::new(rho, site_i, site_j)
}

/// Gibbs-weighted two-site reduction of a thermal ensemble.
pub fn reduce_thermal(
    ens: &ThermalEnsemble,
    site_i: usize,
    site_j: usize,
) -> Result<TwoSiteDensityMatrix> {
    let spectrum = ens.spectrum();
    let n = spectrum.dimension().trailing_zeros() as usize;
    check_sites(n, site_i, site_j)?;
    let mut rho = Matrix4::<Complex64>::zeros();
    let mut state = vec![Complex64::default(); spectrum.dimension()];
    for (k, &w) in ens.weights().iter().enumerate() {
        if w < 1e-16 {
            continue;
        }
        for (zs, &x) in state.iter_mut().zip(spectrum.eigenvector(k)) {
            *zs = Complex64::new(x, 0.0);
        }
        rho += partial_trace(&state, n, site_i, site_j) * Complex64::new(w, 0.0);
    }
    TwoSiteDensityMatrix::new(rho, site_i, site_j)
}

fn check_sites(n: usize, site_i: usize, site_j: usize) -> Result<()> {
    if site_i == site_j {
        return Err(Error::Config("the two sites must differ".into()));
    }
    if site_i >= n || site_j >= n {
        return Err(Error::Config(format!(
            "sites ({site_i}, {site_j}) out of range for {n} sites"
        )));
    }
    Ok(())
}

/// The correlators that parameterize the structured closed forms.
///
/// `xz` and `zx` are the mixed one-/two-site values ⟨σˣᵢσᶻⱼ⟩ and ⟨σᶻᵢσˣⱼ⟩
/// behind the single-flip entries of the symmetry-broken patterns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatorSet {
    pub xx: f64,
    pub yy: f64,
    pub zz: f64,
    pub zi: f64,
    pub zj: f64,
    pub xi: f64,
    pub xj: f64,
    pub xz: f64,
    pub zx: f64,
    /// ⟨σˣᵢσˣⱼ − σʸᵢσʸⱼ⟩.
    pub xy_asym: f64,
}

fn pauli2(which: usize) -> Matrix2<Complex64> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    match which {
        0 => Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)),
        1 => Matrix2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)),
        2 => Matrix2::new(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)),
        3 => Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)),
        _ => unreachable!(),
    }
}

fn pauli_kron(mu: usize, nu: usize) -> Matrix4<Complex64> {
    let (a, b) = (pauli2(mu), pauli2(nu));
    Matrix4::from_fn(|r, c| a[(r >> 1, c >> 1)] * b[(r & 1, c & 1)])
}

/// All sixteen Pauli components c_{μν} = Tr(ρ σ^μ⊗σ^ν); real for Hermitian ρ.
pub fn pauli_components(rho: &TwoSiteDensityMatrix) -> [[f64; 4]; 4] {
    let mut c = [[0.0; 4]; 4];
    for (mu, row) in c.iter_mut().enumerate() {
        for (nu, slot) in row.iter_mut().enumerate() {
            let op = pauli_kron(mu, nu);
            let tr: Complex64 = (0..4).map(|k| (rho.matrix() * op)[(k, k)]).sum();
            *slot = tr.re;
        }
    }
    c
}

/// Rebuild ρ = ¼ Σ_{μν} c_{μν} σ^μ⊗σ^ν from its Pauli components.
pub fn rho_from_pauli_components(
    c: &[[f64; 4]; 4],
    site_i: usize,
    site_j: usize,
) -> Result<TwoSiteDensityMatrix> {
    let mut m = Matrix4::<Complex64>::zeros();
    for (mu, row) in c.iter().enumerate() {
        for (nu, &coeff) in row.iter().enumerate() {
            m += pauli_kron(mu, nu) * Complex64::new(coeff / 4.0, 0.0);
        }
    }
    TwoSiteDensityMatrix::new(m, site_i, site_j)
}

/// Extract the closed-form correlators from ρ.
pub fn correlators_from_rho(rho: &TwoSiteDensityMatrix) -> CorrelatorSet {
    let c = pauli_components(rho);
    CorrelatorSet {
        xx: c[1][1],
        yy: c[2][2],
        zz: c[3][3],
        zi: c[3][0],
        zj: c[0][3],
        xi: c[1][0],
        xj: c[0][1],
        xz: c[1][3],
        zx: c[3][1],
        xy_asym: c[1][1] - c[2][2],
    }
}

/// Serialize ρ in the plain-text exchange format: 16 row-major entries, each
/// a "re im" pair, one row per line.
pub fn write_exchange(rho: &TwoSiteDensityMatrix) -> String {
    let mut out = String::new();
    for r in 0..4 {
        for c in 0..4 {
            let z = rho.matrix()[(r, c)];
            if c > 0 {
                out.push(' ');
            }
            out.push_str(&format!("{:.17e} {:.17e}", z.re, z.im));
        }
        out.push('\n');
    }
    out
}

/// Parse the 16-entry exchange format into a raw matrix (not yet validated,
/// so diagnostics can still be reported for an unphysical file).
pub fn parse_exchange(text: &str) -> Result<Matrix4<Complex64>> {
    let numbers: Vec<f64> = text
        .split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|e| Error::Parse(format!("bad number {tok:?}: {e}")))
        })
        .collect::<Result<_>>()?;
    if numbers.len() != 32 {
        return Err(Error::Parse(format!(
            "expected 32 numbers (16 re/im pairs), found {}",
            numbers.len()
        )));
    }
    let mut m = Matrix4::<Complex64>::zeros();
    for k in 0..16 {
        m[(k / 4, k % 4)] = Complex64::new(numbers[2 * k], numbers[2 * k + 1]);
    }
    Ok(m)
}
