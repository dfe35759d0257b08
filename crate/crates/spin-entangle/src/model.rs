//! Spin models on one-dimensional lattices and their matrix-free actions.
//!
//! Basis convention, fixed so that reference values are bit-exact: site i
//! contributes bit i of the basis-state index, bit value 0 is |↑⟩ (σᶻ = +1)
//! and bit value 1 is |↓⟩ (σᶻ = −1).
//!
//! Model Hamiltonians (unit bond coupling, Pauli matrices):
//!
//!   XXZ:   H = Σ_⟨ij⟩ [ −(σˣᵢσˣⱼ + σʸᵢσʸⱼ) + Δ σᶻᵢσᶻⱼ ] + h Σᵢ (−1)ⁱ σᶻᵢ
//!   TFIM:  H = −Σ_⟨ij⟩ σˣᵢσˣⱼ + h_z Σᵢ σᶻᵢ + h Σᵢ σˣᵢ
//!
//! where h is the symmetry-breaking field: a staggered z-field for XXZ
//! (couples to the Néel order parameter) and a uniform x-field for TFIM.
//!
//! The action is never stored as a matrix. The off-diagonal part of both
//! models only connects basis states differing by one or two bit flips, so
//! H·v is evaluated per output element by gathering from `v[s ^ mask]`. That
//! makes the result independent of any internal parallelism: each output
//! element is a short sum evaluated in a fixed order.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Chain boundary condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
    Open,
}

/// A one-dimensional chain with a two-coloring into sublattices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeSpec {
    num_sites: usize,
    boundary: Boundary,
}

impl LatticeSpec {
    /// A chain of `num_sites` spins. Periodic rings need at least 3 sites
    /// (a 2-site ring would double-count its single bond).
    pub fn new(num_sites: usize, boundary: Boundary) -> Result<Self> {
        if num_sites == 0 {
            return Err(Error::InvalidLattice("need at least one site".into()));
        }
        if boundary == Boundary::Periodic && num_sites < 3 {
            return Err(Error::InvalidLattice(format!(
                "periodic chain needs at least 3 sites, got {num_sites}"
            )));
        }
        Ok(Self { num_sites, boundary })
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Two-coloring of the chain: +1 on even sites, −1 on odd sites.
    /// Site 0 sits on the + sublattice.
    pub fn sublattice_parity(&self, site: usize) -> i8 {
        debug_assert!(site < self.num_sites);
        if site.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Nearest-neighbor bonds in a fixed order.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let n = self.num_sites;
        match self.boundary {
            Boundary::Open => (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect(),
            Boundary::Periodic => (0..n).map(|i| (i, (i + 1) % n)).collect(),
        }
    }

    /// A periodic ring is bipartite only for even length.
    pub fn is_bipartite(&self) -> bool {
        match self.boundary {
            Boundary::Open => true,
            Boundary::Periodic => self.num_sites.is_multiple_of(2),
        }
    }
}

/// Which Hamiltonian, with its single model-specific coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelKind {
    /// XXZ chain with anisotropy Δ on the σᶻσᶻ term.
    Xxz { delta: f64 },
    /// Transverse-field Ising chain with field h_z ≥ 0 on σᶻ.
    Tfim { transverse_field: f64 },
}

/// Full model description: kind, lattice and symmetry-breaking field h ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub lattice: LatticeSpec,
    pub breaking_field: f64,
}

impl ModelSpec {
    /// XXZ chain. The breaking field is a staggered z-field, which frustrates
    /// on an odd periodic ring, so that combination is rejected.
    pub fn xxz(lattice: LatticeSpec, delta: f64, breaking_field: f64) -> Result<Self> {
        if breaking_field < 0.0 {
            return Err(Error::InvalidModel("breaking field must be ≥ 0".into()));
        }
        if breaking_field != 0.0 && !lattice.is_bipartite() {
            return Err(Error::InvalidModel(format!(
                "staggered field on an odd periodic ring (N = {}) is frustrated",
                lattice.num_sites()
            )));
        }
        Ok(Self {
            kind: ModelKind::Xxz { delta },
            lattice,
            breaking_field,
        })
    }

    /// Transverse-field Ising chain with a uniform x breaking field.
    pub fn tfim(lattice: LatticeSpec, transverse_field: f64, breaking_field: f64) -> Result<Self> {
        if transverse_field < 0.0 {
            return Err(Error::InvalidModel("transverse field must be ≥ 0".into()));
        }
        if breaking_field < 0.0 {
            return Err(Error::InvalidModel("breaking field must be ≥ 0".into()));
        }
        Ok(Self {
            kind: ModelKind::Tfim { transverse_field },
            lattice,
            breaking_field,
        })
    }

    /// The TFIM coupling ratio λ = 1/(2 h_z); derived, never stored.
    pub fn lambda(&self) -> Option<f64> {
        match self.kind {
            ModelKind::Tfim { transverse_field } if transverse_field > 0.0 => {
                Some(1.0 / (2.0 * transverse_field))
            }
            _ => None,
        }
    }
}

/// One off-diagonal bit-flip term: `out[s] += amplitude * v[s ^ mask]`,
/// gated on the two flipped spins being antiparallel in `s` when the term
/// comes from an xy exchange.
#[derive(Debug, Clone, Copy)]
struct FlipTerm {
    mask: usize,
    amplitude: f64,
    /// `Some((mask_i, mask_j))` restricts the term to antiparallel bit pairs.
    antiparallel: Option<(usize, usize)>,
}

/// Matrix-free Hermitian action of a model Hamiltonian on the 2^N basis.
///
/// Immutable after construction; `apply_into` may be called concurrently on
/// distinct vectors, and parallelizes internally over output elements above
/// [`PARALLEL_THRESHOLD`]. Per output element the term order is fixed, so the
/// result is bitwise reproducible regardless of thread count.
pub struct HamiltonianAction {
    num_sites: usize,
    dim: usize,
    diagonal: Vec<f64>,
    flips: Vec<FlipTerm>,
}

/// Dimension above which `apply_into` fans out over rayon.
pub const PARALLEL_THRESHOLD: usize = 1 << 14;

impl HamiltonianAction {
    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    /// H·v for complex amplitudes.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); self.dim];
        self.apply_into(v, &mut out);
        out
    }

    pub fn apply_into(&self, v: &[Complex64], out: &mut [Complex64]) {
        self.apply_generic(v, out);
    }

    /// H·v for real amplitudes. Both model Hamiltonians are real in the
    /// standard basis, so solvers may stay in real arithmetic.
    pub fn apply_real_into(&self, v: &[f64], out: &mut [f64]) {
        self.apply_generic(v, out);
    }

    fn apply_generic<T>(&self, v: &[T], out: &mut [T])
    where
        T: Copy + Send + Sync + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
    {
        assert_eq!(v.len(), self.dim, "input dimension mismatch");
        assert_eq!(out.len(), self.dim, "output dimension mismatch");
        let element = |s: usize| -> T {
            let mut acc = v[s] * self.diagonal[s];
            for term in &self.flips {
                match term.antiparallel {
                    Some((mi, mj)) => {
                        if ((s & mi) == 0) != ((s & mj) == 0) {
                            acc = acc + v[s ^ term.mask] * term.amplitude;
                        }
                    }
                    None => {
                        acc = acc + v[s ^ term.mask] * term.amplitude;
                    }
                }
            }
            acc
        };
        if self.dim >= PARALLEL_THRESHOLD {
            out.par_iter_mut()
                .enumerate()
                .for_each(|(s, o)| *o = element(s));
        } else {
            for (s, o) in out.iter_mut().enumerate() {
                *o = element(s);
            }
        }
    }

    /// The diagonal of H in the computational basis.
    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }
}

/// σᶻ eigenvalue of site `site` in basis state `s`.
#[inline]
fn sz(s: usize, site: usize) -> f64 {
    if (s >> site) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Total magnetization Σᵢ σᶻᵢ of basis state `s` on `n` sites.
pub fn magnetization(s: usize, n: usize) -> i64 {
    let down = (s & ((1usize << n) - 1)).count_ones() as i64;
    n as i64 - 2 * down
}

pub fn build_xxz(spec: &ModelSpec) -> Result<HamiltonianAction> {
    build_xxz_with_xy_sign(spec, -1.0)
}

/// XXZ action with the xy-exchange amplitude sign exposed: `sign = −1` is the
/// model as written; `sign = +1` is the sublattice-rotated partner used to
/// check the ferro/antiferro equivalence.
pub(crate) fn build_xxz_with_xy_sign(spec: &ModelSpec, sign: f64) -> Result<HamiltonianAction> {
    let ModelKind::Xxz { delta } = spec.kind else {
        return Err(Error::InvalidModel("build_xxz needs an XXZ spec".into()));
    };
    if spec.breaking_field != 0.0 && !spec.lattice.is_bipartite() {
        return Err(Error::InvalidModel(
            "staggered field on an odd periodic ring is frustrated".into(),
        ));
    }
    let n = spec.lattice.num_sites();
    let dim = check_dimension(n)?;
    let bonds = spec.lattice.bonds();
    let h = spec.breaking_field;

    let mut diagonal = vec![0.0; dim];
    for (s, d) in diagonal.iter_mut().enumerate() {
        let mut acc = 0.0;
        for &(i, j) in &bonds {
            acc += delta * sz(s, i) * sz(s, j);
        }
        for i in 0..n {
            acc += h * f64::from(spec.lattice.sublattice_parity(i)) * sz(s, i);
        }
        *d = acc;
    }

    // −(σˣσˣ + σʸσʸ) has matrix element −2 between the two antiparallel
    // configurations of a bond; parallel configurations are annihilated.
    let flips = bonds
        .iter()
        .map(|&(i, j)| FlipTerm {
            mask: (1 << i) | (1 << j),
            amplitude: 2.0 * sign,
            antiparallel: Some((1 << i, 1 << j)),
        })
        .collect();

    Ok(HamiltonianAction {
        num_sites: n,
        dim,
        diagonal,
        flips,
    })
}

pub fn build_tfim(spec: &ModelSpec) -> Result<HamiltonianAction> {
    let ModelKind::Tfim { transverse_field } = spec.kind else {
        return Err(Error::InvalidModel("build_tfim needs a TFIM spec".into()));
    };
    let n = spec.lattice.num_sites();
    let dim = check_dimension(n)?;
    let bonds = spec.lattice.bonds();
    let h = spec.breaking_field;

    let mut diagonal = vec![0.0; dim];
    for (s, d) in diagonal.iter_mut().enumerate() {
        let mut acc = 0.0;
        for i in 0..n {
            acc += transverse_field * sz(s, i);
        }
        *d = acc;
    }

    let mut flips: Vec<FlipTerm> = bonds
        .iter()
        .map(|&(i, j)| FlipTerm {
            mask: (1 << i) | (1 << j),
            amplitude: -1.0,
            antiparallel: None,
        })
        .collect();
    if h != 0.0 {
        flips.extend((0..n).map(|i| FlipTerm {
            mask: 1 << i,
            amplitude: h,
            antiparallel: None,
        }));
    }

    Ok(HamiltonianAction {
        num_sites: n,
        dim,
        diagonal,
        flips,
    })
}

/// Build whichever Hamiltonian the model description asks for.
pub fn build_hamiltonian(spec: &ModelSpec) -> Result<HamiltonianAction> {
    match spec.kind {
        ModelKind::Xxz { .. } => build_xxz(spec),
        ModelKind::Tfim { .. } => build_tfim(spec),
    }
}

/// Hard cap keeping 2^N addressable and the basis-vector memory sane.
const MAX_SITES: usize = 26;

fn check_dimension(n: usize) -> Result<usize> {
    if n > MAX_SITES {
        return Err(Error::InvalidModel(format!(
            "N = {n} exceeds the supported maximum of {MAX_SITES} sites"
        )));
    }
    Ok(1usize << n)
}
