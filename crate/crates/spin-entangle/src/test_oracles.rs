//! Test-only reference implementations, deliberately built along different
//! code paths than the library: dense Hamiltonians assembled from explicit
//! Kronecker products of 2×2 Pauli matrices, dense partial traces, and a
//! brute-force expectation evaluator. Everything here is O(4^N) and meant
//! for small N.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

use crate::model::{Boundary, HamiltonianAction};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli(which: usize) -> Matrix2<Complex64> {
    match which {
        0 => Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)),
        1 => Matrix2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)),
        2 => Matrix2::new(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)),
        3 => Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)),
        _ => panic!("pauli index out of range"),
    }
}

/// N-site operator with `ops[k] = (site, pauli_index)`; identity elsewhere.
/// Site i is bit i of the basis index, so site 0 is the *fastest* index:
/// the full operator is op_{N-1} ⊗ … ⊗ op_1 ⊗ op_0.
pub fn site_operator(n: usize, ops: &[(usize, usize)]) -> DMatrix<Complex64> {
    let mut single: Vec<Matrix2<Complex64>> = (0..n).map(|_| pauli(0)).collect();
    for &(site, p) in ops {
        single[site] = pauli(p);
    }
    let mut acc = DMatrix::identity(1, 1);
    for site_matrix in single.iter() {
        // Highest site varies slowest: new ⊗ acc.
        let m = DMatrix::from_fn(2, 2, |r, q| site_matrix[(r, q)]);
        acc = m.kronecker(&acc);
    }
    acc
}

fn bonds(n: usize, boundary: Boundary) -> Vec<(usize, usize)> {
    match boundary {
        Boundary::Open => (0..n - 1).map(|i| (i, i + 1)).collect(),
        Boundary::Periodic => (0..n).map(|i| (i, (i + 1) % n)).collect(),
    }
}

pub fn kron_dense_xxz(n: usize, boundary: Boundary, delta: f64, field: f64) -> DMatrix<Complex64> {
    let dim = 1 << n;
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    for (i, j) in bonds(n, boundary) {
        h -= site_operator(n, &[(i, 1), (j, 1)]);
        h -= site_operator(n, &[(i, 2), (j, 2)]);
        h += site_operator(n, &[(i, 3), (j, 3)]) * c(delta, 0.0);
    }
    for i in 0..n {
        let parity = if i % 2 == 0 { 1.0 } else { -1.0 };
        h += site_operator(n, &[(i, 3)]) * c(field * parity, 0.0);
    }
    h
}

pub fn kron_dense_tfim(n: usize, boundary: Boundary, hz: f64, field: f64) -> DMatrix<Complex64> {
    let dim = 1 << n;
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    if n > 1 {
        for (i, j) in bonds(n, boundary) {
            h -= site_operator(n, &[(i, 1), (j, 1)]);
        }
    }
    for i in 0..n {
        h += site_operator(n, &[(i, 3)]) * c(hz, 0.0);
        h += site_operator(n, &[(i, 1)]) * c(field, 0.0);
    }
    h
}

/// Realize a matrix-free action as a dense matrix by applying it to basis
/// vectors.
pub fn dense_from_action(h: &HamiltonianAction) -> DMatrix<Complex64> {
    let dim = h.dimension();
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    let mut basis = vec![Complex64::default(); dim];
    for col in 0..dim {
        basis[col] = c(1.0, 0.0);
        let hv = h.apply(&basis);
        for (row, val) in hv.iter().enumerate() {
            m[(row, col)] = *val;
        }
        basis[col] = Complex64::default();
    }
    m
}

/// Ascending eigenvalues of a Hermitian complex matrix.
pub fn spectrum(m: &DMatrix<Complex64>) -> Vec<f64> {
    let eig = m.clone().symmetric_eigen();
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals
}

/// Like [`site_operator`] but with arbitrary single-site 2×2 factors.
pub fn site_matrix_operator(n: usize, ops: &[(usize, Matrix2<Complex64>)]) -> DMatrix<Complex64> {
    let mut single: Vec<Matrix2<Complex64>> = (0..n).map(|_| pauli(0)).collect();
    for (site, m) in ops {
        single[*site] = *m;
    }
    let mut acc = DMatrix::identity(1, 1);
    for site_matrix in single.iter() {
        let m = DMatrix::from_fn(2, 2, |r, q| site_matrix[(r, q)]);
        acc = m.kronecker(&acc);
    }
    acc
}

/// Brute-force ⟨ψ|O|ψ⟩ with O given as a dense matrix.
pub fn expectation(op: &DMatrix<Complex64>, psi: &[Complex64]) -> Complex64 {
    let n = psi.len();
    let mut acc = Complex64::default();
    for r in 0..n {
        let mut row = Complex64::default();
        for q in 0..n {
            row += op[(r, q)] * psi[q];
        }
        acc += psi[r].conj() * row;
    }
    acc
}

/// Dense partial trace of |ψ⟩⟨ψ| onto sites (i, j): the 4×4 block indexed by
/// 2·bit_i + bit_j, traced over everything else — an independent check on the
/// production reduction.
pub fn brute_force_two_site_rho(
    psi: &[Complex64],
    n: usize,
    site_i: usize,
    site_j: usize,
) -> [[Complex64; 4]; 4] {
    let dim = 1 << n;
    assert_eq!(psi.len(), dim);
    let mut rho = [[Complex64::default(); 4]; 4];
    for s in 0..dim {
        for t in 0..dim {
            // All non-(i,j) bits must agree for the term to survive the trace.
            let mask = !((1usize << site_i) | (1usize << site_j)) & (dim - 1);
            if s & mask != t & mask {
                continue;
            }
            let a = (((s >> site_i) & 1) << 1) | ((s >> site_j) & 1);
            let b = (((t >> site_i) & 1) << 1) | ((t >> site_j) & 1);
            rho[a][b] += psi[s] * psi[t].conj();
        }
    }
    rho
}
