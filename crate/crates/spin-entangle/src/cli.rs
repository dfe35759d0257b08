//! Sweep driver and reproduction harness behind the command-line interface:
//! parameter sweeps with CSV output, single-matrix analysis, and the
//! randomized verification suites.

use std::fmt;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;

use crate::entangle::{
    concurrence, concurrence_product_route, convexity_check, entanglement_of_formation,
    mixture_concurrence, pure_concurrence, spin_flip,
};
use crate::model::{build_hamiltonian, Boundary, LatticeSpec, ModelSpec};
use crate::reduced::{
    correlators_from_rho, parse_exchange, reduce_pure, reduce_thermal, CorrelatorSet,
    TwoSiteDensityMatrix,
};
use crate::solver::{
    dense_spectrum, lanczos_ground_state, LanczosOptions, StateVector, ThermalEnsemble,
    DENSE_SITE_LIMIT,
};
use crate::symmetry::{
    classify_form, concurrence_u1, concurrence_z2, ising_concurrence, ising_cubic, ising_roots,
    invariance_residual, kappa_from_roots, structural_kappa, tfim_invariance_condition,
    u1_roots, FormClass, IsingForm,
};
use crate::{sampling, Error, Result};

/// Which model family a sweep runs over; the grid parameter is Δ for XXZ and
/// h_z for TFIM.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelFamily {
    Xxz,
    Tfim,
}

fn default_separations() -> Vec<usize> {
    vec![1]
}

fn default_breaking() -> Vec<f64> {
    vec![0.0]
}

fn default_seed() -> u64 {
    7
}

/// Full description of a sweep. Deserializable from the JSON config file;
/// command-line flags override individual fields.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub model: ModelFamily,
    pub sites: usize,
    #[serde(default = "SweepConfig::default_boundary")]
    pub boundary: Boundary,
    /// Δ (XXZ) or h_z (TFIM) values, in row order.
    pub grid: Vec<f64>,
    #[serde(default = "default_separations")]
    pub separations: Vec<usize>,
    #[serde(default = "default_breaking")]
    pub breaking_fields: Vec<f64>,
    /// 0 selects the Lanczos ground-state path; β > 0 the dense thermal path.
    #[serde(default)]
    pub beta: f64,
    /// Worker threads; 0 uses all available cores.
    #[serde(default)]
    pub jobs: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl SweepConfig {
    fn default_boundary() -> Boundary {
        Boundary::Periodic
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites < 2 {
            return Err(Error::Config("sweeps need at least 2 sites".into()));
        }
        if self.grid.is_empty() {
            return Err(Error::Config("parameter grid is empty".into()));
        }
        if self.separations.is_empty() {
            return Err(Error::Config("separation list is empty".into()));
        }
        if self.breaking_fields.is_empty() {
            return Err(Error::Config("breaking-field list is empty".into()));
        }
        for &r in &self.separations {
            if r == 0 || r >= self.sites {
                return Err(Error::Config(format!(
                    "separation {r} out of range for {} sites",
                    self.sites
                )));
            }
        }
        for &h in &self.breaking_fields {
            if h < 0.0 {
                return Err(Error::Config("breaking fields must be ≥ 0".into()));
            }
        }
        if self.beta < 0.0 {
            return Err(Error::Config("beta must be ≥ 0".into()));
        }
        if self.beta > 0.0 && self.sites > DENSE_SITE_LIMIT {
            return Err(Error::Config(format!(
                "thermal sweeps (beta > 0) need N ≤ {DENSE_SITE_LIMIT}, got {}",
                self.sites
            )));
        }
        Ok(())
    }

    /// The two sites reduced for separation r: (0, r) on a ring, a centered
    /// pair on an open chain to keep clear of the edges.
    pub fn sites_for_separation(&self, r: usize) -> (usize, usize) {
        match self.boundary {
            Boundary::Periodic => (0, r),
            Boundary::Open => {
                let i = (self.sites - 1 - r) / 2;
                (i, i + r)
            }
        }
    }
}

/// One sweep result row.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub param: f64,
    pub separation: usize,
    pub breaking_field: f64,
    pub values: Option<RowValues>,
    /// Populated when the solve or reduction failed; the sweep continues.
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct RowValues {
    pub concurrence_general: f64,
    pub concurrence_closed: Option<f64>,
    pub form: &'static str,
    pub branch_sum: Option<bool>,
    pub branch_yy: Option<bool>,
    pub correlators: CorrelatorSet,
    pub gap: f64,
    pub eof: f64,
}

enum TaskSolution {
    Pure { state: StateVector, gap: f64 },
    Thermal(Box<ThermalEnsemble>),
}

fn solve_task(cfg: &SweepConfig, param: f64, breaking: f64) -> Result<TaskSolution> {
    let lattice = LatticeSpec::new(cfg.sites, cfg.boundary)?;
    let spec = match cfg.model {
        ModelFamily::Xxz => ModelSpec::xxz(lattice, param, breaking)?,
        ModelFamily::Tfim => ModelSpec::tfim(lattice, param, breaking)?,
    };
    let action = build_hamiltonian(&spec)?;
    if cfg.beta == 0.0 {
        let opts = LanczosOptions {
            seed: cfg.seed,
            ..Default::default()
        };
        let (state, report) = lanczos_ground_state(&action, &opts)?;
        Ok(TaskSolution::Pure {
            state,
            gap: report.gap,
        })
    } else {
        let ens = ThermalEnsemble::new(dense_spectrum(&action)?, cfg.beta)?;
        Ok(TaskSolution::Thermal(Box::new(ens)))
    }
}

fn row_values(cfg: &SweepConfig, solution: &TaskSolution, r: usize) -> Result<RowValues> {
    let (i, j) = cfg.sites_for_separation(r);
    let (rho, gap) = match solution {
        TaskSolution::Pure { state, gap } => (reduce_pure(state, i, j)?, *gap),
        TaskSolution::Thermal(ens) => (reduce_thermal(ens, i, j)?, ens.gap()),
    };
    let general = concurrence(&rho)?;
    let correlators = correlators_from_rho(&rho);
    let class = classify_form(&rho);
    let (closed, branch_sum, branch_yy) = match &class.class {
        FormClass::Z2(_) => (Some(concurrence_z2(&correlators)?), None, None),
        FormClass::U1Broken(_) => {
            let branch = concurrence_u1(&correlators);
            (
                Some(branch.value.max(0.0)),
                Some(branch.sum_condition),
                Some(branch.yy_dominates),
            )
        }
        FormClass::Ising(form) => (Some(ising_concurrence(form)?), None, None),
        FormClass::General => (None, None, None),
    };
    Ok(RowValues {
        concurrence_general: general.concurrence,
        concurrence_closed: closed,
        form: class.class.name(),
        branch_sum,
        branch_yy,
        correlators,
        gap,
        eof: general.eof,
    })
}

/// Run every (parameter, separation, breaking-field) point of the sweep.
/// Solves are dispatched to a worker pool sized by `jobs`; rows come back in
/// grid order regardless of completion order. Point failures are recorded in
/// their row and do not abort the sweep.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let tasks: Vec<(f64, f64)> = cfg
        .grid
        .iter()
        .flat_map(|&p| cfg.breaking_fields.iter().map(move |&h| (p, h)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
    let solutions: Vec<std::result::Result<TaskSolution, String>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(p, h)| solve_task(cfg, p, h).map_err(|e| e.to_string()))
            .collect()
    });

    let n_break = cfg.breaking_fields.len();
    let mut rows = Vec::with_capacity(cfg.grid.len() * cfg.separations.len() * n_break);
    for (pi, &param) in cfg.grid.iter().enumerate() {
        for &r in &cfg.separations {
            for (hi, &h) in cfg.breaking_fields.iter().enumerate() {
                let row = match &solutions[pi * n_break + hi] {
                    Ok(solution) => match row_values(cfg, solution, r) {
                        Ok(values) => SweepRow {
                            param,
                            separation: r,
                            breaking_field: h,
                            values: Some(values),
                            error: None,
                        },
                        Err(e) => SweepRow {
                            param,
                            separation: r,
                            breaking_field: h,
                            values: None,
                            error: Some(e.to_string()),
                        },
                    },
                    Err(e) => SweepRow {
                        param,
                        separation: r,
                        breaking_field: h,
                        values: None,
                        error: Some(e.clone()),
                    },
                };
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

/// 12 significant digits, reproducibly.
fn fmt_f(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.11e}")
    }
}

fn fmt_flag(f: Option<bool>) -> String {
    match f {
        Some(true) => "1".into(),
        Some(false) => "0".into(),
        None => "na".into(),
    }
}

pub const CSV_HEADER: &str =
    "param,r,h_break,c_general,c_closed_form,form,branch_sum,branch_yy,xx,yy,zz,sz,sx,gap,e_f,status";

/// Serialize sweep rows in the fixed CSV schema.
pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let prefix = format!(
            "{},{},{}",
            fmt_f(row.param),
            row.separation,
            fmt_f(row.breaking_field)
        );
        match &row.values {
            Some(v) => {
                let c = &v.correlators;
                out.push_str(&format!(
                    "{prefix},{},{},{},{},{},{},{},{},{},{},{},{},ok\n",
                    fmt_f(v.concurrence_general),
                    v.concurrence_closed.map_or("na".into(), fmt_f),
                    v.form,
                    fmt_flag(v.branch_sum),
                    fmt_flag(v.branch_yy),
                    fmt_f(c.xx),
                    fmt_f(c.yy),
                    fmt_f(c.zz),
                    fmt_f((c.zi + c.zj) / 2.0),
                    fmt_f((c.xi + c.xj) / 2.0),
                    fmt_f(v.gap),
                    fmt_f(v.eof),
                ));
            }
            None => {
                let msg = row
                    .error
                    .as_deref()
                    .unwrap_or("unknown")
                    .replace(',', ";")
                    .replace('\n', " ");
                out.push_str(&format!(
                    "{prefix},nan,na,na,na,na,nan,nan,nan,nan,nan,nan,nan,error: {msg}\n"
                ));
            }
        }
    }
    out
}

/// Full analysis of one density matrix from the 16-entry exchange format.
#[derive(Debug, Clone)]
pub struct AnalyzeReport {
    pub hermiticity_deviation: f64,
    pub trace: f64,
    pub rho_eigenvalues: [f64; 4],
    pub form: String,
    pub form_residual: f64,
    pub roots: [f64; 4],
    pub concurrence: f64,
    pub eof: f64,
    pub closed_form: Option<f64>,
    pub branch_sum: Option<bool>,
    pub branch_yy: Option<bool>,
    pub tfim_condition: bool,
}

impl fmt::Display for AnalyzeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "hermiticity_deviation: {:.3e}", self.hermiticity_deviation)?;
        writeln!(f, "trace: {:.12}", self.trace)?;
        writeln!(
            f,
            "rho_eigenvalues: {}",
            self.rho_eigenvalues.map(|v| format!("{v:.12}")).join(" ")
        )?;
        writeln!(f, "form: {} (residual {:.3e})", self.form, self.form_residual)?;
        writeln!(
            f,
            "roots: {}",
            self.roots.map(|v| format!("{v:.12}")).join(" ")
        )?;
        writeln!(f, "concurrence: {:.12}", self.concurrence)?;
        writeln!(f, "entanglement_of_formation: {:.12}", self.eof)?;
        match self.closed_form {
            Some(v) => writeln!(f, "closed_form_concurrence: {v:.12}")?,
            None => writeln!(f, "closed_form_concurrence: na")?,
        }
        writeln!(
            f,
            "branch_flags: sum={} yy={}",
            fmt_flag(self.branch_sum),
            fmt_flag(self.branch_yy)
        )?;
        write!(f, "invariance_condition: {}", self.tfim_condition)
    }
}

pub fn analyze_file(path: &Path) -> Result<AnalyzeReport> {
    let text = std::fs::read_to_string(path)?;
    let matrix = parse_exchange(&text)?;

    // Diagnostics on the raw matrix, then strict validation.
    let adj = matrix.adjoint();
    let hermiticity_deviation = (matrix - adj).map(|z| z.norm()).max();
    let trace = matrix.trace().re;
    let rho = TwoSiteDensityMatrix::new(matrix, 0, 1)?;
    let rho_eigenvalues = rho.eigenvalues()?;

    let general = concurrence(&rho)?;
    let correlators = correlators_from_rho(&rho);
    let class = classify_form(&rho);
    let (closed_form, branch_sum, branch_yy) = match &class.class {
        FormClass::Z2(_) => (Some(concurrence_z2(&correlators)?), None, None),
        FormClass::U1Broken(_) => {
            let b = concurrence_u1(&correlators);
            (
                Some(b.value.max(0.0)),
                Some(b.sum_condition),
                Some(b.yy_dominates),
            )
        }
        FormClass::Ising(form) => (Some(ising_concurrence(form)?), None, None),
        FormClass::General => (None, None, None),
    };

    Ok(AnalyzeReport {
        hermiticity_deviation,
        trace,
        rho_eigenvalues,
        form: class.class.name().to_string(),
        form_residual: class.residual,
        roots: general.roots,
        concurrence: general.concurrence,
        eof: general.eof,
        closed_form,
        branch_sum,
        branch_yy,
        tfim_condition: tfim_invariance_condition(&correlators)?,
    })
}

/// Result of one verification suite.
#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub trials: usize,
    pub failures: usize,
    pub worst_residual: f64,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

impl fmt::Display for SuiteOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "suite={} trials={} failures={} worst_residual={:.3e} status={}",
            self.name,
            self.trials,
            self.failures,
            self.worst_residual,
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

struct SuiteTally {
    name: &'static str,
    trials: usize,
    failures: usize,
    worst: f64,
}

impl SuiteTally {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            trials: 0,
            failures: 0,
            worst: 0.0,
        }
    }

    fn record(&mut self, residual: f64, tol: f64) {
        self.trials += 1;
        self.worst = self.worst.max(residual);
        // Negated so that a NaN residual counts as a failure.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(residual <= tol) {
            self.failures += 1;
        }
    }

    fn record_bool(&mut self, ok: bool) {
        self.trials += 1;
        if !ok {
            self.failures += 1;
            self.worst = self.worst.max(1.0);
        }
    }

    fn finish(self) -> SuiteOutcome {
        SuiteOutcome {
            name: self.name,
            trials: self.trials,
            failures: self.failures,
            worst_residual: self.worst,
        }
    }
}

pub const VERIFY_SUITES: &[&str] = &[
    "wootters",
    "mixture",
    "convexity",
    "z2",
    "u1",
    "ising",
    "conditions",
];

/// Run one named verification suite (or `all`), returning machine-readable
/// outcomes.
pub fn run_verify(suite: &str, seed: u64) -> Result<Vec<SuiteOutcome>> {
    match suite {
        "wootters" => Ok(vec![verify_wootters(seed)?]),
        "mixture" => Ok(vec![verify_mixture(seed)?]),
        "convexity" => Ok(vec![verify_convexity(seed)?]),
        "z2" => Ok(vec![verify_z2(seed)?]),
        "u1" => Ok(vec![verify_u1(seed)?]),
        "ising" => Ok(vec![verify_ising(seed)?]),
        "conditions" => Ok(vec![verify_conditions(seed)?]),
        "all" => {
            let mut out = Vec::new();
            for s in VERIFY_SUITES {
                out.extend(run_verify(s, seed)?);
            }
            Ok(out)
        }
        other => Err(Error::Config(format!(
            "unknown verify suite {other:?}; expected one of {:?} or \"all\"",
            VERIFY_SUITES
        ))),
    }
}

fn verify_wootters(seed: u64) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = SuiteTally::new("wootters");
    // Pure-state reduction of the general formula.
    for _ in 0..150 {
        let psi = sampling::random_pure_two_qubit(&mut rng);
        let m = nalgebra::Matrix4::from_fn(|r, q| psi[r] * psi[q].conj());
        let rho = TwoSiteDensityMatrix::new(m, 0, 1)?;
        let c = concurrence(&rho)?.concurrence;
        tally.record((c - pure_concurrence(&psi)).abs(), 1e-12);
    }
    // Local-unitary invariance.
    for _ in 0..150 {
        let rho = sampling::random_density_matrix(&mut rng);
        let u = sampling::random_local_unitary(&mut rng);
        let rotated = TwoSiteDensityMatrix::new(u * rho.matrix() * u.adjoint(), 0, 1)?;
        let c0 = concurrence(&rho)?.concurrence;
        let c1 = concurrence(&rotated)?.concurrence;
        tally.record((c0 - c1).abs(), 1e-10);
    }
    // Hermitian-form route against the non-symmetric product route.
    for _ in 0..200 {
        let rho = sampling::random_density_matrix(&mut rng);
        let a = concurrence(&rho)?.concurrence;
        let b = concurrence_product_route(&rho)?.concurrence;
        tally.record((a - b).abs(), 1e-10);
    }
    // Spin flip is a trace-preserving PSD involution.
    for _ in 0..100 {
        let rho = sampling::random_density_matrix(&mut rng);
        let tilde = spin_flip(&rho);
        let back = spin_flip(&tilde);
        let inv = (rho.matrix() - back.matrix()).map(|z| z.norm()).max();
        let tr = (tilde.matrix().trace().re - 1.0).abs();
        let psd_ok = tilde.eigenvalues().is_ok();
        tally.record(inv.max(tr), 1e-12);
        tally.record_bool(psd_ok);
    }
    // E_f(C) against the entropy formula, endpoints exact.
    tally.record(entanglement_of_formation(0.0).abs(), 0.0);
    tally.record((entanglement_of_formation(1.0) - 1.0).abs(), 0.0);
    for k in 1..100 {
        let c = k as f64 / 100.0;
        let x = 0.5 + (1.0 - c * c).sqrt() / 2.0;
        let want = -x * x.log2() - (1.0 - x) * (1.0 - x).log2();
        tally.record((entanglement_of_formation(c) - want).abs(), 1e-12);
    }
    Ok(tally.finish())
}

fn verify_mixture(seed: u64) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = SuiteTally::new("mixture");
    for _ in 0..250 {
        let (plus, minus) = sampling::random_equal_concurrence_pair(&mut rng);
        let formula = mixture_concurrence(&plus, &minus)?;
        let m = nalgebra::Matrix4::from_fn(|r, q| {
            (plus[r] * plus[q].conj() + minus[r] * minus[q].conj()) * 0.5
        });
        let rho = TwoSiteDensityMatrix::new(m, 0, 1)?;
        let general = concurrence(&rho)?;
        let tol = crate::symmetry::concurrence_agreement_tolerance(&general.roots, 1e-10);
        tally.record((formula - general.concurrence).abs(), tol);
    }
    Ok(tally.finish())
}

fn verify_convexity(seed: u64) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = SuiteTally::new("convexity");
    for _ in 0..500 {
        let a = sampling::random_density_matrix(&mut rng);
        let b = sampling::random_density_matrix(&mut rng);
        let diag = convexity_check(&a, &b)?;
        tally.record(
            (diag.mixture_value - diag.average_value).max(0.0),
            crate::entangle::CONVEXITY_SLACK,
        );
    }
    Ok(tally.finish())
}

fn verify_z2(seed: u64) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = SuiteTally::new("z2");
    for _ in 0..1000 {
        let form = sampling::random_z2_form(&mut rng);
        let rho = form.to_density_matrix(0, 1)?;
        let closed = concurrence_z2(&correlators_from_rho(&rho))?;
        let general = concurrence(&rho)?;
        let tol = crate::symmetry::concurrence_agreement_tolerance(&general.roots, 1e-10);
        tally.record((closed - general.concurrence).abs(), tol);
    }
    Ok(tally.finish())
}

fn verify_u1(seed: u64) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = SuiteTally::new("u1");
    // Root multisets against the general path.
    for _ in 0..1000 {
        let form = sampling::random_u1_form(&mut rng);
        let rho = form.to_density_matrix(0, 1)?;
        let mut closed = u1_roots(&correlators_from_rho(&rho))?;
        closed.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let general = concurrence(&rho)?.roots;
        for (resid, tol) in crate::symmetry::root_multiset_residuals(&closed, &general, 1e-10, 0.0) {
            tally.record(resid, tol);
        }
    }
    // Invariant expression against the general path when the branch holds.
    let mut in_branch = 0usize;
    let mut attempts = 0usize;
    while in_branch < 1000 && attempts < 200_000 {
        attempts += 1;
        let form = sampling::random_u1_form(&mut rng);
        let rho = form.to_density_matrix(0, 1)?;
        let corrs = correlators_from_rho(&rho);
        let branch = concurrence_u1(&corrs);
        if !branch.branch_valid() {
            continue;
        }
        in_branch += 1;
        let general = concurrence(&rho)?;
        let tol = crate::symmetry::concurrence_agreement_tolerance(&general.roots, 1e-10);
        tally.record((branch.value.max(0.0) - general.concurrence).abs(), tol);
    }
    tally.record_bool(in_branch >= 1000);
    Ok(tally.finish())
}

fn verify_ising(seed: u64) -> Result<SuiteOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = SuiteTally::new("ising");
    for _ in 0..1000 {
        let form = sampling::random_ising_form(&mut rng);
        let rho = form.to_density_matrix(0, 1)?;
        let coeffs = ising_cubic(&form);
        let roots = ising_roots(&coeffs)?;
        let mut closed = [
            roots.cubic[0],
            roots.cubic[1],
            roots.cubic[2],
            roots.factored,
        ];
        closed.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let general = concurrence(&rho)?;
        // Coefficient cancellation in g₀ bounds what the cubic route can
        // resolve near a zero eigenvalue; fold that into the comparison.
        let lam = roots.cubic.map(|r| r * r);
        let lambda_noise = 10.0 * f64::EPSILON * coeffs.g0_roundoff_scale()
            / (lam[1] * lam[2]).max(1e-30);
        for (resid, tol) in
            crate::symmetry::root_multiset_residuals(&closed, &general.roots, 1e-9, lambda_noise)
        {
            tally.record(resid, tol);
        }
        let c_tol = crate::symmetry::concurrence_agreement_tolerance(&general.roots, 1e-9)
            + lambda_noise / (2.0 * roots.cubic[0].max(1e-7));
        tally.record(
            (ising_concurrence(&form)? - general.concurrence).abs(),
            c_tol,
        );
        // Symmetric functions of the solved roots reproduce the g's.
        let [x, y, z] = roots.cubic;
        let (x2, y2, z2) = (x * x, y * y, z * z);
        let scale = coeffs.g2.abs().max(1.0);
        tally.record((x2 + y2 + z2 - coeffs.g2).abs() / scale, 1e-10);
        tally.record(
            (x2 * y2 + x2 * z2 + y2 * z2 - coeffs.g1).abs() / (scale * scale),
            1e-10,
        );
        tally.record((x2 * y2 * z2 - coeffs.g0).abs() / (scale * scale * scale), 1e-10);
    }
    Ok(tally.finish())
}

/// Small-N exact-diagonalization checks of the invariance conditions; the
/// acceptance suite runs the full-scale versions.
fn verify_conditions(seed: u64) -> Result<SuiteOutcome> {
    let mut tally = SuiteTally::new("conditions");
    let n = 8usize;
    let lattice = LatticeSpec::new(n, Boundary::Periodic)?;

    // Z2 structure and sublattice cancellation for XXZ in the Ising regime.
    for delta in [1.2, 2.0] {
        let spec = ModelSpec::xxz(lattice, delta, 0.0)?;
        let action = build_hamiltonian(&spec)?;
        let (psi, _) = lanczos_ground_state(&action, &LanczosOptions::default())?;
        let rho = reduce_pure(&psi, 0, 1)?;
        let class = classify_form(&rho);
        tally.record_bool(matches!(class.class, FormClass::Z2(_)));
        let c = correlators_from_rho(&rho);
        tally.record((c.zi + c.zj).abs(), 1e-10);
    }

    // Invariance condition across the transverse-field grid.
    for k in 0..=8 {
        let hz = 0.2 + 0.2 * k as f64;
        let spec = ModelSpec::tfim(lattice, hz, 0.0)?;
        let action = build_hamiltonian(&spec)?;
        let (psi, _) = lanczos_ground_state(&action, &LanczosOptions::default())?;
        let c = correlators_from_rho(&reduce_pure(&psi, 0, 1)?);
        tally.record_bool(tfim_invariance_condition(&c)?);
    }

    // κ from the solved roots equals its structural zero-single-flip value
    // along a breaking-field family, and the root-free condition holds.
    for hx in [0.0, 1e-4, 1e-3] {
        let spec = ModelSpec::tfim(lattice, 0.6, hx)?;
        let action = build_hamiltonian(&spec)?;
        let (psi, _) = lanczos_ground_state(&action, &LanczosOptions::default())?;
        let rho = reduce_pure(&psi, 0, 1)?;
        let form = match classify_form(&rho).class {
            FormClass::Ising(f) => f,
            FormClass::Z2(z) => IsingForm {
                pop_uu: z.pop_uu,
                pop_ud: (z.pop_ud + z.pop_du) / 2.0,
                pop_dd: z.pop_dd,
                exchange: z.exchange,
                double_flip: 0.0,
                single_flip_up: 0.0,
                single_flip_down: 0.0,
            },
            _ => {
                tally.record_bool(false);
                continue;
            }
        };
        let coeffs = ising_cubic(&form);
        let roots = ising_roots(&coeffs)?;
        tally.record(
            (kappa_from_roots(&roots) - structural_kappa(&form)).abs(),
            1e-8,
        );
        tally.record(invariance_residual(&coeffs, structural_kappa(&form))?, 1e-8);
    }

    // Negative control: the worked counterexample family must break the
    // root-free condition at the magnetized-sector κ.
    let residual = negative_control_worst_residual(seed)?;
    tally.record_bool(residual >= 1e-4);

    Ok(tally.finish())
}

/// Build the counterexample family for the invariance condition: an XXZ
/// chain in a magnetization-selecting uniform z-field (emulated by solving
/// in a fixed Σσᶻ sector), mixed with a pure state that switches on the
/// single- and double-flip entries. The combination κ = B + C − 2√(AD) from
/// the symmetric point does not satisfy the root-free condition once those
/// entries are nonzero; the returned value is the largest residual along the
/// family.
pub fn negative_control_worst_residual(seed: u64) -> Result<f64> {
    let n = 8usize;
    let lattice = LatticeSpec::new(n, Boundary::Periodic)?;
    let spec = ModelSpec::xxz(lattice, 0.8, 0.0)?;
    let action = build_hamiltonian(&spec)?;
    let opts = LanczosOptions {
        seed,
        start_magnetization: Some(4),
        ..Default::default()
    };
    let (psi, _) = lanczos_ground_state(&action, &opts)?;
    let rho0 = reduce_pure(&psi, 0, 1)?;

    // The zero-single-flip κ of the magnetized state: B + C − 2√(AD).
    let m0 = rho0.matrix();
    let base_kappa = m0[(1, 1)].re + m0[(1, 2)].re
        - 2.0 * (m0[(0, 0)].re * m0[(3, 3)].re).sqrt();

    // Pure admixture with all symmetry-breaking entries present.
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let (c1, c2, c3): (f64, f64, f64) = (
        0.8 + 0.1 * rng.gen_range(-1.0..1.0),
        0.4 + 0.1 * rng.gen_range(-1.0..1.0),
        0.3 + 0.1 * rng.gen_range(-1.0..1.0),
    );
    let norm = (c1 * c1 + 2.0 * c2 * c2 + c3 * c3).sqrt();
    let phi = [c1 / norm, c2 / norm, c2 / norm, c3 / norm];

    let mut worst: f64 = 0.0;
    for t in [0.02, 0.05, 0.1] {
        let mixed = nalgebra::Matrix4::from_fn(|r, q| {
            m0[(r, q)] * (1.0 - t)
                + nalgebra::Complex::new(t * phi[r] * phi[q], 0.0)
        });
        let rho = TwoSiteDensityMatrix::new(mixed, 0, 1)?;
        let class = classify_form(&rho);
        let FormClass::Ising(form) = class.class else {
            return Err(Error::Numerical(format!(
                "negative-control family left the Ising pattern ({})",
                class.class.name()
            )));
        };
        let coeffs = ising_cubic(&form);
        worst = worst.max(invariance_residual(&coeffs, base_kappa)?);
    }
    Ok(worst)
}
