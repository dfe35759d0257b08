//! Acceptance gate: the headline physics checks, one test per criterion,
//! each printing a PASS line (visible under `--nocapture`) or failing with
//! the measured numbers.
//!
//! Tolerances are pinned here, not configurable: the isotropic-point value
//! 0.386 within ±0.01 after 1/N² extrapolation, SSB-invariance at 5e−3 (XXZ)
//! and 1e−2 (TFIM outside the declared critical window), the correlator
//! inequality on the full grid, closed-form/general equivalences at 1e−10,
//! and the κ-invariance certificate at 1e−8 with its longitudinal-field
//! negative control at 1e−4.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};
use std::time::Instant;

use spin_entangle::cli::{negative_control_worst_residual, run_verify};
use spin_entangle::entangle::concurrence;
use spin_entangle::model::{build_hamiltonian, Boundary, LatticeSpec, ModelSpec};
use spin_entangle::reduced::{correlators_from_rho, reduce_pure, CorrelatorSet};
use spin_entangle::solver::{dense_spectrum, lanczos_ground_state, LanczosOptions};
use spin_entangle::symmetry::{
    classify_form, ising_cubic, ising_roots, invariance_residual, kappa_from_roots,
    structural_kappa, tfim_invariance_condition, FormClass, IsingForm,
};
use spin_entangle::Error;

/// Concurrences at separations 1..=3 plus the nearest-neighbor correlators
/// and classified form, for one solved ground state.
#[derive(Clone)]
struct GroundData {
    c: [f64; 3],
    nn_correlators: CorrelatorSet,
    nn_form: Option<IsingForm>,
    solve_seconds: f64,
}

#[derive(PartialEq, Eq, Hash, Clone, Copy)]
struct Key {
    xxz: bool,
    sites: usize,
    param: u64,
    breaking: u64,
}

fn cache() -> &'static Mutex<HashMap<Key, GroundData>> {
    static CACHE: OnceLock<Mutex<HashMap<Key, GroundData>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn ground_data(xxz: bool, sites: usize, param: f64, breaking: f64) -> GroundData {
    let key = Key {
        xxz,
        sites,
        param: param.to_bits(),
        breaking: breaking.to_bits(),
    };
    if let Some(hit) = cache().lock().unwrap().get(&key) {
        return hit.clone();
    }
    let lattice = LatticeSpec::new(sites, Boundary::Periodic).unwrap();
    let spec = if xxz {
        ModelSpec::xxz(lattice, param, breaking).unwrap()
    } else {
        ModelSpec::tfim(lattice, param, breaking).unwrap()
    };
    let action = build_hamiltonian(&spec).unwrap();
    let start = Instant::now();
    let (psi, _) = lanczos_ground_state(&action, &LanczosOptions::default()).unwrap();
    let solve_seconds = start.elapsed().as_secs_f64();

    let mut c = [0.0; 3];
    for (slot, r) in c.iter_mut().zip(1..=3) {
        let rho = reduce_pure(&psi, 0, r).unwrap();
        *slot = concurrence(&rho).unwrap().concurrence;
    }
    let nn = reduce_pure(&psi, 0, 1).unwrap();
    let nn_correlators = correlators_from_rho(&nn);
    let nn_form = match classify_form(&nn).class {
        FormClass::Ising(f) => Some(f),
        FormClass::Z2(z) => Some(IsingForm {
            pop_uu: z.pop_uu,
            pop_ud: (z.pop_ud + z.pop_du) / 2.0,
            pop_dd: z.pop_dd,
            exchange: z.exchange,
            double_flip: 0.0,
            single_flip_up: 0.0,
            single_flip_down: 0.0,
        }),
        _ => None,
    };
    let data = GroundData {
        c,
        nn_correlators,
        nn_form,
        solve_seconds,
    };
    cache().lock().unwrap().insert(key, data.clone());
    data
}

/// The TFIM grid used by criteria 4, 5 and 7, spanning both phases of the
/// transverse field (critical point at h_z = 1).
const TFIM_GRID: [f64; 8] = [0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.6, 2.0];
/// Declared critical window for criterion 4, centered on h_z = 1.
const CRITICAL_WINDOW: (f64, f64) = (0.75, 1.25);

#[test]
fn acceptance_1_heisenberg_point_concurrence() {
    // Nearest-neighbor concurrence of the isotropic chain peaks at 0.386.
    // Desk scale: N ∈ {8, 12, 16}, each solve < 60 s, and the (12, 16)
    // Richardson extrapolation in 1/N² lands within ±0.01.
    let mut values = Vec::new();
    for n in [8usize, 12, 16] {
        let data = ground_data(true, n, 1.0, 0.0);
        println!("  N={n:<3} C(r=1) = {:.8}  [{:.2}s]", data.c[0], data.solve_seconds);
        assert!(
            data.solve_seconds < 60.0,
            "N={n} solve took {:.1}s (limit 60s)",
            data.solve_seconds
        );
        values.push((n as f64, data.c[0]));
    }
    let (n1, c1) = values[1];
    let (n2, c2) = values[2];
    let extrapolated = c2 + (c2 - c1) / ((n2 / n1).powi(2) - 1.0);
    println!("  extrapolated C = {extrapolated:.6}, target 0.386 ± 0.01");
    assert!(
        (extrapolated - 0.386).abs() <= 0.01,
        "extrapolated C = {extrapolated:.6} misses 0.386 ± 0.01 \
         (N=12: {c1:.6}, N=16: {c2:.6})"
    );
    assert!(
        (values[2].1 - 0.386).abs() <= 0.01,
        "largest-N value {c2:.6} misses 0.386 ± 0.01"
    );
    println!("ACCEPTANCE 1 (Heisenberg-point concurrence 0.386): PASS");
}

#[test]
fn acceptance_2_xxz_ssb_invariance() {
    // Ising-regime XXZ: a staggered field of 1e−3 moves no concurrence by
    // more than 5e−3 at N = 16 for r ∈ {1, 2, 3}, and the discrepancy
    // shrinks monotonically as the field is lowered at Δ = 2.
    for delta in [1.0, 1.5, 2.0, 3.0] {
        let symmetric = ground_data(true, 16, delta, 0.0);
        let broken = ground_data(true, 16, delta, 1e-3);
        for r in 0..3 {
            let d = (symmetric.c[r] - broken.c[r]).abs();
            println!(
                "  Δ={delta:<4} r={} C0={:.8} |ΔC| = {d:.3e}",
                r + 1,
                symmetric.c[r]
            );
            assert!(
                d < 5e-3,
                "SSB shifted C at Δ={delta}, r={}: |ΔC| = {d:.3e} ≥ 5e-3",
                r + 1
            );
        }
    }

    let symmetric = ground_data(true, 16, 2.0, 0.0);
    let mut previous = [f64::INFINITY; 3];
    for h in [1e-3, 1e-4, 1e-5] {
        let broken = ground_data(true, 16, 2.0, h);
        for r in 0..3 {
            let d = (symmetric.c[r] - broken.c[r]).abs();
            println!("  Δ=2 h={h:.0e} r={} |ΔC| = {d:.3e}", r + 1);
            assert!(
                d <= previous[r],
                "discrepancy grew as h shrank at Δ=2, r={}: {d:.3e} > {:.3e}",
                r + 1,
                previous[r]
            );
            previous[r] = d;
        }
    }
    // At r = 1 the shrink is strict (nonzero concurrence responds to h).
    let d3 = (symmetric.c[0] - ground_data(true, 16, 2.0, 1e-3).c[0]).abs();
    let d5 = (symmetric.c[0] - ground_data(true, 16, 2.0, 1e-5).c[0]).abs();
    assert!(d5 < d3, "no strict shrink at r=1: {d5:.3e} vs {d3:.3e}");
    println!("ACCEPTANCE 2 (XXZ SSB-invariance, Fig. 1 claim): PASS");
}

#[test]
fn acceptance_3_concurrence_decay_with_separation() {
    // Decay with separation at Δ = 1, N = 16, and rapid drop to zero at
    // r = 3 for Δ ≥ 1.5.
    let iso = ground_data(true, 16, 1.0, 0.0);
    println!(
        "  Δ=1 N=16: C(1) = {:.8}, C(2) = {:.8}, C(3) = {:.8}",
        iso.c[0], iso.c[1], iso.c[2]
    );
    for delta in [1.5, 2.0, 3.0] {
        let data = ground_data(true, 16, delta, 0.0);
        println!("  Δ={delta}: C(3) = {:.3e}", data.c[2]);
        assert!(
            data.c[2] < 0.01,
            "C(r=3) = {:.3e} at Δ={delta} is not below 0.01",
            data.c[2]
        );
    }
    assert!(
        iso.c[0] > iso.c[1],
        "C(1) = {:.3e} does not exceed C(2) = {:.3e}",
        iso.c[0],
        iso.c[1]
    );
    // Longer-range concurrences vanish already below Δ = 1, so C(2) and
    // C(3) are both exactly zero here and this strict inequality cannot
    // hold; it is asserted as stated rather than weakened.
    assert!(
        iso.c[1] > iso.c[2],
        "C(2) = {:.3e} does not strictly exceed C(3) = {:.3e}: both \
         longer-range concurrences are identically zero at Δ = 1 (they drop \
         to zero well before the isotropic point), so the strict decay chain \
         has no room to hold at r ≥ 2",
        iso.c[1],
        iso.c[2]
    );
    println!("ACCEPTANCE 3 (concurrence decay with separation): PASS");
}

#[test]
fn acceptance_4_tfim_ssb_invariance_away_from_criticality() {
    // N = 12 across both phases: the x-field changes the nearest-neighbor
    // concurrence by less than 1e−2 outside the declared critical window,
    // and at the worst grid point the discrepancy decreases as h_x → 0.
    let mut worst = (0.0f64, f64::NAN);
    for &hz in &TFIM_GRID {
        let symmetric = ground_data(false, 12, hz, 0.0);
        let broken = ground_data(false, 12, hz, 1e-3);
        let d = (symmetric.c[0] - broken.c[0]).abs();
        let in_window = hz >= CRITICAL_WINDOW.0 && hz <= CRITICAL_WINDOW.1;
        println!(
            "  h_z={hz:<4} C0={:.8} |ΔC| = {d:.3e}{}",
            symmetric.c[0],
            if in_window { "  (critical window)" } else { "" }
        );
        if !in_window {
            assert!(
                d < 1e-2,
                "SSB shifted nn concurrence at h_z={hz}: |ΔC| = {d:.3e} ≥ 1e-2 \
                 outside the critical window"
            );
        }
        if d > worst.0 {
            worst = (d, hz);
        }
    }

    let (_, hz) = worst;
    let symmetric = ground_data(false, 12, hz, 0.0);
    let mut previous = f64::INFINITY;
    for h in [1e-3, 1e-4, 1e-5] {
        let broken = ground_data(false, 12, hz, h);
        let d = (symmetric.c[0] - broken.c[0]).abs();
        println!("  worst point h_z={hz}: h_x={h:.0e} |ΔC| = {d:.3e}");
        assert!(
            d < previous,
            "discrepancy did not decrease at the worst point h_z={hz}: \
             {d:.3e} vs {previous:.3e}"
        );
        previous = d;
    }
    println!("ACCEPTANCE 4 (TFIM SSB-invariance away from criticality): PASS");
}

#[test]
fn acceptance_5_invariance_condition_across_the_grid() {
    // The correlator inequality certifying SSB-invariance holds at every
    // h_z > 0 grid point with no breaking field, within the runtime budget.
    let start = Instant::now();
    for &hz in &TFIM_GRID {
        let data = ground_data(false, 12, hz, 0.0);
        let holds = tfim_invariance_condition(&data.nn_correlators).unwrap();
        println!("  h_z={hz:<4} condition: {holds}");
        assert!(holds, "invariance condition false at h_z = {hz}");
    }
    let elapsed = start.elapsed().as_secs_f64();
    println!("  grid time {elapsed:.1}s (budget 300s)");
    assert!(elapsed < 300.0, "grid took {elapsed:.1}s, budget is 300s");
    println!("ACCEPTANCE 5 (invariance condition on the full grid): PASS");
}

#[test]
fn acceptance_6_closed_form_equivalences() {
    // Randomized equivalence suites: each runs ≥10³ valid instances per
    // structured form (≥500 convexity pairs, ≥200 mixtures) at their pinned
    // tolerances, through the same path the verify command uses.
    for (suite, min_trials) in [
        ("z2", 1000),
        ("u1", 1000),
        ("ising", 1000),
        ("mixture", 200),
        ("convexity", 500),
        ("wootters", 500),
    ] {
        let outcome = &run_verify(suite, 20260811).unwrap()[0];
        println!("  {outcome}");
        assert!(
            outcome.trials >= min_trials,
            "suite {suite} ran {} trials, need ≥ {min_trials}",
            outcome.trials
        );
        assert!(outcome.passed(), "suite {suite} failed: {outcome}");
    }
    println!("ACCEPTANCE 6 (closed-form/general-path equivalences): PASS");
}

#[test]
fn acceptance_7_kappa_constancy_and_negative_control() {
    // κ-invariance on TFIM families in h_x wherever the correlator condition
    // holds: (a) the root-free certificate 2κ√g₀ = ¼(κ²−g₂)² − g₁ with
    // κ = 2F−(B+C) holds to 1e−8 at every family point — the statement that
    // the symmetry-breaking entries leave z−(x+y) at its zero-entry value;
    // (b) on the root-resolvable part of the grid the solved roots confirm
    // z−(x+y) = 2F−(B+C) directly to 1e−8. The longitudinal-field family is
    // the negative control and must violate the certificate at ≥ 1e−4.
    let mut checked_points = 0usize;
    let mut root_confirmed = 0usize;
    for &hz in &TFIM_GRID {
        for hx in [0.0, 1e-4, 1e-3] {
            let data = ground_data(false, 12, hz, hx);
            assert!(
                tfim_invariance_condition(&data.nn_correlators).unwrap(),
                "condition false at h_z={hz}, h_x={hx}"
            );
            let form = data.nn_form.expect("TFIM nn state classifies");
            let coeffs = ising_cubic(&form);
            let kappa = structural_kappa(&form);
            let residual = invariance_residual(&coeffs, kappa).unwrap();
            assert!(
                residual < 1e-8,
                "root-free residual {residual:.3e} at h_z={hz}, h_x={hx}"
            );

            // Root-level confirmation where the cubic eigenvalues are well
            // separated; extracting an individual member of a near-degenerate
            // cluster costs √ε, which is why the certificate above is
            // root-free in the first place.
            let roots = ising_roots(&coeffs).unwrap();
            let lam = roots.cubic.map(|r| r * r);
            let min_gap = (lam[1] - lam[0]).min(lam[2] - lam[1]);
            if min_gap > 1e-4 {
                let dev = (kappa_from_roots(&roots) - kappa).abs();
                assert!(
                    dev < 1e-8,
                    "z−(x+y) deviates from 2F−(B+C) by {dev:.3e} at \
                     h_z={hz}, h_x={hx}"
                );
                root_confirmed += 1;
            }
            checked_points += 1;
        }
        let data0 = ground_data(false, 12, hz, 0.0);
        println!(
            "  h_z={hz:<4} C={:.6} κ={:+.8} (family checked at h_x ∈ {{0, 1e-4, 1e-3}})",
            data0.c[0],
            structural_kappa(&data0.nn_form.unwrap())
        );
    }
    assert_eq!(checked_points, TFIM_GRID.len() * 3);
    println!("  root-level confirmations on well-conditioned points: {root_confirmed}/{checked_points}");
    assert!(
        root_confirmed >= 8,
        "only {root_confirmed} points were root-resolvable; the direct check lost its teeth"
    );

    let control = negative_control_worst_residual(7).unwrap();
    println!("  negative control (longitudinal-field family): residual {control:.3e}");
    assert!(
        control >= 1e-4,
        "negative control residual {control:.3e} below 1e-4"
    );
    println!("ACCEPTANCE 7 (κ-constancy with negative control): PASS");
}

#[test]
fn acceptance_8_desk_scale_limits_are_explicit() {
    // The quantum Monte Carlo setting (N = 128 at β = 80) is out of desk
    // range by construction; the artifact refuses it loudly instead of
    // pretending, and the invariance checks above carry the physics claims.
    let lattice = LatticeSpec::new(13, Boundary::Periodic).unwrap();
    let spec = ModelSpec::xxz(lattice, 1.0, 0.0).unwrap();
    let action = build_hamiltonian(&spec).unwrap();
    match dense_spectrum(&action) {
        Err(Error::DenseLimit { dim, limit }) => {
            println!("  dense path refuses dim {dim} > {limit}");
        }
        other => panic!("expected DenseLimit, got {other:?}"),
    }

    let cfg = spin_entangle::cli::SweepConfig {
        model: spin_entangle::cli::ModelFamily::Xxz,
        sites: 128,
        boundary: Boundary::Periodic,
        grid: vec![1.0],
        separations: vec![1],
        breaking_fields: vec![1e-3],
        beta: 80.0,
        jobs: 1,
        seed: 7,
        out: None,
    };
    assert!(
        matches!(cfg.validate(), Err(Error::Config(_))),
        "a 128-site thermal sweep must be rejected up front"
    );
    println!(
        "  N=128 at β=80 is explicitly out of scope; trend and invariance \
         checks (criteria 2, 4, 7) carry those claims at desk scale"
    );
    println!("ACCEPTANCE 8 (desk-scale limits explicit): PASS");
}
