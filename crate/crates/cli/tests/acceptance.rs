//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Pass criterion numbers as arguments to
//! run a subset, e.g. `cargo test --test acceptance -- 6 7 8`.

use std::collections::BTreeMap;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use chaoscs::analysis::{
    autocorrelation, kmax_estimate, recovery_point, rip_constant_bruteforce, trial_outcomes, RecoveryProtocol,
};
use chaoscs::dynamics::{extract_scalar, integrate, Coordinate, IntegratorConfig, State3, SystemKind};
use chaoscs::l1solver::{l1_norm, solve_bp, BpProblem, SolveStatus, SolverConfig};
use chaoscs::seed;
use chaoscs::trials::TrialPool;
use chaoscs::SequenceKind;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

/// Outcome of one criterion: pass flag and a one-line account of what was
/// measured against which bound.
struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

/// Error rates of the seven ensembles at N=100, M=50, shared by criteria 2
/// and 3.
struct EnsembleRates {
    ks: Vec<usize>,
    rates: BTreeMap<&'static str, Vec<f64>>,
}

fn ensemble_rates() -> EnsembleRates {
    let ks = vec![5, 10, 15, 20, 25];
    let pool = TrialPool::sequential();
    let mut rates = BTreeMap::new();
    for kind in SequenceKind::comparison_set() {
        let protocol = RecoveryProtocol::new(100, 50, kind, 500, 2024);
        let r = ks
            .iter()
            .map(|&k| recovery_point(&protocol, k, &pool).unwrap().error_rate)
            .collect();
        rates.insert(kind.name(), r);
    }
    EnsembleRates { ks, rates }
}

fn fmt_rates(r: &[f64]) -> String {
    r.iter().map(|v| format!("{v:.3}")).collect::<Vec<_>>().join("/")
}

fn c1_chua_autocorrelation() -> Verdict {
    let kind = SystemKind::Chua;
    let config = IntegratorConfig::for_system(kind).with_tau(1.0);
    let traj = integrate(&kind.with_default_params(), &config, 100_000).unwrap();
    let acf = autocorrelation(&extract_scalar(&traj, Coordinate::X1), 1).unwrap();
    let r1 = acf.at_lag(1).unwrap();
    verdict(
        (0.37..=0.57).contains(&r1),
        format!("R_norm(1.0) = {r1:.4}, required in [0.37, 0.57]"),
    )
}

fn c2_ensemble_equivalence(data: &EnsembleRates) -> Verdict {
    let mut worst = (0.0f64, 0usize);
    for (i, &k) in data.ks.iter().enumerate() {
        let at_k: Vec<f64> = data.rates.values().map(|r| r[i]).collect();
        let gap = at_k.iter().cloned().fold(f64::MIN, f64::max) - at_k.iter().cloned().fold(f64::MAX, f64::min);
        if gap > worst.0 {
            worst = (gap, k);
        }
    }
    let table: Vec<String> = data
        .rates
        .iter()
        .map(|(n, r)| format!("{n} {}", fmt_rates(r)))
        .collect();
    verdict(
        worst.0 <= 0.12,
        format!(
            "max pairwise gap {:.3} at k={}, required <= 0.12 (k=5/10/15/20/25: {})",
            worst.0,
            worst.1,
            table.join("; ")
        ),
    )
}

fn c3_correlation_immaterial(data: &EnsembleRates) -> Verdict {
    let ar1 = &data.rates["ar1_gaussian"];
    let iid = &data.rates["iid_gaussian"];
    let worst = ar1.iter().zip(iid).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    verdict(
        worst <= 0.1,
        format!(
            "max |AR(1) - iid| = {worst:.3}, required <= 0.1 (AR(1) {}, iid {})",
            fmt_rates(ar1),
            fmt_rates(iid)
        ),
    )
}

fn c4_kmax_scaling() -> Verdict {
    let pool = TrialPool::sequential();
    let kmax = |m| {
        let protocol = RecoveryProtocol::new(100, m, SequenceKind::IidGaussian, 500, 11);
        kmax_estimate(&protocol, 0.1, &pool).unwrap().k_max
    };
    let (k25, k50) = (kmax(25), kmax(50));
    let ratio = k50 / k25;
    verdict(
        (1.7..=2.5).contains(&ratio),
        format!("k_max(M=50)/k_max(M=25) = {k50:.3}/{k25:.3} = {ratio:.3}, required in [1.7, 2.5]"),
    )
}

fn c5_epsilon_insensitivity() -> Verdict {
    let pool = TrialPool::sequential();
    let epsilons = [10f64.powf(-2.5), 10f64.powf(-1.5), 10f64.powf(-0.5)];
    let mut pass = true;
    let mut parts = Vec::new();
    for k in [11, 16, 20, 25] {
        let protocol = RecoveryProtocol::new(100, 50, SequenceKind::IidGaussian, 1000, 505);
        let outcomes = trial_outcomes(&protocol, k, &pool).unwrap();
        let agree = outcomes
            .iter()
            .filter(|o| {
                let ok: Vec<bool> = epsilons.iter().map(|&e| !o.solver_failed && o.error < e).collect();
                ok.iter().all(|&b| b == ok[0])
            })
            .count();
        let frac = agree as f64 / outcomes.len() as f64;
        pass &= frac >= 0.99;
        let mut part = format!("k={k} agreement {frac:.3}");
        if k == 11 {
            let middle = outcomes
                .iter()
                .filter(|o| (-2.5..=-0.5).contains(&o.error.max(1e-12).log10()))
                .count();
            pass &= middle == 0;
            part += &format!(" ({middle} trials in [-2.5, -0.5])");
        }
        parts.push(part);
    }
    verdict(
        pass,
        format!("{}; required >= 0.99 and 0 trials in band at k=11", parts.join(", ")),
    )
}

/// Smallest l1 norm over the nonsingular M-column square subsystems.
fn lp_vertex_oracle(a: &DMatrix<f64>, y: &DVector<f64>) -> f64 {
    let (m, n) = a.shape();
    let mut best = f64::INFINITY;
    let mut idx: Vec<usize> = (0..m).collect();
    'outer: loop {
        let lu = DMatrix::from_fn(m, m, |i, j| a[(i, idx[j])]).lu();
        if lu.determinant().abs() > 1e-12 {
            if let Some(s) = lu.solve(y) {
                best = best.min(s.iter().map(|v| v.abs()).sum());
            }
        }
        for pos in (0..m).rev() {
            if idx[pos] < n - m + pos {
                idx[pos] += 1;
                for p in pos + 1..m {
                    idx[p] = idx[p - 1] + 1;
                }
                continue 'outer;
            }
        }
        return best;
    }
}

fn c6_solver_oracle() -> Verdict {
    let config = SolverConfig {
        gap_tol: 1e-6,
        max_iters: 100,
        ..SolverConfig::default()
    };
    let (mut worst_obj, mut worst_res, mut converged) = (0.0f64, 0.0f64, 0);
    for i in 0..200u64 {
        let mut rng = seed::rng(seed::derive(6, &[i]));
        let m = rng.random_range(2..=6);
        let n = rng.random_range(m.max(3)..=10);
        let a = DMatrix::from_fn(m, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let y = DVector::from_fn(m, |_, _| rng.sample::<f64, _>(StandardNormal));
        let sol = solve_bp(&BpProblem::from_parts(&a, &y).unwrap(), &config).unwrap();
        let oracle = lp_vertex_oracle(&a, &y);
        worst_obj = worst_obj.max((l1_norm(&sol.s) - oracle).abs() / oracle);
        if sol.status == SolveStatus::Converged {
            converged += 1;
            worst_res = worst_res.max(sol.residual_norm / y.norm());
        }
    }
    verdict(
        worst_obj <= 1e-4 && worst_res <= 1e-6,
        format!(
            "worst relative objective gap {worst_obj:.2e} (<= 1e-4), worst relative residual {worst_res:.2e} \
             over {converged}/200 converged (<= 1e-6)"
        ),
    )
}

fn c7_rip_bruteforce() -> Verdict {
    let mut rng = seed::rng(7);
    let theta = DMatrix::from_fn(8, 16, |_, _| rng.sample::<f64, _>(StandardNormal) / 8f64.sqrt());
    let mut oracle = 0.0f64;
    for i in 0..16 {
        for j in i + 1..16 {
            let g = |p: usize, q: usize| theta.column(p).dot(&theta.column(q));
            let gram = DMatrix::from_row_slice(2, 2, &[g(i, i), g(i, j), g(j, i), g(j, j)]);
            let eig = SymmetricEigen::new(gram).eigenvalues;
            oracle = oracle.max(1.0 - eig.min()).max(eig.max() - 1.0);
        }
    }
    let deltas: Vec<f64> = (1..=4)
        .map(|k| rip_constant_bruteforce(&theta, k).unwrap().delta_k)
        .collect();
    let monotone = deltas.windows(2).all(|w| w[0] <= w[1]);

    let q = DMatrix::from_fn(8, 8, |_, _| rng.sample::<f64, _>(StandardNormal))
        .qr()
        .q();
    let orth = (1..=8)
        .map(|k| rip_constant_bruteforce(&q, k).unwrap().delta_k)
        .fold(0.0, f64::max);
    verdict(
        deltas[1] == oracle && monotone && orth <= 1e-12,
        format!(
            "delta_2 = {:.15} vs pairwise oracle {oracle:.15}; delta_1..4 = {}; orthogonal max delta {orth:.1e}",
            deltas[1],
            deltas.iter().map(|d| format!("{d:.4}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn lorenz_endpoint(step: f64) -> State3 {
    let config = IntegratorConfig {
        step,
        burn_in: 1.0,
        initial_state: State3::new(1.0, 1.0, 1.0),
        tau: step,
    };
    integrate(&SystemKind::Lorenz.with_default_params(), &config, 1)
        .unwrap()
        .samples()[0]
        .1
}

fn c8_integrator_order() -> Verdict {
    let reference = lorenz_endpoint(1e-6);
    let coarse = lorenz_endpoint(1e-3).max_abs_diff(&reference);
    let fine = lorenz_endpoint(5e-4).max_abs_diff(&reference);
    let ratio = coarse / fine;
    verdict(
        (12.0..=20.0).contains(&ratio),
        format!("error {coarse:.3e} -> {fine:.3e}, ratio {ratio:.2}, required in [12, 20]"),
    )
}

fn c9_rossler_pathology() -> Verdict {
    let peak = |kind: SystemKind| {
        let config = IntegratorConfig::for_system(kind).with_tau(0.05);
        let traj = integrate(&kind.with_default_params(), &config, 200_000).unwrap();
        let acf = autocorrelation(&extract_scalar(&traj, Coordinate::X1), 200).unwrap();
        acf.peak_in_window(2.0, 10.0)
    };
    let show = |p: Option<(f64, f64)>| p.map_or("none".to_string(), |(t, v)| format!("{v:.3} at {t:.2}"));
    let (r, c, l) = (
        peak(SystemKind::Rossler),
        peak(SystemKind::Chua),
        peak(SystemKind::Lorenz),
    );
    let rv = r.map_or(f64::NEG_INFINITY, |p| p.1);
    let beats = |o: Option<(f64, f64)>| o.is_none_or(|p| rv > p.1);
    verdict(
        rv >= 0.5 && beats(c) && beats(l),
        format!(
            "largest local maximum in (2, 10]: Rossler {}, Chua {}, Lorenz {}; Rossler must be >= 0.5 and largest",
            show(r),
            show(c),
            show(l)
        ),
    )
}

fn c10_reproducibility() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, workers: &str| {
        let status = Command::new(env!("CARGO_BIN_EXE_chaoscs"))
            .current_dir(dir.path())
            .env_remove("CHAOS_CS_SEED")
            .args([
                "recovery-curve",
                "--N",
                "100",
                "--M",
                "50",
                "--k",
                "1:2:29",
                "--ensemble",
                "gaussian",
                "--trials",
                "500",
                "--seed",
                "42",
                "--workers",
                workers,
                "--out",
                name,
            ])
            .output()
            .unwrap()
            .status;
        assert!(status.success(), "recovery-curve exited with {status}");
        fs::read(dir.path().join(name)).unwrap()
    };
    let first = run("run1.csv", "1");
    let second = run("run2.csv", "1");
    let parallel = run("run8.csv", "8");
    verdict(
        first == second && first == parallel,
        format!(
            "seed 42, {} bytes: repeat run identical = {}, workers 1 vs 8 identical = {}",
            first.len(),
            first == second,
            first == parallel
        ),
    )
}

fn main() {
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let wanted = |n: usize| selected.is_empty() || selected.contains(&n);
    let mut shared: Option<EnsembleRates> = None;
    let mut failed = 0;

    let names = [
        "Chua autocorrelation at lag 1",
        "ensemble equivalence",
        "correlated Gaussian matches iid",
        "k_max scaling with M",
        "epsilon insensitivity",
        "solver against LP vertex enumeration",
        "brute-force RIP constants",
        "RK4 convergence order",
        "Rossler periodic correlation",
        "CLI reproducibility",
    ];
    for (i, name) in names.iter().enumerate() {
        let n = i + 1;
        if !wanted(n) {
            continue;
        }
        let start = Instant::now();
        if matches!(n, 2 | 3) && shared.is_none() {
            shared = Some(ensemble_rates());
        }
        let result = panic::catch_unwind(AssertUnwindSafe(|| match n {
            1 => c1_chua_autocorrelation(),
            2 => c2_ensemble_equivalence(shared.as_ref().unwrap()),
            3 => c3_correlation_immaterial(shared.as_ref().unwrap()),
            4 => c4_kmax_scaling(),
            5 => c5_epsilon_insensitivity(),
            6 => c6_solver_oracle(),
            7 => c7_rip_bruteforce(),
            8 => c8_integrator_order(),
            9 => c9_rossler_pathology(),
            _ => c10_reproducibility(),
        }));
        let v = result.unwrap_or_else(|_| verdict(false, "panicked".into()));
        if !v.pass {
            failed += 1;
        }
        println!(
            "{} [{n:>2}] {name}: {} ({:.1}s)",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
