use chaoscs::l1solver::{l1_norm, solve_bp, BpProblem, SolveStatus, SolverConfig};
use chaoscs::seed;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

/// Smallest l1 norm over the basic feasible solutions: every M-column
/// subset with a nonsingular square block.
fn vertex_enumeration(a: &DMatrix<f64>, y: &DVector<f64>) -> f64 {
    let (m, n) = a.shape();
    let mut best = f64::INFINITY;
    let mut idx: Vec<usize> = (0..m).collect();
    loop {
        let block = DMatrix::from_fn(m, m, |i, j| a[(i, idx[j])]);
        let lu = block.lu();
        if lu.determinant().abs() > 1e-12 {
            if let Some(s) = lu.solve(y) {
                best = best.min(s.iter().map(|v| v.abs()).sum());
            }
        }
        let mut pos = m;
        loop {
            if pos == 0 {
                return best;
            }
            pos -= 1;
            if idx[pos] < n - m + pos {
                idx[pos] += 1;
                for p in pos + 1..m {
                    idx[p] = idx[p - 1] + 1;
                }
                break;
            }
        }
    }
}

fn instance(seed: u64) -> (DMatrix<f64>, DVector<f64>) {
    let mut rng = seed::rng(seed);
    let m = rng.random_range(2..=6);
    let n = rng.random_range(m.max(3)..=10);
    let a = DMatrix::from_fn(m, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let y = DVector::from_fn(m, |_, _| rng.sample::<f64, _>(StandardNormal));
    (a, y)
}

// The default gap of 1e-3 bounds the objective error only to about 1e-3, so
// the comparison runs with a tighter gap.
fn oracle_config() -> SolverConfig {
    SolverConfig {
        gap_tol: 1e-6,
        max_iters: 100,
        ..SolverConfig::default()
    }
}

#[test]
fn objective_matches_vertex_enumeration() {
    let config = oracle_config();
    let mut worst = 0.0f64;
    let mut converged = 0;
    for i in 0..200u64 {
        let (a, y) = instance(seed::derive(2024, &[i]));
        let sol = solve_bp(&BpProblem::from_parts(&a, &y).unwrap(), &config).unwrap();
        let oracle = vertex_enumeration(&a, &y);
        let rel = (l1_norm(&sol.s) - oracle).abs() / oracle;
        worst = worst.max(rel);
        if sol.status == SolveStatus::Converged {
            converged += 1;
            assert!(sol.residual_norm / y.norm() <= 1e-6, "instance {i}: infeasible");
        }
        assert!(
            rel < 1e-4,
            "instance {i}: solver {} vs oracle {oracle}",
            l1_norm(&sol.s)
        );
    }
    eprintln!("worst relative objective gap {worst:.2e}, {converged}/200 converged");
}

#[test]
fn duality_gap_never_increases() {
    for i in 0..200u64 {
        let (a, y) = instance(seed::derive(77, &[i]));
        let sol = solve_bp(&BpProblem::from_parts(&a, &y).unwrap(), &oracle_config()).unwrap();
        for w in sol.gap_history.windows(2) {
            assert!(w[1] <= w[0], "instance {i}: gap rose from {} to {}", w[0], w[1]);
        }
    }
}

#[test]
fn converged_solutions_are_feasible_at_default_tolerance() {
    for i in 0..200u64 {
        let (a, y) = instance(seed::derive(5, &[i]));
        let sol = solve_bp(&BpProblem::from_parts(&a, &y).unwrap(), &SolverConfig::default()).unwrap();
        assert!(sol.converged(), "instance {i}: {:?}", sol.status);
        assert!(sol.final_gap <= 1e-3);
        assert!(sol.residual_norm / y.norm() <= 1e-6);
    }
}
