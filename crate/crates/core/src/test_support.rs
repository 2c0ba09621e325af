//! Brute-force oracles shared by unit tests.

use minilp::{ComparisonOp, OptimizationDirection, Problem};

/// Optimal transport between `p` and `q` (equal total mass) with ground cost
/// `|x_i - x_j|`, solved as a dense linear program.
pub fn lp_transport(p: &[f64], q: &[f64], x: &[f64]) -> (f64, Vec<Vec<f64>>) {
    let b = p.len();
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<Vec<_>> = (0..b)
        .map(|i| (0..b).map(|j| problem.add_var((x[i] - x[j]).abs(), (0.0, f64::INFINITY))).collect())
        .collect();
    for i in 0..b {
        let row: Vec<_> = (0..b).map(|j| (vars[i][j], 1.0)).collect();
        problem.add_constraint(&row, ComparisonOp::Eq, p[i]);
    }
    for j in 0..b {
        let col: Vec<_> = (0..b).map(|i| (vars[i][j], 1.0)).collect();
        problem.add_constraint(&col, ComparisonOp::Eq, q[j]);
    }
    let solution = problem.solve().expect("transport LP is feasible");
    let plan = vars
        .iter()
        .map(|row| row.iter().map(|v| solution[*v]).collect())
        .collect();
    (solution.objective(), plan)
}

pub fn lp_transport_cost(p: &[f64], q: &[f64], x: &[f64]) -> f64 {
    lp_transport(p, q, x).0
}
