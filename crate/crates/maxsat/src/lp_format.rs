//! CPLEX LP text export of the relaxation, for cross-checking with external
//! solvers. Variables are named `y<i>` and `z<j>` (1-based).

use std::fmt::Write as _;

use maxsat_core::LpModel;

pub fn write_cplex_lp(model: &LpModel) -> String {
    let mut out = String::from("\\ weighted MAX SAT LP relaxation\nMaximize\n obj:");
    let terms: Vec<String> = model
        .rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.weight != 0)
        .map(|(j, r)| format!("{} z{}", r.weight, j + 1))
        .collect();
    if terms.is_empty() {
        out.push_str(" 0 y1");
    } else {
        write!(out, " {}", terms.join(" + ")).unwrap();
    }
    out.push_str("\nSubject To\n");
    for (j, r) in model.rows.iter().enumerate() {
        write!(out, " c{}: z{}", j + 1, j + 1).unwrap();
        for &(v, a) in &r.coeffs {
            // z_j − Σ a·y_v ≤ |N_j|
            let sign = if a > 0 { '-' } else { '+' };
            write!(out, " {sign} y{v}").unwrap();
        }
        writeln!(out, " <= {}", r.constant).unwrap();
    }
    out.push_str("Bounds\n");
    for i in 1..=model.num_vars {
        writeln!(out, " 0 <= y{i} <= 1").unwrap();
    }
    for j in 1..=model.num_clauses() {
        writeln!(out, " 0 <= z{j} <= 1").unwrap();
    }
    out.push_str("End\n");
    out
}
