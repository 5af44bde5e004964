//! Per-instance verification and corpus sweeps.

use maxsat_core::oracle::{check_lp_rounding, check_randomized_lemmas, exact_expectation};
use maxsat_core::{
    build_relaxation, greedy, solve_lp, Error, Formula, LemmaReport, Order, Rational, Wide,
};
use rayon::prelude::*;

/// Deliberate bookkeeping corruption, used to exercise failure reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Makes `t2 + f2` negative at the first step of the randomized run.
    Lemma1,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub index: usize,
    pub num_vars: usize,
    pub num_clauses: usize,
    pub total_weight: Wide,
    pub opt: Wide,
    pub expectation: Rational,
    pub ratio: Option<Rational>,
    pub opt_lp: Option<Rational>,
    pub lp_weight: Option<Wide>,
    pub nodes: usize,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl Verdict {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

fn describe(report: &LemmaReport) -> Option<String> {
    report.first_failure().map(|(step, check)| match step {
        Some(s) => format!(
            "{} failed at x{} (prefix {}): {} > {}",
            check.name, s.var, s.prefix, check.lhs, check.rhs
        ),
        None => format!("{} failed: {} > {}", check.name, check.lhs, check.rhs),
    })
}

fn count(report: &LemmaReport) -> usize {
    report.steps.iter().map(|s| s.checks.len()).sum::<usize>() + report.totals.len()
}

/// Runs every check on one instance. Only limit violations are returned as
/// errors; everything else lands in `failures`.
pub fn verify_instance(
    index: usize,
    formula: &Formula,
    order: &Order,
    seed: u64,
    fault: Option<Fault>,
) -> Result<Verdict, Error> {
    let mut failures = Vec::new();
    let mut checks = 0;

    let tamper = |q: &mut maxsat_core::StepQuantities| {
        if fault == Some(Fault::Lemma1) {
            q.f2 = -q.t2 - 1;
        }
    };
    match greedy::run_randomized_tampered(formula, order.clone(), seed, tamper) {
        Ok(run) => {
            checks += run.steps.len();
            match greedy::run_vanzuylen(formula, order.clone(), seed) {
                Ok(vz) if vz == run => {}
                Ok(_) => failures.push("Van Zuylen trace differs from the randomized trace".into()),
                Err(e) => failures.push(e.to_string()),
            }
        }
        Err(e @ Error::NegativeBoundSum { .. }) => failures.push(e.to_string()),
        Err(e) => return Err(e),
    }

    let expectation = exact_expectation(formula, order.clone())?;
    if !expectation.meets_three_quarters() {
        failures.push(format!(
            "3/4 guarantee failed: E = {} < 3/4 * {}",
            expectation.expectation, expectation.opt
        ));
    }

    let randomized = check_randomized_lemmas(formula, order.clone())?;
    checks += count(&randomized);
    failures.extend(describe(&randomized));

    let mut lp_weight = None;
    let sol = solve_lp(&build_relaxation(formula));
    match check_lp_rounding(formula, order.clone(), &sol) {
        Ok((report, run)) => {
            checks += count(&report);
            failures.extend(describe(&report));
            lp_weight = Some(run.weight);
        }
        Err(e) => failures.push(e.to_string()),
    }
    let opt_lp = Some(sol.objective);

    Ok(Verdict {
        index,
        num_vars: formula.num_vars(),
        num_clauses: formula.num_clauses(),
        total_weight: formula.total_weight(),
        opt: expectation.opt,
        ratio: expectation.ratio,
        expectation: expectation.expectation,
        opt_lp,
        lp_weight,
        nodes: expectation.node_count,
        checks,
        failures,
    })
}

/// Verifies instances in parallel; results come back in input order.
pub fn sweep(
    formulas: &[Formula],
    order_for: impl Fn(usize, &Formula) -> Order + Sync,
    seed: u64,
    fault: Option<Fault>,
) -> Result<Vec<Verdict>, Error> {
    formulas
        .par_iter()
        .enumerate()
        .map(|(i, f)| verify_instance(i, f, &order_for(i, f), seed, fault))
        .collect()
}

/// Smallest `E/OPT` over instances with `OPT > 0`.
pub fn min_ratio(verdicts: &[Verdict]) -> Option<Rational> {
    verdicts.iter().filter_map(|v| v.ratio.clone()).min()
}
