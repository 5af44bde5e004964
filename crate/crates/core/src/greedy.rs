//! Sequential assignment rules.
//!
//! All runs walk the variables in a fixed order, look at the
//! [`StepQuantities`] of the next variable and commit a value:
//!
//! * [`run_randomized`]: false if setting true does not raise the bound,
//!   true if setting false does not raise it, otherwise true with
//!   probability `t_i / (t_i + f_i)`.
//! * [`run_vanzuylen`]: the same decision expressed through
//!   `α = (W_i + F_i − W̄_i) / (F_i + F̄_i)`.
//! * [`run_greedy_sat`] and [`run_greedy_unsat`]: the two deterministic
//!   greedy rules that maximize the satisfied weight or minimize the newly
//!   unsatisfied weight.
//!
//! Randomized steps consume one 64-bit word from a xoshiro256** generator
//! seeded through SplitMix64 (`Xoshiro256StarStar::seed_from_u64`). The draw
//! is the dyadic rational `word / 2^64` and is compared exactly against the
//! probability. Deterministic steps consume nothing, so two rules that make
//! the same decisions also consume the same words.

use alloc::vec::Vec;

use num_traits::{One, Zero};
use rand::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

use crate::bookkeep::{Alpha, StepQuantities, TraceState};
use crate::formula::{Assignment, Formula, Order};
use crate::rational::{dyadic, ratio, Rational};
use crate::{Error, Wide};

/// The seeded stream of random words used by randomized rules.
#[derive(Debug, Clone)]
pub struct DrawSource(Xoshiro256StarStar);

impl DrawSource {
    pub fn new(seed: u64) -> Self {
        DrawSource(Xoshiro256StarStar::seed_from_u64(seed))
    }

    pub fn next_word(&mut self) -> u64 {
        self.0.next_u64()
    }
}

/// One assignment decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord {
    pub var: usize,
    pub t2: Wide,
    pub f2: Wide,
    pub value: bool,
    /// Probability of `true` the rule used; exactly 0 or 1 for deterministic steps.
    pub prob_true: Rational,
    /// The random word consumed, if any.
    pub draw: Option<u64>,
}

impl StepRecord {
    pub fn is_deterministic(&self) -> bool {
        self.prob_true.is_zero() || self.prob_true.is_one()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub assignment: Assignment,
    /// `w(S_n)`.
    pub weight: Wide,
    pub steps: Vec<StepRecord>,
    pub seed: Option<u64>,
}

/// What a rule decided for one step.
pub(crate) struct Decision {
    pub value: bool,
    pub prob_true: Rational,
    pub draw: Option<u64>,
}

impl Decision {
    pub(crate) fn fixed(value: bool) -> Self {
        Decision {
            value,
            prob_true: if value { Rational::one() } else { Rational::zero() },
            draw: None,
        }
    }
}

/// Runs a rule over the whole order, checking `t2 + f2 ≥ 0` at every step.
///
/// `tamper` sees each step's quantities before the check; it exists so tests
/// can corrupt bookkeeping on purpose.
pub(crate) fn drive(
    formula: &Formula,
    order: Order,
    seed: Option<u64>,
    mut tamper: impl FnMut(&mut StepQuantities),
    mut rule: impl FnMut(&StepQuantities, &TraceState<'_>) -> Result<Decision, Error>,
) -> Result<RunResult, Error> {
    let mut state = TraceState::new(formula, order)?;
    let mut steps = Vec::with_capacity(formula.num_vars());
    while !state.is_complete() {
        let mut q = state.step_quantities()?;
        tamper(&mut q);
        if q.sum2() < 0 {
            return Err(Error::NegativeBoundSum {
                var: q.var,
                sum: q.sum2(),
            });
        }
        let d = rule(&q, &state)?;
        state.apply(d.value)?;
        steps.push(StepRecord {
            var: q.var,
            t2: q.t2,
            f2: q.f2,
            value: d.value,
            prob_true: d.prob_true,
            draw: d.draw,
        });
    }
    Ok(RunResult {
        assignment: state.assignment().expect("trace is complete"),
        weight: state.sat_weight(),
        steps,
        seed,
    })
}

/// The randomized rule for a single step.
///
/// Returns the value and the probability of `true` that produced it. When
/// both `t2 ≤ 0` and `f2 ≤ 0` (so both are zero) the variable is set true.
pub fn choose(q: &StepQuantities, draw: &Rational) -> Result<(bool, Rational), Error> {
    if q.sum2() < 0 {
        return Err(Error::NegativeBoundSum {
            var: q.var,
            sum: q.sum2(),
        });
    }
    if q.f2 <= 0 {
        Ok((true, Rational::one()))
    } else if q.t2 <= 0 {
        Ok((false, Rational::zero()))
    } else {
        let p = ratio(q.t2, q.sum2());
        Ok((*draw < p, p))
    }
}

pub fn run_randomized(formula: &Formula, order: Order, seed: u64) -> Result<RunResult, Error> {
    run_randomized_tampered(formula, order, seed, |_| {})
}

/// [`run_randomized`] with a hook that may alter each step's quantities
/// before they are checked and used. Only meant for fault-injection tests.
#[doc(hidden)]
pub fn run_randomized_tampered(
    formula: &Formula,
    order: Order,
    seed: u64,
    tamper: impl FnMut(&mut StepQuantities),
) -> Result<RunResult, Error> {
    let mut rng = DrawSource::new(seed);
    drive(formula, order, Some(seed), tamper, |q, _| {
        let draw = q.is_randomized().then(|| rng.next_word());
        let (value, prob_true) = choose(q, &draw.map(dyadic).unwrap_or_default())?;
        Ok(Decision {
            value,
            prob_true,
            draw,
        })
    })
}

/// Van Zuylen's rule: false if `α ≤ 0`, true if `α ≥ 1`, otherwise true with
/// probability `α`.
///
/// When `F_i + F̄_i = 0` the sign of the numerator decides: negative means
/// false, zero or positive means true.
pub fn run_vanzuylen(formula: &Formula, order: Order, seed: u64) -> Result<RunResult, Error> {
    let mut rng = DrawSource::new(seed);
    drive(formula, order, Some(seed), |_| {}, |q, _| {
        Ok(match q.vz.alpha() {
            Alpha::ZeroDenominator { numerator } => Decision::fixed(numerator >= 0),
            Alpha::Value(a) if a <= Rational::zero() => Decision::fixed(false),
            Alpha::Value(a) if a >= Rational::one() => Decision::fixed(true),
            Alpha::Value(a) => {
                let word = rng.next_word();
                Decision {
                    value: dyadic(word) < a,
                    prob_true: a,
                    draw: Some(word),
                }
            }
        })
    })
}

/// Picks the value that satisfies more additional weight; ties go to true.
pub fn run_greedy_sat(formula: &Formula, order: Order) -> Result<RunResult, Error> {
    drive(formula, order, None, |_| {}, |q, _| {
        Ok(Decision::fixed(q.sat_t >= q.sat_f))
    })
}

/// Picks the value that unsatisfies less additional weight; ties go to true.
pub fn run_greedy_unsat(formula: &Formula, order: Order) -> Result<RunResult, Error> {
    drive(formula, order, None, |_| {}, |q, _| {
        Ok(Decision::fixed(q.unsat_t <= q.unsat_f))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Clause;

    fn formula(n: usize, clauses: &[(&[i64], u64)]) -> Formula {
        Formula::new(
            n,
            clauses
                .iter()
                .map(|(l, w)| Clause::from_literals(l, *w))
                .collect(),
        )
        .unwrap()
    }

    fn quantities(t2: Wide, f2: Wide) -> StepQuantities {
        let f = formula(1, &[(&[1], 1)]);
        let mut q = TraceState::with_identity_order(&f).step_quantities().unwrap();
        q.t2 = t2;
        q.f2 = f2;
        q
    }

    #[test]
    fn choose_deterministic_branches() {
        let any = ratio(7, 9);
        assert_eq!(choose(&quantities(1, -1), &any).unwrap(), (true, Rational::one()));
        assert_eq!(choose(&quantities(-1, 1), &any).unwrap(), (false, Rational::zero()));
        assert_eq!(choose(&quantities(0, 0), &any).unwrap(), (true, Rational::one()));
        assert_eq!(choose(&quantities(0, 3), &any).unwrap(), (false, Rational::zero()));
    }

    #[test]
    fn choose_randomized_branch() {
        let (v, p) = choose(&quantities(1, 1), &ratio(1, 3)).unwrap();
        assert!(v);
        assert_eq!(p, ratio(1, 2));
        let (v, _) = choose(&quantities(1, 1), &ratio(1, 2)).unwrap();
        assert!(!v);
        let (_, p) = choose(&quantities(2, 4), &Rational::zero()).unwrap();
        assert_eq!(p, ratio(1, 3));
    }

    #[test]
    fn choose_rejects_negative_sum() {
        assert_eq!(
            choose(&quantities(1, -2), &Rational::zero()),
            Err(Error::NegativeBoundSum { var: 1, sum: -1 })
        );
    }

    #[test]
    fn unit_clause_run() {
        let f = formula(1, &[(&[1], 1)]);
        let r = run_randomized(&f, Order::identity(1), 5).unwrap();
        assert!(r.assignment.get(1));
        assert_eq!(r.weight, 1);
        assert!(r.steps.iter().all(|s| s.is_deterministic() && s.draw.is_none()));
    }

    #[test]
    fn two_clause_run_sets_x1_false() {
        let f = formula(2, &[(&[1, 2], 1), (&[-1], 1)]);
        for seed in 0..10 {
            let r = run_randomized(&f, Order::identity(2), seed).unwrap();
            assert_eq!(r.steps[0].t2, 0);
            assert_eq!(r.assignment.values(), &[false, true]);
            assert_eq!(r.weight, 2);
        }
    }

    #[test]
    fn three_clause_run_flips_fair_coin() {
        let f = formula(2, &[(&[1, 2], 2), (&[-1], 2), (&[1], 1)]);
        let mut seen = [false; 2];
        for seed in 0..64 {
            let r = run_randomized(&f, Order::identity(2), seed).unwrap();
            assert_eq!(r.steps[0].prob_true, ratio(1, 2));
            assert!(r.steps[0].draw.is_some());
            seen[r.steps[0].value as usize] = true;
            assert_eq!(r.weight, f.weight_of(&r.assignment));
        }
        assert_eq!(seen, [true, true]);
    }

    #[test]
    fn vanzuylen_unit_clause_is_deterministic() {
        let f = formula(1, &[(&[1], 1)]);
        let r = run_vanzuylen(&f, Order::identity(1), 0).unwrap();
        assert!(r.assignment.get(1));
        assert_eq!(r.steps[0].prob_true, Rational::one());
    }

    #[test]
    fn vanzuylen_matches_randomized_on_examples() {
        let examples = [
            formula(1, &[(&[1], 1)]),
            formula(2, &[(&[1, 2], 1), (&[-1], 1)]),
            formula(2, &[(&[1, 2], 2), (&[-1], 2), (&[1], 1)]),
        ];
        for f in &examples {
            for seed in 0..20 {
                let a = run_randomized(f, Order::identity(f.num_vars()), seed).unwrap();
                let b = run_vanzuylen(f, Order::identity(f.num_vars()), seed).unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn greedy_baselines() {
        let unit = formula(1, &[(&[1], 1)]);
        assert!(run_greedy_sat(&unit, Order::identity(1)).unwrap().assignment.get(1));
        assert!(run_greedy_unsat(&unit, Order::identity(1)).unwrap().assignment.get(1));

        let heavy_neg = formula(1, &[(&[-1], 2), (&[1], 1)]);
        for r in [
            run_greedy_sat(&heavy_neg, Order::identity(1)).unwrap(),
            run_greedy_unsat(&heavy_neg, Order::identity(1)).unwrap(),
        ] {
            assert!(!r.assignment.get(1));
            assert_eq!(r.weight, 2);
        }

        // Both values satisfy one unit of weight; the tie goes to true and
        // the second clause is lost.
        let trap = formula(2, &[(&[1, 2], 1), (&[-1], 1)]);
        let r = run_greedy_sat(&trap, Order::identity(2)).unwrap();
        assert!(r.assignment.get(1));
        assert_eq!(r.weight, 1);

        let open = formula(2, &[(&[1, 2], 1)]);
        let r = run_greedy_unsat(&open, Order::identity(2)).unwrap();
        assert!(r.assignment.get(1));
    }

    #[test]
    fn tampered_run_reports_lemma_one() {
        let f = formula(2, &[(&[1, 2], 1)]);
        let err = run_randomized_tampered(&f, Order::identity(2), 0, |q| q.f2 = -q.t2 - 1);
        assert!(matches!(err, Err(Error::NegativeBoundSum { var: 1, sum: -1 })));
    }
}
