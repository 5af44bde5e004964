//! Weighted CNF formulas, assignments, variable orders and random instances.

use alloc::vec::Vec;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

use crate::{Error, Weight, Wide};

/// A weighted clause `∨_{i∈pos} x_i ∨ ∨_{i∈neg} ¬x_i`.
///
/// Literal sets are kept sorted and deduplicated. A variable may occur in
/// both sets, in which case the clause is a tautology.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    pos: Vec<usize>,
    neg: Vec<usize>,
    weight: Weight,
}

impl Clause {
    pub fn new(mut pos: Vec<usize>, mut neg: Vec<usize>, weight: Weight) -> Self {
        pos.sort_unstable();
        pos.dedup();
        neg.sort_unstable();
        neg.dedup();
        Clause { pos, neg, weight }
    }

    /// Builds a clause from DIMACS-style signed literals (`3` is `x_3`, `-3` is `¬x_3`).
    pub fn from_literals(lits: &[i64], weight: Weight) -> Self {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for &l in lits {
            let v = l.unsigned_abs() as usize;
            if l > 0 {
                pos.push(v);
            } else {
                neg.push(v);
            }
        }
        Clause::new(pos, neg, weight)
    }

    pub fn pos(&self) -> &[usize] {
        &self.pos
    }

    pub fn neg(&self) -> &[usize] {
        &self.neg
    }

    pub fn weight(&self) -> Weight {
        self.weight
    }

    pub fn len(&self) -> usize {
        self.pos.len() + self.neg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pos.is_empty() && self.neg.is_empty()
    }

    pub fn is_tautology(&self) -> bool {
        self.pos.iter().any(|v| self.neg.binary_search(v).is_ok())
    }

    /// Signed literals, positive ones first, each group ascending.
    pub fn literals(&self) -> impl Iterator<Item = i64> + '_ {
        self.pos
            .iter()
            .map(|&v| v as i64)
            .chain(self.neg.iter().map(|&v| -(v as i64)))
    }

    /// Whether the clause is satisfied when `value(i)` gives the value of `x_i`.
    pub fn satisfied_by(&self, value: impl Fn(usize) -> bool) -> bool {
        self.pos.iter().any(|&v| value(v)) || self.neg.iter().any(|&v| !value(v))
    }
}

/// A weighted CNF formula over variables `1..=num_vars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formula {
    num_vars: usize,
    clauses: Vec<Clause>,
    total_weight: Wide,
}

impl Formula {
    pub fn new(num_vars: usize, clauses: Vec<Clause>) -> Result<Self, Error> {
        let mut total_weight: Wide = 0;
        for (index, c) in clauses.iter().enumerate() {
            if c.is_empty() {
                return Err(Error::EmptyClause { index });
            }
            if let Some(&var) = c.pos.iter().chain(&c.neg).find(|&&v| v == 0 || v > num_vars) {
                return Err(Error::VariableOutOfRange { var, num_vars });
            }
            total_weight += Wide::from(c.weight);
        }
        Ok(Formula {
            num_vars,
            clauses,
            total_weight,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// `W`, the sum of all clause weights.
    pub fn total_weight(&self) -> Wide {
        self.total_weight
    }

    /// Weight of clauses satisfied by a full assignment.
    pub fn weight_of(&self, a: &Assignment) -> Wide {
        debug_assert_eq!(a.len(), self.num_vars);
        self.clauses
            .iter()
            .filter(|c| c.satisfied_by(|v| a.get(v)))
            .map(|c| Wide::from(c.weight))
            .sum()
    }

    /// Weight of clauses satisfied by the assignment encoded in `mask`
    /// (bit `i − 1` holds `x_i`). Requires `num_vars ≤ 64`.
    pub fn weight_of_mask(&self, mask: u64) -> Wide {
        self.clauses
            .iter()
            .filter(|c| c.satisfied_by(|v| mask >> (v - 1) & 1 == 1))
            .map(|c| Wide::from(c.weight))
            .sum()
    }
}

/// A full truth assignment; `get(i)` is the value of `x_i` (1-based).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    pub fn new(values: Vec<bool>) -> Self {
        Assignment { values }
    }

    pub fn all_false(n: usize) -> Self {
        Assignment {
            values: alloc::vec![false; n],
        }
    }

    /// Bit `i − 1` of `mask` becomes `x_i`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Assignment {
            values: (0..n).map(|i| mask >> i & 1 == 1).collect(),
        }
    }

    pub fn get(&self, var: usize) -> bool {
        self.values[var - 1]
    }

    pub fn set(&mut self, var: usize, value: bool) {
        self.values[var - 1] = value;
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }
}

/// The order in which variables are assigned: a permutation of `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Order(Vec<usize>);

impl Order {
    pub fn identity(n: usize) -> Self {
        Order((1..=n).collect())
    }

    pub fn new(vars: Vec<usize>) -> Result<Self, Error> {
        let n = vars.len();
        let mut seen = alloc::vec![false; n + 1];
        for &v in &vars {
            if v == 0 || v > n || seen[v] {
                return Err(Error::NotAPermutation(n));
            }
            seen[v] = true;
        }
        Ok(Order(vars))
    }

    /// A uniformly shuffled order, deterministic in `seed`.
    pub fn shuffled(n: usize, seed: u64) -> Self {
        let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
        let mut vars: Vec<usize> = (1..=n).collect();
        rand::seq::SliceRandom::shuffle(vars.as_mut_slice(), &mut rng);
        Order(vars)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Generates a random formula, deterministic in `seed`.
///
/// Each clause has a length drawn uniformly from `1..=min(max_len, n)`,
/// distinct variables with independent uniform signs, and a weight drawn
/// uniformly from `1..=max_w`.
pub fn random_instance(
    n: usize,
    m: usize,
    max_len: usize,
    max_w: Weight,
    seed: u64,
) -> Result<Formula, Error> {
    if n == 0 {
        return Err(Error::InvalidParameters("n must be at least 1"));
    }
    if max_len == 0 {
        return Err(Error::InvalidParameters("max_len must be at least 1"));
    }
    if max_w == 0 {
        return Err(Error::InvalidParameters("max_w must be at least 1"));
    }
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    let max_len = max_len.min(n);
    let clauses = (0..m)
        .map(|_| {
            let len = rng.random_range(1..=max_len);
            let mut pos = Vec::new();
            let mut neg = Vec::new();
            for i in index::sample(&mut rng, n, len) {
                if rng.random::<bool>() {
                    pos.push(i + 1);
                } else {
                    neg.push(i + 1);
                }
            }
            Clause::new(pos, neg, rng.random_range(1..=max_w))
        })
        .collect();
    Formula::new(n, clauses)
}

/// Parameters of a generated test corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusParams {
    pub count: usize,
    /// Instances draw `n` uniformly from `1..=max_n`.
    pub max_n: usize,
    /// Instances draw `m` uniformly from `0..=max_m`.
    pub max_m: usize,
    pub max_len: usize,
    pub max_w: Weight,
    pub seed: u64,
}

impl CorpusParams {
    /// The standard verification corpus: 500 instances, `n ≤ 10`, `m ≤ 30`,
    /// clauses of up to 4 literals, weights up to 10.
    pub const STANDARD: CorpusParams = CorpusParams {
        count: 500,
        max_n: 10,
        max_m: 30,
        max_len: 4,
        max_w: 10,
        seed: 1,
    };
}

/// Generates `params.count` instances; instance `k` is a pure function of
/// `(params, k)`.
pub fn corpus(params: &CorpusParams) -> Result<Vec<Formula>, Error> {
    if params.max_n == 0 {
        return Err(Error::InvalidParameters("max_n must be at least 1"));
    }
    let mut rng = Xoshiro256StarStar::seed_from_u64(params.seed);
    (0..params.count)
        .map(|_| {
            let n = rng.random_range(1..=params.max_n);
            let m = rng.random_range(0..=params.max_m);
            let seed = rng.random::<u64>();
            random_instance(n, m, params.max_len, params.max_w, seed)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_clause() {
        let err = Formula::new(2, alloc::vec![Clause::new(alloc::vec![], alloc::vec![], 1)]);
        assert_eq!(err, Err(Error::EmptyClause { index: 0 }));
    }

    #[test]
    fn rejects_out_of_range_variable() {
        let err = Formula::new(2, alloc::vec![Clause::from_literals(&[1, -3], 1)]);
        assert_eq!(err, Err(Error::VariableOutOfRange { var: 3, num_vars: 2 }));
    }

    #[test]
    fn dedups_literals_and_keeps_tautologies() {
        let c = Clause::from_literals(&[2, 1, 2, -1], 4);
        assert_eq!(c.pos(), &[1, 2]);
        assert_eq!(c.neg(), &[1]);
        assert!(c.is_tautology());
        let f = Formula::new(2, alloc::vec![c]).unwrap();
        for mask in 0..4 {
            assert_eq!(f.weight_of_mask(mask), 4);
        }
    }

    #[test]
    fn weight_zero_clauses_are_kept() {
        let f = Formula::new(1, alloc::vec![Clause::from_literals(&[1], 0)]).unwrap();
        assert_eq!(f.num_clauses(), 1);
        assert_eq!(f.total_weight(), 0);
    }

    #[test]
    fn order_validation() {
        assert!(Order::new(alloc::vec![2, 1, 3]).is_ok());
        assert_eq!(Order::new(alloc::vec![1, 1]), Err(Error::NotAPermutation(2)));
        assert_eq!(Order::new(alloc::vec![0]), Err(Error::NotAPermutation(1)));
        let o = Order::shuffled(20, 9);
        assert!(Order::new(o.as_slice().to_vec()).is_ok());
        assert_eq!(o, Order::shuffled(20, 9));
    }

    #[test]
    fn random_instance_is_deterministic() {
        let a = random_instance(3, 2, 2, 5, 42).unwrap();
        let b = random_instance(3, 2, 2, 5, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn random_unit_instance() {
        let mut signs = [false; 2];
        for seed in 0..32 {
            let f = random_instance(1, 1, 1, 1, seed).unwrap();
            let c = &f.clauses()[0];
            assert_eq!(c.len(), 1);
            assert_eq!(c.weight(), 1);
            signs[c.pos().len()] = true;
        }
        assert_eq!(signs, [true, true]);
    }

    #[test]
    fn random_instance_rejects_bad_parameters() {
        assert!(random_instance(0, 1, 1, 1, 0).is_err());
        assert!(random_instance(1, 1, 0, 1, 0).is_err());
        assert!(random_instance(1, 1, 1, 0, 0).is_err());
    }

    #[test]
    fn corpus_instances_respect_invariants() {
        let params = CorpusParams {
            count: 500,
            ..CorpusParams::STANDARD
        };
        let formulas = corpus(&params).unwrap();
        assert_eq!(formulas.len(), 500);
        for f in &formulas {
            assert!((1..=10).contains(&f.num_vars()));
            assert!(f.num_clauses() <= 30);
            let mut sum: Wide = 0;
            for c in f.clauses() {
                assert!(!c.is_empty() && c.len() <= 4.min(f.num_vars()));
                assert!(!c.is_tautology());
                assert!((1..=10).contains(&c.weight()));
                assert!(c.pos().iter().chain(c.neg()).all(|&v| v >= 1 && v <= f.num_vars()));
                sum += Wide::from(c.weight());
            }
            assert_eq!(sum, f.total_weight());
        }
    }
}
