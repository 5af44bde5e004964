//! DIMACS CNF and old-style (pre-2022) WCNF.
//!
//! `p cnf n m` gives every clause weight 1. `p wcnf n m [top]` prefixes each
//! clause with its weight; clauses with weight `≥ top` are hard and are
//! rejected. Lines starting with `c` are comments, and a line starting with
//! `%` ends the input (some benchmark generators append `%\n0\n`).

use std::fmt::Write as _;

use maxsat_core::{Clause, Formula, Weight};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("missing `p cnf` / `p wcnf` header")]
    MissingHeader,
    #[error("line {line}: malformed header: {text}")]
    MalformedHeader { line: usize, text: String },
    #[error("line {line}: `{token}` is not an integer literal")]
    BadLiteral { line: usize, token: String },
    #[error("line {line}: literal {lit} out of range for {num_vars} variables")]
    LiteralOutOfRange { line: usize, lit: i64, num_vars: usize },
    #[error("line {line}: empty clause")]
    EmptyClause { line: usize },
    #[error("line {line}: `{token}` is not a nonnegative integer weight")]
    BadWeight { line: usize, token: String },
    #[error("line {line}: clause weight {weight} >= top {top}; hard clauses are unsupported")]
    HardClause { line: usize, weight: Weight, top: Weight },
    #[error("unterminated clause at end of input")]
    Unterminated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Cnf,
    Wcnf { top: Option<Weight> },
}

fn header(line: usize, text: &str) -> Result<(Kind, usize), ParseError> {
    let bad = || ParseError::MalformedHeader {
        line,
        text: text.to_string(),
    };
    let fields: Vec<&str> = text.split_whitespace().collect();
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
    match fields.as_slice() {
        ["p", "cnf", n, m] => {
            num(m)?;
            Ok((Kind::Cnf, num(n)?))
        }
        ["p", "wcnf", n, m] => {
            num(m)?;
            Ok((Kind::Wcnf { top: None }, num(n)?))
        }
        ["p", "wcnf", n, m, top] => {
            num(m)?;
            let top = top.parse::<Weight>().map_err(|_| bad())?;
            Ok((Kind::Wcnf { top: Some(top) }, num(n)?))
        }
        _ => Err(bad()),
    }
}

pub fn parse_dimacs(text: &str) -> Result<Formula, ParseError> {
    let mut kind = None;
    let mut num_vars = 0;
    let mut clauses = Vec::new();
    let mut lits: Vec<i64> = Vec::new();
    let mut weight: Option<Weight> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed.starts_with('%') {
            break;
        }
        if trimmed.starts_with('p') {
            if kind.is_some() {
                return Err(ParseError::MalformedHeader {
                    line,
                    text: trimmed.to_string(),
                });
            }
            let (k, n) = header(line, trimmed)?;
            kind = Some(k);
            num_vars = n;
            continue;
        }
        let kind = kind.ok_or(ParseError::MissingHeader)?;
        for token in trimmed.split_whitespace() {
            if let (Kind::Wcnf { top }, None) = (kind, weight) {
                let w = token.parse::<Weight>().map_err(|_| ParseError::BadWeight {
                    line,
                    token: token.to_string(),
                })?;
                if let Some(top) = top.filter(|&t| w >= t) {
                    return Err(ParseError::HardClause { line, weight: w, top });
                }
                weight = Some(w);
                continue;
            }
            let lit = token.parse::<i64>().map_err(|_| ParseError::BadLiteral {
                line,
                token: token.to_string(),
            })?;
            if lit == 0 {
                if lits.is_empty() {
                    return Err(ParseError::EmptyClause { line });
                }
                clauses.push(Clause::from_literals(&lits, weight.take().unwrap_or(1)));
                lits.clear();
                continue;
            }
            if lit.unsigned_abs() as usize > num_vars {
                return Err(ParseError::LiteralOutOfRange { line, lit, num_vars });
            }
            lits.push(lit);
        }
    }
    if kind.is_none() {
        return Err(ParseError::MissingHeader);
    }
    if !lits.is_empty() || weight.is_some() {
        return Err(ParseError::Unterminated);
    }
    Ok(Formula::new(num_vars, clauses).expect("parser enforces clause invariants"))
}

/// Writes `p wcnf n m` followed by one `w lits… 0` line per clause.
pub fn write_dimacs(formula: &Formula) -> String {
    let mut out = format!("p wcnf {} {}\n", formula.num_vars(), formula.num_clauses());
    for c in formula.clauses() {
        write!(out, "{}", c.weight()).unwrap();
        for lit in c.literals() {
            write!(out, " {lit}").unwrap();
        }
        out.push_str(" 0\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_cnf() {
        let f = parse_dimacs("p cnf 2 2\n1 2 0\n-1 0\n").unwrap();
        assert_eq!(f.num_vars(), 2);
        assert_eq!(
            f.clauses(),
            &[Clause::new(vec![1, 2], vec![], 1), Clause::new(vec![], vec![1], 1)]
        );
        assert_eq!(f.total_weight(), 2);
    }

    #[test]
    fn parses_wcnf() {
        let f = parse_dimacs("p wcnf 1 1\n3 1 0\n").unwrap();
        assert_eq!(f.clauses(), &[Clause::new(vec![1], vec![], 3)]);
        assert_eq!(f.total_weight(), 3);
    }

    #[test]
    fn rejects_hard_clause() {
        assert_eq!(
            parse_dimacs("p wcnf 1 1 10\n10 1 0\n"),
            Err(ParseError::HardClause { line: 2, weight: 10, top: 10 })
        );
        assert!(parse_dimacs("p wcnf 1 1 10\n9 1 0\n").is_ok());
    }

    #[test]
    fn comments_multiline_clauses_and_percent_suffix() {
        let text = "c hello\np cnf 3 2\nc mid\n1 -2\n 3 0 2 0\n%\n0\n";
        let f = parse_dimacs(text).unwrap();
        assert_eq!(f.num_clauses(), 2);
        assert_eq!(f.clauses()[0], Clause::from_literals(&[1, -2, 3], 1));
    }

    #[test]
    fn dedups_and_keeps_zero_weight() {
        let f = parse_dimacs("p wcnf 2 2\n0 1 1 -2 0\n4 2 -2 0\n").unwrap();
        assert_eq!(f.clauses()[0], Clause::new(vec![1], vec![2], 0));
        assert!(f.clauses()[1].is_tautology());
        assert_eq!(f.total_weight(), 4);
    }

    #[test]
    fn error_paths() {
        assert_eq!(parse_dimacs("1 0\n"), Err(ParseError::MissingHeader));
        assert_eq!(parse_dimacs(""), Err(ParseError::MissingHeader));
        assert!(matches!(parse_dimacs("p cnf x 1\n"), Err(ParseError::MalformedHeader { .. })));
        assert!(matches!(parse_dimacs("p dnf 1 1\n"), Err(ParseError::MalformedHeader { .. })));
        assert!(matches!(
            parse_dimacs("p cnf 1 1\n2 0\n"),
            Err(ParseError::LiteralOutOfRange { lit: 2, .. })
        ));
        assert_eq!(parse_dimacs("p cnf 1 1\n0\n"), Err(ParseError::EmptyClause { line: 2 }));
        assert_eq!(parse_dimacs("p wcnf 1 1\n5 0\n"), Err(ParseError::EmptyClause { line: 2 }));
        assert!(matches!(parse_dimacs("p wcnf 1 1\n-3 1 0\n"), Err(ParseError::BadWeight { .. })));
        assert!(matches!(parse_dimacs("p wcnf 1 1\n1.5 1 0\n"), Err(ParseError::BadWeight { .. })));
        assert!(matches!(parse_dimacs("p cnf 1 1\n1 a 0\n"), Err(ParseError::BadLiteral { .. })));
        assert_eq!(parse_dimacs("p cnf 1 1\n1\n"), Err(ParseError::Unterminated));
    }

    #[test]
    fn writes_wcnf() {
        let f = Formula::new(1, vec![Clause::new(vec![1], vec![], 3)]).unwrap();
        assert_eq!(write_dimacs(&f), "p wcnf 1 1\n3 1 0\n");
        let empty = Formula::new(0, vec![]).unwrap();
        assert_eq!(write_dimacs(&empty), "p wcnf 0 0\n");
    }
}
