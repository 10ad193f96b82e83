//! Comparison of the two-site solution against the reference coefficient
//! tables.

use serde::Serialize;

use crate::context::{make_context, Model, ModelContext};
use crate::error::{Error, Result};
use crate::field::{format_rational, int, serde_rational, Field, Rational};
use crate::sampling::{random_rational, rng_from_seed};

use super::solve::{solve_zh, Solution, SolveOptions};
use super::table_data::{FZ_H, FZ_HBAR, IK_H, IK_HBAR};

type Table = [([u8; 3], &'static str); 32];

/// Evaluates an arithmetic expression in `q` built from integers,
/// `+ - * / ^` and parentheses.
pub fn evaluate_expression(text: &str, q: &Rational) -> Result<Rational> {
    let mut parser = Parser {
        bytes: text.as_bytes(),
        pos: 0,
        q,
    };
    let value = parser.expr()?;
    parser.skip_ws();
    if parser.pos != parser.bytes.len() {
        return Err(parser.error("trailing input"));
    }
    Ok(value)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    q: &'a Rational,
}

impl Parser<'_> {
    fn error(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at byte {} of expression", self.pos))
    }

    fn skip_ws(&mut self) {
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_whitespace())
        {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Rational> {
        let mut acc = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == b'+' { acc + rhs } else { acc - rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Rational> {
        let mut acc = self.unary()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if op == b'*' {
                acc * rhs
            } else {
                acc.checked_div(&rhs)
                    .ok_or_else(|| self.error("division by zero"))?
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Rational> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(-self.unary()?);
        }
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let negative = self.peek() == Some(b'-');
            if negative {
                self.pos += 1;
            }
            let exp = self.integer()? as i32;
            let exp = if negative { -exp } else { exp };
            return base
                .pow_i(exp)
                .ok_or_else(|| self.error("zero to a negative power"));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.error("expected an integer"))
    }

    fn atom(&mut self) -> Result<Rational> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(b'q') => {
                self.pos += 1;
                Ok(self.q.clone())
            }
            Some(b) if b.is_ascii_digit() => Ok(int(self.integer()?)),
            _ => Err(self.error("unexpected token")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableMismatch {
    pub table: String,
    pub index: [u8; 3],
    pub expected: String,
    pub found: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableReport {
    pub model: Model,
    #[serde(with = "serde_rational")]
    pub q: Rational,
    pub entries: usize,
    pub matched: usize,
    pub zeros: usize,
    pub zeros_matched: usize,
    pub mismatches: Vec<TableMismatch>,
    pub pass: bool,
}

fn tables_for(model: Model) -> [(&'static str, &'static Table); 2] {
    match model {
        Model::Ik => [("ik_h", &IK_H), ("ik_hbar", &IK_HBAR)],
        Model::Fz => [("fz_h", &FZ_H), ("fz_hbar", &FZ_HBAR)],
    }
}

/// Evaluates every reference entry at the context's q and compares it to
/// the solution, after rescaling so that the constant coefficient of H is 1.
pub fn compare_tables(ctx: &ModelContext, sol: &Solution) -> Result<TableReport> {
    let unit = ctx.one();
    if sol.size != 2 || ctx.inhomogeneities().iter().any(|m| m != &unit) {
        return Err(Error::InvalidInput(
            "tables apply to L=2 with unit inhomogeneities".into(),
        ));
    }
    let scale = sol
        .phi_at(&[0, 0, 0])
        .and_then(|c| c.inverse())
        .ok_or_else(|| Error::NormalizationFailure("constant coefficient of H vanishes".into()))?;
    let q = ctx.q();
    let mut report = TableReport {
        model: ctx.model(),
        q: q.clone(),
        entries: 0,
        matched: 0,
        zeros: 0,
        zeros_matched: 0,
        mismatches: Vec::new(),
        pass: false,
    };
    for (i, (name, table)) in tables_for(ctx.model()).into_iter().enumerate() {
        for (index, text) in table.iter() {
            let exps: Vec<u32> = index.iter().map(|&e| e as u32).collect();
            let found = if i == 0 {
                sol.phi_at(&exps)
            } else {
                sol.phibar_at(&exps)
            }
            .map(|v| v.clone() * &scale);
            let expected = evaluate_expression(text, q)?;
            report.entries += 1;
            let zero = expected.is_zero_elem();
            report.zeros += zero as usize;
            if found.as_ref() == Some(&expected) {
                report.matched += 1;
                report.zeros_matched += zero as usize;
            } else {
                report.mismatches.push(TableMismatch {
                    table: name.into(),
                    index: *index,
                    expected: format_rational(&expected),
                    found: found
                        .as_ref()
                        .map_or_else(|| "missing".into(), format_rational),
                });
            }
        }
    }
    report.pass = report.mismatches.is_empty() && report.entries == 64;
    Ok(report)
}

/// Solves at `count` random rational p with unit inhomogeneities and
/// compares each solution against the tables.
pub fn table_sweep(model: Model, count: usize, opts: &SolveOptions) -> Result<Vec<TableReport>> {
    let mut rng = rng_from_seed(opts.seed);
    let mut seen: Vec<Rational> = Vec::new();
    let mut reports = Vec::with_capacity(count);
    while reports.len() < count {
        let p = random_rational(&mut rng, 9, 7);
        let Ok(ctx) = make_context(model, p.clone(), vec![int(1), int(1)]) else {
            continue;
        };
        if seen.contains(ctx.q()) {
            continue;
        }
        seen.push(ctx.q().clone());
        let o = SolveOptions {
            seed: opts.seed.wrapping_add(reports.len() as u64 + 1),
            ..opts.clone()
        };
        let sol = match solve_zh(&ctx, 2, &o) {
            Ok(s) => s,
            // A table denominator or a coefficient degeneracy at this q.
            Err(Error::DegenerateSample(_)) => continue,
            Err(e) => return Err(e),
        };
        match compare_tables(&ctx, &sol) {
            Ok(r) => reports.push(r),
            Err(Error::Parse(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat;

    #[test]
    fn expressions_evaluate() {
        let q = rat(3, 2);
        assert_eq!(evaluate_expression("1", &q).unwrap(), int(1));
        assert_eq!(evaluate_expression("-(q^2+1)/q", &q).unwrap(), rat(-13, 6));
        assert_eq!(evaluate_expression("2*q^-1 - 3", &q).unwrap(), rat(-5, 3));
        assert_eq!(
            evaluate_expression("((2)/(q^3-q^6))", &int(2)).unwrap(),
            rat(-1, 28)
        );
        assert!(evaluate_expression("q/(q-q)", &q).is_err());
        assert!(evaluate_expression("q+", &q).is_err());
    }

    #[test]
    fn tables_have_expected_shape() {
        let zeros: usize = [&FZ_H, &FZ_HBAR]
            .iter()
            .flat_map(|t| t.iter())
            .filter(|(_, e)| *e == "0")
            .count();
        assert_eq!(zeros, 16);
        let q = rat(9, 4);
        assert_eq!(
            evaluate_expression(IK_HBAR[0].1, &q).unwrap(),
            q.pow_i(4).unwrap()
        );
    }

    #[test]
    fn both_models_match_at_one_q() {
        for (model, p) in [(Model::Ik, rat(3, 2)), (Model::Fz, int(2))] {
            let ctx = make_context(model, p, vec![int(1), int(1)]).unwrap();
            let sol = solve_zh(&ctx, 2, &SolveOptions::default()).unwrap();
            let report = compare_tables(&ctx, &sol).unwrap();
            assert!(report.pass, "{:?}", report.mismatches);
            if model == Model::Fz {
                assert_eq!(report.zeros_matched, 16);
            }
        }
    }
}
