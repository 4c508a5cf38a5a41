//! Normalized linear offset expressions and their deterministic comparison.
//!
//! Offsets are sums `c + Σ kᵢ·xᵢ` over integer variables. Normalization gives
//! a unique form (zero coefficients dropped, so `2*n` and `n+n` coincide).
//! Comparison treats offset variables as nonnegative — they originate from
//! sizes and indices — and is *weak*: `Lt` means the left value is ≤ the
//! right under every nonnegative assignment (and < under some), never >.

use std::collections::BTreeMap;
use std::fmt;

use crate::c::ast::{BinOp, CExpr, CExprKind};
use crate::diag::{Code, Diagnostic, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SymbolicOffset {
    pub constant: i64,
    /// variable name -> coefficient; never contains zero coefficients
    pub terms: BTreeMap<String, i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymCmp {
    Lt,
    Eq,
    Gt,
    Unknown,
}

impl SymbolicOffset {
    pub fn constant(c: i64) -> Self {
        SymbolicOffset {
            constant: c,
            terms: BTreeMap::new(),
        }
    }

    pub fn var(name: impl Into<String>) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(name.into(), 1);
        SymbolicOffset { constant: 0, terms }
    }

    pub fn zero() -> Self {
        Self::constant(0)
    }

    pub fn is_zero(&self) -> bool {
        self.constant == 0 && self.terms.is_empty()
    }

    pub fn is_constant(&self) -> Option<i64> {
        if self.terms.is_empty() {
            Some(self.constant)
        } else {
            None
        }
    }

    pub fn add(&self, other: &SymbolicOffset) -> SymbolicOffset {
        let mut out = self.clone();
        out.constant += other.constant;
        for (name, coef) in &other.terms {
            let c = out.terms.entry(name.clone()).or_insert(0);
            *c += coef;
            if *c == 0 {
                out.terms.remove(name);
            }
        }
        out
    }

    pub fn sub(&self, other: &SymbolicOffset) -> SymbolicOffset {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, k: i64) -> SymbolicOffset {
        if k == 0 {
            return SymbolicOffset::zero();
        }
        SymbolicOffset {
            constant: self.constant * k,
            terms: self
                .terms
                .iter()
                .map(|(n, c)| (n.clone(), c * k))
                .collect(),
        }
    }

    /// Evaluate under an assignment; unbound variables count as 0.
    pub fn eval(&self, assignment: &BTreeMap<String, i64>) -> i64 {
        self.constant
            + self
                .terms
                .iter()
                .map(|(n, c)| c * assignment.get(n).copied().unwrap_or(0))
                .sum::<i64>()
    }
}

impl fmt::Display for SymbolicOffset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (name, coef) in &self.terms {
            match coef {
                1 => parts.push(name.clone()),
                -1 => parts.push(format!("-{}", name)),
                c => parts.push(format!("{}*{}", c, name)),
            }
        }
        if self.constant != 0 || parts.is_empty() {
            parts.push(self.constant.to_string());
        }
        write!(f, "{}", parts.join(" + ").replace("+ -", "- "))
    }
}

/// Compare two normalized offsets. `Eq` is exact syntactic equality of normal
/// forms; `Lt`/`Gt` hold whenever the difference has single-signed mass under
/// nonnegative variables (so possibly-equal-at-zero pairs like `n` vs `2n`
/// still order as `Lt`).
pub fn sym_compare(a: &SymbolicOffset, b: &SymbolicOffset) -> SymCmp {
    let d = b.sub(a);
    if d.is_zero() {
        return SymCmp::Eq;
    }
    let all_nonneg = d.constant >= 0 && d.terms.values().all(|c| *c >= 0);
    if all_nonneg {
        return SymCmp::Lt;
    }
    let all_nonpos = d.constant <= 0 && d.terms.values().all(|c| *c <= 0);
    if all_nonpos {
        return SymCmp::Gt;
    }
    SymCmp::Unknown
}

/// `Lt` that additionally guarantees strictness under every nonnegative
/// assignment (the constant part of the difference is positive).
pub fn sym_lt_strict(a: &SymbolicOffset, b: &SymbolicOffset) -> bool {
    let d = b.sub(a);
    d.constant > 0 && d.terms.values().all(|c| *c >= 0)
}

/// Normalize an integer expression into a symbolic offset. Supports literals,
/// variables, `+`, `-`, multiplication by constants, and widening casts.
pub fn sym_normalize(e: &CExpr) -> Result<SymbolicOffset> {
    match &e.kind {
        CExprKind::IntLit(v) => {
            let c = i64::try_from(*v).map_err(|_| {
                Diagnostic::error(
                    Code::NonLinear,
                    e.loc.clone(),
                    format!("offset constant {} is too large", v),
                )
            })?;
            Ok(SymbolicOffset::constant(c))
        }
        CExprKind::Var(name) => Ok(SymbolicOffset::var(name.clone())),
        CExprKind::Cast(_, inner) => sym_normalize(inner),
        CExprKind::BinOp(BinOp::Add, lhs, rhs) => {
            Ok(sym_normalize(lhs)?.add(&sym_normalize(rhs)?))
        }
        CExprKind::BinOp(BinOp::Sub, lhs, rhs) => {
            Ok(sym_normalize(lhs)?.sub(&sym_normalize(rhs)?))
        }
        CExprKind::BinOp(BinOp::Mul, lhs, rhs) => {
            let l = sym_normalize(lhs)?;
            let r = sym_normalize(rhs)?;
            match (l.is_constant(), r.is_constant()) {
                (Some(k), _) => Ok(r.scale(k)),
                (_, Some(k)) => Ok(l.scale(k)),
                _ => Err(Diagnostic::error(
                    Code::NonLinear,
                    e.loc.clone(),
                    "products of two variables are not supported in offsets",
                )),
            }
        }
        _ => Err(Diagnostic::error(
            Code::NonLinear,
            e.loc.clone(),
            "offset expression is not linear",
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c::lex::tokenize;
    use crate::c::parse::Parser;

    fn norm(src: &str) -> SymbolicOffset {
        let toks = tokenize("t.c", src).unwrap();
        let mut p = Parser::new(toks);
        sym_normalize(&p.expr().unwrap()).unwrap()
    }

    #[test]
    fn constant_plus_variable() {
        let s = norm("n + 8");
        assert_eq!(s.constant, 8);
        assert_eq!(s.terms.get("n"), Some(&1));
    }

    #[test]
    fn doubling_normalizes_identically() {
        assert_eq!(norm("2 * n"), norm("n + n"));
    }

    #[test]
    fn zero_is_the_empty_form() {
        assert_eq!(norm("0"), SymbolicOffset::zero());
    }

    #[test]
    fn cancellation_removes_terms() {
        let s = norm("n + 4 - n");
        assert_eq!(s, SymbolicOffset::constant(4));
    }

    #[test]
    fn nonlinear_products_are_rejected() {
        let toks = tokenize("t.c", "n * m").unwrap();
        let mut p = Parser::new(toks);
        let err = sym_normalize(&p.expr().unwrap()).unwrap_err();
        assert_eq!(err.code, Code::NonLinear);
    }

    #[test]
    fn offset_is_greater_after_adding() {
        assert_eq!(sym_compare(&norm("n"), &norm("n + 8")), SymCmp::Lt);
        assert!(sym_lt_strict(&norm("n"), &norm("n + 8")));
    }

    #[test]
    fn identical_forms_are_equal() {
        assert_eq!(sym_compare(&norm("x"), &norm("x")), SymCmp::Eq);
    }

    #[test]
    fn unrelated_variables_are_unknown() {
        // witnessed by assignments (n=0, m=1) and (n=1, m=0)
        assert_eq!(sym_compare(&norm("n"), &norm("m")), SymCmp::Unknown);
    }

    #[test]
    fn weak_ordering_on_scaled_variables() {
        assert_eq!(sym_compare(&norm("n"), &norm("2 * n")), SymCmp::Lt);
        assert!(!sym_lt_strict(&norm("n"), &norm("2 * n")));
    }

    #[test]
    fn comparison_agrees_with_evaluation() {
        // every decided comparison must hold under all nonnegative assignments
        let pairs = [
            ("n", "n + 8"),
            ("n + 1", "2 * n + 1"),
            ("m + n", "m + n + 4"),
            ("8", "16"),
            ("2 * k", "3 * k + 2"),
        ];
        for (a, b) in pairs {
            let (a, b) = (norm(a), norm(b));
            let cmp = sym_compare(&a, &b);
            for x in 0..5i64 {
                for y in 0..5i64 {
                    let mut asg = BTreeMap::new();
                    asg.insert("n".to_string(), x);
                    asg.insert("m".to_string(), y);
                    asg.insert("k".to_string(), x + y);
                    let (va, vb) = (a.eval(&asg), b.eval(&asg));
                    match cmp {
                        SymCmp::Lt => assert!(va <= vb),
                        SymCmp::Eq => assert_eq!(va, vb),
                        SymCmp::Gt => assert!(va >= vb),
                        SymCmp::Unknown => {}
                    }
                }
            }
        }
    }
}
