//! Abstract syntax of the emitted Rust subset.
//!
//! The expression surface is a closed allowlist: translation needs outside it
//! must extend the AST explicitly, which keeps the no-unsafe output invariant
//! checkable by construction.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::loc::SourceLoc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RustBase {
    U8,
    U16,
    U32,
    U64,
    I8,
    I16,
    I32,
    I64,
    Usize,
    Bool,
}

impl RustBase {
    pub fn name(self) -> &'static str {
        match self {
            RustBase::U8 => "u8",
            RustBase::U16 => "u16",
            RustBase::U32 => "u32",
            RustBase::U64 => "u64",
            RustBase::I8 => "i8",
            RustBase::I16 => "i16",
            RustBase::I32 => "i32",
            RustBase::I64 => "i64",
            RustBase::Usize => "usize",
            RustBase::Bool => "bool",
        }
    }

    pub fn is_unsigned(self) -> bool {
        matches!(
            self,
            RustBase::U8 | RustBase::U16 | RustBase::U32 | RustBase::U64 | RustBase::Usize
        )
    }
}

/// A lifetime name without the leading tick; `_` is the elided lifetime.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lifetime(pub String);

impl Lifetime {
    pub fn a() -> Self {
        Lifetime("a".to_string())
    }

    pub fn elided() -> Self {
        Lifetime("_".to_string())
    }

    pub fn render(&self) -> String {
        format!("'{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RustType {
    Base(RustBase),
    Unit,
    Array(Box<RustType>, u64),
    BorrowedSlice {
        elem: Box<RustType>,
        mutable: bool,
        lifetime: Option<Lifetime>,
    },
    BoxedSlice(Box<RustType>),
    Function(Vec<RustType>, Box<RustType>),
    Named(String, Option<Lifetime>),
    Tuple(Vec<RustType>),
}

impl RustType {
    pub fn slice(elem: RustType) -> RustType {
        RustType::BorrowedSlice {
            elem: Box::new(elem),
            mutable: false,
            lifetime: None,
        }
    }

    pub fn mut_slice(elem: RustType) -> RustType {
        RustType::BorrowedSlice {
            elem: Box::new(elem),
            mutable: true,
            lifetime: None,
        }
    }

    pub fn boxed_slice(elem: RustType) -> RustType {
        RustType::BoxedSlice(Box::new(elem))
    }

    pub fn array(elem: RustType, len: u64) -> RustType {
        RustType::Array(Box::new(elem), len)
    }

    pub fn is_borrowed_slice(&self) -> bool {
        matches!(self, RustType::BorrowedSlice { .. })
    }

    /// Element type of slices, boxes, and arrays.
    pub fn elem(&self) -> Option<&RustType> {
        match self {
            RustType::Array(e, _) => Some(e),
            RustType::BorrowedSlice { elem, .. } => Some(elem),
            RustType::BoxedSlice(e) => Some(e),
            _ => None,
        }
    }
}

/// Methods the translation is allowed to emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    SplitAt,
    SplitAtMut,
    Into,
    IntoBoxedSlice,
    Len,
    Clone,
    WrappingAdd,
    WrappingSub,
    WrappingMul,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::SplitAt => "split_at",
            Method::SplitAtMut => "split_at_mut",
            Method::Into => "into",
            Method::IntoBoxedSlice => "into_boxed_slice",
            Method::Len => "len",
            Method::Clone => "clone",
            Method::WrappingAdd => "wrapping_add",
            Method::WrappingSub => "wrapping_sub",
            Method::WrappingMul => "wrapping_mul",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RustBinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    And,
    Or,
    BitAnd,
    BitOr,
    BitXor,
    Shl,
    Shr,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl RustBinOp {
    pub fn token(self) -> &'static str {
        match self {
            RustBinOp::Add => "+",
            RustBinOp::Sub => "-",
            RustBinOp::Mul => "*",
            RustBinOp::Div => "/",
            RustBinOp::Rem => "%",
            RustBinOp::And => "&&",
            RustBinOp::Or => "||",
            RustBinOp::BitAnd => "&",
            RustBinOp::BitOr => "|",
            RustBinOp::BitXor => "^",
            RustBinOp::Shl => "<<",
            RustBinOp::Shr => ">>",
            RustBinOp::Eq => "==",
            RustBinOp::Ne => "!=",
            RustBinOp::Lt => "<",
            RustBinOp::Le => "<=",
            RustBinOp::Gt => ">",
            RustBinOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RustUnOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RustExpr {
    pub kind: RustExprKind,
    /// Originating C location, kept for checker diagnostics.
    pub loc: Option<SourceLoc>,
}

impl RustExpr {
    pub fn new(kind: RustExprKind) -> Self {
        RustExpr { kind, loc: None }
    }

    pub fn at(kind: RustExprKind, loc: SourceLoc) -> Self {
        RustExpr {
            kind,
            loc: Some(loc),
        }
    }

    pub fn var(name: impl Into<String>) -> Self {
        RustExpr::new(RustExprKind::Var(name.into()))
    }

    pub fn unit() -> Self {
        RustExpr::new(RustExprKind::Unit)
    }

    pub fn int(value: u64) -> Self {
        RustExpr::new(RustExprKind::IntLit {
            value,
            suffix: None,
        })
    }

    pub fn int_suffixed(value: u64, suffix: RustBase) -> Self {
        RustExpr::new(RustExprKind::IntLit {
            value,
            suffix: Some(suffix),
        })
    }

    pub fn borrow(mutable: bool, e: RustExpr) -> Self {
        RustExpr::new(RustExprKind::Borrow {
            mutable,
            expr: Box::new(e),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RustExprKind {
    Var(String),
    Let {
        name: String,
        mutable: bool,
        ty: Option<RustType>,
        rhs: Box<RustExpr>,
        body: Box<RustExpr>,
    },
    /// `let (a, b) = rhs;` with per-name mut binders.
    LetTuple {
        names: Vec<(String, bool)>,
        rhs: Box<RustExpr>,
        body: Box<RustExpr>,
    },
    Unit,
    /// `[e; n]`
    ArrayRepeat(Box<RustExpr>, u64),
    /// `[e0, e1, ...]`
    SliceLiteral(Vec<RustExpr>),
    /// `vec![e; n].into_boxed_slice()`
    VecRepeatToBoxedSlice(Box<RustExpr>, Box<RustExpr>),
    /// `e[..]`
    ArrayToSlice(Box<RustExpr>),
    Borrow {
        mutable: bool,
        expr: Box<RustExpr>,
    },
    Deref(Box<RustExpr>),
    /// `Box::new(e)`
    BoxNew(Box<RustExpr>),
    Field(Box<RustExpr>, String),
    Index(Box<RustExpr>, Box<RustExpr>),
    AssignIndex(Box<RustExpr>, Box<RustExpr>, Box<RustExpr>),
    AssignField(Box<RustExpr>, String, Box<RustExpr>),
    AssignVar(String, Box<RustExpr>),
    StructLiteral(String, Vec<(String, RustExpr)>),
    Call(String, Vec<RustExpr>),
    MethodCall {
        recv: Box<RustExpr>,
        method: Method,
        args: Vec<RustExpr>,
    },
    TupleLiteral(Vec<RustExpr>),
    If {
        cond: Box<RustExpr>,
        then_body: Box<RustExpr>,
        else_body: Option<Box<RustExpr>>,
    },
    While {
        cond: Box<RustExpr>,
        body: Box<RustExpr>,
    },
    Return(Option<Box<RustExpr>>),
    IntLit {
        value: u64,
        suffix: Option<RustBase>,
    },
    BoolLit(bool),
    BinOp(RustBinOp, Box<RustExpr>, Box<RustExpr>),
    UnOp(RustUnOp, Box<RustExpr>),
    /// `e as T`
    Cast(Box<RustExpr>, RustType),
    /// Two unit-valued expressions in sequence.
    Seq(Box<RustExpr>, Box<RustExpr>),
}

/// Traits the derivation pass can attach, in canonical render order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DeriveTrait {
    Clone,
    Copy,
    PartialEq,
}

impl DeriveTrait {
    pub fn name(self) -> &'static str {
        match self {
            DeriveTrait::Clone => "Clone",
            DeriveTrait::Copy => "Copy",
            DeriveTrait::PartialEq => "PartialEq",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RustItem {
    Fn {
        name: String,
        /// Explicit lifetime parameter, when elision cannot tie the knot.
        lifetime: Option<Lifetime>,
        params: Vec<(String, RustType)>,
        ret: RustType,
        body: RustExpr,
    },
    StructDef {
        name: String,
        lifetime: Option<Lifetime>,
        fields: Vec<(String, RustType)>,
        derives: Vec<DeriveTrait>,
    },
}

impl RustItem {
    pub fn name(&self) -> &str {
        match self {
            RustItem::Fn { name, .. } => name,
            RustItem::StructDef { name, .. } => name,
        }
    }
}

/// Signature of a function declared but not defined in the unit; the harness
/// links in driver implementations for these.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternSig {
    pub name: String,
    pub params: Vec<RustType>,
    pub ret: RustType,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RustProgram {
    pub items: Vec<RustItem>,
    pub externs: Vec<ExternSig>,
}

impl RustProgram {
    pub fn struct_def(&self, name: &str) -> Option<(&[(String, RustType)], &Vec<DeriveTrait>)> {
        self.items.iter().find_map(|i| match i {
            RustItem::StructDef {
                name: n,
                fields,
                derives,
                ..
            } if n == name => Some((fields.as_slice(), derives)),
            _ => None,
        })
    }
}

/// Free (unbound) variable names of an expression. Function and struct names
/// live in a different namespace and are not included.
pub fn free_vars(e: &RustExpr) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect_free(e, &mut Vec::new(), &mut out);
    out
}

fn collect_free(e: &RustExpr, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    match &e.kind {
        RustExprKind::Var(x) => {
            if !bound.iter().any(|b| b == x) {
                out.insert(x.clone());
            }
        }
        RustExprKind::Let {
            name, rhs, body, ..
        } => {
            collect_free(rhs, bound, out);
            bound.push(name.clone());
            collect_free(body, bound, out);
            bound.pop();
        }
        RustExprKind::LetTuple { names, rhs, body } => {
            collect_free(rhs, bound, out);
            let n = names.len();
            for (name, _) in names {
                bound.push(name.clone());
            }
            collect_free(body, bound, out);
            for _ in 0..n {
                bound.pop();
            }
        }
        RustExprKind::Unit | RustExprKind::IntLit { .. } | RustExprKind::BoolLit(_) => {}
        RustExprKind::ArrayRepeat(inner, _)
        | RustExprKind::ArrayToSlice(inner)
        | RustExprKind::Deref(inner)
        | RustExprKind::BoxNew(inner)
        | RustExprKind::UnOp(_, inner)
        | RustExprKind::Cast(inner, _)
        | RustExprKind::Field(inner, _) => collect_free(inner, bound, out),
        RustExprKind::Borrow { expr, .. } => collect_free(expr, bound, out),
        RustExprKind::SliceLiteral(es) | RustExprKind::TupleLiteral(es) => {
            for e in es {
                collect_free(e, bound, out);
            }
        }
        RustExprKind::VecRepeatToBoxedSlice(a, b)
        | RustExprKind::Index(a, b)
        | RustExprKind::Seq(a, b)
        | RustExprKind::BinOp(_, a, b) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
        }
        RustExprKind::AssignIndex(a, b, c) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
            collect_free(c, bound, out);
        }
        RustExprKind::AssignField(a, _, b) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
        }
        RustExprKind::AssignVar(name, rhs) => {
            if !bound.iter().any(|b| b == name) {
                out.insert(name.clone());
            }
            collect_free(rhs, bound, out);
        }
        RustExprKind::StructLiteral(_, fields) => {
            for (_, e) in fields {
                collect_free(e, bound, out);
            }
        }
        RustExprKind::Call(_, args) => {
            for a in args {
                collect_free(a, bound, out);
            }
        }
        RustExprKind::MethodCall { recv, args, .. } => {
            collect_free(recv, bound, out);
            for a in args {
                collect_free(a, bound, out);
            }
        }
        RustExprKind::If {
            cond,
            then_body,
            else_body,
        } => {
            collect_free(cond, bound, out);
            collect_free(then_body, bound, out);
            if let Some(e) = else_body {
                collect_free(e, bound, out);
            }
        }
        RustExprKind::While { cond, body } => {
            collect_free(cond, bound, out);
            collect_free(body, bound, out);
        }
        RustExprKind::Return(Some(inner)) => collect_free(inner, bound, out),
        RustExprKind::Return(None) => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn var_is_free() {
        let vars = free_vars(&RustExpr::var("x"));
        assert_eq!(vars.into_iter().collect::<Vec<_>>(), vec!["x"]);
    }

    #[test]
    fn let_binder_removes_its_name() {
        // let x = y; x  ==> free = {y}
        let e = RustExpr::new(RustExprKind::Let {
            name: "x".into(),
            mutable: false,
            ty: None,
            rhs: Box::new(RustExpr::var("y")),
            body: Box::new(RustExpr::var("x")),
        });
        assert_eq!(
            free_vars(&e).into_iter().collect::<Vec<_>>(),
            vec!["y"]
        );
    }

    #[test]
    fn method_receiver_is_free() {
        let e = RustExpr::new(RustExprKind::MethodCall {
            recv: Box::new(RustExpr::var("a")),
            method: Method::SplitAt,
            args: vec![RustExpr::int(16)],
        });
        assert_eq!(free_vars(&e).into_iter().collect::<Vec<_>>(), vec!["a"]);
    }

    #[test]
    fn free_vars_matches_structural_oracle() {
        // oracle: name occurrences minus binder-scoped ones, computed on a
        // hand-enumerated fixture set
        let fix = RustExpr::new(RustExprKind::LetTuple {
            names: vec![("l".into(), false), ("r".into(), false)],
            rhs: Box::new(RustExpr::new(RustExprKind::MethodCall {
                recv: Box::new(RustExpr::var("base")),
                method: Method::SplitAtMut,
                args: vec![RustExpr::var("n")],
            })),
            body: Box::new(RustExpr::new(RustExprKind::AssignIndex(
                Box::new(RustExpr::var("r")),
                Box::new(RustExpr::int(0)),
                Box::new(RustExpr::var("v")),
            ))),
        });
        let got: Vec<String> = free_vars(&fix).into_iter().collect();
        assert_eq!(got, vec!["base", "n", "v"]);
    }
}
