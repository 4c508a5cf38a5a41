//! Abstract syntax of the supported C subset.
//!
//! Parsing produces this tree with empty type annotations; `resolve` fills in
//! the `ctype` of every expression and canonicalizes integer spellings.

use std::fmt;

use crate::loc::SourceLoc;

/// Fixed-width scalar types. `int`/`unsigned` spellings canonicalize to the
/// 32-bit variants during resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CBase {
    U8,
    U16,
    U32,
    U64,
    I8,
    I16,
    I32,
    I64,
    Bool,
}

impl CBase {
    pub fn is_unsigned(self) -> bool {
        matches!(self, CBase::U8 | CBase::U16 | CBase::U32 | CBase::U64)
    }

    pub fn is_signed(self) -> bool {
        matches!(self, CBase::I8 | CBase::I16 | CBase::I32 | CBase::I64)
    }

    pub fn is_integer(self) -> bool {
        self != CBase::Bool
    }

    /// Width in bits; bool counts as 1.
    pub fn bits(self) -> u32 {
        match self {
            CBase::Bool => 1,
            CBase::U8 | CBase::I8 => 8,
            CBase::U16 | CBase::I16 => 16,
            CBase::U32 | CBase::I32 => 32,
            CBase::U64 | CBase::I64 => 64,
        }
    }

    pub fn c_name(self) -> &'static str {
        match self {
            CBase::U8 => "uint8_t",
            CBase::U16 => "uint16_t",
            CBase::U32 => "uint32_t",
            CBase::U64 => "uint64_t",
            CBase::I8 => "int8_t",
            CBase::I16 => "int16_t",
            CBase::I32 => "int32_t",
            CBase::I64 => "int64_t",
            CBase::Bool => "bool",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CType {
    Base(CBase),
    Void,
    Pointer(Box<CType>),
    Array(Box<CType>, u64),
    Struct(String),
    Function(Vec<CType>, Box<CType>),
}

impl CType {
    pub fn pointer(elem: CType) -> CType {
        CType::Pointer(Box::new(elem))
    }

    pub fn array(elem: CType, len: u64) -> CType {
        CType::Array(Box::new(elem), len)
    }

    pub fn is_pointer(&self) -> bool {
        matches!(self, CType::Pointer(_))
    }

    pub fn is_array(&self) -> bool {
        matches!(self, CType::Array(..))
    }

    /// Element type of a pointer or array.
    pub fn elem(&self) -> Option<&CType> {
        match self {
            CType::Pointer(e) => Some(e),
            CType::Array(e, _) => Some(e),
            _ => None,
        }
    }

    pub fn base(&self) -> Option<CBase> {
        match self {
            CType::Base(b) => Some(*b),
            _ => None,
        }
    }
}

impl fmt::Display for CType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CType::Base(b) => write!(f, "{}", b.c_name()),
            CType::Void => write!(f, "void"),
            CType::Pointer(e) => write!(f, "{}*", e),
            CType::Array(e, n) => write!(f, "{}[{}]", e, n),
            CType::Struct(s) => write!(f, "struct {}", s),
            CType::Function(ps, r) => {
                write!(f, "{}(", r)?;
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}", p)?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
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

impl BinOp {
    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge
        )
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or)
    }

    /// +, -, * wrap at the operand width; the remaining integer ops map directly.
    pub fn is_wrapping(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Sub | BinOp::Mul)
    }

    pub fn c_token(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
            BinOp::And => "&&",
            BinOp::Or => "||",
            BinOp::BitAnd => "&",
            BinOp::BitOr => "|",
            BinOp::BitXor => "^",
            BinOp::Shl => "<<",
            BinOp::Shr => ">>",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnOp {
    Neg,
    Not,
    BitNot,
}

/// Expression node. `ctype` is `None` until resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct CExpr {
    pub kind: CExprKind,
    pub ctype: Option<CType>,
    pub loc: SourceLoc,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CExprKind {
    Var(String),
    Index(Box<CExpr>, Box<CExpr>),
    Field(Box<CExpr>, String),
    Call(String, Vec<CExpr>),
    Deref(Box<CExpr>),
    /// `malloc(count * sizeof(elem))` or `calloc(count, sizeof(elem))`; the
    /// flag records the calloc (zeroing) spelling.
    Malloc {
        count: Box<CExpr>,
        elem: CType,
        zeroed: bool,
    },
    AddrOf(Box<CExpr>),
    IntLit(u64),
    BoolLit(bool),
    BinOp(BinOp, Box<CExpr>, Box<CExpr>),
    UnOp(UnOp, Box<CExpr>),
    Cast(CType, Box<CExpr>),
    /// Brace initializer for a struct-typed declaration. The struct name is
    /// filled in from the declaration type during resolution; fields may be
    /// designated (`.f = e`) or positional.
    StructInit {
        name: Option<String>,
        fields: Vec<(Option<String>, CExpr)>,
    },
}

impl CExpr {
    pub fn new(kind: CExprKind, loc: SourceLoc) -> Self {
        CExpr {
            kind,
            ctype: None,
            loc,
        }
    }

    pub fn ty(&self) -> &CType {
        self.ctype
            .as_ref()
            .expect("expression queried before resolution")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CStmt {
    Return(Option<CExpr>, SourceLoc),
    If {
        cond: CExpr,
        then_body: Vec<CStmt>,
        else_body: Vec<CStmt>,
        loc: SourceLoc,
    },
    While {
        cond: CExpr,
        body: Vec<CStmt>,
        loc: SourceLoc,
    },
    Assign {
        lhs: CExpr,
        rhs: CExpr,
        loc: SourceLoc,
    },
    ExprStmt(CExpr),
    DeclVar {
        ctype: CType,
        name: String,
        init: Option<CExpr>,
        loc: SourceLoc,
    },
    DeclArray {
        elem: CType,
        name: String,
        len: u64,
        inits: Option<Vec<CExpr>>,
        loc: SourceLoc,
    },
    /// `memset(dst, val, count [* sizeof(elem)])`; `count` is in elements of
    /// `elem` when the sizeof form was used, otherwise in bytes.
    Memset {
        dst: CExpr,
        val: CExpr,
        count: CExpr,
        elem: Option<CType>,
        loc: SourceLoc,
    },
    Memcpy {
        dst: CExpr,
        src: CExpr,
        count: CExpr,
        elem: Option<CType>,
        loc: SourceLoc,
    },
    /// `(void)x;` — the split-tree reset hint.
    VoidCast(String, SourceLoc),
    /// Several statements produced by one source statement (`for` desugaring).
    Seq(Vec<CStmt>),
}

impl CStmt {
    pub fn loc(&self) -> &SourceLoc {
        match self {
            CStmt::Return(_, loc)
            | CStmt::If { loc, .. }
            | CStmt::While { loc, .. }
            | CStmt::Assign { loc, .. }
            | CStmt::DeclVar { loc, .. }
            | CStmt::DeclArray { loc, .. }
            | CStmt::Memset { loc, .. }
            | CStmt::Memcpy { loc, .. }
            | CStmt::VoidCast(_, loc) => loc,
            CStmt::ExprStmt(e) => &e.loc,
            CStmt::Seq(stmts) => stmts
                .first()
                .map(|s| s.loc())
                .expect("empty statement sequence"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CStructDef {
    pub name: String,
    pub fields: Vec<(String, CType)>,
    pub loc: SourceLoc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CFunction {
    pub name: String,
    pub params: Vec<(String, CType)>,
    pub ret: CType,
    pub body: Vec<CStmt>,
    pub loc: SourceLoc,
}

/// A function prototype with no body; definitions come from outside the unit
/// (test drivers link them in).
#[derive(Debug, Clone, PartialEq)]
pub struct CExtern {
    pub name: String,
    pub params: Vec<(String, CType)>,
    pub ret: CType,
    pub loc: SourceLoc,
}

/// One translation unit, in declaration order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CProgram {
    pub structs: Vec<CStructDef>,
    pub externs: Vec<CExtern>,
    pub functions: Vec<CFunction>,
}

impl CProgram {
    pub fn struct_def(&self, name: &str) -> Option<&CStructDef> {
        self.structs.iter().find(|s| s.name == name)
    }

    pub fn function(&self, name: &str) -> Option<&CFunction> {
        self.functions.iter().find(|f| f.name == name)
    }

    /// Reset every source location to the synthetic placeholder. Structural
    /// comparisons (round-trip, determinism) go through this first.
    pub fn normalize_locs(&mut self) {
        for s in &mut self.structs {
            s.loc = SourceLoc::synthetic();
        }
        for e in &mut self.externs {
            e.loc = SourceLoc::synthetic();
        }
        for f in &mut self.functions {
            f.loc = SourceLoc::synthetic();
            for s in &mut f.body {
                normalize_stmt(s);
            }
        }
    }
}

fn normalize_stmt(stmt: &mut CStmt) {
    match stmt {
        CStmt::Return(e, loc) => {
            *loc = SourceLoc::synthetic();
            if let Some(e) = e {
                normalize_expr(e);
            }
        }
        CStmt::If {
            cond,
            then_body,
            else_body,
            loc,
        } => {
            *loc = SourceLoc::synthetic();
            normalize_expr(cond);
            then_body.iter_mut().for_each(normalize_stmt);
            else_body.iter_mut().for_each(normalize_stmt);
        }
        CStmt::While { cond, body, loc } => {
            *loc = SourceLoc::synthetic();
            normalize_expr(cond);
            body.iter_mut().for_each(normalize_stmt);
        }
        CStmt::Assign { lhs, rhs, loc } => {
            *loc = SourceLoc::synthetic();
            normalize_expr(lhs);
            normalize_expr(rhs);
        }
        CStmt::ExprStmt(e) => normalize_expr(e),
        CStmt::DeclVar { init, loc, .. } => {
            *loc = SourceLoc::synthetic();
            if let Some(e) = init {
                normalize_expr(e);
            }
        }
        CStmt::DeclArray { inits, loc, .. } => {
            *loc = SourceLoc::synthetic();
            if let Some(es) = inits {
                es.iter_mut().for_each(normalize_expr);
            }
        }
        CStmt::Memset {
            dst,
            val,
            count,
            loc,
            ..
        } => {
            *loc = SourceLoc::synthetic();
            normalize_expr(dst);
            normalize_expr(val);
            normalize_expr(count);
        }
        CStmt::Memcpy {
            dst,
            src,
            count,
            loc,
            ..
        } => {
            *loc = SourceLoc::synthetic();
            normalize_expr(dst);
            normalize_expr(src);
            normalize_expr(count);
        }
        CStmt::VoidCast(_, loc) => *loc = SourceLoc::synthetic(),
        CStmt::Seq(stmts) => stmts.iter_mut().for_each(normalize_stmt),
    }
}

fn normalize_expr(e: &mut CExpr) {
    e.loc = SourceLoc::synthetic();
    match &mut e.kind {
        CExprKind::Var(_) | CExprKind::IntLit(_) | CExprKind::BoolLit(_) => {}
        CExprKind::Index(a, b) | CExprKind::BinOp(_, a, b) => {
            normalize_expr(a);
            normalize_expr(b);
        }
        CExprKind::Field(a, _)
        | CExprKind::Deref(a)
        | CExprKind::AddrOf(a)
        | CExprKind::UnOp(_, a)
        | CExprKind::Cast(_, a) => normalize_expr(a),
        CExprKind::Call(_, args) => args.iter_mut().for_each(normalize_expr),
        CExprKind::Malloc { count, .. } => normalize_expr(count),
        CExprKind::StructInit { fields, .. } => {
            fields.iter_mut().for_each(|(_, e)| normalize_expr(e))
        }
    }
}
