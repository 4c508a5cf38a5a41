//! Recursive-descent parser for the C subset.
//!
//! Syntactic sugar is lowered here: `->` becomes deref + field selection,
//! `x += e` / `x++` become plain assignments, `for` loops become `while`
//! loops, and array parameters decay to pointers. `malloc`/`calloc` calls
//! must match the `N * sizeof(t)` discipline.

use crate::c::ast::*;
use crate::c::lex::{Tok, Token};
use crate::diag::{Code, Diagnostic, Result};
use crate::loc::SourceLoc;

pub struct Parser {
    toks: Vec<Token>,
    pos: usize,
    eof: SourceLoc,
}

const TYPE_KEYWORDS: &[&str] = &[
    "uint8_t", "uint16_t", "uint32_t", "uint64_t", "int8_t", "int16_t", "int32_t", "int64_t",
    "int", "unsigned", "bool", "void", "struct",
];

const RESERVED_STMT_KEYWORDS: &[&str] = &["goto", "switch", "do", "break", "continue", "union"];

impl Parser {
    pub fn new(toks: Vec<Token>) -> Self {
        let eof = toks
            .last()
            .map(|t| t.loc.clone())
            .unwrap_or_else(|| SourceLoc::new("<eof>", 1, 1));
        Parser { toks, pos: 0, eof }
    }

    fn loc(&self) -> SourceLoc {
        self.toks
            .get(self.pos)
            .map(|t| t.loc.clone())
            .unwrap_or_else(|| self.eof.clone())
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, n: usize) -> Option<&Tok> {
        self.toks.get(self.pos + n).map(|t| &t.tok)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> Diagnostic {
        let found = match self.peek() {
            Some(t) => format!("{:?}", t),
            None => "end of file".to_string(),
        };
        Diagnostic::error(
            Code::Parse,
            self.loc(),
            format!("expected {}, found {}", expected, found),
        )
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<SourceLoc> {
        let loc = self.loc();
        match self.peek() {
            Some(t) if *t == tok => {
                self.bump();
                Ok(loc)
            }
            _ => Err(self.error(expected)),
        }
    }

    fn eat(&mut self, tok: Tok) -> bool {
        if self.peek() == Some(&tok) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn ident(&mut self, expected: &str) -> Result<(String, SourceLoc)> {
        let loc = self.loc();
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.bump();
                Ok((s, loc))
            }
            _ => Err(self.error(expected)),
        }
    }

    fn is_ident(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(i)) if i == s)
    }

    fn at_type(&self) -> bool {
        matches!(self.peek(), Some(Tok::Ident(i)) if TYPE_KEYWORDS.contains(&i.as_str()))
    }

    // ------------------------------------------------------------------
    // Types
    // ------------------------------------------------------------------

    fn base_type(&mut self) -> Result<CType> {
        let (name, loc) = self.ident("a type name")?;
        let ty = match name.as_str() {
            "uint8_t" => CType::Base(CBase::U8),
            "uint16_t" => CType::Base(CBase::U16),
            "uint32_t" => CType::Base(CBase::U32),
            "uint64_t" => CType::Base(CBase::U64),
            "int8_t" => CType::Base(CBase::I8),
            "int16_t" => CType::Base(CBase::I16),
            "int32_t" | "int" => CType::Base(CBase::I32),
            "unsigned" => {
                // "unsigned" or "unsigned int"
                if self.is_ident("int") {
                    self.bump();
                }
                CType::Base(CBase::U32)
            }
            "bool" => CType::Base(CBase::Bool),
            "void" => CType::Void,
            "struct" => {
                let (s, _) = self.ident("a struct name")?;
                CType::Struct(s)
            }
            other => {
                return Err(Diagnostic::error(
                    Code::Parse,
                    loc,
                    format!("unknown type name: {}", other),
                ))
            }
        };
        Ok(ty)
    }

    /// A type with trailing pointer stars.
    fn full_type(&mut self) -> Result<CType> {
        let mut ty = self.base_type()?;
        while self.eat(Tok::Star) {
            ty = CType::pointer(ty);
        }
        Ok(ty)
    }

    // ------------------------------------------------------------------
    // Top level
    // ------------------------------------------------------------------

    pub fn program(&mut self) -> Result<CProgram> {
        let mut program = CProgram::default();
        while self.peek().is_some() {
            if self.is_ident("struct") && matches!(self.peek_at(2), Some(Tok::LBrace)) {
                program.structs.push(self.struct_def()?);
            } else {
                self.function_or_prototype(&mut program)?;
            }
        }
        Ok(program)
    }

    fn struct_def(&mut self) -> Result<CStructDef> {
        let loc = self.loc();
        self.bump(); // struct
        let (name, _) = self.ident("a struct name")?;
        self.expect(Tok::LBrace, "'{'")?;
        let mut fields = Vec::new();
        while !self.eat(Tok::RBrace) {
            let ty = self.full_type()?;
            let (fname, floc) = self.ident("a field name")?;
            let ty = if self.eat(Tok::LBracket) {
                let len = self.array_len(&floc)?;
                self.expect(Tok::RBracket, "']'")?;
                CType::array(ty, len)
            } else {
                ty
            };
            self.expect(Tok::Semi, "';'")?;
            fields.push((fname, ty));
        }
        self.expect(Tok::Semi, "';' after struct definition")?;
        Ok(CStructDef { name, fields, loc })
    }

    fn array_len(&mut self, loc: &SourceLoc) -> Result<u64> {
        match self.peek() {
            Some(Tok::Int(n)) if *n > 0 => {
                let n = *n;
                self.bump();
                Ok(n)
            }
            Some(Tok::Int(_)) => Err(Diagnostic::error(
                Code::Parse,
                loc.clone(),
                "array length must be a positive integer constant",
            )),
            _ => Err(Diagnostic::error(
                Code::Subset,
                self.loc(),
                "array length must be an integer constant (variable-length arrays are not supported)",
            )),
        }
    }

    fn function_or_prototype(&mut self, program: &mut CProgram) -> Result<()> {
        let loc = self.loc();
        let ret = self.full_type()?;
        let (name, _) = self.ident("a function name")?;
        self.expect(Tok::LParen, "'('")?;
        let params = self.params()?;
        if self.eat(Tok::Semi) {
            program.externs.push(CExtern {
                name,
                params,
                ret,
                loc,
            });
            return Ok(());
        }
        let body = self.block()?;
        program.functions.push(CFunction {
            name,
            params,
            ret,
            body,
            loc,
        });
        Ok(())
    }

    fn params(&mut self) -> Result<Vec<(String, CType)>> {
        let mut params = Vec::new();
        if self.eat(Tok::RParen) {
            return Ok(params);
        }
        if self.is_ident("void") && self.peek_at(1) == Some(&Tok::RParen) {
            self.bump();
            self.bump();
            return Ok(params);
        }
        loop {
            let ty = self.full_type()?;
            let (name, nloc) = self.ident("a parameter name")?;
            // array parameters decay to pointers
            let ty = if self.eat(Tok::LBracket) {
                if let Some(Tok::Int(_)) = self.peek() {
                    self.bump();
                }
                self.expect(Tok::RBracket, "']'")?;
                CType::pointer(ty)
            } else {
                ty
            };
            if matches!(ty, CType::Void) {
                return Err(Diagnostic::error(
                    Code::Parse,
                    nloc,
                    "parameter cannot have type void",
                ));
            }
            params.push((name, ty));
            if self.eat(Tok::RParen) {
                break;
            }
            self.expect(Tok::Comma, "',' or ')'")?;
        }
        Ok(params)
    }

    // ------------------------------------------------------------------
    // Statements
    // ------------------------------------------------------------------

    fn block(&mut self) -> Result<Vec<CStmt>> {
        self.expect(Tok::LBrace, "'{'")?;
        let mut stmts = Vec::new();
        while !self.eat(Tok::RBrace) {
            Self::push_flattened(&mut stmts, self.stmt()?);
        }
        Ok(stmts)
    }

    fn stmt_or_block(&mut self) -> Result<Vec<CStmt>> {
        if self.peek() == Some(&Tok::LBrace) {
            self.block()
        } else {
            let mut stmts = Vec::new();
            Self::push_flattened(&mut stmts, self.stmt()?);
            Ok(stmts)
        }
    }

    /// Desugaring can produce transient `Seq` nodes; statement lists splice
    /// them so the final tree never contains one.
    fn push_flattened(out: &mut Vec<CStmt>, stmt: CStmt) {
        match stmt {
            CStmt::Seq(stmts) => {
                for s in stmts {
                    Self::push_flattened(out, s);
                }
            }
            s => out.push(s),
        }
    }

    fn stmt(&mut self) -> Result<CStmt> {
        let loc = self.loc();
        match self.peek() {
            Some(Tok::Ident(kw)) if RESERVED_STMT_KEYWORDS.contains(&kw.as_str()) => {
                Err(Diagnostic::error(
                    Code::Subset,
                    loc,
                    format!("'{}' is outside the supported C subset", kw),
                ))
            }
            Some(Tok::Ident(kw)) if kw == "return" => {
                self.bump();
                let value = if self.peek() == Some(&Tok::Semi) {
                    None
                } else {
                    Some(self.expr()?)
                };
                self.expect(Tok::Semi, "';'")?;
                Ok(CStmt::Return(value, loc))
            }
            Some(Tok::Ident(kw)) if kw == "if" => {
                self.bump();
                self.expect(Tok::LParen, "'('")?;
                let cond = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                let then_body = self.stmt_or_block()?;
                let else_body = if self.is_ident("else") {
                    self.bump();
                    if self.is_ident("if") {
                        vec![self.stmt()?]
                    } else {
                        self.stmt_or_block()?
                    }
                } else {
                    Vec::new()
                };
                Ok(CStmt::If {
                    cond,
                    then_body,
                    else_body,
                    loc,
                })
            }
            Some(Tok::Ident(kw)) if kw == "while" => {
                self.bump();
                self.expect(Tok::LParen, "'('")?;
                let cond = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                let body = self.stmt_or_block()?;
                Ok(CStmt::While { cond, body, loc })
            }
            Some(Tok::Ident(kw)) if kw == "for" => self.for_loop(loc),
            Some(Tok::LParen)
                if matches!(self.peek_at(1), Some(Tok::Ident(v)) if v == "void")
                    && self.peek_at(2) == Some(&Tok::RParen) =>
            {
                // `(void)x;` reset hint
                self.bump();
                self.bump();
                self.bump();
                let (name, _) = self.ident("a variable name")?;
                self.expect(Tok::Semi, "';'")?;
                Ok(CStmt::VoidCast(name, loc))
            }
            Some(Tok::Ident(kw)) if kw == "memset" || kw == "memcpy" => {
                let is_set = kw == "memset";
                self.bump();
                self.expect(Tok::LParen, "'('")?;
                let dst = self.expr()?;
                self.expect(Tok::Comma, "','")?;
                let second = self.expr()?;
                self.expect(Tok::Comma, "','")?;
                let (count, elem) = self.alloc_size_expr()?;
                self.expect(Tok::RParen, "')'")?;
                self.expect(Tok::Semi, "';'")?;
                Ok(if is_set {
                    CStmt::Memset {
                        dst,
                        val: second,
                        count,
                        elem,
                        loc,
                    }
                } else {
                    CStmt::Memcpy {
                        dst,
                        src: second,
                        count,
                        elem,
                        loc,
                    }
                })
            }
            Some(Tok::Ident(t)) if TYPE_KEYWORDS.contains(&t.as_str()) => self.decl(loc),
            _ => self.assign_or_expr_stmt(loc),
        }
    }

    fn for_loop(&mut self, loc: SourceLoc) -> Result<CStmt> {
        self.bump(); // for
        self.expect(Tok::LParen, "'('")?;
        let init = if self.peek() == Some(&Tok::Semi) {
            self.bump();
            None
        } else if self.at_type() {
            Some(self.decl(self.loc())?)
        } else {
            Some(self.assign_only(self.loc())?)
        };
        let cond = self.expr()?;
        self.expect(Tok::Semi, "';'")?;
        let step = if self.peek() == Some(&Tok::RParen) {
            None
        } else {
            Some(self.assign_no_semi(self.loc())?)
        };
        self.expect(Tok::RParen, "')'")?;
        let mut body = self.stmt_or_block()?;
        if let Some(step) = step {
            body.push(step);
        }
        let while_stmt = CStmt::While { cond, body, loc };
        Ok(match init {
            // the init declaration is hoisted directly before the loop; a
            // reused loop variable name simply shadows the earlier binding
            Some(init) => CStmt::Seq(vec![init, while_stmt]),
            None => while_stmt,
        })
    }

    fn decl(&mut self, loc: SourceLoc) -> Result<CStmt> {
        let ty = self.full_type()?;
        let (name, _) = self.ident("a variable name")?;
        if self.eat(Tok::LBracket) {
            let len = self.array_len(&loc)?;
            self.expect(Tok::RBracket, "']'")?;
            let inits = if self.eat(Tok::Assign) {
                self.expect(Tok::LBrace, "'{'")?;
                let mut es = Vec::new();
                while !self.eat(Tok::RBrace) {
                    es.push(self.expr()?);
                    if !self.eat(Tok::Comma) {
                        self.expect(Tok::RBrace, "'}' or ','")?;
                        break;
                    }
                }
                Some(es)
            } else {
                None
            };
            self.expect(Tok::Semi, "';'")?;
            return Ok(CStmt::DeclArray {
                elem: ty,
                name,
                len,
                inits,
                loc,
            });
        }
        let init = if self.eat(Tok::Assign) {
            if self.peek() == Some(&Tok::LBrace) {
                Some(self.struct_init()?)
            } else {
                Some(self.expr()?)
            }
        } else {
            None
        };
        self.expect(Tok::Semi, "';'")?;
        Ok(CStmt::DeclVar {
            ctype: ty,
            name,
            init,
            loc,
        })
    }

    fn struct_init(&mut self) -> Result<CExpr> {
        let loc = self.loc();
        self.expect(Tok::LBrace, "'{'")?;
        let mut fields = Vec::new();
        while !self.eat(Tok::RBrace) {
            let name = if self.eat(Tok::Dot) {
                let (f, _) = self.ident("a field name")?;
                self.expect(Tok::Assign, "'='")?;
                Some(f)
            } else {
                None
            };
            fields.push((name, self.expr()?));
            if !self.eat(Tok::Comma) {
                self.expect(Tok::RBrace, "'}' or ','")?;
                break;
            }
        }
        Ok(CExpr::new(CExprKind::StructInit { name: None, fields }, loc))
    }

    fn assign_or_expr_stmt(&mut self, loc: SourceLoc) -> Result<CStmt> {
        let stmt = self.assign_no_semi(loc)?;
        self.expect(Tok::Semi, "';'")?;
        Ok(stmt)
    }

    fn assign_only(&mut self, loc: SourceLoc) -> Result<CStmt> {
        let stmt = self.assign_no_semi(loc.clone())?;
        self.expect(Tok::Semi, "';'")?;
        match &stmt {
            CStmt::Assign { .. } => Ok(stmt),
            _ => Err(Diagnostic::error(Code::Parse, loc, "expected an assignment")),
        }
    }

    fn assign_no_semi(&mut self, loc: SourceLoc) -> Result<CStmt> {
        // prefix increment/decrement
        if matches!(self.peek(), Some(Tok::PlusPlus | Tok::MinusMinus)) {
            let op = if self.peek() == Some(&Tok::PlusPlus) {
                BinOp::Add
            } else {
                BinOp::Sub
            };
            self.bump();
            let lhs = self.unary()?;
            return Ok(self.incr_assign(lhs, op, loc));
        }
        let lhs = self.expr()?;
        match self.peek() {
            Some(Tok::Assign) => {
                self.bump();
                let rhs = self.expr()?;
                Ok(CStmt::Assign { lhs, rhs, loc })
            }
            Some(Tok::PlusAssign) | Some(Tok::MinusAssign) | Some(Tok::StarAssign) => {
                let op = match self.peek() {
                    Some(Tok::PlusAssign) => BinOp::Add,
                    Some(Tok::MinusAssign) => BinOp::Sub,
                    _ => BinOp::Mul,
                };
                self.bump();
                let rhs = self.expr()?;
                let rloc = rhs.loc.clone();
                let combined = CExpr::new(
                    CExprKind::BinOp(op, Box::new(lhs.clone()), Box::new(rhs)),
                    rloc,
                );
                Ok(CStmt::Assign {
                    lhs,
                    rhs: combined,
                    loc,
                })
            }
            Some(Tok::PlusPlus) | Some(Tok::MinusMinus) => {
                let op = if self.peek() == Some(&Tok::PlusPlus) {
                    BinOp::Add
                } else {
                    BinOp::Sub
                };
                self.bump();
                Ok(self.incr_assign(lhs, op, loc))
            }
            _ => Ok(CStmt::ExprStmt(lhs)),
        }
    }

    fn incr_assign(&self, lhs: CExpr, op: BinOp, loc: SourceLoc) -> CStmt {
        let one = CExpr::new(CExprKind::IntLit(1), loc.clone());
        let rhs = CExpr::new(
            CExprKind::BinOp(op, Box::new(lhs.clone()), Box::new(one)),
            loc.clone(),
        );
        CStmt::Assign { lhs, rhs, loc }
    }

    // ------------------------------------------------------------------
    // Expressions (precedence climbing)
    // ------------------------------------------------------------------

    pub fn expr(&mut self) -> Result<CExpr> {
        self.binary(0)
    }

    fn binop_at(&self, level: u8) -> Option<BinOp> {
        let t = self.peek()?;
        let op = match (level, t) {
            (0, Tok::PipePipe) => BinOp::Or,
            (1, Tok::AmpAmp) => BinOp::And,
            (2, Tok::Pipe) => BinOp::BitOr,
            (3, Tok::Caret) => BinOp::BitXor,
            (4, Tok::Amp) => BinOp::BitAnd,
            (5, Tok::EqEq) => BinOp::Eq,
            (5, Tok::NotEq) => BinOp::Ne,
            (6, Tok::Lt) => BinOp::Lt,
            (6, Tok::Le) => BinOp::Le,
            (6, Tok::Gt) => BinOp::Gt,
            (6, Tok::Ge) => BinOp::Ge,
            (7, Tok::Shl) => BinOp::Shl,
            (7, Tok::Shr) => BinOp::Shr,
            (8, Tok::Plus) => BinOp::Add,
            (8, Tok::Minus) => BinOp::Sub,
            (9, Tok::Star) => BinOp::Mul,
            (9, Tok::Slash) => BinOp::Div,
            (9, Tok::Percent) => BinOp::Rem,
            _ => return None,
        };
        Some(op)
    }

    fn binary(&mut self, level: u8) -> Result<CExpr> {
        if level > 9 {
            return self.unary();
        }
        let mut lhs = self.binary(level + 1)?;
        while let Some(op) = self.binop_at(level) {
            let loc = self.loc();
            self.bump();
            let rhs = self.binary(level + 1)?;
            lhs = CExpr::new(CExprKind::BinOp(op, Box::new(lhs), Box::new(rhs)), loc);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<CExpr> {
        let loc = self.loc();
        match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                let e = self.unary()?;
                Ok(CExpr::new(CExprKind::UnOp(UnOp::Neg, Box::new(e)), loc))
            }
            Some(Tok::Bang) => {
                self.bump();
                let e = self.unary()?;
                Ok(CExpr::new(CExprKind::UnOp(UnOp::Not, Box::new(e)), loc))
            }
            Some(Tok::Tilde) => {
                self.bump();
                let e = self.unary()?;
                Ok(CExpr::new(CExprKind::UnOp(UnOp::BitNot, Box::new(e)), loc))
            }
            Some(Tok::Star) => {
                self.bump();
                let e = self.unary()?;
                Ok(CExpr::new(CExprKind::Deref(Box::new(e)), loc))
            }
            Some(Tok::Amp) => {
                self.bump();
                let e = self.unary()?;
                Ok(CExpr::new(CExprKind::AddrOf(Box::new(e)), loc))
            }
            Some(Tok::LParen)
                if matches!(self.peek_at(1), Some(Tok::Ident(t)) if TYPE_KEYWORDS.contains(&t.as_str())) =>
            {
                self.bump();
                let ty = self.full_type()?;
                self.expect(Tok::RParen, "')'")?;
                if matches!(ty, CType::Void) {
                    return Err(Diagnostic::error(
                        Code::Parse,
                        loc,
                        "cast to void is only allowed as a statement",
                    ));
                }
                let e = self.unary()?;
                Ok(CExpr::new(CExprKind::Cast(ty, Box::new(e)), loc))
            }
            _ => self.postfix(),
        }
    }

    fn postfix(&mut self) -> Result<CExpr> {
        let mut e = self.primary()?;
        loop {
            let loc = self.loc();
            match self.peek() {
                Some(Tok::LBracket) => {
                    self.bump();
                    let idx = self.expr()?;
                    self.expect(Tok::RBracket, "']'")?;
                    e = CExpr::new(CExprKind::Index(Box::new(e), Box::new(idx)), loc);
                }
                Some(Tok::Dot) => {
                    self.bump();
                    let (f, _) = self.ident("a field name")?;
                    e = CExpr::new(CExprKind::Field(Box::new(e), f), loc);
                }
                Some(Tok::Arrow) => {
                    self.bump();
                    let (f, _) = self.ident("a field name")?;
                    let deref = CExpr::new(CExprKind::Deref(Box::new(e)), loc.clone());
                    e = CExpr::new(CExprKind::Field(Box::new(deref), f), loc);
                }
                _ => return Ok(e),
            }
        }
    }

    fn primary(&mut self) -> Result<CExpr> {
        let loc = self.loc();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.bump();
                Ok(CExpr::new(CExprKind::IntLit(n), loc))
            }
            Some(Tok::Ident(name)) => {
                if name == "true" || name == "false" {
                    self.bump();
                    return Ok(CExpr::new(CExprKind::BoolLit(name == "true"), loc));
                }
                if name == "sizeof" {
                    return Err(Diagnostic::error(
                        Code::Subset,
                        loc,
                        "sizeof is only allowed inside malloc/calloc/mem* size expressions",
                    ));
                }
                self.bump();
                if self.peek() == Some(&Tok::LParen) {
                    self.bump();
                    if name == "malloc" || name == "calloc" {
                        return self.alloc_call(&name, loc);
                    }
                    let mut args = Vec::new();
                    if !self.eat(Tok::RParen) {
                        loop {
                            args.push(self.expr()?);
                            if self.eat(Tok::RParen) {
                                break;
                            }
                            self.expect(Tok::Comma, "',' or ')'")?;
                        }
                    }
                    return Ok(CExpr::new(CExprKind::Call(name, args), loc));
                }
                Ok(CExpr::new(CExprKind::Var(name), loc))
            }
            Some(Tok::LParen) => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            _ => Err(self.error("an expression")),
        }
    }

    /// `malloc(N * sizeof(t))`, `malloc(sizeof(t))`, or `calloc(N, sizeof(t))`;
    /// the opening paren has been consumed.
    fn alloc_call(&mut self, name: &str, loc: SourceLoc) -> Result<CExpr> {
        if name == "calloc" {
            let count = self.binary(8)?; // no top-level '*' in the count
            self.expect(Tok::Comma, "','")?;
            let elem = self.sizeof_type(&loc)?;
            self.expect(Tok::RParen, "')'")?;
            return Ok(CExpr::new(
                CExprKind::Malloc {
                    count: Box::new(count),
                    elem,
                    zeroed: true,
                },
                loc,
            ));
        }
        let (count, elem) = self.alloc_size_expr()?;
        self.expect(Tok::RParen, "')'")?;
        match elem {
            Some(elem) => Ok(CExpr::new(
                CExprKind::Malloc {
                    count: Box::new(count),
                    elem,
                    zeroed: false,
                },
                loc,
            )),
            None => Err(Diagnostic::error(
                Code::Subset,
                loc,
                "malloc size must be expressed as a number of elements: N * sizeof(t)",
            )),
        }
    }

    /// Parse `f1 * f2 * ... [* sizeof(t)]`, returning the element count and
    /// the sizeof type when present.
    fn alloc_size_expr(&mut self) -> Result<(CExpr, Option<CType>)> {
        if self.is_ident("sizeof") {
            let loc = self.loc();
            let ty = self.sizeof_type(&loc)?;
            let one = CExpr::new(CExprKind::IntLit(1), loc);
            return Ok((one, Some(ty)));
        }
        let mut count = self.unary()?; // one multiplicative operand
        let mut elem = None;
        while self.eat(Tok::Star) {
            if self.is_ident("sizeof") {
                let loc = self.loc();
                elem = Some(self.sizeof_type(&loc)?);
                break;
            }
            let loc = self.loc();
            let rhs = self.unary()?;
            count = CExpr::new(
                CExprKind::BinOp(BinOp::Mul, Box::new(count), Box::new(rhs)),
                loc,
            );
        }
        Ok((count, elem))
    }

    fn sizeof_type(&mut self, loc: &SourceLoc) -> Result<CType> {
        if !self.is_ident("sizeof") {
            return Err(Diagnostic::error(
                Code::Subset,
                loc.clone(),
                "allocation size must end with sizeof(t)",
            ));
        }
        self.bump();
        self.expect(Tok::LParen, "'('")?;
        if !self.at_type() {
            return Err(Diagnostic::error(
                Code::Subset,
                self.loc(),
                "sizeof is only supported on type names, not expressions",
            ));
        }
        let ty = self.full_type()?;
        self.expect(Tok::RParen, "')'")?;
        Ok(ty)
    }
}

/// Parse a token stream into an unresolved program.
pub fn parse_program(toks: Vec<Token>) -> Result<CProgram> {
    Parser::new(toks).program()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c::lex::tokenize;

    fn parse(src: &str) -> CProgram {
        parse_program(tokenize("t.c", src).unwrap()).unwrap()
    }

    fn parse_err(src: &str) -> Diagnostic {
        match tokenize("t.c", src).and_then(parse_program) {
            Ok(_) => panic!("expected a parse error"),
            Err(e) => e,
        }
    }

    #[test]
    fn array_declaration_with_zero_init() {
        let p = parse("void f(void) { uint8_t abcd[32] = { 0 }; }");
        match &p.functions[0].body[0] {
            CStmt::DeclArray {
                elem, name, len, inits, ..
            } => {
                assert_eq!(*elem, CType::Base(CBase::U8));
                assert_eq!(name, "abcd");
                assert_eq!(*len, 32);
                assert_eq!(inits.as_ref().unwrap().len(), 1);
            }
            other => panic!("unexpected statement: {:?}", other),
        }
    }

    #[test]
    fn array_parameters_decay_to_pointers() {
        let p = parse("void f(int x[4]) { }");
        assert_eq!(
            p.functions[0].params[0].1,
            CType::pointer(CType::Base(CBase::I32))
        );
    }

    #[test]
    fn struct_definition_with_pointer_field() {
        let p = parse("struct s { uint8_t *data; };");
        assert_eq!(p.structs[0].name, "s");
        assert_eq!(
            p.structs[0].fields[0],
            ("data".to_string(), CType::pointer(CType::Base(CBase::U8)))
        );
    }

    #[test]
    fn arrow_desugars_to_deref_field() {
        let p = parse("struct s { uint8_t v; }; uint8_t f(struct s *p) { return p->v; }");
        match &p.functions[0].body[0] {
            CStmt::Return(Some(e), _) => match &e.kind {
                CExprKind::Field(base, f) => {
                    assert_eq!(f, "v");
                    assert!(matches!(base.kind, CExprKind::Deref(_)));
                }
                other => panic!("unexpected expr: {:?}", other),
            },
            other => panic!("unexpected stmt: {:?}", other),
        }
    }

    #[test]
    fn for_loop_desugars_to_decl_plus_while() {
        let p = parse("void f(void) { for (uint32_t i = 0; i < 4; i++) { } }");
        let body = &p.functions[0].body;
        assert!(matches!(body[0], CStmt::DeclVar { .. }));
        match &body[1] {
            CStmt::While { body, .. } => {
                assert!(matches!(body.last(), Some(CStmt::Assign { .. })))
            }
            other => panic!("unexpected stmt: {:?}", other),
        }
    }

    #[test]
    fn compound_assignment_desugars() {
        let p = parse("void f(void) { uint32_t x = 0; x += 2; }");
        match &p.functions[0].body[1] {
            CStmt::Assign { rhs, .. } => {
                assert!(matches!(rhs.kind, CExprKind::BinOp(BinOp::Add, _, _)))
            }
            other => panic!("unexpected stmt: {:?}", other),
        }
    }

    #[test]
    fn malloc_requires_sizeof() {
        let e = parse_err("void f(void) { uint8_t *p = malloc(16); }");
        assert_eq!(e.code, Code::Subset);
    }

    #[test]
    fn malloc_with_sizeof_parses() {
        let p = parse("void f(void) { uint8_t *p = malloc(16 * sizeof(uint8_t)); }");
        match &p.functions[0].body[0] {
            CStmt::DeclVar { init: Some(e), .. } => match &e.kind {
                CExprKind::Malloc { elem, zeroed, .. } => {
                    assert_eq!(*elem, CType::Base(CBase::U8));
                    assert!(!zeroed);
                }
                other => panic!("unexpected expr: {:?}", other),
            },
            other => panic!("unexpected stmt: {:?}", other),
        }
    }

    #[test]
    fn calloc_parses_as_zeroed_malloc() {
        let p = parse("void f(void) { uint32_t *p = calloc(8, sizeof(uint32_t)); }");
        match &p.functions[0].body[0] {
            CStmt::DeclVar { init: Some(e), .. } => {
                assert!(matches!(e.kind, CExprKind::Malloc { zeroed: true, .. }))
            }
            other => panic!("unexpected stmt: {:?}", other),
        }
    }

    #[test]
    fn sizeof_expression_is_rejected() {
        let e = parse_err("void f(uint32_t x) { uint8_t *p = malloc(4 * sizeof(x)); }");
        assert_eq!(e.code, Code::Subset);
    }

    #[test]
    fn goto_is_a_subset_error() {
        let e = parse_err("void f(void) { goto end; }");
        assert_eq!(e.code, Code::Subset);
    }

    #[test]
    fn void_cast_statement_parses() {
        let p = parse("void f(uint8_t *b) { (void)b; }");
        assert!(matches!(&p.functions[0].body[0], CStmt::VoidCast(n, _) if n == "b"));
    }

    #[test]
    fn prototypes_are_externs() {
        let p = parse("void print_u8(uint8_t x);");
        assert_eq!(p.externs.len(), 1);
        assert_eq!(p.externs[0].name, "print_u8");
    }

    #[test]
    fn designated_struct_initializer() {
        let p = parse(
            "struct s { uint8_t *data; };\nvoid f(uint8_t *x) { struct s st = { .data = x }; }",
        );
        match &p.functions[0].body[0] {
            CStmt::DeclVar { init: Some(e), .. } => match &e.kind {
                CExprKind::StructInit { fields, .. } => {
                    assert_eq!(fields[0].0.as_deref(), Some("data"))
                }
                other => panic!("unexpected expr: {:?}", other),
            },
            other => panic!("unexpected stmt: {:?}", other),
        }
    }
}
