//! Name resolution and type annotation.
//!
//! After this pass every expression carries its `ctype`, implicit integer
//! widenings are explicit `Cast` nodes, and everything outside the supported
//! subset has been rejected. `int`/`unsigned` spellings are already
//! canonicalized to fixed-width types by the parser.

use std::collections::HashMap;

use crate::c::ast::*;
use crate::diag::{Code, Diagnostic, Result};
use crate::loc::SourceLoc;

struct Resolver<'a> {
    structs: HashMap<String, &'a CStructDef>,
    // name -> (params, ret)
    functions: HashMap<String, (Vec<CType>, CType)>,
    scopes: Vec<HashMap<String, CType>>,
    current_ret: CType,
}

pub fn resolve(mut program: CProgram) -> Result<CProgram> {
    check_declarations(&program)?;
    let structs: HashMap<String, &CStructDef> = program
        .structs
        .iter()
        .map(|s| (s.name.clone(), s))
        .collect();
    let mut functions = HashMap::new();
    for e in &program.externs {
        functions.insert(
            e.name.clone(),
            (e.params.iter().map(|(_, t)| t.clone()).collect(), e.ret.clone()),
        );
    }
    for f in &program.functions {
        functions.insert(
            f.name.clone(),
            (f.params.iter().map(|(_, t)| t.clone()).collect(), f.ret.clone()),
        );
    }

    let mut bodies: Vec<Vec<CStmt>> = Vec::new();
    for f in &program.functions {
        let mut r = Resolver {
            structs: structs.clone(),
            functions: functions.clone(),
            scopes: vec![HashMap::new()],
            current_ret: f.ret.clone(),
        };
        for (name, ty) in &f.params {
            r.declare(name, ty.clone());
        }
        let mut body = f.body.clone();
        r.block(&mut body)?;
        bodies.push(body);
    }
    for (f, body) in program.functions.iter_mut().zip(bodies) {
        f.body = body;
    }
    Ok(program)
}

/// Declaration-level checks: unique names, well-formed types, no value-field
/// recursion among structs.
fn check_declarations(program: &CProgram) -> Result<()> {
    let mut struct_names = HashMap::new();
    for s in &program.structs {
        if struct_names.insert(s.name.clone(), ()).is_some() {
            return Err(Diagnostic::error(
                Code::Name,
                s.loc.clone(),
                format!("duplicate struct definition: {}", s.name),
            ));
        }
    }
    let mut fn_names = HashMap::new();
    for (name, loc) in program
        .externs
        .iter()
        .map(|e| (&e.name, &e.loc))
        .chain(program.functions.iter().map(|f| (&f.name, &f.loc)))
    {
        if fn_names.insert(name.clone(), ()).is_some() {
            return Err(Diagnostic::error(
                Code::Name,
                loc.clone(),
                format!("duplicate function declaration: {}", name),
            ));
        }
    }

    let struct_set: HashMap<&str, &CStructDef> = program
        .structs
        .iter()
        .map(|s| (s.name.as_str(), s))
        .collect();
    for s in &program.structs {
        let mut fields = HashMap::new();
        for (fname, fty) in &s.fields {
            if fields.insert(fname.clone(), ()).is_some() {
                return Err(Diagnostic::error(
                    Code::Name,
                    s.loc.clone(),
                    format!("duplicate field {} in struct {}", fname, s.name),
                ));
            }
            check_type(fty, &s.loc, &struct_set)?;
            if matches!(fty, CType::Void) {
                return Err(Diagnostic::error(
                    Code::Type,
                    s.loc.clone(),
                    format!("field {} of struct {} has type void", fname, s.name),
                ));
            }
        }
    }
    // a struct may not contain itself by value
    for s in &program.structs {
        let mut stack = Vec::new();
        value_recursion(s, &struct_set, &mut stack, &s.loc)?;
    }
    for (params, ret, loc) in program
        .externs
        .iter()
        .map(|e| (&e.params, &e.ret, &e.loc))
        .chain(program.functions.iter().map(|f| (&f.params, &f.ret, &f.loc)))
    {
        check_type(ret, loc, &struct_set)?;
        let mut names = HashMap::new();
        for (pname, pty) in params {
            if names.insert(pname.clone(), ()).is_some() {
                return Err(Diagnostic::error(
                    Code::Name,
                    loc.clone(),
                    format!("duplicate parameter name: {}", pname),
                ));
            }
            check_type(pty, loc, &struct_set)?;
        }
    }
    Ok(())
}

fn value_recursion(
    s: &CStructDef,
    structs: &HashMap<&str, &CStructDef>,
    stack: &mut Vec<String>,
    loc: &SourceLoc,
) -> Result<()> {
    if stack.contains(&s.name) {
        return Err(Diagnostic::error(
            Code::Type,
            loc.clone(),
            format!("struct {} contains itself by value", s.name),
        ));
    }
    stack.push(s.name.clone());
    for (_, fty) in &s.fields {
        let mut t = fty;
        while let CType::Array(inner, _) = t {
            t = inner;
        }
        if let CType::Struct(name) = t {
            if let Some(inner) = structs.get(name.as_str()) {
                value_recursion(inner, structs, stack, loc)?;
            }
        }
    }
    stack.pop();
    Ok(())
}

fn check_type(ty: &CType, loc: &SourceLoc, structs: &HashMap<&str, &CStructDef>) -> Result<()> {
    match ty {
        CType::Base(_) | CType::Void => Ok(()),
        CType::Struct(name) => {
            if structs.contains_key(name.as_str()) {
                Ok(())
            } else {
                Err(Diagnostic::error(
                    Code::Name,
                    loc.clone(),
                    format!("unknown struct: {}", name),
                ))
            }
        }
        CType::Pointer(_) => {
            if pointer_depth(ty) > 2 {
                return Err(Diagnostic::error(
                    Code::Subset,
                    loc.clone(),
                    "pointers of depth greater than 2 are not supported",
                ));
            }
            check_type(ty.elem().unwrap(), loc, structs)
        }
        CType::Array(elem, _) => {
            if matches!(**elem, CType::Void | CType::Function(..)) {
                return Err(Diagnostic::error(
                    Code::Type,
                    loc.clone(),
                    "invalid array element type",
                ));
            }
            check_type(elem, loc, structs)
        }
        CType::Function(..) => Err(Diagnostic::error(
            Code::Subset,
            loc.clone(),
            "function pointers are not supported",
        )),
    }
}

fn pointer_depth(ty: &CType) -> u32 {
    match ty {
        CType::Pointer(e) => 1 + pointer_depth(e),
        _ => 0,
    }
}

impl<'a> Resolver<'a> {
    fn declare(&mut self, name: &str, ty: CType) {
        self.scopes
            .last_mut()
            .expect("scope stack is never empty")
            .insert(name.to_string(), ty);
    }

    fn lookup(&self, name: &str) -> Option<&CType> {
        self.scopes.iter().rev().find_map(|s| s.get(name))
    }

    fn block(&mut self, stmts: &mut [CStmt]) -> Result<()> {
        for s in stmts {
            self.stmt(s)?;
        }
        Ok(())
    }

    fn scoped_block(&mut self, stmts: &mut [CStmt]) -> Result<()> {
        self.scopes.push(HashMap::new());
        let r = self.block(stmts);
        self.scopes.pop();
        r
    }

    fn stmt(&mut self, stmt: &mut CStmt) -> Result<()> {
        match stmt {
            CStmt::Return(value, loc) => match (&self.current_ret, value) {
                (CType::Void, None) => Ok(()),
                (CType::Void, Some(_)) => Err(Diagnostic::error(
                    Code::Type,
                    loc.clone(),
                    "void function returns a value",
                )),
                (ret, Some(e)) => {
                    let ret = ret.clone();
                    self.expr(e, Some(&ret))?;
                    Ok(())
                }
                (_, None) => Err(Diagnostic::error(
                    Code::Type,
                    loc.clone(),
                    "non-void function returns without a value",
                )),
            },
            CStmt::If {
                cond,
                then_body,
                else_body,
                ..
            } => {
                self.expr(cond, Some(&CType::Base(CBase::Bool)))?;
                self.scoped_block(then_body)?;
                self.scoped_block(else_body)
            }
            CStmt::While { cond, body, .. } => {
                self.expr(cond, Some(&CType::Base(CBase::Bool)))?;
                self.scoped_block(body)
            }
            CStmt::Assign { lhs, rhs, loc } => {
                self.check_lvalue(lhs)?;
                let lty = self.expr(lhs, None)?;
                if lty.is_array() {
                    return Err(Diagnostic::error(
                        Code::Type,
                        loc.clone(),
                        "arrays cannot be assigned as a whole",
                    ));
                }
                self.expr(rhs, Some(&lty))?;
                Ok(())
            }
            CStmt::ExprStmt(e) => {
                self.expr(e, None)?;
                Ok(())
            }
            CStmt::DeclVar {
                ctype, name, init, loc,
            } => {
                let structs: HashMap<&str, &CStructDef> =
                    self.structs.iter().map(|(k, v)| (k.as_str(), *v)).collect();
                check_type(ctype, loc, &structs)?;
                if matches!(ctype, CType::Void) {
                    return Err(Diagnostic::error(
                        Code::Type,
                        loc.clone(),
                        "variable cannot have type void",
                    ));
                }
                if ctype.is_pointer() && init.is_none() {
                    return Err(Diagnostic::error(
                        Code::Subset,
                        loc.clone(),
                        "uninitialized pointer declarations are not supported",
                    ));
                }
                if let Some(e) = init {
                    self.expr(e, Some(ctype))?;
                }
                self.declare(name, ctype.clone());
                Ok(())
            }
            CStmt::DeclArray {
                elem, name, len, inits, loc,
            } => {
                let structs: HashMap<&str, &CStructDef> =
                    self.structs.iter().map(|(k, v)| (k.as_str(), *v)).collect();
                check_type(elem, loc, &structs)?;
                if let Some(es) = inits {
                    if es.len() as u64 > *len {
                        return Err(Diagnostic::error(
                            Code::Type,
                            loc.clone(),
                            "too many array initializers",
                        ));
                    }
                    let elem = elem.clone();
                    for e in es {
                        self.expr(e, Some(&elem))?;
                    }
                }
                self.declare(name, CType::array(elem.clone(), *len));
                Ok(())
            }
            CStmt::Memset {
                dst, val, count, elem, loc,
            } => {
                let dty = self.expr(dst, None)?;
                let ety = self.mem_elem(&dty, elem, loc)?;
                self.expr(count, Some(&CType::Base(CBase::U32)))?;
                self.require_unsigned_int(count)?;
                self.expr(val, Some(&ety))?;
                // memset writes bytes; wider elements only support zeroing
                if ety.base().map(|b| b.bits() > 8).unwrap_or(true)
                    && !matches!(val.kind, CExprKind::IntLit(0))
                {
                    return Err(Diagnostic::error(
                        Code::Subset,
                        loc.clone(),
                        "memset on elements wider than one byte only supports value 0",
                    ));
                }
                Ok(())
            }
            CStmt::Memcpy {
                dst, src, count, elem, loc,
            } => {
                let dty = self.expr(dst, None)?;
                let ety = self.mem_elem(&dty, elem, loc)?;
                let sty = self.expr(src, None)?;
                let selem = sty.elem().cloned().ok_or_else(|| {
                    Diagnostic::error(Code::Type, loc.clone(), "memcpy source is not a pointer")
                })?;
                if selem != ety {
                    return Err(Diagnostic::error(
                        Code::Type,
                        loc.clone(),
                        "memcpy source and destination element types differ",
                    ));
                }
                self.expr(count, Some(&CType::Base(CBase::U32)))?;
                self.require_unsigned_int(count)?;
                Ok(())
            }
            CStmt::VoidCast(name, loc) => match self.lookup(name) {
                Some(t) if t.is_pointer() || t.is_array() => Ok(()),
                Some(_) => Err(Diagnostic::error(
                    Code::Type,
                    loc.clone(),
                    format!("(void){} expects a pointer or array variable", name),
                )),
                None => Err(Diagnostic::error(
                    Code::Name,
                    loc.clone(),
                    format!("unknown variable: {}", name),
                )),
            },
            CStmt::Seq(stmts) => self.block(stmts),
        }
    }

    fn mem_elem(
        &self,
        dst_ty: &CType,
        elem: &Option<CType>,
        loc: &SourceLoc,
    ) -> Result<CType> {
        let dst_elem = dst_ty.elem().cloned().ok_or_else(|| {
            Diagnostic::error(
                Code::Type,
                loc.clone(),
                "memset/memcpy destination is not a pointer or array",
            )
        })?;
        match elem {
            Some(t) => {
                if *t != dst_elem {
                    return Err(Diagnostic::error(
                        Code::Type,
                        loc.clone(),
                        format!(
                            "sizeof({}) does not match destination element type {}",
                            t, dst_elem
                        ),
                    ));
                }
                Ok(dst_elem)
            }
            None => {
                // a bare byte count is only unambiguous for one-byte elements
                match dst_elem.base() {
                    Some(b) if b.bits() <= 8 => Ok(dst_elem),
                    _ => Err(Diagnostic::error(
                        Code::Subset,
                        loc.clone(),
                        "byte counts require sizeof(t) when elements are wider than one byte",
                    )),
                }
            }
        }
    }

    fn check_lvalue(&self, e: &CExpr) -> Result<()> {
        match &e.kind {
            CExprKind::Var(_) | CExprKind::Index(..) | CExprKind::Deref(_) | CExprKind::Field(..) => {
                Ok(())
            }
            _ => Err(Diagnostic::error(
                Code::Type,
                e.loc.clone(),
                "assignment target is not an lvalue",
            )),
        }
    }

    fn require_unsigned_int(&self, e: &CExpr) -> Result<()> {
        match e.ty().base() {
            Some(b) if b.is_unsigned() => Ok(()),
            _ => Err(Diagnostic::error(
                Code::Subset,
                e.loc.clone(),
                format!("expected an unsigned integer, found {}", e.ty()),
            )),
        }
    }

    /// Resolve an expression, annotating its type. When `expected` is given,
    /// unconstrained literals adopt it and implicit widenings are inserted;
    /// an unresolvable mismatch is a type error.
    fn expr(&mut self, e: &mut CExpr, expected: Option<&CType>) -> Result<CType> {
        let ty = self.infer(e, expected)?;
        e.ctype = Some(ty.clone());
        if let Some(want) = expected {
            if let Some(adjusted) = self.reconcile(e, &ty, want) {
                return Ok(adjusted);
            }
            return Err(Diagnostic::error(
                Code::Type,
                e.loc.clone(),
                format!("expected {}, found {}", want, ty),
            ));
        }
        Ok(ty)
    }

    /// Returns the reconciled type when `have` is acceptable where `want` is
    /// expected, inserting a widening cast on `e` if needed.
    fn reconcile(&self, e: &mut CExpr, have: &CType, want: &CType) -> Option<CType> {
        if have == want {
            return Some(have.clone());
        }
        // array-to-pointer decay
        if let (CType::Array(a, _), CType::Pointer(p)) = (have, want) {
            if a == p {
                return Some(have.clone());
            }
        }
        // implicit widening between same-signedness integers
        if let (Some(fb), Some(tb)) = (have.base(), want.base()) {
            if fb.is_integer()
                && tb.is_integer()
                && fb.is_unsigned() == tb.is_unsigned()
                && tb.bits() > fb.bits()
            {
                let inner = std::mem::replace(
                    e,
                    CExpr::new(CExprKind::IntLit(0), SourceLoc::synthetic()),
                );
                let loc = inner.loc.clone();
                *e = CExpr {
                    kind: CExprKind::Cast(want.clone(), Box::new(inner)),
                    ctype: Some(want.clone()),
                    loc,
                };
                return Some(want.clone());
            }
        }
        None
    }

    fn infer(&mut self, e: &mut CExpr, expected: Option<&CType>) -> Result<CType> {
        let loc = e.loc.clone();
        match &mut e.kind {
            CExprKind::IntLit(v) => {
                let ty = match expected {
                    Some(CType::Base(b)) if b.is_integer() => CType::Base(*b),
                    _ => CType::Base(CBase::U32),
                };
                let base = ty.base().unwrap();
                if !literal_fits(*v, base) {
                    return Err(Diagnostic::error(
                        Code::Type,
                        loc,
                        format!("literal {} does not fit in {}", v, base.c_name()),
                    ));
                }
                Ok(ty)
            }
            CExprKind::BoolLit(_) => Ok(CType::Base(CBase::Bool)),
            CExprKind::Var(name) => match self.lookup(name) {
                Some(t) => Ok(t.clone()),
                None => Err(Diagnostic::error(
                    Code::Name,
                    loc,
                    format!("unknown variable: {}", name),
                )),
            },
            CExprKind::Index(base, idx) => {
                let bty = self.expr(base, None)?;
                let elem = bty.elem().cloned().ok_or_else(|| {
                    Diagnostic::error(
                        Code::Type,
                        loc.clone(),
                        format!("cannot index into {}", bty),
                    )
                })?;
                let ity = self.expr(idx, None)?;
                match ity.base() {
                    Some(b) if b.is_unsigned() => {}
                    _ => {
                        return Err(Diagnostic::error(
                            Code::Subset,
                            idx.loc.clone(),
                            format!("array indices must be unsigned, found {}", ity),
                        ))
                    }
                }
                Ok(elem)
            }
            CExprKind::Field(base, fname) => {
                let bty = self.expr(base, None)?;
                let CType::Struct(sname) = &bty else {
                    return Err(Diagnostic::error(
                        Code::Type,
                        loc,
                        format!("field access on non-struct type {}", bty),
                    ));
                };
                let def = self.structs.get(sname).ok_or_else(|| {
                    Diagnostic::error(Code::Name, loc.clone(), format!("unknown struct: {}", sname))
                })?;
                def.fields
                    .iter()
                    .find(|(n, _)| n == fname)
                    .map(|(_, t)| t.clone())
                    .ok_or_else(|| {
                        Diagnostic::error(
                            Code::Name,
                            loc,
                            format!("struct {} has no field {}", sname, fname),
                        )
                    })
            }
            CExprKind::Call(fname, args) => {
                let (params, ret) = self
                    .functions
                    .get(fname.as_str())
                    .cloned()
                    .ok_or_else(|| {
                        Diagnostic::error(
                            Code::Name,
                            loc.clone(),
                            format!("unknown function: {}", fname),
                        )
                    })?;
                if args.len() != params.len() {
                    return Err(Diagnostic::error(
                        Code::Type,
                        loc,
                        format!(
                            "{} expects {} arguments, found {}",
                            fname,
                            params.len(),
                            args.len()
                        ),
                    ));
                }
                for (arg, pty) in args.iter_mut().zip(params.iter()) {
                    self.expr(arg, Some(pty))?;
                }
                Ok(ret)
            }
            CExprKind::Deref(inner) => {
                let ity = self.expr(inner, None)?;
                match &ity {
                    CType::Pointer(elem) => Ok((**elem).clone()),
                    _ => Err(Diagnostic::error(
                        Code::Type,
                        loc,
                        format!("cannot dereference {}", ity),
                    )),
                }
            }
            CExprKind::Malloc { count, elem, .. } => {
                let structs: HashMap<&str, &CStructDef> =
                    self.structs.iter().map(|(k, v)| (k.as_str(), *v)).collect();
                check_type(elem, &loc, &structs)?;
                let elem = elem.clone();
                self.expr(count, Some(&CType::Base(CBase::U32)))?;
                self.require_unsigned_int(count)?;
                Ok(CType::pointer(elem))
            }
            CExprKind::AddrOf(inner) => {
                self.check_lvalue(inner)?;
                if matches!(inner.kind, CExprKind::Index(..)) {
                    return Err(Diagnostic::error(
                        Code::Subset,
                        loc,
                        "&a[i] is not supported; write pointer arithmetic as a + i",
                    ));
                }
                let ity = self.expr(inner, None)?;
                match &ity {
                    CType::Base(_) | CType::Struct(_) => Ok(CType::pointer(ity)),
                    _ => Err(Diagnostic::error(
                        Code::Subset,
                        loc,
                        format!("cannot take the address of a value of type {}", ity),
                    )),
                }
            }
            CExprKind::BinOp(op, lhs, rhs) => {
                let op = *op;
                if op.is_logical() {
                    self.expr(lhs, Some(&CType::Base(CBase::Bool)))?;
                    self.expr(rhs, Some(&CType::Base(CBase::Bool)))?;
                    return Ok(CType::Base(CBase::Bool));
                }
                let lty = self.expr(lhs, None)?;
                // pointer arithmetic: pointer/array + unsigned offset
                if (lty.is_pointer() || lty.is_array()) && matches!(op, BinOp::Add | BinOp::Sub) {
                    let elem = lty.elem().cloned().unwrap();
                    self.expr(rhs, Some(&CType::Base(CBase::U32)))?;
                    self.require_unsigned_int(rhs)?;
                    return Ok(CType::pointer(elem));
                }
                if lty.is_pointer() || lty.is_array() {
                    return Err(Diagnostic::error(
                        Code::Subset,
                        loc,
                        format!("operator {} is not supported on pointers", op.c_token()),
                    ));
                }
                if op.is_comparison() {
                    self.expr(rhs, Some(&lty))?;
                    let b = lty.base().ok_or_else(|| {
                        Diagnostic::error(
                            Code::Type,
                            loc.clone(),
                            format!("cannot compare values of type {}", lty),
                        )
                    })?;
                    if matches!(b, CBase::Bool) && !matches!(op, BinOp::Eq | BinOp::Ne) {
                        return Err(Diagnostic::error(
                            Code::Type,
                            loc,
                            "ordering comparisons require integer operands",
                        ));
                    }
                    return Ok(CType::Base(CBase::Bool));
                }
                // arithmetic, bitwise, shifts: integer operands
                let lb = lty.base().filter(|b| b.is_integer()).ok_or_else(|| {
                    Diagnostic::error(
                        Code::Type,
                        loc.clone(),
                        format!("operator {} expects integers, found {}", op.c_token(), lty),
                    )
                })?;
                if matches!(op, BinOp::Shl | BinOp::Shr) {
                    self.expr(rhs, Some(&CType::Base(CBase::U32)))?;
                    self.require_unsigned_int(rhs)?;
                    return Ok(CType::Base(lb));
                }
                self.expr(rhs, Some(&lty))?;
                Ok(CType::Base(lb))
            }
            CExprKind::UnOp(op, inner) => match op {
                UnOp::Not => {
                    self.expr(inner, Some(&CType::Base(CBase::Bool)))?;
                    Ok(CType::Base(CBase::Bool))
                }
                UnOp::Neg => {
                    let ity = self.expr(inner, None)?;
                    match ity.base() {
                        Some(b) if b.is_signed() => Ok(ity),
                        _ => Err(Diagnostic::error(
                            Code::Type,
                            loc,
                            format!("unary minus requires a signed integer, found {}", ity),
                        )),
                    }
                }
                UnOp::BitNot => {
                    let ity = self.expr(inner, expected)?;
                    match ity.base() {
                        Some(b) if b.is_integer() => Ok(ity),
                        _ => Err(Diagnostic::error(
                            Code::Type,
                            loc,
                            format!("bitwise not requires an integer, found {}", ity),
                        )),
                    }
                }
            },
            CExprKind::Cast(ty, inner) => {
                let target = ty.clone();
                let structs: HashMap<&str, &CStructDef> =
                    self.structs.iter().map(|(k, v)| (k.as_str(), *v)).collect();
                check_type(&target, &loc, &structs)?;
                let ity = self.expr(inner, None)?;
                let ok = match (&ity, &target) {
                    (CType::Base(from), CType::Base(to)) => {
                        (from.is_integer() && to.is_integer())
                            || (*from == CBase::Bool && to.is_integer())
                            || from == to
                    }
                    (a, b) if a == b => true,
                    _ => false,
                };
                if !ok {
                    return Err(Diagnostic::error(
                        Code::Subset,
                        loc,
                        format!("cast from {} to {} is not supported", ity, target),
                    ));
                }
                Ok(target)
            }
            CExprKind::StructInit { name, fields } => {
                let Some(CType::Struct(sname)) = expected else {
                    return Err(Diagnostic::error(
                        Code::Type,
                        loc,
                        "brace initializer in a non-struct context",
                    ));
                };
                let sname = sname.clone();
                let def = self
                    .structs
                    .get(&sname)
                    .map(|d| d.fields.clone())
                    .ok_or_else(|| {
                        Diagnostic::error(
                            Code::Name,
                            loc.clone(),
                            format!("unknown struct: {}", sname),
                        )
                    })?;
                *name = Some(sname.clone());
                let designated = fields.iter().any(|(n, _)| n.is_some());
                if designated && fields.iter().any(|(n, _)| n.is_none()) {
                    return Err(Diagnostic::error(
                        Code::Parse,
                        loc,
                        "mixed designated and positional initializers",
                    ));
                }
                if !designated && fields.len() > def.len() {
                    return Err(Diagnostic::error(
                        Code::Type,
                        loc,
                        "too many struct initializers",
                    ));
                }
                let mut seen = Vec::new();
                for (i, (fname, fexpr)) in fields.iter_mut().enumerate() {
                    let (field_name, field_ty) = match fname {
                        Some(n) => {
                            let t = def.iter().find(|(dn, _)| dn == n).ok_or_else(|| {
                                Diagnostic::error(
                                    Code::Name,
                                    fexpr.loc.clone(),
                                    format!("struct {} has no field {}", sname, n),
                                )
                            })?;
                            (n.clone(), t.1.clone())
                        }
                        None => {
                            let (dn, dt) = &def[i];
                            (dn.clone(), dt.clone())
                        }
                    };
                    if seen.contains(&field_name) {
                        return Err(Diagnostic::error(
                            Code::Type,
                            fexpr.loc.clone(),
                            format!("field {} initialized twice", field_name),
                        ));
                    }
                    seen.push(field_name);
                    self.expr(fexpr, Some(&field_ty))?;
                }
                Ok(CType::Struct(sname))
            }
        }
    }
}

fn literal_fits(v: u64, b: CBase) -> bool {
    match b {
        CBase::Bool => v <= 1,
        CBase::U8 => v <= u8::MAX as u64,
        CBase::U16 => v <= u16::MAX as u64,
        CBase::U32 => v <= u32::MAX as u64,
        CBase::U64 => true,
        CBase::I8 => v <= i8::MAX as u64,
        CBase::I16 => v <= i16::MAX as u64,
        CBase::I32 => v <= i32::MAX as u64,
        CBase::I64 => v <= i64::MAX as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c::lex::tokenize;
    use crate::c::parse::parse_program;

    fn run(src: &str) -> Result<CProgram> {
        resolve(parse_program(tokenize("t.c", src).unwrap())?)
    }

    fn ok(src: &str) -> CProgram {
        run(src).expect("expected the program to resolve")
    }

    fn err(src: &str) -> Diagnostic {
        run(src).expect_err("expected resolution to fail")
    }

    fn assert_all_typed(stmts: &[CStmt]) {
        fn expr(e: &CExpr) {
            assert!(e.ctype.is_some(), "untyped expression: {:?}", e.kind);
            match &e.kind {
                CExprKind::Index(a, b) | CExprKind::BinOp(_, a, b) => {
                    expr(a);
                    expr(b);
                }
                CExprKind::Field(a, _)
                | CExprKind::Deref(a)
                | CExprKind::AddrOf(a)
                | CExprKind::UnOp(_, a)
                | CExprKind::Cast(_, a) => expr(a),
                CExprKind::Call(_, args) => args.iter().for_each(expr),
                CExprKind::Malloc { count, .. } => expr(count),
                CExprKind::StructInit { fields, .. } => fields.iter().for_each(|(_, e)| expr(e)),
                _ => {}
            }
        }
        for s in stmts {
            match s {
                CStmt::Return(Some(e), _) | CStmt::ExprStmt(e) => expr(e),
                CStmt::If {
                    cond,
                    then_body,
                    else_body,
                    ..
                } => {
                    expr(cond);
                    assert_all_typed(then_body);
                    assert_all_typed(else_body);
                }
                CStmt::While { cond, body, .. } => {
                    expr(cond);
                    assert_all_typed(body);
                }
                CStmt::Assign { lhs, rhs, .. } => {
                    expr(lhs);
                    expr(rhs);
                }
                CStmt::DeclVar { init: Some(e), .. } => expr(e),
                CStmt::Memset {
                    dst, val, count, ..
                } => {
                    expr(dst);
                    expr(val);
                    expr(count);
                }
                CStmt::Memcpy {
                    dst, src, count, ..
                } => {
                    expr(dst);
                    expr(src);
                    expr(count);
                }
                _ => {}
            }
        }
    }

    #[test]
    fn pointer_arithmetic_types_as_pointer() {
        let p = ok("void f(void) { uint8_t abcd[32] = { 0 }; uint8_t *a = abcd + 0; }");
        match &p.functions[0].body[1] {
            CStmt::DeclVar { init: Some(e), .. } => {
                assert_eq!(*e.ty(), CType::pointer(CType::Base(CBase::U8)));
                if let CExprKind::BinOp(_, lhs, _) = &e.kind {
                    assert_eq!(*lhs.ty(), CType::array(CType::Base(CBase::U8), 32));
                } else {
                    panic!("expected pointer addition");
                }
            }
            other => panic!("unexpected stmt: {:?}", other),
        }
    }

    #[test]
    fn every_expression_is_typed() {
        let p = ok(r#"
struct s { uint32_t n; uint8_t *data; };
uint32_t get(struct s *p, uint32_t i) {
    if (i < p->n) { return (uint32_t)p->data[i]; }
    return 0;
}
"#);
        for f in &p.functions {
            assert_all_typed(&f.body);
        }
    }

    #[test]
    fn resolution_is_deterministic() {
        let src = "uint8_t f(uint8_t x) { uint8_t y = x; return y; }";
        let mut a = ok(src);
        let mut b = ok(src);
        a.normalize_locs();
        b.normalize_locs();
        assert_eq!(a, b);
    }

    #[test]
    fn literals_adopt_context_type() {
        let p = ok("void f(void) { uint8_t x = 7; }");
        match &p.functions[0].body[0] {
            CStmt::DeclVar { init: Some(e), .. } => assert_eq!(*e.ty(), CType::Base(CBase::U8)),
            other => panic!("unexpected stmt: {:?}", other),
        }
    }

    #[test]
    fn unconstrained_literal_defaults_to_u32() {
        let p = ok("void g(uint64_t v); void f(void) { uint64_t x = (uint64_t)(3 + 4); g(x); }");
        match &p.functions[0].body[0] {
            CStmt::DeclVar { init: Some(e), .. } => {
                if let CExprKind::Cast(_, inner) = &e.kind {
                    assert_eq!(*inner.ty(), CType::Base(CBase::U32));
                } else {
                    panic!("expected cast");
                }
            }
            other => panic!("unexpected stmt: {:?}", other),
        }
    }

    #[test]
    fn implicit_widening_becomes_a_cast() {
        let p = ok("void f(uint8_t x) { uint32_t y = x; }");
        match &p.functions[0].body[0] {
            CStmt::DeclVar { init: Some(e), .. } => {
                assert!(matches!(e.kind, CExprKind::Cast(_, _)));
                assert_eq!(*e.ty(), CType::Base(CBase::U32));
            }
            other => panic!("unexpected stmt: {:?}", other),
        }
    }

    #[test]
    fn narrowing_requires_explicit_cast() {
        let e = err("void f(uint32_t x) { uint8_t y = x; }");
        assert_eq!(e.code, Code::Type);
    }

    #[test]
    fn signed_indices_are_rejected() {
        let e = err("uint8_t f(uint8_t *p, int i) { return p[i]; }");
        assert_eq!(e.code, Code::Subset);
    }

    #[test]
    fn unknown_function_is_a_name_error() {
        let e = err("void f(void) { g(); }");
        assert_eq!(e.code, Code::Name);
    }

    #[test]
    fn pointer_casts_between_unrelated_types_are_rejected() {
        let e = err("void f(uint8_t *p) { uint32_t *q = (uint32_t*)p; }");
        assert_eq!(e.code, Code::Subset);
    }

    #[test]
    fn conditions_must_be_bool() {
        let e = err("void f(uint32_t n) { if (n) { } }");
        assert_eq!(e.code, Code::Type);
    }

    #[test]
    fn uninitialized_pointer_is_rejected() {
        let e = err("void f(void) { uint8_t *p; }");
        assert_eq!(e.code, Code::Subset);
    }

    #[test]
    fn address_of_index_is_rejected() {
        let e = err("void f(uint8_t *p) { uint8_t *q = &p[3]; }");
        assert_eq!(e.code, Code::Subset);
    }

    #[test]
    fn mutually_recursive_structs_resolve() {
        ok(r#"
struct a { struct b *other; };
struct b { struct a *other; };
void f(void) { }
"#);
    }

    #[test]
    fn value_recursion_is_rejected() {
        let e = err("struct a { struct a inner; };");
        assert_eq!(e.code, Code::Type);
    }

    #[test]
    fn triple_pointers_are_rejected() {
        let e = err("void f(uint8_t ***p) { }");
        assert_eq!(e.code, Code::Subset);
    }

    #[test]
    fn malloc_element_type_must_match() {
        let e = err("void f(void) { uint8_t *p = malloc(4 * sizeof(uint32_t)); }");
        assert_eq!(e.code, Code::Type);
    }
}
