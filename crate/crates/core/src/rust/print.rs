//! Deterministic rendering of the emitted Rust subset.
//!
//! Pure function of the AST: equal trees produce byte-identical text. Output
//! uses 4-space indentation and derive attributes in the canonical order
//! Clone, Copy, PartialEq.

use std::fmt::Write;

use crate::rust::ast::*;

pub fn pretty_print(program: &RustProgram) -> String {
    let mut out = String::new();
    let mut first = true;
    for item in &program.items {
        if !first {
            out.push('\n');
        }
        first = false;
        print_item(&mut out, item);
    }
    out
}

pub fn print_item(out: &mut String, item: &RustItem) {
    match item {
        RustItem::StructDef {
            name,
            lifetime,
            fields,
            derives,
        } => {
            if !derives.is_empty() {
                let mut ds = derives.clone();
                ds.sort();
                ds.dedup();
                let names: Vec<&str> = ds.iter().map(|d| d.name()).collect();
                let _ = writeln!(out, "#[derive({})]", names.join(", "));
            }
            let lt = match lifetime {
                Some(l) => format!("<{}>", l.render()),
                None => String::new(),
            };
            let _ = writeln!(out, "struct {}{} {{", name, lt);
            for (fname, fty) in fields {
                let _ = writeln!(out, "    {}: {},", fname, render_type(fty));
            }
            let _ = writeln!(out, "}}");
        }
        RustItem::Fn {
            name,
            lifetime,
            params,
            ret,
            body,
        } => {
            let lt = match lifetime {
                Some(l) => format!("<{}>", l.render()),
                None => String::new(),
            };
            let ps: Vec<String> = params
                .iter()
                .map(|(n, t)| format!("{}: {}", n, render_type(t)))
                .collect();
            let sig_ret = match ret {
                RustType::Unit => String::new(),
                other => format!(" -> {}", render_type(other)),
            };
            let _ = writeln!(out, "fn {}{}({}){} {{", name, lt, ps.join(", "), sig_ret);
            print_block(out, body, 1);
            let _ = writeln!(out, "}}");
        }
    }
}

pub fn render_type(ty: &RustType) -> String {
    match ty {
        RustType::Base(b) => b.name().to_string(),
        RustType::Unit => "()".to_string(),
        RustType::Array(elem, n) => format!("[{}; {}]", render_type(elem), n),
        RustType::BorrowedSlice {
            elem,
            mutable,
            lifetime,
        } => {
            let lt = match lifetime {
                Some(l) => format!("{} ", l.render()),
                None => String::new(),
            };
            let m = if *mutable { "mut " } else { "" };
            format!("&{}{}[{}]", lt, m, render_type(elem))
        }
        RustType::BoxedSlice(elem) => format!("Box<[{}]>", render_type(elem)),
        RustType::Function(params, ret) => {
            let ps: Vec<String> = params.iter().map(render_type).collect();
            format!("fn({}) -> {}", ps.join(", "), render_type(ret))
        }
        RustType::Named(name, lifetime) => match lifetime {
            Some(l) => format!("{}<{}>", name, l.render()),
            None => name.clone(),
        },
        RustType::Tuple(elems) => {
            let es: Vec<String> = elems.iter().map(render_type).collect();
            format!("({})", es.join(", "))
        }
    }
}

/// Render an expression as the body of a block: a chain of `let`s and
/// unit-valued statements followed by an optional tail expression.
fn print_block(out: &mut String, e: &RustExpr, depth: usize) {
    let pad = "    ".repeat(depth);
    match &e.kind {
        RustExprKind::Let {
            name,
            mutable,
            ty,
            rhs,
            body,
        } => {
            let m = if *mutable { "mut " } else { "" };
            let t = match ty {
                Some(t) => format!(": {}", render_type(t)),
                None => String::new(),
            };
            let _ = writeln!(out, "{}let {}{}{} = {};", pad, m, name, t, render(rhs, 0));
            print_block(out, body, depth);
        }
        RustExprKind::LetTuple { names, rhs, body } => {
            let ns: Vec<String> = names
                .iter()
                .map(|(n, m)| {
                    if *m {
                        format!("mut {}", n)
                    } else {
                        n.clone()
                    }
                })
                .collect();
            let _ = writeln!(out, "{}let ({}) = {};", pad, ns.join(", "), render(rhs, 0));
            print_block(out, body, depth);
        }
        RustExprKind::Seq(first, rest) => {
            print_stmt(out, first, depth);
            print_block(out, rest, depth);
        }
        RustExprKind::Unit => {}
        _ => print_stmt(out, e, depth),
    }
}

/// Render one unit statement (or a tail expression) on its own line.
fn print_stmt(out: &mut String, e: &RustExpr, depth: usize) {
    let pad = "    ".repeat(depth);
    match &e.kind {
        RustExprKind::If {
            cond,
            then_body,
            else_body,
        } => {
            let _ = writeln!(out, "{}if {} {{", pad, render(cond, 0));
            print_block(out, then_body, depth + 1);
            if let Some(else_body) = else_body {
                let _ = writeln!(out, "{}}} else {{", pad);
                print_block(out, else_body, depth + 1);
            }
            let _ = writeln!(out, "{}}}", pad);
        }
        RustExprKind::While { cond, body } => {
            let _ = writeln!(out, "{}while {} {{", pad, render(cond, 0));
            print_block(out, body, depth + 1);
            let _ = writeln!(out, "{}}}", pad);
        }
        RustExprKind::Return(value) => match value {
            Some(v) => {
                let _ = writeln!(out, "{}return {};", pad, render(v, 0));
            }
            None => {
                let _ = writeln!(out, "{}return;", pad);
            }
        },
        RustExprKind::AssignIndex(..) | RustExprKind::AssignField(..) | RustExprKind::AssignVar(..) => {
            let _ = writeln!(out, "{}{};", pad, render(e, 0));
        }
        // tail expression of a block
        _ => {
            let _ = writeln!(out, "{}{}", pad, render(e, 0));
        }
    }
}

// Binding strengths for parenthesization. Higher binds tighter.
const LVL_OR: u8 = 1;
const LVL_AND: u8 = 2;
const LVL_CMP: u8 = 3;
const LVL_BITOR: u8 = 4;
const LVL_BITXOR: u8 = 5;
const LVL_BITAND: u8 = 6;
const LVL_SHIFT: u8 = 7;
const LVL_ADD: u8 = 8;
const LVL_MUL: u8 = 9;
const LVL_CAST: u8 = 10;
const LVL_UNARY: u8 = 11;
const LVL_POSTFIX: u8 = 12;

fn op_level(op: RustBinOp) -> u8 {
    match op {
        RustBinOp::Or => LVL_OR,
        RustBinOp::And => LVL_AND,
        RustBinOp::Eq
        | RustBinOp::Ne
        | RustBinOp::Lt
        | RustBinOp::Le
        | RustBinOp::Gt
        | RustBinOp::Ge => LVL_CMP,
        RustBinOp::BitOr => LVL_BITOR,
        RustBinOp::BitXor => LVL_BITXOR,
        RustBinOp::BitAnd => LVL_BITAND,
        RustBinOp::Shl | RustBinOp::Shr => LVL_SHIFT,
        RustBinOp::Add | RustBinOp::Sub => LVL_ADD,
        RustBinOp::Mul | RustBinOp::Div | RustBinOp::Rem => LVL_MUL,
    }
}

/// Render an expression, wrapping in parentheses when its binding strength is
/// below what the context requires.
fn render(e: &RustExpr, min_level: u8) -> String {
    let (text, level) = render_with_level(e);
    if level < min_level {
        format!("({})", text)
    } else {
        text
    }
}

fn render_with_level(e: &RustExpr) -> (String, u8) {
    match &e.kind {
        RustExprKind::Var(x) => (x.clone(), LVL_POSTFIX + 1),
        RustExprKind::Unit => ("()".to_string(), LVL_POSTFIX + 1),
        RustExprKind::IntLit { value, suffix } => {
            let s = match suffix {
                Some(b) => format!("{}{}", value, b.name()),
                None => value.to_string(),
            };
            (s, LVL_POSTFIX + 1)
        }
        RustExprKind::BoolLit(b) => (b.to_string(), LVL_POSTFIX + 1),
        RustExprKind::ArrayRepeat(elem, n) => {
            (format!("[{}; {}]", render(elem, 0), n), LVL_POSTFIX + 1)
        }
        RustExprKind::SliceLiteral(es) => {
            let items: Vec<String> = es.iter().map(|e| render(e, 0)).collect();
            (format!("[{}]", items.join(", ")), LVL_POSTFIX + 1)
        }
        RustExprKind::TupleLiteral(es) => {
            let items: Vec<String> = es.iter().map(|e| render(e, 0)).collect();
            (format!("({})", items.join(", ")), LVL_POSTFIX + 1)
        }
        RustExprKind::VecRepeatToBoxedSlice(elem, n) => (
            format!(
                "vec![{}; {}].into_boxed_slice()",
                render(elem, 0),
                render(n, 0)
            ),
            LVL_POSTFIX,
        ),
        RustExprKind::ArrayToSlice(inner) => {
            (format!("{}[..]", render(inner, LVL_POSTFIX)), LVL_POSTFIX)
        }
        RustExprKind::Borrow { mutable, expr } => {
            let m = if *mutable { "&mut " } else { "&" };
            (format!("{}{}", m, render(expr, LVL_UNARY)), LVL_UNARY)
        }
        RustExprKind::Deref(inner) => {
            (format!("*{}", render(inner, LVL_UNARY)), LVL_UNARY)
        }
        RustExprKind::UnOp(op, inner) => {
            let sym = match op {
                RustUnOp::Neg => "-",
                RustUnOp::Not => "!",
            };
            (format!("{}{}", sym, render(inner, LVL_UNARY)), LVL_UNARY)
        }
        RustExprKind::BoxNew(inner) => {
            (format!("Box::new({})", render(inner, 0)), LVL_POSTFIX)
        }
        RustExprKind::Field(base, f) => {
            (format!("{}.{}", render(base, LVL_POSTFIX), f), LVL_POSTFIX)
        }
        RustExprKind::Index(base, idx) => (
            format!("{}[{}]", render(base, LVL_POSTFIX), render(idx, 0)),
            LVL_POSTFIX,
        ),
        RustExprKind::AssignIndex(base, idx, rhs) => (
            format!(
                "{}[{}] = {}",
                render(base, LVL_POSTFIX),
                render(idx, 0),
                render(rhs, 0)
            ),
            0,
        ),
        RustExprKind::AssignField(base, f, rhs) => (
            format!(
                "{}.{} = {}",
                render(base, LVL_POSTFIX),
                f,
                render(rhs, 0)
            ),
            0,
        ),
        RustExprKind::AssignVar(name, rhs) => (format!("{} = {}", name, render(rhs, 0)), 0),
        RustExprKind::StructLiteral(name, fields) => {
            let fs: Vec<String> = fields
                .iter()
                .map(|(n, e)| format!("{}: {}", n, render(e, 0)))
                .collect();
            (format!("{} {{ {} }}", name, fs.join(", ")), LVL_POSTFIX + 1)
        }
        RustExprKind::Call(name, args) => {
            let items: Vec<String> = args.iter().map(|e| render(e, 0)).collect();
            (format!("{}({})", name, items.join(", ")), LVL_POSTFIX)
        }
        RustExprKind::MethodCall { recv, method, args } => {
            let items: Vec<String> = args.iter().map(|e| render(e, 0)).collect();
            (
                format!(
                    "{}.{}({})",
                    render(recv, LVL_POSTFIX),
                    method.name(),
                    items.join(", ")
                ),
                LVL_POSTFIX,
            )
        }
        RustExprKind::BinOp(op, lhs, rhs) => {
            let level = op_level(*op);
            // comparisons are non-associative; everything else associates left
            let lmin = if level == LVL_CMP { level + 1 } else { level };
            let text = format!(
                "{} {} {}",
                render(lhs, lmin),
                op.token(),
                render(rhs, level + 1)
            );
            (text, level)
        }
        RustExprKind::Cast(inner, ty) => (
            format!("{} as {}", render(inner, LVL_CAST), render_type(ty)),
            LVL_CAST,
        ),
        // block-shaped expressions in value position render inline as blocks
        RustExprKind::Let { .. }
        | RustExprKind::LetTuple { .. }
        | RustExprKind::Seq(..)
        | RustExprKind::If { .. }
        | RustExprKind::While { .. }
        | RustExprKind::Return(_) => {
            let mut inner = String::new();
            print_block(&mut inner, e, 0);
            let body = inner
                .lines()
                .map(|l| format!("    {}", l))
                .collect::<Vec<_>>()
                .join("\n");
            (format!("{{\n{}\n}}", body), LVL_POSTFIX + 1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rust::ast::RustExprKind as K;

    fn fn_item(body: RustExpr) -> RustProgram {
        RustProgram {
            items: vec![RustItem::Fn {
                name: "f".into(),
                lifetime: None,
                params: vec![],
                ret: RustType::Unit,
                body,
            }],
            externs: vec![],
        }
    }

    #[test]
    fn boxed_slice_decl_renders_like_the_listing() {
        let e = RustExpr::new(K::Let {
            name: "x".into(),
            mutable: false,
            ty: None,
            rhs: Box::new(RustExpr::new(K::VecRepeatToBoxedSlice(
                Box::new(RustExpr::int_suffixed(0, RustBase::U8)),
                Box::new(RustExpr::int(16)),
            ))),
            body: Box::new(RustExpr::unit()),
        });
        let text = pretty_print(&fn_item(e));
        assert!(
            text.contains("let x = vec![0u8; 16].into_boxed_slice();"),
            "got:\n{}",
            text
        );
    }

    #[test]
    fn borrowed_array_slice_renders_with_brackets() {
        let e = RustExpr::borrow(
            false,
            RustExpr::new(K::ArrayToSlice(Box::new(RustExpr::var("x")))),
        );
        assert_eq!(render(&e, 0), "&x[..]");
    }

    #[test]
    fn unit_renders_as_parens() {
        assert_eq!(render(&RustExpr::unit(), 0), "()");
    }

    #[test]
    fn deref_method_call_parenthesizes_receiver() {
        let e = RustExpr::new(K::MethodCall {
            recv: Box::new(RustExpr::new(K::Deref(Box::new(RustExpr::var("y"))))),
            method: Method::Into,
            args: vec![],
        });
        assert_eq!(render(&e, 0), "(*y).into()");
    }

    #[test]
    fn derive_attribute_is_canonically_ordered() {
        let mut out = String::new();
        print_item(
            &mut out,
            &RustItem::StructDef {
                name: "S".into(),
                lifetime: Some(Lifetime::a()),
                fields: vec![(
                    "data".into(),
                    RustType::BorrowedSlice {
                        elem: Box::new(RustType::Base(RustBase::U8)),
                        mutable: false,
                        lifetime: Some(Lifetime::a()),
                    },
                )],
                derives: vec![DeriveTrait::PartialEq, DeriveTrait::Copy, DeriveTrait::Clone],
            },
        );
        assert!(out.contains("#[derive(Clone, Copy, PartialEq)]"), "{}", out);
        assert!(out.contains("struct S<'a> {"), "{}", out);
        assert!(out.contains("data: &'a [u8],"), "{}", out);
    }

    #[test]
    fn rendering_is_deterministic() {
        let e = RustExpr::new(K::BinOp(
            RustBinOp::Add,
            Box::new(RustExpr::new(K::Cast(
                Box::new(RustExpr::var("i")),
                RustType::Base(RustBase::Usize),
            ))),
            Box::new(RustExpr::int(8)),
        ));
        let p = fn_item(RustExpr::new(K::Let {
            name: "k".into(),
            mutable: false,
            ty: None,
            rhs: Box::new(e),
            body: Box::new(RustExpr::unit()),
        }));
        let a = pretty_print(&p);
        let b = pretty_print(&p);
        assert_eq!(a, b);
        assert!(a.contains("let k = i as usize + 8;"), "{}", a);
    }

    #[test]
    fn comparison_operands_are_parenthesized() {
        let cmp = |l: RustExpr, r: RustExpr| {
            RustExpr::new(K::BinOp(RustBinOp::Lt, Box::new(l), Box::new(r)))
        };
        let e = RustExpr::new(K::BinOp(
            RustBinOp::Eq,
            Box::new(cmp(RustExpr::var("a"), RustExpr::var("b"))),
            Box::new(RustExpr::new(K::BoolLit(true))),
        ));
        assert_eq!(render(&e, 0), "(a < b) == true");
    }

    #[test]
    fn no_unsafe_tokens_in_output() {
        let p = fn_item(RustExpr::new(K::Seq(
            Box::new(RustExpr::new(K::AssignIndex(
                Box::new(RustExpr::var("a")),
                Box::new(RustExpr::int(0)),
                Box::new(RustExpr::int(1)),
            ))),
            Box::new(RustExpr::unit()),
        )));
        let text = pretty_print(&p);
        for needle in ["unsafe", "as *", "*mut ", "*const "] {
            assert!(!text.contains(needle), "{:?} in:\n{}", needle, text);
        }
    }
}
