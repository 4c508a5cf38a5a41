//! C pretty-printer for the parsed subset.
//!
//! Prints the desugared tree, so output re-parses to a structurally identical
//! program (the round-trip property checked in tests).

use std::fmt::Write;

use crate::c::ast::*;

pub fn print_program(p: &CProgram) -> String {
    let mut out = String::new();
    for s in &p.structs {
        let _ = writeln!(out, "struct {} {{", s.name);
        for (name, ty) in &s.fields {
            let _ = writeln!(out, "    {};", declarator(ty, name));
        }
        let _ = writeln!(out, "}};");
    }
    for e in &p.externs {
        let _ = writeln!(out, "{};", signature(&e.ret, &e.name, &e.params));
    }
    for f in &p.functions {
        let _ = writeln!(out, "{} {{", signature(&f.ret, &f.name, &f.params));
        print_block(&mut out, &f.body, 1);
        let _ = writeln!(out, "}}");
    }
    out
}

fn signature(ret: &CType, name: &str, params: &[(String, CType)]) -> String {
    let ps = if params.is_empty() {
        "void".to_string()
    } else {
        params
            .iter()
            .map(|(n, t)| declarator(t, n))
            .collect::<Vec<_>>()
            .join(", ")
    };
    format!("{} {}({})", type_prefix(ret), name, ps)
}

/// `t` then the declared name, with pointer stars attached to the name side.
fn declarator(ty: &CType, name: &str) -> String {
    match ty {
        CType::Pointer(inner) => declarator(inner, &format!("*{}", name)),
        CType::Array(inner, n) => format!("{} {}[{}]", type_prefix(inner), name, n),
        other => format!("{} {}", type_prefix(other), name),
    }
}

fn type_prefix(ty: &CType) -> String {
    match ty {
        CType::Base(b) => b.c_name().to_string(),
        CType::Void => "void".to_string(),
        CType::Struct(s) => format!("struct {}", s),
        CType::Pointer(inner) => format!("{}*", type_prefix(inner)),
        CType::Array(inner, n) => format!("{}[{}]", type_prefix(inner), n),
        CType::Function(..) => unreachable!("function types have no declarator syntax here"),
    }
}

fn print_block(out: &mut String, stmts: &[CStmt], depth: usize) {
    for s in stmts {
        print_stmt(out, s, depth);
    }
}

fn print_stmt(out: &mut String, stmt: &CStmt, depth: usize) {
    let pad = "    ".repeat(depth);
    match stmt {
        CStmt::Return(None, _) => {
            let _ = writeln!(out, "{}return;", pad);
        }
        CStmt::Return(Some(e), _) => {
            let _ = writeln!(out, "{}return {};", pad, expr(e));
        }
        CStmt::If {
            cond,
            then_body,
            else_body,
            ..
        } => {
            let _ = writeln!(out, "{}if ({}) {{", pad, expr(cond));
            print_block(out, then_body, depth + 1);
            if else_body.is_empty() {
                let _ = writeln!(out, "{}}}", pad);
            } else {
                let _ = writeln!(out, "{}}} else {{", pad);
                print_block(out, else_body, depth + 1);
                let _ = writeln!(out, "{}}}", pad);
            }
        }
        CStmt::While { cond, body, .. } => {
            let _ = writeln!(out, "{}while ({}) {{", pad, expr(cond));
            print_block(out, body, depth + 1);
            let _ = writeln!(out, "{}}}", pad);
        }
        CStmt::Assign { lhs, rhs, .. } => {
            let _ = writeln!(out, "{}{} = {};", pad, expr(lhs), expr(rhs));
        }
        CStmt::ExprStmt(e) => {
            let _ = writeln!(out, "{}{};", pad, expr(e));
        }
        CStmt::DeclVar {
            ctype, name, init, ..
        } => match init {
            Some(e) => {
                let _ = writeln!(out, "{}{} = {};", pad, declarator(ctype, name), expr(e));
            }
            None => {
                let _ = writeln!(out, "{}{};", pad, declarator(ctype, name));
            }
        },
        CStmt::DeclArray {
            elem,
            name,
            len,
            inits,
            ..
        } => {
            let decl = format!("{} {}[{}]", type_prefix(elem), name, len);
            match inits {
                Some(es) => {
                    let items = es.iter().map(expr).collect::<Vec<_>>().join(", ");
                    let _ = writeln!(out, "{}{} = {{ {} }};", pad, decl, items);
                }
                None => {
                    let _ = writeln!(out, "{}{};", pad, decl);
                }
            }
        }
        CStmt::Memset {
            dst,
            val,
            count,
            elem,
            ..
        } => {
            let _ = writeln!(
                out,
                "{}memset({}, {}, {});",
                pad,
                expr(dst),
                expr(val),
                size_arg(count, elem)
            );
        }
        CStmt::Memcpy {
            dst,
            src,
            count,
            elem,
            ..
        } => {
            let _ = writeln!(
                out,
                "{}memcpy({}, {}, {});",
                pad,
                expr(dst),
                expr(src),
                size_arg(count, elem)
            );
        }
        CStmt::VoidCast(name, _) => {
            let _ = writeln!(out, "{}(void){};", pad, name);
        }
        CStmt::Seq(stmts) => print_block(out, stmts, depth),
    }
}

fn size_arg(count: &CExpr, elem: &Option<CType>) -> String {
    match elem {
        Some(t) => format!("{} * sizeof({})", atom(count), type_prefix(t)),
        None => expr(count),
    }
}

fn expr(e: &CExpr) -> String {
    match &e.kind {
        CExprKind::Var(x) => x.clone(),
        CExprKind::Index(b, i) => format!("{}[{}]", atom(b), expr(i)),
        CExprKind::Field(b, f) => format!("{}.{}", atom(b), f),
        CExprKind::Call(f, args) => format!(
            "{}({})",
            f,
            args.iter().map(expr).collect::<Vec<_>>().join(", ")
        ),
        CExprKind::Deref(b) => format!("*{}", atom(b)),
        CExprKind::Malloc {
            count,
            elem,
            zeroed,
        } => {
            if *zeroed {
                format!("calloc({}, sizeof({}))", expr(count), type_prefix(elem))
            } else {
                format!("malloc({} * sizeof({}))", atom(count), type_prefix(elem))
            }
        }
        CExprKind::AddrOf(b) => format!("&{}", atom(b)),
        CExprKind::IntLit(n) => n.to_string(),
        CExprKind::BoolLit(b) => b.to_string(),
        CExprKind::BinOp(op, l, r) => format!("({} {} {})", expr(l), op.c_token(), expr(r)),
        CExprKind::UnOp(op, b) => {
            let sym = match op {
                UnOp::Neg => "-",
                UnOp::Not => "!",
                UnOp::BitNot => "~",
            };
            format!("{}{}", sym, atom(b))
        }
        CExprKind::Cast(ty, b) => format!("({}){}", type_prefix(ty), atom(b)),
        CExprKind::StructInit { fields, .. } => {
            let fs = fields
                .iter()
                .map(|(n, e)| match n {
                    Some(n) => format!(".{} = {}", n, expr(e)),
                    None => expr(e),
                })
                .collect::<Vec<_>>()
                .join(", ");
            format!("{{ {} }}", fs)
        }
    }
}

/// Wrap non-atomic operands in parens so precedence survives re-parsing.
fn atom(e: &CExpr) -> String {
    match &e.kind {
        CExprKind::Var(_)
        | CExprKind::IntLit(_)
        | CExprKind::BoolLit(_)
        | CExprKind::Call(..)
        | CExprKind::Index(..)
        | CExprKind::Field(..)
        | CExprKind::Malloc { .. } => expr(e),
        _ => format!("({})", expr(e)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c::lex::tokenize;
    use crate::c::parse::parse_program;

    fn parse(src: &str) -> CProgram {
        parse_program(tokenize("t.c", src).unwrap()).unwrap()
    }

    #[test]
    fn round_trip_is_structurally_identical() {
        let src = r#"
struct s { uint8_t *data; uint32_t n; };
void print_u8(uint8_t x);
uint8_t get(struct s *p, uint32_t i) {
    if (i < p->n) {
        return p->data[i];
    } else {
        return 0;
    }
}
void fill(uint8_t *dst, uint32_t n) {
    for (uint32_t i = 0; i < n; i++) {
        dst[i] = (uint8_t)(i * 2);
    }
    (void)dst;
    memset(dst, 0, 4);
}
uint8_t *mk(void) {
    uint32_t *w = calloc(8, sizeof(uint32_t));
    w[0] = 1;
    return malloc(16 * sizeof(uint8_t));
}
"#;
        let mut once = parse(src);
        let printed = print_program(&once);
        let mut twice = parse(&printed);
        once.normalize_locs();
        twice.normalize_locs();
        assert_eq!(once, twice, "printed form:\n{}", printed);
    }
}
