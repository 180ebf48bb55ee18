use std::fmt::Write;

use super::{MilpModel, Relation, VarKind};

/// LP identifiers may not contain brackets or `=`, so `x[j=1,t=2]`
/// becomes `x(j1,t2)`.
fn lp_name(name: &str) -> String {
    name.chars()
        .filter_map(|c| match c {
            '[' => Some('('),
            ']' => Some(')'),
            '=' | ' ' => None,
            '-' | '+' | '*' | '^' | '<' | '>' | ':' => Some('_'),
            c => Some(c),
        })
        .collect()
}

fn num(v: f64) -> String {
    if v == f64::INFINITY {
        "+inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

fn write_terms<'a>(out: &mut String, terms: impl Iterator<Item = (&'a str, f64)>) {
    let mut first = true;
    let mut width = 0;
    for (name, coef) in terms {
        if coef == 0.0 {
            continue;
        }
        let sign = if coef < 0.0 { "-" } else { "+" };
        let chunk = if first && coef > 0.0 {
            format!(" {} {}", num(coef.abs()), lp_name(name))
        } else {
            format!(" {sign} {} {}", num(coef.abs()), lp_name(name))
        };
        if width + chunk.len() > 200 {
            out.push_str("\n  ");
            width = 0;
        }
        width += chunk.len();
        out.push_str(&chunk);
        first = false;
    }
    if first {
        out.push_str(" 0");
    }
}

/// Renders `model` in CPLEX LP syntax.
pub fn write_lp(model: &MilpModel) -> String {
    let vars = model.vars();
    let mut out = String::from("\\ lotforge model\nMinimize\n obj:");
    write_terms(
        &mut out,
        vars.iter().zip(model.objective()).map(|(v, &c)| (v.name.as_str(), c)),
    );
    out.push_str("\nSubject To\n");
    for (_, c) in model.constraints() {
        let _ = write!(out, " {}:", lp_name(&c.name));
        write_terms(&mut out, c.terms.iter().map(|&(v, a)| (vars[v.0].name.as_str(), a)));
        let rel = match c.relation {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        };
        let _ = writeln!(out, " {rel} {}", num(c.rhs));
    }
    out.push_str("Bounds\n");
    for v in vars {
        let name = lp_name(&v.name);
        if v.lower == f64::NEG_INFINITY && v.upper == f64::INFINITY {
            let _ = writeln!(out, " {name} free");
        } else if v.lower == v.upper {
            let _ = writeln!(out, " {name} = {}", num(v.lower));
        } else {
            let _ = writeln!(out, " {} <= {name} <= {}", num(v.lower), num(v.upper));
        }
    }
    let binaries: Vec<_> = vars
        .iter()
        .filter(|v| v.kind == VarKind::Binary)
        .map(|v| lp_name(&v.name))
        .collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        for b in binaries {
            let _ = writeln!(out, " {b}");
        }
    }
    out.push_str("End\n");
    out
}
