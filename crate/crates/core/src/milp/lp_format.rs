use std::fmt::Write as _;

use super::{MilpModel, Relation, VarKind};

fn sanitize(name: &str, index: usize) -> String {
    let mut out: String =
        name.chars().map(|c| if c.is_ascii_alphanumeric() || "_.".contains(c) { c } else { '_' }).collect();
    if out.is_empty() || out.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
        out.insert(0, 'v');
    }
    // names from the formulations are unique already; the suffix guards hand-built models.
    let _ = write!(out, "_{index}");
    out
}

fn write_term(out: &mut String, first: bool, coef: i64, name: &str) {
    let sign = if coef < 0 {
        "-"
    } else if first {
        ""
    } else {
        "+"
    };
    let mag = coef.unsigned_abs();
    out.push(' ');
    out.push_str(sign);
    if !sign.is_empty() {
        out.push(' ');
    }
    if mag != 1 {
        let _ = write!(out, "{mag} ");
    }
    out.push_str(name);
}

/// Renders a model in CPLEX LP syntax with a zero objective.
pub fn write_lp(model: &MilpModel) -> String {
    let names: Vec<String> = model.variables().iter().enumerate().map(|(i, v)| sanitize(&v.name, i)).collect();
    let mut out = String::from("\\ feasibility model\nMinimize\n obj: 0");
    if let Some(first) = names.first() {
        let _ = write!(out, " {first}");
    }
    out.push_str("\nSubject To\n");
    for (i, c) in model.constraints().iter().enumerate() {
        let _ = write!(out, " {}:", sanitize(&c.tag, i));
        if c.terms.is_empty() {
            out.push_str(" 0 ");
            out.push_str(names.first().map_or("", String::as_str));
        }
        for (j, &(coef, var)) in c.terms.iter().enumerate() {
            write_term(&mut out, j == 0, coef, &names[var.index()]);
        }
        let op = match c.relation {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        };
        let _ = writeln!(out, " {op} {}", c.rhs);
    }
    out.push_str("Bounds\n");
    for (name, var) in names.iter().zip(model.variables()) {
        match var.kind {
            VarKind::Binary => {}
            VarKind::Integer { lower, upper } => {
                let _ = writeln!(out, " {lower} <= {name} <= {upper}");
            }
            VarKind::FreeInteger => {
                let _ = writeln!(out, " {name} free");
            }
        }
    }
    let generals: Vec<&str> = names
        .iter()
        .zip(model.variables())
        .filter(|(_, v)| !matches!(v.kind, VarKind::Binary))
        .map(|(n, _)| n.as_str())
        .collect();
    if !generals.is_empty() {
        out.push_str("General\n");
        for n in generals {
            let _ = writeln!(out, " {n}");
        }
    }
    let binaries: Vec<&str> = names
        .iter()
        .zip(model.variables())
        .filter(|(_, v)| matches!(v.kind, VarKind::Binary))
        .map(|(n, _)| n.as_str())
        .collect();
    if !binaries.is_empty() {
        out.push_str("Binary\n");
        for n in binaries {
            let _ = writeln!(out, " {n}");
        }
    }
    out.push_str("End\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_model_text() {
        let mut m = MilpModel::new();
        let x = m.binary("x[1]");
        let d = m.integer(0, 5, "d");
        let f = m.add_variable(VarKind::FreeInteger, "phi").unwrap();
        m.constrain("c", vec![(1, x), (-3, d), (2, f)], Relation::Le, 4);
        m.constrain("e", vec![(-1, d)], Relation::Eq, -2);
        let lp = write_lp(&m);
        assert_eq!(
            lp,
            "\\ feasibility model\nMinimize\n obj: 0 x_1__0\nSubject To\n c_0: x_1__0 - 3 d_1 + 2 phi_2 <= 4\n \
             e_1: - d_1 = -2\nBounds\n 0 <= d_1 <= 5\n phi_2 free\nGeneral\n d_1\n phi_2\nBinary\n x_1__0\nEnd\n"
        );
    }
}
