//! Graphviz export of transition diagrams.

use std::fmt::Write;

use pbnq::StochasticMatrix;

use crate::schema::format_number;
use crate::CliError;

pub const MAX_EDGES: usize = 1 << 12;

fn edge_style(u: usize) -> String {
    match u {
        1 => "style=solid".into(),
        2 => "style=dashed".into(),
        3 => "style=dotted".into(),
        4 => "style=bold".into(),
        _ => format!("style=solid, penwidth={}", u - 3),
    }
}

/// One node per state and one edge per nonzero entry of each `P(u)`, labeled
/// with its probability and styled by input. Edges are emitted by input, then
/// source, then target.
pub fn export_dot(p: &StochasticMatrix) -> Result<String, CliError> {
    let n = p.rows();
    let m = p.input_count()?;
    let edges = p.as_sparse().nnz();
    if edges > MAX_EDGES {
        return Err(CliError::Invalid(format!(
            "{edges} edges exceed the export limit of {MAX_EDGES}"
        )));
    }
    let mut out = String::from("digraph pbn {\n  node [shape=circle];\n");
    for x in 1..=n {
        writeln!(out, "  s{x} [label=\"δ{n}^{x}\"];").unwrap();
    }
    for u in 1..=m {
        let style = edge_style(u);
        for a in 1..=n {
            for (b, v) in p.column((u - 1) * n + a) {
                if v != 0.0 {
                    writeln!(out, "  s{a} -> s{b} [{style}, label=\"{}\"];", format_number(v)).unwrap();
                }
            }
        }
    }
    out.push_str("}\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use pbnq::LogicalMatrix;

    #[test]
    fn single_state_self_loops() {
        let p = StochasticMatrix::from_logical(&LogicalMatrix::new(1, vec![1, 1, 1]).unwrap());
        let dot = export_dot(&p).unwrap();
        assert_eq!(dot.matches("s1 -> s1").count(), 3);
        assert!(dot.contains("s1 -> s1 [style=dotted, label=\"1\"];"));
        assert!(dot.contains("s1 [label=\"δ1^1\"];"));
    }

    #[test]
    fn size_guard() {
        let p = StochasticMatrix::from_logical(&LogicalMatrix::new(4097, vec![1; 4097]).unwrap());
        assert!(export_dot(&p).is_err());
    }
}
