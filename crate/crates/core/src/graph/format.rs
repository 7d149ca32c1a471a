use std::fmt::Write as _;

use super::{Edge, FlowNetwork, InvalidNetwork};

/// Error raised while reading a graph file.
#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("instance starting at line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: InvalidNetwork,
    },
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, column, message: message.into() }
}

struct Block {
    header_line: usize,
    name: String,
    node_count: Option<usize>,
    edges: Vec<Edge>,
}

impl Block {
    fn finish(self) -> Result<FlowNetwork, ParseError> {
        let node_count = self
            .node_count
            .ok_or_else(|| syntax(self.header_line, 1, format!("instance '{}' has no node count line", self.name)))?;
        FlowNetwork::new(self.name, node_count, self.edges)
            .map_err(|source| ParseError::Invalid { line: self.header_line, source })
    }
}

/// Parses integer fields separated by exactly one space.
fn fields<const N: usize>(text: &str, line: usize) -> Result<[u64; N], ParseError> {
    let mut out = [0u64; N];
    let mut column = 1;
    let mut parts = text.split(' ');
    for (i, slot) in out.iter_mut().enumerate() {
        let part = parts.next().ok_or_else(|| syntax(line, column, format!("expected {N} fields, found {i}")))?;
        if part.is_empty() {
            return Err(syntax(
                line,
                column,
                "expected a non-negative integer (fields are separated by a single space)",
            ));
        }
        *slot = part.parse().map_err(|_| syntax(line, column, format!("'{part}' is not a non-negative integer")))?;
        column += part.len() + 1;
    }
    if parts.next().is_some() {
        return Err(syntax(line, column, format!("expected {N} fields, found more")));
    }
    Ok(out)
}

/// Reads every instance in a graph file.
///
/// An instance is a `# <name>` line, a line holding the node count, then one
/// `<tail> <head> <flow>` line per edge. Edge ids follow line order. Empty
/// lines are skipped.
pub fn parse_graph_file(text: &str) -> Result<Vec<FlowNetwork>, ParseError> {
    let mut networks = Vec::new();
    let mut current: Option<Block> = None;
    for (index, raw) in text.split('\n').enumerate() {
        let line = index + 1;
        if raw.is_empty() {
            continue;
        }
        if let Some(col) = raw.find(['\r', '\t']) {
            return Err(syntax(line, col + 1, "unexpected carriage return or tab"));
        }
        if let Some(rest) = raw.strip_prefix('#') {
            if let Some(block) = current.take() {
                networks.push(block.finish()?);
            }
            let name = match rest.strip_prefix(' ') {
                Some(name) => name,
                None if rest.is_empty() => "",
                None => return Err(syntax(line, 2, "expected a space after '#'")),
            };
            current = Some(Block { header_line: line, name: name.to_string(), node_count: None, edges: Vec::new() });
            continue;
        }
        let block = current.as_mut().ok_or_else(|| syntax(line, 1, "expected '# <name>' header"))?;
        if block.node_count.is_none() {
            let [n] = fields::<1>(raw, line)?;
            block.node_count = Some(n as usize);
        } else {
            let [tail, head, flow] = fields::<3>(raw, line)?;
            block.edges.push(Edge::new(tail as usize, head as usize, flow));
        }
    }
    if let Some(block) = current.take() {
        networks.push(block.finish()?);
    }
    Ok(networks)
}

pub fn serialize_network(network: &FlowNetwork) -> String {
    let mut out = String::new();
    write_network(&mut out, network);
    out
}

pub fn serialize_graph_file<'a>(networks: impl IntoIterator<Item = &'a FlowNetwork>) -> String {
    let mut out = String::new();
    for net in networks {
        write_network(&mut out, net);
    }
    out
}

fn write_network(out: &mut String, network: &FlowNetwork) {
    let _ = writeln!(out, "# {}", network.name());
    let _ = writeln!(out, "{}", network.node_count());
    for e in network.edges() {
        let _ = writeln!(out, "{} {} {}", e.tail, e.head, e.flow);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Violation;

    #[test]
    fn tiny_instance() {
        let nets = parse_graph_file("# tiny\n2\n0 1 5\n").unwrap();
        assert_eq!(nets.len(), 1);
        let net = &nets[0];
        assert_eq!(net.name(), "tiny");
        assert_eq!(net.node_count(), 2);
        assert_eq!(net.edges(), &[Edge::new(0, 1, 5)]);
        assert_eq!((net.source(), net.sink()), (0, 1));
    }

    #[test]
    fn fig2_instance() {
        let nets = parse_graph_file("# fig2\n5\n0 1 1\n1 2 2\n2 3 2\n3 1 2\n1 4 1\n").unwrap();
        let net = &nets[0];
        assert_eq!((net.source(), net.sink()), (0, 4));
        let flows: Vec<u64> = net.edges().iter().map(|e| e.flow).collect();
        assert_eq!(flows, vec![1, 2, 2, 2, 1]);
    }

    #[test]
    fn conservation_error_delegated() {
        let err = parse_graph_file("# bad\n3\n0 1 2\n1 2 1\n").unwrap_err();
        match err {
            ParseError::Invalid { line, source } => {
                assert_eq!(line, 1);
                assert_eq!(source.violations, vec![Violation::Conservation { node: 1, inflow: 2, outflow: 1 }]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_graph_file("# x\n2\n0  1 5\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 3, column: 3, .. }), "{err:?}");
        let err = parse_graph_file("# x\n2\n0 1 z\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 3, column: 5, .. }), "{err:?}");
        let err = parse_graph_file("2\n0 1 5\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 1, column: 1, .. }), "{err:?}");
        let err = parse_graph_file("# x\n2\n0 1 5\r\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 3, column: 6, .. }), "{err:?}");
        let err = parse_graph_file("# x\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 1, .. }), "{err:?}");
    }

    #[test]
    fn multiple_instances_and_serialization() {
        let text = "# a\n2\n0 1 5\n# b\n3\n0 1 2\n1 2 2\n";
        let nets = parse_graph_file(text).unwrap();
        assert_eq!(nets.len(), 2);
        assert_eq!(serialize_graph_file(&nets), text);
    }
}
