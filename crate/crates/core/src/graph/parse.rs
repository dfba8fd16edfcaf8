use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::DirectedGraph;
use crate::error::{Error, Result};

/// Parses the whitespace-separated `src dst weight` edge-list format.
///
/// `#` starts a comment. An optional first line `n <count>` declares the
/// node set `0..count` (so isolated nodes can be listed). Without it the node
/// set is the sorted set of ids that occur in edges, remapped densely; the
/// original ids are kept as labels.
pub fn parse_edge_list(text: &str) -> Result<DirectedGraph> {
    let mut declared: Option<usize> = None;
    let mut raw = Vec::new();
    let mut seen_content = false;

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        let err = |message: String| Error::Parse {
            line: lineno,
            message,
        };

        if fields[0] == "n" {
            if seen_content {
                return Err(err("node-count header must come before any edge".into()));
            }
            if fields.len() != 2 {
                return Err(err("expected `n <count>`".into()));
            }
            let count: usize = fields[1]
                .parse()
                .map_err(|_| err(format!("invalid node count `{}`", fields[1])))?;
            if count == 0 {
                return Err(err("node count must be at least 1".into()));
            }
            declared = Some(count);
            seen_content = true;
            continue;
        }
        seen_content = true;

        if fields.len() != 3 {
            return Err(err(format!(
                "expected `src dst weight`, found {} fields",
                fields.len()
            )));
        }
        let src: u64 = fields[0]
            .parse()
            .map_err(|_| err(format!("invalid node id `{}`", fields[0])))?;
        let dst: u64 = fields[1]
            .parse()
            .map_err(|_| err(format!("invalid node id `{}`", fields[1])))?;
        let weight: f64 = fields[2]
            .parse()
            .map_err(|_| err(format!("invalid weight `{}`", fields[2])))?;
        if src == dst {
            return Err(err(format!("self-loop at node {src}")));
        }
        if !(weight.is_finite() && weight > 0.0) {
            return Err(err(format!("weight must be positive, found {weight}")));
        }
        raw.push((lineno, src, dst, weight));
    }

    let labels: Vec<u64> = match declared {
        Some(count) => {
            if let Some(&(line, s, d, _)) = raw
                .iter()
                .find(|&&(_, s, d, _)| s >= count as u64 || d >= count as u64)
            {
                return Err(Error::Parse {
                    line,
                    message: format!("edge {s}->{d} exceeds declared node count {count}"),
                });
            }
            (0..count as u64).collect()
        }
        None => {
            let ids: BTreeSet<u64> = raw.iter().flat_map(|&(_, s, d, _)| [s, d]).collect();
            if ids.is_empty() {
                return Err(Error::Parse {
                    line: 0,
                    message: "no edges and no node-count header".into(),
                });
            }
            ids.into_iter().collect()
        }
    };

    let index = |id: u64| labels.binary_search(&id).expect("id present in label table");
    let mut pairs = BTreeSet::new();
    for &(line, s, d, _) in &raw {
        if !pairs.insert((s, d)) {
            return Err(Error::Parse {
                line,
                message: format!("duplicate edge {s}->{d}"),
            });
        }
    }
    DirectedGraph::new(
        labels.len(),
        raw.iter().map(|&(_, s, d, w)| (index(s), index(d), w)),
    )?
    .with_labels(labels)
}

/// Writes a graph in the edge-list format, using node labels as ids.
///
/// A header is always emitted so isolated nodes survive a round trip when
/// labels are `0..n`.
pub fn write_edge_list(g: &DirectedGraph) -> String {
    let mut s = String::new();
    let dense = g.labels().iter().enumerate().all(|(i, &l)| l == i as u64);
    if dense {
        let _ = writeln!(s, "n {}", g.node_count());
    }
    for e in g.edges() {
        let _ = writeln!(
            s,
            "{} {} {}",
            g.labels()[e.src],
            g.labels()[e.dst],
            e.weight
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    #[test]
    fn single_edge() {
        let g = parse_edge_list("0 1 1.0").unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edges(), &[Edge { src: 0, dst: 1, weight: 1.0 }]);
    }

    #[test]
    fn three_cycle() {
        let g = parse_edge_list("0 1 1\n1 2 1\n2 0 1").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edges().len(), 3);
        assert_eq!(g.edges()[2], Edge { src: 2, dst: 0, weight: 1.0 });
    }

    #[test]
    fn self_loop_rejected() {
        let err = parse_edge_list("0 0 1").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
        assert!(err.to_string().contains("self-loop"));
    }

    #[test]
    fn errors_report_line_numbers() {
        let err = parse_edge_list("# header\n0 1 1\n1 2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = parse_edge_list("0 1 1\n1 2 -3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = parse_edge_list("0 1 0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = parse_edge_list("0 1 1\n0 1 2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = parse_edge_list("a 1 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn comments_and_header() {
        let g = parse_edge_list("n 4 # four nodes\n# comment\n0 1 2.5 # trailing\n").unwrap();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.edges()[0].weight, 2.5);
        assert!(parse_edge_list("n 2\n0 5 1\n").is_err());
        assert!(parse_edge_list("0 1 1\nn 2\n").is_err());
    }

    #[test]
    fn sparse_ids_are_remapped() {
        let g = parse_edge_list("10 30 1\n30 20 2\n").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.labels(), &[10, 20, 30]);
        assert_eq!(g.edges()[0], Edge { src: 0, dst: 2, weight: 1.0 });
        assert_eq!(g.edges()[1], Edge { src: 2, dst: 1, weight: 2.0 });
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(parse_edge_list("# nothing\n").is_err());
        let g = parse_edge_list("n 1\n").unwrap();
        assert_eq!(g.node_count(), 1);
    }

    #[test]
    fn round_trip_with_isolated_node() {
        let g = DirectedGraph::new(4, [(0, 1, 0.1), (2, 1, 3.25)]).unwrap();
        assert_eq!(parse_edge_list(&write_edge_list(&g)).unwrap(), g);
    }
}
