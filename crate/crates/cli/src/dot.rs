use std::collections::BTreeMap;
use std::fmt::Write as _;

use effres::graph::{DirectedGraph, NodePartition};

const SIDE_COLORS: [&str; 2] = ["lightsalmon", "lightblue"];

/// Graphviz rendering of `g` with nodes filled by partition side.
///
/// A pair of opposite edges with equal weight is drawn once with
/// `dir=both`; every other edge is drawn as a single arrow.
pub fn partition_dot(g: &DirectedGraph, p: &NodePartition) -> String {
    let labels = g.labels();
    let weights: BTreeMap<(usize, usize), f64> = g.edges().iter().map(|e| ((e.src, e.dst), e.weight)).collect();

    let mut s = String::from("digraph G {\n  node [style=filled];\n");
    for (i, id) in labels.iter().enumerate() {
        let side = usize::from(p.contains(i));
        let _ = writeln!(s, "  {id} [fillcolor={}];", SIDE_COLORS[side]);
    }
    for (&(a, b), &w) in &weights {
        match weights.get(&(b, a)) {
            Some(&back) if back == w && b < a => continue,
            Some(&back) if back == w => {
                let _ = writeln!(s, "  {} -> {} [dir=both, label=\"{w}\"];", labels[a], labels[b]);
            }
            _ => {
                let _ = writeln!(s, "  {} -> {} [label=\"{w}\"];", labels[a], labels[b]);
            }
        }
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_pairs_collapse() {
        let g = DirectedGraph::new(3, [(0, 1, 1.0), (1, 0, 1.0), (1, 2, 2.0), (2, 1, 0.5)]).unwrap();
        let p = NodePartition::new(3, &[0]).unwrap();
        let dot = partition_dot(&g, &p);
        assert_eq!(dot.matches("dir=both").count(), 1);
        assert!(dot.contains("0 -> 1 [dir=both"));
        assert!(!dot.contains("1 -> 0"));
        assert!(dot.contains("1 -> 2 [label=\"2\"]"));
        assert!(dot.contains("2 -> 1 [label=\"0.5\"]"));
        assert!(dot.contains("0 [fillcolor=lightblue]"));
        assert!(dot.contains("2 [fillcolor=lightsalmon]"));
    }
}
