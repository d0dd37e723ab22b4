use std::fmt::Write;

use commgraph_core::HeteroGraph;

/// Node table (`index`, `id`, `kind`) followed by the edge list over node
/// indices, both tab-separated, with `#` section headers.
pub fn format_graph(graph: &HeteroGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# nodes {}", graph.n_nodes());
    out.push_str("index\tid\tkind\n");
    for i in 0..graph.n_nodes() {
        let (id, kind) = graph.node(i);
        let _ = writeln!(out, "{i}\t{id}\t{}", kind.as_str());
    }
    let _ = writeln!(out, "# edges {}", graph.n_edges());
    for (a, b) in graph.edges() {
        let _ = writeln!(out, "{a}\t{b}");
    }
    out
}
