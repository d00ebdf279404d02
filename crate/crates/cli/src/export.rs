//! Graph exports: DOT with per-player annotations, plain edge lists that
//! round-trip, and per-player CSV tables.

use endnet_core::Graph;

/// Per-player annotation strings; players print 1-indexed.
#[derive(Clone, Debug, Default)]
pub struct PlayerLabels {
    pub b: Option<Vec<String>>,
    pub actions: Option<Vec<String>>,
    pub payoffs: Option<Vec<String>>,
}

/// DOT with node labels like `3: b=6, s=5 5/6`.
pub fn graph_dot(graph: &Graph, labels: &PlayerLabels) -> String {
    let mut out = String::from("graph G {\n  node [shape=circle];\n");
    for i in 0..graph.n() {
        let mut label = format!("{}", i + 1);
        if let Some(b) = &labels.b {
            label.push_str(&format!(": b={}", b[i]));
        }
        if let Some(s) = &labels.actions {
            label.push_str(if labels.b.is_some() { ", " } else { ": " });
            label.push_str(&format!("s={}", s[i]));
        }
        out.push_str(&format!("  {} [label=\"{}\"];\n", i + 1, label));
    }
    for (i, j) in graph.edges() {
        out.push_str(&format!("  {} -- {};\n", i + 1, j + 1));
    }
    out.push_str("}\n");
    out
}

/// One `i j` pair per line (1-indexed), preceded by a player-count header
/// so isolated players survive the round trip.
pub fn edge_list(graph: &Graph) -> String {
    let mut out = format!("# n={}\n", graph.n());
    for (i, j) in graph.edges() {
        out.push_str(&format!("{} {}\n", i + 1, j + 1));
    }
    out
}

pub fn import_edge_list(text: &str) -> Result<Graph, String> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    for (ix, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(count) = rest.trim().strip_prefix("n=") {
                n = Some(
                    count
                        .trim()
                        .parse()
                        .map_err(|e| format!("line {}: {e}", ix + 1))?,
                );
            }
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(format!("line {}: expected `i j`", ix + 1));
        };
        let a: usize = a.parse().map_err(|e| format!("line {}: {e}", ix + 1))?;
        let b: usize = b.parse().map_err(|e| format!("line {}: {e}", ix + 1))?;
        if a == 0 || b == 0 {
            return Err(format!("line {}: players are 1-indexed", ix + 1));
        }
        edges.push((a - 1, b - 1));
    }
    let n = n.ok_or("missing `# n=<count>` header")?;
    Graph::from_edges(n, &edges).map_err(|e| e.to_string())
}

/// Per-player table: id, b, degree, action, payoff.
pub fn players_csv(graph: &Graph, labels: &PlayerLabels) -> String {
    let mut out = String::from("id,b,degree,action,payoff\n");
    let field = |source: &Option<Vec<String>>, i: usize| {
        source.as_ref().map_or(String::new(), |v| v[i].clone())
    };
    for i in 0..graph.n() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            i + 1,
            field(&labels.b, i),
            graph.degree(i),
            field(&labels.actions, i),
            field(&labels.payoffs, i),
        ));
    }
    out
}
