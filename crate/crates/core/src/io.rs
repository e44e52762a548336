//! Text formats shared between the pipeline stages: whitespace-separated
//! edge lists, partition files, and the per-edge weight table.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::Partition;
use crate::rnbrw::EdgeWeights;

/// Reads a `u v w` edge list. Blank lines and `#` comments are ignored;
/// duplicate pairs merge by weight summation. The node count is one past the
/// largest id seen.
pub fn read_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut max_node = None::<usize>;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let parse = |f: Option<&str>, what: &str| -> Result<String> {
            f.map(str::to_string).ok_or_else(|| Error::Parse {
                line: lineno + 1,
                msg: format!("missing {what}"),
            })
        };
        let u: usize = parse(fields.next(), "source node")?
            .parse()
            .map_err(|e| Error::Parse { line: lineno + 1, msg: format!("bad source node: {e}") })?;
        let v: usize = parse(fields.next(), "target node")?
            .parse()
            .map_err(|e| Error::Parse { line: lineno + 1, msg: format!("bad target node: {e}") })?;
        let w: f64 = parse(fields.next(), "weight")?
            .parse()
            .map_err(|e| Error::Parse { line: lineno + 1, msg: format!("bad weight: {e}") })?;
        if fields.next().is_some() {
            return Err(Error::Parse { line: lineno + 1, msg: "expected exactly 3 fields".into() });
        }
        max_node = Some(max_node.map_or(u.max(v), |m| m.max(u).max(v)));
        edges.push((u, v, w));
    }
    Graph::from_edges(max_node.map_or(0, |m| m + 1), edges)
}

/// Writes `u v w` lines in edge-index order.
pub fn write_edge_list<W: Write>(mut writer: W, g: &Graph) -> Result<()> {
    for e in g.edges() {
        writeln!(writer, "{} {} {}", e.u, e.v, e.weight)?;
    }
    Ok(())
}

/// Writes `node_id community_id` lines, preceded by `# key=value` header
/// comments recording how the partition was produced.
pub fn write_partition<W: Write>(
    mut writer: W,
    p: &Partition,
    header: &[(&str, String)],
) -> Result<()> {
    for (key, value) in header {
        writeln!(writer, "# {key}={value}")?;
    }
    for (node, &label) in p.labels().iter().enumerate() {
        writeln!(writer, "{node} {label}")?;
    }
    Ok(())
}

/// Reads a partition file. Every node in `0..n` must appear exactly once.
pub fn read_partition<R: BufRead>(reader: R) -> Result<Partition> {
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let node: usize = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| Error::Parse { line: lineno + 1, msg: "bad node id".into() })?;
        let label: usize = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| Error::Parse { line: lineno + 1, msg: "bad community id".into() })?;
        if fields.next().is_some() {
            return Err(Error::Parse { line: lineno + 1, msg: "expected exactly 2 fields".into() });
        }
        pairs.push((node, label));
    }
    let n = pairs.iter().map(|&(node, _)| node + 1).max().unwrap_or(0);
    let mut labels = vec![usize::MAX; n];
    for (node, label) in pairs {
        if labels[node] != usize::MAX {
            return Err(Error::Parse { line: 0, msg: format!("node {node} labeled twice") });
        }
        labels[node] = label;
    }
    if let Some(hole) = labels.iter().position(|&l| l == usize::MAX) {
        return Err(Error::Parse { line: 0, msg: format!("node {hole} has no label") });
    }
    Ok(Partition::from_labels(&labels))
}

/// Writes the audit table `u v pi sc csrnbrw`, one line per edge of the
/// collaboration-strength graph.
pub fn write_weight_table<W: Write>(
    mut writer: W,
    sc_graph: &Graph,
    pi: &EdgeWeights,
    combined: &EdgeWeights,
) -> Result<()> {
    if pi.len() != sc_graph.edge_count() || combined.len() != sc_graph.edge_count() {
        return Err(Error::EdgeSetMismatch {
            got: pi.len().min(combined.len()),
            expected: sc_graph.edge_count(),
        });
    }
    writeln!(writer, "# u v pi sc csrnbrw")?;
    for (idx, e) in sc_graph.edges().iter().enumerate() {
        writeln!(
            writer,
            "{} {} {} {} {}",
            e.u,
            e.v,
            pi.values()[idx],
            e.weight,
            combined.values()[idx]
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list_round_trips() {
        let g = Graph::from_edges(4, vec![(0, 1, 1.5), (1, 2, 3.0), (2, 3, 1.0)]).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&mut buf, &g).unwrap();
        let back = read_edge_list(buf.as_slice()).unwrap();
        assert_eq!(back.edges(), g.edges());
    }

    #[test]
    fn edge_list_skips_comments_and_blanks() {
        let text = "# collaboration edges\n\n0 1 2\n1 2 1.5\n";
        let g = read_edge_list(text.as_bytes()).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.edges()[0].weight, 2.0);
    }

    #[test]
    fn edge_list_rejects_malformed_lines() {
        assert!(matches!(
            read_edge_list("0 1\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            read_edge_list("0 1 2 3\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(read_edge_list("a b 1\n".as_bytes()).is_err());
    }

    #[test]
    fn partition_round_trips_with_header() {
        let p = Partition::from_labels(&[0, 0, 1, 2, 1]);
        let mut buf = Vec::new();
        write_partition(&mut buf, &p, &[("seed", "7".into()), ("q", "0.41".into())]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# seed=7\n# q=0.41\n"));
        let back = read_partition(buf.as_slice()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn partition_reader_demands_full_coverage() {
        assert!(read_partition("0 0\n2 1\n".as_bytes()).is_err());
        assert!(read_partition("0 0\n0 1\n".as_bytes()).is_err());
    }

    #[test]
    fn weight_table_lists_every_edge() {
        use crate::rnbrw::{retrace_probabilities, RetraceCounts};
        let g = Graph::from_edges(3, vec![(0, 1, 2.0), (1, 2, 3.0)]).unwrap();
        let counts = RetraceCounts::from_tallies(vec![3, 1], 10);
        let pi = retrace_probabilities(&counts);
        let combined = crate::rnbrw::csrnbrw_weights(&pi, &g).unwrap();
        let mut buf = Vec::new();
        write_weight_table(&mut buf, &g, &pi, &combined).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1], "0 1 0.75 2 1.5");
        assert_eq!(lines[2], "1 2 0.25 3 0.75");
    }
}
