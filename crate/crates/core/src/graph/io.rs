use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::{BuildStats, Graph, IdMap};
use crate::error::{Error, Result};

/// Reads a whitespace-separated edge list: one undirected edge per line,
/// `#` comment lines and blank lines ignored.
pub fn read_edge_list<R: BufRead>(reader: R) -> Result<(Graph, BuildStats)> {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut order: Vec<String> = Vec::new();
    let mut pairs = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse {
            line: lineno + 1,
            message: e.to_string(),
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (a, b) = match (tokens.next(), tokens.next(), tokens.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("expected two node labels, found {trimmed:?}"),
                })
            }
        };
        let mut intern = |s: &str| -> usize {
            if let Some(&i) = index.get(s) {
                return i;
            }
            let i = order.len();
            index.insert(s.to_owned(), i);
            order.push(s.to_owned());
            i
        };
        let ia = intern(a);
        let ib = intern(b);
        pairs.push((ia, ib));
    }
    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    drop(index);
    let numeric: Option<Vec<u64>> = order.iter().map(|s| s.parse::<u64>().ok()).collect();
    let ids = match numeric {
        Some(v) => IdMap::Numeric(v),
        None => IdMap::Named(order),
    };
    let n = match &ids {
        IdMap::Numeric(v) => v.len(),
        IdMap::Named(v) => v.len(),
        IdMap::Identity => unreachable!(),
    };
    let (graph, stats) = Graph::from_index_edges(n, pairs);
    Ok((graph.with_ids(ids), stats))
}

pub fn load_edge_list<P: AsRef<Path>>(path: P) -> Result<(Graph, BuildStats)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_edge_list(BufReader::new(file))
}

/// Writes `header` lines (each prefixed with `# `) followed by one
/// `label label` line per edge. Isolated nodes are not representable.
pub fn write_edge_list<W: Write>(graph: &Graph, mut out: W, header: &[String]) -> std::io::Result<()> {
    for line in header {
        writeln!(out, "# {line}")?;
    }
    for (i, j) in graph.edges() {
        writeln!(out, "{}\t{}", graph.label(i), graph.label(j))?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blank_lines() {
        let text = "# a comment\n1 2\n\n2\t3\n  # indented comment\n3 1\n";
        let (g, stats) = read_edge_list(text.as_bytes()).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(stats, BuildStats::default());
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let text = "1 2\n# ok\n3\n";
        match read_edge_list(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let text = "1 2 0.5\n";
        assert!(matches!(
            read_edge_list(text.as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn comment_only_file_is_empty() {
        assert!(matches!(
            read_edge_list("# nothing\n".as_bytes()),
            Err(Error::EmptyInput)
        ));
    }

    #[test]
    fn missing_file_names_path() {
        let err = load_edge_list("/nonexistent/graph.edges").unwrap_err();
        assert!(err.to_string().contains("/nonexistent/graph.edges"));
    }

    #[test]
    fn write_then_read_preserves_labels() {
        let text = "alice bob\nbob carol\ncarol alice\ncarol dave\n";
        let (g, _) = read_edge_list(text.as_bytes()).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf, &["generated".to_string()]).unwrap();
        let written = String::from_utf8(buf).unwrap();
        assert!(written.starts_with("# generated\n"));
        let (h, _) = read_edge_list(written.as_bytes()).unwrap();
        assert_eq!(h.node_count(), 4);
        assert_eq!(h.edge_count(), 4);
        let mut a: Vec<(String, String)> = g
            .edges()
            .map(|(i, j)| (g.label(i).into_owned(), g.label(j).into_owned()))
            .collect();
        let mut b: Vec<(String, String)> = h
            .edges()
            .map(|(i, j)| (h.label(i).into_owned(), h.label(j).into_owned()))
            .collect();
        for v in [&mut a, &mut b] {
            for (x, y) in v.iter_mut() {
                if x > y {
                    std::mem::swap(x, y);
                }
            }
            v.sort();
        }
        assert_eq!(a, b);
    }
}
