//! Plain-text edge lists.
//!
//! ```text
//! # optional comments
//! n m
//! u v
//! ...
//! ```
//!
//! The header gives the vertex and edge counts; each following line is one
//! undirected edge with 0-based endpoints. Blank lines and `#` comments are
//! ignored. Writing always emits `u < v` in lexicographic order.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use percolade_core::{Error, Graph};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {source}")]
    Graph { line: usize, source: Error },
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("unsupported run format {found} (this build reads format {expected})")]
    Schema { found: String, expected: u32 },
}

impl FormatError {
    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        FormatError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

fn parse_pair(line: usize, text: &str) -> Result<(usize, usize), FormatError> {
    let mut fields = text.split_whitespace();
    let mut next = |what: &str| -> Result<usize, FormatError> {
        let field = fields.next().ok_or_else(|| FormatError::Parse {
            line,
            message: format!("missing {what}"),
        })?;
        field.parse().map_err(|_| FormatError::Parse {
            line,
            message: format!("{what} `{field}` is not a non-negative integer"),
        })
    };
    let pair = (next("first field")?, next("second field")?);
    if fields.next().is_some() {
        return Err(FormatError::Parse {
            line,
            message: "expected exactly two fields".into(),
        });
    }
    Ok(pair)
}

pub fn read_edge_list<R: Read>(reader: R) -> Result<Graph, FormatError> {
    let mut header = None;
    let mut edges = Vec::new();
    let mut last_line = 0;
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = line.map_err(|e| FormatError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let text = line.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let pair = parse_pair(line_no, text)?;
        match header {
            None => header = Some((line_no, pair)),
            Some((_, (n, _))) => {
                if pair.0 >= n || pair.1 >= n {
                    return Err(FormatError::Graph {
                        line: line_no,
                        source: Error::VertexOutOfRange {
                            vertex: pair.0.max(pair.1),
                            n,
                        },
                    });
                }
                edges.push((line_no, pair));
            }
        }
    }
    let Some((header_line, (n, m))) = header else {
        return Err(FormatError::Parse {
            line: last_line.max(1),
            message: "missing `n m` header".into(),
        });
    };
    if edges.len() != m {
        return Err(FormatError::Parse {
            line: header_line,
            message: format!("header promises {m} edges but {} follow", edges.len()),
        });
    }
    Graph::from_edges(n, edges.iter().map(|&(_, e)| e)).map_err(|source| {
        // point at the first line naming the offending edge
        let line = match source {
            Error::SelfLoop(v) => edges.iter().find(|(_, (a, b))| a == b && *a == v),
            Error::DuplicateEdge(u, v) => edges
                .iter()
                .filter(|(_, (a, b))| (a.min(b), a.max(b)) == (&u.min(v), &u.max(v)))
                .nth(1),
            _ => None,
        }
        .map_or(header_line, |(l, _)| *l);
        FormatError::Graph { line, source }
    })
}

pub fn write_edge_list<W: Write>(g: &Graph, mut w: W) -> io::Result<()> {
    writeln!(w, "{} {}", g.vertex_count(), g.edge_count())?;
    for (u, v) in g.edges() {
        writeln!(w, "{u} {v}")?;
    }
    w.flush()
}

pub fn load_graph(path: &Path) -> Result<Graph, FormatError> {
    let file = File::open(path).map_err(|e| FormatError::io(path, e))?;
    read_edge_list(file)
}

pub fn save_graph(g: &Graph, path: &Path) -> Result<(), FormatError> {
    let file = File::create(path).map_err(|e| FormatError::io(path, e))?;
    write_edge_list(g, BufWriter::new(file)).map_err(|e| FormatError::io(path, e))
}
