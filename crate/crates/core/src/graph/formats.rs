//! Graph file readers, registered by format name.
//!
//! * `edge-list`: optional header `n <count>`, then one `u v` pair per line.
//!   `#` starts a comment. Without a header, integer tokens are taken as ids
//!   (order = largest id + 1); any non-integer token switches to named mode,
//!   where vertices get ids in order of first appearance. A line holding a
//!   single token declares an isolated vertex.
//! * `dimacs`: `c` comments, a `p edge <n> <m>` header and `e <u> <v>` lines
//!   with 1-based ids. Vertex names are the 1-based ids.

use std::collections::HashMap;
use std::sync::OnceLock;

use super::Graph;
use crate::error::{Error, Result};
use crate::registry::{Named, Registry};

/// A text graph format.
pub trait GraphFormat: Named + Send + Sync {
    fn parse(&self, source: &str) -> Result<Graph>;
}

/// The built-in formats.
pub fn registry() -> &'static Registry<dyn GraphFormat> {
    static REGISTRY: OnceLock<Registry<dyn GraphFormat>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let mut r: Registry<dyn GraphFormat> = Registry::new("graph format");
        r.register(Box::new(EdgeList));
        r.register(Box::new(Dimacs));
        r
    })
}

pub fn load_graph(source: &str, format: &str) -> Result<Graph> {
    registry().get(format)?.parse(source)
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub struct EdgeList;

impl Named for EdgeList {
    fn name(&self) -> &'static str {
        "edge-list"
    }
}

enum Entry<'a> {
    Vertex(usize, &'a str),
    Edge(usize, &'a str, &'a str),
}

impl GraphFormat for EdgeList {
    fn parse(&self, source: &str) -> Result<Graph> {
        let mut declared: Option<usize> = None;
        let mut entries = Vec::new();
        for (idx, raw) in source.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = content.split_whitespace().collect();
            if tokens[0] == "n" && declared.is_none() && entries.is_empty() {
                if tokens.len() != 2 {
                    return Err(parse_err(line, "header must be `n <count>`"));
                }
                let count = tokens[1]
                    .parse()
                    .map_err(|_| parse_err(line, format!("bad vertex count {:?}", tokens[1])))?;
                declared = Some(count);
                continue;
            }
            match tokens.as_slice() {
                [v] => entries.push(Entry::Vertex(line, v)),
                [u, v] => entries.push(Entry::Edge(line, u, v)),
                _ => return Err(parse_err(line, "expected `u v`")),
            }
        }

        let tokens = || {
            entries.iter().flat_map(|e| match *e {
                Entry::Vertex(l, v) => vec![(l, v)],
                Entry::Edge(l, u, v) => vec![(l, u), (l, v)],
            })
        };
        let numeric = declared.is_some() || tokens().all(|(_, t)| t.parse::<usize>().is_ok());

        let (order, names, id): (usize, Option<Vec<String>>, HashMap<&str, usize>) = if numeric {
            let mut max = None;
            for (line, t) in tokens() {
                let v: usize = t
                    .parse()
                    .map_err(|_| parse_err(line, format!("vertex {t:?} is not an integer id")))?;
                if let Some(n) = declared {
                    if v >= n {
                        return Err(parse_err(
                            line,
                            format!("vertex id {v} out of declared range 0..{n}"),
                        ));
                    }
                }
                max = max.max(Some(v));
            }
            let order = declared.unwrap_or(max.map_or(0, |m| m + 1));
            (order, None, HashMap::new())
        } else {
            let mut id = HashMap::new();
            let mut names = Vec::new();
            for (_, t) in tokens() {
                id.entry(t).or_insert_with(|| {
                    names.push(t.to_string());
                    names.len() - 1
                });
            }
            (names.len(), Some(names), id)
        };
        let lookup = |t: &str| -> usize {
            if numeric {
                t.parse().expect("validated above")
            } else {
                id[t]
            }
        };

        let mut edges = Vec::new();
        for e in &entries {
            if let Entry::Edge(line, u, v) = *e {
                if u == v {
                    return Err(Error::SelfLoop {
                        line,
                        vertex: u.to_string(),
                    });
                }
                edges.push((lookup(u), lookup(v)));
            }
        }
        let g = Graph::from_edges(order, edges)?;
        match names {
            Some(names) => g.with_names(names),
            None => Ok(g),
        }
    }
}

pub struct Dimacs;

impl Named for Dimacs {
    fn name(&self) -> &'static str {
        "dimacs"
    }
}

impl GraphFormat for Dimacs {
    fn parse(&self, source: &str) -> Result<Graph> {
        let mut order: Option<usize> = None;
        let mut edges = Vec::new();
        for (idx, raw) in source.lines().enumerate() {
            let line = idx + 1;
            let tokens: Vec<&str> = raw.split_whitespace().collect();
            match tokens.as_slice() {
                [] => continue,
                ["c", ..] => continue,
                ["p", _kind, n, _m] => {
                    if order.is_some() {
                        return Err(parse_err(line, "duplicate problem line"));
                    }
                    order = Some(
                        n.parse()
                            .map_err(|_| parse_err(line, format!("bad vertex count {n:?}")))?,
                    );
                }
                ["e", u, v] => {
                    let n = order.ok_or_else(|| parse_err(line, "edge before `p` line"))?;
                    let mut ends = [0usize; 2];
                    for (slot, t) in ends.iter_mut().zip([u, v]) {
                        let id: usize = t
                            .parse()
                            .map_err(|_| parse_err(line, format!("bad vertex id {t:?}")))?;
                        if id == 0 || id > n {
                            return Err(parse_err(
                                line,
                                format!("vertex id {id} out of declared range 1..={n}"),
                            ));
                        }
                        *slot = id - 1;
                    }
                    if ends[0] == ends[1] {
                        return Err(Error::SelfLoop {
                            line,
                            vertex: u.to_string(),
                        });
                    }
                    edges.push((ends[0], ends[1]));
                }
                _ => return Err(parse_err(line, format!("unrecognized line {raw:?}"))),
            }
        }
        let n = order.ok_or_else(|| parse_err(0, "missing `p edge <n> <m>` line"))?;
        Graph::from_edges(n, edges)?.with_names((1..=n).map(|v| v.to_string()).collect())
    }
}

/// Serializes a graph in edge-list format so that [`EdgeList`] reads it back
/// with the same ids and names.
pub fn to_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    let default_names = g
        .names()
        .iter()
        .enumerate()
        .all(|(i, n)| *n == i.to_string());
    if default_names {
        out.push_str(&format!("n {}\n", g.order()));
        for (u, v) in g.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
    } else {
        for name in g.names() {
            out.push_str(name);
            out.push('\n');
        }
        for (u, v) in g.edges() {
            out.push_str(&format!("{} {}\n", g.name(u), g.name(v)));
        }
    }
    out
}
