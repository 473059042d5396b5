use std::fmt::Write;

use super::{GraphError, SsspResult, TreeEdge, WeightedDigraph};
use crate::ratnum::BigRational;

fn err(line: usize, msg: impl Into<String>) -> GraphError {
    GraphError::Parse { line, msg: msg.into() }
}

fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let body = l.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

fn num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T, GraphError> {
    tok.parse().map_err(|_| err(line, format!("bad {what} `{tok}`")))
}

fn weight(tok: &str, line: usize) -> Result<BigRational, GraphError> {
    tok.parse().map_err(|e| err(line, format!("{e}")))
}

/// Reads `p n m`, optional `s src`, then `m` lines `e u v num/den`.
pub fn parse_graph(text: &str) -> Result<WeightedDigraph, GraphError> {
    let mut g: Option<WeightedDigraph> = None;
    let mut declared = 0usize;
    let mut seen = 0usize;
    let mut last_line = 0;
    for (ln, t) in lines(text) {
        last_line = ln;
        match (t[0], g.as_mut()) {
            ("p", None) => {
                if t.len() != 3 {
                    return Err(err(ln, "header needs `p <n> <m>`"));
                }
                g = Some(WeightedDigraph::new(num(t[1], ln, "vertex count")?));
                declared = num(t[2], ln, "edge count")?;
            }
            ("p", Some(_)) => return Err(err(ln, "duplicate header")),
            (_, None) => return Err(err(ln, "missing `p` header")),
            ("s", Some(g)) => {
                if t.len() != 2 || g.source().is_some() {
                    return Err(err(ln, "source line needs `s <v>` once"));
                }
                let s: usize = num(t[1], ln, "source")?;
                g.set_source(s).map_err(|e| err(ln, e.to_string()))?;
            }
            ("e", Some(g)) => {
                if t.len() != 4 {
                    return Err(err(ln, "edge line needs `e <u> <v> <w>`"));
                }
                let u: usize = num(t[1], ln, "tail")?;
                let v: usize = num(t[2], ln, "head")?;
                g.add_edge(u, v, weight(t[3], ln)?).map_err(|e| err(ln, e.to_string()))?;
                seen += 1;
            }
            (tag, Some(_)) => return Err(err(ln, format!("unknown line tag `{tag}`"))),
        }
    }
    let g = g.ok_or_else(|| err(last_line.max(1), "missing `p` header"))?;
    if seen != declared {
        return Err(err(last_line, format!("header declares {declared} edges, found {seen}")));
    }
    Ok(g)
}

/// Canonical text: reduced weights, first-seen edge order, parallels merged.
/// Auxiliary edges are not part of an instance and are skipped.
pub fn serialize_graph(g: &WeightedDigraph) -> String {
    let real: Vec<_> = g.edges().iter().filter(|e| !e.aux).collect();
    let mut out = format!("p {} {}\n", g.n(), real.len());
    if let Some(s) = g.source() {
        writeln!(out, "s {s}").unwrap();
    }
    for e in real {
        writeln!(out, "e {} {} {}", e.tail, e.head, e.weight).unwrap();
    }
    out
}

/// Reads `t n source` and `a v parent w [aux]` lines.
pub fn parse_tree(text: &str) -> Result<SsspResult, GraphError> {
    let mut res: Option<SsspResult> = None;
    let mut last_line = 0;
    for (ln, t) in lines(text) {
        last_line = ln;
        match (t[0], res.as_mut()) {
            ("t", None) => {
                if t.len() != 3 {
                    return Err(err(ln, "header needs `t <n> <source>`"));
                }
                let n: usize = num(t[1], ln, "vertex count")?;
                let s: usize = num(t[2], ln, "source")?;
                if s >= n {
                    return Err(err(ln, "source out of range"));
                }
                res = Some(SsspResult { source: s, parent: vec![None; n] });
            }
            ("t", Some(_)) => return Err(err(ln, "duplicate header")),
            (_, None) => return Err(err(ln, "missing `t` header")),
            ("a", Some(r)) => {
                let aux = match t.len() {
                    4 => false,
                    5 if t[4] == "aux" => true,
                    _ => return Err(err(ln, "arc line needs `a <v> <parent> <w> [aux]`")),
                };
                let v: usize = num(t[1], ln, "vertex")?;
                let p: usize = num(t[2], ln, "parent")?;
                if v >= r.parent.len() {
                    return Err(err(ln, "vertex out of range"));
                }
                if v == r.source || r.parent[v].is_some() {
                    return Err(err(ln, format!("vertex {v} given a second parent")));
                }
                r.parent[v] = Some(TreeEdge { parent: p, weight: weight(t[3], ln)?, aux });
            }
            (tag, Some(_)) => return Err(err(ln, format!("unknown line tag `{tag}`"))),
        }
    }
    res.ok_or_else(|| err(last_line.max(1), "missing `t` header"))
}

pub fn serialize_tree(r: &SsspResult) -> String {
    serialize_tree_annotated(r, None)
}

/// Tree text; with `decimals`, each arc carries a comment holding the
/// vertex distance truncated to that many digits.
pub fn serialize_tree_annotated(r: &SsspResult, decimals: Option<(u32, &[Option<BigRational>])>) -> String {
    let mut out = format!("t {} {}\n", r.parent.len(), r.source);
    for (v, p) in r.parent.iter().enumerate() {
        if let Some(te) = p {
            write!(out, "a {} {} {}", v, te.parent, te.weight).unwrap();
            if te.aux {
                out.push_str(" aux");
            }
            if let Some((digits, d)) = decimals {
                if let Some(x) = &d[v] {
                    write!(out, " # {}", x.to_decimal(digits)).unwrap();
                }
            }
            out.push('\n');
        }
    }
    out
}
