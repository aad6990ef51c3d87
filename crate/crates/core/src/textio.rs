//! Text and JSON formats for graphs, action graphs and graph sums.
//!
//! One graph per line:
//!   `G m=<int> n=<int> v=<int> h=[a0,a1,...] e=[s>t, s-t, ...]`
//! where `>` marks a directed edge and `-` an undirected one; the token
//! `LINE` denotes the exceptional line graph.  Acting graphs extend the
//! format with a colour list `c=[w,b,...]`.

use crate::action::ActionGraph;
use crate::graph::{Graph, GraphError};
use crate::sum::{format_rat, parse_rat, GraphSum};
use serde::{Deserialize, Serialize};

pub fn graph_to_text(g: &Graph) -> String {
    if g.is_line() {
        return format!("G m={} n={} LINE", g.m, g.n);
    }
    let hairs: Vec<String> = g.hairs.iter().map(|h| h.to_string()).collect();
    let edges: Vec<String> = g
        .edges
        .iter()
        .map(|e| format!("{}{}{}", e.s, if e.dir { '>' } else { '-' }, e.t))
        .collect();
    let mut s = format!(
        "G m={} n={} v={} h=[{}] e=[{}]",
        g.m,
        g.n,
        g.nv,
        hairs.join(","),
        edges.join(",")
    );
    if g.lines > 0 {
        s.push_str(&format!(" lines={}", g.lines));
    }
    s
}

pub fn graph_from_text(line: &str) -> Result<Graph, GraphError> {
    let mut m: Option<i32> = None;
    let mut n: Option<i32> = None;
    let mut v: Option<u8> = None;
    let mut hairs: Vec<u8> = Vec::new();
    let mut edges: Vec<(u8, u8, bool)> = Vec::new();
    let mut lines = 0u8;
    let mut is_line = false;

    let body = line.trim();
    let body = body
        .strip_prefix("G ")
        .or_else(|| body.strip_prefix("G\t"))
        .ok_or_else(|| GraphError::Usage(format!("graph line must start with 'G ': {line:?}")))?;
    for tok in body.split_whitespace() {
        if tok == "LINE" {
            is_line = true;
            continue;
        }
        let (key, val) = tok
            .split_once('=')
            .ok_or_else(|| GraphError::Usage(format!("bad token {tok:?}")))?;
        match key {
            "m" => m = Some(parse_i32(val)?),
            "n" => n = Some(parse_i32(val)?),
            "v" => v = Some(parse_i32(val)? as u8),
            "lines" => lines = parse_i32(val)? as u8,
            "h" => {
                for part in strip_brackets(val)?.split(',') {
                    if part.is_empty() {
                        continue;
                    }
                    hairs.push(
                        part.trim()
                            .parse()
                            .map_err(|_| GraphError::Usage(format!("bad hair {part:?}")))?,
                    );
                }
            }
            "e" => {
                for part in strip_brackets(val)?.split(',') {
                    let part = part.trim();
                    if part.is_empty() {
                        continue;
                    }
                    let (dir, sep) = if part.contains('>') {
                        (true, '>')
                    } else {
                        (false, '-')
                    };
                    let (a, b) = part
                        .split_once(sep)
                        .ok_or_else(|| GraphError::Usage(format!("bad edge {part:?}")))?;
                    let s: u8 = a
                        .trim()
                        .parse()
                        .map_err(|_| GraphError::Usage(format!("bad edge {part:?}")))?;
                    let t: u8 = b
                        .trim()
                        .parse()
                        .map_err(|_| GraphError::Usage(format!("bad edge {part:?}")))?;
                    edges.push((s, t, dir));
                }
            }
            _ => return Err(GraphError::Usage(format!("unknown key {key:?}"))),
        }
    }
    let m = m.ok_or_else(|| GraphError::Usage("missing m".into()))?;
    let n = n.ok_or_else(|| GraphError::Usage("missing n".into()))?;
    if is_line {
        return Ok(Graph::line(m, n));
    }
    let v = v.ok_or_else(|| GraphError::Usage("missing v".into()))?;
    let mut g = Graph::new(m, n, v);
    g.lines = lines;
    for (s, t, dir) in edges {
        g.add_edge(s, t, dir);
    }
    for h in hairs {
        g.add_hair(h);
    }
    g.check_well_formed()?;
    Ok(g)
}

fn parse_i32(s: &str) -> Result<i32, GraphError> {
    s.parse()
        .map_err(|_| GraphError::Usage(format!("bad integer {s:?}")))
}

fn strip_brackets(s: &str) -> Result<&str, GraphError> {
    s.strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| GraphError::Usage(format!("expected [...] but got {s:?}")))
}

/// JSON mirror of the text format.
#[derive(Serialize, Deserialize)]
pub struct GraphJson {
    pub m: i32,
    pub n: i32,
    pub v: u8,
    pub hairs: Vec<u8>,
    pub edges: Vec<EdgeJson>,
    #[serde(default)]
    pub line: bool,
}

#[derive(Serialize, Deserialize)]
pub struct EdgeJson {
    pub s: u8,
    pub t: u8,
    pub dir: bool,
}

pub fn graph_to_json(g: &Graph) -> GraphJson {
    GraphJson {
        m: g.m,
        n: g.n,
        v: g.nv,
        hairs: g.hairs.clone(),
        edges: g
            .edges
            .iter()
            .map(|e| EdgeJson {
                s: e.s,
                t: e.t,
                dir: e.dir,
            })
            .collect(),
        line: g.is_line(),
    }
}

pub fn graph_from_json(j: &GraphJson) -> Result<Graph, GraphError> {
    if j.line {
        return Ok(Graph::line(j.m, j.n));
    }
    let mut g = Graph::new(j.m, j.n, j.v);
    for e in &j.edges {
        g.add_edge(e.s, e.t, e.dir);
    }
    for &h in &j.hairs {
        g.add_hair(h);
    }
    g.check_well_formed()?;
    Ok(g)
}

/// Acting graph with a colour list: `... c=[w,b,w]` plus per-white slot
/// requirements `r=[2,1]`.
pub fn action_graph_to_text(a: &ActionGraph) -> String {
    let colors: Vec<&str> = a
        .black
        .iter()
        .map(|b| if *b { "b" } else { "w" })
        .collect();
    let reqs: Vec<String> = a.white_req.iter().map(|r| r.to_string()).collect();
    format!(
        "{} c=[{}] r=[{}]",
        graph_to_text(&a.graph),
        colors.join(","),
        reqs.join(",")
    )
}

pub fn action_graph_from_text(line: &str) -> Result<ActionGraph, GraphError> {
    let mut graph_part = String::new();
    let mut colors: Vec<bool> = Vec::new();
    let mut reqs: Vec<u8> = Vec::new();
    for tok in line.trim().split_whitespace() {
        if let Some(val) = tok.strip_prefix("c=") {
            for part in strip_brackets(val)?.split(',') {
                match part.trim() {
                    "w" => colors.push(false),
                    "b" => colors.push(true),
                    other => return Err(GraphError::Usage(format!("bad colour {other:?}"))),
                }
            }
        } else if let Some(val) = tok.strip_prefix("r=") {
            for part in strip_brackets(val)?.split(',') {
                if part.is_empty() {
                    continue;
                }
                reqs.push(
                    part.trim()
                        .parse()
                        .map_err(|_| GraphError::Usage(format!("bad requirement {part:?}")))?,
                );
            }
        } else {
            graph_part.push_str(tok);
            graph_part.push(' ');
        }
    }
    let graph = graph_from_text(graph_part.trim())?;
    if colors.len() != graph.nv as usize {
        return Err(GraphError::Usage(format!(
            "colour list has {} entries for {} vertices",
            colors.len(),
            graph.nv
        )));
    }
    let whites = colors.iter().filter(|b| !**b).count();
    if reqs.len() != whites {
        return Err(GraphError::Usage(format!(
            "{} slot requirements for {} white vertices",
            reqs.len(),
            whites
        )));
    }
    Ok(ActionGraph::new(graph, colors, reqs))
}

#[derive(Serialize, Deserialize)]
pub struct GraphSumJson {
    pub context: ContextJson,
    pub terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
pub struct ContextJson {
    pub m: i32,
    pub n: i32,
}

#[derive(Serialize, Deserialize)]
pub struct TermJson {
    pub graph: String,
    pub coeff: String,
}

pub fn sum_to_json(s: &GraphSum) -> GraphSumJson {
    GraphSumJson {
        context: ContextJson { m: s.m, n: s.n },
        terms: s
            .sorted_terms()
            .into_iter()
            .map(|(g, c)| TermJson {
                graph: graph_to_text(g),
                coeff: format_rat(c),
            })
            .collect(),
    }
}

pub fn sum_from_json(j: &GraphSumJson) -> Result<GraphSum, GraphError> {
    let mut s = GraphSum::zero(j.context.m, j.context.n);
    for t in &j.terms {
        let g = graph_from_text(&t.graph)?;
        if g.m != j.context.m || g.n != j.context.n {
            return Err(GraphError::ContextMismatch(
                "term context differs from sum context".into(),
            ));
        }
        s.add_graph(&g, &parse_rat(&t.coeff)?);
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sum::rat;

    #[test]
    fn text_round_trip() {
        let mut g = Graph::new(1, 3, 3);
        g.add_edge(0, 1, false);
        g.add_edge(1, 2, false);
        g.add_hair(2);
        let s = graph_to_text(&g);
        assert_eq!(graph_from_text(&s).unwrap(), g);
    }

    #[test]
    fn line_token() {
        let g = graph_from_text("G m=1 n=3 LINE").unwrap();
        assert!(g.is_line());
        assert_eq!(graph_from_text(&graph_to_text(&g)).unwrap(), g);
    }

    #[test]
    fn directed_edges() {
        let g = graph_from_text("G m=0 n=2 v=2 h=[] e=[0>1]").unwrap();
        assert!(g.edges[0].dir);
    }

    #[test]
    fn sum_json_round_trip() {
        let mut g = Graph::new(1, 3, 2);
        g.add_edge(0, 1, false);
        g.add_hair(0);
        let s = GraphSum::single(g).scale(&rat(2, 3));
        let j = sum_to_json(&s);
        let back = sum_from_json(&j).unwrap();
        assert_eq!(s, back);
    }
}
