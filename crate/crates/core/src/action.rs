//! The hair-reconnection action of directed acyclic graphs on hairy graphs.
//!
//! A directed acyclic graph with k vertices acts on a k-tuple of hairy
//! graphs: every edge (i, j) of the acting graph picks one hair of the i-th
//! input and one vertex of the j-th input and joins them into a new edge,
//! summed over all such choices.  Terms that would use a hair twice are zero,
//! and hairs not consumed survive as hairs of the output.  Vertices of the
//! acting graph may be coloured black, in which case the one-hair graph mu is
//! substituted there before acting.

use crate::graph::{Edge, Graph, GraphError};
use crate::sum::{GraphSum, Rat};
use num_traits::One;

// Sign bookkeeping: the orientation word of a hairy graph is
//   [internal edges][hair stubs][hair slots]
// where a hair consists of an edge stub (edge parity, odd iff n is even) and
// a symmetric-slot (suspension parity, odd iff m is odd); their product is
// the hair-swap parity of the table.  A union of parts concatenates their
// words and normalizes to this shape, which costs crossings of later parts'
// edges and stubs past earlier parts' stubs and slots.  Consuming a hair
// moves its stub to the end of the internal edge block (crossing the
// unconsumed stubs before it) and caps its slot (crossing the unconsumed
// slots behind it), then appends the new edge with the (anchor -> target)
// direction recorded in the endpoint order.
pub mod conv {
    use std::sync::atomic::{AtomicU16, Ordering};

    /// Bitmask selecting which crossing terms enter the assembly sign; the
    /// invariant suites (d^2 = 0, [mu,mu] = 0, bracket axioms) pin it.
    pub static RULE: AtomicU16 = AtomicU16::new(DEFAULT_RULE);

    pub const NORM_EDGE_STUB: u16 = 1; // union: later edges x earlier stubs (d_E)
    pub const NORM_EDGE_SLOT: u16 = 2; // union: later edges x earlier slots (d_E d_S)
    pub const NORM_STUB_SLOT: u16 = 4; // union: later stubs x earlier slots (d_E d_S)
    pub const OP_BEFORE_E: u16 = 8; // consumption: unconsumed before, d_E
    pub const OP_AFTER_E: u16 = 16; // consumption: unconsumed after, d_E
    pub const OP_BEFORE_S: u16 = 32; // consumption: unconsumed before, d_S
    pub const OP_AFTER_S: u16 = 64; // consumption: unconsumed after, d_S
    pub const OP_EDGES_E: u16 = 128; // consumption: edges present so far, d_E

    pub const DEFAULT_RULE: u16 = NORM_EDGE_STUB | OP_BEFORE_E;

    pub fn rule() -> u16 {
        RULE.load(Ordering::Relaxed)
    }

    pub fn set_rule(r: u16) {
        RULE.store(r, Ordering::Relaxed);
    }
}

/// A directed acyclic acting graph with white (input) and black (mu) slots.
/// `white_req` lists, per white vertex in vertex order, the total required
/// out-valence of that slot, i.e. the hair count an input must have; the
/// difference to the actual out-degree is the number of external legs, whose
/// hairs survive into the output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionGraph {
    pub graph: Graph,
    pub black: Vec<bool>,
    pub white_req: Vec<u8>,
}

impl ActionGraph {
    pub fn new(graph: Graph, black: Vec<bool>, white_req: Vec<u8>) -> Self {
        debug_assert_eq!(black.len(), graph.nv as usize);
        debug_assert_eq!(
            white_req.len(),
            black.iter().filter(|b| !**b).count(),
            "one requirement per white vertex"
        );
        ActionGraph {
            graph,
            black,
            white_req,
        }
    }

    /// All-white acting graph whose slot requirements match the given inputs.
    pub fn embedded(graph: Graph, hair_counts: &[usize]) -> Self {
        let req = hair_counts.iter().map(|&h| h as u8).collect();
        let black = vec![false; graph.nv as usize];
        ActionGraph::new(graph, black, req)
    }

    pub fn arity(&self) -> usize {
        self.black.iter().filter(|b| !**b).count()
    }

    pub fn white_vertices(&self) -> Vec<u8> {
        (0..self.graph.nv)
            .filter(|&v| !self.black[v as usize])
            .collect()
    }
}

#[derive(Clone, Copy)]
enum Anchor {
    Vertex(u8),
    FreeLine { partner: usize },
}

struct Assembler<'a> {
    parts: &'a [&'a Graph],
    offsets: Vec<u8>,
    token_start: Vec<usize>,
}

impl<'a> Assembler<'a> {
    fn new(parts: &'a [&'a Graph]) -> Result<Self, GraphError> {
        let k = parts.len();
        let mut offsets = vec![0u8; k];
        let mut token_start = vec![0usize; k];
        let mut acc = 0usize;
        let mut tok = 0usize;
        for pi in 0..k {
            offsets[pi] = acc as u8;
            token_start[pi] = tok;
            acc += parts[pi].nv as usize;
            tok += parts[pi].hairs.len() + 2 * parts[pi].lines as usize;
        }
        if acc > u8::MAX as usize {
            return Err(GraphError::Resource("too many vertices in union".into()));
        }
        Ok(Assembler {
            parts,
            offsets,
            token_start,
        })
    }

    /// Token list in part order: per part, its hairs then its line ends.
    fn tokens(&self) -> Vec<Anchor> {
        let mut toks = Vec::new();
        for (pi, p) in self.parts.iter().enumerate() {
            for &h in &p.hairs {
                toks.push(Anchor::Vertex(self.offsets[pi] + h));
            }
            for _ in 0..p.lines {
                let a = toks.len();
                toks.push(Anchor::FreeLine { partner: a + 1 });
                toks.push(Anchor::FreeLine { partner: a });
            }
        }
        toks
    }

    /// Tokens owned by part `pi`, as global token indices.
    fn part_tokens(&self, pi: usize) -> std::ops::Range<usize> {
        let start = self.token_start[pi];
        start..start + self.parts[pi].hairs.len() + 2 * self.parts[pi].lines as usize
    }

    fn global_vertices(&self, pi: usize) -> std::ops::Range<u8> {
        let off = self.offsets[pi];
        off..off + self.parts[pi].nv
    }

    /// Build the glued graph for one complete assignment.  `ops` lists, in
    /// the acting graph's edge order, the consumed token and the target
    /// vertex (global index).  A consumed hair becomes an edge, so it crosses
    /// the not-yet-consumed tokens behind it with the edge-swap parity;
    /// created edges are appended behind all original edges in op order, with
    /// the (anchor -> target) direction recorded in the endpoint order.
    fn assemble(&self, ops: &[(usize, u8)], m: i32, n: i32) -> (Graph, i8) {
        // object parities: edges and stubs odd iff n even, slots odd iff m odd
        let d_e = n.rem_euclid(2) == 0;
        let d_s = m.rem_euclid(2) == 1;
        let rule = conv::rule();
        let on = |bit: u16| rule & bit != 0;
        let mut anchors = self.tokens();
        let mut consumed = vec![false; anchors.len()];
        let mut line_alive: Vec<bool> = Vec::new();
        let mut edges: Vec<Edge> = Vec::new();
        // union normalization: later edges cross earlier stubs (and slots),
        // later stubs cross earlier slots
        let mut norm = 0usize;
        let mut hairs_before = 0usize;
        for (pi, p) in self.parts.iter().enumerate() {
            let off = self.offsets[pi];
            let e_i = p.edges.len();
            let r_i = p.hair_count();
            if d_e && on(conv::NORM_EDGE_STUB) {
                norm += e_i * hairs_before;
            }
            if d_e && d_s && on(conv::NORM_EDGE_SLOT) {
                norm += e_i * hairs_before;
            }
            if d_e && d_s && on(conv::NORM_STUB_SLOT) {
                norm += r_i * hairs_before;
            }
            hairs_before += r_i;
            for e in &p.edges {
                edges.push(Edge {
                    s: e.s + off,
                    t: e.t + off,
                    dir: e.dir,
                });
            }
            for _ in 0..p.lines {
                line_alive.push(true);
            }
        }
        let nv = self.parts.iter().map(|p| p.nv).sum::<u8>();
        // map token index -> line id for FreeLine tokens
        let mut line_id = vec![usize::MAX; anchors.len()];
        {
            let mut next = 0usize;
            let mut i = 0;
            while i < anchors.len() {
                if let Anchor::FreeLine { .. } = anchors[i] {
                    line_id[i] = next;
                    line_id[i + 1] = next;
                    next += 1;
                    i += 2;
                } else {
                    i += 1;
                }
            }
        }

        let mut sign = if norm % 2 == 1 { -1i8 } else { 1 };
        for &(tok, target) in ops {
            debug_assert!(!consumed[tok]);
            let before = consumed[..tok].iter().filter(|c| !**c).count();
            let after = consumed[tok + 1..].iter().filter(|c| !**c).count();
            let mut flips = 0usize;
            if d_e {
                if on(conv::OP_BEFORE_E) {
                    flips += before;
                }
                if on(conv::OP_AFTER_E) {
                    flips += after;
                }
                if on(conv::OP_EDGES_E) {
                    flips += edges.len();
                }
            }
            if d_s {
                if on(conv::OP_BEFORE_S) {
                    flips += before;
                }
                if on(conv::OP_AFTER_S) {
                    flips += after;
                }
            }
            if flips % 2 == 1 {
                sign = -sign;
            }
            consumed[tok] = true;
            match anchors[tok] {
                Anchor::Vertex(v) => {
                    edges.push(Edge {
                        s: v,
                        t: target,
                        dir: false,
                    });
                }
                Anchor::FreeLine { partner } => {
                    // first end of a line attached: the other end now dangles
                    // from the target like an ordinary hair
                    anchors[partner] = Anchor::Vertex(target);
                    line_alive[line_id[tok]] = false;
                }
            }
        }

        let mut hairs = Vec::new();
        let mut lines = 0u8;
        for (i, a) in anchors.iter().enumerate() {
            if consumed[i] {
                continue;
            }
            match a {
                Anchor::Vertex(v) => hairs.push(*v),
                Anchor::FreeLine { partner } => {
                    // count each surviving line once
                    if i < *partner {
                        lines += 1;
                    }
                }
            }
        }
        debug_assert_eq!(lines as usize, line_alive.iter().filter(|a| **a).count());

        let g = Graph {
            nv,
            lines,
            edges,
            hairs,
            m,
            n,
        };
        if std::env::var_os("HGC_TRACE").is_some() {
            let (c, cs) = g.canonicalize();
            let parts: Vec<String> = self
                .parts
                .iter()
                .map(|p| crate::textio::graph_to_text(p))
                .collect();
            eprintln!(
                "TRACE parts={parts:?} ops={ops:?} norm={norm} sign={sign} canon_sign={cs} canon={}",
                crate::textio::graph_to_text(&c)
            );
        }
        (g, sign)
    }
}

/// Strict action: zero unless the hair count of every input equals the
/// required out-valence of its slot (and mu, placed at black slots, matches
/// a requirement of one, so black vertices with out-degree > 1 act by zero).
pub fn hairy_action(
    a: &ActionGraph,
    inputs: &[&GraphSum],
    m: i32,
    n: i32,
) -> Result<GraphSum, GraphError> {
    if inputs.len() != a.arity() {
        return Err(GraphError::Usage(format!(
            "action arity {} but {} inputs",
            a.arity(),
            inputs.len()
        )));
    }
    let mut out = GraphSum::zero(m, n);
    let mu = Graph::mu(m, n);
    // expand the multilinear action over the input terms
    let mut occupants: Vec<(&Graph, Rat)> = Vec::new();
    expand_inputs(a, inputs, &mu, &mut occupants, m, n, &mut out)?;
    Ok(out)
}

fn expand_inputs<'g>(
    a: &ActionGraph,
    inputs: &[&'g GraphSum],
    mu: &'g Graph,
    chosen: &mut Vec<(&'g Graph, Rat)>,
    m: i32,
    n: i32,
    out: &mut GraphSum,
) -> Result<(), GraphError> {
    if chosen.len() == inputs.len() {
        // occupants in slot order
        let mut occ: Vec<&Graph> = Vec::with_capacity(a.graph.nv as usize);
        let mut req: Vec<usize> = Vec::with_capacity(a.graph.nv as usize);
        let mut wi = 0usize;
        let mut coeff = Rat::one();
        for v in 0..a.graph.nv {
            if a.black[v as usize] {
                occ.push(mu);
                req.push(1);
            } else {
                occ.push(chosen[wi].0);
                req.push(a.white_req[wi] as usize);
                wi += 1;
            }
        }
        for (_, c) in chosen.iter() {
            coeff *= c.clone();
        }
        act_on_occupants(&a.graph, &occ, &req, &coeff, m, n, out)?;
        return Ok(());
    }
    let idx = chosen.len();
    for (g, c) in inputs[idx].iter() {
        chosen.push((g, c.clone()));
        expand_inputs(a, inputs, mu, chosen, m, n, out)?;
        chosen.pop();
    }
    Ok(())
}

/// Sum over all reconnection assignments for one tuple of occupant graphs.
fn act_on_occupants(
    agraph: &Graph,
    occ: &[&Graph],
    req: &[usize],
    coeff: &Rat,
    m: i32,
    n: i32,
    out: &mut GraphSum,
) -> Result<(), GraphError> {
    for (v, part) in occ.iter().enumerate() {
        if part.hair_count() != req[v] {
            return Ok(()); // arity mismatch: the composition is zero
        }
        if req[v] < agraph.out_degree(v as u8) {
            return Ok(()); // fewer hairs than internal edges: nothing to attach
        }
    }
    let asm = Assembler::new(occ)?;
    let mut used = vec![false; asm.tokens().len()];
    let mut ops: Vec<(usize, u8)> = Vec::with_capacity(agraph.edges.len());
    assign_edges(agraph, occ, &asm, 0, &mut used, &mut ops, coeff, m, n, out);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn assign_edges(
    agraph: &Graph,
    occ: &[&Graph],
    asm: &Assembler,
    eidx: usize,
    used: &mut Vec<bool>,
    ops: &mut Vec<(usize, u8)>,
    coeff: &Rat,
    m: i32,
    n: i32,
    out: &mut GraphSum,
) {
    if eidx == agraph.edges.len() {
        let (g, s) = asm.assemble(ops, m, n);
        if s != 0 {
            let c = if s < 0 { -coeff.clone() } else { coeff.clone() };
            out.add_graph(&g, &c);
        }
        return;
    }
    let e = &agraph.edges[eidx];
    debug_assert!(e.dir);
    let src = e.s as usize;
    let tgt = e.t as usize;
    if occ[tgt].nv == 0 {
        return; // an arrow into a line graph: no vertex to hit, term vanishes
    }
    for tok in asm.part_tokens(src) {
        if used[tok] {
            continue;
        }
        for v in asm.global_vertices(tgt) {
            used[tok] = true;
            ops.push((tok, v));
            assign_edges(agraph, occ, asm, eidx + 1, used, ops, coeff, m, n, out);
            ops.pop();
            used[tok] = false;
        }
    }
}

/// Raw-representative action used by the coherence tests: occupants are
/// taken exactly as given, without canonicalizing first.
#[doc(hidden)]
pub fn act_embedded_raw(
    graph: &Graph,
    black: &[bool],
    occupants: &[&Graph],
    m: i32,
    n: i32,
) -> Result<GraphSum, GraphError> {
    let mu = Graph::mu(m, n);
    let mut occ: Vec<&Graph> = Vec::new();
    let mut req: Vec<usize> = Vec::new();
    let mut wi = 0;
    for v in 0..graph.nv {
        if black[v as usize] {
            if graph.out_degree(v) > 1 {
                return Ok(GraphSum::zero(m, n));
            }
            occ.push(&mu);
            req.push(1);
        } else {
            occ.push(occupants[wi]);
            req.push(occupants[wi].hair_count());
            wi += 1;
        }
    }
    let mut out = GraphSum::zero(m, n);
    act_on_occupants(graph, &occ, &req, &Rat::one(), m, n, &mut out)?;
    Ok(out)
}

/// Action with mu substituted into every black vertex.  Black vertices with
/// more than one outgoing edge give zero.
pub fn twist_substitute(
    a: &ActionGraph,
    inputs: &[&GraphSum],
    m: i32,
    n: i32,
) -> Result<GraphSum, GraphError> {
    for v in 0..a.graph.nv {
        if a.black[v as usize] && a.graph.out_degree(v) > 1 {
            return Ok(GraphSum::zero(m, n));
        }
    }
    hairy_action(a, inputs, m, n)
}

/// Convenience: act with an all-white plain directed graph on concrete
/// inputs, deriving each slot requirement from the input's hair count
/// (the embedding that attaches external legs in all possible ways).
pub fn act_embedded(
    graph: &Graph,
    black: &[bool],
    inputs: &[&GraphSum],
    m: i32,
    n: i32,
) -> Result<GraphSum, GraphError> {
    // requirements depend on the hair counts of the individual terms, so
    // expand the sums first
    let mut out = GraphSum::zero(m, n);
    let whites: Vec<u8> = (0..graph.nv).filter(|&v| !black[v as usize]).collect();
    if whites.len() != inputs.len() {
        return Err(GraphError::Usage(format!(
            "{} white slots but {} inputs",
            whites.len(),
            inputs.len()
        )));
    }
    for v in 0..graph.nv {
        if black[v as usize] && graph.out_degree(v) > 1 {
            return Ok(out);
        }
    }
    let mut chosen: Vec<(&Graph, Rat)> = Vec::new();
    expand_embedded(graph, black, inputs, &mut chosen, m, n, &mut out)?;
    Ok(out)
}

fn expand_embedded<'g>(
    graph: &Graph,
    black: &[bool],
    inputs: &[&'g GraphSum],
    chosen: &mut Vec<(&'g Graph, Rat)>,
    m: i32,
    n: i32,
    out: &mut GraphSum,
) -> Result<(), GraphError> {
    if chosen.len() == inputs.len() {
        let mu = Graph::mu(m, n);
        let mut occ: Vec<&Graph> = Vec::new();
        let mut req: Vec<usize> = Vec::new();
        let mut wi = 0;
        let mut coeff = Rat::one();
        for v in 0..graph.nv {
            if black[v as usize] {
                occ.push(&mu);
                req.push(1);
            } else {
                occ.push(chosen[wi].0);
                req.push(chosen[wi].0.hair_count());
                wi += 1;
            }
        }
        for (_, c) in chosen.iter() {
            coeff *= c.clone();
        }
        return act_on_occupants(graph, &occ, &req, &coeff, m, n, out);
    }
    let idx = chosen.len();
    for (g, c) in inputs[idx].iter() {
        chosen.push((g, c.clone()));
        expand_embedded(graph, black, inputs, chosen, m, n, out)?;
        chosen.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sum::rat_int;
    use num_traits::Signed;

    #[test]
    fn identity_slot_returns_input() {
        // single white vertex, no edges
        let mut h = Graph::new(1, 3, 2);
        h.add_edge(0, 1, false);
        h.add_hair(0);
        h.add_hair(1);
        let x = GraphSum::single(h);
        let slot = Graph::new(0, 2, 1);
        let a = ActionGraph::embedded(slot, &[2]);
        let y = hairy_action(&a, &[&x], 1, 3).unwrap();
        assert_eq!(y, x);
    }

    #[test]
    fn arity_mismatch_is_zero() {
        let mut h = Graph::new(1, 3, 2);
        h.add_edge(0, 1, false);
        h.add_hair(0);
        h.add_hair(1);
        let x = GraphSum::single(h);
        assert!(!x.is_zero());
        let slot = Graph::new(0, 2, 1);
        // requirement 1, input has 2 hairs
        let a = ActionGraph::new(slot, vec![false], vec![1]);
        let y = hairy_action(&a, &[&x], 1, 3).unwrap();
        assert!(y.is_zero());
    }

    #[test]
    fn pendant_mu_attachment() {
        // one white, one black, edge black -> white: attaches a pendant mu
        // vertex to the unique vertex of the input
        let x = GraphSum::single(Graph::mu(1, 3));
        let mut ag = Graph::new(0, 2, 2);
        ag.add_edge(1, 0, true); // vertex 1 black, arrow into white 0
        let a = ActionGraph::new(ag, vec![false, true], vec![1]);
        let y = twist_substitute(&a, &[&x], 1, 3).unwrap();
        assert_eq!(y.len(), 1);
        let (g, c) = &y.sorted_terms()[0];
        assert_eq!(g.nv, 2);
        assert_eq!(g.edges.len(), 1);
        assert_eq!(g.hair_count(), 1);
        assert_eq!(c.abs(), rat_int(1));
    }

    #[test]
    fn black_with_two_out_edges_is_zero() {
        let mut ag = Graph::new(0, 2, 3);
        ag.add_edge(2, 0, true);
        ag.add_edge(2, 1, true);
        let mut h = Graph::new(1, 3, 1);
        h.add_hair(0);
        let x = GraphSum::single(h.clone());
        let a = ActionGraph::new(ag, vec![false, false, true], vec![1, 1]);
        let y = twist_substitute(&a, &[&x, &x], 1, 3).unwrap();
        assert!(y.is_zero());
    }
}
