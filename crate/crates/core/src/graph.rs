//! Combinatorial graphs with orientation data and canonical forms.
//!
//! A `Graph` is a multigraph on vertices `0..nv`, possibly directed edge by
//! edge, with an ordered list of hairs (external legs) anchored at vertices.
//! The stored edge order, hair order and direction marks ARE the orientation
//! of the generator; relabelling or reordering multiplies the element by the
//! sign dictated by the [`ParityProfile`] of the ambient (m, n).
//!
//! The exceptional line graph L (no vertices, a single edge both of whose
//! ends are free) is represented by `lines = 1` with everything else empty;
//! more generally `lines` counts disjoint line components.

use crate::parity::{permutation_sign, sort_parity, ParityProfile};
use serde::{Deserialize, Serialize};

pub const DEFAULT_VERTEX_CAP: usize = 10;

/// Vertex bound for canonicalization and basis enumeration.  Overridable via
/// the HGC_VERTEX_CAP environment variable.
pub fn vertex_cap() -> usize {
    static CAP: std::sync::OnceLock<usize> = std::sync::OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("HGC_VERTEX_CAP")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or(DEFAULT_VERTEX_CAP)
    })
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Edge {
    pub s: u8,
    pub t: u8,
    pub dir: bool,
}

impl Edge {
    pub fn undirected(s: u8, t: u8) -> Self {
        Edge { s, t, dir: false }
    }
    pub fn directed(s: u8, t: u8) -> Self {
        Edge { s, t, dir: true }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Graph {
    pub nv: u8,
    pub lines: u8,
    pub edges: Vec<Edge>,
    pub hairs: Vec<u8>,
    pub m: i32,
    pub n: i32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    BadIndex(String),
    ContextMismatch(String),
    Resource(String),
    Usage(String),
}

impl std::fmt::Display for GraphError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GraphError::BadIndex(s) => write!(f, "bad index: {s}"),
            GraphError::ContextMismatch(s) => write!(f, "context mismatch: {s}"),
            GraphError::Resource(s) => write!(f, "resource bound exceeded: {s}"),
            GraphError::Usage(s) => write!(f, "usage error: {s}"),
        }
    }
}

impl std::error::Error for GraphError {}

impl Graph {
    pub fn new(m: i32, n: i32, nv: u8) -> Self {
        Graph {
            nv,
            lines: 0,
            edges: Vec::new(),
            hairs: Vec::new(),
            m,
            n,
        }
    }

    /// The exceptional line graph L.
    pub fn line(m: i32, n: i32) -> Self {
        Graph {
            nv: 0,
            lines: 1,
            edges: Vec::new(),
            hairs: Vec::new(),
            m,
            n,
        }
    }

    /// The one-vertex one-hair graph mu.
    pub fn mu(m: i32, n: i32) -> Self {
        let mut g = Graph::new(m, n, 1);
        g.hairs.push(0);
        g
    }

    pub fn is_line(&self) -> bool {
        self.nv == 0 && self.lines == 1 && self.edges.is_empty() && self.hairs.is_empty()
    }

    pub fn add_edge(&mut self, s: u8, t: u8, dir: bool) {
        self.edges.push(Edge { s, t, dir });
    }

    pub fn add_hair(&mut self, v: u8) {
        self.hairs.push(v);
    }

    /// Hairs including the two free ends of every line component.
    pub fn hair_count(&self) -> usize {
        self.hairs.len() + 2 * self.lines as usize
    }

    pub fn check_well_formed(&self) -> Result<(), GraphError> {
        for e in &self.edges {
            if e.s >= self.nv || e.t >= self.nv {
                return Err(GraphError::BadIndex(format!(
                    "edge ({},{}) on {} vertices",
                    e.s, e.t, self.nv
                )));
            }
        }
        for &h in &self.hairs {
            if h >= self.nv {
                return Err(GraphError::BadIndex(format!(
                    "hair at {} on {} vertices",
                    h, self.nv
                )));
            }
        }
        if self.nv as usize > vertex_cap() {
            return Err(GraphError::Resource(format!(
                "{} vertices exceeds cap {}",
                self.nv,
                vertex_cap()
            )));
        }
        Ok(())
    }

    pub fn parity(&self) -> ParityProfile {
        ParityProfile::for_context(self.m, self.n)
    }

    /// Total valence of vertex v: incident edge ends plus hairs.
    pub fn valence(&self, v: u8) -> usize {
        let mut d = 0;
        for e in &self.edges {
            if e.s == v {
                d += 1;
            }
            if e.t == v {
                d += 1;
            }
        }
        d + self.hairs.iter().filter(|&&h| h == v).count()
    }

    pub fn out_degree(&self, v: u8) -> usize {
        self.edges.iter().filter(|e| e.dir && e.s == v).count()
    }

    pub fn in_degree(&self, v: u8) -> usize {
        self.edges.iter().filter(|e| e.dir && e.t == v).count()
    }

    pub fn hairs_at(&self, v: u8) -> usize {
        self.hairs.iter().filter(|&&h| h == v).count()
    }

    pub fn has_tadpole(&self) -> bool {
        self.edges.iter().any(|e| e.s == e.t)
    }

    pub fn meets_min_valence(&self, k: usize) -> bool {
        (0..self.nv).all(|v| self.valence(v) >= k)
    }

    /// Every vertex has at least two incoming or at least two outgoing edges.
    pub fn two_in_or_two_out(&self) -> bool {
        (0..self.nv).all(|v| self.in_degree(v) >= 2 || self.out_degree(v) >= 2)
    }

    /// Every vertex has at least one outgoing edge (used by the oriented
    /// quotient where sink-containing graphs act by zero).
    pub fn every_vertex_has_out_edge(&self) -> bool {
        (0..self.nv).all(|v| self.out_degree(v) >= 1)
    }

    /// Connected as a topological space; pure-line graphs count per component.
    pub fn is_connected(&self) -> bool {
        let parts = self.component_count();
        parts <= 1
    }

    pub fn component_count(&self) -> usize {
        let mut parts = self.lines as usize;
        if self.nv == 0 {
            return parts;
        }
        let mut seen = vec![false; self.nv as usize];
        for start in 0..self.nv {
            if seen[start as usize] {
                continue;
            }
            parts += 1;
            let mut stack = vec![start];
            seen[start as usize] = true;
            while let Some(v) = stack.pop() {
                for e in &self.edges {
                    let w = if e.s == v {
                        e.t
                    } else if e.t == v {
                        e.s
                    } else {
                        continue;
                    };
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        stack.push(w);
                    }
                }
            }
        }
        parts
    }

    /// First Betti number, summed over components.
    pub fn loop_order(&self) -> i64 {
        if self.nv == 0 {
            return 0;
        }
        self.edges.len() as i64 - self.nv as i64 + (self.component_count() - self.lines as usize) as i64
    }

    /// No directed cycle among the directed edges (undirected edges ignored).
    pub fn is_acyclic(&self) -> bool {
        let n = self.nv as usize;
        let mut indeg = vec![0usize; n];
        for e in &self.edges {
            if e.dir {
                indeg[e.t as usize] += 1;
            }
        }
        let mut queue: Vec<u8> = (0..self.nv).filter(|&v| indeg[v as usize] == 0).collect();
        let mut removed = 0;
        while let Some(v) = queue.pop() {
            removed += 1;
            for e in &self.edges {
                if e.dir && e.s == v {
                    indeg[e.t as usize] -= 1;
                    if indeg[e.t as usize] == 0 {
                        queue.push(e.t);
                    }
                }
            }
        }
        removed == n
    }

    fn relabel_edges(&self, sigma: &[u8]) -> (Vec<Edge>, usize) {
        let mut flips = 0usize;
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let mut s = sigma[e.s as usize];
                let mut t = sigma[e.t as usize];
                if !e.dir && s > t {
                    std::mem::swap(&mut s, &mut t);
                    flips += 1;
                }
                Edge { s, t, dir: e.dir }
            })
            .collect();
        (edges, flips)
    }

    /// Canonical form under vertex relabelling together with the sign of the
    /// move, or sign 0 if the graph carries an orientation-reversing
    /// automorphism (and is therefore zero in the complex).
    pub fn canonicalize(&self) -> (Graph, i8) {
        let p = self.parity();
        // Structural zeroes that no relabelling can remove.
        if p.direction_flip && self.edges.iter().any(|e| !e.dir && e.s == e.t) {
            return (self.clone(), 0);
        }
        if self.lines > 0 && p.hair_swap != p.direction_flip {
            // swapping the two ends of a line is a hair transposition plus a flip
            return (self.clone(), 0);
        }
        if self.lines > 1 && p.edge_swap {
            return (self.clone(), 0);
        }
        {
            // multiplicity checks are label-invariant, do them once
            let (mut norm, _) = self.relabel_edges(&identity(self.nv));
            norm.sort();
            if p.edge_swap && norm.windows(2).any(|w| w[0] == w[1]) {
                return (self.clone(), 0);
            }
            let mut hs = self.hairs.clone();
            hs.sort();
            if p.hair_swap && hs.windows(2).any(|w| w[0] == w[1]) {
                return (self.clone(), 0);
            }
        }
        if self.nv == 0 {
            return (self.clone(), 1);
        }

        let classes = self.vertex_classes();
        let mut best: Option<(Vec<Edge>, Vec<u8>)> = None;
        let mut best_sign = 0i8;
        let mut zero = false;

        self.for_each_class_permutation(&classes, |sigma| {
            let (mut edges, flips) = self.relabel_edges(sigma);
            let edge_par = sort_parity(&edges);
            edges.sort();
            let mut hairs: Vec<u8> = self.hairs.iter().map(|&h| sigma[h as usize]).collect();
            let hair_par = sort_parity(&hairs);
            hairs.sort();

            let sigma_par = permutation_sign(sigma) < 0;
            let sign = p.vertex_sign(sigma_par)
                * p.flip_sign(flips)
                * p.edge_sign(edge_par)
                * p.hair_sign(hair_par);

            match &best {
                Some((be, bh)) => match (&edges, &hairs).cmp(&(be, bh)) {
                    std::cmp::Ordering::Less => {
                        best = Some((edges, hairs));
                        best_sign = sign;
                        zero = false;
                    }
                    std::cmp::Ordering::Equal => {
                        if sign != best_sign {
                            zero = true;
                        }
                    }
                    std::cmp::Ordering::Greater => {}
                },
                None => {
                    best = Some((edges, hairs));
                    best_sign = sign;
                }
            }
        });

        let (edges, hairs) = best.expect("at least the identity permutation");
        let g = Graph {
            nv: self.nv,
            lines: self.lines,
            edges,
            hairs,
            m: self.m,
            n: self.n,
        };
        if zero {
            (g, 0)
        } else {
            (g, best_sign)
        }
    }

    /// Partition vertices into relabelling classes by iterated degree
    /// refinement.  Classes are ordered; a candidate labelling assigns the
    /// label block of each class to its members in some order.
    fn vertex_classes(&self) -> Vec<Vec<u8>> {
        let n = self.nv as usize;
        // initial invariant: degrees in every flavour
        let mut keys: Vec<Vec<u64>> = (0..self.nv)
            .map(|v| {
                vec![
                    self.valence(v) as u64,
                    self.out_degree(v) as u64,
                    self.in_degree(v) as u64,
                    self.hairs_at(v) as u64,
                ]
            })
            .collect();
        let mut class_of = rank_keys(&keys);
        for _ in 0..3 {
            for v in 0..n {
                let mut nb: Vec<u64> = Vec::new();
                for e in &self.edges {
                    // undirected ends are indistinguishable regardless of the
                    // stored endpoint order
                    if e.s as usize == v {
                        nb.push(class_of[e.t as usize] as u64 * 4 + if e.dir { 1 } else { 0 });
                    }
                    if e.t as usize == v {
                        nb.push(class_of[e.s as usize] as u64 * 4 + if e.dir { 3 } else { 0 });
                    }
                }
                nb.sort_unstable();
                keys[v] = vec![class_of[v] as u64];
                keys[v].extend(nb);
            }
            let refined = rank_keys(&keys);
            if refined == class_of {
                break;
            }
            class_of = refined;
        }
        let num_classes = class_of.iter().max().map(|&c| c + 1).unwrap_or(0);
        let mut classes = vec![Vec::new(); num_classes];
        for v in 0..self.nv {
            classes[class_of[v as usize]].push(v);
        }
        classes
    }

    /// Run `f` over every vertex relabelling that respects the classes.
    /// sigma maps old label -> new label; class i occupies the contiguous
    /// block of new labels after classes 0..i.
    fn for_each_class_permutation(&self, classes: &[Vec<u8>], mut f: impl FnMut(&[u8])) {
        let n = self.nv as usize;
        let mut sigma = vec![0u8; n];
        // per-class permutations, generated once
        let perms: Vec<Vec<Vec<u8>>> = classes
            .iter()
            .map(|c| all_permutations(c.len() as u8))
            .collect();
        let offsets: Vec<u8> = {
            let mut off = Vec::with_capacity(classes.len());
            let mut acc = 0u8;
            for c in classes {
                off.push(acc);
                acc += c.len() as u8;
            }
            off
        };
        let mut idx = vec![0usize; classes.len()];
        loop {
            for (ci, class) in classes.iter().enumerate() {
                let perm = &perms[ci][idx[ci]];
                for (k, &v) in class.iter().enumerate() {
                    sigma[v as usize] = offsets[ci] + perm[k];
                }
            }
            f(&sigma);
            // odometer
            let mut carry = true;
            for ci in 0..classes.len() {
                if !carry {
                    break;
                }
                idx[ci] += 1;
                if idx[ci] < perms[ci].len() {
                    carry = false;
                } else {
                    idx[ci] = 0;
                }
            }
            if carry {
                break;
            }
        }
    }
}

fn identity(n: u8) -> Vec<u8> {
    (0..n).collect()
}

fn all_permutations(n: u8) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur: Vec<u8> = (0..n).collect();
    heap_permute(&mut cur, n as usize, &mut out);
    out
}

fn heap_permute(cur: &mut Vec<u8>, k: usize, out: &mut Vec<Vec<u8>>) {
    if k <= 1 {
        out.push(cur.clone());
        return;
    }
    for i in 0..k {
        heap_permute(cur, k - 1, out);
        if k % 2 == 0 {
            cur.swap(i, k - 1);
        } else {
            cur.swap(0, k - 1);
        }
    }
}

fn rank_keys(keys: &[Vec<u64>]) -> Vec<usize> {
    let mut sorted: Vec<&Vec<u64>> = keys.iter().collect();
    sorted.sort();
    sorted.dedup();
    keys.iter()
        .map(|k| sorted.binary_search(&k).unwrap())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta(n: i32) -> Graph {
        let mut g = Graph::new(0, n, 2);
        g.add_edge(0, 1, false);
        g.add_edge(0, 1, false);
        g.add_edge(0, 1, false);
        g
    }

    #[test]
    fn double_edge_vanishes_for_even_n() {
        let mut g = Graph::new(0, 2, 2);
        g.add_edge(0, 1, false);
        g.add_edge(0, 1, false);
        let (_, s) = g.canonicalize();
        assert_eq!(s, 0);
    }

    #[test]
    fn theta_survives_odd_n() {
        let (_, s) = theta(1).canonicalize();
        assert_eq!(s.abs(), 1);
        let (_, s) = theta(2).canonicalize();
        assert_eq!(s, 0);
    }

    #[test]
    fn relabelled_edge_gives_same_canonical_graph() {
        let mut g1 = Graph::new(1, 3, 2);
        g1.add_edge(1, 0, false);
        let mut g2 = Graph::new(1, 3, 2);
        g2.add_edge(0, 1, false);
        let (c1, s1) = g1.canonicalize();
        let (c2, s2) = g2.canonicalize();
        assert_eq!(c1, c2);
        // n odd: the flip of the single edge costs a sign, the vertex swap another
        assert_eq!(s1.abs(), 1);
        assert_eq!(s2.abs(), 1);
    }

    #[test]
    fn hedgehog_survives_at_1_3() {
        // two vertices, double edge, one hair on each: must be nonzero for the
        // worked bracket examples to exist
        let mut g = Graph::new(1, 3, 2);
        g.add_edge(0, 1, false);
        g.add_edge(0, 1, false);
        g.add_hair(0);
        g.add_hair(1);
        let (_, s) = g.canonicalize();
        assert_eq!(s.abs(), 1);
    }

    #[test]
    fn line_graph_is_nonzero_at_1_3() {
        let (c, s) = Graph::line(1, 3).canonicalize();
        assert!(c.is_line());
        assert_eq!(s, 1);
    }

    #[test]
    fn canonicalize_is_idempotent() {
        let mut g = Graph::new(1, 3, 3);
        g.add_edge(2, 0, false);
        g.add_edge(1, 2, false);
        g.add_edge(0, 1, false);
        g.add_hair(2);
        let (c, s) = g.canonicalize();
        assert_eq!(s.abs(), 1);
        let (c2, s2) = c.canonicalize();
        assert_eq!(c, c2);
        assert_eq!(s2, 1);
    }
}
