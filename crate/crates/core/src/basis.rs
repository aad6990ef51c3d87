//! Enumeration of slice bases: all canonical nonzero graphs with a given
//! vertex, edge and hair count, subject to structural flags.

use crate::graph::{vertex_cap, Graph, GraphError};
use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SliceParams {
    pub m: i32,
    pub n: i32,
    pub vertices: u8,
    pub edges: usize,
    pub hairs: usize,
    pub connected: bool,
    pub min_valence: usize,
    pub directed: bool,
    pub acyclic: bool,
    /// every vertex has >=2 incoming or >=2 outgoing edges
    pub two_in_or_two_out: bool,
    /// drop graphs containing a vertex with no outgoing edge (oriented quotient)
    pub every_vertex_out: bool,
    pub allow_tadpoles: bool,
}

impl SliceParams {
    pub fn undirected(m: i32, n: i32, vertices: u8, edges: usize, hairs: usize) -> Self {
        SliceParams {
            m,
            n,
            vertices,
            edges,
            hairs,
            connected: true,
            min_valence: 1,
            directed: false,
            acyclic: false,
            two_in_or_two_out: false,
            every_vertex_out: false,
            allow_tadpoles: false,
        }
    }

    pub fn gcor_slice(n: i32, vertices: u8, edges: usize) -> Self {
        SliceParams {
            m: 0,
            n,
            vertices,
            edges,
            hairs: 0,
            connected: true,
            min_valence: 2,
            directed: true,
            acyclic: true,
            two_in_or_two_out: false,
            every_vertex_out: false,
            allow_tadpoles: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Basis {
    pub params: SliceParams,
    pub graphs: Vec<Graph>,
}

impl Basis {
    pub fn index_map(&self) -> FxHashMap<Graph, usize> {
        self.graphs
            .iter()
            .enumerate()
            .map(|(i, g)| (g.clone(), i))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }
}

/// Complete duplicate-free list of canonical nonzero graphs in the slice,
/// ordered by canonical key.
pub fn enumerate_basis(params: &SliceParams) -> Result<Basis, GraphError> {
    if params.vertices as usize > vertex_cap() {
        return Err(GraphError::Resource(format!(
            "vertex count {} exceeds cap {}",
            params.vertices,
            vertex_cap()
        )));
    }
    let mut seen: FxHashSet<Graph> = FxHashSet::default();
    let mut out: Vec<Graph> = Vec::new();

    // the exceptional line graph occupies the (0 vertices, 2 hairs) slice
    if params.vertices == 0 {
        if params.edges == 0 && params.hairs == 2 && !params.directed {
            let l = Graph::line(params.m, params.n);
            let (c, s) = l.canonicalize();
            if s != 0 {
                out.push(c);
            }
        }
        return Ok(Basis {
            params: *params,
            graphs: out,
        });
    }

    let nv = params.vertices;
    let mut pairs: Vec<(u8, u8)> = Vec::new();
    for i in 0..nv {
        if params.allow_tadpoles {
            pairs.push((i, i));
        }
        for j in (i + 1)..nv {
            pairs.push((i, j));
        }
    }

    // multiplicity cap per unordered pair; duplicate parallel edges of equal
    // direction vanish when edge swaps are odd
    let edge_odd = crate::parity::ParityProfile::for_context(params.m, params.n).edge_swap;
    let dir_cap = if edge_odd { 1usize } else { params.edges };
    let pair_cap = if params.directed { 2 * dir_cap } else { dir_cap };

    let mut mult = vec![0usize; pairs.len()];
    enumerate_edge_multiplicities(params, &pairs, pair_cap, &mut mult, 0, params.edges, &mut |mult| {
        emit_with_orientations_and_hairs(params, &pairs, mult, dir_cap, &mut seen, &mut out);
    });

    out.sort();
    Ok(Basis {
        params: *params,
        graphs: out,
    })
}

fn enumerate_edge_multiplicities(
    params: &SliceParams,
    pairs: &[(u8, u8)],
    pair_cap: usize,
    mult: &mut Vec<usize>,
    idx: usize,
    remaining: usize,
    f: &mut impl FnMut(&[usize]),
) {
    if idx == pairs.len() {
        if remaining == 0 {
            f(mult);
        }
        return;
    }
    // capacity pruning
    if remaining > pair_cap * (pairs.len() - idx) {
        return;
    }
    // degree-sorted labelled representatives: once all pairs touching vertex
    // v are placed, deg(v) is final and must dominate later partial degrees.
    // This keeps at least one labelling per isomorphism class.
    let max_here = pair_cap.min(remaining);
    for k in 0..=max_here {
        mult[idx] = k;
        if degree_prefix_ok(params, pairs, mult, idx) {
            enumerate_edge_multiplicities(params, pairs, pair_cap, mult, idx + 1, remaining - k, f);
        }
    }
    mult[idx] = 0;
}

/// Restrict to labelled graphs whose edge-degree sequence is non-increasing;
/// every isomorphism class has such a labelling, and canonical dedup removes
/// the leftover multiplicity.  A vertex v is final once the pair cursor has
/// first coordinate > v (pairs are lexicographic), and a final vertex must
/// dominate the partial degree of its successor.
fn degree_prefix_ok(params: &SliceParams, pairs: &[(u8, u8)], mult: &[usize], upto: usize) -> bool {
    let nv = params.vertices as usize;
    let mut deg = vec![0usize; nv];
    for (i, &(a, b)) in pairs.iter().enumerate().take(upto + 1) {
        if a == b {
            deg[a as usize] += 2 * mult[i];
        } else {
            deg[a as usize] += mult[i];
            deg[b as usize] += mult[i];
        }
    }
    let cur_first = pairs[upto].0 as usize;
    for v in 1..nv {
        if cur_first >= v && deg[v] > deg[v - 1] {
            return false;
        }
    }
    true
}

fn emit_with_orientations_and_hairs(
    params: &SliceParams,
    pairs: &[(u8, u8)],
    mult: &[usize],
    dir_cap: usize,
    seen: &mut FxHashSet<Graph>,
    out: &mut Vec<Graph>,
) {
    // hair distributions: compositions of params.hairs over vertices
    let nv = params.vertices as usize;
    let mut hair_counts = vec![0usize; nv];
    distribute_hairs(params.hairs, 0, nv, &mut hair_counts, &mut |hair_counts| {
        if params.directed {
            let mut dirs = vec![0usize; pairs.len()];
            orient_pairs(pairs, mult, dir_cap, 0, &mut dirs, &mut |dirs| {
                build_and_keep(params, pairs, mult, Some(dirs), hair_counts, seen, out);
            });
        } else {
            build_and_keep(params, pairs, mult, None, hair_counts, seen, out);
        }
    });
}

fn distribute_hairs(
    remaining: usize,
    v: usize,
    nv: usize,
    counts: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]),
) {
    if v == nv {
        if remaining == 0 {
            f(counts);
        }
        return;
    }
    for k in 0..=remaining {
        counts[v] = k;
        distribute_hairs(remaining - k, v + 1, nv, counts, f);
    }
    counts[v] = 0;
}

fn orient_pairs(
    pairs: &[(u8, u8)],
    mult: &[usize],
    dir_cap: usize,
    idx: usize,
    dirs: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]),
) {
    if idx == pairs.len() {
        f(dirs);
        return;
    }
    // dirs[idx] = number of copies oriented from the smaller to the larger
    // endpoint; the rest point backwards
    for fwd in 0..=mult[idx] {
        if fwd > dir_cap || mult[idx] - fwd > dir_cap {
            continue;
        }
        dirs[idx] = fwd;
        orient_pairs(pairs, mult, dir_cap, idx + 1, dirs, f);
    }
    dirs[idx] = 0;
}

fn build_and_keep(
    params: &SliceParams,
    pairs: &[(u8, u8)],
    mult: &[usize],
    dirs: Option<&[usize]>,
    hair_counts: &[usize],
    seen: &mut FxHashSet<Graph>,
    out: &mut Vec<Graph>,
) {
    let mut g = Graph::new(params.m, params.n, params.vertices);
    for (i, &(a, b)) in pairs.iter().enumerate() {
        match dirs {
            Some(d) => {
                for _ in 0..d[i] {
                    g.add_edge(a, b, true);
                }
                for _ in 0..mult[i] - d[i] {
                    g.add_edge(b, a, true);
                }
            }
            None => {
                for _ in 0..mult[i] {
                    g.add_edge(a, b, false);
                }
            }
        }
    }
    for (v, &k) in hair_counts.iter().enumerate() {
        for _ in 0..k {
            g.add_hair(v as u8);
        }
    }

    if params.connected && !g.is_connected() {
        return;
    }
    if !g.meets_min_valence(params.min_valence) {
        return;
    }
    if params.acyclic && !g.is_acyclic() {
        return;
    }
    if params.two_in_or_two_out && !g.two_in_or_two_out() {
        return;
    }
    if params.every_vertex_out && !g.every_vertex_has_out_edge() {
        return;
    }
    let (c, s) = g.canonicalize();
    if s == 0 {
        return;
    }
    if seen.insert(c.clone()) {
        out.push(c);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_slice_is_one_dimensional() {
        // (v=2, e=3, h=0), n odd, connected, undirected
        let p = SliceParams::undirected(1, 3, 2, 3, 0);
        let b = enumerate_basis(&p).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b.graphs[0].edges.len(), 3);
    }

    #[test]
    fn mu_slice() {
        let p = SliceParams::undirected(1, 3, 1, 0, 1);
        let b = enumerate_basis(&p).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b.graphs[0], Graph::mu(1, 3));
    }

    #[test]
    fn line_slice() {
        let p = SliceParams::undirected(1, 3, 0, 0, 2);
        let b = enumerate_basis(&p).unwrap();
        assert_eq!(b.len(), 1);
        assert!(b.graphs[0].is_line());
    }

    #[test]
    fn no_multi_edges_when_n_even() {
        let p = SliceParams::undirected(1, 2, 2, 2, 0);
        let b = enumerate_basis(&p).unwrap();
        assert!(b.is_empty());
    }
}
