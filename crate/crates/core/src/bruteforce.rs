//! Independent brute-force oracles used by the test suites: exhaustive
//! canonical forms, automorphism searches, a from-scratch splitter and a
//! labelled slice enumerator.  Nothing here shares code with the optimized
//! paths it checks.

use crate::graph::{Edge, Graph};
use crate::parity::{permutation_sign, sort_parity, ParityProfile};
use crate::sum::{GraphSum, Rat};
use num_traits::One;
use rustc_hash::FxHashSet;

fn apply_perm(g: &Graph, sigma: &[u8], p: &ParityProfile) -> (Vec<Edge>, Vec<u8>, i8) {
    let mut flips = 0usize;
    let mut edges: Vec<Edge> = g
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
    let epar = sort_parity(&edges);
    edges.sort();
    let mut hairs: Vec<u8> = g.hairs.iter().map(|&h| sigma[h as usize]).collect();
    let hpar = sort_parity(&hairs);
    hairs.sort();
    let sign = p.vertex_sign(permutation_sign(sigma) < 0)
        * p.flip_sign(flips)
        * p.edge_sign(epar)
        * p.hair_sign(hpar);
    (edges, hairs, sign)
}

/// Exhaustive-canonicalization oracle: tries every permutation.
pub fn canonicalize_exhaustive(g: &Graph) -> (Graph, i8) {
    let p = g.parity();
    if g.lines > 0 && p.hair_swap != p.direction_flip {
        return (g.clone(), 0);
    }
    if g.lines > 1 && p.edge_swap {
        return (g.clone(), 0);
    }
    let perms = all_perms(g.nv);
    let mut best: Option<(Vec<Edge>, Vec<u8>)> = None;
    let mut best_sign = 0i8;
    let mut zero = false;
    for sigma in &perms {
        let (edges, hairs, sign) = apply_perm(g, sigma, &p);
        // duplicate edges or hairs of odd parity kill the graph
        if p.edge_swap && edges.windows(2).any(|w| w[0] == w[1]) {
            return (g.clone(), 0);
        }
        if p.hair_swap && hairs.windows(2).any(|w| w[0] == w[1]) {
            return (g.clone(), 0);
        }
        if p.direction_flip && g.edges.iter().any(|e| !e.dir && e.s == e.t) {
            return (g.clone(), 0);
        }
        match &best {
            None => {
                best = Some((edges, hairs));
                best_sign = sign;
            }
            Some(b) => match (&edges, &hairs).cmp(&(&b.0, &b.1)) {
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
        }
    }
    let (edges, hairs) = match best {
        Some(b) => b,
        None => (Vec::new(), Vec::new()),
    };
    let out = Graph {
        nv: g.nv,
        lines: g.lines,
        edges,
        hairs,
        m: g.m,
        n: g.n,
    };
    if zero {
        (out, 0)
    } else {
        (out, best_sign)
    }
}

/// All orientation-signed automorphisms; the graph is zero iff some sign is -1.
pub fn has_odd_automorphism(g: &Graph) -> bool {
    let p = g.parity();
    let (id_edges, id_hairs, id_sign) = apply_perm(g, &identity(g.nv), &p);
    for sigma in all_perms(g.nv) {
        let (edges, hairs, sign) = apply_perm(g, &sigma, &p);
        if edges == id_edges && hairs == id_hairs && sign != id_sign {
            return true;
        }
    }
    false
}

fn identity(n: u8) -> Vec<u8> {
    (0..n).collect()
}

fn all_perms(n: u8) -> Vec<Vec<u8>> {
    let mut out = vec![identity(n)];
    if n <= 1 {
        return out;
    }
    out.clear();
    permute(&mut identity(n), n as usize, &mut out);
    out
}

fn permute(cur: &mut Vec<u8>, k: usize, out: &mut Vec<Vec<u8>>) {
    if k <= 1 {
        out.push(cur.clone());
        return;
    }
    for i in 0..k {
        permute(cur, k - 1, out);
        if k % 2 == 0 {
            cur.swap(i, k - 1);
        } else {
            cur.swap(0, k - 1);
        }
    }
}

/// From-scratch splitter: enumerates bipartitions of the half-edges at every
/// vertex directly on the labelled graph, independently of `diff`.
pub fn split_oracle(g: &Graph, min_each_side: usize, directed: bool) -> GraphSum {
    let mut out = GraphSum::zero(g.m, g.n);
    let vnew = g.nv;
    for w in 0..g.nv {
        let mut slots: Vec<(usize, u8)> = Vec::new(); // (edge idx, side 0=s,1=t)
        for (i, e) in g.edges.iter().enumerate() {
            if e.s == w {
                slots.push((i, 0));
            }
            if e.t == w {
                slots.push((i, 1));
            }
        }
        let hair_slots: Vec<usize> = g
            .hairs
            .iter()
            .enumerate()
            .filter(|(_, &h)| h == w)
            .map(|(i, _)| i)
            .collect();
        let total = slots.len() + hair_slots.len();
        for mask in 0u32..(1 << total) {
            let moved = mask.count_ones() as usize;
            if moved < min_each_side || total - moved < min_each_side {
                continue;
            }
            if !directed && (mask & 1) != 0 {
                // fix the first half-edge to stay, avoiding the double count
                continue;
            }
            let mut h = g.clone();
            h.nv += 1;
            for (b, &(i, side)) in slots.iter().enumerate() {
                if mask & (1 << b) != 0 {
                    if side == 0 {
                        h.edges[i].s = vnew;
                    } else {
                        h.edges[i].t = vnew;
                    }
                }
            }
            for (b, &hi) in hair_slots.iter().enumerate() {
                if mask & (1 << (slots.len() + b)) != 0 {
                    h.hairs[hi] = vnew;
                }
            }
            h.edges.push(Edge {
                s: w,
                t: vnew,
                dir: directed,
            });
            out.add_graph(&h, &Rat::one());
        }
    }
    out
}

/// Labelled enumeration oracle: every labelled (multi)graph in the slice,
/// reduced by exhaustive canonicalization.
pub fn enumerate_oracle(
    m: i32,
    n: i32,
    nv: u8,
    ne: usize,
    nh: usize,
    directed: bool,
    filter: impl Fn(&Graph) -> bool,
) -> Vec<Graph> {
    let mut arcs: Vec<(u8, u8)> = Vec::new();
    for i in 0..nv {
        for j in 0..nv {
            if i == j {
                continue;
            }
            if directed || i < j {
                arcs.push((i, j));
            }
        }
    }
    let mut seen: FxHashSet<Graph> = FxHashSet::default();
    let mut out = Vec::new();
    let mut counts = vec![0usize; arcs.len()];
    // multisets of ne arcs
    fn rec(
        arcs: &[(u8, u8)],
        counts: &mut Vec<usize>,
        idx: usize,
        left: usize,
        f: &mut impl FnMut(&[usize]),
    ) {
        if idx == arcs.len() {
            if left == 0 {
                f(counts);
            }
            return;
        }
        for k in 0..=left {
            counts[idx] = k;
            rec(arcs, counts, idx + 1, left - k, f);
        }
        counts[idx] = 0;
    }
    let mut hair_assignment = vec![0u8; nh];
    rec(&arcs, &mut counts, 0, ne, &mut |counts| {
        // all functions hairs -> vertices
        fn hair_rec(
            nv: u8,
            slot: usize,
            hair_assignment: &mut Vec<u8>,
            f: &mut impl FnMut(&[u8]),
        ) {
            if slot == hair_assignment.len() {
                f(hair_assignment);
                return;
            }
            for v in 0..nv {
                hair_assignment[slot] = v;
                hair_rec(nv, slot + 1, hair_assignment, f);
            }
        }
        hair_rec(nv, 0, &mut hair_assignment, &mut |ha| {
            let mut g = Graph::new(m, n, nv);
            for (i, &(a, b)) in arcs.iter().enumerate() {
                for _ in 0..counts[i] {
                    g.add_edge(a, b, directed);
                }
            }
            for &h in ha {
                g.add_hair(h);
            }
            if !filter(&g) {
                return;
            }
            let (c, s) = canonicalize_exhaustive(&g);
            if s != 0 && seen.insert(c.clone()) {
                out.push(c);
            }
        });
    });
    out.sort();
    out
}

/// Orientation sign of the relabelling move g -> sigma(g), where sigma(g)
/// keeps the stored edge and hair order but renames endpoints.
pub fn relabel_sign(g: &Graph, sigma: &[u8]) -> i8 {
    let p = g.parity();
    let mut h = Graph::new(g.m, g.n, g.nv);
    h.lines = g.lines;
    for e in &g.edges {
        h.add_edge(sigma[e.s as usize], sigma[e.t as usize], e.dir);
    }
    for &a in &g.hairs {
        h.add_hair(sigma[a as usize]);
    }
    // both reach the same sorted labelled form; divide out the second move
    let (_, _, a) = apply_perm(g, sigma, &p);
    let (_, _, b) = apply_perm(&h, &identity(h.nv), &p);
    a * b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracles_agree_on_zero_and_signs() {
        // the fast and exhaustive forms may differ as labellings, but they
        // must agree on which graphs vanish and transform with equal signs
        let mut g = Graph::new(1, 3, 4);
        g.add_edge(2, 0, false);
        g.add_edge(3, 1, false);
        g.add_edge(0, 1, false);
        g.add_edge(2, 3, false);
        g.add_hair(1);
        g.add_hair(2);
        let (_, s1) = g.canonicalize();
        let (_, s2) = canonicalize_exhaustive(&g);
        assert_eq!(s1 == 0, s2 == 0);
        assert_eq!(has_odd_automorphism(&g), s1 == 0);

        // sign equivariance under an explicit relabelling
        let sigma = vec![2u8, 0, 3, 1];
        let mut h = Graph::new(1, 3, 4);
        for e in &g.edges {
            h.add_edge(sigma[e.s as usize], sigma[e.t as usize], e.dir);
        }
        for &a in &g.hairs {
            h.add_hair(sigma[a as usize]);
        }
        let (cg, sg) = g.canonicalize();
        let (ch, sh) = h.canonicalize();
        assert_eq!(cg, ch);
        assert_eq!(sh, sg * relabel_sign(&g, &sigma));
    }
}
