//! Operadic insertion for plain directed graphs and the induced Lie bracket
//! on the directed graph complexes.

use crate::complex::{degree, ComplexContext};
use crate::graph::{Edge, Graph, GraphError};
use crate::sum::{GraphSum, Rat};
use num_traits::One;

/// Insert `guest` into the `slot`-th vertex of `host` and sum over all ways
/// of reconnecting the edge ends incident to the slot onto guest vertices.
/// Guest vertices take the labels slot..slot+gv-1; later host vertices shift
/// up.  Host edges keep their positions, guest edges are appended.
pub fn insert(host: &Graph, slot: u8, guest: &Graph) -> Result<GraphSum, GraphError> {
    if slot >= host.nv {
        return Err(GraphError::Usage(format!(
            "slot {} out of range ({} vertices)",
            slot, host.nv
        )));
    }
    if host.m != guest.m || host.n != guest.n {
        return Err(GraphError::ContextMismatch("insert".into()));
    }
    let gv = guest.nv;
    if gv == 0 {
        return Err(GraphError::Usage("guest without vertices".into()));
    }
    let relabel = |v: u8| -> u8 {
        if v < slot {
            v
        } else {
            v + gv - 1
        }
    };
    // half-edges of host at the slot: (edge index, endpoint side)
    let mut halves: Vec<(usize, bool)> = Vec::new();
    for (i, e) in host.edges.iter().enumerate() {
        if e.s == slot {
            halves.push((i, false));
        }
        if e.t == slot {
            halves.push((i, true));
        }
    }

    let mut out = GraphSum::zero(host.m, host.n);
    let mut choice = vec![0u8; halves.len()];
    loop {
        // build one reconnection term
        let mut edges: Vec<Edge> = host
            .edges
            .iter()
            .map(|e| Edge {
                s: relabel(e.s),
                t: relabel(e.t),
                dir: e.dir,
            })
            .collect();
        for (k, &(i, tside)) in halves.iter().enumerate() {
            let target = slot + choice[k];
            if tside {
                edges[i].t = target;
            } else {
                edges[i].s = target;
            }
        }
        for e in &guest.edges {
            edges.push(Edge {
                s: e.s + slot,
                t: e.t + slot,
                dir: e.dir,
            });
        }
        let g = Graph {
            nv: host.nv + gv - 1,
            lines: 0,
            edges,
            hairs: Vec::new(),
            m: host.m,
            n: host.n,
        };
        out.add_graph(&g, &Rat::one());

        // odometer over guest-vertex choices
        let mut k = 0;
        loop {
            if k == choice.len() {
                return Ok(out);
            }
            choice[k] += 1;
            if choice[k] < gv {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// Pre-Lie product: sum of insertions of y into every vertex of x.
pub fn pre_lie(x: &GraphSum, y: &GraphSum) -> Result<GraphSum, GraphError> {
    if x.m != y.m || x.n != y.n {
        return Err(GraphError::ContextMismatch("pre_lie".into()));
    }
    let mut out = GraphSum::zero(x.m, x.n);
    for (gx, cx) in x.iter() {
        for (gy, cy) in y.iter() {
            let c = cx * cy;
            for slot in 0..gx.nv {
                let ins = insert(gx, slot, gy)?;
                out.add_assign(&ins.scale(&c));
            }
        }
    }
    Ok(out)
}

/// Graded commutator of the insertion pre-Lie products.  Inputs must be
/// degree-homogeneous; the Koszul sign uses the plain grading.
pub fn gc_bracket(x: &GraphSum, y: &GraphSum, ctx: ComplexContext) -> Result<GraphSum, GraphError> {
    let xy = pre_lie(x, y)?;
    let yx = pre_lie(y, x)?;
    let dx = sum_degree(x, ctx);
    let dy = sum_degree(y, ctx);
    let sign = if (dx * dy) % 2 == 0 {
        -Rat::one()
    } else {
        Rat::one()
    };
    GraphSum::combine(&xy, &yx, &sign)
}

/// Degree of a homogeneous sum (panics in debug if mixed).
pub fn sum_degree(x: &GraphSum, ctx: ComplexContext) -> i64 {
    let mut it = x.iter();
    let d = it.next().map(|(g, _)| degree(g, ctx)).unwrap_or(0);
    debug_assert!(
        x.iter().all(|(g, _)| degree(g, ctx) == d),
        "inhomogeneous sum"
    );
    d
}

/// The image of the Lie generator: the two-term directed edge combination.
pub fn lie_generator(n: i32) -> GraphSum {
    let mut g1 = Graph::new(0, n, 2);
    g1.add_edge(0, 1, true);
    let mut g2 = Graph::new(0, n, 2);
    g2.add_edge(1, 0, true);
    let mut s = GraphSum::single(g1);
    s.add_graph(&g2, &Rat::one());
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sum::rat_int;
    use num_traits::Signed;

    #[test]
    fn unit_of_composition() {
        let mut host = Graph::new(0, 2, 2);
        host.add_edge(0, 1, true);
        let unit = Graph::new(0, 2, 1);
        let out = insert(&host, 0, &unit).unwrap();
        assert_eq!(out, GraphSum::single(host));
    }

    #[test]
    fn reconnection_count_for_edge_into_edge() {
        // inserting a directed edge into the tail of a directed edge gives
        // 2*2 = 4 labelled reconnection terms before canonicalization
        let mut host = Graph::new(0, 2, 2);
        host.add_edge(0, 1, true);
        let guest = host.clone();
        let mut count = 0usize;
        // count labelled terms by re-running the assignment loop: each term
        // contributes coefficient +-1, and none merge to zero individually
        let out = insert(&host, 0, &guest).unwrap();
        for (_, c) in out.iter() {
            let v: num_bigint::BigInt = c.numer().clone();
            count += v.magnitude().try_into().unwrap_or(0usize);
        }
        // canonical merging may cancel, but the total unsigned mass of the
        // four assignments bounds it
        assert!(count <= 4 && !out.is_zero());
    }

    #[test]
    fn disjoint_union_when_slot_is_isolated() {
        let mut host = Graph::new(0, 2, 3);
        host.add_edge(0, 1, true);
        // vertex 2 is isolated; a path guest avoids the odd swap of two
        // identical edge components
        let mut guest = Graph::new(0, 2, 3);
        guest.add_edge(0, 1, true);
        guest.add_edge(1, 2, true);
        let out = insert(&host, 2, &guest).unwrap();
        assert_eq!(out.len(), 1);
        let (g, c) = &out.sorted_terms()[0];
        assert_eq!(g.nv, 5);
        assert_eq!(g.edges.len(), 3);
        assert_eq!(c.abs(), rat_int(1));
    }

    #[test]
    fn lie_generator_squares_to_zero() {
        let ctx = ComplexContext::gcor(2);
        let e = lie_generator(2);
        let sq = gc_bracket(&e, &e, ctx).unwrap();
        assert!(sq.is_zero(), "generator bracket should vanish: {sq:?}");
    }
}
