//! The differentials: vertex splitting, the hair piece [mu, -], the deformed
//! even-m differential, and assembly of differential matrices.

use crate::basis::Basis;
use crate::complex::{ComplexContext, Variant};
use crate::graph::{Edge, Graph, GraphError};
use crate::linalg::SparseMat;
use crate::structures::std_bracket;
use crate::sum::{rat_int, GraphSum, Rat};
use num_traits::One;

/// Half-edges incident to a vertex: (edge index, endpoint side) for edge
/// ends, then hair indices.
fn incidences(g: &Graph, w: u8) -> (Vec<(usize, bool)>, Vec<usize>) {
    let mut ends = Vec::new();
    for (i, e) in g.edges.iter().enumerate() {
        if e.s == w {
            ends.push((i, false));
        }
        if e.t == w {
            ends.push((i, true));
        }
    }
    let hs = g
        .hairs
        .iter()
        .enumerate()
        .filter(|(_, &h)| h == w)
        .map(|(i, _)| i)
        .collect();
    (ends, hs)
}

/// Vertex-splitting part of the differential: replace a vertex by two
/// vertices joined by a new edge and distribute its half-edges over the two,
/// each side receiving at least one and meeting the valence policy.  The
/// retained vertex keeps its label, the other side becomes the last vertex,
/// and the new edge is appended behind all existing edges.
pub fn delta_split(g: &Graph, ctx: ComplexContext) -> GraphSum {
    let mut out = GraphSum::zero(g.m, g.n);
    if g.nv == 0 {
        return out;
    }
    let directed = ctx.variant == Variant::PlainDirectedAcyclic;
    let min_orig = ctx.min_valence().saturating_sub(1).max(1);
    let vnew = g.nv;
    for w in 0..g.nv {
        let (ends, hs) = incidences(g, w);
        let k = ends.len() + hs.len();
        if k < 2 * min_orig {
            continue;
        }
        // a subset marks the half-edges that move to the new vertex; for
        // undirected contexts half-edge 0 stays put to count each splitting
        // once, for directed ones the arrow breaks the symmetry instead
        let first_movable = if directed { 0 } else { 1 };
        for mask in 1u32..(1u32 << k) {
            if mask.count_ones() as usize == k {
                continue;
            }
            if !directed && (mask & 1) != 0 {
                continue;
            }
            let moved = mask.count_ones() as usize;
            if moved < min_orig || k - moved < min_orig {
                continue;
            }
            let _ = first_movable;
            let mut edges = g.edges.clone();
            for (b, &(i, tside)) in ends.iter().enumerate() {
                if mask & (1 << b) != 0 {
                    if tside {
                        edges[i].t = vnew;
                    } else {
                        edges[i].s = vnew;
                    }
                }
            }
            let mut hairs = g.hairs.clone();
            for (b, &hi) in hs.iter().enumerate() {
                if mask & (1 << (ends.len() + b)) != 0 {
                    hairs[hi] = vnew;
                }
            }
            edges.push(Edge {
                s: w,
                t: vnew,
                dir: directed,
            });
            let split = Graph {
                nv: g.nv + 1,
                lines: g.lines,
                edges,
                hairs,
                m: g.m,
                n: g.n,
            };
            out.add_graph(&split, &Rat::one());
        }
    }
    out
}

pub fn delta_split_sum(x: &GraphSum, ctx: ComplexContext) -> GraphSum {
    let mut out = GraphSum::zero(x.m, x.n);
    for (g, c) in x.iter() {
        out.add_assign(&delta_split(g, ctx).scale(c));
    }
    out
}

/// Keep only terms all of whose vertices meet the policy valence.
pub fn policy_filter(s: &GraphSum, ctx: ComplexContext) -> GraphSum {
    let k = ctx.min_valence();
    s.filtered(|g| g.meets_min_valence(k))
}

/// The hair piece of the differential: the standard bracket with mu,
/// filtered by the valence policy.
pub fn delta_hair(g: &Graph, ctx: ComplexContext) -> GraphSum {
    debug_assert!(ctx.is_hairy());
    let mu = GraphSum::single(Graph::mu(g.m, g.n));
    let x = GraphSum::single(g.clone());
    let b = std_bracket(&mu, &x, ctx).expect("same context");
    policy_filter(&b, ctx)
}

pub fn delta_hair_sum(x: &GraphSum, ctx: ComplexContext) -> GraphSum {
    let mut out = GraphSum::zero(x.m, x.n);
    for (g, c) in x.iter() {
        out.add_assign(&delta_hair(g, ctx).scale(c));
    }
    out
}

/// Full differential: splitting plus the hair piece for the hairy variant,
/// splitting alone for the plain ones.
pub fn delta(g: &Graph, ctx: ComplexContext) -> GraphSum {
    let mut out = delta_split(g, ctx);
    if ctx.is_hairy() {
        out.add_assign(&delta_hair(g, ctx));
    }
    out
}

pub fn delta_sum(x: &GraphSum, ctx: ComplexContext) -> GraphSum {
    let mut out = GraphSum::zero(x.m, x.n);
    for (g, c) in x.iter() {
        out.add_assign(&delta(g, ctx).scale(c));
    }
    out
}

/// Deformed differential piece for even m: for each k <= k_max, reconnect k
/// hairs onto one new mu-vertex, weighted 1/k!.
pub fn deformed_delta_even_m(
    g: &Graph,
    ctx: ComplexContext,
    k_max: usize,
) -> Result<GraphSum, GraphError> {
    if ctx.m % 2 != 0 {
        return Err(GraphError::Usage("deformation requires even m".into()));
    }
    if k_max < 2 {
        return Err(GraphError::Usage("k_max must be at least 2".into()));
    }
    let mut out = GraphSum::zero(g.m, g.n);
    let x = GraphSum::single(g.clone());
    if x.is_zero() {
        return Ok(out);
    }
    for k in 2..=k_max.min(g.hair_count()) {
        let factorial: u64 = (2..=k as u64).product();
        // acting graph: white slot 0 with k arrows into black vertex 1
        let mut ag = Graph::new(0, ctx.m + 1, 2);
        for _ in 0..k {
            ag.add_edge(0, 1, true);
        }
        let term = crate::action::act_embedded(&ag, &[false, true], &[&x], g.m, g.n)?;
        out.add_assign(&term.scale(&Rat::new(1.into(), factorial.into())));
    }
    Ok(policy_filter(&out, ctx))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DiffKind {
    Split,
    Hair,
    Full,
    Deformed(usize),
}

/// Column j holds the coordinates of the differential of src[j] in dst.
/// A term outside dst signals a slice-parameter bug and is an error.
pub fn differential_matrix(
    src: &Basis,
    dst: &Basis,
    which: DiffKind,
    ctx: ComplexContext,
) -> Result<SparseMat, GraphError> {
    use rayon::prelude::*;
    let index = dst.index_map();
    let cols: Result<Vec<Vec<(usize, Rat)>>, GraphError> = src
        .graphs
        .par_iter()
        .map(|g| {
            let image = match which {
                DiffKind::Split => delta_split(g, ctx),
                DiffKind::Hair => delta_hair(g, ctx),
                DiffKind::Full => delta(g, ctx),
                DiffKind::Deformed(k_max) => {
                    let mut d = delta(g, ctx);
                    d.add_assign(&deformed_delta_even_m(g, ctx, k_max)?);
                    d
                }
            };
            let mut col = Vec::with_capacity(image.len());
            for (h, c) in image.iter() {
                match index.get(h) {
                    Some(&row) => col.push((row, c.clone())),
                    None => {
                        return Err(GraphError::Usage(format!(
                            "differential term not found in target slice: {h:?}"
                        )))
                    }
                }
            }
            col.sort_by_key(|(r, _)| *r);
            Ok(col)
        })
        .collect();
    let cols = cols?;
    let mut mat = SparseMat::new(dst.graphs.len(), src.graphs.len());
    for (j, col) in cols.into_iter().enumerate() {
        for (i, c) in col {
            mat.push(i, j, c);
        }
    }
    Ok(mat)
}

/// d(d(x)) accumulated without a target basis, for the sign-table suite.
pub fn delta_squared(g: &Graph, ctx: ComplexContext) -> GraphSum {
    delta_sum(&delta(g, ctx), ctx)
}

/// Convenience scalar versions used in tests.
pub fn one() -> Rat {
    Rat::one()
}
pub fn minus_one() -> Rat {
    rat_int(-1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::ValencePolicy;

    fn hairy13() -> ComplexContext {
        ComplexContext::hairy(1, 3, ValencePolicy::AtLeastOne)
    }

    #[test]
    fn splitting_mu_is_zero() {
        let ctx = hairy13();
        let d = delta_split(&Graph::mu(1, 3), ctx);
        assert!(d.is_zero());
    }

    #[test]
    fn splitting_line_is_zero() {
        let ctx = hairy13();
        let d = delta_split(&Graph::line(1, 3), ctx);
        assert!(d.is_zero());
    }

    #[test]
    fn split_respects_reduced_policy() {
        // a 4-valent vertex admits splittings with >=2 on each side only;
        // (m,n) = (1,2) keeps multiple hairs on one vertex nonzero
        let ctx3 = ComplexContext::hairy(1, 2, ValencePolicy::AtLeastThree);
        let mut g = Graph::new(1, 2, 1);
        g.add_hair(0);
        g.add_hair(0);
        g.add_hair(0);
        g.add_hair(0);
        let d = delta_split(&g, ctx3);
        for (h, _) in d.iter() {
            assert!(h.meets_min_valence(3));
        }
        assert!(!d.is_zero());
    }

    #[test]
    fn deformed_needs_two_hairs() {
        let ctx = ComplexContext::hairy(0, 2, ValencePolicy::AtLeastOne);
        let d = deformed_delta_even_m(&Graph::mu(0, 2), ctx, 3).unwrap();
        assert!(d.is_zero());
        assert!(deformed_delta_even_m(&Graph::mu(1, 3), hairy13(), 3).is_err());
    }
}
