//! The Lie structures on the hairy complexes: the standard bracket, the
//! two-loop Maurer-Cartan element and its extension, the twisted (Shoikhet)
//! bracket and higher operations, and the cup product with one-hair graphs.

use crate::action::act_embedded;
use crate::basis::{enumerate_basis, SliceParams};
use crate::complex::{degree, ComplexContext};
use crate::diff::{delta_split, delta_split_sum};
use crate::graph::{Graph, GraphError};
use crate::linalg::{SolveOutcome, SparseMat};
use crate::operad::gc_bracket;
use crate::pbw::bernoulli_star;
use crate::sum::{rat, rat_int, GraphSum, Rat};
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Global normalization of the twisted operations, pinned so that the
/// Shoikhet bracket of the line graph with itself is exactly +1 times the
/// theta graph with one hair.
fn shoikhet_norm() -> Rat {
    rat(-1, 2)
}

/// Pre-Lie style product: attach one hair of x to one vertex of y, summed
/// over all choices.
pub fn hair_product(
    x: &GraphSum,
    y: &GraphSum,
    ctx: ComplexContext,
) -> Result<GraphSum, GraphError> {
    if x.m != y.m || x.n != y.n {
        return Err(GraphError::ContextMismatch("hair_product".into()));
    }
    let mut e12 = Graph::new(0, ctx.m + 1, 2);
    e12.add_edge(0, 1, true);
    act_embedded(&e12, &[false, false], &[x, y], x.m, x.n)
}

/// Degree parity entering the graded commutator; the complex is a shifted
/// Lie algebra, so the bracket is antisymmetric with respect to the degree
/// shifted by one.
pub(crate) fn bracket_parity(x: &GraphSum, ctx: ComplexContext) -> i64 {
    let mut it = x.iter();
    match it.next() {
        Some((g, _)) => {
            (degree(g, ctx) + crate::parity::BRACKET_SHIFT.load(std::sync::atomic::Ordering::Relaxed) as i64)
                .rem_euclid(2)
        }
        None => 0,
    }
}

/// Standard hairy bracket: the graded commutator of the hair product.
pub fn std_bracket(
    x: &GraphSum,
    y: &GraphSum,
    ctx: ComplexContext,
) -> Result<GraphSum, GraphError> {
    let xy = hair_product(x, y, ctx)?;
    let yx = hair_product(y, x, ctx)?;
    let sign = if bracket_parity(x, ctx) * bracket_parity(y, ctx) % 2 == 1 {
        Rat::one()
    } else {
        -Rat::one()
    };
    GraphSum::combine(&xy, &yx, &sign)
}

/// Loop-order graded Maurer-Cartan series of directed acyclic graphs.
#[derive(Clone, Debug)]
pub struct MCElement {
    /// parameter of the acting complex (2 for the Shoikhet structure)
    pub gc_n: i32,
    pub terms_by_loop: BTreeMap<i64, GraphSum>,
    pub scale: Rat,
}

impl MCElement {
    pub fn empty(gc_n: i32) -> Self {
        MCElement {
            gc_n,
            terms_by_loop: BTreeMap::new(),
            scale: Rat::zero(),
        }
    }

    pub fn term(&self, loops: i64) -> Option<&GraphSum> {
        self.terms_by_loop.get(&loops)
    }

    pub fn max_loops(&self) -> i64 {
        self.terms_by_loop.keys().max().copied().unwrap_or(0)
    }

    /// delta(m_g) + 1/2 sum_{a+b=g} [m_a, m_b] per stored loop order.
    pub fn closure_residuals(&self) -> Result<BTreeMap<i64, GraphSum>, GraphError> {
        let ctx = ComplexContext::gcor(self.gc_n);
        let mut out = BTreeMap::new();
        for (&g, mg) in &self.terms_by_loop {
            let mut res = delta_split_sum(mg, ctx);
            for (&a, ma) in &self.terms_by_loop {
                let b = g - a;
                if let Some(mb) = self.terms_by_loop.get(&b) {
                    let br = gc_bracket(ma, mb, ctx)?;
                    res.add_assign(&br.scale(&rat(1, 2)));
                }
            }
            out.insert(g, res);
        }
        Ok(out)
    }
}

/// The three four-vertex five-edge directed acyclic graphs of the two-loop
/// class, with unsigned coefficients (1, 2, 1).  The relative signs depend on
/// the orientation conventions, so they are fixed at run time by requiring
/// delta-closedness; the canonically least graph gets a positive coefficient.
pub fn mc_element_2loop(lambda: &Rat) -> MCElement {
    let mut mc = MCElement::empty(2);
    mc.scale = lambda.clone();
    if lambda.is_zero() {
        return mc;
    }
    let combo = two_loop_class();
    mc.terms_by_loop.insert(2, combo.scale(lambda));
    mc
}

/// The delta-closed (1, 2, 1) combination at loop order two, cached.
pub fn two_loop_class() -> GraphSum {
    static CACHE: std::sync::OnceLock<GraphSum> = std::sync::OnceLock::new();
    CACHE
        .get_or_init(|| {
            let ctx = ComplexContext::gcor(2);
            let mk = |arcs: &[(u8, u8)]| {
                let mut g = Graph::new(0, 2, 4);
                for &(s, t) in arcs {
                    g.add_edge(s, t, true);
                }
                g
            };
            // vertices: 1, 2 are the middle pair, 3 the right vertex, 0 the left
            let a = mk(&[(1, 2), (3, 2), (3, 1), (0, 1), (0, 2)]);
            let b = mk(&[(1, 2), (2, 3), (1, 3), (0, 1), (0, 2)]);
            let c = mk(&[(1, 2), (2, 3), (1, 3), (1, 0), (2, 0)]);
            let base = [(a, 1i64), (b, 2), (c, 1)];
            // resolve the per-graph signs by delta-closedness
            for signs in 0..8u8 {
                let mut s = GraphSum::zero(0, 2);
                for (k, (g, c)) in base.iter().enumerate() {
                    let eps = if signs & (1 << k) != 0 { -1 } else { 1 };
                    s.add_graph(g, &rat_int(c * eps));
                }
                if s.is_zero() {
                    continue;
                }
                if delta_split_sum(&s, ctx).is_zero() {
                    // normalize the overall sign: least canonical key positive
                    let lead = s.sorted_terms()[0].1.clone();
                    if lead < Rat::zero() {
                        return s.scale(&rat_int(-1));
                    }
                    return s;
                }
            }
            panic!("no sign assignment makes the two-loop class closed");
        })
        .clone()
}

/// Extend a Maurer-Cartan element to four loops by solving
/// delta m4 = -1/2 [m2, m2] in the (v=6, e=9) slice.
pub fn mc_extend(mc: &MCElement, target_loops: i64) -> Result<MCElement, GraphError> {
    if target_loops <= mc.max_loops() {
        return Ok(mc.clone());
    }
    if target_loops != 4 {
        return Err(GraphError::Usage(
            "only the extension to four loops is supported".into(),
        ));
    }
    let ctx = ComplexContext::gcor(mc.gc_n);
    let m2 = mc
        .term(2)
        .ok_or_else(|| GraphError::Usage("no two-loop term to extend".into()))?;
    let bracket = gc_bracket(m2, m2, ctx)?;
    let rhs = bracket.scale(&rat(-1, 2));

    // unknowns: the degree-1 four-loop slice (6 vertices, 9 edges)
    let slice = SliceParams::gcor_slice(mc.gc_n, 6, 9);
    let basis = enumerate_basis(&slice)?;
    // rows indexed lazily by every graph reachable from the slice
    let mut row_of: rustc_hash::FxHashMap<Graph, usize> = rustc_hash::FxHashMap::default();
    let mut cols: Vec<Vec<(usize, Rat)>> = Vec::with_capacity(basis.len());
    for g in &basis.graphs {
        let image = delta_split(g, ctx);
        let mut col = Vec::with_capacity(image.len());
        for (h, c) in image.iter() {
            let next = row_of.len();
            let row = *row_of.entry(h.clone()).or_insert(next);
            col.push((row, c.clone()));
        }
        cols.push(col);
    }
    for (h, _) in rhs.iter() {
        let next = row_of.len();
        row_of.entry(h.clone()).or_insert(next);
    }
    let mut mat = SparseMat::new(row_of.len(), basis.len());
    for (j, col) in cols.iter().enumerate() {
        for (i, c) in col {
            mat.push(*i, j, c.clone());
        }
    }
    mat.finish();
    let mut b = vec![Rat::zero(); row_of.len()];
    for (h, c) in rhs.iter() {
        b[row_of[h]] = c.clone();
    }

    match mat.solve(&b)? {
        SolveOutcome::Solution(z) => {
            let mut m4 = GraphSum::zero(0, mc.gc_n);
            for (j, c) in z.iter().enumerate() {
                if !c.is_zero() {
                    m4.add_canonical(basis.graphs[j].clone(), c.clone());
                }
            }
            let mut out = mc.clone();
            out.terms_by_loop.insert(4, m4);
            // re-check the closure exactly
            let res = out.closure_residuals()?;
            if res.values().any(|r| !r.is_zero()) {
                return Err(GraphError::Usage(
                    "extension produced a non-closed element".into(),
                ));
            }
            Ok(out)
        }
        SolveOutcome::Infeasible { rank_a, rank_aug } => Err(GraphError::Usage(format!(
            "[m2,m2] is not exact (rank {rank_a} vs augmented {rank_aug}); \
             this would falsify the sign table or the bracket"
        ))),
    }
}

/// Parity used for Koszul reordering of inputs into acting slots: the degree
/// shifted by m, which matches the parity of the orientation word.
fn slot_parity(x: &GraphSum, ctx: ComplexContext) -> i64 {
    let mut it = x.iter();
    match it.next() {
        Some((g, _)) => (degree(g, ctx) + ctx.m as i64).rem_euclid(2),
        None => 0,
    }
}

/// Twisted binary operation from the Maurer-Cartan element: the standard
/// bracket plus, for every stored term of the element, every ordered choice
/// of two input slots with mu filling the remaining vertices.
pub fn shoikhet_bracket(
    x: &GraphSum,
    y: &GraphSum,
    mc: &MCElement,
    ctx: ComplexContext,
) -> Result<GraphSum, GraphError> {
    let mut out = std_bracket(x, y, ctx)?;
    out.add_assign(&mc_binary_part(x, y, mc, ctx)?);
    Ok(out)
}

/// The correction part of the twisted bracket (`shoikhet - standard`).
pub fn mc_binary_part(
    x: &GraphSum,
    y: &GraphSum,
    mc: &MCElement,
    ctx: ComplexContext,
) -> Result<GraphSum, GraphError> {
    linfty_from_mc(mc, &[x, y], ctx)
}

/// k-ary twisted operation: sum over terms of the Maurer-Cartan element and
/// over injective placements of the inputs on its vertices, black vertices
/// receiving mu.
pub fn linfty_from_mc(
    mc: &MCElement,
    inputs: &[&GraphSum],
    ctx: ComplexContext,
) -> Result<GraphSum, GraphError> {
    if inputs.len() < 2 {
        return Err(GraphError::Usage("arity must be at least 2".into()));
    }
    if mc.gc_n != ctx.m + 1 {
        return Err(GraphError::ContextMismatch(format!(
            "acting complex parameter {} does not match m+1 = {}",
            mc.gc_n,
            ctx.m + 1
        )));
    }
    let k = inputs.len();
    let mut out = GraphSum::zero(ctx.m, ctx.n);
    let parities: Vec<i64> = inputs.iter().map(|s| slot_parity(s, ctx)).collect();
    for mg in mc.terms_by_loop.values() {
        for (gamma, cg) in mg.iter() {
            let nv = gamma.nv as usize;
            if k > nv {
                continue;
            }
            // ordered injective placements input -> vertex
            let mut slots = vec![usize::MAX; k];
            let mut used = vec![false; nv];
            place_inputs(
                gamma, cg, inputs, &parities, &mut slots, &mut used, 0, ctx, &mut out,
            )?;
        }
    }
    Ok(out.scale(&shoikhet_norm()))
}

#[allow(clippy::too_many_arguments)]
fn place_inputs(
    gamma: &Graph,
    cg: &Rat,
    inputs: &[&GraphSum],
    parities: &[i64],
    slots: &mut Vec<usize>,
    used: &mut Vec<bool>,
    idx: usize,
    ctx: ComplexContext,
    out: &mut GraphSum,
) -> Result<(), GraphError> {
    let k = inputs.len();
    if idx == k {
        // black vertices: the rest; they act by zero unless out-degree <= 1
        let nv = gamma.nv as usize;
        let mut black = vec![true; nv];
        for &s in slots.iter() {
            black[s] = false;
        }
        for v in 0..nv {
            if black[v] && gamma.out_degree(v as u8) > 1 {
                return Ok(());
            }
        }
        // reorder the inputs into slot order with the word-parity Koszul sign
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by_key(|&i| slots[i]);
        let mut sign = 1i64;
        for i in 0..k {
            for j in (i + 1)..k {
                if slots[i] > slots[j] && parities[i] % 2 == 1 && parities[j] % 2 == 1 {
                    sign = -sign;
                }
            }
        }
        let ordered: Vec<&GraphSum> = order.iter().map(|&i| inputs[i]).collect();
        let term = act_embedded(gamma, &black, &ordered, ctx.m, ctx.n)?;
        let coeff = cg * rat_int(sign);
        out.add_assign(&term.scale(&coeff));
        return Ok(());
    }
    for v in 0..gamma.nv as usize {
        if used[v] {
            continue;
        }
        used[v] = true;
        slots[idx] = v;
        place_inputs(gamma, cg, inputs, parities, slots, used, idx + 1, ctx, out)?;
        slots[idx] = usize::MAX;
        used[v] = false;
    }
    Ok(())
}

/// Cup product with a one-hair graph: the disjoint union plus the chain
/// corrections weighted by Bernoulli numbers.
pub fn cup_one_hair(
    x: &GraphSum,
    x1: &GraphSum,
    n_max: usize,
    ctx: ComplexContext,
) -> Result<GraphSum, GraphError> {
    for (g, _) in x1.iter() {
        if g.hair_count() != 1 {
            return Err(GraphError::Usage(
                "second cup argument must have exactly one hair".into(),
            ));
        }
    }
    let mut out = GraphSum::zero(ctx.m, ctx.n);
    // disjoint union term: the empty acting graph on two slots
    let union_graph = Graph::new(0, ctx.m + 1, 2);
    out.add_assign(&act_embedded(
        &union_graph,
        &[false, false],
        &[x, x1],
        ctx.m,
        ctx.n,
    )?);
    for j in 1..=n_max {
        let bj = bernoulli_star(j as u64);
        if bj.is_zero() {
            continue;
        }
        let factorial: u64 = (2..=j as u64).product::<u64>().max(1);
        let weight = bj / Rat::from_integer(factorial.into());
        // chain acting graph: white x at 0, white x1 at 1, black chain 2..j+2
        // with arrows x -> every chain vertex, x1 -> last chain vertex, and
        // chain vertex i+1 -> chain vertex i
        let mut ag = Graph::new(0, ctx.m + 1, (j + 2) as u8);
        let chain: Vec<u8> = (2..(j + 2) as u8).collect();
        for &c in &chain {
            ag.add_edge(0, c, true);
        }
        ag.add_edge(1, chain[j - 1], true);
        for w in 1..j {
            ag.add_edge(chain[w], chain[w - 1], true);
        }
        let mut black = vec![true; (j + 2) as usize];
        black[0] = false;
        black[1] = false;
        let term = act_embedded(&ag, &black, &[x, x1], ctx.m, ctx.n)?;
        out.add_assign(&term.scale(&weight));
    }
    Ok(out)
}

/// The Bernoulli weight with the sign convention used by the cup product;
/// see `pbw` for the symmetrization oracle pinning it.
pub fn bernoulli(j: u64) -> Rat {
    crate::pbw::bernoulli(j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::ValencePolicy;
    use num_traits::Signed;

    fn ctx13() -> ComplexContext {
        ComplexContext::hairy(1, 3, ValencePolicy::AtLeastOne)
    }

    #[test]
    fn bracket_of_mu_with_itself_vanishes() {
        let mu = GraphSum::single(Graph::mu(1, 3));
        let b = std_bracket(&mu, &mu, ctx13()).unwrap();
        assert!(b.is_zero(), "got {:?}", b.sorted_terms());
    }

    #[test]
    fn bracket_of_lines_vanishes() {
        let l = GraphSum::single(Graph::line(1, 3));
        let b = std_bracket(&l, &l, ctx13()).unwrap();
        assert!(b.is_zero());
    }

    #[test]
    fn two_loop_class_is_closed_and_unit_normalized() {
        let s = two_loop_class();
        assert_eq!(s.len(), 3);
        let coeffs: Vec<Rat> = s.sorted_terms().iter().map(|(_, c)| (*c).clone()).collect();
        let mut mags: Vec<Rat> = coeffs.iter().map(|c| c.clone() * c.signum()).collect();
        mags.sort();
        assert_eq!(mags, vec![rat_int(1), rat_int(1), rat_int(2)]);
        assert!(delta_split_sum(&s, ComplexContext::gcor(2)).is_zero());
    }

    #[test]
    fn lambda_zero_is_standard() {
        let mc = mc_element_2loop(&Rat::zero());
        assert!(mc.terms_by_loop.is_empty());
    }
}
