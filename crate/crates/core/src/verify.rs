//! The invariant suite behind `verify`: sign-table d^2 checks, bracket
//! axioms, Maurer-Cartan closure, PBW weights and rank cross-checks, with a
//! machine-readable pass/fail report.

use crate::basis::{enumerate_basis, SliceParams};
use crate::complex::{degree, ComplexContext, ValencePolicy};
use crate::diff::{delta, delta_hair_sum, delta_split_sum, delta_sum};
use crate::graph::{Graph, GraphError};
use crate::structures::{mc_element_2loop, std_bracket, two_loop_class};
use crate::sum::{rat_int, GraphSum, Rat};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

pub fn check(name: &str, passed: bool, detail: impl Into<String>) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        passed,
        detail: detail.into(),
    }
}

/// d^2 = 0 on a whole slice, with the second application memoized across
/// sources.  Returns the number of source graphs checked.
pub fn delta_squared_on_slice(params: &SliceParams, ctx: ComplexContext) -> Result<usize, String> {
    let basis = enumerate_basis(params).map_err(|e| e.to_string())?;
    let firsts: Vec<GraphSum> = basis
        .graphs
        .par_iter()
        .map(|g| delta(g, ctx))
        .collect();
    // distinct first-level targets
    let mut targets: Vec<&Graph> = Vec::new();
    {
        let mut seen: FxHashMap<&Graph, ()> = FxHashMap::default();
        for d in &firsts {
            for (g, _) in d.iter() {
                if seen.insert(g, ()).is_none() {
                    targets.push(g);
                }
            }
        }
    }
    let images: FxHashMap<&Graph, GraphSum> = targets
        .par_iter()
        .map(|g| (*g, delta(g, ctx)))
        .collect();
    for (src, d1) in basis.graphs.iter().zip(&firsts) {
        let mut acc = GraphSum::zero(ctx.m, ctx.n);
        for (g, c) in d1.iter() {
            acc.add_assign(&images[g].scale(c));
        }
        if !acc.is_zero() {
            return Err(format!(
                "d^2 != 0 on {} ({} residual terms)",
                crate::textio::graph_to_text(src),
                acc.len()
            ));
        }
    }
    Ok(basis.len())
}

/// The slices of the sign-table acceptance criterion.
pub fn sign_table_slices(
    v_max: u8,
    e_max: usize,
    h_max: usize,
) -> Vec<(SliceParams, ComplexContext)> {
    let mut out = Vec::new();
    for &(m, n) in &[(0, 2), (1, 2), (1, 3), (2, 3)] {
        for &policy in &[ValencePolicy::AtLeastOne, ValencePolicy::AtLeastThree] {
            let ctx = ComplexContext::hairy(m, n, policy);
            for v in 1..=v_max {
                for e in 0..=e_max {
                    for h in 0..=h_max {
                        // connectivity bound; skip impossible slices early
                        if e + h < 1 || (e as i64) < v as i64 - 1 {
                            continue;
                        }
                        let mut p = SliceParams::undirected(m, n, v, e, h);
                        p.min_valence = ctx.min_valence();
                        out.push((p, ctx));
                    }
                }
            }
        }
    }
    out
}

pub fn run_sign_table_suite(v_max: u8, e_max: usize, h_max: usize) -> Vec<CheckResult> {
    let slices = sign_table_slices(v_max, e_max, h_max);
    slices
        .into_iter()
        .map(|(p, ctx)| {
            let name = format!(
                "d2_zero m={} n={} v={} e={} h={} minval={}",
                p.m, p.n, p.vertices, p.edges, p.hairs, p.min_valence
            );
            match delta_squared_on_slice(&p, ctx) {
                Ok(count) => check(&name, true, format!("{count} graphs")),
                Err(e) => check(&name, false, e),
            }
        })
        .collect()
}

/// Random connected hairy graph for property tests.
pub fn random_hairy_graph(rng: &mut ChaCha8Rng, m: i32, n: i32, max_v: u8) -> Graph {
    loop {
        let nv = rng.gen_range(1..=max_v);
        let extra = rng.gen_range(0..=2usize);
        let ne = (nv as usize).saturating_sub(1) + extra;
        let nh = rng.gen_range(1..=3usize);
        let mut g = Graph::new(m, n, nv);
        // random spanning tree then extra edges
        for v in 1..nv {
            let u = rng.gen_range(0..v);
            g.add_edge(u, v, false);
        }
        for _ in 0..extra.min(ne) {
            let a = rng.gen_range(0..nv);
            let b = rng.gen_range(0..nv);
            if a != b {
                g.add_edge(a.min(b), a.max(b), false);
            }
        }
        for _ in 0..nh {
            g.add_hair(rng.gen_range(0..nv));
        }
        let (c, s) = g.canonicalize();
        if s != 0 {
            return c;
        }
    }
}

/// Pool of distinct small nonzero hairy graphs, deterministic per seed.
pub fn graph_pool(m: i32, n: i32, size: usize, seed: u64) -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    while out.len() < size {
        let g = random_hairy_graph(&mut rng, m, n, 4);
        if seen.insert(g.clone()) {
            out.push(g);
        }
    }
    out
}

fn shifted_parity(g: &Graph, ctx: ComplexContext) -> i64 {
    (degree(g, ctx) + ctx.m as i64).rem_euclid(2)
}

/// Graded antisymmetry, Jacobi and the chain rule for the standard bracket
/// on a pool of graphs.
pub fn run_bracket_axioms(ctx: ComplexContext, pool: &[Graph]) -> Vec<CheckResult> {
    let mut results = Vec::new();
    let sums: Vec<GraphSum> = pool.iter().map(|g| GraphSum::single(g.clone())).collect();

    // antisymmetry with the word-parity Koszul sign
    let mut anti_ok = true;
    let mut anti_detail = String::new();
    'outer: for (i, x) in sums.iter().enumerate() {
        for (j, y) in sums.iter().enumerate() {
            let xy = std_bracket(x, y, ctx).unwrap();
            let yx = std_bracket(y, x, ctx).unwrap();
            let px = shifted_parity(&pool[i], ctx);
            let py = shifted_parity(&pool[j], ctx);
            let sign = if px * py % 2 == 1 { 1 } else { -1 };
            let rhs = yx.scale(&rat_int(sign));
            if xy != rhs {
                anti_ok = false;
                anti_detail = format!("fails for pool[{i}], pool[{j}]");
                break 'outer;
            }
        }
    }
    results.push(check("bracket_antisymmetry", anti_ok, anti_detail));

    // graded Jacobi: [[x,y],z] = [x,[y,z]] - (-1)^{<x><y>} [y,[x,z]]
    let mut jac_ok = true;
    let mut jac_detail = String::new();
    'jac: for (i, x) in sums.iter().enumerate() {
        for (j, y) in sums.iter().enumerate() {
            for (k, z) in sums.iter().enumerate() {
                let lhs = std_bracket(&std_bracket(x, y, ctx).unwrap(), z, ctx).unwrap();
                let a = std_bracket(x, &std_bracket(y, z, ctx).unwrap(), ctx).unwrap();
                let b = std_bracket(y, &std_bracket(x, z, ctx).unwrap(), ctx).unwrap();
                let px = shifted_parity(&pool[i], ctx);
                let py = shifted_parity(&pool[j], ctx);
                let sign = if px * py % 2 == 1 { 1 } else { -1 };
                let rhs = GraphSum::combine(&a, &b, &rat_int(sign)).unwrap();
                if lhs != rhs {
                    jac_ok = false;
                    jac_detail = format!("fails for pool[{i}],[{j}],[{k}]");
                    break 'jac;
                }
            }
        }
    }
    results.push(check("bracket_jacobi", jac_ok, jac_detail));

    // chain rule: delta[x,y] = [delta x, y] +- [x, delta y]
    let mut chain_ok = true;
    let mut chain_detail = String::new();
    'chain: for (i, x) in sums.iter().enumerate() {
        for (j, y) in sums.iter().enumerate() {
            let dxy = delta_sum(&std_bracket(x, y, ctx).unwrap(), ctx);
            let a = std_bracket(&delta_sum(x, ctx), y, ctx).unwrap();
            let b = std_bracket(x, &delta_sum(y, ctx), ctx).unwrap();
            let px = shifted_parity(&pool[i], ctx);
            let sign = if px % 2 == 1 { -1 } else { 1 };
            let rhs = GraphSum::combine(&a, &b, &rat_int(sign)).unwrap();
            if dxy != rhs {
                chain_ok = false;
                chain_detail = format!("fails for pool[{i}], pool[{j}]");
                break 'chain;
            }
        }
    }
    results.push(check("bracket_chain_rule", chain_ok, chain_detail));

    results
}

/// Canonicalization equivariance under random relabellings.
pub fn run_canonicalization_suite(seed: u64, rounds: usize) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ok = true;
    let mut detail = String::new();
    for round in 0..rounds {
        let (m, n) = [(0, 2), (1, 2), (1, 3), (2, 3)][round % 4];
        let g = random_hairy_graph(&mut rng, m, n, 6);
        // g is canonical; idempotence
        let (c, s) = g.canonicalize();
        if c != g || s != 1 {
            ok = false;
            detail = format!("idempotence fails on {}", crate::textio::graph_to_text(&g));
            break;
        }
        // random relabelling: same canonical form, sign matching the move
        let mut sigma: Vec<u8> = (0..g.nv).collect();
        for i in (1..sigma.len()).rev() {
            let j = rng.gen_range(0..=i);
            sigma.swap(i, j);
        }
        let mut h = Graph::new(m, n, g.nv);
        for e in &g.edges {
            h.add_edge(sigma[e.s as usize], sigma[e.t as usize], e.dir);
        }
        for &a in &g.hairs {
            h.add_hair(sigma[a as usize]);
        }
        let (c2, s2) = h.canonicalize();
        if c2 != c || s2 == 0 {
            ok = false;
            detail = format!("relabelling fails on {}", crate::textio::graph_to_text(&g));
            break;
        }
        let (co, so) = crate::bruteforce::canonicalize_exhaustive(&h);
        if co != c2 || so != s2 {
            ok = false;
            detail = "exhaustive oracle disagrees".to_string();
            break;
        }
    }
    vec![check("canonicalization_equivariance", ok, detail)]
}

/// delta1 and the mixed pieces square to zero separately on a slice.
pub fn run_split_decomposition(params: &SliceParams, ctx: ComplexContext) -> Vec<CheckResult> {
    let basis = match enumerate_basis(params) {
        Ok(b) => b,
        Err(e) => return vec![check("split_decomposition", false, e.to_string())],
    };
    let mut ok1 = true;
    let mut ok_mixed = true;
    for g in &basis.graphs {
        let x = GraphSum::single(g.clone());
        let d1 = delta_split_sum(&x, ctx);
        if !delta_split_sum(&d1, ctx).is_zero() {
            ok1 = false;
        }
        let d2 = delta_hair_sum(&x, ctx);
        let mut mixed = delta_split_sum(&d2, ctx);
        mixed.add_assign(&delta_hair_sum(&d1, ctx));
        mixed.add_assign(&delta_hair_sum(&d2, ctx));
        if !mixed.is_zero() {
            ok_mixed = false;
        }
    }
    vec![
        check(
            &format!(
                "delta1_squared v={} e={} h={}",
                params.vertices, params.edges, params.hairs
            ),
            ok1,
            "",
        ),
        check(
            &format!(
                "delta_mixed_squared v={} e={} h={}",
                params.vertices, params.edges, params.hairs
            ),
            ok_mixed,
            "",
        ),
    ]
}

/// MC closure at two loops.
pub fn run_mc_checks() -> Vec<CheckResult> {
    let mc = mc_element_2loop(&Rat::from_integer(1.into()));
    match mc.closure_residuals() {
        Ok(res) => {
            let all_zero = res.values().all(|r| r.is_zero());
            vec![check(
                "mc_2loop_closure",
                all_zero,
                format!("{} loop orders", res.len()),
            )]
        }
        Err(e) => vec![check("mc_2loop_closure", false, e.to_string())],
    }
}

pub fn two_loop_class_summary() -> String {
    let s = two_loop_class();
    format!("{} graphs", s.len())
}

pub type VerifyReport = Vec<CheckResult>;

pub fn all_passed(report: &VerifyReport) -> bool {
    report.iter().all(|c| c.passed)
}

pub fn first_failure(report: &VerifyReport) -> Option<&CheckResult> {
    report.iter().find(|c| !c.passed)
}

pub fn render_report(report: &VerifyReport) -> String {
    let mut s = String::new();
    for c in report {
        s.push_str(&format!(
            "{} {}{}\n",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            if c.detail.is_empty() {
                String::new()
            } else {
                format!(" ({})", c.detail)
            }
        ));
    }
    s
}

/// Graphs in the pool must be degree-homogeneous for the axioms; this helper
/// drops the zero cases produced by random search.
pub fn nonzero(g: &Graph) -> bool {
    let (_, s) = g.canonicalize();
    s != 0
}

impl From<GraphError> for CheckResult {
    fn from(e: GraphError) -> Self {
        check("error", false, e.to_string())
    }
}
