//! Formal Q-linear combinations of canonical graphs.

use crate::graph::{Graph, GraphError};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rustc_hash::FxHashMap;

pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(num.into(), den.into())
}

pub fn rat_int(num: i64) -> Rat {
    Rat::from_integer(num.into())
}

/// Parse "p/q" or "p" into an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat, GraphError> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a, b),
        None => (s, "1"),
    };
    let num: num_bigint::BigInt = num
        .parse()
        .map_err(|_| GraphError::Usage(format!("bad rational {s:?}")))?;
    let den: num_bigint::BigInt = den
        .parse()
        .map_err(|_| GraphError::Usage(format!("bad rational {s:?}")))?;
    if den.is_zero() {
        return Err(GraphError::Usage("zero denominator".into()));
    }
    Ok(Rat::new(num, den))
}

pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A finite linear combination of canonical graphs with exact rational
/// coefficients.  Keys are always canonical forms; zero coefficients are
/// pruned on every mutation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphSum {
    pub m: i32,
    pub n: i32,
    terms: FxHashMap<Graph, Rat>,
}

impl GraphSum {
    pub fn zero(m: i32, n: i32) -> Self {
        GraphSum {
            m,
            n,
            terms: FxHashMap::default(),
        }
    }

    /// Singleton sum; canonicalizes the graph first.
    pub fn single(g: Graph) -> Self {
        let mut s = GraphSum::zero(g.m, g.n);
        s.add_graph(&g, &Rat::one());
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Add `coeff * g`, canonicalizing g and dropping it if it carries an
    /// orientation-reversing automorphism.
    pub fn add_graph(&mut self, g: &Graph, coeff: &Rat) {
        if coeff.is_zero() {
            return;
        }
        debug_assert!(g.m == self.m && g.n == self.n);
        let (canon, sign) = g.canonicalize();
        if sign == 0 {
            return;
        }
        let c = if sign < 0 { -coeff.clone() } else { coeff.clone() };
        self.add_canonical(canon, c);
    }

    /// Add a term already known to be canonical and nonzero.
    pub fn add_canonical(&mut self, canon: Graph, coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(canon);
        match entry {
            std::collections::hash_map::Entry::Occupied(mut o) => {
                let v = o.get() + &coeff;
                if v.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            std::collections::hash_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
        }
    }

    pub fn coeff(&self, canon: &Graph) -> Rat {
        self.terms.get(canon).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Graph, &Rat)> {
        self.terms.iter()
    }

    /// Terms in the deterministic canonical-key order.
    pub fn sorted_terms(&self) -> Vec<(&Graph, &Rat)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    pub fn scale(&self, c: &Rat) -> GraphSum {
        if c.is_zero() {
            return GraphSum::zero(self.m, self.n);
        }
        let mut out = GraphSum::zero(self.m, self.n);
        for (g, a) in &self.terms {
            out.terms.insert(g.clone(), a * c);
        }
        out
    }

    pub fn add_assign(&mut self, other: &GraphSum) {
        assert!(
            self.m == other.m && self.n == other.n,
            "context mismatch in sum"
        );
        for (g, c) in &other.terms {
            self.add_canonical(g.clone(), c.clone());
        }
    }

    /// a + scalar*b with exact merging of canonical keys.
    pub fn combine(a: &GraphSum, b: &GraphSum, scalar: &Rat) -> Result<GraphSum, GraphError> {
        if a.m != b.m || a.n != b.n {
            return Err(GraphError::ContextMismatch(format!(
                "({}, {}) vs ({}, {})",
                a.m, a.n, b.m, b.n
            )));
        }
        let mut out = a.clone();
        for (g, c) in &b.terms {
            out.add_canonical(g.clone(), c * scalar);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &GraphSum) -> GraphSum {
        GraphSum::combine(self, other, &-Rat::one()).expect("same context")
    }

    /// Largest absolute coefficient, for reporting.
    pub fn max_abs_coeff(&self) -> Rat {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Rat::zero)
    }

    /// Keep only terms satisfying the predicate.
    pub fn filtered(&self, mut keep: impl FnMut(&Graph) -> bool) -> GraphSum {
        let mut out = GraphSum::zero(self.m, self.n);
        for (g, c) in &self.terms {
            if keep(g) {
                out.terms.insert(g.clone(), c.clone());
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    #[test]
    fn cancel_and_scale() {
        let mut g = Graph::new(1, 3, 2);
        g.add_edge(0, 1, false);
        g.add_hair(0);
        let x = GraphSum::single(g.clone());
        let zero = GraphSum::combine(&x, &x, &rat_int(-1)).unwrap();
        assert!(zero.is_zero());
        let kept = GraphSum::combine(&x, &x, &Rat::zero()).unwrap();
        assert_eq!(kept, x);
    }

    #[test]
    fn theta_coefficient_arithmetic() {
        let mut th = Graph::new(0, 1, 2);
        th.add_edge(0, 1, false);
        th.add_edge(0, 1, false);
        th.add_edge(0, 1, false);
        let a = GraphSum::single(th.clone()).scale(&rat(1, 2));
        let b = GraphSum::single(th).scale(&rat(1, 3));
        let c = GraphSum::combine(&a, &b, &rat_int(1)).unwrap();
        assert_eq!(c.sorted_terms()[0].1, &rat(5, 6));
    }

    #[test]
    fn relabelling_merges_terms() {
        let mut g1 = Graph::new(1, 3, 2);
        g1.add_edge(1, 0, false);
        g1.add_hair(1);
        // the canonical form with its sign is the same element, so adding it
        // must double the coefficient on a single key
        let (c, s0) = g1.canonicalize();
        assert_eq!(s0.abs(), 1);
        let mut s = GraphSum::zero(1, 3);
        s.add_graph(&g1, &rat_int(1));
        s.add_graph(&c, &rat_int(s0 as i64));
        assert_eq!(s.len(), 1);
        assert_eq!(s.sorted_terms()[0].1.abs(), rat_int(2));
    }
}
