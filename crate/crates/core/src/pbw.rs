//! Bernoulli numbers and Poincare-Birkhoff-Witt chain weights, computed by
//! symmetrization in a free nilpotent Lie algebra.
//!
//! All computations run inside the tensor algebra on two generators,
//! truncated above the working degree: products of total degree within the
//! bound are faithful to the universal envelope there.  The symmetrized
//! basis {Phi(M)} over multisets M of Lyndon-basis Lie words lets us expand
//! any envelope element back into symmetric coordinates exactly.

use crate::graph::GraphError;
use crate::linalg::{SolveOutcome, SparseMat};
use crate::sum::{rat, Rat};
use num_traits::{One, Zero};
use rustc_hash::FxHashMap;
use std::collections::BTreeMap;
use std::sync::Mutex;

/// Classical Bernoulli numbers, B1 = -1/2.
pub fn bernoulli(j: u64) -> Rat {
    let mut known: Vec<Rat> = vec![Rat::one()];
    for n in 1..=j as usize {
        // B_n = -1/(n+1) * sum_{i<n} C(n+1, i) B_i
        let mut acc = Rat::zero();
        for (i, b) in known.iter().enumerate() {
            acc += Rat::from_integer(binomial(n as u64 + 1, i as u64).into()) * b;
        }
        let bn = -acc / Rat::from_integer(((n + 1) as i64).into());
        known.push(bn);
    }
    known[j as usize].clone()
}

/// Bernoulli numbers in the star-product orientation: B1 = +1/2, pinned by
/// the symmetrization oracle (x*y = x v y + 1/2 [x,y]).
pub fn bernoulli_star(j: u64) -> Rat {
    if j == 1 {
        rat(1, 2)
    } else {
        bernoulli(j)
    }
}

fn binomial(n: u64, k: u64) -> i64 {
    let mut acc = 1i64;
    for i in 0..k {
        acc = acc * (n - i) as i64 / (i + 1) as i64;
    }
    acc
}

/// Binary Lie tree whose leaves are decorated by the external slot (1 or 2)
/// they consume.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum LieShape {
    Leaf(u8),
    Bracket(Box<LieShape>, Box<LieShape>),
}

impl LieShape {
    /// The right-normed chain [1, [1, ... [1, 2]...]] with n slot-1 leaves.
    pub fn chain(n: usize) -> LieShape {
        let mut t = LieShape::Leaf(2);
        for _ in 0..n {
            t = LieShape::Bracket(Box::new(LieShape::Leaf(1)), Box::new(t));
        }
        t
    }

    pub fn leaf_counts(&self) -> (usize, usize) {
        match self {
            LieShape::Leaf(1) => (1, 0),
            LieShape::Leaf(_) => (0, 1),
            LieShape::Bracket(l, r) => {
                let (a1, a2) = l.leaf_counts();
                let (b1, b2) = r.leaf_counts();
                (a1 + b1, a2 + b2)
            }
        }
    }
}

/// Lie-forest argument of the weight table: either the bare product term or
/// a single bracket tree.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum PbwShape {
    EmptyForest,
    Tree(LieShape),
}

// words in the truncated tensor algebra on letters 0 (= x) and 1 (= y)
type Word = Vec<u8>;
type Poly = FxHashMap<Word, Rat>;

fn poly_add(a: &mut Poly, b: &Poly, scale: &Rat) {
    for (w, c) in b {
        let e = a.entry(w.clone()).or_insert_with(Rat::zero);
        *e += c * scale;
        if e.is_zero() {
            a.remove(w);
        }
    }
}

fn poly_mul(a: &Poly, b: &Poly, max_deg: usize) -> Poly {
    let mut out = Poly::default();
    for (wa, ca) in a {
        for (wb, cb) in b {
            if wa.len() + wb.len() > max_deg {
                continue;
            }
            let mut w = wa.clone();
            w.extend_from_slice(wb);
            let e = out.entry(w).or_insert_with(Rat::zero);
            *e += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn letter(l: u8) -> Poly {
    let mut p = Poly::default();
    p.insert(vec![l], Rat::one());
    p
}

fn lie_bracket(a: &Poly, b: &Poly, max_deg: usize) -> Poly {
    let mut out = poly_mul(a, b, max_deg);
    let ba = poly_mul(b, a, max_deg);
    poly_add(&mut out, &ba, &-Rat::one());
    out
}

/// Lyndon words over {0, 1} of length 1..=n (Duval's algorithm).
fn lyndon_words(n: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut w: Word = vec![0];
    loop {
        if w.len() <= n {
            out.push(w.clone());
        }
        // extend periodically to length n
        let base = w.clone();
        while w.len() < n {
            w.push(base[(w.len()) % base.len()]);
        }
        while let Some(&last) = w.last() {
            if last == 1 {
                w.pop();
            } else {
                break;
            }
        }
        if w.is_empty() {
            break;
        }
        *w.last_mut().unwrap() += 1;
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

/// Standard bracketing of a Lyndon word: w = uv with v its longest proper
/// Lyndon suffix, b(w) = [b(u), b(v)].
fn standard_bracketing(w: &Word, max_deg: usize, memo: &mut FxHashMap<Word, Poly>) -> Poly {
    if let Some(p) = memo.get(w) {
        return p.clone();
    }
    let p = if w.len() == 1 {
        letter(w[0])
    } else {
        let mut split = 1;
        for s in 1..w.len() {
            let suf = &w[s..];
            if is_lyndon(suf) {
                split = s;
                break;
            }
        }
        let u = w[..split].to_vec();
        let v = w[split..].to_vec();
        let bu = standard_bracketing(&u, max_deg, memo);
        let bv = standard_bracketing(&v, max_deg, memo);
        lie_bracket(&bu, &bv, max_deg)
    };
    memo.insert(w.clone(), p.clone());
    p
}

fn is_lyndon(w: &[u8]) -> bool {
    for k in 1..w.len() {
        if w[k..] <= w[..w.len() - k] {
            // any rotation is compared via suffix: w must be strictly least
        }
    }
    // direct definition: strictly smaller than all its proper rotations
    let n = w.len();
    for r in 1..n {
        let rotated: Vec<u8> = w[r..].iter().chain(w[..r].iter()).cloned().collect();
        if rotated <= w.to_vec() {
            return false;
        }
    }
    true
}

/// Symmetrization of a product of Lie elements.
fn symmetrize(factors: &[&Poly], max_deg: usize) -> Poly {
    let k = factors.len();
    if k == 0 {
        let mut p = Poly::default();
        p.insert(Vec::new(), Rat::one());
        return p;
    }
    let mut total = Poly::default();
    let mut idx: Vec<usize> = (0..k).collect();
    let mut count = 0u64;
    permute_all(&mut idx, &mut |perm| {
        let mut prod = factors[perm[0]].clone();
        for &i in &perm[1..] {
            prod = poly_mul(&prod, factors[i], max_deg);
        }
        poly_add(&mut total, &prod, &Rat::one());
        count += 1;
    });
    let inv = Rat::new(1.into(), (count as i64).into());
    let mut out = Poly::default();
    poly_add(&mut out, &total, &inv);
    out
}

fn permute_all(idx: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    fn heap(idx: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
        if k <= 1 {
            f(idx);
            return;
        }
        for i in 0..k {
            heap(idx, k - 1, f);
            if k % 2 == 0 {
                idx.swap(i, k - 1);
            } else {
                idx.swap(0, k - 1);
            }
        }
    }
    let n = idx.len();
    heap(idx, n, f);
}

/// Expand an envelope element in the symmetrized PBW basis up to max_deg and
/// return the coefficients by symmetric monomial (multiset of Lyndon words).
fn expand_symmetric(u: &Poly, max_deg: usize) -> Result<BTreeMap<Vec<Word>, Rat>, GraphError> {
    let lw = lyndon_words(max_deg);
    let mut memo = FxHashMap::default();
    let lie_elts: Vec<Poly> = lw
        .iter()
        .map(|w| standard_bracketing(w, max_deg, &mut memo))
        .collect();
    // multisets of Lyndon words with total length <= max_deg
    let mut monomials: Vec<Vec<usize>> = Vec::new();
    let mut cur: Vec<usize> = Vec::new();
    gen_multisets(&lw, 0, max_deg, &mut cur, &mut monomials);
    // coordinates: all words of length <= max_deg appearing anywhere
    let mut word_index: FxHashMap<Word, usize> = FxHashMap::default();
    let mut phis: Vec<Poly> = Vec::with_capacity(monomials.len());
    for mono in &monomials {
        let factors: Vec<&Poly> = mono.iter().map(|&i| &lie_elts[i]).collect();
        let phi = symmetrize(&factors, max_deg);
        for w in phi.keys() {
            let next = word_index.len();
            word_index.entry(w.clone()).or_insert(next);
        }
        phis.push(phi);
    }
    for w in u.keys() {
        let next = word_index.len();
        word_index.entry(w.clone()).or_insert(next);
    }
    let mut mat = SparseMat::new(word_index.len(), phis.len());
    for (j, phi) in phis.iter().enumerate() {
        for (w, c) in phi {
            mat.push(word_index[w], j, c.clone());
        }
    }
    mat.finish();
    let mut b = vec![Rat::zero(); word_index.len()];
    for (w, c) in u {
        b[word_index[w]] = c.clone();
    }
    match mat.solve(&b)? {
        SolveOutcome::Solution(x) => {
            debug_assert!(crate::linalg::vec_is_zero(&mat.residual(&x, &b)));
            let mut out = BTreeMap::new();
            for (j, c) in x.into_iter().enumerate() {
                if !c.is_zero() {
                    let mono: Vec<Word> = monomials[j].iter().map(|&i| lw[i].clone()).collect();
                    out.insert(mono, c);
                }
            }
            Ok(out)
        }
        SolveOutcome::Infeasible { .. } => Err(GraphError::Usage(
            "element does not lie in the envelope span (internal error)".into(),
        )),
    }
}

fn gen_multisets(
    lw: &[Word],
    from: usize,
    budget: usize,
    cur: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    out.push(cur.clone());
    for i in from..lw.len() {
        if lw[i].len() <= budget {
            cur.push(i);
            gen_multisets(lw, i, budget - lw[i].len(), cur, out);
            cur.pop();
        }
    }
}

/// Weight of a Lie-forest shape in the PBW star product, by symmetrization.
/// Admissible shapes: the empty forest and trees with exactly one slot-2
/// leaf (the Lie space of that multidegree is one-dimensional, so the weight
/// is well defined; this family contains every chain T_n).
pub fn pbw_weight(shape: &PbwShape) -> Result<Rat, GraphError> {
    static TABLE: Mutex<BTreeMap<PbwShape, Rat>> = Mutex::new(BTreeMap::new());
    if let Some(v) = TABLE.lock().unwrap().get(shape) {
        return Ok(v.clone());
    }
    let value = match shape {
        PbwShape::EmptyForest => Rat::one(),
        PbwShape::Tree(t) => {
            let (n1, n2) = t.leaf_counts();
            if n2 != 1 || n1 == 0 {
                return Err(GraphError::Usage(format!(
                    "inadmissible shape: {n1} slot-1 and {n2} slot-2 leaves"
                )));
            }
            let max_deg = n1 + 1;
            // u = Phi(x^n) . Phi(y) = x^n y
            let mut word = vec![0u8; n1];
            word.push(1);
            let mut u = Poly::default();
            u.insert(word, Rat::one());
            let expansion = expand_symmetric(&u, max_deg)?;
            // the multidegree (n1, 1) Lie space is spanned by the chain
            // bracketing of the Lyndon word x^n1 y
            let mut chain_word = vec![0u8; n1];
            chain_word.push(1);
            let target = vec![chain_word.clone()];
            let a = expansion.get(&target).cloned().unwrap_or_else(Rat::zero);
            // D_{T}(x^n, y) = n! lambda_t z_n
            let fact: i64 = (1..=n1 as i64).product();
            let lambda = chain_coefficient(t, max_deg, &chain_word)?;
            lambda * a / Rat::from_integer(fact.into())
        }
    };
    TABLE.lock().unwrap().insert(shape.clone(), value.clone());
    Ok(value)
}

/// Coefficient of the chain basis element in the Lie expansion of the tree.
fn chain_coefficient(t: &LieShape, max_deg: usize, chain_word: &Word) -> Result<Rat, GraphError> {
    fn build(t: &LieShape, max_deg: usize) -> Poly {
        match t {
            LieShape::Leaf(1) => letter(0),
            LieShape::Leaf(_) => letter(1),
            LieShape::Bracket(l, r) => {
                let a = build(l, max_deg);
                let b = build(r, max_deg);
                lie_bracket(&a, &b, max_deg)
            }
        }
    }
    let p = build(t, max_deg);
    if p.is_empty() {
        return Err(GraphError::Usage("shape is zero modulo Jacobi".into()));
    }
    // one-dimensional multidegree: p = lambda * b(chain_word); read lambda
    // off the coefficient of the word itself (the standard bracketing of a
    // Lyndon word contains that word with coefficient one)
    Ok(p.get(chain_word).cloned().unwrap_or_else(Rat::zero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sum::rat_int;

    #[test]
    fn classical_bernoulli_values() {
        assert_eq!(bernoulli(0), rat_int(1));
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(3), Rat::zero());
        assert_eq!(bernoulli(4), rat(-1, 30));
    }

    #[test]
    fn lyndon_generation() {
        let lw = lyndon_words(3);
        // 0, 1, 01, 001, 011
        assert_eq!(lw.len(), 5);
        assert!(lw.contains(&vec![0, 0, 1]));
        assert!(lw.contains(&vec![0, 1, 1]));
    }

    #[test]
    fn empty_forest_weight() {
        assert_eq!(pbw_weight(&PbwShape::EmptyForest).unwrap(), rat_int(1));
    }

    #[test]
    fn chain_weights_match_bernoulli() {
        for n in 1..=4usize {
            let w = pbw_weight(&PbwShape::Tree(LieShape::chain(n))).unwrap();
            let fact: i64 = (1..=n as i64).product();
            let expected = bernoulli_star(n as u64) / Rat::from_integer(fact.into());
            assert_eq!(w, expected, "chain weight T_{n}");
        }
    }

    #[test]
    fn inadmissible_shape_rejected() {
        let t = LieShape::Bracket(Box::new(LieShape::Leaf(2)), Box::new(LieShape::Leaf(2)));
        assert!(pbw_weight(&PbwShape::Tree(t)).is_err());
    }
}
