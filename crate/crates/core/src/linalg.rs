//! Exact sparse linear algebra over Q: fraction-free rank, linear solve with
//! feasibility certificates, mod-p cross checks, homology dimensions, and
//! the SMS text format.

use crate::graph::GraphError;
use crate::sum::{format_rat, parse_rat, Rat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rustc_hash::FxHashMap;
use std::io::{BufRead, Write};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMat {
    pub rows: usize,
    pub cols: usize,
    /// coordinate-sorted, duplicate-free, no explicit zeros
    entries: Vec<(u32, u32, Rat)>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RankMode {
    Exact,
    ModP(u64),
}

#[derive(Clone, Debug)]
pub enum SolveOutcome {
    /// one exact solution (free variables set to zero)
    Solution(Vec<Rat>),
    /// b is certified outside the column space: rank(A) < rank([A|b])
    Infeasible { rank_a: usize, rank_aug: usize },
}

impl SparseMat {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseMat {
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, i: usize, j: usize, v: Rat) {
        if v.is_zero() {
            return;
        }
        debug_assert!(i < self.rows && j < self.cols);
        self.entries.push((i as u32, j as u32, v));
    }

    pub fn finish(&mut self) {
        self.entries.sort_by_key(|(i, j, _)| (*i, *j));
        // merge duplicates
        let mut merged: Vec<(u32, u32, Rat)> = Vec::with_capacity(self.entries.len());
        for (i, j, v) in self.entries.drain(..) {
            if let Some(last) = merged.last_mut() {
                if last.0 == i && last.1 == j {
                    last.2 += v;
                    continue;
                }
            }
            merged.push((i, j, v));
        }
        merged.retain(|(_, _, v)| !v.is_zero());
        self.entries = merged;
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(u32, u32, Rat)] {
        &self.entries
    }

    pub fn transpose(&self) -> SparseMat {
        let mut t = SparseMat::new(self.cols, self.rows);
        for (i, j, v) in &self.entries {
            t.push(*j as usize, *i as usize, v.clone());
        }
        t.finish();
        t
    }

    pub fn multiply(&self, rhs: &SparseMat) -> Result<SparseMat, GraphError> {
        if self.cols != rhs.rows {
            return Err(GraphError::Usage(format!(
                "dimension mismatch in multiply: {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        // rows of self indexed by middle coordinate
        let mut by_mid: FxHashMap<u32, Vec<(u32, &Rat)>> = FxHashMap::default();
        for (i, k, v) in &self.entries {
            by_mid.entry(*k).or_default().push((*i, v));
        }
        let mut acc: FxHashMap<(u32, u32), Rat> = FxHashMap::default();
        for (k, j, w) in &rhs.entries {
            if let Some(lefts) = by_mid.get(k) {
                for (i, v) in lefts {
                    let e = acc.entry((*i, *j)).or_insert_with(Rat::zero);
                    *e += &**v * w;
                }
            }
        }
        let mut out = SparseMat::new(self.rows, rhs.cols);
        for ((i, j), v) in acc {
            out.push(i as usize, j as usize, v);
        }
        out.finish();
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|(_, _, v)| v.is_zero())
    }

    /// Integer rows after clearing denominators column by column.
    fn integer_rows(&self) -> Vec<FxHashMap<u32, BigInt>> {
        let mut col_lcm: FxHashMap<u32, BigInt> = FxHashMap::default();
        for (_, j, v) in &self.entries {
            let e = col_lcm.entry(*j).or_insert_with(BigInt::one);
            *e = e.lcm(v.denom());
        }
        let mut rows: Vec<FxHashMap<u32, BigInt>> = vec![FxHashMap::default(); self.rows];
        for (i, j, v) in &self.entries {
            let scale = &col_lcm[j];
            let num = v.numer() * scale / v.denom();
            rows[*i as usize].insert(*j, num);
        }
        rows
    }

    pub fn rank(&self, mode: RankMode) -> Result<usize, GraphError> {
        match mode {
            RankMode::Exact => Ok(bareiss_rank(self.integer_rows())),
            RankMode::ModP(p) => {
                if !is_prime(p) {
                    return Err(GraphError::Usage(format!("{p} is not prime")));
                }
                Ok(modp_rank(self, p))
            }
        }
    }

    /// Solve A z = b exactly or certify infeasibility.
    pub fn solve(&self, b: &[Rat]) -> Result<SolveOutcome, GraphError> {
        if b.len() != self.rows {
            return Err(GraphError::Usage(format!(
                "rhs length {} does not match {} rows",
                b.len(),
                self.rows
            )));
        }
        // augmented integer system; the b column is scaled like any other
        let mut rows = self.integer_rows();
        let bcol = self.cols as u32;
        let mut b_lcm = BigInt::one();
        for v in b {
            b_lcm = b_lcm.lcm(v.denom());
        }
        for (i, v) in b.iter().enumerate() {
            if !v.is_zero() {
                rows[i].insert(bcol, v.numer() * &b_lcm / v.denom());
            }
        }
        // remember the column scalings to undo at the end
        let mut col_scale: FxHashMap<u32, BigInt> = FxHashMap::default();
        for (_, j, v) in &self.entries {
            let e = col_scale.entry(*j).or_insert_with(BigInt::one);
            *e = e.lcm(v.denom());
        }

        let elim = bareiss_eliminate(rows, self.cols);
        let rank_a = elim.pivots.len();
        // infeasible iff some pivotless row still carries a b entry
        for r in &elim.leftover {
            if r.get(&bcol).map(|v| !v.is_zero()).unwrap_or(false) {
                return Ok(SolveOutcome::Infeasible {
                    rank_a,
                    rank_aug: rank_a + 1,
                });
            }
        }
        // back-substitute over the frozen pivot rows in reverse order: this
        // solves (A S) y = lcm_b * b, and then z = S y / lcm_b
        let mut y = vec![Rat::zero(); self.cols];
        for k in (0..elim.pivots.len()).rev() {
            let (_, col, ref pivot) = elim.pivots[k];
            let frozen = &elim.frozen[k];
            let mut acc = frozen
                .get(&bcol)
                .map(|v| Rat::from_integer(v.clone()))
                .unwrap_or_else(Rat::zero);
            for (j, v) in frozen.iter() {
                if *j == bcol || *j == col || v.is_zero() {
                    continue;
                }
                acc -= Rat::from_integer(v.clone()) * &y[*j as usize];
            }
            y[col as usize] = acc / Rat::from_integer(pivot.clone());
        }
        let x: Vec<Rat> = y
            .into_iter()
            .enumerate()
            .map(|(j, yj)| {
                let s = col_scale
                    .get(&(j as u32))
                    .cloned()
                    .unwrap_or_else(BigInt::one);
                yj * Rat::new(s, b_lcm.clone())
            })
            .collect();
        Ok(SolveOutcome::Solution(x))
    }

    /// Exact residual b - A z.
    pub fn residual(&self, z: &[Rat], b: &[Rat]) -> Vec<Rat> {
        let mut r: Vec<Rat> = b.to_vec();
        for (i, j, v) in &self.entries {
            let term = v * &z[*j as usize];
            r[*i as usize] -= term;
        }
        r
    }

    pub fn write_sms<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "{} {} M", self.rows, self.cols)?;
        for (i, j, v) in &self.entries {
            writeln!(w, "{} {} {}", i + 1, j + 1, format_rat(v))?;
        }
        writeln!(w, "0 0 0")
    }

    pub fn read_sms<R: BufRead>(r: &mut R) -> Result<SparseMat, GraphError> {
        let mut header = String::new();
        r.read_line(&mut header)
            .map_err(|e| GraphError::Usage(format!("sms read: {e}")))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(GraphError::Usage("bad SMS header".into()));
        }
        let rows: usize = parts[0]
            .parse()
            .map_err(|_| GraphError::Usage("bad SMS rows".into()))?;
        let cols: usize = parts[1]
            .parse()
            .map_err(|_| GraphError::Usage("bad SMS cols".into()))?;
        let mut mat = SparseMat::new(rows, cols);
        for line in r.lines() {
            let line = line.map_err(|e| GraphError::Usage(format!("sms read: {e}")))?;
            let p: Vec<&str> = line.split_whitespace().collect();
            if p.is_empty() {
                continue;
            }
            if p.len() != 3 {
                return Err(GraphError::Usage(format!("bad SMS line {line:?}")));
            }
            if p == ["0", "0", "0"] {
                break;
            }
            let i: usize = p[0]
                .parse()
                .map_err(|_| GraphError::Usage("bad SMS row index".into()))?;
            let j: usize = p[1]
                .parse()
                .map_err(|_| GraphError::Usage("bad SMS col index".into()))?;
            if i == 0 || j == 0 || i > rows || j > cols {
                return Err(GraphError::Usage(format!("SMS index out of range: {line}")));
            }
            mat.push(i - 1, j - 1, parse_rat(p[2])?);
        }
        mat.finish();
        Ok(mat)
    }
}

struct Elimination {
    /// (row index, pivot column, pivot value at freeze time), in pivot order
    pivots: Vec<(usize, u32, BigInt)>,
    /// frozen pivot rows, parallel to `pivots`
    frozen: Vec<FxHashMap<u32, BigInt>>,
    /// active rows left with empty A-part (may still hold an augmented entry)
    leftover: Vec<FxHashMap<u32, BigInt>>,
}

/// One-step fraction-free elimination (Bareiss) with Markowitz pivoting.
/// Columns >= a_cols are augmented and never chosen as pivots.
///
/// Rows untouched by a pivot step formally scale by pivot/prev_pivot; this is
/// tracked lazily with a per-row stamp, so sparse rows are only rewritten
/// when their pivot-column entry is nonzero.  Bringing a row from stamp s to
/// step t multiplies it by p_t/p_s, which is exact on the minors Bareiss
/// produces.
fn bareiss_eliminate(mut rows: Vec<FxHashMap<u32, BigInt>>, a_cols: usize) -> Elimination {
    let mut active: Vec<usize> = (0..rows.len()).collect();
    active.retain(|&r| !rows[r].is_empty());
    let mut pivots: Vec<(usize, u32, BigInt)> = Vec::new();
    let mut frozen: Vec<FxHashMap<u32, BigInt>> = Vec::new();
    // p_k = pivot value at step k (1-based); p_0 = 1
    let mut pivot_values: Vec<BigInt> = vec![BigInt::one()];
    let mut stamp: Vec<usize> = vec![0; rows.len()];

    let bring_up = |row: &mut FxHashMap<u32, BigInt>,
                    from: usize,
                    to: usize,
                    pivot_values: &[BigInt]| {
        if from == to {
            return;
        }
        let num = &pivot_values[to];
        let den = &pivot_values[from];
        for v in row.values_mut() {
            let scaled = &*v * num;
            let (q, rem) = scaled.div_rem(den);
            debug_assert!(rem.is_zero(), "lazy Bareiss rescale must be exact");
            *v = q;
        }
    };

    loop {
        let step = pivots.len(); // about to produce pivot p_{step+1}
        // column fill counts among active rows (A-part only); sparsity is
        // stamp-independent
        let mut col_count: FxHashMap<u32, usize> = FxHashMap::default();
        for &r in &active {
            for j in rows[r].keys() {
                if (*j as usize) < a_cols {
                    *col_count.entry(*j).or_insert(0) += 1;
                }
            }
        }
        // Markowitz: minimize (r_nnz - 1)(c_nnz - 1)
        let mut best: Option<(usize, usize, u32)> = None;
        for &r in &active {
            let rn = rows[r].keys().filter(|j| (**j as usize) < a_cols).count();
            if rn == 0 {
                continue;
            }
            for j in rows[r].keys() {
                if (*j as usize) >= a_cols {
                    continue;
                }
                let score = (rn - 1) * (col_count[j] - 1);
                let better = match &best {
                    None => true,
                    Some((bs, _, _)) => score < *bs,
                };
                if better {
                    best = Some((score, r, *j));
                }
            }
        }
        let Some((_, prow, pcol)) = best else {
            break;
        };

        active.retain(|&r| r != prow);
        let mut pivot_row = std::mem::take(&mut rows[prow]);
        bring_up(&mut pivot_row, stamp[prow], step, &pivot_values);
        let pval = pivot_row[&pcol].clone();
        let prev = pivot_values[step].clone();
        pivot_values.push(pval.clone());

        for &r in &active {
            if !rows[r].contains_key(&pcol) {
                continue; // scales lazily
            }
            let mut row = std::mem::take(&mut rows[r]);
            bring_up(&mut row, stamp[r], step, &pivot_values);
            let a = row.remove(&pcol).unwrap();
            let mut updated: FxHashMap<u32, BigInt> = FxHashMap::default();
            let keys: Vec<u32> = row
                .keys()
                .chain(pivot_row.keys())
                .cloned()
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .collect();
            for j in keys {
                if j == pcol {
                    continue;
                }
                let x = row.get(&j).cloned().unwrap_or_else(BigInt::zero);
                let y = pivot_row.get(&j).cloned().unwrap_or_else(BigInt::zero);
                let num = &pval * x - &a * y;
                if num.is_zero() {
                    continue;
                }
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                updated.insert(j, q);
            }
            rows[r] = updated;
            stamp[r] = step + 1;
        }
        frozen.push(pivot_row);
        pivots.push((prow, pcol, pval));
    }

    let leftover = active.into_iter().map(|r| rows[r].clone()).collect();
    Elimination {
        pivots,
        frozen,
        leftover,
    }
}

fn bareiss_rank(rows: Vec<FxHashMap<u32, BigInt>>) -> usize {
    let a_cols = rows
        .iter()
        .flat_map(|r| r.keys())
        .max()
        .map(|&j| j as usize + 1)
        .unwrap_or(0);
    bareiss_eliminate(rows, a_cols).pivots.len()
}

fn modp_rank(mat: &SparseMat, p: u64) -> usize {
    // clear denominators per row over Z, then reduce; this is always a valid
    // lower bound on the exact rank even if p divides a denominator
    let pb: BigInt = p.into();
    let mut row_lcm: Vec<BigInt> = vec![BigInt::one(); mat.rows];
    for (i, _, v) in &mat.entries {
        row_lcm[*i as usize] = row_lcm[*i as usize].lcm(v.denom());
    }
    let mut rows: Vec<FxHashMap<u32, u64>> = vec![FxHashMap::default(); mat.rows];
    for (i, j, v) in &mat.entries {
        let int = v.numer() * &row_lcm[*i as usize] / v.denom();
        let val: u64 = int.mod_floor(&pb).try_into().unwrap();
        if val != 0 {
            rows[*i as usize].insert(*j, val);
        }
    }
    let mut rank = 0usize;
    let mut active: Vec<usize> = (0..rows.len()).filter(|&r| !rows[r].is_empty()).collect();
    while let Some((&prow, (&pcol, &pval))) = active
        .iter()
        .find_map(|r| rows[*r].iter().next().map(|e| (r, e)))
    {
        rank += 1;
        let pivot_row = rows[prow].clone();
        let pinv = mod_inv(pval, p);
        active.retain(|&r| r != prow);
        for &r in &active {
            let Some(&a) = rows[r].get(&pcol) else {
                continue;
            };
            let factor = (a as u128 * pinv as u128 % p as u128) as u64;
            let row = &mut rows[r];
            for (j, y) in &pivot_row {
                let sub = (*y as u128 * factor as u128 % p as u128) as u64;
                let e = row.entry(*j).or_insert(0);
                *e = (*e + p - sub) % p;
                if *e == 0 {
                    row.remove(j);
                }
            }
        }
        active.retain(|&r| !rows[r].is_empty());
    }
    rank
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // p prime
    mod_pow(a % p, p - 2, p)
}

fn mod_pow(base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u128;
    let mut b = base as u128 % p as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % p as u128;
        }
        b = b * b % p as u128;
        exp >>= 1;
    }
    acc as u64
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// dim ker(d_out) - rank(d_in), after checking d_out . d_in = 0.
pub fn homology_dim(d_in: &SparseMat, d_out: &SparseMat) -> Result<usize, GraphError> {
    if d_in.rows != d_out.cols {
        return Err(GraphError::Usage(format!(
            "slice mismatch: d_in has {} rows, d_out has {} cols",
            d_in.rows, d_out.cols
        )));
    }
    let comp = d_out.multiply(d_in)?;
    if !comp.is_zero() {
        return Err(GraphError::Usage(
            "differentials do not compose to zero".into(),
        ));
    }
    let rank_out = d_out.rank(RankMode::Exact)?;
    let rank_in = d_in.rank(RankMode::Exact)?;
    Ok(d_out.cols - rank_out - rank_in)
}

pub fn vec_is_zero(v: &[Rat]) -> bool {
    v.iter().all(|x| x.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sum::{rat, rat_int};

    fn identity(n: usize) -> SparseMat {
        let mut m = SparseMat::new(n, n);
        for i in 0..n {
            m.push(i, i, rat_int(1));
        }
        m.finish();
        m
    }

    #[test]
    fn rank_basics() {
        assert_eq!(identity(2).rank(RankMode::Exact).unwrap(), 2);
        let z = SparseMat::new(3, 4);
        assert_eq!(z.rank(RankMode::Exact).unwrap(), 0);
        assert!(z.rank(RankMode::ModP(10)).is_err());
    }

    #[test]
    fn rank_transpose_invariance() {
        let mut m = SparseMat::new(3, 3);
        m.push(0, 0, rat_int(1));
        m.push(0, 1, rat_int(2));
        m.push(1, 0, rat_int(2));
        m.push(1, 1, rat_int(4));
        m.push(2, 2, rat(1, 3));
        m.finish();
        assert_eq!(m.rank(RankMode::Exact).unwrap(), 2);
        assert_eq!(m.transpose().rank(RankMode::Exact).unwrap(), 2);
        assert_eq!(m.rank(RankMode::ModP(101)).unwrap(), 2);
    }

    #[test]
    fn solve_constructed_feasible() {
        let mut m = SparseMat::new(3, 3);
        m.push(0, 0, rat_int(2));
        m.push(0, 2, rat_int(1));
        m.push(1, 1, rat(1, 2));
        m.push(2, 0, rat_int(1));
        m.push(2, 1, rat_int(1));
        m.finish();
        let z = vec![rat_int(3), rat(-2, 3), rat_int(5)];
        let mut b = vec![Rat::zero(); 3];
        for (i, j, v) in m.entries() {
            b[*i as usize] += v * &z[*j as usize];
        }
        match m.solve(&b).unwrap() {
            SolveOutcome::Solution(x) => {
                assert!(vec_is_zero(&m.residual(&x, &b)));
            }
            SolveOutcome::Infeasible { .. } => panic!("feasible system"),
        }
    }

    #[test]
    fn solve_zero_rhs() {
        let mut m = SparseMat::new(2, 2);
        m.push(0, 0, rat_int(1));
        m.finish();
        match m.solve(&[Rat::zero(), Rat::zero()]).unwrap() {
            SolveOutcome::Solution(x) => assert!(vec_is_zero(&x)),
            _ => panic!(),
        }
    }

    #[test]
    fn solve_infeasible() {
        // x = 0 and x = 1 simultaneously
        let mut m = SparseMat::new(2, 1);
        m.push(0, 0, rat_int(1));
        m.push(1, 0, rat_int(1));
        m.finish();
        let b = vec![rat_int(0), rat_int(1)];
        match m.solve(&b).unwrap() {
            SolveOutcome::Infeasible { rank_a, rank_aug } => {
                assert_eq!(rank_a, 1);
                assert_eq!(rank_aug, 2);
            }
            _ => panic!("should be infeasible"),
        }
    }

    #[test]
    fn homology_of_zero_maps() {
        let d_in = SparseMat::new(5, 0);
        let d_out = SparseMat::new(0, 5);
        assert_eq!(homology_dim(&d_in, &d_out).unwrap(), 5);
    }

    #[test]
    fn sms_round_trip() {
        let mut m = SparseMat::new(2, 3);
        m.push(0, 1, rat(1, 2));
        m.push(1, 2, rat_int(-7));
        m.finish();
        let mut buf = Vec::new();
        m.write_sms(&mut buf).unwrap();
        let back = SparseMat::read_sms(&mut std::io::Cursor::new(buf)).unwrap();
        assert_eq!(m, back);
    }
}
