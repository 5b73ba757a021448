//! Exact matrix rank over `GF(2)(T)`.
//!
//! The sparse path clears each column's denominators (column scaling keeps
//! the rank) and eliminates over `GF(2)[T]` without fractions: a row `s` is
//! replaced by `(p/g)·s + (a/g)·r` where `p` is the pivot, `a` the entry of
//! `s` in the pivot column and `g = gcd(p, a)`. Rows are then divided by
//! their content. Pivots are chosen in the sparsest column, preferring
//! low-degree entries and short rows.

use std::collections::BTreeSet;

use crate::exactfield::{BinPoly, RationalFn, ResidueField};

/// A sparse row: `(column, entry)` sorted by column, no zero entries.
pub type PolyRow = Vec<(usize, BinPoly)>;

/// Scales a column of rational entries to coprime polynomials.
pub fn clear_column(entries: &[(usize, RationalFn)]) -> Vec<(usize, BinPoly)> {
    let mut lcm = BinPoly::one();
    for (_, c) in entries {
        let den = c.denom();
        if !den.is_one() {
            let g = lcm.gcd(den);
            lcm = lcm.mul(&den.div_exact(&g));
        }
    }
    let mut out: Vec<(usize, BinPoly)> =
        entries.iter().map(|(r, c)| (*r, c.numer().mul(&lcm.div_exact(c.denom())))).collect();
    let content = out.iter().fold(BinPoly::zero(), |g, (_, p)| if g.is_one() { g } else { g.gcd(p) });
    if !content.is_one() && !content.is_zero() {
        for (_, p) in &mut out {
            *p = p.div_exact(&content);
        }
    }
    out
}

/// Rank of a sparse polynomial matrix given by rows.
pub fn rank_fraction_free(rows: Vec<PolyRow>, ncols: usize) -> usize {
    let mut rows: Vec<PolyRow> = rows;
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ncols];
    for (i, row) in rows.iter().enumerate() {
        for (c, _) in row {
            col_rows[*c].insert(i);
        }
    }
    let mut live_cols: BTreeSet<usize> = (0..ncols).filter(|&c| !col_rows[c].is_empty()).collect();
    let mut rank = 0;
    loop {
        // sparsest column
        let Some(&c) = live_cols.iter().min_by_key(|&&c| col_rows[c].len()) else {
            break;
        };
        let r = *col_rows[c]
            .iter()
            .min_by_key(|&&r| {
                let e = entry(&rows[r], c).expect("indexed entry");
                (e.degree().unwrap_or(0), rows[r].len())
            })
            .expect("live column has rows");
        let pivot_row = std::mem::take(&mut rows[r]);
        for (cc, _) in &pivot_row {
            col_rows[*cc].remove(&r);
            if col_rows[*cc].is_empty() {
                live_cols.remove(cc);
            }
        }
        let p = entry(&pivot_row, c).expect("pivot").clone();
        let others: Vec<usize> = col_rows[c].iter().copied().collect();
        for s in others {
            let old = std::mem::take(&mut rows[s]);
            let a = entry(&old, c).expect("indexed entry");
            let g = p.gcd(a);
            let (ps, as_) = (p.div_exact(&g), a.div_exact(&g));
            let new = combine(&old, &ps, &pivot_row, &as_);
            update_index(&mut col_rows, &mut live_cols, s, &old, &new);
            rows[s] = new;
        }
        rank += 1;
    }
    rank
}

fn entry(row: &PolyRow, c: usize) -> Option<&BinPoly> {
    row.binary_search_by_key(&c, |(k, _)| *k).ok().map(|i| &row[i].1)
}

/// `x·u + y·v`, then divided by its content.
fn combine(u: &PolyRow, x: &BinPoly, v: &PolyRow, y: &BinPoly) -> PolyRow {
    let scale = |p: &BinPoly, s: &BinPoly| if s.is_one() { p.clone() } else { p.mul(s) };
    let mut out = Vec::with_capacity(u.len() + v.len());
    let (mut i, mut j) = (0, 0);
    while i < u.len() || j < v.len() {
        let cu = u.get(i).map_or(usize::MAX, |e| e.0);
        let cv = v.get(j).map_or(usize::MAX, |e| e.0);
        if cu < cv {
            out.push((cu, scale(&u[i].1, x)));
            i += 1;
        } else if cv < cu {
            out.push((cv, scale(&v[j].1, y)));
            j += 1;
        } else {
            let s = scale(&u[i].1, x).add(&scale(&v[j].1, y));
            if !s.is_zero() {
                out.push((cu, s));
            }
            i += 1;
            j += 1;
        }
    }
    if !x.is_one() {
        remove_content(&mut out);
    } else {
        strip_t(&mut out);
    }
    out
}

fn strip_t(row: &mut PolyRow) {
    let tz = row.iter().map(|(_, p)| p.trailing_zeros()).min().unwrap_or(0);
    if tz > 0 {
        for (_, p) in row.iter_mut() {
            *p = p.shr(tz);
        }
    }
}

fn remove_content(row: &mut PolyRow) {
    strip_t(row);
    let mut g = BinPoly::zero();
    for (_, p) in row.iter() {
        g = g.gcd(p);
        if g.is_one() {
            return;
        }
    }
    if !g.is_zero() {
        for (_, p) in row.iter_mut() {
            *p = p.div_exact(&g);
        }
    }
}

fn update_index(
    col_rows: &mut [BTreeSet<usize>],
    live_cols: &mut BTreeSet<usize>,
    s: usize,
    old: &PolyRow,
    new: &PolyRow,
) {
    for (c, _) in old {
        if entry(new, *c).is_none() {
            col_rows[*c].remove(&s);
            if col_rows[*c].is_empty() {
                live_cols.remove(c);
            }
        }
    }
    for (c, _) in new {
        if col_rows[*c].insert(s) {
            live_cols.insert(*c);
        }
    }
}

/// Rank modulo the irreducible behind `k`, from rational columns; `None`
/// when some denominator vanishes there.
pub fn rank_modular(cols: &[Vec<(usize, RationalFn)>], nrows: usize, k: &ResidueField) -> Option<usize> {
    let mut rows: Vec<Vec<(usize, u64)>> = vec![Vec::new(); nrows];
    for (c, col) in cols.iter().enumerate() {
        for (r, q) in col {
            let v = k.reduce(q)?;
            if v != 0 {
                rows[*r].push((c, v));
            }
        }
    }
    Some(rank_residue(rows, cols.len(), k))
}

/// Active submatrices up to this many entries may be eliminated densely.
const DENSE_LIMIT: usize = 1 << 26;

/// Columns bucketed by entry count, for constant-time updates and a
/// cheap search for the sparsest column.
struct Buckets {
    head: Vec<usize>,
    next: Vec<usize>,
    prev: Vec<usize>,
    count: Vec<usize>,
    min: usize,
}

const NONE: usize = usize::MAX;

impl Buckets {
    fn new(counts: Vec<usize>, max: usize) -> Self {
        let n = counts.len();
        let mut b = Self { head: vec![NONE; max + 1], next: vec![NONE; n], prev: vec![NONE; n], count: counts, min: 0 };
        for c in 0..n {
            b.link(c);
        }
        b
    }

    fn link(&mut self, c: usize) {
        let k = self.count[c];
        if k == 0 {
            return;
        }
        let h = self.head[k];
        self.next[c] = h;
        self.prev[c] = NONE;
        if h != NONE {
            self.prev[h] = c;
        }
        self.head[k] = c;
        self.min = self.min.min(k);
    }

    fn unlink(&mut self, c: usize) {
        let k = self.count[c];
        if k == 0 {
            return;
        }
        let (p, n) = (self.prev[c], self.next[c]);
        if p != NONE {
            self.next[p] = n;
        } else {
            self.head[k] = n;
        }
        if n != NONE {
            self.prev[n] = p;
        }
    }

    fn add(&mut self, c: usize, delta: isize) {
        self.unlink(c);
        self.count[c] = self.count[c].checked_add_signed(delta).expect("count stays nonnegative");
        self.link(c);
    }

    fn sparsest(&mut self) -> Option<usize> {
        while self.min < self.head.len() && self.head[self.min] == NONE {
            self.min += 1;
        }
        self.head.get(self.min).copied()
    }
}

/// Elimination over a residue field: sparse while the active part stays
/// sparse, then dense.
pub fn rank_residue(mut rows: Vec<Vec<(usize, u64)>>, ncols: usize, k: &ResidueField) -> usize {
    // rows that may hold each column; stale entries are dropped when the column is pivoted
    let mut col_rows: Vec<Vec<usize>> = vec![Vec::new(); ncols];
    let mut counts = vec![0; ncols];
    for (i, row) in rows.iter().enumerate() {
        for &(c, _) in row {
            col_rows[c].push(i);
            counts[c] += 1;
        }
    }
    let mut live_cols = counts.iter().filter(|&&n| n > 0).count();
    let mut buckets = Buckets::new(counts, rows.len());
    let mut nnz: usize = rows.iter().map(Vec::len).sum();
    let mut live_rows = rows.iter().filter(|r| !r.is_empty()).count();
    let mut rank = 0;
    while let Some(c) = buckets.sparsest() {
        let area = live_rows * live_cols;
        if area <= DENSE_LIMIT && nnz * 16 >= area {
            log::debug!("dense switch after {rank} pivots: {live_rows} x {live_cols} active, {nnz} nonzeros");
            let cols: Vec<usize> = (0..ncols).filter(|&c| buckets.count[c] > 0).collect();
            return rank + rank_residue_dense(&rows, &cols, k);
        }
        let mut holders = std::mem::take(&mut col_rows[c]);
        holders.sort_unstable();
        holders.dedup();
        holders.retain(|&s| rows[s].binary_search_by_key(&c, |e| e.0).is_ok());
        let pos = (0..holders.len()).min_by_key(|&i| rows[holders[i]].len()).expect("live column has rows");
        let r = holders.swap_remove(pos);
        let pivot_row = std::mem::take(&mut rows[r]);
        nnz -= pivot_row.len();
        live_rows -= 1;
        for &(cc, _) in &pivot_row {
            buckets.add(cc, -1);
            live_cols -= usize::from(buckets.count[cc] == 0);
        }
        let p = pivot_row[pivot_row.binary_search_by_key(&c, |e| e.0).expect("pivot")].1;
        let p_inv = k.inv(p);
        for s in holders {
            let old = std::mem::take(&mut rows[s]);
            let a = old[old.binary_search_by_key(&c, |e| e.0).expect("indexed entry")].1;
            let f = k.mul(a, p_inv);
            let mut new = Vec::with_capacity(old.len() + pivot_row.len());
            let (mut i, mut j) = (0, 0);
            while i < old.len() || j < pivot_row.len() {
                let cu = old.get(i).map_or(usize::MAX, |e| e.0);
                let cv = pivot_row.get(j).map_or(usize::MAX, |e| e.0);
                if cu < cv {
                    new.push(old[i]);
                    i += 1;
                } else if cv < cu {
                    new.push((cv, k.mul(f, pivot_row[j].1)));
                    live_cols += usize::from(buckets.count[cv] == 0);
                    buckets.add(cv, 1);
                    col_rows[cv].push(s);
                    j += 1;
                } else {
                    let v = old[i].1 ^ k.mul(f, pivot_row[j].1);
                    if v != 0 {
                        new.push((cu, v));
                    } else {
                        buckets.add(cu, -1);
                        live_cols -= usize::from(buckets.count[cu] == 0);
                    }
                    i += 1;
                    j += 1;
                }
            }
            nnz = nnz - old.len() + new.len();
            live_rows -= usize::from(new.is_empty());
            rows[s] = new;
        }
        rank += 1;
    }
    rank
}

/// Dense elimination of the nonempty rows restricted to `cols`.
fn rank_residue_dense(rows: &[Vec<(usize, u64)>], cols: &[usize], k: &ResidueField) -> usize {
    let index: std::collections::HashMap<usize, usize> = cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let width = cols.len();
    let mut dense: Vec<Vec<u64>> = rows
        .iter()
        .filter(|r| !r.is_empty())
        .map(|r| {
            let mut v = vec![0u64; width];
            for (c, x) in r {
                v[index[c]] = *x;
            }
            v
        })
        .collect();
    let mut rank = 0;
    for c in 0..width {
        let Some(p) = (rank..dense.len()).find(|&i| dense[i][c] != 0) else { continue };
        dense.swap(rank, p);
        let (top, rest) = dense.split_at_mut(rank + 1);
        let pivot = &top[rank];
        let p_inv = k.inv(pivot[c]);
        for row in rest.iter_mut() {
            if row[c] != 0 {
                let f = k.mul(row[c], p_inv);
                k.axpy(&mut row[c..], f, &pivot[c..]);
            }
        }
        rank += 1;
    }
    rank
}

/// Exact rank from rational columns: clear denominators, then eliminate
/// without fractions.
pub fn rank_exact(cols: &[Vec<(usize, RationalFn)>], nrows: usize) -> usize {
    let mut rows: Vec<PolyRow> = vec![Vec::new(); nrows];
    for (c, col) in cols.iter().enumerate() {
        for (r, p) in clear_column(col) {
            rows[r].push((c, p));
        }
    }
    rank_fraction_free(rows, cols.len())
}

/// Rank by plain Gaussian elimination in the fraction field (dense).
pub fn rank_dense(mut a: Vec<Vec<RationalFn>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let inv = a[rank][c].inv().expect("nonzero pivot");
        let pivot_row: Vec<RationalFn> = a[rank].iter().map(|x| x.mul_ref(&inv)).collect();
        for row in a.iter_mut().skip(rank + 1) {
            if row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x = x.add_ref(&f.mul_ref(y));
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank of a dense rational matrix through the sparse fraction-free path.
pub fn rank_sparse_of_dense(a: &[Vec<RationalFn>]) -> usize {
    let ncols = a.first().map_or(0, Vec::len);
    let mut rows: Vec<PolyRow> = vec![Vec::new(); a.len()];
    for c in 0..ncols {
        let col: Vec<(usize, RationalFn)> =
            a.iter().enumerate().filter(|(_, row)| !row[c].is_zero()).map(|(r, row)| (r, row[c].clone())).collect();
        for (r, p) in clear_column(&col) {
            rows[r].push((c, p));
        }
    }
    rank_fraction_free(rows, ncols)
}
