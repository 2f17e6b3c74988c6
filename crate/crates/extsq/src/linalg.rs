//! Bit-packed linear algebra over F2.
//!
//! Matrices act on row vectors: row `i` of a matrix is the image of the
//! `i`-th basis vector, and `solve(a, b)` looks for `x` with `x a = b`.

use std::fmt;

const BITS: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct F2Vector {
    words: Vec<u64>,
    len: usize,
}

impl F2Vector {
    pub fn zero(len: usize) -> Self {
        F2Vector {
            words: vec![0; len.div_ceil(BITS)],
            len,
        }
    }

    pub fn from_indices(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = F2Vector::zero(len);
        for i in ones {
            v.flip(i);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        F2Vector::from_indices(
            bits.len(),
            bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i),
        )
    }

    pub fn unit(len: usize, i: usize) -> Self {
        F2Vector::from_indices(len, [i])
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / BITS] >> (i % BITS) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        if self.get(i) != value {
            self.flip(i);
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "index {i} out of range {}", self.len);
        self.words[i / BITS] ^= 1 << (i % BITS);
    }

    pub fn add_assign(&mut self, other: &F2Vector) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn first_one(&self) -> Option<usize> {
        self.first_one_from(0)
    }

    pub fn first_one_from(&self, start: usize) -> Option<usize> {
        if start >= self.len {
            return None;
        }
        let mut w = start / BITS;
        let mut word = self.words[w] & (!0u64 << (start % BITS));
        loop {
            if word != 0 {
                return Some(w * BITS + word.trailing_zeros() as usize);
            }
            w += 1;
            if w >= self.words.len() {
                return None;
            }
            word = self.words[w];
        }
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    None
                } else {
                    let b = word.trailing_zeros() as usize;
                    word &= word - 1;
                    Some(w * BITS + b)
                }
            })
        })
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn dot(&self, other: &F2Vector) -> bool {
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() % 2 == 1
    }

    /// Concatenation `self | other`.
    pub fn concat(&self, other: &F2Vector) -> F2Vector {
        let mut v = F2Vector::zero(self.len + other.len);
        for i in self.ones() {
            v.flip(i);
        }
        for i in other.ones() {
            v.flip(self.len + i);
        }
        v
    }

    pub fn slice(&self, start: usize, end: usize) -> F2Vector {
        F2Vector::from_indices(
            end - start,
            self.ones().filter(|&i| i >= start && i < end).map(|i| i - start),
        )
    }
}

impl fmt::Debug for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.len {
            write!(f, "{}", self.get(i) as u8)?;
        }
        write!(f, "]")
    }
}

#[derive(Clone, PartialEq, Eq, Default)]
pub struct F2Matrix {
    rows: Vec<F2Vector>,
    ncols: usize,
}

impl F2Matrix {
    pub fn zero(nrows: usize, ncols: usize) -> Self {
        F2Matrix {
            rows: vec![F2Vector::zero(ncols); nrows],
            ncols,
        }
    }

    pub fn identity(n: usize) -> Self {
        F2Matrix {
            rows: (0..n).map(|i| F2Vector::unit(n, i)).collect(),
            ncols: n,
        }
    }

    pub fn from_rows(rows: Vec<F2Vector>, ncols: usize) -> Self {
        assert!(rows.iter().all(|r| r.len() == ncols));
        F2Matrix { rows, ncols }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[F2Vector] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &F2Vector {
        &self.rows[i]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut F2Vector {
        &mut self.rows[i]
    }

    pub fn into_rows(self) -> Vec<F2Vector> {
        self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.rows[i].set(j, v)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(F2Vector::is_zero)
    }

    pub fn transpose(&self) -> F2Matrix {
        let mut t = F2Matrix::zero(self.ncols, self.nrows());
        for (i, r) in self.rows.iter().enumerate() {
            for j in r.ones() {
                t.rows[j].flip(i);
            }
        }
        t
    }

    /// `x self` for a row vector `x`.
    pub fn apply(&self, x: &F2Vector) -> F2Vector {
        debug_assert_eq!(x.len(), self.nrows());
        let mut out = F2Vector::zero(self.ncols);
        for i in x.ones() {
            out.add_assign(&self.rows[i]);
        }
        out
    }

    /// `self other`: first `self`, then `other`.
    pub fn then(&self, other: &F2Matrix) -> F2Matrix {
        assert_eq!(self.ncols, other.nrows());
        F2Matrix {
            rows: self.rows.iter().map(|r| other.apply(r)).collect(),
            ncols: other.ncols,
        }
    }

    pub fn rank(&self) -> usize {
        rref(self).pivots.len()
    }
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "F2Matrix {}x{}", self.nrows(), self.ncols)?;
        for r in &self.rows {
            writeln!(f, "  {r:?}")?;
        }
        Ok(())
    }
}

/// Reduced row echelon form with the row operations that produce it:
/// `transform * a == reduced`.
#[derive(Clone, Debug)]
pub struct Rref {
    pub reduced: F2Matrix,
    pub pivots: Vec<usize>,
    pub transform: F2Matrix,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Gauss-Jordan elimination, scanning columns left to right and taking the
/// first available row as pivot.
pub fn rref(a: &F2Matrix) -> Rref {
    let n = a.nrows();
    let mut rows = a.rows.clone();
    let mut tr: Vec<F2Vector> = (0..n).map(|i| F2Vector::unit(n, i)).collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..a.ncols {
        let Some(p) = (rank..n).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(rank, p);
        tr.swap(rank, p);
        let (prow, ptr) = (rows[rank].clone(), tr[rank].clone());
        for r in 0..n {
            if r != rank && rows[r].get(col) {
                rows[r].add_assign(&prow);
                tr[r].add_assign(&ptr);
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == n {
            break;
        }
    }
    Rref {
        reduced: F2Matrix {
            rows,
            ncols: a.ncols,
        },
        pivots,
        transform: F2Matrix { rows: tr, ncols: n },
    }
}

/// Solves `x a = b`. Viewing this as `a^T x = b`, free variables are set to
/// zero.
pub fn solve(a: &F2Matrix, b: &F2Vector) -> Option<F2Vector> {
    Solver::new(a).solve(b)
}

/// A basis of `{x : x a = 0}`: one vector per free variable of `a^T x = 0`,
/// in ascending order of the free variable.
pub fn kernel_basis(a: &F2Matrix) -> Vec<F2Vector> {
    let t = a.transpose();
    let r = rref(&t);
    let n = a.nrows();
    let mut is_pivot = vec![false; n];
    for &p in &r.pivots {
        is_pivot[p] = true;
    }
    let mut out = Vec::new();
    for f in (0..n).filter(|&f| !is_pivot[f]) {
        let mut x = F2Vector::unit(n, f);
        for (k, &p) in r.pivots.iter().enumerate() {
            if r.reduced.get(k, f) {
                x.flip(p);
            }
        }
        out.push(x);
    }
    out
}

/// Precomputed elimination for repeated `x a = b` solves against one matrix.
#[derive(Clone, Debug)]
pub struct Solver {
    nrows: usize,
    ncols: usize,
    pivots: Vec<usize>,
    transform: F2Matrix,
}

impl Solver {
    pub fn new(a: &F2Matrix) -> Self {
        let r = rref(&a.transpose());
        Solver {
            nrows: a.nrows(),
            ncols: a.ncols(),
            pivots: r.pivots,
            transform: r.transform,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn solve(&self, b: &F2Vector) -> Option<F2Vector> {
        assert_eq!(b.len(), self.ncols);
        let c: Vec<bool> = self.transform.rows.iter().map(|t| t.dot(b)).collect();
        if c[self.pivots.len()..].iter().any(|&x| x) {
            return None;
        }
        let mut x = F2Vector::zero(self.nrows);
        for (k, &p) in self.pivots.iter().enumerate() {
            if c[k] {
                x.flip(p);
            }
        }
        Some(x)
    }
}

/// A subspace kept as fully reduced rows, one per pivot column.
#[derive(Clone, Debug)]
pub struct Subspace {
    len: usize,
    rows: Vec<F2Vector>,
    pivot_row: Vec<Option<usize>>,
}

impl Subspace {
    pub fn new(len: usize) -> Self {
        Subspace {
            len,
            rows: Vec::new(),
            pivot_row: vec![None; len],
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.len
    }

    pub fn reduce(&self, v: &mut F2Vector) {
        let mut start = 0;
        while let Some(i) = v.first_one_from(start) {
            if let Some(r) = self.pivot_row[i] {
                v.add_assign(&self.rows[r]);
            }
            start = i + 1;
        }
    }

    pub fn contains(&self, v: &F2Vector) -> bool {
        let mut w = v.clone();
        self.reduce(&mut w);
        w.is_zero()
    }

    /// Adds `v`, returning its new pivot when it enlarged the space.
    pub fn insert(&mut self, v: &F2Vector) -> Option<usize> {
        let mut w = v.clone();
        self.reduce(&mut w);
        let p = w.first_one()?;
        for r in self.rows.iter_mut() {
            if r.get(p) {
                r.add_assign(&w);
            }
        }
        self.pivot_row[p] = Some(self.rows.len());
        self.rows.push(w);
        Some(p)
    }

    pub fn pivots(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.pivot_row[i].is_some()).collect()
    }

    pub fn is_pivot(&self, i: usize) -> bool {
        self.pivot_row[i].is_some()
    }

    /// The reduced row whose pivot is `p`.
    pub fn row_with_pivot(&self, p: usize) -> Option<&F2Vector> {
        self.pivot_row[p].map(|r| &self.rows[r])
    }

    /// Reduced rows in pivot order.
    pub fn basis(&self) -> Vec<F2Vector> {
        self.pivots()
            .into_iter()
            .map(|p| self.row_with_pivot(p).unwrap().clone())
            .collect()
    }
}
