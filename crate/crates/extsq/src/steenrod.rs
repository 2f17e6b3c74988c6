//! The mod 2 Steenrod algebra in the Milnor basis.
//!
//! A [`Monomial`] is a Milnor basis element `Sq(r1, r2, ...)` of degree
//! `sum r_i (2^i - 1)`. Within a degree, monomials are ordered reverse
//! lexicographically: `a > b` when, at the highest index where they differ,
//! `a` has the smaller entry. In degree 10 this gives
//! `Sq10 > Sq(7,1) > Sq(4,2) > Sq(1,3) > Sq(3,0,1) > Sq(0,1,1)`.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};

static DEGREE_CAP: AtomicU32 = AtomicU32::new(128);

/// The largest internal degree accepted by parsers and module compilation.
pub fn degree_cap() -> u32 {
    DEGREE_CAP.load(AtomicOrdering::Relaxed)
}

pub fn set_degree_cap(cap: u32) {
    DEGREE_CAP.store(cap, AtomicOrdering::Relaxed);
}

pub fn check_degree(degree: u32) -> Result<()> {
    let cap = degree_cap();
    if degree > cap {
        Err(Error::DegreeCap { degree, cap })
    } else {
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial {
    exps: Vec<u32>,
}

impl Monomial {
    pub fn new(mut exps: Vec<u32>) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        Monomial { exps }
    }

    pub fn unit() -> Self {
        Monomial { exps: Vec::new() }
    }

    /// `Sq^n` (the unit when `n == 0`).
    pub fn sq(n: u32) -> Self {
        Monomial::new(vec![n])
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn is_unit(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.exps
            .iter()
            .enumerate()
            .map(|(i, &r)| r * ((1u32 << (i + 1)) - 1))
            .sum()
    }

    /// Compares two monomials of the same degree in the reverse
    /// lexicographic order; different degrees compare by degree.
    pub fn milnor_cmp(&self, other: &Monomial) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        let n = self.exps.len().max(other.exps.len());
        for i in (0..n).rev() {
            let a = self.exps.get(i).copied().unwrap_or(0);
            let b = other.exps.get(i).copied().unwrap_or(0);
            if a != b {
                return b.cmp(&a);
            }
        }
        Ordering::Equal
    }

    /// `Sq(r1, r2, ...)` to `Sq(2 r1, 2 r2, ...)`.
    pub fn double(&self) -> Monomial {
        Monomial {
            exps: self.exps.iter().map(|r| 2 * r).collect(),
        }
    }

    /// The Verschiebung: `Sq(2R)` to `Sq(R)`, zero when some entry is odd.
    pub fn halve(&self) -> Option<Monomial> {
        if self.exps.iter().all(|r| r % 2 == 0) {
            Some(Monomial {
                exps: self.exps.iter().map(|r| r / 2).collect(),
            })
        } else {
            None
        }
    }

    /// All splittings `R = R' + R''`, the terms of the coproduct.
    pub fn coproduct(&self) -> Vec<(Monomial, Monomial)> {
        let mut out = vec![(Vec::new(), Vec::new())];
        for &r in &self.exps {
            let mut next = Vec::with_capacity(out.len() * (r as usize + 1));
            for (a, b) in &out {
                for k in 0..=r {
                    let mut a2: Vec<u32> = a.clone();
                    let mut b2: Vec<u32> = b.clone();
                    a2.push(k);
                    b2.push(r - k);
                    next.push((a2, b2));
                }
            }
            out = next;
        }
        out.into_iter()
            .map(|(a, b)| (Monomial::new(a), Monomial::new(b)))
            .collect()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.milnor_cmp(other)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exps.len() {
            0 => write!(f, "1"),
            1 => write!(f, "Sq{}", self.exps[0]),
            _ => {
                write!(f, "Sq(")?;
                for (i, r) in self.exps.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{r}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Product of two Milnor basis elements, as the list of monomials with
/// coefficient one.
pub fn multiply_monomials(r: &Monomial, s: &Monomial) -> Vec<Monomial> {
    if r.is_unit() {
        return vec![s.clone()];
    }
    if s.is_unit() {
        return vec![r.clone()];
    }
    let r = &r.exps;
    let s = &s.exps;
    let rows = r.len() + 1;
    let cols = s.len() + 1;
    let diags = r.len() + s.len();
    let mut m = vec![vec![0u32; cols]; rows];
    for j in 1..cols {
        m[0][j] = s[j - 1];
    }
    for i in 1..rows {
        m[i][0] = r[i - 1];
    }
    let mut result: HashMap<Vec<u32>, bool> = HashMap::new();
    let mut diagonal = vec![0u32; diags];
    loop {
        let mut ok = true;
        'diag: for n in 1..=diags {
            let mut total = 0u32;
            let lo = (n + 1).saturating_sub(cols);
            let hi = (n + 1).min(rows);
            for j in lo..hi {
                let x = m[j][n - j];
                if total & x != 0 {
                    ok = false;
                    break 'diag;
                }
                total |= x;
            }
            diagonal[n - 1] = total;
        }
        if ok {
            let mut t = diagonal.clone();
            while t.last() == Some(&0) {
                t.pop();
            }
            let e = result.entry(t).or_insert(false);
            *e = !*e;
        }

        let mut found = false;
        let mut i = 1;
        while !found && i < rows {
            let mut sum = m[i][0];
            let mut j = 1;
            while !found && j < cols {
                let p = 1u32 << j;
                if sum >= p {
                    let col_above: u32 = (0..i).map(|k| m[k][j]).sum();
                    if col_above != 0 {
                        found = true;
                        for row in 1..i {
                            m[row][0] = r[row - 1];
                            for col in 1..cols {
                                m[0][col] += m[row][col];
                                m[row][col] = 0;
                            }
                        }
                        for col in 1..j {
                            m[0][col] += m[i][col];
                            m[i][col] = 0;
                        }
                        m[0][j] -= 1;
                        m[i][j] += 1;
                        m[i][0] = sum - p;
                    } else {
                        sum += m[i][j] * p;
                    }
                } else {
                    sum += m[i][j] * p;
                }
                j += 1;
            }
            i += 1;
        }
        if !found {
            break;
        }
    }
    let mut out: Vec<Monomial> = result
        .into_iter()
        .filter(|(_, v)| *v)
        .map(|(k, _)| Monomial { exps: k })
        .collect();
    out.sort_by(|a, b| b.cmp(a));
    out
}

/// The Milnor basis in one degree, greatest monomial first.
#[derive(Debug)]
pub struct DegreeBasis {
    pub degree: u32,
    pub monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl DegreeBasis {
    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }
}

fn enumerate_degree(n: u32) -> Vec<Monomial> {
    fn rec(rem: u32, top: usize, acc: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if top == 0 {
            if rem == 0 {
                out.push(Monomial::new(acc.clone()));
            }
            return;
        }
        let w = (1u32 << top) - 1;
        for k in 0..=rem / w {
            acc[top - 1] = k;
            rec(rem - k * w, top - 1, acc, out);
        }
        acc[top - 1] = 0;
    }
    let mut top = 0;
    while (1u32 << (top + 1)) - 1 <= n {
        top += 1;
    }
    let mut out = Vec::new();
    let mut acc = vec![0u32; top];
    rec(n, top, &mut acc, &mut out);
    out.sort_by(|a, b| b.cmp(a));
    out
}

fn basis_cache() -> &'static RwLock<Vec<Option<Arc<DegreeBasis>>>> {
    static CACHE: OnceLock<RwLock<Vec<Option<Arc<DegreeBasis>>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(Vec::new()))
}

/// The Milnor basis of degree `n`, computed once and shared.
pub fn milnor_basis(n: u32) -> Arc<DegreeBasis> {
    {
        let cache = basis_cache().read().unwrap();
        if let Some(Some(b)) = cache.get(n as usize) {
            return Arc::clone(b);
        }
    }
    let monomials = enumerate_degree(n);
    let index = monomials
        .iter()
        .enumerate()
        .map(|(i, m)| (m.clone(), i))
        .collect();
    let built = Arc::new(DegreeBasis {
        degree: n,
        monomials,
        index,
    });
    let mut cache = basis_cache().write().unwrap();
    if cache.len() <= n as usize {
        cache.resize(n as usize + 1, None);
    }
    let slot = &mut cache[n as usize];
    if slot.is_none() {
        *slot = Some(Arc::clone(&built));
    }
    Arc::clone(slot.as_ref().unwrap())
}

pub fn dimension(n: u32) -> usize {
    milnor_basis(n).len()
}

/// A sum of Milnor basis elements with coefficients in F2.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct AlgebraElement {
    terms: BTreeSet<Monomial>,
}

impl AlgebraElement {
    pub fn zero() -> Self {
        AlgebraElement::default()
    }

    pub fn unit() -> Self {
        Monomial::unit().into()
    }

    pub fn sq(n: u32) -> Self {
        Monomial::sq(n).into()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Monomials, greatest first.
    pub fn terms(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.iter().rev()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_monomial(&mut self, m: Monomial) {
        if !self.terms.remove(&m) {
            self.terms.insert(m);
        }
    }

    pub fn add_assign(&mut self, other: &AlgebraElement) {
        for m in &other.terms {
            self.add_monomial(m.clone());
        }
    }

    pub fn multiply(&self, other: &AlgebraElement) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for a in &self.terms {
            for b in &other.terms {
                for m in multiply_monomials(a, b) {
                    out.add_monomial(m);
                }
            }
        }
        out
    }

    /// The degree when homogeneous, `None` for zero or mixed degrees.
    pub fn degree(&self) -> Option<u32> {
        let mut it = self.terms.iter().map(Monomial::degree);
        let d = it.next()?;
        if it.all(|e| e == d) {
            Some(d)
        } else {
            None
        }
    }

    pub fn double(&self) -> AlgebraElement {
        AlgebraElement {
            terms: self.terms.iter().map(Monomial::double).collect(),
        }
    }

    pub fn halve(&self) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for m in &self.terms {
            if let Some(h) = m.halve() {
                out.add_monomial(h);
            }
        }
        out
    }

    /// The coproduct as a set of pairs with coefficient one.
    pub fn coproduct(&self) -> BTreeSet<(Monomial, Monomial)> {
        let mut out = BTreeSet::new();
        for m in &self.terms {
            for pair in m.coproduct() {
                if !out.remove(&pair) {
                    out.insert(pair);
                }
            }
        }
        out
    }

    pub fn parse(s: &str) -> Result<AlgebraElement> {
        crate::parse::parse_algebra(s).map_err(|msg| Error::parse(0, msg))
    }
}

impl From<Monomial> for AlgebraElement {
    fn from(m: Monomial) -> Self {
        let mut terms = BTreeSet::new();
        terms.insert(m);
        AlgebraElement { terms }
    }
}

impl FromIterator<Monomial> for AlgebraElement {
    fn from_iter<I: IntoIterator<Item = Monomial>>(iter: I) -> Self {
        let mut out = AlgebraElement::zero();
        for m in iter {
            out.add_monomial(m);
        }
        out
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, m) in self.terms().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_ten_order() {
        let b = milnor_basis(10);
        let names: Vec<String> = b.monomials.iter().map(|m| m.to_string()).collect();
        assert_eq!(
            names,
            ["Sq10", "Sq(7,1)", "Sq(4,2)", "Sq(1,3)", "Sq(3,0,1)", "Sq(0,1,1)"]
        );
    }

    #[test]
    fn small_products() {
        let p = multiply_monomials(&Monomial::sq(1), &Monomial::sq(1));
        assert!(p.is_empty());
        let p = multiply_monomials(&Monomial::sq(1), &Monomial::sq(2));
        assert_eq!(p, vec![Monomial::sq(3)]);
        let p = multiply_monomials(&Monomial::sq(2), &Monomial::sq(1));
        assert_eq!(p, vec![Monomial::sq(3), Monomial::new(vec![0, 1])]);
    }
}
