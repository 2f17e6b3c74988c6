//! Steenrod operations on Ext by lifting the identity of F2 to a
//! C2-equivariant chain map `W ⊗ C -> M ⊗ M`, where `M` is a small
//! extension representing the class and `W` is the standard free
//! F2[C2]-resolution.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::chainmap::{OrderedSolver, TieBreak};
use crate::error::{Error, Result};
use crate::extension::{data_file, ExactExtension};
use crate::linalg::{F2Matrix, F2Vector};
use crate::module::CompiledModule;
use crate::parse::{parse_linear, split_top_level};
use crate::resolution::{CochainClass, Generator, Resolution};
use crate::steenrod::Monomial;

#[derive(Clone, Copy, Debug)]
struct Block {
    a: usize,
    p: i32,
    b: usize,
    q: i32,
    offset: usize,
    da: usize,
    db: usize,
}

#[derive(Clone, Debug, Default)]
struct TensorLayout {
    blocks: Vec<Block>,
    index: HashMap<(usize, i32), usize>,
    len: usize,
}

impl TensorLayout {
    fn block(&self, a: usize, p: i32) -> Option<&Block> {
        self.index.get(&(a, p)).map(|&k| &self.blocks[k])
    }
}

/// The tensor square of the complex `N_0 <- ... <- N_s` of an extension,
/// graded by homological degree `n` and internal degree `T`. The
/// differential of `N_0` is zero here; the augmentation only enters the
/// base case of the lift.
pub struct TensorComplex {
    ext: ExactExtension,
    layouts: HashMap<(usize, i32), TensorLayout>,
    empty: TensorLayout,
}

impl TensorComplex {
    /// Bases in homological degrees `<= n_max` and internal degrees `<= t_max`.
    pub fn new(ext: &ExactExtension, n_max: usize, t_max: i32) -> Self {
        let mods = ext.modules();
        let s = ext.length();
        let lo = mods.iter().map(|m| m.min_degree()).min().unwrap_or(0);
        let mut layouts = HashMap::new();
        for n in 0..=n_max {
            for t in 2 * lo..=t_max {
                let mut layout = TensorLayout::default();
                for a in n.saturating_sub(s)..=n.min(s) {
                    let b = n - a;
                    let (ma, mb) = (&mods[a], &mods[b]);
                    for p in ma.min_degree()..=ma.max_degree() {
                        let (da, db) = (ma.dim(p), mb.dim(t - p));
                        if da * db == 0 {
                            continue;
                        }
                        layout.index.insert((a, p), layout.blocks.len());
                        layout.blocks.push(Block { a, p, b, q: t - p, offset: layout.len, da, db });
                        layout.len += da * db;
                    }
                }
                if layout.len > 0 {
                    layouts.insert((n, t), layout);
                }
            }
        }
        TensorComplex {
            ext: ext.clone(),
            layouts,
            empty: TensorLayout::default(),
        }
    }

    fn layout(&self, n: usize, t: i32) -> &TensorLayout {
        self.layouts.get(&(n, t)).unwrap_or(&self.empty)
    }

    pub fn dim(&self, n: usize, t: i32) -> usize {
        self.layout(n, t).len
    }

    fn module(&self, a: usize) -> &Arc<CompiledModule> {
        &self.ext.modules()[a]
    }

    /// Adds `x ⊗ y` into `out`, for `x` in `N_a` and `y` in `N_b`.
    fn add_outer(&self, out: &mut F2Vector, n: usize, t: i32, a: usize, p: i32, x: &F2Vector, y: &F2Vector) {
        if x.is_zero() || y.is_zero() {
            return;
        }
        let blk = match self.layout(n, t).block(a, p) {
            Some(b) => *b,
            None => return,
        };
        debug_assert_eq!(blk.b, n - a);
        for i in x.ones() {
            for j in y.ones() {
                out.flip(blk.offset + i * blk.db + j);
            }
        }
    }

    /// The action of a Milnor monomial through the coproduct.
    pub fn act(&self, n: usize, t: i32, m: &Monomial, v: &F2Vector) -> F2Vector {
        let t2 = t + m.degree() as i32;
        let mut out = F2Vector::zero(self.dim(n, t2));
        if v.is_zero() || out.is_empty() {
            return out;
        }
        if m.is_unit() {
            return v.clone();
        }
        let coproduct = m.coproduct();
        for blk in &self.layout(n, t).blocks {
            let (ma, mb) = (self.module(blk.a), self.module(blk.b));
            for (l, r) in &coproduct {
                let (pl, qr) = (blk.p + l.degree() as i32, blk.q + r.degree() as i32);
                if ma.dim(pl) == 0 || mb.dim(qr) == 0 {
                    continue;
                }
                let lrows: Vec<F2Vector> = (0..blk.da)
                    .map(|i| ma.act(l, blk.p, &F2Vector::unit(blk.da, i)))
                    .collect();
                let rrows: Vec<F2Vector> = (0..blk.db)
                    .map(|j| mb.act(r, blk.q, &F2Vector::unit(blk.db, j)))
                    .collect();
                for i in 0..blk.da {
                    if lrows[i].is_zero() {
                        continue;
                    }
                    for j in 0..blk.db {
                        if v.get(blk.offset + i * blk.db + j) {
                            self.add_outer(&mut out, n, t2, blk.a, pl, &lrows[i], &rrows[j]);
                        }
                    }
                }
            }
        }
        out
    }

    /// The transposition `x ⊗ y -> y ⊗ x`.
    pub fn tau(&self, n: usize, t: i32, v: &F2Vector) -> F2Vector {
        let layout = self.layout(n, t);
        let mut out = F2Vector::zero(layout.len);
        for blk in &layout.blocks {
            let other = layout.block(blk.b, blk.q).expect("symmetric layout");
            for i in 0..blk.da {
                for j in 0..blk.db {
                    if v.get(blk.offset + i * blk.db + j) {
                        out.flip(other.offset + j * other.db + i);
                    }
                }
            }
        }
        out
    }

    /// The differential `d ⊗ 1 + 1 ⊗ d` from degree `n` to `n - 1`.
    pub fn boundary(&self, n: usize, t: i32, v: &F2Vector) -> F2Vector {
        let mut out = F2Vector::zero(self.dim(n.wrapping_sub(1), t));
        if n == 0 {
            return out;
        }
        for blk in &self.layout(n, t).blocks {
            for i in 0..blk.da {
                for j in 0..blk.db {
                    if !v.get(blk.offset + i * blk.db + j) {
                        continue;
                    }
                    let ei = F2Vector::unit(blk.da, i);
                    let ej = F2Vector::unit(blk.db, j);
                    if blk.a > 0 {
                        let di = self.ext.boundary(blk.a).apply(blk.p, &ei);
                        self.add_outer(&mut out, n - 1, t, blk.a - 1, blk.p, &di, &ej);
                    }
                    if blk.b > 0 {
                        let dj = self.ext.boundary(blk.b).apply(blk.q, &ej);
                        self.add_outer(&mut out, n - 1, t, blk.a, blk.p, &ei, &dj);
                    }
                }
            }
        }
        out
    }

    /// `ε ⊗ ε` on homological degree 0, landing in `F2 ⊗ F2`.
    pub fn augmentation(&self, t: i32, v: &F2Vector) -> F2Vector {
        let mut out = F2Vector::zero(usize::from(t == 0));
        if t != 0 {
            return out;
        }
        let aug = self.ext.augmentation();
        for blk in &self.layout(0, 0).blocks {
            let ea: Vec<bool> = (0..blk.da)
                .map(|i| aug.apply(blk.p, &F2Vector::unit(blk.da, i)).get(0))
                .collect();
            let eb: Vec<bool> = (0..blk.db)
                .map(|j| aug.apply(blk.q, &F2Vector::unit(blk.db, j)).get(0))
                .collect();
            for i in 0..blk.da {
                for j in 0..blk.db {
                    if ea[i] && eb[j] && v.get(blk.offset + i * blk.db + j) {
                        out.flip(0);
                    }
                }
            }
        }
        out
    }

    /// The matrix whose rows are the boundaries of the basis of `(n, t)`,
    /// with `ε ⊗ ε` in degree 0.
    fn boundary_matrix(&self, n: usize, t: i32) -> F2Matrix {
        let len = self.dim(n, t);
        let rows: Vec<F2Vector> = (0..len)
            .map(|k| {
                let e = F2Vector::unit(len, k);
                if n == 0 {
                    self.augmentation(t, &e)
                } else {
                    self.boundary(n, t, &e)
                }
            })
            .collect();
        let cols = if n == 0 { usize::from(t == 0) } else { self.dim(n - 1, t) };
        F2Matrix::from_rows(rows, cols)
    }

    /// Writes an element as a sum of `x ⊗ y` over basis elements.
    pub fn format(&self, n: usize, t: i32, v: &F2Vector) -> String {
        let layout = self.layout(n, t);
        let mut terms = Vec::new();
        for blk in &layout.blocks {
            let (ma, mb) = (self.module(blk.a), self.module(blk.b));
            for i in 0..blk.da {
                for j in 0..blk.db {
                    if v.get(blk.offset + i * blk.db + j) {
                        terms.push(format!("{}⊗{}", ma.basis_name(blk.p, i), mb.basis_name(blk.q, j)));
                    }
                }
            }
        }
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        }
    }

    /// Parses a sum of `x ⊗ y` terms, each factor a linear combination of
    /// module generators, into homological degree `n` and internal degree `t`.
    pub fn parse(&self, n: usize, t: i32, text: &str) -> Result<F2Vector> {
        let mut out = F2Vector::zero(self.dim(n, t));
        let text = text.trim();
        if text == "0" || text.is_empty() {
            return Ok(out);
        }
        for term in split_top_level(text, "+") {
            let term = term.trim();
            if term.is_empty() {
                return Err(Error::parse(0, format!("empty summand in '{text}'")));
            }
            let factors = split_top_level(term, "⊗");
            if factors.len() != 2 {
                return Err(Error::parse(0, format!("'{term}' is not of the form x ⊗ y")));
            }
            let (a, p, x) = self.parse_factor(factors[0])?;
            let (b, q, y) = self.parse_factor(factors[1])?;
            if a + b != n || p + q != t {
                return Err(Error::parse(
                    0,
                    format!("'{term}' has bidegree ({}, {}), expected ({n}, {t})", a + b, p + q),
                ));
            }
            self.add_outer(&mut out, n, t, a, p, &x, &y);
        }
        Ok(out)
    }

    fn parse_factor(&self, text: &str) -> Result<(usize, i32, F2Vector)> {
        let mut text = text.trim();
        while text.starts_with('(') && text.ends_with(')') && split_top_level(&text[1..text.len() - 1], ")").len() == 1 {
            text = text[1..text.len() - 1].trim();
        }
        let terms = parse_linear(text).map_err(|m| Error::parse(0, m))?;
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::parse(0, format!("no generator in '{text}'")))?;
        let (level, _) = self
            .ext
            .find_gen(first)
            .ok_or_else(|| Error::Unknown(format!("module generator {first}")))?;
        let elt = self.module(level).evaluate(&terms)?;
        Ok((level, elt.degree, elt.vector))
    }
}

/// The homotopies `Δ̃_i` on the generators of the resolution.
pub struct EquivariantLift {
    s: usize,
    t: i32,
    complex: TensorComplex,
    degrees: Vec<Vec<i32>>,
    /// `values[i][σ][g]`, in homological degree `σ + i` and the degree of `g`.
    values: Vec<Vec<Vec<F2Vector>>>,
}

impl EquivariantLift {
    pub fn s(&self) -> usize {
        self.s
    }

    pub fn t(&self) -> i32 {
        self.t
    }

    pub fn complex(&self) -> &TensorComplex {
        &self.complex
    }

    /// `Δ̃_i` of generator `g` of `C_σ`.
    pub fn value(&self, i: usize, sigma: usize, g: usize) -> &F2Vector {
        &self.values[i][sigma][g]
    }

    /// The nonzero values as `(generator, i, element)`, in solving order.
    pub fn nonzero_values(&self) -> Vec<(String, usize, String)> {
        let mut out = Vec::new();
        for (i, by_sigma) in self.values.iter().enumerate() {
            for (sigma, level) in by_sigma.iter().enumerate() {
                for (g, v) in level.iter().enumerate() {
                    if !v.is_zero() {
                        let t = self.degrees[sigma][g];
                        out.push((format!("{sigma}_{g}"), i, self.complex.format(sigma + i, t, v)));
                    }
                }
            }
        }
        out
    }

    /// Generators at which the base case or the homotopy equation fails.
    pub fn verify(&self, res: &Resolution) -> Vec<String> {
        equation_failures(res, &self.complex, self.s, self.t, &self.values)
    }
}

fn frontier(res: &Resolution, e: &ExactExtension) -> Result<()> {
    let (s, t) = (e.length() as u32, e.t());
    if res.s_max() < 2 * s || res.t_max() < 2 * t {
        return Err(Error::DegreeCap {
            degree: (2 * t).max(0) as u32,
            cap: res.t_max().max(0) as u32,
        });
    }
    Ok(())
}

/// Right-hand side of the equation for `Δ̃_i(g)`: the value `Δ̃_i(dg) +
/// (1 + τ) Δ̃_{i-1}(g)` in degree `σ + i - 1`, or the augmentation of `g`
/// when `σ + i = 0`.
fn rhs(
    res: &Resolution,
    complex: &TensorComplex,
    values: &[Vec<Vec<F2Vector>>],
    i: usize,
    sigma: usize,
    g: &Generator,
) -> F2Vector {
    let n = sigma + i;
    let t = g.degree;
    if n == 0 {
        return g.augmentation.clone().unwrap();
    }
    let mut out = F2Vector::zero(complex.dim(n - 1, t));
    if sigma > 0 {
        let below = res.generators(sigma as u32 - 1);
        for (h, m) in &g.terms {
            let v = &values[i][sigma - 1][*h];
            if !v.is_zero() {
                out.add_assign(&complex.act(n - 1, below[*h].degree, m, v));
            }
        }
    }
    if i > 0 {
        let v = &values[i - 1][sigma][g.index];
        if !v.is_zero() {
            out.add_assign(v);
            out.add_assign(&complex.tau(n - 1, t, v));
        }
    }
    out
}

fn in_range(s: usize, t: i32, i: usize, sigma: usize, g: &Generator) -> bool {
    i <= s && sigma + i <= 2 * s && g.degree <= 2 * t
}

fn equation_failures(
    res: &Resolution,
    complex: &TensorComplex,
    s: usize,
    t: i32,
    values: &[Vec<Vec<F2Vector>>],
) -> Vec<String> {
    let mut failures = Vec::new();
    for i in 0..=s {
        for sigma in 0..=2 * s - i {
            for g in res.generators(sigma as u32) {
                if !in_range(s, t, i, sigma, g) {
                    continue;
                }
                let n = sigma + i;
                let v = &values[i][sigma][g.index];
                let lhs = if n == 0 {
                    complex.augmentation(g.degree, v)
                } else {
                    complex.boundary(n, g.degree, v)
                };
                let target = rhs(res, complex, values, i, sigma, g);
                let mut diff = target.clone();
                diff.add_assign(&lhs);
                if !diff.is_zero() {
                    let residual = if n == 0 {
                        "1".to_string()
                    } else {
                        complex.format(n - 1, g.degree, &diff)
                    };
                    let solvable = OrderedSolver::new(&complex.boundary_matrix(n, g.degree), TieBreak::Natural)
                        .solve(&target)
                        .is_some();
                    let note = if solvable { "entry can be corrected" } else { "inputs inconsistent" };
                    failures.push(format!("Δ{i}({}): {note}; residual {residual}", g.name()));
                }
            }
        }
    }
    failures
}

fn empty_values(res: &Resolution, complex: &TensorComplex, s: usize, t: i32) -> Vec<Vec<Vec<F2Vector>>> {
    (0..=s)
        .map(|i| {
            (0..=2 * s - i)
                .map(|sigma| {
                    res.generators(sigma as u32)
                        .iter()
                        .map(|g| {
                            let n = if g.degree <= 2 * t { complex.dim(sigma + i, g.degree) } else { 0 };
                            F2Vector::zero(n)
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Solves for `Δ̃_i` with `i` ascending, then `σ` ascending, then generator
/// index; generators within one layer are solved in parallel.
pub fn build_lift(res: &Resolution, e: &ExactExtension, tie: TieBreak) -> Result<EquivariantLift> {
    frontier(res, e)?;
    let (s, t) = (e.length(), e.t());
    let complex = TensorComplex::new(e, 2 * s, 2 * t);
    let mut values = empty_values(res, &complex, s, t);
    for i in 0..=s {
        for sigma in 0..=2 * s - i {
            let gens: Vec<&Generator> = res
                .generators(sigma as u32)
                .iter()
                .filter(|g| in_range(s, t, i, sigma, g))
                .collect();
            let n = sigma + i;
            let mut degrees: Vec<i32> = gens.iter().map(|g| g.degree).filter(|&d| complex.dim(n, d) > 0).collect();
            degrees.dedup();
            let solvers: HashMap<i32, OrderedSolver> = degrees
                .par_iter()
                .map(|&d| (d, OrderedSolver::new(&complex.boundary_matrix(n, d), tie)))
                .collect();
            let solved: Vec<(usize, Result<F2Vector>)> = gens
                .par_iter()
                .filter(|g| complex.dim(n, g.degree) > 0)
                .map(|g| {
                    let b = rhs(res, &complex, &values, i, sigma, g);
                    let x = solvers[&g.degree].solve(&b).ok_or_else(|| {
                        Error::NoSolution(format!("Δ{i}({}) has no solution; the extension is not exact", g.name()))
                    });
                    (g.index, x)
                })
                .collect();
            for (g, x) in solved {
                values[i][sigma][g] = x?;
            }
        }
    }
    Ok(EquivariantLift {
        s,
        t,
        complex,
        degrees: (0..=2 * s)
            .map(|sigma| res.generators(sigma as u32).iter().map(|g| g.degree).collect())
            .collect(),
        values,
    })
}

/// `Sq^i(x)` for `0 <= i <= s`; `classes[i]` lies in bidegree `(s + i, 2t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SqResult {
    pub s: u32,
    pub t: i32,
    pub classes: Vec<CochainClass>,
}

impl SqResult {
    pub fn sq(&self, i: usize) -> &CochainClass {
        &self.classes[i]
    }
}

impl fmt::Display for SqResult {
    /// `(Sq^s, ..., Sq^0)` with summands joined by `+`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .classes
            .iter()
            .rev()
            .map(|c| c.to_string().replace(" + ", "+"))
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Reads `Sq^i(x)` off the coefficient of top ⊗ top in `Δ̃_{s-i}` on the
/// generators of `C_{s+i}` in degree `2t`.
pub fn compute_sq(lift: &EquivariantLift) -> SqResult {
    let (s, t) = (lift.s, lift.t);
    let classes = (0..=s)
        .map(|i| {
            let sigma = s + i;
            let gens = lift.degrees[sigma]
                .iter()
                .enumerate()
                .filter(|(_, &d)| d == 2 * t)
                .filter(|(g, _)| {
                    let v = &lift.values[s - i][sigma][*g];
                    v.len() == 1 && v.get(0)
                })
                .map(|(g, _)| g);
            CochainClass::new(sigma as u32, 2 * t, gens.collect::<Vec<_>>())
        })
        .collect();
    SqResult {
        s: s as u32,
        t,
        classes,
    }
}

/// Builds the lift and reads off all `Sq^i(x)`.
pub fn steenrod_squares(res: &Resolution, e: &ExactExtension, tie: TieBreak) -> Result<SqResult> {
    Ok(compute_sq(&build_lift(res, e, tie)?))
}

/// A transcribed table of values `Δ_i(g)`; absent entries are zero.
#[derive(Clone, Debug, Default)]
pub struct DeltaTable {
    pub entries: Vec<DeltaEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaEntry {
    pub line: usize,
    pub generator: String,
    pub i: usize,
    pub element: String,
}

impl DeltaTable {
    /// Reads tab-separated lines `generator  i  element`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim_end();
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 3 {
                return Err(Error::parse(k + 1, "expected three tab-separated columns"));
            }
            let i = cols[1]
                .trim()
                .parse()
                .map_err(|_| Error::parse(k + 1, format!("bad index '{}'", cols[1])))?;
            entries.push(DeltaEntry {
                line: k + 1,
                generator: cols[0].trim().to_string(),
                i,
                element: cols[2].trim().to_string(),
            });
        }
        Ok(DeltaTable { entries })
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn merge(mut self, other: DeltaTable) -> Self {
        self.entries.extend(other.entries);
        self
    }

    /// Drops every entry for `generator`.
    pub fn without(mut self, generator: &str) -> Self {
        self.entries.retain(|e| e.generator != generator);
        self
    }

    /// Replaces every entry for `(generator, i)` by `element`.
    pub fn with_entry(mut self, generator: &str, i: usize, element: &str) -> Self {
        self.entries.retain(|e| e.generator != generator || e.i != i);
        self.entries.push(DeltaEntry {
            line: 0,
            generator: generator.to_string(),
            i,
            element: element.to_string(),
        });
        self
    }

    /// The shipped transcription for `c0`, `c1` or `f0`: the `Δ_0` table
    /// followed by the higher `Δ_i` table.
    pub fn library(name: &str) -> Result<Self> {
        let delta = DeltaTable::parse(data_file(&format!("tables/{name}_delta.tsv"))?)?;
        let higher = DeltaTable::parse(data_file(&format!("tables/{name}_higher.tsv"))?)?;
        Ok(delta.merge(higher))
    }

    pub fn to_tsv(&self) -> String {
        self.entries
            .iter()
            .map(|e| format!("{}\t{}\t{}\n", e.generator, e.i, e.element))
            .collect()
    }
}

/// Result of [`verify_table`].
#[derive(Clone, Debug, Default)]
pub struct TableReport {
    /// Number of `(i, generator)` equations checked.
    pub checked: usize,
    /// Equations that fail, as `Δi(s_g)`.
    pub failures: Vec<String>,
}

impl TableReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks a transcribed table against the base case and the homotopy
/// equations on every generator in the range used by [`build_lift`].
pub fn verify_table(res: &Resolution, e: &ExactExtension, table: &DeltaTable) -> Result<TableReport> {
    frontier(res, e)?;
    let (s, t) = (e.length(), e.t());
    let complex = TensorComplex::new(e, 2 * s, 2 * t);
    let mut values = empty_values(res, &complex, s, t);
    for entry in &table.entries {
        let g = res
            .generator_by_name(&entry.generator)
            .ok_or_else(|| Error::Unknown(format!("generator {} at line {}", entry.generator, entry.line)))?;
        let sigma = g.s as usize;
        if !in_range(s, t, entry.i, sigma, g) {
            return Err(Error::parse(entry.line, format!("Δ{}({}) is out of range", entry.i, entry.generator)));
        }
        let v = complex
            .parse(sigma + entry.i, g.degree, &entry.element)
            .map_err(|err| Error::parse(entry.line, err.to_string()))?;
        values[entry.i][sigma][g.index].add_assign(&v);
    }
    let mut checked = 0;
    for i in 0..=s {
        for sigma in 0..=2 * s - i {
            checked += res
                .generators(sigma as u32)
                .iter()
                .filter(|g| in_range(s, t, i, sigma, g))
                .count();
        }
    }
    Ok(TableReport {
        checked,
        failures: equation_failures(res, &complex, s, t, &values),
    })
}
