//! Minimal free resolutions of finite modules.
//!
//! The resolution is built by sweeping internal degree `t` upward and, within
//! each `t`, homological degree `s` upward. At `(s, t)` the new generators
//! span a complement of the image of the existing generators inside the
//! kernel of the previous differential.
//!
//! Elements of `C_s` in degree `t` are vectors over the basis `Sq(R) g`
//! ordered by generator and then by decreasing Milnor monomial. The kernel is
//! fully row reduced with each row's pivot at its last nonzero entry; new
//! generators are the reduced rows whose pivots the image misses, taken in
//! increasing pivot position.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, RwLock};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{F2Vector, Subspace};
use crate::module::CompiledModule;
use crate::presentation::format_term;
use crate::steenrod::{milnor_basis, multiply_monomials, AlgebraElement, DegreeBasis, Monomial};

/// A generator `s_g` of the free module `C_s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub s: u32,
    pub index: usize,
    pub degree: i32,
    /// For `s > 0`, the terms `(target generator, monomial)` of the
    /// differential; for `s == 0`, empty.
    pub terms: Vec<(usize, Monomial)>,
    /// For `s == 0`, the image in the resolved module.
    pub augmentation: Option<F2Vector>,
}

impl Generator {
    pub fn name(&self) -> String {
        format!("{}_{}", self.s, self.index)
    }
}

/// A cocycle of the minimal resolution: the sum of the duals of the listed
/// generators of bidegree `(s, t)`. By minimality this is also its Ext class.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CochainClass {
    pub s: u32,
    pub t: i32,
    pub gens: Vec<usize>,
}

impl CochainClass {
    /// Generators listed twice cancel.
    pub fn new(s: u32, t: i32, gens: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = Vec::new();
        for g in gens {
            match v.iter().position(|&h| h == g) {
                Some(i) => {
                    v.remove(i);
                }
                None => v.push(g),
            }
        }
        v.sort_unstable();
        CochainClass { s, t, gens: v }
    }

    pub fn zero(s: u32, t: i32) -> Self {
        CochainClass { s, t, gens: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }
}

impl std::fmt::Display for CochainClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.gens.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.gens.iter().map(|g| format!("{}_{}", self.s, g)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// The basis of `C_{s,t}`: for each generator in degree at most `t`, its
/// offset and the Milnor basis in the complementary degree.
#[derive(Clone, Debug)]
pub struct Layout {
    pub t: i32,
    pub blocks: Vec<(usize, usize, Arc<DegreeBasis>)>,
    pub len: usize,
    offsets: HashMap<usize, usize>,
}

impl Layout {
    pub fn offset(&self, gen: usize) -> Option<usize> {
        self.offsets.get(&gen).copied()
    }

    pub fn index(&self, gen: usize, m: &Monomial) -> Option<usize> {
        let off = self.offset(gen)?;
        let b = self.blocks.iter().find(|(g, _, _)| *g == gen)?;
        Some(off + b.2.index_of(m)?)
    }

    /// The `(generator, monomial)` at a basis position.
    pub fn element(&self, i: usize) -> (usize, &Monomial) {
        let k = self.blocks.partition_point(|(_, off, _)| *off <= i) - 1;
        let (g, off, b) = &self.blocks[k];
        (*g, &b.monomials[i - off])
    }
}

#[derive(Default)]
struct ProductCache {
    map: RwLock<HashMap<(Monomial, Monomial), Arc<[Monomial]>>>,
}

impl ProductCache {
    fn get(&self, a: &Monomial, b: &Monomial) -> Arc<[Monomial]> {
        if let Some(v) = self.map.read().unwrap().get(&(a.clone(), b.clone())) {
            return Arc::clone(v);
        }
        let p: Arc<[Monomial]> = multiply_monomials(a, b).into();
        self.map
            .write()
            .unwrap()
            .insert((a.clone(), b.clone()), Arc::clone(&p));
        p
    }
}

/// A minimal free resolution `C_* -> M` through a finite range of bidegrees.
pub struct Resolution {
    module: Arc<CompiledModule>,
    s_max: u32,
    t_max: i32,
    gens: Vec<Vec<Generator>>,
    products: ProductCache,
}

impl std::fmt::Debug for Resolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Resolution({}, s <= {}, t <= {})",
            self.module.name(),
            self.s_max,
            self.t_max
        )
    }
}

impl Resolution {
    pub fn new(module: Arc<CompiledModule>) -> Self {
        Resolution {
            module,
            s_max: 0,
            t_max: i32::MIN,
            gens: Vec::new(),
            products: ProductCache::default(),
        }
    }

    pub(crate) fn from_parts(
        module: Arc<CompiledModule>,
        s_max: u32,
        t_max: i32,
        gens: Vec<Vec<Generator>>,
    ) -> Self {
        Resolution {
            module,
            s_max,
            t_max,
            gens,
            products: ProductCache::default(),
        }
    }

    pub fn module(&self) -> &Arc<CompiledModule> {
        &self.module
    }

    pub fn s_max(&self) -> u32 {
        self.s_max
    }

    pub fn t_max(&self) -> i32 {
        self.t_max
    }

    pub fn generators(&self, s: u32) -> &[Generator] {
        self.gens.get(s as usize).map_or(&[], Vec::as_slice)
    }

    pub fn generator(&self, s: u32, index: usize) -> Option<&Generator> {
        self.gens.get(s as usize)?.get(index)
    }

    pub fn generator_by_name(&self, name: &str) -> Option<&Generator> {
        let (s, g) = name.split_once('_')?;
        self.generator(s.parse().ok()?, g.parse().ok()?)
    }

    /// Parses `4_6 + 4_7` into a
    /// class; all generators must share one bidegree.
    pub fn class(&self, text: &str) -> Result<CochainClass> {
        let mut s_t = None;
        let mut gens = Vec::new();
        for part in text.split('+').map(str::trim) {
            let g = self
                .generator_by_name(part)
                .ok_or_else(|| Error::Unknown(format!("generator {part}")))?;
            match s_t {
                None => s_t = Some((g.s, g.degree)),
                Some(st) if st != (g.s, g.degree) => {
                    return Err(Error::Module(format!("{text} is not homogeneous")))
                }
                _ => {}
            }
            gens.push(g.index);
        }
        let (s, t) = s_t.ok_or_else(|| Error::Unknown("empty class".into()))?;
        Ok(CochainClass::new(s, t, gens))
    }

    /// Generators of `C_s` in internal degree `t`.
    pub fn generators_in(&self, s: u32, t: i32) -> Vec<&Generator> {
        self.generators(s).iter().filter(|g| g.degree == t).collect()
    }

    /// Number of generators in each bidegree, which is the dimension of
    /// `Ext^{s,t}(M, F2)`.
    pub fn ext_dimensions(&self) -> Vec<Vec<usize>> {
        let tmin = self.module.min_degree();
        (0..=self.s_max)
            .map(|s| {
                (tmin..=self.t_max.max(tmin - 1))
                    .map(|t| self.generators_in(s, t).len())
                    .collect()
            })
            .collect()
    }

    pub fn layout(&self, s: u32, t: i32) -> Layout {
        let mut blocks = Vec::new();
        let mut offsets = HashMap::new();
        let mut len = 0;
        for g in self.generators(s) {
            if g.degree <= t {
                let b = milnor_basis((t - g.degree) as u32);
                offsets.insert(g.index, len);
                let n = b.len();
                blocks.push((g.index, len, b));
                len += n;
            }
        }
        Layout {
            t,
            blocks,
            len,
            offsets,
        }
    }

    /// Dimension of the target of `d_s` in degree `t`: `C_{s-1,t}`, or the
    /// module itself when `s == 0`.
    fn target_dim(&self, s: u32, t: i32) -> usize {
        if s == 0 {
            self.module.dim(t)
        } else {
            self.layout(s - 1, t).len
        }
    }

    /// `d(m g)` for a generator `g` of `C_s`, in the basis of `C_{s-1,t}`
    /// (or of the module when `s == 0`).
    fn apply_d(&self, s: u32, gen: &Generator, m: &Monomial, target: &Layout) -> F2Vector {
        if s == 0 {
            return self
                .module
                .act(m, gen.degree, gen.augmentation.as_ref().unwrap());
        }
        let mut v = F2Vector::zero(target.len);
        for (h, a) in &gen.terms {
            let hdeg = self.gens[s as usize - 1][*h].degree;
            let basis = milnor_basis((target.t - hdeg) as u32);
            let off = target.offset(*h).unwrap();
            for p in self.products.get(m, a).iter() {
                v.flip(off + basis.index_of(p).unwrap());
            }
        }
        v
    }

    /// The image under `d_s` of the element `x` of `C_{s,t}`.
    pub fn differential(&self, s: u32, t: i32, x: &F2Vector) -> F2Vector {
        let src = self.layout(s, t);
        let tgt = if s == 0 { None } else { Some(self.layout(s - 1, t)) };
        let mut out = F2Vector::zero(self.target_dim(s, t));
        for i in x.ones() {
            let (g, m) = src.element(i);
            let gen = &self.gens[s as usize][g];
            let v = match &tgt {
                Some(l) => self.apply_d(s, gen, m, l),
                None => self.apply_d(0, gen, m, &src),
            };
            out.add_assign(&v);
        }
        out
    }

    /// Matrix rows `d(b)` for the basis `b` of `C_{s,t}`, restricted to
    /// generators of degree below `below`.
    fn d_rows(&self, s: u32, t: i32, below: i32) -> Vec<F2Vector> {
        let src = self.layout(s, t);
        let tgt = if s == 0 { src.clone() } else { self.layout(s - 1, t) };
        let items: Vec<(usize, &Monomial)> = src
            .blocks
            .iter()
            .filter(|(g, _, _)| self.gens[s as usize][*g].degree < below)
            .flat_map(|(g, _, b)| b.monomials.iter().map(move |m| (*g, m)))
            .collect();
        items
            .par_iter()
            .map(|(g, m)| self.apply_d(s, &self.gens[s as usize][*g], m, &tgt))
            .collect()
    }

    /// Extends the resolution to cover `s <= s_max` and `t <= t_max`.
    pub fn extend(&mut self, s_max: u32, t_max: i32) {
        let tmin = self.module.min_degree();
        while self.gens.len() <= s_max as usize {
            self.gens.push(Vec::new());
        }
        let old_s = if self.t_max == i32::MIN { 0 } else { self.s_max + 1 };
        let old_t = self.t_max;
        for t in tmin..=t_max {
            for s in 0..=s_max {
                if t <= old_t && s < old_s {
                    continue;
                }
                let t_floor = tmin + s as i32;
                if t < t_floor {
                    continue;
                }
                self.step(s, t);
            }
        }
        self.s_max = self.s_max.max(s_max);
        self.t_max = self.t_max.max(t_max);
    }

    fn step(&mut self, s: u32, t: i32) {
        let n = self.target_dim(s, t);
        if n == 0 {
            return;
        }
        let kernel = self.kernel_rref(s, t, n);
        if kernel.dim() == 0 {
            return;
        }
        let order = ColumnOrder::new(self, s, t);
        let mut image = Subspace::new(n);
        for r in self.d_rows(s, t, t) {
            image.insert(&order.permute(&r));
            if image.dim() == kernel.dim() {
                break;
            }
        }
        let new: Vec<F2Vector> = kernel
            .pivots()
            .into_iter()
            .rev()
            .filter(|&p| !image.is_pivot(p))
            .map(|p| order.unpermute(kernel.row_with_pivot(p).unwrap()))
            .collect();
        for v in new {
            let index = self.gens[s as usize].len();
            let gen = if s == 0 {
                Generator {
                    s,
                    index,
                    degree: t,
                    terms: Vec::new(),
                    augmentation: Some(v),
                }
            } else {
                let tgt = self.layout(s - 1, t);
                let terms = v
                    .ones()
                    .map(|i| {
                        let (g, m) = tgt.element(i);
                        (g, m.clone())
                    })
                    .collect();
                Generator {
                    s,
                    index,
                    degree: t,
                    terms,
                    augmentation: None,
                }
            };
            self.gens[s as usize].push(gen);
        }
    }

    /// The kernel of `d_{s-1}` in degree `t` (everything when `s == 0`),
    /// fully reduced with respect to the tie-breaking column order.
    fn kernel_rref(&self, s: u32, t: i32, n: usize) -> Subspace {
        let order = ColumnOrder::new(self, s, t);
        let mut out = Subspace::new(n);
        if s == 0 {
            for i in 0..n {
                out.insert(&F2Vector::unit(n, i));
            }
            return out;
        }
        let rows = self.d_rows(s - 1, t, t + 1);
        let m = rows.first().map_or(0, F2Vector::len);
        let mut reduced: Vec<F2Vector> = Vec::new();
        let mut pivot_of: HashMap<usize, usize> = HashMap::new();
        for (i, r) in rows.into_iter().enumerate() {
            let mut v = r.concat(&F2Vector::unit(n, i));
            loop {
                match v.first_one() {
                    Some(p) if p < m => match pivot_of.get(&p) {
                        Some(&k) => v.add_assign(&reduced[k]),
                        None => {
                            pivot_of.insert(p, reduced.len());
                            reduced.push(v);
                            break;
                        }
                    },
                    _ => {
                        out.insert(&order.permute(&v.slice(m, m + n)));
                        break;
                    }
                }
            }
        }
        out
    }

    /// The canonical text form: one line per generator,
    /// `s_g t : d(s_g)`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in 0..=self.s_max {
            for g in self.generators(s) {
                let _ = writeln!(out, "{} {} : {}", g.name(), g.degree, self.format_differential(g));
            }
        }
        out
    }

    pub fn format_differential(&self, g: &Generator) -> String {
        if g.s == 0 {
            let v = g.augmentation.as_ref().unwrap();
            let parts: Vec<String> = v
                .ones()
                .map(|i| self.module.basis_name(g.degree, i).to_string())
                .collect();
            return if parts.is_empty() { "0".into() } else { parts.join(" + ") };
        }
        let mut by_target: Vec<(usize, AlgebraElement)> = Vec::new();
        for (h, m) in &g.terms {
            match by_target.iter_mut().find(|(x, _)| x == h) {
                Some((_, a)) => a.add_monomial(m.clone()),
                None => by_target.push((*h, m.clone().into())),
            }
        }
        by_target.sort_by_key(|(h, _)| *h);
        let parts: Vec<String> = by_target
            .iter()
            .map(|(h, a)| format_term(a, &format!("{}_{}", g.s - 1, h)))
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    /// `d(g)` as `(coefficient, target generator)` pairs.
    pub fn differential_terms(&self, g: &Generator) -> Vec<(AlgebraElement, usize)> {
        let mut by_target: Vec<(usize, AlgebraElement)> = Vec::new();
        for (h, m) in &g.terms {
            match by_target.iter_mut().find(|(x, _)| x == h) {
                Some((_, a)) => a.add_monomial(m.clone()),
                None => by_target.push((*h, m.clone().into())),
            }
        }
        by_target.sort_by_key(|(h, _)| *h);
        by_target.into_iter().map(|(h, a)| (a, h)).collect()
    }

    /// The vector of `d(g)` in the basis of `C_{s-1, deg g}`.
    pub fn differential_vector(&self, g: &Generator) -> F2Vector {
        if g.s == 0 {
            return g.augmentation.clone().unwrap();
        }
        let l = self.layout(g.s - 1, g.degree);
        F2Vector::from_indices(
            l.len,
            g.terms.iter().map(|(h, m)| l.index(*h, m).unwrap()),
        )
    }

    /// `m x` for `x` in `C_{s,t}`, landing in `C_{s,t+|m|}`.
    pub fn act(&self, s: u32, t: i32, m: &Monomial, x: &F2Vector) -> F2Vector {
        let src = self.layout(s, t);
        let tgt = self.layout(s, t + m.degree() as i32);
        let mut out = F2Vector::zero(tgt.len);
        for i in x.ones() {
            let (g, a) = src.element(i);
            let gdeg = self.gens[s as usize][g].degree;
            let basis = milnor_basis((tgt.t - gdeg) as u32);
            let off = tgt.offset(g).unwrap();
            for p in self.products.get(m, a).iter() {
                out.flip(off + basis.index_of(p).unwrap());
            }
        }
        out
    }
}

/// The tie-breaking order on the basis of `C_{s-1,t}` (or of the module):
/// the native order reversed, so a vector's pivot is its last nonzero entry.
struct ColumnOrder {
    n: usize,
}

impl ColumnOrder {
    fn new(res: &Resolution, s: u32, t: i32) -> Self {
        ColumnOrder {
            n: res.target_dim(s, t),
        }
    }

    fn permute(&self, v: &F2Vector) -> F2Vector {
        F2Vector::from_indices(self.n, v.ones().map(|i| self.n - 1 - i))
    }

    fn unpermute(&self, v: &F2Vector) -> F2Vector {
        self.permute(v)
    }
}

/// Resolves `module` through `s <= s_max` and `t <= t_max`.
pub fn resolve(module: Arc<CompiledModule>, s_max: u32, t_max: i32) -> Resolution {
    let mut r = Resolution::new(module);
    r.extend(s_max, t_max);
    r
}

/// The minimal resolution of F2.
pub fn resolve_f2(s_max: u32, t_max: i32) -> Resolution {
    resolve(Arc::new(CompiledModule::f2(0)), s_max, t_max)
}
