//! Finite graded modules over the Steenrod algebra with explicit action
//! tables, and degree-preserving maps between them.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{kernel_basis, F2Matrix, F2Vector, Solver, Subspace};
use crate::steenrod::{milnor_basis, AlgebraElement, Monomial};

/// A named generator of a module together with the vector it denotes.
#[derive(Clone, Debug)]
pub struct ModuleGen {
    pub name: String,
    pub degree: i32,
    pub vector: F2Vector,
}

/// A homogeneous element of a module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleElement {
    pub degree: i32,
    pub vector: F2Vector,
}

/// A finite-dimensional graded A-module.
///
/// `actions[d][e][k]` is the matrix of the `k`-th Milnor basis element of
/// degree `e` from degree `min_degree + d` to degree `min_degree + d + e`.
#[derive(Clone)]
pub struct CompiledModule {
    name: String,
    min_degree: i32,
    dims: Vec<usize>,
    actions: Vec<Vec<Vec<F2Matrix>>>,
    basis_names: Vec<Vec<String>>,
    gens: Vec<ModuleGen>,
    /// For each basis element, an expression `sum m_i g_i` in the generators.
    reps: Option<Vec<Vec<Vec<(Monomial, usize)>>>>,
}

impl fmt::Debug for CompiledModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CompiledModule({}, dims {:?} from {})", self.name, self.dims, self.min_degree)
    }
}

impl CompiledModule {
    /// Assembles a module from per-degree dimensions and a function giving
    /// the action of a Milnor basis element on a basis vector.
    pub fn from_action(
        name: impl Into<String>,
        min_degree: i32,
        dims: Vec<usize>,
        mut act: impl FnMut(i32, usize, &Monomial) -> F2Vector,
    ) -> Self {
        let span = dims.len();
        let mut actions = Vec::with_capacity(span);
        for d in 0..span {
            let mut by_deg = Vec::with_capacity(span - d);
            by_deg.push(Vec::new());
            for e in 1..span - d {
                let basis = milnor_basis(e as u32);
                let mut mats = Vec::with_capacity(basis.len());
                for m in &basis.monomials {
                    let rows = (0..dims[d])
                        .map(|i| {
                            let v = act(min_degree + d as i32, i, m);
                            debug_assert_eq!(v.len(), dims[d + e]);
                            v
                        })
                        .collect();
                    mats.push(F2Matrix::from_rows(rows, dims[d + e]));
                }
                by_deg.push(mats);
            }
            actions.push(by_deg);
        }
        let basis_names = dims
            .iter()
            .enumerate()
            .map(|(d, &n)| (0..n).map(|i| format!("x{}_{}", min_degree + d as i32, i)).collect())
            .collect();
        CompiledModule {
            name: name.into(),
            min_degree,
            dims,
            actions,
            basis_names,
            gens: Vec::new(),
            reps: None,
        }
    }

    /// Drops empty degrees at both ends.
    pub(crate) fn trim(&mut self) {
        while self.dims.last() == Some(&0) {
            self.dims.pop();
            self.actions.pop();
            self.basis_names.pop();
            if let Some(r) = self.reps.as_mut() {
                r.pop();
            }
        }
        let span = self.dims.len();
        for (d, a) in self.actions.iter_mut().enumerate() {
            a.truncate(span - d);
        }
        let lead = self.dims.iter().take_while(|&&n| n == 0).count();
        if lead > 0 && lead < self.dims.len() {
            self.dims.drain(..lead);
            self.actions.drain(..lead);
            self.basis_names.drain(..lead);
            if let Some(r) = self.reps.as_mut() {
                r.drain(..lead);
            }
            self.min_degree += lead as i32;
        }
        if self.dims.iter().all(|&n| n == 0) {
            self.dims.clear();
            self.actions.clear();
            self.basis_names.clear();
            if let Some(r) = self.reps.as_mut() {
                r.clear();
            }
        }
    }

    pub(crate) fn set_presentation_data(
        &mut self,
        basis_names: Vec<Vec<String>>,
        gens: Vec<ModuleGen>,
        reps: Option<Vec<Vec<Vec<(Monomial, usize)>>>>,
    ) {
        self.basis_names = basis_names;
        self.gens = gens;
        self.reps = reps;
    }

    /// The module F2 concentrated in degree `degree`.
    pub fn f2(degree: i32) -> Self {
        let mut m = CompiledModule::from_action("F2", degree, vec![1], |_, _, _| {
            unreachable!()
        });
        m.basis_names = vec![vec!["k".into()]];
        m.gens = vec![ModuleGen {
            name: "k".into(),
            degree,
            vector: F2Vector::unit(1, 0),
        }];
        m.reps = Some(vec![vec![vec![(Monomial::unit(), 0)]]]);
        m
    }

    /// F2 in degree `degree` with the generator called `gen`.
    pub fn f2_named(degree: i32, gen: &str) -> Self {
        let mut m = CompiledModule::f2(degree);
        m.name = format!("F2[{degree}]");
        m.basis_names = vec![vec![gen.to_string()]];
        m.gens[0].name = gen.to_string();
        m
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn min_degree(&self) -> i32 {
        self.min_degree
    }

    /// The top nonzero degree, or `min_degree - 1` for the zero module.
    pub fn max_degree(&self) -> i32 {
        self.min_degree + self.dims.len() as i32 - 1
    }

    pub fn dim(&self, degree: i32) -> usize {
        let d = degree - self.min_degree;
        if d < 0 {
            0
        } else {
            self.dims.get(d as usize).copied().unwrap_or(0)
        }
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Degrees carrying a nonzero class, each repeated by its dimension.
    pub fn degree_list(&self) -> Vec<i32> {
        let mut out = Vec::new();
        for (d, &n) in self.dims.iter().enumerate() {
            for _ in 0..n {
                out.push(self.min_degree + d as i32);
            }
        }
        out
    }

    pub fn gens(&self) -> &[ModuleGen] {
        &self.gens
    }

    pub fn gen(&self, name: &str) -> Option<&ModuleGen> {
        self.gens.iter().find(|g| g.name == name)
    }

    pub fn basis_name(&self, degree: i32, i: usize) -> &str {
        &self.basis_names[(degree - self.min_degree) as usize][i]
    }

    /// The action matrix of `op` from `degree`, `None` when either end is
    /// outside the module.
    pub fn action_matrix(&self, op: &Monomial, degree: i32) -> Option<&F2Matrix> {
        let e = op.degree() as usize;
        let d = degree - self.min_degree;
        if d < 0 || d as usize >= self.dims.len() || e == 0 {
            return None;
        }
        let by_deg = &self.actions[d as usize];
        if e >= by_deg.len() {
            return None;
        }
        let k = milnor_basis(e as u32).index_of(op)?;
        Some(&by_deg[e][k])
    }

    pub fn act(&self, op: &Monomial, degree: i32, v: &F2Vector) -> F2Vector {
        let target = degree + op.degree() as i32;
        if op.is_unit() {
            return v.clone();
        }
        match self.action_matrix(op, degree) {
            Some(m) => m.apply(v),
            None => F2Vector::zero(self.dim(target)),
        }
    }

    pub fn act_element(&self, a: &AlgebraElement, degree: i32, v: &F2Vector) -> Result<F2Vector> {
        let e = match a.degree() {
            Some(e) => e,
            None if a.is_zero() => return Ok(F2Vector::zero(0)),
            None => return Err(Error::Module(format!("inhomogeneous operation {a}"))),
        };
        let mut out = F2Vector::zero(self.dim(degree + e as i32));
        for m in a.terms() {
            out.add_assign(&self.act(m, degree, v));
        }
        Ok(out)
    }

    /// Evaluates `sum a_i g_i` given as `(coefficient, generator name)` pairs.
    pub fn evaluate(&self, terms: &[(AlgebraElement, String)]) -> Result<ModuleElement> {
        let mut out: Option<ModuleElement> = None;
        for (a, g) in terms {
            if a.is_zero() {
                continue;
            }
            let gen = self
                .gen(g)
                .ok_or_else(|| Error::Unknown(format!("generator {g} in module {}", self.name)))?;
            let v = self.act_element(a, gen.degree, &gen.vector)?;
            let deg = gen.degree + a.degree().unwrap() as i32;
            match &mut out {
                None => out = Some(ModuleElement { degree: deg, vector: v }),
                Some(o) => {
                    if o.degree != deg {
                        return Err(Error::Module("inhomogeneous element".into()));
                    }
                    if v.len() == o.vector.len() {
                        o.vector.add_assign(&v);
                    }
                }
            }
        }
        out.ok_or_else(|| Error::Module("zero element has no degree".into()))
    }

    /// Checks that the action tables respect products of Milnor basis
    /// elements: `a (b x) = (a b) x`.
    pub fn verify_associative(&self) -> Result<()> {
        let lo = self.min_degree;
        let hi = self.max_degree();
        for d in lo..=hi {
            for e1 in 1..=(hi - d) {
                for b in &milnor_basis(e1 as u32).monomials {
                    for e2 in 1..=(hi - d - e1) {
                        for a in &milnor_basis(e2 as u32).monomials {
                            let ab: AlgebraElement =
                                crate::steenrod::multiply_monomials(a, b).into_iter().collect();
                            for i in 0..self.dim(d) {
                                let x = F2Vector::unit(self.dim(d), i);
                                let lhs = self.act(a, d + e1, &self.act(b, d, &x));
                                let rhs = self.act_element(&ab, d, &x)?;
                                let rhs = if ab.is_zero() {
                                    F2Vector::zero(self.dim(d + e1 + e2))
                                } else {
                                    rhs
                                };
                                if lhs != rhs {
                                    return Err(Error::Module(format!(
                                        "{}: {a} ({b} x) != ({a} {b}) x in degree {d}",
                                        self.name
                                    )));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Renames the generators, rewriting basis names from the generator
    /// expressions when the module has them.
    pub fn rename_gens(&mut self, mut f: impl FnMut(&str) -> String) {
        for g in self.gens.iter_mut() {
            g.name = f(&g.name);
        }
        if let Some(reps) = &self.reps {
            self.basis_names = reps
                .iter()
                .map(|by_deg| {
                    by_deg
                        .iter()
                        .map(|terms| {
                            terms
                                .iter()
                                .map(|(m, g)| {
                                    crate::presentation::format_term(&m.clone().into(), &self.gens[*g].name)
                                })
                                .collect::<Vec<_>>()
                                .join(" + ")
                        })
                        .collect()
                })
                .collect();
        }
    }

    pub fn suspend(&self, shift: i32) -> CompiledModule {
        let mut m = self.clone();
        m.min_degree += shift;
        for g in m.gens.iter_mut() {
            g.degree += shift;
        }
        m.name = format!("S^{shift} {}", self.name);
        m
    }

    /// Keeps degrees `lo..=hi`; operations leaving the range act as zero.
    pub fn truncate(&self, lo: i32, hi: i32) -> CompiledModule {
        let lo = lo.max(self.min_degree);
        let hi = hi.min(self.max_degree());
        if lo > hi {
            return CompiledModule::zero(&self.name);
        }
        let a = (lo - self.min_degree) as usize;
        let b = (hi - self.min_degree) as usize;
        let span = b - a + 1;
        let mut m = self.clone();
        m.min_degree = lo;
        m.dims = self.dims[a..=b].to_vec();
        m.basis_names = self.basis_names[a..=b].to_vec();
        m.actions = self.actions[a..=b]
            .iter()
            .enumerate()
            .map(|(d, by)| by.iter().take(span - d).cloned().collect())
            .collect();
        if let Some(r) = &self.reps {
            m.reps = Some(r[a..=b].to_vec());
        }
        m.gens.retain(|g| g.degree >= lo && g.degree <= hi);
        m.name = format!("{}[{lo},{hi}]", self.name);
        m
    }

    pub fn zero(name: &str) -> CompiledModule {
        CompiledModule {
            name: name.to_string(),
            min_degree: 0,
            dims: Vec::new(),
            actions: Vec::new(),
            basis_names: Vec::new(),
            gens: Vec::new(),
            reps: None,
        }
    }

    /// The double: degrees multiplied by two, `Sq(2R)` acting as `Sq(R)` and
    /// every other Milnor basis element acting as zero.
    pub fn double(&self) -> CompiledModule {
        if self.dims.is_empty() {
            return self.clone();
        }
        let min = 2 * self.min_degree;
        let span = 2 * self.dims.len() - 1;
        let dims: Vec<usize> = (0..span)
            .map(|k| if k % 2 == 0 { self.dims[k / 2] } else { 0 })
            .collect();
        let mut m = CompiledModule::from_action(
            format!("Phi {}", self.name),
            min,
            dims.clone(),
            |deg, i, op| {
                let target = deg + op.degree() as i32;
                let tdim = if target % 2 == 0 { self.dim(target / 2) } else { 0 };
                match op.halve() {
                    Some(h) if deg % 2 == 0 => {
                        self.act(&h, deg / 2, &F2Vector::unit(self.dim(deg / 2), i))
                    }
                    _ => F2Vector::zero(tdim),
                }
            },
        );
        m.min_degree = min;
        let mut names = vec![Vec::new(); span];
        for (k, n) in names.iter_mut().enumerate() {
            if k % 2 == 0 {
                *n = self.basis_names[k / 2]
                    .iter()
                    .map(|s| double_label(s))
                    .collect();
            }
        }
        m.basis_names = names;
        m.gens = self
            .gens
            .iter()
            .map(|g| ModuleGen {
                name: g.name.clone(),
                degree: 2 * g.degree,
                vector: g.vector.clone(),
            })
            .collect();
        m.reps = self.reps.as_ref().map(|r| {
            (0..span)
                .map(|k| {
                    if k % 2 == 0 {
                        r[k / 2]
                            .iter()
                            .map(|terms| terms.iter().map(|(mo, g)| (mo.double(), *g)).collect())
                            .collect()
                    } else {
                        Vec::new()
                    }
                })
                .collect()
        });
        m
    }

    /// The tensor product with the diagonal action. Basis elements are pairs
    /// ordered by the degree of the left factor, then left index, then right.
    pub fn tensor(&self, other: &CompiledModule) -> CompiledModule {
        if self.dims.is_empty() || other.dims.is_empty() {
            return CompiledModule::zero("0");
        }
        let min = self.min_degree + other.min_degree;
        let max = self.max_degree() + other.max_degree();
        let layout = |deg: i32| -> Vec<(i32, usize, usize)> {
            let mut out = Vec::new();
            for p in self.min_degree..=self.max_degree() {
                let q = deg - p;
                for i in 0..self.dim(p) {
                    for j in 0..other.dim(q) {
                        out.push((p, i, j));
                    }
                }
            }
            out
        };
        let layouts: Vec<Vec<(i32, usize, usize)>> = (min..=max).map(layout).collect();
        let positions: Vec<std::collections::HashMap<(i32, usize, usize), usize>> = layouts
            .iter()
            .map(|lay| lay.iter().enumerate().map(|(k, &key)| (key, k)).collect())
            .collect();
        let index = |deg: i32, p: i32, i: usize, j: usize| -> usize { positions[(deg - min) as usize][&(p, i, j)] };
        let dims: Vec<usize> = layouts.iter().map(Vec::len).collect();
        let mut m = CompiledModule::from_action(
            format!("{} (x) {}", self.name, other.name),
            min,
            dims.clone(),
            |deg, k, op| {
                let (p, i, j) = layouts[(deg - min) as usize][k];
                let q = deg - p;
                let target = deg + op.degree() as i32;
                let mut out = F2Vector::zero(dims[(target - min) as usize]);
                for (l, r) in op.coproduct() {
                    let pl = p + l.degree() as i32;
                    let qr = q + r.degree() as i32;
                    if self.dim(pl) == 0 || other.dim(qr) == 0 {
                        continue;
                    }
                    let x = self.act(&l, p, &F2Vector::unit(self.dim(p), i));
                    if x.is_zero() {
                        continue;
                    }
                    let y = other.act(&r, q, &F2Vector::unit(other.dim(q), j));
                    for a in x.ones() {
                        for b in y.ones() {
                            out.flip(index(target, pl, a, b));
                        }
                    }
                }
                out
            },
        );
        m.min_degree = min;
        m.basis_names = layouts
            .iter()
            .enumerate()
            .map(|(d, lay)| {
                let deg = min + d as i32;
                lay.iter()
                    .map(|&(p, i, j)| {
                        format!("{} (x) {}", self.basis_name(p, i), other.basis_name(deg - p, j))
                    })
                    .collect()
            })
            .collect();
        m.trim();
        m
    }

    pub fn direct_sum(&self, other: &CompiledModule) -> CompiledModule {
        if self.dims.is_empty() {
            return other.clone();
        }
        if other.dims.is_empty() {
            return self.clone();
        }
        let min = self.min_degree.min(other.min_degree);
        let max = self.max_degree().max(other.max_degree());
        let dims: Vec<usize> = (min..=max).map(|d| self.dim(d) + other.dim(d)).collect();
        let mut m = CompiledModule::from_action(
            format!("{} + {}", self.name, other.name),
            min,
            dims,
            |deg, k, op| {
                let t = deg + op.degree() as i32;
                if k < self.dim(deg) {
                    self.act(op, deg, &F2Vector::unit(self.dim(deg), k))
                        .concat(&F2Vector::zero(other.dim(t)))
                } else {
                    let k2 = k - self.dim(deg);
                    F2Vector::zero(self.dim(t))
                        .concat(&other.act(op, deg, &F2Vector::unit(other.dim(deg), k2)))
                }
            },
        );
        m.min_degree = min;
        m.basis_names = (min..=max)
            .map(|d| {
                let mut v: Vec<String> =
                    (0..self.dim(d)).map(|i| self.basis_name(d, i).to_string()).collect();
                v.extend((0..other.dim(d)).map(|i| other.basis_name(d, i).to_string()));
                v
            })
            .collect();
        m.trim();
        m
    }
}

fn double_label(s: &str) -> String {
    let Ok(terms) = crate::parse::parse_linear(s) else {
        return s.to_string();
    };
    terms
        .iter()
        .map(|(a, g)| {
            let a = a.double();
            if a == AlgebraElement::unit() {
                g.clone()
            } else if a.len() == 1 {
                format!("{a} {g}")
            } else {
                format!("({a}) {g}")
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// A degree-preserving A-linear map; `matrices[d]` acts on row vectors from
/// the source in degree `source.min_degree() + d`.
#[derive(Clone, Debug)]
pub struct ModuleMap {
    pub source: Arc<CompiledModule>,
    pub target: Arc<CompiledModule>,
    matrices: Vec<F2Matrix>,
}

impl ModuleMap {
    pub fn from_fn(
        source: Arc<CompiledModule>,
        target: Arc<CompiledModule>,
        mut f: impl FnMut(i32, usize) -> F2Vector,
    ) -> Self {
        let matrices = (source.min_degree()..=source.max_degree())
            .map(|d| {
                let rows = (0..source.dim(d)).map(|i| f(d, i)).collect();
                F2Matrix::from_rows(rows, target.dim(d))
            })
            .collect();
        ModuleMap {
            source,
            target,
            matrices,
        }
    }

    pub fn zero(source: Arc<CompiledModule>, target: Arc<CompiledModule>) -> Self {
        let t = Arc::clone(&target);
        ModuleMap::from_fn(source, target, |d, _| F2Vector::zero(t.dim(d)))
    }

    /// The map sending each named generator of the source to the given
    /// element of the target. Requires the source to remember how its basis
    /// is expressed in its generators.
    pub fn from_generator_images(
        source: Arc<CompiledModule>,
        target: Arc<CompiledModule>,
        images: &[(String, Vec<(AlgebraElement, String)>)],
    ) -> Result<Self> {
        let mut gen_images = Vec::new();
        for g in &source.gens {
            let img = images.iter().find(|(n, _)| *n == g.name);
            let v = match img {
                None => F2Vector::zero(target.dim(g.degree)),
                Some((_, terms)) => {
                    if terms.iter().all(|(a, _)| a.is_zero()) {
                        F2Vector::zero(target.dim(g.degree))
                    } else {
                        let e = target.evaluate(terms)?;
                        if e.degree != g.degree && target.dim(e.degree) > 0 {
                            return Err(Error::Map(format!(
                                "image of {} has degree {} but the generator has degree {}",
                                g.name, e.degree, g.degree
                            )));
                        }
                        if e.degree != g.degree {
                            F2Vector::zero(target.dim(g.degree))
                        } else {
                            e.vector
                        }
                    }
                }
            };
            gen_images.push(v);
        }
        for (n, _) in images {
            if source.gen(n).is_none() {
                return Err(Error::Unknown(format!("generator {n} in module {}", source.name)));
            }
        }
        ModuleMap::from_generator_vectors(source, target, gen_images)
    }

    /// The map sending the `i`-th generator of the source to `gen_images[i]`,
    /// a vector of the target in the generator's degree.
    pub fn from_generator_vectors(
        source: Arc<CompiledModule>,
        target: Arc<CompiledModule>,
        gen_images: Vec<F2Vector>,
    ) -> Result<Self> {
        let reps = source
            .reps
            .clone()
            .ok_or_else(|| Error::Map(format!("module {} has no generator expressions", source.name)))?;
        if gen_images.len() != source.gens.len() {
            return Err(Error::Map(format!(
                "{} generator images given for {} generators",
                gen_images.len(),
                source.gens.len()
            )));
        }
        for (g, v) in source.gens.iter().zip(&gen_images) {
            if v.len() != target.dim(g.degree) {
                return Err(Error::Map(format!("image of {} has the wrong length", g.name)));
            }
        }
        let src = Arc::clone(&source);
        let tgt = Arc::clone(&target);
        let map = ModuleMap::from_fn(source, target, |d, i| {
            let mut out = F2Vector::zero(tgt.dim(d));
            for (m, g) in &reps[(d - src.min_degree) as usize][i] {
                let gd = src.gens[*g].degree;
                if tgt.dim(gd) == 0 {
                    continue;
                }
                out.add_assign(&tgt.act(m, gd, &gen_images[*g]));
            }
            out
        });
        map.verify_linear()?;
        Ok(map)
    }

    /// The same matrices between modules with identical degreewise bases.
    pub fn with_modules(&self, source: Arc<CompiledModule>, target: Arc<CompiledModule>) -> ModuleMap {
        let this = self.clone();
        let t = Arc::clone(&target);
        ModuleMap::from_fn(source, target, |d, i| {
            if this.source.dim(d) == 0 {
                return F2Vector::zero(t.dim(d));
            }
            this.apply(d, &F2Vector::unit(this.source.dim(d), i))
        })
    }

    pub fn matrix(&self, degree: i32) -> Option<&F2Matrix> {
        let d = degree - self.source.min_degree();
        if d < 0 {
            return None;
        }
        self.matrices.get(d as usize)
    }

    pub fn apply(&self, degree: i32, v: &F2Vector) -> F2Vector {
        match self.matrix(degree) {
            Some(m) => m.apply(v),
            None => F2Vector::zero(self.target.dim(degree)),
        }
    }

    /// Checks `f(a x) = a f(x)` for every Milnor basis element.
    pub fn verify_linear(&self) -> Result<()> {
        let s = &self.source;
        for d in s.min_degree()..=s.max_degree() {
            for e in 1..=(s.max_degree().max(self.target.max_degree()) - d) {
                for op in &milnor_basis(e as u32).monomials {
                    for i in 0..s.dim(d) {
                        let x = F2Vector::unit(s.dim(d), i);
                        let lhs = self.apply(d + e, &s.act(op, d, &x));
                        let rhs = self.target.act(op, d, &self.apply(d, &x));
                        if lhs != rhs {
                            return Err(Error::Map(format!(
                                "map {} -> {} does not commute with {op} on {}",
                                s.name,
                                self.target.name,
                                s.basis_name(d, i)
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn compose(&self, after: &ModuleMap) -> ModuleMap {
        let next = after.clone();
        let this = self.clone();
        ModuleMap::from_fn(Arc::clone(&self.source), Arc::clone(&after.target), |d, i| {
            let x = F2Vector::unit(this.source.dim(d), i);
            next.apply(d, &this.apply(d, &x))
        })
    }

    pub fn is_zero(&self) -> bool {
        self.matrices.iter().all(F2Matrix::is_zero)
    }

    pub fn rank(&self, degree: i32) -> usize {
        self.matrix(degree).map_or(0, F2Matrix::rank)
    }

    pub fn double(&self, source: Arc<CompiledModule>, target: Arc<CompiledModule>) -> ModuleMap {
        let this = self.clone();
        let t = Arc::clone(&target);
        ModuleMap::from_fn(source, target, |d, i| {
            if d % 2 != 0 {
                return F2Vector::zero(t.dim(d));
            }
            this.apply(d / 2, &F2Vector::unit(this.source.dim(d / 2), i))
        })
    }

    pub fn suspend(&self, shift: i32, source: Arc<CompiledModule>, target: Arc<CompiledModule>) -> ModuleMap {
        let this = self.clone();
        ModuleMap::from_fn(source, target, |d, i| {
            this.apply(d - shift, &F2Vector::unit(this.source.dim(d - shift), i))
        })
    }
}

/// The kernel of `f` as a module, with its inclusion into the source.
pub fn kernel(f: &ModuleMap) -> (Arc<CompiledModule>, ModuleMap) {
    let s = &f.source;
    let lo = s.min_degree();
    let hi = s.max_degree();
    let bases: Vec<Vec<F2Vector>> = (lo..=hi)
        .map(|d| match f.matrix(d) {
            Some(m) if m.ncols() > 0 => kernel_basis(m),
            _ => (0..s.dim(d)).map(|i| F2Vector::unit(s.dim(d), i)).collect(),
        })
        .collect();
    let solvers: Vec<Option<Solver>> = bases
        .iter()
        .zip(lo..=hi)
        .map(|(b, d)| {
            if b.is_empty() {
                None
            } else {
                Some(Solver::new(&F2Matrix::from_rows(b.clone(), s.dim(d))))
            }
        })
        .collect();
    let dims: Vec<usize> = bases.iter().map(Vec::len).collect();
    let mut k = CompiledModule::from_action(format!("ker({})", s.name()), lo, dims.clone(), |deg, i, op| {
        let v = &bases[(deg - lo) as usize][i];
        let image = s.act(op, deg, v);
        let t = deg + op.degree() as i32;
        match &solvers[(t - lo) as usize] {
            Some(sol) => sol.solve(&image).expect("kernel is a submodule"),
            None => F2Vector::zero(0),
        }
    });
    k.min_degree = lo;
    k.basis_names = (lo..=hi)
        .map(|d| {
            bases[(d - lo) as usize]
                .iter()
                .map(|v| {
                    v.ones()
                        .map(|j| s.basis_name(d, j).to_string())
                        .collect::<Vec<_>>()
                        .join(" + ")
                })
                .collect()
        })
        .collect();
    let lead = bases.iter().take_while(|b| b.is_empty()).count() as i32;
    let trimmed_bases: Vec<Vec<F2Vector>> = bases.iter().skip(lead as usize).cloned().collect();
    k.trim();
    let k = Arc::new(k);
    let kmin = k.min_degree();
    let inclusion = ModuleMap::from_fn(Arc::clone(&k), Arc::clone(s), |d, i| {
        trimmed_bases[(d - kmin) as usize][i].clone()
    });
    (k, inclusion)
}

/// The cokernel of `f` as a module, with the projection from the target.
pub fn cokernel(f: &ModuleMap) -> (Arc<CompiledModule>, ModuleMap) {
    let t = &f.target;
    let lo = t.min_degree();
    let hi = t.max_degree();
    let images: Vec<Subspace> = (lo..=hi)
        .map(|d| {
            let mut sp = Subspace::new(t.dim(d));
            if let Some(m) = f.matrix(d) {
                for r in m.rows() {
                    sp.insert(r);
                }
            }
            sp
        })
        .collect();
    let complements: Vec<Vec<usize>> = images
        .iter()
        .map(|sp| (0..sp.ambient()).filter(|&i| !sp.is_pivot(i)).collect())
        .collect();
    let project = |d: i32, v: &F2Vector| -> F2Vector {
        let k = (d - lo) as usize;
        let mut w = v.clone();
        images[k].reduce(&mut w);
        F2Vector::from_indices(
            complements[k].len(),
            complements[k].iter().enumerate().filter(|(_, &c)| w.get(c)).map(|(i, _)| i),
        )
    };
    let dims: Vec<usize> = complements.iter().map(Vec::len).collect();
    let mut c = CompiledModule::from_action(format!("coker -> {}", t.name()), lo, dims, |deg, i, op| {
        let col = complements[(deg - lo) as usize][i];
        let v = t.act(op, deg, &F2Vector::unit(t.dim(deg), col));
        let td = deg + op.degree() as i32;
        project(td, &v)
    });
    c.min_degree = lo;
    c.basis_names = (lo..=hi)
        .map(|d| {
            complements[(d - lo) as usize]
                .iter()
                .map(|&j| t.basis_name(d, j).to_string())
                .collect()
        })
        .collect();
    c.trim();
    let c = Arc::new(c);
    let proj = ModuleMap::from_fn(Arc::clone(t), Arc::clone(&c), |d, i| {
        if c.dim(d) == 0 {
            return F2Vector::zero(0);
        }
        project(d, &F2Vector::unit(t.dim(d), i))
    });
    (c, proj)
}
