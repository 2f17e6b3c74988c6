//! Chain maps out of minimal resolutions: lifts into extensions, induced
//! maps on Ext, and connecting homomorphisms of short exact sequences.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::extension::ExactExtension;
use crate::linalg::{F2Matrix, F2Vector, Solver};
use crate::module::{CompiledModule, ModuleMap};
use crate::parse::parse_linear;
use crate::resolution::{CochainClass, Generator, Resolution};
use crate::steenrod::Monomial;

/// Which solution of an underdetermined system a lift picks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TieBreak {
    /// Free variables are the later unknowns and are set to zero.
    #[default]
    Natural,
    /// As `Natural` with the unknowns listed in reverse.
    Reversed,
}

/// Solves `x a = b` under a [`TieBreak`].
#[derive(Clone, Debug)]
pub struct OrderedSolver {
    solver: Solver,
    n: usize,
    tie: TieBreak,
}

impl OrderedSolver {
    pub fn new(a: &F2Matrix, tie: TieBreak) -> Self {
        let n = a.nrows();
        let solver = match tie {
            TieBreak::Natural => Solver::new(a),
            TieBreak::Reversed => {
                let rows: Vec<F2Vector> = a.rows().iter().rev().cloned().collect();
                Solver::new(&F2Matrix::from_rows(rows, a.ncols()))
            }
        };
        OrderedSolver { solver, n, tie }
    }

    pub fn solve(&self, b: &F2Vector) -> Option<F2Vector> {
        let x = self.solver.solve(b)?;
        Some(match self.tie {
            TieBreak::Natural => x,
            TieBreak::Reversed => F2Vector::from_indices(self.n, x.ones().map(|i| self.n - 1 - i)),
        })
    }
}

/// A graded chain complex that maps can be lifted into: level `i` in
/// internal degree `t`, with a boundary to level `i - 1`, and level 0
/// mapping to a base module.
pub trait LiftTarget {
    fn dim(&self, level: u32, t: i32) -> usize;
    fn act(&self, level: u32, t: i32, m: &Monomial, x: &F2Vector) -> F2Vector;
    /// Rows are the boundaries of the basis of level `level` in degree `t`.
    fn boundary_matrix(&self, level: u32, t: i32) -> F2Matrix;
}

/// An extension viewed as the complex `N_0 <- N_1 <- ... <- N_s` over F2.
pub struct ExtensionTarget<'a>(pub &'a ExactExtension);

impl LiftTarget for ExtensionTarget<'_> {
    fn dim(&self, level: u32, t: i32) -> usize {
        self.0.modules().get(level as usize).map_or(0, |m| m.dim(t))
    }

    fn act(&self, level: u32, t: i32, m: &Monomial, x: &F2Vector) -> F2Vector {
        match self.0.modules().get(level as usize) {
            Some(module) => module.act(m, t, x),
            None => F2Vector::zero(0),
        }
    }

    fn boundary_matrix(&self, level: u32, t: i32) -> F2Matrix {
        let map = self.0.boundary(level as usize);
        map_matrix(map, t)
    }
}

/// A free resolution viewed as the complex `C_0 <- C_1 <- ...` over its
/// module.
pub struct ResolutionTarget<'a>(pub &'a Resolution);

impl LiftTarget for ResolutionTarget<'_> {
    fn dim(&self, level: u32, t: i32) -> usize {
        if level > self.0.s_max() {
            return 0;
        }
        self.0.layout(level, t).len
    }

    fn act(&self, level: u32, t: i32, m: &Monomial, x: &F2Vector) -> F2Vector {
        self.0.act(level, t, m, x)
    }

    fn boundary_matrix(&self, level: u32, t: i32) -> F2Matrix {
        let n = self.dim(level, t);
        let cols = if level == 0 {
            self.0.module().dim(t)
        } else {
            self.0.layout(level - 1, t).len
        };
        let rows = (0..n)
            .map(|i| self.0.differential(level, t, &F2Vector::unit(n, i)))
            .collect();
        F2Matrix::from_rows(rows, cols)
    }
}

fn map_matrix(map: &ModuleMap, t: i32) -> F2Matrix {
    let n = map.source.dim(t);
    let cols = map.target.dim(t);
    match map.matrix(t) {
        Some(m) if n > 0 => m.clone(),
        _ => F2Matrix::zero(n, cols),
    }
}

/// Lifts along `target` starting from source level `shift`. `base(g)` is the
/// required image under the level-0 boundary of the value at a generator `g`
/// of `C_shift`. Returns `values[i][g]` for source level `shift + i`, for
/// `i <= levels` and generator degrees up to `t_max`.
pub fn lift_generic(
    source: &Resolution,
    shift: u32,
    target: &dyn LiftTarget,
    levels: u32,
    t_max: i32,
    tie: TieBreak,
    base: &dyn Fn(&Generator) -> Result<F2Vector>,
) -> Result<Vec<Vec<F2Vector>>> {
    let mut values: Vec<Vec<F2Vector>> = Vec::new();
    for i in 0..=levels {
        let s = shift + i;
        if s > source.s_max() {
            break;
        }
        let mut solvers: HashMap<i32, OrderedSolver> = HashMap::new();
        let mut level = Vec::new();
        for g in source.generators(s) {
            let t = g.degree;
            let n = target.dim(i, t);
            if t > t_max || n == 0 {
                level.push(F2Vector::zero(n));
                continue;
            }
            let rhs = if i == 0 {
                base(g)?
            } else {
                let mut v = target_zero_below(target, i, t);
                for (h, m) in &g.terms {
                    let hd = source.generators(s - 1)[*h].degree;
                    let x: &F2Vector = &values[i as usize - 1][*h];
                    if x.is_zero() {
                        continue;
                    }
                    v.add_assign(&target.act(i - 1, hd, m, x));
                }
                v
            };
            let solver = solvers
                .entry(t)
                .or_insert_with(|| OrderedSolver::new(&target.boundary_matrix(i, t), tie));
            let x = solver.solve(&rhs).ok_or_else(|| {
                Error::NoSolution(format!("no lift at {} in degree {t}", g.name()))
            })?;
            level.push(x);
        }
        values.push(level);
    }
    Ok(values)
}

fn target_zero_below(target: &dyn LiftTarget, i: u32, t: i32) -> F2Vector {
    F2Vector::zero(target.dim(i - 1, t))
}

/// A chain map from the resolution of F2 into an extension.
#[derive(Clone, Debug)]
pub struct ChainMapToExtension {
    pub s: usize,
    pub t: i32,
    /// `values[i][g]`: the image of `i_g` in `N_i`, in degree `|i_g|`.
    pub values: Vec<Vec<F2Vector>>,
}

impl ChainMapToExtension {
    /// The generators of `C_s` sent to the top class.
    pub fn top_cocycle(&self) -> CochainClass {
        let gens = self
            .values
            .get(self.s)
            .map(|level| {
                level
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| v.len() == 1 && v.get(0))
                    .map(|(g, _)| g)
                    .collect::<Vec<_>>()
            })
            .unwrap_or_default();
        CochainClass::new(self.s as u32, self.t, gens)
    }

    /// Nonzero values as `(generator, element)` strings.
    pub fn describe(&self, res: &Resolution, e: &ExactExtension) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for (i, level) in self.values.iter().enumerate() {
            for (g, v) in level.iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                let gen = &res.generators(i as u32)[g];
                let m = e.module(i);
                let names: Vec<&str> = v.ones().map(|k| m.basis_name(gen.degree, k)).collect();
                out.push((gen.name(), names.join(" + ")));
            }
        }
        out
    }
}

fn check_frontier(res: &Resolution, e: &ExactExtension) -> Result<i32> {
    let t_max = e.modules().iter().map(|m| m.max_degree()).max().unwrap_or(0);
    if res.s_max() < e.length() as u32 || res.t_max() < t_max {
        return Err(Error::DegreeCap {
            degree: t_max.max(0) as u32,
            cap: res.t_max().max(0) as u32,
        });
    }
    Ok(t_max)
}

/// Lifts the identity of F2 to a chain map from the resolution into `e`.
pub fn lift_to_extension(res: &Resolution, e: &ExactExtension, tie: TieBreak) -> Result<ChainMapToExtension> {
    let t_max = check_frontier(res, e)?;
    let values = lift_generic(
        res,
        0,
        &ExtensionTarget(e),
        e.length() as u32,
        t_max,
        tie,
        &|g: &Generator| Ok(g.augmentation.clone().unwrap()),
    )?;
    Ok(ChainMapToExtension {
        s: e.length(),
        t: e.t(),
        values,
    })
}

/// Result of [`verify_chain_map`]: the generators whose square fails.
#[derive(Clone, Debug, Default)]
pub struct ChainMapReport {
    pub failures: Vec<String>,
}

impl ChainMapReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Reads an assignment `generator -> element of N_i` into a chain map,
/// unlisted generators going to zero.
pub fn chain_map_from_assignment(
    res: &Resolution,
    e: &ExactExtension,
    assignment: &[(&str, &str)],
) -> Result<ChainMapToExtension> {
    let t_max = check_frontier(res, e)?;
    let mut values: Vec<Vec<F2Vector>> = (0..=e.length())
        .map(|i| {
            res.generators(i as u32)
                .iter()
                .map(|g| F2Vector::zero(if g.degree <= t_max { e.module(i).dim(g.degree) } else { 0 }))
                .collect()
        })
        .collect();
    for (name, elt) in assignment {
        let g = res
            .generator_by_name(name)
            .ok_or_else(|| Error::Unknown(format!("generator {name}")))?;
        let i = g.s as usize;
        if i > e.length() {
            return Err(Error::Map(format!("{name} is beyond the extension")));
        }
        let terms = parse_linear(elt).map_err(|m| Error::parse(0, m))?;
        let v = e.module(i).evaluate(&terms)?;
        if v.degree != g.degree {
            return Err(Error::Map(format!("{name} and {elt} have different degrees")));
        }
        values[i][g.index] = v.vector;
    }
    Ok(ChainMapToExtension {
        s: e.length(),
        t: e.t(),
        values,
    })
}

/// Checks every commuting square of a chain map into `e`.
pub fn verify_chain_map(res: &Resolution, e: &ExactExtension, c: &ChainMapToExtension) -> ChainMapReport {
    let mut failures = Vec::new();
    let target = ExtensionTarget(e);
    let t_max = e.modules().iter().map(|m| m.max_degree()).max().unwrap_or(0);
    for i in 0..=e.length() {
        for g in res.generators(i as u32) {
            if g.degree > t_max {
                continue;
            }
            let t = g.degree;
            let x = &c.values[i][g.index];
            let lhs = if target.dim(i as u32, t) == 0 {
                F2Vector::zero(if i == 0 { usize::from(t == 0) } else { e.module(i - 1).dim(t) })
            } else {
                e.boundary(i).apply(t, x)
            };
            let rhs = if i == 0 {
                g.augmentation.clone().unwrap()
            } else {
                let mut v = F2Vector::zero(e.module(i - 1).dim(t));
                for (h, m) in &g.terms {
                    let hd = res.generators(i as u32 - 1)[*h].degree;
                    let y = &c.values[i - 1][*h];
                    if !y.is_zero() {
                        v.add_assign(&target.act(i as u32 - 1, hd, m, y));
                    }
                }
                v
            };
            if lhs != rhs {
                failures.push(format!("square at {} fails", g.name()));
            }
        }
    }
    ChainMapReport { failures }
}

fn unit_coefficient(res: &Resolution, s: u32, t: i32, x: &F2Vector, y: &CochainClass) -> bool {
    let layout = res.layout(s, t);
    let mut acc = false;
    for &h in &y.gens {
        if let Some(k) = layout.index(h, &Monomial::unit()) {
            if x.get(k) {
                acc = !acc;
            }
        }
    }
    acc
}

/// The map on Ext induced by `p: M -> N`: lifts `p` to the resolutions and
/// pulls back the cocycle `y` of the resolution of `N`.
pub fn pullback_on_ext(
    p: &ModuleMap,
    res_m: &Resolution,
    res_n: &Resolution,
    y: &CochainClass,
) -> Result<CochainClass> {
    for d in p.target.min_degree()..=p.target.max_degree() {
        if p.rank(d) != p.target.dim(d) {
            return Err(Error::Map(format!("map is not onto in degree {d}")));
        }
    }
    if res_m.s_max() < y.s || res_m.t_max() < y.t || res_n.s_max() < y.s || res_n.t_max() < y.t {
        return Err(Error::DegreeCap {
            degree: y.t.max(0) as u32,
            cap: res_m.t_max().min(res_n.t_max()).max(0) as u32,
        });
    }
    let values = lift_generic(
        res_m,
        0,
        &ResolutionTarget(res_n),
        y.s,
        y.t,
        TieBreak::Natural,
        &|g: &Generator| Ok(p.apply(g.degree, g.augmentation.as_ref().unwrap())),
    )?;
    let gens = res_m
        .generators(y.s)
        .iter()
        .filter(|g| g.degree == y.t)
        .filter(|g| unit_coefficient(res_n, y.s, y.t, &values[y.s as usize][g.index], y))
        .map(|g| g.index);
    Ok(CochainClass::new(y.s, y.t, gens.collect::<Vec<_>>()))
}

/// The connecting homomorphism `Ext^{k,t}(M') -> Ext^{k+1,t}(M'')` of the
/// short exact sequence `0 -> M' -> M -> M'' -> 0` given by `i` and `p`.
pub fn les_boundary(
    i: &ModuleMap,
    p: &ModuleMap,
    res_sub: &Resolution,
    res_quot: &Resolution,
    y: &CochainClass,
) -> Result<CochainClass> {
    let t = y.t;
    if res_sub.s_max() < y.s || res_sub.t_max() < t || res_quot.s_max() < y.s + 1 || res_quot.t_max() < t {
        return Err(Error::DegreeCap {
            degree: t.max(0) as u32,
            cap: res_sub.t_max().min(res_quot.t_max()).max(0) as u32,
        });
    }
    let m: &Arc<CompiledModule> = &p.source;
    let mut f0: Vec<F2Vector> = Vec::new();
    let mut p_solvers: HashMap<i32, Solver> = HashMap::new();
    for g in res_quot.generators(0) {
        if g.degree > t || m.dim(g.degree) == 0 {
            f0.push(F2Vector::zero(m.dim(g.degree)));
            continue;
        }
        let sol = p_solvers
            .entry(g.degree)
            .or_insert_with(|| Solver::new(&map_matrix(p, g.degree)));
        f0.push(
            sol.solve(g.augmentation.as_ref().unwrap())
                .ok_or_else(|| Error::Map(format!("p is not onto in degree {}", g.degree)))?,
        );
    }
    let base = |g: &Generator| -> Result<F2Vector> {
        let mut v = F2Vector::zero(m.dim(g.degree));
        for (h, a) in &g.terms {
            let hd = res_quot.generators(0)[*h].degree;
            if m.dim(hd) > 0 && !f0[*h].is_zero() {
                v.add_assign(&m.act(a, hd, &f0[*h]));
            }
        }
        let sub_dim = i.source.dim(g.degree);
        if v.is_zero() {
            return Ok(F2Vector::zero(sub_dim));
        }
        Solver::new(&map_matrix(i, g.degree))
            .solve(&v)
            .ok_or_else(|| Error::Map(format!("image of {} is not in the submodule", g.name())))
    };
    let values = lift_generic(res_quot, 1, &ResolutionTarget(res_sub), y.s, t, TieBreak::Natural, &base)?;
    let gens = res_quot
        .generators(y.s + 1)
        .iter()
        .filter(|g| g.degree == t)
        .filter(|g| unit_coefficient(res_sub, y.s, t, &values[y.s as usize][g.index], y))
        .map(|g| g.index);
    Ok(CochainClass::new(y.s + 1, t, gens.collect::<Vec<_>>()))
}
