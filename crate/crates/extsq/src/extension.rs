//! Exact extensions `0 <- F2 <- N_0 <- ... <- N_{s-1} <- Sigma^t F2 <- 0`.
//!
//! Text format, with module paths relative to the extension file:
//!
//! ```text
//! extension c0
//! module ../modules/c0_m0.mod
//! module ../modules/c0_m1.mod
//! module ../modules/c0_m2.mod
//! top k3 11
//! map k1 -> Sq1 k0
//! map k2 -> Sq4 k1
//! map k3 -> Sq2 Sq4 k2
//! ```
//!
//! `double <path>` in place of the module, top and map lines gives the
//! double of another extension. Generators of `N_0` in degree 0 map to the
//! unit of F2 unless `aug <gen>` lines say otherwise.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::F2Vector;
use crate::module::{CompiledModule, ModuleMap};
use crate::parse::parse_linear;
use crate::presentation::Presentation;
use crate::resolution::{CochainClass, Resolution};
use crate::steenrod::{AlgebraElement, Monomial};

/// Name of the generator of the F2 that an extension augments to.
pub const UNIT_GEN: &str = "iota";

#[derive(Clone, Debug)]
pub struct ExactExtension {
    name: String,
    t: i32,
    /// `N_0, ..., N_s` with `N_s = Sigma^t F2`.
    modules: Vec<Arc<CompiledModule>>,
    /// `maps[0]` is the augmentation `N_0 -> F2`, `maps[j]` is `N_j -> N_{j-1}`.
    maps: Vec<ModuleMap>,
}

/// Per-node results of [`ExactExtension::verify_exact`].
#[derive(Clone, Debug, Default)]
pub struct ExactnessReport {
    pub failures: Vec<String>,
}

impl ExactnessReport {
    pub fn is_exact(&self) -> bool {
        self.failures.is_empty()
    }
}

impl ExactExtension {
    /// Assembles an extension; `modules` ends with the top `Sigma^t F2` and
    /// `maps[0]` is the augmentation.
    pub fn from_parts(
        name: impl Into<String>,
        t: i32,
        modules: Vec<Arc<CompiledModule>>,
        maps: Vec<ModuleMap>,
    ) -> Result<Self> {
        if modules.is_empty() || maps.len() != modules.len() {
            return Err(Error::Map("an extension needs one map per module".into()));
        }
        let top = modules.last().unwrap();
        if top.total_dim() != 1 || top.dim(t) != 1 {
            return Err(Error::Module(format!("top module is not Sigma^{t} F2")));
        }
        Ok(ExactExtension {
            name: name.into(),
            t,
            modules,
            maps,
        })
    }

    /// The length-zero extension `0 <- F2 <- F2 <- 0`.
    pub fn identity() -> Self {
        let f2 = Arc::new(CompiledModule::f2_named(0, "k0"));
        let unit = Arc::new(CompiledModule::f2_named(0, UNIT_GEN));
        let aug = ModuleMap::from_fn(Arc::clone(&f2), unit, |_, _| F2Vector::unit(1, 0));
        ExactExtension {
            name: "1".into(),
            t: 0,
            modules: vec![f2],
            maps: vec![aug],
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    /// The homological degree `s` of the represented class.
    pub fn length(&self) -> usize {
        self.modules.len() - 1
    }

    pub fn t(&self) -> i32 {
        self.t
    }

    pub fn modules(&self) -> &[Arc<CompiledModule>] {
        &self.modules
    }

    pub fn module(&self, j: usize) -> &Arc<CompiledModule> {
        &self.modules[j]
    }

    /// The map out of `N_j`: the augmentation for `j == 0`.
    pub fn boundary(&self, j: usize) -> &ModuleMap {
        &self.maps[j]
    }

    pub fn augmentation(&self) -> &ModuleMap {
        &self.maps[0]
    }

    pub fn top(&self) -> &Arc<CompiledModule> {
        self.modules.last().unwrap()
    }

    /// The module index and degree of a named generator.
    pub fn find_gen(&self, name: &str) -> Option<(usize, i32)> {
        self.modules
            .iter()
            .enumerate()
            .find_map(|(j, m)| m.gen(name).map(|g| (j, g.degree)))
    }

    /// The image of each generator under the boundary, in the element syntax.
    pub fn boundary_list(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for j in 1..self.modules.len() {
            let src = &self.modules[j];
            let tgt = &self.modules[j - 1];
            for g in src.gens() {
                if g.vector.is_empty() {
                    continue;
                }
                let img = self.maps[j].apply(g.degree, &g.vector);
                let names: Vec<String> = img
                    .ones()
                    .map(|i| tgt.basis_name(g.degree, i).to_string())
                    .collect();
                let text = if names.is_empty() { "0".into() } else { names.join(" + ") };
                out.push((g.name.clone(), text));
            }
        }
        out
    }

    /// Linearity, vanishing composites and degreewise exactness at every
    /// node, including surjectivity onto F2 and injectivity of the top.
    pub fn verify_exact(&self) -> ExactnessReport {
        let mut failures = Vec::new();
        for (j, f) in self.maps.iter().enumerate() {
            if let Err(e) = f.verify_linear() {
                failures.push(format!("map out of N_{j}: {e}"));
            }
        }
        if self.maps[0].rank(0) != 1 {
            failures.push("augmentation is not onto F2".into());
        }
        let unit = &self.maps[0].target;
        for d in unit.min_degree()..=unit.max_degree() {
            if d != 0 && unit.dim(d) > 0 {
                failures.push("augmentation target is not F2".into());
            }
        }
        let s = self.length();
        for j in 0..=s {
            let m = &self.modules[j];
            for d in m.min_degree()..=m.max_degree() {
                let dim = m.dim(d);
                if dim == 0 {
                    continue;
                }
                let out_rank = self.maps[j].rank(d);
                let in_rank = if j < s { self.maps[j + 1].rank(d) } else { 0 };
                if j < s {
                    let comp = self.maps[j + 1].matrix(d).map(|a| match self.maps[j].matrix(d) {
                        Some(b) => a.then(b).is_zero(),
                        None => true,
                    });
                    if comp == Some(false) {
                        failures.push(format!("composite through N_{j} is nonzero in degree {d}"));
                        continue;
                    }
                }
                if in_rank + out_rank != dim {
                    failures.push(format!(
                        "not exact at N_{j} in degree {d}: dim {dim}, image rank {in_rank}, kernel dim {}",
                        dim - out_rank
                    ));
                }
            }
        }
        ExactnessReport { failures }
    }

    /// Parses the text format, loading module and extension references
    /// through `load`.
    pub fn parse_with(text: &str, load: &dyn Fn(&str) -> Result<String>) -> Result<Self> {
        let mut name = None;
        let mut presentations: Vec<Presentation> = Vec::new();
        let mut top: Option<(String, i32)> = None;
        let mut maps: Vec<(usize, String, String)> = Vec::new();
        let mut augs: Vec<String> = Vec::new();
        let mut doubled: Option<ExactExtension> = None;
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match kw {
                "extension" => name = Some(rest.to_string()),
                "module" => {
                    let body = load(rest).map_err(|e| Error::parse(line_no, e.to_string()))?;
                    presentations.push(Presentation::parse(&body)?);
                }
                "top" => {
                    let parts: Vec<&str> = rest.split_whitespace().collect();
                    let t = parts
                        .get(1)
                        .and_then(|x| x.parse().ok())
                        .filter(|_| parts.len() == 2)
                        .ok_or_else(|| Error::parse(line_no, "expected 'top <gen> <t>'"))?;
                    top = Some((parts[0].to_string(), t));
                }
                "map" => {
                    let (g, img) = rest
                        .split_once("->")
                        .ok_or_else(|| Error::parse(line_no, "expected 'map <gen> -> <element>'"))?;
                    maps.push((line_no, g.trim().to_string(), img.trim().to_string()));
                }
                "aug" => augs.push(rest.to_string()),
                "double" => {
                    let body = load(rest).map_err(|e| Error::parse(line_no, e.to_string()))?;
                    let dir = Path::new(rest).parent().map(Path::to_path_buf).unwrap_or_default();
                    let inner = ExactExtension::parse_with(&body, &|p: &str| load(&join(&dir, p)))?;
                    doubled = Some(inner.double());
                }
                _ => return Err(Error::parse(line_no, format!("unknown keyword '{kw}'"))),
            }
        }
        let name = name.ok_or_else(|| Error::parse(0, "missing 'extension' line"))?;
        if let Some(mut e) = doubled {
            if !presentations.is_empty() || top.is_some() || !maps.is_empty() {
                return Err(Error::parse(0, "'double' cannot be combined with other lines"));
            }
            e.name = name;
            return Ok(e);
        }
        let (top_gen, t) = top.ok_or_else(|| Error::parse(0, "missing 'top' line"))?;
        let mut modules: Vec<Arc<CompiledModule>> = Vec::new();
        for p in &presentations {
            modules.push(Arc::new(p.compile()?));
        }
        modules.push(Arc::new(CompiledModule::f2_named(t, &top_gen)));
        let unit = Arc::new(CompiledModule::f2_named(0, UNIT_GEN));
        let n0 = &modules[0];
        let aug_gens: Vec<String> = if augs.is_empty() {
            n0.gens().iter().filter(|g| g.degree == 0).map(|g| g.name.clone()).collect()
        } else {
            augs
        };
        let aug_images: Vec<(String, Vec<(AlgebraElement, String)>)> = aug_gens
            .into_iter()
            .map(|g| (g, vec![(AlgebraElement::unit(), UNIT_GEN.to_string())]))
            .collect();
        let mut out_maps = vec![ModuleMap::from_generator_images(Arc::clone(n0), unit, &aug_images)?];
        for j in 1..modules.len() {
            let src = &modules[j];
            let mut images = Vec::new();
            for (line_no, g, img) in &maps {
                if src.gen(g).is_some() {
                    let terms = parse_linear(img).map_err(|m| Error::parse(*line_no, m))?;
                    images.push((g.clone(), terms));
                }
            }
            out_maps.push(ModuleMap::from_generator_images(
                Arc::clone(src),
                Arc::clone(&modules[j - 1]),
                &images,
            )?);
        }
        for (line_no, g, _) in &maps {
            if !modules.iter().skip(1).any(|m| m.gen(g).is_some()) {
                return Err(Error::parse(*line_no, format!("unknown generator {g}")));
            }
        }
        ExactExtension::from_parts(name, t, modules, out_maps)
    }

    pub fn parse(text: &str) -> Result<Self> {
        ExactExtension::parse_with(text, &|p: &str| {
            Err(Error::Unknown(format!("no loader for {p}")))
        })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        ExactExtension::parse_with(&text, &|p: &str| {
            let full = dir.join(p);
            std::fs::read_to_string(&full).map_err(|e| Error::io(&full, e))
        })
    }

    /// Replaces every `Sq(R)` by `Sq(2R)` in all modules and maps.
    pub fn double(&self) -> ExactExtension {
        let modules: Vec<Arc<CompiledModule>> =
            self.modules.iter().map(|m| Arc::new(m.double())).collect();
        let unit = Arc::new(CompiledModule::f2_named(0, UNIT_GEN));
        let mut maps = vec![self.maps[0].double(Arc::clone(&modules[0]), unit)];
        for j in 1..modules.len() {
            maps.push(self.maps[j].double(Arc::clone(&modules[j]), Arc::clone(&modules[j - 1])));
        }
        ExactExtension {
            name: format!("Phi {}", self.name),
            t: 2 * self.t,
            modules,
            maps,
        }
    }

    /// The Yoneda splice: `self` followed by `other` suspended by `self.t`.
    /// Generators are renamed `x0, x1, ...` along the spliced complex, with a
    /// letter suffix when a module has several.
    pub fn splice(&self, other: &ExactExtension) -> ExactExtension {
        let sa = self.length();
        let shift = self.t;
        let mut raw: Vec<CompiledModule> = self.modules[..sa].iter().map(|m| (**m).clone()).collect();
        raw.extend(other.modules.iter().map(|m| m.suspend(shift)));
        for (j, m) in raw.iter_mut().enumerate() {
            let names: Vec<String> = m.gens().iter().map(|g| g.name.clone()).collect();
            let many = names.len() > 1;
            m.rename_gens(|g| {
                let k = names.iter().position(|n| n == g).unwrap();
                if many {
                    format!("x{j}{}", (b'a' + k as u8) as char)
                } else {
                    format!("x{j}")
                }
            });
        }
        let modules: Vec<Arc<CompiledModule>> = raw.into_iter().map(Arc::new).collect();
        let unit = Arc::new(CompiledModule::f2_named(0, UNIT_GEN));
        let mut maps = Vec::new();
        for j in 0..modules.len() {
            let tgt = if j == 0 { Arc::clone(&unit) } else { Arc::clone(&modules[j - 1]) };
            let src = Arc::clone(&modules[j]);
            let map = if j < sa {
                self.maps[j].with_modules(src, tgt)
            } else if j == sa {
                let b_aug = other.maps[0].clone();
                let a_top = self.maps[sa].clone();
                let t2 = Arc::clone(&tgt);
                ModuleMap::from_fn(src, tgt, move |d, i| {
                    let e = F2Vector::unit(b_aug.source.dim(d - shift), i);
                    if b_aug.apply(d - shift, &e).is_zero() {
                        F2Vector::zero(t2.dim(d))
                    } else {
                        a_top.apply(d, &F2Vector::unit(1, 0))
                    }
                })
            } else {
                let k = j - sa;
                let inner = &other.maps[k];
                let tt = Arc::clone(&tgt);
                let inner = inner.clone();
                ModuleMap::from_fn(src, tgt, move |d, i| {
                    let n = inner.source.dim(d - shift);
                    if n == 0 {
                        return F2Vector::zero(tt.dim(d));
                    }
                    inner.apply(d - shift, &F2Vector::unit(n, i))
                })
            };
            maps.push(map);
        }
        ExactExtension {
            name: format!("{} . {}", self.name, other.name),
            t: self.t + other.t,
            modules,
            maps,
        }
    }

    /// The pushout extension of a class `x` in bidegree `(s, t)`: `N_i` is
    /// `C_i` for `i < s - 1` and `N_{s-1}` is the pushout of
    /// `C_s -> C_{s-1}` along `x`. Modules are truncated above `cap`.
    pub fn canonical(res: &Resolution, x: &CochainClass, cap: i32) -> Result<Self> {
        let s = x.s as usize;
        if s == 0 {
            return Err(Error::Unknown("the canonical extension needs s > 0".into()));
        }
        if res.s_max() < x.s || res.t_max() < cap {
            return Err(Error::DegreeCap {
                degree: cap.max(0) as u32,
                cap: res.t_max().max(0) as u32,
            });
        }
        let gen_name = |s: usize, g: usize| format!("{s}_{g}");
        let mut modules = Vec::new();
        for i in 0..s {
            if i == s - 1 {
                let mut p = pushout_presentation(res, x, cap)?;
                p.name = format!("N{i}");
                modules.push(Arc::new(p.compile()?));
                continue;
            }
            let gens: Vec<(String, i32)> = res
                .generators(i as u32)
                .iter()
                .filter(|g| g.degree <= cap)
                .map(|g| (gen_name(i, g.index), g.degree))
                .collect();
            let p = Presentation {
                name: format!("N{i}"),
                gens,
                relations: Vec::new(),
                truncation: (0, cap),
            };
            modules.push(Arc::new(p.compile()?));
        }
        modules.push(Arc::new(CompiledModule::f2_named(x.t, "top")));
        let unit = Arc::new(CompiledModule::f2_named(0, UNIT_GEN));
        let aug = ModuleMap::from_generator_images(
            Arc::clone(&modules[0]),
            unit,
            &[(gen_name(0, 0), vec![(AlgebraElement::unit(), UNIT_GEN.to_string())])],
        )?;
        let mut maps = vec![aug];
        for i in 1..s {
            let images: Vec<(String, Vec<(AlgebraElement, String)>)> = res
                .generators(i as u32)
                .iter()
                .filter(|g| g.degree <= cap)
                .map(|g| {
                    let terms = res
                        .differential_terms(g)
                        .into_iter()
                        .map(|(a, h)| (a, gen_name(i - 1, h)))
                        .collect();
                    (gen_name(i, g.index), terms)
                })
                .collect();
            maps.push(ModuleMap::from_generator_images(
                Arc::clone(&modules[i]),
                Arc::clone(&modules[i - 1]),
                &images,
            )?);
        }
        maps.push(ModuleMap::from_generator_images(
            Arc::clone(&modules[s]),
            Arc::clone(&modules[s - 1]),
            &[("top".into(), vec![(AlgebraElement::unit(), "k".into())])],
        )?);
        ExactExtension::from_parts(format!("canonical {x}"), x.t, modules, maps)
    }
}

/// The pushout of the cocycle `x` along `d: C_s -> C_{s-1}`: generators
/// `{s-1}_{g}` for `C_{s-1}` and `k` in degree `x.t`, relations `d(c)` plus
/// `k` when `c` is in `x`, and `Sq^{2^j} k`; truncated above `cap`.
pub fn pushout_presentation(res: &Resolution, x: &CochainClass, cap: i32) -> Result<Presentation> {
    if x.s == 0 {
        return Err(Error::Unknown("a pushout needs s > 0".into()));
    }
    let i = x.s as usize - 1;
    let mut gens: Vec<(String, i32)> = res
        .generators(x.s - 1)
        .iter()
        .filter(|g| g.degree <= cap)
        .map(|g| (format!("{i}_{}", g.index), g.degree))
        .collect();
    gens.push(("k".to_string(), x.t));
    let mut relations = Vec::new();
    for c in res.generators(x.s) {
        if c.degree > cap {
            continue;
        }
        let mut rel: Vec<(AlgebraElement, String)> = res
            .differential_terms(c)
            .into_iter()
            .map(|(a, h)| (a, format!("{i}_{h}")))
            .collect();
        if c.degree == x.t && x.gens.contains(&c.index) {
            rel.push((AlgebraElement::unit(), "k".into()));
        }
        relations.push(rel);
    }
    let mut j = 0;
    while x.t + (1 << j) <= cap {
        relations.push(vec![(AlgebraElement::from(Monomial::sq(1 << j)), "k".into())]);
        j += 1;
    }
    Ok(Presentation {
        name: format!("pushout {x}"),
        gens,
        relations,
        truncation: (0, cap),
    })
}

fn join(dir: &Path, p: &str) -> String {
    let mut out = PathBuf::from(dir);
    out.push(p);
    normalize(&out)
}

/// Resolves `..` components lexically so embedded paths stay comparable.
fn normalize(p: &Path) -> String {
    let mut parts: Vec<String> = Vec::new();
    for c in p.components() {
        match c {
            std::path::Component::ParentDir if parts.last().is_some_and(|l| l != "..") => {
                parts.pop();
            }
            std::path::Component::CurDir => {}
            other => parts.push(other.as_os_str().to_string_lossy().into_owned()),
        }
    }
    parts.join("/")
}

macro_rules! embedded {
    ($($path:literal),* $(,)?) => {
        &[$(($path, include_str!(concat!("../data/", $path)))),*]
    };
}

/// The shipped data files, keyed by their path under `data/`.
pub const DATA_FILES: &[(&str, &str)] = embedded![
    "extensions/c0.ext",
    "extensions/c1.ext",
    "extensions/f0.ext",
    "extensions/e0.ext",
    "extensions/d0.ext",
    "extensions/h0.ext",
    "extensions/h1.ext",
    "extensions/h2.ext",
    "extensions/h3.ext",
    "extensions/h4.ext",
    "extensions/h5.ext",
    "extensions/h6.ext",
    "modules/c0_m0.mod",
    "modules/c0_m1.mod",
    "modules/c0_m2.mod",
    "modules/f0_n0.mod",
    "modules/f0_n1.mod",
    "modules/f0_n2.mod",
    "modules/f0_n3.mod",
    "modules/e0_m0.mod",
    "modules/e0_m1.mod",
    "modules/e0_m2.mod",
    "modules/e0_m2p.mod",
    "modules/e0_m3.mod",
    "modules/d0_m2.mod",
    "modules/d0_m3.mod",
    "modules/phi_a1.mod",
    "modules/h0_m0.mod",
    "modules/h1_m0.mod",
    "modules/h2_m0.mod",
    "modules/h3_m0.mod",
    "modules/h4_m0.mod",
    "modules/h5_m0.mod",
    "modules/h6_m0.mod",
    "tables/c0_delta.tsv",
    "tables/c0_higher.tsv",
    "tables/c1_delta.tsv",
    "tables/c1_higher.tsv",
    "tables/f0_delta.tsv",
    "tables/f0_higher.tsv",
    "reference/f2_s8_t44.txt",
];

/// Contents of a shipped data file.
pub fn data_file(path: &str) -> Result<&'static str> {
    DATA_FILES
        .iter()
        .find(|(p, _)| *p == path)
        .map(|(_, text)| *text)
        .ok_or_else(|| Error::Unknown(format!("data file {path}")))
}

/// A shipped module presentation by file stem, e.g. `e0_m2`.
pub fn library_module(stem: &str) -> Result<Presentation> {
    Presentation::parse(data_file(&format!("modules/{stem}.mod"))?)
}

/// Names accepted by [`library`].
pub const LIBRARY_NAMES: &[&str] = &[
    "h0", "h1", "h2", "h3", "h4", "h5", "h6", "c0", "c1", "f0", "e0", "d0",
];

fn load_embedded(dir: &str, p: &str) -> Result<String> {
    let path = normalize(&Path::new(dir).join(p));
    data_file(&path).map(str::to_string)
}

/// A shipped extension, compiled and checked for exactness.
pub fn library(name: &str) -> Result<ExactExtension> {
    if !LIBRARY_NAMES.contains(&name) {
        return Err(Error::Unknown(format!("extension {name}")));
    }
    let text = data_file(&format!("extensions/{name}.ext"))?;
    let e = ExactExtension::parse_with(text, &|p: &str| load_embedded("extensions", p))?;
    let report = e.verify_exact();
    if !report.is_exact() {
        return Err(Error::NotExact(report.failures.join("; ")));
    }
    Ok(e)
}
