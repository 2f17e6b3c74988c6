//! Scripted construction of small extensions for `e_0 = 4_5` and
//! `d_0 = 4_3`: factor the extension into short exact sequences, resolve
//! each kernel and follow the class through the connecting homomorphisms.

use std::fmt;
use std::sync::Arc;

use crate::chainmap::{les_boundary, lift_to_extension, pullback_on_ext, TieBreak};
use crate::error::{Error, Result};
use crate::extension::{library_module, pushout_presentation, ExactExtension, UNIT_GEN};
use crate::linalg::F2Vector;
use crate::module::{kernel, CompiledModule, ModuleMap};
use crate::resolution::{resolve, CochainClass, Resolution};
use crate::sq::{steenrod_squares, SqResult};
use crate::steenrod::AlgebraElement;

/// One checked intermediate: what the construction should produce and what
/// it did produce.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub label: String,
    pub expected: String,
    pub actual: String,
}

impl Step {
    pub fn passed(&self) -> bool {
        self.expected == self.actual
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "ok" } else { "FAIL" };
        write!(f, "{status:4} {}: {}", self.label, self.actual)?;
        if !self.passed() {
            write!(f, " (expected {})", self.expected)?;
        }
        Ok(())
    }
}

#[derive(Debug)]
pub struct WalkthroughReport {
    pub name: String,
    pub steps: Vec<Step>,
    /// The assembled extension, when every module could be built.
    pub extension: Option<ExactExtension>,
}

impl WalkthroughReport {
    pub fn passed(&self) -> bool {
        self.extension.is_some() && self.steps.iter().all(Step::passed)
    }

    pub fn first_divergence(&self) -> Option<&Step> {
        self.steps.iter().find(|s| !s.passed())
    }
}

impl fmt::Display for WalkthroughReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "walkthrough {}", self.name)?;
        for s in &self.steps {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

struct Script {
    steps: Vec<Step>,
}

impl Script {
    fn check(&mut self, label: impl Into<String>, expected: impl Into<String>, actual: impl Into<String>) {
        self.steps.push(Step {
            label: label.into(),
            expected: expected.into(),
            actual: actual.into(),
        });
    }
}

fn dims(m: &CompiledModule) -> String {
    format!("dim {} in degrees {:?}", m.total_dim(), m.degree_list())
}

fn ext_basis(res: &Resolution, s: u32, t: i32) -> String {
    let gens: Vec<String> = res.generators_in(s, t).iter().map(|g| g.name()).collect();
    if gens.is_empty() {
        "0".into()
    } else {
        gens.join(", ")
    }
}

fn compiled(stem: &str) -> Result<Arc<CompiledModule>> {
    Ok(Arc::new(library_module(stem)?.compile()?))
}

/// The map sending the single generator of `source` to the bottom class of
/// `target`, which must be one-dimensional in that degree.
fn onto_bottom(source: &Arc<CompiledModule>, target: &Arc<CompiledModule>) -> Result<ModuleMap> {
    let d = target.min_degree();
    if target.dim(d) != 1 || source.gens().len() != 1 || source.gens()[0].degree != d {
        return Err(Error::Map(format!(
            "{} is not cyclic on the bottom class of {}",
            source.name(),
            target.name()
        )));
    }
    ModuleMap::from_generator_vectors(Arc::clone(source), Arc::clone(target), vec![F2Vector::unit(1, 0)])
}

fn is_onto(p: &ModuleMap) -> bool {
    (p.target.min_degree()..=p.target.max_degree()).all(|d| p.rank(d) == p.target.dim(d))
}

/// The pushout of `y` along `d: D_1 -> D_0` in the resolution of `m`, with
/// its projection back onto `m` and the inclusion of the top class.
fn pushout(
    res: &Resolution,
    y: &CochainClass,
    cap: i32,
    name: &str,
) -> Result<(Arc<CompiledModule>, ModuleMap, ModuleMap)> {
    let mut p = pushout_presentation(res, y, cap)?;
    p.name = name.into();
    let module = Arc::new(p.compile()?);
    let m = res.module();
    let images = module
        .gens()
        .iter()
        .map(|g| {
            if g.name == "k" {
                return F2Vector::zero(m.dim(g.degree));
            }
            let index: usize = g.name.split_once('_').and_then(|(_, i)| i.parse().ok()).unwrap();
            res.generators(0)[index].augmentation.clone().unwrap()
        })
        .collect();
    let q = ModuleMap::from_generator_vectors(Arc::clone(&module), Arc::clone(m), images)?;
    let top = Arc::new(CompiledModule::f2_named(y.t, "top"));
    let incl = ModuleMap::from_generator_images(
        top,
        Arc::clone(&module),
        &[("top".into(), vec![(AlgebraElement::unit(), "k".into())])],
    )?;
    Ok((module, q, incl))
}

struct Targets {
    name: &'static str,
    t: i32,
    /// Classes `x, y_1, y_2, y_3` followed down the long exact sequences.
    classes: [&'static str; 4],
    /// `Ext^{3,t}(M_1')` and `Ext^{1,t}(M_3')` in full, where known.
    ext_m1p: Option<&'static str>,
    ext_m3p: Option<&'static str>,
    /// Library module the truncated `M_2` should match, if any.
    m2_reference: &'static str,
    m3_reference: &'static str,
    sq: &'static str,
}

const E0: Targets = Targets {
    name: "e0",
    t: 21,
    classes: ["4_5", "3_9", "2_8", "1_3"],
    ext_m1p: Some("3_9, 3_10"),
    ext_m3p: Some("1_3"),
    m2_reference: "e0_m2",
    m3_reference: "e0_m3",
    sq: "(8_13, 7_12, 6_14, 5_17, 4_16)",
};

const D0: Targets = Targets {
    name: "d0",
    t: 18,
    classes: ["4_3", "3_6", "2_6", "1_2"],
    ext_m1p: None,
    ext_m3p: None,
    m2_reference: "d0_m2",
    m3_reference: "d0_m3",
    sq: "(8_7, 0, 6_10, 0, 4_13)",
};

/// Runs the `e_0` construction. `res_f2` must reach `(8, 42)` for the final
/// squaring operations.
pub fn walkthrough_e0(res_f2: &Resolution) -> Result<WalkthroughReport> {
    run(res_f2, &E0)
}

/// Runs the `d_0` variant, in which every module is truncated above 18.
/// `res_f2` must reach `(8, 36)`.
pub fn walkthrough_d0(res_f2: &Resolution) -> Result<WalkthroughReport> {
    run(res_f2, &D0)
}

fn run(res_f2: &Resolution, tg: &Targets) -> Result<WalkthroughReport> {
    let t = tg.t;
    if res_f2.s_max() < 8 || res_f2.t_max() < 2 * t {
        return Err(Error::DegreeCap {
            degree: (2 * t) as u32,
            cap: res_f2.t_max().max(0) as u32,
        });
    }
    let mut sc = Script { steps: Vec::new() };
    let x = res_f2.class(tg.classes[0])?;
    let unit = Arc::new(CompiledModule::f2_named(0, UNIT_GEN));

    // F2 <- M_0 <- M_1'
    let m0 = compiled("e0_m0")?;
    sc.check("M0", "dim 5 in degrees [0, 1, 3, 7, 15]", dims(&m0));
    let p0 = onto_bottom(&m0, &unit)?;
    let res_m0 = resolve(Arc::clone(&m0), 4, t);
    sc.check(format!("Ext^{{4,{t}}}(M0)"), "0", ext_basis(&res_m0, 4, t));
    sc.check(format!("p0^*({})", tg.classes[0]), "0", pullback_on_ext(&p0, &res_m0, res_f2, &x)?.to_string());
    let (m1p, i0) = kernel(&p0);
    sc.check("M1' = ker p0", "dim 4 in degrees [1, 3, 7, 15]", dims(&m1p));
    let res_m1p = resolve(Arc::clone(&m1p), 3, t);
    if let Some(basis) = tg.ext_m1p {
        sc.check(format!("Ext^{{3,{t}}}(M1')"), basis, ext_basis(&res_m1p, 3, t));
    }
    for g in res_m1p.generators_in(3, t) {
        let y = CochainClass::new(3, t, [g.index]);
        let expected = if g.name() == tg.classes[1] { tg.classes[0] } else { "0" };
        let b = les_boundary(&i0, &p0, &res_m1p, res_f2, &y)?;
        sc.check(format!("boundary({})", g.name()), expected, b.to_string());
    }
    let y1 = res_m1p.class(tg.classes[1])?;

    // M_1' <- M_1 <- M_2'
    let m1 = compiled("e0_m1")?;
    sc.check("M1", "dim 10", format!("dim {}", m1.total_dim()));
    let p1 = onto_bottom(&m1, &m1p)?;
    sc.check("M1 -> M1' onto", "true", is_onto(&p1).to_string());
    let res_m1 = resolve(Arc::clone(&m1), 3, t);
    sc.check(
        format!("p1^*({})", tg.classes[1]),
        "0",
        pullback_on_ext(&p1, &res_m1, &res_m1p, &y1)?.to_string(),
    );
    let (m2p, i1) = kernel(&p1);
    let m2p_ref = compiled("e0_m2p")?;
    sc.check("M2' = ker p1", dims(&m2p_ref), dims(&m2p));
    sc.check("dim M2'", "6", m2p.total_dim().to_string());
    let res_m2p = resolve(Arc::clone(&m2p), 2, t);
    let y2 = res_m2p.class(tg.classes[2])?;
    sc.check(
        format!("boundary({})", tg.classes[2]),
        tg.classes[1],
        les_boundary(&i1, &p1, &res_m2p, &res_m1p, &y2)?.to_string(),
    );

    // M_2' <- M_2 <- M_3'
    let full_m2 = compiled("e0_m2")?;
    sc.check("M2", "dim 10", format!("dim {}", full_m2.total_dim()));
    let m2 = if full_m2.max_degree() > t {
        let mut m = full_m2.truncate(full_m2.min_degree(), t);
        m.set_name(format!("M2[{},{t}]", full_m2.min_degree()));
        Arc::new(m)
    } else {
        Arc::clone(&full_m2)
    };
    let m2_ref = compiled(tg.m2_reference)?;
    sc.check(format!("M2 through degree {t}"), dims(&m2_ref), dims(&m2));
    let p2 = onto_bottom(&m2, &m2p)?;
    sc.check("M2 -> M2' onto", "true", is_onto(&p2).to_string());
    let res_m2 = resolve(Arc::clone(&m2), 2, t);
    sc.check(format!("Ext^{{2,{t}}}(M2)"), "0", ext_basis(&res_m2, 2, t));
    let (m3p, i2) = kernel(&p2);
    let m3p_dims = if t == E0.t { "dim 4".to_string() } else { "dim 3".to_string() };
    sc.check("M3' = ker p2", m3p_dims, format!("dim {}", m3p.total_dim()));
    let res_m3p = resolve(Arc::clone(&m3p), 1, t);
    if let Some(basis) = tg.ext_m3p {
        sc.check(format!("Ext^{{1,{t}}}(M3')"), basis, ext_basis(&res_m3p, 1, t));
    }
    let y3 = res_m3p.class(tg.classes[3])?;
    sc.check(
        format!("boundary({})", tg.classes[3]),
        tg.classes[2],
        les_boundary(&i2, &p2, &res_m3p, &res_m2p, &y3)?.to_string(),
    );

    // M_3' <- M_3 <- Sigma^t F2
    let (m3, q, top_incl) = pushout(&res_m3p, &y3, t, "M3")?;
    let m3_ref = compiled(tg.m3_reference)?;
    sc.check("M3 pushout", dims(&m3_ref), dims(&m3));
    let res_m3 = resolve(Arc::clone(&m3), 1, t);
    sc.check(format!("Ext^{{1,{t}}}(M3)"), "0", ext_basis(&res_m3, 1, t));

    let top = Arc::clone(&top_incl.source);
    let maps = vec![p0, p1.compose(&i0), p2.compose(&i1), q.compose(&i2), top_incl];
    let ext = ExactExtension::from_parts(tg.name, t, vec![m0, m1, m2, m3, top], maps)?;
    let report = ext.verify_exact();
    sc.check("exact", "exact", if report.is_exact() { "exact".to_string() } else { report.failures.join("; ") });
    let chain = lift_to_extension(res_f2, &ext, TieBreak::Natural)?;
    sc.check("top cocycle", tg.classes[0], chain.top_cocycle().to_string());
    let sq: SqResult = steenrod_squares(res_f2, &ext, TieBreak::Natural)?;
    sc.check("Sq", tg.sq, sq.to_string());

    Ok(WalkthroughReport {
        name: tg.name.into(),
        steps: sc.steps,
        extension: Some(ext),
    })
}
