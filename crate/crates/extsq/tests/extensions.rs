//! Exact extensions: the shipped library, splicing, doubling and the
//! canonical pushout extension.

use std::sync::Arc;

use extsq::chainmap::{lift_to_extension, TieBreak};
use extsq::extension::{data_file, library, ExactExtension, LIBRARY_NAMES};
use extsq::module::ModuleMap;
use extsq::parse::parse_linear;
use extsq::resolution::{resolve_f2, CochainClass};

fn embedded(p: &str) -> extsq::Result<String> {
    data_file(p.trim_start_matches("../")).map(str::to_string)
}

#[test]
fn every_library_extension_is_exact() {
    for name in LIBRARY_NAMES {
        let e = library(name).unwrap();
        let report = e.verify_exact();
        assert!(report.is_exact(), "{name}: {:?}", report.failures);
        for m in e.modules() {
            assert!(m.max_degree() <= 2 * e.t(), "{name} exceeds 2t");
        }
    }
}

#[test]
fn published_boundaries() {
    // Compared as vectors: the module basis may name the image differently.
    let has = |name: &str, gen: &str, image: &str| {
        let e = library(name).unwrap();
        let (j, _) = e.find_gen(gen).unwrap();
        let g = e.module(j).gen(gen).unwrap();
        let actual = e.boundary(j).apply(g.degree, &g.vector);
        let terms = parse_linear(image).unwrap();
        let expected = e.module(j - 1).evaluate(&terms).unwrap();
        assert_eq!(expected.degree, g.degree);
        assert_eq!(actual, expected.vector, "{name}: {gen} -> {image}");
    };
    has("f0", "k3", "Sq5 k2");
    has("f0", "k4", "Sq12 k3");
    has("d0", "k4", "Sq7 k3");
    has("e0", "k4", "Sq2 Sq8 k3");
    has("h2", "k1", "Sq4 k0");
    has("c0", "k2", "Sq4 k1");
}

#[test]
fn hopf_extensions_have_length_one() {
    for (i, name) in ["h0", "h1", "h2", "h3", "h4", "h5", "h6"].iter().enumerate() {
        let e = library(name).unwrap();
        assert_eq!(e.length(), 1);
        assert_eq!(e.t(), 1 << i);
    }
}

#[test]
fn c1_is_the_double_of_c0() {
    let c0 = library("c0").unwrap();
    let c1 = library("c1").unwrap();
    assert_eq!(c1.t(), 2 * c0.t());
    for (a, b) in c0.modules().iter().zip(c1.modules()) {
        assert_eq!(b.degree_list(), a.degree_list().iter().map(|d| 2 * d).collect::<Vec<_>>());
    }
    assert!(c0.double().verify_exact().is_exact());
}

#[test]
fn breaking_a_map_breaks_exactness() {
    let c0 = library("c0").unwrap();
    let s = c0.length();
    let mut maps: Vec<ModuleMap> = (0..=s).map(|j| c0.boundary(j).clone()).collect();
    maps[s] = ModuleMap::zero(Arc::clone(c0.top()), Arc::clone(c0.module(s - 1)));
    let broken = ExactExtension::from_parts("broken", c0.t(), c0.modules().to_vec(), maps).unwrap();
    let report = broken.verify_exact();
    assert!(!report.is_exact());
    assert!(report.failures.iter().any(|f| f.contains(&format!("N_{}", s - 1))), "{:?}", report.failures);
}

#[test]
fn extension_files_parse_with_errors_located() {
    let text = data_file("extensions/c0.ext").unwrap().replace("map k2 -> Sq4 k1", "map k2 -> Sq4 kx");
    assert!(ExactExtension::parse_with(&text, &embedded).is_err());
    let e = ExactExtension::parse_with(data_file("extensions/e0.ext").unwrap(), &embedded).unwrap();
    assert!(e.verify_exact().is_exact());
    assert!(library("nope").is_err());
}

#[test]
fn splices_are_exact() {
    let h0 = library("h0").unwrap();
    let h1 = library("h1").unwrap();
    let hh = h0.splice(&h0);
    assert_eq!((hh.length(), hh.t()), (2, 2));
    assert!(hh.verify_exact().is_exact());
    let h0h1 = h0.splice(&h1);
    assert_eq!((h0h1.length(), h0h1.t()), (2, 3));
    assert!(h0h1.verify_exact().is_exact());
    for a in ["h0", "h1", "h2", "c0"] {
        for b in ["h0", "h1", "h2"] {
            let e = library(a).unwrap().splice(&library(b).unwrap());
            assert!(e.verify_exact().is_exact(), "{a} . {b}");
        }
    }
}

#[test]
fn splicing_with_the_identity_changes_nothing() {
    let res = resolve_f2(4, 16);
    let c0 = library("c0").unwrap();
    let id = ExactExtension::identity();
    for e in [c0.splice(&id), id.splice(&c0)] {
        assert!(e.verify_exact().is_exact());
        assert_eq!((e.length(), e.t()), (c0.length(), c0.t()));
        let top = lift_to_extension(&res, &e, TieBreak::Natural).unwrap().top_cocycle();
        assert_eq!(top.to_string(), "3_3");
    }
}

#[test]
fn canonical_extensions_are_exact_and_represent_their_class() {
    let res = resolve_f2(4, 22);
    for s in 1..=4u32 {
        for g in res.generators(s) {
            let x = CochainClass::new(s, g.degree, [g.index]);
            let e = ExactExtension::canonical(&res, &x, g.degree).unwrap();
            let report = e.verify_exact();
            assert!(report.is_exact(), "{}: {:?}", g.name(), report.failures);
            let top = lift_to_extension(&res, &e, TieBreak::Natural).unwrap().top_cocycle();
            assert_eq!(top, x, "{}", g.name());
        }
    }
}

#[test]
fn canonical_h0_agrees_with_the_library() {
    let res = resolve_f2(2, 8);
    let x = res.class("1_0").unwrap();
    let canon = ExactExtension::canonical(&res, &x, 2).unwrap();
    let lib = library("h0").unwrap();
    let a = lift_to_extension(&res, &canon, TieBreak::Natural).unwrap().top_cocycle();
    let b = lift_to_extension(&res, &lib, TieBreak::Natural).unwrap().top_cocycle();
    assert_eq!(a, b);
}

#[test]
fn canonical_of_zero_is_split() {
    let res = resolve_f2(3, 12);
    let zero = CochainClass::zero(3, 11);
    let e = ExactExtension::canonical(&res, &zero, 11).unwrap();
    assert!(e.verify_exact().is_exact());
    let top = lift_to_extension(&res, &e, TieBreak::Natural).unwrap().top_cocycle();
    assert!(top.is_zero());
}
