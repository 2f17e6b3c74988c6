//! Finite modules: compiled dimensions against a span oracle, module
//! axioms, tensor products, kernels, truncation and doubling.

use std::collections::HashMap;
use std::sync::Arc;

use extsq::extension::{library_module, DATA_FILES};
use extsq::linalg::{F2Matrix, F2Vector};
use extsq::module::{cokernel, kernel, CompiledModule, ModuleMap};
use extsq::presentation::Presentation;
use extsq::steenrod::{milnor_basis, AlgebraElement, Monomial};

fn compile(stem: &str) -> Arc<CompiledModule> {
    Arc::new(library_module(stem).unwrap().compile().unwrap())
}

fn module_stems() -> Vec<String> {
    DATA_FILES
        .iter()
        .filter_map(|(p, _)| p.strip_prefix("modules/")?.strip_suffix(".mod").map(str::to_string))
        .collect()
}

/// Dimension of a presented module in degree `d`: the free module on the
/// generators modulo every multiple `m r` of every relation.
fn span_oracle(p: &Presentation, d: i32) -> usize {
    if d < p.truncation.0 || d > p.truncation.1 {
        return 0;
    }
    let mut index: HashMap<(Monomial, usize), usize> = HashMap::new();
    for (g, (_, gd)) in p.gens.iter().enumerate() {
        if d >= *gd {
            for m in &milnor_basis((d - gd) as u32).monomials {
                let n = index.len();
                index.insert((m.clone(), g), n);
            }
        }
    }
    let free = index.len();
    let gen_of = |name: &str| p.gens.iter().position(|(n, _)| n == name).unwrap();
    let mut rows = Vec::new();
    for rel in &p.relations {
        let Some((a, g)) = rel.iter().find(|(a, _)| !a.is_zero()) else {
            continue;
        };
        let e = p.gens[gen_of(g)].1 + a.degree().unwrap() as i32;
        if e > d {
            continue;
        }
        for m in &milnor_basis((d - e) as u32).monomials {
            let mut v = F2Vector::zero(free);
            for (a, g) in rel {
                let prod = AlgebraElement::from(m.clone()).multiply(a);
                for t in prod.terms() {
                    v.flip(index[&(t.clone(), gen_of(g))]);
                }
            }
            rows.push(v);
        }
    }
    free - F2Matrix::from_rows(rows, free).rank()
}

#[test]
fn compiled_dimensions_match_span_oracle() {
    for stem in module_stems() {
        let p = library_module(&stem).unwrap();
        let m = p.compile().unwrap();
        for d in p.truncation.0..=p.truncation.1 {
            assert_eq!(m.dim(d), span_oracle(&p, d), "{stem} in degree {d}");
        }
    }
}

#[test]
fn every_library_module_is_a_module() {
    for stem in module_stems() {
        compile(&stem).verify_associative().unwrap();
    }
}

#[test]
fn published_module_sizes() {
    let m0 = compile("e0_m0");
    assert_eq!(m0.degree_list(), vec![0, 1, 3, 7, 15]);
    assert_eq!(compile("e0_m1").total_dim(), 10);
    assert_eq!(compile("e0_m2").total_dim(), 10);
    assert_eq!(compile("e0_m2p").total_dim(), 6);
    let top = CompiledModule::f2(21);
    assert_eq!(top.degree_list(), vec![21]);
}

#[test]
fn m0_is_the_subquotient_of_rp_infinity() {
    // x^{2^k} in H^*(RP^oo) with Sq^{2^k} x^{2^k} = x^{2^{k+1}}; desuspended.
    let m0 = compile("e0_m0");
    let degrees = [0, 1, 3, 7, 15];
    for w in degrees.windows(2) {
        let v = m0.act(&Monomial::sq((w[1] - w[0]) as u32), w[0], &F2Vector::unit(1, 0));
        assert_eq!(v, F2Vector::unit(1, 0));
    }
    // Sq^j x^i = binom(i, j) x^{i+j}, and for i a power of two only j = i survives.
    for (k, &d) in degrees.iter().enumerate() {
        for &e in &degrees[k + 1..] {
            let j = (e - d) as u32;
            let i = (d + 1) as u32;
            let expected = j == i;
            let v = m0.act(&Monomial::sq(j), d, &F2Vector::unit(1, 0));
            assert_eq!(!v.is_zero(), expected, "Sq{j} on degree {d}");
        }
    }
}

#[test]
fn tensor_dimensions_and_symmetry() {
    let a = compile("e0_m0");
    let b = compile("c0_m2");
    let ab = a.tensor(&b);
    let ba = b.tensor(&a);
    for d in 0..40 {
        let expected: usize = (0..=d).map(|i| a.dim(i) * b.dim(d - i)).sum();
        assert_eq!(ab.dim(d), expected);
        assert_eq!(ba.dim(d), expected);
    }
    ab.verify_associative().unwrap();
    // The swap, matched through basis names, commutes with the action.
    let swap_index = |d: i32, k: usize| -> usize {
        let name = ab.basis_name(d, k);
        let (l, r) = name.split_once(" (x) ").unwrap();
        let target = format!("{r} (x) {l}");
        (0..ba.dim(d)).find(|&j| ba.basis_name(d, j) == target).unwrap()
    };
    let a2 = Arc::new(ab.clone());
    let b2 = Arc::new(ba.clone());
    let tau = ModuleMap::from_fn(Arc::clone(&a2), Arc::clone(&b2), |d, k| {
        F2Vector::unit(b2.dim(d), swap_index(d, k))
    });
    tau.verify_linear().unwrap();
    for d in a2.min_degree()..=a2.max_degree() {
        assert_eq!(tau.rank(d), a2.dim(d));
    }
}

#[test]
fn suspension_of_f2_squares_to_double_suspension() {
    let s = CompiledModule::f2(7);
    let ss = s.tensor(&s);
    assert_eq!(ss.degree_list(), vec![14]);
}

#[test]
fn sq1_on_m0_tensor_m0_by_cartan() {
    let m0 = compile("e0_m0");
    let t = m0.tensor(&m0);
    // Degree 1 has k0 (x) Sq1 k0 and Sq1 k0 (x) k0; Sq1 of each is Sq1 k0 (x) Sq1 k0.
    assert_eq!(t.dim(1), 2);
    assert_eq!(t.dim(2), 1);
    for i in 0..2 {
        let v = t.act(&Monomial::sq(1), 1, &F2Vector::unit(2, i));
        assert_eq!(v, F2Vector::unit(1, 0));
    }
    // Sq1 (k0 (x) k0) = Sq1 k0 (x) k0 + k0 (x) Sq1 k0.
    let v = t.act(&Monomial::sq(1), 0, &F2Vector::unit(1, 0));
    assert_eq!(v.count_ones(), 2);
}

#[test]
fn kernel_of_identity_is_zero() {
    let m = compile("e0_m1");
    let id = ModuleMap::from_fn(Arc::clone(&m), Arc::clone(&m), |d, i| F2Vector::unit(m.dim(d), i));
    let (k, _) = kernel(&id);
    assert_eq!(k.total_dim(), 0);
    let (c, _) = cokernel(&id);
    assert_eq!(c.total_dim(), 0);
}

#[test]
fn kernels_of_the_e0_projections() {
    let m0 = compile("e0_m0");
    let unit = Arc::new(CompiledModule::f2(0));
    let p0 = ModuleMap::from_generator_vectors(Arc::clone(&m0), Arc::clone(&unit), vec![F2Vector::unit(1, 0)]).unwrap();
    let (m1p, i0) = kernel(&p0);
    assert_eq!(m1p.degree_list(), vec![1, 3, 7, 15]);
    m1p.verify_associative().unwrap();
    i0.verify_linear().unwrap();
    let m1 = compile("e0_m1");
    let p1 = ModuleMap::from_generator_vectors(Arc::clone(&m1), Arc::clone(&m1p), vec![F2Vector::unit(1, 0)]).unwrap();
    let (m2p, i1) = kernel(&p1);
    assert_eq!(m2p.total_dim(), 6);
    assert_eq!(m2p.degree_list(), compile("e0_m2p").degree_list());
    i1.verify_linear().unwrap();
    assert!(i1.compose(&p1).is_zero());
}

#[test]
fn truncations() {
    let m2 = compile("e0_m2");
    let t = m2.truncate(5, 18);
    assert_eq!(m2.total_dim() - t.total_dim(), 1);
    assert_eq!(m2.dim(19), 1);
    assert_eq!(t.dim(19), 0);
    let full = m2.truncate(m2.min_degree(), m2.max_degree());
    assert_eq!(full.degree_list(), m2.degree_list());
    let m3 = compile("d0_m3");
    assert_eq!(m3.max_degree(), 18);
    assert_eq!(m3.min_degree(), 11);
    // Sq7 is nonzero on the bottom class.
    let v = m3.act(&Monomial::sq(7), 11, &F2Vector::unit(1, 0));
    assert!(!v.is_zero());
}

#[test]
fn suspensions_compose() {
    let m = compile("c0_m1");
    assert_eq!(m.suspend(0).degree_list(), m.degree_list());
    let a = m.suspend(3).suspend(4);
    let b = m.suspend(7);
    assert_eq!(a.degree_list(), b.degree_list());
    assert_eq!(b.degree_list(), m.degree_list().iter().map(|d| d + 7).collect::<Vec<_>>());
}

#[test]
fn phi_a1_is_the_double_of_a1() {
    let phi = compile("phi_a1");
    assert_eq!(phi.degree_list(), vec![0, 2, 4, 6, 6, 8, 10, 12]);
    // The doubled Milnor basis of A(1) spans; Sq(2R) acts by doubled products.
    let a1: Vec<Monomial> = (0..4u32)
        .flat_map(|r1| (0..2u32).map(move |r2| Monomial::new(vec![r1, r2])))
        .collect();
    let class = |m: &Monomial| {
        phi.evaluate(&[(AlgebraElement::from(m.double()), "k".to_string())])
            .unwrap()
    };
    for a in &a1 {
        assert!(!class(a).vector.is_zero(), "Sq(2R) k for R = {a}");
        for r in &a1 {
            if r.is_unit() {
                continue;
            }
            let x = class(a);
            let lhs = phi.act(&r.double(), x.degree, &x.vector);
            let prod: AlgebraElement = extsq::steenrod::multiply_monomials(r, a).into_iter().collect();
            let mut rhs = F2Vector::zero(phi.dim(x.degree + 2 * r.degree() as i32));
            for c in prod.terms() {
                rhs.add_assign(&class(c).vector);
            }
            assert_eq!(lhs, rhs, "Sq(2R) for R = {r} on {a}");
        }
    }
    // Sq8 is nonzero only on the class in degree 2.
    for d in phi.min_degree()..=phi.max_degree() {
        for i in 0..phi.dim(d) {
            let v = phi.act(&Monomial::sq(8), d, &F2Vector::unit(phi.dim(d), i));
            assert_eq!(!v.is_zero(), d == 2, "Sq8 from degree {d}");
        }
    }
    // Operations that are not doubles act as zero except through Sq8.
    for e in 1..=12u32 {
        for m in &milnor_basis(e).monomials {
            if m.halve().is_some() {
                continue;
            }
            for d in phi.min_degree()..=phi.max_degree() {
                for i in 0..phi.dim(d) {
                    let v = phi.act(m, d, &F2Vector::unit(phi.dim(d), i));
                    assert!(v.is_zero(), "{m} from degree {d}");
                }
            }
        }
    }
}

#[test]
fn doubling_compiled_modules() {
    let m = compile("c0_m1");
    let d = m.double();
    d.verify_associative().unwrap();
    assert_eq!(d.degree_list(), m.degree_list().iter().map(|x| 2 * x).collect::<Vec<_>>());
}

#[test]
fn presentation_round_trip() {
    for stem in module_stems() {
        let p = library_module(&stem).unwrap();
        let q = Presentation::parse(&p.to_text()).unwrap();
        assert_eq!(p.compile().unwrap().degree_list(), q.compile().unwrap().degree_list(), "{stem}");
    }
}

#[test]
fn parse_errors_carry_line_numbers() {
    let err = Presentation::parse("module X\ngen k 0\nrel Sq(1,x) k\n").unwrap_err();
    assert!(err.to_string().contains("line 3"), "{err}");
    let err = Presentation::parse("module X\ngen k 0\nrel Sq1 j\n").unwrap_err();
    assert!(err.to_string().contains("line 3"), "{err}");
}

#[test]
fn maps_must_commute_with_the_action() {
    let m = compile("e0_m0");
    // Zero on k0 but the identity on Sq1 k0 breaks Sq1-linearity.
    let f = ModuleMap::from_fn(Arc::clone(&m), Arc::clone(&m), |d, i| {
        if d == 1 {
            F2Vector::unit(1, i)
        } else {
            F2Vector::zero(m.dim(d))
        }
    });
    assert!(f.verify_linear().is_err());
}
