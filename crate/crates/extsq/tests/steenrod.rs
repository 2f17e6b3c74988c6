//! The Milnor product and coproduct against independent oracles: the Adem
//! relations and the action on polynomial rings through the Cartan formula.

use std::collections::{BTreeMap, HashSet};

use extsq::steenrod::{milnor_basis, multiply_monomials, AlgebraElement, Monomial};
use proptest::prelude::*;

fn product(a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
    a.multiply(b)
}

fn binom_odd(n: i64, k: i64) -> bool {
    k >= 0 && n >= k && (k & (n - k)) == 0
}

fn sq(n: u32) -> AlgebraElement {
    AlgebraElement::sq(n)
}

#[test]
fn adem_relations_hold_up_to_sixteen() {
    for i in 1..=16u32 {
        for j in 1..=16u32 {
            if i >= 2 * j {
                continue;
            }
            let lhs = product(&sq(i), &sq(j));
            let mut rhs = AlgebraElement::zero();
            for k in 0..=i / 2 {
                if binom_odd(j as i64 - k as i64 - 1, i as i64 - 2 * k as i64) {
                    rhs.add_assign(&product(&sq(i + j - k), &sq(k)));
                }
            }
            assert_eq!(lhs, rhs, "Sq{i} Sq{j}");
        }
    }
}

/// A polynomial in `F2[x_1, ..., x_n]` as a set of exponent vectors.
type Poly = HashSet<Vec<u32>>;

fn toggle(p: &mut Poly, m: Vec<u32>) {
    if !p.remove(&m) {
        p.insert(m);
    }
}

/// `Sq^k` by the Cartan formula and `Sq^k x^a = binom(a, k) x^{a+k}`.
fn cartan_sq(k: u32, p: &Poly) -> Poly {
    let mut out = Poly::new();
    for m in p {
        let mut partial: Vec<(u32, Vec<u32>)> = vec![(0, Vec::new())];
        for &a in m {
            let mut next = Vec::new();
            for (used, e) in &partial {
                for ki in 0..=(k - used).min(a) {
                    if binom_odd(a as i64, ki as i64) {
                        let mut e2 = e.clone();
                        e2.push(a + ki);
                        next.push((used + ki, e2));
                    }
                }
            }
            partial = next;
        }
        for (used, e) in partial {
            if used == k {
                toggle(&mut out, e);
            }
        }
    }
    out
}

/// `Sq(R)` on a product of degree-one classes: distribute `R` over the
/// factors, each taking nothing or one `xi_k`, which raises it to `2^k`.
fn milnor_on_squarefree(r: &[u32], n: usize) -> Poly {
    fn go(r: &mut Vec<u32>, i: usize, e: &mut Vec<u32>, n: usize, out: &mut Poly) {
        let remaining: u32 = r.iter().sum();
        if remaining as usize > n - i {
            return;
        }
        if i == n {
            toggle(out, e.clone());
            return;
        }
        e.push(1);
        go(r, i + 1, e, n, out);
        e.pop();
        for k in 0..r.len() {
            if r[k] > 0 {
                r[k] -= 1;
                e.push(1 << (k + 1));
                go(r, i + 1, e, n, out);
                e.pop();
                r[k] += 1;
            }
        }
    }
    let mut out = Poly::new();
    go(&mut r.to_vec(), 0, &mut Vec::new(), n, &mut out);
    out
}

fn milnor_action(a: &AlgebraElement, n: usize) -> Poly {
    let mut out = Poly::new();
    for m in a.terms() {
        for e in milnor_on_squarefree(m.exps(), n) {
            toggle(&mut out, e);
        }
    }
    out
}

fn squarefree(n: usize) -> Poly {
    [vec![1; n]].into_iter().collect()
}

#[test]
fn milnor_basis_acts_faithfully_on_squarefree_monomials() {
    for d in 1..=12u32 {
        let basis = milnor_basis(d);
        let images: Vec<Vec<Vec<u32>>> = basis
            .monomials
            .iter()
            .map(|m| {
                let mut v: Vec<_> = milnor_on_squarefree(m.exps(), d as usize).into_iter().collect();
                v.sort();
                v
            })
            .collect();
        for (i, a) in images.iter().enumerate() {
            assert!(!a.is_empty());
            for b in &images[i + 1..] {
                assert_ne!(a, b);
            }
        }
    }
}

#[test]
fn sq_i_sq_j_matches_composition_of_cartan_operations() {
    for i in 1..=12u32 {
        for j in 1..=12 - i {
            let n = (i + j) as usize;
            let lhs = milnor_action(&product(&sq(i), &sq(j)), n);
            let rhs = cartan_sq(i, &cartan_sq(j, &squarefree(n)));
            assert_eq!(lhs, rhs, "Sq{i} Sq{j}");
        }
    }
}

#[test]
fn milnor_products_match_composition_on_polynomials() {
    for da in 1..=6u32 {
        for db in 1..=10 - da {
            let n = (da + db) as usize;
            for a in &milnor_basis(da).monomials {
                for b in &milnor_basis(db).monomials {
                    let ab: AlgebraElement = multiply_monomials(a, b).into_iter().collect();
                    let mut rhs = Poly::new();
                    for e in milnor_on_squarefree(b.exps(), n) {
                        let img = apply_monomial(a, &e);
                        for x in img {
                            toggle(&mut rhs, x);
                        }
                    }
                    assert_eq!(milnor_action(&ab, n), rhs, "{a} * {b}");
                }
            }
        }
    }
}

/// `Sq(R)` on a general monomial through the coproduct: each variable
/// `x^a` is a product of `a` degree-one classes.
fn apply_monomial(m: &Monomial, e: &[u32]) -> Poly {
    let expanded: usize = e.iter().map(|&a| a as usize).sum();
    let mut out = Poly::new();
    for img in milnor_on_squarefree(m.exps(), expanded) {
        let mut folded = Vec::with_capacity(e.len());
        let mut k = 0;
        for &a in e {
            folded.push(img[k..k + a as usize].iter().sum());
            k += a as usize;
        }
        toggle(&mut out, folded);
    }
    out
}

#[test]
fn coproduct_matches_cartan_formula_on_products() {
    for d in 1..=10u32 {
        for m in &milnor_basis(d).monomials {
            let n = d as usize;
            for split in 0..=n {
                let direct = milnor_on_squarefree(m.exps(), n);
                let mut via = Poly::new();
                for (l, r) in m.coproduct() {
                    for p in milnor_on_squarefree(l.exps(), split) {
                        for q in milnor_on_squarefree(r.exps(), n - split) {
                            let mut e = p.clone();
                            e.extend(q);
                            toggle(&mut via, e);
                        }
                    }
                }
                assert_eq!(direct, via, "{m} split at {split}");
            }
        }
    }
}

#[test]
fn associativity_exhaustive_through_degree_24() {
    let bases: Vec<_> = (0..=24u32).map(milnor_basis).collect();
    let mut cache: BTreeMap<(Monomial, Monomial), AlgebraElement> = BTreeMap::new();
    let mut mul = |a: &Monomial, b: &Monomial| -> AlgebraElement {
        cache
            .entry((a.clone(), b.clone()))
            .or_insert_with(|| multiply_monomials(a, b).into_iter().collect())
            .clone()
    };
    let mut count = 0u64;
    for da in 1..=22u32 {
        for db in 1..=23 - da {
            for dc in 1..=24 - da - db {
                for a in &bases[da as usize].monomials {
                    for b in &bases[db as usize].monomials {
                        let ab = mul(a, b);
                        for c in &bases[dc as usize].monomials {
                            let bc = mul(b, c);
                            let mut left = AlgebraElement::zero();
                            for x in ab.terms() {
                                left.add_assign(&mul(x, c));
                            }
                            let mut right = AlgebraElement::zero();
                            for y in bc.terms() {
                                right.add_assign(&mul(a, y));
                            }
                            assert_eq!(left, right, "({a} {b}) {c}");
                            count += 1;
                        }
                    }
                }
            }
        }
    }
    assert!(count > 0);
}

#[test]
fn coassociativity_through_degree_24() {
    for d in 0..=24u32 {
        for m in &milnor_basis(d).monomials {
            let mut left: BTreeMap<(Monomial, Monomial, Monomial), u32> = BTreeMap::new();
            let mut right = left.clone();
            for (x, z) in m.coproduct() {
                for (x1, x2) in x.coproduct() {
                    *left.entry((x1, x2, z.clone())).or_default() ^= 1;
                }
            }
            for (x, z) in m.coproduct() {
                for (z1, z2) in z.coproduct() {
                    *right.entry((x.clone(), z1, z2)).or_default() ^= 1;
                }
            }
            left.retain(|_, v| *v == 1);
            right.retain(|_, v| *v == 1);
            assert_eq!(left, right, "{m}");
        }
    }
}

#[test]
fn coproduct_is_multiplicative() {
    for da in 1..=8u32 {
        for db in 1..=8 {
            for a in &milnor_basis(da).monomials {
                for b in &milnor_basis(db).monomials {
                    let ab: AlgebraElement = multiply_monomials(a, b).into_iter().collect();
                    let lhs = ab.coproduct();
                    let mut rhs: BTreeMap<(Monomial, Monomial), u32> = BTreeMap::new();
                    for (a1, a2) in a.coproduct() {
                        for (b1, b2) in b.coproduct() {
                            for x in multiply_monomials(&a1, &b1) {
                                for y in multiply_monomials(&a2, &b2) {
                                    *rhs.entry((x.clone(), y)).or_default() ^= 1;
                                }
                            }
                        }
                    }
                    let rhs: std::collections::BTreeSet<_> =
                        rhs.into_iter().filter(|(_, v)| *v == 1).map(|(k, _)| k).collect();
                    assert_eq!(lhs, rhs, "{a} {b}");
                }
            }
        }
    }
}

#[test]
fn basis_dimensions_match_partition_count() {
    // dim A_n counts sequences (r_1, r_2, ...) with sum r_k (2^k - 1) = n.
    fn count(n: u32, k: u32) -> usize {
        let w = (1u32 << k) - 1;
        if w > n {
            return usize::from(n == 0);
        }
        (0..=n / w).map(|r| count(n - r * w, k + 1)).sum()
    }
    for n in 0..=40 {
        assert_eq!(milnor_basis(n).len(), count(n, 1), "degree {n}");
    }
}

#[test]
fn sq_a_sq_b_closed_form() {
    // Sq(a) Sq(b) = sum_j binom(a + b - 3j, a - 2j) Sq(a + b - 3j, j).
    for a in 0..=16u32 {
        for b in 0..=16u32 {
            let mut expected = AlgebraElement::zero();
            for j in 0..=a / 2 {
                if j > b {
                    break;
                }
                if binom_odd((a + b - 3 * j) as i64, (a - 2 * j) as i64) {
                    expected.add_monomial(Monomial::new(vec![a + b - 3 * j, j]));
                }
            }
            assert_eq!(product(&sq(a), &sq(b)), expected, "Sq{a} Sq{b}");
        }
    }
}

fn arb_monomial(max_degree: u32) -> impl Strategy<Value = Monomial> {
    (1..=max_degree).prop_flat_map(|d| {
        let n = milnor_basis(d).len();
        (Just(d), 0..n).prop_map(|(d, i)| milnor_basis(d).monomials[i].clone())
    })
}

proptest! {
    #[test]
    fn product_is_homogeneous_and_unital(a in arb_monomial(20), b in arb_monomial(20)) {
        let d = a.degree() + b.degree();
        for m in multiply_monomials(&a, &b) {
            prop_assert_eq!(m.degree(), d);
        }
        prop_assert_eq!(multiply_monomials(&a, &Monomial::unit()), vec![a.clone()]);
        prop_assert_eq!(multiply_monomials(&Monomial::unit(), &b), vec![b.clone()]);
    }

    #[test]
    fn halving_is_multiplicative(a in arb_monomial(24), b in arb_monomial(24)) {
        let ab: AlgebraElement = multiply_monomials(&a, &b).into_iter().collect();
        let ha = AlgebraElement::from(a.clone()).halve();
        let hb = AlgebraElement::from(b.clone()).halve();
        prop_assert_eq!(ab.halve(), ha.multiply(&hb));
        prop_assert_eq!(AlgebraElement::from(a.clone()).double().halve(), AlgebraElement::from(a));
    }
}
