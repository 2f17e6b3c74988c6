//! Acceptance suite: one line per criterion, then a nonzero exit if any
//! criterion fails. Tolerances are exact throughout.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use extsq::chainmap::{chain_map_from_assignment, lift_to_extension, verify_chain_map, TieBreak};
use extsq::extension::{data_file, library, ExactExtension, LIBRARY_NAMES};
use extsq::resolution::{resolve_f2, Resolution};
use extsq::sq::{build_lift, compute_sq, steenrod_squares, verify_table, DeltaTable};
use extsq::steenrod::{milnor_basis, multiply_monomials, AlgebraElement, Monomial};
use extsq::walkthrough::{walkthrough_d0, walkthrough_e0};

const SQUARES: &[(&str, &str)] = &[
    ("c0", "(6_5, 5_6, 4_6, 3_9)"),
    ("c1", "(6_17, 5_19, 4_19, 3_19)"),
    ("f0", "(0, 7_13 + 7_14, 6_16, 0, 4_19)"),
    ("e0", "(8_13, 7_12, 6_14, 5_17, 4_16)"),
    ("d0", "(8_7, 0, 6_10, 0, 4_13)"),
];

const TOP_COCYCLES: &[(&str, &str)] = &[("c0", "3_3"), ("c1", "3_9"), ("f0", "4_6"), ("e0", "4_5"), ("d0", "4_3")];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn reference() -> Vec<(String, i32, String)> {
    data_file("reference/f2_s8_t44.txt")
        .unwrap()
        .lines()
        .map(|l| {
            let (head, rest) = l.split_once(':').unwrap();
            let mut parts = head.split_whitespace();
            let name = parts.next().unwrap().to_string();
            let t = parts.next().unwrap().parse().unwrap();
            let body = rest.split_whitespace().collect::<Vec<_>>().join(" ");
            (name, t, body)
        })
        .collect()
}

fn generator_counts(res: &Resolution) -> Outcome {
    let mut expected: BTreeMap<(u32, i32), usize> = BTreeMap::new();
    for (name, t, _) in reference() {
        let s: u32 = name.split('_').next().unwrap().parse().unwrap();
        if t <= 44 {
            *expected.entry((s, t)).or_default() += 1;
        }
    }
    let mut ours: BTreeMap<(u32, i32), usize> = BTreeMap::new();
    for s in 1..=8 {
        for g in res.generators(s) {
            *ours.entry((s, g.degree)).or_default() += 1;
        }
    }
    let mismatches: Vec<String> = expected
        .keys()
        .chain(ours.keys())
        .filter(|k| expected.get(k) != ours.get(k))
        .map(|(s, t)| format!("({s},{t})"))
        .collect();
    let hopf = resolve_f2(1, 127);
    let degrees: Vec<i32> = hopf.generators(1).iter().map(|g| g.degree).collect();
    let hopf_ok = degrees == [1, 2, 4, 8, 16, 32, 64];
    let total: usize = ours.values().sum();
    outcome(
        mismatches.is_empty() && hopf_ok && res.generators(0).len() == 1,
        format!(
            "{total} generators in {} bidegrees for 1 <= s <= 8, t <= 44, mismatches [{}]; s = 1 through t = 127 in degrees {degrees:?}",
            ours.len(),
            mismatches.join(", ")
        ),
    )
}

fn differentials(res: &Resolution) -> Outcome {
    let ours: Vec<String> = res.to_text().lines().skip(1).map(str::to_string).collect();
    let published: Vec<String> = reference()
        .into_iter()
        .filter(|(_, t, _)| *t <= 44)
        .map(|(name, t, body)| format!("{name} {t} : {body}"))
        .collect();
    let diverging: Vec<&String> = published.iter().filter(|l| !ours.contains(l)).collect();
    let first = diverging.first().map_or(String::new(), |l| format!(", first {l}"));
    outcome(
        diverging.is_empty() && ours.len() == published.len(),
        format!(
            "{} of {} printed differentials string-identical{first}",
            published.len() - diverging.len(),
            published.len()
        ),
    )
}

fn normalize(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

fn squares(res: &Resolution) -> Outcome {
    let mut bad = Vec::new();
    for &(name, expected) in SQUARES {
        let e = library(name).unwrap();
        let got = steenrod_squares(res, &e, TieBreak::Natural).unwrap().to_string();
        if normalize(&got) != normalize(expected) {
            bad.push(format!("{name} gave {got}"));
        }
    }
    outcome(
        bad.is_empty(),
        if bad.is_empty() {
            "c0, c1, f0, e0, d0 reproduced".to_string()
        } else {
            bad.join("; ")
        },
    )
}

fn tables(res: &Resolution) -> Outcome {
    let mut lines = Vec::new();
    let mut passed = true;
    for name in ["c0", "c1", "f0"] {
        let e = library(name).unwrap();
        let report = verify_table(res, &e, &DeltaTable::library(name).unwrap()).unwrap();
        let rows = |zero: bool| -> Vec<String> {
            report
                .failures
                .iter()
                .map(|f| f.split(':').next().unwrap().to_string())
                .filter(|r| r.starts_with("Δ0") == zero)
                .collect()
        };
        for (label, zero) in [("Δ0", true), ("Δi", false)] {
            let failed = rows(zero);
            passed &= failed.is_empty();
            if failed.is_empty() {
                lines.push(format!("{name} {label} ok"));
            } else {
                lines.push(format!("{name} {label} fails at {}", failed.join(" ")));
            }
        }
    }
    // Row 3_4 of the f0 Δ0 table is symmetric as printed; the antisymmetric
    // reading is the only one consistent with Δ1(3_4). Generator 3_13 has
    // no row, and no value for it fits the printed row 4_12.
    let e = library("f0").unwrap();
    let corrected = DeltaTable::library("f0")
        .unwrap()
        .with_entry("3_4", 0, "Sq3 k1⊗k2 + k1⊗Sq(0,1) k2");
    let left: Vec<String> = verify_table(res, &e, &corrected)
        .unwrap()
        .failures
        .iter()
        .map(|f| f.split(':').next().unwrap().to_string())
        .collect();
    lines.push(format!("f0 with 3_4 read antisymmetrically fails only at [{}]", left.join(" ")));
    outcome(passed, lines.join("; "))
}

fn top_cocycles(res: &Resolution) -> Outcome {
    let mut got = Vec::new();
    let mut passed = true;
    for &(name, expected) in TOP_COCYCLES {
        let e = library(name).unwrap();
        let top = lift_to_extension(res, &e, TieBreak::Natural).unwrap().top_cocycle().to_string();
        passed &= top == expected;
        got.push(format!("{name} {{{top}}}"));
    }
    let splice = library("h0").unwrap().splice(&library("h1").unwrap());
    let top = lift_to_extension(res, &splice, TieBreak::Natural).unwrap().top_cocycle();
    passed &= top.is_zero();
    let published = chain_map_from_assignment(res, &splice, &[("0_0", "x0"), ("1_0", "x1")]).unwrap();
    passed &= verify_chain_map(res, &splice, &published).passed();
    got.push(format!("h0 h1 splice {{{}}}", if top.is_zero() { "" } else { "nonzero" }));
    outcome(passed, got.join(", "))
}

fn walkthroughs(res: &Resolution) -> Outcome {
    let mut passed = true;
    let mut detail = Vec::new();
    for run in [walkthrough_e0, walkthrough_d0] {
        match run(res) {
            Ok(report) => {
                passed &= report.passed();
                let n = report.steps.len();
                match report.first_divergence() {
                    None => detail.push(format!("{}: {n} steps reproduced", report.name)),
                    Some(step) => detail.push(format!("{}: {step}", report.name)),
                }
            }
            Err(err) => {
                passed = false;
                detail.push(err.to_string());
            }
        }
    }
    outcome(passed, detail.join("; "))
}

fn properties(res: &Resolution) -> Outcome {
    let mut failures = Vec::new();
    let mut counts = String::new();

    let mut checked = 0;
    for s in 1..=res.s_max() {
        for g in res.generators(s) {
            checked += 1;
            if g.terms.iter().any(|(_, m)| m.is_unit()) {
                failures.push(format!("{} is not minimal", g.name()));
            }
            if s >= 2 {
                let dg = res.differential_vector(g);
                if !res.differential(s - 1, g.degree, &dg).is_zero() {
                    failures.push(format!("d d {} != 0", g.name()));
                }
            }
        }
    }
    write!(counts, "d d = 0 and minimality on {checked} generators").unwrap();

    for name in LIBRARY_NAMES {
        let e = library(name).unwrap();
        let report = e.verify_exact();
        if !report.is_exact() {
            failures.push(format!("{name} not exact"));
        }
    }
    write!(counts, ", {} extensions exact", LIBRARY_NAMES.len()).unwrap();

    let mut lifts = 0;
    for &(name, _) in SQUARES {
        let e = library(name).unwrap();
        let mut results = Vec::new();
        for tie in [TieBreak::Natural, TieBreak::Reversed] {
            let lift = build_lift(res, &e, tie).unwrap();
            let bad = lift.verify(res);
            if !bad.is_empty() {
                failures.push(format!("{name} {tie:?}: {}", bad[0]));
            }
            lifts += 1;
            results.push(compute_sq(&lift).to_string());
        }
        if results[0] != results[1] {
            failures.push(format!("{name} depends on the tie-break: {} vs {}", results[0], results[1]));
        }
    }
    write!(counts, ", homotopy equations on {lifts} lifts, tie-break independence").unwrap();

    let assoc = associativity(24);
    if let Err(e) = &assoc {
        failures.push(e.clone());
    }
    write!(counts, ", associativity on {} triples", assoc.unwrap_or(0)).unwrap();

    match adem(16) {
        Ok(n) => write!(counts, ", Adem oracle on {n} products").unwrap(),
        Err(e) => failures.push(e),
    }
    match coassociativity(24) {
        Ok(n) => write!(counts, ", coassociativity on {n} basis elements").unwrap(),
        Err(e) => failures.push(e),
    }

    if failures.is_empty() {
        outcome(true, counts)
    } else {
        outcome(false, failures.join("; "))
    }
}

fn associativity(max: u32) -> Result<u64, String> {
    let bases: Vec<_> = (0..=max).map(milnor_basis).collect();
    let mut cache: BTreeMap<(Monomial, Monomial), AlgebraElement> = BTreeMap::new();
    let mut mul = |a: &Monomial, b: &Monomial| -> AlgebraElement {
        cache
            .entry((a.clone(), b.clone()))
            .or_insert_with(|| multiply_monomials(a, b).into_iter().collect())
            .clone()
    };
    let mut count = 0;
    for da in 1..=max - 2 {
        for db in 1..=max - 1 - da {
            for dc in 1..=max - da - db {
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
                            if left != right {
                                return Err(format!("({a} {b}) {c} != {a} ({b} {c})"));
                            }
                            count += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(count)
}

fn binom_odd(n: i64, k: i64) -> bool {
    k >= 0 && n >= k && (k & (n - k)) == 0
}

/// Sq^i Sq^j for `i < 2j` against the Adem relation; for `i >= 2j` the
/// admissible products of each degree must be linearly independent.
fn adem(max: u32) -> Result<usize, String> {
    let sq = AlgebraElement::sq;
    let mut count = 0;
    let mut admissible: BTreeMap<u32, Vec<AlgebraElement>> = BTreeMap::new();
    for i in 1..=max {
        for j in 1..=max {
            let lhs = sq(i).multiply(&sq(j));
            count += 1;
            if i >= 2 * j {
                admissible.entry(i + j).or_default().push(lhs);
                continue;
            }
            let mut rhs = AlgebraElement::zero();
            for k in 0..=i / 2 {
                if binom_odd(j as i64 - k as i64 - 1, i as i64 - 2 * k as i64) {
                    rhs.add_assign(&sq(i + j - k).multiply(&sq(k)));
                }
            }
            if lhs != rhs {
                return Err(format!("Sq{i} Sq{j} = {lhs}, Adem gives {rhs}"));
            }
        }
    }
    for (n, elts) in admissible {
        let basis = milnor_basis(n);
        let rows: Vec<extsq::linalg::F2Vector> = elts
            .iter()
            .map(|a| {
                extsq::linalg::F2Vector::from_indices(basis.len(), a.terms().map(|m| basis.index_of(m).unwrap()))
            })
            .collect();
        let m = extsq::linalg::F2Matrix::from_rows(rows, basis.len());
        if m.rank() != elts.len() {
            return Err(format!("admissible squares of degree {n} are dependent"));
        }
    }
    Ok(count)
}

fn coassociativity(max: u32) -> Result<usize, String> {
    let mut count = 0;
    for d in 0..=max {
        for m in &milnor_basis(d).monomials {
            let mut left: BTreeMap<(Monomial, Monomial, Monomial), u32> = BTreeMap::new();
            let mut right = left.clone();
            for (x, z) in m.coproduct() {
                for (x1, x2) in x.coproduct() {
                    *left.entry((x1, x2, z.clone())).or_default() ^= 1;
                }
                for (z1, z2) in z.coproduct() {
                    *right.entry((x.clone(), z1, z2)).or_default() ^= 1;
                }
            }
            left.retain(|_, v| *v == 1);
            right.retain(|_, v| *v == 1);
            if left != right {
                return Err(format!("coproduct not coassociative on {m}"));
            }
            count += 1;
        }
    }
    Ok(count)
}

fn cross_representative(res: &Resolution) -> Outcome {
    let x = res.class("3_3").unwrap();
    let canonical = ExactExtension::canonical(res, &x, 22).unwrap();
    let a = steenrod_squares(res, &canonical, TieBreak::Natural).unwrap().to_string();
    let b = steenrod_squares(res, &library("c0").unwrap(), TieBreak::Natural).unwrap().to_string();
    outcome(a == b, format!("canonical extension of 3_3 gives {a}, library c0 gives {b}"))
}

fn main() {
    let start = Instant::now();
    let res = resolve_f2(8, 44);
    let criteria: [(&str, fn(&Resolution) -> Outcome); 8] = [
        ("generator counts", generator_counts),
        ("printed differentials", differentials),
        ("squares of c0, c1, f0, e0, d0", squares),
        ("published Δ tables", tables),
        ("top cocycles", top_cocycles),
        ("e0 and d0 constructions", walkthroughs),
        ("property suites", properties),
        ("canonical extension of 3_3", cross_representative),
    ];
    let mut failed = Vec::new();
    for (k, (name, check)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let result = check(&res);
        let status = if result.passed { "PASS" } else { "FAIL" };
        println!(
            "criterion {} {status} {name} [{:.1}s]: {}",
            k + 1,
            t0.elapsed().as_secs_f64(),
            result.detail
        );
        if !result.passed {
            failed.push(k + 1);
        }
    }
    println!("total {:.1}s", start.elapsed().as_secs_f64());
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
