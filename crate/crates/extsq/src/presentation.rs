//! Finitely presented modules and their text format.
//!
//! ```text
//! module M2
//! gen k2 5
//! rel Sq1 k2
//! rel Sq(0,1) k2
//! truncate 5 19
//! ```
//!
//! `rel` lines list relations as sums of `<element> <gen>` terms. The module
//! is the quotient of the free module on the generators by the relations,
//! restricted to degrees `lo..=hi`.

use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{F2Vector, Subspace};
use crate::module::{CompiledModule, ModuleGen};
use crate::parse::parse_linear;
use crate::steenrod::{check_degree, milnor_basis, multiply_monomials, AlgebraElement, Monomial};

#[derive(Clone, Debug, PartialEq)]
pub struct Presentation {
    pub name: String,
    pub gens: Vec<(String, i32)>,
    pub relations: Vec<Vec<(AlgebraElement, String)>>,
    pub truncation: (i32, i32),
}

impl Presentation {
    pub fn parse(text: &str) -> Result<Presentation> {
        let mut name = None;
        let mut gens: Vec<(String, i32)> = Vec::new();
        let mut relations = Vec::new();
        let mut truncation = None;
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match kw {
                "module" => {
                    if rest.is_empty() {
                        return Err(Error::parse(line_no, "module needs a name"));
                    }
                    name = Some(rest.to_string());
                }
                "gen" => {
                    let parts: Vec<&str> = rest.split_whitespace().collect();
                    if parts.len() != 2 {
                        return Err(Error::parse(line_no, "expected 'gen <name> <degree>'"));
                    }
                    let deg: i32 = parts[1]
                        .parse()
                        .map_err(|_| Error::parse(line_no, format!("bad degree '{}'", parts[1])))?;
                    if gens.iter().any(|(g, _)| g == parts[0]) {
                        return Err(Error::parse(line_no, format!("duplicate generator {}", parts[0])));
                    }
                    gens.push((parts[0].to_string(), deg));
                }
                "rel" => {
                    let terms = parse_linear(rest).map_err(|m| Error::parse(line_no, m))?;
                    for (_, g) in &terms {
                        if !gens.iter().any(|(n, _)| n == g) {
                            return Err(Error::parse(line_no, format!("unknown generator {g}")));
                        }
                    }
                    relations.push(terms);
                }
                "truncate" => {
                    let parts: Vec<i32> = rest
                        .split_whitespace()
                        .map(|x| x.parse::<i32>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| Error::parse(line_no, "expected 'truncate <lo> <hi>'"))?;
                    if parts.len() != 2 || parts[0] > parts[1] {
                        return Err(Error::parse(line_no, "expected 'truncate <lo> <hi>'"));
                    }
                    truncation = Some((parts[0], parts[1]));
                }
                _ => return Err(Error::parse(line_no, format!("unknown keyword '{kw}'"))),
            }
        }
        let name = name.ok_or_else(|| Error::parse(0, "missing 'module' line"))?;
        let truncation =
            truncation.ok_or_else(|| Error::parse(0, "missing 'truncate' line; modules must be finite"))?;
        if gens.is_empty() {
            return Err(Error::parse(0, "module has no generators"));
        }
        Ok(Presentation {
            name,
            gens,
            relations,
            truncation,
        })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Presentation> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Presentation::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("module {}\n", self.name);
        for (g, d) in &self.gens {
            out += &format!("gen {g} {d}\n");
        }
        for r in &self.relations {
            let terms: Vec<String> = r.iter().map(|(a, g)| format_term(a, g)).collect();
            out += &format!("rel {}\n", terms.join(" + "));
        }
        out += &format!("truncate {} {}\n", self.truncation.0, self.truncation.1);
        out
    }

    fn gen_index(&self, name: &str) -> usize {
        self.gens.iter().position(|(g, _)| g == name).unwrap()
    }

    /// Degree of a relation; errors when it is not homogeneous.
    fn relation_degree(&self, rel: &[(AlgebraElement, String)]) -> Result<Option<i32>> {
        let mut deg = None;
        for (a, g) in rel {
            for m in a.terms() {
                let d = m.degree() as i32 + self.gens[self.gen_index(g)].1;
                match deg {
                    None => deg = Some(d),
                    Some(e) if e != d => {
                        return Err(Error::Module(format!(
                            "relation in {} is not homogeneous",
                            self.name
                        )))
                    }
                    _ => {}
                }
            }
        }
        Ok(deg)
    }

    pub fn compile(&self) -> Result<CompiledModule> {
        let (lo, hi) = self.truncation;
        let gmin = self.gens.iter().map(|g| g.1).min().unwrap();
        let base = gmin.min(lo);
        if hi - base >= 0 {
            check_degree((hi - base) as u32)?;
        }
        let free = |d: i32| -> Vec<(usize, Monomial)> {
            let mut out = Vec::new();
            for (j, (_, gd)) in self.gens.iter().enumerate() {
                if d >= *gd {
                    for m in &milnor_basis((d - gd) as u32).monomials {
                        out.push((j, m.clone()));
                    }
                }
            }
            out
        };
        let start = base;
        let degrees: Vec<i32> = (start..=hi).collect();
        let free_bases: Vec<Vec<(usize, Monomial)>> = degrees.iter().map(|&d| free(d)).collect();
        let offsets: Vec<Vec<usize>> = free_bases
            .iter()
            .map(|fb| {
                let mut o = vec![usize::MAX; self.gens.len()];
                for (i, (g, _)) in fb.iter().enumerate().rev() {
                    o[*g] = i;
                }
                o
            })
            .collect();
        let index_of = |d: i32, j: usize, m: &Monomial| -> usize {
            offsets[(d - start) as usize][j] + milnor_basis(m.degree()).index_of(m).unwrap()
        };
        let mut rel_spaces: Vec<Subspace> = free_bases.iter().map(|b| Subspace::new(b.len())).collect();
        let mut rel_degrees = Vec::new();
        for rel in &self.relations {
            rel_degrees.push(self.relation_degree(rel)?);
        }
        for (rel, rd) in self.relations.iter().zip(&rel_degrees) {
            let Some(rd) = *rd else { continue };
            for d in rd.max(start)..=hi {
                if d < rd {
                    continue;
                }
                for op in &milnor_basis((d - rd) as u32).monomials {
                    let mut v = F2Vector::zero(free_bases[(d - start) as usize].len());
                    for (a, g) in rel {
                        let j = self.gen_index(g);
                        for m in a.terms() {
                            for p in multiply_monomials(op, m) {
                                v.flip(index_of(d, j, &p));
                            }
                        }
                    }
                    rel_spaces[(d - start) as usize].insert(&v);
                }
            }
        }
        let kept: Vec<Vec<usize>> = degrees
            .iter()
            .enumerate()
            .map(|(k, &d)| {
                if d < lo {
                    Vec::new()
                } else {
                    (0..free_bases[k].len())
                        .filter(|&i| !rel_spaces[k].is_pivot(i))
                        .collect()
                }
            })
            .collect();
        let dims: Vec<usize> = kept.iter().map(Vec::len).collect();
        let project = |d: i32, v: &mut F2Vector| -> F2Vector {
            let k = (d - start) as usize;
            rel_spaces[k].reduce(v);
            F2Vector::from_indices(
                kept[k].len(),
                kept[k].iter().enumerate().filter(|(_, &c)| v.get(c)).map(|(i, _)| i),
            )
        };
        let mut module = CompiledModule::from_action(self.name.clone(), start, dims, |deg, i, op| {
            let k = (deg - start) as usize;
            let (j, m) = &free_bases[k][kept[k][i]];
            let t = deg + op.degree() as i32;
            let mut v = F2Vector::zero(free_bases[(t - start) as usize].len());
            for p in multiply_monomials(op, m) {
                v.flip(index_of(t, *j, &p));
            }
            project(t, &mut v)
        });
        let names: Vec<Vec<String>> = kept
            .iter()
            .enumerate()
            .map(|(k, idx)| {
                idx.iter()
                    .map(|&i| {
                        let (j, m) = &free_bases[k][i];
                        format_term(&m.clone().into(), &self.gens[*j].0)
                    })
                    .collect()
            })
            .collect();
        let reps = kept
            .iter()
            .enumerate()
            .map(|(k, idx)| {
                idx.iter()
                    .map(|&i| {
                        let (j, m) = &free_bases[k][i];
                        vec![(m.clone(), *j)]
                    })
                    .collect()
            })
            .collect();
        let gens = self
            .gens
            .iter()
            .enumerate()
            .map(|(j, (name, d))| {
                let vector = if *d >= lo && *d <= hi {
                    let mut v = F2Vector::zero(free_bases[(d - start) as usize].len());
                    v.flip(index_of(*d, j, &Monomial::unit()));
                    project(*d, &mut v)
                } else {
                    F2Vector::zero(0)
                };
                ModuleGen {
                    name: name.clone(),
                    degree: *d,
                    vector,
                }
            })
            .collect();
        module.set_presentation_data(names, gens, Some(reps));
        module.trim();
        Ok(module)
    }

    /// Doubles generator degrees, relations and truncation bounds.
    pub fn double(&self) -> Presentation {
        Presentation {
            name: format!("Phi {}", self.name),
            gens: self.gens.iter().map(|(g, d)| (g.clone(), 2 * d)).collect(),
            relations: self
                .relations
                .iter()
                .map(|r| r.iter().map(|(a, g)| (a.double(), g.clone())).collect())
                .collect(),
            truncation: (2 * self.truncation.0, 2 * self.truncation.1),
        }
    }
}

pub(crate) fn format_term(a: &AlgebraElement, g: &str) -> String {
    if *a == AlgebraElement::unit() {
        g.to_string()
    } else if a.len() == 1 {
        format!("{a} {g}")
    } else {
        format!("({a}) {g}")
    }
}
