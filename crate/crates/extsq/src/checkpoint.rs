//! Binary checkpoints of resolutions.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic "EXTSQRES" | version u32 | payload length u64 | payload | sha256(payload)
//! ```
//!
//! The payload holds the resolved module (degrees, basis names, generators
//! and the action of every Milnor basis element) followed by the frontier
//! and the generators of the resolution.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::F2Vector;
use crate::module::{CompiledModule, ModuleGen};
use crate::resolution::{Generator, Resolution};
use crate::steenrod::{milnor_basis, Monomial};

const MAGIC: &[u8; 8] = b"EXTSQRES";
pub const VERSION: u32 = 1;

/// Hex SHA-256 of the canonical text dump, stable across runs and thread
/// counts.
pub fn canonical_hash(res: &Resolution) -> String {
    hex(&Sha256::digest(res.to_text().as_bytes()))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn to_bytes(res: &Resolution) -> Vec<u8> {
    let mut w = Writer::default();
    write_module(&mut w, res.module());
    w.u32(res.s_max());
    w.i32(res.t_max());
    for s in 0..=res.s_max() {
        let gens = res.generators(s);
        w.u32(gens.len() as u32);
        for g in gens {
            w.i32(g.degree);
            match &g.augmentation {
                Some(v) => w.vector(v),
                None => {
                    w.u32(g.terms.len() as u32);
                    for (h, m) in &g.terms {
                        w.u32(*h as u32);
                        w.monomial(m);
                    }
                }
            }
        }
    }
    let payload = w.buf;
    let mut out = Vec::with_capacity(payload.len() + 52);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
    out.extend_from_slice(&payload);
    out.extend_from_slice(&Sha256::digest(&payload));
    out
}

pub fn from_bytes(bytes: &[u8]) -> Result<Resolution> {
    let bad = |msg: &str| Error::Checkpoint(msg.to_string());
    if bytes.len() < 20 || &bytes[..8] != MAGIC {
        return Err(bad("not a resolution checkpoint"));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if version != VERSION {
        return Err(Error::Checkpoint(format!("version {version}, expected {VERSION}")));
    }
    let len = u64::from_le_bytes(bytes[12..20].try_into().unwrap()) as usize;
    if bytes.len() != 20 + len + 32 {
        return Err(bad("truncated or padded file"));
    }
    let payload = &bytes[20..20 + len];
    if Sha256::digest(payload).as_slice() != &bytes[20 + len..] {
        return Err(bad("checksum mismatch"));
    }
    let mut r = Reader { buf: payload, pos: 0 };
    let module = Arc::new(read_module(&mut r)?);
    let s_max = r.u32()?;
    let t_max = r.i32()?;
    let mut gens: Vec<Vec<Generator>> = Vec::new();
    for s in 0..=s_max {
        let n = r.u32()? as usize;
        let mut level: Vec<Generator> = Vec::with_capacity(n.min(1 << 16));
        for index in 0..n {
            let degree = r.i32()?;
            if degree > t_max || degree < module.min_degree() + s as i32 {
                return Err(Error::Checkpoint(format!("generator {s}_{index} outside the frontier")));
            }
            if level.last().is_some_and(|g| g.degree > degree) {
                return Err(Error::Checkpoint(format!("generator {s}_{index} out of order")));
            }
            let g = if s == 0 {
                let v = r.vector()?;
                if v.len() != module.dim(degree) || v.is_zero() {
                    return Err(Error::Checkpoint(format!("bad augmentation for 0_{index}")));
                }
                Generator {
                    s,
                    index,
                    degree,
                    terms: Vec::new(),
                    augmentation: Some(v),
                }
            } else {
                let k = r.u32()? as usize;
                let mut terms = Vec::with_capacity(k.min(1 << 16));
                for _ in 0..k {
                    let h = r.u32()? as usize;
                    let m = r.monomial()?;
                    let prev = &gens[s as usize - 1];
                    if h >= prev.len() || prev[h].degree + m.degree() as i32 != degree {
                        return Err(Error::Checkpoint(format!("bad differential for {s}_{index}")));
                    }
                    terms.push((h, m));
                }
                if terms.is_empty() {
                    return Err(Error::Checkpoint(format!("zero differential for {s}_{index}")));
                }
                Generator {
                    s,
                    index,
                    degree,
                    terms,
                    augmentation: None,
                }
            };
            level.push(g);
        }
        gens.push(level);
    }
    if r.pos != r.buf.len() {
        return Err(bad("trailing data"));
    }
    Ok(Resolution::from_parts(module, s_max, t_max, gens))
}

pub fn save(res: &Resolution, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_bytes(res)).map_err(|e| Error::io(path, e))
}

pub fn load(path: impl AsRef<Path>) -> Result<Resolution> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    from_bytes(&bytes)
}

fn write_module(w: &mut Writer, m: &CompiledModule) {
    w.string(m.name());
    let degrees: Vec<i32> = if m.total_dim() == 0 {
        Vec::new()
    } else {
        (m.min_degree()..=m.max_degree()).collect()
    };
    w.i32(m.min_degree());
    w.u32(degrees.len() as u32);
    for &d in &degrees {
        w.u32(m.dim(d) as u32);
        for i in 0..m.dim(d) {
            w.string(m.basis_name(d, i));
        }
    }
    w.u32(m.gens().len() as u32);
    for g in m.gens() {
        w.string(&g.name);
        w.i32(g.degree);
        w.vector(&g.vector);
    }
    for &d in &degrees {
        for &e in &degrees {
            if e <= d {
                continue;
            }
            for op in &milnor_basis((e - d) as u32).monomials {
                let mat = m.action_matrix(op, d).expect("action in range");
                for row in mat.rows() {
                    w.vector(row);
                }
            }
        }
    }
}

fn read_module(r: &mut Reader) -> Result<CompiledModule> {
    let name = r.string()?;
    let min_degree = r.i32()?;
    let span = r.u32()? as usize;
    let mut dims = Vec::with_capacity(span.min(1 << 12));
    let mut basis_names = Vec::with_capacity(span.min(1 << 12));
    for _ in 0..span {
        let n = r.u32()? as usize;
        dims.push(n);
        basis_names.push((0..n).map(|_| r.string()).collect::<Result<Vec<_>>>()?);
    }
    let dim = |d: i32| -> usize {
        let k = d - min_degree;
        if k < 0 || k as usize >= span {
            0
        } else {
            dims[k as usize]
        }
    };
    let ngens = r.u32()? as usize;
    let mut gens = Vec::with_capacity(ngens.min(1 << 12));
    for _ in 0..ngens {
        let name = r.string()?;
        let degree = r.i32()?;
        let vector = r.vector()?;
        if vector.len() != dim(degree) {
            return Err(Error::Checkpoint(format!("generator {name} has the wrong length")));
        }
        gens.push(ModuleGen { name, degree, vector });
    }
    let mut table: std::collections::HashMap<(i32, Monomial), Vec<F2Vector>> = Default::default();
    for a in 0..span {
        for b in a + 1..span {
            let (d, e) = (min_degree + a as i32, min_degree + b as i32);
            for op in &milnor_basis((e - d) as u32).monomials {
                let rows = (0..dims[a]).map(|_| r.vector()).collect::<Result<Vec<_>>>()?;
                if rows.iter().any(|v| v.len() != dims[b]) {
                    return Err(Error::Checkpoint(format!("action out of shape in degree {d}")));
                }
                table.insert((d, op.clone()), rows);
            }
        }
    }
    let mut m = CompiledModule::from_action(name, min_degree, dims, |d, i, op| {
        table[&(d, op.clone())][i].clone()
    });
    m.set_presentation_data(basis_names, gens, None);
    m.verify_associative()
        .map_err(|e| Error::Checkpoint(format!("stored action is not a module: {e}")))?;
    Ok(m)
}

#[derive(Default)]
struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn u32(&mut self, x: u32) {
        self.buf.extend_from_slice(&x.to_le_bytes());
    }

    fn i32(&mut self, x: i32) {
        self.buf.extend_from_slice(&x.to_le_bytes());
    }

    fn string(&mut self, s: &str) {
        self.u32(s.len() as u32);
        self.buf.extend_from_slice(s.as_bytes());
    }

    fn vector(&mut self, v: &F2Vector) {
        self.u32(v.len() as u32);
        let mut bytes = vec![0u8; v.len().div_ceil(8)];
        for i in v.ones() {
            bytes[i / 8] |= 1 << (i % 8);
        }
        self.buf.extend_from_slice(&bytes);
    }

    fn monomial(&mut self, m: &Monomial) {
        self.u32(m.exps().len() as u32);
        for &x in m.exps() {
            self.u32(x);
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        if self.buf.len() - self.pos < n {
            return Err(Error::Checkpoint("unexpected end of payload".into()));
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn i32(&mut self) -> Result<i32> {
        Ok(i32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn string(&mut self) -> Result<String> {
        let n = self.u32()? as usize;
        String::from_utf8(self.take(n)?.to_vec()).map_err(|_| Error::Checkpoint("invalid UTF-8".into()))
    }

    fn vector(&mut self) -> Result<F2Vector> {
        let len = self.u32()? as usize;
        let bytes = self.take(len.div_ceil(8))?;
        let ones = (0..len).filter(|&i| bytes[i / 8] >> (i % 8) & 1 == 1);
        Ok(F2Vector::from_indices(len, ones))
    }

    fn monomial(&mut self) -> Result<Monomial> {
        let n = self.u32()? as usize;
        if n > 64 {
            return Err(Error::Checkpoint("monomial too long".into()));
        }
        Ok(Monomial::new((0..n).map(|_| self.u32()).collect::<Result<Vec<_>>>()?))
    }
}
