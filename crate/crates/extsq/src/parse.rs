//! Text syntax for algebra and module elements.
//!
//! `Sq12`, `Sq^12`, `Sq^{12}`, `Sq(0,4)` and `Sq^{(0,4)}` denote Milnor basis
//! elements, juxtaposition is the product, `+` the sum. A bare `1` is the unit
//! and `0` is zero. Any other word is a generator name, so `Sq4 Sq2 k1` and
//! `(Sq8 + Sq(2,2)) 1_0` are module elements.

use crate::steenrod::{AlgebraElement, Monomial};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Sq(Monomial),
    Unit,
    Zero,
    Name(String),
    Plus,
    LParen,
    RParen,
}

fn lex(s: &str) -> Result<Vec<Tok>, String> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        match c {
            '+' => {
                out.push(Tok::Plus);
                i += 1;
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1;
            }
            _ if c == 'S'
                && chars.get(i + 1) == Some(&'q')
                && (matches!(chars.get(i + 2), Some('^' | '{' | '('))
                    || starts_digits(&chars, i + 2)) =>
            {
                i += 2;
                let (m, next) = lex_sq(&chars, i)?;
                out.push(Tok::Sq(m));
                i = next;
            }
            _ if is_name_char(Some(&c)) => {
                let start = i;
                while i < chars.len() && is_name_char(chars.get(i)) {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                match word.as_str() {
                    "1" => out.push(Tok::Unit),
                    "0" => out.push(Tok::Zero),
                    _ => out.push(Tok::Name(word)),
                }
            }
            _ => return Err(format!("unexpected character '{c}'")),
        }
    }
    Ok(out)
}

fn is_name_char(c: Option<&char>) -> bool {
    matches!(c, Some(c) if c.is_ascii_alphanumeric() || *c == '_' || *c == '\'')
}

fn starts_digits(chars: &[char], i: usize) -> bool {
    let mut j = i;
    while j < chars.len() && chars[j].is_ascii_digit() {
        j += 1;
    }
    j > i && !is_name_char(chars.get(j))
}

fn lex_sq(chars: &[char], mut i: usize) -> Result<(Monomial, usize), String> {
    if chars.get(i) == Some(&'^') {
        i += 1;
    }
    let start = i;
    match chars.get(i) {
        Some(c) if c.is_ascii_digit() => {
            while chars.get(i).is_some_and(|c| c.is_ascii_digit()) {
                i += 1;
            }
        }
        Some('{') | Some('(') => {
            let mut depth = 0i32;
            while i < chars.len() {
                match chars[i] {
                    '{' | '(' => depth += 1,
                    '}' | ')' => depth -= 1,
                    c if c.is_ascii_digit() || c == ',' || c.is_whitespace() => {}
                    c => return Err(format!("unexpected '{c}' in exponent")),
                }
                i += 1;
                if depth == 0 {
                    break;
                }
            }
            if depth != 0 {
                return Err("unbalanced exponent".into());
            }
        }
        _ => return Err("Sq without exponent".into()),
    }
    let body: String = chars[start..i]
        .iter()
        .filter(|c| c.is_ascii_digit() || **c == ',')
        .collect();
    let exps = body
        .split(',')
        .map(|x| x.parse::<u32>().map_err(|_| format!("bad exponent '{x}'")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((Monomial::new(exps), i))
}

/// A sum of `a g` terms; `None` marks a term with no generator.
type Lin = Vec<(AlgebraElement, Option<String>)>;

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn sum(&mut self) -> Result<Lin, String> {
        let mut out = self.product()?;
        while self.peek() == Some(&Tok::Plus) {
            self.pos += 1;
            out.extend(self.product()?);
        }
        Ok(out)
    }

    fn product(&mut self) -> Result<Lin, String> {
        let mut factors = Vec::new();
        while let Some(t) = self.peek() {
            if matches!(t, Tok::Plus | Tok::RParen) {
                break;
            }
            factors.push(self.atom()?);
        }
        if factors.is_empty() {
            return Err("empty term".into());
        }
        let mut acc = factors.pop().unwrap();
        while let Some(left) = factors.pop() {
            let mut next = Vec::new();
            for (a, g) in &left {
                if g.is_some() {
                    return Err("a generator can only end a term".into());
                }
                for (b, h) in &acc {
                    next.push((a.multiply(b), h.clone()));
                }
            }
            acc = next;
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Lin, String> {
        let t = self.peek().cloned().ok_or("unexpected end")?;
        self.pos += 1;
        match t {
            Tok::Sq(m) => Ok(vec![(m.into(), None)]),
            Tok::Unit => Ok(vec![(AlgebraElement::unit(), None)]),
            Tok::Zero => Ok(vec![(AlgebraElement::zero(), None)]),
            Tok::Name(n) => Ok(vec![(AlgebraElement::unit(), Some(n))]),
            Tok::LParen => {
                let inner = self.sum()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err("missing ')'".into());
                }
                self.pos += 1;
                Ok(inner)
            }
            Tok::Plus | Tok::RParen => Err(format!("unexpected {t:?}")),
        }
    }
}

fn parse_lin(s: &str) -> Result<Lin, String> {
    let toks = lex(s)?;
    if toks.is_empty() {
        return Err("empty expression".into());
    }
    let mut p = Parser { toks, pos: 0 };
    let out = p.sum()?;
    if p.pos != p.toks.len() {
        return Err(format!("trailing input in '{s}'"));
    }
    Ok(out)
}

pub fn parse_algebra(s: &str) -> Result<AlgebraElement, String> {
    let mut out = AlgebraElement::zero();
    for (a, g) in parse_lin(s)? {
        if let Some(g) = g {
            return Err(format!("unexpected generator '{g}' in algebra element"));
        }
        out.add_assign(&a);
    }
    Ok(out)
}

/// Parses `a1 g1 + a2 g2 + ...` into `(coefficient, generator)` pairs,
/// one per generator in order of first appearance.
pub fn parse_linear(s: &str) -> Result<Vec<(AlgebraElement, String)>, String> {
    let mut out: Vec<(AlgebraElement, String)> = Vec::new();
    for (a, g) in parse_lin(s)? {
        match g {
            Some(g) => match out.iter_mut().find(|(_, h)| *h == g) {
                Some((b, _)) => b.add_assign(&a),
                None => out.push((a, g)),
            },
            None if a.is_zero() => {}
            None => return Err(format!("term '{a}' has no generator")),
        }
    }
    Ok(out)
}

/// Splits `s` at top-level occurrences of `sep`, ignoring any inside parentheses.
pub fn split_top_level<'a>(s: &'a str, sep: &str) -> Vec<&'a str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let mut skip_to = 0;
    for (i, c) in s.char_indices() {
        if i < skip_to {
            continue;
        }
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if depth == 0 && s[i..].starts_with(sep) {
            out.push(&s[start..i]);
            start = i + sep.len();
            skip_to = start;
        }
    }
    out.push(&s[start..]);
    out
}
