//! Text form of polynomials: `3/2*x^2*y - z + 1`.
//!
//! Grammar: sums and differences of products of powers of atoms, where an atom is
//! an integer, a rational literal `n/m`, a variable name or a parenthesised
//! expression. Superscript-style coordinates `a^i_j[k]` / `d^i_j[k]` are accepted as
//! aliases of `aij_k` / `dij_k`, and `aji_k` is canonicalised to `aij_k`.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt::Write;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{Coeff, Polynomial, VarRegistry};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("unexpected character `{found}` at offset {pos}")]
    UnexpectedChar { pos: usize, found: char },
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unknown variable `{name}` at offset {pos}")]
    UnknownVariable { pos: usize, name: String },
    #[error("invalid exponent at offset {pos}")]
    BadExponent { pos: usize },
    #[error("zero denominator at offset {pos}")]
    ZeroDenominator { pos: usize },
}

pub fn parse(text: &str, reg: &Arc<VarRegistry>) -> Result<Polynomial, ParseError> {
    let mut p = Parser { s: text.as_bytes(), pos: 0, reg };
    let out = p.expr()?;
    p.skip_ws();
    match p.peek() {
        None => Ok(out),
        Some(c) => Err(ParseError::UnexpectedChar { pos: p.pos, found: c as char }),
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    reg: &'a Arc<VarRegistry>,
}

fn ident_start(c: u8) -> bool {
    c.is_ascii_alphabetic() || c == b'_'
}

fn ident_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, b'_' | b'[' | b']' | b'\'')
}

impl Parser<'_> {
    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn expr(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.unary()?;
        loop {
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.pos += 1;
                acc = &acc * &self.unary()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Polynomial, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial, ParseError> {
        let base = self.atom()?;
        self.skip_ws();
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        self.skip_ws();
        let at = self.pos;
        let digits = self.digits();
        if digits.is_empty() {
            return Err(ParseError::BadExponent { pos: at });
        }
        let e: u32 = digits.parse().map_err(|_| ParseError::BadExponent { pos: at })?;
        if e > u16::MAX as u32 {
            return Err(ParseError::BadExponent { pos: at });
        }
        Ok(base.pow(e))
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.s[start..self.pos]).into_owned()
    }

    fn atom(&mut self) -> Result<Polynomial, ParseError> {
        self.skip_ws();
        let Some(c) = self.peek() else { return Err(ParseError::UnexpectedEnd) };
        if c.is_ascii_digit() {
            let num: BigInt = self.digits().parse().expect("digit run");
            let save = self.pos;
            self.skip_ws();
            if self.peek() == Some(b'/') {
                self.pos += 1;
                self.skip_ws();
                let at = self.pos;
                let den = self.digits();
                if den.is_empty() {
                    return Err(match self.peek() {
                        Some(c) => ParseError::UnexpectedChar { pos: self.pos, found: c as char },
                        None => ParseError::UnexpectedEnd,
                    });
                }
                let den: BigInt = den.parse().expect("digit run");
                if den.is_zero() {
                    return Err(ParseError::ZeroDenominator { pos: at });
                }
                return Ok(Polynomial::constant(self.reg, Coeff::new(num, den)));
            }
            self.pos = save;
            return Ok(Polynomial::constant(self.reg, Coeff::from_integer(num)));
        }
        if c == b'(' {
            self.pos += 1;
            let inner = self.expr()?;
            self.skip_ws();
            return match self.peek() {
                Some(b')') => {
                    self.pos += 1;
                    Ok(inner)
                }
                Some(c) => Err(ParseError::UnexpectedChar { pos: self.pos, found: c as char }),
                None => Err(ParseError::UnexpectedEnd),
            };
        }
        if ident_start(c) {
            return self.name();
        }
        Err(ParseError::UnexpectedChar { pos: self.pos, found: c as char })
    }

    fn name(&mut self) -> Result<Polynomial, ParseError> {
        let start = self.pos;
        if let Some((len, canon)) = superscript_coordinate(&self.s[start..]) {
            if let Some(i) = self.reg.index_of(&canon) {
                self.pos += len;
                return Ok(Polynomial::var_at(self.reg, i));
            }
        }
        let mut end = start;
        while end < self.s.len() && ident_char(self.s[end]) {
            end += 1;
        }
        let word = core::str::from_utf8(&self.s[start..end]).expect("ascii identifier");
        let resolved = self
            .reg
            .index_of(word)
            .or_else(|| canonical_coordinate(word).and_then(|c| self.reg.index_of(&c)));
        if let Some(i) = resolved {
            self.pos = end;
            return Ok(Polynomial::var_at(self.reg, i));
        }
        Err(ParseError::UnknownVariable { pos: start, name: word.to_string() })
    }
}

/// `a^i_j[k]` or `a^i_j` (likewise `d`) at the start of `s`: consumed length and
/// the canonical ASCII name.
fn superscript_coordinate(s: &[u8]) -> Option<(usize, String)> {
    if s.len() < 5 || !matches!(s[0], b'a' | b'd') || s[1] != b'^' || s[3] != b'_' {
        return None;
    }
    let (i, j) = (s[2], s[4]);
    if !i.is_ascii_digit() || !j.is_ascii_digit() {
        return None;
    }
    let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
    let mut name = String::new();
    name.push(s[0] as char);
    name.push(lo as char);
    name.push(hi as char);
    if s.get(5) == Some(&b'[') {
        let mut k = 6;
        while k < s.len() && s[k].is_ascii_digit() {
            k += 1;
        }
        if k > 6 && s.get(k) == Some(&b']') {
            name.push('_');
            name.push_str(core::str::from_utf8(&s[6..k]).ok()?);
            return Some((k + 1, name));
        }
        return None;
    }
    Some((5, name))
}

/// `a31_2` → `a13_2`: symmetric-matrix coordinates with swapped indices.
fn canonical_coordinate(name: &str) -> Option<String> {
    let b = name.as_bytes();
    if b.len() < 3 || !matches!(b[0], b'a' | b'd') {
        return None;
    }
    let (i, j) = (b[1], b[2]);
    if !i.is_ascii_digit() || !j.is_ascii_digit() || i <= j {
        return None;
    }
    if b.len() > 3 && b[3] != b'_' {
        return None;
    }
    let mut out = String::new();
    out.push(b[0] as char);
    out.push(j as char);
    out.push(i as char);
    out.push_str(&name[3..]);
    Some(out)
}

fn write_coeff(out: &mut String, c: &Coeff) {
    if c.is_integer() {
        let _ = write!(out, "{}", c.numer());
    } else {
        let _ = write!(out, "{}/{}", c.numer(), c.denom());
    }
}

/// Canonical text: descending grevlex terms, `*` between factors.
pub fn print(p: &Polynomial) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let reg = p.registry();
    let mut out = String::new();
    for (idx, (m, c)) in p.terms().enumerate() {
        let neg = c.is_negative();
        let abs = c.abs();
        match (idx, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let mut factors: Vec<String> = Vec::new();
        for (i, &e) in m.exps().iter().enumerate() {
            match e {
                0 => {}
                1 => factors.push(reg.name(i).to_string()),
                _ => factors.push(alloc::format!("{}^{}", reg.name(i), e)),
            }
        }
        if factors.is_empty() || !abs.is_one() {
            write_coeff(&mut out, &abs);
            if !factors.is_empty() {
                out.push('*');
            }
        }
        out.push_str(&factors.join("*"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::q;

    fn reg() -> Arc<VarRegistry> {
        VarRegistry::new(["a11_3", "a13_3", "d13_4", "l2", "m3", "P4", "x", "xy"]).unwrap()
    }

    #[test]
    fn prints_canonically() {
        let r = VarRegistry::new(["x", "y", "z"]).unwrap();
        let f = parse("1 - z + 3/2*y*x^2", &r).unwrap();
        assert_eq!(print(&f), "3/2*x^2*y - z + 1");
        assert_eq!(print(&Polynomial::zero(&r)), "0");
        assert_eq!(print(&parse("-x - 1/3", &r).unwrap()), "-x - 1/3");
    }

    #[test]
    fn superscript_aliases() {
        let r = reg();
        let a = parse("a^1_3[3] - a^3_1[3] + a31_3", &r).unwrap();
        assert_eq!(a, parse("a13_3", &r).unwrap());
        let d = parse("l2*m3*d^1_3[4]", &r).unwrap();
        assert_eq!(print(&d), "d13_4*l2*m3");
    }

    #[test]
    fn whole_identifier_is_matched() {
        let r = reg();
        let f = parse("xy", &r).unwrap();
        assert_eq!(f.as_variable(), r.index_of("xy"));
        assert!(matches!(parse("xyz", &r), Err(ParseError::UnknownVariable { pos: 0, .. })));
    }

    #[test]
    fn errors_carry_positions() {
        let r = reg();
        assert_eq!(
            parse("x + zz", &r),
            Err(ParseError::UnknownVariable { pos: 4, name: "zz".into() })
        );
        assert_eq!(parse("x +", &r), Err(ParseError::UnexpectedEnd));
        assert_eq!(parse("x ^ y", &r), Err(ParseError::BadExponent { pos: 4 }));
        assert_eq!(parse("1/0", &r), Err(ParseError::ZeroDenominator { pos: 2 }));
        assert!(matches!(parse("(x", &r), Err(ParseError::UnexpectedEnd)));
        assert!(matches!(parse("x $", &r), Err(ParseError::UnexpectedChar { pos: 2, .. })));
    }

    #[test]
    fn rational_literal_and_powers() {
        let r = reg();
        let f = parse("(x + 1)^2 * 2/4", &r).unwrap();
        assert_eq!(f, parse("1/2*x^2 + x + 1/2", &r).unwrap());
        assert_eq!(parse("-(-3)", &r).unwrap(), Polynomial::constant(&r, q(3)));
    }
}
