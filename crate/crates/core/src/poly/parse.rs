use num_bigint::BigInt;

use super::SparsePoly;

/// Parse failure with the byte offset where it was detected.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at position {pos}: {message}")]
pub struct SyntaxError {
    pub pos: usize,
    pub message: String,
}

/// Parses a polynomial in `x1..xN`; `N` is the largest index that appears.
///
/// Grammar: integers, variables `x<k>`, `+ - * ^`, parentheses; `^` takes a
/// nonnegative integer exponent.
pub fn parse_poly(text: &str) -> Result<SparsePoly, SyntaxError> {
    let n = max_var(text)?;
    parse_poly_in(text, n)
}

/// Parses into exactly `nvars` variables.
pub fn parse_poly_in(text: &str, nvars: usize) -> Result<SparsePoly, SyntaxError> {
    let n = max_var(text)?;
    if n > nvars {
        return Err(SyntaxError {
            pos: 0,
            message: format!("variable x{n} exceeds the declared {nvars} variables"),
        });
    }
    let mut p = Parser {
        s: text.as_bytes(),
        pos: 0,
        nvars,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.s.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

fn max_var(text: &str) -> Result<usize, SyntaxError> {
    let b = text.as_bytes();
    let mut n = 0;
    let mut i = 0;
    while i < b.len() {
        if b[i] == b'x' {
            let start = i + 1;
            let mut j = start;
            while j < b.len() && b[j].is_ascii_digit() {
                j += 1;
            }
            if j == start {
                return Err(SyntaxError {
                    pos: i,
                    message: "expected variable index after 'x'".into(),
                });
            }
            let k: usize = text[start..j].parse().map_err(|_| SyntaxError {
                pos: start,
                message: "variable index too large".into(),
            })?;
            if k == 0 {
                return Err(SyntaxError {
                    pos: start,
                    message: "variables are numbered from x1".into(),
                });
            }
            n = n.max(k);
            i = j;
        } else {
            i += 1;
        }
    }
    Ok(n)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    nvars: usize,
}

impl Parser<'_> {
    fn err(&self, m: &str) -> SyntaxError {
        SyntaxError {
            pos: self.pos,
            message: m.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<SparsePoly, SyntaxError> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                b'-' => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<SparsePoly, SyntaxError> {
        let mut acc = self.unary()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<SparsePoly, SyntaxError> {
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

    fn power(&mut self) -> Result<SparsePoly, SyntaxError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let k = self.integer()?;
            let k: u32 = k
                .try_into()
                .map_err(|_| self.err("exponent must be a small nonnegative integer"))?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt, SyntaxError> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        let txt = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii digits");
        Ok(txt.parse().expect("digits parse"))
    }

    fn atom(&mut self) -> Result<SparsePoly, SyntaxError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'x') => {
                self.pos += 1;
                let k = self.integer()?;
                let k: usize = k.try_into().expect("checked by max_var");
                Ok(SparsePoly::var(self.nvars, k - 1))
            }
            Some(c) if c.is_ascii_digit() => {
                let v = self.integer()?;
                Ok(SparsePoly::constant(self.nvars, v))
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}
