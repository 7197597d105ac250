//! Textual operator language.
//!
//! ```text
//! matrix := '[' row (',' row)* ']'
//! row    := '[' expr (',' expr)* ']'
//! expr   := ('+' | '-')? term (('+' | '-') term)*
//! term   := INT factor* | factor+
//! factor := 'd'k | 'ds'k | 'Phi'k | 'PhiMu'k | 'M'k | 'Mt'k | 'I'
//! ```
//!
//! Juxtaposition is composition, the rightmost factor acting first. `0` is
//! the integer zero, so it parses as the zero operator.

use super::block::BlockMatrix;
use super::expr::Expr;
use super::generator::{word_type, Gen, Word};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Gen(Gen),
    Id,
    Int(i64),
    Plus,
    Minus,
    Open,
    Close,
    Comma,
}

fn lex(text: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = toks.len();
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '[' => Some(Tok::Open),
            ']' => Some(Tok::Close),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(t) = single {
            toks.push(t);
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let v = s.parse().map_err(|_| Error::Parse { position: pos, message: format!("integer {s} out of range") })?;
            toks.push(Tok::Int(v));
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphabetic() {
                i += 1;
            }
            let name: String = chars[start..i].iter().collect();
            let dstart = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[dstart..i].iter().collect();
            if name == "I" && digits.is_empty() {
                toks.push(Tok::Id);
                continue;
            }
            let k: usize = digits
                .parse()
                .map_err(|_| Error::Parse { position: pos, message: format!("`{name}` needs a numeric subscript") })?;
            let g = match name.as_str() {
                "d" => Gen::D(k),
                "ds" => Gen::Ds(k),
                "Phi" => Gen::Phi(k),
                "PhiMu" => Gen::PhiMu(k),
                "M" => Gen::M(k),
                "Mt" => Gen::Mt(k),
                _ => return Err(Error::Parse { position: pos, message: format!("unknown symbol `{name}{digits}`") }),
            };
            let g = g.checked().map_err(|e| Error::Parse { position: pos, message: e.to_string() })?;
            toks.push(Tok::Gen(g));
            continue;
        }
        return Err(Error::Parse { position: pos, message: format!("unexpected character `{c}`") });
    }
    Ok(toks)
}

/// Parsed but not yet typed expression: `(coefficient, word)` pairs.
type RawExpr = Vec<(i64, Word)>;

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse { position: self.pos, message: message.into() })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn expr(&mut self) -> Result<RawExpr> {
        let mut out = Vec::new();
        let mut sign = match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                -1
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                1
            }
            _ => 1,
        };
        loop {
            let (c, w) = self.term()?;
            out.push((sign * c, w));
            sign = match self.peek() {
                Some(Tok::Plus) => 1,
                Some(Tok::Minus) => -1,
                _ => return Ok(out),
            };
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<(i64, Word)> {
        let mut coeff = 1;
        let mut any = false;
        if let Some(Tok::Int(v)) = self.peek() {
            coeff = *v;
            self.pos += 1;
            any = true;
        }
        let mut word = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::Gen(g)) => {
                    word.push(*g);
                    self.pos += 1;
                }
                Some(Tok::Id) => self.pos += 1,
                _ => break,
            }
            any = true;
        }
        if !any {
            return self.err("expected a term");
        }
        Ok((coeff, word))
    }

    fn matrix(&mut self) -> Result<Vec<Vec<RawExpr>>> {
        self.expect(Tok::Open, "`[`")?;
        let mut rows = Vec::new();
        loop {
            self.expect(Tok::Open, "`[` opening a row")?;
            let mut row = vec![self.expr()?];
            while self.peek() == Some(&Tok::Comma) {
                self.pos += 1;
                row.push(self.expr()?);
            }
            self.expect(Tok::Close, "`]` closing a row")?;
            rows.push(row);
            match self.peek() {
                Some(Tok::Comma) => self.pos += 1,
                _ => break,
            }
        }
        self.expect(Tok::Close, "`]` closing the matrix")?;
        Ok(rows)
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.toks.len() {
            return self.err("unexpected trailing input");
        }
        Ok(())
    }
}

/// Degree signature of the typed words of `raw`, if any.
fn infer(raw: &RawExpr) -> Result<Option<(usize, usize)>> {
    let mut ty = None;
    for (_, w) in raw {
        if let Some(t) = word_type(w)? {
            match ty {
                None => ty = Some(t),
                Some(prev) if prev != t => {
                    return Err(Error::IllTyped(format!("terms map {}→{} and {}→{}", prev.0, prev.1, t.0, t.1)));
                }
                _ => {}
            }
        }
    }
    Ok(ty)
}

fn build(raw: RawExpr, source: usize, target: usize) -> Result<Expr> {
    let has_identity = raw.iter().any(|(c, w)| w.is_empty() && *c != 0);
    if has_identity && source != target {
        return Err(Error::IllTyped(format!("identity term in a {source}→{target} expression")));
    }
    Expr::from_terms(source, target, raw.into_iter().filter(|(c, _)| *c != 0).map(|(c, w)| (w, c)))
}

/// Parses an expression. `hint` gives `(source, target)` when the text
/// contains no generator (for instance `I` or `0`).
pub fn parse_expr(text: &str, hint: Option<(usize, usize)>) -> Result<Expr> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let raw = p.expr()?;
    p.finish()?;
    let (s, t) = match (infer(&raw)?, hint) {
        (Some(t), Some(h)) if t != h => {
            return Err(Error::IllTyped(format!("expression maps {}→{}, expected {}→{}", t.0, t.1, h.0, h.1)))
        }
        (Some(t), _) | (None, Some(t)) => t,
        (None, None) => return Err(Error::Parse { position: 0, message: "cannot infer the degree of a scalar expression".into() }),
    };
    build(raw, s, t)
}

/// Parses a bracketed block matrix. Degrees come from the typed entries;
/// `hint` supplies `(row_deg, col_deg)` where entries leave them open.
pub fn parse_matrix(text: &str, hint: Option<(&[usize], &[usize])>) -> Result<BlockMatrix> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let rows = p.matrix()?;
    p.finish()?;
    let ncols = rows[0].len();
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Parse { position: 0, message: "rows have different lengths".into() });
    }
    let mut row_deg: Vec<Option<usize>> = vec![None; rows.len()];
    let mut col_deg: Vec<Option<usize>> = vec![None; ncols];
    if let Some((r, c)) = hint {
        if r.len() != rows.len() || c.len() != ncols {
            return Err(Error::IllTyped("degree hint does not match the matrix shape".into()));
        }
        row_deg = r.iter().map(|&d| Some(d)).collect();
        col_deg = c.iter().map(|&d| Some(d)).collect();
    }
    let unify = |slot: &mut Option<usize>, d: usize, what: String| -> Result<()> {
        match *slot {
            Some(prev) if prev != d => Err(Error::IllTyped(format!("{what} has degree {prev} and {d}"))),
            _ => {
                *slot = Some(d);
                Ok(())
            }
        }
    };
    for (i, row) in rows.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            if let Some((s, t)) = infer(e)? {
                unify(&mut col_deg[j], s, format!("column {j}"))?;
                unify(&mut row_deg[i], t, format!("row {i}"))?;
            }
        }
    }
    // identity entries tie a row degree to a column degree
    for _ in 0..rows.len() + ncols {
        for (i, row) in rows.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if e.iter().any(|(c, w)| w.is_empty() && *c != 0) {
                    match (row_deg[i], col_deg[j]) {
                        (Some(r), None) => col_deg[j] = Some(r),
                        (None, Some(c)) => row_deg[i] = Some(c),
                        _ => {}
                    }
                }
            }
        }
    }
    let row_deg: Vec<usize> = row_deg
        .into_iter()
        .enumerate()
        .map(|(i, d)| d.ok_or_else(|| Error::IllTyped(format!("cannot infer the degree of row {i}"))))
        .collect::<Result<_>>()?;
    let col_deg: Vec<usize> = col_deg
        .into_iter()
        .enumerate()
        .map(|(j, d)| d.ok_or_else(|| Error::IllTyped(format!("cannot infer the degree of column {j}"))))
        .collect::<Result<_>>()?;
    let entries = rows
        .into_iter()
        .enumerate()
        .map(|(i, row)| row.into_iter().enumerate().map(|(j, e)| build(e, col_deg[j], row_deg[i])).collect())
        .collect::<Result<Vec<Vec<Expr>>>>()?;
    BlockMatrix::from_entries(row_deg, col_deg, entries)
}
