//! Text formats: word expressions and the presentation grammar.
//!
//! ```text
//! generators: a, a1, a2
//! order(a)=5
//! a^5 = a2
//! [a1,a] = a2
//! # comment
//! ```
//!
//! The one-line form `a, b | [b,a] = 1, a^5 = 1, b^5 = 1` is accepted too.
//! Exponents may be integers or braced arithmetic over named symbols,
//! e.g. `a^{p^2}` or `b2^{-r/4}`; fractions are resolved modulo the
//! relative order of the generator they apply to.

use std::collections::BTreeMap;

use super::{PcPresentation, Word};
use crate::error::{Error, Result};

/// Named integer constants usable inside exponents (`p`, `nu`, `zeta`, ...).
pub type Symbols = BTreeMap<String, i64>;

/// Abstract word over named generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Identity,
    Gen(String),
    /// Generator by position, used once names have been resolved.
    Index(usize),
    Mul(Vec<Expr>),
    Pow(Box<Expr>, i64),
    Conj(Box<Expr>, Box<Expr>),
    /// Left-normed commutator `[x1, x2, ..., xk]`.
    Comm(Vec<Expr>),
}

impl Expr {
    pub fn gen(i: usize) -> Expr {
        Expr::Index(i)
    }

    pub fn mul(parts: Vec<Expr>) -> Expr {
        Expr::Mul(parts)
    }

    pub fn pow(self, n: i64) -> Expr {
        Expr::Pow(Box::new(self), n)
    }

    pub fn inv(self) -> Expr {
        self.pow(-1)
    }

    pub fn conj(self, by: Expr) -> Expr {
        Expr::Conj(Box::new(self), Box::new(by))
    }

    pub fn comm(a: Expr, b: Expr) -> Expr {
        Expr::Comm(vec![a, b])
    }

    /// Replaces generator names by positions according to `names`.
    pub fn resolve(&self, names: &[String]) -> Result<Expr> {
        Ok(match self {
            Expr::Gen(n) => Expr::Index(
                names
                    .iter()
                    .position(|m| m == n)
                    .ok_or_else(|| Error::UnknownGenerator(n.clone()))?,
            ),
            Expr::Identity | Expr::Index(_) => self.clone(),
            Expr::Mul(v) => Expr::Mul(v.iter().map(|e| e.resolve(names)).collect::<Result<_>>()?),
            Expr::Pow(b, n) => Expr::Pow(Box::new(b.resolve(names)?), *n),
            Expr::Conj(a, b) => Expr::Conj(Box::new(a.resolve(names)?), Box::new(b.resolve(names)?)),
            Expr::Comm(v) => Expr::Comm(v.iter().map(|e| e.resolve(names)).collect::<Result<_>>()?),
        })
    }

    /// Renders the expression with `names` for positional generators.
    pub fn render(&self, names: &[String]) -> String {
        match self {
            Expr::Identity => "1".into(),
            Expr::Gen(n) => n.clone(),
            Expr::Index(i) => names.get(*i).cloned().unwrap_or_else(|| format!("x{i}")),
            Expr::Mul(v) => {
                if v.is_empty() {
                    "1".into()
                } else {
                    v.iter().map(|e| e.render_atom(names)).collect::<Vec<_>>().join("*")
                }
            }
            Expr::Pow(b, n) => {
                if *n < 0 {
                    format!("{}^{{{}}}", b.render_atom(names), n)
                } else {
                    format!("{}^{}", b.render_atom(names), n)
                }
            }
            Expr::Conj(a, b) => format!("{}^{}", a.render_atom(names), b.render_atom(names)),
            Expr::Comm(v) => {
                format!("[{}]", v.iter().map(|e| e.render(names)).collect::<Vec<_>>().join(","))
            }
        }
    }

    fn render_atom(&self, names: &[String]) -> String {
        match self {
            Expr::Mul(v) if v.len() > 1 => format!("({})", self.render(names)),
            Expr::Pow(..) | Expr::Conj(..) => format!("({})", self.render(names)),
            _ => self.render(names),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    Ident(String),
    Num(i128),
    Sym(char),
}

#[derive(Clone, Debug)]
struct Tok {
    kind: Kind,
    line: usize,
    col: usize,
}

fn err<T>(line: usize, col: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, col, msg: msg.into() })
}

fn tokenize(s: &str, line: usize, col0: usize) -> Result<Vec<Tok>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = col0 + i;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let st = i;
            while i < chars.len()
                && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
            {
                i += 1;
            }
            out.push(Tok { kind: Kind::Ident(chars[st..i].iter().collect()), line, col });
        } else if c.is_ascii_digit() {
            let st = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[st..i].iter().collect();
            let v = text.parse::<i128>().or_else(|_| err(line, col, "number too large"))?;
            out.push(Tok { kind: Kind::Num(v), line, col });
        } else if "^*[](){},=-+/|:".contains(c) {
            out.push(Tok { kind: Kind::Sym(c), line, col });
            i += 1;
        } else {
            return err(line, col, format!("unexpected character `{c}`"));
        }
    }
    Ok(out)
}

/// Exact rational used while evaluating exponent arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Ratio {
    num: i128,
    den: i128,
}

impl Ratio {
    fn int(n: i128) -> Ratio {
        Ratio { num: n, den: 1 }
    }

    fn norm(num: i128, den: i128) -> Ratio {
        let g = gcd(num.abs(), den.abs()).max(1);
        let s = if den < 0 { -1 } else { 1 };
        Ratio { num: s * num / g, den: s * den / g }
    }

    /// Value in `Z / m` (the denominator must be a unit).
    fn modulo(self, m: u32) -> Option<u32> {
        let m = m as i128;
        let inv = mod_inverse(self.den.rem_euclid(m), m)?;
        Some((self.num.rem_euclid(m) * inv).rem_euclid(m) as u32)
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn mod_inverse(a: i128, m: i128) -> Option<i128> {
    if m == 1 {
        return Some(0);
    }
    let (mut r0, mut r1) = (a, m);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(m))
}

struct Cursor<'a> {
    toks: &'a [Tok],
    pos: usize,
    end_line: usize,
    end_col: usize,
    symbols: &'a Symbols,
}

impl<'a> Cursor<'a> {
    fn new(toks: &'a [Tok], end_line: usize, end_col: usize, symbols: &'a Symbols) -> Self {
        Cursor { toks, pos: 0, end_line, end_col, symbols }
    }

    fn peek(&self) -> Option<&Kind> {
        self.toks.get(self.pos).map(|t| &t.kind)
    }

    fn at(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map_or((self.end_line, self.end_col), |t| (t.line, t.col))
    }

    fn is(&self, c: char) -> bool {
        self.peek() == Some(&Kind::Sym(c))
    }

    fn eat(&mut self, c: char) -> bool {
        if self.is(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            let (l, col) = self.at();
            err(l, col, format!("expected `{c}`"))
        }
    }

    fn done(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn finish(&self) -> Result<()> {
        if self.done() {
            Ok(())
        } else {
            let (l, c) = self.at();
            err(l, c, "unexpected trailing input")
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek().cloned() {
            Some(Kind::Ident(s)) => {
                self.pos += 1;
                Ok(s)
            }
            _ => {
                let (l, c) = self.at();
                err(l, c, "expected a generator name")
            }
        }
    }

    // arith := sum; sum := prod (('+'|'-') prod)*; prod := unary (('*'|'/') unary)*;
    // unary := '-' unary | power; power := primary ('^' unary)?
    fn arith(&mut self) -> Result<Ratio> {
        let mut acc = self.arith_prod()?;
        loop {
            if self.eat('+') {
                let r = self.arith_prod()?;
                acc = Ratio::norm(acc.num * r.den + r.num * acc.den, acc.den * r.den);
            } else if self.eat('-') {
                let r = self.arith_prod()?;
                acc = Ratio::norm(acc.num * r.den - r.num * acc.den, acc.den * r.den);
            } else {
                return Ok(acc);
            }
        }
    }

    fn arith_prod(&mut self) -> Result<Ratio> {
        let mut acc = self.arith_unary()?;
        loop {
            if self.eat('*') {
                let r = self.arith_unary()?;
                acc = Ratio::norm(acc.num * r.num, acc.den * r.den);
            } else if self.is('/') {
                let (l, c) = self.at();
                self.pos += 1;
                let r = self.arith_unary()?;
                if r.num == 0 {
                    return err(l, c, "division by zero");
                }
                acc = Ratio::norm(acc.num * r.den, acc.den * r.num);
            } else {
                return Ok(acc);
            }
        }
    }

    fn arith_unary(&mut self) -> Result<Ratio> {
        if self.eat('-') {
            let r = self.arith_unary()?;
            return Ok(Ratio { num: -r.num, den: r.den });
        }
        let base = self.arith_primary()?;
        if self.is('^') {
            let (l, c) = self.at();
            self.pos += 1;
            let e = self.arith_unary()?;
            if e.den != 1 || e.num < 0 || e.num > 64 {
                return err(l, c, "exponent in arithmetic must be a small non-negative integer");
            }
            let mut acc = Ratio::int(1);
            for _ in 0..e.num {
                acc = Ratio::norm(
                    acc.num.checked_mul(base.num).ok_or(overflow(l, c))?,
                    acc.den.checked_mul(base.den).ok_or(overflow(l, c))?,
                );
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn arith_primary(&mut self) -> Result<Ratio> {
        let (l, c) = self.at();
        match self.peek().cloned() {
            Some(Kind::Num(v)) => {
                self.pos += 1;
                Ok(Ratio::int(v))
            }
            Some(Kind::Ident(s)) if s == "gcd" && !self.symbols.contains_key(&s) => {
                self.pos += 1;
                self.expect('(')?;
                let a = self.arith()?;
                self.expect(',')?;
                let b = self.arith()?;
                self.expect(')')?;
                if a.den != 1 || b.den != 1 {
                    return err(l, c, "gcd of non-integers");
                }
                Ok(Ratio::int(gcd(a.num.abs(), b.num.abs())))
            }
            Some(Kind::Ident(s)) => match self.symbols.get(&s) {
                Some(&v) => {
                    self.pos += 1;
                    Ok(Ratio::int(v as i128))
                }
                None => err(l, c, format!("unknown symbol `{s}`")),
            },
            Some(Kind::Sym('(')) | Some(Kind::Sym('{')) => {
                let close = if self.is('(') { ')' } else { '}' };
                self.pos += 1;
                let r = self.arith()?;
                self.expect(close)?;
                Ok(r)
            }
            _ => err(l, c, "expected a number"),
        }
    }

    fn integer_exponent(&mut self) -> Result<i64> {
        let (l, c) = self.at();
        let r = match self.peek().cloned() {
            Some(Kind::Sym('-')) => {
                self.pos += 1;
                let r = self.exponent_atom()?;
                Ratio { num: -r.num, den: r.den }
            }
            _ => self.exponent_atom()?,
        };
        if r.den != 1 {
            return err(l, c, "power of a word must be an integer");
        }
        i64::try_from(r.num).or_else(|_| err(l, c, "exponent too large"))
    }

    fn exponent_atom(&mut self) -> Result<Ratio> {
        let (l, c) = self.at();
        match self.peek().cloned() {
            Some(Kind::Num(v)) => {
                self.pos += 1;
                Ok(Ratio::int(v))
            }
            Some(Kind::Ident(s)) if self.symbols.contains_key(&s) => {
                self.pos += 1;
                Ok(Ratio::int(self.symbols[&s] as i128))
            }
            Some(Kind::Sym('{')) | Some(Kind::Sym('(')) => self.arith_primary(),
            _ => err(l, c, "expected an exponent"),
        }
    }

    // expr := term ('*' term)*
    fn expr(&mut self) -> Result<Expr> {
        let mut parts = vec![self.term()?];
        while self.eat('*') {
            parts.push(self.term()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Expr::Mul(parts) })
    }

    fn term(&mut self) -> Result<Expr> {
        let mut base = self.atom()?;
        while self.eat('^') {
            match self.peek().cloned() {
                Some(Kind::Ident(s)) if !self.symbols.contains_key(&s) => {
                    self.pos += 1;
                    base = base.conj(Expr::Gen(s));
                }
                Some(Kind::Sym('[')) => {
                    let by = self.atom()?;
                    base = base.conj(by);
                }
                _ => {
                    let n = self.integer_exponent()?;
                    base = base.pow(n);
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let (l, c) = self.at();
        match self.peek().cloned() {
            Some(Kind::Ident(s)) => {
                self.pos += 1;
                Ok(Expr::Gen(s))
            }
            Some(Kind::Num(1)) => {
                self.pos += 1;
                Ok(Expr::Identity)
            }
            Some(Kind::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Kind::Sym('[')) => {
                self.pos += 1;
                let mut parts = vec![self.expr()?];
                while self.eat(',') {
                    parts.push(self.expr()?);
                }
                self.expect(']')?;
                if parts.len() < 2 {
                    return err(l, c, "a commutator needs at least two entries");
                }
                Ok(Expr::Comm(parts))
            }
            _ => err(l, c, "expected a generator, `1`, `(` or `[`"),
        }
    }
}

fn overflow(line: usize, col: usize) -> Error {
    Error::Parse { line, col, msg: "arithmetic overflow".into() }
}

/// Parses a word expression such as `[a1,a]^2 * a^{-1}`.
pub fn parse_expr(text: &str, symbols: &Symbols) -> Result<Expr> {
    let toks = tokenize(text, 1, 1)?;
    let mut cur = Cursor::new(&toks, 1, text.chars().count() + 1, symbols);
    if cur.done() {
        return err(1, 1, "empty expression");
    }
    let e = cur.expr()?;
    cur.finish()?;
    Ok(e)
}

/// Evaluates integer arithmetic such as `(p-1)/2` or `gcd(p-1,3)`.
pub fn eval_integer(text: &str, symbols: &Symbols) -> Result<i64> {
    let toks = tokenize(text, 1, 1)?;
    let mut cur = Cursor::new(&toks, 1, text.chars().count() + 1, symbols);
    let r = cur.arith()?;
    cur.finish()?;
    if r.den != 1 {
        return err(1, 1, format!("`{text}` is not an integer"));
    }
    i64::try_from(r.num).or_else(|_| err(1, 1, "value too large"))
}

pub fn parse_pc_presentation(text: &str) -> Result<PcPresentation> {
    parse_pc_presentation_with(text, &Symbols::new())
}

/// A statement of the presentation body, with its source position.
struct Statement {
    toks: Vec<Tok>,
    line: usize,
    end_col: usize,
}

enum Lhs {
    Order(usize),
    Power(usize, u32),
    Comm(usize, usize),
}

struct RhsFactor {
    gen: usize,
    exp: Ratio,
    line: usize,
    col: usize,
}

/// Splits the source into the generator list and body statements.
fn split_source(text: &str) -> Result<(Vec<(String, usize, usize)>, Vec<Statement>)> {
    let mut gens = None;
    let mut body = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let trimmed = content.trim_start();
        let indent = content.len() - trimmed.len();
        if let Some(rest) = strip_key(trimmed, &["generators", "gens"]) {
            if gens.is_some() {
                return err(line, indent + 1, "generators declared twice");
            }
            let offset = indent + (trimmed.len() - rest.len()) + 1;
            gens = Some(parse_name_list(rest, line, offset)?);
            continue;
        }
        if strip_key(trimmed, &["name", "family", "relations"]).is_some() {
            continue;
        }
        if gens.is_none() && content.contains('|') {
            let bar = content.find('|').unwrap();
            gens = Some(parse_name_list(&content[..bar], line, 1)?);
            body.extend(split_commas(&content[bar + 1..], line, bar + 2)?);
            continue;
        }
        let toks = tokenize(content, line, 1)?;
        body.push(Statement { toks, line, end_col: content.chars().count() + 1 });
    }
    match gens {
        Some(g) => Ok((g, body)),
        None => err(1, 1, "missing `generators:` header"),
    }
}

fn strip_key<'a>(s: &'a str, keys: &[&str]) -> Option<&'a str> {
    for k in keys {
        if let Some(rest) = s.strip_prefix(k) {
            if let Some(rest) = rest.trim_start().strip_prefix(':') {
                return Some(rest);
            }
        }
    }
    None
}

fn parse_name_list(s: &str, line: usize, col0: usize) -> Result<Vec<(String, usize, usize)>> {
    let toks = tokenize(s, line, col0)?;
    let mut names = Vec::new();
    let mut expect_name = true;
    for t in &toks {
        match (&t.kind, expect_name) {
            (Kind::Ident(n), true) => {
                names.push((n.clone(), t.line, t.col));
                expect_name = false;
            }
            (Kind::Sym(','), false) => expect_name = true,
            _ => return err(t.line, t.col, "malformed generator list"),
        }
    }
    if expect_name && !names.is_empty() {
        return err(line, col0 + s.len(), "trailing comma in generator list");
    }
    Ok(names)
}

fn split_commas(s: &str, line: usize, col0: usize) -> Result<Vec<Statement>> {
    let toks = tokenize(s, line, col0)?;
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = Vec::new();
    for t in toks {
        match t.kind {
            Kind::Sym('[') | Kind::Sym('(') | Kind::Sym('{') => depth += 1,
            Kind::Sym(']') | Kind::Sym(')') | Kind::Sym('}') => depth -= 1,
            _ => {}
        }
        if t.kind == Kind::Sym(',') && depth == 0 {
            out.push(Statement { toks: std::mem::take(&mut cur), line, end_col: t.col });
        } else {
            cur.push(t);
        }
    }
    if !cur.is_empty() {
        out.push(Statement { toks: cur, line, end_col: col0 + s.chars().count() });
    }
    Ok(out)
}

/// Parses a presentation whose exponents may mention the given symbols.
pub fn parse_pc_presentation_with(text: &str, symbols: &Symbols) -> Result<PcPresentation> {
    let (gens, body) = split_source(text)?;
    let names: Vec<String> = gens.iter().map(|g| g.0.clone()).collect();
    for (k, (name, line, col)) in gens.iter().enumerate() {
        if names[..k].contains(name) {
            return err(*line, *col, format!("duplicate generator `{name}`"));
        }
        if symbols.contains_key(name) {
            return err(*line, *col, format!("generator `{name}` clashes with a symbol"));
        }
    }
    let n = names.len();
    let lookup = |name: &str, line: usize, col: usize| -> Result<usize> {
        names
            .iter()
            .position(|m| m == name)
            .ok_or(Error::Parse { line, col, msg: format!("unknown generator `{name}`") })
    };

    let mut orders: Vec<Option<(u32, usize, usize)>> = vec![None; n];
    let mut powers: Vec<Option<Vec<RhsFactor>>> = (0..n).map(|_| None).collect();
    let mut comms: BTreeMap<(usize, usize), Vec<RhsFactor>> = BTreeMap::new();

    for st in &body {
        let mut cur = Cursor::new(&st.toks, st.line, st.end_col, symbols);
        let (l0, c0) = cur.at();
        let lhs = if cur.is('[') {
            cur.pos += 1;
            let (lj, cj) = cur.at();
            let j = lookup(&cur.ident()?, lj, cj)?;
            cur.expect(',')?;
            let (li, ci) = cur.at();
            let i = lookup(&cur.ident()?, li, ci)?;
            cur.expect(']')?;
            if j == i {
                return err(l0, c0, "commutator of a generator with itself");
            }
            if j < i {
                return err(
                    l0,
                    c0,
                    format!("write the commutator as [{},{}] (later generator first)", names[i], names[j]),
                );
            }
            Lhs::Comm(j, i)
        } else {
            let (lg, cg) = cur.at();
            let name = cur.ident()?;
            if name == "order" && cur.is('(') {
                cur.pos += 1;
                let (lg, cg) = cur.at();
                let g = lookup(&cur.ident()?, lg, cg)?;
                cur.expect(')')?;
                Lhs::Order(g)
            } else {
                let g = lookup(&name, lg, cg)?;
                cur.expect('^')?;
                let (le, ce) = cur.at();
                let e = cur.exponent_atom()?;
                if e.den != 1 || e.num < 2 || e.num > u32::MAX as i128 {
                    return err(le, ce, "relative order < 2 or not an integer");
                }
                Lhs::Power(g, e.num as u32)
            }
        };
        cur.expect('=')?;
        match lhs {
            Lhs::Order(g) => {
                let (le, ce) = cur.at();
                let e = cur.arith()?;
                cur.finish()?;
                if e.den != 1 || e.num < 2 || e.num > u32::MAX as i128 {
                    return err(le, ce, "relative order < 2 or not an integer");
                }
                set_order(&mut orders[g], e.num as u32, le, ce, &names[g])?;
            }
            Lhs::Power(g, o) => {
                let rhs = parse_rhs(&mut cur, &lookup)?;
                set_order(&mut orders[g], o, l0, c0, &names[g])?;
                for f in &rhs {
                    if f.gen <= g {
                        return err(
                            f.line,
                            f.col,
                            format!(
                                "right-hand side of the power rule of {} mentions {}, which is not a later generator",
                                names[g], names[f.gen]
                            ),
                        );
                    }
                }
                if powers[g].replace(rhs).is_some() {
                    return err(l0, c0, format!("second power rule for {}", names[g]));
                }
            }
            Lhs::Comm(j, i) => {
                let rhs = parse_rhs(&mut cur, &lookup)?;
                for f in &rhs {
                    if f.gen <= j {
                        return err(
                            f.line,
                            f.col,
                            format!(
                                "right-hand side of [{},{}] mentions {}, which is not later than {}",
                                names[j], names[i], names[f.gen], names[j]
                            ),
                        );
                    }
                }
                if comms.insert((j, i), rhs).is_some() {
                    return err(l0, c0, format!("second rule for [{},{}]", names[j], names[i]));
                }
            }
        }
    }

    let mut ord = Vec::with_capacity(n);
    for (k, o) in orders.iter().enumerate() {
        match o {
            Some((v, _, _)) => ord.push(*v),
            None => {
                return err(gens[k].1, gens[k].2, format!("no relative order given for {}", names[k]))
            }
        }
    }
    // Right-hand sides are evaluated in the group on the later generators,
    // built from the bottom up, so negative and fractional exponents keep
    // their group meaning even when the base generator has a power rule.
    let mut pw: Vec<Word> = vec![Word::new(); n];
    let mut cm: Vec<Vec<Word>> = (0..n).map(|j| vec![Word::new(); j]).collect();
    for j in (0..n).rev() {
        let off = j + 1;
        let shift = |w: &Word| -> Word { w.iter().map(|&(g, e)| (g - off, e)).collect() };
        let tail = PcPresentation::from_parts(
            names[off..].to_vec(),
            ord[off..].to_vec(),
            pw[off..].iter().map(shift).collect(),
            (off..n).map(|a| (off..a).map(|b| shift(&cm[a][b])).collect()).collect(),
        )?;
        let eval = |rhs: &[RhsFactor]| -> Result<Word> {
            let mut x = tail.identity();
            for f in rhs {
                let base = tail.generator(f.gen - off);
                let o = tail.element_order(&base);
                let e = u32::try_from(o).ok().and_then(|o| f.exp.modulo(o)).ok_or(Error::Parse {
                    line: f.line,
                    col: f.col,
                    msg: format!("exponent denominator is not invertible modulo {o}"),
                })?;
                x = tail.mul(&x, &tail.pow(&base, e as i64));
            }
            Ok(x.to_word().into_iter().map(|(g, e)| (g + off, e)).collect())
        };
        if let Some(rhs) = &powers[j] {
            pw[j] = eval(rhs)?;
        }
        for i in 0..j {
            if let Some(rhs) = comms.get(&(j, i)) {
                cm[j][i] = eval(rhs)?;
            }
        }
    }
    let cm = cm
        .into_iter()
        .enumerate()
        .flat_map(|(j, row)| row.into_iter().enumerate().map(move |(i, w)| (j, i, w)))
        .filter(|(_, _, w)| !w.is_empty())
        .collect();
    PcPresentation::new(names, ord, pw, cm)
}

fn set_order(
    slot: &mut Option<(u32, usize, usize)>,
    o: u32,
    line: usize,
    col: usize,
    name: &str,
) -> Result<()> {
    match slot {
        Some((prev, _, _)) if *prev != o => {
            err(line, col, format!("conflicting relative orders {prev} and {o} for {name}"))
        }
        _ => {
            *slot = Some((o, line, col));
            Ok(())
        }
    }
}

fn parse_rhs(
    cur: &mut Cursor<'_>,
    lookup: &dyn Fn(&str, usize, usize) -> Result<usize>,
) -> Result<Vec<RhsFactor>> {
    let mut out = Vec::new();
    if cur.peek() == Some(&Kind::Num(1)) {
        cur.pos += 1;
        cur.finish()?;
        return Ok(out);
    }
    loop {
        let (l, c) = cur.at();
        let gen = lookup(&cur.ident()?, l, c)?;
        let exp = if cur.eat('^') {
            if cur.eat('-') {
                let r = cur.exponent_atom()?;
                Ratio { num: -r.num, den: r.den }
            } else {
                cur.exponent_atom()?
            }
        } else {
            Ratio::int(1)
        };
        out.push(RhsFactor { gen, exp, line: l, col: c });
        if !cur.eat('*') {
            break;
        }
    }
    cur.finish()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_line_cyclic() {
        let g = parse_pc_presentation("a | a^5=1").unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.order_exponent(), 1);
    }

    #[test]
    fn lower_index_rhs_is_rejected() {
        match parse_pc_presentation("a,b | [b,a]=a") {
            Err(Error::Parse { line: 1, col, msg }) => {
                assert_eq!(col, 13);
                assert!(msg.contains("not later"), "{msg}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_order_is_reported() {
        assert!(matches!(
            parse_pc_presentation("generators: a, b\norder(a)=5"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn order_below_two_is_rejected() {
        assert!(matches!(
            parse_pc_presentation("generators: a\norder(a)=1"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn syntax_error_has_position() {
        match parse_pc_presentation("generators: a, b\norder(a)=5\norder(b)=5\n[b,a] = = 1") {
            Err(Error::Parse { line, col, .. }) => assert_eq!((line, col), (4, 9)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn symbolic_exponents_reduce_modulo_the_order() {
        let mut sym = Symbols::new();
        sym.insert("p".into(), 5);
        let g = parse_pc_presentation_with(
            "generators: a, b\na^p = b^{-1/4}\norder(b)=p",
            &sym,
        )
        .unwrap();
        // -1/4 = 1 mod 5
        assert_eq!(g.power_rule(0), &vec![(1, 1)]);
    }

    #[test]
    fn integer_arithmetic() {
        let mut sym = Symbols::new();
        sym.insert("p".into(), 7);
        assert_eq!(eval_integer("(p-1)/2", &sym).unwrap(), 3);
        assert_eq!(eval_integer("gcd(p-1,4)-1", &sym).unwrap(), 1);
        assert!(eval_integer("p/2", &sym).is_err());
    }

    #[test]
    fn rhs_exponents_use_the_group_order() {
        // b has order 25 through its power rule, so b^-1 is not b^4
        let g = parse_pc_presentation("generators: a, b, c\norder(a)=5\nb^5 = c\norder(c)=5\n[b,a] = c^-1")
            .unwrap();
        let ba = g.evaluate("[b,a]").unwrap();
        assert_eq!(ba.as_slice(), &[0, 0, 4]);
        let h = parse_pc_presentation("generators: a, b, c\norder(a)=5\nb^5 = c\norder(c)=5\na^5 = b^-1").unwrap();
        let x = h.evaluate("a^5*b").unwrap();
        assert!(x.is_identity());
    }

    #[test]
    fn expression_forms() {
        let e = parse_expr("[a1,a]^2*a^{-1}*(b*c)^3*a^b", &Symbols::new()).unwrap();
        match e {
            Expr::Mul(v) => assert_eq!(v.len(), 4),
            _ => panic!(),
        }
        assert!(parse_expr("a^", &Symbols::new()).is_err());
        assert!(parse_expr("[a]", &Symbols::new()).is_err());
    }

    #[test]
    fn text_round_trip() {
        let src = "generators: a, a1, a2\na^5 = a2\norder(a1)=5\norder(a2)=5\n[a1,a] = a2\n";
        let g = parse_pc_presentation(src).unwrap();
        let h = parse_pc_presentation(&g.to_text()).unwrap();
        assert_eq!(g, h);
        assert_eq!(g.to_text(), src);
    }
}
