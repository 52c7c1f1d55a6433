//! Expected-value tables: `|`-separated rows with `#` comments, and the cell
//! notation used in them.
//!
//! Cells are direct products joined by ` x `: `1`, cyclic factors `Z(n)` with an
//! optional multiplicity `^m` (where `n` may use `p`), and at most one named
//! non-abelian group such as `Phi2(111)` or `X`.

use crate::catalog::Catalog;
use crate::error::{Error, Result};
use crate::pc::{
    center, characteristic_subgroups, eval_integer, fingerprint, parse_expr, PcPresentation,
    StructureFingerprint, Subgroup, Symbols,
};
use crate::snf::AbelianInvariants;

/// `r = expr` or `r != expr`, restricting a family row to some parameter values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selector {
    pub symbol: String,
    pub negated: bool,
    pub value: String,
}

impl Selector {
    fn parse(text: &str) -> Option<Self> {
        let (lhs, rhs, negated) = match text.split_once("!=") {
            Some((l, r)) => (l, r, true),
            None => {
                let (l, r) = text.split_once('=')?;
                (l, r, false)
            }
        };
        Some(Selector { symbol: lhs.trim().into(), negated, value: rhs.trim().into() })
    }

    pub fn holds(&self, value: i64, p: u32) -> Result<bool> {
        let v = eval_integer(&self.value, &prime_symbols(p))?;
        Ok((value == v) != self.negated)
    }
}

#[derive(Clone, Debug)]
pub struct ExpectedRow {
    pub key: String,
    pub selector: Option<Selector>,
    pub cells: Vec<String>,
    pub line: usize,
}

impl ExpectedRow {
    /// Row key as written, including any selector.
    pub fn label(&self) -> String {
        match &self.selector {
            Some(s) => format!(
                "{} [{} {} {}]",
                self.key,
                s.symbol,
                if s.negated { "!=" } else { "=" },
                s.value
            ),
            None => self.key.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExpectedTable {
    pub name: String,
    /// Column titles after the key column.
    pub columns: Vec<String>,
    pub rows: Vec<ExpectedRow>,
}

impl ExpectedTable {
    /// Parses a table. The column titles come from the last comment line
    /// containing `|`.
    pub fn parse(name: &str, text: &str) -> Result<Self> {
        let mut columns = Vec::new();
        let mut rows: Vec<ExpectedRow> = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if let Some(c) = line.strip_prefix('#') {
                if c.contains('|') {
                    columns = c.split('|').skip(1).map(|s| s.trim().to_string()).collect();
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split('|').map(str::trim);
            let head = parts.next().unwrap_or("");
            let cells: Vec<String> = parts.map(String::from).collect();
            let (key, selector) = match head.split_once('[') {
                Some((key, rest)) => {
                    let cond = rest.strip_suffix(']').and_then(Selector::parse).ok_or_else(|| {
                        Error::Catalog(format!("{name}:{}: bad selector `{head}`", k + 1))
                    })?;
                    (key.trim().to_string(), Some(cond))
                }
                None => (head.to_string(), None),
            };
            rows.push(ExpectedRow { key, selector, cells, line: k + 1 });
        }
        if columns.is_empty() {
            return Err(Error::Catalog(format!("{name}: no column header")));
        }
        for r in &rows {
            if r.cells.len() != columns.len() {
                return Err(Error::Catalog(format!(
                    "{name}:{}: {} cells, expected {}",
                    r.line,
                    r.cells.len(),
                    columns.len()
                )));
            }
        }
        Ok(ExpectedTable { name: name.to_string(), columns, rows })
    }

    /// The row describing a catalog member: an exact name match wins, else a
    /// family row whose selector (if any) admits the parameter value.
    pub fn row_for(
        &self,
        instance: &str,
        family: &str,
        param: Option<i64>,
        p: u32,
    ) -> Result<Option<&ExpectedRow>> {
        if let Some(r) = self.rows.iter().find(|r| r.key == instance && r.selector.is_none()) {
            return Ok(Some(r));
        }
        let mut hits = Vec::new();
        for r in self.rows.iter().filter(|r| r.key == family) {
            let ok = match (&r.selector, param) {
                (None, _) => true,
                (Some(s), Some(v)) => s.holds(v, p)?,
                (Some(_), None) => false,
            };
            if ok {
                hits.push(r);
            }
        }
        match hits.len() {
            0 => Ok(None),
            1 => Ok(Some(hits[0])),
            _ => Err(Error::Catalog(format!("{}: several rows match {instance}", self.name))),
        }
    }

    pub fn column(&self, title: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == title)
    }
}

pub(crate) fn prime_symbols(p: u32) -> Symbols {
    let mut s = Symbols::new();
    s.insert("p".into(), p as i64);
    s
}

/// A parsed table cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cell {
    Abelian(AbelianInvariants),
    /// A named group times an abelian factor.
    Named { name: String, times: AbelianInvariants },
}

pub fn parse_cell(text: &str, p: u32) -> Result<Cell> {
    let sym = prime_symbols(p);
    let bad = |msg: String| Error::Catalog(format!("cell `{text}`: {msg}"));
    let mut orders = Vec::new();
    let mut name: Option<String> = None;
    for f in text.split(" x ").map(str::trim) {
        if f == "1" {
            continue;
        }
        if let Some(rest) = f.strip_prefix("Z(") {
            let close = rest.rfind(')').ok_or_else(|| bad("unbalanced parenthesis".into()))?;
            let n = eval_integer(&rest[..close], &sym)?;
            let tail = rest[close + 1..].trim();
            let mult = match tail.strip_prefix('^') {
                Some(m) => m.parse::<usize>().map_err(|_| bad(format!("bad multiplicity `{m}`")))?,
                None if tail.is_empty() => 1,
                None => return Err(bad(format!("unexpected `{tail}`"))),
            };
            if n < 1 {
                return Err(bad(format!("cyclic order {n}")));
            }
            orders.extend(std::iter::repeat_n(n as u64, mult));
        } else if name.is_none() && !f.is_empty() {
            name = Some(f.to_string());
        } else {
            return Err(bad(format!("unexpected factor `{f}`")));
        }
    }
    let inv = AbelianInvariants::from_orders(orders);
    Ok(match name {
        Some(name) => Cell::Named { name, times: inv },
        None => Cell::Abelian(inv),
    })
}

impl Cell {
    /// Fingerprint of the group the cell denotes.
    pub fn fingerprint(&self, cat: &Catalog, p: u32) -> Result<StructureFingerprint> {
        match self {
            Cell::Abelian(a) => Ok(StructureFingerprint::abelian(a)),
            Cell::Named { name, times } => {
                let g = cat.named_group(name, p)?;
                Ok(fingerprint(&g).direct_product(&StructureFingerprint::abelian(times)))
            }
        }
    }
}

/// Subgroup of `g` in the notation `1`, `Z(G)`, `G'`, `<w>` (generated by the
/// word `w`), joined by ` x `.
pub fn parse_subgroup(g: &PcPresentation, text: &str, p: u32) -> Result<Subgroup> {
    let sym = prime_symbols(p);
    let mut acc = Subgroup::trivial(g);
    for f in text.split(" x ").map(str::trim) {
        let s = match f {
            "1" => Subgroup::trivial(g),
            "Z(G)" => center(g),
            "G'" => characteristic_subgroups(g).derived,
            _ => {
                let body = f
                    .strip_prefix('<')
                    .and_then(|b| b.strip_suffix('>'))
                    .ok_or_else(|| Error::Catalog(format!("bad subgroup notation `{f}`")))?;
                let gens = body
                    .split(',')
                    .map(|w| g.eval_expr(&parse_expr(w.trim(), &sym)?, &g.generators()))
                    .collect::<Result<Vec<_>>>()?;
                Subgroup::closure(g, &gens)
            }
        };
        acc = acc.join(&s);
    }
    Ok(acc)
}

/// Splits `[u,v^phi], [x,y^phi]` into word pairs `(u, v)`.
pub fn parse_tensor_generators(text: &str) -> Result<Vec<(String, String)>> {
    let bad = || Error::Catalog(format!("bad generator list `{text}`"));
    let mut out = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let body_end = rest.find(']').ok_or_else(bad)?;
        let body = rest.strip_prefix('[').ok_or_else(bad)?;
        let body = &body[..body_end - 1];
        let (u, v) = body.split_once(',').ok_or_else(bad)?;
        let v = v.trim().strip_suffix("^phi").ok_or_else(bad)?;
        out.push((u.trim().to_string(), v.trim().to_string()));
        rest = rest[body_end + 1..].trim_start();
        rest = rest.strip_prefix(',').unwrap_or(rest).trim_start();
    }
    Ok(out)
}
