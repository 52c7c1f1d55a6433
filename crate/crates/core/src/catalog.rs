//! James presentations of the groups of order `p^3`, `p^4` and `p^5` as data,
//! small-group fixtures for orders 32 and 243, and identification of groups by
//! fingerprint.
//!
//! A family file looks like
//!
//! ```text
//! family: Phi4(221)d_r
//! isoclinism: 4
//! order: p^5
//! constraints: p >= 5
//! params: r = 1 .. (p-1)/2
//! let: k = zeta^r
//! generators: a, a1, a2, b1, b2
//! relations:
//!   [a1,a] = b1
//!   a1^p = b1^k
//!   ...
//! ```
//!
//! `params` is either a range `r = lo .. hi` or a set `r in {1, nu}`. An optional
//! `product: Phi2(31) x Z(p)` line records that the family is a direct product,
//! with the extra cyclic factors generated by the trailing generators.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use log::debug;

use crate::error::{Error, Result};
use crate::pc::{
    check_consistency, eval_integer, fingerprint, is_prime, parse_pc_presentation,
    parse_pc_presentation_with, PcPresentation, StructureFingerprint, Symbols,
};
use crate::snf::AbelianInvariants;

mod embedded {
    include!(concat!(env!("OUT_DIR"), "/embedded.rs"));
}

/// Environment variable naming a directory that replaces the built-in catalog.
pub const CATALOG_DIR_VAR: &str = "PGX_CATALOG_DIR";

/// Smallest quadratic non-residue and smallest primitive root modulo `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResidueParams {
    pub p: u32,
    pub nu: u32,
    pub zeta: u32,
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

pub fn residue_params(p: u32) -> Result<ResidueParams> {
    if p == 2 || !is_prime(p) {
        return Err(Error::Unsupported(format!("{p} is not an odd prime")));
    }
    let m = p as u64;
    let nu = (2..m)
        .find(|&a| pow_mod(a, (m - 1) / 2, m) == m - 1)
        .expect("odd primes have non-residues");
    let mut factors = Vec::new();
    let mut n = m - 1;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            factors.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        factors.push(n);
    }
    let zeta = (2..m.max(3))
        .find(|&g| factors.iter().all(|&q| pow_mod(g, (m - 1) / q, m) != 1))
        .unwrap_or(1);
    Ok(ResidueParams { p, nu: nu as u32, zeta: zeta as u32 })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParamRange {
    /// Inclusive integer range, bounds given as arithmetic in `p`.
    Range { lo: String, hi: String },
    /// Explicit list of values such as `1` and `nu`.
    Set(Vec<String>),
}

#[derive(Clone, Debug)]
pub struct Parameter {
    pub symbol: String,
    pub range: ParamRange,
}

/// One concrete parameter choice: the label used in names and its value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamValue {
    pub label: String,
    pub value: i64,
}

#[derive(Clone, Debug)]
pub struct FamilySpec {
    pub name: String,
    pub isoclinism: u8,
    pub order_exponent: u32,
    /// Smallest admissible prime.
    pub min_prime: u32,
    pub parameter: Option<Parameter>,
    pub lets: Vec<(String, String)>,
    /// `(family, extra cyclic orders as expressions in p)` for direct products.
    pub product: Option<(String, Vec<String>)>,
    pub generators: String,
    pub relations: Vec<String>,
    pub source: String,
}

impl FamilySpec {
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let bad = |line: usize, msg: String| Error::Catalog(format!("{source}:{line}: {msg}"));
        let mut fields: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
        let mut relations = Vec::new();
        let mut in_relations = false;
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if in_relations && !content.contains(':') {
                relations.push(content.to_string());
                continue;
            }
            let (key, value) = content
                .split_once(':')
                .ok_or_else(|| bad(line, format!("expected `key: value`, found `{content}`")))?;
            let key = key.trim();
            match key {
                "family" | "isoclinism" | "order" | "constraints" | "params" | "let"
                | "generators" | "product" => {
                    if fields.insert(key, (line, value.trim())).is_some() {
                        return Err(bad(line, format!("duplicate field `{key}`")));
                    }
                }
                "relations" => in_relations = true,
                _ => return Err(bad(line, format!("unknown field `{key}`"))),
            }
        }
        let need = |key: &str| -> Result<(usize, &str)> {
            fields.get(key).copied().ok_or_else(|| bad(1, format!("missing field `{key}`")))
        };
        let name = need("family")?.1.to_string();
        let (l, iso) = need("isoclinism")?;
        let isoclinism = iso.parse().map_err(|_| bad(l, format!("bad isoclinism `{iso}`")))?;
        let (l, ord) = need("order")?;
        let order_exponent = ord
            .strip_prefix("p^")
            .and_then(|e| e.trim().parse().ok())
            .ok_or_else(|| bad(l, format!("order must read `p^n`, found `{ord}`")))?;
        let (l, cons) = need("constraints")?;
        let min_prime = parse_constraint(cons).ok_or_else(|| bad(l, format!("bad constraint `{cons}`")))?;
        let parameter = match fields.get("params") {
            None => None,
            Some(&(l, text)) => Some(parse_params(text).ok_or_else(|| bad(l, format!("bad params `{text}`")))?),
        };
        let mut lets = Vec::new();
        if let Some(&(l, text)) = fields.get("let") {
            for part in text.split(';') {
                let (k, v) = part
                    .split_once('=')
                    .ok_or_else(|| bad(l, format!("bad let binding `{part}`")))?;
                lets.push((k.trim().to_string(), v.trim().to_string()));
            }
        }
        let product = match fields.get("product") {
            None => None,
            Some(&(l, text)) => {
                let mut parts = text.split(" x ").map(str::trim);
                let head = parts.next().unwrap_or("").to_string();
                let mut orders = Vec::new();
                for f in parts {
                    let inner = f
                        .strip_prefix("Z(")
                        .and_then(|s| s.strip_suffix(')'))
                        .ok_or_else(|| bad(l, format!("bad cyclic factor `{f}`")))?;
                    orders.push(inner.to_string());
                }
                if head.is_empty() || orders.is_empty() {
                    return Err(bad(l, format!("bad product `{text}`")));
                }
                Some((head, orders))
            }
        };
        if relations.is_empty() {
            return Err(bad(1, "no relations".into()));
        }
        Ok(FamilySpec {
            name,
            isoclinism,
            order_exponent,
            min_prime,
            parameter,
            lets,
            product,
            generators: need("generators")?.1.to_string(),
            relations,
            source: source.to_string(),
        })
    }

    pub fn admits(&self, p: u32) -> bool {
        p >= self.min_prime && is_prime(p)
    }

    fn base_symbols(p: u32) -> Result<Symbols> {
        let rp = residue_params(p)?;
        let mut s = Symbols::new();
        s.insert("p".into(), p as i64);
        s.insert("nu".into(), rp.nu as i64);
        s.insert("zeta".into(), rp.zeta as i64);
        Ok(s)
    }

    /// Parameter values at `p`, in listing order. A family without parameters
    /// yields no values.
    pub fn parameter_values(&self, p: u32) -> Result<Vec<ParamValue>> {
        let Some(param) = &self.parameter else { return Ok(Vec::new()) };
        let sym = Self::base_symbols(p)?;
        let mut out: Vec<ParamValue> = Vec::new();
        match &param.range {
            ParamRange::Range { lo, hi } => {
                let lo = eval_integer(lo, &sym)?;
                let hi = eval_integer(hi, &sym)?;
                for v in lo..=hi {
                    out.push(ParamValue { label: v.to_string(), value: v });
                }
            }
            ParamRange::Set(items) => {
                for it in items {
                    let value = eval_integer(it, &sym)?;
                    if out.iter().all(|o| o.value != value) {
                        out.push(ParamValue { label: it.clone(), value });
                    }
                }
            }
        }
        if out.is_empty() {
            return Err(Error::Catalog(format!("{}: empty parameter range at p = {p}", self.name)));
        }
        Ok(out)
    }

    /// Name of one member, e.g. `Phi4(221)d_2` for `Phi4(221)d_r` at `r = 2`.
    pub fn instance_name(&self, value: Option<&ParamValue>) -> String {
        match (value, &self.parameter) {
            (Some(v), Some(param)) => {
                let suffix = format!("_{}", param.symbol);
                match self.name.strip_suffix(&suffix) {
                    Some(stem) => format!("{stem}_{}", v.label),
                    None => format!("{}[{}={}]", self.name, param.symbol, v.label),
                }
            }
            _ => self.name.clone(),
        }
    }

    fn symbols(&self, p: u32, value: Option<&ParamValue>) -> Result<Symbols> {
        let mut sym = Self::base_symbols(p)?;
        match (&self.parameter, value) {
            (Some(param), Some(v)) => {
                if !self.parameter_values(p)?.contains(v) {
                    return Err(Error::Catalog(format!(
                        "{}: {} = {} is outside the parameter range at p = {p}",
                        self.name, param.symbol, v.label
                    )));
                }
                sym.insert(param.symbol.clone(), v.value);
            }
            (Some(param), None) => {
                return Err(Error::Catalog(format!("{} needs a value for {}", self.name, param.symbol)))
            }
            (None, Some(_)) => {
                return Err(Error::Catalog(format!("{} takes no parameter", self.name)))
            }
            (None, None) => {}
        }
        for (k, expr) in &self.lets {
            let v = eval_integer(expr, &sym)?;
            sym.insert(k.clone(), v);
        }
        Ok(sym)
    }

    /// Presentation text with symbols left in place.
    pub fn presentation_source(&self) -> String {
        let mut s = format!("generators: {}\n", self.generators);
        for r in &self.relations {
            s.push_str(r);
            s.push('\n');
        }
        s
    }

    /// Consistent presentation of the member selected by `value` at the prime `p`.
    pub fn instantiate(&self, p: u32, value: Option<&ParamValue>) -> Result<PcPresentation> {
        if !self.admits(p) {
            return Err(Error::Catalog(format!(
                "{} needs a prime p >= {}, got {p}",
                self.name, self.min_prime
            )));
        }
        let sym = self.symbols(p, value)?;
        let g = parse_pc_presentation_with(&self.presentation_source(), &sym).map_err(|e| {
            Error::Catalog(format!("{} ({}): {e}", self.name, self.source))
        })?;
        let violations = check_consistency(&g);
        if let Some(v) = violations.first() {
            return Err(Error::Catalog(format!(
                "{} at p = {p} is inconsistent ({} violations, first at {}): catalog data bug",
                self.instance_name(value),
                violations.len(),
                v.instance
            )));
        }
        if g.order_exponent() != self.order_exponent {
            return Err(Error::Catalog(format!(
                "{} at p = {p} has order p^{} instead of p^{}",
                self.instance_name(value),
                g.order_exponent(),
                self.order_exponent
            )));
        }
        Ok(g)
    }
}

fn parse_constraint(s: &str) -> Option<u32> {
    let s = s.replace(' ', "");
    if let Some(v) = s.strip_prefix("p>=") {
        v.parse().ok()
    } else if let Some(v) = s.strip_prefix("p>") {
        v.parse::<u32>().ok().map(|v| v + 1)
    } else {
        None
    }
}

fn parse_params(s: &str) -> Option<Parameter> {
    if let Some((sym, set)) = s.split_once(" in ") {
        let body = set.trim().strip_prefix('{')?.strip_suffix('}')?;
        let items: Vec<String> = body.split(',').map(|x| x.trim().to_string()).collect();
        if items.iter().any(String::is_empty) {
            return None;
        }
        return Some(Parameter { symbol: sym.trim().to_string(), range: ParamRange::Set(items) });
    }
    let (sym, range) = s.split_once('=')?;
    let (lo, hi) = range.split_once("..")?;
    Some(Parameter {
        symbol: sym.trim().to_string(),
        range: ParamRange::Range { lo: lo.trim().to_string(), hi: hi.trim().to_string() },
    })
}

/// A member of a family at a given prime.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub family: usize,
    pub param: Option<ParamValue>,
    pub name: String,
}

/// Outcome of looking a fingerprint up in the catalog.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Identification {
    Unique(String),
    Ambiguous(Vec<String>),
    Unknown,
}

impl fmt::Display for Identification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Identification::Unique(n) => f.write_str(n),
            Identification::Ambiguous(v) => write!(f, "ambiguous: {}", v.join(" | ")),
            Identification::Unknown => f.write_str("unknown"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Catalog {
    families: Vec<FamilySpec>,
    fixtures: BTreeMap<(u32, u32), String>,
    auxiliary: BTreeMap<String, String>,
    expected: BTreeMap<String, String>,
    origin: String,
}

impl Catalog {
    /// Catalog compiled into the library.
    pub fn embedded() -> Result<Self> {
        Self::from_files(embedded::FILES.iter().map(|&(k, v)| (k.to_string(), v.to_string())), "built-in")
    }

    /// Catalog read from a directory with the same layout as the built-in one
    /// (`index.txt`, `families/`, `fixtures/`, optionally `expected/`).
    pub fn from_dir(dir: &Path) -> Result<Self> {
        let mut files = Vec::new();
        fn walk(dir: &Path, root: &Path, out: &mut Vec<(String, String)>) -> Result<()> {
            let rd = std::fs::read_dir(dir)
                .map_err(|e| Error::Catalog(format!("cannot read {}: {e}", dir.display())))?;
            for entry in rd.flatten() {
                let path = entry.path();
                if path.is_dir() {
                    walk(&path, root, out)?;
                } else {
                    let rel = path.strip_prefix(root).unwrap().to_string_lossy().replace('\\', "/");
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| Error::Catalog(format!("cannot read {}: {e}", path.display())))?;
                    out.push((rel, text));
                }
            }
            Ok(())
        }
        walk(dir, dir, &mut files)?;
        // the override may omit the expected tables; fall back to the built-in ones
        let mut cat = Self::from_files(files, &dir.display().to_string())?;
        if cat.expected.is_empty() {
            cat.expected = Self::embedded()?.expected;
        }
        Ok(cat)
    }

    /// Directory from the environment if set, else the built-in catalog.
    pub fn load() -> Result<Self> {
        match std::env::var_os(CATALOG_DIR_VAR) {
            Some(dir) if !dir.is_empty() => Self::from_dir(&PathBuf::from(dir)),
            _ => Self::embedded(),
        }
    }

    fn from_files(files: impl IntoIterator<Item = (String, String)>, origin: &str) -> Result<Self> {
        let mut fams: BTreeMap<String, String> = BTreeMap::new();
        let mut fixtures = BTreeMap::new();
        let mut auxiliary = BTreeMap::new();
        let mut expected = BTreeMap::new();
        let mut index = None;
        for (rel, text) in files {
            let rel = rel.strip_prefix("catalog/").unwrap_or(&rel).to_string();
            if rel == "index.txt" {
                index = Some(text);
            } else if let Some(f) = rel.strip_prefix("families/") {
                fams.insert(f.to_string(), text);
            } else if let Some(rest) = rel.strip_prefix("fixtures/") {
                let stem = rest.strip_suffix(".pc").unwrap_or(rest);
                match stem.split_once('/') {
                    Some((dir, id)) => {
                        let order = dir.strip_prefix('o').and_then(|o| o.parse().ok());
                        match (order, id.parse()) {
                            (Some(o), Ok(i)) => {
                                fixtures.insert((o, i), text);
                            }
                            _ => debug!("ignoring catalog file {rel}"),
                        }
                    }
                    None => {
                        auxiliary.insert(stem.to_string(), text);
                    }
                }
            } else if let Some(e) = rel.strip_prefix("expected/") {
                expected.insert(e.strip_suffix(".txt").unwrap_or(e).to_string(), text);
            }
        }
        let mut order: Vec<String> = Vec::new();
        if let Some(ix) = index {
            for l in ix.lines() {
                let l = l.split('#').next().unwrap().trim();
                if l.is_empty() {
                    continue;
                }
                if !fams.contains_key(l) {
                    return Err(Error::Catalog(format!("index lists missing family file {l}")));
                }
                order.push(l.to_string());
            }
        }
        for k in fams.keys() {
            if !order.contains(k) {
                order.push(k.clone());
            }
        }
        let mut families = Vec::with_capacity(order.len());
        for file in &order {
            let spec = FamilySpec::parse(&fams[file], file)?;
            if families.iter().any(|f: &FamilySpec| f.name == spec.name) {
                return Err(Error::Catalog(format!("family {} defined twice", spec.name)));
            }
            families.push(spec);
        }
        Ok(Catalog { families, fixtures, auxiliary, expected, origin: origin.to_string() })
    }

    /// Where the catalog was loaded from.
    pub fn origin(&self) -> &str {
        &self.origin
    }

    pub fn families(&self) -> &[FamilySpec] {
        &self.families
    }

    pub fn family(&self, name: &str) -> Option<&FamilySpec> {
        self.families.iter().find(|f| f.name == name)
    }

    /// Every member of every family of order `p^order_exponent`, in listing order.
    pub fn list(&self, order_exponent: u32, p: u32) -> Result<Vec<CatalogEntry>> {
        if !(3..=5).contains(&order_exponent) {
            return Err(Error::Unsupported(format!(
                "the catalog covers orders p^3, p^4 and p^5, not p^{order_exponent}"
            )));
        }
        if p < 5 || !is_prime(p) {
            return Err(Error::Unsupported(format!(
                "the catalog presentations are used for primes p >= 5, got {p}; \
                 orders 32 and 243 are served by fixtures"
            )));
        }
        let mut out = Vec::new();
        for (k, f) in self.families.iter().enumerate() {
            if f.order_exponent != order_exponent || !f.admits(p) {
                continue;
            }
            if f.parameter.is_none() {
                out.push(CatalogEntry { family: k, param: None, name: f.name.clone() });
            } else {
                for v in f.parameter_values(p)? {
                    let name = f.instance_name(Some(&v));
                    out.push(CatalogEntry { family: k, param: Some(v), name });
                }
            }
        }
        Ok(out)
    }

    pub fn spec(&self, entry: &CatalogEntry) -> &FamilySpec {
        &self.families[entry.family]
    }

    pub fn instantiate(&self, entry: &CatalogEntry, p: u32) -> Result<PcPresentation> {
        self.families[entry.family].instantiate(p, entry.param.as_ref())
    }

    /// Looks up a member by name, e.g. `Phi2(1^5)`, `Phi4(221)d_2` or `Phi3(211)b_nu`.
    pub fn entry(&self, name: &str, p: u32) -> Result<CatalogEntry> {
        let name = name.trim();
        for (k, f) in self.families.iter().enumerate() {
            if f.parameter.is_none() {
                if f.name == name {
                    return Ok(CatalogEntry { family: k, param: None, name: f.name.clone() });
                }
                continue;
            }
            let suffix = format!("_{}", f.parameter.as_ref().unwrap().symbol);
            let Some(stem) = f.name.strip_suffix(&suffix) else { continue };
            let Some(label) = name.strip_prefix(stem).and_then(|r| r.strip_prefix('_')) else {
                continue;
            };
            if !f.admits(p) {
                return Err(Error::Catalog(format!("{} needs p >= {}", f.name, f.min_prime)));
            }
            let values = f.parameter_values(p)?;
            if let Some(v) = values.iter().find(|v| v.label == label) {
                return Ok(CatalogEntry { family: k, param: Some(v.clone()), name: name.to_string() });
            }
            // a numeric label may also name a symbolic value, e.g. Phi3(211)b_2 for b_nu
            if let Ok(num) = label.parse::<i64>() {
                if let Some(v) = values.iter().find(|v| v.value == num) {
                    return Ok(CatalogEntry {
                        family: k,
                        param: Some(v.clone()),
                        name: f.instance_name(Some(v)),
                    });
                }
            }
            return Err(Error::Catalog(format!(
                "{name}: {label} is not a parameter value of {} at p = {p} (values: {})",
                f.name,
                values.iter().map(|v| v.label.as_str()).collect::<Vec<_>>().join(", ")
            )));
        }
        Err(Error::Catalog(format!("unknown catalog group `{name}`")))
    }

    /// Instantiates a member by name.
    pub fn group(&self, name: &str, p: u32) -> Result<PcPresentation> {
        let e = self.entry(name, p)?;
        self.instantiate(&e, p)
    }

    /// For a direct-product family, the same group built as an explicit product.
    pub fn product_form(&self, entry: &CatalogEntry, p: u32) -> Result<Option<PcPresentation>> {
        let spec = &self.families[entry.family];
        let Some((head, orders)) = &spec.product else { return Ok(None) };
        let base = match &spec.parameter {
            Some(param) => {
                let sfx = format!("_{}", param.symbol);
                match head.strip_suffix(&sfx) {
                    Some(stem) => format!("{stem}_{}", entry.param.as_ref().map_or("", |v| &v.label)),
                    None => head.clone(),
                }
            }
            None => head.clone(),
        };
        let g = self.group(&base, p)?;
        let sym = FamilySpec::base_symbols(p)?;
        let mut cyc = Vec::new();
        for o in orders {
            let v = eval_integer(o, &sym)?;
            cyc.push(u32::try_from(v).map_err(|_| Error::Catalog(format!("bad cyclic order {o}")))?);
        }
        Ok(Some(g.direct_product(&PcPresentation::abelian(&cyc)?)?))
    }

    pub fn fixture_ids(&self, order: u32) -> Vec<u32> {
        self.fixtures.keys().filter(|k| k.0 == order).map(|k| k.1).collect()
    }

    /// Shipped presentation of the small group `SmallGroup(order, id)`.
    pub fn fixture_group(&self, order: u32, id: u32) -> Result<PcPresentation> {
        let text = self.fixtures.get(&(order, id)).ok_or_else(|| {
            Error::Catalog(format!("no fixture for the group of order {order} with id {id}"))
        })?;
        load_checked(text, &format!("fixture {order}/{id}"), order)
    }

    /// Auxiliary named groups shipped with the fixtures (`X`, `Y`).
    pub fn auxiliary_group(&self, name: &str) -> Result<PcPresentation> {
        let text = self
            .auxiliary
            .get(name)
            .ok_or_else(|| Error::Catalog(format!("no auxiliary group `{name}`")))?;
        let g = parse_pc_presentation(text).map_err(|e| Error::Catalog(format!("{name}: {e}")))?;
        if !check_consistency(&g).is_empty() {
            return Err(Error::Catalog(format!("auxiliary group {name} is inconsistent")));
        }
        Ok(g)
    }

    /// A catalog member at `p` or an auxiliary group, by name.
    pub fn named_group(&self, name: &str, p: u32) -> Result<PcPresentation> {
        if self.auxiliary.contains_key(name) {
            self.auxiliary_group(name)
        } else {
            self.group(name, p)
        }
    }

    pub fn auxiliary_names(&self) -> Vec<&str> {
        self.auxiliary.keys().map(String::as_str).collect()
    }

    /// Raw text of an expected-values file (`table1`, `table2`, ...).
    pub fn expected(&self, name: &str) -> Option<&str> {
        self.expected.get(name).map(String::as_str)
    }

    /// Named groups to compare against at the prime `p`: catalog members that are
    /// not themselves recorded as direct products, or the fixtures and auxiliary
    /// groups for `p` = 2 and 3.
    fn reference_groups(&self, p: u32) -> Result<Vec<(String, PcPresentation)>> {
        let mut out = Vec::new();
        if p >= 5 {
            for n in 3..=5 {
                for e in self.list(n, p)? {
                    if self.spec(&e).product.is_none() {
                        let g = self.instantiate(&e, p)?;
                        out.push((e.name, g));
                    }
                }
            }
        } else {
            for name in self.auxiliary_names() {
                let g = self.auxiliary_group(name)?;
                if g.prime() == Some(p) {
                    out.push((name.to_string(), g));
                }
            }
            let order = p.pow(5);
            for id in self.fixture_ids(order) {
                out.push((format!("SmallGroup({order},{id})"), self.fixture_group(order, id)?));
            }
        }
        Ok(out)
    }

    /// Names the group with fingerprint `fp`, as a reference group times an
    /// abelian factor. Abelian groups are named by their invariants.
    pub fn identify(&self, fp: &StructureFingerprint, p: u32) -> Result<Identification> {
        if fp.nilpotency_class <= 1 {
            return Ok(Identification::Unique(render_abelian(&fp.abelianization, p)));
        }
        let mut hits = Vec::new();
        for (name, g) in self.reference_groups(p)? {
            let h = fingerprint(&g);
            if h.order > fp.order {
                continue;
            }
            let Some(rest) = abelian_cofactor(&fp.abelianization, &h.abelianization) else {
                continue;
            };
            if StructureFingerprint::direct_product(&h, &StructureFingerprint::abelian(&rest)) == *fp {
                if rest.is_trivial() {
                    hits.push(name);
                } else {
                    hits.push(format!("{name} x {}", render_abelian(&rest, p)));
                }
            }
        }
        Ok(match hits.len() {
            0 => Identification::Unknown,
            1 => Identification::Unique(hits.pop().unwrap()),
            _ => Identification::Ambiguous(hits),
        })
    }
}

/// `Z(p^2) x Z(p)` style text for `p >= 5`, numeric orders such as `Z(9) x Z(3)` otherwise.
pub fn render_abelian(a: &AbelianInvariants, p: u32) -> String {
    if p >= 5 {
        a.describe_in(p as u64)
    } else {
        a.describe_plain()
    }
}

/// `A` with `A x B = total`, when `B`'s cyclic factors occur in `total`.
fn abelian_cofactor(total: &AbelianInvariants, b: &AbelianInvariants) -> Option<AbelianInvariants> {
    let mut rest = total.primary();
    for q in b.primary() {
        let k = rest.iter().position(|&x| x == q)?;
        rest.remove(k);
    }
    Some(AbelianInvariants::from_orders(rest))
}

fn load_checked(text: &str, what: &str, order: u32) -> Result<PcPresentation> {
    let g = parse_pc_presentation(text).map_err(|e| Error::Catalog(format!("{what}: {e}")))?;
    let v = check_consistency(&g);
    if !v.is_empty() {
        return Err(Error::Catalog(format!("{what} is inconsistent at {}", v[0].instance)));
    }
    if g.order() != order.into() {
        return Err(Error::Catalog(format!("{what} has order {} instead of {order}", g.order())));
    }
    Ok(g)
}
