//! Comparison of computed invariants with the expected-value tables.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_bigint::BigUint;

use crate::catalog::{render_abelian, Catalog, Identification};
use crate::error::{Error, Result};
use crate::expected::{parse_cell, parse_subgroup, parse_tensor_generators, ExpectedRow, ExpectedTable};
use crate::functors::gamma_whitehead;
use crate::nu::{analyze, Analysis, GroupDescriptor, NuRealization};
use crate::pc::{abelian_invariants, characteristic_subgroups, parse_expr, PcPresentation, Subgroup};
use crate::pquotient::QuotientOptions;
use crate::special_be::{be_multiplier, be_setup, be_x_dimensions, BESubspaces};
use crate::snf::AbelianInvariants;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scope {
    Table1,
    Table2,
    Table3,
    Table4,
    TheoremP3P4,
}

impl Scope {
    pub const ALL: [Scope; 5] =
        [Scope::TheoremP3P4, Scope::Table1, Scope::Table2, Scope::Table3, Scope::Table4];

    pub fn name(self) -> &'static str {
        match self {
            Scope::Table1 => "table1",
            Scope::Table2 => "table2",
            Scope::Table3 => "table3",
            Scope::Table4 => "table4",
            Scope::TheoremP3P4 => "theorem-p3p4",
        }
    }

    fn file(self) -> &'static str {
        match self {
            Scope::TheoremP3P4 => "theorem_p3p4",
            s => s.name(),
        }
    }

    /// The prime a fixture-based scope is tied to.
    pub fn fixed_prime(self) -> Option<u32> {
        match self {
            Scope::Table3 => Some(2),
            Scope::Table4 => Some(3),
            _ => None,
        }
    }

    pub fn table(self, cat: &Catalog) -> Result<ExpectedTable> {
        let text = cat
            .expected(self.file())
            .ok_or_else(|| Error::Catalog(format!("no expected values for scope {}", self.name())))?;
        ExpectedTable::parse(self.file(), text)
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scope::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| {
                Error::Unsupported(format!(
                    "unknown scope `{s}` (expected one of {})",
                    Scope::ALL.map(Scope::name).join(", ")
                ))
            })
    }
}

/// One group to check against one expected row.
#[derive(Clone, Debug)]
pub struct Unit {
    pub scope: Scope,
    pub group: String,
    pub p: u32,
    pub presentation: PcPresentation,
    pub row: ExpectedRow,
    pub columns: Vec<String>,
}

/// Groups and rows to compare, in table order. Every catalog member must have
/// a row and every row must describe some member.
pub fn plan(cat: &Catalog, scope: Scope, primes: &[u32]) -> Result<Vec<Unit>> {
    let table = scope.table(cat)?;
    let mut units = Vec::new();
    if let Some(p) = scope.fixed_prime() {
        let order = p.pow(5);
        for row in &table.rows {
            let id: u32 = row
                .key
                .parse()
                .map_err(|_| Error::Catalog(format!("{}: bad group id `{}`", table.name, row.key)))?;
            units.push(Unit {
                scope,
                group: format!("SmallGroup({order},{id})"),
                p,
                presentation: cat.fixture_group(order, id)?,
                row: row.clone(),
                columns: table.columns.clone(),
            });
        }
        return Ok(units);
    }
    let orders: &[u32] = if scope == Scope::TheoremP3P4 { &[3, 4] } else { &[5] };
    for &p in primes {
        let mut used = vec![false; table.rows.len()];
        let mut batch = Vec::new();
        for &n in orders {
            for e in cat.list(n, p)? {
                let spec = cat.spec(&e);
                let row = table
                    .row_for(&e.name, &spec.name, e.param.as_ref().map(|v| v.value), p)?
                    .ok_or_else(|| {
                        Error::Catalog(format!("{}: no row for {} at p = {p}", table.name, e.name))
                    })?;
                let k = table.rows.iter().position(|r| r.line == row.line).unwrap();
                used[k] = true;
                batch.push((k, e, row.clone()));
            }
        }
        if let Some(k) = used.iter().position(|u| !u) {
            return Err(Error::Catalog(format!(
                "{}: row {} matches no group at p = {p}",
                table.name,
                table.rows[k].label()
            )));
        }
        // table order, catalog order within a row
        batch.sort_by_key(|(k, _, _)| *k);
        for (_, e, row) in batch {
            units.push(Unit {
                scope,
                presentation: cat.instantiate(&e, p)?,
                group: e.name,
                p,
                row,
                columns: table.columns.clone(),
            });
        }
    }
    Ok(units)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub computed: String,
    pub passed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// The computation did not finish (budget, timeout, bad data).
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RowVerdict {
    pub scope: Scope,
    pub group: String,
    pub row: String,
    pub p: u32,
    pub checks: Vec<Check>,
    pub status: Status,
    pub error: Option<String>,
    pub runtime: Duration,
}

/// Renders a computed group: invariants when abelian, otherwise a name found by
/// fingerprint.
pub fn describe_group(cat: &Catalog, d: &GroupDescriptor, p: u32) -> String {
    if let Some(a) = &d.abelian {
        return render_abelian(a, p);
    }
    match cat.identify(&d.fingerprint, p) {
        Ok(Identification::Unique(n)) => n,
        Ok(Identification::Ambiguous(v)) => format!("one of {}", v.join(" | ")),
        _ => format!("non-abelian of order {}", d.fingerprint.order),
    }
}

fn cell_check(cat: &Catalog, name: &str, cell: &str, d: &GroupDescriptor, p: u32) -> Result<Check> {
    let expected = parse_cell(cell, p)?;
    let passed = match &expected {
        crate::expected::Cell::Abelian(a) => d.abelian.as_ref() == Some(a),
        named => !d.is_abelian() && named.fingerprint(cat, p)? == d.fingerprint,
    };
    Ok(Check { name: name.into(), expected: cell.into(), computed: describe_group(cat, d, p), passed })
}

fn abelian_check(name: &str, cell: &str, a: &AbelianInvariants, p: u32) -> Result<Check> {
    let expected = match parse_cell(cell, p)? {
        crate::expected::Cell::Abelian(e) => e,
        _ => return Err(Error::Catalog(format!("column {name} must be abelian, found `{cell}`"))),
    };
    Ok(Check { name: name.into(), expected: cell.into(), computed: render_abelian(a, p), passed: &expected == a })
}

fn pow(p: u32, e: u32) -> BigUint {
    BigUint::from(p).pow(e)
}

/// Sizes and class relations every realization must satisfy.
pub fn structural_checks(g: &PcPresentation, p: u32, a: &Analysis) -> Vec<Check> {
    let go = g.order();
    let tensor = &a.tensor.fingerprint.order;
    let nu = pow(p, a.nu_order_exponent);
    let wedge = &a.wedge.fingerprint.order;
    let m = a.multiplier.order();
    let derived = pow(p, a.derived_order_exponent);
    vec![
        Check {
            name: "|nu(G)| = |G|^2 |G (x) G|".into(),
            expected: (&go * &go * tensor).to_string(),
            computed: nu.to_string(),
            passed: nu == &go * &go * tensor,
        },
        Check {
            name: "class nu(G) <= class G + 1".into(),
            expected: format!("<= {}", a.class + 1),
            computed: a.nu_class.to_string(),
            passed: a.nu_class <= a.class + 1,
        },
        Check {
            name: "|G ^ G| = |M(G)| |G'|".into(),
            expected: (&m * &derived).to_string(),
            computed: wedge.to_string(),
            passed: *wedge == &m * &derived,
        },
    ]
}

/// Checks that the listed `[u, v^phi]` generate `G ^ G` and that no fewer elements could.
fn generator_check(g: &PcPresentation, p: u32, real: &NuRealization, cell: &str) -> Result<Check> {
    let sym = crate::expected::prime_symbols(p);
    let w = real.wedge()?;
    let wp = w.presentation();
    let mut gens = Vec::new();
    for (u, v) in parse_tensor_generators(cell)? {
        let x = g.eval_expr(&parse_expr(&u, &sym)?, &g.generators())?;
        let y = g.eval_expr(&parse_expr(&v, &sym)?, &g.generators())?;
        let t = real.tensor_element(&x, &y);
        gens.push(w.project(&t).ok_or_else(|| Error::Structure("[x, y^phi] outside the tensor square".into()))?);
    }
    let closure = Subgroup::closure(wp, &gens);
    let frattini = characteristic_subgroups(wp).frattini;
    let d = wp.order_exponent() - frattini.order_exponent();
    let generates = closure.is_whole();
    Ok(Check {
        name: "generators of G ^ G".into(),
        expected: format!("{} elements generating G ^ G", gens.len()),
        computed: format!(
            "{}; minimal generating number {d}",
            if generates { "they generate" } else { "they do not generate" }
        ),
        passed: generates && d as usize == gens.len(),
    })
}

fn run_checks(cat: &Catalog, unit: &Unit, opts: &QuotientOptions) -> Result<Vec<Check>> {
    let (g, p) = (&unit.presentation, unit.p);
    let (real, a) = analyze(g, p, opts)?;
    let mut checks = Vec::new();
    for (title, cell) in unit.columns.iter().zip(&unit.row.cells) {
        let c = match title.as_str() {
            "abelianization" => abelian_check(title, cell, &a.abelianization, p)?,
            "Gamma(abelianization)" => abelian_check(title, cell, &gamma_whitehead(&a.abelianization), p)?,
            "multiplier" => abelian_check(title, cell, &a.multiplier, p)?,
            "exterior square" => cell_check(cat, title, cell, &a.wedge, p)?,
            "tensor square" => cell_check(cat, title, cell, &a.tensor, p)?,
            "capability" => {
                let computed = if a.capable() { "capable" } else { "not capable" };
                Check { name: title.clone(), expected: cell.clone(), computed: computed.into(), passed: computed == cell }
            }
            "epicenter" if unit.scope == Scope::Table2 => {
                let want = parse_subgroup(g, cell, p)?;
                checks.push(Check {
                    name: "epicenter order".into(),
                    expected: want.order().to_string(),
                    computed: a.epicenter.order().to_string(),
                    passed: want.order() == a.epicenter.order(),
                });
                Check {
                    name: "epicenter".into(),
                    expected: cell.clone(),
                    computed: format!("subgroup of order {}", a.epicenter.order()),
                    passed: want.igs() == a.epicenter.igs(),
                }
            }
            "epicenter" => {
                let inv = abelian_invariants(g, &a.epicenter, None)?;
                abelian_check(title, cell, &inv, p)?
            }
            "generators of the exterior square" => generator_check(g, p, &real, cell)?,
            other => return Err(Error::Catalog(format!("unknown column `{other}`"))),
        };
        checks.push(c);
    }
    checks.extend(structural_checks(g, p, &a));
    Ok(checks)
}

pub fn run_unit(cat: &Catalog, unit: &Unit, opts: &QuotientOptions) -> RowVerdict {
    let start = Instant::now();
    let result = run_checks(cat, unit, opts);
    let runtime = start.elapsed();
    let (checks, status, error) = match result {
        Ok(checks) => {
            let status = if checks.iter().all(|c| c.passed) { Status::Pass } else { Status::Fail };
            (checks, status, None)
        }
        Err(e) => (Vec::new(), Status::Error, Some(e.to_string())),
    };
    RowVerdict {
        scope: unit.scope,
        group: unit.group.clone(),
        row: unit.row.label(),
        p: unit.p,
        checks,
        status,
        error,
        runtime,
    }
}

/// Both multiplier computations for one group.
#[derive(Clone, Debug)]
pub struct BeRow {
    pub group: String,
    pub p: u32,
    pub subspaces: Option<BESubspaces>,
    pub standard_dimensions: bool,
    pub be_multiplier: Option<AbelianInvariants>,
    pub nu_multiplier: Option<AbelianInvariants>,
    pub error: Option<String>,
}

impl BeRow {
    pub fn agrees(&self) -> bool {
        self.error.is_none() && self.be_multiplier.is_some() && self.be_multiplier == self.nu_multiplier
    }
}

/// Catalog members in the isoclinism families 4 and 5 at `p`.
pub fn be_groups(cat: &Catalog, p: u32) -> Result<Vec<(String, PcPresentation)>> {
    let mut out = Vec::new();
    for n in 3..=5 {
        for e in cat.list(n, p)? {
            if matches!(cat.spec(&e).isoclinism, 4 | 5) {
                let g = cat.instantiate(&e, p)?;
                out.push((e.name, g));
            }
        }
    }
    Ok(out)
}

pub fn be_check(name: &str, g: &PcPresentation, p: u32, opts: &QuotientOptions) -> BeRow {
    let mut row = BeRow {
        group: name.to_string(),
        p,
        subspaces: None,
        standard_dimensions: false,
        be_multiplier: None,
        nu_multiplier: None,
        error: None,
    };
    match be_setup(g, p) {
        Ok(ctx) => {
            row.standard_dimensions = ctx.standard_dimensions();
            row.subspaces = Some(be_x_dimensions(&ctx));
            row.be_multiplier = Some(be_multiplier(&ctx));
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    match crate::nu::realize_nu_with(g, p, opts).and_then(|r| {
        let w = r.wedge()?;
        r.schur_multiplier(&w)
    }) {
        Ok(m) => row.nu_multiplier = Some(m),
        Err(e) => {
            row.error.get_or_insert(e.to_string());
        }
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scope_names_round_trip() {
        for s in Scope::ALL {
            assert_eq!(s.name().parse::<Scope>().unwrap(), s);
        }
        assert!("table9".parse::<Scope>().is_err());
    }

    #[test]
    fn plans_cover_the_tables() {
        let cat = Catalog::embedded().unwrap();
        assert_eq!(plan(&cat, Scope::Table1, &[5]).unwrap().len(), 70);
        assert_eq!(plan(&cat, Scope::Table2, &[7]).unwrap().len(), 76);
        assert_eq!(plan(&cat, Scope::TheoremP3P4, &[5, 7]).unwrap().len(), 24);
        assert_eq!(plan(&cat, Scope::Table3, &[]).unwrap().len(), 44);
        assert_eq!(plan(&cat, Scope::Table4, &[]).unwrap().len(), 60);
        assert!(plan(&cat, Scope::Table1, &[3]).is_err());
    }

    #[test]
    fn one_row_each_way() {
        let cat = Catalog::embedded().unwrap();
        let opts = QuotientOptions::default();
        let units = plan(&cat, Scope::TheoremP3P4, &[5]).unwrap();
        let v = run_unit(&cat, &units[0], &opts);
        assert_eq!(v.status, Status::Pass, "{v:?}");
        let mut bad = units[0].clone();
        bad.row.cells[2] = "Z(p)".into();
        let v = run_unit(&cat, &bad, &opts);
        assert_eq!(v.status, Status::Fail);
        assert_eq!(v.checks.iter().filter(|c| !c.passed).count(), 1);
    }
}
