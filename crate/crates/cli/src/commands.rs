use std::path::Path;
use std::time::{Duration, Instant};

use anyhow::{anyhow, bail, Context, Result};
use rayon::prelude::*;
use serde_json::{json, Value};

use pgx_core::catalog::{render_abelian, Catalog};
use pgx_core::functors::gamma_whitehead;
use pgx_core::nu::{analyze, Analysis};
use pgx_core::pc::{abelian_invariants, parse_pc_presentation_with, PcPresentation, Symbols};
use pgx_core::pquotient::QuotientOptions;
use pgx_core::verify::{be_check, be_groups, describe_group, plan, run_unit, BeRow, RowVerdict, Scope, Status};

use crate::output::{json_document, Meta, Table};
use crate::{Cli, Command, Format, Global};

pub fn run(cli: &Cli) -> Result<u8> {
    let g = &cli.global;
    if !(g.timeout > 0.0 && g.timeout.is_finite()) {
        bail!("--timeout must be a positive number of seconds");
    }
    let cat = Catalog::load()?;
    let meta = Meta { enabled: !g.no_meta, catalog: cat.origin().to_string() };
    let ctx = Ctx { cat: &cat, global: g, meta };
    match &cli.command {
        Command::Info { group } => ctx.info(group),
        Command::Table { order, capability } => ctx.table(order, *capability),
        Command::Verify { scope, be_cross } => ctx.verify(scope, *be_cross),
        Command::Catalog { name, order } => ctx.catalog(name.as_deref(), order.as_deref()),
        Command::BeCheck { groups } => ctx.be_check(groups),
    }
}

struct Ctx<'a> {
    cat: &'a Catalog,
    global: &'a Global,
    meta: Meta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Order {
    Power(u32),
    Fixture(u32, u32),
}

fn parse_order(s: &str) -> Result<Order> {
    match s {
        "p3" => Ok(Order::Power(3)),
        "p4" => Ok(Order::Power(4)),
        "p5" => Ok(Order::Power(5)),
        "32" => Ok(Order::Fixture(32, 2)),
        "243" => Ok(Order::Fixture(243, 3)),
        _ => bail!("unsupported order `{s}` (expected p3, p4, p5, 32 or 243)"),
    }
}

fn seconds(d: Duration) -> f64 {
    (d.as_secs_f64() * 1000.0).round() / 1000.0
}

impl Ctx<'_> {
    fn options(&self) -> QuotientOptions {
        QuotientOptions {
            deadline: Some(Instant::now() + Duration::from_secs_f64(self.global.timeout)),
            ..QuotientOptions::default()
        }
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.global.jobs)
            .build()
            .context("cannot start worker threads")
    }

    fn one_prime(&self) -> Result<Option<u32>> {
        match self.global.primes.as_slice() {
            [] => Ok(None),
            [p] => Ok(Some(*p)),
            _ => bail!("this command takes a single --p"),
        }
    }

    fn primes_or(&self, default: &[u32]) -> Vec<u32> {
        if self.global.primes.is_empty() {
            default.to_vec()
        } else {
            self.global.primes.clone()
        }
    }

    fn emit(&self, command: &str, table: &Table, body: Value, notes: &[String]) -> Result<()> {
        let text = match self.global.format() {
            Format::Json => json_document(command, body, &self.meta),
            Format::Csv => table.csv().map_err(|e| anyhow!(e))?,
            Format::Md => {
                let mut s = table.markdown();
                for n in notes {
                    s.push('\n');
                    s.push_str(n);
                    s.push('\n');
                }
                if let Some(f) = self.meta.footer() {
                    s.push('\n');
                    s.push_str(&f);
                    s.push('\n');
                }
                s
            }
        };
        print!("{text}");
        Ok(())
    }

    /// Catalog name, X / Y, `SmallGroup(order,id)` or a presentation file.
    fn resolve(&self, text: &str, p: Option<u32>) -> Result<(String, PcPresentation, u32)> {
        let path = Path::new(text);
        if path.is_file() {
            let src = std::fs::read_to_string(path).with_context(|| format!("cannot read {text}"))?;
            let mut sym = Symbols::new();
            if let Some(p) = p {
                sym.insert("p".into(), p as i64);
            }
            let g = parse_pc_presentation_with(&src, &sym).with_context(|| format!("in {text}"))?;
            let v = pgx_core::pc::check_consistency(&g);
            if let Some(first) = v.first() {
                bail!("{text}: presentation is inconsistent ({} violations, first at {})", v.len(), first.instance);
            }
            let p = match (p, g.prime()) {
                (Some(p), Some(q)) if p != q => bail!("{text} presents a {q}-group, not a {p}-group"),
                (_, Some(q)) => q,
                (Some(p), None) => p,
                (None, None) => bail!("{text} presents the trivial group; give --p"),
            };
            return Ok((text.to_string(), g, p));
        }
        if let Some(body) = text.strip_prefix("SmallGroup(").and_then(|s| s.strip_suffix(')')) {
            let (o, id) = body.split_once(',').ok_or_else(|| anyhow!("expected SmallGroup(order,id)"))?;
            let (o, id): (u32, u32) = (o.trim().parse()?, id.trim().parse()?);
            let g = self.cat.fixture_group(o, id)?;
            let q = g.prime().unwrap_or(2);
            return Ok((format!("SmallGroup({o},{id})"), g, q));
        }
        if self.cat.auxiliary_names().contains(&text) {
            let g = self.cat.auxiliary_group(text)?;
            let q = g.prime().unwrap_or(3);
            return Ok((text.to_string(), g, q));
        }
        let p = p.ok_or_else(|| anyhow!("catalog groups need --p"))?;
        let e = self.cat.entry(text, p)?;
        Ok((e.name.clone(), self.cat.instantiate(&e, p)?, p))
    }

    fn info(&self, group: &str) -> Result<u8> {
        let (name, g, p) = self.resolve(group, self.one_prime()?)?;
        let start = Instant::now();
        let (_, a) = analyze(&g, p, &self.options())?;
        let gamma = gamma_whitehead(&a.abelianization);
        let wedge = describe_group(self.cat, &a.wedge, p);
        let tensor = describe_group(self.cat, &a.tensor, p);
        let epi: Vec<String> = a.epicenter.igs().iter().map(|x| g.format(x)).collect();
        let epi_text = if epi.is_empty() { "1".to_string() } else { format!("<{}>", epi.join(", ")) };
        let rows = vec![
            ("group", name.clone()),
            ("p", p.to_string()),
            ("order", format!("{p}^{}", g.order_exponent())),
            ("class", a.class.to_string()),
            ("G^ab", render_abelian(&a.abelianization, p)),
            ("Γ(G^ab)", render_abelian(&gamma, p)),
            ("M(G)", render_abelian(&a.multiplier, p)),
            ("G∧G", wedge.clone()),
            ("G⊗G", tensor.clone()),
            ("capable", if a.capable() { "yes" } else { "no" }.to_string()),
            ("epicenter", epi_text),
            ("|epicenter|", a.epicenter.order().to_string()),
            ("ν(G)", format!("order {p}^{}, class {}", a.nu_order_exponent, a.nu_class)),
        ];
        let mut table = Table::new(&["invariant", "value"]);
        table.rows = rows.iter().map(|(k, v)| vec![k.to_string(), v.clone()]).collect();
        let mut body = json!({
            "group": name,
            "p": p,
            "order_exponent": g.order_exponent(),
            "class": a.class,
            "abelianization": render_abelian(&a.abelianization, p),
            "abelianization_invariants": a.abelianization.divisors(),
            "gamma": render_abelian(&gamma, p),
            "multiplier": render_abelian(&a.multiplier, p),
            "multiplier_invariants": a.multiplier.divisors(),
            "exterior_square": wedge,
            "exterior_square_order": a.wedge.fingerprint.order.to_string(),
            "tensor_square": tensor,
            "tensor_square_order": a.tensor.fingerprint.order.to_string(),
            "capable": a.capable(),
            "epicenter_generators": epi,
            "epicenter_order": a.epicenter.order().to_string(),
            "nu_order_exponent": a.nu_order_exponent,
            "nu_class": a.nu_class,
        });
        if self.meta.enabled {
            body["runtime_seconds"] = json!(seconds(start.elapsed()));
        }
        self.emit("info", &table, body, &[])?;
        Ok(0)
    }

    fn analyze_all(&self, groups: &[(String, PcPresentation, u32)]) -> Result<Vec<Result<Analysis, String>>> {
        let pool = self.pool()?;
        Ok(pool.install(|| {
            groups
                .par_iter()
                .map(|(_, g, p)| analyze(g, *p, &self.options()).map(|(_, a)| a).map_err(|e| e.to_string()))
                .collect()
        }))
    }

    fn table(&self, order: &str, capability: bool) -> Result<u8> {
        let order = parse_order(order)?;
        let groups: Vec<(String, PcPresentation, u32)> = match order {
            Order::Power(n) => {
                let p = self.one_prime()?.unwrap_or(5);
                self.cat
                    .list(n, p)?
                    .into_iter()
                    .map(|e| Ok((e.name.clone(), self.cat.instantiate(&e, p)?, p)))
                    .collect::<Result<_>>()?
            }
            Order::Fixture(o, p) => {
                if let Some(q) = self.one_prime()? {
                    if q != p {
                        bail!("order {o} fixes p = {p}");
                    }
                }
                self.cat
                    .fixture_ids(o)
                    .into_iter()
                    .map(|id| Ok((id.to_string(), self.cat.fixture_group(o, id)?, p)))
                    .collect::<Result<_>>()?
            }
        };
        let results = self.analyze_all(&groups)?;
        let fixture = matches!(order, Order::Fixture(..));
        let mut table = if fixture {
            Table::new(&["Group ID", "M(G)", "G∧G", "G⊗G", "capability", "epicenter"])
        } else if capability {
            Table::new(&["G", "capability", "epicenter", "|epicenter|"])
        } else {
            Table::new(&["G", "G^ab", "Γ(G^ab)", "M(G)", "G∧G", "G⊗G"])
        };
        let mut errors = 0;
        for ((name, g, p), r) in groups.iter().zip(&results) {
            let p = *p;
            let a = match r {
                Ok(a) => a,
                Err(e) => {
                    errors += 1;
                    let mut row = vec![name.clone(), format!("error: {e}")];
                    row.resize(table.columns.len(), String::new());
                    table.rows.push(row);
                    continue;
                }
            };
            let cap = if a.capable() { "capable" } else { "not capable" }.to_string();
            let row = if fixture {
                let epi = abelian_invariants(g, &a.epicenter, None)?;
                vec![
                    name.clone(),
                    render_abelian(&a.multiplier, p),
                    describe_group(self.cat, &a.wedge, p),
                    describe_group(self.cat, &a.tensor, p),
                    cap,
                    render_abelian(&epi, p),
                ]
            } else if capability {
                let gens: Vec<String> = a.epicenter.igs().iter().map(|x| g.format(x)).collect();
                let epi = if gens.is_empty() { "1".into() } else { format!("<{}>", gens.join(", ")) };
                vec![name.clone(), cap, epi, a.epicenter.order().to_string()]
            } else {
                vec![
                    name.clone(),
                    render_abelian(&a.abelianization, p),
                    render_abelian(&gamma_whitehead(&a.abelianization), p),
                    render_abelian(&a.multiplier, p),
                    describe_group(self.cat, &a.wedge, p),
                    describe_group(self.cat, &a.tensor, p),
                ]
            };
            table.rows.push(row);
        }
        let (order_label, p) = match order {
            Order::Power(n) => (format!("p^{n}"), groups.first().map_or(5, |x| x.2)),
            Order::Fixture(o, p) => (o.to_string(), p),
        };
        let body = json!({
            "order": order_label,
            "p": p,
            "columns": table.columns,
            "rows": table.json_rows(),
        });
        self.emit("table", &table, body, &[])?;
        Ok(if errors > 0 { 2 } else { 0 })
    }

    fn verify(&self, scopes: &[String], be_cross: bool) -> Result<u8> {
        let scopes: Vec<Scope> = if scopes.is_empty() {
            Scope::ALL.to_vec()
        } else {
            scopes.iter().map(|s| s.parse()).collect::<Result<_, _>>()?
        };
        let primes = self.primes_or(&[5]);
        let mut units = Vec::new();
        for s in &scopes {
            units.extend(plan(self.cat, *s, &primes)?);
        }
        let pool = self.pool()?;
        let verdicts: Vec<RowVerdict> =
            pool.install(|| units.par_iter().map(|u| run_unit(self.cat, u, &self.options())).collect());
        let be_rows = if be_cross { self.be_rows(&[], &primes)? } else { Vec::new() };

        let count = |s: Status| verdicts.iter().filter(|v| v.status == s).count();
        let (pass, fail, error) = (count(Status::Pass), count(Status::Fail), count(Status::Error));
        let be_disagree = be_rows.iter().filter(|r| !r.agrees()).count();

        let mut cols = vec!["scope", "group", "p", "result", "details"];
        if self.meta.enabled {
            cols.push("seconds");
        }
        let mut table = Table::new(&cols);
        for v in &verdicts {
            let details = match (&v.error, v.status) {
                (Some(e), _) => e.clone(),
                (None, Status::Pass) => format!("{} checks", v.checks.len()),
                _ => v
                    .checks
                    .iter()
                    .filter(|c| !c.passed)
                    .map(|c| format!("{}: expected {}, computed {}", c.name, c.expected, c.computed))
                    .collect::<Vec<_>>()
                    .join("; "),
            };
            let mut row = vec![v.scope.to_string(), v.group.clone(), v.p.to_string(), v.status.as_str().into(), details];
            if self.meta.enabled {
                row.push(format!("{:.3}", v.runtime.as_secs_f64()));
            }
            table.rows.push(row);
        }
        let mut notes = vec![format!("{} rows: {pass} pass, {fail} fail, {error} error", verdicts.len())];
        if be_cross {
            notes.push(format!(
                "multiplier engines on Phi4/Phi5: {} groups, {} disagreements",
                be_rows.len(),
                be_disagree
            ));
        }
        let rows: Vec<Value> = verdicts
            .iter()
            .map(|v| {
                let mut r = json!({
                    "scope": v.scope.name(),
                    "group": v.group,
                    "row": v.row,
                    "p": v.p,
                    "status": v.status.as_str(),
                    "checks": v.checks.iter().map(|c| json!({
                        "name": c.name, "expected": c.expected, "computed": c.computed, "passed": c.passed,
                    })).collect::<Vec<_>>(),
                });
                if let Some(e) = &v.error {
                    r["error"] = json!(e);
                }
                if self.meta.enabled {
                    r["runtime_seconds"] = json!(seconds(v.runtime));
                }
                r
            })
            .collect();
        let mut body = json!({
            "scopes": scopes.iter().map(|s| s.name()).collect::<Vec<_>>(),
            "primes": primes,
            "rows": rows,
            "summary": {"total": verdicts.len(), "pass": pass, "fail": fail, "error": error},
        });
        if be_cross {
            body["be_cross"] = json!({
                "rows": be_rows.iter().map(be_json).collect::<Vec<_>>(),
                "disagreements": be_disagree,
            });
        }
        self.emit("verify", &table, body, &notes)?;
        Ok(if fail > 0 || be_disagree > 0 {
            1
        } else if error > 0 {
            2
        } else {
            0
        })
    }

    fn be_rows(&self, names: &[String], primes: &[u32]) -> Result<Vec<BeRow>> {
        let mut groups = Vec::new();
        for &p in primes.iter().filter(|&&p| p >= 5) {
            if names.is_empty() {
                groups.extend(be_groups(self.cat, p)?.into_iter().map(|(n, g)| (n, g, p)));
            } else {
                for n in names {
                    groups.push(self.resolve(n, Some(p))?);
                }
            }
        }
        let pool = self.pool()?;
        Ok(pool.install(|| {
            groups.par_iter().map(|(n, g, p)| be_check(n, g, *p, &self.options())).collect()
        }))
    }

    fn be_check(&self, names: &[String]) -> Result<u8> {
        let primes = self.primes_or(&[5]);
        if primes.iter().any(|&p| p < 5) && names.is_empty() {
            bail!("the Phi4 and Phi5 catalog groups are available for p >= 5");
        }
        let rows = if names.is_empty() {
            self.be_rows(&[], &primes)?
        } else {
            let mut out = Vec::new();
            for &p in &primes {
                for n in names {
                    let (label, g, q) = self.resolve(n, Some(p))?;
                    out.push(be_check(&label, &g, q, &self.options()));
                }
            }
            out
        };
        let mut table =
            Table::new(&["G", "p", "dim X1", "dim X2", "dim X", "|N|", "M (linear algebra)", "M (ν)", "agree", "note"]);
        for r in &rows {
            let s = r.subspaces.as_ref();
            let dim = |f: fn(&pgx_core::special_be::BESubspaces) -> usize| s.map_or("-".into(), |s| f(s).to_string());
            let m = |x: &Option<pgx_core::snf::AbelianInvariants>| {
                x.as_ref().map_or("-".into(), |a| render_abelian(a, r.p))
            };
            let note = match (&r.error, s) {
                (Some(e), _) => e.clone(),
                (None, Some(_)) if !r.standard_dimensions => "dimensions outside the (3, 2) case".into(),
                _ => String::new(),
            };
            table.rows.push(vec![
                r.group.clone(),
                r.p.to_string(),
                dim(|s| s.dim_x1),
                dim(|s| s.dim_x2),
                dim(|s| s.dim_x),
                s.map_or("-".into(), |s| format!("p^{}", s.dim_n)),
                m(&r.be_multiplier),
                m(&r.nu_multiplier),
                if r.agrees() { "yes" } else { "no" }.into(),
                note,
            ]);
        }
        let disagree = rows.iter().filter(|r| !r.agrees()).count();
        let errors = rows.iter().filter(|r| r.error.is_some()).count();
        let body = json!({
            "rows": rows.iter().map(be_json).collect::<Vec<_>>(),
            "summary": {"total": rows.len(), "disagreements": disagree, "errors": errors},
        });
        let notes = vec![format!("{} groups, {} disagreements", rows.len(), disagree)];
        self.emit("be-check", &table, body, &notes)?;
        Ok(if errors > 0 && disagree == errors {
            2
        } else if disagree > 0 {
            1
        } else {
            0
        })
    }

    fn catalog(&self, name: Option<&str>, order: Option<&str>) -> Result<u8> {
        let p = self.one_prime()?;
        if let Some(name) = name {
            let (label, g, p) = self.resolve(name, p.or(Some(5)))?;
            let spec = self.cat.entry(&label, p).ok().map(|e| self.cat.spec(&e).clone());
            let mut table = Table::new(&["field", "value"]);
            table.rows.push(vec!["group".into(), label.clone()]);
            table.rows.push(vec!["p".into(), p.to_string()]);
            table.rows.push(vec!["order".into(), format!("{p}^{}", g.order_exponent())]);
            if let Some(s) = &spec {
                table.rows.push(vec!["family".into(), s.name.clone()]);
                table.rows.push(vec!["isoclinism".into(), s.isoclinism.to_string()]);
            }
            let text = g.to_text();
            let mut body = json!({"group": label, "p": p, "order_exponent": g.order_exponent(), "presentation": text});
            if let Some(s) = &spec {
                body["family"] = json!(s.name);
                body["isoclinism"] = json!(s.isoclinism);
            }
            match self.global.format() {
                Format::Md => {
                    print!("{}\n```\n{}```\n", table.markdown(), text);
                    if let Some(f) = self.meta.footer() {
                        println!("\n{f}");
                    }
                }
                _ => {
                    table.rows.push(vec!["presentation".into(), text]);
                    self.emit("catalog", &table, body, &[])?;
                }
            }
            return Ok(0);
        }
        let orders: Vec<Order> = match order {
            Some(o) => vec![parse_order(o)?],
            None => vec![Order::Power(3), Order::Power(4), Order::Power(5)],
        };
        let mut table = Table::new(&["G", "family", "isoclinism", "parameter", "order"]);
        for o in orders {
            match o {
                Order::Power(n) => {
                    let p = p.unwrap_or(5);
                    for e in self.cat.list(n, p)? {
                        let s = self.cat.spec(&e);
                        let param = match (&s.parameter, &e.param) {
                            (Some(d), Some(v)) => format!("{} = {} ({})", d.symbol, v.label, v.value),
                            _ => String::new(),
                        };
                        table.rows.push(vec![e.name.clone(), s.name.clone(), s.isoclinism.to_string(), param, format!("{p}^{n}")]);
                    }
                }
                Order::Fixture(o, _) => {
                    for id in self.cat.fixture_ids(o) {
                        table.rows.push(vec![format!("SmallGroup({o},{id})"), String::new(), String::new(), String::new(), o.to_string()]);
                    }
                }
            }
        }
        let body = json!({"p": p.unwrap_or(5), "rows": table.json_rows(), "count": table.rows.len()});
        self.emit("catalog", &table, body, &[format!("{} groups", table.rows.len())])?;
        Ok(0)
    }
}

fn be_json(r: &BeRow) -> Value {
    let s = r.subspaces.as_ref();
    json!({
        "group": r.group,
        "p": r.p,
        "dim_x1": s.map(|s| s.dim_x1),
        "dim_x2": s.map(|s| s.dim_x2),
        "dim_x": s.map(|s| s.dim_x),
        "dim_n": s.map(|s| s.dim_n),
        "dim_ker_rho": s.map(|s| s.dim_ker_rho),
        "standard_dimensions": r.standard_dimensions,
        "be_multiplier": r.be_multiplier.as_ref().map(|a| render_abelian(a, r.p)),
        "nu_multiplier": r.nu_multiplier.as_ref().map(|a| render_abelian(a, r.p)),
        "agree": r.agrees(),
        "error": r.error,
    })
}
