//! Largest p-quotients of finitely presented groups, class by class.
//!
//! Each step builds the p-covering group of the current quotient by adding a
//! central tail to every non-defining relation, then imposes consistency and
//! the relators as linear conditions on the tails. Tails that survive become
//! the next layer of the lower exponent-p central series.

use std::fmt;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::linalg;
use crate::pc::consistency::for_each_overlap;
use crate::pc::{parse_expr, ExponentVector, Expr, PcPresentation, Symbols, Word};

/// Generators and relators of a finitely presented group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpPresentation {
    names: Vec<String>,
    relators: Vec<Expr>,
}

impl FpPresentation {
    /// Relators may use generator names or positions.
    pub fn new(names: Vec<String>, relators: Vec<Expr>) -> Result<Self> {
        let relators = relators
            .iter()
            .map(|r| {
                let r = r.resolve(&names)?;
                check_indices(&r, names.len())?;
                Ok(r)
            })
            .collect::<Result<_>>()?;
        Ok(FpPresentation { names, relators })
    }

    /// Free group on `n` generators `x1..xn`.
    pub fn free(n: usize) -> Self {
        FpPresentation { names: (1..=n).map(|i| format!("x{i}")).collect(), relators: vec![] }
    }

    /// The defining relators of a pc presentation.
    pub fn from_pc(g: &PcPresentation) -> Self {
        let word = |w: &Word| {
            Expr::Mul(w.iter().map(|&(k, e)| Expr::gen(k).pow(e as i64)).collect())
        };
        let mut relators = Vec::new();
        for i in 0..g.len() {
            let lhs = Expr::gen(i).pow(g.relative_orders()[i] as i64);
            relators.push(Expr::Mul(vec![lhs, word(g.power_rule(i)).inv()]));
        }
        for j in 0..g.len() {
            for i in 0..j {
                let lhs = Expr::comm(Expr::gen(j), Expr::gen(i));
                relators.push(Expr::Mul(vec![lhs, word(g.commutator_rule(j, i)).inv()]));
            }
        }
        FpPresentation { names: g.names().to_vec(), relators }
    }

    pub fn generator_count(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn relators(&self) -> &[Expr] {
        &self.relators
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("generators: {}\n", self.names.join(", "));
        for r in &self.relators {
            out.push_str(&format!("relator: {}\n", r.render(&self.names)));
        }
        out
    }
}

impl fmt::Display for FpPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn check_indices(e: &Expr, n: usize) -> Result<()> {
    match e {
        Expr::Index(i) if *i >= n => Err(Error::UnknownGenerator(format!("#{i}"))),
        Expr::Mul(v) | Expr::Comm(v) => v.iter().try_for_each(|x| check_indices(x, n)),
        Expr::Pow(b, _) => check_indices(b, n),
        Expr::Conj(a, b) => {
            check_indices(a, n)?;
            check_indices(b, n)
        }
        _ => Ok(()),
    }
}

/// Parses `generators:` followed by `relator:` lines.
pub fn parse_fp_presentation(text: &str) -> Result<FpPresentation> {
    let mut names: Option<Vec<String>> = None;
    let mut relators = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let shift = |e: Error, col0: usize| match e {
            Error::Parse { col, msg, .. } => Error::Parse { line: ln + 1, col: col + col0, msg },
            other => other,
        };
        if let Some(rest) = line.strip_prefix("generators:") {
            names = Some(
                rest.split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect(),
            );
        } else if let Some(rest) = line.strip_prefix("relator:") {
            let col0 = raw.find("relator:").unwrap() + "relator:".len();
            relators.push(parse_expr(rest, &Symbols::new()).map_err(|e| shift(e, col0))?);
        } else {
            return Err(Error::Parse {
                line: ln + 1,
                col: 1,
                msg: "expected `generators:` or `relator:`".into(),
            });
        }
    }
    let names = names.ok_or(Error::Parse { line: 1, col: 1, msg: "missing `generators:`".into() })?;
    FpPresentation::new(names, relators)
}

/// How a pc generator of a computed quotient was introduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Definition {
    /// Image of the given fp generator.
    Image(usize),
    /// `g_j^p`.
    Power(usize),
    /// `[g_j, g_i]`.
    Comm(usize, usize),
}

#[derive(Clone, Debug)]
pub struct QuotientOptions {
    /// Ceiling on the number of pc generators.
    pub max_generators: usize,
    pub deadline: Option<Instant>,
}

impl Default for QuotientOptions {
    fn default() -> Self {
        QuotientOptions { max_generators: 200, deadline: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassRecord {
    pub class: usize,
    pub order_exponent: u32,
    pub generators: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QuotientTrace {
    pub records: Vec<ClassRecord>,
    /// The last step added nothing, so the quotient is the full p-quotient.
    pub terminal: bool,
}

/// A computed p-quotient and the epimorphism onto it.
#[derive(Clone, Debug)]
pub struct PQuotient {
    pub pres: PcPresentation,
    /// Image of each fp generator.
    pub images: Vec<ExponentVector>,
    pub definitions: Vec<Definition>,
    /// Class in which each pc generator appeared.
    pub weights: Vec<usize>,
    pub trace: QuotientTrace,
}

impl PQuotient {
    pub fn class(&self) -> usize {
        self.weights.last().copied().unwrap_or(0)
    }

    /// Images of the pc generators under the homomorphism to `dst` that sends
    /// fp generator `k` to `targets[k]`, read off the definitions.
    pub fn induced_images(
        &self,
        dst: &PcPresentation,
        targets: &[ExponentVector],
    ) -> Vec<ExponentVector> {
        let g = &self.pres;
        let mut out: Vec<ExponentVector> = Vec::with_capacity(g.len());
        for (m, def) in self.definitions.iter().enumerate() {
            let (base, rule) = match *def {
                Definition::Image(k) => {
                    out.push(targets[k].clone());
                    continue;
                }
                Definition::Power(j) => (dst.pow(&out[j], g.relative_orders()[j] as i64), g.power_rule(j)),
                Definition::Comm(j, i) => (dst.comm(&out[j], &out[i]), g.commutator_rule(j, i)),
            };
            // the rule reads w * g_m, so g_m = w^-1 * base
            let mut w = dst.identity();
            for &(k, e) in rule.iter().filter(|&&(k, _)| k != m) {
                w = dst.mul(&w, &dst.pow(&out[k], e as i64));
            }
            out.push(dst.mul(&dst.inv(&w), &base));
        }
        out
    }
}

pub fn p_quotient(fp: &FpPresentation, p: u32, max_class: usize) -> Result<PQuotient> {
    p_quotient_with(fp, p, max_class, &QuotientOptions::default())
}

pub fn p_quotient_with(
    fp: &FpPresentation,
    p: u32,
    max_class: usize,
    opts: &QuotientOptions,
) -> Result<PQuotient> {
    if !crate::pc::is_prime(p) {
        return Err(Error::Unsupported(format!("{p} is not prime")));
    }
    let d = fp.generator_count();
    let mut q = PQuotient {
        pres: PcPresentation::trivial(),
        images: vec![ExponentVector::identity(0); d],
        definitions: Vec::new(),
        weights: Vec::new(),
        trace: QuotientTrace::default(),
    };
    for class in 1..=max_class {
        let added = extend(&mut q, fp, p, class, opts)?;
        if added == 0 {
            q.trace.terminal = true;
            log::info!("p-quotient terminal at class {}", class - 1);
            break;
        }
        let rec = ClassRecord {
            class,
            order_exponent: q.pres.order_exponent(),
            generators: q.pres.len(),
        };
        log::info!(
            "p-quotient class={} order_exponent={} generators={}",
            rec.class,
            rec.order_exponent,
            rec.generators
        );
        q.trace.records.push(rec);
    }
    Ok(q)
}

fn check_deadline(opts: &QuotientOptions) -> Result<()> {
    match opts.deadline {
        Some(t) if Instant::now() >= t => Err(Error::Timeout),
        _ => Ok(()),
    }
}

/// Adds the next layer; returns the number of new generators.
fn extend(
    q: &mut PQuotient,
    fp: &FpPresentation,
    p: u32,
    class: usize,
    opts: &QuotientOptions,
) -> Result<usize> {
    let g = &q.pres;
    let n = g.len();
    let d = fp.generator_count();

    // tails on every non-defining relation
    let mut tails: Vec<Definition> = Vec::new();
    for i in 0..n {
        if !q.definitions.contains(&Definition::Power(i)) {
            tails.push(Definition::Power(i));
        }
    }
    for j in 0..n {
        for i in 0..j {
            if !q.definitions.contains(&Definition::Comm(j, i)) {
                tails.push(Definition::Comm(j, i));
            }
        }
    }
    for k in 0..d {
        if !q.definitions.contains(&Definition::Image(k)) {
            tails.push(Definition::Image(k));
        }
    }
    let t = tails.len();
    let tail_of = |def: Definition| tails.iter().position(|&x| x == def).map(|k| n + k);

    let mut names: Vec<String> = g.names().to_vec();
    names.extend((0..t).map(|k| format!("t{}", k + 1)));
    let mut powers = Vec::with_capacity(n + t);
    for i in 0..n {
        let mut w = g.power_rule(i).clone();
        if let Some(c) = tail_of(Definition::Power(i)) {
            w.push((c, 1));
        }
        powers.push(w);
    }
    powers.extend(std::iter::repeat_n(Word::new(), t));
    let mut comms = Vec::new();
    for j in 0..n {
        for i in 0..j {
            let mut w = g.commutator_rule(j, i).clone();
            if let Some(c) = tail_of(Definition::Comm(j, i)) {
                w.push((c, 1));
            }
            if !w.is_empty() {
                comms.push((j, i, w));
            }
        }
    }
    let cover = PcPresentation::new(names, vec![p; n + t], powers, comms)?;
    let images: Vec<ExponentVector> = (0..d)
        .map(|k| {
            let mut v = q.images[k].as_slice().to_vec();
            v.resize(n + t, 0);
            if let Some(c) = tail_of(Definition::Image(k)) {
                v[c] = 1;
            }
            ExponentVector::from_vec(v)
        })
        .collect();

    // linear conditions on the tails
    let mut rows: Vec<Vec<u32>> = Vec::new();
    let mut push_diff = |l: &ExponentVector, r: &ExponentVector| -> Result<()> {
        if l.as_slice()[..n] != r.as_slice()[..n] {
            return Err(Error::Inconsistent("quotient presentation lost consistency".into()));
        }
        let row: Vec<u32> = (n..n + t).map(|c| (l[c] + p - r[c]) % p).collect();
        if row.iter().any(|&e| e != 0) {
            rows.push(row);
        }
        Ok(())
    };
    let mut count = 0usize;
    for_each_overlap(&cover, n, |_, l, r| {
        count += 1;
        if count.is_multiple_of(256) {
            check_deadline(opts)?;
        }
        push_diff(&l, &r)
    })?;
    let identity = cover.identity();
    for rel in fp.relators() {
        check_deadline(opts)?;
        let v = cover.eval_expr(rel, &images)?;
        push_diff(&v, &identity)?;
    }
    let pivots = linalg::rref(&mut rows, p);
    let free: Vec<usize> = (0..t).filter(|c| !pivots.contains(c)).collect();
    if free.is_empty() {
        return Ok(0);
    }
    if n + free.len() > opts.max_generators {
        return Err(Error::Budget(format!(
            "class {class} needs {} pc generators, ceiling is {}",
            n + free.len(),
            opts.max_generators
        )));
    }

    // tail c in terms of the surviving tails
    let value = |c: usize| -> Word {
        if let Some(pos) = free.iter().position(|&f| f == c) {
            return vec![(n + pos, 1)];
        }
        let r = pivots.iter().position(|&pc| pc == c).unwrap();
        free.iter()
            .enumerate()
            .filter(|&(_, &f)| rows[r][f] != 0)
            .map(|(pos, &f)| (n + pos, p - rows[r][f]))
            .collect()
    };
    let m = n + free.len();
    let names: Vec<String> = (1..=m).map(|k| format!("g{k}")).collect();
    let mut powers = Vec::with_capacity(m);
    for i in 0..n {
        let mut w = g.power_rule(i).clone();
        if let Some(c) = tail_of(Definition::Power(i)) {
            w.extend(value(c - n));
        }
        powers.push(w);
    }
    powers.extend(std::iter::repeat_n(Word::new(), free.len()));
    let mut comms = Vec::new();
    for j in 0..n {
        for i in 0..j {
            let mut w = g.commutator_rule(j, i).clone();
            if let Some(c) = tail_of(Definition::Comm(j, i)) {
                w.extend(value(c - n));
            }
            if !w.is_empty() {
                comms.push((j, i, w));
            }
        }
    }
    let pres = PcPresentation::new(names, vec![p; m], powers, comms)?;
    let images = (0..d)
        .map(|k| {
            let mut v = q.images[k].as_slice().to_vec();
            v.resize(m, 0);
            if let Some(c) = tail_of(Definition::Image(k)) {
                for (g, e) in value(c - n) {
                    v[g] = e;
                }
            }
            ExponentVector::from_vec(v)
        })
        .collect();
    q.definitions.extend(free.iter().map(|&f| tails[f]));
    q.weights.extend(std::iter::repeat_n(class, free.len()));
    q.pres = pres;
    q.images = images;
    Ok(free.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pc::{check_consistency, parse_pc_presentation};

    #[test]
    fn free_class_one() {
        let q = p_quotient(&FpPresentation::free(2), 5, 1).unwrap();
        assert_eq!(q.pres.order_exponent(), 2);
        assert!(q.pres.is_abelian());
        assert!(!q.trace.terminal);
    }

    #[test]
    fn free_class_two_is_heisenberg_sized() {
        // free 2-generator group of exponent-p class 2: order p^(2+2+1)
        let q = p_quotient(&FpPresentation::free(2), 5, 2).unwrap();
        assert_eq!(q.pres.order_exponent(), 5);
        assert!(check_consistency(&q.pres).is_empty());
    }

    #[test]
    fn cyclic_relators() {
        let fp = parse_fp_presentation("generators: a\nrelator: a^25").unwrap();
        let q = p_quotient(&fp, 5, 10).unwrap();
        assert!(q.trace.terminal);
        assert_eq!(q.pres.order_exponent(), 2);
        let fp = parse_fp_presentation("generators: a\nrelator: a^6").unwrap();
        let q = p_quotient(&fp, 5, 10).unwrap();
        assert_eq!(q.pres.order_exponent(), 0);
    }

    #[test]
    fn round_trip_of_pc_group() {
        let g = parse_pc_presentation(
            "generators: a, a1, a2\na^25 = a2\norder(a1)=5\norder(a2)=5\n[a1,a] = a2",
        )
        .unwrap();
        let q = p_quotient(&FpPresentation::from_pc(&g), 5, 10).unwrap();
        assert!(q.trace.terminal);
        assert_eq!(q.pres.order_exponent(), g.order_exponent());
        let orders: Vec<u32> = q.trace.records.iter().map(|r| r.order_exponent).collect();
        assert!(orders.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn budget_is_reported() {
        let opts = QuotientOptions { max_generators: 3, deadline: None };
        let r = p_quotient_with(&FpPresentation::free(2), 5, 3, &opts);
        assert!(matches!(r, Err(Error::Budget(_))));
    }

    #[test]
    fn text_format() {
        let fp = parse_fp_presentation("generators: a, b\nrelator: [a,b]\nrelator: a^5\n").unwrap();
        assert_eq!(fp.relators().len(), 2);
        assert_eq!(parse_fp_presentation(&fp.to_text()).unwrap(), fp);
        assert!(parse_fp_presentation("generators: a\nrelator: c").is_err());
        match parse_fp_presentation("generators: a\nrelator: a^") {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
    }
}
