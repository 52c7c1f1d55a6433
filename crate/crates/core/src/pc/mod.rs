//! Power-commutator presentations of finite p-groups and collection.

pub(crate) mod consistency;
mod fingerprint;
mod identity;
pub mod parse;
mod subgroup;

pub use consistency::{check_consistency, Violation};
pub use fingerprint::{fingerprint, StructureFingerprint};
pub use identity::verify_power_commutator_identity;
pub use parse::{eval_integer, parse_expr, parse_pc_presentation, parse_pc_presentation_with, Expr, Symbols};
pub use subgroup::{
    abelian_group_invariants, center, Homomorphism,
    abelian_invariants, characteristic_subgroups, kernel_of, quotient_by, subgroup_closure,
    Characteristic, Quotient, SubPresentation, Subgroup,
};

use std::fmt;
use std::ops::Index;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A normal word: `(generator, exponent)` pairs in strictly increasing generator order.
pub type Word = Vec<(usize, u32)>;

/// Exponents `e` of the normal form `g_1^e_1 ... g_n^e_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExponentVector(Vec<u32>);

impl ExponentVector {
    pub fn identity(n: usize) -> Self {
        ExponentVector(vec![0; n])
    }

    pub fn from_vec(v: Vec<u32>) -> Self {
        ExponentVector(v)
    }

    /// `g_i^e` in a group with `n` generators.
    pub fn unit(n: usize, i: usize, e: u32) -> Self {
        let mut v = vec![0; n];
        v[i] = e;
        ExponentVector(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Index of the first non-zero exponent.
    pub fn depth(&self) -> Option<usize> {
        self.0.iter().position(|&e| e != 0)
    }

    pub fn leading(&self) -> u32 {
        self.depth().map_or(0, |d| self.0[d])
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.0
    }

    pub fn to_word(&self) -> Word {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e != 0)
            .map(|(i, &e)| (i, e))
            .collect()
    }

    fn from_word(n: usize, w: &[(usize, u32)]) -> Self {
        let mut v = vec![0; n];
        for &(g, e) in w {
            v[g] = e;
        }
        ExponentVector(v)
    }
}

impl Index<usize> for ExponentVector {
    type Output = u32;
    fn index(&self, i: usize) -> &u32 {
        &self.0[i]
    }
}

#[derive(Debug)]
struct Inner {
    names: Vec<String>,
    orders: Vec<u32>,
    powers: Vec<Word>,
    /// `comms[j][i]` for `i < j` is the normal word for `[g_j, g_i]`.
    comms: Vec<Vec<Word>>,
    /// Generators from here on are central with trivial power relations.
    central_from: usize,
}

/// A power-commutator presentation. Cheap to clone; immutable once built.
#[derive(Clone, Debug)]
pub struct PcPresentation {
    inner: Arc<Inner>,
}

impl PartialEq for PcPresentation {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.orders == other.inner.orders
                && self.inner.powers == other.inner.powers
                && self.inner.comms == other.inner.comms)
    }
}

impl PcPresentation {
    /// Builds a presentation from its rules. Relative orders that are proper prime
    /// powers are refined, so the result always has prime relative orders.
    ///
    /// `comms` lists the non-trivial rules `(j, i, word)` meaning `[g_j, g_i] = word`.
    pub fn new(
        names: Vec<String>,
        orders: Vec<u32>,
        powers: Vec<Word>,
        comms: Vec<(usize, usize, Word)>,
    ) -> Result<Self> {
        let n = names.len();
        if orders.len() != n || powers.len() != n {
            return Err(Error::Structure("rule tables do not match the generator count".into()));
        }
        let mut table: Vec<Vec<Word>> = (0..n).map(|j| vec![Vec::new(); j]).collect();
        for (j, i, w) in comms {
            if i >= j || j >= n {
                return Err(Error::Structure(format!(
                    "commutator rule [{j},{i}] must have its first index larger"
                )));
            }
            table[j][i] = w;
        }
        let raw = Self::from_parts(names, orders, powers, table)?;
        if raw.inner.orders.iter().all(|&o| is_prime(o)) {
            Ok(raw)
        } else {
            raw.refined()
        }
    }

    fn from_parts(
        names: Vec<String>,
        orders: Vec<u32>,
        powers: Vec<Word>,
        comms: Vec<Vec<Word>>,
    ) -> Result<Self> {
        let n = names.len();
        let mut prime = None;
        for (i, &o) in orders.iter().enumerate() {
            if o < 2 {
                return Err(Error::Structure(format!(
                    "relative order of {} is {o}, must be at least 2",
                    names[i]
                )));
            }
            let q = prime_power_base(o).ok_or_else(|| {
                Error::Structure(format!("relative order {o} of {} is not a prime power", names[i]))
            })?;
            match prime {
                None => prime = Some(q),
                Some(p) if p != q => {
                    return Err(Error::Structure(format!(
                        "relative orders mix the primes {p} and {q}"
                    )))
                }
                _ => {}
            }
        }
        let check = |w: &Word, after: usize, what: &str| -> Result<()> {
            let mut last = None;
            for &(g, e) in w {
                if g <= after || g >= n {
                    return Err(Error::Structure(format!(
                        "right-hand side of {what} mentions a generator that is not later than {}",
                        names[after]
                    )));
                }
                if last.is_some_and(|l| l >= g) {
                    return Err(Error::Structure(format!(
                        "right-hand side of {what} is not a normal word"
                    )));
                }
                if e == 0 || e >= orders[g] {
                    return Err(Error::OutOfRange { index: g, value: e, order: orders[g] });
                }
                last = Some(g);
            }
            Ok(())
        };
        for i in 0..n {
            check(&powers[i], i, &format!("the power rule of {}", names[i]))?;
            for k in 0..i {
                check(
                    &comms[i][k],
                    i,
                    &format!("[{},{}]", names[i], names[k]),
                )?;
            }
        }
        let mut central_from = n;
        while central_from > 0 {
            let c = central_from - 1;
            let central = powers[c].is_empty()
                && comms[c].iter().all(|w| w.is_empty())
                && (c + 1..n).all(|j| comms[j][c].is_empty());
            if !central {
                break;
            }
            central_from = c;
        }
        Ok(PcPresentation {
            inner: Arc::new(Inner { names, orders, powers, comms, central_from }),
        })
    }

    /// Replaces every generator of relative order `p^k` by `g, g^p, ..., g^(p^(k-1))`.
    fn refined(&self) -> Result<Self> {
        let old = &*self.inner;
        let n = old.names.len();
        let mut start = Vec::with_capacity(n);
        let mut names = Vec::new();
        let mut pieces: Vec<(usize, u32)> = Vec::new(); // (old generator, p^t)
        let mut p = 0;
        for i in 0..n {
            start.push(names.len());
            let q = prime_power_base(old.orders[i]).unwrap();
            p = q;
            let k = log_base(old.orders[i], q);
            let mut pw = 1;
            for t in 0..k {
                if t == 0 {
                    names.push(old.names[i].clone());
                } else {
                    names.push(format!("{}_p{t}", old.names[i]));
                }
                pieces.push((i, pw));
                pw *= q;
            }
        }
        let m = names.len();
        let convert = |v: &ExponentVector| -> Word {
            let mut w = Word::new();
            for i in 0..n {
                let mut e = v[i];
                let mut pos = start[i];
                while e > 0 {
                    let d = e % p;
                    if d != 0 {
                        w.push((pos, d));
                    }
                    e /= p;
                    pos += 1;
                }
            }
            w
        };
        let element = |idx: usize| -> ExponentVector {
            let (g, e) = pieces[idx];
            ExponentVector::unit(n, g, e)
        };
        let mut powers = Vec::with_capacity(m);
        for idx in 0..m {
            let (g, e) = pieces[idx];
            if e * p < old.orders[g] {
                powers.push(vec![(idx + 1, 1)]);
            } else {
                powers.push(convert(&ExponentVector::from_word(n, &old.powers[g])));
            }
        }
        let mut comms: Vec<Vec<Word>> = (0..m).map(|j| vec![Vec::new(); j]).collect();
        for j in 0..m {
            for i in 0..j {
                if pieces[i].0 == pieces[j].0 {
                    continue;
                }
                let c = self.comm(&element(j), &element(i));
                comms[j][i] = convert(&c);
            }
        }
        let mut seen = std::collections::HashSet::new();
        for name in &names {
            if !seen.insert(name.clone()) {
                return Err(Error::Structure(format!(
                    "refinement produced a duplicate generator name `{name}`"
                )));
            }
        }
        Self::from_parts(names, vec![p; m], powers, comms)
    }

    /// Trivial group.
    pub fn trivial() -> Self {
        Self::from_parts(vec![], vec![], vec![], vec![]).unwrap()
    }

    /// Direct product of cyclic groups of the given prime-power orders.
    pub fn abelian(orders: &[u32]) -> Result<Self> {
        let names = (0..orders.len()).map(|i| format!("z{}", i + 1)).collect();
        Self::new(names, orders.to_vec(), vec![Vec::new(); orders.len()], vec![])
    }

    /// `self x other`, generators of `self` first.
    pub fn direct_product(&self, other: &PcPresentation) -> Result<Self> {
        let n = self.len();
        let m = other.len();
        let mut names: Vec<String> = self.inner.names.clone();
        for name in &other.inner.names {
            let mut candidate = name.clone();
            while names.contains(&candidate) {
                candidate.push('\'');
            }
            names.push(candidate);
        }
        let mut orders = self.inner.orders.clone();
        orders.extend_from_slice(&other.inner.orders);
        let shift = |w: &Word| w.iter().map(|&(g, e)| (g + n, e)).collect::<Word>();
        let mut powers = self.inner.powers.clone();
        powers.extend(other.inner.powers.iter().map(shift));
        let mut comms = self.inner.comms.clone();
        for j in 0..m {
            let mut row = vec![Vec::new(); n];
            row.extend(other.inner.comms[j].iter().map(shift));
            comms.push(row);
        }
        Self::from_parts(names, orders, powers, comms)
    }

    pub fn len(&self) -> usize {
        self.inner.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn names(&self) -> &[String] {
        &self.inner.names
    }

    pub fn relative_orders(&self) -> &[u32] {
        &self.inner.orders
    }

    pub fn power_rule(&self, i: usize) -> &Word {
        &self.inner.powers[i]
    }

    /// `[g_j, g_i]` for `i < j`.
    pub fn commutator_rule(&self, j: usize, i: usize) -> &Word {
        &self.inner.comms[j][i]
    }

    /// The prime, or `None` for the trivial presentation.
    pub fn prime(&self) -> Option<u32> {
        self.inner.orders.first().map(|&o| prime_power_base(o).unwrap())
    }

    /// `log_p |G|`.
    pub fn order_exponent(&self) -> u32 {
        match self.prime() {
            None => 0,
            Some(p) => self.inner.orders.iter().map(|&o| log_base(o, p)).sum(),
        }
    }

    pub fn order(&self) -> num_bigint::BigUint {
        self.inner
            .orders
            .iter()
            .fold(num_bigint::BigUint::from(1u32), |acc, &o| acc * o)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.inner.names.iter().position(|n| n == name)
    }

    pub fn identity(&self) -> ExponentVector {
        ExponentVector::identity(self.len())
    }

    pub fn generator(&self, i: usize) -> ExponentVector {
        ExponentVector::unit(self.len(), i, 1)
    }

    pub fn generators(&self) -> Vec<ExponentVector> {
        (0..self.len()).map(|i| self.generator(i)).collect()
    }

    pub fn is_abelian(&self) -> bool {
        self.inner.comms.iter().all(|row| row.iter().all(|w| w.is_empty()))
    }

    /// Checks length and exponent ranges.
    pub fn validate(&self, v: &ExponentVector) -> Result<()> {
        if v.len() != self.len() {
            return Err(Error::Length { expected: self.len(), found: v.len() });
        }
        for (i, (&e, &o)) in v.0.iter().zip(&self.inner.orders).enumerate() {
            if e >= o {
                return Err(Error::OutOfRange { index: i, value: e, order: o });
            }
        }
        Ok(())
    }

    /// Collection from the left: multiplies `x` on the right by the pending
    /// stack of generator powers (top of stack first).
    fn collect(&self, x: &mut [u32], stack: &mut Vec<(usize, u32)>) {
        let inner = &*self.inner;
        let cf = inner.central_from;
        while let Some((k, e)) = stack.pop() {
            if e == 0 {
                continue;
            }
            let o = inner.orders[k];
            if k >= cf {
                x[k] = (x[k] + e) % o;
                continue;
            }
            let mut tail = false;
            let mut blocked = false;
            for j in k + 1..cf {
                if x[j] != 0 {
                    tail = true;
                    if !inner.comms[j][k].is_empty() {
                        blocked = true;
                        break;
                    }
                }
            }
            if !blocked {
                let s = x[k] + e;
                if s < o {
                    x[k] = s;
                    continue;
                }
                x[k] = s - o;
                let w = &inner.powers[k];
                if w.is_empty() {
                    continue;
                }
                if tail {
                    for j in (k + 1..cf).rev() {
                        if x[j] != 0 {
                            stack.push((j, x[j]));
                            x[j] = 0;
                        }
                    }
                }
                stack.extend(w.iter().rev().copied());
                continue;
            }
            if e > 1 {
                stack.push((k, e - 1));
            }
            for j in (k + 1..cf).rev() {
                let f = x[j];
                if f == 0 {
                    continue;
                }
                x[j] = 0;
                let c = &inner.comms[j][k];
                if c.is_empty() {
                    stack.push((j, f));
                } else {
                    for _ in 0..f {
                        stack.extend(c.iter().rev().copied());
                        stack.push((j, 1));
                    }
                }
            }
            x[k] += 1;
            if x[k] == o {
                x[k] = 0;
                stack.extend(inner.powers[k].iter().rev().copied());
            }
        }
    }

    /// `x * w` for a word `w` whose exponents lie in range.
    pub fn mul_word(&self, x: &ExponentVector, w: &[(usize, u32)]) -> ExponentVector {
        let mut out = x.0.clone();
        let mut stack: Vec<(usize, u32)> = w.iter().rev().copied().collect();
        self.collect(&mut out, &mut stack);
        ExponentVector(out)
    }

    pub fn mul(&self, x: &ExponentVector, y: &ExponentVector) -> ExponentVector {
        let mut out = x.0.clone();
        let mut stack: Vec<(usize, u32)> = y
            .0
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &e)| e != 0)
            .map(|(i, &e)| (i, e))
            .collect();
        self.collect(&mut out, &mut stack);
        ExponentVector(out)
    }

    pub fn inv(&self, x: &ExponentVector) -> ExponentVector {
        let n = self.len();
        let mut z = x.0.clone();
        let mut y = vec![0; n];
        let mut stack = Vec::new();
        for i in 0..n {
            let e = z[i];
            if e == 0 {
                continue;
            }
            let f = self.inner.orders[i] - e;
            y[i] = f;
            stack.push((i, f));
            self.collect(&mut z, &mut stack);
        }
        ExponentVector(y)
    }

    pub fn pow(&self, x: &ExponentVector, n: i64) -> ExponentVector {
        let mut base = if n < 0 { self.inv(x) } else { x.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = self.identity();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// `[x, y] = x^-1 y^-1 x y`.
    pub fn comm(&self, x: &ExponentVector, y: &ExponentVector) -> ExponentVector {
        let xy = self.mul(x, y);
        let yx = self.mul(y, x);
        self.mul(&self.inv(&yx), &xy)
    }

    /// `x^y = y^-1 x y`.
    pub fn conj(&self, x: &ExponentVector, y: &ExponentVector) -> ExponentVector {
        self.mul(&self.mul(&self.inv(y), x), y)
    }

    /// Order of an element.
    pub fn element_order(&self, x: &ExponentVector) -> u64 {
        let p = match self.prime() {
            None => return 1,
            Some(p) => p as u64,
        };
        let mut y = x.clone();
        let mut ord = 1u64;
        while !y.is_identity() {
            y = self.pow(&y, p as i64);
            ord *= p;
        }
        ord
    }

    /// Formats an element as a word in the generator names.
    pub fn format(&self, x: &ExponentVector) -> String {
        let parts: Vec<String> = x
            .to_word()
            .into_iter()
            .map(|(g, e)| {
                if e == 1 {
                    self.inner.names[g].clone()
                } else {
                    format!("{}^{}", self.inner.names[g], e)
                }
            })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    fn format_word(&self, w: &Word) -> String {
        self.format(&ExponentVector::from_word(self.len(), w))
    }

    /// Parses a word expression and collects it to normal form.
    pub fn evaluate(&self, expr: &str) -> Result<ExponentVector> {
        let e = parse_expr(expr, &Symbols::new())?;
        self.eval_expr(&e, &self.generators())
    }

    /// Evaluates `e` with generator `k` of the expression mapped to `images[k]`.
    pub fn eval_expr(&self, e: &Expr, images: &[ExponentVector]) -> Result<ExponentVector> {
        Ok(match e {
            Expr::Identity => self.identity(),
            Expr::Gen(name) => {
                let i = self
                    .index_of(name)
                    .ok_or_else(|| Error::UnknownGenerator(name.clone()))?;
                images
                    .get(i)
                    .cloned()
                    .ok_or_else(|| Error::UnknownGenerator(name.clone()))?
            }
            Expr::Index(i) => images
                .get(*i)
                .cloned()
                .ok_or_else(|| Error::UnknownGenerator(format!("#{i}")))?,
            Expr::Mul(parts) => {
                let mut acc = self.identity();
                for part in parts {
                    let v = self.eval_expr(part, images)?;
                    acc = self.mul(&acc, &v);
                }
                acc
            }
            Expr::Pow(base, n) => {
                let b = self.eval_expr(base, images)?;
                self.pow(&b, *n)
            }
            Expr::Conj(base, by) => {
                let b = self.eval_expr(base, images)?;
                let c = self.eval_expr(by, images)?;
                self.conj(&b, &c)
            }
            Expr::Comm(parts) => {
                let mut acc = self.eval_expr(&parts[0], images)?;
                for part in &parts[1..] {
                    let v = self.eval_expr(part, images)?;
                    acc = self.comm(&acc, &v);
                }
                acc
            }
        })
    }

    /// Text in the presentation grammar; parses back to an equal presentation.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("generators: ");
        out.push_str(&self.inner.names.join(", "));
        out.push('\n');
        for i in 0..self.len() {
            let w = &self.inner.powers[i];
            if w.is_empty() {
                out.push_str(&format!("order({})={}\n", self.inner.names[i], self.inner.orders[i]));
            } else {
                out.push_str(&format!(
                    "{}^{} = {}\n",
                    self.inner.names[i],
                    self.inner.orders[i],
                    self.format_word(w)
                ));
            }
        }
        for j in 0..self.len() {
            for i in 0..j {
                let w = &self.inner.comms[j][i];
                if !w.is_empty() {
                    out.push_str(&format!(
                        "[{},{}] = {}\n",
                        self.inner.names[j],
                        self.inner.names[i],
                        self.format_word(w)
                    ));
                }
            }
        }
        out
    }
}

impl fmt::Display for PcPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

pub(crate) fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_power_base(n: u32) -> Option<u32> {
    if n < 2 {
        return None;
    }
    let mut d = 2u32;
    while !n.is_multiple_of(d) {
        d += 1;
    }
    let mut m = n;
    while m.is_multiple_of(d) {
        m /= d;
    }
    (m == 1).then_some(d)
}

fn log_base(mut n: u32, p: u32) -> u32 {
    let mut k = 0;
    while n > 1 {
        n /= p;
        k += 1;
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heisenberg(p: u32) -> PcPresentation {
        parse_pc_presentation(&format!(
            "generators: a, a1, a2\norder(a)={p}\norder(a1)={p}\norder(a2)={p}\n[a1,a] = a2\n"
        ))
        .unwrap()
    }

    #[test]
    fn commutator_rule_is_reproduced() {
        let g = heisenberg(5);
        let c = g.comm(&g.generator(1), &g.generator(0));
        assert_eq!(c.as_slice(), &[0, 0, 1]);
    }

    #[test]
    fn inverse_and_powers() {
        let g = heisenberg(5);
        let x = ExponentVector::from_vec(vec![2, 3, 4]);
        assert!(g.mul(&x, &g.inv(&x)).is_identity());
        assert!(g.pow(&x, 5).is_identity());
        assert_eq!(g.pow(&x, -1), g.inv(&x));
    }

    #[test]
    fn prime_power_orders_are_refined() {
        let g = parse_pc_presentation("generators: a\na^25 = 1").unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.relative_orders(), &[5, 5]);
        assert_eq!(g.names()[1], "a_p1");
        let a = g.generator(0);
        assert_eq!(g.element_order(&a), 25);
    }

    #[test]
    fn refinement_keeps_commutators() {
        // Phi2(31) at p=5: a has order 125 and a^25 = a2.
        let g = parse_pc_presentation(
            "generators: a, a1, a2\na^25 = a2\norder(a1)=5\norder(a2)=5\n[a1,a] = a2",
        )
        .unwrap();
        assert_eq!(g.order_exponent(), 4);
        let a = g.evaluate("a").unwrap();
        assert_eq!(g.element_order(&a), 125);
        assert!(check_consistency(&g).is_empty());
        let c = g.evaluate("[a1,a^5]").unwrap();
        assert!(c.is_identity());
    }

    #[test]
    fn direct_product_orders_add() {
        let g = heisenberg(5);
        let z = PcPresentation::abelian(&[25]).unwrap();
        let h = g.direct_product(&z).unwrap();
        assert_eq!(h.order_exponent(), 5);
        assert!(check_consistency(&h).is_empty());
    }

    #[test]
    fn central_tail_detection() {
        let g = heisenberg(7);
        assert_eq!(g.inner.central_from, 2);
        assert_eq!(PcPresentation::abelian(&[5, 5]).unwrap().inner.central_from, 0);
    }
}
