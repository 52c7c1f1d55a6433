//! Smith normal form over the integers and canonical abelian invariants.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Diagonal of the Smith normal form of an integer matrix (zeros included,
/// length `min(rows, cols)`), each entry non-negative and dividing the next
/// non-zero one.
pub fn smith_diagonal(mut m: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    for t in 0..rows.min(cols) {
        loop {
            // smallest non-zero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !m[i][j].is_zero()
                        && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                diag.resize(rows.min(cols), BigInt::zero());
                return diag;
            };
            m.swap(t, pi);
            for row in m.iter_mut() {
                row.swap(t, pj);
            }
            let mut dirty = false;
            for i in t + 1..rows {
                if m[i][t].is_zero() {
                    continue;
                }
                let q = m[i][t].div_floor(&m[t][t]);
                for j in t..cols {
                    let d = &q * &m[t][j];
                    m[i][j] -= d;
                }
                dirty |= !m[i][t].is_zero();
            }
            for j in t + 1..cols {
                if m[t][j].is_zero() {
                    continue;
                }
                let q = m[t][j].div_floor(&m[t][t]);
                for i in t..rows {
                    let d = &q * &m[i][t];
                    m[i][j] -= d;
                }
                dirty |= !m[t][j].is_zero();
            }
            if dirty {
                continue;
            }
            // pivot must divide the whole trailing block
            let bad = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !m[i][j].is_multiple_of(&m[t][t]));
            match bad {
                Some((i, _)) => {
                    for j in t..cols {
                        let v = m[i][j].clone();
                        m[t][j] += v;
                    }
                }
                None => break,
            }
        }
        diag.push(m[t][t].abs());
    }
    diag
}

/// Invariant factors `d_1 | d_2 | ... | d_k` of a finite abelian group, all `> 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct AbelianInvariants {
    divisors: Vec<u64>,
}

impl AbelianInvariants {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn cyclic(n: u64) -> Self {
        Self::from_orders([n])
    }

    /// `Z_n^(k)`.
    pub fn elementary(n: u64, k: usize) -> Self {
        Self::from_orders(std::iter::repeat_n(n, k))
    }

    /// Canonical form of the direct product of cyclic groups of the given orders.
    pub fn from_orders(orders: impl IntoIterator<Item = u64>) -> Self {
        let mut by_prime: Vec<(u64, Vec<u64>)> = Vec::new();
        for n in orders {
            for (q, pk) in prime_power_factors(n) {
                match by_prime.iter_mut().find(|(r, _)| *r == q) {
                    Some((_, v)) => v.push(pk),
                    None => by_prime.push((q, vec![pk])),
                }
            }
        }
        let len = by_prime.iter().map(|(_, v)| v.len()).max().unwrap_or(0);
        let mut divisors = vec![1u64; len];
        for (_, mut v) in by_prime {
            v.sort_unstable();
            let off = len - v.len();
            for (k, pk) in v.into_iter().enumerate() {
                divisors[off + k] *= pk;
            }
        }
        AbelianInvariants { divisors }
    }

    /// Abelian group presented by the rows of an integer relation matrix.
    /// Free summands are rejected.
    pub fn from_relations(m: Vec<Vec<BigInt>>) -> Result<Self> {
        let cols = m.first().map_or(0, Vec::len);
        let mut diag = smith_diagonal(m);
        diag.resize(cols, BigInt::zero());
        let mut out = Vec::new();
        for d in diag {
            if d.is_zero() {
                return Err(Error::Unsupported("relation matrix presents an infinite group".into()));
            }
            if !d.is_one() {
                out.push(d.to_u64().ok_or_else(|| {
                    Error::Unsupported(format!("invariant {d} does not fit in 64 bits"))
                })?);
            }
        }
        Ok(AbelianInvariants { divisors: out })
    }

    pub fn divisors(&self) -> &[u64] {
        &self.divisors
    }

    pub fn is_trivial(&self) -> bool {
        self.divisors.is_empty()
    }

    /// Minimal number of generators.
    pub fn rank(&self) -> usize {
        self.divisors.len()
    }

    pub fn order(&self) -> BigUint {
        self.divisors.iter().fold(BigUint::one(), |acc, &d| acc * d)
    }

    /// Direct product.
    pub fn product(&self, other: &Self) -> Self {
        Self::from_orders(self.divisors.iter().chain(&other.divisors).copied())
    }

    /// Cyclic prime-power factors, largest first.
    pub fn primary(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self
            .divisors
            .iter()
            .flat_map(|&d| prime_power_factors(d).into_iter().map(|(_, pk)| pk))
            .collect();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    }

    /// Renders `Z(p^2) x Z(p)^3` style text for a p-group; falls back to
    /// numbers for factors that are not powers of `p`.
    pub fn describe_in(&self, p: u64) -> String {
        self.render(|q| match prime_power_factors(q).as_slice() {
            [(r, _)] if *r == p => {
                let k = q.ilog(p);
                if k == 1 {
                    "Z(p)".to_string()
                } else {
                    format!("Z(p^{k})")
                }
            }
            _ => format!("Z({q})"),
        })
    }

    /// Renders `Z(9) x Z(3)^2` style text with numeric orders.
    pub fn describe_plain(&self) -> String {
        self.render(|q| format!("Z({q})"))
    }

    fn render(&self, name: impl Fn(u64) -> String) -> String {
        let prim = self.primary();
        if prim.is_empty() {
            return "1".into();
        }
        let mut parts = Vec::new();
        let mut i = 0;
        while i < prim.len() {
            let mut j = i;
            while j < prim.len() && prim[j] == prim[i] {
                j += 1;
            }
            let k = j - i;
            if k == 1 {
                parts.push(name(prim[i]));
            } else {
                parts.push(format!("{}^{k}", name(prim[i])));
            }
            i = j;
        }
        parts.join(" x ")
    }
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(|q| format!("Z{q}")))
    }
}

/// `n = prod q^k`, as `(q, q^k)` pairs.
fn prime_power_factors(mut n: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut pk = 1;
            while n.is_multiple_of(d) {
                n /= d;
                pk *= d;
            }
            out.push((d, pk));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, n));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mat(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn diag_two_three() {
        let a = AbelianInvariants::from_relations(mat(&[&[2, 0], &[0, 3]])).unwrap();
        assert_eq!(a.divisors(), &[6]);
    }

    #[test]
    fn canonical_chain_from_orders() {
        let a = AbelianInvariants::from_orders([4, 6, 1, 25, 5]);
        assert_eq!(a.divisors(), &[10, 300]);
        assert_eq!(a.primary(), vec![25, 5, 4, 3, 2]);
    }

    #[test]
    fn infinite_is_rejected() {
        assert!(AbelianInvariants::from_relations(mat(&[&[2, 0]])).is_err());
    }

    // d_k = gcd of the k x k minors; the k-th invariant factor is d_k / d_(k-1)
    fn determinantal(m: &[Vec<i64>]) -> Vec<i64> {
        fn det(m: &[Vec<i64>], rows: &[usize], cols: &[usize]) -> i64 {
            if rows.len() == 1 {
                return m[rows[0]][cols[0]];
            }
            (0..cols.len())
                .map(|j| {
                    let rest: Vec<usize> = cols.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &c)| c).collect();
                    let sign = if j % 2 == 0 { 1 } else { -1 };
                    sign * m[rows[0]][cols[j]] * det(m, &rows[1..], &rest)
                })
                .sum()
        }
        fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
            (0u32..1 << n).filter(|b| b.count_ones() as usize == k).map(|b| (0..n).filter(|i| b >> i & 1 == 1).collect()).collect()
        }
        let (r, c) = (m.len(), m[0].len());
        let mut out = Vec::new();
        let mut prev = 1i64;
        for k in 1..=r.min(c) {
            let mut d = 0i64;
            for rows in subsets(r, k) {
                for cols in subsets(c, k) {
                    d = d.gcd(&det(m, &rows, &cols));
                }
            }
            if d == 0 {
                break;
            }
            out.push(d / prev);
            prev = d;
        }
        out
    }

    fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
        prop::collection::vec(prop::collection::vec(-12i64..=12, cols), rows)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn diagonal_matches_determinantal_divisors(m in matrix(3, 3)) {
            let big: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
            let diag = smith_diagonal(big);
            let nonzero: Vec<i64> = diag.iter().filter(|d| !d.is_zero()).map(|d| d.to_i64().unwrap()).collect();
            prop_assert_eq!(nonzero, determinantal(&m));
        }

        #[test]
        fn diagonal_is_a_divisor_chain(m in (1usize..6, 1usize..6).prop_flat_map(|(r, c)| matrix(r, c))) {
            let (rows, cols) = (m.len(), m[0].len());
            let m: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
            let diag = smith_diagonal(m);
            prop_assert_eq!(diag.len(), rows.min(cols));
            let nonzero: Vec<&BigInt> = diag.iter().filter(|d| !d.is_zero()).collect();
            prop_assert!(nonzero.iter().all(|d| d.is_positive()));
            for w in nonzero.windows(2) {
                prop_assert!((w[1] % w[0]).is_zero(), "{} does not divide {}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn rendering() {
        let a = AbelianInvariants::from_orders([25, 5, 5, 5]);
        assert_eq!(a.describe_in(5), "Z(p^2) x Z(p)^3");
        assert_eq!(a.to_string(), "Z25 x Z5^3");
        assert_eq!(AbelianInvariants::trivial().to_string(), "1");
    }
}
