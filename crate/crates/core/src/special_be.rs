//! Schur multipliers of class-2 groups with elementary abelian `G/G'` and `G'`,
//! computed by linear algebra on `V = G/G'` and `W = G'` over `F_p`.
//!
//! `X1` is spanned by the Jacobi elements `v1 (x) (v2,v3) + v2 (x) (v3,v1) + v3 (x) (v1,v2)`,
//! `X2` by `v (x) f(v)` where `f(gG') = g^p`, and `N = (V (x) W)/(X1 + X2)`.
//! With `rho(v1 ^ v2) = (v1,v2)` and `sigma(v1 ^ v2) = v1 (x) f(v2) + C(p,2) v2 (x) (v1,v2)`,
//! the multiplier is the extension of `ker rho` by `N` whose p-th power map is `sigma`.

use crate::error::{Error, Result};
use crate::linalg::rank;
use crate::pc::{characteristic_subgroups, quotient_by, PcPresentation};
use crate::snf::AbelianInvariants;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BEContext {
    pub p: u32,
    pub dim_v: usize,
    pub dim_w: usize,
    /// `pairing[i][j]` is `(v_i, v_j)` in coordinates of `W`.
    pub pairing: Vec<Vec<Vec<u32>>>,
    /// Row `i` is `f(v_i)`.
    pub powmap: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BESubspaces {
    pub dim_x1: usize,
    pub dim_x2: usize,
    pub dim_x: usize,
    pub dim_n: usize,
    pub dim_ker_rho: usize,
    x: Vec<Vec<u32>>,
}

impl BEContext {
    /// Whether `|G/G'| = p^3` and `|G'| = p^2`, the case the construction is usually stated for.
    pub fn standard_dimensions(&self) -> bool {
        (self.dim_v, self.dim_w) == (3, 2)
    }

    fn tensor_index(&self, i: usize, k: usize) -> usize {
        i * self.dim_w + k
    }

    /// `v_i (x) w` as a vector of `V (x) W`.
    fn add_tensor(&self, out: &mut [u32], i: usize, w: &[u32], scale: u32) {
        let p = self.p as u64;
        for (k, &c) in w.iter().enumerate() {
            let t = &mut out[self.tensor_index(i, k)];
            *t = ((*t as u64 + c as u64 * scale as u64) % p) as u32;
        }
    }

    fn wedge_basis(&self) -> Vec<(usize, usize)> {
        (0..self.dim_v).flat_map(|i| (i + 1..self.dim_v).map(move |j| (i, j))).collect()
    }
}

/// Extracts `V`, `W`, the commutator pairing and the p-th power map.
pub fn be_setup(g: &PcPresentation, p: u32) -> Result<BEContext> {
    if g.prime() != Some(p) && !g.is_empty() {
        return Err(Error::Applicability(format!("the group is not a {p}-group")));
    }
    if p == 2 {
        return Err(Error::Applicability("the power map is linear only for odd p".into()));
    }
    let ch = characteristic_subgroups(g);
    if ch.class != 2 {
        return Err(Error::Applicability(format!("the group has class {}, not 2", ch.class)));
    }
    let d = &ch.derived;
    let q = quotient_by(g, d)?;
    let qp = q.presentation();
    if qp.generators().iter().any(|x| qp.element_order(x) > p as u64) {
        return Err(Error::Applicability("G/G' is not elementary abelian".into()));
    }
    if d.igs().iter().any(|x| g.element_order(x) > p as u64) {
        return Err(Error::Applicability("G' is not elementary abelian".into()));
    }
    let basis: Vec<_> = qp.generators().iter().map(|y| q.lift(y)).collect();
    let coords = |x| {
        d.coordinates(&x).ok_or_else(|| Error::Structure("element outside G'".into()))
    };
    let n = basis.len();
    let mut pairing = vec![vec![Vec::new(); n]; n];
    for i in 0..n {
        for j in 0..n {
            pairing[i][j] = coords(g.comm(&basis[i], &basis[j]))?;
        }
    }
    let powmap = basis.iter().map(|b| coords(g.pow(b, p as i64))).collect::<Result<_>>()?;
    Ok(BEContext { p, dim_v: n, dim_w: d.igs().len(), pairing, powmap })
}

pub fn be_x_dimensions(ctx: &BEContext) -> BESubspaces {
    let (dv, dw, p) = (ctx.dim_v, ctx.dim_w, ctx.p);
    let len = dv * dw;
    let mut x1 = Vec::new();
    for a in 0..dv {
        for b in a + 1..dv {
            for c in b + 1..dv {
                let mut v = vec![0; len];
                ctx.add_tensor(&mut v, a, &ctx.pairing[b][c], 1);
                ctx.add_tensor(&mut v, b, &ctx.pairing[c][a], 1);
                ctx.add_tensor(&mut v, c, &ctx.pairing[a][b], 1);
                x1.push(v);
            }
        }
    }
    let mut x2 = Vec::new();
    for i in 0..dv {
        let mut v = vec![0; len];
        ctx.add_tensor(&mut v, i, &ctx.powmap[i], 1);
        x2.push(v);
        for j in i + 1..dv {
            let mut v = vec![0; len];
            ctx.add_tensor(&mut v, i, &ctx.powmap[j], 1);
            ctx.add_tensor(&mut v, j, &ctx.powmap[i], 1);
            x2.push(v);
        }
    }
    let dim_x1 = rank(&x1, p);
    let dim_x2 = rank(&x2, p);
    let mut x = x1;
    x.extend(x2);
    let dim_x = rank(&x, p);
    let rho: Vec<Vec<u32>> =
        ctx.wedge_basis().iter().map(|&(i, j)| ctx.pairing[i][j].clone()).collect();
    let dim_ker_rho = rho.len() - rank(&rho, p);
    BESubspaces { dim_x1, dim_x2, dim_x, dim_n: len - dim_x, dim_ker_rho, x }
}

/// `M(G)` as `Z_{p^2}^r x Z_p^{(dim N - r) + (dim ker rho - r)}` with `r` the rank of
/// `sigma` on `ker rho`.
pub fn be_multiplier(ctx: &BEContext) -> AbelianInvariants {
    let sub = be_x_dimensions(ctx);
    let p = ctx.p;
    let pairs = ctx.wedge_basis();
    let rho: Vec<Vec<u32>> = pairs.iter().map(|&(i, j)| ctx.pairing[i][j].clone()).collect();
    let kernel = crate::linalg::left_nullspace(&rho, ctx.dim_w, p);
    let half = ((p as u64 * (p as u64 - 1) / 2) % p as u64) as u32;
    let sigma: Vec<Vec<u32>> = pairs
        .iter()
        .map(|&(i, j)| {
            let mut v = vec![0; ctx.dim_v * ctx.dim_w];
            ctx.add_tensor(&mut v, i, &ctx.powmap[j], 1);
            ctx.add_tensor(&mut v, j, &ctx.pairing[i][j], half);
            v
        })
        .collect();
    let images: Vec<Vec<u32>> = kernel
        .iter()
        .map(|k| {
            let mut v = vec![0u32; ctx.dim_v * ctx.dim_w];
            for (c, row) in k.iter().zip(&sigma) {
                for (t, s) in v.iter_mut().zip(row) {
                    *t = ((*t as u64 + *c as u64 * *s as u64) % p as u64) as u32;
                }
            }
            v
        })
        .collect();
    let mut with_x = sub.x.clone();
    with_x.extend(images);
    let r = rank(&with_x, p) - sub.dim_x;
    let p = p as u64;
    let orders = std::iter::repeat_n(p * p, r)
        .chain(std::iter::repeat_n(p, sub.dim_n - r + sub.dim_ker_rho - r));
    AbelianInvariants::from_orders(orders)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Catalog;

    fn ctx(name: &str, p: u32) -> BEContext {
        let g = Catalog::embedded().unwrap().group(name, p).unwrap();
        be_setup(&g, p).unwrap()
    }

    fn dims(name: &str) -> (usize, usize, usize) {
        let s = be_x_dimensions(&ctx(name, 5));
        (s.dim_x1, s.dim_x2, s.dim_x)
    }

    #[test]
    fn setup_dimensions() {
        let c = ctx("Phi4(1^5)", 5);
        assert_eq!((c.dim_v, c.dim_w), (3, 2));
        assert!(c.powmap.iter().flatten().all(|&x| x == 0));
        assert!(c.standard_dimensions());
        let c = ctx("Phi5(1^5)", 5);
        assert_eq!((c.dim_v, c.dim_w), (4, 1));
        assert!(c.powmap.iter().flatten().all(|&x| x == 0));
        assert!(!c.standard_dimensions());
    }

    #[test]
    fn pairing_is_alternating() {
        for name in ["Phi4(221)a", "Phi4(2111)c", "Phi5(2111)"] {
            let c = ctx(name, 7);
            for i in 0..c.dim_v {
                assert!(c.pairing[i][i].iter().all(|&x| x == 0));
                for j in 0..c.dim_v {
                    let s: Vec<u32> =
                        c.pairing[i][j].iter().zip(&c.pairing[j][i]).map(|(a, b)| (a + b) % 7).collect();
                    assert!(s.iter().all(|&x| x == 0), "{name}");
                }
            }
        }
    }

    #[test]
    fn not_applicable() {
        let cat = Catalog::embedded().unwrap();
        let err = be_setup(&cat.group("Phi2(41)", 5).unwrap(), 5).unwrap_err();
        assert!(err.to_string().contains("G/G'"), "{err}");
        assert!(be_setup(&cat.group("Phi3(1^5)", 5).unwrap(), 5).is_err());
        assert!(be_setup(&PcPresentation::abelian(&[5, 5]).unwrap(), 5).is_err());
    }

    #[test]
    fn subspace_dimensions() {
        assert_eq!(dims("Phi4(221)a"), (1, 5, 6));
        assert_eq!(dims("Phi4(221)b"), (1, 5, 5));
        assert_eq!(dims("Phi4(2111)a"), (1, 3, 4));
    }

    #[test]
    fn multipliers() {
        let m = |name: &str| be_multiplier(&ctx(name, 5));
        assert_eq!(m("Phi4(221)d_2"), AbelianInvariants::cyclic(25));
        assert_eq!(m("Phi4(221)b"), AbelianInvariants::elementary(5, 2));
        assert_eq!(m("Phi4(1^5)"), AbelianInvariants::elementary(5, 6));
    }

    #[test]
    fn order_formula_and_containments() {
        let cat = Catalog::embedded().unwrap();
        for e in cat.list(5, 7).unwrap() {
            let g = cat.instantiate(&e, 7).unwrap();
            let Ok(c) = be_setup(&g, 7) else { continue };
            let s = be_x_dimensions(&c);
            assert!(s.dim_x1 <= s.dim_x && s.dim_x2 <= s.dim_x && s.dim_x <= s.dim_x1 + s.dim_x2);
            assert_eq!(s.dim_ker_rho, c.dim_v * (c.dim_v - 1) / 2 - c.dim_w, "{}", e.name);
            let m = be_multiplier(&c);
            assert_eq!(m.order(), num_bigint::BigUint::from(7u32).pow((s.dim_n + s.dim_ker_rho) as u32));
            if c.powmap.iter().flatten().all(|&x| x == 0) {
                assert_eq!(s.dim_x2, 0);
                assert!(m.divisors().iter().all(|&d| d == 7));
            }
        }
    }
}
