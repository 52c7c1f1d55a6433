//! The group nu(G) and the invariants read off it: tensor square, exterior
//! square, Schur multiplier and epicenter.
//!
//! `nu(G)` is generated by `G` and a copy `G^phi`, subject to the relations
//! of both copies and
//!
//! ```text
//! [x, y^phi]^z     = [x^z, (y^z)^phi]
//! [x, y^phi]^(z^phi) = [x^z, (y^z)^phi]
//! ```
//!
//! The subgroup `[G, G^phi]` is isomorphic to `G (x) G` via `g (x) h -> [g, h^phi]`.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::pc::{
    abelian_group_invariants, abelian_invariants, characteristic_subgroups, fingerprint,
    quotient_by, ExponentVector, Expr, Homomorphism, PcPresentation, Quotient,
    StructureFingerprint, SubPresentation, Subgroup,
};
use crate::pquotient::{p_quotient_with, FpPresentation, PQuotient, QuotientOptions};
use crate::snf::AbelianInvariants;

/// Ceiling on the class explored when realizing nu(G).
pub const NU_CLASS_CAP: usize = 64;

/// A computed group, abelian or not.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupDescriptor {
    pub fingerprint: StructureFingerprint,
    pub abelian: Option<AbelianInvariants>,
    pub catalog_name: Option<String>,
}

impl GroupDescriptor {
    pub fn of(g: &PcPresentation) -> Result<Self> {
        let fingerprint = fingerprint(g);
        let abelian =
            if g.is_abelian() { Some(abelian_group_invariants(g)?) } else { None };
        Ok(GroupDescriptor { fingerprint, abelian, catalog_name: None })
    }

    pub fn from_abelian(a: &AbelianInvariants) -> Self {
        GroupDescriptor {
            fingerprint: StructureFingerprint::abelian(a),
            abelian: Some(a.clone()),
            catalog_name: None,
        }
    }

    pub fn is_abelian(&self) -> bool {
        self.abelian.is_some()
    }
}

/// Finite presentation of nu(G) on `g_1..g_n, g_1^phi..g_n^phi`.
pub fn build_nu_presentation(g: &PcPresentation) -> FpPresentation {
    let n = g.len();
    let base = FpPresentation::from_pc(g);
    let mut names: Vec<String> = g.names().to_vec();
    names.extend(g.names().iter().map(|s| format!("{s}_phi")));
    let mut relators: Vec<Expr> = base.relators().to_vec();
    relators.extend(base.relators().iter().map(|r| shift(r, n)));
    let x = Expr::gen;
    let phi = |i: usize| Expr::gen(i + n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                // [g_i, g_j^phi]^w = [g_i^g_k, (g_j^phi)^(g_k^phi)] for w = g_k, g_k^phi
                let rhs = Expr::comm(x(i).conj(x(k)), phi(j).conj(phi(k)));
                for w in [x(k), phi(k)] {
                    let lhs = Expr::comm(x(i), phi(j)).conj(w);
                    relators.push(Expr::Mul(vec![lhs, rhs.clone().inv()]));
                }
            }
        }
    }
    FpPresentation::new(names, relators).expect("indices are in range")
}

fn shift(e: &Expr, by: usize) -> Expr {
    match e {
        Expr::Index(i) => Expr::Index(i + by),
        Expr::Mul(v) => Expr::Mul(v.iter().map(|x| shift(x, by)).collect()),
        Expr::Comm(v) => Expr::Comm(v.iter().map(|x| shift(x, by)).collect()),
        Expr::Pow(b, k) => Expr::Pow(Box::new(shift(b, by)), *k),
        Expr::Conj(a, b) => Expr::Conj(Box::new(shift(a, by)), Box::new(shift(b, by))),
        other => other.clone(),
    }
}

/// nu(G) as a pc group with `[G, G^phi]` and the subgroup nabla(G).
#[derive(Clone, Debug)]
pub struct NuRealization {
    pub group: PcPresentation,
    pub quotient: PQuotient,
    pub nu: PcPresentation,
    pub embed_g: Vec<ExponentVector>,
    pub embed_gphi: Vec<ExponentVector>,
    pub tensor_sub: Subgroup,
    pub nabla: Subgroup,
}

pub fn realize_nu(g: &PcPresentation, p: u32) -> Result<NuRealization> {
    realize_nu_with(g, p, &QuotientOptions::default())
}

pub fn realize_nu_with(g: &PcPresentation, p: u32, opts: &QuotientOptions) -> Result<NuRealization> {
    if let Some(q) = g.prime() {
        if q != p {
            return Err(Error::Unsupported(format!("group is a {q}-group, not a {p}-group")));
        }
    }
    let n = g.len();
    let fp = build_nu_presentation(g);
    let quotient = p_quotient_with(&fp, p, NU_CLASS_CAP, opts)?;
    if !quotient.trace.terminal {
        return Err(Error::Budget(format!("nu(G) did not stabilise by class {NU_CLASS_CAP}")));
    }
    let nu = quotient.pres.clone();
    let embed_g = quotient.images[..n].to_vec();
    let embed_gphi = quotient.images[n..].to_vec();
    let mut pairs = Vec::new();
    let mut sym = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let c = nu.comm(&embed_g[i], &embed_gphi[j]);
            pairs.push(c);
        }
    }
    for i in 0..n {
        sym.push(pairs[i * n + i].clone());
        for j in i + 1..n {
            sym.push(nu.mul(&pairs[i * n + j], &pairs[j * n + i]));
        }
    }
    let tensor_sub = Subgroup::closure(&nu, &pairs);
    let nabla = Subgroup::closure(&nu, &sym);
    if !tensor_sub.is_normal() || !nabla.is_normal() || !nabla.is_subgroup_of(&tensor_sub) {
        return Err(Error::Inconsistent("[G, G^phi] or nabla(G) is not normal in nu(G)".into()));
    }
    if nu.order_exponent() != 2 * g.order_exponent() + tensor_sub.order_exponent() {
        return Err(Error::Inconsistent(format!(
            "|nu(G)| = p^{} but |G|^2 |[G,G^phi]| = p^{}",
            nu.order_exponent(),
            2 * g.order_exponent() + tensor_sub.order_exponent()
        )));
    }
    Ok(NuRealization { group: g.clone(), quotient, nu, embed_g, embed_gphi, tensor_sub, nabla })
}

/// The exterior square as a quotient of the tensor square.
#[derive(Clone, Debug)]
pub struct Wedge {
    pub tensor: SubPresentation,
    pub quotient: Quotient,
}

impl Wedge {
    pub fn presentation(&self) -> &PcPresentation {
        self.quotient.presentation()
    }

    /// Class of a nu(G) element of `[G, G^phi]` in `G ^ G`.
    pub fn project(&self, x: &ExponentVector) -> Option<ExponentVector> {
        self.tensor.from_parent(x).map(|v| self.quotient.project(&v))
    }

    /// A nu(G) representative of a `G ^ G` element.
    pub fn lift(&self, y: &ExponentVector) -> ExponentVector {
        self.tensor.to_parent(&self.quotient.lift(y))
    }
}

impl NuRealization {
    /// `x` as an element of the `G` copy inside nu(G).
    pub fn embed(&self, x: &ExponentVector) -> ExponentVector {
        self.embed_with(&self.embed_g, x)
    }

    /// `x^phi` inside nu(G).
    pub fn embed_phi(&self, x: &ExponentVector) -> ExponentVector {
        self.embed_with(&self.embed_gphi, x)
    }

    fn embed_with(&self, images: &[ExponentVector], x: &ExponentVector) -> ExponentVector {
        let mut acc = self.nu.identity();
        for (k, &e) in x.as_slice().iter().enumerate() {
            if e != 0 {
                acc = self.nu.mul(&acc, &self.nu.pow(&images[k], e as i64));
            }
        }
        acc
    }

    /// `[x, y^phi]` in nu(G), the image of `x (x) y`.
    pub fn tensor_element(&self, x: &ExponentVector, y: &ExponentVector) -> ExponentVector {
        self.nu.comm(&self.embed(x), &self.embed_phi(y))
    }

    pub fn tensor(&self) -> SubPresentation {
        self.tensor_sub.presentation()
    }

    pub fn wedge(&self) -> Result<Wedge> {
        let tensor = self.tensor();
        let gens: Vec<ExponentVector> = self
            .nabla
            .igs()
            .iter()
            .map(|s| tensor.from_parent(s).expect("nabla lies in [G, G^phi]"))
            .collect();
        let n = Subgroup::closure(&tensor.pres, &gens);
        let quotient = quotient_by(&tensor.pres, &n)?;
        Ok(Wedge { tensor, quotient })
    }

    /// The map nu(G) -> G with `g -> g` and `g^phi -> g`.
    pub fn kappa(&self) -> Result<Homomorphism> {
        let g = &self.group;
        let mut targets = g.generators();
        targets.extend(g.generators());
        let images = self.quotient.induced_images(g, &targets);
        Homomorphism::new(&self.nu, g, images)
    }

    /// The commutator map `G ^ G -> G`.
    pub fn commutator_map(&self, w: &Wedge) -> Result<Homomorphism> {
        let kappa = self.kappa()?;
        let wp = w.presentation();
        let images = wp.generators().iter().map(|y| kappa.apply(&w.lift(y))).collect();
        Homomorphism::new(wp, &self.group, images)
    }

    pub fn schur_multiplier(&self, w: &Wedge) -> Result<AbelianInvariants> {
        let k = self.commutator_map(w)?.kernel();
        abelian_invariants(w.presentation(), &k, None)
    }

    /// Central elements `z` with `[g, z^phi]` trivial in `G ^ G` for every `g`.
    pub fn epicenter(&self, w: &Wedge) -> Result<Subgroup> {
        let g = &self.group;
        let mut z = characteristic_subgroups(g).center;
        let wp = w.presentation();
        for i in 0..g.len() {
            if z.is_trivial() {
                break;
            }
            let sp = z.presentation();
            let gi = &self.embed_g[i];
            let images: Vec<ExponentVector> = sp
                .sub
                .igs()
                .iter()
                .map(|c| {
                    let t = self.nu.comm(gi, &self.embed_phi(c));
                    w.project(&t).expect("[g, z^phi] lies in [G, G^phi]")
                })
                .collect();
            let k = Homomorphism::new(&sp.pres, wp, images)?.kernel();
            let gens: Vec<ExponentVector> = k.igs().iter().map(|v| sp.to_parent(v)).collect();
            z = Subgroup::closure(g, &gens);
        }
        Ok(z)
    }
}

/// Everything the tables report about one group.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub abelianization: AbelianInvariants,
    pub derived_order_exponent: u32,
    pub class: usize,
    pub tensor: GroupDescriptor,
    pub wedge: GroupDescriptor,
    pub multiplier: AbelianInvariants,
    pub epicenter: Subgroup,
    pub nu_order_exponent: u32,
    pub nu_class: usize,
}

impl Analysis {
    pub fn capable(&self) -> bool {
        self.epicenter.is_trivial()
    }
}

pub fn analyze(g: &PcPresentation, p: u32, opts: &QuotientOptions) -> Result<(NuRealization, Analysis)> {
    let real = realize_nu_with(g, p, opts)?;
    let ch = characteristic_subgroups(g);
    let abelianization = abelian_invariants(g, &Subgroup::whole(g), Some(&ch.derived))?;
    let w = real.wedge()?;
    let tensor = GroupDescriptor::of(&w.tensor.pres)?;
    let wedge = GroupDescriptor::of(w.presentation())?;
    let multiplier = real.schur_multiplier(&w)?;
    let epicenter = real.epicenter(&w)?;
    let nu_class = characteristic_subgroups(&real.nu).class;
    let a = Analysis {
        abelianization,
        derived_order_exponent: ch.derived.order_exponent(),
        class: ch.class,
        tensor,
        wedge,
        multiplier,
        epicenter,
        nu_order_exponent: real.nu.order_exponent(),
        nu_class,
    };
    Ok((real, a))
}

pub fn tensor_square(g: &PcPresentation, p: u32) -> Result<GroupDescriptor> {
    GroupDescriptor::of(&realize_nu(g, p)?.tensor().pres)
}

pub fn exterior_square(g: &PcPresentation, p: u32) -> Result<GroupDescriptor> {
    GroupDescriptor::of(realize_nu(g, p)?.wedge()?.presentation())
}

pub fn schur_multiplier(g: &PcPresentation, p: u32) -> Result<AbelianInvariants> {
    let real = realize_nu(g, p)?;
    let w = real.wedge()?;
    real.schur_multiplier(&w)
}

/// The epicenter and whether `G` is capable (trivial epicenter).
pub fn epicenter(g: &PcPresentation, p: u32) -> Result<(Subgroup, bool)> {
    let real = realize_nu(g, p)?;
    let w = real.wedge()?;
    let z = real.epicenter(&w)?;
    let capable = z.is_trivial();
    Ok((z, capable))
}

/// Outcome of one sampled identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub samples: usize,
    pub failures: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.failures == 0)
    }
}

fn random_element(g: &PcPresentation, rng: &mut StdRng) -> ExponentVector {
    ExponentVector::from_vec(g.relative_orders().iter().map(|&o| rng.gen_range(0..o)).collect())
}

fn random_in(s: &Subgroup, rng: &mut StdRng) -> ExponentVector {
    let p = s.parent().prime().unwrap_or(2);
    let coords: Vec<u32> = (0..s.igs().len()).map(|_| rng.gen_range(0..p)).collect();
    s.element(&coords)
}

/// Samples the commutator identities that hold in nu(G), the symmetry of
/// `G ^ G`, membership of `[g, g^phi]` in nabla, and the Hall-Witt identity.
pub fn check_nu_identities(real: &NuRealization, samples: usize, seed: u64) -> Result<IdentityReport> {
    let g = &real.group;
    let nu = &real.nu;
    let mut rng = StdRng::seed_from_u64(seed);
    let ch = characteristic_subgroups(g);
    let e = |x: &ExponentVector| real.embed(x);
    let f = |x: &ExponentVector| real.embed_phi(x);
    let c = |x: &ExponentVector, y: &ExponentVector| nu.comm(x, y);
    let c3 = |x: &ExponentVector, y: &ExponentVector, z: &ExponentVector| c(&c(x, y), z);
    let central = |x: &ExponentVector| nu.generators().iter().all(|y| c(x, y).is_identity());
    let names = [
        "three-term commutators agree",
        "[g,h^phi] = [h,g^phi]^-1 for g or h in G'",
        "[g,g^phi] = 1 for g in G'",
        "[[g1,g2^phi],[h1,h2^phi]] = [[g1,g2],[h1,h2]^phi]",
        "[[g1,g2^phi],[g2,g1^phi]] = 1",
        "[g1,g2,g^phi] = 1 when g commutes with g1, g2",
        "[g,g^phi] is central",
        "[g1,g2^phi][g2,g1^phi] lies in nabla",
        "[g,g^phi] lies in nabla",
        "Hall-Witt",
    ];
    let mut failures = [0usize; 10];
    for _ in 0..samples {
        let g1 = random_element(g, &mut rng);
        let g2 = random_element(g, &mut rng);
        let g3 = random_element(g, &mut rng);
        let d = random_in(&ch.derived, &mut rng);

        let v = [
            c3(&f(&g1), &e(&g2), &e(&g3)),
            c3(&e(&g1), &f(&g2), &e(&g3)),
            c3(&e(&g1), &e(&g2), &f(&g3)),
            c3(&f(&g1), &f(&g2), &e(&g3)),
            c3(&f(&g1), &e(&g2), &f(&g3)),
            c3(&e(&g1), &f(&g2), &f(&g3)),
        ];
        failures[0] += usize::from(v.iter().any(|x| x != &v[0]));

        let ok = c(&e(&d), &f(&g1)) == nu.inv(&c(&e(&g1), &f(&d)))
            && c(&e(&g1), &f(&d)) == nu.inv(&c(&e(&d), &f(&g1)));
        failures[1] += usize::from(!ok);
        failures[2] += usize::from(!c(&e(&d), &f(&d)).is_identity());

        let lhs = c(&c(&e(&g1), &f(&g2)), &c(&e(&g3), &f(&d)));
        let rhs = c(&e(&g.comm(&g1, &g2)), &f(&g.comm(&g3, &d)));
        failures[3] += usize::from(lhs != rhs);
        failures[4] += usize::from(!c(&c(&e(&g1), &f(&g2)), &c(&e(&g2), &f(&g1))).is_identity());

        // g1, g2 taken from <g3> Z(G) so both commute with g3
        let z1 = random_in(&ch.center, &mut rng);
        let z2 = random_in(&ch.center, &mut rng);
        let h1 = g.mul(&g.pow(&g3, rng.gen_range(0..8)), &z1);
        let h2 = g.mul(&g.pow(&g3, rng.gen_range(0..8)), &z2);
        let h1 = if rng.gen_bool(0.5) { h1 } else { z1.clone() };
        failures[5] += usize::from(!c3(&e(&h1), &e(&h2), &f(&g3)).is_identity());

        let diag = c(&e(&g1), &f(&g1));
        failures[6] += usize::from(!central(&diag));
        let sym = nu.mul(&c(&e(&g1), &f(&g2)), &c(&e(&g2), &f(&g1)));
        failures[7] += usize::from(!real.nabla.contains(&sym));
        failures[8] += usize::from(!real.nabla.contains(&diag));

        let x = nu.mul(&e(&g1), &f(&g2));
        let y = nu.mul(&f(&g3), &e(&g2));
        let z = nu.mul(&e(&d), &f(&g1));
        let hw = [
            nu.conj(&c3(&x, &nu.inv(&y), &z), &y),
            nu.conj(&c3(&y, &nu.inv(&z), &x), &z),
            nu.conj(&c3(&z, &nu.inv(&x), &y), &x),
        ];
        let prod = hw.iter().fold(nu.identity(), |acc, t| nu.mul(&acc, t));
        failures[9] += usize::from(!prod.is_identity());
    }
    Ok(IdentityReport {
        checks: names
            .iter()
            .zip(failures)
            .map(|(&name, failures)| IdentityCheck { name, samples, failures })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pc::parse_pc_presentation;

    fn heis(p: u32) -> PcPresentation {
        parse_pc_presentation(&format!(
            "generators: a, a1, a2\norder(a)={p}\norder(a1)={p}\norder(a2)={p}\n[a1,a]=a2"
        ))
        .unwrap()
    }

    #[test]
    fn relator_counts() {
        let z = PcPresentation::abelian(&[5]).unwrap();
        let fp = build_nu_presentation(&z);
        assert_eq!(fp.generator_count(), 2);
        assert_eq!(fp.relators().len(), 2 + 2);
        let fp = build_nu_presentation(&heis(5));
        assert_eq!(fp.generator_count(), 6);
        // 3 power and 3 commutator relators per copy, 2 * 27 compatibility
        assert_eq!(fp.relators().len(), 12 + 54);
    }

    #[test]
    fn cyclic_group() {
        let z = PcPresentation::abelian(&[5]).unwrap();
        let real = realize_nu(&z, 5).unwrap();
        assert_eq!(real.nu.order_exponent(), 3);
        assert_eq!(real.tensor_sub.order_exponent(), 1);
        let w = real.wedge().unwrap();
        assert!(w.presentation().is_empty());
        assert!(real.schur_multiplier(&w).unwrap().is_trivial());
        assert!(!real.epicenter(&w).unwrap().is_trivial());
    }

    #[test]
    fn heisenberg() {
        let g = heis(5);
        let real = realize_nu(&g, 5).unwrap();
        assert_eq!(real.tensor_sub.order_exponent(), 6);
        assert_eq!(real.nu.order_exponent(), 12);
        let w = real.wedge().unwrap();
        assert_eq!(real.schur_multiplier(&w).unwrap(), AbelianInvariants::elementary(5, 2));
        assert!(real.epicenter(&w).unwrap().is_trivial());
        let rep = check_nu_identities(&real, 20, 7).unwrap();
        assert!(rep.all_passed(), "{rep:?}");
    }

    #[test]
    fn trivial_group() {
        let t = PcPresentation::trivial();
        let (_, a) = analyze(&t, 5, &QuotientOptions::default()).unwrap();
        assert!(a.multiplier.is_trivial());
        assert_eq!(a.tensor.abelian, Some(AbelianInvariants::trivial()));
        assert!(a.capable());
    }
}
