//! Subgroups as induced generating sequences, with quotients, kernels and series.

use num_bigint::{BigInt, BigUint};

use super::{ExponentVector, PcPresentation, Word};
use crate::error::{Error, Result};
use crate::linalg;
use crate::snf::AbelianInvariants;

/// A subgroup of a pc-presented group, stored as a canonical induced
/// generating sequence: one element per depth, leading exponent 1 and zero
/// exponents at the depths of the other elements.
#[derive(Clone, Debug)]
pub struct Subgroup {
    parent: PcPresentation,
    igs: Vec<ExponentVector>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.parent == other.parent && self.igs == other.igs
    }
}

struct Builder<'a> {
    g: &'a PcPresentation,
    p: u32,
    by_depth: Vec<Option<ExponentVector>>,
    /// Elements to close under conjugation by (normal closure).
    conjugators: &'a [ExponentVector],
    queue: Vec<ExponentVector>,
}

impl<'a> Builder<'a> {
    fn new(g: &'a PcPresentation, conjugators: &'a [ExponentVector]) -> Self {
        Builder {
            g,
            p: g.prime().unwrap_or(2),
            by_depth: vec![None; g.len()],
            conjugators,
            queue: Vec::new(),
        }
    }

    fn sift(&self, mut x: ExponentVector) -> ExponentVector {
        while let Some(d) = x.depth() {
            match &self.by_depth[d] {
                Some(s) => {
                    let e = self.p - x[d];
                    x = self.g.mul(&x, &self.g.pow(s, e as i64));
                }
                None => break,
            }
        }
        x
    }

    fn add(&mut self, x: ExponentVector) {
        self.queue.push(x);
        while let Some(x) = self.queue.pop() {
            let r = self.sift(x);
            let Some(d) = r.depth() else { continue };
            let lead = r[d];
            let r = if lead == 1 {
                r
            } else {
                self.g.pow(&r, linalg::inv_mod(lead, self.p) as i64)
            };
            for s in self.by_depth.iter().flatten() {
                self.queue.push(self.g.comm(&r, s));
            }
            for c in self.conjugators {
                self.queue.push(self.g.comm(&r, c));
            }
            self.queue.push(self.g.pow(&r, self.p as i64));
            self.by_depth[d] = Some(r);
        }
    }

    fn finish(self) -> Subgroup {
        let g = self.g;
        let p = self.p;
        let mut igs: Vec<ExponentVector> = self.by_depth.into_iter().flatten().collect();
        let depths: Vec<usize> = igs.iter().map(|s| s.depth().unwrap()).collect();
        for i in 0..igs.len() {
            for j in i + 1..igs.len() {
                let e = igs[i][depths[j]];
                if e != 0 {
                    let t = g.pow(&igs[j], (p - e) as i64);
                    igs[i] = g.mul(&igs[i], &t);
                }
            }
        }
        Subgroup { parent: g.clone(), igs }
    }
}

fn validate_all(g: &PcPresentation, xs: &[ExponentVector]) -> Result<()> {
    xs.iter().try_for_each(|x| g.validate(x))
}

/// Subgroup generated by `gens`.
pub fn subgroup_closure(g: &PcPresentation, gens: &[ExponentVector]) -> Result<Subgroup> {
    validate_all(g, gens)?;
    Ok(Subgroup::closure(g, gens))
}

impl Subgroup {
    pub(crate) fn closure(g: &PcPresentation, gens: &[ExponentVector]) -> Subgroup {
        let mut b = Builder::new(g, &[]);
        for x in gens {
            b.add(x.clone());
        }
        b.finish()
    }

    /// Smallest normal subgroup of the parent containing `gens`.
    pub fn normal_closure(g: &PcPresentation, gens: &[ExponentVector]) -> Subgroup {
        Self::closure_under(g, gens, &g.generators())
    }

    /// Closure of `gens` under multiplication and conjugation by `by`.
    pub fn closure_under(
        g: &PcPresentation,
        gens: &[ExponentVector],
        by: &[ExponentVector],
    ) -> Subgroup {
        let mut b = Builder::new(g, by);
        for x in gens {
            b.add(x.clone());
        }
        b.finish()
    }

    pub fn whole(g: &PcPresentation) -> Subgroup {
        Subgroup { parent: g.clone(), igs: g.generators() }
    }

    pub fn trivial(g: &PcPresentation) -> Subgroup {
        Subgroup { parent: g.clone(), igs: Vec::new() }
    }

    pub fn parent(&self) -> &PcPresentation {
        &self.parent
    }

    pub fn igs(&self) -> &[ExponentVector] {
        &self.igs
    }

    pub fn depths(&self) -> Vec<usize> {
        self.igs.iter().map(|s| s.depth().unwrap()).collect()
    }

    pub fn order_exponent(&self) -> u32 {
        self.igs.len() as u32
    }

    pub fn order(&self) -> BigUint {
        BigUint::from(self.parent.prime().unwrap_or(1)).pow(self.order_exponent())
    }

    pub fn is_trivial(&self) -> bool {
        self.igs.is_empty()
    }

    pub fn is_whole(&self) -> bool {
        self.igs.len() == self.parent.len()
    }

    /// Exponents `c` with `x = s_1^c_1 ... s_m^c_m`, if `x` lies in the subgroup.
    pub fn coordinates(&self, x: &ExponentVector) -> Option<Vec<u32>> {
        let g = &self.parent;
        let depths = self.depths();
        let mut coords = vec![0; self.igs.len()];
        let mut x = x.clone();
        let mut next = 0;
        while let Some(d) = x.depth() {
            let k = depths[next..].iter().position(|&e| e == d)? + next;
            let c = x[d];
            coords[k] = c;
            let s = g.pow(&self.igs[k], -(c as i64));
            x = g.mul(&s, &x);
            next = k + 1;
        }
        Some(coords)
    }

    pub fn contains(&self, x: &ExponentVector) -> bool {
        self.coordinates(x).is_some()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.igs.iter().all(|s| other.contains(s))
    }

    pub fn is_normal(&self) -> bool {
        let g = &self.parent;
        self.igs
            .iter()
            .all(|s| g.generators().iter().all(|c| self.contains(&g.comm(s, c))))
    }

    /// Product `s_1^c_1 ... s_m^c_m`.
    pub fn element(&self, coords: &[u32]) -> ExponentVector {
        let g = &self.parent;
        let mut acc = g.identity();
        for (s, &c) in self.igs.iter().zip(coords) {
            if c != 0 {
                acc = g.mul(&acc, &g.pow(s, c as i64));
            }
        }
        acc
    }

    /// Subgroup generated by both.
    pub fn join(&self, other: &Subgroup) -> Subgroup {
        let mut gens = self.igs.clone();
        gens.extend_from_slice(&other.igs);
        Subgroup::closure(&self.parent, &gens)
    }

    /// `[self, other]` for normal subgroups.
    pub fn commutator_with(&self, other: &Subgroup) -> Subgroup {
        let g = &self.parent;
        let gens: Vec<ExponentVector> = self
            .igs
            .iter()
            .flat_map(|a| other.igs.iter().map(move |b| g.comm(a, b)))
            .collect();
        Subgroup::normal_closure(g, &gens)
    }

    /// Pc presentation on the igs.
    pub fn presentation(&self) -> SubPresentation {
        let g = &self.parent;
        let m = self.igs.len();
        let p = g.prime().unwrap_or(2);
        let word = |x: &ExponentVector| -> Word {
            let c = self.coordinates(x).expect("subgroup is closed");
            c.into_iter().enumerate().filter(|&(_, e)| e != 0).collect()
        };
        let powers = self.igs.iter().map(|s| word(&g.pow(s, p as i64))).collect();
        let mut comms = Vec::new();
        for j in 0..m {
            for i in 0..j {
                let w = word(&g.comm(&self.igs[j], &self.igs[i]));
                if !w.is_empty() {
                    comms.push((j, i, w));
                }
            }
        }
        let names = (1..=m).map(|k| format!("s{k}")).collect();
        let pres = PcPresentation::new(names, vec![p; m], powers, comms)
            .expect("igs presentation is well formed");
        SubPresentation { pres, sub: self.clone() }
    }
}

/// A subgroup together with a presentation on its igs.
#[derive(Clone, Debug)]
pub struct SubPresentation {
    pub pres: PcPresentation,
    pub sub: Subgroup,
}

impl SubPresentation {
    pub fn to_parent(&self, v: &ExponentVector) -> ExponentVector {
        self.sub.element(v.as_slice())
    }

    pub fn from_parent(&self, x: &ExponentVector) -> Option<ExponentVector> {
        self.sub.coordinates(x).map(ExponentVector::from_vec)
    }
}

/// `G/N` with maps between the two.
#[derive(Clone, Debug)]
pub struct Quotient {
    pres: PcPresentation,
    normal: Subgroup,
    kept: Vec<usize>,
}

impl Quotient {
    pub fn presentation(&self) -> &PcPresentation {
        &self.pres
    }

    pub fn normal(&self) -> &Subgroup {
        &self.normal
    }

    /// Parent generator positions that survive in the quotient.
    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    /// Image of a parent element.
    pub fn project(&self, x: &ExponentVector) -> ExponentVector {
        let g = self.normal.parent();
        let p = g.prime().unwrap_or(2);
        let mut x = x.clone();
        for (s, d) in self.normal.igs.iter().zip(self.normal.depths()) {
            let e = x[d];
            if e != 0 {
                x = g.mul(&x, &g.pow(s, (p - e) as i64));
            }
        }
        ExponentVector::from_vec(self.kept.iter().map(|&k| x[k]).collect())
    }

    /// A preimage of a quotient element.
    pub fn lift(&self, y: &ExponentVector) -> ExponentVector {
        let mut v = vec![0; self.normal.parent().len()];
        for (&k, &e) in self.kept.iter().zip(y.as_slice()) {
            v[k] = e;
        }
        ExponentVector::from_vec(v)
    }
}

/// `G/N` for a normal subgroup `N`.
pub fn quotient_by(g: &PcPresentation, n: &Subgroup) -> Result<Quotient> {
    if n.parent() != g {
        return Err(Error::NotContained);
    }
    if !n.is_normal() {
        return Err(Error::NotNormal);
    }
    let depths = n.depths();
    let kept: Vec<usize> = (0..g.len()).filter(|d| !depths.contains(d)).collect();
    let mut q = Quotient { pres: PcPresentation::trivial(), normal: n.clone(), kept };
    let word = |q: &Quotient, x: &ExponentVector| q.project(x).to_word();
    let names = q.kept.iter().map(|&k| g.names()[k].clone()).collect();
    let orders = q.kept.iter().map(|&k| g.relative_orders()[k]).collect();
    let powers = q
        .kept
        .iter()
        .map(|&k| word(&q, &ExponentVector::from_word(g.len(), g.power_rule(k))))
        .collect();
    let mut comms = Vec::new();
    for (j, &kj) in q.kept.iter().enumerate() {
        for (i, &ki) in q.kept[..j].iter().enumerate() {
            let w = word(&q, &ExponentVector::from_word(g.len(), g.commutator_rule(kj, ki)));
            if !w.is_empty() {
                comms.push((j, i, w));
            }
        }
    }
    q.pres = PcPresentation::new(names, orders, powers, comms)?;
    Ok(q)
}

/// A homomorphism given by the images of the pc generators.
#[derive(Clone, Debug)]
pub struct Homomorphism {
    src: PcPresentation,
    dst: PcPresentation,
    images: Vec<ExponentVector>,
}

impl Homomorphism {
    /// Checks every defining relation of `src` maps to the identity.
    pub fn new(src: &PcPresentation, dst: &PcPresentation, images: Vec<ExponentVector>) -> Result<Self> {
        if images.len() != src.len() {
            return Err(Error::Length { expected: src.len(), found: images.len() });
        }
        validate_all(dst, &images)?;
        let h = Homomorphism { src: src.clone(), dst: dst.clone(), images };
        let n = src.len();
        for i in 0..n {
            let l = dst.pow(&h.images[i], src.relative_orders()[i] as i64);
            let r = h.apply_word(src.power_rule(i));
            if l != r {
                return Err(Error::NotHomomorphism(format!(
                    "{}^{} = {}",
                    src.names()[i],
                    src.relative_orders()[i],
                    src.format_word(src.power_rule(i))
                )));
            }
            for j in i + 1..n {
                let l = dst.comm(&h.images[j], &h.images[i]);
                let r = h.apply_word(src.commutator_rule(j, i));
                if l != r {
                    return Err(Error::NotHomomorphism(format!(
                        "[{},{}] = {}",
                        src.names()[j],
                        src.names()[i],
                        src.format_word(src.commutator_rule(j, i))
                    )));
                }
            }
        }
        Ok(h)
    }

    fn apply_word(&self, w: &[(usize, u32)]) -> ExponentVector {
        let mut acc = self.dst.identity();
        for &(g, e) in w {
            acc = self.dst.mul(&acc, &self.dst.pow(&self.images[g], e as i64));
        }
        acc
    }

    pub fn apply(&self, x: &ExponentVector) -> ExponentVector {
        self.apply_word(&x.to_word())
    }

    pub fn image(&self) -> Subgroup {
        Subgroup::closure(&self.dst, &self.images)
    }

    pub fn kernel(&self) -> Subgroup {
        // igs of the graph {(phi(x), x)} in dst x src, dst coordinates first
        let prod = self.dst.direct_product(&self.src).expect("direct product of valid groups");
        let nd = self.dst.len();
        let graph: Vec<ExponentVector> = (0..self.src.len())
            .map(|i| {
                let mut v = self.images[i].as_slice().to_vec();
                v.extend_from_slice(self.src.generator(i).as_slice());
                ExponentVector::from_vec(v)
            })
            .collect();
        let gr = Subgroup::closure(&prod, &graph);
        let gens: Vec<ExponentVector> = gr
            .igs
            .iter()
            .filter(|s| s.depth().unwrap() >= nd)
            .map(|s| ExponentVector::from_vec(s.as_slice()[nd..].to_vec()))
            .collect();
        Subgroup::closure(&self.src, &gens)
    }
}

/// Kernel of the homomorphism `src -> dst` sending generator `i` to `images[i]`.
pub fn kernel_of(
    src: &PcPresentation,
    dst: &PcPresentation,
    images: &[ExponentVector],
) -> Result<Subgroup> {
    Ok(Homomorphism::new(src, dst, images.to_vec())?.kernel())
}

/// Standard characteristic subgroups of a group.
#[derive(Clone, Debug)]
pub struct Characteristic {
    pub derived: Subgroup,
    /// `gamma_1 = G, gamma_2, ...`, ending with the trivial subgroup.
    pub lower_central: Vec<Subgroup>,
    pub center: Subgroup,
    pub frattini: Subgroup,
    pub class: usize,
}

pub fn characteristic_subgroups(g: &PcPresentation) -> Characteristic {
    let gens = g.generators();
    let mut lower_central = vec![Subgroup::whole(g)];
    while !lower_central.last().unwrap().is_trivial() {
        let last = lower_central.last().unwrap();
        let comms: Vec<ExponentVector> = last
            .igs
            .iter()
            .flat_map(|x| gens.iter().map(move |y| g.comm(x, y)))
            .collect();
        lower_central.push(Subgroup::normal_closure(g, &comms));
    }
    let class = lower_central.len() - 1;
    let derived = lower_central.get(1).cloned().unwrap_or_else(|| Subgroup::trivial(g));
    let p = g.prime().unwrap_or(2);
    let mut phi: Vec<ExponentVector> = gens.iter().map(|x| g.pow(x, p as i64)).collect();
    phi.extend_from_slice(&derived.igs);
    let frattini = Subgroup::closure(g, &phi);
    Characteristic { center: center(g), derived, lower_central, frattini, class }
}

/// Center, computed down the pc series: at layer `k` keep the elements whose
/// commutators with every generator vanish at depth `k`.
pub fn center(g: &PcPresentation) -> Subgroup {
    let n = g.len();
    let p = g.prime().unwrap_or(2);
    let gens = g.generators();
    let mut c = Subgroup::whole(g);
    for k in 0..n {
        let vals: Vec<Vec<u32>> = c
            .igs
            .iter()
            .map(|x| gens.iter().map(|y| g.comm(x, y)[k]).collect())
            .collect();
        if vals.iter().all(|r| r.iter().all(|&e| e == 0)) {
            continue;
        }
        let mut new_gens: Vec<ExponentVector> = linalg::left_nullspace(&vals, n, p)
            .iter()
            .map(|a| c.element(a))
            .collect();
        for (i, x) in c.igs.iter().enumerate() {
            new_gens.push(g.pow(x, p as i64));
            for y in &c.igs[..i] {
                new_gens.push(g.comm(x, y));
            }
        }
        c = Subgroup::normal_closure(g, &new_gens);
    }
    c
}

/// Invariants of `sub / (modulo [sub, sub])`.
pub fn abelian_invariants(
    g: &PcPresentation,
    sub: &Subgroup,
    modulo: Option<&Subgroup>,
) -> Result<AbelianInvariants> {
    if sub.parent() != g {
        return Err(Error::NotContained);
    }
    let sp = sub.presentation();
    let h = &sp.pres;
    let mut rels: Vec<ExponentVector> = Vec::new();
    if let Some(m) = modulo {
        for s in m.igs() {
            rels.push(sp.from_parent(s).ok_or(Error::NotContained)?);
        }
    }
    for j in 0..h.len() {
        for i in 0..j {
            rels.push(h.comm(&h.generator(j), &h.generator(i)));
        }
    }
    let k = Subgroup::closure_under(h, &rels, &h.generators());
    let q = quotient_by(h, &k)?;
    abelian_group_invariants(q.presentation())
}

/// Invariants of an abelian pc-presented group.
pub fn abelian_group_invariants(q: &PcPresentation) -> Result<AbelianInvariants> {
    if !q.is_abelian() {
        return Err(Error::Unsupported("presentation is not abelian".into()));
    }
    let m = q.len();
    let rows: Vec<Vec<BigInt>> = (0..m)
        .map(|i| {
            let mut row = vec![BigInt::from(0); m];
            row[i] = BigInt::from(q.relative_orders()[i]);
            for &(k, e) in q.power_rule(i) {
                row[k] -= BigInt::from(e);
            }
            row
        })
        .collect();
    AbelianInvariants::from_relations(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pc::parse_pc_presentation;

    fn heis() -> PcPresentation {
        parse_pc_presentation("generators: a, a1, a2\norder(a)=5\norder(a1)=5\norder(a2)=5\n[a1,a]=a2")
            .unwrap()
    }

    #[test]
    fn closures_of_heisenberg() {
        let g = heis();
        let s = |gens: &[usize]| {
            let v: Vec<_> = gens.iter().map(|&i| g.generator(i)).collect();
            subgroup_closure(&g, &v).unwrap().order()
        };
        assert_eq!(s(&[2]), BigUint::from(5u32));
        assert_eq!(s(&[0, 1]), BigUint::from(125u32));
        assert_eq!(s(&[1, 2]), BigUint::from(25u32));
    }

    #[test]
    fn heisenberg_series() {
        let c = characteristic_subgroups(&heis());
        assert_eq!(c.class, 2);
        assert_eq!(c.derived.order_exponent(), 1);
        assert_eq!(c.center.order_exponent(), 1);
        assert_eq!(c.frattini.order_exponent(), 1);
    }

    #[test]
    fn cyclic_series() {
        let g = parse_pc_presentation("a | a^5=1").unwrap();
        let c = characteristic_subgroups(&g);
        assert_eq!(c.class, 1);
        assert!(c.derived.is_trivial());
        assert!(c.center.is_whole());
    }

    #[test]
    fn quotient_by_extremes() {
        let g = heis();
        let q = quotient_by(&g, &Subgroup::trivial(&g)).unwrap();
        assert_eq!(q.presentation(), &g);
        let q = quotient_by(&g, &Subgroup::whole(&g)).unwrap();
        assert!(q.presentation().is_empty());
        let n = subgroup_closure(&g, &[g.generator(0)]).unwrap();
        assert_eq!(quotient_by(&g, &n).unwrap_err(), Error::NotNormal);
    }

    #[test]
    fn projection_kernel() {
        let z = PcPresentation::abelian(&[5, 5]).unwrap();
        let c = PcPresentation::abelian(&[5]).unwrap();
        let k = kernel_of(&z, &c, &[c.generator(0), c.identity()]).unwrap();
        assert_eq!(k.order_exponent(), 1);
        let k = kernel_of(&z, &z, &z.generators()).unwrap();
        assert!(k.is_trivial());
        let bad = kernel_of(&heis(), &z, &[z.generator(0), z.generator(1), z.generator(0)]);
        assert!(matches!(bad, Err(Error::NotHomomorphism(_))));
    }

    #[test]
    fn invariants_of_cyclic_by_cyclic() {
        // Phi2(41): a^{p^3} = a2 generates a cyclic group of order p^4
        let g = parse_pc_presentation(
            "generators: a, a1, a2\na^125 = a2\norder(a1)=5\norder(a2)=5\n[a1,a]=a2",
        )
        .unwrap();
        let c = characteristic_subgroups(&g);
        let inv = abelian_invariants(&g, &Subgroup::whole(&g), Some(&c.derived)).unwrap();
        assert_eq!(inv.divisors(), &[5, 125]);
        assert!(abelian_invariants(&g, &Subgroup::trivial(&g), None).unwrap().is_trivial());
        assert_eq!(
            abelian_invariants(&g, &c.derived, Some(&Subgroup::whole(&g))),
            Err(Error::NotContained)
        );
    }
}
