use num_bigint::BigUint;

use super::subgroup::{abelian_invariants, characteristic_subgroups, quotient_by, Subgroup};
use super::{ExponentVector, PcPresentation};
use crate::snf::AbelianInvariants;

/// Isomorphism invariants used to recognise groups.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StructureFingerprint {
    pub order: BigUint,
    pub exponent: BigUint,
    pub nilpotency_class: usize,
    pub abelianization: AbelianInvariants,
    pub derived_order: BigUint,
    pub center_invariants: AbelianInvariants,
    /// `|G^(p^k)|` for `k = 1, 2, ...` up to the first trivial term.
    pub power_structure: Vec<BigUint>,
}

impl StructureFingerprint {
    /// Fingerprint of `self x other`, without building the product.
    pub fn direct_product(&self, other: &Self) -> Self {
        let len = self.power_structure.len().max(other.power_structure.len());
        let at = |v: &[BigUint], k: usize| v.get(k).cloned().unwrap_or_else(|| BigUint::from(1u32));
        StructureFingerprint {
            order: &self.order * &other.order,
            exponent: self.exponent.clone().max(other.exponent.clone()),
            nilpotency_class: self.nilpotency_class.max(other.nilpotency_class),
            abelianization: self.abelianization.product(&other.abelianization),
            derived_order: &self.derived_order * &other.derived_order,
            center_invariants: self.center_invariants.product(&other.center_invariants),
            power_structure: (0..len)
                .map(|k| at(&self.power_structure, k) * at(&other.power_structure, k))
                .collect(),
        }
    }

    /// Fingerprint of an abelian group.
    pub fn abelian(inv: &AbelianInvariants) -> Self {
        let prim = inv.primary();
        let exponent = prim.iter().fold(BigUint::from(1u32), |acc, &q| {
            let q = BigUint::from(q);
            if q > acc {
                q
            } else {
                acc
            }
        });
        // |A^(p^k)| = prod over cyclic factors of max(1, q / p^k)
        let p = prim.iter().map(|&q| smallest_factor(q)).min().unwrap_or(2);
        let mut power_structure = Vec::new();
        let mut pk = p;
        loop {
            let o: BigUint = prim
                .iter()
                .map(|&q| BigUint::from(if q > pk { q / pk } else { 1 }))
                .product();
            let done = o == BigUint::from(1u32);
            power_structure.push(o);
            if done {
                break;
            }
            pk *= p;
        }
        StructureFingerprint {
            order: inv.order(),
            exponent,
            nilpotency_class: usize::from(!inv.is_trivial()),
            abelianization: inv.clone(),
            derived_order: BigUint::from(1u32),
            center_invariants: inv.clone(),
            power_structure,
        }
    }
}

fn smallest_factor(q: u64) -> u64 {
    (2..=q).find(|d| q.is_multiple_of(*d)).unwrap_or(q)
}

pub fn fingerprint(g: &PcPresentation) -> StructureFingerprint {
    let ch = characteristic_subgroups(g);
    let whole = Subgroup::whole(g);
    let abelianization =
        abelian_invariants(g, &whole, Some(&ch.derived)).expect("derived subgroup is normal");
    let center_invariants = abelian_invariants(g, &ch.center, None).expect("center is a subgroup");
    let p = g.prime().unwrap_or(2);

    // Every element is t z with t from a transversal of Z(G), and (tz)^q = t^q z^q.
    let q = quotient_by(g, &ch.center).expect("center is normal");
    let transversal: Vec<ExponentVector> =
        all_elements(q.presentation()).iter().map(|y| q.lift(y)).collect();
    let mut power_structure = Vec::new();
    let mut bases: Vec<ExponentVector> = transversal;
    let mut central: Vec<ExponentVector> = ch.center.igs().to_vec();
    let mut k = 0u32;
    loop {
        bases = bases.iter().map(|t| g.pow(t, p as i64)).collect();
        central = central.iter().map(|z| g.pow(z, p as i64)).collect();
        k += 1;
        let mut gens: Vec<ExponentVector> =
            bases.iter().filter(|x| !x.is_identity()).cloned().collect();
        gens.sort();
        gens.dedup();
        bases = gens.clone();
        bases.push(g.identity());
        gens.extend(central.iter().filter(|x| !x.is_identity()).cloned());
        let s = Subgroup::closure(g, &gens);
        let trivial = s.is_trivial();
        power_structure.push(s.order());
        if trivial {
            break;
        }
    }
    StructureFingerprint {
        order: g.order(),
        exponent: BigUint::from(p).pow(if g.is_empty() { 0 } else { k }),
        nilpotency_class: ch.class,
        abelianization,
        derived_order: ch.derived.order(),
        center_invariants,
        power_structure,
    }
}

/// Every element of a (small) group in normal form.
pub(crate) fn all_elements(g: &PcPresentation) -> Vec<ExponentVector> {
    let ords = g.relative_orders();
    let mut out = vec![Vec::new()];
    for &o in ords {
        let mut next = Vec::with_capacity(out.len() * o as usize);
        for v in &out {
            for e in 0..o {
                let mut w: Vec<u32> = v.clone();
                w.push(e);
                next.push(w);
            }
        }
        out = next;
    }
    out.into_iter().map(ExponentVector::from_vec).collect()
}
