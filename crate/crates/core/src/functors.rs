//! Whitehead's quadratic functor, tensor products of abelian groups, and the
//! product formulas for multipliers and tensor squares.

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::nu::{exterior_square, GroupDescriptor};
use crate::pc::{abelian_invariants, characteristic_subgroups, PcPresentation, Subgroup};
use crate::snf::AbelianInvariants;

/// `Gamma(A)`, from `Gamma(Z_n) = Z_n` (n odd) or `Z_2n` (n even) and
/// `Gamma(A x B) = Gamma(A) x Gamma(B) x (A (x) B)`.
pub fn gamma_whitehead(a: &AbelianInvariants) -> AbelianInvariants {
    let q = a.primary();
    let mut orders = Vec::with_capacity(q.len() * (q.len() + 1) / 2);
    for (i, &n) in q.iter().enumerate() {
        orders.push(if n % 2 == 0 { 2 * n } else { n });
        for &m in &q[i + 1..] {
            orders.push(n.gcd(&m));
        }
    }
    AbelianInvariants::from_orders(orders)
}

/// `A (x) B` over the integers.
pub fn abelian_tensor(a: &AbelianInvariants, b: &AbelianInvariants) -> AbelianInvariants {
    let (qa, qb) = (a.primary(), b.primary());
    AbelianInvariants::from_orders(qa.iter().flat_map(|&n| qb.iter().map(move |&m| n.gcd(&m))))
}

/// `M(H x K) = M(H) x M(K) x (H^ab (x) K^ab)`.
pub fn direct_product_multiplier(
    mh: &AbelianInvariants,
    mk: &AbelianInvariants,
    hab: &AbelianInvariants,
    kab: &AbelianInvariants,
) -> AbelianInvariants {
    mh.product(mk).product(&abelian_tensor(hab, kab))
}

fn product_descriptor(parts: &[&GroupDescriptor]) -> GroupDescriptor {
    let fingerprint = parts
        .iter()
        .skip(1)
        .fold(parts[0].fingerprint.clone(), |acc, d| acc.direct_product(&d.fingerprint));
    let abelian = parts.iter().try_fold(AbelianInvariants::trivial(), |acc, d| {
        d.abelian.as_ref().map(|a| acc.product(a))
    });
    GroupDescriptor { fingerprint, abelian, catalog_name: None }
}

/// `(G x H) (x) (G x H)` for groups acting trivially on each other: the two
/// tensor squares and two copies of `G^ab (x) H^ab`.
pub fn direct_product_tensor(
    tg: &GroupDescriptor,
    th: &GroupDescriptor,
    gab: &AbelianInvariants,
    hab: &AbelianInvariants,
) -> GroupDescriptor {
    let cross = GroupDescriptor::from_abelian(&abelian_tensor(gab, hab));
    product_descriptor(&[tg, &cross, &cross, th])
}

/// `Gamma(G^ab) x (G ^ G)` from an already computed exterior square.
pub fn tensor_from_parts(gab: &AbelianInvariants, wedge: &GroupDescriptor) -> GroupDescriptor {
    product_descriptor(&[&GroupDescriptor::from_abelian(&gamma_whitehead(gab)), wedge])
}

/// The tensor square of a group without 2-torsion, as `Gamma(G^ab) x (G ^ G)`.
pub fn tensor_via_decomposition(g: &PcPresentation, p: u32) -> Result<GroupDescriptor> {
    if p == 2 {
        return Err(Error::Applicability(
            "the decomposition needs a group without elements of order 2".into(),
        ));
    }
    let derived = characteristic_subgroups(g).derived;
    let gab = abelian_invariants(g, &Subgroup::whole(g), Some(&derived))?;
    Ok(tensor_from_parts(&gab, &exterior_square(g, p)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn inv(v: &[u64]) -> AbelianInvariants {
        AbelianInvariants::from_orders(v.iter().copied())
    }

    // |A (x) B| = |Hom(A, B)|, counted by brute force over the elements of B
    fn hom_count(a: &[u64], b: &[u64]) -> u64 {
        let elems: Vec<Vec<u64>> = b.iter().fold(vec![vec![]], |acc, &m| {
            acc.into_iter()
                .flat_map(|v| (0..m).map(move |x| [v.clone(), vec![x]].concat()))
                .collect()
        });
        a.iter()
            .map(|&n| {
                elems
                    .iter()
                    .filter(|e| e.iter().zip(b).all(|(&x, &m)| (x * n) % m == 0))
                    .count() as u64
            })
            .product()
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_whitehead(&inv(&[5])), inv(&[5]));
        assert_eq!(gamma_whitehead(&inv(&[2])), inv(&[4]));
        assert_eq!(gamma_whitehead(&inv(&[5, 5])), inv(&[5, 5, 5]));
        assert_eq!(gamma_whitehead(&inv(&[25, 5])), inv(&[25, 5, 5]));
        assert!(gamma_whitehead(&AbelianInvariants::trivial()).is_trivial());
    }

    #[test]
    fn tensor_examples() {
        assert_eq!(abelian_tensor(&inv(&[4]), &inv(&[6])), inv(&[2]));
        assert!(abelian_tensor(&AbelianInvariants::trivial(), &inv(&[5, 25])).is_trivial());
        assert_eq!(abelian_tensor(&inv(&[25, 5]), &inv(&[5])), inv(&[5, 5]));
    }

    #[test]
    fn multiplier_of_products() {
        let z5 = inv(&[5]);
        let one = AbelianInvariants::trivial();
        // Phi2(21) has trivial multiplier and abelianization Z5^2
        assert_eq!(direct_product_multiplier(&one, &one, &inv(&[5, 5]), &z5), inv(&[5, 5]));
        assert_eq!(direct_product_multiplier(&z5, &one, &inv(&[5, 5]), &one), z5);
        assert_eq!(direct_product_multiplier(&one, &one, &z5, &z5), z5);
    }

    #[test]
    fn tensor_of_products() {
        let z5 = inv(&[5]);
        let tg = GroupDescriptor::from_abelian(&AbelianInvariants::elementary(5, 9));
        let th = GroupDescriptor::from_abelian(&z5);
        let t = direct_product_tensor(&tg, &th, &inv(&[5, 5, 5]), &z5);
        assert_eq!(t.abelian, Some(AbelianInvariants::elementary(5, 16)));
        let t = direct_product_tensor(&th, &th, &z5, &z5);
        assert_eq!(t.abelian, Some(AbelianInvariants::elementary(5, 4)));
        let t = direct_product_tensor(&tg, &GroupDescriptor::from_abelian(&AbelianInvariants::trivial()), &inv(&[5, 5, 5]), &AbelianInvariants::trivial());
        assert_eq!(t, tg);
    }

    #[test]
    fn decomposition_rejects_two() {
        let g = PcPresentation::abelian(&[2]).unwrap();
        assert!(tensor_via_decomposition(&g, 2).is_err());
    }

    #[test]
    fn decomposition_matches_direct_engine() {
        let g = crate::pc::parse_pc_presentation(
            "generators: a, b, c\na^5 = 1\nb^5 = 1\nc^5 = 1\n[b,a] = c\n",
        )
        .unwrap();
        let direct = crate::nu::tensor_square(&g, 5).unwrap();
        let via = tensor_via_decomposition(&g, 5).unwrap();
        assert_eq!(via.fingerprint, direct.fingerprint);
        assert_eq!(via.abelian, Some(AbelianInvariants::elementary(5, 6)));
        let z5 = PcPresentation::abelian(&[5]).unwrap();
        assert_eq!(tensor_via_decomposition(&z5, 5).unwrap().abelian, Some(inv(&[5])));
    }

    fn small_group() -> impl Strategy<Value = Vec<u64>> {
        prop::collection::vec(prop::sample::select(vec![2u64, 3, 4, 5, 8, 9, 25]), 0..3)
    }

    proptest! {
        #[test]
        fn tensor_order_is_hom_count(a in small_group(), b in small_group()) {
            let t = abelian_tensor(&inv(&a), &inv(&b));
            prop_assert_eq!(t.order(), hom_count(&a, &b).into());
        }

        #[test]
        fn tensor_is_symmetric_and_additive(a in small_group(), b in small_group(), c in small_group()) {
            let (a, b, c) = (inv(&a), inv(&b), inv(&c));
            prop_assert_eq!(abelian_tensor(&a, &b), abelian_tensor(&b, &a));
            prop_assert_eq!(
                abelian_tensor(&a, &b.product(&c)),
                abelian_tensor(&a, &b).product(&abelian_tensor(&a, &c))
            );
        }

        #[test]
        fn gamma_of_product(a in small_group(), b in small_group()) {
            let (a, b) = (inv(&a), inv(&b));
            prop_assert_eq!(
                gamma_whitehead(&a.product(&b)),
                gamma_whitehead(&a).product(&gamma_whitehead(&b)).product(&abelian_tensor(&a, &b))
            );
        }
    }
}
