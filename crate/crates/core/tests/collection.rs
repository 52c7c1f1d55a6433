use std::sync::OnceLock;

use proptest::prelude::*;

use pgx_core::catalog::Catalog;
use pgx_core::pc::{characteristic_subgroups, verify_power_commutator_identity};
use pgx_core::{ExponentVector, PcPresentation};

const GROUPS: [(&str, u32); 6] = [
    ("Phi2(41)", 5),
    ("Phi3(311)b_1", 7),
    ("Phi6(221)b_1", 5),
    ("Phi9(2111)a", 5),
    ("Phi10(1^5)", 7),
    ("X", 3),
];

fn groups() -> &'static Vec<PcPresentation> {
    static G: OnceLock<Vec<PcPresentation>> = OnceLock::new();
    G.get_or_init(|| {
        let cat = Catalog::embedded().unwrap();
        GROUPS.iter().map(|(n, p)| cat.named_group(n, *p).unwrap()).collect()
    })
}

fn element(g: &PcPresentation, seeds: &[u32]) -> ExponentVector {
    ExponentVector::from_vec(g.relative_orders().iter().zip(seeds).map(|(o, s)| s % o).collect())
}

fn sample() -> impl Strategy<Value = (usize, Vec<u32>, Vec<u32>, Vec<u32>)> {
    let v = || prop::collection::vec(any::<u32>(), 8);
    (0..GROUPS.len(), v(), v(), v())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn group_axioms((k, a, b, c) in sample()) {
        let g = &groups()[k];
        let (x, y, z) = (element(g, &a), element(g, &b), element(g, &c));
        prop_assert_eq!(g.mul(&g.mul(&x, &y), &z), g.mul(&x, &g.mul(&y, &z)));
        prop_assert_eq!(g.mul(&x, &g.inv(&x)), g.identity());
        prop_assert_eq!(g.mul(&g.identity(), &x), x.clone());
        prop_assert_eq!(g.inv(&g.comm(&x, &y)), g.comm(&y, &x));
    }

    #[test]
    fn powers_add((k, a, _, _) in sample(), m in -40i64..40, n in -40i64..40) {
        let g = &groups()[k];
        let x = element(g, &a);
        prop_assert_eq!(g.mul(&g.pow(&x, m), &g.pow(&x, n)), g.pow(&x, m + n));
        let p = g.prime().unwrap() as i64;
        prop_assert_eq!(g.pow(&x, p.pow(g.order_exponent())), g.identity());
    }

    #[test]
    fn hall_witt((k, a, b, c) in sample()) {
        let g = &groups()[k];
        let (x, y, z) = (element(g, &a), element(g, &b), element(g, &c));
        let t = |x: &ExponentVector, y: &ExponentVector, z: &ExponentVector| {
            g.conj(&g.comm(&g.comm(x, &g.inv(y)), z), y)
        };
        let prod = g.mul(&g.mul(&t(&x, &y, &z), &t(&y, &z, &x)), &t(&z, &x, &y));
        prop_assert_eq!(prod, g.identity());
    }

    #[test]
    fn power_commutator_identity((k, a, b, _) in sample(), n in 0u64..80) {
        let g = &groups()[k];
        prop_assert!(verify_power_commutator_identity(g, &element(g, &a), &element(g, &b), n).unwrap());
    }

    #[test]
    fn derived_and_center_membership((k, a, b, _) in sample()) {
        let g = &groups()[k];
        let ch = characteristic_subgroups(g);
        let (x, y) = (element(g, &a), element(g, &b));
        prop_assert!(ch.derived.contains(&g.comm(&x, &y)));
        let d = g.comm(&g.comm(&x, &y), &x);
        prop_assert!(ch.derived.contains(&g.conj(&d, &y)));
        let z = element(g, &b);
        prop_assert!(ch.center.igs().iter().all(|c| g.comm(c, &z) == g.identity()));
    }
}
