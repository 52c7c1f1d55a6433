use pgx_core::catalog::Catalog;
use pgx_core::functors::{direct_product_multiplier, tensor_via_decomposition};
use pgx_core::nu::{analyze, schur_multiplier};
use pgx_core::pquotient::QuotientOptions;
use pgx_core::special_be::{be_multiplier, be_setup};
use pgx_core::verify::be_groups;
use pgx_core::AbelianInvariants;

#[test]
fn multiplier_engines_agree_at_eleven() {
    let cat = Catalog::embedded().unwrap();
    let groups = be_groups(&cat, 11).unwrap();
    assert!(groups.len() >= 15);
    for (name, g) in groups {
        let Ok(ctx) = be_setup(&g, 11) else { continue };
        assert_eq!(be_multiplier(&ctx), schur_multiplier(&g, 11).unwrap(), "{name}");
    }
}

#[test]
fn decomposition_at_eleven() {
    let cat = Catalog::embedded().unwrap();
    for name in ["Phi2(311)b", "Phi3(221)b_1", "Phi6(1^5)", "Phi9(2111)a", "Phi10(2111)a_1"] {
        let g = cat.group(name, 11).unwrap();
        let (_, a) = analyze(&g, 11, &QuotientOptions::default()).unwrap();
        assert_eq!(tensor_via_decomposition(&g, 11).unwrap().fingerprint, a.tensor.fingerprint, "{name}");
    }
}

#[test]
fn multiplier_of_products() {
    // M(H x K) = M(H) x M(K) x (H^ab (x) K^ab)
    let cat = Catalog::embedded().unwrap();
    let h = cat.group("Phi2(21)", 5).unwrap();
    let mh = schur_multiplier(&h, 5).unwrap();
    let hab = AbelianInvariants::elementary(5, 2);
    for (k, name) in [(vec![5], "Phi2(211)a"), (vec![25], "Phi2(221)b")] {
        let kab = AbelianInvariants::from_orders(k);
        let expected = direct_product_multiplier(&mh, &AbelianInvariants::trivial(), &hab, &kab);
        let g = cat.group(name, 5).unwrap();
        assert_eq!(schur_multiplier(&g, 5).unwrap(), expected, "{name}");
    }
}
