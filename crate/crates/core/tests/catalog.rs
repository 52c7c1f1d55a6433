use pgx_core::catalog::Catalog;
use pgx_core::pc::fingerprint;

fn counts(p: u32) -> (usize, usize, usize) {
    let cat = Catalog::embedded().unwrap();
    (cat.list(3, p).unwrap().len(), cat.list(4, p).unwrap().len(), cat.list(5, p).unwrap().len())
}

#[test]
fn group_counts() {
    // all groups of order p^3, p^4, p^5 (p >= 5): 5, 15, 2p + 61 + 2 gcd(p-1,3) + gcd(p-1,4);
    // the catalog holds the non-abelian ones, so subtract the partitions 3, 5, 7
    for p in [5u32, 7, 11, 13] {
        let g = |n: u32| num_integer::gcd(p - 1, n) as usize;
        let all5 = 2 * p as usize + 61 + 2 * g(3) + g(4);
        assert_eq!(counts(p), (5 - 3, 15 - 5, all5 - 7), "p = {p}");
    }
}

#[test]
fn every_member_is_consistent() {
    let cat = Catalog::embedded().unwrap();
    for p in [5u32, 7, 11] {
        for n in 3..=5 {
            for e in cat.list(n, p).unwrap() {
                let g = cat.instantiate(&e, p).unwrap_or_else(|err| panic!("{}: {err}", e.name));
                assert_eq!(g.order_exponent(), n, "{}", e.name);
            }
        }
    }
}

#[test]
fn direct_product_families_match_explicit_products() {
    let cat = Catalog::embedded().unwrap();
    for p in [5u32, 7] {
        let mut seen = 0;
        for n in 3..=5 {
            for e in cat.list(n, p).unwrap() {
                if let Some(prod) = cat.product_form(&e, p).unwrap() {
                    let g = cat.instantiate(&e, p).unwrap();
                    assert_eq!(fingerprint(&g), fingerprint(&prod), "{} at p = {p}", e.name);
                    seen += 1;
                }
            }
        }
        // ten Phi2 products, Phi3(2111)a, two Phi3(2111)b_r, Phi3(1^5)
        assert_eq!(seen, 14, "p = {p}");
    }
}

#[test]
fn instantiation_examples() {
    let cat = Catalog::embedded().unwrap();
    let g = cat.group("Phi6(221)b_1", 5).unwrap();
    // k = zeta^1 = 2 at p = 5
    assert_eq!(g.evaluate("a1^5").unwrap(), g.evaluate("b1^2").unwrap());
    let g = cat.group("Phi4(221)e", 5).unwrap();
    // -1/4 = 1 mod 5
    assert_eq!(g.evaluate("a1^5").unwrap(), g.evaluate("b2").unwrap());
    let g = cat.group("Phi4(221)e", 7).unwrap();
    // -1/4 = 5 mod 7
    assert_eq!(g.evaluate("a1^7").unwrap(), g.evaluate("b2^5").unwrap());
    let g = cat.group("Phi2(1^5)", 5).unwrap();
    assert_eq!(g.order(), 3125u32.into());
    assert_eq!(pgx_core::pc::characteristic_subgroups(&g).class, 2);
    assert!(g.generators().iter().all(|x| g.element_order(x) <= 5));
}

#[test]
fn third_powers_at_five() {
    // Phi3 presentations use plain p-th powers for p > 3; orders come out right
    let cat = Catalog::embedded().unwrap();
    for e in cat.list(5, 5).unwrap().into_iter().chain(cat.list(4, 5).unwrap()) {
        if cat.spec(&e).isoclinism == 3 {
            let g = cat.instantiate(&e, 5).unwrap();
            assert_eq!(g.order_exponent(), cat.spec(&e).order_exponent, "{}", e.name);
            assert_eq!(pgx_core::pc::characteristic_subgroups(&g).class, 3, "{}", e.name);
        }
    }
}

#[test]
fn fixtures_load() {
    let cat = Catalog::embedded().unwrap();
    assert_eq!(cat.fixture_ids(32).len(), 44);
    assert_eq!(cat.fixture_ids(243).len(), 60);
    for (order, p) in [(32u32, 2u32), (243, 3)] {
        for id in cat.fixture_ids(order) {
            let g = cat.fixture_group(order, id).unwrap();
            assert_eq!(g.order(), order.into());
            assert_eq!(g.prime(), Some(p));
            assert!(!g.is_abelian(), "{order}/{id}");
        }
    }
    assert_eq!(cat.auxiliary_group("X").unwrap().order(), 729u32.into());
    assert_eq!(cat.auxiliary_group("Y").unwrap().order(), 243u32.into());
}

#[test]
fn identification() {
    use pgx_core::catalog::Identification;
    use pgx_core::snf::AbelianInvariants;
    let cat = Catalog::embedded().unwrap();
    let g = cat.group("Phi2(1^4)", 5).unwrap();
    assert_eq!(
        cat.identify(&fingerprint(&g), 5).unwrap(),
        Identification::Unique("Phi2(111) x Z(p)".into())
    );
    let a = pgx_core::pc::StructureFingerprint::abelian(&AbelianInvariants::from_orders([25, 5]));
    assert_eq!(cat.identify(&a, 5).unwrap(), Identification::Unique("Z(p^2) x Z(p)".into()));
    let x = cat.auxiliary_group("X").unwrap();
    assert_eq!(cat.identify(&fingerprint(&x), 3).unwrap(), Identification::Unique("X".into()));
    // parameterised families share fingerprints and must not be silently resolved
    let g = cat.group("Phi10(2111)a_1", 5).unwrap();
    assert!(matches!(cat.identify(&fingerprint(&g), 5).unwrap(), Identification::Ambiguous(_)));
}

#[test]
fn catalog_directory_override() {
    let dir = std::env::temp_dir().join(format!("pgx-cat-{}", std::process::id()));
    let fam = dir.join("families");
    std::fs::create_dir_all(&fam).unwrap();
    std::fs::write(
        fam.join("h.fam"),
        "family: H\nisoclinism: 2\norder: p^3\nconstraints: p >= 5\ngenerators: a, b, c\nrelations:\n  [b,a] = c\n  a^p = 1\n  b^p = 1\n  c^p = 1\n",
    )
    .unwrap();
    let cat = Catalog::from_dir(&dir).unwrap();
    assert_eq!(cat.families().len(), 1);
    assert_eq!(cat.list(3, 7).unwrap().len(), 1);
    assert!(cat.expected("table1").is_some());
    std::fs::write(fam.join("bad.fam"), "family: B\n").unwrap();
    assert!(Catalog::from_dir(&dir).is_err());
    std::fs::remove_dir_all(&dir).unwrap();
}
