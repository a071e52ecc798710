use planar_qldpc::lattice::{build_open_code, derive_mask, family_registry, BuildOptions};
use planar_qldpc::poly::{quotient_dimension, QuotientDim};

const SIZES: &[(&str, &[(usize, usize)])] = &[
    ("k6-88", &[(6, 8), (9, 9)]),
    ("k7-131", &[(7, 11), (9, 9)]),
    ("k8-188", &[(8, 13), (6, 10)]),
    ("k8-288", &[(12, 12), (10, 10)]),
    ("k9-441", &[(11, 21), (9, 10)]),
    ("k10-403", &[(16, 13), (10, 10)]),
    ("k11-435", &[(15, 16), (10, 11)]),
    ("k12-432", &[(12, 18), (10, 11)]),
    ("k13-392", &[(15, 14), (8, 7)]),
];

#[test]
fn registry_builds_match_formula_and_quotient() {
    let opts = BuildOptions::default();
    let registry = family_registry();
    assert_eq!(registry.len(), 9);
    for fam in &registry {
        let q = quotient_dimension(&fam.polys.f, &fam.polys.g).unwrap();
        assert_eq!(q, QuotientDim::Finite(fam.expected_k), "{}", fam.name());
        let sizes = SIZES.iter().find(|(n, _)| *n == fam.name()).unwrap().1;
        for &(lx, ly) in sizes {
            let c = build_open_code(fam, lx, ly, &opts).unwrap_or_else(|e| panic!("{} {lx}x{ly}: {e}", fam.name()));
            assert!(c.code.commutes());
            assert_eq!(c.code.n() as i64, fam.n_formula.eval(lx, ly), "{} {lx}x{ly}", fam.name());
            assert_eq!(c.code.logical_dim(), fam.expected_k);
            assert!(c.code.max_check_weight() <= 6);
        }
    }
}

#[test]
fn derived_masks_reproduce_registry() {
    for fam in family_registry() {
        let m = derive_mask(&fam.polys, 14, 14, &BuildOptions::default()).unwrap();
        assert_eq!(m, fam.mask, "{}", fam.name());
    }
}

#[test]
fn torus_217_has_sixteen_logicals() {
    let fam = planar_qldpc::lattice::find_family("k8-288").unwrap();
    let k = planar_qldpc::poly::torus_dimension_groebner(&fam.polys.f, &fam.polys.g, 217, 217).unwrap();
    assert_eq!(k, 16);
}
