use planar_qldpc::fractal::{fractal_upper_bound_family, DEFAULT_MAX_LEVEL};
use planar_qldpc::lattice::find_family;
use planar_qldpc::{BitVec, Pauli};
use planar_qldpc::code::LogicalClass;
use planar_qldpc::lattice::{build_from_polys, BuildOptions, LatticeSpec, MaskRule};
use planar_qldpc::FamilyPoly;

#[test]
fn fractal_bounds_on_288_family() {
    let fam = find_family("k8-288").unwrap();
    for (l, want) in [(6, 4), (8, 6), (10, 9), (12, 12), (14, 15)] {
        let b = fractal_upper_bound_family(&fam, l, l, DEFAULT_MAX_LEVEL).unwrap();
        eprintln!("L={l}: weight {} level {} offset {:?}", b.weight, b.operator.level, b.offset);
        assert_eq!(b.weight, want, "L={l}");
        assert_eq!(b.support.weight(), want);
    }
}

#[test]
fn toric_string_has_length_l() {
    let polys = FamilyPoly::parse("toric", "1+x", "1+y").unwrap();
    for l in [3usize, 5, 7] {
        let spec = LatticeSpec::new(l, l, MaskRule::full()).unwrap();
        let lc = build_from_polys(&polys, spec, &BuildOptions::default()).unwrap();
        let b = planar_qldpc::fractal::fractal_upper_bound(&lc, 4).unwrap();
        assert_eq!(b.weight, l);
        let v: BitVec = b.support.clone();
        assert_eq!(lc.code.classify_pure(Pauli::X, &v).unwrap(), LogicalClass::LogicalX);
    }
}
