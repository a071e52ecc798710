use std::time::Instant;

use planar_qldpc::code::{Certainty, Pauli};
use planar_qldpc::distance::{distance, distance_exact, distance_isd, verify_certificate, DistancePolicy};
use planar_qldpc::lattice::{build_open_code, find_family, BuildOptions};

fn build(name: &str, lx: usize, ly: usize) -> planar_qldpc::CssCode {
    build_open_code(&find_family(name).unwrap(), lx, ly, &BuildOptions::default()).unwrap().code
}

#[test]
fn exact_small_golden() {
    for (name, lx, ly, n, d) in [("k6-88", 6, 8, 88, 6), ("k8-288", 8, 8, 128, 6), ("k8-188", 6, 10, 105, 6)] {
        let code = build(name, lx, ly);
        assert_eq!(code.n(), n);
        let t = Instant::now();
        let rep = distance(&code, &DistancePolicy::exact(d + 2)).unwrap();
        eprintln!("{name} {lx}x{ly}: {} in {:?}", rep.params, t.elapsed());
        assert_eq!(rep.params.d, d);
        assert_eq!(rep.params.certainty, Certainty::Exact);
        assert!(verify_certificate(&code, rep.certificate().unwrap()));
    }
}

#[test]
fn isd_agrees_with_exact_on_small_codes() {
    for (name, lx, ly) in [("k8-288", 5, 5), ("k8-288", 6, 6), ("k6-88", 5, 6), ("k8-188", 5, 6)] {
        let code = build(name, lx, ly);
        for side in [Pauli::X, Pauli::Z] {
            let e = distance_exact(&code, side, 20, u64::MAX).unwrap();
            let i = distance_isd(&code, side, 5000, 3).unwrap();
            assert_eq!(e.value, i.value, "{name} {lx}x{ly} {side} n={}", code.n());
        }
    }
}
