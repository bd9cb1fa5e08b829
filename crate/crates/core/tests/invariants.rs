use std::f64::consts::PI;

use blaschke_core::conditions::{
    blaschke_functional, check_o_condition, estimate_c_prime, make_test_function, TestKind, Verdict,
};
use blaschke_core::expr::{parse_function, LogModulus, ScalarField};
use blaschke_core::potential::{circular_mean, green_domain, hahn_jordan_split, integrate_measure, CellGrid, MeasureEstimate};
use blaschke_core::zeros::{winding_number, zero_counting_measure, Contour, ZeroEntry, ZeroSequence};
use blaschke_core::{Complex, ComplexPoint, DomainSpec, FunctionSpec, Moebius};
use proptest::prelude::*;

fn polar() -> impl Strategy<Value = Complex> {
    (0.0f64..0.97, 0.0..2.0 * PI).prop_map(|(r, t)| Complex::from_polar(r, t))
}

fn cplx(range: f64) -> impl Strategy<Value = Complex> {
    (-range..range, -range..range).prop_map(|(a, b)| Complex::new(a, b))
}

fn shell() -> DomainSpec {
    DomainSpec::unit_disk().with_inner(DomainSpec::disk(Complex::new(0.0, 0.0), 0.5).unwrap()).unwrap()
}

fn sequence(zs: &[Complex]) -> ZeroSequence {
    let entries = zs.iter().map(|&z| ZeroEntry { location: z, multiplicity: 1, refinement_error: 0.0 }).collect();
    ZeroSequence::new(entries, DomainSpec::unit_disk()).unwrap()
}

fn blaschke(zs: &[Complex]) -> FunctionSpec {
    FunctionSpec::blaschke_from_zeros(zs.iter().map(|&z| (z, 1))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn green_is_symmetric_and_positive(z in polar(), w in polar()) {
        prop_assume!((z - w).norm() > 1e-6);
        let d = DomainSpec::unit_disk();
        let g = |a, b| green_domain(&d, ComplexPoint::Finite(a), ComplexPoint::Finite(b)).unwrap();
        prop_assert!((g(z, w) - g(w, z)).abs() < 1e-10);
        prop_assert!(g(z, w) > 0.0);
    }

    #[test]
    fn green_is_moebius_invariant(z in polar(), w in polar(), a in polar()) {
        prop_assume!((z - w).norm() > 1e-6);
        // T(ζ) = (ζ − a)/(1 − ā ζ) maps 𝔻 onto itself
        let t = Moebius::new(Complex::new(1.0, 0.0), -a, -a.conj(), Complex::new(1.0, 0.0)).unwrap();
        let d = DomainSpec::unit_disk();
        let g = |p, q| green_domain(&d, ComplexPoint::Finite(p), ComplexPoint::Finite(q)).unwrap();
        let (tz, tw) = (t.apply_finite(z).finite().unwrap(), t.apply_finite(w).finite().unwrap());
        prop_assert!((g(z, w) - g(tz, tw)).abs() < 1e-9 * (1.0 + g(z, w)));
    }

    #[test]
    fn moebius_inverse_round_trip(a in cplx(2.0), b in cplx(2.0), c in cplx(2.0), z in cplx(3.0)) {
        let Ok(t) = Moebius::new(a, b, c, Complex::new(1.0, 0.0)) else { return Ok(()) };
        prop_assume!((c * z + 1.0).norm() > 1e-3);
        let back = t.inverse().apply(t.apply_finite(z));
        if let ComplexPoint::Finite(w) = back {
            prop_assert!((w - z).norm() < 1e-8 * (1.0 + z.norm()));
        }
    }

    #[test]
    fn jensen(zs in prop::collection::vec(polar(), 1..8), r in 0.05f64..0.99) {
        prop_assume!(zs.iter().all(|a| (a.norm() - r).abs() > 1e-3 && a.norm() > 1e-3));
        let b = blaschke(&zs);
        let mean = circular_mean(&LogModulus(&b), Complex::new(0.0, 0.0), r, 2048).unwrap();
        let at0 = b.log_modulus(Complex::new(0.0, 0.0)).unwrap().to_f64();
        let jensen = at0 + zs.iter().filter(|a| a.norm() < r).map(|a| (r / a.norm()).ln()).sum::<f64>();
        prop_assert!((mean - jensen).abs() < 1e-6, "{mean} vs {jensen}");
    }

    #[test]
    fn sub_mean_value(zs in prop::collection::vec(polar(), 1..6), z in polar(), frac in 0.05f64..0.95) {
        let b = blaschke(&zs);
        let r = frac * (1.0 - z.norm());
        prop_assume!(zs.iter().all(|a| ((a - z).norm() - r).abs() > 1e-4));
        let mean = circular_mean(&LogModulus(&b), z, r, 2048).unwrap();
        prop_assert!(LogModulus(&b).value(z).unwrap().to_f64() <= mean + 1e-9);
    }

    #[test]
    fn winding_counts_zeros(zs in prop::collection::vec(polar(), 1..6), rho in 0.2f64..0.95) {
        prop_assume!(zs.iter().all(|a| (a.norm() - rho).abs() > 1e-2));
        let b = blaschke(&zs);
        let n = winding_number(&b, &Contour::circle(Complex::new(0.0, 0.0), rho, 512).unwrap(), 1e-12).unwrap();
        prop_assert_eq!(n as usize, zs.iter().filter(|a| a.norm() < rho).count());
    }

    #[test]
    fn hahn_jordan_round_trip(masses in prop::collection::vec(-5.0f64..5.0, 1..64), atoms in prop::collection::vec((cplx(1.0), -3.0f64..3.0), 0..5)) {
        let n = masses.len();
        let grid = CellGrid { origin: Complex::new(-0.5, -0.5), h: 0.1, nx: n, ny: 1, mass: masses };
        let nu = MeasureEstimate::from_cells(grid).add(&MeasureEstimate::from_atoms(atoms)).unwrap();
        let split = hahn_jordan_split(&nu);
        prop_assert!(split.positive.carriers().chain(split.negative.carriers()).all(|(_, m)| m >= 0.0));
        prop_assert_eq!(split.recombine(), nu.clone());
        prop_assert!((split.positive.total_mass() + split.negative.total_mass() - nu.total_variation()).abs() < 1e-12);
    }

    #[test]
    fn functionals_are_positively_homogeneous(zs in prop::collection::vec(polar(), 1..8), a in 0.01f64..100.0) {
        let v = make_test_function(TestKind::LogInverse, shell()).unwrap();
        let z = sequence(&zs);
        let nu = zero_counting_measure(&z);
        let half = zero_counting_measure(&sequence(&zs[..zs.len() / 2]));
        let in_shell = |w: Complex| v.domain.in_shell(w);
        let va = v.scaled(a);
        let close = |x: f64, y: f64| (x - a * y).abs() <= 1e-12 * (a * y).abs().max(1e-300);
        prop_assert!(close(blaschke_functional(&va, &z).unwrap().total(), blaschke_functional(&v, &z).unwrap().total()));
        prop_assert!(close(integrate_measure(&va, &nu, in_shell).unwrap(), integrate_measure(&v, &nu, in_shell).unwrap()));
        let cp = |w: &blaschke_core::conditions::TestFunction| estimate_c_prime(&nu, &half, std::slice::from_ref(w)).unwrap().value;
        prop_assert!(close(cp(&va), cp(&v)));
    }

    #[test]
    fn canonical_order_ignores_input_order(zs in prop::collection::vec(polar(), 1..10), seed in any::<u64>()) {
        let mut shuffled = zs.clone();
        let k = (seed as usize) % shuffled.len();
        shuffled.rotate_left(k);
        shuffled.reverse();
        prop_assert_eq!(sequence(&zs), sequence(&shuffled));
        let d: Vec<f64> = sequence(&zs).entries.iter().map(|e| 1.0 - e.location.norm()).collect();
        prop_assert!(d.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn test_functions_are_nonnegative_and_vanish_outside(z in cplx(1.5), q in 2.0f64..6.0) {
        let d = DomainSpec::unit_disk().with_inner(DomainSpec::disk(Complex::new(0.0, 0.0), 0.9).unwrap()).unwrap();
        for kind in [TestKind::LogInverse, TestKind::BoundaryPower(q), TestKind::GreenPole(Complex::new(0.1, -0.2))] {
            let v = make_test_function(kind, d.clone()).unwrap();
            if let Ok(x) = v.value(z) {
                prop_assert!(x.to_f64() >= 0.0);
                if !d.contains(z) {
                    prop_assert_eq!(x.to_f64(), 0.0);
                }
            }
        }
    }
}

#[test]
fn every_validated_test_function_satisfies_o() {
    let d = shell();
    let custom = TestKind::Custom(parse_function("0.25*logabs(z)^2").unwrap());
    for kind in [TestKind::LogInverse, TestKind::GreenPole(Complex::new(0.2, 0.1)), custom] {
        let v = make_test_function(kind, d.clone()).unwrap();
        assert_eq!(check_o_condition(&v, &[1.0, 0.1, 0.01, 1e-4]).unwrap().verdict, Verdict::Holds);
    }
    let d = DomainSpec::unit_disk().with_inner(DomainSpec::disk(Complex::new(0.0, 0.0), 0.8).unwrap()).unwrap();
    let v = make_test_function(TestKind::BoundaryPower(2.0), d).unwrap();
    assert_eq!(check_o_condition(&v, &[1.0, 0.1, 0.01]).unwrap().verdict, Verdict::Holds);
}
