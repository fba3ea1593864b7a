use num_complex::Complex64;
use proptest::prelude::*;
use qpersist::operators::persistent_laplacian;
use qpersist::prelude::*;
use qpersist::qsim::{analytic_distribution, Register};
use qpersist::spectral::symmetric_eigenvalues;

fn cloud(max_n: usize) -> impl Strategy<Value = FiltrationContext> {
    (2..=max_n)
        .prop_flat_map(|n| prop::collection::vec(prop::collection::vec(0.0f64..1.0, 2), n))
        .prop_map(|pts| FiltrationContext::new(PointCloud::new(pts).unwrap()))
}

/// A cloud with two scale fractions `0 <= s <= t <= 1` of its diameter.
fn setup(max_n: usize) -> impl Strategy<Value = (FiltrationContext, f64, f64)> {
    (cloud(max_n), 0.0f64..1.0, 0.0f64..1.0).prop_map(|(c, s, t)| {
        let d = c.dmat().diameter();
        let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
        (c, lo * d, hi * d)
    })
}

fn variant() -> impl Strategy<Value = Variant> {
    prop_oneof![Just(Variant::Projected), Just(Variant::ChainRestricted)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn boundary_squares_to_zero((c, eps, _) in setup(7), k in 0isize..3) {
        let lo = enumerate_basis(k, eps, &c);
        let mid = enumerate_basis(k + 1, eps, &c);
        let hi = enumerate_basis(k + 2, eps, &c);
        let d1 = boundary(k + 1, &lo, &mid).unwrap().to_rational().unwrap();
        let d2 = boundary(k + 2, &mid, &hi).unwrap().to_rational().unwrap();
        prop_assert!(d1.mul(&d2).is_zero());
    }

    #[test]
    fn laplacian_is_psd((c, a, b) in setup(7), k in 0isize..3, v in variant()) {
        let lap = persistent_laplacian(k, a, b, &c, v).unwrap();
        for e in symmetric_eigenvalues(&lap.to_dense()).unwrap() {
            prop_assert!(e >= -1e-10, "{e}");
        }
    }

    #[test]
    fn chain_kernel_matches_oracle((c, a, b) in setup(7), k in 0isize..4) {
        let lap = persistent_laplacian(k, a, b, &c, Variant::ChainRestricted).unwrap();
        let kernel = kernel_dimension(&lap, KernelMode::default()).unwrap();
        prop_assert_eq!(kernel, betti_homology_oracle(k, a, b, &c).unwrap());
    }

    #[test]
    fn dirac_square_and_kernel(
        (c, a, b) in setup(6),
        k in 0isize..3,
        v in variant(),
        xi in 0.25f64..2.0,
        drop in any::<bool>(),
    ) {
        let dirac = persistent_dirac(k, a, b, xi, &c, v, drop).unwrap();
        let lap = persistent_laplacian(k, a, b, &c, v).unwrap();
        let m = dirac.to_dense();
        prop_assert_eq!(&m, &m.transpose());
        prop_assert!(dirac_square_check(&dirac, &lap, 1e-10).unwrap());
        let plus = symmetric_eigenvalues(&m).unwrap().iter().filter(|e| (*e - xi).abs() < 1e-6).count();
        prop_assert_eq!(plus, kernel_dimension(&lap, KernelMode::default()).unwrap());
    }

    #[test]
    fn flipped_middle_sign_breaks_the_square((c, a, b) in setup(6), k in 0isize..2) {
        let dirac = persistent_dirac(k, a, b, 1.0, &c, Variant::Projected, false).unwrap();
        let lap = persistent_laplacian(k, a, b, &c, Variant::Projected).unwrap();
        let coupled = dirac.lower_boundary().nnz() + dirac.upper_boundary().nnz() > 0;
        let flipped = dirac.with_flipped_middle_sign().to_dense();
        let ok = qpersist::operators::square_check_dense(&flipped, dirac.middle_range(), 1.0, &lap, 1e-10).unwrap();
        prop_assert_eq!(ok, !coupled);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn phase_distribution_is_normalized_and_closed_form(
        (c, a, b) in setup(5),
        k in 0isize..2,
        l in 1usize..5,
        log_m in 2u32..6,
    ) {
        let dirac = persistent_dirac(k, a, b, 1.0, &c, Variant::Projected, true).unwrap();
        prop_assume!(dirac.dim() > 0);
        let m = 1usize << log_m;
        let dist = phase_estimation(&dirac, l, m, Evolution::Exact).unwrap();
        prop_assert!((dist.total() - 1.0).abs() < 1e-9);
        let closed = analytic_distribution(&symmetric_eigenvalues(&dirac.to_dense()).unwrap(), l, m);
        for (x, y) in dist.probs.iter().zip(&closed) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn grover_reaches_closed_form(
        amps in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 64),
        marked in prop::collection::vec(any::<bool>(), 64),
        forced in 0usize..64,
    ) {
        let amps: Vec<Complex64> = amps.into_iter().map(|(r, i)| Complex64::new(r, i)).collect();
        prop_assume!(amps[forced].norm() > 1e-3);
        let mut psi = StateVector::from_amplitudes(vec![Register::new("s", 6)], amps).unwrap();
        psi.normalize();
        let oracle = |i: usize| i == forced || marked[i];
        let theta = psi.projected_norm(oracle).min(1.0).asin();
        let (out, k) = grover_project(&psi, oracle).unwrap();
        let want = ((2 * k + 1) as f64 * theta).sin().abs();
        prop_assert!((out.projected_norm(oracle) - want).abs() < 1e-12);
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sampling_is_seeded(seed in any::<u64>(), shots in 1usize..500) {
        let ctx = FiltrationContext::new(two_squares());
        let dirac = persistent_dirac(1, 1.2, 1.2, 1.0, &ctx, Variant::Projected, true).unwrap();
        let dist = phase_estimation(&dirac, 3, 16, Evolution::Exact).unwrap();
        let a = sample_counts(&dist, shots, seed).unwrap();
        prop_assert_eq!(a.iter().sum::<u64>() as usize, shots);
        prop_assert_eq!(a, sample_counts(&dist, shots, seed).unwrap());
    }
}
