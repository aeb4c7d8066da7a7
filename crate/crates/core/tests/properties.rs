use entangle_core::cubic::{CubicLattice, CubicSolver, RegionMask};
use entangle_core::radial::RadialModel;
use entangle_core::{
    entanglement_entropy, mode_entropy, omega_from_coupling, CouplingMatrix, GroundState,
    PartitionMask, Tolerances,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn tol() -> Tolerances {
    Tolerances::default()
}

/// Random symmetric positive-definite matrix `MᵀM + δ·1`.
fn spd(n: usize) -> impl Strategy<Value = CouplingMatrix> {
    (proptest::collection::vec(-1.0f64..1.0, n * n), 0.05f64..2.0).prop_map(move |(v, d)| {
        let m = DMatrix::from_vec(n, n, v);
        let k = m.transpose() * &m + DMatrix::identity(n, n) * d;
        CouplingMatrix::new(k).unwrap()
    })
}

fn with_mask(n: usize) -> impl Strategy<Value = (CouplingMatrix, PartitionMask)> {
    (spd(n), proptest::collection::vec(any::<bool>(), n))
        .prop_filter("non-degenerate", |(_, t)| {
            t.iter().any(|&b| b) && !t.iter().all(|&b| b)
        })
        .prop_map(|(k, t)| (k, PartitionMask::new(t)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn complement_symmetry((k, mask) in (2usize..9).prop_flat_map(with_mask)) {
        let a = entanglement_entropy(&k, &mask, &tol()).unwrap().value;
        let b = entanglement_entropy(&k, &mask.complement(), &tol()).unwrap().value;
        prop_assert!(a >= 0.0);
        prop_assert!((a - b).abs() < 1e-8 * a.max(1.0), "{} vs {}", a, b);
    }

    #[test]
    fn permutation_invariance(
        (k, mask) in (2usize..9).prop_flat_map(with_mask),
        seed in any::<u64>(),
    ) {
        let n = k.dim();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            let j = (s % (i as u64 + 1)) as usize;
            s /= i as u64 + 1;
            perm.swap(i, j);
        }
        let a = entanglement_entropy(&k, &mask, &tol()).unwrap().value;
        let b = entanglement_entropy(&k.permuted(&perm), &mask.permuted(&perm), &tol())
            .unwrap()
            .value;
        prop_assert!((a - b).abs() < 1e-9 * a.max(1.0));
    }

    #[test]
    fn scale_covariance((k, mask) in (2usize..9).prop_flat_map(with_mask), c in 0.1f64..10.0) {
        let a = entanglement_entropy(&k, &mask, &tol()).unwrap().value;
        let b = entanglement_entropy(&k.scaled(c * c), &mask, &tol()).unwrap().value;
        prop_assert!((a - b).abs() < 1e-9 * a.max(1.0));
    }

    #[test]
    fn omega_squares_to_coupling(k in (1usize..12).prop_flat_map(spd)) {
        let w = omega_from_coupling(&k, &tol()).unwrap();
        let err = (w.matrix() * w.matrix() - k.matrix()).norm() / k.matrix().norm();
        prop_assert!(err < 1e-10);
        prop_assert!(w.matrix().clone().symmetric_eigen().eigenvalues.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn mode_entropy_is_monotone(a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(mode_entropy(lo) <= mode_entropy(hi));
        prop_assert!(mode_entropy(lo) >= 0.0);
    }

    #[test]
    fn ground_state_routes_agree((k, mask) in (2usize..9).prop_flat_map(with_mask)) {
        let gs = GroundState::new(&k, &tol()).unwrap();
        let a = gs.entropy_direct(&mask).unwrap().value;
        let b = gs.entropy(&mask).unwrap().value;
        prop_assert!((a - b).abs() < 1e-8 * a.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn cubic_complement_symmetry(bits in proptest::collection::vec(any::<bool>(), 64)) {
        prop_assume!(bits.iter().any(|&b| b) && !bits.iter().all(|&b| b));
        let lat = CubicLattice::new([4, 4, 4]).unwrap();
        let mask = RegionMask::from_fn(&lat, |c| bits[lat.index(c)]);
        let solver = CubicSolver::new(tol());
        let a = solver.region_entropy_direct(&lat, &mask).unwrap().value;
        let b = solver.region_entropy_direct(&lat, &mask.complement()).unwrap().value;
        prop_assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn radial_reversal_invariance(l in 0usize..30, n in 1usize..29) {
        // Reversing the site order of the chain relabels the oscillators only.
        for model in [RadialModel::flat(30).unwrap(), RadialModel::einstein(30).unwrap()] {
            let k = model.coupling(l).unwrap();
            let mask = model.partition(n).unwrap();
            let rev: Vec<usize> = (0..30).rev().collect();
            let a = entanglement_entropy(&k, &mask, &tol()).unwrap().value;
            let b = entanglement_entropy(&k.permuted(&rev), &mask.permuted(&rev), &tol())
                .unwrap()
                .value;
            prop_assert!((a - b).abs() < 1e-9 * a.max(1e-3));
        }
    }
}
