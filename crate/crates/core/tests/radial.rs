use entangle_core::radial::{
    ir_proximity_sweep, partial_wave_entropy, radial_sweep, sum_partial_waves, LSumPolicy,
    RadialModel,
};
use entangle_core::Tolerances;

fn tol() -> Tolerances {
    Tolerances::default()
}

#[test]
fn default_cutoff_survives_doubling() {
    let model = RadialModel::flat(60).unwrap();
    let policy = LSumPolicy::default();
    for n in [10, 30, 50] {
        let base = sum_partial_waves(&model, n, &policy, &tol()).unwrap();
        let l_cut = base.series.l_max();
        let doubled = sum_partial_waves(&model, n, &policy.with_l_cut(2 * l_cut), &tol()).unwrap();
        let rel = (base.value() - doubled.value()).abs() / doubled.value();
        assert!(rel < 5e-3, "n={n}: {rel}");
    }
}

// The reduced blocks at high l span hundreds of decades. Every term must stay
// finite and mirror its reflected boundary.
#[test]
fn high_partial_waves_stay_finite_on_the_sphere() {
    let model = RadialModel::einstein(99).unwrap();
    for l in [250, 300, 368] {
        for n in [40, 56, 60, 71] {
            let s = partial_wave_entropy(&model, l, n, &tol()).unwrap();
            let mirror = partial_wave_entropy(&model, l, 99 - n, &tol()).unwrap();
            assert!(s.is_finite() && s > 0.0, "l={l} n={n}: {s}");
            assert!(
                (s - mirror).abs() <= 1e-9 * s,
                "l={l} n={n}: {s} vs {mirror}"
            );
        }
    }
}

#[test]
fn truncated_sums_grow_and_saturate() {
    let model = RadialModel::flat(30).unwrap();
    let full =
        sum_partial_waves(&model, 10, &LSumPolicy::default().with_l_cut(600), &tol()).unwrap();
    let mut partial = 0.0;
    let mut last = 0.0;
    for (l, s) in full.series.terms.iter().enumerate() {
        partial += (2 * l + 1) as f64 * s;
        assert!(partial >= last);
        last = partial;
    }
    let head = full.series.terms[..=300]
        .iter()
        .enumerate()
        .map(|(l, s)| (2 * l + 1) as f64 * s)
        .sum::<f64>();
    assert!((last - head) / last < 0.01);
}

#[test]
fn einstein_small_spheres_match_flat_space() {
    let policy = LSumPolicy::default();
    let ns: Vec<usize> = (1..=5).collect();
    let e = radial_sweep(&RadialModel::einstein(99).unwrap(), &ns, &policy, &tol()).unwrap();
    let f = radial_sweep(&RadialModel::flat(99).unwrap(), &ns, &policy, &tol()).unwrap();
    for (a, b) in e.iter().zip(&f) {
        let rel = a.value() / b.value() - 1.0;
        assert!(rel.abs() < 0.02, "n={}: {rel}", a.sphere.boundary);
    }
}

#[test]
fn tracing_nothing_or_everything() {
    let model = RadialModel::flat(12).unwrap();
    let sweep = radial_sweep(&model, &[0, 12], &LSumPolicy::default(), &tol()).unwrap();
    assert!(sweep.iter().all(|e| e.value() == 0.0 && e.tail.is_none()));
}

#[test]
fn outer_wall_pulls_entropy_down_at_contact() {
    let r = ir_proximity_sweep(8, &[30, 12, 9, 8], &LSumPolicy::default(), &tol()).unwrap();
    let far = r[0].1;
    assert!((r[1].1 / far - 1.0).abs() < 0.02);
    assert!(r[2].1 < r[1].1);
    assert_eq!(r[3].1, 0.0);
}

#[test]
fn sweep_metadata() {
    let model = RadialModel::flat(20).unwrap();
    let e = sum_partial_waves(&model, 5, &LSumPolicy::default(), &tol()).unwrap();
    let meta = &e.entropy.metadata;
    assert_eq!(meta["model"], "flat");
    assert_eq!(meta["l_cut"], "105");
    let frac: f64 = meta["tail_fraction"].parse().unwrap();
    assert!(frac > 0.0 && frac < 0.2);
    assert_eq!(frac, e.tail_fraction());
}
