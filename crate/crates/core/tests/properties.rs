//! Randomized invariants.

use std::f64::consts::PI;
use std::path::PathBuf;

use fracdiff::elliptic::{assemble_operator, eigendecompose};
use fracdiff::forward::SpectralSolver;
use fracdiff::harness::{run_regularity_sweep, ExperimentConfig, GFamily};
use fracdiff::norms::{hrs_norm_q, spectral_power_norm, RegularityIndex};
use fracdiff::special::{mittag_leffler, MlParams};
use fracdiff::{Coefficients, SpaceTimeField, SpatialGrid, TimeGrid};
use proptest::prelude::*;

fn solver(alpha: f64) -> (SpectralSolver, fracdiff::elliptic::DiscreteOperator) {
    let s = SpatialGrid::new(PI, 32).unwrap();
    let c = Coefficients::variable1(&s);
    let op = assemble_operator(&c, &s).unwrap();
    let b = eigendecompose(&op, &c, 8).unwrap();
    let t = TimeGrid::new(1.0, 32).unwrap();
    (SpectralSolver::new(alpha, b, t).unwrap(), op)
}

fn field(s: SpatialGrid, t: TimeGrid, a: [f64; 3]) -> SpaceTimeField {
    SpaceTimeField::from_fn(s, t, move |x, t| a[0] * x.sin() * t + a[1] * (2.0 * x).sin() + a[2] * x * (PI - x) * t * t)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn mittag_leffler_is_a_positive_bounded_decay(alpha in 0.1f64..0.95, z in -40.0f64..0.0) {
        let e1 = mittag_leffler(MlParams::new(alpha, 1.0).unwrap(), z).unwrap();
        let ea = mittag_leffler(MlParams::new(alpha, alpha).unwrap(), z).unwrap();
        prop_assert!(e1 > 0.0 && e1 <= 1.0);
        prop_assert!(ea > 0.0);
    }

    #[test]
    fn operator_is_symmetric(u in prop::collection::vec(-1.0f64..1.0, 31), w in prop::collection::vec(-1.0f64..1.0, 31)) {
        let s = SpatialGrid::new(2.0, 32).unwrap();
        let c = Coefficients::variable1(&s);
        let op = assemble_operator(&c, &s).unwrap();
        let pad = |v: &[f64]| { let mut f = vec![0.0]; f.extend_from_slice(v); f.push(0.0); f };
        let (u, w) = (pad(&u), pad(&w));
        let lhs = s.dot(&op.apply(&u), &w);
        let rhs = s.dot(&u, &op.apply(&w));
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (lhs.abs() + rhs.abs() + 1.0));
    }

    #[test]
    fn forward_solver_is_linear(alpha in 0.1f64..0.9, a in prop::array::uniform3(-2.0f64..2.0),
                                b in prop::array::uniform3(-2.0f64..2.0), p in -3.0f64..3.0, q in -3.0f64..3.0) {
        let (sv, _) = solver(alpha);
        let (sg, tg) = (sv.sgrid(), sv.tgrid());
        let (f1, f2) = (field(sg, tg, a), field(sg, tg, b));
        let combo = f1.scaled(p).add(&f2.scaled(q)).unwrap();
        let lhs = sv.solve_forward(&combo).unwrap().field;
        let rhs = sv.solve_forward(&f1).unwrap().field.scaled(p)
            .add(&sv.solve_forward(&f2).unwrap().field.scaled(q)).unwrap();
        let scale = lhs.l2_norm().max(rhs.l2_norm()).max(1e-300);
        prop_assert!(lhs.sub(&rhs).unwrap().l2_norm() <= 1e-12 * scale);
        let first = lhs.values().column(0).iter().all(|v| *v == 0.0);
        let m = sg.cells();
        let edges = (0..tg.len()).all(|n| lhs.values()[[0, n]] == 0.0 && lhs.values()[[m, n]] == 0.0);
        prop_assert!(first && edges);
    }

    #[test]
    fn spectral_interpolation_inequality(c in prop::collection::vec(-1.0f64..1.0, 8)) {
        let (sv, _) = solver(0.5);
        let b = sv.basis();
        let u = b.synthesize(&c);
        let n0 = spectral_power_norm(&u, b, 0.0).unwrap();
        let n1 = spectral_power_norm(&u, b, 1.0).unwrap();
        let nq = spectral_power_norm(&u, b, 0.25).unwrap();
        prop_assert!(nq <= n0.powf(0.75) * n1.powf(0.25) * (1.0 + 1e-10));
    }

    #[test]
    fn mixed_norm_is_monotone_in_each_index(a in prop::array::uniform3(-2.0f64..2.0), r in 0.0f64..0.8, s in 0.0f64..0.8,
                                            dr in 0.0f64..0.19, ds in 0.0f64..0.19) {
        let sg = SpatialGrid::new(1.0, 24).unwrap();
        let tg = TimeGrid::new(1.0, 24).unwrap();
        let u = field(sg, tg, a);
        let at = |r: f64, s: f64| hrs_norm_q(&u, RegularityIndex::new(r, s).unwrap()).unwrap();
        let base = at(r, s);
        prop_assert!(at(r + dr, s) >= base * (1.0 - 1e-10));
        prop_assert!(at(r, s + ds) >= base * (1.0 - 1e-10));
    }

    #[test]
    fn config_round_trips(alphas in prop::collection::vec(0.01f64..0.99, 1..4), horizon in 0.1f64..10.0,
                          m in prop::collection::vec(16usize..1024, 1..4), k in 1usize..4,
                          fam in 0usize..3, ensemble in 1usize..50, seed in any::<u64>()) {
        let cfg = ExperimentConfig {
            alphas,
            horizon,
            n: m.clone(),
            m,
            k: vec![k],
            p: vec![k],
            g_family: [GFamily::Noise, GFamily::Step, GFamily::Smooth][fam],
            ensemble,
            seed,
            out: PathBuf::from("runs/a"),
            ..ExperimentConfig::default()
        };
        let parsed = ExperimentConfig::parse(&cfg.serialize()).unwrap();
        prop_assert_eq!(&parsed, &cfg);
        prop_assert_eq!(ExperimentConfig::parse(&parsed.serialize()).unwrap(), parsed);
    }
}

#[test]
fn sweep_csv_is_deterministic() {
    let cfg = ExperimentConfig {
        alphas: vec![0.4],
        m: vec![32, 64],
        n: vec![32, 64],
        k: vec![8],
        p: vec![8],
        g_family: GFamily::Noise,
        ensemble: 3,
        seed: 5,
        ..ExperimentConfig::default()
    };
    let a = run_regularity_sweep(&cfg).to_csv(false);
    let b = run_regularity_sweep(&cfg).to_csv(false);
    assert_eq!(a, b);
    assert!(a.starts_with("# schema=1"));
}
