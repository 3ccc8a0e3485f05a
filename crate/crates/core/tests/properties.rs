use binmpec::adm::{adm_v_update, solve_rank_one_ball_qp, RankOneQp};
use binmpec::epm::epm_v_update;
use binmpec::linalg::{dot, norm2};
use binmpec::problems::{build_bisection, build_dense_subgraph, generate, GraphKind};
use binmpec::projections::project_capped_simplex;
use binmpec::reformulations::{h_ratio, membership, round_feasible};
use binmpec::{brute_force, solve_adm, solve_epm, AdmConfig, EpmConfig, FeasibleSet, MpecVariant};
use proptest::prelude::*;

fn vec_in(n: std::ops::Range<usize>, lo: f64, hi: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(lo..hi, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn capped_simplex_is_feasible_and_idempotent(a in vec_in(1..30, -3.0, 3.0), frac in 0.0..1.0f64) {
        let k = frac * a.len() as f64;
        let x = project_capped_simplex(&a, k).unwrap();
        prop_assert!(x.iter().all(|&v| (-1e-12..=1.0 + 1e-12).contains(&v)));
        prop_assert!((x.iter().sum::<f64>() - k).abs() <= 1e-9 * (1.0 + k));
        let again = project_capped_simplex(&x, k).unwrap();
        for (p, q) in x.iter().zip(&again) {
            prop_assert!((p - q).abs() <= 1e-9);
        }
    }

    #[test]
    fn v_updates_agree_and_stay_in_ball(x in vec_in(1..20, -1.0, 1.0), rho in 0.0..50.0f64, alpha in 1e-3..1e3f64) {
        prop_assume!(norm2(&x) > 1e-6);
        let n = x.len();
        let v = epm_v_update(&x);
        prop_assert!(dot(&v, &v) <= n as f64 * (1.0 + 1e-12));
        let w = adm_v_update(&x, rho, alpha, n);
        for (a, b) in v.iter().zip(&w) {
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
        }
        // Nothing in the ball does better on ⟨x, ·⟩ than √n‖x‖.
        prop_assert!((dot(&x, &v) - (n as f64).sqrt() * norm2(&x)).abs() <= 1e-9 * n as f64);
    }

    #[test]
    fn gap_dominates_vertex_distance(x in vec_in(2..20, -1.0, 1.0)) {
        let s: Vec<f64> = x.iter().map(|&v| if v >= 0.0 { 1.0 } else { -1.0 }).collect();
        prop_assume!(s.iter().zip(&x).any(|(a, b)| (a - b).abs() > 1e-9));
        prop_assert!(h_ratio(&x).unwrap() >= 0.5 - 1e-12);
    }

    #[test]
    fn binary_points_lift_in_every_variant(bits in prop::collection::vec(any::<bool>(), 1..16)) {
        let x: Vec<f64> = bits.iter().map(|&b| if b { 1.0 } else { -1.0 }).collect();
        for variant in MpecVariant::ALL {
            prop_assert!(membership(variant, &x, &x, 1e-12));
        }
    }

    #[test]
    fn rounding_lands_in_the_set(x in vec_in(2..20, -1.0, 1.0), pin in any::<bool>()) {
        let n = x.len();
        let target = if n % 2 == 0 { 0.0 } else { 1.0 };
        let mut set = FeasibleSet::uniform(n, -1.0, 1.0).unwrap().with_sum(target).unwrap();
        if pin {
            set = set.with_pins([(0, 1.0)]).unwrap();
        }
        let r = round_feasible(&x, &set).unwrap();
        prop_assert!(r.iter().all(|&v| v == 1.0 || v == -1.0));
        prop_assert!(set.contains(&r, 1e-12));
    }

    #[test]
    fn rank_one_qp_respects_ball(
        gamma in 0.01..3.0f64,
        b in vec_in(3..4, -2.0, 2.0),
        c in vec_in(3..4, -3.0, 3.0),
        beta in 0.1..5.0f64,
    ) {
        let q = RankOneQp::new(gamma, b, c, beta).unwrap();
        let (x, theta) = solve_rank_one_ball_qp(&q, 1e-13).unwrap();
        prop_assert!(norm2(&x) <= beta * (1.0 + 1e-10));
        prop_assert!(theta >= 0.0);
        // The solution beats the center and a few feasible probes.
        let f = q.objective(&x);
        prop_assert!(f <= 1e-12);
        for probe in [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.6, 0.0, 0.8]] {
            let p: Vec<f64> = probe.iter().map(|v| v * beta).collect();
            prop_assert!(f <= q.objective(&p) + 1e-9);
        }
    }
}

#[test]
fn solvers_never_beat_the_oracle_and_stay_feasible() {
    for seed in 0..8 {
        let g = generate(&GraphKind::ErdosRenyi { n: 12, p: 0.35 }, seed).unwrap();
        for p in [build_bisection(&g).unwrap(), build_dense_subgraph(&g, 4).unwrap()] {
            let exact = brute_force(&p, 22).unwrap();
            let epm = solve_epm(&p, &EpmConfig::default(), seed).unwrap();
            let adm = solve_adm(&p, &AdmConfig::default(), seed).unwrap();
            for r in [epm, adm] {
                assert!(r.feasible);
                assert!(p.set().contains(&r.x_binary, 1e-9));
                assert!(r.objective_binary >= exact.f - 1e-9 * (1.0 + exact.f.abs()));
            }
        }
    }
}

#[test]
fn same_seed_same_report() {
    let g = generate(&GraphKind::ErdosRenyi { n: 20, p: 0.3 }, 4).unwrap();
    let p = build_bisection(&g).unwrap();
    let a = solve_epm(&p, &EpmConfig::default(), 9).unwrap();
    let b = solve_epm(&p, &EpmConfig::default(), 9).unwrap();
    assert_eq!(a.x_binary, b.x_binary);
    assert_eq!(a.trace, b.trace);
}
