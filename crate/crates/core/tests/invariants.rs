//! Invariants checked on random inputs.

use std::f64::consts::PI;
use std::sync::OnceLock;

use proptest::prelude::*;

use toda_rh::config::RunConfig;
use toda_rh::cplx::{quartic_ratio_root, rotated_airy, szego_root};
use toda_rh::phase::{breve_d, g, phi, w_inverse, w_map, PhaseContext, RSampler};
use toda_rh::rhp::{ModelContext, ParametrixContext};
use toda_rh::scattering::blaschke;
use toda_rh::toda::{make_step_data, reflect_solution, Profile, SimState};
use toda_rh::C64;

fn away_from_contours(r: f64, a: f64) -> bool {
    (r - 1.0).abs() > 0.05 && a.abs() > 0.05 && (PI - a.abs()) > 0.02
}

fn conjugant() -> &'static (PhaseContext, RSampler) {
    static CELL: OnceLock<(PhaseContext, RSampler)> = OnceLock::new();
    CELL.get_or_init(|| {
        let ctx = PhaseContext::new(0.4).unwrap();
        let rs = RSampler::from_fn(ctx.theta0, |s| Ok(-(0.35 * (s - s.inv())).exp())).unwrap();
        (ctx, rs)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn phase_and_g_are_odd(xi in 0.2f64..0.8, r in 0.2f64..3.0, a in -PI..PI) {
        prop_assume!(away_from_contours(r, a));
        let z = C64::from_polar(r, a);
        prop_assert!((phi(z.inv(), xi).unwrap() + phi(z, xi).unwrap()).norm() < 1e-12);
        let ctx = PhaseContext::new(xi).unwrap();
        prop_assert!((g(z.inv(), &ctx).unwrap() + g(z, &ctx).unwrap()).norm() < 1e-9);
    }

    #[test]
    fn blaschke_inversion(zs in proptest::collection::vec(0.05f64..0.95, 0..4), neg in any::<bool>(), r in 0.2f64..3.0, a in -PI..PI) {
        let zs: Vec<f64> = zs.into_iter().map(|x| if neg { -x } else { x }).collect();
        let z = C64::from_polar(r, a);
        prop_assume!(zs.iter().all(|&x| (z - x).norm() > 1e-3 && (z - 1.0 / x).norm() > 1e-3));
        let p = blaschke(z, &zs).unwrap() * blaschke(z.inv(), &zs).unwrap();
        prop_assert!((p - 1.0).norm() < 1e-10);
        let p0 = blaschke(C64::new(0.0, 0.0), &zs).unwrap();
        prop_assert!(p0.re > 0.0 && p0.im.abs() < 1e-15);
    }

    #[test]
    fn airy_rotations_sum_to_zero(r in 0.0f64..12.0, a in -PI..PI) {
        let w = C64::from_polar(r, a);
        let y: Vec<_> = (1..=3).map(|j| rotated_airy(j, w).unwrap()).collect();
        let scale: f64 = y.iter().map(|p| p.value.norm()).sum();
        prop_assert!(y.iter().map(|p| p.value).sum::<C64>().norm() <= 1e-11 * scale);
    }

    #[test]
    fn branch_roots(theta in 0.3f64..2.8, r in 0.2f64..3.0, a in -PI..PI) {
        prop_assume!(away_from_contours(r, a));
        let z0 = C64::from_polar(1.0, theta);
        let z = C64::from_polar(r, a);
        let q = szego_root(z, z0).unwrap();
        prop_assert!((q * q - (z0 - z) * (z0 * z - 1.0)).norm() < 1e-12 * (1.0 + q.norm_sqr()));
        let b = quartic_ratio_root(z, z0, 1).unwrap() * quartic_ratio_root(z.inv(), z0, 1).unwrap();
        prop_assert!((b - 1.0).norm() < 1e-12);
    }

    #[test]
    fn model_determinant_and_symmetry(xi in 0.2f64..0.8, r in 0.2f64..3.0, a in -PI..PI) {
        prop_assume!(away_from_contours(r, a));
        let model = ModelContext::new(PhaseContext::new(xi).unwrap(), -1.0).unwrap();
        let z = C64::from_polar(r, a);
        let m = model.matrix(z, None).unwrap();
        prop_assert!((m.det() - 1.0).norm() < 1e-12);
        prop_assert!(model.matrix(z.inv(), None).unwrap().dist(&m.sigma1_conj()) < 1e-12);
    }

    #[test]
    fn parametrix_determinant(xi in 0.25f64..0.75, s in 0.05f64..0.95, a in 0.01f64..6.27, t in 20.0f64..200.0) {
        let model = ModelContext::new(PhaseContext::new(xi).unwrap(), -1.0).unwrap();
        let rho = 0.4 * model.ctx.z0.im;
        let par = ParametrixContext::new(model, t, rho).unwrap();
        let z = w_inverse(C64::from_polar(s * par.w_radius(), a), t, &model.ctx).unwrap();
        prop_assert!((par.matrix(z, None).unwrap().det() - 1.0).norm() < 1e-9);
    }

    #[test]
    fn w_map_round_trip(xi in 0.2f64..0.8, d in 1e-3f64..0.1, a in -PI..PI) {
        let ctx = PhaseContext::new(xi).unwrap();
        let z = ctx.z0 + C64::from_polar(d * ctx.z0.im, a);
        prop_assume!(!ctx.on_sigma(z, 1e-9));
        let w = w_map(z, 30.0, &ctx).unwrap();
        prop_assert!((w_inverse(w, 30.0, &ctx).unwrap() - z).norm() < 1e-10);
    }

    #[test]
    fn conjugant_inversion(r in 0.3f64..2.5, a in -PI..PI) {
        prop_assume!(away_from_contours(r, a));
        let (ctx, rs) = conjugant();
        let z = C64::from_polar(r, a);
        prop_assert!((breve_d(z, ctx, rs).unwrap() * breve_d(z.inv(), ctx, rs).unwrap() - 1.0).norm() < 1e-8);
    }

    #[test]
    fn reflection_is_an_involution(a_bg in 0.3f64..0.9, gap in 1.1f64..2.0, nu in 0.5f64..2.0, da in -0.1f64..0.1, db in -0.5f64..0.5) {
        let b_bg = 2.0 * a_bg + gap;
        let d = make_step_data(a_bg, b_bg, Profile::ExpPerturbed { nu, amp_a: da, amp_b: db }, 12).unwrap();
        let s = SimState::new(d);
        let rr = reflect_solution(&reflect_solution(&s));
        for n in s.data.n_min..=s.data.n_max() {
            prop_assert!((rr.data.a(n) - s.data.a(n)).abs() < 1e-13);
            prop_assert!((rr.data.b(n) - s.data.b(n)).abs() < 1e-13);
        }
        prop_assert!((rr.t - s.t).abs() < 1e-15);
    }

    #[test]
    fn config_json_round_trip(eps in 0.05f64..0.3, seed in any::<u64>(), grid in 4usize..500, tol in 0.1f64..10.0) {
        let c = RunConfig { eps, xi: vec![0.5], seed, grid, tol_scale: tol, ..Default::default() };
        let back: RunConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        prop_assert_eq!(back, c);
    }
}
