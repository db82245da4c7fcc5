use proptest::prelude::*;

use welander::atlas::{classify_region, codim2_points, segment_adjacency, RegionQuery};
use welander::filippov::{
    classify_sigma_point, convex_coefficient, lie1, pseudo_roots, sliding_field, sliding_segment,
    tangency_point, SegmentStability, SigmaPoint,
};
use welander::flow::{integrate_pws, EventKind, IntegrationConfig, Regime};
use welander::model::{
    jacobian_smooth, nondimensionalize, switching_value, vector_field_region, vector_field_smooth,
    PhysicalParams,
};
use welander::{ModelParams, Side, State};

fn kappas() -> impl Strategy<Value = (f64, f64)> {
    (0.01f64..2.0, 0.05f64..3.0).prop_map(|(k1, d)| (k1, k1 + d))
}

fn pws() -> impl Strategy<Value = ModelParams> {
    (kappas(), -0.5f64..1.5, prop_oneof![-1.5f64..-0.01, 0.01f64..1.0])
        .prop_map(|((k1, k2), mu, eta)| ModelParams::new(mu, eta, k1, k2, 0.0).unwrap())
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (f(m) < 0.0) == (fa < 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

proptest! {
    #[test]
    fn switching_is_odd_about_one_half(u in -5.0f64..5.0, eps in 1e-4f64..1.0) {
        prop_assert!((switching_value(u, eps) + switching_value(-u, eps) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn smooth_field_tends_to_region_fields(
        mu in -0.2f64..1.0,
        eta in -1.2f64..0.6,
        x in -0.5f64..1.5,
        off in prop_oneof![-1.0f64..-0.02, 0.02f64..1.0],
    ) {
        let s = State::new(x, x + eta + off);
        let side = if off > 0.0 { Side::R2 } else { Side::R1 };
        let target = vector_field_region(side, s, &ModelParams::pws(mu, eta));
        let err = |eps: f64| {
            let f = vector_field_smooth(s, &ModelParams::smooth(mu, eta, eps)).unwrap();
            (f[0] - target[0]).abs().max((f[1] - target[1]).abs())
        };
        let (coarse, fine) = (err(1e-3), err(1e-4));
        prop_assert!(fine <= coarse);
        prop_assert!(fine < 1e-12);
    }

    #[test]
    fn jacobian_matches_finite_differences(
        mu in -0.2f64..1.0,
        eta in -1.2f64..0.6,
        eps in 0.01f64..0.3,
        x in -0.5f64..1.5,
        du in -3.0f64..3.0,
    ) {
        let p = ModelParams::smooth(mu, eta, eps);
        let s = State::new(x, x + eta + du * eps);
        let j = jacobian_smooth(s, &p).unwrap();
        let h = 1e-6;
        for c in 0..2 {
            let d = if c == 0 { State::new(h, 0.0) } else { State::new(0.0, h) };
            let fp = vector_field_smooth(State::new(s.x + d.x, s.y + d.y), &p).unwrap();
            let fm = vector_field_smooth(State::new(s.x - d.x, s.y - d.y), &p).unwrap();
            for r in 0..2 {
                let fd = (fp[r] - fm[r]) / (2.0 * h);
                prop_assert!((fd - j[r][c]).abs() <= 1e-5 * j[r][c].abs().max(1.0));
            }
        }
    }

    #[test]
    fn nondimensionalize_ignores_time_units(scale in 0.01f64..100.0, f0 in 0.0f64..1e-2, g in 0.0f64..1.0) {
        let base = PhysicalParams {
            gamma: 0.3,
            t_a: 25.0,
            t_0: 5.0,
            s_0: 35.0,
            f_0: f0,
            h_depth: 200.0,
            alpha_s: 8e-4,
            alpha_t: 2e-4,
            k1: 0.05,
            k2: 0.6,
            g_star: g,
            rho_0: 1027.0,
        };
        let scaled = PhysicalParams {
            gamma: base.gamma * scale,
            f_0: base.f_0 * scale,
            k1: base.k1 * scale,
            k2: base.k2 * scale,
            ..base
        };
        let a = nondimensionalize(&base, 0.0).unwrap();
        let b = nondimensionalize(&scaled, 0.0).unwrap();
        for (u, v) in [(a.mu, b.mu), (a.eta, b.eta), (a.kappa1, b.kappa1), (a.kappa2, b.kappa2)] {
            prop_assert!((u - v).abs() <= 1e-12 * u.abs().max(1e-12));
        }
    }

    #[test]
    fn convex_combination_is_tangent_to_sigma(p in pws(), s in 0.0f64..=1.0) {
        let seg = sliding_segment(&p).unwrap();
        let x = seg.x_lo + s * (seg.x_hi - seg.x_lo);
        let lam = convex_coefficient(x, &p).unwrap();
        let on = State::new(x, x + p.eta);
        let f1 = vector_field_region(Side::R1, on, &p);
        let f2 = vector_field_region(Side::R2, on, &p);
        let v = [(1.0 - lam) * f1[0] + lam * f2[0], (1.0 - lam) * f1[1] + lam * f2[1]];
        prop_assert!((v[0] - v[1]).abs() < 1e-12 * v[0].abs().max(1.0));
        prop_assert!((sliding_field(x, &p).unwrap() - v[0]).abs() < 1e-12 * v[0].abs().max(1.0));
    }

    #[test]
    fn tangencies_are_zeros_of_lie_derivative(p in pws()) {
        for side in [Side::R1, Side::R2] {
            let brute = bisect(|x| lie1(side, x, &p), -100.0, 100.0);
            let exact = tangency_point(side, &p).location.x;
            prop_assert!((brute - exact).abs() < 1e-12 * exact.abs().max(1.0));
        }
    }

    #[test]
    fn pseudo_roots_zero_the_sliding_field(p in pws()) {
        if let Some((qm, qp)) = pseudo_roots(&p) {
            for q in [qm, qp] {
                let scale = q.abs().max(1.0).powi(2) / p.eta.abs();
                prop_assert!(sliding_field(q, &p).unwrap().abs() < 1e-12 * scale);
            }
            let d = ((p.eta + p.mu + 1.0).powi(2) - 4.0 * p.mu).sqrt();
            let b = 1.0 - p.mu - p.eta;
            prop_assert!((qp - 0.5 * (b + d)).abs() < 1e-12 * qp.abs().max(1.0));
            prop_assert!((qm - 0.5 * (b - d)).abs() < 1e-12 * qm.abs().max(1.0) * (1.0 + b.abs() / d.max(1e-3)));
            prop_assert!((qm * qp + p.eta).abs() < 1e-12 * (qm * qp).abs().max(1.0));
            prop_assert!((qm + qp - b).abs() < 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn sliding_segment_stability_follows_eta(p in pws(), s in 0.01f64..0.99) {
        let seg = sliding_segment(&p).unwrap();
        let x = seg.x_lo + s * (seg.x_hi - seg.x_lo);
        let (a, b) = (lie1(Side::R1, x, &p), lie1(Side::R2, x, &p));
        if p.eta > 0.0 {
            prop_assert!(a > 0.0 && b < 0.0);
            prop_assert_eq!(seg.stability, SegmentStability::Attracting);
        } else {
            prop_assert!(a < 0.0 && b > 0.0);
            prop_assert_eq!(seg.stability, SegmentStability::Repelling);
        }
    }

    #[test]
    fn diagram_incidence_is_the_same_for_all_kappas((k1, k2) in kappas()) {
        let reference = ModelParams::pws(0.0, 0.0);
        let p = ModelParams::new(0.0, 0.0, k1, k2, 0.0).unwrap();
        let mut a = segment_adjacency(&reference);
        let mut b = segment_adjacency(&p);
        a.sort_by_key(|x| x.sublabel.as_str());
        b.sort_by_key(|x| x.sublabel.as_str());
        prop_assert_eq!(a, b);
        let pts = codim2_points(&p);
        prop_assert_eq!(pts.len(), 5);
        let kinds: Vec<_> = pts.iter().map(|c| c.kind).collect();
        let ref_kinds: Vec<_> = codim2_points(&reference).iter().map(|c| c.kind).collect();
        prop_assert_eq!(kinds, ref_kinds);
    }
}

/// Catalogue points in regions I, V, VI, VII and VIII with varied initial data.
fn flow_case() -> impl Strategy<Value = (ModelParams, State)> {
    let params = prop_oneof![
        Just(ModelParams::pws(0.0225, 0.35)),
        Just(ModelParams::pws(0.385, 0.35)),
        Just(ModelParams::pws(0.25, -0.2)),
        Just(ModelParams::pws(-0.115, -0.95)),
        Just(ModelParams::pws(0.0987, -0.463)),
    ];
    (params, -0.5f64..1.8, -1.5f64..2.0).prop_map(|(p, x, y)| (p, State::new(x, y)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn events_lie_on_sigma_and_match_classification((p, s0) in flow_case()) {
        let cfg = IntegrationConfig::default();
        let tr = integrate_pws(s0, &p, &cfg, 30.0).unwrap();
        for e in &tr.events {
            prop_assert!((e.state.y - e.state.x - p.eta).abs() < cfg.event_tol);
            let here = classify_sigma_point(e.state.x, &p);
            match e.kind {
                EventKind::Crossing { into } => {
                    let ok = matches!(here, SigmaPoint::Crossing { into: i } if i == into)
                        || matches!(here, SigmaPoint::Tangency(_));
                    prop_assert!(ok, "{:?} vs {:?}", e.kind, here);
                }
                EventKind::SlideStart => {
                    prop_assert!(matches!(here, SigmaPoint::Sliding(SegmentStability::Attracting))
                        || matches!(here, SigmaPoint::Tangency(_)));
                }
                _ => {}
            }
        }
        for seg in tr.segments.iter().filter(|s| s.regime == Regime::Sliding) {
            for (_, s) in &seg.samples {
                prop_assert!((s.y - s.x - p.eta).abs() < 10.0 * cfg.event_tol);
            }
        }
    }

    #[test]
    fn pws_orbits_do_not_depend_on_max_step((p, s0) in flow_case()) {
        let here = classify_region(p.mu, p.eta, &p).unwrap();
        prop_assume!(matches!(here, RegionQuery::Region { .. }));
        let seg = sliding_segment(&p).unwrap();
        let u0 = s0.y - s0.x - p.eta;
        prop_assume!(!(u0.abs() < 1e-9 && seg.stability == SegmentStability::Repelling));
        let a = IntegrationConfig::default();
        let b = IntegrationConfig { max_step: a.max_step / 4.0, ..a };
        let ea = integrate_pws(s0, &p, &a, 20.0).unwrap().final_state();
        let eb = integrate_pws(s0, &p, &b, 20.0).unwrap().final_state();
        prop_assert!(ea.dist(eb) < 1e-6, "{:?} vs {:?}", ea, eb);
    }
}
