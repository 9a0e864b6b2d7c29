use fdp_risk::accountant::{curve_of, MechanismSpec};
use fdp_risk::grid::linspace;
use fdp_risk::oracle::{self, DiscretePair};
use fdp_risk::pld;
use fdp_risk::prior_bounds;
use fdp_risk::risk;
use fdp_risk::tradeoff::{self, gaussian_delta, TradeoffCurve};
use proptest::prelude::*;

fn dense_grid() -> Vec<f64> {
    linspace(0.0, 1.0, 10_001)
}

fn eps_delta() -> impl Strategy<Value = TradeoffCurve> {
    (0.0..10.0f64, 0.0..0.5f64).prop_map(|(e, d)| TradeoffCurve::from_epsilon_delta(e, d).unwrap())
}

fn any_curve() -> impl Strategy<Value = TradeoffCurve> {
    prop_oneof![
        eps_delta(),
        (0.01..6.0f64).prop_map(|m| TradeoffCurve::gaussian(m).unwrap()),
        (0.01..6.0f64).prop_map(|e| TradeoffCurve::laplace(e).unwrap()),
    ]
}

fn simplex(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.001..1.0f64, n).prop_map(|v| {
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect()
    })
}

fn pair() -> impl Strategy<Value = DiscretePair> {
    (2..8usize)
        .prop_flat_map(|n| (simplex(n), simplex(n)))
        .prop_map(|(p, q)| DiscretePair::new(p, q).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn constructed_curves_are_valid(f in any_curve()) {
        let v = f.check_invariants(&dense_grid(), 1e-12);
        prop_assert!(v.is_empty(), "{:?}", v);
    }

    #[test]
    fn tv_closed_form(e in 0.0..10.0f64, d in 0.0..0.5f64) {
        let f = TradeoffCurve::from_epsilon_delta(e, d).unwrap();
        let expect = (e.exp() - 1.0 + 2.0 * d) / (e.exp() + 1.0);
        prop_assert!((tradeoff::tv_from_curve(&f).eta - expect).abs() < 1e-9);
        let from_grid = dense_grid().iter().map(|&a| 1.0 - a - f.eval(a)).fold(0.0, f64::max);
        prop_assert!(from_grid <= expect + 1e-12);
    }

    #[test]
    fn group_privacy_weakens(f in any_curve(), k in prop::sample::select(vec![1u32, 2, 5])) {
        let g = tradeoff::group_privacy(&f, k).unwrap();
        let alphas = linspace(0.0, 1.0, 2001);
        for &a in &alphas {
            if k == 1 {
                prop_assert!((g.eval(a) - f.eval(a)).abs() < 1e-12);
            }
            prop_assert!(g.eval(a) <= f.eval(a) + 1e-12);
        }
        let v = g.check_invariants(&alphas, 1e-12);
        prop_assert!(v.is_empty(), "{:?}", v);
    }

    #[test]
    fn profile_round_trip(mu in 0.3..2.0f64) {
        let f = TradeoffCurve::gaussian(mu).unwrap();
        let eps = linspace(0.0, 8.0, 8001);
        let back = tradeoff::curve_from_profile(&tradeoff::profile_from_curve(&f, &eps).unwrap());
        for &a in &linspace(0.0, 1.0, 1001) {
            prop_assert!(back.eval(a) <= f.eval(a) + 1e-12);
        }
        for &a in &linspace(0.01, 0.99, 99) {
            prop_assert!((back.eval(a) - f.eval(a)).abs() < 1e-6, "a={}", a);
        }
    }

    #[test]
    fn success_sandwich(f in any_curve(), base in 0.0..1.0f64) {
        let s = risk::succ_bound(&f, base).unwrap();
        let a = risk::adv_bound(&f, base).unwrap();
        let eta = risk::adv_bound_worst_case(&f);
        prop_assert!(base <= s && s <= 1.0);
        prop_assert!((0.0..=eta + 1e-9).contains(&a));
    }

    #[test]
    fn worst_case_is_max_over_baselines(f in any_curve()) {
        let best = linspace(0.0, 1.0, 10_000)
            .iter()
            .map(|&b| risk::adv_bound(&f, b).unwrap())
            .fold(0.0, f64::max);
        prop_assert!((best - risk::adv_bound_worst_case(&f)).abs() < 1e-4);
    }

    #[test]
    fn bayes_identity(f in any_curve()) {
        let r = risk::bayes_error(&f, 0.5).unwrap();
        prop_assert!((1.0 - 2.0 * r - tradeoff::tv_from_curve(&f).eta).abs() < 1e-6);
    }

    #[test]
    fn bernoulli_dominance(f in any_curve(), pi in 0.0..1.0f64) {
        let b = risk::bernoulli_succ_bound(&f, pi).unwrap();
        let s = risk::succ_bound(&f, pi.max(1.0 - pi)).unwrap();
        prop_assert!(b <= s + 1e-12);
    }

    #[test]
    fn success_monotone_in_base(f in any_curve(), a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(risk::succ_bound(&f, lo).unwrap() <= risk::succ_bound(&f, hi).unwrap() + 1e-12);
    }

    #[test]
    fn worst_case_monotone_in_noise(s in 0.1..10.0f64, r in 1.0..3.0f64) {
        for spec in [MechanismSpec::gaussian(s).unwrap(), MechanismSpec::laplace(s).unwrap()] {
            let a = risk::adv_bound_worst_case(&curve_of(&spec).unwrap());
            let b = risk::adv_bound_worst_case(&curve_of(&spec.with_noise_scale(s * r).unwrap()).unwrap());
            prop_assert!(b <= a + 1e-12);
        }
    }

    #[test]
    fn pso_fdp_never_exceeds_eps_delta(e in 0.0..20.0f64, d in 0.0..0.01f64, n in 2u64..5000, frac in 0.0..1.0f64) {
        let w = frac / n as f64;
        let f = TradeoffCurve::from_epsilon_delta(e, d).unwrap();
        let a = prior_bounds::pso_bound_fdp(n, w, &f).unwrap();
        let b = prior_bounds::pso_bound_eps_delta(n, w, e, d).unwrap();
        prop_assert!(a <= b + 1e-12);
        prop_assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn prior_bounds_in_range(base in 0.0..1.0f64, rho in 0.0..10.0f64, t in 1.01..50.0f64, eps in 0.0..20.0f64) {
        let z = prior_bounds::srr_bound_zcdp(base, rho).unwrap().value;
        let g = prior_bounds::RdpGuarantee::new(t, eps).unwrap();
        let r = prior_bounds::srr_bound_rdp(base, &g).unwrap();
        prop_assert!((base..=1.0).contains(&z));
        prop_assert!((base..=1.0).contains(&r));
    }

    #[test]
    fn exact_tradeoff_is_valid(pr in pair()) {
        let f = oracle::exact_tradeoff(&pr).unwrap();
        let v = f.check_invariants(&dense_grid(), 1e-12);
        prop_assert!(v.is_empty(), "{:?}", v);
        let sym = oracle::exact_symmetric_tradeoff(&pr).unwrap();
        for &a in &linspace(0.0, 1.0, 501) {
            prop_assert!(sym.eval(a) <= f.eval(a) + 1e-12);
        }
    }

    #[test]
    fn symmetric_pairs_give_self_inverse_curves(p in simplex(5)) {
        let q: Vec<f64> = p.iter().rev().copied().collect();
        let f = oracle::exact_tradeoff(&DiscretePair::new(p, q).unwrap()).unwrap();
        for (a, b) in f.exact_knots().unwrap() {
            if a > 0.0 && b > 0.0 {
                prop_assert!((f.eval(b) - a).abs() < 1e-9, "({}, {})", a, b);
            }
        }
    }

    #[test]
    fn attacks_respect_the_bound(seed in any::<u64>()) {
        for inst in oracle::random_instances(4, seed) {
            let case = oracle::verify_instance("prop", &inst).unwrap();
            prop_assert!(case.passed(), "{:?}", case);
        }
    }

    #[test]
    fn composition_is_monotone(s in 0.3..5.0f64, k in 1u32..6) {
        let g = MechanismSpec::gaussian(s).unwrap();
        let rr = MechanismSpec::randomized_response((s / 12.0).min(0.45)).unwrap();
        for spec in [g, rr] {
            let a = curve_of(&spec.clone().with_compositions(k).unwrap()).unwrap();
            let b = curve_of(&spec.with_compositions(k + 1).unwrap()).unwrap();
            for &x in &linspace(0.0, 1.0, 501) {
                prop_assert!(b.eval(x) <= a.eval(x) + 1e-12);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn pld_normalized_and_pessimistic(mu in 0.2..2.0f64, k in 1u32..4) {
        let single = pld::pld_of_gaussian(mu, 1e-4, 12.0).unwrap();
        let composed = pld::pld_compose(&single, k).unwrap();
        for g in [&single, &composed] {
            let total: f64 = g.masses().iter().sum::<f64>() + g.truncation_mass() + g.infinity_mass();
            prop_assert!((total - 1.0).abs() < 1e-10);
            prop_assert!(g.masses().iter().all(|&m| m >= 0.0));
        }
        let mu_k = mu * (k as f64).sqrt();
        let eps = linspace(0.0, 5.0, 51);
        let prof = pld::profile_from_pld(&composed, &eps).unwrap();
        for &(e, d) in prof.points() {
            let exact = gaussian_delta(mu_k, e);
            prop_assert!(d >= exact - 1e-12, "e={} {} {}", e, d, exact);
            prop_assert!(d - exact < 1e-4, "e={} {} {}", e, d, exact);
        }
    }
}
