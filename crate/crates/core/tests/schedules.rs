use gvi_core::schedule::{ContinuousSchedule, DiscreteSchedule};

#[test]
fn alpha_dot_matches_central_difference() {
    let eps = 1e-5;
    for (p, q) in [(0.2, 0.4), (0.5, 0.75), (0.05, 0.9)] {
        let s = ContinuousSchedule::<f64>::new(p, q);
        for t in [0.5, 1.0, 15.0, 200.0] {
            let fd = (s.eval(t + eps).alpha - s.eval(t - eps).alpha) / (2.0 * eps);
            let exact = s.eval(t).alpha_dot;
            assert!(((fd - exact) / exact).abs() < 1e-6, "p={p} t={t}");
        }
    }
}

#[test]
fn eval_examples() {
    let s = ContinuousSchedule::<f64>::new(0.2, 0.4);
    let v = s.eval(15.0);
    assert!((v.alpha - 16f64.powf(-0.2)).abs() < 1e-15);
    assert!((v.mu - 16f64.powf(0.4)).abs() < 1e-15);
    assert!((v.alpha_dot + 0.2 * 16f64.powf(-1.2)).abs() < 1e-15);
    let v = ContinuousSchedule::<f64>::new(0.5, 0.75).eval(3.0);
    assert!((v.alpha - 0.5).abs() < 1e-15);
    assert!((v.mu - 2f64.powf(1.5)).abs() < 1e-14);
    assert!((v.alpha_dot + 0.0625).abs() < 1e-15);
}

#[test]
fn partial_sums_and_monotone_proxies() {
    let s = DiscreteSchedule::<f64>::new(0.2, 0.4, 0.5);
    let mut sum = 0.0;
    let mut prev_mu_h = f64::INFINITY;
    for k in 0..1_000_000u64 {
        let v = s.eval(k);
        sum += v.h * v.alpha;
        if k >= 1 {
            assert!(v.mu * v.h < prev_mu_h, "mu_k h_k not decreasing at {k}");
        }
        prev_mu_h = v.mu * v.h;
    }
    assert!(sum > 10.0, "{sum}");

    let report = s.validate();
    let k0 = report.ratio_decreasing_from.unwrap();
    for k in k0..k0 + 10_000 {
        assert!(s.step_ratio(k + 1) < s.step_ratio(k));
    }
}
