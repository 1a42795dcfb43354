//! Regularization / penalty / step-size schedules.
//!
//! The built-in families are power laws:
//!
//! * continuous: `α(t) = (1+t)^(-p)`, `μ(t) = (1+t)^q`;
//! * discrete: `α_k = (k+1)^(-p)`, `μ_k = (k+1)^q`, `h_k = (k+1)^(-r)`.
//!
//! For these families the asymptotic hypotheses of the convergence results
//! reduce to inequalities between exponents, which [`ValidityReport`] checks
//! one by one. Arbitrary user schedules implement [`ContinuousParameters`] or
//! [`DiscreteParameters`] and self-declare their validity.

use std::fmt;
use std::sync::Arc;

use crate::scalar::Scalar;

/// Horizon over which the validator scans the step-ratio sequence for the
/// index after which it is decreasing.
pub const RATIO_SCAN_HORIZON: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuousValue<T> {
    pub alpha: T,
    pub mu: T,
    pub alpha_dot: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepParameters<T> {
    pub alpha: T,
    pub mu: T,
    pub h: T,
}

/// One asymptotic hypothesis and its exponent-level reduction.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionCheck {
    pub condition: &'static str,
    pub reduced: &'static str,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleFamily {
    Continuous,
    Discrete,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport {
    pub family: ScheduleFamily,
    pub conditions: Vec<ConditionCheck>,
    /// `q < 1`, required by the continuous power-law remark but not by the
    /// convergence theorem itself.
    pub remark_strict: Option<ConditionCheck>,
    /// First index from which `|α_k − α_{k+1}| / (h_k α_k²)` is decreasing
    /// (scanned up to [`RATIO_SCAN_HORIZON`]). Discrete family only.
    pub ratio_decreasing_from: Option<u64>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.conditions.iter().all(|c| c.holds)
            && self.remark_strict.as_ref().is_none_or(|c| c.holds)
    }

    /// Every failing check, theorem conditions first.
    pub fn violations(&self) -> Vec<&ConditionCheck> {
        self.conditions
            .iter()
            .chain(self.remark_strict.iter())
            .filter(|c| !c.holds)
            .collect()
    }
}

impl fmt::Display for ValidityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let family = match self.family {
            ScheduleFamily::Continuous => "continuous",
            ScheduleFamily::Discrete => "discrete",
        };
        writeln!(
            f,
            "{family} schedule: {}",
            if self.is_valid() { "valid" } else { "INVALID" }
        )?;
        for c in &self.conditions {
            let mark = if c.holds { "ok  " } else { "FAIL" };
            writeln!(f, "  [{mark}] {} <=> {}", c.condition, c.reduced)?;
        }
        if let Some(c) = &self.remark_strict {
            let mark = if c.holds { "ok  " } else { "FAIL" };
            writeln!(f, "  [{mark}] (remark-strict) {}", c.reduced)?;
        }
        if let Some(k0) = self.ratio_decreasing_from {
            writeln!(f, "  step ratio decreasing from k = {k0}")?;
        }
        Ok(())
    }
}

/// How a schedule vouches for the hypotheses of the convergence results.
#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    /// Exponent-level check of a built-in power law.
    Checked(ValidityReport),
    /// User-supplied schedule; the toolkit does not verify the claim.
    SelfDeclared { valid: bool },
}

impl Certificate {
    pub fn is_valid(&self) -> bool {
        match self {
            Certificate::Checked(r) => r.is_valid(),
            Certificate::SelfDeclared { valid } => *valid,
        }
    }
}

pub trait ContinuousParameters<T>: Send + Sync {
    fn at(&self, t: T) -> ContinuousValue<T>;
    fn certificate(&self) -> Certificate;
    fn describe(&self) -> String;
}

pub trait DiscreteParameters<T>: Send + Sync {
    fn at(&self, k: u64) -> StepParameters<T>;
    fn certificate(&self) -> Certificate;
    fn describe(&self) -> String;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuousSchedule<T> {
    pub p: T,
    pub q: T,
}

impl<T: Scalar> ContinuousSchedule<T> {
    pub fn new(p: T, q: T) -> Self {
        ContinuousSchedule { p, q }
    }

    /// `((1+t)^(-p), (1+t)^q, -p (1+t)^(-p-1))`.
    pub fn eval(&self, t: T) -> ContinuousValue<T> {
        let base = T::one() + t;
        ContinuousValue {
            alpha: base.powf(-self.p),
            mu: base.powf(self.q),
            alpha_dot: -self.p * base.powf(-self.p - T::one()),
        }
    }

    /// `∫_0^t α(s) ds`.
    pub fn alpha_integral(&self, t: T) -> T {
        integral_of_power(t, -self.p)
    }

    /// `∫_0^t μ(s) ds`.
    pub fn mu_integral(&self, t: T) -> T {
        integral_of_power(t, self.q)
    }

    pub fn validate(&self) -> ValidityReport {
        let (p, q) = (self.p, self.q);
        let one = T::one();
        let zero = T::zero();
        ValidityReport {
            family: ScheduleFamily::Continuous,
            conditions: vec![
                ConditionCheck {
                    condition: "alpha(t) -> 0",
                    reduced: "p > 0",
                    holds: p > zero,
                },
                ConditionCheck {
                    condition: "alpha(t)*mu(t) -> inf",
                    reduced: "q > p",
                    holds: q > p,
                },
                ConditionCheck {
                    condition: "alpha'(t)/alpha(t)^2 -> 0",
                    reduced: "p < 1",
                    holds: p < one,
                },
                ConditionCheck {
                    condition: "integral of alpha = inf",
                    reduced: "p <= 1",
                    holds: p <= one,
                },
            ],
            remark_strict: Some(ConditionCheck {
                condition: "power-law remark",
                reduced: "q < 1",
                holds: q < one,
            }),
            ratio_decreasing_from: None,
        }
    }
}

/// `∫_0^t (1+s)^e ds` for real `e`.
fn integral_of_power<T: Scalar>(t: T, e: T) -> T {
    let base = T::one() + t;
    if (e + T::one()).abs() < T::epsilon() {
        base.ln()
    } else {
        (base.powf(e + T::one()) - T::one()) / (e + T::one())
    }
}

impl<T: Scalar> ContinuousParameters<T> for ContinuousSchedule<T> {
    fn at(&self, t: T) -> ContinuousValue<T> {
        self.eval(t)
    }

    fn certificate(&self) -> Certificate {
        Certificate::Checked(self.validate())
    }

    fn describe(&self) -> String {
        format!("alpha(t)=(1+t)^-{}, mu(t)=(1+t)^{}", self.p, self.q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteSchedule<T> {
    pub p: T,
    pub q: T,
    pub r: T,
}

impl<T: Scalar> DiscreteSchedule<T> {
    pub fn new(p: T, q: T, r: T) -> Self {
        DiscreteSchedule { p, q, r }
    }

    pub fn eval(&self, k: u64) -> StepParameters<T> {
        let base = T::from_u64(k).expect("index representable") + T::one();
        StepParameters {
            alpha: base.powf(-self.p),
            mu: base.powf(self.q),
            h: base.powf(-self.r),
        }
    }

    /// `|α_k − α_{k+1}| / (h_k α_k²)`.
    pub fn step_ratio(&self, k: u64) -> T {
        let now = self.eval(k);
        let next = self.eval(k + 1);
        (now.alpha - next.alpha).abs() / (now.h * now.alpha * now.alpha)
    }

    pub fn validate(&self) -> ValidityReport {
        let (p, q, r) = (self.p, self.q, self.r);
        let one = T::one();
        let zero = T::zero();
        let ratio_vanishes = p + r < one;
        let ratio_decreasing_from = (ratio_vanishes && p > zero).then(|| {
            let mut last_increase = None;
            let mut prev = self.step_ratio(0);
            for k in 1..=RATIO_SCAN_HORIZON {
                let cur = self.step_ratio(k);
                if cur >= prev {
                    last_increase = Some(k - 1);
                }
                prev = cur;
            }
            last_increase.map_or(0, |k| k + 1)
        });
        ValidityReport {
            family: ScheduleFamily::Discrete,
            conditions: vec![
                ConditionCheck {
                    condition: "sum h_k*alpha_k = inf",
                    reduced: "p + r <= 1",
                    holds: p + r <= one,
                },
                ConditionCheck {
                    condition: "mu_k*h_k -> 0",
                    reduced: "q < r",
                    holds: q < r,
                },
                ConditionCheck {
                    condition: "mu_k*alpha_k -> inf",
                    reduced: "q > p",
                    holds: q > p,
                },
                ConditionCheck {
                    condition: "|alpha_k - alpha_k+1|/(h_k*alpha_k^2) -> 0",
                    reduced: "p + r < 1",
                    holds: ratio_vanishes,
                },
                ConditionCheck {
                    condition: "alpha_k -> 0",
                    reduced: "p > 0",
                    holds: p > zero,
                },
            ],
            remark_strict: None,
            ratio_decreasing_from,
        }
    }
}

impl<T: Scalar> DiscreteParameters<T> for DiscreteSchedule<T> {
    fn at(&self, k: u64) -> StepParameters<T> {
        self.eval(k)
    }

    fn certificate(&self) -> Certificate {
        Certificate::Checked(self.validate())
    }

    fn describe(&self) -> String {
        format!(
            "alpha_k=(k+1)^-{}, mu_k=(k+1)^{}, h_k=(k+1)^-{}",
            self.p, self.q, self.r
        )
    }
}

type ScalarFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// User-defined continuous schedule built from closures.
#[derive(Clone)]
pub struct CustomContinuous<T> {
    pub label: String,
    pub alpha: ScalarFn<T>,
    pub mu: ScalarFn<T>,
    pub alpha_dot: ScalarFn<T>,
    pub declared_valid: bool,
}

impl<T: Scalar> ContinuousParameters<T> for CustomContinuous<T> {
    fn at(&self, t: T) -> ContinuousValue<T> {
        ContinuousValue {
            alpha: (self.alpha)(t),
            mu: (self.mu)(t),
            alpha_dot: (self.alpha_dot)(t),
        }
    }

    fn certificate(&self) -> Certificate {
        Certificate::SelfDeclared {
            valid: self.declared_valid,
        }
    }

    fn describe(&self) -> String {
        self.label.clone()
    }
}

type IndexFn<T> = Arc<dyn Fn(u64) -> T + Send + Sync>;

/// User-defined discrete schedule built from closures.
#[derive(Clone)]
pub struct CustomDiscrete<T> {
    pub label: String,
    pub alpha: IndexFn<T>,
    pub mu: IndexFn<T>,
    pub h: IndexFn<T>,
    pub declared_valid: bool,
}

impl<T: Scalar> DiscreteParameters<T> for CustomDiscrete<T> {
    fn at(&self, k: u64) -> StepParameters<T> {
        StepParameters {
            alpha: (self.alpha)(k),
            mu: (self.mu)(k),
            h: (self.h)(k),
        }
    }

    fn certificate(&self) -> Certificate {
        Certificate::SelfDeclared {
            valid: self.declared_valid,
        }
    }

    fn describe(&self) -> String {
        self.label.clone()
    }
}

/// Frozen parameters: `α`, `μ` constant in time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrozenParameters<T> {
    pub alpha: T,
    pub mu: T,
}

impl<T: Scalar> ContinuousParameters<T> for FrozenParameters<T> {
    fn at(&self, _t: T) -> ContinuousValue<T> {
        ContinuousValue {
            alpha: self.alpha,
            mu: self.mu,
            alpha_dot: T::zero(),
        }
    }

    fn certificate(&self) -> Certificate {
        // Constant α never vanishes.
        Certificate::SelfDeclared { valid: false }
    }

    fn describe(&self) -> String {
        format!("frozen alpha={}, mu={}", self.alpha, self.mu)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn failing(report: &ValidityReport) -> Vec<&'static str> {
        report.violations().iter().map(|c| c.reduced).collect()
    }

    #[test]
    fn eval_at_origin() {
        let v = ContinuousSchedule::new(0.2, 0.4).eval(0.0);
        assert_eq!((v.alpha, v.mu, v.alpha_dot), (1.0, 1.0, -0.2));
    }

    #[test]
    fn eval_power_of_two() {
        let v = ContinuousSchedule::new(0.5, 0.75).eval(3.0_f64);
        assert!((v.alpha - 0.5).abs() < 1e-15);
        assert!((v.mu - 2.0_f64.powf(1.5)).abs() < 1e-14);
        assert!((v.alpha_dot + 0.0625).abs() < 1e-15);
    }

    #[test]
    fn continuous_verdicts() {
        assert!(ContinuousSchedule::new(0.2, 0.4).validate().is_valid());
        let r = ContinuousSchedule::new(0.4, 0.2).validate();
        assert_eq!(failing(&r), vec!["q > p"]);
        let r = ContinuousSchedule::new(1.2, 1.5).validate();
        assert!(failing(&r).contains(&"p < 1"));
    }

    #[test]
    fn discrete_verdicts() {
        let r = DiscreteSchedule::new(0.2, 0.4, 0.5).validate();
        assert!(r.is_valid());
        let r = DiscreteSchedule::new(0.5, 0.6, 0.7).validate();
        assert_eq!(failing(&r), vec!["p + r <= 1", "p + r < 1"]);
        let r = DiscreteSchedule::new(0.2, 0.5, 0.4).validate();
        assert_eq!(failing(&r), vec!["q < r"]);
    }

    #[test]
    fn integrals_match_closed_form() {
        let s = ContinuousSchedule::new(0.2_f64, 0.4);
        let t = 15.0;
        assert!((s.alpha_integral(t) - (16f64.powf(0.8) - 1.0) / 0.8).abs() < 1e-13);
        assert!((s.mu_integral(t) - (16f64.powf(1.4) - 1.0) / 1.4).abs() < 1e-12);
        assert!((integral_of_power(3.0_f64, -1.0) - 4f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn custom_schedules_self_declare() {
        let c = CustomDiscrete::<f64> {
            label: "const".into(),
            alpha: Arc::new(|_| 0.1),
            mu: Arc::new(|_| 1.0),
            h: Arc::new(|_| 0.5),
            declared_valid: true,
        };
        assert_eq!(c.certificate(), Certificate::SelfDeclared { valid: true });
        assert_eq!(c.at(7).h, 0.5);
    }

    #[test]
    fn report_lists_conditions_by_name() {
        let text = DiscreteSchedule::new(0.5, 0.6, 0.7).validate().to_string();
        assert!(text.contains("INVALID"));
        assert!(text.contains("[FAIL]"));
        assert!(text.contains("p + r < 1"));
    }
}
