//! Problem instances `GVI(A, F, C)`: find `x*` with `F x* ∈ C` and
//! `<A x*, y - F x*> >= 0` for every `y ∈ C`.
//!
//! Both residuals shared by the solvers live here. With `F_α = F + αI` and
//! `P` the projection onto `C`,
//!
//! * the regularized field is `P(F_α x − μ A x) − F_α x`, the right-hand
//!   side of the regularized projection flow;
//! * the fixed-point residual is `|F x − P(F x − μ A x)|`, which vanishes
//!   exactly at solutions for any `μ > 0`.

use crate::error::{GviError, Result};
use crate::operator::Couple;
use crate::projection::FeasibleSet;
use crate::scalar::Scalar;
use crate::vector::{self, Vector};

#[derive(Clone, Debug)]
pub struct GviProblem<T: Scalar> {
    name: String,
    couple: Couple<T>,
    set: FeasibleSet<T>,
    reference: Option<Vector<T>>,
}

impl<T: Scalar> GviProblem<T> {
    pub fn new(name: impl Into<String>, couple: Couple<T>, set: FeasibleSet<T>) -> Self {
        GviProblem {
            name: name.into(),
            couple,
            set,
            reference: None,
        }
    }

    /// Attaches the known reference solution `x†`.
    pub fn with_reference(mut self, reference: Vector<T>) -> Result<Self> {
        reference.ensure_dim(self.dim(), "reference solution")?;
        self.reference = Some(reference);
        Ok(self)
    }

    /// Replaces the feasible set. The reference solution is kept only if it
    /// still certifies as a fixed point at `keep_tol`.
    pub fn with_set(mut self, set: FeasibleSet<T>, keep_tol: T) -> Result<Self> {
        if set.dim() != self.dim() {
            return Err(GviError::dims("feasible set", self.dim(), set.dim()));
        }
        self.set = set;
        if let Some(r) = self.reference.take() {
            if self.fixed_point_residual(T::one(), &r)? <= keep_tol {
                self.reference = Some(r);
            }
        }
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.set.dim()
    }

    pub fn couple(&self) -> &Couple<T> {
        &self.couple
    }

    pub fn set(&self) -> &FeasibleSet<T> {
        &self.set
    }

    pub fn reference(&self) -> Option<&Vector<T>> {
        self.reference.as_ref()
    }

    /// `|x - x†|` when the reference solution is known.
    pub fn error(&self, x: &Vector<T>) -> Option<T> {
        self.reference.as_ref().map(|r| x.distance(r))
    }

    /// `P_C(F x + αx − μ A x) − (F x + αx)`.
    pub fn regularized_residual(&self, alpha: T, mu: T, x: &Vector<T>) -> Result<Vector<T>> {
        check_alpha_mu(alpha, mu)?;
        x.ensure_dim(self.dim(), "regularized residual")?;
        let mut out = Vec::with_capacity(self.dim());
        self.field_into(alpha, mu, x.as_slice(), &mut out)?;
        Vector::checked(out, "regularized residual")
    }

    /// `|F x − P_C(F x − μ A x)|`.
    pub fn fixed_point_residual(&self, mu: T, x: &Vector<T>) -> Result<T> {
        check_alpha_mu(T::zero(), mu)?;
        x.ensure_dim(self.dim(), "fixed-point residual")?;
        self.fixed_point_residual_raw(mu, x.as_slice())
    }

    pub(crate) fn fixed_point_residual_raw(&self, mu: T, x: &[T]) -> Result<T> {
        let mut out = Vec::with_capacity(x.len());
        self.field_into(T::zero(), mu, x, &mut out)?;
        Ok(vector::norm(&out))
    }

    /// Writes the regularized field at `x` into `out`. Inputs are assumed
    /// validated; every stage is checked for non-finite values.
    pub(crate) fn field_into(&self, alpha: T, mu: T, x: &[T], out: &mut Vec<T>) -> Result<()> {
        let fx = self.couple.f.eval_raw(x);
        check_stage(&fx, x.len(), || format!("operator {}", self.couple.f.name()))?;
        let ax = self.couple.a.eval_raw(x);
        check_stage(&ax, x.len(), || format!("operator {}", self.couple.a.name()))?;
        // out <- F_α x, then project F_α x − μ A x into a scratch buffer.
        out.clear();
        out.extend(fx.iter().zip(x).map(|(&f, &xi)| f + alpha * xi));
        check_stage(out, x.len(), || "regularized map F + alpha*I".to_string())?;
        let mut proj: Vec<T> = out.iter().zip(&ax).map(|(&fa, &a)| fa - mu * a).collect();
        check_stage(&proj, x.len(), || "projection argument".to_string())?;
        self.set.project_in_place(&mut proj);
        check_stage(&proj, x.len(), || "projection".to_string())?;
        for (o, p) in out.iter_mut().zip(proj) {
            *o = p - *o;
        }
        check_stage(out, x.len(), || "regularized residual".to_string())
    }
}

fn check_alpha_mu<T: Scalar>(alpha: T, mu: T) -> Result<()> {
    if !(alpha >= T::zero()) || !alpha.is_finite() {
        return Err(GviError::Contract(format!(
            "alpha must be finite and nonnegative, got {alpha}"
        )));
    }
    if !(mu > T::zero()) || !mu.is_finite() {
        return Err(GviError::Contract(format!(
            "mu must be finite and positive, got {mu}"
        )));
    }
    Ok(())
}

fn check_stage<T: Scalar>(v: &[T], dim: usize, stage: impl Fn() -> String) -> Result<()> {
    if v.len() != dim {
        return Err(GviError::dims(stage(), dim, v.len()));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(GviError::non_finite(stage()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::Operator;

    /// A(x) = x, F(x) = 0, C = [-1, 1].
    fn interval_problem() -> GviProblem<f64> {
        let couple = Couple::new(
            Operator::identity(),
            Operator::new("zero", |x: &[f64]| vec![0.0; x.len()]).with_lipschitz(0.0),
        );
        GviProblem::new("interval", couple, FeasibleSet::cube(1, -1.0, 1.0).unwrap())
    }

    fn v(x: &[f64]) -> Vector<f64> {
        Vector::new(x.to_vec()).unwrap()
    }

    #[test]
    fn regularized_residual_hand_value() {
        // F_α x = αx = 1, so the field is P(1 - 1) - 1.
        let r = interval_problem()
            .regularized_residual(1.0, 1.0, &v(&[1.0]))
            .unwrap();
        assert_eq!(r.as_slice(), &[-1.0]);
    }

    #[test]
    fn fixed_point_residual_hand_value() {
        let r = interval_problem().fixed_point_residual(1.0, &v(&[0.5])).unwrap();
        assert_eq!(r, 0.5);
        assert_eq!(interval_problem().fixed_point_residual(1.0, &v(&[0.0])).unwrap(), 0.0);
    }

    #[test]
    fn parameter_contracts() {
        let p = interval_problem();
        let x = v(&[0.0]);
        assert!(matches!(p.regularized_residual(-1.0, 1.0, &x), Err(GviError::Contract(_))));
        assert!(matches!(p.fixed_point_residual(0.0, &x), Err(GviError::Contract(_))));
        assert!(matches!(
            p.fixed_point_residual(1.0, &v(&[0.0, 1.0])),
            Err(GviError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn overflow_names_stage() {
        let couple = Couple::new(
            Operator::new("huge", |x: &[f64]| x.iter().map(|_| f64::MAX).collect()),
            Operator::identity(),
        );
        let p = GviProblem::new("ovf", couple, FeasibleSet::unit_ball(1).unwrap());
        match p.regularized_residual(0.0, 4.0, &v(&[1.0])) {
            Err(GviError::NonFinite { stage }) => assert_eq!(stage, "projection argument"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reference_dimension_checked() {
        assert!(interval_problem().with_reference(v(&[0.0, 0.0])).is_err());
    }

    #[test]
    fn replacing_set_drops_invalid_reference() {
        let p = interval_problem().with_reference(v(&[0.0])).unwrap();
        let shifted = FeasibleSet::cube(1, 1.0, 2.0).unwrap();
        let p = p.with_set(shifted, 1e-12).unwrap();
        assert!(p.reference().is_none());
    }
}
