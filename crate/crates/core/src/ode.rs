//! Explicit Dormand–Prince 5(4) integrator with embedded error control and
//! uniform output from the method's fourth-order continuous extension.

use crate::error::GviError;
use crate::scalar::Scalar;

/// Integrator settings shared by the continuous solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl<T> {
    pub rtol: T,
    pub atol: T,
    /// A rejected step that would shrink below this aborts the run.
    pub min_step: T,
    pub max_step: T,
    /// Final error (or residual when `x†` is unknown) at or below which a
    /// run is flagged converged.
    pub target_accuracy: T,
    /// Spacing of emitted samples.
    pub output_dt: T,
}

impl<T: Scalar> Default for StepControl<T> {
    fn default() -> Self {
        StepControl {
            rtol: T::lit(1e-8),
            atol: T::lit(1e-10),
            min_step: T::lit(1e-12),
            max_step: T::lit(0.1),
            target_accuracy: T::lit(1e-3),
            output_dt: T::lit(0.1),
        }
    }
}

impl<T: Scalar> StepControl<T> {
    pub(crate) fn validate(&self) -> Result<(), GviError> {
        let positive = [
            ("rtol", self.rtol),
            ("min_step", self.min_step),
            ("max_step", self.max_step),
            ("output_dt", self.output_dt),
        ];
        for (name, v) in positive {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(GviError::Contract(format!(
                    "step control {name} must be positive, got {v}"
                )));
            }
        }
        if !(self.atol >= T::zero()) || !(self.target_accuracy >= T::zero()) {
            return Err(GviError::Contract(
                "step control atol and target_accuracy must be nonnegative".into(),
            ));
        }
        if self.min_step > self.max_step {
            return Err(GviError::Contract("min_step exceeds max_step".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evaluations: usize,
}

#[derive(Debug)]
pub(crate) enum OdeFailure<T> {
    Stall { t: T, step: T },
    Rhs { t: T, error: GviError },
    Output(GviError),
}

// Dormand–Prince tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
// Fifth-order minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
// Continuous extension weights.
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// Integrates `y' = rhs(t, y)` on `[0, t_end]`, calling `emit` at every
/// multiple of `output_dt` below `t_end` and at `t_end` itself.
pub(crate) fn integrate<T, R, O>(
    mut rhs: R,
    y0: &[T],
    t_end: T,
    control: &StepControl<T>,
    mut emit: O,
) -> Result<StepStats, OdeFailure<T>>
where
    T: Scalar,
    R: FnMut(T, &[T], &mut Vec<T>) -> Result<(), GviError>,
    O: FnMut(T, &[T]) -> Result<(), GviError>,
{
    let n = y0.len();
    let c = |v: f64| T::lit(v);
    let mut stats = StepStats::default();
    let mut eval = |t: T, y: &[T], out: &mut Vec<T>, stats: &mut StepStats| {
        stats.rhs_evaluations += 1;
        rhs(t, y, out).map_err(|error| OdeFailure::Rhs { t, error })
    };

    let mut t = T::zero();
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<T>> = (0..7).map(|_| Vec::with_capacity(n)).collect();
    eval(t, &y, &mut k[0], &mut stats)?;

    emit(t, &y).map_err(OdeFailure::Output)?;
    let mut next_output = 1usize;
    let output_time = |i: usize| T::from_count(i) * control.output_dt;
    // Output grid points closer than this to t_end are merged into t_end.
    let merge_tol = control.output_dt * c(1e-9);

    let mut h = initial_step(&mut eval, &y, &k[0], t_end, control, &mut stats)?;
    let mut stage = vec![T::zero(); n];
    let mut y_new = vec![T::zero(); n];

    while t < t_end {
        let remaining = t_end - t;
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        // Stages 2..=7; stage 7 evaluates at the fifth-order solution (FSAL).
        let rows: [&[f64]; 5] = [&A2, &A3, &A4, &A5, &A6];
        for (s, row) in rows.iter().enumerate() {
            for i in 0..n {
                let mut acc = T::zero();
                for (j, &a) in row.iter().enumerate() {
                    acc = acc + c(a) * k[j][i];
                }
                stage[i] = y[i] + h * acc;
            }
            eval(t + c(C[s + 1]) * h, &stage, &mut k[s + 1], &mut stats)?;
        }
        for i in 0..n {
            let mut acc = T::zero();
            for (j, &b) in B.iter().enumerate() {
                acc = acc + c(b) * k[j][i];
            }
            y_new[i] = y[i] + h * acc;
        }
        eval(t + h, &y_new, &mut k[6], &mut stats)?;

        let mut sum = T::zero();
        for i in 0..n {
            let mut e = T::zero();
            for (j, &ej) in E.iter().enumerate() {
                e = e + c(ej) * k[j][i];
            }
            let scale = control.atol + control.rtol * y[i].abs().max(y_new[i].abs());
            let r = h * e / scale;
            sum = sum + r * r;
        }
        let err = (sum / T::from_count(n)).sqrt();

        if err <= T::one() {
            stats.accepted += 1;
            let t_new = if last { t_end } else { t + h };
            loop {
                let to = output_time(next_output);
                if to >= t_end - merge_tol {
                    break;
                }
                if to > t_new {
                    break;
                }
                let out = if to == t_new {
                    y_new.clone()
                } else {
                    dense_output(t, h, &y, &y_new, &k, to)
                };
                emit(to, &out).map_err(OdeFailure::Output)?;
                next_output += 1;
            }
            t = t_new;
            std::mem::swap(&mut y, &mut y_new);
            k.swap(0, 6);
            if last {
                emit(t_end, &y).map_err(OdeFailure::Output)?;
                break;
            }
            let fac = if err == T::zero() {
                c(5.0)
            } else {
                (c(0.9) * err.powf(c(-0.2))).min(c(5.0)).max(c(0.2))
            };
            h = (h * fac).min(control.max_step);
        } else {
            stats.rejected += 1;
            let fac = (c(0.9) * err.powf(c(-0.2))).max(c(0.1)).min(c(1.0));
            let proposed = h * fac;
            if proposed < control.min_step {
                return Err(OdeFailure::Stall { t, step: proposed });
            }
            h = proposed;
        }
    }
    Ok(stats)
}

/// Starting step from the usual two-derivative-estimate heuristic.
fn initial_step<T: Scalar, E>(
    eval: &mut E,
    y: &[T],
    f0: &[T],
    t_end: T,
    control: &StepControl<T>,
    stats: &mut StepStats,
) -> Result<T, OdeFailure<T>>
where
    E: FnMut(T, &[T], &mut Vec<T>, &mut StepStats) -> Result<(), OdeFailure<T>>,
{
    let c = |v: f64| T::lit(v);
    let n = T::from_count(y.len());
    let scale: Vec<T> = y.iter().map(|v| control.atol + control.rtol * v.abs()).collect();
    let rms = |v: &[T]| {
        (v.iter()
            .zip(&scale)
            .map(|(&a, &s)| (a / s) * (a / s))
            .sum::<T>()
            / n)
            .sqrt()
    };
    let d0 = rms(y);
    let d1 = rms(f0);
    let h0 = if d0 < c(1e-5) || d1 < c(1e-5) {
        c(1e-6)
    } else {
        c(0.01) * d0 / d1
    };
    let h0 = h0.min(control.max_step).min(t_end);
    let y1: Vec<T> = y.iter().zip(f0).map(|(&a, &f)| a + h0 * f).collect();
    let mut f1 = Vec::with_capacity(y.len());
    eval(h0, &y1, &mut f1, stats)?;
    let diff: Vec<T> = f1.iter().zip(f0).map(|(&a, &b)| a - b).collect();
    let d2 = rms(&diff) / h0;
    let h1 = if d1.max(d2) <= c(1e-15) {
        (h0 * c(1e-3)).max(c(1e-6))
    } else {
        (c(0.01) / d1.max(d2)).powf(c(0.2))
    };
    Ok((c(100.0) * h0)
        .min(h1)
        .min(control.max_step)
        .max(control.min_step))
}

/// Dense output on the accepted step `[t0, t0 + h]` evaluated at `t`.
fn dense_output<T: Scalar>(t0: T, h: T, y0: &[T], y1: &[T], k: &[Vec<T>], t: T) -> Vec<T> {
    let theta = (t - t0) / h;
    let theta1 = T::one() - theta;
    (0..y0.len())
        .map(|i| {
            let diff = y1[i] - y0[i];
            let r3 = h * k[0][i] - diff;
            let r4 = diff - h * k[6][i] - r3;
            let r5 = h * D.iter().zip(k).map(|(&d, ki)| T::lit(d) * ki[i]).sum::<T>();
            y0[i] + theta * (diff + theta1 * (r3 + theta * (r4 + theta1 * r5)))
        })
        .collect()
}
