//! Embedded Dormand–Prince 5(4) integrator for small complex systems.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Error-control settings. Both tolerances apply component-wise.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Tolerance {
    pub fn uniform(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            max_steps: 50_000_000,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth- minus fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

type Vector<const N: usize> = [Complex64; N];

fn axpy<const N: usize>(y: &Vector<N>, terms: &[(f64, &Vector<N>)], h: f64) -> Vector<N> {
    let mut out = *y;
    for (coef, k) in terms {
        for i in 0..N {
            out[i] += k[i] * (h * coef);
        }
    }
    out
}

/// Stepper state carried between segments so sampled integration does not
/// restart the step-size controller at each sample.
pub struct DormandPrince<F, const N: usize> {
    rhs: F,
    tol: Tolerance,
    h: f64,
    steps: usize,
}

impl<F, const N: usize> DormandPrince<F, N>
where
    F: Fn(f64, &Vector<N>) -> Vector<N>,
{
    pub fn new(rhs: F, tol: Tolerance) -> Self {
        Self {
            rhs,
            tol,
            h: 0.0,
            steps: 0,
        }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Advances `y` from `x0` to `x1` (either direction).
    pub fn advance(&mut self, x0: f64, y: Vector<N>, x1: f64) -> Result<Vector<N>> {
        let span = x1 - x0;
        if span == 0.0 {
            return Ok(y);
        }
        let dir = span.signum();
        if self.h == 0.0 {
            self.h = (0.01 * span.abs()).clamp(1e-6, 0.1);
        }
        let mut x = x0;
        let mut y = y;
        let mut k1 = (self.rhs)(x, &y);
        loop {
            let remaining = (x1 - x) * dir;
            if remaining <= 0.0 {
                return Ok(y);
            }
            let last = self.h >= remaining;
            let h = dir * if last { remaining } else { self.h };
            let min_h = 1e-14 * x.abs().max(1.0);
            if h.abs() < min_h {
                return Err(Error::StepUnderflow(x));
            }

            let f = &self.rhs;
            let k2 = f(x + C2 * h, &axpy(&y, &[(A21, &k1)], h));
            let k3 = f(x + C3 * h, &axpy(&y, &[(A31, &k1), (A32, &k2)], h));
            let k4 = f(x + C4 * h, &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h));
            let k5 = f(
                x + C5 * h,
                &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h),
            );
            let k6 = f(
                x + h,
                &axpy(&y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], h),
            );
            let y_new = axpy(&y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], h);
            let k7 = f(x + h, &y_new);

            let mut err: f64 = 0.0;
            for i in 0..N {
                let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
                let scale = self.tol.atol + self.tol.rtol * y[i].norm().max(y_new[i].norm());
                err = err.max(e.norm() / scale);
            }

            self.steps += 1;
            if self.steps > self.tol.max_steps {
                return Err(Error::StepUnderflow(x));
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err <= 1.0 {
                x = if last { x1 } else { x + h };
                y = y_new;
                k1 = k7;
                // keep the controller's step, not the truncated last one
                if !last {
                    self.h = h.abs() * factor;
                }
            } else {
                self.h = h.abs() * factor.min(1.0);
            }
        }
    }
}
