//! Integer-order Bessel functions of the first kind.
//!
//! `jn` picks one of three evaluation routes by argument size:
//!
//! * `x ≤ 1`: ascending power series (no cancellation in this range);
//! * `1 < x < 30`: Miller's downward recurrence normalised with
//!   `J₀ + 2 Σ J₂ₖ = 1`;
//! * `x ≥ 30`: Hankel asymptotics for `J₀`, `J₁`, upward recurrence for
//!   orders below `x`, downward recurrence matched at `⌊x⌋` above it.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

const SERIES_MAX_X: f64 = 1.0;
const ASYMPTOTIC_MIN_X: f64 = 30.0;
const RESCALE: f64 = 1e200;

pub const MAX_ORDER: i32 = 10_000;
pub const MAX_ARGUMENT: f64 = 1e6;

/// A single evaluation `J_ℓ(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselEval {
    pub order: i32,
    pub x: f64,
    pub value: f64,
}

impl BesselEval {
    pub fn new(order: i32, x: f64) -> Result<Self> {
        Ok(Self {
            order,
            x,
            value: bessel_j(order, x)?,
        })
    }
}

/// `J_order(x)` with domain checks.
pub fn bessel_j(order: i32, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("Bessel argument must be finite, got {x}")));
    }
    if order.abs() > MAX_ORDER || x.abs() > MAX_ARGUMENT {
        return Err(Error::Domain(format!(
            "Bessel J_{order}({x}) outside |order| ≤ {MAX_ORDER}, |x| ≤ {MAX_ARGUMENT:e}"
        )));
    }
    Ok(jn(order, x))
}

/// Unchecked `J_n(x)`. Returns NaN for non-finite `x`.
pub fn jn(n: i32, x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    let order = i64::from(n).unsigned_abs() as usize;
    let odd = order % 2 == 1;
    // J₋ₙ = (−1)ⁿ Jₙ and Jₙ(−x) = (−1)ⁿ Jₙ(x)
    let flips = odd as u8 * ((n < 0) as u8 + (x < 0.0) as u8);
    let value = jn_nonneg(order, x.abs());
    if flips % 2 == 1 {
        -value
    } else {
        value
    }
}

fn jn_nonneg(n: usize, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if x <= SERIES_MAX_X {
        series_small(n, x)
    } else if x < ASYMPTOTIC_MIN_X {
        miller_normalised(n, x)
    } else {
        large_argument(n, x)
    }
}

fn series_small(n: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for j in 1..=n {
        term *= half / j as f64;
        if term == 0.0 {
            return 0.0;
        }
    }
    let q = -half * half;
    let mut sum = term;
    let mut k = 0usize;
    loop {
        k += 1;
        term *= q / (k as f64 * (k + n) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            return sum;
        }
    }
}

fn start_order(n: usize, x: f64) -> usize {
    let top = n.max(x.ceil() as usize) as f64;
    let start = top + 20.0 + (40.0 * top).sqrt();
    2 * ((start as usize) / 2 + 1)
}

fn miller_normalised(n: usize, x: f64) -> f64 {
    let big_n = start_order(n, x);
    let two_over_x = 2.0 / x;
    let mut next = 0.0; // f[k+1]
    let mut cur = 1e-30; // f[k]
    let mut sum = 0.0;
    let mut target = if n == big_n { cur } else { 0.0 };
    for k in (1..=big_n).rev() {
        if k % 2 == 0 {
            sum += 2.0 * cur;
        }
        let prev = k as f64 * two_over_x * cur - next;
        next = cur;
        cur = prev;
        if k - 1 == n {
            target = cur;
        }
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            next /= RESCALE;
            sum /= RESCALE;
            target /= RESCALE;
        }
    }
    sum += cur;
    target / sum
}

/// Hankel expansion of `J_ν(x)` for ν ∈ {0, 1}.
fn hankel(nu: u8, x: f64) -> f64 {
    let mu = 4.0 * f64::from(nu * nu);
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut prev_mag = f64::INFINITY;
    for k in 1..200usize {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        let mag = term.abs();
        if mag > prev_mag || mag < 1e-18 {
            break;
        }
        prev_mag = mag;
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
    }
    let (s, c) = x.sin_cos();
    // χ = x − (ν/2 + 1/4)π expanded to avoid cancellation in the argument
    let (cos_chi, sin_chi) = if nu == 0 {
        ((c + s) * FRAC_1_SQRT_2, (s - c) * FRAC_1_SQRT_2)
    } else {
        ((s - c) * FRAC_1_SQRT_2, -(c + s) * FRAC_1_SQRT_2)
    };
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

fn large_argument(n: usize, x: f64) -> f64 {
    let j0 = hankel(0, x);
    if n == 0 {
        return j0;
    }
    let j1 = hankel(1, x);
    let turning = x.floor() as usize;
    let forward_to = n.min(turning + 1);
    let (mut lo, mut hi) = (j0, j1);
    for k in 1..forward_to {
        let nxt = 2.0 * k as f64 / x * hi - lo;
        lo = hi;
        hi = nxt;
    }
    if n <= turning + 1 {
        return hi;
    }
    // the loop stopped with (lo, hi) = (J_m, J_{m+1})
    let (m_val, m1_val) = (lo, hi);
    // n > ⌊x⌋ + 1: downward recurrence, matched on J_m and J_{m+1}, m = ⌊x⌋
    let big_n = start_order(n, x);
    let mut next = 0.0;
    let mut cur = 1e-30;
    let mut target = 0.0;
    let mut f_m1 = 0.0;
    for k in (turning + 1..=big_n).rev() {
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        if k - 1 == n {
            target = cur;
        }
        if k - 1 == turning + 1 {
            f_m1 = cur;
        }
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            next /= RESCALE;
            target /= RESCALE;
            f_m1 /= RESCALE;
        }
    }
    let f_m = cur;
    let scale = (m_val * f_m + m1_val * f_m1) / (f_m * f_m + f_m1 * f_m1);
    target * scale
}

// --- double-double arithmetic for the series oracle ---

#[derive(Debug, Clone, Copy)]
struct Dd(f64, f64);

impl Dd {
    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        Dd(s, (a - (s - bb)) + (b - bb))
    }
    fn add(self, o: Dd) -> Dd {
        let s = Dd::two_sum(self.0, o.0);
        let t = Dd::two_sum(self.1, o.1);
        let hi = Dd::two_sum(s.0, s.1 + t.0);
        Dd::two_sum(hi.0, hi.1 + t.1)
    }
    fn mul(self, o: Dd) -> Dd {
        let p = self.0 * o.0;
        let e = self.0.mul_add(o.0, -p);
        Dd::two_sum(p, e + self.0 * o.1 + self.1 * o.0)
    }
    fn div_f64(self, d: f64) -> Dd {
        let q1 = self.0 / d;
        // remainder self − q1·d, exact via fma
        let r = Dd::two_sum(self.0, -q1 * d).add(Dd(-q1.mul_add(d, -(q1 * d)), self.1));
        let q2 = r.0 / d;
        Dd::two_sum(q1, q2)
    }
    fn neg(self) -> Dd {
        Dd(-self.0, -self.1)
    }
}

/// Ascending-series `J_order(x)` in double-double arithmetic, summed until
/// the next term drops below `tol`. Independent of [`jn`]; meant for tests.
pub fn bessel_j_series_oracle(order: i32, x: f64, tol: f64) -> Result<f64> {
    if !(0..=20).contains(&order) || !(x.abs() <= 40.0) || !(tol > 0.0) {
        return Err(Error::Domain(format!(
            "series oracle needs 0 ≤ order ≤ 20, |x| ≤ 40, tol > 0 (got {order}, {x}, {tol})"
        )));
    }
    let n = order as usize;
    let half = Dd(0.5 * x, 0.0);
    let mut term = Dd(1.0, 0.0);
    for j in 1..=n {
        term = term.mul(half).div_f64(j as f64);
    }
    let q = half.mul(half).neg();
    let mut sum = term;
    let mut k = 0usize;
    // terms grow until k ≈ |x|/2, so only stop once past that peak
    loop {
        k += 1;
        term = term.mul(q).div_f64((k * (k + n)) as f64);
        sum = sum.add(term);
        if term.0.abs() < tol && (k as f64) > 0.5 * x.abs() {
            break;
        }
    }
    Ok(sum.0 + sum.1)
}
