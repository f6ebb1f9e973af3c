//! Tanh-sinh quadrature with abscissas built from their distance to the
//! nearest endpoint, so integrable endpoint singularities keep full precision.

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_LEVEL: usize = 9;
const T_MAX: f64 = 6.6;

/// ∫_a^b f for complex-valued f; `tol` is relative with an absolute floor of tol·1e−3.
pub fn integrate_complex<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, tol: f64) -> Result<Complex64> {
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!("quadrature needs a finite interval, got [{a}, {b}]")));
    }
    let half = 0.5 * (b - a);
    let eval = |x: f64| {
        let v = f(x);
        if v.re.is_finite() && v.im.is_finite() {
            v
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    // contribution of the node pair at parameter t
    let pair = |t: f64| -> Complex64 {
        let u = std::f64::consts::FRAC_PI_2 * t.sinh();
        let e = (-2.0 * u.abs()).exp();
        // distance from the nearer endpoint, and the weight dx/dt
        let dist = 2.0 * half * e / (1.0 + e);
        let cosh_u = u.cosh();
        let w = half * std::f64::consts::FRAC_PI_2 * t.cosh() / (cosh_u * cosh_u);
        if w == 0.0 || dist == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let (left, right) = (a + dist, b - dist);
        let mut acc = Complex64::new(0.0, 0.0);
        if left > a && left < b {
            acc += eval(left);
        }
        if right < b && right > a {
            acc += eval(right);
        }
        acc * w
    };
    let mut h = 1.0;
    let mut sum = eval(a + half) * (half * std::f64::consts::FRAC_PI_2);
    let mut k = 1;
    while (k as f64) * h <= T_MAX {
        sum += pair(k as f64 * h);
        k += 1;
    }
    let mut estimate = sum * h;
    let mut delta = f64::INFINITY;
    for _ in 0..MAX_LEVEL {
        h *= 0.5;
        let mut k = 1;
        while (k as f64) * h <= T_MAX {
            sum += pair(k as f64 * h);
            k += 2;
        }
        let next = sum * h;
        delta = (next - estimate).norm();
        estimate = next;
        if delta <= tol * estimate.norm().max(1e-3) {
            return Ok(estimate);
        }
    }
    if delta <= 1e3 * tol * estimate.norm().max(1e-3) {
        return Ok(estimate);
    }
    Err(Error::Integration {
        what: format!("quadrature on [{a}, {b}]"),
        residual: delta,
    })
}

/// ∫_a^b f.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    Ok(integrate_complex(|x| Complex64::new(f(x), 0.0), a, b, tol)?.re)
}

/// ∫_a^∞ f for complex f, via y = a + 1 + s/(1 − s) beyond a + 1.
pub fn integrate_complex_to_infinity<F: Fn(f64) -> Complex64>(f: F, a: f64, tol: f64) -> Result<Complex64> {
    let head = integrate_complex(&f, a, a + 1.0, tol)?;
    let tail = integrate_complex(
        |s| {
            let w = 1.0 - s;
            if w <= 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            f(a + 1.0 + s / w) / (w * w)
        },
        0.0,
        1.0,
        tol,
    )?;
    Ok(head + tail)
}

/// ∫_a^∞ f.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, tol: f64) -> Result<f64> {
    Ok(integrate_complex_to_infinity(|x| Complex64::new(f(x), 0.0), a, tol)?.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_tail() {
        let v = integrate_to_infinity(|y| (-2.0 * y).exp(), 0.5, 1e-12).unwrap();
        assert!((v - (-1.0f64).exp() / 2.0).abs() < 1e-13);
    }

    #[test]
    fn endpoint_singularities() {
        let v = integrate(|y| y.powf(-0.5), 0.0, 1.0, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-12, "{v}");
        let v = integrate(|y| y.powf(-0.9), 0.0, 1.0, 1e-12).unwrap();
        assert!((v - 10.0).abs() < 1e-9, "{v}");
        let v = integrate(|y| (1.0 - y).ln(), 0.0, 1.0, 1e-12).unwrap();
        assert!((v + 1.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn smooth_polynomial() {
        let v = integrate(|y| y * y, -1.0, 2.0, 1e-13).unwrap();
        assert!((v - 3.0).abs() < 1e-13);
    }
}
