//! Log-gamma, gamma, digamma and polygamma on the complex plane.
//!
//! Everything goes through one Stirling series evaluated at |z| ≥ 15 with
//! Re z ≥ 0; smaller arguments are pushed up with the recurrence
//! `ln Γ(z) = ln Γ(z + n) − Σ ln(z + k)`. Summing principal logarithms gives
//! the analytic continuation of ln Γ on ℂ \ (−∞, 0]; on the negative real axis
//! the value is the limit from the upper half-plane.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Stirling threshold on |z|.
const STIRLING_RADIUS: f64 = 15.0;

/// Pole tolerance shared with the Barnes lattice checks.
pub const POLE_TOL: f64 = 1e-9;

/// B_{2k} / (2k (2k − 1)), k = 1..=10.
const STIRLING_COEFFS: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

/// Even Bernoulli numbers B_2, B_4, …, B_24.
pub(crate) const BERNOULLI_EVEN: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174_611.0 / 330.0,
    854_513.0 / 138.0,
    -236_364_091.0 / 2730.0,
];

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im.abs() < POLE_TOL && z.re < POLE_TOL && (z.re - z.re.round()).abs() < POLE_TOL
}

fn stirling(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING_COEFFS {
        let term = pow * c;
        series += term;
        if term.norm() < 1e-18 * series.norm() {
            break;
        }
        pow *= inv2;
    }
    (z - 0.5) * z.ln() - z + LN_SQRT_2PI + series
}

/// Principal-branch-continuous ln Γ(z).
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("ln_gamma of non-finite {z}")));
    }
    if is_nonpositive_integer(z) {
        return Err(Error::Pole { what: "gamma", z });
    }
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.re < 0.0 || w.norm() < STIRLING_RADIUS {
        shift += w.ln();
        w += 1.0;
    }
    Ok(stirling(w) - shift)
}

/// Γ(z).
pub fn gamma(z: Complex64) -> Result<Complex64> {
    Ok(ln_gamma(z)?.exp())
}

/// 1/Γ(z), zero at the poles of Γ.
pub fn rgamma(z: Complex64) -> Complex64 {
    match ln_gamma(z) {
        Ok(l) => (-l).exp(),
        Err(_) => Complex64::new(0.0, 0.0),
    }
}

/// ln |Γ(x)| and the sign of Γ(x) for real x.
pub fn ln_gamma_real(x: f64) -> Result<(f64, f64)> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("ln_gamma of non-finite {x}")));
    }
    if x <= POLE_TOL && (x - x.round()).abs() < POLE_TOL {
        return Err(Error::Pole {
            what: "gamma",
            z: Complex64::new(x, 0.0),
        });
    }
    if x < 0.5 {
        // reflection
        let s = (PI * x).sin();
        let (l, sg) = ln_gamma_real(1.0 - x)?;
        return Ok((PI.ln() - s.abs().ln() - l, sg * s.signum()));
    }
    let mut w = x;
    let mut shift = 0.0;
    while w < STIRLING_RADIUS {
        shift += w.ln();
        w += 1.0;
    }
    Ok((stirling(Complex64::new(w, 0.0)).re - shift, 1.0))
}

/// Γ(x) for real x.
pub fn gamma_real(x: f64) -> Result<f64> {
    let (l, s) = ln_gamma_real(x)?;
    Ok(s * l.exp())
}

/// 1/Γ(x) for real x; exactly zero at nonpositive integers.
pub fn rgamma_real(x: f64) -> f64 {
    match ln_gamma_real(x) {
        Ok((l, s)) => s * (-l).exp(),
        Err(_) => 0.0,
    }
}

/// Rising factorial (a)_k = Γ(a + k)/Γ(a) for integer k of either sign.
///
/// Products are used for |k| ≤ 64, gamma ratios beyond.
pub fn pochhammer(a: f64, k: i64) -> Result<f64> {
    if k == 0 {
        return Ok(1.0);
    }
    let check = |x: f64| {
        if x <= POLE_TOL && (x - x.round()).abs() < POLE_TOL {
            Err(Error::Pole {
                what: "pochhammer",
                z: Complex64::new(x, 0.0),
            })
        } else {
            Ok(())
        }
    };
    check(a)?;
    check(a + k as f64)?;
    if k.unsigned_abs() <= 64 {
        let mut p = 1.0;
        if k > 0 {
            for j in 0..k {
                p *= a + j as f64;
            }
        } else {
            for j in 1..=(-k) {
                p /= a - j as f64;
            }
        }
        return Ok(p);
    }
    let (la, sa) = ln_gamma_real(a)?;
    let (lb, sb) = ln_gamma_real(a + k as f64)?;
    Ok(sa * sb * (lb - la).exp())
}

/// Digamma ψ(z).
pub fn digamma(z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(z) {
        return Err(Error::Pole { what: "digamma", z });
    }
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.re < 0.0 || w.norm() < STIRLING_RADIUS {
        shift += w.inv();
        w += 1.0;
    }
    Ok(digamma_asymptotic(w) - shift)
}

fn digamma_asymptotic(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut acc = z.ln() - inv * 0.5;
    let mut pow = inv2;
    for (k, b) in BERNOULLI_EVEN.iter().enumerate().take(10) {
        let term = pow * (b / (2.0 * (k + 1) as f64));
        acc -= term;
        if term.norm() < 1e-18 * acc.norm() {
            break;
        }
        pow *= inv2;
    }
    acc
}

/// Polygamma ψ^{(m)}(z) for m ≥ 1.
pub fn polygamma(m: u32, z: Complex64) -> Result<Complex64> {
    if m == 0 {
        return digamma(z);
    }
    if is_nonpositive_integer(z) {
        return Err(Error::Pole {
            what: "polygamma",
            z,
        });
    }
    // ψ^{(m)}(z) = ψ^{(m)}(z + 1) + (−1)^{m+1} m! / z^{m+1}
    let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
    let mfact: f64 = (1..=m).map(f64::from).product();
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.re < 0.0 || w.norm() < STIRLING_RADIUS + f64::from(m) {
        shift += w.powi(-(m as i32) - 1) * (sign * mfact);
        w += 1.0;
    }
    Ok(polygamma_asymptotic(m, w) + shift)
}

/// Asymptotic polygamma for large |z|, m ≥ 1.
pub(crate) fn polygamma_asymptotic(m: u32, z: Complex64) -> Complex64 {
    let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
    let fact = |n: u32| -> f64 { (1..=n).map(f64::from).product() };
    let inv = z.inv();
    let mut acc = inv.powi(m as i32) * fact(m - 1) + inv.powi(m as i32 + 1) * (fact(m) * 0.5);
    let inv2 = inv * inv;
    let mut pow = inv.powi(m as i32 + 2);
    for (k, b) in BERNOULLI_EVEN.iter().enumerate() {
        let two_k = 2 * (k as u32 + 1);
        // B_{2k} (2k + m − 1)! / (2k)!
        let mut coeff = *b;
        for j in (two_k + 1)..=(two_k + m - 1) {
            coeff *= f64::from(j);
        }
        let term = pow * coeff;
        acc += term;
        if term.norm() < 1e-18 * acc.norm() {
            break;
        }
        pow *= inv2;
    }
    acc * sign
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn log_gamma_reference_values() {
        assert!(ln_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-14);
        assert!(ln_gamma(c(2.0, 0.0)).unwrap().norm() < 1e-14);
        let half = ln_gamma(c(0.5, 0.0)).unwrap();
        assert!((half.re - 0.572_364_942_924_700_1).abs() < 1e-14);
        // 50-digit mpmath values
        let cases = [
            (c(3.0, 4.0), c(-1.756_626_784_603_784_1, 4.742_664_438_034_658)),
            (c(-2.5, 0.3), c(-0.432_088_892_613_201_9, -9.093_345_421_289_741)),
            (c(0.2, -7.0), c(-10.660_245_035_487_833, -6.149_654_062_087_331)),
            (c(800.0, 300.0), c(4490.232_554_072_780, 2011.957_088_603_437_1)),
        ];
        for (z, want) in cases {
            let got = ln_gamma(z).unwrap();
            assert!(
                (got - want).norm() <= 1e-13 * want.norm().max(1.0),
                "ln_gamma({z}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn negative_real_axis_matches_modulus() {
        // mpmath: ln|Γ(−150.7)| = −607.174841437675247...
        let got = ln_gamma(c(-150.7, 0.0)).unwrap();
        assert!((got.re + 607.174_841_437_675_2).abs() < 1e-10);
        let (l, s) = ln_gamma_real(-150.7).unwrap();
        assert!((l + 607.174_841_437_675_2).abs() < 1e-10);
        // Γ(−150.7): 151 negative factors below the shift
        assert_eq!(s, -1.0);
    }

    #[test]
    fn poles_raise() {
        for k in 0..5 {
            assert!(matches!(
                ln_gamma(c(-(k as f64), 0.0)),
                Err(Error::Pole { .. })
            ));
            assert!(ln_gamma_real(-(k as f64)).is_err());
            assert_eq!(rgamma_real(-(k as f64)), 0.0);
        }
    }

    #[test]
    fn recurrence_on_grid() {
        for i in -8..=8 {
            for j in -6..=6 {
                let z = c(0.37 + 0.9 * i as f64, 1.3 * j as f64 + 0.05);
                let lhs = ln_gamma(z + 1.0).unwrap() - ln_gamma(z).unwrap() - z.ln();
                // equality modulo 2πi
                let k = (lhs.im / (2.0 * PI)).round();
                let resid = lhs - Complex64::new(0.0, 2.0 * PI * k);
                assert!(resid.norm() <= 1e-12 * (1.0 + z.norm()), "{z}: {resid}");
            }
        }
    }

    #[test]
    fn real_and_complex_agree() {
        for &x in &[0.1, 0.5, 1.7, 3.3, 14.9, 15.1, 40.0, 171.5, -0.3, -4.6] {
            let (l, s) = ln_gamma_real(x).unwrap();
            let g = gamma(c(x, 0.0)).unwrap();
            assert!((g.re - s * l.exp()).abs() <= 1e-13 * g.norm());
        }
    }

    #[test]
    fn pochhammer_values() {
        assert_eq!(pochhammer(1.5, 2).unwrap(), 3.75);
        assert_eq!(pochhammer(0.3, 0).unwrap(), 1.0);
        // Γ(6.25)/Γ(1.25) by product and by gamma ratio
        let direct = pochhammer(1.25, 5).unwrap();
        assert!((direct - 203.950_195_312_5).abs() < 1e-11);
        let (a, _) = ln_gamma_real(6.25).unwrap();
        let (b, _) = ln_gamma_real(1.25).unwrap();
        assert!((direct - (a - b).exp()).abs() < 1e-11);
        // negative order: (a)_{-2} = 1/((a−1)(a−2))
        assert!((pochhammer(3.5, -2).unwrap() - 1.0 / (2.5 * 1.5)).abs() < 1e-15);
        assert!(pochhammer(1.0, -1).is_err());
        // long products switch to gamma ratios
        let long = pochhammer(0.5, 100).unwrap();
        let (l1, _) = ln_gamma_real(100.5).unwrap();
        let (l0, _) = ln_gamma_real(0.5).unwrap();
        assert!((long / (l1 - l0).exp() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn digamma_and_polygamma() {
        // ψ(1) = −γ, ψ'(1) = π²/6, ψ''(1) = −2ζ(3)
        let euler = 0.577_215_664_901_532_9;
        assert!((digamma(c(1.0, 0.0)).unwrap().re + euler).abs() < 1e-14);
        assert!((polygamma(1, c(1.0, 0.0)).unwrap().re - PI * PI / 6.0).abs() < 1e-13);
        assert!((polygamma(2, c(1.0, 0.0)).unwrap().re + 2.0 * 1.202_056_903_159_594_2).abs() < 1e-12);
        // ψ(z+1) − ψ(z) = 1/z
        let z = c(-2.3, 1.1);
        let d = digamma(z + 1.0).unwrap() - digamma(z).unwrap() - z.inv();
        assert!(d.norm() < 1e-13);
    }
}
