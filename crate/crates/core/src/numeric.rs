//! Scalar special functions backing the statistical tests and the
//! power-law fitter: log-gamma, regularized incomplete gamma, the normal
//! and chi-square tail probabilities, and the Hurwitz zeta function.

/// Natural log of the gamma function (Lanczos approximation, g = 7).
pub(crate) fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 8] = [
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    debug_assert!(x > 0.0);
    if x < 0.5 {
        // Reflection keeps the approximation in its accurate range.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = 0.99999999999980993;
    for (i, c) in COEFFS.iter().enumerate() {
        acc += c / (x + i as f64 + 1.0);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized lower incomplete gamma P(a, x).
#[cfg(test)]
pub(crate) fn reg_gamma_p(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        gamma_series(a, x)
    } else {
        1.0 - gamma_cont_frac(a, x)
    }
}

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
pub(crate) fn reg_gamma_q(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_series(a, x)
    } else {
        gamma_cont_frac(a, x)
    }
}

const GAMMA_EPS: f64 = 1e-15;
const GAMMA_MAX_ITER: usize = 500;

fn gamma_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut sum = 1.0 / a;
    let mut del = sum;
    for _ in 0..GAMMA_MAX_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * GAMMA_EPS {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

fn gamma_cont_frac(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=GAMMA_MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < GAMMA_EPS {
            break;
        }
    }
    h * (-x + a * x.ln() - ln_gamma(a)).exp()
}

/// Standard normal upper-tail probability P(Z > z).
pub(crate) fn normal_sf(z: f64) -> f64 {
    let half_tail = 0.5 * reg_gamma_q(0.5, z * z / 2.0);
    if z >= 0.0 {
        half_tail
    } else {
        1.0 - half_tail
    }
}

/// Standard normal CDF P(Z <= z).
pub(crate) fn normal_cdf(z: f64) -> f64 {
    1.0 - normal_sf(z)
}

/// Chi-square upper-tail probability with `dof` degrees of freedom.
pub(crate) fn chi_square_sf(x: f64, dof: usize) -> f64 {
    debug_assert!(x >= 0.0 && dof >= 1);
    reg_gamma_q(dof as f64 / 2.0, x / 2.0)
}

/// Hurwitz zeta Σ_{k≥0} (q + k)^(-s) for s > 1, q > 0.
///
/// Direct summation up to a shifted base plus the Euler-Maclaurin tail
/// through the B6 term.
pub(crate) fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    debug_assert!(s > 1.0 && q > 0.0);
    const BASE: f64 = 18.0;
    let shift = if q >= BASE { 0 } else { (BASE - q).ceil() as usize };
    let mut sum = 0.0;
    for k in 0..shift {
        sum += (q + k as f64).powf(-s);
    }
    let m = q + shift as f64;
    let m_pow = m.powf(-s);
    sum += m * m_pow / (s - 1.0); // = m^(1-s) / (s-1)
    sum += 0.5 * m_pow;
    sum += s * m_pow / m / 12.0;
    sum -= s * (s + 1.0) * (s + 2.0) * m_pow / m.powi(3) / 720.0;
    sum += s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * m_pow / m.powi(5) / 30240.0;
    sum
}
