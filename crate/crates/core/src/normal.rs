//! Standard-normal primitives.
//!
//! `Φ` is built from Cephes-style rational approximations of `erf`/`erfc`
//! (relative error around 1e-16), with `exp(-x²)` evaluated by splitting `x`
//! to avoid error amplification in the tails. `Φ⁻¹` starts from Acklam's
//! rational approximation and is polished with two Halley steps against `Φ`.
//! Transcendentals go through `libm` so results do not depend on the platform
//! math library.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;
const MAXLOG: f64 = 7.097_827_128_933_84e2;

#[allow(clippy::excessive_precision)]
const ERF_T: [f64; 5] = [
    9.60497373987051638749e0,
    9.00260197203842689217e1,
    2.23200534594684319226e3,
    7.00332514112805075473e3,
    5.55923013010394962768e4,
];
#[allow(clippy::excessive_precision)]
const ERF_U: [f64; 5] = [
    3.35617141647503099647e1,
    5.21357949780152679795e2,
    4.59432382970980127987e3,
    2.26290000613890934246e4,
    4.92673942608635921086e4,
];
#[allow(clippy::excessive_precision)]
const ERFC_P: [f64; 9] = [
    2.46196981473530512524e-10,
    5.64189564831068821977e-1,
    7.46321056442269912687e0,
    4.86371970985681366614e1,
    1.96520832956077098242e2,
    5.26445194995477358631e2,
    9.34528527171957607540e2,
    1.02755188689515710272e3,
    5.57535335369399327526e2,
];
#[allow(clippy::excessive_precision)]
const ERFC_Q: [f64; 8] = [
    1.32281951154744992508e1,
    8.67072140885989742329e1,
    3.54937778887819891062e2,
    9.75708501743205489753e2,
    1.82390916687909736289e3,
    2.24633760818710981792e3,
    1.65666309194161350182e3,
    5.57535340817727675546e2,
];
#[allow(clippy::excessive_precision)]
const ERFC_R: [f64; 6] = [
    5.64189583547755073984e-1,
    1.27536670759978104416e0,
    5.01905042251180477414e0,
    6.16021097993053585195e0,
    7.40974269950448939160e0,
    2.97886665372100240670e0,
];
#[allow(clippy::excessive_precision)]
const ERFC_S: [f64; 6] = [
    2.26052863220117276590e0,
    9.39603524938001434673e0,
    1.20489539808096656605e1,
    1.70814450747565897222e1,
    9.60896809063285878198e0,
    3.36907645100081516050e0,
];

/// Horner evaluation, highest power first.
fn polevl(x: f64, coeffs: &[f64]) -> f64 {
    coeffs.iter().fold(0.0, |acc, &c| acc * x + c)
}

/// Horner evaluation with an implicit leading coefficient of one.
fn p1evl(x: f64, coeffs: &[f64]) -> f64 {
    coeffs.iter().fold(1.0, |acc, &c| acc * x + c)
}

/// `exp(-c·x²)` with `x` split as `m + f`, `m` a multiple of 1/128, so that
/// the large part `c·m²` is exact and rounding in `x²` is not amplified.
fn exp_neg_scaled_sq(x: f64, c: f64) -> f64 {
    const M: f64 = 128.0;
    let x = x.abs();
    let m = libm::floor(M * x + 0.5) / M;
    let f = x - m;
    let u = c * (m * m);
    let u1 = c * (2.0 * m * f + f * f);
    if u + u1 > MAXLOG {
        return 0.0;
    }
    libm::exp(-u) * libm::exp(-u1)
}

/// Error function.
pub fn erf(x: f64) -> f64 {
    if x.abs() > 1.0 {
        return (1.0 - upper_erfc(x.abs())).copysign(x);
    }
    let z = x * x;
    x * polevl(z, &ERF_T) / p1evl(z, &ERF_U)
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 1.0 {
        return 1.0 - erf(x);
    }
    let y = upper_erfc(ax);
    if x < 0.0 {
        2.0 - y
    } else {
        y
    }
}

/// `erfc(x)·exp(x²)` for `x >= 1`.
fn erfcx_ratio(x: f64) -> f64 {
    if x < 8.0 {
        polevl(x, &ERFC_P) / p1evl(x, &ERFC_Q)
    } else {
        polevl(x, &ERFC_R) / p1evl(x, &ERFC_S)
    }
}

/// `erfc(x)` for `x >= 1`.
fn upper_erfc(x: f64) -> f64 {
    if x * x > MAXLOG {
        return 0.0;
    }
    exp_neg_scaled_sq(x, 1.0) * erfcx_ratio(x)
}

/// Standard normal CDF `Φ(z)`. Saturates to exactly 0 or 1 in the far tails.
pub fn std_normal_cdf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    let x = z * FRAC_1_SQRT_2;
    if x.abs() < 1.0 {
        return 0.5 + 0.5 * erf(x);
    }
    // exp(-z²/2) is split on z itself; going through x = z/√2 would add
    // the rounding of x, amplified by x², to the tail.
    let tail = 0.5 * exp_neg_scaled_sq(z, 0.5) * erfcx_ratio(x.abs());
    if z > 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// Standard normal density.
pub fn std_normal_pdf(z: f64) -> f64 {
    libm::exp(-0.5 * z * z) / SQRT_2PI
}

/// Density of `N(mu, sigma²)` at `x`.
pub fn normal_pdf(x: f64, mu: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::Domain {
            what: "sigma",
            value: sigma,
        });
    }
    Ok(std_normal_pdf((x - mu) / sigma) / sigma)
}

/// `ln N(x | mu, sigma²)`; finite for any finite `x`.
pub fn normal_log_pdf(x: f64, mu: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::Domain {
            what: "sigma",
            value: sigma,
        });
    }
    let z = (x - mu) / sigma;
    Ok(-0.5 * z * z - libm::log(sigma) - 0.5 * libm::log(2.0 * PI))
}

#[allow(clippy::excessive_precision)]
fn acklam(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = libm::sqrt(-2.0 * libm::log(p));
        polevl(q, &C) / p1evl_desc(q, &D)
    } else {
        let q = p - 0.5;
        let r = q * q;
        polevl(r, &A) * q / p1evl_desc(r, &B)
    }
}

/// `c0 x^n + ... + c_{n-1} x + 1`.
fn p1evl_desc(x: f64, coeffs: &[f64]) -> f64 {
    polevl(x, coeffs) * x + 1.0
}

/// Inverse of `Φ` on `(0, 0.5]`.
fn lower_quantile(p: f64) -> f64 {
    if p == 0.5 {
        return 0.0;
    }
    let mut z = acklam(p);
    for _ in 0..2 {
        let e = std_normal_cdf(z) - p;
        let u = e / std_normal_pdf(z);
        if !u.is_finite() {
            break;
        }
        z -= u / (1.0 + 0.5 * z * u);
    }
    z
}

/// Standard normal quantile `Φ⁻¹(p)` for `0 < p < 1`.
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain {
            what: "probability",
            value: p,
        });
    }
    Ok(if p <= 0.5 {
        lower_quantile(p)
    } else {
        -lower_quantile(1.0 - p)
    })
}

/// Probit transform used on DET axes. Caller guarantees `0 < p < 1`.
pub(crate) fn probit(p: f64) -> f64 {
    std_normal_quantile(p).unwrap_or(f64::NAN)
}
