//! Adaptive Gauss–Kronrod (7/15) integration of Gaussian expectations.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Integration width in standard deviations on each side of the mean.
pub const TRUNCATION_SIGMAS: f64 = 10.0;
const INITIAL_PANELS: usize = 20;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
// Gauss weights at XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Tolerances for [`expect_under_normal`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 1_000_000,
        }
    }
}

impl Quadrature {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(abs_tol > 0.0) {
            return Err(Error::Domain {
                what: "absolute tolerance",
                value: abs_tol,
            });
        }
        if !(rel_tol > 0.0) {
            return Err(Error::Domain {
                what: "relative tolerance",
                value: rel_tol,
            });
        }
        if max_subdivisions == 0 {
            return Err(Error::Domain {
                what: "max subdivisions",
                value: 0.0,
            });
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        })
    }

    pub fn abs_tol(&self) -> f64 {
        self.abs_tol
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn max_subdivisions(&self) -> usize {
        self.max_subdivisions
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then(other.lo.total_cmp(&self.lo))
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Panel {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Panel {
        lo,
        hi,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integrates `f` over `[lo, hi]` adaptively, bisecting the panel with the
/// largest error estimate until the total estimate meets the tolerances.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, q: &Quadrature) -> Result<f64> {
    let width = (hi - lo) / INITIAL_PANELS as f64;
    let mut heap: BinaryHeap<Panel> = (0..INITIAL_PANELS)
        .map(|i| {
            let a = lo + width * i as f64;
            let b = if i + 1 == INITIAL_PANELS {
                hi
            } else {
                lo + width * (i + 1) as f64
            };
            kronrod15(&f, a, b)
        })
        .collect();

    let totals = |heap: &BinaryHeap<Panel>| {
        let mut panels: Vec<&Panel> = heap.iter().collect();
        panels.sort_by(|x, y| x.lo.total_cmp(&y.lo));
        panels
            .iter()
            .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
    };

    let mut subdivisions = 0;
    loop {
        let (value, error) = totals(&heap);
        if !value.is_finite() {
            return Err(Error::Quadrature {
                estimate: value,
                error,
            });
        }
        if error <= q.abs_tol.max(q.rel_tol * value.abs()) {
            return Ok(value);
        }
        if subdivisions >= q.max_subdivisions {
            return Err(Error::Quadrature {
                estimate: value,
                error,
            });
        }
        // Re-summing every step is quadratic; only do it every few splits.
        for _ in 0..heap.len().clamp(1, 64) {
            let worst = heap.pop().expect("heap is never empty");
            let mid = 0.5 * (worst.lo + worst.hi);
            if mid <= worst.lo || mid >= worst.hi {
                // Cannot split further in floating point.
                heap.push(Panel {
                    error: 0.0,
                    ..worst
                });
                continue;
            }
            heap.push(kronrod15(&f, worst.lo, mid));
            heap.push(kronrod15(&f, mid, worst.hi));
            subdivisions += 1;
            if subdivisions >= q.max_subdivisions {
                break;
            }
        }
    }
}

/// `E[f(X)]` for `X ~ N(mu, sigma²)`, integrating over `mu ± 10σ`.
///
/// With `sigma = 0` the distribution is a point mass and the result is `f(mu)`.
pub fn expect_under_normal<F: Fn(f64) -> f64>(
    f: F,
    mu: f64,
    sigma: f64,
    q: &Quadrature,
) -> Result<f64> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::Domain {
            what: "sigma",
            value: sigma,
        });
    }
    if sigma == 0.0 {
        return Ok(f(mu));
    }
    let density = |x: f64| {
        let z = (x - mu) / sigma;
        libm::exp(-0.5 * z * z) / (sigma * 2.506_628_274_631_000_5)
    };
    integrate(
        |x| density(x) * f(x),
        mu - TRUNCATION_SIGMAS * sigma,
        mu + TRUNCATION_SIGMAS * sigma,
        q,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_mean_and_variance() {
        let q = Quadrature::default();
        for (mu, sigma) in [(0.0, 1.0), (3.0, 2.0), (-7.5, 0.01), (100.0, 30.0)] {
            let one = expect_under_normal(|_| 1.0, mu, sigma, &q).unwrap();
            assert!((one - 1.0).abs() < 1e-10, "{mu} {sigma}");
        }
        let m = expect_under_normal(|x| x, 3.0, 2.0, &q).unwrap();
        assert!((m - 3.0).abs() < 1e-10);
        let v = expect_under_normal(|x| x * x, 0.0, 2.0, &q).unwrap();
        assert!((v - 4.0).abs() < 1e-8);
    }

    #[test]
    fn point_mass_when_sigma_is_zero() {
        let q = Quadrature::default();
        assert_eq!(expect_under_normal(|x| x * 3.0, 2.0, 0.0, &q).unwrap(), 6.0);
        assert!(expect_under_normal(|x| x, 0.0, -1.0, &q).is_err());
    }

    #[test]
    fn lognormal_mean() {
        let q = Quadrature::default();
        for (mu, sigma) in [(0.0, 1.0), (-2.0, 2.0), (1.0, 0.5), (-8.0, 4.0)] {
            let got = expect_under_normal(f64::exp, mu, sigma, &q).unwrap();
            let want = (mu + 0.5 * sigma * sigma).exp();
            assert!(
                ((got - want) / want).abs() < 1e-8,
                "{mu} {sigma}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn linearity() {
        let q = Quadrature::default();
        let f = |x: f64| (1.0 + (-x).exp()).ln();
        let g = |x: f64| x.sin();
        let (mu, s) = (0.7, 1.9);
        let a = expect_under_normal(f, mu, s, &q).unwrap();
        let b = expect_under_normal(g, mu, s, &q).unwrap();
        let ab = expect_under_normal(|x| f(x) + g(x), mu, s, &q).unwrap();
        assert!((a + b - ab).abs() < 1e-9);
    }

    #[test]
    fn reports_non_convergence_with_estimate() {
        let q = Quadrature::new(1e-300, 1e-300, 3).unwrap();
        match expect_under_normal(|x| (50.0 * x).sin().abs(), 0.0, 1.0, &q) {
            Err(Error::Quadrature { estimate, error }) => {
                assert!(estimate.is_finite() && error > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_tolerances() {
        assert!(Quadrature::new(0.0, 1e-10, 10).is_err());
        assert!(Quadrature::new(1e-10, -1.0, 10).is_err());
        assert!(Quadrature::new(1e-10, 1e-10, 0).is_err());
    }
}
