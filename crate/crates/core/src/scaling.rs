//! Finite-size scaling: sigmoid threshold fits, extrapolation to infinite
//! size, scaling-collapse scores and the boundary exponential fit.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Default correlation-length exponent of 2-D percolation.
pub const NU_PERCOLATION: f64 = 4.0 / 3.0;

/// One size-resolved curve `y(x) ± err` sampled on an increasing grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub n: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub err: Vec<f64>,
}

impl Curve {
    pub fn new(n: usize, x: Vec<f64>, y: Vec<f64>, err: Vec<f64>) -> Result<Self> {
        let c = Curve { n, x, y, err };
        c.check()?;
        Ok(c)
    }

    pub fn check(&self) -> Result<()> {
        if self.x.is_empty() || self.x.len() != self.y.len() || self.x.len() != self.err.len() {
            return Err(Error::invalid(format!("curve for N={} has mismatched or empty columns", self.n)));
        }
        if self.x.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(format!("curve for N={} is not on an increasing grid", self.n)));
        }
        if self
            .x
            .iter()
            .chain(&self.y)
            .chain(&self.err)
            .any(|v| !v.is_finite())
            || self.err.iter().any(|&e| e < 0.0)
        {
            return Err(Error::invalid(format!("curve for N={} has non-finite entries", self.n)));
        }
        Ok(())
    }
}

/// Linear interpolation of `ys` (with independent errors `errs`) at `x`.
/// Returns `None` outside the grid hull.
pub fn interpolate(xs: &[f64], ys: &[f64], errs: &[f64], x: f64) -> Option<(f64, f64)> {
    let last = xs.len().checked_sub(1)?;
    if x < xs[0] || x > xs[last] {
        return None;
    }
    let k = xs.partition_point(|&v| v <= x);
    if k == 0 {
        return None;
    }
    let i = k - 1;
    if i == last || xs[i] == x {
        return Some((ys[i], errs.get(i).copied().unwrap_or(0.0)));
    }
    let lam = (x - xs[i]) / (xs[i + 1] - xs[i]);
    let y = (1.0 - lam) * ys[i] + lam * ys[i + 1];
    let e = match (errs.get(i), errs.get(i + 1)) {
        (Some(a), Some(b)) => (((1.0 - lam) * a).powi(2) + (lam * b).powi(2)).sqrt(),
        _ => 0.0,
    };
    Some((y, e))
}

/// Rescaled data and its collapse quality; lower scores are better.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Collapse {
    /// `(rescaled_x, y, N)` triples.
    pub points: Vec<(f64, f64, usize)>,
    pub score: f64,
    pub degenerate: bool,
}

/// Mean squared deviation of every point from the pooled value at its
/// abscissa, where the pool holds the point itself and every other curve
/// linearly interpolated there.
///
/// Fewer than two non-empty curves give `(0, true)`. Curves that never
/// overlap give an infinite score.
pub fn collapse_score(curves: &[(Vec<f64>, Vec<f64>)]) -> (f64, bool) {
    let sorted: Vec<(Vec<f64>, Vec<f64>)> = curves
        .iter()
        .filter(|(x, _)| !x.is_empty())
        .map(|(x, y)| {
            let mut pts: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            pts.into_iter().unzip()
        })
        .collect();
    if sorted.len() < 2 {
        return (0.0, true);
    }
    let mut total = 0.0;
    let mut count = 0usize;
    for (k, (xs, ys)) in sorted.iter().enumerate() {
        for (&x, &y) in xs.iter().zip(ys) {
            let mut pool = vec![y];
            for (j, (ox, oy)) in sorted.iter().enumerate() {
                if j != k {
                    if let Some((v, _)) = interpolate(ox, oy, &[], x) {
                        pool.push(v);
                    }
                }
            }
            if pool.len() < 2 {
                continue;
            }
            let mean = pool.iter().sum::<f64>() / pool.len() as f64;
            total += pool.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / pool.len() as f64;
            count += 1;
        }
    }
    if count == 0 {
        (f64::INFINITY, false)
    } else {
        (total / count as f64, false)
    }
}

/// Fermi-function model `1 / (exp((x - x_c)/T) + 1)`.
#[inline]
pub fn fermi(x: f64, x_c: f64, temperature: f64) -> f64 {
    1.0 / (((x - x_c) / temperature).exp() + 1.0)
}

/// Standard error of a binomial fraction `k/m`, regularized so that
/// fractions of exactly 0 or 1 keep a positive error.
pub fn binomial_sigma(k: usize, m: usize) -> f64 {
    let p = (k as f64 + 0.5) / (m as f64 + 1.0);
    (p * (1.0 - p) / m.max(1) as f64).sqrt()
}

/// Observed value with its error, at abscissa `x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub x: f64,
    pub y: f64,
    pub err: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdFit {
    pub n: usize,
    pub p_c: f64,
    pub p_c_err: f64,
    /// Fitted temperature `T` at this size.
    pub temperature: f64,
    /// Amplitude `c` in `T = c N^{-1/ν}`.
    pub temperature_scale: f64,
    /// Chi-square per degree of freedom.
    pub goodness: f64,
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Minimizes `f` on `[lo, hi]`: coarse scan, then golden-section refinement
/// of the best bracket.
fn minimize_1d(f: &mut dyn FnMut(f64) -> f64, lo: f64, hi: f64, coarse: usize, iters: usize) -> (f64, f64) {
    let step = (hi - lo) / coarse as f64;
    let mut best = (lo, f(lo));
    for i in 1..=coarse {
        let x = lo + step * i as f64;
        let v = f(x);
        if v < best.1 {
            best = (x, v);
        }
    }
    let mut a = (best.0 - step).max(lo);
    let mut b = (best.0 + step).min(hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    let fm = f(mid);
    [(mid, fm), (c, fc), (d, fd), best]
        .into_iter()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("non-empty")
}

fn chi2(data: &[Observation], x_c: f64, temperature: f64) -> f64 {
    data.iter()
        .map(|o| ((o.y - fermi(o.x, x_c, temperature)) / o.err).powi(2))
        .sum()
}

/// Weighted least-squares Fermi-function fit of a decreasing sigmoid at size
/// `n`. The temperature is reported both directly and as the amplitude of
/// `T = c N^{-1/ν}`.
pub fn fermionic_fit(data: &[Observation], n: usize, nu: f64) -> Result<ThresholdFit> {
    if data.len() < 5 {
        return Err(Error::InsufficientData(format!(
            "fermionic fit needs at least 5 points, got {}",
            data.len()
        )));
    }
    if data.iter().any(|o| !(o.err > 0.0) || !o.x.is_finite() || !o.y.is_finite()) {
        return Err(Error::invalid("observations need finite values and positive errors"));
    }
    if !data.iter().any(|o| o.y > 0.5) || !data.iter().any(|o| o.y < 0.5) {
        return Err(Error::FitUnbounded(format!("data at N={n} do not bracket 1/2")));
    }
    let lo = data.iter().map(|o| o.x).fold(f64::INFINITY, f64::min);
    let hi = data.iter().map(|o| o.x).fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let (lt_lo, lt_hi) = ((span * 1e-4).ln(), (span * 10.0).ln());

    let profile = |x_c: f64| -> (f64, f64) {
        let mut inner = |lt: f64| chi2(data, x_c, lt.exp());
        let (lt, v) = minimize_1d(&mut inner, lt_lo, lt_hi, 40, 200);
        (lt.exp(), v)
    };
    let mut outer = |x_c: f64| profile(x_c).1;
    let (x_c, chi_min) = minimize_1d(&mut outer, lo, hi, 40, 200);
    let (temperature, _) = profile(x_c);

    let edge = 1e-6 * span;
    if x_c <= lo + edge || x_c >= hi - edge {
        return Err(Error::FitUnbounded(format!("threshold at N={n} runs to the grid edge")));
    }

    // covariance from the curvature of chi^2 / 2
    let (hx, ht) = (1e-4 * span, 1e-3 * temperature);
    let f = |a: f64, t: f64| 0.5 * chi2(data, a, t);
    let f0 = f(x_c, temperature);
    let fxx = (f(x_c + hx, temperature) - 2.0 * f0 + f(x_c - hx, temperature)) / (hx * hx);
    let ftt = (f(x_c, temperature + ht) - 2.0 * f0 + f(x_c, temperature - ht)) / (ht * ht);
    let fxt = (f(x_c + hx, temperature + ht) - f(x_c + hx, temperature - ht) - f(x_c - hx, temperature + ht)
        + f(x_c - hx, temperature - ht))
        / (4.0 * hx * ht);
    let det = fxx * ftt - fxt * fxt;
    let p_c_err = if det > 0.0 && ftt > 0.0 {
        (ftt / det).sqrt()
    } else if fxx > 0.0 {
        (1.0 / fxx).sqrt()
    } else {
        f64::NAN
    };

    Ok(ThresholdFit {
        n,
        p_c: x_c,
        p_c_err,
        temperature,
        temperature_scale: temperature * (n as f64).powf(1.0 / nu),
        goodness: chi_min / (data.len() - 2) as f64,
    })
}

/// Collapse quality of size-resolved data rescaled as `(x - x_c(N)) N^{1/ν}`.
pub fn collapse_check(curves: &[Curve], x_c: &[f64], nu: f64) -> Result<Collapse> {
    if curves.len() != x_c.len() {
        return Err(Error::invalid("one threshold per curve is required"));
    }
    if !(nu.is_finite() && nu > 0.0) {
        return Err(Error::invalid(format!("nu = {nu} must be positive")));
    }
    let rescaled: Vec<(Vec<f64>, Vec<f64>)> = curves
        .iter()
        .zip(x_c)
        .map(|(c, &xc)| {
            let s = (c.n as f64).powf(1.0 / nu);
            (c.x.iter().map(|&x| (x - xc) * s).collect(), c.y.clone())
        })
        .collect();
    let points = curves
        .iter()
        .zip(&rescaled)
        .flat_map(|(c, (xs, ys))| xs.iter().zip(ys).map(move |(&x, &y)| (x, y, c.n)))
        .collect();
    let (score, degenerate) = collapse_score(&rescaled);
    Ok(Collapse {
        points,
        score,
        degenerate,
    })
}

/// Size, threshold and error of one finite-size estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizePoint {
    pub n: usize,
    pub p_c: f64,
    pub err: f64,
}

impl From<&ThresholdFit> for SizePoint {
    fn from(f: &ThresholdFit) -> Self {
        SizePoint {
            n: f.n,
            p_c: f.p_c,
            err: f.p_c_err,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FssEstimate {
    pub p_c_infinity: f64,
    /// `σ² (1 + 1/n + x̄² / Σ(x_i - x̄)²)`.
    pub variance: f64,
    /// Two-sided Student-t quantile at the requested confidence.
    pub t_factor: f64,
    /// `t_factor · sqrt(variance)`.
    pub half_width: f64,
    pub slope: f64,
    pub nu: f64,
    pub sigma2: f64,
    pub points_used: Vec<SizePoint>,
}

/// Weighted linear fit of `p_c(N)` against `x = N^{-1/ν}` with weights
/// `w = 1/err`, extrapolated to `x = 0`.
pub fn extrapolate_threshold(points: &[SizePoint], nu: f64, alpha: f64) -> Result<FssEstimate> {
    let n = points.len();
    if n < 3 {
        return Err(Error::InsufficientData(format!("extrapolation needs 3 sizes, got {n}")));
    }
    if points.iter().any(|p| !(p.err > 0.0) || !p.p_c.is_finite()) {
        return Err(Error::invalid("every size needs a finite threshold and a positive error"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha = {alpha} outside (0, 1)")));
    }
    let xs: Vec<f64> = points.iter().map(|p| (p.n as f64).powf(-1.0 / nu)).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.p_c).collect();
    let w2: Vec<f64> = points.iter().map(|p| 1.0 / (p.err * p.err)).collect();

    let sw: f64 = w2.iter().sum();
    let x_bar = w2.iter().zip(&xs).map(|(w, x)| w * x).sum::<f64>() / sw;
    let y_bar = w2.iter().zip(&ys).map(|(w, y)| w * y).sum::<f64>() / sw;
    let sxx: f64 = w2.iter().zip(&xs).map(|(w, x)| w * (x - x_bar).powi(2)).sum();
    let sxy: f64 = w2
        .iter()
        .zip(xs.iter().zip(&ys))
        .map(|(w, (x, y))| w * (x - x_bar) * (y - y_bar))
        .sum();
    if sxx <= 0.0 {
        return Err(Error::InsufficientData("all sizes map to the same abscissa".into()));
    }
    let slope = sxy / sxx;
    let intercept = y_bar - slope * x_bar;

    let denom = sw - 2.0;
    if denom <= 0.0 {
        return Err(Error::FitUnbounded("sum of squared weights must exceed 2".into()));
    }
    let sigma2 = w2
        .iter()
        .zip(xs.iter().zip(&ys))
        .map(|(w, (x, y))| w * (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / denom;
    let spread: f64 = xs.iter().map(|x| (x - x_bar).powi(2)).sum();
    let variance = sigma2 * (1.0 + 1.0 / n as f64 + x_bar * x_bar / spread);
    let t = StudentsT::new(0.0, 1.0, (n - 2) as f64)
        .map_err(|e| Error::invalid(e.to_string()))?
        .inverse_cdf(1.0 - alpha / 2.0);
    Ok(FssEstimate {
        p_c_infinity: intercept,
        variance,
        t_factor: t,
        half_width: t * variance.sqrt(),
        slope,
        nu,
        sigma2,
        points_used: points.to_vec(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryFit {
    /// `A` in `r_c ~ exp(-1/(A p))`.
    pub a: f64,
    pub prefactor: f64,
    /// Root-mean-square residual of `ln r_c`.
    pub residual_rms: f64,
}

/// Least-squares line through `(1/p, ln r_c)`; the slope is `-1/A`.
pub fn boundary_exponential_fit(points: &[(f64, f64)]) -> Result<BoundaryFit> {
    if points.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "boundary fit needs 3 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|&(p, r)| !(r > 0.0) || !(p > 0.0)) {
        return Err(Error::invalid("boundary points need positive p and r_c"));
    }
    let xs: Vec<f64> = points.iter().map(|&(p, _)| 1.0 / p).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, r)| r.ln()).collect();
    let n = xs.len() as f64;
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::InsufficientData("boundary points share one p".into()));
    }
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum::<f64>() / sxx;
    let intercept = ym - slope * xm;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(BoundaryFit {
        a: -1.0 / slope,
        prefactor: intercept.exp(),
        residual_rms: (rss / n).sqrt(),
    })
}
