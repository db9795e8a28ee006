//! Crossing points of size-resolved curves and their scaling collapses.

use serde::{Deserialize, Serialize};

pub use crate::scaling::{Collapse, Curve};
use crate::error::{Error, Result};
use crate::scaling::{collapse_score, interpolate};

/// Crossing of one pair of successive sizes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairCrossing {
    pub n_small: usize,
    pub n_large: usize,
    pub x: f64,
    pub err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub x: f64,
    pub err: f64,
    pub pairs: Vec<PairCrossing>,
}

struct Candidate {
    x: f64,
    err: f64,
    slope: f64,
}

fn pair_crossing(small: &Curve, large: &Curve) -> Result<PairCrossing> {
    let no_crossing = || Error::NoCrossing {
        n_small: small.n,
        n_large: large.n,
    };
    let lo = small.x[0].max(large.x[0]);
    let hi = small.x[small.x.len() - 1].min(large.x[large.x.len() - 1]);
    if lo >= hi {
        return Err(no_crossing());
    }
    let mut grid: Vec<f64> = small
        .x
        .iter()
        .chain(&large.x)
        .copied()
        .filter(|&x| x >= lo && x <= hi)
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let mut d = Vec::with_capacity(grid.len());
    let mut sd = Vec::with_capacity(grid.len());
    for &x in &grid {
        let (ys, es) = interpolate(&small.x, &small.y, &small.err, x).ok_or_else(no_crossing)?;
        let (yl, el) = interpolate(&large.x, &large.y, &large.err, x).ok_or_else(no_crossing)?;
        d.push(yl - ys);
        sd.push((es * es + el * el).sqrt());
    }

    let mut candidates = Vec::new();
    for i in 0..grid.len().saturating_sub(1) {
        let (d0, d1) = (d[i], d[i + 1]);
        if d0 * d1 < 0.0 {
            let h = grid[i + 1] - grid[i];
            let denom = d0 - d1;
            let x = grid[i] + h * d0 / denom;
            let g0 = -h * d1 / (denom * denom);
            let g1 = h * d0 / (denom * denom);
            let err = ((g0 * sd[i]).powi(2) + (g1 * sd[i + 1]).powi(2)).sqrt();
            candidates.push(Candidate {
                x,
                err,
                slope: (d1 - d0).abs() / h,
            });
        }
    }
    for i in 1..grid.len().saturating_sub(1) {
        if d[i] != 0.0 {
            continue;
        }
        let before = (0..i).rev().find(|&k| d[k] != 0.0);
        let after = (i + 1..grid.len()).find(|&k| d[k] != 0.0);
        if let (Some(a), Some(b)) = (before, after) {
            if d[a] * d[b] < 0.0 {
                let slope = (d[b] - d[a]).abs() / (grid[b] - grid[a]);
                candidates.push(Candidate {
                    x: grid[i],
                    err: sd[i] / slope,
                    slope,
                });
            }
        }
    }
    let best = candidates
        .into_iter()
        .max_by(|a, b| a.slope.total_cmp(&b.slope))
        .ok_or_else(no_crossing)?;
    Ok(PairCrossing {
        n_small: small.n,
        n_large: large.n,
        x: best.x,
        err: best.err,
    })
}

/// Crossings of successive-size curves and their inverse-variance weighted
/// mean. Where several sign changes occur on the grid the steepest one is
/// taken.
pub fn find_crossing(curves: &[Curve]) -> Result<Crossing> {
    if curves.len() < 2 {
        return Err(Error::InsufficientData("need curves for at least two sizes".into()));
    }
    let mut sorted: Vec<&Curve> = curves.iter().collect();
    sorted.sort_by_key(|c| c.n);
    for c in &sorted {
        c.check()?;
    }
    let pairs = sorted
        .windows(2)
        .map(|w| pair_crossing(w[0], w[1]))
        .collect::<Result<Vec<_>>>()?;

    let exact = pairs.iter().any(|c| c.err <= 0.0);
    let weights: Vec<f64> = pairs
        .iter()
        .map(|c| if exact { 1.0 } else { 1.0 / (c.err * c.err) })
        .collect();
    let wsum: f64 = weights.iter().sum();
    let x = pairs.iter().zip(&weights).map(|(c, w)| w * c.x).sum::<f64>() / wsum;
    let spread = (pairs
        .iter()
        .zip(&weights)
        .map(|(c, w)| w * (c.x - x).powi(2))
        .sum::<f64>()
        / wsum)
        .sqrt();
    let statistical = if exact { 0.0 } else { 1.0 / wsum.sqrt() };
    Ok(Crossing {
        x,
        err: statistical.max(spread),
        pairs,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CollapseMode {
    /// `(x - x_c) N^{1/ν}` with `exponent = ν`.
    Transition,
    /// `x N^d` with `exponent = d`; `x` is the boundary distance δ.
    Boundary,
}

pub fn scaling_collapse(curves: &[Curve], x_c: f64, exponent: f64, mode: CollapseMode) -> Result<Collapse> {
    if curves.is_empty() || curves.iter().all(|c| c.x.is_empty()) {
        return Err(Error::invalid("no data to collapse"));
    }
    if !(exponent.is_finite() && exponent > 0.0) {
        return Err(Error::invalid(format!("exponent {exponent} must be positive")));
    }
    let rescaled: Vec<(Vec<f64>, Vec<f64>)> = curves
        .iter()
        .map(|c| {
            let n = c.n as f64;
            let xs = c
                .x
                .iter()
                .map(|&x| match mode {
                    CollapseMode::Transition => (x - x_c) * n.powf(1.0 / exponent),
                    CollapseMode::Boundary => x * n.powf(exponent),
                })
                .collect();
            (xs, c.y.clone())
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
