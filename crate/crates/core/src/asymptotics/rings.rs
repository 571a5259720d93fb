//! Matching computed poles against the predicted rings around the poles of
//! the rational part.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

use super::PoleRingPrediction;

/// Half the distance from `eta` to the nearest of `[c, d]` and the other
/// centers.
pub fn attraction_radius(eta: Complex64, others: &[Complex64], c: f64, d: f64) -> f64 {
    let x = eta.re.clamp(c, d);
    let mut dist = (eta - Complex64::new(x, 0.0)).norm();
    for o in others {
        let r = (eta - o).norm();
        if r > 0.0 {
            dist = dist.min(r);
        }
    }
    dist / 2.0
}

#[derive(Debug, Clone, Serialize)]
pub struct RingMatch {
    pub eta: Complex64,
    pub multiplicity: usize,
    pub radius_limit: f64,
    /// poles inside the attraction disk
    pub count: usize,
    pub mean_radius: f64,
    /// consecutive angular gaps in degrees, sorted by angle
    pub gaps_deg: Vec<f64>,
    /// largest `|gap - 360/m|` in degrees
    pub max_gap_error_deg: f64,
    /// `mean_radius / predicted radius`, the size of the bounded factor
    pub implied_a: f64,
}

/// Counts the poles near each predicted center and measures the ring.
pub fn match_pole_rings(poles: &[Complex64], prediction: &[PoleRingPrediction], c: f64, d: f64) -> Vec<RingMatch> {
    let centers: Vec<Complex64> = prediction.iter().map(|p| p.eta).collect();
    prediction
        .iter()
        .map(|p| {
            let limit = attraction_radius(p.eta, &centers, c, d);
            let near: Vec<Complex64> = poles.iter().map(|z| z - p.eta).filter(|z| z.norm() < limit).collect();
            let count = near.len();
            let mean_radius = if count == 0 { 0.0 } else { near.iter().map(|z| z.norm()).sum::<f64>() / count as f64 };
            let mut angles: Vec<f64> = near.iter().map(|z| z.arg().to_degrees()).collect();
            angles.sort_by(f64::total_cmp);
            let mut gaps_deg: Vec<f64> = angles.windows(2).map(|w| w[1] - w[0]).collect();
            if count > 1 {
                gaps_deg.push(360.0 + angles[0] - angles[count - 1]);
            }
            let ideal = 360.0 / p.multiplicity as f64;
            let max_gap_error_deg = gaps_deg.iter().map(|g| (g - ideal).abs()).fold(0.0, f64::max);
            RingMatch {
                eta: p.eta,
                multiplicity: p.multiplicity,
                radius_limit: limit,
                count,
                mean_radius,
                gaps_deg,
                max_gap_error_deg,
                implied_a: if p.radius > 0.0 { mean_radius / p.radius } else { f64::NAN },
            }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct RingSweep {
    pub ns: Vec<usize>,
    pub radii: Vec<f64>,
    /// `radii[i + 1] / radii[i]` per unit step in `n`
    pub ratios: Vec<f64>,
    pub predicted: f64,
    /// geometric mean of the ratios
    pub mean_ratio: f64,
    /// `|mean_ratio / predicted - 1|`
    pub deviation: f64,
}

/// Per-step shrink of ring radii observed over increasing `ns`.
pub fn ring_sweep(ns: &[usize], radii: &[f64], predicted: f64) -> Result<RingSweep> {
    if ns.len() != radii.len() || ns.len() < 2 {
        return Err(Error::InvalidInput("a ring sweep needs at least two radii".into()));
    }
    if radii.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::InvalidInput("ring radii must be positive".into()));
    }
    let mut ratios = Vec::with_capacity(ns.len() - 1);
    for i in 1..ns.len() {
        let step = ns[i].checked_sub(ns[i - 1]).filter(|s| *s > 0).ok_or_else(|| Error::InvalidInput("degrees must increase".into()))?;
        ratios.push((radii[i] / radii[i - 1]).powf(1.0 / step as f64));
    }
    let span = (ns[ns.len() - 1] - ns[0]) as f64;
    let mean_ratio = (radii[radii.len() - 1] / radii[0]).powf(1.0 / span);
    Ok(RingSweep {
        ns: ns.to_vec(),
        radii: radii.to_vec(),
        ratios,
        predicted,
        mean_ratio,
        deviation: (mean_ratio / predicted - 1.0).abs(),
    })
}
