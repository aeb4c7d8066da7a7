//! Area-law fits and consistency reports over entropy sweeps.

use serde::Serialize;

use crate::{Error, Result};

/// Maximum relative asymmetry `|S(n) − S(N−n)| / max(S)` accepted by
/// [`symmetry_report`].
pub const SYMMETRY_THRESHOLD: f64 = 1e-6;

/// Relative band of [`cross_scheme_check`].
pub const CROSS_SCHEME_BAND: f64 = 0.15;

/// One boundary of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    /// Boundary label, unique within a record (radial boundary index, box
    /// edge, voxel radius, ...).
    pub index: usize,
    /// Linear size attached to the boundary, in lattice units.
    pub radius: f64,
    pub area_over_4a2: f64,
    pub entropy: f64,
    pub tail_fraction: f64,
}

/// A validated sweep: strictly positive areas and unique indices.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRecord {
    pub model: String,
    pub sites: usize,
    points: Vec<SweepPoint>,
}

impl SweepRecord {
    pub fn new(model: impl Into<String>, sites: usize, points: Vec<SweepPoint>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for p in &points {
            if !(p.area_over_4a2 > 0.0 && p.area_over_4a2.is_finite()) {
                return Err(Error::InvalidSweep(format!(
                    "point {} has non-positive area {}",
                    p.index, p.area_over_4a2
                )));
            }
            if !p.entropy.is_finite() {
                return Err(Error::InvalidSweep(format!(
                    "point {} has non-finite entropy",
                    p.index
                )));
            }
            if !seen.insert(p.index) {
                return Err(Error::InvalidSweep(format!("duplicate point {}", p.index)));
            }
        }
        Ok(Self {
            model: model.into(),
            sites,
            points,
        })
    }

    pub fn points(&self) -> &[SweepPoint] {
        &self.points
    }

    pub fn get(&self, index: usize) -> Option<&SweepPoint> {
        self.points.iter().find(|p| p.index == index)
    }
}

/// Points entering a fit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FitWindow {
    pub min_area_over_4a2: f64,
    pub max_area_over_4a2: f64,
    pub min_index: usize,
    pub max_index: usize,
}

impl Default for FitWindow {
    fn default() -> Self {
        Self {
            min_area_over_4a2: 0.0,
            max_area_over_4a2: f64::INFINITY,
            min_index: 0,
            max_index: usize::MAX,
        }
    }
}

impl FitWindow {
    pub fn indices(min: usize, max: usize) -> Self {
        Self {
            min_index: min,
            max_index: max,
            ..Self::default()
        }
    }

    pub fn min_area(min_area_over_4a2: f64) -> Self {
        Self {
            min_area_over_4a2,
            ..Self::default()
        }
    }

    pub fn contains(&self, p: &SweepPoint) -> bool {
        (self.min_index..=self.max_index).contains(&p.index)
            && p.area_over_4a2 >= self.min_area_over_4a2
            && p.area_over_4a2 <= self.max_area_over_4a2
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitResidual {
    pub index: usize,
    pub area_over_4a2: f64,
    pub entropy: f64,
    pub residual: f64,
    /// `residual / entropy`.
    pub relative: f64,
}

/// `S = κ·A/(4a²) + c` by ordinary least squares.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AreaLawFit {
    pub slope: f64,
    pub intercept: f64,
    /// Slope of the fit constrained through the origin.
    pub origin_slope: f64,
    pub residual_rms: f64,
    pub points: usize,
    pub max_entropy: f64,
    pub window: FitWindow,
    pub residuals: Vec<FitResidual>,
}

impl AreaLawFit {
    /// `|c| / max S` over the fitted points.
    pub fn relative_intercept(&self) -> f64 {
        self.intercept.abs() / self.max_entropy
    }

    pub fn max_relative_residual(&self) -> f64 {
        self.residuals
            .iter()
            .map(|r| r.relative.abs())
            .fold(0.0, f64::max)
    }
}

pub fn fit_area_law(record: &SweepRecord, window: FitWindow) -> Result<AreaLawFit> {
    let pts: Vec<&SweepPoint> = record
        .points
        .iter()
        .filter(|p| window.contains(p))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientPoints {
            found: pts.len(),
            required: 3,
        });
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.area_over_4a2).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.entropy).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.area_over_4a2 - mx).powi(2)).sum();
    let sxy: f64 = pts
        .iter()
        .map(|p| (p.area_over_4a2 - mx) * (p.entropy - my))
        .sum();
    if !(sxx > 0.0) {
        return Err(Error::InvalidSweep(
            "all fitted points share one area".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let origin_slope = pts.iter().map(|p| p.area_over_4a2 * p.entropy).sum::<f64>()
        / pts.iter().map(|p| p.area_over_4a2.powi(2)).sum::<f64>();
    let residuals: Vec<FitResidual> = pts
        .iter()
        .map(|p| {
            let residual = p.entropy - (slope * p.area_over_4a2 + intercept);
            FitResidual {
                index: p.index,
                area_over_4a2: p.area_over_4a2,
                entropy: p.entropy,
                residual,
                relative: residual / p.entropy,
            }
        })
        .collect();
    let residual_rms = (residuals.iter().map(|r| r.residual.powi(2)).sum::<f64>() / m).sqrt();
    Ok(AreaLawFit {
        slope,
        intercept,
        origin_slope,
        residual_rms,
        points: pts.len(),
        max_entropy: pts.iter().map(|p| p.entropy).fold(f64::MIN, f64::max),
        window,
        residuals,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossSchemePair {
    pub index: usize,
    pub cubic_estimate: f64,
    pub sphere_estimate: f64,
    /// `cubic_estimate / sphere_estimate`.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossSchemeReport {
    pub pairs: Vec<CrossSchemePair>,
    pub sufficient_overlap: bool,
    pub band: f64,
    pub pass: bool,
}

/// Compares voxel-sphere and smooth-sphere sweeps point by point. Records
/// are paired by index (voxel radius `R` against radial boundary `n = R`)
/// and the entropies, each of which already carries its own scheme's area
/// law, are compared directly. At least two shared radii are required.
pub fn cross_scheme_check(cubic: &SweepRecord, spherical: &SweepRecord) -> CrossSchemeReport {
    let pairs: Vec<CrossSchemePair> = cubic
        .points
        .iter()
        .filter_map(|c| {
            spherical.get(c.index).map(|s| CrossSchemePair {
                index: c.index,
                cubic_estimate: c.entropy,
                sphere_estimate: s.entropy,
                ratio: c.entropy / s.entropy,
            })
        })
        .collect();
    let sufficient_overlap = pairs.len() >= 2;
    let pass = sufficient_overlap
        && pairs
            .iter()
            .all(|p| (p.ratio - 1.0).abs() <= CROSS_SCHEME_BAND);
    CrossSchemeReport {
        pairs,
        sufficient_overlap,
        band: CROSS_SCHEME_BAND,
        pass,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymmetryPair {
    pub index: usize,
    pub mirror: usize,
    pub relative: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub pairs: Vec<AsymmetryPair>,
    pub max_asymmetry: f64,
    /// Pair with the largest asymmetry.
    pub worst: Option<(usize, usize)>,
    pub threshold: f64,
    pub no_pairs: bool,
    pub pass: bool,
}

/// Checks `S(n) = S(N − n)` over a sweep of an `N`-site chain.
pub fn symmetry_report(record: &SweepRecord) -> SymmetryReport {
    let n = record.sites;
    let pairs: Vec<AsymmetryPair> = record
        .points
        .iter()
        .filter(|p| p.index <= n && 2 * p.index < n)
        .filter_map(|p| {
            record.get(n - p.index).map(|q| {
                let scale = p.entropy.abs().max(q.entropy.abs());
                let relative = if scale > 0.0 {
                    (p.entropy - q.entropy).abs() / scale
                } else {
                    0.0
                };
                AsymmetryPair {
                    index: p.index,
                    mirror: q.index,
                    relative,
                }
            })
        })
        .collect();
    let worst = pairs
        .iter()
        .max_by(|a, b| a.relative.total_cmp(&b.relative));
    let max_asymmetry = worst.map_or(0.0, |p| p.relative);
    let worst = worst.map(|p| (p.index, p.mirror));
    let no_pairs = pairs.is_empty();
    SymmetryReport {
        pass: !no_pairs && max_asymmetry < SYMMETRY_THRESHOLD,
        pairs,
        max_asymmetry,
        worst,
        threshold: SYMMETRY_THRESHOLD,
        no_pairs,
    }
}
