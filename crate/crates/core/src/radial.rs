//! Partial-wave radial chains for a spherical region.
//!
//! A free field expanded in spherical harmonics splits into independent
//! radial chains, one per `(l, m)`, whose coupling matrices depend only on
//! `l`. The entropy of a ball is `Σ_l (2l+1) S_l`, summed up to a cutoff and
//! completed by a fitted power-law tail.
//!
//! Two geometries are provided. [`RadialKind::Flat`] is the half-integer
//! radius discretization of flat space with a Dirichlet wall at `r = N+1`.
//! [`RadialKind::Einstein`] puts the chain on a great semicircle of the
//! static 3-sphere: sites sit at geodesic distance `r_j = j` from one pole,
//! with curvature radius `R₀ = (N+1)/π`, so both poles lie half a spacing
//! beyond the outermost sites. In terms of the areal radius
//! `s(r) = R₀ sin(r/R₀)` and `u = s·φ`, the chain is
//!
//! ```text
//! K_jj     = (s²_{j−½} + s²_{j+½}) / s²_j + l(l+1)/s²_j + 1/R₀²
//! K_j,j+1  = −s²_{j+½} / (s_j s_{j+1})
//! ```
//!
//! where bonds exist only between neighbouring sites. The `1/R₀²` term is
//! the conformal coupling on the sphere; without it the `l = 0` chain has a
//! zero mode. For `j, k ≪ N` the matrix reduces to the flat one.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::gaussian::{
    entropy_from_spectrum, mode_spectrum, omega_from_coupling, reduce, CouplingMatrix,
    EntropyResult, OmegaMatrix, PartitionMask, Tolerances,
};
use crate::zeta::hurwitz_zeta;
use crate::{Error, Result};

/// Largest multipole for which `l(l+1)` is exact in `f64`.
pub const MAX_MULTIPOLE: usize = 1 << 26;

/// Smallest chain accepted for the Einstein geometry.
pub const MIN_EINSTEIN_SITES: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum RadialKind {
    Flat,
    Einstein,
}

impl RadialKind {
    pub fn name(self) -> &'static str {
        match self {
            RadialKind::Flat => "flat",
            RadialKind::Einstein => "einstein",
        }
    }
}

/// A radial chain of `sites` oscillators in one of the two geometries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RadialModel {
    kind: RadialKind,
    sites: usize,
}

/// Geometry of the boundary between traced sites `1..=n` and the rest. The
/// boundary sits midway between sites `n` and `n+1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SphereSpec {
    pub boundary: usize,
    /// Distance of the boundary from the centre (flat) or from the pole
    /// (Einstein), `n + ½`.
    pub radius: f64,
    /// Radius of the boundary 2-sphere, `√(A / 4π)`.
    pub areal_radius: f64,
    /// Polar angle of the boundary; `None` in flat space.
    pub chi: Option<f64>,
    pub area: f64,
}

impl SphereSpec {
    pub fn area_over_4a2(&self) -> f64 {
        self.area / 4.0
    }
}

impl RadialModel {
    pub fn flat(sites: usize) -> Result<Self> {
        if sites == 0 {
            return Err(Error::InvalidModel(
                "flat chain needs at least one site".into(),
            ));
        }
        Ok(Self {
            kind: RadialKind::Flat,
            sites,
        })
    }

    pub fn einstein(sites: usize) -> Result<Self> {
        if sites < MIN_EINSTEIN_SITES {
            return Err(Error::InvalidModel(format!(
                "Einstein chain needs at least {MIN_EINSTEIN_SITES} sites, got {sites}"
            )));
        }
        Ok(Self {
            kind: RadialKind::Einstein,
            sites,
        })
    }

    pub fn kind(&self) -> RadialKind {
        self.kind
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    /// `R₀ = (N+1)/π` for the Einstein chain.
    pub fn curvature_radius(&self) -> Option<f64> {
        match self.kind {
            RadialKind::Flat => None,
            RadialKind::Einstein => Some(einstein_radius(self.sites)),
        }
    }

    /// Largest boundary area the geometry admits: `4πR₀²` on the sphere,
    /// the Dirichlet wall in flat space.
    pub fn max_area(&self) -> f64 {
        match self.kind {
            RadialKind::Flat => 4.0 * PI * (self.sites as f64 + 1.0).powi(2),
            RadialKind::Einstein => 4.0 * PI * einstein_radius(self.sites).powi(2),
        }
    }

    pub fn coupling(&self, l: usize) -> Result<CouplingMatrix> {
        match self.kind {
            RadialKind::Flat => build_flat_radial_coupling(self.sites, l),
            RadialKind::Einstein => build_einstein_radial_coupling(self.sites, l),
        }
    }

    /// Boundary after site `n`, for `0 ≤ n ≤ N`.
    pub fn sphere(&self, n: usize) -> Result<SphereSpec> {
        if n > self.sites {
            return Err(Error::InvalidBoundary {
                boundary: n,
                sites: self.sites,
            });
        }
        let radius = n as f64 + 0.5;
        Ok(match self.kind {
            RadialKind::Flat => SphereSpec {
                boundary: n,
                radius,
                areal_radius: radius,
                chi: None,
                area: 4.0 * PI * radius * radius,
            },
            RadialKind::Einstein => {
                let r0 = einstein_radius(self.sites);
                // Measure from the nearer pole so that mirror boundaries get
                // bit-identical areas.
                let d = radius.min(self.sites as f64 + 1.0 - radius);
                let s = r0 * (d / r0).sin();
                SphereSpec {
                    boundary: n,
                    radius,
                    areal_radius: s,
                    chi: Some(radius / r0),
                    area: 4.0 * PI * s * s,
                }
            }
        })
    }

    /// Partition tracing sites `1..=n`.
    pub fn partition(&self, n: usize) -> Result<PartitionMask> {
        if n > self.sites {
            return Err(Error::InvalidBoundary {
                boundary: n,
                sites: self.sites,
            });
        }
        Ok(PartitionMask::new((0..self.sites).map(|j| j < n).collect()))
    }
}

fn einstein_radius(sites: usize) -> f64 {
    (sites as f64 + 1.0) / PI
}

fn check_multipole(l: usize) -> Result<f64> {
    if l > MAX_MULTIPOLE {
        return Err(Error::InvalidMultipole {
            l,
            reason: "l(l+1) is not exactly representable",
        });
    }
    Ok((l * (l + 1)) as f64)
}

/// Flat-space chain with sites at `r = j`, `j = 1..=N`, and `φ = 0` at
/// `r = N+1`:
/// `K_11 = 9/4 + l(l+1)`,
/// `K_jj = [l(l+1) + (j+½)² + (j−½)²] / j²` for `j ≥ 2`,
/// `K_j,j+1 = −(j+½)² / (j(j+1))`.
pub fn build_flat_radial_coupling(sites: usize, l: usize) -> Result<CouplingMatrix> {
    let ll = check_multipole(l)?;
    if sites == 0 {
        return Err(Error::InvalidModel(
            "flat chain needs at least one site".into(),
        ));
    }
    CouplingMatrix::from_fn(sites, |a, b| {
        let (j, k) = ((a + 1) as f64, (b + 1) as f64);
        if a == b {
            if a == 0 {
                2.25 + ll
            } else {
                (ll + (j + 0.5).powi(2) + (j - 0.5).powi(2)) / (j * j)
            }
        } else if b == a + 1 {
            -(j + 0.5).powi(2) / (j * k)
        } else if a == b + 1 {
            -(k + 0.5).powi(2) / (j * k)
        } else {
            0.0
        }
    })
}

/// Einstein-universe chain; see the module documentation for the scheme.
pub fn build_einstein_radial_coupling(sites: usize, l: usize) -> Result<CouplingMatrix> {
    let ll = check_multipole(l)?;
    if sites < MIN_EINSTEIN_SITES {
        return Err(Error::InvalidModel(format!(
            "Einstein chain needs at least {MIN_EINSTEIN_SITES} sites, got {sites}"
        )));
    }
    let r0 = einstein_radius(sites);
    // Sites 1..=N and bond midpoints 1½..=N−½, each taken from the nearer
    // pole so that the matrix is exactly reflection symmetric.
    let areal = |r: f64| r0 * (r.min(sites as f64 + 1.0 - r) / r0).sin();
    let s: Vec<f64> = (1..=sites).map(|j| areal(j as f64)).collect();
    if let Some(j) = s.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::PoleSingularity { site: j + 1 });
    }
    let bond: Vec<f64> = (1..sites).map(|j| areal(j as f64 + 0.5).powi(2)).collect();
    let mass = 1.0 / (r0 * r0);
    CouplingMatrix::from_fn(sites, |a, b| {
        if a == b {
            let left = if a > 0 { bond[a - 1] } else { 0.0 };
            let right = if a + 1 < sites { bond[a] } else { 0.0 };
            (left + right + ll) / (s[a] * s[a]) + mass
        } else if a.abs_diff(b) == 1 {
            -bond[a.min(b)] / (s[a] * s[b])
        } else {
            0.0
        }
    })
}

fn traced_entropy(omega: &OmegaMatrix, mask: &PartitionMask, tol: &Tolerances) -> Result<f64> {
    if mask.is_degenerate() {
        return Ok(0.0);
    }
    let blocks = reduce(omega, mask)?;
    Ok(entropy_from_spectrum(&mode_spectrum(&blocks, tol)?).value)
}

/// Entropy `S_l` of one `(l, m)` chain with sites `1..=n` traced out.
pub fn partial_wave_entropy(
    model: &RadialModel,
    l: usize,
    n: usize,
    tol: &Tolerances,
) -> Result<f64> {
    let mask = model.partition(n)?;
    if mask.is_degenerate() {
        check_multipole(l)?;
        return Ok(0.0);
    }
    let omega = omega_from_coupling(&model.coupling(l)?, tol)?;
    traced_entropy(&omega, &mask, tol)
}

/// How many multipoles to compute and where to fit the tail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LSumPolicy {
    /// `l_cut = round(l_base + l_per_radius · s_b)` for areal radius `s_b`.
    pub l_base: f64,
    pub l_per_radius: f64,
    /// Fraction of `[0, l_cut]` at the top used for the power-law fit.
    pub tail_window: f64,
    /// Fixed cutoff overriding the radius rule.
    pub l_cut: Option<usize>,
}

impl Default for LSumPolicy {
    fn default() -> Self {
        Self {
            l_base: 50.0,
            l_per_radius: 10.0,
            tail_window: 0.4,
            l_cut: None,
        }
    }
}

impl LSumPolicy {
    pub fn with_l_cut(self, l_cut: usize) -> Self {
        Self {
            l_cut: Some(l_cut),
            ..self
        }
    }

    pub fn l_cut_for(&self, sphere: &SphereSpec) -> usize {
        self.l_cut.unwrap_or_else(|| {
            (self.l_base + self.l_per_radius * sphere.areal_radius).round() as usize
        })
    }

    fn validate(&self) -> Result<()> {
        let ok = self.l_base.is_finite()
            && self.l_per_radius.is_finite()
            && self.l_base >= 0.0
            && self.l_per_radius >= 0.0
            && self.tail_window > 0.0
            && self.tail_window < 1.0;
        if !ok {
            return Err(Error::InvalidSweep(format!(
                "invalid l-sum policy {self:?}"
            )));
        }
        Ok(())
    }
}

/// Power-law tail `S_l ≈ c·l^{−p}` fitted on the top of the computed range.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailFit {
    pub coefficient: f64,
    pub exponent: f64,
    pub l_from: usize,
    pub l_to: usize,
    /// `Σ_{l > l_cut} (2l+1) c l^{−p}`.
    pub tail: f64,
}

/// Per-multipole entropies `S_l` for `l = 0..=l_max` of one boundary.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartialWaveSeries {
    pub terms: Vec<f64>,
}

impl PartialWaveSeries {
    pub fn l_max(&self) -> usize {
        self.terms.len().saturating_sub(1)
    }

    /// `Σ_{l ≤ l_max} (2l+1) S_l`, in ascending `l`.
    pub fn truncated_sum(&self) -> f64 {
        self.terms
            .iter()
            .enumerate()
            .map(|(l, s)| (2 * l + 1) as f64 * s)
            .sum()
    }

    /// Least-squares fit of `ln S_l` against `ln l` over `l ∈ [(1−w)·l_max, l_max]`.
    ///
    /// A series that has decayed to exactly zero has no tail. The fitted
    /// exponent must exceed 2, otherwise the degeneracy-weighted tail
    /// diverges.
    pub fn fit_tail(&self, window: f64) -> Result<TailFit> {
        let l_to = self.l_max();
        let l_from = (((1.0 - window) * l_to as f64).ceil() as usize).max(1);
        if self.terms.last().is_none_or(|&s| s == 0.0) {
            return Ok(TailFit {
                coefficient: 0.0,
                exponent: f64::INFINITY,
                l_from,
                l_to,
                tail: 0.0,
            });
        }
        let pts: Vec<(f64, f64)> = (l_from..=l_to)
            .filter(|&l| self.terms[l] > 0.0)
            .map(|l| ((l as f64).ln(), self.terms[l].ln()))
            .collect();
        if pts.len() < 3 {
            return Err(Error::InsufficientPoints {
                found: pts.len(),
                required: 3,
            });
        }
        let m = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let slope = sxy / sxx;
        let exponent = -slope;
        if !(exponent > 2.0) {
            return Err(Error::TailNotConvergent {
                exponent,
                required: 2.0,
            });
        }
        let coefficient = (my - slope * mx).exp();
        let a = (l_to + 1) as f64;
        let tail =
            coefficient * (2.0 * hurwitz_zeta(exponent - 1.0, a) + hurwitz_zeta(exponent, a));
        Ok(TailFit {
            coefficient,
            exponent,
            l_from,
            l_to,
            tail,
        })
    }
}

/// Multipole sum for one boundary.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SphereEntropy {
    pub sphere: SphereSpec,
    pub series: PartialWaveSeries,
    pub tail: Option<TailFit>,
    pub entropy: EntropyResult,
}

impl SphereEntropy {
    pub fn value(&self) -> f64 {
        self.entropy.value
    }

    /// Share of the total carried by the extrapolated tail.
    pub fn tail_fraction(&self) -> f64 {
        match (&self.tail, self.entropy.value) {
            (Some(t), v) if v > 0.0 => t.tail / v,
            _ => 0.0,
        }
    }
}

fn assemble(
    model: &RadialModel,
    sphere: SphereSpec,
    terms: Vec<f64>,
    policy: &LSumPolicy,
) -> Result<SphereEntropy> {
    let series = PartialWaveSeries { terms };
    let truncated = series.truncated_sum();
    let degenerate = sphere.boundary == 0 || sphere.boundary == model.sites();
    let tail = if degenerate {
        None
    } else {
        Some(series.fit_tail(policy.tail_window)?)
    };
    let tail_sum = tail.map_or(0.0, |t| t.tail);
    let value = truncated + tail_sum;
    let mut entropy = EntropyResult {
        value,
        mode_entropies: Vec::new(),
        metadata: Default::default(),
    }
    .with_meta("model", model.kind().name())
    .with_meta("sites", model.sites())
    .with_meta("boundary", sphere.boundary)
    .with_meta("l_cut", series.l_max())
    .with_meta(
        "tail_fraction",
        if value > 0.0 { tail_sum / value } else { 0.0 },
    );
    if let Some(t) = &tail {
        entropy = entropy
            .with_meta("tail_exponent", t.exponent)
            .with_meta("tail_window", format!("{}..={}", t.l_from, t.l_to));
    }
    if degenerate {
        entropy = entropy.with_meta("short_circuit", "degenerate partition");
    }
    Ok(SphereEntropy {
        sphere,
        series,
        tail,
        entropy,
    })
}

/// Entropy of the ball bounded after site `n`.
pub fn sum_partial_waves(
    model: &RadialModel,
    n: usize,
    policy: &LSumPolicy,
    tol: &Tolerances,
) -> Result<SphereEntropy> {
    Ok(radial_sweep(model, &[n], policy, tol)?.remove(0))
}

/// Entropies for several boundaries of one chain. Each multipole's `Ω` is
/// computed once and shared by all boundaries; multipoles are evaluated in
/// parallel and summed in ascending order, so the result does not depend on
/// the number of threads.
pub fn radial_sweep(
    model: &RadialModel,
    boundaries: &[usize],
    policy: &LSumPolicy,
    tol: &Tolerances,
) -> Result<Vec<SphereEntropy>> {
    policy.validate()?;
    let spheres = boundaries
        .iter()
        .map(|&n| model.sphere(n))
        .collect::<Result<Vec<_>>>()?;
    let cuts: Vec<usize> = spheres.iter().map(|s| policy.l_cut_for(s)).collect();
    let masks = boundaries
        .iter()
        .map(|&n| model.partition(n))
        .collect::<Result<Vec<_>>>()?;
    let l_top = cuts.iter().copied().max().unwrap_or(0);
    check_multipole(l_top)?;

    let per_l: Vec<Vec<f64>> = (0..=l_top)
        .into_par_iter()
        .map(|l| -> Result<Vec<f64>> {
            let needed: Vec<usize> = (0..masks.len())
                .filter(|&i| cuts[i] >= l && !masks[i].is_degenerate())
                .collect();
            let mut out = vec![0.0; masks.len()];
            if needed.is_empty() {
                return Ok(out);
            }
            let omega = omega_from_coupling(&model.coupling(l)?, tol)?;
            for i in needed {
                out[i] = traced_entropy(&omega, &masks[i], tol)?;
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    spheres
        .into_iter()
        .enumerate()
        .map(|(i, sphere)| {
            let terms = (0..=cuts[i]).map(|l| per_l[l][i]).collect();
            assemble(model, sphere, terms, policy)
        })
        .collect()
}

/// Entropy of a fixed flat ball of `n` sites while the outer wall moves in:
/// one `(N, S)` pair per requested chain length `N ≥ n`. The multipole
/// cutoff depends only on `n`, so all chains share it.
pub fn ir_proximity_sweep(
    n: usize,
    chain_lengths: &[usize],
    policy: &LSumPolicy,
    tol: &Tolerances,
) -> Result<Vec<(usize, f64)>> {
    chain_lengths
        .iter()
        .map(|&sites| {
            if sites < n {
                return Err(Error::InvalidBoundary { boundary: n, sites });
            }
            let model = RadialModel::flat(sites)?;
            Ok((sites, sum_partial_waves(&model, n, policy, tol)?.value()))
        })
        .collect()
}
