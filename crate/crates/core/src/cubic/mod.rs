//! Cubic-grid discretization of the scalar field and entropies of arbitrary
//! voxel regions.
//!
//! The field lives on an `x × y × z` array of sites with nearest-neighbour
//! gradient couplings. Outside the array the field is pinned to zero
//! (Dirichlet walls), so every diagonal entry of `K` is 6 and `K` is strictly
//! positive definite without a mass term.

mod region;
mod rle;

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::DMatrix;
use serde::Serialize;

use crate::gaussian::{CouplingMatrix, EntropyResult, GroundState, Tolerances};
use crate::{Error, Result};

pub use region::{
    exposed_face_area, region_box, region_shell, region_voxel_sphere, BoxSpec, RegionMask,
    VoxelSurface, WallFaces,
};

/// Default cap on the number of sites, bounding the `O(N³)` decomposition.
pub const DEFAULT_MAX_SITES: usize = 5000;

const NEIGHBOUR_OFFSETS: [[usize; 3]; 3] = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];

/// Rectangular array of `x_tot · y_tot · z_tot` sites with spacing 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CubicLattice {
    dims: [usize; 3],
}

impl CubicLattice {
    pub fn new(dims: [usize; 3]) -> Result<Self> {
        Self::with_limit(dims, DEFAULT_MAX_SITES)
    }

    pub fn with_limit(dims: [usize; 3], max_sites: usize) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::EmptyLattice { dims });
        }
        let sites = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .unwrap_or(usize::MAX);
        if sites > max_sites {
            return Err(Error::LatticeTooLarge {
                sites,
                max: max_sites,
            });
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn sites(&self) -> usize {
        self.dims.iter().product()
    }

    /// Row-major site index, `z` fastest.
    pub fn index(&self, [x, y, z]: [usize; 3]) -> usize {
        (x * self.dims[1] + y) * self.dims[2] + z
    }

    pub fn coords(&self, index: usize) -> [usize; 3] {
        let z = index % self.dims[2];
        let y = (index / self.dims[2]) % self.dims[1];
        let x = index / (self.dims[1] * self.dims[2]);
        [x, y, z]
    }

    /// Geometric centre of the array; a site for odd extents, a dual point for
    /// even ones.
    pub fn center(&self) -> [f64; 3] {
        self.dims.map(|d| (d as f64 - 1.0) / 2.0)
    }

    /// Nearest-neighbour bonds `(i, j)` with `i < j` inside the array.
    pub fn bonds(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.sites()).flat_map(move |i| {
            let c = self.coords(i);
            NEIGHBOUR_OFFSETS.iter().filter_map(move |off| {
                let n = [c[0] + off[0], c[1] + off[1], c[2] + off[2]];
                (n[0] < self.dims[0] && n[1] < self.dims[1] && n[2] < self.dims[2])
                    .then(|| (i, self.index(n)))
            })
        })
    }
}

/// Gradient quadratic form restricted to bonds inside the array, without
/// wall terms. Every row sums to zero: the constant mode costs no energy.
pub fn gradient_form(lat: &CubicLattice) -> DMatrix<f64> {
    let n = lat.sites();
    let mut k = DMatrix::zeros(n, n);
    for (i, j) in lat.bonds() {
        k[(i, i)] += 1.0;
        k[(j, j)] += 1.0;
        k[(i, j)] -= 1.0;
        k[(j, i)] -= 1.0;
    }
    k
}

/// Coupling matrix of the cubic Hamiltonian with Dirichlet walls:
/// `K_jj = 6`, `K_ij = −1` for nearest neighbours.
pub fn build_cubic_coupling(lat: &CubicLattice) -> Result<CouplingMatrix> {
    let mut k = gradient_form(lat);
    for i in 0..lat.sites() {
        k[(i, i)] = 6.0;
    }
    CouplingMatrix::new(k)
}

type CacheSlot = Arc<OnceLock<std::result::Result<Arc<GroundState>, Error>>>;

/// Evaluates region entropies, decomposing each lattice's `K` at most once.
///
/// The cache is keyed by lattice dimensions. Concurrent callers for the same
/// lattice wait for a single decomposition; afterwards all lookups are
/// read-only.
#[derive(Debug, Default)]
pub struct CubicSolver {
    tol: Tolerances,
    cache: RwLock<HashMap<[usize; 3], CacheSlot>>,
}

impl CubicSolver {
    pub fn new(tol: Tolerances) -> Self {
        Self {
            tol,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn ground_state(&self, lat: &CubicLattice) -> Result<Arc<GroundState>> {
        let slot = {
            let read = self.cache.read().expect("cache lock poisoned");
            read.get(&lat.dims()).cloned()
        };
        let slot = match slot {
            Some(s) => s,
            None => {
                let mut write = self.cache.write().expect("cache lock poisoned");
                write.entry(lat.dims()).or_default().clone()
            }
        };
        slot.get_or_init(|| {
            let k = build_cubic_coupling(lat)?;
            GroundState::new(&k, &self.tol).map(Arc::new)
        })
        .clone()
    }

    pub fn cached_lattices(&self) -> usize {
        self.cache.read().expect("cache lock poisoned").len()
    }

    /// Entropy of the field inside `mask` (equivalently, outside it).
    pub fn region_entropy(&self, lat: &CubicLattice, mask: &RegionMask) -> Result<EntropyResult> {
        if mask.dims() != lat.dims() {
            return Err(Error::DimensionMismatch {
                expected: lat.sites(),
                found: mask.len(),
            });
        }
        let partition = mask.partition();
        let surface = exposed_face_area(mask, WallFaces::Exclude);
        if partition.is_degenerate() {
            return Ok(EntropyResult::zero()
                .with_meta("model", "cubic")
                .with_meta("exposed_faces", surface.exposed_faces));
        }
        let gs = self.ground_state(lat)?;
        Ok(gs
            .entropy(&partition)?
            .with_meta("model", "cubic")
            .with_meta("dims", format!("{:?}", lat.dims()))
            .with_meta("region_sites", mask.count())
            .with_meta("exposed_faces", surface.exposed_faces))
    }

    /// Same as [`region_entropy`](Self::region_entropy) but through the direct
    /// Cholesky reduction on the traced block, without side selection.
    pub fn region_entropy_direct(
        &self,
        lat: &CubicLattice,
        mask: &RegionMask,
    ) -> Result<EntropyResult> {
        let gs = self.ground_state(lat)?;
        gs.entropy_direct(&mask.partition())
    }

    /// Entropy of an `edge³` box centred in `y` and `z` and moved towards the
    /// low-`x` wall, one entry per gap (number of array sites between the
    /// box and the wall).
    pub fn wall_proximity_sweep(
        &self,
        lat: &CubicLattice,
        edge: usize,
        gaps: &[usize],
    ) -> Result<Vec<(usize, f64)>> {
        let d = lat.dims();
        let corner_y = (d[1].saturating_sub(edge)) / 2;
        let corner_z = (d[2].saturating_sub(edge)) / 2;
        gaps.iter()
            .map(|&gap| {
                let mask = region_box(
                    lat,
                    BoxSpec::new([gap, corner_y, corner_z], [edge, edge, edge]),
                )?;
                Ok((gap, self.region_entropy(lat, &mask)?.value))
            })
            .collect()
    }
}

/// Entropy of a region through a shared solver.
pub fn cubic_region_entropy(
    solver: &CubicSolver,
    lat: &CubicLattice,
    mask: &RegionMask,
) -> Result<EntropyResult> {
    solver.region_entropy(lat, mask)
}
