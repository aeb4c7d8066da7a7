use serde::Serialize;

use super::CubicLattice;
use crate::gaussian::PartitionMask;
use crate::{Error, Result};

/// Boolean membership of every lattice site in a region.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RegionMask {
    dims: [usize; 3],
    inside: Vec<bool>,
}

impl RegionMask {
    pub fn empty(lat: &CubicLattice) -> Self {
        Self {
            dims: lat.dims(),
            inside: vec![false; lat.sites()],
        }
    }

    pub fn from_fn(lat: &CubicLattice, mut f: impl FnMut([usize; 3]) -> bool) -> Self {
        let inside = (0..lat.sites()).map(|i| f(lat.coords(i))).collect();
        Self {
            dims: lat.dims(),
            inside,
        }
    }

    /// Builds a mask from raw per-site flags in lattice index order.
    pub fn from_flags(lat: &CubicLattice, inside: Vec<bool>) -> Result<Self> {
        if inside.len() != lat.sites() {
            return Err(Error::DimensionMismatch {
                expected: lat.sites(),
                found: inside.len(),
            });
        }
        Ok(Self {
            dims: lat.dims(),
            inside,
        })
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn lattice(&self) -> CubicLattice {
        // Dimensions were validated when the mask was built.
        CubicLattice { dims: self.dims }
    }

    pub fn len(&self) -> usize {
        self.inside.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inside.is_empty()
    }

    pub fn flags(&self) -> &[bool] {
        &self.inside
    }

    pub fn count(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }

    pub fn contains(&self, c: [usize; 3]) -> bool {
        self.inside[self.lattice().index(c)]
    }

    pub fn complement(&self) -> Self {
        Self {
            dims: self.dims,
            inside: self.inside.iter().map(|b| !b).collect(),
        }
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(Self {
            dims: self.dims,
            inside: self
                .inside
                .iter()
                .zip(&other.inside)
                .map(|(a, b)| *a || *b)
                .collect(),
        })
    }

    /// Rigid shift of the region; fails if any member leaves the lattice.
    pub fn translated(&self, shift: [i64; 3]) -> Result<Self> {
        let lat = self.lattice();
        let mut out = Self::empty(&lat);
        for (i, _) in self.inside.iter().enumerate().filter(|(_, b)| **b) {
            let c = lat.coords(i);
            let mut n = [0usize; 3];
            for a in 0..3 {
                let v = c[a] as i64 + shift[a];
                if v < 0 || v >= self.dims[a] as i64 {
                    return Err(Error::RegionOutOfBounds(format!(
                        "shift {shift:?} moves site {c:?} outside {:?}",
                        self.dims
                    )));
                }
                n[a] = v as usize;
            }
            out.inside[lat.index(n)] = true;
        }
        Ok(out)
    }

    /// Partition with the region's sites traced out.
    pub fn partition(&self) -> PartitionMask {
        PartitionMask::new(self.inside.clone())
    }
}

/// Axis-aligned box given by its low corner and extent in sites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BoxSpec {
    pub corner: [usize; 3],
    pub size: [usize; 3],
}

impl BoxSpec {
    pub fn new(corner: [usize; 3], size: [usize; 3]) -> Self {
        Self { corner, size }
    }

    /// Cube of the given edge centred in the lattice (rounded towards the
    /// low corner).
    pub fn centered(lat: &CubicLattice, edge: usize) -> Self {
        let d = lat.dims();
        Self {
            corner: d.map(|n| n.saturating_sub(edge) / 2),
            size: [edge; 3],
        }
    }

    fn upper(&self) -> [usize; 3] {
        [
            self.corner[0] + self.size[0],
            self.corner[1] + self.size[1],
            self.corner[2] + self.size[2],
        ]
    }

    fn contains(&self, c: [usize; 3]) -> bool {
        let u = self.upper();
        (0..3).all(|a| c[a] >= self.corner[a] && c[a] < u[a])
    }

    fn check_fits(&self, lat: &CubicLattice) -> Result<()> {
        let u = self.upper();
        if (0..3).any(|a| u[a] > lat.dims()[a]) {
            return Err(Error::RegionOutOfBounds(format!(
                "box {self:?} exceeds lattice {:?}",
                lat.dims()
            )));
        }
        Ok(())
    }
}

pub fn region_box(lat: &CubicLattice, spec: BoxSpec) -> Result<RegionMask> {
    spec.check_fits(lat)?;
    Ok(RegionMask::from_fn(lat, |c| spec.contains(c)))
}

/// Hollow shell: the outer box minus the inner box.
pub fn region_shell(lat: &CubicLattice, inner: BoxSpec, outer: BoxSpec) -> Result<RegionMask> {
    outer.check_fits(lat)?;
    let (iu, ou) = (inner.upper(), outer.upper());
    if (0..3).any(|a| inner.corner[a] < outer.corner[a] || iu[a] > ou[a]) {
        return Err(Error::RegionOutOfBounds(format!(
            "inner box {inner:?} is not contained in outer box {outer:?}"
        )));
    }
    Ok(RegionMask::from_fn(lat, |c| {
        outer.contains(c) && !inner.contains(c)
    }))
}

/// Voxelized ball: every site whose centre lies within `radius` of `center`
/// (closed ball). `center` may be a site or a dual point.
pub fn region_voxel_sphere(
    lat: &CubicLattice,
    center: [f64; 3],
    radius: f64,
) -> Result<RegionMask> {
    if !(radius >= 0.0 && radius.is_finite()) {
        return Err(Error::RegionOutOfBounds(format!("radius {radius}")));
    }
    let d = lat.dims();
    if (0..3).any(|a| center[a] - radius < 0.0 || center[a] + radius > (d[a] - 1) as f64) {
        return Err(Error::RegionOutOfBounds(format!(
            "sphere of radius {radius} at {center:?} exceeds lattice {d:?}"
        )));
    }
    let r2 = radius * radius;
    Ok(RegionMask::from_fn(lat, |c| {
        let d2: f64 = (0..3).map(|a| (c[a] as f64 - center[a]).powi(2)).sum();
        d2 <= r2
    }))
}

/// Whether faces against the lattice wall count as entangling surface.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum WallFaces {
    /// Only faces between an inside and an outside site count. With this
    /// convention a mask and its complement have the same surface.
    #[default]
    Exclude,
    /// Faces of inside sites against the array boundary count as well.
    Include,
}

/// Staircase surface of a voxel region.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VoxelSurface {
    pub exposed_faces: usize,
    /// `exposed_faces · a²`.
    pub area: f64,
}

impl VoxelSurface {
    pub fn area_over_4a2(&self) -> f64 {
        self.area / 4.0
    }
}

pub fn exposed_face_area(mask: &RegionMask, walls: WallFaces) -> VoxelSurface {
    let lat = mask.lattice();
    let flags = mask.flags();
    let mut faces = lat.bonds().filter(|&(i, j)| flags[i] != flags[j]).count();
    if walls == WallFaces::Include {
        let d = lat.dims();
        for (i, _) in flags.iter().enumerate().filter(|(_, b)| **b) {
            let c = lat.coords(i);
            faces += (0..3)
                .map(|a| usize::from(c[a] == 0) + usize::from(c[a] + 1 == d[a]))
                .sum::<usize>();
        }
    }
    VoxelSurface {
        exposed_faces: faces,
        area: faces as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn lat(n: usize) -> CubicLattice {
        CubicLattice::new([n, n, n]).unwrap()
    }

    #[test]
    fn full_box_is_full_mask() {
        let l = lat(4);
        let m = region_box(&l, BoxSpec::new([0, 0, 0], [4, 4, 4])).unwrap();
        assert_eq!(m.count(), 64);
        assert_eq!(exposed_face_area(&m, WallFaces::Exclude).exposed_faces, 0);
        assert_eq!(exposed_face_area(&m, WallFaces::Include).exposed_faces, 96);
    }

    #[test]
    fn box_out_of_bounds() {
        assert!(matches!(
            region_box(&lat(4), BoxSpec::new([2, 0, 0], [3, 1, 1])),
            Err(Error::RegionOutOfBounds(_))
        ));
    }

    #[test]
    fn tiny_sphere_is_one_site() {
        let l = lat(5);
        let m = region_voxel_sphere(&l, [2.0, 2.0, 2.0], 0.49).unwrap();
        assert_eq!(m.count(), 1);
        assert!(m.contains([2, 2, 2]));
    }

    #[test]
    fn sphere_must_fit() {
        assert!(region_voxel_sphere(&lat(5), [2.0, 2.0, 2.0], 2.5).is_err());
        assert!(region_voxel_sphere(&lat(5), [2.0, 2.0, 2.0], 2.0).is_ok());
    }

    #[test]
    fn sphere_volume_by_enumeration() {
        let l = lat(16);
        let r = 4.5;
        let m = region_voxel_sphere(&l, [8.0, 8.0, 8.0], r).unwrap();
        // Independent count over the integer points of the ball.
        let mut count = 0;
        for x in -5i32..=5 {
            for y in -5i32..=5 {
                for z in -5i32..=5 {
                    if ((x * x + y * y + z * z) as f64) <= r * r {
                        count += 1;
                    }
                }
            }
        }
        assert_eq!(m.count(), count);
        let ball = 4.0 / 3.0 * PI * r.powi(3);
        assert!((count as f64 / ball - 1.0).abs() < 0.05);
    }

    #[test]
    fn face_counts() {
        let l = lat(6);
        let single = region_box(&l, BoxSpec::new([2, 2, 2], [1, 1, 1])).unwrap();
        assert_eq!(
            exposed_face_area(&single, WallFaces::Exclude).exposed_faces,
            6
        );
        let cube = region_box(&l, BoxSpec::new([2, 2, 2], [2, 2, 2])).unwrap();
        assert_eq!(
            exposed_face_area(&cube, WallFaces::Exclude).exposed_faces,
            24
        );
        let corner = region_box(&l, BoxSpec::new([0, 0, 0], [2, 2, 2])).unwrap();
        assert_eq!(
            exposed_face_area(&corner, WallFaces::Exclude).exposed_faces,
            12
        );
        assert_eq!(
            exposed_face_area(&corner, WallFaces::Include).exposed_faces,
            24
        );
    }

    #[test]
    fn shell_counts_both_surfaces() {
        let l = lat(8);
        let shell = region_shell(
            &l,
            BoxSpec::new([3, 3, 3], [2, 2, 2]),
            BoxSpec::new([1, 1, 1], [6, 6, 6]),
        )
        .unwrap();
        assert_eq!(shell.count(), 216 - 8);
        let s = exposed_face_area(&shell, WallFaces::Exclude);
        assert_eq!(s.exposed_faces, 6 * 36 + 6 * 4);
        assert!(region_shell(
            &l,
            BoxSpec::new([0, 3, 3], [2, 2, 2]),
            BoxSpec::new([1, 1, 1], [6, 6, 6]),
        )
        .is_err());
    }

    #[test]
    fn complement_has_same_surface() {
        let l = lat(7);
        let m = region_voxel_sphere(&l, [3.0, 3.0, 3.0], 2.2).unwrap();
        let a = exposed_face_area(&m, WallFaces::Exclude);
        let b = exposed_face_area(&m.complement(), WallFaces::Exclude);
        assert_eq!(a, b);
    }

    #[test]
    fn staircase_area_approaches_six_pi_r_squared() {
        let l = lat(17);
        let mut ratios = Vec::new();
        for r in 3..=7 {
            let m = region_voxel_sphere(&l, [8.0, 8.0, 8.0], r as f64).unwrap();
            let s = exposed_face_area(&m, WallFaces::Exclude);
            ratios.push(s.area / (PI * (r * r) as f64));
        }
        let last = *ratios.last().unwrap();
        assert!((last / 6.0 - 1.0).abs() < 0.10, "ratios {ratios:?}");
    }

    #[test]
    fn translation_respects_bounds() {
        let l = lat(5);
        let m = region_box(&l, BoxSpec::new([1, 1, 1], [2, 2, 2])).unwrap();
        let t = m.translated([1, 1, 0]).unwrap();
        assert!(t.contains([3, 3, 2]));
        assert_eq!(t.count(), 8);
        assert!(m.translated([3, 0, 0]).is_err());
    }
}
