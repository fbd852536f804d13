//! Icosahedral discrete global grids: ISEA4T, ISEA4H, ISEA3H.
//!
//! All three grids share one construction: an icosahedron is placed on the
//! unit sphere, each face carries a planar triangle, and cell layouts drawn
//! on those triangles are pushed onto the sphere with an equal-area
//! projection.  ISEA4T subdivides each face into 4^k congruent triangles.
//! The hexagon grids place cell centers on a triangular lattice; ISEA4H
//! doubles the lattice frequency per level, ISEA3H refines by sqrt(3) per
//! level, alternating between two lattice orientations (class I and II).
//! Twelve cells of every hexagon resolution are pentagons centered on the
//! icosahedron vertices, with 5/6 of a hexagon's area.
//!
//! Cells are addressed by `(face, i, j)`; for triangles that is row and
//! position, for hexagons the barycentric numerators of the center.  Cells
//! straddling several faces use the lexicographically smallest frame.

pub mod icosa;
pub(crate) mod lattice;
pub mod snyder;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::SplitMix64;
use crate::sphere::{SphericalPolygon, UnitVec};
use icosa::{bary_from_planar, planar_from_bary, Icosahedron, Orientation, PLANAR_AREA};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    Isea4t,
    Isea4h,
    Isea3h,
}

impl GridKind {
    pub const ALL: [GridKind; 3] = [GridKind::Isea4t, GridKind::Isea4h, GridKind::Isea3h];

    pub fn name(self) -> &'static str {
        match self {
            GridKind::Isea4t => "isea4t",
            GridKind::Isea4h => "isea4h",
            GridKind::Isea3h => "isea3h",
        }
    }

    /// Cell-count growth factor per resolution step.
    pub fn aperture(self) -> u32 {
        match self {
            GridKind::Isea4t | GridKind::Isea4h => 4,
            GridKind::Isea3h => 3,
        }
    }

    pub fn is_triangular(self) -> bool {
        matches!(self, GridKind::Isea4t)
    }

    /// Finest supported resolution (64-bit addressing headroom).
    pub fn max_resolution(self) -> u8 {
        match self {
            GridKind::Isea4t | GridKind::Isea4h => 15,
            GridKind::Isea3h => 20,
        }
    }
}

impl fmt::Display for GridKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GridKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "isea4t" => Ok(GridKind::Isea4t),
            "isea4h" => Ok(GridKind::Isea4h),
            "isea3h" => Ok(GridKind::Isea3h),
            _ => Err(format!(
                "unknown grid {s:?} (expected isea4t, isea4h or isea3h)"
            )),
        }
    }
}

/// Address of one cell.  For ISEA4T, `i` is the row within the face and `j`
/// the position within the row (even up, odd down).  For the hexagon grids,
/// `(i, j)` are the (b, c) barycentric numerators of the cell center on the
/// face lattice, in the cell's canonical (lowest-index) face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellId {
    pub grid: GridKind,
    pub res: u8,
    pub face: u8,
    pub i: u32,
    pub j: u32,
}

impl CellId {
    /// ISEA3H alternates two lattice orientations; odd resolutions are the
    /// rotated class II layouts.
    pub fn is_class_ii(&self) -> bool {
        self.grid == GridKind::Isea3h && self.res % 2 == 1
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}:{}:{}",
            self.grid, self.res, self.face, self.i, self.j
        )
    }
}

impl FromStr for CellId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 5 {
            return Err(format!("cell id {s:?} must have 5 ':'-separated fields"));
        }
        let bad = |what: &str| format!("cell id {s:?}: bad {what}");
        Ok(CellId {
            grid: parts[0].parse().map_err(|_| bad("grid"))?,
            res: parts[1].parse().map_err(|_| bad("resolution"))?,
            face: parts[2].parse().map_err(|_| bad("face"))?,
            i: parts[3].parse().map_err(|_| bad("i"))?,
            j: parts[4].parse().map_err(|_| bad("j"))?,
        })
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("resolution {res} exceeds the maximum {max} supported by {grid}")]
    ResolutionOverflow { grid: GridKind, res: u8, max: u8 },
}

/// Diameter summary over the cells of one resolution.  `sampled` is None
/// when every cell was measured, or the number of distinct cells actually
/// measured when the grid was too large and cells were sampled via random
/// point lookups.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DiameterStats {
    pub min_rad: f64,
    pub max_rad: f64,
    pub mean_rad: f64,
    pub cells: u64,
    pub sampled: Option<u64>,
}

pub struct Grid {
    kind: GridKind,
    icosa: Icosahedron,
}

/// A cell corner with its planar representations (one per face it touches)
/// and its position on the sphere.
struct CornerPoint {
    reps: Vec<(u8, f64, f64)>,
    p: UnitVec,
    ang: f64,
}

/// A consecutive corner pair expressed in one planar frame.
enum PairFrame {
    Shared {
        face: u8,
        u: (f64, f64),
        v: (f64, f64),
    },
    /// `v` is already unfolded into `face`'s frame; `edge` folds points
    /// beyond the shared icosahedron edge back into face `other`.
    Unfolded {
        face: u8,
        edge: usize,
        other: u8,
        u: (f64, f64),
        v: (f64, f64),
    },
}

impl Grid {
    pub fn new(kind: GridKind) -> Self {
        Grid {
            kind,
            icosa: Icosahedron::new(Orientation::default()),
        }
    }

    pub fn with_orientation(kind: GridKind, orientation: Orientation) -> Self {
        Grid {
            kind,
            icosa: Icosahedron::new(orientation),
        }
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn icosahedron(&self) -> &Icosahedron {
        &self.icosa
    }

    fn check_res(&self, res: u8) -> Result<(), GridError> {
        let max = self.kind.max_resolution();
        if res > max {
            Err(GridError::ResolutionOverflow {
                grid: self.kind,
                res,
                max,
            })
        } else {
            Ok(())
        }
    }

    /// Hexagon lattice frequency at a resolution.
    fn freq(&self, res: u8) -> i64 {
        match self.kind {
            GridKind::Isea4t | GridKind::Isea4h => 1i64 << res,
            GridKind::Isea3h => 3i64.pow((res as u32 + 1) / 2),
        }
    }

    fn class_ii(&self, res: u8) -> bool {
        self.kind == GridKind::Isea3h && res % 2 == 1
    }

    /// Number of cells at a resolution, in closed form.
    pub fn cell_count(&self, res: u8) -> Result<u64, GridError> {
        self.check_res(res)?;
        Ok(match self.kind {
            GridKind::Isea4t => 20u64 << (2 * res as u32),
            GridKind::Isea4h => (10u64 << (2 * res as u32)) + 2,
            GridKind::Isea3h => 10 * 3u64.pow(res as u32) + 2,
        })
    }

    /// Exact area every cell of this resolution has (pentagons are 5/6 of
    /// a hexagon; triangle cells are all congruent images).
    pub fn ideal_cell_area(&self, res: u8, pentagon: bool) -> Result<f64, GridError> {
        let count = self.cell_count(res)? as f64;
        Ok(match self.kind {
            GridKind::Isea4t => 4.0 * PI / count,
            _ => {
                let hex = 4.0 * PI / (count - 2.0);
                if pentagon {
                    hex * 5.0 / 6.0
                } else {
                    hex
                }
            }
        })
    }

    pub fn is_pentagon(&self, id: CellId) -> bool {
        debug_assert_eq!(id.grid, self.kind);
        !self.kind.is_triangular()
            && lattice::hex_vertex_slot(self.freq(id.res), id.i as i64, id.j as i64).is_some()
    }

    /// All cells of a resolution, ascending by (face, i, j).
    pub fn enumerate(&self, res: u8) -> Result<Vec<CellId>, GridError> {
        self.check_res(res)?;
        let mut out = Vec::new();
        if self.kind.is_triangular() {
            let n = 1i64 << res;
            for face in 0..20u8 {
                for i in 0..n {
                    for j in 0..(2 * i + 1) {
                        out.push(self.id(res, face, i, j));
                    }
                }
            }
        } else {
            let freq = self.freq(res);
            let class_ii = self.class_ii(res);
            for face in 0..20u8 {
                for (b, c) in lattice::hex_enumerate_owned(&self.icosa, freq, class_ii, face) {
                    out.push(self.id(res, face, b, c));
                }
            }
        }
        Ok(out)
    }

    fn id(&self, res: u8, face: u8, i: i64, j: i64) -> CellId {
        CellId {
            grid: self.kind,
            res,
            face,
            i: i as u32,
            j: j as u32,
        }
    }

    /// The cell containing a point.  Points on shared boundaries resolve
    /// deterministically (they belong to every touching closed cell).
    pub fn locate(&self, res: u8, p: UnitVec) -> Result<CellId, GridError> {
        self.check_res(res)?;
        let (face, x, y) = snyder::sphere_to_plane(&self.icosa, p);
        Ok(if self.kind.is_triangular() {
            let (i, j) = lattice::tri_locate(res, x, y);
            self.id(res, face, i, j)
        } else {
            let (f, b, c) = lattice::hex_locate(
                &self.icosa,
                self.freq(res),
                self.class_ii(res),
                face,
                x,
                y,
            );
            self.id(res, f, b, c)
        })
    }

    /// Candidate children at the next resolution.  Triangle children tile
    /// the parent exactly; hexagon children are the center child plus the
    /// surrounding ring, a deliberate superset such that every finer cell
    /// overlapping the parent appears among the candidates of the parent
    /// or of one of its edge neighbours.
    pub fn children(&self, id: CellId) -> Result<Vec<CellId>, GridError> {
        debug_assert_eq!(id.grid, self.kind);
        self.check_res(id.res + 1)?;
        let res = id.res + 1;
        Ok(match self.kind {
            GridKind::Isea4t => lattice::tri_children(id.i as i64, id.j as i64)
                .iter()
                .map(|&(i, j)| self.id(res, id.face, i, j))
                .collect(),
            GridKind::Isea4h => {
                lattice::hex_children_a4(&self.icosa, self.freq(id.res), id.face, id.i as i64, id.j as i64)
                    .into_iter()
                    .map(|(f, b, c)| self.id(res, f, b, c))
                    .collect()
            }
            GridKind::Isea3h => lattice::hex_children_a3(
                &self.icosa,
                self.freq(id.res),
                self.class_ii(id.res),
                id.face,
                id.i as i64,
                id.j as i64,
            )
            .into_iter()
            .map(|(f, b, c)| self.id(res, f, b, c))
            .collect(),
        })
    }

    /// Edge-adjacent cells: 3 for triangles, 6 for hexagons, 5 for the 12
    /// pentagons.
    pub fn neighbors(&self, id: CellId) -> Vec<CellId> {
        debug_assert_eq!(id.grid, self.kind);
        if self.kind.is_triangular() {
            lattice::tri_neighbors(&self.icosa, id.res, id.face, id.i as i64, id.j as i64)
                .iter()
                .map(|&(f, i, j)| self.id(id.res, f, i, j))
                .collect()
        } else {
            lattice::hex_neighbors(
                &self.icosa,
                self.freq(id.res),
                self.class_ii(id.res),
                id.face,
                id.i as i64,
                id.j as i64,
            )
            .into_iter()
            .map(|(f, b, c)| self.id(id.res, f, b, c))
            .collect()
        }
    }

    pub fn cell_center(&self, id: CellId) -> UnitVec {
        debug_assert_eq!(id.grid, self.kind);
        let freq = self.freq(id.res) as f64;
        let face = self.icosa.face(id.face);
        if self.kind.is_triangular() {
            let cs = lattice::tri_corners_bc(id.i as i64, id.j as i64);
            let fb = cs.iter().map(|&(b, _)| b).sum::<i64>() as f64 / (3.0 * freq);
            let fc = cs.iter().map(|&(_, c)| c).sum::<i64>() as f64 / (3.0 * freq);
            let (x, y) = planar_from_bary(1.0 - fb - fc, fb, fc);
            snyder::plane_to_sphere(face, x, y)
        } else {
            let (b, c) = (id.i as f64 / freq, id.j as f64 / freq);
            let (x, y) = planar_from_bary(1.0 - b - c, b, c);
            snyder::plane_to_sphere(face, x, y)
        }
    }

    /// Sensible boundary densification per resolution: coarse cells have
    /// long curved edges, fine cells are nearly flat.
    pub fn default_densify(&self, res: u8) -> usize {
        match res {
            0..=2 => 8,
            3..=5 => 4,
            6..=9 => 2,
            _ => 1,
        }
    }

    /// Cell outline as a spherical polygon, counter-clockwise, with
    /// `densify` extra points per edge.  Edges follow the projected images
    /// of the straight planar cell edges (unfolding across icosahedron
    /// edges where a cell straddles faces).
    pub fn cell_boundary(&self, id: CellId, densify: usize) -> SphericalPolygon {
        debug_assert_eq!(id.grid, self.kind);
        let pts = self.ordered_corners(id);
        let k = pts.len();
        let mut ring = Vec::with_capacity(k * (densify + 1));
        for idx in 0..k {
            let cu = &pts[idx];
            let cv = &pts[(idx + 1) % k];
            ring.push(cu.p);
            if densify == 0 {
                continue;
            }
            match self.pair_frame(cu, cv) {
                PairFrame::Shared { face, u, v } => {
                    for s in 1..=densify {
                        let t = s as f64 / (densify + 1) as f64;
                        let x = u.0 + t * (v.0 - u.0);
                        let y = u.1 + t * (v.1 - u.1);
                        ring.push(snyder::plane_to_sphere(self.icosa.face(face), x, y));
                    }
                }
                PairFrame::Unfolded { face, edge, other, u, v } => {
                    let face_u = self.icosa.face(face);
                    for s in 1..=densify {
                        let t = s as f64 / (densify + 1) as f64;
                        let x = u.0 + t * (v.0 - u.0);
                        let y = u.1 + t * (v.1 - u.1);
                        let (a, b, c) = bary_from_planar(x, y);
                        if a.min(b).min(c) >= 0.0 {
                            ring.push(snyder::plane_to_sphere(face_u, x, y));
                        } else {
                            let (gx, gy) = face_u.fold[edge].apply(x, y);
                            ring.push(snyder::plane_to_sphere(self.icosa.face(other), gx, gy));
                        }
                    }
                }
            }
        }
        SphericalPolygon::try_new(ring).expect("cell boundaries are simple rings")
    }

    /// Exact spherical cell area in steradians.  The projection is
    /// equal-area with a constant planar-to-spherical scale, and cell edges
    /// are straight in the (possibly unfolded) face plane, so the planar
    /// shoelace area converts exactly.  No boundary sampling is involved.
    pub fn cell_area(&self, id: CellId) -> f64 {
        debug_assert_eq!(id.grid, self.kind);
        let pts = self.ordered_corners(id);
        let centers = self.center_frames(id);
        let center_in = |f: u8| {
            centers
                .iter()
                .find(|&&(g, _, _)| g == f)
                .map(|&(_, x, y)| (x, y))
                .expect("cell center is representable in every frame touching the cell")
        };
        let k = pts.len();
        let mut planar = 0.0;
        for idx in 0..k {
            let cu = &pts[idx];
            let cv = &pts[(idx + 1) % k];
            let (face, u, v) = match self.pair_frame(cu, cv) {
                PairFrame::Shared { face, u, v } => (face, u, v),
                PairFrame::Unfolded { face, u, v, .. } => (face, u, v),
            };
            let (cx, cy) = center_in(face);
            planar += 0.5 * ((u.0 - cx) * (v.1 - cy) - (v.0 - cx) * (u.1 - cy));
        }
        planar / (PLANAR_AREA / (4.0 * PI / 20.0))
    }

    /// Corners sorted counter-clockwise around the cell center.
    fn ordered_corners(&self, id: CellId) -> Vec<CornerPoint> {
        let center = self.cell_center(id);
        let mut pts: Vec<CornerPoint> = self
            .corner_frames(id)
            .into_iter()
            .map(|reps| {
                let (f, x, y) = reps[0];
                CornerPoint {
                    p: snyder::plane_to_sphere(self.icosa.face(f), x, y),
                    reps,
                    ang: 0.0,
                }
            })
            .collect();
        let t_ref = center
            .tangent_towards(pts[0].p)
            .expect("cell corners are distinct from the center");
        for c in pts.iter_mut() {
            let tp = center.tangent_towards(c.p).unwrap();
            let cr = t_ref.cross(tp);
            let sin = cr.0 * center.x + cr.1 * center.y + cr.2 * center.z;
            let cos = tp.dot(t_ref);
            let a = sin.atan2(cos);
            c.ang = if a < 0.0 {
                a + 2.0 * PI
            } else {
                a
            };
        }
        pts.sort_by(|a, b| a.ang.total_cmp(&b.ang));
        pts
    }

    /// Common planar frame for a consecutive corner pair.  Prefers a face
    /// both corners touch (the cell edge is then a straight segment there);
    /// otherwise the corners sit in adjacent faces and the second corner is
    /// unfolded into the frame of the first.
    fn pair_frame(&self, cu: &CornerPoint, cv: &CornerPoint) -> PairFrame {
        let shared = cu.reps.iter().find_map(|&(fu, ux, uy)| {
            cv.reps
                .iter()
                .find(|&&(fv, _, _)| fv == fu)
                .map(|&(_, vx, vy)| (fu, (ux, uy), (vx, vy)))
        });
        if let Some((face, u, v)) = shared {
            return PairFrame::Shared { face, u, v };
        }
        cu.reps
            .iter()
            .find_map(|&(fu, ux, uy)| {
                let face_u = self.icosa.face(fu);
                cv.reps.iter().find_map(|&(fv, vx, vy)| {
                    face_u
                        .adjacent
                        .iter()
                        .position(|&(g, _)| g == fv)
                        .map(|e| PairFrame::Unfolded {
                            face: fu,
                            edge: e,
                            other: fv,
                            u: (ux, uy),
                            v: face_u.fold[e].inverse().apply(vx, vy),
                        })
                })
            })
            .expect("consecutive cell corners lie in the same or adjacent faces")
    }

    /// Planar cell-center coordinates in every face frame touching the cell.
    fn center_frames(&self, id: CellId) -> Vec<(u8, f64, f64)> {
        let freq = self.freq(id.res);
        if self.kind.is_triangular() {
            let n = freq as f64;
            let cs = lattice::tri_corners_bc(id.i as i64, id.j as i64);
            let fb = cs.iter().map(|&(b, _)| b).sum::<i64>() as f64 / (3.0 * n);
            let fc = cs.iter().map(|&(_, c)| c).sum::<i64>() as f64 / (3.0 * n);
            let (x, y) = planar_from_bary(1.0 - fb - fc, fb, fc);
            vec![(id.face, x, y)]
        } else {
            lattice::hex_frames(&self.icosa, freq, id.face, id.i as i64, id.j as i64)
                .into_iter()
                .map(|(f, b, c)| {
                    let (fb, fc) = (b as f64 / freq as f64, c as f64 / freq as f64);
                    let (x, y) = planar_from_bary(1.0 - fb - fc, fb, fc);
                    (f, x, y)
                })
                .collect()
        }
    }

    /// Corner positions in planar face frames, unordered.  Each corner is a
    /// list of equivalent representations, one per face it touches.
    fn corner_frames(&self, id: CellId) -> Vec<Vec<(u8, f64, f64)>> {
        if self.kind.is_triangular() {
            let n = self.freq(id.res) as f64;
            lattice::tri_corners_bc(id.i as i64, id.j as i64)
                .iter()
                .map(|&(b, c)| {
                    let (fb, fc) = (b as f64 / n, c as f64 / n);
                    let (x, y) = planar_from_bary(1.0 - fb - fc, fb, fc);
                    vec![(id.face, x, y)]
                })
                .collect()
        } else {
            lattice::hex_corner_frames(
                &self.icosa,
                self.freq(id.res),
                self.class_ii(id.res),
                id.face,
                id.i as i64,
                id.j as i64,
            )
        }
    }

    pub fn cell_diameter(&self, id: CellId, densify: usize) -> f64 {
        self.cell_boundary(id, densify).diameter()
    }

    /// Min, max and mean cell diameter at a resolution.  Enumerates every
    /// cell when feasible, otherwise samples cells through random points.
    pub fn diameter_stats(&self, res: u8) -> Result<DiameterStats, GridError> {
        let count = self.cell_count(res)?;
        let densify = self.default_densify(res).max(2);
        let ids: Vec<CellId> = if count <= 50_000 {
            self.enumerate(res)?
        } else {
            let mut rng = SplitMix64::new(0x5EED);
            let mut set = std::collections::BTreeSet::new();
            for _ in 0..20_000 {
                let z = 2.0 * rng.next_f64() - 1.0;
                let t = 2.0 * PI * rng.next_f64();
                let r = (1.0 - z * z).sqrt();
                set.insert(self.locate(res, UnitVec::new(r * t.cos(), r * t.sin(), z))?);
            }
            set.into_iter().collect()
        };
        let sampled = if count <= 50_000 {
            None
        } else {
            Some(ids.len() as u64)
        };
        let diams: Vec<f64> = ids
            .par_iter()
            .map(|&id| self.cell_diameter(id, densify))
            .collect();
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut sum = 0.0;
        for d in &diams {
            min = min.min(*d);
            max = max.max(*d);
            sum += d;
        }
        Ok(DiameterStats {
            min_rad: min,
            max_rad: max,
            mean_rad: sum / diams.len() as f64,
            cells: count,
            sampled,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::Containment;

    fn grids() -> [Grid; 3] {
        [
            Grid::new(GridKind::Isea4t),
            Grid::new(GridKind::Isea4h),
            Grid::new(GridKind::Isea3h),
        ]
    }

    #[test]
    fn cell_counts_match_closed_forms() {
        let checks: [(GridKind, &[(u8, u64)]); 3] = [
            (GridKind::Isea4t, &[(0, 20), (1, 80), (2, 320), (3, 1280)]),
            (GridKind::Isea4h, &[(0, 12), (1, 42), (2, 162), (3, 642)]),
            (
                GridKind::Isea3h,
                &[(0, 12), (1, 32), (2, 92), (3, 272), (4, 812)],
            ),
        ];
        for (kind, pairs) in checks {
            let grid = Grid::new(kind);
            for &(res, want) in pairs {
                assert_eq!(grid.cell_count(res).unwrap(), want, "{kind} res {res}");
                assert_eq!(
                    grid.enumerate(res).unwrap().len() as u64,
                    want,
                    "{kind} res {res} enumeration"
                );
            }
        }
    }

    #[test]
    fn resolution_limits_are_enforced() {
        for grid in grids() {
            let max = grid.kind().max_resolution();
            assert!(grid.cell_count(max).is_ok());
            assert!(matches!(
                grid.cell_count(max + 1),
                Err(GridError::ResolutionOverflow { .. })
            ));
        }
    }

    #[test]
    fn enumeration_is_sorted_and_unique() {
        for grid in grids() {
            let ids = grid.enumerate(2).unwrap();
            for w in ids.windows(2) {
                assert!(w[0] < w[1]);
            }
        }
    }

    #[test]
    fn locate_round_trips_every_cell_center() {
        for grid in grids() {
            for res in 0..=2u8 {
                for id in grid.enumerate(res).unwrap() {
                    let c = grid.cell_center(id);
                    assert_eq!(grid.locate(res, c).unwrap(), id, "{id}");
                }
            }
        }
    }

    #[test]
    fn res0_triangles_are_the_icosahedron_faces() {
        let grid = Grid::new(GridKind::Isea4t);
        let expect = 2.0f64.atan();
        for id in grid.enumerate(0).unwrap() {
            let d = grid.cell_diameter(id, 8);
            assert!((d - expect).abs() < 1e-12, "{id}: {d}");
        }
        let stats = grid.diameter_stats(0).unwrap();
        assert!((stats.min_rad - expect).abs() < 1e-12);
        assert!((stats.max_rad - expect).abs() < 1e-12);
        assert_eq!(stats.cells, 20);
        assert!(stats.sampled.is_none());
    }

    #[test]
    fn hexagon_grids_have_exactly_12_pentagons_with_5_corners_and_neighbors() {
        for kind in [GridKind::Isea4h, GridKind::Isea3h] {
            let grid = Grid::new(kind);
            for res in 0..=2u8 {
                let mut pentagons = 0;
                for id in grid.enumerate(res).unwrap() {
                    if grid.is_pentagon(id) {
                        pentagons += 1;
                        assert_eq!(grid.cell_boundary(id, 0).ring().len(), 5, "{id}");
                        assert_eq!(grid.neighbors(id).len(), 5, "{id}");
                    } else {
                        assert_eq!(grid.cell_boundary(id, 0).ring().len(), 6, "{id}");
                        assert_eq!(grid.neighbors(id).len(), 6, "{id}");
                    }
                }
                assert_eq!(pentagons, 12, "{kind} res {res}");
            }
        }
    }

    #[test]
    fn triangle_children_tile_and_hex_children_are_seven_candidates() {
        let tri = Grid::new(GridKind::Isea4t);
        for id in tri.enumerate(1).unwrap() {
            let kids = tri.children(id).unwrap();
            assert_eq!(kids.len(), 4);
            let parent = tri.cell_boundary(id, 16);
            for kid in kids {
                let c = tri.cell_center(kid);
                assert_ne!(parent.contains(c), Containment::Outside, "{kid}");
            }
        }
        for kind in [GridKind::Isea4h, GridKind::Isea3h] {
            let grid = Grid::new(kind);
            for id in grid.enumerate(1).unwrap() {
                let kids = grid.children(id).unwrap();
                let want = if grid.is_pentagon(id) { 6 } else { 7 };
                assert_eq!(kids.len(), want, "{id}");
            }
        }
    }

    #[test]
    fn neighbor_relation_is_symmetric_across_the_public_api() {
        for grid in grids() {
            for res in 0..=2u8 {
                for id in grid.enumerate(res).unwrap() {
                    for nb in grid.neighbors(id) {
                        assert!(grid.neighbors(nb).contains(&id), "{id} <-> {nb}");
                    }
                }
            }
        }
    }

    #[test]
    fn res1_triangle_cells_have_exactly_a_fifth_of_a_face_each() {
        let grid = Grid::new(GridKind::Isea4t);
        let want = 4.0 * PI / 80.0;
        for id in grid.enumerate(1).unwrap() {
            let area = grid.cell_area(id);
            assert!((area - want).abs() < 1e-9, "{id}: {area} vs {want}");
        }
    }

    #[test]
    fn hexagons_and_pentagons_have_their_ideal_areas() {
        for kind in [GridKind::Isea4h, GridKind::Isea3h] {
            let grid = Grid::new(kind);
            for res in 1..=3u8 {
                for id in grid.enumerate(res).unwrap() {
                    let pent = grid.is_pentagon(id);
                    let want = grid.ideal_cell_area(res, pent).unwrap();
                    let area = grid.cell_area(id);
                    assert!(
                        ((area - want) / want).abs() < 1e-9,
                        "{id}: {area} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn boundary_ring_areas_converge_to_the_exact_cell_areas() {
        for kind in GridKind::ALL {
            let grid = Grid::new(kind);
            for id in [grid.enumerate(1).unwrap()[0], *grid.enumerate(2).unwrap().last().unwrap()] {
                let exact = grid.cell_area(id);
                let coarse = (grid.cell_boundary(id, 15).area() - exact).abs();
                let fine = (grid.cell_boundary(id, 63).area() - exact).abs();
                assert!(fine < 1e-5 && fine < coarse.max(1e-12), "{id}: {coarse} -> {fine}");
            }
        }
    }

    #[test]
    fn cell_areas_sum_to_the_sphere() {
        for grid in grids() {
            for res in 1..=2u8 {
                let total: f64 = grid
                    .enumerate(res)
                    .unwrap()
                    .iter()
                    .map(|&id| grid.cell_area(id))
                    .sum();
                assert!(
                    (total - 4.0 * PI).abs() < 1e-9,
                    "{} res {res}: {total}",
                    grid.kind()
                );
            }
        }
    }

    #[test]
    fn located_cells_contain_their_points() {
        let mut rng = SplitMix64::new(2024);
        for grid in grids() {
            let res = 3;
            // Precompute boundaries once; membership checks then run over
            // many random points.
            let ids = grid.enumerate(res).unwrap();
            let polys: std::collections::BTreeMap<CellId, SphericalPolygon> = ids
                .iter()
                .map(|&id| (id, grid.cell_boundary(id, 16)))
                .collect();
            for _ in 0..2000 {
                let z = 2.0 * rng.next_f64() - 1.0;
                let t = 2.0 * PI * rng.next_f64();
                let r = (1.0 - z * z).sqrt();
                let p = UnitVec::new(r * t.cos(), r * t.sin(), z);
                let id = grid.locate(res, p).unwrap();
                let poly = &polys[&id];
                if poly.contains(p) == Containment::Outside {
                    // The chord-sampled outline can clip a thin sliver off
                    // the true cell near its boundary; allow only that.
                    let min_d = poly
                        .ring()
                        .iter()
                        .map(|v| v.angle_to(p))
                        .fold(f64::INFINITY, f64::min);
                    assert!(
                        min_d < 0.02 * poly.diameter(),
                        "{id}: point {min_d} rad from ring"
                    );
                }
            }
        }
    }

    #[test]
    fn cell_id_text_round_trip() {
        let id = CellId {
            grid: GridKind::Isea3h,
            res: 7,
            face: 13,
            i: 25,
            j: 2,
        };
        assert_eq!(id.to_string(), "isea3h:7:13:25:2");
        assert_eq!("isea3h:7:13:25:2".parse::<CellId>().unwrap(), id);
        assert!("isea3h:7:13:25".parse::<CellId>().is_err());
        assert!("nope:7:13:25:2".parse::<CellId>().is_err());
    }

    #[test]
    fn grid_kind_parsing() {
        assert_eq!("isea4t".parse::<GridKind>().unwrap(), GridKind::Isea4t);
        assert_eq!("ISEA3H".parse::<GridKind>().unwrap(), GridKind::Isea3h);
        assert!("isea5x".parse::<GridKind>().is_err());
        assert_eq!(GridKind::Isea4h.to_string(), "isea4h");
    }
}
