//! Multiscale covering counts: how many grid cells a feature set touches.
//!
//! For every resolution of a grid we count the cells whose closed region
//! intersects the input features.  A cell intersects when any of these holds:
//!
//! * a feature vertex (point, polyline vertex or polygon ring vertex) lies
//!   in the cell,
//! * a feature edge arc crosses the cell boundary,
//! * a cell boundary point lies inside a feature polygon.
//!
//! Counting proceeds hierarchically.  Resolution 0 is enumerated in full;
//! at each finer resolution only the children of intersecting cells (plus,
//! for hexagonal grids, the children of their neighbours, since hexagons do
//! not nest) are examined.  The same intersection predicate drives both the
//! hierarchical walk and the exhaustive reference path used in tests, so
//! agreement between the two checks exactly the candidate generation.
//!
//! Each resolution yields one [`CoverRecord`] holding the cell scale
//! `delta` (the largest diameter among counted cells) and two counts: cells
//! touching the features and cells touching the features' geodesic
//! bounding box.  The ratio of the two feeds the scaling-range selection
//! downstream.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

use crate::dggs::{CellId, Grid, GridError, GridKind};
use crate::sphere::{
    arcs_intersect, bbox_features, bbox_of, normalize_lon, Arc, Containment, GeoFeatureSet,
    GeoPoint, GeomError, SphericalPolygon, UnitVec,
};

/// Mean Earth radius in kilometres, used to express cell scales.
pub const EARTH_RADIUS_KM: f64 = 6371.0072;

/// Chord spacing in degrees for the parallels of the bounding-box outline.
pub const BBOX_CHORD_DEG: f64 = 0.5;

/// Candidate cells per resolution beyond which the automatic range stops.
pub const DEFAULT_CANDIDATE_CAP: usize = 5_000_000;

/// Once the feature count drops below this fraction of the bounding-box
/// count the automatic range stops descending: finer rows would be dropped
/// by the scaling-range policy anyway.
pub const DEFAULT_RATIO_STOP: f64 = 0.05;

#[derive(Debug, Error)]
pub enum CoverError {
    #[error("feature set is empty")]
    EmptyFeatures,
    #[error("invalid resolution range {k_min}..={k_max}")]
    BadRange { k_min: u8, k_max: u8 },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("could not access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed cover table: {0}")]
    BadTable(String),
}

/// Covering counts for one grid at one resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverRecord {
    pub grid: GridKind,
    pub resolution: u8,
    /// Largest diameter among counted cells, in kilometres on the mean
    /// Earth sphere.
    pub delta_km: f64,
    /// Largest diameter among counted cells, in radians.
    pub delta_rad: f64,
    /// Cells intersecting the features.
    pub n_cells: u64,
    /// Cells intersecting the features' geodesic bounding box.
    pub n_bbox_cells: u64,
}

/// A feature set preprocessed for fast cell intersection tests.
pub struct Prepared {
    verts: Vec<UnitVec>,
    arcs: Vec<PrepArc>,
    polys: Vec<PrepPoly>,
    arc_index: BucketIndex,
    poly_index: BucketIndex,
}

struct PrepArc {
    arc: Arc,
    mid: UnitVec,
    /// Half the arc length: with `mid` this caps the arc.
    half: f64,
}

struct PrepPoly {
    poly: SphericalPolygon,
    cap_center: UnitVec,
    cap_radius: f64,
}

/// Prepares a feature set for covering: collects vertices, edge arcs with
/// bounding caps, polygons, and a longitude/latitude bucket index over the
/// arcs so cells only test nearby edges.
pub fn prepare(features: &GeoFeatureSet) -> Result<Prepared, CoverError> {
    if features.is_empty() {
        return Err(CoverError::EmptyFeatures);
    }
    let verts: Vec<UnitVec> = features.vertices().iter().map(|g| g.to_unit()).collect();

    let mut arcs = Vec::new();
    let mut push_chain = |pts: &[UnitVec], close: bool| {
        let n = pts.len();
        let edges = if close && n > 2 { n } else { n.saturating_sub(1) };
        for i in 0..edges {
            let a = pts[i];
            let b = pts[(i + 1) % n];
            if let Ok(arc) = Arc::try_new(a, b) {
                let half = a.angle_to(b) / 2.0;
                arcs.push(PrepArc {
                    arc,
                    mid: a.slerp(b, 0.5),
                    half,
                });
            }
        }
    };
    for line in &features.lines {
        let chain: Vec<UnitVec> = line.iter().map(|g| g.to_unit()).collect();
        push_chain(&chain, false);
    }
    for poly in &features.polygons {
        push_chain(poly.ring(), true);
    }

    let polys: Vec<PrepPoly> = features
        .polygons
        .iter()
        .map(|poly| {
            let (cap_center, cap_radius) = poly.cap();
            PrepPoly {
                poly: poly.clone(),
                cap_center,
                cap_radius,
            }
        })
        .collect();

    let arc_index = BucketIndex::over_arcs(&arcs);
    let poly_index = BucketIndex::over_caps(
        polys
            .iter()
            .map(|pp: &PrepPoly| (pp.cap_center, pp.cap_radius)),
        polys.len(),
    );
    Ok(Prepared {
        verts,
        arcs,
        polys,
        arc_index,
        poly_index,
    })
}

/// Sparse longitude/latitude buckets over item bounding windows, so a cell
/// only examines nearby feature arcs and polygons.  Raster-derived inputs
/// put hundreds of thousands of short arcs in a few-degree region; a plain
/// scan per cell would swamp the fine resolutions.
struct BucketIndex {
    buckets: HashMap<(i32, i32), Vec<u32>>,
    len: usize,
}

const BUCKET_DEG: f64 = 0.1;
const BUCKET_MARGIN_DEG: f64 = 0.06;

impl BucketIndex {
    fn new(len: usize) -> BucketIndex {
        BucketIndex {
            buckets: HashMap::new(),
            len,
        }
    }

    /// Index arcs by windows sampled along the arc, so long arcs (the
    /// bounding-box meridians) get a tight corridor instead of a fat cap.
    fn over_arcs(arcs: &[PrepArc]) -> BucketIndex {
        let mut index = BucketIndex::new(arcs.len());
        for (idx, pa) in arcs.iter().enumerate() {
            let len_deg = (2.0 * pa.half).to_degrees();
            let samples = (len_deg / (BUCKET_DEG / 2.0)).ceil().max(1.0) as usize + 1;
            let mut lon_lo = f64::INFINITY;
            let mut lon_hi = f64::NEG_INFINITY;
            let mut lat_lo = f64::INFINITY;
            let mut lat_hi = f64::NEG_INFINITY;
            let mut unwrapped = 0.0;
            let mut prev_raw = 0.0;
            for s in 0..samples {
                let t = s as f64 / (samples - 1) as f64;
                let g = GeoPoint::from_unit(pa.arc.a.slerp(pa.arc.b, t));
                if s == 0 {
                    unwrapped = g.lon_deg;
                } else {
                    unwrapped += normalize_lon(g.lon_deg - prev_raw);
                }
                prev_raw = g.lon_deg;
                lon_lo = lon_lo.min(unwrapped);
                lon_hi = lon_hi.max(unwrapped);
                lat_lo = lat_lo.min(g.lat_deg);
                lat_hi = lat_hi.max(g.lat_deg);
            }
            index.insert_window(idx as u32, lon_lo, lon_hi, lat_lo, lat_hi);
        }
        index
    }

    /// Index items by their bounding-cap windows.
    fn over_caps(caps: impl Iterator<Item = (UnitVec, f64)>, len: usize) -> BucketIndex {
        let mut index = BucketIndex::new(len);
        for (idx, (center, radius)) in caps.enumerate() {
            let (lon_lo, lon_hi, lat_lo, lat_hi) = cap_window(center, radius);
            index.insert_window(idx as u32, lon_lo, lon_hi, lat_lo, lat_hi);
        }
        index
    }

    fn insert_window(&mut self, idx: u32, lon_lo: f64, lon_hi: f64, lat_lo: f64, lat_hi: f64) {
        for key in window_keys(
            lon_lo - BUCKET_MARGIN_DEG,
            lon_hi + BUCKET_MARGIN_DEG,
            lat_lo - BUCKET_MARGIN_DEG,
            lat_hi + BUCKET_MARGIN_DEG,
        ) {
            self.buckets.entry(key).or_default().push(idx);
        }
    }

    /// Indices of items whose window meets the cap, sorted and
    /// deduplicated.  Caps spanning more buckets than exist fall back to
    /// every item (cheaper than probing a huge window, and only coarse
    /// resolutions have caps that big).
    fn near(&self, cap_center: UnitVec, cap_radius: f64) -> Vec<u32> {
        if self.len == 0 {
            return Vec::new();
        }
        let (lon_lo, lon_hi, lat_lo, lat_hi) = cap_window(cap_center, cap_radius);
        let probes = ((lon_hi - lon_lo) / BUCKET_DEG + 1.0) * ((lat_hi - lat_lo) / BUCKET_DEG + 1.0);
        if probes > self.buckets.len() as f64 {
            return (0..self.len as u32).collect();
        }
        let mut out = Vec::new();
        for key in window_keys(lon_lo, lon_hi, lat_lo, lat_hi) {
            if let Some(v) = self.buckets.get(&key) {
                out.extend_from_slice(v);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Longitude/latitude window covering a spherical cap, with the longitude
/// span widened by the latitude and collapsing to the full circle near
/// the poles.
fn cap_window(center: UnitVec, radius: f64) -> (f64, f64, f64, f64) {
    let c = GeoPoint::from_unit(center);
    let r_deg = radius.to_degrees() + BUCKET_MARGIN_DEG;
    let lat_lo = (c.lat_deg - r_deg).max(-90.0);
    let lat_hi = (c.lat_deg + r_deg).min(90.0);
    if lat_lo <= -89.5 || lat_hi >= 89.5 {
        return (-180.0, 180.0, lat_lo, lat_hi);
    }
    let max_abs_lat = lat_lo.abs().max(lat_hi.abs());
    let dlon = (r_deg / max_abs_lat.to_radians().cos()).min(180.0);
    (c.lon_deg - dlon, c.lon_deg + dlon, lat_lo, lat_hi)
}

fn window_keys(lon_lo: f64, lon_hi: f64, lat_lo: f64, lat_hi: f64) -> Vec<(i32, i32)> {
    let to_b = |x: f64| (x / BUCKET_DEG).floor() as i64;
    let lat_cells = (90.0 / BUCKET_DEG) as i64;
    let lon_cells = (180.0 / BUCKET_DEG) as i64;
    let lat_b0 = to_b(lat_lo.max(-90.0)).clamp(-lat_cells, lat_cells - 1);
    let lat_b1 = to_b(lat_hi.min(90.0)).clamp(-lat_cells, lat_cells - 1);
    let full_lon = lon_hi - lon_lo >= 360.0;
    let mut keys = Vec::new();
    for lat_b in lat_b0..=lat_b1 {
        if full_lon {
            for lon_b in -lon_cells..lon_cells {
                keys.push((lon_b as i32, lat_b as i32));
            }
        } else {
            for lon_b in to_b(lon_lo)..=to_b(lon_hi) {
                let wrapped = (lon_b + lon_cells).rem_euclid(2 * lon_cells) - lon_cells;
                keys.push((wrapped as i32, lat_b as i32));
            }
        }
    }
    keys
}

/// The intersection predicate for one grid at one resolution.  Also used
/// directly by the exhaustive reference path in tests.
pub struct ResolutionCover<'a> {
    grid: &'a Grid,
    prepared: &'a Prepared,
    densify: usize,
    /// Cells known to contain a feature vertex.
    occupied: HashSet<CellId>,
}

const CAP_SLACK: f64 = 1e-9;

impl<'a> ResolutionCover<'a> {
    pub fn new(grid: &'a Grid, res: u8, prepared: &'a Prepared) -> Result<Self, CoverError> {
        let occupied = prepared
            .verts
            .par_iter()
            .map(|&v| grid.locate(res, v))
            .collect::<Result<HashSet<CellId>, GridError>>()?;
        Ok(ResolutionCover {
            grid,
            prepared,
            densify: grid.default_densify(res),
            occupied,
        })
    }

    /// Does the closed cell intersect the feature set?
    pub fn intersects(&self, id: CellId) -> bool {
        if self.occupied.contains(&id) {
            return true;
        }
        if self.prepared.arcs.is_empty() && self.prepared.polys.is_empty() {
            return false;
        }
        let boundary = self.grid.cell_boundary(id, self.densify);
        let (cap_center, cap_radius) = boundary.cap();
        let ring = boundary.ring();

        for &ai in &self.prepared.arc_index.near(cap_center, cap_radius) {
            let pa = &self.prepared.arcs[ai as usize];
            if pa.mid.angle_to(cap_center) > cap_radius + pa.half + CAP_SLACK {
                continue;
            }
            for i in 0..ring.len() {
                let edge = Arc {
                    a: ring[i],
                    b: ring[(i + 1) % ring.len()],
                };
                if arcs_intersect(&pa.arc, &edge) {
                    return true;
                }
            }
        }

        for &pi in &self.prepared.poly_index.near(cap_center, cap_radius) {
            let pp = &self.prepared.polys[pi as usize];
            if pp.cap_center.angle_to(cap_center) > cap_radius + pp.cap_radius + CAP_SLACK {
                continue;
            }
            for &p in ring {
                if pp.poly.contains(p) != Containment::Outside {
                    return true;
                }
            }
        }
        false
    }
}

/// Hierarchical walk down the resolutions of one grid.  Holds the sorted
/// list of intersecting cells at the current resolution.
pub struct Descent<'a> {
    grid: &'a Grid,
    prepared: &'a Prepared,
    res: u8,
    passing: Vec<CellId>,
}

impl<'a> Descent<'a> {
    /// Starts at resolution 0 by filtering the full enumeration.
    pub fn start(grid: &'a Grid, prepared: &'a Prepared) -> Result<Self, CoverError> {
        let cover = ResolutionCover::new(grid, 0, prepared)?;
        let passing: Vec<CellId> = grid
            .enumerate(0)?
            .into_par_iter()
            .filter(|&id| cover.intersects(id))
            .collect();
        Ok(Descent {
            grid,
            prepared,
            res: 0,
            passing,
        })
    }

    pub fn resolution(&self) -> u8 {
        self.res
    }

    pub fn passing(&self) -> &[CellId] {
        &self.passing
    }

    /// Candidate cells for the next resolution: children of intersecting
    /// cells, widened by neighbours' children on hexagonal grids where a
    /// child can poke out of its parent.
    pub fn next_candidates(&self) -> Result<Vec<CellId>, CoverError> {
        let hex = self.grid.kind() != GridKind::Isea4t;
        let mut cands = Vec::new();
        for &id in &self.passing {
            cands.extend(self.grid.children(id)?);
            if hex {
                for nb in self.grid.neighbors(id) {
                    cands.extend(self.grid.children(nb)?);
                }
            }
        }
        cands.sort_unstable();
        cands.dedup();
        Ok(cands)
    }

    /// Moves one resolution finer.
    pub fn advance(&mut self) -> Result<(), CoverError> {
        let cands = self.next_candidates()?;
        let cover = ResolutionCover::new(self.grid, self.res + 1, self.prepared)?;
        self.passing = cands
            .into_par_iter()
            .filter(|&id| cover.intersects(id))
            .collect();
        self.res += 1;
        Ok(())
    }

    /// Largest diameter among the intersecting cells, in radians.
    pub fn delta_rad(&self) -> f64 {
        self.passing
            .par_iter()
            .map(|&id| self.grid.cell_diameter(id, self.grid.default_densify(self.res)))
            .reduce(|| 0.0, f64::max)
    }
}

fn record_from(feat: &Descent, bbox: &Descent) -> CoverRecord {
    let delta_rad = feat.delta_rad();
    CoverRecord {
        grid: feat.grid.kind(),
        resolution: feat.res,
        delta_km: delta_rad * EARTH_RADIUS_KM,
        delta_rad,
        n_cells: feat.passing.len() as u64,
        n_bbox_cells: bbox.passing.len() as u64,
    }
}

fn bbox_prepared(features: &GeoFeatureSet) -> Result<Prepared, CoverError> {
    let bbox = bbox_of(features)?;
    prepare(&bbox_features(&bbox, BBOX_CHORD_DEG))
}

/// Covering counts for an explicit resolution range.
pub fn build_cover_table(
    grid: &Grid,
    k_min: u8,
    k_max: u8,
    features: &GeoFeatureSet,
) -> Result<Vec<CoverRecord>, CoverError> {
    if k_min > k_max {
        return Err(CoverError::BadRange { k_min, k_max });
    }
    grid.cell_count(k_max)?;
    let prepared = prepare(features)?;
    let bbox_prep = bbox_prepared(features)?;
    let mut feat = Descent::start(grid, &prepared)?;
    let mut bbox = Descent::start(grid, &bbox_prep)?;
    let mut records = Vec::new();
    for k in 0..=k_max {
        if k > 0 {
            feat.advance()?;
            bbox.advance()?;
        }
        if k >= k_min {
            records.push(record_from(&feat, &bbox));
        }
    }
    Ok(records)
}

/// Covering counts from resolution 0 down to where the grid runs out, the
/// candidate list would exceed `candidate_cap`, or the feature count falls
/// below `ratio_stop` of the bounding-box count.
pub fn build_cover_table_auto(
    grid: &Grid,
    features: &GeoFeatureSet,
    candidate_cap: usize,
    ratio_stop: f64,
) -> Result<Vec<CoverRecord>, CoverError> {
    let prepared = prepare(features)?;
    let bbox_prep = bbox_prepared(features)?;
    let mut feat = Descent::start(grid, &prepared)?;
    let mut bbox = Descent::start(grid, &bbox_prep)?;
    let mut records = vec![record_from(&feat, &bbox)];
    loop {
        let rec = records.last().unwrap();
        if rec.n_bbox_cells > 0
            && (rec.n_cells as f64) < ratio_stop * rec.n_bbox_cells as f64
        {
            break;
        }
        let next = feat.resolution() + 1;
        if grid.cell_count(next).is_err() {
            break;
        }
        let load = feat.next_candidates()?.len() + bbox.next_candidates()?.len();
        if load > candidate_cap {
            break;
        }
        feat.advance()?;
        bbox.advance()?;
        records.push(record_from(&feat, &bbox));
    }
    Ok(records)
}

pub const COVER_CSV_HEADER: &str = "grid,resolution,delta_km,delta_rad,n_cells,n_bbox_cells";

/// Fixed-point decimal with 12 significant digits, no exponent.
fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0.000000000000".to_string();
    }
    let dec = (11 - x.abs().log10().floor() as i64).max(0) as usize;
    format!("{x:.dec$}")
}

pub fn cover_csv(records: &[CoverRecord]) -> String {
    let mut out = String::from(COVER_CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.grid.name(),
            r.resolution,
            fmt_sig(r.delta_km),
            fmt_sig(r.delta_rad),
            r.n_cells,
            r.n_bbox_cells
        );
    }
    out
}

pub fn write_cover_csv(path: &Path, records: &[CoverRecord]) -> Result<(), CoverError> {
    std::fs::write(path, cover_csv(records)).map_err(|source| CoverError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn parse_cover_csv(text: &str) -> Result<Vec<CoverRecord>, CoverError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    {
        let got = rdr
            .headers()
            .map_err(|e| CoverError::BadTable(e.to_string()))?;
        let want: Vec<&str> = COVER_CSV_HEADER.split(',').collect();
        if got.iter().collect::<Vec<_>>() != want {
            return Err(CoverError::BadTable(format!(
                "unexpected header {:?}",
                got.iter().collect::<Vec<_>>().join(",")
            )));
        }
    }
    let mut records = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| CoverError::BadTable(e.to_string()))?;
        let field = |j: usize| -> Result<&str, CoverError> {
            row.get(j)
                .ok_or_else(|| CoverError::BadTable(format!("row {} too short", i + 2)))
        };
        let bad = |what: &str| CoverError::BadTable(format!("row {}: bad {what}", i + 2));
        records.push(CoverRecord {
            grid: field(0)?.parse().map_err(|_| bad("grid"))?,
            resolution: field(1)?.parse().map_err(|_| bad("resolution"))?,
            delta_km: field(2)?.parse().map_err(|_| bad("delta_km"))?,
            delta_rad: field(3)?.parse().map_err(|_| bad("delta_rad"))?,
            n_cells: field(4)?.parse().map_err(|_| bad("n_cells"))?,
            n_bbox_cells: field(5)?.parse().map_err(|_| bad("n_bbox_cells"))?,
        });
    }
    Ok(records)
}

pub fn read_cover_csv(path: &Path) -> Result<Vec<CoverRecord>, CoverError> {
    let text = std::fs::read_to_string(path).map_err(|source| CoverError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_cover_csv(&text)
}
