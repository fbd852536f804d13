//! Geometry on the unit sphere.
//!
//! All features live on S^2 as unit vectors; geodesics are great circles.
//! Angles are radians, distances are central angles in radians (multiply by
//! an Earth radius only at the reporting edge). Latitude/longitude is in
//! degrees at the API boundary, with longitude normalized to (-180, 180].
//!
//! Conventions that everything downstream relies on:
//! * polygon rings wind counter-clockwise when seen from outside the sphere,
//!   and enclose the region to their left;
//! * ring edges are minor great-circle arcs, so consecutive vertices are
//!   never antipodal;
//! * signed areas are positive for counter-clockwise rings.

use thiserror::Error;

/// Mean Earth radius of the equal-area (authalic) sphere, kilometres.
pub const EARTH_RADIUS_KM: f64 = 6371.0072;

/// Tolerance for "exactly on a plane/boundary" decisions on unit vectors.
const EPS_PLANE: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum GeomError {
    #[error("feature set is empty")]
    EmptySet,
    #[error("feature set touches a pole; lat/lon bounding box undefined")]
    PoleSpanning,
    #[error("feature set wraps the full circle of longitudes")]
    LongitudeWrap,
    #[error("arc endpoints are antipodal; great-circle arc is ambiguous")]
    AntipodalArc,
    #[error("polygon ring needs at least 3 vertices, got {0}")]
    ShortRing(usize),
    #[error("consecutive ring vertices are coincident or antipodal")]
    DegenerateEdge,
    #[error("ring must wind counter-clockwise with area in (0, 2pi) sr, signed area {0}")]
    BadRingArea(f64),
}

// ── Unit vectors ────────────────────────────────────────────────────────────

/// A point on the unit sphere. Constructors normalize, so `|v| = 1` holds to
/// f64 round-off everywhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVec {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl UnitVec {
    /// Normalizes an arbitrary non-zero vector onto the sphere.
    pub fn new(x: f64, y: f64, z: f64) -> UnitVec {
        let n = (x * x + y * y + z * z).sqrt();
        debug_assert!(n > 0.0, "cannot normalize the zero vector");
        UnitVec {
            x: x / n,
            y: y / n,
            z: z / n,
        }
    }

    pub fn dot(self, o: UnitVec) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    /// Cross product as a plain (not normalized) vector.
    pub fn cross(self, o: UnitVec) -> (f64, f64, f64) {
        (
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn antipode(self) -> UnitVec {
        UnitVec {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    /// Central angle to `o` in radians via atan2, which stays accurate for
    /// both tiny and near-pi separations where acos loses digits.
    pub fn angle_to(self, o: UnitVec) -> f64 {
        let (cx, cy, cz) = self.cross(o);
        let s = (cx * cx + cy * cy + cz * cz).sqrt();
        s.atan2(self.dot(o))
    }

    /// Spherical linear interpolation, `t` in [0, 1]. Endpoints must not be
    /// antipodal.
    pub fn slerp(self, o: UnitVec, t: f64) -> UnitVec {
        let omega = self.angle_to(o);
        if omega < 1e-12 {
            return self;
        }
        let so = omega.sin();
        let a = ((1.0 - t) * omega).sin() / so;
        let b = (t * omega).sin() / so;
        UnitVec::new(
            a * self.x + b * o.x,
            a * self.y + b * o.y,
            a * self.z + b * o.z,
        )
    }

    /// Unit tangent at `self` pointing along the great circle towards `to`.
    /// Undefined (returns None) when the points coincide or are antipodal.
    pub fn tangent_towards(self, to: UnitVec) -> Option<UnitVec> {
        let d = self.dot(to);
        let tx = to.x - d * self.x;
        let ty = to.y - d * self.y;
        let tz = to.z - d * self.z;
        let n = (tx * tx + ty * ty + tz * tz).sqrt();
        if n < 1e-14 {
            None
        } else {
            Some(UnitVec {
                x: tx / n,
                y: ty / n,
                z: tz / n,
            })
        }
    }
}

/// Great-circle distance in radians between two surface points.
pub fn great_circle_distance(a: UnitVec, b: UnitVec) -> f64 {
    a.angle_to(b)
}

// ── Geographic coordinates ──────────────────────────────────────────────────

/// Longitude/latitude in degrees; `lon` normalized to (-180, 180].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPoint {
    pub lon_deg: f64,
    pub lat_deg: f64,
}

impl GeoPoint {
    pub fn new(lon_deg: f64, lat_deg: f64) -> GeoPoint {
        GeoPoint {
            lon_deg: normalize_lon(lon_deg),
            lat_deg,
        }
    }

    pub fn to_unit(self) -> UnitVec {
        let lon = self.lon_deg.to_radians();
        let lat = self.lat_deg.to_radians();
        UnitVec {
            x: lat.cos() * lon.cos(),
            y: lat.cos() * lon.sin(),
            z: lat.sin(),
        }
    }

    pub fn from_unit(v: UnitVec) -> GeoPoint {
        let lat = v.z.clamp(-1.0, 1.0).asin().to_degrees();
        let lon = if v.x == 0.0 && v.y == 0.0 {
            0.0 // at a pole every longitude is the same point
        } else {
            v.y.atan2(v.x).to_degrees()
        };
        GeoPoint::new(lon, lat)
    }
}

/// Maps any longitude into (-180, 180].
pub fn normalize_lon(lon_deg: f64) -> f64 {
    let mut l = (lon_deg + 180.0).rem_euclid(360.0);
    if l == 0.0 {
        l = 360.0; // keep +180 rather than flipping to -180
    }
    l - 180.0
}

// ── Arcs ────────────────────────────────────────────────────────────────────

/// Minor great-circle arc between two non-antipodal endpoints.
#[derive(Debug, Clone, Copy)]
pub struct Arc {
    pub a: UnitVec,
    pub b: UnitVec,
}

impl Arc {
    pub fn try_new(a: UnitVec, b: UnitVec) -> Result<Arc, GeomError> {
        if a.dot(b) < -1.0 + 1e-12 {
            return Err(GeomError::AntipodalArc);
        }
        Ok(Arc { a, b })
    }

    pub fn length(&self) -> f64 {
        self.a.angle_to(self.b)
    }
}

/// True when point `x` (assumed on the arc's great circle) lies between the
/// arc endpoints, endpoints included.
fn within_arc_span(x: UnitVec, arc: &Arc, normal: (f64, f64, f64)) -> bool {
    let (nx, ny, nz) = normal;
    let ca = arc.a.cross(x);
    let cb = x.cross(arc.b);
    let sa = ca.0 * nx + ca.1 * ny + ca.2 * nz;
    let sb = cb.0 * nx + cb.1 * ny + cb.2 * nz;
    sa >= -EPS_PLANE && sb >= -EPS_PLANE
}

/// Signed distance sense: is `x` on the arc (on the great circle and within
/// the span)?
fn point_on_arc(x: UnitVec, arc: &Arc) -> bool {
    let n = arc.a.cross(arc.b);
    let nn = (n.0 * n.0 + n.1 * n.1 + n.2 * n.2).sqrt();
    if nn < 1e-14 {
        // degenerate arc; treat as the single point a
        return x.angle_to(arc.a) < 1e-9;
    }
    let sd = (n.0 * x.x + n.1 * x.y + n.2 * x.z) / nn;
    sd.abs() < 1e-9 && within_arc_span(x, arc, n)
}

/// Whether two minor arcs share at least one point. Endpoint contact counts,
/// and collinear overlapping arcs count.
pub fn arcs_intersect(u: &Arc, v: &Arc) -> bool {
    let n1 = u.a.cross(u.b);
    let n2 = v.a.cross(v.b);
    let n1n = (n1.0 * n1.0 + n1.1 * n1.1 + n1.2 * n1.2).sqrt();
    let n2n = (n2.0 * n2.0 + n2.1 * n2.1 + n2.2 * n2.2).sqrt();
    if n1n < 1e-14 {
        return point_on_arc(u.a, v);
    }
    if n2n < 1e-14 {
        return point_on_arc(v.a, u);
    }
    let t = (
        n1.1 * n2.2 - n1.2 * n2.1,
        n1.2 * n2.0 - n1.0 * n2.2,
        n1.0 * n2.1 - n1.1 * n2.0,
    );
    let tn = (t.0 * t.0 + t.1 * t.1 + t.2 * t.2).sqrt();
    if tn < 1e-12 * n1n * n2n {
        // Same great circle: overlap iff either arc holds an endpoint of the
        // other (covers partial overlap and containment).
        return point_on_arc(v.a, u)
            || point_on_arc(v.b, u)
            || point_on_arc(u.a, v)
            || point_on_arc(u.b, v);
    }
    let cand = UnitVec::new(t.0, t.1, t.2);
    for p in [cand, cand.antipode()] {
        if within_arc_span(p, u, n1) && within_arc_span(p, v, n2) {
            return true;
        }
    }
    false
}

// ── Polygons ────────────────────────────────────────────────────────────────

/// Where a point sits relative to a closed polygon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Containment {
    Inside,
    Boundary,
    Outside,
}

impl Containment {
    /// Closed-region membership: boundary counts as inside.
    pub fn in_closed(self) -> bool {
        self != Containment::Outside
    }
}

/// Simple polygon on the sphere: one counter-clockwise ring of unit vectors,
/// edges are minor great-circle arcs, enclosed area under 2pi steradians
/// (smaller than a hemisphere-and-boundary). Self-intersection-free rings are
/// the caller's responsibility; every producer in this crate guarantees it.
#[derive(Debug, Clone)]
pub struct SphericalPolygon {
    ring: Vec<UnitVec>,
    area: f64,
    cap_center: UnitVec,
    cap_radius: f64,
}

impl SphericalPolygon {
    pub fn try_new(ring: Vec<UnitVec>) -> Result<SphericalPolygon, GeomError> {
        if ring.len() < 3 {
            return Err(GeomError::ShortRing(ring.len()));
        }
        let n = ring.len();
        for i in 0..n {
            let d = ring[i].dot(ring[(i + 1) % n]);
            if d > 1.0 - 1e-15 || d < -1.0 + 1e-12 {
                return Err(GeomError::DegenerateEdge);
            }
        }
        let area = signed_ring_area(&ring);
        if !(area > 0.0 && area < 2.0 * std::f64::consts::PI) {
            return Err(GeomError::BadRingArea(area));
        }
        let (cap_center, cap_radius) = bounding_cap(&ring);
        Ok(SphericalPolygon {
            ring,
            area,
            cap_center,
            cap_radius,
        })
    }

    pub fn ring(&self) -> &[UnitVec] {
        &self.ring
    }

    /// Enclosed area in steradians (positive; the ring is CCW).
    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn cap(&self) -> (UnitVec, f64) {
        (self.cap_center, self.cap_radius)
    }

    /// Point-in-polygon by summed winding angle, with an explicit boundary
    /// signal so callers can treat cells as closed sets.
    pub fn contains(&self, p: UnitVec) -> Containment {
        // cheap reject: outside the vertex cap plus slack for edge bulge
        if self.cap_radius < 1.4 && p.angle_to(self.cap_center) > self.cap_radius + 1e-9 {
            return Containment::Outside;
        }
        let n = self.ring.len();
        for i in 0..n {
            let a = self.ring[i];
            let b = self.ring[(i + 1) % n];
            let nv = a.cross(b);
            let nn = (nv.0 * nv.0 + nv.1 * nv.1 + nv.2 * nv.2).sqrt();
            if nn < 1e-14 {
                continue;
            }
            let sd = (nv.0 * p.x + nv.1 * p.y + nv.2 * p.z) / nn;
            if sd.abs() < EPS_PLANE && within_arc_span(p, &Arc { a, b }, nv) {
                return Containment::Boundary;
            }
        }
        let mut winding = 0.0f64;
        let mut prev = match tangent_of(p, self.ring[n - 1]) {
            Some(t) => t,
            None => return Containment::Boundary, // p coincides with a vertex
        };
        for &v in &self.ring {
            let cur = match tangent_of(p, v) {
                Some(t) => t,
                None => return Containment::Boundary,
            };
            let cr = prev.cross(cur);
            let sin_a = cr.0 * p.x + cr.1 * p.y + cr.2 * p.z;
            let cos_a = prev.dot(cur);
            winding += sin_a.atan2(cos_a);
            prev = cur;
        }
        if winding.abs() > std::f64::consts::PI {
            Containment::Inside
        } else {
            Containment::Outside
        }
    }

    /// Largest vertex-to-vertex great-circle distance. Edges longer than 10
    /// degrees are densified (4 extra points each) first, so long-edge cells
    /// cannot hide their true extent between vertices.
    pub fn diameter(&self) -> f64 {
        let long_edge = 10f64.to_radians();
        let n = self.ring.len();
        let mut pts: Vec<UnitVec> = Vec::with_capacity(n);
        pts.extend_from_slice(&self.ring);
        for i in 0..n {
            let a = self.ring[i];
            let b = self.ring[(i + 1) % n];
            if a.angle_to(b) > long_edge {
                for k in 1..=4 {
                    pts.push(a.slerp(b, k as f64 / 5.0));
                }
            }
        }
        let mut best = 0.0f64;
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                let d = pts[i].angle_to(pts[j]);
                if d > best {
                    best = d;
                }
            }
        }
        best
    }
}

fn tangent_of(p: UnitVec, v: UnitVec) -> Option<UnitVec> {
    if p.angle_to(v) < 1e-12 {
        return None;
    }
    p.tangent_towards(v)
}

/// Signed area of a ring (positive = CCW seen from outside). Uses a fan of
/// signed triangle excesses anchored at the first vertex; falls back to the
/// Gauss-Bonnet turning-angle sum when the fan degenerates (some chord of the
/// fan antipodal), which happens only for rings spanning a full great circle.
pub fn signed_ring_area(ring: &[UnitVec]) -> f64 {
    let n = ring.len();
    if n < 3 {
        return 0.0;
    }
    let v0 = ring[0];
    let mut area = 0.0f64;
    for i in 1..(n - 1) {
        let v1 = ring[i];
        let v2 = ring[i + 1];
        let d01 = v0.dot(v1);
        let d12 = v1.dot(v2);
        let d20 = v2.dot(v0);
        if d01 < -1.0 + 1e-9 || d12 < -1.0 + 1e-9 || d20 < -1.0 + 1e-9 {
            return turning_angle_area(ring);
        }
        let cr = v1.cross(v2);
        let det = v0.x * cr.0 + v0.y * cr.1 + v0.z * cr.2;
        area += 2.0 * det.atan2(1.0 + d01 + d12 + d20);
    }
    area
}

/// Gauss-Bonnet: enclosed area = 2pi - sum of exterior turning angles.
/// Robust for rings of any size, but loses relative accuracy for tiny rings
/// (difference of near-2pi sums), hence only a fallback.
fn turning_angle_area(ring: &[UnitVec]) -> f64 {
    let n = ring.len();
    let mut turn_sum = 0.0f64;
    for i in 0..n {
        let prev = ring[(i + n - 1) % n];
        let v = ring[i];
        let next = ring[(i + 1) % n];
        let h_in = match v.tangent_towards(prev) {
            Some(t) => t.antipode(), // direction of travel arriving at v
            None => continue,
        };
        let h_out = match v.tangent_towards(next) {
            Some(t) => t,
            None => continue,
        };
        let cr = h_in.cross(h_out);
        let sin_t = cr.0 * v.x + cr.1 * v.y + cr.2 * v.z;
        let cos_t = h_in.dot(h_out);
        turn_sum += sin_t.atan2(cos_t);
    }
    2.0 * std::f64::consts::PI - turn_sum
}

/// Smallest cap centered at the normalized vertex mean; radius covers all
/// vertices. Edges of a ring inside a cap of radius < pi/2 stay inside it.
fn bounding_cap(ring: &[UnitVec]) -> (UnitVec, f64) {
    let (mut sx, mut sy, mut sz) = (0.0f64, 0.0f64, 0.0f64);
    for v in ring {
        sx += v.x;
        sy += v.y;
        sz += v.z;
    }
    let norm = (sx * sx + sy * sy + sz * sz).sqrt();
    let center = if norm < 1e-9 {
        ring[0]
    } else {
        UnitVec::new(sx, sy, sz)
    };
    let mut radius = 0.0f64;
    for v in ring {
        radius = radius.max(center.angle_to(*v));
    }
    (center, radius)
}

// ── Feature sets ────────────────────────────────────────────────────────────

/// Vector features to be covered: loose points, polylines, polygon outer
/// rings. Everything is treated as a closed subset of the sphere.
#[derive(Debug, Clone, Default)]
pub struct GeoFeatureSet {
    pub points: Vec<GeoPoint>,
    pub lines: Vec<Vec<GeoPoint>>,
    pub polygons: Vec<SphericalPolygon>,
}

impl GeoFeatureSet {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && self.lines.is_empty() && self.polygons.is_empty()
    }

    /// Every vertex of every feature, in degrees.
    pub fn vertices(&self) -> Vec<GeoPoint> {
        let mut out = self.points.clone();
        for line in &self.lines {
            out.extend_from_slice(line);
        }
        for poly in &self.polygons {
            out.extend(poly.ring().iter().map(|&v| GeoPoint::from_unit(v)));
        }
        out
    }
}

// ── Geodesic bounding box ───────────────────────────────────────────────────

/// Latitude/longitude box in degrees. `lon_max` may exceed 180 when the box
/// crosses the antimeridian; then `lon_min <= lon <= lon_max - 360` wraps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicBBox {
    pub lon_min: f64,
    pub lon_max: f64,
    pub lat_min: f64,
    pub lat_max: f64,
}

impl GeodesicBBox {
    pub fn width_deg(&self) -> f64 {
        self.lon_max - self.lon_min
    }

    pub fn height_deg(&self) -> f64 {
        self.lat_max - self.lat_min
    }
}

/// Smallest lat/lon box containing every vertex of the feature set. The
/// longitude interval is the minimal circular cover (antimeridian-aware): the
/// widest gap between consecutive sorted longitudes is left outside the box.
pub fn bbox_of(features: &GeoFeatureSet) -> Result<GeodesicBBox, GeomError> {
    let verts = features.vertices();
    if verts.is_empty() {
        return Err(GeomError::EmptySet);
    }
    let mut lat_min = f64::INFINITY;
    let mut lat_max = f64::NEG_INFINITY;
    for p in &verts {
        lat_min = lat_min.min(p.lat_deg);
        lat_max = lat_max.max(p.lat_deg);
    }
    if lat_max >= 90.0 - 1e-9 || lat_min <= -90.0 + 1e-9 {
        return Err(GeomError::PoleSpanning);
    }
    let mut lons: Vec<f64> = verts.iter().map(|p| p.lon_deg).collect();
    lons.sort_by(|a, b| a.partial_cmp(b).unwrap());
    lons.dedup();
    if lons.len() == 1 {
        return Ok(GeodesicBBox {
            lon_min: lons[0],
            lon_max: lons[0],
            lat_min,
            lat_max,
        });
    }
    // widest gap on the circle; the box is the complement of that gap
    let mut best_gap = 360.0 - (lons[lons.len() - 1] - lons[0]);
    let mut gap_after = lons.len() - 1; // gap between last and first (wrapping)
    for i in 0..lons.len() - 1 {
        let gap = lons[i + 1] - lons[i];
        if gap > best_gap {
            best_gap = gap;
            gap_after = i;
        }
    }
    if best_gap <= 1e-9 {
        return Err(GeomError::LongitudeWrap);
    }
    let (lon_min, lon_max) = if gap_after == lons.len() - 1 {
        (lons[0], lons[lons.len() - 1])
    } else {
        // box wraps the antimeridian; express as [start, start + extent]
        let start = lons[gap_after + 1];
        (start, start + (360.0 - best_gap))
    };
    Ok(GeodesicBBox {
        lon_min,
        lon_max,
        lat_min,
        lat_max,
    })
}

/// Renders a box as a feature set for covering: a CCW polygon whose
/// east/west edges are meridian arcs (exact geodesics) and whose north/south
/// edges follow parallels, approximated by chords every `step_deg` of
/// longitude. Degenerate boxes fall back to a polyline or a point.
pub fn bbox_features(bbox: &GeodesicBBox, step_deg: f64) -> GeoFeatureSet {
    let mut out = GeoFeatureSet::default();
    let w = bbox.width_deg();
    let h = bbox.height_deg();
    if w <= 0.0 && h <= 0.0 {
        out.points.push(GeoPoint::new(bbox.lon_min, bbox.lat_min));
        return out;
    }
    if w <= 0.0 || h <= 0.0 {
        // a meridian or parallel segment
        let mut line = Vec::new();
        if w <= 0.0 {
            line.push(GeoPoint::new(bbox.lon_min, bbox.lat_min));
            line.push(GeoPoint::new(bbox.lon_min, bbox.lat_max));
        } else {
            let n = (w / step_deg).ceil().max(1.0) as usize;
            for i in 0..=n {
                let lon = bbox.lon_min + w * i as f64 / n as f64;
                line.push(GeoPoint::new(lon, bbox.lat_min));
            }
        }
        out.lines.push(line);
        return out;
    }
    let n = (w / step_deg).ceil().max(1.0) as usize;
    let mut ring: Vec<UnitVec> = Vec::with_capacity(2 * n + 4);
    for i in 0..=n {
        // south edge, west to east
        let lon = bbox.lon_min + w * i as f64 / n as f64;
        ring.push(GeoPoint::new(lon, bbox.lat_min).to_unit());
    }
    for i in 0..=n {
        // north edge, east to west
        let lon = bbox.lon_max - w * i as f64 / n as f64;
        ring.push(GeoPoint::new(lon, bbox.lat_max).to_unit());
    }
    // meridian edges need no densification; drop exact duplicates at joins
    ring.dedup_by(|a, b| a.angle_to(*b) < 1e-14);
    if ring.last().is_some_and(|&l| l.angle_to(ring[0]) < 1e-14) {
        ring.pop();
    }
    let poly = SphericalPolygon::try_new(ring).expect("bbox ring is a valid CCW polygon");
    out.polygons.push(poly);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn gp(lon: f64, lat: f64) -> UnitVec {
        GeoPoint::new(lon, lat).to_unit()
    }

    fn random_point(rng: &mut SplitMix64) -> UnitVec {
        // uniform on the sphere via z ~ U(-1,1), lon ~ U(0, 2pi)
        let z = 2.0 * rng.next_f64() - 1.0;
        let lon = 2.0 * std::f64::consts::PI * rng.next_f64();
        let r = (1.0 - z * z).sqrt();
        UnitVec::new(r * lon.cos(), r * lon.sin(), z)
    }

    #[test]
    fn distance_basics() {
        let a = gp(0.0, 0.0);
        assert!(great_circle_distance(a, a) == 0.0);
        let quarter = great_circle_distance(gp(0.0, 0.0), gp(90.0, 0.0));
        assert!(
            (quarter - std::f64::consts::FRAC_PI_2).abs() < 1e-15,
            "quarter turn: {quarter}"
        );
        let half = great_circle_distance(gp(0.0, 0.0), gp(180.0, 0.0));
        assert!((half - std::f64::consts::PI).abs() < 1e-15, "antipodes: {half}");
    }

    #[test]
    fn distance_is_a_metric_on_samples() {
        let mut rng = SplitMix64::new(7);
        for _ in 0..2000 {
            let a = random_point(&mut rng);
            let b = random_point(&mut rng);
            let c = random_point(&mut rng);
            let ab = great_circle_distance(a, b);
            let ba = great_circle_distance(b, a);
            assert!((ab - ba).abs() < 1e-14, "symmetry: {ab} vs {ba}");
            let ac = great_circle_distance(a, c);
            let cb = great_circle_distance(c, b);
            assert!(
                ab <= ac + cb + 1e-12,
                "triangle inequality violated: {ab} > {ac} + {cb}"
            );
            assert!((0.0..=std::f64::consts::PI + 1e-15).contains(&ab));
        }
    }

    #[test]
    fn small_distance_keeps_precision() {
        // 1e-9 rad apart; acos would only see ~1e-8 resolution here
        let a = gp(0.0, 0.0);
        let b = UnitVec::new(1.0, 1e-9, 0.0);
        let d = great_circle_distance(a, b);
        assert!((d - 1e-9).abs() < 1e-15, "tiny distance: {d:e}");
    }

    #[test]
    fn octant_triangle_area_and_diameter() {
        let tri = SphericalPolygon::try_new(vec![gp(0.0, 0.0), gp(90.0, 0.0), gp(0.0, 90.0)])
            .expect("octant is a valid ring");
        assert!(
            (tri.area() - std::f64::consts::FRAC_PI_2).abs() < 1e-12,
            "octant area: {}",
            tri.area()
        );
        assert!(
            (tri.diameter() - std::f64::consts::FRAC_PI_2).abs() < 1e-12,
            "octant diameter: {}",
            tri.diameter()
        );
    }

    #[test]
    fn octant_reversed_ring_is_rejected() {
        let r = SphericalPolygon::try_new(vec![gp(0.0, 90.0), gp(90.0, 0.0), gp(0.0, 0.0)]);
        assert!(matches!(r, Err(GeomError::BadRingArea(a)) if a < 0.0));
    }

    #[test]
    fn equator_ring_area_is_hemisphere() {
        // four equatorial vertices 90 degrees apart: encloses the north
        // hemisphere when walked eastwards; exercises the turning-angle path
        let ring = vec![gp(0.0, 0.0), gp(90.0, 0.0), gp(180.0, 0.0), gp(-90.0, 0.0)];
        let a = signed_ring_area(&ring);
        assert!(
            (a - 2.0 * std::f64::consts::PI).abs() < 1e-9,
            "hemisphere area: {a}"
        );
    }

    #[test]
    fn thin_sliver_diameter_matches_brute_force() {
        // 0.1 rad long, 1e-4 rad wide quad; diagonal is the diameter
        let l = 0.1f64.to_degrees();
        let w = 0.5e-4f64.to_degrees();
        let quad = SphericalPolygon::try_new(vec![
            gp(0.0, -w),
            gp(l, -w),
            gp(l, w),
            gp(0.0, w),
        ])
        .expect("sliver ring");
        // haversine oracle over the four corners
        let hav = |p: GeoPoint, q: GeoPoint| -> f64 {
            let (l1, f1) = (p.lon_deg.to_radians(), p.lat_deg.to_radians());
            let (l2, f2) = (q.lon_deg.to_radians(), q.lat_deg.to_radians());
            let s1 = ((f2 - f1) / 2.0).sin();
            let s2 = ((l2 - l1) / 2.0).sin();
            2.0 * (s1 * s1 + f1.cos() * f2.cos() * s2 * s2).sqrt().asin()
        };
        let corners: Vec<GeoPoint> = quad.ring().iter().map(|&v| GeoPoint::from_unit(v)).collect();
        let mut oracle = 0.0f64;
        for i in 0..4 {
            for j in i + 1..4 {
                oracle = oracle.max(hav(corners[i], corners[j]));
            }
        }
        let d = quad.diameter();
        assert!((d - oracle).abs() < 1e-12, "diameter {d} vs oracle {oracle}");
        assert!((d - 0.1).abs() < 1e-6, "sliver diameter should be ~0.1: {d}");
    }

    #[test]
    fn containment_octant() {
        let tri = SphericalPolygon::try_new(vec![gp(0.0, 0.0), gp(90.0, 0.0), gp(0.0, 90.0)])
            .unwrap();
        // centroid of the octant
        let inside = UnitVec::new(1.0, 1.0, 1.0);
        assert_eq!(tri.contains(inside), Containment::Inside);
        let c = GeoPoint::from_unit(inside);
        assert!((c.lon_deg - 45.0).abs() < 1e-9, "centroid lon {}", c.lon_deg);
        assert!((c.lat_deg - 35.26438968).abs() < 1e-6, "centroid lat {}", c.lat_deg);
        assert_eq!(tri.contains(gp(-45.0, 20.0)), Containment::Outside);
        assert_eq!(tri.contains(gp(45.0, 0.0)), Containment::Boundary);
        assert_eq!(tri.contains(gp(0.0, 45.0)), Containment::Boundary);
        assert_eq!(tri.contains(gp(0.0, 0.0)), Containment::Boundary);
    }

    #[test]
    fn containment_antipode_exclusion() {
        // for a region smaller than a hemisphere, p and its antipode are
        // never both inside
        let tri = SphericalPolygon::try_new(vec![gp(0.0, 0.0), gp(90.0, 0.0), gp(0.0, 90.0)])
            .unwrap();
        let mut rng = SplitMix64::new(99);
        for _ in 0..5000 {
            let p = random_point(&mut rng);
            let a = tri.contains(p) == Containment::Inside;
            let b = tri.contains(p.antipode()) == Containment::Inside;
            assert!(!(a && b), "point and antipode both inside");
        }
    }

    #[test]
    fn containment_concave_ring() {
        // L-shaped (concave) ring around lon/lat origin
        let ring = vec![
            gp(0.0, 0.0),
            gp(20.0, 0.0),
            gp(20.0, 10.0),
            gp(10.0, 10.0),
            gp(10.0, 20.0),
            gp(0.0, 20.0),
        ];
        let poly = SphericalPolygon::try_new(ring).unwrap();
        assert_eq!(poly.contains(gp(5.0, 5.0)), Containment::Inside);
        assert_eq!(poly.contains(gp(15.0, 5.0)), Containment::Inside);
        assert_eq!(poly.contains(gp(5.0, 15.0)), Containment::Inside);
        // the notch is outside
        assert_eq!(poly.contains(gp(15.0, 15.0)), Containment::Outside);
    }

    #[test]
    fn arcs_crossing_and_disjoint() {
        let u = Arc::try_new(gp(-10.0, 0.0), gp(10.0, 0.0)).unwrap();
        let v = Arc::try_new(gp(0.0, -10.0), gp(0.0, 10.0)).unwrap();
        assert!(arcs_intersect(&u, &v), "perpendicular arcs through origin");
        let w = Arc::try_new(gp(20.0, 5.0), gp(30.0, 5.0)).unwrap();
        assert!(!arcs_intersect(&u, &w), "separated arcs");
    }

    #[test]
    fn arcs_collinear_overlap_and_gap() {
        let u = Arc::try_new(gp(0.0, 0.0), gp(10.0, 0.0)).unwrap();
        let v = Arc::try_new(gp(5.0, 0.0), gp(15.0, 0.0)).unwrap();
        assert!(arcs_intersect(&u, &v), "overlapping equator arcs");
        let w = Arc::try_new(gp(20.0, 0.0), gp(30.0, 0.0)).unwrap();
        assert!(!arcs_intersect(&u, &w), "disjoint equator arcs");
        let touch = Arc::try_new(gp(10.0, 0.0), gp(20.0, 0.0)).unwrap();
        assert!(arcs_intersect(&u, &touch), "endpoint contact counts");
    }

    #[test]
    fn arc_antipodal_rejected() {
        assert_eq!(
            Arc::try_new(gp(0.0, 0.0), gp(180.0, 0.0)).unwrap_err(),
            GeomError::AntipodalArc
        );
    }

    #[test]
    fn near_tangent_arcs_do_not_false_positive() {
        // almost-parallel close arcs at slightly different latitudes
        let u = Arc::try_new(gp(0.0, 1.0), gp(10.0, 1.0)).unwrap();
        let v = Arc::try_new(gp(0.0, 1.0001), gp(10.0, 1.0001)).unwrap();
        assert!(!arcs_intersect(&u, &v), "parallel offset arcs must miss");
    }

    #[test]
    fn bbox_simple_and_antimeridian() {
        let mut fs = GeoFeatureSet::default();
        fs.points.push(GeoPoint::new(-30.0, 0.0));
        fs.points.push(GeoPoint::new(30.0, 0.0));
        fs.points.push(GeoPoint::new(0.0, 60.0));
        let b = bbox_of(&fs).unwrap();
        assert_eq!(
            b,
            GeodesicBBox {
                lon_min: -30.0,
                lon_max: 30.0,
                lat_min: 0.0,
                lat_max: 60.0
            }
        );

        let mut fs = GeoFeatureSet::default();
        fs.points.push(GeoPoint::new(170.0, -10.0));
        fs.points.push(GeoPoint::new(-170.0, 10.0));
        let b = bbox_of(&fs).unwrap();
        assert!(
            (b.lon_min - 170.0).abs() < 1e-12 && (b.lon_max - 190.0).abs() < 1e-12,
            "wrapped box: {b:?}"
        );
        assert_eq!((b.lat_min, b.lat_max), (-10.0, 10.0));
    }

    #[test]
    fn bbox_errors() {
        let fs = GeoFeatureSet::default();
        assert_eq!(bbox_of(&fs).unwrap_err(), GeomError::EmptySet);
        let mut fs = GeoFeatureSet::default();
        fs.points.push(GeoPoint::new(0.0, 90.0));
        assert_eq!(bbox_of(&fs).unwrap_err(), GeomError::PoleSpanning);
    }

    #[test]
    fn bbox_feature_polygon_area_close_to_band_formula() {
        let b = GeodesicBBox {
            lon_min: -30.0,
            lon_max: 30.0,
            lat_min: 0.0,
            lat_max: 60.0,
        };
        let fs = bbox_features(&b, 0.5);
        assert_eq!(fs.polygons.len(), 1);
        let area = fs.polygons[0].area();
        // exact area of the lat/lon box with small-circle top/bottom edges
        let exact = (60.0f64.to_radians())
            * (60f64.to_radians().sin() - 0.0f64.sin());
        assert!(
            (area - exact).abs() / exact < 1e-4,
            "densified box area {area} vs band formula {exact}"
        );
    }

    #[test]
    fn bbox_degenerate_features() {
        let pt = GeodesicBBox {
            lon_min: 10.0,
            lon_max: 10.0,
            lat_min: 5.0,
            lat_max: 5.0,
        };
        let fs = bbox_features(&pt, 0.5);
        assert_eq!((fs.points.len(), fs.lines.len(), fs.polygons.len()), (1, 0, 0));
        let seg = GeodesicBBox {
            lon_min: 10.0,
            lon_max: 10.0,
            lat_min: 5.0,
            lat_max: 6.0,
        };
        let fs = bbox_features(&seg, 0.5);
        assert_eq!((fs.points.len(), fs.lines.len(), fs.polygons.len()), (0, 1, 0));
    }

    #[test]
    fn lon_normalization() {
        assert_eq!(normalize_lon(360.0), 0.0);
        assert_eq!(normalize_lon(180.0), 180.0);
        assert_eq!(normalize_lon(-180.0), 180.0);
        assert_eq!(normalize_lon(190.0), -170.0);
        assert_eq!(normalize_lon(-350.0), 10.0);
    }

    #[test]
    fn geo_round_trip() {
        let mut rng = SplitMix64::new(3);
        for _ in 0..2000 {
            let lon = rng.next_f64() * 360.0 - 180.0;
            let lat = rng.next_f64() * 170.0 - 85.0;
            let p = GeoPoint::new(lon, lat);
            let q = GeoPoint::from_unit(p.to_unit());
            assert!(
                (p.lon_deg - q.lon_deg).abs() < 1e-9 && (p.lat_deg - q.lat_deg).abs() < 1e-9,
                "round trip {p:?} -> {q:?}"
            );
        }
    }

    #[test]
    fn slerp_endpoints_and_midpoint() {
        let a = gp(0.0, 0.0);
        let b = gp(90.0, 0.0);
        assert!(a.slerp(b, 0.0).angle_to(a) < 1e-12);
        assert!(a.slerp(b, 1.0).angle_to(b) < 1e-12);
        let m = a.slerp(b, 0.5);
        assert!(m.angle_to(gp(45.0, 0.0)) < 1e-12, "midpoint off");
    }
}
