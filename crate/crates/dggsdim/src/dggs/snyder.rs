//! Equal-area mapping between each icosahedron face and its planar triangle.
//!
//! Within a face the map works in polar form about the center.  The azimuth
//! is warped so that angular wedges keep their area share, and the radius is
//! then fixed by requiring the spherical cap fraction to match the planar
//! one along each ray.  Face edges map to planar edges and the three face
//! vertices are fixed points, so neighbouring faces agree along shared
//! edges and lattices drawn on the planar triangles knit together seamlessly
//! on the sphere.
//!
//! Plane to sphere needs a one-dimensional root solve for the warped
//! azimuth; it is monotone with a derivative bounded away from zero, so a
//! bracketed Newton iteration converges to machine precision.

use std::f64::consts::{FRAC_PI_3, PI, TAU};
use std::sync::OnceLock;

use super::icosa::{Face, Icosahedron, PLANAR_AREA, SQRT3};
use crate::sphere::UnitVec;

/// Spherical angle of a face triangle at each of its corners.
const G: f64 = PI / 5.0;
/// Planar angle of the triangle sector at each corner (half of 60 degrees).
const COT_THETA: f64 = SQRT3;
/// Planar distance from the triangle center to each edge.
const APOTHEM: f64 = 0.5;

struct Consts {
    cos_g: f64,
    tan_g: f64,
    sin_cap_g: f64,
    cos_cap_g: f64,
    /// Planar area per steradian of spherical area, a global constant
    /// because every face has the same planar and spherical area.
    planar_per_sr: f64,
}

fn consts() -> &'static Consts {
    static C: OnceLock<Consts> = OnceLock::new();
    C.get_or_init(|| {
        // Center-to-vertex arc of a face: all pairwise vertex dots are
        // 1/sqrt(5), which fixes cos g in closed form.
        let r5 = 5.0f64.sqrt();
        let cos_g = (1.0 + 2.0 / r5) / (3.0 + 6.0 / r5).sqrt();
        let tan_g = (1.0 - cos_g * cos_g).sqrt() / cos_g;
        Consts {
            cos_g,
            tan_g,
            sin_cap_g: G.sin(),
            cos_cap_g: G.cos(),
            planar_per_sr: PLANAR_AREA / (4.0 * PI / 20.0),
        }
    })
}

fn wrap_tau(a: f64) -> f64 {
    let t = a % TAU;
    if t < 0.0 {
        t + TAU
    } else {
        t
    }
}

/// Area of the planar wedge between azimuth 0 and `azp` within one
/// 120-degree sector (azimuth measured from the vertex ray).
fn planar_wedge(azp: f64) -> f64 {
    0.5 * APOTHEM * APOTHEM * ((azp - FRAC_PI_3).tan() + SQRT3)
}

/// Spherical azimuth warped from the wedge-area budget `ag` (steradians).
/// Solves az + G + H(az) = pi + ag on [0, 2*pi/3].
fn solve_azimuth(ag: f64) -> f64 {
    let c = consts();
    let mut lo = 0.0f64;
    let mut hi = TAU / 3.0;
    let mut az = (ag * 15.0 / PI * hi).clamp(lo, hi);
    for _ in 0..80 {
        let (sin_az, cos_az) = az.sin_cos();
        let cos_h = (-cos_az * c.cos_cap_g + sin_az * c.sin_cap_g * c.cos_g).clamp(-1.0, 1.0);
        let h = cos_h.acos();
        let f = az + G + h - PI - ag;
        if f < 0.0 {
            lo = az;
        } else {
            hi = az;
        }
        if f.abs() < 1e-15 {
            break;
        }
        let sin_h = (1.0 - cos_h * cos_h).sqrt().max(1e-12);
        let fp = 1.0 - (sin_az * c.cos_cap_g + cos_az * c.sin_cap_g * c.cos_g) / sin_h;
        let next = az - f / fp.max(1e-6);
        az = if next > lo && next < hi {
            next
        } else {
            0.5 * (lo + hi)
        };
        if (hi - lo) < 1e-16 {
            break;
        }
    }
    az
}

/// Arc distance from the face center to the face boundary along spherical
/// azimuth `az` within one sector.
fn edge_distance(az: f64) -> f64 {
    let c = consts();
    c.tan_g.atan2(az.cos() + az.sin() * COT_THETA)
}

/// Planar distance from the center to the triangle boundary along planar
/// azimuth `azp` within one sector.
fn planar_edge_distance(azp: f64) -> f64 {
    APOTHEM / (azp - FRAC_PI_3).cos()
}

/// Map a point of the canonical planar triangle onto the sphere through the
/// given face.  Points outside the triangle extend continuously a short way
/// but callers should fold them into the proper face first.
pub fn plane_to_sphere(face: &Face, x: f64, y: f64) -> UnitVec {
    let rho = x.hypot(y);
    if rho < 1e-15 {
        return face.center;
    }
    let c = consts();
    let az_full = wrap_tau((-x).atan2(y));
    let mut sector = (az_full / (TAU / 3.0)).floor() as i32;
    let mut azp = az_full - sector as f64 * (TAU / 3.0);
    if azp >= TAU / 3.0 {
        azp -= TAU / 3.0;
        sector += 1;
    }
    sector = sector.rem_euclid(3);

    let ag = planar_wedge(azp) / c.planar_per_sr;
    let az = solve_azimuth(ag);
    let q = edge_distance(az);
    let dp = planar_edge_distance(azp);
    let sin_half_z = ((rho / dp) * (0.5 * q).sin()).clamp(-1.0, 1.0);
    let z = 2.0 * sin_half_z.asin();

    let phi = az + sector as f64 * (TAU / 3.0);
    let (sin_phi, cos_phi) = phi.sin_cos();
    let (sin_z, cos_z) = z.sin_cos();
    let t0 = face.t0;
    let t1 = face.t1;
    let cc = face.center;
    UnitVec::new(
        cos_z * cc.x + sin_z * (cos_phi * t0.x + sin_phi * t1.x),
        cos_z * cc.y + sin_z * (cos_phi * t0.y + sin_phi * t1.y),
        cos_z * cc.z + sin_z * (cos_phi * t0.z + sin_phi * t1.z),
    )
}

/// Inverse map using the given face's frame regardless of which face
/// actually contains the point.  Exact on the face and a thin margin
/// beyond its edges.
pub fn sphere_to_plane_on(face: &Face, p: UnitVec) -> (f64, f64) {
    let c = consts();
    let z = face.center.angle_to(p);
    if z < 1e-12 {
        return (0.0, 0.0);
    }
    let tp = match face.center.tangent_towards(p) {
        Some(t) => t,
        None => return (0.0, 0.0),
    };
    let cos_a = tp.dot(face.t0);
    let cr = face.t0.cross(tp);
    let sin_a = cr.0 * face.center.x + cr.1 * face.center.y + cr.2 * face.center.z;
    let az_full = wrap_tau(sin_a.atan2(cos_a));
    let mut sector = (az_full / (TAU / 3.0)).floor() as i32;
    let mut az = az_full - sector as f64 * (TAU / 3.0);
    if az >= TAU / 3.0 {
        az -= TAU / 3.0;
        sector += 1;
    }
    sector = sector.rem_euclid(3);

    let cos_h = (-az.cos() * c.cos_cap_g + az.sin() * c.sin_cap_g * c.cos_g).clamp(-1.0, 1.0);
    let ag = az + G + cos_h.acos() - PI;
    let azp = FRAC_PI_3 + (8.0 * ag * c.planar_per_sr - SQRT3).atan();
    let q = edge_distance(az);
    let dp = planar_edge_distance(azp);
    let rho = dp * (0.5 * z).sin() / (0.5 * q).sin();

    let phi = azp + sector as f64 * (TAU / 3.0);
    let (sin_phi, cos_phi) = phi.sin_cos();
    (-rho * sin_phi, rho * cos_phi)
}

/// Inverse map resolving the containing face first.
pub fn sphere_to_plane(icosa: &Icosahedron, p: UnitVec) -> (u8, f64, f64) {
    let f = icosa.find_face(p);
    let (x, y) = sphere_to_plane_on(icosa.face(f), p);
    (f, x, y)
}
