//! Oriented icosahedral frame: vertices, faces, adjacency, and the planar
//! coordinate system attached to each face.
//!
//! Every face carries the same canonical planar triangle (circumradius 1,
//! vertex 0 pointing up).  Cross-face constructions unfold a neighbouring
//! face into the local frame with a planar isometry, so walks across an
//! edge never leave 2D until the final projection back to the sphere.

use crate::sphere::{signed_ring_area, GeoPoint, UnitVec};

pub const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Canonical planar face triangle, counter-clockwise, circumradius 1.
pub const PLANAR_VERTS: [(f64, f64); 3] = [
    (0.0, 1.0),
    (-SQRT3 / 2.0, -0.5),
    (SQRT3 / 2.0, -0.5),
];

/// Side length of the canonical planar triangle.
pub const PLANAR_EDGE: f64 = SQRT3;

/// Area of the canonical planar triangle.
pub const PLANAR_AREA: f64 = 3.0 * SQRT3 / 4.0;

/// Barycentric weights (summing to 1) to planar coordinates.
pub fn planar_from_bary(a: f64, b: f64, c: f64) -> (f64, f64) {
    let (x0, y0) = PLANAR_VERTS[0];
    let (x1, y1) = PLANAR_VERTS[1];
    let (x2, y2) = PLANAR_VERTS[2];
    (a * x0 + b * x1 + c * x2, a * y0 + b * y1 + c * y2)
}

/// Planar coordinates to barycentric weights summing to 1.
pub fn bary_from_planar(x: f64, y: f64) -> (f64, f64, f64) {
    // v0 = (0, 1), v1 = (-s, -1/2), v2 = (s, -1/2) invert in closed form.
    let a = (2.0 * y + 1.0) / 3.0;
    let rest = 1.0 - a;
    let d = x / (SQRT3 / 2.0);
    let c = (rest + d) / 2.0;
    let b = (rest - d) / 2.0;
    (a, b, c)
}

/// Proper planar isometry (rotation plus translation).
#[derive(Debug, Clone, Copy)]
pub struct PlanarIsometry {
    cos: f64,
    sin: f64,
    tx: f64,
    ty: f64,
}

impl PlanarIsometry {
    /// The unique proper isometry sending p1 to q1 and p2 to q2.
    /// The segments must have equal length.
    fn between_segments(p1: (f64, f64), p2: (f64, f64), q1: (f64, f64), q2: (f64, f64)) -> Self {
        let (pdx, pdy) = (p2.0 - p1.0, p2.1 - p1.1);
        let (qdx, qdy) = (q2.0 - q1.0, q2.1 - q1.1);
        let ang = qdy.atan2(qdx) - pdy.atan2(pdx);
        let (sin, cos) = ang.sin_cos();
        let tx = q1.0 - (cos * p1.0 - sin * p1.1);
        let ty = q1.1 - (sin * p1.0 + cos * p1.1);
        PlanarIsometry { cos, sin, tx, ty }
    }

    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        (
            self.cos * x - self.sin * y + self.tx,
            self.sin * x + self.cos * y + self.ty,
        )
    }

    pub fn inverse(&self) -> Self {
        // R^-1 = transpose, t' = -R^-1 t.
        PlanarIsometry {
            cos: self.cos,
            sin: -self.sin,
            tx: -(self.cos * self.tx + self.sin * self.ty),
            ty: -(-self.sin * self.tx + self.cos * self.ty),
        }
    }
}

/// One face of the icosahedron with its cached geometry.
#[derive(Debug, Clone)]
pub struct Face {
    /// Global vertex ids, counter-clockwise seen from outside the sphere.
    pub verts: [u8; 3],
    pub sphere_verts: [UnitVec; 3],
    /// Normalized centroid.
    pub center: UnitVec,
    /// Unit tangent at the center toward vertex slot 0.
    pub t0: UnitVec,
    /// `center x t0`; rotating t0 toward t1 is counter-clockwise from outside.
    pub t1: UnitVec,
    /// Inward unit normals of the three edge planes, edge e = slot e to slot e+1.
    edge_normals: [UnitVec; 3],
    /// For edge e: the face across it and that face's index for the shared edge.
    pub adjacent: [(u8, u8); 3],
    /// For edge e: maps local planar points beyond the edge into the
    /// neighbouring face's frame.
    pub fold: [PlanarIsometry; 3],
}

impl Face {
    /// Closed containment with a small tolerance on each edge plane.
    pub fn contains(&self, p: UnitVec) -> bool {
        self.edge_normals.iter().all(|n| n.dot(p) >= -1e-12)
    }

    fn strictly_contains(&self, p: UnitVec) -> bool {
        self.edge_normals.iter().all(|n| n.dot(p) > 1e-9)
    }
}

/// Placement of the icosahedron on the sphere: vertex 0 goes to the given
/// location and the grid is spun about it by `azimuth_deg` (clockwise from
/// north, matching compass convention).
#[derive(Debug, Clone, Copy)]
pub struct Orientation {
    pub vertex_lon_deg: f64,
    pub vertex_lat_deg: f64,
    pub azimuth_deg: f64,
}

impl Default for Orientation {
    /// Standard symmetric placement: 4 vertices land on the equator and no
    /// vertex sits on a pole.
    fn default() -> Self {
        Orientation {
            vertex_lon_deg: 11.25,
            vertex_lat_deg: 58.282_525_59,
            azimuth_deg: 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Icosahedron {
    pub orientation: Orientation,
    vertices: [UnitVec; 12],
    faces: Vec<Face>,
    /// The five faces meeting at each vertex, ascending.
    vertex_faces: [[u8; 5]; 12],
    /// Lowest face at each vertex and the vertex's slot within it.
    vertex_owner: [(u8, u8); 12],
}

impl Icosahedron {
    pub fn new(orientation: Orientation) -> Self {
        let vertices = place_vertices(orientation);
        let face_verts = face_table();

        let mut faces: Vec<Face> = face_verts
            .iter()
            .map(|&vs| build_face(&vertices, vs))
            .collect();

        // Wire up adjacency and the planar fold across each edge.
        let folds_and_adj: Vec<([(u8, u8); 3], [PlanarIsometry; 3])> = (0..20)
            .map(|f| {
                let mut adj = [(0u8, 0u8); 3];
                let mut fold = [PlanarIsometry {
                    cos: 1.0,
                    sin: 0.0,
                    tx: 0.0,
                    ty: 0.0,
                }; 3];
                for e in 0..3 {
                    let va = face_verts[f][e];
                    let vb = face_verts[f][(e + 1) % 3];
                    let (g, ge) = find_shared_edge(&face_verts, f, va, vb);
                    adj[e] = (g as u8, ge as u8);
                    // va sits at slot ge+1 in g, vb at slot ge.
                    fold[e] = PlanarIsometry::between_segments(
                        PLANAR_VERTS[e],
                        PLANAR_VERTS[(e + 1) % 3],
                        PLANAR_VERTS[(ge + 1) % 3],
                        PLANAR_VERTS[ge],
                    );
                }
                (adj, fold)
            })
            .collect();
        for (f, (adj, fold)) in folds_and_adj.into_iter().enumerate() {
            faces[f].adjacent = adj;
            faces[f].fold = fold;
        }

        let mut vertex_faces = [[0u8; 5]; 12];
        for v in 0..12 {
            let mut around: Vec<u8> = (0..20u8)
                .filter(|&f| face_verts[f as usize].contains(&(v as u8)))
                .collect();
            around.sort_unstable();
            assert_eq!(around.len(), 5);
            vertex_faces[v].copy_from_slice(&around);
        }
        let mut vertex_owner = [(0u8, 0u8); 12];
        for v in 0..12 {
            let f = vertex_faces[v][0];
            let slot = face_verts[f as usize]
                .iter()
                .position(|&w| w == v as u8)
                .unwrap() as u8;
            vertex_owner[v] = (f, slot);
        }

        Icosahedron {
            orientation,
            vertices,
            faces,
            vertex_faces,
            vertex_owner,
        }
    }

    pub fn vertices(&self) -> &[UnitVec; 12] {
        &self.vertices
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, f: u8) -> &Face {
        &self.faces[f as usize]
    }

    pub fn vertex_faces(&self, v: u8) -> &[u8; 5] {
        &self.vertex_faces[v as usize]
    }

    pub fn vertex_owner(&self, v: u8) -> (u8, u8) {
        self.vertex_owner[v as usize]
    }

    /// Face containing `p`; points on shared edges resolve to the lowest
    /// face index so repeated lookups agree.
    pub fn find_face(&self, p: UnitVec) -> u8 {
        let mut best = 0usize;
        let mut best_dot = f64::NEG_INFINITY;
        for (f, face) in self.faces.iter().enumerate() {
            let d = face.center.dot(p);
            if d > best_dot {
                best_dot = d;
                best = f;
            }
        }
        if self.faces[best].strictly_contains(p) {
            return best as u8;
        }
        for (f, face) in self.faces.iter().enumerate() {
            if face.contains(p) {
                return f as u8;
            }
        }
        // Rounding pushed p just outside every closed test; the nearest
        // center is still the right answer.
        best as u8
    }
}

fn place_vertices(orientation: Orientation) -> [UnitVec; 12] {
    // Local frame: vertex 0 at +z, first ring of five below it starting at
    // local longitude 0, second ring offset by 36 degrees, vertex 11 at -z.
    let ring_lat = 0.5f64.atan();
    let mut local = [[0.0f64; 3]; 12];
    local[0] = [0.0, 0.0, 1.0];
    for k in 0..5 {
        let lon = (72.0 * k as f64).to_radians();
        local[1 + k] = [
            ring_lat.cos() * lon.cos(),
            ring_lat.cos() * lon.sin(),
            ring_lat.sin(),
        ];
        let lon2 = (36.0 + 72.0 * k as f64).to_radians();
        local[6 + k] = [
            ring_lat.cos() * lon2.cos(),
            ring_lat.cos() * lon2.sin(),
            -ring_lat.sin(),
        ];
    }
    local[11] = [0.0, 0.0, -1.0];

    let p0 = GeoPoint::new(orientation.vertex_lon_deg, orientation.vertex_lat_deg).to_unit();
    // North and east tangents at p0 (p0 is never a pole for valid orientations).
    let (lon, lat) = (
        orientation.vertex_lon_deg.to_radians(),
        orientation.vertex_lat_deg.to_radians(),
    );
    let north = UnitVec::new(
        -lat.sin() * lon.cos(),
        -lat.sin() * lon.sin(),
        lat.cos(),
    );
    let east = UnitVec::new(-lon.sin(), lon.cos(), 0.0);
    let az = orientation.azimuth_deg.to_radians();
    // Local +x (the ring-1 meridian at local longitude 0) points along the
    // compass azimuth; azimuth is clockwise from north, hence +east * sin.
    let dx = UnitVec::new(
        az.cos() * north.x + az.sin() * east.x,
        az.cos() * north.y + az.sin() * east.y,
        az.cos() * north.z + az.sin() * east.z,
    );
    let dy_t = p0.cross(dx);
    let dy = UnitVec::new(dy_t.0, dy_t.1, dy_t.2);

    let mut out = [UnitVec::new(0.0, 0.0, 1.0); 12];
    for (i, l) in local.iter().enumerate() {
        out[i] = UnitVec::new(
            l[0] * dx.x + l[1] * dy.x + l[2] * p0.x,
            l[0] * dx.y + l[1] * dy.y + l[2] * p0.y,
            l[0] * dx.z + l[1] * dy.z + l[2] * p0.z,
        );
    }
    out
}

/// The 20 faces, counter-clockwise from outside, in four bands of five:
/// cap around vertex 0, downward band, upward band, cap around vertex 11.
fn face_table() -> [[u8; 3]; 20] {
    let mut t = [[0u8; 3]; 20];
    for k in 0u8..5 {
        let k1 = (k + 1) % 5;
        t[k as usize] = [0, 1 + k, 1 + k1];
        t[5 + k as usize] = [1 + k, 6 + k, 1 + k1];
        t[10 + k as usize] = [6 + k, 6 + k1, 1 + k1];
        t[15 + k as usize] = [11, 6 + k1, 6 + k];
    }
    t
}

fn build_face(vertices: &[UnitVec; 12], vs: [u8; 3]) -> Face {
    let sv = [
        vertices[vs[0] as usize],
        vertices[vs[1] as usize],
        vertices[vs[2] as usize],
    ];
    let sum = (
        sv[0].x + sv[1].x + sv[2].x,
        sv[0].y + sv[1].y + sv[2].y,
        sv[0].z + sv[1].z + sv[2].z,
    );
    let center = UnitVec::new(sum.0, sum.1, sum.2);
    debug_assert!(
        (signed_ring_area(&sv) - 4.0 * std::f64::consts::PI / 20.0).abs() < 1e-9,
        "face winding must be counter-clockwise from outside"
    );
    let t0 = center
        .tangent_towards(sv[0])
        .expect("face center is never at or opposite a vertex");
    let t1c = center.cross(t0);
    let t1 = UnitVec::new(t1c.0, t1c.1, t1c.2);
    let mut edge_normals = [center; 3];
    for e in 0..3 {
        let n = sv[e].cross(sv[(e + 1) % 3]);
        edge_normals[e] = UnitVec::new(n.0, n.1, n.2);
    }
    Face {
        verts: vs,
        sphere_verts: sv,
        center,
        t0,
        t1,
        edge_normals,
        adjacent: [(0, 0); 3],
        fold: [PlanarIsometry {
            cos: 1.0,
            sin: 0.0,
            tx: 0.0,
            ty: 0.0,
        }; 3],
    }
}

fn find_shared_edge(face_verts: &[[u8; 3]; 20], f: usize, va: u8, vb: u8) -> (usize, usize) {
    for (g, gv) in face_verts.iter().enumerate() {
        if g == f {
            continue;
        }
        for ge in 0..3 {
            if gv[ge] == vb && gv[(ge + 1) % 3] == va {
                return (g, ge);
            }
        }
    }
    unreachable!("every icosahedron edge is shared by exactly two faces");
}

/// Identify points on face edges and vertices in lattice coordinates.
///
/// Edge e runs from slot e to slot e+1; the parameter s counts lattice steps
/// from slot e.  Coordinates are (b, c) barycentric numerators against a
/// frequency `freq`, with a = freq - b - c.
pub fn edge_coords(e: u8, s: i64, freq: i64) -> (i64, i64) {
    match e {
        0 => (s, 0),
        1 => (freq - s, s),
        2 => (0, freq - s),
        _ => unreachable!(),
    }
}

pub fn edge_param(e: u8, b: i64, c: i64, freq: i64) -> i64 {
    match e {
        0 => b,
        1 => c,
        2 => freq - b - c,
        _ => unreachable!(),
    }
}

/// Re-express an on-edge lattice point in the frame of the face across the
/// edge.  The parameter reverses because the two faces traverse the shared
/// edge in opposite directions.
pub fn transfer_edge_point(
    icosa: &Icosahedron,
    f: u8,
    e: u8,
    s: i64,
    freq: i64,
) -> (u8, (i64, i64)) {
    let (g, ge) = icosa.face(f).adjacent[e as usize];
    (g, edge_coords(ge, freq - s, freq))
}
