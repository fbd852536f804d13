//! Integer lattice addressing on the face triangles.
//!
//! Triangle cells live on a row/column scheme per face: resolution k splits
//! a face into n = 2^k rows, row i holding 2i+1 alternating up and down
//! triangles (j even = up, j odd = down).  Hexagon cells are indexed by the
//! barycentric numerators (b, c) of their center on a frequency-F lattice;
//! aperture 4 doubles F per level, aperture 3 alternates between the full
//! lattice (class I) and the sqrt(3)-coarser sublattice with b = c (mod 3)
//! (class II) while F triples every second level.
//!
//! Cells on face edges and around icosahedron vertices exist in several
//! face frames at once; the canonical address is the lexicographically
//! smallest (face, b, c).  All cross-face reasoning happens through exact
//! integer edge transfers, never floating point.

use super::icosa::{
    bary_from_planar, edge_param, transfer_edge_point, Icosahedron,
};

/// Offsets to the six lattice neighbours of a class I hexagon center.
pub const UNIT_OFFSETS: [(i64, i64); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];

/// Offsets to the six neighbours within the class II sublattice.
pub const SKEW_OFFSETS: [(i64, i64); 6] = [(1, 1), (-1, 2), (-2, 1), (-1, -1), (1, -2), (2, -1)];

pub fn coord_valid(freq: i64, b: i64, c: i64) -> bool {
    b >= 0 && c >= 0 && b + c <= freq
}

// ---- triangles ----------------------------------------------------------

/// Corner coordinates (b, c numerators over n = 2^res) of a triangle cell,
/// counter-clockwise.  Up triangles list apex first; down triangles start
/// at their top-left corner.
pub fn tri_corners_bc(i: i64, j: i64) -> [(i64, i64); 3] {
    let m = j / 2;
    if j % 2 == 0 {
        [(i - m, m), (i + 1 - m, m), (i - m, m + 1)]
    } else {
        [(i - m, m), (i - m, m + 1), (i - m - 1, m + 1)]
    }
}

/// The four resolution k+1 triangles tiling a resolution-k triangle.
pub fn tri_children(i: i64, j: i64) -> [(i64, i64); 4] {
    let m = j / 2;
    if j % 2 == 0 {
        [
            (2 * i, 4 * m),
            (2 * i + 1, 4 * m),
            (2 * i + 1, 4 * m + 1),
            (2 * i + 1, 4 * m + 2),
        ]
    } else {
        [
            (2 * i, 4 * m + 1),
            (2 * i, 4 * m + 2),
            (2 * i, 4 * m + 3),
            (2 * i + 1, 4 * m + 3),
        ]
    }
}

#[cfg(test)]
pub fn tri_parent(i: i64, j: i64) -> (i64, i64) {
    let m = j / 2;
    let up = j % 2 == 0;
    let (pi, pm) = (i / 2, m / 2);
    let parent_up = if up {
        i % 2 == 1 || m % 2 == 0
    } else {
        i % 2 == 1 && m % 2 == 0
    };
    (pi, if parent_up { 2 * pm } else { 2 * pm + 1 })
}

/// The three edge neighbours.  Down triangles never touch a face edge with
/// an edge, so only up triangles can cross into another face.
pub fn tri_neighbors(
    icosa: &Icosahedron,
    res: u8,
    face: u8,
    i: i64,
    j: i64,
) -> [(u8, i64, i64); 3] {
    let n = 1i64 << res;
    let m = j / 2;
    if j % 2 == 1 {
        return [
            (face, i, 2 * m),
            (face, i, 2 * m + 2),
            (face, i - 1, 2 * m),
        ];
    }
    let left = if m == 0 {
        tri_cross(icosa, n, face, 0, i)
    } else {
        (face, i, 2 * m - 1)
    };
    let right = if m == i {
        tri_cross(icosa, n, face, 2, n - i - 1)
    } else {
        (face, i, 2 * m + 1)
    };
    let below = if i == n - 1 {
        tri_cross(icosa, n, face, 1, m)
    } else {
        (face, i + 1, 2 * m + 1)
    };
    [left, right, below]
}

/// Neighbour across face edge `e` of the up triangle whose edge occupies
/// parameters [s_low, s_low+1] along that face edge.  The mirror image of
/// an edge triangle is the neighbouring face's edge triangle over the
/// reversed parameter interval.
fn tri_cross(icosa: &Icosahedron, n: i64, face: u8, e: u8, s_low: i64) -> (u8, i64, i64) {
    let (g, ge) = icosa.face(face).adjacent[e as usize];
    let t_low = n - s_low - 1;
    match ge {
        0 => (g, t_low, 0),
        1 => (g, n - 1, 2 * t_low),
        2 => {
            let i = n - 1 - t_low;
            (g, i, 2 * i)
        }
        _ => unreachable!(),
    }
}

/// Containing triangle of an in-face planar point.  Points on lattice
/// lines belong to several closed cells; the result is deterministic.
pub fn tri_locate(res: u8, x: f64, y: f64) -> (i64, i64) {
    let n = 1i64 << res;
    let (a, b, c) = bary_from_planar(x, y);
    let fa = (a * n as f64).max(0.0);
    let fb = (b * n as f64).max(0.0);
    let fc = (c * n as f64).max(0.0);
    let mut w = fa.floor() as i64;
    let mut u = fb.floor() as i64;
    let mut v = fc.floor() as i64;
    // The floors sum to n-1 (up cell) or n-2 (down cell); points exactly on
    // lattice lines or rounding slop can push the sum outside that band.
    while w + u + v < n - 2 {
        let (da, db, dc) = (fa - w as f64, fb - u as f64, fc - v as f64);
        if da >= db && da >= dc {
            w += 1;
        } else if db >= dc {
            u += 1;
        } else {
            v += 1;
        }
    }
    while w + u + v > n - 1 {
        if w >= u && w >= v && w > 0 {
            w -= 1;
        } else if u >= v && u > 0 {
            u -= 1;
        } else if v > 0 {
            v -= 1;
        } else {
            w -= 1;
        }
    }
    let up = w + u + v == n - 1;
    let i = (n - 1 - w).clamp(0, n - 1);
    let m = if up {
        v.clamp(0, i)
    } else {
        v.clamp(0, (i - 1).max(0))
    };
    (i, if up { 2 * m } else { 2 * m + 1 })
}

// ---- hexagons -----------------------------------------------------------

/// All face frames containing a lattice point: one for interior points,
/// two on face edges, five at icosahedron vertices.
pub fn hex_frames(icosa: &Icosahedron, freq: i64, face: u8, b: i64, c: i64) -> Vec<(u8, i64, i64)> {
    let a = freq - b - c;
    let zeros = (a == 0) as u8 + (b == 0) as u8 + (c == 0) as u8;
    match zeros {
        0 => vec![(face, b, c)],
        1 => {
            // Edge e has c = 0, a = 0, b = 0 for e = 0, 1, 2 respectively.
            let e = if c == 0 {
                0
            } else if a == 0 {
                1
            } else {
                2
            };
            let s = edge_param(e, b, c, freq);
            let (g, (gb, gc)) = transfer_edge_point(icosa, face, e, s, freq);
            vec![(face, b, c), (g, gb, gc)]
        }
        _ => {
            let slot = if b == freq {
                1
            } else if c == freq {
                2
            } else {
                0
            };
            let v = icosa.face(face).verts[slot];
            icosa
                .vertex_faces(v)
                .iter()
                .map(|&g| {
                    let gslot = icosa
                        .face(g)
                        .verts
                        .iter()
                        .position(|&w| w == v)
                        .unwrap();
                    let (gb, gc) = match gslot {
                        0 => (0, 0),
                        1 => (freq, 0),
                        _ => (0, freq),
                    };
                    (g, gb, gc)
                })
                .collect()
        }
    }
}

/// Lexicographically smallest frame; the cell's one true address.
pub fn hex_canonical(icosa: &Icosahedron, freq: i64, face: u8, b: i64, c: i64) -> (u8, i64, i64) {
    hex_frames(icosa, freq, face, b, c)
        .into_iter()
        .min()
        .unwrap()
}

/// Icosahedron vertex slot if the point is a face corner.
pub fn hex_vertex_slot(freq: i64, b: i64, c: i64) -> Option<u8> {
    match (b, c) {
        (0, 0) => Some(0),
        _ if b == freq && c == 0 => Some(1),
        _ if c == freq && b == 0 => Some(2),
        _ => None,
    }
}

/// Carry a lattice point that stepped across exactly one face edge into the
/// adjacent face's coordinates.  The planar fold is an isometry between two
/// copies of the same triangular lattice, so rounding after the float fold
/// recovers exact integers.  Returns None for points past two edges (beyond
/// any single fold's wedge) and passes valid points through unchanged.
fn fold_lattice_point(
    icosa: &Icosahedron,
    freq: i64,
    face: u8,
    b: i64,
    c: i64,
) -> Option<(u8, i64, i64)> {
    let a = freq - b - c;
    if a >= 0 && b >= 0 && c >= 0 {
        return Some((face, b, c));
    }
    if (a < 0) as u8 + (b < 0) as u8 + (c < 0) as u8 != 1 {
        return None;
    }
    let e = if c < 0 {
        0
    } else if a < 0 {
        1
    } else {
        2
    };
    let (g, _) = icosa.face(face).adjacent[e];
    let s = freq as f64;
    let (x, y) = super::icosa::planar_from_bary(a as f64 / s, b as f64 / s, c as f64 / s);
    let (gx, gy) = icosa.face(face).fold[e].apply(x, y);
    let (_, gb, gc) = bary_from_planar(gx, gy);
    let rb = (gb * s).round();
    let rc = (gc * s).round();
    debug_assert!((gb * s - rb).abs() < 1e-6 && (gc * s - rc).abs() < 1e-6);
    let (rb, rc) = (rb as i64, rc as i64);
    if coord_valid(freq, rb, rc) {
        Some((g, rb, rc))
    } else {
        None
    }
}

/// Canonical addresses of the 6 (5 at pentagons) edge-adjacent cells.
pub fn hex_neighbors(
    icosa: &Icosahedron,
    freq: i64,
    class_ii: bool,
    face: u8,
    b: i64,
    c: i64,
) -> Vec<(u8, i64, i64)> {
    let offsets = if class_ii { &SKEW_OFFSETS } else { &UNIT_OFFSETS };
    let mut out = std::collections::BTreeSet::new();
    for (f, fb, fc) in hex_frames(icosa, freq, face, b, c) {
        for &(db, dc) in offsets {
            // Class II cells can abut cells across a face edge even when
            // their own center is interior; fold such candidates over.
            if let Some((g, nb, nc)) = fold_lattice_point(icosa, freq, f, fb + db, fc + dc) {
                out.insert(hex_canonical(icosa, freq, g, nb, nc));
            }
        }
    }
    out.into_iter().collect()
}

/// Candidate children of an aperture-4 hexagon: its center re-expressed on
/// the doubled lattice plus the six surrounding fine cells.  Guaranteed to
/// include, jointly with the neighbours' candidates, every finer cell that
/// overlaps this one.
pub fn hex_children_a4(
    icosa: &Icosahedron,
    freq: i64,
    face: u8,
    b: i64,
    c: i64,
) -> Vec<(u8, i64, i64)> {
    let child_freq = 2 * freq;
    let mut out = std::collections::BTreeSet::new();
    for (f, fb, fc) in hex_frames(icosa, freq, face, b, c) {
        let (base_b, base_c) = (2 * fb, 2 * fc);
        for &(db, dc) in std::iter::once(&(0i64, 0i64)).chain(UNIT_OFFSETS.iter()) {
            if let Some((g, nb, nc)) =
                fold_lattice_point(icosa, child_freq, f, base_b + db, base_c + dc)
            {
                out.insert(hex_canonical(icosa, child_freq, g, nb, nc));
            }
        }
    }
    out.into_iter().collect()
}

/// Candidate children of an aperture-3 hexagon.  Class I parents refine
/// onto the tripled lattice's class II sublattice; class II parents refine
/// onto the full lattice at the same frequency.
pub fn hex_children_a3(
    icosa: &Icosahedron,
    freq: i64,
    parent_class_ii: bool,
    face: u8,
    b: i64,
    c: i64,
) -> Vec<(u8, i64, i64)> {
    let mut out = std::collections::BTreeSet::new();
    if parent_class_ii {
        for (f, fb, fc) in hex_frames(icosa, freq, face, b, c) {
            for &(db, dc) in std::iter::once(&(0i64, 0i64)).chain(UNIT_OFFSETS.iter()) {
                if let Some((g, nb, nc)) = fold_lattice_point(icosa, freq, f, fb + db, fc + dc) {
                    out.insert(hex_canonical(icosa, freq, g, nb, nc));
                }
            }
        }
    } else {
        let child_freq = 3 * freq;
        for (f, fb, fc) in hex_frames(icosa, freq, face, b, c) {
            let (base_b, base_c) = (3 * fb, 3 * fc);
            for &(db, dc) in std::iter::once(&(0i64, 0i64)).chain(SKEW_OFFSETS.iter()) {
                if let Some((g, nb, nc)) =
                    fold_lattice_point(icosa, child_freq, f, base_b + db, base_c + dc)
                {
                    out.insert(hex_canonical(icosa, child_freq, g, nb, nc));
                }
            }
        }
    }
    out.into_iter().collect()
}

/// Planar corner positions of a hexagon cell.  Each corner is a list of
/// equivalent (face, x, y) representations; cell-edge construction picks a
/// frame shared by (or adjacent between) consecutive corners.  Class I
/// corners are centroids of the surrounding lattice triangles, strictly
/// interior to one face, so they carry exactly one frame.  Class II corners
/// are the surrounding lattice points themselves and can sit on face edges
/// with two frames.
pub fn hex_corner_frames(
    icosa: &Icosahedron,
    freq: i64,
    class_ii: bool,
    face: u8,
    b: i64,
    c: i64,
) -> Vec<Vec<(u8, f64, f64)>> {
    let f64_pt = |f: u8, pb: f64, pc: f64| {
        let pa = freq as f64 - pb - pc;
        let s = freq as f64;
        let (x, y) = super::icosa::planar_from_bary(pa / s, pb / s, pc / s);
        (f, x, y)
    };
    if class_ii {
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::new();
        for (f, fb, fc) in hex_frames(icosa, freq, face, b, c) {
            for &(db, dc) in &UNIT_OFFSETS {
                let (nb, nc) = (fb + db, fc + dc);
                if coord_valid(freq, nb, nc)
                    && seen.insert(hex_canonical(icosa, freq, f, nb, nc))
                {
                    let reps = hex_frames(icosa, freq, f, nb, nc)
                        .into_iter()
                        .map(|(g, gb, gc)| f64_pt(g, gb as f64, gc as f64))
                        .collect();
                    out.push(reps);
                }
            }
        }
        out
    } else {
        // The six lattice triangles around a center, as corner triples.
        const TRIS: [[(i64, i64); 3]; 6] = [
            [(0, 0), (1, 0), (0, 1)],
            [(0, 0), (0, 1), (-1, 1)],
            [(0, 0), (-1, 1), (-1, 0)],
            [(0, 0), (-1, 0), (0, -1)],
            [(0, 0), (0, -1), (1, -1)],
            [(0, 0), (1, -1), (1, 0)],
        ];
        let mut out = Vec::new();
        for (f, fb, fc) in hex_frames(icosa, freq, face, b, c) {
            for tri in &TRIS {
                if tri.iter().all(|&(db, dc)| coord_valid(freq, fb + db, fc + dc)) {
                    let cb = tri.iter().map(|&(db, _)| fb + db).sum::<i64>() as f64 / 3.0;
                    let cc = tri.iter().map(|&(_, dc)| fc + dc).sum::<i64>() as f64 / 3.0;
                    out.push(vec![f64_pt(f, cb, cc)]);
                }
            }
        }
        out
    }
}

fn round_pair(fq: f64, fr: f64) -> (i64, i64) {
    // Cube rounding on axial coordinates: round all three cube components
    // and recompute the one that rounded worst so they sum to zero.
    let fs = -fq - fr;
    let mut rq = fq.round();
    let mut rr = fr.round();
    let mut rs = fs.round();
    if rq + rr + rs != 0.0 {
        let (dq, dr, ds) = ((rq - fq).abs(), (rr - fr).abs(), (rs - fs).abs());
        if dq >= dr && dq >= ds {
            rq = -rr - rs;
        } else if dr >= ds {
            rr = -rq - rs;
        } else {
            rs = -rq - rr;
        }
    }
    let _ = rs;
    (rq as i64, rr as i64)
}

/// Canonical address of the hexagon cell containing an in-face planar
/// point: the nearest lattice center, which owns the point because planar
/// hexagon cells are exactly the Voronoi regions of their centers.
pub fn hex_locate(
    icosa: &Icosahedron,
    freq: i64,
    class_ii: bool,
    face: u8,
    x: f64,
    y: f64,
) -> (u8, i64, i64) {
    let (_, bw, cw) = bary_from_planar(x, y);
    let fb = bw * freq as f64;
    let fc = cw * freq as f64;
    let (b0, c0) = if class_ii {
        let alpha = (2.0 * fb + fc) / 3.0;
        let beta = (fc - fb) / 3.0;
        let (ra, rb) = round_pair(alpha, beta);
        (ra - rb, ra + 2 * rb)
    } else {
        round_pair(fb, fc)
    };
    let (bb, cc) = if coord_valid(freq, b0, c0) {
        (b0, c0)
    } else {
        // Only possible when the point hugs a face edge; the owner is then
        // among the rounded point's lattice neighbours.
        let offsets = if class_ii { &SKEW_OFFSETS } else { &UNIT_OFFSETS };
        let mut best: Option<(f64, i64, i64)> = None;
        for &(db, dc) in offsets {
            let (nb, nc) = (b0 + db, c0 + dc);
            if !coord_valid(freq, nb, nc) {
                continue;
            }
            let (eb, ec) = (nb as f64 - fb, nc as f64 - fc);
            let d2 = eb * eb + ec * ec + eb * ec;
            if best.map_or(true, |(bd, bb2, bc2)| {
                (d2, nb, nc) < (bd, bb2, bc2)
            }) {
                best = Some((d2, nb, nc));
            }
        }
        match best {
            Some((_, nb, nc)) => (nb, nc),
            None => {
                let nb = b0.clamp(0, freq);
                (nb, c0.clamp(0, freq - nb))
            }
        }
    };
    hex_canonical(icosa, freq, face, bb, cc)
}

/// Lattice points of a face that this face canonically owns, ascending.
pub fn hex_enumerate_owned(
    icosa: &Icosahedron,
    freq: i64,
    class_ii: bool,
    face: u8,
) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for b in 0..=freq {
        for c in 0..=(freq - b) {
            if class_ii && (b - c).rem_euclid(3) != 0 {
                continue;
            }
            let a = freq - b - c;
            let interior = a > 0 && b > 0 && c > 0;
            if interior || hex_canonical(icosa, freq, face, b, c).0 == face {
                out.push((b, c));
            }
        }
    }
    out
}
