//! Classified-raster ingestion: parse an ESRI ASCII grid, threshold it to
//! a binary mask, label connected components, and trace each component's
//! boundary into lon/lat polygons.
//!
//! Pixel edges become lon/lat-aligned segments on the pixel corner
//! lattice; no collinear simplification is applied, so ring vertex counts
//! equal ring edge counts.  Outer rings are counter-clockwise, holes
//! clockwise, matching GeoJSON conventions.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::geojson::PolygonFeature;
use crate::sphere::GeoPoint;

#[derive(Debug, Error)]
pub enum RasterError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("dimension mismatch: header promises {want} values, file holds {got}")]
    DimensionMismatch { want: usize, got: usize },
}

// ── ASCII grid ──────────────────────────────────────────────────────────────

/// An ESRI ASCII grid: integer digital numbers, row 0 northernmost.
#[derive(Debug, Clone)]
pub struct AsciiGrid {
    pub ncols: usize,
    pub nrows: usize,
    pub xllcorner: f64,
    pub yllcorner: f64,
    pub cellsize: f64,
    pub nodata: i64,
    pub values: Vec<i64>,
}

impl AsciiGrid {
    pub fn value(&self, row: usize, col: usize) -> i64 {
        self.values[row * self.ncols + col]
    }
}

pub fn read_ascii_grid(path: impl AsRef<Path>) -> Result<AsciiGrid, RasterError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| RasterError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_ascii_grid(&text)
}

pub fn parse_ascii_grid(text: &str) -> Result<AsciiGrid, RasterError> {
    let mut header: BTreeMap<String, f64> = BTreeMap::new();
    let mut values: Vec<i64> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let mut tokens = line.split_whitespace().peekable();
        let Some(first) = tokens.peek() else {
            continue;
        };
        if first.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) {
            if !values.is_empty() {
                return Err(RasterError::Parse {
                    line: line_no,
                    msg: "header line after data values".to_string(),
                });
            }
            let key = tokens.next().unwrap().to_ascii_lowercase();
            let val = tokens.next().ok_or_else(|| RasterError::Parse {
                line: line_no,
                msg: format!("header key {key:?} lacks a value"),
            })?;
            let num: f64 = val.parse().map_err(|_| RasterError::Parse {
                line: line_no,
                msg: format!("header value {val:?} is not a number"),
            })?;
            header.insert(key, num);
        } else {
            for tok in tokens {
                let v: i64 = tok.parse().map_err(|_| RasterError::Parse {
                    line: line_no,
                    msg: format!("data value {tok:?} is not an integer"),
                })?;
                values.push(v);
            }
        }
    }
    let mut take = |key: &str| {
        header.remove(key).ok_or_else(|| RasterError::Parse {
            line: 0,
            msg: format!("missing header key {key:?}"),
        })
    };
    let ncols = take("ncols")? as usize;
    let nrows = take("nrows")? as usize;
    let xllcorner = take("xllcorner")?;
    let yllcorner = take("yllcorner")?;
    let cellsize = take("cellsize")?;
    let nodata = header.remove("nodata_value").unwrap_or(-9999.0) as i64;
    if ncols == 0 || nrows == 0 || cellsize <= 0.0 {
        return Err(RasterError::Parse {
            line: 0,
            msg: format!("bad raster shape: {ncols} x {nrows}, cellsize {cellsize}"),
        });
    }
    if values.len() != ncols * nrows {
        return Err(RasterError::DimensionMismatch {
            want: ncols * nrows,
            got: values.len(),
        });
    }
    Ok(AsciiGrid {
        ncols,
        nrows,
        xllcorner,
        yllcorner,
        cellsize,
        nodata,
        values,
    })
}

// ── Threshold ───────────────────────────────────────────────────────────────

/// A boolean pixel mask with the georeferencing of its source grid.
#[derive(Debug, Clone)]
pub struct BinaryMask {
    pub ncols: usize,
    pub nrows: usize,
    pub xllcorner: f64,
    pub yllcorner: f64,
    pub cellsize: f64,
    pub cells: Vec<bool>,
}

impl BinaryMask {
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.cells[row * self.ncols + col]
    }
}

/// True where the digital number equals `dn`.  Nodata pixels never match,
/// even when `dn` equals the nodata sentinel.
pub fn threshold(grid: &AsciiGrid, dn: i64) -> BinaryMask {
    BinaryMask {
        ncols: grid.ncols,
        nrows: grid.nrows,
        xllcorner: grid.xllcorner,
        yllcorner: grid.yllcorner,
        cellsize: grid.cellsize,
        cells: grid
            .values
            .iter()
            .map(|&v| v == dn && v != grid.nodata)
            .collect(),
    }
}

/// Build a mask directly from a boolean matrix, for generated fields.
pub fn mask_from_rows(
    rows: &[Vec<bool>],
    xllcorner: f64,
    yllcorner: f64,
    cellsize: f64,
) -> BinaryMask {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    BinaryMask {
        ncols,
        nrows,
        xllcorner,
        yllcorner,
        cellsize,
        cells: rows.iter().flatten().copied().collect(),
    }
}

/// Render a mask as an ESRI ASCII grid, `dn` for true pixels and 0
/// elsewhere.
pub fn mask_to_ascii(mask: &BinaryMask, dn: i64) -> String {
    let mut out = String::new();
    out.push_str(&format!("ncols {}\n", mask.ncols));
    out.push_str(&format!("nrows {}\n", mask.nrows));
    out.push_str(&format!("xllcorner {}\n", mask.xllcorner));
    out.push_str(&format!("yllcorner {}\n", mask.yllcorner));
    out.push_str(&format!("cellsize {}\n", mask.cellsize));
    out.push_str("NODATA_value -9999\n");
    for r in 0..mask.nrows {
        let row: Vec<String> = (0..mask.ncols)
            .map(|c| if mask.get(r, c) { dn.to_string() } else { "0".to_string() })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

// ── Polygonization ──────────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    Eight,
}

/// One clump of pixels with its traced boundary.  The outer ring is
/// counter-clockwise; holes are clockwise and informational.
#[derive(Debug, Clone)]
pub struct Component {
    pub pixel_count: u64,
    pub outer: Vec<GeoPoint>,
    pub holes: Vec<Vec<GeoPoint>>,
}

pub fn polygonize(mask: &BinaryMask, conn: Connectivity) -> Vec<Component> {
    let (w, h) = (mask.ncols, mask.nrows);
    if w == 0 || h == 0 {
        return Vec::new();
    }
    let mut labels = vec![0u32; w * h];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    let offsets: &[(i64, i64)] = match conn {
        Connectivity::Four => &[(-1, 0), (1, 0), (0, -1), (0, 1)],
        Connectivity::Eight => &[
            (-1, 0),
            (1, 0),
            (0, -1),
            (0, 1),
            (-1, -1),
            (-1, 1),
            (1, -1),
            (1, 1),
        ],
    };
    for start in 0..w * h {
        if !mask.cells[start] || labels[start] != 0 {
            continue;
        }
        let id = comps.len() as u32 + 1;
        let mut pixels = Vec::new();
        let mut stack = vec![start];
        labels[start] = id;
        while let Some(idx) = stack.pop() {
            pixels.push(idx);
            let (r, c) = ((idx / w) as i64, (idx % w) as i64);
            for &(dr, dc) in offsets {
                let (nr, nc) = (r + dr, c + dc);
                if nr < 0 || nc < 0 || nr >= h as i64 || nc >= w as i64 {
                    continue;
                }
                let n = nr as usize * w + nc as usize;
                if mask.cells[n] && labels[n] == 0 {
                    labels[n] = id;
                    stack.push(n);
                }
            }
        }
        comps.push(pixels);
    }

    comps
        .iter()
        .enumerate()
        .map(|(i, pixels)| trace_component(mask, &labels, i as u32 + 1, pixels))
        .collect()
}

/// Boundary edges keep the component on their left, so outer rings come
/// out counter-clockwise and holes clockwise.  Corners where the boundary
/// touches itself (diagonal contacts) carry two outgoing edges; taking the
/// rightmost turn relative to the incoming direction keeps every traced
/// ring free of crossings and merges pinched regions into one ring.
fn trace_component(
    mask: &BinaryMask,
    labels: &[u32],
    id: u32,
    pixels: &[usize],
) -> Component {
    let (w, h) = (mask.ncols as i64, mask.nrows as i64);
    let same = |r: i64, c: i64| {
        r >= 0 && c >= 0 && r < h && c < w && labels[(r * w + c) as usize] == id
    };
    // Directed edges on the corner lattice, x east, y north from the
    // lower-left grid corner.
    let mut edges: BTreeMap<(i64, i64), Vec<(i64, i64)>> = BTreeMap::new();
    let mut n_edges = 0usize;
    for &idx in pixels {
        let (r, c) = (idx as i64 / w, idx as i64 % w);
        let (x0, x1) = (c, c + 1);
        let (y0, y1) = (h - 1 - r, h - r);
        let sides = [
            (r + 1, c, (x0, y0), (x1, y0)), // south side, east-bound
            (r, c + 1, (x1, y0), (x1, y1)), // east side, north-bound
            (r - 1, c, (x1, y1), (x0, y1)), // north side, west-bound
            (r, c - 1, (x0, y1), (x0, y0)), // west side, south-bound
        ];
        for (nr, nc, from, to) in sides {
            if !same(nr, nc) {
                edges.entry(from).or_default().push(to);
                n_edges += 1;
            }
        }
    }
    for outs in edges.values_mut() {
        outs.sort_unstable();
    }

    let mut rings: Vec<Vec<(i64, i64)>> = Vec::new();
    while n_edges > 0 {
        let start = *edges
            .iter()
            .find(|(_, outs)| !outs.is_empty())
            .expect("edge count and edge map agree")
            .0;
        let mut ring = vec![start];
        let first = edges.get_mut(&start).unwrap().remove(0);
        n_edges -= 1;
        let mut prev = start;
        let mut cur = first;
        loop {
            let outs = edges.get_mut(&cur).map(std::mem::take).unwrap_or_default();
            if cur == start && outs.is_empty() {
                break;
            }
            assert!(!outs.is_empty(), "boundary edges balance at every corner");
            let d_in = (cur.0 - prev.0, cur.1 - prev.1);
            // Preference: right turn, straight, left turn, reverse.
            let prefs = [
                (d_in.1, -d_in.0),
                d_in,
                (-d_in.1, d_in.0),
                (-d_in.0, -d_in.1),
            ];
            let next = prefs
                .iter()
                .map(|d| (cur.0 + d.0, cur.1 + d.1))
                .find(|cand| outs.contains(cand))
                .expect("an outgoing boundary edge continues the ring");
            let rest: Vec<(i64, i64)> = outs.into_iter().filter(|&o| o != next).collect();
            *edges.get_mut(&cur).unwrap() = rest;
            n_edges -= 1;
            ring.push(cur);
            prev = cur;
            cur = next;
        }
        rings.push(ring);
    }

    let to_geo = |&(x, y): &(i64, i64)| {
        GeoPoint::new(
            mask.xllcorner + x as f64 * mask.cellsize,
            mask.yllcorner + y as f64 * mask.cellsize,
        )
    };
    let mut outer = None;
    let mut holes = Vec::new();
    for ring in rings {
        let shoelace: i64 = ring
            .iter()
            .zip(ring.iter().cycle().skip(1))
            .map(|(a, b)| a.0 * b.1 - b.0 * a.1)
            .sum();
        let geo: Vec<GeoPoint> = ring.iter().map(to_geo).collect();
        if shoelace > 0 {
            assert!(outer.is_none(), "a component has exactly one outer ring");
            outer = Some(geo);
        } else {
            holes.push(geo);
        }
    }
    Component {
        pixel_count: pixels.len() as u64,
        outer: outer.expect("every component has an outer ring"),
        holes,
    }
}

pub fn components_to_features(comps: &[Component]) -> Vec<PolygonFeature> {
    comps
        .iter()
        .map(|c| PolygonFeature {
            outer: c.outer.clone(),
            holes: c.holes.clone(),
            pixel_count: c.pixel_count,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn grid_text(body: &str) -> String {
        format!(
            "ncols 3\nnrows 2\nxllcorner 10.0\nyllcorner 40.0\ncellsize 0.5\nNODATA_value -1\n{body}"
        )
    }

    fn mask_of(rows: &[&[u8]]) -> BinaryMask {
        let rows: Vec<Vec<bool>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| v != 0).collect())
            .collect();
        mask_from_rows(&rows, 0.0, 0.0, 1.0)
    }

    #[test]
    fn small_grid_parses_exactly() {
        let g = parse_ascii_grid(&grid_text("3 0 -1\n0 3 7\n")).unwrap();
        assert_eq!((g.ncols, g.nrows), (3, 2));
        assert_eq!(g.nodata, -1);
        assert_eq!(g.values, vec![3, 0, -1, 0, 3, 7]);
        assert_eq!(g.value(1, 2), 7);
    }

    #[test]
    fn nodata_header_is_optional() {
        let g = parse_ascii_grid("ncols 1\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\n5\n")
            .unwrap();
        assert_eq!(g.nodata, -9999);
    }

    #[test]
    fn value_count_mismatch_is_detected() {
        let err = parse_ascii_grid(&grid_text("3 0\n0 3\n")).unwrap_err();
        assert!(matches!(
            err,
            RasterError::DimensionMismatch { want: 6, got: 4 }
        ));
    }

    #[test]
    fn bad_tokens_report_their_line() {
        let err = parse_ascii_grid(&grid_text("3 0 1\n0 x 1\n")).unwrap_err();
        match err {
            RasterError::Parse { line, .. } => assert_eq!(line, 8),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn threshold_matches_dn_but_never_nodata() {
        let g = parse_ascii_grid(&grid_text("3 0 -1\n0 3 7\n")).unwrap();
        let m = threshold(&g, 3);
        assert_eq!(m.cells, vec![true, false, false, false, true, false]);
        // DN equal to the nodata sentinel still never matches.
        let m = threshold(&g, -1);
        assert_eq!(m.cells, vec![false; 6]);
    }

    #[test]
    fn single_pixel_becomes_the_unit_square() {
        let m = mask_of(&[&[1]]);
        let comps = polygonize(&m, Connectivity::Four);
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].pixel_count, 1);
        assert_eq!(comps[0].outer.len(), 4);
        let lons: Vec<f64> = comps[0].outer.iter().map(|p| p.lon_deg).collect();
        let lats: Vec<f64> = comps[0].outer.iter().map(|p| p.lat_deg).collect();
        assert_eq!(lons.iter().cloned().fold(f64::INFINITY, f64::min), 0.0);
        assert_eq!(lons.iter().cloned().fold(f64::NEG_INFINITY, f64::max), 1.0);
        assert_eq!(lats.iter().cloned().fold(f64::INFINITY, f64::min), 0.0);
        assert_eq!(lats.iter().cloned().fold(f64::NEG_INFINITY, f64::max), 1.0);
    }

    #[test]
    fn diagonal_pixels_split_under_four_join_under_eight() {
        let m = mask_of(&[&[1, 0], &[0, 1]]);
        assert_eq!(polygonize(&m, Connectivity::Four).len(), 2);
        let eight = polygonize(&m, Connectivity::Eight);
        assert_eq!(eight.len(), 1);
        assert_eq!(eight[0].pixel_count, 2);
        // Pinched single ring: 8 edges, the shared corner visited twice.
        assert_eq!(eight[0].outer.len(), 8);
        assert!(eight[0].holes.is_empty());
    }

    #[test]
    fn ring_block_traces_outer_and_hole() {
        let m = mask_of(&[&[1, 1, 1], &[1, 0, 1], &[1, 1, 1]]);
        let comps = polygonize(&m, Connectivity::Four);
        assert_eq!(comps.len(), 1);
        let c = &comps[0];
        assert_eq!(c.pixel_count, 8);
        assert_eq!(c.outer.len(), 12);
        assert_eq!(c.holes.len(), 1);
        assert_eq!(c.holes[0].len(), 4);
    }

    fn shoelace(ring: &[GeoPoint]) -> f64 {
        ring.iter()
            .zip(ring.iter().cycle().skip(1))
            .map(|(a, b)| a.lon_deg * b.lat_deg - b.lon_deg * a.lat_deg)
            .sum()
    }

    #[test]
    fn random_masks_match_a_flood_fill_oracle() {
        // Independent oracle: recolor with a scanning union-size-free
        // queue fill and compare counts and pixel totals.
        fn oracle_count(m: &BinaryMask, eight: bool) -> usize {
            let (w, h) = (m.ncols as i64, m.nrows as i64);
            let mut seen = vec![false; m.cells.len()];
            let mut count = 0;
            for i in 0..m.cells.len() {
                if !m.cells[i] || seen[i] {
                    continue;
                }
                count += 1;
                let mut queue = std::collections::VecDeque::from([i]);
                seen[i] = true;
                while let Some(j) = queue.pop_front() {
                    let (r, c) = (j as i64 / w, j as i64 % w);
                    for dr in -1i64..=1 {
                        for dc in -1i64..=1 {
                            if (dr, dc) == (0, 0) || (!eight && dr != 0 && dc != 0) {
                                continue;
                            }
                            let (nr, nc) = (r + dr, c + dc);
                            if nr < 0 || nc < 0 || nr >= h || nc >= w {
                                continue;
                            }
                            let n = (nr * w + nc) as usize;
                            if m.cells[n] && !seen[n] {
                                seen[n] = true;
                                queue.push_back(n);
                            }
                        }
                    }
                }
            }
            count
        }

        let mut rng = SplitMix64::new(31);
        for &density in &[0.2, 0.45, 0.7] {
            for trial in 0..6 {
                let size = 16 + 8 * trial;
                let rows: Vec<Vec<bool>> = (0..size)
                    .map(|_| (0..size).map(|_| rng.next_f64() < density).collect())
                    .collect();
                let m = mask_from_rows(&rows, 0.0, 0.0, 1.0);
                let truth = m.cells.iter().filter(|&&v| v).count() as u64;
                for (conn, eight) in [(Connectivity::Four, false), (Connectivity::Eight, true)] {
                    let comps = polygonize(&m, conn);
                    assert_eq!(comps.len(), oracle_count(&m, eight));
                    assert_eq!(comps.iter().map(|c| c.pixel_count).sum::<u64>(), truth);
                    for c in &comps {
                        assert!(shoelace(&c.outer) > 0.0);
                        for hole in &c.holes {
                            assert!(shoelace(hole) < 0.0);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn ascii_round_trip_preserves_the_mask() {
        let m = mask_of(&[&[1, 0, 1], &[0, 1, 0]]);
        let text = mask_to_ascii(&m, 3);
        let g = parse_ascii_grid(&text).unwrap();
        let back = threshold(&g, 3);
        assert_eq!(back.cells, m.cells);
        assert_eq!(back.nrows, m.nrows);
    }
}
