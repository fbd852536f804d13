//! Minimal GeoJSON reader and writer for the feature kinds the pipeline
//! exchanges: Point, MultiPoint, LineString, Polygon and MultiPolygon.
//!
//! Reading accepts a FeatureCollection, a single Feature, or a bare
//! geometry.  Polygon holes are parsed and dropped: covering uses boundary
//! and containment tests against outer rings only.  Writing always emits a
//! FeatureCollection; `serde_json` keeps maps sorted, so output bytes are
//! deterministic.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::sphere::{GeoFeatureSet, GeoPoint, SphericalPolygon, UnitVec};

#[derive(Debug, Error)]
pub enum GeoJsonError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid GeoJSON: {0}")]
    Structure(String),
    #[error("invalid polygon ring: {0}")]
    BadRing(#[from] crate::sphere::GeomError),
}

fn bad(msg: impl Into<String>) -> GeoJsonError {
    GeoJsonError::Structure(msg.into())
}

// ── Reading ─────────────────────────────────────────────────────────────────

pub fn read_file(path: impl AsRef<Path>) -> Result<GeoFeatureSet, GeoJsonError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| GeoJsonError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<GeoFeatureSet, GeoJsonError> {
    let root: Value = serde_json::from_str(text)?;
    let mut out = GeoFeatureSet::default();
    collect(&root, &mut out)?;
    Ok(out)
}

fn collect(node: &Value, out: &mut GeoFeatureSet) -> Result<(), GeoJsonError> {
    let typ = node
        .get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| bad("object lacks a \"type\" member"))?;
    match typ {
        "FeatureCollection" => {
            let features = node
                .get("features")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("FeatureCollection lacks a \"features\" array"))?;
            for f in features {
                collect(f, out)?;
            }
            Ok(())
        }
        "Feature" => match node.get("geometry") {
            Some(Value::Null) | None => Ok(()),
            Some(g) => collect(g, out),
        },
        "Point" => {
            out.points.push(position(coords(node)?)?);
            Ok(())
        }
        "MultiPoint" => {
            for pos in array(coords(node)?)? {
                out.points.push(position(pos)?);
            }
            Ok(())
        }
        "LineString" => {
            let pts = positions(coords(node)?)?;
            if pts.len() < 2 {
                return Err(bad("LineString needs at least 2 positions"));
            }
            out.lines.push(pts);
            Ok(())
        }
        "Polygon" => {
            out.polygons.push(polygon(coords(node)?)?);
            Ok(())
        }
        "MultiPolygon" => {
            for poly in array(coords(node)?)? {
                out.polygons.push(polygon(poly)?);
            }
            Ok(())
        }
        other => Err(bad(format!("unsupported geometry type {other:?}"))),
    }
}

fn coords(node: &Value) -> Result<&Value, GeoJsonError> {
    node.get("coordinates")
        .ok_or_else(|| bad("geometry lacks \"coordinates\""))
}

fn array(v: &Value) -> Result<&Vec<Value>, GeoJsonError> {
    v.as_array().ok_or_else(|| bad("expected an array"))
}

fn position(v: &Value) -> Result<GeoPoint, GeoJsonError> {
    let arr = array(v)?;
    if arr.len() < 2 {
        return Err(bad("position needs [lon, lat]"));
    }
    let lon = arr[0]
        .as_f64()
        .ok_or_else(|| bad("longitude is not a number"))?;
    let lat = arr[1]
        .as_f64()
        .ok_or_else(|| bad("latitude is not a number"))?;
    if !lon.is_finite() || !lat.is_finite() || lat.abs() > 90.0 {
        return Err(bad(format!("position ({lon}, {lat}) out of range")));
    }
    Ok(GeoPoint::new(lon, lat))
}

fn positions(v: &Value) -> Result<Vec<GeoPoint>, GeoJsonError> {
    array(v)?.iter().map(position).collect()
}

/// Outer ring only; the closing duplicate vertex is dropped, and rings
/// wound clockwise are reversed (files in the wild use both orientations).
fn polygon(v: &Value) -> Result<SphericalPolygon, GeoJsonError> {
    let rings = array(v)?;
    let outer = rings
        .first()
        .ok_or_else(|| bad("Polygon has no rings"))?;
    let mut pts = positions(outer)?;
    if pts.len() >= 2 && pts.first() == pts.last() {
        pts.pop();
    }
    let ring: Vec<UnitVec> = pts.iter().map(|p| p.to_unit()).collect();
    match SphericalPolygon::try_new(ring.clone()) {
        Ok(p) => Ok(p),
        Err(crate::sphere::GeomError::BadRingArea(_)) => {
            let reversed: Vec<UnitVec> = ring.into_iter().rev().collect();
            Ok(SphericalPolygon::try_new(reversed)?)
        }
        Err(e) => Err(e.into()),
    }
}

// ── Writing ─────────────────────────────────────────────────────────────────

fn pos_json(p: GeoPoint) -> Value {
    json!([p.lon_deg, p.lat_deg])
}

fn feature(geometry: Value, properties: Value) -> Value {
    json!({"type": "Feature", "geometry": geometry, "properties": properties})
}

/// One Point feature per input point.
pub fn points_doc(points: &[GeoPoint]) -> Value {
    let features: Vec<Value> = points
        .iter()
        .map(|&p| {
            feature(
                json!({"type": "Point", "coordinates": pos_json(p)}),
                Value::Object(Map::new()),
            )
        })
        .collect();
    json!({"type": "FeatureCollection", "features": features})
}

/// A single MultiPoint feature.
pub fn multipoint_doc(points: &[GeoPoint]) -> Value {
    let coords: Vec<Value> = points.iter().map(|&p| pos_json(p)).collect();
    json!({
        "type": "FeatureCollection",
        "features": [feature(
            json!({"type": "MultiPoint", "coordinates": coords}),
            Value::Object(Map::new()),
        )],
    })
}

/// A single LineString feature.
pub fn linestring_doc(points: &[GeoPoint]) -> Value {
    let coords: Vec<Value> = points.iter().map(|&p| pos_json(p)).collect();
    json!({
        "type": "FeatureCollection",
        "features": [feature(
            json!({"type": "LineString", "coordinates": coords}),
            Value::Object(Map::new()),
        )],
    })
}

/// A polygon with optional holes and the pixel count it was traced from.
#[derive(Debug, Clone)]
pub struct PolygonFeature {
    pub outer: Vec<GeoPoint>,
    pub holes: Vec<Vec<GeoPoint>>,
    pub pixel_count: u64,
}

/// One Polygon feature per component, rings closed, `pixel_count` as a
/// property.
pub fn polygons_doc(polys: &[PolygonFeature]) -> Value {
    let features: Vec<Value> = polys
        .iter()
        .map(|p| {
            let mut rings = vec![closed_ring(&p.outer)];
            rings.extend(p.holes.iter().map(|h| closed_ring(h)));
            feature(
                json!({"type": "Polygon", "coordinates": rings}),
                json!({"pixel_count": p.pixel_count}),
            )
        })
        .collect();
    json!({"type": "FeatureCollection", "features": features})
}

fn closed_ring(pts: &[GeoPoint]) -> Value {
    let mut coords: Vec<Value> = pts.iter().map(|&p| pos_json(p)).collect();
    if let Some(first) = pts.first() {
        coords.push(pos_json(*first));
    }
    Value::Array(coords)
}

pub fn write_file(path: impl AsRef<Path>, doc: &Value) -> Result<(), GeoJsonError> {
    let path = path.as_ref();
    let io_err = |source| GeoJsonError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut out = Vec::new();
    serde_json::to_writer(&mut out, doc)?;
    out.push(b'\n');
    let mut f = fs::File::create(path).map_err(io_err)?;
    f.write_all(&out).map_err(io_err)?;
    Ok(())
}
