//! Synthetic fractal generators: the Sierpinski triangle as a chaos game,
//! the Koch curve as an L-system with turtle decoding, and a
//! midpoint-displacement random field for raster mask tests.
//!
//! Coordinates are produced by planar arithmetic on (lon, lat) pairs and
//! only afterwards interpreted as geographic positions.  At the extents
//! used here (tens of degrees) the planar construction is the standard way
//! these test sets are laid onto the globe.

use thiserror::Error;

use crate::rng::SplitMix64;
use crate::sphere::{GeoFeatureSet, GeoPoint};

#[derive(Debug, Error)]
pub enum FractalError {
    #[error("unsupported symbol {0:?}: expected drawing letters, '+' or '-'")]
    UnsupportedSymbol(char),
    #[error("coordinate overflow: ({lon}, {lat}) leaves the geographic domain")]
    CoordinateOverflow { lon: f64, lat: f64 },
}

// ── Chaos game ──────────────────────────────────────────────────────────────

/// Parameters of the chaos-game iteration.  Each step records the current
/// point, then jumps to the planar midpoint between it and a uniformly
/// chosen triangle vertex.
#[derive(Debug, Clone)]
pub struct ChaosGameSpec {
    pub vertices: [GeoPoint; 3],
    pub start: GeoPoint,
    pub iterations: usize,
    pub seed: u64,
}

impl ChaosGameSpec {
    /// The standard Sierpinski setup: triangle A(-30, 0), B(0, 60),
    /// C(30, 0), starting at A, 200 000 iterations.
    pub fn sierpinski(seed: u64) -> ChaosGameSpec {
        ChaosGameSpec {
            vertices: [
                GeoPoint::new(-30.0, 0.0),
                GeoPoint::new(0.0, 60.0),
                GeoPoint::new(30.0, 0.0),
            ],
            start: GeoPoint::new(-30.0, 0.0),
            iterations: 200_000,
            seed,
        }
    }
}

pub fn chaos_game(spec: &ChaosGameSpec) -> GeoFeatureSet {
    debug_assert!(spec.iterations >= 1);
    let mut rng = SplitMix64::new(spec.seed);
    let mut x = spec.start.lon_deg;
    let mut y = spec.start.lat_deg;
    let mut points = Vec::with_capacity(spec.iterations);
    for _ in 0..spec.iterations {
        points.push(GeoPoint::new(x, y));
        let v = spec.vertices[rng.next_index(3)];
        x = (x + v.lon_deg) / 2.0;
        y = (y + v.lat_deg) / 2.0;
    }
    GeoFeatureSet {
        points,
        ..GeoFeatureSet::default()
    }
}

// ── L-system ────────────────────────────────────────────────────────────────

/// A parallel string-rewriting system.  Uppercase letters are drawing or
/// placeholder symbols (letters without a rule rewrite to themselves);
/// '+' and '-' are turns and never rewritten.
#[derive(Debug, Clone)]
pub struct LSystem {
    pub axiom: String,
    pub rules: Vec<(char, String)>,
    pub angle_deg: f64,
}

impl LSystem {
    /// The Koch curve: axiom F, rule F -> F+F--F+F, angle 60.
    pub fn koch() -> LSystem {
        LSystem {
            axiom: "F".to_string(),
            rules: vec![('F', "F+F--F+F".to_string())],
            angle_deg: 60.0,
        }
    }

    fn rule_for(&self, ch: char) -> Option<&str> {
        self.rules
            .iter()
            .find(|(sym, _)| *sym == ch)
            .map(|(_, body)| body.as_str())
    }
}

fn check_symbols(s: &str) -> Result<(), FractalError> {
    for ch in s.chars() {
        if !(ch.is_ascii_uppercase() || ch == '+' || ch == '-') {
            return Err(FractalError::UnsupportedSymbol(ch));
        }
    }
    Ok(())
}

/// Rewrite the axiom `n` times, replacing every symbol in parallel.
pub fn expand_lsystem(sys: &LSystem, n: u32) -> Result<String, FractalError> {
    check_symbols(&sys.axiom)?;
    for (_, body) in &sys.rules {
        check_symbols(body)?;
    }
    let mut s = sys.axiom.clone();
    for _ in 0..n {
        let mut next = String::with_capacity(s.len() * 4);
        for ch in s.chars() {
            match sys.rule_for(ch) {
                Some(body) => next.push_str(body),
                None => next.push(ch),
            }
        }
        s = next;
    }
    Ok(s)
}

/// Decode a symbol string with turtle graphics.  The turtle starts at the
/// origin heading +x with unit steps; 'F' moves forward and records the
/// new position, other letters are ignored, '+' turns counter-clockwise by
/// `angle_deg` and '-' clockwise.  The recorded positions are scaled by
/// `scale` about the origin and read as (lon, lat) degrees, so the first
/// segment runs east from (0, 0).
pub fn turtle_decode(s: &str, angle_deg: f64, scale: f64) -> Result<GeoFeatureSet, FractalError> {
    let mut heading: f64 = 0.0;
    let mut x = 0.0;
    let mut y = 0.0;
    let mut raw = vec![(x, y)];
    for ch in s.chars() {
        match ch {
            'F' => {
                x += heading.to_radians().cos();
                y += heading.to_radians().sin();
                raw.push((x, y));
            }
            '+' => heading += angle_deg,
            '-' => heading -= angle_deg,
            c if c.is_ascii_uppercase() => {}
            c => return Err(FractalError::UnsupportedSymbol(c)),
        }
    }
    let mut points = Vec::with_capacity(raw.len());
    for (px, py) in raw {
        let (lon, lat) = (px * scale, py * scale);
        if lat.abs() >= 90.0 || lon <= -180.0 || lon > 180.0 {
            return Err(FractalError::CoordinateOverflow { lon, lat });
        }
        points.push(GeoPoint::new(lon, lat));
    }
    Ok(GeoFeatureSet {
        points,
        ..GeoFeatureSet::default()
    })
}

// ── Midpoint displacement field ─────────────────────────────────────────────

/// A statistically self-similar boolean mask from a midpoint-displacement
/// (diamond-square) random field, thresholded at its median.  `size` is
/// rounded up to a power of two internally; the returned matrix is
/// `size` x `size`, row-major.  `hurst` in (0, 1) sets the roughness; the
/// displacement amplitude shrinks by 2^-hurst per subdivision level.
pub fn midpoint_displacement_mask(size: usize, hurst: f64, seed: u64) -> Vec<Vec<bool>> {
    assert!(size >= 2);
    let n = size.next_power_of_two();
    let w = n + 1;
    let mut field = vec![0.0f64; w * w];
    let mut rng = SplitMix64::new(seed);
    let mut centered = |amp: f64| amp * (2.0 * rng.next_f64() - 1.0);

    for corner in [0, n, n * w, n * w + n] {
        field[corner] = centered(1.0);
    }
    let mut step = n;
    let mut amp = 1.0;
    while step > 1 {
        let half = step / 2;
        // Diamond step: square centers from their four corners.
        for r in (half..n).step_by(step) {
            for c in (half..n).step_by(step) {
                let sum = field[(r - half) * w + (c - half)]
                    + field[(r - half) * w + (c + half)]
                    + field[(r + half) * w + (c - half)]
                    + field[(r + half) * w + (c + half)];
                field[r * w + c] = sum / 4.0 + centered(amp);
            }
        }
        // Square step: edge midpoints from their axial neighbours, with
        // wrap-around off the grid edge.
        for r in (0..w).step_by(half) {
            let start = if (r / half) % 2 == 0 { half } else { 0 };
            for c in (start..w).step_by(step) {
                let mut sum = 0.0;
                let mut cnt = 0.0;
                if r >= half {
                    sum += field[(r - half) * w + c];
                    cnt += 1.0;
                }
                if r + half < w {
                    sum += field[(r + half) * w + c];
                    cnt += 1.0;
                }
                if c >= half {
                    sum += field[r * w + (c - half)];
                    cnt += 1.0;
                }
                if c + half < w {
                    sum += field[r * w + (c + half)];
                    cnt += 1.0;
                }
                field[r * w + c] = sum / cnt + centered(amp);
            }
        }
        amp *= 0.5f64.powf(hurst);
        step = half;
    }

    let mut sample: Vec<f64> = (0..size)
        .flat_map(|r| (0..size).map(move |c| (r, c)))
        .map(|(r, c)| field[r * w + c])
        .collect();
    sample.sort_by(f64::total_cmp);
    let median = sample[sample.len() / 2];
    (0..size)
        .map(|r| (0..size).map(|c| field[r * w + c] > median).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn one_iteration_reports_only_the_start_point() {
        let mut spec = ChaosGameSpec::sierpinski(7);
        spec.iterations = 1;
        let out = chaos_game(&spec);
        assert_eq!(out.points.len(), 1);
        assert_eq!(out.points[0], spec.start);
    }

    #[test]
    fn chaos_game_is_deterministic_and_seed_sensitive() {
        let a = chaos_game(&ChaosGameSpec::sierpinski(42));
        let b = chaos_game(&ChaosGameSpec::sierpinski(42));
        assert_eq!(a.points, b.points);
        for (s, t) in [(0u64, 1u64), (1, 2), (3, 9), (10, 11), (12, 99)] {
            let u = chaos_game(&ChaosGameSpec {
                iterations: 1000,
                ..ChaosGameSpec::sierpinski(s)
            });
            let v = chaos_game(&ChaosGameSpec {
                iterations: 1000,
                ..ChaosGameSpec::sierpinski(t)
            });
            assert!(u.points != v.points, "seeds {s} and {t} collided");
        }
    }

    #[test]
    fn full_run_stays_inside_the_triangle_hull() {
        let out = chaos_game(&ChaosGameSpec::sierpinski(42));
        assert_eq!(out.points.len(), 200_000);
        for p in &out.points {
            assert!((-30.0..=30.0).contains(&p.lon_deg), "{p:?}");
            assert!((0.0..=60.0).contains(&p.lat_deg), "{p:?}");
        }
    }

    #[test]
    fn koch_expansions_match_the_rewriting_rule() {
        let sys = LSystem::koch();
        assert_eq!(expand_lsystem(&sys, 0).unwrap(), "F");
        assert_eq!(expand_lsystem(&sys, 1).unwrap(), "F+F--F+F");
        assert_eq!(
            expand_lsystem(&sys, 2).unwrap(),
            "F+F--F+F+F+F--F+F--F+F--F+F+F+F--F+F"
        );
    }

    #[test]
    fn koch_symbol_counts_follow_the_recurrences() {
        let sys = LSystem::koch();
        let mut prev_len = 1usize;
        for n in 1..=6u32 {
            let s = expand_lsystem(&sys, n).unwrap();
            let fs = s.chars().filter(|&c| c == 'F').count();
            assert_eq!(fs, 4usize.pow(n));
            assert_eq!(s.len(), 4 * prev_len + 4);
            prev_len = s.len();
        }
    }

    #[test]
    fn stray_symbols_are_rejected() {
        let sys = LSystem {
            axiom: "F?".to_string(),
            rules: vec![],
            angle_deg: 60.0,
        };
        assert!(matches!(
            expand_lsystem(&sys, 1),
            Err(FractalError::UnsupportedSymbol('?'))
        ));
        assert!(matches!(
            turtle_decode("F*F", 60.0, 1.0),
            Err(FractalError::UnsupportedSymbol('*'))
        ));
    }

    #[test]
    fn turtle_walks_match_hand_trigonometry() {
        let out = turtle_decode("F", 60.0, 1.0).unwrap();
        assert_eq!(out.points.len(), 2);
        assert!((out.points[1].lon_deg - 1.0).abs() < 1e-12);
        assert!(out.points[1].lat_deg.abs() < 1e-12);

        let out = turtle_decode("F+F", 60.0, 1.0).unwrap();
        let p = out.points[2];
        assert!((p.lon_deg - 1.5).abs() < 1e-12);
        assert!((p.lat_deg - 3f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn koch_runs_end_on_the_equator_and_stay_in_domain() {
        let sys = LSystem::koch();
        for n in 0..=5u32 {
            let s = expand_lsystem(&sys, n).unwrap();
            let out = turtle_decode(&s, sys.angle_deg, 0.5).unwrap();
            assert_eq!(out.points.len(), 4usize.pow(n) + 1);
            let end = *out.points.last().unwrap();
            assert!(end.lat_deg.abs() < 1e-9, "n={n}: {end:?}");
            assert!((end.lon_deg - 3f64.powi(n as i32) * 0.5).abs() < 1e-9);
            for p in &out.points {
                assert!(p.lat_deg.abs() < 90.0 && p.lon_deg > -180.0 && p.lon_deg <= 180.0);
            }
        }
    }

    #[test]
    fn runaway_walks_overflow_latitude() {
        let s = format!("+{}", "F".repeat(95));
        assert!(matches!(
            turtle_decode(&s, 90.0, 1.0),
            Err(FractalError::CoordinateOverflow { .. })
        ));
    }

    #[test]
    fn displacement_mask_is_deterministic_and_balanced() {
        let a = midpoint_displacement_mask(64, 0.5, 11);
        let b = midpoint_displacement_mask(64, 0.5, 11);
        let c = midpoint_displacement_mask(64, 0.5, 12);
        assert_eq!(a, b);
        assert!(a != c);
        assert_eq!(a.len(), 64);
        assert!(a.iter().all(|row| row.len() == 64));
        let frac = a.iter().flatten().filter(|&&v| v).count() as f64 / (64.0 * 64.0);
        assert!((0.2..=0.8).contains(&frac), "{frac}");
    }

    proptest! {
        #[test]
        fn chaos_points_never_leave_the_hull(seed in any::<u64>()) {
            let out = chaos_game(&ChaosGameSpec {
                iterations: 500,
                ..ChaosGameSpec::sierpinski(seed)
            });
            for p in out.points {
                prop_assert!((-30.0..=30.0).contains(&p.lon_deg));
                prop_assert!((0.0..=60.0).contains(&p.lat_deg));
            }
        }

        #[test]
        fn small_turtle_programs_never_panic(s in "[F+\\-]{0,40}") {
            let _ = turtle_decode(&s, 60.0, 0.5);
        }
    }
}
