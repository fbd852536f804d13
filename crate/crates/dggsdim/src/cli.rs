//! Command-line pipeline driver.
//!
//! Subcommands mirror the pipeline stages: `generate` makes synthetic
//! inputs, `polygonize` turns a classified raster into polygon features,
//! `cover` tabulates cell counts per resolution for one grid, `fit` turns
//! tables into dimension estimates, `run` chains cover and fit over
//! several grids, and `grid-stats` reports cell diameter statistics.
//!
//! Exit codes: 0 success, 1 usage or input parse problems, 2 insufficient
//! data for a fit, 3 internal invariant violations.  All randomness flows
//! from explicit `--seed` flags, and no output embeds a timestamp, so any
//! command rerun with the same arguments produces identical bytes.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::cover::{
    self, CoverError, CoverRecord, DEFAULT_CANDIDATE_CAP, DEFAULT_RATIO_STOP, EARTH_RADIUS_KM,
};
use crate::dggs::{Grid, GridKind};
use crate::fractal::{self, ChaosGameSpec, FractalError, LSystem};
use crate::geojson::{self, GeoJsonError};
use crate::plot;
use crate::raster::{self, Connectivity, RasterError};
use crate::scaling::{self, RangePolicy, ScalingError, ScalingFit};

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or unparseable input: exit 1.
    Usage(String),
    /// The data cannot support a fit: exit 2.
    Data(String),
    /// A broken internal invariant: exit 3.
    Internal(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Internal(m) => f.write_str(m),
        }
    }
}

impl From<GeoJsonError> for CliError {
    fn from(e: GeoJsonError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<RasterError> for CliError {
    fn from(e: RasterError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<FractalError> for CliError {
    fn from(e: FractalError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ScalingError> for CliError {
    fn from(e: ScalingError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<CoverError> for CliError {
    fn from(e: CoverError) -> Self {
        CliError::Usage(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "dggsdim",
    version,
    about = "Box-counting fractal dimension of geospatial features on icosahedral grids"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic fractal inputs
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
    },
    /// Convert a classified ASCII raster into polygon features
    Polygonize(PolygonizeArgs),
    /// Count cells intersecting the input per resolution for one grid
    Cover(CoverArgs),
    /// Fit a dimension from cover tables, aggregating across grids
    Fit(FitArgs),
    /// Full pipeline: cover each grid, fit, aggregate
    Run(RunArgs),
    /// Cell counts and diameter statistics per resolution
    GridStats(GridStatsArgs),
}

#[derive(Subcommand)]
enum GenerateKind {
    /// Sierpinski gasket points via the chaos game on vertices
    /// A(-30,0) B(0,60) C(30,0)
    Sierpinski {
        /// Output GeoJSON path
        #[arg(short, long)]
        output: PathBuf,
        /// Chaos-game iterations, one emitted point each
        #[arg(long, default_value_t = 200_000)]
        iterations: usize,
        /// PRNG seed
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Koch curve via L-system rewriting (F -> F+F--F+F at 60 degrees)
    /// decoded by a turtle starting at (0, 0) heading east
    Koch {
        /// Output GeoJSON path
        #[arg(short, long)]
        output: PathBuf,
        /// Rewriting iterations; vertex count is 4^n + 1
        #[arg(long, default_value_t = 5)]
        iterations: u32,
        /// Degrees per F step
        #[arg(long, default_value_t = 0.5)]
        scale: f64,
    },
    /// Statistically self-similar cloud mask from midpoint displacement,
    /// thresholded at its median, written as an ESRI ASCII grid
    Mask {
        /// Output ASCII grid path
        #[arg(short, long)]
        output: PathBuf,
        /// Mask width and height in pixels
        #[arg(long, default_value_t = 512)]
        size: usize,
        /// Roughness exponent in (0, 1); lower is rougher
        #[arg(long, default_value_t = 0.7)]
        hurst: f64,
        /// PRNG seed
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// West edge of the raster in degrees
        #[arg(long, default_value_t = 0.0)]
        xllcorner: f64,
        /// South edge of the raster in degrees
        #[arg(long, default_value_t = 30.0)]
        yllcorner: f64,
        /// Pixel size in degrees
        #[arg(long, default_value_t = 0.01)]
        cellsize: f64,
        /// Value written for mask-true pixels
        #[arg(long, default_value_t = 3)]
        dn: i64,
    },
}

#[derive(Args)]
struct PolygonizeArgs {
    /// Input ESRI ASCII grid
    input: PathBuf,
    /// Output GeoJSON path
    #[arg(short, long)]
    output: PathBuf,
    /// Pixel value selected as mask-true
    #[arg(long, default_value_t = 3)]
    dn: i64,
    /// Pixel adjacency for clumping: 4 or 8
    #[arg(long, default_value_t = 4)]
    connectivity: u8,
}

#[derive(Args)]
struct CoverArgs {
    /// Input GeoJSON features
    input: PathBuf,
    /// Grid: isea4t, isea4h or isea3h
    #[arg(long)]
    grid: String,
    /// Coarsest resolution; requires --k-max, defaults to automatic
    #[arg(long)]
    k_min: Option<u8>,
    /// Finest resolution; requires --k-min, defaults to automatic
    #[arg(long)]
    k_max: Option<u8>,
    /// Candidate-cell cap per resolution for the automatic range
    #[arg(long, default_value_t = DEFAULT_CANDIDATE_CAP)]
    cap: usize,
    /// Stop the automatic range when n_cells/n_bbox_cells drops below this
    #[arg(long, default_value_t = DEFAULT_RATIO_STOP)]
    ratio_stop: f64,
    /// Output CSV path; stdout when omitted
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct PolicyArgs {
    /// Drop rows whose cell-count ratio to the bbox falls below this
    #[arg(long, default_value_t = 0.1)]
    bbox_ratio_min: f64,
    /// Drop the fine row of steps flatter than this slope
    #[arg(long, default_value_t = 0.10)]
    slope_low: f64,
    /// Drop the coarse row of steps steeper than this slope
    #[arg(long, default_value_t = 1.95)]
    slope_high: f64,
    /// Minimum retained rows for a fit
    #[arg(long, default_value_t = 4)]
    min_points: usize,
}

impl PolicyArgs {
    fn to_policy(&self) -> RangePolicy {
        RangePolicy {
            bbox_ratio_min: self.bbox_ratio_min,
            slope_low: self.slope_low,
            slope_high: self.slope_high,
            min_points: self.min_points,
        }
    }
}

#[derive(Args)]
struct FitArgs {
    /// Cover CSV files; rows are grouped by their grid column
    #[arg(required = true)]
    tables: Vec<PathBuf>,
    #[command(flatten)]
    policy: PolicyArgs,
    /// Output JSON path; stdout when omitted
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Write one log-log SVG per grid into this directory
    #[arg(long)]
    plot_dir: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Input GeoJSON features
    input: PathBuf,
    /// Comma-separated grids
    #[arg(long, default_value = "isea4t,isea4h,isea3h", value_delimiter = ',')]
    grids: Vec<String>,
    /// Coarsest resolution; requires --k-max, defaults to automatic
    #[arg(long)]
    k_min: Option<u8>,
    /// Finest resolution; requires --k-min, defaults to automatic
    #[arg(long)]
    k_max: Option<u8>,
    /// Candidate-cell cap per resolution for the automatic range
    #[arg(long, default_value_t = DEFAULT_CANDIDATE_CAP)]
    cap: usize,
    /// Stop the automatic range when n_cells/n_bbox_cells drops below this
    #[arg(long, default_value_t = DEFAULT_RATIO_STOP)]
    ratio_stop: f64,
    #[command(flatten)]
    policy: PolicyArgs,
    /// Directory receiving per-grid CSVs, report.json and plots
    #[arg(long, default_value = "dggsdim_out")]
    out_dir: PathBuf,
    /// Also write one log-log SVG per grid
    #[arg(long)]
    plot: bool,
}

#[derive(Args)]
struct GridStatsArgs {
    /// Grid: isea4t, isea4h or isea3h
    #[arg(long)]
    grid: String,
    /// Finest resolution to report
    #[arg(long, default_value_t = 8)]
    max_res: u8,
    /// Output CSV path; stdout when omitted
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Parses arguments from the process environment, runs the command and
/// returns the process exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Generate { kind } => cmd_generate(kind),
        Command::Polygonize(a) => cmd_polygonize(a),
        Command::Cover(a) => cmd_cover(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Run(a) => cmd_run(a),
        Command::GridStats(a) => cmd_grid_stats(a),
    }
}

fn parse_grid(s: &str) -> Result<GridKind, CliError> {
    s.parse().map_err(|_| {
        CliError::Usage(format!(
            "unknown grid '{s}' (expected isea4t, isea4h or isea3h)"
        ))
    })
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Usage(format!("could not write {}: {e}", path.display()))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        }
    }
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

fn emit(output: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) => write_text(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_generate(kind: GenerateKind) -> Result<(), CliError> {
    match kind {
        GenerateKind::Sierpinski {
            output,
            iterations,
            seed,
        } => {
            let mut spec = ChaosGameSpec::sierpinski(seed);
            spec.iterations = iterations;
            let features = fractal::chaos_game(&spec);
            geojson::write_file(&output, &geojson::points_doc(&features.points))?;
            println!("{} points -> {}", features.points.len(), output.display());
        }
        GenerateKind::Koch {
            output,
            iterations,
            scale,
        } => {
            let expanded = fractal::expand_lsystem(&LSystem::koch(), iterations)?;
            let decoded = fractal::turtle_decode(&expanded, 60.0, scale)?;
            geojson::write_file(&output, &geojson::linestring_doc(&decoded.points))?;
            println!("{} points -> {}", decoded.points.len(), output.display());
        }
        GenerateKind::Mask {
            output,
            size,
            hurst,
            seed,
            xllcorner,
            yllcorner,
            cellsize,
            dn,
        } => {
            if size == 0 || !(0.0..1.0).contains(&hurst) || hurst == 0.0 {
                return Err(CliError::Usage(
                    "mask needs --size >= 1 and --hurst in (0, 1)".into(),
                ));
            }
            if cellsize <= 0.0 {
                return Err(CliError::Usage("--cellsize must be positive".into()));
            }
            let rows = fractal::midpoint_displacement_mask(size, hurst, seed);
            let mask = raster::mask_from_rows(&rows, xllcorner, yllcorner, cellsize);
            let set: usize = rows.iter().map(|r| r.iter().filter(|&&b| b).count()).sum();
            write_text(&output, &raster::mask_to_ascii(&mask, dn))?;
            println!(
                "{size}x{size} mask, {set} set pixels -> {}",
                output.display()
            );
        }
    }
    Ok(())
}

fn cmd_polygonize(a: PolygonizeArgs) -> Result<(), CliError> {
    let conn = match a.connectivity {
        4 => Connectivity::Four,
        8 => Connectivity::Eight,
        other => {
            return Err(CliError::Usage(format!(
                "--connectivity must be 4 or 8, got {other}"
            )))
        }
    };
    let grid = raster::read_ascii_grid(&a.input)?;
    let mask = raster::threshold(&grid, a.dn);
    let comps = raster::polygonize(&mask, conn);
    let feats = raster::components_to_features(&comps);
    geojson::write_file(&a.output, &geojson::polygons_doc(&feats))?;
    println!("{} polygons -> {}", feats.len(), a.output.display());
    Ok(())
}

fn cover_one(
    grid: &Grid,
    features: &crate::sphere::GeoFeatureSet,
    k_min: Option<u8>,
    k_max: Option<u8>,
    cap: usize,
    ratio_stop: f64,
) -> Result<Vec<CoverRecord>, CliError> {
    match (k_min, k_max) {
        (Some(lo), Some(hi)) => Ok(cover::build_cover_table(grid, lo, hi, features)?),
        (None, None) => Ok(cover::build_cover_table_auto(
            grid, features, cap, ratio_stop,
        )?),
        _ => Err(CliError::Usage(
            "--k-min and --k-max must be given together".into(),
        )),
    }
}

fn cmd_cover(a: CoverArgs) -> Result<(), CliError> {
    let kind = parse_grid(&a.grid)?;
    let features = geojson::read_file(&a.input)?;
    let grid = Grid::new(kind);
    let records = cover_one(&grid, &features, a.k_min, a.k_max, a.cap, a.ratio_stop)?;
    emit(a.output.as_ref(), &cover::cover_csv(&records))
}

/// Groups rows by grid, keeping first-appearance order and sorting each
/// group by resolution.
fn group_by_grid(records: Vec<CoverRecord>) -> Vec<(GridKind, Vec<CoverRecord>)> {
    let mut groups: Vec<(GridKind, Vec<CoverRecord>)> = Vec::new();
    for r in records {
        match groups.iter_mut().find(|(g, _)| *g == r.grid) {
            Some((_, v)) => v.push(r),
            None => groups.push((r.grid, vec![r])),
        }
    }
    for (_, v) in &mut groups {
        v.sort_by_key(|r| r.resolution);
    }
    groups
}

fn fit_groups(
    groups: &[(GridKind, Vec<CoverRecord>)],
    policy: &RangePolicy,
) -> Result<Vec<ScalingFit>, CliError> {
    groups
        .iter()
        .map(|(_, records)| Ok(scaling::fit_table(records, policy)?))
        .collect()
}

fn write_plots(
    dir: &Path,
    groups: &[(GridKind, Vec<CoverRecord>)],
    fits: &[ScalingFit],
) -> Result<(), CliError> {
    for ((kind, records), fit) in groups.iter().zip(fits) {
        let svg = plot::scaling_plot(records, Some(fit));
        write_text(&dir.join(format!("{}.svg", kind.name())), &svg)?;
    }
    Ok(())
}

fn report_json(agg: &scaling::AggregateFit) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(agg)
        .map_err(|e| CliError::Internal(format!("report serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn cmd_fit(a: FitArgs) -> Result<(), CliError> {
    let mut records = Vec::new();
    for path in &a.tables {
        records.extend(cover::read_cover_csv(path)?);
    }
    let groups = group_by_grid(records);
    if groups.is_empty() {
        return Err(CliError::Data("EMPTY_INPUT: no rows in any table".into()));
    }
    let policy = a.policy.to_policy();
    let fits = fit_groups(&groups, &policy)?;
    if let Some(dir) = &a.plot_dir {
        write_plots(dir, &groups, &fits)?;
    }
    let agg = scaling::aggregate(fits)?;
    let text = report_json(&agg)?;
    if a.output.is_some() {
        println!(
            "d_b_mean = {:.4} over {} grid(s)",
            agg.d_b_mean,
            agg.per_grid.len()
        );
    }
    emit(a.output.as_ref(), &text)
}

fn cmd_run(a: RunArgs) -> Result<(), CliError> {
    let mut kinds = Vec::new();
    for s in &a.grids {
        let k = parse_grid(s)?;
        if !kinds.contains(&k) {
            kinds.push(k);
        }
    }
    if kinds.is_empty() {
        return Err(CliError::Usage("--grids must name at least one grid".into()));
    }
    let features = geojson::read_file(&a.input)?;
    let policy = a.policy.to_policy();

    let mut groups = Vec::new();
    let mut fits = Vec::new();
    for kind in kinds {
        let grid = Grid::new(kind);
        let records = cover_one(&grid, &features, a.k_min, a.k_max, a.cap, a.ratio_stop)?;
        eprintln!(
            "{}: {} resolutions, finest n_cells {}",
            kind.name(),
            records.len(),
            records.last().map_or(0, |r| r.n_cells)
        );
        write_text(
            &a.out_dir.join(format!("cover_{}.csv", kind.name())),
            &cover::cover_csv(&records),
        )?;
        let fit = scaling::fit_table(&records, &policy)?;
        eprintln!(
            "{}: d_b = {:.4} (se {:.4})",
            kind.name(),
            fit.d_b,
            fit.se_corrected
        );
        groups.push((kind, records));
        fits.push(fit);
    }
    if a.plot {
        write_plots(&a.out_dir, &groups, &fits)?;
    }
    let agg = scaling::aggregate(fits)?;
    let text = report_json(&agg)?;
    write_text(&a.out_dir.join("report.json"), &text)?;
    print!("{text}");
    Ok(())
}

fn cmd_grid_stats(a: GridStatsArgs) -> Result<(), CliError> {
    let kind = parse_grid(&a.grid)?;
    let grid = Grid::new(kind);
    let mut out = String::from("grid,resolution,n_cells,min_km,mean_km,max_km,sampled\n");
    for res in 0..=a.max_res {
        let stats = grid
            .diameter_stats(res)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        out.push_str(&format!(
            "{},{},{},{:.6},{:.6},{:.6},{}\n",
            kind.name(),
            res,
            stats.cells,
            stats.min_rad * EARTH_RADIUS_KM,
            stats.mean_rad * EARTH_RADIUS_KM,
            stats.max_rad * EARTH_RADIUS_KM,
            stats.sampled.map_or(String::from("all"), |n| n.to_string()),
        ));
    }
    emit(a.output.as_ref(), &out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::TempDir;

    fn parse(args: &[&str]) -> Command {
        Cli::try_parse_from(args).expect("args parse").command
    }

    #[test]
    fn sierpinski_generation_writes_the_requested_points() {
        let dir = TempDir::new().unwrap();
        let out = dir.path().join("s.geojson");
        let cmd = parse(&[
            "dggsdim",
            "generate",
            "sierpinski",
            "-o",
            out.to_str().unwrap(),
            "--iterations",
            "500",
            "--seed",
            "7",
        ]);
        dispatch(cmd).unwrap();
        let features = geojson::read_file(&out).unwrap();
        assert_eq!(features.points.len(), 500);
    }

    #[test]
    fn same_seed_is_byte_identical_and_other_seeds_differ() {
        let dir = TempDir::new().unwrap();
        let paths: Vec<PathBuf> = (0..3)
            .map(|i| dir.path().join(format!("s{i}.geojson")))
            .collect();
        for (path, seed) in paths.iter().zip(["9", "9", "10"]) {
            let cmd = parse(&[
                "dggsdim",
                "generate",
                "sierpinski",
                "-o",
                path.to_str().unwrap(),
                "--iterations",
                "200",
                "--seed",
                seed,
            ]);
            dispatch(cmd).unwrap();
        }
        let bytes: Vec<Vec<u8>> = paths.iter().map(|p| std::fs::read(p).unwrap()).collect();
        assert_eq!(bytes[0], bytes[1]);
        assert_ne!(bytes[0], bytes[2]);
    }

    #[test]
    fn koch_vertex_counts_match_the_rewriting_depth() {
        let dir = TempDir::new().unwrap();
        for (n, want) in [("0", 2), ("2", 17), ("5", 1025)] {
            let out = dir.path().join(format!("k{n}.geojson"));
            let cmd = parse(&[
                "dggsdim",
                "generate",
                "koch",
                "-o",
                out.to_str().unwrap(),
                "--iterations",
                n,
            ]);
            dispatch(cmd).unwrap();
            let features = geojson::read_file(&out).unwrap();
            assert!(features.points.is_empty());
            assert_eq!(features.lines.len(), 1);
            assert_eq!(features.lines[0].len(), want, "n = {n}");
        }
    }

    #[test]
    fn mask_generation_polygonize_round_trip() {
        let dir = TempDir::new().unwrap();
        let asc = dir.path().join("m.asc");
        let gj = dir.path().join("m.geojson");
        let cmd = parse(&[
            "dggsdim",
            "generate",
            "mask",
            "-o",
            asc.to_str().unwrap(),
            "--size",
            "32",
            "--seed",
            "5",
        ]);
        dispatch(cmd).unwrap();
        let cmd = parse(&[
            "dggsdim",
            "polygonize",
            asc.to_str().unwrap(),
            "-o",
            gj.to_str().unwrap(),
        ]);
        dispatch(cmd).unwrap();
        let features = geojson::read_file(&gj).unwrap();
        assert!(!features.polygons.is_empty());
    }

    #[test]
    fn cover_of_a_single_point_counts_one_cell_per_resolution() {
        let dir = TempDir::new().unwrap();
        let gj = dir.path().join("p.geojson");
        let csv = dir.path().join("p.csv");
        geojson::write_file(
            &gj,
            &geojson::points_doc(&[crate::sphere::GeoPoint::new(11.0, 47.0)]),
        )
        .unwrap();
        let cmd = parse(&[
            "dggsdim",
            "cover",
            gj.to_str().unwrap(),
            "--grid",
            "isea4t",
            "--k-min",
            "0",
            "--k-max",
            "5",
            "-o",
            csv.to_str().unwrap(),
        ]);
        dispatch(cmd).unwrap();
        let records = cover::read_cover_csv(&csv).unwrap();
        assert_eq!(records.len(), 6);
        assert!(records.iter().all(|r| r.n_cells == 1));
    }

    #[test]
    fn fit_recovers_an_exact_slope_from_csv() {
        let dir = TempDir::new().unwrap();
        let csv = dir.path().join("t.csv");
        let rows: Vec<CoverRecord> = [8u64, 23, 64, 181, 512]
            .iter()
            .enumerate()
            .map(|(k, &n)| {
                let x = ((n as f64).ln() - 2.0) / 1.5;
                CoverRecord {
                    grid: GridKind::Isea4h,
                    resolution: k as u8,
                    delta_km: (-x).exp() * EARTH_RADIUS_KM,
                    delta_rad: (-x).exp(),
                    n_cells: n,
                    n_bbox_cells: n * 3,
                }
            })
            .collect();
        write_text(&csv, &cover::cover_csv(&rows)).unwrap();
        let report = dir.path().join("r.json");
        let plots = dir.path().join("plots");
        let cmd = parse(&[
            "dggsdim",
            "fit",
            csv.to_str().unwrap(),
            "-o",
            report.to_str().unwrap(),
            "--plot-dir",
            plots.to_str().unwrap(),
        ]);
        dispatch(cmd).unwrap();
        let v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
        let d = v["per_grid"][0]["d_b"].as_f64().unwrap();
        assert!((d - 1.5).abs() < 1e-12);
        assert!(v["per_grid"][0]["p_value"].as_f64().unwrap() < 1e-6);
        assert_eq!(v["per_grid"][0]["grid"], "isea4h");
        assert!((v["d_b_mean"].as_f64().unwrap() - 1.5).abs() < 1e-12);
        assert!(plots.join("isea4h.svg").exists());
    }

    #[test]
    fn single_row_table_exits_with_the_data_code() {
        let dir = TempDir::new().unwrap();
        let csv = dir.path().join("one.csv");
        std::fs::write(
            &csv,
            format!(
                "{}\nisea4t,0,7000.000000000,1.10000000000,3,9\n",
                cover::COVER_CSV_HEADER
            ),
        )
        .unwrap();
        let cmd = parse(&["dggsdim", "fit", csv.to_str().unwrap()]);
        let err = dispatch(cmd).unwrap_err();
        assert_eq!(err.code(), 2);
        assert!(err.to_string().contains("INSUFFICIENT_RANGE"));
    }

    #[test]
    fn run_on_a_lone_point_reports_insufficient_range() {
        let dir = TempDir::new().unwrap();
        let gj = dir.path().join("p.geojson");
        geojson::write_file(
            &gj,
            &geojson::points_doc(&[crate::sphere::GeoPoint::new(5.0, 5.0)]),
        )
        .unwrap();
        let cmd = parse(&[
            "dggsdim",
            "run",
            gj.to_str().unwrap(),
            "--grids",
            "isea4t",
            "--k-min",
            "0",
            "--k-max",
            "5",
            "--out-dir",
            dir.path().join("out").to_str().unwrap(),
        ]);
        let err = dispatch(cmd).unwrap_err();
        assert_eq!(err.code(), 2);
    }

    #[test]
    fn run_writes_identical_bytes_on_rerun() {
        let dir = TempDir::new().unwrap();
        let gj = dir.path().join("k.geojson");
        let cmd = parse(&[
            "dggsdim",
            "generate",
            "koch",
            "-o",
            gj.to_str().unwrap(),
            "--iterations",
            "3",
        ]);
        dispatch(cmd).unwrap();
        let outs: Vec<PathBuf> = (0..2).map(|i| dir.path().join(format!("o{i}"))).collect();
        for out in &outs {
            let cmd = parse(&[
                "dggsdim",
                "run",
                gj.to_str().unwrap(),
                "--grids",
                "isea4t",
                "--k-min",
                "2",
                "--k-max",
                "6",
                "--min-points",
                "3",
                "--plot",
                "--out-dir",
                out.to_str().unwrap(),
            ]);
            dispatch(cmd).unwrap();
        }
        for name in ["cover_isea4t.csv", "report.json", "isea4t.svg"] {
            let a = std::fs::read(outs[0].join(name)).unwrap();
            let b = std::fs::read(outs[1].join(name)).unwrap();
            assert_eq!(a, b, "{name} differs between reruns");
            assert!(!a.is_empty());
        }
    }

    #[test]
    fn malformed_inputs_exit_with_the_usage_code() {
        let dir = TempDir::new().unwrap();
        let bad = dir.path().join("bad.geojson");
        std::fs::write(&bad, "{not json").unwrap();
        let cmd = parse(&[
            "dggsdim",
            "cover",
            bad.to_str().unwrap(),
            "--grid",
            "isea4t",
            "--k-min",
            "0",
            "--k-max",
            "2",
        ]);
        assert_eq!(dispatch(cmd).unwrap_err().code(), 1);

        let gj = dir.path().join("p.geojson");
        geojson::write_file(
            &gj,
            &geojson::points_doc(&[crate::sphere::GeoPoint::new(0.0, 0.0)]),
        )
        .unwrap();
        let cmd = parse(&[
            "dggsdim",
            "cover",
            gj.to_str().unwrap(),
            "--grid",
            "isea9z",
            "--k-min",
            "0",
            "--k-max",
            "2",
        ]);
        assert_eq!(dispatch(cmd).unwrap_err().code(), 1);

        let cmd = parse(&[
            "dggsdim",
            "cover",
            gj.to_str().unwrap(),
            "--grid",
            "isea4t",
            "--k-min",
            "0",
        ]);
        assert_eq!(dispatch(cmd).unwrap_err().code(), 1);

        let cmd = parse(&[
            "dggsdim",
            "cover",
            gj.to_str().unwrap(),
            "--grid",
            "isea4t",
            "--k-min",
            "0",
            "--k-max",
            "99",
        ]);
        assert_eq!(dispatch(cmd).unwrap_err().code(), 1);
    }

    #[test]
    fn grid_stats_reports_exact_counts() {
        let dir = TempDir::new().unwrap();
        let out = dir.path().join("stats.csv");
        let cmd = parse(&[
            "dggsdim",
            "grid-stats",
            "--grid",
            "isea3h",
            "--max-res",
            "3",
            "-o",
            out.to_str().unwrap(),
        ]);
        dispatch(cmd).unwrap();
        let text = std::fs::read_to_string(&out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("isea3h,0,12,"));
        assert!(lines[2].starts_with("isea3h,1,32,"));
        assert!(lines[4].starts_with("isea3h,3,272,"));
    }
}
