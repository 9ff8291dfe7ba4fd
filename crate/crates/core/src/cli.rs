//! Command-line front end.
//!
//! Angles are degrees on the command line and in every file this module
//! reads or writes; they are converted to radians once, on parse.
//!
//! Exit codes: 0 on success, 1 when a computation or file operation fails,
//! 2 when the arguments cannot be parsed.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::delisle::{
    apex_latitude, arc_fit, build_conic, longitude_for_plane_angle, max_deviation, midpoint_standard_parallels,
    optimize_standard_parallels, project_arc,
};
use crate::distortion::{defect_of, distortion_grid_with, FieldStats};
use crate::error::Error;
use crate::projections::{CylindricalProfile, PlanePoint, Pole, ProjectionSpec};
use crate::render::{emit_csv, emit_svg, geodesic_paths, graticule_paths, outline_paths, GraticuleSpec, SvgStyle};
use crate::sphere::{GeoPoint, Region};

/// Failure of a command, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Exit code 2.
    Usage(String),
    /// Exit code 1.
    Failure(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "foliamap", version, about = "Map projections, distortion analysis and conic optimisation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Project points forward (lat,lon → x,y) or inverse.
    Project(ProjectArgs),
    /// Draw the images of meridians and parallels.
    Graticule(GraticuleArgs),
    /// Local metric (h, k, θ, ω, areal scale) on a grid.
    Distortion(DistortionArgs),
    /// Worst violation of length preservation along both foliations and of orthogonality.
    Defect(DefectArgs),
    /// Choose standard parallels for an equidistant conic over a latitude window.
    Optimize(OptimizeArgs),
    /// Project a great-circle arc and measure its straightness.
    Geodesic(GeodesicArgs),
}

/// A `lat,lon` pair in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatLon(pub f64, pub f64);

fn parse_numbers(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a number")))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated numbers, got {}", v.len()));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err("numbers must be finite".into());
    }
    Ok(v)
}

fn parse_latlon(s: &str) -> Result<LatLon, String> {
    let v = parse_numbers(s, 2)?;
    Ok(LatLon(v[0], v[1]))
}

/// `lat_min,lat_max,lon_min,lon_max` in degrees.
fn parse_region(s: &str) -> Result<[f64; 4], String> {
    let v = parse_numbers(s, 4)?;
    Ok([v[0], v[1], v[2], v[3]])
}

/// `NLATxNLON`.
fn parse_res(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| "expected NLATxNLON".to_string())?;
    let a: usize = a.trim().parse().map_err(|_| format!("`{a}` is not a count"))?;
    let b: usize = b.trim().parse().map_err(|_| format!("`{b}` is not a count"))?;
    if a < 2 || b < 2 {
        return Err("resolution must be at least 2x2".into());
    }
    Ok((a, b))
}

#[derive(Debug, Args)]
pub struct ProjectArgs {
    /// Projection spec (JSON).
    #[arg(long)]
    pub spec: PathBuf,
    /// Point as `lat,lon` (or `x,y` with --inverse); repeatable.
    #[arg(long = "point", value_parser = parse_latlon, allow_hyphen_values = true)]
    pub points: Vec<LatLon>,
    /// CSV input with columns lat_deg,lon_deg (or x,y with --inverse).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Map plane points back to the sphere.
    #[arg(long)]
    pub inverse: bool,
    /// Output CSV; standard output if omitted.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GraticuleArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// `lat_min,lat_max,lon_min,lon_max` in degrees.
    #[arg(long, value_parser = parse_region, allow_hyphen_values = true)]
    pub region: [f64; 4],
    /// Spacing of both meridians and parallels, degrees.
    #[arg(long, default_value_t = 10.0)]
    pub step: f64,
    #[arg(long)]
    pub parallel_step: Option<f64>,
    #[arg(long)]
    pub meridian_step: Option<f64>,
    /// Samples per meridian or parallel.
    #[arg(long, default_value_t = 181)]
    pub samples: usize,
    /// Also trace the region boundary.
    #[arg(long)]
    pub outline: bool,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// SVG width in pixels.
    #[arg(long, default_value_t = 800.0)]
    pub width: f64,
    /// Put the curve labels into the SVG as titles.
    #[arg(long)]
    pub labels: bool,
}

#[derive(Debug, Args)]
pub struct DistortionArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, value_parser = parse_region, allow_hyphen_values = true)]
    pub region: [f64; 4],
    /// Grid resolution `NLATxNLON`.
    #[arg(long, value_parser = parse_res, default_value = "31x31")]
    pub res: (usize, usize),
    /// Finite-difference step in radians.
    #[arg(long, default_value_t = 1e-5)]
    pub step: f64,
    /// Per-point CSV report.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Summary JSON; standard output if neither output is given.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DefectArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, value_parser = parse_region, allow_hyphen_values = true)]
    pub region: [f64; 4],
    #[arg(long, value_parser = parse_res, default_value = "31x31")]
    pub res: (usize, usize),
    #[arg(long, default_value_t = 1e-5)]
    pub step: f64,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    /// Southern edge of the window, degrees.
    #[arg(long, allow_hyphen_values = true)]
    pub south: f64,
    /// Northern edge of the window, degrees.
    #[arg(long, allow_hyphen_values = true)]
    pub north: f64,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GeodesicArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// Start as `lat,lon`.
    #[arg(long, value_parser = parse_latlon, allow_hyphen_values = true)]
    pub from: LatLon,
    /// End as `lat,lon`.
    #[arg(long, value_parser = parse_latlon, allow_hyphen_values = true)]
    pub to: LatLon,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Fit report; standard output if no output is given.
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

// ---------------------------------------------------------------------------
// projection spec JSON

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum PoleJson {
    North,
    South,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum ProfileJson {
    Equirectangular,
    Conformal,
    EqualArea,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum SpecJson {
    Stereographic {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pole: Option<PoleJson>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tangent_lat: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tangent_lon: Option<f64>,
    },
    Gnomonic {
        tangent_lat: f64,
        tangent_lon: f64,
    },
    Cylindrical {
        profile: ProfileJson,
        #[serde(default)]
        ref_lat: f64,
    },
    Delisle {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        phi1: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        phi2: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        south: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        north: Option<f64>,
    },
}

fn spec_err(msg: impl Into<String>) -> Error {
    Error::SpecParse(msg.into())
}

fn tangent_point(lat: f64, lon: f64) -> Result<GeoPoint<f64>, Error> {
    GeoPoint::from_degrees(lat, lon).map_err(|_| spec_err(format!("tangent_lat {lat} must lie in [-90, 90]")))
}

/// Parses the JSON projection spec (angles in degrees).
///
/// ```json
/// {"type":"stereographic","pole":"north"}
/// {"type":"stereographic","tangent_lat":55,"tangent_lon":100}
/// {"type":"gnomonic","tangent_lat":-90,"tangent_lon":0}
/// {"type":"cylindrical","profile":"conformal","ref_lat":0}
/// {"type":"delisle","phi1":47.5,"phi2":62.5}
/// {"type":"delisle","south":40,"north":70}
/// ```
///
/// `pole` names the projection pole: the plane touches the opposite pole.
/// The `south`/`north` form of `delisle` places the standard parallels by
/// the quarter-window rule.
pub fn parse_spec(text: &str) -> Result<ProjectionSpec<f64>, Error> {
    let raw: SpecJson = serde_json::from_str(text).map_err(|e| spec_err(e.to_string()))?;
    match raw {
        SpecJson::Stereographic { pole, tangent_lat, tangent_lon } => match (pole, tangent_lat, tangent_lon) {
            (Some(p), None, None) => Ok(ProjectionSpec::Stereographic {
                from: match p {
                    PoleJson::North => Pole::North,
                    PoleJson::South => Pole::South,
                },
            }),
            (None, Some(lat), Some(lon)) => Ok(ProjectionSpec::ObliqueStereographic { tangent: tangent_point(lat, lon)? }),
            _ => Err(spec_err("stereographic needs either `pole` or both `tangent_lat` and `tangent_lon`")),
        },
        SpecJson::Gnomonic { tangent_lat, tangent_lon } => {
            Ok(ProjectionSpec::Gnomonic { tangent: tangent_point(tangent_lat, tangent_lon)? })
        }
        SpecJson::Cylindrical { profile, ref_lat } => {
            if !(ref_lat.abs() < 90.0) {
                return Err(spec_err(format!("ref_lat {ref_lat} must lie in (-90, 90)")));
            }
            let profile = match profile {
                ProfileJson::Equirectangular => CylindricalProfile::Equirectangular,
                ProfileJson::Conformal => CylindricalProfile::Conformal,
                ProfileJson::EqualArea => CylindricalProfile::EqualArea,
            };
            Ok(ProjectionSpec::cylindrical(profile, ref_lat.to_radians())?)
        }
        SpecJson::Delisle { phi1, phi2, south, north } => {
            let (a, b) = match (phi1, phi2, south, north) {
                (Some(a), Some(b), None, None) => (a, b),
                (None, None, Some(s), Some(n)) => {
                    let (a, b) = midpoint_standard_parallels(s.to_radians(), n.to_radians())
                        .map_err(|e| spec_err(format!("south/north: {e}")))?;
                    (a.to_degrees(), b.to_degrees())
                }
                _ => return Err(spec_err("delisle needs either `phi1` and `phi2` or `south` and `north`")),
            };
            if !(a < b) {
                return Err(spec_err(format!("phi1 must be less than phi2 (got phi1 = {a}, phi2 = {b})")));
            }
            if !(a > 0.0 && b < 90.0) {
                return Err(spec_err(format!("phi1 and phi2 must lie in (0, 90) (got {a}, {b})")));
            }
            let params = build_conic(a.to_radians(), b.to_radians()).map_err(|e| spec_err(e.to_string()))?;
            Ok(ProjectionSpec::conic(params))
        }
    }
}

/// Canonical JSON encoding of a spec, the inverse of [`parse_spec`].
pub fn spec_to_json(spec: &ProjectionSpec<f64>) -> String {
    serde_json::to_string(&spec_json(spec)).expect("spec serializes")
}

fn spec_json(spec: &ProjectionSpec<f64>) -> SpecJson {
    match *spec {
        ProjectionSpec::Stereographic { from } => SpecJson::Stereographic {
            pole: Some(match from {
                Pole::North => PoleJson::North,
                Pole::South => PoleJson::South,
            }),
            tangent_lat: None,
            tangent_lon: None,
        },
        ProjectionSpec::ObliqueStereographic { tangent } => SpecJson::Stereographic {
            pole: None,
            tangent_lat: Some(tangent.lat_deg()),
            tangent_lon: Some(tangent.lon_deg()),
        },
        ProjectionSpec::Gnomonic { tangent } => SpecJson::Gnomonic { tangent_lat: tangent.lat_deg(), tangent_lon: tangent.lon_deg() },
        ProjectionSpec::Cylindrical { profile, ref_lat } => SpecJson::Cylindrical {
            profile: match profile {
                CylindricalProfile::Equirectangular => ProfileJson::Equirectangular,
                CylindricalProfile::Conformal => ProfileJson::Conformal,
                CylindricalProfile::EqualArea => ProfileJson::EqualArea,
            },
            ref_lat: ref_lat.to_degrees(),
        },
        ProjectionSpec::EquidistantConic { params } => SpecJson::Delisle {
            phi1: Some(params.phi1().to_degrees()),
            phi2: Some(params.phi2().to_degrees()),
            south: None,
            north: None,
        },
    }
}

// ---------------------------------------------------------------------------
// reports

#[derive(Serialize)]
struct LatLonJson {
    lat_deg: f64,
    lon_deg: f64,
}

impl From<GeoPoint<f64>> for LatLonJson {
    fn from(p: GeoPoint<f64>) -> Self {
        Self { lat_deg: p.lat_deg(), lon_deg: p.lon_deg() }
    }
}

#[derive(Serialize)]
struct RegionJson {
    lat_min: f64,
    lat_max: f64,
    lon_min: f64,
    lon_max: f64,
}

#[derive(Serialize)]
struct StatsJson {
    min: f64,
    max: f64,
    argmin: LatLonJson,
    argmax: LatLonJson,
}

impl StatsJson {
    fn new(s: &FieldStats<f64>, f: impl Fn(f64) -> f64) -> Self {
        Self { min: f(s.min), max: f(s.max), argmin: s.argmin.into(), argmax: s.argmax.into() }
    }
}

#[derive(Serialize)]
struct DistortionJson {
    spec: SpecJson,
    region: RegionJson,
    res: [usize; 2],
    step_rad: f64,
    evaluated: usize,
    skipped: usize,
    h: StatsJson,
    k: StatsJson,
    omega_deg: StatsJson,
    areal_scale: StatsJson,
}

#[derive(Serialize)]
struct DefectJson {
    spec: SpecJson,
    region: RegionJson,
    res: [usize; 2],
    step_rad: f64,
    evaluated: usize,
    skipped: usize,
    defect: f64,
    argmax: LatLonJson,
    meridian_scale_residual: f64,
    parallel_scale_residual: f64,
    orthogonality_residual: f64,
}

#[derive(Serialize)]
struct WindowJson {
    south: f64,
    north: f64,
}

#[derive(Serialize)]
struct MidpointJson {
    phi1: f64,
    phi2: f64,
    n: f64,
    rho1: f64,
    deviation: f64,
    argmax_lat: f64,
    apex_lat: f64,
    apex_beyond_pole: f64,
    /// Longitude covered by a half-turn about the apex.
    semicircle_lon_span: f64,
}

#[derive(Serialize)]
struct OptimizerJson {
    phi1: f64,
    phi2: f64,
    minimax_deviation: f64,
    midpoint_deviation: f64,
    improvement_ratio: f64,
}

#[derive(Serialize)]
struct OptimizeJson {
    window: WindowJson,
    midpoint: MidpointJson,
    optimizer: OptimizerJson,
}

#[derive(Serialize)]
struct CircleJson {
    center_x: f64,
    center_y: f64,
    radius: f64,
    rms_residual: f64,
}

#[derive(Serialize)]
struct GeodesicJson {
    spec: SpecJson,
    from: LatLonJson,
    to: LatLonJson,
    samples: usize,
    chord: f64,
    sagitta: f64,
    sagitta_over_chord: f64,
    circle: Option<CircleJson>,
}

// ---------------------------------------------------------------------------
// plumbing

fn read_spec(path: &Path) -> CliResult<ProjectionSpec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Failure(format!("cannot read {}: {e}", path.display())))?;
    parse_spec(&text).map_err(|e| CliError::Failure(format!("{}: {e}", path.display())))
}

fn write_out(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::Failure(format!("cannot write {}: {e}", path.display())))
}

fn to_json<S: Serialize>(v: &S) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn region_of(r: [f64; 4]) -> CliResult<Region<f64>> {
    Region::from_degrees(r[0], r[1], r[2], r[3]).map_err(|e| CliError::Usage(format!("--region: {e}")))
}

fn region_json(r: [f64; 4]) -> RegionJson {
    RegionJson { lat_min: r[0], lat_max: r[1], lon_min: r[2], lon_max: r[3] }
}

fn check_step(step: f64) -> CliResult<f64> {
    if step > 0.0 && step <= 1e-3 {
        Ok(step)
    } else {
        Err(CliError::Usage(format!("--step {step} must lie in (0, 1e-3]")))
    }
}

fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Failure(format!("csv: {e}"))
}

// ---------------------------------------------------------------------------
// commands

fn cmd_project(a: &ProjectArgs, out: &mut dyn std::io::Write) -> CliResult<()> {
    let spec = read_spec(&a.spec)?;
    let mut inputs: Vec<(f64, f64)> = a.points.iter().map(|p| (p.0, p.1)).collect();
    if let Some(path) = &a.input {
        let mut rdr = csv::Reader::from_path(path).map_err(csv_err)?;
        let headers = rdr.headers().map_err(csv_err)?.clone();
        let want = if a.inverse { ["x", "y"] } else { ["lat_deg", "lon_deg"] };
        let idx: Vec<usize> = want
            .iter()
            .map(|w| {
                headers
                    .iter()
                    .position(|h| h.trim() == *w)
                    .ok_or_else(|| CliError::Failure(format!("{}: missing column `{w}`", path.display())))
            })
            .collect::<CliResult<_>>()?;
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let get = |i: usize| -> CliResult<f64> {
                rec.get(idx[i])
                    .and_then(|t| t.trim().parse().ok())
                    .ok_or_else(|| CliError::Failure(format!("{}: row {}: bad number", path.display(), line + 1)))
            };
            inputs.push((get(0)?, get(1)?));
        }
    }
    if inputs.is_empty() {
        return Err(CliError::Usage("give at least one --point or an --input file".into()));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["lat_deg", "lon_deg", "x", "y", "status"]).map_err(csv_err)?;
    for (u, v) in inputs {
        let row: [String; 5] = if a.inverse {
            match spec.inverse(PlanePoint::new(u, v)) {
                Ok(p) => [fmt17(p.lat_deg()), fmt17(p.lon_deg()), fmt17(u), fmt17(v), "ok".into()],
                Err(_) => [String::new(), String::new(), fmt17(u), fmt17(v), "out_of_image".into()],
            }
        } else {
            match GeoPoint::from_degrees(u, v).and_then(|p| spec.forward(p)) {
                Ok(q) => [fmt17(u), fmt17(v), fmt17(q.x), fmt17(q.y), "ok".into()],
                Err(Error::InvalidLatitude(_)) => [fmt17(u), fmt17(v), String::new(), String::new(), "invalid".into()],
                Err(_) => [fmt17(u), fmt17(v), String::new(), String::new(), "out_of_domain".into()],
            }
        };
        w.write_record(&row).map_err(csv_err)?;
    }
    let text = String::from_utf8(w.into_inner().map_err(|e| CliError::Failure(e.to_string()))?).unwrap();
    match &a.csv {
        Some(path) => write_out(path, &text),
        None => out.write_all(text.as_bytes()).map_err(|e| CliError::Failure(e.to_string())),
    }
}

fn cmd_graticule(a: &GraticuleArgs, out: &mut dyn std::io::Write) -> CliResult<()> {
    let spec = read_spec(&a.spec)?;
    let region = region_of(a.region)?;
    let ps = a.parallel_step.unwrap_or(a.step);
    let ms = a.meridian_step.unwrap_or(a.step);
    if !(ps > 0.0 && ms > 0.0) {
        return Err(CliError::Usage("graticule steps must be positive".into()));
    }
    if !(a.width > 0.0) {
        return Err(CliError::Usage("--width must be positive".into()));
    }
    let g = GraticuleSpec::new(region, ps.to_radians(), ms.to_radians(), a.samples)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut paths = graticule_paths(&spec, &g)?;
    if a.outline {
        paths.extend(outline_paths(&spec, &region, a.samples)?);
    }
    if let Some(path) = &a.svg {
        let style = SvgStyle { width_px: a.width, labels: a.labels, ..SvgStyle::default() };
        write_out(path, &emit_svg(&paths, &style)?)?;
    }
    let csv = emit_csv(&paths)?;
    match (&a.csv, &a.svg) {
        (Some(path), _) => write_out(path, &csv),
        (None, None) => out.write_all(csv.as_bytes()).map_err(|e| CliError::Failure(e.to_string())),
        _ => Ok(()),
    }
}

fn cmd_distortion(a: &DistortionArgs, out: &mut dyn std::io::Write) -> CliResult<()> {
    let spec = read_spec(&a.spec)?;
    let region = region_of(a.region)?;
    let step = check_step(a.step)?;
    let grid = distortion_grid_with(&spec, &region, a.res, step)?;
    if let Some(path) = &a.csv {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["lat_deg", "lon_deg", "h", "k", "theta_deg", "omega_deg", "areal_scale"]).map_err(csv_err)?;
        for m in &grid.samples {
            w.write_record([
                fmt17(m.at.lat_deg()),
                fmt17(m.at.lon_deg()),
                fmt17(m.h),
                fmt17(m.k),
                fmt17(m.theta.to_degrees()),
                fmt17(m.omega.to_degrees()),
                fmt17(m.s),
            ])
            .map_err(csv_err)?;
        }
        let text = String::from_utf8(w.into_inner().map_err(|e| CliError::Failure(e.to_string()))?).unwrap();
        write_out(path, &text)?;
    }
    let s = &grid.summary;
    let report = DistortionJson {
        spec: spec_json(&spec),
        region: region_json(a.region),
        res: [a.res.0, a.res.1],
        step_rad: step,
        evaluated: grid.samples.len(),
        skipped: grid.skipped,
        h: StatsJson::new(&s.h, |v| v),
        k: StatsJson::new(&s.k, |v| v),
        omega_deg: StatsJson::new(&s.omega, f64::to_degrees),
        areal_scale: StatsJson::new(&s.s, |v| v),
    };
    let json = to_json(&report);
    match (&a.json, &a.csv) {
        (Some(path), _) => write_out(path, &json),
        (None, None) => out.write_all(json.as_bytes()).map_err(|e| CliError::Failure(e.to_string())),
        _ => Ok(()),
    }
}

fn cmd_defect(a: &DefectArgs, out: &mut dyn std::io::Write) -> CliResult<()> {
    let spec = read_spec(&a.spec)?;
    let region = region_of(a.region)?;
    let step = check_step(a.step)?;
    let grid = distortion_grid_with(&spec, &region, a.res, step)?;
    let d = defect_of(&grid);
    let report = DefectJson {
        spec: spec_json(&spec),
        region: region_json(a.region),
        res: [a.res.0, a.res.1],
        step_rad: step,
        evaluated: grid.samples.len(),
        skipped: grid.skipped,
        defect: d.defect,
        argmax: d.argmax.into(),
        meridian_scale_residual: d.residuals.0,
        parallel_scale_residual: d.residuals.1,
        orthogonality_residual: d.residuals.2,
    };
    let json = to_json(&report);
    match &a.json {
        Some(path) => write_out(path, &json),
        None => out.write_all(json.as_bytes()).map_err(|e| CliError::Failure(e.to_string())),
    }
}

fn cmd_optimize(a: &OptimizeArgs, out: &mut dyn std::io::Write) -> CliResult<()> {
    let (s, n) = (a.south.to_radians(), a.north.to_radians());
    let (m1, m2) = midpoint_standard_parallels(s, n)?;
    let opt = optimize_standard_parallels(s, n)?;
    let midpoint = match build_conic(m1, m2) {
        Ok(params) => {
            let dev = max_deviation(&params, s, n)?;
            let apex = apex_latitude(&params).to_degrees();
            MidpointJson {
                phi1: m1.to_degrees(),
                phi2: m2.to_degrees(),
                n: params.n(),
                rho1: params.rho1(),
                deviation: dev.value,
                argmax_lat: dev.argmax_phi.to_degrees(),
                apex_lat: apex,
                apex_beyond_pole: apex - 90.0,
                semicircle_lon_span: longitude_for_plane_angle(&params, std::f64::consts::PI).to_degrees(),
            }
        }
        Err(_) => {
            return Err(CliError::Failure(format!(
                "the conic report needs standard parallels in (0, 90); got {} and {}",
                m1.to_degrees(),
                m2.to_degrees()
            )))
        }
    };
    let report = OptimizeJson {
        window: WindowJson { south: a.south, north: a.north },
        midpoint,
        optimizer: OptimizerJson {
            phi1: opt.phi1_opt.to_degrees(),
            phi2: opt.phi2_opt.to_degrees(),
            minimax_deviation: opt.minimax_deviation,
            midpoint_deviation: opt.midpoint_deviation,
            improvement_ratio: opt.improvement_ratio,
        },
    };
    let json = to_json(&report);
    match &a.json {
        Some(path) => write_out(path, &json),
        None => out.write_all(json.as_bytes()).map_err(|e| CliError::Failure(e.to_string())),
    }
}

fn cmd_geodesic(a: &GeodesicArgs, out: &mut dyn std::io::Write) -> CliResult<()> {
    let spec = read_spec(&a.spec)?;
    let from = GeoPoint::from_degrees(a.from.0, a.from.1).map_err(|e| CliError::Usage(format!("--from: {e}")))?;
    let to = GeoPoint::from_degrees(a.to.0, a.to.1).map_err(|e| CliError::Usage(format!("--to: {e}")))?;
    if a.samples < 16 {
        return Err(CliError::Usage("--samples must be at least 16".into()));
    }
    let pts = project_arc(&spec, from, to, a.samples)?;
    let fit = arc_fit(&pts)?;
    let report = GeodesicJson {
        spec: spec_json(&spec),
        from: from.into(),
        to: to.into(),
        samples: a.samples,
        chord: fit.chord,
        sagitta: fit.max_line_residual,
        sagitta_over_chord: fit.max_line_residual / fit.chord,
        circle: fit.circle.map(|c| CircleJson {
            center_x: c.center.x,
            center_y: c.center.y,
            radius: c.radius,
            rms_residual: c.rms_residual,
        }),
    };
    if a.svg.is_some() || a.csv.is_some() {
        let paths = geodesic_paths(&spec, from, to, a.samples)?;
        if let Some(path) = &a.svg {
            write_out(path, &emit_svg(&paths, &SvgStyle::default())?)?;
        }
        if let Some(path) = &a.csv {
            write_out(path, &emit_csv(&paths)?)?;
        }
    }
    let json = to_json(&report);
    match (&a.json, &a.svg, &a.csv) {
        (Some(path), _, _) => write_out(path, &json),
        (None, None, None) => out.write_all(json.as_bytes()).map_err(|e| CliError::Failure(e.to_string())),
        _ => Ok(()),
    }
}

/// Runs a parsed command, writing unnamed outputs to `out`.
pub fn execute(cli: &Cli, out: &mut dyn std::io::Write) -> CliResult<()> {
    match &cli.command {
        Command::Project(a) => cmd_project(a, out),
        Command::Graticule(a) => cmd_graticule(a, out),
        Command::Distortion(a) => cmd_distortion(a, out),
        Command::Defect(a) => cmd_defect(a, out),
        Command::Optimize(a) => cmd_optimize(a, out),
        Command::Geodesic(a) => cmd_geodesic(a, out),
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to standard error.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(&cli, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            let (CliError::Usage(msg) | CliError::Failure(msg)) = &e;
            eprintln!("error: {msg}");
            e.exit_code()
        }
    }
}
