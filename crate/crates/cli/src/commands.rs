//! Argument definitions and dispatch for every subcommand.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use elstat_core::balayage::{
    balayage_measure, exterior_moment, gap_exponent, hole_energy, hole_energy_quadrature, log_gap_probability,
    tail_exponent, Curve, HoleSpec,
};
use elstat_core::conformal::{
    droplet_radii, green3d, green_infinity, green_two_point, quadratic_droplet, surface_density, PlanarDomain, SpatialDomain,
};
use elstat_core::domains::{hyperellipsoid_coefficients, Kernel, UniformDomain};
use elstat_core::fluctuations::{
    covariance_circle, covariance_mapped, subblock_smoothed, surface_correlation, Convention, LinearStatistic, Route,
    SurfaceGeometry,
};
use elstat_core::gas::{
    exact_log_partition, free_energy_prediction, log_partition_per_factorial, Ensemble, FreeEnergyCase, GasModel,
    SamplerConfig,
};
use elstat_core::riesz::{PointMode, RieszCircle};
use elstat_core::surfaces::{ellipsoid_surface_density, ellipsoid_surface_potential, projected_potential, shell_potential};

use crate::config::Config;
use crate::output::{num, nums, to_json, to_text, Record};
use crate::sample::{run_sample, SampleRequest};
use crate::spec::{parse_complex, parse_domain, parse_map, parse_point, parse_points, PlanarStat, Spec, Trig};
use crate::suite::{run_suite, Suite};
use crate::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "elstat", version, about = "Electrostatics of uniformly charged bodies and log-gases")]
pub struct Cli {
    /// Emit a JSON record instead of `key = value` lines.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Background potential of a uniformly charged body (charge −N) at a point.
    Potential(PotentialArgs),
    /// Interaction energy of point charges with a body, and the body's self energy.
    Energy(EnergyArgs),
    /// Interior quadratic coefficients of a uniformly charged hyperellipsoid.
    Coeffs(CoeffsArgs),
    /// Surface charges: ellipsoid conductors, spherical shells and projected densities.
    Surface(SurfaceArgs),
    /// Dirichlet Green functions of planar and spatial exterior domains.
    Green(GreenArgs),
    /// Capacity, Robin constant and area of an exterior conformal map.
    Capacity(CapacityArgs),
    /// Droplet (support) of a planar external potential.
    Droplet(DropletArgs),
    /// Fluctuation formulas: circle/mapped covariances, surface correlations.
    Fluct(FluctArgs),
    /// Riesz gas of equally spaced charges on a circle.
    Riesz(RieszArgs),
    /// Balayage of a uniform body onto its boundary.
    Balayage(BalayageArgs),
    /// Hole (gap) probability energies and counting tails.
    Hole(HoleArgs),
    /// Metropolis sampling of log-gases.
    Sample(SampleArgs),
    /// Run the built-in acceptance checks.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
pub struct PotentialArgs {
    /// Body, e.g. `ball:d=3,R=1,N=1`.
    #[arg(long)]
    pub domain: String,
    /// Comma-separated coordinates.
    #[arg(long, allow_hyphen_values = true)]
    pub point: String,
    /// Also evaluate by direct quadrature.
    #[arg(long)]
    pub oracle: bool,
    /// Absolute tolerance for the quadrature route.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct EnergyArgs {
    #[arg(long)]
    pub domain: String,
    /// Semicolon-separated charge positions, e.g. `0,0;0.5,0.1`.
    #[arg(long, allow_hyphen_values = true)]
    pub points: Option<String>,
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    /// Semi-axes, comma-separated.
    #[arg(long)]
    pub axes: String,
    /// Total charge.
    #[arg(long, default_value_t = 1.0)]
    pub n: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SurfaceKind {
    /// Conductor surface density on an ellipsoid.
    Density,
    /// Potential of an ellipsoidal conductor.
    Potential,
    /// Potential of a uniformly charged spherical shell.
    Shell,
    /// Potential of the projected equilibrium density of a ball.
    Projected,
}

#[derive(Debug, Args)]
pub struct SurfaceArgs {
    #[arg(long, value_enum, default_value_t = SurfaceKind::Density)]
    pub kind: SurfaceKind,
    /// Ellipsoid semi-axes (density, potential).
    #[arg(long)]
    pub axes: Option<String>,
    /// Total charge.
    #[arg(long, default_value_t = 1.0)]
    pub q: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
    /// Dimension (shell, projected).
    #[arg(long)]
    pub d: Option<u32>,
    /// Radius (shell, projected).
    #[arg(long)]
    pub radius: Option<f64>,
    /// Distance from the centre (projected).
    #[arg(long)]
    pub t: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GreenArgs {
    /// `disk:R=1`, `halfplane`, `sphere:R=1`, `halfspace`, or any map spec.
    #[arg(long)]
    pub domain: String,
    #[arg(long, allow_hyphen_values = true)]
    pub z: String,
    #[arg(long, allow_hyphen_values = true)]
    pub w: String,
}

#[derive(Debug, Args)]
pub struct CapacityArgs {
    /// Map, e.g. `ellipse:a1=2,a2=1`.
    #[arg(long)]
    pub map: String,
    /// Exterior point for the Green function with pole at infinity.
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
    /// Boundary point for the equilibrium density.
    #[arg(long, allow_hyphen_values = true)]
    pub boundary: Option<String>,
}

#[derive(Debug, Args)]
pub struct DropletArgs {
    /// `quadratic:alpha=0.1,area=3.14` or `induced:alpha=1`.
    #[arg(long)]
    pub potential: String,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FluctMode {
    Circle,
    Mapped,
    Surface,
    Subblock,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RouteArg {
    Quadrature,
    Fourier,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ConventionArg {
    Contour,
    Background,
    Interval,
}

#[derive(Debug, Args)]
pub struct FluctArgs {
    #[arg(long, value_enum, default_value_t = FluctMode::Circle)]
    pub mode: FluctMode,
    #[arg(long, default_value_t = 2.0)]
    pub beta: f64,
    /// Statistic: `cos:k=1`, `trig:c1=1,s2=0.5` (circle) or `re:k=1` (mapped).
    #[arg(long)]
    pub f: Option<String>,
    #[arg(long)]
    pub g: Option<String>,
    #[arg(long, value_enum, default_value_t = RouteArg::Fourier)]
    pub route: RouteArg,
    #[arg(long)]
    pub map: Option<String>,
    #[arg(long, value_enum, default_value_t = ConventionArg::Contour)]
    pub convention: ConventionArg,
    /// Surface geometry: `disk:R=1`, `halfplane`, `ellipse:a1=2,a2=1`, `halfspace`.
    #[arg(long)]
    pub geometry: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub p1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub p2: Option<String>,
    /// Matrix size (subblock).
    #[arg(long)]
    pub n: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PointModeArg {
    Finite,
    Limit,
}

#[derive(Debug, Args)]
pub struct RieszArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub s: f64,
    #[arg(long)]
    pub n: u64,
    /// Circle radius; unit line density when omitted.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Test-charge position in lattice units (angle 2πx/N).
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<f64>,
    #[arg(long, value_enum, default_value_t = PointModeArg::Finite)]
    pub mode: PointModeArg,
}

#[derive(Debug, Args)]
pub struct BalayageArgs {
    #[arg(long)]
    pub domain: String,
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
    /// Order of the exterior harmonic moment to report.
    #[arg(long)]
    pub moment: Option<u32>,
}

#[derive(Debug, Args)]
pub struct HoleArgs {
    /// Hole shape, e.g. `disk:R=1` or `ellipse:a1=2,a2=1`.
    #[arg(long)]
    pub domain: Option<String>,
    /// Background density.
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    #[arg(long, default_value_t = 2.0)]
    pub beta: f64,
    /// Also evaluate the energy by quadrature.
    #[arg(long)]
    pub oracle: bool,
    /// Counting-tail exponent: `gamma=3,alpha=1,R=10`.
    #[arg(long)]
    pub tail: Option<String>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// ginibre | elliptic | induced | contour | sinh
    #[arg(long)]
    pub ensemble: Option<String>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub sweeps: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub chains: Option<usize>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Contour map spec.
    #[arg(long)]
    pub map: Option<String>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub l: Option<f64>,
    /// CSV file for the retained configurations.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// TOML configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Linear statistics whose covariance is estimated, e.g. `re:scale=5.66`.
    #[arg(long)]
    pub f: Option<String>,
    #[arg(long)]
    pub g: Option<String>,
    /// Also report the exact log partition function and its prediction when known.
    #[arg(long)]
    pub partition: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SuiteArg {
    Quick,
    Full,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::Quick)]
    pub suite: SuiteArg,
}

/// Exit code plus the record describing the outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandResult {
    pub exit_code: i32,
    pub record: Value,
    /// Rendered output for standard output.
    pub stdout: String,
    /// Diagnostic text for standard error.
    pub stderr: String,
}

/// Parse `argv` (including the program name) and run the command.
pub fn run_command<I, S>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let json_requested = argv.iter().any(|a| a == "--json");
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return CommandResult { exit_code: 0, record: Value::Null, stdout: e.to_string(), stderr: String::new() };
            }
            let err = CliError::arg(e.to_string().trim().to_string());
            return error_result(&err, json_requested);
        }
    };
    let json = cli.json;
    match dispatch(cli.command) {
        Ok((record, code)) => {
            let stdout = if json { to_json(&record) + "\n" } else { to_text(&record) };
            CommandResult { exit_code: code, record, stdout, stderr: String::new() }
        }
        Err(e) => error_result(&e, json),
    }
}

fn error_result(e: &CliError, json: bool) -> CommandResult {
    let record = json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
    let stdout = if json { to_json(&record) + "\n" } else { String::new() };
    CommandResult { exit_code: e.exit_code(), record, stdout, stderr: format!("error: {e}\n") }
}

fn dispatch(cmd: Command) -> CliResult<(Value, i32)> {
    let rec = match cmd {
        Command::Potential(a) => potential(a)?,
        Command::Energy(a) => energy(a)?,
        Command::Coeffs(a) => coeffs(a)?,
        Command::Surface(a) => surface(a)?,
        Command::Green(a) => green(a)?,
        Command::Capacity(a) => capacity(a)?,
        Command::Droplet(a) => droplet(a)?,
        Command::Fluct(a) => fluct(a)?,
        Command::Riesz(a) => riesz(a)?,
        Command::Balayage(a) => balayage(a)?,
        Command::Hole(a) => hole(a)?,
        Command::Sample(a) => sample(a)?,
        Command::Check(a) => return check(a),
    };
    Ok((rec.into_value(), 0))
}

fn potential(a: PotentialArgs) -> CliResult<Record> {
    let dom = parse_domain(&a.domain)?;
    let p = parse_point(&a.point)?;
    let mut r = Record::new("potential");
    r.set("inputs", json!({ "domain": a.domain, "point": nums(&p) }));
    match dom.background_potential(&p) {
        Ok(v) => {
            r.setf("value", v).set("method", "closed form").setf("tolerance", 0.0);
            if a.oracle {
                let o = dom.potential_oracle(&p, a.tol)?;
                r.set("reference", json!({ "value": num(o.value), "est_error": num(o.est_error), "source": "quadrature" }));
            }
        }
        Err(elstat_core::Error::UnsupportedRegion(_)) => {
            let o = dom.potential_oracle(&p, a.tol)?;
            r.setf("value", o.value).set("method", "quadrature").setf("tolerance", o.est_error);
        }
        Err(e) => return Err(e.into()),
    }
    Ok(r)
}

fn energy(a: EnergyArgs) -> CliResult<Record> {
    let dom = parse_domain(&a.domain)?;
    let mut r = Record::new("energy");
    r.set("inputs", json!({ "domain": a.domain, "points": a.points }));
    match dom.self_energy() {
        Ok(v) => r.setf("self_energy", v),
        Err(_) => r.set("self_energy", Value::Null),
    };
    if let Some(pts) = &a.points {
        let pts = parse_points(pts)?;
        let v = dom.interaction_energy(&pts)?;
        r.setf("value", v).set("method", "closed form").setf("tolerance", 0.0);
    }
    Ok(r)
}

fn coeffs(a: CoeffsArgs) -> CliResult<Record> {
    let axes = parse_point(&a.axes)?;
    let c = hyperellipsoid_coefficients(&axes, a.n)?;
    let d = axes.len() as u32;
    let k = Kernel::coulomb(d);
    let vol = elstat_core::specfun::unit_ball_volume(d) * axes.iter().product::<f64>();
    let target = a.n / vol * k.c_d() * k.chi_d() / 2.0;
    let mut r = Record::new("coeffs");
    r.set("inputs", json!({ "axes": nums(&axes), "n": num(a.n) }))
        .set("value", json!({ "alpha0": num(c.alpha0), "alpha": nums(&c.alpha) }))
        .setf("alpha_sum", c.alpha.iter().sum())
        .setf("sum_rule", target)
        .set("method", "adaptive quadrature of the λ-integrals")
        .setf("tolerance", 1e-12);
    Ok(r)
}

fn required<T>(v: Option<T>, what: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::arg(format!("missing --{what}")))
}

fn surface(a: SurfaceArgs) -> CliResult<Record> {
    let mut r = Record::new("surface");
    let (value, method) = match a.kind {
        SurfaceKind::Density | SurfaceKind::Potential => {
            let axes = parse_point(&required(a.axes.clone(), "axes")?)?;
            let p = parse_point(&required(a.point.clone(), "point")?)?;
            r.set("inputs", json!({ "axes": nums(&axes), "q": num(a.q), "point": nums(&p) }));
            if matches!(a.kind, SurfaceKind::Density) {
                (ellipsoid_surface_density(&axes, a.q, &p)?, "closed form")
            } else {
                (ellipsoid_surface_potential(&axes, a.q, &p)?, "λ-integral quadrature")
            }
        }
        SurfaceKind::Shell => {
            let d = required(a.d, "d")?;
            let radius = required(a.radius, "radius")?;
            let p = parse_point(&required(a.point.clone(), "point")?)?;
            r.set("inputs", json!({ "d": d, "radius": num(radius), "q": num(a.q), "point": nums(&p) }));
            (shell_potential(d, radius, a.q, &p)?, "closed form")
        }
        SurfaceKind::Projected => {
            let d = required(a.d, "d")?;
            let radius = required(a.radius, "radius")?;
            let t = required(a.t, "t")?;
            r.set("inputs", json!({ "d": d, "radius": num(radius), "t": num(t) }));
            (projected_potential(d, radius, t)?, "adaptive quadrature")
        }
    };
    r.setf("value", value).set("method", method);
    Ok(r)
}

fn green(a: GreenArgs) -> CliResult<Record> {
    let s = Spec::parse(&a.domain)?;
    let z = parse_point(&a.z)?;
    let w = parse_point(&a.w)?;
    let value = match s.name.as_str() {
        "sphere" | "halfspace" => {
            let dom = if s.name == "sphere" {
                s.only(&["R"])?;
                SpatialDomain::Sphere { radius: s.f64_or("R", 1.0)? }
            } else {
                SpatialDomain::HalfSpace
            };
            let to3 = |v: &[f64]| -> CliResult<[f64; 3]> {
                v.try_into().map_err(|_| CliError::arg("spatial Green functions need 3D points"))
            };
            green3d(dom, &to3(&z)?, &to3(&w)?)?
        }
        _ => {
            let dom = match s.name.as_str() {
                "disk" => {
                    s.only(&["R"])?;
                    PlanarDomain::Disk { radius: s.f64_or("R", 1.0)? }
                }
                "halfplane" => PlanarDomain::HalfPlane,
                _ => PlanarDomain::Mapped(parse_map(&a.domain)?),
            };
            green_two_point(&dom, parse_complex(&a.z)?, parse_complex(&a.w)?)?
        }
    };
    let mut r = Record::new("green");
    r.set("inputs", json!({ "domain": a.domain, "z": nums(&z), "w": nums(&w) }))
        .setf("value", value)
        .set("method", "closed form / conformal transport")
        .setf("tolerance", 1e-12);
    Ok(r)
}

fn capacity(a: CapacityArgs) -> CliResult<Record> {
    let map = parse_map(&a.map)?;
    let mut r = Record::new("capacity");
    r.set("inputs", json!({ "map": a.map, "point": a.point, "boundary": a.boundary }))
        .setf("value", map.capacity())
        .setf("capacity", map.capacity())
        .setf("robin", map.robin())
        .setf("area", map.area())
        .set("method", "leading Laurent coefficient");
    if let Some(p) = &a.point {
        let g = green_infinity(&map, parse_complex(p)?)?;
        r.setf("green_infinity", g.g);
    }
    if let Some(p) = &a.boundary {
        r.setf("equilibrium_density", surface_density(&map, parse_complex(p)?)?);
    }
    Ok(r)
}

fn droplet(a: DropletArgs) -> CliResult<Record> {
    let s = Spec::parse(&a.potential)?;
    let mut r = Record::new("droplet");
    r.set("inputs", json!({ "potential": a.potential }));
    match s.name.as_str() {
        "quadratic" => {
            s.only(&["alpha", "area"])?;
            let m = quadratic_droplet(s.f64("alpha")?, s.f64_or("area", std::f64::consts::PI)?)?;
            let coeffs: Vec<Value> = m.coeffs().iter().map(|c| json!([num(c.re), num(c.im)])).collect();
            r.set("value", json!({ "scale": num(m.scale()), "coeffs": coeffs }))
                .setf("capacity", m.capacity())
                .setf("area", m.area())
                .set("method", "exterior Laurent map");
        }
        "induced" => {
            s.only(&["alpha"])?;
            let alpha = s.f64("alpha")?;
            if !(alpha > 0.0) {
                return Err(CliError::arg("alpha must be positive"));
            }
            // q(r) = r² − 2α ln r
            let (r0, r1) = droplet_radii(|t| 2.0 * t - 2.0 * alpha / t, alpha.sqrt() * 0.5, (1.0 + alpha).sqrt() * 2.0)?;
            r.set("value", json!([num(r0), num(r1)])).set("method", "bisection on r q'(r)").setf("tolerance", 1e-14);
        }
        other => return Err(CliError::arg(format!("unknown potential '{other}'"))),
    }
    Ok(r)
}

fn fluct(a: FluctArgs) -> CliResult<Record> {
    let mut r = Record::new("fluct");
    match a.mode {
        FluctMode::Circle => {
            let f = Trig::parse(&required(a.f.clone(), "f")?)?;
            let g = Trig::parse(a.g.as_deref().unwrap_or(a.f.as_deref().unwrap_or_default()))?;
            let route = match a.route {
                RouteArg::Quadrature => Route::Quadrature,
                RouteArg::Fourier => Route::Fourier,
            };
            let n_max = f.degree().max(g.degree()) + 1;
            let (fc, gc) = (f.clone(), g.clone());
            let fs = LinearStatistic::new(move |t| fc.eval(t));
            let gs = LinearStatistic::new(move |t| gc.eval(t));
            let (fs, gs) = match route {
                Route::Fourier => (fs.with_fourier(n_max)?, gs.with_fourier(n_max)?),
                Route::Quadrature => (fs, gs),
            };
            let v = covariance_circle(&fs, &gs, a.beta, route)?;
            r.set("inputs", json!({ "mode": "circle", "f": a.f, "g": a.g, "beta": num(a.beta) }))
                .setf("value", v)
                .set("method", format!("{route:?}").to_lowercase())
                .setf("tolerance", 1e-10);
        }
        FluctMode::Mapped => {
            let map = parse_map(&required(a.map.clone(), "map")?)?;
            let f = PlanarStat::parse(&required(a.f.clone(), "f")?)?;
            let g = PlanarStat::parse(a.g.as_deref().unwrap_or(a.f.as_deref().unwrap_or_default()))?;
            let conv = match a.convention {
                ConventionArg::Contour => Convention::Contour,
                ConventionArg::Background => Convention::Background,
                ConventionArg::Interval => Convention::Interval,
            };
            let v = covariance_mapped(&map, |z| f.eval(z), |z| g.eval(z), a.beta, conv)?;
            r.set("inputs", json!({ "mode": "mapped", "map": a.map, "f": a.f, "g": a.g, "beta": num(a.beta) }))
                .setf("value", v)
                .set("method", "trapezoid double contour integral")
                .setf("tolerance", 1e-8);
        }
        FluctMode::Surface => {
            let gs = Spec::parse(&required(a.geometry.clone(), "geometry")?)?;
            let geom = match gs.name.as_str() {
                "disk" => SurfaceGeometry::Disk { radius: gs.f64_or("R", 1.0)? },
                "halfplane" => SurfaceGeometry::HalfPlane,
                "halfspace" => SurfaceGeometry::HalfSpace,
                "ellipse" => SurfaceGeometry::Ellipse { a1: gs.f64("a1")?, a2: gs.f64("a2")? },
                _ => SurfaceGeometry::Mapped(parse_map(a.geometry.as_deref().unwrap_or_default())?),
            };
            let p1 = parse_point(&required(a.p1.clone(), "p1")?)?;
            let p2 = parse_point(&required(a.p2.clone(), "p2")?)?;
            let c = surface_correlation(&geom, a.beta, &p1, &p2)?;
            r.set("inputs", json!({ "mode": "surface", "geometry": a.geometry, "p1": nums(&p1), "p2": nums(&p2), "beta": num(a.beta) }))
                .setf("value", c.value)
                .set("conjectural", c.conjectural)
                .set("method", "closed form");
        }
        FluctMode::Subblock => {
            let n = required(a.n, "n")?;
            let p1 = parse_point(&required(a.p1.clone(), "p1")?)?;
            let p2 = parse_point(&required(a.p2.clone(), "p2")?)?;
            let (&t1, &t2) = (p1.first().ok_or_else(|| CliError::arg("empty --p1"))?, p2.first().ok_or_else(|| CliError::arg("empty --p2"))?);
            let s = subblock_smoothed(n, t1, t2)?;
            r.set("inputs", json!({ "mode": "subblock", "n": n, "theta": num(t1), "theta2": num(t2) }))
                .setf("value", s.edge)
                .setf("exact", s.exact)
                .setf("bulk", s.bulk)
                .set("method", "radial double quadrature");
        }
    }
    Ok(r)
}

fn riesz(a: RieszArgs) -> CliResult<Record> {
    let g = match a.radius {
        Some(radius) => RieszCircle::new(a.s, a.n, radius)?,
        None => RieszCircle::unit_density(a.s, a.n)?,
    };
    let mut r = Record::new("riesz");
    r.set("inputs", json!({ "s": num(a.s), "n": a.n, "radius": num(g.radius()), "x": a.x.map(num) }));
    match a.x {
        Some(x) => {
            let mode = match a.mode {
                PointModeArg::Finite => PointMode::FiniteN,
                PointModeArg::Limit => PointMode::Limit,
            };
            r.setf("value", g.point_energy(x, mode)?).set("method", format!("{mode:?}"));
        }
        None => {
            let e = g.static_energy();
            r.set("value", e.exact.map_or(Value::Null, num))
                .setf("asymptotic", e.asymptotic)
                .setf("background_potential", g.background_potential())
                .set("method", "pairwise lattice sum");
        }
    }
    Ok(r)
}

fn body_potential(dom: &UniformDomain, p: &[f64]) -> CliResult<f64> {
    match dom.background_potential(p) {
        Ok(v) => Ok(-v),
        Err(elstat_core::Error::UnsupportedRegion(_)) => Ok(-dom.potential_oracle(p, 1e-11)?.value),
        Err(e) => Err(e.into()),
    }
}

fn balayage(a: BalayageArgs) -> CliResult<Record> {
    let dom = parse_domain(&a.domain)?;
    let mu = balayage_measure(&dom)?;
    let comps: Vec<Value> = mu
        .components
        .iter()
        .map(|c| match c.curve {
            Curve::Sphere { d, radius } => json!({ "curve": "sphere", "d": d, "radius": num(radius), "mass": num(c.mass) }),
            Curve::Ellipse { a1, a2 } => json!({ "curve": "ellipse", "a1": num(a1), "a2": num(a2), "mass": num(c.mass) }),
        })
        .collect();
    let mut r = Record::new("balayage");
    r.set("inputs", json!({ "domain": a.domain, "point": a.point, "moment": a.moment }))
        .set("components", comps)
        .setf("total_mass", mu.total_mass)
        .set("method", "closed form");
    if let Some(p) = &a.point {
        let p = parse_point(p)?;
        r.setf("value", mu.potential(&p)?);
        r.set("reference", json!({ "value": num(body_potential(&dom, &p)?), "source": "body potential" }));
    }
    if let Some(l) = a.moment {
        let m = exterior_moment(dom.geometry(), l)?;
        r.set("moment", json!([num(m.re), num(m.im)]));
    }
    Ok(r)
}

fn hole(a: HoleArgs) -> CliResult<Record> {
    let mut r = Record::new("hole");
    r.set("inputs", json!({ "domain": a.domain, "rho": num(a.rho), "beta": num(a.beta), "tail": a.tail }));
    if let Some(d) = &a.domain {
        let (g, _) = crate::spec::parse_geometry(d)?;
        let spec = HoleSpec::new(g.clone(), a.rho, a.beta)?;
        r.setf("value", hole_energy(&g)?)
            .setf("gap_exponent", gap_exponent(&spec)?)
            .setf("log_gap_probability", log_gap_probability(&spec)?)
            .set("method", "closed form");
        if a.oracle {
            r.set("reference", json!({ "value": num(hole_energy_quadrature(&g)?), "source": "quadrature" }));
        }
    }
    if let Some(t) = &a.tail {
        let s = Spec::parse(&format!("tail:{t}"))?;
        s.only(&["gamma", "alpha", "R"])?;
        r.setf("tail_exponent", tail_exponent(a.beta, s.f64("gamma")?, s.f64("alpha")?, s.f64("R")?)?);
    }
    if a.domain.is_none() && a.tail.is_none() {
        return Err(CliError::arg("hole needs --domain and/or --tail"));
    }
    Ok(r)
}

fn sample(a: SampleArgs) -> CliResult<Record> {
    let cfg = match &a.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let e = &cfg.ensemble;
    let kind = a.ensemble.clone().or(e.kind.clone()).unwrap_or_else(|| "ginibre".into());
    let beta = a.beta.or(e.beta).unwrap_or(2.0);
    let n = a.n.or(e.n).unwrap_or(32);
    let ensemble = match kind.as_str() {
        "ginibre" => Ensemble::Ginibre,
        "elliptic" => Ensemble::Elliptic { tau: a.tau.or(e.tau).unwrap_or(0.5) },
        "induced" => Ensemble::Induced { alpha: a.alpha.or(e.alpha).unwrap_or(1.0) },
        "contour" => {
            let spec = a.map.clone().or(e.map.clone()).unwrap_or_else(|| "circle:R=1".into());
            Ensemble::Contour { map: parse_map(&spec)? }
        }
        "sinh" => Ensemble::Sinh { c: a.c.or(e.c).unwrap_or(1.0), l: a.l.or(e.l).unwrap_or(2.0 * std::f64::consts::PI) },
        other => return Err(CliError::arg(format!("unknown ensemble '{other}'"))),
    };
    let model = GasModel::new(beta, n, ensemble)?;
    let s = &cfg.sampler;
    let defaults = SamplerConfig::default();
    let sampler = SamplerConfig {
        burn_in_fraction: s.burn_in_fraction.unwrap_or(defaults.burn_in_fraction),
        target_acceptance: s.target_acceptance.unwrap_or(defaults.target_acceptance),
        initial_step: s.initial_step.or(defaults.initial_step),
        thin: s.thin.unwrap_or(defaults.thin),
        chain: 0,
    };
    let statistics = match (&a.f, &a.g) {
        (Some(f), g) => {
            let f = PlanarStat::parse(f)?;
            let g = match g {
                Some(g) => PlanarStat::parse(g)?,
                None => f.clone(),
            };
            Some((f, g))
        }
        (None, Some(_)) => return Err(CliError::arg("--g needs --f")),
        (None, None) => None,
    };
    let req = SampleRequest {
        model: model.clone(),
        sweeps: a.sweeps.or(s.sweeps).unwrap_or(10_000),
        seed: a.seed.or(s.seed).unwrap_or(0),
        chains: a.chains.or(s.chains).unwrap_or(1),
        sampler,
        out: a.out.clone(),
        statistics,
    };
    let summary = run_sample(&req)?;
    let mut r = Record::new("sample");
    r.set(
        "inputs",
        json!({
            "ensemble": kind, "beta": num(beta), "n": n, "sweeps": req.sweeps, "seed": req.seed,
            "chains": req.chains, "burn_in_fraction": num(sampler.burn_in_fraction),
            "target_acceptance": num(sampler.target_acceptance), "thin": sampler.thin,
            "out": a.out.as_ref().map(|p| p.display().to_string()),
            "f": a.f, "g": a.g,
        }),
    );
    if let Value::Object(m) = summary {
        for (k, v) in m {
            r.set(&k, v);
        }
    }
    r.set("method", "single-particle Metropolis");
    if a.partition {
        let exact = exact_log_partition(&model).map(num).unwrap_or(Value::Null);
        let per = log_partition_per_factorial(&model).map(num).unwrap_or(Value::Null);
        let pred = free_energy_prediction(&FreeEnergyCase::from_model(&model)).ok();
        r.set(
            "partition",
            json!({
                "exact_log": exact,
                "includes_factorial": model.ensemble().includes_factorial(),
                "log_over_factorial": per,
                "prediction": pred.map(|p| json!({
                    "n3": p.n3.map(num), "n2_log_n": p.n2_log_n.map(num),
                    "n2": p.n2.map(num), "n_log_n": p.n_log_n.map(num),
                    "leading": num(p.leading(n as f64)),
                })),
            }),
        );
    }
    Ok(r)
}

fn check(a: CheckArgs) -> CliResult<(Value, i32)> {
    let suite = match a.suite {
        SuiteArg::Quick => Suite::Quick,
        SuiteArg::Full => Suite::Full,
    };
    let outcomes = run_suite(suite);
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    let rows: Vec<Value> = outcomes
        .iter()
        .map(|o| json!({ "id": o.id, "name": o.name, "passed": o.passed, "detail": o.detail, "runtime_ms": o.runtime_ms }))
        .collect();
    let mut r = Record::new("check");
    r.set("inputs", json!({ "suite": format!("{:?}", a.suite).to_lowercase() }))
        .set("criteria", rows)
        .set("value", failed == 0)
        .set("failed", failed);
    Ok((r.into_value(), if failed == 0 { 0 } else { 1 }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> CommandResult {
        run_command(std::iter::once("elstat").chain(args.iter().copied()))
    }

    #[test]
    fn records_carry_inputs_and_method() {
        let r = run(&["riesz", "--s", "0", "--n", "8", "--radius", "2"]);
        assert_eq!(r.exit_code, 0);
        assert_eq!(r.record["command"], "riesz");
        assert_eq!(r.record["inputs"]["n"], 8);
        assert!(r.record["method"].is_string());
        assert!(r.stdout.contains("command = riesz"));
    }

    #[test]
    fn exterior_ellipse_falls_back_to_quadrature() {
        let r = run(&["potential", "--domain", "ellipse:a1=2,a2=1", "--point", "3,0"]);
        assert_eq!(r.exit_code, 0);
        assert_eq!(r.record["method"], "quadrature");
    }

    #[test]
    fn numeric_errors_are_reported() {
        let r = run(&["green", "--domain", "disk:R=1", "--z", "0.1,0", "--w", "2,0"]);
        assert_eq!(r.exit_code, 2);
        assert!(r.record["error"]["kind"].is_string());
        let r = run(&["hole"]);
        assert_eq!(r.exit_code, 2);
    }

    #[test]
    fn induced_droplet_is_an_annulus() {
        let r = run(&["droplet", "--potential", "induced:alpha=1"]);
        let v = r.record["value"].as_array().unwrap();
        assert!((v[0].as_f64().unwrap() - 1.0).abs() < 1e-12);
        assert!((v[1].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-12);
    }
}
