//! Argument parsing and subcommand dispatch.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 verification failure.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use calabi_core::calabi::*;
use calabi_core::hyperbolic::*;
use calabi_core::io;
use calabi_core::mesh::SurfaceMesh;
use calabi_core::radial::*;
use calabi_core::*;

use crate::presets;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;

/// Parsed command line.
#[derive(Debug, Parser)]
#[command(name = "calabi", version, about = "Weighted minimal/maximal graphs and the Calabi correspondence")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Validate the configuration and exit without computing.
    #[arg(long, global = true)]
    pub dry_run: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rotational bowl u(0) = u0 of a weighted minimal graph.
    Bowl(BowlArgs),
    /// Rotational winglike solution through (x1, u1) with a vertical tangent.
    Winglike(WinglikeArgs),
    /// Lorentzian bowl with ū(0) = a, ū'(0) = 0.
    Lbowl(LbowlArgs),
    /// Lorentzian profile leaving the axis along the light cone.
    Lwinglike(LwinglikeArgs),
    /// Generating curve of a hyperbolic-type α-maximal surface.
    Hyperbolic(HyperbolicArgs),
    /// Closed-form (tilted) Grim Reaper mesh.
    GrimReaper(GrimReaperArgs),
    /// Euclidean graph → spacelike graph.
    Transform(TransformArgs),
    /// Spacelike graph → Euclidean graph.
    InverseTransform(TransformArgs),
    /// Run a named verification scenario.
    Verify(VerifyArgs),
    /// Revolve a profile CSV (columns x, u) about the vertical axis.
    Revolve(RevolveArgs),
}

#[derive(Debug, Args)]
pub struct ProfileOut {
    /// Output path: CSV profile, or OBJ mesh with --revolve.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the surface of revolution with this many angular samples instead of the profile.
    #[arg(long)]
    pub revolve: Option<usize>,
    /// Also write the transformed generating curve (lambda, theta) as CSV.
    #[arg(long)]
    pub transformed: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BowlArgs {
    #[arg(long, default_value = "linear:1")]
    pub weight: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub u0: f64,
    #[arg(long, default_value_t = 5.0)]
    pub s_max: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub h: f64,
    /// Integrate both branches (x < 0 mirrored in).
    #[arg(long)]
    pub full: bool,
    #[command(flatten)]
    pub output: ProfileOut,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct WinglikeArgs {
    #[arg(long, default_value = "linear:1")]
    pub weight: String,
    #[arg(long)]
    pub x1: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub u1: f64,
    #[arg(long, default_value_t = 5.0)]
    pub s_max: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub h: f64,
    #[command(flatten)]
    pub output: ProfileOut,
    #[command(flatten)]
    pub common: Common,
}

/// `one` or `alpha:<α>` for f(ū) = α/ū.
#[derive(Debug, Clone, Copy)]
pub struct ForcingArg(pub Forcing);

impl FromStr for ForcingArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if s == "one" || s == "1" {
            return Ok(Self(Forcing::One));
        }
        if let Some(a) = s.strip_prefix("alpha:") {
            let alpha: f64 = a.parse().map_err(|_| format!("bad alpha in {s:?}"))?;
            if !alpha.is_finite() {
                return Err(format!("alpha must be finite in {s:?}"));
            }
            return Ok(Self(Forcing::AlphaOverU { alpha }));
        }
        Err(format!("forcing must be `one` or `alpha:<value>`, got {s:?}"))
    }
}

#[derive(Debug, Args)]
pub struct LbowlArgs {
    #[arg(long, default_value = "one")]
    pub forcing: ForcingArg,
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = 10.0)]
    pub r_max: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub h: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub revolve: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Branch {
    Down,
    Up,
}

#[derive(Debug, Args)]
pub struct LwinglikeArgs {
    #[arg(long, default_value = "one")]
    pub forcing: ForcingArg,
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, value_enum, default_value_t = Branch::Down)]
    pub branch: Branch,
    /// Free coefficient of the light-cone seed.
    #[arg(long)]
    pub cubic: Option<f64>,
    #[arg(long, default_value_t = 10.0)]
    pub r_max: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub h: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub revolve: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct HyperbolicArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub u0: f64,
    #[arg(long, default_value_t = 5.0)]
    pub x_extent: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub h: f64,
    /// Write the orbit surface (OBJ, with K attributes) with this many t samples.
    #[arg(long)]
    pub revolve: Option<usize>,
    /// Write the Euclidean partner (OBJ) with this many t samples.
    #[arg(long)]
    pub partner: Option<usize>,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub t_min: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub t_max: f64,
    /// Keep only the uniformly spaced part of the profile in meshes.
    #[arg(long)]
    pub uniform_only: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct GrimReaperArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    pub u0: f64,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub y_min: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub y_max: f64,
    #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
    pub t_min: f64,
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    pub t_max: f64,
    #[arg(long, default_value_t = 41)]
    pub ny: usize,
    #[arg(long, default_value_t = 121)]
    pub nt: usize,
    /// Write the ruled spacelike source instead of the Grim Reaper.
    #[arg(long)]
    pub source: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    /// Source surface: plane, tilted:<a>:<b>, grim-reaper, bowl:<u0>,
    /// lbowl:<a>, ruled:<lambda>:<u0>, or field:<csv path>.
    #[arg(long)]
    pub surface: String,
    #[arg(long, default_value = "minimal")]
    pub weight: String,
    /// x0:x1:nx,y0:y1:ny (ignored for field: sources, which carry their own grid)
    #[arg(long, default_value = "-1:1:41,-1:1:41", allow_hyphen_values = true)]
    pub grid: String,
    /// Invariant report (JSON).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Resampled image graph (CSV field).
    #[arg(long)]
    pub image: Option<PathBuf>,
    /// Image surface on the source lattice (OBJ).
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    /// Absolute tolerance for exact identities.
    #[arg(long, default_value_t = 1e-12)]
    pub algebraic_tol: f64,
    /// C in the discretization tolerance C·h².
    #[arg(long, default_value_t = 200.0)]
    pub discretization_c: f64,
    /// Include boundary nodes in the report maxima.
    #[arg(long)]
    pub include_boundary: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(presets::PRESETS))]
    pub preset: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct RevolveArgs {
    /// Profile CSV with columns including x and u.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 64)]
    pub n_t: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

/// Parse `argv` (program name first), run, and return the exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    par::init_from_env();
    match execute(cfg) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}

fn execute(cfg: RunConfig) -> Result<i32> {
    match cfg.command {
        Command::Bowl(a) => bowl(a),
        Command::Winglike(a) => winglike(a),
        Command::Lbowl(a) => lbowl(a),
        Command::Lwinglike(a) => lwinglike(a),
        Command::Hyperbolic(a) => hyperbolic(a),
        Command::GrimReaper(a) => grim_reaper_cmd(a),
        Command::Transform(a) => transform(a, Direction::EuclidToLorentz),
        Command::InverseTransform(a) => transform(a, Direction::LorentzToEuclid),
        Command::Verify(a) => verify(a),
        Command::Revolve(a) => revolve(a),
    }
}

fn parse_weight(s: &str) -> Result<WeightFunction> {
    s.parse::<WeightFunction>().with_context(|| format!("weight spec {s:?}"))
}

/// `x0:x1:nx,y0:y1:ny`.
pub fn parse_grid(s: &str) -> Result<Grid2D> {
    let axis = |part: &str| -> Result<(f64, f64, usize)> {
        let f: Vec<&str> = part.split(':').collect();
        if f.len() != 3 {
            bail!("axis {part:?} must be lo:hi:n");
        }
        Ok((f[0].trim().parse()?, f[1].trim().parse()?, f[2].trim().parse()?))
    };
    let (xs, ys) = s.split_once(',').ok_or_else(|| anyhow!("grid {s:?} must be x0:x1:nx,y0:y1:ny"))?;
    let ((x0, x1, nx), (y0, y1, ny)) = (axis(xs)?, axis(ys)?);
    Grid2D::spanning(x0, x1, nx, y0, y1, ny).with_context(|| format!("grid spec {s:?}"))
}

fn check_writable(path: &Option<PathBuf>) -> Result<()> {
    if let Some(p) = path {
        let dir = p.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
        if !dir.is_dir() {
            bail!("output directory {} does not exist", dir.display());
        }
    }
    Ok(())
}

fn check_revolve(n: Option<usize>) -> Result<()> {
    match n {
        Some(n) if n < 8 => bail!("--revolve needs at least 8 angular samples, got {n}"),
        _ => Ok(()),
    }
}

/// Write to `path`, or to stdout when absent.
fn emit(path: &Option<PathBuf>, contents: &str) -> Result<()> {
    match path {
        Some(p) => Ok(io::write_file(p, contents)?),
        None => match std::io::stdout().lock().write_all(contents.as_bytes()) {
            // a closed pipe (`calabi ... | head`) is not an error
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
            _ => Ok(()),
        },
    }
}

fn dry(what: String) -> Result<i32> {
    println!("ok: {what}");
    Ok(EXIT_OK)
}

fn write_profile(p: &RadialProfile, out: &ProfileOut) -> Result<()> {
    match out.revolve {
        Some(n) => emit(&out.out, &p.revolve(n)?.to_obj())?,
        None => emit(&out.out, &io::profile_csv(p))?,
    }
    if let Some(path) = &out.transformed {
        io::write_file(path, &io::transformed_csv(&transform_profile(p)?))?;
    }
    for i in p.singular_indices().iter().take(1) {
        eprintln!("note: cos z vanishes at sample {i} (s = {}); the transformed curve is singular there", p.s[*i]);
    }
    Ok(())
}

fn bowl(a: BowlArgs) -> Result<i32> {
    let w = parse_weight(&a.weight)?;
    check_writable(&a.output.out)?;
    check_writable(&a.output.transformed)?;
    check_revolve(a.output.revolve)?;
    if !w.contains(a.u0) {
        bail!("u0 = {} lies outside the domain {} of {w}", a.u0, w.domain());
    }
    if a.common.dry_run {
        return dry(format!("bowl weight={w} u0={} s_max={} h={}", a.u0, a.s_max, a.h));
    }
    let p = if a.full { bowl_profile_full(&w, a.u0, a.s_max, a.h)? } else { bowl_profile(&w, a.u0, a.s_max, a.h)? };
    write_profile(&p, &a.output)?;
    Ok(EXIT_OK)
}

fn winglike(a: WinglikeArgs) -> Result<i32> {
    let w = parse_weight(&a.weight)?;
    check_writable(&a.output.out)?;
    check_writable(&a.output.transformed)?;
    check_revolve(a.output.revolve)?;
    if a.common.dry_run {
        return dry(format!("winglike weight={w} x1={} u1={}", a.x1, a.u1));
    }
    let p = winglike_profile(&w, a.x1, a.u1, a.s_max, a.h)?;
    write_profile(&p, &a.output)?;
    Ok(EXIT_OK)
}

fn write_lorentz(p: &RadialProfile, out: &Option<PathBuf>, revolve: Option<usize>) -> Result<()> {
    match revolve {
        Some(n) => emit(out, &p.revolve(n)?.to_obj()),
        None => emit(out, &io::profile_csv(p)),
    }
}

fn lbowl(a: LbowlArgs) -> Result<i32> {
    check_writable(&a.out)?;
    check_revolve(a.revolve)?;
    if a.common.dry_run {
        return dry(format!("lbowl forcing={:?} a={}", a.forcing.0, a.a));
    }
    write_lorentz(&lorentz_bowl_profile(a.forcing.0, a.a, a.r_max, a.h)?, &a.out, a.revolve)?;
    Ok(EXIT_OK)
}

fn lwinglike(a: LwinglikeArgs) -> Result<i32> {
    check_writable(&a.out)?;
    check_revolve(a.revolve)?;
    if a.common.dry_run {
        return dry(format!("lwinglike forcing={:?} a={} branch={:?}", a.forcing.0, a.a, a.branch));
    }
    let branch = match a.branch {
        Branch::Down => LightConeBranch::Down,
        Branch::Up => LightConeBranch::Up,
    };
    let p = lorentz_winglike_profile(a.forcing.0, a.a, branch, a.r_max, a.h, a.cubic)?;
    write_lorentz(&p, &a.out, a.revolve)?;
    Ok(EXIT_OK)
}

fn hyperbolic(a: HyperbolicArgs) -> Result<i32> {
    check_writable(&a.out)?;
    check_revolve(a.revolve)?;
    check_revolve(a.partner)?;
    if a.revolve.is_some() && a.partner.is_some() {
        bail!("--revolve and --partner both write to --out; pick one");
    }
    if a.common.dry_run {
        return dry(format!("hyperbolic alpha={} u0={} x_extent={} h={}", a.alpha, a.u0, a.x_extent, a.h));
    }
    let mut p = hyperbolic_profile(a.alpha, a.u0, a.x_extent, a.h)?;
    if a.uniform_only {
        p = p.section(p.uniform.clone());
    }
    let t = (a.t_min, a.t_max);
    let text = match (a.revolve, a.partner) {
        (Some(n), _) => hyperbolic_revolve(&p, t, n)?.to_obj(),
        (_, Some(n)) => hyperbolic_partner(&p, t, n)?.to_obj(),
        _ => io::hyperbolic_csv(&p),
    };
    emit(&a.out, &text)?;
    Ok(EXIT_OK)
}

fn grim_reaper_cmd(a: GrimReaperArgs) -> Result<i32> {
    check_writable(&a.out)?;
    if a.common.dry_run {
        return dry(format!("grim-reaper lambda={} u0={}", a.lambda, a.u0));
    }
    let m = if a.source {
        ruled_source(a.lambda, a.u0, (a.y_min, a.y_max), (a.t_min, a.t_max), (a.ny, a.nt))?
    } else {
        grim_reaper(a.lambda, a.u0, (a.y_min, a.y_max), (a.t_min, a.t_max), (a.ny, a.nt))?
    };
    emit(&a.out, &m.to_obj())?;
    Ok(EXIT_OK)
}

/// A parsed `--surface` value.
#[derive(Debug, Clone)]
enum SurfaceSpec {
    Plane,
    Tilted(f64, f64),
    GrimReaper,
    Bowl(f64),
    Lbowl(f64),
    Ruled(f64, f64),
    Field(PathBuf),
}

impl SurfaceSpec {
    fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.splitn(3, ':').collect();
        let num = |i: usize| -> Result<f64> {
            parts.get(i).ok_or_else(|| anyhow!("surface {s:?} is missing a parameter"))?.parse().with_context(|| format!("surface {s:?}"))
        };
        Ok(match parts[0] {
            "plane" => Self::Plane,
            "tilted" => Self::Tilted(num(1)?, num(2)?),
            "grim-reaper" => Self::GrimReaper,
            "bowl" => Self::Bowl(num(1)?),
            "lbowl" => Self::Lbowl(num(1)?),
            "ruled" => Self::Ruled(num(1)?, num(2)?),
            "field" => Self::Field(PathBuf::from(s.split_once(':').map(|x| x.1).unwrap_or(""))),
            other => bail!("unknown surface {other:?}"),
        })
    }

    fn build(&self, grid: &Grid2D, signature: Signature, w: &WeightFunction) -> Result<GraphSurface> {
        let wrong = |name: &str| anyhow!("surface {name} is not available for this direction");
        Ok(match (self, signature) {
            (Self::Plane, _) => GraphSurface::from_fn(*grid, signature, |_, _| 0.0),
            (Self::Tilted(a, b), _) => {
                let (a, b) = (*a, *b);
                GraphSurface::from_fn(*grid, signature, move |x, y| a * x + b * y)
            }
            (Self::GrimReaper, Signature::Euclidean) => GraphSurface::from_fn(*grid, signature, |_, y| -y.cos().ln()),
            (Self::Bowl(u0), Signature::Euclidean) => {
                let r = grid.x_max().abs().max(grid.x(0).abs()).hypot(grid.y_max().abs().max(grid.y(0).abs()));
                let p = bowl_profile(w, *u0, 2.0 * r + 1.0, 1e-3)?;
                profile_to_graph(RadialCurve::Profile(&p), grid)?
            }
            (Self::Lbowl(a), Signature::Lorentzian) => {
                let r = grid.x_max().abs().max(grid.x(0).abs()).hypot(grid.y_max().abs().max(grid.y(0).abs()));
                let forcing = match w.kind {
                    WeightKind::Linear { c: -1.0 } => Forcing::One,
                    WeightKind::LogAlpha { alpha } => Forcing::AlphaOverU { alpha: -alpha },
                    _ => bail!("lbowl needs weight linear:-1 or log:<-alpha>"),
                };
                let p = lorentz_bowl_profile(forcing, *a, r + 0.5, 1e-3)?;
                profile_to_graph(RadialCurve::Profile(&p), grid)?
            }
            (Self::Ruled(l, u0), Signature::Lorentzian) => ruled_source_graph(*l, *u0, grid)?,
            (Self::Field(path), _) => read_field(path, signature)?,
            (Self::GrimReaper, _) => return Err(wrong("grim-reaper")),
            (Self::Bowl(_), _) => return Err(wrong("bowl")),
            (Self::Lbowl(_), _) => return Err(wrong("lbowl")),
            (Self::Ruled(..), _) => return Err(wrong("ruled")),
        })
    }
}

/// Read a field CSV (x, y, value[, valid]) written row-major on a uniform grid.
fn read_field(path: &Path, signature: Signature) -> Result<GraphSurface> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut rows = Vec::new();
    for (ln, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let v: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .with_context(|| format!("{}:{}", path.display(), ln + 1))?;
        if v.len() < 3 {
            bail!("{}:{}: need x,y,value", path.display(), ln + 1);
        }
        rows.push(v);
    }
    if rows.is_empty() {
        bail!("{} has no data rows", path.display());
    }
    let nx = rows.iter().take_while(|r| r[1] == rows[0][1]).count();
    if nx < 2 || rows.len() % nx != 0 {
        bail!("{} is not a row-major grid", path.display());
    }
    let ny = rows.len() / nx;
    let grid = Grid2D::spanning(rows[0][0], rows[nx - 1][0], nx, rows[0][1], rows[rows.len() - 1][1], ny)?;
    let u: Vec<f64> = rows.iter().map(|r| r[2]).collect();
    let mut s = GraphSurface::new(grid, u, signature)?;
    for (k, r) in rows.iter().enumerate() {
        if r.get(3) == Some(&0.0) || !r[2].is_finite() {
            s.valid[k] = false;
        }
    }
    Ok(s)
}

fn transform(a: TransformArgs, direction: Direction) -> Result<i32> {
    let w = parse_weight(&a.weight)?;
    let grid = parse_grid(&a.grid)?;
    let spec = SurfaceSpec::parse(&a.surface)?;
    for p in [&a.out, &a.image, &a.mesh] {
        check_writable(p)?;
    }
    if !(a.algebraic_tol > 0.0 && a.discretization_c > 0.0) {
        bail!("tolerances must be positive");
    }
    if a.common.dry_run {
        return dry(format!("{direction:?} surface={} weight={w} grid {}x{}", a.surface, grid.nx, grid.ny));
    }
    let signature = match direction {
        Direction::EuclidToLorentz => Signature::Euclidean,
        Direction::LorentzToEuclid => Signature::Lorentzian,
    };
    let s = spec.build(&grid, signature, &w)?;
    let pair = match direction {
        Direction::EuclidToLorentz => forward_transform(&s, &w)?,
        Direction::LorentzToEuclid => inverse_transform(&s, &w)?,
    };
    let r = resample_image_graph(&pair, &ResampleOptions::default())?;
    let tol = Tolerances { algebraic: a.algebraic_tol, discretization: a.discretization_c };
    let report = verify_pair_with(&pair, &r, &tol, a.include_boundary);
    if let Some(p) = &a.image {
        io::write_file(p, &io::field_csv(&r.as_field()))?;
    }
    if let Some(p) = &a.mesh {
        let g = pair.source.grid;
        let m = SurfaceMesh::from_lattice(
            pair.image_points.iter().map(|q| if q.iter().all(|v| v.is_finite()) { *q } else { [0.0; 3] }).collect(),
            g.ny,
            g.nx,
            g.dy,
            g.dx,
            false,
        )?;
        io::write_file(p, &m.to_obj())?;
    }
    emit(&a.out, &(io::to_json(&report)? + "\n"))?;
    Ok(if report.all_pass { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

fn verify(a: VerifyArgs) -> Result<i32> {
    check_writable(&a.out)?;
    if a.common.dry_run {
        return dry(format!("verify preset={}", a.preset));
    }
    let report = presets::run(&a.preset)?;
    emit(&a.out, &(io::to_json(&report)? + "\n"))?;
    for c in report.checks.iter().filter(|c| !c.pass) {
        eprintln!("FAIL {}: {} not in [{}, {}]", c.name, c.value, c.lo, c.hi);
    }
    Ok(if report.all_pass { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

fn revolve(a: RevolveArgs) -> Result<i32> {
    check_writable(&a.out)?;
    check_revolve(Some(a.n_t))?;
    let text = std::fs::read_to_string(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap_or("").split(',').map(str::trim).collect();
    let col = |name: &str| header.iter().position(|h| *h == name).ok_or_else(|| anyhow!("{} has no column {name:?}", a.input.display()));
    let (ix, iu) = (col("x")?, col("u")?);
    if a.common.dry_run {
        return dry(format!("revolve {} n_t={}", a.input.display(), a.n_t));
    }
    let (mut x, mut u) = (Vec::new(), Vec::new());
    for (ln, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        let get = |i: usize| -> Result<f64> {
            f.get(i).ok_or_else(|| anyhow!("line {}: short row", ln + 2))?.trim().parse::<f64>().with_context(|| format!("line {}", ln + 2))
        };
        x.push(get(ix)?);
        u.push(get(iu)?);
    }
    emit(&a.out, &SurfaceMesh::revolve(&x, &u, a.n_t)?.to_obj())?;
    Ok(EXIT_OK)
}
