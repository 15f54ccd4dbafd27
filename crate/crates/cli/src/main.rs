//! Command-line front end. Exit codes: 0 success or certified, 2 rejected
//! by a certificate or check, 1 error.

mod config;
mod files;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use cone_tutte::certify::{self, intersection_free, CertifyError};
use cone_tutte::cone::{self, ConeReport};
use cone_tutte::disk::{self, BoundaryData, DiskBoundaryMap, PolarGrid, ScalarData};
use cone_tutte::extension::{build_extension, ExtensionError};
use cone_tutte::harmonic::{harmonic_embed, BoundaryAssignment};
use cone_tutte::instances::{self, Shape};
use cone_tutte::io::{self, DrawingFile, ExtensionFile, PolygonFile, WeightsFile};
use cone_tutte::Exec;
use log::info;

use config::Config;
use files::{emit, emit_artifact, read_artifact, read_drawing, read_mesh, read_polygon, validate_paths};

#[derive(Parser)]
#[command(name = "cone-tutte", version, about = "Harmonic embeddings into polygons with exact injectivity certificates")]
struct Cli {
    /// TOML run configuration; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every random choice in the run.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Run data-parallel loops sequentially.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the Dirichlet problem: mesh + polygon + weights -> drawing.
    Embed(EmbedArgs),
    /// Certify that a drawing is an embedding (and, with a source, a homeomorphism).
    Certify(CertifyArgs),
    /// Boundary cone condition for a drawing and weights.
    Cones(ConesArgs),
    /// Complete a non-convex drawing to its convex hull with extended weights.
    Extend(PairWithWeights),
    /// Recover positive harmonic weights from a certified drawing.
    RecoverWeights(PairArgs),
    /// Continuous checks on the unit disk.
    #[command(subcommand)]
    Disk(DiskCommand),
    /// Render a drawing, optionally with boundary forces, to SVG.
    Render(RenderArgs),
    /// Generate test inputs.
    #[command(subcommand)]
    Generate(GenerateCommand),
}

#[derive(Args)]
struct EmbedArgs {
    /// Mesh as OFF, mesh JSON or drawing JSON.
    #[arg(long)]
    mesh: PathBuf,
    #[arg(long)]
    polygon: PathBuf,
    /// `uniform`, `random`, `random:SEED:LO:HI` or a weights file.
    #[arg(long)]
    weights: Option<String>,
    /// Boundary vertex mapped to polygon vertex 0 (default: first boundary vertex).
    #[arg(long)]
    start: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the weights used.
    #[arg(long)]
    weights_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CertifyMethod {
    /// Exact pairwise segment oracle plus face orientations.
    Pairwise,
    /// Signs of the linear maps on boundary faces.
    BoundaryDet,
}

#[derive(Args)]
struct CertifyArgs {
    /// Source drawing of the same mesh; omit to certify the target alone.
    #[arg(long)]
    source: Option<PathBuf>,
    #[arg(long)]
    target: PathBuf,
    #[arg(long, value_enum, default_value = "pairwise")]
    method: CertifyMethod,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConesArgs {
    #[arg(long)]
    drawing: PathBuf,
    #[arg(long)]
    weights: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PairArgs {
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    target: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PairWithWeights {
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    target: PathBuf,
    #[arg(long)]
    weights: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    drawing: PathBuf,
    /// Cone report to draw force arrows from.
    #[arg(long, conflicts_with = "weights")]
    cones: Option<PathBuf>,
    /// Compute the cone report from these weights instead.
    #[arg(long)]
    weights: Option<String>,
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long)]
    arrow_scale: Option<f64>,
}

#[derive(Args)]
struct MapSource {
    /// Boundary map JSON.
    #[arg(long, conflicts_with = "polygon", required_unless_present = "polygon")]
    map: Option<PathBuf>,
    /// Polygon traversed at constant speed.
    #[arg(long)]
    polygon: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    angles: Option<usize>,
    #[arg(long)]
    radii: Option<usize>,
}

#[derive(Subcommand)]
enum DiskCommand {
    /// Sampled injectivity of the harmonic extension.
    Rkc {
        #[command(flatten)]
        source: MapSource,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Boundary cone condition of the harmonic extension.
    Cones {
        #[command(flatten)]
        source: MapSource,
        #[arg(long, default_value_t = 1024)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Boundary versus near-boundary Jacobian sign agreement.
    AnCheck {
        #[command(flatten)]
        source: MapSource,
        #[arg(long, default_value_t = 256)]
        samples: usize,
        #[arg(long, default_value_t = 1e-3)]
        probe: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for a non-injective harmonic map onto a non-convex polygon.
    Choquet {
        #[arg(long)]
        polygon: PathBuf,
        /// Smallest slowdown tried.
        #[arg(long, default_value_t = 1.0 / 1048576.0)]
        s_min: f64,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Local monotonicity of the extension of scalar data.
    Monotone {
        /// `sawtooth`, `sin:K` or `tanh:EPS` (jump at pi).
        #[arg(long)]
        family: String,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        delta: f64,
        /// Comma-separated radii.
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the extension on the polar grid to CSV, optionally SVG.
    Sample {
        #[command(flatten)]
        source: MapSource,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PolygonShape {
    Convex,
    L,
    U,
    Star,
}

#[derive(Subcommand)]
enum GenerateCommand {
    /// Random Delaunay mesh of the unit disk, as a drawing.
    Mesh {
        #[arg(long, default_value_t = 200)]
        vertices: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random polygon of the given shape.
    Polygon {
        #[arg(long, value_enum)]
        shape: PolygonShape,
        /// Number of polygon vertices.
        #[arg(long, required_unless_present = "match_mesh", conflicts_with = "match_mesh")]
        corners: Option<usize>,
        /// Use as many vertices as this mesh has boundary vertices.
        #[arg(long)]
        match_mesh: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Outcome of a successful run.
enum Verdict {
    Accepted,
    Rejected,
}

impl From<bool> for Verdict {
    fn from(ok: bool) -> Self {
        if ok {
            Verdict::Accepted
        } else {
            Verdict::Rejected
        }
    }
}

struct Ctx {
    cfg: Config,
    seed: u64,
    exec: Exec,
}

impl Ctx {
    fn weight_scheme_arg(&self, flag: &Option<String>) -> String {
        flag.clone().or_else(|| self.cfg.weights.clone()).unwrap_or_else(|| "uniform".into())
    }

    fn grid(&self, g: &GridArgs) -> PolarGrid {
        let base = self.cfg.grid.unwrap_or_default();
        PolarGrid { angles: g.angles.unwrap_or(base.angles), radii: g.radii.unwrap_or(base.radii) }
    }

    fn boundary_map(&self, s: &MapSource) -> Result<DiskBoundaryMap> {
        match (&s.map, &s.polygon) {
            (Some(p), _) => read_artifact(p),
            (None, Some(p)) => {
                let poly = read_polygon(p)?;
                Ok(DiskBoundaryMap::polygon_arclength(poly.vertices(), -std::f64::consts::PI)?)
            }
            (None, None) => unreachable!("clap requires one source"),
        }
    }
}

fn opt(p: &Option<PathBuf>) -> Option<&Path> {
    p.as_deref()
}

fn inputs<'a>(paths: impl IntoIterator<Item = &'a Option<PathBuf>>) -> Vec<&'a Path> {
    paths.into_iter().filter_map(|p| p.as_deref()).collect()
}

fn run(cli: Cli) -> Result<Verdict> {
    let cfg = Config::load(cli.config.as_deref())?;
    let seed = cli.seed.or(cfg.seed).unwrap_or(0);
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    let ctx = Ctx { cfg, seed, exec };
    info!("seed {seed}, {exec:?}");
    match cli.command {
        Command::Embed(a) => embed(&ctx, a),
        Command::Certify(a) => certify_cmd(a),
        Command::Cones(a) => cones(&ctx, a),
        Command::Extend(a) => extend(&ctx, a),
        Command::RecoverWeights(a) => recover(a),
        Command::Disk(c) => disk_cmd(&ctx, c),
        Command::Render(a) => render(&ctx, a),
        Command::Generate(c) => generate(&ctx, c),
    }
}

fn embed(ctx: &Ctx, a: EmbedArgs) -> Result<Verdict> {
    let scheme = ctx.weight_scheme_arg(&a.weights);
    let mut ins = vec![a.mesh.as_path(), a.polygon.as_path()];
    ins.extend(files::weight_scheme_path(&scheme));
    validate_paths(&ins, &inputs([&a.out, &a.weights_out]))?;
    let tri = read_mesh(&a.mesh)?.triangulation();
    let poly = read_polygon(&a.polygon)?;
    let w = files::weights(&scheme, &tri, ctx.seed)?;
    let start = a.start.or(ctx.cfg.start).unwrap_or_else(|| tri.boundary()[0]);
    let bd = BoundaryAssignment::new(tri.clone(), &poly, start)?;
    let d = harmonic_embed(&w, &bd)?;
    info!("embedded {} vertices", d.coords().len());
    emit_artifact(opt(&a.out), &DrawingFile::from_drawing(&d))?;
    if let Some(p) = &a.weights_out {
        emit_artifact(Some(p), &WeightsFile::from_weights(&w))?;
    }
    Ok(Verdict::Accepted)
}

fn certify_cmd(a: CertifyArgs) -> Result<Verdict> {
    let mut ins = vec![a.target.as_path()];
    ins.extend(a.source.as_deref());
    validate_paths(&ins, &inputs([&a.out]))?;
    let target = read_drawing(&a.target)?;
    let source = a.source.as_deref().map(read_drawing).transpose()?;
    match a.method {
        CertifyMethod::Pairwise => {
            let cert = match &source {
                Some(s) => certify::certify_homeomorphism(s, &target)?,
                None => intersection_free(&target),
            };
            emit_artifact(opt(&a.out), &cert)?;
            Ok(cert.is_certified().into())
        }
        CertifyMethod::BoundaryDet => {
            let source = source.context("--method boundary-det needs --source")?;
            let det = certify::boundary_det_check(&source, &target)?;
            emit_artifact(opt(&a.out), &det)?;
            Ok(det.verdict.into())
        }
    }
}

fn cone_report(ctx: &Ctx, drawing: &cone_tutte::mesh::PlanarDrawing, scheme: &str) -> Result<ConeReport> {
    let w = files::weights(scheme, drawing.triangulation(), ctx.seed)?;
    Ok(cone::cone_condition_report(drawing, &w)?)
}

fn cones(ctx: &Ctx, a: ConesArgs) -> Result<Verdict> {
    let scheme = ctx.weight_scheme_arg(&a.weights);
    let mut ins = vec![a.drawing.as_path()];
    ins.extend(files::weight_scheme_path(&scheme));
    validate_paths(&ins, &inputs([&a.out]))?;
    let d = read_drawing(&a.drawing)?;
    let report = cone_report(ctx, &d, &scheme)?;
    emit_artifact(opt(&a.out), &report)?;
    Ok(report.verdict.into())
}

fn extend(ctx: &Ctx, a: PairWithWeights) -> Result<Verdict> {
    let scheme = ctx.weight_scheme_arg(&a.weights);
    let mut ins = vec![a.source.as_path(), a.target.as_path()];
    ins.extend(files::weight_scheme_path(&scheme));
    validate_paths(&ins, &inputs([&a.out]))?;
    let source = read_drawing(&a.source)?;
    let target = read_drawing(&a.target)?;
    let w = files::weights(&scheme, target.triangulation(), ctx.seed)?;
    match build_extension(&source, &target, &w) {
        Ok(ext) => {
            info!("{} pockets, {} new faces", ext.pockets.len(), ext.delta_faces.len());
            emit_artifact(opt(&a.out), &ExtensionFile::from_extension(&ext))?;
            Ok(Verdict::Accepted)
        }
        Err(e @ ExtensionError::ConeConditionViolated(_)) => {
            eprintln!("rejected: {e}");
            Ok(Verdict::Rejected)
        }
        Err(e) => Err(e.into()),
    }
}

fn recover(a: PairArgs) -> Result<Verdict> {
    validate_paths(&[&a.source, &a.target], &inputs([&a.out]))?;
    let source = read_drawing(&a.source)?;
    let target = read_drawing(&a.target)?;
    let cert = certify::certify_homeomorphism(&source, &target)?;
    if !cert.is_certified() {
        eprintln!("rejected: target is not a certified homeomorphic drawing");
        eprint!("{}", io::to_json(&cert)?);
        return Ok(Verdict::Rejected);
    }
    match certify::recover_weights(&source, &target) {
        Ok(rec) => {
            emit_artifact(opt(&a.out), &WeightsFile::from_weights(&rec.weights))?;
            Ok(Verdict::Accepted)
        }
        Err(e @ CertifyError::RecoveryFailed { .. }) => {
            eprintln!("rejected: {e}");
            Ok(Verdict::Rejected)
        }
        Err(e) => Err(e.into()),
    }
}

/// Scalar boundary data for the monotonicity check.
fn scalar_family(scheme: &str) -> Result<Box<dyn BoundaryData>> {
    let pi = std::f64::consts::PI;
    if scheme == "sawtooth" {
        return Ok(Box::new(ScalarData::with_jumps(|t| t, &[-pi])));
    }
    if let Some(k) = scheme.strip_prefix("sin:") {
        let k: f64 = k.parse().context("sin frequency")?;
        return Ok(Box::new(ScalarData::smooth(move |t| (k * t).sin())));
    }
    if let Some(eps) = scheme.strip_prefix("tanh:") {
        let eps: f64 = eps.parse().context("tanh width")?;
        return Ok(Box::new(ScalarData::with_jumps(move |t| (t / eps).tanh(), &[-pi])));
    }
    anyhow::bail!("unknown family {scheme}; expected sawtooth, sin:K or tanh:EPS")
}

fn default_radii() -> Vec<f64> {
    (1..=19).map(|k| k as f64 / 20.0).chain([0.99, 0.999]).collect()
}

fn map_inputs(s: &MapSource) -> Vec<&Path> {
    inputs([&s.map, &s.polygon])
}

fn disk_cmd(ctx: &Ctx, c: DiskCommand) -> Result<Verdict> {
    let opts = &ctx.cfg.poisson;
    match c {
        DiskCommand::Rkc { source, grid, out } => {
            validate_paths(&map_inputs(&source), &inputs([&out]))?;
            let report = disk::rkc_check(&ctx.boundary_map(&source)?, ctx.grid(&grid), opts, ctx.exec)?;
            emit_artifact(opt(&out), &report)?;
            Ok(report.pass.into())
        }
        DiskCommand::Cones { source, samples, out } => {
            validate_paths(&map_inputs(&source), &inputs([&out]))?;
            let scan = disk::cone_condition_scan(&ctx.boundary_map(&source)?, samples, opts, ctx.exec)?;
            emit_artifact(opt(&out), &scan)?;
            Ok(scan.pass.into())
        }
        DiskCommand::AnCheck { source, samples, probe, out } => {
            validate_paths(&map_inputs(&source), &inputs([&out]))?;
            let report = disk::an_check(&ctx.boundary_map(&source)?, samples, probe, opts, ctx.exec)?;
            emit_artifact(opt(&out), &report)?;
            Ok(report.agree.into())
        }
        DiskCommand::Choquet { polygon, s_min, grid, out } => {
            validate_paths(&[&polygon], &inputs([&out]))?;
            let poly = read_polygon(&polygon)?;
            let scan = disk::choquet_witness_scan(&poly, s_min, ctx.grid(&grid), 1024, opts, ctx.exec)?;
            if let Some(w) = &scan.witness {
                info!("witness at s = {}, image {:?}", w.slowdown, w.image);
            }
            emit_artifact(opt(&out), &scan)?;
            Ok(scan.witness.is_some().into())
        }
        DiskCommand::Monotone { family, c, delta, radii, out } => {
            validate_paths(&[], &inputs([&out]))?;
            let f = scalar_family(&family)?;
            let radii = radii.unwrap_or_else(default_radii);
            let report = disk::monotonicity_check(f.as_ref(), c, delta, &radii, opts, ctx.exec)?;
            emit_artifact(opt(&out), &report)?;
            Ok(report.threshold.is_some().into())
        }
        DiskCommand::Sample { source, grid, csv, svg } => {
            validate_paths(&map_inputs(&source), &inputs([&csv, &svg]))?;
            let grid = ctx.grid(&grid);
            let samples = disk::sample_grid(&ctx.boundary_map(&source)?, grid, opts, ctx.exec)?;
            emit(opt(&csv), &io::write_samples_csv(&samples)?)?;
            if let Some(p) = &svg {
                emit(Some(p), &io::emit_disk_svg(&samples, grid, &ctx.cfg.svg))?;
            }
            Ok(Verdict::Accepted)
        }
    }
}

fn render(ctx: &Ctx, a: RenderArgs) -> Result<Verdict> {
    let mut ins = vec![a.drawing.as_path()];
    ins.extend(a.cones.as_deref());
    if let Some(scheme) = &a.weights {
        ins.extend(files::weight_scheme_path(scheme));
    }
    validate_paths(&ins, &inputs([&a.svg]))?;
    let d = read_drawing(&a.drawing)?;
    let report = match (&a.cones, &a.weights) {
        (Some(p), _) => Some(read_artifact::<ConeReport>(p)?),
        (None, Some(scheme)) => Some(cone_report(ctx, &d, scheme)?),
        (None, None) => None,
    };
    let mut svg_opts = ctx.cfg.svg.clone();
    if let Some(s) = a.arrow_scale {
        svg_opts.arrow_scale = s;
    }
    emit(opt(&a.svg), &io::emit_svg(&d, report.as_ref(), &svg_opts))?;
    Ok(Verdict::Accepted)
}

fn generate(ctx: &Ctx, c: GenerateCommand) -> Result<Verdict> {
    match c {
        GenerateCommand::Mesh { vertices, out } => {
            validate_paths(&[], &inputs([&out]))?;
            let d = instances::random_disk_mesh(vertices, ctx.seed)?;
            emit_artifact(opt(&out), &DrawingFile::from_drawing(&d))?;
        }
        GenerateCommand::Polygon { shape, corners, match_mesh, out } => {
            validate_paths(&inputs([&match_mesh]), &inputs([&out]))?;
            let corners = match (corners, &match_mesh) {
                (Some(c), _) => c,
                (None, Some(p)) => read_mesh(p)?.triangulation().boundary().len(),
                (None, None) => unreachable!("clap requires one of them"),
            };
            let poly = match shape {
                PolygonShape::Convex => instances::random_convex_polygon(corners, ctx.seed)?,
                PolygonShape::L => instances::nonconvex_polygon(Shape::L, corners, ctx.seed)?,
                PolygonShape::U => instances::nonconvex_polygon(Shape::U, corners, ctx.seed)?,
                PolygonShape::Star => instances::nonconvex_polygon(Shape::StarNotch, corners, ctx.seed)?,
            };
            emit_artifact(opt(&out), &PolygonFile::from_points(poly.vertices()))?;
        }
    }
    Ok(Verdict::Accepted)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CONE_TUTTE_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(Verdict::Accepted) => ExitCode::SUCCESS,
        Ok(Verdict::Rejected) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
