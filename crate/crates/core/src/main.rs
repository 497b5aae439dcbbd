use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use graphcode::datasets::{
    density_scores, gen_orbit, gen_process, gen_shapes, rips_bifiltration, OrbitStart, PointCloud,
    ProcessKind, ProcessParams, ShapeParams,
};
use graphcode::formats::{
    attach_representatives, read_graphcode, read_point_cloud, write_graphcode, write_manifest,
    write_point_cloud, write_representatives, write_simplicial, CloudManifest,
};
use graphcode::gcode::{assign_slices_with, threshold_filter, SliceMode};
use graphcode::oracle::{betti_at, ORACLE_ROW_LIMIT};
use graphcode::pipeline::{parse_input, Input, InputFormat, Prepared, PrimaryParameter};
use graphcode::{Error, Result};

#[derive(Parser)]
#[command(
    name = "graphcode",
    version,
    about = "Graphcodes of two-parameter persistent homology"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a shapes cloud: `class` annuli and `5 - class` disks plus noise.
    GenShapes(GenShapes),
    /// Iterate the linked twist map from a random or given start.
    GenOrbit(GenOrbit),
    /// Sample a planar point process in the unit square.
    GenProcess(GenProcess),
    /// Density-Rips bifiltration of a point cloud.
    BuildFiltration(BuildFiltration),
    /// Compute graphcodes for one or more input files.
    Compute(Compute),
    /// Pointwise Betti numbers, at one grade or on the grade grid.
    Betti(Betti),
    /// Check a graphcode with representatives against the brute-force oracle.
    Verify(Verify),
    /// Time the batched and the per-slice graphcode on one input.
    Bench(Bench),
}

#[derive(Args)]
struct Output {
    /// Output CSV file (only with --count 1).
    #[arg(long, conflicts_with = "out_dir")]
    out: Option<PathBuf>,
    /// Directory for the generated clouds.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of clouds, with seeds `seed, seed + 1, ...`.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    count: u64,
}

#[derive(Args)]
struct GenShapes {
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=4))]
    class: u8,
    #[arg(long, default_value_t = 1000)]
    points: usize,
    #[arg(long, default_value_t = ShapeParams::default().separation)]
    separation: f64,
    #[arg(long, default_value_t = ShapeParams::default().radius_range.0)]
    radius_min: f64,
    #[arg(long, default_value_t = ShapeParams::default().radius_range.1)]
    radius_max: f64,
    #[arg(long, default_value_t = ShapeParams::default().noise_range.0)]
    noise_min: f64,
    #[arg(long, default_value_t = ShapeParams::default().noise_range.1)]
    noise_max: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct GenOrbit {
    #[arg(long)]
    r: f64,
    #[arg(long, default_value_t = 1000)]
    points: usize,
    /// Explicit start instead of a seeded one; needs --y0 as well.
    #[arg(long, requires = "y0")]
    x0: Option<f64>,
    #[arg(long, requires = "x0")]
    y0: Option<f64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct GenProcess {
    /// poisson, matern, strauss or baddeley_silverman
    #[arg(long)]
    kind: ProcessKind,
    #[arg(long, default_value_t = ProcessParams::default().poisson_intensity)]
    intensity: f64,
    #[arg(long, default_value_t = ProcessParams::default().strauss_iterations)]
    strauss_iterations: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct BuildFiltration {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Neighbourhood radius of the density estimate.
    #[arg(long, default_value_t = 0.05)]
    density_radius: f64,
    /// Largest edge length.
    #[arg(long)]
    r_max: f64,
    /// Homology degree the complex is built for; simplices go up to degree + 1.
    #[arg(long, default_value_t = 1)]
    degree: usize,
    #[arg(long)]
    max_simplices: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Auto,
    Presentation,
    Simplicial,
}

impl From<FormatArg> for InputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Auto => InputFormat::Auto,
            FormatArg::Presentation => InputFormat::Presentation,
            FormatArg::Simplicial => InputFormat::Simplicial,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SlicingArg {
    Equidistant,
    Quantile,
}

impl From<SlicingArg> for SliceMode {
    fn from(s: SlicingArg) -> Self {
        match s {
            SlicingArg::Equidistant => SliceMode::Equidistant,
            SlicingArg::Quantile => SliceMode::Quantile,
        }
    }
}

#[derive(Args)]
struct InputOptions {
    #[arg(long, default_value_t = 1)]
    degree: usize,
    /// 2 swaps the two grade coordinates before anything else.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    primary_parameter: u8,
    #[arg(long, value_enum, default_value_t = FormatArg::Auto)]
    format: FormatArg,
}

impl InputOptions {
    fn prepare(&self, path: &Path) -> Result<Prepared> {
        let text = fs::read_to_string(path)?;
        let input = parse_input(&text, self.format.into())?;
        Prepared::new(
            input,
            self.degree,
            PrimaryParameter::from_index(self.primary_parameter)?,
        )
    }
}

#[derive(Args)]
struct Compute {
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[command(flatten)]
    input: InputOptions,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    slices: u64,
    /// Keep nodes with death - birth > threshold.
    #[arg(long, default_value_t = 0.0, value_parser = non_negative)]
    threshold: f64,
    #[arg(long, value_enum, default_value_t = SlicingArg::Equidistant)]
    slicing: SlicingArg,
    /// Also write the unthresholded graphcode and its representatives, for `verify`.
    #[arg(long)]
    keep_representatives: bool,
    /// Leave the node attributes out of the export.
    #[arg(long)]
    no_attributes: bool,
    /// Output directory; defaults to the directory of each input.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Input files processed in parallel.
    #[arg(long, env = "GRAPHCODE_JOBS", default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: u64,
}

#[derive(Args)]
struct Betti {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    options: InputOptions,
    #[arg(long, requires = "y")]
    x: Option<f64>,
    #[arg(long, requires = "x")]
    y: Option<f64>,
}

#[derive(Args)]
struct Verify {
    #[arg(long)]
    input: PathBuf,
    /// An unthresholded graphcode (`*.full.graphcode.json` from `compute --keep-representatives`).
    #[arg(long)]
    graphcode: PathBuf,
    /// Defaults to the `.reps.json` file next to the graphcode.
    #[arg(long)]
    representatives: Option<PathBuf>,
    #[command(flatten)]
    options: InputOptions,
    /// Write the report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct Bench {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    options: InputOptions,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    slices: u64,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    runs: u64,
}

fn non_negative(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 => Ok(v),
        Ok(_) => Err("must be non-negative".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::GenShapes(a) => gen_shapes_cmd(a),
        Command::GenOrbit(a) => gen_orbit_cmd(a),
        Command::GenProcess(a) => gen_process_cmd(a),
        Command::BuildFiltration(a) => build_filtration_cmd(a),
        Command::Compute(a) => compute_cmd(a),
        Command::Betti(a) => betti_cmd(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Bench(a) => bench_cmd(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
    path.with_file_name(format!("{stem}{suffix}"))
}

fn write_cloud(
    path: &Path,
    cloud: &PointCloud,
    generator: &str,
    params: serde_json::Value,
) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, write_point_cloud(&cloud.points))?;
    let manifest = CloudManifest {
        generator: generator.into(),
        label: cloud.label,
        seed: cloud.seed,
        n_points: cloud.points.len(),
        params,
    };
    fs::write(
        with_suffix(path, ".manifest.json"),
        write_manifest(&manifest)?,
    )?;
    Ok(())
}

/// Generates `count` clouds in parallel and writes each next to its manifest.
fn generate<F>(
    output: &Output,
    prefix: &str,
    generator: &str,
    params: serde_json::Value,
    make: F,
) -> Result<ExitCode>
where
    F: Fn(u64) -> Result<PointCloud> + Sync,
{
    let paths: Vec<(u64, PathBuf)> = match (&output.out, &output.out_dir) {
        (Some(out), _) if output.count == 1 => vec![(output.seed, out.clone())],
        (Some(_), _) => {
            return Err(Error::InvalidArgument(
                "--out takes a single cloud; use --out-dir with --count".into(),
            ))
        }
        (None, Some(dir)) => (0..output.count)
            .map(|i| {
                let seed = output.seed + i;
                (seed, dir.join(format!("{prefix}_{seed}.csv")))
            })
            .collect(),
        (None, None) => {
            return Err(Error::InvalidArgument(
                "one of --out or --out-dir is required".into(),
            ))
        }
    };
    paths
        .par_iter()
        .try_for_each(|(seed, path)| write_cloud(path, &make(*seed)?, generator, params.clone()))?;
    Ok(ExitCode::SUCCESS)
}

fn gen_shapes_cmd(a: GenShapes) -> Result<ExitCode> {
    let params = ShapeParams {
        separation: a.separation,
        radius_range: (a.radius_min, a.radius_max),
        noise_range: (a.noise_min, a.noise_max),
        ..ShapeParams::default()
    };
    let class = a.class as usize;
    let json = serde_json::to_value(&params)?;
    generate(
        &a.output,
        &format!("shapes{class}"),
        "shapes",
        json,
        |seed| Ok(gen_shapes(class, a.points, seed, &params)?.cloud),
    )
}

fn gen_orbit_cmd(a: GenOrbit) -> Result<ExitCode> {
    let json = json!({ "r": a.r, "x0": a.x0, "y0": a.y0 });
    let start = a.x0.zip(a.y0);
    if start.is_some() && a.output.count > 1 {
        return Err(Error::InvalidArgument(
            "an explicit start point gives a single orbit".into(),
        ));
    }
    generate(
        &a.output,
        &format!("orbit_r{}", a.r),
        "orbit",
        json,
        |seed| {
            let start = match start {
                Some((x, y)) => OrbitStart::Point(x, y),
                None => OrbitStart::Seed(seed),
            };
            gen_orbit(a.r, a.points, start)
        },
    )
}

fn gen_process_cmd(a: GenProcess) -> Result<ExitCode> {
    let params = ProcessParams {
        poisson_intensity: a.intensity,
        strauss_iterations: a.strauss_iterations,
        ..ProcessParams::default()
    };
    let json = serde_json::to_value(&params)?;
    generate(&a.output, a.kind.name(), a.kind.name(), json, |seed| {
        gen_process(a.kind, &params, seed)
    })
}

fn build_filtration_cmd(a: BuildFiltration) -> Result<ExitCode> {
    let points = read_point_cloud(&fs::read_to_string(&a.input)?)?;
    let scores = density_scores(&points, a.density_radius)?;
    let complex = rips_bifiltration(&points, &scores, a.r_max, a.degree + 1, a.max_simplices)?;
    fs::write(&a.out, write_simplicial(&complex))?;
    Ok(ExitCode::SUCCESS)
}

fn compute_one(a: &Compute, path: &Path) -> Result<()> {
    let prepared = a.input.prepare(path)?;
    let full = prepared.graphcode(a.slices as usize, a.slicing.into(), a.keep_representatives)?;
    let gc = threshold_filter(&full, a.threshold)?;
    let dir = match &a.out_dir {
        Some(d) => d.clone(),
        None => path.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
    fs::write(
        dir.join(format!("{stem}.graphcode.json")),
        write_graphcode(&gc, !a.no_attributes),
    )?;
    if a.keep_representatives {
        fs::write(
            dir.join(format!("{stem}.full.graphcode.json")),
            write_graphcode(&full, false),
        )?;
        fs::write(
            dir.join(format!("{stem}.reps.json")),
            write_representatives(&full)?,
        )?;
    }
    Ok(())
}

fn compute_cmd(a: Compute) -> Result<ExitCode> {
    if let Some(dir) = &a.out_dir {
        fs::create_dir_all(dir)?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.jobs as usize)
        .build()
        .map_err(|e| Error::Internal(e.to_string()))?;
    let results: Vec<Result<()>> =
        pool.install(|| a.inputs.par_iter().map(|p| compute_one(&a, p)).collect());
    let mut failed = false;
    for (path, r) in a.inputs.iter().zip(results) {
        if let Err(e) = r {
            eprintln!("error: {}: {e}", path.display());
            failed = true;
        }
    }
    Ok(if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    })
}

fn distinct(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn betti_cmd(a: Betti) -> Result<ExitCode> {
    let prepared = a.options.prepare(&a.input)?;
    let rows = prepared
        .matrix
        .cap
        .map_or(prepared.matrix.n_rows(), |c| c.base_rows);
    if rows > ORACLE_ROW_LIMIT {
        return Err(Error::TooLarge {
            rows,
            limit: ORACLE_ROW_LIMIT,
        });
    }
    let src = prepared.source();
    let out = match a.x.zip(a.y) {
        Some((x, y)) => json!({ "x": x, "y": y, "betti": betti_at(src, x, y) }),
        None => {
            let grades: Vec<(f64, f64)> = match &prepared.input {
                Input::Simplicial(c) => c.simplices().iter().map(|(_, g)| (g.x, g.y)).collect(),
                Input::Presentation(m) => m
                    .row_grades
                    .iter()
                    .chain(&m.col_grades)
                    .map(|g| (g.x, g.y))
                    .collect(),
            };
            let xs = distinct(grades.iter().map(|g| g.0).collect());
            let ys = distinct(grades.iter().map(|g| g.1).collect());
            let grid: Vec<Vec<usize>> = ys
                .par_iter()
                .map(|&y| xs.iter().map(|&x| betti_at(src, x, y)).collect())
                .collect();
            json!({ "x": xs, "y": ys, "betti": grid })
        }
    };
    println!("{out}");
    Ok(ExitCode::SUCCESS)
}

fn verify_cmd(a: Verify) -> Result<ExitCode> {
    let prepared = a.options.prepare(&a.input)?;
    let mut gc = read_graphcode(&fs::read_to_string(&a.graphcode)?)?;
    let reps = a.representatives.clone().unwrap_or_else(|| {
        let name = a
            .graphcode
            .file_name()
            .unwrap_or_default()
            .to_string_lossy();
        let stem = name
            .strip_suffix(".full.graphcode.json")
            .or_else(|| name.strip_suffix(".graphcode.json"))
            .unwrap_or(&name);
        a.graphcode.with_file_name(format!("{stem}.reps.json"))
    });
    attach_representatives(&mut gc, &fs::read_to_string(&reps)?)?;
    let report = prepared.verify(&gc)?;
    let text = serde_json::to_string_pretty(&ReportOut {
        ok: report.all_ok(),
        report: &report,
    })? + "\n";
    match &a.report {
        Some(path) => fs::write(path, &text)?,
        None => print!("{text}"),
    }
    Ok(if report.all_ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

#[derive(Serialize)]
struct ReportOut<'a, T: Serialize> {
    ok: bool,
    #[serde(flatten)]
    report: &'a T,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn bench_cmd(a: Bench) -> Result<ExitCode> {
    let prepared = a.options.prepare(&a.input)?;
    let s = a.slices as usize;
    let slices = assign_slices_with(&prepared.matrix, s, SliceMode::Equidistant)?;
    let mut batched = Vec::new();
    let mut naive = Vec::new();
    let mut nodes = 0;
    for _ in 0..a.runs {
        let t = Instant::now();
        let b = graphcode::gcode::compute_graphcode_with(&prepared.matrix, &slices, false)?;
        batched.push(t.elapsed().as_secs_f64());
        let t = Instant::now();
        graphcode::oracle::naive_graphcode_with(&prepared.matrix, &slices, false)?;
        naive.push(t.elapsed().as_secs_f64());
        nodes = b.nodes.len();
    }
    let out = json!({
        "input": a.input.display().to_string(),
        "rows": prepared.matrix.n_rows(),
        "columns": prepared.matrix.n_cols(),
        "slices": slices.slices(),
        "runs": a.runs,
        "nodes": nodes,
        "batched_seconds": median(batched.clone()),
        "naive_seconds": median(naive.clone()),
        "batched_runs": batched,
        "naive_runs": naive,
    });
    println!("{out}");
    Ok(ExitCode::SUCCESS)
}
