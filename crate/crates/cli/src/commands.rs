use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;

use entangle_core::analysis::{
    fit_area_law, symmetry_report, FitWindow, SweepPoint, SweepRecord, SymmetryReport,
};
use entangle_core::cubic::{
    exposed_face_area, region_box, region_voxel_sphere, BoxSpec, CubicLattice, CubicSolver,
    RegionMask, WallFaces,
};
use entangle_core::radial::{ir_proximity_sweep, radial_sweep, RadialModel, SphereEntropy};

use crate::output::{csv_artifact, json_artifact, Artifact, Cell};
use crate::{
    resolve_threads, Cli, CliError, Command, CubicArgs, CubicProximityArgs, EinsteinArgs,
    FlatSphereArgs, ProximityCommand, RadialProximityArgs, RegionArg, WallArg, THREADS_ENV,
};

/// Below this chain length the Einstein chain is too coarse for its
/// small-angle region to resemble flat space.
pub const EINSTEIN_SMALL_N: usize = 50;

/// Complement entropies must agree to this absolute tolerance.
pub const COMPLEMENT_TOLERANCE: f64 = 1e-8;

/// What a command wrote and reported. Artifacts computed before a failure
/// are still written.
#[derive(Debug)]
pub struct Outcome {
    pub written: Vec<PathBuf>,
    pub messages: Vec<String>,
    pub warnings: Vec<String>,
    pub status: Result<(), CliError>,
}

impl Outcome {
    fn new() -> Self {
        Self {
            written: Vec::new(),
            messages: Vec::new(),
            warnings: Vec::new(),
            status: Ok(()),
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.status.as_ref().map_or_else(CliError::exit_code, |_| 0)
    }
}

/// Everything recorded in the header of each artifact. The worker count is
/// left out because results do not depend on it.
#[derive(Serialize)]
struct ExperimentConfig<'a, T: Serialize> {
    command: &'a str,
    version: &'a str,
    params: &'a T,
}

fn config<'a, T: Serialize>(command: &'a str, params: &'a T) -> ExperimentConfig<'a, T> {
    ExperimentConfig {
        command,
        version: env!("CARGO_PKG_VERSION"),
        params,
    }
}

/// Runs a parsed command line on its own thread pool and writes the
/// artifacts into `--out-dir`.
pub fn run(cli: Cli) -> Outcome {
    let mut outcome = Outcome::new();
    let env = std::env::var(THREADS_ENV).ok();
    let pool = resolve_threads(cli.threads, env.as_deref()).and_then(|threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))
    });
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            outcome.status = Err(e);
            return outcome;
        }
    };
    let result = pool.install(|| match &cli.command {
        Command::FlatSphere(a) => flat_sphere(a, &mut outcome),
        Command::Einstein(a) => einstein(a, &mut outcome),
        Command::Cubic(a) => cubic(a, &mut outcome),
        Command::Proximity(ProximityCommand::Radial(a)) => radial_proximity(a, &mut outcome),
        Command::Proximity(ProximityCommand::Cubic(a)) => cubic_proximity(a, &mut outcome),
    });
    let (artifacts, status) = match result {
        Ok(a) => (a, Ok(())),
        Err((a, e)) => (a, Err(e)),
    };
    for a in &artifacts {
        match a.write_to(&cli.out_dir) {
            Ok(p) => outcome.written.push(p),
            Err(e) => {
                outcome.status = Err(e);
                return outcome;
            }
        }
    }
    outcome.status = status;
    outcome
}

type CommandResult = Result<Vec<Artifact>, (Vec<Artifact>, CliError)>;

fn fail<E: Into<CliError>>(e: E) -> (Vec<Artifact>, CliError) {
    (Vec::new(), e.into())
}

fn sweep_rows(entries: &[SphereEntropy], with_chi: bool) -> Vec<Vec<Cell>> {
    entries
        .iter()
        .map(|e| {
            let mut row = vec![Cell::Int(e.sphere.boundary), Cell::Num(e.sphere.radius)];
            if with_chi {
                row.push(Cell::Num(e.sphere.chi.unwrap_or(0.0)));
                row.push(Cell::Num(e.sphere.areal_radius));
            }
            row.extend([
                Cell::Num(e.sphere.area_over_4a2()),
                Cell::Num(e.value()),
                Cell::Num(e.tail_fraction()),
                Cell::Int(e.series.l_max()),
            ]);
            row
        })
        .collect()
}

fn sweep_record(model: &RadialModel, entries: &[SphereEntropy]) -> Result<SweepRecord, CliError> {
    let points = entries
        .iter()
        .filter(|e| e.sphere.area > 0.0)
        .map(|e| SweepPoint {
            index: e.sphere.boundary,
            radius: e.sphere.radius,
            area_over_4a2: e.sphere.area_over_4a2(),
            entropy: e.value(),
            tail_fraction: e.tail_fraction(),
        })
        .collect();
    Ok(SweepRecord::new(
        model.kind().name(),
        model.sites(),
        points,
    )?)
}

#[derive(Serialize)]
struct FitReport<'a> {
    record: &'a str,
    sites: usize,
    fit: &'a entangle_core::analysis::AreaLawFit,
    relative_intercept: f64,
    max_relative_residual: f64,
}

fn fit_report<'a>(
    record: &'a SweepRecord,
    fit: &'a entangle_core::analysis::AreaLawFit,
) -> FitReport<'a> {
    FitReport {
        record: &record.model,
        sites: record.sites,
        fit,
        relative_intercept: fit.relative_intercept(),
        max_relative_residual: fit.max_relative_residual(),
    }
}

pub fn flat_sphere(args: &FlatSphereArgs, out: &mut Outcome) -> CommandResult {
    let tol = args.numeric.tolerances().map_err(fail)?;
    let model = RadialModel::flat(args.n_sites).map_err(fail)?;
    let ns = args.radii.values();
    let entries = radial_sweep(&model, &ns, &args.lsum.policy(), &tol).map_err(fail)?;
    let cfg = config("flat-sphere", args);
    let csv = csv_artifact(
        "flat_sphere.csv",
        &cfg,
        &["n", "r", "A_over_4a2", "S", "tail_fraction", "l_cut"],
        &sweep_rows(&entries, false),
    )
    .map_err(fail)?;
    let mut artifacts = vec![csv];
    let window = match args.fit_window {
        Some(w) => FitWindow::indices(*w.sorted().start(), *w.sorted().end()),
        None => FitWindow::indices(10, args.n_sites.saturating_sub(10)),
    };
    let fitted = sweep_record(&model, &entries).and_then(|r| Ok((fit_area_law(&r, window)?, r)));
    match fitted {
        Ok((fit, record)) => {
            out.messages.push(format!(
                "flat sphere N={}: kappa={:.6} intercept={:.4} ({} points)",
                args.n_sites, fit.slope, fit.intercept, fit.points
            ));
            match json_artifact("flat_sphere_fit.json", &cfg, &fit_report(&record, &fit)) {
                Ok(a) => artifacts.push(a),
                Err(e) => return Err((artifacts, e)),
            }
            Ok(artifacts)
        }
        Err(e) => Err((artifacts, e)),
    }
}

pub fn einstein(args: &EinsteinArgs, out: &mut Outcome) -> CommandResult {
    let tol = args.numeric.tolerances().map_err(fail)?;
    let model = RadialModel::einstein(args.n_sites).map_err(fail)?;
    if args.n_sites < EINSTEIN_SMALL_N {
        out.warnings.push(format!(
            "N = {} is small: few boundaries lie in the nearly flat region, so the \
             comparison with flat space is weak",
            args.n_sites
        ));
    }
    let ns = match args.radii {
        Some(r) => r.values(),
        None => (1..args.n_sites).collect(),
    };
    let entries = radial_sweep(&model, &ns, &args.lsum.policy(), &tol).map_err(fail)?;
    let cfg = config("einstein", args);
    let mut artifacts = vec![csv_artifact(
        "einstein.csv",
        &cfg,
        &[
            "n",
            "r",
            "chi",
            "areal_radius",
            "A_over_4a2",
            "S",
            "tail_fraction",
            "l_cut",
        ],
        &sweep_rows(&entries, true),
    )
    .map_err(fail)?];

    let record = match sweep_record(&model, &entries) {
        Ok(r) => r,
        Err(e) => return Err((artifacts, e)),
    };
    let symmetry: SymmetryReport = symmetry_report(&record);
    match json_artifact("einstein_symmetry.json", &cfg, &symmetry) {
        Ok(a) => artifacts.push(a),
        Err(e) => return Err((artifacts, e)),
    }
    match fit_area_law(&record, FitWindow::min_area(args.fit_min_area)) {
        Ok(fit) => {
            out.messages.push(format!(
                "einstein N={}: kappa={:.6} intercept={:.4} ({} points)",
                args.n_sites, fit.slope, fit.intercept, fit.points
            ));
            match json_artifact("einstein_fit.json", &cfg, &fit_report(&record, &fit)) {
                Ok(a) => artifacts.push(a),
                Err(e) => return Err((artifacts, e)),
            }
        }
        Err(e) => return Err((artifacts, e.into())),
    }
    out.messages.push(format!(
        "mirror symmetry: max relative asymmetry {:.3e} over {} pairs",
        symmetry.max_asymmetry,
        symmetry.pairs.len()
    ));
    if !symmetry.pass {
        let why = if symmetry.no_pairs {
            "no mirror pairs in the sweep".to_string()
        } else {
            format!(
                "asymmetry {:.3e} at {:?} exceeds {:e}",
                symmetry.max_asymmetry, symmetry.worst, symmetry.threshold
            )
        };
        return Err((artifacts, CliError::CheckFailed(why)));
    }
    Ok(artifacts)
}

struct CubicRow {
    label: String,
    size: f64,
    mask: RegionMask,
}

fn cubic_regions(args: &CubicArgs, lat: &CubicLattice) -> Result<Vec<CubicRow>, CliError> {
    if let Some(path) = &args.region_file {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        let mask = RegionMask::from_rle(&text, args.max_sites)?;
        if mask.dims() != lat.dims() {
            return Err(CliError::Config(format!(
                "region file is for a {:?} lattice, --dims is {:?}",
                mask.dims(),
                lat.dims()
            )));
        }
        return Ok(vec![CubicRow {
            label: path.display().to_string(),
            size: mask.count() as f64,
            mask,
        }]);
    }
    match args.region {
        Some(RegionArg::Box { first, last }) => (first.min(last)..=first.max(last))
            .map(|edge| {
                Ok(CubicRow {
                    label: format!("box{edge}"),
                    size: edge as f64,
                    mask: region_box(lat, BoxSpec::centered(lat, edge))?,
                })
            })
            .collect(),
        Some(RegionArg::Sphere { first, last }) => (first.min(last)..=first.max(last))
            .map(|r| {
                Ok(CubicRow {
                    label: format!("sphere{r}"),
                    size: r as f64,
                    mask: region_voxel_sphere(lat, lat.center(), r as f64)?,
                })
            })
            .collect(),
        None => Err(CliError::Config(
            "one of --region or --region-file is required".into(),
        )),
    }
}

pub fn cubic(args: &CubicArgs, out: &mut Outcome) -> CommandResult {
    let tol = args.numeric.tolerances().map_err(fail)?;
    let lat = CubicLattice::with_limit(args.dims.0, args.max_sites).map_err(fail)?;
    let rows = cubic_regions(args, &lat).map_err(fail)?;
    let walls = match args.walls {
        WallArg::Exclude => WallFaces::Exclude,
        WallArg::Include => WallFaces::Include,
    };
    let solver = CubicSolver::new(tol);
    // One decomposition up front; the masks then only read the cache.
    solver.ground_state(&lat).map_err(fail)?;
    let values: Vec<(f64, Option<f64>)> = rows
        .par_iter()
        .map(|row| {
            let s = solver.region_entropy(&lat, &row.mask)?.value;
            let c = if args.complement {
                Some(solver.region_entropy(&lat, &row.mask.complement())?.value)
            } else {
                None
            };
            Ok((s, c))
        })
        .collect::<Result<_, entangle_core::Error>>()
        .map_err(fail)?;

    let mut header = vec![
        "region",
        "size",
        "sites",
        "exposed_faces",
        "A_over_4a2",
        "S",
    ];
    if args.complement {
        header.push("S_complement");
    }
    let mut points = Vec::new();
    let mut table = Vec::new();
    let mut mismatch = None;
    for (i, (row, (s, c))) in rows.iter().zip(&values).enumerate() {
        let surface = exposed_face_area(&row.mask, walls);
        let mut cells = vec![
            Cell::Text(row.label.clone()),
            Cell::Num(row.size),
            Cell::Int(row.mask.count()),
            Cell::Int(surface.exposed_faces),
            Cell::Num(surface.area_over_4a2()),
            Cell::Num(*s),
        ];
        if let Some(c) = c {
            cells.push(Cell::Num(*c));
            if (s - c).abs() >= COMPLEMENT_TOLERANCE && mismatch.is_none() {
                mismatch = Some(format!("{}: S = {s}, complement {c}", row.label));
            }
        }
        table.push(cells);
        if surface.area > 0.0 {
            points.push(SweepPoint {
                index: i,
                radius: row.size,
                area_over_4a2: surface.area_over_4a2(),
                entropy: *s,
                tail_fraction: 0.0,
            });
        }
    }
    let cfg = config("cubic", args);
    let mut artifacts = vec![csv_artifact("cubic.csv", &cfg, &header, &table).map_err(fail)?];
    for (row, (s, _)) in rows.iter().zip(&values) {
        out.messages.push(format!("{}: S={s:.6}", row.label));
    }
    if points.len() >= 3 {
        let fitted = SweepRecord::new("cubic", lat.sites(), points)
            .and_then(|r| Ok((fit_area_law(&r, FitWindow::default())?, r)));
        match fitted {
            Ok((fit, record)) => {
                out.messages.push(format!(
                    "cubic {:?}: kappa={:.6} intercept={:.4} ({} regions)",
                    lat.dims(),
                    fit.slope,
                    fit.intercept,
                    fit.points
                ));
                match json_artifact("cubic_fit.json", &cfg, &fit_report(&record, &fit)) {
                    Ok(a) => artifacts.push(a),
                    Err(e) => return Err((artifacts, e)),
                }
            }
            Err(e) => return Err((artifacts, e.into())),
        }
    }
    if let Some(m) = mismatch {
        return Err((
            artifacts,
            CliError::CheckFailed(format!("complement entropy differs, {m}")),
        ));
    }
    Ok(artifacts)
}

fn relative_rows(values: &[(usize, f64)], extra: impl Fn(usize) -> Cell) -> Vec<Vec<Cell>> {
    let reference = values.first().map_or(0.0, |v| v.1);
    values
        .iter()
        .map(|&(k, s)| {
            let rel = if reference != 0.0 {
                s / reference - 1.0
            } else {
                0.0
            };
            vec![Cell::Int(k), extra(k), Cell::Num(s), Cell::Num(rel)]
        })
        .collect()
}

pub fn radial_proximity(args: &RadialProximityArgs, out: &mut Outcome) -> CommandResult {
    let tol = args.numeric.tolerances().map_err(fail)?;
    let lengths = args.n_sites.values();
    let values = ir_proximity_sweep(args.n, &lengths, &args.lsum.policy(), &tol).map_err(fail)?;
    let n = args.n;
    let rows = relative_rows(&values, |sites| Cell::Int(sites - n));
    out.messages.push(format!(
        "radial proximity n={}: {} chain lengths",
        args.n,
        values.len()
    ));
    let cfg = config("proximity-radial", args);
    Ok(vec![csv_artifact(
        "proximity_radial.csv",
        &cfg,
        &["N", "gap", "S", "relative_to_first"],
        &rows,
    )
    .map_err(fail)?])
}

pub fn cubic_proximity(args: &CubicProximityArgs, out: &mut Outcome) -> CommandResult {
    let tol = args.numeric.tolerances().map_err(fail)?;
    let lat = CubicLattice::with_limit(args.dims.0, args.max_sites).map_err(fail)?;
    let solver = CubicSolver::new(tol);
    let values = solver
        .wall_proximity_sweep(&lat, args.edge, &args.gaps.values())
        .map_err(fail)?;
    let rows = relative_rows(&values, |_| Cell::Int(args.edge));
    out.messages.push(format!(
        "cubic proximity {:?}, edge {}: {} positions",
        lat.dims(),
        args.edge,
        values.len()
    ));
    let cfg = config("proximity-cubic", args);
    Ok(vec![csv_artifact(
        "proximity_cubic.csv",
        &cfg,
        &["gap", "edge", "S", "relative_to_first"],
        &rows,
    )
    .map_err(fail)?])
}
