//! Command line for the quiver / brane-tiling / toric geometry pipeline.
//!
//! Inputs are quiver or map JSON files (auto-detected by their keys) or
//! the names of built-in models: c3, c3z3, conifold, f0-I, f0-II, dp3.

mod pipeline;
mod polyparse;

use clap::{Parser, Subcommand};
use num::complex::Complex64;
use num::BigRational;
use pipeline::{format_complex, format_float, run_pipeline, PipelineInput, StageSelection};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use tilingforge_core::amoeba::{sample_curve, to_csv, ComplexPoly, GridSpec};
use tilingforge_core::map::{self, CombinatorialMap};
use tilingforge_core::quiver::{parse_rational, validate_quiver, Quiver};
use tilingforge_core::{dessin, fixtures, geometry, kasteleyn, mutation, plethystics, poly};

#[derive(Parser)]
#[command(
    name = "tilingforge",
    about = "Quivers with superpotential, brane tilings, Kasteleyn determinants, toric diagrams, cluster mutation, a-maximization, dessins, plethystics and amoebae",
    version
)]
struct Cli {
    /// Emit machine-readable JSON instead of text where applicable
    #[arg(long, global = true)]
    json: bool,
    /// Directory for artifact files (created if missing)
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Tolerance for comparisons against reference values
    #[arg(long, global = true, default_value_t = 1e-6)]
    tolerance: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the toric condition, Euler relation and cycle closure
    Validate { input: String },
    /// Convert quiver -> map or map -> quiver (direction auto-detected)
    Dualize { input: String },
    /// Kasteleyn signs, matrix, determinant, toric diagram, mirror equation
    Kasteleyn {
        input: String,
        /// Print the matrix entries
        #[arg(long)]
        matrix: bool,
        /// Print the determinant
        #[arg(long)]
        det: bool,
        /// Print the toric diagram (and its canonical form)
        #[arg(long)]
        diagram: bool,
        /// Print the local mirror equation
        #[arg(long)]
        mirror: bool,
    },
    /// Enumerate perfect matchings and their lattice multiplicities
    Matchings { input: String },
    /// Seiberg / cluster mutation at a node
    Mutate {
        input: String,
        #[arg(long)]
        node: String,
        /// Also integrate out mass terms afterwards
        #[arg(long)]
        reduce: bool,
        /// Compare canonical toric polygons before and after
        #[arg(long)]
        check_invariance: bool,
    },
    /// R-charges by a-maximization, torus modulus and Klein invariant
    Geometry {
        input: String,
        #[arg(long)]
        rcharges: bool,
        #[arg(long)]
        tau: bool,
        #[arg(long)]
        j: bool,
    },
    /// Permutation triple, passport, degree and genus
    Dessin { input: String },
    /// Plethystic operations on a rational Hilbert series
    Pleth {
        /// Numerator coefficients, ascending in degree, e.g. "1,0,-1"
        #[arg(long)]
        numer: String,
        /// Denominator coefficients, e.g. "1,-4,6,-4,1"
        #[arg(long)]
        denom: String,
        /// One of: series, pe, pl
        #[arg(long, default_value = "pl")]
        op: String,
        /// Truncation order
        #[arg(short = 'N', long, default_value_t = 30)]
        order: usize,
    },
    /// Sample the curve P(z,w)=0 into amoeba/coamoeba point clouds
    Amoeba {
        /// A polynomial like "1 + z + w", or a fixture name for its
        /// Kasteleyn determinant
        poly: String,
        #[arg(long, default_value_t = 4.0)]
        range: f64,
        #[arg(long, default_value_t = 200)]
        grid: usize,
        /// Write the sample CSV here
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the same records for coamoeba plotting
        #[arg(long)]
        coamoeba_out: Option<PathBuf>,
        /// Coefficient override "a,b=re[:im]", repeatable
        #[arg(long)]
        coeff: Vec<String>,
    },
    /// Run the full pipeline over a fixture or input file
    Pipeline {
        /// Built-in fixture name
        #[arg(long, conflicts_with = "input")]
        fixture: Option<String>,
        /// Quiver or map JSON file
        input: Option<String>,
        /// Run every stage
        #[arg(long)]
        all: bool,
        #[arg(long)]
        validate: bool,
        #[arg(long)]
        map: bool,
        #[arg(long)]
        det: bool,
        #[arg(long)]
        matchings: bool,
        #[arg(long)]
        geometry: bool,
        #[arg(long)]
        dessin: bool,
        /// Mutate at this node as a final stage
        #[arg(long)]
        mutate: Option<String>,
        #[arg(long)]
        check_invariance: bool,
    },
}

enum Input {
    Quiver(Quiver),
    Map(CombinatorialMap, Option<Vec<(i64, i64)>>, Option<Vec<i8>>),
    Fixture(fixtures::Fixture),
}

fn load_input(spec: &str) -> Result<Input, String> {
    let path = Path::new(spec);
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| format!("{}: {}", spec, e))?;
        if value.get("arrows").is_some() {
            return Ok(Input::Quiver(
                Quiver::from_json(&text).map_err(|e| e.to_string())?,
            ));
        }
        if value.get("sigma_black").is_some() {
            let (m, extras) = CombinatorialMap::from_json(&text).map_err(|e| e.to_string())?;
            return Ok(Input::Map(m, extras.weights, extras.signs));
        }
        return Err(format!("{}: neither a quiver nor a map JSON", spec));
    }
    fixtures::by_name(spec)
        .map(Input::Fixture)
        .ok_or_else(|| format!("`{}` is not a file or a fixture name", spec))
}

struct MapBundle {
    map: CombinatorialMap,
    weights: Vec<(i64, i64)>,
    signs: Vec<i8>,
}

fn map_bundle(input: &Input) -> Result<MapBundle, String> {
    let (map, pinned_w, pinned_s) = match input {
        Input::Quiver(q) => (
            map::quiver_to_map(q).map_err(|e| e.to_string())?,
            None,
            None,
        ),
        Input::Map(m, w, s) => (m.clone(), w.clone(), s.clone()),
        Input::Fixture(f) => (
            f.map().map_err(|e| e.to_string())?,
            f.pinned_weights(),
            f.pinned_signs(),
        ),
    };
    let weights = match pinned_w {
        Some(w) => w,
        None => {
            map::homology_weights(&map)
                .map_err(|e| e.to_string())?
                .weights
        }
    };
    let signs = match pinned_s {
        Some(s) => s,
        None => kasteleyn::kasteleyn_signs(&map).map_err(|e| e.to_string())?,
    };
    Ok(MapBundle {
        map,
        weights,
        signs,
    })
}

fn optimizer_seed() -> u64 {
    match std::env::var("TILINGFORGE_SEED") {
        Ok(text) => {
            let parsed = if let Some(hex) = text.strip_prefix("0x") {
                u64::from_str_radix(hex, 16)
            } else {
                text.parse()
            };
            parsed.unwrap_or(geometry::DEFAULT_SEED)
        }
        Err(_) => geometry::DEFAULT_SEED,
    }
}

fn write_artifact(dir: &Option<PathBuf>, name: &str, content: &str) -> Result<(), String> {
    let Some(dir) = dir else { return Ok(()) };
    std::fs::create_dir_all(dir).map_err(|e| e.to_string())?;
    std::fs::write(dir.join(name), content).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::FAILURE
        }
    }
}

fn run(cli: &Cli) -> Result<bool, String> {
    match &cli.command {
        Command::Validate { input } => {
            let quiver = match load_input(input)? {
                Input::Quiver(q) => q,
                Input::Map(m, _, _) => map::map_to_quiver(&m).map_err(|e| e.to_string())?,
                Input::Fixture(f) => f.quiver().map_err(|e| e.to_string())?,
            };
            let report = validate_quiver(&quiver);
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&report).unwrap());
            } else {
                print!("{}", report);
            }
            Ok(report.all_passed())
        }
        Command::Dualize { input } => match load_input(input)? {
            Input::Quiver(q) => {
                let m = map::quiver_to_map(&q).map_err(|e| e.to_string())?;
                let json = m.to_json();
                write_artifact(&cli.out_dir, "map.json", &json)?;
                println!("{}", json);
                Ok(true)
            }
            Input::Map(m, _, _) => {
                let q = map::map_to_quiver(&m).map_err(|e| e.to_string())?;
                let json = q.to_json();
                write_artifact(&cli.out_dir, "quiver.json", &json)?;
                println!("{}", json);
                Ok(true)
            }
            Input::Fixture(f) => {
                let m = f.map().map_err(|e| e.to_string())?;
                let json =
                    m.to_json_with(f.pinned_weights().as_deref(), f.pinned_signs().as_deref());
                write_artifact(&cli.out_dir, "map.json", &json)?;
                println!("{}", json);
                Ok(true)
            }
        },
        Command::Kasteleyn {
            input,
            matrix,
            det,
            diagram,
            mirror,
        } => {
            let bundle = map_bundle(&load_input(input)?)?;
            let k = kasteleyn::kasteleyn_matrix(&bundle.map, &bundle.signs, &bundle.weights)
                .map_err(|e| e.to_string())?;
            let all = !(*matrix || *det || *diagram || *mirror);
            if *matrix || all {
                println!("K ({0} x {0}), rows = white nodes:", k.size());
                for row in &k.entries {
                    let cells: Vec<String> = row.iter().map(|p| p.to_string()).collect();
                    println!("  [ {} ]", cells.join(" | "));
                }
            }
            let determinant = kasteleyn::laurent_det(&k);
            if *det || all {
                println!("det K = {}", determinant);
            }
            let d = poly::toric_diagram(&determinant).map_err(|e| e.to_string())?;
            if *diagram || all {
                println!("toric diagram (a b multiplicity):");
                for line in d.to_text().lines() {
                    println!("  {}", line);
                }
                println!("canonical polygon:");
                for line in poly::canonical_polygon(&d).to_text().lines() {
                    println!("  {}", line);
                }
                write_artifact(&cli.out_dir, "diagram.txt", &d.to_text())?;
            }
            if *mirror || all {
                println!(
                    "{}",
                    poly::mirror_equation(&d, None).map_err(|e| e.to_string())?
                );
            }
            Ok(true)
        }
        Command::Matchings { input } => {
            let bundle = map_bundle(&load_input(input)?)?;
            let ms = kasteleyn::enumerate_matchings(&bundle.map, &bundle.weights, None)
                .map_err(|e| e.to_string())?;
            println!("perfect matchings: {}", ms.len());
            println!("lattice multiplicities (a b multiplicity):");
            for line in ms.diagram().to_text().lines() {
                println!("  {}", line);
            }
            let k = kasteleyn::kasteleyn_matrix(&bundle.map, &bundle.signs, &bundle.weights)
                .map_err(|e| e.to_string())?;
            let det = kasteleyn::laurent_det(&k);
            let ok = kasteleyn::determinant_matches_matchings(&det, &ms);
            println!(
                "[{}] matching multiplicities equal |det| coefficients",
                if ok { "pass" } else { "FAIL" }
            );
            Ok(ok)
        }
        Command::Mutate {
            input,
            node,
            reduce,
            check_invariance,
        } => {
            let quiver = match load_input(input)? {
                Input::Quiver(q) => q,
                Input::Map(m, _, _) => map::map_to_quiver(&m).map_err(|e| e.to_string())?,
                Input::Fixture(f) => f.quiver().map_err(|e| e.to_string())?,
            };
            let (mutated, record) =
                mutation::seiberg_mutate(&quiver, node).map_err(|e| e.to_string())?;
            let result = if *reduce {
                mutation::reduce_mass_terms(&mutated).map_err(|e| e.to_string())?
            } else {
                mutated
            };
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&record).unwrap());
            } else {
                println!(
                    "mutated at {}: {} mesons, terms {} -> {}",
                    record.node,
                    record.mesons.len(),
                    record.terms_before,
                    result.superpotential.len()
                );
            }
            let json = result.to_json();
            write_artifact(&cli.out_dir, "mutated.json", &json)?;
            println!("{}", json);
            let mut ok = validate_quiver(&result).all_passed();
            if *check_invariance {
                let inv = mutation::check_duality_invariance(&quiver, &result)
                    .map_err(|e| e.to_string())?;
                println!(
                    "[{}] canonical polygon invariant",
                    if inv.equal { "pass" } else { "FAIL" }
                );
                ok &= inv.equal;
            }
            Ok(ok)
        }
        Command::Geometry {
            input,
            rcharges,
            tau,
            j,
        } => {
            let bundle = map_bundle(&load_input(input)?)?;
            let a = geometry::maximize_a_seeded(&bundle.map, optimizer_seed())
                .map_err(|e| e.to_string())?;
            let all = !(*rcharges || *tau || *j);
            if *rcharges || all {
                for (edge, &r) in bundle.map.edges.iter().zip(&a.r) {
                    println!("R[{}] = {}", edge, format_float(r));
                }
                println!("a(R) = {}", format_float(a.objective));
            }
            let md = geometry::modular_data(&bundle.map, &a.r).map_err(|e| e.to_string())?;
            if *tau || all {
                println!("tau = {}", format_complex(md.tau_reduced));
            }
            if *j || all {
                println!("j = {}", format_complex(md.j));
                println!("J = {}", format_complex(md.j_normalized));
            }
            Ok(!a.uniqueness_warning)
        }
        Command::Dessin { input } => {
            let bundle = map_bundle(&load_input(input)?)?;
            let t = dessin::permutation_triple(&bundle.map).map_err(|e| e.to_string())?;
            let p = dessin::passport(&t);
            println!("{}", t);
            println!("passport = {}", p);
            println!("degree = {}", p.degree());
            println!(
                "genus = {}",
                dessin::rh_genus(&t).map_err(|e| e.to_string())?
            );
            Ok(true)
        }
        Command::Pleth {
            numer,
            denom,
            op,
            order,
        } => run_pleth(numer, denom, op, *order),
        Command::Amoeba {
            poly: poly_spec,
            range,
            grid,
            out,
            coamoeba_out,
            coeff,
        } => {
            let base = match fixtures::by_name(poly_spec) {
                Some(f) => {
                    let bundle = map_bundle(&Input::Fixture(f))?;
                    let k =
                        kasteleyn::kasteleyn_matrix(&bundle.map, &bundle.signs, &bundle.weights)
                            .map_err(|e| e.to_string())?;
                    kasteleyn::laurent_det(&k)
                }
                None => polyparse::parse_poly(poly_spec)?,
            };
            let mut cp = ComplexPoly::from_integer_poly(&base);
            for spec in coeff {
                let (point, value) = parse_coeff_override(spec)?;
                cp = cp.with_override(point, value).map_err(|e| e.to_string())?;
            }
            let samples = sample_curve(
                &cp,
                &GridSpec {
                    range: *range,
                    resolution: *grid,
                },
            )
            .map_err(|e| e.to_string())?;
            println!(
                "sampled {} points ({} degenerate fibers skipped)",
                samples.points.len(),
                samples.degenerate_fibers
            );
            let csv = to_csv(&samples);
            for path in [out, coamoeba_out].into_iter().flatten() {
                if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                    std::fs::create_dir_all(parent).map_err(|e| e.to_string())?;
                }
                std::fs::write(path, &csv).map_err(|e| e.to_string())?;
                println!("wrote {}", path.display());
            }
            Ok(true)
        }
        Command::Pipeline {
            fixture,
            input,
            all,
            validate,
            map: map_flag,
            det,
            matchings,
            geometry: geometry_flag,
            dessin: dessin_flag,
            mutate,
            check_invariance,
        } => {
            let pipeline_input = match (fixture, input) {
                (Some(name), _) => {
                    let f = fixtures::by_name(name)
                        .ok_or_else(|| format!("unknown fixture `{}`", name))?;
                    PipelineInput::from_fixture(f)?
                }
                (None, Some(path)) => match load_input(path)? {
                    Input::Quiver(q) => PipelineInput::from_quiver(path.clone(), q)?,
                    Input::Map(m, w, s) => PipelineInput {
                        source: path.clone(),
                        quiver: None,
                        map: m,
                        pinned_weights: w,
                        pinned_signs: s,
                        fixture: None,
                    },
                    Input::Fixture(f) => PipelineInput::from_fixture(f)?,
                },
                (None, None) => return Err("pipeline needs --fixture or an input file".into()),
            };
            let mut selection = if *all {
                StageSelection::all()
            } else {
                StageSelection {
                    validate: *validate,
                    map: *map_flag,
                    kasteleyn: *det,
                    matchings: *matchings,
                    geometry: *geometry_flag,
                    dessin: *dessin_flag,
                    mutate_node: None,
                    check_invariance: false,
                }
            };
            selection.mutate_node = mutate.clone();
            selection.check_invariance = *check_invariance;
            if !selection.any() {
                selection = StageSelection::all();
                selection.mutate_node = mutate.clone();
                selection.check_invariance = *check_invariance;
            }
            let report = run_pipeline(&pipeline_input, &selection, optimizer_seed(), cli.tolerance);
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&report).unwrap());
            } else {
                print!("{}", report.render());
            }
            if let Some(dir) = &cli.out_dir {
                std::fs::create_dir_all(dir).map_err(|e| e.to_string())?;
                write_artifact(
                    &cli.out_dir,
                    "report.json",
                    &serde_json::to_string_pretty(&report).unwrap(),
                )?;
                write_artifact(&cli.out_dir, "map.json", &pipeline_input.map.to_json())?;
                if let Some(q) = &pipeline_input.quiver {
                    write_artifact(&cli.out_dir, "quiver.json", &q.to_json())?;
                }
                println!("artifacts in {}", dir.display());
            }
            Ok(report.all_ok())
        }
    }
}

fn run_pleth(numer: &str, denom: &str, op: &str, order: usize) -> Result<bool, String> {
    let parse_list = |text: &str| -> Result<Vec<BigRational>, String> {
        text.split(',')
            .map(|t| parse_rational(t.trim()).map_err(|e| e.to_string()))
            .collect()
    };
    let numer = parse_list(numer)?;
    let denom = parse_list(denom)?;
    let series =
        plethystics::series_from_rational(&numer, &denom, order).map_err(|e| e.to_string())?;
    let result = match op {
        "series" => series,
        "pe" => plethystics::pe(&series),
        "pl" => plethystics::pl(&series).map_err(|e| e.to_string())?,
        other => return Err(format!("unknown op `{}`; use series, pe or pl", other)),
    };
    println!("{}", result);
    Ok(true)
}

fn parse_coeff_override(spec: &str) -> Result<((i64, i64), Complex64), String> {
    let (point, value) = spec
        .split_once('=')
        .ok_or_else(|| format!("override `{}` needs the form a,b=re[:im]", spec))?;
    let (a, b) = point
        .split_once(',')
        .ok_or_else(|| format!("override point `{}` needs the form a,b", point))?;
    let a: i64 = a.trim().parse().map_err(|_| "bad exponent".to_string())?;
    let b: i64 = b.trim().parse().map_err(|_| "bad exponent".to_string())?;
    let (re, im) = match value.split_once(':') {
        Some((re, im)) => (re, im),
        None => (value, "0"),
    };
    let re: f64 = re.trim().parse().map_err(|_| "bad real part".to_string())?;
    let im: f64 = im
        .trim()
        .parse()
        .map_err(|_| "bad imaginary part".to_string())?;
    Ok(((a, b), Complex64::new(re, im)))
}
