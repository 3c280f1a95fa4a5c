//! Command-line verification harness: runs the library's verification
//! suites, identifies constant-angle patches, and evaluates curvature,
//! emitting machine-readable reports on stdout.
//!
//! Exit codes: 0 when every check passes, 1 when the run completed but at
//! least one check failed, 2 on usage or internal errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sol4::ambient;
use sol4::catalog::{FamilyTag, orbit_representative_r};
use sol4::hypersurface::HypersurfacePatch;
use sol4::reconstruct::{canonicalize, CaseLabel, MATCH_TOLERANCE};
use sol4::report::{round_sig9, Check, VerificationReport};
use sol4::verify::{
    all_report, ambient_suite, family_suite, orbit_suite, parallel_suite, tube_suite, RunConfig,
};
use sol4::{FrameVector, Point, Sign, TangentVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "sol4",
    version,
    about = "Verification harness for constant-angle hypersurface geometry in a solvable 4-dimensional model space"
)]
struct Cli {
    /// Report output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Seed for randomized checks (reports are byte-identical per seed).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Sample count per randomized check.
    #[arg(long, global = true)]
    samples: Option<usize>,

    /// RK4 step count for geodesic shots.
    #[arg(long, global = true)]
    steps: Option<usize>,

    /// Comma-separated override for the family radius grid.
    #[arg(long, value_delimiter = ',', global = true)]
    r_grid: Option<Vec<f64>>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the structural identities of the ambient model.
    VerifyAmbient,
    /// Verify one catalog family over its radius grid.
    VerifyFamily {
        /// Family name: M1, M2, M3, or M4.
        #[arg(long)]
        family: String,
        /// Verify a single radius instead of the default grid.
        #[arg(long)]
        r: Option<f64>,
        /// Write sampled surface points to this path as CSV.
        #[arg(long)]
        dump_points: Option<PathBuf>,
    },
    /// Build a constant-angle case and identify its catalog member.
    Reconstruct {
        /// Case name: I_i, I_ii, I_iii, II, or III.
        #[arg(long)]
        case: String,
        /// Constant fourth angle function (cases I_i, I_ii, I_iii, II).
        #[arg(long)]
        d: Option<f64>,
        /// Initial first angle function at u = 0 (case I_i).
        #[arg(long)]
        a0: Option<f64>,
        /// Initial second angle function at u = 0 (case I_i).
        #[arg(long)]
        b0: Option<f64>,
        /// Constant first angle function (case I_ii).
        #[arg(long)]
        a: Option<f64>,
        /// Constant second angle function (case I_ii).
        #[arg(long)]
        b: Option<f64>,
        /// Constant third angle function (case II).
        #[arg(long)]
        c: Option<f64>,
        /// Sign of the first angle function for case I_iii: + or -.
        #[arg(long)]
        sign: Option<String>,
        /// Write sampled surface points to this path as CSV.
        #[arg(long)]
        dump_points: Option<PathBuf>,
    },
    /// Verify that geodesics from the tube axes land on the rotation tubes.
    Tube,
    /// Verify the parallel-family sweeps and radius non-congruence.
    Parallel,
    /// Verify homogeneity along the isometry subgroup orbits.
    Orbit,
    /// Evaluate sectional curvature and R(u, v)v at a point.
    Curvature {
        /// Base point as x,y,z,t.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Vec<f64>,
        /// First frame-coefficient vector as four comma-separated numbers.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        u: Vec<f64>,
        /// Second frame-coefficient vector as four comma-separated numbers.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        v: Vec<f64>,
    },
    /// Run every verification suite and merge the reports.
    All,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(pass) => {
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    let mut cfg = RunConfig::default();
    if let Ok(path) = std::env::var("SOL4_CONFIG") {
        if !path.is_empty() {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| format!("could not read SOL4_CONFIG file '{path}': {e}"))?;
            cfg.apply_config_text(&text).map_err(|e| e.to_string())?;
        }
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(samples) = cli.samples {
        cfg.samples = samples;
    }
    if let Some(steps) = cli.steps {
        cfg.rk4_steps = steps;
    }
    if let Some(grid) = &cli.r_grid {
        cfg.r_grid = Some(grid.clone());
    }
    cfg.validate().map_err(|e| e.to_string())?;

    let report = match &cli.command {
        Command::VerifyAmbient => ambient_suite(&cfg).map_err(|e| e.to_string())?,
        Command::VerifyFamily {
            family,
            r,
            dump_points,
        } => {
            let tag: FamilyTag = family
                .parse()
                .map_err(|_| format!("unknown family '{family}' (expected M1..M4)"))?;
            if let Some(radius) = r {
                cfg.r_grid = Some(vec![*radius]);
            }
            if let Some(path) = dump_points {
                let radius = cfg
                    .r_grid
                    .as_ref()
                    .and_then(|g| g.first().copied())
                    .unwrap_or_else(|| orbit_representative_r(tag));
                let member =
                    sol4::catalog::FamilyId::new(tag, radius).map_err(|e| e.to_string())?;
                dump_patch_points(&member.patch(), path)?;
            }
            family_suite(&cfg, tag).map_err(|e| e.to_string())?
        }
        Command::Reconstruct {
            case,
            d,
            a0,
            b0,
            a,
            b,
            c,
            sign,
            dump_points,
        } => {
            let label = build_label(case, *d, *a0, *b0, *a, *b, *c, sign.as_deref())?;
            let (_, patch) = label.build().map_err(|e| e.to_string())?;
            if let Some(path) = dump_points {
                dump_patch_points(&patch, path)?;
            }
            let matched = canonicalize(&patch).map_err(|e| e.to_string())?;
            let checks = vec![
                Check::evaluation(
                    "reconstruct/match/radius",
                    matched.family.r(),
                    format!(
                        "case {} is congruent to catalog family {} at the reported radius",
                        label.name(),
                        matched.family.tag().name()
                    ),
                ),
                Check::residual(
                    "reconstruct/match/residual",
                    matched.residual,
                    MATCH_TOLERANCE,
                    "worst implicit residual of the patch samples after applying the fitted isometry",
                ),
            ];
            VerificationReport::new("reconstruct", checks)
        }
        Command::Tube => tube_suite(&cfg).map_err(|e| e.to_string())?,
        Command::Parallel => parallel_suite(&cfg).map_err(|e| e.to_string())?,
        Command::Orbit => orbit_suite(&cfg).map_err(|e| e.to_string())?,
        Command::Curvature { point, u, v } => curvature_report(point, u, v)?,
        Command::All => all_report(&cfg).map_err(|e| e.to_string())?,
    };

    emit(&report, cli.format)?;
    Ok(report.pass)
}

#[allow(clippy::too_many_arguments)]
fn build_label(
    case: &str,
    d: Option<f64>,
    a0: Option<f64>,
    b0: Option<f64>,
    a: Option<f64>,
    b: Option<f64>,
    c: Option<f64>,
    sign: Option<&str>,
) -> Result<CaseLabel, String> {
    let need = |name: &str, value: Option<f64>| {
        value.ok_or_else(|| format!("case {case} requires --{name}"))
    };
    let normalized = case.to_ascii_uppercase().replace('-', "_");
    let label = match normalized.as_str() {
        "I_I" => CaseLabel::case1i(need("d", d)?, need("a0", a0)?, need("b0", b0)?),
        "I_II" => CaseLabel::case1ii(need("a", a)?, need("b", b)?, need("d", d)?),
        "I_III" => {
            let sign = match sign.ok_or_else(|| format!("case {case} requires --sign + or -"))? {
                "+" | "plus" => Sign::Plus,
                "-" | "minus" => Sign::Minus,
                other => return Err(format!("unrecognized sign '{other}' (expected + or -)")),
            };
            CaseLabel::case1iii(sign, need("d", d)?)
        }
        "II" => CaseLabel::case2(need("c", c)?, need("d", d)?),
        "III" => Ok(CaseLabel::case3()),
        _ => return Err(format!("unknown case '{case}' (expected I_i, I_ii, I_iii, II, or III)")),
    };
    label.map_err(|e| e.to_string())
}

fn curvature_report(point: &[f64], u: &[f64], v: &[f64]) -> Result<VerificationReport, String> {
    let four = |name: &str, values: &[f64]| -> Result<[f64; 4], String> {
        values
            .try_into()
            .map_err(|_| format!("--{name} expects exactly four comma-separated numbers"))
    };
    let [x, y, z, t] = four("point", point)?;
    let base = Point::new(x, y, z, t);
    let u_vec = TangentVector::new(base, FrameVector(four("u", u)?));
    let v_vec = TangentVector::new(base, FrameVector(four("v", v)?));
    let k = ambient::sectional(&u_vec, &v_vec).map_err(|e| e.to_string())?;
    let r_uvv = ambient::curvature(&u_vec, &v_vec, &v_vec).map_err(|e| e.to_string())?;
    let mut checks = vec![Check::evaluation(
        "curvature/sectional",
        k,
        "sectional curvature of the plane spanned by u and v",
    )];
    for (index, component) in r_uvv.v.0.iter().enumerate() {
        checks.push(Check::evaluation(
            format!("curvature/r-uvv/e{}", index + 1),
            *component,
            "frame component of the curvature image R(u, v)v",
        ));
    }
    Ok(VerificationReport::new("curvature", checks))
}

fn dump_patch_points(patch: &HypersurfacePatch, path: &PathBuf) -> Result<(), String> {
    let mut out = String::from("x,y,z,t\n");
    for q in patch.grid(12, 0.02) {
        let p = patch.point(q);
        out.push_str(&format!(
            "{},{},{},{}\n",
            round_sig9(p.x),
            round_sig9(p.y),
            round_sig9(p.z),
            round_sig9(p.t)
        ));
    }
    std::fs::write(path, out)
        .map_err(|e| format!("could not write point cloud to {}: {e}", path.display()))?;
    eprintln!("wrote point cloud to {}", path.display());
    Ok(())
}

fn emit(report: &VerificationReport, format: Format) -> Result<(), String> {
    match format {
        Format::Json => {
            let text = serde_json::to_string_pretty(report)
                .map_err(|e| format!("serialization failed: {e}"))?;
            println!("{text}");
        }
        Format::Csv => {
            print!("{}", report.to_csv());
        }
    }
    Ok(())
}
