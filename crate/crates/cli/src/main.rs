use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use orbitope::io::{
    from_json_str, read_observations, to_json_string, write_face_scan, write_observations, EnsembleJson, MeasureJson,
    PairJson, RotationJson, TensorJson,
};
use orbitope::pair::{
    coaxial_face, coaxial_scan, decompose_pair, evaluate_pair, face_dimension_empirical, facet_decompose,
    hull_dimension, necessary_membership, AlphaDirection, NecessaryMembership, TensorPair,
};
use orbitope::rdc::{estimate_tensor, p_max, p_max_pair_upper, synthesize_observations, Generator};
use orbitope::sampling::seeded_rng;
use orbitope::single::{decompose, invariants, membership, region_x_contains, HullSpec, Membership};
use orbitope::{AnisoTensor, AtomicMeasure, Rotation};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "orbitope", version, about = "Convex hulls of rotated anisotropic tensors")]
struct Cli {
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Number of equally spaced α directions in pair sweeps.
    #[arg(long, global = true, default_value_t = 720)]
    n_alpha: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Reconstruction tolerance for the self-check of emitted decompositions.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Fit a tensor to an observation CSV (rx,ry,rz,delta[,C]).
    Estimate { observations: PathBuf },
    /// Membership of a target tensor (or pair) in the hull of a generator (or pair).
    Membership {
        #[arg(long)]
        chi: PathBuf,
        #[arg(long)]
        target: PathBuf,
    },
    /// Decompose a target into vertices: at most 3 atoms for one ion, vertex + facet for a pair.
    Decompose {
        #[arg(long)]
        chi: PathBuf,
        #[arg(long)]
        target: PathBuf,
    },
    /// Characteristic-polynomial invariants of a tensor, normalized by a zero-eigenvalue generator if given.
    Invariants {
        tensor: PathBuf,
        #[arg(long)]
        chi: Option<PathBuf>,
    },
    /// Region-X containment of (alpha, det), or its boundary curves as CSV.
    RegionX {
        #[arg(long, allow_negative_numbers = true, requires = "det")]
        alpha: Option<f64>,
        #[arg(long, allow_negative_numbers = true, requires = "alpha")]
        det: Option<f64>,
        /// Emit the boundary curves sampled at this many points each.
        #[arg(long, conflicts_with = "alpha")]
        curves: Option<usize>,
    },
    /// Largest weight the rotation can carry in a measure reproducing the target.
    Pmax {
        #[arg(long)]
        chi: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        rotation: PathBuf,
    },
    /// Coaxial face dimensions over the α sweep, as CSV.
    CoaxialScan { pair: PathBuf },
    /// Dimension of one coaxial face of a pair hull.
    FacetDim {
        pair: PathBuf,
        /// Angle of α in radians.
        #[arg(long, allow_negative_numbers = true)]
        alpha_angle: f64,
        /// 0 for the top eigenvector of χ_α, 2 for the bottom one.
        #[arg(long, default_value_t = 0)]
        which: usize,
        /// Also sample the face and report its empirical dimension.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Dimension of the hull of the joint orbit of the given tensors or pairs.
    HullDim {
        #[arg(required = true)]
        tensors: Vec<PathBuf>,
    },
    /// Decompose a target on a coaxial facet of a pair hull into at most 4 atoms.
    FacetDecompose {
        #[arg(long)]
        pair: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        alpha_angle: f64,
        #[arg(long, default_value_t = 0)]
        which: usize,
    },
    /// Synthetic observations of the mean tensor of a single-ion ensemble.
    Simulate {
        ensemble: PathBuf,
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
    },
}

enum Input {
    Single(AnisoTensor),
    Pair(TensorPair),
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_input(path: &Path) -> anyhow::Result<Input> {
    let text = read(path)?;
    let value: Value = from_json_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if value.get("chi1").is_some() {
        let p: PairJson = from_json_str(&text)?;
        Ok(Input::Pair(p.to_pair()?))
    } else {
        let t: TensorJson = from_json_str(&text)?;
        Ok(Input::Single(t.to_tensor()?))
    }
}

fn read_tensor(path: &Path) -> anyhow::Result<AnisoTensor> {
    match read_input(path)? {
        Input::Single(t) => Ok(t),
        Input::Pair(_) => bail!("{}: expected a single tensor", path.display()),
    }
}

fn read_pair(path: &Path) -> anyhow::Result<TensorPair> {
    match read_input(path)? {
        Input::Pair(p) => Ok(p),
        Input::Single(_) => bail!("{}: expected a pair with chi1 and chi2", path.display()),
    }
}

fn read_both(chi: &Path, target: &Path) -> anyhow::Result<(Input, Input)> {
    let (a, b) = (read_input(chi)?, read_input(target)?);
    match (&a, &b) {
        (Input::Single(_), Input::Single(_)) | (Input::Pair(_), Input::Pair(_)) => Ok((a, b)),
        _ => bail!("generator and target must both be single tensors or both pairs"),
    }
}

fn emit(output: Option<&Path>, body: &[u8]) -> anyhow::Result<()> {
    match output {
        Some(p) => fs::write(p, body).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body)?;
            Ok(out.flush()?)
        }
    }
}

fn emit_json(output: Option<&Path>, value: &Value) -> anyhow::Result<()> {
    let mut s = to_json_string(value)?;
    s.push('\n');
    emit(output, s.as_bytes())
}

fn measure_json(m: &AtomicMeasure, error: f64) -> anyhow::Result<Value> {
    let mut v = serde_json::to_value(MeasureJson::from(m))?;
    v["reconstruction_error"] = json!(error);
    Ok(v)
}

/// Re-validates a decomposition against its target; a mismatch is a hard error.
fn self_check(error: f64, tol: f64) -> anyhow::Result<()> {
    if error.is_nan() || error > tol {
        bail!("self-check failed: reconstruction error {error:e} exceeds {tol:e}");
    }
    Ok(())
}

fn rotation_from(path: &Path) -> anyhow::Result<Rotation> {
    let r: RotationJson = from_json_str(&read(path)?)?;
    Ok(r.to_rotation()?)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let out = cli.output.as_deref();
    match cli.verb {
        Verb::Estimate { observations } => {
            let file = fs::File::open(&observations).with_context(|| format!("opening {}", observations.display()))?;
            let est = estimate_tensor(&read_observations(file)?)?;
            emit_json(
                out,
                &json!({
                    "coords": est.tensor.coords(),
                    "rms_residual": est.rms_residual,
                    "condition": est.condition,
                }),
            )
        }
        Verb::Membership { chi, target } => match read_both(&chi, &target)? {
            (Input::Single(chi), Input::Single(target)) => {
                let m = membership(&HullSpec::new(chi)?, &target);
                let margin = match m {
                    Membership::Inside { margin } => margin,
                    Membership::Boundary => 0.0,
                    Membership::Outside { violation } => -violation,
                };
                emit_json(out, &json!({ "result": m.label(), "margin": margin }))
            }
            (Input::Pair(pair), Input::Pair(target)) => {
                let v = match necessary_membership(&pair, &target, cli.n_alpha)? {
                    NecessaryMembership::Pass { min_margin } => {
                        json!({ "result": "necessary-pass", "min_margin": min_margin })
                    }
                    NecessaryMembership::Fail { index, alpha, violation } => json!({
                        "result": "outside",
                        "alpha_index": index,
                        "alpha_angle": alpha.angle(),
                        "violation": violation,
                    }),
                };
                emit_json(out, &v)
            }
            _ => unreachable!(),
        },
        Verb::Decompose { chi, target } => match read_both(&chi, &target)? {
            (Input::Single(chi), Input::Single(target)) => {
                let m = decompose(&HullSpec::new(chi)?, &target)?;
                let err = m.evaluate(&chi).max_abs_diff(&target);
                self_check(err, cli.tol * chi.norm().max(1.0))?;
                emit_json(out, &measure_json(&m, err)?)
            }
            (Input::Pair(pair), Input::Pair(target)) => {
                let outcome = decompose_pair(&pair, &target, cli.n_alpha)?;
                log::info!("exit at t = {}, face dimension {}", outcome.t_exit, outcome.face_dim);
                let err = evaluate_pair(&outcome.measure, &pair).max_abs_diff(&target);
                self_check(err, cli.tol * pair.scale().max(1.0))?;
                let mut v = measure_json(&outcome.measure, err)?;
                v["alpha_angle"] = json!(outcome.alpha.angle());
                v["face_dim"] = json!(outcome.face_dim);
                emit_json(out, &v)
            }
            _ => unreachable!(),
        },
        Verb::Invariants { tensor, chi } => {
            let mut t = read_tensor(&tensor)?;
            if let Some(chi) = chi {
                let hull = HullSpec::new(read_tensor(&chi)?)?;
                if !hull.has_zero_eigenvalue(1e-9) {
                    return Err(orbitope::Error::InvalidArgument("normalizing generator needs a zero eigenvalue".into()).into());
                }
                t = t * (2.0 / hull.scale());
            }
            let inv = invariants(&t);
            emit_json(
                out,
                &json!({
                    "alpha": inv.alpha,
                    "det": inv.det,
                    "in_region_x": region_x_contains(inv.alpha, inv.det),
                }),
            )
        }
        Verb::RegionX { alpha, det, curves } => match (alpha, det, curves) {
            (Some(a), Some(d), _) => emit_json(out, &json!({ "alpha": a, "det": d, "in_region_x": region_x_contains(a, d) })),
            (None, None, Some(n)) => emit(out, &region_x_curves(n.max(2))),
            _ => bail!("region-x needs --alpha and --det, or --curves"),
        },
        Verb::Pmax { chi, target, rotation } => {
            let r = rotation_from(&rotation)?;
            let v = match read_both(&chi, &target)? {
                (Input::Single(chi), Input::Single(target)) => {
                    json!({ "p_max": p_max(&HullSpec::new(chi)?, &target, &r)? })
                }
                (Input::Pair(pair), Input::Pair(target)) => {
                    json!({ "p_max_upper": p_max_pair_upper(&pair, &target, &r, cli.n_alpha)? })
                }
                _ => unreachable!(),
            };
            emit_json(out, &v)
        }
        Verb::CoaxialScan { pair } => {
            let rows = coaxial_scan(&read_pair(&pair)?, cli.n_alpha)?;
            let mut buf = Vec::new();
            write_face_scan(&mut buf, &rows)?;
            emit(out, &buf)
        }
        Verb::FacetDim { pair, alpha_angle, which, samples } => {
            let pair = read_pair(&pair)?;
            let face = coaxial_face(&pair, &AlphaDirection::from_angle(alpha_angle), which)?;
            let mut v = json!({ "dim": face.dim, "d1": face.d1, "d2": face.d2, "m_alpha": face.m_alpha });
            if let Some(n) = samples {
                v["dim_empirical"] = json!(face_dimension_empirical(&face, &pair, n)?);
            }
            emit_json(out, &v)
        }
        Verb::HullDim { tensors } => {
            let mut all = Vec::new();
            for p in &tensors {
                match read_input(p)? {
                    Input::Single(t) => all.push(t),
                    Input::Pair(pair) => all.extend([pair.chi1, pair.chi2]),
                }
            }
            emit(out, format!("{}\n", hull_dimension(&all)).as_bytes())
        }
        Verb::FacetDecompose { pair, target, alpha_angle, which } => {
            let pair = read_pair(&pair)?;
            let target = read_pair(&target)?;
            let face = coaxial_face(&pair, &AlphaDirection::from_angle(alpha_angle), which)?;
            let m = facet_decompose(&face, &pair, &target)?;
            let err = evaluate_pair(&m, &pair).max_abs_diff(&target);
            self_check(err, cli.tol.max(1e-7) * pair.scale().max(1.0))?;
            emit_json(out, &measure_json(&m, err)?)
        }
        Verb::Simulate { ensemble, n, sigma, c } => {
            let e: EnsembleJson = from_json_str(&read(&ensemble)?)?;
            let Generator::Single(mean) = e.to_ensemble()?.mean() else {
                return Err(orbitope::Error::InvalidArgument("simulate needs a single-ion ensemble with `chi`".into()).into());
            };
            let obs = synthesize_observations(&mean, n, sigma, c, &mut seeded_rng(cli.seed))?;
            let mut buf = Vec::new();
            write_observations(&mut buf, &obs)?;
            emit(out, &buf)
        }
    }
}

/// CSV of the region-X boundary: the cusp curve `27 det² = 4 alpha³` and the
/// lines `det = ±(1 − alpha)`, for `alpha ∈ [0, 1]`.
fn region_x_curves(n: usize) -> Vec<u8> {
    let mut s = String::from("curve,alpha,det\n");
    for i in 0..n {
        let a = i as f64 / (n - 1) as f64;
        let cusp = (4.0 * a.powi(3) / 27.0).sqrt();
        for (name, d) in [("cusp_upper", cusp), ("cusp_lower", -cusp), ("line_upper", 1.0 - a), ("line_lower", a - 1.0)] {
            s.push_str(&format!("{name},{a:.16e},{d:.16e}\n"));
        }
    }
    s.into_bytes()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<orbitope::Error>() {
        Some(e) if e.is_domain() => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
