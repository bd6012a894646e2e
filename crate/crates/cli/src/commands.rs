//! Subcommand dispatch. Every command produces one [`Document`].

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use grand_amalgam::amalgam::{equivalence_report, EquivalenceOptions, EquivalenceReport};
use grand_amalgam::convolution::{
    amalgam_submultiplicativity_check, submultiplicativity_check, FiniteAbelianGroup,
    HYPOTHESES_NOT_MET,
};
use grand_amalgam::{
    amalgam_norm, closure_criterion, control_function, embedding_constants, epsilon_profile,
    grand_norm, lp_norm, make_uniform_bupu, noncompact_witness, validate_bupu, well_spread_check,
    MeasureSpace, SampledFunction,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{load_or_default, RunConfig, SpaceKind};
use crate::error::{CliError, CliResult};
use crate::io::{load_function, write_text, FunctionFormat};
use crate::report::{Document, Status};

#[derive(Debug, Parser)]
#[command(
    name = "grandam",
    version,
    about = "Grand Lebesgue and grand Wiener amalgam norms on finite spaces"
)]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Input function (rows index,weight,value).
    #[arg(long = "f", global = true, value_name = "PATH")]
    pub f: Option<PathBuf>,

    /// Second input function for convolution checks.
    #[arg(long = "g", global = true, value_name = "PATH")]
    pub g: Option<PathBuf>,

    /// Write the report here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Input format; guessed from the file extension when absent.
    #[arg(long, global = true, value_enum)]
    pub format: Option<FunctionFormat>,

    /// Seed for generated inputs; overrides the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Grand norm of --f.
    Norm,
    /// Epsilon profile of --f, with an eps,value CSV for plotting.
    Profile {
        /// CSV destination; defaults to the --out path with a .profile.csv
        /// extension.
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Grand amalgam norm of --f with the configured window.
    Amalgam,
    /// Build and validate a block partition of unity.
    BupuValidate,
    /// Convolution submultiplicativity on a finite group.
    ConvCheck {
        /// Check the amalgam norm instead of the grand norm.
        #[arg(long)]
        amalgam: bool,
    },
    /// Submultiplicativity failure on the integers.
    Witness {
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        p: Option<f64>,
    },
    /// Continuous, discrete and step amalgam norms with their ratio bounds.
    Equivalence,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Norm => "norm",
            Command::Profile { .. } => "profile",
            Command::Amalgam => "amalgam",
            Command::BupuValidate => "bupu-validate",
            Command::ConvCheck { .. } => "conv-check",
            Command::Witness { .. } => "witness",
            Command::Equivalence => "equivalence",
        }
    }
}

struct Ctx<'a> {
    cli: &'a Cli,
    config: RunConfig,
    seed: u64,
}

impl Ctx<'_> {
    fn format_for(&self, path: &Path) -> FunctionFormat {
        self.cli
            .format
            .unwrap_or_else(|| FunctionFormat::from_path(path))
    }

    fn load(&self, path: &Path) -> CliResult<SampledFunction> {
        load_function(path, self.format_for(path))
    }

    fn required_f(&self) -> CliResult<SampledFunction> {
        let path = self.cli.f.as_ref().ok_or(CliError::Missing("--f"))?;
        self.on_configured_space(self.load(path)?)
    }

    /// Applies `space.kind` to a loaded function.
    fn on_configured_space(&self, f: SampledFunction) -> CliResult<SampledFunction> {
        match self.config.space.kind {
            SpaceKind::Interval => Ok(f),
            SpaceKind::Counting => {
                if let Some(w) = f.space().weights().iter().find(|&&w| w != 1.0) {
                    return Err(CliError::Input(format!(
                        "counting space needs unit weights, found {w}"
                    )));
                }
                Ok(f)
            }
            SpaceKind::Cyclic => {
                let w = uniform_group_weight(&f)?;
                let space = Arc::new(MeasureSpace::cyclic(f.len(), w)?);
                Ok(f.rehome(space)?)
            }
        }
    }

    /// A generated space following `space.kind` with `space.atoms` atoms.
    fn generated_space(&self) -> CliResult<Arc<MeasureSpace>> {
        let n = self.config.space.atoms;
        let weight = match self.config.space.normalization {
            crate::config::NormalizationConfig::Probability => 1.0 / n as f64,
            crate::config::NormalizationConfig::Counting => 1.0,
        };
        Ok(Arc::new(match self.config.space.kind {
            SpaceKind::Cyclic => MeasureSpace::cyclic(n, weight)?,
            SpaceKind::Interval => MeasureSpace::uniform_interval(n, weight)?,
            SpaceKind::Counting => MeasureSpace::counting(n)?,
        }))
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    fn trials(&self) -> usize {
        self.config.trials.max(1)
    }

    fn warnings(&self) -> Vec<String> {
        let e = &self.config.exponents;
        match e.theta_global {
            Some(t) if t != e.theta => vec!["experimental-theta-global".to_string()],
            _ => Vec::new(),
        }
    }
}

fn uniform_group_weight(f: &SampledFunction) -> CliResult<f64> {
    let space = f.space();
    if let Some((k, &p)) = space
        .points()
        .iter()
        .enumerate()
        .find(|&(k, &p)| p != k as i64)
    {
        return Err(CliError::Input(format!(
            "group elements must be 0..{}, found {p} at position {k}",
            space.len()
        )));
    }
    let w = space.weights()[0];
    if space.weights().iter().any(|&x| x != w) {
        return Err(CliError::Input("group weights must be uniform".into()));
    }
    Ok(w)
}

fn random_function(space: &Arc<MeasureSpace>, rng: &mut ChaCha8Rng) -> CliResult<SampledFunction> {
    let values = (0..space.len())
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    Ok(SampledFunction::new(space.clone(), values)?)
}

fn exponents_json(ctx: &Ctx) -> Value {
    let e = &ctx.config.exponents;
    json!({"p": e.p, "q": e.q, "theta": e.theta, "theta_global": e.theta_global})
}

fn cmd_norm(ctx: &Ctx) -> CliResult<Document> {
    let f = ctx.required_f()?;
    let (local, _) = ctx.config.exponents()?;
    let grid = ctx.config.grid(&local)?;
    let value = grand_norm(&f, &local, &grid)?;
    let profile = epsilon_profile(&f, &local, &grid)?;
    let closure = closure_criterion(&f, &local, &grid, ctx.config.closure.tolerance)?;
    let embedding = embedding_constants(&local, local.eps_upper(), f.space(), &grid)?;
    let body = json!({
        "value": value,
        "argmax_eps": profile.argmax_eps,
        "p": local.p(),
        "theta": local.theta(),
        "lp_norm_p": lp_norm(&f, local.p())?,
        "closure": closure,
        "embedding_upper": embedding.upper,
        "space": {
            "atoms": f.len(),
            "total_mass": f.space().total_mass(),
            "label": f.space().label(),
        },
    });
    Ok(Document::new("norm", Status::Pass, body))
}

fn cmd_profile(ctx: &Ctx, csv: Option<&PathBuf>) -> CliResult<Document> {
    let f = ctx.required_f()?;
    let (local, _) = ctx.config.exponents()?;
    let grid = ctx.config.grid(&local)?;
    let profile = epsilon_profile(&f, &local, &grid)?;
    let csv_path = csv.cloned().or_else(|| {
        ctx.cli
            .out
            .as_ref()
            .map(|o| o.with_extension("profile.csv"))
    });
    if let Some(path) = &csv_path {
        write_text(path, &profile.to_csv())?;
    }
    let body = json!({
        "sup_value": profile.sup_value,
        "argmax_eps": profile.argmax_eps,
        "p": local.p(),
        "theta": local.theta(),
        "csv": csv_path.map(|p| p.display().to_string()),
        "entries": profile.entries,
    });
    Ok(Document::new("profile", Status::Pass, body))
}

fn cmd_amalgam(ctx: &Ctx) -> CliResult<Document> {
    let f = ctx.required_f()?;
    let (local, global) = ctx.config.exponents()?;
    let (gp, gq) = (ctx.config.grid(&local)?, ctx.config.grid(&global)?);
    let q = ctx.config.window(f.space())?;
    let value = amalgam_norm(&f, &q, &local, &global, &gp, &gq)?;
    let control = control_function(&f, &q, &local, &gp)?;
    let body = json!({
        "value": value,
        "exponents": exponents_json(ctx),
        "window": {"points": q.points(), "mass": q.mass()},
        "control_function": f.space().points().iter().zip(control.values())
            .map(|(x, v)| json!({"x": x, "value": v}))
            .collect::<Vec<_>>(),
    });
    Ok(Document::new("amalgam", Status::Pass, body).with_warnings(ctx.warnings()))
}

fn cmd_bupu_validate(ctx: &Ctx) -> CliResult<Document> {
    let space = match &ctx.cli.f {
        Some(_) => ctx.required_f()?.space().clone(),
        None => ctx.generated_space()?,
    };
    let psi = make_uniform_bupu(space, ctx.config.bupu.block_size)?;
    let validation = validate_bupu(&psi);
    let spread = well_spread_check(psi.centers(), psi.window());
    let status = if validation.all_pass() {
        Status::Pass
    } else {
        Status::Fail
    };
    let mut warnings = Vec::new();
    if psi.is_ragged() {
        warnings.push("ragged-final-block".to_string());
    }
    let body = json!({
        "functions": psi.len(),
        "block_size": ctx.config.bupu.block_size,
        "centers": psi.centers(),
        "window": {"points": psi.window().points(), "mass": psi.window().mass()},
        "sup_bound": psi.sup_bound(),
        "bupu_validation": validation,
        "failures": validation.failures(),
        "well_spread": spread,
    });
    Ok(Document::new("bupu-validate", status, body).with_warnings(warnings))
}

fn conv_group(ctx: &Ctx, n: usize) -> CliResult<FiniteAbelianGroup> {
    Ok(FiniteAbelianGroup::cyclic(
        n,
        ctx.config.space.normalization.into(),
    )?)
}

/// Moves a loaded function onto the group, which must have the same size and
/// Haar weight.
fn onto_group(f: SampledFunction, group: &FiniteAbelianGroup) -> CliResult<SampledFunction> {
    let w = uniform_group_weight(&f)?;
    if f.len() != group.order() {
        return Err(CliError::Input(format!(
            "function has {} points, group has {}",
            f.len(),
            group.order()
        )));
    }
    if w != group.haar_weight() {
        return Err(CliError::Input(format!(
            "function weight {w} does not match the {:?} Haar weight {}",
            group.normalization(),
            group.haar_weight()
        )));
    }
    Ok(f.rehome(group.space().clone())?)
}

enum ConvOutcome {
    Grand(grand_amalgam::convolution::SubmultiplicativityReport),
    Amalgam(grand_amalgam::convolution::AmalgamSubmultiplicativityReport),
}

impl ConvOutcome {
    fn pass(&self) -> bool {
        match self {
            ConvOutcome::Grand(r) => r.pass,
            ConvOutcome::Amalgam(r) => r.pass,
        }
    }

    fn ratio(&self) -> Option<f64> {
        match self {
            ConvOutcome::Grand(r) => r.ratio,
            ConvOutcome::Amalgam(r) => r.ratio,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            ConvOutcome::Grand(r) => serde_json::to_value(r),
            ConvOutcome::Amalgam(r) => serde_json::to_value(r),
        }
        .expect("report serializes")
    }
}

fn cmd_conv_check(ctx: &Ctx, amalgam: bool) -> CliResult<Document> {
    let (local, global) = ctx.config.exponents()?;
    let (gp, gq) = (ctx.config.grid(&local)?, ctx.config.grid(&global)?);
    let loaded = match &ctx.cli.f {
        Some(path) => Some(ctx.load(path)?),
        None => None,
    };
    let n = loaded.as_ref().map_or(ctx.config.space.atoms, |f| f.len());
    let group = conv_group(ctx, n)?;
    let q = ctx.config.window(group.space())?;

    let check = |f: &SampledFunction, g: &SampledFunction| -> CliResult<ConvOutcome> {
        Ok(if amalgam {
            ConvOutcome::Amalgam(amalgam_submultiplicativity_check(
                f, g, &group, &q, &local, &global, &gp, &gq,
            )?)
        } else {
            ConvOutcome::Grand(submultiplicativity_check(f, g, &group, &local, &gp)?)
        })
    };

    let (pass, body) = match loaded {
        Some(f) => {
            let f = onto_group(f, &group)?;
            let g = match &ctx.cli.g {
                Some(path) => onto_group(ctx.load(path)?, &group)?,
                None => f.clone(),
            };
            let outcome = check(&f, &g)?;
            (outcome.pass(), outcome.to_json())
        }
        None => {
            if ctx.cli.g.is_some() {
                return Err(CliError::Missing("--f (given --g)"));
            }
            let mut rng = ctx.rng();
            let mut failures = 0usize;
            let mut worst: Option<(f64, ConvOutcome)> = None;
            for _ in 0..ctx.trials() {
                let f = random_function(group.space(), &mut rng)?;
                let g = random_function(group.space(), &mut rng)?;
                let outcome = check(&f, &g)?;
                if !outcome.pass() {
                    failures += 1;
                }
                let r = outcome.ratio().unwrap_or(0.0);
                if worst.as_ref().map_or(true, |(w, _)| r > *w) {
                    worst = Some((r, outcome));
                }
            }
            let (max_ratio, worst) = worst.expect("at least one trial");
            (
                failures == 0,
                json!({
                    "trials": ctx.trials(),
                    "seed": ctx.seed,
                    "failures": failures,
                    "max_ratio": max_ratio,
                    "worst": worst.to_json(),
                }),
            )
        }
    };

    let mut body = body;
    body["group"] = json!({
        "order": group.order(),
        "normalization": group.normalization(),
        "haar_weight": group.haar_weight(),
    });
    body["exponents"] = exponents_json(ctx);
    body["mode"] = json!(if amalgam { "amalgam" } else { "grand" });
    let mut warnings = ctx.warnings();
    let status = if !group.is_compact_model() {
        warnings.insert(0, HYPOTHESES_NOT_MET.to_string());
        Status::NotApplicable
    } else if pass {
        Status::Pass
    } else {
        Status::Fail
    };
    Ok(Document::new("conv-check", status, body).with_warnings(warnings))
}

fn cmd_witness(ctx: &Ctx, m: Option<usize>, p: Option<f64>) -> CliResult<Document> {
    let m = m.unwrap_or(ctx.config.witness.m);
    let p = p.unwrap_or(ctx.config.exponents.p);
    let w = noncompact_witness(m, p)?;
    let mut body = serde_json::to_value(w).expect("report serializes");
    body["ratio"] = json!(w.ratio_m);
    let status = if w.growing {
        Status::Pass
    } else {
        Status::Fail
    };
    Ok(Document::new("witness", status, body))
}

fn equivalence_summary(reports: &[EquivalenceReport]) -> Value {
    let ratios: Vec<f64> = reports
        .iter()
        .filter_map(|r| r.ratios.continuous_over_discrete)
        .collect();
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    json!({
        "continuous_over_discrete_min": (!ratios.is_empty()).then_some(lo),
        "continuous_over_discrete_max": (!ratios.is_empty()).then_some(hi),
    })
}

fn cmd_equivalence(ctx: &Ctx) -> CliResult<Document> {
    let (local, global) = ctx.config.exponents()?;
    let (gp, gq) = (ctx.config.grid(&local)?, ctx.config.grid(&global)?);
    let options = EquivalenceOptions {
        allow_ragged: ctx.config.bupu.allow_ragged,
    };
    let given = match &ctx.cli.f {
        Some(_) => Some(ctx.required_f()?),
        None => None,
    };
    let space = match &given {
        Some(f) => f.space().clone(),
        None => ctx.generated_space()?,
    };
    let psi = make_uniform_bupu(space.clone(), ctx.config.bupu.block_size)?;
    let q = ctx.config.window(&space)?;
    let run =
        |f: &SampledFunction| equivalence_report(f, &q, &psi, &local, &global, &gp, &gq, options);

    let (pass, mut body) = match given {
        Some(f) => {
            let r = run(&f)?;
            (
                r.within_bounds,
                serde_json::to_value(&r).expect("report serializes"),
            )
        }
        None => {
            let mut rng = ctx.rng();
            let mut reports = Vec::with_capacity(ctx.trials());
            for _ in 0..ctx.trials() {
                reports.push(run(&random_function(&space, &mut rng)?)?);
            }
            let failures = reports.iter().filter(|r| !r.within_bounds).count();
            let mut summary = equivalence_summary(&reports);
            summary["trials"] = json!(reports.len());
            summary["seed"] = json!(ctx.seed);
            summary["failures"] = json!(failures);
            summary["first"] = serde_json::to_value(&reports[0]).expect("report serializes");
            (failures == 0, summary)
        }
    };
    body["exponents"] = exponents_json(ctx);
    body["window"] = json!({"points": q.points(), "mass": q.mass()});
    let status = if pass { Status::Pass } else { Status::Fail };
    Ok(Document::new("equivalence", status, body).with_warnings(ctx.warnings()))
}

fn dispatch(cli: &Cli) -> CliResult<Document> {
    let config = load_or_default(cli.config.as_ref())?;
    let seed = cli.seed.unwrap_or(config.seed);
    let ctx = Ctx { cli, config, seed };
    match &cli.command {
        Command::Norm => cmd_norm(&ctx),
        Command::Profile { csv } => cmd_profile(&ctx, csv.as_ref()),
        Command::Amalgam => cmd_amalgam(&ctx),
        Command::BupuValidate => cmd_bupu_validate(&ctx),
        Command::ConvCheck { amalgam } => cmd_conv_check(&ctx, *amalgam),
        Command::Witness { m, p } => cmd_witness(&ctx, *m, *p),
        Command::Equivalence => cmd_equivalence(&ctx),
    }
}

/// Runs one command. Input errors become an error document.
pub fn run(cli: &Cli) -> Document {
    dispatch(cli).unwrap_or_else(|e| Document::error(cli.command.name(), &e))
}

/// Runs the command and writes its report to `--out` or standard output.
/// Returns the process exit code.
pub fn execute(cli: &Cli) -> u8 {
    let doc = run(cli);
    let text = doc.render();
    if let Some(Value::Object(err)) = doc.body.get("error") {
        if let Some(msg) = err.get("message").and_then(Value::as_str) {
            eprintln!("grandam: {msg}");
        }
    }
    match &cli.out {
        Some(path) => {
            if let Err(e) = write_text(path, &text) {
                eprintln!("grandam: {e}");
                print!("{}", Document::error(cli.command.name(), &e).render());
                return 2;
            }
        }
        None => print!("{text}"),
    }
    doc.exit_code()
}
