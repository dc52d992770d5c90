//! The `infogeo` command line.
//!
//! Settings resolve in three layers: built-in defaults, then an optional JSON
//! file given by `--config`, then explicit flags.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::families::ParameterPoint;
use crate::geodesics::{integrate, ClosedFormGeodesic, GeodesicInitialConditions, Integrator};
use crate::geometry::{self, classify_symmetry, MIN_PROBES};
use crate::ige::{self, GrowthClass};
use crate::metrics::{inverse_metric, Metrization};
use crate::report::{json_document, Cell, Table};
use crate::verify::{self, CheckGroup, VerifyOptions};

#[derive(Debug, Parser)]
#[command(name = "infogeo", version, about = "Information geometry of the Gaussian manifold")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetrizationChoice {
    Fr,
    Alpha,
    Both,
}

impl MetrizationChoice {
    fn expand(self) -> Vec<Metrization> {
        match self {
            MetrizationChoice::Fr => vec![Metrization::FisherRao],
            MetrizationChoice::Alpha => vec![Metrization::AlphaOrder],
            MetrizationChoice::Both => Metrization::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntegratorChoice {
    Euler,
    Rk4,
}

impl From<IntegratorChoice> for Integrator {
    fn from(c: IntegratorChoice) -> Self {
        match c {
            IntegratorChoice::Euler => Integrator::ForwardEuler,
            IntegratorChoice::Rk4 => Integrator::Rk4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

fn parse_floats(s: &str, n: usize) -> std::result::Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}")))
        .collect::<std::result::Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated numbers, got {}", v.len()));
    }
    Ok(v)
}

fn parse_pair(s: &str) -> std::result::Result<[f64; 2], String> {
    parse_floats(s, 2).map(|v| [v[0], v[1]])
}

fn parse_quad(s: &str) -> std::result::Result<[f64; 4], String> {
    parse_floats(s, 4).map(|v| [v[0], v[1], v[2], v[3]])
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    #[arg(long, global = true, value_enum)]
    pub metrization: Option<MetrizationChoice>,
    /// Parameter point `mu,sigma`; repeatable.
    #[arg(long = "point", global = true, value_parser = parse_pair, allow_hyphen_values = true)]
    pub points: Vec<[f64; 2]>,
    /// Initial conditions `mu,sigma,mu_dot,sigma_dot`.
    #[arg(long, global = true, value_parser = parse_quad, allow_hyphen_values = true)]
    pub ic: Option<[f64; 4]>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub step: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub tau_max: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub integrator: Option<IntegratorChoice>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON file with any of the settings above; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Metric components and their inverse.
    Metric,
    /// Curvature report and symmetry verdict.
    Curvature(CurvatureArgs),
    /// Geodesic trajectories.
    Geodesic(GeodesicArgs),
    /// Information geometric entropy curves and growth class.
    Ige(IgeArgs),
    /// Run the self-check suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct CurvatureArgs {
    /// Probe sigmas at `mu = 0`, comma-separated; replaces `--point`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub sigma_probes: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct GeodesicArgs {
    /// Add closed-form columns and the largest pointwise gap.
    #[arg(long)]
    pub closed_form: bool,
}

#[derive(Debug, Args)]
pub struct IgeArgs {
    /// Number of tau samples, including `tau = 0`.
    #[arg(long, default_value_t = 5001)]
    pub samples: usize,
    /// Fisher-Rao geodesic rate.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub lambda: f64,
    /// Alpha-order geodesic rate.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub alpha_a: f64,
    /// Add closed-form IGC columns.
    #[arg(long)]
    pub check_closed_form: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Restrict to check groups; repeatable or comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
    /// Override every check tolerance.
    #[arg(long, allow_hyphen_values = true)]
    pub tolerance: Option<f64>,
}

/// Contents of a `--config` file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub metrization: Option<MetrizationChoice>,
    pub points: Option<Vec<[f64; 2]>>,
    pub ic: Option<[f64; 4]>,
    pub step: Option<f64>,
    pub tau_max: Option<f64>,
    pub integrator: Option<IntegratorChoice>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

/// Fully resolved settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub metrizations: Vec<Metrization>,
    pub points: Vec<ParameterPoint>,
    pub ic: GeodesicInitialConditions,
    pub step: f64,
    pub tau_max: Option<f64>,
    pub integrator: Integrator,
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

pub const DEFAULT_STEP: f64 = 1e-3;
pub const DEFAULT_GEODESIC_TAU_MAX: f64 = 10.0;

impl RunConfig {
    pub fn resolve(args: &GlobalArgs) -> Result<Self> {
        let file = match &args.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Error::Domain(format!("cannot read config {}: {e}", path.display())))?;
                serde_json::from_str::<ConfigFile>(&text)
                    .map_err(|e| Error::Domain(format!("invalid config {}: {e}", path.display())))?
            }
            None => ConfigFile::default(),
        };
        let metrizations = args
            .metrization
            .or(file.metrization)
            .unwrap_or(MetrizationChoice::Both)
            .expand();
        let raw_points = if args.points.is_empty() {
            file.points.unwrap_or_else(|| vec![[0.0, 1.0]])
        } else {
            args.points.clone()
        };
        let points = raw_points
            .iter()
            .map(|[m, s]| ParameterPoint::new(*m, *s))
            .collect::<Result<Vec<_>>>()?;
        let ic = match args.ic.or(file.ic) {
            Some([m, s, md, sd]) => GeodesicInitialConditions::new(m, s, md, sd)?,
            None => GeodesicInitialConditions::standard(),
        };
        let step = args.step.or(file.step).unwrap_or(DEFAULT_STEP);
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::Domain(format!("step must be positive, got {step}")));
        }
        let tau_max = args.tau_max.or(file.tau_max);
        if let Some(t) = tau_max {
            if !(t > 0.0) || !t.is_finite() {
                return Err(Error::Domain(format!("tau-max must be positive, got {t}")));
            }
        }
        Ok(Self {
            metrizations,
            points,
            ic,
            step,
            tau_max,
            integrator: args
                .integrator
                .or(file.integrator)
                .unwrap_or(IntegratorChoice::Rk4)
                .into(),
            format: args.format.or(file.format).unwrap_or(Format::Csv),
            out: args.out.clone().or(file.out),
        })
    }
}

/// Result of one command: the document for stdout or `--out`, a human
/// summary for stderr, and whether the command succeeded.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub document: String,
    pub summary: String,
    pub success: bool,
    /// Destination resolved from `--out` or the config file.
    pub out: Option<PathBuf>,
}

fn render(
    cfg: &RunConfig,
    command: &str,
    extra: serde_json::Value,
    table: &Table,
    metadata: serde_json::Value,
) -> String {
    match cfg.format {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let mut config = serde_json::to_value(cfg).expect("config serializes");
            config["command"] = json!(command);
            if let (Some(obj), serde_json::Value::Object(more)) = (config.as_object_mut(), extra) {
                obj.extend(more);
            }
            json_document(config, table, metadata)
        }
    }
}

fn cmd_metric(cfg: &RunConfig) -> Result<Outcome> {
    let mut t = Table::new([
        "metrization",
        "mu",
        "sigma",
        "g11",
        "g12",
        "g22",
        "inv11",
        "inv12",
        "inv22",
    ]);
    for &m in &cfg.metrizations {
        for p in &cfg.points {
            let g = m.metric(p);
            let inv = inverse_metric(&g)?;
            t.push(vec![
                m.label().into(),
                p.mu().into(),
                p.sigma().into(),
                g.g11().into(),
                g.g12().into(),
                g.g22().into(),
                inv.g11().into(),
                inv.g12().into(),
                inv.g22().into(),
            ]);
        }
    }
    Ok(Outcome {
        document: render(cfg, "metric", json!({}), &t, json!({})),
        summary: format!("{} metric rows\n", t.rows().len()),
        success: true,
        out: None,
    })
}

fn cmd_curvature(cfg: &RunConfig, args: &CurvatureArgs) -> Result<Outcome> {
    let probes = if args.sigma_probes.is_empty() {
        cfg.points.clone()
    } else {
        args.sigma_probes
            .iter()
            .map(|&s| ParameterPoint::new(0.0, s))
            .collect::<Result<Vec<_>>>()?
    };
    let mut t = Table::new([
        "metrization",
        "mu",
        "sigma",
        "scalar",
        "sectional",
        "ricci11",
        "ricci12",
        "ricci22",
        "weyl_max_abs",
        "isotropic",
        "homogeneous",
        "maximally_symmetric",
    ]);
    let mut summary = String::new();
    let mut verdicts = serde_json::Map::new();
    for &m in &cfg.metrizations {
        let verdict = if probes.len() >= MIN_PROBES {
            Some(classify_symmetry(m, &probes)?)
        } else {
            None
        };
        let flag =
            |f: fn(&geometry::SymmetryVerdict) -> bool| verdict.as_ref().map_or(Cell::Missing, |v| Cell::Bool(f(v)));
        for p in &probes {
            let r = geometry::curvature_report(m, p);
            t.push(vec![
                m.label().into(),
                p.mu().into(),
                p.sigma().into(),
                r.scalar.into(),
                r.sectional.into(),
                r.ricci[0][0].into(),
                r.ricci[0][1].into(),
                r.ricci[1][1].into(),
                r.weyl_max_abs.into(),
                flag(|v| v.isotropic),
                flag(|v| v.homogeneous),
                flag(|v| v.maximally_symmetric),
            ]);
        }
        match &verdict {
            Some(v) => {
                summary.push_str(&format!(
                    "{}: isotropic={} homogeneous={} maximally_symmetric={}\n",
                    m.label(),
                    v.isotropic,
                    v.homogeneous,
                    v.maximally_symmetric
                ));
                verdicts.insert(m.label().into(), serde_json::to_value(v).expect("verdict serializes"));
            }
            None => summary.push_str(&format!(
                "{}: symmetry verdict needs at least {MIN_PROBES} probes\n",
                m.label()
            )),
        }
    }
    let probe_list: Vec<_> = probes.iter().map(|p| [p.mu(), p.sigma()]).collect();
    Ok(Outcome {
        document: render(
            cfg,
            "curvature",
            json!({ "probes": probe_list }),
            &t,
            json!({ "symmetry": verdicts }),
        ),
        summary,
        success: true,
        out: None,
    })
}

/// Closed-form geodesic matching `ic`, where one exists.
fn closed_form_for(m: Metrization, ic: &GeodesicInitialConditions) -> Result<ClosedFormGeodesic> {
    match m {
        Metrization::FisherRao => ClosedFormGeodesic::fisher_rao_from_initial_conditions(ic),
        Metrization::AlphaOrder => {
            if ic.mu0 != 0.0 || ic.sigma0 != 1.0 {
                return Err(Error::Domain(
                    "the alpha-order closed form starts at (0, 1); use --ic 0,1,a,0".into(),
                ));
            }
            ClosedFormGeodesic::alpha_moduli(ic.mu_dot0.abs())
        }
    }
}

fn cmd_geodesic(cfg: &RunConfig, args: &GeodesicArgs) -> Result<Outcome> {
    let tau_max = cfg.tau_max.unwrap_or(DEFAULT_GEODESIC_TAU_MAX);
    let mut columns = vec!["metrization", "integrator", "tau", "mu", "sigma", "mu_dot", "sigma_dot"];
    if args.closed_form {
        columns.extend(["mu_closed", "sigma_closed", "gap"]);
    }
    let mut t = Table::new(columns);
    let mut summary = String::new();
    let mut meta = serde_json::Map::new();
    for &m in &cfg.metrizations {
        let path = integrate(m, &cfg.ic, cfg.step, tau_max, cfg.integrator)?;
        let exact = if args.closed_form {
            Some(closed_form_for(m, &cfg.ic)?)
        } else {
            None
        };
        let mut max_gap: f64 = 0.0;
        for s in &path.samples {
            let mut row: Vec<Cell> = vec![
                m.label().into(),
                cfg.integrator.label().into(),
                s.tau.into(),
                s.state.mu.into(),
                s.state.sigma.into(),
                s.state.mu_dot.into(),
                s.state.sigma_dot.into(),
            ];
            if let Some(g) = &exact {
                let (mu, sigma) = g.position(s.tau)?;
                let gap = (s.state.mu - mu).abs().max((s.state.sigma - sigma).abs());
                max_gap = max_gap.max(gap);
                row.extend([mu.into(), sigma.into(), gap.into()]);
            }
            t.push(row);
        }
        let last = path.last();
        let mut entry = serde_json::Map::new();
        entry.insert("samples".into(), json!(path.samples.len()));
        entry.insert("halt".into(), json!(path.halt.map(|h| h.describe())));
        entry.insert("halt_tau".into(), json!(path.halt.map(|h| h.tau())));
        summary.push_str(&format!(
            "{}: {} samples, final tau={} mu={:.6} sigma={:.6}",
            m.label(),
            path.samples.len(),
            last.tau,
            last.state.mu,
            last.state.sigma
        ));
        if let Some(h) = path.halt {
            summary.push_str(&format!(", halted: {}", h.describe()));
        }
        if exact.is_some() {
            entry.insert("max_gap".into(), json!(max_gap));
            summary.push_str(&format!(", max closed-form gap={max_gap:.3e}"));
            if m == Metrization::AlphaOrder {
                entry.insert("closed_form".into(), json!("moduli of the complex-mean solution"));
            }
        }
        summary.push('\n');
        meta.insert(m.label().into(), serde_json::Value::Object(entry));
    }
    Ok(Outcome {
        document: render(
            cfg,
            "geodesic",
            json!({ "tau_max": tau_max, "closed_form": args.closed_form }),
            &t,
            serde_json::Value::Object(meta),
        ),
        summary,
        success: true,
        out: None,
    })
}

/// Default horizon for the entropy curves.
pub fn default_ige_tau_max(m: Metrization) -> f64 {
    match m {
        Metrization::FisherRao => 50.0,
        Metrization::AlphaOrder => 1e4,
    }
}

fn cmd_ige(cfg: &RunConfig, args: &IgeArgs) -> Result<Outcome> {
    let mut columns = vec!["metrization", "tau", "volume", "avg_volume", "ige"];
    if args.check_closed_form {
        columns.extend(["igc_closed_form", "relative_gap"]);
    }
    let mut t = Table::new(columns);
    let mut summary = format!(
        "{:<12}{:<14}{:<14}{:>12}{:>12}\n",
        "metrization", "IGC growth", "IGE growth", "slope", "r_squared"
    );
    let mut meta = serde_json::Map::new();
    for &m in &cfg.metrizations {
        let tau_max = cfg.tau_max.unwrap_or_else(|| default_ige_tau_max(m));
        let grid = ige::uniform_grid(tau_max, args.samples)?;
        let geodesic = match m {
            Metrization::FisherRao => ClosedFormGeodesic::fisher_rao(args.lambda, 0.0, 1.0)?,
            Metrization::AlphaOrder => ClosedFormGeodesic::alpha_moduli(args.alpha_a)?,
        };
        let curve = ige::ige_along(&geodesic, &grid)?;
        let mut worst_gap: f64 = 0.0;
        for p in &curve.points {
            let mut row: Vec<Cell> = vec![
                m.label().into(),
                p.tau.into(),
                p.volume.into(),
                p.avg_volume.into(),
                p.ige.into(),
            ];
            if args.check_closed_form {
                if p.tau > 0.0 {
                    let exact = match m {
                        Metrization::FisherRao => ige::igc_closed_form_fr(args.lambda, p.tau)?,
                        Metrization::AlphaOrder => ige::igc_closed_form_alpha(args.alpha_a, p.tau)?,
                    };
                    let gap = (p.avg_volume - exact).abs() / exact.abs();
                    row.extend([exact.into(), gap.into()]);
                } else {
                    row.extend([Cell::Missing, Cell::Missing]);
                }
            }
            t.push(row);
        }
        if args.check_closed_form {
            worst_gap = verify::closed_form_gap(&curve, &geodesic)?;
        }
        let class = curve.growth_class;
        summary.push_str(&format!(
            "{:<12}{:<14}{:<14}{:>12.6}{:>12.6}\n",
            m.label(),
            class.igc_label(),
            class.label(),
            curve.fit_stats.slope,
            curve.fit_stats.r_squared
        ));
        let mut entry = serde_json::Map::new();
        entry.insert("tau_max".into(), json!(tau_max));
        entry.insert("growth_class".into(), json!(class));
        entry.insert("igc_growth".into(), json!(class.igc_label()));
        entry.insert("fit_stats".into(), json!(curve.fit_stats));
        if args.check_closed_form {
            entry.insert("max_closed_form_gap_last_decade".into(), json!(worst_gap));
            summary.push_str(&format!(
                "{:<12}closed-form gap over last decade: {worst_gap:.3e}\n",
                ""
            ));
        }
        meta.insert(m.label().into(), serde_json::Value::Object(entry));
        if class == GrowthClass::Undetermined {
            summary.push_str(&format!("{:<12}growth could not be classified on this grid\n", ""));
        }
    }
    Ok(Outcome {
        document: render(
            cfg,
            "ige",
            json!({ "samples": args.samples, "lambda": args.lambda, "alpha_a": args.alpha_a }),
            &t,
            serde_json::Value::Object(meta),
        ),
        summary,
        success: true,
        out: None,
    })
}

fn cmd_verify(cfg: &RunConfig, args: &VerifyArgs) -> Result<Outcome> {
    let only = args
        .only
        .iter()
        .map(|s| s.parse::<CheckGroup>())
        .collect::<Result<Vec<_>>>()?;
    let report = verify::run(&VerifyOptions {
        metrizations: cfg.metrizations.clone(),
        only,
        tolerance: args.tolerance,
    });
    let failed: Vec<&str> = report.failed().map(|c| c.name.as_str()).collect();
    let summary = if failed.is_empty() {
        "all checks passed\n".to_string()
    } else {
        format!("failed: {}\n", failed.join(", "))
    };
    Ok(Outcome {
        document: report.render(),
        summary,
        success: report.all_passed(),
        out: None,
    })
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli) -> Result<Outcome> {
    let cfg = RunConfig::resolve(&cli.global)?;
    let mut outcome = match &cli.command {
        Command::Metric => cmd_metric(&cfg),
        Command::Curvature(a) => cmd_curvature(&cfg, a),
        Command::Geodesic(a) => cmd_geodesic(&cfg, a),
        Command::Ige(a) => cmd_ige(&cfg, a),
        Command::Verify(a) => cmd_verify(&cfg, a),
    }?;
    outcome.out = cfg.out;
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("infogeo").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn pair_parsing() {
        assert_eq!(parse_pair("0,-1").unwrap(), [0.0, -1.0]);
        assert!(parse_pair("1").is_err());
        assert!(parse_pair("a,b").is_err());
        assert_eq!(parse_quad("0, 1, 1, 0").unwrap(), [0.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn defaults() {
        let cfg = RunConfig::resolve(&parse(&["metric"]).global).unwrap();
        assert_eq!(cfg.metrizations, Metrization::ALL.to_vec());
        assert_eq!(cfg.ic, GeodesicInitialConditions::standard());
        assert_eq!(cfg.step, 1e-3);
        assert_eq!(cfg.format, Format::Csv);
        assert_eq!(cfg.points.len(), 1);
    }

    #[test]
    fn rejects_bad_settings() {
        let e = RunConfig::resolve(&parse(&["metric", "--point", "0,-1"]).global).unwrap_err();
        assert!(e.to_string().contains("sigma must be positive"));
        assert!(RunConfig::resolve(&parse(&["geodesic", "--tau-max", "0"]).global).is_err());
        assert!(RunConfig::resolve(&parse(&["geodesic", "--step", "-1"]).global).is_err());
    }

    #[test]
    fn metric_rows() {
        let out = execute(&parse(&["metric", "--metrization", "fr", "--point", "0,1"])).unwrap();
        let lines: Vec<&str> = out.document.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[1].starts_with("fr,0.0000000000000000e0,1.0000000000000000e0,1.0000000000000000e0,0.0000000000000000e0,2.0000000000000000e0"));
    }

    #[test]
    fn closed_form_requirements() {
        let ic = GeodesicInitialConditions::new(1.0, 1.0, 1.0, 0.0).unwrap();
        assert!(closed_form_for(Metrization::AlphaOrder, &ic).is_err());
        assert!(closed_form_for(Metrization::FisherRao, &ic).is_ok());
    }
}
