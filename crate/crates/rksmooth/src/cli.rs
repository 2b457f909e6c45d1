//! Command-line front end: scenario/bench config schemas and the
//! implementations behind the `estimate`, `risk`, `bandwidth`, `bench`,
//! `figure` and `selftest` subcommands.
//!
//! All numeric output is printed with six significant digits; reruns with an
//! identical config and seed produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::covariance::CovarianceModel;
use crate::estimators::{build_smoother, EdgeCorrection, Method};
use crate::kernels::kernel_by_name;
use crate::risk::{
    asymptotic_constants, optimal_bandwidth_closed, optimal_bandwidth_exact, risk_report,
    HoptVariant, RiskError, WeightDensity,
};
use crate::simulation::{
    make_dataset, monte_carlo_mise, normality_diagnostic, BandwidthChoice, DesignKind,
    GrowthCurve, Scenario, SimulationError,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config error at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("unknown method {got:?}; valid methods: {valid}")]
    UnknownMethod { got: String, valid: String },
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Risk(#[from] RiskError),
    #[error(transparent)]
    Simulation(#[from] SimulationError),
    #[error(transparent)]
    Estimator(#[from] crate::estimators::EstimatorError),
    #[error("selftest failed: {failures} of {total} checks")]
    SelftestFailed { failures: usize, total: usize },
}

impl CliError {
    /// Exit code contract: 2 for usage/config problems, 1 for runtime
    /// failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema { .. } | CliError::UnknownMethod { .. } | CliError::Config(_) => 2,
            _ => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Schema { .. } => "schema",
            CliError::UnknownMethod { .. } => "unknown-method",
            CliError::Config(_) => "config",
            CliError::Risk(_) => "risk",
            CliError::Simulation(_) => "simulation",
            CliError::Estimator(_) => "estimator",
            CliError::SelftestFailed { .. } => "selftest",
        }
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub seed: Option<u64>,
    pub grid: usize,
    pub boundary: EdgeCorrection,
    pub hopt_variant: HoptVariant,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            seed: None,
            grid: 201,
            boundary: EdgeCorrection::NormalizeWeightSum,
            hopt_variant: HoptVariant::Derived,
        }
    }
}

/// Bandwidth field of a scenario config: a number or "optimal-exact".
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BandwidthField {
    Fixed(f64),
    Named(String),
}

fn default_bandwidth() -> BandwidthField {
    BandwidthField::Named("optimal-exact".into())
}

fn default_replications() -> usize {
    100
}

/// JSON schema of a simulation scenario.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub curve: String,
    pub model: CovarianceModel,
    pub n: usize,
    pub m: usize,
    #[serde(default = "default_design")]
    pub design: String,
    #[serde(default = "default_kernel")]
    pub kernel: String,
    #[serde(default = "default_bandwidth")]
    pub h: BandwidthField,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_design() -> String {
    "midpoint".into()
}

fn default_kernel() -> String {
    "quartic".into()
}

impl ScenarioConfig {
    pub fn to_scenario(&self, seed_override: Option<u64>) -> Result<Scenario, CliError> {
        let curve = match self.curve.as_str() {
            "M1" => GrowthCurve::M1,
            "M2" => GrowthCurve::M2,
            other => {
                return Err(CliError::Config(format!(
                    "unknown curve {other:?}; expected \"M1\" or \"M2\""
                )))
            }
        };
        let design = match self.design.as_str() {
            "midpoint" => DesignKind::Midpoint,
            "regular-uniform" => DesignKind::RegularUniform,
            other => {
                return Err(CliError::Config(format!(
                    "unknown design {other:?}; expected \"midpoint\" or \"regular-uniform\""
                )))
            }
        };
        let kernel = kernel_by_name(&self.kernel).ok_or_else(|| {
            CliError::Config(format!(
                "unknown kernel {:?}; expected \"quartic\" or \"uniform\"",
                self.kernel
            ))
        })?;
        let bandwidth = match &self.h {
            BandwidthField::Fixed(h) => {
                if !(*h > 0.0 && *h < 1.0) {
                    return Err(CliError::Config(format!("h must lie in (0, 1), got {h}")));
                }
                BandwidthChoice::Fixed(*h)
            }
            BandwidthField::Named(name) if name == "optimal-exact" => BandwidthChoice::OptimalExact,
            BandwidthField::Named(other) => {
                return Err(CliError::Config(format!(
                    "unknown bandwidth spec {other:?}; expected a number or \"optimal-exact\""
                )))
            }
        };
        Ok(Scenario {
            curve,
            model: self.model.clone(),
            n: self.n,
            m: self.m,
            design,
            kernel,
            bandwidth,
            replications: self.replications,
            seed: seed_override.unwrap_or(self.seed),
        })
    }
}

/// One block of a benchmark config (a model/curve pair swept over m).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchBlock {
    #[serde(default)]
    pub name: String,
    pub model: CovarianceModel,
    pub curve: String,
    pub n: usize,
    pub m_list: Vec<usize>,
    pub methods: Vec<String>,
    #[serde(default = "default_kernel")]
    pub kernel: String,
    #[serde(default = "default_design")]
    pub design: String,
    /// Optional [lo, hi] bandwidth search interval.
    #[serde(default)]
    pub h_interval: Option<(f64, f64)>,
}

/// JSON schema of a benchmark config.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub blocks: Vec<BenchBlock>,
    #[serde(default = "default_grid")]
    pub grid: usize,
}

fn default_grid() -> usize {
    201
}

/// Figure config: a scenario swept over several unit counts.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureConfig {
    #[serde(flatten)]
    pub scenario: ScenarioConfig,
    pub m_list: Vec<usize>,
    #[serde(default = "default_method")]
    pub method: String,
}

fn default_method() -> String {
    "pro".into()
}

pub fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| CliError::Schema {
        path: format!("{}:{}", path.display(), e.path()),
        message: e.inner().to_string(),
    })
}

fn resolve_method(name: &str, model: &CovarianceModel) -> Result<Method, CliError> {
    Method::from_cli_name(name, model).ok_or_else(|| CliError::UnknownMethod {
        got: name.to_string(),
        valid: Method::CLI_NAMES.join(", "),
    })
}

/// Six significant digits, scientific notation.
fn fmt_sig(x: f64) -> String {
    format!("{x:.5e}")
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn resolve_bandwidth(
    scenario: &Scenario,
    method: Method,
    opts: &Options,
) -> Result<f64, CliError> {
    match scenario.bandwidth {
        BandwidthChoice::Fixed(h) => Ok(h),
        BandwidthChoice::OptimalExact => {
            let design = scenario.design.build(scenario.n).map_err(SimulationError::from)?;
            let (h, _) = optimal_bandwidth_exact(
                method,
                &scenario.model,
                &scenario.curve,
                &scenario.kernel,
                &design,
                scenario.m,
                &WeightDensity::uniform(),
                opts.grid,
                opts.boundary,
                None,
            )?;
            Ok(h)
        }
    }
}

/// `estimate`: draw one dataset from the scenario and write the estimated
/// curve (x, ghat) over the grid.
pub fn cmd_estimate(
    config: &Path,
    method_name: &str,
    h_override: Option<f64>,
    out: &Path,
    opts: &Options,
) -> Result<(), CliError> {
    let cfg: ScenarioConfig = load_json(config)?;
    let scenario = cfg.to_scenario(opts.seed)?;
    let method = resolve_method(method_name, &scenario.model)?;
    let h = match h_override {
        Some(h) => h,
        None => resolve_bandwidth(&scenario, method, opts)?,
    };
    let data = make_dataset(&scenario)?;
    let mut csv = String::new();
    writeln!(csv, "# seed={} method={} h={}", scenario.seed, method_name, fmt_sig(h)).unwrap();
    writeln!(csv, "x,ghat").unwrap();
    for i in 0..opts.grid {
        let x = i as f64 / (opts.grid as f64 - 1.0);
        let sm = build_smoother(
            method,
            &scenario.model,
            &scenario.kernel,
            &data.design,
            x,
            h,
            opts.boundary,
        )?;
        let est = sm.estimate(&data.ybar)?;
        writeln!(csv, "{},{}", fmt_sig(x), fmt_sig(est)).unwrap();
    }
    write_file(out, &csv)
}

/// `risk`: exact risk report of a method at a bandwidth; CSV per grid point
/// plus a JSON summary on stdout (returned as a string for testability).
pub fn cmd_risk(
    config: &Path,
    method_name: &str,
    h_override: Option<f64>,
    out: &Path,
    opts: &Options,
) -> Result<String, CliError> {
    let cfg: ScenarioConfig = load_json(config)?;
    let scenario = cfg.to_scenario(opts.seed)?;
    let method = resolve_method(method_name, &scenario.model)?;
    let h = match h_override {
        Some(h) => h,
        None => resolve_bandwidth(&scenario, method, opts)?,
    };
    let design = scenario.design.build(scenario.n).map_err(SimulationError::from)?;
    let report = risk_report(
        method,
        &scenario.model,
        &scenario.curve,
        &scenario.kernel,
        &design,
        h,
        scenario.m,
        &WeightDensity::uniform(),
        opts.grid,
        opts.boundary,
    )?;
    let mut csv = String::new();
    writeln!(csv, "x,bias2,var,mse").unwrap();
    for p in &report.points {
        writeln!(
            csv,
            "{},{},{},{}",
            fmt_sig(p.x),
            fmt_sig(p.bias2),
            fmt_sig(p.variance),
            fmt_sig(p.mse)
        )
        .unwrap();
    }
    write_file(out, &csv)?;
    let summary = serde_json::json!({
        "method": method_name,
        "h": report.h,
        "m": report.m,
        "Ibias2": report.ibias2,
        "Ivar": report.ivar,
        "IMSE": report.imse,
    });
    Ok(serde_json::to_string_pretty(&summary).unwrap())
}

/// `bandwidth`: exact-IMSE optimal bandwidth plus, when defined, the closed
/// form asymptotic h* in both printed variants. JSON on stdout.
pub fn cmd_bandwidth(config: &Path, method_name: &str, opts: &Options) -> Result<String, CliError> {
    let cfg: ScenarioConfig = load_json(config)?;
    let scenario = cfg.to_scenario(opts.seed)?;
    let method = resolve_method(method_name, &scenario.model)?;
    let design = scenario.design.build(scenario.n).map_err(SimulationError::from)?;
    let (h, imse) = optimal_bandwidth_exact(
        method,
        &scenario.model,
        &scenario.curve,
        &scenario.kernel,
        &design,
        scenario.m,
        &WeightDensity::uniform(),
        opts.grid,
        opts.boundary,
        None,
    )?;
    let mut summary = serde_json::json!({
        "method": method_name,
        "h_opt": h,
        "imse": imse,
        "m": scenario.m,
        "n": scenario.n,
    });
    let consts = asymptotic_constants(
        &scenario.model,
        &scenario.curve,
        &scenario.kernel,
        &WeightDensity::uniform(),
        None,
    )?;
    if let (Ok(derived), Ok(paper)) = (
        optimal_bandwidth_closed(&consts, scenario.m, HoptVariant::Derived),
        optimal_bandwidth_closed(&consts, scenario.m, HoptVariant::Paper),
    ) {
        summary["h_star_closed"] = serde_json::json!({
            "derived": derived,
            "paper": paper,
            "selected": match opts.hopt_variant {
                HoptVariant::Derived => derived,
                HoptVariant::Paper => paper,
            },
        });
    }
    Ok(serde_json::to_string_pretty(&summary).unwrap())
}

/// `bench`: reproduce benchmark tables. One CSV row per (block, method, m)
/// with the optimal bandwidth and the exact integrated risk decomposition.
pub fn cmd_bench(config: &Path, out: &Path, opts: &Options) -> Result<(), CliError> {
    let cfg: BenchConfig = load_json(config)?;
    if cfg.blocks.is_empty() {
        return Err(CliError::Config("bench config needs at least one block".into()));
    }
    let mut csv = String::from("block,method,m,Ibias2,Ivar,IMSE,h_opt\n");
    for (bi, block) in cfg.blocks.iter().enumerate() {
        if block.m_list.is_empty() {
            return Err(CliError::Config(format!("block {bi}: m_list must be nonempty")));
        }
        if block.methods.is_empty() {
            return Err(CliError::Config(format!("block {bi}: methods must be nonempty")));
        }
        let curve = match block.curve.as_str() {
            "M1" => GrowthCurve::M1,
            "M2" => GrowthCurve::M2,
            other => return Err(CliError::Config(format!("block {bi}: unknown curve {other:?}"))),
        };
        let kernel = kernel_by_name(&block.kernel)
            .ok_or_else(|| CliError::Config(format!("block {bi}: unknown kernel {:?}", block.kernel)))?;
        let design_kind = match block.design.as_str() {
            "midpoint" => DesignKind::Midpoint,
            "regular-uniform" => DesignKind::RegularUniform,
            other => return Err(CliError::Config(format!("block {bi}: unknown design {other:?}"))),
        };
        let design = design_kind.build(block.n).map_err(SimulationError::from)?;
        let label = if block.name.is_empty() {
            format!("block{bi}")
        } else {
            block.name.clone()
        };
        for method_name in &block.methods {
            let method = resolve_method(method_name, &block.model)?;
            for &m in &block.m_list {
                let (h, _) = optimal_bandwidth_exact(
                    method,
                    &block.model,
                    &curve,
                    &kernel,
                    &design,
                    m,
                    &WeightDensity::uniform(),
                    cfg.grid,
                    opts.boundary,
                    block.h_interval,
                )?;
                let report = risk_report(
                    method,
                    &block.model,
                    &curve,
                    &kernel,
                    &design,
                    h,
                    m,
                    &WeightDensity::uniform(),
                    cfg.grid,
                    opts.boundary,
                )?;
                writeln!(
                    csv,
                    "{label},{method_name},{m},{},{},{},{}",
                    fmt_sig(report.ibias2),
                    fmt_sig(report.ivar),
                    fmt_sig(report.imse),
                    fmt_sig(h)
                )
                .unwrap();
            }
        }
    }
    write_file(out, &csv)
}

/// `figure`: Monte Carlo mean curves per m value, CSV with one column per m.
pub fn cmd_figure(config: &Path, out: &Path, opts: &Options) -> Result<(), CliError> {
    let cfg: FigureConfig = load_json(config)?;
    if cfg.m_list.is_empty() {
        return Err(CliError::Config("figure config needs a nonempty m_list".into()));
    }
    let base = cfg.scenario.to_scenario(opts.seed)?;
    let method = resolve_method(&cfg.method, &base.model)?;
    let mut columns = Vec::new();
    let mut grid: Vec<f64> = Vec::new();
    for &m in &cfg.m_list {
        let mut scenario = base.clone();
        scenario.m = m;
        let h = resolve_bandwidth(&scenario, method, opts)?;
        let run = monte_carlo_mise(&scenario, method, h, opts.boundary, opts.grid)?;
        grid = run.grid.clone();
        columns.push(run.mean_curve);
    }
    let mut csv = String::new();
    writeln!(csv, "# seed={} method={} replications={}", base.seed, cfg.method, base.replications)
        .unwrap();
    let header: Vec<String> = cfg.m_list.iter().map(|m| format!("mean_ghat_m{m}")).collect();
    writeln!(csv, "x,g,{}", header.join(",")).unwrap();
    for (i, &x) in grid.iter().enumerate() {
        let mut row = format!("{},{}", fmt_sig(x), fmt_sig(base.curve.value(x)));
        for c in &columns {
            row.push(',');
            row.push_str(&fmt_sig(c[i]));
        }
        writeln!(csv, "{row}").unwrap();
    }
    write_file(out, &csv)
}

/// One selftest entry: name, pass flag, human detail.
pub struct SelftestLine {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

/// `selftest`: the oracle-equivalence suite. Returns the report lines;
/// errors when any check fails so the binary exits nonzero.
pub fn run_selftest() -> (Vec<SelftestLine>, bool) {
    use crate::designs::midpoint_design;
    use crate::kernels::{quartic_kernel, BoundaryMode, ScaledKernel};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    let mut lines = Vec::new();
    let mut check = |name: &'static str, pass: bool, detail: String| {
        lines.push(SelftestLine { name, pass, detail });
    };

    // Kernel constants.
    let k = quartic_kernel();
    let m = k.moments();
    check(
        "quartic-moments",
        (m.b - 1.0 / 7.0).abs() < 1e-10
            && (m.a - 5.0 / 7.0).abs() < 1e-10
            && (m.c_k - 100.0 / 231.0).abs() < 1e-10,
        format!("B={:.12} A={:.12} C_K={:.12}", m.b, m.a, m.c_k),
    );

    // Fast Gram solves against the dense route.
    let mut rng = StdRng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for n in [5usize, 20, 100] {
        let d = midpoint_design(n).unwrap();
        let rhs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for model in [
            CovarianceModel::wiener(1.0),
            CovarianceModel::GeneralizedWiener { beta: 2.0, sigma2: 0.7 },
            CovarianceModel::OrnsteinUhlenbeck { lambda: 1.3, sigma2: 1.0 },
        ] {
            let g = model.gram(&d);
            let dense = g.solve(&rhs, false).unwrap();
            let fast = g.solve(&rhs, true).unwrap();
            let scale = dense.iter().fold(1.0f64, |a, &b| a.max(b.abs()));
            let diff = dense
                .iter()
                .zip(&fast)
                .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()))
                / scale;
            worst = worst.max(diff);
        }
    }
    check("fast-solve-vs-dense", worst < 1e-9, format!("max rel diff {worst:.3e}"));

    // Closed-form estimators against the dense matrix path.
    let mut worst = 0.0f64;
    for case in 0..20 {
        let n = 10 + 7 * case;
        let d = midpoint_design(n).unwrap();
        let x = rng.gen_range(0.05..0.95);
        let h = rng.gen_range(0.08..0.4);
        let sk = ScaledKernel::new(k.clone(), x, h, BoundaryMode::None).unwrap();
        let ybar: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for (model, closed) in [
            (
                CovarianceModel::GeneralizedWiener { beta: 1.0, sigma2: 1.0 },
                crate::estimators::projection_wiener_closed(1.0, &sk, &d, &ybar).unwrap(),
            ),
            (
                CovarianceModel::OrnsteinUhlenbeck { lambda: 1.0, sigma2: 1.0 },
                crate::estimators::projection_ou_closed(1.0, &sk, &d, &ybar).unwrap(),
            ),
        ] {
            let dense = crate::estimators::projection_weights(&model, &sk, &d, false)
                .unwrap()
                .estimate(&ybar)
                .unwrap();
            worst = worst.max((dense - closed).abs());
        }
    }
    check("closed-form-vs-dense", worst < 1e-8, format!("max abs diff {worst:.3e}"));

    // Projection variance identity w'Rw = f'R^-1 f.
    let d = midpoint_design(10).unwrap();
    let model = CovarianceModel::wiener(1.0);
    let sk = ScaledKernel::new(k.clone(), 0.5, 0.3, BoundaryMode::None).unwrap();
    let g = model.gram(&d);
    let f = crate::estimators::representer(&model, &sk, &d).unwrap();
    let w = crate::estimators::projection_weights(&model, &sk, &d, true).unwrap();
    let lhs = g.bilinear(&w.weights, &w.weights).unwrap();
    let rhs = g.quadratic_form(&f.values, &f.values).unwrap();
    check(
        "projection-variance-identity",
        (lhs - rhs).abs() < 1e-10,
        format!("w'Rw={lhs:.12e} f'R^-1f={rhs:.12e}"),
    );

    let ok = lines.iter().all(|l| l.pass);
    (lines, ok)
}

pub fn cmd_selftest() -> Result<String, CliError> {
    let (lines, ok) = run_selftest();
    let mut out = String::new();
    for l in &lines {
        writeln!(out, "{} {}: {}", if l.pass { "PASS" } else { "FAIL" }, l.name, l.detail).unwrap();
    }
    if ok {
        Ok(out)
    } else {
        print!("{out}");
        Err(CliError::SelftestFailed {
            failures: lines.iter().filter(|l| !l.pass).count(),
            total: lines.len(),
        })
    }
}

/// `normality`: the Monte Carlo asymptotic-normality diagnostic (exposed for
/// completeness; the acceptance suite uses the library API directly).
pub fn cmd_normality(config: &Path, x: f64, opts: &Options) -> Result<String, CliError> {
    let cfg: ScenarioConfig = load_json(config)?;
    let scenario = cfg.to_scenario(opts.seed)?;
    let report = normality_diagnostic(&scenario, x, opts.boundary)?;
    Ok(serde_json::to_string_pretty(&serde_json::json!({
        "x": x,
        "statistic": report.statistic,
        "threshold": report.threshold,
        "pass": report.pass,
        "replications": report.replications,
        "seed": scenario.seed,
    }))
    .unwrap())
}
