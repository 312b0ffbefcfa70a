//! Task dispatch: build charts and fields from a config, run the
//! requested verification, collect report entries and CSV tables.

use std::collections::BTreeMap;

use solwarp_core::chart::{MetricChart, SamplePlan, ScalarField};
use solwarp_core::constructions::{expanding_family, solve_profile_ode, ExpandingParams};
use solwarp_core::error::GeomError;
use solwarp_core::obstructions::{
    extremum_chain_check, no_minimum_check, ricci_integral_probe, torus_integral_identity,
    ChainVerdict,
};
use solwarp_core::soliton::{
    base_condition_residual, hamilton_constant, mu_constancy, ricci_hessian_residual,
    soliton_residual, verify_construction, Lambda, Tolerances,
};
use solwarp_core::warped::{FiberModel, WarpedSpec};

use crate::config::{ChartKind, ChartSpec, RunConfig, Task};
use crate::expr::{coordinate_names, parse_expr};
use crate::report::ReportEntry;

/// Failure classes mapped onto process exit codes:
/// config/parse -> 2, numeric domain -> 3, identity failure -> 1.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("identity failure: {0}")]
    Identity(String),
    #[error("numeric domain error: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Identity(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

pub fn from_geom(e: GeomError) -> CliError {
    match e {
        GeomError::InvalidParameter(_)
        | GeomError::DimensionMismatch { .. }
        | GeomError::IndexOutOfRange { .. } => CliError::Config(e.to_string()),
        GeomError::CrossCheck(_) | GeomError::HypothesisFailed(_) => {
            CliError::Identity(e.to_string())
        }
        _ => CliError::Numeric(e.to_string()),
    }
}

/// Entries, CSV side tables (name, contents) and human-readable notes.
#[derive(Debug, Default)]
pub struct RunOutput {
    pub entries: Vec<ReportEntry>,
    pub tables: Vec<(String, String)>,
    pub notes: Vec<String>,
}

impl RunOutput {
    fn push_report(&mut self, r: &solwarp_core::ResidualReport) {
        self.entries.push(ReportEntry::from(r));
    }
}

pub fn build_chart(
    spec: &ChartSpec,
    consts: &BTreeMap<String, f64>,
) -> Result<MetricChart, CliError> {
    let n = spec.dim;
    if n == 0 {
        return Err(CliError::Config("chart dimension must be positive".into()));
    }
    let radius = spec.radius.unwrap_or(1.0);
    let domain = spec
        .domain
        .clone()
        .map(|d| d.into_iter().map(|[lo, hi]| (lo, hi)).collect::<Vec<_>>());
    match spec.kind {
        ChartKind::Flat => Ok(match domain {
            Some(d) => MetricChart::euclidean_box(n, d),
            None => MetricChart::euclidean(n),
        }),
        ChartKind::Sphere => Ok(MetricChart::sphere_stereographic(n, radius)),
        ChartKind::Hyperbolic => Ok(MetricChart::hyperbolic_half_space(n, radius)),
        ChartKind::Torus => Ok(MetricChart::flat_torus(n)),
        ChartKind::Custom => {
            let comps_text = spec
                .components
                .as_ref()
                .ok_or_else(|| CliError::Config("custom chart needs `components`".into()))?;
            let expected = n * (n + 1) / 2;
            if comps_text.len() != expected {
                return Err(CliError::Config(format!(
                    "custom chart needs {expected} upper-triangle components, got {}",
                    comps_text.len()
                )));
            }
            let vars = coordinate_names(n);
            let mut comps = Vec::with_capacity(expected);
            for text in comps_text {
                let e = parse_expr(text, &vars, consts)
                    .map_err(|e| CliError::Config(format!("component `{text}`: {e}")))?;
                comps.push(e.into_field(n));
            }
            let domain = domain.unwrap_or_else(|| vec![(-1.0, 1.0); n]);
            MetricChart::new("custom", n, domain, comps).map_err(from_geom)
        }
    }
}

fn parse_field(
    text: &str,
    what: &str,
    dim: usize,
    consts: &BTreeMap<String, f64>,
) -> Result<ScalarField, CliError> {
    let vars = coordinate_names(dim);
    let e = parse_expr(text, &vars, consts)
        .map_err(|e| CliError::Config(format!("field `{what}`: {e}")))?;
    Ok(e.into_field(dim))
}

struct Ctx<'c> {
    cfg: &'c RunConfig,
    consts: BTreeMap<String, f64>,
    plan: SamplePlan,
    tols: Tolerances,
}

impl<'c> Ctx<'c> {
    fn new(cfg: &'c RunConfig) -> Ctx<'c> {
        let sample = cfg.sample();
        let tols_cfg = cfg.tolerances();
        Ctx {
            cfg,
            consts: cfg.constants.clone().unwrap_or_default().bindings(),
            plan: SamplePlan::new(sample.count, sample.seed).with_margin(sample.margin),
            tols: Tolerances {
                tensor: tols_cfg.tensor,
                constancy: tols_cfg.constancy,
            },
        }
    }

    fn chart(&self) -> Result<MetricChart, CliError> {
        let spec = self
            .cfg
            .chart
            .as_ref()
            .ok_or_else(|| CliError::Config("this task needs a `chart` section".into()))?;
        build_chart(spec, &self.consts)
    }

    fn field(&self, name: &str) -> Result<ScalarField, CliError> {
        let fields = self
            .cfg
            .fields
            .as_ref()
            .ok_or_else(|| CliError::Config("this task needs a `fields` section".into()))?;
        let text = match name {
            "f" => &fields.f,
            "phi" => &fields.phi,
            "psi" => &fields.psi,
            "rho" => &fields.rho,
            "h" => &fields.h,
            _ => unreachable!(),
        };
        let text = text
            .as_ref()
            .ok_or_else(|| CliError::Config(format!("this task needs fields.{name}")))?;
        let dim = self
            .cfg
            .chart
            .as_ref()
            .map(|c| c.dim)
            .ok_or_else(|| CliError::Config("this task needs a `chart` section".into()))?;
        parse_field(text, name, dim, &self.consts)
    }

    fn constant(&self, name: &str) -> Result<f64, CliError> {
        self.consts
            .get(name)
            .copied()
            .ok_or_else(|| CliError::Config(format!("this task needs constants.{name}")))
    }
}

pub fn run_config(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let ctx = Ctx::new(cfg);
    match cfg.task {
        Task::VerifySoliton => verify_soliton_task(&ctx),
        Task::VerifyBase => verify_base_task(&ctx),
        Task::MuCheck => mu_check_task(&ctx),
        Task::BuildWarped => build_warped_task(&ctx),
        Task::Ode => ode_task(&ctx),
        Task::ObstructionChain => chain_task(&ctx),
        Task::ObstructionNoMinimum => remark_task(&ctx),
        Task::ObstructionTorus => torus_task(&ctx),
        Task::ObstructionGeodesic => geodesic_task(&ctx),
        Task::Suite => {
            let name = cfg
                .suite
                .as_ref()
                .ok_or_else(|| CliError::Config("task `suite` needs a `suite` name".into()))?;
            crate::suites::run_suite(name, cfg)
        }
    }
}

fn verify_soliton_task(ctx: &Ctx) -> Result<RunOutput, CliError> {
    let chart = ctx.chart()?;
    let psi = ctx.field("psi")?;
    let lambda = ctx.constant("lambda")?;
    let mut out = RunOutput::default();
    let r =
        soliton_residual(&chart, &psi, lambda, &ctx.plan, ctx.tols.tensor).map_err(from_geom)?;
    out.push_report(&r);
    let h = hamilton_constant(&chart, &psi, lambda, &ctx.plan, ctx.tols.constancy)
        .map_err(from_geom)?;
    out.notes
        .push(format!("hamilton constant mean = {:?}", h.mean));
    out.push_report(&h);
    Ok(out)
}

fn verify_base_task(ctx: &Ctx) -> Result<RunOutput, CliError> {
    let chart = ctx.chart()?;
    let f = ctx.field("f")?;
    let phi = ctx.field("phi")?;
    let lambda = ctx.constant("lambda")?;
    let m = ctx.constant("m")?;
    let mut out = RunOutput::default();
    let rh = ricci_hessian_residual(
        &chart,
        &f,
        &phi,
        &Lambda::Const(lambda),
        m,
        &ctx.plan,
        ctx.tols.tensor,
    )
    .map_err(from_geom)?;
    out.push_report(&rh);
    let bc = base_condition_residual(&chart, &f, &phi, lambda, m, &ctx.plan, ctx.tols.constancy)
        .map_err(from_geom)?;
    out.notes
        .push(format!("base condition constant mean = {:?}", bc.mean));
    out.push_report(&bc);
    Ok(out)
}

fn mu_check_task(ctx: &Ctx) -> Result<RunOutput, CliError> {
    let chart = ctx.chart()?;
    let f = ctx.field("f")?;
    let phi = ctx.field("phi")?;
    let lambda = ctx.constant("lambda")?;
    let m = ctx.constant("m")?;
    let mut out = RunOutput::default();
    let mu = mu_constancy(&chart, &f, &phi, lambda, m, &ctx.plan, ctx.tols.constancy)
        .map_err(from_geom)?;
    out.notes
        .push(format!("first integral mean = {:?}", mu.mean));
    out.push_report(&mu);
    Ok(out)
}

fn build_warped_task(ctx: &Ctx) -> Result<RunOutput, CliError> {
    let constants = ctx.cfg.constants.clone().unwrap_or_default();
    let mut out = RunOutput::default();

    let spec = if constants.c1.is_some() || constants.c2.is_some() {
        // family mode: flat base scaled by rho^{-2} with the exponential profile
        let n = ctx.cfg.chart.as_ref().map(|c| c.dim).unwrap_or(2);
        let m = constants.m.unwrap_or(2.0);
        if m.fract() != 0.0 || m < 2.0 {
            return Err(CliError::Config(
                "family mode needs integer constants.m >= 2".into(),
            ));
        }
        let params = ExpandingParams {
            n,
            m: m as usize,
            lambda: ctx.constant("lambda")?,
            c1: constants.c1.unwrap_or(0.0),
            c2: constants.c2.unwrap_or(0.0),
            a: constants.a.clone().unwrap_or_else(|| vec![0.0; n - 1]),
            b: constants.b.unwrap_or(0.0),
            rho: constants.r.unwrap_or(1.0),
        };
        let family = expanding_family(&params).map_err(from_geom)?;
        out.notes.push(format!(
            "family: mu = {}, base-condition c = {}",
            family.mu, family.hamilton_c
        ));
        family.to_warped_spec().map_err(from_geom)?
    } else {
        let chart = ctx.chart()?;
        let f = ctx.field("f")?;
        let phi = ctx.field("phi")?;
        let lambda = ctx.constant("lambda")?;
        let m = ctx.constant("m")?;
        if m.fract() != 0.0 || m < 2.0 {
            return Err(CliError::Config(
                "building a product needs integer constants.m >= 2".into(),
            ));
        }
        let mu = match constants.mu {
            Some(v) => v,
            None => {
                let r = mu_constancy(&chart, &f, &phi, lambda, m, &ctx.plan, ctx.tols.constancy)
                    .map_err(from_geom)?;
                let mean = r.mean.unwrap_or(f64::NAN);
                out.notes
                    .push(format!("fiber constant from sweep: mu = {mean}"));
                out.push_report(&r);
                mean
            }
        };
        let fiber = FiberModel::for_mu(mu, m as usize).map_err(from_geom)?;
        WarpedSpec::new(chart, f, phi, fiber, lambda).map_err(from_geom)?
    };

    let bundle = verify_construction(&spec, &ctx.plan, ctx.tols).map_err(from_geom)?;
    for r in bundle.reports() {
        out.push_report(r);
    }
    out.notes.push(format!(
        "mu mean = {}, fiber mu = {}",
        bundle.mu_mean, bundle.fiber_mu
    ));
    if bundle.product_soliton.is_none() {
        out.notes
            .push("base hypotheses failed; product verification skipped".into());
    }
    Ok(out)
}

fn ode_task(ctx: &Ctx) -> Result<RunOutput, CliError> {
    let spec = ctx
        .cfg
        .ode
        .as_ref()
        .ok_or_else(|| CliError::Config("task `ode` needs an `ode` section".into()))?;
    let sol = solve_profile_ode(
        spec.lambda,
        spec.m,
        spec.rho,
        spec.f0,
        spec.f0_prime,
        (spec.interval[0], spec.interval[1]),
        spec.dt,
    )
    .map_err(from_geom)?;

    let mut out = RunOutput::default();
    let mut csv = String::from("x_n,f_numeric,f_closed,error\n");
    for (i, x) in sol.grid.iter().enumerate() {
        let closed = sol.closed_form.as_ref().map(|c| c[i]);
        let err = closed.map(|c| (sol.values[i] - c).abs());
        csv.push_str(&format!(
            "{},{},{},{}\n",
            x,
            sol.values[i],
            closed.map(|c| c.to_string()).unwrap_or_default(),
            err.map(|e| e.to_string()).unwrap_or_default()
        ));
    }
    out.tables.push(("ode_profile".into(), csv));

    match sol.max_error {
        Some(err) => out.entries.push(ReportEntry::scalar_check(
            "ode-profile-vs-closed-form",
            err,
            ctx.tols.tensor,
        )),
        None => out.entries.push(ReportEntry::scalar_check(
            "ode-profile-integrated",
            if sol.stayed_positive { 0.0 } else { 1.0 },
            0.5,
        )),
    }
    if !sol.stayed_positive {
        out.notes
            .push("profile dipped to f <= 0 on the grid".into());
    }
    Ok(out)
}

fn chain_task(ctx: &Ctx) -> Result<RunOutput, CliError> {
    let chart = ctx.chart()?;
    let f = ctx.field("f")?;
    let phi = ctx.field("phi")?;
    let lambda = ctx.constant("lambda")?;
    let m = ctx.constant("m")?;
    let mu = ctx.constant("mu")?;
    let report = extremum_chain_check(
        &chart,
        &f,
        &phi,
        lambda,
        m,
        mu,
        &ctx.plan,
        ctx.tols.constancy,
    )
    .map_err(from_geom)?;

    let violation = chain_violation_magnitude(&report);
    let verdict = verdict_name(report.verdict);
    let mut out = RunOutput::default();
    out.entries.push(ReportEntry {
        identity: format!("extremum-chain verdict={verdict}"),
        max_abs: violation,
        rms: violation,
        spread: Some(report.f_max - report.f_min),
        tolerance: ctx.tols.constancy,
        pass: report.verdict != ChainVerdict::ViolatesChain,
        worst_point: report.max_location.clone(),
    });
    out.notes.push(format!(
        "f in [{}, {}]; chain = [{}, {}, {}, {}]; violated: {:?}",
        report.f_min,
        report.f_max,
        report.chain.fp_lap,
        report.chain.mu_minus_lambda_fp_sq,
        report.chain.mu_minus_lambda_fq_sq,
        report.chain.fq_lap,
        report.violated
    ));
    Ok(out)
}

pub fn verdict_name(v: ChainVerdict) -> &'static str {
    match v {
        ChainVerdict::ConsistentConstant => "consistent-constant",
        ChainVerdict::ViolatesChain => "violates-chain",
        ChainVerdict::Inconclusive => "inconclusive",
    }
}

pub(crate) fn chain_violation_magnitude(r: &solwarp_core::obstructions::ExtremumReport) -> f64 {
    let c = &r.chain;
    [
        c.fp_lap.max(0.0),
        (c.fp_lap - c.mu_minus_lambda_fp_sq).abs(),
        (c.mu_minus_lambda_fq_sq - c.mu_minus_lambda_fp_sq).max(0.0),
        (c.mu_minus_lambda_fq_sq - c.fq_lap).abs(),
        (-c.fq_lap).max(0.0),
    ]
    .into_iter()
    .fold(0.0_f64, f64::max)
}

fn remark_task(ctx: &Ctx) -> Result<RunOutput, CliError> {
    let chart = ctx.chart()?;
    let f = ctx.field("f")?;
    let phi = ctx.field("phi")?;
    let lambda = ctx.constant("lambda")?;
    let m = ctx.constant("m")?;
    let mu = ctx.constant("mu")?;
    let report = no_minimum_check(&chart, &f, &phi, lambda, mu, m, &ctx.plan).map_err(from_geom)?;
    let mut out = RunOutput::default();
    out.entries.push(ReportEntry {
        identity: "no-minimum-sign".into(),
        max_abs: report.max_formula_value.max(0.0),
        rms: report.max_formula_value.abs(),
        spread: None,
        tolerance: 0.0,
        pass: report.pass,
        worst_point: report.worst_point.clone(),
    });
    out.notes.push(format!(
        "max L f (formula) = {}, margin = {}, max drift diagnostic = {}",
        report.max_formula_value, report.margin, report.max_drift_value
    ));
    Ok(out)
}

fn torus_task(ctx: &Ctx) -> Result<RunOutput, CliError> {
    let dim = ctx.cfg.chart.as_ref().map(|c| c.dim).unwrap_or(2);
    let torus = MetricChart::flat_torus(dim);
    let f = {
        let fields = ctx
            .cfg
            .fields
            .as_ref()
            .ok_or_else(|| CliError::Config("this task needs a `fields` section".into()))?;
        let text = fields
            .f
            .as_ref()
            .ok_or_else(|| CliError::Config("this task needs fields.f".into()))?;
        parse_field(text, "f", dim, &ctx.consts)?
    };
    let phi = {
        let text = ctx
            .cfg
            .fields
            .as_ref()
            .and_then(|f| f.phi.as_ref())
            .ok_or_else(|| CliError::Config("this task needs fields.phi".into()))?;
        parse_field(text, "phi", dim, &ctx.consts)?
    };
    let lambda = ctx.constant("lambda")?;
    let m = ctx.constant("m")?;
    let grid = ctx.cfg.torus.as_ref().map(|t| t.grid).unwrap_or(64);
    let r = torus_integral_identity(&torus, &f, &phi, lambda, m, grid).map_err(from_geom)?;
    let mut out = RunOutput::default();
    out.entries.push(ReportEntry::scalar_check(
        "torus-drift-integration-by-parts",
        r.ibp_residual,
        ctx.tols.tensor,
    ));
    out.entries.push(ReportEntry::scalar_check(
        "torus-integral-identity",
        r.identity_residual,
        ctx.tols.tensor,
    ));
    out.notes.push(format!(
        "grid {}^{dim}: mu mean = {}, mu spread = {}, vol_phi = {}",
        r.grid, r.mu_mean, r.mu_spread, r.vol_phi
    ));
    Ok(out)
}

fn geodesic_task(ctx: &Ctx) -> Result<RunOutput, CliError> {
    let chart = ctx.chart()?;
    let f = ctx.field("f")?;
    let phi = ctx.field("phi")?;
    let m = ctx.constant("m")?;
    let c = ctx.constant("c")?;
    let geo = ctx
        .cfg
        .geodesics
        .as_ref()
        .ok_or_else(|| CliError::Config("this task needs a `geodesics` section".into()))?;
    if geo.starts.len() != geo.directions.len() {
        return Err(CliError::Config(
            "geodesics.starts and geodesics.directions must pair up".into(),
        ));
    }
    let starts: Vec<(Vec<f64>, Vec<f64>)> = geo
        .starts
        .iter()
        .cloned()
        .zip(geo.directions.iter().cloned())
        .collect();
    let report = ricci_integral_probe(
        &chart, &phi, &f, m, c, &starts, geo.total, geo.dt, &ctx.plan,
    )
    .map_err(from_geom)?;

    let mut out = RunOutput::default();
    out.entries.push(ReportEntry::scalar_check(
        "geodesic-probe-hypothesis",
        (-report.hypothesis_min_eigenvalue).max(0.0),
        1e-9,
    ));
    out.notes.push(format!(
        "hypothesis min eigenvalue = {}, sup|grad phi| = {}, sup|grad ln f| = {}",
        report.hypothesis_min_eigenvalue, report.sup_grad_phi, report.sup_grad_log_f
    ));
    if !report.hypothesis_pass {
        out.notes
            .push("hypothesis failed; geodesic integration skipped".into());
    }
    for (i, trace) in report.traces.iter().enumerate() {
        out.entries.push(ReportEntry {
            identity: format!("geodesic-probe-bound-{i}"),
            max_abs: (-trace.min_slack).max(0.0),
            rms: trace.min_slack.abs(),
            spread: None,
            tolerance: 1e-9,
            pass: trace.pass,
            worst_point: trace.start.clone(),
        });
        let mut csv = String::from("s");
        for d in 0..chart.dim() {
            csv.push_str(&format!(",x{}", d + 1));
        }
        csv.push_str(",ric_vv,running_integral\n");
        for k in 0..trace.arc.len() {
            csv.push_str(&format!("{}", trace.arc[k]));
            for c in &trace.points[k] {
                csv.push_str(&format!(",{c}"));
            }
            csv.push_str(&format!(
                ",{},{}\n",
                trace.ric_vv[k], trace.running_integral[k]
            ));
        }
        out.tables.push((format!("geodesic_{i}"), csv));
    }
    Ok(out)
}
