//! Command-line surface: JSON experiment configs and one subcommand per operation.
//!
//! Every run writes into `--out`:
//! - `config.json`, the effective configuration;
//! - the subcommand's artifacts (`table.csv`, `records.jsonl`, `function.csv`);
//! - `manifest.json` (config hash, grid sizes, artifact list), byte-identical across runs;
//! - `timings.json`, wall-clock seconds per stage;
//! - on failure, `error.json` with the error kind and offending field.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fan::{transpose_defect, FanFunction, FanGrid, LambdaRule};
use crate::io;
use crate::paleywiener::{
    default_beta, dirac_derivative_field, dirac_growth_ratio, direct_pw_sequence, holo_growth_probe,
    inverse_pw_sequence, AnnulusProfile, BumpProfile, DirectMethod, InverseMethod, LimitMethod, RadiusEstimate,
};
use crate::radial::{RadialFunction, RadialGrid};
use crate::specfun::{spherical_function, spherical_function_dxi, SeriesControl, SphericalParams};
use crate::testfns::{FanSpec, RadialSpec};
use crate::transform::{
    inverse_with_tail, plancherel_defect, spherical_transform, TransformPlan,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Subcommand {
    EvalSpherical,
    Transform,
    Inverse,
    Plancherel,
    MplusCheck,
    PwDirect,
    PwInverse,
    HoloDemo,
    DiracDemo,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::EvalSpherical => "eval-spherical",
            Subcommand::Transform => "transform",
            Subcommand::Inverse => "inverse",
            Subcommand::Plancherel => "plancherel",
            Subcommand::MplusCheck => "mplus-check",
            Subcommand::PwDirect => "pw-direct",
            Subcommand::PwInverse => "pw-inverse",
            Subcommand::HoloDemo => "holo-demo",
            Subcommand::DiracDemo => "dirac-demo",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadialGridConfig {
    pub r_max: f64,
    pub r_count: usize,
    /// `None` picks `π/h` from the λ spacing `h`.
    pub t_max: Option<f64>,
    pub t_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanGridConfig {
    pub j_max: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_count: usize,
    pub rule: LambdaRule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormConfig {
    pub p: f64,
    /// `None` uses `(n+2)/p + 1`.
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodConfig {
    pub direct: DirectMethod,
    pub inverse: InverseMethod,
    pub limit: LimitMethod,
}

/// A point `(ξ, λ; r, t)` for `eval-spherical`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalPoint {
    pub xi: Complex64,
    pub lambda: Complex64,
    pub r: f64,
    pub t: Complex64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalConfig {
    pub points: Vec<EvalPoint>,
    /// Extra fan points drawn from the seeded generator.
    pub random_fan_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthConfig {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiracConfig {
    /// `(r, t)` points comparing `f_U` with `−∂_ξΦ` at `(n, 1)`.
    pub points: Vec<(f64, f64)>,
    /// Radii for the normalized growth ratio.
    pub radii: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub table: String,
    pub records: String,
    pub function: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            table: "table.csv".into(),
            records: "records.jsonl".into(),
            function: "function.csv".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub n: usize,
    pub radial_grid: RadialGridConfig,
    pub fan_grid: FanGridConfig,
    /// Radial input for transform, plancherel, mplus-check, pw-direct.
    pub test_function: Option<RadialSpec>,
    /// Fan input for inverse, plancherel, pw-inverse, and the transpose pairing of mplus-check.
    pub fan_function: Option<FanSpec>,
    /// CSV file (radial or fan, by subcommand) replacing the analytic input.
    pub input: Option<PathBuf>,
    /// Number of operator powers.
    pub j_max: usize,
    pub norm: NormConfig,
    pub methods: MethodConfig,
    pub eval: Option<EvalConfig>,
    pub growth: Option<GrowthConfig>,
    pub dirac: Option<DiracConfig>,
    pub series: SeriesControl,
    pub outputs: OutputConfig,
}

fn check(cond: bool, field: &str, reason: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::invalid(field, reason))
    }
}

fn positive(x: f64, field: &str) -> Result<()> {
    check(x > 0.0 && x.is_finite(), field, "must be positive and finite")
}

fn prefixed(e: Error, prefix: &str) -> Error {
    match e {
        Error::InvalidParameter { field, reason } if !field.contains('.') => {
            Error::InvalidParameter { field: format!("{prefix}.{field}"), reason }
        }
        other => other,
    }
}

impl ExperimentConfig {
    fn base(radial_grid: RadialGridConfig, fan_grid: FanGridConfig) -> Self {
        ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            n: 1,
            radial_grid,
            fan_grid,
            test_function: None,
            fan_function: None,
            input: None,
            j_max: 40,
            norm: NormConfig { p: 2.0, beta: Some(0.0) },
            methods: MethodConfig {
                direct: DirectMethod::ExactAj,
                inverse: InverseMethod::FanSide,
                limit: LimitMethod::Ratio,
            },
            eval: None,
            growth: None,
            dirac: None,
            series: SeriesControl::default(),
            outputs: OutputConfig::default(),
        }
    }

    /// The shipped configuration for each subcommand.
    pub fn default_for(sub: Subcommand) -> Self {
        let lattice = |j_max, h: f64, count| FanGridConfig {
            j_max,
            lambda_min: h,
            lambda_max: h * count as f64,
            lambda_count: count,
            rule: LambdaRule::Rectangle,
        };
        let band_radial = |r_max, r_count, t_count| RadialGridConfig { r_max, r_count, t_max: None, t_count };
        let band_fan = FanSpec::SmoothBand { rays: 2, lambda_lo: 0.8, lambda_hi: 2.0, power: 4 };
        match sub {
            Subcommand::EvalSpherical => {
                let mut c = Self::base(band_radial(4.0, 8, 8), lattice(8, 0.25, 16));
                c.eval = Some(EvalConfig {
                    points: vec![
                        EvalPoint {
                            xi: Complex64::new(0.7, 0.2),
                            lambda: Complex64::new(-0.4, 0.1),
                            r: 1.3,
                            t: Complex64::new(0.5, 0.0),
                        },
                        EvalPoint {
                            xi: Complex64::new(1.0, 0.0),
                            lambda: Complex64::new(1.0, 0.0),
                            r: 2.0,
                            t: Complex64::new(0.0, 0.3),
                        },
                    ],
                    random_fan_points: 64,
                });
                c
            }
            Subcommand::Transform | Subcommand::MplusCheck => {
                let mut c = Self::base(
                    RadialGridConfig { r_max: 2.1, r_count: 120, t_max: Some(1.05), t_count: 120 },
                    FanGridConfig { j_max: 8, lambda_min: 0.1, lambda_max: 8.0, lambda_count: 317, rule: LambdaRule::Trapezoid },
                );
                c.test_function = Some(RadialSpec::SmoothBall { radius: 1.0 });
                if sub == Subcommand::MplusCheck {
                    c.fan_function = Some(FanSpec::SmoothBand { rays: 4, lambda_lo: 0.5, lambda_hi: 3.0, power: 6 });
                }
                c
            }
            Subcommand::Inverse | Subcommand::Plancherel => {
                let mut c = Self::base(band_radial(16.0, 160, 140), lattice(6, 0.0625, 40));
                c.fan_function = Some(band_fan);
                c
            }
            Subcommand::PwDirect => {
                let mut c = Self::base(
                    RadialGridConfig { r_max: 2.0, r_count: 200, t_max: Some(1.0), t_count: 200 },
                    FanGridConfig { j_max: 200, lambda_min: 0.2, lambda_max: 80.0, lambda_count: 400, rule: LambdaRule::Trapezoid },
                );
                c.test_function = Some(RadialSpec::Ball { radius: 1.0, power: 1 });
                c
            }
            Subcommand::PwInverse => {
                let mut c = Self::base(band_radial(16.0, 160, 120), lattice(2, 0.0625, 32));
                c.fan_function = Some(FanSpec::Band { rays: 0, lambda_lo: 1.0, lambda_hi: 2.0, edge_power: 0 });
                c
            }
            Subcommand::HoloDemo => {
                let mut c = Self::base(band_radial(4.0, 8, 8), lattice(1, 1.0, 30));
                c.test_function = Some(RadialSpec::Tensor);
                c.growth = Some(GrowthConfig { lambda_min: 5.0, lambda_max: 30.0, count: 26 });
                c
            }
            Subcommand::DiracDemo => {
                let mut c = Self::base(band_radial(4.0, 8, 8), lattice(1, 1.0, 4));
                c.dirac = Some(DiracConfig {
                    points: (0..20).map(|k| (0.25 + 0.4 * k as f64, -1.5 + 0.17 * k as f64)).collect(),
                    radii: vec![1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 14.0, 20.0],
                });
                c
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        check(self.schema_version == SCHEMA_VERSION, "schema_version", "unsupported schema version")?;
        check(self.n >= 1, "n", "dimension must be at least 1")?;
        let r = &self.radial_grid;
        positive(r.r_max, "radial_grid.r_max")?;
        check(r.r_count > 0, "radial_grid.r_count", "must be positive")?;
        check(r.t_count > 0, "radial_grid.t_count", "must be positive")?;
        if let Some(t) = r.t_max {
            positive(t, "radial_grid.t_max")?;
        }
        let f = &self.fan_grid;
        positive(f.lambda_min, "fan_grid.lambda_min")?;
        positive(f.lambda_max, "fan_grid.lambda_max")?;
        check(f.lambda_max > f.lambda_min, "fan_grid.lambda_max", "must exceed lambda_min")?;
        check(f.lambda_count >= 2, "fan_grid.lambda_count", "need at least two nodes")?;
        positive(self.norm.p, "norm.p")?;
        check(self.norm.p >= 1.0, "norm.p", "must be at least 1")?;
        if let Some(b) = self.norm.beta {
            check(b >= 0.0 && b.is_finite(), "norm.beta", "must be nonnegative and finite")?;
        }
        self.series.validate().map_err(|e| prefixed(e, "series"))?;
        if let Some(spec) = &self.test_function {
            spec.validate()?;
        }
        if let Some(g) = &self.growth {
            positive(g.lambda_min, "growth.lambda_min")?;
            check(g.lambda_max >= g.lambda_min, "growth.lambda_max", "must be at least lambda_min")?;
            check(g.count >= 1, "growth.count", "must be positive")?;
        }
        if let Some(d) = &self.dirac {
            for &(r, t) in &d.points {
                check(r >= 0.0 && r.is_finite() && t.is_finite(), "dirac.points", "need finite r ≥ 0 and t")?;
            }
            for &r in &d.radii {
                positive(r, "dirac.radii")?;
            }
        }
        if let Some(e) = &self.eval {
            for p in &e.points {
                check(p.r >= 0.0 && p.r.is_finite(), "eval.points.r", "must be finite and nonnegative")?;
            }
        }
        for (name, path) in [
            ("outputs.table", &self.outputs.table),
            ("outputs.records", &self.outputs.records),
            ("outputs.function", &self.outputs.function),
        ] {
            let p = Path::new(path);
            check(
                !path.is_empty() && p.is_relative() && p.components().count() == 1,
                name,
                "must be a plain file name",
            )?;
        }
        let grid = self.build_fan_grid()?;
        if let Some(spec) = &self.fan_function {
            spec.validate(&grid)?;
        }
        Ok(())
    }

    pub fn build_fan_grid(&self) -> Result<FanGrid> {
        let f = &self.fan_grid;
        io::fan_grid_from_spec(self.n, f.j_max, f.lambda_min, f.lambda_max, f.lambda_count, f.rule)
            .map_err(|e| prefixed(e, "fan_grid"))
    }

    pub fn build_plan(&self) -> Result<TransformPlan> {
        let fan = Arc::new(self.build_fan_grid()?);
        let r = &self.radial_grid;
        let plan = match r.t_max {
            None => TransformPlan::band_limited(fan, r.r_max, r.r_count, r.t_count),
            Some(t_max) => RadialGrid::gauss_legendre(self.n, r.r_max, r.r_count, t_max, r.t_count)
                .and_then(|g| TransformPlan::new(Arc::new(g), fan)),
        };
        plan.map_err(|e| prefixed(e, "radial_grid"))
    }

    pub fn beta(&self) -> f64 {
        self.norm.beta.unwrap_or_else(|| default_beta(self.n, self.norm.p))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: ExperimentConfig = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the compact JSON form.
    pub fn hash(&self) -> String {
        let compact = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&compact))
    }
}

#[derive(Debug, Parser)]
#[command(name = "hspher", version, about = "U(n)-spherical transform experiments on the Heisenberg group")]
pub struct Args {
    #[arg(value_enum)]
    pub subcommand: Subcommand,
    /// Experiment config (JSON); the subcommand default when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads; 0 lets the pool decide.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Seed for randomized sample points.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Accumulates artifacts and timings for one run.
struct Run<'a> {
    config: &'a ExperimentConfig,
    out: &'a Path,
    artifacts: Vec<String>,
    timings: Vec<(String, f64)>,
    grids: serde_json::Value,
}

impl<'a> Run<'a> {
    fn timed<T>(&mut self, stage: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let v = f()?;
        self.timings.push((stage.to_string(), start.elapsed().as_secs_f64()));
        Ok(v)
    }

    fn create(&mut self, name: &str) -> Result<BufWriter<File>> {
        self.artifacts.push(name.to_string());
        Ok(BufWriter::new(File::create(self.out.join(name))?))
    }

    fn table<S: Serialize>(&mut self, rows: &[S]) -> Result<()> {
        let name = self.config.outputs.table.clone();
        io::write_table(rows, self.create(&name)?)
    }

    fn records<S: Serialize>(&mut self, recs: &[S]) -> Result<()> {
        let name = self.config.outputs.records.clone();
        io::write_json_lines(recs, self.create(&name)?)
    }

    fn record_plan(&mut self, plan: &TransformPlan) {
        let r = plan.radial_grid();
        let f = plan.fan_grid();
        self.grids = json!({
            "radial": {"n_r": r.r_count(), "n_t": r.t_count(), "r_max": r.r_max(), "t_max": r.t_max()},
            "fan": {
                "j_max": f.j_max(),
                "lambda_count": f.lambda_count(),
                "lambda_min": f.lambda_min(),
                "lambda_max": f.lambda_max(),
                "rule": f.rule(),
            },
        });
    }
}

#[derive(Serialize)]
struct EstimateRow {
    j: usize,
    norm: f64,
    root: Option<f64>,
    ratio: Option<f64>,
}

fn estimate_outputs(run: &mut Run, est: &RadiusEstimate, kind: &str, method: serde_json::Value) -> Result<()> {
    let rows: Vec<EstimateRow> = est
        .rows()
        .into_iter()
        .map(|(j, norm, root, ratio)| EstimateRow { j, norm, root, ratio })
        .collect();
    run.table(&rows)?;
    let rec = json!({
        "record": kind,
        "extrapolated_limit": est.extrapolated_limit,
        "limit_method": est.method,
        "method": method,
        "p": est.p,
        "beta": est.beta,
        "j_max": est.norms.len() - 1,
        "grids": run.grids.clone(),
        "rows": rows,
    });
    run.records(&[rec])
}

fn radial_input(config: &ExperimentConfig, plan: &TransformPlan) -> Result<RadialFunction> {
    if let Some(path) = &config.input {
        return io::read_radial_csv(File::open(path)?);
    }
    let spec = config
        .test_function
        .ok_or_else(|| Error::invalid("test_function", "required by this subcommand"))?;
    spec.sample(plan.radial_grid().clone())
}

fn fan_input(config: &ExperimentConfig, plan: &TransformPlan) -> Result<FanFunction> {
    if let Some(path) = &config.input {
        return io::read_fan_csv(File::open(path)?);
    }
    let spec = config
        .fan_function
        .as_ref()
        .ok_or_else(|| Error::invalid("fan_function", "required by this subcommand"))?;
    spec.sample(plan.fan_grid().clone())
}

#[derive(Serialize)]
struct EvalRow {
    xi_re: f64,
    xi_im: f64,
    lambda_re: f64,
    lambda_im: f64,
    r: f64,
    t_re: f64,
    t_im: f64,
    phi_re: f64,
    phi_im: f64,
}

fn eval_spherical(run: &mut Run, seed: u64) -> Result<()> {
    let c = run.config;
    let eval = c.eval.clone().unwrap_or(EvalConfig { points: Vec::new(), random_fan_points: 0 });
    let plan = c.build_plan()?;
    run.record_plan(&plan);
    let fan = plan.fan_grid();
    let radial = plan.radial_grid();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = eval.points.clone();
    for _ in 0..eval.random_fan_points {
        let j = rng.gen_range(0..=fan.j_max());
        let lam = rng.gen_range(fan.lambda_min()..=fan.lambda_max()) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let p = SphericalParams::fan(j, lam, c.n);
        points.push(EvalPoint {
            xi: p.xi,
            lambda: p.lambda,
            r: rng.gen_range(0.0..=radial.r_max()),
            t: Complex64::new(rng.gen_range(-radial.t_max()..=radial.t_max()), 0.0),
        });
    }
    let rows = run.timed("evaluate", || {
        points
            .iter()
            .map(|p| {
                let phi = spherical_function(SphericalParams::new(p.xi, p.lambda), p.r, p.t, c.n, &c.series)?;
                Ok(EvalRow {
                    xi_re: p.xi.re,
                    xi_im: p.xi.im,
                    lambda_re: p.lambda.re,
                    lambda_im: p.lambda.im,
                    r: p.r,
                    t_re: p.t.re,
                    t_im: p.t.im,
                    phi_re: phi.re,
                    phi_im: phi.im,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    run.table(&rows)
}

fn transform(run: &mut Run) -> Result<()> {
    let c = run.config;
    let plan = run.timed("plan", || c.build_plan())?;
    run.record_plan(&plan);
    let f = radial_input(c, &plan)?;
    let big_f = run.timed("transform", || spherical_transform(&f, &plan))?;
    let name = c.outputs.function.clone();
    io::write_fan_csv(&big_f, run.create(&name)?)
}

fn inverse(run: &mut Run) -> Result<()> {
    let c = run.config;
    let plan = run.timed("plan", || c.build_plan())?;
    run.record_plan(&plan);
    let big_f = fan_input(c, &plan)?;
    let (f, tail) = run.timed("inverse", || inverse_with_tail(&big_f, &plan))?;
    let name = c.outputs.function.clone();
    io::write_radial_csv(&f, run.create(&name)?)?;
    run.records(&[json!({"record": "tail", "tail": tail})])
}

fn plancherel(run: &mut Run) -> Result<()> {
    let c = run.config;
    let plan = run.timed("plan", || c.build_plan())?;
    run.record_plan(&plan);
    let (f, source) = if c.fan_function.is_some() && c.test_function.is_none() && c.input.is_none() {
        let big_f = fan_input(c, &plan)?;
        (run.timed("inverse", || crate::transform::inverse_spherical_transform(&big_f, &plan))?, "fan_function")
    } else {
        (radial_input(c, &plan)?, "test_function")
    };
    let defect = run.timed("defect", || plancherel_defect(&f, &plan))?;
    let space = f.l2_norm();
    let rec = json!({"record": "plancherel", "source": source, "defect": defect, "space_l2": space, "grids": run.grids.clone()});
    run.table(&[PlancherelRow { defect, space_l2: space }])?;
    run.records(&[rec])
}

#[derive(Serialize)]
struct PlancherelRow {
    defect: f64,
    space_l2: f64,
}

#[derive(Serialize)]
struct CheckRow {
    check: &'static str,
    defect: f64,
}

fn mplus_check(run: &mut Run) -> Result<()> {
    let c = run.config;
    let plan = run.timed("plan", || c.build_plan())?;
    run.record_plan(&plan);
    let f = radial_input(c, &plan)?;
    let rows = run.timed("checks", || {
        let gf = spherical_transform(&f, &plan)?;
        let plus = spherical_transform(&f.multiply_by_a(1, false), &plan)?;
        let minus = spherical_transform(&f.multiply_by_a(1, true), &plan)?.scale(Complex64::new(-1.0, 0.0));
        let e_plus = gf.m_plus_apply()?.relative_l2_error(&plus)?;
        let e_minus = gf.m_minus_apply()?.relative_l2_error(&minus)?;
        // the pairing needs fan-compact inputs, or the truncated λ-edges leave boundary terms
        let (phi, psi) = match &c.fan_function {
            Some(spec) => transpose_pair(spec, plan.fan_grid().clone())?,
            None => (gf.clone(), plus.clone()),
        };
        let transpose = transpose_defect(&phi, &psi)?;
        let scale = phi.l2_norm() * psi.l2_norm();
        Ok(vec![
            CheckRow { check: "m_plus_intertwining", defect: e_plus },
            CheckRow { check: "m_minus_intertwining", defect: e_minus },
            CheckRow { check: "transpose", defect: transpose },
            CheckRow { check: "transpose_relative", defect: transpose / scale },
        ])
    })?;
    run.table(&rows)?;
    let recs: Vec<_> = rows
        .iter()
        .map(|r| json!({"record": "mplus_check", "check": r.check, "defect": r.defect}))
        .collect();
    run.records(&recs)
}

/// `φ` sampled from `spec` and a λ- and ray-modulated partner `ψ`, both of unit `L²(μ)` norm.
pub fn transpose_pair(spec: &FanSpec, grid: Arc<FanGrid>) -> Result<(FanFunction, FanFunction)> {
    let phi = spec.sample(grid.clone())?;
    let psi = phi.map(|s, j, i, v| v * Complex64::new(1.0 + 0.3 * j as f64, grid.lambda(s, i)) / (1 + j) as f64);
    let unit = |f: FanFunction| -> Result<FanFunction> {
        let norm = f.l2_norm();
        if norm == 0.0 {
            return Err(Error::ZeroFunction);
        }
        Ok(f.scale(Complex64::new(1.0 / norm, 0.0)))
    };
    Ok((unit(phi)?, unit(psi)?))
}

fn pw_direct(run: &mut Run) -> Result<()> {
    let c = run.config;
    let plan = run.timed("plan", || c.build_plan())?;
    run.record_plan(&plan);
    let f = radial_input(c, &plan)?;
    let est = run.timed("sequence", || {
        direct_pw_sequence(&f, c.norm.p, c.beta(), c.j_max, c.methods.direct, c.methods.limit, &plan)
    })?;
    estimate_outputs(run, &est, "pw_direct", json!(c.methods.direct))
}

fn pw_inverse(run: &mut Run) -> Result<()> {
    let c = run.config;
    let plan = run.timed("plan", || c.build_plan())?;
    run.record_plan(&plan);
    let big_f = fan_input(c, &plan)?;
    let est = run.timed("sequence", || {
        inverse_pw_sequence(&big_f, c.norm.p, c.beta(), c.j_max, c.methods.inverse, c.methods.limit, &plan)
    })?;
    estimate_outputs(run, &est, "pw_inverse", json!(c.methods.inverse))
}

fn holo_demo(run: &mut Run) -> Result<()> {
    let c = run.config;
    let g = c
        .growth
        .clone()
        .ok_or_else(|| Error::invalid("growth", "required by holo-demo"))?;
    let samples: Vec<f64> = if g.count == 1 {
        vec![g.lambda_min]
    } else {
        (0..g.count)
            .map(|k| g.lambda_min + (g.lambda_max - g.lambda_min) * k as f64 / (g.count - 1) as f64)
            .collect()
    };
    let rows = run.timed("probe", || holo_growth_probe(c.n, &AnnulusProfile, &BumpProfile, &samples, &c.series))?;
    run.table(&rows)
}

#[derive(Serialize)]
struct DiracRow {
    r: f64,
    t: f64,
    f_u_re: f64,
    f_u_im: f64,
    minus_dxi_re: f64,
    minus_dxi_im: f64,
    relative_error: f64,
}

fn dirac_demo(run: &mut Run) -> Result<()> {
    let c = run.config;
    let d = c.dirac.clone().ok_or_else(|| Error::invalid("dirac", "required by dirac-demo"))?;
    let params = SphericalParams::real(c.n as f64, 1.0);
    let rows = run.timed("compare", || {
        d.points
            .iter()
            .map(|&(r, t)| {
                let fu = dirac_derivative_field(c.n, r, t, &c.series)?;
                let dxi = -spherical_function_dxi(params, r, t, c.n, &c.series)?;
                let scale = dxi.norm();
                let relative_error = if scale == 0.0 { (fu - dxi).norm() } else { (fu - dxi).norm() / scale };
                Ok(DiracRow {
                    r,
                    t,
                    f_u_re: fu.re,
                    f_u_im: fu.im,
                    minus_dxi_re: dxi.re,
                    minus_dxi_im: dxi.im,
                    relative_error,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    run.table(&rows)?;
    let growth = run.timed("growth", || {
        d.radii
            .iter()
            .map(|&r| Ok(json!({"record": "dirac_growth", "r": r, "r_sq": r * r, "ratio": dirac_growth_ratio(c.n, r, &c.series)?})))
            .collect::<Result<Vec<_>>>()
    })?;
    run.records(&growth)
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    std::io::Write::write_all(&mut w, b"\n")?;
    Ok(())
}

/// Runs one subcommand, writing every artifact into `out`.
pub fn run(sub: Subcommand, config: &ExperimentConfig, out: &Path, seed: u64) -> Result<()> {
    config.validate()?;
    std::fs::create_dir_all(out)?;
    std::fs::write(out.join("config.json"), config.to_json() + "\n")?;
    let mut run = Run {
        config,
        out,
        artifacts: Vec::new(),
        timings: Vec::new(),
        grids: serde_json::Value::Null,
    };
    let start = Instant::now();
    match sub {
        Subcommand::EvalSpherical => eval_spherical(&mut run, seed),
        Subcommand::Transform => transform(&mut run),
        Subcommand::Inverse => inverse(&mut run),
        Subcommand::Plancherel => plancherel(&mut run),
        Subcommand::MplusCheck => mplus_check(&mut run),
        Subcommand::PwDirect => pw_direct(&mut run),
        Subcommand::PwInverse => pw_inverse(&mut run),
        Subcommand::HoloDemo => holo_demo(&mut run),
        Subcommand::DiracDemo => dirac_demo(&mut run),
    }?;
    let total = start.elapsed().as_secs_f64();
    write_json(
        &out.join("manifest.json"),
        &json!({
            "schema_version": SCHEMA_VERSION,
            "subcommand": sub.name(),
            "config_sha256": config.hash(),
            "seed": seed,
            "n": config.n,
            "grids": run.grids,
            "artifacts": run.artifacts,
            "crate_version": env!("CARGO_PKG_VERSION"),
        }),
    )?;
    let stages: serde_json::Map<String, serde_json::Value> =
        run.timings.into_iter().map(|(k, v)| (k, json!(v))).collect();
    write_json(&out.join("timings.json"), &json!({"total_seconds": total, "stages": stages}))
}

fn error_record(e: &Error) -> serde_json::Value {
    json!({"error": e.kind(), "field": e.field(), "message": e.to_string()})
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = (|| -> Result<()> {
        let config = match &args.config {
            Some(path) => ExperimentConfig::from_json(&std::fs::read_to_string(path)?)?,
            None => ExperimentConfig::default_for(args.subcommand),
        };
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(args.threads)
            .build()
            .map_err(|e| Error::invalid("threads", e.to_string()))?;
        pool.install(|| run(args.subcommand, &config, &args.out, args.seed))
    })();
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            let _ = std::fs::create_dir_all(&args.out);
            let _ = write_json(&args.out.join("error.json"), &error_record(&e));
            1
        }
    }
}
