//! Config-driven scenario registry: the user-facing surface behind the
//! `frontlab` CLI.
//!
//! A scenario is a TOML file (see `scenarios/` in the crate root) selecting a
//! `kind` plus explicit physical parameters; no numeric defaults hide in the
//! code. Running one produces a per-scenario output directory with
//! `report.csv`, width traces, optional snapshot CSV/PGM dumps, and (for the
//! barrier suite) `cert.csv`.

mod kinds;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Deserialize;

use crate::diagnostics::{self, BesselEnvelope, FrontMode, TraceValue};
use crate::grid::{Boundary, Geometry, GridSpec, GridState};
use crate::reaction::{Modulation, Point, ReactionField, ReactionProfile};
use crate::solver::{self, BumpShape};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Config schema
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub id: String,
    pub kind: String,
    #[serde(default)]
    pub description: String,
    /// Reserved for perturbation studies; unused by the core math.
    #[serde(default)]
    pub seed: u64,
    pub grid: Option<GridConfig>,
    pub field: Option<FieldConfig>,
    pub initial: Option<InitialConfig>,
    pub run: Option<RunConfig>,
    pub diagnostics: Option<DiagnosticsConfig>,
    #[serde(default)]
    pub output: OutputConfig,

    // kind-specific parameter sections
    pub front_run: Option<FrontRunParams>,
    pub terrace: Option<TerraceParams>,
    pub bounded_width: Option<BoundedWidthParams>,
    pub sandwich: Option<SandwichParams>,
    pub pockets: Option<PocketsParams>,
    pub annuli: Option<AnnuliParams>,
    pub slab: Option<SlabParams>,
    pub equilibria: Option<EquilibriaParams>,
    pub barrier_suite: Option<BarrierSuiteParams>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub geometry: String,
    pub extent: Vec<[f64; 2]>,
    pub dx: f64,
    pub boundary: String,
    pub d_eff: Option<usize>,
}

impl GridConfig {
    pub fn build(&self) -> Result<GridSpec> {
        let geometry = match self.geometry.as_str() {
            "line" => Geometry::Line,
            "plane" => Geometry::Plane,
            "cylinder" => Geometry::Cylinder {
                d_eff: self.d_eff.ok_or_else(|| {
                    Error::Scenario("cylinder geometry needs d_eff".into())
                })?,
            },
            other => return Err(Error::Scenario(format!("unknown geometry {other:?}"))),
        };
        let boundary = match self.boundary.as_str() {
            "neumann" => Boundary::NeumannZeroFlux,
            "dirichlet_zero" => Boundary::DirichletZero,
            "dirichlet_frozen" => Boundary::DirichletFrozen,
            other => return Err(Error::Scenario(format!("unknown boundary {other:?}"))),
        };
        GridSpec::new(geometry, self.extent.clone(), self.dx, boundary)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub kind: String,
    pub theta0: Option<f64>,
    pub amp: Option<f64>,
    pub amp_low: Option<f64>,
    pub amp_high: Option<f64>,
    pub c_scale: Option<f64>,
    /// Path to a `u,f0` CSV, relative to the config file.
    pub table: Option<String>,
}

impl ProfileConfig {
    pub fn build(&self, base_dir: &Path) -> Result<ReactionProfile> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::Scenario(format!("profile {} needs `{name}`", self.kind)))
        };
        match self.kind.as_str() {
            "zero" => Ok(ReactionProfile::zero()),
            "kpp" => ReactionProfile::kpp(need(self.amp, "amp")?),
            "ignition" => ReactionProfile::ignition(need(self.theta0, "theta0")?, need(self.amp, "amp")?),
            "ignition_kpp_cut" => {
                ReactionProfile::ignition_kpp_cut(need(self.theta0, "theta0")?, need(self.amp, "amp")?)
            }
            "ignition_bump" => {
                ReactionProfile::ignition_bump(need(self.theta0, "theta0")?, need(self.amp, "amp")?)
            }
            "bistable" => ReactionProfile::bistable(need(self.theta0, "theta0")?, need(self.amp, "amp")?),
            "two_step" => {
                ReactionProfile::two_step(need(self.amp_low, "amp_low")?, need(self.amp_high, "amp_high")?)
            }
            "terrace" => ReactionProfile::terrace(need(self.c_scale, "c_scale")?),
            "tabulated" => {
                let rel = self.table.as_ref().ok_or_else(|| {
                    Error::Scenario("tabulated profile needs `table` path".into())
                })?;
                let text = fs::read_to_string(base_dir.join(rel))?;
                ReactionProfile::from_csv(&text)
            }
            other => Err(Error::Scenario(format!("unknown profile kind {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulationConfig {
    pub kind: String,
    pub beta: Option<f64>,
    pub n_max: Option<u32>,
    pub centers: Option<Vec<[f64; 2]>>,
    pub radius: Option<f64>,
    pub collar: Option<f64>,
    pub half_width: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub profile: ProfileConfig,
    pub modulation: Option<ModulationConfig>,
    pub bounds_lower: Option<ProfileConfig>,
    pub bounds_upper: Option<ProfileConfig>,
    pub dim: usize,
}

impl FieldConfig {
    pub fn build(&self, base_dir: &Path) -> Result<ReactionField> {
        let base = self.profile.build(base_dir)?;
        let mut field = ReactionField::homogeneous(base, self.dim);
        if let Some(m) = &self.modulation {
            let need = |v: Option<f64>, name: &str| {
                v.ok_or_else(|| Error::Scenario(format!("modulation {} needs `{name}`", m.kind)))
            };
            let beta = need(m.beta, "beta")?;
            field.modulation = match m.kind.as_str() {
                "annuli" => Modulation::Annuli {
                    beta,
                    n_max: m.n_max.ok_or_else(|| Error::Scenario("annuli needs n_max".into()))?,
                },
                "pockets" => Modulation::Pockets {
                    beta,
                    centers: m
                        .centers
                        .clone()
                        .ok_or_else(|| Error::Scenario("pockets need centers".into()))?,
                    radius: need(m.radius, "radius")?,
                    collar: need(m.collar, "collar")?,
                },
                "strip" => Modulation::Strip {
                    beta,
                    half_width: need(m.half_width, "half_width")?,
                    collar: need(m.collar, "collar")?,
                },
                other => return Err(Error::Scenario(format!("unknown modulation {other:?}"))),
            };
            // a(x) ∈ [1, beta] scales the declared upper bound
            let (lo, _) = field.bounds.clone().unwrap();
            field.bounds = Some((lo.clone(), lo.scaled(beta)));
        }
        if let (Some(lo), Some(hi)) = (&self.bounds_lower, &self.bounds_upper) {
            field.bounds = Some((lo.build(base_dir)?, hi.build(base_dir)?));
        }
        Ok(field)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub kind: String,
    pub axis: Option<usize>,
    pub x0: Option<[f64; 2]>,
    pub r1: Option<f64>,
    pub r2: Option<f64>,
    pub eps1: Option<f64>,
    pub eps2: Option<f64>,
    /// Strict-positivity margin of the bump cap ODE.
    pub margin: Option<f64>,
}

impl InitialConfig {
    pub fn build(&self, spec: &GridSpec, field: &ReactionField) -> Result<GridState> {
        let theta0 = field.base.theta0().unwrap_or(0.0);
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::Scenario(format!("initial {} needs `{name}`", self.kind)))
        };
        match self.kind.as_str() {
            "spark_like" => solver::spark_like(
                spec,
                self.x0.ok_or_else(|| Error::Scenario("spark needs x0".into()))?,
                need(self.r1, "r1")?,
                need(self.r2, "r2")?,
                need(self.eps1, "eps1")?,
                need(self.eps2, "eps2")?,
                theta0,
            ),
            "front_like" => solver::front_like(
                spec,
                self.axis.unwrap_or(0),
                need(self.r1, "r1")?,
                need(self.r2, "r2")?,
                need(self.eps1, "eps1")?,
                need(self.eps2, "eps2")?,
                theta0,
            ),
            "bump_front" => solver::bump_w(
                spec,
                BumpShape::FrontAlongAxis(self.axis.unwrap_or(0)),
                need(self.r2, "r2")?,
                &field.base,
                need(self.margin, "margin")?,
            ),
            "bump_radial" => solver::bump_w(
                spec,
                BumpShape::Radial(self.x0.ok_or_else(|| Error::Scenario("bump needs x0".into()))?),
                need(self.r2, "r2")?,
                &field.base,
                need(self.margin, "margin")?,
            ),
            other => Err(Error::Scenario(format!("unknown initial kind {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub t_end: f64,
    pub snapshot_every: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsConfig {
    pub eps_list: Vec<f64>,
    pub eps0: f64,
    pub h: f64,
    /// 0 disables the Λ probe sweep.
    pub lambda_stride: usize,
    pub probe: [f64; 2],
    /// "axis" or "radial".
    pub front_mode: String,
    pub front_eps: f64,
    /// Pair width upper threshold ε' for the L_pair column.
    pub pair_eps: f64,
    /// 0 = derive zeta as c0²/8 from the shot lower-bound speed.
    pub zeta: f64,
}

impl DiagnosticsConfig {
    fn validate(&self) -> Result<()> {
        for &e in &self.eps_list {
            if !(0.0 < e && e < 1.0) || e == 0.5 {
                return Err(Error::Scenario(format!(
                    "eps_list entries must lie in (0,1) \\ {{1/2}}, got {e}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub snapshots_csv: bool,
    #[serde(default)]
    pub heatmaps: bool,
}

// kind-specific parameters --------------------------------------------------

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrontRunParams {
    pub speed_expect: f64,
    pub speed_rtol: f64,
    pub fit_window: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TerraceParams {
    pub lower_eps: f64,
    pub upper_eps: f64,
    pub ratio_rtol: f64,
    pub plateau_band: f64,
    pub slope_rtol: f64,
    pub fit_window: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundedWidthParams {
    /// Second sub-run grid (the 2D one).
    pub grid2d: GridConfig,
    pub initial2d: InitialConfig,
    pub run2d: RunConfig,
    pub lambda_stride2d: usize,
    pub monotone_tol: f64,
    pub window_frac: f64,
    pub bound_factor: f64,
    pub speed_lo_factor: f64,
    pub speed_hi_factor: f64,
    pub delta_factor: f64,
    /// Level and horizons for the two-sided inclusion check (the horizon is
    /// per Definition-style tau_{eps,delta}: longer runs tolerate the fixed
    /// transition width).
    pub mean_speed_eps: f64,
    pub mean_speed_tau: f64,
    pub mean_speed_tau2d: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SandwichParams {
    pub bump_r2: f64,
    pub bump_margin: f64,
    pub trap_eps: f64,
    pub max_shift: f64,
    pub settle_frac: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PocketsParams {
    pub pocket_eps: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnuliParams {
    pub beta: f64,
    pub n_max: u32,
    pub strip_ratio_min: f64,
    pub strip_length: f64,
    pub strip_width: f64,
    pub strip_t_end: f64,
    pub strip_dx: f64,
    pub high_eps: f64,
    pub low_eps: f64,
    pub high_growth_min: f64,
    pub low_bound_factor: f64,
    pub early_frac: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlabParams {
    pub d_eff: usize,
    pub m_big: f64,
    pub level_lo: f64,
    pub level_hi: f64,
    pub gap_growth_min: f64,
    pub trend_eps: Vec<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquilibriaParams {
    pub flat_tol: f64,
    pub grid2d: GridConfig,
    pub seed2d_value: f64,
    pub seed2d_radius: f64,
    pub run2d: RunConfig,
    pub cylinder: GridConfig,
    pub run_cyl: RunConfig,
    pub integral_slack: f64,
    pub seed1d_value: f64,
    pub seed1d_radius: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarrierSuiteParams {
    pub delta: f64,
    pub annular_extent: f64,
    pub annular_dx: f64,
    pub annular_dt: f64,
    pub eps2: f64,
    pub ref_r2: f64,
    pub ref_margin: f64,
    pub ref_t_end: f64,
    pub ref_every: f64,
    pub data_r1: f64,
    pub data_r2: f64,
    pub data_eps1: f64,
    pub cert_t_end: f64,
    pub cert_dt: f64,
    /// Shorter window for the equilibrium-tail lattice: its exponential
    /// grows like exp(c² t / 2) at the inflow corner and must stay finite.
    pub slab_cert_t_end: f64,
    pub cmp_t_end: f64,
    pub cmp_every: f64,
    pub sub_offset: f64,
    pub slab_m: f64,
    pub slab_z: f64,
    pub slab_extent: [f64; 2],
    pub slab_dx: f64,
    pub comparison_tol: f64,
}

// ---------------------------------------------------------------------------
// Run reports
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: String,
    /// Acceptance criteria the check serves ("-" for supporting checks).
    pub criteria: String,
    pub pass: bool,
    pub value: f64,
    pub threshold: f64,
    pub details: String,
}

impl CheckResult {
    pub fn new(
        name: &str,
        criteria: &str,
        pass: bool,
        value: f64,
        threshold: f64,
        details: impl Into<String>,
    ) -> Self {
        CheckResult {
            name: name.into(),
            criteria: criteria.into(),
            pass,
            value,
            threshold,
            details: details.into(),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunReport {
    pub scenario: String,
    pub checks: Vec<CheckResult>,
    pub trace_paths: Vec<PathBuf>,
    pub warnings: Vec<String>,
    pub wall_seconds: f64,
}

impl RunReport {
    pub fn all_passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::from("check,criteria,pass,value,threshold,details\n");
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{},{},{},{:.8e},{:.8e},{}",
                c.name,
                c.criteria,
                c.pass,
                c.value,
                c.threshold,
                c.details.replace(',', ";")
            );
        }
        fs::write(path, out)?;
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Width traces
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct TraceRow {
    pub t: f64,
    pub eps: f64,
    pub l_low: TraceValue,
    pub l_high: TraceValue,
    pub j: TraceValue,
    pub l_pair: TraceValue,
    pub front_pos: TraceValue,
    pub z_origin: TraceValue,
    pub y_origin: TraceValue,
    pub lambda: TraceValue,
}

pub const TRACE_HEADER: &str = "t,eps,L_low,L_high,J,L_pair,front_pos,Z_origin,Y_origin,Lambda";

pub fn write_trace(path: &Path, rows: &[TraceRow]) -> Result<()> {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{:.8e},{:.8e},{},{},{},{},{},{},{},{}",
            r.t, r.eps, r.l_low, r.l_high, r.j, r.l_pair, r.front_pos, r.z_origin, r.y_origin, r.lambda
        );
    }
    fs::write(path, out)?;
    Ok(())
}

/// Per-snapshot trace builder shared by the scenario kinds.
pub struct TraceObserver {
    pub cfg: DiagnosticsConfig,
    pub envelope: Option<BesselEnvelope>,
    pub rows: Vec<TraceRow>,
    front_mode: FrontMode,
}

impl TraceObserver {
    pub fn new(cfg: &DiagnosticsConfig, envelope: Option<BesselEnvelope>) -> Result<Self> {
        cfg.validate()?;
        let front_mode = match cfg.front_mode.as_str() {
            "axis" => FrontMode::AxisMax(0),
            "radial" => FrontMode::RadialMax([cfg.probe[0], cfg.probe[1]]),
            other => return Err(Error::Scenario(format!("unknown front_mode {other:?}"))),
        };
        Ok(TraceObserver {
            cfg: cfg.clone(),
            envelope,
            rows: Vec::new(),
            front_mode,
        })
    }

    pub fn observe(&mut self, s: &GridState) {
        let cfg = &self.cfg;
        let probe: Point = [cfg.probe[0], cfg.probe[1]];
        let z = diagnostics::z_y(s, probe, cfg.eps0)
            .map(TraceValue::from)
            .unwrap_or(TraceValue::Undef);
        let (y, lambda) = match &self.envelope {
            Some(env) => {
                let y = TraceValue::from(diagnostics::y_h_y(s, probe, cfg.h, env));
                let lambda = if cfg.lambda_stride > 0 {
                    diagnostics::lambda_h(s, cfg.h, env, cfg.eps0, cfg.lambda_stride)
                } else {
                    TraceValue::Undef
                };
                (y, lambda)
            }
            None => (TraceValue::Undef, TraceValue::Undef),
        };
        for &eps in &cfg.eps_list {
            let (l_low, j, l_pair) = if eps < 0.5 {
                (
                    TraceValue::from(diagnostics::width_l(s, eps)),
                    TraceValue::from(diagnostics::width_j(s, eps)),
                    if eps < cfg.pair_eps {
                        TraceValue::from(diagnostics::width_l_pair(s, eps, cfg.pair_eps))
                    } else {
                        TraceValue::Undef
                    },
                )
            } else {
                (TraceValue::Undef, TraceValue::Undef, TraceValue::Undef)
            };
            let l_high = if eps > 0.5 {
                TraceValue::from(diagnostics::width_l_high(s, eps))
            } else {
                TraceValue::Undef
            };
            let front_pos = diagnostics::front_position(s, eps, self.front_mode)
                .map(TraceValue::Val)
                .unwrap_or(TraceValue::Undef);
            self.rows.push(TraceRow {
                t: s.t,
                eps,
                l_low,
                l_high,
                j,
                l_pair,
                front_pos,
                z_origin: z,
                y_origin: y,
                lambda,
            });
        }
    }

    /// Values of a column for a fixed eps, in snapshot order.
    pub fn column(&self, eps: f64, pick: impl Fn(&TraceRow) -> TraceValue) -> Vec<(f64, TraceValue)> {
        self.rows
            .iter()
            .filter(|r| (r.eps - eps).abs() < 1e-12)
            .map(|r| (r.t, pick(r)))
            .collect()
    }
}

/// Envelope sized for the grid: `zeta' = c0²/8 + zeta/2` with `zeta`
/// defaulting to `c0²/8`.
pub fn envelope_for(spec: &GridSpec, cfg: &DiagnosticsConfig, c0: f64) -> Result<BesselEnvelope> {
    let zeta = if cfg.zeta > 0.0 { cfg.zeta } else { c0 * c0 / 8.0 };
    let zeta_prime = c0 * c0 / 8.0 + zeta / 2.0;
    let mut diag: f64 = 0.0;
    for e in &spec.extent {
        diag = diag.hypot(e[1] - e[0]);
    }
    let dim = spec.dim_factor() as usize;
    BesselEnvelope::new(zeta_prime, dim, diag + 5.0)
}

// ---------------------------------------------------------------------------
// Registry and dispatch
// ---------------------------------------------------------------------------

pub struct BuiltinScenario {
    pub id: &'static str,
    pub summary: &'static str,
    pub config_text: &'static str,
}

/// Built-in scenarios; the same TOML files live under `scenarios/`.
pub const BUILTINS: &[BuiltinScenario] = &[
    BuiltinScenario {
        id: "kpp_speed",
        summary: "1D pulled front: measured spreading speed vs the linearization value",
        config_text: include_str!("../../scenarios/kpp_speed.toml"),
    },
    BuiltinScenario {
        id: "terrace",
        summary: "two-step reaction: stacked fronts with sqrt(2) speed ratio and a growing mid plateau",
        config_text: include_str!("../../scenarios/terrace.toml"),
    },
    BuiltinScenario {
        id: "ignition_bounded_width",
        summary: "bump-seeded monotone ignition runs (1D and 2D): bounded widths and mean speed",
        config_text: include_str!("../../scenarios/ignition_bounded_width.toml"),
    },
    BuiltinScenario {
        id: "sandwich",
        summary: "front-like data trapped between time shifts of a bump-seeded reference",
        config_text: include_str!("../../scenarios/sandwich.toml"),
    },
    BuiltinScenario {
        id: "pockets2d",
        summary: "slow inclusions leave transient unburned pockets behind the leading edge",
        config_text: include_str!("../../scenarios/pockets2d.toml"),
    },
    BuiltinScenario {
        id: "annuli",
        summary: "fast rings at dyadic radii: complement-side width grows, low-side stays bounded",
        config_text: include_str!("../../scenarios/annuli.toml"),
    },
    BuiltinScenario {
        id: "slab",
        summary: "cylinder d_eff = 4: intermediate values outrun the full burn along the axis",
        config_text: include_str!("../../scenarios/slab.toml"),
    },
    BuiltinScenario {
        id: "equilibria_relax",
        summary: "parabolic relaxation to equilibria: flat limits in low dimension, weighted integral bound",
        config_text: include_str!("../../scenarios/equilibria_relax.toml"),
    },
    BuiltinScenario {
        id: "barrier_suite",
        summary: "sign certification and discrete comparison for every shipped barrier",
        config_text: include_str!("../../scenarios/barrier_suite.toml"),
    },
];

pub fn parse_config(text: &str, path: &Path) -> Result<ScenarioConfig> {
    toml::from_str(text).map_err(|e| Error::Config {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })
}

/// Loads a config from a path, or from the built-in registry when the
/// argument names a built-in id.
pub fn load_config(arg: &str) -> Result<(ScenarioConfig, PathBuf)> {
    let path = Path::new(arg);
    if path.exists() {
        let text = fs::read_to_string(path)?;
        let cfg = parse_config(&text, path)?;
        let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        return Ok((cfg, base));
    }
    for b in BUILTINS {
        if b.id == arg {
            let cfg = parse_config(b.config_text, Path::new(arg))?;
            return Ok((cfg, PathBuf::from(".")));
        }
    }
    Err(Error::Scenario(format!(
        "{arg}: not a config file and not a built-in scenario id"
    )))
}

/// Runs a scenario into `out_dir/<id>/`.
pub fn run_scenario(cfg: &ScenarioConfig, base_dir: &Path, out_dir: &Path) -> Result<RunReport> {
    let started = Instant::now();
    let dir = out_dir.join(&cfg.id);
    fs::create_dir_all(&dir)?;
    let mut report = match cfg.kind.as_str() {
        "front_run" => kinds::front_run(cfg, base_dir, &dir),
        "terrace" => kinds::terrace(cfg, base_dir, &dir),
        "ignition_bounded_width" => kinds::ignition_bounded_width(cfg, base_dir, &dir),
        "sandwich" => kinds::sandwich(cfg, base_dir, &dir),
        "pockets2d" => kinds::pockets2d(cfg, base_dir, &dir),
        "annuli" => kinds::annuli(cfg, base_dir, &dir),
        "slab" => kinds::slab(cfg, base_dir, &dir),
        "equilibria_relax" => kinds::equilibria_relax(cfg, base_dir, &dir),
        "barrier_suite" => kinds::barrier_suite(cfg, base_dir, &dir),
        other => Err(Error::Scenario(format!("unknown scenario kind {other:?}"))),
    }?;
    report.scenario = cfg.id.clone();
    report.wall_seconds = started.elapsed().as_secs_f64();
    report.write_csv(&dir.join("report.csv"))?;
    Ok(report)
}

/// Snapshot dump helper honoring the output flags.
pub(crate) fn dump_snapshot(
    dir: &Path,
    out: &OutputConfig,
    index: usize,
    state: &GridState,
) -> Result<()> {
    if !out.snapshots_csv && !out.heatmaps {
        return Ok(());
    }
    let snaps = dir.join("snapshots");
    fs::create_dir_all(&snaps)?;
    if out.snapshots_csv {
        state.write_csv(&snaps.join(format!("snap_{index:04}.csv")))?;
    }
    if out.heatmaps && state.spec.n1() > 1 {
        state.write_pgm(&snaps.join(format!("snap_{index:04}.pgm")))?;
    }
    Ok(())
}

pub(crate) fn required<'a, T>(v: &'a Option<T>, what: &str) -> Result<&'a T> {
    v.as_ref()
        .ok_or_else(|| Error::Scenario(format!("config section `{what}` is required for this kind")))
}
