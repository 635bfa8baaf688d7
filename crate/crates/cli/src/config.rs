//! Scenario files. Every section is optional; omitted values fall back to
//! the reference auditorium plant and a 0.2 P_b down/up schedule.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use ves_core::extended::{
    CopModel, ExtendedConfig, PiGains, RecoveryPolicy, WallModel, Weather, WeatherSeries,
};
use ves_core::sweep::{linear_grid, log_grid};
use ves_core::units::delta_f_to_delta_k;
use ves_core::{
    AssumptionChecks, BaselineInput, BuildingParams, HvacParams, Phase, PhysicalConstants, Plant,
    ScheduleSpec, Temperature, VesError,
};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    #[default]
    Analytic,
    Extended,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub model: Model,
    pub building: Option<BuildingSection>,
    pub hvac: Option<HvacSection>,
    pub ambient: Option<AmbientSection>,
    pub constants: Option<ConstantsSection>,
    pub schedule: Option<ScheduleSection>,
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub integrator: IntegratorSection,
    #[serde(default)]
    pub extended: ExtendedSection,
    #[serde(default)]
    pub weather: WeatherSection,
    #[serde(default)]
    pub output: OutputSection,
    /// Directory of the config file, for resolving relative paths.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuildingSection {
    #[serde(default = "d::r_th")]
    pub r_th: f64,
    #[serde(default = "d::c_th")]
    pub c_th: f64,
    #[serde(default = "d::t_low_f")]
    pub t_low_f: f64,
    #[serde(default = "d::t_high_f")]
    pub t_high_f: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HvacSection {
    #[serde(default = "d::alpha_1f")]
    pub alpha_1f: f64,
    #[serde(default = "d::alpha_2f")]
    pub alpha_2f: f64,
    #[serde(default = "d::cop")]
    pub cop: f64,
    #[serde(default = "d::t_sa_f")]
    pub t_sa_f: f64,
    #[serde(default = "d::r_oa")]
    pub r_oa: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmbientSection {
    #[serde(default = "d::t_oa_f")]
    pub t_oa_f: f64,
    #[serde(default = "d::t_b_f")]
    pub t_b_f: f64,
    pub m_a_b: Option<f64>,
    pub q_x: Option<f64>,
    #[serde(default = "d::yes")]
    pub check_assumptions: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsSection {
    #[serde(default = "d::c_pa")]
    pub c_pa: f64,
    #[serde(default = "d::c_pw")]
    pub c_pw: f64,
    #[serde(default = "d::g_h2o")]
    pub g_h2o: f64,
    #[serde(default = "d::r_g")]
    pub r_g: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseName {
    UpDown,
    DownUp,
}

impl From<PhaseName> for Phase {
    fn from(p: PhaseName) -> Self {
        match p {
            PhaseName::UpDown => Phase::UpDown,
            PhaseName::DownUp => Phase::DownUp,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSection {
    /// Absolute amplitude, W.
    pub delta_p: Option<f64>,
    /// Amplitude as a fraction of baseline power.
    pub delta_p_fraction: Option<f64>,
    /// Half-period, s.
    #[serde(default = "d::t_p")]
    pub t_p: f64,
    #[serde(default = "d::n")]
    pub n: u32,
    #[serde(default = "d::phase")]
    pub phase: PhaseName,
    #[serde(default)]
    pub strict_comfort: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    TP,
    N,
    DeltaP,
    ROa,
}

impl SweepVariable {
    /// Column name in curve output.
    pub fn column(self) -> &'static str {
        match self {
            SweepVariable::TP => "t_p_s",
            SweepVariable::N => "n",
            SweepVariable::DeltaP => "delta_p_w",
            SweepVariable::ROa => "r_oa",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub variable: SweepVariable,
    /// Explicit grid; alternative to `start`/`stop`/`points`.
    pub grid: Option<Vec<f64>>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub points: Option<usize>,
    #[serde(default = "d::spacing")]
    pub spacing: Spacing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Closed form when `r_oa = 1`, numeric otherwise.
    Auto,
    ClosedForm,
    Numeric,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSection {
    #[serde(default = "d::method")]
    pub method: Method,
    #[serde(default = "d::dt")]
    pub dt: f64,
    /// Trace sampling step of the closed-form path, s.
    #[serde(default = "d::trace_dt")]
    pub trace_dt: f64,
    #[serde(default = "d::recovery_cap_h")]
    pub recovery_cap_h: f64,
    /// Set-point band that ends controller recovery, K.
    #[serde(default = "d::recovery_tolerance_k")]
    pub recovery_tolerance_k: f64,
    #[serde(default = "d::recovery_hold_s")]
    pub recovery_hold_s: f64,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        Self {
            method: d::method(),
            dt: d::dt(),
            trace_dt: d::trace_dt(),
            recovery_cap_h: d::recovery_cap_h(),
            recovery_tolerance_k: d::recovery_tolerance_k(),
            recovery_hold_s: d::recovery_hold_s(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WallName {
    Dynamic,
    Static,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecoveryName {
    Controller,
    SquareWave,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtendedSection {
    pub c_z: Option<f64>,
    pub c_w: Option<f64>,
    pub r_z: Option<f64>,
    pub r_w: Option<f64>,
    pub volume: Option<f64>,
    pub p_da: Option<f64>,
    pub w_sa: Option<f64>,
    pub omega_x: Option<f64>,
    pub wall: Option<WallName>,
    pub humidity: Option<bool>,
    /// Fixed COP; the outdoor-temperature curve is used when absent.
    pub cop: Option<f64>,
    pub kp: Option<f64>,
    pub ki: Option<f64>,
    pub m_a_max: Option<f64>,
    pub recovery: Option<RecoveryName>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeatherKind {
    #[default]
    Diurnal,
    Constant,
    Csv,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeatherSection {
    #[serde(default)]
    pub kind: WeatherKind,
    pub path: Option<PathBuf>,
    /// Constant outdoor humidity ratio.
    #[serde(default = "d::w_oa")]
    pub w_oa: f64,
    #[serde(default = "d::t_oa_f")]
    pub mean_t_oa_f: f64,
    #[serde(default = "d::amplitude_f")]
    pub amplitude_f: f64,
    #[serde(default = "d::w_oa")]
    pub mean_w_oa: f64,
    #[serde(default = "d::amplitude_w_oa")]
    pub amplitude_w_oa: f64,
    #[serde(default = "d::period_h")]
    pub period_h: f64,
    #[serde(default = "d::peak_h")]
    pub peak_h: f64,
}

impl Default for WeatherSection {
    fn default() -> Self {
        Self {
            kind: WeatherKind::default(),
            path: None,
            w_oa: d::w_oa(),
            mean_t_oa_f: d::t_oa_f(),
            amplitude_f: d::amplitude_f(),
            mean_w_oa: d::w_oa(),
            amplitude_w_oa: d::amplitude_w_oa(),
            period_h: d::period_h(),
            peak_h: d::peak_h(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "d::out_dir")]
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: d::out_dir() }
    }
}

mod d {
    use super::{Method, PhaseName, Spacing};
    use std::path::PathBuf;

    pub fn r_th() -> f64 {
        1.3e-3
    }
    pub fn c_th() -> f64 {
        3.4e7
    }
    pub fn t_low_f() -> f64 {
        70.0
    }
    pub fn t_high_f() -> f64 {
        74.0
    }
    pub fn alpha_1f() -> f64 {
        662.0
    }
    pub fn alpha_2f() -> f64 {
        -576.0
    }
    pub fn cop() -> f64 {
        3.5
    }
    pub fn t_sa_f() -> f64 {
        55.0
    }
    pub fn r_oa() -> f64 {
        1.0
    }
    pub fn t_oa_f() -> f64 {
        80.0
    }
    pub fn t_b_f() -> f64 {
        72.0
    }
    pub fn yes() -> bool {
        true
    }
    pub fn c_pa() -> f64 {
        1006.0
    }
    pub fn c_pw() -> f64 {
        1860.0
    }
    pub fn g_h2o() -> f64 {
        2.501e6
    }
    pub fn r_g() -> f64 {
        287.055
    }
    pub fn t_p() -> f64 {
        1800.0
    }
    pub fn n() -> u32 {
        1
    }
    pub fn phase() -> PhaseName {
        PhaseName::DownUp
    }
    pub fn spacing() -> Spacing {
        Spacing::Linear
    }
    pub fn method() -> Method {
        Method::Auto
    }
    pub fn dt() -> f64 {
        10.0
    }
    pub fn trace_dt() -> f64 {
        60.0
    }
    pub fn recovery_cap_h() -> f64 {
        48.0
    }
    pub fn recovery_tolerance_k() -> f64 {
        0.005
    }
    pub fn recovery_hold_s() -> f64 {
        600.0
    }
    pub fn w_oa() -> f64 {
        0.010
    }
    pub fn amplitude_f() -> f64 {
        10.0
    }
    pub fn amplitude_w_oa() -> f64 {
        0.002
    }
    pub fn period_h() -> f64 {
        24.0
    }
    pub fn peak_h() -> f64 {
        15.0
    }
    pub fn out_dir() -> PathBuf {
        PathBuf::from("out")
    }
}

/// Default sweep: single-cycle efficiency over 60 log-spaced half-periods
/// from 1 min to 5 h.
fn default_sweep() -> SweepSection {
    SweepSection {
        variable: SweepVariable::TP,
        grid: None,
        start: Some(60.0),
        stop: Some(18_000.0),
        points: Some(60),
        spacing: Spacing::Log,
    }
}

fn invalid(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {msg}"))
}

fn f_temp(field: &str, v: f64) -> Result<Temperature, CliError> {
    Temperature::from_fahrenheit(v).map_err(|e| invalid(field, e))
}

fn model_err(field: &str) -> impl Fn(VesError) -> CliError + '_ {
    move |e| {
        if e.is_input_error() {
            invalid(field, e)
        } else {
            CliError::Model(e)
        }
    }
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn plant(&self) -> Result<Plant, CliError> {
        self.plant_with_r_oa(None)
    }

    /// Builds the plant, optionally replacing the outside air ratio.
    pub fn plant_with_r_oa(&self, r_oa: Option<f64>) -> Result<Plant, CliError> {
        let b = self.building.clone().unwrap_or(BuildingSection {
            r_th: d::r_th(),
            c_th: d::c_th(),
            t_low_f: d::t_low_f(),
            t_high_f: d::t_high_f(),
        });
        let h = self.hvac.clone().unwrap_or(HvacSection {
            alpha_1f: d::alpha_1f(),
            alpha_2f: d::alpha_2f(),
            cop: d::cop(),
            t_sa_f: d::t_sa_f(),
            r_oa: d::r_oa(),
        });
        let a = self.ambient.clone().unwrap_or(AmbientSection {
            t_oa_f: d::t_oa_f(),
            t_b_f: d::t_b_f(),
            m_a_b: Some(2.27),
            q_x: None,
            check_assumptions: true,
        });
        let given = match (a.m_a_b, a.q_x) {
            (Some(m), None) => BaselineInput::Airflow(m),
            (None, Some(q)) => BaselineInput::HeatGain(q),
            (None, None) => return Err(invalid("ambient", "one of `m_a_b` or `q_x` is required")),
            (Some(_), Some(_)) => {
                return Err(invalid("ambient", "give only one of `m_a_b` and `q_x`"))
            }
        };
        let constants = match &self.constants {
            Some(c) => PhysicalConstants::new(c.c_pa, c.c_pw, c.g_h2o, c.r_g)
                .map_err(|e| invalid("constants", e))?,
            None => PhysicalConstants::default(),
        };
        let building = BuildingParams::new(
            b.r_th,
            b.c_th,
            f_temp("building.t_low_f", b.t_low_f)?,
            f_temp("building.t_high_f", b.t_high_f)?,
        )
        .map_err(|e| invalid("building", e))?;
        let hvac = HvacParams::new(
            h.alpha_1f,
            h.alpha_2f,
            h.cop,
            f_temp("hvac.t_sa_f", h.t_sa_f)?,
            r_oa.unwrap_or(h.r_oa),
        )
        .map_err(|e| invalid("hvac", e))?;
        let checks = if a.check_assumptions {
            AssumptionChecks::Enforce
        } else {
            AssumptionChecks::Skip
        };
        Plant::new(
            building,
            hvac,
            f_temp("ambient.t_oa_f", a.t_oa_f)?,
            f_temp("ambient.t_b_f", a.t_b_f)?,
            given,
            constants,
            checks,
        )
        .map_err(model_err("ambient"))
    }

    fn schedule_section(&self) -> ScheduleSection {
        self.schedule.clone().unwrap_or(ScheduleSection {
            delta_p: None,
            delta_p_fraction: Some(0.2),
            t_p: d::t_p(),
            n: d::n(),
            phase: d::phase(),
            strict_comfort: false,
        })
    }

    pub fn strict_comfort(&self) -> bool {
        self.schedule_section().strict_comfort
    }

    /// Schedule with the amplitude resolved against `plant`'s baseline.
    pub fn schedule(&self, plant: &Plant) -> Result<ScheduleSpec, CliError> {
        let s = self.schedule_section();
        let delta_p = match (s.delta_p, s.delta_p_fraction) {
            (Some(p), None) => p,
            (None, Some(f)) => f * plant.baseline.p_hvac_b,
            _ => {
                return Err(invalid(
                    "schedule",
                    "exactly one of `delta_p` and `delta_p_fraction` is required",
                ))
            }
        };
        ScheduleSpec::new(delta_p, s.t_p, s.n, s.phase.into()).map_err(|e| invalid("schedule", e))
    }

    pub fn sweep_section(&self) -> SweepSection {
        self.sweep.clone().unwrap_or_else(default_sweep)
    }

    pub fn grid(&self) -> Result<(SweepVariable, Vec<f64>), CliError> {
        let s = self.sweep_section();
        let grid = match (&s.grid, s.start, s.stop, s.points) {
            (Some(g), None, None, None) => g.clone(),
            (None, Some(a), Some(b), Some(n)) => {
                if !(a.is_finite() && b.is_finite()) {
                    return Err(invalid("sweep", "grid bounds must be finite"));
                }
                if s.spacing == Spacing::Log && !(a > 0.0 && b > 0.0) {
                    return Err(invalid("sweep", "log spacing needs positive bounds"));
                }
                match s.spacing {
                    Spacing::Linear => linear_grid(a, b, n),
                    Spacing::Log => log_grid(a, b, n),
                }
            }
            _ => {
                return Err(invalid(
                    "sweep",
                    "give either `grid` or all of `start`, `stop` and `points`",
                ))
            }
        };
        if grid.is_empty() {
            return Err(invalid("sweep.grid", "grid is empty"));
        }
        if let Some(x) = grid.iter().find(|x| !x.is_finite()) {
            return Err(invalid("sweep.grid", format!("non-finite value {x}")));
        }
        if s.variable == SweepVariable::N {
            if let Some(x) = grid
                .iter()
                .find(|x| !(x.fract() == 0.0 && **x >= 1.0 && **x <= u32::MAX as f64))
            {
                return Err(invalid(
                    "sweep.grid",
                    format!("cycle counts must be positive integers, got {x}"),
                ));
            }
        }
        Ok((s.variable, grid))
    }

    pub fn extended_config(&self, plant: &Plant) -> Result<ExtendedConfig, CliError> {
        let mut cfg = ExtendedConfig::from_plant(plant);
        let e = &self.extended;
        let b = &mut cfg.building;
        for (slot, v) in [
            (&mut b.c_z, e.c_z),
            (&mut b.c_w, e.c_w),
            (&mut b.r_z, e.r_z),
            (&mut b.r_w, e.r_w),
            (&mut b.volume, e.volume),
            (&mut b.p_da, e.p_da),
        ] {
            if let Some(v) = v {
                *slot = v;
            }
        }
        if let Some(v) = e.w_sa {
            cfg.w_sa = v;
        }
        if let Some(v) = e.omega_x {
            cfg.omega_x = v;
        }
        if let Some(v) = e.m_a_max {
            cfg.m_a_max = v;
        }
        if let Some(w) = e.wall {
            cfg.wall = match w {
                WallName::Dynamic => WallModel::Dynamic,
                WallName::Static => WallModel::Static,
            };
        }
        if let Some(h) = e.humidity {
            cfg.humidity = h;
        }
        if let Some(c) = e.cop {
            cfg.cop = CopModel::Constant(c);
        }
        cfg.gains = PiGains {
            kp: e.kp.unwrap_or(cfg.gains.kp),
            ki: e.ki.unwrap_or(cfg.gains.ki),
        };
        let i = &self.integrator;
        cfg.dt = i.dt;
        cfg.recovery_cap = i.recovery_cap_h * 3600.0;
        cfg.recovery = match e.recovery.unwrap_or(RecoveryName::Controller) {
            RecoveryName::Controller => RecoveryPolicy::ClimateController {
                tolerance_k: i.recovery_tolerance_k,
                hold_s: i.recovery_hold_s,
            },
            RecoveryName::SquareWave => RecoveryPolicy::SquareWave,
        };
        cfg.validate().map_err(|e| invalid("extended", e))?;
        Ok(cfg)
    }

    pub fn weather(&self, plant: &Plant) -> Result<Weather, CliError> {
        let w = &self.weather;
        match w.kind {
            WeatherKind::Constant => Ok(Weather::constant(plant.ambient.t_oa, w.w_oa)),
            WeatherKind::Diurnal => {
                if !(w.period_h > 0.0 && w.period_h.is_finite()) {
                    return Err(invalid("weather.period_h", "must be positive"));
                }
                Ok(Weather::Diurnal {
                    mean_t_oa: f_temp("weather.mean_t_oa_f", w.mean_t_oa_f)?,
                    amplitude_k: delta_f_to_delta_k(w.amplitude_f),
                    mean_w_oa: w.mean_w_oa,
                    amplitude_w_oa: w.amplitude_w_oa,
                    period_s: w.period_h * 3600.0,
                    peak_s: w.peak_h * 3600.0,
                })
            }
            WeatherKind::Csv => {
                let path = w
                    .path
                    .as_ref()
                    .ok_or_else(|| invalid("weather.path", "required for csv weather"))?;
                let path = if path.is_absolute() {
                    path.clone()
                } else {
                    self.base_dir.join(path)
                };
                WeatherSeries::from_csv_path(&path)
                    .map(Weather::Series)
                    .map_err(|e| invalid("weather", e))
            }
        }
    }

    /// Applies command-line overrides.
    pub fn override_with(&mut self, out: Option<PathBuf>, dt: Option<f64>) {
        if let Some(o) = out {
            self.output.dir = o;
        }
        if let Some(dt) = dt {
            self.integrator.dt = dt;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_the_reference_scenario() {
        let cfg = ScenarioConfig::parse("").unwrap();
        let plant = cfg.plant().unwrap();
        assert_eq!(plant, Plant::reference());
        let s = cfg.schedule(&plant).unwrap();
        assert!((s.delta_p - 2233.137).abs() < 1e-3);
        let (var, grid) = cfg.grid().unwrap();
        assert_eq!(var, SweepVariable::TP);
        assert_eq!(grid.len(), 60);
    }

    #[test]
    fn amplitude_must_be_given_once() {
        let both = "[schedule]\ndelta_p = 1000.0\ndelta_p_fraction = 0.1\n";
        let none = "[schedule]\nt_p = 600.0\n";
        for text in [both, none] {
            let cfg = ScenarioConfig::parse(text).unwrap();
            let err = cfg.schedule(&cfg.plant().unwrap()).unwrap_err();
            assert!(
                matches!(err, CliError::Config(ref m) if m.contains("exactly one")),
                "{err}"
            );
        }
    }

    #[test]
    fn baseline_needs_airflow_or_heat_gain() {
        let cfg = ScenarioConfig::parse("[ambient]\nt_oa_f = 82.0\n").unwrap();
        assert!(matches!(cfg.plant(), Err(CliError::Config(_))));
        let cfg = ScenarioConfig::parse("[ambient]\nq_x = 15000.0\n").unwrap();
        assert!(cfg.plant().is_ok());
    }

    #[test]
    fn unknown_fields_and_variables_are_rejected_with_location() {
        let err = ScenarioConfig::parse("[hvac]\ncopp = 3.0\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("copp") && err.contains("line 2"), "{err}");
        assert!(ScenarioConfig::parse("[sweep]\nvariable = \"cop\"\ngrid = [1.0]\n").is_err());
    }

    #[test]
    fn grid_validation() {
        let empty = ScenarioConfig::parse("[sweep]\nvariable = \"t_p\"\ngrid = []\n").unwrap();
        assert!(matches!(empty.grid(), Err(CliError::Config(ref m)) if m.contains("empty")));
        let frac_n =
            ScenarioConfig::parse("[sweep]\nvariable = \"n\"\ngrid = [1.0, 2.5]\n").unwrap();
        assert!(frac_n.grid().is_err());
        let mixed =
            ScenarioConfig::parse("[sweep]\nvariable = \"n\"\ngrid = [1.0]\npoints = 3\n").unwrap();
        assert!(mixed.grid().is_err());
        let lin = ScenarioConfig::parse(
            "[sweep]\nvariable = \"r_oa\"\nstart = 0.5\nstop = 1.0\npoints = 6\n",
        )
        .unwrap();
        assert_eq!(lin.grid().unwrap().1, vec![0.5, 0.6, 0.7, 0.8, 0.9, 1.0]);
    }

    #[test]
    fn extended_overrides_apply() {
        let text = "model = \"extended\"\n[extended]\nwall = \"static\"\nhumidity = false\ncop = 3.5\nkp = 4.0\n\
                    recovery = \"square-wave\"\n[integrator]\ndt = 5.0\n";
        let cfg = ScenarioConfig::parse(text).unwrap();
        assert_eq!(cfg.model, Model::Extended);
        let ext = cfg.extended_config(&cfg.plant().unwrap()).unwrap();
        assert_eq!(ext.wall, WallModel::Static);
        assert!(!ext.humidity);
        assert_eq!(ext.cop, CopModel::Constant(3.5));
        assert_eq!(ext.gains.kp, 4.0);
        assert_eq!(ext.dt, 5.0);
        assert_eq!(ext.recovery, RecoveryPolicy::SquareWave);
    }
}
