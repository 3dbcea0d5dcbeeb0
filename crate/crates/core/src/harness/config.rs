//! TOML run configuration with derived-quantity echo.

use serde::{Deserialize, Serialize};

use crate::advdiff::{resolve_advdiff_params, AdvDiffParams, FixedMember};
use crate::analysis::implied_alpha;
use crate::error::{Error, Result};
use crate::gas::GasModel;
use crate::lattice::{henon_sigma, sigma_to_s};
use crate::ns::{resolve_lattice_speed, EpsRelaxation, NsConfig, RelaxationRates, SourceTerm, TransportModel};

/// Relative tolerance when ν and s_e are both given.
pub const NU_CONSISTENCY: f64 = 1e-3;
/// Relative tolerance when a `[derived]` table is read back.
pub const DERIVED_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    FluidD1q3,
    AdvdiffD1q3,
    NsD1q3q3,
    ReferenceFd,
    LinStability,
}

impl SchemeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SchemeKind::FluidD1q3 => "fluid-d1q3",
            SchemeKind::AdvdiffD1q3 => "advdiff-d1q3",
            SchemeKind::NsD1q3q3 => "ns-d1q3q3",
            SchemeKind::ReferenceFd => "reference-fd",
            SchemeKind::LinStability => "lin-stability",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub n: usize,
    /// Resolved from ν and s_e when absent and both are given, else 1.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n: 40, lambda: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GasConfig {
    pub gamma: f64,
    pub cp: f64,
    pub rho0: f64,
    pub c0: f64,
    pub s0: f64,
}

impl Default for GasConfig {
    fn default() -> Self {
        Self {
            gamma: 1.4,
            cp: 1.0,
            rho0: 1.0,
            c0: 0.5,
            s0: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransportConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    pub prandtl: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_e: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_eps: Option<f64>,
}

impl Default for TransportConfig {
    fn default() -> Self {
        Self {
            nu: Some(6.579e-4),
            prandtl: 1.0,
            s_e: None,
            s_eps: None,
            sigma_eps: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SourceConfig {
    pub term: SourceTerm,
    /// Run twice, with the configured source term and without it.
    pub dual: bool,
}

impl Default for SourceConfig {
    fn default() -> Self {
        Self {
            term: SourceTerm::Plain,
            dual: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    AcousticWave,
    Uniform,
    Gaussian,
    Sine,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialConfig {
    pub profile: Profile,
    /// Density amplitude of the acoustic wave.
    pub delta_rho: f64,
    /// Scalar profiles: ζ = base + (gaussian | amplitude · sin 2π mode x).
    pub base: f64,
    pub center: f64,
    pub width: f64,
    pub amplitude: f64,
    pub mode: usize,
}

impl Default for InitialConfig {
    fn default() -> Self {
        Self {
            profile: Profile::AcousticWave,
            delta_rho: 0.001,
            base: 0.0,
            center: 0.5,
            width: 0.1,
            amplitude: 1.0,
            mode: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdvDiffConfig {
    pub u0: f64,
    pub kappa: f64,
    /// Exactly one of `alpha` and `s_psi` is fixed; α = 0 when neither is.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_psi: Option<f64>,
}

impl Default for AdvDiffConfig {
    fn default() -> Self {
        Self {
            u0: 0.0,
            kappa: 1e-3,
            alpha: None,
            s_psi: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquilibriaChoice {
    /// The published linear forms.
    Verbatim,
    /// Forms matching the linearised fluxes, units written out.
    Compatible,
    /// Jacobian of the nonlinear equilibria.
    Jacobian,
    /// Verbatim if they pass the Jacobian check, else the Jacobian.
    Resolved,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StabilityConfig {
    pub u0: f64,
    pub s0: f64,
    pub k_samples: usize,
    pub equilibria: EquilibriaChoice,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        Self {
            u0: 0.0,
            s0: 0.0,
            k_samples: 512,
            equilibria: EquilibriaChoice::Verbatim,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FdConfig {
    pub cfl: f64,
}

impl Default for FdConfig {
    fn default() -> Self {
        Self {
            cfl: crate::fd::DEFAULT_CFL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self {
            t_final: Some(3.0),
            steps: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// Snapshot cadence in lattice steps; the first and last states are always written.
    pub snapshot_every: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { snapshot_every: 40 }
    }
}

/// Quantities computed from the inputs; echoed and checked on reload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Derived {
    pub dx: f64,
    pub dt: f64,
    pub lambda: f64,
    pub c0: f64,
    pub p0: f64,
    pub t0: f64,
    pub r: f64,
    pub nu: f64,
    pub kappa0: f64,
    pub sigma_e: f64,
    pub s_e: f64,
    pub sigma_psi: f64,
    pub s_psi: f64,
    pub sigma_eps: f64,
    pub s_eps: f64,
    pub alpha: f64,
    pub steps: usize,
    pub t_final: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scheme: SchemeKind,
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub gas: GasConfig,
    #[serde(default)]
    pub transport: TransportConfig,
    #[serde(default)]
    pub source: SourceConfig,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub advdiff: AdvDiffConfig,
    #[serde(default)]
    pub stability: StabilityConfig,
    #[serde(default)]
    pub fd: FdConfig,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derived: Option<Derived>,
}

fn default_name() -> String {
    "run".into()
}

impl RunConfig {
    pub fn new(scheme: SchemeKind) -> Self {
        Self {
            scheme,
            name: default_name(),
            grid: GridConfig::default(),
            gas: GasConfig::default(),
            transport: TransportConfig::default(),
            source: SourceConfig::default(),
            initial: InitialConfig::default(),
            advdiff: AdvDiffConfig::default(),
            stability: StabilityConfig::default(),
            fd: FdConfig::default(),
            time: TimeConfig::default(),
            output: OutputConfig::default(),
            derived: None,
        }
    }
}

/// A validated configuration with its derived quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedConfig {
    pub config: RunConfig,
    pub derived: Derived,
    pub gas: GasModel,
    pub transport: TransportModel,
    pub rates: RelaxationRates,
}

impl ResolvedConfig {
    pub fn n(&self) -> usize {
        self.config.grid.n
    }

    pub fn ns_config(&self) -> NsConfig {
        NsConfig {
            gas: self.gas,
            transport: self.transport,
            lambda: self.derived.lambda,
            dx: self.derived.dx,
            rates: self.rates,
            source: self.config.source.term,
        }
    }

    pub fn advdiff_params(&self) -> Result<AdvDiffParams> {
        advdiff_params(&self.config, self.derived.lambda, self.derived.dt, self.rates.s_eps)
    }

    /// TOML echo including the `[derived]` table.
    pub fn to_toml(&self) -> Result<String> {
        let mut c = self.config.clone();
        c.derived = Some(self.derived.clone());
        toml::to_string(&c).map_err(|e| Error::Config(e.to_string()))
    }
}

fn advdiff_params(c: &RunConfig, lambda: f64, dt: f64, s_eps: f64) -> Result<AdvDiffParams> {
    let a = &c.advdiff;
    let fixed = match (a.alpha, a.s_psi) {
        (Some(_), Some(_)) => {
            return Err(Error::Config("advdiff: give at most one of alpha and s_psi".into()));
        }
        (_, Some(s)) => FixedMember::SPsi(s),
        (alpha, None) => FixedMember::Alpha(alpha.unwrap_or(0.0)),
    };
    resolve_advdiff_params(a.u0, a.kappa, lambda, dt, fixed)?.with_s_eps(s_eps)
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name}={v} must be finite and > 0")))
    }
}

fn check_rate(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 2.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("{name}={v} outside (0,2)")))
    }
}

/// Validates `config`, computes the derived quantities and checks any
/// `[derived]` table it carries.
pub fn resolve(config: RunConfig) -> Result<ResolvedConfig> {
    let c = &config;
    if c.grid.n < 4 {
        return Err(Error::Config(format!("grid.n={} must be >= 4", c.grid.n)));
    }
    let dx = 1.0 / c.grid.n as f64;
    let g = &c.gas;
    if !(g.gamma > 1.0) {
        return Err(Error::Config(format!("gas.gamma={} must exceed 1", g.gamma)));
    }
    check_positive("gas.cp", g.cp)?;
    check_positive("gas.rho0", g.rho0)?;
    check_positive("gas.c0", g.c0)?;
    check_positive("transport.prandtl", c.transport.prandtl)?;

    let t = &c.transport;
    if let Some(nu) = t.nu {
        check_positive("transport.nu", nu)?;
    }
    if let Some(s) = t.s_e {
        check_rate("transport.s_e", s)?;
    }
    let lambda = match (c.grid.lambda, t.nu, t.s_e) {
        (Some(l), _, _) => {
            check_positive("grid.lambda", l)?;
            l
        }
        (None, Some(nu), Some(s_e)) => resolve_lattice_speed(nu, dx, s_e)?,
        (None, _, _) => 1.0,
    };
    let dt = dx / lambda;
    let nu = match (t.nu, t.s_e) {
        (Some(nu), Some(s_e)) => {
            let implied = henon_sigma(s_e)? * lambda * dx;
            if ((nu - implied) / nu).abs() > NU_CONSISTENCY {
                return Err(Error::Config(format!(
                    "transport.nu={nu} conflicts with transport.s_e={s_e}: nu = sigma_e*lambda*dx gives {implied}"
                )));
            }
            nu
        }
        (Some(nu), None) => nu,
        (None, Some(s_e)) => henon_sigma(s_e)? * lambda * dx,
        (None, None) => return Err(Error::Config("transport: give nu, s_e or both".into())),
    };

    let eps = match (t.s_eps, t.sigma_eps) {
        (Some(_), Some(_)) => {
            return Err(Error::Config(
                "transport: give at most one of s_eps and sigma_eps".into(),
            ))
        }
        (Some(s), None) => {
            check_rate("transport.s_eps", s)?;
            EpsRelaxation::Rate(s)
        }
        (None, Some(sigma)) => {
            check_positive("transport.sigma_eps", sigma)?;
            EpsRelaxation::Sigma(sigma)
        }
        (None, None) => EpsRelaxation::default(),
    };

    let gas = GasModel::from_sound_speed(g.gamma, g.cp, g.rho0, g.c0, g.s0)?;
    let transport = TransportModel::new(nu, t.prandtl)?;
    let rates =
        RelaxationRates::resolve(&gas, &transport, lambda, dx, t.s_e, eps).map_err(|e| Error::Config(e.to_string()))?;

    // time span
    let (steps, t_final) = match (c.time.t_final, c.time.steps) {
        (Some(tf), Some(k)) => {
            if ((k as f64) * dt - tf).abs() > 1e-9 * tf.max(1.0) {
                return Err(Error::Config(format!(
                    "time.steps={k} and time.t_final={tf} disagree with dt={dt}"
                )));
            }
            (k, tf)
        }
        (Some(tf), None) => {
            if !(tf >= 0.0 && tf.is_finite()) {
                return Err(Error::Config(format!("time.t_final={tf} must be finite and >= 0")));
            }
            let k = (tf / dt).round() as usize;
            let t_lattice = k as f64 * dt;
            // keep the requested end time when it is a whole number of steps
            let tf_used = if (t_lattice - tf).abs() <= 1e-9 * tf.max(1.0) {
                tf
            } else {
                t_lattice
            };
            (
                k,
                if c.scheme == SchemeKind::ReferenceFd {
                    tf
                } else {
                    tf_used
                },
            )
        }
        (None, Some(k)) => (k, k as f64 * dt),
        (None, None) => return Err(Error::Config("time: give t_final or steps".into())),
    };
    if c.output.snapshot_every == 0 {
        return Err(Error::Config("output.snapshot_every=0 must be >= 1".into()));
    }
    if !(c.fd.cfl > 0.0 && c.fd.cfl < 1.0) {
        return Err(Error::Config(format!("fd.cfl={} outside (0,1)", c.fd.cfl)));
    }
    if c.initial.profile == Profile::AcousticWave && !(c.initial.delta_rho.abs() < g.rho0) {
        return Err(Error::Config(format!(
            "initial.delta_rho={} must be smaller than rho0={}",
            c.initial.delta_rho, g.rho0
        )));
    }
    if matches!(c.initial.profile, Profile::Gaussian) {
        check_positive("initial.width", c.initial.width)?;
    }
    if c.stability.k_samples == 0 {
        return Err(Error::Config("stability.k_samples=0 must be >= 1".into()));
    }
    if !(c.stability.u0.abs() < lambda) {
        return Err(Error::Config(format!(
            "stability.u0={} must satisfy |u0| < lambda",
            c.stability.u0
        )));
    }

    let (alpha, s_psi, sigma_psi) = if c.scheme == SchemeKind::AdvdiffD1q3 {
        let p = advdiff_params(c, lambda, dt, rates.s_eps)?;
        (p.alpha, p.s_psi, p.sigma_psi())
    } else {
        let a = implied_alpha(
            gas.gamma,
            transport.prandtl,
            rates.sigma_e(),
            rates.sigma_psi(),
            c.stability.u0,
            lambda,
        );
        if !(a > -2.0 && a < 1.0) {
            return Err(Error::Config(format!("alpha={a} outside (-2,1)")));
        }
        (a, rates.s_psi, rates.sigma_psi())
    };
    let derived = Derived {
        dx,
        dt,
        lambda,
        c0: gas.c0(),
        p0: gas.p0,
        t0: gas.t0,
        r: gas.r,
        nu,
        kappa0: transport.kappa(gas.rho0, gas.cp),
        sigma_e: rates.sigma_e(),
        s_e: rates.s_e,
        sigma_psi,
        s_psi,
        sigma_eps: rates.sigma_eps(),
        s_eps: rates.s_eps,
        alpha,
        steps,
        t_final,
    };
    // sanity of the inverse map
    debug_assert!((sigma_to_s(derived.sigma_e).unwrap_or(f64::NAN) - derived.s_e).abs() < 1e-12);

    if let Some(echo) = &c.derived {
        check_derived(echo, &derived)?;
    }
    let mut config = config;
    config.derived = None;
    Ok(ResolvedConfig {
        config,
        derived,
        gas,
        transport,
        rates,
    })
}

fn check_derived(echo: &Derived, fresh: &Derived) -> Result<()> {
    let pairs = [
        ("dx", echo.dx, fresh.dx),
        ("dt", echo.dt, fresh.dt),
        ("lambda", echo.lambda, fresh.lambda),
        ("c0", echo.c0, fresh.c0),
        ("p0", echo.p0, fresh.p0),
        ("t0", echo.t0, fresh.t0),
        ("r", echo.r, fresh.r),
        ("nu", echo.nu, fresh.nu),
        ("kappa0", echo.kappa0, fresh.kappa0),
        ("sigma_e", echo.sigma_e, fresh.sigma_e),
        ("s_e", echo.s_e, fresh.s_e),
        ("sigma_psi", echo.sigma_psi, fresh.sigma_psi),
        ("s_psi", echo.s_psi, fresh.s_psi),
        ("sigma_eps", echo.sigma_eps, fresh.sigma_eps),
        ("s_eps", echo.s_eps, fresh.s_eps),
        ("alpha", echo.alpha, fresh.alpha),
        ("t_final", echo.t_final, fresh.t_final),
    ];
    for (name, a, b) in pairs {
        if (a - b).abs() > DERIVED_TOLERANCE * b.abs().max(1e-300) && (a - b).abs() > 1e-300 {
            return Err(Error::Config(format!(
                "derived.{name}={a} does not match recomputed {b}"
            )));
        }
    }
    if echo.steps != fresh.steps {
        return Err(Error::Config(format!(
            "derived.steps={} does not match recomputed {}",
            echo.steps, fresh.steps
        )));
    }
    Ok(())
}

/// Sets `path` (dotted, e.g. `gas.gamma`) to a TOML literal; bare words are
/// taken as strings.
pub fn apply_override(doc: &mut toml::Table, assignment: &str) -> Result<()> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override '{assignment}' is not key=value")))?;
    let (path, raw) = (path.trim(), raw.trim());
    let value = match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(Error::Config(format!("override key '{path}' is malformed")));
    }
    let mut table = doc;
    for k in &keys[..keys.len() - 1] {
        let entry = table
            .entry(k.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override key '{path}': '{k}' is not a table")))?;
    }
    table.insert(keys[keys.len() - 1].to_string(), value);
    Ok(())
}

fn from_table(table: toml::Table) -> Result<RunConfig> {
    let text = toml::to_string(&table).map_err(|e| Error::Config(e.to_string()))?;
    toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))
}

/// Parses a TOML document, applies overrides, resolves.
pub fn parse_config(document: &str, overrides: &[String]) -> Result<ResolvedConfig> {
    if overrides.is_empty() {
        // deserialising the text itself keeps line numbers in the messages
        let cfg: RunConfig = toml::from_str(document).map_err(|e| Error::Config(e.to_string()))?;
        return resolve(cfg);
    }
    let mut table: toml::Table = document
        .parse()
        .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
    // derived values refer to the document as written
    table.remove("derived");
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    resolve(from_table(table)?)
}

/// Applies overrides to an in-memory configuration.
pub fn with_overrides(config: &RunConfig, overrides: &[String]) -> Result<ResolvedConfig> {
    if overrides.is_empty() {
        return resolve(config.clone());
    }
    let mut table = toml::Table::try_from(config).map_err(|e| Error::Config(e.to_string()))?;
    table.remove("derived");
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    resolve(from_table(table)?)
}
