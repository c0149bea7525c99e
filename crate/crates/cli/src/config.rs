//! Strict JSON run configuration. Parsing walks the document by hand so that
//! every violation (unknown keys, wrong types, out-of-range values) is
//! reported at once, each with its field path.

use std::path::{Path, PathBuf};

use dwlab_core::decay::EvolutionMethod;
use dwlab_core::pressure::PressureConfig;
use dwlab_core::{DampingProfile, Geometry};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Spectrum,
    Pressure,
    Decay,
    VerifyGap,
}

impl Experiment {
    pub fn as_str(&self) -> &'static str {
        match self {
            Experiment::Spectrum => "spectrum",
            Experiment::Pressure => "pressure",
            Experiment::Decay => "decay",
            Experiment::VerifyGap => "verify-gap",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [Self::Spectrum, Self::Pressure, Self::Decay, Self::VerifyGap]
            .into_iter()
            .find(|e| e.as_str() == s)
    }

    fn stochastic(&self) -> bool {
        !matches!(self, Experiment::Spectrum)
    }
}

/// Where the computation lives: a grid geometry or one of the two
/// dynamics-only models.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeometrySpec {
    Grid { geometry: Geometry },
    Bolza,
    Doubling,
}

impl GeometrySpec {
    pub fn grid(&self) -> Option<&Geometry> {
        match self {
            GeometrySpec::Grid { geometry } => Some(geometry),
            _ => None,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            GeometrySpec::Grid { geometry } => match geometry {
                Geometry::Circle { length, n } => json!({"kind": "circle", "length": length, "n": n}),
                Geometry::FlatTorus { lx, ly, nx, ny } => {
                    json!({"kind": "torus", "lx": lx, "ly": ly, "nx": nx, "ny": ny})
                }
                Geometry::MatrixInput { path } => json!({"kind": "matrix", "path": path}),
            },
            GeometrySpec::Bolza => json!({"kind": "bolza"}),
            GeometrySpec::Doubling => json!({"kind": "doubling"}),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Schedule,
    Separated,
    Cover,
    Transfer,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObservableSpec {
    /// The pressure weight `a^u` built from the configured damping.
    AU,
    Constant { value: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSection {
    pub weyl_lambdas: Vec<f64>,
    pub dense_cap: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PressureSection {
    pub estimator: Estimator,
    pub schedule: PressureConfig,
    pub observable: ObservableSpec,
    /// The `ε` of the gap predicate `Pr + ε < 0`.
    pub margin: f64,
    pub adjacency: Option<Vec<Vec<u8>>>,
    pub weights: Option<Vec<f64>>,
    /// Number of trajectories dumped to `trajectories.csv` (flows only).
    pub dump_trajectories: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DataSpec {
    RandomSmooth { kmax: usize },
    Constant,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecaySection {
    pub horizon: f64,
    pub dt_out: f64,
    pub method: EvolutionMethod,
    pub kappa: Option<f64>,
    pub dt: Option<f64>,
    pub data: DataSpec,
    pub stats_horizon: f64,
    pub stats_samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub geometry: GeometrySpec,
    pub damping: DampingProfile,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub spectrum: SpectrumSection,
    pub pressure: PressureSection,
    pub decay: DecaySection,
    /// Grid geometry supplying the spectrum for `verify-gap` when the main
    /// geometry has none (Bolza, doubling).
    pub spectrum_geometry: Option<Geometry>,
}

/// Values supplied on the command line, which take precedence.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub experiment: Option<Experiment>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
}

#[derive(Debug)]
pub struct Violations(pub Vec<String>);

impl std::fmt::Display for Violations {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{} configuration error(s):", self.0.len())?;
        for v in &self.0 {
            writeln!(f, "  - {v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for Violations {}

struct Walker {
    errors: Vec<String>,
}

impl Walker {
    fn err(&mut self, path: &str, msg: impl std::fmt::Display) {
        self.errors.push(format!("{path}: {msg}"));
    }

    fn object<'a>(&mut self, v: &'a Value, path: &str, allowed: &[&str]) -> Option<&'a Map<String, Value>> {
        let Some(m) = v.as_object() else {
            self.err(path, "expected an object");
            return None;
        };
        for k in m.keys() {
            if !allowed.contains(&k.as_str()) {
                self.err(&join(path, k), "unknown key");
            }
        }
        Some(m)
    }

    fn get<T: DeserializeOwned>(&mut self, m: &Map<String, Value>, path: &str, key: &str) -> Option<T> {
        let v = m.get(key)?;
        match serde_json::from_value(v.clone()) {
            Ok(t) => Some(t),
            Err(e) => {
                self.err(&join(path, key), e);
                None
            }
        }
    }

    fn require<T: DeserializeOwned>(&mut self, m: &Map<String, Value>, path: &str, key: &str) -> Option<T> {
        if !m.contains_key(key) {
            self.err(&join(path, key), "missing required field");
            return None;
        }
        self.get(m, path, key)
    }

    fn positive(&mut self, path: &str, v: f64) {
        if !(v > 0.0 && v.is_finite()) {
            self.err(path, format!("must be positive, got {v}"));
        }
    }

    fn nonneg(&mut self, path: &str, v: f64) {
        if !(v >= 0.0 && v.is_finite()) {
            self.err(path, format!("must be >= 0, got {v}"));
        }
    }
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

const TOP_KEYS: &[&str] = &[
    "experiment",
    "geometry",
    "damping",
    "seed",
    "output",
    "spectrum",
    "pressure",
    "decay",
    "spectrum_geometry",
];

fn parse_grid(w: &mut Walker, v: &Value, path: &str, base: &Path) -> Option<GeometrySpec> {
    let kind: Option<String> = v.get("kind").and_then(|k| k.as_str()).map(String::from);
    let before = w.errors.len();
    let spec = match kind.as_deref() {
        Some("circle") => {
            let m = w.object(v, path, &["kind", "length", "n"])?;
            let length: Option<f64> = w.require(m, path, "length");
            let n: Option<usize> = w.require(m, path, "n");
            if let Some(l) = length {
                w.positive(&join(path, "length"), l);
            }
            GeometrySpec::Grid {
                geometry: Geometry::circle(length?, n?),
            }
        }
        Some("torus") => {
            let m = w.object(v, path, &["kind", "lx", "ly", "nx", "ny"])?;
            let lx: Option<f64> = w.require(m, path, "lx");
            let ly: Option<f64> = w.require(m, path, "ly");
            let nx: Option<usize> = w.require(m, path, "nx");
            let ny: Option<usize> = w.require(m, path, "ny");
            for (k, l) in [("lx", lx), ("ly", ly)] {
                if let Some(l) = l {
                    w.positive(&join(path, k), l);
                }
            }
            GeometrySpec::Grid {
                geometry: Geometry::torus(lx?, ly?, nx?, ny?),
            }
        }
        Some("matrix") => {
            let m = w.object(v, path, &["kind", "path"])?;
            let p: PathBuf = w.require(m, path, "path")?;
            let p = if p.is_relative() { base.join(p) } else { p };
            if !p.is_file() {
                w.err(&join(path, "path"), format!("file {} does not exist", p.display()));
                return None;
            }
            GeometrySpec::Grid {
                geometry: Geometry::MatrixInput { path: p },
            }
        }
        Some("bolza") => {
            w.object(v, path, &["kind"])?;
            GeometrySpec::Bolza
        }
        Some("doubling") => {
            w.object(v, path, &["kind"])?;
            GeometrySpec::Doubling
        }
        Some(other) => {
            w.err(
                &join(path, "kind"),
                format!("unknown geometry '{other}' (expected circle, torus, matrix, bolza or doubling)"),
            );
            return None;
        }
        None => {
            w.err(&join(path, "kind"), "missing required field");
            return None;
        }
    };
    if let (GeometrySpec::Grid { geometry }, true) = (&spec, w.errors.len() == before) {
        if let Err(e) = geometry.validate() {
            w.err(path, e);
        }
    }
    Some(spec)
}

fn parse_damping(w: &mut Walker, v: &Value, path: &str) -> Option<DampingProfile> {
    let kind = v.get("kind").and_then(|k| k.as_str()).unwrap_or("");
    let (allowed, numeric): (&[&str], &[&str]) = match kind {
        "constant" => (&["kind", "a0"], &["a0"]),
        "smoothed_strip" => (
            &["kind", "center", "width", "a0", "smoothing"],
            &["center", "width", "a0", "smoothing"],
        ),
        "samples" => (&["kind", "values"], &[]),
        other => {
            w.err(
                &join(path, "kind"),
                format!("unknown damping '{other}' (expected constant, smoothed_strip or samples)"),
            );
            return None;
        }
    };
    let m = w.object(v, path, allowed)?;
    let mut ok = true;
    for k in numeric {
        match w.require::<f64>(m, path, k) {
            Some(x) => match *k {
                "a0" => w.nonneg(&join(path, k), x),
                "width" | "smoothing" => w.positive(&join(path, k), x),
                _ => {}
            },
            None => ok = false,
        }
    }
    if kind == "samples" {
        match w.require::<Vec<f64>>(m, path, "values") {
            Some(vals) => {
                for (i, x) in vals.iter().enumerate() {
                    w.nonneg(&format!("{path}.values[{i}]"), *x);
                }
            }
            None => ok = false,
        }
    }
    if !ok {
        return None;
    }
    let mut clean = m.clone();
    clean.retain(|k, _| allowed.contains(&k.as_str()));
    serde_json::from_value(Value::Object(clean)).ok()
}

fn parse_spectrum(w: &mut Walker, v: Option<&Value>, defaults: SpectrumSection) -> SpectrumSection {
    let mut s = defaults;
    let Some(v) = v else { return s };
    let Some(m) = w.object(v, "spectrum", &["weyl_lambdas", "dense_cap"]) else {
        return s;
    };
    if let Some(l) = w.get::<Vec<f64>>(m, "spectrum", "weyl_lambdas") {
        for (i, x) in l.iter().enumerate() {
            w.positive(&format!("spectrum.weyl_lambdas[{i}]"), *x);
        }
        s.weyl_lambdas = l;
    }
    if let Some(c) = w.get::<usize>(m, "spectrum", "dense_cap") {
        if c < 16 {
            w.err("spectrum.dense_cap", format!("must be >= 16, got {c}"));
        }
        s.dense_cap = c;
    }
    s
}

fn parse_pressure(w: &mut Walker, v: Option<&Value>, mut s: PressureSection) -> PressureSection {
    let Some(v) = v else { return s };
    let keys = [
        "estimator",
        "epsilons",
        "horizons",
        "delta",
        "samples",
        "region",
        "cover_margin",
        "observable",
        "margin",
        "adjacency",
        "weights",
        "dump_trajectories",
    ];
    let Some(m) = w.object(v, "pressure", &keys) else {
        return s;
    };
    let p = "pressure";
    if let Some(e) = w.get(m, p, "estimator") {
        s.estimator = e;
    }
    if let Some(e) = w.get(m, p, "epsilons") {
        s.schedule.epsilons = e;
    }
    if let Some(e) = w.get(m, p, "horizons") {
        s.schedule.horizons = e;
    }
    if let Some(e) = w.get(m, p, "delta") {
        s.schedule.delta = e;
    }
    if let Some(e) = w.get(m, p, "samples") {
        s.schedule.samples = e;
    }
    if let Some(e) = w.get(m, p, "region") {
        s.schedule.region = e;
    }
    if let Some(e) = w.get(m, p, "cover_margin") {
        s.schedule.cover_margin = e;
    }
    if let Some(e) = w.get(m, p, "observable") {
        s.observable = e;
    }
    if let Some(e) = w.get::<f64>(m, p, "margin") {
        w.positive("pressure.margin", e);
        s.margin = e;
    }
    if let Some(e) = w.get(m, p, "adjacency") {
        s.adjacency = Some(e);
    }
    if let Some(e) = w.get(m, p, "weights") {
        s.weights = Some(e);
    }
    if let Some(e) = w.get(m, p, "dump_trajectories") {
        s.dump_trajectories = e;
    }
    if let Err(e) = s.schedule.validate() {
        w.err("pressure", e);
    }
    if s.estimator == Estimator::Transfer && (s.adjacency.is_none() || s.weights.is_none()) {
        w.err("pressure", "the transfer estimator needs 'adjacency' and 'weights'");
    }
    if s.estimator == Estimator::Schedule && s.schedule.horizons.len() < 2 {
        w.err("pressure.horizons", "the schedule estimator needs at least two horizons");
    }
    s
}

fn parse_decay(w: &mut Walker, v: Option<&Value>, mut s: DecaySection) -> DecaySection {
    let Some(v) = v else { return s };
    let keys = [
        "horizon",
        "dt_out",
        "method",
        "kappa",
        "dt",
        "data",
        "stats_horizon",
        "stats_samples",
    ];
    let Some(m) = w.object(v, "decay", &keys) else {
        return s;
    };
    let p = "decay";
    if let Some(x) = w.get::<f64>(m, p, "horizon") {
        w.positive("decay.horizon", x);
        s.horizon = x;
    }
    if let Some(x) = w.get::<f64>(m, p, "dt_out") {
        w.positive("decay.dt_out", x);
        s.dt_out = x;
    }
    if let Some(x) = w.get(m, p, "method") {
        s.method = x;
    }
    if let Some(x) = w.get::<Option<f64>>(m, p, "kappa").flatten() {
        w.nonneg("decay.kappa", x);
        s.kappa = Some(x);
    }
    if let Some(x) = w.get::<Option<f64>>(m, p, "dt").flatten() {
        w.positive("decay.dt", x);
        s.dt = Some(x);
    }
    if let Some(x) = w.get(m, p, "data") {
        s.data = x;
    }
    if let Some(x) = w.get::<f64>(m, p, "stats_horizon") {
        if !(x >= 10.0) {
            w.err("decay.stats_horizon", format!("must be >= 10, got {x}"));
        }
        s.stats_horizon = x;
    }
    if let Some(x) = w.get::<usize>(m, p, "stats_samples") {
        if x < 100 {
            w.err("decay.stats_samples", format!("must be >= 100, got {x}"));
        }
        s.stats_samples = x;
    }
    if s.dt_out >= s.horizon {
        w.err("decay.dt_out", "must be smaller than decay.horizon");
    }
    s
}

fn default_spectrum() -> SpectrumSection {
    SpectrumSection {
        weyl_lambdas: vec![10.5, 20.5, 40.5],
        dense_cap: dwlab_core::spectral::DENSE_CAP,
    }
}

fn default_pressure(geometry: &GeometrySpec) -> PressureSection {
    let doubling = matches!(geometry, GeometrySpec::Doubling);
    PressureSection {
        estimator: Estimator::Schedule,
        schedule: if doubling {
            PressureConfig::map_defaults()
        } else {
            PressureConfig::flow_defaults()
        },
        observable: if doubling {
            ObservableSpec::Constant { value: 0.0 }
        } else {
            ObservableSpec::AU
        },
        margin: 0.1,
        adjacency: None,
        weights: None,
        dump_trajectories: 16,
    }
}

fn default_decay() -> DecaySection {
    DecaySection {
        horizon: 120.0,
        dt_out: 0.5,
        method: EvolutionMethod::Modal,
        kappa: None,
        dt: None,
        data: DataSpec::RandomSmooth { kmax: 6 },
        stats_horizon: 50.0,
        stats_samples: 2000,
    }
}

/// Parses and validates a configuration document. `base` resolves relative
/// matrix paths.
pub fn parse_config(text: &str, base: &Path, over: &Overrides) -> Result<RunConfig, Violations> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Violations(vec![format!("invalid JSON: {e}")]))?;
    let mut w = Walker { errors: Vec::new() };
    let Some(top) = w.object(&doc, "", TOP_KEYS) else {
        return Err(Violations(w.errors));
    };

    let from_file = match top.get("experiment").map(|v| v.as_str()) {
        None => None,
        Some(Some(s)) => match Experiment::parse(s) {
            Some(e) => Some(e),
            None => {
                w.err("experiment", format!("unknown experiment '{s}'"));
                None
            }
        },
        Some(None) => {
            w.err("experiment", "expected a string");
            None
        }
    };
    if let (Some(a), Some(b)) = (from_file, over.experiment) {
        if a != b {
            w.err(
                "experiment",
                format!("config says '{}' but the command line asks for '{}'", a.as_str(), b.as_str()),
            );
        }
    }
    let experiment = over.experiment.or(from_file);
    if experiment.is_none() && !w.errors.iter().any(|e| e.starts_with("experiment")) {
        w.err("experiment", "missing required field");
    }

    let geometry = match top.get("geometry") {
        Some(v) => parse_grid(&mut w, v, "geometry", base),
        None => {
            w.err("geometry", "missing required field");
            None
        }
    };
    let damping = match top.get("damping") {
        Some(v) => parse_damping(&mut w, v, "damping"),
        None => {
            if !matches!(geometry, Some(GeometrySpec::Doubling)) {
                w.err("damping", "missing required field");
            }
            Some(DampingProfile::constant(0.0))
        }
    };
    let seed_file: Option<u64> = w.get(top, "", "seed");
    let seed = over.seed.or(seed_file);
    if seed.is_none() && experiment.is_some_and(|e| e.stochastic()) {
        w.err("seed", "required for stochastic experiments (set it in the config or pass --seed)");
    }
    let output_file: Option<PathBuf> = w.get(top, "", "output");
    let spectrum_geometry = match top.get("spectrum_geometry") {
        Some(v) => match parse_grid(&mut w, v, "spectrum_geometry", base) {
            Some(GeometrySpec::Grid { geometry }) => Some(geometry),
            Some(_) => {
                w.err("spectrum_geometry", "must be a circle, torus or matrix");
                None
            }
            None => None,
        },
        None => None,
    };

    let spectrum = parse_spectrum(&mut w, top.get("spectrum"), default_spectrum());
    let gspec = geometry.clone().unwrap_or(GeometrySpec::Bolza);
    let pressure = parse_pressure(&mut w, top.get("pressure"), default_pressure(&gspec));
    let decay = parse_decay(&mut w, top.get("decay"), default_decay());

    // cross-field requirements
    if let (Some(e), Some(g)) = (experiment, &geometry) {
        match (e, g) {
            (Experiment::Spectrum | Experiment::Decay, GeometrySpec::Bolza | GeometrySpec::Doubling) => {
                w.err("geometry", format!("the {} experiment needs a circle, torus or matrix", e.as_str()))
            }
            (Experiment::Decay, GeometrySpec::Grid { geometry: Geometry::MatrixInput { .. } }) => {
                w.err("geometry", "the decay experiment needs a circle or torus (matrix input has no flow)")
            }
            (Experiment::Pressure | Experiment::VerifyGap, GeometrySpec::Grid { geometry: Geometry::MatrixInput { .. } })
                if pressure.estimator != Estimator::Transfer =>
            {
                w.err("geometry", "pressure estimators need a flow or the doubling map, not matrix input")
            }
            _ => {}
        }
        if matches!(g, GeometrySpec::Bolza) && !matches!(damping, Some(DampingProfile::Constant { .. }) | None) {
            w.err("damping", "only constant damping is available on the Bolza surface");
        }
        if matches!(g, GeometrySpec::Doubling) && pressure.observable == ObservableSpec::AU {
            w.err("pressure.observable", "a_u needs a geodesic flow; use a constant observable on the doubling map");
        }
    }

    if !w.errors.is_empty() {
        return Err(Violations(w.errors));
    }
    Ok(RunConfig {
        experiment: experiment.expect("checked"),
        geometry: geometry.expect("checked"),
        damping: damping.expect("checked"),
        seed: seed.unwrap_or(0),
        output: over.output.clone().or(output_file),
        spectrum,
        pressure,
        decay,
        spectrum_geometry,
    })
}

pub fn load_config(path: &Path, over: &Overrides) -> Result<RunConfig, Violations> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Violations(vec![format!("cannot read {}: {e}", path.display())]))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config(&text, base, over)
}

/// Canonical JSON of a resolved configuration (hashed into the manifest).
pub fn resolved_json(cfg: &RunConfig) -> Value {
    let mut v = serde_json::to_value(cfg).expect("config serializes");
    v["geometry"] = cfg.geometry.to_json();
    v
}

/// A documented default configuration for `--print-defaults`.
pub fn defaults_json(experiment: Experiment) -> Value {
    let geometry = match experiment {
        Experiment::Pressure | Experiment::VerifyGap => GeometrySpec::Bolza,
        _ => GeometrySpec::Grid {
            geometry: Geometry::circle(std::f64::consts::TAU, 64),
        },
    };
    let damping = match experiment {
        Experiment::Pressure | Experiment::VerifyGap => DampingProfile::constant(0.8),
        _ => DampingProfile::constant(0.1),
    };
    let p = default_pressure(&geometry);
    let d = default_decay();
    let s = default_spectrum();
    json!({
        "experiment": experiment.as_str(),
        "geometry": geometry.to_json(),
        "damping": damping,
        "seed": 0,
        "spectrum": s,
        "pressure": {
            "estimator": p.estimator,
            "epsilons": p.schedule.epsilons,
            "horizons": p.schedule.horizons,
            "delta": p.schedule.delta,
            "samples": p.schedule.samples,
            "region": p.schedule.region,
            "cover_margin": p.schedule.cover_margin,
            "observable": p.observable,
            "margin": p.margin,
            "dump_trajectories": p.dump_trajectories,
        },
        "decay": d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<RunConfig, Violations> {
        parse_config(s, Path::new("."), &Overrides::default())
    }

    #[test]
    fn minimal_spectrum_gets_defaults() {
        let c = parse(
            r#"{"experiment": "spectrum", "geometry": {"kind": "circle", "length": 6.283185307179586, "n": 32},
                "damping": {"kind": "constant", "a0": 0.1}}"#,
        )
        .unwrap();
        assert_eq!(c.spectrum.weyl_lambdas, vec![10.5, 20.5, 40.5]);
        assert_eq!(c.decay.horizon, 120.0);
    }

    #[test]
    fn negative_damping_names_the_field() {
        let e = parse(
            r#"{"experiment": "spectrum", "geometry": {"kind": "circle", "length": 1.0, "n": 32},
                "damping": {"kind": "constant", "a0": -0.5}}"#,
        )
        .unwrap_err();
        assert!(e.0.iter().any(|m| m.starts_with("damping.a0")), "{e}");
    }

    #[test]
    fn all_violations_are_reported() {
        let e = parse(
            r#"{"experiment": "decay", "geometry": {"kind": "circle", "length": -1.0, "n": 32, "extra": 1},
                "damping": {"kind": "constant", "a0": 0.1}, "bogus": true}"#,
        )
        .unwrap_err();
        let text = e.to_string();
        for needle in ["geometry.length", "geometry.extra", "bogus", "seed"] {
            assert!(text.contains(needle), "{needle} missing from {text}");
        }
    }

    #[test]
    fn defaults_round_trip() {
        for ex in [Experiment::Spectrum, Experiment::Pressure, Experiment::Decay, Experiment::VerifyGap] {
            let text = serde_json::to_string(&defaults_json(ex)).unwrap();
            parse(&text).unwrap_or_else(|e| panic!("{}: {e}", ex.as_str()));
        }
    }
}
