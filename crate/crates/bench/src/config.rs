//! Experiment configuration: flat `key = value` text, one key per line,
//! `#` starts a comment.
//!
//! ```text
//! kind = inverse-design
//! grid = 160
//! T = 4.0
//! delta = 1.0
//! strategies = LW-LW LW-MMOC
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use transport_core::grid::{l2_per_cell_error, rms_error};
use transport_core::velocity::PROFILE_MAX;
use transport_core::{
    BoundaryPolicy, DoswellParams, Grid2D, InverseProblem, ScalarField2D, SchemeKind, SolverConfig, SweepOrder,
};

use crate::error::{BenchError, ConfigError, Issue};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    ForwardError,
    Convergence,
    InverseDesign,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::ForwardError => "forward-error",
            ExperimentKind::Convergence => "convergence",
            ExperimentKind::InverseDesign => "inverse-design",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "forward-error" => Ok(ExperimentKind::ForwardError),
            "convergence" => Ok(ExperimentKind::Convergence),
            "inverse-design" => Ok(ExperimentKind::InverseDesign),
            other => Err(format!(
                "unknown kind {other:?} (expected forward-error, convergence or inverse-design)"
            )),
        }
    }
}

/// How a forward solution is compared with the exact front.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ErrorMetric {
    #[default]
    Rms,
    /// `‖e‖₂ / N`, the scaling used by some literature forward checks.
    L2PerCell,
}

impl ErrorMetric {
    pub fn measure(&self, numeric: &ScalarField2D, exact: &ScalarField2D) -> transport_core::Result<f64> {
        match self {
            ErrorMetric::Rms => rms_error(numeric, exact),
            ErrorMetric::L2PerCell => l2_per_cell_error(numeric, exact),
        }
    }
}

impl FromStr for ErrorMetric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "rms" => Ok(ErrorMetric::Rms),
            "l2-per-cell" => Ok(ErrorMetric::L2PerCell),
            other => Err(format!("unknown metric {other:?} (expected rms or l2-per-cell)")),
        }
    }
}

/// Forward and adjoint scheme pair, written `LW-MMOC`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Strategy {
    pub forward: SchemeKind,
    pub adjoint: SchemeKind,
}

impl Strategy {
    pub const fn new(forward: SchemeKind, adjoint: SchemeKind) -> Self {
        Strategy { forward, adjoint }
    }

    /// Only LW forward with an LW or MMOC adjoint has published reference values.
    pub fn has_reference(&self) -> bool {
        self.forward == SchemeKind::LaxWendroff && matches!(self.adjoint, SchemeKind::LaxWendroff | SchemeKind::Mmoc)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.forward.short_name(), self.adjoint.short_name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s
            .split_once('-')
            .ok_or_else(|| format!("strategy {s:?} must look like LW-MMOC"))?;
        let forward = a.parse::<SchemeKind>().map_err(|e| e.to_string())?;
        let adjoint = b.parse::<SchemeKind>().map_err(|e| e.to_string())?;
        if forward != SchemeKind::LaxWendroff {
            return Err(format!("strategy {s:?}: only LW is supported for the forward solve"));
        }
        Ok(Strategy { forward, adjoint })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub kind: ExperimentKind,
    /// `[xmin, xmax, ymin, ymax]`
    pub domain: [f64; 4],
    /// Cells per axis, one entry per grid in the run.
    pub grids: Vec<(usize, usize)>,
    pub vbar: f64,
    pub delta: f64,
    pub times: Vec<f64>,
    pub schemes: Vec<SchemeKind>,
    pub strategies: Vec<Strategy>,
    pub cfl: f64,
    pub boundary: BoundaryPolicy,
    pub order: SweepOrder,
    /// Error measure for forward studies; inverse runs always report RMS.
    pub metric: ErrorMetric,
    pub eta: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Worker threads; 0 uses the rayon default.
    pub threads: usize,
    pub output: Option<PathBuf>,
    /// Write field dumps and heatmaps next to the table.
    pub fields: bool,
}

const KEYS: &[&str] = &[
    "kind",
    "name",
    "domain",
    "grid",
    "dx",
    "vbar",
    "delta",
    "T",
    "schemes",
    "strategies",
    "cfl",
    "boundary",
    "order",
    "metric",
    "eta",
    "tol",
    "max_iter",
    "threads",
    "output",
    "fields",
];

struct Entry {
    value: String,
    line: usize,
}

/// Collects typed values and every problem found on the way.
struct Reader {
    entries: BTreeMap<String, Entry>,
    issues: Vec<Issue>,
}

impl Reader {
    fn lex(text: &str) -> Reader {
        let mut entries: BTreeMap<String, Entry> = BTreeMap::new();
        let mut issues = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let Some((key, value)) = body.split_once('=') else {
                issues.push(Issue::at_line(line, "expected `key = value`"));
                continue;
            };
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                issues.push(Issue::new(key, format!("unknown key (line {line})")));
                continue;
            }
            if value.is_empty() {
                issues.push(Issue::new(key, format!("empty value (line {line})")));
                continue;
            }
            if let Some(prev) = entries.get(key) {
                issues.push(Issue::new(key, format!("set twice (lines {} and {line})", prev.line)));
                continue;
            }
            entries.insert(
                key.to_string(),
                Entry {
                    value: value.to_string(),
                    line,
                },
            );
        }
        Reader { entries, issues }
    }

    fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    fn fail(&mut self, key: &str, msg: impl Into<String>) {
        self.issues.push(Issue::new(key, msg));
    }

    fn one<T: FromStr>(&mut self, key: &str) -> Option<T>
    where
        T::Err: fmt::Display,
    {
        let raw = self.raw(key)?.to_string();
        match raw.parse::<T>() {
            Ok(v) => Some(v),
            Err(e) => {
                self.fail(key, format!("cannot parse {raw:?}: {e}"));
                None
            }
        }
    }

    fn list<T: FromStr>(&mut self, key: &str) -> Option<Vec<T>>
    where
        T::Err: fmt::Display,
    {
        let raw = self.raw(key)?.to_string();
        let mut out = Vec::new();
        for tok in raw
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
        {
            match tok.parse::<T>() {
                Ok(v) => out.push(v),
                Err(e) => {
                    self.fail(key, format!("cannot parse {tok:?}: {e}"));
                    return None;
                }
            }
        }
        Some(out)
    }

    fn real(&mut self, key: &str, default: f64, ok: impl Fn(f64) -> bool, rule: &str) -> f64 {
        match self.one::<f64>(key) {
            Some(v) if ok(v) => v,
            Some(v) => {
                self.fail(key, format!("{v} is out of range: {rule}"));
                default
            }
            None => default,
        }
    }

    /// Flags keys set in a config whose kind does not use them.
    fn unused(&mut self, kind: ExperimentKind, keys: &[&str]) {
        for key in keys {
            if self.has(key) {
                self.fail(key, format!("not used by {kind} experiments"));
            }
        }
    }
}

fn cells_from_spacing(extent: f64, dx: f64) -> Option<usize> {
    if !(dx > 0.0 && dx.is_finite()) {
        return None;
    }
    let n = (extent / dx).round();
    (n >= 1.0 && ((n * dx - extent) / extent).abs() < 1e-9).then_some(n as usize)
}

fn parse_grid_token(tok: &str) -> Result<(usize, usize), String> {
    let (a, b) = match tok.split_once(['x', 'X']) {
        Some((a, b)) => (a, b),
        None => (tok, tok),
    };
    let nx = a.parse::<usize>().map_err(|e| format!("{tok:?}: {e}"))?;
    let ny = b.parse::<usize>().map_err(|e| format!("{tok:?}: {e}"))?;
    if nx < 3 || ny < 3 {
        return Err(format!("{tok:?}: need at least 3 cells per axis"));
    }
    Ok((nx, ny))
}

/// Each spacing must be half the one before it.
pub fn check_halving(spacings: &[f64]) -> Result<(), String> {
    for (k, w) in spacings.windows(2).enumerate() {
        if ((w[1] - 0.5 * w[0]) / w[0]).abs() > 1e-9 {
            return Err(format!(
                "rung {} ({}) is not half of rung {} ({})",
                k + 1,
                w[1],
                k,
                w[0]
            ));
        }
    }
    Ok(())
}

impl ExperimentConfig {
    /// Parses and validates `text`; `default_name` is used when no `name` key is given.
    pub fn parse(text: &str, default_name: &str) -> Result<Self, ConfigError> {
        let mut r = Reader::lex(text);

        let kind = if r.has("kind") {
            r.one::<ExperimentKind>("kind")
        } else {
            r.fail("kind", "missing (forward-error, convergence or inverse-design)");
            None
        };
        let name = r.raw("name").unwrap_or(default_name).to_string();
        if name.is_empty() || name.contains(['/', '\\']) {
            r.fail("name", format!("{name:?} is not usable as a directory name"));
        }

        let mut domain = [-5.0, 5.0, -5.0, 5.0];
        if let Some(v) = r.list::<f64>("domain") {
            match v.len() {
                2 => domain = [v[0], v[1], v[0], v[1]],
                4 => domain = [v[0], v[1], v[2], v[3]],
                _ => r.fail("domain", "expected `lo hi` or `xmin xmax ymin ymax`"),
            }
            if !(domain.iter().all(|x| x.is_finite()) && domain[0] < domain[1] && domain[2] < domain[3]) {
                r.fail("domain", format!("{domain:?} is not a non-empty box"));
            }
        }
        let (lx, ly) = (domain[1] - domain[0], domain[3] - domain[2]);

        let mut grids = Vec::new();
        let mut spacings = Vec::new();
        match (r.has("grid"), r.has("dx")) {
            (true, true) => r.fail("dx", "give either grid or dx, not both"),
            (false, false) => r.fail("grid", "missing (cells per axis, or set dx)"),
            (true, false) => {
                let raw = r.raw("grid").unwrap_or("").to_string();
                for tok in raw
                    .split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|t| !t.is_empty())
                {
                    match parse_grid_token(tok) {
                        Ok(g) => {
                            spacings.push(lx / g.0 as f64);
                            grids.push(g);
                        }
                        Err(e) => r.fail("grid", e),
                    }
                }
            }
            (false, true) => {
                for dx in r.list::<f64>("dx").unwrap_or_default() {
                    match (cells_from_spacing(lx, dx), cells_from_spacing(ly, dx)) {
                        (Some(nx), Some(ny)) if nx >= 3 && ny >= 3 => {
                            spacings.push(dx);
                            grids.push((nx, ny));
                        }
                        _ => r.fail("dx", format!("{dx} does not divide the domain into at least 3 cells")),
                    }
                }
            }
        }

        let vbar = r.real(
            "vbar",
            DoswellParams::UNIT_PEAK_VBAR,
            |v| v > 0.0 && v.is_finite(),
            "must be positive",
        );
        if vbar * PROFILE_MAX > 1e6 {
            r.fail("vbar", "implausibly large");
        }
        let delta = r.real("delta", 1.0, |v| v > 0.0 && v.is_finite(), "must be positive");
        let cfl = r.real(
            "cfl",
            SolverConfig::DEFAULT_CFL,
            |v| v > 0.0 && v <= 1.0,
            "need 0 < cfl <= 1",
        );
        let eta = r.real(
            "eta",
            InverseProblem::DEFAULT_ETA,
            |v| v > 0.0 && v.is_finite(),
            "must be positive",
        );
        let tol = r.real(
            "tol",
            InverseProblem::DEFAULT_TOL,
            |v| v > 0.0 && v.is_finite(),
            "must be positive",
        );
        let max_iter = match r.one::<usize>("max_iter") {
            Some(0) => {
                r.fail("max_iter", "must be at least 1");
                1
            }
            Some(n) => n,
            None => InverseProblem::DEFAULT_MAX_ITER,
        };

        let times = if r.has("T") {
            let t = r.list::<f64>("T").unwrap_or_default();
            if t.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                r.fail("T", "times must be finite and non-negative");
            }
            t
        } else {
            r.fail("T", "missing (final time)");
            Vec::new()
        };

        let schemes = r
            .list::<SchemeKind>("schemes")
            .unwrap_or_else(|| SchemeKind::ALL.to_vec());
        let strategies = r.list::<Strategy>("strategies").unwrap_or_else(|| {
            vec![
                Strategy::new(SchemeKind::LaxWendroff, SchemeKind::LaxWendroff),
                Strategy::new(SchemeKind::LaxWendroff, SchemeKind::Mmoc),
            ]
        });
        let boundary = r.one::<BoundaryPolicy>("boundary").unwrap_or_default();
        let order = match r.raw("order") {
            None | Some("xy") => SweepOrder::XThenY,
            Some("yx") => SweepOrder::YThenX,
            Some(other) => {
                let msg = format!("unknown sweep order {other:?} (expected xy or yx)");
                r.fail("order", msg);
                SweepOrder::XThenY
            }
        };
        let metric = r.one::<ErrorMetric>("metric").unwrap_or_default();
        let threads = r.one::<usize>("threads").unwrap_or(0);
        let output = r.raw("output").map(PathBuf::from);
        let fields = r.one::<bool>("fields").unwrap_or(true);

        if let Some(kind) = kind {
            match kind {
                ExperimentKind::ForwardError => {
                    r.unused(kind, &["strategies", "eta", "tol", "max_iter"]);
                }
                ExperimentKind::Convergence => {
                    r.unused(kind, &["strategies", "eta", "tol", "max_iter"]);
                    if grids.len() < 2 {
                        r.fail(
                            if r.has("dx") { "dx" } else { "grid" },
                            "a convergence ladder needs at least 2 rungs",
                        );
                    } else if let Err(e) = check_halving(&spacings) {
                        r.fail(if r.has("dx") { "dx" } else { "grid" }, e);
                    }
                    if times.len() > 1 {
                        r.fail("T", "convergence runs use a single final time");
                    }
                }
                ExperimentKind::InverseDesign => {
                    r.unused(kind, &["schemes", "metric"]);
                    if grids.len() > 1 {
                        r.fail(
                            if r.has("dx") { "dx" } else { "grid" },
                            "inverse design runs on a single grid",
                        );
                    }
                    if times.len() > 1 {
                        r.fail("T", "inverse design uses a single horizon");
                    }
                    if strategies.is_empty() {
                        r.fail("strategies", "at least one strategy is required");
                    }
                }
            }
            if kind != ExperimentKind::InverseDesign && schemes.is_empty() {
                r.fail("schemes", "at least one scheme is required");
            }
        }
        let grid_key = if r.has("dx") { "dx" } else { "grid" };
        if r.has(grid_key) && grids.is_empty() && !r.issues.iter().any(|i| i.field == grid_key) {
            r.fail(grid_key, "no grids given");
        }
        if r.has("T") && times.is_empty() && !r.issues.iter().any(|i| i.field == "T") {
            r.fail("T", "no times given");
        }

        match kind {
            Some(kind) if r.issues.is_empty() => Ok(ExperimentConfig {
                name,
                kind,
                domain,
                grids,
                vbar,
                delta,
                times,
                schemes,
                strategies,
                cfl,
                boundary,
                order,
                metric,
                eta,
                tol,
                max_iter,
                threads,
                output,
                fields,
            }),
            _ => Err(ConfigError { issues: r.issues }),
        }
    }

    /// Reads a config file; the file stem is the default experiment name.
    pub fn from_path(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path).map_err(|source| BenchError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("experiment");
        Ok(Self::parse(&text, stem)?)
    }

    pub fn grid(&self, k: usize) -> transport_core::Result<Grid2D> {
        let [x0, x1, y0, y1] = self.domain;
        let (nx, ny) = self.grids[k];
        Grid2D::new(x0, x1, y0, y1, nx, ny)
    }

    pub fn params(&self) -> transport_core::Result<DoswellParams> {
        DoswellParams::new(self.vbar, self.delta)
    }

    pub fn solver_config(&self, scheme: SchemeKind) -> SolverConfig {
        SolverConfig::new(scheme)
            .with_cfl(self.cfl)
            .with_boundary(self.boundary)
            .with_order(self.order)
    }

    /// Strategies without published reference values; they still run.
    pub fn unreferenced_strategies(&self) -> Vec<Strategy> {
        self.strategies.iter().copied().filter(|s| !s.has_reference()).collect()
    }

    /// Output directory: the `output` key if set, else `<base>/<name>`.
    pub fn output_dir(&self, base: &Path) -> PathBuf {
        match &self.output {
            Some(p) => p.clone(),
            None => base.join(&self.name),
        }
    }
}
