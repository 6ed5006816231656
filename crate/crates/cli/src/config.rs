//! Problem configuration files (TOML).
//!
//! ```toml
//! kernel = "cos(tau) + 0.25*sin(y)"
//! phi = { type = "constant", value = 0.25 }
//!
//! [interval]
//! a = 0.0
//! b = 1.0
//!
//! [grid]
//! n = 1001
//!
//! [solver]
//! stop_tol = 1e-10
//! max_iter = 10000
//!
//! [sampling]
//! disk_radius = 10.0
//! lipschitz_samples = 4096
//! seed = 0
//! domain = "real"
//! ```
//!
//! Only `kernel`, `phi` and `[interval]` are required.

use std::ops::Range;
use std::path::Path;

use hyers_ulam::fixpoint::{IterationOptions, DEFAULT_MAX_ITER, DEFAULT_STOP_TOL};
use hyers_ulam::kernel::{
    parse, KernelExpr, SampleDomain, DEFAULT_DISK_RADIUS, DEFAULT_LIPSCHITZ_SAMPLES,
};
use hyers_ulam::mtfunc::{MtFunc, MtKind, RegistryEntry};
use hyers_ulam::problems::DEFAULT_NODES;
use hyers_ulam::volterra::ProblemError;
use hyers_ulam::{Grid, KernelProblem};
use serde::Deserialize;
use thiserror::Error;
use toml::Spanned;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{}", located(key, *line, message))]
    Invalid {
        /// Dotted key path, empty for document-level errors.
        key: String,
        line: Option<usize>,
        message: String,
    },
}

fn located(key: &str, line: Option<usize>, message: &str) -> String {
    let mut out = String::from("config error");
    if !key.is_empty() {
        out.push_str(&format!(" at `{key}`"));
    }
    if let Some(line) = line {
        out.push_str(&format!(" (line {line})"));
    }
    out.push_str(": ");
    out.push_str(message);
    out
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum PhiSpec {
    Constant {
        value: f64,
    },
    Table {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
        sup_cap: f64,
    },
    Registry {
        name: String,
    },
}

impl PhiSpec {
    pub fn build(&self) -> Result<MtFunc, String> {
        match self {
            PhiSpec::Constant { value } => MtFunc::constant(*value).map_err(|e| e.to_string()),
            PhiSpec::Table {
                breakpoints,
                values,
                sup_cap,
            } => MtFunc::table(breakpoints.clone(), values.clone(), *sup_cap)
                .map_err(|e| e.to_string()),
            PhiSpec::Registry { name } => RegistryEntry::from_name(name)
                .map(MtFunc::registry)
                .ok_or_else(|| format!("unknown registry function '{name}' (known: one-minus-s)")),
        }
    }
}

/// One-line description of a φ, used in reports.
pub fn describe_phi(phi: &MtFunc) -> String {
    match phi.kind() {
        MtKind::Constant(level) => format!("constant {level:?}"),
        MtKind::Table {
            breakpoints,
            values,
        } => format!(
            "table breakpoints {breakpoints:?} values {values:?} sup_cap {:?}",
            phi.sup_cap()
        ),
        MtKind::Registry { entry, .. } => format!("registry {}", entry.name()),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    kernel: Spanned<String>,
    phi: Spanned<PhiSpec>,
    interval: Interval,
    #[serde(default)]
    grid: GridSection,
    #[serde(default)]
    solver: Solver,
    #[serde(default)]
    sampling: Sampling,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Interval {
    a: Spanned<f64>,
    b: Spanned<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSection {
    n: Option<Spanned<usize>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Solver {
    stop_tol: Option<Spanned<f64>>,
    max_iter: Option<Spanned<usize>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Sampling {
    disk_radius: Option<Spanned<f64>>,
    lipschitz_samples: Option<Spanned<usize>>,
    seed: Option<u64>,
    domain: Option<Spanned<String>>,
}

#[derive(Debug, Deserialize)]
struct PhiFile {
    phi: Spanned<PhiSpec>,
}

/// A validated problem configuration.
#[derive(Debug, Clone)]
pub struct ProblemConfig {
    pub kernel_src: String,
    pub opts: IterationOptions,
    pub lipschitz_samples: usize,
    pub seed: u64,
    problem: KernelProblem,
}

impl ProblemConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        Self::parse(&read(path)?)
    }

    pub fn parse(src: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = deserialize(src)?;
        let at = |key: &str, span: Range<usize>, message: String| ConfigError::Invalid {
            key: key.into(),
            line: Some(line_of(src, span.start)),
            message,
        };
        let opt_at =
            |key: &str, span: Option<Range<usize>>, message: String| ConfigError::Invalid {
                key: key.into(),
                line: span.map(|s| line_of(src, s.start)),
                message,
            };

        let kernel: KernelExpr = parse(raw.kernel.get_ref())
            .map_err(|e| at("kernel", raw.kernel.span(), e.to_string()))?;
        let phi = raw
            .phi
            .get_ref()
            .build()
            .map_err(|m| at("phi", raw.phi.span(), m))?;

        let (a, b) = (*raw.interval.a.get_ref(), *raw.interval.b.get_ref());
        if !a.is_finite() {
            return Err(at(
                "interval.a",
                raw.interval.a.span(),
                format!("must be finite, got {a}"),
            ));
        }
        if !b.is_finite() || !(a < b) {
            return Err(at(
                "interval.b",
                raw.interval.b.span(),
                format!("must be finite and greater than a = {a}, got {b}"),
            ));
        }
        let (n, n_span) = spanned_or(raw.grid.n, DEFAULT_NODES);
        let grid = Grid::new(a, b, n).map_err(|e| opt_at("grid.n", n_span, e.to_string()))?;

        let (stop_tol, tol_span) = spanned_or(raw.solver.stop_tol, DEFAULT_STOP_TOL);
        if !(stop_tol > 0.0) || !stop_tol.is_finite() {
            return Err(opt_at(
                "solver.stop_tol",
                tol_span,
                format!("must be positive and finite, got {stop_tol}"),
            ));
        }
        let (max_iter, iter_span) = spanned_or(raw.solver.max_iter, DEFAULT_MAX_ITER);
        if max_iter == 0 {
            return Err(opt_at(
                "solver.max_iter",
                iter_span,
                "must be at least 1".into(),
            ));
        }

        let (disk_radius, radius_span) = spanned_or(raw.sampling.disk_radius, DEFAULT_DISK_RADIUS);
        let (lipschitz_samples, samples_span) =
            spanned_or(raw.sampling.lipschitz_samples, DEFAULT_LIPSCHITZ_SAMPLES);
        if lipschitz_samples == 0 {
            return Err(opt_at(
                "sampling.lipschitz_samples",
                samples_span,
                "must be at least 1".into(),
            ));
        }
        let domain = match &raw.sampling.domain {
            None => SampleDomain::Complex,
            Some(d) => SampleDomain::from_name(d.get_ref()).ok_or_else(|| {
                at(
                    "sampling.domain",
                    d.span(),
                    format!("expected \"complex\" or \"real\", got {:?}", d.get_ref()),
                )
            })?,
        };

        let problem =
            KernelProblem::new(kernel, phi, grid, disk_radius, domain).map_err(|e| match e {
                ProblemError::InvalidRadius(_) => {
                    opt_at("sampling.disk_radius", radius_span, e.to_string())
                }
                _ => at("phi", raw.phi.span(), e.to_string()),
            })?;

        Ok(ProblemConfig {
            kernel_src: raw.kernel.into_inner(),
            opts: IterationOptions { stop_tol, max_iter },
            lipschitz_samples,
            seed: raw.sampling.seed.unwrap_or(0),
            problem,
        })
    }

    pub fn problem(&self) -> &KernelProblem {
        &self.problem
    }
}

/// Reads the `phi` entry of any TOML document, such as a full problem config.
pub fn load_phi(path: &Path) -> Result<MtFunc, ConfigError> {
    parse_phi(&read(path)?)
}

pub fn parse_phi(src: &str) -> Result<MtFunc, ConfigError> {
    let file: PhiFile = deserialize(src)?;
    file.phi
        .get_ref()
        .build()
        .map_err(|message| ConfigError::Invalid {
            key: "phi".into(),
            line: Some(line_of(src, file.phi.span().start)),
            message,
        })
}

fn read(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn deserialize<T: serde::de::DeserializeOwned>(src: &str) -> Result<T, ConfigError> {
    let syntax = |e: toml::de::Error| ConfigError::Invalid {
        key: String::new(),
        line: e.span().map(|s| line_of(src, s.start)),
        message: e.message().to_string(),
    };
    let de = toml::Deserializer::parse(src).map_err(syntax)?;
    serde_path_to_error::deserialize(de).map_err(|e| {
        // Spanned values show up as an extra private path segment.
        let key = e
            .path()
            .to_string()
            .split('.')
            .filter(|s| !s.is_empty() && !s.starts_with("$__"))
            .collect::<Vec<_>>()
            .join(".");
        let inner = e.into_inner();
        ConfigError::Invalid {
            key,
            line: inner.span().map(|s| line_of(src, s.start)),
            message: inner.message().to_string(),
        }
    })
}

fn spanned_or<T: Copy>(v: Option<Spanned<T>>, default: T) -> (T, Option<Range<usize>>) {
    match v {
        Some(s) => (*s.get_ref(), Some(s.span())),
        None => (default, None),
    }
}

fn line_of(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].matches('\n').count() + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"kernel = "cos(tau)"
phi = { type = "constant", value = 0.25 }

[interval]
a = 0.0
b = 1.0
"#;

    fn invalid(src: &str) -> (String, Option<usize>, String) {
        match ProblemConfig::parse(src) {
            Err(ConfigError::Invalid { key, line, message }) => (key, line, message),
            other => panic!("expected an invalid config, got {other:?}"),
        }
    }

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg = ProblemConfig::parse(BASE).unwrap();
        assert_eq!(cfg.problem().grid().n(), DEFAULT_NODES);
        assert_eq!(cfg.opts, IterationOptions::default());
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.lipschitz_samples, DEFAULT_LIPSCHITZ_SAMPLES);
        assert_eq!(cfg.problem().domain(), SampleDomain::Complex);
        assert_eq!(cfg.problem().delta(), 0.25);
    }

    #[test]
    fn full_config() {
        let src = format!(
            "{BASE}\n[grid]\nn = 11\n[solver]\nstop_tol = 1e-8\nmax_iter = 7\n\
             [sampling]\ndisk_radius = 3.5\nlipschitz_samples = 64\nseed = 9\ndomain = \"real\"\n"
        );
        let cfg = ProblemConfig::parse(&src).unwrap();
        assert_eq!(cfg.problem().grid().n(), 11);
        assert_eq!(
            cfg.opts,
            IterationOptions {
                stop_tol: 1e-8,
                max_iter: 7
            }
        );
        assert_eq!((cfg.seed, cfg.lipschitz_samples), (9, 64));
        assert_eq!(cfg.problem().disk_radius(), 3.5);
        assert_eq!(cfg.problem().domain(), SampleDomain::Real);
    }

    #[test]
    fn kernel_errors_carry_the_parse_offset() {
        let (key, line, msg) = invalid(&BASE.replace("cos(tau)", "x*("));
        assert_eq!((key.as_str(), line), ("kernel", Some(1)));
        assert!(msg.contains("offset 3"), "{msg}");
    }

    #[test]
    fn contraction_violation_names_delta() {
        let src = BASE
            .replace("value = 0.25", "value = 0.6")
            .replace("b = 1.0", "b = 2.0");
        let (key, line, msg) = invalid(&src);
        assert_eq!((key.as_str(), line), ("phi", Some(2)));
        assert!(msg.contains("must be < 1"), "{msg}");
        assert!(msg.contains("1.2"), "{msg}");
    }

    #[test]
    fn located_validation_errors() {
        let (key, line, _) = invalid(&BASE.replace("b = 1.0", "b = -1.0"));
        assert_eq!((key.as_str(), line), ("interval.b", Some(6)));

        let (key, line, _) = invalid(&format!("{BASE}[grid]\nn = 1\n"));
        assert_eq!((key.as_str(), line), ("grid.n", Some(8)));

        let (key, line, _) = invalid(&format!("{BASE}[sampling]\ndomain = \"quaternion\"\n"));
        assert_eq!((key.as_str(), line), ("sampling.domain", Some(8)));

        let (key, _, _) = invalid(&format!("{BASE}[solver]\nstop_tol = 0.0\n"));
        assert_eq!(key, "solver.stop_tol");

        let (key, _, msg) = invalid(&BASE.replace("0.25 }", "1.0 }"));
        assert_eq!(key, "phi");
        assert!(msg.contains("[0, 1)") || msg.contains("< 1"), "{msg}");
    }

    #[test]
    fn schema_errors_carry_the_key_path() {
        let (key, line, msg) = invalid(&format!("{BASE}[grid]\nn = \"many\"\n"));
        assert_eq!(key, "grid.n");
        assert_eq!(line, Some(8));
        assert!(msg.contains("integer") || msg.contains("usize"), "{msg}");

        let (key, _, msg) = invalid(&format!("{BASE}[grid]\nnodes = 5\n"));
        assert!(key.starts_with("grid"), "{key}");
        assert!(msg.contains("nodes"), "{msg}");

        let (key, _, msg) =
            invalid("phi = { type = \"constant\", value = 0.5 }\n[interval]\na = 0\nb = 1\n");
        assert!(msg.contains("kernel"), "{key}: {msg}");
    }

    #[test]
    fn syntax_errors_have_a_line() {
        let (_, line, _) = invalid("kernel = \"y\"\nphi = {\n");
        assert!(line.is_some());
    }

    #[test]
    fn registry_phi_is_refused_for_problems_but_loads_alone() {
        let src = BASE.replace(
            "{ type = \"constant\", value = 0.25 }",
            "{ type = \"registry\", name = \"one-minus-s\" }",
        );
        let (key, _, msg) = invalid(&src);
        assert_eq!(key, "phi");
        assert!(msg.contains("one-minus-s"), "{msg}");
        assert!(parse_phi(&src).unwrap().is_registry());
        assert!(parse_phi("phi = { type = \"registry\", name = \"nope\" }").is_err());
    }

    #[test]
    fn table_phi() {
        let src = "phi = { type = \"table\", breakpoints = [0.0, 1.0], values = [0.2, 0.4], sup_cap = 0.4 }";
        let phi = parse_phi(src).unwrap();
        assert_eq!(phi.eval(1.0), Ok(0.4));
        assert_eq!(
            describe_phi(&phi),
            "table breakpoints [0.0, 1.0] values [0.2, 0.4] sup_cap 0.4"
        );
        let bad = "phi = { type = \"table\", breakpoints = [0.0, 1.0], values = [0.2, 1.0], sup_cap = 0.9 }";
        assert!(parse_phi(bad).is_err());
    }
}
