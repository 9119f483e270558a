//! Sectioned key/value configuration files.
//!
//! Format: `[section]` headers followed by `key=value` pairs, in any
//! line layout (a header and its pairs may share a line). Values
//! containing spaces or commas are double-quoted. `#` starts a comment
//! that runs to the end of the line. Recognized sections and keys:
//!
//! ```text
//! [model]   dim=1  hamiltonian="0.5*p1^2 + 0.5*q1^2"
//! [frame]   velocity="0"                # comma-separated, one per axis
//! [grid]    min=-12  max=12  points=1024   # scalars or per-axis lists
//! [initial] center_q=1.0  center_p=0.0  width=0.7
//! [evolve]  dt=0.001  steps=6284  observables="q1,p1,0.5*p1^2+0.5*q1^2"
//! ```
//!
//! Every validation failure names the offending section and key. There
//! are no silent defaults for physics-relevant fields.

use gqmech_core::exec::ExecMode;
use gqmech_core::grid::{gaussian_packet, GridSpec};
use gqmech_core::parse::poly_parse;
use gqmech_core::poisson::PhaseFunction;
use gqmech_core::poly::Polynomial;

use crate::CliError;

/// A fully validated model description.
#[derive(Clone, Debug)]
pub struct HamiltonianSpec {
    pub dim: usize,
    pub hamiltonian: PhaseFunction,
    /// Constant frame velocity, one exact polynomial per axis.
    pub velocity: Vec<Polynomial>,
    pub grid: GridSpec,
    pub center_q: Vec<f64>,
    pub center_p: Vec<f64>,
    pub width: Vec<f64>,
    pub dt: f64,
    pub steps: usize,
    /// Observables with their source expressions (used for CSV headers).
    pub observables: Vec<(String, Polynomial)>,
}

/// Raw `section.key -> value` pairs in file order.
#[derive(Debug, Default)]
struct RawConfig {
    pairs: Vec<(String, String, String)>,
}

impl RawConfig {
    fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.pairs
            .iter()
            .find(|(s, k, _)| s == section && k == key)
            .map(|(_, _, v)| v.as_str())
    }

    fn require(&self, section: &str, key: &str) -> Result<&str, CliError> {
        self.get(section, key).ok_or_else(|| {
            CliError::config(format!("[{section}] {key}: missing required key"))
        })
    }
}

fn tokenize(text: &str) -> Result<RawConfig, CliError> {
    let mut out = RawConfig::default();
    let mut section = String::new();
    for (lineno, raw_line) in text.lines().enumerate() {
        let line = raw_line;
        let mut chars = line.char_indices().peekable();
        while let Some(&(i, c)) = chars.peek() {
            if c.is_whitespace() {
                chars.next();
                continue;
            }
            if c == '#' {
                break; // comment to end of line
            }
            if c == '[' {
                let rest = &line[i + 1..];
                let end = rest.find(']').ok_or_else(|| {
                    CliError::config(format!("line {}: unterminated section header", lineno + 1))
                })?;
                section = rest[..end].trim().to_string();
                for _ in 0..end + 2 {
                    chars.next();
                }
                continue;
            }
            // key=value
            let rest = &line[i..];
            let eq = rest.find('=').ok_or_else(|| {
                CliError::config(format!(
                    "line {}: expected key=value, found `{}`",
                    lineno + 1,
                    rest.split_whitespace().next().unwrap_or(rest)
                ))
            })?;
            let key = rest[..eq].trim().to_string();
            if key.is_empty() || key.contains(char::is_whitespace) {
                return Err(CliError::config(format!(
                    "line {}: malformed key before `=`",
                    lineno + 1
                )));
            }
            let after = &rest[eq + 1..];
            let (value, consumed) = if let Some(stripped) = after.strip_prefix('"') {
                let close = stripped.find('"').ok_or_else(|| {
                    CliError::config(format!("line {}: unterminated quote", lineno + 1))
                })?;
                (stripped[..close].to_string(), eq + 1 + close + 2)
            } else {
                let end = after
                    .find(char::is_whitespace)
                    .unwrap_or(after.len());
                (after[..end].to_string(), eq + 1 + end)
            };
            if section.is_empty() {
                return Err(CliError::config(format!(
                    "line {}: key `{key}` before any [section] header",
                    lineno + 1
                )));
            }
            out.pairs.push((section.clone(), key, value));
            for _ in 0..consumed {
                chars.next();
            }
        }
    }
    Ok(out)
}

fn parse_list_f64(section: &str, key: &str, value: &str, dim: usize) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.parse::<f64>().map_err(|_| {
                CliError::config(format!("[{section}] {key}: `{p}` is not a number"))
            })
        })
        .collect::<Result<_, _>>()?;
    match nums.len() {
        1 => Ok(vec![nums[0]; dim]),
        n if n == dim => Ok(nums),
        n => Err(CliError::config(format!(
            "[{section}] {key}: expected 1 or {dim} values, found {n}"
        ))),
    }
}

fn parse_list_usize(
    section: &str,
    key: &str,
    value: &str,
    dim: usize,
) -> Result<Vec<usize>, CliError> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    let nums: Vec<usize> = parts
        .iter()
        .map(|p| {
            p.parse::<usize>().map_err(|_| {
                CliError::config(format!(
                    "[{section}] {key}: `{p}` is not a positive integer"
                ))
            })
        })
        .collect::<Result<_, _>>()?;
    match nums.len() {
        1 => Ok(vec![nums[0]; dim]),
        n if n == dim => Ok(nums),
        n => Err(CliError::config(format!(
            "[{section}] {key}: expected 1 or {dim} values, found {n}"
        ))),
    }
}

/// Parses and fully validates a configuration file.
pub fn parse_config(text: &str) -> Result<HamiltonianSpec, CliError> {
    let raw = tokenize(text)?;

    let dim: usize = raw
        .require("model", "dim")?
        .parse()
        .map_err(|_| CliError::config("[model] dim: must be a positive integer"))?;
    if dim == 0 || dim > 2 {
        return Err(CliError::config(
            "[model] dim: the numerical layer supports dim 1 or 2",
        ));
    }

    let h_text = raw.require("model", "hamiltonian")?;
    let h_poly = poly_parse(h_text, dim)
        .map_err(|e| CliError::config(format!("[model] hamiltonian: {e}")))?;
    let hamiltonian = PhaseFunction::on_vq(h_poly)
        .map_err(|e| CliError::config(format!("[model] hamiltonian: {e}")))?;
    let h_deg = hamiltonian.poly().momentum_degree();
    if h_deg > 2 {
        return Err(CliError::config(format!(
            "[model] hamiltonian: momentum degree {h_deg} exceeds the quadratic limit"
        )));
    }

    let v_text = raw.get("frame", "velocity").unwrap_or("0");
    let v_parts: Vec<&str> = v_text.split(',').map(str::trim).collect();
    let velocity: Vec<Polynomial> = match v_parts.len() {
        1 => vec![
            poly_parse(v_parts[0], dim)
                .map_err(|e| CliError::config(format!("[frame] velocity: {e}")))?;
            dim
        ],
        n if n == dim => v_parts
            .iter()
            .map(|p| {
                poly_parse(p, dim)
                    .map_err(|e| CliError::config(format!("[frame] velocity: {e}")))
            })
            .collect::<Result<_, _>>()?,
        n => {
            return Err(CliError::config(format!(
                "[frame] velocity: expected 1 or {dim} components, found {n}"
            )))
        }
    };
    for v in &velocity {
        if v.total_degree() > 0 {
            return Err(CliError::config(
                "[frame] velocity: components must be constants",
            ));
        }
    }

    let mins = parse_list_f64("grid", "min", raw.require("grid", "min")?, dim)?;
    let maxs = parse_list_f64("grid", "max", raw.require("grid", "max")?, dim)?;
    let points = parse_list_usize("grid", "points", raw.require("grid", "points")?, dim)?;
    let grid = GridSpec::new(mins, maxs, points)
        .map_err(|e| CliError::config(format!("[grid]: {e}")))?;

    let center_q = parse_list_f64(
        "initial",
        "center_q",
        raw.require("initial", "center_q")?,
        dim,
    )?;
    let center_p = parse_list_f64(
        "initial",
        "center_p",
        raw.require("initial", "center_p")?,
        dim,
    )?;
    let width = parse_list_f64("initial", "width", raw.require("initial", "width")?, dim)?;

    let dt: f64 = raw
        .require("evolve", "dt")?
        .parse()
        .map_err(|_| CliError::config("[evolve] dt: must be a number"))?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(CliError::config("[evolve] dt: must be positive and finite"));
    }
    let steps: usize = raw
        .require("evolve", "steps")?
        .parse()
        .map_err(|_| CliError::config("[evolve] steps: must be a positive integer"))?;
    if steps == 0 {
        return Err(CliError::config("[evolve] steps: must be at least 1"));
    }

    let obs_text = raw.require("evolve", "observables")?;
    let mut observables = Vec::new();
    for part in obs_text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let poly = poly_parse(part, dim).map_err(|e| {
            CliError::config(format!("[evolve] observables: `{part}`: {e}"))
        })?;
        let pf = PhaseFunction::on_vq(poly.clone()).map_err(|e| {
            CliError::config(format!("[evolve] observables: `{part}`: {e}"))
        })?;
        if pf.poly().momentum_degree() > 2 {
            return Err(CliError::config(format!(
                "[evolve] observables: `{part}`: momentum degree exceeds 2, not quantizable here"
            )));
        }
        observables.push((part.to_string(), poly));
    }
    if observables.is_empty() {
        return Err(CliError::config(
            "[evolve] observables: at least one observable is required",
        ));
    }

    // packet/grid compatibility: build the packet once so a misplaced
    // center is rejected up front with the tail-mass diagnostic
    gaussian_packet(&grid, &center_q, &center_p, &width, 0.0, ExecMode::Sequential).map_err(
        |e| CliError::config(format!("[initial]: packet incompatible with [grid]: {e}")),
    )?;

    Ok(HamiltonianSpec {
        dim,
        hamiltonian,
        velocity,
        grid,
        center_q,
        center_p,
        width,
        dt,
        steps,
        observables,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const OSCILLATOR: &str = r#"
[model] dim=1 hamiltonian="0.5*p1^2 + 0.5*q1^2"
[frame] velocity="0"
[grid] min=-12 max=12 points=1024
[initial] center_q=1.0 center_p=0.0 width=0.7
[evolve] dt=0.001 steps=6284 observables="q1,p1,0.5*p1^2+0.5*q1^2"
"#;

    #[test]
    fn oscillator_config_parses() {
        let spec = parse_config(OSCILLATOR).unwrap();
        assert_eq!(spec.dim, 1);
        assert_eq!(spec.steps, 6284);
        assert_eq!(spec.observables.len(), 3);
        assert_eq!(spec.observables[0].0, "q1");
        assert_eq!(spec.grid.npts(), &[1024]);
        assert!(spec.velocity[0].is_zero());
    }

    #[test]
    fn multiline_sections_and_comments() {
        let text = r#"
# a comment
[model]
dim=1
hamiltonian="0.5*p1^2"   # inline comment
[frame] velocity="1"
[grid]
min=-8 max=8
points=256
[initial] center_q=0 center_p=0 width=0.7
[evolve] dt=0.01 steps=10 observables="q1"
"#;
        let spec = parse_config(text).unwrap();
        assert_eq!(spec.grid.npts(), &[256]);
        assert!(!spec.velocity[0].is_zero());
    }

    #[test]
    fn cubic_hamiltonian_is_rejected() {
        let text = OSCILLATOR.replace("0.5*p1^2 + 0.5*q1^2", "p1^3");
        let err = parse_config(&text).unwrap_err();
        assert_eq!(err.code, crate::ExitCode::ConfigError);
        assert!(err.message.contains("momentum degree"), "{}", err.message);
    }

    #[test]
    fn misplaced_packet_is_rejected_with_diagnostic() {
        let text = OSCILLATOR.replace("center_q=1.0", "center_q=11.9");
        let err = parse_config(&text).unwrap_err();
        assert_eq!(err.code, crate::ExitCode::ConfigError);
        assert!(err.message.contains("tail"), "{}", err.message);
    }

    #[test]
    fn missing_key_names_section_and_key() {
        let text = OSCILLATOR.replace("steps=6284 ", "");
        let err = parse_config(&text).unwrap_err();
        assert!(err.message.contains("[evolve] steps"), "{}", err.message);
    }

    #[test]
    fn two_dimensional_lists() {
        let text = r#"
[model] dim=2 hamiltonian="0.5*p1^2 + 0.5*p2^2"
[frame] velocity="1,0"
[grid] min=-8 max=8 points=64
[initial] center_q="0,0" center_p="1,0" width=0.9
[evolve] dt=0.01 steps=5 observables="q1,q2"
"#;
        let spec = parse_config(text).unwrap();
        assert_eq!(spec.grid.npts(), &[64, 64]);
        assert_eq!(spec.center_p, vec![1.0, 0.0]);
        assert_eq!(spec.velocity.len(), 2);
    }

    #[test]
    fn nonconstant_velocity_is_rejected() {
        let text = OSCILLATOR.replace("velocity=\"0\"", "velocity=\"q1\"");
        let err = parse_config(&text).unwrap_err();
        assert!(err.message.contains("constant"), "{}", err.message);
    }
}
