//! State specifications: inline presets or paths to JSON state files.
//!
//! Presets are "name:params". The role a specification fills decides the
//! mode count it builds: inputs are single-mode, resources two-mode, so
//! "vacuum" is one or two vacuum modes depending on where it appears, and
//! "thermal:0.3" as a resource is two independent thermal copies. Anything
//! that is not a preset name is read as a file in the state JSON schema
//! ({"n_modes": .., "mean": [..], "cov": [[..]]}).

use std::fs;

use cvteleport::{C64, GaussianState};
use nalgebra::{DMatrix, DVector};
use serde::Deserialize;

use crate::Failure;

/// Which slot of the protocol a state specification fills.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Role {
    Input,
    Resource,
}

impl Role {
    fn n_modes(self) -> usize {
        match self {
            Role::Input => 1,
            Role::Resource => 2,
        }
    }
}

pub(crate) fn parse_state_spec(spec: &str, role: Role) -> Result<GaussianState, Failure> {
    let (head, params) = match spec.split_once(':') {
        Some((head, params)) => (head, Some(params)),
        None => (spec, None),
    };
    match head {
        "vacuum" => {
            require_no_params("vacuum", params)?;
            Ok(GaussianState::vacuum(role.n_modes()))
        }
        "coherent" => {
            let text = one_param("coherent", params)?;
            let alpha: C64 = text.parse().map_err(|_| {
                Failure::Usage(format!(
                    "coherent amplitude {text:?} is not a complex number like 1+0.5i"
                ))
            })?;
            let one = GaussianState::coherent(alpha);
            Ok(per_role(one, role))
        }
        "thermal" => {
            let nbar = parse_real("thermal occupation", one_param("thermal", params)?)?;
            let one = GaussianState::thermal(nbar)?;
            Ok(per_role(one, role))
        }
        "svs" => {
            if role == Role::Input {
                return Err(Failure::Usage(
                    "preset \"svs\" builds a two-mode resource; the input must be single-mode"
                        .into(),
                ));
            }
            let r = parse_real("squeezing parameter", one_param("svs", params)?)?;
            Ok(GaussianState::two_mode_squeezed_vacuum(r)?)
        }
        _ => state_from_file(spec, role),
    }
}

/// Single-mode presets fill the resource slot as two independent copies.
fn per_role(one: GaussianState, role: Role) -> GaussianState {
    match role {
        Role::Input => one,
        Role::Resource => one.tensor(&one),
    }
}

fn require_no_params(name: &str, params: Option<&str>) -> Result<(), Failure> {
    match params {
        None => Ok(()),
        Some(p) => Err(Failure::Usage(format!(
            "preset \"{name}\" takes no parameters, got {p:?}"
        ))),
    }
}

fn one_param<'a>(name: &str, params: Option<&'a str>) -> Result<&'a str, Failure> {
    match params {
        Some(p) if !p.is_empty() && !p.contains(',') => Ok(p),
        _ => Err(Failure::Usage(format!(
            "preset \"{name}\" needs exactly one parameter, like \"{name}:0.5\""
        ))),
    }
}

fn parse_real(what: &str, text: &str) -> Result<f64, Failure> {
    text.parse()
        .map_err(|_| Failure::Usage(format!("{what} {text:?} is not a number")))
}

/// Mirror of the on-disk schema, kept separate from the library type so the
/// exit class can distinguish shape problems (usage) from states that parse
/// but are unphysical (computational).
#[derive(Deserialize)]
struct StateFile {
    n_modes: usize,
    mean: Vec<f64>,
    cov: Vec<Vec<f64>>,
}

fn state_from_file(path: &str, role: Role) -> Result<GaussianState, Failure> {
    let text = fs::read_to_string(path).map_err(|e| {
        Failure::Usage(format!(
            "{path:?} is neither a preset nor a readable state file: {e}"
        ))
    })?;
    let raw: StateFile = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("{path:?} is not a valid state file: {e}")))?;
    let dim = 2 * raw.n_modes;
    if raw.mean.len() != dim || raw.cov.len() != dim || raw.cov.iter().any(|r| r.len() != dim) {
        return Err(Failure::Usage(format!(
            "{path:?}: mean and cov must have dimension {dim} for {} modes",
            raw.n_modes
        )));
    }
    let state = GaussianState::new(
        DVector::from_vec(raw.mean),
        DMatrix::from_fn(dim, dim, |r, c| raw.cov[r][c]),
    )?;
    if state.n_modes() != role.n_modes() {
        return Err(Failure::Usage(format!(
            "{path:?} holds a {}-mode state where {} mode(s) are needed",
            state.n_modes(),
            role.n_modes()
        )));
    }
    Ok(state)
}
