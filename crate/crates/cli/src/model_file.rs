//! JSON model files.
//!
//! ```json
//! {
//!   "states": {"ids": ["s0", "s1"], "pi": [1.0, 1.0]},
//!   "actions": {"u": ["u0"], "v": ["v0"], "u_coords": null, "v_coords": null},
//!   "rho": [[[[0.5, 0.5], [0.5, 0.5]]]],
//!   "g": [[[[0.0, 0.0], [0.0, 0.0]]]],
//!   "G": 0.0,
//!   "terminal": [0.0, 0.0]
//! }
//! ```
//!
//! `rho` and `g` are indexed `[u][v][x][y]`; no other layout is accepted.
//! Numbers are parsed with correct rounding and written in shortest
//! round-trip form, so `load(save(m)) == m` bit for bit.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use turnpike_core::{
    ActionSets, CostFunction, GameModel, StateSpace, TransitionKernel, ValueFunction,
};

use crate::error::Error;

type Array4 = Vec<Vec<Vec<Vec<f64>>>>;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StatesFile {
    ids: Vec<String>,
    pi: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ActionsFile {
    u: Vec<String>,
    v: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    u_coords: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    v_coords: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    states: StatesFile,
    actions: ActionsFile,
    rho: Array4,
    g: Array4,
    #[serde(rename = "G")]
    bound: f64,
    terminal: Vec<f64>,
}

fn describe(field: &str) -> Option<&'static str> {
    match field {
        "rho" => Some("transition kernel"),
        "g" => Some("cost function"),
        "G" => Some("cost bound"),
        "terminal" => Some("terminal cost"),
        _ => None,
    }
}

fn parse_error(err: serde_json::Error) -> Error {
    let mut message = err.to_string();
    // serde_json appends " at line L column C"; we report those separately.
    if let Some(pos) = message.rfind(" at line ") {
        message.truncate(pos);
    }
    if let Some(field) = message
        .strip_prefix("missing field `")
        .and_then(|rest| rest.strip_suffix('`'))
    {
        if let Some(what) = describe(field) {
            message = format!("missing field `{field}` ({what})");
        }
    }
    Error::Parse {
        line: err.line(),
        column: err.column(),
        message,
    }
}

fn extent(array: &'static str, expected: [usize; 4], at: &str, found: usize, level: usize) -> Error {
    Error::Extent {
        array,
        detail: format!(
            "expected [{}][{}][{}][{}], found {found} entries at {array}{at} (dimension {level}, expected {})",
            expected[0], expected[1], expected[2], expected[3], expected[level]
        ),
    }
}

fn flatten(array: &'static str, data: &Array4, dims: [usize; 4]) -> Result<Vec<f64>, Error> {
    if data.len() != dims[0] {
        return Err(extent(array, dims, "", data.len(), 0));
    }
    let mut flat = Vec::with_capacity(dims.iter().product());
    for (u, a) in data.iter().enumerate() {
        if a.len() != dims[1] {
            return Err(extent(array, dims, &format!("[{u}]"), a.len(), 1));
        }
        for (v, b) in a.iter().enumerate() {
            if b.len() != dims[2] {
                return Err(extent(array, dims, &format!("[{u}][{v}]"), b.len(), 2));
            }
            for (x, c) in b.iter().enumerate() {
                if c.len() != dims[3] {
                    return Err(extent(array, dims, &format!("[{u}][{v}][{x}]"), c.len(), 3));
                }
                flat.extend_from_slice(c);
            }
        }
    }
    Ok(flat)
}

fn nest(flat: &[f64], nu: usize, nv: usize, n: usize) -> Array4 {
    let mut rows = flat.chunks(n.max(1));
    (0..nu)
        .map(|_| {
            (0..nv)
                .map(|_| (0..n).map(|_| rows.next().unwrap().to_vec()).collect())
                .collect()
        })
        .collect()
}

fn check_len(array: &'static str, found: usize, expected: usize) -> Result<(), Error> {
    if found != expected {
        return Err(Error::Extent {
            array,
            detail: format!("expected {expected} entries, found {found}"),
        });
    }
    Ok(())
}

/// Parses a model document. Structural problems are errors; value
/// invariants are left to [`turnpike_core::validate`].
pub fn parse_model(text: &str) -> Result<GameModel, Error> {
    let file: ModelFile = serde_json::from_str(text).map_err(parse_error)?;
    let n = file.states.ids.len();
    let (nu, nv) = (file.actions.u.len(), file.actions.v.len());
    check_len("states.pi", file.states.pi.len(), n)?;
    check_len("terminal", file.terminal.len(), n)?;
    let dims = [nu, nv, n, n];
    let rho = flatten("rho", &file.rho, dims)?;
    let g = flatten("g", &file.g, dims)?;
    let model = GameModel::new(
        StateSpace {
            ids: file.states.ids,
            pi: file.states.pi,
        },
        ActionSets {
            u_labels: file.actions.u,
            v_labels: file.actions.v,
            u_coords: file.actions.u_coords,
            v_coords: file.actions.v_coords,
        },
        TransitionKernel { rho },
        CostFunction {
            g,
            bound: file.bound,
        },
        ValueFunction(file.terminal),
    )?;
    Ok(model)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<GameModel, Error> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_model(&text)
}

/// Pretty-printed JSON for a model.
pub fn to_json(model: &GameModel) -> Result<String, Error> {
    let (nu, nv, n) = (model.n_u(), model.n_v(), model.n_states());
    let file = ModelFile {
        states: StatesFile {
            ids: model.states.ids.clone(),
            pi: model.states.pi.clone(),
        },
        actions: ActionsFile {
            u: model.actions.u_labels.clone(),
            v: model.actions.v_labels.clone(),
            u_coords: model.actions.u_coords.clone(),
            v_coords: model.actions.v_coords.clone(),
        },
        rho: nest(&model.kernel.rho, nu, nv, n),
        g: nest(&model.cost.g, nu, nv, n),
        bound: model.cost.bound,
        terminal: model.terminal.to_vec(),
    };
    let mut text = serde_json::to_string_pretty(&file).map_err(parse_error)?;
    text.push('\n');
    Ok(text)
}

/// Writes a valid model. Invalid models are refused.
pub fn save_model(model: &GameModel, path: impl AsRef<Path>) -> Result<(), Error> {
    model.ensure_valid()?;
    let path = path.as_ref();
    fs::write(path, to_json(model)?).map_err(|e| Error::io(path, e))
}
