//! Model files and delta-list arguments.

use std::collections::BTreeMap;
use std::path::Path;

use bcn_core::{parse, Bcn, EquationSystem, Expr, LogicalMatrix};
use serde::Deserialize;
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EquationsForm {
    #[serde(default)]
    inputs: Vec<String>,
    states: Vec<String>,
    #[serde(default)]
    outputs: Option<Vec<String>>,
    update: BTreeMap<String, String>,
    #[serde(default)]
    output_map: BTreeMap<String, String>,
}

#[derive(Debug, Deserialize)]
struct MatrixForm {
    n: usize,
    m: usize,
    p: usize,
    #[serde(rename = "L")]
    l: Vec<Vec<usize>>,
    #[serde(rename = "H")]
    h: Vec<usize>,
    #[serde(default)]
    names: Option<NamesForm>,
}

#[derive(Debug, Deserialize)]
struct NamesForm {
    states: Vec<String>,
    inputs: Vec<String>,
    outputs: Vec<String>,
}

/// Reads a model from a path (`-` for stdin). JSON content is taken as a
/// model file in equations or matrix form; anything else as the text DSL.
pub fn load_model(path: &Path, max_n: usize) -> Result<Bcn, CliError> {
    let text = if path == Path::new("-") {
        std::io::read_to_string(std::io::stdin())
            .map_err(|e| CliError::Input(format!("reading stdin: {e}")))?
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
    };
    let where_ = path.display().to_string();
    parse_model(&text, max_n).map_err(|e| match e {
        CliError::Input(msg) => CliError::Input(format!("{where_}: {msg}")),
        other => other,
    })
}

pub fn parse_model(text: &str, max_n: usize) -> Result<Bcn, CliError> {
    if text.trim_start().starts_with('{') {
        let value: Value =
            serde_json::from_str(text).map_err(|e| CliError::Input(e.to_string()))?;
        let obj = value
            .as_object()
            .ok_or_else(|| CliError::Input("model file must be a JSON object".into()))?;
        match (obj.contains_key("L"), obj.contains_key("update")) {
            (true, true) => Err(CliError::Input(
                "model file has both matrix (`L`) and equations (`update`) forms".into(),
            )),
            (true, false) => {
                let form: MatrixForm =
                    serde_json::from_value(value).map_err(|e| CliError::Input(e.to_string()))?;
                from_matrix_form(form, max_n)
            }
            (false, true) => {
                let form: EquationsForm =
                    serde_json::from_value(value).map_err(|e| CliError::Input(e.to_string()))?;
                from_equations_form(form, max_n)
            }
            (false, false) => Err(CliError::Input(
                "model file needs either `L`/`H` (matrix form) or `update` (equations form)".into(),
            )),
        }
    } else {
        let eqs: EquationSystem = text
            .parse()
            .map_err(|e: bcn_core::ModelError| CliError::Input(e.to_string()))?;
        assemble_capped(&eqs, max_n)
    }
}

fn check_cap(n: usize, max_n: usize) -> Result<(), CliError> {
    if n > max_n {
        return Err(CliError::Input(format!(
            "n = {n} exceeds the limit {max_n}; raise it with --max-n"
        )));
    }
    Ok(())
}

fn assemble_capped(eqs: &EquationSystem, max_n: usize) -> Result<Bcn, CliError> {
    check_cap(eqs.states.len(), max_n)?;
    eqs.assemble().map_err(|e| CliError::Input(e.to_string()))
}

fn from_matrix_form(form: MatrixForm, max_n: usize) -> Result<Bcn, CliError> {
    check_cap(form.n, max_n)?;
    if form.m > 30 || form.p > 30 {
        return Err(CliError::Input("m and p must be at most 30".into()));
    }
    if form.l.len() != 1 << form.m {
        return Err(CliError::Input(format!(
            "`L` must have 2^m = {} blocks, found {}",
            1usize << form.m,
            form.l.len()
        )));
    }
    let b = Bcn::from_deltas(form.n, form.m, form.p, &form.l, &form.h)
        .map_err(|e| CliError::Input(e.to_string()))?;
    match form.names {
        Some(n) => b
            .with_names(bcn_core::Names {
                states: n.states,
                inputs: n.inputs,
                outputs: n.outputs,
            })
            .map_err(|e| CliError::Input(e.to_string())),
        None => Ok(b),
    }
}

fn from_equations_form(form: EquationsForm, max_n: usize) -> Result<Bcn, CliError> {
    let parse_all = |section: &str, map: BTreeMap<String, String>| {
        map.into_iter()
            .map(|(name, text)| {
                parse(&text)
                    .map(|e| (name.clone(), e))
                    .map_err(|e| CliError::Input(format!("{section}.{name}: {e}")))
            })
            .collect::<Result<Vec<(String, Expr)>, CliError>>()
    };
    let updates = parse_all("update", form.update)?;
    let output_map = parse_all("output_map", form.output_map)?;
    let outputs = form
        .outputs
        .unwrap_or_else(|| output_map.iter().map(|(n, _)| n.clone()).collect());
    let eqs = EquationSystem {
        states: form.states,
        inputs: form.inputs,
        outputs,
        updates,
        output_map,
    };
    assemble_capped(&eqs, max_n)
}

/// A permutation or logical matrix given as `3,6,1,8`, `[3 6 1 8]` or
/// `δ_8[3,6,1,8]`; 1-based, square (rows = number of entries).
pub fn parse_delta_list(arg: &str, what: &str) -> Result<LogicalMatrix, CliError> {
    let bad = |msg: String| CliError::Input(format!("{what}: {msg}"));
    let mut body = arg.trim();
    let mut rows = None;
    for prefix in ["δ_", "delta_", "d_"] {
        if let Some(rest) = body.strip_prefix(prefix) {
            let open = rest
                .find('[')
                .ok_or_else(|| bad(format!("expected `[` in `{arg}`")))?;
            rows = Some(
                rest[..open]
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| bad(format!("bad row count in `{arg}`")))?,
            );
            body = &rest[open..];
            break;
        }
    }
    let body = body.trim().trim_start_matches('[').trim_end_matches(']');
    let entries = body
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>()
                .map_err(|_| bad(format!("`{s}` is not a positive integer")))
        })
        .collect::<Result<Vec<usize>, CliError>>()?;
    if entries.is_empty() {
        return Err(bad("empty list".into()));
    }
    let rows = rows.unwrap_or(entries.len());
    LogicalMatrix::new(rows, &entries).map_err(|e| bad(e.to_string()))
}

/// `1,2,1` style 1-based index list; empty string is an empty list.
pub fn parse_index_list(arg: &str, what: &str) -> Result<Vec<usize>, CliError> {
    arg.trim()
        .trim_start_matches('[')
        .trim_end_matches(']')
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>()
                .map_err(|_| CliError::Input(format!("{what}: `{s}` is not a positive integer")))
        })
        .collect()
}
