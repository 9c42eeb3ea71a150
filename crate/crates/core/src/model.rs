//! Boolean control networks in algebraic form `x(t+1) = L u(t) x(t)`,
//! `y(t) = H x(t)`.
//!
//! Column `(j−1)·2^n + q` of `L` (1-based) is the packed successor of state
//! `δ_{2^n}^q` under input `δ_{2^m}^j`; variables pack in declaration order
//! with the first variable most significant.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::expr::{self, Expr, ExprError, ParseError, TruthTable};
use crate::stp::{bit_of, LogicalMatrix, StpError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Matrix(#[from] StpError),
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("equation for `{equation}` references unknown variable `{name}`")]
    UnknownVariable { equation: String, name: String },
    #[error("equation defines `{0}`, which is not a declared state or output")]
    UnknownTarget(String),
    #[error("no update equation for state `{0}`")]
    MissingUpdate(String),
    #[error("no equation for output `{0}`")]
    MissingOutput(String),
    #[error("more than one equation for `{0}`")]
    DuplicateEquation(String),
    #[error("name `{0}` is declared more than once")]
    DuplicateName(String),
    #[error("{what} index {index} out of range 1..={max}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        max: usize,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

/// Variable names, each list in declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Names {
    pub states: Vec<String>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

impl Names {
    /// `x1…xn`, `u1…um`, `y1…yp`.
    pub fn default_for(n: usize, m: usize, p: usize) -> Self {
        let seq = |prefix: &str, k: usize| (1..=k).map(|i| format!("{prefix}{i}")).collect();
        Self {
            states: seq("x", n),
            inputs: seq("u", m),
            outputs: seq("y", p),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bcn {
    n: usize,
    m: usize,
    p: usize,
    l: LogicalMatrix,
    h: LogicalMatrix,
    names: Option<Names>,
}

/// Visited states and the output emitted at each of them (1-based indices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub states: Vec<usize>,
    pub outputs: Vec<usize>,
}

/// Largest supported `n + m`; column counts must fit comfortably in memory.
pub const MAX_PACKED_VARS: usize = 30;

impl Bcn {
    pub fn new(
        n: usize,
        m: usize,
        p: usize,
        l: LogicalMatrix,
        h: LogicalMatrix,
    ) -> Result<Self, ModelError> {
        if n == 0 {
            return Err(ModelError::Dimension(
                "at least one state variable is required".into(),
            ));
        }
        if n + m > MAX_PACKED_VARS || p > MAX_PACKED_VARS {
            return Err(ModelError::Dimension(format!(
                "n + m = {} exceeds the supported maximum {MAX_PACKED_VARS}",
                n + m
            )));
        }
        let (ns, ms, ps) = (1usize << n, 1usize << m, 1usize << p);
        if l.rows() != ns || l.cols() != ns * ms {
            return Err(ModelError::Dimension(format!(
                "L must be {ns}x{}, got {}x{}",
                ns * ms,
                l.rows(),
                l.cols()
            )));
        }
        if h.rows() != ps || h.cols() != ns {
            return Err(ModelError::Dimension(format!(
                "H must be {ps}x{ns}, got {}x{}",
                h.rows(),
                h.cols()
            )));
        }
        Ok(Self {
            n,
            m,
            p,
            l,
            h,
            names: None,
        })
    }

    /// Builds a network from 1-based delta lists: one per input block for `L`.
    pub fn from_deltas(
        n: usize,
        m: usize,
        p: usize,
        blocks: &[Vec<usize>],
        h: &[usize],
    ) -> Result<Self, ModelError> {
        if blocks.len() != 1 << m {
            return Err(ModelError::Dimension(format!(
                "expected {} blocks of L, got {}",
                1usize << m,
                blocks.len()
            )));
        }
        let ns = 1usize << n;
        for b in blocks {
            if b.len() != ns {
                return Err(ModelError::Dimension(format!(
                    "each L block needs {ns} entries, got {}",
                    b.len()
                )));
            }
        }
        let flat: Vec<usize> = blocks.iter().flatten().copied().collect();
        let l = LogicalMatrix::new(ns, &flat)?;
        let h = LogicalMatrix::new(1 << p, h)?;
        Self::new(n, m, p, l, h)
    }

    pub fn with_names(mut self, names: Names) -> Result<Self, ModelError> {
        if names.states.len() != self.n
            || names.inputs.len() != self.m
            || names.outputs.len() != self.p
        {
            return Err(ModelError::Dimension(
                "name lists do not match (n, m, p)".into(),
            ));
        }
        check_unique(
            names
                .states
                .iter()
                .chain(&names.inputs)
                .chain(&names.outputs),
        )?;
        self.names = Some(names);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn l(&self) -> &LogicalMatrix {
        &self.l
    }

    pub fn h(&self) -> &LogicalMatrix {
        &self.h
    }

    pub fn names(&self) -> Option<&Names> {
        self.names.as_ref()
    }

    /// Declared names, or the `x/u/y` defaults.
    pub fn names_or_default(&self) -> Names {
        self.names
            .clone()
            .unwrap_or_else(|| Names::default_for(self.n, self.m, self.p))
    }

    /// `2^n`.
    pub fn state_count(&self) -> usize {
        1 << self.n
    }

    /// `2^m`.
    pub fn input_count(&self) -> usize {
        1 << self.m
    }

    /// `[L_1, …, L_{2^m}]`, each `2^n × 2^n`.
    pub fn blocks(&self) -> Vec<LogicalMatrix> {
        self.l
            .split_columns(self.input_count())
            .expect("L has 2^m blocks by construction")
    }

    /// 0-based successor of 0-based state `q` under 0-based input `j`.
    #[inline]
    pub fn successor(&self, j: usize, q: usize) -> usize {
        self.l.index(j * self.state_count() + q)
    }

    /// One step from 1-based state `x` under 1-based input `u`: returns the next
    /// state and the output emitted at `x`.
    pub fn step(&self, x: usize, u: usize) -> Result<(usize, usize), ModelError> {
        self.check_state(x)?;
        self.check_input(u)?;
        Ok((self.successor(u - 1, x - 1) + 1, self.h.index(x - 1) + 1))
    }

    pub fn simulate(&self, x0: usize, inputs: &[usize]) -> Result<Trajectory, ModelError> {
        self.check_state(x0)?;
        let mut states = Vec::with_capacity(inputs.len() + 1);
        let mut outputs = Vec::with_capacity(inputs.len() + 1);
        let mut x = x0;
        for &u in inputs {
            let (next, y) = self.step(x, u)?;
            states.push(x);
            outputs.push(y);
            x = next;
        }
        states.push(x);
        outputs.push(self.h.index(x - 1) + 1);
        Ok(Trajectory { states, outputs })
    }

    /// Change of coordinates `z = T x`: `L' = T L (I ⊗ Tᵀ)`, `H' = H Tᵀ`.
    ///
    /// State names of the result are `z1…zn`.
    pub fn transform(&self, t: &LogicalMatrix) -> Result<Bcn, ModelError> {
        if t.rows() != self.state_count() {
            return Err(ModelError::Dimension(format!(
                "T must be {0}x{0}",
                self.state_count()
            )));
        }
        let tinv = t.transpose_permutation()?;
        let ns = self.state_count();
        let l = (0..self.l.cols())
            .map(|c| {
                let (j, z) = (c / ns, c % ns);
                t.index(self.successor(j, tinv.index(z)))
            })
            .collect();
        let h = (0..ns).map(|z| self.h.index(tinv.index(z))).collect();
        let mut names = self.names_or_default();
        names.states = (1..=self.n).map(|i| format!("z{i}")).collect();
        let out = Bcn::new(
            self.n,
            self.m,
            self.p,
            LogicalMatrix::from_indices_unchecked(ns, l),
            LogicalMatrix::from_indices_unchecked(self.h.rows(), h),
        )?;
        // z-names may collide with user input names; fall back to defaults then
        Ok(out.clone().with_names(names).unwrap_or(out))
    }

    /// Reads each state and output bit's truth table back out of `L` and `H`.
    pub fn to_equations(&self) -> EquationSystem {
        let names = self.names_or_default();
        let arg_vars: Vec<String> = names.inputs.iter().chain(&names.states).cloned().collect();
        let updates = names
            .states
            .iter()
            .enumerate()
            .map(|(i, name)| {
                let values = self
                    .l
                    .indices()
                    .iter()
                    .map(|&d| bit_of(d, self.n, i))
                    .collect();
                let t = TruthTable::new(arg_vars.clone(), values).expect("2^(m+n) columns");
                (name.clone(), expr::table_to_dnf(&t))
            })
            .collect();
        let output_map = names
            .outputs
            .iter()
            .enumerate()
            .map(|(i, name)| {
                let values = self
                    .h
                    .indices()
                    .iter()
                    .map(|&d| bit_of(d, self.p, i))
                    .collect();
                let t = TruthTable::new(names.states.clone(), values).expect("2^n columns");
                (name.clone(), expr::table_to_dnf(&t))
            })
            .collect();
        EquationSystem {
            states: names.states,
            inputs: names.inputs,
            outputs: names.outputs,
            updates,
            output_map,
        }
    }

    fn check_state(&self, x: usize) -> Result<(), ModelError> {
        if x == 0 || x > self.state_count() {
            return Err(ModelError::IndexOutOfRange {
                what: "state",
                index: x,
                max: self.state_count(),
            });
        }
        Ok(())
    }

    fn check_input(&self, u: usize) -> Result<(), ModelError> {
        if u == 0 || u > self.input_count() {
            return Err(ModelError::IndexOutOfRange {
                what: "input",
                index: u,
                max: self.input_count(),
            });
        }
        Ok(())
    }
}

fn check_unique<'a>(names: impl Iterator<Item = &'a String>) -> Result<(), ModelError> {
    let mut seen = std::collections::HashSet::new();
    for n in names {
        if !seen.insert(n.as_str()) {
            return Err(ModelError::DuplicateName(n.clone()));
        }
    }
    Ok(())
}

/// A network written as logical equations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquationSystem {
    pub states: Vec<String>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    /// `(state, f)` with `state(t+1) = f(states(t), inputs(t))`.
    pub updates: Vec<(String, Expr)>,
    /// `(output, h)` with `output(t) = h(states(t))`.
    pub output_map: Vec<(String, Expr)>,
}

impl EquationSystem {
    pub fn assemble(&self) -> Result<Bcn, ModelError> {
        assemble(self)
    }
}

/// Compiles equations into `(L, H)` by evaluating every equation on all
/// `2^{m+n}` argument combinations.
pub fn assemble(eqs: &EquationSystem) -> Result<Bcn, ModelError> {
    check_unique(eqs.states.iter().chain(&eqs.inputs).chain(&eqs.outputs))?;
    let n = eqs.states.len();
    let m = eqs.inputs.len();
    let p = eqs.outputs.len();
    if n == 0 {
        return Err(ModelError::Dimension(
            "at least one state variable is required".into(),
        ));
    }
    if n + m > MAX_PACKED_VARS {
        return Err(ModelError::Dimension(format!(
            "n + m = {} exceeds the supported maximum {MAX_PACKED_VARS}",
            n + m
        )));
    }
    let updates = order_equations(&eqs.states, &eqs.updates, ModelError::MissingUpdate)?;
    let outputs = order_equations(&eqs.outputs, &eqs.output_map, ModelError::MissingOutput)?;

    let arg_vars: Vec<String> = eqs.inputs.iter().chain(&eqs.states).cloned().collect();
    let compile = |name: &str, e: &Expr, vars: &[String]| {
        e.compile(vars).map_err(|err| match err {
            ExprError::UnboundVariable(v) => ModelError::UnknownVariable {
                equation: name.to_string(),
                name: v,
            },
            other => ModelError::Syntax {
                line: 0,
                message: other.to_string(),
            },
        })
    };
    let update_fns = updates
        .iter()
        .map(|(name, e)| compile(name, e, &arg_vars))
        .collect::<Result<Vec<_>, _>>()?;
    let output_fns = outputs
        .iter()
        .map(|(name, e)| compile(name, e, &eqs.states))
        .collect::<Result<Vec<_>, _>>()?;

    let k = n + m;
    let l: Vec<usize> = (0..1usize << k)
        .map(|z| {
            update_fns.iter().fold(0usize, |acc, f| {
                (acc << 1) | usize::from(!f.eval(|i| bit_of(z, k, i)))
            })
        })
        .collect();
    let h: Vec<usize> = (0..1usize << n)
        .map(|q| {
            output_fns.iter().fold(0usize, |acc, f| {
                (acc << 1) | usize::from(!f.eval(|i| bit_of(q, n, i)))
            })
        })
        .collect();
    Bcn::new(
        n,
        m,
        p,
        LogicalMatrix::from_indices(1 << n, l)?,
        LogicalMatrix::from_indices(1 << p, h)?,
    )?
    .with_names(Names {
        states: eqs.states.clone(),
        inputs: eqs.inputs.clone(),
        outputs: eqs.outputs.clone(),
    })
}

fn order_equations<'a>(
    targets: &'a [String],
    eqs: &'a [(String, Expr)],
    missing: fn(String) -> ModelError,
) -> Result<Vec<(&'a str, &'a Expr)>, ModelError> {
    let mut slots: Vec<Option<&'a Expr>> = vec![None; targets.len()];
    for (name, e) in eqs {
        let i = targets
            .iter()
            .position(|t| t == name)
            .ok_or_else(|| ModelError::UnknownTarget(name.clone()))?;
        if slots[i].replace(e).is_some() {
            return Err(ModelError::DuplicateEquation(name.clone()));
        }
    }
    targets
        .iter()
        .zip(slots)
        .map(|(t, e)| e.map(|e| (t.as_str(), e)).ok_or_else(|| missing(t.clone())))
        .collect()
}

/// Text form:
///
/// ```text
/// inputs: u
/// states: x1, x2, x3
/// outputs: y
/// x1' = x3 | u
/// y = x1 -> x2
/// ```
///
/// `#` starts a comment. Without a `states:` header, states are taken from the
/// update equations in order; likewise for `outputs:`.
impl fmt::Display for EquationSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "inputs: {}", self.inputs.join(", "))?;
        writeln!(f, "states: {}", self.states.join(", "))?;
        writeln!(f, "outputs: {}", self.outputs.join(", "))?;
        for (name, e) in &self.updates {
            writeln!(f, "{name}' = {e}")?;
        }
        for (name, e) in &self.output_map {
            writeln!(f, "{name} = {e}")?;
        }
        Ok(())
    }
}

impl FromStr for EquationSystem {
    type Err = ModelError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut states: Option<Vec<String>> = None;
        let mut inputs: Option<Vec<String>> = None;
        let mut outputs: Option<Vec<String>> = None;
        let mut updates = Vec::new();
        let mut output_map = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |message: String| ModelError::Syntax {
                line: line_no,
                message,
            };
            if let Some((key, rest)) = line.split_once(':') {
                let list: Vec<String> = rest
                    .split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .map(str::to_string)
                    .collect();
                if let Some(bad) = list.iter().find(|s| !is_identifier(s)) {
                    return Err(syntax(format!("`{bad}` is not a valid name")));
                }
                let slot = match key.trim() {
                    "states" => &mut states,
                    "inputs" => &mut inputs,
                    "outputs" => &mut outputs,
                    other => return Err(syntax(format!("unknown header `{other}`"))),
                };
                if slot.replace(list).is_some() {
                    return Err(syntax(format!("repeated `{}` header", key.trim())));
                }
                continue;
            }
            let (lhs, rhs) = line
                .split_once('=')
                .ok_or_else(|| syntax("expected `name' = expr` or `name = expr`".into()))?;
            let lhs = lhs.trim();
            let rhs_col = raw.find('=').map_or(0, |i| raw[..=i].chars().count());
            let e = expr::parse(rhs).map_err(
                |ParseError {
                     column,
                     expected,
                     found,
                 }| {
                    syntax(format!(
                        "column {}: expected {expected}, found {found}",
                        rhs_col + column
                    ))
                },
            )?;
            if let Some(target) = lhs.strip_suffix('\'') {
                let target = target.trim();
                if !is_identifier(target) {
                    return Err(syntax(format!("`{target}` is not a valid name")));
                }
                updates.push((target.to_string(), e));
            } else {
                if !is_identifier(lhs) {
                    return Err(syntax(format!("`{lhs}` is not a valid name")));
                }
                output_map.push((lhs.to_string(), e));
            }
        }
        let states = states.unwrap_or_else(|| first_occurrences(&updates));
        let outputs = outputs.unwrap_or_else(|| first_occurrences(&output_map));
        Ok(EquationSystem {
            states,
            inputs: inputs.unwrap_or_default(),
            outputs,
            updates,
            output_map,
        })
    }
}

fn first_occurrences(eqs: &[(String, Expr)]) -> Vec<String> {
    let mut names: Vec<String> = Vec::new();
    for (n, _) in eqs {
        if !names.contains(n) {
            names.push(n.clone());
        }
    }
    names
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !matches!(s, "true" | "false")
}
