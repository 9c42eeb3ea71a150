//! Report structures: serialized as JSON with `--json`, otherwise rendered as text.

use std::fmt::Write as _;

use bcn_core::{Bcn, EquationSystem, LogicalMatrix, Partition, RationalMatrix};
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

pub trait Render: Serialize {
    fn human(&self) -> String;
    fn summary(&self) -> String;
}

#[derive(Debug, Serialize)]
pub struct ModelEcho {
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub states: Vec<String>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

impl ModelEcho {
    pub fn new(b: &Bcn) -> Self {
        let names = b.names_or_default();
        Self {
            n: b.n(),
            m: b.m(),
            p: b.p(),
            states: names.states,
            inputs: names.inputs,
            outputs: names.outputs,
        }
    }

    fn line(&self) -> String {
        format!(
            "model: n={} m={} p={} (states {}; inputs {}; outputs {})",
            self.n,
            self.m,
            self.p,
            list_or_none(&self.states),
            list_or_none(&self.inputs),
            list_or_none(&self.outputs)
        )
    }
}

fn list_or_none(names: &[String]) -> String {
    if names.is_empty() {
        "none".into()
    } else {
        names.join(", ")
    }
}

#[derive(Debug, Serialize)]
pub struct Equation {
    pub target: String,
    pub expr: String,
}

#[derive(Debug, Serialize)]
pub struct Equations {
    pub update: Vec<Equation>,
    pub output_map: Vec<Equation>,
}

impl Equations {
    pub fn new(eqs: &EquationSystem) -> Self {
        let conv = |v: &[(String, bcn_core::Expr)]| {
            v.iter()
                .map(|(t, e)| Equation {
                    target: t.clone(),
                    expr: e.to_string(),
                })
                .collect()
        };
        Self {
            update: conv(&eqs.updates),
            output_map: conv(&eqs.output_map),
        }
    }

    fn render(&self, out: &mut String) {
        for e in &self.update {
            let _ = writeln!(out, "  {}' = {}", e.target, e.expr);
        }
        for e in &self.output_map {
            let _ = writeln!(out, "  {} = {}", e.target, e.expr);
        }
    }
}

pub fn blocks(p: &Partition) -> Vec<Vec<usize>> {
    p.blocks_one_based()
}

fn delta_str(rows: usize, d: &[usize]) -> String {
    let body: Vec<String> = d.iter().map(|k| k.to_string()).collect();
    format!("δ_{rows}[{}]", body.join(","))
}

fn partition_str(blocks: &[Vec<usize>]) -> String {
    let inner: Vec<String> = blocks
        .iter()
        .map(|b| {
            let items: Vec<String> = b.iter().map(|v| v.to_string()).collect();
            format!("{{{}}}", items.join(","))
        })
        .collect();
    format!("{{{}}}", inner.join(","))
}

/// `convert`: the matrix form, directly re-readable as a model file.
#[derive(Debug, Serialize)]
pub struct ConvertReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub n: usize,
    pub m: usize,
    pub p: usize,
    #[serde(rename = "L")]
    pub l: Vec<Vec<usize>>,
    #[serde(rename = "H")]
    pub h: Vec<usize>,
    pub names: ModelEcho,
}

impl ConvertReport {
    pub fn new(b: &Bcn) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: "convert",
            n: b.n(),
            m: b.m(),
            p: b.p(),
            l: b.blocks().iter().map(LogicalMatrix::delta).collect(),
            h: b.h().delta(),
            names: ModelEcho::new(b),
        }
    }
}

impl Render for ConvertReport {
    fn human(&self) -> String {
        let mut out = self.names.line() + "\n";
        for (j, d) in self.l.iter().enumerate() {
            let _ = writeln!(out, "L_{} = {}", j + 1, delta_str(1 << self.n, d));
        }
        let _ = writeln!(out, "H = {}", delta_str(1 << self.p, &self.h));
        out
    }

    fn summary(&self) -> String {
        format!(
            "converted: {} input block(s) of 2^{} states",
            self.l.len(),
            self.n
        )
    }
}

#[derive(Debug, Serialize)]
pub struct RowEntry {
    pub word: Vec<usize>,
    pub row: Vec<usize>,
}

#[derive(Debug, Serialize)]
pub struct ObsmatReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub model: ModelEcho,
    /// `None` when the row family exceeded `row_limit`.
    pub rows: Option<Vec<RowEntry>>,
    pub row_limit: usize,
    pub r_star: Option<usize>,
    pub observability_partition: Vec<Vec<usize>>,
    pub observable_columns: bool,
    pub observability_note: &'static str,
    pub undecomposable_by_parity: bool,
    pub max_feasible_order: usize,
}

pub const OBSERVABILITY_NOTE: &str = "distinct columns imply observability only for globally \
controllable networks; controllability is not checked";

impl Render for ObsmatReport {
    fn human(&self) -> String {
        let mut out = self.model.line() + "\n";
        match &self.rows {
            Some(rows) => {
                let _ = writeln!(
                    out,
                    "observability rows ({}, r* = {}):",
                    rows.len(),
                    self.r_star.unwrap_or(0)
                );
                for r in rows {
                    let word = if r.word.is_empty() {
                        "H".to_string()
                    } else {
                        let ls: Vec<String> = r.word.iter().map(|j| format!("L_{j}")).collect();
                        format!("H {}", ls.join(" "))
                    };
                    let _ = writeln!(out, "  {word} = {}", delta_str(1 << self.model.p, &r.row));
                }
            }
            None => {
                let _ = writeln!(
                    out,
                    "observability rows: more than {} (omitted)",
                    self.row_limit
                );
            }
        }
        let _ = writeln!(out, "C = {}", partition_str(&self.observability_partition));
        let _ = writeln!(
            out,
            "observable (distinct columns): {} ({})",
            yes_no(self.observable_columns),
            self.observability_note
        );
        let _ = writeln!(
            out,
            "undecomposable by parity: {}",
            yes_no(self.undecomposable_by_parity)
        );
        let _ = writeln!(out, "order bound from C: {}", self.max_feasible_order);
        out
    }

    fn summary(&self) -> String {
        format!(
            "C has {} block(s); observable: {}",
            self.observability_partition.len(),
            yes_no(self.observable_columns)
        )
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

#[derive(Debug, Serialize)]
pub struct DecomposeReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub model: ModelEcho,
    pub observability_partition: Vec<Vec<usize>>,
    pub max_feasible_order: usize,
    pub requested_order: Option<usize>,
    /// `None` when a requested order has no CC-PEVP.
    pub order: Option<usize>,
    pub s: Option<usize>,
    pub verdict: String,
    pub partition: Option<Vec<Vec<usize>>>,
    #[serde(rename = "Q")]
    pub q: Option<Vec<usize>>,
    #[serde(rename = "T")]
    pub t: Option<Vec<usize>>,
    #[serde(rename = "G1")]
    pub g1: Option<Vec<Vec<usize>>>,
    #[serde(rename = "G2")]
    pub g2: Option<Vec<usize>>,
    #[serde(rename = "M")]
    pub m: Option<Vec<usize>>,
    /// Equations in `z = T x` coordinates; omitted for very large models.
    pub equations: Option<Equations>,
    pub alternatives: Option<usize>,
    pub alternatives_complete: Option<bool>,
    pub all_partitions: Option<Vec<Vec<Vec<usize>>>>,
    pub all_partitions_complete: Option<bool>,
}

impl Render for DecomposeReport {
    fn human(&self) -> String {
        let mut out = self.model.line() + "\n";
        let _ = writeln!(out, "C = {}", partition_str(&self.observability_partition));
        let _ = writeln!(out, "order bound from C: {}", self.max_feasible_order);
        if let Some(d) = self.requested_order {
            let _ = writeln!(out, "requested order: {d}");
        }
        if let (Some(order), Some(s)) = (self.order, self.s) {
            let _ = writeln!(out, "order: {order} (s = {s})");
        }
        let _ = writeln!(out, "verdict: {}", self.verdict);
        if let Some(p) = &self.partition {
            let _ = writeln!(out, "S = {}", partition_str(p));
        }
        let states = 1usize << self.model.n;
        if let (Some(q), Some(s)) = (&self.q, self.s) {
            let _ = writeln!(out, "Q = {}", delta_str(1 << s, q));
        }
        if let Some(t) = &self.t {
            let _ = writeln!(out, "T = {}", delta_str(states, t));
        }
        if let (Some(g1), Some(s)) = (&self.g1, self.s) {
            for (j, g) in g1.iter().enumerate() {
                let _ = writeln!(out, "G_1{} = {}", j + 1, delta_str(1 << s, g));
            }
        }
        if let (Some(g2), Some(s)) = (&self.g2, self.s) {
            let _ = writeln!(out, "G_2 = {}", delta_str(1 << (self.model.n - s), g2));
        }
        if let Some(m) = &self.m {
            let _ = writeln!(out, "M = {}", delta_str(1 << self.model.p, m));
        }
        if let Some(eqs) = &self.equations {
            out.push_str("equations in z = T x:\n");
            eqs.render(&mut out);
        }
        if let Some(a) = self.alternatives {
            let more = if self.alternatives_complete == Some(false) {
                "+"
            } else {
                ""
            };
            let _ = writeln!(out, "other partitions of this order: {a}{more}");
        }
        if let Some(all) = &self.all_partitions {
            let more = if self.all_partitions_complete == Some(false) {
                " (truncated)"
            } else {
                ""
            };
            let _ = writeln!(out, "all CC-PEVPs of this order{more}:");
            for p in all {
                let _ = writeln!(out, "  {}", partition_str(p));
            }
        }
        out
    }

    fn summary(&self) -> String {
        match self.order {
            Some(o) => format!("order {o}: {}", self.verdict),
            None => self.verdict.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct FailureEntry {
    pub quotient: String,
    pub column: usize,
    /// `(row, value)` with values as reduced fractions.
    pub entries: Vec<(usize, String)>,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub model: ModelEcho,
    #[serde(rename = "T")]
    pub t: Vec<usize>,
    pub s: usize,
    #[serde(rename = "Q")]
    pub q: Vec<usize>,
    pub passed: bool,
    pub failures: Vec<FailureEntry>,
    #[serde(rename = "G1")]
    pub g1: Option<Vec<Vec<usize>>>,
    #[serde(rename = "M")]
    pub m: Option<Vec<usize>>,
}

pub fn fraction(num: i64, den: i64) -> String {
    let g = num_gcd(num.abs(), den.abs()).max(1);
    let (n, d) = (num / g, den / g);
    if d == 1 {
        n.to_string()
    } else {
        format!("{n}/{d}")
    }
}

fn num_gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        num_gcd(b, a % b)
    }
}

impl Render for VerifyReport {
    fn human(&self) -> String {
        let mut out = self.model.line() + "\n";
        let _ = writeln!(out, "T = {}", delta_str(self.t.len(), &self.t));
        let _ = writeln!(out, "Q = {}", delta_str(1 << self.s, &self.q));
        let _ = writeln!(out, "result: {}", if self.passed { "pass" } else { "fail" });
        for f in &self.failures {
            let entries: Vec<String> = f
                .entries
                .iter()
                .map(|(r, v)| format!("row {r}: {v}"))
                .collect();
            let _ = writeln!(
                out,
                "  {} column {} is not logical ({})",
                f.quotient,
                f.column,
                entries.join(", ")
            );
        }
        if let Some(g1) = &self.g1 {
            for (j, g) in g1.iter().enumerate() {
                let _ = writeln!(out, "G_1{} = {}", j + 1, delta_str(1 << self.s, g));
            }
        }
        if let Some(m) = &self.m {
            let _ = writeln!(out, "M = {}", delta_str(1 << self.model.p, m));
        }
        out
    }

    fn summary(&self) -> String {
        if self.passed {
            format!("pass: T decomposes with s = {}", self.s)
        } else {
            format!(
                "fail: {} non-logical quotient column(s)",
                self.failures.len()
            )
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SimulateReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub model: ModelEcho,
    pub x0: usize,
    pub inputs: Vec<usize>,
    pub states: Vec<usize>,
    pub outputs: Vec<usize>,
    /// Per step, `1`/`0` for each state variable in declaration order.
    pub state_bits: Option<Vec<String>>,
    pub output_bits: Option<Vec<String>>,
}

impl Render for SimulateReport {
    fn human(&self) -> String {
        let mut out = self.model.line() + "\n";
        let join = |v: &[usize]| {
            v.iter()
                .map(|k| k.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let _ = writeln!(out, "inputs: {}", join(&self.inputs));
        let _ = writeln!(out, "states: {}", join(&self.states));
        let _ = writeln!(out, "outputs: {}", join(&self.outputs));
        if let (Some(sb), Some(ob)) = (&self.state_bits, &self.output_bits) {
            let _ = writeln!(
                out,
                "t  {}  {}",
                self.model.states.join(" "),
                self.model.outputs.join(" ")
            );
            for (t, (s, o)) in sb.iter().zip(ob).enumerate() {
                let _ = writeln!(out, "{t}  {s}  {o}");
            }
        }
        out
    }

    fn summary(&self) -> String {
        format!(
            "{} step(s), final state {}",
            self.inputs.len(),
            self.states.last().copied().unwrap_or(self.x0)
        )
    }
}

#[derive(Debug, Serialize)]
pub struct RationalOut {
    pub denominator: i64,
    pub numerators: Vec<Vec<i64>>,
    pub text: String,
}

impl RationalOut {
    pub fn new(r: &RationalMatrix) -> Self {
        Self {
            denominator: r.denominator(),
            numerators: r
                .numerators()
                .chunks(r.cols())
                .map(<[i64]>::to_vec)
                .collect(),
            text: r.to_string(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RegularityReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub model: ModelEcho,
    #[serde(rename = "T1")]
    pub t1: Vec<usize>,
    #[serde(rename = "T2")]
    pub t2: Vec<usize>,
    pub s: usize,
    #[serde(rename = "R")]
    pub r: RationalOut,
    pub r_is_logical: bool,
    pub verdict: String,
    pub meaning: &'static str,
}

impl Render for RegularityReport {
    fn human(&self) -> String {
        let mut out = self.model.line() + "\n";
        let _ = writeln!(out, "T1 = {}", delta_str(self.t1.len(), &self.t1));
        let _ = writeln!(out, "T2 = {}", delta_str(self.t2.len(), &self.t2));
        let _ = writeln!(out, "R = {}", self.r.text);
        let _ = writeln!(out, "R logical: {}", yes_no(self.r_is_logical));
        let _ = writeln!(out, "verdict: {} ({})", self.verdict, self.meaning);
        out
    }

    fn summary(&self) -> String {
        format!("R = {}: {}", self.r.text, self.verdict)
    }
}
