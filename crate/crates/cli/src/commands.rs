//! Argument parsing and the subcommands of `quadlat`.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use quadlat_core::catalog::{
    assignment_to_k3, bb, gamma_v, lagrangian_section_lattice, lambda24, lambda26, lambda8, same_disc_form,
    DeformationType,
};
use quadlat_core::criteria::{
    classify_mukai_vector, contains_u_with_hints, embed_corank1, induced_check, mukai_pairing, InducedQuery, Mode,
    MukaiVector, DEFAULT_CANDIDATE_CAP,
};
use quadlat_core::disc::{discriminant_form, primitive_gluings, two_elementary_invariants, TwoElemInvariants, DEFAULT_GROUP_CAP};
use quadlat_core::isometry::{disc_action, invariant_and_coinvariant, make_isometry_with_cap, DiscClass, DEFAULT_ORDER_CAP};
use quadlat_core::matrix::IntMatrix;
use quadlat_core::{Error, Lattice, Vector};
use serde_json::{json, Value};

use crate::expr::{eval_str, Expr, ParseError};
use crate::output::{self, big, bigs, vector};
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BOUND: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "quadlat", version, about = "Exact computations with integral lattices and discriminant forms")]
pub struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    L24,
    L8,
    L26,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InducedType {
    K3n,
    Kum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SectionType {
    K3n,
    Kum,
    Og10,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Sym,
    Nonsym,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DiscActionArg {
    Trivial,
    Minus,
    Other,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank, signature, determinant, parity and discriminant group.
    Info { expr: String },
    /// The discriminant quadratic form.
    Disc { expr: String },
    /// Invariant and co-invariant lattices of a group of isometries.
    Invariant {
        expr: String,
        /// File with a rank x rank integer matrix whose columns are the images of the basis. Repeatable.
        #[arg(long, required = true)]
        isometry: Vec<PathBuf>,
    },
    /// Primitive gluings of T and W.
    Gluings {
        t: String,
        w: String,
        /// Keep only results whose discriminant group is m-torsion.
        #[arg(long)]
        torsion: Option<u64>,
    },
    /// Whether the lattice has a hyperbolic plane as a direct summand.
    ContainsU {
        expr: String,
        #[arg(long, default_value_t = 3)]
        height: u64,
    },
    /// A vector of the given square in a unimodular lattice, and its complement.
    EmbedCorank1 {
        #[arg(long, value_enum)]
        target: Target,
        #[arg(long, allow_hyphen_values = true)]
        square: BigInt,
    },
    /// Whether a group of the given order acting on T_X is induced.
    InducedCheck {
        #[arg(long = "type", value_enum)]
        x_type: InducedType,
        #[arg(long)]
        n: u64,
        /// The transcendental lattice, as an expression.
        #[arg(long)]
        t: String,
        #[arg(long)]
        order: u64,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, value_enum)]
        disc_action: DiscActionArg,
        /// Co-invariant lattice, for the -2 vector count in symplectic mode.
        #[arg(long)]
        coinvariant: Option<String>,
        #[arg(long, default_value_t = 3)]
        height: u64,
    },
    /// The lattice spanned by the fibre and a section of a lagrangian fibration.
    Lagrangian {
        #[arg(long = "type", value_enum)]
        x_type: SectionType,
        #[arg(long)]
        n: Option<u64>,
    },
    /// The lattice obtained by gluing w^perp in L24 with <-6>.
    GammaV {
        /// Coordinates of a primitive square-2 vector of L24 (default e + f).
        #[arg(long, allow_hyphen_values = true)]
        w: Option<String>,
    },
    /// Invariants of the K3 side for the 2-elementary invariants (r, a, delta).
    Assign {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        delta: u8,
    },
    /// Square, pairing and positivity of Mukai vectors over a Neron-Severi lattice.
    Mukai {
        #[arg(long)]
        gram: String,
        /// r,l_1,...,l_k,s
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long, allow_hyphen_values = true)]
        w: String,
        /// Whether the l part of v is effective.
        #[arg(long)]
        v_effective: bool,
        #[arg(long)]
        w_effective: bool,
    },
    /// Recompute the published facts in the check table.
    VerifyPaper {
        #[arg(long)]
        check: Option<String>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Lattice(#[from] Error),
    #[error("{0}")]
    Input(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lattice(Error::CapExceeded { .. } | Error::OrderCapExceeded { .. }) => EXIT_BOUND,
            _ => EXIT_USAGE,
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({ "error": { "message": self.to_string() } });
        match self {
            CliError::Parse(p) => {
                v["error"]["kind"] = json!("parse");
                v["error"]["offset"] = json!(p.offset);
                v["error"]["expected"] = json!(p.expected);
            }
            CliError::Lattice(e) => {
                v["error"]["kind"] = json!(if self.exit_code() == EXIT_BOUND { "bound" } else { "input" });
                v["error"]["detail"] = json!(format!("{e:?}"));
            }
            CliError::Input(_) => v["error"]["kind"] = json!("input"),
        }
        v
    }
}

impl From<crate::expr::EvalError> for CliError {
    fn from(e: crate::expr::EvalError) -> Self {
        match e {
            crate::expr::EvalError::Parse(p) => CliError::Parse(p),
            crate::expr::EvalError::Lattice(l) => CliError::Lattice(l),
        }
    }
}

/// The result of a command: JSON document, text rendering and exit code.
#[derive(Debug, Clone)]
pub struct Output {
    pub json: Value,
    pub text: String,
    pub code: i32,
}

impl Output {
    fn ok(json: Value, text: String) -> Self {
        Output { json, text, code: EXIT_OK }
    }
}

/// Enumeration caps, overridable through `QUADLAT_CAP_*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub group: u64,
    pub candidates: u64,
    pub order: u32,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { group: DEFAULT_GROUP_CAP, candidates: DEFAULT_CANDIDATE_CAP, order: DEFAULT_ORDER_CAP }
    }
}

impl Caps {
    pub fn from_env() -> Result<Self, CliError> {
        let d = Caps::default();
        let get = |name: &str, default: u64| -> Result<u64, CliError> {
            match std::env::var(name) {
                Ok(s) => s.trim().parse().map_err(|_| CliError::Input(format!("{name} must be a non-negative integer, got {s:?}"))),
                Err(_) => Ok(default),
            }
        };
        let order = get("QUADLAT_CAP_ORDER", d.order as u64)?;
        Ok(Caps {
            group: get("QUADLAT_CAP_GROUP", d.group)?,
            candidates: get("QUADLAT_CAP_CANDIDATES", d.candidates)?,
            order: u32::try_from(order).map_err(|_| CliError::Input("QUADLAT_CAP_ORDER is too large".into()))?,
        })
    }
}

/// Parses `argv` (including the program name), runs the command and returns
/// the exit code with what goes to stdout and stderr.
pub fn run_command<I, T>(argv: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            return if e.use_stderr() { (code, String::new(), rendered) } else { (code, rendered, String::new()) };
        }
    };
    let result = Caps::from_env().and_then(|caps| execute(&cli.command, caps));
    match result {
        Ok(out) => {
            let body = if cli.json { serde_json::to_string_pretty(&out.json).unwrap() } else { out.text };
            (out.code, format!("{}\n", body.trim_end()), String::new())
        }
        Err(e) => {
            if cli.json {
                (e.exit_code(), format!("{}\n", serde_json::to_string_pretty(&e.to_json()).unwrap()), String::new())
            } else {
                (e.exit_code(), String::new(), format!("error: {e}\n"))
            }
        }
    }
}

pub fn execute(cmd: &Command, caps: Caps) -> Result<Output, CliError> {
    match cmd {
        Command::Info { expr } => info(expr),
        Command::Disc { expr } => disc(expr),
        Command::Invariant { expr, isometry } => invariant(expr, isometry, caps),
        Command::Gluings { t, w, torsion } => gluings(t, w, *torsion, caps),
        Command::ContainsU { expr, height } => contains_u_cmd(expr, *height, caps),
        Command::EmbedCorank1 { target, square } => embed(*target, square),
        Command::InducedCheck { x_type, n, t, order, mode, disc_action, coinvariant, height } => {
            let x_type = match x_type {
                InducedType::K3n => DeformationType::k3n(*n)?,
                InducedType::Kum => DeformationType::kum(*n)?,
            };
            let mode = match mode {
                ModeArg::Sym => Mode::Symplectic,
                ModeArg::Nonsym => Mode::NonSymplectic,
            };
            let disc_action = match disc_action {
                DiscActionArg::Trivial => DiscClass::Trivial,
                DiscActionArg::Minus => DiscClass::MinusIdentity,
                DiscActionArg::Other => DiscClass::Other,
            };
            induced(x_type, t, *order, mode, disc_action, coinvariant.as_deref(), *height, caps)
        }
        Command::Lagrangian { x_type, n } => lagrangian(*x_type, *n),
        Command::GammaV { w } => gamma_v_cmd(w.as_deref()),
        Command::Assign { r, a, delta } => assign(*r, *a, *delta),
        Command::Mukai { gram, v, w, v_effective, w_effective } => mukai(gram, v, w, *v_effective, *w_effective),
        Command::VerifyPaper { check } => verify_paper(check.as_deref()),
    }
}

fn parse_expr(text: &str) -> Result<(Expr, Lattice), CliError> {
    Ok(eval_str(text)?)
}

fn parse_ints(text: &str) -> Result<Vec<BigInt>, CliError> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<BigInt>().map_err(|_| CliError::Input(format!("not an integer: {s:?}"))))
        .collect()
}

/// Reads a square integer matrix, row-major and whitespace separated.
pub fn read_matrix(path: &Path, n: usize) -> Result<IntMatrix, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let entries = parse_ints(&text)?;
    if entries.len() != n * n {
        return Err(CliError::Input(format!(
            "{}: expected {n}x{n} = {} entries, found {}",
            path.display(),
            n * n,
            entries.len()
        )));
    }
    Ok(IntMatrix::from_rows(entries.chunks(n).map(|r| r.to_vec()).collect())?)
}

fn lattice_text(l: &Lattice) -> String {
    let factors = l.invariant_factors();
    let group = if factors.is_empty() {
        "0".to_string()
    } else {
        factors.iter().map(|f| format!("Z/{f}")).collect::<Vec<_>>().join(" + ")
    };
    let sig = l.signature();
    let mut s = format!(
        "rank: {}\nsignature: ({}, {})\ndeterminant: {}\neven: {}\ndiscriminant group: {group}",
        l.rank(),
        sig.positive,
        sig.negative,
        l.determinant(),
        l.is_even()
    );
    if l.is_degenerate() {
        s.push_str("\n(degenerate)");
    }
    s
}

fn info(text: &str) -> Result<Output, CliError> {
    let (e, l) = parse_expr(text)?;
    quadlat_core::lattice::lattice_info(&l)?;
    let mut j = output::lattice(&l);
    j["command"] = json!("info");
    j["expr"] = json!(e.to_string());
    j["disc_length"] = json!(l.invariant_factors().len());
    Ok(Output::ok(j, format!("expr: {e}\n{}", lattice_text(&l))))
}

fn two_elem_json(t: &TwoElemInvariants) -> Value {
    json!({ "r": t.r, "a": t.a, "delta": t.delta })
}

fn disc(text: &str) -> Result<Output, CliError> {
    let (e, l) = parse_expr(text)?;
    let d = discriminant_form(&l)?;
    let f = d.form();
    let n = f.length();
    let q: Vec<Value> = (0..n).map(|i| output::rational(f.q_generator(i))).collect();
    let b: Vec<Value> = (0..n).map(|i| Value::Array((0..n).map(|j| output::rational(f.b_generator(i, j))).collect())).collect();
    let two = two_elementary_invariants(&l).ok();
    let order = f.order();
    let j = json!({
        "command": "disc",
        "expr": e.to_string(),
        "order": big(&order),
        "invariant_factors": bigs(f.orders()),
        "q": q,
        "b": b,
        "two_elementary": two.as_ref().map(two_elem_json),
    });
    let mut text = format!("expr: {e}\norder: {order}\nform: {f}");
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| f.b_generator(i, j).to_string()).collect();
        text.push_str(&format!("\nb[{i}]: {}", row.join(" ")));
    }
    if let Some(t) = two {
        text.push_str(&format!("\n2-elementary (r, a, delta): {t}"));
    }
    Ok(Output::ok(j, text))
}

fn invariant(text: &str, files: &[PathBuf], caps: Caps) -> Result<Output, CliError> {
    let (e, l) = parse_expr(text)?;
    let mut gens = Vec::new();
    for path in files {
        let p = read_matrix(path, l.rank())?;
        gens.push(make_isometry_with_cap(&l, p, caps.order)?);
    }
    let (t, s) = invariant_and_coinvariant(&l, &gens)?;
    let mut actions = Vec::new();
    if !l.is_degenerate() && l.is_even() {
        for g in &gens {
            actions.push(disc_action(g)?.classification.tag());
        }
    }
    let orders: Vec<u32> = gens.iter().map(|g| g.order()).collect();
    let j = json!({
        "command": "invariant",
        "expr": e.to_string(),
        "orders": orders,
        "disc_actions": actions,
        "invariant": output::sublattice(&t),
        "coinvariant": output::sublattice(&s),
    });
    let sub = |s: &quadlat_core::lattice::Sublattice| match s.lattice() {
        Ok(m) => format!("rank {}, gram {m}, basis {}", s.rank(), s.basis()),
        Err(_) => format!("rank {}", s.rank()),
    };
    let text = format!(
        "expr: {e}\norders: {orders:?}\ndisc actions: {}\ninvariant: {}\ncoinvariant: {}",
        actions.join(", "),
        sub(&t),
        sub(&s)
    );
    Ok(Output::ok(j, text))
}

fn gluings(t_text: &str, w_text: &str, torsion: Option<u64>, caps: Caps) -> Result<Output, CliError> {
    let (te, t) = parse_expr(t_text)?;
    let (we, w) = parse_expr(w_text)?;
    let gl = primitive_gluings(&t, &w, torsion, caps.group)?;
    let mut items = Vec::new();
    let mut text = format!("T: {te}\nW: {we}\ngluings: {}", gl.len());
    for (i, g) in gl.iter().enumerate() {
        let name = output::recognize(&g.lattice);
        let mut v = output::lattice(&g.lattice);
        v["glue_order"] = json!(g.glue_order());
        v["summands_primitive"] = json!(g.summands_primitive());
        v["name"] = json!(name);
        items.push(v);
        text.push_str(&format!(
            "\n[{i}] glue order {}, det {}, {}{}",
            g.glue_order(),
            g.lattice.determinant(),
            g.lattice,
            name.map(|n| format!(" ({n})")).unwrap_or_default()
        ));
    }
    let j = json!({
        "command": "gluings",
        "t": te.to_string(),
        "w": we.to_string(),
        "torsion": torsion,
        "count": gl.len(),
        "gluings": items,
    });
    Ok(Output::ok(j, text))
}

fn contains_u_cmd(text: &str, height: u64, caps: Caps) -> Result<Output, CliError> {
    let (e, l) = parse_expr(text)?;
    // the first vector of a visible U term is a hint
    let mut hints = Vec::new();
    for (term, at) in e.terms.iter().zip(e.offsets()?) {
        if (Expr { terms: vec![term.clone()] }).has_u_term() {
            hints.push(Vector::unit(l.rank(), at));
        }
    }
    let v = contains_u_with_hints(&l, &hints, height, caps.candidates)?;
    let mut j = output::u_verdict(&v);
    j["command"] = json!("contains-u");
    j["expr"] = json!(e.to_string());
    j["syntactic"] = json!(e.has_u_term());
    Ok(Output::ok(j, format!("expr: {e}\ncontains U: {}", output::u_verdict_text(&v))))
}

fn embed(target: Target, square: &BigInt) -> Result<Output, CliError> {
    let (name, lambda) = match target {
        Target::L24 => ("l24", lambda24()),
        Target::L8 => ("l8", lambda8()),
        Target::L26 => ("l26", lambda26()),
    };
    let (v, comp) = embed_corank1(&lambda, square)?;
    let k = comp.lattice()?;
    let j = json!({
        "command": "embed-corank1",
        "target": name,
        "square": big(square),
        "vector": vector(&v),
        "complement": output::sublattice(&comp),
    });
    let text = format!("target: {name}\nvector: {v}\ncomplement:\n{}", lattice_text(&k));
    Ok(Output::ok(j, text))
}

#[allow(clippy::too_many_arguments)]
fn induced(
    x_type: DeformationType,
    t_text: &str,
    order: u64,
    mode: Mode,
    action: DiscClass,
    coinvariant: Option<&str>,
    height: u64,
    caps: Caps,
) -> Result<Output, CliError> {
    let (te, t) = parse_expr(t_text)?;
    let co = coinvariant.map(parse_expr).transpose()?;
    let q = InducedQuery {
        x_type,
        t_x: &t,
        order,
        mode,
        disc_action: action,
        coinvariant: co.as_ref().map(|c| &c.1),
        height,
        group_cap: caps.group,
        candidate_cap: caps.candidates,
    };
    let report = induced_check(&q)?;
    let mut cands = Vec::new();
    let mut text = format!("type: {x_type}\nT: {te}\norder: {order}\ndisc action: {action}\ncandidates: {}", report.candidates.len());
    for (c, v) in report.candidates.iter().zip(&report.verdicts) {
        let name = output::recognize(c);
        let mut j = output::lattice(c);
        j["name"] = json!(name);
        j["contains_u"] = output::u_verdict(v);
        cands.push(j);
        text.push_str(&format!(
            "\n  {}{}: contains U: {}",
            c,
            name.map(|n| format!(" ({n})")).unwrap_or_default(),
            output::u_verdict_text(v)
        ));
    }
    if let Some(k) = report.symplectic_minus2 {
        text.push_str(&format!("\n-2 vectors in the co-invariant lattice: {k}"));
    }
    text.push_str(&format!("\nfinal: {}", report.final_verdict.tag()));
    let j = json!({
        "command": "induced-check",
        "type": x_type.tag(),
        "n": x_type.parameter(),
        "t": te.to_string(),
        "order": order,
        "mode": match mode { Mode::Symplectic => "sym", Mode::NonSymplectic => "nonsym" },
        "disc_action": action.tag(),
        "candidates": cands,
        "symplectic_minus2": report.symplectic_minus2,
        "final": report.final_verdict.tag(),
    });
    Ok(Output::ok(j, text))
}

fn lagrangian(x_type: SectionType, n: Option<u64>) -> Result<Output, CliError> {
    let t = match x_type {
        SectionType::K3n => DeformationType::parse("k3n", n)?,
        SectionType::Kum => DeformationType::parse("kum", n)?,
        SectionType::Og10 => DeformationType::Og10,
    };
    let s = lagrangian_section_lattice(t)?;
    let j = json!({
        "command": "lagrangian",
        "type": t.tag(),
        "n": t.parameter(),
        "name": s.canonical_name,
        "div": s.div,
        "t_square": big(&s.t_square),
        "gram": output::matrix(s.lattice.gram()),
    });
    let text = format!("type: {t}\nsection lattice: {}\ngram (D, T): {}\ndiv(T): {}\nT^2: {}", s.canonical_name, s.lattice, s.div, s.t_square);
    Ok(Output::ok(j, text))
}

fn gamma_v_cmd(w: Option<&str>) -> Result<Output, CliError> {
    let l = lambda24();
    let w = match w {
        Some(s) => Vector(parse_ints(s)?),
        None => {
            let mut x = vec![BigInt::from(0); 24];
            x[0] = BigInt::from(1);
            x[1] = BigInt::from(1);
            Vector(x)
        }
    };
    let g = gamma_v(&l, &w)?;
    let og10 = bb(DeformationType::Og10)?;
    let matches = same_disc_form(&g.lattice, &og10)?;
    let mut j = output::lattice(&g.lattice);
    j["command"] = json!("gamma-v");
    j["w"] = vector(&w);
    j["disc_form_matches_og10"] = json!(matches);
    j["glue_order"] = json!(g.gluing.glue_order());
    j["summands_primitive"] = json!(g.gluing.summands_primitive());
    let text = format!(
        "w: {w}\n{}\ndisc form matches bb(og10): {matches}\nglue order: {}\nsummands primitive: {}",
        lattice_text(&g.lattice),
        g.gluing.glue_order(),
        g.gluing.summands_primitive()
    );
    Ok(Output::ok(j, text))
}

fn assign(r: usize, a: usize, delta: u8) -> Result<Output, CliError> {
    let input = TwoElemInvariants::new(r, a, delta)?;
    let (out, warning) = assignment_to_k3(input)?;
    let warning = warning.map(|w| w.message);
    let j = json!({
        "command": "assign",
        "input": two_elem_json(&input),
        "output": two_elem_json(&out),
        "warning": warning,
    });
    let mut text = format!("{input} -> {out}");
    if let Some(w) = &warning {
        text.push_str(&format!("\nwarning: {w}"));
    }
    Ok(Output::ok(j, text))
}

fn mukai_vector(ns: &Lattice, text: &str, effective: bool) -> Result<MukaiVector, CliError> {
    let xs = parse_ints(text)?;
    if xs.len() != ns.rank() + 2 {
        return Err(CliError::Input(format!("expected {} entries r,l...,s, found {}", ns.rank() + 2, xs.len())));
    }
    let r = xs[0].clone();
    let s = xs[xs.len() - 1].clone();
    let l = Vector(xs[1..xs.len() - 1].to_vec());
    Ok(MukaiVector::new(ns.clone(), r, l, s, effective)?)
}

fn mukai(gram: &str, v: &str, w: &str, v_eff: bool, w_eff: bool) -> Result<Output, CliError> {
    let (e, ns) = parse_expr(gram)?;
    let v = mukai_vector(&ns, v, v_eff)?;
    let w = mukai_vector(&ns, w, w_eff)?;
    let pairing = mukai_pairing(&v, &w)?;
    let one = |m: &MukaiVector| {
        json!({
            "r": big(&m.r),
            "l": vector(&m.l),
            "s": big(&m.s),
            "square": big(&m.square()),
            "class": classify_mukai_vector(m).tag(),
        })
    };
    let j = json!({ "command": "mukai", "ns": e.to_string(), "v": one(&v), "w": one(&w), "pairing": big(&pairing) });
    let text = format!(
        "v^2 = {} ({})\nw^2 = {} ({})\n(v, w) = {pairing}",
        v.square(),
        classify_mukai_vector(&v).tag(),
        w.square(),
        classify_mukai_vector(&w).tag()
    );
    Ok(Output::ok(j, text))
}

fn verify_paper(id: Option<&str>) -> Result<Output, CliError> {
    let checks = match id {
        Some(id) => vec![verify::run_check(id).ok_or_else(|| {
            CliError::Input(format!("unknown check {id:?}; known checks: {}", verify::check_ids().join(", ")))
        })?],
        None => verify::run_all(),
    };
    let failed: Vec<&verify::Check> = checks.iter().filter(|c| !c.pass).collect();
    let mut text = String::new();
    for c in &checks {
        text.push_str(&format!("{} {}\n", if c.pass { "PASS" } else { "FAIL" }, c.id));
    }
    if let Some(c) = failed.first() {
        text.push_str(&format!("first divergence in {}:\n  expected: {}\n  computed: {}\n", c.id, c.expected, c.computed));
    }
    text.push_str(&format!("{} of {} checks passed", checks.len() - failed.len(), checks.len()));
    let j = json!({
        "command": "verify-paper",
        "checks": checks.iter().map(|c| json!({
            "id": c.id,
            "claim": c.claim,
            "expected": c.expected,
            "computed": c.computed,
            "pass": c.pass,
        })).collect::<Vec<_>>(),
        "passed": checks.len() - failed.len(),
        "failed": failed.len(),
    });
    let code = if failed.is_empty() { EXIT_OK } else { EXIT_CHECK_FAILED };
    Ok(Output { json: j, text, code })
}
