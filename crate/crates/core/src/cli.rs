//! Command-line front end: JSON problem documents in, machine-readable
//! verdicts out.
//!
//! Input schema:
//! ```json
//! {
//!   "group": {"moduli": [4]},
//!   "subgroup_H": {"generators": [[2]]},
//!   "measure": {"atoms": [{"point": [0], "weight": "1/2"}]},
//!   "transversal": [[0], [1]]
//! }
//! ```
//! Weights accept "p/q" strings or integer/decimal literals, converted
//! exactly. Results go to stdout as JSON, diagnostics to stderr. Exit
//! codes: 0 success, 1 input/validation error, 2 internal cross-check
//! failure.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::group::{
    annihilator, canonical_transversal, Elem, FiniteAbelianGroup, Subgroup, Transversal,
};
use crate::lp::{poly_space_basis, project_closed_form, project_oracle, FunctionOnAtoms};
use crate::measure::{AtomicMeasure, DerivedBundle};
use crate::testkit;

#[derive(Parser)]
#[command(
    name = "lca-wold",
    about = "Classify atomic measures on finite abelian groups, compute Wold decompositions, h-tables and coset-polynomial projections"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Problem document (JSON); stdin when omitted
    #[arg(long)]
    input: Option<PathBuf>,
    /// Seed for randomized checks
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// H-regularity and H-singularity verdicts with witnesses
    Classify(CommonArgs),
    /// Wold-type decomposition into regular and singular parts
    Decompose(CommonArgs),
    /// Full (lambda, gamma, h) table with exact rationals
    HTable(CommonArgs),
    /// Closed-form projection onto the coset polynomial span, cross-checked
    Project {
        #[command(flatten)]
        common: CommonArgs,
        /// Coset representative x, comma-separated residues
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Function file: {"values": [{"point": [..], "re": .., "im": ..}]}
        #[arg(long)]
        function: PathBuf,
        /// Also report norms at this exponent
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Orthogonality (h = 1/n) and periodicity verdicts
    CheckOrthogonality(CommonArgs),
    /// Run the invariant suite on random and built-in cases
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
}

/// Parsed and validated problem document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemSpec {
    pub group: FiniteAbelianGroup,
    pub generators: Vec<Elem>,
    pub h: Subgroup,
    pub lambda: Subgroup,
    pub mu: AtomicMeasure,
    pub transversal: Transversal,
    pub transversal_explicit: bool,
}

#[derive(Serialize, Deserialize)]
struct ProblemDoc {
    group: GroupDoc,
    #[serde(rename = "subgroup_H")]
    subgroup_h: SubgroupDoc,
    measure: MeasureDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    transversal: Option<Vec<Vec<u64>>>,
}

#[derive(Serialize, Deserialize)]
struct GroupDoc {
    moduli: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct SubgroupDoc {
    generators: Vec<Vec<u64>>,
}

#[derive(Serialize, Deserialize)]
struct MeasureDoc {
    atoms: Vec<AtomDoc>,
}

#[derive(Serialize, Deserialize)]
struct AtomDoc {
    point: Vec<u64>,
    weight: Value,
}

/// Exact rational from "p/q", an integer, or a decimal literal
/// (optionally with an exponent), via a base-10 denominator.
pub fn parse_rational(v: &Value) -> Result<BigRational> {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        other => return Err(Error::Input(format!("weight must be a string or number, got {other}"))),
    };
    parse_rational_str(&s)
}

fn parse_rational_str(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = |m: &str| Error::Input(format!("cannot parse rational {s:?}: {m}"));
    if let Some((p, q)) = s.split_once('/') {
        let num = BigInt::from_str(p.trim()).map_err(|_| bad("bad numerator"))?;
        let den = BigInt::from_str(q.trim()).map_err(|_| bad("bad denominator"))?;
        if den.is_zero() {
            return Err(bad("zero denominator"));
        }
        return Ok(BigRational::new(num, den));
    }
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, i64::from_str(e).map_err(|_| bad("bad exponent"))?),
        None => (s, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let int_part = match int_part {
        "" => "0",
        "-" => "-0",
        "+" => "0",
        p => p,
    };
    let digits = format!("{int_part}{frac_part}");
    let num = BigInt::from_str(&digits).map_err(|_| bad("bad digits"))?;
    let scale = frac_part.len() as i64 - exp;
    let ten = BigInt::from(10);
    if scale >= 0 {
        Ok(BigRational::new(num, ten.pow(scale as u32)))
    } else {
        Ok(BigRational::from_integer(num * ten.pow((-scale) as u32)))
    }
}

/// "p" when integral, "p/q" otherwise.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn elem_json(e: &Elem) -> Value {
    json!(e.residues())
}

fn elem_from_vec(group: &FiniteAbelianGroup, v: &[u64], field: &str) -> Result<Elem> {
    let e = Elem(v.to_vec());
    group
        .check(&e)
        .map_err(|err| Error::Input(format!("{field}: {err}")))?;
    Ok(e)
}

/// Parses and validates a problem document.
pub fn parse_problem(text: &str) -> Result<ProblemSpec> {
    let doc: ProblemDoc =
        serde_json::from_str(text).map_err(|e| Error::Input(format!("document: {e}")))?;
    let group = FiniteAbelianGroup::new(doc.group.moduli.clone())
        .map_err(|e| Error::Input(format!("group.moduli: {e}")))?;

    let mut generators = Vec::new();
    for (i, g) in doc.subgroup_h.generators.iter().enumerate() {
        generators.push(elem_from_vec(&group, g, &format!("subgroup_H.generators[{i}]"))?);
    }
    let h = Subgroup::generate(&group, &generators)
        .map_err(|e| Error::Input(format!("subgroup_H: {e}")))?;
    let lambda = annihilator(&group, &h)?;

    let mut pairs = Vec::new();
    for (i, atom) in doc.measure.atoms.iter().enumerate() {
        let point = elem_from_vec(&group, &atom.point, &format!("measure.atoms[{i}].point"))?;
        let weight = parse_rational(&atom.weight)
            .map_err(|e| Error::Input(format!("measure.atoms[{i}].weight: {e}")))?;
        if !weight.is_positive() {
            return Err(Error::Input(format!(
                "measure.atoms[{i}].weight: must be positive, got {}",
                format_rational(&weight)
            )));
        }
        pairs.push((point, weight));
    }
    let mu = AtomicMeasure::from_pairs(&group, pairs)
        .map_err(|e| Error::Input(format!("measure: {e}")))?;

    let (transversal, transversal_explicit) = match &doc.transversal {
        None => (canonical_transversal(&group, &lambda), false),
        Some(reps) => {
            let mut elems = Vec::new();
            for (i, r) in reps.iter().enumerate() {
                elems.push(elem_from_vec(&group, r, &format!("transversal[{i}]"))?);
            }
            let t = Transversal::new(&group, &lambda, elems)
                .map_err(|e| Error::Input(format!("transversal: {e}")))?;
            (t, true)
        }
    };

    Ok(ProblemSpec { group, generators, h, lambda, mu, transversal, transversal_explicit })
}

/// Serializes a problem back into the input schema.
pub fn serialize_problem(spec: &ProblemSpec) -> String {
    let doc = ProblemDoc {
        group: GroupDoc { moduli: spec.group.moduli().to_vec() },
        subgroup_h: SubgroupDoc {
            generators: spec.generators.iter().map(|e| e.residues().to_vec()).collect(),
        },
        measure: MeasureDoc {
            atoms: spec
                .mu
                .atoms()
                .iter()
                .map(|(p, w)| AtomDoc {
                    point: p.residues().to_vec(),
                    weight: Value::String(format_rational(w)),
                })
                .collect(),
        },
        transversal: spec
            .transversal_explicit
            .then(|| spec.transversal.reps().iter().map(|e| e.residues().to_vec()).collect()),
    };
    serde_json::to_string_pretty(&doc).expect("schema serializes")
}

fn read_input(path: &Option<PathBuf>) -> Result<String> {
    match path {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| Error::Input(format!("cannot read {}: {e}", p.display()))),
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| Error::Input(format!("cannot read stdin: {e}")))?;
            Ok(buf)
        }
    }
}

fn h_table_json(bundle: &DerivedBundle) -> Value {
    let entries: Vec<Value> = bundle
        .h_entries()
        .map(|(l, g, v)| {
            json!({"lambda": elem_json(l), "gamma": elem_json(g), "h": format_rational(v)})
        })
        .collect();
    json!(entries)
}

fn measure_json(mu: &AtomicMeasure) -> Value {
    let atoms: Vec<Value> = mu
        .atoms()
        .iter()
        .map(|(p, w)| json!({"point": elem_json(p), "weight": format_rational(w)}))
        .collect();
    json!({"atoms": atoms})
}

fn classify_report(spec: &ProblemSpec) -> Result<Value> {
    let singularity = crate::classify::is_h_singular(&spec.group, &spec.mu, &spec.lambda)?;
    let (regular, violations) =
        crate::classify::is_h_regular(&spec.group, &spec.mu, &spec.lambda, &spec.transversal)?;
    let singular = singularity.is_singular();
    if (regular && singular) != spec.mu.is_zero() {
        return Err(Error::CrossCheck(
            "regularity/singularity dichotomy violated".into(),
        ));
    }
    let bundle = DerivedBundle::derive(&spec.group, &spec.mu, &spec.lambda, &spec.transversal)?;
    let (witness, violation) = match &singularity {
        crate::classify::Singularity::Singular { witness } => (
            Some(witness.iter().map(elem_json).collect::<Vec<_>>()),
            None,
        ),
        crate::classify::Singularity::NotSingular { gamma, lambda } => (
            None,
            Some(json!({"gamma": elem_json(gamma), "lambda": elem_json(lambda)})),
        ),
    };
    Ok(json!({
        "regular": regular,
        "singular": singular,
        "singular_witness": witness,
        "singular_violation": violation,
        "regular_violations": violations
            .iter()
            .map(|(l, g)| json!({"lambda": elem_json(l), "gamma": elem_json(g)}))
            .collect::<Vec<_>>(),
        "h_table": h_table_json(&bundle),
        "lambda": spec.lambda.elements().iter().map(elem_json).collect::<Vec<_>>(),
        "transversal": spec.transversal.reps().iter().map(elem_json).collect::<Vec<_>>(),
    }))
}

fn decompose_report(spec: &ProblemSpec) -> Result<Value> {
    let wold =
        crate::classify::wold_decompose(&spec.group, &spec.mu, &spec.lambda, &spec.transversal)?;
    if wold.mu_rho.add(&wold.mu_sigma) != spec.mu {
        return Err(Error::CrossCheck("Wold parts do not sum to the input measure".into()));
    }
    if !crate::classify::is_h_regular(&spec.group, &wold.mu_rho, &spec.lambda, &spec.transversal)?.0
    {
        return Err(Error::CrossCheck("regular Wold part fails its classifier".into()));
    }
    if !crate::classify::is_h_singular(&spec.group, &wold.mu_sigma, &spec.lambda)?.is_singular() {
        return Err(Error::CrossCheck("singular Wold part fails its classifier".into()));
    }
    Ok(json!({
        "mu_rho": measure_json(&wold.mu_rho),
        "mu_sigma": measure_json(&wold.mu_sigma),
        "b_rho": wold.b_rho.iter().map(elem_json).collect::<Vec<_>>(),
        "b_sigma": wold.b_sigma.iter().map(elem_json).collect::<Vec<_>>(),
    }))
}

fn h_table_report(spec: &ProblemSpec) -> Result<Value> {
    let bundle = DerivedBundle::derive(&spec.group, &spec.mu, &spec.lambda, &spec.transversal)?;
    Ok(json!({
        "nu": measure_json(bundle.nu()),
        "entries": h_table_json(&bundle),
    }))
}

fn orthogonality_report(spec: &ProblemSpec) -> Result<Value> {
    let (orthogonal, deviations) = crate::classify::orthogonality_test(
        &spec.group,
        &spec.mu,
        &spec.lambda,
        &spec.transversal,
    )?;
    let periodic =
        crate::classify::is_periodic(&spec.group, &spec.mu, &spec.lambda, &spec.transversal)?;
    if orthogonal != periodic {
        return Err(Error::CrossCheck("orthogonality and periodicity verdicts disagree".into()));
    }
    Ok(json!({
        "n": spec.lambda.len(),
        "orthogonal": orthogonal,
        "periodic": periodic,
        "deviations": deviations
            .iter()
            .map(|(l, g, h)| json!({
                "lambda": elem_json(l), "gamma": elem_json(g), "h": format_rational(h)
            }))
            .collect::<Vec<_>>(),
    }))
}

#[derive(Deserialize)]
struct FunctionDoc {
    values: Vec<FunctionValueDoc>,
}

#[derive(Deserialize)]
struct FunctionValueDoc {
    point: Vec<u64>,
    #[serde(default)]
    re: f64,
    #[serde(default)]
    im: f64,
}

fn function_json(f: &FunctionOnAtoms) -> Value {
    let records: Vec<Value> = f
        .values()
        .iter()
        .map(|(p, v)| json!({"point": elem_json(p), "re": v.re, "im": v.im}))
        .collect();
    json!(records)
}

fn project_report(spec: &ProblemSpec, x_arg: &str, function: &PathBuf, alpha: Option<f64>) -> Result<Value> {
    let residues: Vec<u64> = x_arg
        .split(',')
        .map(|p| u64::from_str(p.trim()).map_err(|_| Error::Input(format!("--x: bad residue {p:?}"))))
        .collect::<Result<_>>()?;
    let x = elem_from_vec(&spec.group, &residues, "--x")?;

    let text = std::fs::read_to_string(function)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", function.display())))?;
    let doc: FunctionDoc =
        serde_json::from_str(&text).map_err(|e| Error::Input(format!("function file: {e}")))?;
    let mut values: BTreeMap<Elem, Complex64> = BTreeMap::new();
    for (i, rec) in doc.values.iter().enumerate() {
        let point = elem_from_vec(&spec.group, &rec.point, &format!("function values[{i}].point"))?;
        values.insert(point, Complex64::new(rec.re, rec.im));
    }
    let f = FunctionOnAtoms::new(spec.mu.clone(), values)
        .map_err(|e| Error::Input(format!("function file: {e}")))?;

    let closed = project_closed_form(&spec.group, &spec.mu, &spec.lambda, &x, &f)?;
    let basis = poly_space_basis(&spec.group, &spec.h, &x, &spec.mu)?;
    let oracle = project_oracle(&basis, &f)?;
    let sup = closed.sup_distance(&oracle);
    if sup > 1e-9 {
        return Err(Error::CrossCheck(format!(
            "closed-form and oracle projections differ by {sup:.3e}"
        )));
    }
    let mut out = json!({
        "x": elem_json(&x),
        "basis_rank": basis.rank(),
        "closed_form": function_json(&closed),
        "oracle": function_json(&oracle),
        "sup_difference": sup,
    });
    if let Some(a) = alpha {
        out["norms"] = json!({
            "alpha": a,
            "input": crate::lp::lp_norm(&f, a)?,
            "projection": crate::lp::lp_norm(&closed, a)?,
        });
    }
    Ok(out)
}

fn selftest_report(seed: u64, trials: usize) -> Result<Value> {
    let report = testkit::run_suite(seed, trials)?;
    let out = json!({
        "checks": report.checks,
        "passed": report.checks - report.failures.len(),
        "failed": report.failures.len(),
        "failures": report.failures,
    });
    if report.failures.is_empty() {
        Ok(out)
    } else {
        eprintln!("{}", serde_json::to_string_pretty(&out).expect("json"));
        Err(Error::CrossCheck(format!("{} selftest checks failed", report.failures.len())))
    }
}

fn dispatch(cli: Cli) -> Result<Value> {
    match &cli.command {
        Command::Classify(common) => classify_report(&parse_problem(&read_input(&common.input)?)?),
        Command::Decompose(common) => decompose_report(&parse_problem(&read_input(&common.input)?)?),
        Command::HTable(common) => h_table_report(&parse_problem(&read_input(&common.input)?)?),
        Command::CheckOrthogonality(common) => {
            orthogonality_report(&parse_problem(&read_input(&common.input)?)?)
        }
        Command::Project { common, x, function, alpha } => {
            project_report(&parse_problem(&read_input(&common.input)?)?, x, function, *alpha)
        }
        Command::Selftest { seed, trials } => selftest_report(*seed, *trials),
    }
}

/// Parses argv, runs the requested subcommand, prints the result, and
/// returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version with its own exit semantics
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(value) => {
            println!("{}", serde_json::to_string_pretty(&value).expect("json"));
            0
        }
        Err(Error::CrossCheck(msg)) => {
            eprintln!("cross-check failure: {msg}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
