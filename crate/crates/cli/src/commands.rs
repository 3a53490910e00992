use crate::doc::parse_structure;
use crate::report::{count_json, Report};
use distinguo_core::borel::{membership, Branch, RemarkEncoding};
use distinguo_core::equivalence::{
    classify_with, e_equiv, ef_equiv_with_budget, isomorphic_with_budget, ClassifyOptions, Permutation, Relation,
    Witness,
};
use distinguo_core::formulas::{generate_fragment, parse};
use distinguo_core::semantics::{realizations, RealizationSet};
use distinguo_core::{Count, FormulaSet, PeriodicSet, PeriodicUnaryStructure, Signature, Structure};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::collections::HashSet;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

/// Realization sets up to this size are printed without `--show`.
const SHOW_LIMIT: usize = 32;

#[derive(Debug)]
pub struct CliError(pub String);

impl<E: Display> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Where the formula family comes from.
pub struct FamilySource<'a> {
    pub file: Option<&'a Path>,
    pub max_fragment: Option<u64>,
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

pub fn load_structure(path: &Path) -> CliResult<Structure> {
    parse_structure(&read(path)?).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

/// An A-file, or else the fragment of rank at most `N` over `max(N, max arity, 1)` variables.
pub fn load_family(sig: &Signature, source: &FamilySource<'_>) -> CliResult<FormulaSet> {
    match (source.file, source.max_fragment) {
        (Some(path), _) => {
            FormulaSet::parse_lines(sig.clone(), &read(path)?).map_err(|e| CliError(format!("{}: {e}", path.display())))
        }
        (None, Some(rank)) => {
            let vars = (rank as usize).max(sig.max_arity()).max(1);
            Ok(generate_fragment(sig, rank, vars)?)
        }
        (None, None) => Err(CliError("give a formula file or --max-fragment N".into())),
    }
}

pub fn budget_from_env() -> CliResult<Option<u64>> {
    match std::env::var("DISTINGUO_BUDGET") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError(format!("DISTINGUO_BUDGET must be a node count, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

fn permutation_json(p: &Permutation) -> Value {
    match p {
        Permutation::Listed(images) => Value::Object(
            images
                .iter()
                .enumerate()
                .map(|(i, e)| (i.to_string(), json!(e)))
                .collect(),
        ),
        Permutation::ClassWise(pairs) => Value::Array(
            pairs
                .iter()
                .map(|(s, t)| json!({ "from": s.to_string(), "to": t.to_string() }))
                .collect(),
        ),
    }
}

fn witness_json(w: &Option<Witness>) -> Value {
    match w {
        None => Value::Null,
        Some(Witness::Distinction(d)) => json!({
            "index": d.index,
            "formula": d.formula.to_string(),
            "left": count_json(d.left),
            "right": count_json(d.right),
        }),
        Some(Witness::Isomorphism(p)) => json!({ "permutation": permutation_json(p) }),
        Some(Witness::Spoiler(moves)) => Value::Array(
            moves
                .iter()
                .map(|m| json!({ "side": m.side.to_string(), "element": m.element, "response": m.response }))
                .collect(),
        ),
    }
}

fn witness_text(w: &Option<Witness>) -> Option<String> {
    Some(match w.as_ref()? {
        Witness::Distinction(d) => format!("distinguished by {d}"),
        Witness::Isomorphism(p) => format!("isomorphism {p}"),
        Witness::Spoiler(moves) => {
            let parts: Vec<String> = moves.iter().map(|m| m.to_string()).collect();
            format!("spoiler wins: {}", parts.join("; "))
        }
    })
}

pub fn count(structure: &Path, formula: &str, show: bool) -> CliResult<Report> {
    let m = load_structure(structure)?;
    let phi = parse(formula, m.signature()).map_err(|e| CliError(format!("formula: {e}")))?;
    let set = realizations(&m, &phi)?;
    let c = set.count();
    let mut report = Report::new("count");
    report.line(c.to_string());
    report.field("formula", json!(phi.to_string()));
    report.field("count", count_json(c));
    let shown = match (&set, c) {
        (_, Count::Finite(k)) if show || k as usize <= SHOW_LIMIT => {
            Some(set.members_below(set.finite_bound()).to_string())
        }
        (RealizationSet::Periodic(p), Count::Infinite) if show => Some(p.to_string()),
        _ => None,
    };
    if let Some(text) = shown {
        report.line(format!("realizations: {text}"));
        report.field("realizations", json!(text));
    }
    Ok(report)
}

pub fn distinguish(left: &Path, right: &Path, family: &FamilySource<'_>, ef_rank: Option<u32>) -> CliResult<Report> {
    let (m, n) = (load_structure(left)?, load_structure(right)?);
    let a = load_family(m.signature(), family)?;
    let verdict = e_equiv(&m, &n, &a)?;
    let mut report = Report::new("distinguish");
    report.line(format!(
        "{} in A ({} formulas)",
        if verdict.verdict {
            "equivalent"
        } else {
            "distinguishable"
        },
        a.len()
    ));
    report.field("formulas", json!(a.len()));
    report.field("equivalent", json!(verdict.verdict));
    report.field("distinction", witness_json(&verdict.witness));
    if let Some(text) = witness_text(&verdict.witness) {
        report.line(text);
    }
    if let Some(q) = ef_rank {
        let game = ef_equiv_with_budget(&m, &n, q, budget_from_env()?)?;
        report.line(format!(
            "ef_rank_{q}: {}",
            if game.verdict {
                "duplicator wins"
            } else {
                "spoiler wins"
            }
        ));
        if let Some(text) = witness_text(&game.witness) {
            report.line(text);
        }
        report.field(
            "ef",
            json!({ "rank": q, "equivalent": game.verdict, "spoiler": witness_json(&game.witness) }),
        );
    }
    report.exit = if verdict.verdict { 0 } else { 1 };
    Ok(report)
}

pub enum ClassifyBy<'a> {
    Family(FamilySource<'a>),
    Iso,
    Ef(u32),
}

pub fn classify(dir: &Path, by: ClassifyBy<'_>, parallel: bool) -> CliResult<Report> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| CliError(format!("{}: {e}", dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && !p.file_name().is_some_and(|n| n.to_string_lossy().starts_with('.')))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(CliError(format!("{}: no structure files", dir.display())));
    }
    let names: Vec<String> = paths
        .iter()
        .map(|p| p.file_name().expect("files have names").to_string_lossy().into_owned())
        .collect();
    let structures = paths.iter().map(|p| load_structure(p)).collect::<CliResult<Vec<_>>>()?;
    let family;
    let (relation, label) = match by {
        ClassifyBy::Family(source) => {
            family = load_family(structures[0].signature(), &source)?;
            (Relation::EA(&family), format!("E_A ({} formulas)", family.len()))
        }
        ClassifyBy::Iso => (Relation::Iso, "iso".to_string()),
        ClassifyBy::Ef(q) => (Relation::Ef(q), format!("ef_rank_{q}")),
    };
    let options = ClassifyOptions {
        parallel,
        budget: budget_from_env()?,
    };
    let partition = classify_with(&structures, relation, options)?;
    let mut report = Report::new("classify");
    report.line(format!(
        "{} structures, {} classes under {label}",
        structures.len(),
        partition.len()
    ));
    let mut classes = Vec::new();
    for (i, class) in partition.classes().iter().enumerate() {
        let members: Vec<&str> = class.iter().map(|&k| names[k].as_str()).collect();
        report.line(format!(
            "class {i} (representative {}): {}",
            members[0],
            members.join(" ")
        ));
        classes.push(json!({ "representative": members[0], "members": members }));
    }
    report.field("relation", json!(label));
    report.field("structures", json!(names));
    report.field("class_count", json!(partition.len()));
    report.field("classes", Value::Array(classes));
    Ok(report)
}

fn branch_text(b: &Option<Branch>) -> String {
    match b {
        Some(Branch::Finite(w)) => format!("finite branch, witness {w}"),
        Some(Branch::Infinite) => "infinite branch".into(),
        None => "no branch".into(),
    }
}

pub fn borel_check(left: &Path, right: &Path, family: &FamilySource<'_>, n_max: Option<u64>) -> CliResult<Report> {
    let (m, n) = (load_structure(left)?, load_structure(right)?);
    let a = load_family(m.signature(), family)?;
    let direct = e_equiv(&m, &n, &a)?.verdict;
    let borel = membership(&m, &n, &a)?;

    let mut report = Report::new("borel-check");
    report.line(format!("E_A: {direct}"));
    report.line(format!(
        "borel: {} ({} of {} formulas checked)",
        borel.verdict,
        borel.steps.len(),
        a.len()
    ));
    if let Some(step) = borel.steps.last().filter(|_| !borel.verdict) {
        report.line(format!("  {}: {}", step.formula, branch_text(&step.branch)));
    }

    let remark = RemarkEncoding::new(&a, 1).and_then(|probe| {
        let bound = n_max.unwrap_or_else(|| probe.lossless_bound(&m, &n));
        let enc = RemarkEncoding::new(&a, bound)?;
        enc.check(&m, &n).map(|v| (v, bound))
    });
    let remark_verdict = match &remark {
        Ok((v, bound)) => {
            report.line(format!("remark: {v} (n_max {bound})"));
            report.field("remark", json!({ "verdict": v, "n_max": bound }));
            Some(*v)
        }
        Err(e) => {
            report.line(format!("remark: not run ({e})"));
            report.field("remark", json!({ "error": e.to_string() }));
            None
        }
    };
    let agree = borel.verdict == direct && remark_verdict.is_none_or(|v| v == direct);
    report.line(if agree { "AGREE" } else { "DISAGREE" });

    let steps: Vec<Value> = borel
        .steps
        .iter()
        .map(|s| {
            let branch = match &s.branch {
                Some(Branch::Finite(w)) => json!({ "finite": w.to_string() }),
                Some(Branch::Infinite) => json!("infinite"),
                None => Value::Null,
            };
            json!({ "index": s.index, "formula": s.formula.to_string(), "branch": branch })
        })
        .collect();
    report.field("e_equiv", json!(direct));
    report.field("borel", json!(borel.verdict));
    report.field("steps", Value::Array(steps));
    report.field("agree", json!(agree));
    report.exit = match (agree, direct) {
        (false, _) => 2,
        (true, true) => 0,
        (true, false) => 1,
    };
    Ok(report)
}

fn normal_form_sets(max_prefix: usize, max_cycle: usize) -> Vec<PeriodicSet> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for p in 0..=max_prefix {
        for c in 1..=max_cycle {
            for bits in 0u32..1 << (p + c) {
                let b: Vec<bool> = (0..p + c).map(|i| bits >> i & 1 == 1).collect();
                let set = PeriodicSet::new(b[..p].to_vec(), b[p..].to_vec()).expect("cycle is nonempty");
                if seen.insert(set.clone()) {
                    out.push(set);
                }
            }
        }
    }
    out
}

pub fn vaught_demo(max_prefix: usize, max_cycle: usize, parallel: bool) -> CliResult<Report> {
    if max_cycle == 0 || max_prefix > 10 || max_cycle > 6 {
        return Err(CliError("bounds must satisfy prefix <= 10 and 1 <= cycle <= 6".into()));
    }
    let sig = Signature::new([("R", 1)], false)?;
    let a = FormulaSet::parse_lines(sig.clone(), "R(v0)\n~R(v0)\n")?;
    let structures: Vec<Structure> = normal_form_sets(max_prefix, max_cycle)
        .into_iter()
        .map(|s| PeriodicUnaryStructure::new(sig.clone(), [("R", s)]).map(Structure::from))
        .collect::<Result<_, _>>()?;
    let budget = budget_from_env()?;

    let row = |i: usize| -> CliResult<Vec<String>> {
        let mut bad = Vec::new();
        for j in 0..structures.len() {
            let iso = isomorphic_with_budget(&structures[i], &structures[j], budget)?.verdict;
            let equiv = e_equiv(&structures[i], &structures[j], &a)?.verdict;
            if iso != equiv {
                bad.push(format!("#{i} vs #{j}: iso {iso}, E_A {equiv}"));
            }
        }
        Ok(bad)
    };
    let rows: Vec<CliResult<Vec<String>>> = if parallel {
        (0..structures.len()).into_par_iter().map(row).collect()
    } else {
        (0..structures.len()).map(row).collect()
    };
    let mut violations = Vec::new();
    for r in rows {
        violations.extend(r?);
    }

    let mut census: Vec<((Count, Count), Vec<usize>)> = Vec::new();
    for (i, s) in structures.iter().enumerate() {
        let r = s.as_periodic().expect("periodic").set(0).cardinality();
        let key = (r, s.as_periodic().expect("periodic").set(0).complement().cardinality());
        match census.iter_mut().find(|(k, _)| *k == key) {
            Some((_, members)) => members.push(i),
            None => census.push((key, vec![i])),
        }
    }

    let mut report = Report::new("vaught-demo");
    let k = structures.len();
    report.line(format!(
        "{k} normal-form structures (prefix <= {max_prefix}, cycle <= {max_cycle}), {} pairs, {} violations",
        k * k,
        violations.len()
    ));
    let mut classes = Vec::new();
    for ((r, not_r), members) in &census {
        let (x, y) = (members[0], *members.get(1).unwrap_or(&members[0]));
        let theta = match isomorphic_with_budget(&structures[x], &structures[y], budget)?.witness {
            Some(Witness::Isomorphism(p)) => Some(p),
            _ => None,
        };
        let set = |i: usize| structures[i].as_periodic().expect("periodic").set(0).to_string();
        report.line(format!(
            "(|R|, |~R|) = ({r}, {not_r}): {} structures; theta for R = {} and R = {}: {}",
            members.len(),
            set(x),
            set(y),
            theta.as_ref().map_or("none".to_string(), |p| p.to_string())
        ));
        classes.push(json!({
            "key": [count_json(*r), count_json(*not_r)],
            "size": members.len(),
            "pair": [set(x), set(y)],
            "theta": theta.as_ref().map(permutation_json),
        }));
    }
    for v in violations.iter().take(10) {
        report.line(format!("violation {v}"));
    }
    report.field("structures", json!(k));
    report.field("pairs", json!(k * k));
    report.field("violations", json!(violations));
    report.field("classes", Value::Array(classes));
    report.exit = if violations.is_empty() { 0 } else { 1 };
    Ok(report)
}
