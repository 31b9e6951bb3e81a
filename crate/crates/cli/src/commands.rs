use std::path::Path;

use anyhow::{bail, Context, Result};
use gfmi::catalog::{self, NamedInvariant};
use gfmi::discovery::{self, EnumerationSpec};
use gfmi::harness::{self, Descriptor};
use gfmi::independence::{self, MomentVariableSpace};
use gfmi::moments::{central_moments, raw_moments, MomentVector};
use gfmi::{Group, MomentPolynomial, WeightedPointSet};
use serde::Serialize;
use serde_json::{json, Value};

use crate::{Cli, Command};

pub struct Outcome {
    pub value: Value,
    pub table: String,
    pub pass: bool,
    pub summary: String,
}

impl Outcome {
    fn ok(value: Value, table: String) -> Self {
        Self {
            value,
            table,
            pass: true,
            summary: String::new(),
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Moments { input, max_order } => moments(input, *max_order),
        Command::Invariants { input, set, group } => invariants(input, set, *group),
        Command::Verify {
            relations,
            catalog,
            invariance,
            group,
            input,
            transforms,
        } => {
            let none = !(*relations || *catalog || *invariance);
            verify(
                VerifyScope {
                    relations: *relations || none,
                    catalog: *catalog || none,
                    invariance: *invariance,
                },
                *group,
                input.as_deref(),
                *transforms,
                cli.seed,
                cli.tol,
            )
        }
        Command::Independence {
            set,
            group,
            order,
            trials,
            require_independent,
        } => independence(set, *group, *order, *trials, cli.seed, *require_independent),
        Command::Discover {
            group,
            order,
            degree,
            max_factors,
            target,
            budget,
            allow_skew,
        } => {
            let mut spec = EnumerationSpec::new(*group, *degree, *order);
            if let Some(m) = max_factors {
                spec.max_factors = *m;
            }
            spec.budget = *budget;
            spec.require_true_invariants = !allow_skew;
            discover(&spec, *target, cli.seed)
        }
    }
}

fn load(path: &Path) -> Result<WeightedPointSet> {
    Ok(gfmi::io::load_shape(path)?)
}

fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(headers.to_vec());
    out += &line(
        widths
            .iter()
            .map(|w| "-".repeat(*w))
            .collect::<Vec<_>>()
            .iter()
            .map(String::as_str)
            .collect(),
    );
    for row in rows {
        out += &line(row.iter().map(String::as_str).collect());
    }
    out
}

fn moment_entries(mv: &MomentVector, prefix: &str) -> Vec<Value> {
    mv.iter()
        .map(|(idx, v)| {
            json!({
                "moment": format!("{prefix}{}", &idx.to_string()[2..]),
                "exponents": idx.exps(),
                "value": v,
            })
        })
        .collect()
}

fn moments(input: &Path, max_order: usize) -> Result<Outcome> {
    let ps = load(input)?;
    let raw = raw_moments(&ps, max_order)?;
    let central = central_moments(&ps, max_order)?;
    let value = json!({
        "input": input.display().to_string(),
        "dim": ps.dim(),
        "points": ps.len(),
        "max_order": max_order,
        "raw": moment_entries(&raw, "m"),
        "central": moment_entries(&central, "mu"),
    });
    let rows: Vec<Vec<String>> = raw
        .iter()
        .zip(central.iter())
        .map(|((idx, r), (_, c))| {
            vec![
                idx.exps()
                    .iter()
                    .map(u8::to_string)
                    .collect::<Vec<_>>()
                    .join(""),
                format!("{r:.16e}"),
                format!("{c:.16e}"),
            ]
        })
        .collect();
    Ok(Outcome::ok(
        value,
        table(&["index", "raw", "central"], &rows),
    ))
}

fn named_set(set: &str) -> Result<Vec<&'static NamedInvariant>> {
    if let Some(entries) = catalog::descriptor_set(set) {
        return Ok(entries);
    }
    set.split(',')
        .map(|name| {
            catalog::find(name.trim())
                .with_context(|| format!("unknown invariant or set `{}`", name.trim()))
        })
        .collect()
}

fn set_group(entries: &[&NamedInvariant]) -> Result<Group> {
    let group = entries.first().context("empty invariant set")?.group;
    if entries.iter().any(|e| e.group != group) {
        bail!("invariant set mixes groups");
    }
    Ok(group)
}

#[derive(Serialize)]
struct InvariantValue {
    name: String,
    value: f64,
    k: u32,
    skew: bool,
}

fn invariants(input: &Path, set: &str, group: Option<Group>) -> Result<Outcome> {
    let entries = catalog::descriptor_set(set).with_context(|| {
        format!("unknown descriptor set `{set}` (expected hu, pi, affine19 or 3d)")
    })?;
    let set_group = set_group(&entries)?;
    if let Some(g) = group {
        if g != set_group {
            bail!("set `{set}` belongs to the {set_group} group, not {g}");
        }
    }
    let ps = load(input)?;
    if ps.dim() != entries[0].dim() {
        return Err(gfmi::Error::DimensionMismatch {
            expected: entries[0].dim(),
            found: ps.dim(),
        }
        .into());
    }
    let values = entries
        .iter()
        .map(|e| {
            Ok(InvariantValue {
                name: e.name.clone(),
                value: Descriptor::from(*e).value(&ps)?,
                k: e.k,
                skew: e.skew,
            })
        })
        .collect::<Result<Vec<_>, gfmi::Error>>()?;
    let rows: Vec<Vec<String>> = values
        .iter()
        .map(|v| {
            vec![
                v.name.clone(),
                format!("{:.16e}", v.value),
                v.k.to_string(),
                if v.skew { "skew".into() } else { String::new() },
            ]
        })
        .collect();
    let value = json!({
        "input": input.display().to_string(),
        "set": set.to_ascii_lowercase(),
        "group": set_group,
        "invariants": values,
    });
    Ok(Outcome::ok(
        value,
        table(&["name", "value", "k", ""], &rows),
    ))
}

struct VerifyScope {
    relations: bool,
    catalog: bool,
    invariance: bool,
}

fn default_tol(group: Group) -> f64 {
    match group {
        Group::Affine => 1e-6,
        _ => 1e-8,
    }
}

const PARITY_TOL: f64 = 1e-9;

fn verify(
    scope: VerifyScope,
    group: Option<Group>,
    input: Option<&Path>,
    transforms: usize,
    seed: u64,
    tol: Option<f64>,
) -> Result<Outcome> {
    let groups: Vec<Group> = match group {
        Some(g) => vec![g],
        None => vec![Group::Similarity, Group::Affine, Group::Rotation3D],
    };
    let shape = input.map(load).transpose()?;
    let mut value = serde_json::Map::new();
    let mut rows = Vec::new();
    let mut failures = Vec::new();

    if scope.relations {
        let checks = catalog::verify_relations();
        for c in &checks {
            rows.push(vec![
                "relation".into(),
                c.relation.clone(),
                pass_str(c.holds),
            ]);
            if !c.holds {
                failures.push(c.relation.clone());
            }
        }
        value.insert("relations".into(), serde_json::to_value(&checks)?);
    }
    if scope.catalog {
        let mut all = Vec::new();
        for &g in &groups {
            for c in catalog::verify_catalog(g) {
                let detail = match &c.scalar {
                    Some(s) => format!("{} (scalar {s})", c.name),
                    None => c.name.clone(),
                };
                rows.push(vec!["catalog".into(), detail, pass_str(c.passed())]);
                if !c.passed() {
                    failures.push(c.name.clone());
                }
                all.push(c);
            }
        }
        value.insert("catalog".into(), serde_json::to_value(&all)?);
    }
    if scope.invariance {
        let mut campaigns = Vec::new();
        let mut parity = Vec::new();
        for &g in &groups {
            let dim = if g == Group::Rotation3D { 3 } else { 2 };
            let ps = match &shape {
                Some(ps) if ps.dim() == dim => ps.clone(),
                Some(_) if group.is_some() => bail!("input dimension does not match the {g} group"),
                Some(_) => continue,
                None => harness::random_pointset(dim, if dim == 3 { 30 } else { 20 }, seed)?,
            };
            for e in catalog::get_catalog(g) {
                let d = Descriptor::from(e);
                if e.skew {
                    continue;
                }
                let r = harness::invariance_check(
                    &d,
                    &ps,
                    transforms,
                    seed,
                    tol.unwrap_or(default_tol(g)),
                )?;
                rows.push(vec![
                    "invariance".into(),
                    format!("{} (max rel err {:.3e})", r.invariant, r.max_rel_err),
                    pass_str(r.pass),
                ]);
                if !r.pass {
                    failures.push(format!("{} invariance", r.invariant));
                }
                campaigns.push(r);
            }
            if g == Group::Similarity {
                for e in catalog::get_catalog(g) {
                    let r = harness::reflection_check(&e.into(), &ps, tol.unwrap_or(PARITY_TOL))?;
                    rows.push(vec![
                        "parity".into(),
                        format!("{} (sign {:+})", r.invariant, r.expected_sign),
                        pass_str(r.pass),
                    ]);
                    if !r.pass {
                        failures.push(format!("{} parity", r.invariant));
                    }
                    parity.push(r);
                }
            }
        }
        value.insert("invariance".into(), serde_json::to_value(&campaigns)?);
        value.insert("parity".into(), serde_json::to_value(&parity)?);
    }
    let pass = failures.is_empty();
    value.insert("pass".into(), Value::Bool(pass));
    Ok(Outcome {
        value: Value::Object(value),
        table: table(&["check", "subject", "result"], &rows),
        pass,
        summary: failures.join(", "),
    })
}

fn pass_str(ok: bool) -> String {
    if ok { "pass" } else { "FAIL" }.to_string()
}

fn independence(
    set: &str,
    group: Option<Group>,
    order: Option<usize>,
    trials: usize,
    seed: u64,
    require_independent: bool,
) -> Result<Outcome> {
    if trials == 0 {
        bail!("--trials must be at least 1");
    }
    let entries = named_set(set)?;
    let group = match group {
        Some(g) => g,
        None => set_group(&entries)?,
    };
    let named: Vec<(String, MomentPolynomial)> = entries
        .iter()
        .map(|e| (e.name.clone(), e.reference.clone()))
        .collect();
    let order = order.unwrap_or_else(|| {
        named
            .iter()
            .map(|(_, p)| p.order())
            .max()
            .unwrap_or(2)
            .max(2)
    });
    let space = MomentVariableSpace::new(group, order)?;
    let report = independence::independence_report(&named, &space, trials, seed)?;
    let rows = vec![
        vec!["set".into(), report.set.join(" ")],
        vec!["variables".into(), report.space.variables.len().to_string()],
        vec!["rank".into(), report.rank.to_string()],
        vec!["kept".into(), report.kept.join(" ")],
        vec![
            "dropped".into(),
            report
                .dropped
                .iter()
                .map(|d| d.name.as_str())
                .collect::<Vec<_>>()
                .join(" "),
        ],
    ];
    let pass = !require_independent || report.independent;
    let summary = format!("rank {} for {} invariants", report.rank, report.set.len());
    Ok(Outcome {
        value: serde_json::to_value(&report)?,
        table: table(&["field", "value"], &rows),
        pass,
        summary,
    })
}

fn discover(spec: &EnumerationSpec, target: Option<usize>, seed: u64) -> Result<Outcome> {
    spec.validate()?;
    let target = match target {
        Some(t) => t,
        None => {
            MomentVariableSpace::new(spec.group, spec.max_count.max(2))?.max_independent_count()
        }
    };
    let report = discovery::discover(spec, target, seed)?;
    let rows: Vec<Vec<String>> = report
        .selected
        .iter()
        .map(|d| {
            vec![
                d.core.clone(),
                d.order.to_string(),
                d.degree.to_string(),
                d.terms.to_string(),
                d.k.to_string(),
            ]
        })
        .collect();
    let mut text = table(&["core", "order", "degree", "terms", "k"], &rows);
    let c = &report.counts;
    text += &format!(
        "\nenumerated {} (raw {}), zero {}, duplicate {}, skew {}, dependent {}, selected {}/{}{}\n",
        c.enumerated,
        c.raw,
        c.zero,
        c.duplicate,
        c.skew,
        c.dependent,
        c.independent,
        report.target,
        if report.incomplete { " (incomplete)" } else { "" }
    );
    let summary = format!(
        "found {} of {} independent invariants; raise --order or --degree",
        c.independent, report.target
    );
    Ok(Outcome {
        value: serde_json::to_value(&report)?,
        table: text,
        pass: !report.incomplete,
        summary,
    })
}
