//! `suite <config.json>`: a list of audits, each with its expected verdict.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use serde::Deserialize;
use serde_json::json;

use hilbfock::fibration::{emit_surface_model, Catalogue, FiberData};
use hilbfock::taut::Taut;
use hilbfock::verify::{
    audit_chern, audit_purity, audit_relations, boundary_self_intersection, check_multiplicativity,
    equivalence_battery, Mode, SelfIntersectionVerdict, Verdict,
};
use hilbfock::SurfaceModel;

use crate::Format;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    #[serde(default)]
    pub name: Option<String>,
    /// Model name to path, relative to the config file.
    #[serde(default)]
    pub models: BTreeMap<String, String>,
    /// Catalogue of fibers; each emitted model is registered under the fiber name.
    #[serde(default)]
    pub catalogue: Option<String>,
    pub audits: Vec<AuditEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "audit", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AuditEntry {
    Relations {
        model: String,
        max_weight: usize,
        max_index: i64,
        expect: String,
    },
    Purity {
        model: String,
        n: usize,
        expect: String,
    },
    Multiplicativity {
        model: String,
        n: usize,
        mode: String,
        expect: String,
    },
    /// `pass` means no G-component above 2.
    BoundarySelf {
        model: String,
        n: usize,
        expect: String,
    },
    Chern {
        model: String,
        n: usize,
        l: u32,
        expect: String,
    },
    FibrationEquivalence {
        n: usize,
        expect: String,
    },
}

struct Outcome {
    label: String,
    observed: Verdict,
    expected: Verdict,
    /// Items agree with the verdicts predicted from the hypotheses.
    conforms: bool,
    detail: String,
}

impl Outcome {
    fn ok(&self) -> bool {
        self.observed == self.expected && self.conforms
    }
}

pub fn run(config: &Path, format: Format, max_weight: Option<usize>) -> Result<ExitCode> {
    let text = std::fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
    let cfg: SuiteConfig = serde_json::from_str(&text).with_context(|| format!("parsing {}", config.display()))?;
    let base = config.parent().unwrap_or(Path::new("."));
    let cap = max_weight.unwrap_or(crate::TABLE_CAP);

    let mut models: BTreeMap<String, SurfaceModel> = BTreeMap::new();
    for (name, rel) in &cfg.models {
        models.insert(name.clone(), crate::load_model(&base.join(rel))?);
    }
    let mut fibers: Vec<FiberData> = Vec::new();
    if let Some(rel) = &cfg.catalogue {
        let path = base.join(rel);
        let cat: Catalogue = serde_json::from_str(&std::fs::read_to_string(&path)?)
            .with_context(|| format!("parsing catalogue {}", path.display()))?;
        for fd in &cat.fibers {
            let (m, _) = emit_surface_model(fd)?;
            models.entry(fd.name().to_string()).or_insert(m);
        }
        fibers = cat.fibers;
    }
    let engines: BTreeMap<&str, Taut> = models
        .iter()
        .map(|(k, m)| (k.as_str(), Taut::with_cap(m.clone(), cap)))
        .collect();
    let get = |name: &str| {
        engines
            .get(name)
            .ok_or_else(|| anyhow!("suite refers to unknown model {name:?}"))
    };

    let mut outcomes = Vec::new();
    for entry in &cfg.audits {
        let outcome = match entry {
            AuditEntry::Relations {
                model,
                max_weight,
                max_index,
                expect,
            } => {
                let r = audit_relations(get(model)?, *max_weight, *max_index)?;
                Outcome {
                    label: format!("relations {model} weight<={max_weight} index<={max_index}"),
                    observed: r.verdict,
                    expected: Verdict::parse(expect)?,
                    conforms: true,
                    detail: first_witness(&r),
                }
            }
            AuditEntry::Purity { model, n, expect } => {
                let r = audit_purity(get(model)?, *n)?;
                let items: Vec<String> = r.items.iter().map(|i| format!("{}={}", i.name, i.verdict)).collect();
                Outcome {
                    label: format!("purity {model} n={n}"),
                    observed: r.verdict,
                    conforms: r.conforms,
                    expected: Verdict::parse(expect)?,
                    detail: [items.join(", "), first_witness(&r)]
                        .into_iter()
                        .filter(|s| !s.is_empty())
                        .collect::<Vec<_>>()
                        .join("; "),
                }
            }
            AuditEntry::Multiplicativity { model, n, mode, expect } => {
                let r = check_multiplicativity(get(model)?, *n, Mode::parse(mode)?)?;
                Outcome {
                    label: format!("multiplicativity {model} n={n} {mode}"),
                    observed: r.verdict,
                    expected: Verdict::parse(expect)?,
                    conforms: true,
                    detail: first_witness(&r),
                }
            }
            AuditEntry::BoundarySelf { model, n, expect } => {
                let b = boundary_self_intersection(get(model)?, *n)?;
                Outcome {
                    label: format!("boundary-self {model} n={n}"),
                    observed: match b.verdict {
                        SelfIntersectionVerdict::Compatible => Verdict::Pass,
                        SelfIntersectionVerdict::Obstructed => Verdict::Fail,
                    },
                    expected: Verdict::parse(expect)?,
                    conforms: true,
                    detail: b.vector,
                }
            }
            AuditEntry::Chern { model, n, l, expect } => {
                let r = audit_chern(get(model)?, *n, *l)?;
                Outcome {
                    label: format!("chern {model} n={n} l={l}"),
                    observed: r.verdict,
                    expected: Verdict::parse(expect)?,
                    conforms: true,
                    detail: first_witness(&r),
                }
            }
            AuditEntry::FibrationEquivalence { n, expect } => {
                let r = equivalence_battery(&fibers, *n)?;
                Outcome {
                    label: format!("fibration-equivalence n={n} ({} fibers)", fibers.len()),
                    observed: r.verdict,
                    expected: Verdict::parse(expect)?,
                    conforms: true,
                    detail: first_witness(&r),
                }
            }
        };
        outcomes.push(outcome);
    }

    let all_ok = outcomes.iter().all(Outcome::ok);
    match format {
        Format::Text => {
            println!("suite {}", cfg.name.as_deref().unwrap_or("(unnamed)"));
            for o in &outcomes {
                let mark = if o.ok() { "ok" } else { "MISMATCH" };
                println!("  {mark:8} {} -> {} (expected {})", o.label, o.observed, o.expected);
                if !o.detail.is_empty() {
                    println!("           {}", o.detail);
                }
            }
            println!(
                "{} of {} audits have their expected verdict",
                outcomes.iter().filter(|o| o.ok()).count(),
                outcomes.len()
            );
        }
        Format::Json => {
            let rows: Vec<_> = outcomes
                .iter()
                .map(|o| {
                    json!({
                        "audit": o.label,
                        "observed": o.observed,
                        "expected": o.expected,
                        "ok": o.ok(),
                        "conforms": o.conforms,
                        "detail": o.detail,
                    })
                })
                .collect();
            let doc = json!({ "suite": cfg.name, "ok": all_ok, "audits": rows });
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
    }
    Ok(if all_ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn first_witness(r: &hilbfock::verify::AuditReport) -> String {
    r.items
        .iter()
        .find_map(|i| i.witnesses.first().map(|w| format!("{}: {} [{}]", i.name, w.observed, w.input)))
        .unwrap_or_default()
}
