use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use hilbfock::exact::format_rational;
use hilbfock::fibration::{analyze, emit_surface_model, FiberData};
use hilbfock::fock::{parse_vector, FockSpace, FockVector, DEFAULT_BASIS_CAP};
use hilbfock::heisenberg::{Heisenberg, OpSpec};
use hilbfock::surface::Side;
use hilbfock::taut::{Taut, TautSpec};
use hilbfock::verify::{
    audit_chern, audit_purity, audit_relations, boundary_self_intersection, check_multiplicativity, describe_gdeg,
    AuditReport, Mode, Verdict,
};
use hilbfock::SurfaceModel;

mod suite;

/// Default weight cap for tables, audits and tautological classes.
const TABLE_CAP: usize = 4;

#[derive(Parser, Debug)]
#[command(name = "hilbfock", version, about = "Exact cohomology of Hilbert schemes of points via Nakajima operators")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Override the weight cap.
    #[arg(long, global = true)]
    max_weight: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Expect {
    Pass,
    Fail,
}

impl From<Expect> for Verdict {
    fn from(e: Expect) -> Verdict {
        match e {
            Expect::Pass => Verdict::Pass,
            Expect::Fail => Verdict::Fail,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Strong,
    Filtration,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum AuditKind {
    Relations,
    Purity,
    Chern,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a surface model file.
    Validate { model: PathBuf },
    /// List the Fock basis of weight n with tri-degrees.
    Basis {
        model: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Apply an operator such as q(2,p), q(-1,a^), L(1,1), del or adq(2,p).
    Apply {
        model: PathBuf,
        #[arg(long)]
        op: String,
        #[arg(long)]
        to: String,
    },
    /// Tautological class α^[n]_l, or its action on a vector.
    Taut {
        model: PathBuf,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        l: u32,
        #[arg(long)]
        n: usize,
        /// Apply to this vector instead of the unit.
        #[arg(long)]
        to: Option<String>,
    },
    /// Full cup-product table of weight n.
    CupTable {
        model: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Multiplicativity of the induced G-decomposition.
    Check {
        model: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, value_enum)]
        expect: Option<Expect>,
    },
    /// Operator audits: relations, purity or Chern classes.
    Audit {
        model: PathBuf,
        #[arg(long, value_enum)]
        kind: AuditKind,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Index bound for the relation audit.
        #[arg(long, default_value_t = 2)]
        max_index: i64,
        /// Degree index for the Chern audit.
        #[arg(long, default_value_t = 2)]
        l: u32,
        #[arg(long, value_enum)]
        expect: Option<Expect>,
    },
    /// Self-intersection of the boundary divisor.
    BoundarySelf {
        model: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Analyze the central fiber of a Hitchin-type fibration.
    FibrationAnalyze { fiber: PathBuf },
    /// Emit the surface model of a fiber.
    FibrationEmit {
        fiber: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a battery of audits from a config file.
    Suite { config: PathBuf },
}

fn load_model(path: &Path) -> Result<SurfaceModel> {
    SurfaceModel::load(path).with_context(|| format!("loading model {}", path.display()))
}

fn engine(model: SurfaceModel, cap: usize) -> Taut {
    Taut::with_cap(model, cap)
}

fn print_report(report: &AuditReport, format: Format) {
    match format {
        Format::Text => println!("{report}"),
        Format::Json => println!("{}", report.to_json()),
    }
}

fn vector_json(m: &SurfaceModel, v: &FockVector) -> serde_json::Value {
    let terms: Vec<_> = v.iter().map(|(w, c)| json!([w.format(m), format_rational(c)])).collect();
    json!({ "vector": v.format(m), "terms": terms })
}

fn verdict_exit(observed: Verdict, expect: Option<Expect>) -> ExitCode {
    match expect {
        Some(e) if Verdict::from(e) != observed => {
            eprintln!("verdict {observed} differs from expected {}", Verdict::from(e));
            ExitCode::from(1)
        }
        _ => ExitCode::SUCCESS,
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let format = cli.format;
    let cap = |default: usize| cli.max_weight.unwrap_or(default);
    match cli.command {
        Command::Validate { model } => {
            let m = load_model(&model)?;
            let r = m.validate();
            match format {
                Format::Text => print!("{r}"),
                Format::Json => println!("{}", serde_json::to_string_pretty(&r)?),
            }
            Ok(if r.is_valid() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Basis { model, n } => {
            let m = load_model(&model)?;
            let space = FockSpace::with_cap(m.into(), cap(DEFAULT_BASIS_CAP));
            let basis = space.basis(n)?;
            let m = space.model();
            match format {
                Format::Text => {
                    println!("weight {n}: dimension {}", basis.len());
                    for (w, t) in basis.words.iter().zip(&basis.tri) {
                        println!("  {t}  {}", w.format(m));
                    }
                }
                Format::Json => {
                    let words: Vec<_> = basis
                        .words
                        .iter()
                        .zip(&basis.tri)
                        .map(|(w, t)| json!({ "word": w.format(m), "tridegree": [t.n, t.d, t.k] }))
                        .collect();
                    let doc = json!({ "model": m.name(), "n": n, "dimension": basis.len(), "words": words });
                    println!("{}", serde_json::to_string_pretty(&doc)?);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Apply { model, op, to } => {
            let m = load_model(&model)?;
            let h = Heisenberg::for_model(m);
            let m = h.model();
            let spec = OpSpec::parse(m, &op)?;
            let v = parse_vector(m, &to)?;
            let out = h.apply(&spec, &v)?;
            match format {
                Format::Text => println!("{}", out.format(m)),
                Format::Json => {
                    let mut doc = vector_json(m, &out);
                    doc["op"] = json!(spec.format(m));
                    doc["input"] = json!(v.format(m));
                    println!("{}", serde_json::to_string_pretty(&doc)?);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Taut { model, alpha, l, n, to } => {
            let m = load_model(&model)?;
            let class = m.parse_class(&alpha)?;
            if class.side != Side::Ordinary {
                bail!("tautological classes take a class in H, got {alpha:?}");
            }
            let class = match class.coords.iter().collect::<Vec<_>>().as_slice() {
                [(i, c)] if c.is_integer() && c.to_integer() == 1.into() => *i,
                _ => bail!("--alpha must be a basis label, got {alpha:?}"),
            };
            let t = engine(m, cap(TABLE_CAP));
            t.heisenberg().space().check_weight(n)?;
            let spec = TautSpec { class, l };
            let m = t.model();
            let out = match to {
                Some(expr) => {
                    let v = parse_vector(m, &expr)?;
                    if v.weight()?.is_some_and(|w| w != n) {
                        bail!("vector {expr:?} does not have weight {n}");
                    }
                    t.taut_component(spec, &v)?
                }
                None => t.taut_class(spec, n)?,
            };
            match format {
                Format::Text => {
                    println!("{}", out.format(m));
                    println!("  {}", describe_gdeg(m, &out));
                }
                Format::Json => {
                    let mut doc = vector_json(m, &out);
                    doc["alpha"] = json!(m.label(class));
                    doc["l"] = json!(l);
                    doc["n"] = json!(n);
                    doc["degree"] = json!(spec.degree_shift(m));
                    println!("{}", serde_json::to_string_pretty(&doc)?);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::CupTable { model, n, output } => {
            let t = engine(load_model(&model)?, cap(TABLE_CAP));
            let table = t.cup_table(n)?;
            let text = table.to_json(t.model());
            match output {
                Some(path) => {
                    std::fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
                    if format == Format::Text {
                        println!("wrote {}x{} table to {}", table.dim(), table.dim(), path.display());
                    }
                }
                None => println!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { model, n, mode, expect } => {
            let t = engine(load_model(&model)?, cap(TABLE_CAP));
            let mode = match mode {
                ModeArg::Strong => Mode::Strong,
                ModeArg::Filtration => Mode::Filtration,
            };
            let report = check_multiplicativity(&t, n, mode)?;
            print_report(&report, format);
            Ok(verdict_exit(report.verdict, expect))
        }
        Command::Audit {
            model,
            kind,
            n,
            max_index,
            l,
            expect,
        } => {
            let t = engine(load_model(&model)?, cap(TABLE_CAP));
            t.heisenberg().space().check_weight(n)?;
            let report = match kind {
                AuditKind::Relations => audit_relations(&t, n, max_index)?,
                AuditKind::Purity => audit_purity(&t, n)?,
                AuditKind::Chern => audit_chern(&t, n, l)?,
            };
            print_report(&report, format);
            Ok(verdict_exit(report.verdict, expect))
        }
        Command::BoundarySelf { model, n } => {
            let t = engine(load_model(&model)?, cap(TABLE_CAP));
            t.heisenberg().space().check_weight(n)?;
            let b = boundary_self_intersection(&t, n)?;
            match format {
                Format::Text => println!("{b}"),
                Format::Json => println!("{}", serde_json::to_string_pretty(&b)?),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::FibrationAnalyze { fiber } => {
            let fd = FiberData::load(&fiber).with_context(|| format!("loading fiber {}", fiber.display()))?;
            let report = analyze(&fd)?;
            match format {
                Format::Text => print!("{report}"),
                Format::Json => println!("{}", serde_json::to_string_pretty(&report)?),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::FibrationEmit { fiber, output } => {
            let fd = FiberData::load(&fiber).with_context(|| format!("loading fiber {}", fiber.display()))?;
            let (m, _) = emit_surface_model(&fd)?;
            let text = m.to_json();
            match output {
                Some(path) => {
                    std::fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
                    if format == Format::Text {
                        println!("wrote model {} to {}", m.name(), path.display());
                    }
                }
                None => println!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Suite { config } => suite::run(&config, format, cli.max_weight),
    }
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("HILB_THREADS") {
        let n: usize = v.parse().with_context(|| format!("HILB_THREADS must be a positive integer, got {v:?}"))?;
        if n == 0 {
            bail!("HILB_THREADS must be a positive integer, got 0");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match init_threads().and_then(|()| run(cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
