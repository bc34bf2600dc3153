//! `bellmono`: batch front end over the scenario, functional and behavior
//! documents.
//!
//! Exit codes: 0 on success, 1 on a domain error, 2 on a usage error
//! (bad flags, unreadable or malformed documents, bad literals).

mod value;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bell_monogamy::bounds;
use bell_monogamy::cloning::{self, CloningReport, ValueSource};
use bell_monogamy::document::{self, Document};
use bell_monogamy::fixtures::{self, Fixture};
use bell_monogamy::monogamy;
use bell_monogamy::multipartite::{flatten_behavior, flatten_bipartition, Bipartition};
use bell_monogamy::rational::{format_decimal, format_rational, format_report, Rational};
use bell_monogamy::{Behavior, BellFunctional, Error, Form, LhvModel, Scenario};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

const FIXTURE_SCHEME: &str = "fixtures:";
const DEFAULT_WITNESS: &str = "monogamy-witness.json";

#[derive(Parser)]
#[command(name = "bellmono", version)]
#[command(about = "Exact Bell bounds and monogamy relations for no-signaling behaviors")]
struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    /// Write the produced document (or witness behavior) to this path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    JsonDocument,
}

/// Sources are `fixtures:<name>` or a path to a JSON document.
#[derive(Subcommand)]
enum Command {
    /// Parse a document and check its invariants.
    Validate { source: String },
    /// Value of a functional on a behavior.
    Evaluate { functional: String, behavior: String },
    /// Rewrite a functional with non-negative coefficients.
    Normalize { functional: String },
    /// Expand correlator terms into probability form.
    Expand { functional: String },
    /// Exact local bound by strategy enumeration.
    LocalBound { functional: String },
    /// Exact no-signaling bound by linear programming.
    NsBound { functional: String },
    /// Seeded random no-signaling behavior.
    Sample {
        /// Scenario, functional or behavior whose scenario is sampled.
        source: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of polytope vertices mixed together.
        #[arg(long, default_value_t = 1)]
        mix: usize,
    },
    /// Sum of pair values of a behavior on the extended scenario.
    MonogamyCheck { functional: String, behavior: String },
    /// Maximum of the monogamy sum over the extended no-signaling polytope.
    MonogamyLp { functional: String },
    /// Local model for the fixed-settings slice of a chained expression.
    LhvReconstruct {
        functional: String,
        behavior: String,
        /// Chain index, 1-based.
        #[arg(long, default_value_t = 1)]
        chain: usize,
    },
    /// Two-party flattening of a functional or behavior.
    Flatten {
        source: String,
        /// Parties on the first side; the rest form the second.
        #[arg(long, value_delimiter = ',', required = true)]
        cut: Vec<usize>,
    },
    /// Bound on the mean shrinking factor of 1 -> n cloning.
    CloneBound {
        functional: String,
        /// Value before cloning, e.g. `2*sqrt2`.
        #[arg(long, allow_hyphen_values = true)]
        base: String,
        /// Values between Alice and each clone; defaults to R for every clone.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        clones: Vec<String>,
    },
    /// List the built-in fixtures or print one.
    Fixtures { name: Option<String> },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("{0}")]
    Domain(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Document { .. } | Error::Parse(_) => CliError::Usage(e.to_string()),
            e => CliError::Domain(e),
        }
    }
}

impl From<value::ValueError> for CliError {
    fn from(e: value::ValueError) -> Self {
        CliError::Usage(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Err(e @ CliError::Usage(_)) => {
            eprintln!("bellmono: {e}");
            ExitCode::from(2)
        }
        Err(e @ CliError::Domain(_)) => {
            eprintln!("bellmono: {e}");
            ExitCode::from(1)
        }
    }
}

fn load(source: &str) -> CliResult<Document> {
    if let Some(name) = source.strip_prefix(FIXTURE_SCHEME) {
        return match fixtures::by_name(name) {
            Some(Fixture::Scenario(s)) => Ok(Document::Scenario(s)),
            Some(Fixture::Functional(f)) => Ok(Document::Functional(f)),
            Some(Fixture::Behavior(p)) => Ok(Document::Behavior(p)),
            None => Err(CliError::Usage(format!(
                "unknown fixture {name:?}; known: {}",
                fixtures::NAMES.join(", ")
            ))),
        };
    }
    let text = std::fs::read_to_string(source).map_err(|e| CliError::Usage(format!("cannot read {source}: {e}")))?;
    document::parse_document(&text).map_err(|e| CliError::Usage(format!("{source}: {e}")))
}

fn load_functional(source: &str) -> CliResult<BellFunctional> {
    match load(source)? {
        Document::Functional(f) => Ok(f),
        d => Err(CliError::Usage(format!("{source}: expected a functional, found a {}", d.kind()))),
    }
}

fn load_behavior(source: &str) -> CliResult<Behavior> {
    match load(source)? {
        Document::Behavior(p) => Ok(p),
        d => Err(CliError::Usage(format!("{source}: expected a behavior, found a {}", d.kind()))),
    }
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn exact(r: &Rational) -> Value {
    json!({ "exact": format_rational(r), "decimal": format_decimal(r, 12) })
}

fn exact_list(values: &[Rational]) -> Value {
    Value::Array(values.iter().map(exact).collect())
}

fn json_text(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json values always serialize");
    s.push('\n');
    s
}

fn form_name(form: Form) -> &'static str {
    match form {
        Form::Probability => "probability",
        Form::Correlator => "correlator",
    }
}

fn scenario_shape(s: &Scenario) -> String {
    let settings: Vec<usize> = s.parties().iter().map(|p| p.settings).collect();
    let outcomes: Vec<usize> = s.parties().iter().map(|p| p.outcomes).collect();
    format!("{} parties, settings {settings:?}, outcomes {outcomes:?}", s.num_parties())
}

struct Runner<'a> {
    format: OutputFormat,
    out: Option<&'a Path>,
}

impl Runner<'_> {
    fn json(&self) -> bool {
        self.format == OutputFormat::JsonDocument
    }

    /// Emits a produced document: to `--out` if given, else to stdout.
    /// In text mode `summary` precedes it.
    fn document(&self, summary: String, doc: String) -> CliResult<String> {
        match self.out {
            Some(path) => {
                write_file(path, &doc)?;
                if self.json() {
                    Ok(doc)
                } else {
                    Ok(format!("{summary}wrote {}\n", path.display()))
                }
            }
            None if self.json() => Ok(doc),
            None => Ok(format!("{summary}{doc}")),
        }
    }

    /// Writes a witness behavior to `--out`, if given.
    fn witness(&self, p: &Behavior, text: &mut String) -> CliResult<Option<String>> {
        let Some(path) = self.out else { return Ok(None) };
        write_file(path, &document::behavior_to_json(p))?;
        let _ = writeln!(text, "witness: {}", path.display());
        Ok(Some(path.display().to_string()))
    }
}

fn run(cli: &Cli) -> CliResult<String> {
    let r = Runner {
        format: cli.format,
        out: cli.out.as_deref(),
    };
    match &cli.command {
        Command::Validate { source } => validate(&r, source),
        Command::Evaluate { functional, behavior } => {
            let f = load_functional(functional)?;
            let p = load_behavior(behavior)?;
            let v = f.evaluate(&p)?;
            Ok(if r.json() {
                json_text(&json!({ "value": exact(&v) }))
            } else {
                format!("{}\n", format_report(&v))
            })
        }
        Command::Normalize { functional } => {
            let f = load_functional(functional)?;
            let (g, offset) = f.to_probability_form()?.normalize_nonneg()?;
            let summary = format!(
                "offset: {}\nbound: {}\nterms: {}\n",
                format_report(&offset),
                format_report(g.bound()),
                g.num_terms()
            );
            r.document(summary, document::functional_to_json(&g))
        }
        Command::Expand { functional } => {
            let g = load_functional(functional)?.to_probability_form()?;
            let summary = format!("terms: {}\n", g.num_terms());
            r.document(summary, document::functional_to_json(&g))
        }
        Command::LocalBound { functional } => {
            let f = load_functional(functional)?;
            let lb = bounds::local_bound(&f)?;
            let mut text = format!("{}\nstrategy: {:?}\n", format_report(&lb.value), lb.witness.outcomes);
            let path = r.witness(&lb.witness.behavior(f.scenario())?, &mut text)?;
            Ok(if r.json() {
                json_text(&json!({
                    "value": exact(&lb.value),
                    "strategy": lb.witness.outcomes,
                    "witness": path,
                }))
            } else {
                text
            })
        }
        Command::NsBound { functional } => {
            let f = load_functional(functional)?;
            let opt = bounds::ns_bound(&f)?;
            opt.check_certificate()
                .map_err(|e| CliError::Domain(Error::LpStatus(format!("certificate rejected: {e}"))))?;
            let mut text = format!(
                "{}\ncertificate: verified ({} pivots)\n",
                format_report(&opt.value),
                opt.solution.pivots
            );
            let path = r.witness(&opt.witness, &mut text)?;
            Ok(if r.json() {
                json_text(&json!({
                    "value": exact(&opt.value),
                    "certificate": "verified",
                    "pivots": opt.solution.pivots,
                    "witness": path,
                }))
            } else {
                text
            })
        }
        Command::Sample { source, seed, mix } => {
            let scenario = load(source)?.scenario().clone();
            let p = bounds::sample_ns_behavior(&scenario, *seed, *mix)?;
            let summary = format!(
                "no-signaling sample: {}, seed {seed}, mix {mix}\n",
                scenario_shape(&scenario)
            );
            r.document(summary, document::behavior_to_json(&p))
        }
        Command::MonogamyCheck { functional, behavior } => {
            let setup = monogamy::extend_scenario(&load_functional(functional)?)?;
            let report = setup.monogamy_check(&load_behavior(behavior)?)?;
            if r.json() {
                return Ok(json_text(&json!({
                    "per_pair": exact_list(&report.per_pair),
                    "sum": exact(&report.sum),
                    "bound": exact(&report.bound),
                    "holds": report.holds,
                    "nonsignaling": report.signaling.is_none(),
                    "signaling_witness": report.signaling.as_ref().map(|w| w.to_string()),
                })));
            }
            let mut text = String::new();
            for (m, v) in report.per_pair.iter().enumerate() {
                let _ = writeln!(text, "pair {}: {}", m + 1, format_report(v));
            }
            let _ = writeln!(text, "sum: {}", format_report(&report.sum));
            let _ = writeln!(text, "bound: {}", format_report(&report.bound));
            let _ = writeln!(text, "monogamy: {}", if report.holds { "holds" } else { "violated" });
            match &report.signaling {
                None => text.push_str("no-signaling: yes\n"),
                Some(w) => {
                    let _ = writeln!(text, "no-signaling: no, {w}");
                }
            }
            Ok(text)
        }
        Command::MonogamyLp { functional } => {
            let setup = monogamy::extend_scenario(&load_functional(functional)?)?;
            let lp = setup.monogamy_lp_max()?;
            lp.optimum
                .check_certificate()
                .map_err(|e| CliError::Domain(Error::LpStatus(format!("certificate rejected: {e}"))))?;
            let path = r.out.map_or_else(|| PathBuf::from(DEFAULT_WITNESS), Path::to_path_buf);
            write_file(&path, &document::behavior_to_json(&lp.optimum.witness))?;
            if r.json() {
                return Ok(json_text(&json!({
                    "value": exact(&lp.value),
                    "bound": exact(&lp.bound),
                    "tight": lp.is_tight(),
                    "certificate": "verified",
                    "pivots": lp.optimum.solution.pivots,
                    "witness": path.display().to_string(),
                })));
            }
            Ok(format!(
                "{}\nbound n*R: {}\ntight: {}\ncertificate: verified ({} pivots)\nwitness: {}\n",
                format_report(&lp.value),
                format_report(&lp.bound),
                if lp.is_tight() { "yes" } else { "no" },
                lp.optimum.solution.pivots,
                path.display()
            ))
        }
        Command::LhvReconstruct {
            functional,
            behavior,
            chain,
        } => {
            let setup = monogamy::extend_scenario(&load_functional(functional)?)?;
            let p = load_behavior(behavior)?;
            let model = setup.fixed_setting_lhv(&p, *chain)?;
            model.validate()?;
            if model.to_behavior() != setup.fixed_setting_slice(&p, *chain)? {
                return Err(CliError::Domain(Error::Precondition(
                    "local model does not reproduce the slice".into(),
                )));
            }
            let settings = setup.chain_settings(*chain)?;
            let doc = json_text(&lhv_json(&model, *chain, &settings));
            let summary = format!(
                "chain {chain}: Bob settings {settings:?}\nhidden outcomes: {}\nreproduces slice: exact\n",
                model.hidden.len()
            );
            r.document(summary, doc)
        }
        Command::Flatten { source, cut } => {
            let doc = load(source)?;
            let bipartition = Bipartition::from_group(doc.scenario().num_parties(), cut.clone())?;
            let label = format!("cut {:?}|{:?}", bipartition.group_a(), bipartition.group_b());
            match doc {
                Document::Functional(f) => {
                    let (g, _) = flatten_bipartition(&f, &bipartition)?;
                    // The composite party may beat the original bound.
                    let (g, bound_label) = match bounds::local_bound(&g) {
                        Ok(lb) => (g.with_bound(lb.value), "local bound"),
                        Err(Error::TooLarge(_)) => (g, "declared bound (too many strategies to re-derive)"),
                        Err(e) => return Err(e.into()),
                    };
                    let summary = format!(
                        "{label}: {}, {} terms, {} form\n{bound_label}: {}\n",
                        scenario_shape(g.scenario()),
                        g.num_terms(),
                        form_name(g.form()),
                        format_report(g.bound())
                    );
                    r.document(summary, document::functional_to_json(&g))
                }
                Document::Behavior(p) => {
                    let q = flatten_behavior(&p, &bipartition)?;
                    let summary = format!("{label}: {}\n", scenario_shape(q.scenario()));
                    r.document(summary, document::behavior_to_json(&q))
                }
                Document::Scenario(_) => Err(CliError::Usage(format!(
                    "{source}: expected a functional or behavior"
                ))),
            }
        }
        Command::CloneBound {
            functional,
            base,
            clones,
        } => clone_bound(&r, &load_functional(functional)?, base, clones),
        Command::Fixtures { name } => match name {
            None => {
                let mut text = String::new();
                for name in fixtures::NAMES {
                    let doc = load(&format!("{FIXTURE_SCHEME}{name}"))?;
                    let _ = writeln!(text, "{FIXTURE_SCHEME}{name}\t{}", doc.kind());
                }
                Ok(text)
            }
            Some(name) => {
                let doc = load(&format!("{FIXTURE_SCHEME}{}", name.trim_start_matches(FIXTURE_SCHEME)))?;
                r.document(String::new(), doc.to_json())
            }
        },
    }
}

fn validate(r: &Runner, source: &str) -> CliResult<String> {
    let doc = load(source)?;
    let (detail, extra) = match &doc {
        Document::Scenario(s) => (scenario_shape(s), json!({})),
        Document::Functional(f) => (
            format!(
                "{} form, {} terms, bound {}",
                form_name(f.form()),
                f.num_terms(),
                format_report(f.bound())
            ),
            json!({ "form": form_name(f.form()), "terms": f.num_terms(), "bound": exact(f.bound()) }),
        ),
        Document::Behavior(p) => {
            p.validate()?;
            let witness = p.signaling_witness();
            let ns = match &witness {
                None => "no-signaling".to_string(),
                Some(w) => format!("signaling: {w}"),
            };
            (
                format!("{} entries, {ns}", p.table().len()),
                json!({ "nonsignaling": witness.is_none(), "signaling_witness": witness.map(|w| w.to_string()) }),
            )
        }
    };
    Ok(if r.json() {
        let mut v = json!({ "kind": doc.kind(), "valid": true, "scenario": scenario_shape(doc.scenario()) });
        if let (Value::Object(a), Value::Object(b)) = (&mut v, extra) {
            a.extend(b);
        }
        json_text(&v)
    } else {
        format!("valid {}: {detail}\n", doc.kind())
    })
}

fn lhv_json(model: &LhvModel, chain: usize, settings: &[usize]) -> Value {
    let hidden: Vec<Value> = model
        .hidden
        .iter()
        .map(|(b, w)| json!({ "outcomes": b, "weight": format_rational(w) }))
        .collect();
    let responses: Vec<Value> = model
        .responses
        .iter()
        .map(|((b, x), dist)| {
            json!({
                "hidden": b,
                "setting": x,
                "distribution": dist.iter().map(format_rational).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "chain": chain,
        "bob_settings": settings,
        "scenario": model.scenario,
        "hidden": hidden,
        "responses": responses,
    })
}

fn verdict(report: &CloningReport) -> &'static str {
    if report.trivial {
        "trivial bound"
    } else if report.saturated {
        "saturates bound"
    } else if report.holds {
        "within bound"
    } else {
        "exceeds bound"
    }
}

fn clone_json(report: &CloningReport) -> Value {
    json!({
        "form": report.form_note,
        "base": exact(&report.base_value),
        "pair_values": exact_list(&report.pair_values),
        "shrinking_factors": exact_list(&report.etas),
        "mean": exact(&report.mean_eta),
        "bound": exact(&report.bound),
        "trivial": report.trivial,
        "holds": report.holds,
        "saturated": report.saturated,
        "verdict": verdict(report),
    })
}

fn clone_bound(r: &Runner, f: &BellFunctional, base: &str, clones: &[String]) -> CliResult<String> {
    let base = value::parse_value(base)?;
    let clone_values: Vec<Rational> = if clones.is_empty() {
        vec![f.bound().clone(); f.scenario().party(1).settings]
    } else {
        clones.iter().map(|c| value::parse_value(c)).collect::<Result<_, _>>()?
    };
    let sources: Vec<ValueSource> = clone_values.iter().cloned().map(ValueSource::Value).collect();
    let report = cloning::shrinking_factors(f, &ValueSource::Value(base.clone()), &sources)?;
    // The non-negative rewrite shifts every value, so the ratio changes.
    let shifted = if f.is_nonnegative() && f.form() == Form::Probability {
        None
    } else {
        Some(cloning::nonnegative_form_report(f, &base, &clone_values)?)
    };

    if r.json() {
        return Ok(json_text(&json!({
            "report": clone_json(&report),
            "nonnegative_form": shifted.as_ref().map(clone_json),
        })));
    }
    let mut text = format!("{} ({})\n", format_decimal(&report.bound, 12), verdict(&report));
    let _ = writeln!(text, "form: {}", report.form_note);
    let _ = writeln!(text, "bound R/base: {}", format_report(&report.bound));
    let _ = writeln!(text, "mean shrinking factor: {}", format_report(&report.mean_eta));
    for (m, eta) in report.etas.iter().enumerate() {
        let _ = writeln!(text, "clone {}: {}", m + 1, format_report(eta));
    }
    if let Some(s) = shifted {
        let _ = writeln!(
            text,
            "non-negative form: {} ({}), base {}",
            format_decimal(&s.bound, 12),
            verdict(&s),
            format_report(&s.base_value)
        );
    }
    Ok(text)
}

