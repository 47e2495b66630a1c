//! Command-line front door: single-model audits, model comparisons,
//! lock-box competitions, scenario generation, and specification
//! commitments.
//!
//! Exit codes: 0 = clean, 1 = violations or flags found, 2 = input error,
//! 3 = numerical failure. Reports are JSON with sorted keys; re-running on
//! identical inputs reproduces them byte for byte except the
//! `generated_at` envelope timestamp. Markdown output is rendered from the
//! JSON, never computed separately.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use proxyaudit_core::competition::{commit_model, run_competition, Commitment, Submission};
use proxyaudit_core::data::lockbox::{lockbox_split, LockBoxSplit};
use proxyaudit_core::data::{sha256_hex, ColumnKind, Dataset, Role, Schema};
use proxyaudit_core::glm::{self, ModelSpec};
use proxyaudit_core::proxy::build_proxy_report;
use proxyaudit_core::rules::{
    capped_rule, compare_min_proxy_power, disparate_impact_screen, no_proxy_rule_check,
    CappedMeasurement, Policy,
};
use proxyaudit_core::scenarios::{generate, ScenarioConfig, ScenarioName};
use proxyaudit_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "proxyaudit",
    version,
    about = "Quantifies how facially neutral variables proxy for protected attributes \
             and selects less discriminatory alternative models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Audit one model: substitute checks, proxy-power report, and
    /// disparate-impact screening.
    Audit(AuditArgs),
    /// Compare candidate models (minimum proxy power at equivalent
    /// accuracy) or pre-computed measurements (capped rule).
    Compare(CompareArgs),
    /// Run a pre-committed competition over a submissions directory with a
    /// lock-box holdout.
    Compete(CompeteArgs),
    /// Generate a synthetic scenario dataset with its schema.
    Simulate(SimulateArgs),
    /// Print the commitment digest for a model specification.
    Commit(CommitArgs),
}

#[derive(Args)]
struct OutputArgs {
    /// Report file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Md,
}

#[derive(Args)]
struct AuditArgs {
    /// Dataset CSV.
    #[arg(long)]
    data: PathBuf,
    /// Schema JSON.
    #[arg(long)]
    schema: PathBuf,
    /// Model specification JSON.
    #[arg(long)]
    model: PathBuf,
    /// Policy JSON (band, cap, substitute threshold, protected, weights).
    #[arg(long)]
    policy: Option<PathBuf>,
    /// Protected attribute(s); overrides the policy list. Defaults to every
    /// column the schema marks protected.
    #[arg(long)]
    protected: Vec<String>,
    /// Hold out this fraction of rows as lock-box data for evaluation.
    #[arg(long)]
    lockbox_fraction: Option<f64>,
    /// Split seed; defaults to $PROXYAUDIT_SEED, then 42.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CompareArgs {
    /// Dataset CSV (required when comparing model specifications).
    #[arg(long)]
    data: Option<PathBuf>,
    /// Schema JSON (required when comparing model specifications).
    #[arg(long)]
    schema: Option<PathBuf>,
    /// Model specification or measurement JSON; repeat for each candidate.
    #[arg(long, required = true)]
    model: Vec<PathBuf>,
    /// Policy JSON.
    #[arg(long)]
    policy: Option<PathBuf>,
    /// Protected attribute(s); overrides the policy list.
    #[arg(long)]
    protected: Vec<String>,
    /// Hold out this fraction of rows as lock-box data for evaluation.
    #[arg(long)]
    lockbox_fraction: Option<f64>,
    /// Split seed; defaults to $PROXYAUDIT_SEED, then 42.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CompeteArgs {
    /// Dataset CSV.
    #[arg(long)]
    data: PathBuf,
    /// Schema JSON.
    #[arg(long)]
    schema: PathBuf,
    /// Directory of submissions: one `<party>.json` model specification per
    /// party, with an optional `<party>.commit` commitment sidecar.
    #[arg(long)]
    submissions: PathBuf,
    /// Policy JSON.
    #[arg(long)]
    policy: Option<PathBuf>,
    /// Protected attribute(s); overrides the policy list.
    #[arg(long)]
    protected: Vec<String>,
    /// Held-out fraction for the lock-box split.
    #[arg(long, default_value_t = 0.3)]
    lockbox_fraction: f64,
    /// Split seed; defaults to $PROXYAUDIT_SEED, then 42.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario name: marital_lending, accent_origin, segregated_school,
    /// hiring_major, or digital_footprint.
    #[arg(long)]
    scenario: String,
    /// Rows to generate.
    #[arg(long)]
    n: usize,
    /// Generator seed; defaults to $PROXYAUDIT_SEED, then 42.
    #[arg(long)]
    seed: Option<u64>,
    /// Scenario-specific noise knob (see the scenario documentation).
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    /// Dataset CSV path; the schema lands next to it as
    /// `<stem>.schema.json`. Defaults to `<scenario>.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CommitArgs {
    /// Model specification JSON.
    #[arg(long)]
    model: PathBuf,
    /// Also write the full commitment JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                3
            } else {
                2
            }
        }
    };
    std::process::exit(code);
}

fn run(command: Command) -> Result<i32> {
    match command {
        Command::Audit(args) => audit(args),
        Command::Compare(args) => compare(args),
        Command::Compete(args) => compete(args),
        Command::Simulate(args) => simulate(args),
        Command::Commit(args) => commit(args),
    }
}

// ---------------------------------------------------------------------------
// Subcommands.
// ---------------------------------------------------------------------------

fn audit(args: AuditArgs) -> Result<i32> {
    let mut inputs = BTreeMap::new();
    let d = load_data(&args.data, &args.schema, &mut inputs)?;
    let spec = read_model_spec(&args.model, &mut inputs)?;
    let policy = load_policy(args.policy.as_deref(), &args.protected, &d, &mut inputs)?;
    let seed = resolve_seed(args.seed)?;
    let split = make_split(&d, args.lockbox_fraction, seed)?;

    let mut warnings = Vec::new();

    // Bright-line checks run in-sample on the full data.
    let no_proxy = no_proxy_rule_check(&d, &spec, &policy)?;

    let report = build_proxy_report(
        &d,
        split.as_ref(),
        &spec,
        &policy.protected,
        policy.weights.as_ref(),
    )?;

    // Disparate-impact screening on the model's own selections.
    let fitted = glm::fit(&split_train(&d, &split), &spec)?;
    let eval = split_eval(&d, &split);
    let predictions = glm::predict(&fitted, &eval)?;
    let mut screening = Vec::new();
    if d.schema().outcome()?.kind == ColumnKind::Binary {
        let selected: Vec<bool> = predictions.iter().map(|&p| p >= 0.5).collect();
        for name in &policy.protected {
            let decl = d.column_schema(name)?;
            if decl.kind != ColumnKind::Binary {
                warnings.push(format!(
                    "screening skipped for {name:?}: selection-rate ratios need a binary group"
                ));
                continue;
            }
            let group = eval.binary_as_bool(name)?;
            match disparate_impact_screen(&selected, &group) {
                Ok(s) => screening.push((name.clone(), s)),
                // An undefined ratio (one side selects nobody) is a finding
                // about the data, not a tool failure.
                Err(Error::Degenerate { message }) => {
                    warnings.push(format!("screening inconclusive for {name:?}: {message}"));
                }
                Err(e) => return Err(e),
            }
        }
    } else {
        warnings.push("screening skipped: outcome is not binary".into());
    }

    let violation_count = no_proxy.violations.len();
    let flagged = screening.iter().any(|(_, s)| s.flagged);

    let screening_json: Vec<Value> = screening
        .iter()
        .map(|(name, s)| {
            let mut v = to_value(s);
            v.as_object_mut()
                .expect("screening serializes to an object")
                .insert("protected".into(), json!(name));
            v
        })
        .collect();

    let payload = json!({
        "model": spec.id,
        "proxy_reports": [to_value(&report)],
        "verdicts": [to_value(&no_proxy)],
        "screening": screening_json,
        "lockbox": split.as_ref().map(split_summary),
    });
    emit(
        envelope("audit", inputs, payload, warnings),
        &args.output,
    )?;

    Ok(if violation_count > 0 || flagged { 1 } else { 0 })
}

fn compare(args: CompareArgs) -> Result<i32> {
    let mut inputs = BTreeMap::new();

    // Each --model file is either a full specification or a pre-computed
    // proxy-power measurement; the two kinds cannot be mixed.
    let mut specs: Vec<ModelSpec> = Vec::new();
    let mut measurements: Vec<CappedMeasurement> = Vec::new();
    for path in &args.model {
        let text = read_file(path)?;
        inputs.insert(input_key("model", path), sha256_hex(text.as_bytes()));
        let value: Value = parse_json(path, &text)?;
        if value.get("predictors").is_some() {
            let spec: ModelSpec = from_value(path, value)?;
            spec.validate()?;
            specs.push(spec);
        } else if value.get("semi_partial").is_some() {
            measurements.push(from_value(path, value)?);
        } else {
            return Err(Error::InvalidSpec {
                message: format!(
                    "{} is neither a model specification (predictors) nor a \
                     measurement (semi_partial)",
                    path.display()
                ),
            });
        }
    }
    if !specs.is_empty() && !measurements.is_empty() {
        return Err(Error::InvalidSpec {
            message: "cannot mix model specifications with pre-computed measurements".into(),
        });
    }

    let (verdict, lockbox) = if !measurements.is_empty() {
        let policy = load_policy_only(args.policy.as_deref(), &args.protected, &mut inputs)?;
        (capped_rule(&measurements, &policy)?, None)
    } else {
        let (data, schema) = match (&args.data, &args.schema) {
            (Some(d), Some(s)) => (d, s),
            _ => {
                return Err(Error::InvalidSpec {
                    message: "comparing model specifications requires --data and --schema".into(),
                })
            }
        };
        let d = load_data(data, schema, &mut inputs)?;
        let policy = load_policy(args.policy.as_deref(), &args.protected, &d, &mut inputs)?;
        let seed = resolve_seed(args.seed)?;
        let split = make_split(&d, args.lockbox_fraction, seed)?;
        let verdict = compare_min_proxy_power(&d, split.as_ref(), &specs, &policy)?;
        (verdict, split.as_ref().map(split_summary))
    };

    let flagged = !verdict.violations.is_empty();
    let payload = json!({
        "verdicts": [to_value(&verdict)],
        "lockbox": lockbox,
    });
    emit(envelope("compare", inputs, payload, vec![]), &args.output)?;
    Ok(if flagged { 1 } else { 0 })
}

fn compete(args: CompeteArgs) -> Result<i32> {
    let mut inputs = BTreeMap::new();
    let d = load_data(&args.data, &args.schema, &mut inputs)?;
    let policy = load_policy(args.policy.as_deref(), &args.protected, &d, &mut inputs)?;
    let seed = resolve_seed(args.seed)?;
    let split = lockbox_split(&d, args.lockbox_fraction, seed)?;

    let submissions = read_submissions(&args.submissions, &mut inputs)?;
    let result = run_competition(&d, &split, &submissions, &policy)?;

    let disqualified = !result.disqualified.is_empty();
    let payload = json!({
        "competition": to_value(&result),
        "lockbox": split_summary(&split),
    });
    emit(envelope("compete", inputs, payload, vec![]), &args.output)?;
    Ok(if disqualified { 1 } else { 0 })
}

fn simulate(args: SimulateArgs) -> Result<i32> {
    let name: ScenarioName = args.scenario.parse()?;
    let seed = resolve_seed(args.seed)?;
    let cfg = ScenarioConfig {
        name,
        n: args.n,
        seed,
        noise: args.noise,
    };
    if args.n < 1000 {
        eprintln!(
            "warning: n = {} is small; calibrated rates need larger samples to show",
            args.n
        );
    }
    let d = generate(&cfg)?;

    let csv_path = args
        .out
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", name.as_str())));
    let schema_path = csv_path.with_extension("schema.json");
    write_file(&csv_path, &d.to_csv())?;
    write_file(&schema_path, &d.schema().to_json())?;
    println!("wrote {} ({} rows)", csv_path.display(), d.n_rows());
    println!("wrote {}", schema_path.display());
    Ok(0)
}

fn commit(args: CommitArgs) -> Result<i32> {
    let mut inputs = BTreeMap::new();
    let spec = read_model_spec(&args.model, &mut inputs)?;
    let commitment = commit_model(&spec)?;
    println!("{}", commitment.digest);
    if let Some(out) = &args.out {
        write_file(out, &format!("{}\n", pretty(&to_value(&commitment))))?;
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// Input loading.
// ---------------------------------------------------------------------------

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse {
        what: path.display().to_string(),
        message: e.to_string(),
    })
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).map_err(|e| Error::Parse {
        what: path.display().to_string(),
        message: e.to_string(),
    })
}

fn parse_json(path: &Path, text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        what: path.display().to_string(),
        message: e.to_string(),
    })
}

fn from_value<T: serde::de::DeserializeOwned>(path: &Path, value: Value) -> Result<T> {
    serde_json::from_value(value).map_err(|e| Error::Parse {
        what: path.display().to_string(),
        message: e.to_string(),
    })
}

fn input_key(kind: &str, path: &Path) -> String {
    format!("{kind}:{}", path.display())
}

fn load_data(
    data: &Path,
    schema: &Path,
    inputs: &mut BTreeMap<String, String>,
) -> Result<Dataset> {
    let schema_text = read_file(schema)?;
    inputs.insert(input_key("schema", schema), sha256_hex(schema_text.as_bytes()));
    let schema = Schema::from_json(&schema_text)?;
    let csv = read_file(data)?;
    inputs.insert(input_key("data", data), sha256_hex(csv.as_bytes()));
    Dataset::from_csv(&csv, &schema)
}

fn read_model_spec(path: &Path, inputs: &mut BTreeMap<String, String>) -> Result<ModelSpec> {
    let text = read_file(path)?;
    inputs.insert(input_key("model", path), sha256_hex(text.as_bytes()));
    let spec: ModelSpec = from_value(path, parse_json(path, &text)?)?;
    spec.validate()?;
    Ok(spec)
}

/// Loads the policy and resolves the protected list: the --protected flags
/// win, then the policy's own list, then every column the schema marks
/// protected.
fn load_policy(
    policy: Option<&Path>,
    protected_flags: &[String],
    d: &Dataset,
    inputs: &mut BTreeMap<String, String>,
) -> Result<Policy> {
    let mut policy = read_policy(policy, inputs)?;
    if !protected_flags.is_empty() {
        policy.protected = protected_flags.to_vec();
    }
    if policy.protected.is_empty() {
        policy.protected = d
            .schema()
            .columns
            .iter()
            .filter(|c| c.role == Role::Protected)
            .map(|c| c.name.clone())
            .collect();
    }
    if policy.protected.is_empty() {
        return Err(Error::InvalidSpec {
            message: "no protected attributes: pass --protected, set them in the policy, \
                      or mark columns protected in the schema"
                .into(),
        });
    }
    Ok(policy)
}

/// Policy loading for paths with no dataset at hand (measurement mode).
fn load_policy_only(
    policy: Option<&Path>,
    protected_flags: &[String],
    inputs: &mut BTreeMap<String, String>,
) -> Result<Policy> {
    let mut policy = read_policy(policy, inputs)?;
    if !protected_flags.is_empty() {
        policy.protected = protected_flags.to_vec();
    }
    Ok(policy)
}

fn read_policy(path: Option<&Path>, inputs: &mut BTreeMap<String, String>) -> Result<Policy> {
    match path {
        Some(p) => {
            let text = read_file(p)?;
            inputs.insert(input_key("policy", p), sha256_hex(text.as_bytes()));
            Policy::from_json(&text)
        }
        None => Ok(Policy::default()),
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("PROXYAUDIT_SEED") {
        Ok(text) => text.parse().map_err(|_| Error::Parse {
            what: "PROXYAUDIT_SEED".into(),
            message: format!("{text:?} is not a 64-bit unsigned seed"),
        }),
        Err(_) => Ok(42),
    }
}

fn make_split(d: &Dataset, fraction: Option<f64>, seed: u64) -> Result<Option<LockBoxSplit>> {
    fraction.map(|f| lockbox_split(d, f, seed)).transpose()
}

fn split_train(d: &Dataset, split: &Option<LockBoxSplit>) -> Dataset {
    match split {
        Some(s) => s.train_set(d),
        None => d.clone(),
    }
}

fn split_eval(d: &Dataset, split: &Option<LockBoxSplit>) -> Dataset {
    match split {
        Some(s) => s.test_set(d),
        None => d.clone(),
    }
}

fn split_summary(split: &LockBoxSplit) -> Value {
    json!({
        "seed": split.seed,
        "test_fraction": split.test_fraction,
        "train_rows": split.train_indices.len(),
        "test_rows": split.test_indices.len(),
        "digest": split.digest,
    })
}

/// Reads a submissions directory: every `*.json` file is one party's model
/// specification (party = file stem), with an optional `<party>.commit`
/// commitment sidecar.
fn read_submissions(
    dir: &Path,
    inputs: &mut BTreeMap<String, String>,
) -> Result<Vec<Submission>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::Parse {
        what: dir.display().to_string(),
        message: e.to_string(),
    })?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().map(|x| x == "json").unwrap_or(false))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::InvalidSpec {
            message: format!("no submission files (*.json) in {}", dir.display()),
        });
    }

    let mut submissions = Vec::new();
    for path in paths {
        let party = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or_default()
            .to_string();
        let text = read_file(&path)?;
        inputs.insert(input_key("submission", &path), sha256_hex(text.as_bytes()));
        let spec: ModelSpec = from_value(&path, parse_json(&path, &text)?)?;
        spec.validate()?;

        let sidecar = path.with_extension("commit");
        let commitment: Option<Commitment> = if sidecar.exists() {
            let text = read_file(&sidecar)?;
            inputs.insert(input_key("commitment", &sidecar), sha256_hex(text.as_bytes()));
            Some(from_value(&sidecar, parse_json(&sidecar, &text)?)?)
        } else {
            None
        };
        submissions.push(Submission {
            party,
            spec,
            commitment,
        });
    }
    Ok(submissions)
}

// ---------------------------------------------------------------------------
// Report emission.
// ---------------------------------------------------------------------------

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report types serialize")
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON renders")
}

/// Wraps a payload in the report envelope. Every map below is a sorted-key
/// map, so the rendering is deterministic; `generated_at` is the one field
/// excluded from that contract.
fn envelope(
    command: &str,
    inputs: BTreeMap<String, String>,
    payload: Value,
    warnings: Vec<String>,
) -> Value {
    let mut map = Map::new();
    map.insert("tool_version".into(), json!(env!("CARGO_PKG_VERSION")));
    map.insert("generated_at".into(), json!(chrono::Utc::now().to_rfc3339()));
    map.insert("command".into(), json!(command));
    map.insert("inputs".into(), to_value(&inputs));
    map.insert("warnings".into(), json!(warnings));
    if let Value::Object(fields) = payload {
        for (k, v) in fields {
            map.insert(k, v);
        }
    }
    Value::Object(map)
}

fn emit(report: Value, output: &OutputArgs) -> Result<()> {
    let rendered = match output.format {
        Format::Json => format!("{}\n", pretty(&report)),
        Format::Md => render_markdown(&report),
    };
    match &output.out {
        Some(path) => write_file(path, &rendered),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// Markdown rendering (derived from the JSON report only).
// ---------------------------------------------------------------------------

fn render_markdown(report: &Value) -> String {
    let mut out = String::from("# Proxy audit report\n\n");
    if let Value::Object(map) = report {
        let scalars: Vec<_> = map.iter().filter(|(_, v)| is_scalar(v)).collect();
        for (k, v) in &scalars {
            out.push_str(&format!("- **{k}**: {}\n", scalar(v)));
        }
        if !scalars.is_empty() {
            out.push('\n');
        }
        for (k, v) in map.iter().filter(|(_, v)| !is_scalar(v)) {
            md_section(k, v, 2, &mut out);
        }
    }
    out
}

fn md_section(key: &str, v: &Value, depth: usize, out: &mut String) {
    let hashes = "#".repeat(depth.min(6));
    match v {
        Value::Object(map) => {
            out.push_str(&format!("{hashes} {key}\n\n"));
            for (k, x) in map.iter().filter(|(_, x)| is_scalar(x)) {
                out.push_str(&format!("- **{k}**: {}\n", scalar(x)));
            }
            if map.values().any(is_scalar) {
                out.push('\n');
            }
            for (k, x) in map.iter().filter(|(_, x)| !is_scalar(x)) {
                md_section(k, x, depth + 1, out);
            }
        }
        Value::Array(items) if items.is_empty() => {
            out.push_str(&format!("{hashes} {key}\n\n_none_\n\n"));
        }
        Value::Array(items) if table_shaped(items) => {
            out.push_str(&format!("{hashes} {key}\n\n"));
            md_table(items, out);
        }
        Value::Array(items) if items.iter().all(is_scalar) => {
            let row: Vec<String> = items.iter().map(scalar).collect();
            out.push_str(&format!("{hashes} {key}\n\n{}\n\n", row.join(", ")));
        }
        Value::Array(items) => {
            out.push_str(&format!("{hashes} {key}\n\n"));
            for (i, item) in items.iter().enumerate() {
                md_section(&format!("{key} {}", i + 1), item, depth + 1, out);
            }
        }
        scalar_value => {
            out.push_str(&format!("{hashes} {key}\n\n{}\n\n", scalar(scalar_value)));
        }
    }
}

/// True when every element is an object of scalars over one shared key set.
fn table_shaped(items: &[Value]) -> bool {
    let Some(Value::Object(first)) = items.first() else {
        return false;
    };
    let keys: Vec<&String> = first.keys().collect();
    items.iter().all(|item| match item {
        Value::Object(map) => {
            map.keys().collect::<Vec<_>>() == keys && map.values().all(is_scalar)
        }
        _ => false,
    })
}

fn md_table(items: &[Value], out: &mut String) {
    let Some(Value::Object(first)) = items.first() else {
        return;
    };
    let keys: Vec<&String> = first.keys().collect();
    out.push_str(&format!("| {} |\n", keys.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(" | ")));
    out.push_str(&format!("|{}\n", "---|".repeat(keys.len())));
    for item in items {
        if let Value::Object(map) = item {
            let cells: Vec<String> = keys.iter().map(|k| scalar(&map[k.as_str()])).collect();
            out.push_str(&format!("| {} |\n", cells.join(" | ")));
        }
    }
    out.push('\n');
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Object(_) | Value::Array(_))
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "—".into(),
        other => other.to_string(),
    }
}
