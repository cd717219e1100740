mod verify;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use bpcalc_core::abloc::{self, CyclicProduct, FGAbelianGroup, InvertedSet};
use bpcalc_core::catfrac::{self, CategoryFile, FiniteCategory, Localization, MorphismClass};
use bpcalc_core::grading::parse_poly;
use bpcalc_core::hopf::{parse_op, Hopf};
use bpcalc_core::report::{CheckRecord, Report};
use bpcalc_core::{Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use verify::{Runner, Target};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_TRUNCATION: u8 = 3;
const EXIT_MALFORMED: u8 = 4;

/// Exact verification of BP operation identities, categories of fractions and abelian localization.
#[derive(Parser)]
#[command(name = "bpcalc", version)]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Config {
    /// Odd prime p
    #[arg(long, global = true, default_value_t = 7, env = "BPCALC_PRIME")]
    prime: u64,
    /// Number of generators v_1..v_N (and t_1..t_N) carried
    #[arg(long, global = true, default_value_t = 4, env = "BPCALC_TRUNCATION")]
    truncation: usize,
    /// Pairing window in units of q = 2(p-1); defaults to 2p+4
    #[arg(long, global = true, env = "BPCALC_DEGREE_BOUND")]
    degree_bound: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text, env = "BPCALC_FORMAT")]
    format: Format,
    /// Write the output here instead of stdout
    #[arg(long, global = true, env = "BPCALC_OUT")]
    out: Option<PathBuf>,
    /// Record per-target runtimes in the report
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification target
    Verify {
        #[arg(value_enum)]
        target: Target,
    },
    /// Apply an operation literal such as `R[1]` or `R[p]R[1] - R[0,1]` to a polynomial in the v_i
    Eval { operation: String, poly: String },
    /// Localize a finitely generated abelian group such as `Z + Z/12`
    LocalizeGroup(LocalizeArgs),
    /// Finite categories described in a text file
    Cat {
        #[command(subcommand)]
        command: CatCommand,
    },
}

#[derive(Args)]
struct LocalizeArgs {
    group: String,
    /// Primes to invert, comma separated
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["local_at", "rationalize"])]
    invert: Vec<u64>,
    /// Invert every prime except these (localization at them)
    #[arg(long, value_delimiter = ',', conflicts_with = "rationalize")]
    local_at: Vec<u64>,
    /// Invert every prime
    #[arg(long)]
    rationalize: bool,
    /// Also build the fraction construction element by element on the torsion subgroup
    #[arg(long)]
    oracle: bool,
    /// Check the arithmetic square for the split (--invert primes | the rest)
    #[arg(long, requires = "invert")]
    square: bool,
}

#[derive(Subcommand)]
enum CatCommand {
    /// Check the fraction conditions for marked classes and monad data
    Check {
        file: PathBuf,
        /// Only this class (default: every class in the file)
        #[arg(long)]
        class: Option<String>,
        /// Monad to check, as FUNCTOR:TRANSFORMATION
        #[arg(long)]
        monad: Vec<String>,
    },
    /// Print the hom-sets of the localization at a marked class
    Localize {
        file: PathBuf,
        #[arg(long)]
        class: String,
        /// Compare every hom-set with the zig-zag enumeration
        #[arg(long)]
        oracle: bool,
    },
}

enum Output {
    Report(Report),
    Value { text: String, json: serde_json::Value, ok: bool },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Truncation { .. } | Error::UnsupportedIndex(_) | Error::Bound(_) => EXIT_TRUNCATION,
        Error::Parse(_) => EXIT_MALFORMED,
        _ => EXIT_USAGE,
    }
}

fn base_config(cfg: &Config, command: &str) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    m.insert("command".into(), command.into());
    m.insert("prime".into(), cfg.prime.to_string());
    m.insert("truncation".into(), cfg.truncation.to_string());
    m
}

fn hopf(cfg: &Config) -> Result<Hopf> {
    if cfg.prime == 2 {
        return Err(Error::Precondition("p must be an odd prime".into()));
    }
    Hopf::new(cfg.prime, cfg.truncation)
}

fn run_verify(cfg: &Config, target: Target) -> Result<Output> {
    let h = hopf(cfg)?;
    let bound = cfg.degree_bound.unwrap_or(2 * cfg.prime + 4);
    let records = Runner::new(&h, bound, cfg.timings).run(target)?;
    let mut config = base_config(cfg, &format!("verify {}", target.name()));
    config.insert("degree_bound".into(), format!("{bound}q"));
    Ok(Output::Report(Report::new(config, records)))
}

fn run_eval(cfg: &Config, operation: &str, poly: &str) -> Result<Output> {
    let h = hopf(cfg)?;
    let op = parse_op(operation, cfg.prime, cfg.truncation)?;
    let x = parse_poly(poly, cfg.prime, cfg.truncation)?;
    let value = h.act(&op, &x)?.to_string();
    Ok(Output::Value {
        json: json!({ "operation": operation, "input": poly, "prime": cfg.prime, "value": value }),
        text: value,
        ok: true,
    })
}

fn inverted_set(args: &LocalizeArgs) -> Result<InvertedSet> {
    if args.rationalize {
        Ok(InvertedSet::rationalize())
    } else if !args.local_at.is_empty() {
        InvertedSet::all_but(args.local_at.iter().copied())
    } else {
        InvertedSet::primes(args.invert.iter().copied())
    }
}

fn run_localize(args: &LocalizeArgs) -> Result<Output> {
    let g: FGAbelianGroup = args.group.parse()?;
    let s = inverted_set(args)?;
    if args.square {
        let records = abloc::arithmetic_square(&g, &args.invert.iter().copied().collect())?;
        let mut config = BTreeMap::new();
        config.insert("command".into(), "localize-group --square".into());
        config.insert("group".into(), g.to_string());
        config.insert("split".into(), format!("{} | rest", s));
        return Ok(Output::Report(Report::new(config, records)));
    }
    let local = abloc::localize(&g, &s);
    let mut json = json!({
        "group": g.to_string(),
        "inverted": s.to_string(),
        "ring": s.ring_name(),
        "result": local.to_string(),
        "s_local": abloc::is_s_local(&g, &s),
    });
    let mut text = local.to_string();
    let mut ok = true;
    if args.oracle {
        // Element-level, so only the torsion subgroup; the rank carries over unchanged.
        let table = CyclicProduct::from_group(&abloc::torsion_subgroup(&g))?;
        let mut built = abloc::fraction_oracle(&table, &s, 1 << 20)?;
        built.rank = g.rank();
        ok = built == local;
        json["oracle"] = json!(built.to_string());
        json["agrees"] = json!(ok);
        text = format!("{text}\nfraction construction on the torsion subgroup: {built} ({})", if ok { "agrees" } else { "DISAGREES" });
    }
    Ok(Output::Value { text, json, ok })
}

fn load(file: &PathBuf) -> Result<CategoryFile> {
    let text = std::fs::read_to_string(file).map_err(|e| Error::Precondition(format!("cannot read {}: {e}", file.display())))?;
    catfrac::parse_category_file(&text)
}

fn run_cat_check(file: &PathBuf, only: Option<&str>, monads: &[String]) -> Result<Output> {
    let cf = load(file)?;
    let mut records = Vec::new();
    let names: Vec<&String> = cf.classes.keys().filter(|n| only.is_none_or(|o| o == n.as_str())).collect();
    if let Some(o) = only {
        cf.class(o)?;
    }
    for name in names {
        let s = &cf.classes[name];
        for mut rec in catfrac::check_fraction_axioms(&cf.category, s).into_iter().chain([catfrac::check_saturation(&cf.category, s)]) {
            rec.id = format!("{name}.{}", rec.id);
            records.push(rec);
        }
    }
    for spec in monads {
        let (e, eta) = spec.split_once(':').ok_or_else(|| Error::Parse(format!("monad {spec:?} is not FUNCTOR:TRANSFORMATION")))?;
        let m = cf.monad(e, eta)?;
        let basic = catfrac::check_monad(&cf.category, &m);
        let passed = basic.iter().all(CheckRecord::passed);
        let mut recs = basic;
        if passed {
            recs.extend(catfrac::verify_universal_props(&cf.category, &m)?);
        }
        for mut rec in recs {
            rec.id = format!("{e}.{}", rec.id);
            records.push(rec);
        }
    }
    let mut config = BTreeMap::new();
    config.insert("command".into(), "cat check".into());
    config.insert("file".into(), file.display().to_string());
    Ok(Output::Report(Report::new(config, records)))
}

fn hom_text(c: &FiniteCategory, loc: &Localization, x: usize, y: usize) -> (String, Vec<Vec<String>>) {
    let hc = loc.hom_classes(x, y);
    let classes: Vec<Vec<String>> = hc.classes.iter().map(|cl| cl.iter().map(|w| w.display(c)).collect()).collect();
    let shown: Vec<String> = classes.iter().map(|cl| format!("{{{}}}", cl.join(", "))).collect();
    (format!("{} -> {}: {} [{}]", c.objects()[x], c.objects()[y], hc.total, shown.join(" ")), classes)
}

fn run_cat_localize(file: &PathBuf, class: &str, oracle: bool) -> Result<Output> {
    let cf = load(file)?;
    let s: &MorphismClass = cf.class(class)?;
    let c = &cf.category;
    let loc = catfrac::localize(c, s)?;
    let n = c.objects().len();
    let mut lines = Vec::new();
    let mut homs = Vec::new();
    let mut ok = true;
    for x in 0..n {
        for y in 0..n {
            let (line, classes) = hom_text(c, &loc, x, y);
            let mut entry = json!({ "source": c.objects()[x], "target": c.objects()[y], "classes": classes });
            let mut line = line;
            if oracle {
                let agree = catfrac::zigzag_oracle(c, s, x, y)? == loc.hom_classes(x, y);
                ok &= agree;
                entry["oracle_agrees"] = json!(agree);
                line.push_str(if agree { "  (zig-zags agree)" } else { "  (zig-zags DISAGREE)" });
            }
            lines.push(line);
            homs.push(entry);
        }
    }
    let inverted = loc.inverted().names(c);
    lines.push(format!("inverted by Q: {}", inverted.join(", ")));
    Ok(Output::Value {
        text: lines.join("\n"),
        json: json!({ "file": file.display().to_string(), "class": class, "hom_sets": homs, "inverted": inverted }),
        ok,
    })
}

fn dispatch(cli: &Cli) -> Result<Output> {
    let cfg = &cli.config;
    match &cli.command {
        Command::Verify { target } => run_verify(cfg, *target),
        Command::Eval { operation, poly } => run_eval(cfg, operation, poly),
        Command::LocalizeGroup(args) => run_localize(args),
        Command::Cat { command: CatCommand::Check { file, class, monad } } => run_cat_check(file, class.as_deref(), monad),
        Command::Cat { command: CatCommand::Localize { file, class, oracle } } => run_cat_localize(file, class, *oracle),
    }
}

fn emit(cfg: &Config, body: &str) -> std::io::Result<()> {
    let body = if body.ends_with('\n') { body.to_string() } else { format!("{body}\n") };
    match &cfg.out {
        Some(path) => std::fs::write(path, body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = match dispatch(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("bpcalc: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let (body, ok) = match (&output, cli.config.format) {
        (Output::Report(r), Format::Json) => (r.to_json(), r.passed()),
        (Output::Report(r), Format::Text) => (r.to_text(), r.passed()),
        (Output::Value { json, ok, .. }, Format::Json) => (serde_json::to_string_pretty(json).expect("value serializes"), *ok),
        (Output::Value { text, ok, .. }, Format::Text) => (text.clone(), *ok),
    };
    if let Err(e) = emit(&cli.config, &body) {
        eprintln!("bpcalc: cannot write output: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}
