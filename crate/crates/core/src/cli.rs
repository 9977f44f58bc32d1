//! The `probtaylor` command line.
//!
//! Exit codes: 0 on success, 1 when `compare --expect-equal` separates the
//! two terms, 2 on usage or input errors.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::bohm::{
    approximants_compatible, btt_to_rbtt_family, correspondence_bounds, eval_btt, parse_btt, pt_approximant,
    term_to_rbht, FamilyBudget, Interval, TermTest,
};
use crate::operational::{head_reductions, reduction_tree};
use crate::resource::{coherent, is_normal, left_reduct, multinomial, normalize, reduce_one};
use crate::syntax::{
    fmt_rational, parse_bag, parse_lambda, parse_resource, parse_term_combination, Combination, Resource, Simple, Term,
};
use crate::taylor::{
    explicit_taylor, explicit_taylor_nf, generic_taylor, taylor_nf, NormalExpansion, TruncationBudget,
};
use crate::tts::{
    bisimilarity, distinguishing_test_search, eval_tts_test, tts_of_terms, State, TreeTransitionSystem, TtsTest,
};

#[derive(Debug, Parser)]
#[command(name = "probtaylor", version, about = "Taylor expansion and Böhm trees of probabilistic λ-terms")]
pub struct Cli {
    #[command(flatten)]
    pub config: Config,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Config {
    /// Largest term kept in truncated expansions.
    #[arg(long, global = true, default_value_t = 12)]
    pub size_bound: usize,
    /// Largest bag kept in truncated expansions.
    #[arg(long, global = true, default_value_t = 4)]
    pub copies: usize,
    /// Head-reduction steps explored per branch.
    #[arg(long, global = true, default_value_t = 32)]
    pub fuel: usize,
    /// Depth of Böhm approximants and of transition systems built from terms.
    #[arg(long, global = true, default_value_t = 3)]
    pub depth: usize,
    #[arg(long, global = true)]
    pub json: bool,
}

impl Config {
    fn budget(&self) -> TruncationBudget {
        TruncationBudget::new(self.size_bound, self.copies)
    }
}

#[derive(Debug, Clone, Copy, Args)]
pub struct Flavour {
    /// Keep choices as tags (the default for `taylor`).
    #[arg(long, conflicts_with = "erased")]
    pub explicit: bool,
    /// Erase tags into coefficients (the default for `taylor-nf`).
    #[arg(long)]
    pub erased: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a λ-term and print it back with its size.
    Parse {
        term: Option<String>,
        /// Parse a resource term instead.
        #[arg(long)]
        resource: bool,
    },
    /// All one-step reducts of a resource combination.
    Reduce { combination: Option<String> },
    /// Normal form of a resource combination, by complete left reduction.
    Normalize { combination: Option<String> },
    /// Whether two resource terms are coherent.
    Coherence { left: String, right: String },
    /// Multinomial coefficient of a resource term or bag.
    Multinomial { term: Option<String> },
    /// Head reduction: resolved branches with their probabilities.
    Run {
        term: Option<String>,
        /// Print the whole reduction tree.
        #[arg(long)]
        trace: bool,
    },
    /// Truncated Taylor expansion.
    Taylor {
        term: Option<String>,
        #[command(flatten)]
        flavour: Flavour,
    },
    /// Truncated normal form of the Taylor expansion, with its residual.
    TaylorNf {
        term: Option<String>,
        #[command(flatten)]
        flavour: Flavour,
    },
    /// Böhm approximant of the given depth.
    Bohm { term: Option<String> },
    /// Success probability of a Böhm test.
    Test {
        term: Option<String>,
        #[arg(long)]
        btt: String,
    },
    /// Tree transition systems.
    Tts {
        #[command(subcommand)]
        command: TtsCommand,
    },
    /// Compare two terms by expansion, approximants and tests.
    Compare {
        left: String,
        right: String,
        /// Exit with 1 if the terms are found to differ.
        #[arg(long)]
        expect_equal: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum TtsCommand {
    /// Bisimilarity classes of a system read from a file or stdin.
    Bisim { file: Option<PathBuf> },
    /// Evaluate a test on states, or search for one separating two states.
    Test {
        file: PathBuf,
        #[arg(long)]
        state: String,
        /// Test to evaluate; without it, search for a test separating
        /// `--state` from `--against`.
        #[arg(long)]
        test: Option<String>,
        #[arg(long)]
        against: Option<String>,
    },
    /// The Böhm-tree system unfolded from terms.
    FromTerms {
        #[arg(required = true)]
        terms: Vec<String>,
    },
}

/// Runs the command line on `args` (program name first), reading omitted
/// inputs from `stdin`. Returns the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match execute(&cli, stdin) {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

type Outcome = Result<(String, i32), String>;

fn input(arg: &Option<String>, stdin: &mut dyn Read) -> Result<String, String> {
    match arg {
        Some(s) => Ok(s.clone()),
        None => {
            let mut buf = String::new();
            stdin.read_to_string(&mut buf).map_err(|e| e.to_string())?;
            Ok(buf.trim().to_string())
        }
    }
}

fn lambda(text: &str) -> Result<Term, String> {
    parse_lambda(text).map_err(|e| e.to_string())
}

fn resource_combination(text: &str) -> Result<Combination<Resource>, String> {
    parse_term_combination(text).or_else(|_| parse_resource(text).map(Combination::unit)).map_err(|e| e.to_string())
}

fn emit(cfg: &Config, value: Value, pretty: String) -> Outcome {
    if cfg.json {
        Ok((format!("{}\n", serde_json::to_string_pretty(&value).expect("serializable")), 0))
    } else {
        Ok((pretty, 0))
    }
}

fn interval_json(i: &Interval) -> Value {
    json!({ "lower": fmt_rational(&i.lower), "upper": fmt_rational(&i.upper) })
}

fn nf_json(nf: &NormalExpansion) -> Value {
    json!({ "terms": nf.terms.to_json(), "residual": fmt_rational(&nf.residual) })
}

fn nf_pretty(nf: &NormalExpansion) -> String {
    let mut s = String::new();
    for (t, c) in nf.terms.iter() {
        s.push_str(&format!("{}  {t}\n", fmt_rational(c)));
    }
    if nf.terms.is_zero() {
        s.push_str("0\n");
    }
    s.push_str(&format!("residual {}\n", fmt_rational(&nf.residual)));
    s
}

fn execute(cli: &Cli, stdin: &mut dyn Read) -> Outcome {
    let cfg = &cli.config;
    match &cli.command {
        Command::Parse { term, resource } => {
            let text = input(term, stdin)?;
            if *resource {
                let s = parse_resource(&text).map_err(|e| e.to_string())?;
                let v = json!({ "command": "parse", "term": s.to_string(), "size": s.size() });
                emit(cfg, v, format!("{s}\nsize {}\n", s.size()))
            } else {
                let m = lambda(&text)?;
                let v = json!({ "command": "parse", "term": m.to_string(), "size": m.size() });
                emit(cfg, v, format!("{m}\nsize {}\n", m.size()))
            }
        }
        Command::Reduce { combination } => {
            let s = resource_combination(&input(combination, stdin)?)?;
            let reducts = reduce_one(&s);
            let pretty = if reducts.is_empty() {
                "normal\n".to_string()
            } else {
                reducts.iter().map(|r| format!("{r}\n")).collect()
            };
            let v =
                json!({ "command": "reduce", "reducts": reducts.iter().map(Combination::to_json).collect::<Vec<_>>() });
            emit(cfg, v, pretty)
        }
        Command::Normalize { combination } => {
            let s = resource_combination(&input(combination, stdin)?)?;
            let nf = normalize(&s);
            let mut steps = 0;
            let mut cur = s.clone();
            while cur != nf {
                cur = left_reduct(&cur);
                steps += 1;
            }
            let v = json!({ "command": "normalize", "normal_form": nf.to_json(), "left_steps": steps });
            emit(cfg, v, format!("{nf}\n({steps} complete left reduction steps)\n"))
        }
        Command::Coherence { left, right } => {
            let a = parse_resource(left).map_err(|e| e.to_string())?;
            let b = parse_resource(right).map_err(|e| e.to_string())?;
            let c = coherent(&a, &b);
            let v = json!({ "command": "coherence", "coherent": c });
            emit(cfg, v, format!("{}\n", if c { "coherent" } else { "not coherent" }))
        }
        Command::Multinomial { term } => {
            let text = input(term, stdin)?;
            let (shown, m, normal) = match parse_resource(&text) {
                Ok(s) => (s.to_string(), multinomial(&s), is_normal(&s)),
                Err(_) => {
                    let b = parse_bag(&text).map_err(|e| e.to_string())?;
                    (b.to_string(), multinomial(&b), is_normal(&b))
                }
            };
            let v = json!({ "command": "multinomial", "term": shown, "multinomial": m.to_string(), "normal": normal });
            emit(cfg, v, format!("m({shown}) = {m}\n"))
        }
        Command::Run { term, trace } => {
            let m = lambda(&input(term, stdin)?)?;
            let frontier = head_reductions(&m, cfg.fuel);
            let mut pretty = String::new();
            if *trace {
                pretty.push_str(&reduction_tree(&m, cfg.fuel).to_string());
                pretty.push('\n');
            }
            let mut rows = Vec::new();
            for r in &frontier.resolved {
                pretty.push_str(&format!("{}  {}  {}\n", r.choices, fmt_rational(&r.choices.prob()), r.hnf));
                rows.push(json!({
                    "choices": r.choices.to_string(),
                    "prob": fmt_rational(&r.choices.prob()),
                    "hnf": r.hnf.to_string(),
                    "steps": r.steps,
                }));
            }
            pretty.push_str(&format!("residual {}\n", fmt_rational(&frontier.residual())));
            let v = json!({ "command": "run", "resolved": rows, "residual": fmt_rational(&frontier.residual()) });
            emit(cfg, v, pretty)
        }
        Command::Taylor { term, flavour } => {
            let m = lambda(&input(term, stdin)?)?;
            let e = if flavour.erased { generic_taylor(&m, cfg.budget()) } else { explicit_taylor(&m, cfg.budget()) };
            let pretty: String = e.iter().map(|(t, c)| format!("{}  {t}\n", fmt_rational(c))).collect();
            let v = json!({ "command": "taylor", "explicit": !flavour.erased, "terms": e.to_json() });
            emit(cfg, v, if pretty.is_empty() { "0\n".into() } else { pretty })
        }
        Command::TaylorNf { term, flavour } => {
            let m = lambda(&input(term, stdin)?)?;
            let nf = if flavour.explicit {
                explicit_taylor_nf(&m, cfg.budget(), cfg.fuel)
            } else {
                taylor_nf(&m, cfg.budget(), cfg.fuel)
            };
            let mut v = nf_json(&nf);
            v["command"] = json!("taylor-nf");
            v["explicit"] = json!(flavour.explicit);
            emit(cfg, v, nf_pretty(&nf))
        }
        Command::Bohm { term } => {
            let m = lambda(&input(term, stdin)?)?;
            let a = pt_approximant(&m, cfg.depth, cfg.fuel);
            let mut v = a.to_json();
            v["command"] = json!("bohm");
            emit(cfg, v, a.to_string())
        }
        Command::Test { term, btt } => {
            let m = lambda(&input(term, stdin)?)?;
            let test = parse_btt(btt).map_err(|e| e.to_string())?;
            let pr = eval_btt(&test, &m, cfg.fuel);
            let mut v = json!({ "command": "test", "test": test.to_string(), "probability": interval_json(&pr) });
            let mut pretty = format!("Pr({test}) in {pr}\n");
            if test.is_resource() {
                let c = correspondence_bounds(&test, &m, cfg.fuel, cfg.budget()).map_err(|e| e.to_string())?;
                pretty.push_str(&format!(
                    "coefficient in the exponential of the normal form: {}\nprobability / multinomial: {}\n",
                    c.coefficient, c.testing
                ));
                v["coefficient"] = interval_json(&c.coefficient);
                v["scaled_probability"] = interval_json(&c.testing);
            }
            emit(cfg, v, pretty)
        }
        Command::Tts { command } => tts_command(cfg, command, stdin),
        Command::Compare { left, right, expect_equal } => compare(cfg, left, right, *expect_equal),
    }
}

fn read_system(file: &Option<PathBuf>, stdin: &mut dyn Read) -> Result<TreeTransitionSystem, String> {
    let text = match file {
        Some(path) => std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?,
        None => {
            let mut buf = String::new();
            stdin.read_to_string(&mut buf).map_err(|e| e.to_string())?;
            buf
        }
    };
    TreeTransitionSystem::parse(&text).map_err(|e| e.to_string())
}

fn class_lists(tts: &TreeTransitionSystem) -> (Vec<Vec<String>>, Vec<Vec<String>>) {
    let b = bisimilarity(tts);
    let lin = b.linear_classes().iter().map(|c| c.iter().map(|&q| tts.linear_name(q).to_string()).collect()).collect();
    let bra =
        b.branching_classes().iter().map(|c| c.iter().map(|&s| tts.branching_name(s).to_string()).collect()).collect();
    (lin, bra)
}

fn show_classes(lin: &[Vec<String>], bra: &[Vec<String>]) -> String {
    let mut s = String::new();
    for c in lin {
        s.push_str(&format!("linear    {{{}}}\n", c.join(", ")));
    }
    for c in bra {
        s.push_str(&format!("branching {{{}}}\n", c.join(", ")));
    }
    s
}

fn tts_command(cfg: &Config, command: &TtsCommand, stdin: &mut dyn Read) -> Outcome {
    match command {
        TtsCommand::Bisim { file } => {
            let tts = read_system(file, stdin)?;
            let (lin, bra) = class_lists(&tts);
            let v = json!({ "command": "tts bisim", "linear": lin, "branching": bra });
            emit(cfg, v, show_classes(&lin, &bra))
        }
        TtsCommand::Test { file, state, test, against } => {
            let tts = read_system(&Some(file.clone()), stdin)?;
            let first = tts.find_state(state).map_err(|e| e.to_string())?;
            let second = against.as_deref().map(|a| tts.find_state(a)).transpose().map_err(|e| e.to_string())?;
            match test {
                Some(text) => {
                    let linear = matches!(first, State::Linear(_));
                    let t = TtsTest::parse(&tts, text, linear).map_err(|e| e.to_string())?;
                    let mut rows = Vec::new();
                    let mut pretty = String::new();
                    for (name, st) in std::iter::once((state, first)).chain(against.iter().zip(second)) {
                        let p = eval_tts_test(&tts, st, &t).map_err(|e| e.to_string())?;
                        pretty.push_str(&format!("Pr({}, {name}) = {}\n", t.show(&tts), fmt_rational(&p)));
                        rows.push(json!({ "state": name, "prob": fmt_rational(&p) }));
                    }
                    emit(cfg, json!({ "command": "tts test", "test": t.show(&tts), "results": rows }), pretty)
                }
                None => {
                    let (State::Linear(q), Some(State::Linear(r))) = (first, second) else {
                        return Err("without --test, give two linear states with --state and --against".into());
                    };
                    let found = distinguishing_test_search(&tts, q, r, cfg.depth.max(1) * 2);
                    let shown = found.as_ref().map(|t| t.show(&tts));
                    let pretty = match &shown {
                        Some(t) => format!("separated by {t}\n"),
                        None => "no separating test found\n".into(),
                    };
                    emit(cfg, json!({ "command": "tts test", "separating_test": shown }), pretty)
                }
            }
        }
        TtsCommand::FromTerms { terms } => {
            let parsed = terms.iter().map(|t| lambda(t)).collect::<Result<Vec<_>, _>>()?;
            let sys = tts_of_terms(&parsed, cfg.depth, cfg.fuel);
            let (lin, bra) = class_lists(&sys.tts);
            let mut pretty = String::new();
            for line in sys.legend() {
                pretty.push_str(&format!("# {line}\n"));
            }
            pretty.push_str(&sys.tts.to_string());
            pretty.push_str(&format!(
                "# starting states: {}\n",
                sys.roots.iter().map(|&q| sys.tts.linear_name(q)).collect::<Vec<_>>().join(" ")
            ));
            for line in show_classes(&lin, &bra).lines() {
                pretty.push_str(&format!("# {line}\n"));
            }
            let v = json!({
                "command": "tts from-terms",
                "system": sys.tts.to_string(),
                "legend": sys.legend(),
                "roots": sys.roots.iter().map(|&q| sys.tts.linear_name(q)).collect::<Vec<_>>(),
                "linear": lin,
                "branching": bra,
            });
            emit(cfg, v, pretty)
        }
    }
}

/// Whether the coefficient intervals of two truncated normal forms meet
/// on every term, and whether they are known to be equal.
fn nf_relation(a: &NormalExpansion, b: &NormalExpansion) -> (bool, bool) {
    let overlap = a.terms.support().chain(b.terms.support()).all(|t| {
        let (x, y) = (a.terms.coefficient(t), b.terms.coefficient(t));
        x <= &y + &b.residual && y <= &x + &a.residual
    });
    let equal = a.is_exact() && b.is_exact() && a.terms == b.terms;
    (overlap, equal)
}

/// A resource test whose success intervals on the two terms are disjoint:
/// first the tests encoding terms of either normal form, then the
/// shapes of head normal forms.
fn separating_test(
    cfg: &Config,
    m: &Term,
    n: &Term,
    nfs: [&NormalExpansion; 2],
) -> Option<(TermTest, Interval, Interval)> {
    let encoded = nfs
        .iter()
        .flat_map(|nf| nf.terms.support().cloned().collect::<Vec<_>>())
        .filter_map(|s| term_to_rbht(&s).ok().map(TermTest::ev));
    let mut heads: Vec<_> = m.free_names().union(&n.free_names()).cloned().collect();
    heads.sort();
    let family =
        btt_to_rbtt_family(&parse_btt("ev(w)").expect("fixed test"), &FamilyBudget::new(cfg.depth, cfg.depth, heads));
    encoded.chain(family).find_map(|t| {
        let (a, b) = (eval_btt(&t, m, cfg.fuel), eval_btt(&t, n, cfg.fuel));
        (!a.overlaps(&b)).then_some((t, a, b))
    })
}

fn compare(cfg: &Config, left: &str, right: &str, expect_equal: bool) -> Outcome {
    let m = lambda(left)?;
    let n = lambda(right)?;
    let b = cfg.budget();
    let generic_equal = generic_taylor(&m, b) == generic_taylor(&n, b);
    let explicit_equal = explicit_taylor(&m, b) == explicit_taylor(&n, b);
    let (nm, nn) = (taylor_nf(&m, b, cfg.fuel), taylor_nf(&n, b, cfg.fuel));
    let (nf_overlap, nf_equal) = nf_relation(&nm, &nn);
    let (am, an) = (pt_approximant(&m, cfg.depth, cfg.fuel), pt_approximant(&n, cfg.depth, cfg.fuel));
    let bohm_equal = am == an;
    let bohm_compatible = approximants_compatible(&am, &an);
    let separation = separating_test(cfg, &m, &n, [&nm, &nn]);
    let separated = !generic_equal || !nf_overlap || !bohm_compatible || separation.is_some();

    let yes = |x: bool| if x { "yes" } else { "no" };
    let mut pretty = format!(
        "generic Taylor truncations equal: {}\nexplicit Taylor truncations equal: {}\n\
         Taylor normal forms overlapping: {}\nTaylor normal forms equal: {}\n\
         Böhm approximants equal: {}\nBöhm approximants compatible: {}\n",
        yes(generic_equal),
        yes(explicit_equal),
        yes(nf_overlap),
        yes(nf_equal),
        yes(bohm_equal),
        yes(bohm_compatible),
    );
    let sep_json = match &separation {
        Some((t, a, b)) => {
            pretty.push_str(&format!("separating test: {t}  ({a} vs {b})\n"));
            json!({ "test": t.to_string(), "left": interval_json(a), "right": interval_json(b) })
        }
        None => {
            pretty.push_str("separating test: none found\n");
            Value::Null
        }
    };
    let v = json!({
        "command": "compare",
        "generic_taylor_equal": generic_equal,
        "explicit_taylor_equal": explicit_equal,
        "taylor_nf_overlapping": nf_overlap,
        "taylor_nf_equal": nf_equal,
        "bohm_equal": bohm_equal,
        "bohm_compatible": bohm_compatible,
        "separating_test": sep_json,
        "left_residual": fmt_rational(&nm.residual),
        "right_residual": fmt_rational(&nn.residual),
    });
    let (text, _) = emit(cfg, v, pretty)?;
    let code = if expect_equal && separated { 1 } else { 0 };
    Ok((text, code))
}

/// Entry point of the binary.
pub fn main() -> i32 {
    run(std::env::args_os(), &mut std::io::stdin(), &mut std::io::stdout(), &mut std::io::stderr())
}
