//! `dlaf`: evaluate programs, report side effects, check short-circuit
//! laws and run the instruction-sequence pipeline from the shell.

use std::io::Read;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use dlaf::classify::{is_marginal, is_undetectible, OccurrenceRef, DEFAULT_SEARCH_BOUND};
use dlaf::effects::{analyze_effects, DeterministicProgram};
use dlaf::gen::{gen_command, GenConfig};
use dlaf::pga::{
    behavior_extract, first_canonical, parse_pga, parse_pga_seq, project_program, prune_dead_branches,
    second_canonical, sufficiently_similar, translate_ft,
};
use dlaf::scl::{check_schema, Schema};
use dlaf::semantics::{instruction_trace, run, run_expected, EvalOutcome, ExpectationPolicy, StepBudget, Valuation};
use dlaf::sos::{command_to_program, sos_run, SosOutcome};
use dlaf::syntax::{parse_program, Program, Var};
use dlaf::Error;

#[derive(Parser)]
#[command(name = "dlaf", version, about = "Dynamic logic with assignments as formulas")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Initial valuation, e.g. x=0,y=3. Unmentioned variables are 0.
    #[arg(long, global = true, default_value = "")]
    init: String,
    /// Expected-evaluation policy.
    #[arg(long, global = true, value_enum, default_value_t = PolicyArg::Default)]
    policy: PolicyArg,
    /// Star unfoldings before giving up on a run.
    #[arg(long, global = true, default_value_t = 10_000)]
    max_steps: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Randomized trials for scl-check and oracle-check.
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Default,
    AssignInert,
}

impl From<PolicyArg> for ExpectationPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Default => ExpectationPolicy::Default,
            PolicyArg::AssignInert => ExpectationPolicy::AssignInert,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a program under the actual and the expected semantics.
    Eval {
        #[arg(allow_hyphen_values = true)]
        input: String,
    },
    /// Side effects of a deterministic program.
    Effects {
        #[arg(allow_hyphen_values = true)]
        input: String,
    },
    /// Is the side effect of an occurrence marginal?
    Classify {
        #[arg(allow_hyphen_values = true)]
        input: String,
        /// Canonical-form index, optionally with a path into the test: 1 or 1:andl
        #[arg(long)]
        occ: String,
        /// Largest value tried when looking for an undetectible effect.
        #[arg(long, default_value_t = DEFAULT_SEARCH_BOUND)]
        search_bound: u64,
    },
    /// Check short-circuit axiom schemas on random instances.
    SclCheck {
        /// Schema names; all of them when none are given.
        schemas: Vec<String>,
        #[arg(long = "schema")]
        named: Vec<String>,
    },
    /// Canonical forms of an instruction sequence.
    PgaCanon {
        #[arg(allow_hyphen_values = true)]
        input: String,
    },
    /// Extracted behavior of an instruction sequence.
    PgaBehave {
        #[arg(allow_hyphen_values = true)]
        input: String,
    },
    /// Replace complex tests by unit instructions.
    PgaProject {
        #[arg(allow_hyphen_values = true)]
        input: String,
    },
    /// Translate a finite instruction sequence into a program.
    PgaTranslate {
        #[arg(allow_hyphen_values = true)]
        input: String,
    },
    /// Compare the translations with and without projection.
    PgaSimilar {
        #[arg(allow_hyphen_values = true)]
        input: String,
    },
    /// Cross-check random WHILE commands against their translation.
    OracleCheck,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Syntax { .. }) { 2 } else { 1 };
        Failure { code, msg: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 2, msg: msg.into() }
}

/// Inline text, a file name, or `-` for standard input.
fn source(input: &str) -> Result<String, Failure> {
    if input == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| usage(e.to_string()))?;
        return Ok(s);
    }
    let path = Path::new(input);
    if path.is_file() {
        return std::fs::read_to_string(path).map_err(|e| usage(format!("{input}: {e}")));
    }
    Ok(input.to_string())
}

fn program_vars(p: &Program, g: &Valuation) -> Vec<Var> {
    let mut vars: Vec<Var> = g.support().map(|(k, _)| k.clone()).collect();
    p.vars(&mut vars);
    vars.sort();
    vars.dedup();
    vars
}

fn outcome_json(o: &EvalOutcome, vars: &[Var]) -> (Value, Value) {
    let fin = o.valuation().map_or(Value::Null, |h| json!(h.to_map(vars)));
    (json!(o.kind()), fin)
}

struct Ctx {
    g: Valuation,
    policy: ExpectationPolicy,
    limits: StepBudget,
    seed: u64,
    trials: Option<usize>,
}

fn eval(ctx: &Ctx, input: &str) -> Result<(Value, u8), Failure> {
    let p = parse_program(&source(input)?)?;
    let vars = program_vars(&p, &ctx.g);
    let (o, trace) = instruction_trace(&p, &ctx.g, ctx.limits)?;
    let (outcome, fin) = outcome_json(&o, &vars);
    let e = run_expected(&p, &ctx.g, ctx.policy, ctx.limits)?;
    let (e_outcome, e_fin) = outcome_json(&e, &vars);
    Ok((
        json!({
            "program": p.to_string(),
            "initial": ctx.g.to_map(&vars),
            "outcome": outcome,
            "final": fin,
            "trace": trace,
            "expected": { "outcome": e_outcome, "final": e_fin },
        }),
        0,
    ))
}

fn effects(ctx: &Ctx, input: &str) -> Result<(Value, u8), Failure> {
    let p = parse_program(&source(input)?)?;
    let d = DeterministicProgram::new(&p)?;
    let r = analyze_effects(&d, &ctx.g, ctx.policy, ctx.limits)?;
    let vars = program_vars(&p, &ctx.g);
    let (outcome, fin) = outcome_json(&r.outcome, &vars);
    let trace: Vec<String> = r.canonical.instrs.iter().map(|i| i.to_string()).collect();
    Ok((
        json!({
            "program": p.to_string(),
            "initial": ctx.g.to_map(&vars),
            "outcome": outcome,
            "final": fin,
            "effects": r.effects,
            "trace": trace,
        }),
        0,
    ))
}

fn classify(ctx: &Ctx, input: &str, occ: &str, bound: u64) -> Result<(Value, u8), Failure> {
    let p = parse_program(&source(input)?)?;
    let occ = OccurrenceRef::parse(occ).map_err(usage)?;
    let d = DeterministicProgram::new(&p)?;
    match is_marginal(&d, &occ, &ctx.g, ctx.policy, ctx.limits) {
        Ok(v) => Ok((
            json!({
                "occurrence": v.occurrence,
                "marginal": v.marginal,
                "h_E_exists": v.h_e_exists,
                "delta": v.delta,
                "effect": v.effect,
            }),
            0,
        )),
        Err(Error::NoSideEffect) => {
            // report whether another start value would have exposed one
            let undetectible = match occ.formula_path {
                None => {
                    let (canon, _) = dlaf::effects::canonical_run(&d, &ctx.g, ctx.limits)?;
                    let prefix = Program::seq_all(canon.instrs[..occ.instr_index].to_vec());
                    let f = run(&prefix, &ctx.g, ctx.limits)?.valuation().cloned().unwrap_or_default();
                    is_undetectible(&canon.instrs[occ.instr_index], &f, bound, ctx.policy).ok()
                }
                Some(_) => None,
            };
            Ok((
                json!({
                    "occurrence": occ,
                    "side_effect": false,
                    "undetectible": undetectible,
                }),
                1,
            ))
        }
        Err(e) => Err(e.into()),
    }
}

fn scl_check(ctx: &Ctx, names: &[String]) -> Result<(Value, u8), Failure> {
    let schemas: Vec<Schema> = if names.is_empty() {
        Schema::ALL.to_vec()
    } else {
        names.iter().map(|n| Schema::parse(n)).collect::<Result<_, _>>().map_err(|e| usage(e.to_string()))?
    };
    let trials = ctx.trials.unwrap_or(500);
    let reports: Vec<Value> = schemas
        .into_iter()
        .map(|s| {
            let r = check_schema(s, trials, ctx.seed);
            let witness = r.counterexample.as_ref().map(|c| {
                json!({
                    "lhs": c.lhs.to_string(),
                    "rhs": c.rhs.to_string(),
                    "valuation": c.valuation,
                    "lhs_result": c.lhs_result,
                    "rhs_result": c.rhs_result,
                })
            });
            json!({
                "schema": s.name(),
                "expected_valid": r.expected_valid,
                "violations": r.violations,
                "passed": r.passed,
                "witness": witness,
            })
        })
        .collect();
    let all = reports.iter().all(|r| r["passed"] == json!(true));
    Ok((json!({ "trials": trials, "seed": ctx.seed, "passed": all, "schemas": reports }), u8::from(!all)))
}

fn pga_canon(input: &str) -> Result<(Value, u8), Failure> {
    let text = source(input)?;
    let t = parse_pga(&text)?;
    let first = first_canonical(&t);
    let second = second_canonical(&first);
    Ok((json!({ "input": t.to_string(), "first": first.to_string(), "second": second.to_string() }), 0))
}

fn pga_behave(input: &str) -> Result<(Value, u8), Failure> {
    let s = parse_pga_seq(&source(input)?)?;
    let g = behavior_extract(&s)?;
    Ok((json!({ "program": s.to_string(), "behavior": g.to_string(), "graph": g }), 0))
}

fn pga_project(input: &str) -> Result<(Value, u8), Failure> {
    let s = parse_pga_seq(&source(input)?)?;
    Ok((json!({ "program": s.to_string(), "projected": project_program(&s).to_string() }), 0))
}

fn pga_translate(input: &str) -> Result<(Value, u8), Failure> {
    let s = parse_pga_seq(&source(input)?)?;
    let direct = translate_ft(&s)?;
    let projected = project_program(&s);
    let via = translate_ft(&projected)?;
    Ok((
        json!({
            "program": s.to_string(),
            "translation": direct.to_string(),
            "projected": projected.to_string(),
            "projected_translation": via.to_string(),
            "pruned": prune_dead_branches(&via).to_string(),
        }),
        0,
    ))
}

fn pga_similar(ctx: &Ctx, input: &str) -> Result<(Value, u8), Failure> {
    let s = parse_pga_seq(&source(input)?)?;
    let r = sufficiently_similar(&s, &ctx.g, ctx.limits)?;
    let mut v = serde_json::to_value(&r).map_err(|e| usage(e.to_string()))?;
    v["program"] = json!(s.to_string());
    v["initial"] = json!(ctx.g);
    Ok((v, 0))
}

fn oracle_check(ctx: &Ctx) -> Result<(Value, u8), Failure> {
    let trials = ctx.trials.unwrap_or(1000);
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let cfg = GenConfig::default();
    let (mut agree, mut diverged) = (0usize, 0usize);
    let mut mismatch = Value::Null;
    for _ in 0..trials {
        let c = gen_command(&mut rng, &cfg);
        let g = Valuation::from_pairs(cfg.vars.iter().map(|v| (v.as_str(), rand::Rng::gen_range(&mut rng, 0..8))));
        let want = sos_run(&c, &g, ctx.limits);
        let got = run(&command_to_program(&c), &g, ctx.limits);
        let same = match (&want, &got) {
            (Ok(SosOutcome::Completed(h)), Ok(EvalOutcome::Completed(k))) => h == k,
            (Ok(SosOutcome::Stuck), Ok(EvalOutcome::Failed)) => true,
            (Err(Error::BudgetExceeded { .. }), Err(Error::BudgetExceeded { .. })) => {
                diverged += 1;
                true
            }
            _ => false,
        };
        if same {
            agree += 1;
        } else if mismatch.is_null() {
            mismatch = json!({
                "command": c.to_string(),
                "initial": g,
                "sos": format!("{want:?}"),
                "dl": format!("{got:?}"),
            });
        }
    }
    let ok = agree == trials;
    Ok((
        json!({
            "trials": trials,
            "seed": ctx.seed,
            "agree": agree,
            "diverged": diverged,
            "passed": ok,
            "mismatch": mismatch,
        }),
        u8::from(!ok),
    ))
}

fn text_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

/// One `key: value` line per field; lists of records get a line each.
fn render_text(v: &Value) -> String {
    let Value::Object(m) = v else { return text_value(v) };
    let mut out = String::new();
    for (k, v) in m {
        match v {
            Value::Array(items) if items.iter().all(Value::is_object) && !items.is_empty() => {
                out.push_str(&format!("{k}:\n"));
                for it in items {
                    let Value::Object(f) = it else { unreachable!() };
                    let parts: Vec<String> = f.iter().map(|(a, b)| format!("{a}={}", text_value(b))).collect();
                    out.push_str(&format!("  {}\n", parts.join(" ")));
                }
            }
            _ => out.push_str(&format!("{k}: {}\n", text_value(v))),
        }
    }
    out
}

fn dispatch(cli: &Cli) -> Result<(Value, u8), Failure> {
    let g = Valuation::parse(&cli.init).map_err(|e| usage(format!("--init: {e}")))?;
    let ctx = Ctx {
        g,
        policy: cli.policy.into(),
        limits: StepBudget::new(cli.max_steps),
        seed: cli.seed,
        trials: cli.trials,
    };
    match &cli.command {
        Cmd::Eval { input } => eval(&ctx, input),
        Cmd::Effects { input } => effects(&ctx, input),
        Cmd::Classify { input, occ, search_bound } => classify(&ctx, input, occ, *search_bound),
        Cmd::SclCheck { schemas, named } => {
            let all: Vec<String> = schemas.iter().chain(named).cloned().collect();
            scl_check(&ctx, &all)
        }
        Cmd::PgaCanon { input } => pga_canon(input),
        Cmd::PgaBehave { input } => pga_behave(input),
        Cmd::PgaProject { input } => pga_project(input),
        Cmd::PgaTranslate { input } => pga_translate(input),
        Cmd::PgaSimilar { input } => pga_similar(&ctx, input),
        Cmd::OracleCheck => oracle_check(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok((v, code)) => {
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&v).expect("serializable")),
                Format::Text => print!("{}", render_text(&v)),
            }
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
