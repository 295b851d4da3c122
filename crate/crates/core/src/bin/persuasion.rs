use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use persuasion_core::builtins;
use persuasion_core::constructions::{improve, simulate};
use persuasion_core::equilibrium::{
    check_equilibrium_bounded, profile_payoffs, MixedProfile, PureProfile, Verdict, DEFAULT_REALIZATION_BOUND,
};
use persuasion_core::io::{self, pretty, rational_json};
use persuasion_core::oracle::{brute_force_best_deviation_bounded, brute_force_optimal_signal_bounded, BOUND_ENV};
use persuasion_core::persuasion::optimal_signal;
use persuasion_core::rational::{approx, format_rational, parse_rational, Rational};
use persuasion_core::signal::{
    full_info_signal, is_fully_informative, is_incentive_compatible, message_outcomes, receiver_value, sender_value,
};
use persuasion_core::{validate_game, Error, GameSpec, Signal};

#[derive(Parser)]
#[command(name = "persuasion", version, about = "Exact analysis of competing-senders persuasion games")]
struct Cli {
    /// Print a machine-readable JSON record instead of the text summary.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the prior and the unique-optimum and alignment assumptions.
    Validate {
        /// Game file, or a builtin: ecig, policy, policy(<ε>).
        game: String,
    },
    /// Obedience, informativeness, posteriors and values of one signal.
    Analyze { game: String, signal: PathBuf },
    /// Sender-optimal incentive-compatible signal via the exact LP.
    Optimal {
        game: String,
        #[arg(long, short)]
        sender: usize,
        /// Also write the signal file here.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Replicate another sender's signal as a signal of `--sender`.
    Simulate {
        game: String,
        signal: PathBuf,
        #[arg(long, short)]
        sender: usize,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Strictly improve on another sender's signal for both `--sender` and the receiver.
    Improve {
        game: String,
        signal: PathBuf,
        #[arg(long, short)]
        sender: usize,
        /// Leak weight; defaults to half of the feasible cap.
        #[arg(long, value_parser = parse_rational_arg)]
        epsilon: Option<Rational>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Search for a profitable deviation from a profile.
    CheckNe {
        game: String,
        /// One signal file per sender, in sender order.
        signals: Vec<PathBuf>,
        /// Mixed-profile file instead of per-sender signal files.
        #[arg(long, conflicts_with = "signals")]
        profile: Option<PathBuf>,
        /// Largest number of mixed-profile realizations to enumerate.
        #[arg(long, default_value_t = DEFAULT_REALIZATION_BOUND)]
        bound: u64,
    },
    /// Brute force over grid signals: the best IC signal, or with signal
    /// files for a pure profile, the best deviation from it.
    Oracle {
        game: String,
        #[arg(long, short)]
        sender: usize,
        #[arg(long = "resolution", short = 'k', default_value_t = 1)]
        resolution: u32,
        /// Largest number of candidate signals to enumerate.
        #[arg(long, env = BOUND_ENV, default_value_t = persuasion_core::oracle::DEFAULT_ENUMERATION_BOUND)]
        bound: u64,
        /// Signal files of a pure profile (one per sender) to deviate from.
        #[arg(long, num_args = 1..)]
        profile: Vec<PathBuf>,
    },
    /// Payoff claims of the builtin example games.
    Examples {
        #[arg(value_parser = ["ecig", "policy"])]
        name: String,
        /// Probability of the unbiased type in the policy game.
        #[arg(long, value_parser = parse_rational_arg, default_value = "1/10")]
        epsilon: Rational,
    },
}

fn parse_rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

enum Outcome {
    Ok,
    /// Completed, but the result is a domain failure (exit status 1).
    Warn(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Warn(msg)) => {
            eprintln!("warning: {msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn exact(r: &Rational) -> String {
    format!("{:<12} ~{:.6}", format_rational(r), approx(r))
}

const APPROX_NOTE: &str = "(values after ~ are decimal approximations)";

fn sender_index(game: &GameSpec, one_based: usize) -> Result<usize, Error> {
    if one_based == 0 || one_based > game.sender_count() {
        return Err(Error::InvalidProfile(format!(
            "sender must be between 1 and {}, got {one_based}",
            game.sender_count()
        )));
    }
    Ok(one_based - 1)
}

fn emit_signal(game: &GameSpec, signal: &Signal, output: &Option<PathBuf>) -> Result<(), Error> {
    if let Some(path) = output {
        io::save_signal(game, signal, path)?;
    }
    Ok(())
}

fn print_signal(game: &GameSpec, signal: &Signal) {
    let i = signal.sender();
    println!("signal of sender {}:", i + 1);
    println!("  {:<24} {}", "state", game.actions().join("  "));
    for (&(s, r), row) in signal.rows() {
        let state = format!("({}, {})", game.sender_states(i)[s], game.receiver_states()[r]);
        let dist: Vec<String> = row.iter().map(format_rational).collect();
        println!("  {:<24} {}", state, dist.join("  "));
    }
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Validate { game } => {
            let g = io::load_game(game)?;
            let report = validate_game(&g);
            if cli.json {
                print!("{}", pretty(&io::validation_to_json(&g, &report)));
            } else {
                println!("prior: sums to 1");
                println!("Assumption 1 (unique optimal actions): {}", if report.assumption1_ok { "holds" } else { "violated" });
                for v in &report.assumption1_violations {
                    println!("  no unique optimum for {:?} at state index {}", v.player, v.state);
                }
                println!("Assumption 2 (aligned states): {}", if report.assumption2_ok { "holds" } else { "violated" });
                for v in &report.assumption2_violations {
                    println!(
                        "  sender {} has no state aligned with the receiver given sender {} at ({}, {})",
                        v.i + 1,
                        v.j + 1,
                        g.sender_states(v.j)[v.omega_j],
                        g.receiver_states()[v.omega_r]
                    );
                }
            }
            if !report.assumption1_ok {
                return Ok(Outcome::Warn("Assumption 1 is violated".into()));
            }
            if !report.assumption2_ok {
                return Ok(Outcome::Warn("Assumption 2 is violated".into()));
            }
            Ok(Outcome::Ok)
        }
        Command::Analyze { game, signal } => {
            let g = io::load_game(game)?;
            let s = io::load_signal(&g, signal)?;
            let ic = is_incentive_compatible(&g, &s);
            let fi = is_fully_informative(&g, &s);
            let outcomes = message_outcomes(&g, &s);
            let vr = receiver_value(&g, &s);
            let vs: Vec<Rational> = (0..g.sender_count()).map(|k| sender_value(&g, k, &s)).collect();
            if cli.json {
                let messages: Vec<Value> = outcomes
                    .iter()
                    .map(|o| {
                        let posterior: serde_json::Map<String, Value> = g
                            .receiver_states()
                            .iter()
                            .zip(&o.receiver_mass)
                            .map(|(label, m)| (label.clone(), rational_json(&(m / &o.probability))))
                            .collect();
                        json!({
                            "action": g.actions()[o.action],
                            "probability": rational_json(&o.probability),
                            "receiver_posterior": posterior,
                            "response": g.actions()[o.response],
                        })
                    })
                    .collect();
                let violations: Vec<Value> = ic
                    .violations
                    .iter()
                    .map(|v| json!({"action": g.actions()[v.action], "better_action": g.actions()[v.better_action], "gain": rational_json(&v.gain)}))
                    .collect();
                print!(
                    "{}",
                    pretty(&json!({
                        "sender": s.sender() + 1,
                        "incentive_compatible": ic.incentive_compatible,
                        "ic_violations": violations,
                        "fully_informative": fi.fully_informative,
                        "messages": messages,
                        "receiver_value": rational_json(&vr),
                        "sender_values": vs.iter().map(rational_json).collect::<Vec<_>>(),
                    }))
                );
            } else {
                print_signal(&g, &s);
                println!("incentive compatible: {}", ic.incentive_compatible);
                for v in &ic.violations {
                    println!(
                        "  on {} the receiver gains {} by taking {}",
                        g.actions()[v.action],
                        format_rational(&v.gain),
                        g.actions()[v.better_action]
                    );
                }
                println!("fully informative: {}", fi.fully_informative);
                for o in &outcomes {
                    let post: Vec<String> = g
                        .receiver_states()
                        .iter()
                        .zip(&o.receiver_mass)
                        .map(|(l, m)| format!("{l}: {}", format_rational(&(m / &o.probability))))
                        .collect();
                    println!(
                        "  message {:<12} P = {}  posterior [{}]  response {}",
                        g.actions()[o.action],
                        format_rational(&o.probability),
                        post.join(", "),
                        g.actions()[o.response]
                    );
                }
                println!("receiver value   {}", exact(&vr));
                for (k, v) in vs.iter().enumerate() {
                    println!("sender {} value   {}", k + 1, exact(v));
                }
                println!("{APPROX_NOTE}");
            }
            Ok(Outcome::Ok)
        }
        Command::Optimal { game, sender, output } => {
            let g = io::load_game(game)?;
            let i = sender_index(&g, *sender)?;
            let opt = optimal_signal(&g, i)?;
            emit_signal(&g, &opt.signal, output)?;
            if cli.json {
                print!(
                    "{}",
                    pretty(&json!({
                        "signal": io::signal_to_json(&g, &opt.signal),
                        "value": rational_json(&opt.value),
                        "receiver_value": rational_json(&receiver_value(&g, &opt.signal)),
                        "lp": opt.summary,
                    }))
                );
            } else {
                print_signal(&g, &opt.signal);
                println!("sender {} value  {}", sender, exact(&opt.value));
                println!("receiver value  {}", exact(&receiver_value(&g, &opt.signal)));
                println!(
                    "LP: {} variables, {} equality and {} obedience constraints, {} pivots",
                    opt.summary.variables,
                    opt.summary.equality_constraints,
                    opt.summary.obedience_constraints,
                    opt.summary.pivots
                );
                println!("{APPROX_NOTE}");
            }
            Ok(Outcome::Ok)
        }
        Command::Simulate { game, signal, sender, output } => {
            let g = io::load_game(game)?;
            let i = sender_index(&g, *sender)?;
            let src = io::load_signal(&g, signal)?;
            let sim = simulate(&g, i, &src)?;
            emit_signal(&g, &sim, output)?;
            if cli.json {
                print!("{}", pretty(&io::signal_to_json(&g, &sim)));
            } else {
                print_signal(&g, &sim);
                println!("receiver value  {}", exact(&receiver_value(&g, &sim)));
                println!("sender {} value  {}", sender, exact(&sender_value(&g, i, &sim)));
                println!("{APPROX_NOTE}");
            }
            Ok(Outcome::Ok)
        }
        Command::Improve { game, signal, sender, epsilon, output } => {
            let g = io::load_game(game)?;
            let i = sender_index(&g, *sender)?;
            let src = io::load_signal(&g, signal)?;
            let (better, trace) = improve(&g, i, &src, epsilon.clone())?;
            emit_signal(&g, &better, output)?;
            if cli.json {
                print!("{}", pretty(&io::improvement_to_json(&g, &better, &trace)));
            } else {
                print_signal(&g, &better);
                println!(
                    "base recommendation {}, epsilon {} (cap {})",
                    g.actions()[trace.base_action],
                    format_rational(&trace.epsilon),
                    format_rational(&trace.cap)
                );
                for t in &trace.target_states {
                    println!(
                        "  at ({}, {}) recommend {} with probability {}",
                        g.sender_states(i)[t.witness],
                        g.receiver_states()[t.omega_r],
                        g.actions()[t.action],
                        format_rational(&t.probability)
                    );
                }
                let gain_r = receiver_value(&g, &better) - receiver_value(&g, &src);
                let gain_i = sender_value(&g, i, &better) - sender_value(&g, i, &src);
                println!("receiver gain   {}", exact(&gain_r));
                println!("sender {} gain   {}", sender, exact(&gain_i));
                println!("{APPROX_NOTE}");
            }
            Ok(Outcome::Ok)
        }
        Command::CheckNe { game, signals, profile, bound } => {
            let g = io::load_game(game)?;
            let mixed = match profile {
                Some(path) => io::load_profile(&g, path)?,
                None => {
                    let ss = signals.iter().map(|p| io::load_signal(&g, p)).collect::<Result<Vec<_>, _>>()?;
                    MixedProfile::from(&PureProfile::new(&g, ss)?)
                }
            };
            let report = check_equilibrium_bounded(&g, &mixed, *bound)?;
            if cli.json {
                print!("{}", pretty(&io::report_to_json(&g, &report)));
            } else {
                println!("verdict: {}", io::verdict_name(&report.verdict));
                println!("receiver payoff  {}", exact(&report.payoffs.receiver_value));
                for (k, v) in report.payoffs.sender_values.iter().enumerate() {
                    println!("sender {} payoff  {}", k + 1, exact(v));
                }
                println!(
                    "tau {}; all senders share it: {}",
                    format_rational(&report.support.tau),
                    report.support.all_tau_equal
                );
                match &report.verdict {
                    Verdict::Refuted(w) => {
                        println!(
                            "sender {} deviates ({}) from {} to {}",
                            w.deviator + 1,
                            serde_json::to_value(w.construction).unwrap().as_str().unwrap(),
                            format_rational(&w.old_payoff),
                            format_rational(&w.new_payoff)
                        );
                        print_signal(&g, &w.new_signal);
                    }
                    Verdict::NoDeviationFound => {
                        println!("no deviation in the searched family is profitable; this is not an equilibrium certificate")
                    }
                    Verdict::FullyInformativeConsistent => {}
                }
                if !report.validation.ok() {
                    println!("note: the game violates the standing assumptions");
                }
                println!("{APPROX_NOTE}");
            }
            Ok(Outcome::Ok)
        }
        Command::Oracle { game, sender, resolution, bound, profile } => {
            let g = io::load_game(game)?;
            let i = sender_index(&g, *sender)?;
            if profile.is_empty() {
                let (s, v) = brute_force_optimal_signal_bounded(&g, i, *resolution, *bound)?;
                if cli.json {
                    print!(
                        "{}",
                        pretty(&json!({"resolution": resolution, "signal": io::signal_to_json(&g, &s), "value": rational_json(&v)}))
                    );
                } else {
                    print_signal(&g, &s);
                    println!("best IC grid value at resolution {resolution}: {}", exact(&v));
                    println!("{APPROX_NOTE}");
                }
            } else {
                let ss = profile.iter().map(|p| io::load_signal(&g, p)).collect::<Result<Vec<_>, _>>()?;
                let pure = PureProfile::new(&g, ss)?;
                let best = brute_force_best_deviation_bounded(&g, &pure, i, *resolution, *bound)?;
                if cli.json {
                    print!(
                        "{}",
                        pretty(&json!({
                            "resolution": resolution,
                            "signal": io::signal_to_json(&g, &best.signal),
                            "value": rational_json(&best.payoff),
                            "current": rational_json(&best.current),
                            "improves": best.improves(),
                        }))
                    );
                } else {
                    print_signal(&g, &best.signal);
                    println!("current payoff      {}", exact(&best.current));
                    println!("best grid deviation {}", exact(&best.payoff));
                    println!("strict improvement: {}", best.improves());
                    println!("{APPROX_NOTE}");
                }
            }
            Ok(Outcome::Ok)
        }
        Command::Examples { name, epsilon } => {
            let g = if name == "ecig" { builtins::ecig() } else { builtins::by_name(&format!("policy({})", format_rational(epsilon)))? };
            let fi: Vec<Signal> = (0..g.sender_count()).map(|i| full_info_signal(&g, i)).collect::<Result<_, _>>()?;
            let payoffs = profile_payoffs(&g, &PureProfile::new(&g, fi)?);
            let opt = optimal_signal(&g, 0)?;
            let lp_receiver = receiver_value(&g, &opt.signal);
            let (receiver, sender) = if name == "ecig" { ("regulator", "expert") } else { ("policymaker", "expert") };
            if cli.json {
                print!(
                    "{}",
                    pretty(&json!({
                        "game": name,
                        "full_information_profile": io::payoffs_to_json(&payoffs),
                        "single_expert_optimum": {
                            "expert": 1,
                            "value": rational_json(&opt.value),
                            "receiver_value": rational_json(&lp_receiver),
                        },
                    }))
                );
            } else {
                println!("{name}: every expert reveals fully");
                println!("  {:<12} {}", receiver, exact(&payoffs.receiver_value));
                for (k, v) in payoffs.sender_values.iter().enumerate() {
                    println!("  {:<12} {}", format!("{sender} {}", k + 1), exact(v));
                }
                println!("{name}: expert 1 alone, optimal signal");
                println!("  {:<12} {}", format!("{sender} 1"), exact(&opt.value));
                println!("  {:<12} {}", receiver, exact(&lp_receiver));
                println!("{APPROX_NOTE}");
            }
            Ok(Outcome::Ok)
        }
    }
}
