//! JSON file formats and machine-readable reports.
//!
//! Every rational is written as a `"p/q"` string. On input, rationals may be
//! `"p/q"` strings, integer or terminating-decimal strings, or JSON numbers
//! (read from their literal text, so `0.18` is exactly `9/50`). Senders are
//! numbered from 1 in files.
//!
//! Game file:
//!
//! ```json
//! {
//!   "senders": [["H", "U"], ["M", "W"]],
//!   "receiver_states": ["Y", "O"],
//!   "actions": ["impose", "status-quo"],
//!   "prior": [{"state": ["H", "M", "Y"], "p": "0.18"}, ...],
//!   "sender_utilities": [[{"action": "impose", "state": "H", "u": 0}, ...], ...],
//!   "receiver_utility": [{"action": "impose", "state": "Y", "u": 1}, ...]
//! }
//! ```
//!
//! Signal file: `{"sender": 1, "rows": [{"state": ["H", "Y"], "dist": {"impose": "1/3", ...}}]}`;
//! omitted actions have probability zero.
//!
//! Mixed-profile file: `{"strategies": [[{"signal": <path or inline signal>, "p": "1/2"}, ...], ...]}`,
//! one list per sender; paths are relative to the profile file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::de::{self, Deserializer};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::builtins;
use crate::constructions::ImprovementTrace;
use crate::equilibrium::{DeviationWitness, EquilibriumReport, MixedProfile, ProfilePayoffs, SupportAnalysis, Verdict};
use crate::error::{Error, Result};
use crate::game::{GameSpec, Player, ValidationReport};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::signal::Signal;

/// A rational read from a string or a JSON number literal.
#[derive(Debug, Clone)]
struct Num(Rational);

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = match Value::deserialize(d)? {
            Value::String(s) => s,
            Value::Number(n) => n.to_string(),
            other => return Err(de::Error::custom(format!("expected a rational, found {other}"))),
        };
        parse_rational(&text).map(Num).map_err(de::Error::custom)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PriorEntry {
    state: Vec<String>,
    p: Num,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct UtilityEntry {
    action: String,
    state: String,
    u: Num,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GameFile {
    senders: Vec<Vec<String>>,
    receiver_states: Vec<String>,
    actions: Vec<String>,
    prior: Vec<PriorEntry>,
    sender_utilities: Vec<Vec<UtilityEntry>>,
    receiver_utility: Vec<UtilityEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SignalRow {
    state: (String, String),
    dist: BTreeMap<String, Num>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SignalFile {
    sender: usize,
    rows: Vec<SignalRow>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SignalRef {
    Path(String),
    Inline(Value),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileEntry {
    signal: SignalRef,
    p: Num,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileFile {
    strategies: Vec<Vec<ProfileEntry>>,
}

fn from_str<T: de::DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::Parse(format!(
            "{what} at `{path}` (line {}, column {}): {inner}",
            inner.line(),
            inner.column()
        ))
    })
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

fn lookup(labels: &[String], label: &str, field: &str) -> Result<usize> {
    labels
        .iter()
        .position(|l| l == label)
        .ok_or_else(|| Error::Parse(format!("{field}: unknown label {label:?}")))
}

/// Fills `table[a][s]` from `{action, state, u}` entries, requiring each
/// cell exactly once.
fn utility_table(entries: &[UtilityEntry], actions: &[String], states: &[String], field: &str) -> Result<Vec<Vec<Rational>>> {
    let mut table: Vec<Vec<Option<Rational>>> = vec![vec![None; states.len()]; actions.len()];
    for (k, e) in entries.iter().enumerate() {
        let a = lookup(actions, &e.action, &format!("{field}[{k}].action"))?;
        let s = lookup(states, &e.state, &format!("{field}[{k}].state"))?;
        if table[a][s].replace(e.u.0.clone()).is_some() {
            return Err(Error::Parse(format!("{field}[{k}]: duplicate entry for ({}, {})", e.action, e.state)));
        }
    }
    table
        .into_iter()
        .enumerate()
        .map(|(a, row)| {
            row.into_iter()
                .enumerate()
                .map(|(s, u)| {
                    u.ok_or_else(|| {
                        Error::Parse(format!("{field}: missing entry for ({}, {})", actions[a], states[s]))
                    })
                })
                .collect()
        })
        .collect()
}

pub fn parse_game(text: &str) -> Result<GameSpec> {
    let file: GameFile = from_str(text, "game file")?;
    let n = file.senders.len();
    if file.sender_utilities.len() != n {
        return Err(Error::Parse(format!(
            "sender_utilities: expected {n} tables, found {}",
            file.sender_utilities.len()
        )));
    }
    let mut prior = Vec::with_capacity(file.prior.len());
    for (k, e) in file.prior.iter().enumerate() {
        if e.state.len() != n + 1 {
            return Err(Error::Parse(format!(
                "prior[{k}].state: expected {} labels, found {}",
                n + 1,
                e.state.len()
            )));
        }
        let mut state = Vec::with_capacity(n + 1);
        for (i, label) in e.state.iter().enumerate() {
            let labels = if i < n { &file.senders[i] } else { &file.receiver_states };
            state.push(lookup(labels, label, &format!("prior[{k}].state[{i}]"))?);
        }
        prior.push((state, e.p.0.clone()));
    }
    let sender_utility = file
        .sender_utilities
        .iter()
        .enumerate()
        .map(|(i, t)| utility_table(t, &file.actions, &file.senders[i], &format!("sender_utilities[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let receiver_utility = utility_table(&file.receiver_utility, &file.actions, &file.receiver_states, "receiver_utility")?;
    GameSpec::new(file.senders, file.receiver_states, file.actions, prior, sender_utility, receiver_utility)
}

/// A builtin name (`ecig`, `policy`, `policy(<ε>)`) or a game file path.
pub fn load_game(source: &str) -> Result<GameSpec> {
    if builtins::is_builtin_name(source) && !Path::new(source).exists() {
        return builtins::by_name(source);
    }
    parse_game(&read(Path::new(source))?)
}

fn utility_json(table: &[Vec<Rational>], actions: &[String], states: &[String]) -> Value {
    let mut out = Vec::new();
    for (a, row) in table.iter().enumerate() {
        for (s, u) in row.iter().enumerate() {
            out.push(json!({"action": actions[a], "state": states[s], "u": format_rational(u)}));
        }
    }
    Value::Array(out)
}

pub fn game_to_json(game: &GameSpec) -> Value {
    let n = game.sender_count();
    let prior: Vec<Value> = game
        .prior()
        .map(|(state, p)| {
            let labels: Vec<&String> = state
                .iter()
                .enumerate()
                .map(|(k, &x)| if k < n { &game.sender_states(k)[x] } else { &game.receiver_states()[x] })
                .collect();
            json!({"state": labels, "p": format_rational(p)})
        })
        .collect();
    json!({
        "senders": (0..n).map(|i| game.sender_states(i).to_vec()).collect::<Vec<_>>(),
        "receiver_states": game.receiver_states(),
        "actions": game.actions(),
        "prior": prior,
        "sender_utilities": (0..n)
            .map(|i| utility_json(game.sender_utility_table(i), game.actions(), game.sender_states(i)))
            .collect::<Vec<_>>(),
        "receiver_utility": utility_json(game.receiver_utility_table(), game.actions(), game.receiver_states()),
    })
}

pub fn save_game(game: &GameSpec, path: &Path) -> Result<()> {
    write(path, &pretty(&game_to_json(game)))
}

fn signal_from_value(game: &GameSpec, value: Value) -> Result<Signal> {
    let file: SignalFile = serde_path_to_error::deserialize(value)
        .map_err(|e| Error::Parse(format!("signal at `{}`: {}", e.path(), e.inner())))?;
    signal_from_file(game, file)
}

fn signal_from_file(game: &GameSpec, file: SignalFile) -> Result<Signal> {
    if file.sender == 0 || file.sender > game.sender_count() {
        return Err(Error::Parse(format!(
            "sender: expected 1..={}, found {}",
            game.sender_count(),
            file.sender
        )));
    }
    let i = file.sender - 1;
    let m = game.action_count();
    let mut rows = BTreeMap::new();
    for (k, row) in file.rows.into_iter().enumerate() {
        let s = lookup(game.sender_states(i), &row.state.0, &format!("rows[{k}].state[0]"))?;
        let r = lookup(game.receiver_states(), &row.state.1, &format!("rows[{k}].state[1]"))?;
        let mut dist = vec![Rational::from_integer(0.into()); m];
        for (label, q) in row.dist {
            dist[lookup(game.actions(), &label, &format!("rows[{k}].dist"))?] = q.0;
        }
        if rows.insert((s, r), dist).is_some() {
            return Err(Error::Parse(format!("rows[{k}]: duplicate row for ({}, {})", row.state.0, row.state.1)));
        }
    }
    Signal::new(game, i, rows)
}

pub fn parse_signal(game: &GameSpec, text: &str) -> Result<Signal> {
    signal_from_file(game, from_str(text, "signal file")?)
}

pub fn load_signal(game: &GameSpec, path: &Path) -> Result<Signal> {
    parse_signal(game, &read(path)?)
}

pub fn signal_to_json(game: &GameSpec, signal: &Signal) -> Value {
    let i = signal.sender();
    let rows: Vec<Value> = signal
        .rows()
        .iter()
        .map(|(&(s, r), row)| {
            let dist: Map<String, Value> = row
                .iter()
                .enumerate()
                .map(|(a, q)| (game.actions()[a].clone(), Value::String(format_rational(q))))
                .collect();
            json!({"state": [game.sender_states(i)[s], game.receiver_states()[r]], "dist": dist})
        })
        .collect();
    json!({"sender": i + 1, "rows": rows})
}

pub fn save_signal(game: &GameSpec, signal: &Signal, path: &Path) -> Result<()> {
    write(path, &pretty(&signal_to_json(game, signal)))
}

pub fn parse_profile(game: &GameSpec, text: &str, base: &Path) -> Result<MixedProfile> {
    let file: ProfileFile = from_str(text, "profile file")?;
    let mut strategies = Vec::with_capacity(file.strategies.len());
    for (i, entries) in file.strategies.into_iter().enumerate() {
        let mut support = Vec::with_capacity(entries.len());
        for (k, e) in entries.into_iter().enumerate() {
            let signal = match e.signal {
                SignalRef::Path(p) => {
                    let path: PathBuf = base.join(p);
                    load_signal(game, &path)?
                }
                SignalRef::Inline(v) => signal_from_value(game, v)
                    .map_err(|err| Error::Parse(format!("strategies[{i}][{k}].signal: {err}")))?,
            };
            support.push((signal, e.p.0));
        }
        strategies.push(support);
    }
    MixedProfile::new(game, strategies)
}

pub fn load_profile(game: &GameSpec, path: &Path) -> Result<MixedProfile> {
    let base = path.parent().unwrap_or(Path::new("."));
    parse_profile(game, &read(path)?, base)
}

pub fn profile_to_json(game: &GameSpec, profile: &MixedProfile) -> Value {
    let strategies: Vec<Vec<Value>> = profile
        .strategies()
        .iter()
        .map(|st| {
            st.iter()
                .map(|(s, p)| json!({"signal": signal_to_json(game, s), "p": format_rational(p)}))
                .collect()
        })
        .collect();
    json!({ "strategies": strategies })
}

pub fn rational_json(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

fn rationals_json(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rational_json).collect())
}

pub fn validation_to_json(game: &GameSpec, report: &ValidationReport) -> Value {
    let a1: Vec<Value> = report
        .assumption1_violations
        .iter()
        .map(|v| match v.player {
            Player::Sender(i) => json!({"player": format!("sender {}", i + 1), "state": game.sender_states(i)[v.state]}),
            Player::Receiver => json!({"player": "receiver", "state": game.receiver_states()[v.state]}),
        })
        .collect();
    let a2: Vec<Value> = report
        .assumption2_violations
        .iter()
        .map(|v| {
            json!({
                "sender": v.i + 1,
                "other_sender": v.j + 1,
                "other_state": game.sender_states(v.j)[v.omega_j],
                "receiver_state": game.receiver_states()[v.omega_r],
            })
        })
        .collect();
    json!({
        "ok": report.ok(),
        "prior_ok": report.prior_ok,
        "assumption1_ok": report.assumption1_ok,
        "assumption1_violations": a1,
        "assumption2_ok": report.assumption2_ok,
        "assumption2_violations": a2,
    })
}

pub fn trace_to_json(game: &GameSpec, i: usize, trace: &ImprovementTrace) -> Value {
    let reroutes: Vec<Value> = trace
        .target_states
        .iter()
        .map(|t| {
            json!({
                "receiver_state": game.receiver_states()[t.omega_r],
                "witness": game.sender_states(i)[t.witness],
                "action": game.actions()[t.action],
                "probability": format_rational(&t.probability),
            })
        })
        .collect();
    json!({
        "base_action": game.actions()[trace.base_action],
        "reroutes": reroutes,
        "epsilon": format_rational(&trace.epsilon),
        "cap": format_rational(&trace.cap),
    })
}

/// The improved signal in signal-file format with an extra `trace` object.
pub fn improvement_to_json(game: &GameSpec, signal: &Signal, trace: &ImprovementTrace) -> Value {
    let mut v = signal_to_json(game, signal);
    v["trace"] = trace_to_json(game, signal.sender(), trace);
    v
}

pub fn payoffs_to_json(payoffs: &ProfilePayoffs) -> Value {
    json!({
        "receiver": rational_json(&payoffs.receiver_value),
        "senders": rationals_json(&payoffs.sender_values),
    })
}

pub fn support_to_json(support: &SupportAnalysis) -> Value {
    json!({
        "tau": rational_json(&support.tau),
        "all_tau_equal": support.all_tau_equal,
        "senders": support.senders.iter().enumerate().map(|(i, s)| json!({
            "sender": i + 1,
            "receiver_values": rationals_json(&s.receiver_values),
            "tau": rational_json(&s.tau),
        })).collect::<Vec<_>>(),
        "never_chosen": support.never_chosen.iter()
            .map(|&(i, j)| json!({"sender": i + 1, "support_index": j}))
            .collect::<Vec<_>>(),
    })
}

pub fn witness_to_json(game: &GameSpec, w: &DeviationWitness) -> Value {
    json!({
        "deviator": w.deviator + 1,
        "construction": serde_json::to_value(w.construction).expect("unit enum"),
        "source": w.source.map(|(i, j)| json!({"sender": i + 1, "support_index": j})),
        "epsilon": w.epsilon.as_ref().map(rational_json),
        "old_payoff": rational_json(&w.old_payoff),
        "new_payoff": rational_json(&w.new_payoff),
        "gain": rational_json(&w.gain()),
        "new_signal": signal_to_json(game, &w.new_signal),
    })
}

pub fn verdict_name(v: &Verdict) -> &'static str {
    match v {
        Verdict::Refuted(_) => "refuted",
        Verdict::FullyInformativeConsistent => "fully-informative-consistent",
        Verdict::NoDeviationFound => "no-deviation-found",
    }
}

pub fn report_to_json(game: &GameSpec, report: &EquilibriumReport) -> Value {
    let mut v = json!({
        "verdict": verdict_name(&report.verdict),
        "payoffs": payoffs_to_json(&report.payoffs),
        "support_analysis": support_to_json(&report.support),
        "validation": validation_to_json(game, &report.validation),
    });
    match &report.verdict {
        Verdict::Refuted(w) => v["witness"] = witness_to_json(game, w),
        Verdict::NoDeviationFound => {
            v["disclaimer"] = json!("no deviation in the searched family is profitable; this does not certify an equilibrium")
        }
        Verdict::FullyInformativeConsistent => {}
    }
    v
}

pub fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize") + "\n"
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::{ecig, policy};
    use crate::persuasion::optimal_signal;
    use crate::rational::rat;

    #[test]
    fn game_round_trip() {
        for g in [ecig(), policy(rat(1, 10)), policy(rat(0, 1))] {
            let text = pretty(&game_to_json(&g));
            let back = parse_game(&text).unwrap();
            assert_eq!(back, g);
            assert_eq!(pretty(&game_to_json(&back)), text);
        }
    }

    #[test]
    fn decimals_are_exact() {
        let mut v = game_to_json(&ecig());
        for e in v["prior"].as_array_mut().unwrap() {
            let p = parse_rational(e["p"].as_str().unwrap()).unwrap();
            let hundredths = (p * Rational::from_integer(100.into())).to_integer();
            e["p"] = serde_json::from_str(&format!("0.{hundredths:02}")).unwrap();
        }
        let text = serde_json::to_string(&v).unwrap();
        assert!(text.contains("0.18"));
        assert_eq!(parse_game(&text).unwrap(), ecig());
    }

    #[test]
    fn prior_deficit_is_reported() {
        let mut v = game_to_json(&ecig());
        v["prior"][0]["p"] = json!("0.17");
        match parse_game(&v.to_string()) {
            Err(Error::PriorSum { deficit, .. }) => assert_eq!(deficit, rat(1, 100)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_context() {
        let mut v = game_to_json(&ecig());
        v["prior"][2]["p"] = json!("half");
        let err = parse_game(&serde_json::to_string_pretty(&v).unwrap()).unwrap_err().to_string();
        assert!(err.contains("prior[2].p"), "{err}");
        assert!(err.contains("line"), "{err}");

        v["prior"][2]["p"] = json!("0.12");
        v["prior"][2]["state"][1] = json!("Q");
        let err = parse_game(&v.to_string()).unwrap_err().to_string();
        assert!(err.contains("prior[2].state[1]"), "{err}");
    }

    #[test]
    fn signal_round_trip() {
        let g = ecig();
        let s = optimal_signal(&g, 0).unwrap().signal;
        let text = pretty(&signal_to_json(&g, &s));
        assert!(text.contains("\"1/3\""));
        assert_eq!(parse_signal(&g, &text).unwrap(), s);
    }

    #[test]
    fn signal_dist_may_omit_zeros() {
        let g = ecig();
        let text = r#"{"sender": 2, "rows": [
            {"state": ["M", "Y"], "dist": {"impose": 1}},
            {"state": ["M", "O"], "dist": {"impose": "1"}},
            {"state": ["W", "Y"], "dist": {"impose": 0.5, "status-quo": "1/2"}},
            {"state": ["W", "O"], "dist": {"status-quo": "1/1"}}
        ]}"#;
        let s = parse_signal(&g, text).unwrap();
        assert_eq!(s.sender(), 1);
        assert_eq!(s.prob((1, 0), 0), rat(1, 2));
        assert!(parse_signal(&g, &text.replace("\"sender\": 2", "\"sender\": 3")).is_err());
    }

    #[test]
    fn profile_files_resolve_relative_paths() {
        let g = ecig();
        let dir = tempfile::tempdir().unwrap();
        let s0 = Signal::constant(&g, 0, 0).unwrap();
        save_signal(&g, &s0, &dir.path().join("a.json")).unwrap();
        let inline = signal_to_json(&g, &Signal::constant(&g, 1, 1).unwrap());
        let text = json!({"strategies": [[{"signal": "a.json", "p": "1"}], [{"signal": inline, "p": 1}]]}).to_string();
        std::fs::write(dir.path().join("profile.json"), &text).unwrap();
        let m = load_profile(&g, &dir.path().join("profile.json")).unwrap();
        assert_eq!(m.strategies()[0][0].0, s0);
        assert!(m.is_pure());
    }

    #[test]
    fn load_game_accepts_builtins() {
        assert_eq!(load_game("ecig").unwrap(), ecig());
        assert_eq!(load_game("policy(1/10)").unwrap(), policy(rat(1, 10)));
        assert!(matches!(load_game("/nonexistent/game.json"), Err(Error::Io { .. })));
    }
}
