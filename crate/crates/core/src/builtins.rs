//! The two motivating games, generated in code.
//!
//! * `policy(ε)`: a policymaker decides whether to implement a policy (`P`)
//!   or keep the status quo (`Q`); the policy is beneficial or harmful with
//!   equal probability. Each of two experts is independently unbiased with
//!   probability `ε` and observes his own type and the policy's benefit.
//!   Biased experts always want `P`, unbiased ones agree with the
//!   policymaker. All utilities are 0/1.
//! * `ecig`: a regulator decides whether to impose restrictions on
//!   e-cigarettes. Expert 1 wants them iff e-cigarettes are unhealthy (`U`),
//!   expert 2 iff cigarettes are more popular with women (`W`), the
//!   regulator iff e-cigarettes raise youth smoking (`Y`).

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::game::GameSpec;
use crate::rational::{int, parse_rational, rat, Rational};

pub const POLICY_SENDER_STATES: [&str; 4] =
    ["biased-beneficial", "biased-harmful", "unbiased-beneficial", "unbiased-harmful"];

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn indicator(b: bool) -> Rational {
    if b {
        Rational::one()
    } else {
        Rational::zero()
    }
}

/// Example game with two experts of uncertain bias; `epsilon` is the
/// probability that each expert is unbiased. Panics unless `0 ≤ ε ≤ 1`.
pub fn policy(epsilon: Rational) -> GameSpec {
    assert!(
        !(epsilon < Rational::zero()) && epsilon <= Rational::one(),
        "policy(ε) needs 0 ≤ ε ≤ 1"
    );
    let half = rat(1, 2);
    let type_prob = |unbiased: bool| if unbiased { epsilon.clone() } else { Rational::one() - &epsilon };
    // sender state index = 2 * unbiased + harmful
    let mut prior = Vec::new();
    for t1 in [false, true] {
        for t2 in [false, true] {
            for harmful in [0usize, 1] {
                let s1 = 2 * usize::from(t1) + harmful;
                let s2 = 2 * usize::from(t2) + harmful;
                prior.push((vec![s1, s2, harmful], &half * type_prob(t1) * type_prob(t2)));
            }
        }
    }
    // action 0 = P (implement), 1 = Q (status quo)
    let expert: Vec<Vec<Rational>> = (0..2)
        .map(|a| {
            (0..4)
                .map(|s| {
                    let unbiased = s >= 2;
                    let harmful = s % 2 == 1;
                    let preferred = if unbiased && harmful { 1 } else { 0 };
                    indicator(a == preferred)
                })
                .collect()
        })
        .collect();
    let receiver = (0..2).map(|a| (0..2).map(|r| indicator(a == r)).collect()).collect();
    GameSpec::new(
        vec![strings(&POLICY_SENDER_STATES), strings(&POLICY_SENDER_STATES)],
        strings(&["beneficial", "harmful"]),
        strings(&["P", "Q"]),
        prior,
        vec![expert.clone(), expert],
        receiver,
    )
    .expect("policy game is well formed")
}

/// Example game with the regulator and two lobbyists.
pub fn ecig() -> GameSpec {
    // (expert 2 state, expert 1 state, regulator state) -> hundredths
    let table: [(&str, &str, &str, i64); 8] = [
        ("M", "H", "Y", 18),
        ("M", "H", "O", 8),
        ("M", "U", "Y", 12),
        ("M", "U", "O", 12),
        ("W", "H", "Y", 12),
        ("W", "H", "O", 12),
        ("W", "U", "Y", 8),
        ("W", "U", "O", 18),
    ];
    let idx = |s: &str, xs: [&str; 2]| xs.iter().position(|x| *x == s).unwrap();
    let prior = table.iter().map(|&(w2, w1, wr, p)| {
        (vec![idx(w1, ["H", "U"]), idx(w2, ["M", "W"]), idx(wr, ["Y", "O"])], rat(p, 100))
    });
    // action 0 = impose, 1 = status-quo; every player prefers imposing in state index 1
    // except the regulator, who prefers it in state index 0 (Y)
    let expert = || -> Vec<Vec<Rational>> {
        vec![vec![int(0), int(1)], vec![int(1), int(0)]]
    };
    let regulator = vec![vec![int(1), int(0)], vec![int(0), int(1)]];
    GameSpec::new(
        vec![strings(&["H", "U"]), strings(&["M", "W"])],
        strings(&["Y", "O"]),
        strings(&["impose", "status-quo"]),
        prior,
        vec![expert(), expert()],
        regulator,
    )
    .expect("ecig game is well formed")
}

/// Resolves `ecig`, `policy` (ε = 1/10) or `policy(<rational>)`.
pub fn by_name(name: &str) -> Result<GameSpec> {
    let name = name.trim();
    if name == "ecig" {
        return Ok(ecig());
    }
    if name == "policy" {
        return Ok(policy(rat(1, 10)));
    }
    if let Some(arg) = name.strip_prefix("policy(").and_then(|r| r.strip_suffix(')')) {
        let eps = parse_rational(arg)?;
        if eps < Rational::zero() || eps > Rational::one() {
            return Err(Error::Parse(format!("policy ε must lie in [0, 1], got {arg}")));
        }
        return Ok(policy(eps));
    }
    Err(Error::Parse(format!("unknown builtin game {name:?}")))
}

pub fn is_builtin_name(name: &str) -> bool {
    let name = name.trim();
    name == "ecig" || name == "policy" || (name.starts_with("policy(") && name.ends_with(')'))
}
