//! Signal-to-signal transformations available to a deviating sender.
//!
//! * [`simulate`]: sender `i` replicates the joint law of recommendations and
//!   `(ω_i, ω_R)` induced by another sender's signal.
//! * [`alignment_witness`]: a state of sender `i`, compatible with a realized
//!   recommendation and receiver state, in which `i` wants what the receiver
//!   wants.
//! * [`improve`]: on top of a simulation, leak the receiver's optimal action
//!   with small probability, but only in witness states. Both the receiver
//!   and sender `i` strictly gain whenever the base signal is incentive
//!   compatible and not fully informative.
//! * [`mix_with_full_info`]: the convex combination with the fully
//!   informative signal.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{GameSpec, Pair};
use crate::rational::{rat, serde_rational, Rational};
use crate::signal::{full_info_signal, message_outcomes, Signal};

/// Sender `i`'s replica of `pi_j`:
/// `π_i(a | ω_i, ω_R) = P(π_j = a, ω_i, ω_R) / P(ω_i, ω_R)`.
pub fn simulate(game: &GameSpec, i: usize, pi_j: &Signal) -> Result<Signal> {
    game.check_sender(i)?;
    if pi_j.sender() == i {
        return Err(Error::InvalidSignal(format!(
            "sender {} cannot simulate its own signal",
            i + 1
        )));
    }
    let m = game.action_count();
    let mut joint: BTreeMap<Pair, Vec<Rational>> = BTreeMap::new();
    for (state, p) in game.prior() {
        let src = pi_j.row(game.pair_of(pi_j.sender(), state)).expect("signal conforms to game");
        let acc = joint
            .entry(game.pair_of(i, state))
            .or_insert_with(|| vec![Rational::zero(); m]);
        for (a, q) in src.iter().enumerate() {
            acc[a] += p * q;
        }
    }
    let marginal = game.marginal_prior(i);
    let rows = joint
        .into_iter()
        .map(|(pair, w)| {
            let denom = &marginal[&pair];
            (pair, w.into_iter().map(|x| x / denom).collect())
        })
        .collect();
    Ok(Signal::from_parts(i, rows))
}

/// Joint posterior `P(ω_i, ω_R | π = a)` restricted to `ω_R = omega_r`,
/// indexed by `ω_i`.
fn joint_posterior_column(game: &GameSpec, i: usize, pi: &Signal, a: usize, omega_r: usize) -> (Vec<Rational>, Rational) {
    let mut column = vec![Rational::zero(); game.sender_states(i).len()];
    let mut total = Rational::zero();
    for (state, p) in game.prior() {
        let q = pi.prob(game.pair_of(pi.sender(), state), a);
        if q.is_zero() {
            continue;
        }
        let w = p * q;
        total += &w;
        if game.receiver_coord(state) == omega_r {
            column[state[i]] += w;
        }
    }
    if !total.is_zero() {
        for c in column.iter_mut() {
            *c /= &total;
        }
    }
    (column, total)
}

/// A state `ω_i` of sender `i` with `P(ω_i, ω_R | π = a) > 0` whose unique
/// optimal action is the receiver's unique optimum at `omega_r`. Among
/// several, the one with the largest joint posterior mass, then the lowest
/// index.
pub fn alignment_witness(game: &GameSpec, i: usize, pi: &Signal, a: usize, omega_r: usize) -> Result<usize> {
    game.check_sender(i)?;
    if pi.sender() == i {
        return Err(Error::InvalidSignal("alignment witnesses are taken against another sender's signal".into()));
    }
    let target = game.receiver_optimum(omega_r).ok_or_else(|| {
        Error::NotUniqueOptimum(format!("receiver optimum at {} is not unique", game.receiver_states()[omega_r]))
    })?;
    let (column, total) = joint_posterior_column(game, i, pi, a, omega_r);
    if total.is_zero() {
        return Err(Error::UnreachableMessage { action: game.actions()[a].clone() });
    }
    if column.iter().all(Zero::is_zero) {
        return Err(Error::InvalidSignal(format!(
            "receiver state {} is outside the posterior support of {}",
            game.receiver_states()[omega_r],
            game.actions()[a]
        )));
    }
    let mut best: Option<(usize, &Rational)> = None;
    for (s, mass) in column.iter().enumerate() {
        if mass.is_positive() && game.sender_optimum(i, s) == Some(target) {
            if best.map_or(true, |(_, m)| mass > m) {
                best = Some((s, mass));
            }
        }
    }
    best.map(|(s, _)| s).ok_or_else(|| {
        Error::NoAlignedWitness(format!(
            "sender {} has no state aligned with the receiver at {} given recommendation {}",
            i + 1,
            game.receiver_states()[omega_r],
            game.actions()[a]
        ))
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Reroute {
    pub omega_r: usize,
    /// The witness state `ω_i` in which the leak fires.
    pub witness: usize,
    /// The receiver's unique optimum at `omega_r`.
    pub action: usize,
    /// Probability of replacing the base recommendation in state `(witness, omega_r)`.
    #[serde(with = "serde_rational")]
    pub probability: Rational,
}

/// Audit record of one [`improve`] call.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImprovementTrace {
    pub base_action: usize,
    pub target_states: Vec<Reroute>,
    #[serde(with = "serde_rational")]
    pub epsilon: Rational,
    /// Largest ε keeping every reroute probability at most one.
    #[serde(with = "serde_rational")]
    pub cap: Rational,
}

/// Strict improvement of sender `i` over another sender's signal `pi_j`.
///
/// The simulation of `pi_j` is modified at the lowest-index recommendation
/// `ā` whose posterior support contains a receiver state where `ā` is not the
/// unique optimum. For every `ω_R` in that support, in the witness state
/// `(ω_i^b, ω_R)` the recommendation `ā` is replaced by the receiver's optimum
/// `b` with probability `ε · P(ω_R | ā) / P(ω_i^b, ω_R | ā)`, so that
/// conditional on `ā` each action `b` is leaked with probability
/// `ε · P(ω_R ∈ Λ^b | ā)`.
///
/// Without `epsilon`, half the feasibility cap is used.
pub fn improve(
    game: &GameSpec,
    i: usize,
    pi_j: &Signal,
    epsilon: Option<Rational>,
) -> Result<(Signal, ImprovementTrace)> {
    let base = simulate(game, i, pi_j)?;
    let outcomes = message_outcomes(game, &base);
    let (bar, support) = outcomes
        .iter()
        .find_map(|o| {
            let pooled = o
                .receiver_mass
                .iter()
                .enumerate()
                .any(|(r, p)| p.is_positive() && game.receiver_optimum(r) != Some(o.action));
            pooled.then_some((o.action, o))
        })
        .ok_or(Error::NothingToImprove)?;

    // (ω_R, witness, b, P(ω_R | ā), P((witness, ω_R) | ā))
    let mut targets = Vec::new();
    for (r, mass) in support.receiver_mass.iter().enumerate() {
        if !mass.is_positive() {
            continue;
        }
        let b = game.receiver_optimum(r).ok_or_else(|| {
            Error::NotUniqueOptimum(format!("receiver optimum at {} is not unique", game.receiver_states()[r]))
        })?;
        let witness = alignment_witness(game, i, pi_j, bar, r)?;
        let (column, _) = joint_posterior_column(game, i, &base, bar, r);
        let cond_r = mass / &support.probability;
        targets.push((r, witness, b, cond_r, column[witness].clone()));
    }

    let cap = targets
        .iter()
        .map(|(_, _, _, cond_r, joint)| joint / cond_r)
        .min()
        .expect("support is non-empty");
    let epsilon = match epsilon {
        None => &cap * rat(1, 2),
        Some(e) if !e.is_positive() => {
            return Err(Error::EpsilonOutOfRange { epsilon: e, range: "(0, cap]" });
        }
        Some(e) if e > cap => return Err(Error::EpsilonAboveCap { epsilon: e, cap }),
        Some(e) => e,
    };

    let mut rows = base.rows().clone();
    let mut target_states = Vec::with_capacity(targets.len());
    for (r, witness, b, cond_r, joint) in targets {
        let probability = &epsilon * cond_r / joint;
        if b != bar {
            let row = rows.get_mut(&(witness, r)).expect("witness pair has positive mass");
            let moved = &probability * &row[bar];
            row[bar] -= &moved;
            row[b] += moved;
        }
        target_states.push(Reroute { omega_r: r, witness, action: b, probability });
    }
    let improved = Signal::from_parts(i, rows);
    Ok((improved, ImprovementTrace { base_action: bar, target_states, epsilon, cap }))
}

/// Row-wise `(1 − ε)·π + ε·full_info`, for `ε ∈ (0, 1)`.
pub fn mix_with_full_info(game: &GameSpec, pi: &Signal, epsilon: &Rational) -> Result<Signal> {
    if !epsilon.is_positive() || *epsilon >= Rational::one() {
        return Err(Error::EpsilonOutOfRange { epsilon: epsilon.clone(), range: "(0, 1)" });
    }
    let full = full_info_signal(game, pi.sender())?;
    let keep = Rational::one() - epsilon;
    let rows = pi
        .rows()
        .iter()
        .map(|(pair, row)| {
            let fi = full.row(*pair).expect("same pair set");
            let mixed = row.iter().zip(fi).map(|(p, f)| &keep * p + epsilon * f).collect();
            (*pair, mixed)
        })
        .collect();
    Ok(Signal::from_parts(pi.sender(), rows))
}
