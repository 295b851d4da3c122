//! The single-sender benchmark: sender `i`'s best incentive-compatible
//! signal, solved as an obedience-constrained LP.
//!
//! Variables `x(ω_i, ω_R, a) ≥ 0` are joint probabilities of a state pair and
//! a recommendation; zero-probability pairs are excluded.

use serde::Serialize;

use crate::error::Result;
use crate::game::{GameSpec, Pair};
use crate::lp::{solve_lp, LpProblem, LpSolution, LpStatus};
use crate::rational::Rational;
use crate::signal::Signal;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LpSummary {
    pub variables: usize,
    pub equality_constraints: usize,
    pub obedience_constraints: usize,
    pub pivots: usize,
}

#[derive(Debug, Clone)]
pub struct OptimalSignal {
    pub signal: Signal,
    pub value: Rational,
    pub summary: LpSummary,
    pub solution: LpSolution,
}

/// Builds the obedience LP for sender `i`, returning the problem and its
/// variable layout `(pair, action)`.
pub fn persuasion_lp(game: &GameSpec, i: usize) -> Result<(LpProblem, Vec<(Pair, usize)>)> {
    game.check_sender(i)?;
    let m = game.action_count();
    let pairs: Vec<Pair> = game.marginal_prior(i).keys().copied().collect();
    let layout: Vec<(Pair, usize)> = pairs.iter().flat_map(|&p| (0..m).map(move |a| (p, a))).collect();
    let names = layout
        .iter()
        .map(|&((s, r), a)| {
            format!(
                "x[{},{},{}]",
                game.sender_states(i)[s],
                game.receiver_states()[r],
                game.actions()[a]
            )
        })
        .collect();
    let objective = layout.iter().map(|&((s, _), a)| game.sender_utility(i, a, s).clone()).collect();
    let mut lp = LpProblem::new(names, objective);
    let zero = || vec![Rational::from_integer(0.into()); layout.len()];

    for (k, pair) in pairs.iter().enumerate() {
        let mut row = zero();
        for a in 0..m {
            row[k * m + a] = Rational::from_integer(1.into());
        }
        lp.add_equality(row, game.marginal_prior(i)[pair].clone());
    }
    for a in 0..m {
        for b in (0..m).filter(|&b| b != a) {
            let mut row = zero();
            for (k, &(_, r)) in pairs.iter().enumerate() {
                row[k * m + a] = game.receiver_utility(a, r) - game.receiver_utility(b, r);
            }
            lp.add_inequality(row, Rational::from_integer(0.into()));
        }
    }
    Ok((lp, layout))
}

/// Sender `i`'s value-maximizing IC signal and its exact value.
pub fn optimal_signal(game: &GameSpec, i: usize) -> Result<OptimalSignal> {
    let (lp, layout) = persuasion_lp(game, i)?;
    let solution = solve_lp(&lp);
    // the fully informative signal is always feasible
    assert_eq!(solution.status, LpStatus::Optimal, "persuasion LP is feasible and bounded");
    let m = game.action_count();
    let marginal = game.marginal_prior(i);
    let mut rows = std::collections::BTreeMap::new();
    for (k, chunk) in solution.assignment.chunks(m).enumerate() {
        let pair = layout[k * m].0;
        let denom = &marginal[&pair];
        rows.insert(pair, chunk.iter().map(|x| x / denom).collect::<Vec<_>>());
    }
    let signal = Signal::new(game, i, rows)?;
    let summary = LpSummary {
        variables: layout.len(),
        equality_constraints: lp.equalities.len(),
        obedience_constraints: lp.inequalities.len(),
        pivots: solution.pivots,
    };
    Ok(OptimalSignal { signal, value: solution.objective_value.clone(), summary, solution })
}

/// The LP assignment encoding a signal: `x(pair, a) = μ0(pair) · π(a | pair)`.
pub fn encode_signal(game: &GameSpec, pi: &Signal) -> Vec<Rational> {
    let marginal = game.marginal_prior(pi.sender());
    pi.rows()
        .iter()
        .flat_map(|(pair, row)| row.iter().map(move |q| &marginal[pair] * q))
        .collect()
}
