//! Signals, posteriors and the basic evaluations of a single signal.
//!
//! Messages are identified with actions: a signal of sender `i` maps each
//! positive-probability pair `(ω_i, ω_R)` to a distribution over the game's
//! actions, read as a recommendation.
//!
//! When a recommendation `a` is realized the receiver takes `a` itself if it
//! is optimal under the posterior (ties included), and otherwise the
//! lowest-index optimal action. On incentive-compatible signals this is plain
//! obedience; [`receiver_best_action`] without a recommendation breaks ties by
//! lowest index.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{GameSpec, Pair, State};
use crate::rational::{is_probability, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signal {
    sender: usize,
    rows: BTreeMap<Pair, Vec<Rational>>,
}

impl Signal {
    /// Validates that rows exist exactly for the positive-probability pairs of
    /// sender `sender` and that each row is a distribution over actions.
    pub fn new(game: &GameSpec, sender: usize, rows: BTreeMap<Pair, Vec<Rational>>) -> Result<Self> {
        game.check_sender(sender)?;
        let marginal = game.marginal_prior(sender);
        if rows.len() != marginal.len() || !marginal.keys().all(|k| rows.contains_key(k)) {
            let missing: Vec<_> = marginal.keys().filter(|k| !rows.contains_key(k)).collect();
            let extra: Vec<_> = rows.keys().filter(|k| !marginal.contains_key(k)).collect();
            return Err(Error::InvalidSignal(format!(
                "rows must cover exactly the positive-probability state pairs (missing {missing:?}, extra {extra:?})"
            )));
        }
        for (pair, row) in &rows {
            if row.len() != game.action_count() {
                return Err(Error::InvalidSignal(format!(
                    "row {pair:?} has {} entries, expected {}",
                    row.len(),
                    game.action_count()
                )));
            }
            if !row.iter().all(is_probability) {
                return Err(Error::InvalidSignal(format!("row {pair:?} has an entry outside [0, 1]")));
            }
            if !row.iter().sum::<Rational>().is_one() {
                return Err(Error::InvalidSignal(format!("row {pair:?} does not sum to 1")));
            }
        }
        Ok(Self { sender, rows })
    }

    pub fn from_fn(game: &GameSpec, sender: usize, mut row: impl FnMut(Pair) -> Vec<Rational>) -> Result<Self> {
        game.check_sender(sender)?;
        let rows = game.marginal_prior(sender).keys().map(|&p| (p, row(p))).collect();
        Self::new(game, sender, rows)
    }

    /// A signal recommending `choose(pair)` with certainty.
    pub fn deterministic(game: &GameSpec, sender: usize, mut choose: impl FnMut(Pair) -> usize) -> Result<Self> {
        let m = game.action_count();
        Self::from_fn(game, sender, |p| point_mass(m, choose(p)))
    }

    /// The uninformative signal that always recommends `action`.
    pub fn constant(game: &GameSpec, sender: usize, action: usize) -> Result<Self> {
        Self::deterministic(game, sender, |_| action)
    }

    pub(crate) fn from_parts(sender: usize, rows: BTreeMap<Pair, Vec<Rational>>) -> Self {
        Self { sender, rows }
    }

    pub fn sender(&self) -> usize {
        self.sender
    }

    pub fn rows(&self) -> &BTreeMap<Pair, Vec<Rational>> {
        &self.rows
    }

    pub fn row(&self, pair: Pair) -> Option<&[Rational]> {
        self.rows.get(&pair).map(Vec::as_slice)
    }

    /// `π(a | ω_i, ω_R)`; zero for pairs without a row.
    pub fn prob(&self, pair: Pair, action: usize) -> Rational {
        self.rows.get(&pair).map(|r| r[action].clone()).unwrap_or_else(Rational::zero)
    }

    /// True when every row is a point mass.
    pub fn is_deterministic(&self) -> bool {
        self.rows.values().all(|r| r.iter().all(|p| p.is_zero() || p.is_one()))
    }

    /// The same rows attributed to another sender; only meaningful when both
    /// senders have the same positive-probability pairs.
    pub fn reassigned(&self, game: &GameSpec, sender: usize) -> Result<Self> {
        Self::new(game, sender, self.rows.clone())
    }
}

pub(crate) fn point_mass(len: usize, at: usize) -> Vec<Rational> {
    (0..len).map(|k| if k == at { Rational::one() } else { Rational::zero() }).collect()
}

/// Bayes update of the prior on one realized recommendation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Belief {
    pub sender: usize,
    pub action: usize,
    pub distribution: BTreeMap<State, Rational>,
}

impl Belief {
    pub fn receiver_marginal(&self, game: &GameSpec) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); game.receiver_states().len()];
        for (s, p) in &self.distribution {
            out[game.receiver_coord(s)] += p;
        }
        out
    }

    pub fn sender_marginal(&self, game: &GameSpec, i: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); game.sender_states(i).len()];
        for (s, p) in &self.distribution {
            out[s[i]] += p;
        }
        out
    }

    /// Marginal on `Ω_i × Ω_R`, positive entries only.
    pub fn pair_marginal(&self, game: &GameSpec, i: usize) -> BTreeMap<Pair, Rational> {
        let mut out: BTreeMap<Pair, Rational> = BTreeMap::new();
        for (s, p) in &self.distribution {
            *out.entry(game.pair_of(i, s)).or_insert_with(Rational::zero) += p;
        }
        out
    }
}

/// Aggregate statistics of one positive-probability recommendation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessageOutcome {
    pub action: usize,
    pub probability: Rational,
    /// Joint mass `P(ω_R, π = a)` per receiver state (not normalized).
    pub receiver_mass: Vec<Rational>,
    /// The action the receiver takes on this recommendation.
    pub response: usize,
}

fn joint_weight(game: &GameSpec, pi: &Signal, state: &State, p: &Rational, a: usize) -> Rational {
    let row = &pi.rows[&game.pair_of(pi.sender, state)];
    p * &row[a]
}

/// Per-recommendation outcomes, in action order, omitting zero-probability
/// recommendations.
pub fn message_outcomes(game: &GameSpec, pi: &Signal) -> Vec<MessageOutcome> {
    let m = game.action_count();
    let nr = game.receiver_states().len();
    let mut mass = vec![vec![Rational::zero(); nr]; m];
    for (state, p) in game.prior() {
        let row = &pi.rows[&game.pair_of(pi.sender, state)];
        let r = game.receiver_coord(state);
        for (a, q) in row.iter().enumerate() {
            if !q.is_zero() {
                mass[a][r] += p * q;
            }
        }
    }
    mass.into_iter()
        .enumerate()
        .filter_map(|(a, receiver_mass)| {
            let probability: Rational = receiver_mass.iter().sum();
            if probability.is_zero() {
                return None;
            }
            let response = receiver_response(game, Some(a), &receiver_mass);
            Some(MessageOutcome { action: a, probability, receiver_mass, response })
        })
        .collect()
}

/// `P(π = a)`.
pub fn message_probability(game: &GameSpec, pi: &Signal, a: usize) -> Rational {
    game.prior().map(|(s, p)| joint_weight(game, pi, s, p, a)).sum()
}

pub fn posterior(game: &GameSpec, pi: &Signal, a: usize) -> Result<Belief> {
    let norm = message_probability(game, pi, a);
    if norm.is_zero() {
        return Err(Error::UnreachableMessage { action: game.actions()[a].clone() });
    }
    let distribution = game
        .prior()
        .filter_map(|(s, p)| {
            let w = joint_weight(game, pi, s, p, a);
            (!w.is_zero()).then(|| (s.clone(), w / &norm))
        })
        .collect();
    Ok(Belief { sender: pi.sender, action: a, distribution })
}

fn expected_receiver_utility(game: &GameSpec, action: usize, belief: &[Rational]) -> Rational {
    belief
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.is_zero())
        .map(|(r, p)| p * game.receiver_utility(action, r))
        .sum()
}

/// Optimal receiver action under a (possibly unnormalized) belief on `Ω_R`;
/// ties go to the lowest action index.
pub fn receiver_best_action(game: &GameSpec, belief_r: &[Rational]) -> usize {
    receiver_response(game, None, belief_r)
}

/// The receiver's action on a recommendation: the recommendation itself when
/// it is optimal, otherwise the lowest-index optimal action.
pub fn receiver_response(game: &GameSpec, recommended: Option<usize>, belief_r: &[Rational]) -> usize {
    let values: Vec<Rational> = (0..game.action_count())
        .map(|b| expected_receiver_utility(game, b, belief_r))
        .collect();
    let best = values.iter().max().expect("at least one action");
    match recommended {
        Some(a) if &values[a] == best => a,
        _ => values.iter().position(|v| v == best).unwrap(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IcViolation {
    pub action: usize,
    pub better_action: usize,
    /// Conditional expected gain of `better_action` over `action`.
    #[serde(with = "crate::rational::serde_rational")]
    pub gain: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IcReport {
    pub incentive_compatible: bool,
    pub violations: Vec<IcViolation>,
}

/// Weak obedience: every positive-probability recommendation attains the
/// maximum expected receiver utility under its posterior.
pub fn is_incentive_compatible(game: &GameSpec, pi: &Signal) -> IcReport {
    let violations: Vec<IcViolation> = message_outcomes(game, pi)
        .into_iter()
        .filter(|o| o.response != o.action)
        .map(|o| {
            let best = o.response;
            let diff = expected_receiver_utility(game, best, &o.receiver_mass)
                - expected_receiver_utility(game, o.action, &o.receiver_mass);
            IcViolation { action: o.action, better_action: best, gain: diff / &o.probability }
        })
        .collect();
    IcReport { incentive_compatible: violations.is_empty(), violations }
}

pub fn is_ic(game: &GameSpec, pi: &Signal) -> bool {
    message_outcomes(game, pi).iter().all(|o| o.response == o.action)
}

/// `v_R(π)`.
pub fn receiver_value(game: &GameSpec, pi: &Signal) -> Rational {
    message_outcomes(game, pi)
        .iter()
        .map(|o| expected_receiver_utility(game, o.response, &o.receiver_mass))
        .sum()
}

/// `v_k(π)`: sender `k`'s expected utility when the receiver responds to
/// `π`, which may belong to any sender.
pub fn sender_value(game: &GameSpec, k: usize, pi: &Signal) -> Rational {
    let responses: Vec<Option<usize>> = {
        let mut r = vec![None; game.action_count()];
        for o in message_outcomes(game, pi) {
            r[o.action] = Some(o.response);
        }
        r
    };
    let mut total = Rational::zero();
    for (state, p) in game.prior() {
        let row = &pi.rows[&game.pair_of(pi.sender, state)];
        for (a, q) in row.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            let b = responses[a].expect("positive-probability message has a response");
            total += p * q * game.sender_utility(k, b, state[k]);
        }
    }
    total
}

/// Both values at once, sharing one pass of outcome computation.
pub fn values(game: &GameSpec, k: usize, pi: &Signal) -> (Rational, Rational) {
    (receiver_value(game, pi), sender_value(game, k, pi))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InformativenessReport {
    pub fully_informative: bool,
    /// `(recommended action, receiver state)` where the recommendation is not
    /// the receiver's unique optimum.
    pub counterexample: Option<(usize, usize)>,
}

/// True iff every positive-probability recommendation is the receiver's
/// unique optimum at every receiver state in its posterior support.
/// Reports the first counterexample in (action, receiver state) order.
pub fn is_fully_informative(game: &GameSpec, pi: &Signal) -> InformativenessReport {
    let counterexample = message_outcomes(game, pi).iter().find_map(|o| {
        o.receiver_mass
            .iter()
            .enumerate()
            .find(|(r, p)| p.is_positive() && game.receiver_optimum(*r) != Some(o.action))
            .map(|(r, _)| (o.action, r))
    });
    InformativenessReport { fully_informative: counterexample.is_none(), counterexample }
}

/// The deterministic signal of sender `i` that recommends the receiver's
/// optimal action for `ω_R` in every state.
pub fn full_info_signal(game: &GameSpec, i: usize) -> Result<Signal> {
    game.check_sender(i)?;
    let mut optimum = Vec::new();
    for r in 0..game.receiver_states().len() {
        match game.receiver_optimum(r) {
            Some(a) => optimum.push(a),
            None => {
                return Err(Error::NotUniqueOptimum(format!(
                    "receiver has several optimal actions at {}",
                    game.receiver_states()[r]
                )))
            }
        }
    }
    Signal::deterministic(game, i, |(_, r)| optimum[r])
}

/// The receiver's value under full information, `Σ_ω μ0(ω) max_a u_R(a, ω_R)`.
pub fn full_information_value(game: &GameSpec) -> Rational {
    game.prior()
        .map(|(s, p)| {
            let r = game.receiver_coord(s);
            let best = (0..game.action_count()).map(|a| game.receiver_utility(a, r)).max().unwrap();
            p * best
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::{ecig, policy};
    use crate::rational::{int, rat};

    /// Expert plays "biased types recommend P, unbiased tell the truth".
    fn biased_p(game: &GameSpec, sender: usize) -> Signal {
        Signal::deterministic(game, sender, |(s, r)| if s >= 2 { r } else { 0 }).unwrap()
    }

    #[test]
    fn rejects_bad_rows() {
        let g = ecig();
        let mut rows: BTreeMap<Pair, Vec<Rational>> =
            g.marginal_prior(0).keys().map(|&p| (p, vec![rat(1, 2), rat(1, 2)])).collect();
        assert!(Signal::new(&g, 0, rows.clone()).is_ok());
        rows.insert((0, 0), vec![rat(1, 2), rat(1, 3)]);
        assert!(Signal::new(&g, 0, rows.clone()).is_err());
        rows.insert((0, 0), vec![rat(3, 2), rat(-1, 2)]);
        assert!(Signal::new(&g, 0, rows.clone()).is_err());
        rows.remove(&(0, 0));
        assert!(Signal::new(&g, 0, rows).is_err());
        // zero-probability pairs of policy(0) carry no row
        let g0 = policy(int(0));
        let full: BTreeMap<Pair, Vec<Rational>> =
            (0..4).map(|s| ((s, s % 2), vec![int(1), int(0)])).collect();
        assert!(Signal::new(&g0, 0, full).is_err());
    }

    #[test]
    fn message_probabilities() {
        let g = ecig();
        let fi = full_info_signal(&g, 0).unwrap();
        assert_eq!(message_probability(&g, &fi, 0), rat(1, 2));
        let c = Signal::constant(&g, 0, 1).unwrap();
        assert_eq!(message_probability(&g, &c, 1), int(1));
        assert_eq!(message_probability(&g, &c, 0), int(0));
        let p = policy(rat(1, 10));
        assert_eq!(message_probability(&p, &biased_p(&p, 0), 0), rat(19, 20));
    }

    #[test]
    fn posteriors() {
        let g = ecig();
        let fi = full_info_signal(&g, 0).unwrap();
        let b = posterior(&g, &fi, 0).unwrap();
        assert_eq!(b.receiver_marginal(&g), vec![int(1), int(0)]);

        let p = policy(rat(1, 10));
        let s = biased_p(&p, 0);
        let q = posterior(&p, &s, 1).unwrap();
        assert_eq!(q.receiver_marginal(&p), vec![int(0), int(1)]);
        let pp = posterior(&p, &s, 0).unwrap();
        assert_eq!(pp.receiver_marginal(&p)[0], rat(10, 19));
        let total: Rational = pp.distribution.values().sum();
        assert!(total.is_one());

        let c = Signal::constant(&g, 0, 1).unwrap();
        assert!(matches!(posterior(&g, &c, 0), Err(Error::UnreachableMessage { .. })));
    }

    #[test]
    fn best_actions() {
        let g = ecig();
        assert_eq!(receiver_best_action(&g, &[int(1), int(0)]), 0);
        assert_eq!(receiver_best_action(&g, &[rat(1, 2), rat(1, 2)]), 0);
        assert_eq!(receiver_response(&g, Some(1), &[rat(1, 2), rat(1, 2)]), 1);
        let p = policy(rat(1, 10));
        assert_eq!(receiver_best_action(&p, &[rat(10, 19), rat(9, 19)]), 0);
    }

    #[test]
    fn incentive_compatibility() {
        let g = ecig();
        assert!(is_incentive_compatible(&g, &full_info_signal(&g, 0).unwrap()).incentive_compatible);
        let p = policy(rat(1, 10));
        assert!(is_ic(&p, &biased_p(&p, 0)));
        // impose iff ω_1 = U: P(Y | U) = 2/5 < 1/2
        let s = Signal::deterministic(&g, 0, |(w1, _)| if w1 == 1 { 0 } else { 1 }).unwrap();
        let rep = is_incentive_compatible(&g, &s);
        assert!(!rep.incentive_compatible);
        assert_eq!(rep.violations[0].action, 0);
        assert_eq!(rep.violations[0].better_action, 1);
        assert_eq!(rep.violations[0].gain, rat(1, 5));
    }

    #[test]
    fn values_match_examples() {
        let p = policy(rat(1, 10));
        assert_eq!(receiver_value(&p, &biased_p(&p, 0)), rat(11, 20));
        assert_eq!(sender_value(&p, 0, &biased_p(&p, 0)), int(1));
        let pfi = full_info_signal(&p, 0).unwrap();
        assert_eq!(receiver_value(&p, &pfi), int(1));
        assert_eq!(sender_value(&p, 0, &pfi), rat(11, 20));

        let g = ecig();
        let fi = full_info_signal(&g, 0).unwrap();
        assert_eq!(receiver_value(&g, &fi), int(1));
        assert_eq!(sender_value(&g, 0, &fi), rat(2, 5));
        assert_eq!(sender_value(&g, 1, &fi), rat(2, 5));
        assert_eq!(receiver_value(&g, &Signal::constant(&g, 0, 0).unwrap()), rat(1, 2));
        assert_eq!(receiver_value(&g, &Signal::constant(&g, 0, 1).unwrap()), rat(1, 2));
    }

    #[test]
    fn aligned_sender_value_equals_receiver_value() {
        let g = GameSpec::new(
            vec![vec!["a".into(), "b".into()], vec!["c".into()]],
            vec!["a".into(), "b".into()],
            vec!["x".into(), "y".into(), "z".into()],
            vec![(vec![0, 0, 0], rat(1, 4)), (vec![1, 0, 1], rat(3, 4))],
            vec![
                vec![vec![int(3), int(0)], vec![int(1), int(1)], vec![int(0), int(2)]],
                vec![vec![int(0)], vec![int(0)], vec![int(0)]],
            ],
            vec![vec![int(3), int(0)], vec![int(1), int(1)], vec![int(0), int(2)]],
        )
        .unwrap();
        for s in [
            Signal::constant(&g, 0, 1).unwrap(),
            Signal::deterministic(&g, 0, |(a, _)| 2 * a).unwrap(),
            full_info_signal(&g, 0).unwrap(),
        ] {
            assert_eq!(sender_value(&g, 0, &s), receiver_value(&g, &s));
        }
    }

    #[test]
    fn full_informativeness() {
        let g = ecig();
        assert!(is_fully_informative(&g, &full_info_signal(&g, 0).unwrap()).fully_informative);
        let p = policy(rat(1, 10));
        let rep = is_fully_informative(&p, &biased_p(&p, 0));
        assert_eq!(rep.counterexample, Some((0, 1)));
        let rep = is_fully_informative(&g, &Signal::constant(&g, 0, 1).unwrap());
        assert_eq!(rep.counterexample, Some((1, 0)));
    }

    #[test]
    fn full_info_rows_depend_on_receiver_state_only() {
        let g = ecig();
        let fi = full_info_signal(&g, 0).unwrap();
        for (&(_, r), row) in fi.rows() {
            assert_eq!(row, &point_mass(2, r).as_slice());
        }
        assert_eq!(full_information_value(&g), int(1));
    }
}
