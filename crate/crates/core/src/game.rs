//! Finite competing-senders games and the standing assumptions on them.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A full state tuple `(ω_1, …, ω_n, ω_R)` as label indices; the receiver's
/// coordinate is last.
pub type State = Vec<usize>;

/// An `(ω_i, ω_R)` pair for one sender.
pub type Pair = (usize, usize);

/// The primitives of a game: state spaces, common prior, actions and
/// state-dependent utilities. Every player's utility depends on the action
/// and on that player's own state coordinate only.
///
/// Instances are immutable and always structurally valid: the prior is
/// non-negative and sums to exactly one, every index is in range and every
/// utility table is total. Zero-probability prior entries are dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameSpec {
    sender_states: Vec<Vec<String>>,
    receiver_states: Vec<String>,
    actions: Vec<String>,
    prior: BTreeMap<State, Rational>,
    sender_utility: Vec<Vec<Vec<Rational>>>,
    receiver_utility: Vec<Vec<Rational>>,
    pair_marginals: Vec<BTreeMap<Pair, Rational>>,
}

impl GameSpec {
    /// Builds a game.
    ///
    /// `sender_utility[i][a][ω_i]` and `receiver_utility[a][ω_R]` are indexed
    /// by action first.
    pub fn new(
        sender_states: Vec<Vec<String>>,
        receiver_states: Vec<String>,
        actions: Vec<String>,
        prior: impl IntoIterator<Item = (State, Rational)>,
        sender_utility: Vec<Vec<Vec<Rational>>>,
        receiver_utility: Vec<Vec<Rational>>,
    ) -> Result<Self> {
        let n = sender_states.len();
        let malformed = |msg: String| Err(Error::MalformedGame(msg));
        if n == 0 {
            return malformed("at least one sender is required".into());
        }
        if actions.is_empty() || receiver_states.is_empty() {
            return malformed("action and receiver state sets must be non-empty".into());
        }
        for (i, states) in sender_states.iter().enumerate() {
            if states.is_empty() {
                return malformed(format!("sender {} has no states", i + 1));
            }
            check_unique(states, &format!("sender {} states", i + 1))?;
        }
        check_unique(&receiver_states, "receiver states")?;
        check_unique(&actions, "actions")?;

        let mut table = BTreeMap::new();
        let mut sum = Rational::zero();
        for (state, p) in prior {
            if state.len() != n + 1 {
                return malformed(format!("prior state {state:?} has {} coordinates, expected {}", state.len(), n + 1));
            }
            for (k, &idx) in state.iter().enumerate() {
                let size = if k < n { sender_states[k].len() } else { receiver_states.len() };
                if idx >= size {
                    return malformed(format!("prior state {state:?}: coordinate {k} out of range"));
                }
            }
            if p.is_negative() {
                return malformed(format!("negative prior probability at {state:?}"));
            }
            sum += &p;
            if table.insert(state.clone(), p).is_some() {
                return malformed(format!("duplicate prior entry for {state:?}"));
            }
        }
        if !sum.is_one() {
            let deficit = Rational::one() - &sum;
            return Err(Error::PriorSum { sum, deficit });
        }
        table.retain(|_, p| !p.is_zero());

        if sender_utility.len() != n {
            return malformed(format!("{} sender utility tables for {n} senders", sender_utility.len()));
        }
        for (i, table_i) in sender_utility.iter().enumerate() {
            check_table(table_i, actions.len(), sender_states[i].len(), &format!("sender {} utility", i + 1))?;
        }
        check_table(&receiver_utility, actions.len(), receiver_states.len(), "receiver utility")?;

        let pair_marginals = (0..n)
            .map(|i| {
                let mut m: BTreeMap<Pair, Rational> = BTreeMap::new();
                for (state, p) in &table {
                    *m.entry((state[i], state[n])).or_insert_with(Rational::zero) += p;
                }
                m
            })
            .collect();

        Ok(Self {
            sender_states,
            receiver_states,
            actions,
            prior: table,
            sender_utility,
            receiver_utility,
            pair_marginals,
        })
    }

    pub fn sender_count(&self) -> usize {
        self.sender_states.len()
    }

    pub fn sender_states(&self, i: usize) -> &[String] {
        &self.sender_states[i]
    }

    pub fn receiver_states(&self) -> &[String] {
        &self.receiver_states
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn action_count(&self) -> usize {
        self.actions.len()
    }

    /// Positive-probability prior entries in canonical (lexicographic) order.
    pub fn prior(&self) -> impl Iterator<Item = (&State, &Rational)> {
        self.prior.iter()
    }

    pub fn prior_of(&self, state: &[usize]) -> Rational {
        self.prior.get(state).cloned().unwrap_or_else(Rational::zero)
    }

    /// Receiver coordinate of a full state.
    pub fn receiver_coord(&self, state: &[usize]) -> usize {
        state[self.sender_count()]
    }

    /// `(ω_i, ω_R)` projection of a full state.
    pub fn pair_of(&self, i: usize, state: &[usize]) -> Pair {
        (state[i], state[self.sender_count()])
    }

    /// Marginal prior on `Ω_i × Ω_R`, positive entries only.
    pub fn marginal_prior(&self, i: usize) -> &BTreeMap<Pair, Rational> {
        &self.pair_marginals[i]
    }

    pub fn sender_utility(&self, i: usize, action: usize, state: usize) -> &Rational {
        &self.sender_utility[i][action][state]
    }

    pub fn receiver_utility(&self, action: usize, state: usize) -> &Rational {
        &self.receiver_utility[action][state]
    }

    pub fn sender_utility_table(&self, i: usize) -> &[Vec<Rational>] {
        &self.sender_utility[i]
    }

    pub fn receiver_utility_table(&self) -> &[Vec<Rational>] {
        &self.receiver_utility
    }

    /// All maximizers of the receiver's utility at `ω_R`, ascending.
    pub fn receiver_optima(&self, omega_r: usize) -> Vec<usize> {
        argmax_set((0..self.action_count()).map(|a| &self.receiver_utility[a][omega_r]))
    }

    pub fn sender_optima(&self, i: usize, omega_i: usize) -> Vec<usize> {
        argmax_set((0..self.action_count()).map(|a| &self.sender_utility[i][a][omega_i]))
    }

    /// The receiver's optimal action at `ω_R` when it is unique.
    pub fn receiver_optimum(&self, omega_r: usize) -> Option<usize> {
        single(self.receiver_optima(omega_r))
    }

    pub fn sender_optimum(&self, i: usize, omega_i: usize) -> Option<usize> {
        single(self.sender_optima(i, omega_i))
    }

    pub fn action_index(&self, label: &str) -> Option<usize> {
        self.actions.iter().position(|a| a == label)
    }

    pub(crate) fn check_sender(&self, i: usize) -> Result<()> {
        if i < self.sender_count() {
            Ok(())
        } else {
            Err(Error::InvalidProfile(format!(
                "sender index {} out of range 1..={}",
                i + 1,
                self.sender_count()
            )))
        }
    }
}

fn check_unique(labels: &[String], what: &str) -> Result<()> {
    let mut seen = std::collections::BTreeSet::new();
    for l in labels {
        if !seen.insert(l) {
            return Err(Error::MalformedGame(format!("duplicate label {l:?} in {what}")));
        }
    }
    Ok(())
}

fn check_table(table: &[Vec<Rational>], actions: usize, states: usize, what: &str) -> Result<()> {
    if table.len() != actions || table.iter().any(|row| row.len() != states) {
        return Err(Error::MalformedGame(format!(
            "{what} table must be {actions} actions x {states} states"
        )));
    }
    Ok(())
}

fn argmax_set<'a>(values: impl Iterator<Item = &'a Rational>) -> Vec<usize> {
    let mut best: Option<&Rational> = None;
    let mut set = Vec::new();
    for (k, v) in values.enumerate() {
        match best {
            Some(b) if v < b => {}
            Some(b) if v == b => set.push(k),
            _ => {
                best = Some(v);
                set.clear();
                set.push(k);
            }
        }
    }
    set
}

fn single(set: Vec<usize>) -> Option<usize> {
    match set.as_slice() {
        [a] => Some(*a),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Player {
    Sender(usize),
    Receiver,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Assumption1Violation {
    pub player: Player,
    pub state: usize,
}

/// Sender `i` has no aligned state compatible with `(ω_j, ω_R)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Assumption2Violation {
    pub i: usize,
    pub j: usize,
    pub omega_j: usize,
    pub omega_r: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub prior_ok: bool,
    pub assumption1_ok: bool,
    pub assumption1_violations: Vec<Assumption1Violation>,
    pub assumption2_ok: bool,
    pub assumption2_violations: Vec<Assumption2Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.prior_ok && self.assumption1_ok && self.assumption2_ok
    }
}

/// Checks unique optimal actions per player state, and that for every
/// ordered pair of senders `i ≠ j` each positive-probability `(ω_j, ω_R)` is
/// compatible with some `ω_i` whose unique optimum is the receiver's.
///
/// Structural problems (prior not summing to one) are rejected earlier, by
/// [`GameSpec::new`].
pub fn validate_game(game: &GameSpec) -> ValidationReport {
    let n = game.sender_count();
    let mut a1 = Vec::new();
    for i in 0..n {
        for s in 0..game.sender_states(i).len() {
            if game.sender_optimum(i, s).is_none() {
                a1.push(Assumption1Violation { player: Player::Sender(i), state: s });
            }
        }
    }
    for r in 0..game.receiver_states().len() {
        if game.receiver_optimum(r).is_none() {
            a1.push(Assumption1Violation { player: Player::Receiver, state: r });
        }
    }

    let mut a2 = Vec::new();
    for j in 0..n {
        for i in (0..n).filter(|&i| i != j) {
            for &(omega_j, omega_r) in game.marginal_prior(j).keys() {
                let target = game.receiver_optimum(omega_r);
                let aligned = game.prior().any(|(state, _)| {
                    state[j] == omega_j
                        && state[n] == omega_r
                        && target.is_some()
                        && game.sender_optimum(i, state[i]) == target
                });
                if !aligned {
                    a2.push(Assumption2Violation { i, j, omega_j, omega_r });
                }
            }
        }
    }

    ValidationReport {
        prior_ok: true,
        assumption1_ok: a1.is_empty(),
        assumption1_violations: a1,
        assumption2_ok: a2.is_empty(),
        assumption2_violations: a2,
    }
}

/// Alias of [`GameSpec::marginal_prior`] returning an owned map.
pub fn marginal_prior(game: &GameSpec, i: usize) -> BTreeMap<Pair, Rational> {
    game.marginal_prior(i).clone()
}
