//! Exhaustive enumeration over finite signal classes, used to cross-check the
//! LP, the constructions and the deviation search on small games.
//!
//! A grid signal of resolution `K` has every row on the lattice
//! `{q / K : q ∈ ℕ^m, Σq = K}`. Signals are indexed in a canonical order:
//! rows vary in mixed radix with the first state pair most significant, and
//! lattice points within a row run in descending lexicographic order, so
//! point masses appear as `e_0, e_1, …`. Every reduction breaks ties by
//! the lowest canonical index.

use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::equilibrium::PureProfile;
use crate::error::{Error, Result};
use crate::game::{GameSpec, Pair};
use crate::rational::Rational;
use crate::signal::{values, Signal};

pub const DEFAULT_ENUMERATION_BOUND: u64 = 1_000_000;

/// Environment variable overriding [`DEFAULT_ENUMERATION_BOUND`] in the CLI.
pub const BOUND_ENV: &str = "PERSUASION_ORACLE_BOUND";

/// The lattice for one sender at resolution `K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSpec {
    pub resolution: u32,
    pub pairs: usize,
    pub actions: usize,
}

impl GridSpec {
    pub fn new(game: &GameSpec, i: usize, resolution: u32) -> Result<Self> {
        game.check_sender(i)?;
        if resolution == 0 {
            return Err(Error::Parse("grid resolution must be a positive integer".into()));
        }
        Ok(Self { resolution, pairs: game.marginal_prior(i).len(), actions: game.action_count() })
    }

    /// `C(K + m − 1, m − 1)`.
    pub fn row_count(&self) -> BigUint {
        binomial(self.resolution as u64 + self.actions as u64 - 1, self.actions as u64 - 1)
    }

    /// `C(K + m − 1, m − 1)^r`.
    pub fn signal_count(&self) -> BigUint {
        num_traits::pow(self.row_count(), self.pairs)
    }
}

fn binomial(n: u64, k: u64) -> BigUint {
    (0..k).fold(BigUint::one(), |acc, j| acc * BigUint::from(n - j) / BigUint::from(j + 1))
}

/// Compositions of `k` into `m` non-negative parts, descending lexicographic.
fn compositions(k: u32, m: usize) -> Vec<Vec<u32>> {
    if m == 1 {
        return vec![vec![k]];
    }
    let mut out = Vec::new();
    for first in (0..=k).rev() {
        for mut rest in compositions(k - first, m - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// A random-access view of an enumerated signal class.
#[derive(Debug, Clone)]
pub struct SignalGrid {
    sender: usize,
    pairs: Vec<Pair>,
    lattice: Vec<Vec<Rational>>,
    len: u64,
}

impl SignalGrid {
    fn build(game: &GameSpec, i: usize, spec: &GridSpec, bound: u64) -> Result<Self> {
        let count = spec.signal_count();
        let len = count.to_u64().filter(|&c| c <= bound).ok_or_else(|| Error::TooLarge {
            count: count.to_string(),
            bound,
        })?;
        let k = Rational::from_integer(spec.resolution.into());
        let lattice = compositions(spec.resolution, spec.actions)
            .into_iter()
            .map(|q| q.into_iter().map(|x| Rational::from_integer(x.into()) / &k).collect())
            .collect();
        Ok(Self { sender: i, pairs: game.marginal_prior(i).keys().copied().collect(), lattice, len })
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Lattice index of each row of the `index`-th signal.
    fn digits(&self, mut index: u64) -> Vec<usize> {
        let base = self.lattice.len() as u64;
        let mut d = vec![0; self.pairs.len()];
        for slot in d.iter_mut().rev() {
            *slot = (index % base) as usize;
            index /= base;
        }
        d
    }

    pub fn get(&self, index: u64) -> Signal {
        assert!(index < self.len, "grid index out of range");
        let rows = self
            .pairs
            .iter()
            .zip(self.digits(index))
            .map(|(&p, d)| (p, self.lattice[d].clone()))
            .collect();
        Signal::from_parts(self.sender, rows)
    }

    pub fn iter(&self) -> impl Iterator<Item = Signal> + '_ {
        (0..self.len).map(move |k| self.get(k))
    }

    pub fn par_iter(&self) -> impl ParallelIterator<Item = (u64, Signal)> + '_ {
        (0..self.len).into_par_iter().map(move |k| (k, self.get(k)))
    }
}

/// Every deterministic signal of sender `i`, once each, in canonical order.
pub fn enumerate_deterministic_signals(game: &GameSpec, i: usize) -> Result<SignalGrid> {
    enumerate_deterministic_signals_bounded(game, i, DEFAULT_ENUMERATION_BOUND)
}

pub fn enumerate_deterministic_signals_bounded(game: &GameSpec, i: usize, bound: u64) -> Result<SignalGrid> {
    grid_signals_bounded(game, i, 1, bound)
}

/// Every signal of sender `i` whose rows lie on the resolution-`K` lattice.
pub fn grid_signals(game: &GameSpec, i: usize, resolution: u32) -> Result<SignalGrid> {
    grid_signals_bounded(game, i, resolution, DEFAULT_ENUMERATION_BOUND)
}

pub fn grid_signals_bounded(game: &GameSpec, i: usize, resolution: u32, bound: u64) -> Result<SignalGrid> {
    let spec = GridSpec::new(game, i, resolution)?;
    SignalGrid::build(game, i, &spec, bound)
}

/// Keeps the larger value, and the lower index on ties.
fn better(a: Option<(u64, Rational)>, b: Option<(u64, Rational)>) -> Option<(u64, Rational)> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => {
            if y.1 > x.1 || (y.1 == x.1 && y.0 < x.0) {
                Some(y)
            } else {
                Some(x)
            }
        }
    }
}

/// Contributions of one row to the obedience constraints and the value,
/// indexed like the persuasion LP: `(a, b)` for `a ≠ b`, then the value.
fn row_contributions(game: &GameSpec, i: usize, pair: Pair, row: &[Rational]) -> Vec<Rational> {
    let m = game.action_count();
    let (s, r) = pair;
    let mu = &game.marginal_prior(i)[&pair];
    let mut out = Vec::with_capacity(m * m);
    for a in 0..m {
        for b in (0..m).filter(|&b| b != a) {
            out.push(mu * &row[a] * (game.receiver_utility(a, r) - game.receiver_utility(b, r)));
        }
    }
    out.push((0..m).map(|a| mu * &row[a] * game.sender_utility(i, a, s)).sum());
    out
}

/// Sender `i`'s best incentive-compatible grid signal and its value.
/// Obedience is checked before the value is compared.
pub fn brute_force_optimal_signal(game: &GameSpec, i: usize, resolution: u32) -> Result<(Signal, Rational)> {
    brute_force_optimal_signal_bounded(game, i, resolution, DEFAULT_ENUMERATION_BOUND)
}

pub fn brute_force_optimal_signal_bounded(
    game: &GameSpec,
    i: usize,
    resolution: u32,
    bound: u64,
) -> Result<(Signal, Rational)> {
    let grid = grid_signals_bounded(game, i, resolution, bound)?;
    // table[pair][lattice point] → contributions
    let table: Vec<Vec<Vec<Rational>>> = grid
        .pairs
        .iter()
        .map(|&p| grid.lattice.iter().map(|row| row_contributions(game, i, p, row)).collect())
        .collect();
    let width = table.first().map_or(1, |t| t[0].len());
    let best = (0..grid.len)
        .into_par_iter()
        .map(|k| {
            let mut acc = vec![Rational::zero(); width];
            for (t, d) in table.iter().zip(grid.digits(k)) {
                for (x, c) in acc.iter_mut().zip(&t[d]) {
                    *x += c;
                }
            }
            let value = acc.pop().expect("value slot");
            acc.iter().all(|x| !x.is_negative()).then_some((k, value))
        })
        .reduce(|| None, better)
        .expect("the fully informative rows are on every grid");
    Ok((grid.get(best.0), best.1))
}

/// The best grid deviation for sender `i` against a pure profile, with the
/// exact expected payoff under the uniform decision rule.
#[derive(Debug, Clone)]
pub struct BestDeviation {
    pub signal: Signal,
    pub payoff: Rational,
    /// Sender `i`'s payoff before deviating.
    pub current: Rational,
}

impl BestDeviation {
    pub fn improves(&self) -> bool {
        self.payoff > self.current
    }
}

pub fn brute_force_best_deviation(
    game: &GameSpec,
    profile: &PureProfile,
    i: usize,
    resolution: u32,
) -> Result<BestDeviation> {
    brute_force_best_deviation_bounded(game, profile, i, resolution, DEFAULT_ENUMERATION_BOUND)
}

pub fn brute_force_best_deviation_bounded(
    game: &GameSpec,
    profile: &PureProfile,
    i: usize,
    resolution: u32,
    bound: u64,
) -> Result<BestDeviation> {
    let grid = grid_signals_bounded(game, i, resolution, bound)?;
    let current = uniform_payoff(&decide_values(game, profile.signals(), i));
    let others: Vec<(Rational, Rational)> = profile
        .signals()
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != i)
        .map(|(_, s)| values(game, i, s))
        .collect();
    let (k, payoff) = grid
        .par_iter()
        .map(|(k, s)| {
            let mut all = others.clone();
            all.push(values(game, i, &s));
            Some((k, uniform_payoff(&all)))
        })
        .reduce(|| None, better)
        .expect("grids are non-empty");
    Ok(BestDeviation { signal: grid.get(k), payoff, current })
}

fn decide_values(game: &GameSpec, signals: &[Signal], i: usize) -> Vec<(Rational, Rational)> {
    signals.iter().map(|s| values(game, i, s)).collect()
}

/// Average sender value over the receiver-value argmax.
fn uniform_payoff(vals: &[(Rational, Rational)]) -> Rational {
    let top = vals.iter().map(|(r, _)| r).max().expect("non-empty");
    let chosen: Vec<&Rational> = vals.iter().filter(|(r, _)| r == top).map(|(_, v)| v).collect();
    let n = Rational::from_integer(chosen.len().into());
    chosen.into_iter().sum::<Rational>() / n
}
