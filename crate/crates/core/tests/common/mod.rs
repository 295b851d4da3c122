//! Seeded random games and signals for the property and acceptance suites.
#![allow(dead_code)]

use std::collections::BTreeMap;

use persuasion_core::game::{validate_game, GameSpec};
use persuasion_core::rational::{int, Rational};
use persuasion_core::signal::{message_outcomes, Signal};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub senders: usize,
    pub max_sender_states: usize,
    pub max_receiver_states: usize,
    pub max_actions: usize,
}

pub const SMALL: Shape = Shape { senders: 2, max_sender_states: 3, max_receiver_states: 3, max_actions: 3 };

/// Sizes for which the resolution-4 grid stays under the enumeration bound.
pub const TINY: Shape = Shape { senders: 2, max_sender_states: 2, max_receiver_states: 2, max_actions: 3 };

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|k| format!("{prefix}{k}")).collect()
}

/// A utility table `[action][state]` with a unique maximizer in every state.
fn strict_table(rng: &mut TestRng, actions: usize, states: usize) -> Vec<Vec<Rational>> {
    let mut t = vec![vec![int(0); states]; actions];
    for s in 0..states {
        loop {
            let col: Vec<i64> = (0..actions).map(|_| rng.random_range(-3..=5)).collect();
            let best = *col.iter().max().unwrap();
            if col.iter().filter(|&&v| v == best).count() == 1 {
                for (a, v) in col.into_iter().enumerate() {
                    t[a][s] = int(v);
                }
                break;
            }
        }
    }
    t
}

fn all_states(dims: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &d in dims {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..d).map(move |x| {
                    let mut s = prefix.clone();
                    s.push(x);
                    s
                })
            })
            .collect();
    }
    out
}

/// A random game satisfying both standing assumptions.
pub fn random_game(rng: &mut TestRng, shape: Shape) -> GameSpec {
    loop {
        let game = random_game_unchecked(rng, shape);
        if validate_game(&game).ok() {
            return game;
        }
    }
}

/// A random game with unique optima everywhere but no alignment guarantee.
pub fn random_game_unchecked(rng: &mut TestRng, shape: Shape) -> GameSpec {
    loop {
        let m = rng.random_range(2..=shape.max_actions);
        let nr = rng.random_range(2..=shape.max_receiver_states);
        let dims: Vec<usize> = (0..shape.senders).map(|_| rng.random_range(1..=shape.max_sender_states)).collect();
        let mut full_dims = dims.clone();
        full_dims.push(nr);
        let mut prior: Vec<(Vec<usize>, i64)> = all_states(&full_dims)
            .into_iter()
            .filter_map(|s| rng.random_bool(0.8).then(|| (s, rng.random_range(1..=9))))
            .collect();
        if prior.is_empty() {
            continue;
        }
        let total: i64 = prior.iter().map(|(_, w)| w).sum();
        let prior: Vec<(Vec<usize>, Rational)> = prior
            .drain(..)
            .map(|(s, w)| (s, Rational::new(w.into(), total.into())))
            .collect();
        let game = GameSpec::new(
            dims.iter().enumerate().map(|(i, &d)| labels(&format!("s{}_", i + 1), d)).collect(),
            labels("r", nr),
            labels("a", m),
            prior,
            dims.iter().map(|&d| strict_table(rng, m, d)).collect(),
            strict_table(rng, m, nr),
        )
        .expect("generated game is well formed");
        return game;
    }
}

/// A random signal of sender `i` with small-denominator rows.
pub fn random_signal(rng: &mut TestRng, game: &GameSpec, i: usize) -> Signal {
    let m = game.action_count();
    Signal::from_fn(game, i, |_| {
        if rng.random_bool(0.4) {
            let mut row = vec![int(0); m];
            row[rng.random_range(0..m)] = int(1);
            return row;
        }
        let w: Vec<i64> = (0..m).map(|_| rng.random_range(0..=4)).collect();
        let total: i64 = w.iter().sum();
        if total == 0 {
            let mut row = vec![int(0); m];
            row[0] = int(1);
            return row;
        }
        w.into_iter().map(|x| Rational::new(x.into(), total.into())).collect()
    })
    .expect("rows are distributions")
}

/// Moves every message's mass to the receiver's response to it; the result
/// is incentive compatible and has the same values.
pub fn obedient(game: &GameSpec, pi: &Signal) -> Signal {
    let mut response: Vec<usize> = (0..game.action_count()).collect();
    for o in message_outcomes(game, pi) {
        response[o.action] = o.response;
    }
    let rows: BTreeMap<_, _> = pi
        .rows()
        .iter()
        .map(|(&pair, row)| {
            let mut out = vec![int(0); row.len()];
            for (a, q) in row.iter().enumerate() {
                out[response[a]] += q;
            }
            (pair, out)
        })
        .collect();
    Signal::new(game, pi.sender(), rows).expect("relabelled rows are distributions")
}

pub fn random_ic_signal(rng: &mut TestRng, game: &GameSpec, i: usize) -> Signal {
    let pi = random_signal(rng, game, i);
    obedient(game, &pi)
}
