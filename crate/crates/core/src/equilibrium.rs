//! Profiles, the receiver's choice of sender, and equilibrium refutation.
//!
//! The receiver sees every sender's committed signal, keeps the senders whose
//! signals give him the highest value and picks one of them uniformly at
//! random. Mixed profiles have finite support and are evaluated by exact
//! enumeration of the realized signal vectors.
//!
//! [`find_profitable_deviation`] searches a finite, theorem-backed family of
//! deviations: improving on another sender's potentially chosen signal,
//! simulating it, revealing everything, and mixing one's own signal with full
//! revelation. Finding nothing is not an equilibrium certificate.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::constructions::{improve, mix_with_full_info, simulate};
use crate::error::{Error, Result};
use crate::game::{validate_game, GameSpec, ValidationReport};
use crate::rational::{rat, serde_rational, Rational};
use crate::signal::{full_info_signal, is_fully_informative, receiver_value, sender_value, Signal};

/// Default cap on the number of realized signal vectors of a mixed profile.
pub const DEFAULT_REALIZATION_BOUND: u64 = 10_000;

/// One signal per sender, in sender order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PureProfile {
    signals: Vec<Signal>,
}

impl PureProfile {
    pub fn new(game: &GameSpec, signals: Vec<Signal>) -> Result<Self> {
        if signals.len() != game.sender_count() {
            return Err(Error::InvalidProfile(format!(
                "{} signals for {} senders",
                signals.len(),
                game.sender_count()
            )));
        }
        for (i, s) in signals.iter().enumerate() {
            if s.sender() != i {
                return Err(Error::InvalidProfile(format!(
                    "position {} holds a signal of sender {}",
                    i + 1,
                    s.sender() + 1
                )));
            }
        }
        Ok(Self { signals })
    }

    pub fn signals(&self) -> &[Signal] {
        &self.signals
    }

    pub fn with_signal(&self, signal: Signal) -> Self {
        let mut signals = self.signals.clone();
        let i = signal.sender();
        signals[i] = signal;
        Self { signals }
    }
}

/// A finite-support distribution over signals for every sender.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedProfile {
    strategies: Vec<Vec<(Signal, Rational)>>,
}

impl MixedProfile {
    pub fn new(game: &GameSpec, strategies: Vec<Vec<(Signal, Rational)>>) -> Result<Self> {
        if strategies.len() != game.sender_count() {
            return Err(Error::InvalidProfile(format!(
                "{} strategies for {} senders",
                strategies.len(),
                game.sender_count()
            )));
        }
        for (i, strategy) in strategies.iter().enumerate() {
            if strategy.is_empty() {
                return Err(Error::InvalidProfile(format!("sender {} has an empty support", i + 1)));
            }
            if strategy.iter().any(|(s, p)| s.sender() != i || !p.is_positive()) {
                return Err(Error::InvalidProfile(format!(
                    "sender {} support needs own signals with positive weights",
                    i + 1
                )));
            }
            let total: Rational = strategy.iter().map(|(_, p)| p.clone()).sum();
            if !total.is_one() {
                return Err(Error::InvalidProfile(format!("sender {} weights do not sum to 1", i + 1)));
            }
        }
        Ok(Self { strategies })
    }

    pub fn strategies(&self) -> &[Vec<(Signal, Rational)>] {
        &self.strategies
    }

    pub fn is_pure(&self) -> bool {
        self.strategies.iter().all(|s| s.len() == 1)
    }

    pub fn realization_count(&self) -> u128 {
        self.strategies.iter().map(|s| s.len() as u128).product()
    }
}

impl From<&PureProfile> for MixedProfile {
    fn from(p: &PureProfile) -> Self {
        Self { strategies: p.signals.iter().map(|s| vec![(s.clone(), Rational::one())]).collect() }
    }
}

/// Uniform choice among the senders whose signals maximize the receiver's
/// value. Returns `(sender, probability)` pairs in sender order.
pub fn decide(game: &GameSpec, signals: &[Signal]) -> Vec<(usize, Rational)> {
    let values: Vec<Rational> = signals.iter().map(|s| receiver_value(game, s)).collect();
    uniform_argmax(&values)
}

fn uniform_argmax(values: &[Rational]) -> Vec<(usize, Rational)> {
    let Some(best) = values.iter().max() else {
        return Vec::new();
    };
    let set: Vec<usize> = (0..values.len()).filter(|&k| &values[k] == best).collect();
    let w = rat(1, set.len() as i64);
    set.into_iter().map(|k| (k, w.clone())).collect()
}

/// One realized signal vector of a (mixed) profile.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Realization {
    #[serde(with = "serde_rational")]
    pub probability: Rational,
    /// Support index of the realized signal, per sender.
    pub support_indices: Vec<usize>,
    /// The receiver's argmax set; each member is chosen with probability
    /// `1 / chosen.len()`.
    pub chosen: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfilePayoffs {
    pub receiver_value: Rational,
    pub sender_values: Vec<Rational>,
    pub realizations: Vec<Realization>,
}

/// Signal values computed once per support entry.
#[derive(Debug, Clone)]
struct Evaluated {
    weight: Rational,
    receiver: Rational,
    senders: Vec<Rational>,
}

fn evaluate(game: &GameSpec, signal: &Signal, weight: Rational) -> Evaluated {
    Evaluated {
        weight,
        receiver: receiver_value(game, signal),
        senders: (0..game.sender_count()).map(|k| sender_value(game, k, signal)).collect(),
    }
}

fn evaluate_profile(game: &GameSpec, profile: &MixedProfile) -> Vec<Vec<Evaluated>> {
    profile
        .strategies
        .par_iter()
        .map(|strategy| strategy.iter().map(|(s, p)| evaluate(game, s, p.clone())).collect())
        .collect()
}

fn check_bound(count: u128, bound: u64) -> Result<()> {
    if count > u128::from(bound) {
        return Err(Error::TooLarge { count: count.to_string(), bound });
    }
    Ok(())
}

/// Calls `visit(indices)` for every element of the support product, in
/// lexicographic order.
fn for_each_realization(sizes: &[usize], mut visit: impl FnMut(&[usize])) {
    let mut idx = vec![0usize; sizes.len()];
    loop {
        visit(&idx);
        let mut k = sizes.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < sizes[k] {
                break;
            }
            idx[k] = 0;
        }
    }
}

fn payoffs_from_table(table: &[Vec<Evaluated>], keep_realizations: bool) -> ProfilePayoffs {
    let n = table.len();
    let sizes: Vec<usize> = table.iter().map(Vec::len).collect();
    let mut receiver = Rational::zero();
    let mut senders = vec![Rational::zero(); n];
    let mut realizations = Vec::new();
    for_each_realization(&sizes, |idx| {
        let entries: Vec<&Evaluated> = idx.iter().enumerate().map(|(k, &j)| &table[k][j]).collect();
        let prob: Rational = entries.iter().map(|e| e.weight.clone()).product();
        let values: Vec<Rational> = entries.iter().map(|e| e.receiver.clone()).collect();
        let choice = uniform_argmax(&values);
        for (k, w) in &choice {
            let pw = &prob * w;
            receiver += &pw * &entries[*k].receiver;
            for (s, acc) in senders.iter_mut().enumerate() {
                *acc += &pw * &entries[*k].senders[s];
            }
        }
        if keep_realizations {
            realizations.push(Realization {
                probability: prob,
                support_indices: idx.to_vec(),
                chosen: choice.into_iter().map(|(k, _)| k).collect(),
            });
        }
    });
    ProfilePayoffs { receiver_value: receiver, sender_values: senders, realizations }
}

/// `E[v_R]` and `E[v_i]` under the uniform decision rule.
pub fn profile_payoffs(game: &GameSpec, profile: &PureProfile) -> ProfilePayoffs {
    let table = evaluate_profile(game, &MixedProfile::from(profile));
    payoffs_from_table(&table, true)
}

/// Exact expectation over the product of supports; errors when the number of
/// realizations exceeds `bound`.
pub fn mixed_profile_payoffs(game: &GameSpec, profile: &MixedProfile, bound: u64) -> Result<ProfilePayoffs> {
    check_bound(profile.realization_count(), bound)?;
    let table = evaluate_profile(game, profile);
    Ok(payoffs_from_table(&table, true))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SenderSupport {
    /// Distinct receiver values of the support signals, ascending (`T_i`).
    #[serde(serialize_with = "serialize_rationals")]
    pub receiver_values: Vec<Rational>,
    /// `τ_i = min T_i`.
    #[serde(with = "serde_rational")]
    pub tau: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupportAnalysis {
    pub senders: Vec<SenderSupport>,
    /// `τ = max_i τ_i`.
    #[serde(with = "serde_rational")]
    pub tau: Rational,
    /// Whether every sender has `τ_i = τ`; equilibria must satisfy this.
    pub all_tau_equal: bool,
    /// `(sender, support index)` of signals with receiver value below `τ`,
    /// which the receiver never picks.
    pub never_chosen: Vec<(usize, usize)>,
}

fn serialize_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(crate::rational::format_rational))
}

pub fn support_analysis(profile: &MixedProfile, game: &GameSpec) -> SupportAnalysis {
    let per_signal: Vec<Vec<Rational>> = profile
        .strategies
        .iter()
        .map(|st| st.iter().map(|(s, _)| receiver_value(game, s)).collect())
        .collect();
    support_from_values(&per_signal)
}

fn support_from_values(per_signal: &[Vec<Rational>]) -> SupportAnalysis {
    let senders: Vec<SenderSupport> = per_signal
        .iter()
        .map(|vals| {
            let mut t = vals.clone();
            t.sort();
            t.dedup();
            SenderSupport { tau: t[0].clone(), receiver_values: t }
        })
        .collect();
    let tau = senders.iter().map(|s| s.tau.clone()).max().expect("at least one sender");
    let all_tau_equal = senders.iter().all(|s| s.tau == tau);
    let never_chosen = per_signal
        .iter()
        .enumerate()
        .flat_map(|(i, vals)| {
            let tau = &tau;
            vals.iter().enumerate().filter(move |(_, v)| *v < tau).map(move |(j, _)| (i, j))
        })
        .collect();
    SupportAnalysis { senders, tau, all_tau_equal, never_chosen }
}

/// How a deviation was built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    ImproveOnChosen,
    Simulate,
    FullInfo,
    EpsMix,
}

/// A strictly profitable unilateral deviation to a single signal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviationWitness {
    pub deviator: usize,
    pub new_signal: Signal,
    pub old_payoff: Rational,
    pub new_payoff: Rational,
    pub construction: Construction,
    /// `(sender, support index)` of the signal the deviation was built from.
    pub source: Option<(usize, usize)>,
    /// Mixing weight for [`Construction::EpsMix`].
    pub epsilon: Option<Rational>,
}

impl DeviationWitness {
    pub fn gain(&self) -> Rational {
        &self.new_payoff - &self.old_payoff
    }

    /// Recomputes both payoffs from scratch and checks the strict gap.
    pub fn replays(&self, game: &GameSpec, profile: &MixedProfile, bound: u64) -> Result<bool> {
        let before = mixed_profile_payoffs(game, profile, bound)?;
        let mut strategies = profile.strategies.clone();
        strategies[self.deviator] = vec![(self.new_signal.clone(), Rational::one())];
        let after = mixed_profile_payoffs(game, &MixedProfile::new(game, strategies)?, bound)?;
        let old = &before.sender_values[self.deviator];
        let new = &after.sender_values[self.deviator];
        Ok(old == &self.old_payoff && new == &self.new_payoff && new > old)
    }
}

/// Geometric mixing weights `1/2, 1/4, …, 1/1024` tried for [`Construction::EpsMix`].
pub fn eps_schedule() -> Vec<Rational> {
    (1..=10).map(|k| rat(1, 1i64 << k)).collect()
}

struct Candidate {
    signal: Signal,
    construction: Construction,
    source: Option<(usize, usize)>,
    epsilon: Option<Rational>,
}

/// Searches, in order: improvements on other senders' potentially chosen
/// signals (best for `i` first), simulations of the same signals, `i`'s fully
/// informative signal, and mixtures of each of `i`'s own support signals with
/// full revelation. Returns the first candidate whose exact payoff strictly
/// beats `i`'s current payoff.
pub fn find_profitable_deviation(
    game: &GameSpec,
    profile: &MixedProfile,
    i: usize,
) -> Result<Option<DeviationWitness>> {
    find_profitable_deviation_bounded(game, profile, i, DEFAULT_REALIZATION_BOUND)
}

pub fn find_profitable_deviation_bounded(
    game: &GameSpec,
    profile: &MixedProfile,
    i: usize,
    bound: u64,
) -> Result<Option<DeviationWitness>> {
    game.check_sender(i)?;
    check_bound(profile.realization_count(), bound)?;
    let table = evaluate_profile(game, profile);
    let current = payoffs_from_table(&table, false).sender_values[i].clone();
    let support = support_from_values(
        &table.iter().map(|st| st.iter().map(|e| e.receiver.clone()).collect()).collect::<Vec<_>>(),
    );

    // other senders' potentially chosen signals, best for i first
    let mut others: Vec<(usize, usize)> = (0..game.sender_count())
        .filter(|&k| k != i)
        .flat_map(|k| (0..table[k].len()).map(move |j| (k, j)))
        .filter(|&(k, j)| table[k][j].receiver >= support.tau)
        .collect();
    others.sort_by(|a, b| table[b.0][b.1].senders[i].cmp(&table[a.0][a.1].senders[i]).then(a.cmp(b)));

    let strategies = profile.strategies();
    let mut candidates = Vec::new();
    for &(k, j) in &others {
        if let Ok((signal, _)) = improve(game, i, &strategies[k][j].0, None) {
            candidates.push(Candidate { signal, construction: Construction::ImproveOnChosen, source: Some((k, j)), epsilon: None });
        }
    }
    for &(k, j) in &others {
        if let Ok(signal) = simulate(game, i, &strategies[k][j].0) {
            candidates.push(Candidate { signal, construction: Construction::Simulate, source: Some((k, j)), epsilon: None });
        }
    }
    let full = full_info_signal(game, i).ok();
    if let Some(fi) = &full {
        candidates.push(Candidate { signal: fi.clone(), construction: Construction::FullInfo, source: None, epsilon: None });
    }
    if let Some(fi) = &full {
        let full_value = sender_value(game, i, fi);
        for (j, (own, _)) in strategies[i].iter().enumerate() {
            let mut schedule = eps_schedule();
            // exact threshold for becoming the unique choice without giving up
            // more than the gap to the current payoff
            let own_value = &table[i][j].senders[i];
            if own_value > &current && own_value > &full_value {
                let threshold = (own_value - &current) / (own_value - &full_value);
                let eps = &threshold * rat(1, 2);
                if eps < *schedule.last().unwrap() {
                    schedule.push(eps);
                }
            }
            for eps in schedule {
                if let Ok(signal) = mix_with_full_info(game, own, &eps) {
                    candidates.push(Candidate { signal, construction: Construction::EpsMix, source: Some((i, j)), epsilon: Some(eps) });
                }
            }
        }
    }

    let found = candidates.into_par_iter().find_map_first(|c| {
        let mut t = table.clone();
        t[i] = vec![evaluate(game, &c.signal, Rational::one())];
        let payoff = payoffs_from_table(&t, false).sender_values[i].clone();
        (payoff > current).then(|| DeviationWitness {
            deviator: i,
            new_signal: c.signal,
            old_payoff: current.clone(),
            new_payoff: payoff,
            construction: c.construction,
            source: c.source,
            epsilon: c.epsilon,
        })
    });
    Ok(found)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// Some sender has a strictly profitable deviation; not an equilibrium.
    Refuted(DeviationWitness),
    /// Every signal chosen with positive probability is fully informative.
    FullyInformativeConsistent,
    /// A non-fully-informative signal is chosen but no deviation in the
    /// searched family is profitable. Not an equilibrium certificate.
    NoDeviationFound,
}

#[derive(Debug, Clone)]
pub struct EquilibriumReport {
    pub verdict: Verdict,
    pub validation: ValidationReport,
    pub payoffs: ProfilePayoffs,
    pub support: SupportAnalysis,
}

/// Refutes a profile whose positively chosen signals are not all fully
/// informative, by searching each sender's deviations in turn. Assumption
/// failures do not abort the search; they are reported in
/// [`EquilibriumReport::validation`].
pub fn check_equilibrium(game: &GameSpec, profile: &MixedProfile) -> Result<EquilibriumReport> {
    check_equilibrium_bounded(game, profile, DEFAULT_REALIZATION_BOUND)
}

pub fn check_equilibrium_bounded(game: &GameSpec, profile: &MixedProfile, bound: u64) -> Result<EquilibriumReport> {
    let validation = validate_game(game);
    let payoffs = mixed_profile_payoffs(game, profile, bound)?;
    let support = support_analysis(profile, game);
    let informative: Vec<Vec<bool>> = profile
        .strategies
        .iter()
        .map(|st| st.iter().map(|(s, _)| is_fully_informative(game, s).fully_informative).collect())
        .collect();
    let pooled_choice = payoffs.realizations.iter().any(|r| {
        r.chosen.iter().any(|&k| !informative[k][r.support_indices[k]])
    });
    let verdict = if !pooled_choice {
        Verdict::FullyInformativeConsistent
    } else {
        let mut verdict = Verdict::NoDeviationFound;
        for i in 0..game.sender_count() {
            if let Some(w) = find_profitable_deviation_bounded(game, profile, i, bound)? {
                verdict = Verdict::Refuted(w);
                break;
            }
        }
        verdict
    };
    Ok(EquilibriumReport { verdict, validation, payoffs, support })
}

/// Sender `i`'s payoff after deviating to `deviation` when the receiver,
/// among his optimal choices, picks the one worst for `i`.
pub fn pessimistic_payoff(game: &GameSpec, profile: &PureProfile, i: usize, deviation: &Signal) -> Result<Rational> {
    game.check_sender(i)?;
    if deviation.sender() != i {
        return Err(Error::InvalidProfile("deviation must be a signal of the deviating sender".into()));
    }
    let after = profile.with_signal(deviation.clone());
    let choice = decide(game, after.signals());
    Ok(choice
        .iter()
        .map(|(k, _)| sender_value(game, i, &after.signals()[*k]))
        .min()
        .expect("argmax set is non-empty"))
}

/// `v_i` of the chosen signal averaged over the uniform rule, for one pure
/// profile; shorthand for `profile_payoffs(..).sender_values[i]`.
pub fn uniform_payoff(game: &GameSpec, profile: &PureProfile, i: usize) -> Rational {
    let choice = decide(game, profile.signals());
    choice
        .iter()
        .map(|(k, w)| w * sender_value(game, i, &profile.signals()[*k]))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::{ecig, policy};
    use crate::persuasion::optimal_signal;
    use crate::rational::int;

    fn biased_p(game: &GameSpec, sender: usize) -> Signal {
        Signal::deterministic(game, sender, |(s, r)| if s >= 2 { r } else { 0 }).unwrap()
    }

    fn full_info_profile(game: &GameSpec) -> PureProfile {
        let signals = (0..game.sender_count()).map(|i| full_info_signal(game, i).unwrap()).collect();
        PureProfile::new(game, signals).unwrap()
    }

    #[test]
    fn decide_examples() {
        let g = ecig();
        let c0 = Signal::constant(&g, 0, 0).unwrap();
        let c1 = Signal::constant(&g, 1, 0).unwrap();
        assert_eq!(decide(&g, &[c0.clone(), c1]), vec![(0, rat(1, 2)), (1, rat(1, 2))]);
        let fi1 = full_info_signal(&g, 1).unwrap();
        assert_eq!(decide(&g, &[c0, fi1.clone()]), vec![(1, int(1))]);
        let opt = optimal_signal(&g, 0).unwrap().signal;
        assert!(receiver_value(&g, &opt) < int(1));
        assert_eq!(decide(&g, &[opt, fi1]), vec![(1, int(1))]);
    }

    #[test]
    fn full_info_payoffs() {
        let g = ecig();
        let p = profile_payoffs(&g, &full_info_profile(&g));
        assert_eq!(p.receiver_value, int(1));
        assert_eq!(p.sender_values, vec![rat(2, 5), rat(2, 5)]);

        let g = policy(rat(1, 10));
        let p = profile_payoffs(&g, &full_info_profile(&g));
        assert_eq!(p.receiver_value, int(1));
        assert_eq!(p.sender_values, vec![rat(11, 20), rat(11, 20)]);
    }

    #[test]
    fn singleton_argmax_payoffs() {
        let g = ecig();
        let fi = full_info_signal(&g, 0).unwrap();
        let c = Signal::constant(&g, 1, 1).unwrap();
        let p = profile_payoffs(&g, &PureProfile::new(&g, vec![fi.clone(), c]).unwrap());
        assert_eq!(p.receiver_value, receiver_value(&g, &fi));
        assert_eq!(p.sender_values[1], sender_value(&g, 1, &fi));
        assert_eq!(p.realizations[0].chosen, vec![0]);
    }

    #[test]
    fn mixed_payoffs() {
        let g = ecig();
        let pure = full_info_profile(&g);
        let mixed = MixedProfile::from(&pure);
        let a = mixed_profile_payoffs(&g, &mixed, 10).unwrap();
        let b = profile_payoffs(&g, &pure);
        assert_eq!(a.sender_values, b.sender_values);
        assert_eq!(a.receiver_value, b.receiver_value);

        let fi0 = full_info_signal(&g, 0).unwrap();
        let c0 = Signal::constant(&g, 0, 0).unwrap();
        let fi1 = full_info_signal(&g, 1).unwrap();
        let m = MixedProfile::new(&g, vec![vec![(fi0, rat(1, 2)), (c0, rat(1, 2))], vec![(fi1, int(1))]]).unwrap();
        let p = mixed_profile_payoffs(&g, &m, 10).unwrap();
        assert_eq!(p.receiver_value, int(1));
        assert_eq!(p.realizations.len(), 2);
        assert!(matches!(mixed_profile_payoffs(&g, &m, 1), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn mixed_equal_values_average() {
        let g = ecig();
        let c0 = Signal::constant(&g, 0, 0).unwrap();
        let c0b = Signal::constant(&g, 0, 1).unwrap();
        let c1 = Signal::constant(&g, 1, 0).unwrap();
        let m = MixedProfile::new(&g, vec![vec![(c0.clone(), rat(1, 2)), (c0b.clone(), rat(1, 2))], vec![(c1.clone(), int(1))]]).unwrap();
        let p = mixed_profile_payoffs(&g, &m, 10).unwrap();
        // every realization ties at 1/2 for the receiver
        let mean = |pa: &PureProfile| profile_payoffs(&g, pa).sender_values[0].clone();
        let r1 = mean(&PureProfile::new(&g, vec![c0, c1.clone()]).unwrap());
        let r2 = mean(&PureProfile::new(&g, vec![c0b, c1]).unwrap());
        assert_eq!(p.sender_values[0], (r1 + r2) / int(2));
    }

    #[test]
    fn support_diagnostics() {
        let g = ecig();
        let pure = MixedProfile::from(&full_info_profile(&g));
        let s = support_analysis(&pure, &g);
        assert_eq!(s.tau, int(1));
        assert!(s.all_tau_equal);
        assert!(s.never_chosen.is_empty());

        let fi0 = full_info_signal(&g, 0).unwrap();
        let c0 = Signal::constant(&g, 0, 0).unwrap();
        let fi1 = full_info_signal(&g, 1).unwrap();
        let m = MixedProfile::new(&g, vec![vec![(fi0, rat(1, 2)), (c0, rat(1, 2))], vec![(fi1, int(1))]]).unwrap();
        let s = support_analysis(&m, &g);
        assert_eq!(s.senders[0].receiver_values, vec![rat(1, 2), int(1)]);
        assert_eq!(s.senders[0].tau, rat(1, 2));
        assert!(!s.all_tau_equal);
        assert_eq!(s.never_chosen, vec![(0, 1)]);
    }

    #[test]
    fn refutes_pooling_policy_profile() {
        let g = policy(rat(1, 10));
        let profile = PureProfile::new(&g, vec![biased_p(&g, 0), biased_p(&g, 1)]).unwrap();
        let mixed = MixedProfile::from(&profile);
        for i in 0..2 {
            let w = find_profitable_deviation(&g, &mixed, i).unwrap().expect("witness");
            // i's own pooling signal is worth 1 to i, so improving on the
            // other's signal cannot beat the tie average; a slight mix can
            assert_eq!(w.construction, Construction::EpsMix);
            assert!(w.gain().is_positive());
            assert!(w.replays(&g, &mixed, 10).unwrap());
            assert!(pessimistic_payoff(&g, &profile, i, &w.new_signal).unwrap() > w.old_payoff);
        }
        let report = check_equilibrium(&g, &mixed).unwrap();
        assert!(matches!(report.verdict, Verdict::Refuted(_)));
    }

    #[test]
    fn full_info_profile_survives_search() {
        let g = ecig();
        let mixed = MixedProfile::from(&full_info_profile(&g));
        for i in 0..2 {
            assert!(find_profitable_deviation(&g, &mixed, i).unwrap().is_none());
        }
        let report = check_equilibrium(&g, &mixed).unwrap();
        assert_eq!(report.verdict, Verdict::FullyInformativeConsistent);
    }

    #[test]
    fn lp_signal_against_constant_is_refuted_by_expert_two() {
        let g = ecig();
        let opt = optimal_signal(&g, 0).unwrap().signal;
        let c = Signal::constant(&g, 1, 1).unwrap();
        let mixed = MixedProfile::from(&PureProfile::new(&g, vec![opt, c]).unwrap());
        let w = find_profitable_deviation(&g, &mixed, 1).unwrap().expect("witness");
        assert_eq!(w.construction, Construction::ImproveOnChosen);
        assert_eq!(w.source, Some((0, 0)));
        assert!(w.replays(&g, &mixed, 10).unwrap());
    }

    #[test]
    fn knife_edge_at_zero() {
        let g = policy(int(0));
        let all_p = |i| Signal::constant(&g, i, 0).unwrap();
        let mixed = MixedProfile::from(&PureProfile::new(&g, vec![all_p(0), all_p(1)]).unwrap());
        let report = check_equilibrium(&g, &mixed).unwrap();
        assert!(!report.validation.assumption2_ok);
        assert_eq!(report.verdict, Verdict::NoDeviationFound);
        assert_eq!(report.payoffs.sender_values, vec![int(1), int(1)]);
    }

    #[test]
    fn pessimistic_examples() {
        let g = ecig();
        let c0 = Signal::constant(&g, 0, 0).unwrap();
        let fi1 = full_info_signal(&g, 1).unwrap();
        let profile = PureProfile::new(&g, vec![c0, Signal::constant(&g, 1, 0).unwrap()]).unwrap();
        // strict unique argmax after deviating: no choice for the adversary
        assert_eq!(pessimistic_payoff(&g, &profile, 1, &fi1).unwrap(), sender_value(&g, 1, &fi1));
        // tie with a signal expert 2 values less: the lower value is returned
        let fi0 = full_info_signal(&g, 0).unwrap();
        let tied = PureProfile::new(&g, vec![fi0.clone(), Signal::constant(&g, 1, 0).unwrap()]).unwrap();
        let dev = full_info_signal(&g, 1).unwrap();
        let pess = pessimistic_payoff(&g, &tied, 1, &dev).unwrap();
        assert_eq!(pess, sender_value(&g, 1, &fi0).min(sender_value(&g, 1, &dev)));
        assert!(pess <= uniform_payoff(&g, &tied.with_signal(dev), 1));
    }

    #[test]
    fn rejects_malformed_profiles() {
        let g = ecig();
        let c0 = Signal::constant(&g, 0, 0).unwrap();
        assert!(PureProfile::new(&g, vec![c0.clone()]).is_err());
        assert!(PureProfile::new(&g, vec![c0.clone(), c0.clone()]).is_err());
        let c1 = Signal::constant(&g, 1, 0).unwrap();
        assert!(MixedProfile::new(&g, vec![vec![(c0.clone(), rat(1, 2))], vec![(c1.clone(), int(1))]]).is_err());
        assert!(MixedProfile::new(&g, vec![vec![(c0, int(1)), (Signal::constant(&g, 0, 1).unwrap(), int(0))], vec![(c1, int(1))]]).is_err());
    }
}
