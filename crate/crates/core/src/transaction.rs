//! Echo-weighted transaction selection and trial statistics.
//!
//! The source chooses between candidate transactions with probability
//! proportional to the echo each sink returns. Sampling is reproducible:
//! a single uniform draw is tested against cumulative echo weights in
//! sink-id lexicographic order, and the generator is Xoshiro256++ seeded
//! through SplitMix64 from a caller-supplied u64, so a (scenario, trials,
//! seed) triple always yields the same tally on every platform.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use alloc::format;

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::Error;
use crate::network::{ElementId, OpticalNetwork};
use crate::report::sig12;
use crate::wave::{run_handshake, EngineConfig, Handshake};
use crate::PolarizedAmplitude;

/// Echo totals may deviate from 1 by float noise; anything past this signals
/// a broken network or engine rather than rounding.
const ECHO_TOTAL_TOLERANCE: f64 = 1e-6;

/// The deterministic generator used for all trial sampling.
pub type TrialRng = Xoshiro256PlusPlus;

/// Builds the trial generator for a seed (Xoshiro256++, SplitMix64 expansion).
pub fn rng_from_seed(seed: u64) -> TrialRng {
    TrialRng::seed_from_u64(seed)
}

/// Uniform draw in [0, 1) using the top 53 bits of one u64 output.
pub(crate) fn uniform(rng: &mut impl Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Echo strength per sink: the transaction selection weights.
#[derive(Debug, Clone, PartialEq)]
pub struct EchoReport {
    entries: Vec<(ElementId, f64)>,
    total: f64,
}

impl EchoReport {
    /// Collects entries, sorts them by sink id, and sums the total.
    pub fn from_entries(entries: impl IntoIterator<Item = (ElementId, f64)>) -> Self {
        let mut entries: Vec<(ElementId, f64)> = entries.into_iter().collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        let total = entries.iter().map(|(_, echo)| echo).sum();
        EchoReport { entries, total }
    }

    pub fn entries(&self) -> &[(ElementId, f64)] {
        &self.entries
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn echo_of(&self, sink: &ElementId) -> Option<f64> {
        self.entries
            .iter()
            .find(|(id, _)| id == sink)
            .map(|(_, echo)| *echo)
    }

    /// Errors unless the total is within 1e-6 of 1.
    pub fn check_complete(&self) -> Result<(), Error> {
        if (self.total - 1.0).abs() > ECHO_TOTAL_TOLERANCE {
            return Err(Error::BrokenEchoTotal(self.total));
        }
        Ok(())
    }
}

/// Echo report of a completed handshake, one entry per sink element.
pub fn echo_report(handshake: &Handshake) -> EchoReport {
    EchoReport::from_entries(
        handshake
            .confirmations
            .iter()
            .map(|c| (c.origin.clone(), c.echo_at_source)),
    )
}

/// Draws one transaction: each sink is selected with probability
/// echo / total. Zero-echo sinks are never returned.
pub fn select_transaction(
    report: &EchoReport,
    rng: &mut impl Rng,
) -> Result<ElementId, Error> {
    if report.total <= 0.0 {
        return Err(Error::NoTransaction);
    }
    let u = uniform(rng);
    let mut cumulative = 0.0;
    let mut last_live: Option<&ElementId> = None;
    for (sink, echo) in &report.entries {
        if *echo <= 0.0 {
            continue;
        }
        cumulative += echo / report.total;
        last_live = Some(sink);
        if u < cumulative {
            return Ok(sink.clone());
        }
    }
    // Cumulative rounding can leave u just past the final boundary.
    Ok(last_live.expect("total > 0 implies a live entry").clone())
}

/// Outcome counts of repeated independent transaction selections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialTally {
    pub counts: BTreeMap<ElementId, u64>,
    pub trials: u64,
    pub seed: u64,
}

impl TrialTally {
    pub fn count_of(&self, sink: &ElementId) -> u64 {
        self.counts.get(sink).copied().unwrap_or(0)
    }

    pub fn frequency_of(&self, sink: &ElementId) -> f64 {
        self.count_of(sink) as f64 / self.trials as f64
    }
}

/// Computes the echo report once (horizontal emission), then draws `trials`
/// independent selections. Fully reproducible from the seed.
pub fn monte_carlo(net: &OpticalNetwork, trials: u64, seed: u64) -> Result<TrialTally, Error> {
    if trials == 0 {
        return Err(Error::BadProbabilities("trial count must be at least 1"));
    }
    let handshake = run_handshake(
        net,
        PolarizedAmplitude::horizontal(),
        &EngineConfig::amplitudes_only(),
    )?;
    let report = echo_report(&handshake);
    report.check_complete()?;
    let mut rng = rng_from_seed(seed);
    let mut counts: BTreeMap<ElementId, u64> = report
        .entries
        .iter()
        .map(|(id, _)| (id.clone(), 0))
        .collect();
    for _ in 0..trials {
        let winner = select_transaction(&report, &mut rng)?;
        *counts.get_mut(&winner).expect("winner is a report entry") += 1;
    }
    Ok(TrialTally {
        counts,
        trials,
        seed,
    })
}

/// CSV export of a tally against its expected distribution.
/// Columns: `sink,count,frequency,expected,deviation_sigma`.
pub fn tally_csv(tally: &TrialTally, report: &EchoReport) -> String {
    let mut out = String::from("sink,count,frequency,expected,deviation_sigma\n");
    for (sink, echo) in report.entries() {
        let expected = if report.total() > 0.0 {
            echo / report.total()
        } else {
            0.0
        };
        let count = tally.count_of(sink);
        let frequency = count as f64 / tally.trials as f64;
        let sigma = libm::sqrt(tally.trials as f64 * expected * (1.0 - expected));
        let deviation = if sigma > 0.0 {
            (count as f64 - tally.trials as f64 * expected) / sigma
        } else {
            0.0
        };
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            sink,
            count,
            sig12(frequency),
            sig12(expected),
            sig12(deviation),
        ));
    }
    out
}

/// Asymptotic outcome of the repeated single-photon protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepeatedEvOutcome {
    /// Probability the procedure ends with the object-revealing detection.
    pub d2_success: f64,
    /// Probability the procedure ends with a photon striking the object.
    pub object_hit: f64,
}

/// Resolves the retry loop of the repeated protocol in closed form: an
/// inconclusive detection sends another photon, so the terminal outcomes are
/// the geometric-series sums detect_d2 / (1 - retry) and
/// hit_object / (1 - retry).
pub fn repeated_ev(
    detect_d2: f64,
    hit_object: f64,
    retry: f64,
) -> Result<RepeatedEvOutcome, Error> {
    for p in [detect_d2, hit_object, retry] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::BadProbabilities(
                "outcome probabilities must lie in [0, 1]",
            ));
        }
    }
    let sum = detect_d2 + hit_object + retry;
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::BadProbabilities("outcome probabilities must sum to 1"));
    }
    let terminal = detect_d2 + hit_object;
    if terminal <= 0.0 {
        return Err(Error::DivergentProtocol);
    }
    Ok(RepeatedEvOutcome {
        d2_success: detect_d2 / terminal,
        object_hit: hit_object / terminal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::build_ev;

    fn report(entries: &[(&str, f64)]) -> EchoReport {
        EchoReport::from_entries(entries.iter().map(|(id, e)| (ElementId::from(*id), *e)))
    }

    #[test]
    fn single_absorber_always_wins() {
        let r = report(&[("D1", 1.0)]);
        let mut rng = rng_from_seed(3);
        for _ in 0..100 {
            assert_eq!(select_transaction(&r, &mut rng).unwrap().as_str(), "D1");
        }
    }

    #[test]
    fn zero_echo_sinks_are_never_selected() {
        let r = report(&[("A", 0.0), ("B", 0.5)]);
        let mut rng = rng_from_seed(11);
        for _ in 0..1000 {
            assert_eq!(select_transaction(&r, &mut rng).unwrap().as_str(), "B");
        }
    }

    #[test]
    fn all_zero_report_is_an_error() {
        let r = report(&[("A", 0.0), ("B", 0.0)]);
        let mut rng = rng_from_seed(1);
        assert!(matches!(
            select_transaction(&r, &mut rng),
            Err(Error::NoTransaction)
        ));
    }

    #[test]
    fn selection_frequencies_match_quarter_quarter_half() {
        let r = report(&[("D1", 0.25), ("D2", 0.25), ("Obj", 0.5)]);
        let mut rng = rng_from_seed(20260808);
        let draws = 1_000_000u64;
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        for _ in 0..draws {
            let winner = select_transaction(&r, &mut rng).unwrap();
            *counts.entry(winner.0).or_insert(0) += 1;
        }
        for (sink, p) in [("D1", 0.25), ("D2", 0.25), ("Obj", 0.5)] {
            let freq = counts[sink] as f64 / draws as f64;
            let sigma = libm::sqrt(p * (1.0 - p) / draws as f64);
            assert!(
                (freq - p).abs() < 3.0 * sigma,
                "{sink}: freq = {freq}, expected {p}"
            );
        }
    }

    #[test]
    fn monte_carlo_is_reproducible_and_counts_sum_to_trials() {
        let net = build_ev(true);
        let a = monte_carlo(&net, 10_000, 7).unwrap();
        let b = monte_carlo(&net, 10_000, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.counts.values().sum::<u64>(), 10_000);
        let c = monte_carlo(&net, 10_000, 8).unwrap();
        assert_ne!(a.counts, c.counts);
    }

    #[test]
    fn monte_carlo_on_the_open_interferometer_only_hits_d1() {
        let tally = monte_carlo(&build_ev(false), 5_000, 1).unwrap();
        assert_eq!(tally.count_of(&"D1".into()), 5_000);
        assert_eq!(tally.count_of(&"D2".into()), 0);
    }

    #[test]
    fn single_trial_lands_on_exactly_one_sink() {
        let tally = monte_carlo(&build_ev(true), 1, 99).unwrap();
        assert_eq!(tally.counts.values().sum::<u64>(), 1);
    }

    #[test]
    fn zero_trials_are_rejected() {
        assert!(matches!(
            monte_carlo(&build_ev(true), 0, 0),
            Err(Error::BadProbabilities(_))
        ));
    }

    #[test]
    fn incomplete_echo_totals_are_flagged() {
        let r = report(&[("A", 0.5)]);
        assert!(matches!(
            r.check_complete(),
            Err(Error::BrokenEchoTotal(_))
        ));
        assert!(report(&[("A", 0.5), ("B", 0.5)]).check_complete().is_ok());
    }

    #[test]
    fn tally_csv_lists_every_sink_with_expectations() {
        let net = build_ev(true);
        let tally = monte_carlo(&net, 1000, 5).unwrap();
        let handshake = run_handshake(
            &net,
            PolarizedAmplitude::horizontal(),
            &EngineConfig::amplitudes_only(),
        )
        .unwrap();
        let csv = tally_csv(&tally, &echo_report(&handshake));
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "sink,count,frequency,expected,deviation_sigma");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("D1,"));
        assert!(lines[3].starts_with("Obj,"));
    }

    #[test]
    fn repeated_protocol_reproduces_one_third_two_thirds() {
        let out = repeated_ev(0.25, 0.5, 0.25).unwrap();
        assert!((out.d2_success - 1.0 / 3.0).abs() < 1e-12);
        assert!((out.object_hit - 2.0 / 3.0).abs() < 1e-12);
        assert!((out.d2_success + out.object_hit - 1.0).abs() < 1e-12);
    }

    #[test]
    fn repeated_protocol_without_object_always_detects() {
        let out = repeated_ev(0.7, 0.0, 0.3).unwrap();
        assert_eq!(out.d2_success, 1.0);
        assert_eq!(out.object_hit, 0.0);
    }

    #[test]
    fn repeated_protocol_closed_form_matches_simulated_chain() {
        let (d2, obj, retry) = (0.3, 0.3, 0.4);
        let out = repeated_ev(d2, obj, retry).unwrap();
        assert!((out.d2_success - 0.5).abs() < 1e-12);
        assert!((out.object_hit - 0.5).abs() < 1e-12);

        // Independent oracle: run the retry chain to termination many times.
        let mut rng = rng_from_seed(424242);
        let runs = 1_000_000u64;
        let mut d2_wins = 0u64;
        for _ in 0..runs {
            loop {
                let u = uniform(&mut rng);
                if u < d2 {
                    d2_wins += 1;
                    break;
                } else if u < d2 + obj {
                    break;
                }
            }
        }
        let freq = d2_wins as f64 / runs as f64;
        let sigma = libm::sqrt(0.5 * 0.5 / runs as f64);
        assert!((freq - out.d2_success).abs() < 4.0 * sigma, "freq = {freq}");
    }

    #[test]
    fn degenerate_repeated_protocols_are_rejected() {
        assert!(matches!(
            repeated_ev(0.0, 0.0, 1.0),
            Err(Error::DivergentProtocol)
        ));
        assert!(matches!(
            repeated_ev(0.5, 0.2, 0.1),
            Err(Error::BadProbabilities(_))
        ));
        assert!(matches!(
            repeated_ev(-0.1, 0.6, 0.5),
            Err(Error::BadProbabilities(_))
        ));
    }
}
