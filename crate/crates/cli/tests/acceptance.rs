//! Acceptance suite: every release criterion as one test with a printed
//! pass/fail line. Run with `cargo test -p tiqm-cli --test acceptance --
//! --nocapture` to see the lines.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};
use std::process::Command;

use tiqm_core::{
    build_ev, build_zeno, echo_report, monte_carlo, parse, propagate_confirmation_with,
    propagate_offer_with, random_network, repeated_ev, run_handshake, scattering_matrix,
    serialize, to_network, zeno_analytics, zeno_engine_vs_analytic, Amplitude, EngineConfig,
    OpticalNetwork, ParseErrorCode, PolarizedAmplitude, PortName, PortRef,
};

fn criterion(number: u32, summary: &str, check: impl FnOnce()) {
    let result = catch_unwind(AssertUnwindSafe(check));
    let verdict = if result.is_ok() { "PASS" } else { "FAIL" };
    println!("acceptance {number:>2} {verdict}  {summary}");
    if let Err(panic) = result {
        resume_unwind(panic);
    }
}

fn amplitudes_only() -> EngineConfig {
    EngineConfig::amplitudes_only()
}

fn offer_norm(offer: &tiqm_core::OfferResult, id: &str) -> f64 {
    offer
        .primary_arrival(&id.into())
        .map(|a| a.amplitude.norm_sqr())
        .unwrap_or(0.0)
}

#[test]
fn criterion_01_ev_open_detection() {
    criterion(1, "open interferometer: P(D1)=1, P(D2)=0 within 1e-9", || {
        let offer =
            propagate_offer_with(&build_ev(false), PolarizedAmplitude::horizontal(), &amplitudes_only())
                .unwrap();
        assert!((offer_norm(&offer, "D1") - 1.0).abs() < 1e-9);
        assert!(offer_norm(&offer, "D2").abs() < 1e-9);
    });
}

#[test]
fn criterion_02_ev_blocked_echo_report() {
    criterion(2, "blocked interferometer: echoes (1/4, 1/4, 1/2) within 1e-9", || {
        let handshake = run_handshake(
            &build_ev(true),
            PolarizedAmplitude::horizontal(),
            &amplitudes_only(),
        )
        .unwrap();
        let report = echo_report(&handshake);
        assert!((report.echo_of(&"D1".into()).unwrap() - 0.25).abs() < 1e-9);
        assert!((report.echo_of(&"D2".into()).unwrap() - 0.25).abs() < 1e-9);
        assert!((report.echo_of(&"Obj".into()).unwrap() - 0.5).abs() < 1e-9);
    });
}

#[test]
fn criterion_03_repeated_protocol_closed_form() {
    criterion(3, "repeated protocol: (1/4, 1/2, 1/4) resolves to (1/3, 2/3) within 1e-12", || {
        let outcome = repeated_ev(0.25, 0.5, 0.25).unwrap();
        assert!((outcome.d2_success - 1.0 / 3.0).abs() < 1e-12);
        assert!((outcome.object_hit - 2.0 / 3.0).abs() < 1e-12);
        assert!((outcome.d2_success + outcome.object_hit - 1.0).abs() < 1e-12);
    });
}

#[test]
fn criterion_04_zeno_analytics_reported_values() {
    criterion(4, "zeno efficiencies: P_D(5)=0.6055, P_D(10)=0.7805, P_D(20)=0.8838 within 5e-4", || {
        for (n, reported) in [(5u32, 0.6055), (10, 0.7805), (20, 0.8838)] {
            let analytics = zeno_analytics(n).unwrap();
            assert!(
                (analytics.p_detect - reported).abs() < 5e-4,
                "N={n}: {} vs {reported}",
                analytics.p_detect
            );
        }
    });
}

#[test]
fn criterion_05_engine_matches_analytics_up_to_64_cycles() {
    criterion(5, "engine vs closed forms: DH echo and per-split norms within 1e-9 for N=1..64", || {
        for n in 1..=64 {
            let comparison = zeno_engine_vs_analytic(n).unwrap();
            assert!(
                comparison.max_delta < 1e-9,
                "N={n}: max delta {}",
                comparison.max_delta
            );
        }
    });
}

#[test]
fn criterion_06_telescoping_identity() {
    criterion(6, "telescoping: sum of per-split interactions plus P_D is 1 within 1e-12 for N=1..64", || {
        for n in 1..=64 {
            let analytics = zeno_analytics(n).unwrap();
            let total: f64 =
                analytics.per_split_interaction.iter().sum::<f64>() + analytics.p_detect;
            assert!((total - 1.0).abs() < 1e-12, "N={n}: {total}");
        }
    });
}

#[test]
fn criterion_07_echo_law_property_suite() {
    criterion(7, "500 random networks (<=12 elements): probability sum, echo law, confirmation norm within 1e-9", || {
        for seed in 1000..1500u64 {
            let net = random_network(seed, 12);
            let offer =
                propagate_offer_with(&net, PolarizedAmplitude::horizontal(), &amplitudes_only())
                    .unwrap();
            let mut echo_total = 0.0;
            for (sink, _) in net.sinks() {
                let confirmation =
                    propagate_confirmation_with(&net, &offer, sink, &amplitudes_only()).unwrap();
                let sink_norm = offer
                    .primary_arrival(sink)
                    .map(|a| a.amplitude.norm_sqr())
                    .unwrap_or(0.0);
                assert!(
                    (confirmation.echo_at_source - sink_norm).abs() < 1e-9,
                    "seed {seed}, sink {sink}: echo law"
                );
                assert!(
                    (confirmation.initial.norm_sqr() - confirmation.terminal_norm_sqr()).abs()
                        < 1e-9,
                    "seed {seed}, sink {sink}: confirmation norm"
                );
                echo_total += confirmation.echo_at_source;
            }
            assert!(
                (echo_total - 1.0).abs() < 1e-9,
                "seed {seed}: probability sum {echo_total}"
            );
        }
    });
}

// Independent amplitude oracle: explicit route enumeration with ordered
// 2x2 matrix products. No code shared with the engine's sweep.
mod oracle {
    use super::*;

    pub type Mat2 = [[Amplitude; 2]; 2];

    pub const IDENTITY: Mat2 = [
        [Amplitude::new(1.0, 0.0), Amplitude::new(0.0, 0.0)],
        [Amplitude::new(0.0, 0.0), Amplitude::new(1.0, 0.0)],
    ];

    fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
        let mut out = [[Amplitude::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        out
    }

    pub fn walk(
        net: &OpticalNetwork,
        cursor: &tiqm_core::Link,
        product: Mat2,
        acc: &mut BTreeMap<(String, PortName), Mat2>,
    ) {
        let here = &cursor.to.element;
        let kind = net.kind_of(here).unwrap();
        if kind.is_sink() {
            let slot = acc
                .entry((here.as_str().to_string(), cursor.to.port))
                .or_insert([[Amplitude::new(0.0, 0.0); 2]; 2]);
            for i in 0..2 {
                for j in 0..2 {
                    slot[i][j] += product[i][j];
                }
            }
            return;
        }
        let scattering = scattering_matrix(kind).unwrap();
        for entry in scattering.entries_from(cursor.to.port) {
            let jones = [[entry.jones.hh, entry.jones.hv], [entry.jones.vh, entry.jones.vv]];
            let stepped = mat_mul(&jones, &product);
            let next = net
                .outgoing(&PortRef::new(here.as_str(), entry.to))
                .unwrap();
            walk(net, next, stepped, acc);
        }
    }

    pub fn arrivals(
        net: &OpticalNetwork,
        emission: &PolarizedAmplitude,
    ) -> BTreeMap<(String, PortName), PolarizedAmplitude> {
        let source = net.source().unwrap().clone();
        let first = net
            .outgoing(&PortRef::new(source.as_str(), PortName::Out))
            .unwrap();
        let mut transfers = BTreeMap::new();
        walk(net, first, IDENTITY, &mut transfers);
        transfers
            .into_iter()
            .map(|(key, m)| {
                let h = m[0][0] * emission.h + m[0][1] * emission.v;
                let v = m[1][0] * emission.h + m[1][1] * emission.v;
                (key, PolarizedAmplitude::new(h, v))
            })
            .collect()
    }
}

#[test]
fn criterion_08_brute_force_oracle_equivalence() {
    criterion(8, "sweep equals route-enumeration oracle within 1e-12 on networks of <=8 elements", || {
        for seed in 2000..2500u64 {
            let net = random_network(seed, 8);
            let offer =
                propagate_offer_with(&net, PolarizedAmplitude::horizontal(), &amplitudes_only())
                    .unwrap();
            let oracle = oracle::arrivals(&net, &offer.emission);
            for arrival in &offer.arrivals {
                let expected = oracle
                    .get(&(arrival.sink.as_str().to_string(), arrival.port))
                    .copied()
                    .unwrap_or(PolarizedAmplitude::ZERO);
                let delta = (arrival.amplitude.h - expected.h).norm()
                    + (arrival.amplitude.v - expected.v).norm();
                assert!(
                    delta < 1e-12,
                    "seed {seed}, {}.{}: delta {delta}",
                    arrival.sink,
                    arrival.port
                );
            }
        }
    });
}

#[test]
fn criterion_09_monte_carlo_statistics_and_determinism() {
    criterion(9, "ev-blocked Monte Carlo: 1e5 trials within 4 sigma, byte-identical reruns", || {
        let trials = 100_000u64;
        let tally = monte_carlo(&build_ev(true), trials, 7).unwrap();
        for (sink, p) in [("D1", 0.25), ("D2", 0.25), ("Obj", 0.5)] {
            let frequency = tally.frequency_of(&sink.into());
            let sigma = (p * (1.0 - p) / trials as f64).sqrt();
            assert!(
                (frequency - p).abs() < 4.0 * sigma,
                "{sink}: frequency {frequency} vs {p}"
            );
        }

        let run = || {
            Command::new(env!("CARGO_BIN_EXE_tiqm"))
                .args(["mc", "ev-blocked", "--trials", "100000", "--seed", "7"])
                .output()
                .expect("tiqm binary runs")
        };
        let first = run();
        let second = run();
        assert!(first.status.success());
        assert_eq!(first.stdout, second.stdout, "reruns differ");
        assert!(!first.stdout.is_empty());
    });
}

#[test]
fn criterion_10_dsl_round_trip_and_error_codes() {
    criterion(10, "DSL: round-trip isomorphism on builtins plus 200 random networks; invalid fixtures give documented codes and lines", || {
        let mut networks = vec![
            build_ev(false),
            build_ev(true),
            build_zeno(1, false).unwrap(),
            build_zeno(3, true).unwrap(),
            build_zeno(8, false).unwrap(),
            build_zeno(8, true).unwrap(),
        ];
        for seed in 3000..3200u64 {
            networks.push(random_network(seed, 12));
        }
        for net in &networks {
            let text = serialize(net);
            let back = to_network(&parse(&text).expect("serialized text parses"))
                .expect("serialized text converts");
            assert!(net.same_topology(&back), "round trip changed:\n{text}");
        }

        let fixtures: &[(&str, ParseErrorCode, usize)] = &[
            ("", ParseErrorCode::EmptyScenario, 1),
            ("# only comments\n\n", ParseErrorCode::EmptyScenario, 1),
            ("node X warpdrive\n", ParseErrorCode::UnknownKind, 1),
            ("node L source\nnode L source\n", ParseErrorCode::DuplicateId, 2),
            ("node R rot\n", ParseErrorCode::BadArity, 1),
            ("node M mirror extra\n", ParseErrorCode::BadArity, 1),
            ("node L source\n\nnode R rot theta=fast\n", ParseErrorCode::MalformedToken, 3),
            ("node L source\nlink L.sideways -> L.out\n", ParseErrorCode::UnknownPort, 2),
            ("node L source\nlink L.out => D.in\n", ParseErrorCode::MalformedToken, 2),
            ("node 9x source\n", ParseErrorCode::MalformedToken, 1),
            ("nodule L source\n", ParseErrorCode::MalformedToken, 1),
            ("node R rot theta=1e999\n", ParseErrorCode::MalformedToken, 1),
        ];
        for (text, code, line) in fixtures {
            let errors = parse(text).expect_err("fixture must fail");
            assert!(
                errors.iter().any(|e| e.code == *code && e.line == *line),
                "fixture {text:?}: wanted {code:?} at line {line}, got {errors:?}"
            );
        }
    });
}
