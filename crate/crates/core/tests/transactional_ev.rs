//! End-to-end handshake bookkeeping on the two-path interferometer.
//!
//! Expected amplitudes come from a hand amplitude chase over the apparatus:
//! every splitter passage multiplies by 1/sqrt(2) (transmit) or i/sqrt(2)
//! (reflect) and every mirror by i. Reverse passes use the same factors, so
//! a confirmation started from conj(psi) reaches the source with strength
//! |psi|^2.

use tiqm_core::{
    build_ev, echo_report, probe_report, propagate_confirmation, propagate_offer, render_dirac,
    AbsorberSide, Amplitude, ElementId, PolarizedAmplitude,
};

fn offer_norm(offer: &tiqm_core::OfferResult, id: &str) -> f64 {
    offer
        .primary_arrival(&id.into())
        .map(|a| a.amplitude.norm_sqr())
        .unwrap_or(0.0)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-12
}

fn amp_close(a: Amplitude, re: f64, im: f64) -> bool {
    (a - Amplitude::new(re, im)).norm() < 1e-12
}

const HALF_SQRT_2: f64 = core::f64::consts::FRAC_1_SQRT_2 / 2.0;

#[test]
fn open_offer_paths_interfere_constructively_at_d1_only() {
    let net = build_ev(false);
    let offer = propagate_offer(&net, PolarizedAmplitude::horizontal()).unwrap();

    let d1 = offer.primary_arrival(&"D1".into()).unwrap();
    let mut d1_paths: Vec<(String, Amplitude)> = d1
        .paths
        .iter()
        .map(|p| (render_dirac(p).unwrap(), p.amplitude))
        .collect();
    d1_paths.sort_by(|a, b| a.0.cmp(&b.0));
    assert_eq!(d1_paths.len(), 2);
    assert_eq!(d1_paths[0].0, "|L-S1-[B]-[S2]-D1>");
    assert_eq!(d1_paths[1].0, "|L-[S1]-[A]-S2-D1>");
    // Both routes carry -1/2: equal magnitude, equal phase.
    assert!(amp_close(d1_paths[0].1, -0.5, 0.0));
    assert!(amp_close(d1_paths[1].1, -0.5, 0.0));
    assert!(close(d1.amplitude.norm_sqr(), 1.0));

    let d2 = offer.primary_arrival(&"D2".into()).unwrap();
    let mut d2_paths: Vec<(String, Amplitude)> = d2
        .paths
        .iter()
        .map(|p| (render_dirac(p).unwrap(), p.amplitude))
        .collect();
    d2_paths.sort_by(|a, b| a.0.cmp(&b.0));
    assert_eq!(d2_paths[0].0, "|L-S1-[B]-S2-D2>");
    assert_eq!(d2_paths[1].0, "|L-[S1]-[A]-[S2]-D2>");
    // One route reflected three times, the other once: opposite phases.
    assert!(amp_close(d2_paths[0].1, 0.0, 0.5));
    assert!(amp_close(d2_paths[1].1, 0.0, -0.5));
    assert!(close(d2.amplitude.norm_sqr(), 0.0));
}

#[test]
fn open_confirmation_from_d1_reinforces_at_unit_strength() {
    let net = build_ev(false);
    let offer = propagate_offer(&net, PolarizedAmplitude::horizontal()).unwrap();
    let confirmation = propagate_confirmation(&net, &offer, &"D1".into()).unwrap();

    assert!(close(confirmation.echo_at_source, 1.0));
    let mut renders: Vec<String> = confirmation
        .source_paths
        .iter()
        .map(|p| render_dirac(p).unwrap())
        .collect();
    renders.sort();
    assert_eq!(renders, ["<D1-S2-[A]-[S1]-L|", "<D1-[S2]-[B]-S1-L|"]);

    // The only other reverse exit is the splitter's unused input, where the
    // two branches cancel exactly.
    assert_eq!(confirmation.aborted.len(), 1);
    let vacuum = &confirmation.aborted[0];
    assert_eq!(vacuum.terminal, ElementId::from("S1"));
    assert_eq!(vacuum.side, AbsorberSide::Vacuum);
    assert!(close(vacuum.amplitude.norm_sqr(), 0.0));
    assert_eq!(vacuum.paths.len(), 2);

    // Norm conservation: initial strength 1 ends entirely at the source.
    assert!(close(confirmation.terminal_norm_sqr(), 1.0));
    assert!(close(confirmation.source_arrival.norm_sqr(), 1.0));
}

#[test]
fn open_d2_has_no_offer_so_no_confirmation_forms() {
    let net = build_ev(false);
    let offer = propagate_offer(&net, PolarizedAmplitude::horizontal()).unwrap();
    let confirmation = propagate_confirmation(&net, &offer, &"D2".into()).unwrap();
    assert_eq!(confirmation.echo_at_source, 0.0);
    assert!(confirmation.source_paths.is_empty());
    assert!(confirmation.aborted.is_empty());
}

#[test]
fn blocked_offer_reaches_the_object_at_double_strength() {
    let net = build_ev(true);
    let offer = propagate_offer(&net, PolarizedAmplitude::horizontal()).unwrap();
    assert!(close(offer_norm(&offer, "D1"), 0.25));
    assert!(close(offer_norm(&offer, "D2"), 0.25));
    assert!(close(offer_norm(&offer, "Obj"), 0.5));
    assert!(close(offer.total_norm_sqr(), 1.0));

    let obj = offer.primary_arrival(&"Obj".into()).unwrap();
    assert_eq!(obj.paths.len(), 1);
    assert_eq!(render_dirac(&obj.paths[0]).unwrap(), "|L-[S1]-[A]-Obj>");
}

#[test]
fn blocked_confirmation_from_d1_splits_into_echo_and_aborted_components() {
    let net = build_ev(true);
    let offer = propagate_offer(&net, PolarizedAmplitude::horizontal()).unwrap();
    let confirmation = propagate_confirmation(&net, &offer, &"D1".into()).unwrap();

    assert!(close(confirmation.echo_at_source, 0.25));
    assert!(close(confirmation.initial.norm_sqr(), 0.25));
    // Source component: amplitude 1/4, squared magnitude 1/16.
    assert!(close(confirmation.source_arrival.norm_sqr(), 1.0 / 16.0));
    assert_eq!(confirmation.source_paths.len(), 1);
    assert_eq!(
        render_dirac(&confirmation.source_paths[0]).unwrap(),
        "<D1-[S2]-[B]-S1-L|"
    );

    // Aborted components: the object's back side takes 1/8, the splitter's
    // unused input 1/16; together with the source share this reproduces the
    // initial strength 1/4.
    assert_eq!(confirmation.aborted.len(), 2);
    let obj = confirmation
        .aborted
        .iter()
        .find(|c| c.terminal == ElementId::from("Obj"))
        .unwrap();
    assert_eq!(obj.side, AbsorberSide::Back);
    assert!(close(obj.amplitude.norm_sqr(), 0.125));
    assert_eq!(obj.paths.len(), 1);
    assert_eq!(render_dirac(&obj.paths[0]).unwrap(), "<D1-S2-Obj|");
    assert!(amp_close(obj.paths[0].amplitude, -HALF_SQRT_2, 0.0));

    let vacuum = confirmation
        .aborted
        .iter()
        .find(|c| c.terminal == ElementId::from("S1"))
        .unwrap();
    assert_eq!(vacuum.side, AbsorberSide::Vacuum);
    assert!(close(vacuum.amplitude.norm_sqr(), 1.0 / 16.0));

    assert!(close(confirmation.terminal_norm_sqr(), 0.25));
}

#[test]
fn blocked_confirmation_from_d2_mirrors_d1_with_a_reflection() {
    let net = build_ev(true);
    let offer = propagate_offer(&net, PolarizedAmplitude::horizontal()).unwrap();
    let confirmation = propagate_confirmation(&net, &offer, &"D2".into()).unwrap();

    assert!(close(confirmation.echo_at_source, 0.25));
    assert_eq!(
        render_dirac(&confirmation.source_paths[0]).unwrap(),
        "<D2-S2-[B]-S1-L|"
    );
    let obj = confirmation
        .aborted
        .iter()
        .find(|c| c.terminal == ElementId::from("Obj"))
        .unwrap();
    assert_eq!(render_dirac(&obj.paths[0]).unwrap(), "<D2-[S2]-Obj|");
    assert!(close(obj.amplitude.norm_sqr(), 0.125));
}

#[test]
fn blocked_confirmation_from_the_object_returns_half() {
    let net = build_ev(true);
    let offer = propagate_offer(&net, PolarizedAmplitude::horizontal()).unwrap();
    let confirmation = propagate_confirmation(&net, &offer, &"Obj".into()).unwrap();

    assert!(close(confirmation.echo_at_source, 0.5));
    assert_eq!(confirmation.source_paths.len(), 1);
    assert_eq!(
        render_dirac(&confirmation.source_paths[0]).unwrap(),
        "<Obj-[A]-[S1]-L|"
    );
    // Initial 1/2 = source 1/4 + splitter vacuum 1/4.
    assert!(close(confirmation.source_arrival.norm_sqr(), 0.25));
    assert!(close(confirmation.terminal_norm_sqr(), 0.5));
}

#[test]
fn blocked_echo_report_is_quarter_quarter_half() {
    let net = build_ev(true);
    let handshake = tiqm_core::run_handshake(
        &net,
        PolarizedAmplitude::horizontal(),
        &tiqm_core::EngineConfig::default(),
    )
    .unwrap();
    let report = echo_report(&handshake);
    assert!(close(report.echo_of(&"D1".into()).unwrap(), 0.25));
    assert!(close(report.echo_of(&"D2".into()).unwrap(), 0.25));
    assert!(close(report.echo_of(&"Obj".into()).unwrap(), 0.5));
    assert!(close(report.total(), 1.0));
}

#[test]
fn probe_ledger_shows_the_object_probed_from_both_sides() {
    let net = build_ev(true);
    let handshake = tiqm_core::run_handshake(
        &net,
        PolarizedAmplitude::horizontal(),
        &tiqm_core::EngineConfig::default(),
    )
    .unwrap();
    let probe = probe_report(&net, &handshake.offer, &handshake.confirmations);
    assert_eq!(probe.objects.len(), 1);
    let obj = &probe.objects[0];
    assert_eq!(obj.object, ElementId::from("Obj"));
    assert!(close(obj.front_offer.norm_sqr(), 0.5));
    let mut origins: Vec<&str> = obj.back_hits.iter().map(|(id, _)| id.as_str()).collect();
    origins.sort();
    assert_eq!(origins, ["D1", "D2"]);
    for (_, amp) in &obj.back_hits {
        assert!(close(amp.norm_sqr(), 0.125));
    }
}

#[test]
fn open_network_has_an_empty_probe_ledger() {
    let net = build_ev(false);
    let handshake = tiqm_core::run_handshake(
        &net,
        PolarizedAmplitude::horizontal(),
        &tiqm_core::EngineConfig::default(),
    )
    .unwrap();
    let probe = probe_report(&net, &handshake.offer, &handshake.confirmations);
    assert!(probe.objects.is_empty());
}

#[test]
fn zeno_two_cycle_probe_matches_the_per_split_law() {
    let net = tiqm_core::build_zeno(2, true).unwrap();
    let handshake = tiqm_core::run_handshake(
        &net,
        PolarizedAmplitude::horizontal(),
        &tiqm_core::EngineConfig::default(),
    )
    .unwrap();
    let probe = probe_report(&net, &handshake.offer, &handshake.confirmations);
    assert_eq!(probe.objects.len(), 2);
    let theta = core::f64::consts::FRAC_PI_4;
    let sin2 = theta.sin().powi(2);
    let cos2 = theta.cos().powi(2);
    assert!(close(probe.objects[0].front_offer.norm_sqr(), sin2));
    assert!(close(probe.objects[1].front_offer.norm_sqr(), cos2 * sin2));
}
