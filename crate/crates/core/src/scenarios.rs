//! Programmatic constructors for the two interaction-free measurement
//! apparatuses, and closed-form analytics for the quantum-Zeno scheme.
//!
//! The racetrack apparatus is always simulated in unfolded form: each cycle
//! becomes a rotator, a polarizing splitter, the vertical arm (two corner
//! mirrors, with the object in front of them when blocked), and a polarizing
//! recombiner whose dark port drains into an explicit vacuum sink. With the
//! two corner mirrors on the vertical arm, split-then-recombine is exactly
//! the identity, so the unblocked network reproduces the pure cumulative
//! rotation.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::element::{ElementKind, PortName};
use crate::error::Error;
use crate::network::{ElementId, OpticalNetwork};
use crate::report::sig12;
use crate::wave::{propagate_confirmation_with, propagate_offer_with, EngineConfig};
use crate::PolarizedAmplitude;

/// Largest cycle count accepted for desk-scale engine propagation.
pub const MAX_ZENO_CYCLES: u32 = 64;

/// Builds the Mach-Zehnder interferometer. With `blocked` set, the opaque
/// object intercepts the beam after mirror A and shadows the splitter port
/// that arm used to feed.
pub fn build_ev(blocked: bool) -> OpticalNetwork {
    let mut net = OpticalNetwork::new();
    net.add("L", ElementKind::Source);
    net.add("S1", ElementKind::BeamSplitter);
    net.add("A", ElementKind::Mirror);
    net.add("B", ElementKind::Mirror);
    net.add("S2", ElementKind::BeamSplitter);
    net.add("D1", ElementKind::Detector);
    net.add("D2", ElementKind::Detector);
    net.link("L", PortName::Out, "S1", PortName::In0);
    net.link("S1", PortName::Out0, "B", PortName::In);
    net.link("S1", PortName::Out1, "A", PortName::In);
    net.link("B", PortName::Out, "S2", PortName::In1);
    net.link("S2", PortName::Out0, "D1", PortName::In);
    net.link("S2", PortName::Out1, "D2", PortName::In);
    if blocked {
        net.add("Obj", ElementKind::ObjectAbsorber);
        net.link("A", PortName::Out, "Obj", PortName::InFront);
        net.link("Obj", PortName::InBack, "S2", PortName::In0);
    } else {
        net.link("A", PortName::Out, "S2", PortName::In0);
    }
    net
}

/// Builds the unfolded quantum-Zeno network with `n` cycles. Every cycle
/// rotates the polarization by pi/2n, splits H from V, routes the V arm
/// around two corner mirrors (into the object when blocked), and recombines.
/// The final analyzer feeds the DH and DV detectors. DV is present even when
/// blocked, so both configurations share the same sink set.
pub fn build_zeno(n: u32, blocked: bool) -> Result<OpticalNetwork, Error> {
    if n < 1 {
        return Err(Error::BadCycleCount(n));
    }
    let theta = core::f64::consts::FRAC_PI_2 / n as f64;
    let mut net = OpticalNetwork::new();
    net.add("L", ElementKind::Source);
    let mut prev = ("L".into(), PortName::Out);
    for m in 1..=n {
        let rot = format!("R{m}");
        let split = format!("SA{m}");
        let mirror_a = format!("MA{m}");
        let mirror_b = format!("MB{m}");
        let recombine = format!("SB{m}");
        let dark = format!("VAC{m}");
        net.add(rot.as_str(), ElementKind::PolarizationRotator(theta));
        net.add(split.as_str(), ElementKind::PolarizingBeamSplitter);
        net.add(mirror_a.as_str(), ElementKind::Mirror);
        net.add(mirror_b.as_str(), ElementKind::Mirror);
        net.add(recombine.as_str(), ElementKind::PolarizingBeamSplitter);
        net.add(dark.as_str(), ElementKind::VacuumPort);

        let (prev_el, prev_port): (ElementId, PortName) = prev;
        net.link(prev_el, prev_port, rot.as_str(), PortName::In);
        net.link(rot.as_str(), PortName::Out, split.as_str(), PortName::In0);
        net.link(split.as_str(), PortName::Out0, recombine.as_str(), PortName::In0);
        if blocked {
            let object = format!("OBJ{m}");
            net.add(object.as_str(), ElementKind::ObjectAbsorber);
            net.link(split.as_str(), PortName::Out1, object.as_str(), PortName::InFront);
            net.link(object.as_str(), PortName::InBack, mirror_a.as_str(), PortName::In);
        } else {
            net.link(split.as_str(), PortName::Out1, mirror_a.as_str(), PortName::In);
        }
        net.link(mirror_a.as_str(), PortName::Out, mirror_b.as_str(), PortName::In);
        net.link(mirror_b.as_str(), PortName::Out, recombine.as_str(), PortName::In1);
        net.link(recombine.as_str(), PortName::Out1, dark.as_str(), PortName::In);
        prev = (ElementId::from(recombine), PortName::Out0);
    }
    net.add("S3", ElementKind::PolarizingBeamSplitter);
    net.add("DH", ElementKind::Detector);
    net.add("DV", ElementKind::Detector);
    let (last_el, last_port) = prev;
    net.link(last_el, last_port, "S3", PortName::In0);
    net.link("S3", PortName::Out0, "DH", PortName::In);
    net.link("S3", PortName::Out1, "DV", PortName::In);
    Ok(net)
}

/// Closed-form quantities for the quantum-Zeno scheme with `n` cycles.
#[derive(Debug, Clone, PartialEq)]
pub struct ZenoAnalytics {
    pub n_cycles: u32,
    /// Per-cycle rotation, pi/2n.
    pub theta: f64,
    /// Malus-law survival per cycle, cos^2(theta).
    pub p_h_per_cycle: f64,
    /// Probability of the horizontal detection event, cos^2n(theta).
    pub p_detect: f64,
    /// Probability the photon is removed by the object, 1 - p_detect.
    pub p_remove: f64,
    /// Interaction probability after the m-th split (index m-1):
    /// cos^(2(m-1))(theta) * sin^2(theta).
    pub per_split_interaction: Vec<f64>,
    /// Large-n approximation 1 - (pi/2)^2 / n.
    pub p_detect_approx: f64,
    /// Large-n approximation (pi/2)^2 / n.
    pub p_remove_approx: f64,
}

/// Evaluates every closed form for `n` cycles.
pub fn zeno_analytics(n: u32) -> Result<ZenoAnalytics, Error> {
    if n < 1 {
        return Err(Error::BadCycleCount(n));
    }
    let theta = core::f64::consts::FRAC_PI_2 / n as f64;
    let cos = libm::cos(theta);
    let sin2 = libm::sin(theta) * libm::sin(theta);
    let p_h = cos * cos;
    let p_detect = libm::pow(cos, 2.0 * n as f64);
    let per_split_interaction = (1..=n)
        .map(|m| libm::pow(cos, 2.0 * (m - 1) as f64) * sin2)
        .collect();
    let quarter_pi_sq = core::f64::consts::FRAC_PI_2 * core::f64::consts::FRAC_PI_2;
    Ok(ZenoAnalytics {
        n_cycles: n,
        theta,
        p_h_per_cycle: p_h,
        p_detect,
        p_remove: 1.0 - p_detect,
        per_split_interaction,
        p_detect_approx: 1.0 - quarter_pi_sq / n as f64,
        p_remove_approx: quarter_pi_sq / n as f64,
    })
}

/// Engine-versus-closed-form comparison for the blocked Zeno network.
#[derive(Debug, Clone, PartialEq)]
pub struct ZenoComparison {
    pub n_cycles: u32,
    /// Echo of the DH confirmation computed by the wave engine.
    pub engine_detect: f64,
    pub analytic_detect: f64,
    /// Offer norm^2 on each object's front face, m = 1..n.
    pub engine_per_split: Vec<f64>,
    pub analytic_per_split: Vec<f64>,
    /// Largest absolute disagreement across all compared quantities.
    pub max_delta: f64,
}

/// Runs the wave engine on the blocked `n`-cycle network and compares the DH
/// echo and the per-object offer norms against the closed forms.
pub fn zeno_engine_vs_analytic(n: u32) -> Result<ZenoComparison, Error> {
    if !(1..=MAX_ZENO_CYCLES).contains(&n) {
        return Err(Error::BadCycleCount(n));
    }
    let analytics = zeno_analytics(n)?;
    let net = build_zeno(n, true)?;
    let config = EngineConfig::amplitudes_only();
    let offer = propagate_offer_with(&net, PolarizedAmplitude::horizontal(), &config)?;
    let confirmation = propagate_confirmation_with(&net, &offer, &"DH".into(), &config)?;
    let engine_detect = confirmation.echo_at_source;

    let mut engine_per_split = Vec::with_capacity(n as usize);
    for m in 1..=n {
        let id = ElementId::from(format!("OBJ{m}"));
        let norm = offer
            .primary_arrival(&id)
            .map(|a| a.amplitude.norm_sqr())
            .unwrap_or(0.0);
        engine_per_split.push(norm);
    }

    let mut max_delta = (engine_detect - analytics.p_detect).abs();
    for (engine, analytic) in engine_per_split
        .iter()
        .zip(analytics.per_split_interaction.iter())
    {
        let delta = (engine - analytic).abs();
        if delta > max_delta {
            max_delta = delta;
        }
    }
    Ok(ZenoComparison {
        n_cycles: n,
        engine_detect,
        analytic_detect: analytics.p_detect,
        engine_per_split,
        analytic_per_split: analytics.per_split_interaction,
        max_delta,
    })
}

/// CSV sweep of the closed forms for N = 1..=n_max, one row per N.
/// Columns: `N,theta,P_H,P_D,P_R,P_D_approx,P_R_approx`.
pub fn sweep_csv(n_max: u32) -> Result<String, Error> {
    if n_max < 1 {
        return Err(Error::BadCycleCount(n_max));
    }
    let mut out = String::from("N,theta,P_H,P_D,P_R,P_D_approx,P_R_approx\n");
    for n in 1..=n_max {
        let a = zeno_analytics(n)?;
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            n,
            sig12(a.theta),
            sig12(a.p_h_per_cycle),
            sig12(a.p_detect),
            sig12(a.p_remove),
            sig12(a.p_detect_approx),
            sig12(a.p_remove_approx),
        ));
    }
    Ok(out)
}
