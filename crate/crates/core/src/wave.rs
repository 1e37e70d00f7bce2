//! Two-pass transactional bookkeeping: forward offer waves to every sink,
//! backward confirmation waves from each sink toward the source.
//!
//! Amplitudes are computed by an exact topological sweep that pushes
//! polarization-resolved complex amplitudes through each element's scattering
//! description; interference is exact. Path records are enumerated separately
//! and capped, so the amplitude accounting never depends on path enumeration.
//!
//! Reverse traversal applies the transpose (not the conjugate transpose) of
//! each forward scattering description: the advanced wave crosses the same
//! physical elements, so a reflection contributes the same `i` factor in both
//! directions, and a confirmation started from the conjugate of the sink
//! amplitude arrives at the source with strength psi psi*.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::amplitude::{Amplitude, PolAxis, PolarizedAmplitude};
use crate::element::{scattering_matrix, ElementKind, PortName, Scattering, Traversal};
use crate::error::Error;
use crate::network::{ElementId, Link, OpticalNetwork, PortRef};
use crate::path::{PathRecord, PathStep, StepAction, WaveDirection};

const UNIT_NORM_TOLERANCE: f64 = 1e-9;
const AXES: [PolAxis; 2] = [PolAxis::H, PolAxis::V];

/// Which face of a terminal a wave component landed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum AbsorberSide {
    Front,
    Back,
    Vacuum,
}

/// Limits on path-record enumeration. Amplitudes are exact regardless.
#[derive(Debug, Clone, Copy)]
pub struct EngineConfig {
    /// Most path records kept per sink or terminal. Zero disables enumeration.
    pub max_paths_per_sink: usize,
    /// Global budget of link crossings for one enumeration pass.
    pub max_enumeration_steps: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            max_paths_per_sink: 4096,
            max_enumeration_steps: 1_000_000,
        }
    }
}

impl EngineConfig {
    /// Propagate amplitudes only; skip path enumeration entirely.
    pub fn amplitudes_only() -> Self {
        EngineConfig {
            max_paths_per_sink: 0,
            ..EngineConfig::default()
        }
    }
}

/// Forward wave arriving at one absorbing port.
#[derive(Debug, Clone, PartialEq)]
pub struct Arrival {
    pub sink: ElementId,
    pub port: PortName,
    pub amplitude: PolarizedAmplitude,
    pub paths: Vec<PathRecord>,
    pub paths_truncated: bool,
}

/// Result of one forward offer-wave pass.
#[derive(Debug, Clone, PartialEq)]
pub struct OfferResult {
    /// The unit-norm polarization emitted by the source.
    pub emission: PolarizedAmplitude,
    /// One entry per absorbing port, ordered by (sink id, port).
    pub arrivals: Vec<Arrival>,
    /// True when the global enumeration budget ran out.
    pub enumeration_truncated: bool,
}

impl OfferResult {
    /// The arrival a confirmation would start from for this sink
    /// (detector and vacuum input, or the object's front side).
    pub fn primary_arrival(&self, sink: &ElementId) -> Option<&Arrival> {
        self.arrivals
            .iter()
            .find(|a| a.sink == *sink && a.port != PortName::InBack)
    }

    /// Sum of squared arrival norms over every absorbing port.
    pub fn total_norm_sqr(&self) -> f64 {
        self.arrivals.iter().map(|a| a.amplitude.norm_sqr()).sum()
    }
}

/// A reverse-propagating component that terminated away from the source and
/// therefore can form no transaction.
#[derive(Debug, Clone, PartialEq)]
pub struct AbortedComponent {
    pub terminal: ElementId,
    pub side: AbsorberSide,
    pub port: PortName,
    pub amplitude: PolarizedAmplitude,
    pub paths: Vec<PathRecord>,
}

/// Result of one backward confirmation-wave pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfirmationResult {
    pub origin: ElementId,
    /// Conjugate of the offer amplitude at the origin; zero when no offer arrived.
    pub initial: PolarizedAmplitude,
    /// Strength with which the confirmation reaches the source: psi psi*.
    pub echo_at_source: f64,
    /// Full polarization-resolved wave accumulated at the source.
    pub source_arrival: PolarizedAmplitude,
    pub source_paths: Vec<PathRecord>,
    pub aborted: Vec<AbortedComponent>,
    pub enumeration_truncated: bool,
}

impl ConfirmationResult {
    fn silent(origin: ElementId) -> Self {
        ConfirmationResult {
            origin,
            initial: PolarizedAmplitude::ZERO,
            echo_at_source: 0.0,
            source_arrival: PolarizedAmplitude::ZERO,
            source_paths: Vec::new(),
            aborted: Vec::new(),
            enumeration_truncated: false,
        }
    }

    /// Squared-magnitude sum over every terminal component (source included).
    pub fn terminal_norm_sqr(&self) -> f64 {
        self.source_arrival.norm_sqr()
            + self
                .aborted
                .iter()
                .map(|a| a.amplitude.norm_sqr())
                .sum::<f64>()
    }
}

/// Offer plus one confirmation per sink, computed on the same network.
#[derive(Debug, Clone, PartialEq)]
pub struct Handshake {
    pub offer: OfferResult,
    pub confirmations: Vec<ConfirmationResult>,
}

/// Two-sided probe ledger for one object: the forward wave on its front face
/// and the aborted confirmation components intercepted by its back face.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectProbe {
    pub object: ElementId,
    pub front_offer: PolarizedAmplitude,
    /// (origin sink, amplitude) of each back-side hit.
    pub back_hits: Vec<(ElementId, PolarizedAmplitude)>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProbeReport {
    pub objects: Vec<ObjectProbe>,
}

/// Per-network lookup tables shared by both sweep directions.
struct SweepCtx<'a> {
    net: &'a OpticalNetwork,
    topo: Vec<ElementId>,
    outgoing: BTreeMap<PortRef, &'a Link>,
    feeders: BTreeMap<PortRef, &'a Link>,
    scatterings: BTreeMap<ElementId, Scattering>,
}

impl<'a> SweepCtx<'a> {
    fn new(net: &'a OpticalNetwork) -> Result<Self, Error> {
        let violations = net.validate();
        if !violations.is_empty() {
            return Err(Error::InvalidNetwork(violations));
        }
        let topo = net.topo_order().expect("validated networks are acyclic");
        let mut outgoing = BTreeMap::new();
        let mut feeders = BTreeMap::new();
        for link in net.links() {
            outgoing.insert(link.from.clone(), link);
            feeders.insert(link.to.clone(), link);
        }
        let mut scatterings = BTreeMap::new();
        for (id, kind) in net.elements() {
            if kind.is_scattering() {
                scatterings.insert(id.clone(), scattering_matrix(kind)?);
            }
        }
        Ok(SweepCtx {
            net,
            topo,
            outgoing,
            feeders,
            scatterings,
        })
    }

    fn kind(&self, id: &ElementId) -> &ElementKind {
        self.net.kind_of(id).expect("id from this network")
    }
}

fn step_action(traversal: Traversal) -> StepAction {
    match traversal {
        Traversal::Transmit => StepAction::Transmit,
        Traversal::Reflect => StepAction::Reflect,
        Traversal::Rotate => StepAction::Rotate,
    }
}

fn absorb_action(kind: &ElementKind) -> StepAction {
    match kind {
        ElementKind::Detector => StepAction::Detect,
        _ => StepAction::Absorb,
    }
}

/// Propagates the offer wave with the default path-enumeration limits.
pub fn propagate_offer(
    net: &OpticalNetwork,
    emission: PolarizedAmplitude,
) -> Result<OfferResult, Error> {
    propagate_offer_with(net, emission, &EngineConfig::default())
}

/// Propagates a unit-norm offer wave from the source to every absorbing port.
pub fn propagate_offer_with(
    net: &OpticalNetwork,
    emission: PolarizedAmplitude,
    config: &EngineConfig,
) -> Result<OfferResult, Error> {
    let norm2 = emission.norm_sqr();
    if !emission.is_finite() || (norm2 - 1.0).abs() > UNIT_NORM_TOLERANCE {
        return Err(Error::NonUnitInput(norm2));
    }
    let ctx = SweepCtx::new(net)?;

    // Exact amplitude sweep in topological order.
    let mut in_amps: BTreeMap<PortRef, PolarizedAmplitude> = BTreeMap::new();
    for id in &ctx.topo {
        match ctx.kind(id) {
            ElementKind::Source => {
                let link = ctx.outgoing[&PortRef::new(id.clone(), PortName::Out)];
                *in_amps.entry(link.to.clone()).or_default() += emission;
            }
            kind if kind.is_scattering() => {
                let scattering = &ctx.scatterings[id];
                let inputs: Vec<(PortName, PolarizedAmplitude)> = kind
                    .in_ports()
                    .iter()
                    .filter_map(|&p| {
                        in_amps
                            .get(&PortRef::new(id.clone(), p))
                            .map(|a| (p, *a))
                    })
                    .collect();
                for (port, amp) in inputs {
                    if amp.is_zero() {
                        continue;
                    }
                    for entry in scattering.entries_from(port) {
                        let out = entry.jones.apply(&amp);
                        let link = ctx.outgoing[&PortRef::new(id.clone(), entry.to)];
                        *in_amps.entry(link.to.clone()).or_default() += out;
                    }
                }
            }
            // Sinks scatter nothing; an object's shadow link carries no
            // forward amplitude.
            _ => {}
        }
    }

    // Path enumeration, bounded by the configured caps.
    let mut paths: BTreeMap<(ElementId, PortName), (Vec<PathRecord>, bool)> = BTreeMap::new();
    let mut budget = Budget::new(config);
    if config.max_paths_per_sink > 0 {
        let source = ctx
            .net
            .source()
            .expect("validated networks have one source")
            .clone();
        let first_link = ctx.outgoing[&PortRef::new(source.clone(), PortName::Out)];
        for axis in AXES {
            let amp = emission.component(axis);
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let steps = alloc::vec![PathStep::new(source.clone(), StepAction::Emit)];
            walk_offer(&ctx, first_link, axis, amp, steps, &mut paths, &mut budget);
        }
    }

    // Assemble arrivals: every absorbing port of every sink element, in order.
    let mut arrivals = Vec::new();
    for (id, kind) in ctx.net.sinks() {
        let mut ports: Vec<PortName> = match kind {
            ElementKind::ObjectAbsorber => alloc::vec![PortName::InFront],
            _ => alloc::vec![PortName::In],
        };
        // Back-side forward arrivals only occur in hand-wired networks; list
        // them only when present so ordinary reports stay uncluttered.
        if matches!(kind, ElementKind::ObjectAbsorber)
            && in_amps.contains_key(&PortRef::new(id.clone(), PortName::InBack))
        {
            ports.push(PortName::InBack);
        }
        for port in ports {
            let amplitude = in_amps
                .get(&PortRef::new(id.clone(), port))
                .copied()
                .unwrap_or_default();
            let (mut sink_paths, truncated) = paths
                .remove(&(id.clone(), port))
                .unwrap_or((Vec::new(), false));
            sink_paths.shrink_to_fit();
            arrivals.push(Arrival {
                sink: id.clone(),
                port,
                amplitude,
                paths: sink_paths,
                paths_truncated: truncated,
            });
        }
    }

    Ok(OfferResult {
        emission,
        arrivals,
        enumeration_truncated: budget.exhausted,
    })
}

struct Budget {
    steps_left: u64,
    per_sink: usize,
    exhausted: bool,
}

impl Budget {
    fn new(config: &EngineConfig) -> Self {
        Budget {
            steps_left: config.max_enumeration_steps,
            per_sink: config.max_paths_per_sink,
            exhausted: false,
        }
    }

    fn spend(&mut self) -> bool {
        if self.steps_left == 0 {
            self.exhausted = true;
            return false;
        }
        self.steps_left -= 1;
        true
    }
}

fn record_path(
    store: &mut BTreeMap<(ElementId, PortName), (Vec<PathRecord>, bool)>,
    key: (ElementId, PortName),
    record: PathRecord,
    cap: usize,
) {
    let slot = store.entry(key).or_insert_with(|| (Vec::new(), false));
    if slot.0.len() < cap {
        slot.0.push(record);
    } else {
        slot.1 = true;
    }
}

/// Depth-first branch walk of the forward wave; one call per link crossing.
fn walk_offer(
    ctx: &SweepCtx,
    link: &Link,
    axis: PolAxis,
    amp: Amplitude,
    steps: Vec<PathStep>,
    paths: &mut BTreeMap<(ElementId, PortName), (Vec<PathRecord>, bool)>,
    budget: &mut Budget,
) {
    if !budget.spend() {
        return;
    }
    let here = &link.to.element;
    let kind = ctx.kind(here);
    if kind.is_sink() {
        let mut steps = steps;
        steps.push(PathStep::new(here.clone(), absorb_action(kind)));
        record_path(
            paths,
            (here.clone(), link.to.port),
            PathRecord {
                direction: WaveDirection::Offer,
                steps,
                amplitude: amp,
                exit_axis: axis,
            },
            budget.per_sink,
        );
        return;
    }
    let scattering = &ctx.scatterings[here];
    for entry in scattering.entries_from(link.to.port) {
        for out_axis in AXES {
            let coeff = entry.jones.coeff(axis, out_axis);
            if coeff.norm_sqr() == 0.0 {
                continue;
            }
            let mut next_steps = steps.clone();
            next_steps.push(PathStep::new(here.clone(), step_action(entry.traversal)));
            let next_link = ctx.outgoing[&PortRef::new(here.clone(), entry.to)];
            walk_offer(
                ctx,
                next_link,
                out_axis,
                amp * coeff,
                next_steps,
                paths,
                budget,
            );
        }
    }
}

/// Propagates a confirmation with the default path-enumeration limits.
pub fn propagate_confirmation(
    net: &OpticalNetwork,
    offer: &OfferResult,
    sink: &ElementId,
) -> Result<ConfirmationResult, Error> {
    propagate_confirmation_with(net, offer, sink, &EngineConfig::default())
}

/// Starts from the conjugate of the sink's arriving amplitude and traverses
/// every link in reverse using the transpose of each element's forward
/// scattering description. Components reaching the source accumulate into the
/// echo; components reaching any other terminal are recorded as aborted.
pub fn propagate_confirmation_with(
    net: &OpticalNetwork,
    offer: &OfferResult,
    sink: &ElementId,
    config: &EngineConfig,
) -> Result<ConfirmationResult, Error> {
    let kind = net
        .kind_of(sink)
        .ok_or_else(|| Error::UnknownElement(sink.to_string()))?;
    if !kind.is_sink() {
        return Err(Error::NotASink(sink.to_string()));
    }
    let origin_port = match kind {
        ElementKind::ObjectAbsorber => PortName::InFront,
        _ => PortName::In,
    };
    let arrival_amp = offer
        .primary_arrival(sink)
        .map(|a| a.amplitude)
        .unwrap_or_default();
    if arrival_amp.norm_sqr() == 0.0 {
        return Ok(ConfirmationResult::silent(sink.clone()));
    }
    let ctx = SweepCtx::new(net)?;
    let initial = arrival_amp.conj();

    // Exact reverse sweep. Amplitudes live on the ports that fed them
    // forward; terminals collect through `flow_back`.
    let mut out_amps: BTreeMap<PortRef, PolarizedAmplitude> = BTreeMap::new();
    let mut source_arrival = PolarizedAmplitude::ZERO;
    let mut aborted_amps: BTreeMap<(ElementId, PortName), (AbsorberSide, PolarizedAmplitude)> =
        BTreeMap::new();

    flow_back(
        &ctx,
        PortRef::new(sink.clone(), origin_port),
        initial,
        &mut out_amps,
        &mut source_arrival,
        &mut aborted_amps,
    );

    for id in ctx.topo.iter().rev() {
        let kind = ctx.kind(id);
        if !kind.is_scattering() {
            continue;
        }
        let scattering = &ctx.scatterings[id];
        // An in-port is "visited" when some branch actually carries amplitude
        // to it, even if branches cancel; cancelled terminals stay in the
        // ledger with their zero net, mirroring the path records.
        let mut per_in: BTreeMap<PortName, PolarizedAmplitude> = BTreeMap::new();
        for entry in &scattering.entries {
            if let Some(rev) = out_amps.get(&PortRef::new(id.clone(), entry.to)) {
                if rev.is_zero() {
                    continue;
                }
                let contribution = entry.jones.transpose().apply(rev);
                if contribution.is_zero() {
                    continue;
                }
                *per_in.entry(entry.from).or_default() += contribution;
            }
        }
        for (port, amp) in per_in {
            flow_back(
                &ctx,
                PortRef::new(id.clone(), port),
                amp,
                &mut out_amps,
                &mut source_arrival,
                &mut aborted_amps,
            );
        }
    }

    let echo_at_source = offer.emission.dot(&source_arrival).re.max(0.0);

    // Path enumeration.
    let mut budget = Budget::new(config);
    let mut source_paths = Vec::new();
    let mut aborted_paths: BTreeMap<(ElementId, PortName), (Vec<PathRecord>, bool)> =
        BTreeMap::new();
    let mut source_truncated = false;
    if config.max_paths_per_sink > 0 {
        for axis in AXES {
            let amp = initial.component(axis);
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let steps = alloc::vec![PathStep::new(sink.clone(), absorb_action(kind))];
            walk_confirmation(
                &ctx,
                PortRef::new(sink.clone(), origin_port),
                axis,
                amp,
                steps,
                &mut source_paths,
                &mut source_truncated,
                &mut aborted_paths,
                &mut budget,
            );
        }
    }

    // Union of the sweep's terminals and the enumerator's: a terminal whose
    // net amplitude cancelled at an intermediate port may still own paths.
    for (terminal, port) in aborted_paths.keys() {
        let side = match ctx.kind(terminal) {
            ElementKind::ObjectAbsorber => AbsorberSide::Back,
            _ => AbsorberSide::Vacuum,
        };
        aborted_amps
            .entry((terminal.clone(), *port))
            .or_insert((side, PolarizedAmplitude::ZERO));
    }
    let aborted = aborted_amps
        .into_iter()
        .map(|((terminal, port), (side, amplitude))| {
            let (paths, truncated) = aborted_paths
                .remove(&(terminal.clone(), port))
                .unwrap_or((Vec::new(), false));
            source_truncated |= truncated;
            AbortedComponent {
                terminal,
                side,
                port,
                amplitude,
                paths,
            }
        })
        .collect();

    Ok(ConfirmationResult {
        origin: sink.clone(),
        initial,
        echo_at_source,
        source_arrival,
        source_paths,
        aborted,
        enumeration_truncated: budget.exhausted || source_truncated,
    })
}

/// Moves a reverse-propagating amplitude backward out of one in-port:
/// onto the feeding port, into the source, onto an object's back face, or
/// into the implicit vacuum behind an unconnected in-port.
fn flow_back(
    ctx: &SweepCtx,
    in_port: PortRef,
    amp: PolarizedAmplitude,
    out_amps: &mut BTreeMap<PortRef, PolarizedAmplitude>,
    source_arrival: &mut PolarizedAmplitude,
    aborted: &mut BTreeMap<(ElementId, PortName), (AbsorberSide, PolarizedAmplitude)>,
) {
    match ctx.feeders.get(&in_port) {
        None => {
            let slot = aborted
                .entry((in_port.element.clone(), in_port.port))
                .or_insert((AbsorberSide::Vacuum, PolarizedAmplitude::ZERO));
            slot.1 += amp;
        }
        Some(link) => match ctx.kind(&link.from.element) {
            ElementKind::Source => *source_arrival += amp,
            ElementKind::ObjectAbsorber => {
                let slot = aborted
                    .entry((link.from.element.clone(), link.from.port))
                    .or_insert((AbsorberSide::Back, PolarizedAmplitude::ZERO));
                slot.1 += amp;
            }
            _ => *out_amps.entry(link.from.clone()).or_default() += amp,
        },
    }
}

/// Depth-first branch walk of the reverse wave, mirroring `flow_back`.
#[allow(clippy::too_many_arguments)]
fn walk_confirmation(
    ctx: &SweepCtx,
    in_port: PortRef,
    axis: PolAxis,
    amp: Amplitude,
    steps: Vec<PathStep>,
    source_paths: &mut Vec<PathRecord>,
    source_truncated: &mut bool,
    aborted_paths: &mut BTreeMap<(ElementId, PortName), (Vec<PathRecord>, bool)>,
    budget: &mut Budget,
) {
    if !budget.spend() {
        return;
    }
    match ctx.feeders.get(&in_port) {
        None => {
            // Implicit vacuum behind an unconnected in-port; the phantom
            // terminal is named after the port it shadows.
            let mut steps = steps;
            steps.push(PathStep::new(
                format!("~{}.{}", in_port.element, in_port.port),
                StepAction::Absorb,
            ));
            record_path(
                aborted_paths,
                (in_port.element.clone(), in_port.port),
                PathRecord {
                    direction: WaveDirection::Confirmation,
                    steps,
                    amplitude: amp,
                    exit_axis: axis,
                },
                budget.per_sink,
            );
        }
        Some(link) => match ctx.kind(&link.from.element) {
            ElementKind::Source => {
                let mut steps = steps;
                steps.push(PathStep::new(link.from.element.clone(), StepAction::Emit));
                if source_paths.len() < budget.per_sink {
                    source_paths.push(PathRecord {
                        direction: WaveDirection::Confirmation,
                        steps,
                        amplitude: amp,
                        exit_axis: axis,
                    });
                } else {
                    *source_truncated = true;
                }
            }
            ElementKind::ObjectAbsorber => {
                let mut steps = steps;
                steps.push(PathStep::new(link.from.element.clone(), StepAction::Absorb));
                record_path(
                    aborted_paths,
                    (link.from.element.clone(), link.from.port),
                    PathRecord {
                        direction: WaveDirection::Confirmation,
                        steps,
                        amplitude: amp,
                        exit_axis: axis,
                    },
                    budget.per_sink,
                );
            }
            _ => {
                let here = link.from.element.clone();
                let scattering = &ctx.scatterings[&here];
                for entry in scattering.entries_into(link.from.port) {
                    for new_axis in AXES {
                        // Transpose: the reverse coefficient from out-axis
                        // `axis` to in-axis `new_axis` is the forward
                        // coefficient new_axis -> axis.
                        let coeff = entry.jones.coeff(new_axis, axis);
                        if coeff.norm_sqr() == 0.0 {
                            continue;
                        }
                        let mut next_steps = steps.clone();
                        next_steps
                            .push(PathStep::new(here.clone(), step_action(entry.traversal)));
                        walk_confirmation(
                            ctx,
                            PortRef::new(here.clone(), entry.from),
                            new_axis,
                            amp * coeff,
                            next_steps,
                            source_paths,
                            source_truncated,
                            aborted_paths,
                            budget,
                        );
                    }
                }
            }
        },
    }
}

/// Runs the offer pass and one confirmation pass per sink element.
pub fn run_handshake(
    net: &OpticalNetwork,
    emission: PolarizedAmplitude,
    config: &EngineConfig,
) -> Result<Handshake, Error> {
    let offer = propagate_offer_with(net, emission, config)?;
    let mut confirmations = Vec::new();
    for (id, _) in net.sinks() {
        confirmations.push(propagate_confirmation_with(net, &offer, id, config)?);
    }
    Ok(Handshake {
        offer,
        confirmations,
    })
}

/// Assembles the two-sided probe ledger for every object in the network.
/// All values are copied from the offer and confirmation results.
pub fn probe_report(
    net: &OpticalNetwork,
    offer: &OfferResult,
    confirmations: &[ConfirmationResult],
) -> ProbeReport {
    let mut objects = Vec::new();
    for (id, kind) in net.elements() {
        if !matches!(kind, ElementKind::ObjectAbsorber) {
            continue;
        }
        let front_offer = offer
            .arrivals
            .iter()
            .find(|a| a.sink == *id && a.port == PortName::InFront)
            .map(|a| a.amplitude)
            .unwrap_or_default();
        let mut back_hits = Vec::new();
        for confirmation in confirmations {
            for component in &confirmation.aborted {
                if component.terminal == *id && component.side == AbsorberSide::Back {
                    back_hits.push((confirmation.origin.clone(), component.amplitude));
                }
            }
        }
        objects.push(ObjectProbe {
            object: id.clone(),
            front_offer,
            back_hits,
        });
    }
    ProbeReport { objects }
}
