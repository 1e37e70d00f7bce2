//! Directed port-graph representation of an optical apparatus.
//!
//! Elements are identified by name and connected by directed links from
//! out-ports to in-ports. One link class is special: an `ObjectAbsorber` may
//! feed the in-port it shadows through its `in_back` port. Such a link carries
//! no forward amplitude (the object is opaque) but routes reverse-propagating
//! confirmation components onto the object's back side.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::element::{ElementKind, PortName};

/// Name of an element in the apparatus.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementId(pub String);

impl ElementId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl core::fmt::Display for ElementId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ElementId {
    fn from(s: &str) -> Self {
        ElementId(s.to_string())
    }
}

impl From<String> for ElementId {
    fn from(s: String) -> Self {
        ElementId(s)
    }
}

/// A specific port on a specific element.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PortRef {
    pub element: ElementId,
    pub port: PortName,
}

impl PortRef {
    pub fn new(element: impl Into<ElementId>, port: PortName) -> Self {
        PortRef {
            element: element.into(),
            port,
        }
    }
}

impl core::fmt::Display for PortRef {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}.{}", self.element, self.port)
    }
}

/// Directed connection from an out-port (or object back port) to an in-port.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Link {
    pub from: PortRef,
    pub to: PortRef,
}

/// A validation finding. Violations are reported, never thrown.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NoSource,
    MultipleSources(Vec<ElementId>),
    UnknownElement(ElementId),
    UnknownPort(PortRef),
    LinkFromNonOutPort(PortRef),
    LinkIntoOutPort(PortRef),
    DanglingOutPort(PortRef),
    MultipleLinksFromPort(PortRef),
    MultipleFeedsIntoPort(PortRef),
    Cycle(Vec<ElementId>),
    NonFiniteRotatorAngle(ElementId),
}

impl core::fmt::Display for Violation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Violation::NoSource => write!(f, "network has no source element"),
            Violation::MultipleSources(ids) => {
                write!(f, "multiple source elements:")?;
                for id in ids {
                    write!(f, " {id}")?;
                }
                Ok(())
            }
            Violation::UnknownElement(id) => write!(f, "link references unknown element `{id}`"),
            Violation::UnknownPort(p) => {
                write!(f, "element `{}` has no port `{}`", p.element, p.port)
            }
            Violation::LinkFromNonOutPort(p) => {
                write!(f, "link starts at `{p}`, which cannot emit")
            }
            Violation::LinkIntoOutPort(p) => write!(f, "link ends at out-port `{p}`"),
            Violation::DanglingOutPort(p) => write!(f, "out-port `{p}` has no link"),
            Violation::MultipleLinksFromPort(p) => {
                write!(f, "port `{p}` has more than one outgoing link")
            }
            Violation::MultipleFeedsIntoPort(p) => {
                write!(f, "in-port `{p}` has more than one incoming link")
            }
            Violation::Cycle(ids) => {
                write!(f, "link graph contains a cycle through:")?;
                for id in ids {
                    write!(f, " {id}")?;
                }
                Ok(())
            }
            Violation::NonFiniteRotatorAngle(id) => {
                write!(f, "rotator `{id}` has a non-finite angle")
            }
        }
    }
}

/// Directed port-graph of typed optical elements.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OpticalNetwork {
    elements: BTreeMap<ElementId, ElementKind>,
    links: Vec<Link>,
}

impl OpticalNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an element. Returns false (and changes nothing) if the id is taken.
    pub fn add(&mut self, id: impl Into<ElementId>, kind: ElementKind) -> bool {
        let id = id.into();
        if self.elements.contains_key(&id) {
            return false;
        }
        self.elements.insert(id, kind);
        true
    }

    /// Records a link. Structural problems are reported by `validate`, not here.
    pub fn link(
        &mut self,
        from: impl Into<ElementId>,
        from_port: PortName,
        to: impl Into<ElementId>,
        to_port: PortName,
    ) {
        self.links.push(Link {
            from: PortRef::new(from, from_port),
            to: PortRef::new(to, to_port),
        });
    }

    pub fn elements(&self) -> impl Iterator<Item = (&ElementId, &ElementKind)> {
        self.elements.iter()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn kind_of(&self, id: &ElementId) -> Option<&ElementKind> {
        self.elements.get(id)
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    /// The unique source element, if the network has exactly one.
    pub fn source(&self) -> Option<&ElementId> {
        let mut sources = self
            .elements
            .iter()
            .filter(|(_, k)| matches!(k, ElementKind::Source));
        match (sources.next(), sources.next()) {
            (Some((id, _)), None) => Some(id),
            _ => None,
        }
    }

    /// Sink elements (detectors, absorbers, vacuum ports) in id order.
    pub fn sinks(&self) -> impl Iterator<Item = (&ElementId, &ElementKind)> {
        self.elements.iter().filter(|(_, k)| k.is_sink())
    }

    /// The link feeding `port`, if any.
    pub fn feeder(&self, port: &PortRef) -> Option<&Link> {
        self.links.iter().find(|l| l.to == *port)
    }

    /// The link leaving `port`, if any.
    pub fn outgoing(&self, port: &PortRef) -> Option<&Link> {
        self.links.iter().find(|l| l.from == *port)
    }

    /// Whether a port may act as a link source: a true out-port, or an
    /// object's back port feeding the in-port it shadows.
    fn may_emit(kind: &ElementKind, port: PortName) -> bool {
        kind.out_ports().contains(&port)
            || (matches!(kind, ElementKind::ObjectAbsorber) && port == PortName::InBack)
    }

    /// Checks every structural invariant and returns all violations found.
    /// An empty list means the network is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut violations = Vec::new();

        let sources: Vec<ElementId> = self
            .elements
            .iter()
            .filter(|(_, k)| matches!(k, ElementKind::Source))
            .map(|(id, _)| id.clone())
            .collect();
        match sources.len() {
            0 => violations.push(Violation::NoSource),
            1 => {}
            _ => violations.push(Violation::MultipleSources(sources)),
        }

        for (id, kind) in &self.elements {
            if let ElementKind::PolarizationRotator(theta) = kind {
                if !theta.is_finite() {
                    violations.push(Violation::NonFiniteRotatorAngle(id.clone()));
                }
            }
        }

        let mut from_counts: BTreeMap<&PortRef, usize> = BTreeMap::new();
        let mut to_counts: BTreeMap<&PortRef, usize> = BTreeMap::new();
        for link in &self.links {
            let mut endpoints_ok = true;
            for end in [&link.from, &link.to] {
                match self.elements.get(&end.element) {
                    None => {
                        violations.push(Violation::UnknownElement(end.element.clone()));
                        endpoints_ok = false;
                    }
                    Some(kind) if !kind.has_port(end.port) => {
                        violations.push(Violation::UnknownPort(end.clone()));
                        endpoints_ok = false;
                    }
                    Some(_) => {}
                }
            }
            if !endpoints_ok {
                continue;
            }
            let from_kind = &self.elements[&link.from.element];
            let to_kind = &self.elements[&link.to.element];
            if !Self::may_emit(from_kind, link.from.port) {
                violations.push(Violation::LinkFromNonOutPort(link.from.clone()));
            }
            if to_kind.out_ports().contains(&link.to.port) {
                violations.push(Violation::LinkIntoOutPort(link.to.clone()));
            }
            *from_counts.entry(&link.from).or_insert(0) += 1;
            *to_counts.entry(&link.to).or_insert(0) += 1;
        }
        for (port, count) in &from_counts {
            if *count > 1 {
                violations.push(Violation::MultipleLinksFromPort((*port).clone()));
            }
        }
        for (port, count) in &to_counts {
            if *count > 1 {
                violations.push(Violation::MultipleFeedsIntoPort((*port).clone()));
            }
        }

        for (id, kind) in &self.elements {
            for &port in kind.out_ports() {
                let port_ref = PortRef::new(id.clone(), port);
                if !from_counts.contains_key(&port_ref) {
                    violations.push(Violation::DanglingOutPort(port_ref));
                }
            }
        }

        if let Some(cycle) = self.find_cycle() {
            violations.push(Violation::Cycle(cycle));
        }

        violations
    }

    /// Elements in topological order of the link graph, or the elements stuck
    /// on a cycle.
    fn kahn(&self) -> Result<Vec<ElementId>, Vec<ElementId>> {
        let mut indegree: BTreeMap<&ElementId, usize> =
            self.elements.keys().map(|id| (id, 0)).collect();
        let mut adjacency: BTreeMap<&ElementId, Vec<&ElementId>> = BTreeMap::new();
        for link in &self.links {
            let (from, to) = (&link.from.element, &link.to.element);
            if !self.elements.contains_key(from) || !self.elements.contains_key(to) {
                continue;
            }
            adjacency.entry(from).or_default().push(to);
            *indegree.get_mut(to).expect("known element") += 1;
        }
        // BTreeSet frontier keeps the order deterministic.
        let mut ready: BTreeSet<&ElementId> = indegree
            .iter()
            .filter(|(_, &d)| d == 0)
            .map(|(&id, _)| id)
            .collect();
        let mut order = Vec::with_capacity(self.elements.len());
        while let Some(&id) = ready.iter().next() {
            ready.remove(id);
            order.push(id.clone());
            for &next in adjacency.get(&id).into_iter().flatten() {
                let d = indegree.get_mut(next).expect("known element");
                *d -= 1;
                if *d == 0 {
                    ready.insert(next);
                }
            }
        }
        if order.len() == self.elements.len() {
            Ok(order)
        } else {
            Err(indegree
                .into_iter()
                .filter(|(_, d)| *d > 0)
                .map(|(id, _)| id.clone())
                .collect())
        }
    }

    fn find_cycle(&self) -> Option<Vec<ElementId>> {
        self.kahn().err()
    }

    /// Elements in topological order. None if the graph has a cycle.
    pub fn topo_order(&self) -> Option<Vec<ElementId>> {
        self.kahn().ok()
    }

    /// Same elements and same link set, ignoring link declaration order.
    pub fn same_topology(&self, other: &OpticalNetwork) -> bool {
        if self.elements != other.elements {
            return false;
        }
        let mine: BTreeSet<&Link> = self.links.iter().collect();
        let theirs: BTreeSet<&Link> = other.links.iter().collect();
        mine == theirs
    }

    /// In-ports with no incoming link, i.e. ports backed by implicit vacuum.
    pub fn dangling_in_ports(&self) -> Vec<PortRef> {
        let fed: BTreeSet<&PortRef> = self.links.iter().map(|l| &l.to).collect();
        let mut dangling = Vec::new();
        for (id, kind) in &self.elements {
            for &port in kind.in_ports() {
                let port_ref = PortRef::new(id.clone(), port);
                if !fed.contains(&port_ref) {
                    dangling.push(port_ref);
                }
            }
        }
        dangling
    }
}
