//! Optical element kinds, their port layouts, and their scattering behavior.

use alloc::vec;
use alloc::vec::Vec;

use crate::amplitude::{Amplitude, Jones};
use crate::error::Error;

/// The kinds of optical elements an apparatus can contain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElementKind {
    Source,
    Mirror,
    BeamSplitter,
    PolarizingBeamSplitter,
    /// Rotates the polarization plane by the given angle in radians.
    PolarizationRotator(f64),
    ObjectAbsorber,
    Detector,
    VacuumPort,
}

impl ElementKind {
    /// DSL keyword for this kind.
    pub fn keyword(&self) -> &'static str {
        match self {
            ElementKind::Source => "source",
            ElementKind::Mirror => "mirror",
            ElementKind::BeamSplitter => "bs",
            ElementKind::PolarizingBeamSplitter => "pbs",
            ElementKind::PolarizationRotator(_) => "rot",
            ElementKind::ObjectAbsorber => "object",
            ElementKind::Detector => "detector",
            ElementKind::VacuumPort => "vacuum",
        }
    }

    /// In-ports of this kind, in canonical order.
    pub fn in_ports(&self) -> &'static [PortName] {
        match self {
            ElementKind::Source => &[],
            ElementKind::Mirror | ElementKind::PolarizationRotator(_) => &[PortName::In],
            ElementKind::BeamSplitter | ElementKind::PolarizingBeamSplitter => {
                &[PortName::In0, PortName::In1]
            }
            ElementKind::ObjectAbsorber => &[PortName::InFront, PortName::InBack],
            ElementKind::Detector | ElementKind::VacuumPort => &[PortName::In],
        }
    }

    /// Out-ports of this kind, in canonical order.
    pub fn out_ports(&self) -> &'static [PortName] {
        match self {
            ElementKind::Source => &[PortName::Out],
            ElementKind::Mirror | ElementKind::PolarizationRotator(_) => &[PortName::Out],
            ElementKind::BeamSplitter | ElementKind::PolarizingBeamSplitter => {
                &[PortName::Out0, PortName::Out1]
            }
            ElementKind::ObjectAbsorber | ElementKind::Detector | ElementKind::VacuumPort => &[],
        }
    }

    pub fn has_port(&self, port: PortName) -> bool {
        self.in_ports().contains(&port) || self.out_ports().contains(&port)
    }

    /// Whether this kind terminates forward waves (absorbs rather than scatters).
    pub fn is_sink(&self) -> bool {
        matches!(
            self,
            ElementKind::ObjectAbsorber | ElementKind::Detector | ElementKind::VacuumPort
        )
    }

    pub fn is_scattering(&self) -> bool {
        matches!(
            self,
            ElementKind::Mirror
                | ElementKind::BeamSplitter
                | ElementKind::PolarizingBeamSplitter
                | ElementKind::PolarizationRotator(_)
        )
    }
}

/// Fixed port vocabulary across all element kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PortName {
    Out,
    In,
    In0,
    In1,
    Out0,
    Out1,
    InFront,
    InBack,
}

impl PortName {
    pub fn as_str(&self) -> &'static str {
        match self {
            PortName::Out => "out",
            PortName::In => "in",
            PortName::In0 => "in0",
            PortName::In1 => "in1",
            PortName::Out0 => "out0",
            PortName::Out1 => "out1",
            PortName::InFront => "in_front",
            PortName::InBack => "in_back",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "out" => PortName::Out,
            "in" => PortName::In,
            "in0" => PortName::In0,
            "in1" => PortName::In1,
            "out0" => PortName::Out0,
            "out1" => PortName::Out1,
            "in_front" => PortName::InFront,
            "in_back" => PortName::InBack,
            _ => return None,
        })
    }
}

impl core::fmt::Display for PortName {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How a wave component traverses one scattering entry; recorded in path steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Traversal {
    Transmit,
    Reflect,
    Rotate,
}

/// One in-port to out-port coupling with its Jones matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterEntry {
    pub from: PortName,
    pub to: PortName,
    pub jones: Jones,
    pub traversal: Traversal,
}

/// Full transfer description of a scattering element: per-polarization complex
/// coefficients from each in-port to each out-port.
#[derive(Debug, Clone, PartialEq)]
pub struct Scattering {
    pub entries: Vec<ScatterEntry>,
}

impl Scattering {
    pub fn entries_from(&self, port: PortName) -> impl Iterator<Item = &ScatterEntry> {
        self.entries.iter().filter(move |e| e.from == port)
    }

    pub fn entries_into(&self, port: PortName) -> impl Iterator<Item = &ScatterEntry> {
        self.entries.iter().filter(move |e| e.to == port)
    }

    /// Largest deviation from column orthonormality of the full
    /// (port x polarization) transfer matrix. Zero for a unitary description.
    pub fn unitarity_defect(&self, kind: &ElementKind) -> f64 {
        use crate::amplitude::PolAxis;
        let ins = kind.in_ports();
        let outs = kind.out_ports();
        let axes = [PolAxis::H, PolAxis::V];
        let mut columns: Vec<Vec<Amplitude>> = Vec::new();
        for &ip in ins {
            for &ia in &axes {
                let mut col = Vec::new();
                for &op in outs {
                    for &oa in &axes {
                        let mut c = Amplitude::new(0.0, 0.0);
                        for e in self.entries.iter().filter(|e| e.from == ip && e.to == op) {
                            c += e.jones.coeff(ia, oa);
                        }
                        col.push(c);
                    }
                }
                columns.push(col);
            }
        }
        let mut defect = 0.0f64;
        for (i, a) in columns.iter().enumerate() {
            for (j, b) in columns.iter().enumerate() {
                let dot: Amplitude = a
                    .iter()
                    .zip(b.iter())
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                let d = (dot - Amplitude::new(expect, 0.0)).norm();
                if d > defect {
                    defect = d;
                }
            }
        }
        defect
    }
}

const FRAC_1_SQRT_2: f64 = core::f64::consts::FRAC_1_SQRT_2;

/// Transfer description for a scattering element kind.
///
/// Conventions: a reflected wave is 90 degrees out of phase with the
/// corresponding transmitted wave, so every reflection carries a factor `i`.
/// The 50/50 beam splitter uses the symmetric matrix (1/sqrt(2))[[1, i], [i, 1]]
/// per polarization; the polarizing beam splitter transmits H (coefficient 1)
/// and reflects V (coefficient i).
pub fn scattering_matrix(kind: &ElementKind) -> Result<Scattering, Error> {
    let one = Amplitude::new(1.0, 0.0);
    let i = Amplitude::new(0.0, 1.0);
    let t = Amplitude::new(FRAC_1_SQRT_2, 0.0);
    let r = Amplitude::new(0.0, FRAC_1_SQRT_2);
    let zero = Amplitude::new(0.0, 0.0);
    let entries = match kind {
        ElementKind::Mirror => vec![ScatterEntry {
            from: PortName::In,
            to: PortName::Out,
            jones: Jones::scalar(i),
            traversal: Traversal::Reflect,
        }],
        ElementKind::BeamSplitter => vec![
            ScatterEntry {
                from: PortName::In0,
                to: PortName::Out0,
                jones: Jones::scalar(t),
                traversal: Traversal::Transmit,
            },
            ScatterEntry {
                from: PortName::In0,
                to: PortName::Out1,
                jones: Jones::scalar(r),
                traversal: Traversal::Reflect,
            },
            ScatterEntry {
                from: PortName::In1,
                to: PortName::Out0,
                jones: Jones::scalar(r),
                traversal: Traversal::Reflect,
            },
            ScatterEntry {
                from: PortName::In1,
                to: PortName::Out1,
                jones: Jones::scalar(t),
                traversal: Traversal::Transmit,
            },
        ],
        ElementKind::PolarizingBeamSplitter => vec![
            ScatterEntry {
                from: PortName::In0,
                to: PortName::Out0,
                jones: Jones::diagonal(one, zero),
                traversal: Traversal::Transmit,
            },
            ScatterEntry {
                from: PortName::In0,
                to: PortName::Out1,
                jones: Jones::diagonal(zero, i),
                traversal: Traversal::Reflect,
            },
            ScatterEntry {
                from: PortName::In1,
                to: PortName::Out1,
                jones: Jones::diagonal(one, zero),
                traversal: Traversal::Transmit,
            },
            ScatterEntry {
                from: PortName::In1,
                to: PortName::Out0,
                jones: Jones::diagonal(zero, i),
                traversal: Traversal::Reflect,
            },
        ],
        ElementKind::PolarizationRotator(theta) => vec![ScatterEntry {
            from: PortName::In,
            to: PortName::Out,
            jones: Jones::rotation(*theta),
            traversal: Traversal::Rotate,
        }],
        other => return Err(Error::UnsupportedElement(other.keyword())),
    };
    Ok(Scattering { entries })
}
