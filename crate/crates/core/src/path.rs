//! Ordered element-visit records and their Dirac-notation rendering.

use alloc::string::String;
use alloc::vec::Vec;

use crate::amplitude::{Amplitude, PolAxis};
use crate::error::Error;
use crate::network::ElementId;

/// What happened to the wave at one element visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepAction {
    Emit,
    Transmit,
    Reflect,
    Rotate,
    Absorb,
    Detect,
}

/// Which leg of the handshake a path belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveDirection {
    /// Retarded wave from the source toward absorbers.
    Offer,
    /// Advanced wave from an absorber back toward the source.
    Confirmation,
}

/// One element visit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathStep {
    pub element: ElementId,
    pub action: StepAction,
}

impl PathStep {
    pub fn new(element: impl Into<ElementId>, action: StepAction) -> Self {
        PathStep {
            element: element.into(),
            action,
        }
    }
}

/// An ordered list of element visits with the complex amplitude accumulated
/// along that route. The amplitude is the scalar carried by one polarization
/// branch; `exit_axis` names the basis component the branch ends in.
#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    pub direction: WaveDirection,
    pub steps: Vec<PathStep>,
    pub amplitude: Amplitude,
    pub exit_axis: PolAxis,
}

impl PathRecord {
    /// Checks the first/last step actions required of a well-formed path.
    pub fn check(&self) -> Result<(), Error> {
        if self.steps.len() < 2 {
            return Err(Error::InvalidPath("a path needs at least two steps"));
        }
        let first = self.steps.first().expect("nonempty").action;
        let last = self.steps.last().expect("nonempty").action;
        let ok = match self.direction {
            WaveDirection::Offer => {
                first == StepAction::Emit
                    && matches!(last, StepAction::Detect | StepAction::Absorb)
            }
            WaveDirection::Confirmation => {
                matches!(first, StepAction::Detect | StepAction::Absorb)
                    && matches!(last, StepAction::Emit | StepAction::Absorb)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidPath(
                "first/last step actions do not match the wave direction",
            ))
        }
    }
}

/// Renders a path in the Dirac ket/bra notation: offers as `|E1-E2-...>`,
/// confirmations as `<E1-E2-...|`. Elements visited with a reflection are
/// wrapped in square brackets.
pub fn render_dirac(path: &PathRecord) -> Result<String, Error> {
    path.check()?;
    let mut body = String::new();
    for (idx, step) in path.steps.iter().enumerate() {
        if idx > 0 {
            body.push('-');
        }
        if step.action == StepAction::Reflect {
            body.push('[');
            body.push_str(step.element.as_str());
            body.push(']');
        } else {
            body.push_str(step.element.as_str());
        }
    }
    let mut out = String::with_capacity(body.len() + 2);
    match path.direction {
        WaveDirection::Offer => {
            out.push('|');
            out.push_str(&body);
            out.push('>');
        }
        WaveDirection::Confirmation => {
            out.push('<');
            out.push_str(&body);
            out.push('|');
        }
    }
    Ok(out)
}
