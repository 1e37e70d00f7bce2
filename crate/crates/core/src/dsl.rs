//! Line-oriented textual description of an optical network.
//!
//! Grammar (UTF-8 text, one declaration per line):
//!
//! ```text
//! file        := line*
//! line        := node-decl | link-decl | comment | blank
//! node-decl   := "node" ID KIND param*
//! KIND        := "source" | "mirror" | "bs" | "pbs" | "rot" | "object"
//!              | "detector" | "vacuum"
//! param       := "theta=" DECIMAL            # required iff KIND = rot
//! link-decl   := "link" ID "." PORT "->" ID "." PORT
//! PORT        := "out" | "in" | "in0" | "in1" | "out0" | "out1"
//!              | "in_front" | "in_back"
//! comment     := "#" any-text
//! ```
//!
//! A `#` starts a comment anywhere on a line. Rotator angles are decimal
//! radians only. Unknown trailing tokens on a valid line are errors, not
//! warnings. Parsing never partially succeeds: either the whole file is
//! structurally valid or every error is returned, each with its 1-based
//! line number and a reason code.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::element::{ElementKind, PortName};
use crate::error::Error;
use crate::network::OpticalNetwork;

/// Why a line failed to parse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorCode {
    UnknownKind,
    BadArity,
    DuplicateId,
    UnknownPort,
    MalformedToken,
    EmptyScenario,
}

impl ParseErrorCode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ParseErrorCode::UnknownKind => "unknown-kind",
            ParseErrorCode::BadArity => "bad-arity",
            ParseErrorCode::DuplicateId => "duplicate-id",
            ParseErrorCode::UnknownPort => "unknown-port",
            ParseErrorCode::MalformedToken => "malformed-token",
            ParseErrorCode::EmptyScenario => "empty-scenario",
        }
    }
}

/// One parse failure with its 1-based line number.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub code: ParseErrorCode,
    pub message: String,
}

impl core::fmt::Display for ParseError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "line {}: {}: {}", self.line, self.code.as_str(), self.message)
    }
}

/// A node declaration with its source line.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeDecl {
    pub id: String,
    pub kind: ElementKind,
    pub line: usize,
}

/// A link declaration with its source line.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkDecl {
    pub from_element: String,
    pub from_port: PortName,
    pub to_element: String,
    pub to_port: PortName,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Declaration {
    Node(NodeDecl),
    Link(LinkDecl),
}

/// A parsed scenario: every declaration is structurally valid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSource {
    pub name: String,
    pub origin: String,
    pub declarations: Vec<Declaration>,
}

impl ScenarioSource {
    pub fn node_decls(&self) -> impl Iterator<Item = &NodeDecl> {
        self.declarations.iter().filter_map(|d| match d {
            Declaration::Node(n) => Some(n),
            Declaration::Link(_) => None,
        })
    }

    pub fn link_decls(&self) -> impl Iterator<Item = &LinkDecl> {
        self.declarations.iter().filter_map(|d| match d {
            Declaration::Link(l) => Some(l),
            Declaration::Node(_) => None,
        })
    }
}

fn is_valid_id(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_kind(token: &str) -> Option<ElementKind> {
    Some(match token {
        "source" => ElementKind::Source,
        "mirror" => ElementKind::Mirror,
        "bs" => ElementKind::BeamSplitter,
        "pbs" => ElementKind::PolarizingBeamSplitter,
        "rot" => ElementKind::PolarizationRotator(0.0),
        "object" => ElementKind::ObjectAbsorber,
        "detector" => ElementKind::Detector,
        "vacuum" => ElementKind::VacuumPort,
        _ => return None,
    })
}

/// Parses scenario text. Returns the scenario, or every error found.
pub fn parse(text: &str) -> Result<ScenarioSource, Vec<ParseError>> {
    parse_named("inline", "inline", text)
}

/// Parses scenario text carrying a scenario name and origin tag.
pub fn parse_named(
    name: &str,
    origin: &str,
    text: &str,
) -> Result<ScenarioSource, Vec<ParseError>> {
    let mut errors: Vec<ParseError> = Vec::new();
    let mut declarations: Vec<Declaration> = Vec::new();
    let mut seen_ids: Vec<String> = Vec::new();

    for (index, raw_line) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let fail = |code: ParseErrorCode, message: String| ParseError {
            line: line_no,
            code,
            message,
        };
        match tokens[0] {
            "node" => match parse_node(&tokens, line_no) {
                Ok(node) => {
                    if seen_ids.contains(&node.id) {
                        errors.push(fail(
                            ParseErrorCode::DuplicateId,
                            format!("node id `{}` is already declared", node.id),
                        ));
                    } else {
                        seen_ids.push(node.id.clone());
                        declarations.push(Declaration::Node(node));
                    }
                }
                Err(e) => errors.push(e),
            },
            "link" => match parse_link(&tokens, line_no) {
                Ok(link) => declarations.push(Declaration::Link(link)),
                Err(e) => errors.push(e),
            },
            other => errors.push(fail(
                ParseErrorCode::MalformedToken,
                format!("expected `node`, `link`, or a comment, found `{other}`"),
            )),
        }
    }

    if errors.is_empty() && declarations.is_empty() {
        errors.push(ParseError {
            line: 1,
            code: ParseErrorCode::EmptyScenario,
            message: "scenario contains no declarations".to_string(),
        });
    }
    if errors.is_empty() {
        Ok(ScenarioSource {
            name: name.to_string(),
            origin: origin.to_string(),
            declarations,
        })
    } else {
        Err(errors)
    }
}

fn parse_node(tokens: &[&str], line: usize) -> Result<NodeDecl, ParseError> {
    let fail = |code: ParseErrorCode, message: String| ParseError {
        line,
        code,
        message,
    };
    if tokens.len() < 3 {
        return Err(fail(
            ParseErrorCode::BadArity,
            "node declaration needs an id and a kind".to_string(),
        ));
    }
    let id = tokens[1];
    if !is_valid_id(id) {
        return Err(fail(
            ParseErrorCode::MalformedToken,
            format!("`{id}` is not a valid identifier"),
        ));
    }
    let mut kind = parse_kind(tokens[2]).ok_or_else(|| {
        fail(
            ParseErrorCode::UnknownKind,
            format!("`{}` is not an element kind", tokens[2]),
        )
    })?;
    let params = &tokens[3..];
    if let ElementKind::PolarizationRotator(_) = kind {
        match params {
            [param] => match param.strip_prefix("theta=") {
                Some(value) => match value.parse::<f64>() {
                    Ok(theta) if theta.is_finite() => {
                        kind = ElementKind::PolarizationRotator(theta);
                    }
                    _ => {
                        return Err(fail(
                            ParseErrorCode::MalformedToken,
                            format!("`{value}` is not a finite decimal angle"),
                        ))
                    }
                },
                None => {
                    return Err(fail(
                        ParseErrorCode::MalformedToken,
                        format!("expected `theta=DECIMAL`, found `{param}`"),
                    ))
                }
            },
            [] => {
                return Err(fail(
                    ParseErrorCode::BadArity,
                    "rotator needs a `theta=DECIMAL` parameter".to_string(),
                ))
            }
            _ => {
                return Err(fail(
                    ParseErrorCode::BadArity,
                    "rotator takes exactly one `theta=` parameter".to_string(),
                ))
            }
        }
    } else if !params.is_empty() {
        return Err(fail(
            ParseErrorCode::BadArity,
            format!("unexpected trailing tokens after `{}`", tokens[2]),
        ));
    }
    Ok(NodeDecl {
        id: id.to_string(),
        kind,
        line,
    })
}

fn parse_link(tokens: &[&str], line: usize) -> Result<LinkDecl, ParseError> {
    let fail = |code: ParseErrorCode, message: String| ParseError {
        line,
        code,
        message,
    };
    if tokens.len() < 2 {
        return Err(fail(
            ParseErrorCode::BadArity,
            "link declaration needs two endpoints".to_string(),
        ));
    }
    // Whitespace around `->` is optional; collapse the operand tokens.
    let joined: String = tokens[1..].concat();
    let mut sides = joined.split("->");
    let (lhs, rhs) = match (sides.next(), sides.next(), sides.next()) {
        (Some(lhs), Some(rhs), None) => (lhs, rhs),
        _ => {
            return Err(fail(
                ParseErrorCode::MalformedToken,
                format!("expected `ID.PORT -> ID.PORT`, found `{joined}`"),
            ))
        }
    };
    let endpoint = |side: &str| -> Result<(String, PortName), ParseError> {
        let mut parts = side.split('.');
        let (element, port) = match (parts.next(), parts.next(), parts.next()) {
            (Some(element), Some(port), None) => (element, port),
            _ => {
                return Err(fail(
                    ParseErrorCode::MalformedToken,
                    format!("expected `ID.PORT`, found `{side}`"),
                ))
            }
        };
        if !is_valid_id(element) {
            return Err(fail(
                ParseErrorCode::MalformedToken,
                format!("`{element}` is not a valid identifier"),
            ));
        }
        let port = PortName::parse(port).ok_or_else(|| {
            fail(
                ParseErrorCode::UnknownPort,
                format!("`{port}` is not a port name"),
            )
        })?;
        Ok((element.to_string(), port))
    };
    let (from_element, from_port) = endpoint(lhs)?;
    let (to_element, to_port) = endpoint(rhs)?;
    Ok(LinkDecl {
        from_element,
        from_port,
        to_element,
        to_port,
        line,
    })
}

/// Builds the optical network a parsed scenario describes. Semantic
/// violations (undeclared endpoints, cycles, multiple sources, port misuse)
/// are reported through the attached violation list.
pub fn to_network(src: &ScenarioSource) -> Result<OpticalNetwork, Error> {
    let mut net = OpticalNetwork::new();
    for node in src.node_decls() {
        net.add(node.id.as_str(), node.kind);
    }
    for link in src.link_decls() {
        net.link(
            link.from_element.as_str(),
            link.from_port,
            link.to_element.as_str(),
            link.to_port,
        );
    }
    let violations = net.validate();
    if violations.is_empty() {
        Ok(net)
    } else {
        Err(Error::InvalidNetwork(violations))
    }
}

/// Renders a network back to scenario text: node lines sorted by id, then
/// link lines sorted by endpoint. `parse` followed by `to_network`
/// reproduces a network with identical elements and links.
pub fn serialize(net: &OpticalNetwork) -> String {
    let mut out = String::new();
    for (id, kind) in net.elements() {
        match kind {
            ElementKind::PolarizationRotator(theta) => {
                out.push_str(&format!("node {id} rot theta={theta}\n"));
            }
            other => out.push_str(&format!("node {id} {}\n", other.keyword())),
        }
    }
    let mut links = net.links().to_vec();
    links.sort();
    for link in links {
        out.push_str(&format!(
            "link {}.{} -> {}.{}\n",
            link.from.element, link.from.port, link.to.element, link.to.port
        ));
    }
    out
}
