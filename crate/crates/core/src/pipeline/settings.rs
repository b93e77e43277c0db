//! Pipeline settings documents:
//!
//! ```xml
//! <settings>
//!   <pipeline name="default">
//!     <phase>miniasm.ScanReadsPhase</phase>
//!     <phase>miniasm.FindPathsPhase<param name="cut" value="2"/></phase>
//!   </pipeline>
//! </settings>
//! ```
//!
//! `<param>` children of `<phase>` carry per-pipeline parameter overrides.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use super::Params;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SettingsError {
    #[error("XML syntax error at line {line}: {message}")]
    XmlSyntax { line: u32, message: String },
    #[error("pipeline element without a name attribute at line {line}")]
    MissingPipelineName { line: u32 },
    #[error("pipeline {0:?} has no phases")]
    EmptyPipeline(String),
    #[error("pipeline {0:?} is defined more than once")]
    DuplicatePipeline(String),
    #[error("unexpected element <{element}> at line {line}")]
    UnexpectedElement { element: String, line: u32 },
    #[error("phase without a name at line {line}")]
    MissingPhaseName { line: u32 },
    #[error("param at line {line} needs both name and value attributes")]
    BadParam { line: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhaseSpec {
    pub name: String,
    pub params: Params,
}

impl PhaseSpec {
    pub fn new(name: impl Into<String>) -> Self {
        PhaseSpec {
            name: name.into(),
            params: Params::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PipelineSpec {
    pub name: String,
    pub phases: Vec<PhaseSpec>,
}

impl PipelineSpec {
    pub fn new<I, S>(name: impl Into<String>, phases: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        PipelineSpec {
            name: name.into(),
            phases: phases.into_iter().map(|p| PhaseSpec::new(p)).collect(),
        }
    }

    pub fn phase_names(&self) -> impl Iterator<Item = &str> {
        self.phases.iter().map(|p| p.name.as_str())
    }
}

/// Parsed settings document: named pipelines in document order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Settings {
    pub pipelines: Vec<PipelineSpec>,
}

impl Settings {
    pub fn parse(xml: &str) -> Result<Self, SettingsError> {
        parse_settings(xml).map(|pipelines| Settings { pipelines })
    }

    pub fn pipeline(&self, name: &str) -> Option<&PipelineSpec> {
        self.pipelines.iter().find(|p| p.name == name)
    }

    pub fn names(&self) -> Vec<&str> {
        self.pipelines.iter().map(|p| p.name.as_str()).collect()
    }

    pub fn to_xml(&self) -> String {
        serialize_settings(&self.pipelines)
    }
}

fn line_of(doc: &roxmltree::Document<'_>, node: roxmltree::Node<'_, '_>) -> u32 {
    doc.text_pos_at(node.range().start).row
}

fn unexpected(doc: &roxmltree::Document<'_>, node: roxmltree::Node<'_, '_>) -> SettingsError {
    SettingsError::UnexpectedElement {
        element: node.tag_name().name().to_string(),
        line: line_of(doc, node),
    }
}

pub fn parse_settings(xml: &str) -> Result<Vec<PipelineSpec>, SettingsError> {
    let doc = roxmltree::Document::parse(xml).map_err(|e| SettingsError::XmlSyntax {
        line: e.pos().row,
        message: e.to_string(),
    })?;
    let root = doc.root_element();
    if root.tag_name().name() != "settings" {
        return Err(unexpected(&doc, root));
    }
    let mut seen = BTreeSet::new();
    let mut pipelines = Vec::new();
    for node in root.children().filter(|n| n.is_element()) {
        if node.tag_name().name() != "pipeline" {
            return Err(unexpected(&doc, node));
        }
        let name = node
            .attribute("name")
            .filter(|n| !n.trim().is_empty())
            .ok_or(SettingsError::MissingPipelineName {
                line: line_of(&doc, node),
            })?
            .to_string();
        if !seen.insert(name.clone()) {
            return Err(SettingsError::DuplicatePipeline(name));
        }
        let mut phases = Vec::new();
        for pnode in node.children().filter(|n| n.is_element()) {
            if pnode.tag_name().name() != "phase" {
                return Err(unexpected(&doc, pnode));
            }
            phases.push(parse_phase(&doc, pnode)?);
        }
        if phases.is_empty() {
            return Err(SettingsError::EmptyPipeline(name));
        }
        pipelines.push(PipelineSpec { name, phases });
    }
    Ok(pipelines)
}

fn parse_phase(doc: &roxmltree::Document<'_>, node: roxmltree::Node<'_, '_>) -> Result<PhaseSpec, SettingsError> {
    let mut name = String::new();
    let mut params = Params::new();
    for child in node.children() {
        if child.is_text() {
            name.push_str(child.text().unwrap_or(""));
        } else if child.is_element() {
            if child.tag_name().name() != "param" {
                return Err(unexpected(doc, child));
            }
            match (child.attribute("name"), child.attribute("value")) {
                (Some(n), Some(v)) if !n.is_empty() => params.set(n, v),
                _ => return Err(SettingsError::BadParam { line: line_of(doc, child) }),
            }
        }
    }
    let name = name.trim();
    if name.is_empty() {
        return Err(SettingsError::MissingPhaseName { line: line_of(doc, node) });
    }
    Ok(PhaseSpec {
        name: name.to_string(),
        params,
    })
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

pub fn serialize_settings(pipelines: &[PipelineSpec]) -> String {
    let mut out = String::from("<settings>\n");
    for p in pipelines {
        let _ = writeln!(out, "  <pipeline name=\"{}\">", escape(&p.name));
        for phase in &p.phases {
            let _ = write!(out, "    <phase>{}", escape(&phase.name));
            for (n, v) in phase.params.iter() {
                let _ = write!(out, "<param name=\"{}\" value=\"{}\"/>", escape(n), escape(v));
            }
            out.push_str("</phase>\n");
        }
        out.push_str("  </pipeline>\n");
    }
    out.push_str("</settings>\n");
    out
}
