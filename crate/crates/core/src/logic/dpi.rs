//! Diagnosis problem instances and their text file format.
//!
//! ```text
//! # comment
//! [K]
//! ax1: (implies A B)
//! A
//! [B]
//! [P]
//! [N]
//! B
//! ```
//!
//! All four section headers are required and each may be empty. Axioms in
//! `[K]` may carry a `label:` prefix; unlabelled axioms are named `ax<i>`
//! after their 1-based position.

use std::fmt;

use super::formula::{is_identifier, Formula, SentenceSet};
use super::parse::parse_formula;
use crate::error::{Error, Result};

/// A diagnosis problem instance: retractable axioms, background knowledge,
/// positive and negative measurements.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dpi {
    pub kb: SentenceSet,
    pub background: Vec<Formula>,
    pub positive: Vec<Formula>,
    pub negative: Vec<Formula>,
}

impl Dpi {
    pub fn new(kb: SentenceSet) -> Self {
        Dpi {
            kb,
            ..Default::default()
        }
    }

    /// Builds a DPI from axiom texts, labelled `ax1..axk`.
    pub fn from_axioms<'a>(axioms: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        let kb = axioms
            .into_iter()
            .map(parse_formula)
            .collect::<Result<SentenceSet>>()?;
        Ok(Dpi::new(kb))
    }

    pub fn with_positive(mut self, f: Formula) -> Self {
        self.positive.push(f);
        self
    }

    pub fn with_negative(mut self, f: Formula) -> Self {
        self.negative.push(f);
        self
    }

    pub fn with_background(mut self, f: Formula) -> Self {
        self.background.push(f);
        self
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    K,
    B,
    P,
    N,
}

/// Parses the DPI text format.
pub fn parse_dpi_file(text: &str) -> Result<Dpi> {
    let mut dpi = Dpi::default();
    let mut seen = [false; 4];
    let mut current: Option<Section> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let syntax = |message: String| Error::DpiSyntax {
            line: line_no,
            message,
        };
        if line.starts_with('[') {
            let section = match line {
                "[K]" => Section::K,
                "[B]" => Section::B,
                "[P]" => Section::P,
                "[N]" => Section::N,
                other => return Err(syntax(format!("unknown section header `{other}`"))),
            };
            if std::mem::replace(&mut seen[section as usize], true) {
                return Err(syntax(format!("section `{line}` appears twice")));
            }
            current = Some(section);
            continue;
        }
        let Some(section) = current else {
            return Err(syntax("content before the first section header".into()));
        };
        let (label, body) = match (section, line.split_once(':')) {
            (Section::K, Some((l, body))) => {
                let l = l.trim();
                if !is_identifier(l) {
                    return Err(syntax(format!("invalid axiom label `{l}`")));
                }
                (Some(l.to_string()), body)
            }
            _ => (None, line),
        };
        let formula = parse_formula(body).map_err(|e| syntax(e.to_string()))?;
        match section {
            Section::K => {
                let label = label.unwrap_or_else(|| format!("ax{}", dpi.kb.len() + 1));
                if !dpi.kb.push(label.clone(), formula) {
                    return Err(Error::DuplicateLabel(label));
                }
            }
            Section::B => dpi.background.push(formula),
            Section::P => dpi.positive.push(formula),
            Section::N => dpi.negative.push(formula),
        }
    }

    for (section, name) in [(Section::K, "K"), (Section::B, "B"), (Section::P, "P"), (Section::N, "N")] {
        if !seen[section as usize] {
            return Err(Error::MissingSection(name));
        }
    }
    Ok(dpi)
}

/// Renders the DPI in the file format accepted by [`parse_dpi_file`].
pub fn serialize_dpi(dpi: &Dpi) -> String {
    dpi.to_string()
}

impl fmt::Display for Dpi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[K]")?;
        for (label, ax) in self.kb.iter() {
            writeln!(f, "{label}: {ax}")?;
        }
        for (header, list) in [("[B]", &self.background), ("[P]", &self.positive), ("[N]", &self.negative)] {
            writeln!(f, "{header}")?;
            for s in list {
                writeln!(f, "{s}")?;
            }
        }
        Ok(())
    }
}
