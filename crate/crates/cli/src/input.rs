//! Reading JSON inputs with error messages anchored to a line of the file.

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde_json::Value;

use exodromy::category::FinCategoryJson;
use exodromy::complex::StratifiedComplexJson;
use exodromy::exit::ExitPresentationJson;
use exodromy::rep::RepresentationJson;
use exodromy::{ExitPresentation, FinCategory, StratifiedComplex};

use crate::error::CliError;

/// The text of an input file.
pub struct Source {
    pub path: PathBuf,
    pub text: String,
}

/// What kind of document a JSON file holds, judged by its top-level keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Complex,
    Presentation,
    Category,
    Representation,
}

impl Source {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        Ok(Source { path: path.to_owned(), text })
    }

    pub fn parse<T: DeserializeOwned>(&self) -> Result<T, CliError> {
        serde_json::from_str(&self.text).map_err(|e| {
            CliError::Validation(format!("{}:{}:{}: {}", self.path.display(), e.line(), e.column(), strip_position(&e)))
        })
    }

    /// A validation error pointing at the first line that mentions the first
    /// backquoted name in `err`, or at the file when there is none.
    pub fn invalid(&self, err: impl Display) -> CliError {
        let msg = err.to_string();
        let line = quoted_name(&msg).and_then(|name| {
            let needle = serde_json::to_string(name).ok()?;
            self.text.lines().position(|l| l.contains(&needle)).map(|i| i + 1)
        });
        match line {
            Some(n) => CliError::Validation(format!("{}:{n}: {msg}", self.path.display())),
            None => CliError::Validation(format!("{}: {msg}", self.path.display())),
        }
    }

    pub fn kind(&self) -> Result<Kind, CliError> {
        let value: Value = self.parse()?;
        let Value::Object(map) = value else {
            return Err(self.invalid("expected a JSON object"));
        };
        let has = |k: &str| map.contains_key(k);
        if has("pres") {
            Ok(Kind::Representation)
        } else if has("shape") {
            Ok(Kind::Presentation)
        } else if has("objects") {
            Ok(Kind::Category)
        } else if has("vertices") || has("cells") {
            Ok(Kind::Complex)
        } else {
            Err(self.invalid("cannot tell what this file describes (expected `shape`, `vertices`, `cells`, `objects` or `pres`)"))
        }
    }

    pub fn complex(&self) -> Result<StratifiedComplex, CliError> {
        let json: StratifiedComplexJson = self.parse()?;
        StratifiedComplex::from_json(&json).map_err(|e| self.invalid(e))
    }

    /// A presentation, building it first when the file holds a stratified
    /// complex.
    pub fn presentation(&self) -> Result<ExitPresentation, CliError> {
        match self.kind()? {
            Kind::Complex => Ok(ExitPresentation::presentation_of(&self.complex()?)),
            Kind::Presentation => {
                let json: ExitPresentationJson = self.parse()?;
                ExitPresentation::from_json(&json).map_err(|e| self.invalid(e))
            }
            Kind::Representation => {
                let json: RepresentationJson = self.parse()?;
                ExitPresentation::from_json(&json.pres).map_err(|e| self.invalid(e))
            }
            Kind::Category => Err(self.invalid("expected a presentation or a stratified complex, found a category")),
        }
    }

    pub fn category(&self) -> Result<FinCategory, CliError> {
        let json: FinCategoryJson = self.parse()?;
        FinCategory::from_json(&json).map_err(|e| self.invalid(e))
    }
}

fn strip_position(e: &serde_json::Error) -> String {
    let text = e.to_string();
    match text.rfind(" at line ") {
        Some(i) => text[..i].to_owned(),
        None => text,
    }
}

fn quoted_name(msg: &str) -> Option<&str> {
    let start = msg.find('`')? + 1;
    let len = msg[start..].find('`')?;
    Some(&msg[start..start + len])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn source(text: &str) -> Source {
        Source { path: "in.json".into(), text: text.into() }
    }

    #[test]
    fn syntax_errors_carry_line_and_column() {
        let s = source("{\n  \"vertices\": [\"a\",\n}");
        let err = s.parse::<Value>().unwrap_err().to_string();
        assert!(err.starts_with("in.json:3:1: "), "{err}");
    }

    #[test]
    fn semantic_errors_point_at_the_named_token() {
        let s = source("{\n  \"vertices\": [\"a\"],\n  \"faces\": [[\"a\"], [\"zz\"]]\n}");
        let err = s.complex().unwrap_err().to_string();
        assert_eq!(err, "in.json:3: unknown vertex `zz`");
    }

    #[test]
    fn kinds_are_recognized() {
        assert_eq!(source(r#"{"cells": {"elements": []}}"#).kind().unwrap(), Kind::Complex);
        assert_eq!(source(r#"{"shape": {}, "strat": {}}"#).kind().unwrap(), Kind::Presentation);
        assert_eq!(source(r#"{"objects": []}"#).kind().unwrap(), Kind::Category);
        assert!(source("[1]").kind().is_err());
    }
}
