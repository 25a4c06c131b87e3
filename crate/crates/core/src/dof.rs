//! Degree-of-freedom labels.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::Error;

/// Whether a DOF sits on a coupling interface or inside a component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DofKind {
    Internal,
    Interface,
}

/// A named degree of freedom owned by a structure.
///
/// Identity is `(name, structure)`; the kind is metadata and does not
/// participate in label matching.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DofLabel {
    pub name: String,
    pub kind: DofKind,
    pub structure: String,
}

impl DofLabel {
    pub fn internal(name: impl Into<String>, structure: impl Into<String>) -> Self {
        DofLabel {
            name: name.into(),
            kind: DofKind::Internal,
            structure: structure.into(),
        }
    }

    pub fn interface(name: impl Into<String>, structure: impl Into<String>) -> Self {
        DofLabel {
            name: name.into(),
            kind: DofKind::Interface,
            structure: structure.into(),
        }
    }

    /// Identity key: same name and owning structure.
    pub fn same_dof(&self, other: &DofLabel) -> bool {
        self.name == other.name && self.structure == other.structure
    }

    /// Qualified form used in files and queries.
    pub fn qualified(&self) -> String {
        if self.structure.is_empty() {
            self.name.clone()
        } else {
            format!("{}/{}", self.structure, self.name)
        }
    }

    /// True when `query` is either the bare name or `structure/name`.
    pub fn matches(&self, query: &str) -> bool {
        if let Some((s, n)) = query.split_once('/') {
            self.structure == s && self.name == n
        } else {
            self.name == query
        }
    }
}

impl fmt::Display for DofLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.qualified())
    }
}

/// Checks `(name, structure)` uniqueness over a label list.
pub fn check_unique(labels: &[DofLabel], context: &str) -> Result<(), Error> {
    for (i, a) in labels.iter().enumerate() {
        if labels[i + 1..].iter().any(|b| a.same_dof(b)) {
            return Err(Error::DuplicateLabel {
                label: a.qualified(),
                context: context.to_string(),
            });
        }
    }
    Ok(())
}

/// Resolves a query (bare name or `structure/name`) to an index in `labels`.
pub fn resolve(labels: &[DofLabel], query: &str, context: &str) -> Result<usize, Error> {
    let hits: Vec<usize> = labels
        .iter()
        .enumerate()
        .filter(|(_, l)| l.matches(query))
        .map(|(i, _)| i)
        .collect();
    match hits.len() {
        0 => Err(Error::UnknownLabel {
            label: query.to_string(),
            context: context.to_string(),
        }),
        1 => Ok(hits[0]),
        _ => Err(Error::AmbiguousLabel {
            label: query.to_string(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qualified_and_matching() {
        let l = DofLabel::interface("a2", "A");
        assert_eq!(l.qualified(), "A/a2");
        assert!(l.matches("a2"));
        assert!(l.matches("A/a2"));
        assert!(!l.matches("B/a2"));
    }

    #[test]
    fn resolve_rejects_unknown_and_ambiguous() {
        let labels = vec![DofLabel::internal("x", "A"), DofLabel::internal("x", "B")];
        assert!(matches!(
            resolve(&labels, "y", "t"),
            Err(Error::UnknownLabel { .. })
        ));
        assert!(matches!(
            resolve(&labels, "x", "t"),
            Err(Error::AmbiguousLabel { .. })
        ));
        assert_eq!(resolve(&labels, "B/x", "t").unwrap(), 1);
    }

    #[test]
    fn uniqueness_check() {
        let labels = vec![DofLabel::internal("x", "A"), DofLabel::interface("x", "A")];
        assert!(check_unique(&labels, "t").is_err());
    }
}
