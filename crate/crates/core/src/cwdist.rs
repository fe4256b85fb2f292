//! Distances between CW complexes described by their attaching classes.
//!
//! Level `n` of a complex is the multiset of homotopy classes of the maps
//! attaching its `(n+1)`-cells (level 0 also lists the 0-cells). Classes are
//! opaque labels, compared only within a level.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CwError {
    #[error("no realization for `{0}`")]
    MissingRealization(String),
    #[error("unknown stack `{0}`")]
    UnknownStack(String),
    #[error("stack `{stack}` has no value on law `{law}`")]
    UnknownLaw { stack: String, law: String },
    #[error("no candidates to scan")]
    EmptyInput,
}

/// How `δ` counts differing classes at one level.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaMode {
    /// Multiset symmetric difference; keeps cell counts.
    #[default]
    Multiset,
    /// Symmetric difference of the underlying label sets.
    Set,
}

/// A multiset of labels as `label → multiplicity`.
pub type Skeleton = BTreeMap<String, usize>;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CwComplex {
    pub levels: Vec<Skeleton>,
}

impl CwComplex {
    pub fn new(levels: Vec<Skeleton>) -> Self {
        CwComplex { levels }
    }

    /// Builds from lists of labels, one list per level.
    pub fn from_labels<S: AsRef<str>>(levels: &[Vec<S>]) -> Self {
        let levels = levels
            .iter()
            .map(|level| {
                let mut skel = Skeleton::new();
                for label in level {
                    *skel.entry(label.as_ref().to_string()).or_default() += 1;
                }
                skel
            })
            .collect();
        CwComplex { levels }
    }

    pub fn level(&self, n: usize) -> Option<&Skeleton> {
        self.levels.get(n)
    }
}

/// `δ(C_n, C'_n)`.
pub fn delta_skeleton(a: &Skeleton, b: &Skeleton, mode: DeltaMode) -> usize {
    let labels: BTreeSet<&String> = a.keys().chain(b.keys()).collect();
    labels
        .into_iter()
        .map(|label| {
            let x = a.get(label).copied().unwrap_or(0);
            let y = b.get(label).copied().unwrap_or(0);
            match mode {
                DeltaMode::Multiset => x.abs_diff(y),
                DeltaMode::Set => usize::from((x > 0) != (y > 0)),
            }
        })
        .sum()
}

/// `d_CW(C, C') = Σ_n δ(C_n, C'_n)`; missing levels are empty.
pub fn d_cw(a: &CwComplex, b: &CwComplex, mode: DeltaMode) -> usize {
    let empty = Skeleton::new();
    let depth = a.levels.len().max(b.levels.len());
    (0..depth)
        .map(|n| delta_skeleton(a.level(n).unwrap_or(&empty), b.level(n).unwrap_or(&empty), mode))
        .sum()
}

/// Simplicial-set id → realization.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizationTable {
    pub realizations: BTreeMap<String, CwComplex>,
    #[serde(default)]
    pub mode: DeltaMode,
}

impl RealizationTable {
    pub fn new(realizations: BTreeMap<String, CwComplex>) -> Self {
        RealizationTable {
            realizations,
            mode: DeltaMode::Multiset,
        }
    }

    pub fn with_mode(mut self, mode: DeltaMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn get(&self, id: &str) -> Result<&CwComplex, CwError> {
        self.realizations
            .get(id)
            .ok_or_else(|| CwError::MissingRealization(id.to_string()))
    }

    /// `d(X, Y) = d_CW(|X|, |Y|)`.
    pub fn d_sset(&self, x: &str, y: &str) -> Result<usize, CwError> {
        let (cx, cy) = (self.get(x)?, self.get(y)?);
        Ok(d_cw(cx, cy, self.mode))
    }
}

/// Stacks as functors from laws to simplicial sets: `stack → law → sset id`.
pub type StackTable = BTreeMap<String, BTreeMap<String, String>>;

/// A state on stacks. Stacks not listed are fixed.
pub type StackMap = BTreeMap<String, String>;

fn image<'a>(psi: &'a StackMap, stack: &'a str) -> &'a str {
    psi.get(stack).map(String::as_str).unwrap_or(stack)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DifferentialMatrix {
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    pub entries: Vec<Vec<usize>>,
}

impl DifferentialMatrix {
    pub fn get(&self, stack: &str, law: &str) -> Option<usize> {
        let r = self.rows.iter().position(|s| s == stack)?;
        let c = self.columns.iter().position(|s| s == law)?;
        Some(self.entries[r][c])
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|&e| e == 0)
    }

    fn cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().flatten().copied()
    }

    /// `self ≤ other` entrywise with at least one strict entry.
    pub fn dominates(&self, other: &DifferentialMatrix) -> bool {
        let mut strict = false;
        for (a, b) in self.cells().zip(other.cells()) {
            if a > b {
                return false;
            }
            strict |= a < b;
        }
        strict
    }
}

/// `(Δψ)_{F,A} = d(ψFA, FA)` over sorted stacks and laws.
pub fn differential_matrix(
    psi: &StackMap,
    universe: &StackTable,
    stacks: &BTreeSet<String>,
    laws: &BTreeSet<String>,
    r: &RealizationTable,
) -> Result<DifferentialMatrix, CwError> {
    let value = |stack: &str, law: &str| -> Result<&String, CwError> {
        universe
            .get(stack)
            .ok_or_else(|| CwError::UnknownStack(stack.to_string()))?
            .get(law)
            .ok_or_else(|| CwError::UnknownLaw {
                stack: stack.to_string(),
                law: law.to_string(),
            })
    };
    let mut entries = Vec::with_capacity(stacks.len());
    for stack in stacks {
        let target = image(psi, stack);
        let mut row = Vec::with_capacity(laws.len());
        for law in laws {
            row.push(r.d_sset(value(target, law)?, value(stack, law)?)?);
        }
        entries.push(row);
    }
    Ok(DifferentialMatrix {
        rows: stacks.iter().cloned().collect(),
        columns: laws.iter().cloned().collect(),
        entries,
    })
}

/// Names of the nontrivial candidates whose matrices are Pareto-minimal
/// among the nontrivial ones, sorted.
pub fn quantum_scan(
    candidates: &BTreeMap<String, StackMap>,
    universe: &StackTable,
    stacks: &BTreeSet<String>,
    laws: &BTreeSet<String>,
    r: &RealizationTable,
) -> Result<Vec<String>, CwError> {
    if candidates.is_empty() {
        return Err(CwError::EmptyInput);
    }
    let mut live = Vec::new();
    for (name, psi) in candidates {
        let m = differential_matrix(psi, universe, stacks, laws, r)?;
        if !m.is_zero() {
            live.push((name, m));
        }
    }
    Ok(live
        .iter()
        .filter(|(_, m)| !live.iter().any(|(_, other)| other.dominates(m)))
        .map(|(name, _)| (*name).clone())
        .collect())
}
