//! Bra-ket bookkeeping for operators whose eigenvalues are objects.
//!
//! A basis `|0⟩ … |N−1⟩` is orthonormal: `⟨p|q⟩ = δ_pq`. An operator `ū`
//! acts diagonally, `ū|n⟩ = F_n|n⟩`, so the table of eigenvalues `F_n` is
//! both the operator and its state-like sum `Σ F_n|n⟩`. A state map `ψ̄` on
//! the basis induces the relative state `F_p ↦ F_{ψ̄(p)}` on eigenvalues.

use std::collections::BTreeMap;
use std::collections::HashSet;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::fincat::{NatTrans, ValidationReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BraketError {
    #[error("a basis needs at least one state")]
    EmptyBasis,
    #[error("duplicate state label `{0}`")]
    DuplicateLabel(String),
    #[error("state index {index} out of range for a basis of {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("table has {got} entries for a basis of {size}")]
    TableSize { got: usize, size: usize },
    #[error("tables are over different bases")]
    BasisMismatch,
    #[error("eigenvalue `{object}` would be sent to both `{first}` and `{second}`")]
    IllDefinedLift {
        object: String,
        first: String,
        second: String,
    },
    #[error("component {index} goes `{got}`, expected `{expected}`")]
    ComponentMismatch {
        index: usize,
        expected: String,
        got: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StateBasis {
    labels: Vec<String>,
}

impl StateBasis {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self, BraketError> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(BraketError::EmptyBasis);
        }
        let mut seen = HashSet::new();
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(BraketError::DuplicateLabel(label.clone()));
            }
        }
        Ok(StateBasis { labels })
    }

    /// `|0⟩ … |n−1⟩`.
    pub fn numbered(n: usize) -> Result<Self, BraketError> {
        Self::new((0..n).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    fn check(&self, index: usize) -> Result<usize, BraketError> {
        if index < self.labels.len() {
            Ok(index)
        } else {
            Err(BraketError::IndexOutOfRange {
                index,
                size: self.labels.len(),
            })
        }
    }

    /// `⟨p|q⟩`.
    pub fn inner(&self, p: usize, q: usize) -> Result<u8, BraketError> {
        Ok(u8::from(self.check(p)? == self.check(q)?))
    }
}

fn same_basis(a: &Arc<StateBasis>, b: &Arc<StateBasis>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// A diagonal operator, given by its eigenvalue `F_n` on each basis state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OperatorTable {
    name: String,
    #[serde(skip)]
    basis: Arc<StateBasis>,
    eigen: Vec<String>,
}

impl OperatorTable {
    pub fn new<S: Into<String>>(
        name: impl Into<String>,
        basis: Arc<StateBasis>,
        eigen: impl IntoIterator<Item = S>,
    ) -> Result<Self, BraketError> {
        let eigen: Vec<String> = eigen.into_iter().map(Into::into).collect();
        if eigen.len() != basis.len() {
            return Err(BraketError::TableSize {
                got: eigen.len(),
                size: basis.len(),
            });
        }
        Ok(OperatorTable {
            name: name.into(),
            basis,
            eigen,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn basis(&self) -> &Arc<StateBasis> {
        &self.basis
    }

    pub fn eigenvalues(&self) -> &[String] {
        &self.eigen
    }

    /// `ū|p⟩ = F_p|p⟩`, returned as `(F_p, p)`.
    pub fn eval(&self, p: usize) -> Result<(&str, usize), BraketError> {
        let p = self.basis.check(p)?;
        Ok((&self.eigen[p], p))
    }

    /// `⟨p|ū|p⟩ = F_p`: evaluate, then pair with `⟨p|`.
    pub fn project(&self, p: usize) -> Result<&str, BraketError> {
        let (object, q) = self.eval(p)?;
        debug_assert_eq!(self.basis.inner(p, q)?, 1);
        Ok(object)
    }

    /// Terms `(F_n, n)` of the state-like sum `Σ F_n|n⟩`.
    pub fn state_repr(&self) -> Vec<(&str, usize)> {
        self.eigen.iter().enumerate().map(|(n, f)| (f.as_str(), n)).collect()
    }
}

/// `⟨p|Σ F_n|n⟩ = Σ F_n⟨p|n⟩`, keeping the single surviving term.
pub fn pair_with_sum<'a>(basis: &StateBasis, p: usize, sum: &[(&'a str, usize)]) -> Result<&'a str, BraketError> {
    let mut hit = None;
    for &(object, n) in sum {
        if basis.inner(p, n)? == 1 {
            hit = Some(object);
        }
    }
    hit.ok_or(BraketError::IndexOutOfRange {
        index: p,
        size: basis.len(),
    })
}

/// A functor of basis states, given by where it sends each state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StateMap {
    name: String,
    #[serde(skip)]
    basis: Arc<StateBasis>,
    table: Vec<usize>,
}

impl StateMap {
    pub fn new(name: impl Into<String>, basis: Arc<StateBasis>, table: Vec<usize>) -> Result<Self, BraketError> {
        if table.len() != basis.len() {
            return Err(BraketError::TableSize {
                got: table.len(),
                size: basis.len(),
            });
        }
        for &q in &table {
            basis.check(q)?;
        }
        Ok(StateMap {
            name: name.into(),
            basis,
            table,
        })
    }

    pub fn identity(basis: Arc<StateBasis>) -> Self {
        let table = (0..basis.len()).collect();
        StateMap {
            name: "id".to_string(),
            basis,
            table,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, p: usize) -> Result<usize, BraketError> {
        Ok(self.table[self.basis.check(p)?])
    }

    /// `self` then `next`.
    pub fn then(&self, next: &StateMap) -> Result<StateMap, BraketError> {
        if !same_basis(&self.basis, &next.basis) {
            return Err(BraketError::BasisMismatch);
        }
        Ok(StateMap {
            name: format!("{}*{}", next.name, self.name),
            basis: self.basis.clone(),
            table: self.table.iter().map(|&q| next.table[q]).collect(),
        })
    }

    /// `self` applied `n` times.
    pub fn power(&self, n: usize) -> StateMap {
        let mut out = StateMap::identity(self.basis.clone());
        for _ in 0..n {
            out.table = out.table.iter().map(|&q| self.table[q]).collect();
        }
        out.name = format!("{}^{}", self.name, n);
        out
    }

    /// The relative state `F_p ↦ F_{ψ̄(p)}` on the eigenvalues of `op`.
    ///
    /// Fails when two states share an eigenvalue but their images do not.
    pub fn lift(&self, op: &OperatorTable) -> Result<BTreeMap<String, String>, BraketError> {
        if !same_basis(&self.basis, &op.basis) {
            return Err(BraketError::BasisMismatch);
        }
        let mut map: BTreeMap<String, String> = BTreeMap::new();
        for (p, &q) in self.table.iter().enumerate() {
            let (from, to) = (&op.eigen[p], &op.eigen[q]);
            match map.get(from) {
                Some(existing) if existing != to => {
                    return Err(BraketError::IllDefinedLift {
                        object: from.clone(),
                        first: existing.clone(),
                        second: to.clone(),
                    })
                }
                Some(_) => {}
                None => {
                    map.insert(from.clone(), to.clone());
                }
            }
        }
        Ok(map)
    }
}

/// A mutation `τ̄: ū ⇒ v̄`, one transformation `τ̄_n: F_n ⇒ G_n` per state.
#[derive(Debug, Clone)]
pub struct MutationTable {
    name: String,
    source: OperatorTable,
    target: OperatorTable,
    components: Vec<NatTrans>,
}

impl MutationTable {
    /// Each component's source and target functors must carry the names of
    /// the matching eigenvalues.
    pub fn new(
        name: impl Into<String>,
        source: OperatorTable,
        target: OperatorTable,
        components: Vec<NatTrans>,
    ) -> Result<Self, BraketError> {
        if !same_basis(&source.basis, &target.basis) {
            return Err(BraketError::BasisMismatch);
        }
        if components.len() != source.basis.len() {
            return Err(BraketError::TableSize {
                got: components.len(),
                size: source.basis.len(),
            });
        }
        for (n, tau) in components.iter().enumerate() {
            let (f, g) = (&source.eigen[n], &target.eigen[n]);
            if tau.source().name() != f || tau.target().name() != g {
                return Err(BraketError::ComponentMismatch {
                    index: n,
                    expected: format!("{f} => {g}"),
                    got: format!("{} => {}", tau.source().name(), tau.target().name()),
                });
            }
        }
        Ok(MutationTable {
            name: name.into(),
            source,
            target,
            components,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &OperatorTable {
        &self.source
    }

    pub fn target(&self) -> &OperatorTable {
        &self.target
    }

    /// `⟨p|τ̄⟩ = τ̄_p`.
    pub fn project(&self, p: usize) -> Result<&NatTrans, BraketError> {
        Ok(&self.components[self.source.basis.check(p)?])
    }

    /// `ψτ` at `F_p`: the component at `ψ̄(p)`, running `ψF_p ⇒ ψG_p`.
    pub fn shifted(&self, upsi: &StateMap, p: usize) -> Result<&NatTrans, BraketError> {
        if !same_basis(&upsi.basis, &self.source.basis) {
            return Err(BraketError::BasisMismatch);
        }
        self.project(upsi.apply(p)?)
    }

    /// Naturality report per component.
    pub fn check(&self) -> Vec<ValidationReport> {
        self.components.iter().map(NatTrans::check).collect()
    }
}
