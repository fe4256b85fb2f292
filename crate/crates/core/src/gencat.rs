//! Generalized categories: amalgams of objects and cube-shaped morphisms.
//!
//! A morphism `f: (c_1 … c_n) → (d_1 … d_m)` has at entry `(i, j)` a quiver
//! of base morphisms `c_i → d_j`, each tagged by a flavor. Composing two cells
//! records the flavor of each factor and the index of the object passed
//! through, so a flavor is a tower `λ_0, j_1, λ_1, j_2, …, λ_r`.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::fincat::{FinCatError, FinCategory, FinFunctor, Mor, Obj};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("an amalgam needs at least one part")]
    EmptyAmalgam,
    #[error("unknown object index {0}")]
    UnknownObject(usize),
    #[error("unknown morphism index {0}")]
    UnknownMorphism(usize),
    #[error("entry ({i}, {j}) is outside a {n}x{m} cube")]
    EntryOutOfRange { i: usize, j: usize, n: usize, m: usize },
    #[error("entry ({i}, {j}) has an empty quiver")]
    EmptyQuiver { i: usize, j: usize },
    #[error("cell `{morphism}` at ({i}, {j}) does not run {expected}")]
    CellShape {
        i: usize,
        j: usize,
        morphism: String,
        expected: String,
    },
    #[error("flavor `{flavor}` repeats at ({i}, {j})")]
    DuplicateFlavor { i: usize, j: usize, flavor: String },
    #[error("malformed flavor tower at ({i}, {j})")]
    MalformedFlavor { i: usize, j: usize },
    #[error("morphisms live over different base categories")]
    BaseMismatch,
    #[error("target amalgam of the first does not match the source of the second")]
    NotComposable,
    #[error("selection at ({i}, {j}): {reason}")]
    Selection { i: usize, j: usize, reason: String },
    #[error(transparent)]
    Base(#[from] FinCatError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Amalgam {
    parts: Vec<Obj>,
}

impl Amalgam {
    pub fn new(parts: Vec<Obj>) -> Result<Self, GenError> {
        if parts.is_empty() {
            return Err(GenError::EmptyAmalgam);
        }
        Ok(Amalgam { parts })
    }

    pub fn singleton(x: Obj) -> Self {
        Amalgam { parts: vec![x] }
    }

    pub fn parts(&self) -> &[Obj] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

/// A flavor tower. `labels` has one more element than `through`; `None`
/// marks the flavor carried by an identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Flavor {
    labels: Vec<Option<String>>,
    through: Vec<usize>,
}

impl Flavor {
    pub fn label(label: impl Into<String>) -> Self {
        Flavor {
            labels: vec![Some(label.into())],
            through: Vec::new(),
        }
    }

    pub fn unit() -> Self {
        Flavor {
            labels: vec![None],
            through: Vec::new(),
        }
    }

    pub fn labels(&self) -> &[Option<String>] {
        &self.labels
    }

    pub fn through(&self) -> &[usize] {
        &self.through
    }

    pub fn depth(&self) -> usize {
        self.through.len()
    }

    fn well_formed(&self) -> bool {
        self.labels.len() == self.through.len() + 1
    }

    /// `self`, then through part `j`, then `next`.
    pub fn then(&self, j: usize, next: &Flavor) -> Flavor {
        let mut labels = self.labels.clone();
        labels.extend(next.labels.iter().cloned());
        let mut through = self.through.clone();
        through.push(j);
        through.extend(next.through.iter().copied());
        Flavor { labels, through }
    }

    /// Drops identity flavors together with one neighboring through index.
    pub fn normalized(&self) -> Flavor {
        let mut labels = Vec::new();
        let mut through = Vec::new();
        for (k, label) in self.labels.iter().enumerate() {
            if label.is_none() {
                continue;
            }
            if !labels.is_empty() {
                // the index joining this label to the previous kept one
                through.push(self.through[k - 1]);
            }
            labels.push(label.clone());
        }
        if labels.is_empty() {
            return Flavor::unit();
        }
        Flavor { labels, through }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, label) in self.labels.iter().enumerate() {
            if k > 0 {
                write!(f, ".{}.", self.through[k - 1])?;
            }
            match label {
                Some(l) => f.write_str(l)?,
                None => f.write_str("1")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Cell {
    pub morphism: Mor,
    pub flavor: Flavor,
}

pub type Quiver = Vec<Cell>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenMorphism {
    base: Arc<FinCategory>,
    source: Amalgam,
    target: Amalgam,
    entries: BTreeMap<(usize, usize), Quiver>,
}

fn same_base(a: &Arc<FinCategory>, b: &Arc<FinCategory>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

fn check_amalgam(base: &FinCategory, a: &Amalgam) -> Result<(), GenError> {
    match a.parts.iter().find(|o| o.0 >= base.object_count()) {
        Some(o) => Err(GenError::UnknownObject(o.0)),
        None => Ok(()),
    }
}

impl GenMorphism {
    pub fn new(
        base: Arc<FinCategory>,
        source: Amalgam,
        target: Amalgam,
        entries: BTreeMap<(usize, usize), Quiver>,
    ) -> Result<Self, GenError> {
        check_amalgam(&base, &source)?;
        check_amalgam(&base, &target)?;
        let (n, m) = (source.len(), target.len());
        for (&(i, j), quiver) in &entries {
            if i >= n || j >= m {
                return Err(GenError::EntryOutOfRange { i, j, n, m });
            }
            if quiver.is_empty() {
                return Err(GenError::EmptyQuiver { i, j });
            }
            let (c, d) = (source.parts[i], target.parts[j]);
            let mut seen = HashSet::new();
            for cell in quiver {
                if cell.morphism.0 >= base.morphism_count() {
                    return Err(GenError::UnknownMorphism(cell.morphism.0));
                }
                if base.dom(cell.morphism) != c || base.cod(cell.morphism) != d {
                    return Err(GenError::CellShape {
                        i,
                        j,
                        morphism: base.morphism_name(cell.morphism).to_string(),
                        expected: format!("{} -> {}", base.object_name(c), base.object_name(d)),
                    });
                }
                if !cell.flavor.well_formed() {
                    return Err(GenError::MalformedFlavor { i, j });
                }
                if !seen.insert(&cell.flavor) {
                    return Err(GenError::DuplicateFlavor {
                        i,
                        j,
                        flavor: cell.flavor.to_string(),
                    });
                }
            }
        }
        Ok(GenMorphism {
            base,
            source,
            target,
            entries,
        })
    }

    /// A single base morphism as a morphism of singletons.
    pub fn from_base(base: Arc<FinCategory>, f: Mor, flavor: &str) -> Result<Self, GenError> {
        if f.0 >= base.morphism_count() {
            return Err(GenError::UnknownMorphism(f.0));
        }
        let (s, t) = (Amalgam::singleton(base.dom(f)), Amalgam::singleton(base.cod(f)));
        let cell = Cell {
            morphism: f,
            flavor: Flavor::label(flavor),
        };
        Self::new(base, s, t, [((0, 0), vec![cell])].into())
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.base
    }

    pub fn source(&self) -> &Amalgam {
        &self.source
    }

    pub fn target(&self) -> &Amalgam {
        &self.target
    }

    pub fn entries(&self) -> &BTreeMap<(usize, usize), Quiver> {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> Option<&Quiver> {
        self.entries.get(&(i, j))
    }

    pub fn cell_count(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    /// Per entry, the sorted cells with normalized flavors.
    pub fn normal_form(&self) -> BTreeMap<(usize, usize), Vec<(Mor, Flavor)>> {
        self.entries
            .iter()
            .map(|(&k, q)| {
                let mut cells: Vec<_> = q.iter().map(|c| (c.morphism, c.flavor.normalized())).collect();
                cells.sort();
                (k, cells)
            })
            .collect()
    }
}

/// `id_c = (id_{c_i})` on the diagonal.
pub fn gen_identity(base: Arc<FinCategory>, c: &Amalgam) -> Result<GenMorphism, GenError> {
    check_amalgam(&base, c)?;
    let entries = c
        .parts
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let cell = Cell {
                morphism: base.identity(x),
                flavor: Flavor::unit(),
            };
            ((i, i), vec![cell])
        })
        .collect();
    Ok(GenMorphism {
        base,
        source: c.clone(),
        target: c.clone(),
        entries,
    })
}

/// `f` then `g`: entry `(i, k)` holds `f_{ij}^λ ; g_{jk}^μ` for every `j`.
pub fn gen_compose(f: &GenMorphism, g: &GenMorphism) -> Result<GenMorphism, GenError> {
    if !same_base(&f.base, &g.base) {
        return Err(GenError::BaseMismatch);
    }
    if f.target != g.source {
        return Err(GenError::NotComposable);
    }
    let base = &f.base;
    let mut entries: BTreeMap<(usize, usize), Quiver> = BTreeMap::new();
    for i in 0..f.source.len() {
        for k in 0..g.target.len() {
            let mut quiver = Vec::new();
            for j in 0..f.target.len() {
                let (Some(left), Some(right)) = (f.entry(i, j), g.entry(j, k)) else {
                    continue;
                };
                for a in left {
                    for b in right {
                        quiver.push(Cell {
                            morphism: base.compose(a.morphism, b.morphism)?,
                            flavor: a.flavor.then(j, &b.flavor),
                        });
                    }
                }
            }
            if !quiver.is_empty() {
                entries.insert((i, k), quiver);
            }
        }
    }
    Ok(GenMorphism {
        base: base.clone(),
        source: f.source.clone(),
        target: g.target.clone(),
        entries,
    })
}

/// Applies `F` to every part and cell; flavors are kept.
pub fn gen_functor_apply(functor: &FinFunctor, f: &GenMorphism) -> Result<GenMorphism, GenError> {
    if !same_base(functor.source(), &f.base) {
        return Err(GenError::BaseMismatch);
    }
    let map = |a: &Amalgam| -> Result<Amalgam, GenError> {
        let parts = a
            .parts
            .iter()
            .map(|&x| functor.apply_object(x))
            .collect::<Result<_, _>>()?;
        Ok(Amalgam { parts })
    };
    let mut entries = BTreeMap::new();
    for (&k, q) in &f.entries {
        let cells = q
            .iter()
            .map(|c| {
                Ok(Cell {
                    morphism: functor.apply_morphism(c.morphism)?,
                    flavor: c.flavor.clone(),
                })
            })
            .collect::<Result<Quiver, GenError>>()?;
        entries.insert(k, cells);
    }
    Ok(GenMorphism {
        base: functor.target().clone(),
        source: map(&f.source)?,
        target: map(&f.target)?,
        entries,
    })
}

/// A choice of flavors for every entry.
pub type FlavorSelection = BTreeMap<(usize, usize), BTreeSet<Flavor>>;

/// `π_L`: keeps the selected cells of each entry.
pub fn project_flavors(f: &GenMorphism, selection: &FlavorSelection) -> Result<GenMorphism, GenError> {
    if let Some(&(i, j)) = selection.keys().find(|k| !f.entries.contains_key(k)) {
        return Err(GenError::Selection {
            i,
            j,
            reason: "no such entry".into(),
        });
    }
    let mut entries = BTreeMap::new();
    for (&(i, j), quiver) in &f.entries {
        let Some(chosen) = selection.get(&(i, j)) else {
            return Err(GenError::Selection {
                i,
                j,
                reason: "entry not covered".into(),
            });
        };
        if chosen.is_empty() {
            return Err(GenError::Selection {
                i,
                j,
                reason: "empty flavor set".into(),
            });
        }
        if let Some(alien) = chosen.iter().find(|fl| !quiver.iter().any(|c| &c.flavor == *fl)) {
            return Err(GenError::Selection {
                i,
                j,
                reason: format!("flavor `{alien}` is not present"),
            });
        }
        let kept: Quiver = quiver.iter().filter(|c| chosen.contains(&c.flavor)).cloned().collect();
        entries.insert((i, j), kept);
    }
    Ok(GenMorphism {
        base: f.base.clone(),
        source: f.source.clone(),
        target: f.target.clone(),
        entries,
    })
}

/// Every full selection of `f`: one nonempty flavor subset per entry.
pub fn all_selections(f: &GenMorphism) -> Vec<FlavorSelection> {
    let mut out = vec![FlavorSelection::new()];
    for (&key, quiver) in &f.entries {
        let flavors: Vec<&Flavor> = quiver.iter().map(|c| &c.flavor).collect();
        let subsets: Vec<BTreeSet<Flavor>> = (1u64..(1 << flavors.len()))
            .map(|mask| {
                (0..flavors.len())
                    .filter(|b| mask >> b & 1 == 1)
                    .map(|b| flavors[b].clone())
                    .collect()
            })
            .collect();
        out = out
            .into_iter()
            .flat_map(|sel| {
                subsets.iter().map(move |s| {
                    let mut next = sel.clone();
                    next.insert(key, s.clone());
                    next
                })
            })
            .collect();
    }
    out
}

/// A morphism of amalgams whose entries are plain sets of base morphisms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SetMorphism {
    pub source: Amalgam,
    pub target: Amalgam,
    pub entries: BTreeMap<(usize, usize), BTreeSet<Mor>>,
}

/// `†`: forgets order and flavors.
pub fn deconstruct(f: &GenMorphism) -> SetMorphism {
    SetMorphism {
        source: f.source.clone(),
        target: f.target.clone(),
        entries: f
            .entries
            .iter()
            .map(|(&k, q)| (k, q.iter().map(|c| c.morphism).collect()))
            .collect(),
    }
}

/// A failed law in a generalized category.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum GenViolation {
    LeftUnit { morphism: String },
    RightUnit { morphism: String },
    Associativity { f: String, g: String, h: String },
    FunctorComposition { functor: String, f: String, g: String },
    FunctorIdentity { functor: String, amalgam: String },
}

/// Does `id ; f` (and `f ; id`) match `f` after normalizing flavors?
pub fn unit_laws(f: &GenMorphism) -> Result<(bool, bool), GenError> {
    let left = gen_compose(&gen_identity(f.base.clone(), &f.source)?, f)?;
    let right = gen_compose(f, &gen_identity(f.base.clone(), &f.target)?)?;
    let nf = f.normal_form();
    Ok((left.normal_form() == nf, right.normal_form() == nf))
}

/// Is there a cell bijection between `(f;g);h` and `f;(g;h)` that keeps
/// whole flavor towers? Cell order within an entry is not compared.
pub fn associates(f: &GenMorphism, g: &GenMorphism, h: &GenMorphism) -> Result<bool, GenError> {
    let a = gen_compose(&gen_compose(f, g)?, h)?;
    let b = gen_compose(f, &gen_compose(g, h)?)?;
    Ok(a.source == b.source && a.target == b.target && sorted_cells(&a) == sorted_cells(&b))
}

fn sorted_cells(f: &GenMorphism) -> BTreeMap<(usize, usize), Vec<&Cell>> {
    f.entries
        .iter()
        .map(|(&k, q)| {
            let mut cells: Vec<&Cell> = q.iter().collect();
            cells.sort();
            (k, cells)
        })
        .collect()
}

/// Runs unit, associativity and functoriality checks over every composable
/// combination of the named morphisms.
pub fn check_laws(morphisms: &[(String, GenMorphism)], functors: &[FinFunctor]) -> Result<Vec<GenViolation>, GenError> {
    let mut out = Vec::new();
    for (name, f) in morphisms {
        let (l, r) = unit_laws(f)?;
        if !l {
            out.push(GenViolation::LeftUnit { morphism: name.clone() });
        }
        if !r {
            out.push(GenViolation::RightUnit { morphism: name.clone() });
        }
    }
    let composable = |a: &GenMorphism, b: &GenMorphism| same_base(&a.base, &b.base) && a.target == b.source;
    for (nf, f) in morphisms {
        for (ng, g) in morphisms.iter().filter(|(_, g)| composable(f, g)) {
            for (nh, h) in morphisms.iter().filter(|(_, h)| composable(g, h)) {
                if !associates(f, g, h)? {
                    out.push(GenViolation::Associativity {
                        f: nf.clone(),
                        g: ng.clone(),
                        h: nh.clone(),
                    });
                }
            }
        }
    }
    for functor in functors {
        for (nf, f) in morphisms.iter().filter(|(_, f)| same_base(functor.source(), &f.base)) {
            let id = gen_identity(f.base.clone(), &f.source)?;
            let mapped = gen_functor_apply(functor, &id)?;
            let expected = gen_identity(functor.target().clone(), mapped.source())?;
            if mapped != expected {
                out.push(GenViolation::FunctorIdentity {
                    functor: functor.name().to_string(),
                    amalgam: nf.clone(),
                });
            }
            for (ng, g) in morphisms.iter().filter(|(_, g)| composable(f, g)) {
                let lhs = gen_functor_apply(functor, &gen_compose(f, g)?)?;
                let rhs = gen_compose(&gen_functor_apply(functor, f)?, &gen_functor_apply(functor, g)?)?;
                if lhs != rhs {
                    out.push(GenViolation::FunctorComposition {
                        functor: functor.name().to_string(),
                        f: nf.clone(),
                        g: ng.clone(),
                    });
                }
            }
        }
    }
    Ok(out)
}
