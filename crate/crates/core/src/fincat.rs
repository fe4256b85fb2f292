//! Finite categories with explicit composition tables, functors between them,
//! natural transformations, and the endofunctor category `End(X)`.
//!
//! Composition is written in diagrammatic order throughout: `compose(f, g)` is
//! "`f` then `g`" and is defined exactly when `cod(f) = dom(g)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

/// Index of an object inside a [`FinCategory`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Obj(pub usize);

/// Index of a morphism inside a [`FinCategory`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Mor(pub usize);

/// Default bound on enumerated objects or morphisms.
pub const DEFAULT_MAX_ENTITIES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FinCatError {
    #[error("duplicate object identifier `{0}`")]
    DuplicateObject(String),
    #[error("duplicate morphism identifier `{0}`")]
    DuplicateMorphism(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown morphism `{0}`")]
    UnknownMorphism(String),
    #[error("object `{0}` has no identity morphism")]
    MissingIdentity(String),
    #[error("composition of `{0}` and `{1}` listed twice")]
    DuplicateComposite(String, String),
    #[error("`{f}` and `{g}` are not composable (cod `{cod}` vs dom `{dom}`)")]
    NotComposable {
        f: String,
        g: String,
        cod: String,
        dom: String,
    },
    #[error("composition table has no entry for `{0}` then `{1}`")]
    MissingComposite(String, String),
    #[error("functor `{functor}` is not total: {missing}")]
    NotTotal { functor: String, missing: String },
    #[error("component at `{object}` is `{morphism}`, expected a morphism {expected}")]
    ComponentShape {
        object: String,
        morphism: String,
        expected: String,
    },
    #[error("functors `{0}` and `{1}` do not share source and target categories")]
    MismatchedFunctors(String, String),
    #[error("enumeration exceeded the bound of {bound} {what}")]
    Capacity { what: &'static str, bound: usize },
}

/// One violated law, named by the identifiers involved.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum Violation {
    IdentityShape { object: String, morphism: String },
    MissingComposite { f: String, g: String },
    CompositeOfNonComposable { f: String, g: String },
    CompositeShape { f: String, g: String, result: String },
    LeftUnit { morphism: String, got: String },
    RightUnit { morphism: String, got: String },
    Associativity { f: String, g: String, h: String },
    FunctorDomCod { morphism: String },
    FunctorIdentity { object: String },
    FunctorComposition { f: String, g: String },
    Naturality { morphism: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::IdentityShape { object, morphism } => {
                write!(
                    out,
                    "identity of {object} is {morphism}, which is not an endomorphism of {object}"
                )
            }
            Violation::MissingComposite { f, g } => write!(out, "no composite for {f} then {g}"),
            Violation::CompositeOfNonComposable { f, g } => {
                write!(out, "composite listed for non-composable {f} then {g}")
            }
            Violation::CompositeShape { f, g, result } => {
                write!(out, "{f} then {g} gives {result} with the wrong domain or codomain")
            }
            Violation::LeftUnit { morphism, got } => {
                write!(out, "identity then {morphism} gives {got}")
            }
            Violation::RightUnit { morphism, got } => {
                write!(out, "{morphism} then identity gives {got}")
            }
            Violation::Associativity { f, g, h } => {
                write!(out, "({f} then {g}) then {h} differs from {f} then ({g} then {h})")
            }
            Violation::FunctorDomCod { morphism } => {
                write!(out, "image of {morphism} has the wrong domain or codomain")
            }
            Violation::FunctorIdentity { object } => {
                write!(out, "identity of {object} is not sent to an identity")
            }
            Violation::FunctorComposition { f, g } => {
                write!(out, "composite of {f} then {g} is not preserved")
            }
            Violation::Naturality { morphism } => {
                write!(out, "naturality square at {morphism} does not commute")
            }
        }
    }
}

/// List of violated laws; empty means the structure is lawful.
pub type ValidationReport = Vec<Violation>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Morphism {
    pub id: String,
    pub dom: Obj,
    pub cod: Obj,
}

/// A finite category given by an explicit, possibly unlawful, composition table.
///
/// Construction only checks referential integrity. Law checking is the job of
/// [`FinCategory::validate`].
#[derive(Debug, Clone)]
pub struct FinCategory {
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    identity: Vec<Mor>,
    table: HashMap<(Mor, Mor), Mor>,
    object_index: HashMap<String, Obj>,
    morphism_index: HashMap<String, Mor>,
    hom: HashMap<(Obj, Obj), Vec<Mor>>,
    outgoing: Vec<Vec<Mor>>,
}

impl PartialEq for FinCategory {
    fn eq(&self, other: &Self) -> bool {
        self.objects == other.objects
            && self.morphisms == other.morphisms
            && self.identity == other.identity
            && self.table == other.table
    }
}

impl Eq for FinCategory {}

impl FinCategory {
    /// Builds a category from named parts. `morphisms` are `(id, dom, cod)`,
    /// `identities` are `(object, morphism)` and `table` entries are
    /// `(f, g, f then g)`.
    pub fn from_parts<S: AsRef<str>>(
        objects: &[S],
        morphisms: &[(S, S, S)],
        identities: &[(S, S)],
        table: &[(S, S, S)],
    ) -> Result<Self, FinCatError> {
        let mut object_index = HashMap::new();
        let mut object_names = Vec::with_capacity(objects.len());
        for (i, name) in objects.iter().enumerate() {
            let name = name.as_ref().to_string();
            if object_index.insert(name.clone(), Obj(i)).is_some() {
                return Err(FinCatError::DuplicateObject(name));
            }
            object_names.push(name);
        }
        let find_obj = |name: &str| {
            object_index
                .get(name)
                .copied()
                .ok_or_else(|| FinCatError::UnknownObject(name.to_string()))
        };
        let mut morphism_index = HashMap::new();
        let mut arrows = Vec::with_capacity(morphisms.len());
        for (i, (id, dom, cod)) in morphisms.iter().enumerate() {
            let id = id.as_ref().to_string();
            let morphism = Morphism {
                id: id.clone(),
                dom: find_obj(dom.as_ref())?,
                cod: find_obj(cod.as_ref())?,
            };
            if morphism_index.insert(id.clone(), Mor(i)).is_some() {
                return Err(FinCatError::DuplicateMorphism(id));
            }
            arrows.push(morphism);
        }
        let find_mor = |name: &str| {
            morphism_index
                .get(name)
                .copied()
                .ok_or_else(|| FinCatError::UnknownMorphism(name.to_string()))
        };
        let mut identity = vec![None; object_names.len()];
        for (object, morphism) in identities {
            let x = find_obj(object.as_ref())?;
            identity[x.0] = Some(find_mor(morphism.as_ref())?);
        }
        let identity = identity
            .into_iter()
            .enumerate()
            .map(|(i, m)| m.ok_or_else(|| FinCatError::MissingIdentity(object_names[i].clone())))
            .collect::<Result<Vec<_>, _>>()?;
        let mut entries = HashMap::new();
        for (f, g, h) in table {
            let key = (find_mor(f.as_ref())?, find_mor(g.as_ref())?);
            if entries.insert(key, find_mor(h.as_ref())?).is_some() {
                return Err(FinCatError::DuplicateComposite(
                    f.as_ref().to_string(),
                    g.as_ref().to_string(),
                ));
            }
        }
        Ok(Self::assemble(object_names, arrows, identity, entries))
    }

    /// Index-level constructor used by the enumeration code. Callers guarantee
    /// that every index is in range.
    pub(crate) fn assemble(
        objects: Vec<String>,
        morphisms: Vec<Morphism>,
        identity: Vec<Mor>,
        table: HashMap<(Mor, Mor), Mor>,
    ) -> Self {
        let object_index = objects
            .iter()
            .enumerate()
            .map(|(i, name)| (name.clone(), Obj(i)))
            .collect();
        let morphism_index = morphisms
            .iter()
            .enumerate()
            .map(|(i, m)| (m.id.clone(), Mor(i)))
            .collect();
        let mut hom: HashMap<(Obj, Obj), Vec<Mor>> = HashMap::new();
        let mut outgoing = vec![Vec::new(); objects.len()];
        for (i, m) in morphisms.iter().enumerate() {
            hom.entry((m.dom, m.cod)).or_default().push(Mor(i));
            outgoing[m.dom.0].push(Mor(i));
        }
        FinCategory {
            objects,
            morphisms,
            identity,
            table,
            object_index,
            morphism_index,
            hom,
            outgoing,
        }
    }

    /// The discrete category on the given objects.
    pub fn discrete<S: AsRef<str>>(objects: &[S]) -> Self {
        let names: Vec<String> = objects.iter().map(|s| s.as_ref().to_string()).collect();
        let morphisms = names
            .iter()
            .enumerate()
            .map(|(i, name)| Morphism {
                id: format!("id_{name}"),
                dom: Obj(i),
                cod: Obj(i),
            })
            .collect();
        let identity = (0..names.len()).map(Mor).collect();
        let table = (0..names.len()).map(|i| ((Mor(i), Mor(i)), Mor(i))).collect();
        Self::assemble(names, morphisms, identity, table)
    }

    /// The free category on an acyclic graph: morphisms are paths, named by
    /// their edges joined with `.`; identities are `id_<object>`.
    ///
    /// Returns `None` if the graph has a directed cycle or more than `max`
    /// paths.
    pub fn free_on_dag<S: AsRef<str>>(objects: &[S], edges: &[(S, S, S)], max: usize) -> Option<Self> {
        let names: Vec<String> = objects.iter().map(|s| s.as_ref().to_string()).collect();
        let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let mut paths: Vec<(Vec<usize>, usize, usize)> = (0..names.len()).map(|i| (Vec::new(), i, i)).collect();
        let edge_list: Vec<(String, usize, usize)> = edges
            .iter()
            .map(|(id, a, b)| {
                Some((
                    id.as_ref().to_string(),
                    *index.get(a.as_ref())?,
                    *index.get(b.as_ref())?,
                ))
            })
            .collect::<Option<_>>()?;
        let mut frontier: Vec<usize> = (0..names.len()).collect();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for p in frontier {
                for (e, (_, a, b)) in edge_list.iter().enumerate() {
                    if *a == paths[p].2 {
                        let mut word = paths[p].0.clone();
                        word.push(e);
                        if word.len() > names.len() {
                            return None;
                        }
                        paths.push((word, paths[p].1, *b));
                        if paths.len() > max {
                            return None;
                        }
                        next.push(paths.len() - 1);
                    }
                }
            }
            frontier = next;
        }
        let path_index: HashMap<(Vec<usize>, usize), usize> = paths
            .iter()
            .enumerate()
            .map(|(i, (w, s, _))| ((w.clone(), *s), i))
            .collect();
        let morphisms = paths
            .iter()
            .map(|(word, s, t)| Morphism {
                id: if word.is_empty() {
                    format!("id_{}", names[*s])
                } else {
                    word.iter()
                        .map(|e| edge_list[*e].0.as_str())
                        .collect::<Vec<_>>()
                        .join(".")
                },
                dom: Obj(*s),
                cod: Obj(*t),
            })
            .collect();
        let mut table = HashMap::new();
        for (i, (w1, s1, t1)) in paths.iter().enumerate() {
            for (j, (w2, s2, _)) in paths.iter().enumerate() {
                if t1 == s2 {
                    let mut w = w1.clone();
                    w.extend(w2);
                    table.insert((Mor(i), Mor(j)), Mor(path_index[&(w, *s1)]));
                }
            }
        }
        let identity = (0..names.len()).map(Mor).collect();
        Some(Self::assemble(names, morphisms, identity, table))
    }

    /// The walking arrow `x → y`.
    pub fn arrow() -> Self {
        Self::free_on_dag(&["x", "y"], &[("f", "x", "y")], 16).expect("acyclic")
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.morphisms.len()
    }

    pub fn objects(&self) -> impl ExactSizeIterator<Item = Obj> {
        (0..self.objects.len()).map(Obj)
    }

    pub fn morphisms(&self) -> impl ExactSizeIterator<Item = Mor> {
        (0..self.morphisms.len()).map(Mor)
    }

    pub fn object_name(&self, x: Obj) -> &str {
        &self.objects[x.0]
    }

    pub fn morphism_name(&self, f: Mor) -> &str {
        &self.morphisms[f.0].id
    }

    pub fn object_names(&self) -> &[String] {
        &self.objects
    }

    pub fn morphism(&self, f: Mor) -> &Morphism {
        &self.morphisms[f.0]
    }

    pub fn object_id(&self, name: &str) -> Option<Obj> {
        self.object_index.get(name).copied()
    }

    pub fn morphism_id(&self, name: &str) -> Option<Mor> {
        self.morphism_index.get(name).copied()
    }

    pub fn dom(&self, f: Mor) -> Obj {
        self.morphisms[f.0].dom
    }

    pub fn cod(&self, f: Mor) -> Obj {
        self.morphisms[f.0].cod
    }

    pub fn identity(&self, x: Obj) -> Mor {
        self.identity[x.0]
    }

    pub fn is_identity(&self, f: Mor) -> bool {
        let m = &self.morphisms[f.0];
        m.dom == m.cod && self.identity[m.dom.0] == f
    }

    /// Morphisms `a → b`, in declaration order.
    pub fn hom(&self, a: Obj, b: Obj) -> &[Mor] {
        self.hom.get(&(a, b)).map_or(&[], Vec::as_slice)
    }

    /// Morphisms out of `a`, in declaration order.
    pub fn outgoing(&self, a: Obj) -> &[Mor] {
        &self.outgoing[a.0]
    }

    /// Raw table lookup, without any composability check.
    pub fn table_entry(&self, f: Mor, g: Mor) -> Option<Mor> {
        self.table.get(&(f, g)).copied()
    }

    /// All table entries sorted by index, as `(f, g, f then g)`.
    pub fn table_entries(&self) -> Vec<(Mor, Mor, Mor)> {
        let mut entries: Vec<_> = self.table.iter().map(|(&(f, g), &h)| (f, g, h)).collect();
        entries.sort();
        entries
    }

    /// `f` then `g`.
    pub fn compose(&self, f: Mor, g: Mor) -> Result<Mor, FinCatError> {
        if self.cod(f) != self.dom(g) {
            return Err(FinCatError::NotComposable {
                f: self.morphism_name(f).to_string(),
                g: self.morphism_name(g).to_string(),
                cod: self.object_name(self.cod(f)).to_string(),
                dom: self.object_name(self.dom(g)).to_string(),
            });
        }
        self.table_entry(f, g).ok_or_else(|| {
            FinCatError::MissingComposite(self.morphism_name(f).to_string(), self.morphism_name(g).to_string())
        })
    }

    /// Name-level [`FinCategory::compose`].
    pub fn compose_named(&self, f: &str, g: &str) -> Result<&str, FinCatError> {
        let fi = self
            .morphism_id(f)
            .ok_or_else(|| FinCatError::UnknownMorphism(f.to_string()))?;
        let gi = self
            .morphism_id(g)
            .ok_or_else(|| FinCatError::UnknownMorphism(g.to_string()))?;
        Ok(self.morphism_name(self.compose(fi, gi)?))
    }

    /// Lists every violated identity, composability and associativity constraint.
    pub fn validate(&self) -> ValidationReport {
        let mut report = Vec::new();
        let name = |f: Mor| self.morphism_name(f).to_string();
        for x in self.objects() {
            let id = self.identity(x);
            if self.dom(id) != x || self.cod(id) != x {
                report.push(Violation::IdentityShape {
                    object: self.object_name(x).to_string(),
                    morphism: name(id),
                });
            }
        }
        for (f, g, h) in self.table_entries() {
            if self.cod(f) != self.dom(g) {
                report.push(Violation::CompositeOfNonComposable { f: name(f), g: name(g) });
            } else if self.dom(h) != self.dom(f) || self.cod(h) != self.cod(g) {
                report.push(Violation::CompositeShape {
                    f: name(f),
                    g: name(g),
                    result: name(h),
                });
            }
        }
        for f in self.morphisms() {
            for &g in self.outgoing(self.cod(f)) {
                if self.table_entry(f, g).is_none() {
                    report.push(Violation::MissingComposite { f: name(f), g: name(g) });
                }
            }
        }
        for f in self.morphisms() {
            let left = self.table_entry(self.identity(self.dom(f)), f);
            if let Some(got) = left.filter(|&got| got != f) {
                report.push(Violation::LeftUnit {
                    morphism: name(f),
                    got: name(got),
                });
            }
            let right = self.table_entry(f, self.identity(self.cod(f)));
            if let Some(got) = right.filter(|&got| got != f) {
                report.push(Violation::RightUnit {
                    morphism: name(f),
                    got: name(got),
                });
            }
        }
        for f in self.morphisms() {
            for &g in self.outgoing(self.cod(f)) {
                let Some(fg) = self.table_entry(f, g) else { continue };
                for &h in self.outgoing(self.cod(g)) {
                    let Some(gh) = self.table_entry(g, h) else { continue };
                    let (Some(left), Some(right)) = (self.table_entry(fg, h), self.table_entry(f, gh)) else {
                        continue;
                    };
                    if left != right {
                        report.push(Violation::Associativity {
                            f: name(f),
                            g: name(g),
                            h: name(h),
                        });
                    }
                }
            }
        }
        report
    }
}

/// A functor between finite categories, stored as total index maps.
#[derive(Debug, Clone)]
pub struct FinFunctor {
    name: String,
    source: Arc<FinCategory>,
    target: Arc<FinCategory>,
    object_map: Vec<Obj>,
    morphism_map: Vec<Mor>,
}

impl FinFunctor {
    pub fn new(
        name: impl Into<String>,
        source: Arc<FinCategory>,
        target: Arc<FinCategory>,
        object_map: Vec<Obj>,
        morphism_map: Vec<Mor>,
    ) -> Result<Self, FinCatError> {
        let name = name.into();
        if object_map.len() != source.object_count() {
            return Err(FinCatError::NotTotal {
                functor: name,
                missing: format!("{} of {} objects mapped", object_map.len(), source.object_count()),
            });
        }
        if morphism_map.len() != source.morphism_count() {
            return Err(FinCatError::NotTotal {
                functor: name,
                missing: format!("{} of {} morphisms mapped", morphism_map.len(), source.morphism_count()),
            });
        }
        if let Some(bad) = object_map.iter().find(|x| x.0 >= target.object_count()) {
            return Err(FinCatError::UnknownObject(format!("#{}", bad.0)));
        }
        if let Some(bad) = morphism_map.iter().find(|f| f.0 >= target.morphism_count()) {
            return Err(FinCatError::UnknownMorphism(format!("#{}", bad.0)));
        }
        Ok(FinFunctor {
            name,
            source,
            target,
            object_map,
            morphism_map,
        })
    }

    /// Builds a functor from name-level maps. Every object must be mapped.
    /// Morphisms left out of `morphisms` are inferred: identities go to
    /// identities and any other morphism goes to the unique morphism between
    /// the images of its endpoints, when there is exactly one.
    pub fn from_named(
        name: impl Into<String>,
        source: Arc<FinCategory>,
        target: Arc<FinCategory>,
        objects: &BTreeMap<String, String>,
        morphisms: &BTreeMap<String, String>,
    ) -> Result<Self, FinCatError> {
        let name = name.into();
        for key in objects.keys() {
            source
                .object_id(key)
                .ok_or_else(|| FinCatError::UnknownObject(key.clone()))?;
        }
        for key in morphisms.keys() {
            source
                .morphism_id(key)
                .ok_or_else(|| FinCatError::UnknownMorphism(key.clone()))?;
        }
        let object_map = source
            .objects()
            .map(|x| {
                let image = objects
                    .get(source.object_name(x))
                    .ok_or_else(|| FinCatError::NotTotal {
                        functor: name.clone(),
                        missing: format!("object `{}`", source.object_name(x)),
                    })?;
                target
                    .object_id(image)
                    .ok_or_else(|| FinCatError::UnknownObject(image.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let morphism_map = source
            .morphisms()
            .map(|f| {
                if let Some(image) = morphisms.get(source.morphism_name(f)) {
                    return target
                        .morphism_id(image)
                        .ok_or_else(|| FinCatError::UnknownMorphism(image.clone()));
                }
                let (a, b) = (object_map[source.dom(f).0], object_map[source.cod(f).0]);
                if source.is_identity(f) {
                    return Ok(target.identity(a));
                }
                match target.hom(a, b) {
                    [only] => Ok(*only),
                    _ => Err(FinCatError::NotTotal {
                        functor: name.clone(),
                        missing: format!("morphism `{}` (image not determined)", source.morphism_name(f)),
                    }),
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(name, source, target, object_map, morphism_map)
    }

    pub fn identity(category: Arc<FinCategory>) -> Self {
        let object_map = category.objects().collect();
        let morphism_map = category.morphisms().collect();
        FinFunctor {
            name: "id".to_string(),
            source: category.clone(),
            target: category,
            object_map,
            morphism_map,
        }
    }

    /// The functor sending everything to `x` and `id_x`.
    pub fn constant(name: impl Into<String>, source: Arc<FinCategory>, target: Arc<FinCategory>, x: Obj) -> Self {
        let id = target.identity(x);
        FinFunctor {
            name: name.into(),
            object_map: vec![x; source.object_count()],
            morphism_map: vec![id; source.morphism_count()],
            source,
            target,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn source(&self) -> &Arc<FinCategory> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FinCategory> {
        &self.target
    }

    pub fn object_map(&self) -> &[Obj] {
        &self.object_map
    }

    pub fn morphism_map(&self) -> &[Mor] {
        &self.morphism_map
    }

    /// Same source, target and action (names are ignored).
    pub fn same_action(&self, other: &FinFunctor) -> bool {
        self.object_map == other.object_map
            && self.morphism_map == other.morphism_map
            && (Arc::ptr_eq(&self.source, &other.source) || self.source == other.source)
            && (Arc::ptr_eq(&self.target, &other.target) || self.target == other.target)
    }

    pub fn apply_object(&self, x: Obj) -> Result<Obj, FinCatError> {
        self.object_map
            .get(x.0)
            .copied()
            .ok_or_else(|| FinCatError::UnknownObject(format!("#{}", x.0)))
    }

    pub fn apply_morphism(&self, f: Mor) -> Result<Mor, FinCatError> {
        self.morphism_map
            .get(f.0)
            .copied()
            .ok_or_else(|| FinCatError::UnknownMorphism(format!("#{}", f.0)))
    }

    /// Applies the functor to an object or morphism given by name. Objects
    /// are looked up first.
    pub fn apply_named(&self, id: &str) -> Result<&str, FinCatError> {
        if let Some(x) = self.source.object_id(id) {
            return Ok(self.target.object_name(self.object_map[x.0]));
        }
        if let Some(f) = self.source.morphism_id(id) {
            return Ok(self.target.morphism_name(self.morphism_map[f.0]));
        }
        Err(FinCatError::UnknownObject(id.to_string()))
    }

    /// `self` then `next`, i.e. the composite `next ∘ self`.
    pub fn then(&self, next: &FinFunctor, name: impl Into<String>) -> Result<FinFunctor, FinCatError> {
        if !(Arc::ptr_eq(&self.target, &next.source) || self.target == next.source) {
            return Err(FinCatError::MismatchedFunctors(self.name.clone(), next.name.clone()));
        }
        Ok(FinFunctor {
            name: name.into(),
            source: self.source.clone(),
            target: next.target.clone(),
            object_map: self.object_map.iter().map(|x| next.object_map[x.0]).collect(),
            morphism_map: self.morphism_map.iter().map(|f| next.morphism_map[f.0]).collect(),
        })
    }

    /// Checks preservation of domains, codomains, identities and composites.
    pub fn check(&self) -> ValidationReport {
        let (src, tgt) = (&*self.source, &*self.target);
        let mut report = Vec::new();
        for f in src.morphisms() {
            let image = self.morphism_map[f.0];
            if tgt.dom(image) != self.object_map[src.dom(f).0] || tgt.cod(image) != self.object_map[src.cod(f).0] {
                report.push(Violation::FunctorDomCod {
                    morphism: src.morphism_name(f).to_string(),
                });
            }
        }
        for x in src.objects() {
            if self.morphism_map[src.identity(x).0] != tgt.identity(self.object_map[x.0]) {
                report.push(Violation::FunctorIdentity {
                    object: src.object_name(x).to_string(),
                });
            }
        }
        for f in src.morphisms() {
            for &g in src.outgoing(src.cod(f)) {
                let Some(fg) = src.table_entry(f, g) else { continue };
                let (ff, fgg) = (self.morphism_map[f.0], self.morphism_map[g.0]);
                if tgt.table_entry(ff, fgg) != Some(self.morphism_map[fg.0]) {
                    report.push(Violation::FunctorComposition {
                        f: src.morphism_name(f).to_string(),
                        g: src.morphism_name(g).to_string(),
                    });
                }
            }
        }
        report
    }
}

/// A natural transformation between two parallel functors.
#[derive(Debug, Clone)]
pub struct NatTrans {
    name: String,
    source: Arc<FinFunctor>,
    target: Arc<FinFunctor>,
    components: Vec<Mor>,
}

impl NatTrans {
    /// Checks that the functors are parallel and that every component has
    /// the right shape. Naturality itself is checked by [`NatTrans::check`].
    pub fn new(
        name: impl Into<String>,
        source: Arc<FinFunctor>,
        target: Arc<FinFunctor>,
        components: Vec<Mor>,
    ) -> Result<Self, FinCatError> {
        let name = name.into();
        let parallel = (Arc::ptr_eq(&source.source, &target.source) || source.source == target.source)
            && (Arc::ptr_eq(&source.target, &target.target) || source.target == target.target);
        if !parallel {
            return Err(FinCatError::MismatchedFunctors(
                source.name.clone(),
                target.name.clone(),
            ));
        }
        if components.len() != source.source.object_count() {
            return Err(FinCatError::NotTotal {
                functor: name,
                missing: format!("{} of {} components", components.len(), source.source.object_count()),
            });
        }
        let (base, cat) = (&*source.source, &*source.target);
        for x in base.objects() {
            let c = components[x.0];
            let (a, b) = (source.object_map[x.0], target.object_map[x.0]);
            if c.0 >= cat.morphism_count() || cat.dom(c) != a || cat.cod(c) != b {
                return Err(FinCatError::ComponentShape {
                    object: base.object_name(x).to_string(),
                    morphism: if c.0 < cat.morphism_count() {
                        cat.morphism_name(c).to_string()
                    } else {
                        format!("#{}", c.0)
                    },
                    expected: format!("{} → {}", cat.object_name(a), cat.object_name(b)),
                });
            }
        }
        Ok(NatTrans {
            name,
            source,
            target,
            components,
        })
    }

    pub fn from_named(
        name: impl Into<String>,
        source: Arc<FinFunctor>,
        target: Arc<FinFunctor>,
        components: &BTreeMap<String, String>,
    ) -> Result<Self, FinCatError> {
        let name = name.into();
        let (base, cat) = (source.source.clone(), source.target.clone());
        for key in components.keys() {
            base.object_id(key)
                .ok_or_else(|| FinCatError::UnknownObject(key.clone()))?;
        }
        let comps = base
            .objects()
            .map(|x| {
                let m = components
                    .get(base.object_name(x))
                    .ok_or_else(|| FinCatError::NotTotal {
                        functor: name.clone(),
                        missing: format!("component at `{}`", base.object_name(x)),
                    })?;
                cat.morphism_id(m)
                    .ok_or_else(|| FinCatError::UnknownMorphism(m.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(name, source, target, comps)
    }

    pub fn identity(functor: Arc<FinFunctor>) -> Self {
        let cat = functor.target.clone();
        let components = functor.object_map.iter().map(|&x| cat.identity(x)).collect();
        NatTrans {
            name: format!("1_{}", functor.name),
            source: functor.clone(),
            target: functor,
            components,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn source(&self) -> &Arc<FinFunctor> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FinFunctor> {
        &self.target
    }

    pub fn components(&self) -> &[Mor] {
        &self.components
    }

    pub fn component(&self, x: Obj) -> Mor {
        self.components[x.0]
    }

    /// Lists every naturality square that fails to commute.
    pub fn check(&self) -> ValidationReport {
        let (base, cat) = (&*self.source.source, &*self.source.target);
        let mut report = Vec::new();
        for f in base.morphisms() {
            let (x, y) = (base.dom(f), base.cod(f));
            let top = cat.table_entry(self.components[x.0], self.target.morphism_map[f.0]);
            let bottom = cat.table_entry(self.source.morphism_map[f.0], self.components[y.0]);
            if top.is_none() || top != bottom {
                report.push(Violation::Naturality {
                    morphism: base.morphism_name(f).to_string(),
                });
            }
        }
        report
    }

    /// Vertical composite `self` then `next`.
    pub fn then(&self, next: &NatTrans) -> Result<NatTrans, FinCatError> {
        if !self.target.same_action(&next.source) {
            return Err(FinCatError::MismatchedFunctors(
                self.target.name.clone(),
                next.source.name.clone(),
            ));
        }
        let cat = &*self.source.target;
        let components = self
            .components
            .iter()
            .zip(&next.components)
            .map(|(&a, &b)| cat.compose(a, b))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(NatTrans {
            name: format!("{};{}", self.name, next.name),
            source: self.source.clone(),
            target: next.target.clone(),
            components,
        })
    }
}

/// Enumerates every functor `source → target`, in a deterministic order
/// (lexicographic in object images, then morphism images). Fails once more
/// than `bound` functors are found.
pub fn enumerate_functors(
    source: &Arc<FinCategory>,
    target: &Arc<FinCategory>,
    bound: usize,
) -> Result<Vec<FinFunctor>, FinCatError> {
    let src = &**source;
    // Non-identity morphisms are assigned one by one; each composite relation
    // is checked as soon as its last participant is assigned.
    let order: Vec<Mor> = src.morphisms().filter(|&f| !src.is_identity(f)).collect();
    let position: HashMap<Mor, usize> = order.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    let rank = |f: Mor| position.get(&f).map_or(0, |p| p + 1);
    let mut checks: Vec<Vec<(Mor, Mor, Mor)>> = vec![Vec::new(); order.len() + 1];
    for (f, g, h) in src.table_entries() {
        if src.cod(f) == src.dom(g) {
            let last = rank(f).max(rank(g)).max(rank(h));
            checks[last].push((f, g, h));
        }
    }
    let mut found = Vec::new();
    let mut object_map = vec![Obj(0); src.object_count()];
    let mut search = FunctorSearch {
        src,
        tgt: target,
        order: &order,
        checks: &checks,
        bound,
        found: &mut found,
    };
    search.objects(0, &mut object_map)?;
    Ok(found
        .into_iter()
        .map(|(objects, morphisms)| FinFunctor {
            name: String::new(),
            source: source.clone(),
            target: target.clone(),
            object_map: objects,
            morphism_map: morphisms,
        })
        .collect())
}

type FunctorMaps = (Vec<Obj>, Vec<Mor>);

struct FunctorSearch<'a> {
    src: &'a FinCategory,
    tgt: &'a FinCategory,
    order: &'a [Mor],
    checks: &'a [Vec<(Mor, Mor, Mor)>],
    bound: usize,
    found: &'a mut Vec<FunctorMaps>,
}

impl FunctorSearch<'_> {
    fn objects(&mut self, i: usize, object_map: &mut Vec<Obj>) -> Result<(), FinCatError> {
        if i == object_map.len() {
            let mut morphism_map = vec![None; self.src.morphism_count()];
            for x in self.src.objects() {
                morphism_map[self.src.identity(x).0] = Some(self.tgt.identity(object_map[x.0]));
            }
            if !self.consistent(0, &morphism_map) {
                return Ok(());
            }
            return self.morphisms(0, object_map, &mut morphism_map);
        }
        for y in self.tgt.objects() {
            object_map[i] = y;
            self.objects(i + 1, object_map)?;
        }
        Ok(())
    }

    fn consistent(&self, level: usize, morphism_map: &[Option<Mor>]) -> bool {
        self.checks[level].iter().all(|&(f, g, h)| {
            let (Some(a), Some(b), Some(c)) = (morphism_map[f.0], morphism_map[g.0], morphism_map[h.0]) else {
                return false;
            };
            self.tgt.table_entry(a, b) == Some(c)
        })
    }

    fn morphisms(
        &mut self,
        i: usize,
        object_map: &[Obj],
        morphism_map: &mut Vec<Option<Mor>>,
    ) -> Result<(), FinCatError> {
        if i == self.order.len() {
            if self.found.len() == self.bound {
                return Err(FinCatError::Capacity {
                    what: "functors",
                    bound: self.bound,
                });
            }
            let morphisms = morphism_map.iter().map(|m| m.expect("assigned")).collect();
            self.found.push((object_map.to_vec(), morphisms));
            return Ok(());
        }
        let f = self.order[i];
        let (a, b) = (object_map[self.src.dom(f).0], object_map[self.src.cod(f).0]);
        for &candidate in self.tgt.hom(a, b) {
            morphism_map[f.0] = Some(candidate);
            if self.consistent(i + 1, morphism_map) {
                self.morphisms(i + 1, object_map, morphism_map)?;
            }
        }
        morphism_map[f.0] = None;
        Ok(())
    }
}

/// Enumerates every natural transformation `source ⇒ target`, ordered
/// lexicographically by component index.
pub fn enumerate_transformations(source: &FinFunctor, target: &FinFunctor) -> Vec<Vec<Mor>> {
    let (base, cat) = (&*source.source, &*source.target);
    let n = base.object_count();
    // squares[k]: morphisms whose endpoints are both assigned once object k is.
    let mut squares: Vec<Vec<Mor>> = vec![Vec::new(); n];
    for f in base.morphisms() {
        squares[base.dom(f).0.max(base.cod(f).0)].push(f);
    }
    let mut out = Vec::new();
    let mut comps = vec![Mor(0); n];
    fn go(
        k: usize,
        comps: &mut Vec<Mor>,
        out: &mut Vec<Vec<Mor>>,
        base: &FinCategory,
        cat: &FinCategory,
        s: &FinFunctor,
        t: &FinFunctor,
        squares: &[Vec<Mor>],
    ) {
        if k == comps.len() {
            out.push(comps.clone());
            return;
        }
        for &c in cat.hom(s.object_map[k], t.object_map[k]) {
            comps[k] = c;
            let natural = squares[k].iter().all(|&f| {
                let (a, b) = (base.dom(f), base.cod(f));
                let top = cat.table_entry(comps[a.0], t.morphism_map[f.0]);
                top.is_some() && top == cat.table_entry(s.morphism_map[f.0], comps[b.0])
            });
            if natural {
                go(k + 1, comps, out, base, cat, s, t, squares);
            }
        }
    }
    go(0, &mut comps, &mut out, base, cat, source, target, &squares);
    out
}

/// The category of endofunctors of a base category and the natural
/// transformations between them, with each object and morphism remembering
/// the functor or transformation it stands for.
#[derive(Debug, Clone)]
pub struct EndCategory {
    base: Arc<FinCategory>,
    category: Arc<FinCategory>,
    functors: Vec<Arc<FinFunctor>>,
    transformations: Vec<NatTrans>,
    identity_object: Obj,
    by_action: HashMap<FunctorKey, Obj>,
}

type FunctorKey = (Vec<Obj>, Vec<Mor>);

fn key_of(f: &FinFunctor) -> FunctorKey {
    (f.object_map.clone(), f.morphism_map.clone())
}

impl EndCategory {
    /// `End(X)`: every endofunctor of `base` when `generators` is `None`,
    /// otherwise the monoid the generators span under composition (the
    /// identity included). Morphisms are all natural transformations between
    /// the chosen functors. `bound` caps both the object and morphism count.
    ///
    /// Enumerated functors are named `id` and `F0`, `F1`, …; closure elements
    /// are named by a shortest word in the generators, `g*h` meaning `h` then
    /// `g`.
    pub fn build(base: Arc<FinCategory>, generators: Option<&[FinFunctor]>, bound: usize) -> Result<Self, FinCatError> {
        let functors: Vec<FinFunctor> = match generators {
            None => {
                let all = enumerate_functors(&base, &base, bound)?;
                let identity = FinFunctor::identity(base.clone());
                let mut k = 0;
                all.into_iter()
                    .map(|f| {
                        if f.same_action(&identity) {
                            f.renamed("id")
                        } else {
                            k += 1;
                            f.renamed(format!("F{}", k - 1))
                        }
                    })
                    .collect()
            }
            Some(generators) => Self::closure(&base, generators, bound)?,
        };
        Self::from_functors(base, functors, bound)
    }

    fn closure(
        base: &Arc<FinCategory>,
        generators: &[FinFunctor],
        bound: usize,
    ) -> Result<Vec<FinFunctor>, FinCatError> {
        for g in generators {
            let endo = (Arc::ptr_eq(&g.source, base) || *g.source == **base)
                && (Arc::ptr_eq(&g.target, base) || *g.target == **base);
            if !endo {
                return Err(FinCatError::MismatchedFunctors(g.name.clone(), "id".to_string()));
            }
        }
        let mut seen: HashMap<FunctorKey, usize> = HashMap::new();
        let mut elements = vec![FinFunctor::identity(base.clone())];
        seen.insert(key_of(&elements[0]), 0);
        let mut cursor = 0;
        while cursor < elements.len() {
            for g in generators {
                let word = if cursor == 0 {
                    g.name.clone()
                } else {
                    format!("{}*{}", g.name, elements[cursor].name)
                };
                let next = elements[cursor].then(g, word)?;
                if seen.contains_key(&key_of(&next)) {
                    continue;
                }
                if elements.len() == bound {
                    return Err(FinCatError::Capacity {
                        what: "functors",
                        bound,
                    });
                }
                seen.insert(key_of(&next), elements.len());
                elements.push(next);
            }
            cursor += 1;
        }
        Ok(elements)
    }

    /// Builds the category on an explicit list of endofunctors, which must
    /// be closed under composition for [`EndCategory::compose_objects`] to
    /// be total. Duplicate actions are rejected.
    pub fn from_functors(base: Arc<FinCategory>, functors: Vec<FinFunctor>, bound: usize) -> Result<Self, FinCatError> {
        if functors.len() > bound {
            return Err(FinCatError::Capacity {
                what: "functors",
                bound,
            });
        }
        let functors: Vec<Arc<FinFunctor>> = functors.into_iter().map(Arc::new).collect();
        let mut by_action = HashMap::new();
        for (i, f) in functors.iter().enumerate() {
            if by_action.insert(key_of(f), Obj(i)).is_some() {
                return Err(FinCatError::DuplicateObject(f.name.clone()));
            }
        }
        let identity_key = key_of(&FinFunctor::identity(base.clone()));
        let identity_object = *by_action
            .get(&identity_key)
            .ok_or_else(|| FinCatError::UnknownObject("id".to_string()))?;
        let mut transformations = Vec::new();
        let mut morphisms = Vec::new();
        let mut identity = vec![Mor(0); functors.len()];
        let mut index: HashMap<(usize, usize, Vec<Mor>), Mor> = HashMap::new();
        for (i, s) in functors.iter().enumerate() {
            for (j, t) in functors.iter().enumerate() {
                for (k, comps) in enumerate_transformations(s, t).into_iter().enumerate() {
                    if transformations.len() == bound {
                        return Err(FinCatError::Capacity {
                            what: "transformations",
                            bound,
                        });
                    }
                    let m = Mor(transformations.len());
                    let is_identity = i == j && comps.iter().zip(&s.object_map).all(|(&c, &x)| c == base.identity(x));
                    let name = if is_identity {
                        identity[i] = m;
                        format!("1_{}", s.name)
                    } else {
                        format!("{}=>{}#{}", s.name, t.name, k)
                    };
                    index.insert((i, j, comps.clone()), m);
                    morphisms.push(Morphism {
                        id: name.clone(),
                        dom: Obj(i),
                        cod: Obj(j),
                    });
                    transformations.push(NatTrans {
                        name,
                        source: s.clone(),
                        target: t.clone(),
                        components: comps,
                    });
                }
            }
        }
        let mut table = HashMap::new();
        for (a, ta) in transformations.iter().enumerate() {
            let (i, j) = (morphisms[a].dom.0, morphisms[a].cod.0);
            for (b, tb) in transformations.iter().enumerate() {
                if morphisms[b].dom.0 != j {
                    continue;
                }
                let comps: Vec<Mor> = ta
                    .components
                    .iter()
                    .zip(&tb.components)
                    .map(|(&x, &y)| base.table_entry(x, y).expect("base composite"))
                    .collect();
                let k = morphisms[b].cod.0;
                table.insert((Mor(a), Mor(b)), index[&(i, k, comps)]);
            }
        }
        let objects = functors.iter().map(|f| f.name.clone()).collect();
        let category = Arc::new(FinCategory::assemble(objects, morphisms, identity, table));
        Ok(EndCategory {
            base,
            category,
            functors,
            transformations,
            identity_object,
            by_action,
        })
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.base
    }

    pub fn category(&self) -> &Arc<FinCategory> {
        &self.category
    }

    pub fn functor(&self, x: Obj) -> &Arc<FinFunctor> {
        &self.functors[x.0]
    }

    pub fn functors(&self) -> &[Arc<FinFunctor>] {
        &self.functors
    }

    pub fn transformation(&self, f: Mor) -> &NatTrans {
        &self.transformations[f.0]
    }

    pub fn identity_object(&self) -> Obj {
        self.identity_object
    }

    /// Object standing for the functor with the same action as `f`, if any.
    pub fn object_of(&self, f: &FinFunctor) -> Option<Obj> {
        self.by_action.get(&key_of(f)).copied()
    }

    /// Morphism standing for a transformation with the given endpoints and
    /// components, if any.
    pub fn morphism_of(&self, source: Obj, target: Obj, components: &[Mor]) -> Option<Mor> {
        self.category
            .hom(source, target)
            .iter()
            .copied()
            .find(|&m| self.transformations[m.0].components == components)
    }

    /// The object for `outer ∘ inner`: apply `inner`, then `outer`.
    pub fn compose_objects(&self, outer: Obj, inner: Obj) -> Option<Obj> {
        let (f, g) = (&self.functors[inner.0], &self.functors[outer.0]);
        let key = (
            f.object_map.iter().map(|x| g.object_map[x.0]).collect(),
            f.morphism_map.iter().map(|m| g.morphism_map[m.0]).collect(),
        );
        self.by_action.get(&key).copied()
    }

    /// Renames objects whose functors match one of `named`; returns the
    /// category with updated identifiers. Names must stay unique.
    pub fn with_names(self, named: &[FinFunctor]) -> Result<Self, FinCatError> {
        let mut functors: Vec<FinFunctor> = self.functors.iter().map(|f| (**f).clone()).collect();
        for f in named {
            if let Some(x) = self.object_of(f) {
                functors[x.0].name = f.name.clone();
            }
        }
        let mut seen = std::collections::HashSet::new();
        for f in &functors {
            if !seen.insert(f.name.clone()) {
                return Err(FinCatError::DuplicateObject(f.name.clone()));
            }
        }
        Self::from_functors(self.base, functors, usize::MAX)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trivial() -> FinCategory {
        FinCategory::from_parts(
            &["x"],
            &[("id_x", "x", "x")],
            &[("x", "id_x")],
            &[("id_x", "id_x", "id_x")],
        )
        .unwrap()
    }

    #[test]
    fn trivial_category_is_lawful() {
        assert!(trivial().validate().is_empty());
    }

    #[test]
    fn broken_left_unit_is_reported_once() {
        let cat = FinCategory::from_parts(
            &["x", "y"],
            &[("id_x", "x", "x"), ("id_y", "y", "y"), ("f", "x", "y"), ("g", "x", "y")],
            &[("x", "id_x"), ("y", "id_y")],
            &[
                ("id_x", "id_x", "id_x"),
                ("id_y", "id_y", "id_y"),
                ("id_x", "f", "g"),
                ("id_x", "g", "g"),
                ("f", "id_y", "f"),
                ("g", "id_y", "g"),
            ],
        )
        .unwrap();
        assert_eq!(
            cat.validate(),
            vec![Violation::LeftUnit {
                morphism: "f".into(),
                got: "g".into()
            }]
        );
    }

    #[test]
    fn compose_respects_units_and_rejects_mismatch() {
        let arrow = FinCategory::arrow();
        assert_eq!(arrow.compose_named("id_x", "id_x").unwrap(), "id_x");
        assert_eq!(arrow.compose_named("f", "id_y").unwrap(), "f");
        let err = arrow.compose_named("id_y", "f").unwrap_err();
        assert!(matches!(err, FinCatError::NotComposable { ref f, ref g, .. } if f == "id_y" && g == "f"));
    }

    #[test]
    fn missing_identity_is_a_construction_error() {
        let err = FinCategory::from_parts(&["x"], &[("a", "x", "x")], &[], &[]).unwrap_err();
        assert_eq!(err, FinCatError::MissingIdentity("x".into()));
    }

    #[test]
    fn identity_and_constant_functors_are_lawful() {
        let arrow = Arc::new(FinCategory::arrow());
        assert!(FinFunctor::identity(arrow.clone()).check().is_empty());
        let y = arrow.object_id("y").unwrap();
        let c = FinFunctor::constant("cy", arrow.clone(), arrow.clone(), y);
        assert!(c.check().is_empty());
        assert_eq!(c.apply_named("f").unwrap(), "id_y");
    }

    #[test]
    fn one_broken_composite_is_reported_exactly() {
        // x -f-> y -g-> z with two parallel arrows h, k : x → z and f.g = h.
        let cat = Arc::new(
            FinCategory::from_parts(
                &["x", "y", "z"],
                &[
                    ("id_x", "x", "x"),
                    ("id_y", "y", "y"),
                    ("id_z", "z", "z"),
                    ("f", "x", "y"),
                    ("g", "y", "z"),
                    ("h", "x", "z"),
                    ("k", "x", "z"),
                ],
                &[("x", "id_x"), ("y", "id_y"), ("z", "id_z")],
                &[
                    ("id_x", "id_x", "id_x"),
                    ("id_y", "id_y", "id_y"),
                    ("id_z", "id_z", "id_z"),
                    ("id_x", "f", "f"),
                    ("f", "id_y", "f"),
                    ("id_y", "g", "g"),
                    ("g", "id_z", "g"),
                    ("id_x", "h", "h"),
                    ("h", "id_z", "h"),
                    ("id_x", "k", "k"),
                    ("k", "id_z", "k"),
                    ("f", "g", "h"),
                ],
            )
            .unwrap(),
        );
        assert!(cat.validate().is_empty());
        let objects: BTreeMap<String, String> = [("x", "x"), ("y", "y"), ("z", "z")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        let morphisms: BTreeMap<String, String> = [("f", "f"), ("g", "g"), ("h", "k"), ("k", "k")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        let bent = FinFunctor::from_named("bent", cat.clone(), cat, &objects, &morphisms).unwrap();
        assert_eq!(
            bent.check(),
            vec![Violation::FunctorComposition {
                f: "f".into(),
                g: "g".into()
            }]
        );
    }

    #[test]
    fn partial_functor_is_a_totality_error() {
        let arrow = Arc::new(FinCategory::arrow());
        let err = FinFunctor::new("p", arrow.clone(), arrow, vec![Obj(0)], vec![]).unwrap_err();
        assert!(matches!(err, FinCatError::NotTotal { .. }));
    }

    #[test]
    fn naturality_checks() {
        let arrow = Arc::new(FinCategory::arrow());
        let (x, y) = (arrow.object_id("x").unwrap(), arrow.object_id("y").unwrap());
        let cx = Arc::new(FinFunctor::constant("cx", arrow.clone(), arrow.clone(), x));
        let cy = Arc::new(FinFunctor::constant("cy", arrow.clone(), arrow.clone(), y));
        let id = Arc::new(FinFunctor::identity(arrow.clone()));
        assert!(NatTrans::identity(id.clone()).check().is_empty());
        let f = arrow.morphism_id("f").unwrap();
        let t = NatTrans::new("t", cx.clone(), cy, vec![f, f]).unwrap();
        assert!(t.check().is_empty());
        let idx = arrow.identity(x);
        let inclusion = NatTrans::new("i", cx.clone(), id.clone(), vec![idx, f]).unwrap();
        assert!(inclusion.check().is_empty());
        let err = NatTrans::new("bad", cx, id, vec![idx, idx]).unwrap_err();
        assert!(matches!(err, FinCatError::ComponentShape { .. }));
    }

    #[test]
    fn naturality_failure_is_listed() {
        // Two-object category with two parallel arrows f, g : x → y.
        let cat = Arc::new(FinCategory::free_on_dag(&["x", "y"], &[("f", "x", "y"), ("g", "x", "y")], 16).unwrap());
        let x = cat.object_id("x").unwrap();
        let g = cat.morphism_id("g").unwrap();
        let cx = Arc::new(FinFunctor::constant("cx", cat.clone(), cat.clone(), x));
        let id = Arc::new(FinFunctor::identity(cat.clone()));
        // components (id_x, g): square at f reads id_x;f = f vs id_x;g = g.
        let t = NatTrans::new("t", cx, id, vec![cat.identity(x), g]).unwrap();
        assert_eq!(t.check(), vec![Violation::Naturality { morphism: "f".into() }]);
    }

    #[test]
    fn end_of_trivial_and_discrete() {
        let e = EndCategory::build(Arc::new(trivial()), None, DEFAULT_MAX_ENTITIES).unwrap();
        assert_eq!((e.category().object_count(), e.category().morphism_count()), (1, 1));
        let d = EndCategory::build(Arc::new(FinCategory::discrete(&["a", "b"])), None, DEFAULT_MAX_ENTITIES).unwrap();
        assert_eq!((d.category().object_count(), d.category().morphism_count()), (4, 4));
        assert!(d.category().validate().is_empty());
        assert_eq!(d.category().object_name(d.identity_object()), "id");
    }

    #[test]
    fn end_of_arrow() {
        // Endofunctors of x → y: constant x, constant y, identity.
        let e = EndCategory::build(Arc::new(FinCategory::arrow()), None, DEFAULT_MAX_ENTITIES).unwrap();
        assert_eq!(e.category().object_count(), 3);
        assert!(e.category().validate().is_empty());
    }

    #[test]
    fn capacity_error_reports_bound() {
        let err = EndCategory::build(Arc::new(FinCategory::discrete(&["a", "b", "c"])), None, 5).unwrap_err();
        assert_eq!(
            err,
            FinCatError::Capacity {
                what: "functors",
                bound: 5
            }
        );
    }

    #[test]
    fn generator_closure_contains_identity_and_powers() {
        let base = Arc::new(FinCategory::discrete(&["a", "b", "c"]));
        let cycle = FinFunctor::new(
            "r",
            base.clone(),
            base.clone(),
            vec![Obj(1), Obj(2), Obj(0)],
            base.morphisms().map(|m| Mor((m.0 + 1) % 3)).collect(),
        )
        .unwrap();
        let e = EndCategory::build(base, Some(&[cycle]), 100).unwrap();
        let names: Vec<&str> = e.category().object_names().iter().map(String::as_str).collect();
        assert_eq!(names, ["id", "r", "r*r"]);
        assert!(e.category().validate().is_empty());
    }
}
