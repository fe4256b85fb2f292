//! Derivations of a state `Ψ` of `δX = End(X)` and the tangent data built
//! from them.
//!
//! For a base point `A`, a direction `M` and a target `B`, every
//! `Λ ∈ Nat(MA, B)` comes with the squares
//!
//! ```text
//!   MA --Λ--> B
//!   |α        |β
//!   v         v
//!   id --Γ_B--> Ψ(B)
//! ```
//!
//! and a derivation picks a nonempty set of squares for every `Λ`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::fincat::{EndCategory, FinCatError, FinCategory, FinFunctor, Mor, Obj};
use crate::gencat::{self, Amalgam, Cell, Flavor, GenError, GenMorphism, SetMorphism};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TangentError {
    #[error("state `{name}` breaks {count} law(s)")]
    InvalidPsi { name: String, count: usize },
    #[error("state acts on a different category than the one given")]
    WrongCategory,
    #[error("no Γ chosen for `{0}`")]
    MissingGamma(String),
    #[error("`{outer}` after `{inner}` is not an object of the category")]
    NotClosed { outer: String, inner: String },
    #[error("`{lambda}` does not run {expected}")]
    LambdaShape { lambda: String, expected: String },
    #[error("{count} full collections exceed the bound of {bound}")]
    Capacity { count: BigUint, bound: usize },
    #[error("square set {0} is empty, so no full cube exists")]
    EmptyEntry(usize),
    #[error("no states to compare")]
    EmptyInput,
    #[error("unknown state `{0}`")]
    UnknownPsi(String),
    #[error(transparent)]
    Base(#[from] FinCatError),
    #[error(transparent)]
    Gen(#[from] GenError),
}

/// An endofunctor of `δX` together with its chosen `Γ_B: id ⇒ Ψ(B)`.
#[derive(Debug, Clone)]
pub struct PsiEndo {
    name: String,
    functor: FinFunctor,
    gamma: Vec<Option<Mor>>,
}

impl PsiEndo {
    pub fn new(name: impl Into<String>, functor: FinFunctor, gamma: Vec<Option<Mor>>) -> Self {
        PsiEndo {
            name: name.into(),
            functor,
            gamma,
        }
    }

    /// `Ψ = id` with `Γ_id = 1_id` and no other `Γ`.
    pub fn identity(delta: &EndCategory) -> Self {
        let cat = delta.category();
        let mut gamma = vec![None; cat.object_count()];
        let id = delta.identity_object();
        gamma[id.0] = Some(cat.identity(id));
        PsiEndo::new("id", FinFunctor::identity(cat.clone()), gamma)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn functor(&self) -> &FinFunctor {
        &self.functor
    }

    pub fn gamma(&self, b: Obj) -> Option<Mor> {
        self.gamma.get(b.0).copied().flatten()
    }

    pub fn apply(&self, b: Obj) -> Obj {
        self.functor.object_map()[b.0]
    }
}

/// A failed law for a state of `δX`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum PsiViolation {
    Functor { detail: String },
    MonoidIdentity { got: String },
    MonoidComposition { outer: String, inner: String },
    GammaShape { object: String, gamma: String },
    GammaNaturality { object: String },
    GammaLength { got: usize, expected: usize },
}

/// Functor laws, `Ψ(id) = id`, `Ψ(B∘A) = Ψ(B)∘Ψ(A)` and the shape and
/// naturality of every chosen `Γ_B`.
pub fn check_psi(delta: &EndCategory, psi: &PsiEndo) -> Result<Vec<PsiViolation>, TangentError> {
    let cat = delta.category();
    if !same_category(psi.functor.source(), cat) || !same_category(psi.functor.target(), cat) {
        return Err(TangentError::WrongCategory);
    }
    let mut out: Vec<PsiViolation> = psi
        .functor
        .check()
        .into_iter()
        .map(|v| PsiViolation::Functor { detail: v.to_string() })
        .collect();
    let id = delta.identity_object();
    if psi.apply(id) != id {
        out.push(PsiViolation::MonoidIdentity {
            got: cat.object_name(psi.apply(id)).to_string(),
        });
    }
    for outer in cat.objects() {
        for inner in cat.objects() {
            let composite = delta.compose_objects(outer, inner);
            let images = delta.compose_objects(psi.apply(outer), psi.apply(inner));
            if composite.map(|c| psi.apply(c)) != images {
                out.push(PsiViolation::MonoidComposition {
                    outer: cat.object_name(outer).to_string(),
                    inner: cat.object_name(inner).to_string(),
                });
            }
        }
    }
    if psi.gamma.len() != cat.object_count() {
        out.push(PsiViolation::GammaLength {
            got: psi.gamma.len(),
            expected: cat.object_count(),
        });
        return Ok(out);
    }
    for b in cat.objects() {
        let Some(g) = psi.gamma(b) else { continue };
        if g.0 >= cat.morphism_count() || cat.dom(g) != id || cat.cod(g) != psi.apply(b) {
            out.push(PsiViolation::GammaShape {
                object: cat.object_name(b).to_string(),
                gamma: if g.0 < cat.morphism_count() {
                    cat.morphism_name(g).to_string()
                } else {
                    g.0.to_string()
                },
            });
        } else if !delta.transformation(g).check().is_empty() {
            out.push(PsiViolation::GammaNaturality {
                object: cat.object_name(b).to_string(),
            });
        }
    }
    Ok(out)
}

fn same_category(a: &Arc<FinCategory>, b: &Arc<FinCategory>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

fn require_valid(delta: &EndCategory, psi: &PsiEndo) -> Result<(), TangentError> {
    let report = check_psi(delta, psi)?;
    if report.is_empty() {
        Ok(())
    } else {
        Err(TangentError::InvalidPsi {
            name: psi.name.clone(),
            count: report.len(),
        })
    }
}

/// `RSpec A (B) = Nat(A, B)`, in morphism order.
pub fn rspec_eval(delta: &EndCategory, a: Obj, b: Obj) -> Vec<Mor> {
    delta.category().hom(a, b).to_vec()
}

/// Which leg of the square drives the search. Both give the same squares.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Factorization {
    /// `MA → id → Ψ(B)`: pick `α`, then solve for `β`.
    #[default]
    ThroughIdentity,
    /// `MA → B → Ψ(B)`: pick `β`, then solve for `α`.
    ThroughTarget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Square {
    pub alpha: Mor,
    pub beta: Mor,
}

/// All `(α, β)` with `Λ ; β = α ; Γ_B`, sorted.
pub fn omega_squares(
    delta: &EndCategory,
    psi: &PsiEndo,
    lambda: Mor,
    b: Obj,
    factorization: Factorization,
) -> Result<Vec<Square>, TangentError> {
    let cat = delta.category();
    let gamma = psi
        .gamma(b)
        .ok_or_else(|| TangentError::MissingGamma(cat.object_name(b).to_string()))?;
    if cat.cod(lambda) != b {
        return Err(TangentError::LambdaShape {
            lambda: cat.morphism_name(lambda).to_string(),
            expected: format!("into {}", cat.object_name(b)),
        });
    }
    let ma = cat.dom(lambda);
    let id = delta.identity_object();
    let alphas = cat.hom(ma, id);
    let betas = cat.hom(b, psi.apply(b));
    let mut out = Vec::new();
    match factorization {
        Factorization::ThroughIdentity => {
            for &alpha in alphas {
                let diagonal = cat.compose(alpha, gamma)?;
                for &beta in betas {
                    if cat.compose(lambda, beta)? == diagonal {
                        out.push(Square { alpha, beta });
                    }
                }
            }
        }
        Factorization::ThroughTarget => {
            for &beta in betas {
                let diagonal = cat.compose(lambda, beta)?;
                for &alpha in alphas {
                    if cat.compose(alpha, gamma)? == diagonal {
                        out.push(Square { alpha, beta });
                    }
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

/// `Π (2^{s_i} − 1)`.
pub fn full_count(sizes: impl IntoIterator<Item = usize>) -> BigUint {
    sizes.into_iter().fold(BigUint::one(), |acc, s| {
        if s == 0 {
            BigUint::zero()
        } else {
            acc * ((BigUint::one() << s) - BigUint::one())
        }
    })
}

fn decimal<S: serde::Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(n)
}

/// A family `(S_i)` with one nonempty set of squares per `Λ_i`.
pub type Collection = Vec<BTreeSet<Square>>;

/// `Der_Ψ(X, M)(B)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DerivationSet {
    pub base: Obj,
    pub direction: Obj,
    pub target: Obj,
    pub deformed: Obj,
    pub lambdas: Vec<Mor>,
    pub squares: Vec<Vec<Square>>,
    #[serde(serialize_with = "decimal")]
    pub count: BigUint,
    pub full_collections: Vec<Collection>,
}

fn deformed(delta: &EndCategory, a: Obj, m: Obj) -> Result<Obj, TangentError> {
    delta.compose_objects(m, a).ok_or_else(|| {
        let cat = delta.category();
        TangentError::NotClosed {
            outer: cat.object_name(m).to_string(),
            inner: cat.object_name(a).to_string(),
        }
    })
}

/// Squares and their count, without listing collections. Assumes `psi`
/// has been checked.
fn squares_of(
    delta: &EndCategory,
    psi: &PsiEndo,
    a: Obj,
    m: Obj,
    b: Obj,
    factorization: Factorization,
) -> Result<DerivationSet, TangentError> {
    let ma = deformed(delta, a, m)?;
    let lambdas = rspec_eval(delta, ma, b);
    let squares = if lambdas.is_empty() {
        Vec::new()
    } else {
        lambdas
            .iter()
            .map(|&l| omega_squares(delta, psi, l, b, factorization))
            .collect::<Result<_, _>>()?
    };
    let count = full_count(squares.iter().map(Vec::len));
    Ok(DerivationSet {
        base: a,
        direction: m,
        target: b,
        deformed: ma,
        lambdas,
        squares,
        count,
        full_collections: Vec::new(),
    })
}

fn nonempty_subsets(items: &[Square]) -> Vec<BTreeSet<Square>> {
    (1u64..(1 << items.len()))
        .map(|mask| {
            (0..items.len())
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| items[b])
                .collect()
        })
        .collect()
}

/// Lists every full collection; refuses when there are more than `bound`.
pub fn der_set(
    delta: &EndCategory,
    psi: &PsiEndo,
    a: Obj,
    m: Obj,
    b: Obj,
    bound: usize,
    factorization: Factorization,
) -> Result<DerivationSet, TangentError> {
    require_valid(delta, psi)?;
    let mut set = squares_of(delta, psi, a, m, b, factorization)?;
    if set.count > BigUint::from(bound) {
        return Err(TangentError::Capacity {
            count: set.count,
            bound,
        });
    }
    let mut families: Vec<Collection> = vec![Vec::new()];
    for sq in &set.squares {
        let subsets = nonempty_subsets(sq);
        families = families
            .into_iter()
            .flat_map(|fam| {
                subsets.iter().map(move |s| {
                    let mut next = fam.clone();
                    next.push(s.clone());
                    next
                })
            })
            .collect();
    }
    set.full_collections = families;
    Ok(set)
}

/// The maximal cube `(Λ_1 … Λ_k) → (Γ_B)`, one flavored cell per square.
///
/// Its base category has the `Λ_i` and `Γ_B` as objects and the squares as
/// morphisms `Λ_i → Γ_B`, plus identities.
#[derive(Debug, Clone)]
pub struct CubicDerivation {
    pub derivation: DerivationSet,
    /// `None` when there is no `Λ` at all.
    pub cube: Option<GenMorphism>,
    cells: BTreeMap<Mor, (usize, Square)>,
}

pub fn der_cubic(
    delta: &EndCategory,
    psi: &PsiEndo,
    a: Obj,
    m: Obj,
    b: Obj,
    factorization: Factorization,
) -> Result<CubicDerivation, TangentError> {
    require_valid(delta, psi)?;
    let derivation = squares_of(delta, psi, a, m, b, factorization)?;
    if let Some(i) = derivation.squares.iter().position(Vec::is_empty) {
        return Err(TangentError::EmptyEntry(i));
    }
    if derivation.lambdas.is_empty() {
        return Ok(CubicDerivation {
            derivation,
            cube: None,
            cells: BTreeMap::new(),
        });
    }
    let dcat = delta.category();
    let k = derivation.lambdas.len();
    let mut objects: Vec<String> = (0..k).map(|i| format!("L{i}")).collect();
    objects.push("G".to_string());
    let mut morphisms: Vec<(String, String, String)> = objects
        .iter()
        .map(|o| (format!("id_{o}"), o.clone(), o.clone()))
        .collect();
    let mut table: Vec<(String, String, String)> = Vec::new();
    for o in &objects {
        let id = format!("id_{o}");
        table.push((id.clone(), id.clone(), id));
    }
    let mut flavors = Vec::new();
    for (i, squares) in derivation.squares.iter().enumerate() {
        for sq in squares {
            let flavor = format!("{};{}", dcat.morphism_name(sq.alpha), dcat.morphism_name(sq.beta));
            let name = format!("L{i}:{flavor}");
            table.push((format!("id_L{i}"), name.clone(), name.clone()));
            table.push((name.clone(), "id_G".to_string(), name.clone()));
            morphisms.push((name.clone(), format!("L{i}"), "G".to_string()));
            flavors.push((i, *sq, name, flavor));
        }
    }
    let identities: Vec<(String, String)> = objects.iter().map(|o| (o.clone(), format!("id_{o}"))).collect();
    let base = Arc::new(FinCategory::from_parts(&objects, &morphisms, &identities, &table)?);
    let mut entries: BTreeMap<(usize, usize), Vec<Cell>> = BTreeMap::new();
    let mut cells = BTreeMap::new();
    for (i, sq, name, flavor) in flavors {
        let morphism = base.morphism_id(&name).expect("square morphism");
        cells.insert(morphism, (i, sq));
        entries.entry((i, 0)).or_default().push(Cell {
            morphism,
            flavor: Flavor::label(flavor),
        });
    }
    let source = Amalgam::new((0..k).map(Obj).collect())?;
    let target = Amalgam::singleton(Obj(k));
    let cube = GenMorphism::new(base, source, target, entries)?;
    Ok(CubicDerivation {
        derivation,
        cube: Some(cube),
        cells,
    })
}

/// `†π`: project the cube along every full selection and forget flavors.
pub fn truncate_cubic(cubic: &CubicDerivation, bound: usize) -> Result<BTreeSet<Collection>, TangentError> {
    let Some(cube) = &cubic.cube else {
        return Ok([Vec::new()].into());
    };
    if cubic.derivation.count > BigUint::from(bound) {
        return Err(TangentError::Capacity {
            count: cubic.derivation.count.clone(),
            bound,
        });
    }
    let k = cube.source().len();
    let mut out = BTreeSet::new();
    for selection in gencat::all_selections(cube) {
        let SetMorphism { entries, .. } = gencat::deconstruct(&gencat::project_flavors(cube, &selection)?);
        let mut family: Collection = vec![BTreeSet::new(); k];
        for ((i, _), set) in entries {
            family[i] = set.iter().map(|m| cubic.cells[m].1).collect();
        }
        out.insert(family);
    }
    Ok(out)
}

/// The tangent data of `Ψ` at `A` in direction `M`: the derivation sets for
/// every `B`, and the one at `B = A`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TangentRepr {
    pub family: BTreeMap<Obj, DerivationSet>,
    pub at_base: DerivationSet,
}

/// Targets `B` without a chosen `Γ_B` are skipped unless nothing maps
/// into them, in which case their set holds the single empty family.
pub fn tangent_repr(
    delta: &EndCategory,
    psi: &PsiEndo,
    a: Obj,
    m: Obj,
    bound: usize,
    factorization: Factorization,
) -> Result<TangentRepr, TangentError> {
    require_valid(delta, psi)?;
    let mut family = BTreeMap::new();
    for b in delta.category().objects() {
        match der_set(delta, psi, a, m, b, bound, factorization) {
            Ok(set) => {
                family.insert(b, set);
            }
            Err(TangentError::MissingGamma(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let at_base = match family.get(&a) {
        Some(set) => set.clone(),
        None => der_set(delta, psi, a, m, a, bound, factorization)?,
    };
    Ok(TangentRepr { family, at_base })
}

/// Full-collection count for every direction and target; `None` where `Γ_B`
/// is missing and some `Λ` exists.
pub fn tangent_signature(
    delta: &EndCategory,
    psi: &PsiEndo,
    eps: Obj,
    directions: &[Obj],
) -> Result<Vec<Option<BigUint>>, TangentError> {
    require_valid(delta, psi)?;
    let mut out = Vec::new();
    for &m in directions {
        for b in delta.category().objects() {
            match squares_of(delta, psi, eps, m, b, Factorization::ThroughIdentity) {
                Ok(set) => out.push(Some(set.count)),
                Err(TangentError::MissingGamma(_)) => out.push(None),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}

/// `Cusp[Ψ, ε]`: the names of the states whose tangent counts agree with
/// `Ψ`'s for every direction and target, in universe order.
pub fn cusp(
    delta: &EndCategory,
    psi: &str,
    eps: Obj,
    universe: &[PsiEndo],
    directions: &[Obj],
) -> Result<Vec<String>, TangentError> {
    if universe.is_empty() {
        return Err(TangentError::EmptyInput);
    }
    let signatures = universe
        .iter()
        .map(|xi| tangent_signature(delta, xi, eps, directions))
        .collect::<Result<Vec<_>, _>>()?;
    let me = universe
        .iter()
        .position(|xi| xi.name == psi)
        .ok_or_else(|| TangentError::UnknownPsi(psi.to_string()))?;
    Ok(universe
        .iter()
        .zip(&signatures)
        .filter(|(_, sig)| **sig == signatures[me])
        .map(|(xi, _)| xi.name.clone())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::DEFAULT_MAX_ENTITIES;

    fn delta_of(base: FinCategory) -> EndCategory {
        EndCategory::build(Arc::new(base), None, DEFAULT_MAX_ENTITIES).unwrap()
    }

    #[test]
    fn rspec_on_discrete_base() {
        let delta = delta_of(FinCategory::discrete(&["x", "y"]));
        let cat = delta.category();
        for a in cat.objects() {
            let nat = rspec_eval(&delta, a, a);
            assert_eq!(nat, vec![cat.identity(a)]);
        }
        // constants at x and at y
        let cx = delta.object_of(&FinFunctor::constant(
            "cx",
            delta.base().clone(),
            delta.base().clone(),
            Obj(0),
        ));
        let cy = delta.object_of(&FinFunctor::constant(
            "cy",
            delta.base().clone(),
            delta.base().clone(),
            Obj(1),
        ));
        assert!(rspec_eval(&delta, cx.unwrap(), cy.unwrap()).is_empty());
    }

    #[test]
    fn identity_psi_is_lawful() {
        let delta = delta_of(FinCategory::arrow());
        let psi = PsiEndo::identity(&delta);
        assert!(check_psi(&delta, &psi).unwrap().is_empty());
    }

    #[test]
    fn psi_moving_identity_is_flagged() {
        let delta = delta_of(FinCategory::arrow());
        let cat = delta.category().clone();
        let id = delta.identity_object();
        let other = cat.objects().find(|&o| o != id).unwrap();
        let objects: BTreeMap<String, String> = cat
            .objects()
            .map(|o| (cat.object_name(o).to_string(), cat.object_name(other).to_string()))
            .collect();
        let f = FinFunctor::from_named("k", cat.clone(), cat.clone(), &objects, &BTreeMap::new()).unwrap();
        let psi = PsiEndo::new("k", f, vec![None; cat.object_count()]);
        let report = check_psi(&delta, &psi).unwrap();
        assert!(report.iter().any(|v| matches!(v, PsiViolation::MonoidIdentity { .. })));
        assert!(matches!(
            der_set(&delta, &psi, id, id, id, 10, Factorization::ThroughIdentity),
            Err(TangentError::InvalidPsi { .. })
        ));
    }

    #[test]
    fn count_formula() {
        assert_eq!(full_count([2]), BigUint::from(3u32));
        assert_eq!(full_count([1, 2]), BigUint::from(3u32));
        assert_eq!(full_count([1, 0, 3]), BigUint::zero());
        assert_eq!(full_count(std::iter::empty()), BigUint::one());
        assert_eq!(full_count([70]), (BigUint::one() << 70usize) - BigUint::one());
    }

    #[test]
    fn identity_psi_squares_factor_through_id() {
        let delta = delta_of(FinCategory::arrow());
        let psi = PsiEndo::identity(&delta);
        let cat = delta.category();
        let id = delta.identity_object();
        let set = der_set(&delta, &psi, id, id, id, 1000, Factorization::ThroughIdentity).unwrap();
        // Λ ranges over End(id); the square forces α = Λ;β.
        let ends = cat.hom(id, id).len();
        assert_eq!(set.lambdas.len(), ends);
        for s in &set.squares {
            assert_eq!(s.len(), ends);
        }
        assert_eq!(set.count, full_count(vec![ends; ends]));
        assert_eq!(BigUint::from(set.full_collections.len()), set.count);
    }

    #[test]
    fn factorizations_agree_and_round_trip() {
        let delta = delta_of(FinCategory::arrow());
        let psi = PsiEndo::identity(&delta);
        let id = delta.identity_object();
        for a in delta.category().objects() {
            for m in delta.category().objects() {
                let one = der_set(&delta, &psi, a, m, id, 1000, Factorization::ThroughIdentity).unwrap();
                let two = der_set(&delta, &psi, a, m, id, 1000, Factorization::ThroughTarget).unwrap();
                assert_eq!(one, two);
                match der_cubic(&delta, &psi, a, m, id, Factorization::ThroughIdentity) {
                    Ok(cubic) => {
                        let cells = cubic.cube.as_ref().map_or(0, GenMorphism::cell_count);
                        assert_eq!(cells, one.squares.iter().map(Vec::len).sum::<usize>());
                        let back = truncate_cubic(&cubic, 1000).unwrap();
                        let expected: BTreeSet<Collection> = one.full_collections.iter().cloned().collect();
                        assert_eq!(back, expected);
                    }
                    Err(TangentError::EmptyEntry(_)) => assert!(one.full_collections.is_empty()),
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }

    #[test]
    fn capacity_reports_exact_count() {
        let delta = delta_of(FinCategory::arrow());
        let psi = PsiEndo::identity(&delta);
        let id = delta.identity_object();
        match der_set(&delta, &psi, id, id, id, 0, Factorization::ThroughIdentity) {
            Err(TangentError::Capacity { count, bound }) => {
                assert_eq!(bound, 0);
                assert!(count > BigUint::zero());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cusp_is_reflexive() {
        let delta = delta_of(FinCategory::arrow());
        let psi = PsiEndo::identity(&delta);
        let id = delta.identity_object();
        assert_eq!(cusp(&delta, "id", id, &[psi], &[id]).unwrap(), vec!["id"]);
        assert_eq!(cusp(&delta, "id", id, &[], &[id]), Err(TangentError::EmptyInput));
    }

    #[test]
    fn tangent_at_zero_deformation() {
        let delta = delta_of(FinCategory::arrow());
        let psi = PsiEndo::identity(&delta);
        let id = delta.identity_object();
        let t = tangent_repr(&delta, &psi, id, id, 1000, Factorization::ThroughIdentity).unwrap();
        assert_eq!(t.at_base.deformed, id);
        assert!(t.family.contains_key(&id));
    }
}
