//! Turns universe-file sections into core values, resolving every reference.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use segal_dyn::braket::{MutationTable, OperatorTable, StateBasis, StateMap};
use segal_dyn::cwdist::{CwComplex, RealizationTable, StackMap, StackTable};
use segal_dyn::gencat::{Amalgam, Cell, Flavor, GenMorphism};
use segal_dyn::strings::{Equivalence, LawUniverse, StackAction, StateAction};
use segal_dyn::tangent::PsiEndo;
use segal_dyn::tower::StateTower;
use segal_dyn::{EndCategory, FinCategory, FinFunctor, NatTrans, Obj};

use crate::error::CliError;
use crate::universe::{CarrierMap, FunctorDecl, Presentation, UniqueMap, UniverseFile};

pub fn category(u: &UniverseFile, max: usize) -> Result<Arc<FinCategory>, CliError> {
    let decl = u.category.as_ref().ok_or(CliError::MissingSection("category"))?;
    let morphisms: Vec<(&str, &str, &str)> = decl
        .morphisms
        .iter()
        .map(|m| (m.id.as_str(), m.dom.as_str(), m.cod.as_str()))
        .collect();
    let objects: Vec<&str> = decl.objects.iter().map(String::as_str).collect();
    let cat = match decl.presentation {
        Presentation::Table => {
            let identities: Vec<(&str, &str)> = decl.identities.iter().map(|(o, m)| (o.as_str(), m.as_str())).collect();
            let table: Vec<(&str, &str, &str)> = decl
                .compose
                .iter()
                .map(|[f, g, h]| (f.as_str(), g.as_str(), h.as_str()))
                .collect();
            FinCategory::from_parts(&objects, &morphisms, &identities, &table).map_err(reference)?
        }
        Presentation::Free => {
            for &(id, dom, cod) in &morphisms {
                for end in [dom, cod] {
                    if !objects.contains(&end) {
                        return Err(CliError::dangling("category", format!("{end} (in {id})")));
                    }
                }
            }
            FinCategory::free_on_dag(&objects, &morphisms, max).ok_or_else(|| {
                CliError::Capacity(format!("the path category has a cycle or more than {max} morphisms"))
            })?
        }
    };
    Ok(Arc::new(cat))
}

fn reference(e: segal_dyn::FinCatError) -> CliError {
    match e {
        segal_dyn::FinCatError::UnknownObject(id) => CliError::dangling("category", id),
        segal_dyn::FinCatError::UnknownMorphism(id) => CliError::dangling("category", id),
        other => other.into(),
    }
}

pub fn functor(
    name: &str,
    decl: &FunctorDecl,
    source: Arc<FinCategory>,
    target: Arc<FinCategory>,
) -> Result<FinFunctor, CliError> {
    FinFunctor::from_named(name, source, target, &decl.objects.0, &decl.morphisms.0).map_err(reference)
}

/// Endofunctors from the `functors` section, with `id` added.
pub fn functors(u: &UniverseFile, cat: &Arc<FinCategory>) -> Result<BTreeMap<String, Arc<FinFunctor>>, CliError> {
    let mut out = BTreeMap::new();
    out.insert("id".to_string(), Arc::new(FinFunctor::identity(cat.clone())));
    for (name, decl) in u.functors.iter() {
        if name == "id" {
            return Err(CliError::Input("`id` is reserved for the identity functor".into()));
        }
        out.insert(name.clone(), Arc::new(functor(name, decl, cat.clone(), cat.clone())?));
    }
    Ok(out)
}

pub fn transformations(
    u: &UniverseFile,
    functors: &BTreeMap<String, Arc<FinFunctor>>,
) -> Result<BTreeMap<String, NatTrans>, CliError> {
    let mut out = BTreeMap::new();
    for (name, decl) in u.transformations.iter() {
        let get = |id: &String| {
            functors
                .get(id)
                .cloned()
                .ok_or_else(|| CliError::dangling("transformations", id.clone()))
        };
        let t = NatTrans::from_named(name.clone(), get(&decl.source)?, get(&decl.target)?, &decl.components.0)
            .map_err(reference)?;
        out.insert(name.clone(), t);
    }
    Ok(out)
}

fn level(
    base: &Arc<FinCategory>,
    generators: Option<&Vec<String>>,
    inline: &UniqueMap<FunctorDecl>,
    outer: Option<&BTreeMap<String, Arc<FinFunctor>>>,
    max: usize,
) -> Result<EndCategory, CliError> {
    let mut named: Vec<FinFunctor> = Vec::new();
    for (name, decl) in inline.iter() {
        named.push(functor(name, decl, base.clone(), base.clone())?);
    }
    let Some(generators) = generators else {
        let end = EndCategory::build(base.clone(), None, max)?;
        return Ok(end.with_names(&named)?);
    };
    let mut gens = Vec::new();
    for g in generators {
        if let Some(f) = named.iter().find(|f| f.name() == g) {
            gens.push(f.clone());
        } else if let Some(f) = outer.and_then(|o| o.get(g)) {
            gens.push((**f).clone());
        } else {
            return Err(CliError::dangling("generators", g.clone()));
        }
    }
    Ok(EndCategory::build(base.clone(), Some(&gens), max)?)
}

pub fn tower(u: &UniverseFile, cat: &Arc<FinCategory>, max: usize) -> Result<StateTower, CliError> {
    let decl = u.tower.as_ref().ok_or(CliError::MissingSection("tower"))?;
    let outer = functors(u, cat)?;
    let mut levels: Vec<EndCategory> = Vec::new();
    for (i, l) in decl.levels.iter().enumerate() {
        let below = if i == 0 {
            cat.clone()
        } else {
            levels[i - 1].category().clone()
        };
        let end = level(
            &below,
            l.generators.as_ref(),
            &l.functors,
            (i == 0).then_some(&outer),
            max,
        )?;
        levels.push(end);
    }
    if decl.seeds.len() != levels.len() {
        return Err(CliError::Input(format!(
            "tower has {} levels but {} seeds",
            levels.len(),
            decl.seeds.len()
        )));
    }
    let seeds = decl
        .seeds
        .iter()
        .zip(&levels)
        .map(|(s, l)| {
            l.category()
                .object_id(s)
                .ok_or_else(|| CliError::dangling("tower.seeds", s.clone()))
        })
        .collect::<Result<Vec<Obj>, _>>()?;
    Ok(StateTower::new(cat.clone(), levels, seeds)?)
}

pub struct Braket {
    pub basis: Arc<StateBasis>,
    pub operators: BTreeMap<String, OperatorTable>,
    pub mutations: BTreeMap<String, MutationTable>,
    pub state_maps: BTreeMap<String, StateMap>,
}

pub fn braket(
    u: &UniverseFile,
    functors: &BTreeMap<String, Arc<FinFunctor>>,
    transformations: &BTreeMap<String, NatTrans>,
) -> Result<Braket, CliError> {
    let basis = Arc::new(StateBasis::new(u.basis.iter().cloned())?);
    let mut operators = BTreeMap::new();
    for (name, decl) in u.operators.iter() {
        if let Some(f) = decl.eigen.iter().find(|f| !functors.contains_key(*f)) {
            return Err(CliError::dangling("operators", f.clone()));
        }
        operators.insert(
            name.clone(),
            OperatorTable::new(name.clone(), basis.clone(), decl.eigen.clone())?,
        );
    }
    let mut mutations = BTreeMap::new();
    for (name, decl) in u.mutations.iter() {
        let op = |id: &String| {
            operators
                .get(id)
                .cloned()
                .ok_or_else(|| CliError::dangling("mutations", id.clone()))
        };
        let components = decl
            .components
            .iter()
            .map(|t| {
                transformations
                    .get(t)
                    .cloned()
                    .ok_or_else(|| CliError::dangling("mutations", t.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let table = MutationTable::new(name.clone(), op(&decl.source)?, op(&decl.target)?, components)?;
        mutations.insert(name.clone(), table);
    }
    let mut state_maps = BTreeMap::new();
    for (name, labels) in u.state_maps.iter() {
        let table = labels
            .iter()
            .map(|l| {
                basis
                    .index_of(l)
                    .ok_or_else(|| CliError::dangling("state_maps", l.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        state_maps.insert(name.clone(), StateMap::new(name.clone(), basis.clone(), table)?);
    }
    Ok(Braket {
        basis,
        operators,
        mutations,
        state_maps,
    })
}

pub struct Stacks {
    pub table: StackTable,
    pub stacks: BTreeSet<String>,
    pub laws: BTreeSet<String>,
    pub realizations: RealizationTable,
}

pub fn stacks(u: &UniverseFile) -> Result<Stacks, CliError> {
    let laws: BTreeSet<String> = u.laws.keys().cloned().collect();
    let mut table = StackTable::new();
    for (stack, values) in u.stacks.iter() {
        for law in values.keys() {
            if !laws.contains(law) {
                return Err(CliError::dangling("stacks", law.clone()));
            }
        }
        table.insert(stack.clone(), values.0.clone());
    }
    let mut realizations = BTreeMap::new();
    for (sset, cw) in u.realizations.iter() {
        let levels = u
            .cw_library
            .get(cw)
            .ok_or_else(|| CliError::dangling("realizations", cw.clone()))?;
        realizations.insert(sset.clone(), CwComplex::from_labels(levels));
    }
    Ok(Stacks {
        stacks: table.keys().cloned().collect(),
        table,
        laws,
        realizations: RealizationTable::new(realizations),
    })
}

/// The stack part of every state action.
pub fn stack_states(u: &UniverseFile, stacks: &Stacks) -> Result<BTreeMap<String, StackMap>, CliError> {
    let mut out = BTreeMap::new();
    for (name, decl) in u.state_actions.iter() {
        for (from, to) in decl.stacks.iter() {
            for s in [from, to] {
                if !stacks.stacks.contains(s) {
                    return Err(CliError::dangling("state_actions", s.clone()));
                }
            }
        }
        out.insert(name.clone(), decl.stacks.0.clone());
    }
    Ok(out)
}

pub struct Delta {
    pub end: EndCategory,
    pub states: Vec<PsiEndo>,
}

pub fn delta(u: &UniverseFile, cat: &Arc<FinCategory>, max: usize) -> Result<Delta, CliError> {
    let outer = functors(u, cat)?;
    let section = &u.psi_endos;
    let end = level(
        cat,
        section.generators.as_ref(),
        &UniqueMap::default(),
        Some(&outer),
        max,
    )?;
    let named: Vec<FinFunctor> = outer.values().map(|f| (**f).clone()).collect();
    let end = if section.generators.is_none() {
        end.with_names(&named)?
    } else {
        end
    };
    let dcat = end.category().clone();
    let mut states = Vec::new();
    for (name, decl) in section.states.iter() {
        let f = FinFunctor::from_named(
            name.clone(),
            dcat.clone(),
            dcat.clone(),
            &decl.objects.0,
            &decl.morphisms.0,
        )
        .map_err(|e| match e {
            segal_dyn::FinCatError::UnknownObject(id) | segal_dyn::FinCatError::UnknownMorphism(id) => {
                CliError::dangling("psi_endos", id)
            }
            other => other.into(),
        })?;
        let mut gamma = vec![None; dcat.object_count()];
        for (b, g) in decl.gamma.iter() {
            let b = dcat
                .object_id(b)
                .ok_or_else(|| CliError::dangling("psi_endos.gamma", b.clone()))?;
            let g = dcat
                .morphism_id(g)
                .ok_or_else(|| CliError::dangling("psi_endos.gamma", g.clone()))?;
            gamma[b.0] = Some(g);
        }
        states.push(PsiEndo::new(name.clone(), f, gamma));
    }
    Ok(Delta { end, states })
}

pub fn cubes(u: &UniverseFile, cat: &Arc<FinCategory>) -> Result<Vec<(String, GenMorphism)>, CliError> {
    let section = &u.amalgams;
    let mut amalgams = BTreeMap::new();
    for (name, parts) in section.objects.iter() {
        let parts = parts
            .iter()
            .map(|p| {
                cat.object_id(p)
                    .ok_or_else(|| CliError::dangling("amalgams", p.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        amalgams.insert(name.clone(), Amalgam::new(parts)?);
    }
    let mut out = Vec::new();
    for (name, decl) in section.morphisms.iter() {
        let get = |id: &String| {
            amalgams
                .get(id)
                .cloned()
                .ok_or_else(|| CliError::dangling("amalgams", id.clone()))
        };
        let mut entries: BTreeMap<(usize, usize), Vec<Cell>> = BTreeMap::new();
        for e in &decl.entries {
            if entries.contains_key(&(e.i, e.j)) {
                return Err(CliError::Input(format!(
                    "{name}: entry ({}, {}) listed twice",
                    e.i, e.j
                )));
            }
            let cells = e
                .cells
                .iter()
                .map(|c| {
                    Ok(Cell {
                        morphism: cat
                            .morphism_id(&c.morphism)
                            .ok_or_else(|| CliError::dangling("amalgams", c.morphism.clone()))?,
                        flavor: Flavor::label(c.flavor.clone()),
                    })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            entries.insert((e.i, e.j), cells);
        }
        out.push((
            name.clone(),
            GenMorphism::new(cat.clone(), get(&decl.source)?, get(&decl.target)?, entries)?,
        ));
    }
    Ok(out)
}

pub fn law_universe(u: &UniverseFile) -> LawUniverse {
    LawUniverse {
        laws: u
            .laws
            .iter()
            .map(|(k, v)| (k.clone(), v.iter().cloned().collect()))
            .collect(),
        equivalences: u
            .equivalences
            .iter()
            .map(|(id, e)| Equivalence {
                id: id.clone(),
                from: e.from.clone(),
                to: e.to.clone(),
                pairs: e.pairs.clone(),
            })
            .collect(),
    }
}

fn carrier_maps(maps: &UniqueMap<CarrierMap>) -> BTreeMap<String, (String, BTreeMap<String, String>)> {
    maps.iter()
        .map(|(k, m)| (k.clone(), (m.carrier.clone(), m.elements.0.clone())))
        .collect()
}

pub fn stack_action(u: &UniverseFile, name: &str) -> Result<StackAction, CliError> {
    let maps = u
        .stack_actions
        .get(name)
        .ok_or_else(|| CliError::dangling("stack_actions", name))?;
    Ok(StackAction {
        name: name.to_string(),
        laws: carrier_maps(maps),
    })
}

pub fn state_action(u: &UniverseFile, name: &str) -> Result<StateAction, CliError> {
    let decl = u
        .state_actions
        .get(name)
        .ok_or_else(|| CliError::dangling("state_actions", name))?;
    Ok(StateAction {
        name: name.to_string(),
        carriers: carrier_maps(&decl.carriers),
    })
}
