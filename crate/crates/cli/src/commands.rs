//! Command dispatch.

use std::collections::{BTreeMap, BTreeSet};

use clap::Subcommand;
use serde::Serialize;
use serde_json::{json, Value};

use segal_dyn::cwdist::{self, DeltaMode, DifferentialMatrix, RealizationTable};
use segal_dyn::gencat;
use segal_dyn::strings::{self, Edge, Node, PushedString, StringGraph};
use segal_dyn::tangent::{self, Factorization, Square};
use segal_dyn::tower::{FlowLimit, StateTower, Verdict};
use segal_dyn::{EndCategory, FinCategory, Obj};

use crate::error::CliError;
use crate::report::Report;
use crate::resolve;
use crate::universe::UniverseFile;

#[derive(Debug, Clone, PartialEq, Eq, Subcommand, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Check every law the universe states.
    Validate,
    /// Build End(X), or the monoid spanned by the `functors` section.
    End {
        #[arg(long)]
        closure: bool,
    },
    /// Run the discrete flow driven by the tower.
    Flow {
        #[arg(long)]
        start: String,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        /// Use only the lowest levels of the tower.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Differential matrix of a state on stacks.
    Dmatrix {
        #[arg(long)]
        state: String,
        #[arg(long = "stack")]
        stacks: Vec<String>,
        #[arg(long = "law")]
        laws: Vec<String>,
        #[arg(long)]
        set_mode: bool,
    },
    /// Quantum states among all state actions.
    Quantum {
        #[arg(long = "stack")]
        stacks: Vec<String>,
        #[arg(long = "law")]
        laws: Vec<String>,
        #[arg(long)]
        set_mode: bool,
    },
    /// Derivation set of a state at a base point, direction and target.
    Der {
        #[arg(long)]
        state: String,
        #[arg(long)]
        base: String,
        #[arg(long)]
        direction: String,
        #[arg(long)]
        target: String,
        /// Solve squares starting from the target leg.
        #[arg(long)]
        through_target: bool,
        /// Also build the cube and check the projection round trip.
        #[arg(long)]
        cubic: bool,
    },
    /// States whose tangent counts match the given state's.
    Cusp {
        #[arg(long)]
        state: String,
        #[arg(long)]
        base: String,
        #[arg(long = "direction")]
        directions: Vec<String>,
    },
    /// Generalized categories on the `amalgams` section.
    Gencat {
        #[command(subcommand)]
        op: GencatOp,
    },
    /// Relative state `F_p ↦ F_{ψ(p)}` of a state map on an operator.
    Lift {
        #[arg(long)]
        state_map: String,
        #[arg(long)]
        operator: String,
    },
    /// String calculus.
    Strings {
        #[command(subcommand)]
        op: StringsOp,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Subcommand, Serialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum GencatOp {
    /// Unit, associativity and functor laws for the amalgam morphisms.
    Check,
}

#[derive(Debug, Clone, PartialEq, Eq, Subcommand, Serialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum StringsOp {
    Build,
    Join {
        first: String,
        second: String,
    },
    /// `node` is written `law:element`.
    Split {
        string: String,
        node: String,
    },
    Push {
        #[arg(long)]
        stack: String,
        string: String,
    },
    Shift {
        #[arg(long)]
        state: String,
        #[arg(long)]
        stack: String,
        string: String,
    },
}

fn obj_names(cat: &FinCategory, xs: &[Obj]) -> Vec<String> {
    xs.iter().map(|&x| cat.object_name(x).to_string()).collect()
}

fn obj(cat: &FinCategory, name: &str, section: &'static str) -> Result<Obj, CliError> {
    cat.object_id(name).ok_or_else(|| CliError::dangling(section, name))
}

fn tag(context: &str, v: impl Serialize) -> Value {
    let mut value = serde_json::to_value(v).expect("violation serializes");
    if let Value::Object(map) = &mut value {
        map.insert("in".to_string(), Value::String(context.to_string()));
    }
    value
}

/// Runs `command` on `universe`, with `bytes` the file it was read from.
pub fn run(command: &Command, universe: &UniverseFile, bytes: &[u8], max: usize) -> Result<Report, CliError> {
    let (result, violations) = match command {
        Command::Validate => validate(universe, max)?,
        Command::End { closure } => end(universe, *closure, max)?,
        Command::Flow { start, steps, depth } => flow(universe, start, *steps, *depth, max)?,
        Command::Dmatrix {
            state,
            stacks,
            laws,
            set_mode,
        } => dmatrix(universe, state, stacks, laws, *set_mode)?,
        Command::Quantum { stacks, laws, set_mode } => quantum(universe, stacks, laws, *set_mode)?,
        Command::Der {
            state,
            base,
            direction,
            target,
            through_target,
            cubic,
        } => der(universe, state, base, direction, target, *through_target, *cubic, max)?,
        Command::Cusp {
            state,
            base,
            directions,
        } => cusp(universe, state, base, directions, max)?,
        Command::Gencat { op: GencatOp::Check } => gencat_check(universe, max)?,
        Command::Lift { state_map, operator } => lift(universe, state_map, operator, max)?,
        Command::Strings { op } => (strings_op(universe, op)?, Vec::new()),
    };
    Ok(Report {
        command: serde_json::to_value(command).expect("command serializes"),
        input_digest: crate::report::digest(bytes),
        result,
        violations,
        timing_ms: None,
    })
}

type Outcome = (Value, Vec<Value>);

fn validate(u: &UniverseFile, max: usize) -> Result<Outcome, CliError> {
    let mut violations = Vec::new();
    let mut summary = serde_json::Map::new();
    if u.category.is_some() {
        let cat = resolve::category(u, max)?;
        violations.extend(cat.validate().iter().map(|v| tag("category", v)));
        let functors = resolve::functors(u, &cat)?;
        for (name, f) in &functors {
            violations.extend(f.check().iter().map(|v| tag(&format!("functor {name}"), v)));
        }
        let transformations = resolve::transformations(u, &functors)?;
        for (name, t) in &transformations {
            violations.extend(t.check().iter().map(|v| tag(&format!("transformation {name}"), v)));
        }
        summary.insert("objects".into(), json!(cat.object_count()));
        summary.insert("morphisms".into(), json!(cat.morphism_count()));
        summary.insert("functors".into(), json!(functors.len()));
        summary.insert("transformations".into(), json!(transformations.len()));
        if !u.basis.is_empty() {
            let bk = resolve::braket(u, &functors, &transformations)?;
            for (name, m) in &bk.mutations {
                for (n, report) in m.check().into_iter().enumerate() {
                    violations.extend(report.iter().map(|v| tag(&format!("mutation {name} at {n}"), v)));
                }
            }
            summary.insert("basis".into(), json!(bk.basis.len()));
        }
        if violations.is_empty() {
            if u.tower.is_some() {
                let t = resolve::tower(u, &cat, max)?;
                summary.insert("tower_depth".into(), json!(t.depth()));
            }
            if !u.psi_endos.states.is_empty() {
                let d = resolve::delta(u, &cat, max)?;
                for psi in &d.states {
                    let report = tangent::check_psi(&d.end, psi)?;
                    violations.extend(report.iter().map(|v| tag(&format!("psi {}", psi.name()), v)));
                }
                summary.insert("psi_endos".into(), json!(d.states.len()));
            }
            if !u.amalgams.morphisms.is_empty() {
                summary.insert("cubes".into(), json!(resolve::cubes(u, &cat)?.len()));
            }
        }
    }
    if !u.stacks.is_empty() || !u.state_actions.is_empty() {
        let s = resolve::stacks(u)?;
        resolve::stack_states(u, &s)?;
        summary.insert("stacks".into(), json!(s.stacks.len()));
    }
    if !u.laws.is_empty() {
        resolve::law_universe(u).validate()?;
        summary.insert("laws".into(), json!(u.laws.len()));
    }
    for name in u.stack_actions.keys() {
        resolve::stack_action(u, name)?;
    }
    Ok((Value::Object(summary), violations))
}

fn end_json(end: &EndCategory) -> Value {
    let cat = end.category();
    let base = end.base();
    let functors: BTreeMap<String, Vec<String>> = cat
        .objects()
        .map(|x| {
            (
                cat.object_name(x).to_string(),
                obj_names(base, end.functor(x).object_map()),
            )
        })
        .collect();
    json!({
        "objects": cat.object_names(),
        "morphisms": cat.morphisms().map(|m| cat.morphism_name(m)).collect::<Vec<_>>(),
        "object_count": cat.object_count(),
        "morphism_count": cat.morphism_count(),
        "object_maps": functors,
    })
}

fn end(u: &UniverseFile, closure: bool, max: usize) -> Result<Outcome, CliError> {
    let cat = resolve::category(u, max)?;
    let functors = resolve::functors(u, &cat)?;
    let named: Vec<_> = functors
        .values()
        .map(|f| (**f).clone())
        .filter(|f| f.name() != "id")
        .collect();
    let end = if closure {
        EndCategory::build(cat.clone(), Some(&named), max)?
    } else {
        EndCategory::build(cat.clone(), None, max)?.with_names(&named)?
    };
    let violations = end.category().validate().iter().map(|v| tag("end", v)).collect();
    Ok((end_json(&end), violations))
}

fn flow(u: &UniverseFile, start: &str, steps: usize, depth: Option<usize>, max: usize) -> Result<Outcome, CliError> {
    let cat = resolve::category(u, max)?;
    let mut tower = resolve::tower(u, &cat, max)?;
    if let Some(d) = depth {
        if d == 0 || d > tower.depth() {
            return Err(CliError::Input(format!("depth {d} is outside 1..={}", tower.depth())));
        }
        let levels = (1..=d).map(|m| tower.level(m).clone()).collect();
        tower = StateTower::new(cat.clone(), levels, tower.seeds()[..d].to_vec())?;
    }
    let x = obj(&cat, start, "flow --start")?;
    let result = tower.discrete_flow(x, steps)?;
    let verdict = match result.verdict {
        Verdict::Fixed { object, start } => {
            json!({"kind": "fixed", "object": cat.object_name(object), "start": start})
        }
        Verdict::Cycle { start, period } => json!({"kind": "cycle", "start": start, "period": period}),
        Verdict::Inconclusive => json!({"kind": "inconclusive"}),
    };
    let limit = match result.limit() {
        Ok(FlowLimit::Limit { object }) => json!({"kind": "limit", "object": cat.object_name(object)}),
        Ok(FlowLimit::Absent { cycle, .. }) => json!({"kind": "absent", "cycle": obj_names(&cat, &cycle)}),
        Err(_) => Value::Null,
    };
    let mut evolution = tower.evolution();
    let mut states = Vec::new();
    for n in 0..result.steps_used {
        let s = evolution.state(n, 1)?;
        states.push(tower.level(1).category().object_name(s).to_string());
    }
    Ok((
        json!({
            "trajectory": obj_names(&cat, &result.trajectory),
            "states": states,
            "verdict": verdict,
            "limit": limit,
            "steps_used": result.steps_used,
        }),
        Vec::new(),
    ))
}

fn restrict(all: &BTreeSet<String>, chosen: &[String], section: &'static str) -> Result<BTreeSet<String>, CliError> {
    if chosen.is_empty() {
        return Ok(all.clone());
    }
    chosen
        .iter()
        .map(|s| {
            if all.contains(s) {
                Ok(s.clone())
            } else {
                Err(CliError::dangling(section, s.clone()))
            }
        })
        .collect()
}

fn matrix_json(m: &DifferentialMatrix) -> Value {
    json!({"rows": m.rows, "columns": m.columns, "entries": m.entries, "nontrivial": !m.is_zero()})
}

fn realizations(s: &resolve::Stacks, set_mode: bool) -> RealizationTable {
    let mode = if set_mode { DeltaMode::Set } else { DeltaMode::Multiset };
    s.realizations.clone().with_mode(mode)
}

fn dmatrix(
    u: &UniverseFile,
    state: &str,
    stacks: &[String],
    laws: &[String],
    set_mode: bool,
) -> Result<Outcome, CliError> {
    let s = resolve::stacks(u)?;
    let states = resolve::stack_states(u, &s)?;
    let psi = states
        .get(state)
        .ok_or_else(|| CliError::dangling("state_actions", state))?;
    let rows = restrict(&s.stacks, stacks, "stacks")?;
    let cols = restrict(&s.laws, laws, "laws")?;
    let m = cwdist::differential_matrix(psi, &s.table, &rows, &cols, &realizations(&s, set_mode))?;
    Ok((matrix_json(&m), Vec::new()))
}

fn quantum(u: &UniverseFile, stacks: &[String], laws: &[String], set_mode: bool) -> Result<Outcome, CliError> {
    let s = resolve::stacks(u)?;
    let states = resolve::stack_states(u, &s)?;
    let rows = restrict(&s.stacks, stacks, "stacks")?;
    let cols = restrict(&s.laws, laws, "laws")?;
    let r = realizations(&s, set_mode);
    let found = cwdist::quantum_scan(&states, &s.table, &rows, &cols, &r)?;
    let mut matrices = BTreeMap::new();
    for (name, psi) in &states {
        matrices.insert(
            name.clone(),
            cwdist::differential_matrix(psi, &s.table, &rows, &cols, &r)?.entries,
        );
    }
    Ok((json!({"quantum": found, "matrices": matrices}), Vec::new()))
}

fn psi_named<'a>(d: &'a resolve::Delta, name: &str) -> Result<&'a tangent::PsiEndo, CliError> {
    d.states
        .iter()
        .find(|p| p.name() == name)
        .ok_or_else(|| CliError::dangling("psi_endos", name))
}

fn square_name(cat: &FinCategory, s: &Square) -> String {
    format!("{};{}", cat.morphism_name(s.alpha), cat.morphism_name(s.beta))
}

#[allow(clippy::too_many_arguments)]
fn der(
    u: &UniverseFile,
    state: &str,
    base: &str,
    direction: &str,
    target: &str,
    through_target: bool,
    cubic: bool,
    max: usize,
) -> Result<Outcome, CliError> {
    let cat = resolve::category(u, max)?;
    let d = resolve::delta(u, &cat, max)?;
    let psi = psi_named(&d, state)?;
    let dcat = d.end.category().clone();
    let (a, m, b) = (
        obj(&dcat, base, "der --base")?,
        obj(&dcat, direction, "der --direction")?,
        obj(&dcat, target, "der --target")?,
    );
    let factorization = if through_target {
        Factorization::ThroughTarget
    } else {
        Factorization::ThroughIdentity
    };
    let set = tangent::der_set(&d.end, psi, a, m, b, max, factorization)?;
    let squares: Vec<Vec<String>> = set
        .squares
        .iter()
        .map(|s| s.iter().map(|sq| square_name(&dcat, sq)).collect())
        .collect();
    let collections: Vec<Vec<Vec<String>>> = set
        .full_collections
        .iter()
        .map(|fam| {
            fam.iter()
                .map(|s| s.iter().map(|sq| square_name(&dcat, sq)).collect())
                .collect()
        })
        .collect();
    let mut result = json!({
        "deformed": dcat.object_name(set.deformed),
        "lambdas": set.lambdas.iter().map(|&l| dcat.morphism_name(l)).collect::<Vec<_>>(),
        "squares": squares,
        "count": set.count.to_string(),
        "full_collections": collections,
    });
    if cubic {
        let cube = match tangent::der_cubic(&d.end, psi, a, m, b, factorization) {
            Ok(c) => c,
            Err(tangent::TangentError::EmptyEntry(i)) => {
                result["cube"] = json!({"rejected": format!("no squares for lambda {i}")});
                return Ok((result, Vec::new()));
            }
            Err(e) => return Err(e.into()),
        };
        let back = tangent::truncate_cubic(&cube, max)?;
        let expected: BTreeSet<_> = set.full_collections.iter().cloned().collect();
        result["cube"] = json!({
            "cells": cube.cube.as_ref().map_or(0, gencat::GenMorphism::cell_count),
            "round_trip": back == expected,
        });
    }
    Ok((result, Vec::new()))
}

fn cusp(u: &UniverseFile, state: &str, base: &str, directions: &[String], max: usize) -> Result<Outcome, CliError> {
    let cat = resolve::category(u, max)?;
    let d = resolve::delta(u, &cat, max)?;
    let dcat = d.end.category().clone();
    let eps = obj(&dcat, base, "cusp --base")?;
    let dirs: Vec<Obj> = if directions.is_empty() {
        dcat.objects().collect()
    } else {
        directions
            .iter()
            .map(|m| obj(&dcat, m, "cusp --direction"))
            .collect::<Result<_, _>>()?
    };
    let members = tangent::cusp(&d.end, state, eps, &d.states, &dirs)?;
    Ok((
        json!({"cusp": members, "directions": obj_names(&dcat, &dirs)}),
        Vec::new(),
    ))
}

fn gencat_check(u: &UniverseFile, max: usize) -> Result<Outcome, CliError> {
    let cat = resolve::category(u, max)?;
    let cubes = resolve::cubes(u, &cat)?;
    let functors = resolve::functors(u, &cat)?;
    let lawful: Vec<_> = functors
        .values()
        .filter(|f| f.check().is_empty())
        .map(|f| (**f).clone())
        .collect();
    let violations = gencat::check_laws(&cubes, &lawful)?
        .iter()
        .map(|v| serde_json::to_value(v).expect("violation serializes"))
        .collect();
    let cells: BTreeMap<&str, usize> = cubes.iter().map(|(n, c)| (n.as_str(), c.cell_count())).collect();
    Ok((json!({"cubes": cells, "functors": lawful.len()}), violations))
}

fn lift(u: &UniverseFile, state_map: &str, operator: &str, max: usize) -> Result<Outcome, CliError> {
    let cat = resolve::category(u, max)?;
    let functors = resolve::functors(u, &cat)?;
    let transformations = resolve::transformations(u, &functors)?;
    let bk = resolve::braket(u, &functors, &transformations)?;
    let map = bk
        .state_maps
        .get(state_map)
        .ok_or_else(|| CliError::dangling("state_maps", state_map))?;
    let op = bk
        .operators
        .get(operator)
        .ok_or_else(|| CliError::dangling("operators", operator))?;
    Ok((json!({"lift": map.lift(op)?}), Vec::new()))
}

fn node(text: &str) -> Result<Node, CliError> {
    let (law, element) = text
        .split_once(':')
        .ok_or_else(|| CliError::Input(format!("node `{text}` is not written law:element")))?;
    Ok(Node::new(law, element))
}

fn edge_json(e: &Edge) -> Value {
    json!({"id": e.id, "ends": [e.ends.0.to_string(), e.ends.1.to_string()], "closed": e.is_closed()})
}

fn pushed_json(p: &PushedString) -> Value {
    let end = |q: &strings::Point| format!("{}:{}", q.carrier, q.vertex);
    json!({"via": p.via, "ends": [end(&p.ends.0), end(&p.ends.1)], "closed": p.is_closed()})
}

fn classes_json(g: &StringGraph) -> Value {
    let classes: Vec<Vec<String>> = g
        .classes()
        .iter()
        .map(|c| c.iter().map(ToString::to_string).collect())
        .collect();
    json!(classes)
}

fn strings_op(u: &UniverseFile, op: &StringsOp) -> Result<Value, CliError> {
    let mut g = StringGraph::build(&resolve::law_universe(u))?;
    Ok(match op {
        StringsOp::Build => json!({
            "edges": g.edges().iter().map(edge_json).collect::<Vec<_>>(),
            "classes": classes_json(&g),
        }),
        StringsOp::Join { first, second } => {
            let before = g.classes();
            let id = g.join(first, second)?;
            json!({"string": edge_json(&g.edge(&id)?), "partition_unchanged": before == g.classes()})
        }
        StringsOp::Split { string, node: at } => {
            let before = g.classes();
            let (l, r) = g.split(string, &node(at)?)?;
            json!({
                "strings": [edge_json(&g.edge(&l)?), edge_json(&g.edge(&r)?)],
                "partition_unchanged": before == g.classes(),
            })
        }
        StringsOp::Push { stack, string } => {
            let f = resolve::stack_action(u, stack)?;
            json!({"pushed": pushed_json(&strings::push_string(&f, &g.edge(string)?)?)})
        }
        StringsOp::Shift { state, stack, string } => {
            let f = resolve::stack_action(u, stack)?;
            let z = resolve::state_action(u, state)?;
            let pushed = strings::push_string(&f, &g.edge(string)?)?;
            json!({
                "pushed": pushed_json(&pushed),
                "shifted": pushed_json(&strings::shift_string(&z, &pushed)?),
            })
        }
    })
}
