//! Towers of higher states and the discrete flows they drive.
//!
//! Level 1 holds states, i.e. endofunctors of the base category `X`; level
//! `m + 1` holds endofunctors of level `m`. Writing `ψ(n, m)` for the state at
//! step `n` on level `m`, the seeds are `ψ(0, m)` and
//!
//! ```text
//! ψ(n + 1, m) = ψ(n, m + 1) applied to ψ(n, m)
//! ```
//!
//! The top level has nothing above it and keeps its seed. A flow moves an
//! object `F` of `X` by `ψ(0, 1)`, then `ψ(1, 1)`, and so on.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::fincat::{EndCategory, FinCategory, Obj, ValidationReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TowerError {
    #[error("a tower needs at least one level")]
    Empty,
    #[error("level {level} is not built over level {below}")]
    LevelMismatch { level: usize, below: usize },
    #[error("level {level} is not a category ({} violations)", report.len())]
    InvalidLevel { level: usize, report: ValidationReport },
    #[error("expected {expected} seeds, got {got}")]
    SeedCount { expected: usize, got: usize },
    #[error("seed at level {level} is not an object of that level")]
    SeedOutOfRange { level: usize },
    #[error("seed at level {level} is not a functor on level {below}")]
    SeedNotFunctor { level: usize, below: usize },
    #[error("no level above {m} in a tower of depth {depth}")]
    DepthExhausted { m: usize, depth: usize },
    #[error("level {m} is outside 1..={depth}")]
    LevelOutOfRange { m: usize, depth: usize },
    #[error("object #{0} is not in the base category")]
    UnknownObject(usize),
    #[error("a flow needs at least one step")]
    NoSteps,
    #[error("flow ran {steps} steps without reaching a fixed point or cycle")]
    Undecided { steps: usize },
}

/// Seeds `ψ(0, m)` over a stack of endofunctor categories.
#[derive(Debug, Clone)]
pub struct StateTower {
    base: Arc<FinCategory>,
    levels: Vec<EndCategory>,
    seeds: Vec<Obj>,
}

impl StateTower {
    /// `levels[0]` is level 1 and must be built over `base`; each further
    /// level must be built over the category of the one below. `seeds[m - 1]`
    /// is `ψ(0, m)`.
    pub fn new(base: Arc<FinCategory>, levels: Vec<EndCategory>, seeds: Vec<Obj>) -> Result<Self, TowerError> {
        if levels.is_empty() {
            return Err(TowerError::Empty);
        }
        if seeds.len() != levels.len() {
            return Err(TowerError::SeedCount {
                expected: levels.len(),
                got: seeds.len(),
            });
        }
        for (i, level) in levels.iter().enumerate() {
            let below = if i == 0 { &base } else { levels[i - 1].category() };
            if !(Arc::ptr_eq(level.base(), below) || **level.base() == **below) {
                return Err(TowerError::LevelMismatch { level: i + 1, below: i });
            }
            let report = level.category().validate();
            if !report.is_empty() {
                return Err(TowerError::InvalidLevel { level: i + 1, report });
            }
            if seeds[i].0 >= level.category().object_count() {
                return Err(TowerError::SeedOutOfRange { level: i + 1 });
            }
            if !level.functor(seeds[i]).check().is_empty() {
                return Err(TowerError::SeedNotFunctor { level: i + 1, below: i });
            }
        }
        Ok(StateTower { base, levels, seeds })
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.base
    }

    /// Level `m`, counted from 1.
    pub fn level(&self, m: usize) -> &EndCategory {
        &self.levels[m - 1]
    }

    pub fn seeds(&self) -> &[Obj] {
        &self.seeds
    }

    fn advance(&self, column: &[Obj]) -> Vec<Obj> {
        let top = column.len() - 1;
        (0..column.len())
            .map(|i| {
                if i == top {
                    column[i]
                } else {
                    self.levels[i + 1].functor(column[i + 1]).object_map()[column[i].0]
                }
            })
            .collect()
    }

    /// `ψ(n + 1, m)`, for `1 ≤ m < depth`.
    pub fn next_state(&self, n: usize, m: usize) -> Result<Obj, TowerError> {
        if m == self.depth() {
            return Err(TowerError::DepthExhausted { m, depth: self.depth() });
        }
        self.evolution().next_state(n, m)
    }

    pub fn evolution(&self) -> Evolution<'_> {
        Evolution {
            tower: self,
            columns: vec![self.seeds.clone()],
        }
    }

    /// Moves `start` by `ψ(0, 1)`, `ψ(1, 1)`, … until the joint state of
    /// the object and the whole tower column repeats, or `max_steps` run out.
    pub fn discrete_flow(&self, start: Obj, max_steps: usize) -> Result<FlowResult, TowerError> {
        if start.0 >= self.base.object_count() {
            return Err(TowerError::UnknownObject(start.0));
        }
        if max_steps == 0 {
            return Err(TowerError::NoSteps);
        }
        let mut seen: HashMap<(Obj, Vec<Obj>), usize> = HashMap::new();
        let mut column = self.seeds.clone();
        let mut trajectory = vec![start];
        seen.insert((start, column.clone()), 0);
        for k in 0..max_steps {
            let x = self.levels[0].functor(column[0]).object_map()[trajectory[k].0];
            column = self.advance(&column);
            trajectory.push(x);
            if let Some(&first) = seen.get(&(x, column.clone())) {
                let verdict = settle(&trajectory, first, k + 1 - first);
                return Ok(FlowResult {
                    trajectory,
                    verdict,
                    steps_used: k + 1,
                });
            }
            seen.insert((x, column.clone()), k + 1);
        }
        Ok(FlowResult {
            trajectory,
            verdict: Verdict::Inconclusive,
            steps_used: max_steps,
        })
    }
}

/// Reads the object sequence given that the joint state is periodic from
/// index `start` with period `period`.
fn settle(trajectory: &[Obj], start: usize, period: usize) -> Verdict {
    let at = |i: usize| {
        if i <= start + period {
            trajectory[i]
        } else {
            trajectory[start + (i - start) % period]
        }
    };
    let minimal = (1..=period)
        .filter(|d| period % d == 0)
        .find(|&d| (start..start + period).all(|i| at(i) == at(i + d)))
        .unwrap_or(period);
    let mut first = start;
    while first > 0 && at(first - 1) == at(first - 1 + minimal) {
        first -= 1;
    }
    if minimal == 1 {
        Verdict::Fixed {
            object: at(first),
            start: first,
        }
    } else {
        Verdict::Cycle {
            start: first,
            period: minimal,
        }
    }
}

/// Memoized columns `ψ(n, ·)` of a tower.
#[derive(Debug, Clone)]
pub struct Evolution<'a> {
    tower: &'a StateTower,
    columns: Vec<Vec<Obj>>,
}

impl Evolution<'_> {
    /// `ψ(n, m)` for any `n` and `1 ≤ m ≤ depth`.
    pub fn state(&mut self, n: usize, m: usize) -> Result<Obj, TowerError> {
        let depth = self.tower.depth();
        if m == 0 || m > depth {
            return Err(TowerError::LevelOutOfRange { m, depth });
        }
        while self.columns.len() <= n {
            let next = self.tower.advance(self.columns.last().expect("seed column"));
            self.columns.push(next);
        }
        Ok(self.columns[n][m - 1])
    }

    /// `ψ(n + 1, m)`, for `1 ≤ m < depth`.
    pub fn next_state(&mut self, n: usize, m: usize) -> Result<Obj, TowerError> {
        let depth = self.tower.depth();
        if m == depth {
            return Err(TowerError::DepthExhausted { m, depth });
        }
        self.state(n + 1, m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    /// Constant from index `start` on.
    Fixed {
        object: Obj,
        start: usize,
    },
    Cycle {
        start: usize,
        period: usize,
    },
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlowResult {
    pub trajectory: Vec<Obj>,
    pub verdict: Verdict,
    pub steps_used: usize,
}

/// What a finished flow converges to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FlowLimit {
    Limit {
        object: Obj,
    },
    /// A genuine cycle has no sequential limit among the objects of `X`.
    Absent {
        start: usize,
        period: usize,
        cycle: Vec<Obj>,
    },
}

impl FlowResult {
    pub fn limit(&self) -> Result<FlowLimit, TowerError> {
        match self.verdict {
            Verdict::Fixed { object, .. } => Ok(FlowLimit::Limit { object }),
            Verdict::Cycle { start, period } => Ok(FlowLimit::Absent {
                start,
                period,
                cycle: self.trajectory[start..start + period].to_vec(),
            }),
            Verdict::Inconclusive => Err(TowerError::Undecided { steps: self.steps_used }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{FinFunctor, Mor, DEFAULT_MAX_ENTITIES};

    fn discrete(names: &[&str]) -> Arc<FinCategory> {
        Arc::new(FinCategory::discrete(names))
    }

    fn map_functor(name: &str, cat: &Arc<FinCategory>, images: &[usize]) -> FinFunctor {
        let objects: Vec<Obj> = images.iter().map(|&i| Obj(i)).collect();
        let morphisms: Vec<Mor> = objects.iter().map(|&x| cat.identity(x)).collect();
        FinFunctor::new(name, cat.clone(), cat.clone(), objects, morphisms).unwrap()
    }

    fn swap_tower() -> StateTower {
        let x = discrete(&["a", "b"]);
        let level1 = EndCategory::build(x.clone(), None, DEFAULT_MAX_ENTITIES).unwrap();
        let swap = level1.object_of(&map_functor("swap", &x, &[1, 0])).unwrap();
        let level2 = EndCategory::build(level1.category().clone(), Some(&[]), DEFAULT_MAX_ENTITIES).unwrap();
        let id2 = level2.identity_object();
        StateTower::new(x, vec![level1, level2], vec![swap, id2]).unwrap()
    }

    #[test]
    fn identity_seeds_give_constant_states_and_fixed_flows() {
        let x = discrete(&["a", "b", "c"]);
        let level1 = EndCategory::build(x.clone(), None, DEFAULT_MAX_ENTITIES).unwrap();
        let level2 = EndCategory::build(level1.category().clone(), Some(&[]), 10).unwrap();
        let seeds = vec![level1.identity_object(), level2.identity_object()];
        let tower = StateTower::new(x, vec![level1, level2], seeds).unwrap();
        for n in 0..5 {
            assert_eq!(tower.next_state(n, 1).unwrap(), tower.seeds()[0]);
        }
        for start in 0..3 {
            let flow = tower.discrete_flow(Obj(start), 10).unwrap();
            assert_eq!(
                flow.verdict,
                Verdict::Fixed {
                    object: Obj(start),
                    start: 0
                }
            );
            assert_eq!(flow.steps_used, 1);
            assert_eq!(flow.limit().unwrap(), FlowLimit::Limit { object: Obj(start) });
        }
    }

    #[test]
    fn swap_flow_is_a_two_cycle() {
        let tower = swap_tower();
        let flow = tower.discrete_flow(Obj(0), 10).unwrap();
        assert_eq!(flow.trajectory, vec![Obj(0), Obj(1), Obj(0)]);
        assert_eq!(flow.verdict, Verdict::Cycle { start: 0, period: 2 });
        assert_eq!(
            flow.limit().unwrap(),
            FlowLimit::Absent {
                start: 0,
                period: 2,
                cycle: vec![Obj(0), Obj(1)]
            }
        );
    }

    #[test]
    fn top_level_has_no_next_state() {
        let tower = swap_tower();
        assert_eq!(
            tower.next_state(0, 2),
            Err(TowerError::DepthExhausted { m: 2, depth: 2 })
        );
    }

    #[test]
    fn first_step_applies_level_two_seed() {
        // ψ(0,2) = "send every state to its square"; ψ(1,1) = ψ(0,2)(ψ(0,1)).
        let x = discrete(&["a", "b", "c"]);
        let rotate = map_functor("r", &x, &[1, 2, 0]);
        let level1 = EndCategory::build(x.clone(), Some(&[rotate]), 100).unwrap();
        let images: Vec<usize> = level1
            .category()
            .objects()
            .map(|s| level1.compose_objects(s, s).unwrap().0)
            .collect();
        let square = map_functor("sq", level1.category(), &images);
        let level2 = EndCategory::build(level1.category().clone(), Some(&[square]), 100).unwrap();
        let r = level1.category().object_id("r").unwrap();
        let sq = level2.category().object_id("sq").unwrap();
        let tower = StateTower::new(x, vec![level1, level2], vec![r, sq]).unwrap();
        let psi11 = tower.next_state(0, 1).unwrap();
        assert_eq!(tower.level(1).category().object_name(psi11), "r*r");
        // ψ(1,2) = ψ(0,2), so ψ(2,1) = (r∘r)∘(r∘r) = r.
        assert_eq!(tower.next_state(1, 1).unwrap(), r);
        let flow = tower.discrete_flow(Obj(0), 20).unwrap();
        // a -r-> b -r²-> a, and the column (r, sq) is back as well.
        assert_eq!(flow.trajectory, vec![Obj(0), Obj(1), Obj(0)]);
        assert_eq!(flow.verdict, Verdict::Cycle { start: 0, period: 2 });
    }

    #[test]
    fn single_seed_mode_iterates_one_state() {
        let x = discrete(&["a", "b", "c", "d"]);
        let psi = map_functor("p", &x, &[1, 2, 3, 2]);
        let level1 = EndCategory::build(x.clone(), Some(&[psi]), 100).unwrap();
        let p = level1.category().object_id("p").unwrap();
        let tower = StateTower::new(x, vec![level1], vec![p]).unwrap();
        let flow = tower.discrete_flow(Obj(0), 20).unwrap();
        assert_eq!(flow.trajectory, vec![Obj(0), Obj(1), Obj(2), Obj(3), Obj(2)]);
        assert_eq!(flow.verdict, Verdict::Cycle { start: 2, period: 2 });
    }

    #[test]
    fn out_of_steps_is_inconclusive() {
        let tower = swap_tower();
        let flow = tower.discrete_flow(Obj(0), 1).unwrap();
        assert_eq!(flow.verdict, Verdict::Inconclusive);
        assert_eq!(flow.limit(), Err(TowerError::Undecided { steps: 1 }));
    }
}
