//! Strings between elements of laws.
//!
//! An equivalence `A ≃ A'` identifies elements `a ∈ A_0` with `a' ∈ A'_0`;
//! each identified pair is an open string `a ~ a'` and every element carries
//! a closed string `a ~ a`. Strings can be joined and split, pushed along a
//! stack into its carrier simplicial sets, and moved by states.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StringError {
    #[error("duplicate law `{0}`")]
    DuplicateLaw(String),
    #[error("unknown law `{0}`")]
    UnknownLaw(String),
    #[error("`{element}` is not an element of `{law}`")]
    UnknownElement { law: String, element: String },
    #[error("duplicate equivalence `{0}`")]
    DuplicateEquivalence(String),
    #[error("equivalence `{id}` is not injective at `{element}`")]
    NotInjective { id: String, element: String },
    #[error("unknown string `{0}`")]
    UnknownString(String),
    #[error("strings `{0}` and `{1}` share no endpoint")]
    NotAdjacent(String, String),
    #[error("cannot split `{string}` at `{node}`: it is tied to neither end")]
    Split { string: String, node: String },
    #[error("`{action}` has no action on `{at}`")]
    MissingAction { action: String, at: String },
}

/// An element `a` of a law `A`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Node {
    pub law: String,
    pub element: String,
}

impl Node {
    pub fn new(law: impl Into<String>, element: impl Into<String>) -> Self {
        Node {
            law: law.into(),
            element: element.into(),
        }
    }
}

impl std::fmt::Display for Node {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.law, self.element)
    }
}

/// `A ≃ A'` with the identification of elements it induces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Equivalence {
    pub id: String,
    pub from: String,
    pub to: String,
    pub pairs: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LawUniverse {
    pub laws: BTreeMap<String, BTreeSet<String>>,
    pub equivalences: Vec<Equivalence>,
}

impl LawUniverse {
    pub fn validate(&self) -> Result<(), StringError> {
        let mut ids = BTreeSet::new();
        for eq in &self.equivalences {
            if !ids.insert(&eq.id) {
                return Err(StringError::DuplicateEquivalence(eq.id.clone()));
            }
            let from = self.law(&eq.from)?;
            let to = self.law(&eq.to)?;
            let (mut left, mut right) = (BTreeSet::new(), BTreeSet::new());
            for (a, b) in &eq.pairs {
                for (law, set, x) in [(&eq.from, from, a), (&eq.to, to, b)] {
                    if !set.contains(x) {
                        return Err(StringError::UnknownElement {
                            law: law.clone(),
                            element: x.clone(),
                        });
                    }
                }
                if !left.insert(a) {
                    return Err(StringError::NotInjective {
                        id: eq.id.clone(),
                        element: a.clone(),
                    });
                }
                if !right.insert(b) {
                    return Err(StringError::NotInjective {
                        id: eq.id.clone(),
                        element: b.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    fn law(&self, id: &str) -> Result<&BTreeSet<String>, StringError> {
        self.laws.get(id).ok_or_else(|| StringError::UnknownLaw(id.to_string()))
    }
}

/// An undirected string between two nodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub id: String,
    pub ends: (Node, Node),
}

impl Edge {
    pub fn is_closed(&self) -> bool {
        self.ends.0 == self.ends.1
    }
}

#[derive(Debug, Clone)]
pub struct StringGraph {
    nodes: Vec<Node>,
    node_index: HashMap<Node, usize>,
    edges: Vec<(String, usize, usize)>,
    edge_index: HashMap<String, usize>,
    by_ends: HashMap<(usize, usize), usize>,
    closure: UnionFind<usize>,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

fn end<T>(x: &(T, T), k: usize) -> &T {
    if k == 0 {
        &x.0
    } else {
        &x.1
    }
}

/// The first `(k, l)` in a fixed order with end `k` of `x` equal to end `l`
/// of `y`.
fn junction<T: PartialEq>(x: &(T, T), y: &(T, T)) -> Option<(usize, usize)> {
    [(1, 0), (1, 1), (0, 0), (0, 1)]
        .into_iter()
        .find(|&(k, l)| end(x, k) == end(y, l))
}

impl StringGraph {
    /// One closed string per element, one open string per identified pair.
    pub fn build(universe: &LawUniverse) -> Result<Self, StringError> {
        universe.validate()?;
        let nodes: Vec<Node> = universe
            .laws
            .iter()
            .flat_map(|(law, elements)| elements.iter().map(move |e| Node::new(law.clone(), e.clone())))
            .collect();
        let node_index = nodes.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let mut graph = StringGraph {
            closure: UnionFind::new(nodes.len()),
            nodes,
            node_index,
            edges: Vec::new(),
            edge_index: HashMap::new(),
            by_ends: HashMap::new(),
        };
        for i in 0..graph.nodes.len() {
            let id = format!("loop:{}", graph.nodes[i]);
            graph.add_edge(id, i, i);
        }
        for eq in &universe.equivalences {
            for (a, b) in &eq.pairs {
                let x = graph.node_index[&Node::new(eq.from.clone(), a.clone())];
                let y = graph.node_index[&Node::new(eq.to.clone(), b.clone())];
                graph.add_edge(format!("{}:{}", eq.id, a), x, y);
            }
        }
        Ok(graph)
    }

    fn add_edge(&mut self, id: String, a: usize, b: usize) -> String {
        if let Some(&e) = self.by_ends.get(&key(a, b)) {
            return self.edges[e].0.clone();
        }
        let e = self.edges.len();
        self.edge_index.insert(id.clone(), e);
        self.by_ends.insert(key(a, b), e);
        self.edges.push((id.clone(), a, b));
        self.closure.union(a, b);
        id
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> Vec<Edge> {
        self.edges
            .iter()
            .map(|(id, a, b)| Edge {
                id: id.clone(),
                ends: (self.nodes[*a].clone(), self.nodes[*b].clone()),
            })
            .collect()
    }

    pub fn edge(&self, id: &str) -> Result<Edge, StringError> {
        let &(ref id, a, b) = self.raw(id)?;
        Ok(Edge {
            id: id.clone(),
            ends: (self.nodes[a].clone(), self.nodes[b].clone()),
        })
    }

    fn raw(&self, id: &str) -> Result<&(String, usize, usize), StringError> {
        self.edge_index
            .get(id)
            .map(|&e| &self.edges[e])
            .ok_or_else(|| StringError::UnknownString(id.to_string()))
    }

    fn node(&self, n: &Node) -> Result<usize, StringError> {
        self.node_index
            .get(n)
            .copied()
            .ok_or_else(|| StringError::UnknownElement {
                law: n.law.clone(),
                element: n.element.clone(),
            })
    }

    /// Is there a chain of strings from `a` to `b`?
    pub fn connected(&self, a: &Node, b: &Node) -> Result<bool, StringError> {
        Ok(self.closure.equiv(self.node(a)?, self.node(b)?))
    }

    /// The classes of the string relation.
    pub fn classes(&self) -> BTreeSet<BTreeSet<Node>> {
        let mut groups: BTreeMap<usize, BTreeSet<Node>> = BTreeMap::new();
        for (i, n) in self.nodes.iter().enumerate() {
            groups.entry(self.closure.find(i)).or_default().insert(n.clone());
        }
        groups.into_values().collect()
    }

    /// `a ~ b` and `b ~ c` give `a ~ c`; returns its id.
    pub fn join(&mut self, first: &str, second: &str) -> Result<String, StringError> {
        let &(_, a1, b1) = self.raw(first)?;
        let &(_, a2, b2) = self.raw(second)?;
        let (x, y) = ((a1, b1), (a2, b2));
        let (k, l) = junction(&x, &y).ok_or_else(|| StringError::NotAdjacent(first.to_string(), second.to_string()))?;
        Ok(self.add_edge(format!("{first}+{second}"), *end(&x, 1 - k), *end(&y, 1 - l)))
    }

    /// `a ~ c` gives `a ~ b` and `b ~ c`, provided `b` is tied to `a` or `c`.
    pub fn split(&mut self, string: &str, at: &Node) -> Result<(String, String), StringError> {
        let &(_, a, c) = self.raw(string)?;
        let b = self.node(at)?;
        if !self.closure.equiv(a, b) && !self.closure.equiv(c, b) {
            return Err(StringError::Split {
                string: string.to_string(),
                node: at.to_string(),
            });
        }
        let left = self.add_edge(format!("{string}/{at}/0"), a, b);
        let right = self.add_edge(format!("{string}/{at}/1"), b, c);
        Ok((left, right))
    }
}

/// A vertex of a carrier simplicial set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    pub carrier: String,
    pub vertex: String,
}

/// Elementwise action of a stack: law `A` goes to carrier `FA`, and each
/// element `a` to a vertex `Fa`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StackAction {
    pub name: String,
    pub laws: BTreeMap<String, (String, BTreeMap<String, String>)>,
}

impl StackAction {
    pub fn apply(&self, n: &Node) -> Result<Point, StringError> {
        let missing = || StringError::MissingAction {
            action: self.name.clone(),
            at: n.to_string(),
        };
        let (carrier, elements) = self.laws.get(&n.law).ok_or_else(missing)?;
        let vertex = elements.get(&n.element).ok_or_else(missing)?;
        Ok(Point {
            carrier: carrier.clone(),
            vertex: vertex.clone(),
        })
    }
}

/// `Fa ~ Fa'`, remembering the string it came from and its ends `a ~ a'`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PushedString {
    pub via: String,
    pub over: (Node, Node),
    pub ends: (Point, Point),
}

impl PushedString {
    pub fn is_closed(&self) -> bool {
        self.ends.0 == self.ends.1
    }

    /// Join of pushed strings. The shared end is taken from the underlying
    /// strings when they meet; a stack that merges points can make several
    /// ends coincide.
    pub fn join(&self, other: &PushedString) -> Result<PushedString, StringError> {
        let (k, l) = junction(&self.over, &other.over)
            .filter(|&(k, l)| end(&self.ends, k) == end(&other.ends, l))
            .or_else(|| junction(&self.ends, &other.ends))
            .ok_or_else(|| StringError::NotAdjacent(self.via.clone(), other.via.clone()))?;
        Ok(PushedString {
            via: format!("{}+{}", self.via, other.via),
            over: (end(&self.over, 1 - k).clone(), end(&other.over, 1 - l).clone()),
            ends: (end(&self.ends, 1 - k).clone(), end(&other.ends, 1 - l).clone()),
        })
    }
}

pub fn push_string(stack: &StackAction, edge: &Edge) -> Result<PushedString, StringError> {
    Ok(PushedString {
        via: format!("{}({})", stack.name, edge.id),
        over: edge.ends.clone(),
        ends: (stack.apply(&edge.ends.0)?, stack.apply(&edge.ends.1)?),
    })
}

/// Elementwise action of a state on carriers: carrier `c` goes to `ζc`, each
/// vertex along with it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateAction {
    pub name: String,
    pub carriers: BTreeMap<String, (String, BTreeMap<String, String>)>,
}

impl StateAction {
    pub fn identity_on(carriers: &BTreeMap<String, BTreeSet<String>>) -> Self {
        StateAction {
            name: "id".into(),
            carriers: carriers
                .iter()
                .map(|(c, vs)| {
                    (
                        c.clone(),
                        (c.clone(), vs.iter().map(|v| (v.clone(), v.clone())).collect()),
                    )
                })
                .collect(),
        }
    }

    pub fn apply(&self, p: &Point) -> Result<Point, StringError> {
        let missing = || StringError::MissingAction {
            action: self.name.clone(),
            at: format!("{}:{}", p.carrier, p.vertex),
        };
        let (carrier, vertices) = self.carriers.get(&p.carrier).ok_or_else(missing)?;
        let vertex = vertices.get(&p.vertex).ok_or_else(missing)?;
        Ok(Point {
            carrier: carrier.clone(),
            vertex: vertex.clone(),
        })
    }

    /// `self` then `next`, defined wherever both steps are.
    pub fn then(&self, next: &StateAction) -> StateAction {
        let mut carriers = BTreeMap::new();
        for (c, (c1, vs)) in &self.carriers {
            let Some((c2, ws)) = next.carriers.get(c1) else {
                continue;
            };
            let composite = vs
                .iter()
                .filter_map(|(v, v1)| ws.get(v1).map(|v2| (v.clone(), v2.clone())))
                .collect();
            carriers.insert(c.clone(), (c2.clone(), composite));
        }
        StateAction {
            name: format!("{}*{}", next.name, self.name),
            carriers,
        }
    }
}

/// `ζFa ~ ζFa'`.
pub fn shift_string(state: &StateAction, s: &PushedString) -> Result<PushedString, StringError> {
    Ok(PushedString {
        via: format!("{}({})", state.name, s.via),
        over: s.over.clone(),
        ends: (state.apply(&s.ends.0)?, state.apply(&s.ends.1)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn universe() -> LawUniverse {
        let mut laws = BTreeMap::new();
        laws.insert("A".to_string(), ["a", "b"].iter().map(|s| s.to_string()).collect());
        laws.insert("B".to_string(), ["x", "y"].iter().map(|s| s.to_string()).collect());
        laws.insert("C".to_string(), ["p"].iter().map(|s| s.to_string()).collect());
        LawUniverse {
            laws,
            equivalences: vec![
                Equivalence {
                    id: "e".into(),
                    from: "A".into(),
                    to: "B".into(),
                    pairs: vec![("a".into(), "x".into())],
                },
                Equivalence {
                    id: "f".into(),
                    from: "B".into(),
                    to: "C".into(),
                    pairs: vec![("x".into(), "p".into())],
                },
            ],
        }
    }

    #[test]
    fn closed_strings_only() {
        let mut u = universe();
        u.equivalences.clear();
        let g = StringGraph::build(&u).unwrap();
        assert_eq!(g.edges().len(), 5);
        assert!(g.edges().iter().all(Edge::is_closed));
        assert_eq!(g.classes().len(), 5);
    }

    #[test]
    fn open_strings_and_join() {
        let mut g = StringGraph::build(&universe()).unwrap();
        assert_eq!(g.edges().len(), 7);
        let before = g.classes();
        let id = g.join("e:a", "f:x").unwrap();
        assert_eq!(g.edge(&id).unwrap().ends, (Node::new("A", "a"), Node::new("C", "p")));
        assert_eq!(g.join("e:a", "f:x").unwrap(), id);
        assert_eq!(g.classes(), before);
        assert!(matches!(g.join("e:a", "loop:A:b"), Err(StringError::NotAdjacent(..))));
        assert_eq!(g.join("loop:A:a", "loop:A:a").unwrap(), "loop:A:a");
    }

    #[test]
    fn split_side_condition() {
        let mut g = StringGraph::build(&universe()).unwrap();
        let ac = g.join("e:a", "f:x").unwrap();
        let (l, r) = g.split(&ac, &Node::new("B", "x")).unwrap();
        assert_eq!(l, "e:a");
        assert_eq!(r, "f:x");
        let err = g.split(&ac, &Node::new("A", "b")).unwrap_err();
        assert_eq!(
            err.to_string(),
            format!("cannot split `{ac}` at `A:b`: it is tied to neither end")
        );
        let (l, r) = g.split("loop:A:a", &Node::new("A", "a")).unwrap();
        assert_eq!((l.as_str(), r.as_str()), ("loop:A:a", "loop:A:a"));
    }

    #[test]
    fn invalid_universe() {
        let mut u = universe();
        u.equivalences[0].pairs.push(("b".into(), "x".into()));
        assert!(matches!(StringGraph::build(&u), Err(StringError::NotInjective { .. })));
        let mut u = universe();
        u.equivalences[0].pairs[0].1 = "zz".into();
        assert!(matches!(
            StringGraph::build(&u),
            Err(StringError::UnknownElement { .. })
        ));
    }

    fn stack() -> StackAction {
        let mut laws = BTreeMap::new();
        laws.insert(
            "A".into(),
            ("XA".into(), [("a".into(), "0".into()), ("b".into(), "1".into())].into()),
        );
        laws.insert(
            "B".into(),
            ("XB".into(), [("x".into(), "0".into()), ("y".into(), "1".into())].into()),
        );
        laws.insert("C".into(), ("XC".into(), [("p".into(), "0".into())].into()));
        StackAction { name: "F".into(), laws }
    }

    #[test]
    fn push_commutes_with_join() {
        let mut g = StringGraph::build(&universe()).unwrap();
        let f = stack();
        let joined = g.join("e:a", "f:x").unwrap();
        let lhs = push_string(&f, &g.edge(&joined).unwrap()).unwrap();
        let rhs = push_string(&f, &g.edge("e:a").unwrap())
            .unwrap()
            .join(&push_string(&f, &g.edge("f:x").unwrap()).unwrap())
            .unwrap();
        assert_eq!(lhs.ends, rhs.ends);
        assert!(push_string(&f, &g.edge("loop:A:b").unwrap()).unwrap().is_closed());
    }

    #[test]
    fn shifts_compose() {
        let g = StringGraph::build(&universe()).unwrap();
        let s = push_string(&stack(), &g.edge("e:a").unwrap()).unwrap();
        let zeta = StateAction {
            name: "z".into(),
            carriers: [
                ("XA".into(), ("XB".into(), [("0".into(), "1".into())].into())),
                ("XB".into(), ("XA".into(), [("0".into(), "0".into())].into())),
            ]
            .into(),
        };
        let phi = StateAction {
            name: "p".into(),
            carriers: [
                ("XA".into(), ("XA".into(), [("0".into(), "0".into())].into())),
                ("XB".into(), ("XB".into(), [("1".into(), "0".into())].into())),
            ]
            .into(),
        };
        let two = shift_string(&phi, &shift_string(&zeta, &s).unwrap()).unwrap();
        let one = shift_string(&zeta.then(&phi), &s).unwrap();
        assert_eq!(two.ends, one.ends);
        let carriers: BTreeMap<String, BTreeSet<String>> = [
            ("XA".to_string(), ["0".to_string()].into()),
            ("XB".to_string(), ["0".to_string()].into()),
        ]
        .into();
        assert_eq!(
            shift_string(&StateAction::identity_on(&carriers), &s).unwrap().ends,
            s.ends
        );
    }
}
