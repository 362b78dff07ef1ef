//! Undirected multigraphs with darts, level graphs `A_n` / `B_n` and their
//! multi-dimensional versions, non-backtracking dart graphs, covering checks
//! and structural predicates.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::ffield::{FieldSpec, FqElem};
use crate::matrix::IntMatrix;
use crate::mealy::{dot_quote, product_act, LabeledGraph, Mealy, MealyError};
use crate::vhdatum::{build_quaternionic_datum, DatumError, VHDatum};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error(transparent)]
    Mealy(#[from] MealyError),
    #[error(transparent)]
    Datum(#[from] DatumError),
    #[error("level must be at least 1")]
    ZeroLevel,
    #[error("edge labels need an involution")]
    NoInvolution,
    #[error("edge {src} -{label}-> {dst} has no inverse edge")]
    MissingInverse {
        src: usize,
        label: usize,
        dst: usize,
    },
    #[error("graph is not regular")]
    Irregular,
    #[error("adjacency matrix must be square, symmetric, nonnegative and have even diagonal")]
    BadAdjacency,
    #[error("S0 must have at least two distinct elements and contain tau")]
    BadParameterSet,
    #[error("expected {expected} levels, got {got}")]
    LevelArity { expected: usize, got: usize },
    #[error("vertex {0:?} of the larger graph does not project to a vertex of the smaller one")]
    ShapeMismatch(Vec<usize>),
    #[error("malformed graph file at `{path}`: {message}")]
    Parse { path: String, message: String },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dart {
    pub origin: usize,
    pub terminus: usize,
    pub label: usize,
    pub inverse: usize,
}

/// Undirected multigraph stored as darts; each geometric edge is a pair of
/// mutually inverse darts and a loop contributes 2 to its vertex degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UGraph {
    pub vertex_names: Vec<String>,
    pub label_names: Vec<String>,
    pub darts: Vec<Dart>,
}

impl UGraph {
    /// Glues the edge `v -a-> u` with `u -a^-1-> v`.
    pub fn from_labeled(
        g: &LabeledGraph,
        inv_labels: &[usize],
        vertex_names: Vec<String>,
        label_names: Vec<String>,
    ) -> Result<Self, GraphError> {
        let by_key: HashMap<(usize, usize), usize> = g
            .edges
            .iter()
            .enumerate()
            .map(|(i, &(s, l, _))| ((s, l), i))
            .collect();
        let mut darts = Vec::with_capacity(g.edges.len());
        for &(s, l, t) in &g.edges {
            let inv = by_key
                .get(&(t, inv_labels[l]))
                .copied()
                .filter(|&j| g.edges[j].2 == s)
                .ok_or(GraphError::MissingInverse {
                    src: s,
                    label: l,
                    dst: t,
                })?;
            darts.push(Dart {
                origin: s,
                terminus: t,
                label: l,
                inverse: inv,
            });
        }
        Ok(UGraph {
            vertex_names,
            label_names,
            darts,
        })
    }

    /// Builds darts from a symmetric adjacency matrix (loops counted twice on
    /// the diagonal). Darts are labeled by their geometric edge.
    pub fn from_adjacency(a: &IntMatrix) -> Result<Self, GraphError> {
        if !a.is_symmetric() || a.entries().iter().any(|&x| x < 0) {
            return Err(GraphError::BadAdjacency);
        }
        let n = a.rows();
        let mut darts = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n {
            if a[(i, i)] % 2 != 0 {
                return Err(GraphError::BadAdjacency);
            }
            for j in i..n {
                let count = if i == j { a[(i, i)] / 2 } else { a[(i, j)] };
                for _ in 0..count {
                    let k = darts.len();
                    let e = labels.len();
                    labels.push(format!("e{e}"));
                    darts.push(Dart {
                        origin: i,
                        terminus: j,
                        label: e,
                        inverse: k + 1,
                    });
                    darts.push(Dart {
                        origin: j,
                        terminus: i,
                        label: e,
                        inverse: k,
                    });
                }
            }
        }
        Ok(UGraph {
            vertex_names: (0..n).map(|i| i.to_string()).collect(),
            label_names: labels,
            darts,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn n_edges(&self) -> usize {
        self.darts.len() / 2
    }

    pub fn adjacency(&self) -> IntMatrix {
        let n = self.n_vertices();
        let mut a = IntMatrix::zeros(n, n);
        for d in &self.darts {
            a[(d.origin, d.terminus)] += 1;
        }
        a
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n_vertices()];
        for d in &self.darts {
            deg[d.origin] += 1;
        }
        deg
    }

    pub fn regular_degree(&self) -> Option<usize> {
        let deg = self.degrees();
        let d = *deg.first()?;
        deg.iter().all(|&x| x == d).then_some(d)
    }

    fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n_vertices()];
        for d in &self.darts {
            adj[d.origin].push(d.terminus);
        }
        adj
    }

    /// Number of connected components.
    pub fn components(&self) -> usize {
        let adj = self.neighbors();
        let mut seen = vec![false; self.n_vertices()];
        let mut count = 0;
        for s in 0..self.n_vertices() {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &u in &adj[v] {
                    if !std::mem::replace(&mut seen[u], true) {
                        queue.push_back(u);
                    }
                }
            }
        }
        count
    }

    /// A closed walk of odd length (as a vertex sequence, first vertex
    /// repeated at the end), or `None` if the graph is bipartite.
    pub fn odd_cycle(&self) -> Option<Vec<usize>> {
        let adj = self.neighbors();
        let n = self.n_vertices();
        let mut parent = vec![usize::MAX; n];
        let mut depth = vec![usize::MAX; n];
        for s in 0..n {
            if depth[s] != usize::MAX {
                continue;
            }
            depth[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &u in &adj[v] {
                    if depth[u] == usize::MAX {
                        depth[u] = depth[v] + 1;
                        parent[u] = v;
                        queue.push_back(u);
                    } else if depth[u] % 2 == depth[v] % 2 {
                        // Same parity: tree paths to the common ancestor plus
                        // the edge v-u close an odd walk.
                        let (mut a, mut b) = (v, u);
                        let (mut pa, mut pb) = (vec![a], vec![b]);
                        while a != b {
                            if depth[a] >= depth[b] {
                                a = parent[a];
                                pa.push(a);
                            } else {
                                b = parent[b];
                                pb.push(b);
                            }
                        }
                        pb.pop();
                        pb.reverse();
                        pa.extend(pb);
                        pa.push(v);
                        return Some(pa);
                    }
                }
            }
        }
        None
    }

    pub fn structure(&self) -> Structure {
        let components = self.components();
        let bipartite = self.odd_cycle().is_none();
        let connected = components == 1;
        let period = connected.then_some(if bipartite { 2 } else { 1 });
        Structure {
            connected,
            components,
            bipartite,
            aperiodic: period == Some(1),
            period,
            regular_degree: self.regular_degree(),
        }
    }

    /// Undirected DOT; each dart pair becomes one edge labeled `g/g^-1`.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph G {\n");
        for (i, v) in self.vertex_names.iter().enumerate() {
            let _ = writeln!(s, "  {i} [label={}];", dot_quote(v));
        }
        for (k, d) in self.darts.iter().enumerate() {
            if k < d.inverse {
                let inv = &self.darts[d.inverse];
                let label = format!(
                    "{}/{}",
                    self.label_names[d.label], self.label_names[inv.label]
                );
                let _ = writeln!(
                    s,
                    "  {} -- {} [label={}];",
                    d.origin,
                    d.terminus,
                    dot_quote(&label)
                );
            }
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n_vertices": self.n_vertices(),
            "vertices": self.vertex_names,
            "labels": self.label_names,
            "darts": self.darts.iter().map(|d| [d.origin, d.terminus, d.label, d.inverse]).collect::<Vec<_>>(),
            "adjacency": self.adjacency().coo().iter().map(|&(r, c, x)| json!([r, c, x])).collect::<Vec<_>>(),
        })
    }

    /// Reads `n_vertices` and the `adjacency` triples of a graph file; the
    /// other fields are optional.
    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        #[derive(Deserialize)]
        struct GraphFile {
            n_vertices: usize,
            adjacency: Vec<(usize, usize, i64)>,
            #[serde(default)]
            vertices: Option<Vec<String>>,
        }
        let de = &mut serde_json::Deserializer::from_str(text);
        let f: GraphFile = serde_path_to_error::deserialize(de).map_err(|e| GraphError::Parse {
            path: e.path().to_string(),
            message: e.into_inner().to_string(),
        })?;
        let a = IntMatrix::from_coo(f.n_vertices, f.n_vertices, &f.adjacency).ok_or(
            GraphError::Parse {
                path: "adjacency".into(),
                message: "index out of range".into(),
            },
        )?;
        let mut g = UGraph::from_adjacency(&a)?;
        if let Some(names) = f.vertices {
            if names.len() == g.n_vertices() {
                g.vertex_names = names;
            }
        }
        Ok(g)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Structure {
    pub connected: bool,
    pub components: usize,
    pub bipartite: bool,
    pub aperiodic: bool,
    pub period: Option<usize>,
    pub regular_degree: Option<usize>,
}

/// Period of a strongly connected directed graph given by successor lists:
/// the gcd of `level(u) + 1 - level(v)` over all edges. `None` if the graph
/// is not strongly connected.
pub fn directed_period(succ: &[Vec<usize>]) -> Option<usize> {
    let n = succ.len();
    if n == 0 {
        return None;
    }
    let bfs = |adj: &[Vec<usize>]| {
        let mut level = vec![usize::MAX; n];
        level[0] = 0;
        let mut queue = VecDeque::from([0]);
        while let Some(v) = queue.pop_front() {
            for &u in &adj[v] {
                if level[u] == usize::MAX {
                    level[u] = level[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        level
    };
    let level = bfs(succ);
    let mut pred = vec![Vec::new(); n];
    for (v, s) in succ.iter().enumerate() {
        for &u in s {
            pred[u].push(v);
        }
    }
    if level.contains(&usize::MAX) || bfs(&pred).contains(&usize::MAX) {
        return None;
    }
    let mut g = 0usize;
    for (v, s) in succ.iter().enumerate() {
        for &u in s {
            let diff = (level[v] as i64 + 1 - level[u] as i64).unsigned_abs() as usize;
            g = gcd(g, diff);
        }
    }
    Some(g)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Which automaton a level graph comes from.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LevelSide {
    /// `A_n`: `M_D` acting on reduced words over `H`.
    A,
    /// `B_n`: `∂M_D` acting on reduced words over `V`.
    B,
}

fn word_name(w: &[usize], alphabet: &[String]) -> String {
    if w.is_empty() {
        "ε".into()
    } else {
        w.iter()
            .map(|&x| alphabet[x].as_str())
            .collect::<Vec<_>>()
            .join(".")
    }
}

/// Reduced-word action graph of an automaton with involutions, glued into an
/// undirected graph.
pub fn automaton_level_graph(m: &Mealy, n: usize) -> Result<UGraph, GraphError> {
    let inv = m.inv_states.as_ref().ok_or(GraphError::NoInvolution)?;
    let g = m.action_graph(n, true)?;
    let names = g
        .vertices
        .iter()
        .map(|w| word_name(w, &m.alphabet))
        .collect();
    UGraph::from_labeled(&g, inv, names, m.states.clone())
}

/// `A_n` (side A) or `B_n` (side B) of a datum, `n ≥ 1`.
pub fn level_graph(d: &VHDatum, side: LevelSide, n: usize) -> Result<UGraph, GraphError> {
    if n == 0 {
        return Err(GraphError::ZeroLevel);
    }
    let m = Mealy::from_datum(d)?;
    let m = match side {
        LevelSide::A => m,
        LevelSide::B => m.dual(),
    };
    automaton_level_graph(&m, n)
}

/// Level graph of `Γ_τ` on `∏_{σ ∈ S0∖{τ}} L_σ(n_σ)`: vertices are tuples of
/// reduced words and the generators `1 + αF`, `α ∈ N^{-1}(τ^{-1})`, act by
/// threading the state through `M_{τ,σ}` for each `σ` in `S0` order.
pub fn product_level_graph(
    field: &FieldSpec,
    s0: &[FqElem],
    tau: FqElem,
    levels: &[usize],
) -> Result<UGraph, GraphError> {
    let mut sorted = s0.to_vec();
    sorted.sort();
    sorted.dedup();
    if s0.len() < 2 || sorted.len() != s0.len() || !s0.contains(&tau) {
        return Err(GraphError::BadParameterSet);
    }
    let others: Vec<FqElem> = s0.iter().copied().filter(|&s| s != tau).collect();
    if levels.len() != others.len() {
        return Err(GraphError::LevelArity {
            expected: others.len(),
            got: levels.len(),
        });
    }
    let automata = others
        .iter()
        .map(|&sigma| {
            Ok(Mealy::from_datum(&build_quaternionic_datum(
                field, tau, sigma,
            )?)?)
        })
        .collect::<Result<Vec<_>, GraphError>>()?;
    let per_factor = automata
        .iter()
        .zip(levels)
        .map(|(m, &n)| m.words(n, true))
        .collect::<Result<Vec<_>, _>>()?;
    let mut tuples: Vec<Vec<Vec<usize>>> = vec![vec![]];
    for words in &per_factor {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                words.iter().map(move |w| {
                    let mut t2 = t.clone();
                    t2.push(w.clone());
                    t2
                })
            })
            .collect();
    }
    let index: HashMap<&Vec<Vec<usize>>, usize> =
        tuples.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let states = &automata[0].states;
    let inv = automata[0]
        .inv_states
        .as_ref()
        .ok_or(GraphError::NoInvolution)?;
    let mut edges = Vec::with_capacity(tuples.len() * states.len());
    for (i, t) in tuples.iter().enumerate() {
        for a in 0..states.len() {
            let (out, _) = product_act(&automata, a, t)?;
            let j = *index
                .get(&out)
                .ok_or_else(|| MealyError::NotClosed(t.concat()))?;
            edges.push((i, a, j));
        }
    }
    let lg = LabeledGraph {
        vertices: (0..tuples.len()).map(|i| vec![i]).collect(),
        edges,
    };
    let names = tuples
        .iter()
        .map(|t| {
            let parts: Vec<String> = t
                .iter()
                .zip(&automata)
                .map(|(w, m)| word_name(w, &m.alphabet))
                .collect();
            format!("({})", parts.join(", "))
        })
        .collect();
    UGraph::from_labeled(&lg, inv, names, states.clone())
}

/// Non-backtracking graph on the darts of a regular graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DartGraph {
    pub darts: Vec<Dart>,
    /// `succ[e]` = all `f` with `t(e) = o(f)` and `f ≠ e^{-1}`, ascending.
    pub succ: Vec<Vec<usize>>,
}

impl DartGraph {
    pub fn len(&self) -> usize {
        self.darts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.darts.is_empty()
    }

    pub fn matrix(&self) -> IntMatrix {
        let n = self.len();
        let mut h = IntMatrix::zeros(n, n);
        for (e, s) in self.succ.iter().enumerate() {
            for &f in s {
                h[(e, f)] += 1;
            }
        }
        h
    }

    pub fn period(&self) -> Option<usize> {
        directed_period(&self.succ)
    }
}

pub fn nb_matrix(g: &UGraph) -> Result<DartGraph, GraphError> {
    g.regular_degree().ok_or(GraphError::Irregular)?;
    let mut out_darts = vec![Vec::new(); g.n_vertices()];
    for (k, d) in g.darts.iter().enumerate() {
        out_darts[d.origin].push(k);
    }
    let succ = g
        .darts
        .iter()
        .map(|e| {
            out_darts[e.terminus]
                .iter()
                .copied()
                .filter(|&f| f != e.inverse)
                .collect()
        })
        .collect();
    Ok(DartGraph {
        darts: g.darts.clone(),
        succ,
    })
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Projection {
    DropLast,
    DropFirst,
}

/// Is the projection a covering `big → small`: a graph map onto `small` that
/// is bijective on the out-star and the in-star of every vertex? Edges are
/// compared by endpoints; labels are ignored.
pub fn covering_check(
    big: &LabeledGraph,
    small: &LabeledGraph,
    proj: Projection,
) -> Result<bool, GraphError> {
    let p = |w: &[usize]| -> Vec<usize> {
        match proj {
            Projection::DropLast => w[..w.len().saturating_sub(1)].to_vec(),
            Projection::DropFirst => w.get(1..).unwrap_or_default().to_vec(),
        }
    };
    let mut image = Vec::with_capacity(big.vertices.len());
    for w in &big.vertices {
        let pw = p(w);
        match small.index_of(&pw) {
            Some(i) if w.len() == pw.len() + 1 => image.push(i),
            _ => return Err(GraphError::ShapeMismatch(w.clone())),
        }
    }
    let mut hit = vec![false; small.vertices.len()];
    for &i in &image {
        hit[i] = true;
    }
    if hit.contains(&false) {
        return Ok(false);
    }
    let stars = |g: &LabeledGraph, map: &dyn Fn(usize) -> usize| {
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); g.vertices.len()];
        let mut inn: Vec<Vec<usize>> = vec![Vec::new(); g.vertices.len()];
        for &(s, _, t) in &g.edges {
            out[s].push(map(t));
            inn[t].push(map(s));
        }
        for v in out.iter_mut().chain(inn.iter_mut()) {
            v.sort_unstable();
        }
        (out, inn)
    };
    let (bout, bin) = stars(big, &|v| image[v]);
    let (sout, sin) = stars(small, &|v| v);
    Ok((0..big.vertices.len()).all(|v| bout[v] == sout[image[v]] && bin[v] == sin[image[v]]))
}

/// Number of vertices of each degree.
pub fn degree_histogram(g: &UGraph) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for d in g.degrees() {
        *h.entry(d).or_default() += 1;
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d12() -> VHDatum {
        let f = FieldSpec::new(3, 1).unwrap();
        build_quaternionic_datum(&f, f.from_int(1), f.from_int(2)).unwrap()
    }

    pub(crate) fn cycle(n: usize) -> UGraph {
        let mut a = IntMatrix::zeros(n, n);
        for i in 0..n {
            a[(i, (i + 1) % n)] += 1;
            a[((i + 1) % n, i)] += 1;
        }
        UGraph::from_adjacency(&a).unwrap()
    }

    pub(crate) fn petersen() -> UGraph {
        let mut a = IntMatrix::zeros(10, 10);
        let mut link = |i: usize, j: usize| {
            a[(i, j)] = 1;
            a[(j, i)] = 1;
        };
        for i in 0..5 {
            link(i, (i + 1) % 5);
            link(i, i + 5);
            link(5 + i, 5 + (i + 2) % 5);
        }
        UGraph::from_adjacency(&a).unwrap()
    }

    #[test]
    fn level_graph_sizes_q3() {
        let d = d12();
        for n in 1..=5 {
            for side in [LevelSide::A, LevelSide::B] {
                let g = level_graph(&d, side, n).unwrap();
                assert_eq!(g.n_vertices(), 4 * 3usize.pow(n as u32 - 1));
                assert_eq!(g.regular_degree(), Some(4));
                assert!(g.adjacency().is_symmetric());
                let s = g.structure();
                assert!(s.connected && !s.bipartite, "n={n} {side:?}");
            }
        }
        assert!(matches!(
            level_graph(&d, LevelSide::A, 0),
            Err(GraphError::ZeroLevel)
        ));
    }

    #[test]
    fn dart_involution() {
        let g = level_graph(&d12(), LevelSide::A, 3).unwrap();
        for (k, d) in g.darts.iter().enumerate() {
            let e = g.darts[d.inverse];
            assert_eq!(e.inverse, k);
            assert_eq!((e.origin, e.terminus), (d.terminus, d.origin));
        }
    }

    #[test]
    fn cycle_structure_and_nb() {
        let c6 = cycle(6).structure();
        assert!(c6.connected && c6.bipartite && !c6.aperiodic);
        assert_eq!(c6.period, Some(2));
        let nb = nb_matrix(&cycle(5)).unwrap();
        assert_eq!(nb.len(), 10);
        assert_eq!(nb.matrix().regular_degree(), Some(1));
        // two disjoint directed 5-cycles
        assert_eq!(nb.period(), None);
    }

    #[test]
    fn petersen_structure() {
        let s = petersen().structure();
        assert!(s.connected && !s.bipartite);
        assert_eq!(s.regular_degree, Some(3));
        let w = petersen().odd_cycle().unwrap();
        assert_eq!(w.first(), w.last());
        assert_eq!((w.len() - 1) % 2, 1);
    }

    #[test]
    fn nb_of_a1() {
        let g = level_graph(&d12(), LevelSide::A, 1).unwrap();
        let nb = nb_matrix(&g).unwrap();
        assert_eq!(nb.len(), 16);
        assert_eq!(nb.matrix().regular_degree(), Some(3));
        assert_eq!(nb.period(), Some(1));
    }

    #[test]
    fn product_levels_q5() {
        let f = FieldSpec::new(5, 1).unwrap();
        let s0 = [f.from_int(1), f.from_int(2), f.from_int(3)];
        let g = product_level_graph(&f, &s0, s0[0], &[1, 1]).unwrap();
        assert_eq!(g.n_vertices(), 36);
        assert_eq!(g.regular_degree(), Some(6));
        assert!(g.structure().connected);
        let g0 = product_level_graph(&f, &s0, s0[0], &[0, 0]).unwrap();
        assert_eq!(g0.n_vertices(), 1);
        let dup = [f.from_int(1), f.from_int(1)];
        assert!(matches!(
            product_level_graph(&f, &dup, dup[0], &[1]),
            Err(GraphError::BadParameterSet)
        ));
    }

    #[test]
    fn coverings() {
        let m = Mealy::from_datum(&d12()).unwrap();
        for reduced in [false, true] {
            for n in 2..=4 {
                let big = m.action_graph(n, reduced).unwrap();
                let small = m.action_graph(n - 1, reduced).unwrap();
                assert!(covering_check(&big, &small, Projection::DropLast).unwrap());
                assert!(covering_check(&big, &small, Projection::DropFirst).unwrap());
            }
        }
        let mut big = m.action_graph(3, false).unwrap();
        let small = m.action_graph(2, false).unwrap();
        let (s, l, t) = big.edges[5];
        big.edges[5] = (s, l, (t + 1) % big.vertices.len());
        assert!(!covering_check(&big, &small, Projection::DropLast).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let g = petersen();
        let text = g.to_json().to_string();
        let back = UGraph::from_json(&text).unwrap();
        assert_eq!(back.adjacency(), g.adjacency());
        assert!(g.to_dot().starts_with("graph G {"));
    }
}
