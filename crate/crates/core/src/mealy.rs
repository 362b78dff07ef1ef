//! Mealy automata over finite alphabets, their duals and compositions, word
//! actions, action graphs on (reduced) words and the lifting system.
//!
//! States and letters are indices into the ordered `states` / `alphabet`
//! lists; words are index sequences.

use std::fmt::Write as _;

use thiserror::Error;

use crate::vhdatum::{validate_datum, VHDatum, ValidationReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MealyError {
    #[error("letter index {0} is not in the alphabet")]
    ForeignLetter(usize),
    #[error("state index {0} is not a state")]
    ForeignState(usize),
    #[error("transition table has {got} entries, expected {expected}")]
    TableSize { got: usize, expected: usize },
    #[error("automaton is not reversible, so it has no lifting system")]
    NotReversible,
    #[error("reduced words need an involution on the alphabet")]
    NoInvolution,
    #[error("automata act on different alphabets")]
    AlphabetMismatch,
    #[error("automata have different state sets")]
    StateMismatch,
    #[error("reduced word {0:?} is mapped to a non-reduced word")]
    NotClosed(Vec<usize>),
    #[error("invalid datum:\n{0}")]
    InvalidDatum(ValidationReport),
    #[error("expected {expected} words, got {got}")]
    ArityMismatch { expected: usize, got: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mealy {
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    delta: Vec<usize>,
    lambda: Vec<usize>,
    pub inv_states: Option<Vec<usize>>,
    pub inv_alphabet: Option<Vec<usize>>,
}

impl Mealy {
    /// `delta` and `lambda` are row-major over `(state, letter)`.
    pub fn new(
        states: Vec<String>,
        alphabet: Vec<String>,
        delta: Vec<usize>,
        lambda: Vec<usize>,
        inv_states: Option<Vec<usize>>,
        inv_alphabet: Option<Vec<usize>>,
    ) -> Result<Self, MealyError> {
        let (nq, ns) = (states.len(), alphabet.len());
        for t in [&delta, &lambda] {
            if t.len() != nq * ns {
                return Err(MealyError::TableSize {
                    got: t.len(),
                    expected: nq * ns,
                });
            }
        }
        if let Some(&s) = delta.iter().find(|&&s| s >= nq) {
            return Err(MealyError::ForeignState(s));
        }
        if let Some(&x) = lambda.iter().find(|&&x| x >= ns) {
            return Err(MealyError::ForeignLetter(x));
        }
        if let Some(inv) = &inv_states {
            if inv.len() != nq {
                return Err(MealyError::TableSize {
                    got: inv.len(),
                    expected: nq,
                });
            }
            if let Some(&s) = inv.iter().find(|&&s| s >= nq) {
                return Err(MealyError::ForeignState(s));
            }
        }
        if let Some(inv) = &inv_alphabet {
            if inv.len() != ns {
                return Err(MealyError::TableSize {
                    got: inv.len(),
                    expected: ns,
                });
            }
            if let Some(&x) = inv.iter().find(|&&x| x >= ns) {
                return Err(MealyError::ForeignLetter(x));
            }
        }
        Ok(Mealy {
            states,
            alphabet,
            delta,
            lambda,
            inv_states,
            inv_alphabet,
        })
    }

    /// `Q = V`, `Σ = H`, `δ(a, b) = d`, `λ(a, b) = c` for `(a, b, c, d) ∈ R`.
    pub fn from_datum(d: &VHDatum) -> Result<Self, MealyError> {
        let rep = validate_datum(d);
        if !rep.is_valid() {
            return Err(MealyError::InvalidDatum(rep));
        }
        let ns = d.n_h();
        let mut delta = vec![0; d.n_v() * ns];
        let mut lambda = vec![0; d.n_v() * ns];
        for &[a, b, c, dd] in &d.relations {
            delta[a * ns + b] = dd;
            lambda[a * ns + b] = c;
        }
        Mealy::new(
            d.v_names.clone(),
            d.h_names.clone(),
            delta,
            lambda,
            Some(d.inv_v.clone()),
            Some(d.inv_h.clone()),
        )
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn n_letters(&self) -> usize {
        self.alphabet.len()
    }

    pub fn delta(&self, a: usize, x: usize) -> usize {
        self.delta[a * self.n_letters() + x]
    }

    pub fn lambda(&self, a: usize, x: usize) -> usize {
        self.lambda[a * self.n_letters() + x]
    }

    /// `δ*(x, a) = λ(a, x)`, `λ*(x, a) = δ(a, x)`.
    pub fn dual(&self) -> Mealy {
        let (nq, ns) = (self.n_states(), self.n_letters());
        let mut delta = vec![0; nq * ns];
        let mut lambda = vec![0; nq * ns];
        for x in 0..ns {
            for a in 0..nq {
                delta[x * nq + a] = self.lambda(a, x);
                lambda[x * nq + a] = self.delta(a, x);
            }
        }
        Mealy {
            states: self.alphabet.clone(),
            alphabet: self.states.clone(),
            delta,
            lambda,
            inv_states: self.inv_alphabet.clone(),
            inv_alphabet: self.inv_states.clone(),
        }
    }

    /// `M1 ∘ M2`: input goes through `M2` first. State `(a1, a2)` has index
    /// `a1 * |Q2| + a2`.
    pub fn compose(m1: &Mealy, m2: &Mealy) -> Result<Mealy, MealyError> {
        if m1.alphabet != m2.alphabet {
            return Err(MealyError::AlphabetMismatch);
        }
        let (n1, n2, ns) = (m1.n_states(), m2.n_states(), m1.n_letters());
        let mut states = Vec::with_capacity(n1 * n2);
        let mut delta = Vec::with_capacity(n1 * n2 * ns);
        let mut lambda = Vec::with_capacity(n1 * n2 * ns);
        for a1 in 0..n1 {
            for a2 in 0..n2 {
                states.push(format!("({},{})", m1.states[a1], m2.states[a2]));
                for x in 0..ns {
                    let y = m2.lambda(a2, x);
                    delta.push(m1.delta(a1, y) * n2 + m2.delta(a2, x));
                    lambda.push(m1.lambda(a1, y));
                }
            }
        }
        let inv_states = match (&m1.inv_states, &m2.inv_states) {
            (Some(i1), Some(i2)) => {
                Some((0..n1 * n2).map(|s| i1[s / n2] * n2 + i2[s % n2]).collect())
            }
            _ => None,
        };
        Mealy::new(
            states,
            m1.alphabet.clone(),
            delta,
            lambda,
            inv_states,
            m1.inv_alphabet.clone(),
        )
    }

    /// `M^(n) = M ∘ … ∘ M`; for `n = 0` the one-state identity automaton.
    pub fn power(&self, n: usize) -> Mealy {
        let ns = self.n_letters();
        let mut acc = Mealy {
            states: vec!["()".into()],
            alphabet: self.alphabet.clone(),
            delta: vec![0; ns],
            lambda: (0..ns).collect(),
            inv_states: Some(vec![0]),
            inv_alphabet: self.inv_alphabet.clone(),
        };
        for _ in 0..n {
            acc = Mealy::compose(self, &acc).expect("same alphabet");
        }
        acc
    }

    fn is_perm(v: impl Iterator<Item = usize>, n: usize) -> bool {
        let mut seen = vec![false; n];
        v.into_iter()
            .all(|i| !std::mem::replace(&mut seen[i], true))
    }

    /// Every `δ_x: Q → Q` is a bijection.
    pub fn is_reversible(&self) -> bool {
        (0..self.n_letters()).all(|x| {
            Self::is_perm(
                (0..self.n_states()).map(|a| self.delta(a, x)),
                self.n_states(),
            )
        })
    }

    /// Every `λ_a: Σ → Σ` is a bijection.
    pub fn is_dual_reversible(&self) -> bool {
        (0..self.n_states()).all(|a| {
            Self::is_perm(
                (0..self.n_letters()).map(|x| self.lambda(a, x)),
                self.n_letters(),
            )
        })
    }

    pub fn check_word(&self, w: &[usize]) -> Result<(), MealyError> {
        match w.iter().find(|&&x| x >= self.n_letters()) {
            Some(&x) => Err(MealyError::ForeignLetter(x)),
            None => Ok(()),
        }
    }

    /// Runs the transducer from state `a`; returns (output, end state).
    pub fn act(&self, a: usize, w: &[usize]) -> Result<(Vec<usize>, usize), MealyError> {
        if a >= self.n_states() {
            return Err(MealyError::ForeignState(a));
        }
        self.check_word(w)?;
        Ok(self.act_unchecked(a, w))
    }

    fn act_unchecked(&self, mut a: usize, w: &[usize]) -> (Vec<usize>, usize) {
        let out = w
            .iter()
            .map(|&x| {
                let y = self.lambda(a, x);
                a = self.delta(a, x);
                y
            })
            .collect();
        (out, a)
    }

    pub fn is_reduced(&self, w: &[usize]) -> Result<bool, MealyError> {
        let inv = self.inv_alphabet.as_ref().ok_or(MealyError::NoInvolution)?;
        Ok(w.windows(2).all(|p| p[1] != inv[p[0]]))
    }

    /// All words of length `n` (or only reduced ones), lexicographically.
    pub fn words(&self, n: usize, reduced: bool) -> Result<Vec<Vec<usize>>, MealyError> {
        let inv = if reduced {
            Some(self.inv_alphabet.as_ref().ok_or(MealyError::NoInvolution)?)
        } else {
            None
        };
        let mut out = vec![vec![]];
        for _ in 0..n {
            let mut next = Vec::with_capacity(out.len() * self.n_letters());
            for w in &out {
                for x in 0..self.n_letters() {
                    if let (Some(inv), Some(&last)) = (inv, w.last()) {
                        if inv[last] == x {
                            continue;
                        }
                    }
                    let mut w2 = w.clone();
                    w2.push(x);
                    next.push(w2);
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// `G_n(M)`: one edge `v → M_a(v)` labeled `a` per vertex and state.
    pub fn action_graph(&self, n: usize, reduced: bool) -> Result<LabeledGraph, MealyError> {
        let vertices = self.words(n, reduced)?;
        let mut edges = Vec::with_capacity(vertices.len() * self.n_states());
        for (i, v) in vertices.iter().enumerate() {
            for a in 0..self.n_states() {
                let (u, _) = self.act_unchecked(a, v);
                let j = vertices
                    .binary_search(&u)
                    .map_err(|_| MealyError::NotClosed(v.clone()))?;
                edges.push((i, a, j));
            }
        }
        Ok(LabeledGraph { vertices, edges })
    }

    pub fn lift_system(&self) -> Result<LiftSystem, MealyError> {
        if !self.is_reversible() {
            return Err(MealyError::NotReversible);
        }
        let ns = self.n_letters();
        let mut rules = vec![(0, 0); self.n_states() * ns];
        for b in 0..self.n_states() {
            for x in 0..ns {
                let a = self.delta(b, x);
                rules[a * ns + x] = (b, self.lambda(b, x));
            }
        }
        Ok(LiftSystem {
            n_letters: ns,
            inv_alphabet: self.inv_alphabet.clone(),
            rules,
        })
    }

    /// Checks that `(phi, psi)` (states, letters) is an isomorphism `self → other`.
    pub fn is_isomorphism(&self, other: &Mealy, phi: &[usize], psi: &[usize]) -> bool {
        if phi.len() != self.n_states()
            || psi.len() != self.n_letters()
            || other.n_states() != self.n_states()
            || other.n_letters() != self.n_letters()
            || !Self::is_perm(phi.iter().copied(), other.n_states())
            || !Self::is_perm(psi.iter().copied(), other.n_letters())
        {
            return false;
        }
        (0..self.n_states()).all(|a| {
            (0..self.n_letters()).all(|x| {
                other.delta(phi[a], psi[x]) == phi[self.delta(a, x)]
                    && other.lambda(phi[a], psi[x]) == psi[self.lambda(a, x)]
            })
        })
    }

    /// Transitions `a → δ(a,x)` labeled `x / λ(a,x)`.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph mealy {\n  rankdir=LR;\n");
        for q in &self.states {
            let _ = writeln!(s, "  {};", dot_quote(q));
        }
        for a in 0..self.n_states() {
            for x in 0..self.n_letters() {
                let _ = writeln!(
                    s,
                    "  {} -> {} [label={}];",
                    dot_quote(&self.states[a]),
                    dot_quote(&self.states[self.delta(a, x)]),
                    dot_quote(&format!(
                        "{} / {}",
                        self.alphabet[x],
                        self.alphabet[self.lambda(a, x)]
                    ))
                );
            }
        }
        s.push_str("}\n");
        s
    }
}

pub(crate) fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Threads a state through `M_1, M_2, …` on the components of a word tuple.
/// All automata must share their state set.
pub fn product_act(
    automata: &[Mealy],
    a: usize,
    words: &[Vec<usize>],
) -> Result<(Vec<Vec<usize>>, usize), MealyError> {
    if automata.len() != words.len() {
        return Err(MealyError::ArityMismatch {
            expected: automata.len(),
            got: words.len(),
        });
    }
    if automata.windows(2).any(|m| m[0].states != m[1].states) {
        return Err(MealyError::StateMismatch);
    }
    let mut state = a;
    let mut out = Vec::with_capacity(words.len());
    for (m, w) in automata.iter().zip(words) {
        let (o, s) = m.act(state, w)?;
        out.push(o);
        state = s;
    }
    Ok((out, state))
}

/// Directed graph on words with state-labeled edges `(src, label, dst)`.
/// Vertices are sorted lexicographically; edges by `(src, label)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    pub vertices: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize, usize)>,
}

impl LabeledGraph {
    /// `G_0`: the empty word with one loop per state.
    pub fn rose(n_states: usize) -> LabeledGraph {
        LabeledGraph {
            vertices: vec![vec![]],
            edges: (0..n_states).map(|a| (0, a, 0)).collect(),
        }
    }

    pub fn index_of(&self, w: &[usize]) -> Option<usize> {
        self.vertices.binary_search_by(|v| v.as_slice().cmp(w)).ok()
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

    /// DOT with word labels (letters joined by `.`) and state-labeled edges.
    pub fn to_dot(&self, alphabet: &[String], states: &[String]) -> String {
        let mut s = String::from("digraph action {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(
                s,
                "  {i} [label={}];",
                dot_quote(&Self::word_name(v, alphabet))
            );
        }
        for &(u, a, v) in &self.edges {
            let _ = writeln!(s, "  {u} -> {v} [label={}];", dot_quote(&states[a]));
        }
        s.push_str("}\n");
        s
    }
}

/// Rules `R_{a,x}`: `v -a-> u` lifts to `xv -b-> yu` with `δ(b,x) = a`, `y = λ(b,x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftSystem {
    n_letters: usize,
    inv_alphabet: Option<Vec<usize>>,
    rules: Vec<(usize, usize)>,
}

impl LiftSystem {
    /// `(b, y)` for the rule `R_{a,x}`.
    pub fn rule(&self, a: usize, x: usize) -> (usize, usize) {
        self.rules[a * self.n_letters + x]
    }

    /// Lifts every edge once per letter. In reduced mode, lifted vertices that
    /// are not reduced words are dropped with their edges; a kept edge ending
    /// at a dropped vertex is an error.
    pub fn apply(&self, g: &LabeledGraph, reduced: bool) -> Result<LabeledGraph, MealyError> {
        let inv = if reduced {
            Some(self.inv_alphabet.as_ref().ok_or(MealyError::NoInvolution)?)
        } else {
            None
        };
        let keep = |x: usize, v: &[usize]| match (inv, v.first()) {
            (Some(inv), Some(&f)) => inv[x] != f,
            _ => true,
        };
        let mut vertices: Vec<Vec<usize>> = Vec::new();
        for x in 0..self.n_letters {
            for v in &g.vertices {
                if keep(x, v) {
                    let mut w = Vec::with_capacity(v.len() + 1);
                    w.push(x);
                    w.extend_from_slice(v);
                    vertices.push(w);
                }
            }
        }
        vertices.sort();
        let lifted = LabeledGraph {
            vertices,
            edges: vec![],
        };
        let mut edges = Vec::new();
        for &(v, a, u) in &g.edges {
            for x in 0..self.n_letters {
                if !keep(x, &g.vertices[v]) {
                    continue;
                }
                let (b, y) = self.rule(a, x);
                let mut src = vec![x];
                src.extend_from_slice(&g.vertices[v]);
                let mut dst = vec![y];
                dst.extend_from_slice(&g.vertices[u]);
                let i = lifted.index_of(&src).expect("source was kept");
                let j = lifted
                    .index_of(&dst)
                    .ok_or(MealyError::NotClosed(src.clone()))?;
                edges.push((i, b, j));
            }
        }
        edges.sort();
        Ok(LabeledGraph {
            vertices: lifted.vertices,
            edges,
        })
    }
}
