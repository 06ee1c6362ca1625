//! Finite posets, monotone maps and locally closed subposets.
//!
//! Elements are opaque string identifiers. Internally every poset indexes its
//! elements by their position in lexicographic order, so two posets built from
//! the same data always agree index-for-index and serialize identically.
//!
//! The order relation is kept as Hasse edges (the transitive reduction) plus,
//! for posets up to [`DEFAULT_DENSE_LIMIT`] elements, a dense reachability
//! matrix. Larger posets answer `leq` queries by search over the Hasse graph.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::SimplicialComplex;

/// Largest poset for which the `<=` relation is materialized densely.
pub const DEFAULT_DENSE_LIMIT: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PosetError {
    #[error("duplicate element `{0}`")]
    DuplicateElement(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("cycle detected: `{0}` <= `{1}` <= `{0}`")]
    CycleDetected(String, String),
    #[error("not locally closed: `{0}` lies between members but is not a member")]
    NotLocallyClosed(String),
    #[error("map is not monotone: `{0}` <= `{1}` but their images are incomparable or reversed")]
    NotMonotone(String, String),
    #[error("map does not assign `{0}`")]
    Unassigned(String),
    #[error("map source/target mismatch: {0}")]
    Mismatch(String),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub(crate) struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub(crate) fn new(n: usize) -> Self {
        BitSet { words: vec![0; n.div_ceil(64)] }
    }

    #[inline]
    pub(crate) fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub(crate) fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    #[inline]
    pub(crate) fn contains(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub(crate) fn union_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    pub(crate) fn difference_with(&mut self, other: &BitSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !*b;
        }
    }

    pub(crate) fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &bits)| {
            let mut bits = bits;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let t = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(w * 64 + t)
                }
            })
        })
    }
}

#[derive(Clone)]
enum Order {
    /// `up[i]` holds every `j` with `i <= j`.
    Dense { up: Vec<BitSet> },
    /// Reachability is answered by search over the Hasse successors.
    Sparse,
}

/// A finite partially ordered set.
#[derive(Clone)]
pub struct Poset {
    names: Vec<String>,
    index: HashMap<String, usize>,
    hasse: Vec<(usize, usize)>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
    order: Order,
}

impl PartialEq for Poset {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.hasse == other.hasse
    }
}

impl Eq for Poset {}

impl fmt::Debug for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self
            .hasse
            .iter()
            .map(|&(a, b)| format!("{}<{}", self.names[a], self.names[b]))
            .collect();
        f.debug_struct("Poset")
            .field("elements", &self.names)
            .field("hasse", &edges)
            .finish()
    }
}

impl Poset {
    /// Validates raw elements and order edges. Edges need not be covering
    /// relations; they are closed transitively and then reduced.
    pub fn new<S, I, E>(elements: I, edges: E) -> Result<Poset, PosetError>
    where
        S: AsRef<str>,
        I: IntoIterator<Item = S>,
        E: IntoIterator<Item = (S, S)>,
    {
        Self::with_dense_limit(elements, edges, DEFAULT_DENSE_LIMIT)
    }

    pub fn with_dense_limit<S, I, E>(
        elements: I,
        edges: E,
        dense_limit: usize,
    ) -> Result<Poset, PosetError>
    where
        S: AsRef<str>,
        I: IntoIterator<Item = S>,
        E: IntoIterator<Item = (S, S)>,
    {
        let mut names: Vec<String> = elements.into_iter().map(|s| s.as_ref().to_owned()).collect();
        names.sort();
        for w in names.windows(2) {
            if w[0] == w[1] {
                return Err(PosetError::DuplicateElement(w[0].clone()));
            }
        }
        let index: HashMap<String, usize> =
            names.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let mut raw = Vec::new();
        for (a, b) in edges {
            let (a, b) = (a.as_ref(), b.as_ref());
            let ia = *index.get(a).ok_or_else(|| PosetError::UnknownElement(a.to_owned()))?;
            let ib = *index.get(b).ok_or_else(|| PosetError::UnknownElement(b.to_owned()))?;
            if ia != ib {
                raw.push((ia, ib));
            }
        }
        Self::from_index_edges(names, index, raw, dense_limit)
    }

    fn from_index_edges(
        names: Vec<String>,
        index: HashMap<String, usize>,
        mut raw: Vec<(usize, usize)>,
        dense_limit: usize,
    ) -> Result<Poset, PosetError> {
        let n = names.len();
        raw.sort_unstable();
        raw.dedup();
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(a, b) in &raw {
            out[a].push(b);
        }
        let topo = match toposort(n, &out) {
            Ok(t) => t,
            Err((a, b)) => {
                return Err(PosetError::CycleDetected(names[a].clone(), names[b].clone()))
            }
        };

        let (hasse, order) = if n <= dense_limit {
            let mut up: Vec<BitSet> = vec![BitSet::new(n); n];
            for &i in topo.iter().rev() {
                let mut s = BitSet::new(n);
                s.insert(i);
                for &j in &out[i] {
                    s.union_with(&up[j]);
                }
                up[i] = s;
            }
            let mut hasse = Vec::new();
            for i in 0..n {
                let mut covers = up[i].clone();
                covers.remove(i);
                for &j in &out[i] {
                    let mut above = up[j].clone();
                    above.remove(j);
                    covers.difference_with(&above);
                }
                hasse.extend(covers.iter().map(|j| (i, j)));
            }
            (hasse, Order::Dense { up })
        } else {
            let mut hasse = Vec::new();
            for i in 0..n {
                for &j in &out[i] {
                    let implied = out[i]
                        .iter()
                        .any(|&k| k != j && reaches(&out, k, j));
                    if !implied {
                        hasse.push((i, j));
                    }
                }
            }
            (hasse, Order::Sparse)
        };
        let mut hasse = hasse;
        hasse.sort_unstable();
        hasse.dedup();
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        for &(a, b) in &hasse {
            succ[a].push(b);
            pred[b].push(a);
        }
        Ok(Poset { names, index, hasse, succ, pred, order })
    }

    /// Builds a poset from element indices into `names` (which must already be
    /// sorted and distinct).
    pub(crate) fn from_sorted_names(
        names: Vec<String>,
        edges: Vec<(usize, usize)>,
    ) -> Result<Poset, PosetError> {
        debug_assert!(names.windows(2).all(|w| w[0] < w[1]));
        let index = names.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let edges = edges.into_iter().filter(|(a, b)| a != b).collect();
        Self::from_index_edges(names, index, edges, DEFAULT_DENSE_LIMIT)
    }

    /// The chain `0 < 1 < ... < n` on elements named by their position.
    pub fn chain(n: usize) -> Poset {
        let names: Vec<String> = (0..=n).map(|i| i.to_string()).collect();
        let edges: Vec<(String, String)> =
            (0..n).map(|i| (i.to_string(), (i + 1).to_string())).collect();
        Poset::new(names, edges).expect("chains are posets")
    }

    pub fn singleton(name: &str) -> Poset {
        Poset::new([name], Vec::<(&str, &str)>::new()).unwrap()
    }

    pub fn antichain<S: AsRef<str>>(names: impl IntoIterator<Item = S>) -> Result<Poset, PosetError> {
        Poset::new(names, Vec::<(S, S)>::new())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub(crate) fn require(&self, name: &str) -> Result<usize, PosetError> {
        self.index_of(name).ok_or_else(|| PosetError::UnknownElement(name.to_owned()))
    }

    /// Covering relations `(a, b)` with `a < b`, sorted.
    pub fn hasse(&self) -> &[(usize, usize)] {
        &self.hasse
    }

    /// Upper covers: elements `j` with `i ⋖ j`.
    pub fn covers_of(&self, i: usize) -> &[usize] {
        &self.succ[i]
    }

    /// Lower covers: elements `j` with `j ⋖ i`.
    pub fn covered_by(&self, i: usize) -> &[usize] {
        &self.pred[i]
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.order, Order::Dense { .. })
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        match &self.order {
            Order::Dense { up } => up[a].contains(b),
            Order::Sparse => reaches(&self.succ, a, b),
        }
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq(a, b)
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.leq(a, b) || self.leq(b, a)
    }

    /// All `j` with `i <= j`, ascending.
    pub fn up_set(&self, i: usize) -> Vec<usize> {
        match &self.order {
            Order::Dense { up } => up[i].iter().collect(),
            Order::Sparse => {
                let mut seen = BTreeSet::new();
                let mut stack = vec![i];
                while let Some(x) = stack.pop() {
                    if seen.insert(x) {
                        stack.extend(self.succ[x].iter().copied());
                    }
                }
                seen.into_iter().collect()
            }
        }
    }

    /// All `j` with `j <= i`, ascending.
    pub fn down_set(&self, i: usize) -> Vec<usize> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![i];
        while let Some(x) = stack.pop() {
            if seen.insert(x) {
                stack.extend(self.pred[x].iter().copied());
            }
        }
        seen.into_iter().collect()
    }

    /// Every pair `(a, b)` with `a < b`.
    pub fn strict_relations(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.len() {
            for b in self.up_set(a) {
                if a != b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Elements in a linear extension of the order (indices ascending within ties).
    pub fn linear_extension(&self) -> Vec<usize> {
        toposort(self.len(), &self.succ).expect("posets are acyclic")
    }

    /// Length (number of elements) of a longest chain.
    pub fn height(&self) -> usize {
        let mut best = vec![1usize; self.len()];
        for &i in self.linear_extension().iter().rev() {
            for &j in &self.succ[i] {
                best[i] = best[i].max(best[j] + 1);
            }
        }
        best.into_iter().max().unwrap_or(0)
    }

    pub fn up_closure(&self, members: &BTreeSet<usize>) -> BTreeSet<usize> {
        members.iter().flat_map(|&m| self.up_set(m)).collect()
    }

    pub fn down_closure(&self, members: &BTreeSet<usize>) -> BTreeSet<usize> {
        members.iter().flat_map(|&m| self.down_set(m)).collect()
    }

    pub fn is_up_closed(&self, members: &BTreeSet<usize>) -> bool {
        members.iter().all(|&m| self.succ[m].iter().all(|s| members.contains(s)))
    }

    pub fn is_down_closed(&self, members: &BTreeSet<usize>) -> bool {
        members.iter().all(|&m| self.pred[m].iter().all(|s| members.contains(s)))
    }

    /// First element (by index) lying between two members without being one.
    fn interval_violation(&self, members: &BTreeSet<usize>) -> Option<usize> {
        let above: BTreeSet<usize> = self.up_closure(members);
        let below: BTreeSet<usize> = self.down_closure(members);
        above.intersection(&below).find(|x| !members.contains(x)).copied()
    }

    pub fn classify_subposet(&self, members: &BTreeSet<usize>) -> Result<SubposetSpec, PosetError> {
        if let Some(&bad) = members.iter().find(|&&m| m >= self.len()) {
            return Err(PosetError::UnknownElement(format!("#{bad}")));
        }
        let kind = if self.is_up_closed(members) {
            SubposetKind::Open
        } else if self.is_down_closed(members) {
            SubposetKind::Closed
        } else if let Some(x) = self.interval_violation(members) {
            return Err(PosetError::NotLocallyClosed(self.names[x].clone()));
        } else {
            SubposetKind::LocallyClosed
        };
        Ok(SubposetSpec { parent: self.clone(), members: members.clone(), kind })
    }

    /// Classifies a subset given by element names.
    pub fn classify_named<S: AsRef<str>>(
        &self,
        members: impl IntoIterator<Item = S>,
    ) -> Result<SubposetSpec, PosetError> {
        let set = members
            .into_iter()
            .map(|m| self.require(m.as_ref()))
            .collect::<Result<BTreeSet<_>, _>>()?;
        self.classify_subposet(&set)
    }

    /// The induced subposet on `members`.
    pub fn subposet(&self, members: &BTreeSet<usize>) -> Poset {
        let ids: Vec<usize> = members.iter().copied().collect();
        let names: Vec<String> = ids.iter().map(|&i| self.names[i].clone()).collect();
        let mut edges = Vec::new();
        for (a, &x) in ids.iter().enumerate() {
            for (b, &y) in ids.iter().enumerate() {
                if x != y && self.leq(x, y) {
                    edges.push((a, b));
                }
            }
        }
        Poset::from_sorted_names(names, edges).expect("subposets are posets")
    }

    /// Componentwise product order on pairs, named by [`pair_name`].
    pub fn product(&self, other: &Poset) -> Poset {
        let mut pairs: Vec<(String, usize, usize)> = Vec::with_capacity(self.len() * other.len());
        for i in 0..self.len() {
            for j in 0..other.len() {
                pairs.push((pair_name(&self.names[i], &other.names[j]), i, j));
            }
        }
        pairs.sort();
        let mut slot = vec![0usize; self.len() * other.len()];
        for (k, (_, i, j)) in pairs.iter().enumerate() {
            slot[i * other.len() + j] = k;
        }
        let mut edges = Vec::new();
        for &(a, b) in &self.hasse {
            for j in 0..other.len() {
                edges.push((slot[a * other.len() + j], slot[b * other.len() + j]));
            }
        }
        for i in 0..self.len() {
            for &(a, b) in &other.hasse {
                edges.push((slot[i * other.len() + a], slot[i * other.len() + b]));
            }
        }
        let names: Vec<String> = pairs.into_iter().map(|(n, _, _)| n).collect();
        let mut sorted = names.clone();
        sorted.dedup();
        assert_eq!(sorted.len(), names.len(), "product element names collide");
        Poset::from_sorted_names(names, edges).expect("products of posets are posets")
    }

    /// All nonempty chains, each listed in increasing order.
    pub fn chains(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut stack: Vec<Vec<usize>> = (0..self.len()).rev().map(|i| vec![i]).collect();
        while let Some(chain) = stack.pop() {
            let top = *chain.last().unwrap();
            for j in self.up_set(top).into_iter().rev() {
                if j != top {
                    let mut next = chain.clone();
                    next.push(j);
                    stack.push(next);
                }
            }
            out.push(chain);
        }
        out
    }

    /// The nerve: vertices are elements, simplices are nonempty chains.
    pub fn order_complex(&self) -> SimplicialComplex {
        let faces = self.chains();
        SimplicialComplex::from_index_faces(self.names.clone(), faces)
            .expect("chains are closed under subsets")
    }

    pub fn to_json(&self) -> PosetJson {
        PosetJson::from(self)
    }
}

/// Name of the pair element `(a, b)` of a product poset.
pub fn pair_name(a: &str, b: &str) -> String {
    format!("({a},{b})")
}

fn reaches(succ: &[Vec<usize>], from: usize, to: usize) -> bool {
    if from == to {
        return true;
    }
    let mut seen = HashSet::new();
    let mut stack = vec![from];
    while let Some(x) = stack.pop() {
        for &y in &succ[x] {
            if y == to {
                return true;
            }
            if seen.insert(y) {
                stack.push(y);
            }
        }
    }
    false
}

/// Kahn's algorithm with smallest-index tie-break. On a cycle, returns two
/// distinct elements lying on it.
fn toposort(n: usize, out: &[Vec<usize>]) -> Result<Vec<usize>, (usize, usize)> {
    let mut indeg = vec![0usize; n];
    for succ in out {
        for &j in succ {
            indeg[j] += 1;
        }
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(i) = ready.pop_first() {
        order.push(i);
        for &j in &out[i] {
            indeg[j] -= 1;
            if indeg[j] == 0 {
                ready.insert(j);
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }
    // Every leftover node has a leftover predecessor; walk backwards until a repeat.
    let left: BTreeSet<usize> = (0..n).filter(|&i| indeg[i] > 0).collect();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, succ) in out.iter().enumerate() {
        for &j in succ {
            if left.contains(&i) && left.contains(&j) {
                preds[j].push(i);
            }
        }
    }
    let mut seen = Vec::new();
    let mut x = *left.iter().next().unwrap();
    while !seen.contains(&x) {
        seen.push(x);
        x = preds[x][0];
    }
    let pos = seen.iter().position(|&s| s == x).unwrap();
    let cycle = &seen[pos..];
    let a = cycle[0];
    let b = cycle.get(1).copied().unwrap_or(a);
    Err((a.min(b), a.max(b)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubposetKind {
    /// Up-closed.
    Open,
    /// Down-closed.
    Closed,
    LocallyClosed,
}

/// A locally closed subset of a poset together with its classification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubposetSpec {
    pub parent: Poset,
    pub members: BTreeSet<usize>,
    pub kind: SubposetKind,
}

impl SubposetSpec {
    pub fn member_names(&self) -> Vec<&str> {
        self.members.iter().map(|&m| self.parent.name(m)).collect()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.contains(&i)
    }

    pub fn is_open(&self) -> bool {
        self.parent.is_up_closed(&self.members)
    }

    pub fn is_closed(&self) -> bool {
        self.parent.is_down_closed(&self.members)
    }

    /// Complement in the parent. The complement of an open set is closed and
    /// vice versa; for other kinds the complement need not be locally closed.
    pub fn complement(&self) -> Result<SubposetSpec, PosetError> {
        let rest: BTreeSet<usize> =
            (0..self.parent.len()).filter(|i| !self.members.contains(i)).collect();
        self.parent.classify_subposet(&rest)
    }
}

/// A monotone map between finite posets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneMap {
    source: Poset,
    target: Poset,
    assignment: Vec<usize>,
}

impl MonotoneMap {
    pub fn new(source: Poset, target: Poset, assignment: Vec<usize>) -> Result<Self, PosetError> {
        if assignment.len() != source.len() {
            return Err(PosetError::Mismatch(format!(
                "assignment has {} entries for {} source elements",
                assignment.len(),
                source.len()
            )));
        }
        if let Some(&bad) = assignment.iter().find(|&&t| t >= target.len()) {
            return Err(PosetError::UnknownElement(format!("#{bad}")));
        }
        for &(a, b) in source.hasse() {
            if !target.leq(assignment[a], assignment[b]) {
                return Err(PosetError::NotMonotone(
                    source.name(a).to_owned(),
                    source.name(b).to_owned(),
                ));
            }
        }
        Ok(MonotoneMap { source, target, assignment })
    }

    pub fn from_names<K: AsRef<str>, V: AsRef<str>>(
        source: Poset,
        target: Poset,
        assignment: impl IntoIterator<Item = (K, V)>,
    ) -> Result<Self, PosetError> {
        let mut slots: Vec<Option<usize>> = vec![None; source.len()];
        for (k, v) in assignment {
            let s = source.require(k.as_ref())?;
            let t = target.require(v.as_ref())?;
            slots[s] = Some(t);
        }
        let assignment = slots
            .into_iter()
            .enumerate()
            .map(|(i, t)| t.ok_or_else(|| PosetError::Unassigned(source.name(i).to_owned())))
            .collect::<Result<Vec<_>, _>>()?;
        MonotoneMap::new(source, target, assignment)
    }

    /// Monotone map whose target is the smallest order on the image making it
    /// monotone (generated by images of source relations).
    pub fn onto_induced_order<K: AsRef<str>, V: AsRef<str>>(
        source: Poset,
        assignment: impl IntoIterator<Item = (K, V)>,
    ) -> Result<Self, PosetError> {
        let named: Vec<(String, String)> = assignment
            .into_iter()
            .map(|(k, v)| (k.as_ref().to_owned(), v.as_ref().to_owned()))
            .collect();
        let targets: BTreeSet<String> = named.iter().map(|(_, v)| v.clone()).collect();
        let lookup: HashMap<&str, &str> =
            named.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
        let mut edges = Vec::new();
        for &(a, b) in source.hasse() {
            let (Some(x), Some(y)) = (lookup.get(source.name(a)), lookup.get(source.name(b)))
            else {
                continue;
            };
            edges.push((x.to_string(), y.to_string()));
        }
        let target = Poset::new(targets, edges)?;
        MonotoneMap::from_names(source, target, named)
    }

    pub fn identity(p: &Poset) -> Self {
        MonotoneMap { source: p.clone(), target: p.clone(), assignment: (0..p.len()).collect() }
    }

    /// The map to the one-point poset `{name}`.
    pub fn to_point(p: &Poset, name: &str) -> Self {
        MonotoneMap {
            source: p.clone(),
            target: Poset::singleton(name),
            assignment: vec![0; p.len()],
        }
    }

    pub fn source(&self) -> &Poset {
        &self.source
    }

    pub fn target(&self) -> &Poset {
        &self.target
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.assignment[i]
    }

    pub fn apply_name(&self, name: &str) -> Option<&str> {
        self.source.index_of(name).map(|i| self.target.name(self.assignment[i]))
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &MonotoneMap) -> Result<MonotoneMap, PosetError> {
        if self.target != other.source {
            return Err(PosetError::Mismatch(
                "target of the first map is not the source of the second".into(),
            ));
        }
        Ok(MonotoneMap {
            source: self.source.clone(),
            target: other.target.clone(),
            assignment: self.assignment.iter().map(|&t| other.assignment[t]).collect(),
        })
    }

    pub fn is_surjective(&self) -> bool {
        self.first_missed().is_none()
    }

    /// First target element (by index) with empty preimage.
    pub fn first_missed(&self) -> Option<usize> {
        let hit: BTreeSet<usize> = self.assignment.iter().copied().collect();
        (0..self.target.len()).find(|t| !hit.contains(t))
    }

    pub fn preimage(&self, targets: &BTreeSet<usize>) -> BTreeSet<usize> {
        (0..self.source.len()).filter(|i| targets.contains(&self.assignment[*i])).collect()
    }

    /// Restriction to `members` of the source with target corestricted to
    /// `target_members`; images of members must land there.
    pub fn restrict(
        &self,
        members: &BTreeSet<usize>,
        target_members: &BTreeSet<usize>,
    ) -> Result<MonotoneMap, PosetError> {
        let source = self.source.subposet(members);
        let target = self.target.subposet(target_members);
        let tpos: BTreeMap<usize, usize> =
            target_members.iter().enumerate().map(|(k, &t)| (t, k)).collect();
        let assignment = members
            .iter()
            .map(|&m| {
                tpos.get(&self.assignment[m]).copied().ok_or_else(|| {
                    PosetError::Mismatch(format!(
                        "`{}` maps outside the corestriction",
                        self.source.name(m)
                    ))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        MonotoneMap::new(source, target, assignment)
    }

    /// The product map `self × other` between product posets.
    pub fn product(&self, other: &MonotoneMap) -> MonotoneMap {
        let source = self.source.product(&other.source);
        let target = self.target.product(&other.target);
        let mut assignment = vec![0; source.len()];
        for i in 0..self.source.len() {
            for j in 0..other.source.len() {
                let s = source
                    .index_of(&pair_name(self.source.name(i), other.source.name(j)))
                    .unwrap();
                let t = target
                    .index_of(&pair_name(
                        self.target.name(self.assignment[i]),
                        other.target.name(other.assignment[j]),
                    ))
                    .unwrap();
                assignment[s] = t;
            }
        }
        MonotoneMap { source, target, assignment }
    }

    pub fn to_json(&self) -> MonotoneMapJson {
        MonotoneMapJson {
            target: Some(self.target.to_json()),
            assignment: (0..self.source.len())
                .map(|i| (self.source.name(i).to_owned(), self.target.name(self.assignment[i]).to_owned()))
                .collect(),
        }
    }

    /// Interprets `json` as a map out of `source`. Without an explicit target,
    /// the induced order on the image is used.
    pub fn from_json(source: &Poset, json: &MonotoneMapJson) -> Result<Self, PosetError> {
        match &json.target {
            Some(t) => MonotoneMap::from_names(source.clone(), Poset::try_from(t.clone())?, &json.assignment),
            None => MonotoneMap::onto_induced_order(source.clone(), &json.assignment),
        }
    }
}

/// Wire form of a poset: sorted elements and sorted Hasse pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetJson {
    pub elements: Vec<String>,
    #[serde(default)]
    pub hasse: Vec<[String; 2]>,
}

impl From<&Poset> for PosetJson {
    fn from(p: &Poset) -> Self {
        let mut hasse: Vec<[String; 2]> = p
            .hasse()
            .iter()
            .map(|&(a, b)| [p.name(a).to_owned(), p.name(b).to_owned()])
            .collect();
        hasse.sort();
        PosetJson { elements: p.names().to_vec(), hasse }
    }
}

impl TryFrom<PosetJson> for Poset {
    type Error = PosetError;

    fn try_from(j: PosetJson) -> Result<Self, Self::Error> {
        Poset::new(j.elements, j.hasse.into_iter().map(|[a, b]| (a, b)))
    }
}

impl Serialize for Poset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PosetJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poset {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = PosetJson::deserialize(d)?;
        Poset::try_from(j).map_err(serde::de::Error::custom)
    }
}

/// Wire form of a monotone map. `target` is optional on input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotoneMapJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<PosetJson>,
    pub assignment: BTreeMap<String, String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle() -> Poset {
        Poset::new(["k", "y", "b", "r"], [("k", "b"), ("k", "r"), ("y", "b"), ("y", "r")]).unwrap()
    }

    fn set(xs: &[usize]) -> BTreeSet<usize> {
        xs.iter().copied().collect()
    }

    #[test]
    fn singleton_and_circle() {
        let p = Poset::singleton("a");
        assert_eq!(p.len(), 1);
        assert!(p.hasse().is_empty());

        let c = circle();
        assert_eq!(c.len(), 4);
        assert_eq!(c.hasse().len(), 4);
        let minimal: Vec<&str> =
            (0..4).filter(|&i| c.covered_by(i).is_empty()).map(|i| c.name(i)).collect();
        let maximal: Vec<&str> =
            (0..4).filter(|&i| c.covers_of(i).is_empty()).map(|i| c.name(i)).collect();
        assert_eq!(minimal, ["k", "y"]);
        assert_eq!(maximal, ["b", "r"]);
    }

    #[test]
    fn cycles_and_duplicates_rejected() {
        let err = Poset::new(["a", "b"], [("a", "b"), ("b", "a")]).unwrap_err();
        assert_eq!(err, PosetError::CycleDetected("a".into(), "b".into()));
        let err = Poset::new(["a", "a"], Vec::<(&str, &str)>::new()).unwrap_err();
        assert_eq!(err, PosetError::DuplicateElement("a".into()));
        let err = Poset::new(["a"], [("a", "z")]).unwrap_err();
        assert_eq!(err, PosetError::UnknownElement("z".into()));
    }

    #[test]
    fn redundant_edges_are_reduced() {
        let p = Poset::new(["0", "1", "2"], [("0", "1"), ("1", "2"), ("0", "2")]).unwrap();
        assert_eq!(p.hasse(), &[(0, 1), (1, 2)]);
        assert!(p.leq(0, 2));
        assert_eq!(p, Poset::chain(2));
    }

    #[test]
    fn sparse_mode_agrees_with_dense() {
        let edges = [("a", "b"), ("b", "c"), ("a", "c"), ("a", "d"), ("d", "c")];
        let dense = Poset::new(["a", "b", "c", "d"], edges).unwrap();
        let sparse = Poset::with_dense_limit(["a", "b", "c", "d"], edges, 0).unwrap();
        assert!(!sparse.is_dense());
        assert_eq!(dense, sparse);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(dense.leq(i, j), sparse.leq(i, j));
            }
            assert_eq!(dense.up_set(i), sparse.up_set(i));
        }
    }

    #[test]
    fn classify_on_chain() {
        let p = Poset::chain(2);
        assert_eq!(p.classify_subposet(&set(&[1, 2])).unwrap().kind, SubposetKind::Open);
        assert_eq!(p.classify_subposet(&set(&[0, 1])).unwrap().kind, SubposetKind::Closed);
        assert_eq!(p.classify_subposet(&set(&[1])).unwrap().kind, SubposetKind::LocallyClosed);
        assert_eq!(
            p.classify_subposet(&set(&[0, 2])).unwrap_err(),
            PosetError::NotLocallyClosed("1".into())
        );
    }

    #[test]
    fn products() {
        let square = Poset::chain(1).product(&Poset::chain(1));
        assert_eq!(square.len(), 4);
        assert_eq!(square.hasse().len(), 4);

        let c = circle().product(&Poset::chain(1));
        assert_eq!(c.len(), 8);
        assert_eq!(c.hasse().len(), 12);
    }

    #[test]
    fn order_complexes() {
        let oc = Poset::chain(1).order_complex();
        assert_eq!(oc.faces().len(), 3);
        let anti = Poset::antichain(["a", "b"]).unwrap().order_complex();
        assert_eq!(anti.faces().len(), 2);
        let cyc = circle().order_complex();
        assert_eq!(cyc.count_by_dim(), vec![4, 4]);
    }

    #[test]
    fn monotone_maps() {
        let c = circle();
        let p = Poset::chain(2);
        let phi = MonotoneMap::from_names(
            c.clone(),
            p.clone(),
            [("k", "0"), ("y", "1"), ("b", "1"), ("r", "2")],
        )
        .unwrap();
        assert!(phi.is_surjective());
        let bad = MonotoneMap::from_names(c.clone(), p, [("k", "2"), ("y", "1"), ("b", "1"), ("r", "2")]);
        assert!(matches!(bad, Err(PosetError::NotMonotone(..))));

        let induced =
            MonotoneMap::onto_induced_order(c, [("k", "p0"), ("y", "p1"), ("b", "p1"), ("r", "p2")])
                .unwrap();
        assert_eq!(induced.target().hasse().len(), 2);
        assert!(induced.target().leq(0, 2));
    }

    #[test]
    fn json_is_canonical() {
        let c = circle();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(
            text,
            r#"{"elements":["b","k","r","y"],"hasse":[["k","b"],["k","r"],["y","b"],["y","r"]]}"#
        );
        let back: Poset = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
    }
}
