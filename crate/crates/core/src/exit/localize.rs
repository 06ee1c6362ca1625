//! Homotopy category of `R[W⁻¹]` by zigzag enumeration.
//!
//! A morphism of the localization is represented by an alternating zigzag
//! `x₀ → x₁ ← x₂ → …` whose forward steps are strict relations of the shape and
//! whose backward steps are marked relations (constant under the
//! stratification). Two zigzags are identified when they are connected by
//!
//! * a reduction of two adjacent steps `a ? b ? c` with `a`, `c` comparable or
//!   equal (composition in the shape, `w ∘ w⁻¹ = id`, `w⁻¹ ∘ w = id`), or
//! * a slide of an interior peak or valley along a comparable element of the
//!   same fiber (commuting squares of the shape).
//!
//! All zigzags up to the search depth are enumerated and classes are formed by
//! union-find. The result is certified only when nothing changes between the
//! last two depths and composition closes at the final depth.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{ExitError, ExitPresentation};
use crate::category::{FinCategory, Morphism};

pub const DEFAULT_DEPTH: usize = 8;
pub const DEFAULT_MAX_WORDS: usize = 2_000_000;

/// An alternating zigzag of shape elements.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Zigzag {
    objects: Vec<u32>,
    forward_first: bool,
}

impl Zigzag {
    pub fn identity(x: usize) -> Self {
        Zigzag { objects: vec![x as u32], forward_first: true }
    }

    /// Builds a zigzag from objects and step directions (`true` = forward),
    /// composing adjacent steps of equal direction.
    pub fn from_steps(objects: &[usize], forward: &[bool]) -> Self {
        assert_eq!(objects.len(), forward.len() + 1);
        let mut objs = vec![objects[0] as u32];
        let mut dirs: Vec<bool> = Vec::new();
        for (k, &d) in forward.iter().enumerate() {
            let next = objects[k + 1] as u32;
            if dirs.last() == Some(&d) {
                *objs.last_mut().unwrap() = next;
            } else {
                objs.push(next);
                dirs.push(d);
            }
        }
        Zigzag { forward_first: dirs.first().copied().unwrap_or(true), objects: objs }
    }

    pub fn len(&self) -> usize {
        self.objects.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn source(&self) -> usize {
        self.objects[0] as usize
    }

    pub fn target(&self) -> usize {
        *self.objects.last().unwrap() as usize
    }

    pub fn objects(&self) -> Vec<usize> {
        self.objects.iter().map(|&o| o as usize).collect()
    }

    pub fn is_forward(&self, step: usize) -> bool {
        (step % 2 == 0) == self.forward_first
    }

    fn dirs(&self) -> Vec<bool> {
        (0..self.len()).map(|k| self.is_forward(k)).collect()
    }

    /// Ordering used to pick canonical representatives: shorter first, then
    /// lexicographic on objects, backward-first before forward-first.
    fn canon_key(&self) -> (usize, &[u32], bool) {
        (self.len(), &self.objects, self.forward_first)
    }

    pub fn concat(&self, other: &Zigzag) -> Zigzag {
        assert_eq!(self.target(), other.source());
        let mut objs = self.objects();
        objs.extend(other.objects().into_iter().skip(1));
        let mut dirs = self.dirs();
        dirs.extend(other.dirs());
        Zigzag::from_steps(&objs, &dirs)
    }

    pub fn render(&self, names: &[String]) -> String {
        let mut s = names[self.objects[0] as usize].clone();
        for k in 0..self.len() {
            s.push_str(if self.is_forward(k) { "->" } else { "<-" });
            s.push_str(&names[self.objects[k + 1] as usize]);
        }
        s
    }

    /// Parses the output of [`Zigzag::render`] against element names.
    pub fn parse(text: &str, names: &[String]) -> Option<Zigzag> {
        let lookup: HashMap<&str, usize> =
            names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let mut objects = Vec::new();
        let mut dirs = Vec::new();
        let mut rest = text;
        loop {
            let next = [rest.find("->"), rest.find("<-")].into_iter().flatten().min();
            match next {
                Some(pos) => {
                    objects.push(*lookup.get(&rest[..pos])?);
                    dirs.push(rest[pos..].starts_with("->"));
                    rest = &rest[pos + 2..];
                }
                None => {
                    objects.push(*lookup.get(rest)?);
                    break;
                }
            }
        }
        Some(Zigzag::from_steps(&objects, &dirs))
    }
}

/// Search parameters for [`localize_hocat`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalizeOptions {
    pub depth: usize,
    /// Enumeration stops (uncertified) once this many zigzags exist.
    pub max_words: usize,
}

impl Default for LocalizeOptions {
    fn default() -> Self {
        LocalizeOptions { depth: DEFAULT_DEPTH, max_words: DEFAULT_MAX_WORDS }
    }
}

/// Serializable summary of a localization run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalizationReport {
    pub certified: bool,
    pub search_depth: usize,
    /// The enumeration hit `max_words` before reaching `search_depth`.
    pub truncated: bool,
    pub words_enumerated: usize,
    /// Total number of morphism classes among zigzags of length ≤ d, for d = 0, 1, ….
    pub class_counts: Vec<usize>,
    /// `|hom(x, y)|` keyed by `x->y`, nonempty hom-sets only.
    pub hom_sizes: BTreeMap<String, usize>,
    /// Canonical zigzag of every morphism class, keyed by `x->y`.
    pub witness: BTreeMap<String, Vec<String>>,
    pub category: FinCategory,
}

impl LocalizationReport {
    pub fn require_certified(self) -> Result<Self, ExitError> {
        if self.certified {
            Ok(self)
        } else {
            Err(ExitError::DepthExhausted { report: Box::new(self) })
        }
    }

    pub fn hom_size(&self, x: &str, y: &str) -> usize {
        self.hom_sizes.get(&hom_key(x, y)).copied().unwrap_or(0)
    }

    pub fn skeleton(&self) -> FinCategory {
        self.category.skeleton()
    }
}

pub(crate) fn hom_key(x: &str, y: &str) -> String {
    format!("{x}->{y}")
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Class structure at one depth: canonical representatives per hom-set and
/// the composition table on them.
#[derive(Debug, PartialEq, Eq)]
struct Snapshot {
    reps: Vec<usize>,
    composition: BTreeMap<(usize, usize), Option<usize>>,
}

/// A completed localization search, able to classify further zigzags.
pub struct Localization {
    names: Vec<String>,
    strat: Vec<usize>,
    up: Vec<Vec<u32>>,
    down_marked: Vec<Vec<u32>>,
    fiber_comparable: Vec<Vec<u32>>,
    leq: Vec<Vec<bool>>,
    words: Vec<Zigzag>,
    index: HashMap<Zigzag, usize>,
    uf: UnionFind,
    /// Word index of each morphism's canonical representative.
    reps: Vec<usize>,
    class_of_root: HashMap<usize, usize>,
    report: LocalizationReport,
}

/// Runs the zigzag search with the given depth (≥ 2) and default word budget.
pub fn localize_hocat(pres: &ExitPresentation, depth: usize) -> Result<LocalizationReport, ExitError> {
    Localization::new(pres, LocalizeOptions { depth, ..Default::default() }).map(|l| l.report)
}

impl Localization {
    pub fn new(pres: &ExitPresentation, options: LocalizeOptions) -> Result<Self, ExitError> {
        if options.depth < 2 {
            return Err(ExitError::InvalidDepth(options.depth));
        }
        let shape = pres.shape();
        let n = shape.len();
        let strat: Vec<usize> = (0..n).map(|i| pres.strat().apply(i)).collect();
        let leq: Vec<Vec<bool>> = (0..n).map(|a| (0..n).map(|b| shape.leq(a, b)).collect()).collect();
        let up: Vec<Vec<u32>> =
            (0..n).map(|a| (0..n).filter(|&b| b != a && leq[a][b]).map(|b| b as u32).collect()).collect();
        let down_marked: Vec<Vec<u32>> = (0..n)
            .map(|a| {
                (0..n)
                    .filter(|&b| b != a && leq[b][a] && strat[a] == strat[b])
                    .map(|b| b as u32)
                    .collect()
            })
            .collect();
        let fiber_comparable: Vec<Vec<u32>> = (0..n)
            .map(|a| {
                (0..n)
                    .filter(|&b| b != a && strat[a] == strat[b] && (leq[a][b] || leq[b][a]))
                    .map(|b| b as u32)
                    .collect()
            })
            .collect();

        let mut loc = Localization {
            names: shape.names().to_vec(),
            strat,
            up,
            down_marked,
            fiber_comparable,
            leq,
            words: Vec::new(),
            index: HashMap::new(),
            uf: UnionFind { parent: Vec::new() },
            reps: Vec::new(),
            class_of_root: HashMap::new(),
            report: LocalizationReport {
                certified: false,
                search_depth: options.depth,
                truncated: false,
                words_enumerated: 0,
                class_counts: Vec::new(),
                hom_sizes: BTreeMap::new(),
                witness: BTreeMap::new(),
                category: FinCategory::thin(Vec::new(), &[]),
            },
        };
        let complete = loc.enumerate(options);
        loc.classify(options.depth, complete);
        Ok(loc)
    }

    pub fn report(&self) -> &LocalizationReport {
        &self.report
    }

    pub fn into_report(self) -> LocalizationReport {
        self.report
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Enumerates all alternating zigzags level by level. Returns the last
    /// fully enumerated length.
    fn enumerate(&mut self, options: LocalizeOptions) -> usize {
        let n = self.names.len();
        for x in 0..n {
            self.push_word(Zigzag::identity(x));
        }
        let mut level_start = 0;
        let mut complete = 0;
        for len in 1..=options.depth {
            let level_end = self.words.len();
            let mut added = 0usize;
            for w in level_start..level_end {
                let word = self.words[w].clone();
                let last = word.target();
                let next_forward: Vec<bool> = if word.is_empty() {
                    vec![false, true]
                } else {
                    vec![!word.is_forward(word.len() - 1)]
                };
                for fwd in next_forward {
                    let targets = if fwd { &self.up[last] } else { &self.down_marked[last] };
                    for &t in targets.clone().iter() {
                        let mut objects = word.objects.clone();
                        objects.push(t);
                        let forward_first = if word.is_empty() { fwd } else { word.forward_first };
                        self.push_word(Zigzag { objects, forward_first });
                        added += 1;
                    }
                }
                if self.words.len() > options.max_words {
                    self.report.truncated = true;
                    self.words.truncate(level_end);
                    self.index.retain(|_, &mut i| i < level_end);
                    self.uf.parent.truncate(level_end);
                    return complete;
                }
            }
            if added == 0 {
                return options.depth;
            }
            complete = len;
            level_start = level_end;
        }
        complete
    }

    fn push_word(&mut self, w: Zigzag) {
        let id = self.words.len();
        self.index.insert(w.clone(), id);
        self.words.push(w);
        self.uf.parent.push(id);
    }

    /// Result of collapsing steps `i, i+1` of `w`, if allowed.
    fn reduce_at(&self, w: &Zigzag, i: usize) -> Option<Zigzag> {
        let o = &w.objects;
        let (a, c) = (o[i] as usize, o[i + 2] as usize);
        let mut objects = w.objects();
        let mut dirs = w.dirs();
        if a == c {
            objects.drain(i + 1..i + 3);
            dirs.drain(i..i + 2);
        } else if self.leq[a][c] {
            objects.remove(i + 1);
            dirs.splice(i..i + 2, [true]);
        } else if self.leq[c][a] {
            debug_assert_eq!(self.strat[a], self.strat[c]);
            objects.remove(i + 1);
            dirs.splice(i..i + 2, [false]);
        } else {
            return None;
        }
        Some(Zigzag::from_steps(&objects, &dirs))
    }

    /// Words obtained by sliding the interior object at position `i`.
    fn slides_at(&self, w: &Zigzag, i: usize) -> Vec<Zigzag> {
        let (prev, x, next) = (w.objects[i - 1] as usize, w.objects[i] as usize, w.objects[i + 1] as usize);
        let peak = w.is_forward(i - 1);
        let mut out = Vec::new();
        for &b in &self.fiber_comparable[x] {
            let b = b as usize;
            let ok = if peak {
                b != prev && b != next && self.leq[prev][b] && self.leq[next][b]
            } else {
                b != prev && b != next && self.leq[b][prev] && self.leq[b][next]
            };
            if ok {
                let mut objects = w.objects.clone();
                objects[i] = b as u32;
                out.push(Zigzag { objects, forward_first: w.forward_first });
            }
        }
        out
    }

    fn classify(&mut self, depth: usize, complete: usize) {
        let max_len = self.words.iter().map(Zigzag::len).max().unwrap_or(0);
        let mut counts = Vec::new();
        let mut snapshot_before: Option<Snapshot> = None;
        let mut w = 0;
        for len in 0..=complete {
            while w < self.words.len() && self.words[w].len() == len {
                let word = self.words[w].clone();
                for i in 0..word.len().saturating_sub(1) {
                    if let Some(r) = self.reduce_at(&word, i) {
                        let j = self.index[&r];
                        self.uf.union(w, j);
                    }
                }
                for i in 1..word.len() {
                    for s in self.slides_at(&word, i) {
                        let j = self.index[&s];
                        self.uf.union(w, j);
                    }
                }
                w += 1;
            }
            let roots: HashSet<usize> = (0..w).map(|k| self.uf.find(k)).collect();
            counts.push(roots.len());
            // below max_len the word sets of the last two depths differ
            if len + 1 == complete && max_len >= complete {
                snapshot_before = Some(self.snapshot(len));
            }
        }
        let final_snapshot = self.snapshot(complete);
        let closed = final_snapshot.composition.values().all(Option::is_some);
        let stable = match &snapshot_before {
            Some(before) => *before == final_snapshot,
            None => max_len < complete,
        };
        let certified = !self.report.truncated && complete == depth && closed && stable;
        self.build_category(&final_snapshot, certified, counts);
    }

    fn canonical_reps(&mut self, max_len: usize) -> Vec<usize> {
        let mut best: HashMap<usize, usize> = HashMap::new();
        for w in 0..self.words.len() {
            if self.words[w].len() > max_len {
                break;
            }
            let root = self.uf.find(w);
            match best.get(&root) {
                Some(&b) if self.words[b].canon_key() <= self.words[w].canon_key() => {}
                _ => {
                    best.insert(root, w);
                }
            }
        }
        let mut reps: Vec<usize> = best.into_values().collect();
        reps.sort_by(|&a, &b| {
            let (wa, wb) = (&self.words[a], &self.words[b]);
            (wa.source(), wa.target())
                .cmp(&(wb.source(), wb.target()))
                .then_with(|| wa.canon_key().cmp(&wb.canon_key()))
        });
        reps
    }

    fn snapshot(&mut self, max_len: usize) -> Snapshot {
        let reps = self.canonical_reps(max_len);
        let rep_of_root: HashMap<usize, usize> = reps.iter().map(|&r| (self.uf.find(r), r)).collect();
        let mut by_source: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &r in &reps {
            by_source.entry(self.words[r].source()).or_default().push(r);
        }
        let mut composition = BTreeMap::new();
        for &f in &reps {
            let mid = self.words[f].target();
            let Some(gs) = by_source.get(&mid) else { continue };
            for &g in gs.clone().iter() {
                let composite = self.words[f].concat(&self.words[g]);
                let class = self
                    .lookup_reducing(&composite, max_len)
                    .map(|k| rep_of_root[&self.uf.find(k)]);
                composition.insert((g, f), class);
            }
        }
        Snapshot { reps, composition }
    }

    /// Finds an enumerated word of length ≤ `max_len` equivalent to `w` by
    /// reductions, searching a bounded number of intermediate words.
    fn lookup_reducing(&self, w: &Zigzag, max_len: usize) -> Option<usize> {
        if w.len() <= max_len {
            return self.index.get(w).copied();
        }
        let mut stack = vec![w.clone()];
        let mut seen = HashSet::new();
        while let Some(cur) = stack.pop() {
            if seen.len() > 4096 {
                return None;
            }
            for i in 0..cur.len().saturating_sub(1) {
                if let Some(r) = self.reduce_at(&cur, i) {
                    if r.len() <= max_len {
                        return self.index.get(&r).copied();
                    }
                    if seen.insert(r.clone()) {
                        stack.push(r);
                    }
                }
            }
        }
        None
    }

    fn build_category(&mut self, snap: &Snapshot, certified: bool, counts: Vec<usize>) {
        let mut morphisms = Vec::with_capacity(snap.reps.len());
        let mut pos_of_rep = HashMap::new();
        let mut identities = vec![0; self.names.len()];
        for (k, &r) in snap.reps.iter().enumerate() {
            let word = &self.words[r];
            let name = if word.is_empty() {
                identities[word.source()] = k;
                format!("id({})", self.names[word.source()])
            } else {
                word.render(&self.names)
            };
            pos_of_rep.insert(r, k);
            morphisms.push(Morphism { name, source: word.source(), target: word.target() });
        }
        let compose: HashMap<(usize, usize), usize> = snap
            .composition
            .iter()
            .filter_map(|(&(g, f), &h)| Some(((pos_of_rep[&g], pos_of_rep[&f]), pos_of_rep[&h?])))
            .collect();
        self.reps = snap.reps.clone();
        self.class_of_root =
            snap.reps.iter().enumerate().map(|(k, &r)| (self.uf.find(r), k)).collect();
        let mut hom_sizes = BTreeMap::new();
        let mut witness: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for m in &morphisms {
            let key = hom_key(&self.names[m.source], &self.names[m.target]);
            *hom_sizes.entry(key.clone()).or_insert(0) += 1;
            witness.entry(key).or_default().push(m.name.clone());
        }
        let category = FinCategory::new(self.names.clone(), morphisms, identities, compose)
            .expect("zigzag classes have consistent endpoints");
        self.report.certified = certified;
        self.report.words_enumerated = self.words.len();
        self.report.class_counts = counts;
        self.report.hom_sizes = hom_sizes;
        self.report.witness = witness;
        self.report.category = category;
    }

    /// The morphism (index into the report's category) represented by `w`, if
    /// `w` is reachable within the searched depth.
    pub fn classify_word(&mut self, w: &Zigzag) -> Option<usize> {
        let k = self.lookup_reducing(w, self.report.search_depth)?;
        let root = self.uf.find(k);
        self.class_of_root.get(&root).copied()
    }

    /// The canonical zigzag of a morphism.
    pub fn witness(&self, morphism: usize) -> &Zigzag {
        &self.words[self.reps[morphism]]
    }
}
