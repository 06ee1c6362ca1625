//! Finite simplicial (and regular cell) complexes with face-monotone
//! stratifications.
//!
//! A stratification assigns each face an element of a poset `P` such that
//! `τ ⊆ σ` implies `φ(τ) ≤ φ(σ)`, which is exactly continuity of the
//! realization map `|X| → P` for the Alexandroff topology on `P`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::homlin::{ChainComplex, Coefficients, HomologyResult, IntMatrix};
use crate::poset::{MonotoneMap, Poset, PosetError, PosetJson};

/// Separator used in face keys: a face `{a, b}` has key `a|b`.
pub const FACE_KEY_SEP: &str = "|";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("empty face")]
    EmptyFace,
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("face `{0}` repeats a vertex")]
    RepeatedVertex(String),
    #[error("face set is not closed under subsets: `{0}` is missing")]
    NotClosed(String),
    #[error("unknown face `{0}`")]
    UnknownFace(String),
    #[error("unknown stratum `{0}`")]
    UnknownStratum(String),
    #[error("stratum `{0}` is empty")]
    EmptyStratum(String),
    #[error("stratification is not face-monotone at `{0}` ⊆ `{1}`")]
    NotFaceMonotone(String, String),
    #[error("incompatible stratifications: {0}")]
    IncompatibleStratifications(String),
    #[error("malformed complex description: {0}")]
    Malformed(String),
    #[error(transparent)]
    Poset(#[from] PosetError),
}

/// A finite abstract simplicial complex. Vertices are sorted by name; each
/// face is a sorted list of vertex indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    vertices: Vec<String>,
    faces: Vec<Vec<usize>>,
    lookup: HashMap<Vec<usize>, usize>,
}

impl SimplicialComplex {
    /// Validates an explicit face list (which must be closed under subsets and
    /// contain every vertex as a singleton).
    pub fn new<S: AsRef<str>>(
        vertices: impl IntoIterator<Item = S>,
        faces: impl IntoIterator<Item = Vec<S>>,
    ) -> Result<Self, ComplexError> {
        let (vertices, index) = sorted_vertices(vertices)?;
        let faces = faces
            .into_iter()
            .map(|f| resolve_face(&index, &f))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_index_faces(vertices, faces)
    }

    /// Closes the given facets under taking nonempty subsets.
    pub fn from_facets<S: AsRef<str>>(
        vertices: impl IntoIterator<Item = S>,
        facets: impl IntoIterator<Item = Vec<S>>,
    ) -> Result<Self, ComplexError> {
        let (vertices, index) = sorted_vertices(vertices)?;
        let mut all = BTreeSet::new();
        for v in 0..vertices.len() {
            all.insert(vec![v]);
        }
        for f in facets {
            let face = resolve_face(&index, &f)?;
            for mask in 1u64..(1u64 << face.len()) {
                let sub: Vec<usize> = face
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &v)| v)
                    .collect();
                all.insert(sub);
            }
        }
        Self::from_index_faces(vertices, all.into_iter().collect())
    }

    pub(crate) fn from_index_faces(
        vertices: Vec<String>,
        faces: Vec<Vec<usize>>,
    ) -> Result<Self, ComplexError> {
        let mut faces: Vec<Vec<usize>> = faces
            .into_iter()
            .map(|mut f| {
                f.sort_unstable();
                f
            })
            .collect();
        faces.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        faces.dedup();
        let lookup: HashMap<Vec<usize>, usize> =
            faces.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect();
        let c = SimplicialComplex { vertices, faces, lookup };
        for f in &c.faces {
            if f.is_empty() {
                return Err(ComplexError::EmptyFace);
            }
            if f.windows(2).any(|w| w[0] == w[1]) {
                return Err(ComplexError::RepeatedVertex(c.key_of(f)));
            }
            if f.len() > 1 {
                for skip in 0..f.len() {
                    let sub: Vec<usize> =
                        f.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, &v)| v).collect();
                    if !c.lookup.contains_key(&sub) {
                        return Err(ComplexError::NotClosed(c.key_of(&sub)));
                    }
                }
            }
        }
        for v in 0..c.vertices.len() {
            if !c.lookup.contains_key(&vec![v]) {
                return Err(ComplexError::NotClosed(c.vertices[v].clone()));
            }
        }
        Ok(c)
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    /// Faces sorted by dimension, then lexicographically by vertex index.
    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn dim(&self) -> Option<usize> {
        self.faces.last().map(|f| f.len() - 1)
    }

    /// Number of faces in each dimension.
    pub fn count_by_dim(&self) -> Vec<usize> {
        let mut counts = Vec::new();
        for f in &self.faces {
            let d = f.len() - 1;
            if counts.len() <= d {
                counts.resize(d + 1, 0);
            }
            counts[d] += 1;
        }
        counts
    }

    pub fn key_of(&self, face: &[usize]) -> String {
        face.iter().map(|&v| self.vertices[v].as_str()).collect::<Vec<_>>().join(FACE_KEY_SEP)
    }

    pub fn face_keys(&self) -> Vec<String> {
        self.faces.iter().map(|f| self.key_of(f)).collect()
    }

    pub fn face_named<S: AsRef<str>>(&self, names: &[S]) -> Option<usize> {
        let mut idx = names
            .iter()
            .map(|n| self.vertices.binary_search_by(|v| v.as_str().cmp(n.as_ref())).ok())
            .collect::<Option<Vec<usize>>>()?;
        idx.sort_unstable();
        self.lookup.get(&idx).copied()
    }

    /// Faces ordered by inclusion; elements are named by face keys.
    pub fn face_poset(&self) -> Poset {
        let keys = self.face_keys();
        let mut edges = Vec::new();
        for (i, f) in self.faces.iter().enumerate() {
            if f.len() < 2 {
                continue;
            }
            for skip in 0..f.len() {
                let sub: Vec<usize> =
                    f.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, &v)| v).collect();
                edges.push((keys[self.lookup[&sub]].clone(), keys[i].clone()));
            }
        }
        Poset::new(keys, edges).expect("inclusion is a partial order")
    }

    /// Simplicial chain complex with faces oriented by increasing vertex index.
    pub fn chain_complex(&self) -> ChainComplex {
        let counts = self.count_by_dim();
        let mut start = Vec::with_capacity(counts.len());
        let mut acc = 0;
        for &c in &counts {
            start.push(acc);
            acc += c;
        }
        let mut boundaries = Vec::new();
        for d in 1..counts.len() {
            let mut m = IntMatrix::zeros(counts[d - 1], counts[d]);
            for col in 0..counts[d] {
                let f = &self.faces[start[d] + col];
                for skip in 0..f.len() {
                    let sub: Vec<usize> =
                        f.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, &v)| v).collect();
                    let row = self.lookup[&sub] - start[d - 1];
                    m[(row, col)] = if skip % 2 == 0 { 1.into() } else { (-1).into() };
                }
            }
            boundaries.push(m);
        }
        ChainComplex::new(counts, boundaries).expect("∂∂ = 0 for simplicial complexes")
    }

    pub fn homology(&self, coefficients: Coefficients) -> HomologyResult {
        self.chain_complex().homology(coefficients)
    }

    /// Barycentric subdivision: vertices are faces (named `[key]`), simplices
    /// are chains of faces under inclusion.
    pub fn barycentric_subdivision(&self) -> SimplicialComplex {
        let keys = self.face_keys();
        let mut order: Vec<usize> = (0..keys.len()).collect();
        order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
        let mut rank = vec![0; keys.len()];
        for (r, &f) in order.iter().enumerate() {
            rank[f] = r;
        }
        let names: Vec<String> = order.iter().map(|&f| format!("[{}]", keys[f])).collect();
        let sets: Vec<BTreeSet<usize>> =
            self.faces.iter().map(|f| f.iter().copied().collect()).collect();
        let mut chains: Vec<Vec<usize>> = Vec::new();
        let mut frontier: Vec<Vec<usize>> = (0..self.faces.len()).map(|f| vec![f]).collect();
        while let Some(chain) = frontier.pop() {
            let top = *chain.last().unwrap();
            for g in 0..self.faces.len() {
                if self.faces[g].len() > self.faces[top].len() && sets[top].is_subset(&sets[g]) {
                    let mut next = chain.clone();
                    next.push(g);
                    frontier.push(next);
                }
            }
            chains.push(chain.iter().map(|&f| rank[f]).collect());
        }
        SimplicialComplex::from_index_faces(names, chains).expect("chains of faces form a complex")
    }

    /// Union of two complexes, matching vertices by name.
    pub fn union(&self, other: &SimplicialComplex) -> SimplicialComplex {
        let facets: Vec<Vec<&str>> = self
            .faces
            .iter()
            .map(|f| f.iter().map(|&v| self.vertices[v].as_str()).collect())
            .chain(
                other
                    .faces
                    .iter()
                    .map(|f| f.iter().map(|&v| other.vertices[v].as_str()).collect()),
            )
            .collect();
        let verts: BTreeSet<&str> =
            self.vertices.iter().chain(&other.vertices).map(String::as_str).collect();
        SimplicialComplex::from_facets(verts, facets).expect("union of complexes is a complex")
    }
}

fn sorted_vertices<S: AsRef<str>>(
    vertices: impl IntoIterator<Item = S>,
) -> Result<(Vec<String>, HashMap<String, usize>), ComplexError> {
    let mut v: Vec<String> = vertices.into_iter().map(|s| s.as_ref().to_owned()).collect();
    v.sort();
    for w in v.windows(2) {
        if w[0] == w[1] {
            return Err(ComplexError::DuplicateVertex(w[0].clone()));
        }
    }
    let index = v.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
    Ok((v, index))
}

fn resolve_face<S: AsRef<str>>(
    index: &HashMap<String, usize>,
    face: &[S],
) -> Result<Vec<usize>, ComplexError> {
    if face.is_empty() {
        return Err(ComplexError::EmptyFace);
    }
    let mut out = face
        .iter()
        .map(|v| {
            index.get(v.as_ref()).copied().ok_or_else(|| ComplexError::UnknownVertex(v.as_ref().to_owned()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    out.sort_unstable();
    if out.windows(2).any(|w| w[0] == w[1]) {
        let names: Vec<&str> = face.iter().map(|s| s.as_ref()).collect();
        return Err(ComplexError::RepeatedVertex(names.join(FACE_KEY_SEP)));
    }
    Ok(out)
}

/// The cells of a stratified space: either a simplicial complex, or a regular
/// cell complex given by its face poset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cells {
    Simplicial(SimplicialComplex),
    Regular(Poset),
}

impl Cells {
    pub fn face_poset(&self) -> Poset {
        match self {
            Cells::Simplicial(c) => c.face_poset(),
            Cells::Regular(p) => p.clone(),
        }
    }

    /// Integral (or field) homology of the underlying space. Regular cell
    /// complexes are computed through their barycentric subdivision, i.e. the
    /// order complex of the face poset.
    pub fn homology(&self, coefficients: Coefficients) -> HomologyResult {
        match self {
            Cells::Simplicial(c) => c.homology(coefficients),
            Cells::Regular(p) => p.order_complex().homology(coefficients),
        }
    }
}

/// A complex together with a face-monotone, surjective stratification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StratifiedComplex {
    cells: Cells,
    /// From the face poset to the stratifying poset.
    phi: MonotoneMap,
}

impl StratifiedComplex {
    /// `phi` is keyed by face key (regular cells: cell name).
    pub fn new<K: AsRef<str>, V: AsRef<str>>(
        cells: Cells,
        strat_poset: Poset,
        phi: impl IntoIterator<Item = (K, V)>,
    ) -> Result<Self, ComplexError> {
        let faces = cells.face_poset();
        let mut slots: Vec<Option<usize>> = vec![None; faces.len()];
        for (k, v) in phi {
            let f = faces
                .index_of(k.as_ref())
                .ok_or_else(|| ComplexError::UnknownFace(k.as_ref().to_owned()))?;
            let s = strat_poset
                .index_of(v.as_ref())
                .ok_or_else(|| ComplexError::UnknownStratum(v.as_ref().to_owned()))?;
            slots[f] = Some(s);
        }
        let assignment = slots
            .into_iter()
            .enumerate()
            .map(|(i, s)| s.ok_or_else(|| PosetError::Unassigned(faces.name(i).to_owned())))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_map(cells, faces, strat_poset, assignment)
    }

    fn from_map(
        cells: Cells,
        faces: Poset,
        strat_poset: Poset,
        assignment: Vec<usize>,
    ) -> Result<Self, ComplexError> {
        let phi = match MonotoneMap::new(faces, strat_poset, assignment) {
            Ok(m) => m,
            Err(PosetError::NotMonotone(a, b)) => return Err(ComplexError::NotFaceMonotone(a, b)),
            Err(e) => return Err(e.into()),
        };
        if let Some(t) = phi.first_missed() {
            return Err(ComplexError::EmptyStratum(phi.target().name(t).to_owned()));
        }
        Ok(StratifiedComplex { cells, phi })
    }

    /// Each face is its own stratum.
    pub fn identity(cells: Cells) -> Self {
        let faces = cells.face_poset();
        let phi = MonotoneMap::identity(&faces);
        StratifiedComplex { cells, phi }
    }

    /// Stratification pulled back along an existing monotone map from the face
    /// poset.
    pub fn with_map(cells: Cells, phi: MonotoneMap) -> Result<Self, ComplexError> {
        if *phi.source() != cells.face_poset() {
            return Err(ComplexError::Malformed("map source is not the face poset".into()));
        }
        let (faces, target, assignment) =
            (phi.source().clone(), phi.target().clone(), phi.assignment().to_vec());
        Self::from_map(cells, faces, target, assignment)
    }

    pub fn cells(&self) -> &Cells {
        &self.cells
    }

    pub fn face_poset(&self) -> &Poset {
        self.phi.source()
    }

    pub fn strat_poset(&self) -> &Poset {
        self.phi.target()
    }

    pub fn phi(&self) -> &MonotoneMap {
        &self.phi
    }

    /// Face keys lying over the stratum `p`.
    pub fn stratum_members(&self, p: &str) -> Result<BTreeSet<String>, ComplexError> {
        let s = self
            .strat_poset()
            .index_of(p)
            .ok_or_else(|| ComplexError::UnknownStratum(p.to_owned()))?;
        Ok(self
            .phi
            .preimage(&BTreeSet::from([s]))
            .into_iter()
            .map(|f| self.face_poset().name(f).to_owned())
            .collect())
    }

    /// Coarsens along `psi: P → Q`; every element of `Q` must be hit.
    pub fn coarsen_stratification(&self, psi: &MonotoneMap) -> Result<Self, ComplexError> {
        let composite = self.phi.then(psi)?;
        if let Some(t) = composite.first_missed() {
            return Err(ComplexError::EmptyStratum(composite.target().name(t).to_owned()));
        }
        Ok(StratifiedComplex { cells: self.cells.clone(), phi: composite })
    }

    /// Union of two stratified complexes. The stratifying posets must agree on
    /// common elements; stratum labels of shared faces must agree.
    pub fn glue(&self, other: &StratifiedComplex) -> Result<Self, ComplexError> {
        let cells = match (&self.cells, &other.cells) {
            (Cells::Simplicial(a), Cells::Simplicial(b)) => Cells::Simplicial(a.union(b)),
            (Cells::Regular(a), Cells::Regular(b)) => {
                Cells::Regular(union_posets(a, b).map_err(|e| {
                    ComplexError::IncompatibleStratifications(format!("cell orders disagree: {e}"))
                })?)
            }
            _ => {
                return Err(ComplexError::IncompatibleStratifications(
                    "cannot glue a simplicial complex to a regular cell complex".into(),
                ))
            }
        };
        let strat = if self.strat_poset() == other.strat_poset() {
            self.strat_poset().clone()
        } else {
            union_posets(self.strat_poset(), other.strat_poset()).map_err(|e| {
                ComplexError::IncompatibleStratifications(format!("stratifying posets disagree: {e}"))
            })?
        };
        let mut phi: BTreeMap<String, String> = BTreeMap::new();
        for sc in [self, other] {
            for f in 0..sc.face_poset().len() {
                let key = sc.face_poset().name(f).to_owned();
                let val = sc.strat_poset().name(sc.phi.apply(f)).to_owned();
                if let Some(prev) = phi.get(&key) {
                    if *prev != val {
                        return Err(ComplexError::IncompatibleStratifications(format!(
                            "face `{key}` lies over `{prev}` and `{val}`"
                        )));
                    }
                }
                phi.insert(key, val);
            }
        }
        StratifiedComplex::new(cells, strat, phi)
    }

    /// Homology of the underlying (unstratified) space.
    pub fn underlying_homology(&self, coefficients: Coefficients) -> HomologyResult {
        self.cells.homology(coefficients)
    }

    pub fn to_json(&self) -> StratifiedComplexJson {
        let mut json = StratifiedComplexJson {
            vertices: None,
            faces: None,
            cells: None,
            strat_poset: Some(self.strat_poset().to_json()),
            phi: Some(
                (0..self.face_poset().len())
                    .map(|f| {
                        (
                            self.face_poset().name(f).to_owned(),
                            self.strat_poset().name(self.phi.apply(f)).to_owned(),
                        )
                    })
                    .collect(),
            ),
        };
        match &self.cells {
            Cells::Simplicial(c) => {
                json.vertices = Some(c.vertices().to_vec());
                let mut faces: Vec<Vec<String>> = c
                    .faces()
                    .iter()
                    .map(|f| f.iter().map(|&v| c.vertices()[v].clone()).collect())
                    .collect();
                faces.sort();
                json.faces = Some(faces);
            }
            Cells::Regular(p) => json.cells = Some(p.to_json()),
        }
        json
    }

    pub fn from_json(json: &StratifiedComplexJson) -> Result<Self, ComplexError> {
        let cells = match (&json.vertices, &json.faces, &json.cells) {
            (Some(v), Some(f), None) => Cells::Simplicial(SimplicialComplex::new(v.iter().cloned(), f.iter().cloned())?),
            (None, None, Some(p)) => Cells::Regular(Poset::try_from(p.clone())?),
            _ => {
                return Err(ComplexError::Malformed(
                    "expected either `vertices` + `faces` or `cells`".into(),
                ))
            }
        };
        match (&json.strat_poset, &json.phi) {
            (None, None) => Ok(StratifiedComplex::identity(cells)),
            (Some(p), Some(phi)) => StratifiedComplex::new(cells, Poset::try_from(p.clone())?, phi),
            (None, Some(phi)) => {
                let map = MonotoneMap::onto_induced_order(cells.face_poset(), phi)?;
                StratifiedComplex::with_map(cells, map)
            }
            (Some(_), None) => Err(ComplexError::Malformed("`strat_poset` given without `phi`".into())),
        }
    }
}

/// Poset on the union of elements generated by both orders; each input order
/// must be recovered exactly on its own elements.
fn union_posets(a: &Poset, b: &Poset) -> Result<Poset, ComplexError> {
    let names: BTreeSet<&str> = a.names().iter().chain(b.names()).map(String::as_str).collect();
    let edges = a
        .hasse()
        .iter()
        .map(|&(x, y)| (a.name(x), a.name(y)))
        .chain(b.hasse().iter().map(|&(x, y)| (b.name(x), b.name(y))));
    let u = Poset::new(names, edges)?;
    for p in [a, b] {
        let members: BTreeSet<usize> = p.names().iter().map(|n| u.index_of(n).unwrap()).collect();
        if u.subposet(&members) != *p {
            return Err(ComplexError::IncompatibleStratifications(
                "union adds relations among existing elements".into(),
            ));
        }
    }
    Ok(u)
}

/// Wire form: either `vertices` + `faces` (simplicial) or `cells` (regular cell
/// complex by face poset); `strat_poset` + `phi` optional (identity when both
/// are absent; induced order when only `phi` is given).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratifiedComplexJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub faces: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells: Option<PosetJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strat_poset: Option<PosetJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<BTreeMap<String, String>>,
}

/// Convenience: integral homology of a simplicial complex.
pub fn simplicial_homology(c: &SimplicialComplex) -> HomologyResult {
    c.homology(Coefficients::Integers)
}
