//! Finite-dimensional representations of exit presentations.
//!
//! A representation assigns a vector space to every shape element and a
//! matrix to every Hasse edge, with all parallel paths agreeing. Matrices act
//! on column vectors: the matrix of `a → b` has shape `dims[b] × dims[a]`.

pub mod count;

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exit::{ExitError, ExitPresentation, ExitPresentationJson};
use crate::homlin::{Colimit, Field, FieldMatrix, Limit, LinalgError, VectorDiagram};
use crate::poset::{PosetError, SubposetSpec};

pub use count::{count_reps, count_reps_category, CountOptions, CountResult, DEFAULT_BUDGET};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RepError {
    #[error(transparent)]
    Exit(#[from] ExitError),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("`{0}` is not a Hasse edge of the shape")]
    UnknownEdge(String),
    #[error("{0}")]
    ShapeMismatch(String),
    #[error("paths from `{0}` to `{1}` give different maps")]
    NotFunctorial(String, String),
    #[error("reassembly failed: {0}")]
    ReassemblyFailed(String),
    #[error("search space of {needed} candidates exceeds the budget of {budget}")]
    BudgetExceeded { needed: BigInt, budget: u64 },
    #[error("{0}")]
    Unsupported(String),
}

pub fn edge_key(a: &str, b: &str) -> String {
    format!("{a}->{b}")
}

/// A functor from the shape of a presentation to finite-dimensional vector
/// spaces over `field`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Representation {
    pres: ExitPresentation,
    field: Field,
    dims: Vec<usize>,
    /// Aligned with `pres.shape().hasse()`.
    mats: Vec<FieldMatrix>,
    /// Composite maps for every pair `a ≤ b`.
    maps: BTreeMap<(usize, usize), FieldMatrix>,
}

/// Verdict of [`Representation::is_p_constructible`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constructibility {
    pub constructible: bool,
    /// Marked edges whose matrix is not invertible, as `[source, target]`.
    pub offenders: Vec<[String; 2]>,
}

impl Representation {
    pub fn new(
        pres: ExitPresentation,
        field: Field,
        dims: Vec<usize>,
        mats: Vec<FieldMatrix>,
    ) -> Result<Self, RepError> {
        let shape = pres.shape();
        if dims.len() != shape.len() {
            return Err(RepError::ShapeMismatch(format!(
                "{} dimensions for {} shape elements",
                dims.len(),
                shape.len()
            )));
        }
        if mats.len() != shape.hasse().len() {
            return Err(RepError::ShapeMismatch(format!(
                "{} matrices for {} Hasse edges",
                mats.len(),
                shape.hasse().len()
            )));
        }
        for (&(a, b), m) in shape.hasse().iter().zip(&mats) {
            if m.shape() != (dims[b], dims[a]) || m.field() != field {
                return Err(RepError::ShapeMismatch(format!(
                    "matrix on `{}` must be {}×{} over {field}",
                    edge_key(shape.name(a), shape.name(b)),
                    dims[b],
                    dims[a]
                )));
            }
        }
        let maps = composite_maps(&pres, field, &dims, &mats)?;
        Ok(Representation { pres, field, dims, mats, maps })
    }

    /// Builds from named dimensions and edge matrices; missing dimensions are
    /// zero and edges touching a zero space may be omitted.
    pub fn from_named(
        pres: ExitPresentation,
        field: Field,
        dims: &BTreeMap<String, usize>,
        mats: &BTreeMap<String, FieldMatrix>,
    ) -> Result<Self, RepError> {
        let shape = pres.shape();
        for name in dims.keys() {
            shape.require(name)?;
        }
        let d: Vec<usize> = shape.names().iter().map(|n| dims.get(n).copied().unwrap_or(0)).collect();
        let keys: BTreeSet<String> =
            shape.hasse().iter().map(|&(a, b)| edge_key(shape.name(a), shape.name(b))).collect();
        if let Some(bad) = mats.keys().find(|k| !keys.contains(*k)) {
            return Err(RepError::UnknownEdge(bad.clone()));
        }
        let mut m = Vec::with_capacity(shape.hasse().len());
        for &(a, b) in shape.hasse() {
            let key = edge_key(shape.name(a), shape.name(b));
            match mats.get(&key) {
                Some(x) => m.push(x.clone()),
                None if d[a] == 0 || d[b] == 0 => m.push(FieldMatrix::zeros(field, d[b], d[a])),
                None => return Err(RepError::ShapeMismatch(format!("missing matrix for `{key}`"))),
            }
        }
        Representation::new(pres, field, d, m)
    }

    /// The constant representation with value `field^d` and identity maps.
    pub fn constant(pres: &ExitPresentation, field: Field, d: usize) -> Self {
        let n = pres.shape().len();
        let mats = vec![FieldMatrix::identity(field, d); pres.shape().hasse().len()];
        Representation::new(pres.clone(), field, vec![d; n], mats).expect("constant functors are functorial")
    }

    pub fn zero(pres: &ExitPresentation, field: Field) -> Self {
        let mats = vec![FieldMatrix::zeros(field, 0, 0); pres.shape().hasse().len()];
        Representation::new(pres.clone(), field, vec![0; pres.shape().len()], mats)
            .expect("zero functor is functorial")
    }

    pub fn pres(&self) -> &ExitPresentation {
        &self.pres
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim_of(&self, name: &str) -> Option<usize> {
        self.pres.shape().index_of(name).map(|i| self.dims[i])
    }

    /// Matrices aligned with the Hasse edges of the shape.
    pub fn edge_matrices(&self) -> &[FieldMatrix] {
        &self.mats
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    /// The map `F(a) → F(b)` for `a ≤ b`.
    pub fn map(&self, a: usize, b: usize) -> Option<&FieldMatrix> {
        self.maps.get(&(a, b))
    }

    /// The matrix on the Hasse edge `a → b`.
    pub fn specialization(&self, a: &str, b: &str) -> Result<FieldMatrix, RepError> {
        let shape = self.pres.shape();
        let key = edge_key(a, b);
        let (Some(i), Some(j)) = (shape.index_of(a), shape.index_of(b)) else {
            return Err(RepError::UnknownEdge(key));
        };
        let pos = shape.hasse().iter().position(|&e| e == (i, j)).ok_or(RepError::UnknownEdge(key))?;
        Ok(self.mats[pos].clone())
    }

    /// Constructible over the base iff every marked edge carries an
    /// invertible matrix.
    pub fn is_p_constructible(&self) -> Constructibility {
        let shape = self.pres.shape();
        let offenders: Vec<[String; 2]> = shape
            .hasse()
            .iter()
            .zip(&self.mats)
            .filter(|(&(a, b), m)| self.pres.is_marked(a, b) && !m.is_invertible())
            .map(|(&(a, b), _)| [shape.name(a).to_owned(), shape.name(b).to_owned()])
            .collect();
        Constructibility { constructible: offenders.is_empty(), offenders }
    }

    /// The same functor viewed over a different stratification of the same
    /// shape.
    pub fn with_presentation(&self, pres: &ExitPresentation) -> Result<Self, RepError> {
        if pres.shape() != self.pres.shape() {
            return Err(RepError::ShapeMismatch("presentations have different shapes".into()));
        }
        Ok(Representation { pres: pres.clone(), ..self.clone() })
    }

    /// Restriction to the preimage of a locally closed subset of the base.
    pub fn restrict(&self, spec: &SubposetSpec) -> Result<Self, RepError> {
        let sub = self.pres.restrict(spec)?;
        self.restrict_to(sub)
    }

    /// Restriction to a presentation whose shape is a full subposet of this
    /// one (matched by element names).
    fn restrict_to(&self, sub: ExitPresentation) -> Result<Self, RepError> {
        let big = self.pres.shape();
        let small = sub.shape();
        let idx: Vec<usize> = small
            .names()
            .iter()
            .map(|n| big.index_of(n).ok_or_else(|| RepError::ShapeMismatch(format!("`{n}` not in shape"))))
            .collect::<Result<_, _>>()?;
        let dims = idx.iter().map(|&i| self.dims[i]).collect();
        let mats = small.hasse().iter().map(|&(a, b)| self.maps[&(idx[a], idx[b])].clone()).collect();
        Representation::new(sub, self.field, dims, mats)
    }

    pub fn to_json(&self) -> RepresentationJson {
        let shape = self.pres.shape();
        RepresentationJson {
            pres: self.pres.to_json(),
            field: FieldJson { p: self.field.characteristic() },
            dims: shape.names().iter().cloned().zip(self.dims.iter().copied()).collect(),
            mats: shape
                .hasse()
                .iter()
                .zip(&self.mats)
                .map(|(&(a, b), m)| (edge_key(shape.name(a), shape.name(b)), matrix_to_json(m)))
                .collect(),
        }
    }

    pub fn from_json(json: &RepresentationJson) -> Result<Self, RepError> {
        let pres = ExitPresentation::from_json(&json.pres)?;
        let field = json.field.to_field()?;
        let shape = pres.shape();
        let mut mats = BTreeMap::new();
        for (key, rows) in &json.mats {
            let (a, b) = key.split_once("->").ok_or_else(|| RepError::UnknownEdge(key.clone()))?;
            let (Some(i), Some(j)) = (shape.index_of(a), shape.index_of(b)) else {
                return Err(RepError::UnknownEdge(key.clone()));
            };
            let d = |x: usize| json.dims.get(shape.name(x)).copied().unwrap_or(0);
            mats.insert(key.clone(), matrix_from_json(field, d(j), d(i), rows, key)?);
        }
        Representation::from_named(pres, field, &json.dims, &mats)
    }
}

/// Composite maps for all comparable pairs, checking that every pair of
/// parallel Hasse paths agrees.
fn composite_maps(
    pres: &ExitPresentation,
    field: Field,
    dims: &[usize],
    mats: &[FieldMatrix],
) -> Result<BTreeMap<(usize, usize), FieldMatrix>, RepError> {
    let shape = pres.shape();
    let order = shape.linear_extension();
    let mut incoming: Vec<Vec<(usize, &FieldMatrix)>> = vec![Vec::new(); shape.len()];
    for (&(a, b), m) in shape.hasse().iter().zip(mats) {
        incoming[b].push((a, m));
    }
    let mut maps = BTreeMap::new();
    for &a in &order {
        maps.insert((a, a), FieldMatrix::identity(field, dims[a]));
        for &b in &order {
            if b == a || !shape.leq(a, b) {
                continue;
            }
            let mut found: Option<FieldMatrix> = None;
            for &(c, m) in &incoming[b] {
                let Some(prefix) = maps.get(&(a, c)) else { continue };
                let candidate = m.mul(prefix);
                match &found {
                    Some(f) if *f != candidate => {
                        return Err(RepError::NotFunctorial(
                            shape.name(a).to_owned(),
                            shape.name(b).to_owned(),
                        ));
                    }
                    Some(_) => {}
                    None => found = Some(candidate),
                }
            }
            maps.insert((a, b), found.expect("every strict relation factors through a cover"));
        }
    }
    Ok(maps)
}

/// Wire form `{ "pres", "field": {"p": 0 | prime}, "dims", "mats" }`; `p = 0`
/// means the rationals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepresentationJson {
    pub pres: ExitPresentationJson,
    pub field: FieldJson,
    #[serde(default)]
    pub dims: BTreeMap<String, usize>,
    #[serde(default)]
    pub mats: BTreeMap<String, Vec<Vec<EntryJson>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldJson {
    pub p: u64,
}

impl FieldJson {
    pub fn to_field(self) -> Result<Field, LinalgError> {
        if self.p == 0 {
            Ok(Field::Rationals)
        } else {
            Field::prime(self.p)
        }
    }
}

/// Matrix entry: an integer, or a string `"a/b"` for non-integral rationals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntryJson {
    Int(i64),
    Text(String),
}

fn matrix_to_json(m: &FieldMatrix) -> Vec<Vec<EntryJson>> {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| {
                    let x = &m[(i, j)];
                    match x.is_integer().then(|| x.to_integer().to_i64()).flatten() {
                        Some(v) => EntryJson::Int(v),
                        None => EntryJson::Text(x.to_string()),
                    }
                })
                .collect()
        })
        .collect()
}

fn matrix_from_json(
    field: Field,
    rows: usize,
    cols: usize,
    json: &[Vec<EntryJson>],
    key: &str,
) -> Result<FieldMatrix, RepError> {
    let bad = || RepError::ShapeMismatch(format!("matrix on `{key}` must be {rows}×{cols}"));
    // a matrix with no columns may be written as `[]`
    if json.len() != rows && !(cols == 0 && json.is_empty()) {
        return Err(bad());
    }
    let mut m = FieldMatrix::zeros(field, rows, cols);
    for (i, row) in json.iter().enumerate() {
        if row.len() != cols {
            return Err(bad());
        }
        for (j, e) in row.iter().enumerate() {
            let x = match e {
                EntryJson::Int(v) => field.from_i64(*v),
                EntryJson::Text(t) => {
                    let q: BigRational = t
                        .parse()
                        .map_err(|_| RepError::ShapeMismatch(format!("bad entry `{t}` on `{key}`")))?;
                    field
                        .normalize(&q)
                        .ok_or_else(|| RepError::ShapeMismatch(format!("`{t}` is not defined in {field}")))?
                }
            };
            m.set(i, j, x);
        }
    }
    Ok(m)
}

/// Which adjoint of restriction to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KanMode {
    /// Left adjoint: colimit over `{u ∈ S : u ≤ x}`.
    LowerShriek,
    /// Right adjoint: limit over `{u ∈ S : x ≤ u}`.
    LowerStar,
}

/// Value of a pointwise Kan extension at one element, with its universal legs.
enum Pointwise {
    /// The element lies in the subset; the value is the original one.
    Inside(usize),
    Colim { members: Vec<usize>, colim: Colimit },
    Lim { members: Vec<usize>, lim: Limit },
    Empty,
}

/// Pointwise Kan extension of `rep` (over the restriction of `ambient` to
/// `spec`) back to all of `ambient`. Values inside the subset are kept as they
/// are, so restricting the result returns `rep` exactly.
pub fn kan_extend(
    ambient: &ExitPresentation,
    spec: &SubposetSpec,
    rep: &Representation,
    mode: KanMode,
) -> Result<Representation, RepError> {
    let sub = ambient.restrict(spec)?;
    if sub != *rep.pres() {
        return Err(RepError::ShapeMismatch("representation is not over the restricted presentation".into()));
    }
    let field = rep.field();
    let shape = ambient.shape();
    let small = sub.shape();
    // ambient index -> index in the subset shape
    let inside: Vec<Option<usize>> = shape.names().iter().map(|n| small.index_of(n)).collect();
    let sub_leq = |u: usize, v: usize| small.leq(u, v);

    let mut points = Vec::with_capacity(shape.len());
    let mut dims = Vec::with_capacity(shape.len());
    for x in 0..shape.len() {
        if let Some(u) = inside[x] {
            points.push(Pointwise::Inside(u));
            dims.push(rep.dims()[u]);
            continue;
        }
        let members: Vec<usize> = (0..shape.len())
            .filter(|&y| match mode {
                KanMode::LowerShriek => shape.leq(y, x),
                KanMode::LowerStar => shape.leq(x, y),
            })
            .filter_map(|y| inside[y])
            .collect();
        if members.is_empty() {
            points.push(Pointwise::Empty);
            dims.push(0);
            continue;
        }
        let diagram = comma_diagram(rep, &members, &sub_leq);
        match mode {
            KanMode::LowerShriek => {
                let colim = diagram.colimit()?;
                dims.push(colim.dim);
                points.push(Pointwise::Colim { members, colim });
            }
            KanMode::LowerStar => {
                let lim = diagram.limit()?;
                dims.push(lim.dim);
                points.push(Pointwise::Lim { members, lim });
            }
        }
    }

    let mut mats = Vec::with_capacity(shape.hasse().len());
    for &(x, y) in shape.hasse() {
        let m = match mode {
            KanMode::LowerShriek => {
                // legs F(u) → E(y) for u ≤ x, factored through E(x)
                let leg_into_y = |u: usize| -> FieldMatrix {
                    match &points[y] {
                        Pointwise::Inside(v) => rep.map(u, *v).expect("u ≤ x ≤ y").clone(),
                        Pointwise::Colim { members, colim } => {
                            colim.injections[members.iter().position(|&w| w == u).unwrap()].clone()
                        }
                        _ => unreachable!("a colimit over a nonempty set"),
                    }
                };
                match &points[x] {
                    Pointwise::Inside(u) => leg_into_y(*u),
                    Pointwise::Empty => FieldMatrix::zeros(field, dims[y], 0),
                    Pointwise::Colim { members, colim } => {
                        let legs: Vec<FieldMatrix> = members.iter().map(|&u| leg_into_y(u)).collect();
                        colim.factor(field, &legs).ok_or_else(|| {
                            RepError::ReassemblyFailed("incompatible cocone in left Kan extension".into())
                        })?
                    }
                    Pointwise::Lim { .. } => unreachable!(),
                }
            }
            KanMode::LowerStar => {
                // legs E(x) → F(u) for y ≤ u, factored through E(y)
                let leg_from_x = |u: usize| -> FieldMatrix {
                    match &points[x] {
                        Pointwise::Inside(v) => rep.map(*v, u).expect("x ≤ y ≤ u").clone(),
                        Pointwise::Lim { members, lim } => {
                            lim.projections[members.iter().position(|&w| w == u).unwrap()].clone()
                        }
                        _ => unreachable!("a limit over a nonempty set"),
                    }
                };
                match &points[y] {
                    Pointwise::Inside(u) => leg_from_x(*u),
                    Pointwise::Empty => FieldMatrix::zeros(field, 0, dims[x]),
                    Pointwise::Lim { members, lim } => {
                        let legs: Vec<FieldMatrix> = members.iter().map(|&u| leg_from_x(u)).collect();
                        lim.factor(field, &legs).ok_or_else(|| {
                            RepError::ReassemblyFailed("incompatible cone in right Kan extension".into())
                        })?
                    }
                    Pointwise::Colim { .. } => unreachable!(),
                }
            }
        };
        mats.push(m);
    }
    Representation::new(ambient.clone(), field, dims, mats)
}

/// The diagram of `rep` on `members` (indices in `rep`'s shape), with one edge
/// per covering relation inside `members`.
fn comma_diagram(rep: &Representation, members: &[usize], leq: &dyn Fn(usize, usize) -> bool) -> VectorDiagram {
    let mut edges = Vec::new();
    for (i, &u) in members.iter().enumerate() {
        for (j, &v) in members.iter().enumerate() {
            if u == v || !leq(u, v) {
                continue;
            }
            let covered = members.iter().any(|&w| w != u && w != v && leq(u, w) && leq(w, v));
            if !covered {
                edges.push((i, j, rep.map(u, v).expect("u ≤ v").clone()));
            }
        }
    }
    VectorDiagram {
        field: rep.field(),
        dims: members.iter().map(|&u| rep.dims()[u]).collect(),
        edges,
    }
}

/// `j_!` or `j_*` along an open subset of the base.
pub fn kan_extend_open(
    ambient: &ExitPresentation,
    open: &SubposetSpec,
    rep: &Representation,
    mode: KanMode,
) -> Result<Representation, RepError> {
    if !open.is_open() {
        return Err(RepError::ShapeMismatch("subset is not open".into()));
    }
    kan_extend(ambient, open, rep, mode)
}

/// `i_*` along a closed subset of the base.
pub fn kan_extend_closed(
    ambient: &ExitPresentation,
    closed: &SubposetSpec,
    rep: &Representation,
) -> Result<Representation, RepError> {
    if !closed.is_closed() {
        return Err(RepError::ShapeMismatch("subset is not closed".into()));
    }
    kan_extend(ambient, closed, rep, KanMode::LowerStar)
}

/// A representation split along an open subset `U` and its closed complement
/// `Z`. `gluing[z]` is the unit map `F(z) → (j_* j^* F)(z)` for each element of
/// the closed part's shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecollementData {
    pub open_spec: SubposetSpec,
    pub closed_spec: SubposetSpec,
    pub open_part: Representation,
    pub closed_part: Representation,
    /// `j_* j^* F` on the whole shape.
    pub pushforward: Representation,
    pub gluing: Vec<FieldMatrix>,
}

pub fn recollement_decompose(rep: &Representation, open: &SubposetSpec) -> Result<RecollementData, RepError> {
    if !open.is_open() {
        return Err(RepError::ShapeMismatch("subset is not open".into()));
    }
    let closed = open.complement()?;
    let pres = rep.pres();
    let open_part = rep.restrict(open)?;
    let closed_part = rep.restrict(&closed)?;
    let pushforward = kan_extend(pres, open, &open_part, KanMode::LowerStar)?;
    let shape = pres.shape();
    let sub_open = open_part.pres().shape();
    let mut gluing = Vec::new();
    for name in closed_part.pres().shape().names() {
        let z = shape.index_of(name).unwrap();
        let above: Vec<usize> = (0..shape.len())
            .filter(|&u| shape.leq(z, u) && sub_open.index_of(shape.name(u)).is_some())
            .collect();
        let target_dim = pushforward.dims()[z];
        if above.is_empty() {
            gluing.push(FieldMatrix::zeros(rep.field(), target_dim, rep.dims()[z]));
            continue;
        }
        // the unit is determined by its composites with the maps to U
        let legs: Vec<FieldMatrix> = above.iter().map(|&u| rep.map(z, u).unwrap().clone()).collect();
        let proj: Vec<FieldMatrix> = above.iter().map(|&u| pushforward.map(z, u).unwrap().clone()).collect();
        let stacked_proj = FieldMatrix::vstack(rep.field(), target_dim, &proj);
        let stacked_legs = FieldMatrix::vstack(rep.field(), rep.dims()[z], &legs);
        let g = stacked_proj
            .solve(&stacked_legs)
            .ok_or_else(|| RepError::ReassemblyFailed(format!("no unit map at `{name}`")))?;
        gluing.push(g);
    }
    let data = RecollementData { open_spec: open.clone(), closed_spec: closed, open_part, closed_part, pushforward, gluing };
    let rebuilt = data.reassemble()?;
    if rebuilt != *rep {
        return Err(RepError::ReassemblyFailed("reassembled representation differs".into()));
    }
    Ok(data)
}

impl RecollementData {
    /// Rebuilds the representation: maps inside each part come from the
    /// parts, a map `z → u` across is the pushforward leg after the gluing.
    pub fn reassemble(&self) -> Result<Representation, RepError> {
        let pres = self.pushforward.pres();
        let shape = pres.shape();
        let field = self.pushforward.field();
        let open_shape = self.open_part.pres().shape();
        let closed_shape = self.closed_part.pres().shape();
        let locate = |x: usize| -> (bool, usize) {
            match open_shape.index_of(shape.name(x)) {
                Some(i) => (true, i),
                None => (false, closed_shape.index_of(shape.name(x)).expect("parts cover the shape")),
            }
        };
        let dims: Vec<usize> = (0..shape.len())
            .map(|x| match locate(x) {
                (true, i) => self.open_part.dims()[i],
                (false, i) => self.closed_part.dims()[i],
            })
            .collect();
        let mut mats = Vec::new();
        for &(x, y) in shape.hasse() {
            let m = match (locate(x), locate(y)) {
                ((true, i), (true, j)) => self.open_part.map(i, j).unwrap().clone(),
                ((false, i), (false, j)) => self.closed_part.map(i, j).unwrap().clone(),
                ((false, i), (true, _)) => self.pushforward.map(x, y).unwrap().mul(&self.gluing[i]),
                ((true, _), (false, _)) => {
                    return Err(RepError::ReassemblyFailed("open part maps into the closed part".into()))
                }
            };
            mats.push(m);
        }
        Representation::new(pres.clone(), field, dims, mats)
    }
}

/// Dimension of the space of natural transformations `a → b`.
pub fn hom_dimension(a: &Representation, b: &Representation) -> Result<usize, RepError> {
    if a.pres().shape() != b.pres().shape() || a.field() != b.field() {
        return Err(RepError::ShapeMismatch("representations over different shapes".into()));
    }
    let field = a.field();
    let shape = a.pres().shape();
    let mut offsets = vec![0];
    for x in 0..shape.len() {
        offsets.push(offsets[x] + b.dims()[x] * a.dims()[x]);
    }
    let unknowns = offsets[shape.len()];
    // η_x is dims_b[x] × dims_a[x], unknown (i, j) at offsets[x] + i * dims_a[x] + j
    let var = |x: usize, i: usize, j: usize| offsets[x] + i * a.dims()[x] + j;
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    for (k, &(s, t)) in shape.hasse().iter().enumerate() {
        let (ma, mb) = (&a.edge_matrices()[k], &b.edge_matrices()[k]);
        // (B η_s − η_t A)_{i j} = 0 with i < dims_b[t], j < dims_a[s]
        for i in 0..b.dims()[t] {
            for j in 0..a.dims()[s] {
                let mut row = vec![BigRational::zero(); unknowns];
                for l in 0..b.dims()[s] {
                    let c = var(s, l, j);
                    row[c] = field.add(&row[c], &mb[(i, l)]);
                }
                for l in 0..a.dims()[t] {
                    let c = var(t, i, l);
                    row[c] = field.sub(&row[c], &ma[(l, j)]);
                }
                rows.push(row);
            }
        }
    }
    if rows.is_empty() {
        return Ok(unknowns);
    }
    let data: Vec<BigRational> = rows.iter().flatten().cloned().collect();
    let system = FieldMatrix::from_entries(field, rows.len(), unknowns, data);
    Ok(unknowns - system.rank())
}

/// An isomorphism `a ≅ b` over a prime field found by exhaustive search over
/// basis changes, if one exists. Intended for dimensions ≤ 3.
pub fn find_isomorphism(a: &Representation, b: &Representation) -> Result<Option<Vec<FieldMatrix>>, RepError> {
    let Field::Prime(p) = a.field() else {
        return Err(RepError::Unsupported("isomorphism search needs a prime field".into()));
    };
    if a.pres().shape() != b.pres().shape() || a.field() != b.field() {
        return Err(RepError::ShapeMismatch("representations over different shapes".into()));
    }
    if a.dims() != b.dims() {
        return Ok(None);
    }
    if a.dims().iter().any(|&d| d > 3) {
        return Err(RepError::Unsupported("isomorphism search is limited to dimension 3".into()));
    }
    let field = a.field();
    let shape = a.pres().shape();
    let order = shape.linear_extension();
    let groups: BTreeMap<usize, Vec<FieldMatrix>> = a
        .dims()
        .iter()
        .map(|&d| (d, count::general_linear(p, d).into_iter().map(|g| g.to_field(field)).collect()))
        .collect();
    let mut chosen: Vec<Option<FieldMatrix>> = vec![None; shape.len()];

    fn search(
        k: usize,
        order: &[usize],
        a: &Representation,
        b: &Representation,
        groups: &BTreeMap<usize, Vec<FieldMatrix>>,
        chosen: &mut Vec<Option<FieldMatrix>>,
    ) -> bool {
        let Some(&x) = order.get(k) else { return true };
        let shape = a.pres().shape();
        for g in &groups[&a.dims()[x]] {
            let ok = shape.hasse().iter().enumerate().all(|(e, &(s, t))| {
                let (gs, gt) = match (s == x, t == x) {
                    (true, _) => match &chosen[t] {
                        Some(gt) => (g, gt),
                        None => return true,
                    },
                    (_, true) => match &chosen[s] {
                        Some(gs) => (gs, g),
                        None => return true,
                    },
                    _ => return true,
                };
                b.edge_matrices()[e].mul(gs) == gt.mul(&a.edge_matrices()[e])
            });
            if ok {
                chosen[x] = Some(g.clone());
                if search(k + 1, order, a, b, groups, chosen) {
                    return true;
                }
                chosen[x] = None;
            }
        }
        false
    }

    if search(0, &order, a, b, &groups, &mut chosen) {
        Ok(Some(chosen.into_iter().map(|g| g.unwrap()).collect()))
    } else {
        Ok(None)
    }
}
