//! Finite categories with explicit hom-sets and composition tables.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poset::Poset;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CategoryError {
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown morphism `{0}`")]
    UnknownMorphism(String),
    #[error("duplicate name `{0}`")]
    Duplicate(String),
    #[error("`{0}` is not an endomorphism of its object")]
    BadIdentity(String),
    #[error("composite `{0}` ∘ `{1}` is missing")]
    NotTotal(String, String),
    #[error("composite `{0}` ∘ `{1}` has the wrong endpoints")]
    BadComposite(String, String),
    #[error("unit law fails for `{0}`")]
    UnitLaw(String),
    #[error("associativity fails for `{0}` ∘ `{1}` ∘ `{2}`")]
    NotAssociative(String, String, String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Morphism {
    pub name: String,
    pub source: usize,
    pub target: usize,
}

/// A finite category. `compose[(g, f)] = g ∘ f` for `f: x → y`, `g: y → z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinCategory {
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    identities: Vec<usize>,
    compose: HashMap<(usize, usize), usize>,
    homs: BTreeMap<(usize, usize), Vec<usize>>,
}

impl FinCategory {
    /// Builds a category from raw tables; only endpoint consistency is
    /// checked here. Use [`FinCategory::validate`] for the category axioms.
    pub fn new(
        objects: Vec<String>,
        morphisms: Vec<Morphism>,
        identities: Vec<usize>,
        compose: HashMap<(usize, usize), usize>,
    ) -> Result<Self, CategoryError> {
        let mut seen = BTreeSet::new();
        for o in &objects {
            if !seen.insert(o) {
                return Err(CategoryError::Duplicate(o.clone()));
            }
        }
        let mut seen = BTreeSet::new();
        for m in &morphisms {
            if !seen.insert(&m.name) {
                return Err(CategoryError::Duplicate(m.name.clone()));
            }
            if m.source >= objects.len() || m.target >= objects.len() {
                return Err(CategoryError::UnknownObject(format!("of `{}`", m.name)));
            }
        }
        if identities.len() != objects.len() {
            return Err(CategoryError::BadIdentity("identity list length".into()));
        }
        for (x, &id) in identities.iter().enumerate() {
            let m = morphisms.get(id).ok_or_else(|| CategoryError::UnknownMorphism(format!("#{id}")))?;
            if m.source != x || m.target != x {
                return Err(CategoryError::BadIdentity(m.name.clone()));
            }
        }
        for (&(g, f), &h) in &compose {
            let (Some(mg), Some(mf), Some(mh)) = (morphisms.get(g), morphisms.get(f), morphisms.get(h))
            else {
                return Err(CategoryError::UnknownMorphism("in composition table".into()));
            };
            if mf.target != mg.source || mh.source != mf.source || mh.target != mg.target {
                return Err(CategoryError::BadComposite(mg.name.clone(), mf.name.clone()));
            }
        }
        let mut homs: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (i, m) in morphisms.iter().enumerate() {
            homs.entry((m.source, m.target)).or_default().push(i);
        }
        Ok(FinCategory { objects, morphisms, identities, compose, homs })
    }

    /// The thin category of a poset: one morphism `x ≤ y` per relation.
    pub fn from_poset(p: &Poset) -> Self {
        let rel: Vec<(usize, usize)> = (0..p.len())
            .flat_map(|a| p.up_set(a).into_iter().map(move |b| (a, b)))
            .collect();
        Self::thin(p.names().to_vec(), &rel)
    }

    /// Thin category on a reflexive, transitive relation given as pairs.
    pub fn thin(objects: Vec<String>, relation: &[(usize, usize)]) -> Self {
        let mut morphisms = Vec::new();
        let mut index = HashMap::new();
        let mut identities = vec![usize::MAX; objects.len()];
        let mut pairs: Vec<(usize, usize)> = relation.to_vec();
        for x in 0..objects.len() {
            pairs.push((x, x));
        }
        pairs.sort_unstable();
        pairs.dedup();
        for &(a, b) in &pairs {
            let name = if a == b {
                format!("id({})", objects[a])
            } else {
                format!("{}->{}", objects[a], objects[b])
            };
            index.insert((a, b), morphisms.len());
            if a == b {
                identities[a] = morphisms.len();
            }
            morphisms.push(Morphism { name, source: a, target: b });
        }
        let mut compose = HashMap::new();
        for &(a, b) in &pairs {
            for &(b2, c) in pairs.iter().filter(|(s, _)| *s == b) {
                debug_assert_eq!(b, b2);
                if let Some(&h) = index.get(&(a, c)) {
                    compose.insert((index[&(b, c)], index[&(a, b)]), h);
                }
            }
        }
        FinCategory::new(objects, morphisms, identities, compose).expect("thin categories are well formed")
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn morphisms(&self) -> &[Morphism] {
        &self.morphisms
    }

    pub fn morphism_index(&self, name: &str) -> Option<usize> {
        self.morphisms.iter().position(|m| m.name == name)
    }

    pub fn identity(&self, x: usize) -> usize {
        self.identities[x]
    }

    pub fn is_identity(&self, f: usize) -> bool {
        self.identities[self.morphisms[f].source] == f
    }

    pub fn hom(&self, x: usize, y: usize) -> &[usize] {
        self.homs.get(&(x, y)).map_or(&[], Vec::as_slice)
    }

    pub fn compose(&self, g: usize, f: usize) -> Option<usize> {
        self.compose.get(&(g, f)).copied()
    }

    pub fn composition_table(&self) -> &HashMap<(usize, usize), usize> {
        &self.compose
    }

    /// Whether every composable pair has a composite in the table.
    pub fn is_total(&self) -> bool {
        self.first_missing_composite().is_none()
    }

    fn first_missing_composite(&self) -> Option<(usize, usize)> {
        for (f, mf) in self.morphisms.iter().enumerate() {
            for y in 0..self.objects.len() {
                for &g in self.hom(mf.target, y) {
                    if !self.compose.contains_key(&(g, f)) {
                        return Some((g, f));
                    }
                }
            }
        }
        None
    }

    /// Checks totality, unit laws and associativity exhaustively.
    pub fn validate(&self) -> Result<(), CategoryError> {
        if let Some((g, f)) = self.first_missing_composite() {
            return Err(CategoryError::NotTotal(
                self.morphisms[g].name.clone(),
                self.morphisms[f].name.clone(),
            ));
        }
        for (f, m) in self.morphisms.iter().enumerate() {
            if self.compose(f, self.identities[m.source]) != Some(f)
                || self.compose(self.identities[m.target], f) != Some(f)
            {
                return Err(CategoryError::UnitLaw(m.name.clone()));
            }
        }
        for (f, mf) in self.morphisms.iter().enumerate() {
            for y in 0..self.objects.len() {
                for &g in self.hom(mf.target, y) {
                    let gf = self.compose[&(g, f)];
                    for z in 0..self.objects.len() {
                        for &h in self.hom(y, z) {
                            let left = self.compose[&(h, gf)];
                            let right = self.compose[&(self.compose[&(h, g)], f)];
                            if left != right {
                                return Err(CategoryError::NotAssociative(
                                    self.morphisms[h].name.clone(),
                                    self.morphisms[g].name.clone(),
                                    self.morphisms[f].name.clone(),
                                ));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// A two-sided inverse of `f`, if one is recorded in the table.
    pub fn inverse(&self, f: usize) -> Option<usize> {
        let m = &self.morphisms[f];
        self.hom(m.target, m.source).iter().copied().find(|&g| {
            self.compose(g, f) == Some(self.identities[m.source])
                && self.compose(f, g) == Some(self.identities[m.target])
        })
    }

    pub fn is_invertible(&self, f: usize) -> bool {
        self.inverse(f).is_some()
    }

    /// Every endomorphism is invertible.
    pub fn is_layered(&self) -> bool {
        (0..self.objects.len()).all(|x| self.hom(x, x).iter().all(|&e| self.is_invertible(e)))
    }

    /// Some `e = e ∘ e` other than an identity.
    pub fn has_nontrivial_idempotent(&self) -> bool {
        (0..self.objects.len()).any(|x| {
            self.hom(x, x)
                .iter()
                .any(|&e| e != self.identities[x] && self.compose(e, e) == Some(e))
        })
    }

    /// Every morphism between objects with the same label is invertible.
    pub fn is_conservative_over(&self, label: &[usize]) -> bool {
        self.morphisms
            .iter()
            .enumerate()
            .all(|(f, m)| label[m.source] != label[m.target] || self.is_invertible(f))
    }

    /// Representative (least index) of each object's isomorphism class.
    pub fn iso_representatives(&self) -> Vec<usize> {
        let mut rep: Vec<usize> = (0..self.objects.len()).collect();
        for x in 0..self.objects.len() {
            for y in x + 1..self.objects.len() {
                if rep[y] == y && self.hom(x, y).iter().any(|&f| self.is_invertible(f)) {
                    rep[y] = rep[x];
                }
            }
        }
        rep
    }

    pub fn full_subcategory(&self, keep: &[usize]) -> FinCategory {
        let keep_set: BTreeSet<usize> = keep.iter().copied().collect();
        let obj_pos: BTreeMap<usize, usize> =
            keep_set.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let mut mor_pos = HashMap::new();
        let mut morphisms = Vec::new();
        for (f, m) in self.morphisms.iter().enumerate() {
            if let (Some(&s), Some(&t)) = (obj_pos.get(&m.source), obj_pos.get(&m.target)) {
                mor_pos.insert(f, morphisms.len());
                morphisms.push(Morphism { name: m.name.clone(), source: s, target: t });
            }
        }
        let identities = keep_set.iter().map(|&x| mor_pos[&self.identities[x]]).collect();
        let compose = self
            .compose
            .iter()
            .filter_map(|(&(g, f), &h)| Some(((*mor_pos.get(&g)?, *mor_pos.get(&f)?), *mor_pos.get(&h)?)))
            .collect();
        let objects = keep_set.iter().map(|&x| self.objects[x].clone()).collect();
        FinCategory::new(objects, morphisms, identities, compose).expect("full subcategories are well formed")
    }

    /// Full subcategory on one object per isomorphism class.
    pub fn skeleton(&self) -> FinCategory {
        let reps = self.iso_representatives();
        let keep: Vec<usize> = (0..self.objects.len()).filter(|&x| reps[x] == x).collect();
        self.full_subcategory(&keep)
    }

    /// `|hom(x, y)|` for every ordered pair of objects.
    pub fn hom_sizes(&self) -> BTreeMap<(String, String), usize> {
        let mut out = BTreeMap::new();
        for x in 0..self.objects.len() {
            for y in 0..self.objects.len() {
                out.insert((self.objects[x].clone(), self.objects[y].clone()), self.hom(x, y).len());
            }
        }
        out
    }

    /// Graphviz rendering with one arrow per non-identity morphism.
    pub fn to_dot(&self, graph_name: &str) -> String {
        let mut out = format!("digraph {graph_name} {{\n");
        for o in &self.objects {
            out.push_str(&format!("  {};\n", quote(o)));
        }
        for (f, m) in self.morphisms.iter().enumerate() {
            if self.is_identity(f) {
                continue;
            }
            out.push_str(&format!(
                "  {} -> {} [label={}];\n",
                quote(&self.objects[m.source]),
                quote(&self.objects[m.target]),
                quote(&m.name)
            ));
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> FinCategoryJson {
        let name = |f: usize| self.morphisms[f].name.clone();
        let mut composition: Vec<[String; 3]> = self
            .compose
            .iter()
            .filter(|(&(g, f), _)| !self.is_identity(g) && !self.is_identity(f))
            .map(|(&(g, f), &h)| [name(g), name(f), name(h)])
            .collect();
        composition.sort();
        FinCategoryJson {
            objects: self.objects.clone(),
            morphisms: self
                .morphisms
                .iter()
                .map(|m| MorphismJson {
                    name: m.name.clone(),
                    source: self.objects[m.source].clone(),
                    target: self.objects[m.target].clone(),
                })
                .collect(),
            identities: self.identities.iter().map(|&i| name(i)).collect(),
            composition,
        }
    }

    pub fn from_json(j: &FinCategoryJson) -> Result<Self, CategoryError> {
        let obj: HashMap<&str, usize> =
            j.objects.iter().enumerate().map(|(i, o)| (o.as_str(), i)).collect();
        let find_obj = |s: &str| obj.get(s).copied().ok_or_else(|| CategoryError::UnknownObject(s.to_owned()));
        let morphisms = j
            .morphisms
            .iter()
            .map(|m| {
                Ok(Morphism { name: m.name.clone(), source: find_obj(&m.source)?, target: find_obj(&m.target)? })
            })
            .collect::<Result<Vec<_>, CategoryError>>()?;
        let mor: HashMap<&str, usize> =
            morphisms.iter().enumerate().map(|(i, m)| (m.name.as_str(), i)).collect();
        let find_mor = |s: &str| mor.get(s).copied().ok_or_else(|| CategoryError::UnknownMorphism(s.to_owned()));
        let identities = j.identities.iter().map(|s| find_mor(s)).collect::<Result<Vec<_>, _>>()?;
        let mut compose = HashMap::new();
        for [g, f, h] in &j.composition {
            compose.insert((find_mor(g)?, find_mor(f)?), find_mor(h)?);
        }
        for (f, m) in morphisms.iter().enumerate() {
            if let (Some(&s), Some(&t)) = (identities.get(m.source), identities.get(m.target)) {
                compose.entry((f, s)).or_insert(f);
                compose.entry((t, f)).or_insert(f);
            }
        }
        FinCategory::new(j.objects.clone(), morphisms, identities, compose)
    }
}

pub(crate) fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismJson {
    pub name: String,
    pub source: String,
    pub target: String,
}

/// Wire form; `composition` lists triples `[g, f, g∘f]`. Composites with an
/// identity are implied and omitted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinCategoryJson {
    pub objects: Vec<String>,
    pub morphisms: Vec<MorphismJson>,
    pub identities: Vec<String>,
    pub composition: Vec<[String; 3]>,
}

impl Serialize for FinCategory {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for FinCategory {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = FinCategoryJson::deserialize(d)?;
        FinCategory::from_json(&j).map_err(serde::de::Error::custom)
    }
}

/// The noncommutative triangle: objects `k, b, r`, generators `f: k → b`,
/// `g: b → r`, `h: k → r`, with `g ∘ f ≠ h`.
pub fn noncommutative_triangle() -> FinCategory {
    let objects = vec!["k".to_string(), "b".to_string(), "r".to_string()];
    let m = |name: &str, s: usize, t: usize| Morphism { name: name.into(), source: s, target: t };
    let morphisms = vec![
        m("id(k)", 0, 0),
        m("id(b)", 1, 1),
        m("id(r)", 2, 2),
        m("f", 0, 1),
        m("g", 1, 2),
        m("h", 0, 2),
        m("g.f", 0, 2),
    ];
    let mut compose = HashMap::new();
    for (f, mf) in morphisms.iter().enumerate() {
        compose.insert((f, mf.source), f);
        compose.insert((mf.target, f), f);
    }
    compose.insert((4, 3), 6);
    FinCategory::new(objects, morphisms, vec![0, 1, 2], compose).unwrap()
}
