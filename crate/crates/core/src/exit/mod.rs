//! Presentations of exit-path categories as posets over posets.
//!
//! An [`ExitPresentation`] is a surjective monotone map `strat: R → P`. The
//! marks `W` are the Hasse edges of `R` on which `strat` is constant; the
//! exit-path category is the localization `R[W⁻¹]`.

pub mod localize;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::category::{quote, CategoryError, FinCategory};
use crate::complex::{ComplexError, StratifiedComplex};
use crate::homlin::{Coefficients, HomologyResult};
use crate::poset::{MonotoneMap, MonotoneMapJson, Poset, PosetError, PosetJson, SubposetSpec};

pub use localize::{
    localize_hocat, Localization, LocalizationReport, LocalizeOptions, Zigzag, DEFAULT_DEPTH,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExitError {
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error("stratification misses `{0}`")]
    NotSurjective(String),
    #[error("unknown stratum `{0}`")]
    UnknownStratum(String),
    #[error("{0}")]
    Mismatch(String),
    #[error("search depth must be at least 2, got {0}")]
    InvalidDepth(usize),
    #[error("zigzag classes still changing at depth {}", report.search_depth)]
    DepthExhausted { report: Box<LocalizationReport> },
}

/// `strat: shape → base`, monotone and surjective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExitPresentation {
    strat: MonotoneMap,
}

/// Size bookkeeping for [`ExitPresentation::finiteness`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinitenessReport {
    pub finite: bool,
    pub shape: usize,
    pub hasse: usize,
    pub marks: usize,
}

impl ExitPresentation {
    pub fn new(strat: MonotoneMap) -> Result<Self, ExitError> {
        if let Some(t) = strat.first_missed() {
            return Err(ExitError::NotSurjective(strat.target().name(t).to_owned()));
        }
        Ok(ExitPresentation { strat })
    }

    /// Every element is its own stratum; no marks.
    pub fn unmarked(shape: &Poset) -> Self {
        ExitPresentation { strat: MonotoneMap::identity(shape) }
    }

    pub fn shape(&self) -> &Poset {
        self.strat.source()
    }

    pub fn base(&self) -> &Poset {
        self.strat.target()
    }

    pub fn strat(&self) -> &MonotoneMap {
        &self.strat
    }

    pub fn is_marked(&self, a: usize, b: usize) -> bool {
        self.strat.apply(a) == self.strat.apply(b)
    }

    /// Hasse edges of the shape on which `strat` is constant.
    pub fn marks(&self) -> Vec<(usize, usize)> {
        self.shape().hasse().iter().copied().filter(|&(a, b)| self.is_marked(a, b)).collect()
    }

    pub fn mark_names(&self) -> Vec<(String, String)> {
        let s = self.shape();
        self.marks().into_iter().map(|(a, b)| (s.name(a).to_owned(), s.name(b).to_owned())).collect()
    }

    /// Face poset over the stratifying poset.
    pub fn presentation_of(sc: &StratifiedComplex) -> Self {
        ExitPresentation { strat: sc.phi().clone() }
    }

    /// Post-composes the stratification with `psi: base → Q`.
    pub fn coarsen(&self, psi: &MonotoneMap) -> Result<Self, ExitError> {
        if psi.source() != self.base() {
            return Err(ExitError::Mismatch("coarsening map must start at the base poset".into()));
        }
        ExitPresentation::new(self.strat.then(psi)?)
    }

    /// Restriction to the preimage of a locally closed subset of the base.
    pub fn restrict(&self, spec: &SubposetSpec) -> Result<Self, ExitError> {
        if spec.parent != *self.base() {
            return Err(ExitError::Mismatch("subset is not taken in the base poset".into()));
        }
        let members = self.strat.preimage(&spec.members);
        ExitPresentation::new(self.strat.restrict(&members, &spec.members)?)
    }

    /// Restriction to a named subset of the base, classified on the way.
    pub fn restrict_named<S: AsRef<str>>(&self, names: &[S]) -> Result<Self, ExitError> {
        let spec = self.base().classify_named(names)?;
        self.restrict(&spec)
    }

    pub fn product(&self, other: &ExitPresentation) -> Self {
        ExitPresentation { strat: self.strat.product(&other.strat) }
    }

    /// Homology of the classifying space, i.e. of the order complex of the shape.
    pub fn env_homology(&self, coefficients: Coefficients) -> HomologyResult {
        self.shape().order_complex().homology(coefficients)
    }

    /// The restriction to the single stratum `p`.
    pub fn fiber(&self, p: &str) -> Result<Self, ExitError> {
        if self.base().index_of(p).is_none() {
            return Err(ExitError::UnknownStratum(p.to_owned()));
        }
        self.restrict_named(&[p])
    }

    /// The subcategory of the shape keeping identities and the relations that
    /// change stratum. Monotonicity of `strat` makes this relation transitive,
    /// so the result is a thin category.
    pub fn iota(&self) -> FinCategory {
        let s = self.shape();
        let rel: Vec<(usize, usize)> = s
            .strict_relations()
            .into_iter()
            .filter(|&(a, b)| !self.is_marked(a, b))
            .collect();
        FinCategory::thin(s.names().to_vec(), &rel)
    }

    pub fn finiteness(&self) -> FinitenessReport {
        FinitenessReport {
            finite: true,
            shape: self.shape().len(),
            hasse: self.shape().hasse().len(),
            marks: self.marks().len(),
        }
    }

    /// Graphviz rendering of the shape; marked edges are dashed and every
    /// node is labelled with its stratum.
    pub fn shape_dot(&self) -> String {
        let s = self.shape();
        let mut out = String::from("digraph shape {\n");
        for i in 0..s.len() {
            out.push_str(&format!(
                "  {} [label={}];\n",
                quote(s.name(i)),
                quote(&format!("{} : {}", s.name(i), self.base().name(self.strat.apply(i))))
            ));
        }
        for &(a, b) in s.hasse() {
            let style = if self.is_marked(a, b) { " [style=dashed]" } else { "" };
            out.push_str(&format!("  {} -> {}{style};\n", quote(s.name(a)), quote(s.name(b))));
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> ExitPresentationJson {
        ExitPresentationJson { shape: self.shape().to_json(), strat: self.strat.to_json() }
    }

    pub fn from_json(json: &ExitPresentationJson) -> Result<Self, ExitError> {
        let shape = Poset::try_from(json.shape.clone())?;
        ExitPresentation::new(MonotoneMap::from_json(&shape, &json.strat)?)
    }
}

/// Wire form `{ "shape": <poset>, "strat": <monotone map> }`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExitPresentationJson {
    pub shape: PosetJson,
    pub strat: MonotoneMapJson,
}

impl Serialize for ExitPresentation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExitPresentation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = ExitPresentationJson::deserialize(d)?;
        ExitPresentation::from_json(&j).map_err(serde::de::Error::custom)
    }
}

/// Every morphism of the localization between objects in the same stratum is
/// invertible.
pub fn check_conservative_over_p(report: &LocalizationReport, pres: &ExitPresentation) -> bool {
    let label: Vec<usize> = report
        .category
        .objects()
        .iter()
        .map(|o| pres.strat().apply(pres.shape().index_of(o).expect("report objects are shape elements")))
        .collect();
    report.category.is_conservative_over(&label)
}

/// Outcome of comparing the localization of a restriction with the full
/// subcategory of the ambient localization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictionComparison {
    pub certified: bool,
    pub equivalent: bool,
    /// First discrepancy found, for diagnostics.
    pub detail: Option<String>,
}

/// Maps each morphism of `hocat(restrict(pres, spec))` to the ambient
/// localization via its witness zigzag, then checks that this identity-on-objects
/// functor is bijective on hom-sets and preserves composition.
pub fn compare_restriction(
    pres: &ExitPresentation,
    spec: &SubposetSpec,
    options: LocalizeOptions,
) -> Result<RestrictionComparison, ExitError> {
    let sub = pres.restrict(spec)?;
    let mut big = Localization::new(pres, options)?;
    let small = Localization::new(&sub, options)?;
    let certified = big.report().certified && small.report().certified;
    let small_cat = &small.report().category;
    let big_names = big.names().to_vec();
    let fail = |d: String| Ok(RestrictionComparison { certified, equivalent: false, detail: Some(d) });

    let mut image = Vec::with_capacity(small_cat.morphisms().len());
    for f in 0..small_cat.morphisms().len() {
        let text = small.witness(f).render(small.names());
        let Some(word) = Zigzag::parse(&text, &big_names) else {
            return fail(format!("`{text}` does not parse in the ambient shape"));
        };
        match big.classify_word(&word) {
            Some(g) => image.push(g),
            None => return fail(format!("`{text}` has no class in the ambient search")),
        }
    }
    let big_cat = big.report().category.clone();
    let obj = |name: &str| big_cat.object_index(name).expect("restricted objects lie in the shape");
    for x in 0..small_cat.objects().len() {
        for y in 0..small_cat.objects().len() {
            let small_hom = small_cat.hom(x, y);
            let mapped: BTreeSet<usize> = small_hom.iter().map(|&f| image[f]).collect();
            let (bx, by) = (obj(&small_cat.objects()[x]), obj(&small_cat.objects()[y]));
            let big_hom: BTreeSet<usize> = big_cat.hom(bx, by).iter().copied().collect();
            if mapped.len() != small_hom.len() || mapped != big_hom {
                return fail(format!(
                    "hom({}, {}): {} restricted vs {} ambient",
                    small_cat.objects()[x],
                    small_cat.objects()[y],
                    small_hom.len(),
                    big_hom.len()
                ));
            }
        }
    }
    for (&(g, f), &h) in small_cat.composition_table() {
        if big_cat.compose(image[g], image[f]) != Some(image[h]) {
            return fail(format!(
                "composition of `{}` after `{}`",
                small_cat.morphisms()[g].name,
                small_cat.morphisms()[f].name
            ));
        }
    }
    Ok(RestrictionComparison { certified, equivalent: true, detail: None })
}

/// Every locally closed subset of a poset, as member sets in increasing order.
pub fn locally_closed_subsets(p: &Poset) -> Vec<BTreeSet<usize>> {
    let n = p.len();
    assert!(n < 20, "enumerating subsets of a large poset");
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let members: BTreeSet<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        if p.classify_subposet(&members).is_ok() {
            out.push(members);
        }
    }
    out
}

/// Counts of each hom-set keyed by object names, including empty ones.
pub fn hom_table(cat: &FinCategory) -> BTreeMap<(String, String), usize> {
    cat.hom_sizes()
}
