//! Counting representations over prime fields.
//!
//! Functors are enumerated by backtracking over morphisms: a morphism that is
//! the composite of two already assigned ones is forced, every other one is
//! branched over all matrices of the right shape. Isomorphism classes are the
//! orbits of `∏ GL_{d_x}(F_q)` acting by change of basis, found by closing
//! each functor under a generating set of the group.

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::{edge_key, RepError, Representation};
use crate::category::FinCategory;
use crate::exit::ExitPresentation;
use crate::homlin::{is_prime, Field, FieldMatrix};

/// Upper bound on the number of candidate assignments a count may explore.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Small dense matrix over `F_p` with entries in `0..p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl ModMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ModMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u32>], p: u64) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        ModMatrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().map(|&x| (x as u64 % p) as u32).collect(),
        }
    }

    /// The matrix whose row-major entries are the base-`q` digits of `index`.
    fn from_index(rows: usize, cols: usize, q: u64, mut index: u64) -> Self {
        let mut data = vec![0; rows * cols];
        for slot in data.iter_mut() {
            *slot = (index % q) as u32;
            index /= q;
        }
        ModMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec()).collect()
    }

    pub fn mul(&self, other: &ModMatrix, p: u64) -> ModMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = ModMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = 0u64;
                for k in 0..self.cols {
                    acc += self.get(i, k) as u64 * other.get(k, j) as u64;
                }
                out.data[i * other.cols + j] = (acc % p) as u32;
            }
        }
        out
    }

    pub fn rank(&self, p: u64) -> usize {
        let mut m: Vec<Vec<u64>> = self.to_rows().into_iter().map(|r| r.into_iter().map(u64::from).collect()).collect();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(piv) = (rank..self.rows).find(|&r| m[r][col] != 0) else { continue };
            m.swap(rank, piv);
            let inv = mod_pow(m[rank][col], p - 2, p);
            for j in 0..self.cols {
                m[rank][j] = m[rank][j] * inv % p;
            }
            for r in 0..self.rows {
                if r != rank && m[r][col] != 0 {
                    let f = m[r][col];
                    for j in 0..self.cols {
                        m[r][j] = (m[r][j] + p * p - f * m[rank][j] % p) % p;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_invertible(&self, p: u64) -> bool {
        self.rows == self.cols && self.rank(p) == self.rows
    }

    pub fn to_field(&self, field: Field) -> FieldMatrix {
        FieldMatrix::from_entries(
            field,
            self.rows,
            self.cols,
            self.data.iter().map(|&x| field.from_i64(x as i64)).collect(),
        )
    }
}

fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// A generator of the multiplicative group of `F_p`.
fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let mut factors = Vec::new();
    let mut n = p - 1;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            factors.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        factors.push(n);
    }
    (2..p).find(|&g| factors.iter().all(|&f| mod_pow(g, (p - 1) / f, p) != 1)).expect("prime fields are cyclic")
}

/// All of `GL_d(F_p)`, by filtering every `d × d` matrix.
pub fn general_linear(p: u64, d: usize) -> Vec<ModMatrix> {
    let total = p.pow((d * d) as u32);
    (0..total).map(|i| ModMatrix::from_index(d, d, p, i)).filter(|m| m.is_invertible(p)).collect()
}

/// `|GL_d(F_q)| = ∏_{i<d} (q^d − q^i)`.
pub fn gl_order(q: u64, d: usize) -> BigInt {
    let q = BigInt::from(q);
    let qd = q.pow(d as u32);
    (0..d).fold(BigInt::one(), |acc, i| acc * (&qd - q.pow(i as u32)))
}

/// Parameters for a count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountOptions {
    pub q: u64,
    pub budget: u64,
}

impl CountOptions {
    pub fn new(q: u64) -> Self {
        CountOptions { q, budget: DEFAULT_BUDGET }
    }
}

mod as_string {
    use std::fmt::Display;
    use std::str::FromStr;

    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, T: FromStr, D: Deserializer<'de>>(d: D) -> Result<T, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(|_| D::Error::custom(format!("cannot parse `{text}`")))
    }
}

/// Counts for one dimension vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountResult {
    pub q: u64,
    /// Dimension per object, in object order.
    pub dims: Vec<(String, usize)>,
    pub functors: u64,
    pub classes: usize,
    /// `Σ 1/|Aut|` over classes, which equals `functors / |G|`.
    #[serde(with = "as_string")]
    pub cardinality: BigRational,
    #[serde(with = "as_string")]
    pub group_order: BigInt,
    /// `|Aut|` of each class, in the order of `representatives`.
    #[serde(with = "automorphisms")]
    pub automorphisms: Vec<BigInt>,
    /// Lexicographically least member of each class: matrix rows per
    /// non-identity morphism (Hasse edge for presentations), keyed by name.
    pub representatives: Vec<Vec<(String, Vec<Vec<u32>>)>>,
}

mod automorphisms {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<String>::deserialize(d)?
            .into_iter()
            .map(|t| t.parse().map_err(|_| D::Error::custom(format!("cannot parse `{t}`"))))
            .collect()
    }
}

enum Step {
    Fixed(usize),
    Forced { slot: usize, g: usize, f: usize },
    Branch(usize),
}

/// Enumeration problem: functors from a finite category with prescribed
/// object dimensions, some morphisms required to go to invertible matrices.
struct Problem {
    p: u64,
    dims: Vec<usize>,
    ends: Vec<(usize, usize)>,
    identity: Vec<bool>,
    invert: Vec<bool>,
    steps: Vec<Step>,
    /// Composition constraints `(g, f, h)` to verify after each step.
    checks: Vec<Vec<(usize, usize, usize)>>,
}

impl Problem {
    fn new(cat: &FinCategory, dims: &[usize], invert: Vec<bool>, p: u64) -> Self {
        let n = cat.morphisms().len();
        let ends: Vec<(usize, usize)> = cat.morphisms().iter().map(|m| (m.source, m.target)).collect();
        let identity: Vec<bool> = (0..n).map(|f| cat.is_identity(f)).collect();
        let mut triples: Vec<(usize, usize, usize)> = cat
            .composition_table()
            .iter()
            .filter(|(&(g, f), _)| !identity[g] && !identity[f])
            .map(|(&(g, f), &h)| (g, f, h))
            .collect();
        triples.sort_unstable();

        let mut step_of = vec![usize::MAX; n];
        let mut steps = Vec::new();
        for f in (0..n).filter(|&f| identity[f]) {
            step_of[f] = steps.len();
            steps.push(Step::Fixed(f));
        }
        while steps.len() < n {
            let forced = triples
                .iter()
                .find(|&&(g, f, h)| step_of[h] == usize::MAX && step_of[g] != usize::MAX && step_of[f] != usize::MAX);
            let step = match forced {
                Some(&(g, f, h)) => Step::Forced { slot: h, g, f },
                None => Step::Branch((0..n).find(|&f| step_of[f] == usize::MAX).unwrap()),
            };
            let slot = match step {
                Step::Forced { slot, .. } | Step::Branch(slot) | Step::Fixed(slot) => slot,
            };
            step_of[slot] = steps.len();
            steps.push(step);
        }
        let mut checks = vec![Vec::new(); steps.len()];
        for &(g, f, h) in &triples {
            let last = step_of[g].max(step_of[f]).max(step_of[h]);
            let forcing = matches!(steps[last], Step::Forced { slot, g: g2, f: f2 } if slot == h && g2 == g && f2 == f);
            if !forcing {
                checks[last].push((g, f, h));
            }
        }
        Problem { p, dims: dims.to_vec(), ends, identity, invert, steps, checks }
    }

    fn shape(&self, slot: usize) -> (usize, usize) {
        let (s, t) = self.ends[slot];
        (self.dims[t], self.dims[s])
    }

    /// Number of leaves of the search tree before pruning.
    fn search_space(&self) -> BigInt {
        let q = BigInt::from(self.p);
        self.steps
            .iter()
            .filter_map(|s| match s {
                Step::Branch(slot) => {
                    let (r, c) = self.shape(*slot);
                    Some(q.pow((r * c) as u32))
                }
                _ => None,
            })
            .product()
    }

    fn candidates(&self, slot: usize, cache: &mut HashMap<(usize, usize, bool), Vec<ModMatrix>>) -> Vec<ModMatrix> {
        let (r, c) = self.shape(slot);
        let inv = self.invert[slot];
        cache
            .entry((r, c, inv))
            .or_insert_with(|| {
                let total = self.p.pow((r * c) as u32);
                (0..total)
                    .map(|i| ModMatrix::from_index(r, c, self.p, i))
                    .filter(|m| !inv || m.is_invertible(self.p))
                    .collect()
            })
            .clone()
    }

    /// Visits every functor in search order; `visit` returns `false` to stop.
    fn run(&self, visit: &mut dyn FnMut(&[ModMatrix]) -> bool) {
        let mut cache = HashMap::new();
        let cands: Vec<Option<Vec<ModMatrix>>> = self
            .steps
            .iter()
            .map(|s| match s {
                Step::Branch(slot) => Some(self.candidates(*slot, &mut cache)),
                _ => None,
            })
            .collect();
        let mut assignment = vec![ModMatrix::zeros(0, 0); self.ends.len()];
        self.descend(0, &cands, &mut assignment, visit);
    }

    fn descend(
        &self,
        k: usize,
        cands: &[Option<Vec<ModMatrix>>],
        assignment: &mut Vec<ModMatrix>,
        visit: &mut dyn FnMut(&[ModMatrix]) -> bool,
    ) -> bool {
        if k == self.steps.len() {
            return visit(assignment);
        }
        let options: Vec<ModMatrix> = match &self.steps[k] {
            Step::Fixed(slot) => vec![ModMatrix::identity(self.dims[self.ends[*slot].0])],
            Step::Forced { slot, g, f } => {
                let m = assignment[*g].mul(&assignment[*f], self.p);
                if self.invert[*slot] && !m.is_invertible(self.p) {
                    return true;
                }
                vec![m]
            }
            Step::Branch(_) => cands[k].clone().unwrap(),
        };
        let slot = match self.steps[k] {
            Step::Fixed(s) | Step::Forced { slot: s, .. } | Step::Branch(s) => s,
        };
        for m in options {
            assignment[slot] = m;
            let ok = self.checks[k]
                .iter()
                .all(|&(g, f, h)| assignment[g].mul(&assignment[f], self.p) == assignment[h]);
            if ok && !self.descend(k + 1, cands, assignment, visit) {
                return false;
            }
        }
        true
    }

    /// Key of a functor for orbit bookkeeping: entries of all non-identity
    /// morphisms in order.
    fn key(&self, assignment: &[ModMatrix]) -> Vec<u32> {
        assignment
            .iter()
            .enumerate()
            .filter(|(f, _)| !self.identity[*f])
            .flat_map(|(_, m)| m.data.iter().copied())
            .collect()
    }

    fn unkey(&self, key: &[u32]) -> Vec<ModMatrix> {
        let mut pos = 0;
        (0..self.ends.len())
            .map(|f| {
                let (r, c) = self.shape(f);
                if self.identity[f] {
                    return ModMatrix::identity(r);
                }
                let m = ModMatrix { rows: r, cols: c, data: key[pos..pos + r * c].to_vec() };
                pos += r * c;
                m
            })
            .collect()
    }

    /// Generators of `∏ GL_{d_x}` as `(object, g, g⁻¹)`.
    fn group_generators(&self) -> Vec<(usize, ModMatrix, ModMatrix)> {
        let p = self.p;
        let omega = primitive_root(p);
        let mut gens = Vec::new();
        for (x, &d) in self.dims.iter().enumerate() {
            for i in 0..d {
                for j in 0..d {
                    if i != j {
                        let mut g = ModMatrix::identity(d);
                        g.data[i * d + j] = 1;
                        let mut h = ModMatrix::identity(d);
                        h.data[i * d + j] = (p - 1) as u32;
                        gens.push((x, g, h));
                    }
                }
            }
            if d > 0 && p > 2 {
                let mut g = ModMatrix::identity(d);
                g.data[0] = omega as u32;
                let mut h = ModMatrix::identity(d);
                h.data[0] = mod_pow(omega, p - 2, p) as u32;
                gens.push((x, g, h));
            }
        }
        gens
    }

    fn act(&self, assignment: &[ModMatrix], x: usize, g: &ModMatrix, g_inv: &ModMatrix) -> Vec<ModMatrix> {
        assignment
            .iter()
            .enumerate()
            .map(|(f, m)| {
                let (s, t) = self.ends[f];
                let mut out = m.clone();
                if s == x {
                    out = out.mul(g_inv, self.p);
                }
                if t == x {
                    out = g.mul(&out, self.p);
                }
                out
            })
            .collect()
    }
}

fn check_prime(q: u64) -> Result<(), RepError> {
    if is_prime(q) {
        Ok(())
    } else {
        Err(RepError::Unsupported(format!("q = {q} is not a prime; only prime fields are supported")))
    }
}

fn check_budget(problem: &Problem, budget: u64) -> Result<(), RepError> {
    let needed = problem.search_space();
    if needed > BigInt::from(budget) {
        return Err(RepError::BudgetExceeded { needed, budget });
    }
    Ok(())
}

fn count_problem(problem: &Problem, labels: &[String], objects: &[String], report_slots: &[usize]) -> CountResult {
    let mut functors: Vec<Vec<u32>> = Vec::new();
    problem.run(&mut |a| {
        functors.push(problem.key(a));
        true
    });
    let index: HashMap<&[u32], usize> = functors.iter().enumerate().map(|(i, k)| (k.as_slice(), i)).collect();
    let gens = problem.group_generators();
    let group_order: BigInt = problem.dims.iter().map(|&d| gl_order(problem.p, d)).product();

    let mut seen: HashSet<usize> = HashSet::new();
    let mut classes: Vec<(Vec<u32>, usize)> = Vec::new();
    for start in 0..functors.len() {
        if seen.contains(&start) {
            continue;
        }
        seen.insert(start);
        let mut queue = VecDeque::from([start]);
        let mut size = 0;
        let mut least = start;
        while let Some(i) = queue.pop_front() {
            size += 1;
            if functors[i] < functors[least] {
                least = i;
            }
            let a = problem.unkey(&functors[i]);
            for (x, g, h) in &gens {
                let image = problem.key(&problem.act(&a, *x, g, h));
                let j = index[image.as_slice()];
                if seen.insert(j) {
                    queue.push_back(j);
                }
            }
        }
        classes.push((functors[least].clone(), size));
    }
    classes.sort();

    let total = functors.len() as u64;
    let representatives = classes
        .iter()
        .map(|(key, _)| {
            let a = problem.unkey(key);
            report_slots.iter().map(|&f| (labels[f].clone(), a[f].to_rows())).collect()
        })
        .collect();
    CountResult {
        q: problem.p,
        dims: objects.iter().cloned().zip(problem.dims.iter().copied()).collect(),
        functors: total,
        classes: classes.len(),
        cardinality: BigRational::new(BigInt::from(total), group_order.clone()),
        automorphisms: classes.iter().map(|(_, size)| &group_order / BigInt::from(*size)).collect(),
        group_order,
        representatives,
    }
}

fn presentation_problem(pres: &ExitPresentation, dims: &[usize], q: u64) -> Result<(Problem, FinCategory, Vec<usize>), RepError> {
    let shape = pres.shape();
    if dims.len() != shape.len() {
        return Err(RepError::ShapeMismatch(format!("{} dimensions for {} shape elements", dims.len(), shape.len())));
    }
    let cat = FinCategory::from_poset(shape);
    let mut invert = vec![false; cat.morphisms().len()];
    let mut hasse_slots = Vec::new();
    for &(a, b) in shape.hasse() {
        let f = cat.morphism_index(&edge_key(shape.name(a), shape.name(b))).expect("thin category names relations");
        invert[f] = pres.is_marked(a, b);
        hasse_slots.push(f);
    }
    Ok((Problem::new(&cat, dims, invert, q), cat, hasse_slots))
}

/// Counts functors from the localization of `pres` (functors on the shape
/// inverting every mark) with the given dimensions, in shape element order.
pub fn count_reps(pres: &ExitPresentation, dims: &[usize], options: CountOptions) -> Result<CountResult, RepError> {
    check_prime(options.q)?;
    let (problem, cat, hasse_slots) = presentation_problem(pres, dims, options.q)?;
    check_budget(&problem, options.budget)?;
    let labels: Vec<String> = cat.morphisms().iter().map(|m| m.name.clone()).collect();
    Ok(count_problem(&problem, &labels, pres.shape().names(), &hasse_slots))
}

/// Counts functors from a finite category, dimensions in object order.
pub fn count_reps_category(cat: &FinCategory, dims: &[usize], options: CountOptions) -> Result<CountResult, RepError> {
    check_prime(options.q)?;
    if dims.len() != cat.objects().len() {
        return Err(RepError::ShapeMismatch(format!(
            "{} dimensions for {} objects",
            dims.len(),
            cat.objects().len()
        )));
    }
    cat.validate().map_err(|e| RepError::Unsupported(format!("not a category: {e}")))?;
    let problem = Problem::new(cat, dims, vec![false; cat.morphisms().len()], options.q);
    check_budget(&problem, options.budget)?;
    let labels: Vec<String> = cat.morphisms().iter().map(|m| m.name.clone()).collect();
    let slots: Vec<usize> = (0..labels.len()).filter(|&f| !cat.is_identity(f)).collect();
    Ok(count_problem(&problem, &labels, cat.objects(), &slots))
}

/// Every representation of `pres` over `F_q` with the given dimensions that
/// inverts the marks.
pub fn enumerate_reps(pres: &ExitPresentation, dims: &[usize], options: CountOptions) -> Result<Vec<Representation>, RepError> {
    check_prime(options.q)?;
    let (problem, _, hasse_slots) = presentation_problem(pres, dims, options.q)?;
    check_budget(&problem, options.budget)?;
    let field = Field::Prime(options.q);
    let mut out = Vec::new();
    problem.run(&mut |a| {
        let mats = hasse_slots.iter().map(|&f| a[f].to_field(field)).collect();
        out.push(Representation::new(pres.clone(), field, dims.to_vec(), mats).expect("enumerated functors are valid"));
        true
    });
    Ok(out)
}

/// Some representation found by searching candidates in the order given by
/// `shuffle`, which receives the number of candidates and returns a
/// permutation of `0..n`.
pub fn first_rep_in_order(
    pres: &ExitPresentation,
    dims: &[usize],
    q: u64,
    shuffle: &mut dyn FnMut(usize) -> Vec<usize>,
) -> Result<Option<Representation>, RepError> {
    check_prime(q)?;
    let (problem, _, hasse_slots) = presentation_problem(pres, dims, q)?;
    // the search order is realized by permuting branch candidates up front
    let mut cache = HashMap::new();
    let mut perms: HashMap<usize, Vec<ModMatrix>> = HashMap::new();
    for step in &problem.steps {
        if let Step::Branch(slot) = step {
            let c = problem.candidates(*slot, &mut cache);
            let order = shuffle(c.len());
            perms.insert(*slot, order.into_iter().map(|i| c[i].clone()).collect());
        }
    }
    let field = Field::Prime(q);
    let mut found = None;
    let cands: Vec<Option<Vec<ModMatrix>>> = problem
        .steps
        .iter()
        .map(|s| match s {
            Step::Branch(slot) => Some(perms[slot].clone()),
            _ => None,
        })
        .collect();
    let mut assignment = vec![ModMatrix::zeros(0, 0); problem.ends.len()];
    problem.descend(0, &cands, &mut assignment, &mut |a| {
        let mats = hasse_slots.iter().map(|&f| a[f].to_field(field)).collect();
        found = Some(Representation::new(pres.clone(), field, dims.to_vec(), mats).expect("search yields functors"));
        false
    });
    Ok(found)
}

/// Search-space size for a count, for reporting before running it.
pub fn search_space(pres: &ExitPresentation, dims: &[usize], q: u64) -> Result<BigInt, RepError> {
    let (problem, _, _) = presentation_problem(pres, dims, q)?;
    Ok(problem.search_space())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::noncommutative_triangle;
    use crate::poset::{MonotoneMap, Poset};

    #[test]
    fn gl_orders() {
        assert_eq!(gl_order(2, 2), BigInt::from(6));
        assert_eq!(gl_order(3, 1), BigInt::from(2));
        assert_eq!(gl_order(5, 0), BigInt::from(1));
        assert_eq!(general_linear(2, 2).len(), 6);
        assert_eq!(general_linear(3, 2).len(), 48);
        assert_eq!(primitive_root(7), 3);
    }

    #[test]
    fn triangle_over_f2() {
        let r = count_reps_category(&noncommutative_triangle(), &[1, 1, 1], CountOptions::new(2)).unwrap();
        assert_eq!(r.functors, 8);
        assert_eq!(r.classes, 8);
        assert_eq!(r.cardinality, BigRational::from_integer(8.into()));
    }

    #[test]
    fn point_category() {
        let pt = FinCategory::from_poset(&Poset::singleton("*"));
        let r = count_reps_category(&pt, &[1], CountOptions::new(3)).unwrap();
        assert_eq!((r.functors, r.classes), (1, 1));
        assert_eq!(r.cardinality, BigRational::new(1.into(), 2.into()));
        let r2 = count_reps_category(&pt, &[2], CountOptions::new(2)).unwrap();
        assert_eq!(r2.cardinality, BigRational::new(1.into(), 6.into()));
    }

    #[test]
    fn marked_edge_must_be_invertible() {
        let one = Poset::chain(1);
        let pres = ExitPresentation::new(MonotoneMap::to_point(&one, "*")).unwrap();
        let r = count_reps(&pres, &[1, 1], CountOptions::new(2)).unwrap();
        assert_eq!((r.functors, r.classes), (1, 1));
        let free = count_reps(&ExitPresentation::unmarked(&one), &[1, 1], CountOptions::new(2)).unwrap();
        assert_eq!((free.functors, free.classes), (2, 2));
    }

    #[test]
    fn chain_reps_by_rank() {
        // representations of a single arrow are classified by rank
        let pres = ExitPresentation::unmarked(&Poset::chain(1));
        let r = count_reps(&pres, &[2, 2], CountOptions::new(3)).unwrap();
        assert_eq!(r.functors, 81);
        assert_eq!(r.classes, 3);
    }

    #[test]
    fn budget_guard() {
        let err = count_reps_category(&noncommutative_triangle(), &[5, 5, 5], CountOptions::new(2)).unwrap_err();
        assert!(matches!(err, RepError::BudgetExceeded { .. }));
        assert!(matches!(
            count_reps_category(&noncommutative_triangle(), &[1, 1, 1], CountOptions::new(4)),
            Err(RepError::Unsupported(_))
        ));
    }

    #[test]
    fn first_rep_respects_marks() {
        let one = Poset::chain(1);
        let pres = ExitPresentation::new(MonotoneMap::to_point(&one, "*")).unwrap();
        let rep = first_rep_in_order(&pres, &[2, 2], 2, &mut |n| (0..n).collect()).unwrap().unwrap();
        assert!(rep.is_p_constructible().constructible);
        assert!(first_rep_in_order(&pres, &[1, 2], 2, &mut |n| (0..n).collect()).unwrap().is_none());
    }
}
