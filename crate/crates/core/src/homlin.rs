//! Exact linear algebra: integer Smith normal form, matrices over `Q` and
//! `F_p`, chain complexes with their homology, and (co)limits of finite
//! diagrams of vector spaces.
//!
//! Nothing here uses floating point. Integers are arbitrary precision.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("boundary composition ∂{0}∘∂{1} is nonzero")]
    BoundaryCompositionNonzero(usize, usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("diagram does not commute between nodes {0} and {1}")]
    NonCommutingDiagram(usize, usize),
    #[error("diagram shape has a cycle")]
    CyclicDiagram,
    #[error("{0} is not prime")]
    NotPrime(u64),
}

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].to_string()).collect())
            .collect();
        write!(f, "IntMatrix{rows:?}")
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(LinalgError::DimensionMismatch("ragged rows".into()));
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flat_map(|r| r.iter().cloned().map(Into::into)).collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix shapes do not compose");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn to_field(&self, field: Field) -> FieldMatrix {
        FieldMatrix {
            field,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| field.from_int(x)).collect(),
        }
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        self.to_field(Field::Rationals).rank()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        for j in 0..self.cols {
            let v = &self.data[src * self.cols + j] * k;
            self.data[dst * self.cols + j] += v;
        }
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        for i in 0..self.rows {
            let v = &self.data[i * self.cols + src] * k;
            self.data[i * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -&self.data[r * self.cols + j];
            self.data[r * self.cols + j] = v;
        }
    }
}

/// Result of [`smith_normal_form`]: `u · m · v = d` with `d` diagonal.
#[derive(Debug, Clone)]
pub struct SmithForm {
    /// Nonzero diagonal entries `d₁ | d₂ | …`, all positive.
    pub invariants: Vec<BigInt>,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub d: IntMatrix,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.invariants.len()
    }
}

/// Smith normal form by repeated smallest-pivot elimination.
///
/// The pivot is the nonzero entry of least absolute value in the remaining
/// block, ties broken by row-major position.
pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let mut invariants = Vec::new();

    for t in 0..rows.min(cols) {
        loop {
            let Some((pi, pj)) = smallest_pivot(&a, t) else {
                break;
            };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..rows {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let q = -(&a[(i, t)] / &a[(t, t)]);
                a.add_row(i, t, &q);
                u.add_row(i, t, &q);
                clean &= a[(i, t)].is_zero();
            }
            for j in t + 1..cols {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let q = -(&a[(t, j)] / &a[(t, t)]);
                a.add_col(j, t, &q);
                v.add_col(j, t, &q);
                clean &= a[(t, j)].is_zero();
            }
            if !clean {
                continue;
            }
            let pivot = a[(t, t)].clone();
            let offender = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !a[(i, j)].is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    a.add_row(t, i, &BigInt::one());
                    u.add_row(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if a[(t, t)].is_zero() {
            break;
        }
        if a[(t, t)].is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
        invariants.push(a[(t, t)].clone());
    }
    SmithForm { invariants, u, v, d: a }
}

fn smallest_pivot(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(BigInt, usize, usize)> = None;
    for i in t..a.rows {
        for j in t..a.cols {
            let x = &a[(i, j)];
            if x.is_zero() {
                continue;
            }
            let ax = x.abs();
            if best.as_ref().is_none_or(|(b, _, _)| ax < *b) {
                best = Some((ax, i, j));
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

/// Coefficient field for linear algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    Rationals,
    /// The prime field with `p` elements; construct through [`Field::prime`].
    Prime(u64),
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => write!(f, "Q"),
            Field::Prime(p) => write!(f, "F{p}"),
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    pub fn prime(p: u64) -> Result<Field, LinalgError> {
        if is_prime(p) {
            Ok(Field::Prime(p))
        } else {
            Err(LinalgError::NotPrime(p))
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Rationals => 0,
            Field::Prime(p) => *p,
        }
    }

    pub fn from_int(&self, x: &BigInt) -> BigRational {
        match self {
            Field::Rationals => BigRational::from_integer(x.clone()),
            Field::Prime(p) => BigRational::from_integer(x.mod_floor(&BigInt::from(*p))),
        }
    }

    pub fn from_i64(&self, x: i64) -> BigRational {
        self.from_int(&BigInt::from(x))
    }

    /// Reduces a rational into the field. Fails for `F_p` when the denominator
    /// is divisible by `p`.
    pub fn normalize(&self, x: &BigRational) -> Option<BigRational> {
        match self {
            Field::Rationals => Some(x.clone()),
            Field::Prime(_) => {
                let num = self.from_int(x.numer());
                let den = self.from_int(x.denom());
                let inv = self.inv(&den)?;
                Some(self.mul(&num, &inv))
            }
        }
    }

    fn reduce(&self, x: BigRational) -> BigRational {
        match self {
            Field::Rationals => x,
            Field::Prime(p) => BigRational::from_integer(x.to_integer().mod_floor(&BigInt::from(*p))),
        }
    }

    pub fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        self.reduce(a + b)
    }

    pub fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        self.reduce(a - b)
    }

    pub fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        self.reduce(a * b)
    }

    pub fn neg(&self, a: &BigRational) -> BigRational {
        self.reduce(-a)
    }

    pub fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            return None;
        }
        match self {
            Field::Rationals => Some(a.recip()),
            Field::Prime(p) => {
                let p = BigInt::from(*p);
                let x = a.to_integer().mod_floor(&p);
                Some(BigRational::from_integer(x.modpow(&(&p - 2u32), &p)))
            }
        }
    }
}

/// Dense matrix over a [`Field`], row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl fmt::Debug for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].to_string()).collect())
            .collect();
        write!(f, "{}{:?}", self.field, rows)
    }
}

impl std::ops::Index<(usize, usize)> for FieldMatrix {
    type Output = BigRational;
    fn index(&self, (i, j): (usize, usize)) -> &BigRational {
        &self.data[i * self.cols + j]
    }
}

impl FieldMatrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        FieldMatrix { field, rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, BigRational::one());
        }
        m
    }

    pub fn from_i64_rows(field: Field, rows: &[Vec<i64>]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(LinalgError::DimensionMismatch("ragged rows".into()));
        }
        Ok(FieldMatrix {
            field,
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().map(|&x| field.from_i64(x)).collect(),
        })
    }

    /// Builds a matrix with explicit shape from row-major entries already in
    /// the field.
    pub fn from_entries(field: Field, rows: usize, cols: usize, data: Vec<BigRational>) -> Self {
        assert_eq!(data.len(), rows * cols);
        FieldMatrix { field, rows, cols, data }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.data
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigRational) {
        let x = self.field.reduce(x);
        self.data[i * self.cols + j] = x;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, other: &FieldMatrix) -> FieldMatrix {
        assert_eq!(self.cols, other.rows, "matrix shapes do not compose");
        let f = self.field;
        let mut out = FieldMatrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.data[idx] = f.add(&out.data[idx], &f.mul(a, b));
                    }
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &FieldMatrix) -> FieldMatrix {
        assert_eq!(self.shape(), other.shape());
        let f = self.field;
        FieldMatrix {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f.sub(a, b)).collect(),
        }
    }

    pub fn transpose(&self) -> FieldMatrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self[(i, j)].clone());
            }
        }
        FieldMatrix { field: self.field, rows: self.cols, cols: self.rows, data }
    }

    /// Rows `start..start+len`.
    pub fn row_block(&self, start: usize, len: usize) -> FieldMatrix {
        FieldMatrix {
            field: self.field,
            rows: len,
            cols: self.cols,
            data: self.data[start * self.cols..(start + len) * self.cols].to_vec(),
        }
    }

    /// Columns `start..start+len`.
    pub fn col_block(&self, start: usize, len: usize) -> FieldMatrix {
        let mut data = Vec::with_capacity(self.rows * len);
        for i in 0..self.rows {
            data.extend_from_slice(&self.data[i * self.cols + start..i * self.cols + start + len]);
        }
        FieldMatrix { field: self.field, rows: self.rows, cols: len, data }
    }

    /// Stacks blocks vertically; all blocks share a column count.
    pub fn vstack(field: Field, cols: usize, blocks: &[FieldMatrix]) -> FieldMatrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for b in blocks {
            assert_eq!(b.cols, cols);
            data.extend_from_slice(&b.data);
        }
        FieldMatrix { field, rows, cols, data }
    }

    /// Concatenates blocks horizontally; all blocks share a row count.
    pub fn hstack(field: Field, rows: usize, blocks: &[FieldMatrix]) -> FieldMatrix {
        let t: Vec<FieldMatrix> = blocks.iter().map(|b| b.transpose()).collect();
        FieldMatrix::vstack(field, rows, &t).transpose()
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (FieldMatrix, Vec<usize>) {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = f.inv(&m[(r, c)]).unwrap();
            for j in 0..m.cols {
                let idx = r * m.cols + j;
                m.data[idx] = f.mul(&m.data[idx], &inv);
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let k = m[(i, c)].clone();
                for j in 0..m.cols {
                    let v = f.mul(&k, &m.data[r * m.cols + j]);
                    let idx = i * m.cols + j;
                    m.data[idx] = f.sub(&m.data[idx], &v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Columns form a basis of the null space.
    pub fn kernel(&self) -> FieldMatrix {
        let f = self.field;
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut k = FieldMatrix::zeros(f, self.cols, free.len());
        for (col, &fc) in free.iter().enumerate() {
            k.set(fc, col, BigRational::one());
            for (row, &pc) in pivots.iter().enumerate() {
                let v = f.neg(&r[(row, fc)]);
                k.set(pc, col, v);
            }
        }
        k
    }

    /// Some `x` with `self · x = b`, if one exists.
    pub fn solve(&self, b: &FieldMatrix) -> Option<FieldMatrix> {
        assert_eq!(self.rows, b.rows);
        let f = self.field;
        let aug = FieldMatrix::hstack(f, self.rows, &[self.clone(), b.clone()]);
        let (r, pivots) = aug.rref();
        if pivots.iter().any(|&c| c >= self.cols) {
            return None;
        }
        let mut x = FieldMatrix::zeros(f, self.cols, b.cols);
        for (row, &pc) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x.set(pc, j, r[(row, self.cols + j)].clone());
            }
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<FieldMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let id = FieldMatrix::identity(self.field, self.rows);
        if self.rank() != self.rows {
            return None;
        }
        self.solve(&id)
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Entries as integers when every entry is integral.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| {
                        let x = &self[(i, j)];
                        if x.is_integer() {
                            x.to_integer().to_i64()
                        } else {
                            None
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

/// Coefficients for homology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Coefficients {
    Integers,
    Field(Field),
}

impl fmt::Display for Coefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficients::Integers => write!(f, "Z"),
            Coefficients::Field(k) => write!(f, "{k}"),
        }
    }
}

/// One homology group: free rank plus torsion coefficients (each ≥ 2).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HomologyGroup {
    pub rank: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub torsion: Vec<BigInt>,
}

impl HomologyGroup {
    pub fn free(rank: usize) -> Self {
        HomologyGroup { rank, torsion: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Homology in every degree up to the last nonzero one. For field
/// coefficients `rank` is the dimension and torsion is empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HomologyResult {
    pub coefficients: Coefficients,
    pub degrees: Vec<HomologyGroup>,
}

impl HomologyResult {
    pub fn new(coefficients: Coefficients, mut degrees: Vec<HomologyGroup>) -> Self {
        while degrees.last().is_some_and(HomologyGroup::is_zero) {
            degrees.pop();
        }
        HomologyResult { coefficients, degrees }
    }

    pub fn degree(&self, n: usize) -> HomologyGroup {
        self.degrees.get(n).cloned().unwrap_or_else(|| HomologyGroup::free(0))
    }

    pub fn betti(&self) -> Vec<usize> {
        self.degrees.iter().map(|g| g.rank).collect()
    }
}

impl fmt::Display for HomologyResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .degrees
            .iter()
            .enumerate()
            .map(|(n, g)| match self.coefficients {
                Coefficients::Integers => format!("H{n}={g}"),
                Coefficients::Field(_) => format!("H{n}={}", g.rank),
            })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(", "))
        }
    }
}

/// Free chain complex `C_n → … → C_0` with integer boundary matrices.
#[derive(Debug, Clone)]
pub struct ChainComplex {
    dims: Vec<usize>,
    /// `boundaries[k]` is ∂_{k+1}: C_{k+1} → C_k, a `dims[k] × dims[k+1]` matrix.
    boundaries: Vec<IntMatrix>,
}

impl ChainComplex {
    pub fn new(dims: Vec<usize>, boundaries: Vec<IntMatrix>) -> Result<Self, LinalgError> {
        if boundaries.len() + 1 != dims.len().max(1) {
            return Err(LinalgError::DimensionMismatch(format!(
                "{} chain groups need {} boundary maps, got {}",
                dims.len(),
                dims.len().saturating_sub(1),
                boundaries.len()
            )));
        }
        for (k, b) in boundaries.iter().enumerate() {
            if b.rows() != dims[k] || b.cols() != dims[k + 1] {
                return Err(LinalgError::DimensionMismatch(format!(
                    "∂{} has shape {}×{}, expected {}×{}",
                    k + 1,
                    b.rows(),
                    b.cols(),
                    dims[k],
                    dims[k + 1]
                )));
            }
        }
        for k in 1..boundaries.len() {
            if !boundaries[k - 1].mul(&boundaries[k]).is_zero() {
                return Err(LinalgError::BoundaryCompositionNonzero(k, k + 1));
            }
        }
        Ok(ChainComplex { dims, boundaries })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn boundary(&self, n: usize) -> Option<&IntMatrix> {
        if n == 0 {
            None
        } else {
            self.boundaries.get(n - 1)
        }
    }

    pub fn homology(&self, coefficients: Coefficients) -> HomologyResult {
        let top = self.dims.len();
        let mut groups = Vec::with_capacity(top);
        match coefficients {
            Coefficients::Integers => {
                let snfs: Vec<SmithForm> = self.boundaries.iter().map(smith_normal_form).collect();
                for n in 0..top {
                    let rank_out = if n == 0 { 0 } else { snfs[n - 1].rank() };
                    let (rank_in, torsion) = match snfs.get(n) {
                        Some(s) => (
                            s.rank(),
                            s.invariants.iter().filter(|d| !d.is_one()).cloned().collect(),
                        ),
                        None => (0, Vec::new()),
                    };
                    groups.push(HomologyGroup { rank: self.dims[n] - rank_out - rank_in, torsion });
                }
            }
            Coefficients::Field(k) => {
                let ranks: Vec<usize> =
                    self.boundaries.iter().map(|b| b.to_field(k).rank()).collect();
                for n in 0..top {
                    let rank_out = if n == 0 { 0 } else { ranks[n - 1] };
                    let rank_in = ranks.get(n).copied().unwrap_or(0);
                    groups.push(HomologyGroup::free(self.dims[n] - rank_out - rank_in));
                }
            }
        }
        HomologyResult::new(coefficients, groups)
    }
}

/// Free function form of [`ChainComplex::homology`].
pub fn homology(c: &ChainComplex, coefficients: Coefficients) -> HomologyResult {
    c.homology(coefficients)
}

/// A diagram of finite-dimensional vector spaces indexed by the free category
/// on a finite acyclic graph (in practice: the Hasse diagram of a poset).
#[derive(Debug, Clone)]
pub struct VectorDiagram {
    pub field: Field,
    pub dims: Vec<usize>,
    /// `(source, target, matrix)` with matrix of shape `dims[target] × dims[source]`.
    pub edges: Vec<(usize, usize, FieldMatrix)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Limit,
    Colimit,
}

/// Limit of a diagram: `basis` spans the compatible families inside the
/// product, `projections[u]` is the leg to node `u`.
#[derive(Debug, Clone)]
pub struct Limit {
    pub dim: usize,
    pub basis: FieldMatrix,
    pub projections: Vec<FieldMatrix>,
}

/// Colimit of a diagram: `quotient` is the surjection from the coproduct,
/// `injections[u]` is the leg from node `u`, `section` is a right inverse of
/// `quotient`.
#[derive(Debug, Clone)]
pub struct Colimit {
    pub dim: usize,
    pub quotient: FieldMatrix,
    pub section: FieldMatrix,
    pub injections: Vec<FieldMatrix>,
}

impl VectorDiagram {
    fn offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.dims.len() + 1);
        let mut acc = 0;
        for &d in &self.dims {
            off.push(acc);
            acc += d;
        }
        off.push(acc);
        off
    }

    /// Checks matrix shapes, acyclicity and that parallel paths agree.
    pub fn validate(&self) -> Result<(), LinalgError> {
        let n = self.dims.len();
        for (s, t, m) in &self.edges {
            if *s >= n || *t >= n || m.shape() != (self.dims[*t], self.dims[*s]) {
                return Err(LinalgError::DimensionMismatch(format!("edge {s}→{t}")));
            }
        }
        let order = self.topological_order()?;
        let pos: Vec<usize> = {
            let mut p = vec![0; n];
            for (k, &v) in order.iter().enumerate() {
                p[v] = k;
            }
            p
        };
        let mut edges: Vec<&(usize, usize, FieldMatrix)> = self.edges.iter().collect();
        edges.sort_by_key(|(s, _, _)| pos[*s]);
        for src in 0..n {
            let mut comp: Vec<Option<FieldMatrix>> = vec![None; n];
            comp[src] = Some(FieldMatrix::identity(self.field, self.dims[src]));
            for (s, t, m) in &edges {
                let Some(c) = &comp[*s] else { continue };
                let candidate = m.mul(c);
                match &comp[*t] {
                    Some(existing) if *existing != candidate => {
                        return Err(LinalgError::NonCommutingDiagram(src, *t));
                    }
                    Some(_) => {}
                    None => comp[*t] = Some(candidate),
                }
            }
        }
        Ok(())
    }

    fn topological_order(&self) -> Result<Vec<usize>, LinalgError> {
        let n = self.dims.len();
        let mut indeg = vec![0; n];
        let mut out = vec![Vec::new(); n];
        for (s, t, _) in &self.edges {
            indeg[*t] += 1;
            out[*s].push(*t);
        }
        let mut ready: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).rev().collect();
        let mut order = Vec::new();
        while let Some(v) = ready.pop() {
            order.push(v);
            for &w in &out[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.push(w);
                }
            }
        }
        if order.len() == n {
            Ok(order)
        } else {
            Err(LinalgError::CyclicDiagram)
        }
    }

    pub fn limit(&self) -> Result<Limit, LinalgError> {
        self.validate()?;
        let f = self.field;
        let off = self.offsets();
        let total = off[self.dims.len()];
        // δ(v)_e = M_e v_s − v_t
        let rows: usize = self.edges.iter().map(|(_, t, _)| self.dims[*t]).sum();
        let mut delta = FieldMatrix::zeros(f, rows, total);
        let mut r0 = 0;
        for (s, t, m) in &self.edges {
            for i in 0..self.dims[*t] {
                for j in 0..self.dims[*s] {
                    delta.set(r0 + i, off[*s] + j, m[(i, j)].clone());
                }
                let cur = delta[(r0 + i, off[*t] + i)].clone();
                delta.set(r0 + i, off[*t] + i, f.sub(&cur, &BigRational::one()));
            }
            r0 += self.dims[*t];
        }
        let basis = delta.kernel();
        let projections = (0..self.dims.len())
            .map(|u| basis.row_block(off[u], self.dims[u]))
            .collect();
        Ok(Limit { dim: basis.cols(), basis, projections })
    }

    pub fn colimit(&self) -> Result<Colimit, LinalgError> {
        self.validate()?;
        let f = self.field;
        let off = self.offsets();
        let total = off[self.dims.len()];
        // γ(x)_e = ι_t(M_e x) − ι_s(x)
        let cols: usize = self.edges.iter().map(|(s, _, _)| self.dims[*s]).sum();
        let mut gamma = FieldMatrix::zeros(f, total, cols);
        let mut c0 = 0;
        for (s, t, m) in &self.edges {
            for j in 0..self.dims[*s] {
                for i in 0..self.dims[*t] {
                    gamma.set(off[*t] + i, c0 + j, m[(i, j)].clone());
                }
                let cur = gamma[(off[*s] + j, c0 + j)].clone();
                gamma.set(off[*s] + j, c0 + j, f.sub(&cur, &BigRational::one()));
            }
            c0 += self.dims[*s];
        }
        let quotient = gamma.transpose().kernel().transpose();
        let dim = quotient.rows();
        let section = quotient
            .solve(&FieldMatrix::identity(f, dim))
            .expect("quotient map has full row rank");
        let injections = (0..self.dims.len())
            .map(|u| quotient.col_block(off[u], self.dims[u]))
            .collect();
        Ok(Colimit { dim, quotient, section, injections })
    }

    pub fn limit_or_colimit(&self, direction: Direction) -> Result<(usize, Vec<FieldMatrix>), LinalgError> {
        match direction {
            Direction::Limit => self.limit().map(|l| (l.dim, l.projections)),
            Direction::Colimit => self.colimit().map(|c| (c.dim, c.injections)),
        }
    }
}

impl Limit {
    /// The unique map `T → lim` through which the cone `legs[u]: T → F(u)`
    /// factors, if the cone is compatible.
    pub fn factor(&self, field: Field, legs: &[FieldMatrix]) -> Option<FieldMatrix> {
        let cols = legs.first().map_or(0, |l| l.cols());
        let stacked = FieldMatrix::vstack(field, cols, legs);
        self.basis.solve(&stacked)
    }
}

impl Colimit {
    /// The unique map `colim → T` through which the cocone `legs[u]: F(u) → T`
    /// factors, if the cocone is compatible.
    pub fn factor(&self, field: Field, legs: &[FieldMatrix]) -> Option<FieldMatrix> {
        let rows = legs.first().map_or(0, |l| l.rows());
        let joined = FieldMatrix::hstack(field, rows, legs);
        let xt = self.quotient.transpose().solve(&joined.transpose())?;
        Some(xt.transpose())
    }
}
