//! Finite carriers, binary operation tables and permutations.
//!
//! Elements of an `n`-element carrier are the integers `0..n`. A table stores
//! `x ∘ y` at `table[x][y]` for both left and right use; the side is carried
//! separately as a [`ShelfSide`] tag and never by transposing storage.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest carrier for which isomorphism search over the full symmetric group
/// is attempted.
pub const MAX_ISO_SIZE: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShelfSide {
    Left,
    Right,
}

impl fmt::Display for ShelfSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShelfSide::Left => f.write_str("left"),
            ShelfSide::Right => f.write_str("right"),
        }
    }
}

/// A bijection of `{0..n}`, stored as its image sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "PermutationRepr", into = "PermutationRepr")]
pub struct Permutation {
    images: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct PermutationRepr {
    size: usize,
    images: Vec<usize>,
}

impl TryFrom<PermutationRepr> for Permutation {
    type Error = Error;

    fn try_from(repr: PermutationRepr) -> Result<Self> {
        if repr.images.len() != repr.size {
            return Err(Error::Shape {
                what: "images",
                expected: repr.size,
                found: repr.images.len(),
            });
        }
        Permutation::new(repr.images)
    }
}

impl From<Permutation> for PermutationRepr {
    fn from(p: Permutation) -> Self {
        PermutationRepr {
            size: p.images.len(),
            images: p.images,
        }
    }
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        if n == 0 {
            return Err(Error::EmptyCarrier);
        }
        let mut seen = vec![false; n];
        for (x, &y) in images.iter().enumerate() {
            if y >= n {
                return Err(Error::EntryOutOfRange {
                    location: format!("images[{x}]"),
                    value: y,
                    size: n,
                });
            }
            if std::mem::replace(&mut seen[y], true) {
                return Err(Error::NotBijective(y));
            }
        }
        Ok(Permutation { images })
    }

    /// Caller guarantees `images` is a bijection of `0..images.len()`.
    pub(crate) fn from_images_unchecked(images: Vec<usize>) -> Self {
        debug_assert!(is_bijection(&images));
        Permutation { images }
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    /// The transposition exchanging `i` and `j` on `{0..n}`.
    pub fn transposition(n: usize, i: usize, j: usize) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        if i >= n || j >= n {
            return Err(Error::EntryOutOfRange {
                location: "transposition".into(),
                value: i.max(j),
                size: n,
            });
        }
        images.swap(i, j);
        Permutation::new(images)
    }

    pub fn size(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(x, &y)| x == y)
    }

    /// `self ∘ other`, i.e. `x ↦ self(other(x))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        check_sizes(self.size(), other.size())?;
        Ok(self.compose_unchecked(other))
    }

    pub(crate) fn compose_unchecked(&self, other: &Permutation) -> Permutation {
        Permutation {
            images: other.images.iter().map(|&y| self.images[y]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.size()];
        for (x, &y) in self.images.iter().enumerate() {
            images[y] = x;
        }
        Permutation { images }
    }

    /// All permutations of `{0..n}` in lexicographic order of image sequences.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut current: Vec<usize> = (0..n).collect();
        let mut out = vec![Permutation {
            images: current.clone(),
        }];
        while next_permutation(&mut current) {
            out.push(Permutation {
                images: current.clone(),
            });
        }
        out
    }
}

/// `compose(p, q)(x) = p(q(x))`.
pub fn compose(p: &Permutation, q: &Permutation) -> Result<Permutation> {
    p.compose(q)
}

pub fn invert(p: &Permutation) -> Permutation {
    p.inverse()
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

pub(crate) fn is_bijection(images: &[usize]) -> bool {
    let mut seen = vec![false; images.len()];
    images
        .iter()
        .all(|&y| y < images.len() && !std::mem::replace(&mut seen[y], true))
}

pub(crate) fn check_sizes(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::SizeMismatch { left, right })
    }
}

/// An `n × n` table for a binary operation on `{0..n}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "TableRepr", into = "TableRepr")]
pub struct OperationTable {
    size: usize,
    cells: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct TableRepr {
    size: usize,
    table: Vec<Vec<usize>>,
}

impl TryFrom<TableRepr> for OperationTable {
    type Error = Error;

    fn try_from(repr: TableRepr) -> Result<Self> {
        if repr.table.len() != repr.size {
            return Err(Error::Shape {
                what: "table rows",
                expected: repr.size,
                found: repr.table.len(),
            });
        }
        OperationTable::new(repr.table)
    }
}

impl From<OperationTable> for TableRepr {
    fn from(t: OperationTable) -> Self {
        TableRepr {
            size: t.size,
            table: t.rows(),
        }
    }
}

impl OperationTable {
    pub fn new(rows: Vec<Vec<usize>>) -> Result<Self> {
        let n = rows.len();
        let cells = flatten_grid(rows, "table")?;
        Ok(OperationTable { size: n, cells })
    }

    /// Builds a table from a row-major cell sequence of length `n²`.
    pub fn from_cells(size: usize, cells: Vec<usize>) -> Result<Self> {
        validate_cells(size, &cells, "table")?;
        Ok(OperationTable { size, cells })
    }

    pub fn from_fn(size: usize, f: impl Fn(usize, usize) -> usize) -> Result<Self> {
        let cells = (0..size * size).map(|i| f(i / size.max(1), i % size.max(1))).collect();
        Self::from_cells(size, cells)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> usize {
        self.cells[x * self.size + y]
    }

    /// Row-major cells; this is also the lexicographic comparison key.
    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.cells.chunks(self.size).map(<[usize]>::to_vec).collect()
    }

    pub fn transpose(&self) -> OperationTable {
        let n = self.size;
        OperationTable {
            size: n,
            cells: (0..n * n).map(|i| self.get(i % n, i / n)).collect(),
        }
    }

    /// The table of `σ(x) ∘' σ(y) = σ(x ∘ y)`.
    pub fn relabel(&self, sigma: &Permutation) -> Result<OperationTable> {
        check_sizes(self.size, sigma.size())?;
        Ok(self.relabel_unchecked(sigma))
    }

    fn relabel_unchecked(&self, sigma: &Permutation) -> OperationTable {
        let n = self.size;
        let mut cells = vec![0; n * n];
        for x in 0..n {
            for y in 0..n {
                cells[sigma.apply(x) * n + sigma.apply(y)] = sigma.apply(self.get(x, y));
            }
        }
        OperationTable { size: n, cells }
    }

    /// First `(x, y, z)` in lexicographic order with
    /// `x ▷ (y ▷ z) ≠ (x ▷ y) ▷ (x ▷ z)`.
    pub fn left_distributivity_violation(&self) -> Option<[usize; 3]> {
        let n = self.size;
        triples(n).find(|&[x, y, z]| self.get(x, self.get(y, z)) != self.get(self.get(x, y), self.get(x, z)))
    }

    /// First `(x, y, z)` with `(x ◁ y) ◁ z ≠ (x ◁ z) ◁ (y ◁ z)`.
    pub fn right_distributivity_violation(&self) -> Option<[usize; 3]> {
        let n = self.size;
        triples(n).find(|&[x, y, z]| self.get(self.get(x, y), z) != self.get(self.get(x, z), self.get(y, z)))
    }

    pub fn distributivity_violation(&self, side: ShelfSide) -> Option<[usize; 3]> {
        match side {
            ShelfSide::Left => self.left_distributivity_violation(),
            ShelfSide::Right => self.right_distributivity_violation(),
        }
    }

    pub fn is_left_self_distributive(&self) -> bool {
        self.left_distributivity_violation().is_none()
    }

    pub fn is_right_self_distributive(&self) -> bool {
        self.right_distributivity_violation().is_none()
    }

    pub fn is_self_distributive(&self, side: ShelfSide) -> bool {
        self.distributivity_violation(side).is_none()
    }

    /// Every left translation `y ↦ x ∘ y` is a bijection.
    pub fn rows_bijective(&self) -> bool {
        self.cells.chunks(self.size).all(is_bijection)
    }

    /// Every right translation `x ↦ x ∘ y` is a bijection.
    pub fn columns_bijective(&self) -> bool {
        let n = self.size;
        (0..n).all(|y| is_bijection(&(0..n).map(|x| self.get(x, y)).collect::<Vec<_>>()))
    }

    pub fn is_rack(&self, side: ShelfSide) -> bool {
        match side {
            ShelfSide::Left => self.rows_bijective() && self.is_left_self_distributive(),
            ShelfSide::Right => self.columns_bijective() && self.is_right_self_distributive(),
        }
    }
}

/// Free-function form of [`OperationTable::is_left_self_distributive`].
pub fn is_left_self_distributive(op: &OperationTable) -> bool {
    op.is_left_self_distributive()
}

pub fn is_right_self_distributive(op: &OperationTable) -> bool {
    op.is_right_self_distributive()
}

pub fn is_rack(op: &OperationTable, side: ShelfSide) -> bool {
    op.is_rack(side)
}

/// `f(x ∘ y) = f(x) ∘' f(y)` for all `x, y`. The predicate is the same for
/// left and right shelves.
pub fn is_shelf_homomorphism(f: &Permutation, src: &OperationTable, dst: &OperationTable) -> Result<bool> {
    check_sizes(f.size(), src.size())?;
    check_sizes(src.size(), dst.size())?;
    Ok(homomorphism_violation(f, src, dst).is_none())
}

pub(crate) fn homomorphism_violation(
    f: &Permutation,
    src: &OperationTable,
    dst: &OperationTable,
) -> Option<[usize; 2]> {
    let n = src.size();
    (0..n * n)
        .map(|i| [i / n, i % n])
        .find(|&[x, y]| f.apply(src.get(x, y)) != dst.get(f.apply(x), f.apply(y)))
}

/// A bijection `σ` with `σ(op1[x][y]) = op2[σ(x)][σ(y)]`, taking the
/// lexicographically least image sequence when several exist.
pub fn shelf_isomorphic(op1: &OperationTable, op2: &OperationTable) -> Result<Option<Permutation>> {
    check_sizes(op1.size(), op2.size())?;
    let n = op1.size();
    check_iso_size(n)?;
    if multiplicity_profile(op1) != multiplicity_profile(op2) {
        return Ok(None);
    }
    Ok(Permutation::all(n)
        .into_iter()
        .find(|sigma| op1.relabel_unchecked(sigma) == *op2))
}

/// The lexicographically least table isomorphic to `op`.
pub fn canonical_form(op: &OperationTable) -> Result<OperationTable> {
    let n = op.size();
    check_iso_size(n)?;
    Ok(Permutation::all(n)
        .iter()
        .map(|sigma| op.relabel_unchecked(sigma))
        .min()
        .expect("Sym(n) is non-empty"))
}

pub(crate) fn check_iso_size(n: usize) -> Result<()> {
    if n > MAX_ISO_SIZE {
        return Err(Error::Unsupported(format!(
            "isomorphism search on {n} elements (limit {MAX_ISO_SIZE})"
        )));
    }
    Ok(())
}

fn multiplicity_profile(op: &OperationTable) -> Vec<usize> {
    let mut counts = vec![0; op.size()];
    for &c in &op.cells {
        counts[c] += 1;
    }
    counts.sort_unstable();
    counts
}

pub(crate) fn triples(n: usize) -> impl Iterator<Item = [usize; 3]> {
    (0..n * n * n).map(move |i| [i / (n * n), (i / n) % n, i % n])
}

pub(crate) fn validate_cells(size: usize, cells: &[usize], what: &'static str) -> Result<()> {
    if size == 0 {
        return Err(Error::EmptyCarrier);
    }
    if cells.len() != size * size {
        return Err(Error::Shape {
            what: "cells",
            expected: size * size,
            found: cells.len(),
        });
    }
    if let Some(i) = cells.iter().position(|&c| c >= size) {
        return Err(Error::EntryOutOfRange {
            location: format!("{what}[{}][{}]", i / size, i % size),
            value: cells[i],
            size,
        });
    }
    Ok(())
}

pub(crate) fn flatten_grid(rows: Vec<Vec<usize>>, what: &'static str) -> Result<Vec<usize>> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::EmptyCarrier);
    }
    let mut cells = Vec::with_capacity(n * n);
    for row in rows {
        if row.len() != n {
            return Err(Error::Shape {
                what: "row entries",
                expected: n,
                found: row.len(),
            });
        }
        cells.extend(row);
    }
    validate_cells(n, &cells, what)?;
    Ok(cells)
}
