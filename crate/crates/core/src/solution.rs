//! Set-theoretical solutions `r(x, y) = (λₓ(y), ρ_y(x))` of the braid relation
//! on a finite carrier, and the shelves attached to them.

use serde::{Deserialize, Serialize};

use crate::algebra::{flatten_grid, is_bijection, triples, validate_cells, OperationTable, Permutation, ShelfSide};
use crate::error::{Error, Result};
use crate::matched::PairEncoding;

/// Both grids are indexed subscript-first: `lambda[x][y] = λₓ(y)` and
/// `rho[y][x] = ρ_y(x)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "SolutionFile", into = "SolutionFile")]
pub struct Solution {
    size: usize,
    lambda: Vec<usize>,
    rho: Vec<usize>,
}

/// On-disk form of a solution. `pair_encoding` is present on matched products
/// and records `|T|` for the encoding `(a, u) ↦ a·|T| + u`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub size: usize,
    pub lambda: Vec<Vec<usize>>,
    pub rho: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair_encoding: Option<PairEncoding>,
}

impl SolutionFile {
    /// Validates shape and ranges but not the braid relation.
    pub fn into_unchecked(self) -> Result<Solution> {
        if self.lambda.len() != self.size || self.rho.len() != self.size {
            return Err(Error::Shape {
                what: "grid rows",
                expected: self.size,
                found: if self.lambda.len() != self.size {
                    self.lambda.len()
                } else {
                    self.rho.len()
                },
            });
        }
        Solution::new_unchecked(self.lambda, self.rho)
    }
}

impl TryFrom<SolutionFile> for Solution {
    type Error = Error;

    fn try_from(file: SolutionFile) -> Result<Self> {
        file.into_unchecked()?.checked()
    }
}

impl From<Solution> for SolutionFile {
    fn from(sol: Solution) -> Self {
        SolutionFile {
            size: sol.size,
            lambda: sol.lambda_rows(),
            rho: sol.rho_rows(),
            pair_encoding: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum YbeMode {
    /// Compare `(r×id)(id×r)(r×id)` with `(id×r)(r×id)(id×r)` on every triple.
    Direct,
    /// Check the three identities on `λ`, `ρ` separately.
    Componentwise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionProps {
    pub left_nondegenerate: bool,
    pub right_nondegenerate: bool,
    pub involutive: bool,
    pub idempotent: bool,
    pub bijective: bool,
}

impl Solution {
    /// Builds a solution from its two grids and checks the braid relation.
    pub fn new(lambda: Vec<Vec<usize>>, rho: Vec<Vec<usize>>) -> Result<Self> {
        Self::new_unchecked(lambda, rho)?.checked()
    }

    /// Builds a candidate without checking the braid relation. Grid shapes and
    /// entry ranges are still validated.
    pub fn new_unchecked(lambda: Vec<Vec<usize>>, rho: Vec<Vec<usize>>) -> Result<Self> {
        let size = lambda.len();
        if rho.len() != size {
            return Err(Error::Shape {
                what: "rho rows",
                expected: size,
                found: rho.len(),
            });
        }
        let lambda = flatten_grid(lambda, "lambda")?;
        let rho = flatten_grid(rho, "rho")?;
        Ok(Solution { size, lambda, rho })
    }

    /// Candidate from row-major cells of both grids.
    pub fn from_cells_unchecked(size: usize, lambda: Vec<usize>, rho: Vec<usize>) -> Result<Self> {
        validate_cells(size, &lambda, "lambda")?;
        validate_cells(size, &rho, "rho")?;
        Ok(Solution { size, lambda, rho })
    }

    /// Candidate from the map `(x, y) ↦ r(x, y)`.
    pub fn from_map_unchecked(size: usize, r: impl Fn(usize, usize) -> (usize, usize)) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyCarrier);
        }
        let mut lambda = vec![0; size * size];
        let mut rho = vec![0; size * size];
        for x in 0..size {
            for y in 0..size {
                let (l, r) = r(x, y);
                lambda[x * size + y] = l;
                rho[y * size + x] = r;
            }
        }
        Self::from_cells_unchecked(size, lambda, rho)
    }

    /// The twist `r(x, y) = (y, x)`.
    pub fn flip(size: usize) -> Result<Self> {
        Self::from_map_unchecked(size, |x, y| (y, x))
    }

    pub(crate) fn checked(self) -> Result<Self> {
        match self.ybe_violation(YbeMode::Direct) {
            None => Ok(self),
            Some(witness) => Err(Error::NotASolution { witness }),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// `λₓ(y)`.
    #[inline]
    pub fn lambda(&self, x: usize, y: usize) -> usize {
        self.lambda[x * self.size + y]
    }

    /// `ρ_y(x)`.
    #[inline]
    pub fn rho(&self, y: usize, x: usize) -> usize {
        self.rho[y * self.size + x]
    }

    #[inline]
    pub fn apply(&self, x: usize, y: usize) -> (usize, usize) {
        (self.lambda(x, y), self.rho(y, x))
    }

    pub fn lambda_cells(&self) -> &[usize] {
        &self.lambda
    }

    pub fn rho_cells(&self) -> &[usize] {
        &self.rho
    }

    pub fn lambda_rows(&self) -> Vec<Vec<usize>> {
        self.lambda.chunks(self.size).map(<[usize]>::to_vec).collect()
    }

    pub fn rho_rows(&self) -> Vec<Vec<usize>> {
        self.rho.chunks(self.size).map(<[usize]>::to_vec).collect()
    }

    fn lambda_row(&self, x: usize) -> &[usize] {
        &self.lambda[x * self.size..(x + 1) * self.size]
    }

    fn rho_row(&self, y: usize) -> &[usize] {
        &self.rho[y * self.size..(y + 1) * self.size]
    }

    /// First triple, in lexicographic order, at which the braid relation fails.
    pub fn ybe_violation(&self, mode: YbeMode) -> Option<[usize; 3]> {
        match mode {
            YbeMode::Direct => triples(self.size).find(|&[x, y, z]| !self.braid_holds_at(x, y, z)),
            YbeMode::Componentwise => triples(self.size).find(|&[a, b, c]| !self.components_hold_at(a, b, c)),
        }
    }

    fn braid_holds_at(&self, x: usize, y: usize, z: usize) -> bool {
        // (r×id)(id×r)(r×id), rightmost factor applied first
        let (a, b) = self.apply(x, y);
        let (b, c) = self.apply(b, z);
        let (a, b) = self.apply(a, b);
        let left = (a, b, c);

        let (b, c) = self.apply(y, z);
        let (a, b) = self.apply(x, b);
        let (b, c) = self.apply(b, c);
        left == (a, b, c)
    }

    fn components_hold_at(&self, a: usize, b: usize, c: usize) -> bool {
        let lam = |x, y| self.lambda(x, y);
        let rho = |y, x| self.rho(y, x);
        // λ_a λ_b = λ_{λ_a(b)} λ_{ρ_b(a)}
        let first = lam(a, lam(b, c)) == lam(lam(a, b), lam(rho(b, a), c));
        // ρ_{λ_{ρ_b(a)}(c)}(λ_a(b)) = λ_{ρ_{λ_b(c)}(a)}(ρ_c(b))
        let second = rho(lam(rho(b, a), c), lam(a, b)) == lam(rho(lam(b, c), a), rho(c, b));
        // ρ_c ρ_b = ρ_{ρ_c(b)} ρ_{λ_b(c)}
        let third = rho(c, rho(b, a)) == rho(rho(c, b), rho(lam(b, c), a));
        first && second && third
    }

    pub fn is_left_nondegenerate(&self) -> bool {
        (0..self.size).all(|x| is_bijection(self.lambda_row(x)))
    }

    pub fn is_right_nondegenerate(&self) -> bool {
        (0..self.size).all(|y| is_bijection(self.rho_row(y)))
    }

    pub fn properties(&self) -> SolutionProps {
        let n = self.size;
        let pairs = || (0..n * n).map(move |i| (i / n, i % n));
        let mut hit = vec![false; n * n];
        let bijective = pairs().all(|(x, y)| {
            let (l, r) = self.apply(x, y);
            !std::mem::replace(&mut hit[l * n + r], true)
        });
        let twice = |x, y| {
            let (l, r) = self.apply(x, y);
            self.apply(l, r)
        };
        SolutionProps {
            left_nondegenerate: self.is_left_nondegenerate(),
            right_nondegenerate: self.is_right_nondegenerate(),
            involutive: pairs().all(|(x, y)| twice(x, y) == (x, y)),
            idempotent: pairs().all(|(x, y)| twice(x, y) == self.apply(x, y)),
            bijective,
        }
    }

    /// `λₓ⁻¹`.
    pub fn lambda_inverse(&self, x: usize) -> Result<Permutation> {
        let row = self.lambda_row(x);
        if !is_bijection(row) {
            return Err(Error::NotLeftNonDegenerate { row: x });
        }
        Ok(Permutation::from_images_unchecked(row.to_vec()).inverse())
    }

    /// `a ▷ᵣ b = λ_a(ρ_{λ_b⁻¹(a)}(b))`.
    pub fn structure_shelf(&self) -> Result<OperationTable> {
        let n = self.size;
        let inverses = (0..n).map(|x| self.lambda_inverse(x)).collect::<Result<Vec<_>>>()?;
        OperationTable::from_fn(n, |a, b| self.lambda(a, self.rho(inverses[b].apply(a), b)))
    }

    /// `r′(x, y) = (y, y ▷ᵣ x)`.
    pub fn derived_solution(&self) -> Result<Solution> {
        Ok(shelf_solution_unchecked(&self.structure_shelf()?, ShelfSide::Left))
    }

    /// Recovers the shelf when `r` has the shape of a shelf solution.
    pub fn shelf_type(&self) -> ShelfType {
        let n = self.size;
        let identity_rows = |cells: &[usize]| cells.chunks(n).all(|row| row.iter().enumerate().all(|(i, &v)| i == v));
        let left = identity_rows(&self.lambda)
            .then(|| OperationTable::from_cells(n, self.rho.clone()).expect("rho cells are in range"));
        let right = identity_rows(&self.rho).then(|| {
            OperationTable::from_cells(n, self.lambda.clone())
                .expect("lambda cells are in range")
                .transpose()
        });
        ShelfType { left, right }
    }
}

/// Which shelf shapes a solution has, with the recovered tables.
/// `left` is set when every `λₓ` is the identity, so that `r(x, y) = (y, y ▷ x)`;
/// `right` when every `ρ_y` is the identity, so that `r(x, y) = (y ◁ x, x)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShelfType {
    pub left: Option<OperationTable>,
    pub right: Option<OperationTable>,
}

impl ShelfType {
    pub fn contains(&self, side: ShelfSide) -> bool {
        self.table(side).is_some()
    }

    pub fn table(&self, side: ShelfSide) -> Option<&OperationTable> {
        match side {
            ShelfSide::Left => self.left.as_ref(),
            ShelfSide::Right => self.right.as_ref(),
        }
    }

    pub fn sides(&self) -> Vec<ShelfSide> {
        [ShelfSide::Left, ShelfSide::Right]
            .into_iter()
            .filter(|&s| self.contains(s))
            .collect()
    }
}

pub fn ybe_holds(sol: &Solution, mode: YbeMode) -> bool {
    sol.ybe_violation(mode).is_none()
}

pub fn properties(sol: &Solution) -> SolutionProps {
    sol.properties()
}

pub fn lambda_inverse(sol: &Solution, x: usize) -> Result<Permutation> {
    sol.lambda_inverse(x)
}

pub fn structure_shelf(sol: &Solution) -> Result<OperationTable> {
    sol.structure_shelf()
}

pub fn derived_solution(sol: &Solution) -> Result<Solution> {
    sol.derived_solution()
}

pub fn shelf_type_of(sol: &Solution) -> ShelfType {
    sol.shelf_type()
}

/// `r_▷(x, y) = (y, y ▷ x)` for a left shelf, `r_◁(x, y) = (y ◁ x, x)` for a
/// right shelf. The table must be self-distributive on the given side.
pub fn from_shelf(op: &OperationTable, side: ShelfSide) -> Result<Solution> {
    if let Some(witness) = op.distributivity_violation(side) {
        return Err(Error::NotSelfDistributive { side, witness });
    }
    Ok(shelf_solution_unchecked(op, side))
}

/// The map `from_shelf` would build, without the distributivity pre-check.
pub fn shelf_solution_unchecked(op: &OperationTable, side: ShelfSide) -> Solution {
    let n = op.size();
    let identity: Vec<usize> = (0..n * n).map(|i| i % n).collect();
    match side {
        // rho[y][x] = y ▷ x is the table itself
        ShelfSide::Left => Solution {
            size: n,
            lambda: identity,
            rho: op.cells().to_vec(),
        },
        // lambda[x][y] = y ◁ x is the transpose
        ShelfSide::Right => Solution {
            size: n,
            lambda: op.transpose().cells().to_vec(),
            rho: identity,
        },
    }
}
