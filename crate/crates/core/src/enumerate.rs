//! Exhaustive and seeded-sampled generation of shelves, solutions and
//! matched product systems, and classification up to isomorphism.
//!
//! Every function returns its results sorted lexicographically, so output is
//! the same whether or not the work was split across threads.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{canonical_form, check_iso_size, OperationTable, Permutation, ShelfSide};
use crate::error::{Error, Result};
use crate::matched::{
    check_simplified, check_system_general, factor_shelves, ActionFamily, Case, MatchedProductSystem,
};
use crate::solution::{Solution, YbeMode};

/// Largest carrier for [`enumerate_shelves`].
pub const MAX_SHELF_SIZE: usize = 4;
/// Largest carrier for which all `n^(n²)` tables are scanned one by one.
pub const MAX_NAIVE_TABLE_SIZE: usize = 3;
/// Largest carrier for exhaustive solution enumeration.
pub const MAX_EXHAUSTIVE_SOLUTION_SIZE: usize = 2;
/// Largest carrier for sampled solution enumeration.
pub const MAX_SAMPLED_SOLUTION_SIZE: usize = 6;
/// Largest factor size for an exhaustive system search.
pub const MAX_EXHAUSTIVE_FACTOR_SIZE: usize = 3;
/// Cap on `|Sym(S)|^|T| · |Sym(T)|^|S|` for an exhaustive system search.
pub const MAX_EXHAUSTIVE_ACTION_PAIRS: u128 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Exhaustive,
    Sampled { count: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSpec {
    pub sizes: (usize, usize),
    pub case: Case,
    pub mode: SearchMode,
    /// Keep one system per orbit under automorphisms of the two factors.
    pub dedupe: bool,
}

impl SearchSpec {
    pub fn exhaustive(sizes: (usize, usize), case: Case) -> Self {
        SearchSpec {
            sizes,
            case,
            mode: SearchMode::Exhaustive,
            dedupe: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (s, t) = self.sizes;
        if s == 0 || t == 0 {
            return Err(Error::EmptyCarrier);
        }
        if self.mode == SearchMode::Exhaustive {
            if s > MAX_EXHAUSTIVE_FACTOR_SIZE || t > MAX_EXHAUSTIVE_FACTOR_SIZE {
                return Err(Error::Unsupported(format!(
                    "exhaustive search on factors of sizes ({s}, {t}); limit is {MAX_EXHAUSTIVE_FACTOR_SIZE}"
                )));
            }
            let pairs = action_pair_count(s, t);
            if pairs > MAX_EXHAUSTIVE_ACTION_PAIRS {
                return Err(Error::Unsupported(format!(
                    "{pairs} action pairs exceed the exhaustive limit {MAX_EXHAUSTIVE_ACTION_PAIRS}"
                )));
            }
        }
        Ok(())
    }
}

/// `|Sym(S)|^|T| · |Sym(T)|^|S|`.
pub fn action_pair_count(s: usize, t: usize) -> u128 {
    let fact = |n: usize| (1..=n as u128).product::<u128>();
    fact(s)
        .saturating_pow(t as u32)
        .saturating_mul(fact(t).saturating_pow(s as u32))
}

/// Every operation table on `{0..n}`, in lexicographic order.
pub fn all_tables(n: usize) -> Result<impl Iterator<Item = OperationTable>> {
    if n == 0 {
        return Err(Error::EmptyCarrier);
    }
    if n > MAX_NAIVE_TABLE_SIZE {
        return Err(Error::Unsupported(format!("scanning all tables on {n} elements")));
    }
    let cells = n * n;
    let total = n.pow(cells as u32);
    Ok((0..total).map(move |mut code| {
        let mut flat = vec![0; cells];
        for slot in flat.iter_mut().rev() {
            *slot = code % n;
            code /= n;
        }
        OperationTable::from_cells(n, flat).expect("digits are below n")
    }))
}

/// All shelves on `{0..n}` for the given side, in lexicographic order of the
/// flattened table. Sizes up to 3 filter every table; size 4 uses the pruned
/// generator.
pub fn enumerate_shelves(n: usize, side: ShelfSide) -> Result<Vec<OperationTable>> {
    if n <= MAX_NAIVE_TABLE_SIZE {
        enumerate_shelves_naive(n, side)
    } else {
        enumerate_shelves_pruned(n, side)
    }
}

pub fn enumerate_shelves_naive(n: usize, side: ShelfSide) -> Result<Vec<OperationTable>> {
    Ok(all_tables(n)?.filter(|t| t.is_self_distributive(side)).collect())
}

pub fn enumerate_racks(n: usize, side: ShelfSide) -> Result<Vec<OperationTable>> {
    Ok(enumerate_shelves(n, side)?
        .into_iter()
        .filter(|t| t.is_rack(side))
        .collect())
}

/// Cell-by-cell backtracking in row-major order. After each assignment every
/// distributivity instance whose cells are all assigned is checked.
pub fn enumerate_shelves_pruned(n: usize, side: ShelfSide) -> Result<Vec<OperationTable>> {
    if n == 0 {
        return Err(Error::EmptyCarrier);
    }
    if n > MAX_SHELF_SIZE {
        return Err(Error::Unsupported(format!(
            "shelf enumeration on {n} elements (limit {MAX_SHELF_SIZE})"
        )));
    }
    // split on the first two cells so branches can run in parallel
    let prefix_len = (n * n).min(2);
    let prefixes: Vec<Vec<usize>> = (0..n.pow(prefix_len as u32))
        .map(|code| (0..prefix_len).rev().map(|i| (code / n.pow(i as u32)) % n).collect())
        .collect();
    let branches: Vec<Vec<OperationTable>> = prefixes
        .into_par_iter()
        .map(|prefix| {
            let mut search = ShelfSearch::new(n, side);
            let mut out = Vec::new();
            for (k, &v) in prefix.iter().enumerate() {
                search.cells[k] = v;
                if !search.consistent(k) {
                    return out;
                }
            }
            search.extend(prefix_len, &mut out);
            out
        })
        .collect();
    Ok(branches.into_iter().flatten().collect())
}

struct ShelfSearch {
    n: usize,
    side: ShelfSide,
    cells: Vec<usize>,
}

impl ShelfSearch {
    fn new(n: usize, side: ShelfSide) -> Self {
        ShelfSearch {
            n,
            side,
            cells: vec![0; n * n],
        }
    }

    fn extend(&mut self, k: usize, out: &mut Vec<OperationTable>) {
        if k == self.cells.len() {
            out.push(OperationTable::from_cells(self.n, self.cells.clone()).expect("cells in range"));
            return;
        }
        for v in 0..self.n {
            self.cells[k] = v;
            if self.consistent(k) {
                self.extend(k + 1, out);
            }
        }
    }

    /// Checks every instance fully determined by cells `0..=last`.
    fn consistent(&self, last: usize) -> bool {
        let n = self.n;
        let get = |x: usize, y: usize| {
            let i = x * n + y;
            (i <= last).then(|| self.cells[i])
        };
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let pair = match self.side {
                        ShelfSide::Left => (|| {
                            let yz = get(y, z)?;
                            let xy = get(x, y)?;
                            let xz = get(x, z)?;
                            Some((get(x, yz)?, get(xy, xz)?))
                        })(),
                        ShelfSide::Right => (|| {
                            let xy = get(x, y)?;
                            let xz = get(x, z)?;
                            let yz = get(y, z)?;
                            Some((get(xy, z)?, get(xz, yz)?))
                        })(),
                    };
                    if matches!(pair, Some((l, r)) if l != r) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Solutions on `{0..n}` in lexicographic order of `(λ cells, ρ cells)`.
/// Exhaustive mode covers `n ≤ 2`; sampled mode returns the distinct
/// solutions among `count` draws of [`random_solution`].
pub fn enumerate_solutions(n: usize, mode: SearchMode) -> Result<Vec<Solution>> {
    if n == 0 {
        return Err(Error::EmptyCarrier);
    }
    match mode {
        SearchMode::Exhaustive => {
            if n > MAX_EXHAUSTIVE_SOLUTION_SIZE {
                return Err(Error::Unsupported(format!(
                    "exhaustive solution enumeration on {n} elements (limit {MAX_EXHAUSTIVE_SOLUTION_SIZE})"
                )));
            }
            let grids: Vec<OperationTable> = all_tables(n)?.collect();
            Ok(grids
                .par_iter()
                .flat_map_iter(|lambda| {
                    grids.iter().filter_map(move |rho| {
                        let sol = Solution::from_cells_unchecked(n, lambda.cells().to_vec(), rho.cells().to_vec())
                            .expect("cells in range");
                        sol.ybe_violation(YbeMode::Direct).is_none().then_some(sol)
                    })
                })
                .collect())
        }
        SearchMode::Sampled { count, seed } => {
            if n > MAX_SAMPLED_SOLUTION_SIZE {
                return Err(Error::Unsupported(format!(
                    "sampled solution enumeration on {n} elements (limit {MAX_SAMPLED_SOLUTION_SIZE})"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut found = BTreeSet::new();
            for _ in 0..count {
                found.insert(random_solution(n, &mut rng));
            }
            Ok(found.into_iter().collect())
        }
    }
}

/// Draws one solution by depth-first search over the values `r(x, y)`,
/// pair by pair, trying values in a random order and pruning on every braid
/// instance whose values are already assigned. A search that exceeds its node
/// budget restarts with fresh random choices. Solutions are not drawn
/// uniformly.
pub fn random_solution(n: usize, rng: &mut impl Rng) -> Solution {
    const NODE_BUDGET: usize = 20_000;
    fn extend(n: usize, values: &mut Vec<(usize, usize)>, rng: &mut impl Rng, budget: &mut usize) -> bool {
        if values.len() == n * n {
            return true;
        }
        let mut choices: Vec<(usize, usize)> = (0..n).flat_map(|l| (0..n).map(move |p| (l, p))).collect();
        choices.shuffle(rng);
        for choice in choices {
            if *budget == 0 {
                return false;
            }
            *budget -= 1;
            values.push(choice);
            if braid_consistent(n, values) && extend(n, values, rng, budget) {
                return true;
            }
            values.pop();
        }
        false
    }
    loop {
        let mut values = Vec::with_capacity(n * n);
        let mut budget = NODE_BUDGET;
        if extend(n, &mut values, rng, &mut budget) {
            return Solution::from_map_unchecked(n, |x, y| values[x * n + y]).expect("values in range");
        }
    }
}

/// `values[x·n + y] = r(x, y)` for a prefix of the pairs.
fn braid_consistent(n: usize, values: &[(usize, usize)]) -> bool {
    let r = |x: usize, y: usize| values.get(x * n + y).copied();
    let left = |x, y, z| -> Option<(usize, usize, usize)> {
        let (x1, y1) = r(x, y)?;
        let (y2, z1) = r(y1, z)?;
        let (x2, y3) = r(x1, y2)?;
        Some((x2, y3, z1))
    };
    let right = |x, y, z| -> Option<(usize, usize, usize)> {
        let (y1, z1) = r(y, z)?;
        let (x1, y2) = r(x, y1)?;
        let (y3, z2) = r(y2, z1)?;
        Some((x1, y3, z2))
    };
    (0..n).all(|x| {
        (0..n).all(|y| (0..n).all(|z| !matches!((left(x, y, z), right(x, y, z)), (Some(a), Some(b)) if a != b)))
    })
}

/// Every map `{0..domain} → Sym(codomain)`, lexicographic in the concatenated
/// image sequences.
pub fn action_families(domain: usize, codomain: usize) -> Vec<ActionFamily> {
    let perms = Permutation::all(codomain);
    let total = perms.len().pow(domain as u32);
    (0..total)
        .map(|mut code| {
            let mut chosen = vec![0; domain];
            for slot in chosen.iter_mut().rev() {
                *slot = code % perms.len();
                code /= perms.len();
            }
            ActionFamily::new(codomain, chosen.into_iter().map(|i| perms[i].clone()).collect())
                .expect("non-empty family of equal-size permutations")
        })
        .collect()
}

/// Draws a family: with probability ½ a constant family, otherwise every
/// value independently and uniformly from `Sym(codomain)`.
pub fn sample_family(rng: &mut impl Rng, perms: &[Permutation], domain: usize) -> ActionFamily {
    let codomain = perms[0].size();
    let values = if rng.gen_bool(0.5) {
        vec![perms.choose(rng).expect("non-empty").clone(); domain]
    } else {
        (0..domain)
            .map(|_| perms.choose(rng).expect("non-empty").clone())
            .collect()
    };
    ActionFamily::new(codomain, values).expect("sizes agree")
}

/// All action pairs `(α, β)` for which `(r_s, r_t, α, β)` passes the check
/// selected by `spec.case`.
pub fn search_systems(r_s: &Solution, r_t: &Solution, spec: &SearchSpec) -> Result<Vec<MatchedProductSystem>> {
    spec.validate()?;
    let (s, t) = (r_s.size(), r_t.size());
    if spec.sizes != (s, t) {
        return Err(Error::SizeMismatch {
            left: spec.sizes.0 * spec.sizes.1,
            right: s * t,
        });
    }
    let probe = MatchedProductSystem::new(
        r_s.clone(),
        r_t.clone(),
        ActionFamily::identity(t, s)?,
        ActionFamily::identity(s, t)?,
    )?;
    if spec.case != Case::General {
        factor_shelves(&probe, spec.case)?;
    }
    let accept = |sys: &MatchedProductSystem| -> bool {
        match spec.case {
            Case::General => check_system_general(sys).valid,
            case => check_simplified(sys, case).map(|r| r.valid).unwrap_or(false),
        }
    };
    let make = |alpha: &ActionFamily, beta: &ActionFamily| {
        MatchedProductSystem::new(r_s.clone(), r_t.clone(), alpha.clone(), beta.clone()).expect("sizes checked")
    };

    let mut found: Vec<MatchedProductSystem> = match spec.mode {
        SearchMode::Exhaustive => {
            let alphas = action_families(t, s);
            let betas = action_families(s, t);
            alphas
                .par_iter()
                .flat_map_iter(|alpha| {
                    betas
                        .iter()
                        .map(move |beta| make(alpha, beta))
                        .filter(|sys| accept(sys))
                })
                .collect()
        }
        SearchMode::Sampled { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (perms_s, perms_t) = (Permutation::all(s), Permutation::all(t));
            let mut seen = BTreeSet::new();
            for _ in 0..count {
                let alpha = sample_family(&mut rng, &perms_s, t);
                let beta = sample_family(&mut rng, &perms_t, s);
                let sys = make(&alpha, &beta);
                if accept(&sys) {
                    seen.insert(system_key(&sys));
                }
            }
            seen.into_iter().map(|(a, b)| make(&a, &b)).collect()
        }
    };

    if spec.dedupe {
        let auts_s = solution_automorphisms(r_s)?;
        let auts_t = solution_automorphisms(r_t)?;
        let classes: BTreeSet<(ActionFamily, ActionFamily)> = found
            .iter()
            .map(|sys| canonical_actions(sys, &auts_s, &auts_t))
            .collect();
        found = classes.into_iter().map(|(a, b)| make(&a, &b)).collect();
    }
    Ok(found)
}

fn system_key(sys: &MatchedProductSystem) -> (ActionFamily, ActionFamily) {
    (sys.alpha().clone(), sys.beta().clone())
}

/// Permutations `σ` with `r(σx, σy) = (σ × σ) r(x, y)`.
pub fn solution_automorphisms(sol: &Solution) -> Result<Vec<Permutation>> {
    let n = sol.size();
    check_iso_size(n)?;
    Ok(Permutation::all(n)
        .into_iter()
        .filter(|sigma| {
            (0..n).all(|x| {
                (0..n).all(|y| {
                    let (l, r) = sol.apply(x, y);
                    sol.apply(sigma.apply(x), sigma.apply(y)) == (sigma.apply(l), sigma.apply(r))
                })
            })
        })
        .collect())
}

/// Conjugates the actions by factor automorphisms `σ ∈ Aut(r_S)`,
/// `τ ∈ Aut(r_T)`: `α'_{τ(u)} = σ α_u σ⁻¹` and `β'_{σ(a)} = τ β_a τ⁻¹`.
/// Then `σ × τ` is an isomorphism between the two matched products.
pub fn transport_actions(
    sys: &MatchedProductSystem,
    sigma: &Permutation,
    tau: &Permutation,
) -> Result<(ActionFamily, ActionFamily)> {
    let conjugate = |family: &ActionFamily, outer: &Permutation, inner: &Permutation| -> Result<ActionFamily> {
        let outer_inv = outer.inverse();
        let mut values = vec![Permutation::identity(outer.size()); family.domain_size()];
        for i in 0..family.domain_size() {
            values[inner.apply(i)] = outer.compose(family.get(i))?.compose(&outer_inv)?;
        }
        ActionFamily::new(outer.size(), values)
    };
    Ok((conjugate(sys.alpha(), sigma, tau)?, conjugate(sys.beta(), tau, sigma)?))
}

fn canonical_actions(
    sys: &MatchedProductSystem,
    auts_s: &[Permutation],
    auts_t: &[Permutation],
) -> (ActionFamily, ActionFamily) {
    auts_s
        .iter()
        .flat_map(|sigma| auts_t.iter().map(move |tau| (sigma, tau)))
        .map(|(sigma, tau)| transport_actions(sys, sigma, tau).expect("automorphisms match factor sizes"))
        .min_by_key(|(a, b)| (a.key(), b.key()))
        .expect("identity automorphism is always present")
}

/// One representative per isomorphism class: the lexicographically least
/// table of the class. The result is sorted, so it does not depend on the
/// order of the input.
pub fn classify_up_to_iso(tables: &[OperationTable]) -> Result<Vec<OperationTable>> {
    if let Some(first) = tables.first() {
        let n = first.size();
        check_iso_size(n)?;
        if let Some(t) = tables.iter().find(|t| t.size() != n) {
            return Err(Error::SizeMismatch {
                left: n,
                right: t.size(),
            });
        }
    }
    let classes: BTreeSet<OperationTable> = tables
        .par_iter()
        .map(canonical_form)
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .collect();
    Ok(classes.into_iter().collect())
}
