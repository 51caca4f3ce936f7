//! Mechanical verification of the structural results on bounded instances.
//!
//! Each [`TheoremId`] names one claim. [`verify_theorem`] runs the claim on
//! every instance within the bounds (or on seeded samples) and returns the
//! number of instances checked together with the first counterexample, if
//! any. A counterexample carries the full instance so it can be replayed with
//! [`replay`].

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{OperationTable, Permutation, ShelfSide};
use crate::enumerate::{
    action_families, all_tables, enumerate_shelves, enumerate_solutions, sample_family, SearchMode,
};
use crate::error::{Error, Result};
use crate::matched::{
    build_matched_product_unchecked, check_simplified, check_system_general, closed_form, direct_product_shelf,
    direct_product_solution, triviality_check, ActionFamily, Case, MatchedProductSystem,
};
use crate::solution::{shelf_solution_unchecked, shelf_type_of, Solution, YbeMode};

/// Largest factor size covered by exhaustive theorem checks.
pub const MAX_EXHAUSTIVE_THEOREM_SIZE: usize = 2;
/// Largest carrier for the exhaustive shelf/solution correspondence check.
pub const MAX_EXHAUSTIVE_TABLE_SIZE: usize = 3;
/// Default number of samples for sampled checks.
pub const DEFAULT_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TheoremId {
    /// A table is a shelf exactly when its solution satisfies the braid relation.
    #[serde(rename = "S2-correspondence")]
    ShelfCorrespondence,
    /// Left-left criteria agree with the general conditions; closed form.
    #[serde(rename = "T3.1")]
    LeftLeftCriteria,
    #[serde(rename = "T3.3")]
    LeftLeftTriviality,
    #[serde(rename = "P3.4")]
    LeftLeftStructureShelf,
    #[serde(rename = "T4.1")]
    RightRightCriteria,
    #[serde(rename = "T4.2")]
    RightRightTriviality,
    #[serde(rename = "P4.3")]
    RightRightStructureShelf,
    #[serde(rename = "T5.1")]
    LeftRightCriteria,
    #[serde(rename = "P5.2")]
    LeftRightStructureShelf,
    /// Structure shelf and derived solution of a product of left
    /// non-degenerate solutions are componentwise.
    #[serde(rename = "T6.1")]
    StructureShelfIndependence,
}

impl TheoremId {
    pub const ALL: [TheoremId; 10] = [
        TheoremId::ShelfCorrespondence,
        TheoremId::LeftLeftCriteria,
        TheoremId::LeftLeftTriviality,
        TheoremId::LeftLeftStructureShelf,
        TheoremId::RightRightCriteria,
        TheoremId::RightRightTriviality,
        TheoremId::RightRightStructureShelf,
        TheoremId::LeftRightCriteria,
        TheoremId::LeftRightStructureShelf,
        TheoremId::StructureShelfIndependence,
    ];

    pub fn label(self) -> &'static str {
        match self {
            TheoremId::ShelfCorrespondence => "S2-correspondence",
            TheoremId::LeftLeftCriteria => "T3.1",
            TheoremId::LeftLeftTriviality => "T3.3",
            TheoremId::LeftLeftStructureShelf => "P3.4",
            TheoremId::RightRightCriteria => "T4.1",
            TheoremId::RightRightTriviality => "T4.2",
            TheoremId::RightRightStructureShelf => "P4.3",
            TheoremId::LeftRightCriteria => "T5.1",
            TheoremId::LeftRightStructureShelf => "P5.2",
            TheoremId::StructureShelfIndependence => "T6.1",
        }
    }

    pub fn from_label(label: &str) -> Option<TheoremId> {
        TheoremId::ALL
            .into_iter()
            .find(|id| id.label().eq_ignore_ascii_case(label))
    }

    /// The shelf case this claim is about, if any.
    pub fn case(self) -> Option<Case> {
        use TheoremId::*;
        match self {
            LeftLeftCriteria | LeftLeftTriviality | LeftLeftStructureShelf => Some(Case::LeftLeft),
            RightRightCriteria | RightRightTriviality | RightRightStructureShelf => Some(Case::RightRight),
            LeftRightCriteria | LeftRightStructureShelf => Some(Case::LeftRight),
            ShelfCorrespondence | StructureShelfIndependence => None,
        }
    }
}

impl std::fmt::Display for TheoremId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Instance {
    Table { table: OperationTable },
    System { case: Case, system: MatchedProductSystem },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub reason: String,
    pub instance: Instance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub theorem: TheoremId,
    /// Instances that met the hypotheses and were checked.
    pub instances: u64,
    pub counterexample: Option<Counterexample>,
}

impl TheoremReport {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Checks `id` on all sizes up to `max_sizes` (exhaustive mode) or on
/// samples at exactly `max_sizes` (sampled mode). For the correspondence
/// claim both sizes refer to the carrier and the larger one is used.
pub fn verify_theorem(id: TheoremId, max_sizes: (usize, usize), mode: SearchMode) -> Result<TheoremReport> {
    match mode {
        SearchMode::Sampled { .. } => verify_theorem_at(id, max_sizes, mode),
        SearchMode::Exhaustive => {
            let mut total = TheoremReport {
                theorem: id,
                instances: 0,
                counterexample: None,
            };
            let pairs: Vec<(usize, usize)> = if id == TheoremId::ShelfCorrespondence {
                (1..=max_sizes.0.max(max_sizes.1)).map(|n| (n, n)).collect()
            } else {
                (1..=max_sizes.0)
                    .flat_map(|s| (1..=max_sizes.1).map(move |t| (s, t)))
                    .collect()
            };
            for sizes in pairs {
                let part = verify_theorem_at(id, sizes, mode)?;
                total.instances += part.instances;
                if total.counterexample.is_none() {
                    total.counterexample = part.counterexample;
                }
            }
            Ok(total)
        }
    }
}

/// Checks `id` at exactly the factor sizes `sizes`.
pub fn verify_theorem_at(id: TheoremId, sizes: (usize, usize), mode: SearchMode) -> Result<TheoremReport> {
    let (s, t) = sizes;
    if s == 0 || t == 0 {
        return Err(Error::EmptyCarrier);
    }
    let mut run = Runner::new(id);
    match (id, mode) {
        (TheoremId::ShelfCorrespondence, SearchMode::Exhaustive) => {
            let n = s.max(t);
            if n > MAX_EXHAUSTIVE_TABLE_SIZE {
                return Err(bounds_error(id, sizes));
            }
            for table in all_tables(n)? {
                run.table(table);
            }
        }
        (TheoremId::ShelfCorrespondence, SearchMode::Sampled { count, seed }) => {
            let n = s.max(t);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..count {
                let cells = (0..n * n).map(|_| rng.gen_range(0..n)).collect();
                let table = OperationTable::from_cells(n, cells)?;
                run.table(table);
            }
        }
        (TheoremId::StructureShelfIndependence, SearchMode::Exhaustive) => {
            if s > MAX_EXHAUSTIVE_THEOREM_SIZE || t > MAX_EXHAUSTIVE_THEOREM_SIZE {
                return Err(bounds_error(id, sizes));
            }
            let pool_s = left_nondegenerate_solutions(s)?;
            let pool_t = left_nondegenerate_solutions(t)?;
            let (alphas, betas) = (action_families(t, s), action_families(s, t));
            for r_s in &pool_s {
                for r_t in &pool_t {
                    for alpha in &alphas {
                        for beta in &betas {
                            run.system(Case::General, system(r_s, r_t, alpha, beta));
                        }
                    }
                }
            }
        }
        (TheoremId::StructureShelfIndependence, SearchMode::Sampled { count, seed }) => {
            let pool_s = sampling_pool(s)?;
            let pool_t = sampling_pool(t)?;
            let (perms_s, perms_t) = (Permutation::all(s), Permutation::all(t));
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..count {
                let r_s = pool_s.choose(&mut rng).expect("pool is non-empty");
                let r_t = pool_t.choose(&mut rng).expect("pool is non-empty");
                let alpha = sample_family(&mut rng, &perms_s, t);
                let beta = sample_family(&mut rng, &perms_t, s);
                run.system(Case::General, system(r_s, r_t, &alpha, &beta));
            }
        }
        (_, mode) => {
            let case = id.case().expect("remaining claims are about a shelf case");
            let (side_s, side_t) = case.sides().expect("shelf case");
            let shelves_s = enumerate_shelves(s, side_s)?;
            let shelves_t = enumerate_shelves(t, side_t)?;
            // the structure-shelf claims need right racks; draw factors that qualify
            let (racks_s, racks_t) = match id {
                TheoremId::RightRightStructureShelf => (true, true),
                TheoremId::LeftRightStructureShelf => (false, true),
                _ => (false, false),
            };
            let pool = |shelves: &[OperationTable], side: ShelfSide, racks: bool| -> Vec<Solution> {
                shelves
                    .iter()
                    .filter(|op| !racks || op.is_rack(ShelfSide::Right))
                    .map(|op| shelf_solution_unchecked(op, side))
                    .collect()
            };
            let sols_s = pool(&shelves_s, side_s, racks_s);
            let sols_t = pool(&shelves_t, side_t, racks_t);
            match mode {
                SearchMode::Exhaustive => {
                    if s > MAX_EXHAUSTIVE_THEOREM_SIZE || t > MAX_EXHAUSTIVE_THEOREM_SIZE {
                        return Err(bounds_error(id, sizes));
                    }
                    let (alphas, betas) = (action_families(t, s), action_families(s, t));
                    for r_s in &sols_s {
                        for r_t in &sols_t {
                            for alpha in &alphas {
                                for beta in &betas {
                                    run.system(case, system(r_s, r_t, alpha, beta));
                                }
                            }
                        }
                    }
                }
                SearchMode::Sampled { count, seed } => {
                    let (perms_s, perms_t) = (Permutation::all(s), Permutation::all(t));
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    for _ in 0..count {
                        let r_s = sols_s.choose(&mut rng).expect("every size has a shelf");
                        let r_t = sols_t.choose(&mut rng).expect("every size has a shelf");
                        let alpha = sample_family(&mut rng, &perms_s, t);
                        let beta = sample_family(&mut rng, &perms_t, s);
                        run.system(case, system(r_s, r_t, &alpha, &beta));
                    }
                }
            }
        }
    }
    Ok(run.finish())
}

/// Re-runs the claim on the recorded counterexample; `true` when the
/// discrepancy reproduces. Reports without a counterexample replay as `false`.
pub fn replay(report: &TheoremReport) -> Result<bool> {
    match &report.counterexample {
        None => Ok(false),
        Some(cx) => Ok(check_instance(report.theorem, &cx.instance)?.is_some()),
    }
}

/// Runs the claim on a single instance. `Ok(None)` means the claim holds or
/// the hypotheses are not met; `Ok(Some(reason))` describes a failure.
pub fn check_instance(id: TheoremId, instance: &Instance) -> Result<Option<String>> {
    Ok(match instance {
        Instance::Table { table } => {
            if id != TheoremId::ShelfCorrespondence {
                return Err(Error::Unsupported(format!("{id} is not checked on single tables")));
            }
            check_correspondence(table)
        }
        Instance::System { case, system } => match id {
            TheoremId::ShelfCorrespondence => {
                return Err(Error::Unsupported(format!("{id} is checked on single tables")));
            }
            TheoremId::StructureShelfIndependence => evaluate(id, Case::General, system)?.failure,
            _ => {
                if id.case() != Some(*case) {
                    return Err(Error::CaseMismatch {
                        case: *case,
                        reason: format!("{id} concerns case {}", id.case().expect("shelf case")),
                    });
                }
                evaluate(id, *case, system)?.failure
            }
        },
    })
}

fn bounds_error(id: TheoremId, sizes: (usize, usize)) -> Error {
    Error::Unsupported(format!(
        "exhaustive check of {id} at sizes {sizes:?} is beyond the supported bounds"
    ))
}

fn system(r_s: &Solution, r_t: &Solution, alpha: &ActionFamily, beta: &ActionFamily) -> MatchedProductSystem {
    MatchedProductSystem::new(r_s.clone(), r_t.clone(), alpha.clone(), beta.clone()).expect("factor sizes agree")
}

fn left_nondegenerate_solutions(n: usize) -> Result<Vec<Solution>> {
    Ok(enumerate_solutions(n, SearchMode::Exhaustive)?
        .into_iter()
        .filter(Solution::is_left_nondegenerate)
        .collect())
}

/// Factor pool for sampled structure-shelf checks: every left non-degenerate
/// solution when the size allows full enumeration, otherwise the solutions of
/// all left shelves and right racks on `n` elements.
fn sampling_pool(n: usize) -> Result<Vec<Solution>> {
    if n <= MAX_EXHAUSTIVE_THEOREM_SIZE {
        return left_nondegenerate_solutions(n);
    }
    let mut pool: Vec<Solution> = enumerate_shelves(n, ShelfSide::Left)?
        .iter()
        .map(|op| shelf_solution_unchecked(op, ShelfSide::Left))
        .collect();
    pool.extend(
        enumerate_shelves(n, ShelfSide::Right)?
            .iter()
            .filter(|op| op.is_rack(ShelfSide::Right))
            .map(|op| shelf_solution_unchecked(op, ShelfSide::Right)),
    );
    Ok(pool)
}

fn check_correspondence(table: &OperationTable) -> Option<String> {
    for side in [ShelfSide::Left, ShelfSide::Right] {
        let sol = shelf_solution_unchecked(table, side);
        let sd = table.is_self_distributive(side);
        let braid = sol.ybe_violation(YbeMode::Direct).is_none();
        if sd != braid {
            return Some(format!(
                "{side} self-distributivity is {sd} but the braid relation holds: {braid}"
            ));
        }
        if sd {
            let rack = table.is_rack(side);
            let nondeg = sol.is_left_nondegenerate() && sol.is_right_nondegenerate();
            if rack != nondeg {
                return Some(format!("{side} rack is {rack} but non-degeneracy is {nondeg}"));
            }
        }
    }
    None
}

struct Evaluation {
    /// Whether the instance meets the hypotheses of the claim.
    applies: bool,
    failure: Option<String>,
    /// Structure shelf of the product, for the independence bookkeeping.
    structure: Option<OperationTable>,
}

fn evaluate(id: TheoremId, case: Case, sys: &MatchedProductSystem) -> Result<Evaluation> {
    let skip = Evaluation {
        applies: false,
        failure: None,
        structure: None,
    };
    let done = |failure: Option<String>| Evaluation {
        applies: true,
        failure,
        structure: None,
    };
    use TheoremId::*;
    match id {
        LeftLeftCriteria | RightRightCriteria | LeftRightCriteria => {
            let general = check_system_general(sys).valid;
            let simplified = check_simplified(sys, case)?.valid;
            if general != simplified {
                return Ok(done(Some(format!(
                    "general conditions give {general}, case {case} criteria give {simplified}"
                ))));
            }
            if !general {
                return Ok(done(None));
            }
            let product = build_matched_product_unchecked(sys);
            if closed_form(sys, case)? != product {
                return Ok(done(Some("closed form differs from the product formula".into())));
            }
            for mode in [YbeMode::Direct, YbeMode::Componentwise] {
                if let Some(w) = product.ybe_violation(mode) {
                    return Ok(done(Some(format!(
                        "product fails the braid relation at {w:?} ({mode:?})"
                    ))));
                }
            }
            let (op_s, op_t) = crate::matched::factor_shelves(sys, case)?;
            let expected = match case {
                Case::LeftLeft => true,
                Case::RightRight => op_s.is_rack(ShelfSide::Right) && op_t.is_rack(ShelfSide::Right),
                _ => op_t.is_rack(ShelfSide::Right),
            };
            let actual = product.is_left_nondegenerate();
            Ok(done((actual != expected).then(|| {
                format!("product left non-degeneracy is {actual}, expected {expected}")
            })))
        }
        LeftLeftTriviality | RightRightTriviality => {
            if !check_simplified(sys, case)?.valid {
                return Ok(skip);
            }
            let (side, _) = case.sides().expect("shelf case");
            let product = build_matched_product_unchecked(sys);
            let shelf_type = shelf_type_of(&product).contains(side);
            let trivial = triviality_check(sys, case)?;
            Ok(done((shelf_type != trivial).then(|| {
                format!("product is {side} shelf type: {shelf_type}, actions trivial: {trivial}")
            })))
        }
        LeftLeftStructureShelf | RightRightStructureShelf | LeftRightStructureShelf => {
            if !check_simplified(sys, case)?.valid {
                return Ok(skip);
            }
            let (op_s, op_t) = crate::matched::factor_shelves(sys, case)?;
            let nondegenerate = match case {
                Case::LeftLeft => true,
                Case::RightRight => op_s.is_rack(ShelfSide::Right) && op_t.is_rack(ShelfSide::Right),
                _ => op_t.is_rack(ShelfSide::Right),
            };
            if !nondegenerate {
                return Ok(skip);
            }
            let product = build_matched_product_unchecked(sys);
            let shelf = product.structure_shelf()?;
            let expected = direct_product_shelf(&op_s, &op_t, case)?;
            Ok(done(
                (shelf != expected).then(|| "structure shelf is not componentwise".to_string()),
            ))
        }
        StructureShelfIndependence => {
            let (r_s, r_t) = (sys.r_s(), sys.r_t());
            if !r_s.is_left_nondegenerate() || !r_t.is_left_nondegenerate() || !check_system_general(sys).valid {
                return Ok(skip);
            }
            let product = build_matched_product_unchecked(sys);
            if !product.is_left_nondegenerate() {
                return Ok(done(Some(
                    "product of left non-degenerate factors is degenerate".into(),
                )));
            }
            let shelf = product.structure_shelf()?;
            let expected = direct_product_shelf(&r_s.structure_shelf()?, &r_t.structure_shelf()?, Case::General)?;
            if shelf != expected {
                return Ok(done(Some("structure shelf is not componentwise".into())));
            }
            let derived = product.derived_solution()?;
            let expected = direct_product_solution(&r_s.derived_solution()?, &r_t.derived_solution()?);
            Ok(Evaluation {
                applies: true,
                failure: (derived != expected)
                    .then(|| "derived solution is not the product of the derived factors".to_string()),
                structure: Some(shelf),
            })
        }
        ShelfCorrespondence => Err(Error::Unsupported(format!("{id} is checked on single tables"))),
    }
}

struct Runner {
    report: TheoremReport,
    /// First structure shelf seen per factor pair.
    structures: BTreeMap<(Solution, Solution), OperationTable>,
}

impl Runner {
    fn new(id: TheoremId) -> Self {
        Runner {
            report: TheoremReport {
                theorem: id,
                instances: 0,
                counterexample: None,
            },
            structures: BTreeMap::new(),
        }
    }

    fn fail(&mut self, reason: String, instance: Instance) {
        if self.report.counterexample.is_none() {
            self.report.counterexample = Some(Counterexample { reason, instance });
        }
    }

    fn table(&mut self, table: OperationTable) {
        self.report.instances += 1;
        if let Some(reason) = check_correspondence(&table) {
            self.fail(reason, Instance::Table { table });
        }
    }

    fn system(&mut self, case: Case, sys: MatchedProductSystem) {
        let eval = match evaluate(self.report.theorem, case, &sys) {
            Ok(eval) => eval,
            Err(err) => Evaluation {
                applies: true,
                failure: Some(format!("check raised an error: {err}")),
                structure: None,
            },
        };
        if !eval.applies {
            return;
        }
        self.report.instances += 1;
        let mut failure = eval.failure;
        if let Some(shelf) = eval.structure {
            let key = (sys.r_s().clone(), sys.r_t().clone());
            let first = self.structures.entry(key).or_insert_with(|| shelf.clone());
            if failure.is_none() && *first != shelf {
                failure = Some("structure shelf depends on the actions".into());
            }
        }
        if let Some(reason) = failure {
            self.fail(reason, Instance::System { case, system: sys });
        }
    }

    fn finish(self) -> TheoremReport {
        self.report
    }
}
