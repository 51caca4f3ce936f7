//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints its PASS/FAIL line: `cargo test -p braidshelf --test acceptance`.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use braidshelf::algebra::{OperationTable, Permutation, ShelfSide};
use braidshelf::enumerate::{
    action_families, enumerate_racks, enumerate_shelves, enumerate_solutions, search_systems, SearchMode, SearchSpec,
};
use braidshelf::matched::{
    build_matched_product, check_simplified, check_system_general, closed_form, direct_product_shelf,
    direct_product_solution, ActionFamily, Case, MatchedProductSystem,
};
use braidshelf::solution::{from_shelf, shelf_solution_unchecked, Solution, YbeMode};
use braidshelf::theorem::{verify_theorem, verify_theorem_at, TheoremId, TheoremReport};

const CORRESPONDENCE_BUDGET: Duration = Duration::from_secs(5);
const MODE_AGREEMENT_BUDGET: Duration = Duration::from_secs(60);
const LEFT_LEFT_BUDGET: Duration = Duration::from_secs(1);

const SAMPLES: usize = 10_000;
const SEED: u64 = 0;

// Frozen after confirmation by the brute-force oracles in `common`.
const LEFT_SHELVES_ON_2: usize = 9;
const LEFT_RACKS_ON_2: usize = 2;
const SOLUTIONS_ON_2: usize = 43;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn clean(report: &TheoremReport) -> Result<(), String> {
    match &report.counterexample {
        None => Ok(()),
        Some(cx) => Err(format!("{} counterexample: {}", report.theorem, cx.reason)),
    }
}

fn timed(budget: Duration, start: Instant) -> Result<String, String> {
    let took = start.elapsed();
    ensure(took < budget, format!("took {took:?}, budget {budget:?}"))?;
    Ok(format!("{took:.2?} < {budget:?}"))
}

fn pairs_on(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |x| (0..n).map(move |y| (x, y)))
}

fn shelf_solutions(n: usize, side: ShelfSide) -> Vec<Solution> {
    enumerate_shelves(n, side)
        .unwrap()
        .iter()
        .map(|op| shelf_solution_unchecked(op, side))
        .collect()
}

fn systems(r_s: &Solution, r_t: &Solution) -> Vec<MatchedProductSystem> {
    let alphas = action_families(r_t.size(), r_s.size());
    let betas = action_families(r_s.size(), r_t.size());
    alphas
        .iter()
        .flat_map(|a| {
            betas
                .iter()
                .map(move |b| MatchedProductSystem::new(r_s.clone(), r_t.clone(), a.clone(), b.clone()).unwrap())
        })
        .collect()
}

fn shelf_correspondence() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for n in 1..=3 {
        for cells in common::all_grids(n) {
            let op = OperationTable::from_cells(n, cells).unwrap();
            for side in [ShelfSide::Left, ShelfSide::Right] {
                let braid = shelf_solution_unchecked(&op, side)
                    .ybe_violation(YbeMode::Direct)
                    .is_none();
                ensure(
                    op.is_self_distributive(side) == braid,
                    format!("{side} mismatch on {:?}", op.rows()),
                )?;
            }
            checked += 1;
        }
    }
    ensure(checked == 19_683 + 16 + 1, format!("checked {checked} tables"))?;
    let report = verify_theorem(TheoremId::ShelfCorrespondence, (3, 3), SearchMode::Exhaustive).unwrap();
    clean(&report)?;
    ensure(
        report.instances == 19_700,
        format!("report counted {}", report.instances),
    )?;
    Ok(format!("{checked} tables, {}", timed(CORRESPONDENCE_BUDGET, start)?))
}

fn mode_agreement() -> Outcome {
    let start = Instant::now();
    let grids = common::all_grids(2);
    let mut solutions = 0;
    for l in &grids {
        for p in &grids {
            let sol = Solution::from_cells_unchecked(2, l.clone(), p.clone()).unwrap();
            let direct = sol.ybe_violation(YbeMode::Direct).is_none();
            let components = sol.ybe_violation(YbeMode::Componentwise).is_none();
            ensure(direct == components, format!("modes disagree on {sol:?}"))?;
            solutions += direct as usize;
        }
    }
    Ok(format!(
        "{} grid pairs, {solutions} solutions, {}",
        grids.len() * grids.len(),
        timed(MODE_AGREEMENT_BUDGET, start)?
    ))
}

fn structure_roundtrip() -> Outcome {
    let mut count = 0;
    for n in 1..=3 {
        for op in enumerate_shelves(n, ShelfSide::Left).unwrap() {
            let back = from_shelf(&op, ShelfSide::Left).unwrap().structure_shelf().unwrap();
            ensure(back == op, format!("roundtrip changed {:?}", op.rows()))?;
            count += 1;
        }
    }
    Ok(format!("{count} left shelves with n <= 3"))
}

/// Criteria shared by the three shelf cases on the size-2 inventory.
fn case_inventory(case: Case) -> Result<(usize, usize), String> {
    let (side_s, side_t) = case.sides().unwrap();
    let (mut instances, mut valid) = (0, 0);
    for r_s in shelf_solutions(2, side_s) {
        for r_t in shelf_solutions(2, side_t) {
            let (op_s, op_t) = (r_s.shelf_type(), r_t.shelf_type());
            let (op_s, op_t) = (op_s.table(side_s).unwrap().clone(), op_t.table(side_t).unwrap().clone());
            for sys in systems(&r_s, &r_t) {
                instances += 1;
                let general = check_system_general(&sys).valid;
                let simplified = check_simplified(&sys, case).unwrap().valid;
                ensure(
                    general == simplified,
                    format!("{case}: general {general}, simplified {simplified}"),
                )?;
                if !general {
                    continue;
                }
                valid += 1;
                let product = build_matched_product(&sys).unwrap();
                ensure(
                    closed_form(&sys, case).unwrap() == product,
                    format!("{case}: closed form differs"),
                )?;
                let expected = match case {
                    Case::LeftLeft => true,
                    Case::RightRight => op_s.is_rack(ShelfSide::Right) && op_t.is_rack(ShelfSide::Right),
                    _ => op_t.is_rack(ShelfSide::Right),
                };
                ensure(
                    product.is_left_nondegenerate() == expected,
                    format!("{case}: left non-degeneracy should be {expected}"),
                )?;
            }
        }
    }
    Ok((instances, valid))
}

fn left_left_criteria() -> Outcome {
    let start = Instant::now();
    let (instances, valid) = case_inventory(Case::LeftLeft)?;
    ensure(instances == 1296, format!("{instances} instances"))?;
    let report = verify_theorem_at(TheoremId::LeftLeftCriteria, (2, 2), SearchMode::Exhaustive).unwrap();
    clean(&report)?;
    Ok(format!(
        "{instances} instances, {valid} valid, {}",
        timed(LEFT_LEFT_BUDGET, start)?
    ))
}

fn right_and_mixed_criteria() -> Outcome {
    let mut parts = Vec::new();
    for (case, id) in [
        (Case::RightRight, TheoremId::RightRightCriteria),
        (Case::LeftRight, TheoremId::LeftRightCriteria),
    ] {
        let (instances, valid) = case_inventory(case)?;
        ensure(instances == 1296, format!("{case}: {instances} instances"))?;
        clean(&verify_theorem_at(id, (2, 2), SearchMode::Exhaustive).unwrap())?;
        let sampled = verify_theorem(
            id,
            (3, 3),
            SearchMode::Sampled {
                count: SAMPLES,
                seed: SEED,
            },
        )
        .unwrap();
        clean(&sampled)?;
        ensure(
            sampled.instances == SAMPLES as u64,
            format!("{case}: sampled {}", sampled.instances),
        )?;
        parts.push(format!("{case} {valid}/{instances} valid + {SAMPLES} samples"));
    }
    Ok(parts.join(", "))
}

fn triviality() -> Outcome {
    let mut parts = Vec::new();
    for (case, id) in [
        (Case::LeftLeft, TheoremId::LeftLeftTriviality),
        (Case::RightRight, TheoremId::RightRightTriviality),
    ] {
        let (side, _) = case.sides().unwrap();
        let (mut trivial, mut nontrivial) = (0, 0);
        for r_s in shelf_solutions(2, side) {
            for r_t in shelf_solutions(2, side) {
                for sys in systems(&r_s, &r_t) {
                    if !check_simplified(&sys, case).unwrap().valid {
                        continue;
                    }
                    let shelf_type = build_matched_product(&sys).unwrap().shelf_type().contains(side);
                    let identities = sys.alpha().is_trivial() && sys.beta().is_trivial();
                    ensure(
                        shelf_type == identities,
                        format!("{case}: shelf type {shelf_type}, trivial {identities}"),
                    )?;
                    if identities {
                        trivial += 1;
                    } else {
                        nontrivial += 1;
                    }
                }
            }
        }
        ensure(
            trivial == 81 && nontrivial > 0,
            format!("{case}: {trivial} trivial, {nontrivial} other"),
        )?;
        clean(&verify_theorem_at(id, (2, 2), SearchMode::Exhaustive).unwrap())?;
        parts.push(format!("{case} {trivial} trivial / {nontrivial} non-trivial"));
    }
    Ok(parts.join(", "))
}

fn structure_shelf_componentwise() -> Outcome {
    // factor inventory: every shelf solution on 1 or 2 elements plus every
    // left non-degenerate solution on 2 elements
    let mut factors: Vec<Solution> = Vec::new();
    for n in 1..=2 {
        factors.extend(shelf_solutions(n, ShelfSide::Left));
        factors.extend(shelf_solutions(n, ShelfSide::Right));
    }
    factors.extend(enumerate_solutions(2, SearchMode::Exhaustive).unwrap());
    factors.retain(Solution::is_left_nondegenerate);
    factors.sort();
    factors.dedup();

    let mut checked = 0;
    for r_s in &factors {
        for r_t in &factors {
            let expected = direct_product_shelf(
                &r_s.structure_shelf().unwrap(),
                &r_t.structure_shelf().unwrap(),
                Case::General,
            )
            .unwrap();
            let expected_bytes = serde_json::to_vec(&expected).unwrap();
            let spec = SearchSpec::exhaustive((r_s.size(), r_t.size()), Case::General);
            for sys in search_systems(r_s, r_t, &spec).unwrap() {
                let shelf = build_matched_product(&sys).unwrap().structure_shelf().unwrap();
                ensure(
                    serde_json::to_vec(&shelf).unwrap() == expected_bytes,
                    "structure shelf differs from the componentwise table",
                )?;
                checked += 1;
            }
        }
    }
    for id in [
        TheoremId::StructureShelfIndependence,
        TheoremId::LeftLeftStructureShelf,
        TheoremId::RightRightStructureShelf,
        TheoremId::LeftRightStructureShelf,
    ] {
        clean(&verify_theorem(id, (2, 2), SearchMode::Exhaustive).unwrap())?;
    }
    Ok(format!("{} factors, {checked} valid systems", factors.len()))
}

fn constant_action_example() -> Outcome {
    let proj = OperationTable::new(vec![vec![0, 0], vec![1, 1]]).unwrap();
    let r = from_shelf(&proj, ShelfSide::Left).unwrap();
    ensure(
        r == Solution::new(vec![vec![0, 1], vec![0, 1]], vec![vec![0, 0], vec![1, 1]]).unwrap(),
        "r(a,b) = (b,b)",
    )?;
    let theta = Permutation::new(vec![1, 0]).unwrap();
    let eta = Permutation::identity(2);
    let sys = MatchedProductSystem::new(
        r.clone(),
        r,
        ActionFamily::constant(2, theta.clone()).unwrap(),
        ActionFamily::constant(2, eta.clone()).unwrap(),
    )
    .unwrap();
    ensure(check_system_general(&sys).valid, "system invalid")?;
    let product = build_matched_product(&sys).unwrap();
    let enc = sys.encoding();
    for (x, y) in pairs_on(4) {
        let (b, v) = enc.decode(y);
        let expected = (enc.encode(theta.apply(b), eta.apply(v)), enc.encode(b, v));
        ensure(product.apply(x, y) == expected, format!("entry ({x}, {y})"))?;
    }
    Ok("16 entries match".into())
}

fn derived_solution_product() -> Outcome {
    let factors: Vec<Solution> = enumerate_solutions(2, SearchMode::Exhaustive)
        .unwrap()
        .into_iter()
        .filter(Solution::is_left_nondegenerate)
        .collect();
    let mut checked = 0;
    for r_s in &factors {
        for r_t in &factors {
            let expected = direct_product_solution(&r_s.derived_solution().unwrap(), &r_t.derived_solution().unwrap());
            for sys in systems(r_s, r_t) {
                if !check_system_general(&sys).valid {
                    continue;
                }
                let derived = build_matched_product(&sys).unwrap().derived_solution().unwrap();
                ensure(derived == expected, "derived solution is not componentwise")?;
                checked += 1;
            }
        }
    }
    ensure(checked > 0, "no valid systems")?;
    Ok(format!("{} factors, {checked} valid systems", factors.len()))
}

fn regression_constants() -> Outcome {
    let oracle_shelves: Vec<Vec<usize>> = common::all_grids(2)
        .into_iter()
        .filter(|t| common::left_sd(2, t))
        .collect();
    let oracle_racks = oracle_shelves.iter().filter(|t| common::rows_onto(2, t)).count();
    let oracle_solutions = common::solution_count(2);
    ensure(
        (oracle_shelves.len(), oracle_racks, oracle_solutions) == (LEFT_SHELVES_ON_2, LEFT_RACKS_ON_2, SOLUTIONS_ON_2),
        format!(
            "oracle gives {} / {oracle_racks} / {oracle_solutions}",
            oracle_shelves.len()
        ),
    )?;
    let shelves = enumerate_shelves(2, ShelfSide::Left).unwrap();
    let racks = enumerate_racks(2, ShelfSide::Left).unwrap();
    let solutions = enumerate_solutions(2, SearchMode::Exhaustive).unwrap();
    ensure(
        shelves.len() == LEFT_SHELVES_ON_2,
        format!("{} left shelves", shelves.len()),
    )?;
    ensure(racks.len() == LEFT_RACKS_ON_2, format!("{} left racks", racks.len()))?;
    ensure(
        solutions.len() == SOLUTIONS_ON_2,
        format!("{} solutions", solutions.len()),
    )?;
    let cells: Vec<Vec<usize>> = shelves.iter().map(|t| t.cells().to_vec()).collect();
    ensure(cells == oracle_shelves, "shelf list differs from the oracle")?;
    Ok(format!(
        "{LEFT_SHELVES_ON_2} shelves, {LEFT_RACKS_ON_2} racks, {SOLUTIONS_ON_2} solutions"
    ))
}

fn main() -> std::process::ExitCode {
    let criteria: [Criterion; 10] = [
        ("shelf/solution correspondence", shelf_correspondence),
        ("braid check modes agree", mode_agreement),
        ("structure shelf roundtrip", structure_roundtrip),
        ("left-left criteria", left_left_criteria),
        ("right-right and left-right criteria", right_and_mixed_criteria),
        ("trivial actions and shelf type", triviality),
        ("structure shelf is componentwise", structure_shelf_componentwise),
        ("constant action example", constant_action_example),
        ("derived solution of a product", derived_solution_product),
        ("regression constants", regression_constants),
    ];
    let mut results = BTreeMap::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = run();
        match &outcome {
            Ok(detail) => println!("PASS [{:>2}] {name}: {detail}", i + 1),
            Err(why) => println!("FAIL [{:>2}] {name}: {why}", i + 1),
        }
        results.insert(i + 1, outcome.is_ok());
    }
    let failed: Vec<usize> = results.iter().filter(|(_, ok)| !**ok).map(|(i, _)| *i).collect();
    println!(
        "acceptance: {} of {} criteria passed",
        results.len() - failed.len(),
        results.len()
    );
    if failed.is_empty() {
        std::process::ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        std::process::ExitCode::FAILURE
    }
}
