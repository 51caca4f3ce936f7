//! Matched product systems `(r_S, r_T, α, β)` and the matched product
//! solution on `S × T`.
//!
//! Pairs `(a, u) ∈ S × T` are encoded as the single index `a·|T| + u`
//! (see [`PairEncoding`]). Permutation composition is functional:
//! `α_u α_v` applies `α_v` first.
//!
//! Besides the general conditions (s1)–(s6), three shelf cases have shorter
//! criteria, selected by [`Case`]:
//!
//! | case | `r_S` from     | `r_T` from     |
//! |------|----------------|----------------|
//! | `ll` | left shelf     | left shelf     |
//! | `rr` | right shelf    | right shelf    |
//! | `lr` | left shelf     | right shelf    |

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{check_sizes, homomorphism_violation, OperationTable, Permutation, ShelfSide};
use crate::error::{Error, Result};
use crate::solution::Solution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairEncoding {
    pub t_size: usize,
}

impl PairEncoding {
    #[inline]
    pub fn encode(&self, a: usize, u: usize) -> usize {
        a * self.t_size + u
    }

    #[inline]
    pub fn decode(&self, index: usize) -> (usize, usize) {
        (index / self.t_size, index % self.t_size)
    }
}

/// A map from a `domain_size`-element set into `Sym(codomain)`, with the
/// inverse of every value precomputed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct ActionFamily {
    codomain_size: usize,
    perms: Vec<Permutation>,
    inverses: Vec<Permutation>,
}

impl ActionFamily {
    pub fn new(codomain_size: usize, perms: Vec<Permutation>) -> Result<Self> {
        if perms.is_empty() || codomain_size == 0 {
            return Err(Error::EmptyCarrier);
        }
        for p in &perms {
            check_sizes(codomain_size, p.size())?;
        }
        let inverses = perms.iter().map(Permutation::inverse).collect();
        Ok(ActionFamily {
            codomain_size,
            perms,
            inverses,
        })
    }

    pub fn from_images(images: Vec<Vec<usize>>) -> Result<Self> {
        let codomain = images.first().map_or(0, Vec::len);
        let perms = images.into_iter().map(Permutation::new).collect::<Result<Vec<_>>>()?;
        Self::new(codomain, perms)
    }

    pub fn identity(domain_size: usize, codomain_size: usize) -> Result<Self> {
        Self::constant(domain_size, Permutation::identity(codomain_size))
    }

    pub fn constant(domain_size: usize, value: Permutation) -> Result<Self> {
        Self::new(value.size(), vec![value; domain_size])
    }

    pub fn domain_size(&self) -> usize {
        self.perms.len()
    }

    pub fn codomain_size(&self) -> usize {
        self.codomain_size
    }

    pub fn get(&self, i: usize) -> &Permutation {
        &self.perms[i]
    }

    pub fn inverse(&self, i: usize) -> &Permutation {
        &self.inverses[i]
    }

    pub fn perms(&self) -> &[Permutation] {
        &self.perms
    }

    pub fn is_trivial(&self) -> bool {
        self.perms.iter().all(Permutation::is_identity)
    }

    /// Concatenated image sequences, the lexicographic search key.
    pub fn key(&self) -> Vec<usize> {
        self.perms.iter().flat_map(|p| p.images().iter().copied()).collect()
    }

    #[inline]
    fn fwd(&self, i: usize, x: usize) -> usize {
        self.perms[i].apply(x)
    }

    #[inline]
    fn inv(&self, i: usize, x: usize) -> usize {
        self.inverses[i].apply(x)
    }
}

impl TryFrom<Vec<Vec<usize>>> for ActionFamily {
    type Error = Error;

    fn try_from(images: Vec<Vec<usize>>) -> Result<Self> {
        Self::from_images(images)
    }
}

impl From<ActionFamily> for Vec<Vec<usize>> {
    fn from(family: ActionFamily) -> Self {
        family.perms.iter().map(|p| p.images().to_vec()).collect()
    }
}

/// `α: T → Sym(S)` and `β: S → Sym(T)` together with the two factor solutions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SystemFile", into = "SystemFile")]
pub struct MatchedProductSystem {
    r_s: Solution,
    r_t: Solution,
    alpha: ActionFamily,
    beta: ActionFamily,
}

#[derive(Serialize, Deserialize)]
struct SystemFile {
    r_s: Solution,
    r_t: Solution,
    alpha: ActionFamily,
    beta: ActionFamily,
}

impl TryFrom<SystemFile> for MatchedProductSystem {
    type Error = Error;

    fn try_from(f: SystemFile) -> Result<Self> {
        MatchedProductSystem::new(f.r_s, f.r_t, f.alpha, f.beta)
    }
}

impl From<MatchedProductSystem> for SystemFile {
    fn from(s: MatchedProductSystem) -> Self {
        SystemFile {
            r_s: s.r_s,
            r_t: s.r_t,
            alpha: s.alpha,
            beta: s.beta,
        }
    }
}

impl MatchedProductSystem {
    /// Checks only that the sizes fit together; (s1)–(s6) are not evaluated.
    pub fn new(r_s: Solution, r_t: Solution, alpha: ActionFamily, beta: ActionFamily) -> Result<Self> {
        let (s, t) = (r_s.size(), r_t.size());
        check_sizes(t, alpha.domain_size())?;
        check_sizes(s, alpha.codomain_size())?;
        check_sizes(s, beta.domain_size())?;
        check_sizes(t, beta.codomain_size())?;
        Ok(MatchedProductSystem { r_s, r_t, alpha, beta })
    }

    /// Like [`new`](Self::new), and additionally requires (s1)–(s6).
    pub fn new_checked(r_s: Solution, r_t: Solution, alpha: ActionFamily, beta: ActionFamily) -> Result<Self> {
        let sys = Self::new(r_s, r_t, alpha, beta)?;
        let report = check_system_general(&sys);
        if report.valid {
            Ok(sys)
        } else {
            Err(Error::InvalidSystem(Box::new(report)))
        }
    }

    pub fn r_s(&self) -> &Solution {
        &self.r_s
    }

    pub fn r_t(&self) -> &Solution {
        &self.r_t
    }

    pub fn alpha(&self) -> &ActionFamily {
        &self.alpha
    }

    pub fn beta(&self) -> &ActionFamily {
        &self.beta
    }

    pub fn s_size(&self) -> usize {
        self.r_s.size()
    }

    pub fn t_size(&self) -> usize {
        self.r_t.size()
    }

    pub fn encoding(&self) -> PairEncoding {
        PairEncoding { t_size: self.t_size() }
    }

    pub fn has_trivial_actions(&self) -> bool {
        self.alpha.is_trivial() && self.beta.is_trivial()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    S1,
    S2,
    S3,
    S4,
    S5,
    S6,
    L1,
    L2,
    L3,
    L4,
    R1,
    R2,
    R3,
    R4,
    Lr1,
    Lr2,
    Lr3,
    Lr4,
    #[serde(rename = "hom-alpha")]
    HomAlpha,
    #[serde(rename = "hom-beta")]
    HomBeta,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = serde_json::to_value(self).expect("unit variant");
        f.write_str(text.as_str().expect("string label"))
    }
}

/// One failed condition and the index tuple at which it fails.
///
/// Witness layout per condition: s1 `(u, v)`, s2 `(a, b)`, s3 and s5
/// `(a, b, u)`, s4 and s6 `(a, u, v)`; the first simplified condition
/// `(u, v)`, the second `(a, b)`, the third and fourth `(a, u)`; hom-alpha
/// `(u, x, y)`, hom-beta `(a, x, y)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: Condition,
    pub witness: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

impl CheckReport {
    pub fn first(&self, condition: Condition) -> Option<&[usize]> {
        self.violations
            .iter()
            .find(|v| v.condition == condition)
            .map(|v| v.witness.as_slice())
    }

    pub fn failed_conditions(&self) -> Vec<Condition> {
        let mut out: Vec<Condition> = self.violations.iter().map(|v| v.condition).collect();
        out.dedup();
        out
    }

    pub fn summary(&self) -> String {
        if self.valid {
            return "valid".into();
        }
        self.violations
            .iter()
            .map(|v| format!("{} at {:?}", v.condition, v.witness))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// Whether a report keeps only the lexicographically first witness of each
/// failed condition or all of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WitnessMode {
    #[default]
    First,
    All,
}

struct Collector {
    mode: WitnessMode,
    violations: Vec<Violation>,
}

impl Collector {
    fn new(mode: WitnessMode) -> Self {
        Collector {
            mode,
            violations: Vec::new(),
        }
    }

    /// Evaluates `holds` on each tuple in order and records failures.
    fn run<const K: usize>(
        &mut self,
        condition: Condition,
        tuples: impl Iterator<Item = [usize; K]>,
        mut holds: impl FnMut([usize; K]) -> bool,
    ) {
        for w in tuples {
            if !holds(w) {
                self.record(condition, w.to_vec());
                if self.mode == WitnessMode::First {
                    return;
                }
            }
        }
    }

    fn record(&mut self, condition: Condition, witness: Vec<usize>) {
        self.violations.push(Violation { condition, witness });
    }

    fn finish(self) -> CheckReport {
        CheckReport {
            valid: self.violations.is_empty(),
            violations: self.violations,
        }
    }
}

fn pairs(n: usize, m: usize) -> impl Iterator<Item = [usize; 2]> {
    (0..n * m).map(move |i| [i / m, i % m])
}

fn triples(n: usize, m: usize, k: usize) -> impl Iterator<Item = [usize; 3]> {
    (0..n * m * k).map(move |i| [i / (m * k), (i / k) % m, i % k])
}

pub fn check_system_general(sys: &MatchedProductSystem) -> CheckReport {
    check_system_general_with(sys, WitnessMode::First)
}

/// Evaluates (s1)–(s6) over every index tuple they quantify over.
pub fn check_system_general_with(sys: &MatchedProductSystem, mode: WitnessMode) -> CheckReport {
    let (ns, nt) = (sys.s_size(), sys.t_size());
    let (rs, rt) = (&sys.r_s, &sys.r_t);
    let (al, be) = (&sys.alpha, &sys.beta);
    let mut c = Collector::new(mode);

    // α_u α_v = α_{λ_u(v)} α_{ρ_v(u)}
    c.run(Condition::S1, pairs(nt, nt), |[u, v]| {
        let (l, r) = rt.apply(u, v);
        (0..ns).all(|x| al.fwd(u, al.fwd(v, x)) == al.fwd(l, al.fwd(r, x)))
    });
    // β_a β_b = β_{λ_a(b)} β_{ρ_b(a)}
    c.run(Condition::S2, pairs(ns, ns), |[a, b]| {
        let (l, r) = rs.apply(a, b);
        (0..nt).all(|x| be.fwd(a, be.fwd(b, x)) == be.fwd(l, be.fwd(r, x)))
    });
    // ρ_{α_u⁻¹(b)} α⁻¹_{β_a(u)}(a) = α⁻¹_{β_{ρ_b(a)} β_b⁻¹(u)} ρ_b(a)
    c.run(Condition::S3, triples(ns, ns, nt), |[a, b, u]| {
        let lhs = rs.rho(al.inv(u, b), al.inv(be.fwd(a, u), a));
        let rb_a = rs.rho(b, a);
        lhs == al.inv(be.fwd(rb_a, be.inv(b, u)), rb_a)
    });
    // ρ_{β_a⁻¹(v)} β⁻¹_{α_u(a)}(u) = β⁻¹_{α_{ρ_v(u)} α_v⁻¹(a)} ρ_v(u)
    c.run(Condition::S4, triples(ns, nt, nt), |[a, u, v]| {
        let lhs = rt.rho(be.inv(a, v), be.inv(al.fwd(u, a), u));
        let rv_u = rt.rho(v, u);
        lhs == be.inv(al.fwd(rv_u, al.inv(v, a)), rv_u)
    });
    // λ_a α_{β_a⁻¹(u)} = α_u λ_{α_u⁻¹(a)}, evaluated at b
    c.run(Condition::S5, triples(ns, ns, nt), |[a, b, u]| {
        rs.lambda(a, al.fwd(be.inv(a, u), b)) == al.fwd(u, rs.lambda(al.inv(u, a), b))
    });
    // λ_u β_{α_u⁻¹(a)} = β_a λ_{β_a⁻¹(u)}, evaluated at v
    c.run(Condition::S6, triples(ns, nt, nt), |[a, u, v]| {
        rt.lambda(u, be.fwd(al.inv(u, a), v)) == be.fwd(a, rt.lambda(be.inv(a, u), v))
    });
    c.finish()
}

/// The matched product `r_S ⋈ r_T`; fails with the report when (s1)–(s6) do
/// not all hold.
pub fn build_matched_product(sys: &MatchedProductSystem) -> Result<Solution> {
    let report = check_system_general(sys);
    if !report.valid {
        return Err(Error::InvalidSystem(Box::new(report)));
    }
    Ok(build_matched_product_unchecked(sys))
}

/// The matched product formula evaluated without checking the system.
pub fn build_matched_product_unchecked(sys: &MatchedProductSystem) -> Solution {
    let (rs, rt) = (&sys.r_s, &sys.r_t);
    let (al, be) = (&sys.alpha, &sys.beta);
    let enc = sys.encoding();
    let n = sys.s_size() * sys.t_size();
    Solution::from_map_unchecked(n, |x, y| {
        let (a, u) = enc.decode(x);
        let (b, v) = enc.decode(y);
        let a_bar = al.inv(u, a);
        let u_bar = be.inv(a, u);
        let big_a = al.fwd(u, rs.lambda(a_bar, b));
        let big_u = be.fwd(a, rt.lambda(u_bar, v));
        let big_a_bar = al.inv(big_u, big_a);
        let big_u_bar = be.inv(big_a, big_u);
        let second_s = al.inv(big_u_bar, rs.rho(al.fwd(u_bar, b), a));
        let second_t = be.inv(big_a_bar, rt.rho(be.fwd(a_bar, v), u));
        (enc.encode(big_a, big_u), enc.encode(second_s, second_t))
    })
    .expect("product entries lie in S × T")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    General,
    #[serde(rename = "ll")]
    LeftLeft,
    #[serde(rename = "rr")]
    RightRight,
    #[serde(rename = "lr")]
    LeftRight,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::General => "general",
            Case::LeftLeft => "ll",
            Case::RightRight => "rr",
            Case::LeftRight => "lr",
        })
    }
}

impl Case {
    /// Shelf sides of the `S` and `T` factors, or `None` for the general case.
    pub fn sides(self) -> Option<(ShelfSide, ShelfSide)> {
        match self {
            Case::General => None,
            Case::LeftLeft => Some((ShelfSide::Left, ShelfSide::Left)),
            Case::RightRight => Some((ShelfSide::Right, ShelfSide::Right)),
            Case::LeftRight => Some((ShelfSide::Left, ShelfSide::Right)),
        }
    }

    fn labels(self) -> [Condition; 4] {
        match self {
            Case::LeftLeft => [Condition::L1, Condition::L2, Condition::L3, Condition::L4],
            Case::RightRight => [Condition::R1, Condition::R2, Condition::R3, Condition::R4],
            _ => [Condition::Lr1, Condition::Lr2, Condition::Lr3, Condition::Lr4],
        }
    }
}

/// The shelves behind both factors, as required by `case`.
pub fn factor_shelves(sys: &MatchedProductSystem, case: Case) -> Result<(OperationTable, OperationTable)> {
    let (side_s, side_t) = case.sides().ok_or_else(|| Error::CaseMismatch {
        case,
        reason: "the general case has no shelf criteria".into(),
    })?;
    let recover = |sol: &Solution, side: ShelfSide, name: &str| {
        sol.shelf_type()
            .table(side)
            .cloned()
            .ok_or_else(|| Error::CaseMismatch {
                case,
                reason: format!("{name} is not the solution of a {side} shelf"),
            })
    };
    Ok((recover(&sys.r_s, side_s, "r_s")?, recover(&sys.r_t, side_t, "r_t")?))
}

pub fn check_simplified(sys: &MatchedProductSystem, case: Case) -> Result<CheckReport> {
    check_simplified_with(sys, case, WitnessMode::First)
}

/// Shelf-case criteria: homomorphism conditions on every `α_u`, `β_a` plus
/// four conditions on the families.
///
/// | case | first (all `u, v`)             | second (all `a, b`)             |
/// |------|--------------------------------|---------------------------------|
/// | ll   | `α_{v▷u} = α_v⁻¹ α_u α_v`      | `β_{b▷a} = β_b⁻¹ β_a β_b`       |
/// | rr   | `α_{v◁u} = α_u α_v α_u⁻¹`      | `β_{b◁a} = β_a β_b β_a⁻¹`       |
/// | lr   | `α_{v◁u} = α_u α_v α_u⁻¹`      | `β_{b▷a} = β_b⁻¹ β_a β_b`       |
///
/// In every case the third and fourth are `α_u = α_{β_a⁻¹(u)}` and
/// `β_a = β_{α_u⁻¹(a)}`.
pub fn check_simplified_with(sys: &MatchedProductSystem, case: Case, mode: WitnessMode) -> Result<CheckReport> {
    let (ts, tt) = factor_shelves(sys, case)?;
    let (ns, nt) = (sys.s_size(), sys.t_size());
    let (al, be) = (&sys.alpha, &sys.beta);
    let [first, second, third, fourth] = case.labels();
    let mut c = Collector::new(mode);

    for (condition, family, table) in [(Condition::HomAlpha, al, &ts), (Condition::HomBeta, be, &tt)] {
        for i in 0..family.domain_size() {
            if let Some([x, y]) = homomorphism_violation(family.get(i), table, table) {
                c.record(condition, vec![i, x, y]);
                if mode == WitnessMode::First {
                    break;
                }
            }
        }
    }

    let s_left = case != Case::RightRight;
    let t_left = case == Case::LeftLeft;
    c.run(first, pairs(nt, nt), |[u, v]| {
        let w = tt.get(v, u);
        if t_left {
            // α_w = α_v⁻¹ α_u α_v
            (0..ns).all(|x| al.fwd(w, x) == al.inv(v, al.fwd(u, al.fwd(v, x))))
        } else {
            // α_w = α_u α_v α_u⁻¹
            (0..ns).all(|x| al.fwd(w, x) == al.fwd(u, al.fwd(v, al.inv(u, x))))
        }
    });
    c.run(second, pairs(ns, ns), |[a, b]| {
        let w = ts.get(b, a);
        if s_left {
            (0..nt).all(|x| be.fwd(w, x) == be.inv(b, be.fwd(a, be.fwd(b, x))))
        } else {
            (0..nt).all(|x| be.fwd(w, x) == be.fwd(a, be.fwd(b, be.inv(a, x))))
        }
    });
    c.run(third, pairs(ns, nt), |[a, u]| al.get(u) == al.get(be.inv(a, u)));
    c.run(fourth, pairs(ns, nt), |[a, u]| be.get(a) == be.get(al.inv(u, a)));
    Ok(c.finish())
}

/// The matched product in the simplified shape available for each shelf case.
pub fn closed_form(sys: &MatchedProductSystem, case: Case) -> Result<Solution> {
    let report = check_simplified(sys, case)?;
    if !report.valid {
        return Err(Error::InvalidSystem(Box::new(report)));
    }
    let (ts, tt) = factor_shelves(sys, case)?;
    let (al, be) = (&sys.alpha, &sys.beta);
    let enc = sys.encoding();
    let n = sys.s_size() * sys.t_size();
    let sol = Solution::from_map_unchecked(n, |x, y| {
        let (a, u) = enc.decode(x);
        let (b, v) = enc.decode(y);
        let (first, second) = match case {
            Case::LeftLeft => (
                (al.fwd(u, b), be.fwd(a, v)),
                (al.inv(v, ts.get(al.fwd(u, b), a)), be.inv(b, tt.get(be.fwd(a, v), u))),
            ),
            Case::RightRight => (
                (ts.get(al.fwd(u, b), a), tt.get(be.fwd(a, v), u)),
                (al.inv(tt.get(v, u), a), be.inv(ts.get(b, a), u)),
            ),
            Case::LeftRight => (
                (al.fwd(u, b), tt.get(be.fwd(a, v), u)),
                (al.inv(tt.get(v, u), ts.get(al.fwd(u, b), a)), be.inv(b, u)),
            ),
            Case::General => unreachable!("rejected by factor_shelves"),
        };
        (enc.encode(first.0, first.1), enc.encode(second.0, second.1))
    })?;
    Ok(sol)
}

/// Whether every `α_u` and `β_a` is the identity, for a valid `ll` or `rr`
/// system. Exactly then the product is again the solution of a shelf on the
/// same side.
pub fn triviality_check(sys: &MatchedProductSystem, case: Case) -> Result<bool> {
    if !matches!(case, Case::LeftLeft | Case::RightRight) {
        return Err(Error::Unsupported(format!("triviality check for case {case}")));
    }
    let report = check_simplified(sys, case)?;
    if !report.valid {
        return Err(Error::InvalidSystem(Box::new(report)));
    }
    Ok(sys.has_trivial_actions())
}

/// Componentwise shelf on `S × T`: `ll` and `general` give `(a ▷ b, u ▷ v)`,
/// `rr` gives `(b ◁ a, v ◁ u)` and `lr` gives `(a ▷ b, v ◁ u)`.
pub fn direct_product_shelf(op_s: &OperationTable, op_t: &OperationTable, case: Case) -> Result<OperationTable> {
    let (ns, nt) = (op_s.size(), op_t.size());
    let n = ns
        .checked_mul(nt)
        .filter(|n| n.checked_mul(*n).is_some())
        .ok_or_else(|| Error::Unsupported(format!("product of sizes {ns} and {nt} overflows")))?;
    let enc = PairEncoding { t_size: nt };
    OperationTable::from_fn(n, |x, y| {
        let (a, u) = enc.decode(x);
        let (b, v) = enc.decode(y);
        match case {
            Case::General | Case::LeftLeft => enc.encode(op_s.get(a, b), op_t.get(u, v)),
            Case::RightRight => enc.encode(op_s.get(b, a), op_t.get(v, u)),
            Case::LeftRight => enc.encode(op_s.get(a, b), op_t.get(v, u)),
        }
    })
}

/// Direct product `((λ_a(b), λ_u(v)), (ρ_b(a), ρ_v(u)))` of two solutions
/// under the pair encoding.
pub fn direct_product_solution(r_s: &Solution, r_t: &Solution) -> Solution {
    let enc = PairEncoding { t_size: r_t.size() };
    Solution::from_map_unchecked(r_s.size() * r_t.size(), |x, y| {
        let (a, u) = enc.decode(x);
        let (b, v) = enc.decode(y);
        (
            enc.encode(r_s.lambda(a, b), r_t.lambda(u, v)),
            enc.encode(r_s.rho(b, a), r_t.rho(v, u)),
        )
    })
    .expect("entries lie in S × T")
}
