//! Membership tests for the multi-cell CTIN and TIN regimes, and the
//! strength-exponent inequalities the cycle-bound converse relies on.

use std::fmt;

use thiserror::Error;

use crate::cycles::{Cycle, CycleError};
use crate::network::CellNetwork;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegimeError {
    #[error("network is not canonical: direct strengths must be nondecreasing in rank")]
    NotCanonical,
    #[error(transparent)]
    Cycle(#[from] CycleError),
    #[error("expected {expected} ranks for the cycle, got {got}")]
    RankCount { expected: usize, got: usize },
    #[error("rank {rank} out of range for cell {cell} with {users} users")]
    RankOutOfRange {
        cell: usize,
        rank: usize,
        users: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Condition {
    /// Intra-cell CTIN condition on a rank pair.
    CtinIntra,
    /// Cross-cell CTIN condition on the weakest user of cell `i`.
    CtinCross,
    /// Intra-cell TIN condition (a disjunction of two inequalities).
    TinIntra,
    /// Cross-cell TIN condition.
    TinCross,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::CtinIntra => "CTIN-intra",
            Condition::CtinCross => "CTIN-cross",
            Condition::TinIntra => "TIN-intra",
            Condition::TinCross => "TIN-cross",
        })
    }
}

/// Cell and rank indices instantiating a condition. Intra conditions set
/// `rank_i` and `rank_i_prime`; cross conditions set `k` and `rank_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Witness {
    pub i: usize,
    pub j: usize,
    pub k: Option<usize>,
    pub rank_i: Option<usize>,
    pub rank_i_prime: Option<usize>,
    pub rank_k: Option<usize>,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "i={}, j={}", self.i, self.j)?;
        if let Some(k) = self.k {
            write!(f, ", k={k}")?;
        }
        if let Some(l) = self.rank_i {
            write!(f, ", l_i={l}")?;
        }
        if let Some(l) = self.rank_i_prime {
            write!(f, ", l_i'={l}")?;
        }
        if let Some(l) = self.rank_k {
            write!(f, ", l_k={l}")?;
        }
        Ok(())
    }
}

/// A failed condition `lhs >= rhs`. For the disjunctive TIN-intra
/// condition, `alternative` holds the second failed disjunct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub condition: Condition,
    pub witness: Witness,
    pub lhs: Rational,
    pub rhs: Rational,
    pub alternative: Option<(Rational, Rational)>,
}

impl Violation {
    /// Recomputes the condition from `net` and reports whether it fails.
    pub fn still_fails(&self, net: &CellNetwork) -> bool {
        let w = &self.witness;
        let a = |cell, rank, from| net.strength(cell, rank, from);
        match self.condition {
            Condition::CtinIntra => {
                let (l, lp) = (w.rank_i.unwrap(), w.rank_i_prime.unwrap());
                let (lhs, rhs) = ctin_intra(net, w.i, w.j, l, lp);
                lhs == self.lhs && rhs == self.rhs && lhs < rhs
            }
            Condition::CtinCross => {
                let (k, lk) = (w.k.unwrap(), w.rank_k.unwrap());
                let (lhs, rhs) = ctin_cross(net, w.i, w.j, k, lk);
                lhs == self.lhs && rhs == self.rhs && lhs < rhs
            }
            Condition::TinIntra => {
                let (l, lp) = (w.rank_i.unwrap(), w.rank_i_prime.unwrap());
                let lhs = a(w.i, l, w.i);
                let first = a(w.i, l, w.j) + a(w.i, lp, w.i);
                let second = a(w.i, l, w.j) + a(w.i, l, w.j) + a(w.i, lp, w.i) - a(w.i, lp, w.j);
                lhs < first && lhs < second
            }
            Condition::TinCross => {
                let (k, lk) = (w.k.unwrap(), w.rank_k.unwrap());
                let lhs = a(w.i, 1, w.i);
                let rhs = a(w.i, 1, w.j) + a(k, lk, w.i);
                lhs < rhs
            }
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({}): {} < {}", self.condition, self.witness, self.lhs, self.rhs)?;
        if let Some((l, r)) = self.alternative {
            write!(f, " and {l} < {r}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegimeReport {
    pub regime_holds: bool,
    pub violations: Vec<Violation>,
}

impl RegimeReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        RegimeReport {
            regime_holds: violations.is_empty(),
            violations,
        }
    }
}

fn ensure_canonical(net: &CellNetwork) -> Result<(), RegimeError> {
    if net.is_canonical() {
        Ok(())
    } else {
        Err(RegimeError::NotCanonical)
    }
}

// α_ii^[l] >= α_ij^[l] + α_ii^[l'] - α_ij^[l']
fn ctin_intra(net: &CellNetwork, i: usize, j: usize, l: usize, lp: usize) -> (Rational, Rational) {
    let a = |rank, from| net.strength(i, rank, from);
    (a(l, i), a(l, j) + a(lp, i) - a(lp, j))
}

// α_ii^[1] >= α_ij^[1] + α_ki^[l_k] - α_kj^[l_k] 1(k != j)
fn ctin_cross(net: &CellNetwork, i: usize, j: usize, k: usize, lk: usize) -> (Rational, Rational) {
    let mut rhs = net.strength(i, 1, j) + net.strength(k, lk, i);
    if k != j {
        rhs -= net.strength(k, lk, j);
    }
    (net.strength(i, 1, i), rhs)
}

fn intra_tuples(net: &CellNetwork) -> impl Iterator<Item = (usize, usize, usize, usize)> + '_ {
    let cells = net.cell_count();
    (1..=cells).flat_map(move |i| {
        (1..=cells).filter(move |&j| j != i).flat_map(move |j| {
            (2..=net.users_in(i)).flat_map(move |l| (1..l).map(move |lp| (i, j, l, lp)))
        })
    })
}

// i ∉ {j, k}; j = k is allowed
fn cross_tuples(net: &CellNetwork) -> impl Iterator<Item = (usize, usize, usize, usize)> + '_ {
    let cells = net.cell_count();
    (1..=cells).flat_map(move |i| {
        (1..=cells).filter(move |&j| j != i).flat_map(move |j| {
            (1..=cells)
                .filter(move |&k| k != i)
                .flat_map(move |k| (1..=net.users_in(k)).map(move |lk| (i, j, k, lk)))
        })
    })
}

fn intra_witness(i: usize, j: usize, l: usize, lp: usize) -> Witness {
    Witness {
        i,
        j,
        k: None,
        rank_i: Some(l),
        rank_i_prime: Some(lp),
        rank_k: None,
    }
}

fn cross_witness(i: usize, j: usize, k: usize, lk: usize) -> Witness {
    Witness {
        i,
        j,
        k: Some(k),
        rank_i: None,
        rank_i_prime: None,
        rank_k: Some(lk),
    }
}

/// Evaluates every instance of the CTIN conditions and lists all failures.
pub fn is_ctin(net: &CellNetwork) -> Result<RegimeReport, RegimeError> {
    ensure_canonical(net)?;
    let mut violations = Vec::new();
    for (i, j, l, lp) in intra_tuples(net) {
        let (lhs, rhs) = ctin_intra(net, i, j, l, lp);
        if lhs < rhs {
            violations.push(Violation {
                condition: Condition::CtinIntra,
                witness: intra_witness(i, j, l, lp),
                lhs,
                rhs,
                alternative: None,
            });
        }
    }
    for (i, j, k, lk) in cross_tuples(net) {
        let (lhs, rhs) = ctin_cross(net, i, j, k, lk);
        if lhs < rhs {
            violations.push(Violation {
                condition: Condition::CtinCross,
                witness: cross_witness(i, j, k, lk),
                lhs,
                rhs,
                alternative: None,
            });
        }
    }
    Ok(RegimeReport::from_violations(violations))
}

/// Evaluates every instance of the TIN conditions and lists all failures.
pub fn is_tin(net: &CellNetwork) -> Result<RegimeReport, RegimeError> {
    ensure_canonical(net)?;
    let a = |cell, rank, from| net.strength(cell, rank, from);
    let mut violations = Vec::new();
    for (i, j, l, lp) in intra_tuples(net) {
        let lhs = a(i, l, i);
        let first = a(i, l, j) + a(i, lp, i);
        let second = a(i, l, j) + a(i, l, j) + a(i, lp, i) - a(i, lp, j);
        if lhs < first && lhs < second {
            violations.push(Violation {
                condition: Condition::TinIntra,
                witness: intra_witness(i, j, l, lp),
                lhs,
                rhs: first,
                alternative: Some((lhs, second)),
            });
        }
    }
    for (i, j, k, lk) in cross_tuples(net) {
        let lhs = a(i, 1, i);
        let rhs = a(i, 1, j) + a(k, lk, i);
        if lhs < rhs {
            violations.push(Violation {
                condition: Condition::TinCross,
                witness: cross_witness(i, j, k, lk),
                lhs,
                rhs,
                alternative: None,
            });
        }
    }
    Ok(RegimeReport::from_violations(violations))
}

/// Which link of the converse chain an inequality serves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConverseStep {
    /// Downlink single-cell telescoping: direct increments dominate.
    IbcDirectOrder,
    IbcIncrement,
    /// Downlink cross-cell bound, `j ≠ m+1` case.
    IbcCrossDifference,
    /// Downlink cross-cell bound on the interference from `σ(m+1)`.
    IbcCrossLevel,
    /// Uplink: strongest participating user's net level dominates the weakest.
    ImacRankMonotone,
    /// Uplink: in-cell users below the participating rank.
    ImacInCell,
    /// Uplink: users of cells other than `σ(m-1)` and `σ(m)`.
    ImacCrossDifference,
    /// Uplink: interference from the users of `σ(m-1)`.
    ImacPredecessorLevel,
}

impl fmt::Display for ConverseStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConverseStep::IbcDirectOrder => "ibc-direct-order",
            ConverseStep::IbcIncrement => "ibc-increment",
            ConverseStep::IbcCrossDifference => "ibc-cross-difference",
            ConverseStep::IbcCrossLevel => "ibc-cross-level",
            ConverseStep::ImacRankMonotone => "imac-rank-monotone",
            ConverseStep::ImacInCell => "imac-in-cell",
            ConverseStep::ImacCrossDifference => "imac-cross-difference",
            ConverseStep::ImacPredecessorLevel => "imac-predecessor-level",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckedInequality {
    pub step: ConverseStep,
    pub description: String,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl CheckedInequality {
    pub fn passes(&self) -> bool {
        self.lhs >= self.rhs
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConverseReport {
    pub checks: Vec<CheckedInequality>,
    pub all_pass: bool,
}

impl ConverseReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckedInequality> {
        self.checks.iter().filter(|c| !c.passes())
    }
}

/// Instantiates, for one cycle and rank choice, every strength inequality
/// that turns the aligned-images entropy bounds into the cycle bound, for
/// both the downlink and the uplink, and evaluates each one.
pub fn verify_converse_steps(
    net: &CellNetwork,
    cycle: &Cycle,
    ranks: &[usize],
) -> Result<ConverseReport, RegimeError> {
    ensure_canonical(net)?;
    cycle.check_network(net)?;
    let m_len = cycle.len();
    if ranks.len() != m_len {
        return Err(RegimeError::RankCount {
            expected: m_len,
            got: ranks.len(),
        });
    }
    for (pos, &rank) in ranks.iter().enumerate() {
        let cell = cycle.cells()[pos];
        if rank == 0 || rank > net.users_in(cell) {
            return Err(RegimeError::RankOutOfRange {
                cell,
                rank,
                users: net.users_in(cell),
            });
        }
    }

    let a = |cell: usize, rank: usize, from: usize| net.strength(cell, rank, from);
    let sigma = |m: isize| cycle.at(m);
    let rank_at = |m: isize| ranks[((m - 1).rem_euclid(m_len as isize)) as usize];
    let mut checks = Vec::new();
    let mut push = |step, description: String, lhs, rhs| {
        checks.push(CheckedInequality {
            step,
            description,
            lhs,
            rhs,
        })
    };

    // downlink, per participating cell: α_ii^[s] - α_ii^[s-1] >= α_ij^[s] - α_ij^[s-1]
    for m in 1..=m_len as isize {
        let i = sigma(m);
        for s in 2..=rank_at(m) {
            push(
                ConverseStep::IbcDirectOrder,
                format!("a[{i}{i}]^{s} >= a[{i}{i}]^{}", s - 1),
                a(i, s, i),
                a(i, s - 1, i),
            );
            for &j in cycle.cells().iter().filter(|&&j| j != i) {
                push(
                    ConverseStep::IbcIncrement,
                    format!("a[{i}{i}]^{s} - a[{i}{i}]^{p} >= a[{i}{j}]^{s} - a[{i}{j}]^{p}", p = s - 1),
                    a(i, s, i) - a(i, s - 1, i),
                    a(i, s, j) - a(i, s - 1, j),
                );
            }
        }
    }

    // downlink, cross-cell: with i = σ(m), n = σ(m+1), l = l_n
    for m in 1..=m_len as isize {
        let i = sigma(m);
        let n = sigma(m + 1);
        let l = rank_at(m + 1);
        let lhs = a(i, 1, i) - a(n, l, i);
        for jpos in 1..=m_len as isize {
            let j = sigma(jpos);
            if j == n {
                continue;
            }
            push(
                ConverseStep::IbcCrossDifference,
                format!("a[{i}{i}]^1 - a[{n}{i}]^{l} >= a[{i}{j}]^1 - a[{n}{j}]^{l}"),
                lhs,
                a(i, 1, j) - a(n, l, j),
            );
        }
        push(
            ConverseStep::IbcCrossLevel,
            format!("a[{i}{i}]^1 - a[{n}{i}]^{l} >= a[{i}{n}]^1"),
            lhs,
            a(i, 1, n),
        );
    }

    // uplink: with c = σ(m), p = σ(m-1), l = l_c
    for m in 1..=m_len as isize {
        let c = sigma(m);
        let p = sigma(m - 1);
        let l = rank_at(m);
        let top = a(c, l, c) - a(c, l, p);
        push(
            ConverseStep::ImacRankMonotone,
            format!("a[{c}{c}]^{l} - a[{c}{p}]^{l} >= a[{c}{c}]^1 - a[{c}{p}]^1"),
            top,
            a(c, 1, c) - a(c, 1, p),
        );
        for s in 1..=l {
            push(
                ConverseStep::ImacInCell,
                format!("a[{c}{c}]^{l} - a[{c}{p}]^{l} >= a[{c}{c}]^{s} - a[{c}{p}]^{s}"),
                top,
                a(c, s, c) - a(c, s, p),
            );
        }
        let bottom = a(c, 1, c) - a(c, 1, p);
        for jpos in 1..=m_len as isize {
            let j = sigma(jpos);
            if j == p || j == c {
                continue;
            }
            for s in 1..=rank_at(jpos) {
                push(
                    ConverseStep::ImacCrossDifference,
                    format!("a[{c}{c}]^1 - a[{c}{p}]^1 >= a[{j}{c}]^{s} - a[{j}{p}]^{s}"),
                    bottom,
                    a(j, s, c) - a(j, s, p),
                );
            }
        }
        for s in 1..=rank_at(m - 1) {
            push(
                ConverseStep::ImacPredecessorLevel,
                format!("a[{c}{c}]^{l} - a[{c}{p}]^{l} >= a[{p}{c}]^{s}"),
                top,
                a(p, s, c),
            );
        }
    }

    let all_pass = checks.iter().all(CheckedInequality::passes);
    Ok(ConverseReport { checks, all_pass })
}
