//! H-representation of the polyhedral multi-cell TIN region: single-cell
//! prefix bounds plus one cycle bound per (cycle, participating ranks).

use std::fmt;
use std::io;

use thiserror::Error;

use crate::cycles::{enumerate_cycles, rank_tuples, Cycle};
use crate::network::{CellNetwork, UserId};
use crate::point::{GdofPoint, PointError};
use crate::rational::Rational;
use crate::simplex::{self, LpError};

#[derive(Debug, Error)]
pub enum PolytopeError {
    #[error("network is not canonical: direct strengths must be nondecreasing in rank")]
    NotCanonical,
    #[error(transparent)]
    Point(#[from] PointError),
    #[error("expected {expected} weights, got {got}")]
    WeightLength { expected: usize, got: usize },
    #[error("weight {value} for {user} is negative")]
    NegativeWeight { user: UserId, value: Rational },
    #[error("all weights are zero")]
    ZeroWeights,
    #[error("constraint set is empty")]
    EmptyConstraintSet,
    #[error("region is empty: constraint `{0}` has a negative bound")]
    EmptyRegion(Provenance),
    #[error("linear program failed: {0}")]
    Lp(#[from] LpError),
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Provenance {
    /// `Σ_{s ≤ l} d_k^{[s]} ≤ α_kk^{[l]}`.
    SingleCell(UserId),
    /// Cycle bound with one participating rank per cycle position.
    CycleBound { cycle: Cycle, ranks: Vec<usize> },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::SingleCell(u) => write!(f, "single[cell={} rank={}]", u.cell, u.rank),
            Provenance::CycleBound { cycle, ranks } => {
                write!(f, "cycle[{cycle} ranks=")?;
                for (i, r) in ranks.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{r}")?;
                }
                f.write_str("]")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearConstraint {
    /// Dense, in canonical user order.
    pub coefficients: Vec<Rational>,
    pub bound: Rational,
    pub provenance: Provenance,
}

impl LinearConstraint {
    pub fn lhs(&self, values: &[Rational]) -> Rational {
        self.coefficients
            .iter()
            .zip(values)
            .filter(|(c, _)| !c.is_zero())
            .map(|(&c, &v)| c * v)
            .sum()
    }

    pub fn holds(&self, values: &[Rational]) -> bool {
        self.lhs(values) <= self.bound
    }
}

#[derive(Debug, Clone)]
pub struct ConstraintSet {
    network: CellNetwork,
    constraints: Vec<LinearConstraint>,
}

/// Bound of the cycle constraint for `(cycle, ranks)`:
/// `Σ_m α_{σ(m)σ(m)}^{[l_σ(m)]} − α_{σ(m)σ(m−1)}^{[l_σ(m)]}`.
pub fn cycle_bound(net: &CellNetwork, cycle: &Cycle, ranks: &[usize]) -> Rational {
    (1..=cycle.len() as isize)
        .map(|m| {
            let c = cycle.at(m);
            let prev = cycle.at(m - 1);
            let l = ranks[(m - 1) as usize];
            net.strength(c, l, c) - net.strength(c, l, prev)
        })
        .sum()
}

/// `Σ_k L_k + Σ_σ Π_m L_σ(m)`.
pub fn constraint_count(net: &CellNetwork) -> usize {
    net.user_total()
        + enumerate_cycles(net.cell_count())
            .iter()
            .map(|c| c.cells().iter().map(|&k| net.users_in(k)).product::<usize>())
            .sum::<usize>()
}

pub fn build_constraints(net: &CellNetwork) -> Result<ConstraintSet, PolytopeError> {
    if !net.is_canonical() {
        return Err(PolytopeError::NotCanonical);
    }
    let n = net.user_total();
    let prefix_row = |row: &mut [Rational], cell: usize, rank: usize| {
        for r in 1..=rank {
            row[net.index_of(UserId::new(cell, r))] = Rational::ONE;
        }
    };
    let mut constraints = Vec::with_capacity(constraint_count(net));
    for user in net.users() {
        let mut coefficients = vec![Rational::ZERO; n];
        prefix_row(&mut coefficients, user.cell, user.rank);
        constraints.push(LinearConstraint {
            coefficients,
            bound: net.direct(user.cell, user.rank),
            provenance: Provenance::SingleCell(user),
        });
    }
    for cycle in enumerate_cycles(net.cell_count()) {
        let tuples = rank_tuples(net, &cycle).expect("enumerated cycles fit the network");
        for ranks in tuples {
            let mut coefficients = vec![Rational::ZERO; n];
            for (&cell, &rank) in cycle.cells().iter().zip(&ranks) {
                prefix_row(&mut coefficients, cell, rank);
            }
            constraints.push(LinearConstraint {
                coefficients,
                bound: cycle_bound(net, &cycle, &ranks),
                provenance: Provenance::CycleBound {
                    cycle: cycle.clone(),
                    ranks,
                },
            });
        }
    }
    Ok(ConstraintSet {
        network: net.clone(),
        constraints,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Membership {
    pub member: bool,
    /// Indices into [`ConstraintSet::constraints`].
    pub violated: Vec<usize>,
}

impl ConstraintSet {
    pub fn network(&self) -> &CellNetwork {
        &self.network
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn cycle_constraints(&self) -> impl Iterator<Item = &LinearConstraint> {
        self.constraints
            .iter()
            .filter(|c| matches!(c.provenance, Provenance::CycleBound { .. }))
    }

    /// Exact membership of `d`; nonnegativity is enforced by [`GdofPoint`].
    pub fn is_member(&self, d: &GdofPoint) -> Result<Membership, PolytopeError> {
        d.check_network(&self.network)?;
        let violated: Vec<usize> = self
            .constraints
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.holds(d.values()))
            .map(|(i, _)| i)
            .collect();
        Ok(Membership {
            member: violated.is_empty(),
            violated,
        })
    }

    /// Exact maximum of `Σ w·d` over the region and a vertex attaining it.
    pub fn max_weighted(&self, weights: &[Rational]) -> Result<(Rational, GdofPoint), PolytopeError> {
        let n = self.network.user_total();
        if weights.len() != n {
            return Err(PolytopeError::WeightLength {
                expected: n,
                got: weights.len(),
            });
        }
        if let Some((user, &value)) = self
            .network
            .users()
            .zip(weights)
            .find(|(_, w)| w.is_negative())
        {
            return Err(PolytopeError::NegativeWeight { user, value });
        }
        if weights.iter().all(Rational::is_zero) {
            return Err(PolytopeError::ZeroWeights);
        }
        if self.constraints.is_empty() {
            return Err(PolytopeError::EmptyConstraintSet);
        }
        // coefficients are nonnegative, so a negative bound empties the region
        if let Some(c) = self.constraints.iter().find(|c| c.bound.is_negative()) {
            return Err(PolytopeError::EmptyRegion(c.provenance.clone()));
        }
        let rows: Vec<Vec<Rational>> = self
            .constraints
            .iter()
            .map(|c| c.coefficients.clone())
            .collect();
        let rhs: Vec<Rational> = self.constraints.iter().map(|c| c.bound).collect();
        let sol = simplex::maximize(weights, &rows, &rhs)?;
        let point = GdofPoint::new(&self.network, sol.x)?;
        Ok((sol.optimum, point))
    }

    /// Writes one CSV row per constraint: provenance, the coefficient of every
    /// user in canonical order, and the bound as `p/q`.
    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<(), PolytopeError> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["provenance".to_string()];
        header.extend(self.network.users().map(|u| format!("d_{}_{}", u.cell, u.rank)));
        header.push("bound".to_string());
        w.write_record(&header)?;
        for c in &self.constraints {
            let mut row = vec![c.provenance.to_string()];
            row.extend(c.coefficients.iter().map(|v| v.to_string()));
            row.push(c.bound.to_fraction_string());
            w.write_record(&row)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

/// Maximum sum-GDoF over the region.
pub fn sum_gdof(net: &CellNetwork) -> Result<Rational, PolytopeError> {
    let cs = build_constraints(net)?;
    let ones = vec![Rational::ONE; net.user_total()];
    Ok(cs.max_weighted(&ones)?.0)
}
