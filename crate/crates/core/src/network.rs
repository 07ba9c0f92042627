//! Cellular network model: cells, users and channel strength exponents.
//!
//! Strengths are indexed as `strength(receiver user (l, k), transmitter cell i)`,
//! the downlink view. The uplink (IMAC) uses the same exponents with the
//! roles of transmitter and receiver swapped.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{ParseRationalError, Rational};

/// User `(rank, cell)`, both 1-based. Within a cell, ranks follow ascending
/// direct strength once the network is canonical.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UserId {
    pub cell: usize,
    pub rank: usize,
}

impl UserId {
    pub fn new(cell: usize, rank: usize) -> Self {
        UserId { cell, rank }
    }
}

impl fmt::Display for UserId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UE-({},{})", self.rank, self.cell)
    }
}

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("malformed network document: {0}")]
    Malformed(String),
    #[error("network must have at least one cell")]
    NoCells,
    #[error("cell {0} has no users")]
    EmptyCell(usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("negative strength {value} for {user} from BS-{cell}")]
    NegativeStrength {
        user: UserId,
        cell: usize,
        value: Rational,
    },
    #[error("invalid strength `{text}`: {source}")]
    BadNumber {
        text: String,
        source: ParseRationalError,
    },
    #[error("invalid family parameters: {0}")]
    Parameters(String),
}

/// A K-cell network with `L_k` users per cell and a full strength table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CellNetwork {
    user_counts: Vec<usize>,
    // [receiver cell][rank][transmitter cell], zero-based
    alpha: Vec<Vec<Vec<Rational>>>,
    offsets: Vec<usize>,
}

fn offsets_of(user_counts: &[usize]) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(user_counts.len());
    let mut acc = 0;
    for &l in user_counts {
        offsets.push(acc);
        acc += l;
    }
    offsets
}

impl CellNetwork {
    /// Validates and builds a network from a `[cell][rank][tx cell]` table.
    pub fn new(alpha: Vec<Vec<Vec<Rational>>>) -> Result<Self, NetworkError> {
        let k = alpha.len();
        if k == 0 {
            return Err(NetworkError::NoCells);
        }
        let mut user_counts = Vec::with_capacity(k);
        for (ci, cell) in alpha.iter().enumerate() {
            if cell.is_empty() {
                return Err(NetworkError::EmptyCell(ci + 1));
            }
            for (li, row) in cell.iter().enumerate() {
                if row.len() != k {
                    return Err(NetworkError::Dimension(format!(
                        "user ({},{}) has {} strengths, expected {k}",
                        li + 1,
                        ci + 1,
                        row.len()
                    )));
                }
                for (ti, v) in row.iter().enumerate() {
                    if v.is_negative() {
                        return Err(NetworkError::NegativeStrength {
                            user: UserId::new(ci + 1, li + 1),
                            cell: ti + 1,
                            value: *v,
                        });
                    }
                }
            }
            user_counts.push(cell.len());
        }
        let offsets = offsets_of(&user_counts);
        Ok(CellNetwork {
            user_counts,
            alpha,
            offsets,
        })
    }

    pub fn cell_count(&self) -> usize {
        self.user_counts.len()
    }

    pub fn user_counts(&self) -> &[usize] {
        &self.user_counts
    }

    /// `L_k` for the 1-based cell `k`.
    pub fn users_in(&self, cell: usize) -> usize {
        self.user_counts[cell - 1]
    }

    pub fn user_total(&self) -> usize {
        self.user_counts.iter().sum()
    }

    /// All users in canonical order: cell-major, rank-minor.
    pub fn users(&self) -> impl Iterator<Item = UserId> + '_ {
        self.user_counts
            .iter()
            .enumerate()
            .flat_map(|(c, &l)| (1..=l).map(move |r| UserId::new(c + 1, r)))
    }

    /// Position of `user` in the canonical order.
    pub fn index_of(&self, user: UserId) -> usize {
        self.offsets[user.cell - 1] + user.rank - 1
    }

    pub fn contains(&self, user: UserId) -> bool {
        user.cell >= 1
            && user.cell <= self.cell_count()
            && user.rank >= 1
            && user.rank <= self.user_counts[user.cell - 1]
    }

    /// `α_{k i}^{[l]}` for receiver `(l, k)` and transmitter cell `i` (1-based).
    pub fn strength(&self, cell: usize, rank: usize, from: usize) -> Rational {
        self.alpha[cell - 1][rank - 1][from - 1]
    }

    pub fn strength_of(&self, user: UserId, from: usize) -> Rational {
        self.strength(user.cell, user.rank, from)
    }

    /// Direct strength `α_{kk}^{[l]}`.
    pub fn direct(&self, cell: usize, rank: usize) -> Rational {
        self.strength(cell, rank, cell)
    }

    pub fn max_strength(&self) -> Rational {
        self.alpha
            .iter()
            .flatten()
            .flatten()
            .copied()
            .fold(Rational::ZERO, Rational::max)
    }

    pub fn table(&self) -> &[Vec<Vec<Rational>>] {
        &self.alpha
    }

    /// Direct strengths are nondecreasing in rank within every cell.
    pub fn is_canonical(&self) -> bool {
        (1..=self.cell_count()).all(|k| {
            (2..=self.users_in(k)).all(|l| self.direct(k, l - 1) <= self.direct(k, l))
        })
    }

    /// Multiplies every strength by `factor` (which must be nonnegative).
    pub fn scaled(&self, factor: Rational) -> CellNetwork {
        assert!(!factor.is_negative(), "negative scale factor");
        let alpha = self
            .alpha
            .iter()
            .map(|cell| {
                cell.iter()
                    .map(|row| row.iter().map(|&v| v * factor).collect())
                    .collect()
            })
            .collect();
        CellNetwork {
            user_counts: self.user_counts.clone(),
            alpha,
            offsets: self.offsets.clone(),
        }
    }
}

/// Per-cell rank permutations produced by [`canonicalize`]: entry
/// `perm[k][new_rank - 1]` is the input rank now stored at `new_rank`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankPermutation(pub Vec<Vec<usize>>);

impl RankPermutation {
    pub fn is_identity(&self) -> bool {
        self.0
            .iter()
            .all(|p| p.iter().enumerate().all(|(i, &r)| r == i + 1))
    }

    /// Input-order user for a canonical user.
    pub fn original(&self, user: UserId) -> UserId {
        UserId::new(user.cell, self.0[user.cell - 1][user.rank - 1])
    }
}

/// Stably sorts the users of each cell by direct strength.
pub fn canonicalize(net: &CellNetwork) -> (CellNetwork, RankPermutation) {
    let mut alpha = Vec::with_capacity(net.cell_count());
    let mut perms = Vec::with_capacity(net.cell_count());
    for (ci, cell) in net.alpha.iter().enumerate() {
        let mut order: Vec<usize> = (0..cell.len()).collect();
        order.sort_by_key(|&l| cell[l][ci]);
        alpha.push(order.iter().map(|&l| cell[l].clone()).collect());
        perms.push(order.iter().map(|&l| l + 1).collect());
    }
    let canon = CellNetwork {
        user_counts: net.user_counts.clone(),
        alpha,
        offsets: net.offsets.clone(),
    };
    (canon, RankPermutation(perms))
}

/// Two cells with two users each. Direct strengths are 1; the rank-1 user
/// of each cell hears the other base station at `alpha`, the rank-2 user
/// at `beta`.
pub fn symmetric_two_cell(alpha: Rational, beta: Rational) -> Result<CellNetwork, NetworkError> {
    if beta > alpha {
        return Err(NetworkError::Parameters(format!(
            "beta = {beta} exceeds alpha = {alpha}"
        )));
    }
    symmetric_two_cell_unordered(alpha, beta)
}

/// Same layout as [`symmetric_two_cell`] without the `beta <= alpha`
/// restriction, for regime maps over the whole parameter square.
pub fn symmetric_two_cell_unordered(
    alpha: Rational,
    beta: Rational,
) -> Result<CellNetwork, NetworkError> {
    let one = Rational::ONE;
    CellNetwork::new(vec![
        vec![vec![one, alpha], vec![one, beta]],
        vec![vec![alpha, one], vec![beta, one]],
    ])
}

#[derive(Serialize, Deserialize)]
struct NetworkDoc {
    cells: usize,
    users: Vec<usize>,
    alpha: Vec<Vec<Vec<String>>>,
}

/// Parses the JSON network document `{cells, users, alpha}` where `alpha`
/// is indexed `[receiver cell][rank][transmitter cell]` and every value is
/// a string holding `p/q` or a finite decimal.
pub fn parse_network(text: &str) -> Result<CellNetwork, NetworkError> {
    let doc: NetworkDoc =
        serde_json::from_str(text).map_err(|e| NetworkError::Malformed(e.to_string()))?;
    if doc.cells == 0 {
        return Err(NetworkError::NoCells);
    }
    if doc.users.len() != doc.cells {
        return Err(NetworkError::Dimension(format!(
            "`users` has {} entries for {} cells",
            doc.users.len(),
            doc.cells
        )));
    }
    if let Some(k) = doc.users.iter().position(|&l| l == 0) {
        return Err(NetworkError::EmptyCell(k + 1));
    }
    if doc.alpha.len() != doc.cells {
        return Err(NetworkError::Dimension(format!(
            "`alpha` has {} cells, expected {}",
            doc.alpha.len(),
            doc.cells
        )));
    }
    let mut table = Vec::with_capacity(doc.cells);
    for (ci, cell) in doc.alpha.iter().enumerate() {
        if cell.len() != doc.users[ci] {
            return Err(NetworkError::Dimension(format!(
                "cell {} lists {} users in `alpha`, `users` says {}",
                ci + 1,
                cell.len(),
                doc.users[ci]
            )));
        }
        let mut rows = Vec::with_capacity(cell.len());
        for row in cell {
            let parsed = row
                .iter()
                .map(|s| {
                    s.parse::<Rational>().map_err(|source| NetworkError::BadNumber {
                        text: s.clone(),
                        source,
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(parsed);
        }
        table.push(rows);
    }
    CellNetwork::new(table)
}

/// Serializes to the network document, rationals as `p/q` strings.
pub fn serialize_network(net: &CellNetwork) -> String {
    let doc = NetworkDoc {
        cells: net.cell_count(),
        users: net.user_counts.clone(),
        alpha: net
            .alpha
            .iter()
            .map(|cell| {
                cell.iter()
                    .map(|row| row.iter().map(Rational::to_fraction_string).collect())
                    .collect()
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("network document serializes");
    out.push('\n');
    out
}
