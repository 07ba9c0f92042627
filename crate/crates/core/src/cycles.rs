//! Directed cycles over distinct cells and the participating-rank tuples
//! that index cycle bounds.

use std::fmt;

use thiserror::Error;

use crate::network::CellNetwork;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycleError {
    #[error("a cycle needs at least two cells, got {0}")]
    TooShort(usize),
    #[error("cell {0} appears more than once")]
    RepeatedCell(usize),
    #[error("cell index 0 is invalid (cells are 1-based)")]
    ZeroCell,
    #[error("position {position} out of range for a cycle of length {len}")]
    Position { position: usize, len: usize },
    #[error("cycle references cell {cell} but the network has {cells} cells")]
    UnknownCell { cell: usize, cells: usize },
}

/// An ordered sequence of distinct cells `k_1 -> ... -> k_M`, stored in
/// canonical rotation (smallest cell first). Positions are 1-based and
/// wrap modulo `M`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cycle {
    order: Vec<usize>,
}

impl Cycle {
    /// Validates `order` and rotates it so the minimum cell comes first.
    pub fn new(order: Vec<usize>) -> Result<Self, CycleError> {
        if order.len() < 2 {
            return Err(CycleError::TooShort(order.len()));
        }
        if order.contains(&0) {
            return Err(CycleError::ZeroCell);
        }
        for (i, c) in order.iter().enumerate() {
            if order[..i].contains(c) {
                return Err(CycleError::RepeatedCell(*c));
            }
        }
        let start = order
            .iter()
            .enumerate()
            .min_by_key(|(_, &c)| c)
            .map(|(i, _)| i)
            .unwrap_or(0);
        let mut order = order;
        order.rotate_left(start);
        Ok(Cycle { order })
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn cells(&self) -> &[usize] {
        &self.order
    }

    /// `σ(m)` for any integer position, taken modulo `M`.
    pub fn at(&self, position: isize) -> usize {
        let m = self.order.len() as isize;
        self.order[((position - 1).rem_euclid(m)) as usize]
    }

    /// `σ(m - 1)` with `σ(0) = σ(M)`.
    pub fn predecessor(&self, position: usize) -> Result<usize, CycleError> {
        self.check_position(position)?;
        Ok(self.at(position as isize - 1))
    }

    /// `σ(m + 1)` with `σ(M + 1) = σ(1)`.
    pub fn successor(&self, position: usize) -> Result<usize, CycleError> {
        self.check_position(position)?;
        Ok(self.at(position as isize + 1))
    }

    fn check_position(&self, position: usize) -> Result<(), CycleError> {
        if position == 0 || position > self.order.len() {
            Err(CycleError::Position {
                position,
                len: self.order.len(),
            })
        } else {
            Ok(())
        }
    }

    pub fn reversed(&self) -> Cycle {
        let mut rev = self.order.clone();
        rev.reverse();
        Cycle::new(rev).expect("reversal of a valid cycle is valid")
    }

    /// Errors if any participating cell is missing from `net`.
    pub fn check_network(&self, net: &CellNetwork) -> Result<(), CycleError> {
        match self.order.iter().find(|&&c| c > net.cell_count()) {
            Some(&cell) => Err(CycleError::UnknownCell {
                cell,
                cells: net.cell_count(),
            }),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.order.iter().enumerate() {
            if i > 0 {
                f.write_str("->")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// One representative per rotation class of every directed cycle on
/// distinct cells of `1..=cell_count`, ordered by length and then
/// lexicographically. Reversals are distinct cycles and both appear.
pub fn enumerate_cycles(cell_count: usize) -> Vec<Cycle> {
    let mut out = Vec::new();
    for len in 2..=cell_count {
        let mut batch = Vec::new();
        for first in 1..=cell_count {
            let mut path = vec![first];
            let mut used = vec![false; cell_count + 1];
            used[first] = true;
            extend_paths(first, len, cell_count, &mut path, &mut used, &mut batch);
        }
        batch.sort();
        out.extend(batch.into_iter().map(|order| Cycle { order }));
    }
    out
}

// cells after the first must exceed it, which fixes the rotation
fn extend_paths(
    first: usize,
    len: usize,
    cell_count: usize,
    path: &mut Vec<usize>,
    used: &mut [bool],
    out: &mut Vec<Vec<usize>>,
) {
    if path.len() == len {
        out.push(path.clone());
        return;
    }
    for next in first + 1..=cell_count {
        if !used[next] {
            used[next] = true;
            path.push(next);
            extend_paths(first, len, cell_count, path, used, out);
            path.pop();
            used[next] = false;
        }
    }
}

/// `Σ_{M=2}^{K} C(K, M) (M - 1)!`.
pub fn cycle_count(cell_count: usize) -> u64 {
    let k = cell_count as u64;
    (2..=k)
        .map(|m| {
            let binom = (0..m).fold(1u64, |acc, i| acc * (k - i) / (i + 1));
            let fact: u64 = (1..m).product();
            binom * fact
        })
        .sum()
}

/// Cartesian product of `⟨L_{σ(1)}⟩ × … × ⟨L_{σ(M)}⟩` with the first
/// position varying slowest.
pub fn rank_tuples(net: &CellNetwork, cycle: &Cycle) -> Result<RankTuples, CycleError> {
    cycle.check_network(net)?;
    let limits = cycle.cells().iter().map(|&c| net.users_in(c)).collect();
    Ok(RankTuples::new(limits))
}

#[derive(Debug, Clone)]
pub struct RankTuples {
    limits: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl RankTuples {
    pub fn new(limits: Vec<usize>) -> Self {
        let next = if limits.iter().all(|&l| l >= 1) {
            Some(vec![1; limits.len()])
        } else {
            None
        };
        RankTuples { limits, next }
    }
}

impl Iterator for RankTuples {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut pos = succ.len();
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            if succ[pos] < self.limits[pos] {
                succ[pos] += 1;
                self.next = Some(succ);
                break;
            }
            succ[pos] = 1;
        }
        Some(current)
    }
}
