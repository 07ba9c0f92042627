//! Achievability oracle: GDoF tuples reached by power-controlled multi-cell
//! TIN with the natural decoding orders, and cross-checks of the resulting
//! point clouds against the polyhedral region.
//!
//! Uplink (IMAC): BS-k decodes its users in descending rank order, so user
//! `l` sees the not-yet-decoded users `s < l` of its own cell and all
//! other-cell users as noise. Downlink (IBC): UE-(l,k) decodes messages
//! `1..=l` in ascending order, so message `s` must be decodable at every
//! receiver `l >= s`, with messages `u > s` of its own BS and all other-BS
//! signals treated as noise. All levels are GDoF exponents; a received
//! level at or below 0 sits under the noise floor.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::io;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::network::{CellNetwork, UserId};
use crate::point::{GdofPoint, PointError};
use crate::polytope::{ConstraintSet, PolytopeError, Provenance};
use crate::rational::{common_denominator, q, Rational};

/// Largest grid `sample_region` will evaluate.
pub const MAX_GRID_EVALUATIONS: u128 = 10_000_000;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("exponent {value} for {user} is positive; power exponents must be <= 0")]
    PositiveExponent { user: UserId, value: Rational },
    #[error("expected {expected} exponents, got {got}")]
    Length { expected: usize, got: usize },
    #[error("power allocation belongs to a different network")]
    Shape,
    #[error("grid step must be positive, got {0}")]
    Step(Rational),
    #[error("grid floor must be negative, got {0}")]
    Floor(Rational),
    #[error("tolerance must be positive, got {0}")]
    Tolerance(Rational),
    #[error(
        "grid of {evaluations} evaluations exceeds the limit of {MAX_GRID_EVALUATIONS}; \
         use a coarser step or a higher floor"
    )]
    GridTooLarge { evaluations: u128 },
    #[error("values do not fit the integer lattice with denominator {0}")]
    Lattice(i128),
    #[error("point cloud and constraint set belong to different networks")]
    NetworkMismatch,
    #[error("direction {index}: {source}")]
    Direction {
        index: usize,
        source: PolytopeError,
    },
    #[error(transparent)]
    Point(#[from] PointError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error("io: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Imac,
    Ibc,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Imac => "IMAC",
            Mode::Ibc => "IBC",
        })
    }
}

/// Power exponents `r <= 0`, one per user in canonical order. In the uplink
/// the exponent belongs to the transmitting UE, in the downlink to the
/// message its BS sends to that UE.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerAllocation {
    user_counts: Vec<usize>,
    exponents: Vec<Rational>,
}

impl PowerAllocation {
    pub fn new(net: &CellNetwork, exponents: Vec<Rational>) -> Result<Self, OracleError> {
        if exponents.len() != net.user_total() {
            return Err(OracleError::Length {
                expected: net.user_total(),
                got: exponents.len(),
            });
        }
        if let Some((user, &value)) = net.users().zip(&exponents).find(|(_, r)| r.is_positive()) {
            return Err(OracleError::PositiveExponent { user, value });
        }
        Ok(PowerAllocation {
            user_counts: net.user_counts().to_vec(),
            exponents,
        })
    }

    pub fn full_power(net: &CellNetwork) -> Self {
        PowerAllocation {
            user_counts: net.user_counts().to_vec(),
            exponents: vec![Rational::ZERO; net.user_total()],
        }
    }

    pub fn exponents(&self) -> &[Rational] {
        &self.exponents
    }

    fn get(&self, net: &CellNetwork, user: UserId) -> Rational {
        self.exponents[net.index_of(user)]
    }

    fn check(&self, net: &CellNetwork) -> Result<(), OracleError> {
        if self.user_counts != net.user_counts() {
            Err(OracleError::Shape)
        } else {
            Ok(())
        }
    }
}

/// Uplink GDoF tuple under `power`.
pub fn imac_gdof(net: &CellNetwork, power: &PowerAllocation) -> Result<GdofPoint, OracleError> {
    power.check(net)?;
    let cells = net.cell_count();
    let level = |user: UserId, at_bs: usize| net.strength_of(user, at_bs) + power.get(net, user);
    let mut values = Vec::with_capacity(net.user_total());
    for k in 1..=cells {
        let inter = net
            .users()
            .filter(|u| u.cell != k)
            .map(|u| level(u, k))
            .fold(Rational::ZERO, Rational::max);
        for l in 1..=net.users_in(k) {
            let own = level(UserId::new(k, l), k);
            let noise = (1..l)
                .map(|s| level(UserId::new(k, s), k))
                .fold(inter, Rational::max);
            values.push((own - noise).positive_part());
        }
    }
    Ok(GdofPoint::new(net, values)?)
}

/// Downlink GDoF tuple under per-message exponents `power`.
pub fn ibc_gdof(net: &CellNetwork, power: &PowerAllocation) -> Result<GdofPoint, OracleError> {
    power.check(net)?;
    let cells = net.cell_count();
    let bs_power = |j: usize| {
        (1..=net.users_in(j))
            .map(|u| power.get(net, UserId::new(j, u)))
            .max()
            .expect("cells are nonempty")
    };
    let bs_max: Vec<Rational> = (1..=cells).map(bs_power).collect();
    let mut values = Vec::with_capacity(net.user_total());
    for k in 1..=cells {
        let lk = net.users_in(k);
        for s in 1..=lk {
            let qs = power.get(net, UserId::new(k, s));
            let rate = (s..=lk)
                .map(|l| {
                    let direct = net.direct(k, l);
                    let mut noise = Rational::ZERO;
                    for u in s + 1..=lk {
                        noise = noise.max(direct + power.get(net, UserId::new(k, u)));
                    }
                    for j in (1..=cells).filter(|&j| j != k) {
                        noise = noise.max(net.strength(k, l, j) + bs_max[j - 1]);
                    }
                    (direct + qs - noise).positive_part()
                })
                .min()
                .expect("receiver set contains s");
            values.push(rate);
        }
    }
    Ok(GdofPoint::new(net, values)?)
}

pub fn gdof(net: &CellNetwork, mode: Mode, power: &PowerAllocation) -> Result<GdofPoint, OracleError> {
    match mode {
        Mode::Imac => imac_gdof(net, power),
        Mode::Ibc => ibc_gdof(net, power),
    }
}

const NEG_INF: i64 = i64::MIN / 4;

/// Integer-lattice copy of a network: every strength and exponent is an
/// exact multiple of `1 / denom`, so the GDoF maps reduce to integer
/// max/min/add.
struct Lattice {
    denom: i128,
    user_counts: Vec<usize>,
    offsets: Vec<usize>,
    // strength[user][cell], canonical user order
    strength: Vec<Vec<i64>>,
    cell_of: Vec<usize>,
}

fn to_lattice(r: Rational, denom: i128) -> Result<i64, OracleError> {
    let scaled = r * Rational::from_integer(denom);
    debug_assert!(scaled.is_integer());
    i64::try_from(scaled.numer())
        .ok()
        .filter(|v| v.abs() < i64::MAX / 8)
        .ok_or(OracleError::Lattice(denom))
}

impl Lattice {
    fn new(net: &CellNetwork, extra: &[Rational]) -> Result<Self, OracleError> {
        let all = net.table().iter().flatten().flatten().chain(extra.iter());
        let denom = common_denominator(all);
        let cells = net.cell_count();
        let mut strength = Vec::with_capacity(net.user_total());
        let mut cell_of = Vec::with_capacity(net.user_total());
        for u in net.users() {
            let row = (1..=cells)
                .map(|i| to_lattice(net.strength_of(u, i), denom))
                .collect::<Result<Vec<_>, _>>()?;
            strength.push(row);
            cell_of.push(u.cell - 1);
        }
        let mut offsets = Vec::with_capacity(cells);
        let mut acc = 0;
        for &l in net.user_counts() {
            offsets.push(acc);
            acc += l;
        }
        Ok(Lattice {
            denom,
            user_counts: net.user_counts().to_vec(),
            offsets,
            strength,
            cell_of,
        })
    }

    fn cells(&self) -> usize {
        self.user_counts.len()
    }

    fn imac(&self, r: &[i64], inter: &mut [i64], out: &mut [i64]) {
        let cells = self.cells();
        inter.iter_mut().for_each(|v| *v = 0);
        for (u, row) in self.strength.iter().enumerate() {
            let own = self.cell_of[u];
            for k in 0..cells {
                if k != own {
                    let lvl = row[k] + r[u];
                    if lvl > inter[k] {
                        inter[k] = lvl;
                    }
                }
            }
        }
        for (k, &floor) in inter.iter().enumerate().take(cells) {
            let base = self.offsets[k];
            let mut noise = floor;
            for l in 0..self.user_counts[k] {
                let u = base + l;
                let own = self.strength[u][k] + r[u];
                out[u] = (own - noise).max(0);
                if own > noise {
                    noise = own;
                }
            }
        }
    }

    fn ibc(&self, q: &[i64], bs_max: &mut [i64], out: &mut [i64]) {
        let cells = self.cells();
        for j in 0..cells {
            let base = self.offsets[j];
            bs_max[j] = q[base..base + self.user_counts[j]]
                .iter()
                .copied()
                .max()
                .unwrap_or(NEG_INF);
        }
        for k in 0..cells {
            let base = self.offsets[k];
            let lk = self.user_counts[k];
            for s in 0..lk {
                // max over messages above s of this BS
                let above = q[base + s + 1..base + lk]
                    .iter()
                    .copied()
                    .max()
                    .unwrap_or(NEG_INF);
                let mut rate = i64::MAX;
                for l in s..lk {
                    let row = &self.strength[base + l];
                    let direct = row[k];
                    let mut noise = 0i64;
                    if above != NEG_INF {
                        noise = noise.max(direct + above);
                    }
                    for j in 0..cells {
                        if j != k {
                            noise = noise.max(row[j] + bs_max[j]);
                        }
                    }
                    rate = rate.min((direct + q[base + s] - noise).max(0));
                }
                out[base + s] = rate;
            }
        }
    }
}

/// Deduplicated GDoF points produced by one oracle sweep. Points are kept
/// exact on a common integer lattice (`numerator / denom`), sorted.
#[derive(Debug, Clone)]
pub struct PointCloud {
    network: CellNetwork,
    mode: Mode,
    step: Rational,
    floor: Rational,
    evaluations: u128,
    denom: i128,
    width: usize,
    coords: Vec<i64>,
}

impl PointCloud {
    pub fn network(&self) -> &CellNetwork {
        &self.network
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn step(&self) -> Rational {
        self.step
    }

    pub fn floor(&self) -> Rational {
        self.floor
    }

    /// Grid points evaluated to build the cloud.
    pub fn evaluations(&self) -> u128 {
        self.evaluations
    }

    pub fn len(&self) -> usize {
        self.coords.len().checked_div(self.width).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    fn raw(&self, i: usize) -> &[i64] {
        &self.coords[i * self.width..(i + 1) * self.width]
    }

    pub fn point(&self, i: usize) -> GdofPoint {
        let values = self
            .raw(i)
            .iter()
            .map(|&n| Rational::new(n as i128, self.denom))
            .collect();
        GdofPoint::new(&self.network, values).expect("cloud points are nonnegative")
    }

    pub fn points(&self) -> impl Iterator<Item = GdofPoint> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    /// An empty cloud carrying the given metadata.
    pub fn empty(net: &CellNetwork, mode: Mode, step: Rational, floor: Rational) -> Self {
        PointCloud {
            network: net.clone(),
            mode,
            step,
            floor,
            evaluations: 0,
            denom: 1,
            width: net.user_total(),
            coords: Vec::new(),
        }
    }

    /// Adds a point, rescaling the lattice if its denominators need it.
    pub fn insert(&mut self, point: &GdofPoint) -> Result<(), OracleError> {
        point.check_network(&self.network)?;
        let denom = {
            let d = common_denominator(point.values());
            num_integer::Integer::lcm(&d, &self.denom)
        };
        if denom != self.denom {
            let factor = i64::try_from(denom / self.denom).map_err(|_| OracleError::Lattice(denom))?;
            for c in self.coords.iter_mut() {
                *c = c.checked_mul(factor).ok_or(OracleError::Lattice(denom))?;
            }
            self.denom = denom;
        }
        let raw = point
            .values()
            .iter()
            .map(|&v| to_lattice(v, denom))
            .collect::<Result<Vec<_>, _>>()?;
        let mut rows: BTreeSet<Vec<i64>> = self.coords.chunks(self.width).map(<[i64]>::to_vec).collect();
        rows.insert(raw);
        self.coords = rows.into_iter().flatten().collect();
        Ok(())
    }

    fn weighted_max(&self, weights: &[Rational]) -> Rational {
        let wden = common_denominator(weights);
        let w: Vec<i128> = weights
            .iter()
            .map(|&x| (x * Rational::from_integer(wden)).numer())
            .collect();
        let best = (0..self.len())
            .map(|i| {
                self.raw(i)
                    .iter()
                    .zip(&w)
                    .map(|(&n, &wi)| n as i128 * wi)
                    .sum::<i128>()
            })
            .max()
            .unwrap_or(0);
        Rational::new(best, wden * self.denom)
    }

    /// Metadata lines prefixed `#`, a header, then one row per point as `p/q`.
    pub fn write_csv<W: io::Write>(&self, mut out: W) -> Result<(), OracleError> {
        writeln!(out, "# mode={}", self.mode)?;
        writeln!(out, "# step={}", self.step.to_fraction_string())?;
        writeln!(out, "# floor={}", self.floor.to_fraction_string())?;
        writeln!(out, "# evaluations={}", self.evaluations)?;
        writeln!(out, "# points={}", self.len())?;
        let header: Vec<String> = self
            .network
            .users()
            .map(|u| format!("d_{}_{}", u.cell, u.rank))
            .collect();
        writeln!(out, "{}", header.join(","))?;
        for p in self.points() {
            let row: Vec<String> = p.values().iter().map(Rational::to_fraction_string).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// `-max strength`: any exponent at or below it puts every level that
/// exponent touches under the noise floor, so lower values add no new points.
pub fn default_floor(net: &CellNetwork) -> Rational {
    let m = net.max_strength();
    if m.is_zero() {
        -Rational::ONE
    } else {
        -m
    }
}

pub fn default_step() -> Rational {
    q(1, 20)
}

/// Four grid steps.
pub fn default_tolerance(step: Rational) -> Rational {
    step * Rational::from_integer(4)
}

/// Exponent grid `{0, -step, -2 step, ...}` down to (and including, when
/// it lands on the grid) `floor`.
pub fn grid_levels(step: Rational, floor: Rational) -> Vec<Rational> {
    let count = (-floor / step).floor();
    (0..=count)
        .map(|i| -step * Rational::from_integer(i))
        .collect()
}

fn grid_size(levels: usize, users: usize) -> u128 {
    let mut total: u128 = 1;
    for _ in 0..users {
        total = total.saturating_mul(levels as u128);
        if total > MAX_GRID_EVALUATIONS {
            return total;
        }
    }
    total
}

/// Evaluates the mode's GDoF map on the full exponent grid, one level
/// choice per user, and keeps the distinct points.
pub fn sample_region(
    net: &CellNetwork,
    mode: Mode,
    step: Rational,
    floor: Rational,
) -> Result<PointCloud, OracleError> {
    if !step.is_positive() {
        return Err(OracleError::Step(step));
    }
    if !floor.is_negative() {
        return Err(OracleError::Floor(floor));
    }
    let levels = grid_levels(step, floor);
    let n = net.user_total();
    let evaluations = grid_size(levels.len(), n);
    if evaluations > MAX_GRID_EVALUATIONS {
        return Err(OracleError::GridTooLarge { evaluations });
    }
    let lattice = Lattice::new(net, &[step, floor])?;
    let level_ints = levels
        .iter()
        .map(|&r| to_lattice(r, lattice.denom))
        .collect::<Result<Vec<_>, _>>()?;
    let base = level_ints.len() as u64;
    let total = evaluations as u64;
    const CHUNK: u64 = 1 << 15;
    let chunks = total.div_ceil(CHUNK);

    let merged: HashSet<Vec<i64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(total);
            let mut digits = vec![0usize; n];
            let mut rem = start;
            for d in digits.iter_mut().rev() {
                *d = (rem % base) as usize;
                rem /= base;
            }
            let mut exps: Vec<i64> = digits.iter().map(|&d| level_ints[d]).collect();
            let mut scratch = vec![0i64; lattice.cells()];
            let mut out = vec![0i64; n];
            let mut seen: HashSet<Vec<i64>> = HashSet::new();
            for _ in start..end {
                match mode {
                    Mode::Imac => lattice.imac(&exps, &mut scratch, &mut out),
                    Mode::Ibc => lattice.ibc(&exps, &mut scratch, &mut out),
                }
                if !seen.contains(out.as_slice()) {
                    seen.insert(out.clone());
                }
                for pos in (0..n).rev() {
                    digits[pos] += 1;
                    if (digits[pos] as u64) < base {
                        exps[pos] = level_ints[digits[pos]];
                        break;
                    }
                    digits[pos] = 0;
                    exps[pos] = level_ints[0];
                }
            }
            seen
        })
        .reduce(HashSet::new, |mut a, b| {
            if a.len() < b.len() {
                return b.into_iter().fold(a, |mut acc, p| {
                    acc.insert(p);
                    acc
                });
            }
            a.extend(b);
            a
        });

    let mut rows: Vec<Vec<i64>> = merged.into_iter().collect();
    rows.sort_unstable();
    Ok(PointCloud {
        network: net.clone(),
        mode,
        step,
        floor,
        evaluations,
        denom: lattice.denom,
        width: n,
        coords: rows.into_iter().flatten().collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InclusionReport {
    pub points_checked: usize,
    pub violating_points: usize,
    /// Largest `lhs - bound` over all points and constraints, if any is positive.
    pub max_violation: Option<Rational>,
    pub offender: Option<(GdofPoint, Provenance)>,
}

impl InclusionReport {
    pub fn passed(&self) -> bool {
        self.violating_points == 0
    }
}

/// Exact membership of every cloud point in the region.
pub fn check_inclusion(cloud: &PointCloud, cs: &ConstraintSet) -> Result<InclusionReport, OracleError> {
    if cloud.network != *cs.network() {
        return Err(OracleError::NetworkMismatch);
    }
    // row i: Σ C_ij n_j <= B_i * D, over the row's own denominator
    let rows: Vec<(Vec<i128>, i128, i128)> = cs
        .constraints()
        .iter()
        .map(|c| {
            let den = common_denominator(c.coefficients.iter().chain(std::iter::once(&c.bound)));
            let scale = Rational::from_integer(den);
            let coef = c.coefficients.iter().map(|&v| (v * scale).numer()).collect();
            (coef, (c.bound * scale).numer(), den)
        })
        .collect();

    let per_point: Vec<Option<(Rational, usize)>> = (0..cloud.len())
        .into_par_iter()
        .map(|i| {
            let p = cloud.raw(i);
            let mut worst: Option<(Rational, usize)> = None;
            for (ci, (coef, bound, den)) in rows.iter().enumerate() {
                let lhs: i128 = coef.iter().zip(p).map(|(&c, &n)| c * n as i128).sum();
                let excess = lhs - bound * cloud.denom;
                if excess > 0 {
                    let v = Rational::new(excess, den * cloud.denom);
                    if worst.is_none_or(|(w, _)| v > w) {
                        worst = Some((v, ci));
                    }
                }
            }
            worst
        })
        .collect();

    let mut report = InclusionReport {
        points_checked: cloud.len(),
        violating_points: 0,
        max_violation: None,
        offender: None,
    };
    for (i, worst) in per_point.into_iter().enumerate() {
        if let Some((v, ci)) = worst {
            report.violating_points += 1;
            if report.max_violation.is_none_or(|m| v > m) {
                report.max_violation = Some(v);
                report.offender = Some((cloud.point(i), cs.constraints()[ci].provenance.clone()));
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportRow {
    pub direction: Vec<Rational>,
    pub polytope_optimum: Rational,
    /// Zero for an empty cloud (the origin is always achievable).
    pub cloud_maximum: Rational,
    pub gap: Rational,
    pub within_tolerance: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportReport {
    pub tolerance: Rational,
    pub rows: Vec<SupportRow>,
}

impl SupportReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.within_tolerance)
    }

    pub fn max_gap(&self) -> Option<Rational> {
        self.rows.iter().map(|r| r.gap).max()
    }
}

fn check_direction(net: &CellNetwork, index: usize, w: &[Rational]) -> Result<(), OracleError> {
    if let Some((user, &value)) = net.users().zip(w).find(|(_, v)| v.is_negative()) {
        return Err(OracleError::Direction {
            index,
            source: PolytopeError::NegativeWeight { user, value },
        });
    }
    Ok(())
}

/// Compares the region's support function with the cloud's in each direction.
pub fn check_support_match(
    cloud: &PointCloud,
    cs: &ConstraintSet,
    directions: &[Vec<Rational>],
    tolerance: Rational,
) -> Result<SupportReport, OracleError> {
    if !tolerance.is_positive() {
        return Err(OracleError::Tolerance(tolerance));
    }
    if cloud.network != *cs.network() {
        return Err(OracleError::NetworkMismatch);
    }
    let rows = directions
        .iter()
        .enumerate()
        .map(|(index, w)| {
            check_direction(cs.network(), index, w)?;
            let (opt, _) = cs
                .max_weighted(w)
                .map_err(|source| OracleError::Direction { index, source })?;
            let cmax = cloud.weighted_max(w);
            let gap = opt - cmax;
            Ok(SupportRow {
                direction: w.clone(),
                polytope_optimum: opt,
                cloud_maximum: cmax,
                gap,
                within_tolerance: gap <= tolerance,
            })
        })
        .collect::<Result<Vec<_>, OracleError>>()?;
    Ok(SupportReport { tolerance, rows })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualityRow {
    pub direction: Vec<Rational>,
    pub imac_maximum: Rational,
    pub ibc_maximum: Rational,
    /// `|imac - ibc|`.
    pub gap: Rational,
    pub within_tolerance: bool,
}

#[derive(Debug, Clone)]
pub struct DualityReport {
    pub tolerance: Rational,
    pub rows: Vec<DualityRow>,
    pub imac: PointCloud,
    pub ibc: PointCloud,
}

impl DualityReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.within_tolerance)
    }
}

/// Compares uplink and downlink cloud support maxima, direction by direction.
pub fn compare_clouds(
    imac: &PointCloud,
    ibc: &PointCloud,
    directions: &[Vec<Rational>],
    tolerance: Rational,
) -> Result<Vec<DualityRow>, OracleError> {
    if imac.network != ibc.network {
        return Err(OracleError::NetworkMismatch);
    }
    directions
        .iter()
        .enumerate()
        .map(|(index, w)| {
            check_direction(&imac.network, index, w)?;
            if w.len() != imac.width {
                return Err(OracleError::Direction {
                    index,
                    source: PolytopeError::WeightLength {
                        expected: imac.width,
                        got: w.len(),
                    },
                });
            }
            let a = imac.weighted_max(w);
            let b = ibc.weighted_max(w);
            let gap = (a - b).abs();
            Ok(DualityRow {
                direction: w.clone(),
                imac_maximum: a,
                ibc_maximum: b,
                gap,
                within_tolerance: gap <= tolerance,
            })
        })
        .collect()
}

pub fn check_duality(
    net: &CellNetwork,
    step: Rational,
    floor: Rational,
    directions: &[Vec<Rational>],
    tolerance: Rational,
) -> Result<DualityReport, OracleError> {
    if !tolerance.is_positive() {
        return Err(OracleError::Tolerance(tolerance));
    }
    let imac = sample_region(net, Mode::Imac, step, floor)?;
    let ibc = sample_region(net, Mode::Ibc, step, floor)?;
    let rows = compare_clouds(&imac, &ibc, directions, tolerance)?;
    Ok(DualityReport {
        tolerance,
        rows,
        imac,
        ibc,
    })
}

/// Unit vectors, the all-ones vector, then `random` vectors with weights
/// drawn from `{0, 1/10, ..., 1}` (never all zero) from a seeded generator.
pub fn sample_directions(users: usize, random: usize, seed: u64) -> Vec<Vec<Rational>> {
    let mut out = Vec::with_capacity(users + 1 + random);
    for i in 0..users {
        let mut e = vec![Rational::ZERO; users];
        e[i] = Rational::ONE;
        out.push(e);
    }
    out.push(vec![Rational::ONE; users]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < users + 1 + random {
        let w: Vec<Rational> = (0..users).map(|_| q(rng.gen_range(0..=10), 10)).collect();
        if w.iter().any(Rational::is_positive) {
            out.push(w);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::symmetric_two_cell;
    use crate::polytope::build_constraints;

    fn two_user_ic(cross: Rational) -> CellNetwork {
        CellNetwork::new(vec![
            vec![vec![Rational::ONE, cross]],
            vec![vec![cross, Rational::ONE]],
        ])
        .unwrap()
    }

    fn alloc(net: &CellNetwork, v: &[Rational]) -> PowerAllocation {
        PowerAllocation::new(net, v.to_vec()).unwrap()
    }

    #[test]
    fn imac_examples() {
        let net = two_user_ic(q(1, 2));
        let d = imac_gdof(&net, &PowerAllocation::full_power(&net)).unwrap();
        assert_eq!(d.values(), &[q(1, 2), q(1, 2)]);

        let net = symmetric_two_cell(q(1, 2), q(2, 5)).unwrap();
        let p = alloc(&net, &[q(-1, 1), q(0, 1), q(-1, 1), q(0, 1)]);
        let d = imac_gdof(&net, &p).unwrap();
        assert_eq!(d.values(), &[q(0, 1), q(3, 5), q(0, 1), q(3, 5)]);
        assert_eq!(d.total(), crate::polytope::sum_gdof(&net).unwrap());

        let floor = -net.max_strength();
        let p = alloc(&net, &[floor; 4]);
        assert!(imac_gdof(&net, &p).unwrap().values().iter().all(Rational::is_zero));
    }

    #[test]
    fn ibc_examples() {
        let net = two_user_ic(q(1, 2));
        let full = PowerAllocation::full_power(&net);
        assert_eq!(ibc_gdof(&net, &full).unwrap(), imac_gdof(&net, &full).unwrap());

        let net = symmetric_two_cell(q(1, 2), q(2, 5)).unwrap();
        let p = alloc(&net, &[q(-1, 1), q(0, 1), q(-1, 1), q(0, 1)]);
        let d = ibc_gdof(&net, &p).unwrap();
        assert_eq!(d.values(), &[q(0, 1), q(3, 5), q(0, 1), q(3, 5)]);
        let cs = build_constraints(&net).unwrap();
        assert!(cs.is_member(&d).unwrap().member);

        let p = alloc(&net, &[-net.max_strength(); 4]);
        assert!(ibc_gdof(&net, &p).unwrap().values().iter().all(Rational::is_zero));
    }

    #[test]
    fn power_allocation_validation() {
        let net = two_user_ic(q(1, 2));
        assert!(matches!(
            PowerAllocation::new(&net, vec![q(1, 10), q(0, 1)]),
            Err(OracleError::PositiveExponent { .. })
        ));
        assert!(matches!(
            PowerAllocation::new(&net, vec![q(0, 1)]),
            Err(OracleError::Length { .. })
        ));
        let other = symmetric_two_cell(q(1, 2), q(2, 5)).unwrap();
        let p = PowerAllocation::full_power(&other);
        assert!(matches!(imac_gdof(&net, &p), Err(OracleError::Shape)));
    }

    #[test]
    fn grid_arithmetic() {
        let net = CellNetwork::new(vec![vec![vec![q(1, 1)]]]).unwrap();
        let cloud = sample_region(&net, Mode::Imac, q(1, 2), q(-1, 1)).unwrap();
        assert_eq!(cloud.evaluations(), 3);
        let pts: Vec<_> = cloud.points().map(|p| p.values()[0]).collect();
        assert_eq!(pts, vec![q(0, 1), q(1, 2), q(1, 1)]);
        assert_eq!(grid_levels(q(1, 3), q(-1, 2)), vec![q(0, 1), q(-1, 3)]);
    }

    #[test]
    fn grid_guards() {
        let net = symmetric_two_cell(q(1, 2), q(2, 5)).unwrap();
        assert!(matches!(
            sample_region(&net, Mode::Imac, q(1, 1000), q(-1, 1)),
            Err(OracleError::GridTooLarge { .. })
        ));
        assert!(matches!(
            sample_region(&net, Mode::Imac, q(0, 1), q(-1, 1)),
            Err(OracleError::Step(_))
        ));
        assert!(matches!(
            sample_region(&net, Mode::Imac, q(1, 2), q(0, 1)),
            Err(OracleError::Floor(_))
        ));
    }

    #[test]
    fn single_user_cells_dual_maxima_agree() {
        let net = CellNetwork::new(vec![
            vec![vec![q(1, 1), q(1, 4), q(1, 5)]],
            vec![vec![q(1, 3), q(4, 5), q(0, 1)]],
            vec![vec![q(1, 10), q(1, 5), q(1, 2)]],
        ])
        .unwrap();
        let a = sample_region(&net, Mode::Imac, q(1, 10), q(-1, 1)).unwrap();
        let b = sample_region(&net, Mode::Ibc, q(1, 10), q(-1, 1)).unwrap();
        // uplink sees the transposed channel, so the clouds differ pointwise
        assert_ne!(a.coords, b.coords);
        let dirs = sample_directions(3, 5, 7);
        let rows = compare_clouds(&a, &b, &dirs, q(1, 5)).unwrap();
        for r in &rows {
            assert!(r.within_tolerance, "{:?}", r);
        }
    }

    #[test]
    fn symmetric_cloud_inside_region() {
        let net = symmetric_two_cell(q(1, 2), q(2, 5)).unwrap();
        let cs = build_constraints(&net).unwrap();
        let cloud = sample_region(&net, Mode::Imac, q(1, 10), q(-3, 2)).unwrap();
        assert_eq!(cloud.evaluations(), 16u128.pow(4));
        let report = check_inclusion(&cloud, &cs).unwrap();
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn inclusion_negative_control() {
        let net = symmetric_two_cell(q(1, 2), q(2, 5)).unwrap();
        let cs = build_constraints(&net).unwrap();
        let mut cloud = PointCloud::empty(&net, Mode::Imac, q(1, 20), q(-1, 1));
        let empty = check_inclusion(&cloud, &cs).unwrap();
        assert!(empty.passed() && empty.points_checked == 0);

        let half = q(1, 2);
        cloud
            .insert(&GdofPoint::new(&net, vec![half, half, half, half]).unwrap())
            .unwrap();
        cloud
            .insert(&GdofPoint::new(&net, vec![q(0, 1), q(1, 3), q(0, 1), q(1, 3)]).unwrap())
            .unwrap();
        let report = check_inclusion(&cloud, &cs).unwrap();
        assert!(!report.passed());
        assert_eq!(report.violating_points, 1);
        assert_eq!(report.max_violation, Some(q(4, 5)));
        let (pt, prov) = report.offender.unwrap();
        assert_eq!(pt.total(), q(2, 1));
        assert_eq!(prov.to_string(), "cycle[1->2 ranks=2 2]");
    }

    #[test]
    fn support_match_symmetric_network() {
        let net = symmetric_two_cell(q(1, 2), q(2, 5)).unwrap();
        let cs = build_constraints(&net).unwrap();
        let step = q(1, 20);
        let cloud = sample_region(&net, Mode::Imac, step, default_floor(&net)).unwrap();
        let dirs = vec![
            vec![Rational::ONE; 4],
            vec![q(1, 1), q(0, 1), q(0, 1), q(0, 1)],
        ];
        let report = check_support_match(&cloud, &cs, &dirs, q(1, 5)).unwrap();
        assert!(report.passed(), "{report:?}");
        assert!(report.rows[0].cloud_maximum >= q(6, 5) - q(1, 5));
    }

    #[test]
    fn zero_interference_support_is_exact() {
        let net = CellNetwork::new(vec![
            vec![vec![q(1, 3), q(0, 1)], vec![q(2, 3), q(0, 1)]],
            vec![vec![q(0, 1), q(1, 1)]],
        ])
        .unwrap();
        let cs = build_constraints(&net).unwrap();
        let cloud = sample_region(&net, Mode::Imac, q(1, 6), q(-1, 1)).unwrap();
        let dirs = sample_directions(3, 6, 3);
        let report = check_support_match(&cloud, &cs, &dirs, q(1, 100)).unwrap();
        assert!(report.rows.iter().all(|r| r.gap.is_zero()), "{report:?}");
        // full power alone reaches the sum optimum
        let full = imac_gdof(&net, &PowerAllocation::full_power(&net)).unwrap();
        assert_eq!(full.total(), cs.max_weighted(&[Rational::ONE; 3]).unwrap().0);
    }

    #[test]
    fn support_rejects_bad_inputs() {
        let net = symmetric_two_cell(q(1, 2), q(2, 5)).unwrap();
        let cs = build_constraints(&net).unwrap();
        let cloud = PointCloud::empty(&net, Mode::Imac, q(1, 20), q(-1, 1));
        assert!(matches!(
            check_support_match(&cloud, &cs, &[vec![Rational::ONE; 4]], q(0, 1)),
            Err(OracleError::Tolerance(_))
        ));
        let bad = vec![vec![q(1, 1), q(-1, 1), q(0, 1), q(0, 1)]];
        assert!(matches!(
            check_support_match(&cloud, &cs, &bad, q(1, 5)),
            Err(OracleError::Direction { index: 0, .. })
        ));
        let other = build_constraints(&two_user_ic(q(1, 2))).unwrap();
        assert!(matches!(
            check_inclusion(&cloud, &other),
            Err(OracleError::NetworkMismatch)
        ));
    }

    #[test]
    fn duality_on_symmetric_networks() {
        for (a, b) in [(q(1, 2), q(2, 5)), (q(2, 5), q(1, 5))] {
            let net = symmetric_two_cell(a, b).unwrap();
            let step = q(1, 20);
            let dirs = sample_directions(4, 8, 11);
            let report = check_duality(&net, step, default_floor(&net), &dirs, q(1, 5)).unwrap();
            assert!(report.passed(), "{:?}", report.rows);
        }
    }

    #[test]
    fn directions_are_deterministic() {
        let a = sample_directions(4, 10, 42);
        let b = sample_directions(4, 10, 42);
        assert_eq!(a, b);
        assert_eq!(a.len(), 15);
        assert!(a.iter().all(|w| w.iter().any(Rational::is_positive)));
        assert!(a.iter().flatten().all(|w| !w.is_negative() && *w <= Rational::ONE));
    }

    #[test]
    fn cloud_csv_has_metadata() {
        let net = CellNetwork::new(vec![vec![vec![q(1, 1)]]]).unwrap();
        let cloud = sample_region(&net, Mode::Ibc, q(1, 2), q(-1, 1)).unwrap();
        let mut buf = Vec::new();
        cloud.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# mode=IBC");
        assert_eq!(lines[5], "d_1_1");
        assert_eq!(&lines[6..], &["0/1", "1/2", "1/1"]);
    }
}
