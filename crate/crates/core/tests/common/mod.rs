#![allow(dead_code)]

use std::collections::BTreeSet;

use mctin::cycles::Cycle;
use mctin::rational::q;
use mctin::{canonicalize, is_ctin, CellNetwork, ConstraintSet, Rational};
use rand::Rng;

/// Random network with `cells` cells, up to `max_users` users per cell and
/// strengths `k / denom` for `k` in `0..=max_numer`, canonicalized.
pub fn random_network<R: Rng>(
    rng: &mut R,
    cells: usize,
    max_users: usize,
    max_numer: i128,
    denom: i128,
) -> CellNetwork {
    let counts: Vec<usize> = (0..cells).map(|_| rng.gen_range(1..=max_users)).collect();
    random_network_with_counts(rng, &counts, max_numer, denom)
}

pub fn random_network_with_counts<R: Rng>(
    rng: &mut R,
    counts: &[usize],
    max_numer: i128,
    denom: i128,
) -> CellNetwork {
    let cells = counts.len();
    let alpha = counts
        .iter()
        .map(|&l| {
            (0..l)
                .map(|_| {
                    (0..cells)
                        .map(|_| q(rng.gen_range(0..=max_numer), denom))
                        .collect()
                })
                .collect()
        })
        .collect();
    canonicalize(&CellNetwork::new(alpha).unwrap()).0
}

/// CTIN network by shrinking random cross strengths until the conditions
/// hold. Direct links are drawn from the upper half of the range so the
/// shrinking terminates quickly; the lattice `1/denom` is preserved.
pub fn random_ctin_network<R: Rng>(
    rng: &mut R,
    counts: &[usize],
    max_numer: i128,
    denom: i128,
) -> CellNetwork {
    let cells = counts.len();
    loop {
        let mut alpha: Vec<Vec<Vec<i128>>> = counts
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                (0..l)
                    .map(|_| {
                        (0..cells)
                            .map(|j| {
                                if i == j {
                                    rng.gen_range(max_numer / 2..=max_numer)
                                } else {
                                    rng.gen_range(0..=max_numer)
                                }
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        for _ in 0..12 {
            let net = build(&alpha, denom);
            if is_ctin(&net).unwrap().regime_holds {
                return net;
            }
            for (i, cell) in alpha.iter_mut().enumerate() {
                for row in cell.iter_mut() {
                    for (j, v) in row.iter_mut().enumerate() {
                        if i != j && rng.gen_bool(0.5) {
                            *v /= 2;
                        }
                    }
                }
            }
        }
    }
}

fn build(alpha: &[Vec<Vec<i128>>], denom: i128) -> CellNetwork {
    let table = alpha
        .iter()
        .map(|cell| {
            cell.iter()
                .map(|row| row.iter().map(|&n| q(n, denom)).collect())
                .collect()
        })
        .collect();
    canonicalize(&CellNetwork::new(table).unwrap()).0
}

/// Every cycle found by listing all injective sequences of length >= 2 and
/// keeping one representative per rotation class.
pub fn brute_force_cycles(cells: usize) -> BTreeSet<Vec<usize>> {
    fn extend(cells: usize, seq: &mut Vec<usize>, out: &mut BTreeSet<Vec<usize>>) {
        if seq.len() >= 2 {
            let start = (0..seq.len()).min_by_key(|&i| seq[i]).unwrap();
            let mut rot = seq[start..].to_vec();
            rot.extend_from_slice(&seq[..start]);
            out.insert(rot);
        }
        for c in 1..=cells {
            if !seq.contains(&c) {
                seq.push(c);
                extend(cells, seq, out);
                seq.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    extend(cells, &mut Vec::new(), &mut out);
    out
}

pub fn cycle_cells(c: &Cycle) -> Vec<usize> {
    c.cells().to_vec()
}

fn solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = a[col][col].recip();
        for v in a[col].iter_mut() {
            *v = *v * inv;
        }
        b[col] = b[col] * inv;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col];
                let pivot_row = a[col].clone();
                for (v, p) in a[r].iter_mut().zip(pivot_row) {
                    *v -= f * p;
                }
                let pb = b[col];
                b[r] -= f * pb;
            }
        }
    }
    Some(b)
}

/// Every basic feasible solution of the region: each choice of `n` tight
/// rows among the constraints and the coordinate planes, kept when
/// feasible. Duplicate coefficient rows are merged first (the tighter bound
/// wins). Empty when the region is empty.
pub fn basic_feasible_solutions(cs: &ConstraintSet) -> Vec<Vec<Rational>> {
    let n = cs.network().user_total();
    let mut rows: Vec<(Vec<Rational>, Rational)> = Vec::new();
    for c in cs.constraints() {
        match rows.iter_mut().find(|(a, _)| *a == c.coefficients) {
            Some((_, b)) => *b = (*b).min(c.bound),
            None => rows.push((c.coefficients.clone(), c.bound)),
        }
    }
    let m = rows.len();
    for i in 0..n {
        let mut e = vec![Rational::ZERO; n];
        e[i] = -Rational::ONE;
        rows.push((e, Rational::ZERO));
    }
    let total = rows.len();
    let mut found = BTreeSet::new();
    let mut pick: Vec<usize> = (0..n).collect();
    loop {
        let a: Vec<Vec<Rational>> = pick.iter().map(|&i| rows[i].0.clone()).collect();
        let b: Vec<Rational> = pick.iter().map(|&i| rows[i].1).collect();
        if let Some(x) = solve(a, b) {
            let feasible = x.iter().all(|v| !v.is_negative())
                && rows[..m]
                    .iter()
                    .all(|(a, b)| a.iter().zip(&x).map(|(&p, &v)| p * v).sum::<Rational>() <= *b);
            if feasible {
                found.insert(x);
            }
        }
        // next n-subset in lexicographic order
        let mut i = n;
        loop {
            if i == 0 {
                return found.into_iter().collect();
            }
            i -= 1;
            if pick[i] < total - n + i {
                break;
            }
        }
        pick[i] += 1;
        for j in i + 1..n {
            pick[j] = pick[j - 1] + 1;
        }
    }
}

pub fn max_over(vertices: &[Vec<Rational>], w: &[Rational]) -> Option<Rational> {
    vertices
        .iter()
        .map(|x| w.iter().zip(x).map(|(&p, &v)| p * v).sum::<Rational>())
        .max()
}

/// Maximum of `w·d` over the region by basic-solution enumeration.
pub fn brute_force_max(cs: &ConstraintSet, w: &[Rational]) -> Option<Rational> {
    max_over(&basic_feasible_solutions(cs), w)
}
