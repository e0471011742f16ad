//! Worst-case noise patterns: Em x n bit matrices with a global weight budget.
//! Row block i (rows m*i .. m*(i+1)) holds the flips on the packet of edge i
//! in the global edge order.

use crate::algebra::BitMatrix;
use crate::error::{Error, Result};
use rand::seq::SliceRandom;
use rand::Rng;

/// Enumeration guard for the number of weight-<=budget patterns.
pub const ENUMERATION_CAP: u128 = 10_000_000;

#[derive(Debug, Clone)]
pub struct NoisePattern {
    z: BitMatrix,
    budget: usize,
}

impl NoisePattern {
    pub fn new(z: BitMatrix, budget: usize) -> Result<Self> {
        if z.weight() > budget {
            return Err(Error::BadParams(format!(
                "noise weight {} exceeds budget {budget}",
                z.weight()
            )));
        }
        Ok(NoisePattern { z, budget })
    }

    pub fn zero(em: usize, n: usize, budget: usize) -> Self {
        NoisePattern { z: BitMatrix::zeros(em, n), budget }
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.z
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn weight(&self) -> usize {
        self.z.weight()
    }
}

/// Number of Em*n-cell patterns of weight at most `budget`.
pub fn pattern_count(cells: usize, budget: usize) -> u128 {
    let mut total: u128 = 0;
    for w in 0..=budget.min(cells) {
        total = total.saturating_add(binomial(cells, w));
    }
    total
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Iterator over every noise pattern of weight <= budget on an Em x n grid,
/// in weight order then lexicographic position order. Cell index t maps to
/// (row, col) = (t / n, t % n).
pub struct NoiseIter {
    em: usize,
    n: usize,
    budget: usize,
    weight: usize,
    positions: Vec<usize>, // current combination, ascending; empty = Z 0
    done: bool,
    fresh_weight: bool,
}

pub fn enumerate_noise(budget: usize, em: usize, n: usize) -> Result<NoiseIter> {
    let cells = em * n;
    if budget > cells {
        return Err(Error::BadParams(format!("budget {budget} exceeds {cells} cells")));
    }
    let count = pattern_count(cells, budget);
    if count > ENUMERATION_CAP {
        return Err(Error::CapExceeded(format!(
            "{count} noise patterns exceed enumeration cap {ENUMERATION_CAP}"
        )));
    }
    Ok(NoiseIter { em, n, budget, weight: 0, positions: Vec::new(), done: false, fresh_weight: true })
}

impl NoiseIter {
    fn emit(&self) -> NoisePattern {
        let mut z = BitMatrix::zeros(self.em, self.n);
        for &t in &self.positions {
            z.set(t / self.n, t % self.n, true);
        }
        NoisePattern { z, budget: self.budget }
    }

    /// Advance `positions` to the next combination of the same weight.
    fn advance(&mut self) -> bool {
        let cells = self.em * self.n;
        let k = self.positions.len();
        let mut i = k;
        loop {
            if i == 0 {
                return false;
            }
            i -= 1;
            if self.positions[i] < cells - (k - i) {
                self.positions[i] += 1;
                for j in i + 1..k {
                    self.positions[j] = self.positions[j - 1] + 1;
                }
                return true;
            }
        }
    }
}

impl Iterator for NoiseIter {
    type Item = NoisePattern;

    fn next(&mut self) -> Option<NoisePattern> {
        if self.done {
            return None;
        }
        if self.fresh_weight {
            self.fresh_weight = false;
            return Some(self.emit());
        }
        if self.advance() {
            return Some(self.emit());
        }
        // move to the next weight
        loop {
            self.weight += 1;
            if self.weight > self.budget {
                self.done = true;
                return None;
            }
            if self.weight <= self.em * self.n {
                self.positions = (0..self.weight).collect();
                return Some(self.emit());
            }
        }
    }
}

/// All budget flips placed on one edge's row block, random positions.
pub fn concentrated_pattern(
    em: usize,
    n: usize,
    m: usize,
    budget: usize,
    rng: &mut impl Rng,
) -> NoisePattern {
    let edges = em / m;
    let edge = rng.gen_range(0..edges);
    let mut cells: Vec<(usize, usize)> = (0..m * n)
        .map(|t| (edge * m + t / n, t % n))
        .collect();
    cells.shuffle(rng);
    let mut z = BitMatrix::zeros(em, n);
    for &(r, c) in cells.iter().take(budget.min(m * n)) {
        z.set(r, c, true);
    }
    NoisePattern { z, budget }
}

/// Budget flips spread uniformly over the whole grid.
pub fn spread_pattern(em: usize, n: usize, budget: usize, rng: &mut impl Rng) -> NoisePattern {
    let mut cells: Vec<usize> = (0..em * n).collect();
    cells.shuffle(rng);
    let mut z = BitMatrix::zeros(em, n);
    for &t in cells.iter().take(budget.min(em * n)) {
        z.set(t / n, t % n, true);
    }
    NoisePattern { z, budget }
}
