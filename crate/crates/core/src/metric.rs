//! The transform distance between binary matrices with respect to a basis
//! matrix B: per column, the minimal number of columns of B that XOR to the
//! column difference (the coset-leader weight of the syndrome), summed over
//! columns. Computed exactly by a breadth-first search over the Cayley graph
//! of GF(2)^a generated by B's columns.

use crate::algebra::BitMatrix;
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::VecDeque;

const UNREACHABLE: u8 = u8::MAX;

/// Coset-leader weights of every syndrome in GF(2)^a with respect to the
/// columns of an a x c matrix B. Memory is 2^a bytes, so a is capped at 24.
#[derive(Debug, Clone)]
pub struct CosetLeaderTable {
    a: usize,
    columns: Vec<u32>,
    weights: Vec<u8>,
}

impl CosetLeaderTable {
    /// BFS from the zero syndrome using B's columns as generators.
    pub fn build(b: &BitMatrix) -> Result<Self> {
        let a = b.rows();
        if a == 0 || a > 24 {
            return Err(Error::CapExceeded(format!(
                "coset table needs 1 <= rows <= 24, got {a}"
            )));
        }
        let columns: Vec<u32> = (0..b.cols()).map(|c| b.col_mask(c) as u32).collect();
        let mut weights = vec![UNREACHABLE; 1usize << a];
        weights[0] = 0;
        let mut queue = VecDeque::new();
        queue.push_back(0u32);
        while let Some(s) = queue.pop_front() {
            let w = weights[s as usize];
            for &g in &columns {
                let t = s ^ g;
                if weights[t as usize] == UNREACHABLE {
                    weights[t as usize] = w + 1;
                    queue.push_back(t);
                }
            }
        }
        Ok(CosetLeaderTable { a, columns, weights })
    }

    pub fn syndrome_bits(&self) -> usize {
        self.a
    }

    pub fn generators(&self) -> &[u32] {
        &self.columns
    }

    /// Coset-leader weight of a syndrome; None when no subset of columns
    /// reaches it (B's columns do not span GF(2)^a).
    pub fn weight(&self, syndrome: u32) -> Option<u32> {
        match self.weights[syndrome as usize] {
            UNREACHABLE => None,
            w => Some(w as u32),
        }
    }

    /// True when every syndrome is reachable, i.e. B's columns span GF(2)^a.
    pub fn spans(&self) -> bool {
        self.weights.iter().all(|&w| w != UNREACHABLE)
    }

    /// Largest finite coset-leader weight.
    pub fn diameter(&self) -> u32 {
        self.weights
            .iter()
            .filter(|&&w| w != UNREACHABLE)
            .map(|&w| w as u32)
            .max()
            .unwrap_or(0)
    }

    /// Transform distance between two a x n matrices: the sum over columns of
    /// the coset-leader weight of the column XOR. None when any column
    /// syndrome is unreachable.
    pub fn transform_distance(&self, m1: &BitMatrix, m2: &BitMatrix) -> Result<Option<u64>> {
        if m1.rows() != self.a || m2.rows() != self.a || m1.cols() != m2.cols() {
            return Err(Error::DimensionMismatch(format!(
                "transform_distance {}x{} vs {}x{} over {}-bit syndromes",
                m1.rows(),
                m1.cols(),
                m2.rows(),
                m2.cols(),
                self.a
            )));
        }
        let mut total = 0u64;
        for c in 0..m1.cols() {
            let s = (m1.col_mask(c) ^ m2.col_mask(c)) as u32;
            match self.weight(s) {
                Some(w) => total += w as u64,
                None => return Ok(None),
            }
        }
        Ok(Some(total))
    }

    /// Distance given columns already packed little-endian (row 0 = bit 0).
    pub fn distance_packed(&self, cols1: &[u32], cols2: &[u32]) -> Option<u64> {
        debug_assert_eq!(cols1.len(), cols2.len());
        let mut total = 0u64;
        for (&a, &b) in cols1.iter().zip(cols2) {
            total += self.weight(a ^ b)? as u64;
        }
        Some(total)
    }
}

/// Outcome of a randomized metric-axiom check.
#[derive(Debug, Clone)]
pub struct AxiomReport {
    pub samples: usize,
    pub passed: bool,
    pub violation: Option<String>,
}

/// Check non-negativity, identity of indiscernibles, symmetry and the
/// triangle inequality on random matrix triples, returning the first
/// counterexample if any. Identity of indiscernibles is checked both on the
/// table (weight 0 only at syndrome 0) and on samples.
pub fn check_metric_axioms(
    table: &CosetLeaderTable,
    cols: usize,
    samples: usize,
    seed: u64,
) -> AxiomReport {
    // Table-level: weight(s) = 0 iff s = 0.
    for s in 1u32..(1 << table.syndrome_bits()) {
        if table.weight(s) == Some(0) {
            return AxiomReport {
                samples: 0,
                passed: false,
                violation: Some(format!("nonzero syndrome {s:#x} has weight 0")),
            };
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = table.syndrome_bits();
    let rand_mat = |rng: &mut ChaCha8Rng| BitMatrix::from_fn(a, cols, |_, _| rng.gen::<bool>());
    for i in 0..samples {
        let m1 = rand_mat(&mut rng);
        let m2 = rand_mat(&mut rng);
        let m3 = rand_mat(&mut rng);
        let d12 = table.transform_distance(&m1, &m2).unwrap();
        let d21 = table.transform_distance(&m2, &m1).unwrap();
        let d13 = table.transform_distance(&m1, &m3).unwrap();
        let d23 = table.transform_distance(&m2, &m3).unwrap();
        let (Some(d12), Some(d21), Some(d13), Some(d23)) = (d12, d21, d13, d23) else {
            return AxiomReport {
                samples: i,
                passed: false,
                violation: Some("infinite distance on sampled matrices".into()),
            };
        };
        if d12 != d21 {
            return AxiomReport {
                samples: i,
                passed: false,
                violation: Some(format!("symmetry violated: {d12} vs {d21}")),
            };
        }
        if (d12 == 0) != (m1 == m2) {
            return AxiomReport {
                samples: i,
                passed: false,
                violation: Some("identity of indiscernibles violated".into()),
            };
        }
        if d13 > d12 + d23 {
            return AxiomReport {
                samples: i,
                passed: false,
                violation: Some(format!("triangle violated: {d13} > {d12} + {d23}")),
            };
        }
    }
    AxiomReport { samples, passed: true, violation: None }
}

/// Exhaustive oracle: minimum cardinality of a subset of B's columns XORing
/// to the syndrome, by scanning all 2^c subsets. Test-support only; quadratic
/// blowup guarded by the column cap.
pub fn subset_search_weight(b: &BitMatrix, syndrome: u32) -> Option<u32> {
    assert!(b.cols() <= 20, "subset oracle capped at 20 columns");
    let cols: Vec<u32> = (0..b.cols()).map(|c| b.col_mask(c) as u32).collect();
    let mut best: Option<u32> = None;
    for subset in 0u32..(1 << cols.len()) {
        let mut acc = 0u32;
        for (i, &col) in cols.iter().enumerate() {
            if (subset >> i) & 1 == 1 {
                acc ^= col;
            }
        }
        if acc == syndrome {
            let k = subset.count_ones();
            best = Some(best.map_or(k, |b: u32| b.min(k)));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_generators_give_hamming_weight() {
        let table = CosetLeaderTable::build(&BitMatrix::identity(3)).unwrap();
        for s in 0u32..8 {
            assert_eq!(table.weight(s), Some(s.count_ones()));
        }
        assert!(table.spans());
    }

    #[test]
    fn third_column_alone_reaches_syndrome() {
        // B = [[1,0,1],[0,1,1]]: syndrome (1,1) = 0b11 needs only the third column
        let b = BitMatrix::from_rows(&[&[1, 0, 1], &[0, 1, 1]]);
        let table = CosetLeaderTable::build(&b).unwrap();
        assert_eq!(table.weight(0b11), Some(1));
        assert_eq!(table.weight(0), Some(0));
    }

    #[test]
    fn zero_column_changes_nothing() {
        let b = BitMatrix::from_rows(&[&[1, 0, 0], &[0, 1, 0]]);
        let b_short = BitMatrix::from_rows(&[&[1, 0], &[0, 1]]);
        let t1 = CosetLeaderTable::build(&b).unwrap();
        let t2 = CosetLeaderTable::build(&b_short).unwrap();
        for s in 0u32..4 {
            assert_eq!(t1.weight(s), t2.weight(s));
        }
    }

    #[test]
    fn weights_match_subset_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let a = rng.gen_range(2..=6);
            let c = rng.gen_range(a..=10);
            let b = BitMatrix::random(a, c, &mut rng);
            let table = CosetLeaderTable::build(&b).unwrap();
            for s in 0u32..(1 << a) {
                assert_eq!(table.weight(s), subset_search_weight(&b, s), "a={a} c={c} s={s}");
            }
        }
    }

    #[test]
    fn distance_zero_on_equal_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let b = BitMatrix::random(4, 7, &mut rng);
        let table = CosetLeaderTable::build(&b).unwrap();
        let m = BitMatrix::random(4, 5, &mut rng);
        assert_eq!(table.transform_distance(&m, &m).unwrap(), Some(0));
    }

    #[test]
    fn identity_basis_reduces_to_hamming_distance() {
        let table = CosetLeaderTable::build(&BitMatrix::identity(5)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let m1 = BitMatrix::random(5, 6, &mut rng);
            let m2 = BitMatrix::random(5, 6, &mut rng);
            let d = table.transform_distance(&m1, &m2).unwrap().unwrap();
            assert_eq!(d, m1.xor(&m2).unwrap().weight() as u64);
        }
    }

    #[test]
    fn translation_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let b = BitMatrix::random(4, 8, &mut rng);
        let table = CosetLeaderTable::build(&b).unwrap();
        for _ in 0..100 {
            let m1 = BitMatrix::random(4, 3, &mut rng);
            let m2 = BitMatrix::random(4, 3, &mut rng);
            let a = BitMatrix::random(4, 3, &mut rng);
            let d = table.transform_distance(&m1, &m2).unwrap();
            let dt = table
                .transform_distance(&m1.xor(&a).unwrap(), &m2.xor(&a).unwrap())
                .unwrap();
            assert_eq!(d, dt);
        }
    }

    #[test]
    fn non_spanning_basis_gives_infinite_distance() {
        // both columns lie in the even-weight subspace of GF(2)^2 x {0}
        let b = BitMatrix::from_rows(&[&[1, 1], &[1, 1], &[0, 0]]);
        let table = CosetLeaderTable::build(&b).unwrap();
        assert!(!table.spans());
        assert_eq!(table.weight(0b001), None);
        let m1 = BitMatrix::zeros(3, 1);
        let mut m2 = BitMatrix::zeros(3, 1);
        m2.set(0, 0, true);
        assert_eq!(table.transform_distance(&m1, &m2).unwrap(), None);
    }

    #[test]
    fn axioms_pass_on_spanning_basis() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        loop {
            let b = BitMatrix::random(5, 9, &mut rng);
            if b.rank() < 5 {
                continue;
            }
            let table = CosetLeaderTable::build(&b).unwrap();
            let report = check_metric_axioms(&table, 4, 10_000, 77);
            assert!(report.passed, "{:?}", report.violation);
            break;
        }
    }

    #[test]
    fn triangle_exhaustive_2x2_identity() {
        let table = CosetLeaderTable::build(&BitMatrix::identity(2)).unwrap();
        let mats: Vec<BitMatrix> = (0..16u64).map(|v| BitMatrix::unpack_cols(2, 2, v)).collect();
        for m1 in &mats {
            for m2 in &mats {
                for m3 in &mats {
                    let d13 = table.transform_distance(m1, m3).unwrap().unwrap();
                    let d12 = table.transform_distance(m1, m2).unwrap().unwrap();
                    let d23 = table.transform_distance(m2, m3).unwrap().unwrap();
                    assert!(d13 <= d12 + d23);
                }
            }
        }
    }

    #[test]
    fn oversized_table_rejected() {
        let b = BitMatrix::zeros(25, 3);
        assert!(CosetLeaderTable::build(&b).is_err());
    }
}
