//! GF(2^m) arithmetic with log/antilog tables, plus the two maps that make a
//! scalar network code binary-linear: the ring homomorphism from field
//! elements to m x m binary matrices, and the bijection between symbols and
//! length-m bit vectors.
//!
//! Elements are stored in the polynomial basis with little-endian bit order:
//! bit i of the value is the coefficient of x^i.

use crate::algebra::BitMatrix;
use crate::error::{Error, Result};
use rand::Rng;

/// Lexicographically smallest primitive polynomial per degree, encoded as an
/// (m+1)-bit mask with bit i = coefficient of x^i. Index 0 is unused.
pub const PRIMITIVE_POLYS: [u32; 17] = [
    0, 0b11, 0b111, 0b1011, 0b10011, 0b100101, 0b1000011, 0b10000011, 0b100011101, 0b1000010001,
    0b10000001001, 0b100000000101, 0b1000001010011, 0b10000000011011, 0b100000000101011,
    0b1000000000000011, 0b10000000000101101,
];

/// An element of GF(2^m), valid only with respect to a [`FieldContext`] of the
/// same degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(pub u16);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn value(self) -> u16 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Arithmetic context for GF(2^m), 1 <= m <= 16.
#[derive(Debug, Clone)]
pub struct FieldContext {
    m: u32,
    poly: u32,
    log: Vec<u16>,     // indexed by nonzero element value
    antilog: Vec<u16>, // antilog[i] = x^i, i in 0..2^m-1
}

impl FieldContext {
    /// Context with the canonical (lexicographically smallest) primitive
    /// polynomial for degree `m`.
    pub fn new(m: u32) -> Result<Self> {
        if !(1..=16).contains(&m) {
            return Err(Error::BadParams(format!("field degree m={m} out of range 1..=16")));
        }
        Self::with_polynomial(m, PRIMITIVE_POLYS[m as usize])
    }

    /// Context with an explicit degree-m polynomial. The table build walks the
    /// powers of x and fails unless x has multiplicative order 2^m - 1, which
    /// is exactly the primitivity requirement.
    pub fn with_polynomial(m: u32, poly: u32) -> Result<Self> {
        if !(1..=16).contains(&m) {
            return Err(Error::BadParams(format!("field degree m={m} out of range 1..=16")));
        }
        if poly >> m != 1 {
            return Err(Error::BadParams(format!("polynomial {poly:#b} does not have degree {m}")));
        }
        let q = 1usize << m;
        let mut log = vec![0u16; q];
        let mut antilog = vec![0u16; q - 1];
        let mut seen = vec![false; q];
        if m == 1 {
            // GF(2): the multiplicative group is trivial.
            if poly != 0b11 {
                return Err(Error::BadParams("degree-1 polynomial must be x+1".into()));
            }
            antilog[0] = 1;
            log[1] = 0;
            return Ok(FieldContext { m, poly, log, antilog });
        }
        let mut cur = 1u32;
        for i in 0..q - 1 {
            if cur == 1 && i > 0 {
                return Err(Error::BadParams(format!(
                    "polynomial {poly:#b} is not primitive (order of x is {i})"
                )));
            }
            if seen[cur as usize] {
                return Err(Error::BadParams(format!("polynomial {poly:#b} is not primitive")));
            }
            seen[cur as usize] = true;
            antilog[i] = cur as u16;
            log[cur as usize] = i as u16;
            cur <<= 1;
            if cur >> m == 1 {
                cur ^= poly;
            }
        }
        if cur != 1 {
            return Err(Error::BadParams(format!("polynomial {poly:#b} is reducible")));
        }
        Ok(FieldContext { m, poly, log, antilog })
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn polynomial(&self) -> u32 {
        self.poly
    }

    /// Field size 2^m.
    pub fn order(&self) -> usize {
        1 << self.m
    }

    pub fn element(&self, value: u16) -> Result<FieldElement> {
        if (value as usize) < self.order() {
            Ok(FieldElement(value))
        } else {
            Err(Error::BadParams(format!("value {value} not in GF(2^{})", self.m)))
        }
    }

    pub fn random_element(&self, rng: &mut impl Rng) -> FieldElement {
        FieldElement(rng.gen_range(0..self.order()) as u16)
    }

    /// x^i for 0 <= i < 2^m - 1.
    pub fn antilog(&self, i: usize) -> FieldElement {
        FieldElement(self.antilog[i % (self.order() - 1)])
    }

    pub fn log(&self, a: FieldElement) -> Result<usize> {
        if a.is_zero() {
            return Err(Error::BadParams("log of zero".into()));
        }
        Ok(self.log[a.0 as usize] as usize)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(a.0 ^ b.0)
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.is_zero() || b.is_zero() {
            return FieldElement::ZERO;
        }
        let n = self.order() - 1;
        let s = self.log[a.0 as usize] as usize + self.log[b.0 as usize] as usize;
        FieldElement(self.antilog[s % n])
    }

    pub fn inverse(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::BadParams("inverse of zero".into()));
        }
        let n = self.order() - 1;
        let l = self.log[a.0 as usize] as usize;
        Ok(FieldElement(self.antilog[(n - l) % n]))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inverse(b)?))
    }

    pub fn pow(&self, a: FieldElement, e: usize) -> FieldElement {
        if a.is_zero() {
            return if e == 0 { FieldElement::ONE } else { FieldElement::ZERO };
        }
        let n = self.order() - 1;
        let l = self.log[a.0 as usize] as usize;
        FieldElement(self.antilog[(l * (e % n)) % n])
    }

    /// The homomorphism GF(2^m) -> GF(2)^{m x m}: column j is the bit vector
    /// of a * x^j, so that the matrix applied to the bit vector of y gives the
    /// bit vector of a * y.
    pub fn element_to_matrix(&self, a: FieldElement) -> BitMatrix {
        let m = self.m as usize;
        let mut out = BitMatrix::zeros(m, m);
        for j in 0..m {
            let col = self.mul(a, FieldElement(1 << j));
            for r in 0..m {
                if (col.0 >> r) & 1 == 1 {
                    out.set(r, j, true);
                }
            }
        }
        out
    }

    /// The bijection symbol -> length-m bit vector (bit i = coefficient of x^i).
    pub fn symbol_to_bits(&self, a: FieldElement) -> Vec<bool> {
        (0..self.m as usize).map(|i| (a.0 >> i) & 1 == 1).collect()
    }

    /// Inverse bijection; rejects vectors whose length is not m.
    pub fn bits_to_symbol(&self, bits: &[bool]) -> Result<FieldElement> {
        if bits.len() != self.m as usize {
            return Err(Error::DimensionMismatch(format!(
                "bit vector of length {} for GF(2^{})",
                bits.len(),
                self.m
            )));
        }
        let mut v = 0u16;
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v |= 1 << i;
            }
        }
        Ok(FieldElement(v))
    }

    /// Expand a C x E matrix over the field into its Cm x Em binary form,
    /// replacing each entry by its m x m matrix image. This is the form for
    /// linear maps (transfer matrices, coding coefficients).
    pub fn matrix_to_binary(&self, entries: &[Vec<FieldElement>]) -> BitMatrix {
        let m = self.m as usize;
        let rows = entries.len();
        let cols = entries.first().map_or(0, |r| r.len());
        let mut out = BitMatrix::zeros(rows * m, cols * m);
        for (br, row) in entries.iter().enumerate() {
            for (bc, &a) in row.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let block = self.element_to_matrix(a);
                for r in 0..m {
                    for c in 0..m {
                        if block.get(r, c) {
                            out.set(br * m + r, bc * m + c, true);
                        }
                    }
                }
            }
        }
        out
    }

    /// Expand a k x n matrix of packet data into its km x n binary form,
    /// replacing each symbol by its m-bit column segment. This is the form
    /// for data (codewords, received matrices, generator rows): applying a
    /// coefficient-form map to it gives the data form of the field product.
    pub fn packets_to_binary(&self, packets: &[Vec<FieldElement>]) -> BitMatrix {
        let m = self.m as usize;
        let rows = packets.len();
        let cols = packets.first().map_or(0, |r| r.len());
        BitMatrix::from_fn(rows * m, cols, |r, c| (packets[r / m][c].0 >> (r % m)) & 1 == 1)
    }

    /// Rank of a field matrix by Gaussian elimination over GF(2^m).
    pub fn matrix_rank(&self, entries: &[Vec<FieldElement>]) -> usize {
        let rows = entries.len();
        let cols = entries.first().map_or(0, |r| r.len());
        let mut m: Vec<Vec<FieldElement>> = entries.to_vec();
        let mut rank = 0;
        for col in 0..cols {
            if rank == rows {
                break;
            }
            let Some(p) = (rank..rows).find(|&r| !m[r][col].is_zero()) else { continue };
            m.swap(rank, p);
            let inv = self.inverse(m[rank][col]).expect("nonzero pivot");
            for j in 0..cols {
                m[rank][j] = self.mul(m[rank][j], inv);
            }
            for r in 0..rows {
                if r != rank && !m[r][col].is_zero() {
                    let f = m[r][col];
                    for j in 0..cols {
                        let sub = self.mul(f, m[rank][j]);
                        m[r][j] = self.add(m[r][j], sub);
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

/// Schoolbook polynomial multiplication with explicit modular reduction.
/// Kept separate from the table-based path so tests can cross-check the two.
pub fn schoolbook_mul(m: u32, poly: u32, a: u16, b: u16) -> u16 {
    let mut prod = 0u32;
    let mut aa = a as u32;
    let mut bb = b as u32;
    while bb != 0 {
        if bb & 1 == 1 {
            prod ^= aa;
        }
        aa <<= 1;
        bb >>= 1;
    }
    // reduce modulo poly (degree m)
    for d in (m..32).rev() {
        if (prod >> d) & 1 == 1 {
            prod ^= poly << (d - m);
        }
    }
    prod as u16
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn all_shipped_polynomials_are_primitive() {
        for m in 1..=16 {
            let ctx = FieldContext::new(m).unwrap();
            assert_eq!(ctx.polynomial(), PRIMITIVE_POLYS[m as usize]);
            // antilog[log[x]] = x for all nonzero x
            for v in 1..ctx.order() as u16 {
                let l = ctx.log(FieldElement(v)).unwrap();
                assert_eq!(ctx.antilog(l), FieldElement(v));
            }
        }
    }

    #[test]
    fn non_primitive_polynomial_rejected() {
        // x^4 + x^3 + x^2 + x + 1 is irreducible but not primitive (order 5)
        assert!(FieldContext::with_polynomial(4, 0b11111).is_err());
        // x^4 + x^2 + 1 = (x^2+x+1)^2 is reducible
        assert!(FieldContext::with_polynomial(4, 0b10101).is_err());
    }

    #[test]
    fn mul_matches_schoolbook_oracle_small_fields() {
        for m in 1..=4u32 {
            let ctx = FieldContext::new(m).unwrap();
            for a in 0..ctx.order() as u16 {
                for b in 0..ctx.order() as u16 {
                    let expect = schoolbook_mul(m, ctx.polynomial(), a, b);
                    assert_eq!(ctx.mul(FieldElement(a), FieldElement(b)).0, expect, "m={m} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn alpha_squared_in_gf4() {
        // m=2, poly x^2+x+1: alpha * alpha = alpha + 1, i.e. 2*2 -> 3
        let ctx = FieldContext::new(2).unwrap();
        assert_eq!(ctx.mul(FieldElement(2), FieldElement(2)), FieldElement(3));
    }

    #[test]
    fn gf2_multiplication() {
        let ctx = FieldContext::new(1).unwrap();
        assert_eq!(ctx.mul(FieldElement(1), FieldElement(1)), FieldElement(1));
        assert_eq!(ctx.mul(FieldElement(1), FieldElement(0)), FieldElement(0));
    }

    #[test]
    fn mul_by_one_is_identity() {
        for m in [1, 3, 8] {
            let ctx = FieldContext::new(m).unwrap();
            for a in 0..ctx.order() as u16 {
                assert_eq!(ctx.mul(FieldElement(a), FieldElement::ONE), FieldElement(a));
            }
        }
    }

    #[test]
    fn inverse_law() {
        for m in [2, 5, 11] {
            let ctx = FieldContext::new(m).unwrap();
            for a in 1..ctx.order() as u16 {
                let inv = ctx.inverse(FieldElement(a)).unwrap();
                assert_eq!(ctx.mul(FieldElement(a), inv), FieldElement::ONE);
            }
        }
    }

    #[test]
    fn element_to_matrix_special_values() {
        let ctx = FieldContext::new(3).unwrap();
        assert!(ctx.element_to_matrix(FieldElement::ZERO).is_zero());
        assert_eq!(ctx.element_to_matrix(FieldElement::ONE), BitMatrix::identity(3));
    }

    #[test]
    fn matrix_action_matches_field_mul_gf4() {
        // matrix of alpha applied to the bit vector of alpha = bits of alpha+1,
        // and the same for all four elements.
        let ctx = FieldContext::new(2).unwrap();
        for a in 0..4u16 {
            let mat = ctx.element_to_matrix(FieldElement(a));
            for y in 0..4u16 {
                let bits = ctx.symbol_to_bits(FieldElement(y));
                let out = mat.mul_bits(&bits).unwrap();
                let expect = ctx.mul(FieldElement(a), FieldElement(y));
                assert_eq!(ctx.bits_to_symbol(&out).unwrap(), expect);
            }
        }
    }

    #[test]
    fn homomorphism_laws_exhaustive_small() {
        for m in 1..=4u32 {
            let ctx = FieldContext::new(m).unwrap();
            for a in 0..ctx.order() as u16 {
                for b in 0..ctx.order() as u16 {
                    let (fa, fb) = (FieldElement(a), FieldElement(b));
                    let prod = ctx.element_to_matrix(ctx.mul(fa, fb));
                    let composed = ctx.element_to_matrix(fa).mul(&ctx.element_to_matrix(fb)).unwrap();
                    assert_eq!(prod, composed);
                    let sum = ctx.element_to_matrix(ctx.add(fa, fb));
                    let added = ctx.element_to_matrix(fa).xor(&ctx.element_to_matrix(fb)).unwrap();
                    assert_eq!(sum, added);
                }
            }
        }
    }

    #[test]
    fn homomorphism_law_random_larger_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for m in 5..=8u32 {
            let ctx = FieldContext::new(m).unwrap();
            for _ in 0..10_000 {
                let a = ctx.random_element(&mut rng);
                let b = ctx.random_element(&mut rng);
                let prod = ctx.element_to_matrix(ctx.mul(a, b));
                let composed = ctx.element_to_matrix(a).mul(&ctx.element_to_matrix(b)).unwrap();
                assert_eq!(prod, composed, "m={m} a={:?} b={:?}", a, b);
            }
        }
    }

    #[test]
    fn symbol_bits_roundtrip_exhaustive() {
        for m in 1..=4u32 {
            let ctx = FieldContext::new(m).unwrap();
            for v in 0..ctx.order() as u16 {
                let bits = ctx.symbol_to_bits(FieldElement(v));
                assert_eq!(bits.len(), m as usize);
                assert_eq!(ctx.bits_to_symbol(&bits).unwrap(), FieldElement(v));
            }
        }
        // zero maps to the all-zero vector
        let ctx = FieldContext::new(4).unwrap();
        assert!(ctx.symbol_to_bits(FieldElement::ZERO).iter().all(|&b| !b));
    }

    #[test]
    fn bits_to_symbol_rejects_wrong_length() {
        let ctx = FieldContext::new(3).unwrap();
        assert!(ctx.bits_to_symbol(&[true; 4]).is_err());
    }

    #[test]
    fn addition_commutes_with_bit_map() {
        let ctx = FieldContext::new(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let a = ctx.random_element(&mut rng);
            let b = ctx.random_element(&mut rng);
            let sum_bits = ctx.symbol_to_bits(ctx.add(a, b));
            let xor_bits: Vec<bool> = ctx
                .symbol_to_bits(a)
                .iter()
                .zip(ctx.symbol_to_bits(b))
                .map(|(&x, y)| x ^ y)
                .collect();
            assert_eq!(sum_bits, xor_bits);
        }
    }
}
