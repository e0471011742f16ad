//! Reed-Solomon codes over GF(2^K) in evaluation form, with an
//! errors-and-erasures decoder: syndromes against the dual code, an erasure
//! locator seeding the key equation, Berlekamp-Massey for the error locator,
//! Chien search for its roots, and Forney's formula for the magnitudes.
//! Decoding is guaranteed exact whenever 2e + s < d = N - K + 1; a re-encode
//! consistency check flags anything beyond that it can detect.
//!
//! Evaluation points are the first N nonzero field elements in antilog
//! order (1, x, x^2, ...), recorded so encodings are reproducible.

use crate::algebra::{FieldContext, FieldElement};
use crate::error::{Error, Result};

/// A received outer symbol: a value, or an erasure mark.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsSymbol {
    Value(FieldElement),
    Erasure,
}

#[derive(Debug, Clone)]
pub struct RsCode {
    ctx: FieldContext,
    n: usize,
    k: usize,
    points: Vec<FieldElement>,
    /// Dual-code column multipliers 1 / prod_{j != i} (x_i - x_j), making
    /// sum_i c_i u_i x_i^t = 0 for every codeword and t < N - K.
    dual_mult: Vec<FieldElement>,
}

impl RsCode {
    pub fn new(ctx: FieldContext, n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::BadParams(format!("need 1 <= K <= N, got K={k} N={n}")));
        }
        if n >= ctx.order() {
            return Err(Error::BadParams(format!(
                "length {n} needs more than the {} nonzero elements of GF(2^{})",
                ctx.order() - 1,
                ctx.degree()
            )));
        }
        let points: Vec<FieldElement> = (0..n).map(|i| ctx.antilog(i)).collect();
        let mut dual_mult = Vec::with_capacity(n);
        for i in 0..n {
            let mut prod = FieldElement::ONE;
            for j in 0..n {
                if j != i {
                    prod = ctx.mul(prod, ctx.add(points[i], points[j]));
                }
            }
            dual_mult.push(ctx.inverse(prod)?);
        }
        Ok(RsCode { ctx, n, k, points, dual_mult })
    }

    pub fn length(&self) -> usize {
        self.n
    }

    pub fn dimension(&self) -> usize {
        self.k
    }

    /// Minimum distance N - K + 1 (MDS).
    pub fn distance(&self) -> usize {
        self.n - self.k + 1
    }

    pub fn ctx(&self) -> &FieldContext {
        &self.ctx
    }

    pub fn points(&self) -> &[FieldElement] {
        &self.points
    }

    /// Codeword (f(x_0), ..., f(x_{N-1})) of the message coefficients
    /// (f_0, ..., f_{K-1}).
    pub fn encode(&self, message: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if message.len() != self.k {
            return Err(Error::DimensionMismatch(format!(
                "message has {} symbols, expected {}",
                message.len(),
                self.k
            )));
        }
        Ok(self.points.iter().map(|&x| poly_eval(&self.ctx, message, x)).collect())
    }

    /// Errors-and-erasures decoding. Returns the message coefficients and the
    /// number of corrected (non-erasure) errors.
    pub fn decode(&self, received: &[RsSymbol]) -> Result<(Vec<FieldElement>, usize)> {
        if received.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "received {} symbols, expected {}",
                received.len(),
                self.n
            )));
        }
        let ctx = &self.ctx;
        let erasures: Vec<usize> = received
            .iter()
            .enumerate()
            .filter_map(|(i, s)| matches!(s, RsSymbol::Erasure).then_some(i))
            .collect();
        let s = erasures.len();
        let nsyn = self.n - self.k;
        if s > nsyn {
            return Err(Error::DecodeFailure(format!(
                "{s} erasures exceed the redundancy {nsyn}"
            )));
        }
        // erased positions are treated as zero; their "error" magnitude is
        // then the codeword value itself
        let filled: Vec<FieldElement> = received
            .iter()
            .map(|sym| match sym {
                RsSymbol::Value(v) => *v,
                RsSymbol::Erasure => FieldElement::ZERO,
            })
            .collect();

        let mut corrected = filled.clone();
        let mut n_errors = 0usize;
        if nsyn > 0 {
            // syndromes S_t = sum_i y_i u_i x_i^t
            let syndromes: Vec<FieldElement> = (0..nsyn)
                .map(|t| {
                    let mut acc = FieldElement::ZERO;
                    for i in 0..self.n {
                        let term = ctx.mul(ctx.mul(filled[i], self.dual_mult[i]), ctx.pow(self.points[i], t));
                        acc = ctx.add(acc, term);
                    }
                    acc
                })
                .collect();
            // erasure locator Gamma(z) = prod (1 - x_i z)
            let mut gamma = vec![FieldElement::ONE];
            for &i in &erasures {
                gamma = poly_mul(ctx, &gamma, &[FieldElement::ONE, self.points[i]]);
            }
            // modified syndromes xi = S * Gamma mod z^nsyn, shifted by s
            let xi = poly_mul_trunc(ctx, &syndromes, &gamma, nsyn);
            let sigma: Vec<FieldElement> = xi[s.min(xi.len())..].to_vec();
            let (lambda, l) = berlekamp_massey(ctx, &sigma);
            if poly_degree(&lambda) != Some(l) && l != 0 {
                return Err(Error::DecodeFailure("inconsistent error locator".into()));
            }
            if 2 * l > nsyn - s {
                return Err(Error::DecodeFailure(format!(
                    "{l} errors with {s} erasures exceed the decoding radius"
                )));
            }
            // full locator and evaluator
            let psi = poly_mul(ctx, &lambda, &gamma);
            let omega = poly_mul_trunc(ctx, &syndromes, &psi, nsyn);
            // roots of Lambda among non-erased positions
            let mut error_pos = Vec::new();
            for i in 0..self.n {
                if received[i] == RsSymbol::Erasure {
                    continue;
                }
                let xinv = ctx.inverse(self.points[i])?;
                if poly_eval(ctx, &lambda, xinv).is_zero() {
                    error_pos.push(i);
                }
            }
            if error_pos.len() != l {
                return Err(Error::DecodeFailure(format!(
                    "error locator has {} roots, expected {l}",
                    error_pos.len()
                )));
            }
            n_errors = l;
            // Forney: e-hat_i = x_i Omega(1/x_i) / Psi'(1/x_i), then undo the
            // dual multiplier
            let psi_deriv = poly_derivative(&psi);
            for &i in error_pos.iter().chain(&erasures) {
                let xinv = ctx.inverse(self.points[i])?;
                let num = poly_eval(ctx, &omega, xinv);
                let den = poly_eval(ctx, &psi_deriv, xinv);
                if den.is_zero() {
                    return Err(Error::DecodeFailure("repeated locator root".into()));
                }
                let ehat = ctx.mul(self.points[i], ctx.div(num, den)?);
                let e = ctx.div(ehat, self.dual_mult[i])?;
                corrected[i] = ctx.add(corrected[i], e);
            }
        }
        // interpolate the message through the first K corrected positions
        let message = self.interpolate(&corrected)?;
        // re-encode consistency check: catches miscorrections the syndromes
        // cannot see
        let reencoded = self.encode(&message)?;
        if reencoded != corrected {
            return Err(Error::DecodeFailure("re-encode consistency check failed".into()));
        }
        Ok((message, n_errors))
    }

    /// Coefficients of the degree-<K polynomial through the first K points.
    fn interpolate(&self, values: &[FieldElement]) -> Result<Vec<FieldElement>> {
        let ctx = &self.ctx;
        let k = self.k;
        // Lagrange: f = sum_i values[i] * prod_{j!=i} (z - x_j)/(x_i - x_j)
        let mut coeffs = vec![FieldElement::ZERO; k];
        for i in 0..k {
            if values[i].is_zero() {
                continue;
            }
            let mut basis = vec![FieldElement::ONE];
            let mut denom = FieldElement::ONE;
            for j in 0..k {
                if j == i {
                    continue;
                }
                basis = poly_mul(ctx, &basis, &[self.points[j], FieldElement::ONE]);
                denom = ctx.mul(denom, ctx.add(self.points[i], self.points[j]));
            }
            let scale = ctx.div(values[i], denom)?;
            for (c, b) in coeffs.iter_mut().zip(basis) {
                *c = ctx.add(*c, ctx.mul(scale, b));
            }
        }
        Ok(coeffs)
    }
}

// --- polynomial helpers (coefficient index = degree) ---

pub(crate) fn poly_eval(ctx: &FieldContext, poly: &[FieldElement], x: FieldElement) -> FieldElement {
    let mut acc = FieldElement::ZERO;
    for &c in poly.iter().rev() {
        acc = ctx.add(ctx.mul(acc, x), c);
    }
    acc
}

fn poly_mul(ctx: &FieldContext, a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    let mut out = vec![FieldElement::ZERO; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = ctx.add(out[i + j], ctx.mul(ai, bj));
        }
    }
    out
}

fn poly_mul_trunc(
    ctx: &FieldContext,
    a: &[FieldElement],
    b: &[FieldElement],
    len: usize,
) -> Vec<FieldElement> {
    let mut out = vec![FieldElement::ZERO; len];
    for (i, &ai) in a.iter().enumerate().take(len) {
        if ai.is_zero() {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            if i + j >= len {
                break;
            }
            out[i + j] = ctx.add(out[i + j], ctx.mul(ai, bj));
        }
    }
    out
}

/// Characteristic-2 formal derivative: odd-degree coefficients shift down.
fn poly_derivative(poly: &[FieldElement]) -> Vec<FieldElement> {
    if poly.len() <= 1 {
        return vec![FieldElement::ZERO];
    }
    let mut out = vec![FieldElement::ZERO; poly.len() - 1];
    for (j, slot) in out.iter_mut().enumerate() {
        if j % 2 == 0 {
            *slot = poly[j + 1];
        }
    }
    out
}

fn poly_degree(poly: &[FieldElement]) -> Option<usize> {
    poly.iter().rposition(|c| !c.is_zero())
}

/// Minimal LFSR synthesis: the connection polynomial of the shortest
/// recurrence generating `sigma`, and its register length.
fn berlekamp_massey(ctx: &FieldContext, sigma: &[FieldElement]) -> (Vec<FieldElement>, usize) {
    let mut lambda = vec![FieldElement::ONE];
    let mut prev = vec![FieldElement::ONE];
    let mut l = 0usize;
    let mut shift = 1usize;
    let mut prev_delta = FieldElement::ONE;
    for r in 0..sigma.len() {
        let mut delta = FieldElement::ZERO;
        for j in 0..=l.min(r) {
            if j < lambda.len() {
                delta = ctx.add(delta, ctx.mul(lambda[j], sigma[r - j]));
            }
        }
        if delta.is_zero() {
            shift += 1;
            continue;
        }
        // lambda' = lambda - (delta/prev_delta) z^shift prev
        let scale = ctx.div(delta, prev_delta).expect("prev_delta nonzero");
        let mut next = lambda.clone();
        if next.len() < prev.len() + shift {
            next.resize(prev.len() + shift, FieldElement::ZERO);
        }
        for (j, &p) in prev.iter().enumerate() {
            let idx = j + shift;
            next[idx] = ctx.add(next[idx], ctx.mul(scale, p));
        }
        if 2 * l <= r {
            prev = lambda;
            prev_delta = delta;
            l = r + 1 - l;
            shift = 1;
        } else {
            shift += 1;
        }
        lambda = next;
    }
    (lambda, l)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf16_code(n: usize, k: usize) -> RsCode {
        RsCode::new(FieldContext::new(4).unwrap(), n, k).unwrap()
    }

    fn fe(v: u16) -> FieldElement {
        FieldElement(v)
    }

    #[test]
    fn clean_roundtrip() {
        let rs = gf16_code(6, 2);
        for msg in [[fe(0), fe(0)], [fe(1), fe(7)], [fe(15), fe(3)]] {
            let cw = rs.encode(&msg).unwrap();
            let recv: Vec<RsSymbol> = cw.iter().map(|&v| RsSymbol::Value(v)).collect();
            let (decoded, e) = rs.decode(&recv).unwrap();
            assert_eq!(decoded, msg.to_vec());
            assert_eq!(e, 0);
        }
    }

    #[test]
    fn erasure_only_recovery_matches_interpolation_oracle() {
        // s = d - 1 erasures, zero errors: MDS recovery from the K survivors
        let rs = gf16_code(6, 2);
        let msg = [fe(9), fe(4)];
        let cw = rs.encode(&msg).unwrap();
        // erase positions 0..4 (4 = d - 1 erasures), keep 2 survivors
        let mut recv: Vec<RsSymbol> = cw.iter().map(|&v| RsSymbol::Value(v)).collect();
        for i in 0..4 {
            recv[i] = RsSymbol::Erasure;
        }
        let (decoded, e) = rs.decode(&recv).unwrap();
        assert_eq!(decoded, msg.to_vec());
        assert_eq!(e, 0);
        // independent oracle: solve the 2x2 interpolation through survivors
        let ctx = rs.ctx().clone();
        let (x4, x5) = (rs.points()[4], rs.points()[5]);
        // f(x) = f0 + f1 x: f1 = (y4 - y5)/(x4 - x5), f0 = y4 - f1 x4
        let f1 = ctx.div(ctx.add(cw[4], cw[5]), ctx.add(x4, x5)).unwrap();
        let f0 = ctx.add(cw[4], ctx.mul(f1, x4));
        assert_eq!(decoded, vec![f0, f1]);
    }

    #[test]
    fn single_error_all_positions_and_values() {
        let rs = gf16_code(6, 2);
        let msg = [fe(11), fe(2)];
        let cw = rs.encode(&msg).unwrap();
        for pos in 0..6 {
            for val in 1..16u16 {
                let mut recv: Vec<RsSymbol> = cw.iter().map(|&v| RsSymbol::Value(v)).collect();
                recv[pos] = RsSymbol::Value(fe(cw[pos].0 ^ val));
                let (decoded, e) = rs.decode(&recv).unwrap();
                assert_eq!(decoded, msg.to_vec(), "pos={pos} val={val}");
                assert_eq!(e, 1);
            }
        }
    }

    #[test]
    fn two_errors_correctable_when_within_radius() {
        // d = 5: e = 2, s = 0 has 2e + s = 4 < 5
        let rs = gf16_code(6, 2);
        let msg = [fe(5), fe(12)];
        let cw = rs.encode(&msg).unwrap();
        for p1 in 0..6 {
            for p2 in (p1 + 1)..6 {
                let mut recv: Vec<RsSymbol> = cw.iter().map(|&v| RsSymbol::Value(v)).collect();
                recv[p1] = RsSymbol::Value(fe(cw[p1].0 ^ 3));
                recv[p2] = RsSymbol::Value(fe(cw[p2].0 ^ 9));
                let (decoded, e) = rs.decode(&recv).unwrap();
                assert_eq!(decoded, msg.to_vec());
                assert_eq!(e, 2);
            }
        }
    }

    #[test]
    fn beyond_radius_fails_or_miscorrects_detectably() {
        // three errors on a d=5 code: 2e+s = 6 > 4; the decoder must not
        // return the transmitted message as if nothing happened
        let rs = gf16_code(6, 2);
        let msg = [fe(5), fe(12)];
        let cw = rs.encode(&msg).unwrap();
        let mut recv: Vec<RsSymbol> = cw.iter().map(|&v| RsSymbol::Value(v)).collect();
        for i in 0..3 {
            recv[i] = RsSymbol::Value(fe(cw[i].0 ^ (i as u16 + 1)));
        }
        match rs.decode(&recv) {
            Err(_) => {}
            Ok((decoded, _)) => assert_ne!(decoded, msg.to_vec()),
        }
    }

    #[test]
    fn too_many_erasures_rejected() {
        let rs = gf16_code(6, 2);
        let cw = rs.encode(&[fe(1), fe(1)]).unwrap();
        let mut recv: Vec<RsSymbol> = cw.iter().map(|&v| RsSymbol::Value(v)).collect();
        for i in 0..5 {
            recv[i] = RsSymbol::Erasure;
        }
        assert!(rs.decode(&recv).is_err());
    }

    #[test]
    fn full_rate_code_roundtrips() {
        // N = K: no redundancy, decoding is bare interpolation
        let rs = gf16_code(4, 4);
        let msg = [fe(3), fe(0), fe(8), fe(1)];
        let cw = rs.encode(&msg).unwrap();
        let recv: Vec<RsSymbol> = cw.iter().map(|&v| RsSymbol::Value(v)).collect();
        let (decoded, _) = rs.decode(&recv).unwrap();
        assert_eq!(decoded, msg.to_vec());
    }

    #[test]
    fn length_cap_enforced() {
        assert!(RsCode::new(FieldContext::new(2).unwrap(), 4, 2).is_err());
        assert!(RsCode::new(FieldContext::new(2).unwrap(), 3, 2).is_ok());
    }
}
