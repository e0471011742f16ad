//! Random linear network coding over a validated topology: derive the
//! transfer matrix T and impulse response matrix T-hat by walking edges in
//! topological order, certify the every-CxC-submatrix-invertible property,
//! and realize the worst-case binary-error channel Y = T X + T-hat Z.

mod noise;
mod topology;

pub use noise::{
    binomial, concentrated_pattern, enumerate_noise, pattern_count, spread_pattern, NoiseIter,
    NoisePattern, ENUMERATION_CAP,
};
pub use topology::{Edge, RepairPolicy, Topology};

use crate::algebra::{BitMatrix, FieldContext, FieldElement};
use crate::error::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

/// Guard on the number of CxC column subsets examined by certification.
pub const CERTIFY_CAP: u128 = 1_000_000;

/// Local coding coefficients: one field element per adjacent (incoming,
/// outgoing) edge pair at each internal node. Source edges carry message rows
/// directly and have no coefficients.
#[derive(Debug, Clone)]
pub struct NetworkCode {
    pub m: u32,
    coefficients: HashMap<(usize, usize), FieldElement>,
}

impl NetworkCode {
    pub fn new(m: u32) -> Self {
        NetworkCode { m, coefficients: HashMap::new() }
    }

    pub fn set(&mut self, incoming: usize, outgoing: usize, f: FieldElement) {
        self.coefficients.insert((incoming, outgoing), f);
    }

    pub fn get(&self, incoming: usize, outgoing: usize) -> Option<FieldElement> {
        self.coefficients.get(&(incoming, outgoing)).copied()
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }
}

/// Draw every coefficient i.i.d. uniform over GF(2^m) from a seeded ChaCha8
/// stream; iteration order is the global edge order, so the draw is
/// deterministic given (topology, m, seed).
pub fn randomize_code(topology: &Topology, ctx: &FieldContext, seed: u64) -> NetworkCode {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut code = NetworkCode::new(ctx.degree());
    for (e_idx, e) in topology.edges().iter().enumerate() {
        if e.tail == topology.source() {
            continue;
        }
        for &inc in topology.in_edges(e.tail) {
            code.set(inc, e_idx, ctx.random_element(&mut rng));
        }
    }
    code
}

/// A derived network instance: the field forms of T (C x C) and T-hat (C x E)
/// plus their binary expansions, immutable after derivation.
#[derive(Debug, Clone)]
pub struct NetworkInstance {
    topology: Topology,
    ctx: FieldContext,
    code: NetworkCode,
    t_field: Vec<Vec<FieldElement>>,
    t_hat_field: Vec<Vec<FieldElement>>,
    t_bin: BitMatrix,
    t_hat_bin: BitMatrix,
    mds_certified: Option<bool>,
}

/// Propagate message and noise transforms along edges in topological order.
///
/// Each edge's packet is the coefficient-weighted sum of its tail's incoming
/// packets, plus the noise injected on the edge itself; source edges carry
/// message rows directly. T picks up the message part, T-hat the per-edge
/// injections, and T equals the source-edge column subset of T-hat.
pub fn derive_transfer_matrices(
    topology: &Topology,
    ctx: &FieldContext,
    code: &NetworkCode,
) -> Result<NetworkInstance> {
    if code.m != ctx.degree() {
        return Err(Error::BadParams(format!(
            "code over GF(2^{}) does not match context GF(2^{})",
            code.m,
            ctx.degree()
        )));
    }
    let c = topology.mincut();
    let e_cnt = topology.edge_count();
    // per edge: transfer from the C message rows and from the E injections
    let mut msg_part: Vec<Vec<FieldElement>> = vec![vec![FieldElement::ZERO; c]; e_cnt];
    let mut noise_part: Vec<Vec<FieldElement>> = vec![vec![FieldElement::ZERO; e_cnt]; e_cnt];
    for (e_idx, edge) in topology.edges().iter().enumerate() {
        if edge.tail == topology.source() {
            let k = topology
                .source_edges()
                .iter()
                .position(|&s| s == e_idx)
                .expect("source edge index");
            msg_part[e_idx][k] = FieldElement::ONE;
        } else {
            for &inc in topology.in_edges(edge.tail) {
                debug_assert!(inc < e_idx, "edges must arrive in topological order");
                let f = code
                    .get(inc, e_idx)
                    .ok_or_else(|| Error::BadParams(format!("missing coefficient {inc} -> {e_idx}")))?;
                if f.is_zero() {
                    continue;
                }
                for k in 0..c {
                    let add = ctx.mul(f, msg_part[inc][k]);
                    msg_part[e_idx][k] = ctx.add(msg_part[e_idx][k], add);
                }
                for j in 0..e_cnt {
                    let add = ctx.mul(f, noise_part[inc][j]);
                    noise_part[e_idx][j] = ctx.add(noise_part[e_idx][j], add);
                }
            }
        }
        // the edge's own injection
        noise_part[e_idx][e_idx] = ctx.add(noise_part[e_idx][e_idx], FieldElement::ONE);
    }
    let t_field: Vec<Vec<FieldElement>> =
        topology.sink_edges().iter().map(|&s| msg_part[s].clone()).collect();
    let t_hat_field: Vec<Vec<FieldElement>> =
        topology.sink_edges().iter().map(|&s| noise_part[s].clone()).collect();
    let t_bin = ctx.matrix_to_binary(&t_field);
    let t_hat_bin = ctx.matrix_to_binary(&t_hat_field);
    Ok(NetworkInstance {
        topology: topology.clone(),
        ctx: ctx.clone(),
        code: code.clone(),
        t_field,
        t_hat_field,
        t_bin,
        t_hat_bin,
        mds_certified: None,
    })
}

impl NetworkInstance {
    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn ctx(&self) -> &FieldContext {
        &self.ctx
    }

    pub fn code(&self) -> &NetworkCode {
        &self.code
    }

    pub fn mincut(&self) -> usize {
        self.topology.mincut()
    }

    pub fn edge_count(&self) -> usize {
        self.topology.edge_count()
    }

    pub fn m(&self) -> usize {
        self.ctx.degree() as usize
    }

    /// Transfer matrix over the field, C x C.
    pub fn t_field(&self) -> &[Vec<FieldElement>] {
        &self.t_field
    }

    /// Impulse response matrix over the field, C x E.
    pub fn t_hat_field(&self) -> &[Vec<FieldElement>] {
        &self.t_hat_field
    }

    /// Binary transfer matrix, Cm x Cm.
    pub fn t_bin(&self) -> &BitMatrix {
        &self.t_bin
    }

    /// Binary impulse response matrix, Cm x Em.
    pub fn t_hat_bin(&self) -> &BitMatrix {
        &self.t_hat_bin
    }

    pub fn mds_certified(&self) -> Option<bool> {
        self.mds_certified
    }

    /// T viewed over the field is invertible iff its binary form is.
    pub fn t_invertible(&self) -> bool {
        self.t_bin.rank() == self.t_bin.rows()
    }

    /// Full row rank of the binary impulse response (columns span GF(2)^{Cm});
    /// weaker than the MDS certificate but all the transform metric needs to
    /// stay finite.
    pub fn t_hat_full_row_rank(&self) -> bool {
        self.t_hat_bin.rank() == self.t_hat_bin.rows()
    }

    /// Check that every C x C submatrix of T-hat over GF(2^m) is invertible.
    /// Iterates all C(E, C) column subsets; guarded against blow-up.
    pub fn certify_mds(&mut self) -> Result<bool> {
        let c = self.mincut();
        let e = self.edge_count();
        if binomial(e, c) > CERTIFY_CAP {
            return Err(Error::CapExceeded(format!(
                "C({e},{c}) column subsets exceed certification cap {CERTIFY_CAP}"
            )));
        }
        let ok = every_square_submatrix_invertible(&self.ctx, &self.t_hat_field);
        self.mds_certified = Some(ok);
        Ok(ok)
    }

    /// The channel map Y = T X + T-hat Z over GF(2).
    pub fn transmit(&self, x: &BitMatrix, noise: &NoisePattern) -> Result<BitMatrix> {
        let cm = self.mincut() * self.m();
        let em = self.edge_count() * self.m();
        if x.rows() != cm {
            return Err(Error::DimensionMismatch(format!(
                "codeword has {} rows, expected {cm}",
                x.rows()
            )));
        }
        let z = noise.matrix();
        if z.rows() != em || z.cols() != x.cols() {
            return Err(Error::DimensionMismatch(format!(
                "noise is {}x{}, expected {em}x{}",
                z.rows(),
                z.cols(),
                x.cols()
            )));
        }
        let mut y = self.t_bin.mul(x)?;
        y.xor_assign(&self.t_hat_bin.mul(z)?)?;
        Ok(y)
    }
}

/// Invertibility of every square column-subset of a C x E field matrix.
pub fn every_square_submatrix_invertible(ctx: &FieldContext, mat: &[Vec<FieldElement>]) -> bool {
    let c = mat.len();
    let e = mat.first().map_or(0, |r| r.len());
    if e < c {
        return false;
    }
    let mut subset: Vec<usize> = (0..c).collect();
    loop {
        let sub: Vec<Vec<FieldElement>> =
            (0..c).map(|r| subset.iter().map(|&j| mat[r][j]).collect()).collect();
        if !field_matrix_invertible(ctx, sub) {
            return false;
        }
        // next C-combination of 0..e
        let mut i = c;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            if subset[i] < e - (c - i) {
                subset[i] += 1;
                for j in i + 1..c {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn field_matrix_invertible(ctx: &FieldContext, mut m: Vec<Vec<FieldElement>>) -> bool {
    let n = m.len();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return false;
        };
        m.swap(col, p);
        let inv = ctx.inverse(m[col][col]).expect("nonzero pivot");
        for j in 0..n {
            m[col][j] = ctx.mul(m[col][j], inv);
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col];
                for j in 0..n {
                    let sub = ctx.mul(f, m[col][j]);
                    m[r][j] = ctx.add(m[r][j], sub);
                }
            }
        }
    }
    true
}

/// Solve T-hat_field * x = y over the field (any solution), used by tests.
pub fn field_solve(
    ctx: &FieldContext,
    mat: &[Vec<FieldElement>],
    y: &[FieldElement],
) -> Option<Vec<FieldElement>> {
    let rows = mat.len();
    let cols = mat.first().map_or(0, |r| r.len());
    let mut a: Vec<Vec<FieldElement>> = mat.to_vec();
    let mut rhs = y.to_vec();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let Some(p) = (row..rows).find(|&r| !a[r][col].is_zero()) else { continue };
        a.swap(row, p);
        rhs.swap(row, p);
        let inv = ctx.inverse(a[row][col]).unwrap();
        for j in 0..cols {
            a[row][j] = ctx.mul(a[row][j], inv);
        }
        rhs[row] = ctx.mul(rhs[row], inv);
        for r in 0..rows {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col];
                for j in 0..cols {
                    let sub = ctx.mul(f, a[row][j]);
                    a[r][j] = ctx.add(a[r][j], sub);
                }
                let sub = ctx.mul(f, rhs[row]);
                rhs[r] = ctx.add(rhs[r], sub);
            }
        }
        pivots.push((row, col));
        row += 1;
    }
    for r in row..rows {
        if !rhs[r].is_zero() {
            return None;
        }
    }
    let mut x = vec![FieldElement::ZERO; cols];
    for &(r, c) in &pivots {
        x[c] = rhs[r];
    }
    Some(x)
}
