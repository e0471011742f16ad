//! Concatenated codes: a Reed-Solomon outer code over a large extension
//! field, a shared GV-type inner codebook per chunk, the natural two-stage
//! decoder, and a generalized minimum distance decoder that converts
//! low-confidence inner decisions into outer erasures (randomly, with
//! probability 2 w_i / d_in, or by a deterministic threshold sweep).

mod rs;

pub use rs::{RsCode, RsSymbol};

use crate::algebra::{BitMatrix, FieldContext, FieldElement};
use crate::error::{Error, Result};
use crate::gvcodes::{gv_construct_coherent, Codebook, TransferMember};
use crate::network::NetworkInstance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Geometry of a concatenation: n = n_out * b columns, each chunk carrying
/// one outer symbol of K_in = Cm * w bits through the inner codebook.
#[derive(Debug, Clone, Copy)]
pub struct ConcatParams {
    /// Columns per inner block.
    pub b: usize,
    /// Message columns per chunk; the outer symbol field is GF(2^{Cm*w}).
    pub w: usize,
    /// Outer code length (number of chunks).
    pub n_out: usize,
    /// Outer code dimension.
    pub k_out: usize,
}

impl ConcatParams {
    pub fn n(&self) -> usize {
        self.n_out * self.b
    }

    pub fn d_out(&self) -> usize {
        self.n_out - self.k_out + 1
    }
}

/// A fully built concatenated code over one network instance.
pub struct ConcatCode {
    pub params: ConcatParams,
    pub rs: RsCode,
    /// Inner codebook restricted to the first 2^{K_in} codewords.
    pub inner: Codebook,
    /// Exact minimum transformed distance of the restricted inner book.
    pub d_in: u64,
    member: TransferMember,
    cm: usize,
    /// transformed inner codewords, packed columns
    inner_tx: Vec<Vec<u32>>,
}

/// Outcome of a GMD decode.
#[derive(Debug, Clone)]
pub struct GmdOutcome {
    pub message: BitMatrix,
    /// Step-1 inner decisions per chunk.
    pub inner_choices: Vec<u64>,
    /// Which chunks were erased before outer decoding.
    pub erased: Vec<bool>,
    /// Errors corrected by the outer decoder.
    pub outer_errors: usize,
}

#[derive(Debug, Clone, Copy)]
pub enum GmdMode {
    /// Erase chunk i with probability 2 w_i / d_in from a seeded stream.
    Randomized { seed: u64 },
    /// Try every threshold erasure set (none, then each distinct positive
    /// confidence level) and accept the first candidate whose re-encoding
    /// lies within half the design distance of the received matrix.
    Sweep,
}

impl ConcatCode {
    /// Construct the shared inner codebook on the instance (greedy, width b,
    /// inner error fraction p_inner), restrict it to a power-of-two size
    /// aligned to whole message columns, and attach the RS outer code.
    /// `w_max` caps the message columns per chunk (inner rate w/b); without
    /// it the largest width the constructed codebook supports is used.
    pub fn build(
        instance: &NetworkInstance,
        b: usize,
        n_out: usize,
        k_out: usize,
        p_inner: f64,
        w_max: Option<usize>,
        seed: u64,
    ) -> Result<Self> {
        let cm = instance.mincut() * instance.m();
        let mut inner = gv_construct_coherent(instance, p_inner, b, seed)?;
        let bits = (inner.codewords.len() as f64).log2().floor() as usize;
        let w = (bits / cm).min(w_max.unwrap_or(usize::MAX));
        if w == 0 {
            return Err(Error::BadParams(format!(
                "inner codebook of size {} cannot carry a whole Cm-bit message column",
                inner.codewords.len()
            )));
        }
        let k_in = cm * w;
        if k_in > 16 {
            return Err(Error::CapExceeded(format!(
                "outer symbol field GF(2^{k_in}) is past the 2^16 table cap"
            )));
        }
        inner.codewords.truncate(1 << k_in);
        let member = TransferMember::from_instance(instance)?;
        let inner_tx: Vec<Vec<u32>> = inner
            .codewords
            .iter()
            .map(|x| {
                let tx = member.t_bin.mul(x)?;
                Ok((0..b).map(|i| tx.col_mask(i) as u32).collect())
            })
            .collect::<Result<_>>()?;
        // exact minimum transformed distance of the restricted book
        let mut d_in = u64::MAX;
        for i in 0..inner_tx.len() {
            for j in i + 1..inner_tx.len() {
                let d = member
                    .table
                    .distance_packed(&inner_tx[i], &inner_tx[j])
                    .ok_or_else(|| Error::CertificationFailure("infinite inner distance".into()))?;
                d_in = d_in.min(d);
            }
        }
        if d_in < inner.design_distance {
            return Err(Error::CertificationFailure(format!(
                "inner distance {d_in} below design {}",
                inner.design_distance
            )));
        }
        let rs = RsCode::new(FieldContext::new(k_in as u32)?, n_out, k_out)?;
        let params = ConcatParams { b, w, n_out, k_out };
        Ok(ConcatCode { params, rs, inner, d_in, member, cm, inner_tx })
    }

    /// Message shape: Cm rows, w * k_out columns.
    pub fn message_dims(&self) -> (usize, usize) {
        (self.cm, self.params.w * self.params.k_out)
    }

    pub fn codeword_dims(&self) -> (usize, usize) {
        (self.cm, self.params.n())
    }

    /// Overall rate R_out * R_in.
    pub fn rate(&self) -> f64 {
        let (rows, cols) = self.message_dims();
        (rows * cols) as f64 / (self.cm * self.params.n()) as f64
    }

    fn chunk_to_symbol(&self, mat: &BitMatrix, col_lo: usize) -> FieldElement {
        // column-major, little-endian: bit index = col * Cm + row
        let mut v = 0u16;
        let mut t = 0;
        for c in 0..self.params.w {
            for r in 0..self.cm {
                if mat.get(r, col_lo + c) {
                    v |= 1 << t;
                }
                t += 1;
            }
        }
        FieldElement(v)
    }

    fn symbol_to_chunk(&self, sym: FieldElement, mat: &mut BitMatrix, col_lo: usize) {
        let mut t = 0;
        for c in 0..self.params.w {
            for r in 0..self.cm {
                mat.set(r, col_lo + c, (sym.0 >> t) & 1 == 1);
                t += 1;
            }
        }
    }

    /// Chunk message columns into outer symbols, RS-encode, then emit the
    /// inner codeword of each outer symbol.
    pub fn encode(&self, message: &BitMatrix) -> Result<BitMatrix> {
        let (rows, cols) = self.message_dims();
        if message.rows() != rows || message.cols() != cols {
            return Err(Error::DimensionMismatch(format!(
                "message is {}x{}, expected {rows}x{cols}",
                message.rows(),
                message.cols()
            )));
        }
        let symbols: Vec<FieldElement> =
            (0..self.params.k_out).map(|j| self.chunk_to_symbol(message, j * self.params.w)).collect();
        let outer = self.rs.encode(&symbols)?;
        let mut out = BitMatrix::zeros(self.cm, self.params.n());
        for (j, sym) in outer.iter().enumerate() {
            let inner_cw = &self.inner.codewords[sym.0 as usize];
            for c in 0..self.params.b {
                for r in 0..self.cm {
                    if inner_cw.get(r, c) {
                        out.set(r, j * self.params.b + c, true);
                    }
                }
            }
        }
        Ok(out)
    }

    fn outer_symbols_to_message(&self, symbols: &[FieldElement]) -> BitMatrix {
        let (rows, cols) = self.message_dims();
        let mut msg = BitMatrix::zeros(rows, cols);
        for (j, &sym) in symbols.iter().enumerate() {
            self.symbol_to_chunk(sym, &mut msg, j * self.params.w);
        }
        msg
    }

    /// Minimum-transform-distance inner decode of one chunk, against the
    /// transformed inner codewords. Ties resolve to the lowest index; a
    /// wrong pick simply becomes an outer error.
    fn inner_decode(&self, y_cols: &[u32]) -> (u64, u64) {
        let mut best_v = 0u64;
        let mut best_d = u64::MAX;
        for (v, tx) in self.inner_tx.iter().enumerate() {
            if let Some(d) = self.member.table.distance_packed(tx, y_cols) {
                if d < best_d {
                    best_d = d;
                    best_v = v as u64;
                }
            }
        }
        (best_v, best_d)
    }

    fn chunk_cols(&self, y: &BitMatrix, j: usize) -> Vec<u32> {
        (0..self.params.b).map(|c| y.col_mask(j * self.params.b + c) as u32).collect()
    }

    fn check_dims(&self, y: &BitMatrix) -> Result<()> {
        if y.rows() != self.cm || y.cols() != self.params.n() {
            return Err(Error::DimensionMismatch(format!(
                "received matrix is {}x{}, expected {}x{}",
                y.rows(),
                y.cols(),
                self.cm,
                self.params.n()
            )));
        }
        Ok(())
    }

    /// Inner-decode every chunk, then errors-only outer decoding. Corrects
    /// any noise of transform weight below d_out * d_in / 4.
    pub fn natural_decode(&self, y: &BitMatrix) -> Result<BitMatrix> {
        self.check_dims(y)?;
        let received: Vec<RsSymbol> = (0..self.params.n_out)
            .map(|j| {
                let (v, _) = self.inner_decode(&self.chunk_cols(y, j));
                RsSymbol::Value(FieldElement(v as u16))
            })
            .collect();
        let (symbols, _) = self.rs.decode(&received)?;
        Ok(self.outer_symbols_to_message(&symbols))
    }

    /// Step 1 of GMD: per chunk, the inner decision and the doubled
    /// confidence 2 w_i = min(2 dist_i, d_in), kept doubled so everything
    /// stays in integers.
    pub fn gmd_inner_pass(&self, y: &BitMatrix) -> Result<Vec<(u64, u64)>> {
        self.check_dims(y)?;
        Ok((0..self.params.n_out)
            .map(|j| {
                let (v, d) = self.inner_decode(&self.chunk_cols(y, j));
                (v, (2 * d).min(self.d_in))
            })
            .collect())
    }

    fn outer_decode_with_erasures(
        &self,
        decisions: &[(u64, u64)],
        erased: &[bool],
    ) -> Result<(BitMatrix, usize)> {
        let received: Vec<RsSymbol> = decisions
            .iter()
            .zip(erased)
            .map(|(&(v, _), &e)| {
                if e {
                    RsSymbol::Erasure
                } else {
                    RsSymbol::Value(FieldElement(v as u16))
                }
            })
            .collect();
        let (symbols, outer_errors) = self.rs.decode(&received)?;
        Ok((self.outer_symbols_to_message(&symbols), outer_errors))
    }

    /// Generalized minimum distance decoding; corrects any noise of
    /// transform weight below d_out * d_in / 2 in sweep mode, and in
    /// expectation in randomized mode.
    pub fn gmd_decode(&self, y: &BitMatrix, mode: GmdMode) -> Result<GmdOutcome> {
        let decisions = self.gmd_inner_pass(y)?;
        let inner_choices: Vec<u64> = decisions.iter().map(|&(v, _)| v).collect();
        match mode {
            GmdMode::Randomized { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let erased: Vec<bool> = decisions
                    .iter()
                    .map(|&(_, two_w)| rng.gen_bool(two_w as f64 / self.d_in as f64))
                    .collect();
                let (message, outer_errors) = self.outer_decode_with_erasures(&decisions, &erased)?;
                Ok(GmdOutcome { message, inner_choices, erased, outer_errors })
            }
            GmdMode::Sweep => {
                // candidate erasure sets: none, then {i : 2 w_i >= theta} for
                // each distinct positive theta, largest threshold first
                let mut thresholds: Vec<u64> =
                    decisions.iter().map(|&(_, w)| w).filter(|&w| w > 0).collect();
                thresholds.sort_unstable();
                thresholds.dedup();
                let mut candidates: Vec<Vec<bool>> = vec![vec![false; decisions.len()]];
                for &theta in thresholds.iter().rev() {
                    candidates.push(decisions.iter().map(|&(_, w)| w >= theta).collect());
                }
                let half = (self.params.d_out() as u64) * self.d_in; // doubled threshold
                for erased in candidates {
                    let Ok((message, outer_errors)) =
                        self.outer_decode_with_erasures(&decisions, &erased)
                    else {
                        continue;
                    };
                    let reencoded = self.encode(&message)?;
                    let tx = self.member.t_bin.mul(&reencoded)?;
                    let dist = self
                        .member
                        .table
                        .transform_distance(&tx, y)?
                        .ok_or_else(|| Error::DecodeFailure("infinite re-encode distance".into()))?;
                    if 2 * dist < half {
                        return Ok(GmdOutcome { message, inner_choices, erased, outer_errors });
                    }
                }
                Err(Error::DecodeFailure("no threshold candidate verified".into()))
            }
        }
    }
}

/// Per-trial record of a decoding experiment.
#[derive(Debug, Clone, Copy)]
pub struct TrialRecord {
    pub seed: u64,
    /// Hamming weight of the injected noise matrix.
    pub noise_weight: usize,
    /// Transform distance between the transmitted and received matrices.
    pub transform_noise: u64,
    pub erasures: usize,
    pub outer_errors: usize,
    pub success: bool,
}

/// Aggregate of a GMD experiment: Step-2 statistics are measured against the
/// true transmitted chunks, so `outer_errors` counts wrong un-erased inner
/// decisions whether or not the outer decoder recovered.
#[derive(Debug, Clone)]
pub struct ExperimentSummary {
    pub records: Vec<TrialRecord>,
    pub mean_two_e_plus_s: f64,
    pub success_rate: f64,
    pub d_out: usize,
    pub d_in: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentMode {
    Natural,
    Randomized,
    Sweep,
}

impl std::str::FromStr for ExperimentMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "natural" => Ok(ExperimentMode::Natural),
            "randomized" => Ok(ExperimentMode::Randomized),
            "sweep" => Ok(ExperimentMode::Sweep),
            other => Err(Error::Parse(format!("unknown decode mode '{other}'"))),
        }
    }
}

/// Run `trials` seeded decode trials. Each trial draws a random message and
/// a noise pattern of the given Hamming budget (alternating concentrated and
/// spread placements), transmits, decodes in the requested mode, and scores
/// errors/erasures against the truth.
pub fn gmd_experiment(
    code: &ConcatCode,
    instance: &NetworkInstance,
    trials: usize,
    noise_budget: usize,
    mode: ExperimentMode,
    seed: u64,
) -> Result<ExperimentSummary> {
    let em = instance.edge_count() * instance.m();
    let n = code.params.n();
    let (rows, cols) = code.message_dims();
    let mut records = Vec::with_capacity(trials);
    let mut sum_2e_s = 0.0;
    let mut successes = 0usize;
    for t in 0..trials {
        let trial_seed = seed.wrapping_add(t as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
        let message = BitMatrix::random(rows, cols, &mut rng);
        let x = code.encode(&message)?;
        let z = if t % 2 == 0 {
            crate::network::concentrated_pattern(em, n, instance.m(), noise_budget, &mut rng)
        } else {
            crate::network::spread_pattern(em, n, noise_budget, &mut rng)
        };
        let y = instance.transmit(&x, &z)?;
        let tx = code.member.t_bin.mul(&x)?;
        let transform_noise = code
            .member
            .table
            .transform_distance(&tx, &y)?
            .expect("certified instance spans");
        // the true outer symbols, for scoring
        let truth: Vec<u64> = (0..code.params.n_out)
            .map(|j| {
                let cols: Vec<u32> =
                    (0..code.params.b).map(|c| tx.col_mask(j * code.params.b + c) as u32).collect();
                code.inner_tx.iter().position(|t| *t == cols).expect("codeword chunk") as u64
            })
            .collect();
        let (erased, choices, outer_errors_decoded, message_ok) = match mode {
            ExperimentMode::Natural => {
                let decisions = code.gmd_inner_pass(&y)?;
                let choices: Vec<u64> = decisions.iter().map(|&(v, _)| v).collect();
                let erased = vec![false; code.params.n_out];
                let ok = code
                    .natural_decode(&y)
                    .map(|decoded| decoded == message)
                    .unwrap_or(false);
                (erased, choices, 0, ok)
            }
            ExperimentMode::Randomized => match code.gmd_decode(&y, GmdMode::Randomized {
                seed: trial_seed ^ 0x9e3779b97f4a7c15,
            }) {
                Ok(out) => {
                    let ok = out.message == message;
                    (out.erased, out.inner_choices, out.outer_errors, ok)
                }
                Err(_) => {
                    // decoding failed; recompute the step-2 state for scoring
                    let decisions = code.gmd_inner_pass(&y)?;
                    let mut rng2 =
                        ChaCha8Rng::seed_from_u64(trial_seed ^ 0x9e3779b97f4a7c15);
                    let erased: Vec<bool> = decisions
                        .iter()
                        .map(|&(_, two_w)| rng2.gen_bool(two_w as f64 / code.d_in as f64))
                        .collect();
                    let choices = decisions.iter().map(|&(v, _)| v).collect();
                    (erased, choices, 0, false)
                }
            },
            ExperimentMode::Sweep => match code.gmd_decode(&y, GmdMode::Sweep) {
                Ok(out) => {
                    let ok = out.message == message;
                    (out.erased, out.inner_choices, out.outer_errors, ok)
                }
                Err(_) => {
                    let decisions = code.gmd_inner_pass(&y)?;
                    let choices = decisions.iter().map(|&(v, _)| v).collect();
                    (vec![false; code.params.n_out], choices, 0, false)
                }
            },
        };
        let _ = outer_errors_decoded;
        // score against the truth: e = wrong un-erased chunks, s = erasures
        let s_count = erased.iter().filter(|&&e| e).count();
        let e_count = (0..code.params.n_out)
            .filter(|&j| !erased[j] && choices[j] != truth[j])
            .count();
        sum_2e_s += (2 * e_count + s_count) as f64;
        if message_ok {
            successes += 1;
        }
        records.push(TrialRecord {
            seed: trial_seed,
            noise_weight: z.weight(),
            transform_noise,
            erasures: s_count,
            outer_errors: e_count,
            success: message_ok,
        });
    }
    Ok(ExperimentSummary {
        records,
        mean_two_e_plus_s: sum_2e_s / trials as f64,
        success_rate: successes as f64 / trials as f64,
        d_out: code.params.d_out(),
        d_in: code.d_in,
    })
}
