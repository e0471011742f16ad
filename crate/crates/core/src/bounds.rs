//! Rate bounds for the worst-case binary-error network channel as pure
//! functions of (p, C, E, m, n): Hamming-, Plotkin- and Elias-Bassalygo-type
//! converses, the Johnson-type ball bound, GV-type and Zyablov-type
//! achievability bounds, the two link-by-link benchmark rates, sphere-volume
//! bounds, and grid sweeps over p.
//!
//! Every evaluator clamps its rate to [0, 1] and carries an `in_domain` flag
//! instead of raising, so sweeps over a p grid always produce total curves;
//! the flag records whether the bound is actually asserted at that point
//! (each bound has a stated validity range). With C = E = m = 1 each bound reduces to its classical counterpart.

use crate::algebra::BitMatrix;
use crate::error::{Error, Result};
use crate::network::{enumerate_noise, NetworkInstance};
use std::collections::HashSet;

/// Binary entropy, H(0) = H(1) = 0.
pub fn entropy(x: f64) -> f64 {
    assert!((0.0..=1.0).contains(&x), "entropy domain violation: {x}");
    if x == 0.0 || x == 1.0 {
        return 0.0;
    }
    -(x * x.log2()) - (1.0 - x) * (1.0 - x).log2()
}

/// Inverse of the binary entropy restricted to [0, 1/2], by bisection to
/// absolute tolerance 1e-12.
pub fn inv_entropy(y: f64) -> f64 {
    assert!((0.0..=1.0).contains(&y), "inv_entropy domain violation: {y}");
    if y == 0.0 {
        return 0.0;
    }
    if y == 1.0 {
        return 0.5;
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if entropy(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Bracketed-Newton inverse entropy used inside the Zyablov optimizer's hot
/// loop; agrees with [`inv_entropy`] to well below its 1e-12 tolerance.
fn inv_entropy_newton(y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    if y >= 1.0 {
        return 0.5;
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..16 {
        let mid = 0.5 * (lo + hi);
        if entropy(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..30 {
        let h = entropy(x) - y;
        let dh = ((1.0 - x) / x).log2();
        if dh.abs() < 1e-30 {
            break;
        }
        let next = (x - h / dh).clamp(lo, hi);
        if (next - x).abs() < 1e-14 {
            return next;
        }
        x = next;
    }
    x
}

/// Channel parameters shared by all bound evaluators. `n = None` selects the
/// asymptotic variants; `Some(n)` the finite-length ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    pub c: usize,
    pub e: usize,
    pub m: usize,
    pub n: Option<usize>,
    pub p: f64,
}

impl BoundParams {
    pub fn new(c: usize, e: usize, m: usize, n: Option<usize>, p: f64) -> Result<Self> {
        if c == 0 || e < c || !(1..=16).contains(&m) {
            return Err(Error::BadParams(format!(
                "need E >= C >= 1 and 1 <= m <= 16, got C={c} E={e} m={m}"
            )));
        }
        if !(0.0..0.5).contains(&p) {
            return Err(Error::BadParams(format!("p={p} outside [0, 1/2)")));
        }
        if n == Some(0) {
            return Err(Error::BadParams("n must be positive".into()));
        }
        Ok(BoundParams { c, e, m, n, p })
    }

    pub fn with_p(self, p: f64) -> Self {
        BoundParams { p, ..self }
    }

    fn ratio(&self) -> f64 {
        self.e as f64 / self.c as f64
    }

    fn emn(&self, n: usize) -> f64 {
        (self.e * self.m * n) as f64
    }

    fn cmn(&self, n: usize) -> f64 {
        (self.c * self.m * n) as f64
    }
}

/// A clamped rate value plus a flag recording whether the bound is asserted
/// at these parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundValue {
    pub rate: f64,
    pub in_domain: bool,
}

fn clamp(rate: f64, in_domain: bool) -> BoundValue {
    BoundValue { rate: rate.clamp(0.0, 1.0), in_domain }
}

/// Hamming-type converse: 1 - (E/C) H(p), asserted for p < C/(2Em); the
/// finite-length variant adds log2(Emn+1)/(Cmn).
pub fn hamming_bound(params: &BoundParams) -> BoundValue {
    let in_domain = params.p < params.c as f64 / (2.0 * (params.e * params.m) as f64);
    let mut rate = 1.0 - params.ratio() * entropy(params.p);
    if let Some(n) = params.n {
        rate += ((params.emn(n) + 1.0).log2()) / params.cmn(n);
    }
    clamp(rate, in_domain)
}

/// Plotkin-type converse. For E >= 2C the rate is 1 - E^2 p / (CE - C^2) up
/// to p = (1 - C/E)(C/E) and zero beyond; for E < 2C it is the classical
/// 1 - 4p with cutoff 1/4. Total on [0, 1/2); always in domain.
pub fn plotkin_bound(params: &BoundParams) -> BoundValue {
    let (c, e) = (params.c as f64, params.e as f64);
    let rate = if params.e >= 2 * params.c {
        let cutoff = (1.0 - c / e) * (c / e);
        if params.p <= cutoff {
            1.0 - e * e / (c * e - c * c) * params.p
        } else {
            0.0
        }
    } else if params.p <= 0.25 {
        1.0 - 4.0 * params.p
    } else {
        0.0
    };
    clamp(rate, true)
}

/// Elias-Bassalygo-type converse: 1 - (E/C) H((1 - sqrt(1-4p))/2), asserted
/// for p < (C/2Em)(1 - C/2Em). Beyond p = 1/4 the entropy argument saturates
/// at 1/2.
pub fn elias_bassalygo_bound(params: &BoundParams) -> BoundValue {
    let half_ratio = params.c as f64 / (2.0 * (params.e * params.m) as f64);
    let in_domain = params.p < half_ratio * (1.0 - half_ratio);
    let arg = if params.p >= 0.25 { 0.5 } else { (1.0 - (1.0 - 4.0 * params.p).sqrt()) / 2.0 };
    let mut rate = 1.0 - params.ratio() * entropy(arg);
    if let Some(n) = params.n {
        rate += ((params.emn(n) + 1.0).log2()) / params.cmn(n);
    }
    clamp(rate, in_domain)
}

/// Johnson-type bound: the maximum number of codewords of a distance-d
/// codebook inside a transform-metric ball of radius e.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JohnsonBound {
    /// At most floor(d Emn / 2) codewords.
    Bound(u64),
    /// The radius is past the Johnson threshold; nothing is asserted.
    NoBound,
}

pub fn johnson_bound(d: u64, radius: u64, params: &BoundParams) -> Result<JohnsonBound> {
    let n = params
        .n
        .ok_or_else(|| Error::BadParams("johnson_bound needs a finite n".into()))?;
    let emn = params.emn(n);
    if d == 0 {
        return Err(Error::BadParams("johnson_bound needs d >= 1".into()));
    }
    let ratio = 2.0 * d as f64 / emn;
    if ratio > 1.0 {
        return Ok(JohnsonBound::NoBound);
    }
    let threshold = 0.5 * (1.0 - (1.0 - ratio).sqrt());
    if (radius as f64 / emn) < threshold {
        Ok(JohnsonBound::Bound((d as f64 * emn / 2.0).floor() as u64))
    } else {
        Ok(JohnsonBound::NoBound)
    }
}

/// Which GV-type finite-length correction to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GvVariant {
    Coherent,
    NonCoherent,
}

/// GV-type achievability: 1 - (E/C) H(2p). The finite-length coherent
/// variant subtracts log2(2pEmn+1)/(Cmn); the non-coherent one
/// (log2(2pEmn+1) + E)/n, the price of ranging over every transfer matrix.
pub fn gv_bound(params: &BoundParams, variant: GvVariant) -> BoundValue {
    let two_p = 2.0 * params.p;
    let mut rate =
        if two_p >= 0.5 { 1.0 - params.ratio() } else { 1.0 - params.ratio() * entropy(two_p) };
    if let Some(n) = params.n {
        let ball_log = (2.0 * params.p * params.emn(n) + 1.0).log2();
        match variant {
            GvVariant::Coherent => rate -= ball_log / params.cmn(n),
            GvVariant::NonCoherent => rate -= (ball_log + params.e as f64) / n as f64,
        }
    }
    clamp(rate, true)
}

/// Zyablov-type achievability with the maximizing inner rate. The objective
/// r (1 - 2p / H^{-1}((C/E)(1-r))) is scanned on a 1e-4 grid over the open
/// interval (0, 1 - (E/C)H(2p)) and the best point refined by golden-section
/// search to 1e-9. At p = 0 the supremum 1 is returned directly.
pub fn zyablov_bound(params: &BoundParams) -> (BoundValue, f64) {
    if params.p == 0.0 {
        return (BoundValue { rate: 1.0, in_domain: true }, 1.0);
    }
    let two_p = 2.0 * params.p;
    let rmax =
        if two_p >= 0.5 { 1.0 - params.ratio() } else { 1.0 - params.ratio() * entropy(two_p) };
    if rmax <= 0.0 {
        return (BoundValue { rate: 0.0, in_domain: true }, 0.0);
    }
    let ce = params.c as f64 / params.e as f64;
    let f = |r: f64| -> f64 {
        let d = inv_entropy_newton(ce * (1.0 - r));
        if d <= 0.0 {
            return 0.0;
        }
        r * (1.0 - 2.0 * params.p / d)
    };
    // dense scan; the step shrinks with the feasible interval so narrow
    // intervals near the positivity threshold are still covered
    let step = 1e-4f64.min(rmax / 1000.0);
    let mut best_r = 0.0;
    let mut best_v = 0.0;
    let mut r = step;
    while r < rmax {
        let v = f(r);
        if v > best_v {
            best_v = v;
            best_r = r;
        }
        r += step;
    }
    if best_v == 0.0 {
        return (BoundValue { rate: 0.0, in_domain: true }, 0.0);
    }
    // golden-section refinement around the best grid point
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = (best_r - step).max(step * 0.5);
    let mut b = (best_r + step).min(rmax - 1e-12);
    while b - a > 1e-9 {
        let c1 = b - phi * (b - a);
        let c2 = a + phi * (b - a);
        if f(c1) > f(c2) {
            b = c2;
        } else {
            a = c1;
        }
    }
    let r_star = 0.5 * (a + b);
    (clamp(f(r_star).max(best_v), true), r_star)
}

/// The two link-by-link benchmark rates, normalized on the same [0, 1] rate
/// axis as the channel bounds (throughputs divided by C).
///
/// Benchmark 1 is per-link GV against the full worst case: 1 - H(4Cp), zero
/// once 4Cp >= 1/2. Benchmark 2 splits the budget over at most k failing
/// links and overlays an end-to-end code: max over integer 1 <= k < C/2 of
/// (C-2k)(1 - H(4Cp/k))/C, with the best k returned (0 when the range is
/// empty).
pub fn benchmark_rates(params: &BoundParams) -> (f64, f64, usize) {
    let c = params.c as f64;
    let arg1 = 4.0 * c * params.p;
    let bench1 = if arg1 >= 0.5 { 0.0 } else { (1.0 - entropy(arg1)).clamp(0.0, 1.0) };
    let mut bench2 = 0.0;
    let mut best_k = 0usize;
    let mut k = 1usize;
    while 2 * k < params.c {
        let arg = 4.0 * c * params.p / k as f64;
        let v = if arg >= 0.5 { 0.0 } else { (c - 2.0 * k as f64) * (1.0 - entropy(arg)) / c };
        if v > bench2 {
            bench2 = v;
            best_k = k;
        }
        k += 1;
    }
    (bench1, bench2.clamp(0.0, 1.0), best_k)
}

/// Sphere-volume bounds for transform-metric balls of the given radius:
/// log2 of the lower and upper bounds on the number of distinct T-hat Z with
/// wt(Z) <= radius.
#[derive(Debug, Clone, Copy)]
pub struct SphereVolume {
    pub log2_lower: f64,
    pub log2_upper: f64,
    /// The lower bound is only asserted when radius < Cn/2 (all
    /// weight-radius patterns then have distinct images).
    pub lower_valid: bool,
    /// Exact count by enumeration, when an instance was supplied and the
    /// enumeration fits the cap.
    pub exact: Option<u64>,
}

pub fn sphere_volume_bounds(
    radius: usize,
    params: &BoundParams,
    instance: Option<&NetworkInstance>,
) -> Result<SphereVolume> {
    let n = params
        .n
        .ok_or_else(|| Error::BadParams("sphere_volume_bounds needs a finite n".into()))?;
    let emn = params.e * params.m * n;
    if radius > emn {
        return Err(Error::BadParams(format!("radius {radius} exceeds Emn = {emn}")));
    }
    let rho = radius as f64 / emn as f64;
    let log2_lower = emn as f64 * entropy(rho) - ((emn + 1) as f64).log2();
    // the binomial-sum upper bound needs rho <= 1/2; cap the entropy argument
    let log2_upper = emn as f64 * entropy(rho.min(0.5)) + ((radius + 1) as f64).log2();
    let lower_valid = (radius as f64) < params.c as f64 * n as f64 / 2.0;
    let exact = match instance {
        Some(inst) => {
            let em = inst.edge_count() * inst.m();
            if em * n != emn {
                return Err(Error::DimensionMismatch(
                    "instance dimensions do not match params".into(),
                ));
            }
            let mut images: HashSet<Vec<u64>> = HashSet::new();
            for z in enumerate_noise(radius, em, n)? {
                let img = inst.t_hat_bin().mul(z.matrix())?;
                let key: Vec<u64> = (0..n).map(|c| img.col_mask(c)).collect();
                images.insert(key);
            }
            Some(images.len() as u64)
        }
        None => None,
    };
    Ok(SphereVolume { log2_lower, log2_upper, lower_valid, exact })
}

/// One row of a bound sweep.
#[derive(Debug, Clone, Copy)]
pub struct BoundRow {
    pub p: f64,
    pub hamming: BoundValue,
    pub plotkin: BoundValue,
    pub elias_bassalygo: BoundValue,
    pub gv_coherent: BoundValue,
    pub gv_noncoherent: BoundValue,
    pub zyablov: BoundValue,
    pub bench1: f64,
    pub bench2: f64,
}

/// All bounds evaluated over a grid of p values.
#[derive(Debug, Clone)]
pub struct BoundCurve {
    pub c: usize,
    pub e: usize,
    pub m: usize,
    pub n: Option<usize>,
    pub rows: Vec<BoundRow>,
}

/// Deterministic sweep over a monotone p grid.
pub fn sweep_bounds(base: &BoundParams, grid: &[f64]) -> Result<BoundCurve> {
    if grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::BadParams("p grid must be non-decreasing".into()));
    }
    let mut rows = Vec::with_capacity(grid.len());
    for &p in grid {
        let params = BoundParams::new(base.c, base.e, base.m, base.n, p)?;
        let (zy, _) = zyablov_bound(&params);
        let (bench1, bench2, _) = benchmark_rates(&params);
        rows.push(BoundRow {
            p,
            hamming: hamming_bound(&params),
            plotkin: plotkin_bound(&params),
            elias_bassalygo: elias_bassalygo_bound(&params),
            gv_coherent: gv_bound(&params, GvVariant::Coherent),
            gv_noncoherent: gv_bound(&params, GvVariant::NonCoherent),
            zyablov: zy,
            bench1,
            bench2,
        });
    }
    Ok(BoundCurve { c: base.c, e: base.e, m: base.m, n: base.n, rows })
}

/// Uniform grid of `steps` points from 0 to p_max inclusive.
pub fn uniform_grid(p_max: f64, steps: usize) -> Vec<f64> {
    assert!(steps >= 2);
    (0..steps).map(|i| p_max * i as f64 / (steps - 1) as f64).collect()
}

impl BoundCurve {
    /// CSV rows (no metadata header): `p,hamming,plotkin,elias_bassalygo,
    /// gv_coherent,gv_noncoherent,zyablov,bench1,bench2` with nine-digit
    /// floats.
    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "p,hamming,plotkin,elias_bassalygo,gv_coherent,gv_noncoherent,zyablov,bench1,bench2\n",
        );
        for r in &self.rows {
            s.push_str(&format!(
                "{:.9},{:.9},{:.9},{:.9},{:.9},{:.9},{:.9},{:.9},{:.9}\n",
                r.p,
                r.hamming.rate,
                r.plotkin.rate,
                r.elias_bassalygo.rate,
                r.gv_coherent.rate,
                r.gv_noncoherent.rate,
                r.zyablov.rate,
                r.bench1,
                r.bench2
            ));
        }
        s
    }
}

/// Exhaustively build a maximal codebook with pairwise transformed distance
/// at least d by a greedy scan over all Cm x n matrices in packed order.
/// Used by the Plotkin-regime size checks; requires Cm * n <= 20 bits.
pub fn maximal_codebook_greedy(
    instance: &NetworkInstance,
    table: &crate::metric::CosetLeaderTable,
    n: usize,
    d: u64,
) -> Result<Vec<BitMatrix>> {
    let cm = instance.mincut() * instance.m();
    if cm * n > 20 {
        return Err(Error::CapExceeded(format!("2^{} matrices is past the scan cap", cm * n)));
    }
    let mut chosen: Vec<BitMatrix> = Vec::new();
    let mut chosen_tx: Vec<Vec<u32>> = Vec::new();
    for v in 0..(1u64 << (cm * n)) {
        let x = BitMatrix::unpack_cols(cm, n, v);
        let tx = instance.t_bin().mul(&x)?;
        let packed: Vec<u32> = (0..n).map(|c| tx.col_mask(c) as u32).collect();
        let mut ok = true;
        for prev in &chosen_tx {
            let dist = (0..n)
                .map(|i| table.weight(prev[i] ^ packed[i]).map(|w| w as u64))
                .try_fold(0u64, |acc, w| w.map(|w| acc + w));
            match dist {
                Some(dist) if dist >= d => {}
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            chosen.push(x);
            chosen_tx.push(packed);
        }
    }
    Ok(chosen)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn asym(c: usize, e: usize, m: usize, p: f64) -> BoundParams {
        BoundParams::new(c, e, m, None, p).unwrap()
    }

    #[test]
    fn entropy_endpoints_and_half() {
        assert_eq!(entropy(0.0), 0.0);
        assert_eq!(entropy(1.0), 0.0);
        assert!((entropy(0.5) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn entropy_at_one_tenth() {
        // cross-checked against a high-precision evaluation
        assert!((entropy(0.1) - 0.46899559358928122).abs() < 1e-12);
    }

    #[test]
    fn inv_entropy_inverts() {
        assert_eq!(inv_entropy(0.0), 0.0);
        for i in 1..100 {
            let y = i as f64 / 100.0;
            assert!((entropy(inv_entropy(y)) - y).abs() < 1e-10, "y={y}");
        }
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming_bound(&asym(1, 1, 1, 0.0)).rate, 1.0);
        let classic = hamming_bound(&asym(1, 1, 1, 0.1));
        assert!((classic.rate - 0.53100440641071878).abs() < 1e-12);
        assert!(classic.in_domain);
        let net = hamming_bound(&asym(4, 8, 2, 0.05));
        assert!((net.rate - 0.42720608576808774).abs() < 1e-12);
        // out of asserted range: flagged, still evaluated
        let out = hamming_bound(&asym(1, 4, 2, 0.2));
        assert!(!out.in_domain);
    }

    #[test]
    fn plotkin_examples() {
        // E=8, C=4: E >= 2C, slope E^2/(CE-C^2) = 4
        assert_eq!(plotkin_bound(&asym(4, 8, 2, 0.25)).rate, 0.0);
        assert!((plotkin_bound(&asym(4, 8, 2, 0.1)).rate - 0.6).abs() < 1e-12);
        // E=3, C=2: E < 2C, classical 1-4p
        assert!((plotkin_bound(&asym(2, 3, 1, 0.125)).rate - 0.5).abs() < 1e-12);
        assert_eq!(plotkin_bound(&asym(2, 3, 1, 0.0)).rate, 1.0);
        // E=9, C=2 falls in the E >= 2C case
        let v = plotkin_bound(&asym(2, 9, 3, 0.01));
        assert!((v.rate - (1.0 - 81.0 / 14.0 * 0.01)).abs() < 1e-12);
    }

    #[test]
    fn elias_bassalygo_examples() {
        assert_eq!(elias_bassalygo_bound(&asym(1, 1, 1, 0.0)).rate, 1.0);
        let classic = elias_bassalygo_bound(&asym(1, 1, 1, 0.1));
        assert!((classic.rate - 0.49198840304795166).abs() < 1e-12);
    }

    #[test]
    fn elias_tighter_than_hamming() {
        for c_e_m in [(1usize, 1usize, 1usize), (4, 8, 2), (2, 9, 3)] {
            for i in 1..=100 {
                let p = 0.24 * i as f64 / 100.0;
                let params = asym(c_e_m.0, c_e_m.1, c_e_m.2, p);
                let eb = elias_bassalygo_bound(&params);
                let h = hamming_bound(&params);
                if eb.in_domain && h.in_domain {
                    assert!(eb.rate <= h.rate + 1e-12, "p={p} {c_e_m:?}");
                }
            }
        }
    }

    #[test]
    fn johnson_examples() {
        let params = BoundParams::new(1, 1, 1, Some(10), 0.1).unwrap();
        // radius 0: applies for any d >= 1
        assert_eq!(johnson_bound(3, 0, &params).unwrap(), JohnsonBound::Bound(15));
        // 2d/(Emn) > 1: no bound
        assert_eq!(johnson_bound(6, 1, &params).unwrap(), JohnsonBound::NoBound);
        // exactly at threshold: strict inequality fails
        // d=5, Emn=10: threshold = (1 - sqrt(1 - 1))/2 = 1/2, radius 5 -> 0.5
        assert_eq!(johnson_bound(5, 5, &params).unwrap(), JohnsonBound::NoBound);
        assert_eq!(johnson_bound(5, 4, &params).unwrap(), JohnsonBound::Bound(25));
    }

    #[test]
    fn johnson_threshold_tracks_eb_radius() {
        // with d = 2pEmn+1, the threshold radius approaches Emn(1-sqrt(1-4p))/2
        let n = 100_000usize;
        let p = 0.05;
        let params = BoundParams::new(1, 1, 1, Some(n), p).unwrap();
        let emn = n as f64;
        let d = (2.0 * p * emn) as u64 + 1;
        let threshold = emn * 0.5 * (1.0 - (1.0 - 2.0 * d as f64 / emn).sqrt());
        let expect = emn * 0.5 * (1.0 - (1.0 - 4.0 * p).sqrt());
        assert!((threshold - expect).abs() / expect < 1e-3);
        let inside = (threshold - 2.0) as u64;
        let outside = (threshold + 2.0) as u64;
        assert!(matches!(johnson_bound(d, inside, &params).unwrap(), JohnsonBound::Bound(_)));
        assert_eq!(johnson_bound(d, outside, &params).unwrap(), JohnsonBound::NoBound);
    }

    #[test]
    fn gv_examples() {
        assert_eq!(gv_bound(&asym(1, 1, 1, 0.0), GvVariant::Coherent).rate, 1.0);
        let classic = gv_bound(&asym(1, 1, 1, 0.05), GvVariant::Coherent);
        assert!((classic.rate - 0.53100440641071878).abs() < 1e-12);
        let net = gv_bound(&asym(4, 8, 2, 0.05), GvVariant::Coherent);
        assert!((net.rate - 0.062008812821437557).abs() < 1e-12);
    }

    #[test]
    fn gv_noncoherent_correction_is_larger() {
        let params = BoundParams::new(2, 4, 2, Some(64), 0.02).unwrap();
        let co = gv_bound(&params, GvVariant::Coherent);
        let nc = gv_bound(&params, GvVariant::NonCoherent);
        assert!(nc.rate < co.rate);
    }

    #[test]
    fn zyablov_examples() {
        let (v, _) = zyablov_bound(&asym(1, 1, 1, 0.0));
        assert_eq!(v.rate, 1.0);
        // frozen from an independent high-precision evaluation
        let (v, r) = zyablov_bound(&asym(1, 1, 1, 0.025));
        assert!((v.rate - 0.274562371151).abs() < 1e-6, "rate {}", v.rate);
        assert!((r - 0.473715725726).abs() < 1e-3, "argmax {r}");
        let (v, _) = zyablov_bound(&asym(1, 1, 1, 0.05));
        assert!((v.rate - 0.142193705558).abs() < 1e-6, "rate {}", v.rate);
        // empty feasible interval
        let (v, _) = zyablov_bound(&asym(1, 2, 1, 0.24));
        assert_eq!(v.rate, 0.0);
    }

    #[test]
    fn zyablov_below_gv() {
        for i in 1..50 {
            let p = 0.11 * i as f64 / 50.0;
            let params = asym(1, 1, 1, p);
            let (zy, _) = zyablov_bound(&params);
            let gv = gv_bound(&params, GvVariant::Coherent);
            assert!(zy.rate <= gv.rate + 1e-9, "p={p}");
        }
    }

    #[test]
    fn benchmark_examples() {
        // p = 0: bench1 = 1, bench2 = (C-2)/C via k = 1
        let (b1, b2, k) = benchmark_rates(&asym(4, 8, 2, 0.0));
        assert_eq!(b1, 1.0);
        assert!((b2 - 0.5).abs() < 1e-12);
        assert_eq!(k, 1);
        // C=4, p=0.01: 1 - H(0.16)
        let (b1, _, _) = benchmark_rates(&asym(4, 8, 2, 0.01));
        assert!((b1 - 0.36569044535943395).abs() < 1e-12);
        // saturation: 4Cp >= 1/2 means the per-link code is swamped
        let (b1, _, _) = benchmark_rates(&asym(4, 8, 2, 0.04));
        assert_eq!(b1, 0.0);
        // C=2: no k with C-2k > 0
        let (_, b2, k) = benchmark_rates(&asym(2, 9, 3, 0.0));
        assert_eq!(b2, 0.0);
        assert_eq!(k, 0);
    }

    #[test]
    fn sweep_produces_total_ordered_curves() {
        let base = BoundParams::new(4, 8, 2, None, 0.0).unwrap();
        let grid = uniform_grid(0.2, 101);
        let curve = sweep_bounds(&base, &grid).unwrap();
        assert_eq!(curve.rows.len(), 101);
        let first = &curve.rows[0];
        assert_eq!(first.hamming.rate, 1.0);
        assert_eq!(first.gv_coherent.rate, 1.0);
        assert_eq!(first.zyablov.rate, 1.0);
        for row in &curve.rows {
            let upper = row.hamming.rate.min(row.elias_bassalygo.rate).min(row.plotkin.rate);
            if row.hamming.in_domain && row.elias_bassalygo.in_domain {
                assert!(row.gv_coherent.rate <= upper + 1e-9, "p={}", row.p);
            }
            assert!(row.zyablov.rate <= row.gv_coherent.rate + 1e-9, "p={}", row.p);
        }
    }

    #[test]
    fn finite_n_converges_to_asymptotic() {
        for &(c, e, m) in &[(1usize, 1usize, 1usize), (4, 8, 2), (2, 9, 3)] {
            for i in 0..20 {
                let p = 0.02 * i as f64 / 20.0 + 0.001;
                let a = BoundParams::new(c, e, m, None, p).unwrap();
                let f = BoundParams::new(c, e, m, Some(1_000_000), p).unwrap();
                assert!((hamming_bound(&a).rate - hamming_bound(&f).rate).abs() < 1e-3);
                assert!(
                    (gv_bound(&a, GvVariant::Coherent).rate
                        - gv_bound(&f, GvVariant::Coherent).rate)
                        .abs()
                        < 1e-3
                );
                assert!(
                    (gv_bound(&a, GvVariant::NonCoherent).rate
                        - gv_bound(&f, GvVariant::NonCoherent).rate)
                        .abs()
                        < 1e-3
                );
                assert!(
                    (elias_bassalygo_bound(&a).rate - elias_bassalygo_bound(&f).rate).abs() < 1e-3
                );
            }
        }
    }

    #[test]
    fn csv_has_header_and_width() {
        let base = BoundParams::new(1, 1, 1, None, 0.0).unwrap();
        let curve = sweep_bounds(&base, &uniform_grid(0.1, 3)).unwrap();
        let csv = curve.to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "p,hamming,plotkin,elias_bassalygo,gv_coherent,gv_noncoherent,zyablov,bench1,bench2"
        );
        assert_eq!(lines.count(), 3);
    }
}
