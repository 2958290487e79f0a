use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::diagnostics::{classify_trend, increment_ratio, ring_stats_range, DiagnosticsConfig};
use super::rings::dual_exponent;
use super::symbol::{apply, MultiplierSymbol};
use crate::error::{Error, Result};
use crate::kernels::{sign_patterns, test_phi, RieszProductSpec, TestPhiSpec};
use crate::lattice::{split_into_sparse, LatticePoint, SectorId, SectorPartition, SparseSequence};
use crate::report::CertificationReport;
use crate::trigpoly::{sobolev_parts, Quadrature};

/// Relative slack for identities that hold exactly up to rounding.
const REL_SLACK: f64 = 1e-12;

fn ratio_pow(sym: &MultiplierSymbol, n: &LatticePoint, e: f64) -> f64 {
    let r = sym.eval(n).norm() / n.euclid_norm();
    if r == 0.0 {
        0.0
    } else {
        r.powf(e)
    }
}

/// `Σ_i (|λ_{n_i}|/|n_i|_2)^{p′}`.
pub fn sequence_lhs(sym: &MultiplierSymbol, points: &[LatticePoint], p: f64) -> Result<f64> {
    let q = dual_exponent(p)?;
    Ok(points.iter().map(|n| ratio_pow(sym, n, q)).sum())
}

/// Test-function lower bound for one sector sequence.
///
/// Builds `φ` on `seq`, applies the multiplier and compares
/// `LHS = Σ_i (|λ_{n_i}|/|n_i|_2)^{p′}` with `‖Tφ‖_p`. The `L(ξ) = 1` part
/// of `(Tφ)^` is summed by enumerating sign patterns and checked against the
/// closed form `Σ_{i,±} (|λ_{±n_i}| / (4π|n_i^{(j0)}|))^{p′}`. Passes iff
/// the two agree and
/// `LHS ≤ (4π)^{p′} · Σ_{L(ξ)=1} |(Tφ)^(M(ξ))|^{p′} ≤ (4π)^{p′} (‖Tφ‖_p + tol)^{p′}`.
/// The ratio `K = LHS / ‖Tφ‖_p^{p′}` and `‖φ‖_{1,1}` are recorded.
pub fn pre_krok2_certify(
    sym: &MultiplierSymbol,
    seq: &SparseSequence,
    p: f64,
    quad: &Quadrature,
) -> CertificationReport {
    let rep = CertificationReport::new("pre_krok2")
        .param("symbol", sym.name())
        .param("d", sym.dim())
        .param("p", p)
        .param("N", seq.len());
    match pre_krok2_inner(sym, seq, p, quad, rep.clone()) {
        Ok(r) => r,
        Err(e) => rep.failed_with(&e),
    }
}

fn pre_krok2_inner(
    sym: &MultiplierSymbol,
    seq: &SparseSequence,
    p: f64,
    quad: &Quadrature,
    mut rep: CertificationReport,
) -> Result<CertificationReport> {
    if !(p > 1.0 && p <= 2.0) {
        return Err(Error::Domain(format!("p must lie in (1, 2], got {p}")));
    }
    let q = dual_exponent(p)?;
    let points = seq.points();
    if points.is_empty() {
        return Err(Error::Precondition("empty sequence".into()));
    }
    if points[0].dim() != sym.dim() {
        return Err(Error::Precondition("sequence and symbol dimensions differ".into()));
    }
    let part = SectorPartition::new(sym.dim(), seq.len() as u32)?;
    let sector = part.sector_of(&points[0])?;
    if let Some(off) = points.iter().find(|n| part.sector_of(n).map_or(true, |s| s != sector)) {
        return Err(Error::Precondition(format!("{off} is not in sector {sector}")));
    }
    let spec = TestPhiSpec::along_dominant_axis(RieszProductSpec::from_sparse(seq)?)?;
    let j0 = spec.j0();
    let phi = test_phi(&spec)?;
    let tphi = apply(sym, &phi)?;

    let lhs = sequence_lhs(sym, points, p)?;
    let restricted: f64 = sign_patterns(points.len())
        .filter(|xi| xi.support_size() == 1)
        .map(|xi| tphi.coeff(&xi.frequency(points)).norm().powf(q))
        .sum();
    let closed: f64 = points
        .iter()
        .flat_map(|n| [n.clone(), n.neg()])
        .map(|m| (sym.eval(&m).norm() / (4.0 * PI * m.coord(j0).unsigned_abs() as f64)).powf(q))
        .sum();
    let identity = (restricted - closed).abs() <= REL_SLACK * closed.max(f64::MIN_POSITIVE);

    let norm = quad.lp_norm(&tphi, p)?;
    let tol = norm.tolerance();
    let four_pi_q = (4.0 * PI).powf(q);
    let hy_bound = (norm.value + tol).powf(q);
    let step1 = lhs <= four_pi_q * restricted * (1.0 + REL_SLACK);
    let step2 = restricted <= hy_bound * (1.0 + REL_SLACK);
    let sob = sobolev_parts(&phi, quad)?;

    rep = rep.tolerance(tol);
    rep.set_param("j0", j0 + 1);
    rep.observe("lhs", lhs);
    rep.observe("restricted_sum", restricted);
    rep.observe("restricted_closed_form", closed);
    rep.observe("tphi_lp", norm.value);
    rep.observe("error_hint", norm.error_hint);
    rep.observe("chain_bound", four_pi_q * hy_bound);
    rep.observe("K", if norm.value > 0.0 { lhs / norm.value.powf(q) } else { 0.0 });
    rep.observe("phi_sobolev_11", sob.raw());
    if !identity {
        rep.note("L(ξ)=1 coefficient sum disagrees with its closed form");
    }
    if !step1 {
        rep.note("LHS exceeds (4π)^{p′} times the L(ξ)=1 sum");
    }
    if !step2 {
        rep.note("L(ξ)=1 sum exceeds ‖Tφ‖_p^{p′}");
    }
    Ok(rep.conclude(identity && step1 && step2))
}

/// Indices ordering `mu` non-increasingly; ties keep their original order.
pub fn rearrange_nonincreasing(mu: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..mu.len()).collect();
    idx.sort_by(|&a, &b| mu[b].total_cmp(&mu[a]));
    idx
}

/// Output of the counting pipeline.
#[derive(Clone, Debug, PartialEq)]
pub struct CountingOutcome {
    /// Rings `σ(1), …, σ(N^{d+1})`.
    pub selected_rings: Vec<u32>,
    /// `Σ_j μ_{σ(j)}^{p′}`.
    pub total: f64,
    /// Points per sector, `#I_A`.
    pub bucket_sizes: BTreeMap<SectorId, usize>,
    /// `(sector, LHS)` for every sparse sequence.
    pub sequences: Vec<(SectorId, Vec<LatticePoint>, f64)>,
    pub k_emp: f64,
    /// `Σ_A (#I_A/N + 2N + 1)`.
    pub accounting_bound: f64,
    pub sector_count: u128,
}

/// Runs the rearrangement and sector counting on the ring maximisers of
/// `R_0, …, R_{k_max}`.
pub fn krok2_counting(sym: &MultiplierSymbol, cfg: &DiagnosticsConfig) -> Result<CountingOutcome> {
    let d = cfg.d;
    let n = cfg.n;
    if sym.dim() != d {
        return Err(Error::Precondition(format!("symbol has d={}, config has d={d}", sym.dim())));
    }
    let count = (n as u64)
        .checked_pow(d as u32 + 1)
        .filter(|&c| c <= cfg.k_max as u64 + 1)
        .ok_or_else(|| {
            Error::Precondition(format!(
                "need N^(d+1) = {n}^{} rings, have {}",
                d + 1,
                cfg.k_max as u64 + 1
            ))
        })? as usize;
    let q = cfg.dual();
    let ks: Vec<u32> = (0..=cfg.k_max).collect();
    let stats = ring_stats_range(sym, &ks, cfg.p)?;
    let mu: Vec<f64> = stats.iter().map(|s| s.mu_k).collect();
    let sigma = rearrange_nonincreasing(&mu);
    let selected: Vec<usize> = sigma[..count].to_vec();
    let total: f64 = selected.iter().map(|&i| pow0(mu[i], q)).sum();

    let part = SectorPartition::new(d, n)?;
    let mut buckets: BTreeMap<SectorId, Vec<LatticePoint>> = BTreeMap::new();
    for &i in &selected {
        let pt = stats[i].argmax_point.clone();
        buckets.entry(part.sector_of(&pt)?).or_default().push(pt);
    }
    let mut sequences = Vec::new();
    let mut accounting_bound = 0.0;
    for (sector, pts) in &buckets {
        accounting_bound += pts.len() as f64 / n as f64 + 2.0 * n as f64 + 1.0;
        for run in split_into_sparse(pts, n)? {
            let lhs = sequence_lhs(sym, run.points(), cfg.p)?;
            sequences.push((sector.clone(), run.into_points(), lhs));
        }
    }
    let k_emp = sequences.iter().map(|s| s.2).fold(0.0, f64::max);
    Ok(CountingOutcome {
        selected_rings: selected.iter().map(|&i| ks[i]).collect(),
        total,
        bucket_sizes: buckets.iter().map(|(s, v)| (s.clone(), v.len())).collect(),
        sequences,
        k_emp,
        accounting_bound,
        sector_count: part.sector_count(),
    })
}

fn pow0(x: f64, e: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.powf(e)
    }
}

/// The counting bound `Σ_{j ≤ N^{d+1}} μ_{σ(j)}^{p′} ≤ K_emp · N^d`, with
/// `K_emp` the largest per-sequence LHS.
///
/// Also checks `Σ_A #I_A = N^{d+1}`, at most `d·N^{d−1}` sectors in use, and
/// at most `Σ_A (#I_A/N + 2N + 1)` sequences.
pub fn krok2_counting_certify(sym: &MultiplierSymbol, cfg: &DiagnosticsConfig) -> CertificationReport {
    let mut rep = CertificationReport::new("r1")
        .param("symbol", sym.name())
        .param("d", cfg.d)
        .param("p", cfg.p)
        .param("N", cfg.n)
        .param("k_max", cfg.k_max)
        .tolerance(REL_SLACK);
    let out = match krok2_counting(sym, cfg) {
        Ok(o) => o,
        Err(e) => return rep.failed_with(&e),
    };
    let count = (cfg.n as usize).pow(cfg.d as u32 + 1);
    let nd = (cfg.n as f64).powi(cfg.d as i32);
    let partition_ok = out.bucket_sizes.values().sum::<usize>() == count;
    let sectors_ok = out.bucket_sizes.len() as u128 <= out.sector_count;
    let seq_ok = out.sequences.len() as f64 <= out.accounting_bound;
    let bound = out.k_emp * nd;
    let holds = out.total <= bound * (1.0 + REL_SLACK);
    rep.observe("total", out.total);
    rep.observe("K_emp", out.k_emp);
    rep.observe("bound", bound);
    rep.observe("assembled_bound", out.k_emp * out.accounting_bound);
    rep.observe("accounting_bound", out.accounting_bound);
    rep.observe("sequences", out.sequences.len() as f64);
    rep.observe("sectors_used", out.bucket_sizes.len() as f64);
    rep.observe("sector_count", out.sector_count as f64);
    rep.note(format!(
        "σ = {:?}",
        out.selected_rings
    ));
    for (flag, msg) in [
        (partition_ok, "Σ_A #I_A ≠ N^{d+1}"),
        (sectors_ok, "more sectors than d·N^{d−1}"),
        (seq_ok, "sequence count exceeds Σ_A (#I_A/N + 2N + 1)"),
        (holds, "Σ μ^{p′} exceeds K_emp·N^d"),
    ] {
        if !flag {
            rep.note(msg);
        }
    }
    rep.conclude(partition_ok && sectors_ok && seq_ok && holds)
}

/// Power-law summability check for a non-increasing sequence.
///
/// Fits `C = max_N S_N / N^α` with `S_N = Σ_{j≤N} b_j` and verifies
/// `b_N ≤ C·N^{α−1}` for every `N`. The `O(N^α)` premise is judged by the
/// log-log slope of `S_N` over the last decade (or the whole range when
/// shorter); a slope above `α + 0.05` yields a skipped report. The trend of
/// `Σ b_j^q` over dyadic blocks is recorded.
pub fn lema1_check(b: &[f64], alpha: f64, q: f64) -> Result<CertificationReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("α must lie in (0, 1), got {alpha}")));
    }
    if !(q > 0.0) {
        return Err(Error::Domain(format!("q must be positive, got {q}")));
    }
    if b.is_empty() {
        return Err(Error::Precondition("empty sequence".into()));
    }
    if let Some(i) = b.iter().position(|&x| !(x >= 0.0 && x.is_finite())) {
        return Err(Error::Precondition(format!("b_{} = {} is not a finite nonnegative number", i + 1, b[i])));
    }
    if let Some(i) = b.windows(2).position(|w| w[1] > w[0]) {
        return Err(Error::Precondition(format!(
            "sequence increases at j={}: {} < {}",
            i + 2,
            b[i],
            b[i + 1]
        )));
    }
    let mut rep = CertificationReport::new("lema1")
        .param("alpha", alpha)
        .param("q", q)
        .param("len", b.len())
        .tolerance(REL_SLACK);
    let partial: Vec<f64> = b
        .iter()
        .scan(0.0, |s, &x| {
            *s += x;
            Some(*s)
        })
        .collect();
    let len = b.len();
    let start = (len / 10).max(1);
    let slope = if len > start && partial[start - 1] > 0.0 {
        (partial[len - 1] / partial[start - 1]).ln() / (len as f64 / start as f64).ln()
    } else {
        0.0
    };
    rep.observe("loglog_slope", slope);
    let c = partial
        .iter()
        .enumerate()
        .map(|(i, s)| s / ((i + 1) as f64).powf(alpha))
        .fold(0.0, f64::max);
    rep.observe("C", c);

    let mut blocks = Vec::new();
    let mut block = 0.0;
    let mut acc = 0.0;
    let mut next = 1usize;
    for (i, &x) in b.iter().enumerate() {
        let t = if x == 0.0 { 0.0 } else { x.powf(q) };
        block += t;
        acc += t;
        if i + 1 == next {
            blocks.push(block);
            block = 0.0;
            next *= 2;
        }
    }
    let dyadic = &blocks[1.min(blocks.len())..];
    if let Some(r) = increment_ratio(dyadic) {
        rep.observe("lq_increment_ratio", r);
    }
    rep.observe("lq_partial_sum", acc);
    rep.note(format!("ℓ_q dyadic trend {} (heuristic)", classify_trend(dyadic)));
    if q <= 1.0 / (1.0 - alpha) {
        rep.note(format!("q ≤ 1/(1−α) = {}: ℓ_q membership not implied", 1.0 / (1.0 - alpha)));
    }
    if slope > alpha + 0.05 {
        return Ok(rep.skipped(format!(
            "premise S_N = O(N^α) not supported: log-log slope {slope:.4} > α + 0.05"
        )));
    }
    let violation = b
        .iter()
        .enumerate()
        .find(|&(i, &x)| x > c * ((i + 1) as f64).powf(alpha - 1.0) * (1.0 + REL_SLACK));
    if let Some((i, _)) = violation {
        rep.note(format!("b_N ≤ C·N^(α−1) fails at N={}", i + 1));
    }
    Ok(rep.conclude(violation.is_none()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Status;

    #[test]
    fn rearrangement() {
        assert_eq!(rearrange_nonincreasing(&[3.0, 1.0, 2.0]), vec![0, 2, 1]);
        assert_eq!(rearrange_nonincreasing(&[3.0, 2.0, 2.0, 1.0]), vec![0, 1, 2, 3]);
        assert_eq!(rearrange_nonincreasing(&[1.0, 2.0, 2.0]), vec![1, 2, 0]);
    }

    #[test]
    fn counting_for_one() {
        let cfg = DiagnosticsConfig::new(2, 2.0, 0.1, 7, 2).unwrap();
        let out = krok2_counting(&MultiplierSymbol::one(2), &cfg).unwrap();
        assert_eq!(out.selected_rings, (0..8).collect::<Vec<_>>());
        let want: f64 = (0..8).map(|k| 9f64.powi(-k)).sum();
        assert!((out.total - want).abs() < 1e-14);
        let rep = krok2_counting_certify(&MultiplierSymbol::one(2), &cfg);
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn lema1_examples() {
        let b: Vec<f64> = (1..=10_000).map(|j| (j as f64).powf(-0.5)).collect();
        assert!(lema1_check(&b, 0.5, 3.0).unwrap().passed());
        assert!(lema1_check(&[0.0; 50], 0.5, 1.5).unwrap().passed());
        let h: Vec<f64> = (1..=10_000).map(|j| 1.0 / j as f64).collect();
        assert_eq!(lema1_check(&h, 0.01, 2.0).unwrap().status, Status::Skipped);
        assert!(matches!(lema1_check(&[1.0, 2.0], 0.5, 3.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn pre_krok2_axis_sequence() {
        let seq = SparseSequence::new(vec![LatticePoint::from([1, 0]), LatticePoint::from([9, 0])], 2.0).unwrap();
        let quad = Quadrature::tensor(8);
        let rep = pre_krok2_certify(&MultiplierSymbol::one(2), &seq, 2.0, &quad);
        assert!(rep.passed(), "{rep:?}");
        let lhs = rep.observed_value("lhs").unwrap();
        assert!((lhs - (1.0 + 1.0 / 81.0)).abs() < 1e-14);
    }

    #[test]
    fn pre_krok2_off_support() {
        let mut t = BTreeMap::new();
        t.insert(LatticePoint::from([2, 0]), num_complex::Complex64::new(1.0, 0.0));
        let sym = MultiplierSymbol::table(2, "off", t).unwrap();
        let seq = SparseSequence::new(vec![LatticePoint::from([1, 0]), LatticePoint::from([9, 0])], 2.0).unwrap();
        let rep = pre_krok2_certify(&sym, &seq, 2.0, &Quadrature::tensor(8));
        assert_eq!(rep.observed_value("lhs"), Some(0.0));
        assert!(rep.passed());
    }
}
