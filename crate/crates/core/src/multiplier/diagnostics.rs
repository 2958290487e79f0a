use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rings::{dual_exponent, ring_moments, sweep_cost, RingMoments, RingStats, MAX_SWEEP_POINTS};
use super::symbol::{apply, Boundedness, MultiplierSymbol};
use crate::error::{Error, Result};
use crate::lattice::LatticePoint;
use crate::report::CertificationReport;
use crate::trigpoly::TrigPoly;

/// Factor by which a ring sum may exceed the median before flatness fails.
pub const FLATNESS_FACTOR: f64 = 4.0;
/// Averaged increment ratio below which a trend counts as convergent.
pub const CONVERGENT_RATIO: f64 = 0.9;
/// Averaged increment ratio above which a trend counts as divergent.
pub const DIVERGENT_RATIO: f64 = 1.02;
/// Number of trailing increment ratios the classifier averages.
pub const TREND_WINDOW: usize = 3;
/// `μ_K / max μ_k` at or above which decay is flagged as absent.
pub const DECAY_FLAG: f64 = 0.5;

/// Exponents shared by the summability diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsConfig {
    pub d: usize,
    pub p: f64,
    pub epsilon: f64,
    pub k_max: u32,
    /// Sector granularity `N`.
    pub n: u32,
    /// `p′ + p′(d+1) + ε`.
    pub q_main: f64,
}

impl DiagnosticsConfig {
    /// Validates `p ∈ (1, 2]`, `ε > 0` and derives `q_main`.
    ///
    /// The exponent is assembled as `p′ + p′(d+1) + ε` in exact rational
    /// arithmetic on the binary values of `p` and `ε` and checked equal to
    /// `p′(d+2) + ε`.
    pub fn new(d: usize, p: f64, epsilon: f64, k_max: u32, n: u32) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("dimension must be positive".into()));
        }
        if !(p > 1.0 && p <= 2.0) {
            return Err(Error::Domain(format!("p must lie in (1, 2], got {p}")));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::Domain(format!("ε must be positive, got {epsilon}")));
        }
        if n == 0 {
            return Err(Error::Domain("N must be positive".into()));
        }
        let (expanded, factored) = q_main_exact(d, p, epsilon)?;
        assert_eq!(expanded, factored, "q_main forms disagree");
        Ok(Self {
            d,
            p,
            epsilon,
            k_max,
            n,
            q_main: expanded.to_f64().expect("finite"),
        })
    }

    pub fn dual(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    /// `p′(d+1) + ε`, the exponent carried by `μ_k` in the split form.
    pub fn split_exponent(&self) -> f64 {
        self.q_main - self.dual()
    }
}

/// `(p′ + p′(d+1) + ε, p′(d+2) + ε)` as exact rationals.
pub fn q_main_exact(d: usize, p: f64, epsilon: f64) -> Result<(BigRational, BigRational)> {
    let conv = |x: f64| BigRational::from_float(x).ok_or_else(|| Error::Domain(format!("{x} is not finite")));
    let p = conv(p)?;
    let eps = conv(epsilon)?;
    let one = BigRational::from_integer(1.into());
    let dual = &p / (&p - &one);
    let dd = BigRational::from_integer(d.into());
    let expanded = &dual + &dual * (&dd + &one) + &eps;
    let factored = &dual * (&dd + BigRational::from_integer(2.into())) + &eps;
    Ok((expanded, factored))
}

/// Outcome of the increment-ratio heuristic on a partial-sum sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trend {
    Convergent,
    Divergent,
    Inconclusive,
}

impl Trend {
    pub fn as_str(self) -> &'static str {
        match self {
            Trend::Convergent => "convergent",
            Trend::Divergent => "divergent",
            Trend::Inconclusive => "inconclusive",
        }
    }
}

impl std::fmt::Display for Trend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Mean of the last three ratios `I_k / I_{k−1}` of a sequence of series
/// increments, or `None` with fewer than three ratios or a vanishing
/// increment. Increments are taken as given rather than as differences of
/// partial sums, which lose them to rounding once a series has settled.
pub fn increment_ratio(inc: &[f64]) -> Option<f64> {
    if inc.len() < TREND_WINDOW + 1 {
        return None;
    }
    let tail = &inc[inc.len() - TREND_WINDOW - 1..];
    if tail[..TREND_WINDOW].iter().any(|&x| x <= 0.0) {
        return None;
    }
    Some(tail.windows(2).map(|w| w[1] / w[0]).sum::<f64>() / TREND_WINDOW as f64)
}

/// Heuristic label for the series with increments `inc`; never a proof of
/// a limit.
pub fn classify_trend(inc: &[f64]) -> Trend {
    match increment_ratio(inc) {
        Some(r) if r < CONVERGENT_RATIO => Trend::Convergent,
        Some(r) if r > DIVERGENT_RATIO => Trend::Divergent,
        _ => Trend::Inconclusive,
    }
}

fn sweep_rings(sym: &MultiplierSymbol, ks: &[u32], ratio_exps: &[f64], abs_exps: &[f64]) -> Result<Vec<RingMoments>> {
    let cost = ks
        .iter()
        .map(|&k| sweep_cost(sym, k).unwrap_or(u128::MAX))
        .fold(0u128, u128::saturating_add);
    if cost > MAX_SWEEP_POINTS {
        return Err(Error::resource(
            format!("sweep over {} rings in d={}", ks.len(), sym.dim()),
            cost,
            MAX_SWEEP_POINTS,
        ));
    }
    ks.par_iter()
        .map(|&k| ring_moments(sym, k, ratio_exps, abs_exps))
        .collect()
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

fn cumulative(xs: impl IntoIterator<Item = f64>) -> Vec<f64> {
    xs.into_iter()
        .scan(0.0, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

/// [`super::ring_stats`] for every `k` in `ks`, swept in parallel.
pub fn ring_stats_range(sym: &MultiplierSymbol, ks: &[u32], p: f64) -> Result<Vec<RingStats>> {
    let q = dual_exponent(p)?;
    Ok(sweep_rings(sym, ks, &[q], &[])?
        .into_iter()
        .zip(ks)
        .map(|(m, &k)| RingStats {
            k,
            ring_sum: m.ratio_sums[0],
            mu_k: m.max_ratio,
            argmax_point: m.argmax,
        })
        .collect())
}

fn with_presupposition(mut rep: CertificationReport, sym: &MultiplierSymbol, p: f64) -> (CertificationReport, bool) {
    let (b, why) = sym.boundedness(p);
    rep.set_param("boundedness", b);
    let ok = b != Boundedness::Unbounded;
    if !ok {
        rep.note(format!("presupposition violated: {why}; computed for the record, cannot pass"));
    } else if b == Boundedness::Unknown {
        rep.note(format!("boundedness {b}: {why}"));
    }
    (rep, ok)
}

/// Ring sums `Σ_{R_k} (|λ_n|/|n|_2)^{p′}` over `ks`; passes iff the maximum
/// is at most [`FLATNESS_FACTOR`] times the larger of the median and the
/// first ring sum, and the symbol is not catalogued as unbounded. An
/// empirical stand-in for "independent of k" under which decaying sums pass.
pub fn krok1_flatness_certify(sym: &MultiplierSymbol, p: f64, ks: &[u32]) -> CertificationReport {
    let rep = CertificationReport::new("krok1")
        .param("symbol", sym.name())
        .param("d", sym.dim())
        .param("p", p)
        .param("k_range", k_range_label(ks));
    let (mut rep, presup) = with_presupposition(rep, sym, p);
    if ks.is_empty() {
        return rep.skipped("empty k range");
    }
    let stats = match ring_stats_range(sym, ks, p) {
        Ok(s) => s,
        Err(e) => return rep.failed_with(&e),
    };
    let sums: Vec<f64> = stats.iter().map(|s| s.ring_sum).collect();
    for s in &stats {
        rep.observe(&format!("ring_sum_{}", s.k), s.ring_sum);
    }
    let max = sums.iter().copied().fold(0.0, f64::max);
    let med = median(&sums);
    rep.observe("max", max);
    rep.observe("median", med);
    rep.observe("C", max);
    let flat = max <= FLATNESS_FACTOR * med.max(sums[0]);
    rep.note(format!("heuristic: max ≤ {FLATNESS_FACTOR}×max(median, first) over the tested rings"));
    rep.conclude(flat && presup)
}

fn k_range_label(ks: &[u32]) -> String {
    match (ks.first(), ks.last()) {
        (Some(a), Some(b)) if ks.len() as u32 == b - a + 1 => format!("{a}..{b}"),
        _ => ks.iter().map(u32::to_string).collect::<Vec<_>>().join(","),
    }
}

/// Partial Schatten norms `(Σ_{ring(n) ≤ K} |λ_n|^p)^{1/p}` for `K = 0..=k_max`.
pub fn schatten_partials(sym: &MultiplierSymbol, p: f64, k_max: u32) -> Result<Vec<f64>> {
    if !(p > 0.0) {
        return Err(Error::Domain(format!("Schatten exponent must be positive, got {p}")));
    }
    let ks: Vec<u32> = (0..=k_max).collect();
    let rings = sweep_rings(sym, &ks, &[], &[p])?;
    Ok(cumulative(rings.iter().map(|m| m.abs_sums[0]))
        .into_iter()
        .map(|s| s.powf(1.0 / p))
        .collect())
}

/// `(Σ_{ring(n) ≤ K} |λ_n|^p)^{1/p}`.
pub fn schatten_partial(sym: &MultiplierSymbol, p: f64, k: u32) -> Result<f64> {
    Ok(*schatten_partials(sym, p, k)?.last().expect("k_max + 1 rings"))
}

/// Partial sums of the main-theorem series and the split-form bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MainSumReport {
    pub q_main: f64,
    /// `Σ_{R_k} (|λ_n|/|n|_2)^{q_main}` per ring.
    pub ring_terms: Vec<f64>,
    /// `S(K) = Σ_{ring(n) ≤ K} (|λ_n|/|n|_2)^{q_main}`.
    pub partial_sums: Vec<f64>,
    pub mu: Vec<f64>,
    /// `Σ_{R_k} (|λ_n|/|n|_2)^{p′}` per ring.
    pub ring_sums: Vec<f64>,
    /// `C = max_k` of the ring sums.
    pub c: f64,
    /// `C · Σ_{k ≤ K} μ_k^{p′(d+1)+ε}`.
    pub split_bound: Vec<f64>,
    /// Every ring satisfies `Σ_{R_k}(…)^{q_main} ≤ Σ_{R_k}(…)^{p′} μ_k^{p′(d+1)+ε}`.
    pub split_holds: bool,
    pub trend: Trend,
}

/// Relative slack on the split inequality, which is exact up to rounding.
const SPLIT_SLACK: f64 = 1e-12;

pub fn main_sum_partial(sym: &MultiplierSymbol, cfg: &DiagnosticsConfig) -> Result<MainSumReport> {
    if sym.dim() != cfg.d {
        return Err(Error::Precondition(format!("symbol has d={}, config has d={}", sym.dim(), cfg.d)));
    }
    let ks: Vec<u32> = (0..=cfg.k_max).collect();
    let rings = sweep_rings(sym, &ks, &[cfg.dual(), cfg.q_main], &[])?;
    let rest = cfg.split_exponent();
    let mu: Vec<f64> = rings.iter().map(|m| m.max_ratio).collect();
    let ring_sums: Vec<f64> = rings.iter().map(|m| m.ratio_sums[0]).collect();
    let split_holds = rings.iter().all(|m| {
        let rhs = m.ratio_sums[0] * m.max_ratio.powf(rest);
        m.ratio_sums[1] <= rhs * (1.0 + SPLIT_SLACK)
    });
    let c = ring_sums.iter().copied().fold(0.0, f64::max);
    let ring_terms: Vec<f64> = rings.iter().map(|m| m.ratio_sums[1]).collect();
    let partial_sums = cumulative(ring_terms.iter().copied());
    let split_bound = cumulative(mu.iter().map(|m| m.powf(rest))).into_iter().map(|s| c * s).collect();
    Ok(MainSumReport {
        q_main: cfg.q_main,
        trend: classify_trend(&ring_terms[1..]),
        ring_terms,
        partial_sums,
        mu,
        ring_sums,
        c,
        split_bound,
        split_holds,
    })
}

/// [`main_sum_partial`] as a report; passes iff the split form holds on every ring.
pub fn main_sum_certify(sym: &MultiplierSymbol, cfg: &DiagnosticsConfig) -> CertificationReport {
    let mut rep = CertificationReport::new("main_sum")
        .param("symbol", sym.name())
        .param("d", cfg.d)
        .param("p", cfg.p)
        .param("eps", cfg.epsilon)
        .param("k_max", cfg.k_max)
        .param("q_main", cfg.q_main);
    match main_sum_partial(sym, cfg) {
        Ok(m) => {
            rep.observe("C", m.c);
            rep.observe("partial_sum", *m.partial_sums.last().unwrap());
            rep.observe("split_bound", *m.split_bound.last().unwrap());
            if let Some(r) = increment_ratio(&m.ring_terms[1..]) {
                rep.observe("increment_ratio", r);
            }
            rep.note(format!("trend {} (heuristic)", m.trend));
            rep.conclude(m.split_holds)
        }
        Err(e) => rep.failed_with(&e),
    }
}

/// `μ_k` for `k = 0..=k_max` and the trend `μ_{k_max} / max_k μ_k`.
///
/// Passes iff the trend is below [`DECAY_FLAG`] and the symbol is not
/// catalogued as unbounded. A flag is evidence against boundedness, not a
/// proof.
pub fn lema2_decay_report(sym: &MultiplierSymbol, p: f64, k_max: u32) -> CertificationReport {
    let rep = CertificationReport::new("lema2")
        .param("symbol", sym.name())
        .param("d", sym.dim())
        .param("p", p)
        .param("k_max", k_max);
    let (mut rep, presup) = with_presupposition(rep, sym, p);
    let ks: Vec<u32> = (0..=k_max).collect();
    let stats = match ring_stats_range(sym, &ks, p) {
        Ok(s) => s,
        Err(e) => return rep.failed_with(&e),
    };
    for s in &stats {
        rep.observe(&format!("mu_{}", s.k), s.mu_k);
    }
    let max = stats.iter().map(|s| s.mu_k).fold(0.0, f64::max);
    let last = stats.last().map_or(0.0, |s| s.mu_k);
    let trend = if max > 0.0 { last / max } else { 0.0 };
    rep.observe("trend", trend);
    let flagged = trend >= DECAY_FLAG;
    if flagged {
        rep.note("μ_k does not decay: evidence against boundedness");
    }
    rep.conclude(!flagged && presup)
}

/// One row of a sharpness table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharpnessRow {
    pub exponent: f64,
    pub k: u32,
    pub partial_sum: f64,
    pub trend: Trend,
}

/// Partial sums of `Σ (|λ_n|/|n|_2)^e` for `K = 1..=k_max` and each `e`,
/// each tagged with the trend of its sequence up to that `K`.
pub fn sharpness_explore(sym: &MultiplierSymbol, exponents: &[f64], k_max: u32) -> Result<Vec<SharpnessRow>> {
    if exponents.is_empty() {
        return Err(Error::Domain("empty exponent grid".into()));
    }
    if let Some(e) = exponents.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        return Err(Error::Domain(format!("exponents must be positive, got {e}")));
    }
    let ks: Vec<u32> = (0..=k_max).collect();
    let rings = sweep_rings(sym, &ks, exponents, &[])?;
    let mut rows = Vec::new();
    for (i, &e) in exponents.iter().enumerate() {
        let ring_sums: Vec<f64> = rings.iter().map(|m| m.ratio_sums[i]).collect();
        let partial = cumulative(ring_sums.iter().copied());
        for k in 1..=k_max as usize {
            rows.push(SharpnessRow {
                exponent: e,
                k: k as u32,
                partial_sum: partial[k],
                trend: classify_trend(&ring_sums[1..=k]),
            });
        }
    }
    Ok(rows)
}

/// Final trend per exponent.
pub fn sharpness_summary(rows: &[SharpnessRow]) -> Vec<(f64, Trend)> {
    let mut out: Vec<(f64, Trend)> = Vec::new();
    for r in rows {
        match out.last_mut() {
            Some(last) if last.0 == r.exponent => last.1 = r.trend,
            _ => out.push((r.exponent, r.trend)),
        }
    }
    out
}

/// Singular values of `P T P` where `P` projects onto `span{e_n : n ∈ freqs}`.
///
/// The matrix is assembled column by column from [`apply`] on characters and
/// factored by a general complex SVD, so diagonality is not assumed.
pub fn truncated_singular_values(sym: &MultiplierSymbol, freqs: &[LatticePoint]) -> Result<Vec<f64>> {
    let n = freqs.len();
    let mut mat = DMatrix::<Complex64>::zeros(n, n);
    for (col, m) in freqs.iter().enumerate() {
        let image = apply(sym, &TrigPoly::character(m))?;
        for (row, r) in freqs.iter().enumerate() {
            mat[(row, col)] = image.coeff(r);
        }
    }
    let mut sv: Vec<f64> = mat.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// `|λ_n|` over `freqs`, sorted non-increasing.
pub fn sorted_abs_symbol(sym: &MultiplierSymbol, freqs: &[LatticePoint]) -> Vec<f64> {
    let mut v: Vec<f64> = freqs.iter().map(|n| sym.eval(n).norm()).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Compares [`sorted_abs_symbol`] with [`truncated_singular_values`].
pub fn schatten_svd_check(sym: &MultiplierSymbol, freqs: &[LatticePoint], tol: f64) -> CertificationReport {
    let mut rep = CertificationReport::new("schatten_svd")
        .param("symbol", sym.name())
        .param("d", sym.dim())
        .param("frequencies", freqs.len())
        .tolerance(tol);
    let sv = match truncated_singular_values(sym, freqs) {
        Ok(s) => s,
        Err(e) => return rep.failed_with(&e),
    };
    let lam = sorted_abs_symbol(sym, freqs);
    let dev = sv.iter().zip(&lam).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    rep.observe("max_deviation", dev);
    rep.observe("largest_singular_value", sv.first().copied().unwrap_or(0.0));
    rep.conclude(dev <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{ring_points, TriadicRingIndex};

    #[test]
    fn q_main_for_p2() {
        for d in 1..=4 {
            let (a, b) = q_main_exact(d, 2.0, 0.1).unwrap();
            assert_eq!(a, b);
            let want = BigRational::from_integer((2 * d + 4).into()) + BigRational::from_float(0.1).unwrap();
            assert_eq!(a, want);
        }
        assert!((DiagnosticsConfig::new(2, 2.0, 0.1, 3, 2).unwrap().q_main - 8.1).abs() < 1e-15);
    }

    #[test]
    fn classifier() {
        let geo: Vec<f64> = (0..8).map(|k| 0.5f64.powi(k)).collect();
        assert_eq!(classify_trend(&geo), Trend::Convergent);
        let lin: Vec<f64> = (0..8).map(|k| 1.1f64.powi(k)).collect();
        assert_eq!(classify_trend(&lin), Trend::Divergent);
        assert_eq!(classify_trend(&geo[..3]), Trend::Inconclusive);
        let tiny: Vec<f64> = (0..8).map(|k| 1e-30 * 0.5f64.powi(k)).collect();
        assert_eq!(classify_trend(&tiny), Trend::Convergent);
    }

    #[test]
    fn schatten_single_point() {
        let mut t = std::collections::BTreeMap::new();
        t.insert(LatticePoint::from([1, 0]), Complex64::new(1.0, 0.0));
        let sym = MultiplierSymbol::table(2, "e10", t).unwrap();
        for p in [0.5, 1.0, 3.0] {
            assert!((schatten_partial(&sym, p, 2).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn schatten_power_two_is_cauchy() {
        let s = schatten_partials(&MultiplierSymbol::power(2, 2.0), 2.0, 4).unwrap();
        assert!(s.windows(2).all(|w| w[1] >= w[0]));
        let inc: Vec<f64> = s.windows(2).map(|w| w[1] - w[0]).collect();
        assert!(inc.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn flatness_for_one_and_norm() {
        let ks: Vec<u32> = (0..=4).collect();
        assert!(krok1_flatness_certify(&MultiplierSymbol::one(2), 2.0, &ks).passed());
        assert!(!krok1_flatness_certify(&MultiplierSymbol::norm(2), 2.0, &ks).passed());
    }

    #[test]
    fn decaying_ring_sums_are_flat() {
        let ks: Vec<u32> = (0..=3).collect();
        assert!(krok1_flatness_certify(&MultiplierSymbol::one(1), 2.0, &ks).passed());
        assert!(krok1_flatness_certify(&MultiplierSymbol::power(2, 1.0), 2.0, &ks).passed());
        assert!(!krok1_flatness_certify(&MultiplierSymbol::norm(1), 2.0, &ks).passed());
    }

    #[test]
    fn split_form_termwise() {
        let sym = MultiplierSymbol::power(2, 0.3);
        let cfg = DiagnosticsConfig::new(2, 1.5, 0.2, 2, 2).unwrap();
        let m = main_sum_partial(&sym, &cfg).unwrap();
        assert!(m.split_holds);
        for k in 0..=2 {
            for n in ring_points(TriadicRingIndex(k), 2).unwrap() {
                let r = sym.eval(&n).norm() / n.euclid_norm();
                let lhs = r.powf(cfg.q_main);
                let rhs = r.powf(cfg.dual()) * m.mu[k as usize].powf(cfg.split_exponent());
                assert!(lhs <= rhs * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn lema2_controls() {
        assert!(lema2_decay_report(&MultiplierSymbol::one(2), 2.0, 5).passed());
        assert!(!lema2_decay_report(&MultiplierSymbol::norm(2), 2.0, 5).passed());
        let z = lema2_decay_report(&MultiplierSymbol::zero(2), 2.0, 3);
        assert!(z.passed());
        assert_eq!(z.observed_value("mu_3"), Some(0.0));
    }

    #[test]
    fn svd_matches_sorted_symbol() {
        let freqs: Vec<LatticePoint> = ring_points(TriadicRingIndex(0), 2).unwrap().take(20).collect();
        let rep = schatten_svd_check(&MultiplierSymbol::power(2, 1.5), &freqs, 1e-10);
        assert!(rep.passed(), "{rep:?}");
    }
}
