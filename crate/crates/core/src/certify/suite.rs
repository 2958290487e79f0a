use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::config::SuiteConfig;
use crate::error::{Error, Result};
use crate::kernels::{
    fejer_ring_lower_bound, fejer_w11_certify, gradient_report, random_sector_riesz, riesz_expansion_check,
    riesz_l1_certify, tozsamosc_check, wspol_certify, RieszProductSpec, TestPhiSpec,
};
use crate::lattice::{euclid_bounds_hold, for_each_ring_point, LatticePoint, SparseSequence, TriadicRingIndex};
use crate::multiplier::{
    catalog_witnesses, compose_factorization, krok1_flatness_certify, krok2_counting_certify, lema1_check,
    lema2_decay_report, main_sum_certify, pre_krok2_certify, rearrange_nonincreasing, ring_stats_range,
    Boundedness, DiagnosticsConfig, MultiplierSymbol,
};
use crate::report::CertificationReport;
use crate::trigpoly::{bernstein_check, hausdorff_young_check, rational, Coeff, GridSpec, Quadrature, TrigPoly};

/// Every claim id the suite can emit, with a one-line statement.
pub const CLAIMS: &[(&str, &str)] = &[
    ("euck", "3^k ≤ |n|_2 ≤ √d·3^{k+1} on R_k, in exact integers"),
    ("fejer_ring", "product Fejér coefficients are ≥ (2/3)^d on R_k, in exact rationals"),
    ("fejer_w11", "‖φ‖_{1,1} ≤ 1 + d·3^{k+2} for the product Fejér kernel"),
    ("bernstein", "‖f′‖_1 ≤ 2π·deg f·‖f‖_1 on T"),
    ("hausdorff_young", "‖f̂‖_{p′} ≤ ‖f‖_p for 1 < p ≤ 2"),
    ("riesz_expansion", "the sign-pattern expansion equals the Riesz product pointwise"),
    ("riesz_l1", "the Riesz product is nonnegative with mean 1, so ‖R‖_1 = 1"),
    ("tozsamosc", "R − 1 = Σ_l cos(2π⟨n_l,t⟩)·ψ_l, coefficient by coefficient"),
    ("wspol", "C′ = 3^N·max H_l coefficient bound is finite"),
    ("lemgl", "‖∂_{j0}φ‖_1 ≤ 2; off-axis gradient norms recorded"),
    ("pre_krok2", "Σ_i(|λ_{n_i}|/|n_i|_2)^{p′} ≤ (4π)^{p′}‖Tφ‖_p^{p′} on one sector sequence"),
    ("r1", "Σ_{j≤N^{d+1}} μ_{σ(j)}^{p′} ≤ K·N^d"),
    ("krok1", "ring sums Σ_{R_k}(|λ_n|/|n|_2)^{p′} bounded independently of k"),
    ("main_sum", "split-form bound for Σ(|λ_n|/|n|_2)^{q_main}"),
    ("lema1", "Σ_{j≤N} b_j = O(N^α) for non-increasing b forces b_N = O(N^{α−1})"),
    ("lema2", "μ_k → 0 for a bounded multiplier"),
    ("factorization", "Σ|α_nβ_n|^p ≤ ‖B‖^p Σ(|α_n|/|n|_2)^p"),
];

/// Claim families in suite order, each with the claim ids it emits.
pub const FAMILIES: &[(&str, &[&str])] = &[
    ("euck", &["euck"]),
    ("fejer", &["fejer_ring", "fejer_w11"]),
    ("bernstein", &["bernstein"]),
    ("hausdorff_young", &["hausdorff_young"]),
    ("riesz", &["riesz_expansion", "riesz_l1", "tozsamosc"]),
    ("wspol", &["wspol"]),
    ("lemgl", &["lemgl"]),
    ("pre_krok2", &["pre_krok2"]),
    ("r1", &["r1"]),
    ("krok1", &["krok1"]),
    ("main_sum", &["main_sum"]),
    ("lema1", &["lema1"]),
    ("lema2", &["lema2"]),
    ("factorization", &["factorization"]),
];

/// Degree of the random polynomials in the Bernstein and Hausdorff–Young fixtures.
const FIXTURE_DEGREE: i64 = 6;
const FIXTURE_TERMS: usize = 8;

/// Reports of one suite run together with the generated fixtures.
#[derive(Clone, Debug)]
pub struct SuiteRun {
    pub reports: Vec<CertificationReport>,
    /// `(file stem, JSON)` for every generated input.
    pub fixtures: Vec<(String, Value)>,
}

impl SuiteRun {
    pub fn all_meet_expectation(&self) -> bool {
        self.reports.iter().all(CertificationReport::meets_expectation)
    }
}

/// Runs every claim family.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteRun> {
    run_suite_only(cfg, None)
}

/// Runs the families that emit at least one of `only` (all when `None`) and
/// keeps only the selected claims. Unknown claim ids are an error.
pub fn run_suite_only(cfg: &SuiteConfig, only: Option<&[String]>) -> Result<SuiteRun> {
    cfg.validate().map_err(|msg| Error::Parse { line: 0, msg })?;
    if let Some(ids) = only {
        if let Some(bad) = ids.iter().find(|id| !CLAIMS.iter().any(|(c, _)| c == id)) {
            return Err(Error::Precondition(format!("unknown claim id {bad:?}")));
        }
    }
    let wants = |id: &str| only.is_none_or(|ids| ids.iter().any(|x| x == id));
    let ctx = Context::new(cfg)?;
    let outputs: Vec<Vec<CertificationReport>> = FAMILIES
        .par_iter()
        .enumerate()
        .map(|(i, (_, claims))| {
            if claims.iter().any(|c| wants(c)) {
                run_family(i, &ctx, &wants)
            } else {
                Vec::new()
            }
        })
        .collect();
    let reports = outputs.into_iter().flatten().filter(|r| wants(&r.claim_id)).collect();
    Ok(SuiteRun {
        reports,
        fixtures: ctx.fixtures(),
    })
}

struct SymbolCase {
    name: String,
    expect_fail: bool,
}

struct Context<'a> {
    cfg: &'a SuiteConfig,
    /// Riesz specs per `(d, N)`, in config order.
    specs: Vec<(usize, u32, Result<RieszProductSpec>)>,
    symbols: Vec<SymbolCase>,
}

fn stream_rng(seed: u64, family: u64, d: usize, n: u32, extra: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((family << 48) ^ ((d as u64) << 40) ^ ((n as u64) << 32) ^ extra);
    rng
}

impl<'a> Context<'a> {
    fn new(cfg: &'a SuiteConfig) -> Result<Self> {
        let mut specs = Vec::new();
        for &d in &cfg.dims {
            for &n in &cfg.n_values {
                specs.push((d, n, seeded_riesz_spec(d, n, cfg.seed)));
            }
        }
        let mut symbols: Vec<SymbolCase> = cfg
            .symbols
            .iter()
            .map(|s| SymbolCase {
                name: s.clone(),
                expect_fail: false,
            })
            .collect();
        if cfg.negative_controls {
            if let Some(s) = symbols.iter_mut().find(|s| s.name == "norm") {
                s.expect_fail = true;
            } else {
                symbols.push(SymbolCase {
                    name: "norm".into(),
                    expect_fail: true,
                });
            }
        }
        Ok(Self { cfg, specs, symbols })
    }

    fn fixtures(&self) -> Vec<(String, Value)> {
        let mut out = Vec::new();
        for (d, n, spec) in &self.specs {
            if let Ok(spec) = spec {
                out.push((
                    riesz_fixture_name(*d, *n),
                    json!({
                        "schema": crate::report::SCHEMA,
                        "kind": "riesz_spec",
                        "d": d,
                        "N": n,
                        "seed": self.cfg.seed,
                        "freqs": spec.freqs().iter().map(|p| p.coords().to_vec()).collect::<Vec<_>>(),
                    }),
                ));
            }
        }
        for &d in &self.cfg.dims {
            let f = random_poly(d, self.cfg.seed, 3, 0);
            out.push((
                format!("poly_d{d}"),
                json!({
                    "schema": crate::report::SCHEMA,
                    "kind": "trig_poly",
                    "d": d,
                    "seed": self.cfg.seed,
                    "terms": crate::trigpoly::to_json(&f),
                }),
            ));
        }
        out
    }

    fn quad_for(&self, spec: &RieszProductSpec) -> Quadrature {
        Quadrature::with_generators(self.cfg.oversampling, spec.freqs().to_vec(), self.cfg.seed)
            .lattice_size(self.cfg.lattice_log2)
    }
}

/// The same-sector Riesz spec the suite derives from `seed` for `(d, N)`.
pub fn seeded_riesz_spec(d: usize, n: u32, seed: u64) -> Result<RieszProductSpec> {
    random_sector_riesz(d, n, &mut stream_rng(seed, 5, d, n, 0))
}

fn riesz_fixture_name(d: usize, n: u32) -> String {
    format!("riesz_d{d}_N{n}")
}

/// Seeded polynomial with small rational coefficients on `T^d`.
fn random_poly(d: usize, seed: u64, family: u64, extra: u64) -> TrigPoly {
    let mut rng = stream_rng(seed, family, d, 0, extra);
    let mut f = TrigPoly::zero(d);
    for _ in 0..FIXTURE_TERMS {
        let n = LatticePoint::new((0..d).map(|_| rng.gen_range(-FIXTURE_DEGREE..=FIXTURE_DEGREE)));
        let re = rational(rng.gen_range(-8..=8), 8);
        let im = rational(rng.gen_range(-8..=8), 8);
        f.add_term(n, Coeff::Exact(num_complex::Complex::new(re, im)));
    }
    f
}

fn run_family(index: usize, ctx: &Context<'_>, wants: &dyn Fn(&str) -> bool) -> Vec<CertificationReport> {
    let cfg = ctx.cfg;
    let mut out = Vec::new();
    match FAMILIES[index].0 {
        "euck" => {
            for &d in &cfg.dims {
                for k in cfg.ks() {
                    out.push(euck_certify(d, k));
                }
            }
        }
        "fejer" => {
            for &d in &cfg.dims {
                for k in cfg.ks() {
                    if wants("fejer_ring") {
                        out.push(lift(fejer_ring_lower_bound(d, k), "fejer_ring", &[("d", d.to_string()), ("k", k.to_string())]));
                    }
                    if wants("fejer_w11") {
                        out.push(lift(
                            fejer_w11_certify(d, k, cfg.oversampling),
                            "fejer_w11",
                            &[("d", d.to_string()), ("k", k.to_string())],
                        ));
                    }
                }
            }
        }
        "bernstein" => {
            for &d in &cfg.dims {
                let base = CertificationReport::new("bernstein").param("d", d);
                if d != 1 {
                    out.push(base.skipped("Bernstein check is one-dimensional"));
                    continue;
                }
                let f = random_poly(d, cfg.seed, 3, 0);
                let r = GridSpec::for_poly(&f, cfg.oversampling).and_then(|g| bernstein_check(&f, &g));
                out.push(with_fixture(lift(r, "bernstein", &[("d", d.to_string())]), &format!("poly_d{d}")));
            }
        }
        "hausdorff_young" => {
            for &d in &cfg.dims {
                let f = random_poly(d, cfg.seed, 3, 0);
                for &p in &cfg.p_values {
                    let r = GridSpec::for_poly(&f, cfg.oversampling).and_then(|g| hausdorff_young_check(&f, p, &g));
                    out.push(with_fixture(
                        lift(r, "hausdorff_young", &[("d", d.to_string()), ("p", p.to_string())]),
                        &format!("poly_d{d}"),
                    ));
                }
            }
        }
        "riesz" => {
            riesz_family(ctx, wants, &mut out);
        }
        "wspol" => {
            for_each_spec(ctx, "wspol", &mut out, |spec, _| {
                TestPhiSpec::along_dominant_axis(spec.clone()).map(|t| wspol_certify(&t))
            });
        }
        "lemgl" => {
            for_each_spec(ctx, "lemgl", &mut out, |spec, quad| {
                gradient_report(&TestPhiSpec::along_dominant_axis(spec.clone())?, quad)
            });
        }
        "pre_krok2" => {
            for case in ctx.symbols.iter().filter(|c| cfg.symbols.contains(&c.name)) {
                for &p in &cfg.p_values {
                    for_each_spec(ctx, "pre_krok2", &mut out, |spec, quad| {
                        let sym = MultiplierSymbol::parse(spec.dim(), &case.name)?;
                        let seq = SparseSequence::new(spec.freqs().to_vec(), spec.len() as f64)?;
                        Ok(pre_krok2_certify(&sym, &seq, p, quad).param("p", p))
                    });
                }
            }
        }
        "r1" => {
            for_symbols(ctx, "r1", &mut out, false, |sym, d, p| {
                let mut reps = Vec::new();
                if cfg.n_values.is_empty() {
                    reps.push(CertificationReport::new("r1").skipped("no N values configured"));
                }
                for &n in &cfg.n_values {
                    let rings = (n as u64).checked_pow(d as u32 + 1).unwrap_or(u64::MAX);
                    let k_max = (rings - 1).min(u32::MAX as u64) as u32;
                    reps.push(match DiagnosticsConfig::new(d, p, cfg.eps, k_max, n) {
                        Ok(dc) => krok2_counting_certify(sym, &dc),
                        Err(e) => CertificationReport::new("r1").param("N", n).failed_with(&e),
                    });
                }
                reps
            });
        }
        "krok1" => {
            for_symbols(ctx, "krok1", &mut out, true, |sym, _, p| {
                vec![krok1_flatness_certify(sym, p, &cfg.ks())]
            });
        }
        "main_sum" => {
            for_symbols(ctx, "main_sum", &mut out, false, |sym, d, p| {
                vec![match DiagnosticsConfig::new(d, p, cfg.eps, cfg.k_max(), 1) {
                    Ok(dc) => main_sum_certify(sym, &dc),
                    Err(e) => CertificationReport::new("main_sum").failed_with(&e),
                }]
            });
        }
        "lema1" => {
            for_symbols(ctx, "lema1", &mut out, false, |sym, d, p| vec![lema1_on_rings(sym, d, p, cfg)]);
        }
        "lema2" => {
            for_symbols(ctx, "lema2", &mut out, true, |sym, _, p| vec![lema2_decay_report(sym, p, cfg.k_max())]);
        }
        "factorization" => {
            for &d in &cfg.dims {
                for (i, (w, p)) in catalog_witnesses(d).into_iter().enumerate() {
                    out.push(compose_factorization(&w, p, cfg.k_max()).param("witness", i + 1));
                }
            }
        }
        other => unreachable!("unknown family {other}"),
    }
    out
}

fn lift(r: Result<CertificationReport>, claim: &str, params: &[(&str, String)]) -> CertificationReport {
    r.unwrap_or_else(|e| {
        let mut rep = CertificationReport::new(claim);
        for (k, v) in params {
            rep.set_param(k, v);
        }
        rep.failed_with(&e)
    })
}

fn with_fixture(mut rep: CertificationReport, stem: &str) -> CertificationReport {
    rep.artifacts.push(format!("fixtures/{stem}.json"));
    rep
}

fn spec_params(d: usize, n: u32) -> [(&'static str, String); 2] {
    [("d", d.to_string()), ("N", n.to_string())]
}

fn for_each_spec<F>(ctx: &Context<'_>, claim: &str, out: &mut Vec<CertificationReport>, f: F)
where
    F: Fn(&RieszProductSpec, &Quadrature) -> Result<CertificationReport>,
{
    if ctx.cfg.n_values.is_empty() {
        for &d in &ctx.cfg.dims {
            out.push(CertificationReport::new(claim).param("d", d).skipped("no N values configured"));
        }
        return;
    }
    for (d, n, spec) in &ctx.specs {
        let rep = match spec {
            Ok(spec) => lift(f(spec, &ctx.quad_for(spec)), claim, &spec_params(*d, *n)),
            Err(e) => lift(Err(e.clone()), claim, &spec_params(*d, *n)),
        };
        out.push(with_fixture(rep, &riesz_fixture_name(*d, *n)));
    }
}

fn riesz_family(ctx: &Context<'_>, wants: &dyn Fn(&str) -> bool, out: &mut Vec<CertificationReport>) {
    let claims: Vec<&str> = ["riesz_expansion", "riesz_l1", "tozsamosc"]
        .into_iter()
        .filter(|c| wants(c))
        .collect();
    for claim in claims {
        for_each_spec(ctx, claim, out, |spec, quad| match claim {
            "riesz_expansion" => riesz_expansion_check(spec, quad),
            "riesz_l1" => riesz_l1_certify(spec, quad),
            _ => tozsamosc_check(spec),
        });
    }
}

/// Runs `f` for every configured symbol, dimension and `p`. With
/// `controls`, catalogued-unbounded symbols are marked as expected failures
/// when negative controls are enabled; otherwise the appended `norm` control
/// is not run.
fn for_symbols<F>(ctx: &Context<'_>, claim: &str, out: &mut Vec<CertificationReport>, controls: bool, f: F)
where
    F: Fn(&MultiplierSymbol, usize, f64) -> Vec<CertificationReport>,
{
    for case in &ctx.symbols {
        let explicit = ctx.cfg.symbols.contains(&case.name);
        if !controls && !explicit {
            continue;
        }
        for &d in &ctx.cfg.dims {
            let sym = match MultiplierSymbol::parse(d, &case.name) {
                Ok(s) => s,
                Err(e) => {
                    out.push(CertificationReport::new(claim).param("symbol", &case.name).param("d", d).failed_with(&e));
                    continue;
                }
            };
            for &p in &ctx.cfg.p_values {
                let unbounded = sym.boundedness(p).0 == Boundedness::Unbounded;
                let expect_fail = controls && ctx.cfg.negative_controls && (case.expect_fail || unbounded);
                for rep in f(&sym, d, p) {
                    out.push(rep.expect_fail(expect_fail));
                }
            }
        }
    }
}

/// Every point of `R_k` satisfies `3^{2k} ≤ |n|_2^2 ≤ d·3^{2k+2}`.
pub fn euck_certify(d: usize, k: u32) -> CertificationReport {
    let rep = CertificationReport::new("euck").param("d", d).param("k", k);
    let mut points: u64 = 0;
    let mut first_bad: Option<Vec<i64>> = None;
    let run = for_each_ring_point(TriadicRingIndex(k), d, |c| {
        points += 1;
        if !euclid_bounds_hold(c, TriadicRingIndex(k)) && first_bad.is_none() {
            first_bad = Some(c.to_vec());
        }
    });
    let mut rep = match run {
        Ok(()) => rep,
        Err(e) => return rep.failed_with(&e),
    };
    rep.observe("points", points as f64);
    if let Some(c) = &first_bad {
        rep.note(format!("bound fails at {}", LatticePoint::new(c.iter().copied())));
    }
    rep.conclude(first_bad.is_none() && points > 0)
}

/// `lema1` on the rearranged `μ_k^{p′}`, with `α = d/(d+1)` and
/// `q = d + 1 + ε/p′`.
fn lema1_on_rings(sym: &MultiplierSymbol, d: usize, p: f64, cfg: &SuiteConfig) -> CertificationReport {
    let base = CertificationReport::new("lema1").param("symbol", sym.name()).param("d", d).param("p", p);
    let ks: Vec<u32> = (0..=cfg.k_max()).collect();
    let stats = match ring_stats_range(sym, &ks, p) {
        Ok(s) => s,
        Err(e) => return base.failed_with(&e),
    };
    let dual = p / (p - 1.0);
    let mu: Vec<f64> = stats.iter().map(|s| s.mu_k).collect();
    let b: Vec<f64> = rearrange_nonincreasing(&mu)
        .into_iter()
        .map(|i| if mu[i] == 0.0 { 0.0 } else { mu[i].powf(dual) })
        .collect();
    let alpha = d as f64 / (d as f64 + 1.0);
    let q = d as f64 + 1.0 + cfg.eps / dual;
    match lema1_check(&b, alpha, q) {
        Ok(mut r) => {
            for (k, v) in &base.params {
                r.set_param(k, v);
            }
            r
        }
        Err(e) => base.failed_with(&e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn claims_cover_families() {
        for (_, ids) in FAMILIES {
            for id in *ids {
                assert!(CLAIMS.iter().any(|(c, _)| c == id), "{id}");
            }
        }
        assert_eq!(FAMILIES.len(), 14);
    }

    #[test]
    fn euck_small() {
        for d in 1..=3 {
            for k in 0..=2 {
                assert!(euck_certify(d, k).passed());
            }
        }
    }

    #[test]
    fn empty_n_values_skip_riesz_claims() {
        let cfg = SuiteConfig {
            dims: vec![1],
            n_values: vec![],
            k_range: 0..=1,
            ..SuiteConfig::default()
        };
        let only: Vec<String> = vec!["riesz_l1".into(), "euck".into()];
        let run = run_suite_only(&cfg, Some(&only)).unwrap();
        let riesz: Vec<_> = run.reports.iter().filter(|r| r.claim_id == "riesz_l1").collect();
        assert_eq!(riesz.len(), 1);
        assert_eq!(riesz[0].status, crate::report::Status::Skipped);
        assert!(run.reports.iter().filter(|r| r.claim_id == "euck").all(|r| r.passed()));
    }
}
