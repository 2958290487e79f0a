use std::path::PathBuf;

use clap::{ArgGroup, Args, ValueEnum};
use serde_json::json;
use tml::certify::{self, SuiteConfig};
use tml::kernels::{
    fejer_ring_lower_bound, fejer_w11_certify, gradient_report, product_fejer, riesz_expand,
    riesz_expansion_check, riesz_l1_certify, test_phi, tozsamosc_check, wspol_certify, RieszProductSpec,
    TestPhiSpec,
};
use tml::lattice::{ring_points, LatticePoint, SectorPartition, TriadicRingIndex};
use tml::multiplier::{
    krok1_flatness_certify, lema2_decay_report, main_sum_certify, main_sum_partial, ring_stats_range,
    schatten_partials, schatten_svd_check, sharpness_explore, sharpness_summary, DiagnosticsConfig,
    MultiplierSymbol, RingStats,
};
use tml::report::{fmt_num, CertificationReport, Status, SCHEMA};
use tml::trigpoly::{sobolev_parts, to_json, Quadrature, TrigPoly};
use tml::{Error, Result};

use crate::out::{out_dir, print_reports, write_csv, write_reports};
use crate::OutArgs;

/// Largest partition `sectors` will list.
const MAX_LISTED_SECTORS: u128 = 1 << 16;
/// Frequencies in the diagonal truncation checked by `diagnose`.
const SVD_FREQS: usize = 50;
const SVD_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    Usage,
    Budget,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Usage => 2,
            Outcome::Budget => 3,
        }
    }

    pub fn from_error(e: &Error) -> Self {
        match e {
            Error::Resource { .. } => Outcome::Budget,
            Error::Io(_) => Outcome::Fail,
            _ => Outcome::Usage,
        }
    }

    /// Budget beats failure beats pass.
    pub fn of_reports(reports: &[CertificationReport]) -> Self {
        if reports.iter().any(|r| r.status == Status::Budget) {
            Outcome::Budget
        } else if reports.iter().all(CertificationReport::meets_expectation) {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

/// `a..b`, `a..=b` or a single `k`.
fn parse_k_range(s: &str) -> Result<Vec<u32>> {
    let bad = || usage(format!("invalid ring range {s:?}; expected k or a..b"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a.trim(), b.trim().trim_start_matches('=')),
        None => (s.trim(), s.trim()),
    };
    let a: u32 = a.parse().map_err(|_| bad())?;
    let b: u32 = b.parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok((a..=b).collect())
}

fn parse_grid(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| usage(format!("invalid grid value {t:?}"))))
        .collect()
}

/// `"1,0;4,1"` → points `(1,0)` and `(4,1)`.
fn parse_points(s: &str) -> Result<Vec<LatticePoint>> {
    s.split(';')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.split(',')
                .map(|c| c.trim().parse::<i64>().map_err(|_| usage(format!("invalid point {t:?}"))))
                .collect::<Result<Vec<_>>>()
                .map(LatticePoint::new)
        })
        .collect()
}

fn coords_label(n: &LatticePoint) -> String {
    n.coords().iter().map(i64::to_string).collect::<Vec<_>>().join(" ")
}

fn ring_rows(stats: &[RingStats]) -> Vec<Vec<String>> {
    stats
        .iter()
        .map(|s| vec![s.k.to_string(), fmt_num(s.ring_sum), fmt_num(s.mu_k), coords_label(&s.argmax_point)])
        .collect()
}

fn ring_json(stats: &[RingStats]) -> serde_json::Value {
    stats
        .iter()
        .map(|s| {
            json!({
                "k": s.k,
                "ring_sum": fmt_num(s.ring_sum),
                "mu_k": fmt_num(s.mu_k),
                "argmax": s.argmax_point.coords(),
            })
        })
        .collect()
}

#[derive(Args)]
pub struct RingsArgs {
    #[arg(long)]
    d: usize,
    /// Ring index or inclusive range `a..b`.
    #[arg(long, default_value = "0..3")]
    k: String,
    /// one, zero, norm, power:<s> or table:<csv>.
    #[arg(long)]
    symbol: String,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[command(flatten)]
    out: OutArgs,
}

pub fn rings(a: RingsArgs) -> Result<Outcome> {
    let ks = parse_k_range(&a.k)?;
    let sym = MultiplierSymbol::parse(a.d, &a.symbol)?;
    let stats = ring_stats_range(&sym, &ks, a.p)?;
    let rows = ring_rows(&stats);
    println!("{:>4}  {:>24}  {:>24}  argmax_n", "k", "ring_sum", "mu_k");
    for r in &rows {
        println!("{:>4}  {:>24}  {:>24}  {}", r[0], r[1], r[2], r[3]);
    }
    write_csv(&out_dir(&a.out).join("tables").join("rings.csv"), &["k", "ring_sum", "mu_k", "argmax_n"], &rows)?;
    Ok(Outcome::Pass)
}

#[derive(Args)]
pub struct SectorsArgs {
    #[arg(long)]
    d: usize,
    /// Granularity N.
    #[arg(long = "N", alias = "n")]
    n: u32,
    /// Report the sector of this point, e.g. `5,2`.
    #[arg(long)]
    point: Option<String>,
    #[command(flatten)]
    out: OutArgs,
}

pub fn sectors(a: SectorsArgs) -> Result<Outcome> {
    let part = SectorPartition::new(a.d, a.n)?;
    let count = part.sector_count();
    if count > MAX_LISTED_SECTORS {
        return Err(Error::Resource {
            what: format!("listing sectors for d={} N={}", a.d, a.n),
            required: count,
            limit: MAX_LISTED_SECTORS,
        });
    }
    println!("d={} N={} sectors={count}", a.d, a.n);
    if let Some(s) = &a.point {
        let pts = parse_points(s)?;
        let [n] = pts.as_slice() else {
            return Err(usage("--point takes exactly one point"));
        };
        if n.dim() != a.d {
            return Err(usage(format!("--point has dimension {}, expected {}", n.dim(), a.d)));
        }
        println!("{n} ∈ {}", part.sector_of(n)?);
    }
    let list: Vec<_> = part
        .sectors()
        .iter()
        .map(|s| json!({ "id": s.to_string(), "dominant_axis": s.j(), "bins": s.bins() }))
        .collect();
    let path = out_dir(&a.out).join("fixtures").join(format!("sectors_d{}_N{}.json", a.d, a.n));
    certify::write_json(
        &path,
        &json!({ "schema": SCHEMA, "kind": "sectors", "d": a.d, "N": a.n, "count": count as u64, "sectors": list }),
    )?;
    Ok(Outcome::Pass)
}

#[derive(Args)]
pub struct RieszArgs {
    #[arg(long)]
    d: usize,
    /// Length N of the N-sparse sequence.
    #[arg(long = "N", alias = "n")]
    n: u32,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Explicit frequencies `a,b;c,d;…` instead of a seeded draw.
    #[arg(long)]
    freqs: Option<String>,
    #[arg(long, default_value_t = 8)]
    oversampling: u32,
    #[arg(long, default_value_t = 18)]
    lattice_log2: u32,
    #[command(flatten)]
    out: OutArgs,
}

fn riesz_spec_from(d: usize, n: u32, seed: u64, freqs: Option<&str>) -> Result<RieszProductSpec> {
    match freqs {
        Some(f) => {
            let pts = parse_points(f)?;
            if pts.iter().any(|p| p.dim() != d) {
                return Err(usage(format!("--freqs must be points in dimension {d}")));
            }
            RieszProductSpec::new(pts)
        }
        None => certify::seeded_riesz_spec(d, n, seed),
    }
}

fn riesz_spec_json(spec: &RieszProductSpec, seed: Option<u64>) -> serde_json::Value {
    let mut v = json!({
        "schema": SCHEMA,
        "kind": "riesz_spec",
        "d": spec.dim(),
        "N": spec.len(),
        "freqs": spec.freqs().iter().map(|p| p.coords().to_vec()).collect::<Vec<_>>(),
    });
    if let Some(s) = seed {
        v["seed"] = json!(s);
    }
    v
}

pub fn riesz(a: RieszArgs) -> Result<Outcome> {
    let spec = riesz_spec_from(a.d, a.n, a.seed, a.freqs.as_deref())?;
    let out = out_dir(&a.out);
    let stem = format!("riesz_d{}_N{}", spec.dim(), spec.len());
    let seed = a.freqs.is_none().then_some(a.seed);
    certify::write_json(&out.join("fixtures").join(format!("{stem}.json")), &riesz_spec_json(&spec, seed))?;
    let r = riesz_expand(&spec)?;
    certify::write_json(
        &out.join("fixtures").join(format!("{stem}_expansion.json")),
        &json!({ "schema": SCHEMA, "kind": "trig_poly", "d": spec.dim(), "terms": to_json(&r) }),
    )?;
    println!("freqs: {}", spec.freqs().iter().map(ToString::to_string).collect::<Vec<_>>().join(" "));
    println!("expansion terms: {}", r.support_len());
    let quad = Quadrature::with_generators(a.oversampling, spec.freqs().to_vec(), a.seed).lattice_size(a.lattice_log2);
    let reports = vec![
        riesz_expansion_check(&spec, &quad)?,
        riesz_l1_certify(&spec, &quad)?,
        tozsamosc_check(&spec)?,
    ];
    print_reports(&reports);
    write_reports(&out, &reports)?;
    Ok(Outcome::of_reports(&reports))
}

#[derive(Clone, Copy, ValueEnum)]
pub enum TestfnKind {
    /// d-fold product Fejér kernel of order 3^{k+2}.
    Fejer,
    /// Primitive of R − 1 along the dominant axis.
    Phi,
}

#[derive(Args)]
pub struct TestfnArgs {
    #[arg(long, value_enum)]
    kind: TestfnKind,
    #[arg(long)]
    d: usize,
    /// Ring index (fejer).
    #[arg(long, default_value_t = 0)]
    k: u32,
    /// Sequence length (phi).
    #[arg(long = "N", alias = "n", default_value_t = 2)]
    n: u32,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Explicit frequencies for phi, `a,b;c,d;…`.
    #[arg(long)]
    freqs: Option<String>,
    /// Integration axis for phi, 1-based; defaults to the dominant axis.
    #[arg(long)]
    j0: Option<usize>,
    #[arg(long, default_value_t = 8)]
    oversampling: u32,
    #[arg(long, default_value_t = 18)]
    lattice_log2: u32,
    #[command(flatten)]
    out: OutArgs,
}

fn poly_json(f: &TrigPoly, kernel: serde_json::Value) -> serde_json::Value {
    json!({ "schema": SCHEMA, "kind": "trig_poly", "d": f.dim(), "kernel": kernel, "terms": to_json(f) })
}

pub fn testfn(a: TestfnArgs) -> Result<Outcome> {
    let out = out_dir(&a.out);
    let (stem, f, kernel, quad, reports) = match a.kind {
        TestfnKind::Fejer => {
            let f = product_fejer(a.d, a.k)?;
            let reports = vec![fejer_ring_lower_bound(a.d, a.k)?, fejer_w11_certify(a.d, a.k, a.oversampling)?];
            (
                format!("testfn_fejer_d{}_k{}", a.d, a.k),
                f,
                json!({ "type": "fejer_product", "d": a.d, "k": a.k }),
                Quadrature::tensor(a.oversampling),
                reports,
            )
        }
        TestfnKind::Phi => {
            let riesz = riesz_spec_from(a.d, a.n, a.seed, a.freqs.as_deref())?;
            let spec = match a.j0 {
                Some(0) => return Err(usage("--j0 is 1-based")),
                Some(j) => TestPhiSpec::new(riesz, j - 1)?,
                None => TestPhiSpec::along_dominant_axis(riesz)?,
            };
            let f = test_phi(&spec)?;
            let freqs = spec.riesz().freqs().to_vec();
            let quad = Quadrature::with_generators(a.oversampling, freqs.clone(), a.seed).lattice_size(a.lattice_log2);
            let reports = vec![wspol_certify(&spec), gradient_report(&spec, &quad)?];
            (
                format!("testfn_phi_d{}_N{}", a.d, freqs.len()),
                f,
                json!({
                    "type": "riesz_phi",
                    "d": a.d,
                    "freqs": freqs.iter().map(|p| p.coords().to_vec()).collect::<Vec<_>>(),
                    "j0": spec.j0() + 1,
                }),
                quad,
                reports,
            )
        }
    };
    let w11 = sobolev_parts(&f, &quad)?;
    println!("terms: {}", f.support_len());
    println!("W11 norm: {} (error hint {})", fmt_num(w11.normalized()), fmt_num(w11.normalized_error_hint()));
    print_reports(&reports);
    certify::write_json(&out.join("fixtures").join(format!("{stem}.json")), &poly_json(&f, kernel))?;
    write_reports(&out, &reports)?;
    Ok(Outcome::of_reports(&reports))
}

#[derive(Args)]
pub struct DiagnoseArgs {
    #[arg(long)]
    symbol: String,
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    /// Largest ring index.
    #[arg(long = "K", default_value_t = 4)]
    k_max: u32,
    /// Sector granularity N.
    #[arg(long = "N", alias = "n", default_value_t = 2)]
    n: u32,
    #[command(flatten)]
    out: OutArgs,
}

/// The first `count` points of `R_0, R_1, …` in lexicographic order.
fn truncation(d: usize, count: usize) -> Result<Vec<LatticePoint>> {
    let mut pts = Vec::with_capacity(count);
    let mut k = 0;
    while pts.len() < count {
        pts.extend(ring_points(TriadicRingIndex(k), d)?.take(count - pts.len()));
        k += 1;
    }
    Ok(pts)
}

pub fn diagnose(a: DiagnoseArgs) -> Result<Outcome> {
    let sym = MultiplierSymbol::parse(a.d, &a.symbol)?;
    let cfg = DiagnosticsConfig::new(a.d, a.p, a.eps, a.k_max, a.n)?;
    let ks: Vec<u32> = (0..=a.k_max).collect();
    let stats = ring_stats_range(&sym, &ks, a.p)?;
    let schatten = schatten_partials(&sym, a.p, a.k_max)?;
    let main = main_sum_partial(&sym, &cfg)?;
    let reports = vec![
        krok1_flatness_certify(&sym, a.p, &ks),
        main_sum_certify(&sym, &cfg),
        lema2_decay_report(&sym, a.p, a.k_max),
        schatten_svd_check(&sym, &truncation(a.d, SVD_FREQS)?, SVD_TOL),
    ];
    print_reports(&reports);
    println!("main-sum trend: {}", main.trend);
    let out = out_dir(&a.out);
    let main_rows: Vec<Vec<String>> = (0..main.partial_sums.len())
        .map(|k| {
            vec![
                k.to_string(),
                fmt_num(main.ring_terms[k]),
                fmt_num(main.partial_sums[k]),
                fmt_num(main.split_bound[k]),
            ]
        })
        .collect();
    write_csv(
        &out.join("tables").join("main_sum.csv"),
        &["K", "ring_term", "partial_sum", "split_bound"],
        &main_rows,
    )?;
    write_csv(&out.join("tables").join("rings.csv"), &["k", "ring_sum", "mu_k", "argmax_n"], &ring_rows(&stats))?;
    let doc = json!({
        "schema": SCHEMA,
        "kind": "diagnostics",
        "symbol": sym.name(),
        "d": a.d,
        "p": fmt_num(a.p),
        "eps": fmt_num(a.eps),
        "N": a.n,
        "K": a.k_max,
        "q_main": fmt_num(main.q_main),
        "rings": ring_json(&stats),
        "schatten": schatten
            .iter()
            .enumerate()
            .map(|(k, v)| json!({ "K": k, "value": fmt_num(*v) }))
            .collect::<Vec<_>>(),
        "main_sum": {
            "partial_sums": main.partial_sums.iter().map(|v| fmt_num(*v)).collect::<Vec<_>>(),
            "split_bound": main.split_bound.iter().map(|v| fmt_num(*v)).collect::<Vec<_>>(),
            "split_holds": main.split_holds,
            "trend": main.trend.as_str(),
        },
        "reports": reports.iter().map(CertificationReport::to_json).collect::<Vec<_>>(),
    });
    certify::write_json(&out.join("diagnostics.json"), &doc)?;
    Ok(Outcome::of_reports(&reports))
}

#[derive(Args)]
pub struct CertifyArgs {
    /// Flat `key = value` suite configuration.
    #[arg(long)]
    suite_config: Option<PathBuf>,
    /// Comma-separated claim ids to run.
    #[arg(long)]
    only: Option<String>,
    #[arg(long)]
    dims: Option<String>,
    #[arg(long)]
    p_values: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long = "N-values", alias = "n-values")]
    n_values: Option<String>,
    #[arg(long)]
    k_range: Option<String>,
    #[arg(long)]
    oversampling: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    symbols: Option<String>,
    #[arg(long)]
    negative_controls: Option<String>,
    #[arg(long)]
    lattice_log2: Option<String>,
    #[command(flatten)]
    out: OutArgs,
}

impl CertifyArgs {
    fn overrides(&self) -> [(&'static str, &Option<String>); 10] {
        [
            ("dims", &self.dims),
            ("p_values", &self.p_values),
            ("eps", &self.eps),
            ("N_values", &self.n_values),
            ("k_range", &self.k_range),
            ("oversampling", &self.oversampling),
            ("seed", &self.seed),
            ("symbols", &self.symbols),
            ("negative_controls", &self.negative_controls),
            ("lattice_log2", &self.lattice_log2),
        ]
    }
}

pub fn certify(a: CertifyArgs) -> Result<Outcome> {
    let mut cfg = match &a.suite_config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            SuiteConfig::parse(&text).map_err(|e| match e {
                Error::Parse { line, msg } => Error::Parse { line, msg: format!("{}: {msg}", path.display()) },
                other => other,
            })?
        }
        None => SuiteConfig::default(),
    };
    for (key, value) in a.overrides() {
        if let Some(v) = value {
            cfg.set(key, v).map_err(|msg| usage(format!("--{}: {msg}", key.replace('_', "-"))))?;
        }
    }
    let only: Option<Vec<String>> = a
        .only
        .as_deref()
        .map(|s| s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(String::from).collect());
    if only.as_ref().is_some_and(Vec::is_empty) {
        return Err(usage("--only lists no claims"));
    }
    let run = certify::run_suite_only(&cfg, only.as_deref())?;
    let out = out_dir(&a.out);
    let path = certify::write_suite(&run, &cfg, &out)?;
    print_reports(&run.reports);
    let outcome = Outcome::of_reports(&run.reports);
    let met = run.reports.iter().filter(|r| r.meets_expectation()).count();
    println!("{met}/{} reports meet expectation; wrote {}", run.reports.len(), path.display());
    Ok(outcome)
}

#[derive(Args)]
#[command(group(ArgGroup::new("grid").required(true).args(["p_grid", "q_grid"])))]
pub struct SharpnessArgs {
    #[arg(long)]
    symbol: String,
    #[arg(long)]
    d: usize,
    /// Exponents p ∈ (1, 2]; each is mapped to q = p′ + p′(d+1) + ε.
    #[arg(long)]
    p_grid: Option<String>,
    /// Exponents q applied directly to |λ_n|/|n|_2.
    #[arg(long)]
    q_grid: Option<String>,
    /// Largest ring index.
    #[arg(long = "K")]
    k_max: u32,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[command(flatten)]
    out: OutArgs,
}

pub fn sharpness(a: SharpnessArgs) -> Result<Outcome> {
    let sym = MultiplierSymbol::parse(a.d, &a.symbol)?;
    let exponents = match (&a.q_grid, &a.p_grid) {
        (Some(q), _) => parse_grid(q)?,
        (None, Some(p)) => parse_grid(p)?
            .into_iter()
            .map(|p| DiagnosticsConfig::new(a.d, p, a.eps, a.k_max, 1).map(|c| c.q_main))
            .collect::<Result<_>>()?,
        (None, None) => Vec::new(),
    };
    if exponents.is_empty() {
        return Err(usage("exponent grid is empty"));
    }
    let rows = sharpness_explore(&sym, &exponents, a.k_max)?;
    let summary = sharpness_summary(&rows);
    let out = out_dir(&a.out);
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![fmt_num(r.exponent), r.k.to_string(), fmt_num(r.partial_sum), r.trend.to_string()])
        .collect();
    write_csv(&out.join("tables").join("sharpness.csv"), &["q", "K", "partial_sum", "classifier"], &csv_rows)?;
    certify::write_json(
        &out.join("sharpness.json"),
        &json!({
            "schema": SCHEMA,
            "kind": "sharpness",
            "symbol": sym.name(),
            "d": a.d,
            "K": a.k_max,
            "rows": rows.iter().map(|r| json!({
                "q": fmt_num(r.exponent),
                "K": r.k,
                "partial_sum": fmt_num(r.partial_sum),
                "classifier": r.trend.as_str(),
            })).collect::<Vec<_>>(),
            "summary": summary.iter().map(|(q, t)| json!({ "q": fmt_num(*q), "classifier": t.as_str() })).collect::<Vec<_>>(),
        }),
    )?;
    for (q, t) in &summary {
        println!("q={q:<8} K={:<3} {t}", a.k_max);
    }
    Ok(Outcome::Pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_k_range("0..3").unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(parse_k_range("2").unwrap(), vec![2]);
        assert_eq!(parse_k_range("1..=2").unwrap(), vec![1, 2]);
        assert!(parse_k_range("3..1").is_err());
    }

    #[test]
    fn points() {
        let p = parse_points("1,0; 4,-1").unwrap();
        assert_eq!(p, vec![LatticePoint::new([1, 0]), LatticePoint::new([4, -1])]);
        assert!(parse_points("1,x").is_err());
    }

    #[test]
    fn truncation_size() {
        let t = truncation(1, 50).unwrap();
        assert_eq!(t.len(), 50);
        assert!(t.iter().all(|p| !p.is_zero()));
    }
}
