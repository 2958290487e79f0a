use std::f64::consts::TAU;
use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{evaluate_on_grid, GridSpec};
use super::lattice_rule::LatticeRule;
use super::poly::TrigPoly;
use crate::error::{Error, Result};
use crate::lattice::LatticePoint;
use crate::report::CertificationReport;

/// Minimum oversampling accepted by the quadrature norms.
pub const MIN_OVERSAMPLING: f64 = 4.0;
/// Additive slack in every quadrature-based comparison.
pub const ABS_SLACK: f64 = 1e-9;

const LATTICE_LOG2_COARSE: u32 = 18;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormMethod {
    ExactCoefficient,
    Quadrature,
}

/// A computed norm together with how it was obtained.
///
/// For quadrature values `error_hint` is the change under one refinement
/// step (grid `M → 2M`, lattice rule `P → 4P`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub value: f64,
    pub p: f64,
    pub method: NormMethod,
    pub grid: Option<GridSpec>,
    pub lattice: Option<LatticeRule>,
    pub error_hint: f64,
}

impl NormReport {
    pub fn exact(value: f64, p: f64) -> Self {
        Self {
            value,
            p,
            method: NormMethod::ExactCoefficient,
            grid: None,
            lattice: None,
            error_hint: 0.0,
        }
    }

    /// `2·error_hint + 1e−9`.
    pub fn tolerance(&self) -> f64 {
        2.0 * self.error_hint + ABS_SLACK
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Domain(format!("L_p norm needs 1 ≤ p < ∞, got {p}")));
    }
    Ok(())
}

/// Mean of `|x|^p`, summed in fixed-size chunks so the result does not
/// depend on the thread count.
fn mean_abs_pow(samples: &[Complex64], p: f64) -> f64 {
    const CHUNK: usize = 1 << 14;
    let partial: Vec<f64> = samples
        .par_chunks(CHUNK)
        .map(|c| {
            if p == 1.0 {
                c.iter().map(|z| z.norm()).sum()
            } else if p == 2.0 {
                c.iter().map(|z| z.norm_sqr()).sum()
            } else {
                c.iter().map(|z| z.norm().powf(p)).sum()
            }
        })
        .collect();
    partial.iter().sum::<f64>() / samples.len() as f64
}

fn grid_value(f: &TrigPoly, p: f64, g: &GridSpec) -> Result<f64> {
    let s = evaluate_on_grid(f, g)?;
    Ok(mean_abs_pow(&s, p).powf(1.0 / p))
}

/// `(M^{−d} Σ |f(t_m)|^p)^{1/p}` on the tensor grid `g`, with the `2M`
/// grid as the refinement.
pub fn lp_norm(f: &TrigPoly, p: f64, g: &GridSpec) -> Result<NormReport> {
    check_p(p)?;
    let over = g.samples_per_axis() as f64 / (2 * f.degree() + 1) as f64;
    if over < MIN_OVERSAMPLING {
        return Err(Error::Precondition(format!(
            "oversampling {over:.3} is below {MIN_OVERSAMPLING}"
        )));
    }
    if f.is_zero() {
        return Ok(NormReport::exact(0.0, p));
    }
    let fine = g.refined();
    fine.check_budget(f.dim())?;
    let coarse_value = grid_value(f, p, g)?;
    let fine_value = grid_value(f, p, &fine)?;
    Ok(NormReport {
        value: coarse_value,
        p,
        method: NormMethod::Quadrature,
        grid: Some(*g),
        lattice: None,
        error_hint: (coarse_value - fine_value).abs(),
    })
}

/// Quadrature choice shared by several norms of related polynomials.
///
/// A tensor grid with the requested oversampling is used whenever it fits
/// the grid budget. Otherwise, if generators were supplied, a pair of rank-1
/// lattice rules tuned to them (`2^18` and `2^20` points) is searched once
/// and reused.
#[derive(Debug)]
pub struct Quadrature {
    oversampling: u32,
    generators: Vec<LatticePoint>,
    seed: u64,
    log2_points: u32,
    rules: OnceLock<std::result::Result<(LatticeRule, LatticeRule), Error>>,
}

impl Quadrature {
    pub fn tensor(oversampling: u32) -> Self {
        Self::with_generators(oversampling, Vec::new(), 0)
    }

    pub fn with_generators(oversampling: u32, generators: Vec<LatticePoint>, seed: u64) -> Self {
        Self {
            oversampling,
            generators,
            seed,
            log2_points: LATTICE_LOG2_COARSE,
            rules: OnceLock::new(),
        }
    }

    /// Overrides the coarse lattice size (`2^log2` points, refined to
    /// `2^{log2+2}`).
    pub fn lattice_size(mut self, log2: u32) -> Self {
        self.log2_points = log2;
        self
    }

    pub fn oversampling(&self) -> u32 {
        self.oversampling
    }

    fn tensor_grid(&self, f: &TrigPoly) -> Result<GridSpec> {
        let g = GridSpec::for_poly(f, self.oversampling)?;
        g.refined().check_budget(f.dim())?;
        Ok(g)
    }

    fn lattice_rules(&self) -> Result<&(LatticeRule, LatticeRule)> {
        self.rules
            .get_or_init(|| {
                let coarse = LatticeRule::search(&self.generators, self.log2_points, self.seed)?;
                let fine = LatticeRule::search(&self.generators, self.log2_points + 2, self.seed)?;
                Ok((coarse, fine))
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn lp_norm(&self, f: &TrigPoly, p: f64) -> Result<NormReport> {
        check_p(p)?;
        if f.is_zero() {
            return Ok(NormReport::exact(0.0, p));
        }
        match self.tensor_grid(f) {
            Ok(g) => lp_norm(f, p, &g),
            Err(e) if e.is_resource() && !self.generators.is_empty() => {
                let (coarse, fine) = self.lattice_rules()?;
                let a = mean_abs_pow(&coarse.evaluate(f)?, p).powf(1.0 / p);
                let b = mean_abs_pow(&fine.evaluate(f)?, p).powf(1.0 / p);
                Ok(NormReport {
                    value: a,
                    p,
                    method: NormMethod::Quadrature,
                    grid: None,
                    lattice: Some(coarse.clone()),
                    error_hint: (a - b).abs(),
                })
            }
            Err(e) => Err(e),
        }
    }

    /// The coarse sampling rule this plan uses for `f`.
    pub fn rule_for(&self, f: &TrigPoly) -> Result<SampleRule<'_>> {
        match self.tensor_grid(f) {
            Ok(g) => Ok(SampleRule::Grid { spec: g, d: f.dim() }),
            Err(e) if e.is_resource() && !self.generators.is_empty() => {
                Ok(SampleRule::Lattice(&self.lattice_rules()?.0))
            }
            Err(e) => Err(e),
        }
    }
}

/// A concrete point set on `T^d`: a tensor grid or a lattice rule.
#[derive(Clone, Copy, Debug)]
pub enum SampleRule<'a> {
    Grid { spec: GridSpec, d: usize },
    Lattice(&'a LatticeRule),
}

impl SampleRule<'_> {
    pub fn len(&self) -> usize {
        match self {
            SampleRule::Grid { spec, d } => spec.samples_per_axis().pow(*d as u32),
            SampleRule::Lattice(r) => r.points(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `⟨n, t_idx⟩ mod 1`, computed from exact integer residues.
    pub fn phase(&self, n: &LatticePoint, idx: usize) -> f64 {
        match self {
            SampleRule::Grid { spec, .. } => {
                let m = spec.samples_per_axis() as i128;
                let mut rest = idx;
                let mut acc = 0i128;
                for &k in n.coords().iter().rev() {
                    let t = (rest % m as usize) as i128;
                    rest /= m as usize;
                    acc = (acc + (k as i128).rem_euclid(m) * t).rem_euclid(m);
                }
                acc as f64 / m as f64
            }
            SampleRule::Lattice(r) => {
                let p = r.points() as u128;
                ((r.residue(n) as u128 * idx as u128) % p) as f64 / p as f64
            }
        }
    }

    /// Samples of `f` at every point, in index order.
    pub fn evaluate(&self, f: &TrigPoly) -> Result<Vec<Complex64>> {
        match self {
            SampleRule::Grid { spec, .. } => evaluate_on_grid(f, spec),
            SampleRule::Lattice(r) => r.evaluate(f),
        }
    }
}

/// `‖f‖_1` and `‖∂_j f‖_1` for every axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SobolevNorm {
    pub function: NormReport,
    pub partials: Vec<NormReport>,
}

impl SobolevNorm {
    /// `‖f‖_1 + Σ_j ‖∂_j f‖_1`.
    pub fn raw(&self) -> f64 {
        self.function.value + self.partials.iter().map(|r| r.value).sum::<f64>()
    }

    /// `‖f‖_1 + (2π)^{−1} Σ_j ‖∂_j f‖_1`, the value under the `e^{i⟨n,t⟩}`
    /// derivative scaling.
    pub fn normalized(&self) -> f64 {
        self.function.value + self.partials.iter().map(|r| r.value).sum::<f64>() / TAU
    }

    pub fn raw_error_hint(&self) -> f64 {
        self.function.error_hint + self.partials.iter().map(|r| r.error_hint).sum::<f64>()
    }

    pub fn normalized_error_hint(&self) -> f64 {
        self.function.error_hint + self.partials.iter().map(|r| r.error_hint).sum::<f64>() / TAU
    }
}

pub fn sobolev_parts(f: &TrigPoly, quad: &Quadrature) -> Result<SobolevNorm> {
    let function = quad.lp_norm(f, 1.0)?;
    let partials = (0..f.dim())
        .map(|j| quad.lp_norm(&f.partial_derivative(j)?, 1.0))
        .collect::<Result<_>>()?;
    Ok(SobolevNorm { function, partials })
}

/// `‖f‖_1 + Σ_j ‖∂_j f‖_1` on the grid `g`.
pub fn sobolev_norm_11(f: &TrigPoly, g: &GridSpec) -> Result<NormReport> {
    let function = lp_norm(f, 1.0, g)?;
    let mut value = function.value;
    let mut hint = function.error_hint;
    for j in 0..f.dim() {
        let r = lp_norm(&f.partial_derivative(j)?, 1.0, g)?;
        value += r.value;
        hint += r.error_hint;
    }
    Ok(NormReport {
        value,
        error_hint: hint,
        ..function
    })
}

/// `‖f̂‖_{p′} ≤ ‖f‖_p` for `1 < p ≤ 2`.
pub fn hausdorff_young_check(f: &TrigPoly, p: f64, g: &GridSpec) -> Result<CertificationReport> {
    if !(p > 1.0 && p <= 2.0) {
        return Err(Error::Domain(format!("Hausdorff–Young needs 1 < p ≤ 2, got {p}")));
    }
    let q = p / (p - 1.0);
    let lhs = f.fourier_coeff_lq(q)?;
    let rhs = lp_norm(f, p, g)?;
    let tol = rhs.tolerance();
    let mut r = CertificationReport::new("hausdorff_young")
        .param("d", f.dim())
        .param("p", p)
        .param("degree", f.degree())
        .param("grid_m", g.samples_per_axis())
        .tolerance(tol);
    r.observe("coeff_norm_dual", lhs);
    r.observe("lp_norm", rhs.value);
    r.observe("error_hint", rhs.error_hint);
    Ok(r.conclude(lhs <= rhs.value + tol))
}

/// `‖f′‖_1 ≤ 2π·deg(f)·‖f‖_1` for `d = 1`.
pub fn bernstein_check(f: &TrigPoly, g: &GridSpec) -> Result<CertificationReport> {
    if f.dim() != 1 {
        return Err(Error::Precondition(format!(
            "Bernstein check is one-dimensional, got d={}",
            f.dim()
        )));
    }
    let deg = f.degree() as f64;
    let norm = lp_norm(f, 1.0, g)?;
    let dnorm = lp_norm(&f.partial_derivative(0)?, 1.0, g)?;
    let bound = TAU * deg * norm.value;
    let tol = 2.0 * (dnorm.error_hint + TAU * deg * norm.error_hint) + ABS_SLACK;
    let raw_ratio = if norm.value > 0.0 { dnorm.value / norm.value } else { 0.0 };
    let normalized = if deg > 0.0 { raw_ratio / (TAU * deg) } else { 0.0 };
    let mut r = CertificationReport::new("bernstein")
        .param("degree", f.degree())
        .param("grid_m", g.samples_per_axis())
        .tolerance(tol);
    r.observe("derivative_l1", dnorm.value);
    r.observe("l1", norm.value);
    r.observe("raw_ratio", raw_ratio);
    r.observe("normalized_ratio", normalized);
    Ok(r.conclude(dnorm.value <= bound + tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trigpoly::Coeff;

    fn p(c: &[i64]) -> LatticePoint {
        LatticePoint::new(c.iter().copied())
    }

    #[test]
    fn constant_norms() {
        let f = TrigPoly::constant(2, Coeff::from_ratio(-3, 2));
        let g = GridSpec::for_poly(&f, 4).unwrap();
        for q in [1.0, 1.5, 2.0, 7.0] {
            assert!((lp_norm(&f, q, &g).unwrap().value - 1.5).abs() < 1e-14);
        }
        assert!(matches!(lp_norm(&f, 0.5, &g), Err(Error::Domain(_))));
    }

    #[test]
    fn parseval_on_cosine_pair() {
        let n = p(&[3, -2]);
        let f = TrigPoly::character(&n).add(&TrigPoly::character(&n.neg()));
        let g = GridSpec::for_poly(&f, 4).unwrap();
        assert!((lp_norm(&f, 2.0, &g).unwrap().value - 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn low_oversampling_is_rejected() {
        let f = TrigPoly::character(&p(&[5]));
        let g = GridSpec::new(20, 5).unwrap();
        assert!(matches!(lp_norm(&f, 1.0, &g), Err(Error::Precondition(_))));
    }

    #[test]
    fn lattice_fallback_matches_exact_l2() {
        let gens = vec![p(&[7, 2]), p(&[700, 180]), p(&[70000, 18100])];
        let mut f = TrigPoly::constant(2, Coeff::one());
        for n in &gens {
            f = f.add(&TrigPoly::character(n).scale_by(&Coeff::from_ratio(1, 3)));
        }
        let quad = Quadrature::with_generators(4, gens, 3).lattice_size(12);
        let r = quad.lp_norm(&f, 2.0).unwrap();
        assert!(r.lattice.is_some());
        assert!((r.value - f.fourier_coeff_lq(2.0).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn bernstein_on_character() {
        let f = TrigPoly::character(&p(&[4]));
        let g = GridSpec::for_poly(&f, 8).unwrap();
        let r = bernstein_check(&f, &g).unwrap();
        assert!(r.passed());
        assert!((r.observed_value("normalized_ratio").unwrap() - 1.0).abs() < 1e-12);
    }
}
