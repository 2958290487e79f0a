use super::rings::MAX_SWEEP_POINTS;
use super::symbol::MultiplierSymbol;
use crate::error::{Error, Result};
use crate::lattice::{map_ring_slices, ring_cardinality, LatticePoint, TriadicRingIndex};
use crate::report::CertificationReport;

/// Relative slack on termwise comparisons of floating-point powers.
const REL_SLACK: f64 = 1e-12;

/// A factorization `T = B ∘ A` through `L_2`, with `A = (α_n)` and
/// `B = (β_n)`, and a claimed bound on `‖B‖`.
#[derive(Clone, Debug)]
pub struct FactorizationWitness {
    pub alpha: MultiplierSymbol,
    pub beta: MultiplierSymbol,
    pub norm_b_bound: f64,
}

impl FactorizationWitness {
    pub fn new(alpha: MultiplierSymbol, beta: MultiplierSymbol, norm_b_bound: f64) -> Result<Self> {
        if alpha.dim() != beta.dim() {
            return Err(Error::Precondition(format!(
                "α has d={}, β has d={}",
                alpha.dim(),
                beta.dim()
            )));
        }
        if !(norm_b_bound >= 0.0 && norm_b_bound.is_finite()) {
            return Err(Error::Domain(format!("‖B‖ bound must be finite and ≥ 0, got {norm_b_bound}")));
        }
        Ok(Self { alpha, beta, norm_b_bound })
    }

    pub fn dim(&self) -> usize {
        self.alpha.dim()
    }

    /// `λ = α·β`.
    pub fn composed(&self) -> MultiplierSymbol {
        MultiplierSymbol::product(self.alpha.clone(), self.beta.clone()).expect("dimensions checked")
    }
}

/// The three reference witnesses with the exponent each is checked at:
/// `α = β = |n|^{-1}` (equality), `β ≡ 0`, and `α ≡ 1, β = |n|^{-1}` at `p = 3`.
pub fn catalog_witnesses(d: usize) -> Vec<(FactorizationWitness, f64)> {
    let w = |a, b| FactorizationWitness::new(a, b, 1.0).expect("catalog witness");
    vec![
        (w(MultiplierSymbol::power(d, 1.0), MultiplierSymbol::power(d, 1.0)), 2.0),
        (w(MultiplierSymbol::one(d), MultiplierSymbol::zero(d)), 2.0),
        (w(MultiplierSymbol::one(d), MultiplierSymbol::power(d, 1.0)), 3.0),
    ]
}

#[derive(Clone, Default)]
struct Tally {
    lhs: f64,
    rhs: f64,
    max_beta: f64,
    equality: bool,
    witness_violation: Option<Vec<i64>>,
    chain_violation: Option<Vec<i64>>,
    count: u128,
}

/// Checks `|β_n||n|_2 ≤ ‖B‖` and `|λ_n|^p ≤ ‖B‖^p (|α_n|/|n|_2)^p` at every
/// point of `R_0 ∪ … ∪ R_{k_max}`, and reports both sides of
/// `Σ|λ_n|^p ≤ ‖B‖^p Σ(|α_n|/|n|_2)^p`.
pub fn compose_factorization(w: &FactorizationWitness, p: f64, k_max: u32) -> CertificationReport {
    let d = w.dim();
    let mut rep = CertificationReport::new("factorization")
        .param("alpha", w.alpha.name())
        .param("beta", w.beta.name())
        .param("d", d)
        .param("p", p)
        .param("norm_b_bound", w.norm_b_bound)
        .param("k_max", k_max)
        .tolerance(REL_SLACK);
    if !(p > 0.0) {
        return rep.failed_with(&Error::Domain(format!("p must be positive, got {p}")));
    }
    match sweep(w, p, k_max) {
        Ok(t) => {
            rep.observe("lhs", t.lhs);
            rep.observe("rhs", t.rhs);
            rep.observe("max_beta_times_norm", t.max_beta);
            rep.observe("points", t.count as f64);
            if let Some(c) = t.witness_violation {
                rep.note(format!("witness bound |β_n||n|_2 ≤ ‖B‖ fails at {}", LatticePoint::new(c)));
                return rep.conclude(false);
            }
            if let Some(c) = t.chain_violation {
                rep.note(format!("termwise chain fails at {}", LatticePoint::new(c)));
                return rep.conclude(false);
            }
            if t.equality {
                rep.note("chain holds with equality at every point");
            }
            rep.conclude(t.lhs <= t.rhs * (1.0 + REL_SLACK))
        }
        Err(e) => rep.failed_with(&e),
    }
}

fn sweep(w: &FactorizationWitness, p: f64, k_max: u32) -> Result<Tally> {
    let d = w.dim();
    let mut cost: u128 = 0;
    for k in 0..=k_max {
        cost = cost.saturating_add(ring_cardinality(TriadicRingIndex(k), d).unwrap_or(u128::MAX));
    }
    if cost > MAX_SWEEP_POINTS {
        return Err(Error::resource(format!("factorization sweep over R_0..R_{k_max} in d={d}"), cost, MAX_SWEEP_POINTS));
    }
    let b = w.norm_b_bound;
    let bp = b.powf(p);
    let mut total = Tally { equality: true, ..Tally::default() };
    for k in 0..=k_max {
        let slices = map_ring_slices(TriadicRingIndex(k), d, |walk| {
            let mut t = Tally { equality: true, ..Tally::default() };
            walk(&mut |c| {
                let norm = (c.iter().map(|&x| (x as i128 * x as i128) as f64).sum::<f64>()).sqrt();
                let a = w.alpha.eval_coords(c).norm();
                let be = w.beta.eval_coords(c).norm();
                let lam = (w.alpha.eval_coords(c) * w.beta.eval_coords(c)).norm();
                let bn = be * norm;
                t.max_beta = t.max_beta.max(bn);
                if bn > b * (1.0 + REL_SLACK) && t.witness_violation.is_none() {
                    t.witness_violation = Some(c.to_vec());
                }
                let l = lam.powf(p);
                let r = bp * (a / norm).powf(p);
                if l > r * (1.0 + REL_SLACK) && t.chain_violation.is_none() {
                    t.chain_violation = Some(c.to_vec());
                }
                if (l - r).abs() > REL_SLACK * r.max(l) {
                    t.equality = false;
                }
                t.lhs += l;
                t.rhs += r;
                t.count += 1;
            });
            t
        })?;
        for s in slices {
            total.lhs += s.lhs;
            total.rhs += s.rhs;
            total.max_beta = total.max_beta.max(s.max_beta);
            total.equality &= s.equality;
            total.count += s.count;
            if total.witness_violation.is_none() {
                total.witness_violation = s.witness_violation;
            }
            if total.chain_violation.is_none() {
                total.chain_violation = s.chain_violation;
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_chains_hold() {
        for (w, p) in catalog_witnesses(2) {
            let rep = compose_factorization(&w, p, 2);
            assert!(rep.passed(), "{rep:?}");
        }
    }

    #[test]
    fn equality_case() {
        let (w, p) = catalog_witnesses(2).remove(0);
        let rep = compose_factorization(&w, p, 1);
        let (l, r) = (rep.observed_value("lhs").unwrap(), rep.observed_value("rhs").unwrap());
        assert!((l - r).abs() <= 1e-12 * r);
        assert!(rep.notes.iter().any(|n| n.contains("equality")));
    }

    #[test]
    fn zero_beta_gives_zero_sides() {
        let (w, p) = catalog_witnesses(2).remove(1);
        let rep = compose_factorization(&w, p, 1);
        assert_eq!(rep.observed_value("lhs"), Some(0.0));
    }

    #[test]
    fn violated_witness_is_reported() {
        let w = FactorizationWitness::new(MultiplierSymbol::one(2), MultiplierSymbol::one(2), 1.0).unwrap();
        let rep = compose_factorization(&w, 2.0, 1);
        assert!(!rep.passed());
        assert!(rep.notes.iter().any(|n| n.contains("witness bound")));
    }
}
