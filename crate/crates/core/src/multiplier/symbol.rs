use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::LatticePoint;
use crate::trigpoly::{Coeff, TrigPoly};

/// Whether a symbol is known to define a bounded operator `W¹₁(T^d) → L_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundedness {
    Bounded,
    Unbounded,
    Unknown,
}

impl fmt::Display for Boundedness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Boundedness::Bounded => "bounded",
            Boundedness::Unbounded => "unbounded",
            Boundedness::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Debug)]
pub enum SymbolKind {
    /// `λ ≡ 1`, the Sobolev embedding.
    One,
    /// `λ_n = |n|_2^{−s}`.
    Power(f64),
    /// `λ_n = |n|_2`.
    Norm,
    /// Finitely supported values; points not listed are 0.
    Table(Arc<BTreeMap<LatticePoint, Complex64>>),
    /// Pointwise product of two symbols.
    Product(Box<MultiplierSymbol>, Box<MultiplierSymbol>),
}

/// A Fourier multiplier symbol `λ : Z^d \ {0} → C`.
#[derive(Clone, Debug)]
pub struct MultiplierSymbol {
    d: usize,
    name: String,
    kind: SymbolKind,
}

impl MultiplierSymbol {
    pub fn one(d: usize) -> Self {
        Self::build(d, "one".into(), SymbolKind::One)
    }

    pub fn power(d: usize, s: f64) -> Self {
        Self::build(d, format!("power:{s}"), SymbolKind::Power(s))
    }

    pub fn norm(d: usize) -> Self {
        Self::build(d, "norm".into(), SymbolKind::Norm)
    }

    /// The identically zero symbol (an empty table).
    pub fn zero(d: usize) -> Self {
        Self::build(d, "zero".into(), SymbolKind::Table(Arc::new(BTreeMap::new())))
    }

    pub fn table(d: usize, name: impl Into<String>, values: BTreeMap<LatticePoint, Complex64>) -> Result<Self> {
        if let Some(n) = values.keys().find(|n| n.dim() != d) {
            return Err(Error::Precondition(format!("table entry {n} is not in Z^{d}")));
        }
        Ok(Self::build(d, name.into(), SymbolKind::Table(Arc::new(values))))
    }

    pub fn product(a: MultiplierSymbol, b: MultiplierSymbol) -> Result<Self> {
        if a.d != b.d {
            return Err(Error::Precondition("product of symbols of different dimension".into()));
        }
        let name = format!("({})*({})", a.name, b.name);
        Ok(Self::build(a.d, name, SymbolKind::Product(Box::new(a), Box::new(b))))
    }

    fn build(d: usize, name: String, kind: SymbolKind) -> Self {
        Self { d, name, kind }
    }

    /// Reads CSV rows `n_1,…,n_d,re,im` (an optional header row is skipped).
    pub fn from_table_file(d: usize, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let values = parse_table(d, &text)?;
        Self::table(d, format!("table:{}", path.display()), values)
    }

    /// `one`, `zero`, `norm`, `power:<s>` or `table:<file>`.
    pub fn parse(d: usize, spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let bad = |msg: String| Error::Parse { line: 0, msg };
        match spec.split_once(':') {
            None => match spec {
                "one" => Ok(Self::one(d)),
                "zero" => Ok(Self::zero(d)),
                "norm" => Ok(Self::norm(d)),
                _ => Err(bad(format!("unknown symbol {spec:?}"))),
            },
            Some(("power", s)) => {
                let s: f64 = s
                    .trim()
                    .parse()
                    .map_err(|_| bad(format!("bad exponent in {spec:?}")))?;
                if !s.is_finite() {
                    return Err(bad(format!("bad exponent in {spec:?}")));
                }
                Ok(Self::power(d, s))
            }
            Some(("table", file)) => Self::from_table_file(d, Path::new(file.trim())),
            _ => Err(bad(format!("unknown symbol {spec:?}"))),
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &SymbolKind {
        &self.kind
    }

    /// `λ_n`; zero at the origin.
    pub fn eval(&self, n: &LatticePoint) -> Complex64 {
        self.eval_coords(n.coords())
    }

    pub fn eval_coords(&self, c: &[i64]) -> Complex64 {
        if c.iter().all(|&x| x == 0) {
            return Complex64::new(0.0, 0.0);
        }
        let sq = || c.iter().map(|&x| (x as f64) * (x as f64)).sum::<f64>();
        match &self.kind {
            SymbolKind::One => Complex64::new(1.0, 0.0),
            SymbolKind::Power(s) => Complex64::new(sq().powf(-0.5 * s), 0.0),
            SymbolKind::Norm => Complex64::new(sq().sqrt(), 0.0),
            SymbolKind::Table(t) => t
                .get(&LatticePoint::new(c.iter().copied()))
                .copied()
                .unwrap_or_default(),
            SymbolKind::Product(a, b) => a.eval_coords(c) * b.eval_coords(c),
        }
    }

    /// Invariant under signed coordinate permutations, which allows orbit
    /// sweeps over rings.
    pub fn is_radial(&self) -> bool {
        match &self.kind {
            SymbolKind::One | SymbolKind::Power(_) | SymbolKind::Norm => true,
            SymbolKind::Table(t) => t.is_empty(),
            SymbolKind::Product(a, b) => a.is_radial() && b.is_radial(),
        }
    }

    fn is_finitely_supported(&self) -> bool {
        match &self.kind {
            SymbolKind::Table(_) => true,
            SymbolKind::Product(a, b) => a.is_finitely_supported() || b.is_finitely_supported(),
            _ => false,
        }
    }

    /// Catalog entry for boundedness `W¹₁(T^d) → L_p`, with the reason.
    ///
    /// * finitely supported symbols give finite-rank operators: bounded;
    /// * `one` is the Sobolev embedding, bounded iff `p ≤ d/(d−1)`;
    /// * `power:s` with `s ≥ 0` is bounded whenever `one` is, and also when
    ///   `1 + s > d(1 − 1/p)`; with `s ≤ −1` it dominates `norm`;
    /// * `norm` is unbounded for every `p ≥ 1`.
    pub fn boundedness(&self, p: f64) -> (Boundedness, &'static str) {
        let d = self.d as f64;
        let one_bounded = self.d == 1 || p <= d / (d - 1.0);
        if self.is_finitely_supported() {
            return (Boundedness::Bounded, "finitely supported symbol: finite-rank operator");
        }
        match &self.kind {
            SymbolKind::One if one_bounded => (Boundedness::Bounded, "Sobolev embedding W¹₁ ⊂ L_p, p ≤ d/(d−1)"),
            SymbolKind::One => (Boundedness::Unbounded, "Sobolev embedding fails for p > d/(d−1)"),
            SymbolKind::Power(s) if *s >= 0.0 && (one_bounded || 1.0 + s > d * (1.0 - 1.0 / p)) => {
                (Boundedness::Bounded, "smoothing of order s on top of the Sobolev embedding")
            }
            SymbolKind::Power(s) if *s <= -1.0 => {
                (Boundedness::Unbounded, "growth at least |n|_2 loses the derivative gained by W¹₁")
            }
            SymbolKind::Norm => (Boundedness::Unbounded, "λ_n = |n|_2 is not bounded W¹₁ → L_p"),
            _ => (Boundedness::Unknown, "not in the catalog"),
        }
    }
}

fn parse_table(d: usize, text: &str) -> Result<BTreeMap<LatticePoint, Complex64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut out = BTreeMap::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })?;
        let line = rec.position().map_or(i + 1, |p| p.line() as usize);
        let is_header = i == 0 && rec.get(0).is_some_and(|f| f.parse::<i64>().is_err());
        if is_header {
            continue;
        }
        if rec.len() != d + 2 {
            return Err(Error::Parse {
                line,
                msg: format!("expected {} fields n_1..n_{d},re,im, found {}", d + 2, rec.len()),
            });
        }
        let bad = |what: &str| Error::Parse { line, msg: format!("bad {what}") };
        let coords: Vec<i64> = (0..d)
            .map(|k| rec[k].parse::<i64>().map_err(|_| bad("frequency")))
            .collect::<Result<_>>()?;
        let re: f64 = rec[d].parse().map_err(|_| bad("real part"))?;
        let im: f64 = rec[d + 1].parse().map_err(|_| bad("imaginary part"))?;
        out.insert(LatticePoint::new(coords), Complex64::new(re, im));
    }
    Ok(out)
}

/// `T f` with `(Tf)^(n) = λ_n f̂(n)`; the mean passes through unchanged.
pub fn apply(sym: &MultiplierSymbol, f: &TrigPoly) -> Result<TrigPoly> {
    if sym.dim() != f.dim() {
        return Err(Error::Precondition(format!(
            "symbol has d={}, polynomial has d={}",
            sym.dim(),
            f.dim()
        )));
    }
    let exact_identity = matches!(sym.kind, SymbolKind::One);
    let terms = f.stored_terms().map(|(n, c)| {
        if n.is_zero() || exact_identity {
            (n.clone(), c.clone())
        } else {
            (n.clone(), c.mul(&Coeff::Float(sym.eval(n))))
        }
    });
    TrigPoly::from_scaled_terms(f.dim(), f.scale(), terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> LatticePoint {
        LatticePoint::new(c.iter().copied())
    }

    #[test]
    fn builtin_values() {
        assert_eq!(MultiplierSymbol::one(2).eval(&p(&[3, 4])), Complex64::new(1.0, 0.0));
        assert_eq!(MultiplierSymbol::norm(2).eval(&p(&[3, 4])), Complex64::new(5.0, 0.0));
        assert!((MultiplierSymbol::power(2, 2.0).eval(&p(&[3, 4])).re - 0.04).abs() < 1e-16);
        assert_eq!(MultiplierSymbol::one(2).eval(&p(&[0, 0])), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn parse_names() {
        assert_eq!(MultiplierSymbol::parse(2, "power:1.5").unwrap().name(), "power:1.5");
        assert!(MultiplierSymbol::parse(2, "bogus").is_err());
        assert!(MultiplierSymbol::parse(2, "power:x").is_err());
    }

    #[test]
    fn table_rows() {
        let t = parse_table(2, "n1,n2,re,im\n1,0,0.5,0\n-2,3,1,-1\n").unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[&p(&[-2, 3])], Complex64::new(1.0, -1.0));
        let err = parse_table(2, "1,0,0.5\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn catalog() {
        assert_eq!(MultiplierSymbol::one(2).boundedness(2.0).0, Boundedness::Bounded);
        assert_eq!(MultiplierSymbol::one(3).boundedness(2.0).0, Boundedness::Unbounded);
        assert_eq!(MultiplierSymbol::norm(2).boundedness(1.5).0, Boundedness::Unbounded);
        assert_eq!(MultiplierSymbol::zero(2).boundedness(2.0).0, Boundedness::Bounded);
    }

    #[test]
    fn apply_is_diagonal() {
        let f = TrigPoly::character(&p(&[1, 0])).add(&TrigPoly::character(&p(&[0, 2])));
        let g = apply(&MultiplierSymbol::power(2, 2.0), &f).unwrap();
        assert!((g.coeff(&p(&[1, 0])).re - 1.0).abs() < 1e-15);
        assert!((g.coeff(&p(&[0, 2])).re - 0.25).abs() < 1e-15);
        let one = apply(&MultiplierSymbol::one(2), &f).unwrap();
        assert_eq!(one, f);
    }
}
