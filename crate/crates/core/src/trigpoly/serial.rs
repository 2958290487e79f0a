use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};

use super::coeff::Coeff;
use super::poly::TrigPoly;
use crate::error::{Error, Result};
use crate::lattice::LatticePoint;
use crate::report::fmt_num;

fn rat_string(r: &BigRational) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// JSON list of `{freq, re, im}`. Exact parts are written as `"p/q"`,
/// floating parts in `{:.16e}`. A nonzero `(2πi)` scale is folded into
/// floating coefficients first.
pub fn to_json(f: &TrigPoly) -> Value {
    let folded;
    let f = if f.scale() == 0 {
        f
    } else {
        folded = f.to_float();
        &folded
    };
    Value::Array(
        f.stored_terms()
            .map(|(n, c)| {
                let (re, im) = match c {
                    Coeff::Exact(z) => (rat_string(&z.re), rat_string(&z.im)),
                    Coeff::Float(z) => (fmt_num(z.re), fmt_num(z.im)),
                };
                json!({ "freq": n.coords(), "re": re, "im": im })
            })
            .collect(),
    )
}

enum Part {
    Exact(BigRational),
    Float(f64),
}

fn parse_part(s: &str) -> Result<Part> {
    let bad = || Error::Parse {
        line: 0,
        msg: format!("bad coefficient part {s:?}"),
    };
    if s.contains(['.', 'e', 'E', 'n', 'i']) {
        return s.parse::<f64>().map(Part::Float).map_err(|_| bad());
    }
    match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (BigInt, BigInt) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            if b.is_zero() {
                return Err(bad());
            }
            Ok(Part::Exact(BigRational::new(a, b)))
        }
        None => Ok(Part::Exact(BigRational::from_integer(s.trim().parse().map_err(|_| bad())?))),
    }
}

fn part_value(v: &Value) -> Result<Part> {
    match v {
        Value::String(s) => parse_part(s),
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(Part::Exact(BigRational::from_integer(i.into()))),
            None => Ok(Part::Float(n.as_f64().unwrap_or(f64::NAN))),
        },
        _ => Err(Error::Parse {
            line: 0,
            msg: format!("coefficient part must be a string or number, got {v}"),
        }),
    }
}

/// Inverse of [`to_json`]. `d` is taken from the first frequency.
pub fn from_json(v: &Value) -> Result<TrigPoly> {
    let err = |msg: String| Error::Parse { line: 0, msg };
    let items = v
        .as_array()
        .ok_or_else(|| err("polynomial must be a JSON array".into()))?;
    let mut terms = Vec::with_capacity(items.len());
    let mut d = None;
    for (i, item) in items.iter().enumerate() {
        let freq: Vec<i64> = item
            .get("freq")
            .and_then(Value::as_array)
            .ok_or_else(|| err(format!("term {i}: missing freq")))?
            .iter()
            .map(|x| x.as_i64().ok_or_else(|| err(format!("term {i}: non-integer frequency"))))
            .collect::<Result<_>>()?;
        d.get_or_insert(freq.len());
        let re = part_value(item.get("re").unwrap_or(&json!("0")))?;
        let im = part_value(item.get("im").unwrap_or(&json!("0")))?;
        let c = match (re, im) {
            (Part::Exact(a), Part::Exact(b)) => Coeff::Exact(Complex::new(a, b)),
            (a, b) => {
                let f = |p: Part| match p {
                    Part::Exact(r) => super::coeff::rat_to_f64(&r),
                    Part::Float(x) => x,
                };
                Coeff::Float(num_complex::Complex64::new(f(a), f(b)))
            }
        };
        terms.push((LatticePoint::new(freq), c));
    }
    TrigPoly::from_terms(d.unwrap_or(1), terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_round_trip() {
        let f = TrigPoly::from_terms(
            2,
            [
                (LatticePoint::from([1, 2]), Coeff::from_ratio(-3, 4)),
                (LatticePoint::from([0, 0]), Coeff::one()),
            ],
        )
        .unwrap();
        let v = to_json(&f);
        assert_eq!(v[1]["re"], "-3/4");
        assert_eq!(from_json(&v).unwrap(), f);
    }

    #[test]
    fn scaled_polys_serialise_as_floats() {
        let f = TrigPoly::character(&LatticePoint::from([2])).partial_derivative(0).unwrap();
        let g = from_json(&to_json(&f)).unwrap();
        assert!((g.coeff(&LatticePoint::from([2])) - f.coeff(&LatticePoint::from([2]))).norm() < 1e-12);
    }
}
