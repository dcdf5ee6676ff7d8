//! String parsers shared by flags and config entries.

use kms_core::exact::{is_prime, parse_rational, Rational};
use kms_core::measure::LocalCylinder;
use kms_core::{IntMatrix, RatMatrix};
use num_bigint::BigInt;
use num_traits::Signed;
use serde_json::Value;

pub fn usize_arg(s: &str) -> Result<usize, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("`{s}` is not a non-negative integer"))
}

pub fn u64_arg(s: &str) -> Result<u64, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("`{s}` is not a non-negative integer"))
}

pub fn format_arg(s: &str) -> Result<crate::render::Format, String> {
    match s.trim() {
        "json" => Ok(crate::render::Format::Json),
        "csv" => Ok(crate::render::Format::Csv),
        other => Err(format!("unknown format `{other}` (json or csv)")),
    }
}

pub fn prime(s: &str) -> Result<u64, String> {
    let p = u64_arg(s)?;
    if is_prime(p) {
        Ok(p)
    } else {
        Err(format!("{p} is not prime"))
    }
}

/// Comma-separated primes, sorted and deduplicated.
pub fn primes(s: &str) -> Result<Vec<u64>, String> {
    let mut out = s.split(',').map(prime).collect::<Result<Vec<_>, _>>()?;
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

pub fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s.trim()).map_err(|e| e.to_string())
}

/// Comma-separated integers, e.g. `0,3`.
pub fn signature(s: &str) -> Result<Vec<i64>, String> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<i64>()
                .map_err(|_| format!("`{x}` is not an integer"))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub start: Rational,
    pub stop: Rational,
    pub step: Rational,
}

pub const MAX_GRID_POINTS: usize = 100_000;

impl Grid {
    pub fn points(&self) -> Vec<Rational> {
        let mut out = Vec::new();
        let mut b = self.start.clone();
        while b <= self.stop {
            out.push(b.clone());
            b += &self.step;
        }
        out
    }
}

/// `start:stop:step`, inclusive of `stop` when it lands on the grid.
pub fn grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, c] = parts.as_slice() else {
        return Err(format!("`{s}` is not start:stop:step"));
    };
    let g = Grid {
        start: rational(a)?,
        stop: rational(b)?,
        step: rational(c)?,
    };
    if !g.step.is_positive() {
        return Err("grid step must be positive".into());
    }
    if g.stop < g.start {
        return Err("grid stop is below start".into());
    }
    let count = ((&g.stop - &g.start) / &g.step).floor().to_integer() + BigInt::from(1);
    if count > BigInt::from(MAX_GRID_POINTS) {
        return Err(format!("grid has {count} points, limit {MAX_GRID_POINTS}"));
    }
    Ok(g)
}

fn json(s: &str) -> Result<Value, String> {
    serde_json::from_str(s).map_err(|e| format!("bad JSON: {e}"))
}

fn entry(v: &Value) -> Result<Rational, String> {
    match v {
        Value::Number(n) if n.is_i64() || n.is_u64() => rational(&n.to_string()),
        Value::String(s) => rational(s),
        other => Err(format!(
            "matrix entry {other} must be an integer or a \"a/b\" string"
        )),
    }
}

/// Square matrix as a JSON array of rows; entries are integers or `"a/b"`.
pub fn rat_matrix(s: &str) -> Result<RatMatrix, String> {
    let v = json(s)?;
    let rows = v.as_array().ok_or("matrix must be a JSON array of rows")?;
    let rows = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or("each row must be an array".to_string())?
                .iter()
                .map(entry)
                .collect()
        })
        .collect::<Result<Vec<Vec<Rational>>, String>>()?;
    RatMatrix::from_rows(rows).map_err(|e| e.to_string())
}

pub fn int_matrix(s: &str) -> Result<IntMatrix, String> {
    rat_matrix(s)?
        .to_integer()
        .ok_or_else(|| "matrix must have integer entries".to_string())
}

pub fn cylinder_json(s: &str) -> Result<Value, String> {
    let v = json(s)?;
    match &v {
        Value::Object(_) => Ok(Value::Array(vec![v])),
        Value::Array(_) => Ok(v),
        _ => Err("cylinder must be an object or an array of objects".into()),
    }
}

fn small_int(v: Option<&Value>, name: &str, default: Option<i64>) -> Result<i64, String> {
    match v {
        None => default.ok_or_else(|| format!("cylinder needs `{name}`")),
        Some(x) => x
            .as_i64()
            .ok_or_else(|| format!("cylinder `{name}` must be an integer")),
    }
}

/// `[{p, scale, level, residue}, …]`, one entry per prime.
pub fn cylinders(v: &Value) -> Result<Vec<(u64, LocalCylinder)>, String> {
    let items = v.as_array().ok_or("cylinders must be an array")?;
    let mut out: Vec<(u64, LocalCylinder)> = Vec::new();
    for item in items {
        let obj = item.as_object().ok_or("cylinder must be a JSON object")?;
        if let Some(k) = obj
            .keys()
            .find(|k| !["p", "scale", "level", "residue"].contains(&k.as_str()))
        {
            return Err(format!("unknown cylinder field `{k}`"));
        }
        let p = small_int(obj.get("p"), "p", None)?;
        let p = prime(&p.to_string())?;
        let scale = small_int(obj.get("scale"), "scale", Some(0))?;
        let level = small_int(obj.get("level"), "level", None)?;
        let level = u32::try_from(level).map_err(|_| "cylinder level must be ≥ 0".to_string())?;
        let residue = obj.get("residue").ok_or("cylinder needs `residue`")?;
        let residue = residue
            .as_array()
            .ok_or("residue must be an array of rows")?
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or("residue rows must be arrays".to_string())?
                    .iter()
                    .map(|x| {
                        x.as_i64()
                            .map(i128::from)
                            .ok_or("residue entries must be integers".to_string())
                    })
                    .collect()
            })
            .collect::<Result<Vec<Vec<i128>>, String>>()?;
        if out.iter().any(|(q, _)| *q == p) {
            return Err(format!("two cylinders at p = {p}"));
        }
        out.push((
            p,
            LocalCylinder::new(p, scale, level, residue).map_err(|e| e.to_string())?,
        ));
    }
    if out.is_empty() {
        return Err("no cylinders given".into());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use kms_core::exact::{rat, ratio};

    #[test]
    fn grids() {
        let g = grid("0:3:0.25").unwrap();
        let pts = g.points();
        assert_eq!(pts.len(), 13);
        assert_eq!(pts[1], ratio(1, 4));
        assert_eq!(pts[12], rat(3));
        assert!(grid("0:1").is_err());
        assert!(grid("0:1:0").is_err());
        assert!(grid("2:1:1").is_err());
        assert!(grid("0:1000000:1/1000").is_err());
    }

    #[test]
    fn matrices_and_lists() {
        let m = rat_matrix("[[2,4],[6,\"1/2\"]]").unwrap();
        assert_eq!(m[(1, 1)], ratio(1, 2));
        assert!(int_matrix("[[1,\"1/2\"],[0,1]]").is_err());
        assert!(rat_matrix("[[1,2],[3]]").is_err());
        assert!(rat_matrix("[[1.5]]").is_err());
        assert_eq!(primes("5,2,3,2").unwrap(), vec![2, 3, 5]);
        assert!(primes("2,4").is_err());
        assert_eq!(signature("0, 3").unwrap(), vec![0, 3]);
    }

    #[test]
    fn cylinder_specs() {
        let v = cylinder_json(r#"{"p":2,"level":1,"residue":[[1,0],[0,3]]}"#).unwrap();
        let c = cylinders(&v).unwrap();
        assert_eq!(c[0].0, 2);
        assert_eq!(c[0].1.residue, vec![vec![1, 0], vec![0, 1]]);
        let dup = cylinder_json(
            r#"[{"p":2,"level":1,"residue":[[1]]},{"p":2,"level":0,"residue":[[0]]}]"#,
        )
        .unwrap();
        assert!(cylinders(&dup).is_err());
        let bad = cylinder_json(r#"{"p":4,"level":1,"residue":[[1]]}"#).unwrap();
        assert!(cylinders(&bad).is_err());
        let extra = cylinder_json(r#"{"p":2,"level":1,"residue":[[1]],"q":1}"#).unwrap();
        assert!(cylinders(&extra).is_err());
    }
}
