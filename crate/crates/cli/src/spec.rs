//! The `name:key=val,key=val` mini-language for geometries, maps and statistics.
//!
//! Grammar:
//!
//! ```text
//! spec   := name [ ":" pair { "," pair } ]
//! pair   := key "=" value
//! value  := number | number { "/" number }      (lists use '/')
//! ```
//!
//! Geometries (all carry an optional total charge `N`, default 1):
//!
//! | spec                                    | body                               |
//! |-----------------------------------------|------------------------------------|
//! | `ball:d=3,R=1`                          | ball of radius `R` in `R^d`        |
//! | `disk:R=1`                              | `ball` with `d = 2`                |
//! | `annulus:R=1,c=0.5`                     | `cR ≤ r ≤ R`                       |
//! | `segment:R=1`                           | `[−R, R]`                          |
//! | `ellipse:a1=2,a2=1`                     | planar ellipse                     |
//! | `ellipsoid:axes=1/1/2`                  | hyperellipsoid, `d` = number of axes |
//! | `rectangle:x0=0,y0=0,x1=1,y1=1`         | axis-aligned rectangle             |
//! | `cuboid:x0=0,y0=0,z0=0,x1=1,y1=1,z1=1`  | axis-aligned box                   |
//! | `square:a=1` / `cube:a=1`               | `[0,a]²` / `[0,a]³`                |
//!
//! Conformal maps: `circle:R=1`, `ellipse:a1=2,a2=1`, `interval:h=1`,
//! `droplet:alpha=0.1,area=3.14159`, and `laurent:c=1,a1=0.2,b1=0,a2=…` for
//! `ξ(w) = c w + Σ (a_k + i b_k) w^{−k}`.

use std::collections::BTreeMap;

use elstat_core::conformal::LaurentMap;
use elstat_core::domains::{Geometry, UniformDomain};
use elstat_core::Complex64;

use crate::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct Spec {
    pub name: String,
    values: BTreeMap<String, String>,
}

impl Spec {
    pub fn parse(text: &str) -> CliResult<Self> {
        let text = text.trim();
        let (name, rest) = match text.split_once(':') {
            Some((n, r)) => (n.trim(), r.trim()),
            None => (text, ""),
        };
        if name.is_empty() {
            return Err(CliError::arg(format!("empty specification '{text}'")));
        }
        let mut values = BTreeMap::new();
        for pair in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| CliError::arg(format!("expected key=value in '{pair}'")))?;
            if values.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return Err(CliError::arg(format!("duplicate key '{}' in '{text}'", k.trim())));
            }
        }
        Ok(Self { name: name.to_ascii_lowercase(), values })
    }

    pub fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn f64(&self, key: &str) -> CliResult<f64> {
        let v = self
            .values
            .get(key)
            .ok_or_else(|| CliError::arg(format!("'{}' needs the key '{key}'", self.name)))?;
        parse_f64(v)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> CliResult<f64> {
        if self.has(key) {
            self.f64(key)
        } else {
            Ok(default)
        }
    }

    pub fn list(&self, key: &str) -> CliResult<Vec<f64>> {
        let v = self
            .values
            .get(key)
            .ok_or_else(|| CliError::arg(format!("'{}' needs the key '{key}'", self.name)))?;
        v.split('/').map(parse_f64).collect()
    }

    /// Reject keys outside `allowed`, so typos do not pass silently.
    pub fn only(&self, allowed: &[&str]) -> CliResult<()> {
        for k in self.values.keys() {
            if !allowed.contains(&k.as_str()) {
                return Err(CliError::arg(format!("unknown key '{k}' for '{}'", self.name)));
            }
        }
        Ok(())
    }

    pub fn keys(&self) -> impl Iterator<Item = (&String, &String)> {
        self.values.iter()
    }
}

pub fn parse_f64(s: &str) -> CliResult<f64> {
    let t = s.trim();
    let v = match t {
        "pi" => std::f64::consts::PI,
        "-pi" => -std::f64::consts::PI,
        _ => t.parse::<f64>().map_err(|_| CliError::arg(format!("'{t}' is not a number")))?,
    };
    Ok(v)
}

/// Comma-separated coordinates, e.g. `0.5,0,-1`.
pub fn parse_point(s: &str) -> CliResult<Vec<f64>> {
    s.split(',').map(parse_f64).collect()
}

/// Semicolon-separated points, e.g. `0,0;1,0.5`.
pub fn parse_points(s: &str) -> CliResult<Vec<Vec<f64>>> {
    s.split(';').filter(|p| !p.trim().is_empty()).map(parse_point).collect()
}

/// A point of the plane given as `x,y`.
pub fn parse_complex(s: &str) -> CliResult<Complex64> {
    let p = parse_point(s)?;
    match p.as_slice() {
        [x, y] => Ok(Complex64::new(*x, *y)),
        [x] => Ok(Complex64::new(*x, 0.0)),
        _ => Err(CliError::arg(format!("'{s}' is not a planar point"))),
    }
}

pub fn parse_geometry(text: &str) -> CliResult<(Geometry, f64)> {
    let s = Spec::parse(text)?;
    let n = s.f64_or("N", 1.0)?;
    let g = match s.name.as_str() {
        "ball" => {
            s.only(&["d", "R", "N"])?;
            let d = s.f64("d")?;
            if d.fract() != 0.0 || d < 1.0 {
                return Err(CliError::arg("ball dimension d must be a positive integer"));
            }
            Geometry::Ball { d: d as u32, radius: s.f64_or("R", 1.0)? }
        }
        "disk" => {
            s.only(&["R", "N"])?;
            Geometry::Ball { d: 2, radius: s.f64_or("R", 1.0)? }
        }
        "annulus" => {
            s.only(&["R", "c", "N"])?;
            Geometry::Annulus { radius: s.f64_or("R", 1.0)?, c: s.f64("c")? }
        }
        "segment" => {
            s.only(&["R", "N"])?;
            Geometry::Segment { radius: s.f64_or("R", 1.0)? }
        }
        "ellipse" => {
            s.only(&["a1", "a2", "N"])?;
            Geometry::Ellipse { a1: s.f64("a1")?, a2: s.f64("a2")? }
        }
        "ellipsoid" | "hyperellipsoid" => {
            s.only(&["axes", "N"])?;
            Geometry::Hyperellipsoid { axes: s.list("axes")? }
        }
        "rectangle" => {
            s.only(&["x0", "y0", "x1", "y1", "N"])?;
            Geometry::Rectangle { lo: [s.f64_or("x0", 0.0)?, s.f64_or("y0", 0.0)?], hi: [s.f64("x1")?, s.f64("y1")?] }
        }
        "square" => {
            s.only(&["a", "N"])?;
            let a = s.f64_or("a", 1.0)?;
            Geometry::Rectangle { lo: [0.0; 2], hi: [a; 2] }
        }
        "cuboid" => {
            s.only(&["x0", "y0", "z0", "x1", "y1", "z1", "N"])?;
            Geometry::Cuboid {
                lo: [s.f64_or("x0", 0.0)?, s.f64_or("y0", 0.0)?, s.f64_or("z0", 0.0)?],
                hi: [s.f64("x1")?, s.f64("y1")?, s.f64("z1")?],
            }
        }
        "cube" => {
            s.only(&["a", "N"])?;
            let a = s.f64_or("a", 1.0)?;
            Geometry::Cuboid { lo: [0.0; 3], hi: [a; 3] }
        }
        other => return Err(CliError::UnsupportedGeometry(other.to_string())),
    };
    Ok((g, n))
}

pub fn parse_domain(text: &str) -> CliResult<UniformDomain> {
    let (g, n) = parse_geometry(text)?;
    Ok(UniformDomain::new(g, n)?)
}

pub fn parse_map(text: &str) -> CliResult<LaurentMap> {
    let s = Spec::parse(text)?;
    let map = match s.name.as_str() {
        "circle" | "disk" => {
            s.only(&["R"])?;
            LaurentMap::circle(s.f64_or("R", 1.0)?)?
        }
        "ellipse" => {
            s.only(&["a1", "a2"])?;
            LaurentMap::ellipse(s.f64("a1")?, s.f64("a2")?)?
        }
        "interval" => {
            s.only(&["h"])?;
            LaurentMap::interval(s.f64_or("h", 1.0)?)?
        }
        "droplet" => {
            s.only(&["alpha", "area"])?;
            elstat_core::conformal::quadratic_droplet(s.f64("alpha")?, s.f64_or("area", std::f64::consts::PI)?)?
        }
        "laurent" => {
            let mut coeffs = vec![Complex64::new(s.f64_or("a0", 0.0)?, s.f64_or("b0", 0.0)?)];
            let mut max_k = 0;
            for (k, _) in s.keys() {
                if k == "c" {
                    continue;
                }
                match (k.chars().next(), k.get(1..).and_then(|t| t.parse::<usize>().ok())) {
                    (Some('a' | 'b'), Some(i)) => max_k = max_k.max(i),
                    _ => return Err(CliError::arg(format!("unknown key '{k}' for 'laurent'"))),
                }
            }
            for k in 1..=max_k {
                coeffs.push(Complex64::new(s.f64_or(&format!("a{k}"), 0.0)?, s.f64_or(&format!("b{k}"), 0.0)?));
            }
            LaurentMap::new(s.f64_or("c", 1.0)?, coeffs)?
        }
        other => return Err(CliError::UnsupportedGeometry(other.to_string())),
    };
    Ok(map)
}

/// A real trigonometric polynomial `trig:c0=…,c1=…,s1=…` meaning
/// `c0 + Σ c_k cos kθ + s_k sin kθ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trig {
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl Trig {
    pub fn parse(text: &str) -> CliResult<Self> {
        let s = Spec::parse(text)?;
        let (cos, sin) = match s.name.as_str() {
            "cos" | "sin" => {
                s.only(&["k", "a"])?;
                let k = s.f64_or("k", 1.0)?;
                if k.fract() != 0.0 || k < 0.0 {
                    return Err(CliError::arg("harmonic k must be a non-negative integer"));
                }
                let k = k as usize;
                let mut v = vec![0.0; k + 1];
                v[k] = s.f64_or("a", 1.0)?;
                if s.name == "cos" {
                    (v, vec![0.0; k + 1])
                } else {
                    (vec![0.0; k + 1], v)
                }
            }
            "trig" => {
                let mut cos = Vec::new();
                let mut sin = Vec::new();
                for (k, v) in s.keys() {
                    let (kind, idx) = k.split_at(1);
                    let idx: usize = idx.parse().map_err(|_| CliError::arg(format!("bad trig key '{k}'")))?;
                    let target = match kind {
                        "c" => &mut cos,
                        "s" => &mut sin,
                        _ => return Err(CliError::arg(format!("bad trig key '{k}'"))),
                    };
                    if target.len() <= idx {
                        target.resize(idx + 1, 0.0);
                    }
                    target[idx] = parse_f64(v)?;
                }
                (cos, sin)
            }
            other => return Err(CliError::arg(format!("unknown statistic '{other}'"))),
        };
        Ok(Self { cos, sin })
    }

    pub fn degree(&self) -> usize {
        self.cos.len().max(self.sin.len()).saturating_sub(1)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let c: f64 = self.cos.iter().enumerate().map(|(k, a)| a * (k as f64 * t).cos()).sum();
        let s: f64 = self.sin.iter().enumerate().map(|(k, a)| a * (k as f64 * t).sin()).sum();
        c + s
    }
}

/// A statistic of a planar point: `re:k=1` is `Re z^k`, `im:k=2` is `Im z^k`,
/// `abs2` is `|z|²`, `const:a=…` a constant. An optional `scale=s` divides `z` by `s`
/// first.
#[derive(Debug, Clone, PartialEq)]
pub enum PlanarStat {
    Re { k: u32, scale: f64 },
    Im { k: u32, scale: f64 },
    Abs2 { scale: f64 },
    Const(f64),
}

impl PlanarStat {
    pub fn parse(text: &str) -> CliResult<Self> {
        let s = Spec::parse(text)?;
        let scale = s.f64_or("scale", 1.0)?;
        let k = s.f64_or("k", 1.0)?;
        if k.fract() != 0.0 || k < 0.0 {
            return Err(CliError::arg("power k must be a non-negative integer"));
        }
        Ok(match s.name.as_str() {
            "re" => {
                s.only(&["k", "scale"])?;
                PlanarStat::Re { k: k as u32, scale }
            }
            "im" => {
                s.only(&["k", "scale"])?;
                PlanarStat::Im { k: k as u32, scale }
            }
            "abs2" => {
                s.only(&["scale"])?;
                PlanarStat::Abs2 { scale }
            }
            "const" => {
                s.only(&["a"])?;
                PlanarStat::Const(s.f64_or("a", 1.0)?)
            }
            other => return Err(CliError::arg(format!("unknown statistic '{other}'"))),
        })
    }

    pub fn eval(&self, z: Complex64) -> f64 {
        match *self {
            PlanarStat::Re { k, scale } => (z / scale).powu(k).re,
            PlanarStat::Im { k, scale } => (z / scale).powu(k).im,
            PlanarStat::Abs2 { scale } => (z / scale).norm_sqr(),
            PlanarStat::Const(a) => a,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_geometries() {
        let (g, n) = parse_geometry("ball:d=3,R=1,N=1").unwrap();
        assert_eq!(g, Geometry::Ball { d: 3, radius: 1.0 });
        assert_eq!(n, 1.0);
        let (g, _) = parse_geometry("ellipsoid:axes=1/1/2,N=4").unwrap();
        assert_eq!(g, Geometry::Hyperellipsoid { axes: vec![1.0, 1.0, 2.0] });
        assert!(matches!(parse_geometry("torus:R=1,r=0.2"), Err(CliError::UnsupportedGeometry(n)) if n == "torus"));
        assert!(matches!(parse_geometry("ball:d=3,R=1,q=2"), Err(CliError::Argument(_))));
        assert!(matches!(parse_geometry("ball:d=3,R"), Err(CliError::Argument(_))));
    }

    #[test]
    fn parses_maps_and_statistics() {
        let m = parse_map("laurent:c=2,a1=0.5").unwrap();
        assert_eq!(m, LaurentMap::new(2.0, vec![Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0)]).unwrap());
        assert_eq!(parse_map("ellipse:a1=2,a2=1").unwrap(), LaurentMap::ellipse(2.0, 1.0).unwrap());
        assert!(parse_map("laurent:c=1,q3=1").is_err());
        let t = Trig::parse("trig:c1=1,s3=0.5").unwrap();
        assert_eq!(t.degree(), 3);
        assert!((t.eval(0.3) - (0.3f64.cos() + 0.5 * 0.9f64.sin())).abs() < 1e-15);
        let p = PlanarStat::parse("re:scale=2").unwrap();
        assert_eq!(p.eval(Complex64::new(3.0, 1.0)), 1.5);
        assert_eq!(parse_points("0,0;1,2").unwrap(), vec![vec![0.0, 0.0], vec![1.0, 2.0]]);
        assert_eq!(parse_f64("pi").unwrap(), std::f64::consts::PI);
    }
}
