use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::interval::{down, up};
use super::RealInterval;
use crate::error::{Error, Result};

const EPS: f64 = f64::EPSILON;
/// Absolute floor for rounding terms, covering underflow in tiny products.
const TINY: f64 = 1e-300;

/// Disk with center re + i·im and radius rad.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexBox {
    pub re: f64,
    pub im: f64,
    pub rad: f64,
}

fn roundoff(scale: f64, k: f64) -> f64 {
    up(k * EPS * scale + TINY)
}

impl ComplexBox {
    pub fn new(re: f64, im: f64, rad: f64) -> Self {
        ComplexBox { re, im, rad: rad.max(0.0) }
    }

    pub fn point(re: f64, im: f64) -> Self {
        ComplexBox { re, im, rad: 0.0 }
    }

    pub fn real(x: f64) -> Self {
        Self::point(x, 0.0)
    }

    pub fn from_interval(x: &RealInterval) -> Self {
        let m = x.mid();
        let r = up((x.hi - m).max(m - x.lo));
        ComplexBox { re: m, im: 0.0, rad: r }
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    /// e^(2πi·num/den); exact at multiples of a quarter turn.
    pub fn unit_turn(num: i64, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        let d = den as i64;
        let k = num.rem_euclid(d);
        if (4 * k) % d == 0 {
            return match 4 * k / d {
                0 => Self::point(1.0, 0.0),
                1 => Self::point(0.0, 1.0),
                2 => Self::point(-1.0, 0.0),
                _ => Self::point(0.0, -1.0),
            };
        }
        let theta = std::f64::consts::TAU * (k as f64 / den as f64);
        let (s, c) = theta.sin_cos();
        ComplexBox { re: c, im: s, rad: 32.0 * EPS }
    }

    /// r·e^(2πi·num/den).
    pub fn from_polar(r: &RealInterval, num: i64, den: u64) -> Self {
        Self::unit_turn(num, den).scale_real(r)
    }

    /// Modulus enclosure.
    pub fn abs(&self) -> RealInterval {
        let h = self.re.hypot(self.im);
        let lo = down(down(h * (1.0 - 2.0 * EPS)) - self.rad).max(0.0);
        let hi = up(up(h * (1.0 + 2.0 * EPS)) + self.rad);
        RealInterval::new(lo, hi)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let d = (z - self.center()).norm();
        d * (1.0 - 2.0 * EPS) <= self.rad
    }

    pub fn contains_zero(&self) -> bool {
        self.abs().lo <= 0.0
    }

    pub fn neg(&self) -> Self {
        ComplexBox { re: -self.re, im: -self.im, rad: self.rad }
    }

    pub fn conj(&self) -> Self {
        ComplexBox { re: self.re, im: -self.im, rad: self.rad }
    }

    pub fn add(&self, o: &ComplexBox) -> Self {
        let re = self.re + o.re;
        let im = self.im + o.im;
        let err = roundoff(re.abs() + im.abs(), 1.0);
        ComplexBox { re, im, rad: up(up(self.rad + o.rad) + err) }
    }

    pub fn sub(&self, o: &ComplexBox) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &ComplexBox) -> Self {
        let (a, b, c, d) = (self.re, self.im, o.re, o.im);
        let re = a * c - b * d;
        let im = a * d + b * c;
        let mag = (a * c).abs() + (b * d).abs() + (a * d).abs() + (b * c).abs();
        let err = roundoff(mag, 3.0);
        let m1 = self.center().norm() * (1.0 + 2.0 * EPS);
        let m2 = o.center().norm() * (1.0 + 2.0 * EPS);
        let spread = m1 * o.rad + m2 * self.rad + self.rad * o.rad;
        ComplexBox { re, im, rad: up((spread + err) * (1.0 + 4.0 * EPS)) }
    }

    /// Product with a real interval.
    pub fn scale_real(&self, t: &RealInterval) -> Self {
        let m = t.mid();
        let half = up((t.hi - m).max(m - t.lo));
        let re = self.re * m;
        let im = self.im * m;
        let cn = self.center().norm() * (1.0 + 2.0 * EPS);
        let tmax = t.lo.abs().max(t.hi.abs());
        let spread = self.rad * tmax + cn * half;
        let err = roundoff(re.abs() + im.abs(), 1.0);
        ComplexBox { re, im, rad: up((spread + err) * (1.0 + 4.0 * EPS)) }
    }

    /// Quotient by a real interval not containing zero.
    pub fn div_real(&self, t: &RealInterval) -> Self {
        self.scale_real(&t.recip())
    }

    /// Disk inversion; the result is unbounded if the disk meets zero.
    pub fn recip(&self) -> Self {
        let c2 = RealInterval::point(self.re).sqr().add(&RealInterval::point(self.im).sqr());
        let m = c2.sub(&RealInterval::point(self.rad).sqr());
        if m.lo <= 0.0 {
            return ComplexBox { re: 0.0, im: 0.0, rad: f64::INFINITY };
        }
        let inv = m.recip();
        // Exact inverse disk: center conj(c)/m, radius rad/m.
        let center = ComplexBox::point(self.re, -self.im).scale_real(&inv);
        ComplexBox { re: center.re, im: center.im, rad: up(center.rad + up(self.rad * inv.hi)) }
    }

    pub fn div(&self, o: &ComplexBox) -> Self {
        self.mul(&o.recip())
    }

    /// Enclosure of |self − o| over all pairs of points.
    pub fn dist(&self, o: &ComplexBox) -> RealInterval {
        let dc = (self.center() - o.center()).norm();
        let err = roundoff(dc + self.center().norm() + o.center().norm(), 2.0);
        let r = self.rad + o.rad;
        RealInterval::new(down(dc - err - r).max(0.0), up(up(dc + err) + r))
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut acc = ComplexBox::real(1.0);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// All n-th roots, in order of increasing argument offset k = 0..n−1.
    pub fn nth_roots(&self, n: u32) -> Vec<ComplexBox> {
        assert!(n >= 1);
        let c = self.center();
        let rho = c.norm();
        let phi = c.arg();
        let nf = n as f64;
        let root_mod = rho.powf(1.0 / nf);
        let prop = if self.rad == 0.0 {
            0.0
        } else if self.rad < rho {
            up(self.rad / nf * (rho - self.rad).powf(1.0 / nf - 1.0) * (1.0 + 16.0 * EPS))
        } else {
            up(2.0 * (rho + self.rad).powf(1.0 / nf) * (1.0 + 16.0 * EPS))
        };
        (0..n)
            .map(|k| {
                let ang = (phi + std::f64::consts::TAU * k as f64) / nf;
                let (s, co) = ang.sin_cos();
                let num = roundoff(root_mod, 64.0);
                ComplexBox { re: root_mod * co, im: root_mod * s, rad: up(prop + num) }
            })
            .collect()
    }
}

/// Unordered tuple of complex boxes; multiplicities count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointTuple {
    points: Vec<ComplexBox>,
}

impl PointTuple {
    pub fn new(points: Vec<ComplexBox>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("point tuple must be nonempty".into()));
        }
        if points.iter().any(|p| !(p.re.is_finite() && p.im.is_finite() && p.rad.is_finite())) {
            return Err(Error::InvalidInput("point tuple has non-finite entries".into()));
        }
        Ok(PointTuple { points })
    }

    pub fn from_points(pts: &[(f64, f64)]) -> Result<Self> {
        Self::new(pts.iter().map(|&(re, im)| ComplexBox::point(re, im)).collect())
    }

    pub fn from_complex(pts: &[Complex64]) -> Result<Self> {
        Self::new(pts.iter().map(|z| ComplexBox::point(z.re, z.im)).collect())
    }

    /// The d-th roots of unity.
    pub fn roots_of_unity(d: usize) -> Self {
        assert!(d >= 1);
        PointTuple { points: (0..d).map(|j| ComplexBox::unit_turn(j as i64, d as u64)).collect() }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[ComplexBox] {
        &self.points
    }

    pub fn iter(&self) -> impl Iterator<Item = &ComplexBox> {
        self.points.iter()
    }

    pub fn centers(&self) -> Vec<Complex64> {
        self.points.iter().map(|p| p.center()).collect()
    }

    pub fn max_radius(&self) -> f64 {
        self.points.iter().map(|p| p.rad).fold(0.0, f64::max)
    }

    /// ‖ξ‖ = max modulus.
    pub fn norm(&self) -> RealInterval {
        let mut acc = self.points[0].abs();
        for p in &self.points[1..] {
            acc = acc.max(&p.abs());
        }
        acc
    }

    pub fn map(&self, f: impl Fn(&ComplexBox) -> ComplexBox) -> Self {
        PointTuple { points: self.points.iter().map(f).collect() }
    }

    pub fn rotate(&self, u: &ComplexBox) -> Self {
        self.map(|p| p.mul(u))
    }

    /// Sub-tuple at the given indices.
    pub fn select(&self, idx: &[usize]) -> Result<Self> {
        let pts = idx
            .iter()
            .map(|&i| {
                self.points
                    .get(i)
                    .copied()
                    .ok_or_else(|| Error::InvalidInput(format!("index {i} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(pts)
    }

    /// Parses CSV rows "re,im[,rad]"; blank lines and lines starting with '#'
    /// are skipped, as is a non-numeric header row.
    pub fn parse_csv(src: &str) -> Result<Self> {
        let mut pts = Vec::new();
        for (lineno, line) in src.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let parsed: std::result::Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
            let vals = match parsed {
                Ok(v) => v,
                Err(_) if pts.is_empty() && lineno == 0 => continue,
                Err(_) => {
                    return Err(Error::InvalidInput(format!("line {}: not numeric: {line:?}", lineno + 1)))
                }
            };
            match vals.as_slice() {
                [re, im] => pts.push(ComplexBox::point(*re, *im)),
                [re, im, rad] if *rad >= 0.0 => pts.push(ComplexBox::new(*re, *im, *rad)),
                _ => {
                    return Err(Error::InvalidInput(format!(
                        "line {}: expected re,im[,rad]",
                        lineno + 1
                    )))
                }
            }
        }
        Self::new(pts)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("re,im,rad\n");
        for p in &self.points {
            s.push_str(&format!("{},{},{}\n", p.re, p.im, p.rad));
        }
        s
    }
}
