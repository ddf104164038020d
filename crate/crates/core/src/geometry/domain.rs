//! Parametric domains of C^n given as sublevel sets of defining functions.

use serde::{Deserialize, Serialize};

use crate::point;
use crate::{Error, Point, Result};

fn one() -> f64 {
    1.0
}

/// One monomial `coeff * z^powers` of a complex polynomial in z_1..z_n.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyTerm {
    pub powers: Vec<u32>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// A complex polynomial on C^n as a list of monomials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub terms: Vec<PolyTerm>,
}

impl Polynomial {
    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .filter(|t| t.re != 0.0 || t.im != 0.0)
            .map(|t| t.powers.iter().sum())
            .max()
            .unwrap_or(0)
    }

    /// Evaluate at the point `p`, returning (Re, Im).
    pub fn eval(&self, p: &Point, n: usize) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for t in &self.terms {
            let (mut tr, mut ti) = (t.re, t.im);
            for (j, &pw) in t.powers.iter().enumerate().take(n) {
                for _ in 0..pw {
                    let (x, y) = (p[2 * j], p[2 * j + 1]);
                    let nr = tr * x - ti * y;
                    let ni = tr * y + ti * x;
                    tr = nr;
                    ti = ni;
                }
            }
            re += tr;
            im += ti;
        }
        (re, im)
    }

    pub fn abs2(&self, p: &Point, n: usize) -> f64 {
        let (re, im) = self.eval(p, n);
        re * re + im * im
    }
}

/// The shape catalogue. All defining functions are evaluable on all of
/// R^{2n}; the domain is `{rho < 0}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum Shape {
    /// `|z - center| < radius`, rho = |z-c|^2 - r^2.
    Ball { center: Vec<f64>, radius: f64 },
    /// `<x, normal> > offset` (normal need not be unit; it is normalized).
    Halfspace { normal: Vec<f64>, offset: f64 },
    /// n = 2: `Im w > scale (|z|^2 + (Re w)^2)`; n = 1: `Im z > scale (Re z)^2`.
    Paraboloid {
        #[serde(default = "one")]
        scale: f64,
    },
    /// `sum ((x_k - c_k)/a_k)^2 < 1`.
    Ellipsoid {
        center: Vec<f64>,
        semi_axes: Vec<f64>,
    },
    /// Halfspace intersected with a strip: `<x,normal> > offset` and
    /// `|<x, strip_normal>| < half_width`.
    StripConvex {
        normal: Vec<f64>,
        offset: f64,
        strip_normal: Vec<f64>,
        half_width: f64,
    },
    /// `|z|^2 + log |Q(z)|^2 < level`. Not convex; contains the zero set of Q.
    PolySublevel {
        poly: Polynomial,
        level: f64,
        #[serde(default)]
        interior_hint: Option<Vec<f64>>,
    },
}

/// A domain of C^n (n = 1 or 2) described by a defining function.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainSpec {
    pub n: usize,
    pub shape: Shape,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainDoc {
    #[serde(flatten)]
    shape: Shape,
    n: usize,
}

impl Serialize for DomainSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DomainDoc {
            shape: self.shape.clone(),
            n: self.n,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DomainSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = DomainDoc::deserialize(d)?;
        let spec = DomainSpec {
            n: doc.n,
            shape: doc.shape,
        };
        spec.validate().map_err(serde::de::Error::custom)?;
        Ok(spec)
    }
}

fn unit(v: &[f64], rd: usize) -> Result<Point> {
    let mut p = point::ZERO;
    if v.len() != rd {
        return Err(Error::InvalidDomain(format!(
            "vector length {} does not match real dimension {}",
            v.len(),
            rd
        )));
    }
    for (k, &c) in v.iter().enumerate() {
        p[k] = c;
    }
    let nv = point::norm(&p, rd);
    if nv <= 0.0 || !nv.is_finite() {
        return Err(Error::InvalidDomain("zero normal vector".into()));
    }
    Ok(point::scale(&p, 1.0 / nv))
}

fn as_point(v: &[f64], rd: usize) -> Result<Point> {
    let mut p = point::ZERO;
    if v.len() != rd {
        return Err(Error::InvalidDomain(format!(
            "vector length {} does not match real dimension {}",
            v.len(),
            rd
        )));
    }
    p[..rd].copy_from_slice(&v[..rd]);
    Ok(p)
}

impl DomainSpec {
    pub fn new(n: usize, shape: Shape) -> Result<Self> {
        let spec = DomainSpec { n, shape };
        spec.validate()?;
        Ok(spec)
    }

    pub fn ball(n: usize, center: &[f64], radius: f64) -> Result<Self> {
        Self::new(
            n,
            Shape::Ball {
                center: center.to_vec(),
                radius,
            },
        )
    }

    pub fn halfspace(n: usize, normal: &[f64], offset: f64) -> Result<Self> {
        Self::new(
            n,
            Shape::Halfspace {
                normal: normal.to_vec(),
                offset,
            },
        )
    }

    pub fn paraboloid(n: usize) -> Result<Self> {
        Self::new(n, Shape::Paraboloid { scale: 1.0 })
    }

    fn validate(&self) -> Result<()> {
        if self.n != 1 && self.n != 2 {
            return Err(Error::InvalidDomain(format!(
                "complex dimension must be 1 or 2, got {}",
                self.n
            )));
        }
        let rd = 2 * self.n;
        match &self.shape {
            Shape::Ball { center, radius } => {
                as_point(center, rd)?;
                if *radius <= 0.0 {
                    return Err(Error::InvalidDomain("ball radius must be positive".into()));
                }
            }
            Shape::Halfspace { normal, .. } => {
                unit(normal, rd)?;
            }
            Shape::Paraboloid { scale } => {
                if *scale <= 0.0 {
                    return Err(Error::InvalidDomain("paraboloid scale must be positive".into()));
                }
            }
            Shape::Ellipsoid { center, semi_axes } => {
                as_point(center, rd)?;
                let axes = as_point(semi_axes, rd)?;
                if axes[..rd].iter().any(|&a| a <= 0.0) {
                    return Err(Error::InvalidDomain("semi-axes must be positive".into()));
                }
            }
            Shape::StripConvex {
                normal,
                strip_normal,
                half_width,
                ..
            } => {
                unit(normal, rd)?;
                unit(strip_normal, rd)?;
                if *half_width <= 0.0 {
                    return Err(Error::InvalidDomain("strip half width must be positive".into()));
                }
            }
            Shape::PolySublevel { poly, .. } => {
                if poly.terms.is_empty() {
                    return Err(Error::InvalidDomain("empty polynomial".into()));
                }
                for t in &poly.terms {
                    if t.powers.len() != self.n {
                        return Err(Error::InvalidDomain(
                            "monomial power length must equal n".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn rd(&self) -> usize {
        2 * self.n
    }

    /// Defining function value at `p`.
    pub fn rho(&self, p: &Point) -> f64 {
        let rd = self.rd();
        match &self.shape {
            Shape::Ball { center, radius } => {
                let mut s = 0.0;
                for k in 0..rd {
                    let d = p[k] - center[k];
                    s += d * d;
                }
                s - radius * radius
            }
            Shape::Halfspace { normal, offset } => {
                let nh = unit(normal, rd).expect("validated");
                let off = *offset / point::norm(&as_point(normal, rd).expect("validated"), rd)
                    * point::norm(&nh, rd);
                off - point::dot(p, &nh, rd)
            }
            Shape::Paraboloid { scale } => match self.n {
                1 => scale * p[0] * p[0] - p[1],
                _ => scale * (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) - p[3],
            },
            Shape::Ellipsoid { center, semi_axes } => {
                let mut s = 0.0;
                for k in 0..rd {
                    let d = (p[k] - center[k]) / semi_axes[k];
                    s += d * d;
                }
                s - 1.0
            }
            Shape::StripConvex {
                normal,
                offset,
                strip_normal,
                half_width,
            } => {
                let nh = unit(normal, rd).expect("validated");
                let sh = unit(strip_normal, rd).expect("validated");
                let scale = point::norm(&as_point(normal, rd).expect("validated"), rd);
                let a = *offset / scale - point::dot(p, &nh, rd);
                let b = point::dot(p, &sh, rd).abs() - *half_width;
                a.max(b)
            }
            Shape::PolySublevel { poly, level, .. } => {
                let mut s = 0.0;
                for k in 0..rd {
                    s += p[k] * p[k];
                }
                s + poly.abs2(p, self.n).ln() - level
            }
        }
    }

    /// Central-difference gradient of rho, step `h`.
    pub fn grad_rho(&self, p: &Point, h: f64) -> Point {
        let mut g = point::ZERO;
        for k in 0..self.rd() {
            let mut pp = *p;
            let mut pm = *p;
            pp[k] += h;
            pm[k] -= h;
            g[k] = (self.rho(&pp) - self.rho(&pm)) / (2.0 * h);
        }
        g
    }

    /// True for the kinds whose defining function is convex.
    pub fn convex(&self) -> bool {
        !matches!(self.shape, Shape::PolySublevel { .. })
    }

    pub fn bounded(&self) -> bool {
        matches!(self.shape, Shape::Ball { .. } | Shape::Ellipsoid { .. })
    }

    /// A deterministic point strictly inside the domain.
    pub fn interior_point(&self) -> Point {
        let rd = self.rd();
        match &self.shape {
            Shape::Ball { center, .. } | Shape::Ellipsoid { center, .. } => {
                as_point(center, rd).expect("validated")
            }
            Shape::Halfspace { normal, offset } => {
                let nh = unit(normal, rd).expect("validated");
                let scale = point::norm(&as_point(normal, rd).expect("validated"), rd);
                point::scale(&nh, offset / scale + 1.0)
            }
            Shape::Paraboloid { scale } => {
                let mut p = point::ZERO;
                p[rd - 1] = 1.0 / scale;
                p
            }
            Shape::StripConvex { normal, offset, .. } => {
                let nh = unit(normal, rd).expect("validated");
                let scale = point::norm(&as_point(normal, rd).expect("validated"), rd);
                point::scale(&nh, offset / scale + 1.0)
            }
            Shape::PolySublevel { interior_hint, .. } => {
                if let Some(hint) = interior_hint {
                    as_point(hint, rd).expect("validated")
                } else {
                    point::ZERO
                }
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("domain serialization")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// A domain together with optional truncation cuts: balls `|z - c| < r` and
/// a slab `Re<z, v> < c`. Cuts are what make unbounded domains exhaustible
/// and patched subproblems bounded; the effective defining function is the
/// max of the pieces.
#[derive(Clone, Debug)]
pub struct Region {
    pub spec: DomainSpec,
    pub ball_cuts: Vec<(Point, f64)>,
    pub slab_cut: Option<(Point, f64)>,
}

impl Region {
    pub fn from_spec(spec: DomainSpec) -> Self {
        Region {
            spec,
            ball_cuts: Vec::new(),
            slab_cut: None,
        }
    }

    pub fn with_ball_cut(mut self, center: Point, radius: f64) -> Self {
        self.ball_cuts.push((center, radius));
        self
    }

    pub fn with_slab_cut(mut self, v: Point, c: f64) -> Self {
        self.slab_cut = Some((v, c));
        self
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn rd(&self) -> usize {
        self.spec.rd()
    }

    pub fn bounded(&self) -> bool {
        self.spec.bounded() || !self.ball_cuts.is_empty()
    }

    /// Effective defining function: max over the domain wall and all cuts.
    pub fn rho(&self, p: &Point) -> f64 {
        let mut r = self.spec.rho(p);
        for (c, rad) in &self.ball_cuts {
            let d = point::dist(p, c, self.rd());
            r = r.max(d * d - rad * rad);
        }
        if let Some((v, c)) = &self.slab_cut {
            r = r.max(point::re_inner(p, v, self.n()) - c);
        }
        r
    }

    /// Value of the domain wall alone (no cuts) at `p`.
    pub fn rho_wall(&self, p: &Point) -> f64 {
        self.spec.rho(p)
    }

    /// True when the snapped point `p` on the zero set sits on a truncation
    /// cut rather than the domain wall.
    pub fn binds_cut(&self, p: &Point, tol: f64) -> bool {
        self.spec.rho(p).abs() > tol
    }

    /// Whether the domain wall is the constraint nearest to zero at `p`
    /// (robust for points off the zero set, unlike [`Self::binds_cut`]).
    pub fn nearest_is_wall(&self, p: &Point) -> bool {
        let wall = self.spec.rho(p).abs();
        let mut cut_min = f64::INFINITY;
        for (c, rad) in &self.ball_cuts {
            let d = point::dist(p, c, self.rd());
            cut_min = cut_min.min((d * d - rad * rad).abs());
        }
        if let Some((v, c)) = &self.slab_cut {
            cut_min = cut_min.min((point::re_inner(p, v, self.n()) - c).abs());
        }
        wall <= cut_min
    }
}

/// Point classification against a defining function at a given resolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointClass {
    Interior,
    Boundary,
    Exterior,
}

/// Classify `p` with the half-cell tolerance band `TOL_GEOM * spacing`.
pub fn classify_point(region: &Region, p: &Point, spacing: f64) -> Result<PointClass> {
    debug_assert!(spacing > 0.0);
    let r = region.rho(p);
    if !r.is_finite() {
        // log|Q|^2 pulls rho to -inf on the zero set of Q: that is interior.
        if r == f64::NEG_INFINITY {
            return Ok(PointClass::Interior);
        }
        return Err(Error::InvalidDomain(format!(
            "rho not finite at {:?}",
            &p[..region.rd()]
        )));
    }
    let band = crate::defaults::TOL_GEOM * spacing;
    Ok(if r < -band {
        PointClass::Interior
    } else if r > band {
        PointClass::Exterior
    } else {
        PointClass::Boundary
    })
}
