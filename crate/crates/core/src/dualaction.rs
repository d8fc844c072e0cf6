//! The action of SL(2,R) × SL(2,R) on the torus and the dual action on
//! grid functions.
//!
//! A matrix `[[a, b], [c, d]]` sends `x ↦ (xa + c)/(xb + d)`. With the chart
//! `x = cot(ρ/2)`, the rotation by `θ` sends `ρ ↦ ρ + 2θ`. The dual action is
//! `(T′(g)f)(x) = γ(x, g)·f(x·g)` with `γ = k_g⁻³ s_g · k_h⁻³ s_h`; for
//! rotations `k ≡ 1` and `γ = ±1`.

use std::sync::atomic::{AtomicBool, Ordering};

use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::{sin_sign, Rational, RationalAngle, Sign};
use crate::groups::GroupElement;

static GAMMA_FAULT: AtomicBool = AtomicBool::new(false);

/// Negates every multiplier, process-wide. Negative control for the
/// verification suite; never enable it otherwise.
#[doc(hidden)]
pub fn set_gamma_fault(on: bool) {
    GAMMA_FAULT.store(on, Ordering::SeqCst);
}

fn fault() -> bool {
    GAMMA_FAULT.load(Ordering::Relaxed)
}

/// A point of the projective real line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinity,
}

impl ExtendedReal {
    /// `cot(ρ/2)` for a torus angle `ρ` in turns; `∞` at `ρ = 0`.
    pub fn from_angle(rho: &RationalAngle) -> Self {
        if rho.is_zero() {
            ExtendedReal::Infinity
        } else {
            ExtendedReal::Finite(1.0 / (rho.to_radians() / 2.0).tan())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sl2Element {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    rotation: Option<RationalAngle>,
}

impl Sl2Element {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if (det - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("determinant {det} is not 1")));
        }
        Ok(Sl2Element { a, b, c, d, rotation: None })
    }

    pub fn identity() -> Self {
        Sl2Element::rotation(RationalAngle::zero())
    }

    /// `[[cos θ, sin θ], [−sin θ, cos θ]]`, tagged with the exact angle.
    pub fn rotation(theta: RationalAngle) -> Self {
        let t = theta.to_radians();
        let (s, c) = match theta.turns().to_i64_pair() {
            // Exact entries at quarter turns keep the demonstrations clean.
            Some((0, _)) => (0.0, 1.0),
            Some((1, 4)) => (1.0, 0.0),
            Some((1, 2)) => (0.0, -1.0),
            Some((3, 4)) => (-1.0, 0.0),
            _ => t.sin_cos(),
        };
        Sl2Element { a: c, b: s, c: -s, d: c, rotation: Some(theta) }
    }

    /// `diag(e^{t/2}, e^{−t/2})`.
    pub fn boost(t: f64) -> Self {
        Sl2Element { a: (t / 2.0).exp(), b: 0.0, c: 0.0, d: (-t / 2.0).exp(), rotation: None }
    }

    pub fn rotation_angle(&self) -> Option<&RationalAngle> {
        self.rotation.as_ref()
    }
}

pub fn mobius(g: &Sl2Element, x: ExtendedReal) -> ExtendedReal {
    let (num, den) = match x {
        ExtendedReal::Finite(x) => (x * g.a + g.c, x * g.b + g.d),
        ExtendedReal::Infinity => (g.a, g.b),
    };
    if den == 0.0 {
        ExtendedReal::Infinity
    } else {
        ExtendedReal::Finite(num / den)
    }
}

pub fn k_factor(g: &Sl2Element, x: ExtendedReal) -> f64 {
    match x {
        ExtendedReal::Finite(x) => {
            (((x * g.b + g.d).powi(2) + (x * g.a + g.c).powi(2)) / (1.0 + x * x)).sqrt()
        }
        ExtendedReal::Infinity => (g.a * g.a + g.b * g.b).sqrt(),
    }
}

/// Sign of `xb + d` (of `b` at infinity), floating path.
pub fn s_factor(g: &Sl2Element, x: ExtendedReal) -> Result<Sign> {
    let v = match x {
        ExtendedReal::Finite(x) => x * g.b + g.d,
        ExtendedReal::Infinity if g.b != 0.0 => g.b,
        ExtendedReal::Infinity => g.d,
    };
    if v.abs() < 1e-12 {
        return Err(Error::Boundary(format!("xb + d vanishes at {x:?}")));
    }
    Ok(Sign::of_f64(v))
}

/// Exact `s` for the rotation by `theta` at torus angle `rho`:
/// `sign sin(ρ/2 + θ) · sign sin(ρ/2)`.
pub fn rotation_s(theta: &RationalAngle, rho: &RationalAngle) -> Result<Sign> {
    let half = RationalAngle::new(rho.turns() * &Rational::new(1, 2));
    let s = sin_sign(&(&half + theta)) * sin_sign(&half);
    if s == Sign::Zero {
        return Err(Error::Boundary(format!("rotation by {theta} at ρ = {rho}")));
    }
    Ok(s)
}

/// `γ` of a rotation pair at a torus point, as a sign.
pub fn gamma_sign(g: &GroupElement, point: (&RationalAngle, &RationalAngle)) -> Result<Sign> {
    let s = rotation_s(&g.theta, point.0)? * rotation_s(&g.phi, point.1)?;
    Ok(if fault() { -s } else { s })
}

/// `γ` of a rotation pair at a torus point; always `±1`.
pub fn gamma(g: &GroupElement, point: (&RationalAngle, &RationalAngle)) -> Result<Rational> {
    gamma_sign(g, point).map(Sign::to_rational)
}

/// `k_g⁻³ s_g · k_h⁻³ s_h` for a general pair, floating path.
pub fn gamma_sl2(g: &Sl2Element, h: &Sl2Element, x: ExtendedReal, y: ExtendedReal) -> Result<f64> {
    let one = |e: &Sl2Element, p| -> Result<f64> { Ok(k_factor(e, p).powi(-3) * s_factor(e, p)?.to_i8() as f64) };
    let v = one(g, x)? * one(h, y)?;
    Ok(if fault() { -v } else { v })
}

/// Whether `γ_{g⁻¹}(x·h⁻¹) = γ_{g⁻¹h⁻¹}(x) · γ_{h⁻¹}(x)` at a point. This is a
/// rearrangement of the cocycle identity valid for commuting ±1 multipliers;
/// kept as a diagnostic.
pub fn shifted_identity_holds(
    g: &GroupElement,
    h: &GroupElement,
    point: (&RationalAngle, &RationalAngle),
) -> Result<bool> {
    let (gi, hi) = (g.inverse(), h.inverse());
    let two = |a: &RationalAngle| a.times(2);
    let moved = (point.0 + &two(&hi.theta), point.1 + &two(&hi.phi));
    let lhs = gamma_sign(&gi, (&moved.0, &moved.1))?;
    let rhs = gamma_sign(&gi.compose(&hi), point)? * gamma_sign(&hi, point)?;
    Ok(lhs == rhs)
}

/// Half-offset grid: points `((j+½)/n1, (k+½)/n2)` in turns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    pub n1: u32,
    pub n2: u32,
}

impl GridSpec {
    pub fn new(n1: u32, n2: u32) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return Err(Error::Grid(format!("grid {n1}x{n2} is empty")));
        }
        Ok(GridSpec { n1, n2 })
    }

    /// Smallest grid on which every element shifts points to points.
    pub fn minimal_for(elements: &[GroupElement]) -> Self {
        let den = |a: &RationalAngle| {
            let d = (a.turns() * &Rational::from_integer(2)).denom().to_u32().unwrap_or(1);
            d.max(1)
        };
        elements.iter().fold(GridSpec { n1: 1, n2: 1 }, |g, e| GridSpec {
            n1: g.n1.lcm(&den(&e.theta)),
            n2: g.n2.lcm(&den(&e.phi)),
        })
    }

    pub fn refine(&self, k1: u32, k2: u32) -> Result<Self> {
        GridSpec::new(self.n1 * k1, self.n2 * k2)
    }

    pub fn len(&self) -> usize {
        self.n1 as usize * self.n2 as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, j: u32, k: u32) -> (RationalAngle, RationalAngle) {
        (
            RationalAngle::from_fraction(2 * j as i64 + 1, 2 * self.n1 as i64),
            RationalAngle::from_fraction(2 * k as i64 + 1, 2 * self.n2 as i64),
        )
    }

    /// Both coordinates as exact rationals in `(0, 1)`.
    pub fn coords(&self, j: u32, k: u32) -> (Rational, Rational) {
        (
            Rational::new(2 * j as i64 + 1, 2 * self.n1 as i64),
            Rational::new(2 * k as i64 + 1, 2 * self.n2 as i64),
        )
    }

    /// Index shifts `(2θ·n1, 2φ·n2)` of an element, if integral.
    pub fn shift(&self, g: &GroupElement) -> Result<(u32, u32)> {
        let steps = |a: &RationalAngle, n: u32| -> Option<u32> {
            let s = a.turns() * &Rational::from_integer(2 * n as i64);
            if s.is_integer() {
                s.numer().to_u32()
            } else {
                None
            }
        };
        match (steps(&g.theta, self.n1), steps(&g.phi, self.n2)) {
            (Some(a), Some(b)) => Ok((a % self.n1, b % self.n2)),
            _ => Err(Error::Grid(format!("{g} does not map the {}x{} grid to itself", self.n1, self.n2))),
        }
    }

    pub fn commensurate(&self, g: &GroupElement) -> bool {
        self.shift(g).is_ok()
    }
}

/// Signs of the rotation by `theta` along one grid axis of size `n`, in
/// pure integer arithmetic: with `t = 2θn`, `sin(ρ/2 + θ)` at
/// `ρ = (j+½)/n` has the sign of `sin(2π(2j+1+2t)/(4n))`, and `ρ/2 < ½`.
fn axis_signs(theta: &RationalAngle, n: u32) -> Result<Vec<i8>> {
    let t = theta.turns() * &Rational::from_integer(2 * n as i64);
    if !t.is_integer() {
        return Err(Error::Grid(format!("angle {theta} is not commensurate with {n} points")));
    }
    let t = t.numer().to_u64().expect("angle in [0, 1)");
    let period = 4 * n as u64;
    Ok((0..n as u64)
        .map(|j| if (2 * j + 1 + 2 * t) % period < 2 * n as u64 { 1 } else { -1 })
        .collect())
}

/// `T′(g)` on a fixed grid with its shifts and signs precomputed.
#[derive(Debug, Clone)]
pub struct PreparedAction {
    spec: GridSpec,
    shift: (u32, u32),
    rows: Vec<i8>,
    cols: Vec<i8>,
}

impl PreparedAction {
    pub fn new(g: &GroupElement, spec: GridSpec) -> Result<Self> {
        let shift = spec.shift(g)?;
        let mut rows = axis_signs(&g.theta, spec.n1)?;
        let cols = axis_signs(&g.phi, spec.n2)?;
        if fault() {
            rows.iter_mut().for_each(|s| *s = -*s);
        }
        Ok(PreparedAction { spec, shift, rows, cols })
    }

    pub fn shift(&self) -> (u32, u32) {
        self.shift
    }

    /// `γ` at grid point `(j, k)`.
    pub fn sign(&self, j: u32, k: u32) -> i8 {
        self.rows[j as usize] * self.cols[k as usize]
    }

    fn source(&self, j: u32, k: u32) -> usize {
        let sj = (j + self.shift.0) % self.spec.n1;
        let sk = (k + self.shift.1) % self.spec.n2;
        sj as usize * self.spec.n2 as usize + sk as usize
    }

    fn check(&self, f: &GridFunction) -> Result<()> {
        if f.spec != self.spec {
            return Err(Error::Grid(format!("function on {:?}, action prepared for {:?}", f.spec, self.spec)));
        }
        Ok(())
    }

    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        self.check(f)?;
        let n2 = self.spec.n2;
        let values = (0..self.spec.len())
            .into_par_iter()
            .map(|i| {
                let (j, k) = ((i / n2 as usize) as u32, (i % n2 as usize) as u32);
                let v = &f.values[self.source(j, k)];
                if self.sign(j, k) > 0 {
                    v.clone()
                } else {
                    -v
                }
            })
            .collect();
        Ok(GridFunction { spec: self.spec, values })
    }

    /// `acc += T′(g) f`.
    pub fn accumulate(&self, f: &GridFunction, acc: &mut [Rational]) -> Result<()> {
        self.check(f)?;
        let n2 = self.spec.n2;
        for (i, slot) in acc.iter_mut().enumerate() {
            let (j, k) = ((i / n2 as usize) as u32, (i % n2 as usize) as u32);
            let v = &f.values[self.source(j, k)];
            if self.sign(j, k) > 0 {
                *slot += v;
            } else {
                *slot -= v;
            }
        }
        Ok(())
    }

    /// `T′(g) f = f`, stopping at the first differing point.
    pub fn fixes(&self, f: &GridFunction) -> Result<bool> {
        self.check(f)?;
        let n2 = self.spec.n2;
        Ok(f.values.iter().enumerate().all(|(i, v)| {
            let (j, k) = ((i / n2 as usize) as u32, (i % n2 as usize) as u32);
            let w = &f.values[self.source(j, k)];
            if self.sign(j, k) > 0 {
                v == w
            } else {
                v.is_negation_of(w)
            }
        }))
    }
}

/// Exact rational values on a half-offset grid, row-major (`j` major).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GridFunction {
    spec: GridSpec,
    values: Vec<Rational>,
}

impl GridFunction {
    pub fn new(spec: GridSpec, values: Vec<Rational>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::Grid(format!("{} values for a {}x{} grid", values.len(), spec.n1, spec.n2)));
        }
        Ok(GridFunction { spec, values })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        GridFunction { spec, values: vec![Rational::zero(); spec.len()] }
    }

    pub fn from_fn(spec: GridSpec, mut f: impl FnMut(u32, u32) -> Rational) -> Self {
        let values = (0..spec.n1).flat_map(|j| (0..spec.n2).map(move |k| (j, k))).map(|(j, k)| f(j, k)).collect();
        GridFunction { spec, values }
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn get(&self, j: u32, k: u32) -> &Rational {
        &self.values[j as usize * self.spec.n2 as usize + k as usize]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Rational::is_zero)
    }

    pub fn support_len(&self) -> usize {
        self.values.iter().filter(|v| !v.is_zero()).count()
    }

    /// `Σ v² / (n1·n2)`: the grid stand-in for the L² norm squared.
    pub fn norm_sq(&self) -> Rational {
        let sum: Rational = self.values.iter().map(|v| v * v).sum();
        sum / Rational::from_integer(self.spec.len() as i64)
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.zip(other, |a, b| a - b)
    }

    pub fn add(&self, other: &GridFunction) -> Result<GridFunction> {
        self.zip(other, |a, b| a + b)
    }

    pub fn scale(&self, c: &Rational) -> GridFunction {
        GridFunction { spec: self.spec, values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn mul_pointwise(&self, other: &GridFunction) -> Result<GridFunction> {
        self.zip(other, |a, b| a * b)
    }

    fn zip(&self, other: &GridFunction, op: impl Fn(&Rational, &Rational) -> Rational) -> Result<GridFunction> {
        if self.spec != other.spec {
            return Err(Error::Grid(format!("grids {:?} and {:?} differ", self.spec, other.spec)));
        }
        Ok(GridFunction {
            spec: self.spec,
            values: self.values.iter().zip(&other.values).map(|(a, b)| op(a, b)).collect(),
        })
    }
}

#[derive(Serialize, Deserialize)]
struct GridFunctionJson {
    n1: u32,
    n2: u32,
    values: Vec<Rational>,
}

impl Serialize for GridFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GridFunctionJson { n1: self.spec.n1, n2: self.spec.n2, values: self.values.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GridFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = GridFunctionJson::deserialize(d)?;
        let spec = GridSpec::new(raw.n1, raw.n2).map_err(serde::de::Error::custom)?;
        GridFunction::new(spec, raw.values).map_err(serde::de::Error::custom)
    }
}

/// `(T′(g) f)(ρ, σ) = γ((ρ, σ), g) · f(ρ + 2θ, σ + 2φ)`.
pub fn dual_apply(g: &GroupElement, f: &GridFunction) -> Result<GridFunction> {
    PreparedAction::new(g, f.spec)?.apply(f)
}
