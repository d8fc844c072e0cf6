//! Exact arithmetic: rationals, angles measured in turns, factorization,
//! signs of sines at rational angles, and exact sums of roots of unity.
//!
//! All angles are fractions of a full turn (angle = 2π·turns), so every
//! group element, grid point and rectangle corner is an exact rational.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeTuple, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arbitrary-precision rational in lowest terms with positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(BigRational);

impl Rational {
    /// Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Self {
        Rational(BigRational::new(num, den))
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn floor(&self) -> Rational {
        Rational(self.0.floor())
    }

    pub fn abs(&self) -> Rational {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Rational {
        Rational(self.0.recip())
    }

    pub fn signum(&self) -> Sign {
        if self.0.is_zero() {
            Sign::Zero
        } else if self.0.is_positive() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    /// `self == -other`, without allocating.
    pub fn is_negation_of(&self, other: &Rational) -> bool {
        if self.is_zero() || other.is_zero() {
            return self.is_zero() && other.is_zero();
        }
        self.denom() == other.denom()
            && self.numer().sign() != other.numer().sign()
            && self.numer().magnitude() == other.numer().magnitude()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Numerator and denominator when both fit in `i64`.
    pub fn to_i64_pair(&self) -> Option<(i64, i64)> {
        Some((self.numer().to_i64()?, self.denom().to_i64()?))
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational($trait::$method(self.0, rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational($trait::$method(&self.0, &rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational($trait::$method(self.0, &rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl std::ops::Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        Rational(self.0 / rhs.0)
    }
}

impl<'a> std::ops::Div<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn div(self, rhs: &'a Rational) -> Rational {
        Rational(&self.0 / &rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl<'a> std::ops::AddAssign<&'a Rational> for Rational {
    fn add_assign(&mut self, rhs: &'a Rational) {
        self.0 += &rhs.0;
    }
}

impl<'a> std::ops::SubAssign<&'a Rational> for Rational {
    fn sub_assign(&mut self, rhs: &'a Rational) {
        self.0 -= &rhs.0;
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

// JSON form is `[num, den]`; each component is a number when it fits in
// i64 and a decimal string otherwise, so round trips are exact.
impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut tup = serializer.serialize_tuple(2)?;
        for part in [self.numer(), self.denom()] {
            match part.to_i64() {
                Some(v) => tup.serialize_element(&v)?,
                None => tup.serialize_element(&part.to_string())?,
            }
        }
        tup.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum IntRepr {
    Int(i64),
    Text(String),
}

impl IntRepr {
    fn into_big<E: de::Error>(self) -> Result<BigInt, E> {
        match self {
            IntRepr::Int(v) => Ok(BigInt::from(v)),
            IntRepr::Text(s) => s.parse().map_err(|_| E::custom(format!("bad integer {s:?}"))),
        }
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct PairVisitor;
        impl<'de> Visitor<'de> for PairVisitor {
            type Value = Rational;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a [numerator, denominator] pair")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Rational, A::Error> {
                let num: IntRepr = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let den: IntRepr = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(1, &self))?;
                let (num, den) = (num.into_big()?, den.into_big()?);
                if den.is_zero() {
                    return Err(de::Error::custom("zero denominator"));
                }
                Ok(Rational::from_big(num, den))
            }
        }
        deserializer.deserialize_tuple(2, PairVisitor)
    }
}

/// Sign of a real quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn to_i8(self) -> i8 {
        match self {
            Sign::Negative => -1,
            Sign::Zero => 0,
            Sign::Positive => 1,
        }
    }

    pub fn to_rational(self) -> Rational {
        Rational::from_integer(self.to_i8() as i64)
    }

    pub fn of_f64(x: f64) -> Sign {
        if x > 0.0 {
            Sign::Positive
        } else if x < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        match (self, rhs) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Positive,
            _ => Sign::Negative,
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}

/// A rotation angle stored as a fraction of a full turn, always in `[0, 1)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize)]
#[serde(transparent)]
pub struct RationalAngle {
    turns: Rational,
}

impl RationalAngle {
    pub fn new(turns: Rational) -> Self {
        let reduced = &turns - &turns.floor();
        RationalAngle { turns: reduced }
    }

    /// `num/den` of a turn, reduced mod 1. Panics if `den == 0`.
    pub fn from_fraction(num: i64, den: i64) -> Self {
        RationalAngle::new(Rational::new(num, den))
    }

    pub fn zero() -> Self {
        RationalAngle::default()
    }

    /// Half a turn; the rotation by π, i.e. −I in SO(2).
    pub fn half() -> Self {
        RationalAngle::from_fraction(1, 2)
    }

    pub fn turns(&self) -> &Rational {
        &self.turns
    }

    pub fn is_zero(&self) -> bool {
        self.turns.is_zero()
    }

    pub fn inverse(&self) -> Self {
        RationalAngle::new(-&self.turns)
    }

    /// `k` copies of the angle added together.
    pub fn times(&self, k: i64) -> Self {
        RationalAngle::new(&self.turns * &Rational::from_integer(k))
    }

    /// Radians, for floating-point cross-checks only.
    pub fn to_radians(&self) -> f64 {
        self.turns.to_f64() * std::f64::consts::TAU
    }
}

impl<'de> Deserialize<'de> for RationalAngle {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Rational::deserialize(deserializer).map(RationalAngle::new)
    }
}

impl fmt::Debug for RationalAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}t", self.turns)
    }
}

impl fmt::Display for RationalAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.turns, f)
    }
}

impl<'a> Add<&'a RationalAngle> for &'a RationalAngle {
    type Output = RationalAngle;
    fn add(self, rhs: &'a RationalAngle) -> RationalAngle {
        angle_add(self, rhs)
    }
}

impl Add for RationalAngle {
    type Output = RationalAngle;
    fn add(self, rhs: RationalAngle) -> RationalAngle {
        angle_add(&self, &rhs)
    }
}

impl Neg for RationalAngle {
    type Output = RationalAngle;
    fn neg(self) -> RationalAngle {
        self.inverse()
    }
}

/// Sum of two angles, reduced mod one turn.
pub fn angle_add(a: &RationalAngle, b: &RationalAngle) -> RationalAngle {
    let mut sum = &a.turns + &b.turns;
    if sum >= Rational::one() {
        sum = sum - Rational::one();
    }
    RationalAngle { turns: sum }
}

/// Sign of `sin(2π·turns)`, by rational comparison only.
pub fn sin_sign(a: &RationalAngle) -> Sign {
    let half = Rational::new(1, 2);
    match a.turns.cmp(&half) {
        Ordering::Equal => Sign::Zero,
        Ordering::Greater => Sign::Negative,
        Ordering::Less if a.turns.is_zero() => Sign::Zero,
        Ordering::Less => Sign::Positive,
    }
}

/// Prime factorization with strictly increasing primes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Factorization {
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn value(&self) -> u64 {
        self.factors.iter().map(|&(p, e)| p.pow(e)).product()
    }

    pub fn exponent_of(&self, prime: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(p, _)| p == prime)
            .map_or(0, |&(_, e)| e)
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }
}

/// Trial-division factorization.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::Domain("cannot factorize 0".into()));
    }
    let mut factors = Vec::new();
    let mut rest = n;
    let mut p = 2u64;
    while p * p <= rest {
        if rest.is_multiple_of(p) {
            let mut e = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    Ok(Factorization { factors })
}

/// Union of the primes dividing `n` or `m`, each with its exponent in both.
pub fn joint_exponents(n: u64, m: u64) -> Result<Vec<(u64, u32, u32)>> {
    let fn_ = factorize(n)?;
    let fm = factorize(m)?;
    let mut primes: Vec<u64> = fn_.primes().chain(fm.primes()).collect();
    primes.sort_unstable();
    primes.dedup();
    Ok(primes
        .into_iter()
        .map(|p| (p, fn_.exponent_of(p), fm.exponent_of(p)))
        .collect())
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

/// Integer coefficients of the `d`-th cyclotomic polynomial, lowest degree first.
pub fn cyclotomic_polynomial(d: u64) -> Vec<i64> {
    assert!(d >= 1);
    static CACHE: OnceLock<Mutex<HashMap<u64, Vec<i64>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.lock().expect("cache poisoned").get(&d) {
        return p.clone();
    }
    // x^d - 1 divided by Φ_e for every proper divisor e of d.
    let mut poly = vec![0i64; d as usize + 1];
    poly[0] = -1;
    poly[d as usize] = 1;
    for e in (1..d).filter(|e| d.is_multiple_of(*e)) {
        poly = divide_monic(&poly, &cyclotomic_polynomial(e)).0;
    }
    cache.lock().expect("cache poisoned").insert(d, poly.clone());
    poly
}

/// Quotient and remainder of `num / den` for monic `den`.
fn divide_monic(num: &[i64], den: &[i64]) -> (Vec<i64>, Vec<i64>) {
    let dd = den.len() - 1;
    debug_assert_eq!(den[dd], 1);
    let mut rem = num.to_vec();
    if rem.len() <= dd {
        return (vec![0], rem);
    }
    let mut quot = vec![0i64; rem.len() - dd];
    for i in (dd..rem.len()).rev() {
        let c = rem[i];
        if c != 0 {
            quot[i - dd] = c;
            for (j, &dc) in den.iter().enumerate() {
                rem[i - dd + j] -= c * dc;
            }
        }
    }
    rem.truncate(dd.max(1));
    (quot, rem)
}

/// An exact element `Σ c_k ζ^k` of the cyclotomic ring, `ζ = e^{2πi/order}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootOfUnitySum {
    order: u64,
    coeffs: Vec<i64>,
}

impl RootOfUnitySum {
    pub fn new(order: u64) -> Self {
        assert!(order >= 1);
        RootOfUnitySum {
            order,
            coeffs: vec![0; order as usize],
        }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Adds `coeff · e^{2πi·phase}`; `phase`'s denominator must divide the order.
    pub fn add_phase(&mut self, coeff: i64, phase: &RationalAngle) -> Result<()> {
        let scaled = phase.turns() * &Rational::from_integer(self.order as i64);
        if !scaled.is_integer() {
            return Err(Error::Input(format!(
                "phase {phase} is not a multiple of 1/{}",
                self.order
            )));
        }
        let k = scaled.numer().to_u64().expect("phase in [0,1)") as usize;
        self.coeffs[k] += coeff;
        Ok(())
    }

    /// Adds `coeff · ζ^k`.
    pub fn add_power(&mut self, coeff: i64, k: u64) {
        self.coeffs[(k % self.order) as usize] += coeff;
    }

    /// The value when it is a rational integer, `None` otherwise.
    pub fn to_integer(&self) -> Option<i64> {
        let phi = cyclotomic_polynomial(self.order);
        let (_, rem) = divide_monic(&self.coeffs, &phi);
        if rem.iter().skip(1).all(|&c| c == 0) {
            Some(rem[0])
        } else {
            None
        }
    }

    /// Floating-point value, for cross-checks.
    pub fn to_complex(&self) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, &c) in self.coeffs.iter().enumerate() {
            let t = std::f64::consts::TAU * k as f64 / self.order as f64;
            re += c as f64 * t.cos();
            im += c as f64 * t.sin();
        }
        (re, im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent oracle: repeated smallest-divisor search.
    fn naive_factor(mut n: u64) -> Vec<(u64, u32)> {
        let mut out: Vec<(u64, u32)> = Vec::new();
        while n > 1 {
            let p = (2..=n).find(|d| n.is_multiple_of(*d)).unwrap();
            n /= p;
            match out.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(12).unwrap().factors(), &[(2, 2), (3, 1)]);
        assert!(factorize(1).unwrap().factors().is_empty());
        assert_eq!(factorize(360).unwrap().factors(), naive_factor(360).as_slice());
        assert_eq!(factorize(360).unwrap().factors(), &[(2, 3), (3, 2), (5, 1)]);
        assert!(matches!(factorize(0), Err(Error::Domain(_))));
    }

    #[test]
    fn factorize_rebuilds_up_to_1e5() {
        for n in 1..=100_000u64 {
            let f = factorize(n).unwrap();
            assert_eq!(f.value(), n);
            assert!(f.factors().windows(2).all(|w| w[0].0 < w[1].0));
            for &(p, e) in f.factors() {
                assert!(e > 0);
                assert!((2..p).take_while(|d| d * d <= p).all(|d| p % d != 0), "{p} not prime");
            }
        }
        for n in [2u64, 97, 1024, 9973, 65_536, 99_991] {
            assert_eq!(factorize(n).unwrap().factors(), naive_factor(n).as_slice());
        }
    }

    #[test]
    fn angle_add_examples() {
        let a = |n, d| RationalAngle::from_fraction(n, d);
        assert_eq!(angle_add(&a(1, 2), &a(1, 2)), RationalAngle::zero());
        assert_eq!(angle_add(&a(1, 3), &a(1, 4)), a(7, 12));
        assert_eq!(angle_add(&a(3, 4), &a(3, 4)), a(1, 2));
        assert_eq!(a(-1, 4), a(3, 4));
        assert_eq!(a(5, 4), a(1, 4));
    }

    fn small_angles() -> Vec<RationalAngle> {
        let mut v: Vec<_> = (1..=24)
            .flat_map(|d| (0..d).map(move |k| RationalAngle::from_fraction(k, d)))
            .collect();
        v.sort();
        v.dedup();
        v
    }

    #[test]
    fn angle_group_laws_exhaustive_denominator_24() {
        let angles = small_angles();
        let zero = RationalAngle::zero();
        for a in &angles {
            assert_eq!(&angle_add(a, &zero), a);
            assert_eq!(angle_add(a, &a.inverse()), zero);
            assert!(a.turns() >= &Rational::zero() && a.turns() < &Rational::one());
            for b in &angles {
                let ab = angle_add(a, b);
                assert_eq!(ab, angle_add(b, a));
                for c in &angles {
                    assert_eq!(angle_add(&ab, c), angle_add(a, &angle_add(b, c)));
                }
            }
        }
    }

    #[test]
    fn sin_sign_examples_and_reflection() {
        assert_eq!(sin_sign(&RationalAngle::from_fraction(1, 4)), Sign::Positive);
        assert_eq!(sin_sign(&RationalAngle::zero()), Sign::Zero);
        assert_eq!(sin_sign(&RationalAngle::half()), Sign::Zero);
        assert_eq!(sin_sign(&RationalAngle::from_fraction(3, 4)), Sign::Negative);
        for a in small_angles() {
            if a.is_zero() || a == RationalAngle::half() {
                continue;
            }
            assert_eq!(sin_sign(&a), -sin_sign(&a.inverse()));
            assert_eq!(sin_sign(&a), Sign::of_f64(a.to_radians().sin()));
        }
    }

    #[test]
    fn rational_json_round_trip() {
        let r = Rational::new(-7, 12);
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, "[-7,12]");
        assert_eq!(serde_json::from_str::<Rational>(&s).unwrap(), r);
        let huge = Rational::from_big(BigInt::from(3u8).pow(90), BigInt::from(2u8));
        let s = serde_json::to_string(&huge).unwrap();
        assert_eq!(serde_json::from_str::<Rational>(&s).unwrap(), huge);
        assert!(serde_json::from_str::<Rational>("[1,0]").is_err());
    }

    #[test]
    fn negation_check_matches_arithmetic() {
        let vals = [Rational::new(1, 2), Rational::new(-1, 2), Rational::zero(), Rational::new(1, 3)];
        for a in &vals {
            for b in &vals {
                assert_eq!(a.is_negation_of(b), a == &-b, "{a} {b}");
            }
        }
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn root_of_unity_sums() {
        // Full sum of the 12th roots of unity vanishes; the identity term alone is 1.
        let mut s = RootOfUnitySum::new(12);
        for k in 0..12 {
            s.add_phase(1, &RationalAngle::from_fraction(k, 12)).unwrap();
        }
        assert_eq!(s.to_integer(), Some(0));
        let mut t = RootOfUnitySum::new(12);
        t.add_phase(3, &RationalAngle::zero()).unwrap();
        assert_eq!(t.to_integer(), Some(3));
        // ζ₄ alone is not an integer.
        let mut u = RootOfUnitySum::new(4);
        u.add_phase(1, &RationalAngle::from_fraction(1, 4)).unwrap();
        assert_eq!(u.to_integer(), None);
        // ζ₃ + ζ₃² = -1.
        let mut w = RootOfUnitySum::new(6);
        w.add_phase(1, &RationalAngle::from_fraction(1, 3)).unwrap();
        w.add_phase(1, &RationalAngle::from_fraction(2, 3)).unwrap();
        assert_eq!(w.to_integer(), Some(-1));
        assert!(w.add_phase(1, &RationalAngle::from_fraction(1, 5)).is_err());
    }
}
