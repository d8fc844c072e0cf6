//! Finite subgroups of C_n × C_m ⊂ SO(2) × SO(2).
//!
//! An ambient group element is stored internally as an index pair `(i, j)`
//! meaning the rotation pair `(i/n, j/m)` in turns. Subgroups keep a sorted
//! list of index pairs, which orders element sets lexicographically by turns.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::{joint_exponents, Rational, RationalAngle};

/// Default limit on `n·m` for the brute-force oracle.
pub const BRUTE_FORCE_LIMIT: u64 = 10_000;

/// Index pair `(i, j)` of the element `(i/n, j/m)` of an ambient `C_n × C_m`.
pub type Idx = (u32, u32);

/// The ambient group C_n × C_m with both orders even.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Ambient {
    n: u32,
    m: u32,
}

impl Ambient {
    pub fn new(n: u32, m: u32) -> Result<Self> {
        for (name, v) in [("n", n), ("m", m)] {
            if v == 0 || v % 2 != 0 {
                return Err(Error::Domain(format!("{name} = {v} must be a positive even integer")));
            }
        }
        Ok(Ambient { n, m })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn order(&self) -> u64 {
        self.n as u64 * self.m as u64
    }

    pub fn element(&self, idx: Idx) -> GroupElement {
        GroupElement::new(
            RationalAngle::from_fraction(idx.0 as i64, self.n as i64),
            RationalAngle::from_fraction(idx.1 as i64, self.m as i64),
        )
    }

    /// Index pair of `g`, or `None` when `g` is not in this ambient.
    pub fn index_of(&self, g: &GroupElement) -> Option<Idx> {
        let coord = |a: &RationalAngle, k: u32| -> Option<u32> {
            let scaled = a.turns() * &Rational::from_integer(k as i64);
            if scaled.is_integer() {
                scaled.numer().to_u32()
            } else {
                None
            }
        };
        Some((coord(&g.theta, self.n)?, coord(&g.phi, self.m)?))
    }

    pub fn add(&self, a: Idx, b: Idx) -> Idx {
        ((a.0 + b.0) % self.n, (a.1 + b.1) % self.m)
    }

    pub fn neg(&self, a: Idx) -> Idx {
        ((self.n - a.0) % self.n, (self.m - a.1) % self.m)
    }

    pub fn scale(&self, a: Idx, k: u64) -> Idx {
        (
            ((a.0 as u64 * k) % self.n as u64) as u32,
            ((a.1 as u64 * k) % self.m as u64) as u32,
        )
    }

    pub fn element_order(&self, a: Idx) -> u64 {
        let on = self.n / a.0.gcd(&self.n);
        let om = self.m / a.1.gcd(&self.m);
        on.lcm(&om) as u64
    }

    fn flat(&self, a: Idx) -> usize {
        a.0 as usize * self.m as usize + a.1 as usize
    }

    /// `-I` in the first factor, the second factor, and both.
    pub fn b_element(&self) -> Idx {
        (self.n / 2, 0)
    }

    pub fn c_element(&self) -> Idx {
        (0, self.m / 2)
    }

    pub fn a_element(&self) -> Idx {
        (self.n / 2, self.m / 2)
    }

    /// Kernel of the torus action, in the order (0,0), (½,0), (0,½), (½,½).
    pub fn kernel_indices(&self) -> [Idx; 4] {
        [(0, 0), self.b_element(), self.c_element(), self.a_element()]
    }

    pub fn all_indices(&self) -> impl Iterator<Item = Idx> + '_ {
        (0..self.n).flat_map(move |i| (0..self.m).map(move |j| (i, j)))
    }
}

impl fmt::Display for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C{}xC{}", self.n, self.m)
    }
}

/// A rotation pair `(R(θ), R(φ))`, angles in turns.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GroupElement {
    pub theta: RationalAngle,
    pub phi: RationalAngle,
}

impl GroupElement {
    pub fn new(theta: RationalAngle, phi: RationalAngle) -> Self {
        GroupElement { theta, phi }
    }

    pub fn from_fractions(tn: i64, td: i64, pn: i64, pd: i64) -> Self {
        GroupElement::new(RationalAngle::from_fraction(tn, td), RationalAngle::from_fraction(pn, pd))
    }

    pub fn identity() -> Self {
        GroupElement::default()
    }

    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        GroupElement::new(&self.theta + &other.theta, &self.phi + &other.phi)
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement::new(self.theta.inverse(), self.phi.inverse())
    }

    pub fn is_identity(&self) -> bool {
        self.theta.is_zero() && self.phi.is_zero()
    }

    /// Whether the element acts trivially on the torus (both angles in {0, ½}).
    pub fn is_kernel(&self) -> bool {
        let ok = |a: &RationalAngle| a.is_zero() || *a == RationalAngle::half();
        ok(&self.theta) && ok(&self.phi)
    }

    pub fn order(&self) -> u64 {
        let d1 = self.theta.turns().denom().to_u64().unwrap_or(0);
        let d2 = self.phi.turns().denom().to_u64().unwrap_or(0);
        d1.lcm(&d2)
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.theta, self.phi)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

// JSON form `[pn, pd, qn, qd]`.
impl Serialize for GroupElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::{Error as _, SerializeTuple};
        let mut t = s.serialize_tuple(4)?;
        for r in [self.theta.turns(), self.phi.turns()] {
            let (num, den) = r
                .to_i64_pair()
                .ok_or_else(|| S::Error::custom("angle does not fit in i64"))?;
            t.serialize_element(&num)?;
            t.serialize_element(&den)?;
        }
        t.end()
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [pn, pd, qn, qd] = <[i64; 4]>::deserialize(d)?;
        if pd == 0 || qd == 0 {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(GroupElement::from_fractions(pn, pd, qn, qd))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassTag {
    O,
    E1,
    E2,
    E3,
    E4,
}

impl ClassTag {
    pub const ALL: [ClassTag; 5] = [ClassTag::O, ClassTag::E1, ClassTag::E2, ClassTag::E3, ClassTag::E4];

    /// Classes whose invariant space is the zero function.
    pub fn is_annihilated(self) -> bool {
        matches!(self, ClassTag::E2 | ClassTag::E3 | ClassTag::E4)
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for ClassTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "O" => Ok(ClassTag::O),
            "E1" => Ok(ClassTag::E1),
            "E2" => Ok(ClassTag::E2),
            "E3" => Ok(ClassTag::E3),
            "E4" => Ok(ClassTag::E4),
            _ => Err(Error::Input(format!("unknown class tag {s:?}"))),
        }
    }
}

/// The local subgroup of `C_{p^a} × C_{p^b}` chosen for one prime.
///
/// The first four families are cyclic, the last four have two generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum LocalFamily {
    Trivial,
    /// `k ≤ min(a,b)`, `r < p^k`: generator `(r p^{a-k}, p^{b-k})`.
    Nu { k: u32, r: u64 },
    /// `k ≤ min(a,b)`, `ρ < p^{k-1}`: generator `(p^{a-k}, ρ p^{b-k+1})`.
    Chi { k: u32, rho: u64 },
    /// `a < k ≤ b`, `j < p^a`: generator `(j, p^{b-k})`.
    Tau { k: u32, j: u64 },
    /// `b < k ≤ a`, `j < p^b`: generator `(p^{a-k}, j)`.
    Psi { k: u32, j: u64 },
    /// `1 ≤ l ≤ k ≤ min(a,b)`, `r < p^{k-l}`: `(r p^{a-k}, p^{b-k})` and `(p^{a-l}, 0)`.
    Sigma { k: u32, l: u32, r: u64 },
    /// `1 ≤ l < k ≤ min(a,b)`, `ρ < p^{k-l-1}`: `(p^{a-k}, ρ p^{b-k+1})` and `(0, p^{b-l})`.
    Theta { k: u32, l: u32, rho: u64 },
    /// `1 ≤ l ≤ a < k ≤ b`, `t < p^{a-l}`: `(t, p^{b-k})` and `(p^{a-l}, 0)`.
    Phi { k: u32, l: u32, t: u64 },
    /// `1 ≤ l ≤ b < k ≤ a`, `j < p^{b-l}`: `(p^{a-k}, j)` and `(0, p^{b-l})`.
    Xi { k: u32, l: u32, j: u64 },
}

impl LocalFamily {
    pub fn is_two_generator(&self) -> bool {
        matches!(
            self,
            LocalFamily::Sigma { .. } | LocalFamily::Theta { .. } | LocalFamily::Phi { .. } | LocalFamily::Xi { .. }
        )
    }

    pub fn k(&self) -> u32 {
        match *self {
            LocalFamily::Trivial => 0,
            LocalFamily::Nu { k, .. }
            | LocalFamily::Chi { k, .. }
            | LocalFamily::Tau { k, .. }
            | LocalFamily::Psi { k, .. }
            | LocalFamily::Sigma { k, .. }
            | LocalFamily::Theta { k, .. }
            | LocalFamily::Phi { k, .. }
            | LocalFamily::Xi { k, .. } => k,
        }
    }

    pub fn l(&self) -> u32 {
        match *self {
            LocalFamily::Sigma { l, .. }
            | LocalFamily::Theta { l, .. }
            | LocalFamily::Phi { l, .. }
            | LocalFamily::Xi { l, .. } => l,
            _ => 0,
        }
    }

    fn validate(&self, p: u64, a: u32, b: u32) -> Result<()> {
        let pw = |e: u32| p.pow(e);
        let fail = |what: String| Err(Error::Parameter(format!("p={p}, a={a}, b={b}: {what}")));
        let min = a.min(b);
        match *self {
            LocalFamily::Trivial => Ok(()),
            LocalFamily::Nu { k, r } => {
                if !(1..=min).contains(&k) {
                    fail(format!("nu family needs 1 <= k <= min(a,b), got k={k}"))
                } else if r >= pw(k) {
                    fail(format!("nu family needs r < p^k = {}, got r={r}", pw(k)))
                } else {
                    Ok(())
                }
            }
            LocalFamily::Chi { k, rho } => {
                if !(1..=min).contains(&k) {
                    fail(format!("chi family needs 1 <= k <= min(a,b), got k={k}"))
                } else if rho >= pw(k - 1) {
                    fail(format!("chi family needs rho < p^(k-1) = {}, got rho={rho}", pw(k - 1)))
                } else {
                    Ok(())
                }
            }
            LocalFamily::Tau { k, j } => {
                if !(a < k && k <= b) {
                    fail(format!("tau family needs a < k <= b, got k={k}"))
                } else if j >= pw(a) {
                    fail(format!("tau family needs j < p^a = {}, got j={j}", pw(a)))
                } else {
                    Ok(())
                }
            }
            LocalFamily::Psi { k, j } => {
                if !(b < k && k <= a) {
                    fail(format!("psi family needs b < k <= a, got k={k}"))
                } else if j >= pw(b) {
                    fail(format!("psi family needs j < p^b = {}, got j={j}", pw(b)))
                } else {
                    Ok(())
                }
            }
            LocalFamily::Sigma { k, l, r } => {
                if !(1 <= l && l <= k && k <= min) {
                    fail(format!("sigma family needs 1 <= l <= k <= min(a,b), got k={k}, l={l}"))
                } else if r >= pw(k - l) {
                    fail(format!("sigma family needs r < p^(k-l) = {}, got r={r}", pw(k - l)))
                } else {
                    Ok(())
                }
            }
            LocalFamily::Theta { k, l, rho } => {
                if !(1 <= l && l < k && k <= min) {
                    fail(format!("theta family needs 1 <= l < k <= min(a,b), got k={k}, l={l}"))
                } else if rho >= pw(k - l - 1) {
                    fail(format!("theta family needs rho < p^(k-l-1) = {}, got rho={rho}", pw(k - l - 1)))
                } else {
                    Ok(())
                }
            }
            LocalFamily::Phi { k, l, t } => {
                if !(1 <= l && l <= a && a < k && k <= b) {
                    fail(format!("phi family needs 1 <= l <= a < k <= b, got k={k}, l={l}"))
                } else if t >= pw(a - l) {
                    fail(format!("phi family needs t < p^(a-l) = {}, got t={t}", pw(a - l)))
                } else {
                    Ok(())
                }
            }
            LocalFamily::Xi { k, l, j } => {
                if !(1 <= l && l <= b && b < k && k <= a) {
                    fail(format!("xi family needs 1 <= l <= b < k <= a, got k={k}, l={l}"))
                } else if j >= pw(b - l) {
                    fail(format!("xi family needs j < p^(b-l) = {}, got j={j}", pw(b - l)))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Local generators in `C_{p^a} × C_{p^b}` coordinates; the second is
    /// `(0, 0)` for cyclic families.
    fn local_generators(&self, p: u64, a: u32, b: u32) -> ((u64, u64), (u64, u64)) {
        let pw = |e: u32| p.pow(e);
        match *self {
            LocalFamily::Trivial => ((0, 0), (0, 0)),
            LocalFamily::Nu { k, r } => ((r * pw(a - k), pw(b - k)), (0, 0)),
            LocalFamily::Chi { k, rho } => ((pw(a - k), rho * pw(b + 1 - k)), (0, 0)),
            LocalFamily::Tau { k, j } => ((j, pw(b - k)), (0, 0)),
            LocalFamily::Psi { k, j } => ((pw(a - k), j), (0, 0)),
            LocalFamily::Sigma { k, l, r } => ((r * pw(a - k), pw(b - k)), (pw(a - l), 0)),
            LocalFamily::Theta { k, l, rho } => ((pw(a - k), rho * pw(b + 1 - k)), (0, pw(b - l))),
            LocalFamily::Phi { k, l, t } => ((t, pw(b - k)), (pw(a - l), 0)),
            LocalFamily::Xi { k, l, j } => ((pw(a - k), j), (0, pw(b - l))),
        }
    }
}

/// One prime's share of a subgroup: `a = v_p(n)`, `b = v_p(m)` and its family.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PrimeComponent {
    pub prime: u64,
    pub a: u32,
    pub b: u32,
    pub family: LocalFamily,
}

/// A parameter tuple: one local family per prime dividing `n·m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SubgroupParameters {
    pub n: u32,
    pub m: u32,
    pub components: Vec<PrimeComponent>,
}

impl SubgroupParameters {
    /// All primes present with the trivial family.
    pub fn trivial(n: u32, m: u32) -> Result<Self> {
        let components = joint_exponents(n as u64, m as u64)?
            .into_iter()
            .map(|(prime, a, b)| PrimeComponent { prime, a, b, family: LocalFamily::Trivial })
            .collect();
        Ok(SubgroupParameters { n, m, components })
    }

    /// Replaces the family of `prime`; the prime must divide `n·m`.
    pub fn with(mut self, prime: u64, family: LocalFamily) -> Result<Self> {
        let c = self
            .components
            .iter_mut()
            .find(|c| c.prime == prime)
            .ok_or_else(|| Error::Parameter(format!("prime {prime} does not divide {}·{}", self.n, self.m)))?;
        c.family = family;
        Ok(self)
    }

    pub fn is_two_generator(&self) -> bool {
        self.components.iter().any(|c| c.family.is_two_generator())
    }

    /// Orders of the two generators, `Π p^k` and `Π p^l`.
    pub fn generator_orders(&self) -> (u64, u64) {
        self.components.iter().fold((1, 1), |(o1, o2), c| {
            (o1 * c.prime.pow(c.family.k()), o2 * c.prime.pow(c.family.l()))
        })
    }

    /// The product order formula.
    pub fn formula_order(&self) -> u64 {
        let (o1, o2) = self.generator_orders();
        o1 * o2
    }

    fn validate(&self, restrict_e1: bool) -> Result<Ambient> {
        let ambient = Ambient::new(self.n, self.m)?;
        let expected = joint_exponents(self.n as u64, self.m as u64)?;
        let actual: Vec<_> = self.components.iter().map(|c| (c.prime, c.a, c.b)).collect();
        if expected != actual {
            return Err(Error::Parameter(format!(
                "components {actual:?} must list every prime of n={}, m={} with its exponents {expected:?}",
                self.n, self.m
            )));
        }
        for c in &self.components {
            c.family.validate(c.prime, c.a, c.b)?;
        }
        if restrict_e1 {
            let two = self.components.iter().find(|c| c.prime == 2).expect("n is even");
            match two.family {
                LocalFamily::Nu { r, .. } if r % 2 == 1 => {}
                f => {
                    return Err(Error::Parameter(format!(
                        "E1 restriction needs the prime 2 in the nu family with odd r, got {f:?}"
                    )))
                }
            }
        }
        Ok(ambient)
    }

    /// The two generators as ambient index pairs.
    pub fn generators(&self) -> (Idx, Idx) {
        let (n, m) = (self.n as u64, self.m as u64);
        let mut g1 = (0u64, 0u64);
        let mut g2 = (0u64, 0u64);
        for c in &self.components {
            let (pa, pb) = (c.prime.pow(c.a), c.prime.pow(c.b));
            let ((x1, y1), (x2, y2)) = c.family.local_generators(c.prime, c.a, c.b);
            g1 = ((g1.0 + x1 * (n / pa)) % n, (g1.1 + y1 * (m / pb)) % m);
            g2 = ((g2.0 + x2 * (n / pa)) % n, (g2.1 + y2 * (m / pb)) % m);
        }
        ((g1.0 as u32, g1.1 as u32), (g2.0 as u32, g2.1 as u32))
    }
}

impl fmt::Display for SubgroupParameters {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C{}xC{}[", self.n, self.m)?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "p={}: {:?}", c.prime, c.family)?;
        }
        write!(f, "]")
    }
}

/// A finite subgroup of an ambient `C_n × C_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSubgroup {
    ambient: Ambient,
    generators: Vec<Idx>,
    members: Vec<Idx>,
    class: ClassTag,
    basis: Option<Vec<(Idx, u64)>>,
    params: Option<SubgroupParameters>,
}

/// Subgroup generated by `gens`, as a sorted index list.
pub fn closure(ambient: Ambient, gens: &[Idx]) -> Vec<Idx> {
    let mut seen = vec![false; ambient.order() as usize];
    let mut stack = vec![(0u32, 0u32)];
    seen[0] = true;
    let mut out = Vec::new();
    while let Some(x) = stack.pop() {
        out.push(x);
        for &g in gens {
            let y = ambient.add(x, g);
            let f = ambient.flat(y);
            if !seen[f] {
                seen[f] = true;
                stack.push(y);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Class of an element set; errors on structure no subgroup can have.
pub fn classify_members(ambient: Ambient, members: &[Idx]) -> Result<ClassTag> {
    if members.len() % 2 == 1 {
        return Ok(ClassTag::O);
    }
    let has = |x: Idx| members.binary_search(&x).is_ok();
    let (a, b, c) = (has(ambient.a_element()), has(ambient.b_element()), has(ambient.c_element()));
    match (a, b, c) {
        (true, true, true) => Ok(ClassTag::E4),
        (true, false, false) => Ok(ClassTag::E1),
        (false, true, false) => Ok(ClassTag::E2),
        (false, false, true) => Ok(ClassTag::E3),
        _ => Err(Error::Impossible(format!(
            "even-order set of {} elements in {ambient} with A:{a} B:{b} C:{c}",
            members.len()
        ))),
    }
}

pub fn classify(f: &FiniteSubgroup) -> Result<ClassTag> {
    classify_members(f.ambient, &f.members)
}

impl FiniteSubgroup {
    fn build(ambient: Ambient, generators: Vec<Idx>) -> Result<Self> {
        let members = closure(ambient, &generators);
        let class = classify_members(ambient, &members)?;
        Ok(FiniteSubgroup { ambient, generators, members, class, basis: None, params: None })
    }

    /// The subgroup generated by arbitrary elements of `ambient`.
    pub fn from_generators(ambient: Ambient, gens: &[GroupElement]) -> Result<Self> {
        let idx = gens
            .iter()
            .map(|g| {
                ambient
                    .index_of(g)
                    .ok_or_else(|| Error::Domain(format!("{g} is not an element of {ambient}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_indices(ambient, &idx)
    }

    pub fn from_indices(ambient: Ambient, gens: &[Idx]) -> Result<Self> {
        let mut f = Self::build(ambient, gens.to_vec())?;
        if let Some((g, o)) = f.cyclic_generator() {
            f.basis = Some(vec![(g, o)]);
        }
        Ok(f)
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn order(&self) -> u64 {
        self.members.len() as u64
    }

    pub fn class(&self) -> ClassTag {
        self.class
    }

    pub fn members(&self) -> &[Idx] {
        &self.members
    }

    pub fn generator_indices(&self) -> &[Idx] {
        &self.generators
    }

    pub fn generators(&self) -> Vec<GroupElement> {
        self.generators.iter().map(|&g| self.ambient.element(g)).collect()
    }

    /// Elements in lexicographic order of turns.
    pub fn elements(&self) -> Vec<GroupElement> {
        self.members.iter().map(|&g| self.ambient.element(g)).collect()
    }

    pub fn contains_index(&self, g: Idx) -> bool {
        self.members.binary_search(&g).is_ok()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.ambient.index_of(g).is_some_and(|i| self.contains_index(i))
    }

    /// Position of `g` in [`Self::members`].
    pub fn position(&self, g: Idx) -> Option<usize> {
        self.members.binary_search(&g).ok()
    }

    pub fn params(&self) -> Option<&SubgroupParameters> {
        self.params.as_ref()
    }

    /// Stored direct-product decomposition: one `(generator, order)` for
    /// cyclic groups, two for `C₁ × C₂`.
    pub fn basis(&self) -> Option<&[(Idx, u64)]> {
        self.basis.as_deref()
    }

    pub fn is_cyclic(&self) -> bool {
        self.cyclic_generator().is_some()
    }

    fn cyclic_generator(&self) -> Option<(Idx, u64)> {
        let ord = self.order();
        self.members
            .iter()
            .find(|&&g| self.ambient.element_order(g) == ord)
            .map(|&g| (g, ord))
    }

    pub fn is_subgroup_of(&self, other: &FiniteSubgroup) -> bool {
        self.ambient == other.ambient && self.members.iter().all(|&g| other.contains_index(g))
    }

    /// Kernel elements lying in the subgroup, in kernel order.
    pub fn kernel_part(&self) -> Vec<Idx> {
        self.ambient
            .kernel_indices()
            .into_iter()
            .filter(|&k| self.contains_index(k))
            .collect()
    }

    /// Short identifier built from the ambient and the generators.
    pub fn id(&self) -> String {
        let gens: Vec<String> = self.generators().iter().map(|g| g.to_string()).collect();
        format!("{}<{}>", self.ambient, gens.join(","))
    }

    /// Same subgroup seen inside a larger ambient; `n | n'` and `m | m'`.
    pub fn embed(&self, target: Ambient) -> Result<FiniteSubgroup> {
        if !target.n.is_multiple_of(self.ambient.n) || !target.m.is_multiple_of(self.ambient.m) {
            return Err(Error::Domain(format!("{} does not embed in {target}", self.ambient)));
        }
        let (sx, sy) = (target.n / self.ambient.n, target.m / self.ambient.m);
        let map = |g: Idx| (g.0 * sx, g.1 * sy);
        let mut members: Vec<Idx> = self.members.iter().map(|&g| map(g)).collect();
        members.sort_unstable();
        Ok(FiniteSubgroup {
            ambient: target,
            generators: self.generators.iter().map(|&g| map(g)).collect(),
            members,
            class: self.class,
            basis: self.basis.as_ref().map(|b| b.iter().map(|&(g, o)| (map(g), o)).collect()),
            params: None,
        })
    }

    /// Attaches a searched decomposition when none is stored.
    pub fn with_decomposition(mut self) -> Result<Self> {
        if self.basis.is_none() {
            self.basis = Some(decompose(&self)?);
        }
        Ok(self)
    }

    /// Replaces the stored decomposition; the generators must span the
    /// group as a direct product of cyclic factors of the given orders.
    pub fn with_basis(mut self, basis: Vec<(Idx, u64)>) -> Result<Self> {
        let gens: Vec<Idx> = basis.iter().map(|b| b.0).collect();
        let direct = basis.iter().all(|&(g, o)| self.ambient.element_order(g) == o)
            && basis.iter().map(|b| b.1).product::<u64>() == self.order()
            && closure(self.ambient, &gens) == self.members
            && !basis.is_empty()
            && basis.len() <= 2;
        if !direct {
            return Err(Error::Decomposition);
        }
        self.basis = Some(basis);
        Ok(self)
    }

    pub fn to_record(&self) -> SubgroupRecord {
        SubgroupRecord {
            ambient: [self.ambient.n, self.ambient.m],
            generators: self.generators(),
            order: self.order(),
            class: self.class,
            elements: self.elements(),
        }
    }
}

/// JSON form of a subgroup.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupRecord {
    pub ambient: [u32; 2],
    pub generators: Vec<GroupElement>,
    pub order: u64,
    pub class: ClassTag,
    pub elements: Vec<GroupElement>,
}

pub fn make_ambient(n: u32, m: u32) -> Result<FiniteSubgroup> {
    let ambient = Ambient::new(n, m)?;
    let mut f = FiniteSubgroup::build(ambient, vec![(1, 0), (0, 1)])?;
    f.basis = Some(decompose(&f)?);
    Ok(f)
}

/// The four elements acting trivially on the torus.
pub fn kernel(n: u32, m: u32) -> Result<Vec<GroupElement>> {
    let ambient = Ambient::new(n, m)?;
    Ok(ambient.kernel_indices().iter().map(|&k| ambient.element(k)).collect())
}

fn from_parameters(params: &SubgroupParameters, restrict_e1: bool, two_gen: bool) -> Result<FiniteSubgroup> {
    let ambient = params.validate(restrict_e1)?;
    if params.is_two_generator() != two_gen {
        return Err(Error::Parameter(if two_gen {
            format!("{params}: a two-generator subgroup needs at least one two-generator family")
        } else {
            format!("{params}: a cyclic subgroup cannot use a two-generator family")
        }));
    }
    let (g1, g2) = params.generators();
    let (o1, o2) = params.generator_orders();
    let gens = if two_gen { vec![g1, g2] } else { vec![g1] };
    let mut f = FiniteSubgroup::build(ambient, gens)?;
    let formula = params.formula_order();
    if f.order() != formula {
        return Err(Error::OrderMismatch { params: params.to_string(), formula, closure: f.order() });
    }
    f.basis = Some(if two_gen { vec![(g1, o1), (g2, o2)] } else { vec![(g1, o1)] });
    f.params = Some(params.clone());
    Ok(f)
}

/// Cyclic subgroup from a parameter tuple. With `restrict_e1` the prime 2 must
/// use the nu family with odd `r`.
pub fn cyclic_from_parameters(params: &SubgroupParameters, restrict_e1: bool) -> Result<FiniteSubgroup> {
    from_parameters(params, restrict_e1, false)
}

/// Non-cyclic subgroup `⟨g₁⟩ × ⟨g₂⟩` from a parameter tuple.
pub fn two_generator_from_parameters(params: &SubgroupParameters, restrict_e1: bool) -> Result<FiniteSubgroup> {
    from_parameters(params, restrict_e1, true)
}

fn cyclic_options(p: u64, a: u32, b: u32) -> Vec<LocalFamily> {
    let mut out = vec![LocalFamily::Trivial];
    for k in 1..=a.min(b) {
        out.extend((0..p.pow(k)).map(|r| LocalFamily::Nu { k, r }));
        out.extend((0..p.pow(k - 1)).map(|rho| LocalFamily::Chi { k, rho }));
    }
    for k in a + 1..=b {
        out.extend((0..p.pow(a)).map(|j| LocalFamily::Tau { k, j }));
    }
    for k in b + 1..=a {
        out.extend((0..p.pow(b)).map(|j| LocalFamily::Psi { k, j }));
    }
    out
}

fn two_generator_options(p: u64, a: u32, b: u32) -> Vec<LocalFamily> {
    let mut out = Vec::new();
    for k in 1..=a.min(b) {
        for l in 1..=k {
            out.extend((0..p.pow(k - l)).map(|r| LocalFamily::Sigma { k, l, r }));
        }
        for l in 1..k {
            out.extend((0..p.pow(k - l - 1)).map(|rho| LocalFamily::Theta { k, l, rho }));
        }
    }
    for k in a + 1..=b {
        for l in 1..=a {
            out.extend((0..p.pow(a - l)).map(|t| LocalFamily::Phi { k, l, t }));
        }
    }
    for k in b + 1..=a {
        for l in 1..=b {
            out.extend((0..p.pow(b - l)).map(|j| LocalFamily::Xi { k, l, j }));
        }
    }
    out
}

/// The only 2-parts allowed in class E1: nu family, odd `r`.
fn e1_two_options(a: u32, b: u32) -> Vec<LocalFamily> {
    (1..=a.min(b))
        .flat_map(|k| (0..2u64.pow(k)).filter(|r| r % 2 == 1).map(move |r| LocalFamily::Nu { k, r }))
        .collect()
}

fn cartesian(choices: &[Vec<LocalFamily>]) -> Vec<Vec<LocalFamily>> {
    choices.iter().fold(vec![Vec::new()], |acc, opts| {
        acc.iter()
            .flat_map(|prefix| {
                opts.iter().map(move |o| {
                    let mut v = prefix.clone();
                    v.push(*o);
                    v
                })
            })
            .collect()
    })
}

fn tuples(n: u32, m: u32, two_gen: bool, e1: bool) -> Result<Vec<SubgroupParameters>> {
    let base = SubgroupParameters::trivial(n, m)?;
    let choices: Vec<Vec<LocalFamily>> = base
        .components
        .iter()
        .map(|c| {
            if e1 && c.prime == 2 {
                e1_two_options(c.a, c.b)
            } else if two_gen {
                let mut v = cyclic_options(c.prime, c.a, c.b);
                v.extend(two_generator_options(c.prime, c.a, c.b));
                v
            } else {
                cyclic_options(c.prime, c.a, c.b)
            }
        })
        .collect();
    Ok(cartesian(&choices)
        .into_iter()
        .map(|fams| {
            let mut p = base.clone();
            for (c, f) in p.components.iter_mut().zip(fams) {
                c.family = f;
            }
            p
        })
        .filter(|p| p.is_two_generator() == two_gen)
        .collect())
}

/// Every admissible cyclic parameter tuple, optionally restricted to class E1.
pub fn cyclic_parameter_tuples(n: u32, m: u32, e1_only: bool) -> Result<Vec<SubgroupParameters>> {
    Ambient::new(n, m)?;
    tuples(n, m, false, e1_only)
}

/// Every admissible two-generator parameter tuple, optionally restricted to class E1.
pub fn two_generator_parameter_tuples(n: u32, m: u32, e1_only: bool) -> Result<Vec<SubgroupParameters>> {
    Ambient::new(n, m)?;
    tuples(n, m, true, e1_only)
}

fn build_all(
    params: Vec<SubgroupParameters>,
    e1_only: bool,
    two_gen: bool,
    filter: Option<ClassTag>,
) -> Result<Vec<FiniteSubgroup>> {
    let mut out = params
        .par_iter()
        .map(|p| from_parameters(p, e1_only, two_gen))
        .collect::<Result<Vec<_>>>()?;
    if let Some(tag) = filter {
        out.retain(|f| f.class == tag);
    }
    out.sort_by(|x, y| x.members.cmp(&y.members));
    out.dedup_by(|x, y| x.members == y.members);
    Ok(out)
}

/// All cyclic subgroups, sorted by element set. The E1 filter uses the
/// restricted 2-part directly rather than filtering afterwards.
pub fn enumerate_cyclic(n: u32, m: u32, class_filter: Option<ClassTag>) -> Result<Vec<FiniteSubgroup>> {
    let e1 = class_filter == Some(ClassTag::E1);
    build_all(cyclic_parameter_tuples(n, m, e1)?, e1, false, class_filter)
}

/// All non-cyclic subgroups, sorted by element set.
pub fn enumerate_two_generator(n: u32, m: u32, class_filter: Option<ClassTag>) -> Result<Vec<FiniteSubgroup>> {
    let e1 = class_filter == Some(ClassTag::E1);
    build_all(two_generator_parameter_tuples(n, m, e1)?, e1, true, class_filter)
}

/// Cyclic subgroups followed by non-cyclic ones; the index order used by the CLI.
pub fn all_subgroups(n: u32, m: u32, class_filter: Option<ClassTag>) -> Result<Vec<FiniteSubgroup>> {
    let mut v = enumerate_cyclic(n, m, class_filter)?;
    v.extend(enumerate_two_generator(n, m, class_filter)?);
    Ok(v)
}

/// Oracle: close every pair of elements and deduplicate.
pub fn brute_force_subgroups(n: u32, m: u32) -> Result<Vec<FiniteSubgroup>> {
    brute_force_subgroups_with_limit(n, m, BRUTE_FORCE_LIMIT)
}

pub fn brute_force_subgroups_with_limit(n: u32, m: u32, limit: u64) -> Result<Vec<FiniteSubgroup>> {
    let ambient = Ambient::new(n, m)?;
    if ambient.order() > limit {
        return Err(Error::Size { what: "n*m", value: ambient.order(), limit });
    }
    // ⟨g, h⟩ depends only on ⟨g⟩ and ⟨h⟩, so pairs of cyclic subgroups suffice.
    let cyclic: BTreeSet<Vec<Idx>> = ambient.all_indices().map(|g| closure(ambient, &[g])).collect();
    let gens: Vec<Idx> = cyclic
        .iter()
        .map(|c| *c.iter().max_by_key(|&&g| ambient.element_order(g)).expect("nonempty"))
        .collect();
    let mut all: BTreeSet<Vec<Idx>> = cyclic.clone();
    for (i, &g) in gens.iter().enumerate() {
        for &h in &gens[i + 1..] {
            all.insert(closure(ambient, &[g, h]));
        }
    }
    let mut out = all
        .into_iter()
        .map(|members| {
            let gen = members
                .iter()
                .copied()
                .find(|&g| closure(ambient, &[g]) == members);
            let generators = match gen {
                Some(g) => vec![g],
                None => minimal_pair(ambient, &members),
            };
            let class = classify_members(ambient, &members)?;
            let basis = gen.map(|g| vec![(g, members.len() as u64)]);
            Ok(FiniteSubgroup { ambient, generators, members, class, basis, params: None })
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_by_key(|f| (!f.is_cyclic(), f.members.clone()));
    Ok(out)
}

fn minimal_pair(ambient: Ambient, members: &[Idx]) -> Vec<Idx> {
    for (i, &g) in members.iter().enumerate() {
        for &h in &members[i + 1..] {
            if closure(ambient, &[g, h]).len() == members.len() {
                return vec![g, h];
            }
        }
    }
    unreachable!("subgroups of a rank-2 group have at most two generators")
}

/// A decomposition `⟨g₁⟩ × ⟨g₂⟩` with `g₁` of maximal order (the
/// lexicographically first such), found by search.
pub fn decompose(f: &FiniteSubgroup) -> Result<Vec<(Idx, u64)>> {
    let amb = f.ambient;
    let order = f.order();
    let max = f.members.iter().map(|&g| amb.element_order(g)).max().unwrap_or(1);
    let g1 = *f.members.iter().find(|&&g| amb.element_order(g) == max).expect("nonempty");
    if max == order {
        return Ok(vec![(g1, order)]);
    }
    let want = order / max;
    let c1 = closure(amb, &[g1]);
    for &g2 in &f.members {
        if amb.element_order(g2) != want {
            continue;
        }
        let c2 = closure(amb, &[g2]);
        if c2.iter().all(|x| *x == (0, 0) || c1.binary_search(x).is_err()) {
            return Ok(vec![(g1, max), (g2, want)]);
        }
    }
    Err(Error::Decomposition)
}
