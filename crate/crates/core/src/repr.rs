//! Characters of finite little groups, finite induction with Frobenius
//! reciprocity, and descriptors of the induced representations.
//!
//! Characters are stored as exact phases in turns (value `e^{2πi·phase}`).
//! Complex numbers appear only in [`verify_orthogonality`].

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::{Rational, RationalAngle, RootOfUnitySum};
use crate::groups::{ClassTag, FiniteSubgroup, GroupElement, Idx, SubgroupRecord};

/// `ν` for a cyclic group, `(ν₁, ν₂)` for `C₁ × C₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CharLabel {
    Single(u64),
    Pair(u64, u64),
}

impl fmt::Display for CharLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CharLabel::Single(v) => write!(f, "{v}"),
            CharLabel::Pair(a, b) => write!(f, "{a},{b}"),
        }
    }
}

impl FromStr for CharLabel {
    type Err = Error;

    /// `"3"`, `"1,2"` or `"(1,2)"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Input(format!("cannot read character label {s:?}"));
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<&str> = t.split(',').map(str::trim).collect();
        let num = |p: &str| p.parse::<u64>().map_err(|_| bad());
        match parts.as_slice() {
            [a] => Ok(CharLabel::Single(num(a)?)),
            [a, b] => Ok(CharLabel::Pair(num(a)?, num(b)?)),
            _ => Err(bad()),
        }
    }
}

/// One irreducible character; `phases[i]` belongs to `members()[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Character {
    #[serde(skip)]
    pub group: String,
    pub label: CharLabel,
    pub phases: Vec<RationalAngle>,
}

impl Character {
    pub fn phase(&self, f: &FiniteSubgroup, g: Idx) -> Option<&RationalAngle> {
        f.position(g).and_then(|i| self.phases.get(i))
    }

    /// `phase(gh) = phase(g) + phase(h)` on every pair, exactly.
    pub fn is_multiplicative(&self, f: &FiniteSubgroup) -> bool {
        if self.phases.len() as u64 != f.order() {
            return false;
        }
        let amb = f.ambient();
        let ms = f.members();
        ms.iter().enumerate().all(|(i, &g)| {
            ms.iter().enumerate().all(|(j, &h)| {
                let gh = f.position(amb.add(g, h)).expect("closed");
                self.phases[gh] == self.phases[i].clone() + self.phases[j].clone()
            })
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CharacterTable {
    pub group: String,
    pub elements: Vec<GroupElement>,
    #[serde(rename = "rows")]
    pub characters: Vec<Character>,
}

impl CharacterTable {
    pub fn get(&self, label: CharLabel) -> Option<&Character> {
        self.characters.iter().find(|c| c.label == label)
    }
}

/// Basis orders, and exponents `(j₁, j₂)` of each member over the basis.
type Coordinates = (Vec<u64>, Vec<(u64, u64)>);

fn coordinates(f: &FiniteSubgroup) -> Result<Coordinates> {
    let basis = f.basis().ok_or(Error::Decomposition)?;
    let amb = f.ambient();
    let orders: Vec<u64> = basis.iter().map(|b| b.1).collect();
    let (g1, n1) = basis[0];
    let (g2, n2) = basis.get(1).copied().unwrap_or(((0, 0), 1));
    let mut coords = vec![None; f.order() as usize];
    for j1 in 0..n1 {
        for j2 in 0..n2 {
            let x = amb.add(amb.scale(g1, j1), amb.scale(g2, j2));
            let slot = f.position(x).and_then(|p| coords.get_mut(p)).ok_or(Error::Decomposition)?;
            if slot.replace((j1, j2)).is_some() {
                return Err(Error::Decomposition);
            }
        }
    }
    let coords = coords.into_iter().collect::<Option<Vec<_>>>().ok_or(Error::Decomposition)?;
    Ok((orders, coords))
}

fn labels(orders: &[u64]) -> Vec<CharLabel> {
    match *orders {
        [n] => (0..n).map(CharLabel::Single).collect(),
        [n1, n2] => (0..n1).flat_map(|a| (0..n2).map(move |b| CharLabel::Pair(a, b))).collect(),
        _ => unreachable!("bases have one or two factors"),
    }
}

/// All `|F|` characters over the stored decomposition, labels in
/// lexicographic order.
pub fn character_table(f: &FiniteSubgroup) -> Result<CharacterTable> {
    let (orders, coords) = coordinates(f)?;
    let group = f.id();
    let characters = labels(&orders)
        .into_par_iter()
        .map(|label| {
            let (nu1, nu2) = match label {
                CharLabel::Single(v) => (v, 0),
                CharLabel::Pair(a, b) => (a, b),
            };
            let n2 = orders.get(1).copied().unwrap_or(1);
            let phases = coords
                .iter()
                .map(|&(j1, j2)| {
                    let t = Rational::new((nu1 * j1) as i64, orders[0] as i64)
                        + Rational::new((nu2 * j2) as i64, n2 as i64);
                    RationalAngle::new(t)
                })
                .collect();
            Character { group: group.clone(), label, phases }
        })
        .collect();
    Ok(CharacterTable { group, elements: f.elements(), characters })
}

/// `(1/|F|) Σ_g χ_μ(g) conj χ_ν(g) = δ_μν` within `1e-9`.
pub fn verify_orthogonality(table: &CharacterTable) -> Result<bool> {
    let n = table.elements.len();
    if table.characters.len() != n {
        return Err(Error::Table(format!("{} rows for a group of order {n}", table.characters.len())));
    }
    if let Some(c) = table.characters.iter().find(|c| c.phases.len() != n) {
        return Err(Error::Table(format!("row {} has {} entries, expected {n}", c.label, c.phases.len())));
    }
    let vals: Vec<Vec<(f64, f64)>> = table
        .characters
        .iter()
        .map(|c| c.phases.iter().map(|p| (p.to_radians().cos(), p.to_radians().sin())).collect())
        .collect();
    let ok = (0..n).into_par_iter().all(|a| {
        (0..n).all(|b| {
            let (re, im) = vals[a].iter().zip(&vals[b]).fold((0.0, 0.0), |(re, im), (x, y)| {
                (re + x.0 * y.0 + x.1 * y.1, im + x.1 * y.0 - x.0 * y.1)
            });
            let want = if a == b { 1.0 } else { 0.0 };
            (re / n as f64 - want).abs() < 1e-9 && (im / n as f64).abs() < 1e-9
        })
    });
    Ok(ok)
}

/// Every character of `C₁ × C₂` is a product `u_A · u_B` of characters of
/// the two factors, and every such product occurs.
pub fn product_rule_holds(f: &FiniteSubgroup) -> Result<bool> {
    let basis = f.basis().ok_or(Error::Decomposition)?;
    let table = character_table(f)?;
    let amb = f.ambient();
    let factors = basis
        .iter()
        .map(|&(g, _)| {
            let c = FiniteSubgroup::from_indices(amb, &[g])?;
            let t = character_table(&c)?;
            Ok((c, t))
        })
        .collect::<Result<Vec<_>>>()?;
    let (coord_orders, coords) = coordinates(f)?;
    debug_assert_eq!(coord_orders.len(), factors.len());
    let mut products = Vec::new();
    let pick = |k: usize, j: u64| amb.scale(basis[k].0, j);
    let rows = |k: usize| factors.get(k).map(|(_, t)| t.characters.clone()).unwrap_or_default();
    let (r1, r2) = (rows(0), rows(1));
    let r2: Vec<Option<Character>> = if r2.is_empty() { vec![None] } else { r2.into_iter().map(Some).collect() };
    for u in &r1 {
        for v in &r2 {
            let phases: Vec<RationalAngle> = coords
                .iter()
                .map(|&(j1, j2)| {
                    let a = u.phase(&factors[0].0, pick(0, j1)).expect("factor member").clone();
                    match v {
                        Some(v) => a + v.phase(&factors[1].0, pick(1, j2)).expect("factor member").clone(),
                        None => a,
                    }
                })
                .collect();
            products.push(phases);
        }
    }
    let mut have: Vec<Vec<RationalAngle>> = table.characters.into_iter().map(|c| c.phases).collect();
    have.sort();
    products.sort();
    Ok(have == products)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Multiplicity {
    pub label: CharLabel,
    pub multiplicity: u64,
}

/// Induction of one character from `F` to `G`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InductionReport {
    pub subgroup: String,
    pub group: String,
    pub character: CharLabel,
    pub index: u64,
    /// Nonzero multiplicities only.
    pub multiplicities: Vec<Multiplicity>,
    pub total: u64,
    /// `⟨Ind χ, ψ⟩_G = ⟨χ, Res ψ⟩_F` for every ψ.
    pub frobenius: bool,
    /// Multiplicity one exactly on the characters extending χ.
    pub extensions_only: bool,
    pub pass: bool,
}

/// Integer steps of a phase in units of `1/e`.
fn steps(a: &RationalAngle, e: u64) -> Result<u64> {
    let s = a.turns() * &Rational::from_integer(e as i64);
    if !s.is_integer() {
        return Err(Error::Input(format!("phase {a} is not a multiple of 1/{e}")));
    }
    Ok(s.to_i64_pair().expect("small").0 as u64)
}

/// Exponent of `G`: the largest element order.
fn exponent(g: &FiniteSubgroup) -> u64 {
    let amb = g.ambient();
    g.members().iter().map(|&x| amb.element_order(x)).max().unwrap_or(1)
}

/// Character table of `G` in integer steps, reusable across many `F` and `χ`.
pub struct InductionTarget {
    group: FiniteSubgroup,
    table: CharacterTable,
    exponent: u64,
    steps: Vec<Vec<u64>>,
}

impl InductionTarget {
    pub fn new(g: &FiniteSubgroup) -> Result<Self> {
        let table = character_table(g)?;
        let exponent = exponent(g);
        let steps = table
            .characters
            .iter()
            .map(|c| c.phases.iter().map(|p| steps(p, exponent)).collect())
            .collect::<Result<_>>()?;
        Ok(InductionTarget { group: g.clone(), table, exponent, steps })
    }

    pub fn table(&self) -> &CharacterTable {
        &self.table
    }

    pub fn induce(&self, f: &FiniteSubgroup, chi: &Character) -> Result<InductionReport> {
        let g = &self.group;
        if !f.is_subgroup_of(g) {
            return Err(Error::Containment { sub: f.id(), sup: g.id() });
        }
        if !chi.is_multiplicative(f) {
            return Err(Error::Input(format!("{} is not a character of {}", chi.label, f.id())));
        }
        let e = self.exponent;
        let chi_steps: Vec<u64> = chi.phases.iter().map(|p| steps(p, e)).collect::<Result<_>>()?;
        let index = g.order() / f.order();
        // Position in G of each member of F.
        let in_g: Vec<usize> = f.members().iter().map(|&x| g.position(x).expect("contained")).collect();
        let mut in_f = vec![None; g.order() as usize];
        for (i, &p) in in_g.iter().enumerate() {
            in_f[p] = Some(i);
        }

        let mut multiplicities = Vec::new();
        let (mut frobenius, mut extensions_only, mut total) = (true, true, 0);
        for (c, psi) in self.table.characters.iter().zip(&self.steps) {
            // Ind χ(x) = [G:F]·χ(x) on F and 0 off F.
            let mut ind = RootOfUnitySum::new(e);
            for (p, s) in psi.iter().enumerate() {
                if let Some(i) = in_f[p] {
                    ind.add_power(index as i64, chi_steps[i] + e - s);
                }
            }
            let mut res = RootOfUnitySum::new(e);
            for (i, &p) in in_g.iter().enumerate() {
                res.add_power(1, chi_steps[i] + e - psi[p]);
            }
            let lhs = exact_quotient(&ind, g.order())?;
            let rhs = exact_quotient(&res, f.order())?;
            frobenius &= lhs == rhs;
            let extends = in_g.iter().enumerate().all(|(i, &p)| chi_steps[i] == psi[p]);
            extensions_only &= lhs == u64::from(extends);
            total += lhs;
            if lhs > 0 {
                multiplicities.push(Multiplicity { label: c.label, multiplicity: lhs });
            }
        }
        Ok(InductionReport {
            subgroup: f.id(),
            group: g.id(),
            character: chi.label,
            index,
            multiplicities,
            total,
            frobenius,
            extensions_only,
            pass: frobenius && extensions_only && total == index,
        })
    }
}

fn exact_quotient(sum: &RootOfUnitySum, by: u64) -> Result<u64> {
    let v = sum
        .to_integer()
        .ok_or_else(|| Error::Table("inner product is not a rational integer".into()))?;
    if v < 0 || !(v as u64).is_multiple_of(by) {
        return Err(Error::Table(format!("inner product {v}/{by} is not a multiplicity")));
    }
    Ok(v as u64 / by)
}

/// Multiplicities of `Ind_F^G χ` over the characters of `G`.
pub fn induce_finite(f: &FiniteSubgroup, g: &FiniteSubgroup, chi: &Character) -> Result<InductionReport> {
    InductionTarget::new(g)?.induce(f, chi)
}

/// Data of the representation induced from a finite little group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InducedRepDescriptor {
    pub little_group: SubgroupRecord,
    pub irrep: CharLabel,
    pub phases: Vec<RationalAngle>,
    pub orbit_note: String,
    pub measure_note: String,
    pub carrier_note: String,
    pub equivalence_note: String,
}

pub fn induced_descriptor(g: &FiniteSubgroup, label: CharLabel) -> Result<InducedRepDescriptor> {
    if g.class() != ClassTag::E1 {
        return Err(Error::Class { expected: ClassTag::E1.to_string(), found: g.class().to_string() });
    }
    let table = character_table(g)?;
    let range = match g.basis().expect("table built") {
        [(_, n)] => format!("labels 0..{}", n - 1),
        [(_, a), (_, b)] => format!("labels (0..{}, 0..{})", a - 1, b - 1),
        _ => unreachable!(),
    };
    let chi = table
        .get(label)
        .ok_or_else(|| Error::Label { label: label.to_string(), range: range.clone() })?;
    let id = g.id();
    Ok(InducedRepDescriptor {
        little_group: g.to_record(),
        irrep: label,
        phases: chi.phases.clone(),
        orbit_note: format!("orbit ≈ (SL(2,R)×SL(2,R))/{id}"),
        measure_note: format!(
            "{id} modulo its kernel part acts freely on the torus, so the coset space carries the invariant measure of SL(2,R)×SL(2,R)"
        ),
        carrier_note: format!(
            "square-integrable functions on the coset space with values in D ≈ C, transforming under {id} by character {label}"
        ),
        equivalence_note: "conjugate little groups give the same descriptor up to relabeling; inequivalence across different E1 groups of equal order is not asserted".into(),
    })
}
