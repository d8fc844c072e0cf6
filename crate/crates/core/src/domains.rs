//! Elementary domains on the circle and the torus.
//!
//! The rotation pair `(θ, φ)` moves a torus point `(ρ, σ)` to
//! `(ρ + 2θ, σ + 2φ)` (all in turns), so a domain is translated by the
//! doubled angles. Rectangles are open; overlap and coverage questions are
//! answered with exact rational comparisons.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::Rational;
use crate::groups::{Ambient, FiniteSubgroup, GroupElement, Idx};

/// Open interval of turns with `0 ≤ lo < hi ≤ 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo < Rational::zero() || hi > Rational::one() || lo >= hi {
            return Err(Error::Unsupported(format!("interval ({lo}, {hi}) is not inside [0, 1]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo < x && x < &self.hi
    }

    /// Open intervals meet, or an open one meets the other's closure: both
    /// reduce to the same strict test.
    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo < other.hi && other.lo < self.hi
    }

    /// Translate by `d` turns around the circle, splitting at the 0/1 seam.
    pub fn translate(&self, d: &Rational) -> Vec<Interval> {
        let mut lo = &self.lo + d;
        lo = &lo - &lo.floor();
        let hi = &lo + &self.length();
        let one = Rational::one();
        if hi <= one {
            vec![Interval { lo, hi }]
        } else if lo.is_zero() {
            unreachable!("length ≤ 1")
        } else {
            vec![Interval { lo: Rational::zero(), hi: &hi - &one }, Interval { lo, hi: one }]
        }
    }
}

/// Open rectangle `x × y` on the torus.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rect {
    pub x: Interval,
    pub y: Interval,
}

impl Rect {
    pub fn new(x: Interval, y: Interval) -> Self {
        Rect { x, y }
    }

    pub fn from_corners(x0: Rational, x1: Rational, y0: Rational, y1: Rational) -> Result<Self> {
        Ok(Rect { x: Interval::new(x0, x1)?, y: Interval::new(y0, y1)? })
    }

    pub fn area(&self) -> Rational {
        self.x.length() * self.y.length()
    }

    pub fn overlaps(&self, other: &Rect) -> bool {
        self.x.overlaps(&other.x) && self.y.overlaps(&other.y)
    }

    pub fn contains(&self, p: (&Rational, &Rational)) -> bool {
        self.x.contains(p.0) && self.y.contains(p.1)
    }

    /// Area of the intersection of two open rectangles.
    pub fn intersection_area(&self, other: &Rect) -> Rational {
        let side = |a: &Interval, b: &Interval| {
            let lo = if a.lo > b.lo { &a.lo } else { &b.lo };
            let hi = if a.hi < b.hi { &a.hi } else { &b.hi };
            if lo < hi {
                hi - lo
            } else {
                Rational::zero()
            }
        };
        side(&self.x, &other.x) * side(&self.y, &other.y)
    }

    /// Up to four pieces after translating by `(dx, dy)`.
    pub fn translate(&self, dx: &Rational, dy: &Rational) -> Vec<Rect> {
        let xs = self.x.translate(dx);
        let ys = self.y.translate(dy);
        xs.iter()
            .flat_map(|x| ys.iter().map(move |y| Rect { x: x.clone(), y: y.clone() }))
            .collect()
    }
}

/// Finite union of pairwise disjoint open rectangles on the torus.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RectUnion {
    pieces: Vec<Rect>,
}

impl RectUnion {
    /// Fails if two pieces overlap.
    pub fn new(pieces: Vec<Rect>) -> Result<Self> {
        for (i, p) in pieces.iter().enumerate() {
            if let Some(q) = pieces[i + 1..].iter().find(|q| p.overlaps(q)) {
                return Err(Error::Unsupported(format!("pieces {p:?} and {q:?} overlap")));
            }
        }
        Ok(RectUnion { pieces })
    }

    pub fn single(r: Rect) -> Self {
        RectUnion { pieces: vec![r] }
    }

    pub fn pieces(&self) -> &[Rect] {
        &self.pieces
    }

    pub fn area(&self) -> Rational {
        self.pieces.iter().map(Rect::area).sum()
    }

    pub fn contains(&self, p: (&Rational, &Rational)) -> bool {
        self.pieces.iter().any(|r| r.contains(p))
    }

    pub fn translate(&self, dx: &Rational, dy: &Rational) -> RectUnion {
        RectUnion { pieces: self.pieces.iter().flat_map(|r| r.translate(dx, dy)).collect() }
    }

    /// Translate by the action of `g`: the doubled angles.
    pub fn act(&self, g: &GroupElement) -> RectUnion {
        let (dx, dy) = shift_of(g);
        self.translate(&dx, &dy)
    }

    pub fn overlaps(&self, other: &RectUnion) -> bool {
        self.pieces.iter().any(|p| other.pieces.iter().any(|q| p.overlaps(q)))
    }

    /// Set equality, up to the measure-zero seams introduced by splitting.
    pub fn same_set(&self, other: &RectUnion) -> bool {
        let (xs, ys) = arrangement(self.pieces.iter().chain(&other.pieces));
        paint(&xs, &ys, &self.pieces) == paint(&xs, &ys, &other.pieces)
    }
}

// JSON: {"pieces": [[lo1, hi1, lo2, hi2], ...]}, each a [num, den] pair.
#[derive(Serialize, Deserialize)]
struct RectUnionJson {
    pieces: Vec<[Rational; 4]>,
}

impl Serialize for RectUnion {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RectUnionJson {
            pieces: self
                .pieces
                .iter()
                .map(|r| [r.x.lo.clone(), r.x.hi.clone(), r.y.lo.clone(), r.y.hi.clone()])
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RectUnion {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RectUnionJson::deserialize(d)?;
        let pieces = raw
            .pieces
            .into_iter()
            .map(|[a, b, c, e]| Rect::from_corners(a, b, c, e))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        RectUnion::new(pieces).map_err(serde::de::Error::custom)
    }
}

/// Torus shift `(2θ, 2φ) mod 1` of a rotation pair.
pub fn shift_of(g: &GroupElement) -> (Rational, Rational) {
    let two = Rational::from_integer(2);
    let red = |r: Rational| &r - &r.floor();
    (red(g.theta.turns() * &two), red(g.phi.turns() * &two))
}

fn arrangement<'a>(rects: impl Iterator<Item = &'a Rect>) -> (Vec<Rational>, Vec<Rational>) {
    let mut xs: BTreeSet<Rational> = [Rational::zero(), Rational::one()].into_iter().collect();
    let mut ys = xs.clone();
    for r in rects {
        xs.insert(r.x.lo.clone());
        xs.insert(r.x.hi.clone());
        ys.insert(r.y.lo.clone());
        ys.insert(r.y.hi.clone());
    }
    (xs.into_iter().collect(), ys.into_iter().collect())
}

/// Cells of the arrangement covered by the closure of some piece, row-major.
fn paint(xs: &[Rational], ys: &[Rational], pieces: &[Rect]) -> Vec<bool> {
    let (cx, cy) = (xs.len() - 1, ys.len() - 1);
    let mut cells = vec![false; cx * cy];
    let pos = |v: &[Rational], r: &Rational| v.binary_search(r).expect("breakpoint present");
    for p in pieces {
        let (x0, x1) = (pos(xs, &p.x.lo), pos(xs, &p.x.hi));
        let (y0, y1) = (pos(ys, &p.y.lo), pos(ys, &p.y.hi));
        for i in x0..x1 {
            for j in y0..y1 {
                cells[i * cy + j] = true;
            }
        }
    }
    cells
}

/// `(0, 2/n)` in turns.
pub fn circle_domain(n: u32) -> Result<Interval> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::Domain(format!("n = {n} must be a positive even integer")));
    }
    Interval::new(Rational::zero(), Rational::new(2, n as i64))
}

/// `(0, 2/n) × (0, 2/m)` in turns.
pub fn torus_domain(n: u32, m: u32) -> Result<RectUnion> {
    Ok(RectUnion::single(Rect::new(circle_domain(n)?, circle_domain(m)?)))
}

/// Coset representatives of `H` in `G` built from a kernel transversal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CosetSelection {
    /// The subgroup `H` whose cosets are represented.
    #[serde(skip)]
    pub subgroup: FiniteSubgroup,
    pub representatives: Vec<GroupElement>,
    /// Transversal of `K_G / (K_G ∩ H)`.
    pub transversal: Vec<GroupElement>,
    /// Number of elements picked in the covering loop.
    pub theta: usize,
    /// Size of the transversal.
    pub omega: usize,
}

/// Representatives `g·σ_j`: `σ_j` runs over a transversal of the kernel part
/// of `G` modulo that of `H`, and each `g` is the lexicographically smallest
/// element of `G` not yet in a covered coset.
pub fn coset_representatives(g: &FiniteSubgroup, h: &FiniteSubgroup) -> Result<CosetSelection> {
    if !h.is_subgroup_of(g) {
        return Err(Error::Containment { sub: h.id(), sup: g.id() });
    }
    let amb = g.ambient();
    // Kernel listing order fixes the transversal: first member of each coset.
    let kg = g.kernel_part();
    let mut transversal: Vec<Idx> = Vec::new();
    for &k in &kg {
        let fresh = transversal.iter().all(|&s| !h.contains_index(amb.add(k, amb.neg(s))));
        if fresh {
            transversal.push(k);
        }
    }
    let mut covered = vec![false; g.members().len()];
    let mut reps = Vec::new();
    let mut theta = 0;
    for (i, &x) in g.members().iter().enumerate() {
        if covered[i] {
            continue;
        }
        theta += 1;
        for &s in &transversal {
            let rep = amb.add(x, s);
            reps.push(rep);
            for &y in h.members() {
                let pos = g.position(amb.add(rep, y)).expect("G is closed");
                covered[pos] = true;
            }
        }
    }
    debug_assert_eq!(reps.len() as u64 * h.order(), g.order());
    Ok(CosetSelection {
        subgroup: h.clone(),
        representatives: reps.iter().map(|&r| amb.element(r)).collect(),
        transversal: transversal.iter().map(|&t| amb.element(t)).collect(),
        theta,
        omega: transversal.len(),
    })
}

/// `F_nm · S` for the coset representatives `S` of `H` in the ambient `G`.
/// Translates by kernel elements coincide and are kept once.
pub fn subgroup_domain(g: &FiniteSubgroup, h: &FiniteSubgroup) -> Result<RectUnion> {
    let amb = g.ambient();
    if g.order() != amb.order() {
        return Err(Error::Domain(format!(
            "the base domain is elementary for the whole of {amb}; got a subgroup of order {}",
            g.order()
        )));
    }
    let sel = coset_representatives(g, h)?;
    let base = torus_domain(amb.n(), amb.m())?;
    let mut pieces: Vec<Rect> = Vec::new();
    for s in &sel.representatives {
        for p in base.act(s).pieces {
            if !pieces.contains(&p) {
                pieces.push(p);
            }
        }
    }
    RectUnion::new(pieces)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OverlapWitness {
    pub first: GroupElement,
    pub second: GroupElement,
}

/// Outcome of checking conditions (A) and (B) for a domain and a subgroup.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ElementaryReport {
    pub pass: bool,
    /// Distinct effective translates never overlap.
    pub condition_a: bool,
    /// Closures of the translates cover the torus.
    pub condition_b: bool,
    pub translates: usize,
    pub overlap: Option<OverlapWitness>,
    pub uncovered: Option<[Rational; 2]>,
    pub area: Rational,
    /// `|K ∩ H| / |H|`.
    pub expected_area: Rational,
    pub area_ok: bool,
    /// Diagnostic only: effective translates mapping the domain onto itself.
    pub setwise_stabilizer: usize,
}

/// One element per effective translate of `h`, with its shift.
pub fn effective_shifts(h: &FiniteSubgroup) -> Vec<(Idx, (Rational, Rational))> {
    let amb: Ambient = h.ambient();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &x in h.members() {
        let s = shift_of(&amb.element(x));
        if seen.insert(s.clone()) {
            out.push((x, s));
        }
    }
    out
}

pub fn verify_elementary(e: &RectUnion, h: &FiniteSubgroup) -> Result<ElementaryReport> {
    let amb = h.ambient();
    let shifts = effective_shifts(h);
    let translates: Vec<RectUnion> = shifts.iter().map(|(_, (dx, dy))| e.translate(dx, dy)).collect();

    let overlap = (0..translates.len())
        .into_par_iter()
        .find_map_first(|i| {
            (i + 1..translates.len())
                .find(|&j| translates[i].overlaps(&translates[j]))
                .map(|j| (i, j))
        })
        .map(|(i, j)| OverlapWitness { first: amb.element(shifts[i].0), second: amb.element(shifts[j].0) });

    let all: Vec<Rect> = translates.iter().flat_map(|t| t.pieces.iter().cloned()).collect();
    let (xs, ys) = arrangement(all.iter());
    let cells = paint(&xs, &ys, &all);
    let cy = ys.len() - 1;
    let uncovered = cells.iter().position(|&c| !c).map(|k| {
        let (i, j) = (k / cy, k % cy);
        let two = Rational::from_integer(2);
        [(&xs[i] + &xs[i + 1]) / two.clone(), (&ys[j] + &ys[j + 1]) / two]
    });

    let setwise_stabilizer = translates.iter().filter(|t| t.same_set(e)).count();
    let area = e.area();
    let expected_area = Rational::new(h.kernel_part().len() as i64, h.order() as i64);
    let area_ok = area == expected_area;
    let (a, b) = (overlap.is_none(), uncovered.is_none());
    Ok(ElementaryReport {
        pass: a && b && area_ok,
        condition_a: a,
        condition_b: b,
        translates: translates.len(),
        overlap,
        uncovered,
        area,
        expected_area,
        area_ok,
        setwise_stabilizer,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{all_subgroups, make_ambient, Ambient, FiniteSubgroup};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn rect(a: (i64, i64), b: (i64, i64), c: (i64, i64), d: (i64, i64)) -> Rect {
        Rect::from_corners(q(a.0, a.1), q(b.0, b.1), q(c.0, c.1), q(d.0, d.1)).unwrap()
    }

    #[test]
    fn circle_domain_examples() {
        let i = circle_domain(2).unwrap();
        assert_eq!((i.lo(), i.hi()), (&q(0, 1), &q(1, 1)));
        assert_eq!(circle_domain(4).unwrap().hi(), &q(1, 2));
        assert_eq!(circle_domain(6).unwrap().hi(), &q(1, 3));
        assert!(circle_domain(3).is_err());
    }

    #[test]
    fn torus_domain_examples() {
        assert_eq!(torus_domain(2, 2).unwrap().pieces(), &[rect((0, 1), (1, 1), (0, 1), (1, 1))]);
        assert_eq!(torus_domain(4, 4).unwrap().pieces(), &[rect((0, 1), (1, 2), (0, 1), (1, 2))]);
        assert_eq!(torus_domain(4, 2).unwrap().pieces(), &[rect((0, 1), (1, 2), (0, 1), (1, 1))]);
    }

    #[test]
    fn translate_splits_at_seam() {
        let r = rect((1, 4), (3, 4), (0, 1), (1, 2));
        let t = r.translate(&q(1, 2), &q(3, 4));
        assert_eq!(t.len(), 4);
        assert_eq!(t.iter().map(Rect::area).sum::<Rational>(), r.area());
        assert_eq!(r.translate(&q(0, 1), &q(1, 2)).len(), 1);
    }

    #[test]
    fn coset_examples() {
        let a = Ambient::new(2, 2).unwrap();
        let g = make_ambient(2, 2).unwrap();
        let h = FiniteSubgroup::from_indices(a, &[(1, 1)]).unwrap();
        let s = coset_representatives(&g, &h).unwrap();
        assert_eq!(
            s.representatives,
            vec![GroupElement::from_fractions(0, 1, 0, 1), GroupElement::from_fractions(1, 2, 0, 1)]
        );
        assert_eq!((s.theta, s.omega), (1, 2));

        let s = coset_representatives(&g, &g).unwrap();
        assert_eq!(s.representatives, vec![GroupElement::identity()]);

        let g4 = make_ambient(4, 4).unwrap();
        let h4 = FiniteSubgroup::from_indices(g4.ambient(), &[(1, 1)]).unwrap();
        let s = coset_representatives(&g4, &h4).unwrap();
        assert_eq!(s.representatives.len(), 4);
        assert_eq!(s.theta * s.omega, 4);

        assert!(matches!(coset_representatives(&h, &g), Err(Error::Containment { .. })));
    }

    #[test]
    fn subgroup_domain_examples() {
        let g = make_ambient(2, 2).unwrap();
        let h = FiniteSubgroup::from_indices(g.ambient(), &[(1, 1)]).unwrap();
        assert_eq!(subgroup_domain(&g, &h).unwrap(), torus_domain(2, 2).unwrap());

        let g4 = make_ambient(4, 4).unwrap();
        let h4 = FiniteSubgroup::from_indices(g4.ambient(), &[(1, 1)]).unwrap();
        let e = subgroup_domain(&g4, &h4).unwrap();
        // Four representatives, pairwise equal modulo the kernel.
        assert_eq!(e.pieces().len(), 2);
        assert!(e.pieces().iter().all(|p| p.area() == q(1, 4)));
        assert!(verify_elementary(&e, &h4).unwrap().pass);

        assert_eq!(subgroup_domain(&g4, &g4).unwrap(), torus_domain(4, 4).unwrap());
        assert!(subgroup_domain(&h4, &h4).is_err());
    }

    #[test]
    fn verify_examples() {
        let g4 = make_ambient(4, 4).unwrap();
        let r = verify_elementary(&torus_domain(4, 4).unwrap(), &g4).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.setwise_stabilizer, 1);

        let triv = FiniteSubgroup::from_indices(Ambient::new(2, 2).unwrap(), &[]).unwrap();
        let half = RectUnion::single(rect((0, 1), (1, 2), (0, 1), (1, 1)));
        let r = verify_elementary(&half, &triv).unwrap();
        assert!(r.condition_a);
        assert!(!r.condition_b);
        assert!(!r.pass);
        let u = r.uncovered.unwrap();
        assert!(u[0] > q(1, 2));

        // Too large a domain overlaps its own translate.
        let r = verify_elementary(&torus_domain(2, 2).unwrap(), &g4).unwrap();
        assert!(!r.condition_a);
        assert!(r.overlap.is_some());

        for f in all_subgroups(4, 4, Some(crate::groups::ClassTag::E1)).unwrap() {
            let e = subgroup_domain(&g4, &f).unwrap();
            assert!(verify_elementary(&e, &f).unwrap().pass);
        }
    }

    #[test]
    fn all_subgroups_small_ambients() {
        for n in [2, 4, 6] {
            for m in [2, 4, 6] {
                let g = make_ambient(n, m).unwrap();
                for h in all_subgroups(n, m, None).unwrap() {
                    let s = coset_representatives(&g, &h).unwrap();
                    assert_eq!((s.theta * s.omega) as u64, g.order() / h.order());
                    let e = subgroup_domain(&g, &h).unwrap();
                    let r = verify_elementary(&e, &h).unwrap();
                    assert!(r.pass, "{} {:?}", h.id(), r);
                }
            }
        }
    }

    #[test]
    fn same_set_ignores_seams() {
        let whole = RectUnion::single(rect((0, 1), (1, 1), (0, 1), (1, 1)));
        assert!(whole.translate(&q(1, 3), &q(1, 5)).same_set(&whole));
        let half = RectUnion::single(rect((0, 1), (1, 2), (0, 1), (1, 1)));
        assert!(!half.translate(&q(1, 4), &q(0, 1)).same_set(&half));
    }

    #[test]
    fn json_round_trip() {
        let e = torus_domain(4, 2).unwrap();
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(s, r#"{"pieces":[[[0,1],[1,2],[0,1],[1,1]]]}"#);
        assert_eq!(serde_json::from_str::<RectUnion>(&s).unwrap(), e);
        assert!(serde_json::from_str::<RectUnion>(r#"{"pieces":[[[1,2],[1,4],[0,1],[1,1]]]}"#).is_err());
    }
}
