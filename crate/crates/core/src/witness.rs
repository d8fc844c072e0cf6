//! The rectangle `R`, the witness `ζ₃` of a class-E1 subgroup, and little
//! groups found by exhaustive stabilizer search on a grid.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::domains::{effective_shifts, shift_of, Rect, RectUnion};
use crate::dualaction::{GridFunction, GridSpec, PreparedAction};
use crate::error::{Error, Result};
use crate::exactmath::{lcm, Rational};
use crate::groups::{make_ambient, Ambient, ClassTag, FiniteSubgroup, GroupElement};

/// Default refinement of the detection ambient.
pub const DEFAULT_SCALE: u32 = 2;

/// `(3/(4n), 5/(4n)) × (3/(4m), 5/(4m))` in turns: centred at `(1/n, 1/m)`
/// with sides `1/(2n)` and `1/(2m)`.
pub fn build_rectangle(n: u32, m: u32) -> Result<RectUnion> {
    let amb = Ambient::new(n, m)?;
    let (n, m) = (amb.n() as i64, amb.m() as i64);
    let r = Rect::from_corners(
        Rational::new(3, 4 * n),
        Rational::new(5, 4 * n),
        Rational::new(3, 4 * m),
        Rational::new(5, 4 * m),
    )?;
    Ok(RectUnion::single(r))
}

/// Indicator of `e` sampled at the grid points.
pub fn indicator(spec: GridSpec, e: &RectUnion) -> GridFunction {
    GridFunction::from_fn(spec, |j, k| {
        let (x, y) = spec.coords(j, k);
        if e.contains((&x, &y)) {
            Rational::one()
        } else {
            Rational::zero()
        }
    })
}

fn require_e1(g: &FiniteSubgroup) -> Result<()> {
    if g.class() != ClassTag::E1 {
        return Err(Error::Class { expected: ClassTag::E1.to_string(), found: g.class().to_string() });
    }
    Ok(())
}

/// Grid fine enough for the corners of `R` and for every element of
/// `C_{sn} × C_{sm}`.
pub fn detection_grid(ambient: Ambient, scale: u32) -> Result<GridSpec> {
    if scale == 0 {
        return Err(Error::Domain("ambient scale must be positive".into()));
    }
    let (n, m) = (ambient.n() as u64, ambient.m() as u64);
    let s = scale as u64;
    let n1 = lcm(4 * n, 4 * s * n);
    let n2 = lcm(4 * m, 4 * s * m);
    let fit = |v: u64| u32::try_from(v).map_err(|_| Error::Grid(format!("{v} points per axis")));
    GridSpec::new(fit(n1)?, fit(n2)?)
}

/// `ζ₃ = (1/|K_G|) Σ_{g∈G} T′(g⁻¹) χ_R`.
pub fn build_zeta3(g: &FiniteSubgroup, spec: GridSpec) -> Result<GridFunction> {
    require_e1(g)?;
    let amb = g.ambient();
    if !spec.n1.is_multiple_of(4 * amb.n()) || !spec.n2.is_multiple_of(4 * amb.m()) {
        return Err(Error::Grid(format!(
            "{}x{} grid does not resolve the corners of R for {amb}",
            spec.n1, spec.n2
        )));
    }
    let r = build_rectangle(amb.n(), amb.m())?;
    let chi = indicator(spec, &r);
    let mut acc = vec![Rational::zero(); spec.len()];
    for &x in g.members() {
        PreparedAction::new(&amb.element(amb.neg(x)), spec)?.accumulate(&chi, &mut acc)?;
    }
    let k = Rational::from_integer(g.kernel_part().len() as i64);
    let values = acc.into_iter().map(|v| v / k.clone()).collect();
    GridFunction::new(spec, values)
}

/// Stabilizer of a grid function inside a finite test set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stabilizer {
    /// Every element `h` with `T′(h) f = f`, in index order.
    pub elements: Vec<GroupElement>,
    /// Torus shifts of those elements; elements that act alike appear once.
    pub images: Vec<(Rational, Rational)>,
}

pub fn detect_little_group(f: &GridFunction, test_set: &FiniteSubgroup) -> Result<Stabilizer> {
    let amb = test_set.ambient();
    let spec = f.spec();
    let hits = test_set
        .members()
        .par_iter()
        .map(|&x| {
            let h = amb.element(x);
            let fixed = PreparedAction::new(&h, spec)?.fixes(f)?;
            Ok(fixed.then_some(h))
        })
        .collect::<Result<Vec<_>>>()?;
    let elements: Vec<GroupElement> = hits.into_iter().flatten().collect();
    let images: BTreeSet<(Rational, Rational)> = elements.iter().map(shift_of).collect();
    Ok(Stabilizer { elements, images: images.into_iter().collect() })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    pub subgroup: String,
    pub grid: [u32; 2],
    pub stabilizer: Vec<GroupElement>,
    #[serde(rename = "match")]
    pub matches: bool,
}

/// Builds `ζ₃(G)` and scans `C_{sn} × C_{sm}` for its stabilizer.
pub fn run_witness(g: &FiniteSubgroup, scale: u32) -> Result<WitnessReport> {
    require_e1(g)?;
    let amb = g.ambient();
    let spec = detection_grid(amb, scale)?;
    let zeta = build_zeta3(g, spec)?;
    let test_set = make_ambient(amb.n() * scale, amb.m() * scale)?;
    let stab = detect_little_group(&zeta, &test_set)?;
    let expected = g.embed(test_set.ambient())?.elements();
    Ok(WitnessReport {
        subgroup: g.id(),
        grid: [spec.n1, spec.n2],
        matches: stab.elements == expected,
        stabilizer: stab.elements,
    })
}

/// The distinct effective translates `Rg` are pairwise disjoint.
pub fn translates_disjoint(g: &FiniteSubgroup) -> Result<bool> {
    let amb = g.ambient();
    let r = build_rectangle(amb.n(), amb.m())?;
    let ts: Vec<RectUnion> = effective_shifts(g).iter().map(|(_, (dx, dy))| r.translate(dx, dy)).collect();
    Ok((0..ts.len()).all(|i| (i + 1..ts.len()).all(|j| !ts[i].overlaps(&ts[j]))))
}

/// For every `h` of `C_{sn} × C_{sm}`, `Rh` either misses `∪ Rg` up to
/// measure zero or coincides with one of the `Rg`.
pub fn area_dichotomy(g: &FiniteSubgroup, scale: u32) -> Result<bool> {
    let amb = g.ambient();
    let r = build_rectangle(amb.n(), amb.m())?;
    let orbit: Vec<RectUnion> = effective_shifts(g).iter().map(|(_, (dx, dy))| r.translate(dx, dy)).collect();
    let refined = Ambient::new(amb.n() * scale, amb.m() * scale)?;
    let ok = refined.all_indices().collect::<Vec<_>>().par_iter().all(|&x| {
        let (dx, dy) = shift_of(&refined.element(x));
        let rh = r.translate(&dx, &dy);
        let meet: Rational = orbit
            .iter()
            .flat_map(|t| t.pieces().iter())
            .flat_map(|p| rh.pieces().iter().map(move |q| p.intersection_area(q)))
            .sum();
        meet.is_zero() || orbit.iter().any(|t| t.same_set(&rh))
    });
    Ok(ok)
}
