//! Invariant subspaces of grid functions under a finite subgroup.
//!
//! `σ_F f = (1/|K_F|) Σ_{g∈F} T′(g) f` averages over the subgroup and
//! `ρ f = χ_E f` restricts to an elementary domain `E`. For classes O and E1
//! these are mutually inverse between functions on `E` and invariant
//! functions; for E2, E3, E4 the average is identically zero.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::domains::{subgroup_domain, RectUnion};
use crate::dualaction::{GridFunction, GridSpec, PreparedAction};
use crate::error::{Error, Result};
use crate::exactmath::Rational;
use crate::groups::{make_ambient, Ambient, ClassTag, FiniteSubgroup};

/// Grid used for the invariant-space checks on `C_n × C_m`: `2n × 2m`.
pub fn default_grid(ambient: Ambient) -> GridSpec {
    GridSpec { n1: 2 * ambient.n(), n2: 2 * ambient.m() }
}

/// Random function with values `p/q`, `|p| ≤ 5`, `1 ≤ q ≤ 4`.
pub fn random_grid_function(spec: GridSpec, rng: &mut impl Rng) -> GridFunction {
    GridFunction::from_fn(spec, |_, _| Rational::new(rng.gen_range(-5..=5), rng.gen_range(1..=4)))
}

/// Which grid points lie in `E`; half-offset points never sit on a corner
/// line when corners are multiples of `1/n1`, `1/n2`.
pub fn grid_mask(spec: GridSpec, e: &RectUnion) -> Vec<bool> {
    (0..spec.n1)
        .flat_map(|j| (0..spec.n2).map(move |k| (j, k)))
        .map(|(j, k)| {
            let (x, y) = spec.coords(j, k);
            e.contains((&x, &y))
        })
        .collect()
}

/// Values of `f` at the grid points of `E`, in row-major order.
pub fn restrict(f: &GridFunction, e: &RectUnion) -> Vec<Rational> {
    grid_mask(f.spec(), e)
        .into_iter()
        .zip(f.values())
        .filter(|(m, _)| *m)
        .map(|(_, v)| v.clone())
        .collect()
}

/// Inverse of [`restrict`]: place `values` on the points of `E`, zero elsewhere.
pub fn extend_by_zero(spec: GridSpec, e: &RectUnion, values: &[Rational]) -> Result<GridFunction> {
    let mask = grid_mask(spec, e);
    let inside = mask.iter().filter(|&&m| m).count();
    if inside != values.len() {
        return Err(Error::Grid(format!("{} values for {inside} grid points in the domain", values.len())));
    }
    let mut it = values.iter();
    let out = mask
        .iter()
        .map(|&m| if m { it.next().expect("counted").clone() } else { Rational::zero() })
        .collect();
    GridFunction::new(spec, out)
}

fn prepared(f: &FiniteSubgroup, spec: GridSpec) -> Result<Vec<PreparedAction>> {
    f.elements().iter().map(|g| PreparedAction::new(g, spec)).collect()
}

pub fn sigma_project(f: &FiniteSubgroup, func: &GridFunction) -> Result<GridFunction> {
    sigma_with(&prepared(f, func.spec())?, f.kernel_part().len(), func)
}

fn sigma_with(actions: &[PreparedAction], kernel: usize, func: &GridFunction) -> Result<GridFunction> {
    let mut acc = vec![Rational::zero(); func.spec().len()];
    for a in actions {
        a.accumulate(func, &mut acc)?;
    }
    let inv = Rational::new(1, kernel as i64);
    GridFunction::new(func.spec(), acc.iter().map(|v| v * &inv).collect())
}

/// `χ_E · f`.
pub fn rho_restrict(func: &GridFunction, e: &RectUnion) -> GridFunction {
    let mask = grid_mask(func.spec(), e);
    let values = func
        .values()
        .iter()
        .zip(mask)
        .map(|(v, m)| if m { v.clone() } else { Rational::zero() })
        .collect();
    GridFunction::new(func.spec(), values).expect("same grid")
}

/// Number of independent invariant functions on the grid: orbits of grid
/// points whose kernel-stabilizer signs do not cancel. Averaging a point
/// indicator gives a multiple of `Σ_{g fixing x} γ(x, g)` on its orbit.
pub fn invariant_dimension(f: &FiniteSubgroup, spec: GridSpec) -> Result<usize> {
    let actions = prepared(f, spec)?;
    let n2 = spec.n2;
    let mut seen = vec![false; spec.len()];
    let mut count = 0;
    for start in 0..spec.len() {
        if seen[start] {
            continue;
        }
        let (j, k) = ((start / n2 as usize) as u32, (start % n2 as usize) as u32);
        let mut fixed_sum = 0i64;
        for a in &actions {
            let (s1, s2) = a.shift();
            let target = ((j + s1) % spec.n1) as usize * n2 as usize + ((k + s2) % n2) as usize;
            seen[target] = true;
            if target == start {
                fixed_sum += a.sign(j, k) as i64;
            }
        }
        if fixed_sum != 0 {
            count += 1;
        }
    }
    Ok(count)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantReport {
    pub subgroup: String,
    pub class: ClassTag,
    pub grid: [u32; 2],
    pub trials: usize,
    /// `ρσ = id` on random functions supported in `E`.
    pub rho_sigma_identity: bool,
    /// `σρ = id` on random invariant functions.
    pub sigma_rho_identity: bool,
    /// `σ` sent every trial function to zero.
    pub annihilates: bool,
    /// `σ∘σ = (|F|/|K_F|)·σ`: the averaging projection `(1/|F|) Σ T′(g)`
    /// is idempotent, `σ` is that projection rescaled.
    pub idempotent: bool,
    pub invariant_dimension: usize,
    pub points_in_domain: usize,
    pub pass: bool,
}

/// Runs the `ρσ` / `σρ` identities (classes O, E1) or the annihilation
/// check (E2, E3, E4) on `trials` seeded random functions.
pub fn verify_invariant_space(f: &FiniteSubgroup, trials: usize, seed: u64) -> Result<InvariantReport> {
    let amb = f.ambient();
    let spec = default_grid(amb);
    let e = subgroup_domain(&make_ambient(amb.n(), amb.m())?, f)?;
    let actions = prepared(f, spec)?;
    let kernel = f.kernel_part().len();
    let sigma = |g: &GridFunction| sigma_with(&actions, kernel, g);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = Rational::new(f.order() as i64, kernel as i64);
    let points_in_domain = grid_mask(spec, &e).iter().filter(|&&m| m).count();

    let (mut rs, mut sr, mut ann, mut idem) = (true, true, true, true);
    for _ in 0..trials {
        let on_e: Vec<Rational> = (0..points_in_domain)
            .map(|_| Rational::new(rng.gen_range(-5..=5), rng.gen_range(1..=4)))
            .collect();
        let fe = extend_by_zero(spec, &e, &on_e)?;
        rs &= restrict(&rho_restrict(&sigma(&fe)?, &e), &e) == on_e;

        let raw = random_grid_function(spec, &mut rng);
        let inv = sigma(&raw)?;
        sr &= sigma(&rho_restrict(&inv, &e))? == inv;
        ann &= inv.is_zero();
        idem &= sigma(&inv)? == inv.scale(&scale);
    }
    let invariant_dimension = invariant_dimension(f, spec)?;
    let pass = idem
        && if f.class().is_annihilated() {
            ann && invariant_dimension == 0
        } else {
            rs && sr && invariant_dimension == points_in_domain
        };
    Ok(InvariantReport {
        subgroup: f.id(),
        class: f.class(),
        grid: [spec.n1, spec.n2],
        trials,
        rho_sigma_identity: rs,
        sigma_rho_identity: sr,
        annihilates: ann,
        idempotent: idem,
        invariant_dimension,
        points_in_domain,
        pass,
    })
}

/// For an odd-order `O`: `σ_O f = σ_{O×A} f` on every trial, so the two
/// invariant spaces coincide and `O` is never a maximal stabilizer.
pub fn odd_matches_odd_times_a(o: &FiniteSubgroup, trials: usize, seed: u64) -> Result<bool> {
    if o.class() != ClassTag::O {
        return Err(Error::Class { expected: "O".into(), found: o.class().to_string() });
    }
    let amb = o.ambient();
    let mut gens = o.generator_indices().to_vec();
    gens.push(amb.a_element());
    let oa = FiniteSubgroup::from_indices(amb, &gens)?;
    let spec = default_grid(amb);
    let (ao, aoa) = (prepared(o, spec)?, prepared(&oa, spec)?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let f = random_grid_function(spec, &mut rng);
        if sigma_with(&ao, 1, &f)? != sigma_with(&aoa, oa.kernel_part().len(), &f)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dualaction::dual_apply;
    use crate::groups::all_subgroups;

    fn sub(n: u32, m: u32, gens: &[(u32, u32)]) -> FiniteSubgroup {
        FiniteSubgroup::from_indices(Ambient::new(n, m).unwrap(), gens).unwrap()
    }

    #[test]
    fn extend_and_restrict_are_inverse() {
        let spec = GridSpec::new(8, 8).unwrap();
        let e = subgroup_domain(&make_ambient(4, 4).unwrap(), &sub(4, 4, &[(1, 1)])).unwrap();
        let zero = extend_by_zero(spec, &e, &vec![Rational::zero(); restrict(&GridFunction::zeros(spec), &e).len()]).unwrap();
        assert!(zero.is_zero());
        let mut vals = vec![Rational::zero(); 32];
        vals[5] = Rational::new(3, 2);
        let f = extend_by_zero(spec, &e, &vals).unwrap();
        assert_eq!(f.support_len(), 1);
        assert_eq!(restrict(&f, &e), vals);
        assert!(extend_by_zero(spec, &e, &vals[1..]).is_err());
    }

    #[test]
    fn sigma_examples() {
        let spec = GridSpec::new(4, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_grid_function(spec, &mut rng);
        assert_eq!(sigma_project(&sub(2, 2, &[(1, 1)]), &f).unwrap(), f);
        assert!(sigma_project(&sub(2, 2, &[(1, 0)]), &f).unwrap().is_zero());
        assert_eq!(sigma_project(&sub(2, 2, &[]), &f).unwrap(), f);
    }

    #[test]
    fn rho_examples() {
        let spec = GridSpec::new(4, 4).unwrap();
        let half = RectUnion::single(crate::domains::Rect::from_corners(
            Rational::zero(), Rational::new(1, 2), Rational::zero(), Rational::one(),
        ).unwrap());
        assert!(rho_restrict(&GridFunction::zeros(spec), &half).is_zero());
        let one = GridFunction::from_fn(spec, |_, _| Rational::one());
        let r = rho_restrict(&one, &half);
        assert_eq!(r.support_len(), 8);
        assert!((0..4).all(|k| r.get(0, k) == &Rational::one() && r.get(3, k).is_zero()));
    }

    #[test]
    fn invariant_space_examples() {
        let r = verify_invariant_space(&sub(2, 2, &[(1, 1)]), 50, 1).unwrap();
        assert!(r.pass && r.rho_sigma_identity && r.sigma_rho_identity, "{r:?}");
        for gens in [&[(1u32, 0u32)][..], &[(1, 0), (0, 1)]] {
            let r = verify_invariant_space(&sub(2, 2, gens), 50, 1).unwrap();
            assert!(r.pass && r.annihilates && r.invariant_dimension == 0, "{r:?}");
        }
    }

    #[test]
    fn sigma_output_is_invariant() {
        for f in all_subgroups(4, 6, None).unwrap() {
            let spec = default_grid(f.ambient());
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let s = sigma_project(&f, &random_grid_function(spec, &mut rng)).unwrap();
            for g in f.elements() {
                assert_eq!(dual_apply(&g, &s).unwrap(), s);
            }
        }
    }

    #[test]
    fn e1_bracket_is_one_everywhere() {
        // (1/|K_F|)(γ(x,e) + γ(x,ι)) = 1 at every grid point.
        let spec = GridSpec::new(12, 8).unwrap();
        let e = PreparedAction::new(&crate::groups::GroupElement::identity(), spec).unwrap();
        let iota = PreparedAction::new(&crate::groups::GroupElement::from_fractions(1, 2, 1, 2), spec).unwrap();
        for j in 0..12 {
            for k in 0..8 {
                assert_eq!(e.sign(j, k) + iota.sign(j, k), 2);
            }
        }
    }

    #[test]
    fn all_classes_small_ambients() {
        for (n, m) in [(2, 2), (4, 2), (4, 4), (6, 4)] {
            for f in all_subgroups(n, m, None).unwrap() {
                let r = verify_invariant_space(&f, 5, 9).unwrap();
                assert!(r.pass, "{r:?}");
                if f.class() == ClassTag::O {
                    assert!(odd_matches_odd_times_a(&f, 5, 9).unwrap());
                }
            }
        }
        assert!(odd_matches_odd_times_a(&sub(2, 2, &[(1, 1)]), 1, 0).is_err());
    }
}
