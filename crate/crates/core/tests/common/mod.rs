//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use gfmi::genfun::{FactorKind, InvariantCore};
use gfmi::WeightedPointSet;
use rand::seq::SliceRandom;
use rand::Rng;

/// Direct evaluation of a core as a multiple sum over point tuples, on
/// coordinates relative to the weighted centroid. Returns the sum and the
/// sum of absolute terms (a natural scale for comparing against zero).
pub fn brute_force_core(core: &InvariantCore, ps: &WeightedPointSet) -> (f64, f64) {
    let dim = ps.dim();
    let total: f64 = ps.points().iter().map(|p| p.weight).sum();
    let mut c = [0.0; 3];
    for p in ps.points() {
        for (c, x) in c[..dim].iter_mut().zip(&p.coords) {
            *c += p.weight * x / total;
        }
    }
    let pts: Vec<([f64; 3], f64)> = ps
        .points()
        .iter()
        .map(|p| {
            let mut x = [0.0; 3];
            for d in 0..dim {
                x[d] = p.coords[d] - c[d];
            }
            (x, p.weight)
        })
        .collect();
    let n = core.num_points();
    let mut idx = vec![0usize; n];
    let (mut sum, mut abs) = (0.0, 0.0);
    loop {
        let mut term = f64::from(core.sign());
        for &i in &idx {
            term *= pts[i].1;
        }
        for fac in core.factors() {
            let a = fac.args();
            let x = |k: usize| pts[idx[a[k] as usize - 1]].0;
            term *= match fac.kind() {
                FactorKind::F => (0..dim).map(|d| x(0)[d] * x(1)[d]).sum(),
                FactorKind::G if dim == 2 => x(0)[0] * x(1)[1] - x(1)[0] * x(0)[1],
                FactorKind::G => {
                    let (u, v, w) = (x(0), x(1), x(2));
                    u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0])
                        + u[2] * (v[0] * w[1] - v[1] * w[0])
                }
            };
        }
        sum += term;
        abs += term.abs();
        // Next tuple in odometer order.
        let mut k = 0;
        loop {
            if k == n {
                return (sum, abs);
            }
            idx[k] += 1;
            if idx[k] < pts.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// A random valid 2D core with at most `max_points` labels and `max_factors` factors.
pub fn random_core(rng: &mut impl Rng, max_points: u8, max_factors: usize) -> InvariantCore {
    loop {
        let n = rng.gen_range(1..=max_points);
        let k = rng.gen_range(1..=max_factors);
        let mut factors = Vec::with_capacity(k);
        for _ in 0..k {
            let kind = *[FactorKind::F, FactorKind::G].choose(rng).unwrap();
            let a = rng.gen_range(1..=n);
            let b = rng.gen_range(1..=n);
            factors.push((kind, vec![a, b]));
        }
        if let Ok(core) = InvariantCore::new(2, &factors) {
            return core;
        }
    }
}

pub fn rel_err(value: f64, reference: f64, floor: f64) -> f64 {
    (value - reference).abs() / reference.abs().max(floor)
}
