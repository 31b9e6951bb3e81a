//! Group transformations of point sets and invariance campaigns.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::catalog::NamedInvariant;
use crate::discovery::DiscoveredInvariant;
use crate::error::{Error, Result};
use crate::genfun::Group;
use crate::moments::{central_moments_extended, MomentIndex, WeightedPoint, WeightedPointSet};
use crate::poly::MomentPolynomial;

/// Relative-error denominator floor for values near zero.
pub const SCALE_FLOOR: f64 = 1e-12;

/// `x -> linear * x + translation`. Only the leading `dim` rows and columns are used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AffineMap {
    pub dim: usize,
    pub linear: [[f64; 3]; 3],
    pub translation: [f64; 3],
}

impl AffineMap {
    pub fn new(dim: usize, linear: [[f64; 3]; 3], translation: [f64; 3]) -> Result<Self> {
        crate::moments::check_dim(dim)?;
        let mut m = Self {
            dim,
            linear,
            translation,
        };
        if dim == 2 {
            m.linear[2] = [0.0, 0.0, 1.0];
            m.linear[0][2] = 0.0;
            m.linear[1][2] = 0.0;
            m.translation[2] = 0.0;
        }
        Ok(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(
            dim,
            [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            [0.0; 3],
        )
        .expect("dimension checked by caller")
    }

    pub fn translation(dim: usize, t: [f64; 3]) -> Self {
        let mut m = Self::identity(dim);
        m.translation = t;
        if dim == 2 {
            m.translation[2] = 0.0;
        }
        m
    }

    pub fn scale(dim: usize, s: f64) -> Self {
        let mut m = Self::identity(dim);
        for i in 0..dim {
            m.linear[i][i] = s;
        }
        m
    }

    pub fn rotation_2d(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(2, [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]], [0.0; 3]).expect("2D")
    }

    /// Reflection across the vertical axis: `x -> -x`.
    pub fn mirror(dim: usize) -> Self {
        let mut m = Self::identity(dim);
        m.linear[0][0] = -1.0;
        m
    }

    pub fn det(&self) -> f64 {
        let a = &self.linear;
        if self.dim == 2 {
            a[0][0] * a[1][1] - a[0][1] * a[1][0]
        } else {
            a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
                - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
        }
    }

    pub fn apply_point(&self, x: [f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate().take(self.dim) {
            *o = self.translation[i] + (0..self.dim).map(|j| self.linear[i][j] * x[j]).sum::<f64>();
        }
        out
    }

    /// Maps every point and multiplies every weight by `|det|`, so the point
    /// set behaves like a transformed density.
    pub fn apply(&self, ps: &WeightedPointSet) -> Result<WeightedPointSet> {
        if ps.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: ps.dim(),
            });
        }
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return Err(Error::SingularMap(det));
        }
        let points = ps
            .points()
            .iter()
            .map(|p| WeightedPoint {
                coords: self.apply_point(p.coords),
                weight: p.weight * det.abs(),
            })
            .collect();
        WeightedPointSet::new(self.dim, points)
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &AffineMap) -> Result<AffineMap> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut linear = [[0.0; 3]; 3];
        for (i, row) in linear.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| self.linear[i][k] * other.linear[k][j]).sum();
            }
        }
        let t = self.apply_point(other.translation);
        AffineMap::new(self.dim, linear, t)
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rotation angle in `[0, 2π)`, scale in `[0.5, 2]`, translation in `[-5, 5]^2`.
pub fn random_similarity(seed: u64) -> AffineMap {
    let mut r = rng(seed);
    let theta = r.gen_range(0.0..TAU);
    let s = r.gen_range(0.5..=2.0);
    let t = [r.gen_range(-5.0..=5.0), r.gen_range(-5.0..=5.0), 0.0];
    let mut m = AffineMap::rotation_2d(theta);
    for row in m.linear.iter_mut().take(2) {
        for v in row.iter_mut().take(2) {
            *v *= s;
        }
    }
    m.translation = t;
    m
}

/// Linear entries in `[-2, 2]`, redrawn until `0.1 <= det <= 10`; translation in `[-5, 5]^2`.
pub fn random_affine(seed: u64) -> AffineMap {
    let mut r = rng(seed);
    loop {
        let mut a = [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]];
        for row in a.iter_mut().take(2) {
            for v in row.iter_mut().take(2) {
                *v = r.gen_range(-2.0..=2.0);
            }
        }
        let t = [r.gen_range(-5.0..=5.0), r.gen_range(-5.0..=5.0), 0.0];
        let m = AffineMap::new(2, a, t).expect("2D");
        let det = m.det();
        if (0.1..=10.0).contains(&det) {
            return m;
        }
    }
}

/// Uniformly distributed rotation (random unit quaternion) plus a translation in `[-5, 5]^3`.
pub fn random_rotation3d(seed: u64) -> AffineMap {
    let mut r = rng(seed);
    let (u1, u2, u3): (f64, f64, f64) = (r.gen(), r.gen(), r.gen());
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    let (x, y, z, w) = (
        a * (TAU * u2).sin(),
        a * (TAU * u2).cos(),
        b * (TAU * u3).sin(),
        b * (TAU * u3).cos(),
    );
    let linear = [
        [
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - z * w),
            2.0 * (x * z + y * w),
        ],
        [
            2.0 * (x * y + z * w),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - x * w),
        ],
        [
            2.0 * (x * z - y * w),
            2.0 * (y * z + x * w),
            1.0 - 2.0 * (x * x + y * y),
        ],
    ];
    let t = [
        r.gen_range(-5.0..=5.0),
        r.gen_range(-5.0..=5.0),
        r.gen_range(-5.0..=5.0),
    ];
    AffineMap::new(3, linear, t).expect("3D")
}

/// A random map of the kind that should leave invariants of `group` unchanged.
pub fn random_map(group: Group, seed: u64) -> AffineMap {
    match group {
        Group::Similarity => random_similarity(seed),
        Group::Affine => random_affine(seed),
        Group::Rotation3D => random_rotation3d(seed),
    }
}

/// `n` points with coordinates in `[-1, 1]` and weights in `[0.5, 1.5]`.
pub fn random_pointset(dim: usize, n: usize, seed: u64) -> Result<WeightedPointSet> {
    crate::moments::check_dim(dim)?;
    let mut r = rng(seed);
    let points = (0..n)
        .map(|_| {
            let mut coords = [0.0; 3];
            for c in coords.iter_mut().take(dim) {
                *c = r.gen_range(-1.0..=1.0);
            }
            WeightedPoint {
                coords,
                weight: r.gen_range(0.5..=1.5),
            }
        })
        .collect();
    WeightedPointSet::new(dim, points)
}

/// Something evaluable as an absolute invariant: a numerator polynomial in
/// central moments divided by `mu00^k`.
#[derive(Debug, Clone)]
pub struct Descriptor {
    pub name: String,
    pub group: Group,
    pub numerator: MomentPolynomial,
    pub k: u32,
    pub skew: bool,
}

impl Descriptor {
    fn extended(&self, ps: &WeightedPointSet) -> Result<(twofloat::TwoFloat, twofloat::TwoFloat)> {
        if ps.dim() != self.numerator.dim() && !self.numerator.is_zero() {
            return Err(Error::DimensionMismatch {
                expected: self.numerator.dim(),
                found: ps.dim(),
            });
        }
        let order = self.numerator.order();
        let moments = central_moments_extended(ps, order)?;
        let indices = MomentIndex::all(ps.dim(), order);
        let num = self.numerator.evaluate_extended(|s| {
            moments[indices
                .iter()
                .position(|&i| i == s)
                .expect("order covers every symbol")]
        });
        Ok((num, moments[0]))
    }

    /// Numerator on central moments, without the `mu00^k` division.
    pub fn numerator_value(&self, ps: &WeightedPointSet) -> Result<f64> {
        Ok(f64::from(self.extended(ps)?.0))
    }

    /// Absolute value `numerator / mu00^k`, computed in double-double
    /// precision: for strongly sheared shapes the numerator cancels heavily.
    pub fn value(&self, ps: &WeightedPointSet) -> Result<f64> {
        let (num, m00) = self.extended(ps)?;
        Ok(f64::from(num / m00.powi(self.k as i32)))
    }
}

impl From<&NamedInvariant> for Descriptor {
    fn from(e: &NamedInvariant) -> Self {
        Self {
            name: e.name.clone(),
            group: e.group,
            numerator: e.reference.clone(),
            k: e.k,
            skew: e.skew,
        }
    }
}

impl Descriptor {
    pub fn from_discovered(d: &DiscoveredInvariant, group: Group) -> Self {
        Self {
            name: d.core.clone(),
            group,
            numerator: d.core_value.translate(),
            k: d.k,
            skew: d.skew,
        }
    }
}

fn rel_err(v: f64, baseline: f64) -> f64 {
    (v - baseline).abs() / baseline.abs().max(SCALE_FLOOR)
}

#[derive(Debug, Clone, Serialize)]
pub struct TransformValue {
    pub map: AffineMap,
    pub value: f64,
    pub rel_err: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvarianceReport {
    pub invariant: String,
    pub group: Group,
    pub seed: u64,
    pub tol: f64,
    pub baseline: f64,
    pub per_transform: Vec<TransformValue>,
    pub max_rel_err: f64,
    pub pass: bool,
}

/// Evaluates on `ps` and on `n_transforms` random images of it under the
/// descriptor's group. Passes when every relative deviation is within `tol`.
pub fn invariance_check(
    inv: &Descriptor,
    ps: &WeightedPointSet,
    n_transforms: usize,
    seed: u64,
    tol: f64,
) -> Result<InvarianceReport> {
    let baseline = inv.value(ps)?;
    let mut seeds = rng(seed);
    let mut per_transform = Vec::with_capacity(n_transforms);
    for _ in 0..n_transforms {
        let map = random_map(inv.group, seeds.gen());
        let value = inv.value(&map.apply(ps)?)?;
        per_transform.push(TransformValue {
            map,
            value,
            rel_err: rel_err(value, baseline),
        });
    }
    let max_rel_err = per_transform.iter().map(|t| t.rel_err).fold(0.0, f64::max);
    Ok(InvarianceReport {
        invariant: inv.name.clone(),
        group: inv.group,
        seed,
        tol,
        baseline,
        per_transform,
        max_rel_err,
        pass: max_rel_err <= tol,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ParityReport {
    pub invariant: String,
    pub baseline: f64,
    pub mirrored: f64,
    /// -1 for skew invariants, +1 otherwise.
    pub expected_sign: i8,
    pub rel_err: f64,
    pub pass: bool,
}

/// Compares the value on `ps` with the value on its mirror image: skew
/// invariants must flip sign, true invariants must not.
pub fn reflection_check(inv: &Descriptor, ps: &WeightedPointSet, tol: f64) -> Result<ParityReport> {
    let baseline = inv.value(ps)?;
    let mirrored = inv.value(&AffineMap::mirror(ps.dim()).apply(ps)?)?;
    let expected_sign: i8 = if inv.skew { -1 } else { 1 };
    let err = rel_err(mirrored, f64::from(expected_sign) * baseline);
    Ok(ParityReport {
        invariant: inv.name.clone(),
        baseline,
        mirrored,
        expected_sign,
        rel_err: err,
        pass: err <= tol,
    })
}
