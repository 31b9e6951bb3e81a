//! Raw and central geometric moments of discrete weighted point sets.
//!
//! A shape is a finite measure: every point carries a nonnegative weight,
//! so the moment integrals reduce to weighted sums over the points.

use std::fmt;

use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::error::{Error, Result};

/// A point with up to three coordinates. Unused trailing coordinates are zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedPoint {
    pub coords: [f64; 3],
    pub weight: f64,
}

impl WeightedPoint {
    pub fn new_2d(x: f64, y: f64, weight: f64) -> Self {
        Self {
            coords: [x, y, 0.0],
            weight,
        }
    }

    pub fn new_3d(x: f64, y: f64, z: f64, weight: f64) -> Self {
        Self {
            coords: [x, y, z],
            weight,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedPointSet {
    dim: usize,
    points: Vec<WeightedPoint>,
}

impl WeightedPointSet {
    /// Builds a point set, rejecting bad dimensions and negative or non-finite weights.
    /// In 2D the third coordinate of every point is forced to zero.
    pub fn new(dim: usize, points: Vec<WeightedPoint>) -> Result<Self> {
        check_dim(dim)?;
        let mut points = points;
        for p in &mut points {
            if !p.weight.is_finite() || p.weight < 0.0 {
                return Err(Error::InvalidWeight(p.weight));
            }
            if dim == 2 {
                p.coords[2] = 0.0;
            }
        }
        Ok(Self { dim, points })
    }

    pub fn from_2d(points: &[(f64, f64, f64)]) -> Result<Self> {
        Self::new(
            2,
            points
                .iter()
                .map(|&(x, y, w)| WeightedPoint::new_2d(x, y, w))
                .collect(),
        )
    }

    pub fn from_3d(points: &[(f64, f64, f64, f64)]) -> Result<Self> {
        Self::new(
            3,
            points
                .iter()
                .map(|&(x, y, z, w)| WeightedPoint::new_3d(x, y, z, w))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[WeightedPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        let mut acc = Neumaier::default();
        for p in &self.points {
            acc.add(p.weight);
        }
        acc.value()
    }

    /// Copy with every point shifted by `offset`.
    pub fn translated(&self, offset: [f64; 3]) -> Self {
        let points = self
            .points
            .iter()
            .map(|p| {
                let mut c = p.coords;
                for d in 0..self.dim {
                    c[d] += offset[d];
                }
                WeightedPoint {
                    coords: c,
                    weight: p.weight,
                }
            })
            .collect();
        Self {
            dim: self.dim,
            points,
        }
    }
}

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(Error::InvalidDimension(dim))
    }
}

/// Exponent multi-index of a moment: `(p, q)` in 2D, `(p, q, r)` in 3D.
///
/// Ordering is lexicographic on the exponents, which fixes the canonical
/// term order of [`crate::MomentPolynomial`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MomentIndex {
    exps: [u8; 3],
    dim: u8,
}

impl MomentIndex {
    pub fn d2(p: u8, q: u8) -> Self {
        Self {
            exps: [p, q, 0],
            dim: 2,
        }
    }

    pub fn d3(p: u8, q: u8, r: u8) -> Self {
        Self {
            exps: [p, q, r],
            dim: 3,
        }
    }

    pub(crate) fn from_exps(dim: usize, exps: &[u8]) -> Self {
        match dim {
            2 => Self::d2(exps[0], exps[1]),
            _ => Self::d3(exps[0], exps[1], exps[2]),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn exps(&self) -> &[u8] {
        &self.exps[..self.dim as usize]
    }

    pub fn order(&self) -> usize {
        self.exps.iter().map(|&e| e as usize).sum()
    }

    /// Every multi-index of total order `<= max_order`, ordered by total
    /// order, then by descending leading exponents (`20, 11, 02`).
    pub fn all(dim: usize, max_order: usize) -> Vec<MomentIndex> {
        let mut out = Vec::new();
        for o in 0..=max_order as u8 {
            for p in (0..=o).rev() {
                if dim == 2 {
                    out.push(Self::d2(p, o - p));
                } else {
                    for q in (0..=o - p).rev() {
                        out.push(Self::d3(p, q, o - p - q));
                    }
                }
            }
        }
        out
    }

    /// Position of this index in the layout produced by [`MomentIndex::all`].
    fn dense_position(&self) -> usize {
        let o = self.order();
        let p = self.exps[0] as usize;
        if self.dim == 2 {
            o * (o + 1) / 2 + (o - p)
        } else {
            let q = self.exps[1] as usize;
            o * (o + 1) * (o + 2) / 6 + (o - p) * (o - p + 1) / 2 + (o - p - q)
        }
    }
}

impl fmt::Display for MomentIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "mu")?;
        for e in self.exps() {
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Number of multi-indices with total order `<= max_order`.
pub fn moment_count(dim: usize, max_order: usize) -> usize {
    let n = max_order;
    if dim == 2 {
        (n + 1) * (n + 2) / 2
    } else {
        (n + 1) * (n + 2) * (n + 3) / 6
    }
}

/// Dense table of moments up to `max_order`, zeros stored explicitly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentVector {
    dim: usize,
    max_order: usize,
    central: bool,
    values: Vec<f64>,
}

impl MomentVector {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn is_central(&self) -> bool {
        self.central
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Moment value, or `None` when the index exceeds `max_order` or has the wrong dimension.
    pub fn get(&self, idx: MomentIndex) -> Option<f64> {
        if idx.dim() != self.dim || idx.order() > self.max_order {
            return None;
        }
        Some(self.values[idx.dense_position()])
    }

    pub fn m00(&self) -> f64 {
        self.values[0]
    }

    pub fn iter(&self) -> impl Iterator<Item = (MomentIndex, f64)> + '_ {
        MomentIndex::all(self.dim, self.max_order)
            .into_iter()
            .zip(self.values.iter().copied())
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

fn accumulate(ps: &WeightedPointSet, max_order: usize, shift: [f64; 3]) -> Vec<f64> {
    let indices = MomentIndex::all(ps.dim, max_order);
    let mut acc = vec![Neumaier::default(); indices.len()];
    let mut powers = vec![[0.0f64; 3]; max_order + 1];
    for pt in &ps.points {
        if pt.weight == 0.0 {
            continue;
        }
        for d in 0..ps.dim {
            let c = pt.coords[d] - shift[d];
            powers[0][d] = 1.0;
            for k in 1..=max_order {
                powers[k][d] = powers[k - 1][d] * c;
            }
        }
        for (slot, idx) in acc.iter_mut().zip(&indices) {
            let mut term = pt.weight;
            for (d, &e) in idx.exps().iter().enumerate() {
                term *= powers[e as usize][d];
            }
            slot.add(term);
        }
    }
    acc.iter().map(Neumaier::value).collect()
}

/// Raw moments `m = sum_i w_i * prod_d x_{i,d}^{idx_d}` for every index up to `max_order`.
pub fn raw_moments(ps: &WeightedPointSet, max_order: usize) -> Result<MomentVector> {
    if ps.is_empty() {
        return Err(Error::EmptyShape);
    }
    Ok(MomentVector {
        dim: ps.dim,
        max_order,
        central: false,
        values: accumulate(ps, max_order, [0.0; 3]),
    })
}

/// Centroid `(m10/m00, m01/m00[, m001/m00])`.
pub fn centroid(mv: &MomentVector) -> Result<Vec<f64>> {
    if mv.max_order < 1 {
        return Err(Error::InsufficientOrder {
            needed: 1,
            available: mv.max_order,
        });
    }
    let m00 = mv.m00();
    if m00 == 0.0 {
        return Err(Error::ZeroWeight);
    }
    let firsts: Vec<MomentIndex> = if mv.dim == 2 {
        vec![MomentIndex::d2(1, 0), MomentIndex::d2(0, 1)]
    } else {
        vec![
            MomentIndex::d3(1, 0, 0),
            MomentIndex::d3(0, 1, 0),
            MomentIndex::d3(0, 0, 1),
        ]
    };
    Ok(firsts
        .into_iter()
        .map(|i| mv.get(i).unwrap_or(0.0) / m00)
        .collect())
}

/// Central moments: moments of the point set after moving its centroid to the origin.
/// Order-one entries are zero by construction and stored as exact zeros.
pub fn central_moments(ps: &WeightedPointSet, max_order: usize) -> Result<MomentVector> {
    let raw = raw_moments(ps, max_order.max(1))?;
    let c = centroid(&raw)?;
    let mut shift = [0.0; 3];
    shift[..c.len()].copy_from_slice(&c);
    let mut values = accumulate(ps, max_order, shift);
    for idx in MomentIndex::all(ps.dim, max_order.min(1)) {
        if idx.order() == 1 {
            values[idx.dense_position()] = 0.0;
        }
    }
    Ok(MomentVector {
        dim: ps.dim,
        max_order,
        central: true,
        values,
    })
}

/// Central moments carried in double-double precision, indexed like
/// [`MomentIndex::all`]. Used where the moment polynomial is badly
/// conditioned, e.g. affine invariants of strongly sheared shapes.
pub(crate) fn central_moments_extended(
    ps: &WeightedPointSet,
    max_order: usize,
) -> Result<Vec<TwoFloat>> {
    if ps.is_empty() {
        return Err(Error::EmptyShape);
    }
    let dim = ps.dim;
    let mut m0 = TwoFloat::from(0.0);
    let mut first = [TwoFloat::from(0.0); 3];
    for pt in &ps.points {
        m0 += pt.weight;
        for (f, &x) in first[..dim].iter_mut().zip(&pt.coords) {
            *f += TwoFloat::new_mul(pt.weight, x);
        }
    }
    if m0 == 0.0 {
        return Err(Error::ZeroWeight);
    }
    let centroid: Vec<TwoFloat> = first[..dim].iter().map(|&f| f / m0).collect();
    let indices = MomentIndex::all(dim, max_order);
    let mut acc = vec![TwoFloat::from(0.0); indices.len()];
    let mut powers = vec![[TwoFloat::from(0.0); 3]; max_order + 1];
    for pt in &ps.points {
        if pt.weight == 0.0 {
            continue;
        }
        for d in 0..dim {
            let c = pt.coords[d] - centroid[d];
            powers[0][d] = TwoFloat::from(1.0);
            for k in 1..=max_order {
                powers[k][d] = powers[k - 1][d] * c;
            }
        }
        for (slot, idx) in acc.iter_mut().zip(&indices) {
            let mut term = TwoFloat::from(pt.weight);
            for (d, &e) in idx.exps().iter().enumerate() {
                term *= powers[e as usize][d];
            }
            *slot += term;
        }
    }
    for (slot, idx) in acc.iter_mut().zip(&indices) {
        if idx.order() == 1 {
            *slot = TwoFloat::from(0.0);
        }
    }
    Ok(acc)
}

/// Grayscale raster, row-major with row 0 at the top.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    pub pixels: Vec<u16>,
}

/// One point per nonzero pixel at its center, y axis pointing up:
/// pixel `(row r, column c)` of an `H`-row image lands at `(c + 0.5, H - r - 0.5)`.
pub fn load_image_as_pointset(image: &GrayImage) -> WeightedPointSet {
    let h = image.height as f64;
    let points = image
        .pixels
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > 0)
        .map(|(i, &v)| {
            let r = (i / image.width) as f64;
            let c = (i % image.width) as f64;
            WeightedPoint::new_2d(c + 0.5, h - r - 0.5, v as f64)
        })
        .collect();
    WeightedPointSet { dim: 2, points }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn get(mv: &MomentVector, p: u8, q: u8) -> f64 {
        mv.get(MomentIndex::d2(p, q)).unwrap()
    }

    #[test]
    fn raw_single_point_at_origin() {
        let ps = WeightedPointSet::from_2d(&[(0.0, 0.0, 1.0)]).unwrap();
        let mv = raw_moments(&ps, 2).unwrap();
        assert_eq!(mv.len(), 6);
        for (idx, v) in mv.iter() {
            let expect = if idx.order() == 0 { 1.0 } else { 0.0 };
            assert_eq!(v, expect, "{idx}");
        }
    }

    #[test]
    fn raw_single_point_substitution() {
        let ps = WeightedPointSet::from_2d(&[(2.0, 3.0, 1.0)]).unwrap();
        let mv = raw_moments(&ps, 2).unwrap();
        assert_eq!(get(&mv, 1, 0), 2.0);
        assert_eq!(get(&mv, 0, 1), 3.0);
        assert_eq!(get(&mv, 1, 1), 6.0);
    }

    #[test]
    fn raw_symmetric_pair() {
        let ps = WeightedPointSet::from_2d(&[(1.0, 0.0, 1.0), (-1.0, 0.0, 1.0)]).unwrap();
        let mv = raw_moments(&ps, 2).unwrap();
        assert_eq!(get(&mv, 0, 0), 2.0);
        assert_eq!(get(&mv, 1, 0), 0.0);
        assert_eq!(get(&mv, 2, 0), 2.0);
    }

    #[test]
    fn empty_shape_is_rejected() {
        let ps = WeightedPointSet::new(2, vec![]).unwrap();
        assert!(matches!(raw_moments(&ps, 2), Err(Error::EmptyShape)));
        assert!(matches!(central_moments(&ps, 2), Err(Error::EmptyShape)));
    }

    #[test]
    fn centroid_examples() {
        let one = WeightedPointSet::from_2d(&[(2.0, 3.0, 1.0)]).unwrap();
        assert_eq!(
            centroid(&raw_moments(&one, 1).unwrap()).unwrap(),
            vec![2.0, 3.0]
        );

        let mid = WeightedPointSet::from_2d(&[(0.0, 0.0, 1.0), (2.0, 0.0, 1.0)]).unwrap();
        assert_eq!(
            centroid(&raw_moments(&mid, 1).unwrap()).unwrap(),
            vec![1.0, 0.0]
        );

        // (0*1 + 3*2) / 3 = 2
        let weighted = WeightedPointSet::from_2d(&[(0.0, 0.0, 1.0), (3.0, 0.0, 2.0)]).unwrap();
        assert_eq!(
            centroid(&raw_moments(&weighted, 1).unwrap()).unwrap(),
            vec![2.0, 0.0]
        );
    }

    #[test]
    fn centroid_of_weightless_shape() {
        let ps = WeightedPointSet::from_2d(&[(1.0, 1.0, 0.0)]).unwrap();
        let mv = raw_moments(&ps, 1).unwrap();
        assert!(matches!(centroid(&mv), Err(Error::ZeroWeight)));
        assert!(matches!(central_moments(&ps, 2), Err(Error::ZeroWeight)));
    }

    #[test]
    fn central_single_point_anywhere() {
        let ps = WeightedPointSet::from_2d(&[(7.5, -3.25, 2.5)]).unwrap();
        let mv = central_moments(&ps, 3).unwrap();
        for (idx, v) in mv.iter() {
            let expect = if idx.order() == 0 { 2.5 } else { 0.0 };
            assert_eq!(v, expect, "{idx}");
        }
    }

    #[test]
    fn central_pair_and_triangle() {
        let pair = WeightedPointSet::from_2d(&[(1.0, 0.0, 1.0), (-1.0, 0.0, 1.0)]).unwrap();
        let mv = central_moments(&pair, 2).unwrap();
        assert_eq!(get(&mv, 2, 0), 2.0);
        assert_eq!(get(&mv, 0, 2), 0.0);
        assert_eq!(get(&mv, 1, 1), 0.0);

        // Centroid (1/3, 1/3); hand sums: mu20 = 2/3, mu02 = 2/3, mu11 = -1/3.
        let tri = WeightedPointSet::from_2d(&[(0.0, 0.0, 1.0), (1.0, 0.0, 1.0), (0.0, 1.0, 1.0)])
            .unwrap();
        let mv = central_moments(&tri, 2).unwrap();
        assert!((get(&mv, 2, 0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((get(&mv, 0, 2) - 2.0 / 3.0).abs() < 1e-15);
        assert!((get(&mv, 1, 1) + 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(get(&mv, 1, 0), 0.0);
        assert_eq!(get(&mv, 0, 1), 0.0);
    }

    #[test]
    fn dense_layout_matches_enumeration() {
        for dim in [2, 3] {
            for (pos, idx) in MomentIndex::all(dim, 6).into_iter().enumerate() {
                assert_eq!(idx.dense_position(), pos);
            }
            assert_eq!(MomentIndex::all(dim, 6).len(), moment_count(dim, 6));
        }
        assert_eq!(moment_count(2, 3), 10);
    }

    #[test]
    fn three_d_moments() {
        let ps = WeightedPointSet::from_3d(&[(1.0, 2.0, 3.0, 2.0)]).unwrap();
        let mv = raw_moments(&ps, 2).unwrap();
        assert_eq!(mv.get(MomentIndex::d3(1, 1, 1)), None);
        assert_eq!(mv.get(MomentIndex::d3(0, 1, 1)), Some(12.0));
        assert_eq!(mv.get(MomentIndex::d3(0, 0, 2)), Some(18.0));
        assert_eq!(centroid(&mv).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn invalid_inputs() {
        assert!(matches!(
            WeightedPointSet::new(4, vec![]),
            Err(Error::InvalidDimension(4))
        ));
        assert!(matches!(
            WeightedPointSet::from_2d(&[(0.0, 0.0, -1.0)]),
            Err(Error::InvalidWeight(_))
        ));
    }

    #[test]
    fn image_pixel_centers() {
        let img = GrayImage {
            width: 1,
            height: 1,
            maxval: 255,
            pixels: vec![7],
        };
        let ps = load_image_as_pointset(&img);
        assert_eq!(ps.points(), &[WeightedPoint::new_2d(0.5, 0.5, 7.0)]);

        let img = GrayImage {
            width: 2,
            height: 1,
            maxval: 255,
            pixels: vec![1, 1],
        };
        let mv = raw_moments(&load_image_as_pointset(&img), 1).unwrap();
        assert_eq!(mv.m00(), 2.0);
        assert_eq!(centroid(&mv).unwrap(), vec![1.0, 0.5]);

        let blank = GrayImage {
            width: 3,
            height: 2,
            maxval: 255,
            pixels: vec![0; 6],
        };
        let ps = load_image_as_pointset(&blank);
        assert!(matches!(raw_moments(&ps, 1), Err(Error::EmptyShape)));
    }

    #[test]
    fn image_row_axis_points_up() {
        // Top-left pixel of a 2-row image sits at y = 1.5.
        let img = GrayImage {
            width: 2,
            height: 2,
            maxval: 255,
            pixels: vec![5, 0, 0, 0],
        };
        let ps = load_image_as_pointset(&img);
        assert_eq!(ps.points()[0].coords, [0.5, 1.5, 0.0]);
    }
}
