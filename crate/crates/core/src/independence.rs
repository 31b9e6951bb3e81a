//! Functional independence by Jacobian rank at random generic points.
//!
//! Invariants are polynomials in moments. A set is functionally independent
//! when its Jacobian with respect to the free moments has full row rank at a
//! generic point. Ranks are estimated in floating point at several seeded
//! random points; rows whose pivot lands near the tolerance are re-decided in
//! exact rational arithmetic.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::genfun::Group;
use crate::moments::MomentIndex;
use crate::poly::MomentPolynomial;

pub const DEFAULT_TRIALS: usize = 5;
pub const PIVOT_TOLERANCE: f64 = 1e-9;
const BORDERLINE_FACTOR: f64 = 10.0;

/// The free moment variables for a group and order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MomentVariableSpace {
    pub group: Group,
    pub dim: usize,
    pub max_order: usize,
    pub variables: Vec<MomentIndex>,
}

impl MomentVariableSpace {
    /// Similarity and 3D rotation fix the zeroth moment at 1; the affine
    /// space keeps it as a variable. First-order central moments are zero in
    /// every space and never appear.
    pub fn new(group: Group, max_order: usize) -> Result<Self> {
        if max_order < 2 {
            return Err(Error::InvalidSpec(format!(
                "variable space needs max_order >= 2, got {max_order}"
            )));
        }
        let dim = match group {
            Group::Rotation3D => 3,
            _ => 2,
        };
        let variables = MomentIndex::all(dim, max_order)
            .into_iter()
            .filter(|m| m.order() >= 2 || (m.order() == 0 && group == Group::Affine))
            .collect();
        Ok(Self {
            group,
            dim,
            max_order,
            variables,
        })
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    /// Upper bound on the number of independent invariants: one per free moment.
    pub fn max_independent_count(&self) -> usize {
        self.variables.len()
    }

    fn position(&self, sym: MomentIndex) -> Option<usize> {
        self.variables.iter().position(|&v| v == sym)
    }

    fn is_fixed(&self, sym: MomentIndex) -> bool {
        sym.order() == 0 && self.group != Group::Affine
    }

    fn check(&self, p: &MomentPolynomial) -> Result<()> {
        if p.is_zero() {
            return Ok(());
        }
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: p.dim(),
            });
        }
        match p
            .symbols()
            .into_iter()
            .find(|&s| self.position(s).is_none() && !self.is_fixed(s))
        {
            Some(s) => Err(Error::SymbolOutsideSpace(s.to_string())),
            None => Ok(()),
        }
    }
}

/// Jacobian of `invs` with respect to the space's variables at `at`
/// (one value per variable, in space order).
pub fn jacobian(
    invs: &[MomentPolynomial],
    space: &MomentVariableSpace,
    at: &[f64],
) -> Result<Vec<Vec<f64>>> {
    if at.len() != space.len() {
        return Err(Error::InvalidSpec(format!(
            "assignment has {} values for {} variables",
            at.len(),
            space.len()
        )));
    }
    invs.iter()
        .map(|p| {
            space.check(p)?;
            Ok(Gradient::new(p, space).eval(at))
        })
        .collect()
}

/// Partial derivatives of one polynomial, compiled for fast evaluation.
#[derive(Debug, Clone)]
struct Gradient {
    partials: Vec<(usize, MomentPolynomial, Compiled)>,
}

/// A polynomial as (coefficient, variable positions) pairs. Fixed symbols are folded away.
#[derive(Debug, Clone)]
struct Compiled(Vec<(f64, Vec<usize>)>);

impl Compiled {
    fn new(p: &MomentPolynomial, space: &MomentVariableSpace) -> Self {
        Compiled(
            p.terms()
                .map(|(m, c)| {
                    let vars = m
                        .factors()
                        .iter()
                        .filter_map(|&s| space.position(s))
                        .collect();
                    (crate::poly::rational_to_f64(c), vars)
                })
                .collect(),
        )
    }

    fn eval(&self, at: &[f64]) -> f64 {
        self.0
            .iter()
            .map(|(c, vars)| vars.iter().fold(*c, |acc, &v| acc * at[v]))
            .sum()
    }
}

impl Gradient {
    fn new(p: &MomentPolynomial, space: &MomentVariableSpace) -> Self {
        let partials = p
            .symbols()
            .into_iter()
            .filter_map(|s| space.position(s).map(|col| (col, s)))
            .map(|(col, s)| {
                let d = p.differentiate(s);
                let compiled = Compiled::new(&d, space);
                (col, d, compiled)
            })
            .collect();
        Self { partials }
    }

    fn eval(&self, at: &[f64]) -> Vec<f64> {
        let mut row = vec![0.0; at.len()];
        for (col, _, c) in &self.partials {
            row[*col] = c.eval(at);
        }
        row
    }

    fn eval_exact(&self, at: &[BigRational], space: &MomentVariableSpace) -> Vec<BigRational> {
        let mut row = vec![BigRational::zero(); at.len()];
        for (col, d, _) in &self.partials {
            row[*col] = d.evaluate_exact(|s| match space.position(s) {
                Some(i) => at[i].clone(),
                None => BigRational::one(),
            });
        }
        row
    }
}

/// One random evaluation point with its incrementally reduced row basis.
struct Trial {
    point: Vec<f64>,
    exact_point: Vec<BigRational>,
    /// Reduced rows, each with a unit pivot at the recorded column.
    basis: Vec<(usize, Vec<f64>)>,
    /// Indices (into the estimator's rows) of the rows that raised this trial's rank.
    members: Vec<usize>,
}

fn draw_point(rng: &mut ChaCha8Rng, n: usize) -> (Vec<f64>, Vec<BigRational>) {
    let mut point = Vec::with_capacity(n);
    let mut exact = Vec::with_capacity(n);
    for _ in 0..n {
        let magnitude: f64 = rng.gen_range(0.1..=1.0);
        let negative = rng.gen_bool(0.5);
        point.push(if negative { -magnitude } else { magnitude });
        let num: i64 = rng.gen_range(10..=100);
        let num = if negative { -num } else { num };
        exact.push(BigRational::new(num.into(), 100.into()));
    }
    (point, exact)
}

/// Incremental rank estimator over a fixed set of seeded trial points.
pub struct RankEstimator<'a> {
    space: &'a MomentVariableSpace,
    trials: Vec<Trial>,
    rows: Vec<Gradient>,
    rank: usize,
}

impl<'a> RankEstimator<'a> {
    pub fn new(space: &'a MomentVariableSpace, trials: usize, seed: u64) -> Self {
        let trials = (0..trials.max(1))
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(t as u64);
                let (point, exact_point) = draw_point(&mut rng, space.len());
                Trial {
                    point,
                    exact_point,
                    basis: Vec::new(),
                    members: Vec::new(),
                }
            })
            .collect();
        Self {
            space,
            trials,
            rows: Vec::new(),
            rank: 0,
        }
    }

    /// Current rank: the maximum over trials.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Rank the set would have with `p` added, without adding it.
    pub fn rank_with(&self, p: &MomentPolynomial) -> Result<usize> {
        self.space.check(p)?;
        let g = Gradient::new(p, self.space);
        Ok(self
            .trials
            .iter()
            .map(|t| t.basis.len() + usize::from(self.reduce(t, &g).is_some()))
            .max()
            .unwrap_or(0))
    }

    /// Adds `p` to the set and returns the new rank.
    pub fn push(&mut self, p: &MomentPolynomial) -> Result<usize> {
        self.space.check(p)?;
        let g = Gradient::new(p, self.space);
        let index = self.rows.len();
        let reduced: Vec<Option<(usize, Vec<f64>)>> =
            self.trials.iter().map(|t| self.reduce(t, &g)).collect();
        for (t, r) in self.trials.iter_mut().zip(reduced) {
            if let Some(row) = r {
                t.basis.push(row);
                t.members.push(index);
            }
        }
        self.rows.push(g);
        self.rank = self.trials.iter().map(|t| t.basis.len()).max().unwrap_or(0);
        Ok(self.rank)
    }

    /// Adds `p` only if it raises the rank. Returns whether it was kept.
    pub fn push_if_independent(&mut self, p: &MomentPolynomial) -> Result<bool> {
        let before = self.rank;
        if self.rank_with(p)? > before {
            self.push(p)?;
            Ok(true)
        } else {
            Ok(false)
        }
    }

    /// Reduces the gradient of a candidate against a trial's basis. Returns
    /// the normalized residual row if the candidate is independent there.
    fn reduce(&self, trial: &Trial, g: &Gradient) -> Option<(usize, Vec<f64>)> {
        let mut row = g.eval(&trial.point);
        if !scale_to_unit(&mut row) {
            return None;
        }
        for (pivot, b) in &trial.basis {
            let factor = row[*pivot];
            if factor != 0.0 {
                for (x, y) in row.iter_mut().zip(b) {
                    *x -= factor * y;
                }
            }
        }
        let (col, mag) = argmax_abs(&row);
        if mag < PIVOT_TOLERANCE * BORDERLINE_FACTOR && !self.exact_independent(trial, g) {
            return None;
        }
        if mag == 0.0 {
            // Exact arithmetic says independent but the float residual vanished:
            // the float basis cannot represent this row, so leave the trial as is.
            return None;
        }
        let p = row[col];
        for x in row.iter_mut() {
            *x /= p;
        }
        Some((col, row))
    }

    fn exact_independent(&self, trial: &Trial, g: &Gradient) -> bool {
        let mut m: Vec<Vec<BigRational>> = trial
            .members
            .iter()
            .map(|&i| self.rows[i].eval_exact(&trial.exact_point, self.space))
            .collect();
        let base = exact_rank(m.clone());
        m.push(g.eval_exact(&trial.exact_point, self.space));
        exact_rank(m) > base
    }
}

fn scale_to_unit(row: &mut [f64]) -> bool {
    let (_, mag) = argmax_abs(row);
    if mag == 0.0 || !mag.is_finite() {
        return false;
    }
    for x in row.iter_mut() {
        *x /= mag;
    }
    true
}

fn argmax_abs(row: &[f64]) -> (usize, f64) {
    row.iter().enumerate().fold(
        (0, 0.0),
        |(bi, bv), (i, &x)| if x.abs() > bv { (i, x.abs()) } else { (bi, bv) },
    )
}

/// Rank of a rational matrix by fraction-exact Gaussian elimination.
pub fn exact_rank(mut m: Vec<Vec<BigRational>>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let top = m[rank].clone();
        for row in &mut m[rank + 1..] {
            if row[c].is_zero() {
                continue;
            }
            let f = &row[c] / &top[c];
            for (x, t) in row[c..].iter_mut().zip(&top[c..]) {
                *x -= &f * t;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Floating-point rank with full pivoting, rows pre-scaled to unit max norm.
pub fn numeric_rank(mut m: Vec<Vec<f64>>, tol: f64) -> usize {
    m.retain_mut(|r| scale_to_unit(r));
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    while rank < rows.min(cols) {
        let mut best = (rank, 0, 0.0);
        for (r, row) in m.iter().enumerate().skip(rank) {
            for (c, &x) in row.iter().enumerate() {
                if x.abs() > best.2 {
                    best = (r, c, x.abs());
                }
            }
        }
        if best.2 <= tol {
            break;
        }
        m.swap(rank, best.0);
        let (top, rest) = m.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        let pc = best.1;
        for row in rest.iter_mut() {
            let f = row[pc] / pivot_row[pc];
            if f != 0.0 {
                for (x, y) in row.iter_mut().zip(pivot_row) {
                    *x -= f * y;
                }
            }
            row[pc] = 0.0;
        }
        rank += 1;
    }
    rank
}

/// Maximum Jacobian rank of `invs` over `trials` seeded random points.
pub fn functional_rank(
    invs: &[MomentPolynomial],
    space: &MomentVariableSpace,
    trials: usize,
    seed: u64,
) -> Result<usize> {
    let mut est = RankEstimator::new(space, trials, seed);
    for p in invs {
        est.push(p)?;
    }
    Ok(est.rank())
}

/// Greedy scan: keeps a candidate iff it raises the rank of the kept set.
/// Returns the indices of kept candidates.
pub fn select_independent_subset(
    candidates: &[MomentPolynomial],
    space: &MomentVariableSpace,
    target: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    let mut est = RankEstimator::new(space, trials, seed);
    let mut kept = Vec::new();
    for (i, p) in candidates.iter().enumerate() {
        if kept.len() >= target {
            break;
        }
        if est.push_if_independent(p)? {
            kept.push(i);
        }
    }
    Ok(kept)
}

#[derive(Debug, Clone, Serialize)]
pub struct SpaceSummary {
    pub group: Group,
    pub max_order: usize,
    pub variables: Vec<String>,
}

impl From<&MomentVariableSpace> for SpaceSummary {
    fn from(s: &MomentVariableSpace) -> Self {
        Self {
            group: s.group,
            max_order: s.max_order,
            variables: s.variables.iter().map(|v| v.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Dropped {
    pub name: String,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct IndependenceReport {
    pub set: Vec<String>,
    pub space: SpaceSummary,
    pub max_independent: usize,
    pub trials: usize,
    pub seed: u64,
    pub rank: usize,
    pub independent: bool,
    pub kept: Vec<String>,
    pub dropped: Vec<Dropped>,
}

/// Rank of a named set plus the greedy kept/dropped split, in input order.
pub fn independence_report(
    named: &[(String, MomentPolynomial)],
    space: &MomentVariableSpace,
    trials: usize,
    seed: u64,
) -> Result<IndependenceReport> {
    let polys: Vec<MomentPolynomial> = named.iter().map(|(_, p)| p.clone()).collect();
    let rank = functional_rank(&polys, space, trials, seed)?;
    let kept_idx = select_independent_subset(&polys, space, usize::MAX, trials, seed)?;
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    let mut is_kept = vec![false; named.len()];
    for &i in &kept_idx {
        is_kept[i] = true;
    }
    for (i, (name, p)) in named.iter().enumerate() {
        if is_kept[i] {
            kept.push(name.clone());
        } else {
            let reason = if p.is_zero() {
                "zero polynomial".to_string()
            } else {
                "functionally dependent on earlier kept invariants".to_string()
            };
            dropped.push(Dropped {
                name: name.clone(),
                reason,
            });
        }
    }
    Ok(IndependenceReport {
        set: named.iter().map(|(n, _)| n.clone()).collect(),
        space: space.into(),
        max_independent: space.max_independent_count(),
        trials,
        seed,
        rank,
        independent: rank == named.len(),
        kept,
        dropped,
    })
}
