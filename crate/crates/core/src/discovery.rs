//! Search for invariants: enumerate products of generating functions within
//! point and occurrence bounds, translate them, drop zeros and duplicates,
//! and keep a functionally independent subset.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::genfun::{relabeled_key, FactorKind, GfFactor, Group, InvariantCore};
use crate::independence::{MomentVariableSpace, RankEstimator, DEFAULT_TRIALS};
use crate::poly::{JsonTerm, MomentPolynomial};

pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Relabeling symmetry is reduced by brute force over all permutations up to this many points.
pub const MAX_CANONICAL_POINTS: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnumerationSpec {
    pub dim: usize,
    pub group: Group,
    /// Maximum number of distinct points (invariant degree).
    pub max_points: usize,
    /// Maximum occurrences of one point (invariant order).
    pub max_count: usize,
    pub max_factors: usize,
    pub require_true_invariants: bool,
    pub budget: u64,
}

impl EnumerationSpec {
    /// A spec for `group` with the factor cap implied by the point and
    /// occurrence bounds, true invariants only, and the default budget.
    pub fn new(group: Group, max_points: usize, max_count: usize) -> Self {
        let dim = if group == Group::Rotation3D { 3 } else { 2 };
        Self {
            dim,
            group,
            max_points,
            max_count,
            max_factors: max_points * max_count / 2,
            require_true_invariants: true,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_points == 0 || self.max_count == 0 || self.max_factors == 0 {
            return Err(Error::InvalidSpec(
                "max_points, max_count and max_factors must all be at least 1".into(),
            ));
        }
        if self.max_points > u8::MAX as usize {
            return Err(Error::InvalidSpec("too many points".into()));
        }
        let expected = match self.group {
            Group::Similarity | Group::Affine => 2,
            Group::Rotation3D => 3,
        };
        if self.dim != expected {
            return Err(Error::InvalidSpec(format!(
                "{} enumeration is defined in {expected}D, got dim {}",
                self.group, self.dim
            )));
        }
        Ok(())
    }

    fn factor_types(&self, n: usize) -> Vec<GfFactor> {
        let n = n as u8;
        let mut out = Vec::new();
        if self.group != Group::Affine {
            for i in 1..=n {
                for j in i..=n {
                    out.push(
                        GfFactor::new(FactorKind::F, &[i, j], self.dim)
                            .expect("valid f")
                            .0,
                    );
                }
            }
        }
        if self.dim == 2 {
            for i in 1..=n {
                for j in i + 1..=n {
                    out.push(GfFactor::new(FactorKind::G, &[i, j], 2).expect("valid g").0);
                }
            }
        } else {
            for i in 1..=n {
                for j in i + 1..=n {
                    for k in j + 1..=n {
                        out.push(
                            GfFactor::new(FactorKind::G, &[i, j, k], 3)
                                .expect("valid g")
                                .0,
                        );
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// Number of factor multisets before relabeling reduction, summed over point counts.
pub fn raw_count(spec: &EnumerationSpec) -> Result<u128> {
    spec.validate()?;
    let mut total = 0u128;
    for n in 1..=spec.max_points {
        let types = spec.factor_types(n);
        // State: occurrences per label and number of factors so far.
        let mut states: HashMap<(Vec<u8>, usize), u128> = HashMap::new();
        states.insert((vec![0; n], 0), 1);
        for t in &types {
            let mut next: HashMap<(Vec<u8>, usize), u128> = HashMap::with_capacity(states.len());
            for ((occ, k), count) in &states {
                let mut occ = occ.clone();
                let mut k = *k;
                loop {
                    *next.entry((occ.clone(), k)).or_insert(0) += count;
                    k += 1;
                    if k > spec.max_factors {
                        break;
                    }
                    let mut ok = true;
                    for &a in t.args() {
                        occ[a as usize - 1] += 1;
                        ok &= occ[a as usize - 1] as usize <= spec.max_count;
                    }
                    if !ok {
                        break;
                    }
                }
            }
            states = next;
        }
        total += states
            .into_iter()
            .filter(|((occ, k), _)| *k > 0 && occ.iter().all(|&o| o > 0))
            .map(|(_, c)| c)
            .sum::<u128>();
    }
    Ok(total)
}

fn permutations(n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut p: Vec<u8> = (1..=n as u8).collect();
    fn rec(k: usize, p: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if k == p.len() {
            out.push(p.clone());
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            rec(k + 1, p, out);
            p.swap(k, i);
        }
    }
    rec(0, &mut p, &mut out);
    out.sort();
    out
}

fn is_canonical(factors: &[GfFactor], perms: &[Vec<u8>]) -> bool {
    perms
        .iter()
        .all(|p| relabeled_key(factors, p).as_slice() >= factors)
}

/// Every core within the spec's bounds, one per relabeling class (for at
/// most [`MAX_CANONICAL_POINTS`] points), ordered by point count then
/// factor list.
pub fn enumerate_cores(spec: &EnumerationSpec) -> Result<Vec<InvariantCore>> {
    let count = raw_count(spec)?;
    if count > spec.budget as u128 {
        return Err(Error::BudgetExceeded {
            count: u64::try_from(count).unwrap_or(u64::MAX),
            budget: spec.budget,
        });
    }
    let mut out = Vec::new();
    for n in 1..=spec.max_points {
        let types = spec.factor_types(n);
        let perms = if n <= MAX_CANONICAL_POINTS {
            permutations(n)
        } else {
            Vec::new()
        };
        let mut walk = Walk {
            spec,
            types: &types,
            perms: &perms,
            occ: vec![0; n],
            stack: Vec::new(),
            out: &mut out,
        };
        walk.descend(0);
    }
    Ok(out)
}

struct Walk<'a> {
    spec: &'a EnumerationSpec,
    types: &'a [GfFactor],
    perms: &'a [Vec<u8>],
    occ: Vec<usize>,
    stack: Vec<GfFactor>,
    out: &'a mut Vec<InvariantCore>,
}

impl Walk<'_> {
    fn descend(&mut self, from: usize) {
        if !self.stack.is_empty()
            && self.occ.iter().all(|&o| o > 0)
            && is_canonical(&self.stack, self.perms)
        {
            let core = InvariantCore::from_factors(self.spec.dim, self.stack.clone(), 1)
                .expect("enumerated cores are well formed");
            self.out.push(core);
        }
        if self.stack.len() == self.spec.max_factors {
            return;
        }
        for (i, t) in self.types.iter().enumerate().skip(from) {
            for &a in t.args() {
                self.occ[a as usize - 1] += 1;
            }
            if t.args()
                .iter()
                .all(|&a| self.occ[a as usize - 1] <= self.spec.max_count)
            {
                self.stack.push(*t);
                self.descend(i);
                self.stack.pop();
            }
            for &a in t.args() {
                self.occ[a as usize - 1] -= 1;
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StageCounts {
    pub raw: u128,
    pub enumerated: usize,
    pub zero: usize,
    pub duplicate: usize,
    pub skew: usize,
    pub candidates: usize,
    pub dependent: usize,
    pub independent: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Elimination {
    pub core: String,
    pub reason: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duplicate_of: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscoveredInvariant {
    /// Position in the ordered candidate list.
    pub candidate_index: usize,
    pub core: String,
    pub degree: usize,
    pub order: usize,
    pub terms: usize,
    pub k: u32,
    pub skew: bool,
    pub polynomial: String,
    pub polynomial_terms: Vec<JsonTerm>,
    #[serde(skip)]
    pub core_value: InvariantCore,
    #[serde(skip)]
    pub canonical: MomentPolynomial,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscoveryReport {
    pub spec: EnumerationSpec,
    pub target: usize,
    pub seed: u64,
    pub trials: usize,
    pub max_independent: usize,
    pub counts: StageCounts,
    pub incomplete: bool,
    pub selected: Vec<DiscoveredInvariant>,
    pub eliminations: Vec<Elimination>,
}

struct Candidate {
    core: InvariantCore,
    label: String,
    canonical: MomentPolynomial,
    degree: usize,
    order: usize,
}

/// Runs the full pipeline: enumerate, translate, drop zeros, order by
/// (order, degree, term count, core text), drop duplicates (the first in
/// that order survives), drop skew cores if requested, then keep the
/// candidates that raise the Jacobian rank, up to `target`.
pub fn discover(spec: &EnumerationSpec, target: usize, seed: u64) -> Result<DiscoveryReport> {
    let raw = raw_count(spec)?;
    let cores = enumerate_cores(spec)?;
    let enumerated = cores.len();
    let mut eliminations = Vec::new();

    let mut candidates = Vec::with_capacity(cores.len());
    let mut zero = 0;
    for core in cores {
        let p = core.translate();
        if p.is_zero() {
            zero += 1;
            eliminations.push(Elimination {
                core: core.to_string(),
                reason: "zero",
                duplicate_of: None,
            });
            continue;
        }
        let (degree, order) = core.degree_order();
        candidates.push(Candidate {
            label: core.to_string(),
            canonical: p.canonical(),
            core,
            degree,
            order,
        });
    }
    candidates.sort_by(|a, b| {
        (a.order, a.degree, a.canonical.term_count(), &a.label).cmp(&(
            b.order,
            b.degree,
            b.canonical.term_count(),
            &b.label,
        ))
    });

    let mut seen: HashMap<MomentPolynomial, usize> = HashMap::new();
    let mut unique = Vec::with_capacity(candidates.len());
    let mut duplicate = 0;
    for c in candidates {
        if let Some(&first) = seen.get(&c.canonical) {
            duplicate += 1;
            let first: &Candidate = &unique[first];
            eliminations.push(Elimination {
                core: c.label.clone(),
                reason: "duplicate",
                duplicate_of: Some(first.label.clone()),
            });
            continue;
        }
        seen.insert(c.canonical.clone(), unique.len());
        unique.push(c);
    }

    let mut skew = 0;
    if spec.require_true_invariants {
        unique.retain(|c| {
            if c.core.is_skew() {
                skew += 1;
                eliminations.push(Elimination {
                    core: c.label.clone(),
                    reason: "skew",
                    duplicate_of: None,
                });
                false
            } else {
                true
            }
        });
    }

    let space = MomentVariableSpace::new(spec.group, spec.max_count.max(2))?;
    let mut est = RankEstimator::new(&space, DEFAULT_TRIALS, seed);
    let mut selected = Vec::new();
    let mut dependent = 0;
    for (i, c) in unique.iter().enumerate() {
        if selected.len() >= target {
            break;
        }
        if est.push_if_independent(&c.canonical)? {
            let p = c.core.translate();
            selected.push(DiscoveredInvariant {
                candidate_index: i,
                core: c.label.clone(),
                degree: c.degree,
                order: c.order,
                terms: p.term_count(),
                k: c.core.normalization_exponent(spec.group)?,
                skew: c.core.is_skew(),
                polynomial: p.to_string(),
                polynomial_terms: p.to_json(),
                core_value: c.core.clone(),
                canonical: c.canonical.clone(),
            });
        } else {
            dependent += 1;
            eliminations.push(Elimination {
                core: c.label.clone(),
                reason: "dependent",
                duplicate_of: None,
            });
        }
    }

    Ok(DiscoveryReport {
        spec: spec.clone(),
        target,
        seed,
        trials: DEFAULT_TRIALS,
        max_independent: space.max_independent_count(),
        counts: StageCounts {
            raw,
            enumerated,
            zero,
            duplicate,
            skew,
            candidates: unique.len(),
            dependent,
            independent: selected.len(),
        },
        incomplete: selected.len() < target,
        selected,
        eliminations,
    })
}
