//! Checks against values computed independently of the library.

mod common;

use std::collections::{BTreeSet, HashMap};

use gfmi::catalog::find;
use gfmi::discovery::{enumerate_cores, raw_count, EnumerationSpec};
use gfmi::harness::{random_pointset, AffineMap};
use gfmi::independence::{functional_rank, MomentVariableSpace};
use gfmi::moments::central_moments;
use gfmi::{FactorKind, Group, InvariantCore, MomentIndex, MomentPolynomial, WeightedPointSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Sorted (kind, labels) factor list; kind 0 is f and 1 is g.
type Class = Vec<(u8, Vec<u8>)>;

fn mu(ps: &WeightedPointSet, p: u8, q: u8) -> f64 {
    central_moments(ps, 4)
        .unwrap()
        .get(MomentIndex::d2(p, q))
        .unwrap()
}

/// Central moment straight from the definition.
fn direct_mu(ps: &WeightedPointSet, p: i32, q: i32) -> f64 {
    let w: f64 = ps.points().iter().map(|a| a.weight).sum();
    let cx = ps
        .points()
        .iter()
        .map(|a| a.weight * a.coords[0])
        .sum::<f64>()
        / w;
    let cy = ps
        .points()
        .iter()
        .map(|a| a.weight * a.coords[1])
        .sum::<f64>()
        / w;
    ps.points()
        .iter()
        .map(|a| a.weight * (a.coords[0] - cx).powi(p) * (a.coords[1] - cy).powi(q))
        .sum()
}

#[test]
fn unit_triangle_moments() {
    let ps =
        WeightedPointSet::from_2d(&[(0.0, 0.0, 1.0), (1.0, 0.0, 1.0), (0.0, 1.0, 1.0)]).unwrap();
    // Centroid (1/3, 1/3); deviations are -1/3, 2/3, -1/3 in x and -1/3, -1/3, 2/3 in y.
    let expected = [
        (2, 0, 2.0 / 3.0),
        (1, 1, -1.0 / 3.0),
        (0, 2, 2.0 / 3.0),
        (3, 0, 2.0 / 9.0),
        (2, 1, -1.0 / 9.0),
        (1, 2, -1.0 / 9.0),
        (0, 3, 2.0 / 9.0),
    ];
    for (p, q, v) in expected {
        assert!((mu(&ps, p, q) - v).abs() < 1e-14, "mu{p}{q}");
    }
}

#[test]
fn central_moments_match_definition() {
    for seed in 0..10 {
        let ps = random_pointset(2, 25, seed).unwrap();
        for p in 0..=4u8 {
            for q in 0..=4 - p {
                let d = direct_mu(&ps, p as i32, q as i32);
                assert!((mu(&ps, p, q) - d).abs() < 1e-12, "mu{p}{q} seed {seed}");
            }
        }
    }
}

#[test]
fn determinant_square_is_twice_the_primitive() {
    let core = InvariantCore::parse("g(1,2)^2", 2).unwrap();
    for seed in 0..5 {
        let ps = random_pointset(2, 9, seed).unwrap();
        let (sum, _) = common::brute_force_core(&core, &ps);
        let ip3 = direct_mu(&ps, 2, 0) * direct_mu(&ps, 0, 2) - direct_mu(&ps, 1, 1).powi(2);
        assert!(
            (sum - 2.0 * ip3).abs() < 1e-12 * sum.abs(),
            "{sum} vs {}",
            2.0 * ip3
        );
    }
    let e = find("IP3").unwrap();
    assert_eq!(
        e.core.translate(),
        e.reference
            .scale(&num_rational::BigRational::from_integer(2.into()))
    );
}

#[test]
fn doubling_scale_multiplies_mu20_by_sixteen() {
    let ps = random_pointset(2, 12, 3).unwrap();
    let doubled = AffineMap::scale(2, 2.0).apply(&ps).unwrap();
    let ratio = mu(&doubled, 2, 0) / mu(&ps, 2, 0);
    assert!((ratio - 16.0).abs() < 1e-12, "{ratio}");
}

/// Relabeling classes of factor multisets, found by listing every multiset
/// and minimizing its sorted factor list over all label permutations.
fn brute_force_classes(group: Group, max_points: u8, max_count: usize) -> (u128, BTreeSet<Class>) {
    let mut raw = 0u128;
    let mut classes = BTreeSet::new();
    for n in 1..=max_points {
        let mut types: Vec<(u8, Vec<u8>)> = Vec::new();
        for i in 1..=n {
            for j in i..=n {
                if group != Group::Affine {
                    types.push((0, vec![i, j]));
                }
                if j > i {
                    types.push((1, vec![i, j]));
                }
            }
        }
        let max_factors = n as usize * max_count / 2;
        let mut multisets = vec![vec![]];
        for t in 0..types.len() {
            let mut next = Vec::new();
            for m in &multisets {
                for e in 0..=max_factors {
                    let mut m: Vec<usize> = m.clone();
                    m.extend(std::iter::repeat_n(t, e));
                    if m.len() <= max_factors {
                        next.push(m);
                    }
                }
            }
            multisets = next;
        }
        let perms = all_perms(n);
        for m in multisets {
            let mut occ = vec![0usize; n as usize];
            for &t in &m {
                for &a in &types[t].1 {
                    occ[a as usize - 1] += 1;
                }
            }
            if m.is_empty() || occ.iter().any(|&o| o == 0 || o > max_count) {
                continue;
            }
            raw += 1;
            let key = perms
                .iter()
                .map(|p| {
                    let mut k: Vec<(u8, Vec<u8>)> = m
                        .iter()
                        .map(|&t| {
                            let mut a: Vec<u8> =
                                types[t].1.iter().map(|&x| p[x as usize - 1]).collect();
                            a.sort();
                            (types[t].0, a)
                        })
                        .collect();
                    k.sort();
                    k
                })
                .min()
                .unwrap();
            classes.insert(key);
        }
    }
    (raw, classes)
}

fn all_perms(n: u8) -> Vec<Vec<u8>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in all_perms(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n);
            out.push(q);
        }
    }
    out
}

fn library_classes(cores: &[InvariantCore]) -> BTreeSet<Class> {
    cores
        .iter()
        .map(|c| {
            let m: Vec<(u8, Vec<u8>)> = c
                .factors()
                .iter()
                .map(|f| (u8::from(f.kind() == FactorKind::G), f.args().to_vec()))
                .collect();
            let n = c.num_points() as u8;
            all_perms(n)
                .iter()
                .map(|p| {
                    let mut k: Vec<_> = m
                        .iter()
                        .map(|(kind, a)| {
                            let mut a: Vec<u8> = a.iter().map(|&x| p[x as usize - 1]).collect();
                            a.sort();
                            (*kind, a)
                        })
                        .collect();
                    k.sort();
                    k
                })
                .min()
                .unwrap()
        })
        .collect()
}

#[test]
fn enumeration_matches_brute_force() {
    for (group, pts, cnt) in [
        (Group::Affine, 2, 2),
        (Group::Affine, 3, 3),
        (Group::Affine, 4, 2),
        (Group::Similarity, 2, 2),
        (Group::Similarity, 3, 2),
        (Group::Similarity, 3, 3),
    ] {
        let spec = EnumerationSpec::new(group, pts, cnt);
        let (raw, classes) = brute_force_classes(group, pts as u8, cnt);
        assert_eq!(raw_count(&spec).unwrap(), raw, "{group} {pts}/{cnt}");
        let cores = enumerate_cores(&spec).unwrap();
        assert_eq!(cores.len(), classes.len(), "{group} {pts}/{cnt}");
        assert_eq!(library_classes(&cores), classes, "{group} {pts}/{cnt}");
    }
    assert_eq!(brute_force_classes(Group::Affine, 2, 2).1.len(), 2);
}

/// Rank of a central-difference Jacobian, by elimination on unit-scaled rows.
fn finite_difference_rank(invs: &[MomentPolynomial], vars: &[MomentIndex], at: &[f64]) -> usize {
    let eval = |p: &MomentPolynomial, x: &[f64]| {
        let values: HashMap<MomentIndex, f64> =
            vars.iter().copied().zip(x.iter().copied()).collect();
        p.evaluate_with(|m| if m.order() == 0 { 1.0 } else { values[&m] })
    };
    let h = 1e-5;
    let mut rows: Vec<Vec<f64>> = invs
        .iter()
        .map(|p| {
            (0..vars.len())
                .map(|j| {
                    let (mut up, mut down) = (at.to_vec(), at.to_vec());
                    up[j] += h;
                    down[j] -= h;
                    (eval(p, &up) - eval(p, &down)) / (2.0 * h)
                })
                .collect()
        })
        .collect();
    for r in &mut rows {
        let m = r.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if m > 0.0 {
            r.iter_mut().for_each(|v| *v /= m);
        }
    }
    let mut rank = 0;
    for col in 0..vars.len() {
        let Some(piv) =
            (rank..rows.len()).max_by(|&a, &b| rows[a][col].abs().total_cmp(&rows[b][col].abs()))
        else {
            break;
        };
        if rows[piv][col].abs() < 1e-6 {
            continue;
        }
        rows.swap(rank, piv);
        let pivot = rows[rank].clone();
        for r in &mut rows[rank + 1..] {
            let f = r[col] / pivot[col];
            r.iter_mut().zip(&pivot).for_each(|(v, p)| *v -= f * p);
        }
        rank += 1;
    }
    rank
}

#[test]
fn jacobian_rank_matches_finite_differences() {
    let refs = |names: &[&str]| -> Vec<MomentPolynomial> {
        names
            .iter()
            .map(|n| find(n).unwrap().reference.clone())
            .collect()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (order, names, expected) in [
        (2, vec!["I1", "I2", "IP3"], 2),
        (2, vec!["I1", "IP3"], 2),
        (3, vec!["I1", "I2", "I3", "I4", "I5", "I6", "I7"], 6),
        (3, vec!["IP1", "IP2", "IP4", "IP5", "IP6", "IP8"], 6),
    ] {
        let space = MomentVariableSpace::new(Group::Similarity, order).unwrap();
        let invs = refs(&names);
        let at: Vec<f64> = (0..space.len()).map(|_| rng.gen_range(0.2..1.0)).collect();
        let fd = finite_difference_rank(&invs, &space.variables, &at);
        assert_eq!(fd, expected, "{names:?}");
        assert_eq!(
            functional_rank(&invs, &space, 5, 0).unwrap(),
            fd,
            "{names:?}"
        );
    }
}
