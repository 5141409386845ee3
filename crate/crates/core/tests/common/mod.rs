#![allow(dead_code)]

use htpde::problem::{IndexSet, SolutionTensor, SparseModeIndex, SpatialIndex};
use htpde::tensor::{DimensionTree, HTensor, ModeKey, ProductIndexSet, Transfer};
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gauss(r: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u: f64 = r.gen_range(1e-12..1.0);
    let v: f64 = r.gen_range(0.0..1.0);
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

pub fn random_matrix(r: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| gauss(r))
}

/// Random support: mode 0 draws from 0..20, other modes from 0..8.
pub fn random_support(r: &mut ChaCha8Rng, sizes: &[usize]) -> ProductIndexSet<u32> {
    let pick = |r: &mut ChaCha8Rng, n: usize, max: u32| {
        let mut v: Vec<u32> = Vec::new();
        while v.len() < n {
            let x = r.gen_range(0..max);
            if !v.contains(&x) {
                v.push(x);
            }
        }
        v
    };
    let mode0 = pick(r, sizes[0], 20);
    let modes = sizes[1..].iter().map(|&n| pick(r, n, 8)).collect();
    ProductIndexSet::new(mode0, modes)
}

/// Random tensor with the given mode sizes and ranks bounded by `max_rank`.
pub fn random_htensor_on<K: ModeKey>(r: &mut ChaCha8Rng, support: ProductIndexSet<K>, max_rank: usize) -> HTensor<K> {
    let j = support.j();
    let tree = Arc::new(DimensionTree::linear(j));
    let mut ranks = vec![0usize; tree.num_nodes()];
    for id in 1..tree.num_nodes() {
        ranks[id] = r.gen_range(1..=max_rank);
    }
    ranks[0] = 1;
    let frames = (0..=j).map(|m| random_matrix(r, support.mode_len(m), ranks[tree.leaf(m)])).collect();
    let mut transfers = Vec::new();
    for id in 0..tree.num_nodes() {
        if let Some([a, b]) = tree.node(id).children {
            let dims = [ranks[a], ranks[b], ranks[id]];
            let mut t = Transfer::zeros(dims);
            for x in t.data.iter_mut() {
                *x = gauss(r);
            }
            transfers.push((id, t));
        }
    }
    HTensor::from_parts(tree, support, frames, transfers).unwrap()
}

pub fn random_sizes(r: &mut ChaCha8Rng, j: usize, max_size: usize) -> Vec<usize> {
    (0..=j).map(|_| r.gen_range(1..=max_size)).collect()
}

pub fn random_htensor(r: &mut ChaCha8Rng, j: usize, max_size: usize, max_rank: usize) -> HTensor<u32> {
    let sizes = random_sizes(r, j, max_size);
    let s = random_support(r, &sizes);
    random_htensor_on(r, s, max_rank)
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

/// A random J = 2 instance with a handful of candidate indices outside `Λ`.
pub fn expand_instance(g: &mut impl Rng) -> (SolutionTensor, IndexSet, IndexSet) {
    let n0 = g.gen_range(2..=7);
    let mode0: Vec<SparseModeIndex> = (0..n0).map(|k| SparseModeIndex::spatial(SpatialIndex::new(3, k))).collect();
    let tilde: IndexSet = ProductIndexSet::new(mode0.clone(), vec![(0..g.gen_range(1..=4)).collect(), (0..g.gen_range(1..=4)).collect()]);
    let keep = |g: &mut _, v: &[u32]| -> Vec<u32> {
        let n = rand::Rng::gen_range(g, 1..=v.len());
        v[..n].to_vec()
    };
    let l0: Vec<SparseModeIndex> = mode0.iter().filter(|_| g.gen_bool(0.5)).cloned().collect();
    let l0 = if l0.is_empty() { vec![mode0[0].clone()] } else { l0 };
    let lambda = ProductIndexSet::new(l0, vec![keep(g, &tilde.modes[0]), keep(g, &tilde.modes[1])]);
    let r = random_htensor_on(&mut rng(g.gen()), tilde.clone(), 3);
    (r, lambda, tilde)
}
