//! Worked example instances, parameterized generators and synthetic
//! registration data with hidden ground truth.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::model::{Configuration, EuclideanTransform, Instance, LocalCoords, Solution};
use crate::{seed, Error, Result};

/// Three nodes in the plane, three two-node patches; every local frame is the
/// global frame.
pub fn gen_fig1() -> Instance {
    let truth = [(1, [0.0, 0.0]), (2, [1.0, 0.0]), (3, [1.0, 1.0])];
    let patches = vec![vec![1, 2], vec![2, 3], vec![1, 3]];
    let coords: LocalCoords = patches
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let m = p
                .iter()
                .map(|&k| (k, truth[k - 1].1.to_vec()))
                .collect::<BTreeMap<_, _>>();
            (i + 1, m)
        })
        .collect();
    Instance {
        dimension: 2,
        num_nodes: 3,
        patches,
        local_coords: Some(coords),
    }
}

/// Planar network that is uniquely registrable without being laterated.
pub fn gen_fig2() -> Instance {
    Instance::new(2, 5, vec![vec![1, 2, 3], vec![1, 4, 5], vec![2, 3, 4, 5]])
}

/// Ring of six four-node patches in `R^3`, consecutive patches sharing two
/// nodes. Quasi 4-connected but not uniquely registrable.
pub fn gen_example1() -> Instance {
    let mut inst = gen_ring(6, 4, 2).expect("valid ring parameters");
    inst.dimension = 3;
    inst
}

/// [`gen_example1`] with one extra node private to each patch (nodes 13..=18).
pub fn gen_example2() -> Instance {
    let mut inst = gen_example1();
    let base = inst.num_nodes;
    for (i, p) in inst.patches.iter_mut().enumerate() {
        p.push(base + i + 1);
    }
    inst.num_nodes += inst.patches.len();
    inst
}

/// `m` patches of `s` consecutive nodes arranged in a cycle, consecutive
/// patches sharing `o` nodes; `m·(s - o)` nodes in total. Dimension is set to
/// `o + 1` and can be overridden.
pub fn gen_ring(m: usize, s: usize, o: usize) -> Result<Instance> {
    if m < 3 || o == 0 || o >= s {
        return Err(Error::InvalidParameters(format!(
            "ring needs m >= 3 and 1 <= o < s (got m={m}, s={s}, o={o})"
        )));
    }
    let n = m * (s - o);
    if n < s {
        return Err(Error::InvalidParameters(format!(
            "ring of {m} patches of size {s} with overlap {o} wraps onto itself"
        )));
    }
    let patches = (0..m)
        .map(|i| (0..s).map(|j| (i * (s - o) + j) % n + 1).collect())
        .collect();
    Ok(Instance::new(o + 1, n, patches))
}

/// Random patches covering `n` nodes, each with at least `min_patch` nodes.
///
/// Every node is first dropped into a uniformly chosen patch; each patch is
/// then topped up with random nodes to a size drawn from
/// `min_patch..=min(n, 2·min_patch)`.
pub fn gen_random_cover(
    n: usize,
    m: usize,
    d: usize,
    min_patch: usize,
    seed: u64,
) -> Result<Instance> {
    if d == 0 || m == 0 || min_patch < d + 1 || min_patch > n {
        return Err(Error::InvalidParameters(format!(
            "random cover needs d >= 1, m >= 1 and d+1 <= min_patch <= N \
             (got N={n}, M={m}, d={d}, min_patch={min_patch})"
        )));
    }
    let mut rng = seed::rng(seed);
    let mut sets = vec![BTreeSet::new(); m];
    for k in 1..=n {
        sets[rng.random_range(0..m)].insert(k);
    }
    let max_size = n.min(2 * min_patch);
    let mut pool: Vec<usize> = (1..=n).collect();
    for set in &mut sets {
        let target = rng.random_range(min_patch..=max_size);
        pool.shuffle(&mut rng);
        for &k in &pool {
            if set.len() >= target {
                break;
            }
            set.insert(k);
        }
    }
    let patches = sets.into_iter().map(|s| s.into_iter().collect()).collect();
    Ok(Instance::new(d, n, patches))
}

/// [`gen_example2`] with `d - 3` nodes added to every patch; its body graph is
/// the `(d - 3)`-fold cone over that of Example 2.
pub fn gen_hgraph(d: usize) -> Result<Instance> {
    if d < 3 {
        return Err(Error::InvalidParameters(format!(
            "H-graph family needs d >= 3, got {d}"
        )));
    }
    let mut inst = gen_example2();
    inst.dimension = d;
    for _ in 3..d {
        inst.num_nodes += 1;
        let apex = inst.num_nodes;
        for p in &mut inst.patches {
            p.push(apex);
        }
    }
    Ok(inst)
}

/// Haar-distributed orthogonal matrix (reflections included).
pub fn random_orthogonal<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<f64> {
    if d == 0 {
        return DMatrix::zeros(0, 0);
    }
    let g = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Synthetic registration data: `inst` with local coordinates and the hidden
/// ground truth that generated them.
pub fn synth_reg_instance(inst: &Instance, seed: u64, noise: f64) -> Result<(Instance, Solution)> {
    if inst.local_coords.is_some() {
        return Err(Error::InvalidParameters(
            "instance already carries local coordinates".into(),
        ));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::InvalidParameters(format!(
            "noise must be >= 0, got {noise}"
        )));
    }
    let cg = inst.correspondence_graph()?;
    let d = inst.dimension;
    let mut rng = seed::rng(seed);
    let side = (inst.num_nodes.max(1) as f64).powf(1.0 / d.max(1) as f64);
    let points: Vec<DVector<f64>> = (0..inst.num_nodes)
        .map(|_| DVector::from_fn(d, |_, _| side * rng.random::<f64>()))
        .collect();
    let truth_coords = Configuration::new(d, points)?;
    let transforms: Vec<EuclideanTransform> = (0..inst.num_patches())
        .map(|_| EuclideanTransform {
            q: random_orthogonal(d, &mut rng),
            t: DVector::from_fn(d, |_, _| side * (2.0 * rng.random::<f64>() - 1.0)),
        })
        .collect();
    let mut coords = LocalCoords::new();
    for (i, r) in transforms.iter().enumerate() {
        let inv = r.inverse();
        let m = coords.entry(i + 1).or_default();
        for &k in cg.patch(i) {
            let mut x = inv.apply(truth_coords.point(k));
            if noise > 0.0 {
                x += DVector::from_fn(d, |_, _| noise * rng.sample::<f64, _>(StandardNormal));
            }
            m.insert(k + 1, x.iter().copied().collect());
        }
    }
    let mut out = inst.clone();
    out.local_coords = Some(coords);
    Ok((
        out,
        Solution {
            global_coords: truth_coords,
            transforms,
        },
    ))
}

/// Generator names reachable from the command line.
pub const GENERATORS: &[&str] = &[
    "fig1", "fig2", "example1", "example2", "ring", "random", "hgraph",
];
