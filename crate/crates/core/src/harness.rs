//! Numerical registration solver and empirical uniqueness probe.
//!
//! Stitching grows the solution over the patch-overlap graph from a random
//! root, always placing next the frontier patch with the most nodes already
//! placed. Each patch is Procrustes-aligned onto those nodes; when they do
//! not pin the transform down (fewer than `d + 1`, or affinely degenerate)
//! the free part is filled with a random orthogonal completion. Refinement
//! alternates per-patch alignment with node averaging, and a short
//! Levenberg–Marquardt run polishes the result to machine precision.
//! Attempts that stall in a local minimum are restarted from a fresh seed.
//!
//! On a flexible instance the random completions land in different basins,
//! so repeated solves expose non-congruent exact solutions.

use std::ops::{AddAssign, SubAssign};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::instances::random_orthogonal;
use crate::model::{
    affine_rank, configs_congruent, Configuration, EuclideanTransform, Instance, Solution,
    DEGENERACY_TOL,
};
use crate::{seed, Error, Result};

/// Orthogonal Procrustes: the transform minimizing `Σ |T(src_j) - dst_j|²`.
/// With `allow_reflection == false` the result is a proper rotation.
pub fn align(
    src: &[DVector<f64>],
    dst: &[DVector<f64>],
    allow_reflection: bool,
) -> Result<EuclideanTransform> {
    if src.is_empty() {
        return Err(Error::EmptyInput);
    }
    if src.len() != dst.len() {
        return Err(Error::VertexCountMismatch(src.len(), dst.len()));
    }
    let d = src[0].len();
    if let Some(p) = src.iter().chain(dst).find(|p| p.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: p.len(),
        });
    }
    let cs = centroid(src);
    let cd = centroid(dst);
    let mut h = DMatrix::zeros(d, d);
    for (s, t) in src.iter().zip(dst) {
        h += (s - &cs) * (t - &cd).transpose();
    }
    let svd = h.svd(true, true);
    let u = svd.u.expect("u requested");
    let v = svd.v_t.expect("v_t requested").transpose();
    let mut q = &v * u.transpose();
    if !allow_reflection && q.determinant() < 0.0 {
        let mut v = v;
        // singular values are sorted descending; flip the weakest direction
        v.column_mut(d - 1).neg_mut();
        q = &v * u.transpose();
    }
    let t = &cd - &q * &cs;
    Ok(EuclideanTransform { q, t })
}

fn centroid(points: &[DVector<f64>]) -> DVector<f64> {
    points
        .iter()
        .fold(DVector::zeros(points[0].len()), |acc, p| acc + p)
        / points.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveConfig {
    pub max_iterations: usize,
    /// Stop refining once the relative change of the global coordinates
    /// drops below this.
    pub rel_change_tol: f64,
    /// Converged when the residual is below this times the diameter.
    pub residual_tol: f64,
    /// Independent stitch-and-refine attempts before giving up.
    pub restarts: usize,
    /// Levenberg–Marquardt steps after the alternating phase; 0 disables.
    pub polish_steps: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            rel_change_tol: 1e-10,
            residual_tol: 1e-6,
            restarts: 16,
            polish_steps: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub solution: Solution,
    /// Maximum of `|x_k - R_i(x_{k,i})|` over all incidences.
    pub residual: f64,
    pub iterations: usize,
    pub attempts: usize,
    pub converged: bool,
    /// Connected components of the patch-overlap graph; each is solved in
    /// its own frame.
    pub components: usize,
}

struct Problem {
    d: usize,
    n: usize,
    /// `(node, local point)` per patch; node is 0-based.
    patches: Vec<Vec<(usize, DVector<f64>)>>,
    node_patches: Vec<Vec<usize>>,
}

impl Problem {
    fn new(inst: &Instance) -> Result<Self> {
        if inst.local_coords.is_none() {
            return Err(Error::MissingCoordinates);
        }
        let cg = inst.correspondence_graph()?;
        let d = inst.dimension;
        let mut patches = Vec::with_capacity(inst.num_patches());
        for i in 0..inst.num_patches() {
            if cg.patch(i).len() < d + 1 {
                return Err(Error::MalformedInstance(format!(
                    "patch {} has {} nodes, registration needs at least {}",
                    i + 1,
                    cg.patch(i).len(),
                    d + 1
                )));
            }
            let mut pts = Vec::with_capacity(cg.patch(i).len());
            for &k in cg.patch(i) {
                let x = inst.local_point(i + 1, k + 1).ok_or_else(|| {
                    Error::MalformedInstance(format!(
                        "missing coordinates for node {} in patch {}",
                        k + 1,
                        i + 1
                    ))
                })?;
                if x.len() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: x.len(),
                    });
                }
                pts.push((k, x));
            }
            patches.push(pts);
        }
        if let Some(k) = (0..inst.num_nodes).find(|&k| cg.patches_of(k).is_empty()) {
            return Err(Error::MalformedInstance(format!(
                "node {} is in no patch",
                k + 1
            )));
        }
        Ok(Self {
            d,
            n: inst.num_nodes,
            patches,
            node_patches: (0..inst.num_nodes)
                .map(|k| cg.patches_of(k).to_vec())
                .collect(),
        })
    }

    fn overlap_neighbors(&self, i: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.patches[i]
            .iter()
            .flat_map(|(k, _)| self.node_patches[*k].iter().copied())
            .filter(|&j| j != i)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    fn residual(&self, x: &[DVector<f64>], r: &[EuclideanTransform]) -> f64 {
        let mut worst = 0.0_f64;
        for (i, pts) in self.patches.iter().enumerate() {
            for (k, p) in pts {
                worst = worst.max((&x[*k] - r[i].apply(p)).norm());
            }
        }
        worst
    }

    /// Places patches outward from a random root, one overlap-graph frontier
    /// patch at a time; returns transforms, node positions and component count.
    fn stitch(
        &self,
        rng: &mut rand_chacha::ChaCha8Rng,
    ) -> (Vec<EuclideanTransform>, Vec<DVector<f64>>, usize) {
        use rand::Rng;
        let m = self.patches.len();
        let mut transforms: Vec<Option<EuclideanTransform>> = vec![None; m];
        let mut placed: Vec<Option<DVector<f64>>> = vec![None; self.n];
        let mut components = 0;
        loop {
            let remaining: Vec<usize> = (0..m).filter(|&i| transforms[i].is_none()).collect();
            if remaining.is_empty() {
                break;
            }
            components += 1;
            let root = remaining[rng.random_range(0..remaining.len())];
            self.place(
                root,
                EuclideanTransform::identity(self.d),
                &mut transforms,
                &mut placed,
            );
            let mut frontier: Vec<usize> = self.overlap_neighbors(root);
            while !frontier.is_empty() {
                // Most already-placed nodes first; random among ties.
                let score = |j: usize| {
                    self.patches[j]
                        .iter()
                        .filter(|(k, _)| placed[*k].is_some())
                        .count()
                };
                let best = frontier.iter().map(|&j| score(j)).max().expect("nonempty");
                let ties: Vec<usize> = frontier
                    .iter()
                    .copied()
                    .filter(|&j| score(j) == best)
                    .collect();
                let j = ties[rng.random_range(0..ties.len())];
                let t = self.stitch_one(j, &placed, rng);
                self.place(j, t, &mut transforms, &mut placed);
                frontier.retain(|&f| f != j);
                for nb in self.overlap_neighbors(j) {
                    if transforms[nb].is_none() && !frontier.contains(&nb) {
                        frontier.push(nb);
                    }
                }
            }
        }
        let x = placed
            .into_iter()
            .map(|p| p.expect("every node covered"))
            .collect();
        (
            transforms.into_iter().map(|t| t.expect("placed")).collect(),
            x,
            components,
        )
    }

    fn place(
        &self,
        i: usize,
        t: EuclideanTransform,
        transforms: &mut [Option<EuclideanTransform>],
        placed: &mut [Option<DVector<f64>>],
    ) {
        for (k, p) in &self.patches[i] {
            if placed[*k].is_none() {
                placed[*k] = Some(t.apply(p));
            }
        }
        transforms[i] = Some(t);
    }

    /// Aligns patch `j` to its already placed nodes, completing any
    /// undetermined directions with a random orthogonal map.
    fn stitch_one(
        &self,
        j: usize,
        placed: &[Option<DVector<f64>>],
        rng: &mut rand_chacha::ChaCha8Rng,
    ) -> EuclideanTransform {
        let d = self.d;
        let (src, dst): (Vec<DVector<f64>>, Vec<DVector<f64>>) = self.patches[j]
            .iter()
            .filter_map(|(k, p)| placed[*k].as_ref().map(|g| (p.clone(), g.clone())))
            .unzip();
        let base = align(&src, &dst, true).expect("overlap neighbours share a placed node");
        let rank = affine_rank(&dst, DEGENERACY_TOL);
        if src.len() > d && rank == d {
            return base;
        }
        // Fix the span of the placed targets, randomize its orthogonal complement.
        let c = centroid(&dst);
        let centered = DMatrix::from_columns(&dst.iter().map(|p| p - &c).collect::<Vec<_>>());
        let basis = full_left_basis(&centered, d);
        let free = basis.columns(rank, d - rank).into_owned();
        let fixed = basis.columns(0, rank).into_owned();
        let w = &fixed * fixed.transpose()
            + &free * random_orthogonal(d - rank, rng) * free.transpose();
        // x -> c + W (base(x) - c)
        EuclideanTransform {
            q: &w * &base.q,
            t: &w * (&base.t - &c) + &c,
        }
    }

    fn refine(
        &self,
        mut transforms: Vec<EuclideanTransform>,
        mut x: Vec<DVector<f64>>,
        cfg: &SolveConfig,
    ) -> (Vec<EuclideanTransform>, Vec<DVector<f64>>, f64, usize) {
        let mut best_res = self.residual(&x, &transforms);
        let mut best = (transforms.clone(), x.clone());
        let mut iterations = 0;
        for _ in 0..cfg.max_iterations {
            iterations += 1;
            for (i, pts) in self.patches.iter().enumerate() {
                let (src, dst): (Vec<_>, Vec<_>) =
                    pts.iter().map(|(k, p)| (p.clone(), x[*k].clone())).unzip();
                transforms[i] = align(&src, &dst, true).expect("nonempty patch");
            }
            let mut sums = vec![DVector::zeros(self.d); self.n];
            let mut counts = vec![0usize; self.n];
            for (i, pts) in self.patches.iter().enumerate() {
                for (k, p) in pts {
                    sums[*k] += transforms[i].apply(p);
                    counts[*k] += 1;
                }
            }
            let new_x: Vec<DVector<f64>> = sums
                .into_iter()
                .zip(&counts)
                .map(|(s, &c)| s / c as f64)
                .collect();
            let change: f64 = new_x
                .iter()
                .zip(&x)
                .map(|(a, b)| (a - b).norm_squared())
                .sum::<f64>()
                .sqrt();
            let c = centroid(&new_x);
            let scale: f64 = new_x
                .iter()
                .map(|p| (p - &c).norm_squared())
                .sum::<f64>()
                .sqrt();
            x = new_x;
            let res = self.residual(&x, &transforms);
            if res < best_res {
                best_res = res;
                best = (transforms.clone(), x.clone());
            }
            if change <= cfg.rel_change_tol * scale.max(f64::MIN_POSITIVE) {
                break;
            }
        }
        (best.0, best.1, best_res, iterations)
    }
}

impl Problem {
    fn cost(&self, x: &[DVector<f64>], r: &[EuclideanTransform]) -> f64 {
        self.patches
            .iter()
            .enumerate()
            .flat_map(|(i, pts)| {
                pts.iter()
                    .map(move |(k, p)| (&x[*k] - r[i].apply(p)).norm_squared())
            })
            .sum()
    }

    /// Levenberg–Marquardt on the stacked residuals `x_k - Q_i p - t_i`.
    /// Node blocks are eliminated through the Schur complement, leaving one
    /// `p × p` block per patch with `p = d(d-1)/2 + d`.
    fn polish(
        &self,
        mut transforms: Vec<EuclideanTransform>,
        mut x: Vec<DVector<f64>>,
        max_steps: usize,
    ) -> (Vec<EuclideanTransform>, Vec<DVector<f64>>, usize) {
        let d = self.d;
        let m = self.patches.len();
        let rot: Vec<(usize, usize)> = (0..d)
            .flat_map(|a| (a + 1..d).map(move |b| (a, b)))
            .collect();
        let p = rot.len() + d;
        let degree: Vec<f64> = self.node_patches.iter().map(|ps| ps.len() as f64).collect();
        let mut lambda = 1e-3;
        let mut cost = self.cost(&x, &transforms);
        let mut steps = 0;
        while steps < max_steps && cost > 0.0 {
            steps += 1;
            // A[i][j]: d × p Jacobian block of residual (node, patch i) w.r.t. patch i.
            let blocks: Vec<Vec<DMatrix<f64>>> = self
                .patches
                .iter()
                .enumerate()
                .map(|(i, pts)| {
                    pts.iter()
                        .map(|(_, pt)| {
                            let mut a = DMatrix::zeros(d, p);
                            for (c, &(u, v)) in rot.iter().enumerate() {
                                // E_uv x = e_u x_v - e_v x_u
                                let mut ex = DVector::zeros(d);
                                ex[u] = pt[v];
                                ex[v] = -pt[u];
                                a.set_column(c, &(-(&transforms[i].q * ex)));
                            }
                            for c in 0..d {
                                a[(c, rot.len() + c)] = -1.0;
                            }
                            a
                        })
                        .collect()
                })
                .collect();
            let residuals: Vec<Vec<DVector<f64>>> = self
                .patches
                .iter()
                .enumerate()
                .map(|(i, pts)| {
                    pts.iter()
                        .map(|(k, pt)| &x[*k] - transforms[i].apply(pt))
                        .collect()
                })
                .collect();
            let mut h = vec![DVector::zeros(d); self.n];
            for (i, pts) in self.patches.iter().enumerate() {
                for (j, (k, _)) in pts.iter().enumerate() {
                    h[*k] += &residuals[i][j];
                }
            }
            loop {
                let mut s = DMatrix::zeros(m * p, m * p);
                let mut rhs = DVector::zeros(m * p);
                // node k -> list of (patch, block index)
                let mut incid: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.n];
                for (i, pts) in self.patches.iter().enumerate() {
                    let mut u = DMatrix::identity(p, p) * lambda;
                    let mut g = DVector::zeros(p);
                    for (j, (k, _)) in pts.iter().enumerate() {
                        let a = &blocks[i][j];
                        u += a.transpose() * a;
                        g += a.transpose() * &residuals[i][j];
                        rhs.rows_mut(i * p, p).axpy(
                            1.0 / (degree[*k] + lambda),
                            &(a.transpose() * &h[*k]),
                            1.0,
                        );
                        incid[*k].push((i, j));
                    }
                    s.view_mut((i * p, i * p), (p, p)).add_assign(&u);
                    rhs.rows_mut(i * p, p).axpy(-1.0, &g, 1.0);
                }
                for (k, inc) in incid.iter().enumerate() {
                    let w = 1.0 / (degree[k] + lambda);
                    for &(i, a) in inc {
                        for &(j, b) in inc {
                            let blk = blocks[i][a].transpose() * &blocks[j][b] * w;
                            s.view_mut((i * p, j * p), (p, p)).sub_assign(&blk);
                        }
                    }
                }
                let Some(delta) = s
                    .clone()
                    .cholesky()
                    .map(|c| c.solve(&rhs))
                    .or_else(|| s.lu().solve(&rhs))
                else {
                    lambda *= 10.0;
                    if lambda > 1e12 {
                        return (transforms, x, steps);
                    }
                    continue;
                };
                let mut new_t = transforms.clone();
                for (i, t) in new_t.iter_mut().enumerate() {
                    let di = delta.rows(i * p, p);
                    let mut skew = DMatrix::identity(d, d);
                    for (c, &(u, v)) in rot.iter().enumerate() {
                        skew[(u, v)] += di[c];
                        skew[(v, u)] -= di[c];
                    }
                    t.q = nearest_orthogonal(&(&t.q * skew));
                    t.t += di.rows(rot.len(), d);
                }
                let mut new_x = x.clone();
                for (k, inc) in incid.iter().enumerate() {
                    let mut acc = -&h[k];
                    for &(i, a) in inc {
                        acc -= &blocks[i][a] * delta.rows(i * p, p);
                    }
                    new_x[k] += acc / (degree[k] + lambda);
                }
                let new_cost = self.cost(&new_x, &new_t);
                if new_cost < cost {
                    let gain = cost - new_cost;
                    transforms = new_t;
                    x = new_x;
                    cost = new_cost;
                    lambda = (lambda / 3.0).max(1e-12);
                    if gain <= 1e-30 * (1.0 + cost) || cost < 1e-28 {
                        return (transforms, x, steps);
                    }
                    break;
                }
                lambda *= 4.0;
                if lambda > 1e12 {
                    return (transforms, x, steps);
                }
            }
        }
        (transforms, x, steps)
    }
}

fn nearest_orthogonal(m: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = m.clone().svd(true, true);
    svd.u.expect("u requested") * svd.v_t.expect("v_t requested")
}

/// Orthonormal basis of `R^d` whose leading columns span the column space of `m`.
fn full_left_basis(m: &DMatrix<f64>, d: usize) -> DMatrix<f64> {
    if m.ncols() == 0 {
        return DMatrix::identity(d, d);
    }
    // Pad with zero columns so the SVD returns a full square U.
    let padded = DMatrix::from_fn(d, m.ncols().max(d), |r, c| {
        if c < m.ncols() {
            m[(r, c)]
        } else {
            0.0
        }
    });
    padded.svd(true, false).u.expect("u requested")
}

/// Solves the registration system for an instance with local coordinates.
pub fn solve_registration(inst: &Instance, seed: u64, cfg: &SolveConfig) -> Result<SolveReport> {
    let problem = Problem::new(inst)?;
    let mut best: Option<SolveReport> = None;
    for attempt in 0..cfg.restarts.max(1) {
        let mut rng = seed::rng(seed::derive(seed, attempt as u64));
        let (t0, x0, components) = problem.stitch(&mut rng);
        let (transforms, x, _, iterations) = problem.refine(t0, x0, cfg);
        let (transforms, x, _) = problem.polish(transforms, x, cfg.polish_steps);
        let residual = problem.residual(&x, &transforms);
        let global_coords = Configuration::new(problem.d, x)?;
        let converged =
            residual <= cfg.residual_tol * global_coords.diameter().max(f64::MIN_POSITIVE);
        let report = SolveReport {
            solution: Solution {
                global_coords,
                transforms,
            },
            residual,
            iterations,
            attempts: attempt + 1,
            converged,
            components,
        };
        if best.as_ref().is_none_or(|b| report.residual < b.residual) {
            best = Some(SolveReport {
                attempts: attempt + 1,
                ..report
            });
        }
        if converged {
            break;
        }
    }
    let mut best = best.expect("at least one attempt");
    best.attempts = best.attempts.max(1);
    Ok(best)
}

/// Congruence tolerance used by the probe, as a multiple of its residual tolerance.
pub const PROBE_CONGRUENCE_FACTOR: f64 = 1e3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// Trial indices of the two non-congruent solutions.
    pub trials: (usize, usize),
    /// Largest pairwise-distance discrepancy between them.
    pub max_distance_gap: f64,
    pub configurations: (Configuration, Configuration),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub trials: usize,
    pub solutions_found: usize,
    pub pairwise_congruent: bool,
    pub witness: Option<Witness>,
    pub residuals: Vec<f64>,
}

/// Solves `trials` times with independent seeds, keeps solutions whose
/// residual is below `tol` times their diameter, and looks for a
/// non-congruent pair among them.
pub fn probe_uniqueness(
    inst: &Instance,
    trials: usize,
    seed: u64,
    tol: f64,
    cfg: &SolveConfig,
) -> Result<ProbeReport> {
    let mut kept: Vec<(usize, Configuration)> = Vec::new();
    let mut residuals = Vec::with_capacity(trials);
    let cfg = SolveConfig {
        residual_tol: tol,
        ..*cfg
    };
    for t in 0..trials {
        let rep = solve_registration(inst, seed::derive(seed, 0x9e0be + t as u64), &cfg)?;
        residuals.push(rep.residual);
        if rep.converged {
            kept.push((t, rep.solution.global_coords));
        }
    }
    let ctol = PROBE_CONGRUENCE_FACTOR * tol;
    let mut witness = None;
    'outer: for a in 0..kept.len() {
        for b in a + 1..kept.len() {
            let (x, y) = (&kept[a].1, &kept[b].1);
            if !configs_congruent(x, y, ctol)?.0 {
                witness = Some(Witness {
                    trials: (kept[a].0, kept[b].0),
                    max_distance_gap: max_distance_gap(x, y),
                    configurations: (x.clone(), y.clone()),
                });
                break 'outer;
            }
        }
    }
    Ok(ProbeReport {
        trials,
        solutions_found: kept.len(),
        pairwise_congruent: witness.is_none(),
        witness,
        residuals,
    })
}

fn max_distance_gap(x: &Configuration, y: &Configuration) -> f64 {
    let mut gap = 0.0_f64;
    for u in 0..x.len() {
        for v in u + 1..x.len() {
            gap = gap.max((x.distance(u, v) - y.distance(u, v)).abs());
        }
    }
    gap
}
