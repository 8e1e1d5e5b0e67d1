//! Minimal enclosing ball of a point set in `R^N` by Welzl's randomized
//! incremental algorithm with the move-to-front heuristic. The recursion
//! depth is bounded by the support size (at most `N + 2` levels), so large
//! point sets are safe.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Fixed shuffle seed: the ball of a fixed point set is deterministic.
const SHUFFLE_SEED: u64 = 0x6d65_7368;
/// Relative slack in the "outside the current ball" test.
const OUTSIDE_SLACK: f64 = 1e-13;
/// Inflation applied to the returned radius so containment is strict.
pub const RADIUS_INFLATION: f64 = 1e-9;

/// A minimal enclosing ball. `radius` carries the strict-containment
/// inflation `(1 + 1e-9)`; `support` lists the input points that determine
/// the ball (at most `N + 1` of them, all on its boundary pre-inflation).
#[derive(Debug, Clone)]
pub struct EnclosingBall {
    pub center: Vec<f64>,
    pub radius: f64,
    pub support: Vec<usize>,
}

struct Candidate {
    center: Vec<f64>,
    radius_sq: f64,
    support: Vec<usize>,
}

fn point(points: &[f64], dim: usize, i: usize) -> &[f64] {
    &points[i * dim..(i + 1) * dim]
}

fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Smallest ball with all `support` points on its boundary: the circumball
/// of the support simplex, center constrained to its affine hull. Returns
/// `None` when the support is affinely dependent beyond tolerance (the caller
/// then skips the offending push; such a point is within rounding of the
/// boundary anyway).
fn circumball(points: &[f64], dim: usize, support: &[usize]) -> Option<Candidate> {
    let k = support.len();
    if k == 0 {
        return None;
    }
    let q0 = point(points, dim, support[0]);
    if k == 1 {
        return Some(Candidate {
            center: q0.to_vec(),
            radius_sq: 0.0,
            support: support.to_vec(),
        });
    }
    let m = k - 1;
    // Edge vectors from q0; solve G λ = rhs with G_ij = 2 a_i·a_j,
    // rhs_i = |a_i|².
    let mut a = vec![0.0; m * dim];
    for (row, &s) in support[1..].iter().enumerate() {
        let q = point(points, dim, s);
        for d in 0..dim {
            a[row * dim + d] = q[d] - q0[d];
        }
    }
    let mut g = vec![0.0; m * (m + 1)];
    let mut scale: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            let mut dot = 0.0;
            for d in 0..dim {
                dot += a[i * dim + d] * a[j * dim + d];
            }
            g[i * (m + 1) + j] = 2.0 * dot;
            scale = scale.max(2.0 * dot.abs());
        }
        let mut norm_sq = 0.0;
        for d in 0..dim {
            norm_sq += a[i * dim + d] * a[i * dim + d];
        }
        g[i * (m + 1) + m] = norm_sq;
    }
    // Gaussian elimination with partial pivoting.
    for col in 0..m {
        let mut piv = col;
        for r in col + 1..m {
            if g[r * (m + 1) + col].abs() > g[piv * (m + 1) + col].abs() {
                piv = r;
            }
        }
        if g[piv * (m + 1) + col].abs() <= 1e-12 * scale {
            return None;
        }
        if piv != col {
            for cc in 0..=m {
                g.swap(col * (m + 1) + cc, piv * (m + 1) + cc);
            }
        }
        for r in col + 1..m {
            let f = g[r * (m + 1) + col] / g[col * (m + 1) + col];
            for cc in col..=m {
                g[r * (m + 1) + cc] -= f * g[col * (m + 1) + cc];
            }
        }
    }
    let mut lambda = vec![0.0; m];
    for r in (0..m).rev() {
        let mut s = g[r * (m + 1) + m];
        for cc in r + 1..m {
            s -= g[r * (m + 1) + cc] * lambda[cc];
        }
        lambda[r] = s / g[r * (m + 1) + r];
    }
    let mut center = q0.to_vec();
    for i in 0..m {
        for d in 0..dim {
            center[d] += lambda[i] * a[i * dim + d];
        }
    }
    let radius_sq = support
        .iter()
        .map(|&s| dist_sq(&center, point(points, dim, s)))
        .fold(0.0f64, f64::max);
    Some(Candidate {
        center,
        radius_sq,
        support: support.to_vec(),
    })
}

fn move_to_front(
    points: &[f64],
    dim: usize,
    order: &mut Vec<usize>,
    end: usize,
    support: &mut Vec<usize>,
) -> Option<Candidate> {
    let mut ball = circumball(points, dim, support);
    if !support.is_empty() && ball.is_none() {
        // Affinely dependent support: reject this push. The offending point
        // was within rounding of the boundary.
        return None;
    }
    if support.len() == dim + 1 {
        return ball;
    }
    let mut i = 0;
    while i < end {
        let p_idx = order[i];
        let p = point(points, dim, p_idx);
        let outside = match &ball {
            None => true,
            Some(b) => dist_sq(&b.center, p) > b.radius_sq * (1.0 + OUTSIDE_SLACK),
        };
        if outside {
            support.push(p_idx);
            if let Some(better) = move_to_front(points, dim, order, i, support) {
                ball = Some(better);
            }
            support.pop();
            let moved = order.remove(i);
            order.insert(0, moved);
        }
        i += 1;
    }
    ball
}

/// Minimal enclosing ball of `count = points.len() / dim` points given as a
/// flat coordinate array. The returned radius includes the `1 + 1e-9`
/// inflation so that every input point is strictly inside.
pub fn enclosing_ball(points: &[f64], dim: usize) -> Result<EnclosingBall> {
    if dim == 0 || points.len() % dim != 0 {
        return Err(Error::domain(format!(
            "coordinate array length {} is not a multiple of the dimension {dim}",
            points.len()
        )));
    }
    let count = points.len() / dim;
    if count == 0 {
        return Err(Error::domain("enclosing ball of an empty point set"));
    }
    if points.iter().any(|c| !c.is_finite()) {
        return Err(Error::domain("enclosing ball of non-finite coordinates"));
    }

    let mut order: Vec<usize> = (0..count).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(SHUFFLE_SEED);
    order.shuffle(&mut rng);

    let mut support = Vec::with_capacity(dim + 1);
    let ball = move_to_front(points, dim, &mut order, count, &mut support)
        .expect("nonempty point set always yields a ball");

    // Containment sanity check before inflating.
    let r_tol = ball.radius_sq * (1.0 + 1e-12) + f64::MIN_POSITIVE;
    for i in 0..count {
        let d2 = dist_sq(&ball.center, point(points, dim, i));
        if d2 > r_tol * (1.0 + 1e-10) {
            return Err(Error::domain(format!(
                "enclosing ball verification failed: point {i} lies outside by {:e}",
                d2.sqrt() - ball.radius_sq.sqrt()
            )));
        }
    }

    let mut support = ball.support;
    support.sort_unstable();
    Ok(EnclosingBall {
        center: ball.center,
        radius: ball.radius_sq.sqrt() * (1.0 + RADIUS_INFLATION),
        support,
    })
}
