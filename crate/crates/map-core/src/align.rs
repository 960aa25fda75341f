//! Time alignment of a reproduction onto its demonstration.
//!
//! Reproductions rarely share the demonstration's timing, so the pair is
//! aligned with dynamic time warping on the goal-relative position signal
//! before any model comparison. The warped reproduction is resampled onto
//! the demonstration's sample grid; where the path maps several
//! reproduction samples to one demonstration sample they are averaged.

use alloc::vec;
use alloc::vec::Vec;

// Float method calls resolve inherently instead when a test build
// links std into the graph; the import must stay for no_std builds.
#[allow(unused_imports)]
use num_traits::Float;

use crate::quat::Quat;
use crate::trajectory::Trajectory;

/// Which trajectory of a pair an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Demonstration,
    Reproduction,
}

impl core::fmt::Display for Side {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Side::Demonstration => "demonstration",
            Side::Reproduction => "reproduction",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlignError {
    /// A position signal had no samples.
    EmptySignal,
    /// Trajectory is not goal-relative: its final sample sits farther from
    /// the origin than the accepted tolerance.
    NotGoalRelative { side: Side, distance: f64 },
    /// Warping was disabled but the trajectories differ in length.
    LengthMismatch { demo: usize, rep: usize },
}

impl core::fmt::Display for AlignError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            AlignError::EmptySignal => f.write_str("cannot align an empty signal"),
            AlignError::NotGoalRelative { side, distance } => write!(
                f,
                "{} is not goal-relative: final sample is {:.6} from the origin",
                side, distance
            ),
            AlignError::LengthMismatch { demo, rep } => write!(
                f,
                "warping disabled but lengths differ: demonstration {}, reproduction {}",
                demo, rep
            ),
        }
    }
}

impl core::error::Error for AlignError {}

/// Demonstration and reproduction on a common sample grid, as model inputs
/// `[t, x, y, z, qw, qx, qy, qz]` and wrench rows `[fx..tz]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedPair {
    demo_inputs: Vec<[f64; 8]>,
    demo_wrench: Vec<[f64; 6]>,
    rep_inputs: Vec<[f64; 8]>,
    rep_wrench: Vec<[f64; 6]>,
}

impl AlignedPair {
    /// Samples per side (both sides always match).
    pub fn len(&self) -> usize {
        self.demo_inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.demo_inputs.is_empty()
    }

    pub fn demo_inputs(&self) -> &[[f64; 8]] {
        &self.demo_inputs
    }

    pub fn demo_wrench(&self) -> &[[f64; 6]] {
        &self.demo_wrench
    }

    pub fn rep_inputs(&self) -> &[[f64; 8]] {
        &self.rep_inputs
    }

    pub fn rep_wrench(&self) -> &[[f64; 6]] {
        &self.rep_wrench
    }
}

#[inline]
fn euclidean(a: [f64; 3], b: [f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Dynamic time warping over two position signals with Euclidean local
/// cost and the full window. Returns the monotone warping path from
/// `(0, 0)` to `(n-1, m-1)` and the accumulated cost along it.
///
/// Backtracking is deterministic: on cost ties the diagonal step wins,
/// then the step advancing the first signal.
pub fn dtw_path(
    a: &[[f64; 3]],
    b: &[[f64; 3]],
) -> Result<(Vec<(usize, usize)>, f64), AlignError> {
    if a.is_empty() || b.is_empty() {
        return Err(AlignError::EmptySignal);
    }
    let (n, m) = (a.len(), b.len());
    let mut acc = vec![0.0f64; n * m];
    for i in 0..n {
        for j in 0..m {
            let c = euclidean(a[i], b[j]);
            let best = match (i, j) {
                (0, 0) => 0.0,
                (0, _) => acc[j - 1],
                (_, 0) => acc[(i - 1) * m],
                _ => {
                    let diag = acc[(i - 1) * m + (j - 1)];
                    let up = acc[(i - 1) * m + j];
                    let left = acc[i * m + (j - 1)];
                    diag.min(up).min(left)
                }
            };
            acc[i * m + j] = c + best;
        }
    }

    let mut path = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (n - 1, m - 1);
    path.push((i, j));
    while i > 0 || j > 0 {
        let (ni, nj) = match (i, j) {
            (0, _) => (0, j - 1),
            (_, 0) => (i - 1, 0),
            _ => {
                let diag = acc[(i - 1) * m + (j - 1)];
                let up = acc[(i - 1) * m + j];
                let left = acc[i * m + (j - 1)];
                if diag <= up && diag <= left {
                    (i - 1, j - 1)
                } else if up <= left {
                    (i - 1, j)
                } else {
                    (i, j - 1)
                }
            }
        };
        i = ni;
        j = nj;
        path.push((i, j));
    }
    path.reverse();
    Ok((path, acc[(n - 1) * m + (m - 1)]))
}

/// Accumulated warping cost between two position signals.
pub fn dtw_distance(a: &[[f64; 3]], b: &[[f64; 3]]) -> Result<f64, AlignError> {
    dtw_path(a, b).map(|(_, cost)| cost)
}

fn positions(t: &Trajectory) -> Vec<[f64; 3]> {
    t.poses().iter().map(|p| p.position).collect()
}

fn check_goal_relative(t: &Trajectory, side: Side) -> Result<(), AlignError> {
    if t.ends_at_origin() {
        Ok(())
    } else {
        Err(AlignError::NotGoalRelative { side, distance: t.final_distance_from_origin() })
    }
}

/// Mean of a group of unit quaternions that are all close together:
/// sign-aligned onto the first, averaged componentwise, renormalized.
/// Singleton groups pass through bit-exactly, which keeps a reproduction
/// identical to its demonstration identical after alignment too.
fn mean_quat(group: &[Quat]) -> Quat {
    let first = group[0];
    if group.len() == 1 {
        return first;
    }
    let mut acc = [0.0f64; 4];
    for q in group {
        let s = if q.dot(first) < 0.0 { -1.0 } else { 1.0 };
        acc[0] += s * q.w;
        acc[1] += s * q.x;
        acc[2] += s * q.y;
        acc[3] += s * q.z;
    }
    let n = group.len() as f64;
    let mean = Quat::new(acc[0] / n, acc[1] / n, acc[2] / n, acc[3] / n);
    mean.normalized().unwrap_or(first).canonicalized()
}

/// Aligns a goal-relative reproduction onto its goal-relative
/// demonstration by warping the position signals, then resampling the
/// reproduction onto the demonstration's grid. Both sides come back with
/// the demonstration's rescaled `[0, 1]` time column.
pub fn align_pair(demo: &Trajectory, rep: &Trajectory) -> Result<AlignedPair, AlignError> {
    check_goal_relative(demo, Side::Demonstration)?;
    check_goal_relative(rep, Side::Reproduction)?;

    let (path, _) = dtw_path(&positions(demo), &positions(rep))?;

    let demo_inputs = demo.input_matrix();
    let demo_wrench = demo.wrench_matrix();
    let rep_poses = rep.poses();
    let rep_wrench_rows = rep.wrench_matrix();

    let n = demo.len();
    let mut rep_inputs = Vec::with_capacity(n);
    let mut rep_wrench = Vec::with_capacity(n);
    let mut k = 0usize;
    for i in 0..n {
        // The path is monotone in both indices, so the reproduction
        // samples mapped to demonstration sample i form one contiguous run.
        let start = k;
        while k < path.len() && path[k].0 == i {
            k += 1;
        }
        let group = &path[start..k];
        debug_assert!(!group.is_empty());

        let mut pos = [0.0f64; 3];
        let mut wrench = [0.0f64; 6];
        let mut quats = Vec::with_capacity(group.len());
        for &(_, j) in group {
            for d in 0..3 {
                pos[d] += rep_poses[j].position[d];
            }
            for d in 0..6 {
                wrench[d] += rep_wrench_rows[j][d];
            }
            quats.push(rep_poses[j].orientation);
        }
        let g = group.len() as f64;
        for d in 0..3 {
            pos[d] /= g;
        }
        for d in 0..6 {
            wrench[d] /= g;
        }
        let q = mean_quat(&quats);

        let t = demo_inputs[i][0];
        rep_inputs.push([t, pos[0], pos[1], pos[2], q.w, q.x, q.y, q.z]);
        rep_wrench.push(wrench);
    }

    Ok(AlignedPair { demo_inputs, demo_wrench, rep_inputs, rep_wrench })
}

/// Pairs the trajectories sample by sample without warping. Requires equal
/// lengths; each side keeps its own rescaled time column. Matches
/// [`align_pair`] exactly when the pair is already sampled in lockstep.
pub fn align_pair_without_warping(
    demo: &Trajectory,
    rep: &Trajectory,
) -> Result<AlignedPair, AlignError> {
    check_goal_relative(demo, Side::Demonstration)?;
    check_goal_relative(rep, Side::Reproduction)?;
    if demo.len() != rep.len() {
        return Err(AlignError::LengthMismatch { demo: demo.len(), rep: rep.len() });
    }
    Ok(AlignedPair {
        demo_inputs: demo.input_matrix(),
        demo_wrench: demo.wrench_matrix(),
        rep_inputs: rep.input_matrix(),
        rep_wrench: rep.wrench_matrix(),
    })
}
