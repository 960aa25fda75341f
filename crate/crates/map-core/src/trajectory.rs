//! Recorded movements: pose and wrench series plus the goal they approach.
//!
//! A [`Trajectory`] validates its invariants on construction and stays
//! immutable afterwards; every downstream stage (alignment, model fitting,
//! feature extraction) borrows it read-only.

use alloc::string::String;
use alloc::vec::Vec;

use crate::quat::Quat;

/// Unit-norm tolerance guaranteed for orientations after construction.
pub const QUAT_NORM_TOLERANCE: f64 = 1e-6;

/// Largest final-sample distance from the goal accepted as goal-relative.
pub const GOAL_RELATIVE_TOLERANCE: f64 = 1e-3;

/// End-effector position and orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub position: [f64; 3],
    /// Unit quaternion, scalar-first `(w, x, y, z)`.
    pub orientation: Quat,
}

impl Pose {
    pub fn identity() -> Pose {
        Pose { position: [0.0; 3], orientation: Quat::IDENTITY }
    }
}

/// Force and torque measured at one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WrenchSample {
    pub force: [f64; 3],
    pub torque: [f64; 3],
}

impl WrenchSample {
    pub fn zero() -> WrenchSample {
        WrenchSample { force: [0.0; 3], torque: [0.0; 3] }
    }

    /// Components in the fixed order `fx, fy, fz, tx, ty, tz`.
    pub fn as_array(self) -> [f64; 6] {
        [
            self.force[0],
            self.force[1],
            self.force[2],
            self.torque[0],
            self.torque[1],
            self.torque[2],
        ]
    }

    pub fn is_finite(self) -> bool {
        self.as_array().iter().all(|v| v.is_finite())
    }
}

/// Movement outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Success,
    Failure,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Success => "success",
            Label::Failure => "failure",
        }
    }
}

impl core::str::FromStr for Label {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, UnknownLabel> {
        match s {
            "success" => Ok(Label::Success),
            "failure" => Ok(Label::Failure),
            _ => Err(UnknownLabel),
        }
    }
}

impl core::fmt::Display for Label {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Label string was neither `success` nor `failure`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnknownLabel;

impl core::fmt::Display for UnknownLabel {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("label must be \"success\" or \"failure\"")
    }
}

impl core::error::Error for UnknownLabel {}

/// Rejected trajectory data. Rows are 1-based data rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrajectoryError {
    /// Fewer than two samples.
    TooShort { len: usize },
    /// Timestamp, pose, and wrench series differ in length.
    LengthMismatch { timestamps: usize, poses: usize, wrenches: usize },
    NonFiniteTimestamp { row: usize },
    /// Timestamp at `row` does not strictly increase over its predecessor.
    NonMonotoneTimestamps { row: usize },
    NonFinitePosition { row: usize },
    /// Orientation quaternion too close to zero norm to normalize.
    ZeroNormQuaternion { row: usize },
    NonFiniteWrench { row: usize },
    /// Goal pose has a non-finite position or a degenerate orientation.
    InvalidGoalPose,
}

impl core::fmt::Display for TrajectoryError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match *self {
            TrajectoryError::TooShort { len } => {
                write!(f, "trajectory needs at least 2 samples, got {}", len)
            }
            TrajectoryError::LengthMismatch { timestamps, poses, wrenches } => write!(
                f,
                "series lengths differ: {} timestamps, {} poses, {} wrenches",
                timestamps, poses, wrenches
            ),
            TrajectoryError::NonFiniteTimestamp { row } => {
                write!(f, "non-finite timestamp at row {}", row)
            }
            TrajectoryError::NonMonotoneTimestamps { row } => {
                write!(f, "non-monotone timestamps at row {}", row)
            }
            TrajectoryError::NonFinitePosition { row } => {
                write!(f, "non-finite position at row {}", row)
            }
            TrajectoryError::ZeroNormQuaternion { row } => {
                write!(f, "zero-norm orientation quaternion at row {}", row)
            }
            TrajectoryError::NonFiniteWrench { row } => {
                write!(f, "non-finite wrench at row {}", row)
            }
            TrajectoryError::InvalidGoalPose => f.write_str("invalid goal pose"),
        }
    }
}

impl core::error::Error for TrajectoryError {}

/// A recorded movement: synchronized timestamp, pose, and wrench series,
/// the goal pose it approaches, and an optional outcome label.
///
/// Invariants held after construction: at least two samples, strictly
/// increasing finite timestamps, finite positions and wrenches, and
/// unit-norm orientations (renormalized here, zero-norm rejected).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    id: String,
    timestamps: Vec<f64>,
    poses: Vec<Pose>,
    wrenches: Vec<WrenchSample>,
    goal_pose: Pose,
    label: Option<Label>,
}

impl Trajectory {
    pub fn new(
        id: String,
        timestamps: Vec<f64>,
        poses: Vec<Pose>,
        wrenches: Vec<WrenchSample>,
        goal_pose: Pose,
        label: Option<Label>,
    ) -> Result<Trajectory, TrajectoryError> {
        if timestamps.len() != poses.len() || timestamps.len() != wrenches.len() {
            return Err(TrajectoryError::LengthMismatch {
                timestamps: timestamps.len(),
                poses: poses.len(),
                wrenches: wrenches.len(),
            });
        }
        if timestamps.len() < 2 {
            return Err(TrajectoryError::TooShort { len: timestamps.len() });
        }

        let mut poses = poses;
        for (i, t) in timestamps.iter().enumerate() {
            let row = i + 1;
            if !t.is_finite() {
                return Err(TrajectoryError::NonFiniteTimestamp { row });
            }
            if i > 0 && *t <= timestamps[i - 1] {
                return Err(TrajectoryError::NonMonotoneTimestamps { row });
            }
            if !poses[i].position.iter().all(|v| v.is_finite()) {
                return Err(TrajectoryError::NonFinitePosition { row });
            }
            match poses[i].orientation.normalized() {
                Some(q) => poses[i].orientation = q,
                None => return Err(TrajectoryError::ZeroNormQuaternion { row }),
            }
            if !wrenches[i].is_finite() {
                return Err(TrajectoryError::NonFiniteWrench { row });
            }
        }

        if !goal_pose.position.iter().all(|v| v.is_finite()) {
            return Err(TrajectoryError::InvalidGoalPose);
        }
        let goal_orientation =
            goal_pose.orientation.normalized().ok_or(TrajectoryError::InvalidGoalPose)?;
        let goal_pose = Pose { position: goal_pose.position, orientation: goal_orientation };

        Ok(Trajectory { id, timestamps, poses, wrenches, goal_pose, label })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    /// Always false: construction requires at least two samples.
    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn timestamps(&self) -> &[f64] {
        &self.timestamps
    }

    pub fn poses(&self) -> &[Pose] {
        &self.poses
    }

    pub fn wrenches(&self) -> &[WrenchSample] {
        &self.wrenches
    }

    pub fn goal_pose(&self) -> Pose {
        self.goal_pose
    }

    pub fn label(&self) -> Option<Label> {
        self.label
    }

    /// Re-expresses every pose relative to the goal pose, making the model
    /// inputs invariant to where the movement happened in the workspace.
    ///
    /// Positions become `p - p_goal`; orientations become
    /// `conj(q_goal) * q`, canonicalized to `w >= 0`. The transformed
    /// trajectory carries the identity goal pose: a sample exactly at the
    /// goal maps to the origin and the identity orientation.
    pub fn relativize_to_goal(&self) -> Trajectory {
        let gp = self.goal_pose.position;
        let gq_conj = self.goal_pose.orientation.conjugate();
        let poses = self
            .poses
            .iter()
            .map(|p| {
                let rel = (gq_conj * p.orientation).canonicalized();
                // Unit in exact arithmetic; renormalize to keep the invariant.
                let rel = rel.normalized().unwrap_or(Quat::IDENTITY);
                Pose {
                    position: [
                        p.position[0] - gp[0],
                        p.position[1] - gp[1],
                        p.position[2] - gp[2],
                    ],
                    orientation: rel,
                }
            })
            .collect();
        Trajectory {
            id: self.id.clone(),
            timestamps: self.timestamps.clone(),
            poses,
            wrenches: self.wrenches.clone(),
            goal_pose: Pose::identity(),
            label: self.label,
        }
    }

    /// Whether the final sample sits at the goal (distance within
    /// [`GOAL_RELATIVE_TOLERANCE`]), the precondition for alignment and
    /// model fitting on a goal-relative trajectory.
    pub fn ends_at_origin(&self) -> bool {
        self.final_distance_from_origin() <= GOAL_RELATIVE_TOLERANCE
    }

    /// Euclidean distance of the final sample position from the origin.
    pub fn final_distance_from_origin(&self) -> f64 {
        #[allow(unused_imports)] // needed for no_std, shadowed under std
        use num_traits::Float;
        let p = self.poses[self.poses.len() - 1].position;
        (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt()
    }

    /// Model input rows `[t, x, y, z, qw, qx, qy, qz]` with timestamps
    /// rescaled to `[0, 1]`. Call on the goal-relative transform; the pose
    /// columns are taken as stored.
    pub fn input_matrix(&self) -> Vec<[f64; 8]> {
        let t0 = self.timestamps[0];
        let span = self.timestamps[self.timestamps.len() - 1] - t0;
        self.timestamps
            .iter()
            .zip(&self.poses)
            .map(|(&t, p)| {
                let q = p.orientation;
                [
                    (t - t0) / span,
                    p.position[0],
                    p.position[1],
                    p.position[2],
                    q.w,
                    q.x,
                    q.y,
                    q.z,
                ]
            })
            .collect()
    }

    /// Wrench rows in the fixed component order `fx, fy, fz, tx, ty, tz`.
    pub fn wrench_matrix(&self) -> Vec<[f64; 6]> {
        self.wrenches.iter().map(|w| w.as_array()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::string::ToString;
    use alloc::vec;

    fn pose(p: [f64; 3]) -> Pose {
        Pose { position: p, orientation: Quat::IDENTITY }
    }

    fn simple(timestamps: Vec<f64>) -> Result<Trajectory, TrajectoryError> {
        let n = timestamps.len();
        Trajectory::new(
            "t".to_string(),
            timestamps,
            vec![pose([0.0; 3]); n],
            vec![WrenchSample::zero(); n],
            Pose::identity(),
            None,
        )
    }

    #[test]
    fn accepts_and_exposes_valid_data() {
        let tr = Trajectory::new(
            "demo".to_string(),
            vec![0.0, 0.1, 0.2],
            vec![pose([1.0, 0.0, 0.0]), pose([0.5, 0.0, 0.0]), pose([0.0; 3])],
            vec![WrenchSample::zero(); 3],
            Pose::identity(),
            Some(Label::Success),
        )
        .unwrap();
        assert_eq!(tr.id(), "demo");
        assert_eq!(tr.len(), 3);
        assert_eq!(tr.label(), Some(Label::Success));
    }

    #[test]
    fn renormalizes_orientations() {
        let skewed = Pose {
            position: [0.0; 3],
            orientation: Quat::new(2.0, 0.0, 0.0, 0.0),
        };
        let tr = Trajectory::new(
            "t".to_string(),
            vec![0.0, 1.0],
            vec![skewed, skewed],
            vec![WrenchSample::zero(); 2],
            Pose::identity(),
            None,
        )
        .unwrap();
        assert!((tr.poses()[0].orientation.norm() - 1.0).abs() < QUAT_NORM_TOLERANCE);
    }

    #[test]
    fn non_monotone_timestamps_name_the_row() {
        let err = simple(vec![0.0, 0.1, 0.1]).unwrap_err();
        assert_eq!(err, TrajectoryError::NonMonotoneTimestamps { row: 3 });
        assert_eq!(format!("{}", err), "non-monotone timestamps at row 3");
    }

    #[test]
    fn decreasing_timestamps_rejected() {
        let err = simple(vec![0.0, 0.2, 0.1]).unwrap_err();
        assert_eq!(err, TrajectoryError::NonMonotoneTimestamps { row: 3 });
    }

    #[test]
    fn too_few_samples_rejected() {
        assert_eq!(simple(vec![0.0]).unwrap_err(), TrajectoryError::TooShort { len: 1 });
        assert_eq!(simple(vec![]).unwrap_err(), TrajectoryError::TooShort { len: 0 });
    }

    #[test]
    fn length_mismatch_rejected() {
        let err = Trajectory::new(
            "t".to_string(),
            vec![0.0, 1.0],
            vec![pose([0.0; 3])],
            vec![WrenchSample::zero(); 2],
            Pose::identity(),
            None,
        )
        .unwrap_err();
        assert_eq!(err, TrajectoryError::LengthMismatch { timestamps: 2, poses: 1, wrenches: 2 });
    }

    #[test]
    fn zero_norm_quaternion_names_the_row() {
        let bad = Pose {
            position: [0.0; 3],
            orientation: Quat::new(0.0, 0.0, 0.0, 0.0),
        };
        let err = Trajectory::new(
            "t".to_string(),
            vec![0.0, 1.0],
            vec![pose([0.0; 3]), bad],
            vec![WrenchSample::zero(); 2],
            Pose::identity(),
            None,
        )
        .unwrap_err();
        assert_eq!(err, TrajectoryError::ZeroNormQuaternion { row: 2 });
    }

    #[test]
    fn non_finite_fields_name_the_row() {
        let err = simple(vec![0.0, f64::NAN]).unwrap_err();
        assert_eq!(err, TrajectoryError::NonFiniteTimestamp { row: 2 });

        let mut w = vec![WrenchSample::zero(); 2];
        w[0].force[1] = f64::INFINITY;
        let err = Trajectory::new(
            "t".to_string(),
            vec![0.0, 1.0],
            vec![pose([0.0; 3]); 2],
            w,
            Pose::identity(),
            None,
        )
        .unwrap_err();
        assert_eq!(err, TrajectoryError::NonFiniteWrench { row: 1 });
    }

    #[test]
    fn relativize_maps_goal_samples_to_identity() {
        let goal = Pose {
            position: [0.5, -0.2, 0.3],
            orientation: Quat::from_axis_angle([0.0, 0.0, 1.0], 0.7),
        };
        let tr = Trajectory::new(
            "t".to_string(),
            vec![0.0, 1.0],
            vec![
                Pose { position: [0.5, -0.2, 0.4], orientation: Quat::IDENTITY },
                goal,
            ],
            vec![WrenchSample::zero(); 2],
            goal,
            None,
        )
        .unwrap();
        let rel = tr.relativize_to_goal();

        // The final sample coincides with the goal: relative position is the
        // exact origin and the relative orientation is exactly identity
        // (conj(q) * q cancels term by term in floating point).
        let last = rel.poses()[1];
        assert_eq!(last.position, [0.0, 0.0, 0.0]);
        assert_eq!(last.orientation.x, 0.0);
        assert_eq!(last.orientation.y, 0.0);
        assert_eq!(last.orientation.z, 0.0);
        assert!((last.orientation.w - 1.0).abs() < 1e-15);

        assert_eq!(rel.goal_pose(), Pose::identity());
        assert!(rel.ends_at_origin());
        // One sample 0.1 above the goal.
        assert!((rel.poses()[0].position[2] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn relativized_orientations_stay_canonical() {
        let goal = Pose {
            position: [0.0; 3],
            orientation: Quat::from_axis_angle([0.0, 1.0, 0.0], 3.0),
        };
        let tr = Trajectory::new(
            "t".to_string(),
            vec![0.0, 1.0],
            vec![
                Pose {
                    position: [0.0; 3],
                    orientation: Quat::from_axis_angle([0.0, 1.0, 0.0], -3.0),
                },
                goal,
            ],
            vec![WrenchSample::zero(); 2],
            goal,
            None,
        )
        .unwrap();
        for p in tr.relativize_to_goal().poses() {
            assert!(p.orientation.w >= 0.0);
            assert!((p.orientation.norm() - 1.0).abs() < QUAT_NORM_TOLERANCE);
        }
    }

    #[test]
    fn input_matrix_rescales_time_to_unit_interval() {
        let tr = Trajectory::new(
            "t".to_string(),
            vec![5.0, 7.0, 11.0],
            vec![pose([0.0; 3]); 3],
            vec![WrenchSample::zero(); 3],
            Pose::identity(),
            None,
        )
        .unwrap();
        let m = tr.input_matrix();
        assert_eq!(m[0][0], 0.0);
        assert!((m[1][0] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(m[2][0], 1.0);
        // Identity orientation occupies the quaternion columns.
        assert_eq!(m[0][4], 1.0);
        assert_eq!(m[0][5], 0.0);
    }

    #[test]
    fn wrench_matrix_uses_fixed_component_order() {
        let w = WrenchSample { force: [1.0, 2.0, 3.0], torque: [4.0, 5.0, 6.0] };
        let tr = Trajectory::new(
            "t".to_string(),
            vec![0.0, 1.0],
            vec![pose([0.0; 3]); 2],
            vec![w, w],
            Pose::identity(),
            None,
        )
        .unwrap();
        assert_eq!(tr.wrench_matrix()[0], [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
    }

    #[test]
    fn label_round_trips_through_strings() {
        assert_eq!("success".parse::<Label>().unwrap(), Label::Success);
        assert_eq!("failure".parse::<Label>().unwrap(), Label::Failure);
        assert!("ok".parse::<Label>().is_err());
        assert_eq!(Label::Failure.to_string(), "failure");
    }
}
