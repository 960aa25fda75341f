//! Seeded synthetic assembly datasets with labeled outcomes.
//!
//! Two task families are emulated: pressing a part into snap-fits
//! (approach descent, spring ramp, snap release) and screwing (rotation
//! about z with a ratcheting torque ramp). No contact physics is
//! simulated; the profiles only have to give success and failure
//! reproductions distinct, plausibly shaped wrench signatures with a
//! margin well above the injected sensor noise. Every amplitude below is
//! recorded in the generated manifest.
//!
//! Generation is a pure function of the scenario: a fixed seed yields a
//! bit-identical dataset. The random stream is consumed in a fixed order
//! (style, goal, demo noise, then per reproduction: start offset, noise),
//! so changing `start_jitter` alone rescales the start offsets without
//! disturbing any other draw.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

// Float method calls resolve inherently instead when a test build
// links std into the graph; the import must stay for no_std builds.
#[allow(unused_imports)]
use num_traits::Float;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::quat::Quat;
use crate::trajectory::{Label, Pose, Trajectory, WrenchSample};

/// Time step between samples, seconds.
pub const SAMPLE_DT: f64 = 0.04;

/// Sensor noise standard deviations.
pub const NOISE_FORCE_STD: f64 = 0.05;
pub const NOISE_TORQUE_STD: f64 = 0.005;

/// Constant amplitude bias of reproductions relative to the
/// demonstration, emulating a slightly softer impedance setting. Kept
/// mild on purpose: a successful reproduction should sit close to the
/// demonstration in every wrench dimension, so that a failure's
/// saturated divergence dominates the normalized features instead of
/// being averaged away by background divergence.
pub const REP_AMPLITUDE_BIAS: f64 = 0.96;

/// Snap-fit profile: approach height, insertion depth at contact, and the
/// contact-phase force amplitudes.
pub const SNAP_APPROACH_HEIGHT: f64 = 0.08;
pub const SNAP_INSERT_DEPTH: f64 = 0.012;
pub const SNAP_PEAK_N: f64 = 20.0;
pub const SNAP_RESIDUAL_N: f64 = 5.0;
pub const SNAP_PEAK_AT: f64 = 0.7;
pub const SNAP_JAM_PLATEAU_N: f64 = 30.0;
pub const SNAP_JAM_SATURATE_AT: f64 = 0.5;
pub const SNAP_LOOSE_FACTOR: f64 = 0.5;
pub const SNAP_SIDE_FORCE_N: f64 = 1.2;
pub const SNAP_SIDE_TORQUE_NM: f64 = 0.12;

/// Screwing profile: approach height, thread travel, and torque shape.
pub const SCREW_APPROACH_HEIGHT: f64 = 0.05;
pub const SCREW_THREAD_TRAVEL: f64 = 0.004;
pub const SCREW_RAMP_END_NM: f64 = 2.0;
pub const SCREW_SAW_FRACTION: f64 = 0.25;
pub const SCREW_FORCE_N: f64 = 5.0;
pub const SCREW_SPIKE_FACTOR: f64 = 1.5;
pub const SCREW_SPIKE_START: f64 = 0.9;
pub const SCREW_MISS_FRACTION: f64 = 0.08;
pub const SCREW_JAM_SATURATE_AT: f64 = 0.6;
pub const SCREW_JAM_FORCE_FACTOR: f64 = 1.3;
pub const SCREW_STRIP_AT: f64 = 0.35;
pub const SCREW_STRIP_RESIDUAL: f64 = 0.25;
pub const SCREW_SIDE_FORCE_N: f64 = 0.6;
pub const SCREW_SIDE_TORQUE_NM: f64 = 0.08;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Task {
    SnapFit,
    Screwing,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::SnapFit => "snapfit",
            Task::Screwing => "screwing",
        }
    }

    /// Failure modes a mixed dataset of this task cycles through.
    pub fn failure_cycle(self) -> &'static [FailureMode] {
        match self {
            Task::SnapFit => &[FailureMode::Jam, FailureMode::Miss, FailureMode::Loose],
            Task::Screwing => &[FailureMode::Miss, FailureMode::Loose],
        }
    }
}

impl core::str::FromStr for Task {
    type Err = UnknownTask;

    fn from_str(s: &str) -> Result<Task, UnknownTask> {
        match s {
            "snapfit" => Ok(Task::SnapFit),
            "screwing" => Ok(Task::Screwing),
            _ => Err(UnknownTask),
        }
    }
}

impl core::fmt::Display for Task {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnknownTask;

impl core::fmt::Display for UnknownTask {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("task must be \"snapfit\" or \"screwing\"")
    }
}

impl core::error::Error for UnknownTask {}

/// What goes wrong in a reproduction. `None` is a successful reproduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FailureMode {
    None,
    /// Snap-fit: force saturates high with no release.
    /// Screwing: torque saturates early with no spike, pressed harder.
    Jam,
    /// The feature is never engaged: the engagement wrench stays at
    /// noise level while the stroke's wobble persists (screwing: the
    /// fastener misses the hole and spins freely).
    Miss,
    /// Snap-fit: half-hearted engagement at reduced amplitude.
    /// Screwing: the thread strips, torque falls to friction residue.
    Loose,
}

impl FailureMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FailureMode::None => "none",
            FailureMode::Jam => "jam",
            FailureMode::Miss => "miss",
            FailureMode::Loose => "loose",
        }
    }

    /// Outcome label a reproduction with this mode carries.
    pub fn label(self) -> Label {
        match self {
            FailureMode::None => Label::Success,
            _ => Label::Failure,
        }
    }
}

impl core::fmt::Display for FailureMode {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Scenario to generate: the task, its scale, and the reproduction mix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioSpec {
    pub task: Task,
    /// Samples per trajectory; at least 10.
    pub n_samples: usize,
    pub seed: u64,
    /// Standard deviation of reproduction start offsets, meters.
    pub start_jitter: f64,
    /// Mode given to the failure half of [`generate`]'s reproductions.
    pub failure_mode: FailureMode,
    pub n_success: usize,
    pub n_failure: usize,
}

impl ScenarioSpec {
    /// Snap-fit defaults: 97 samples, 10 success + 10 failure reps.
    pub fn snapfit(seed: u64) -> ScenarioSpec {
        ScenarioSpec {
            task: Task::SnapFit,
            n_samples: 97,
            seed,
            start_jitter: 0.01,
            failure_mode: FailureMode::Jam,
            n_success: 10,
            n_failure: 10,
        }
    }

    /// Screwing defaults: 204 samples, 10 success + 10 failure reps.
    pub fn screwing(seed: u64) -> ScenarioSpec {
        ScenarioSpec {
            task: Task::Screwing,
            n_samples: 204,
            seed,
            start_jitter: 0.01,
            failure_mode: FailureMode::Miss,
            n_success: 10,
            n_failure: 10,
        }
    }
}

/// Per-dataset profile variation, drawn once from the seed. Distinct
/// seeds act as distinct demonstrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Style {
    /// Fraction of the trajectory spent approaching before contact.
    pub contact_onset: f64,
    /// Multiplier on every profile amplitude.
    pub peak_scale: f64,
    /// Phase of the screwing sawtooth, radians.
    pub saw_phase: f64,
    /// Screw revolutions until tight.
    pub revolutions: f64,
}

/// Everything needed to reproduce or inspect a generated dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorManifest {
    pub task: Task,
    pub seed: u64,
    pub n_samples: usize,
    pub start_jitter: f64,
    /// Failure mode per reproduction, in order.
    pub modes: Vec<FailureMode>,
    pub style: Style,
    pub goal_position: [f64; 3],
    pub noise_force_std: f64,
    pub noise_torque_std: f64,
    pub rep_amplitude_bias: f64,
    pub sample_dt: f64,
}

/// A generated demonstration with its labeled reproductions.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    pub demo: Trajectory,
    pub reps: Vec<Trajectory>,
    pub manifest: GeneratorManifest,
}

/// Gaussian deviates over a seeded ChaCha stream (Box-Muller, cached
/// spare). The draw count per sample is fixed, so streams stay aligned
/// across scenarios that differ only in scale parameters.
struct GaussianSource {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl GaussianSource {
    fn new(seed: u64) -> GaussianSource {
        GaussianSource { rng: ChaCha8Rng::seed_from_u64(seed), spare: None }
    }

    /// Uniform in `[0, 1)` from the top 53 bits.
    fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
    }

    fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // u1 in (0, 1] keeps the logarithm finite.
        let u1 = ((self.rng.next_u64() >> 11) as f64 + 1.0) * (1.0 / 9_007_199_254_740_992.0);
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (2.0 * core::f64::consts::PI * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }
}

/// Cubic smoothstep on [0, 1].
fn smooth(s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    s * s * (3.0 - 2.0 * s)
}

/// Sawtooth rising from -1 to 1 over each unit period.
fn sawtooth(u: f64) -> f64 {
    2.0 * (u - u.floor()) - 1.0
}

/// Snap-fit contact force-z at contact progress `s` (0 at first contact,
/// 1 at the goal), before noise. `amp` folds peak_scale and the
/// reproduction bias.
fn snapfit_contact_force(mode: FailureMode, s: f64, amp: f64) -> f64 {
    match mode {
        FailureMode::None => {
            if s <= SNAP_PEAK_AT {
                amp * SNAP_PEAK_N * (s / SNAP_PEAK_AT)
            } else {
                amp * SNAP_RESIDUAL_N
            }
        }
        FailureMode::Jam => amp * SNAP_JAM_PLATEAU_N * (s / SNAP_JAM_SATURATE_AT).min(1.0),
        FailureMode::Miss => 0.0,
        FailureMode::Loose => SNAP_LOOSE_FACTOR * snapfit_contact_force(FailureMode::None, s, amp),
    }
}

/// Screwing torque-z magnitude at screw progress `s`, before noise and
/// sign (the applied torque is clockwise, negative about z).
fn screwing_torque(mode: FailureMode, s: f64, amp: f64, style: &Style) -> f64 {
    let ramp_end = amp * SCREW_RAMP_END_NM;
    let saw = SCREW_SAW_FRACTION
        * ramp_end
        * sawtooth(style.revolutions * s + style.saw_phase / (2.0 * core::f64::consts::PI));
    match mode {
        FailureMode::None => {
            if s <= SCREW_SPIKE_START {
                ramp_end * s + saw
            } else {
                // Tightening: the ratchet stops and the torque spikes.
                let spike = smooth((s - SCREW_SPIKE_START) / (1.0 - SCREW_SPIKE_START));
                ramp_end * (s + (SCREW_SPIKE_FACTOR - 1.0) * spike)
            }
        }
        FailureMode::Jam => {
            if s <= SCREW_JAM_SATURATE_AT {
                ramp_end * (s / SCREW_JAM_SATURATE_AT) + saw
            } else {
                ramp_end
            }
        }
        FailureMode::Miss => {
            SCREW_MISS_FRACTION
                * ramp_end
                * (2.0 * core::f64::consts::PI * style.revolutions * s + style.saw_phase).sin()
        }
        FailureMode::Loose => {
            // The thread strips partway in: normal ramp until the strip,
            // then only stripped-thread friction, and never a spike.
            if s <= SCREW_STRIP_AT {
                ramp_end * s + saw
            } else {
                SCREW_STRIP_RESIDUAL * ramp_end
            }
        }
    }
}

/// Stroke wobble during the snap-fit contact phase: small deterministic
/// lateral forces and reaction torques from tool dynamics. Present in
/// every mode, including a miss, so each wrench dimension has
/// identifiable structure for the fits; the class signal stays in the
/// engagement components.
fn snapfit_wobble(s: f64, amp: f64) -> [f64; 6] {
    let arc = (core::f64::consts::PI * s).sin();
    let sway = (2.0 * core::f64::consts::PI * s).sin();
    [
        amp * SNAP_SIDE_FORCE_N * arc,
        0.6 * amp * SNAP_SIDE_FORCE_N * sway,
        0.0,
        amp * SNAP_SIDE_TORQUE_NM * sway,
        0.8 * amp * SNAP_SIDE_TORQUE_NM * arc,
        0.5 * amp * SNAP_SIDE_TORQUE_NM * arc,
    ]
}

/// Stroke wobble during the screwing contact phase: the tool leans
/// through a slow arc while the driver advances, so the lateral forces
/// and reaction torques follow low-frequency sweeps rather than the
/// per-revolution rotation (which the sensor's tool-frame mounting
/// cancels). Smooth shapes keep the per-dimension fits in one evidence
/// basin; an oscillation rotating with the driver admits both an
/// interpolating and a noise-absorbing fit, and reproductions landing in
/// different basins scatter the features. The applied torque dimension
/// carries the class signal and gets no wobble.
fn screwing_wobble(s: f64, amp: f64) -> [f64; 6] {
    let arc = (core::f64::consts::PI * s).sin();
    let sway = (2.0 * core::f64::consts::PI * s).sin();
    [
        amp * SCREW_SIDE_FORCE_N * arc,
        0.8 * amp * SCREW_SIDE_FORCE_N * sway,
        0.0,
        amp * SCREW_SIDE_TORQUE_NM * sway,
        0.8 * amp * SCREW_SIDE_TORQUE_NM * arc,
        0.0,
    ]
}

struct Profile {
    positions: Vec<[f64; 3]>,
    orientations: Vec<Quat>,
    wrench: Vec<[f64; 6]>,
}

/// Noiseless profile of one trajectory: goal-relative positions (plus the
/// start offset decaying to zero before contact) and absolute
/// orientations running from identity to the goal orientation.
fn profile(
    task: Task,
    style: &Style,
    mode: FailureMode,
    amp: f64,
    offset: [f64; 3],
    n: usize,
) -> Profile {
    let last = (n - 1) as f64;
    let contact_index = (style.contact_onset * last).floor() as usize;
    let approach_height = match task {
        Task::SnapFit => SNAP_APPROACH_HEIGHT,
        Task::Screwing => SCREW_APPROACH_HEIGHT,
    };
    let contact_z = match task {
        Task::SnapFit => SNAP_INSERT_DEPTH,
        Task::Screwing => SCREW_THREAD_TRAVEL,
    };

    let mut positions = Vec::with_capacity(n);
    let mut orientations = Vec::with_capacity(n);
    let mut wrench = Vec::with_capacity(n);
    for i in 0..n {
        let (z, decay, s_contact) = if i <= contact_index {
            let s = i as f64 / contact_index as f64;
            (contact_z + (approach_height - contact_z) * (1.0 - smooth(s)), 1.0 - smooth(s), 0.0)
        } else {
            let s = (i - contact_index) as f64 / (last - contact_index as f64);
            (contact_z * (1.0 - s), 0.0, s)
        };
        positions.push([offset[0] * decay, offset[1] * decay, z + offset[2] * decay]);

        let in_contact = i > contact_index;
        match task {
            Task::SnapFit => {
                orientations.push(Quat::IDENTITY);
                let mut w = [0.0; 6];
                if in_contact {
                    w = snapfit_wobble(s_contact, amp);
                    w[2] = snapfit_contact_force(mode, s_contact, amp);
                }
                wrench.push(w);
            }
            Task::Screwing => {
                let angle = if in_contact {
                    -2.0 * core::f64::consts::PI * style.revolutions * s_contact
                } else {
                    0.0
                };
                orientations.push(Quat::from_axis_angle([0.0, 0.0, 1.0], angle));
                // Axial reaction per mode: a missed hole gives none, a
                // cross-thread jam is pressed harder.
                let fz_factor = match mode {
                    FailureMode::Miss => 0.0,
                    FailureMode::Jam => SCREW_JAM_FORCE_FACTOR,
                    _ => 1.0,
                };
                let mut w = [0.0; 6];
                if in_contact {
                    w = screwing_wobble(s_contact, amp);
                    w[2] = amp * SCREW_FORCE_N * fz_factor;
                    w[5] = -screwing_torque(mode, s_contact, amp, style);
                }
                wrench.push(w);
            }
        }
    }
    Profile { positions, orientations, wrench }
}

fn synth_trajectory(
    spec: &ScenarioSpec,
    style: &Style,
    goal: Pose,
    mode: FailureMode,
    amp_bias: f64,
    offset: [f64; 3],
    id: String,
    label: Option<Label>,
    g: &mut GaussianSource,
) -> Trajectory {
    let n = spec.n_samples;
    let amp = style.peak_scale * amp_bias;
    let p = profile(spec.task, style, mode, amp, offset, n);

    let timestamps: Vec<f64> = (0..n).map(|i| i as f64 * SAMPLE_DT).collect();
    let poses: Vec<Pose> = (0..n)
        .map(|i| {
            // Profile positions are goal-relative; emitted trajectories
            // are absolute. Orientations come out absolute already.
            let rel = p.positions[i];
            Pose {
                position: [
                    goal.position[0] + rel[0],
                    goal.position[1] + rel[1],
                    goal.position[2] + rel[2],
                ],
                orientation: p.orientations[i].canonicalized(),
            }
        })
        .collect();
    let wrenches: Vec<WrenchSample> = (0..n)
        .map(|i| {
            let w = p.wrench[i];
            WrenchSample {
                force: [
                    w[0] + NOISE_FORCE_STD * g.normal(),
                    w[1] + NOISE_FORCE_STD * g.normal(),
                    w[2] + NOISE_FORCE_STD * g.normal(),
                ],
                torque: [
                    w[3] + NOISE_TORQUE_STD * g.normal(),
                    w[4] + NOISE_TORQUE_STD * g.normal(),
                    w[5] + NOISE_TORQUE_STD * g.normal(),
                ],
            }
        })
        .collect();

    Trajectory::new(id, timestamps, poses, wrenches, goal, label)
        .expect("generated trajectories satisfy the invariants")
}

/// Generates a dataset with an explicit failure mode per reproduction
/// (`None` entries are successful reproductions).
pub fn generate_with_modes(spec: &ScenarioSpec, modes: &[FailureMode]) -> SyntheticDataset {
    assert!(spec.n_samples >= 10, "n_samples must be at least 10");
    assert!(
        spec.start_jitter >= 0.0 && spec.start_jitter.is_finite(),
        "start_jitter must be a finite non-negative number"
    );

    let mut g = GaussianSource::new(spec.seed);
    let style = Style {
        contact_onset: g.uniform_in(0.55, 0.65),
        peak_scale: g.uniform_in(0.9, 1.1),
        saw_phase: g.uniform_in(0.0, 2.0 * core::f64::consts::PI),
        revolutions: g.uniform_in(1.5, 2.5),
    };
    let goal_orientation = match spec.task {
        Task::SnapFit => Quat::IDENTITY,
        Task::Screwing => Quat::from_axis_angle(
            [0.0, 0.0, 1.0],
            -2.0 * core::f64::consts::PI * style.revolutions,
        )
        .canonicalized(),
    };
    let goal = Pose {
        position: [
            0.45 + g.uniform_in(-0.02, 0.02),
            -0.1 + g.uniform_in(-0.02, 0.02),
            0.2 + g.uniform_in(-0.02, 0.02),
        ],
        orientation: goal_orientation,
    };

    let demo = synth_trajectory(
        spec,
        &style,
        goal,
        FailureMode::None,
        1.0,
        [0.0; 3],
        String::from("demo"),
        None,
        &mut g,
    );

    let reps: Vec<Trajectory> = modes
        .iter()
        .enumerate()
        .map(|(i, &mode)| {
            let offset = [
                g.normal() * spec.start_jitter,
                g.normal() * spec.start_jitter,
                g.normal() * spec.start_jitter,
            ];
            synth_trajectory(
                spec,
                &style,
                goal,
                mode,
                REP_AMPLITUDE_BIAS,
                offset,
                format!("rep_{:02}", i),
                Some(mode.label()),
                &mut g,
            )
        })
        .collect();

    let manifest = GeneratorManifest {
        task: spec.task,
        seed: spec.seed,
        n_samples: spec.n_samples,
        start_jitter: spec.start_jitter,
        modes: modes.to_vec(),
        style,
        goal_position: goal.position,
        noise_force_std: NOISE_FORCE_STD,
        noise_torque_std: NOISE_TORQUE_STD,
        rep_amplitude_bias: REP_AMPLITUDE_BIAS,
        sample_dt: SAMPLE_DT,
    };
    SyntheticDataset { demo, reps, manifest }
}

fn single_mode_plan(spec: &ScenarioSpec) -> Vec<FailureMode> {
    let mut modes = alloc::vec![FailureMode::None; spec.n_success];
    modes.extend(core::iter::repeat(spec.failure_mode).take(spec.n_failure));
    modes
}

/// Mode plan of a mixed dataset: `n_success` successes, then `n_failure`
/// failures cycling through the task's failure modes.
pub fn mixed_mode_plan(spec: &ScenarioSpec) -> Vec<FailureMode> {
    let cycle = spec.task.failure_cycle();
    let mut modes = alloc::vec![FailureMode::None; spec.n_success];
    modes.extend((0..spec.n_failure).map(|i| cycle[i % cycle.len()]));
    modes
}

/// Dataset with `n_success` successes and `n_failure` reproductions of
/// the spec's single `failure_mode` (a `failure_mode` of `None` makes
/// them successes too).
pub fn generate(spec: &ScenarioSpec) -> SyntheticDataset {
    generate_with_modes(spec, &single_mode_plan(spec))
}

/// Snap-fit dataset; see [`generate`].
pub fn generate_snapfit(spec: &ScenarioSpec) -> SyntheticDataset {
    assert_eq!(spec.task, Task::SnapFit);
    generate(spec)
}

/// Screwing dataset; see [`generate`].
pub fn generate_screwing(spec: &ScenarioSpec) -> SyntheticDataset {
    assert_eq!(spec.task, Task::Screwing);
    generate(spec)
}

/// Dataset whose failures cycle through all of the task's failure modes,
/// the default shape for end-to-end evaluation.
pub fn generate_mixed(spec: &ScenarioSpec) -> SyntheticDataset {
    generate_with_modes(spec, &mixed_mode_plan(spec))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs_fz(t: &Trajectory) -> f64 {
        t.wrenches().iter().fold(0.0f64, |m, w| m.max(w.force[2].abs()))
    }

    #[test]
    fn equal_seeds_are_bit_identical() {
        let spec = ScenarioSpec { n_samples: 30, ..ScenarioSpec::snapfit(7) };
        let a = generate_mixed(&spec);
        let b = generate_mixed(&spec);
        assert_eq!(a.demo, b.demo);
        assert_eq!(a.reps, b.reps);
        assert_eq!(a.manifest, b.manifest);
    }

    #[test]
    fn jitterless_success_reps_repeat_demo_positions() {
        let spec = ScenarioSpec {
            n_samples: 30,
            start_jitter: 0.0,
            failure_mode: FailureMode::None,
            n_success: 2,
            n_failure: 0,
            ..ScenarioSpec::snapfit(3)
        };
        let ds = generate(&spec);
        for rep in &ds.reps {
            assert_eq!(rep.label(), Some(Label::Success));
            for (rp, dp) in rep.poses().iter().zip(ds.demo.poses()) {
                assert_eq!(rp.position, dp.position);
                assert_eq!(rp.orientation, dp.orientation);
            }
        }
    }

    #[test]
    fn start_jitter_scales_offsets_without_touching_wrench() {
        let base = ScenarioSpec { n_samples: 30, ..ScenarioSpec::snapfit(11) };
        let tripled = ScenarioSpec { start_jitter: 0.03, ..base };
        let a = generate_mixed(&base);
        let b = generate_mixed(&tripled);
        // Same noise stream: wrenches identical, first-sample offsets 3x.
        for (ra, rb) in a.reps.iter().zip(&b.reps) {
            assert_eq!(ra.wrenches(), rb.wrenches());
            let oa = ra.poses()[0].position[0] - a.manifest.goal_position[0];
            let ob = rb.poses()[0].position[0] - b.manifest.goal_position[0];
            assert!((ob - 3.0 * oa).abs() < 1e-15);
        }
        assert_eq!(a.demo, b.demo);
    }

    #[test]
    fn jam_saturates_above_demo_peak_without_release() {
        let spec = ScenarioSpec {
            n_samples: 60,
            failure_mode: FailureMode::Jam,
            n_success: 0,
            n_failure: 1,
            ..ScenarioSpec::snapfit(5)
        };
        let ds = generate(&spec);
        let jam = &ds.reps[0];
        assert_eq!(jam.label(), Some(Label::Failure));
        let jam_peak = max_abs_fz(jam);
        assert!(jam_peak > max_abs_fz(&ds.demo));

        // No post-peak drop beyond 50% of the peak.
        let fz: Vec<f64> = jam.wrenches().iter().map(|w| w.force[2].abs()).collect();
        let peak_at = fz
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        for &v in &fz[peak_at..] {
            assert!(v > 0.5 * jam_peak, "release detected in a jam profile");
        }
    }

    #[test]
    fn success_snapfit_shows_peak_then_release() {
        let ds = generate(&ScenarioSpec {
            n_samples: 60,
            n_success: 1,
            n_failure: 0,
            ..ScenarioSpec::snapfit(9)
        });
        let rep = &ds.reps[0];
        let peak = max_abs_fz(rep);
        let last = rep.wrenches().last().unwrap().force[2].abs();
        // Peak near 18 * peak_scale, residual near 4.5 * peak_scale.
        assert!(peak > 14.0);
        assert!(last < 0.5 * peak);
        assert!(last > 1.0);
    }

    #[test]
    fn miss_reps_keep_the_wobble_but_never_press() {
        let ds = generate(&ScenarioSpec {
            n_samples: 60,
            failure_mode: FailureMode::Miss,
            n_success: 0,
            n_failure: 1,
            ..ScenarioSpec::snapfit(13)
        });
        let miss = &ds.reps[0];
        assert!(max_abs_fz(miss) < 10.0 * NOISE_FORCE_STD);
        // The stroke wobble is motion-borne, so it survives the miss.
        let max_fx = miss.wrenches().iter().fold(0.0f64, |m, w| m.max(w.force[0].abs()));
        assert!(max_fx > 10.0 * NOISE_FORCE_STD);
    }

    #[test]
    fn every_wrench_dimension_is_structured_during_contact() {
        for spec in [
            ScenarioSpec { n_samples: 80, ..ScenarioSpec::snapfit(31) },
            ScenarioSpec { n_samples: 80, ..ScenarioSpec::screwing(33) },
        ] {
            let ds = generate(&spec);
            let w = ds.demo.wrenches();
            let tail = &w[w.len() * 3 / 4..];
            for dim in 0..6 {
                let noise_std =
                    if dim < 3 { NOISE_FORCE_STD } else { NOISE_TORQUE_STD };
                let rms = (tail
                    .iter()
                    .map(|s| {
                        let v = if dim < 3 { s.force[dim] } else { s.torque[dim - 3] };
                        v * v
                    })
                    .sum::<f64>()
                    / tail.len() as f64)
                    .sqrt();
                assert!(
                    rms > 5.0 * noise_std,
                    "{} dim {} rms {} vs noise {}",
                    spec.task,
                    dim,
                    rms,
                    noise_std
                );
            }
        }
    }

    #[test]
    fn screwing_success_spikes_at_the_end() {
        let spec = ScenarioSpec {
            n_samples: 120,
            n_success: 1,
            n_failure: 1,
            failure_mode: FailureMode::Loose,
            ..ScenarioSpec::screwing(21)
        };
        let ds = generate(&spec);
        let (success, loose) = (&ds.reps[0], &ds.reps[1]);

        let tz_tail_mean = |t: &Trajectory| {
            let w = t.wrenches();
            let tail = &w[w.len() - w.len() / 20..];
            tail.iter().map(|s| s.torque[2].abs()).sum::<f64>() / tail.len() as f64
        };
        let tz_mid_mean = |t: &Trajectory| {
            let w = t.wrenches();
            // Middle of the screw phase, well past contact onset.
            let lo = (w.len() as f64 * 0.78) as usize;
            let hi = (w.len() as f64 * 0.84) as usize;
            w[lo..hi].iter().map(|s| s.torque[2].abs()).sum::<f64>() / (hi - lo) as f64
        };

        assert!(tz_tail_mean(success) >= 1.5 * tz_mid_mean(success));
        // The loose rep stripped its thread: the tail sits at the
        // friction residual, nowhere near ramp end or spike.
        assert!(tz_tail_mean(loose) < 0.5 * SCREW_RAMP_END_NM);
        assert!(tz_tail_mean(loose) > 0.05 * SCREW_RAMP_END_NM);
    }

    #[test]
    fn screwing_miss_presses_nothing() {
        let ds = generate(&ScenarioSpec {
            n_samples: 120,
            n_success: 0,
            n_failure: 1,
            failure_mode: FailureMode::Miss,
            ..ScenarioSpec::screwing(23)
        });
        assert!(max_abs_fz(&ds.reps[0]) < 10.0 * NOISE_FORCE_STD);
    }

    #[test]
    fn screwing_miss_rms_is_far_below_success() {
        let spec = ScenarioSpec {
            n_samples: 120,
            n_success: 1,
            n_failure: 1,
            failure_mode: FailureMode::Miss,
            ..ScenarioSpec::screwing(23)
        };
        let ds = generate(&spec);
        let rms = |t: &Trajectory| {
            let w = t.wrenches();
            (w.iter().map(|s| s.torque[2] * s.torque[2]).sum::<f64>() / w.len() as f64).sqrt()
        };
        assert!(rms(&ds.reps[1]) < 0.2 * rms(&ds.reps[0]));
    }

    #[test]
    fn generated_trajectories_are_goal_relative_after_transform() {
        for spec in [
            ScenarioSpec { n_samples: 40, ..ScenarioSpec::snapfit(2) },
            ScenarioSpec { n_samples: 40, ..ScenarioSpec::screwing(2) },
        ] {
            let ds = generate_mixed(&spec);
            assert!(ds.demo.relativize_to_goal().ends_at_origin());
            for rep in &ds.reps {
                assert!(rep.relativize_to_goal().ends_at_origin());
            }
        }
    }

    #[test]
    fn labels_follow_modes() {
        let spec = ScenarioSpec { n_samples: 20, n_success: 2, n_failure: 3, ..ScenarioSpec::snapfit(1) };
        let ds = generate_mixed(&spec);
        assert_eq!(ds.reps.len(), 5);
        assert_eq!(ds.manifest.modes.len(), 5);
        for (rep, mode) in ds.reps.iter().zip(&ds.manifest.modes) {
            assert_eq!(rep.label(), Some(mode.label()));
        }
        // Mixed snap-fit failures cycle jam, miss, loose.
        assert_eq!(
            &ds.manifest.modes[2..],
            &[FailureMode::Jam, FailureMode::Miss, FailureMode::Loose]
        );
    }

    #[test]
    fn class_assertions_survive_a_seed_change() {
        for seed in [5, 6] {
            let ds = generate_mixed(&ScenarioSpec { n_samples: 60, ..ScenarioSpec::snapfit(seed) });
            let demo_peak = max_abs_fz(&ds.demo);
            for (rep, mode) in ds.reps.iter().zip(&ds.manifest.modes) {
                match mode {
                    FailureMode::Jam => assert!(max_abs_fz(rep) > demo_peak),
                    FailureMode::Miss => assert!(max_abs_fz(rep) < 1.0),
                    _ => {}
                }
            }
        }
    }

    #[test]
    fn screwing_final_pose_reaches_the_rotated_goal() {
        let ds = generate(&ScenarioSpec {
            n_samples: 40,
            n_success: 1,
            n_failure: 0,
            ..ScenarioSpec::screwing(17)
        });
        let rel = ds.reps[0].relativize_to_goal();
        let last = rel.poses().last().unwrap();
        assert!(last.orientation.w > 1.0 - 1e-9);
        assert!(last.position.iter().all(|v| v.abs() < 1e-12));
    }
}
