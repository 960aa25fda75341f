//! End-to-end library tests: alignment, model fitting, features, and
//! classification working together on trajectory-shaped data.

use map_core::align::{align_pair, align_pair_without_warping};
use map_core::classifier::{classify, ClassStats, NaiveBayesModel};
use map_core::features::extract_features;
use map_core::gp::{fit_model_set, WrenchComponent, WrenchModelSet};
use map_core::quat::Quat;
use map_core::synth::{generate_with_modes, FailureMode, ScenarioSpec, Task};
use map_core::trajectory::{Label, Pose, Trajectory, WrenchSample};

fn smooth(s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    s * s * (3.0 - 2.0 * s)
}

/// Noise-free snap-fit-like trajectory: descend, then press with a spring
/// ramp that releases. `offset` shifts the pre-contact positions only and
/// decays to zero exactly at contact; the wrench there is exactly zero.
fn pressing_trajectory(id: &str, offset: f64, label: Option<Label>) -> Trajectory {
    let n = 40;
    let contact = 24;
    let goal = Pose { position: [0.4, 0.1, 0.2], orientation: Quat::IDENTITY };
    let mut timestamps = Vec::new();
    let mut poses = Vec::new();
    let mut wrenches = Vec::new();
    for i in 0..n {
        timestamps.push(i as f64 * 0.05);
        let (z, decay, fz) = if i <= contact {
            let s = i as f64 / contact as f64;
            (0.012 + (0.08 - 0.012) * (1.0 - smooth(s)), 1.0 - smooth(s), 0.0)
        } else {
            let s = (i - contact) as f64 / (n - 1 - contact) as f64;
            let fz = if s <= 0.7 { 18.0 * (s / 0.7) } else { 4.5 };
            (0.012 * (1.0 - s), 0.0, fz)
        };
        poses.push(Pose {
            position: [
                goal.position[0] + offset * decay,
                goal.position[1],
                goal.position[2] + z + offset * decay,
            ],
            orientation: Quat::IDENTITY,
        });
        wrenches.push(WrenchSample { force: [0.0, 0.0, fz], torque: [0.0; 3] });
    }
    Trajectory::new(id.into(), timestamps, poses, wrenches, goal, label).unwrap()
}

fn fit_pair(demo: &Trajectory, rep: &Trajectory, warp: bool) -> (WrenchModelSet, WrenchModelSet) {
    let demo_rel = demo.relativize_to_goal();
    let rep_rel = rep.relativize_to_goal();
    let pair = if warp {
        align_pair(&demo_rel, &rep_rel).unwrap()
    } else {
        align_pair_without_warping(&demo_rel, &rep_rel).unwrap()
    };
    let demo_set = fit_model_set(pair.demo_inputs(), pair.demo_wrench()).unwrap();
    let rep_set = fit_model_set(pair.rep_inputs(), pair.rep_wrench()).unwrap();
    (demo_set, rep_set)
}

/// A pre-contact start offset, with the wrench identically zero in the
/// offset region, must not disturb the fitted hyperparameters by more
/// than 20% per component, and must not change the assessment.
#[test]
fn start_offset_leaves_fit_and_assessment_unchanged() {
    let demo = pressing_trajectory("demo", 0.0, None);
    let base = pressing_trajectory("base", 0.0, Some(Label::Success));
    let shifted = pressing_trajectory("shifted", 0.03, Some(Label::Success));

    let (demo_set, base_set) = fit_pair(&demo, &base, false);
    let (_, shifted_set) = fit_pair(&demo, &shifted, false);

    let c = WrenchComponent::Fz;
    let pb = base_set.model(c).params();
    let ps = shifted_set.model(c).params();
    let within = |a: f64, b: f64| (a - b).abs() <= 0.20 * b.abs();
    assert!(within(ps.theta0, pb.theta0), "theta0 {} vs {}", ps.theta0, pb.theta0);
    assert!(within(ps.theta1, pb.theta1), "theta1 {} vs {}", ps.theta1, pb.theta1);
    assert!(within(ps.sigma2, pb.sigma2), "sigma2 {} vs {}", ps.sigma2, pb.sigma2);

    let f_base = extract_features(&demo_set, &base_set).unwrap();
    let f_shifted = extract_features(&demo_set, &shifted_set).unwrap();

    // Any reasonable decision boundary around the unshifted features must
    // classify the shifted reproduction identically.
    let model = NaiveBayesModel {
        success: ClassStats { mu: f_base.m, sigma: [0.1; 6], prior: 0.5, count: 4 },
        failure: ClassStats { mu: [0.5; 6], sigma: [0.1; 6], prior: 0.5, count: 4 },
    };
    let a = classify(&model, "base", &f_base).unwrap();
    let b = classify(&model, "shifted", &f_shifted).unwrap();
    assert_eq!(a.predicted, Label::Success);
    assert_eq!(b.predicted, a.predicted);
    assert!((a.p_success - b.p_success).abs() < 0.05);
}

/// A jammed reproduction deviates most in the contact-normal force, so
/// that component must dominate its normalized feature vector and exceed
/// the same feature of a successful reproduction.
#[test]
fn jam_reproduction_is_dominated_by_contact_normal_force() {
    let spec = ScenarioSpec { n_samples: 36, ..ScenarioSpec::snapfit(41) };
    let ds = generate_with_modes(&spec, &[FailureMode::None, FailureMode::Jam]);
    assert_eq!(spec.task, Task::SnapFit);

    let demo_rel = ds.demo.relativize_to_goal();
    let demo_set = fit_model_set(
        &demo_rel.input_matrix(),
        &demo_rel.wrench_matrix(),
    )
    .unwrap();

    let mut features = Vec::new();
    for rep in &ds.reps {
        let pair = align_pair(&demo_rel, &rep.relativize_to_goal()).unwrap();
        let rep_set = fit_model_set(pair.rep_inputs(), pair.rep_wrench()).unwrap();
        features.push(extract_features(&demo_set, &rep_set).unwrap());
    }

    let fz = WrenchComponent::Fz.index();
    let jam = &features[1];
    let argmax = (0..6).max_by(|&a, &b| jam.m[a].partial_cmp(&jam.m[b]).unwrap()).unwrap();
    assert_eq!(argmax, fz, "jam features {:?}", jam.m);
    assert!(jam.raw_h[fz] > features[0].raw_h[fz]);
    assert!(!jam.degenerate);
}
