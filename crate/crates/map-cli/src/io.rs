//! Trajectory and dataset files.
//!
//! A trajectory is a CSV with the fixed header
//! `t,x,y,z,qw,qx,qy,qz,fx,fy,fz,tx,ty,tz` plus a JSON sidecar of the
//! same stem carrying id, goal pose, and optional outcome label. A
//! dataset directory holds exactly one trajectory under `demo/` and any
//! number under `reps/`. Floats are written with `Display`, the shortest
//! round-trip form, so equal data always produces equal bytes.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use map_core::quat::Quat;
use map_core::synth::{GeneratorManifest, SyntheticDataset};
use map_core::trajectory::{Label, Pose, Trajectory, WrenchSample};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const CSV_HEADER: &str = "t,x,y,z,qw,qx,qy,qz,fx,fy,fz,tx,ty,tz";

/// JSON sidecar next to each trajectory CSV.
#[derive(Debug, Serialize, Deserialize)]
pub struct Sidecar {
    pub id: String,
    pub goal_pose: SidecarPose,
    /// `"success"`, `"failure"`, or null when the outcome is unknown.
    pub label: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SidecarPose {
    pub position: [f64; 3],
    /// Scalar-first unit quaternion `(w, x, y, z)`.
    pub orientation: [f64; 4],
}

impl SidecarPose {
    fn to_pose(&self) -> Pose {
        let [w, x, y, z] = self.orientation;
        Pose { position: self.position, orientation: Quat::new(w, x, y, z) }
    }

    fn from_pose(p: Pose) -> SidecarPose {
        SidecarPose {
            position: p.position,
            orientation: [p.orientation.w, p.orientation.x, p.orientation.y, p.orientation.z],
        }
    }
}

/// A dataset directory read back into memory.
#[derive(Debug)]
pub struct Dataset {
    pub root: PathBuf,
    pub demo: Trajectory,
    /// Sorted by file name, so the order is stable across runs.
    pub reps: Vec<Trajectory>,
}

fn parse_field(
    path: &Path,
    row: usize,
    name: &str,
    field: &str,
) -> Result<f64, CliError> {
    f64::from_str(field.trim()).map_err(|_| CliError::Csv {
        path: path.to_path_buf(),
        row,
        message: format!("{name}: not a number: {field:?}"),
    })
}

/// Reads one trajectory CSV plus its sidecar. A missing sidecar is
/// tolerated: the id falls back to the file stem and the goal pose to the
/// final sample, with a note pushed onto `warnings`.
pub fn read_trajectory(
    path: &Path,
    warnings: &mut Vec<String>,
) -> Result<Trajectory, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("").trim_end();
    if header != CSV_HEADER {
        return Err(CliError::Csv {
            path: path.to_path_buf(),
            row: 0,
            message: format!("header must be {CSV_HEADER:?}, got {header:?}"),
        });
    }

    let mut timestamps = Vec::new();
    let mut poses = Vec::new();
    let mut wrenches = Vec::new();
    const NAMES: [&str; 14] =
        ["t", "x", "y", "z", "qw", "qx", "qy", "qz", "fx", "fy", "fz", "tx", "ty", "tz"];
    for (i, line) in lines.enumerate() {
        let row = i + 1;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != NAMES.len() {
            return Err(CliError::Csv {
                path: path.to_path_buf(),
                row,
                message: format!("expected {} columns, got {}", NAMES.len(), fields.len()),
            });
        }
        let mut v = [0.0f64; 14];
        for (k, field) in fields.iter().enumerate() {
            v[k] = parse_field(path, row, NAMES[k], field)?;
        }
        timestamps.push(v[0]);
        poses.push(Pose {
            position: [v[1], v[2], v[3]],
            orientation: Quat::new(v[4], v[5], v[6], v[7]),
        });
        wrenches.push(WrenchSample { force: [v[8], v[9], v[10]], torque: [v[11], v[12], v[13]] });
    }

    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| String::from("trajectory"));
    let sidecar_path = path.with_extension("json");
    let (id, goal_pose, label) = if sidecar_path.exists() {
        let text =
            fs::read_to_string(&sidecar_path).map_err(|e| CliError::io(&sidecar_path, e))?;
        let sidecar: Sidecar = serde_json::from_str(&text)
            .map_err(|source| CliError::Json { path: sidecar_path.clone(), source })?;
        let label = match sidecar.label.as_deref() {
            None => None,
            Some(s) => Some(Label::from_str(s).map_err(|e| CliError::Format {
                path: sidecar_path.clone(),
                message: e.to_string(),
            })?),
        };
        (sidecar.id, sidecar.goal_pose.to_pose(), label)
    } else {
        warnings.push(format!(
            "{}: no sidecar; goal pose falls back to the final sample",
            path.display()
        ));
        let final_pose = *poses.last().ok_or_else(|| CliError::Csv {
            path: path.to_path_buf(),
            row: 1,
            message: String::from("no data rows"),
        })?;
        (stem, final_pose, None)
    };

    Trajectory::new(id, timestamps, poses, wrenches, goal_pose, label)
        .map_err(|source| CliError::Trajectory { path: path.to_path_buf(), source })
}

/// Writes `<id>.csv` and `<id>.json` under `dir`.
pub fn write_trajectory(dir: &Path, t: &Trajectory) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;

    let mut csv = String::with_capacity(64 * t.len());
    csv.push_str(CSV_HEADER);
    csv.push('\n');
    for i in 0..t.len() {
        let p = t.poses()[i];
        let q = p.orientation;
        let w = t.wrenches()[i].as_array();
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            t.timestamps()[i],
            p.position[0],
            p.position[1],
            p.position[2],
            q.w,
            q.x,
            q.y,
            q.z,
            w[0],
            w[1],
            w[2],
            w[3],
            w[4],
            w[5],
        ));
    }
    let csv_path = dir.join(format!("{}.csv", t.id()));
    fs::write(&csv_path, csv).map_err(|e| CliError::io(&csv_path, e))?;

    let sidecar = Sidecar {
        id: String::from(t.id()),
        goal_pose: SidecarPose::from_pose(t.goal_pose()),
        label: t.label().map(|l| String::from(l.as_str())),
    };
    let json_path = dir.join(format!("{}.json", t.id()));
    write_json(&json_path, &sidecar)?;
    Ok(csv_path)
}

/// Serializes pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|source| CliError::Json { path: path.to_path_buf(), source })?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn csv_files_sorted(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();
    let entries = fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| CliError::io(dir, e))?;
        let path = entry.path();
        if path.extension().is_some_and(|e| e == "csv") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Reads the single demonstration under `<root>/demo/`.
pub fn read_demo(root: &Path, warnings: &mut Vec<String>) -> Result<Trajectory, CliError> {
    let demo_dir = root.join("demo");
    let demos = csv_files_sorted(&demo_dir)?;
    match demos.as_slice() {
        [] => Err(CliError::MissingDemo { dir: demo_dir }),
        [one] => read_trajectory(one, warnings),
        many => Err(CliError::AmbiguousDemo { dir: demo_dir, count: many.len() }),
    }
}

/// Reads a dataset directory: exactly one trajectory under `demo/`,
/// reproductions under `reps/` sorted by file name.
pub fn read_dataset(root: &Path, warnings: &mut Vec<String>) -> Result<Dataset, CliError> {
    let demo = read_demo(root, warnings)?;
    let reps_dir = root.join("reps");
    let mut reps = Vec::new();
    if reps_dir.is_dir() {
        for path in csv_files_sorted(&reps_dir)? {
            reps.push(read_trajectory(&path, warnings)?);
        }
    }
    Ok(Dataset { root: root.to_path_buf(), demo, reps })
}

/// Generator manifest as persisted JSON.
#[derive(Debug, Serialize, Deserialize)]
pub struct ManifestFile {
    pub task: String,
    pub seed: u64,
    pub n_samples: usize,
    pub start_jitter: f64,
    /// Failure mode per reproduction, in order; `"none"` is a success.
    pub modes: Vec<String>,
    pub style: StyleFile,
    pub goal_position: [f64; 3],
    pub noise_force_std: f64,
    pub noise_torque_std: f64,
    pub rep_amplitude_bias: f64,
    pub sample_dt: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct StyleFile {
    pub contact_onset: f64,
    pub peak_scale: f64,
    pub saw_phase: f64,
    pub revolutions: f64,
}

impl ManifestFile {
    pub fn from_manifest(m: &GeneratorManifest) -> ManifestFile {
        ManifestFile {
            task: String::from(m.task.as_str()),
            seed: m.seed,
            n_samples: m.n_samples,
            start_jitter: m.start_jitter,
            modes: m.modes.iter().map(|mode| String::from(mode.as_str())).collect(),
            style: StyleFile {
                contact_onset: m.style.contact_onset,
                peak_scale: m.style.peak_scale,
                saw_phase: m.style.saw_phase,
                revolutions: m.style.revolutions,
            },
            goal_position: m.goal_position,
            noise_force_std: m.noise_force_std,
            noise_torque_std: m.noise_torque_std,
            rep_amplitude_bias: m.rep_amplitude_bias,
            sample_dt: m.sample_dt,
        }
    }
}

fn dir_is_nonempty(dir: &Path) -> Result<bool, CliError> {
    if !dir.exists() {
        return Ok(false);
    }
    let mut entries = fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    Ok(entries.next().is_some())
}

/// Writes a generated dataset under `root`: `demo/`, `reps/`, and
/// `manifest.json`. Refuses a non-empty target unless `force`.
pub fn write_dataset(
    root: &Path,
    data: &SyntheticDataset,
    force: bool,
) -> Result<(), CliError> {
    if !force && dir_is_nonempty(root)? {
        return Err(CliError::TargetNotEmpty { dir: root.display().to_string() });
    }
    fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
    write_trajectory(&root.join("demo"), &data.demo)?;
    let reps_dir = root.join("reps");
    for rep in &data.reps {
        write_trajectory(&reps_dir, rep)?;
    }
    write_json(&root.join("manifest.json"), &ManifestFile::from_manifest(&data.manifest))
}
