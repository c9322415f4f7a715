//! Gradient-based pose observer on SE(3) with visibility-filtered landmarks.
//!
//! Poses are camera-to-world transforms in metres. Scene data (cm) is scaled
//! by [`METRES_PER_CM`] on the way in. The estimate follows
//! `X̂̇ = X̂ (U − ε − k₀ 𝒫(Δ))` where `ε` is the gradient of
//! `f = ½ k Σ ‖X̂⁻¹Cᵢ − X⁻¹Cᵢ‖²` pulled back to the identity.

use nalgebra::{Matrix3, Matrix4, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coverage::{camera_coords, occlusion_criterion};
use crate::deployment::{Deployment, Scene};
use crate::error::{Error, Result};
use crate::geometry::{
    homogeneous, rotation_from_angles, se3_exp, se3_from_parts, se3_inverse, se3_rotation, se3_step, se3_translation,
    Pose6, SE3Matrix, Twist, Vec3,
};

pub const METRES_PER_CM: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Visibility {
    /// Every landmark is measured at every step.
    Ideal,
    /// Only landmarks with coverage strength ≥ thold are measured.
    #[default]
    CameraModel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObserverConfig {
    /// Cost weight k_i.
    pub gain: f64,
    /// Output-injection weight k₀.
    #[serde(default)]
    pub injection_gain: f64,
    pub dt: f64,
    #[serde(default)]
    pub visibility: Visibility,
    /// Decide visibility from the estimate instead of the true pose.
    #[serde(default)]
    pub visibility_from_estimate: bool,
}

impl Default for ObserverConfig {
    fn default() -> Self {
        Self { gain: 0.2, injection_gain: 0.0, dt: 0.01, visibility: Visibility::CameraModel, visibility_from_estimate: false }
    }
}

impl ObserverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gain >= 0.0 && self.gain.is_finite()) {
            return Err(Error::invalid("observer gain must be finite and >= 0"));
        }
        if !(self.injection_gain >= 0.0 && self.injection_gain.is_finite()) {
            return Err(Error::invalid("injection gain must be finite and >= 0"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid("dt must be > 0"));
        }
        Ok(())
    }
}

/// Camera-to-world transform (metres) of a camera pose given in scene units.
pub fn pose_to_se3(pose: &Pose6) -> SE3Matrix {
    let r = rotation_from_angles(pose.yaw, pose.pitch, pose.roll);
    se3_from_parts(&r.transpose(), &(pose.position * METRES_PER_CM))
}

/// Inverse of [`pose_to_se3`].
pub fn se3_to_pose(x: &SE3Matrix) -> Pose6 {
    let r: Matrix3<f64> = se3_rotation(x).transpose();
    // Third row of the world-to-camera rotation is the optical axis.
    let pitch = r[(2, 2)].clamp(-1.0, 1.0).asin();
    let yaw = r[(2, 0)].atan2(r[(2, 1)]);
    let partial = rotation_from_angles(yaw, pitch, 0.0);
    let roll_only = r * partial.transpose();
    let roll = roll_only[(1, 0)].atan2(roll_only[(0, 0)]);
    let wrap = |a: f64| if a >= std::f64::consts::PI { -std::f64::consts::PI } else { a };
    Pose6::new(se3_translation(x) / METRES_PER_CM, wrap(yaw), pitch, wrap(roll))
}

/// Squared Frobenius distance between estimate and truth.
pub fn estimation_error(estimate: &SE3Matrix, truth: &SE3Matrix) -> f64 {
    (estimate - truth).norm_squared()
}

/// `½ k Σ ‖X̂⁻¹Cᵢ − X⁻¹Cᵢ‖²` over homogeneous landmark points.
pub fn observer_cost(estimate: &SE3Matrix, truth: &SE3Matrix, landmarks: &[Vector4<f64>], gain: f64) -> f64 {
    let (ei, ti) = (se3_inverse(estimate), se3_inverse(truth));
    0.5 * gain * landmarks.iter().map(|c| (ei * c - ti * c).norm_squared()).sum::<f64>()
}

/// Gradient of [`observer_cost`] at `X̂`, left-translated to the identity.
pub fn epsilon(estimate: &SE3Matrix, truth: &SE3Matrix, landmarks: &[Vector4<f64>], gain: f64) -> Twist {
    let (ei, ti) = (se3_inverse(estimate), se3_inverse(truth));
    let mut m = Matrix4::zeros();
    for c in landmarks {
        let a = ei * c;
        m += (a - ti * c) * a.transpose();
    }
    Twist::project(&m) * -gain
}

/// `Σ X⁻¹Cᵢ`.
pub fn outputs(x: &SE3Matrix, landmarks: &[Vector4<f64>]) -> Vector4<f64> {
    let inv = se3_inverse(x);
    landmarks.iter().map(|c| inv * c).sum()
}

/// Output-injection surrogate: `(Ŷ − Y)` against the mean estimated landmark,
/// signed so that for one landmark it matches the gradient direction.
fn injection(estimate: &SE3Matrix, truth: &SE3Matrix, landmarks: &[Vector4<f64>]) -> Twist {
    if landmarks.is_empty() {
        return Twist::zero();
    }
    let count = landmarks.len() as f64;
    let y_hat = outputs(estimate, landmarks);
    let diff = y_hat - outputs(truth, landmarks);
    let mean = y_hat / count;
    Twist::project(&(diff * mean.transpose() * (-1.0 / count)))
}

/// One Euler step of the observer.
pub fn observer_step(
    estimate: &SE3Matrix,
    truth: &SE3Matrix,
    input: &Twist,
    landmarks: &[Vector4<f64>],
    config: &ObserverConfig,
) -> SE3Matrix {
    let mut u = *input - epsilon(estimate, truth, landmarks, config.gain);
    if config.injection_gain > 0.0 {
        u = u - injection(estimate, truth, landmarks) * config.injection_gain;
    }
    se3_step(estimate, &u, config.dt)
}

/// Piecewise-constant body twist held for `duration` seconds. Angular rates
/// in rad/s, linear rates in scene units per second.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwistSegment {
    pub duration: f64,
    pub twist: Twist,
}

/// Camera trajectory and initial estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectorySpec {
    pub schema: u32,
    /// Initial camera pose (scene units).
    pub initial: Pose6,
    pub segments: Vec<TwistSegment>,
    /// `X̂₀ = X₀ · exp(offset)`; linear part in scene units.
    #[serde(default)]
    pub estimate_offset: Twist,
    #[serde(default)]
    pub seed: Option<u64>,
}

pub const TRAJECTORY_SCHEMA: u32 = 1;

impl TrajectorySpec {
    pub fn static_pose(initial: Pose6, duration: f64, estimate_offset: Twist) -> Self {
        Self {
            schema: TRAJECTORY_SCHEMA,
            initial,
            segments: vec![TwistSegment { duration, twist: Twist::zero() }],
            estimate_offset,
            seed: None,
        }
    }

    pub fn duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != TRAJECTORY_SCHEMA {
            return Err(Error::Schema(format!("unsupported trajectory schema {}", self.schema)));
        }
        self.initial.validate()?;
        if self.segments.iter().any(|s| !(s.duration >= 0.0 && s.duration.is_finite())) {
            return Err(Error::invalid("segment durations must be finite and >= 0"));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trajectory serializes")
    }
}

/// Twist converted from scene units to metres.
fn to_metres(t: &Twist) -> Twist {
    Twist::new(t.omega, t.v * METRES_PER_CM)
}

/// Number of integration steps of each segment.
fn segment_steps(duration: f64, dt: f64) -> usize {
    (duration / dt).round() as usize
}

/// Settings for seeded random-walk trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomWalk {
    pub duration: f64,
    /// Length of each constant-twist segment (s).
    pub segment: f64,
    /// Maximum linear speed (scene units per second).
    pub linear_speed: f64,
    /// Maximum angular speed (rad/s).
    pub angular_speed: f64,
    /// Norm of the initial estimate offset (rotation in rad, translation in scene units).
    pub offset: f64,
}

impl Default for RandomWalk {
    fn default() -> Self {
        Self { duration: 60.0, segment: 1.0, linear_speed: 30.0, angular_speed: 0.5, offset: 0.2 }
    }
}

fn random_direction(rng: &mut impl Rng) -> Vec3 {
    loop {
        let v = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Seeded random movement inside the reachable region. Each segment's twist
/// is redrawn until the integrated path stays inside; after 100 failed draws
/// the camera holds still for that segment.
pub fn random_walk(scene: &Scene, walk: &RandomWalk, dt: f64, seed: u64) -> Result<TrajectorySpec> {
    if !(walk.duration >= 0.0 && walk.segment > 0.0 && dt > 0.0) {
        return Err(Error::invalid("random walk needs duration >= 0, segment > 0, dt > 0"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = (scene.reachable_min(), scene.reachable_max());
    let position = Vec3::from_fn(|i, _| rng.random_range(lo[i]..=hi[i]));
    let yaw = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
    let pitch = rng.random_range(-0.5..0.5);
    let initial = Pose6::new(position, yaw, pitch, 0.0);
    let mut x = pose_to_se3(&initial);
    let mut segments = Vec::new();
    let mut remaining = walk.duration;
    while remaining > 1e-12 {
        let duration = walk.segment.min(remaining);
        let steps = segment_steps(duration, dt);
        let mut chosen = None;
        for _ in 0..100 {
            let twist = Twist::new(
                random_direction(&mut rng) * walk.angular_speed * rng.random::<f64>(),
                random_direction(&mut rng) * walk.linear_speed * rng.random::<f64>(),
            );
            let body = to_metres(&twist);
            let mut y = x;
            let inside = (0..steps).all(|_| {
                y = se3_step(&y, &body, dt);
                scene.in_reachable(&(se3_translation(&y) / METRES_PER_CM))
            });
            if inside {
                chosen = Some((twist, y));
                break;
            }
        }
        let (twist, end) = chosen.unwrap_or((Twist::zero(), x));
        segments.push(TwistSegment { duration, twist });
        x = end;
        remaining -= duration;
    }
    let offset = Twist::new(random_direction(&mut rng), random_direction(&mut rng));
    let offset = offset * (walk.offset / offset.norm());
    Ok(TrajectorySpec { schema: TRAJECTORY_SCHEMA, initial, segments, estimate_offset: offset, seed: Some(seed) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub t: f64,
    pub error: f64,
    pub visible: usize,
    pub qualified: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObserverTrace {
    pub rows: Vec<TraceRow>,
    pub truth: Vec<SE3Matrix>,
    pub estimate: Vec<SE3Matrix>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    #[serde(rename = "final_Er")]
    pub final_er: f64,
    #[serde(rename = "mean_Er")]
    pub mean_er: f64,
    pub qualified_time_ratio: f64,
    pub steps: usize,
}

impl ObserverTrace {
    pub fn summary(&self) -> TraceSummary {
        let count = self.rows.len() as f64;
        TraceSummary {
            final_er: self.rows.last().map_or(0.0, |r| r.error),
            mean_er: self.rows.iter().map(|r| r.error).sum::<f64>() / count,
            qualified_time_ratio: self.rows.iter().filter(|r| r.qualified).count() as f64 / count,
            steps: self.rows.len().saturating_sub(1),
        }
    }

    /// `t,Er,visible_count,qualified_flag` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,Er,visible_count,qualified_flag\n");
        for r in &self.rows {
            out.push_str(&format!("{:.16e},{:.16e},{},{}\n", r.t, r.error, r.visible, u8::from(r.qualified)));
        }
        out
    }
}

/// Landmarks measured by a camera at `pose`.
pub fn visible_landmarks(scene: &Scene, deployment: &Deployment, pose: &Pose6) -> Vec<usize> {
    let model = scene.camera_model();
    let landmarks = &deployment.landmarks;
    (0..landmarks.len())
        .filter(|&k| {
            let c = camera_coords(&landmarks[k], pose);
            if !model.in_fov(&c) || !model.in_focus(&c) {
                return false;
            }
            let unoccluded = occlusion_criterion(k, landmarks, &pose.position).unwrap_or(false);
            model.strength(&c, unoccluded) >= scene.coverage.thold
        })
        .collect()
}

/// Integrates camera and observer along a trajectory.
pub fn simulate(
    scene: &Scene,
    deployment: &Deployment,
    trajectory: &TrajectorySpec,
    config: &ObserverConfig,
) -> Result<ObserverTrace> {
    config.validate()?;
    trajectory.validate()?;
    let points: Vec<Vector4<f64>> =
        deployment.landmarks.iter().map(|l| homogeneous(&(l.position * METRES_PER_CM))).collect();
    let mut x = pose_to_se3(&trajectory.initial);
    let mut x_hat = x * se3_exp(&to_metres(&trajectory.estimate_offset));
    let schedule: Vec<Twist> = trajectory
        .segments
        .iter()
        .flat_map(|s| std::iter::repeat_n(to_metres(&s.twist), segment_steps(s.duration, config.dt)))
        .collect();
    let mut trace = ObserverTrace {
        rows: Vec::with_capacity(schedule.len() + 1),
        truth: Vec::with_capacity(schedule.len() + 1),
        estimate: Vec::with_capacity(schedule.len() + 1),
    };
    let mut measured = Vec::with_capacity(points.len());
    for step in 0..=schedule.len() {
        let t = step as f64 * config.dt;
        let position = se3_translation(&x) / METRES_PER_CM;
        if !scene.in_reachable(&position) {
            return Err(Error::TrajectoryOutOfRegion { t, position: [position.x, position.y, position.z] });
        }
        measured.clear();
        match config.visibility {
            Visibility::Ideal => measured.extend_from_slice(&points),
            Visibility::CameraModel => {
                let pose = se3_to_pose(if config.visibility_from_estimate { &x_hat } else { &x });
                measured.extend(visible_landmarks(scene, deployment, &pose).into_iter().map(|k| points[k]));
            }
        }
        trace.rows.push(TraceRow {
            t,
            error: estimation_error(&x_hat, &x),
            visible: measured.len(),
            qualified: measured.len() >= scene.coverage.n,
        });
        trace.truth.push(x);
        trace.estimate.push(x_hat);
        if let Some(u) = schedule.get(step) {
            x_hat = observer_step(&x_hat, &x, u, &measured, config);
            x = se3_step(&x, u, config.dt);
        }
    }
    Ok(trace)
}
