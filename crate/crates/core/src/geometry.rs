//! Frames, rotations, rigid transforms, and the camera and landmark models.
//!
//! World positions are in centimetres; camera optics are in millimetres.
//! [`cm_to_mm`] is the single place where one becomes the other.
//!
//! The world-to-local rotation is `R = R_roll * R_pitch * R_yaw * B`, where `B`
//! is a fixed axis permutation. With all angles zero a local frame looks along
//! world `+Y` with its `Y` axis pointing down (world `-Z`).

use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;
pub type RotationMatrix = Matrix3<f64>;
pub type SE3Matrix = Matrix4<f64>;

pub const MM_PER_CM: f64 = 10.0;

/// Drift of `RᵀR` from identity above which [`se3_step`] re-orthonormalizes.
const ORTHONORMAL_DRIFT: f64 = 1e-9;

/// Converts a world-space length (cm) to camera-optics units (mm).
#[inline]
pub fn cm_to_mm(v: Vec3) -> Vec3 {
    v * MM_PER_CM
}

/// Fixed axis permutation applied after the yaw/pitch/roll factors.
#[rustfmt::skip]
pub fn base_permutation() -> RotationMatrix {
    Matrix3::new(
        1.0, 0.0,  0.0,
        0.0, 0.0, -1.0,
        0.0, 1.0,  0.0,
    )
}

#[rustfmt::skip]
fn yaw_factor(a: f64) -> RotationMatrix {
    let (s, c) = a.sin_cos();
    Matrix3::new(
        c,   0.0, -s,
        0.0, 1.0, 0.0,
        s,   0.0, c,
    )
}

#[rustfmt::skip]
fn pitch_factor(b: f64) -> RotationMatrix {
    let (s, c) = b.sin_cos();
    Matrix3::new(
        1.0, 0.0, 0.0,
        0.0, c,   s,
        0.0, -s,  c,
    )
}

#[rustfmt::skip]
fn roll_factor(g: f64) -> RotationMatrix {
    let (s, c) = g.sin_cos();
    Matrix3::new(
        c,   -s,  0.0,
        s,   c,   0.0,
        0.0, 0.0, 1.0,
    )
}

/// World-to-local rotation for a frame with the given yaw, pitch and roll.
pub fn rotation_from_angles(yaw: f64, pitch: f64, roll: f64) -> RotationMatrix {
    roll_factor(roll) * pitch_factor(pitch) * yaw_factor(yaw) * base_permutation()
}

/// Wraps an angle into `[-π, π)`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    if w >= PI {
        -PI
    } else {
        w
    }
}

/// Position and yaw/pitch/roll of a frame in the world.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose6 {
    pub position: Vec3,
    pub yaw: f64,
    pub pitch: f64,
    pub roll: f64,
}

impl Pose6 {
    pub fn new(position: Vec3, yaw: f64, pitch: f64, roll: f64) -> Self {
        Self { position, yaw, pitch, roll }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.position.iter().all(|c| c.is_finite()) {
            return Err(Error::invalid("pose position must be finite"));
        }
        if !(-PI..PI).contains(&self.yaw) || !(-PI..PI).contains(&self.roll) {
            return Err(Error::invalid("yaw and roll must lie in [-pi, pi)"));
        }
        if !(-FRAC_PI_2..=FRAC_PI_2).contains(&self.pitch) {
            return Err(Error::invalid("pitch must lie in [-pi/2, pi/2]"));
        }
        Ok(())
    }

    pub fn rotation(&self) -> RotationMatrix {
        rotation_from_angles(self.yaw, self.pitch, self.roll)
    }
}

/// Coordinates of world point `s` in `frame`.
pub fn world_to_local(s: &Vec3, frame: &Pose6) -> Vec3 {
    frame.rotation() * (s - frame.position)
}

pub fn local_to_world(s_local: &Vec3, frame: &Pose6) -> Vec3 {
    frame.rotation().transpose() * s_local + frame.position
}

/// A directional plate landmark.
///
/// `roll` is carried for completeness but never affects visibility.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Landmark {
    /// Centre of the plate (cm).
    pub position: Vec3,
    /// ρ ∈ [-π, π)
    pub yaw: f64,
    /// η ∈ [-π/2, π/2]
    pub pitch: f64,
    /// μ ∈ [-π, π)
    pub roll: f64,
    /// Virtual diameter used by the occlusion test (cm).
    pub diameter: f64,
}

impl Landmark {
    pub fn new(position: Vec3, yaw: f64, pitch: f64, diameter: f64) -> Self {
        Self { position, yaw, pitch, roll: 0.0, diameter }
    }

    /// Builds a landmark whose front face points along `normal`.
    pub fn facing(position: Vec3, normal: &Vec3, diameter: f64) -> Self {
        let (yaw, pitch) = normal_to_angles(normal);
        Self::new(position, yaw, pitch, diameter)
    }

    pub fn normal(&self) -> Vec3 {
        landmark_normal(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.position.iter().all(|c| c.is_finite()) {
            return Err(Error::invalid("landmark position must be finite"));
        }
        if !(-PI..PI).contains(&self.yaw) || !(-PI..PI).contains(&self.roll) {
            return Err(Error::invalid("landmark yaw and roll must lie in [-pi, pi)"));
        }
        if !(-FRAC_PI_2..=FRAC_PI_2).contains(&self.pitch) {
            return Err(Error::invalid("landmark pitch must lie in [-pi/2, pi/2]"));
        }
        if !(self.diameter > 0.0 && self.diameter.is_finite()) {
            return Err(Error::invalid("landmark diameter must be positive"));
        }
        Ok(())
    }
}

/// Unit front-face normal of a landmark in world coordinates.
pub fn landmark_normal(landmark: &Landmark) -> Vec3 {
    let (sr, cr) = landmark.yaw.sin_cos();
    let (se, ce) = landmark.pitch.sin_cos();
    Vector3::new(-sr * ce, cr * ce, -se)
}

/// Inverse of [`landmark_normal`]: (yaw, pitch) whose normal is `normal`.
pub fn normal_to_angles(normal: &Vec3) -> (f64, f64) {
    let n = normal.normalize();
    let pitch = (-n.z).clamp(-1.0, 1.0).asin();
    let yaw = if n.x.abs() < 1e-15 && n.y.abs() < 1e-15 {
        0.0
    } else {
        wrap_angle((-n.x).atan2(n.y))
    };
    (yaw, pitch)
}

/// Focusing distance of the lens; `Infinite` for a lens focused at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FocusRepr", into = "FocusRepr")]
pub enum FocusDistance {
    Finite(f64),
    Infinite,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum FocusRepr {
    Number(f64),
    Text(String),
}

impl TryFrom<FocusRepr> for FocusDistance {
    type Error = String;

    fn try_from(r: FocusRepr) -> std::result::Result<Self, String> {
        match r {
            FocusRepr::Number(v) => Ok(FocusDistance::Finite(v)),
            FocusRepr::Text(s) if matches!(s.as_str(), "inf" | "infinity" | "+inf") => {
                Ok(FocusDistance::Infinite)
            }
            FocusRepr::Text(s) => Err(format!("focus distance must be a number or \"inf\", got {s:?}")),
        }
    }
}

impl From<FocusDistance> for FocusRepr {
    fn from(d: FocusDistance) -> Self {
        match d {
            FocusDistance::Finite(v) => FocusRepr::Number(v),
            FocusDistance::Infinite => FocusRepr::Text("inf".into()),
        }
    }
}

/// Pinhole camera intrinsics. Lengths in mm, image quantities in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraIntrinsics {
    /// f
    pub focal_length: f64,
    /// s_u (mm/pixel)
    pub pixel_width: f64,
    /// s_v (mm/pixel)
    pub pixel_height: f64,
    /// (o_u, o_v)
    pub principal_point: [f64; 2],
    pub image_width: f64,
    pub image_height: f64,
    /// d_a
    pub aperture: f64,
    /// d_s
    pub focus_distance: FocusDistance,
}

/// Half-angles from the optical axis to each image boundary (rad).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FovAngles {
    pub top: f64,
    pub bottom: f64,
    pub left: f64,
    pub right: f64,
}

impl FovAngles {
    pub fn min(&self) -> f64 {
        self.top.min(self.bottom).min(self.left).min(self.right)
    }
}

impl CameraIntrinsics {
    /// Camera used for the large-room simulations: 5 mm lens, 1600×1200 sensor.
    pub fn simulation() -> Self {
        Self {
            focal_length: 5.0,
            pixel_width: 0.0058,
            pixel_height: 0.0058,
            principal_point: [800.0, 600.0],
            image_width: 1600.0,
            image_height: 1200.0,
            aperture: 10.0,
            focus_distance: FocusDistance::Finite(1778.0),
        }
    }

    /// Camera used in the indoor-platform experiment: 24 mm lens focused at infinity.
    pub fn experiment() -> Self {
        Self {
            focal_length: 24.0,
            pixel_width: 0.0033,
            pixel_height: 0.0033,
            principal_point: [960.0, 540.0],
            image_width: 1920.0,
            image_height: 1080.0,
            aperture: 8.57,
            focus_distance: FocusDistance::Infinite,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("f", self.focal_length),
            ("s_u", self.pixel_width),
            ("s_v", self.pixel_height),
            ("w", self.image_width),
            ("h", self.image_height),
            ("d_a", self.aperture),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("intrinsic {name} must be positive, got {v}")));
            }
        }
        let [ou, ov] = self.principal_point;
        if !(0.0..=self.image_width).contains(&ou) || !(0.0..=self.image_height).contains(&ov) {
            return Err(Error::invalid("principal point must lie inside the image"));
        }
        if let FocusDistance::Finite(ds) = self.focus_distance {
            if !(ds > self.focal_length && ds.is_finite()) {
                return Err(Error::invalid(format!(
                    "focus distance d_s = {ds} must exceed the focal length"
                )));
            }
        }
        Ok(())
    }

    pub fn max_pixel(&self) -> f64 {
        self.pixel_width.max(self.pixel_height)
    }

    pub fn min_pixel(&self) -> f64 {
        self.pixel_width.min(self.pixel_height)
    }

    pub fn fov_half_angles(&self) -> FovAngles {
        fov_half_angles(self)
    }
}

pub fn fov_half_angles(k: &CameraIntrinsics) -> FovAngles {
    let [ou, ov] = k.principal_point;
    let f = k.focal_length;
    FovAngles {
        left: (ou * k.pixel_width / f).atan(),
        right: ((k.image_width - ou) * k.pixel_width / f).atan(),
        top: (ov * k.pixel_height / f).atan(),
        bottom: ((k.image_height - ov) * k.pixel_height / f).atan(),
    }
}

/// Element of se(3): angular rate `omega` and linear rate `v` (body frame).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Twist {
    pub omega: Vec3,
    pub v: Vec3,
}

impl Twist {
    pub fn new(omega: Vec3, v: Vec3) -> Self {
        Self { omega, v }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// 4×4 matrix form with a skew-symmetric rotation block.
    pub fn to_matrix(&self) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&skew(&self.omega));
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.v);
        m
    }

    /// Orthogonal (Frobenius) projection of an arbitrary 4×4 matrix onto se(3).
    pub fn project(m: &Matrix4<f64>) -> Self {
        let a = m.fixed_view::<3, 3>(0, 0);
        let s = (a - a.transpose()) * 0.5;
        Self {
            omega: Vector3::new(s[(2, 1)], s[(0, 2)], s[(1, 0)]),
            v: m.fixed_view::<3, 1>(0, 3).into_owned(),
        }
    }

    /// Frobenius inner product of the matrix forms.
    pub fn inner(&self, other: &Twist) -> f64 {
        2.0 * self.omega.dot(&other.omega) + self.v.dot(&other.v)
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).sqrt()
    }
}

impl Add for Twist {
    type Output = Twist;
    fn add(self, o: Twist) -> Twist {
        Twist::new(self.omega + o.omega, self.v + o.v)
    }
}

impl Sub for Twist {
    type Output = Twist;
    fn sub(self, o: Twist) -> Twist {
        Twist::new(self.omega - o.omega, self.v - o.v)
    }
}

impl Neg for Twist {
    type Output = Twist;
    fn neg(self) -> Twist {
        Twist::new(-self.omega, -self.v)
    }
}

impl Mul<f64> for Twist {
    type Output = Twist;
    fn mul(self, k: f64) -> Twist {
        Twist::new(self.omega * k, self.v * k)
    }
}

#[rustfmt::skip]
pub fn skew(w: &Vec3) -> Matrix3<f64> {
    Matrix3::new(
        0.0,  -w.z, w.y,
        w.z,  0.0,  -w.x,
        -w.y, w.x,  0.0,
    )
}

pub fn se3_from_parts(rotation: &RotationMatrix, translation: &Vec3) -> SE3Matrix {
    let mut m = Matrix4::identity();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(rotation);
    m.fixed_view_mut::<3, 1>(0, 3).copy_from(translation);
    m
}

pub fn se3_rotation(x: &SE3Matrix) -> RotationMatrix {
    x.fixed_view::<3, 3>(0, 0).into_owned()
}

pub fn se3_translation(x: &SE3Matrix) -> Vec3 {
    x.fixed_view::<3, 1>(0, 3).into_owned()
}

/// Closed-form inverse of a rigid transform.
pub fn se3_inverse(x: &SE3Matrix) -> SE3Matrix {
    let rt = se3_rotation(x).transpose();
    se3_from_parts(&rt, &(-(rt * se3_translation(x))))
}

/// Applies a rigid transform to a point given in homogeneous form.
pub fn homogeneous(p: &Vec3) -> Vector4<f64> {
    Vector4::new(p.x, p.y, p.z, 1.0)
}

/// Matrix exponential of a twist.
pub fn se3_exp(u: &Twist) -> SE3Matrix {
    let theta2 = u.omega.norm_squared();
    let theta = theta2.sqrt();
    let (a, b, c) = if theta < 1e-4 {
        (
            1.0 - theta2 / 6.0,
            0.5 - theta2 / 24.0,
            1.0 / 6.0 - theta2 / 120.0,
        )
    } else {
        let (s, co) = theta.sin_cos();
        (s / theta, (1.0 - co) / theta2, (theta - s) / (theta2 * theta))
    };
    let w = skew(&u.omega);
    let w2 = w * w;
    let r = Matrix3::identity() + w * a + w2 * b;
    let v = Matrix3::identity() + w * b + w2 * c;
    se3_from_parts(&r, &(v * u.v))
}

/// Largest entry of `|RᵀR - I|`.
pub fn orthonormality_error(r: &RotationMatrix) -> f64 {
    (r.transpose() * r - Matrix3::identity()).abs().max()
}

/// Nearest rotation matrix (polar decomposition).
pub fn orthonormalize(r: &RotationMatrix) -> RotationMatrix {
    let svd = r.svd(true, true);
    let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
    let mut out = u * vt;
    if out.determinant() < 0.0 {
        let mut u = u;
        u.column_mut(2).neg_mut();
        out = u * vt;
    }
    out
}

/// One Lie-group Euler step of `Ẋ = X U`: returns `X · exp(U dt)`.
pub fn se3_step(x: &SE3Matrix, u: &Twist, dt: f64) -> SE3Matrix {
    let mut next = x * se3_exp(&(*u * dt));
    let r = se3_rotation(&next);
    if orthonormality_error(&r) > ORTHONORMAL_DRIFT {
        next.fixed_view_mut::<3, 3>(0, 0).copy_from(&orthonormalize(&r));
    }
    next.fixed_view_mut::<1, 4>(3, 0).copy_from(&Vector4::new(0.0, 0.0, 0.0, 1.0).transpose());
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn assert_mat_close(a: &Matrix3<f64>, b: &Matrix3<f64>, tol: f64) {
        assert!((a - b).abs().max() < tol, "{a}\n!=\n{b}");
    }

    #[test]
    fn zero_angles_give_base_permutation() {
        #[rustfmt::skip]
        let expected = Matrix3::new(1.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0);
        assert_eq!(rotation_from_angles(0.0, 0.0, 0.0), expected);
    }

    #[test]
    fn quarter_yaw_matches_hand_product() {
        #[rustfmt::skip]
        let expected = Matrix3::new(0.0, -1.0, 0.0, 0.0, 0.0, -1.0, 1.0, 0.0, 0.0);
        assert_mat_close(&rotation_from_angles(FRAC_PI_2, 0.0, 0.0), &expected, 1e-15);
    }

    #[test]
    fn frame_origin_maps_to_zero() {
        let frame = Pose6::new(Vec3::new(3.0, -2.0, 7.0), 0.3, -0.4, 1.1);
        let local = world_to_local(&frame.position, &frame);
        assert!(local.norm() < 1e-15);
    }

    #[test]
    fn identity_frame_applies_base_permutation() {
        let frame = Pose6::new(Vec3::zeros(), 0.0, 0.0, 0.0);
        let local = world_to_local(&Vec3::new(1.0, 2.0, 3.0), &frame);
        assert_eq!(local, Vec3::new(1.0, -3.0, 2.0));
    }

    #[test]
    fn normals_at_reference_angles() {
        let n = |yaw, pitch| landmark_normal(&Landmark::new(Vec3::zeros(), yaw, pitch, 1.0));
        assert!((n(0.0, 0.0) - Vec3::new(0.0, 1.0, 0.0)).norm() < 1e-15);
        assert!((n(FRAC_PI_2, 0.0) - Vec3::new(-1.0, 0.0, 0.0)).norm() < 1e-15);
        assert!((n(0.0, FRAC_PI_2) - Vec3::new(0.0, 0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn fov_angles_for_both_cameras() {
        let sim = CameraIntrinsics::simulation().fov_half_angles();
        assert!((sim.left - (4.64f64 / 5.0).atan()).abs() < 1e-12);
        assert!((sim.left - 0.7480).abs() < 1e-4);
        assert_eq!(sim.left, sim.right);
        assert_eq!(sim.top, sim.bottom);
        let exp = CameraIntrinsics::experiment().fov_half_angles();
        assert!((exp.left - (3.168f64 / 24.0).atan()).abs() < 1e-12);
        assert!((exp.left - 0.1313).abs() < 1e-4);
    }

    #[test]
    fn intrinsics_validation() {
        assert!(CameraIntrinsics::simulation().validate().is_ok());
        assert!(CameraIntrinsics::experiment().validate().is_ok());
        let mut bad = CameraIntrinsics::simulation();
        bad.focus_distance = FocusDistance::Finite(4.0);
        assert!(bad.validate().is_err());
        bad = CameraIntrinsics::simulation();
        bad.aperture = 0.0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn focus_distance_json() {
        let k: CameraIntrinsics =
            serde_json::from_str(&serde_json::to_string(&CameraIntrinsics::experiment()).unwrap()).unwrap();
        assert_eq!(k.focus_distance, FocusDistance::Infinite);
        assert!(serde_json::from_str::<FocusDistance>("\"far\"").is_err());
        assert_eq!(serde_json::from_str::<FocusDistance>("12.5").unwrap(), FocusDistance::Finite(12.5));
    }

    #[test]
    fn zero_twist_is_identity_step() {
        let x = se3_from_parts(&rotation_from_angles(0.2, 0.1, -0.3), &Vec3::new(1.0, 2.0, 3.0));
        assert_eq!(se3_step(&x, &Twist::zero(), 0.01), x);
    }

    #[test]
    fn pure_translation_step() {
        let v = Vec3::new(0.5, -1.0, 2.0);
        let x = se3_step(&SE3Matrix::identity(), &Twist::new(Vec3::zeros(), v), 1.0);
        assert!((se3_translation(&x) - v).norm() < 1e-15);
        assert_mat_close(&se3_rotation(&x), &Matrix3::identity(), 1e-15);
    }

    #[test]
    fn rotation_about_z_matches_rodrigues() {
        let (w, dt) = (0.7, 0.9);
        let x = se3_step(&SE3Matrix::identity(), &Twist::new(Vec3::new(0.0, 0.0, w), Vec3::zeros()), dt);
        let angle = w * dt;
        let (s, c) = angle.sin_cos();
        let expected = Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0);
        assert_mat_close(&se3_rotation(&x), &expected, 1e-14);
    }

    #[test]
    fn exp_small_angle_series_is_continuous() {
        let u = Twist::new(Vec3::new(0.99e-4, 0.0, 0.0), Vec3::new(1.0, 1.0, 1.0));
        let w = Twist::new(Vec3::new(1.01e-4, 0.0, 0.0), Vec3::new(1.0, 1.0, 1.0));
        assert!((se3_exp(&u) - se3_exp(&w)).abs().max() < 1e-5);
    }

    #[test]
    fn twist_projection_roundtrip() {
        let t = Twist::new(Vec3::new(0.1, -0.2, 0.3), Vec3::new(4.0, 5.0, 6.0));
        assert_eq!(Twist::project(&t.to_matrix()), t);
        let m = t.to_matrix();
        assert!((m.fixed_view::<3, 3>(0, 0) + m.fixed_view::<3, 3>(0, 0).transpose()).abs().max() < 1e-12);
        assert!((t.inner(&t) - m.norm_squared()).abs() < 1e-12);
    }

    #[test]
    fn orthonormalize_repairs_drift() {
        let r = rotation_from_angles(0.4, 0.2, 0.1) + Matrix3::from_element(1e-6);
        let fixed = orthonormalize(&r);
        assert!(orthonormality_error(&fixed) < 1e-14);
        assert!((fixed.determinant() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn angle_roundtrip_through_normal() {
        let l = Landmark::new(Vec3::zeros(), -2.5, 0.7, 1.0);
        let (yaw, pitch) = normal_to_angles(&l.normal());
        assert!((yaw - l.yaw).abs() < 1e-12 && (pitch - l.pitch).abs() < 1e-12);
        assert_eq!(wrap_angle(PI), -PI);
    }

    fn angle() -> impl Strategy<Value = f64> {
        -PI..PI
    }

    proptest! {
        #[test]
        fn rotations_are_orthonormal(a in angle(), b in -FRAC_PI_2..=FRAC_PI_2, g in angle()) {
            let r = rotation_from_angles(a, b, g);
            prop_assert!(orthonormality_error(&r) < 1e-10);
            prop_assert!((r.determinant() - 1.0).abs() < 1e-10);
        }

        #[test]
        fn local_world_roundtrip(
            a in angle(), b in -FRAC_PI_2..=FRAC_PI_2, g in angle(),
            o in prop::array::uniform3(-500.0..500.0f64),
            s in prop::array::uniform3(-500.0..500.0f64),
        ) {
            let frame = Pose6::new(Vec3::from(o), a, b, g);
            let s = Vec3::from(s);
            let back = local_to_world(&world_to_local(&s, &frame), &frame);
            prop_assert!((back - s).abs().max() < 1e-10);
        }

        #[test]
        fn normals_are_unit(r in angle(), e in -FRAC_PI_2..=FRAC_PI_2) {
            let n = landmark_normal(&Landmark::new(Vec3::zeros(), r, e, 1.0));
            prop_assert!((n.norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn opposite_twists_cancel(
            w in prop::array::uniform3(-3.0..3.0f64),
            v in prop::array::uniform3(-3.0..3.0f64),
            dt in 0.001..1.0f64,
        ) {
            let u = Twist::new(Vec3::from(w), Vec3::from(v));
            let x = se3_step(&se3_step(&SE3Matrix::identity(), &u, dt), &(-u), dt);
            prop_assert!((x - SE3Matrix::identity()).abs().max() < 1e-8);
        }
    }
}
