//! Visibility criteria, coverage caps and the n-ple coverage probability.
//!
//! A landmark is *covered* by a camera pose when its coverage strength (the
//! resolution value gated by the FOV, focus and occlusion tests) reaches the
//! threshold `thold`. Camera orientations are sampled on an [`OrientationGrid`];
//! the set of covered cells for a landmark is its coverage cap, and the
//! probability mass of cells covering at least `n` landmarks is `P_n(p)`.
//!
//! Camera roll never changes the depth or the radial distance from the optical
//! axis, so every criterion here is evaluated in the roll-free camera frame.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    cm_to_mm, rotation_from_angles, CameraIntrinsics, FocusDistance, Landmark, Pose6,
    RotationMatrix, Vec3,
};

/// Yaw-major grid of camera orientations. Cell `i` is
/// `(yaws[i / pitches.len()], pitches[i % pitches.len()])`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrientationGrid {
    yaws: Vec<f64>,
    pitches: Vec<f64>,
}

impl OrientationGrid {
    pub fn new(yaws: Vec<f64>, pitches: Vec<f64>) -> Result<Self> {
        if yaws.is_empty() || pitches.is_empty() {
            return Err(Error::invalid("orientation grid must be non-empty"));
        }
        let increasing = |v: &[f64]| v.windows(2).all(|w| w[0] < w[1]);
        if !increasing(&yaws) || !increasing(&pitches) {
            return Err(Error::invalid("orientation samples must be strictly increasing"));
        }
        if yaws.iter().any(|a| !(-PI..PI).contains(a)) {
            return Err(Error::invalid("yaw samples must lie in [-pi, pi)"));
        }
        if pitches.iter().any(|b| !(-FRAC_PI_2..=FRAC_PI_2).contains(b)) {
            return Err(Error::invalid("pitch samples must lie in [-pi/2, pi/2]"));
        }
        Ok(Self { yaws, pitches })
    }

    /// `yaw_cells` yaw samples starting at -π and `pitch_cells` pitch samples
    /// at the centres of equal pitch bands.
    pub fn uniform(yaw_cells: usize, pitch_cells: usize) -> Result<Self> {
        if yaw_cells == 0 || pitch_cells == 0 {
            return Err(Error::invalid("orientation grid must be non-empty"));
        }
        let dy = 2.0 * PI / yaw_cells as f64;
        let dp = PI / pitch_cells as f64;
        let yaws = (0..yaw_cells).map(|i| -PI + i as f64 * dy).collect();
        let pitches = (0..pitch_cells).map(|j| -FRAC_PI_2 + (j as f64 + 0.5) * dp).collect();
        Self::new(yaws, pitches)
    }

    pub fn yaws(&self) -> &[f64] {
        &self.yaws
    }

    pub fn pitches(&self) -> &[f64] {
        &self.pitches
    }

    pub fn len(&self) -> usize {
        self.yaws.len() * self.pitches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell(&self, i: usize) -> (f64, f64) {
        let np = self.pitches.len();
        (self.yaws[i / np], self.pitches[i % np])
    }

    pub fn cells(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.len()).map(|i| self.cell(i))
    }
}

/// Probability weight of each orientation cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrientationPdf {
    weights: Vec<f64>,
}

impl OrientationPdf {
    /// Equal weight per cell.
    pub fn uniform(grid: &OrientationGrid) -> Self {
        let g = grid.len();
        Self { weights: vec![1.0 / g as f64; g] }
    }

    /// Weight proportional to the solid angle of each cell (`cos β` per cell).
    pub fn solid_angle(grid: &OrientationGrid) -> Self {
        let raw: Vec<f64> = grid.cells().map(|(_, b)| b.cos().max(0.0)).collect();
        Self::normalized(raw).expect("solid-angle weights of a valid grid are positive")
    }

    /// Validates an explicit table. The sum must be 1 within 1e-6; the stored
    /// weights are renormalized.
    pub fn from_table(grid: &OrientationGrid, table: Vec<f64>) -> Result<Self> {
        if table.len() != grid.len() {
            return Err(Error::invalid(format!(
                "pdf table has {} entries, grid has {} cells",
                table.len(),
                grid.len()
            )));
        }
        let sum: f64 = table.iter().sum();
        if (sum - 1.0).abs() > 1e-6 {
            return Err(Error::invalid(format!("pdf table sums to {sum}, expected 1")));
        }
        Self::normalized(table)
    }

    fn normalized(raw: Vec<f64>) -> Result<Self> {
        if raw.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::invalid("pdf weights must be finite and non-negative"));
        }
        let sum: f64 = raw.iter().sum();
        if sum <= 0.0 {
            return Err(Error::invalid("pdf weights sum to zero"));
        }
        Ok(Self { weights: raw.into_iter().map(|w| w / sum).collect() })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageParams {
    /// Coverage-strength threshold (pixel/mm).
    pub thold: f64,
    /// Permissible circle of confusion (pixel).
    pub delta: f64,
    /// Minimum number of simultaneously covered landmarks.
    pub n: usize,
}

impl CoverageParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.thold > 0.0) {
            return Err(Error::invalid("thold must be positive"));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::invalid("delta must be positive"));
        }
        Ok(())
    }
}

/// Near- and far-field depths of acceptable focus (mm). `far` is +∞ when
/// everything beyond `near` is in focus.
pub fn focus_depths(k: &CameraIntrinsics, delta: f64) -> (f64, f64) {
    let (da, f) = (k.aperture, k.focal_length);
    let blur = delta * k.min_pixel();
    match k.focus_distance {
        FocusDistance::Finite(ds) => {
            let near = da * ds * f / (da * f + blur * (ds - f));
            let denom = da * f - blur * (ds - f);
            let far = if denom <= 0.0 { f64::INFINITY } else { da * ds * f / denom };
            (near, far)
        }
        // d_s → ∞: near → d_a f / (δ s_min), far denominator → -∞.
        FocusDistance::Infinite => (da * f / blur, f64::INFINITY),
    }
}

/// Resolution value (pixel/mm) of a point at depth `z` mm.
pub fn resolution_at_depth(k: &CameraIntrinsics, z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::UndefinedDepth { depth: z });
    }
    let f = k.focal_length;
    Ok(match k.focus_distance {
        FocusDistance::Finite(ds) => f * ds / ((ds - f) * z * k.max_pixel()),
        // f d_s / (d_s - f) → f
        FocusDistance::Infinite => f / (z * k.max_pixel()),
    })
}

/// Landmark position relative to a camera at `pose`, in mm, with the camera
/// roll dropped.
pub fn camera_coords(landmark: &Landmark, pose: &Pose6) -> Vec3 {
    roll_free_coords(&rotation_from_angles(pose.yaw, pose.pitch, 0.0), &(landmark.position - pose.position))
}

#[inline]
fn roll_free_coords(rotation: &RotationMatrix, offset_cm: &Vec3) -> Vec3 {
    cm_to_mm(rotation * offset_cm)
}

/// Camera constants shared by every strength evaluation.
#[derive(Debug, Clone, Copy)]
pub struct CameraModel {
    pub intrinsics: CameraIntrinsics,
    pub delta: f64,
    tan_fov: f64,
    near: f64,
    far: f64,
}

impl CameraModel {
    pub fn new(intrinsics: &CameraIntrinsics, delta: f64) -> Self {
        let (near, far) = focus_depths(intrinsics, delta);
        Self {
            intrinsics: *intrinsics,
            delta,
            tan_fov: intrinsics.fov_half_angles().min().tan(),
            near,
            far,
        }
    }

    pub fn near(&self) -> f64 {
        self.near
    }

    pub fn far(&self) -> f64 {
        self.far
    }

    #[inline]
    pub fn in_fov(&self, c: &Vec3) -> bool {
        c.z > 0.0 && (c.x * c.x + c.y * c.y).sqrt() / c.z <= self.tan_fov
    }

    #[inline]
    pub fn in_focus(&self, c: &Vec3) -> bool {
        self.near <= c.z && c.z <= self.far
    }

    /// Strength of a landmark at camera coordinates `c` (mm). `unoccluded`
    /// is the occlusion criterion, which depends only on positions.
    #[inline]
    pub fn strength(&self, c: &Vec3, unoccluded: bool) -> f64 {
        if !self.in_fov(c) || !self.in_focus(c) || !unoccluded {
            return 0.0;
        }
        resolution_at_depth(&self.intrinsics, c.z).unwrap_or(0.0)
    }
}

pub fn resolution_criterion(landmark: &Landmark, pose: &Pose6, k: &CameraIntrinsics) -> Result<f64> {
    resolution_at_depth(k, camera_coords(landmark, pose).z)
}

pub fn fov_criterion(landmark: &Landmark, pose: &Pose6, k: &CameraIntrinsics) -> bool {
    CameraModel::new(k, 1.0).in_fov(&camera_coords(landmark, pose))
}

pub fn focus_criterion(landmark: &Landmark, pose: &Pose6, k: &CameraIntrinsics, delta: f64) -> bool {
    CameraModel::new(k, delta).in_focus(&camera_coords(landmark, pose))
}

/// `true` when landmark `k` is not occluded for a camera at `camera`.
///
/// Occluded when the camera is not in front of the face (elevation ≥ π/2,
/// i.e. `n·(p - s) ≤ 0`) or when another landmark lies between camera and
/// plate within `diameter` of the line of sight.
pub fn occlusion_criterion(k: usize, landmarks: &[Landmark], camera: &Vec3) -> Result<bool> {
    let target = &landmarks[k];
    let to_k = target.position - camera;
    let dist_k = to_k.norm();
    if dist_k == 0.0 {
        return Err(Error::DegenerateGeometry { index: k });
    }
    if target.normal().dot(&(-to_k)) <= 0.0 {
        return Ok(false);
    }
    for (j, other) in landmarks.iter().enumerate() {
        if j == k {
            continue;
        }
        let to_j = other.position - camera;
        let dist_j = to_j.norm();
        let dot = to_j.dot(&to_k);
        if dist_j == 0.0 || dist_j >= dist_k || dot <= 0.0 {
            continue;
        }
        let cos = dot / (dist_j * dist_k);
        let perpendicular = dist_j * (1.0 - cos * cos).max(0.0).sqrt();
        if perpendicular <= target.diameter {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Coverage strength of landmark `k`: zero when any binary criterion fails,
/// otherwise the resolution value.
pub fn coverage_strength(
    k: usize,
    landmarks: &[Landmark],
    pose: &Pose6,
    intrinsics: &CameraIntrinsics,
    delta: f64,
) -> f64 {
    let model = CameraModel::new(intrinsics, delta);
    let c = camera_coords(&landmarks[k], pose);
    if !model.in_fov(&c) || !model.in_focus(&c) {
        return 0.0;
    }
    // in_fov implies the camera is not at the landmark position.
    let unoccluded = occlusion_criterion(k, landmarks, &pose.position).unwrap_or(false);
    model.strength(&c, unoccluded)
}

/// Per-landmark coverage caps on the orientation grid at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct CapSet {
    /// `masks[k][cell]`
    pub masks: Vec<Vec<bool>>,
    /// Number of covered landmarks per cell.
    pub counts: Vec<u32>,
    pub n: usize,
}

impl CapSet {
    pub fn nple_mask(&self) -> Vec<bool> {
        self.counts.iter().map(|&c| c as usize >= self.n).collect()
    }
}

/// Precomputed per-point geometry: offsets of every landmark from the camera
/// and its orientation-independent occlusion flag.
struct PointContext {
    offsets: Vec<Vec3>,
    unoccluded: Vec<bool>,
}

impl PointContext {
    fn new(p: &Vec3, landmarks: &[Landmark]) -> Self {
        let offsets = landmarks.iter().map(|l| l.position - p).collect();
        let unoccluded = (0..landmarks.len())
            .map(|k| occlusion_criterion(k, landmarks, p).unwrap_or(false))
            .collect();
        Self { offsets, unoccluded }
    }
}

/// Roll-free rotations for every grid cell.
pub fn cell_rotations(grid: &OrientationGrid) -> Vec<RotationMatrix> {
    grid.cells().map(|(a, b)| rotation_from_angles(a, b, 0.0)).collect()
}

/// Visits `(cell, landmark, covered)` for every pair at point `p`.
fn for_each_coverage(
    p: &Vec3,
    landmarks: &[Landmark],
    rotations: &[RotationMatrix],
    model: &CameraModel,
    thold: f64,
    mut visit: impl FnMut(usize, usize),
) {
    let ctx = PointContext::new(p, landmarks);
    for (cell, rotation) in rotations.iter().enumerate() {
        for (k, offset) in ctx.offsets.iter().enumerate() {
            if !ctx.unoccluded[k] {
                continue;
            }
            let c = roll_free_coords(rotation, offset);
            if model.strength(&c, true) >= thold {
                visit(cell, k);
            }
        }
    }
}

pub fn coverage_caps(
    p: &Vec3,
    landmarks: &[Landmark],
    grid: &OrientationGrid,
    intrinsics: &CameraIntrinsics,
    params: &CoverageParams,
) -> CapSet {
    let model = CameraModel::new(intrinsics, params.delta);
    let rotations = cell_rotations(grid);
    let g = grid.len();
    let mut masks = vec![vec![false; g]; landmarks.len()];
    let mut counts = vec![0u32; g];
    for_each_coverage(p, landmarks, &rotations, &model, params.thold, |cell, k| {
        masks[k][cell] = true;
        counts[cell] += 1;
    });
    CapSet { masks, counts, n: params.n }
}

/// Covered-landmark count per cell at `p`, without materializing the caps.
pub fn cell_counts(
    p: &Vec3,
    landmarks: &[Landmark],
    rotations: &[RotationMatrix],
    model: &CameraModel,
    thold: f64,
) -> Vec<u32> {
    let mut counts = vec![0u32; rotations.len()];
    for_each_coverage(p, landmarks, rotations, model, thold, |cell, _| counts[cell] += 1);
    counts
}

/// Probability mass of cells covering at least `n` landmarks.
pub fn probability_from_counts(counts: &[u32], n: usize, pdf: &OrientationPdf) -> f64 {
    counts
        .iter()
        .zip(pdf.weights())
        .filter(|(&c, _)| c as usize >= n)
        .fold(0.0, |acc, (_, w)| acc + w)
        .min(1.0)
}

pub fn nple_probability(caps: &CapSet, pdf: &OrientationPdf) -> f64 {
    probability_from_counts(&caps.counts, caps.n, pdf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sim() -> CameraIntrinsics {
        CameraIntrinsics::simulation()
    }

    /// Camera at the origin looking along world +Y (zero yaw/pitch).
    fn forward_pose() -> Pose6 {
        Pose6::new(Vec3::zeros(), 0.0, 0.0, 0.0)
    }

    fn facing_back(depth_cm: f64) -> Landmark {
        Landmark::facing(Vec3::new(0.0, depth_cm, 0.0), &Vec3::new(0.0, -1.0, 0.0), 10.0)
    }

    #[test]
    fn resolution_direct_evaluation() {
        let r = resolution_at_depth(&sim(), 2000.0).unwrap();
        let expected = 5.0 * 1778.0 / ((1778.0 - 5.0) * 2000.0 * 0.0058);
        assert!((r - expected).abs() < 1e-15);
        assert!((r - 0.4323).abs() < 1e-4);
        let half = resolution_at_depth(&sim(), 4000.0).unwrap();
        assert!((2.0 * half - r).abs() < 1e-15);
        assert!(matches!(resolution_at_depth(&sim(), 0.0), Err(Error::UndefinedDepth { .. })));
        assert!(resolution_criterion(&facing_back(-200.0), &forward_pose(), &sim()).is_err());
    }

    #[test]
    fn resolution_infinite_focus_branch() {
        let mut k = sim();
        k.focus_distance = FocusDistance::Infinite;
        let r = resolution_at_depth(&k, 2000.0).unwrap();
        assert_eq!(r, 5.0 / (2000.0 * 0.0058));
        k.focus_distance = FocusDistance::Finite(1e9);
        let finite = resolution_at_depth(&k, 2000.0).unwrap();
        assert!((finite - r).abs() / r < 1e-6);
    }

    #[test]
    fn focus_depths_direct_evaluation() {
        let (near, far) = focus_depths(&sim(), 4.0);
        let blur = 4.0 * 0.0058 * (1778.0 - 5.0);
        assert!((near - 10.0 * 1778.0 * 5.0 / (50.0 + blur)).abs() < 1e-9);
        assert!((far - 10.0 * 1778.0 * 5.0 / (50.0 - blur)).abs() < 1e-9);
        assert!((near - 975.5).abs() / 975.5 < 1e-3);
        assert!((far - 10026.6).abs() / 10026.6 < 1e-3);
    }

    #[test]
    fn near_depth_converges_to_infinite_limit() {
        let mut k = sim();
        k.focus_distance = FocusDistance::Infinite;
        let (limit, far) = focus_depths(&k, 4.0);
        assert!(far.is_infinite());
        let mut prev = f64::INFINITY;
        for ds in [1e6, 1e9, 1e12] {
            k.focus_distance = FocusDistance::Finite(ds);
            let (near, far) = focus_depths(&k, 4.0);
            assert!(far.is_infinite());
            let rel = (near - limit).abs() / limit;
            assert!(rel < prev);
            prev = rel;
        }
        assert!(prev < 1e-6);
    }

    #[test]
    fn fov_axis_behind_and_boundary() {
        assert!(fov_criterion(&facing_back(100.0), &forward_pose(), &sim()));
        assert!(!fov_criterion(&facing_back(-100.0), &forward_pose(), &sim()));
        // Exactly on the cone: build a camera-frame point with radial/z == tan(min φ).
        let model = CameraModel::new(&sim(), 4.0);
        let c = Vec3::new(model.tan_fov * 1000.0, 0.0, 1000.0);
        assert!((c.x / c.z) <= model.tan_fov);
        assert!(model.in_fov(&c));
        assert!(!model.in_fov(&Vec3::new(model.tan_fov * 1000.0 * (1.0 + 1e-12), 0.0, 1000.0)));
    }

    #[test]
    fn focus_window() {
        let (near, _) = focus_depths(&sim(), 4.0);
        assert!(focus_criterion(&facing_back(177.8), &forward_pose(), &sim(), 4.0));
        assert!(!focus_criterion(&facing_back(near / 20.0), &forward_pose(), &sim(), 4.0));
    }

    #[test]
    fn occlusion_cases() {
        let p = Vec3::zeros();
        // Facing away.
        let away = Landmark::facing(Vec3::new(0.0, 100.0, 0.0), &Vec3::new(0.0, 1.0, 0.0), 10.0);
        assert!(!occlusion_criterion(0, &[away], &p).unwrap());
        // Edge-on (elevation exactly π/2).
        let edge = Landmark::facing(Vec3::new(0.0, 100.0, 0.0), &Vec3::new(1.0, 0.0, 0.0), 10.0);
        assert!(!occlusion_criterion(0, &[edge], &p).unwrap());
        // Head-on.
        assert!(occlusion_criterion(0, &[facing_back(100.0)], &p).unwrap());
        // Blocked by a nearer landmark on the line of sight, but not vice versa.
        let pair = [facing_back(200.0), facing_back(100.0)];
        assert!(!occlusion_criterion(0, &pair, &p).unwrap());
        assert!(occlusion_criterion(1, &pair, &p).unwrap());
        // Landmark behind the camera never occludes.
        let behind = [facing_back(200.0), facing_back(-50.0)];
        assert!(occlusion_criterion(0, &behind, &p).unwrap());
        assert!(matches!(
            occlusion_criterion(0, &[facing_back(0.0)], &p),
            Err(Error::DegenerateGeometry { index: 0 })
        ));
    }

    #[test]
    fn strength_is_resolution_when_all_pass() {
        let l = [facing_back(200.0)];
        let s = coverage_strength(0, &l, &forward_pose(), &sim(), 4.0);
        assert_eq!(s, resolution_at_depth(&sim(), 2000.0).unwrap());
        assert!((s - 0.4323).abs() < 1e-4);
        // Facing away: occlusion fails.
        let away = [Landmark::new(Vec3::new(0.0, 200.0, 0.0), 0.0, 0.0, 10.0)];
        assert_eq!(coverage_strength(0, &away, &forward_pose(), &sim(), 4.0), 0.0);
        // Out of focus.
        assert_eq!(coverage_strength(0, &[facing_back(50.0)], &forward_pose(), &sim(), 4.0), 0.0);
    }

    #[test]
    fn strength_ignores_roll() {
        let l = [Landmark::facing(Vec3::new(30.0, 200.0, -20.0), &Vec3::new(0.0, -1.0, 0.1), 10.0)];
        let base = coverage_strength(0, &l, &forward_pose(), &sim(), 4.0);
        assert!(base > 0.0);
        for roll in [-3.0, -1.0, 0.5, 2.9] {
            let pose = Pose6 { roll, ..forward_pose() };
            assert_eq!(coverage_strength(0, &l, &pose, &sim(), 4.0), base);
        }
    }

    fn params(n: usize) -> CoverageParams {
        CoverageParams { thold: 0.2, delta: 4.0, n }
    }

    #[test]
    fn caps_without_landmarks() {
        let grid = OrientationGrid::uniform(12, 6).unwrap();
        let caps = coverage_caps(&Vec3::zeros(), &[], &grid, &sim(), &params(1));
        assert!(caps.masks.is_empty());
        assert!(caps.nple_mask().iter().all(|m| !m));
        let all = coverage_caps(&Vec3::zeros(), &[], &grid, &sim(), &params(0));
        assert!(all.nple_mask().iter().all(|m| *m));
        let pdf = OrientationPdf::uniform(&grid);
        assert!((nple_probability(&all, &pdf) - 1.0).abs() < 1e-9);
        assert_eq!(nple_probability(&caps, &pdf), 0.0);
    }

    #[test]
    fn colocated_twins_share_caps() {
        // Co-located twins occlude nothing under the strict "nearer" rule.
        let grid = OrientationGrid::uniform(24, 12).unwrap();
        let l = Landmark::facing(Vec3::new(0.0, 250.0, 30.0), &Vec3::new(0.0, -1.0, 0.0), 10.0);
        let caps1 = coverage_caps(&Vec3::zeros(), &[l], &grid, &sim(), &params(1));
        let caps2 = coverage_caps(&Vec3::zeros(), &[l, l], &grid, &sim(), &params(2));
        assert_eq!(caps2.masks[0], caps2.masks[1]);
        assert_eq!(caps2.masks[0], caps1.masks[0]);
        assert_eq!(caps2.nple_mask(), caps1.nple_mask());
        assert!(caps1.masks[0].iter().any(|m| *m));
        // Brute force over cells.
        for (cell, (a, b)) in grid.cells().enumerate() {
            let pose = Pose6::new(Vec3::zeros(), a, b, 0.0);
            let s = coverage_strength(0, &[l, l], &pose, &sim(), 4.0);
            assert_eq!(caps2.masks[0][cell], s >= 0.2);
        }
    }

    #[test]
    fn half_mask_gives_half_probability() {
        let grid = OrientationGrid::uniform(24, 12).unwrap();
        assert_eq!(grid.len(), 288);
        let pdf = OrientationPdf::uniform(&grid);
        let counts: Vec<u32> = (0..288).map(|i| (i % 2) as u32).collect();
        assert!((probability_from_counts(&counts, 1, &pdf) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn default_grid_samples() {
        let grid = OrientationGrid::uniform(24, 12).unwrap();
        assert_eq!(grid.yaws()[0], -PI);
        assert!((grid.yaws()[23] - 11.0 * PI / 12.0).abs() < 1e-12);
        assert!((grid.pitches()[0] + 11.0 * PI / 24.0).abs() < 1e-12);
        assert!((grid.pitches()[11] - 11.0 * PI / 24.0).abs() < 1e-12);
        assert!(OrientationGrid::new(vec![0.0, 0.0], vec![0.0]).is_err());
        assert!(OrientationGrid::new(vec![PI], vec![0.0]).is_err());
    }

    #[test]
    fn pdf_modes() {
        let grid = OrientationGrid::uniform(24, 12).unwrap();
        let solid = OrientationPdf::solid_angle(&grid);
        assert!((solid.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // Equator cells outweigh polar cells.
        assert!(solid.weights()[6] > solid.weights()[0]);
        assert!(OrientationPdf::from_table(&grid, vec![1.0; 288]).is_err());
        assert!(OrientationPdf::from_table(&grid, vec![1.0 / 288.0; 10]).is_err());
        let mut t = vec![0.0; 288];
        t[3] = 1.0;
        assert_eq!(OrientationPdf::from_table(&grid, t).unwrap().weights()[3], 1.0);
    }
}
