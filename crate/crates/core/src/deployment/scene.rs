use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::coverage::{cell_rotations, CameraModel, CoverageParams, OrientationGrid, OrientationPdf};
use crate::error::{Error, Result};
use crate::geometry::{CameraIntrinsics, RotationMatrix, Vec3};

pub const SCHEMA_VERSION: u32 = 1;

/// One of the six faces of the axis-aligned room `[0, L] × [0, W] × [0, H]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Wall {
    XMin,
    XMax,
    YMin,
    YMax,
    #[serde(alias = "floor")]
    ZMin,
    #[serde(alias = "ceiling")]
    ZMax,
}

impl Wall {
    pub const ALL: [Wall; 6] = [Wall::XMin, Wall::XMax, Wall::YMin, Wall::YMax, Wall::ZMin, Wall::ZMax];

    /// (normal axis, in-plane u axis, in-plane v axis)
    fn axes(self) -> (usize, usize, usize) {
        match self {
            Wall::XMin | Wall::XMax => (0, 1, 2),
            Wall::YMin | Wall::YMax => (1, 0, 2),
            Wall::ZMin | Wall::ZMax => (2, 0, 1),
        }
    }

    fn is_max(self) -> bool {
        matches!(self, Wall::XMax | Wall::YMax | Wall::ZMax)
    }

    pub fn inward_normal(self) -> Vec3 {
        let mut n = Vec3::zeros();
        n[self.axes().0] = if self.is_max() { -1.0 } else { 1.0 };
        n
    }

    /// In-plane extents (u, v) of this wall in a room of the given size.
    pub fn extents(self, room: &[f64; 3]) -> (f64, f64) {
        let (_, u, v) = self.axes();
        (room[u], room[v])
    }

    pub fn area(self, room: &[f64; 3]) -> f64 {
        let (a, b) = self.extents(room);
        a * b
    }

    /// Point at normalized wall coordinates `(u, v) ∈ [0, 1]²`.
    pub fn point(self, room: &[f64; 3], u: f64, v: f64) -> Vec3 {
        let (n, ua, va) = self.axes();
        let mut p = Vec3::zeros();
        p[n] = if self.is_max() { room[n] } else { 0.0 };
        p[ua] = u * room[ua];
        p[va] = v * room[va];
        p
    }

    /// Normalized coordinates of `p`, if it lies on this wall within `tol` cm.
    pub fn uv(self, room: &[f64; 3], p: &Vec3, tol: f64) -> Option<(f64, f64)> {
        let (n, ua, va) = self.axes();
        let plane = if self.is_max() { room[n] } else { 0.0 };
        if (p[n] - plane).abs() > tol {
            return None;
        }
        let inside = |x: f64, len: f64| x >= -tol && x <= len + tol;
        if !inside(p[ua], room[ua]) || !inside(p[va], room[va]) {
            return None;
        }
        Some(((p[ua] / room[ua]).clamp(0.0, 1.0), (p[va] / room[va]).clamp(0.0, 1.0)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrientationSpec {
    pub yaw_cells: usize,
    pub pitch_cells: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PdfSpec {
    Named(PdfKind),
    Table { table: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PdfKind {
    Uniform,
    SolidAngle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RelevanceSpec {
    Named(RelevanceKind),
    Table { table: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelevanceKind {
    Uniform,
}

/// On-disk scene description (schema 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub schema: u32,
    /// Room length × width × height (cm).
    pub room: [f64; 3],
    /// Reachable region extents, centred in the room (cm).
    pub reachable: [f64; 3],
    /// Grid points per axis over the reachable region.
    pub grid: [usize; 3],
    pub orientation: OrientationSpec,
    pub pdf: PdfSpec,
    pub intrinsics: CameraIntrinsics,
    pub delta: f64,
    pub thold: f64,
    pub thold_p: f64,
    pub n: usize,
    /// Default landmark virtual diameter (cm).
    pub nu: f64,
    pub rel: RelevanceSpec,
    /// Walls that may carry landmarks; all six when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub walls: Option<Vec<Wall>>,
}

impl SceneFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: SceneFile = serde_json::from_str(text)?;
        if file.schema != SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "unsupported scene schema {} (expected {SCHEMA_VERSION})",
                file.schema
            )));
        }
        Ok(file)
    }
}

/// A validated scene: room, discretized reachable region, camera and
/// coverage settings.
#[derive(Debug, Clone)]
pub struct Scene {
    pub room: [f64; 3],
    pub reachable: [f64; 3],
    pub grid: [usize; 3],
    /// Discretized reachable region Ω_d.
    pub points: Vec<Vec3>,
    /// Relevance weight of each point.
    pub relevance: Vec<f64>,
    pub orientation: OrientationGrid,
    pub pdf: OrientationPdf,
    pub intrinsics: CameraIntrinsics,
    pub coverage: CoverageParams,
    pub thold_p: f64,
    pub nu: f64,
    pub walls: Vec<Wall>,
    model: CameraModel,
    rotations: Vec<RotationMatrix>,
}

impl Scene {
    pub fn from_file(file: &SceneFile) -> Result<Self> {
        if file.schema != SCHEMA_VERSION {
            return Err(Error::Schema(format!("unsupported scene schema {}", file.schema)));
        }
        for (i, (&r, &q)) in file.room.iter().zip(&file.reachable).enumerate() {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::invalid(format!("room extent {i} must be positive")));
            }
            if !(q >= 0.0 && q <= r) {
                return Err(Error::invalid(format!("reachable extent {i} must lie within the room")));
            }
        }
        if file.grid.contains(&0) {
            return Err(Error::invalid("grid counts must be at least 1"));
        }
        file.intrinsics.validate()?;
        let coverage = CoverageParams { thold: file.thold, delta: file.delta, n: file.n };
        coverage.validate()?;
        if !(0.0..=1.0).contains(&file.thold_p) {
            return Err(Error::invalid("thold_p must lie in [0, 1]"));
        }
        if !(file.nu > 0.0 && file.nu.is_finite()) {
            return Err(Error::invalid("nu must be positive"));
        }

        let orientation = OrientationGrid::uniform(file.orientation.yaw_cells, file.orientation.pitch_cells)?;
        let pdf = match &file.pdf {
            PdfSpec::Named(PdfKind::Uniform) => OrientationPdf::uniform(&orientation),
            PdfSpec::Named(PdfKind::SolidAngle) => OrientationPdf::solid_angle(&orientation),
            PdfSpec::Table { table } => OrientationPdf::from_table(&orientation, table.clone())?,
        };
        let points = region_points(&file.room, &file.reachable, &file.grid);
        let relevance = match &file.rel {
            RelevanceSpec::Named(RelevanceKind::Uniform) => vec![1.0; points.len()],
            RelevanceSpec::Table { table } => {
                if table.len() != points.len() {
                    return Err(Error::invalid(format!(
                        "relevance table has {} entries, grid has {} points",
                        table.len(),
                        points.len()
                    )));
                }
                if table.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
                    return Err(Error::invalid("relevance weights must be non-negative"));
                }
                table.clone()
            }
        };
        let walls = match &file.walls {
            Some(w) if w.is_empty() => return Err(Error::invalid("wall list must not be empty")),
            Some(w) => {
                let mut seen = Vec::new();
                for wall in w {
                    if !seen.contains(wall) {
                        seen.push(*wall);
                    }
                }
                seen
            }
            None => Wall::ALL.to_vec(),
        };

        let model = CameraModel::new(&file.intrinsics, file.delta);
        let rotations = cell_rotations(&orientation);
        Ok(Self {
            room: file.room,
            reachable: file.reachable,
            grid: file.grid,
            points,
            relevance,
            orientation,
            pdf,
            intrinsics: file.intrinsics,
            coverage,
            thold_p: file.thold_p,
            nu: file.nu,
            walls,
            model,
            rotations,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(&SceneFile::from_json(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn camera_model(&self) -> &CameraModel {
        &self.model
    }

    pub fn cell_rotations(&self) -> &[RotationMatrix] {
        &self.rotations
    }

    /// Lower corner of the reachable region.
    pub fn reachable_min(&self) -> Vec3 {
        Vec3::from_fn(|i, _| (self.room[i] - self.reachable[i]) / 2.0)
    }

    pub fn reachable_max(&self) -> Vec3 {
        Vec3::from_fn(|i, _| (self.room[i] + self.reachable[i]) / 2.0)
    }

    pub fn in_reachable(&self, p: &Vec3) -> bool {
        let (lo, hi) = (self.reachable_min(), self.reachable_max());
        (0..3).all(|i| p[i] >= lo[i] && p[i] <= hi[i])
    }

    pub fn in_room(&self, p: &Vec3) -> bool {
        (0..3).all(|i| p[i] >= 0.0 && p[i] <= self.room[i])
    }

    /// Overrides for `n`, `thold` and `thold_p`, validated like the file fields.
    pub fn with_overrides(mut self, n: Option<usize>, thold: Option<f64>, thold_p: Option<f64>) -> Result<Self> {
        if let Some(n) = n {
            self.coverage.n = n;
        }
        if let Some(t) = thold {
            self.coverage.thold = t;
            self.coverage.validate()?;
        }
        if let Some(t) = thold_p {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::invalid("thold_p must lie in [0, 1]"));
            }
            self.thold_p = t;
        }
        Ok(self)
    }
}

/// Cell centres of a `grid` subdivision of the reachable box centred in the room.
pub fn region_points(room: &[f64; 3], reachable: &[f64; 3], grid: &[usize; 3]) -> Vec<Vec3> {
    let lo: Vec<f64> = (0..3).map(|i| (room[i] - reachable[i]) / 2.0).collect();
    let step: Vec<f64> = (0..3).map(|i| reachable[i] / grid[i] as f64).collect();
    let mut pts = Vec::with_capacity(grid.iter().product());
    for i in 0..grid[0] {
        for j in 0..grid[1] {
            for k in 0..grid[2] {
                pts.push(Vec3::new(
                    lo[0] + (i as f64 + 0.5) * step[0],
                    lo[1] + (j as f64 + 0.5) * step[1],
                    lo[2] + (k as f64 + 0.5) * step[2],
                ));
            }
        }
    }
    pts
}

/// Scene files bundled with the crate.
pub mod presets {
    use super::*;

    fn base(intrinsics: CameraIntrinsics) -> SceneFile {
        SceneFile {
            schema: SCHEMA_VERSION,
            room: [750.0, 500.0, 600.0],
            reachable: [600.0, 350.0, 450.0],
            grid: [13, 8, 10],
            orientation: OrientationSpec { yaw_cells: 24, pitch_cells: 12 },
            pdf: PdfSpec::Named(PdfKind::Uniform),
            intrinsics,
            delta: 4.0,
            thold: 0.2,
            thold_p: 0.65,
            n: 2,
            nu: 10.0,
            rel: RelevanceSpec::Named(RelevanceKind::Uniform),
            walls: None,
        }
    }

    /// 750 × 500 × 600 cm room, 1040 grid points, 24 × 12 orientations.
    pub fn simulation_room() -> SceneFile {
        base(CameraIntrinsics::simulation())
    }

    /// Coarse variant of [`simulation_room`] for fast optimization runs:
    /// 4 × 4 × 3 points and 12 × 6 orientations.
    pub fn desk() -> SceneFile {
        SceneFile {
            grid: [4, 4, 3],
            orientation: OrientationSpec { yaw_cells: 12, pitch_cells: 6 },
            thold_p: 0.15,
            ..base(CameraIntrinsics::simulation())
        }
    }

    /// 320 × 320 × 170 cm platform with landmarks on its four side walls.
    pub fn experiment_platform() -> SceneFile {
        SceneFile {
            room: [320.0, 320.0, 170.0],
            reachable: [260.0, 260.0, 120.0],
            grid: [7, 7, 3],
            thold_p: 0.7,
            walls: Some(vec![Wall::XMin, Wall::XMax, Wall::YMin, Wall::YMax]),
            ..base(CameraIntrinsics::experiment())
        }
    }
}
