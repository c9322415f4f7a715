//! Scenes, landmark deployments, and the coverage-based cost.

mod generate;
pub mod scene;

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use generate::{generate_random, generate_uniform, wall_allocation};
pub use scene::{
    presets, OrientationSpec, PdfKind, PdfSpec, RelevanceKind, RelevanceSpec, Scene, SceneFile, Wall, SCHEMA_VERSION,
};

use crate::coverage::{cell_counts, probability_from_counts};
use crate::error::{Error, Result};
use crate::geometry::{Landmark, Vec3};

/// Tolerance (cm) for a landmark to count as lying on a wall.
pub const WALL_TOLERANCE: f64 = 1e-6;

/// How landmark positions are constrained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlacementMode {
    /// On one of the scene's landmark walls.
    #[default]
    Wall,
    /// Anywhere inside the room.
    Free,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    pub landmarks: Vec<Landmark>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LandmarkRecord {
    x: f64,
    y: f64,
    z: f64,
    rho: f64,
    eta: f64,
    mu: f64,
    nu: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DeploymentFile {
    schema: u32,
    landmarks: Vec<LandmarkRecord>,
}

impl Deployment {
    pub fn new(landmarks: Vec<Landmark>) -> Self {
        Self { landmarks }
    }

    pub fn len(&self) -> usize {
        self.landmarks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.landmarks.is_empty()
    }

    /// Wall carrying each landmark, or `None` for landmarks off the walls.
    pub fn walls(&self, scene: &Scene) -> Vec<Option<Wall>> {
        self.landmarks
            .iter()
            .map(|l| scene.walls.iter().copied().find(|w| w.uv(&scene.room, &l.position, WALL_TOLERANCE).is_some()))
            .collect()
    }

    pub fn validate(&self, scene: &Scene, mode: PlacementMode) -> Result<()> {
        if self.landmarks.is_empty() {
            return Err(Error::invalid("a deployment needs at least one landmark"));
        }
        for (k, l) in self.landmarks.iter().enumerate() {
            l.validate().map_err(|e| Error::invalid(format!("landmark {k}: {e}")))?;
            let ok = match mode {
                PlacementMode::Wall => scene
                    .walls
                    .iter()
                    .any(|w| w.uv(&scene.room, &l.position, WALL_TOLERANCE).is_some()),
                PlacementMode::Free => scene.in_room(&l.position),
            };
            if !ok {
                return Err(Error::invalid(format!(
                    "landmark {k} at {:?} violates the {mode:?} placement constraint",
                    l.position.as_slice()
                )));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: DeploymentFile = serde_json::from_str(text)?;
        if file.schema != SCHEMA_VERSION {
            return Err(Error::Schema(format!("unsupported deployment schema {}", file.schema)));
        }
        let landmarks = file
            .landmarks
            .iter()
            .map(|r| Landmark {
                position: Vec3::new(r.x, r.y, r.z),
                yaw: r.rho,
                pitch: r.eta,
                roll: r.mu,
                diameter: r.nu,
            })
            .collect();
        Ok(Self { landmarks })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        let file = DeploymentFile {
            schema: SCHEMA_VERSION,
            landmarks: self
                .landmarks
                .iter()
                .map(|l| LandmarkRecord {
                    x: l.position.x,
                    y: l.position.y,
                    z: l.position.z,
                    rho: l.yaw,
                    eta: l.pitch,
                    mu: l.roll,
                    nu: l.diameter,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("deployment serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoveragePoint {
    pub position: Vec3,
    pub relevance: f64,
    /// P_n at this point.
    pub probability: f64,
    pub qualified: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageMap {
    pub n: usize,
    pub thold_p: f64,
    pub points: Vec<CoveragePoint>,
}

impl CoverageMap {
    /// Builds the map from per-point covered-landmark counts.
    pub fn from_counts(scene: &Scene, counts: &[Vec<u32>], n: usize, thold_p: f64) -> Self {
        let points = scene
            .points
            .iter()
            .zip(&scene.relevance)
            .zip(counts)
            .map(|((p, &rel), c)| {
                let probability = probability_from_counts(c, n, &scene.pdf);
                CoveragePoint { position: *p, relevance: rel, probability, qualified: probability >= thold_p }
            })
            .collect();
        Self { n, thold_p, points }
    }
}

/// Covered-landmark count per orientation cell, for every grid point.
pub fn point_counts(scene: &Scene, deployment: &Deployment) -> Vec<Vec<u32>> {
    let model = scene.camera_model();
    let rotations = scene.cell_rotations();
    let thold = scene.coverage.thold;
    scene
        .points
        .par_iter()
        .map(|p| cell_counts(p, &deployment.landmarks, rotations, model, thold))
        .collect()
}

pub fn evaluate_coverage(scene: &Scene, deployment: &Deployment) -> CoverageMap {
    CoverageMap::from_counts(scene, &point_counts(scene, deployment), scene.coverage.n, scene.thold_p)
}

/// Relevance-weighted count of qualified points.
pub fn cost_of(map: &CoverageMap) -> f64 {
    map.points.iter().filter(|p| p.qualified).fold(0.0, |acc, p| acc + p.relevance)
}

pub fn cost(scene: &Scene, deployment: &Deployment) -> f64 {
    cost_of(&evaluate_coverage(scene, deployment))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeploymentMetrics {
    pub qualified_ratio: f64,
    #[serde(rename = "average_cp")]
    pub average_coverage_probability: f64,
    #[serde(rename = "maximum_cp")]
    pub maximum_coverage_probability: f64,
}

pub fn metrics(map: &CoverageMap) -> Result<DeploymentMetrics> {
    if map.points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let count = map.points.len() as f64;
    let uniform = map.points.windows(2).all(|w| w[0].relevance == w[1].relevance);
    let qualified_ratio = if uniform {
        map.points.iter().filter(|p| p.qualified).count() as f64 / count
    } else {
        let total: f64 = map.points.iter().map(|p| p.relevance).sum();
        if total > 0.0 {
            cost_of(map) / total
        } else {
            0.0
        }
    };
    let average = map.points.iter().map(|p| p.probability).sum::<f64>() / count;
    let maximum = map.points.iter().map(|p| p.probability).fold(0.0, f64::max);
    Ok(DeploymentMetrics {
        qualified_ratio,
        average_coverage_probability: average,
        maximum_coverage_probability: maximum,
    })
}
