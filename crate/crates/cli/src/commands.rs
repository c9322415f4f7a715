use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use landmark_deploy::deployment::{
    evaluate_coverage, generate_random, generate_uniform, metrics, Deployment, PlacementMode, Scene,
};
use landmark_deploy::ega::{self, Algorithm, EgaParams};
use landmark_deploy::observer::{self, ObserverConfig, RandomWalk, TrajectorySpec, Visibility};
use landmark_deploy::pdf_estimation::{estimate_pdf as estimate, AngleSamples, EstimationParams};
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::{num, OutputSet};
use crate::{CliError, EstimateArgs, Kind, Mode, OptimizeArgs, Placement, SceneOverrides, SimulateArgs, VisibilityArg};

type CmdResult = Result<Vec<PathBuf>, CliError>;

/// Resolved record of a run, written beside its outputs.
#[derive(Serialize)]
struct Manifest {
    tool: &'static str,
    version: &'static str,
    subcommand: &'static str,
    inputs: BTreeMap<&'static str, String>,
    out: String,
    seed: Option<u64>,
    overrides: BTreeMap<&'static str, Value>,
    parameters: Value,
}

impl Manifest {
    fn new(subcommand: &'static str, out: &Path) -> Self {
        Self {
            tool: "lmdeploy",
            version: env!("CARGO_PKG_VERSION"),
            subcommand,
            inputs: BTreeMap::new(),
            out: out.display().to_string(),
            seed: None,
            overrides: BTreeMap::new(),
            parameters: Value::Null,
        }
    }

    fn input(&mut self, name: &'static str, path: &Path) {
        self.inputs.insert(name, path.display().to_string());
    }

    fn override_if<T: Serialize>(&mut self, name: &'static str, value: Option<T>) {
        if let Some(v) = value {
            self.overrides.insert(name, serde_json::to_value(v).expect("override serializes"));
        }
    }

    fn scene(&mut self, s: &SceneOverrides) {
        self.input("scene", &s.scene);
        self.override_if("n", s.n);
        self.override_if("thold", s.thold);
        self.override_if("thold_p", s.thold_p);
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn context(path: &Path) -> String {
    path.display().to_string()
}

fn load_scene(s: &SceneOverrides) -> Result<Scene, CliError> {
    let scene = Scene::from_json(&read(&s.scene)?).map_err(|e| CliError::from_lib(e, &context(&s.scene)))?;
    scene.with_overrides(s.n, s.thold, s.thold_p).map_err(|e| CliError::from_lib(e, "scene overrides"))
}

fn load_deployment(path: &Path) -> Result<Deployment, CliError> {
    Deployment::from_json(&read(path)?).map_err(|e| CliError::from_lib(e, &context(path)))
}

fn coverage_csv(scene: &Scene, deployment: &Deployment) -> String {
    let map = evaluate_coverage(scene, deployment);
    let mut csv = String::from("x,y,z,P_n,qualified\n");
    for p in &map.points {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            num(p.position.x),
            num(p.position.y),
            num(p.position.z),
            num(p.probability),
            u8::from(p.qualified)
        ));
    }
    csv
}

fn deployment_metrics(scene: &Scene, deployment: &Deployment) -> Result<Value, CliError> {
    let m = metrics(&evaluate_coverage(scene, deployment)).map_err(|e| CliError::from_lib(e, "metrics"))?;
    Ok(serde_json::to_value(m).expect("metrics serialize"))
}

pub fn analyze(s: &SceneOverrides, deployment_path: &Path, out: &Path) -> CmdResult {
    let scene = load_scene(s)?;
    let deployment = load_deployment(deployment_path)?;
    deployment.validate(&scene, PlacementMode::Free).map_err(|e| CliError::from_lib(e, &context(deployment_path)))?;
    let mut manifest = Manifest::new("analyze", out);
    manifest.scene(s);
    manifest.input("deployment", deployment_path);
    let mut files = OutputSet::default();
    files.text("coverage.csv", coverage_csv(&scene, &deployment));
    files.json("metrics.json", &deployment_metrics(&scene, &deployment)?);
    files.json("manifest.json", &manifest);
    files.commit(out)
}

pub fn optimize(a: &OptimizeArgs) -> CmdResult {
    let scene = load_scene(&a.scene)?;
    let mut params = match &a.params {
        Some(p) => serde_json::from_str::<EgaParams>(&read(p)?).map_err(|e| CliError::input(format!("{}: {e}", p.display())))?,
        None => EgaParams::large_room(0),
    };
    let set = |slot: &mut usize, v: Option<usize>| {
        if let Some(v) = v {
            *slot = v;
        }
    };
    set(&mut params.landmarks, a.landmarks);
    set(&mut params.population, a.population);
    set(&mut params.eliminated, a.eliminated);
    set(&mut params.min_recombination, a.min_recombination);
    set(&mut params.max_recombination, a.max_recombination);
    set(&mut params.max_iterations, a.iterations);
    if let Some(m) = a.mutation {
        params.mutation_probability = m;
    }
    if a.plateau.is_some() {
        params.plateau = a.plateau;
    }
    if let Some(seed) = a.seed {
        params.seed = seed;
    }
    if let Some(p) = a.placement {
        params.placement = match p {
            Placement::Wall => PlacementMode::Wall,
            Placement::Free => PlacementMode::Free,
        };
    }
    params.validate().map_err(|e| CliError::from_lib(e, "optimizer parameters"))?;
    let algorithm = match a.mode {
        Mode::Ega => Algorithm::Ega,
        Mode::Sga => Algorithm::Sga,
    };
    let result = ega::run(&scene, &params, algorithm, None).map_err(|e| CliError::from_lib(e, "optimize"))?;

    let mut manifest = Manifest::new("optimize", &a.out);
    manifest.scene(&a.scene);
    if let Some(p) = &a.params {
        manifest.input("params", p);
    }
    manifest.seed = Some(params.seed);
    manifest.override_if("mode", Some(format!("{algorithm:?}").to_lowercase()));
    manifest.override_if("iterations", a.iterations);
    manifest.override_if("landmarks", a.landmarks);
    manifest.override_if("population", a.population);
    manifest.override_if("eliminated", a.eliminated);
    manifest.override_if("min_recombination", a.min_recombination);
    manifest.override_if("max_recombination", a.max_recombination);
    manifest.override_if("mutation", a.mutation);
    manifest.override_if("plateau", a.plateau);
    manifest.override_if("placement", a.placement.map(|p| format!("{p:?}").to_lowercase()));
    manifest.parameters = serde_json::to_value(params).expect("params serialize");

    let mut history = String::from("generation,best,mean,worst\n");
    for h in &result.history {
        history.push_str(&format!("{},{},{},{}\n", h.generation, num(h.best), num(h.mean), num(h.worst)));
    }
    let mut files = OutputSet::default();
    files.text("deployment.json", result.best.to_json());
    files.text("history.csv", history);
    files.json("metrics.json", &deployment_metrics(&scene, &result.best)?);
    files.json("manifest.json", &manifest);
    files.commit(&a.out)
}

pub fn generate(s: &SceneOverrides, kind: Kind, k: usize, seed: u64, out: &Path) -> CmdResult {
    let scene = load_scene(s)?;
    let deployment = match kind {
        Kind::Uniform => generate_uniform(&scene, k),
        Kind::Random => generate_random(&scene, k, seed),
    }
    .map_err(|e| CliError::from_lib(e, "generate"))?;
    let mut manifest = Manifest::new("generate", out);
    manifest.scene(s);
    manifest.seed = (kind == Kind::Random).then_some(seed);
    manifest.parameters = json!({ "kind": format!("{kind:?}").to_lowercase(), "landmarks": k });
    let mut files = OutputSet::default();
    files.text("deployment.json", deployment.to_json());
    files.json("manifest.json", &manifest);
    files.commit(out)
}

pub fn simulate(a: &SimulateArgs) -> CmdResult {
    let scene = load_scene(&a.scene)?;
    let deployment = load_deployment(&a.deployment)?;
    if !deployment.is_empty() {
        deployment.validate(&scene, PlacementMode::Free).map_err(|e| CliError::from_lib(e, &context(&a.deployment)))?;
    }
    let mut config = match &a.config {
        Some(p) => serde_json::from_str::<ObserverConfig>(&read(p)?)
            .map_err(|e| CliError::input(format!("{}: {e}", p.display())))?,
        None => ObserverConfig::default(),
    };
    if let Some(g) = a.gain {
        config.gain = g;
    }
    if let Some(g) = a.injection_gain {
        config.injection_gain = g;
    }
    if let Some(dt) = a.dt {
        config.dt = dt;
    }
    if let Some(v) = a.visibility {
        config.visibility = match v {
            VisibilityArg::Ideal => Visibility::Ideal,
            VisibilityArg::CameraModel => Visibility::CameraModel,
        };
    }
    config.validate().map_err(|e| CliError::from_lib(e, "observer config"))?;
    let trajectory = match &a.trajectory {
        Some(p) => TrajectorySpec::from_json(&read(p)?).map_err(|e| CliError::from_lib(e, &context(p)))?,
        None => {
            let walk = RandomWalk { duration: a.duration.unwrap_or(RandomWalk::default().duration), ..Default::default() };
            observer::random_walk(&scene, &walk, config.dt, a.seed).map_err(|e| CliError::from_lib(e, "random walk"))?
        }
    };
    let trace = observer::simulate(&scene, &deployment, &trajectory, &config)
        .map_err(|e| CliError::from_lib(e, "simulate"))?;

    let mut manifest = Manifest::new("simulate", &a.out);
    manifest.scene(&a.scene);
    manifest.input("deployment", &a.deployment);
    if let Some(p) = &a.trajectory {
        manifest.input("trajectory", p);
    } else {
        manifest.seed = Some(a.seed);
    }
    if let Some(p) = &a.config {
        manifest.input("config", p);
    }
    manifest.override_if("duration", a.duration);
    manifest.override_if("gain", a.gain);
    manifest.override_if("injection_gain", a.injection_gain);
    manifest.override_if("dt", a.dt);
    manifest.override_if("visibility", a.visibility.map(|v| format!("{v:?}").to_lowercase()));
    manifest.parameters = serde_json::to_value(config).expect("config serializes");

    let mut files = OutputSet::default();
    files.text("trace.csv", trace.to_csv());
    files.json("summary.json", &trace.summary());
    files.text("trajectory.json", trajectory.to_json() + "\n");
    files.json("manifest.json", &manifest);
    files.commit(&a.out)
}

pub fn estimate_pdf(a: &EstimateArgs) -> CmdResult {
    let samples = AngleSamples::from_csv(&read(&a.samples)?).map_err(|e| CliError::from_lib(e, &context(&a.samples)))?;
    let params = EstimationParams { mean_gap: a.mean_gap, ..EstimationParams::new(a.yaw_cells, a.pitch_cells, a.seed) };
    let (table, report) = estimate(&samples, &params).map_err(|e| CliError::from_lib(e, "estimate-pdf"))?;
    let mut manifest = Manifest::new("estimate-pdf", &a.out);
    manifest.input("samples", &a.samples);
    manifest.seed = Some(a.seed);
    manifest.override_if("mean_gap", a.mean_gap);
    manifest.parameters = json!({ "yaw_cells": a.yaw_cells, "pitch_cells": a.pitch_cells });
    let mut files = OutputSet::default();
    files.json("pdf.json", &table);
    files.json("report.json", &report);
    files.json("manifest.json", &manifest);
    files.commit(&a.out)
}
