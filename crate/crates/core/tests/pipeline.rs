use std::path::{Path, PathBuf};

use landmark_deploy::deployment::{
    cost, evaluate_coverage, generate_uniform, metrics, presets, Deployment, PlacementMode, Scene, SceneFile,
};
use landmark_deploy::ega::{self, Algorithm, EgaParams};
use landmark_deploy::observer::{self, ObserverConfig, RandomWalk};
use landmark_deploy::pdf_estimation::{estimate_pdf, AngleSample, AngleSamples, EstimationParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn config_json(name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(configs().join(name)).unwrap()).unwrap()
}

#[test]
fn bundled_scenes_match_presets() {
    for (name, preset) in [
        ("simulation_room.json", presets::simulation_room()),
        ("desk.json", presets::desk()),
        ("experiment_platform.json", presets::experiment_platform()),
    ] {
        let text = std::fs::read_to_string(configs().join(name)).unwrap();
        assert_eq!(SceneFile::from_json(&text).unwrap(), preset, "{name}");
        Scene::from_json(&text).unwrap();
    }
}

#[test]
fn bundled_parameter_files_match_defaults() {
    assert_eq!(config_json("ega_desk.json"), serde_json::to_value(EgaParams::desk(1)).unwrap());
    assert_eq!(config_json("ega_large_room.json"), serde_json::to_value(EgaParams::large_room(1)).unwrap());
    assert_eq!(config_json("observer.json"), serde_json::to_value(ObserverConfig::default()).unwrap());
}

#[test]
fn optimized_deployment_survives_json_and_beats_its_start() {
    let scene = Scene::from_file(&presets::desk()).unwrap();
    let params = EgaParams { max_iterations: 30, ..EgaParams::desk(3) };
    let result = ega::run(&scene, &params, Algorithm::Ega, None).unwrap();
    result.best.validate(&scene, PlacementMode::Wall).unwrap();
    assert!(result.best_fitness >= result.history[0].best);

    let reloaded = Deployment::from_json(&result.best.to_json()).unwrap();
    assert_eq!(cost(&scene, &reloaded), result.best_fitness);
    let m = metrics(&evaluate_coverage(&scene, &reloaded)).unwrap();
    assert_eq!(m.qualified_ratio, result.best_fitness / scene.points.len() as f64);
}

#[test]
fn estimated_pdf_feeds_back_into_a_scene() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let samples = AngleSamples::new(
        (0..20_000)
            .map(|i| AngleSample {
                t: i as f64 * 0.01,
                yaw: rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
                pitch: rng.random_range(-1.2..1.2),
            })
            .collect(),
    )
    .unwrap();
    let (table, _) = estimate_pdf(&samples, &EstimationParams::new(12, 6, 0)).unwrap();
    let mut file: Value = serde_json::to_value(presets::desk()).unwrap();
    file["pdf"] = serde_json::to_value(&table).unwrap();
    let scene = Scene::from_json(&file.to_string()).unwrap();
    assert!((scene.pdf.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);

    let uniform = generate_uniform(&scene, 12).unwrap();
    let walk = RandomWalk { duration: 5.0, ..Default::default() };
    let trajectory = observer::random_walk(&scene, &walk, 0.01, 2).unwrap();
    let trace = observer::simulate(&scene, &uniform, &trajectory, &ObserverConfig::default()).unwrap();
    assert_eq!(trace.rows.len(), 501);
}
