//! Baseline deployments: evenly spread and uniformly random on the walls.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Deployment, Scene, Wall};
use crate::error::{Error, Result};
use crate::geometry::Landmark;

/// Splits `k` landmarks over `walls` proportionally to area; the remainder
/// goes one each to the largest walls (ties keep wall order).
pub fn wall_allocation(room: &[f64; 3], walls: &[Wall], k: usize) -> Vec<usize> {
    let areas: Vec<f64> = walls.iter().map(|w| w.area(room)).collect();
    let total: f64 = areas.iter().sum();
    let mut counts: Vec<usize> = areas.iter().map(|a| (k as f64 * a / total).floor() as usize).collect();
    let mut order: Vec<usize> = (0..walls.len()).collect();
    order.sort_by(|&a, &b| areas[b].total_cmp(&areas[a]));
    let mut remaining = k - counts.iter().sum::<usize>();
    for &i in order.iter().cycle() {
        if remaining == 0 {
            break;
        }
        counts[i] += 1;
        remaining -= 1;
    }
    counts
}

/// Normalized `(u, v)` positions for `count` points on a near-square grid
/// over a wall with extents `(a, b)`. A partial last row is centred.
fn grid_layout(count: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    if count == 0 {
        return Vec::new();
    }
    let cols = ((count as f64 * a / b).sqrt().ceil() as usize).clamp(1, count);
    let rows = count.div_ceil(cols);
    let mut out = Vec::with_capacity(count);
    for r in 0..rows {
        let in_row = (count - r * cols).min(cols);
        let v = (r as f64 + 0.5) / rows as f64;
        for c in 0..in_row {
            out.push(((c as f64 + 0.5) / in_row as f64, v));
        }
    }
    out
}

/// Evenly spread landmarks facing straight into the room.
pub fn generate_uniform(scene: &Scene, k: usize) -> Result<Deployment> {
    if k == 0 {
        return Err(Error::invalid("K must be at least 1"));
    }
    let counts = wall_allocation(&scene.room, &scene.walls, k);
    let mut landmarks = Vec::with_capacity(k);
    for (wall, &count) in scene.walls.iter().zip(&counts) {
        let (a, b) = wall.extents(&scene.room);
        for (u, v) in grid_layout(count, a, b) {
            landmarks.push(Landmark::facing(wall.point(&scene.room, u, v), &wall.inward_normal(), scene.nu));
        }
    }
    Ok(Deployment::new(landmarks))
}

/// Landmarks at uniformly random wall positions (walls weighted by area)
/// with uniformly random yaw and pitch.
pub fn generate_random(scene: &Scene, k: usize, seed: u64) -> Result<Deployment> {
    if k == 0 {
        return Err(Error::invalid("K must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let areas: Vec<f64> = scene.walls.iter().map(|w| w.area(&scene.room)).collect();
    let total: f64 = areas.iter().sum();
    let landmarks = (0..k)
        .map(|_| {
            let mut pick = rng.random::<f64>() * total;
            let mut wall = *scene.walls.last().unwrap();
            for (w, a) in scene.walls.iter().zip(&areas) {
                if pick < *a {
                    wall = *w;
                    break;
                }
                pick -= a;
            }
            let (u, v) = (rng.random::<f64>(), rng.random::<f64>());
            let yaw = rng.random_range(-PI..PI);
            let pitch = rng.random_range(-FRAC_PI_2..=FRAC_PI_2);
            Landmark::new(wall.point(&scene.room, u, v), yaw, pitch, scene.nu)
        })
        .collect();
    Ok(Deployment::new(landmarks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deployment::{presets, PlacementMode};
    use crate::geometry::Vec3;

    fn cube() -> Scene {
        let mut f = presets::desk();
        f.room = [400.0, 400.0, 400.0];
        f.reachable = [200.0, 200.0, 200.0];
        Scene::from_file(&f).unwrap()
    }

    #[test]
    fn one_per_wall_in_a_cube() {
        let scene = cube();
        let d = generate_uniform(&scene, 6).unwrap();
        let centres: Vec<Vec3> = Wall::ALL.iter().map(|w| w.point(&scene.room, 0.5, 0.5)).collect();
        assert_eq!(d.landmarks.iter().map(|l| l.position).collect::<Vec<_>>(), centres);
        for (l, w) in d.landmarks.iter().zip(Wall::ALL) {
            assert!((l.normal() - w.inward_normal()).norm() < 1e-12);
        }
    }

    #[test]
    fn allocation_follows_area() {
        let room = [750.0, 500.0, 600.0];
        let counts = wall_allocation(&room, &Wall::ALL, 90);
        assert_eq!(counts.iter().sum::<usize>(), 90);
        // Opposite walls are identical.
        assert_eq!(counts[0], counts[1]);
        assert_eq!(counts[4], counts[5]);
        assert_eq!(wall_allocation(&room, &Wall::ALL, 1).iter().sum::<usize>(), 1);
    }

    #[test]
    fn uniform_layout_snapshot() {
        let scene = Scene::from_file(&presets::simulation_room()).unwrap();
        let d = generate_uniform(&scene, 90).unwrap();
        assert_eq!(d.len(), 90);
        assert!(d.validate(&scene, PlacementMode::Wall).is_ok());
        assert_eq!(wall_allocation(&scene.room, &scene.walls, 90), vec![12, 12, 18, 18, 15, 15]);
        let first = d.landmarks[0].position;
        assert_eq!(first, Vec3::new(0.0, 500.0 / 8.0, 600.0 / 6.0));
        let last = d.landmarks[89].position;
        assert_eq!(last, Vec3::new(750.0 * 4.5 / 5.0, 500.0 * 2.5 / 3.0, 600.0));
    }

    #[test]
    fn random_is_seeded_and_on_walls() {
        let scene = cube();
        let a = generate_random(&scene, 20, 11).unwrap();
        assert_eq!(a, generate_random(&scene, 20, 11).unwrap());
        assert_ne!(a, generate_random(&scene, 20, 12).unwrap());
        assert!(a.validate(&scene, PlacementMode::Wall).is_ok());
        assert!(generate_random(&scene, 0, 1).is_err());
        assert!(generate_uniform(&scene, 0).is_err());
    }

    #[test]
    fn restricted_walls() {
        let scene = Scene::from_file(&presets::experiment_platform()).unwrap();
        let d = generate_random(&scene, 80, 2).unwrap();
        assert!(d.landmarks.iter().all(|l| l.position.z > 0.0 && l.position.z < 170.0));
        assert!(d.validate(&scene, PlacementMode::Wall).is_ok());
    }
}
