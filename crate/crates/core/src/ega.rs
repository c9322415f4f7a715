//! Elimination genetic algorithm over landmark positions and orientations.
//!
//! A chromosome holds five real genes per landmark. Each generation keeps the
//! best chromosome unchanged, replaces the `Q` worst with fresh random
//! chromosomes (EGA only), recombines the rest in shuffled pairs by swapping
//! one contiguous gene segment, and resets each non-elite gene to a uniform
//! draw with probability `Ψ`. SGA is the same loop without the elimination.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deployment::{cost, Deployment, PlacementMode, Scene, Wall, WALL_TOLERANCE};
use crate::error::{Error, Result};
use crate::geometry::{Landmark, Vec3};

pub const GENES_PER_LANDMARK: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Ega,
    Sga,
}

/// Gene coding scheme: which gene means what and its admissible range.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneLayout {
    pub mode: PlacementMode,
    pub landmarks: usize,
    room: [f64; 3],
    walls: Vec<Wall>,
    nu: f64,
}

impl GeneLayout {
    pub fn new(scene: &Scene, mode: PlacementMode, landmarks: usize) -> Self {
        Self { mode, landmarks, room: scene.room, walls: scene.walls.clone(), nu: scene.nu }
    }

    pub fn len(&self) -> usize {
        GENES_PER_LANDMARK * self.landmarks
    }

    pub fn is_empty(&self) -> bool {
        self.landmarks == 0
    }

    /// Closed range of gene `i`.
    pub fn range(&self, i: usize) -> (f64, f64) {
        match (self.mode, i % GENES_PER_LANDMARK) {
            (_, 3) => (-PI, PI),
            (_, 4) => (-FRAC_PI_2, FRAC_PI_2),
            (PlacementMode::Wall, 0) => (0.0, self.walls.len() as f64),
            (PlacementMode::Wall, _) => (0.0, 1.0),
            (PlacementMode::Free, axis) => (0.0, self.room[axis]),
        }
    }

    fn random_gene(&self, i: usize, rng: &mut impl Rng) -> f64 {
        let (lo, hi) = self.range(i);
        rng.random_range(lo..hi)
    }

    pub fn random_chromosome(&self, rng: &mut impl Rng) -> Chromosome {
        Chromosome::new((0..self.len()).map(|i| self.random_gene(i, rng)).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chromosome {
    pub genes: Vec<f64>,
    fitness: Option<f64>,
}

impl Chromosome {
    pub fn new(genes: Vec<f64>) -> Self {
        Self { genes, fitness: None }
    }

    pub fn fitness(&self) -> Option<f64> {
        self.fitness
    }
}

/// A gene that was outside its range on decode and got clamped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Repair {
    pub gene: usize,
    pub value: f64,
    pub clamped_to: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    pub deployment: Deployment,
    pub repairs: Vec<Repair>,
}

pub fn encode(deployment: &Deployment, layout: &GeneLayout) -> Result<Chromosome> {
    if deployment.len() != layout.landmarks {
        return Err(Error::LengthMismatch { expected: layout.len(), found: GENES_PER_LANDMARK * deployment.len() });
    }
    let mut genes = Vec::with_capacity(layout.len());
    for (k, l) in deployment.landmarks.iter().enumerate() {
        match layout.mode {
            PlacementMode::Wall => {
                let (index, (u, v)) = layout
                    .walls
                    .iter()
                    .enumerate()
                    .find_map(|(i, w)| w.uv(&layout.room, &l.position, WALL_TOLERANCE).map(|uv| (i, uv)))
                    .ok_or_else(|| Error::invalid(format!("landmark {k} is not on a landmark wall")))?;
                genes.extend([index as f64 + 0.5, u, v]);
            }
            PlacementMode::Free => genes.extend(l.position.iter()),
        }
        genes.extend([l.yaw, l.pitch]);
    }
    Ok(Chromosome::new(genes))
}

/// Inverse of [`encode`]. Out-of-range genes are clamped and reported; the
/// landmark roll is set to zero and the diameter to the scene default.
pub fn decode(chromosome: &Chromosome, layout: &GeneLayout) -> Result<Decoded> {
    if chromosome.genes.len() != layout.len() {
        return Err(Error::LengthMismatch { expected: layout.len(), found: chromosome.genes.len() });
    }
    let mut repairs = Vec::new();
    let genes: Vec<f64> = chromosome
        .genes
        .iter()
        .enumerate()
        .map(|(i, &g)| {
            let (lo, hi) = layout.range(i);
            let c = if g.is_nan() { lo } else { g.clamp(lo, hi) };
            if c != g || g.is_nan() {
                repairs.push(Repair { gene: i, value: g, clamped_to: c });
            }
            c
        })
        .collect();
    let landmarks = genes
        .chunks_exact(GENES_PER_LANDMARK)
        .map(|g| {
            let position = match layout.mode {
                PlacementMode::Wall => {
                    let index = (g[0] as usize).min(layout.walls.len() - 1);
                    layout.walls[index].point(&layout.room, g[1], g[2])
                }
                PlacementMode::Free => Vec3::new(g[0], g[1], g[2]),
            };
            let yaw = if g[3] >= PI { -PI } else { g[3] };
            Landmark::new(position, yaw, g[4], layout.nu)
        })
        .collect();
    Ok(Decoded { deployment: Deployment::new(landmarks), repairs })
}

/// Fitness of a chromosome: the cost of its decoded deployment.
pub fn fitness(chromosome: &Chromosome, layout: &GeneLayout, scene: &Scene) -> Result<f64> {
    if let Some(f) = chromosome.fitness {
        return Ok(f);
    }
    Ok(cost(scene, &decode(chromosome, layout)?.deployment))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EgaParams {
    /// K
    pub landmarks: usize,
    /// M
    pub population: usize,
    /// Q
    pub eliminated: usize,
    /// Υ_min
    pub min_recombination: usize,
    /// Υ_max
    pub max_recombination: usize,
    /// Ψ
    pub mutation_probability: f64,
    /// Generation budget.
    pub max_iterations: usize,
    /// Stop after this many generations without improvement of the best fitness.
    #[serde(default)]
    pub plateau: Option<usize>,
    pub seed: u64,
    #[serde(default)]
    pub placement: PlacementMode,
}

impl EgaParams {
    /// Settings used for the large-room runs (K = 90, L = 450).
    pub fn large_room(seed: u64) -> Self {
        Self {
            landmarks: 90,
            population: 30,
            eliminated: 7,
            min_recombination: 100,
            max_recombination: 300,
            mutation_probability: 0.1,
            max_iterations: 400,
            plateau: None,
            seed,
            placement: PlacementMode::Wall,
        }
    }

    /// Settings for the reduced desk scene (K = 12, L = 60).
    pub fn desk(seed: u64) -> Self {
        Self {
            landmarks: 12,
            population: 20,
            eliminated: 4,
            min_recombination: 5,
            max_recombination: 30,
            mutation_probability: 0.05,
            max_iterations: 100,
            plateau: None,
            seed,
            placement: PlacementMode::Wall,
        }
    }

    pub fn chromosome_len(&self) -> usize {
        GENES_PER_LANDMARK * self.landmarks
    }

    pub fn validate(&self) -> Result<()> {
        let l = self.chromosome_len();
        if self.landmarks == 0 {
            return Err(Error::invalid("K must be at least 1"));
        }
        if self.population == 0 {
            return Err(Error::invalid("M must be at least 1"));
        }
        if self.eliminated + 1 > self.population {
            return Err(Error::invalid(format!(
                "Q + 1 ≤ M violated (Q = {}, M = {})",
                self.eliminated, self.population
            )));
        }
        if self.min_recombination == 0 || self.min_recombination > self.max_recombination {
            return Err(Error::invalid("1 <= recombination min <= max required"));
        }
        if self.max_recombination > l {
            return Err(Error::invalid(format!(
                "Υ_max ≤ L violated (Υ_max = {}, L = {l})",
                self.max_recombination
            )));
        }
        if !(0.0..=1.0).contains(&self.mutation_probability) {
            return Err(Error::invalid("mutation probability must lie in [0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub chromosomes: Vec<Chromosome>,
    pub generation: usize,
}

impl Population {
    pub fn random(layout: &GeneLayout, size: usize, seed: u64) -> Self {
        let chromosomes = (0..size)
            .map(|i| layout.random_chromosome(&mut stream(seed, INIT_STREAM, i)))
            .collect();
        Self { chromosomes, generation: 0 }
    }

    pub fn len(&self) -> usize {
        self.chromosomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chromosomes.is_empty()
    }

    /// Computes missing fitness values in parallel.
    pub fn evaluate(&mut self, layout: &GeneLayout, scene: &Scene) -> Result<()> {
        self.chromosomes.par_iter_mut().try_for_each(|c| {
            if c.fitness.is_none() {
                c.fitness = Some(fitness(c, layout, scene)?);
            }
            Ok(())
        })
    }

    /// Index of the best evaluated chromosome (first on ties).
    pub fn best_index(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, c) in self.chromosomes.iter().enumerate() {
            if let Some(f) = c.fitness {
                if best.is_none_or(|(_, b)| f > b) {
                    best = Some((i, f));
                }
            }
        }
        best.map(|(i, _)| i)
    }

    pub fn stats(&self) -> GenerationStats {
        let f: Vec<f64> = self.chromosomes.iter().filter_map(|c| c.fitness).collect();
        GenerationStats {
            generation: self.generation,
            best: f.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean: f.iter().sum::<f64>() / f.len() as f64,
            worst: f.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }
}

const INIT_STREAM: u64 = u32::MAX as u64;

/// Independent random stream for (generation, slot).
fn stream(seed: u64, generation: u64, slot: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((generation << 32) | slot as u64);
    rng
}

/// Swaps one contiguous segment of random length in `[min_len, max_len]`.
fn recombine(a: &mut [f64], b: &mut [f64], min_len: usize, max_len: usize, rng: &mut impl Rng) {
    let len = rng.random_range(min_len..=max_len).min(a.len());
    let offset = rng.random_range(0..=a.len() - len);
    a[offset..offset + len].swap_with_slice(&mut b[offset..offset + len]);
}

fn mutate(c: &mut Chromosome, layout: &GeneLayout, probability: f64, rng: &mut impl Rng) {
    for i in 0..c.genes.len() {
        if rng.random::<f64>() < probability {
            c.genes[i] = layout.random_gene(i, rng);
        }
    }
}

/// Advances an evaluated population by one generation. The returned
/// population is evaluated and ordered `[elite, offspring.., fresh..]`.
pub fn evolve_generation(
    population: &Population,
    params: &EgaParams,
    algorithm: Algorithm,
    layout: &GeneLayout,
    scene: &Scene,
) -> Result<Population> {
    let m = population.len();
    let t = population.generation as u64 + 1;
    let mut order: Vec<usize> = (0..m).collect();
    let fit = |i: usize| population.chromosomes[i].fitness.unwrap_or(f64::NEG_INFINITY);
    order.sort_by(|&a, &b| fit(b).total_cmp(&fit(a)));

    let eliminated = match algorithm {
        Algorithm::Ega => params.eliminated,
        Algorithm::Sga => 0,
    };
    let elite = population.chromosomes[order[0]].clone();
    let mut pool: Vec<Chromosome> =
        order[1..m - eliminated].iter().map(|&i| population.chromosomes[i].clone()).collect();

    let mut rng = stream(params.seed, t, 0);
    pool.shuffle(&mut rng);
    for pair in pool.chunks_exact_mut(2) {
        let (a, b) = pair.split_at_mut(1);
        recombine(&mut a[0].genes, &mut b[0].genes, params.min_recombination, params.max_recombination, &mut rng);
    }
    let fresh = (0..eliminated).map(|i| layout.random_chromosome(&mut stream(params.seed, t, 1 + m + i)));

    let mut next = Vec::with_capacity(m);
    next.push(elite);
    for (i, mut c) in pool.into_iter().chain(fresh).enumerate() {
        mutate(&mut c, layout, params.mutation_probability, &mut stream(params.seed, t, 1 + i));
        // Recombination and mutation both invalidate the cached value.
        c.fitness = None;
        next.push(c);
    }
    let mut out = Population { chromosomes: next, generation: population.generation + 1 };
    out.evaluate(layout, scene)?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub best: f64,
    pub mean: f64,
    pub worst: f64,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub best: Deployment,
    pub best_fitness: f64,
    pub history: Vec<GenerationStats>,
    pub final_population: Population,
}

/// Runs the optimizer until the iteration budget or the plateau limit.
pub fn run(scene: &Scene, params: &EgaParams, algorithm: Algorithm, initial: Option<Population>) -> Result<RunResult> {
    params.validate()?;
    let layout = GeneLayout::new(scene, params.placement, params.landmarks);
    let mut population = initial.unwrap_or_else(|| Population::random(&layout, params.population, params.seed));
    if population.len() != params.population {
        return Err(Error::invalid(format!(
            "initial population has {} chromosomes, M = {}",
            population.len(),
            params.population
        )));
    }
    if let Some(c) = population.chromosomes.iter().find(|c| c.genes.len() != layout.len()) {
        return Err(Error::LengthMismatch { expected: layout.len(), found: c.genes.len() });
    }
    population.evaluate(&layout, scene)?;
    let mut history = vec![population.stats()];
    let mut stale = 0;
    for _ in 0..params.max_iterations {
        let previous = history.last().unwrap().best;
        population = evolve_generation(&population, params, algorithm, &layout, scene)?;
        let stats = population.stats();
        stale = if stats.best > previous { 0 } else { stale + 1 };
        history.push(stats);
        if params.plateau.is_some_and(|p| stale >= p) {
            break;
        }
    }
    let best_index = population.best_index().expect("population is evaluated");
    let best = &population.chromosomes[best_index];
    Ok(RunResult {
        best: decode(best, &layout)?.deployment,
        best_fitness: best.fitness.unwrap(),
        history,
        final_population: population,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deployment::{generate_random, presets};

    fn desk() -> Scene {
        Scene::from_file(&presets::desk()).unwrap()
    }

    fn params(seed: u64) -> EgaParams {
        EgaParams {
            landmarks: 12,
            population: 10,
            eliminated: 3,
            min_recombination: 5,
            max_recombination: 30,
            mutation_probability: 0.1,
            max_iterations: 5,
            plateau: None,
            seed,
            placement: PlacementMode::Wall,
        }
    }

    #[test]
    fn large_room_chromosome_length() {
        let p = EgaParams::large_room(0);
        assert_eq!(p.chromosome_len(), 450);
        assert!(p.validate().is_ok());
        let scene = Scene::from_file(&presets::simulation_room()).unwrap();
        assert_eq!(GeneLayout::new(&scene, PlacementMode::Wall, 90).len(), 450);
    }

    #[test]
    fn parameter_constraints() {
        let mut p = params(0);
        p.eliminated = p.population;
        let err = p.validate().unwrap_err().to_string();
        assert!(err.contains("Q + 1 ≤ M"), "{err}");
        let mut p = params(0);
        p.max_recombination = 61;
        assert!(p.validate().is_err());
        let mut p = params(0);
        p.min_recombination = 40;
        assert!(p.validate().is_err());
    }

    #[test]
    fn encode_decode_roundtrip() {
        let scene = desk();
        for mode in [PlacementMode::Wall, PlacementMode::Free] {
            let layout = GeneLayout::new(&scene, mode, 12);
            let d = generate_random(&scene, 12, 9).unwrap();
            let decoded = decode(&encode(&d, &layout).unwrap(), &layout).unwrap();
            assert!(decoded.repairs.is_empty());
            for (a, b) in d.landmarks.iter().zip(&decoded.deployment.landmarks) {
                assert!((a.position - b.position).abs().max() < 1e-9);
                assert!((a.yaw - b.yaw).abs() < 1e-9 && (a.pitch - b.pitch).abs() < 1e-9);
                assert_eq!(b.roll, 0.0);
            }
        }
    }

    #[test]
    fn decode_length_and_repair() {
        let scene = desk();
        let layout = GeneLayout::new(&scene, PlacementMode::Wall, 2);
        assert!(matches!(
            decode(&Chromosome::new(vec![0.0; 9]), &layout),
            Err(Error::LengthMismatch { expected: 10, found: 9 })
        ));
        let c = Chromosome::new(vec![9.0, 0.5, 1.5, 0.0, 0.0, 1.0, 0.5, 0.5, 4.0, -2.0]);
        let decoded = decode(&c, &layout).unwrap();
        let genes: Vec<usize> = decoded.repairs.iter().map(|r| r.gene).collect();
        assert_eq!(genes, vec![0, 2, 8, 9]);
        assert_eq!(decoded.repairs[0].clamped_to, 6.0);
        assert!(decoded.deployment.validate(&scene, PlacementMode::Wall).is_ok());
    }

    #[test]
    fn fitness_matches_cost_and_is_pure() {
        let scene = desk();
        let layout = GeneLayout::new(&scene, PlacementMode::Wall, 12);
        let d = generate_random(&scene, 12, 4).unwrap();
        let c = encode(&d, &layout).unwrap();
        let f = fitness(&c, &layout, &scene).unwrap();
        assert_eq!(f, cost(&scene, &decode(&c, &layout).unwrap().deployment));
        assert_eq!(f, fitness(&c.clone(), &layout, &scene).unwrap());
        let again = encode(&decode(&c, &layout).unwrap().deployment, &layout).unwrap();
        assert_eq!(fitness(&again, &layout, &scene).unwrap(), f);
    }

    #[test]
    fn pool_size_is_m_minus_one_minus_q() {
        let p = EgaParams { population: 30, eliminated: 7, ..params(0) };
        assert_eq!(p.population - 1 - p.eliminated, 22);
    }

    #[test]
    fn generation_keeps_size_ranges_and_elite() {
        let scene = desk();
        let p = params(3);
        let layout = GeneLayout::new(&scene, p.placement, p.landmarks);
        let mut pop = Population::random(&layout, p.population, p.seed);
        pop.evaluate(&layout, &scene).unwrap();
        for _ in 0..5 {
            let best = pop.stats().best;
            let elite = pop.chromosomes[pop.best_index().unwrap()].clone();
            let next = evolve_generation(&pop, &p, Algorithm::Ega, &layout, &scene).unwrap();
            assert_eq!(next.len(), p.population);
            assert!(next.stats().best >= best);
            assert_eq!(next.chromosomes[0], elite);
            for c in &next.chromosomes {
                for (i, g) in c.genes.iter().enumerate() {
                    let (lo, hi) = layout.range(i);
                    assert!(*g >= lo && *g <= hi);
                }
            }
            pop = next;
        }
    }

    #[test]
    fn degenerate_operators_only_reorder() {
        let scene = desk();
        let p = EgaParams {
            eliminated: 0,
            mutation_probability: 0.0,
            min_recombination: 60,
            max_recombination: 60,
            ..params(1)
        };
        let layout = GeneLayout::new(&scene, p.placement, p.landmarks);
        let mut pop = Population::random(&layout, p.population, p.seed);
        pop.evaluate(&layout, &scene).unwrap();
        let next = evolve_generation(&pop, &p, Algorithm::Ega, &layout, &scene).unwrap();
        let key = |pop: &Population| {
            let mut g: Vec<Vec<u64>> =
                pop.chromosomes.iter().map(|c| c.genes.iter().map(|x| x.to_bits()).collect()).collect();
            g.sort();
            g
        };
        assert_eq!(key(&pop), key(&next));
    }

    #[test]
    fn zero_iterations_returns_initial_best() {
        let scene = desk();
        let p = EgaParams { max_iterations: 0, ..params(2) };
        let r = run(&scene, &p, Algorithm::Ega, None).unwrap();
        assert_eq!(r.history.len(), 1);
        assert_eq!(r.best_fitness, r.history[0].best);
        assert_eq!(cost(&scene, &r.best), r.best_fitness);
    }

    #[test]
    fn runs_are_reproducible_and_monotone() {
        let scene = desk();
        let p = params(8);
        let a = run(&scene, &p, Algorithm::Ega, None).unwrap();
        let b = run(&scene, &p, Algorithm::Ega, None).unwrap();
        assert_eq!(a.history, b.history);
        assert_eq!(a.best, b.best);
        assert!(a.history.windows(2).all(|w| w[1].best >= w[0].best));
    }

    #[test]
    fn sga_is_ega_without_elimination() {
        let scene = desk();
        let p = EgaParams { eliminated: 0, ..params(6) };
        let ega = run(&scene, &p, Algorithm::Ega, None).unwrap();
        let sga = run(&scene, &EgaParams { eliminated: 3, ..p }, Algorithm::Sga, None).unwrap();
        assert_eq!(ega.history, sga.history);
    }

    #[test]
    fn plateau_stops_early() {
        let scene = desk();
        let p = EgaParams { max_iterations: 50, plateau: Some(2), ..params(5) };
        let r = run(&scene, &p, Algorithm::Ega, None).unwrap();
        assert!(r.history.len() < 51);
    }
}
