//! Integer-coded genetic algorithm over excitation schedules.
//!
//! One generation:
//!
//! 1. every member is scored with the weighted SLL/SBL fitness (members
//!    carried over unchanged keep their cached score);
//! 2. the `elite_count` best members are ranked, ties going to the lower
//!    population index;
//! 3. elites and every member scoring at or above the population mean are
//!    flagged as survivors, i.e. eligible for mating;
//! 4. the next population is the elites, copied verbatim with the best at
//!    slot 0, followed by offspring. Each offspring pair comes from two
//!    distinct survivors drawn uniformly, single-point crossover on the
//!    flattened chromosome, then mutation. Elites are never mutated.
//!
//! All randomness comes from one ChaCha stream seeded with
//! [`GaConfig::rng_seed`], consumed in a fixed order: population
//! initialization (member by member, gene by gene), then per generation and
//! per offspring pair the parent draw, the crossover decision and cut, and
//! the mutation draws of the first and second child. Fitness evaluation may
//! run on several threads; it consumes no randomness, so results do not
//! depend on the thread count.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::array::{ArrayConfig, ExcitationSchedule};
use crate::error::{Error, Result};
use crate::metrics::{check_weights, MetricsConfig, MetricsEvaluator, PatternMetrics};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MutationMode {
    /// Every gene is redrawn independently with the mutation probability.
    PerGene,
    /// With the mutation probability, one uniformly chosen gene is redrawn.
    PerChromosome,
}

/// Stop once the best member's SLL and SBL suppressions are within
/// `closeness_db` of each other and both at least `floor_db`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EarlyStop {
    pub closeness_db: f64,
    pub floor_db: f64,
}

impl Default for EarlyStop {
    fn default() -> Self {
        Self {
            closeness_db: 1.0,
            floor_db: 27.0,
        }
    }
}

impl EarlyStop {
    pub fn is_met(&self, metrics: &PatternMetrics) -> bool {
        let (sll, sbl) = (metrics.sll_suppression_db, metrics.sbl_suppression_db);
        (sll - sbl).abs() <= self.closeness_db && sll >= self.floor_db && sbl >= self.floor_db
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaConfig {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_probability: f64,
    pub mutation_probability: f64,
    pub mutation_mode: MutationMode,
    pub elite_count: usize,
    pub w1: f64,
    pub w2: f64,
    pub rng_seed: u64,
    pub early_stop: Option<EarlyStop>,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 60,
            generations: 2000,
            crossover_probability: 0.95,
            mutation_probability: 0.05,
            mutation_mode: MutationMode::PerGene,
            elite_count: 25,
            w1: 1.0,
            w2: 6.0,
            rng_seed: 0,
            early_stop: None,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        let invalid = |field, reason: String| Err(Error::InvalidConfig { field, reason });
        if self.population_size < 2 {
            return invalid("population_size", "must be at least 2".into());
        }
        if self.generations == 0 {
            return invalid("generations", "must be at least 1".into());
        }
        if self.elite_count >= self.population_size {
            return invalid(
                "elite_count",
                format!(
                    "{} must be below population_size {}",
                    self.elite_count, self.population_size
                ),
            );
        }
        for (field, p) in [
            ("crossover_probability", self.crossover_probability),
            ("mutation_probability", self.mutation_probability),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return invalid(field, format!("{p} is not in [0, 1]"));
            }
        }
        if let Some(stop) = &self.early_stop {
            if !(stop.closeness_db.is_finite() && stop.closeness_db >= 0.0) {
                return invalid("early_stop_closeness_db", "must be nonnegative".into());
            }
            if !stop.floor_db.is_finite() {
                return invalid("early_stop_floor_db", "must be a number".into());
            }
        }
        check_weights(self.w1, self.w2)
    }
}

/// Population statistics after one generation of breeding.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    /// 1-based generation number.
    pub generation: usize,
    pub best_fitness: f64,
    pub average_fitness: f64,
    pub best_sll_suppression_db: f64,
    pub best_sbl_suppression_db: f64,
    /// Members flagged eligible for mating in this population.
    pub survivor_count: usize,
    /// The mating pool that produced this generation had fewer than two
    /// members, so offspring were mutated clones of the best member.
    pub cloned_best: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct GaTrace {
    pub rows: Vec<TraceRow>,
}

impl GaTrace {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }

    pub fn best_is_nondecreasing(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].best_fitness >= w[0].best_fitness)
    }
}

#[derive(Clone, Debug)]
pub struct GaOutcome {
    /// Best member seen over the whole run.
    pub best: ExcitationSchedule,
    pub best_fitness: f64,
    pub metrics: PatternMetrics,
    pub trace: GaTrace,
    pub final_population: Vec<ExcitationSchedule>,
}

/// The random stream used by [`evolve`].
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_schedule<R: Rng + ?Sized>(array: &ArrayConfig, rng: &mut R) -> ExcitationSchedule {
    let genes = (0..array.chromosome_len())
        .map(|_| rng.gen_range(0..=array.max_gene))
        .collect();
    ExcitationSchedule::new(array.element_pairs, array.time_steps, genes)
        .expect("chromosome length matches the array")
}

/// `population_size` schedules with genes uniform on `0..=max_gene`.
/// All-zero draws are redrawn since they have no main beam.
pub fn initialize_population<R: Rng + ?Sized>(
    array: &ArrayConfig,
    ga: &GaConfig,
    rng: &mut R,
) -> Vec<ExcitationSchedule> {
    (0..ga.population_size)
        .map(|_| loop {
            let s = random_schedule(array, rng);
            if !s.is_all_zero() {
                break s;
            }
        })
        .collect()
}

/// Mating-eligibility flags: elites always, others when their fitness is at
/// least the population mean. Returns the flags and their count.
pub fn mark_survivors(fitnesses: &[f64], elites: &[usize]) -> (Vec<bool>, usize) {
    let mean = fitnesses.iter().sum::<f64>() / fitnesses.len() as f64;
    let mut flags: Vec<bool> = fitnesses.iter().map(|&f| f >= mean).collect();
    for &e in elites {
        flags[e] = true;
    }
    let count = flags.iter().filter(|&&f| f).count();
    (flags, count)
}

/// Indices of the `count` fittest members, best first; equal fitness goes to
/// the lower index.
pub fn rank_elites(fitnesses: &[f64], count: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..fitnesses.len()).collect();
    order.sort_by(|&a, &b| fitnesses[b].total_cmp(&fitnesses[a]).then(a.cmp(&b)));
    order.truncate(count);
    order
}

fn check_same_shape(a: &ExcitationSchedule, b: &ExcitationSchedule) -> Result<()> {
    if a.elements() != b.elements() || a.steps() != b.steps() {
        return Err(Error::DimensionMismatch {
            expected_rows: a.elements(),
            expected_cols: a.steps(),
            found_rows: b.elements(),
            found_cols: b.steps(),
        });
    }
    Ok(())
}

/// Swaps the chromosome tails of two parents from position `cut` on.
pub fn crossover_at(
    parent_a: &ExcitationSchedule,
    parent_b: &ExcitationSchedule,
    cut: usize,
) -> Result<(ExcitationSchedule, ExcitationSchedule)> {
    check_same_shape(parent_a, parent_b)?;
    let mut child_a = parent_a.clone();
    let mut child_b = parent_b.clone();
    let cut = cut.min(parent_a.genes().len());
    child_a.genes_mut()[cut..].copy_from_slice(&parent_b.genes()[cut..]);
    child_b.genes_mut()[cut..].copy_from_slice(&parent_a.genes()[cut..]);
    Ok((child_a, child_b))
}

/// Single-point crossover applied with `probability`; the cut is uniform on
/// `1..len`. Otherwise the children are copies of the parents.
pub fn crossover<R: Rng + ?Sized>(
    parent_a: &ExcitationSchedule,
    parent_b: &ExcitationSchedule,
    probability: f64,
    rng: &mut R,
) -> Result<(ExcitationSchedule, ExcitationSchedule)> {
    check_same_shape(parent_a, parent_b)?;
    let len = parent_a.genes().len();
    if len < 2 || !rng.gen_bool(probability) {
        return Ok((parent_a.clone(), parent_b.clone()));
    }
    let cut = rng.gen_range(1..len);
    crossover_at(parent_a, parent_b, cut)
}

/// Per-gene mutation: each gene is independently redrawn from `0..=max_gene`
/// with `probability` (the new value may equal the old one).
pub fn mutate<R: Rng + ?Sized>(
    schedule: &ExcitationSchedule,
    probability: f64,
    max_gene: u8,
    rng: &mut R,
) -> ExcitationSchedule {
    let mut out = schedule.clone();
    mutate_in_place(&mut out, probability, max_gene, MutationMode::PerGene, rng);
    out
}

pub fn mutate_in_place<R: Rng + ?Sized>(
    schedule: &mut ExcitationSchedule,
    probability: f64,
    max_gene: u8,
    mode: MutationMode,
    rng: &mut R,
) {
    if probability <= 0.0 {
        return;
    }
    match mode {
        MutationMode::PerGene => {
            for g in schedule.genes_mut() {
                if rng.gen_bool(probability) {
                    *g = rng.gen_range(0..=max_gene);
                }
            }
        }
        MutationMode::PerChromosome => {
            if rng.gen_bool(probability) {
                let genes = schedule.genes_mut();
                let i = rng.gen_range(0..genes.len());
                genes[i] = rng.gen_range(0..=max_gene);
            }
        }
    }
}

#[derive(Clone)]
struct Member {
    schedule: ExcitationSchedule,
    fitness: f64,
    metrics: PatternMetrics,
}

enum Slot {
    Scored(Member),
    Fresh(ExcitationSchedule),
}

fn score(evaluator: &MetricsEvaluator, ga: &GaConfig, slots: Vec<Slot>) -> Result<Vec<Member>> {
    slots
        .into_par_iter()
        .map(|slot| match slot {
            Slot::Scored(m) => Ok(m),
            Slot::Fresh(schedule) => {
                let (fitness, metrics) = evaluator.fitness(&schedule, ga.w1, ga.w2)?;
                Ok(Member {
                    schedule,
                    fitness,
                    metrics,
                })
            }
        })
        .collect()
}

struct Selection {
    elites: Vec<usize>,
    pool: Vec<usize>,
    best: usize,
    average: f64,
}

fn select(population: &[Member], elite_count: usize) -> Selection {
    let fitnesses: Vec<f64> = population.iter().map(|m| m.fitness).collect();
    let ranked = rank_elites(&fitnesses, elite_count.max(1));
    let best = ranked[0];
    let elites = ranked[..elite_count].to_vec();
    let (flags, _) = mark_survivors(&fitnesses, &elites);
    let pool = (0..flags.len()).filter(|&i| flags[i]).collect();
    Selection {
        elites,
        pool,
        best,
        average: fitnesses.iter().sum::<f64>() / fitnesses.len() as f64,
    }
}

fn breed<R: Rng + ?Sized>(
    population: &[Member],
    selection: &Selection,
    array: &ArrayConfig,
    ga: &GaConfig,
    rng: &mut R,
) -> Result<(Vec<Slot>, bool)> {
    let mut next: Vec<Slot> = selection
        .elites
        .iter()
        .map(|&i| Slot::Scored(population[i].clone()))
        .collect();
    let cloned_best = selection.pool.len() < 2;
    let push = |next: &mut Vec<Slot>, mut child: ExcitationSchedule, rng: &mut R| {
        mutate_in_place(
            &mut child,
            ga.mutation_probability,
            array.max_gene,
            ga.mutation_mode,
            rng,
        );
        // An all-zero child has no defined fitness; it is dropped.
        if next.len() < ga.population_size && !child.is_all_zero() {
            next.push(Slot::Fresh(child));
        }
    };
    while next.len() < ga.population_size {
        if cloned_best {
            push(&mut next, population[selection.best].schedule.clone(), rng);
            continue;
        }
        let picks = index::sample(rng, selection.pool.len(), 2);
        let a = &population[selection.pool[picks.index(0)]].schedule;
        let b = &population[selection.pool[picks.index(1)]].schedule;
        let (child_a, child_b) = crossover(a, b, ga.crossover_probability, rng)?;
        push(&mut next, child_a, rng);
        push(&mut next, child_b, rng);
    }
    Ok((next, cloned_best))
}

/// Runs the optimizer with the stream seeded from `ga.rng_seed`.
pub fn evolve(array: &ArrayConfig, ga: &GaConfig, metrics: &MetricsConfig) -> Result<GaOutcome> {
    evolve_with_rng(array, ga, metrics, &mut seeded_rng(ga.rng_seed))
}

pub fn evolve_with_rng<R: Rng + ?Sized>(
    array: &ArrayConfig,
    ga: &GaConfig,
    metrics: &MetricsConfig,
    rng: &mut R,
) -> Result<GaOutcome> {
    array.validate()?;
    ga.validate()?;
    let evaluator = MetricsEvaluator::new(array.clone(), metrics.clone())?;

    let initial = initialize_population(array, ga, rng)
        .into_iter()
        .map(Slot::Fresh)
        .collect();
    let mut population = score(&evaluator, ga, initial)?;
    let mut selection = select(&population, ga.elite_count);
    let mut best = population[selection.best].clone();
    let mut trace = GaTrace::default();

    for generation in 1..=ga.generations {
        let (slots, cloned_best) = breed(&population, &selection, array, ga, rng)?;
        population = score(&evaluator, ga, slots)?;
        selection = select(&population, ga.elite_count);

        let leader = &population[selection.best];
        if leader.fitness > best.fitness {
            best = leader.clone();
        }
        trace.rows.push(TraceRow {
            generation,
            best_fitness: leader.fitness,
            average_fitness: selection.average,
            best_sll_suppression_db: leader.metrics.sll_suppression_db,
            best_sbl_suppression_db: leader.metrics.sbl_suppression_db,
            survivor_count: selection.pool.len(),
            cloned_best,
        });
        if ga
            .early_stop
            .is_some_and(|stop| stop.is_met(&leader.metrics))
        {
            break;
        }
    }

    Ok(GaOutcome {
        best: best.schedule,
        best_fitness: best.fitness,
        metrics: best.metrics,
        trace,
        final_population: population.into_iter().map(|m| m.schedule).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small_ga(generations: usize, seed: u64) -> GaConfig {
        GaConfig {
            population_size: 20,
            elite_count: 5,
            generations,
            rng_seed: seed,
            ..GaConfig::default()
        }
    }

    fn coarse_metrics() -> MetricsConfig {
        MetricsConfig {
            grid_points: 401,
            ..MetricsConfig::default()
        }
    }

    #[test]
    fn survivors_above_mean() {
        let (flags, n) = mark_survivors(&[1.0, 2.0, 3.0], &[]);
        assert_eq!(flags, vec![false, true, true]);
        assert_eq!(n, 2);
    }

    #[test]
    fn equal_fitness_all_survive() {
        let (flags, n) = mark_survivors(&[4.0; 5], &[]);
        assert!(flags.iter().all(|&f| f));
        assert_eq!(n, 5);
    }

    #[test]
    fn elite_flag_overrides_mean() {
        let (flags, n) = mark_survivors(&[0.0, 10.0], &[0]);
        assert_eq!(flags, vec![true, true]);
        assert_eq!(n, 2);
    }

    #[test]
    fn elite_ties_go_to_lower_index() {
        assert_eq!(rank_elites(&[1.0, 3.0, 3.0, 2.0, 3.0], 3), vec![1, 2, 4]);
        assert_eq!(rank_elites(&[5.0, 1.0], 0), Vec::<usize>::new());
    }

    #[test]
    fn crossover_identical_parents_is_fixed_point() {
        let mut rng = seeded_rng(1);
        let a = random_schedule(&ArrayConfig::default(), &mut rng);
        for _ in 0..20 {
            let (x, y) = crossover(&a, &a, 1.0, &mut rng).unwrap();
            assert_eq!(x, a);
            assert_eq!(y, a);
        }
    }

    #[test]
    fn crossover_probability_zero_copies() {
        let mut rng = seeded_rng(2);
        let cfg = ArrayConfig::default();
        let a = random_schedule(&cfg, &mut rng);
        let b = random_schedule(&cfg, &mut rng);
        let (x, y) = crossover(&a, &b, 0.0, &mut rng).unwrap();
        assert_eq!((x, y), (a, b));
    }

    #[test]
    fn crossover_at_midpoint() {
        let zeros = ExcitationSchedule::uniform(8, 10, 0);
        let sevens = ExcitationSchedule::uniform(8, 10, 7);
        let (a, b) = crossover_at(&zeros, &sevens, 40).unwrap();
        let mut expected = vec![0u8; 40];
        expected.extend([7u8; 40]);
        assert_eq!(a.genes(), expected.as_slice());
        assert!(b.genes()[..40].iter().all(|&g| g == 7));
        assert!(b.genes()[40..].iter().all(|&g| g == 0));
    }

    #[test]
    fn crossover_rejects_shape_mismatch() {
        let a = ExcitationSchedule::uniform(8, 10, 1);
        let b = ExcitationSchedule::uniform(8, 9, 1);
        let mut rng = seeded_rng(0);
        assert!(matches!(
            crossover(&a, &b, 1.0, &mut rng),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn mutation_edge_probabilities() {
        let mut rng = seeded_rng(3);
        let s = random_schedule(&ArrayConfig::default(), &mut rng);
        assert_eq!(mutate(&s, 0.0, 7, &mut rng), s);
        let zeroed = mutate(&s, 1.0, 0, &mut rng);
        assert!(zeroed.is_all_zero());
    }

    #[test]
    fn mutation_rate_concentrates() {
        // Count redraw decisions directly: mutate with max_gene = 0 on an
        // all-ones chromosome so every redraw is visible.
        let mut rng = seeded_rng(4);
        let s = ExcitationSchedule::uniform(1, 100_000, 1);
        let m = mutate(&s, 0.05, 0, &mut rng);
        let redrawn = m.genes().iter().filter(|&&g| g == 0).count() as f64 / 1e5;
        assert!((redrawn - 0.05).abs() < 0.003, "{redrawn}");
    }

    #[test]
    fn per_chromosome_mutation_touches_at_most_one_gene() {
        let mut rng = seeded_rng(5);
        for _ in 0..50 {
            let mut s = ExcitationSchedule::uniform(8, 10, 3);
            mutate_in_place(&mut s, 1.0, 7, MutationMode::PerChromosome, &mut rng);
            assert!(s.genes().iter().filter(|&&g| g != 3).count() <= 1);
        }
    }

    #[test]
    fn initialization_is_deterministic_and_in_range() {
        let array = ArrayConfig::default();
        let ga = GaConfig::default();
        let a = initialize_population(&array, &ga, &mut seeded_rng(11));
        let b = initialize_population(&array, &ga, &mut seeded_rng(11));
        assert_eq!(a, b);
        assert_eq!(a.len(), 60);
        for s in &a {
            assert_eq!((s.elements(), s.steps()), (8, 10));
            assert!(s.genes().iter().all(|&g| g <= 7));
        }
        let mean = a.iter().map(|s| s.gene_sum() as f64).sum::<f64>() / (60.0 * 80.0);
        assert!((mean - 3.5).abs() < 0.1, "{mean}");
    }

    #[test]
    fn binary_initialization() {
        let array = ArrayConfig {
            max_gene: 1,
            ..ArrayConfig::default()
        };
        let pop = initialize_population(&array, &GaConfig::default(), &mut seeded_rng(0));
        assert!(pop.iter().all(|s| s.genes().iter().all(|&g| g <= 1)));
        assert!(pop.iter().any(|s| s.genes().contains(&1)));
        assert!(pop.iter().all(|s| !s.is_all_zero()));
    }

    #[test]
    fn config_validation() {
        let mut ga = GaConfig::default();
        assert!(ga.validate().is_ok());
        ga.elite_count = 60;
        assert!(matches!(
            ga.validate(),
            Err(Error::InvalidConfig {
                field: "elite_count",
                ..
            })
        ));
        ga = GaConfig {
            mutation_probability: 1.5,
            ..GaConfig::default()
        };
        assert!(ga.validate().is_err());
        ga = GaConfig {
            w1: 0.0,
            w2: 0.0,
            ..GaConfig::default()
        };
        assert!(matches!(ga.validate(), Err(Error::ZeroWeights)));
    }

    #[test]
    fn no_variation_keeps_initial_members() {
        let array = ArrayConfig::default();
        let ga = GaConfig {
            generations: 1,
            crossover_probability: 0.0,
            mutation_probability: 0.0,
            ..small_ga(1, 21)
        };
        let mc = coarse_metrics();
        let initial = initialize_population(&array, &ga, &mut seeded_rng(21));
        let evaluator = MetricsEvaluator::new(array.clone(), mc.clone()).unwrap();
        let initial_best = initial
            .iter()
            .map(|s| evaluator.fitness(s, ga.w1, ga.w2).unwrap().0)
            .fold(f64::NEG_INFINITY, f64::max);
        let out = evolve(&array, &ga, &mc).unwrap();
        assert_eq!(out.trace.len(), 1);
        assert!(out.final_population.iter().all(|s| initial.contains(s)));
        assert_eq!(out.best_fitness, initial_best);
        assert_eq!(out.trace.rows[0].best_fitness, initial_best);
    }

    #[test]
    fn elites_are_carried_unchanged() {
        let array = ArrayConfig::default();
        let mc = coarse_metrics();
        let evaluator = MetricsEvaluator::new(array.clone(), mc.clone()).unwrap();
        let ga = small_ga(1, 8);
        let mut rng = seeded_rng(8);
        let initial = initialize_population(&array, &ga, &mut rng)
            .into_iter()
            .map(Slot::Fresh)
            .collect();
        let population = score(&evaluator, &ga, initial).unwrap();
        let selection = select(&population, ga.elite_count);
        let (next, _) = breed(&population, &selection, &array, &ga, &mut rng).unwrap();
        assert_eq!(next.len(), ga.population_size);
        for (slot, &src) in next.iter().zip(&selection.elites) {
            match slot {
                Slot::Scored(m) => assert_eq!(m.schedule, population[src].schedule),
                Slot::Fresh(_) => panic!("elite slot was re-bred"),
            }
        }
        assert!(next[ga.elite_count..]
            .iter()
            .all(|s| matches!(s, Slot::Fresh(_))));
    }

    #[test]
    fn tiny_mating_pool_falls_back_to_cloning() {
        // One outstanding member and no elites: only it reaches the mean.
        let array = ArrayConfig {
            element_pairs: 2,
            time_steps: 1,
            ..ArrayConfig::default()
        };
        let s = |a, b| ExcitationSchedule::new(2, 1, vec![a, b]).unwrap();
        let member = |schedule, fitness| Member {
            schedule,
            fitness,
            metrics: PatternMetrics {
                main_beam_db: 0.0,
                sll_suppression_db: 0.0,
                sbl_suppression_db: 0.0,
                per_sideband_suppression_db: vec![],
                sidelobe_angles: vec![],
            },
        };
        let population = vec![
            member(s(1, 1), 0.0),
            member(s(2, 1), 100.0),
            member(s(1, 2), 0.0),
        ];
        let ga = GaConfig {
            population_size: 3,
            elite_count: 0,
            mutation_probability: 0.0,
            ..GaConfig::default()
        };
        let selection = select(&population, 0);
        assert_eq!(selection.pool, vec![1]);
        let (next, cloned) =
            breed(&population, &selection, &array, &ga, &mut seeded_rng(0)).unwrap();
        assert!(cloned);
        for slot in next {
            match slot {
                Slot::Fresh(c) => assert_eq!(c, s(2, 1)),
                Slot::Scored(_) => panic!("no elites expected"),
            }
        }
    }

    #[test]
    fn early_stop_ends_run() {
        let stop = EarlyStop {
            closeness_db: 1000.0,
            floor_db: -1000.0,
        };
        let ga = GaConfig {
            early_stop: Some(stop),
            ..small_ga(50, 3)
        };
        let out = evolve(&ArrayConfig::default(), &ga, &coarse_metrics()).unwrap();
        assert_eq!(out.trace.len(), 1);
    }

    #[test]
    fn evolve_is_reproducible_and_monotone() {
        let array = ArrayConfig::default();
        let mc = coarse_metrics();
        let ga = small_ga(30, 99);
        let a = evolve(&array, &ga, &mc).unwrap();
        let b = evolve(&array, &ga, &mc).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.best, b.best);
        assert!(a.trace.best_is_nondecreasing());
        assert_eq!(a.best_fitness, a.trace.last().unwrap().best_fitness);
        let recomputed = MetricsEvaluator::new(array, mc)
            .unwrap()
            .fitness(&a.best, ga.w1, ga.w2)
            .unwrap();
        assert_eq!(recomputed.0, a.best_fitness);
    }

    /// Exhaustive optimum over the 255 nonzero static binary tapers.
    fn best_binary_taper(array: &ArrayConfig, mc: &MetricsConfig) -> f64 {
        let evaluator = MetricsEvaluator::new(array.clone(), mc.clone()).unwrap();
        (1u32..256)
            .map(|bits| {
                let genes = (0..8).map(|k| ((bits >> k) & 1) as u8).collect();
                let s = ExcitationSchedule::new(8, 1, genes).unwrap();
                evaluator.fitness(&s, 1.0, 0.0).unwrap().0
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn binary_static_search_beats_uniform() {
        let array = ArrayConfig {
            max_gene: 1,
            time_steps: 1,
            ..ArrayConfig::default()
        };
        let mc = MetricsConfig::default();
        let optimum = best_binary_taper(&array, &mc);
        assert!(optimum > 13.2, "{optimum}");
        let ga = GaConfig {
            w1: 1.0,
            w2: 0.0,
            generations: 200,
            rng_seed: 7,
            ..GaConfig::default()
        };
        let out = evolve(&array, &ga, &mc).unwrap();
        assert!(out.best_fitness > 13.2);
        assert!(out.best_fitness <= optimum);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]

        #[test]
        fn genes_stay_in_range(seed in any::<u64>(), max_gene in 1u8..=7) {
            let array = ArrayConfig { element_pairs: 4, time_steps: 5, max_gene, ..ArrayConfig::default() };
            let ga = GaConfig { mutation_probability: 0.3, ..small_ga(10, seed) };
            let out = evolve(&array, &ga, &coarse_metrics()).unwrap();
            for s in &out.final_population {
                prop_assert!(s.genes().iter().all(|&g| g <= max_gene));
                prop_assert!(!s.is_all_zero());
            }
            prop_assert!(out.trace.best_is_nondecreasing());
        }
    }
}
