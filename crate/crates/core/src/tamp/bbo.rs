use super::{fastest_priorities, Evaluator, Incumbent, Scored, TampConfig};
use crate::graph::PRIORITY_SCALE;
use crate::swarm::{migrate_and_mutate, BboSchedule};
use crate::{par, rng};
use rand::Rng;

pub use crate::swarm::BboParams as BboRouteParams;

pub(super) fn run(ev: &Evaluator, cfg: &TampConfig) -> Incumbent {
    let n = ev.graph.len();
    let p = cfg.bbo;
    let mut rng = rng::seeded(cfg.seed);
    let mut pop: Vec<Vec<f64>> = (0..cfg.population)
        .map(|_| (0..n).map(|_| rng.random_range(0.0..PRIORITY_SCALE)).collect())
        .collect();
    if let Some(seed) = fastest_priorities(ev.graph, cfg) {
        pop[0] = seed;
    }
    let sched = BboSchedule::new(cfg.population, p.immigration, p.emigration, p.mutation_max);
    let mut scores: Vec<Scored> = par::map(cfg.policy, &pop, |x| ev.priorities(x));
    let mut inc = Incumbent::default();
    scores.iter().for_each(|s| inc.offer(s));
    sort_population(&mut pop, &mut scores);
    for it in 0..cfg.iterations {
        let next = migrate_and_mutate(&pop, &sched, |_, r: &mut rng::Rng| r.random_range(0.0..PRIORITY_SCALE), &mut rng);
        let next_scores = par::map(cfg.policy, &next, |x| ev.priorities(x));
        next_scores.iter().for_each(|s| inc.offer(s));
        let elites: Vec<(Vec<f64>, Scored)> =
            pop.iter().cloned().zip(scores.iter().cloned()).take(p.elites).collect();
        pop = next;
        scores = next_scores;
        sort_population(&mut pop, &mut scores);
        let keep = cfg.population - elites.len();
        pop.truncate(keep);
        scores.truncate(keep);
        for (x, s) in elites {
            pop.push(x);
            scores.push(s);
        }
        sort_population(&mut pop, &mut scores);
        inc.record(it);
    }
    inc
}

fn sort_population(pop: &mut Vec<Vec<f64>>, scores: &mut Vec<Scored>) {
    let mut both: Vec<(Vec<f64>, Scored)> = pop.drain(..).zip(scores.drain(..)).collect();
    both.sort_by(|a, b| a.1.score.total_cmp(&b.1.score));
    for (x, s) in both {
        pop.push(x);
        scores.push(s);
    }
}
