use super::{Problem, Score, Tracker};
use crate::swarm::{migrate_and_mutate, BboSchedule};
use rand::Rng;

fn sort(pop: &mut Vec<Vec<f64>>, scores: &mut Vec<Score>) {
    let mut both: Vec<(Vec<f64>, Score)> = pop.drain(..).zip(scores.drain(..)).collect();
    both.sort_by(|a, b| a.1.cost.total_cmp(&b.1.cost));
    for (x, s) in both {
        pop.push(x);
        scores.push(s);
    }
}

pub(super) fn run<R: Rng>(p: &Problem, mut pop: Vec<Vec<f64>>, rng: &mut R) -> Tracker {
    let params = p.cfg.bbo;
    let sched = BboSchedule::new(pop.len(), params.immigration, params.emigration, params.mutation_max);
    let mut scores = p.score_all(&pop);
    let mut tracker = Tracker::new();
    tracker.offer_all(&pop, &scores);
    sort(&mut pop, &mut scores);
    for it in 0..p.cfg.iterations {
        let elites: Vec<(Vec<f64>, Score)> =
            pop.iter().cloned().zip(scores.iter().copied()).take(params.elites).collect();
        let next = migrate_and_mutate(&pop, &sched, |j, r: &mut R| p.uniform(j, r), rng);
        let next_scores = p.score_all(&next);
        tracker.offer_all(&next, &next_scores);
        pop = next;
        scores = next_scores;
        sort(&mut pop, &mut scores);
        let keep = pop.len() - elites.len();
        pop.truncate(keep);
        scores.truncate(keep);
        for (x, s) in elites {
            pop.push(x);
            scores.push(s);
        }
        sort(&mut pop, &mut scores);
        tracker.record(it);
    }
    tracker
}
