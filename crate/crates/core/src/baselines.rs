//! Simplified comparison models: majority voting, reputation weighting and
//! peer authentication.

use rand::Rng;
use thiserror::Error;

use crate::ids::Event;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum BaselineError {
    #[error("no reports")]
    Empty,
    #[error("{events} reports but {other} scores")]
    LengthMismatch { events: usize, other: usize },
    #[error("reputation scores must be finite and non-negative")]
    BadReputation,
}

/// `winner` is `None` on an exact tie. A conditional outcome depends on
/// something other than the reports themselves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BaselineOutcome {
    pub winner: Option<Event>,
    pub conditional: bool,
}

fn tally(events: impl IntoIterator<Item = (Event, f64)>) -> Option<Event> {
    let (mut c, mut nc) = (0.0, 0.0);
    for (e, w) in events {
        match e {
            Event::Congested => c += w,
            Event::NonCongested => nc += w,
        }
    }
    if c > nc {
        Some(Event::Congested)
    } else if nc > c {
        Some(Event::NonCongested)
    } else {
        None
    }
}

pub fn majority_vote(events: &[Event]) -> Result<BaselineOutcome, BaselineError> {
    if events.is_empty() {
        return Err(BaselineError::Empty);
    }
    let winner = tally(events.iter().map(|&e| (e, 1.0)));
    Ok(BaselineOutcome { winner, conditional: winner.is_none() })
}

/// Reputation-weighted vote. Unequal scores make the outcome conditional on
/// them; equal scores reduce to [`majority_vote`].
pub fn reputation_decide(events: &[Event], reputations: &[f64]) -> Result<BaselineOutcome, BaselineError> {
    if events.is_empty() {
        return Err(BaselineError::Empty);
    }
    if events.len() != reputations.len() {
        return Err(BaselineError::LengthMismatch { events: events.len(), other: reputations.len() });
    }
    if reputations.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return Err(BaselineError::BadReputation);
    }
    let majority = majority_vote(events)?;
    if reputations.windows(2).all(|w| w[0] == w[1]) {
        return Ok(majority);
    }
    let winner = tally(events.iter().copied().zip(reputations.iter().copied()));
    Ok(BaselineOutcome { winner, conditional: true })
}

/// Draws per-vehicle prior scores in [0, 1).
pub fn sample_reputations<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.gen::<f64>()).collect()
}

/// `ratings[i]` holds the ratings received by report `i`. Reports with at
/// least `threshold` positive ratings are counted; the counted majority wins.
pub fn peer_auth_decide(
    events: &[Event],
    ratings: &[Vec<bool>],
    threshold: usize,
) -> Result<BaselineOutcome, BaselineError> {
    if events.is_empty() {
        return Err(BaselineError::Empty);
    }
    if events.len() != ratings.len() {
        return Err(BaselineError::LengthMismatch { events: events.len(), other: ratings.len() });
    }
    let counted: Vec<Event> = events
        .iter()
        .zip(ratings)
        .filter(|(_, r)| r.iter().filter(|&&ok| ok).count() >= threshold)
        .map(|(e, _)| *e)
        .collect();
    if counted.is_empty() {
        return Ok(BaselineOutcome { winner: None, conditional: false });
    }
    majority_vote(&counted)
}

/// Ratings each vehicle sends when it rates `threshold` peers: it endorses
/// the next members of its own reporting group in ring order and spends any
/// slots left over on negative ratings of the other group.
///
/// `plan[i]` lists `(rated vehicle, positive)` for rater `i`.
pub fn peer_rating_plan(events: &[Event], threshold: usize) -> Vec<Vec<(usize, bool)>> {
    let mut plan = vec![Vec::new(); events.len()];
    let group = |e: Event| -> Vec<usize> { (0..events.len()).filter(|&i| events[i] == e).collect() };
    let groups = [group(Event::Congested), group(Event::NonCongested)];
    for (g, members) in groups.iter().enumerate() {
        let others = &groups[1 - g];
        let endorse = threshold.min(members.len().saturating_sub(1));
        for (k, &rater) in members.iter().enumerate() {
            for step in 1..=endorse {
                plan[rater].push((members[(k + step) % members.len()], true));
            }
            let spare = if others.is_empty() { 0 } else { threshold - endorse };
            for step in 0..spare {
                plan[rater].push((others[(k + step) % others.len()], false));
            }
        }
    }
    plan
}

/// Ratings received per report under [`peer_rating_plan`].
pub fn peer_ratings(events: &[Event], threshold: usize) -> Vec<Vec<bool>> {
    let mut received = vec![Vec::new(); events.len()];
    for ratings in peer_rating_plan(events, threshold) {
        for (about, positive) in ratings {
            received[about].push(positive);
        }
    }
    received
}

#[cfg(test)]
mod tests {
    use super::*;
    use Event::*;

    fn mix(c: usize, nc: usize) -> Vec<Event> {
        let mut v = vec![Congested; c];
        v.extend(vec![NonCongested; nc]);
        v
    }

    #[test]
    fn majority() {
        assert_eq!(majority_vote(&mix(60, 40)).unwrap().winner, Some(Congested));
        assert_eq!(majority_vote(&mix(50, 50)).unwrap(), BaselineOutcome { winner: None, conditional: true });
        assert_eq!(majority_vote(&mix(40, 60)).unwrap().winner, Some(NonCongested));
        assert_eq!(majority_vote(&[]), Err(BaselineError::Empty));
    }

    #[test]
    fn reputation_outweighs_count() {
        let events = mix(5, 95);
        let mut reps = vec![10.0; 5];
        reps.extend(vec![0.0; 95]);
        let out = reputation_decide(&events, &reps).unwrap();
        assert_eq!(out, BaselineOutcome { winner: Some(Congested), conditional: true });
        assert_eq!(reputation_decide(&events, &[1.0; 100]).unwrap(), majority_vote(&events).unwrap());
    }

    #[test]
    fn peer_auth_tracks_majority() {
        for (c, nc) in [(90, 10), (50, 50), (10, 90), (97, 3)] {
            let e = mix(c, nc);
            let r = peer_ratings(&e, 3);
            assert!(r.iter().all(|x| x.len() <= 2 * 3 + 3));
            let out = peer_auth_decide(&e, &r, 3).unwrap();
            assert_eq!(out.winner, majority_vote(&e).unwrap().winner, "{c}/{nc}");
        }
    }

    #[test]
    fn every_vehicle_sends_threshold_ratings() {
        let e = mix(7, 3);
        assert!(peer_rating_plan(&e, 4).iter().all(|r| r.len() == 4));
        let total: usize = peer_ratings(&e, 4).iter().map(Vec::len).sum();
        assert_eq!(total, 10 * 4);
    }
}
