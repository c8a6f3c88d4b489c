//! Backtracking binary search for a guess close to `π_g`.
//!
//! Each iteration compares both ends of the current interval. A "close"
//! verdict ends the search. Ends that contradict the interval (`l` above
//! `π_g` or `u` below it) pop back one level, or restart from the original
//! interval at level 0. Otherwise the midpoint is compared and the search
//! descends into the half that still brackets `π_g`. Every iteration counts
//! against the cap, backtracks included.

use super::compare::{Comparison, PiComparator};
use super::Event;
use crate::error::{Error, Result};
use crate::walkspace::StateVector;

#[derive(Debug, Clone)]
pub enum SearchOutcome {
    Found { pi_star: f64, state: Option<StateVector>, iterations: usize },
    Failed { iterations: usize },
}

impl SearchOutcome {
    pub fn pi_star(&self) -> Option<f64> {
        match self {
            SearchOutcome::Found { pi_star, .. } => Some(*pi_star),
            SearchOutcome::Failed { .. } => None,
        }
    }

    pub fn iterations(&self) -> usize {
        match self {
            SearchOutcome::Found { iterations, .. } | SearchOutcome::Failed { iterations } => *iterations,
        }
    }
}

pub fn binary_search_pig(cmp: &mut impl PiComparator, l: f64, u: f64, cap: usize) -> Result<SearchOutcome> {
    if !(l >= 0.0 && l < u) {
        return Err(Error::Domain(format!("search interval [{l}, {u}] is empty")));
    }
    let mut levels = vec![(l, u)];
    for iteration in 0..cap {
        let level = levels.len() - 1;
        let (li, ui) = levels[level];
        cmp.note(Event::Search { iteration, level, l: li, u: ui });
        let found = |x: f64, state| SearchOutcome::Found { pi_star: x, state, iterations: iteration + 1 };
        let lo = cmp.compare(li)?;
        if let Comparison::Close(state) = lo {
            return Ok(found(li, state));
        }
        let hi = cmp.compare(ui)?;
        if let Comparison::Close(state) = hi {
            return Ok(found(ui, state));
        }
        if matches!(lo, Comparison::Above) || matches!(hi, Comparison::Below) {
            if level == 0 {
                cmp.note(Event::Restart);
            } else {
                cmp.note(Event::Backtrack { level });
                levels.pop();
            }
            continue;
        }
        let m = 0.5 * (li + ui);
        match cmp.compare(m)? {
            Comparison::Close(state) => return Ok(found(m, state)),
            Comparison::Below => levels.push((m, ui)),
            Comparison::Above => levels.push((li, m)),
        }
    }
    Ok(SearchOutcome::Failed { iterations: cap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::compare::IdealComparator;

    fn search(pi_g: f64, l: f64, u: f64, cap: usize) -> (SearchOutcome, Vec<Event>) {
        let mut cmp = IdealComparator::new(pi_g);
        let out = binary_search_pig(&mut cmp, l, u, cap).unwrap();
        (out, cmp.log)
    }

    #[test]
    fn cap_zero_fails_immediately() {
        let (out, t) = search(0.3, 0.0, 0.4, 0);
        assert!(matches!(out, SearchOutcome::Failed { iterations: 0 }));
        assert!(t.is_empty());
    }

    #[test]
    fn rejects_empty_interval() {
        let mut cmp = IdealComparator::new(0.1);
        assert!(binary_search_pig(&mut cmp, 0.3, 0.3, 5).is_err());
        assert!(binary_search_pig(&mut cmp, -0.1, 0.3, 5).is_err());
    }

    /// π_g = 0.3 on [0, 0.9]: the midpoint 0.45 is above, then 0.225 is close.
    #[test]
    fn trace_descends_left_then_closes() {
        let (out, t) = search(0.3, 0.0, 0.9, 5);
        assert_eq!(out.pi_star(), Some(0.225));
        assert_eq!(out.iterations(), 2);
        assert_eq!(
            t,
            vec![
                Event::Search { iteration: 0, level: 0, l: 0.0, u: 0.9 },
                Event::Search { iteration: 1, level: 1, l: 0.0, u: 0.45 },
            ]
        );
    }

    /// A close midpoint ends the search in one iteration; a small π_g walks
    /// down the levels without backtracking.
    #[test]
    fn trace_descends_right() {
        let (out, t) = search(0.3, 0.0, 0.7, 5);
        // m = 0.35 is close.
        assert_eq!(out.pi_star(), Some(0.35));
        assert_eq!(t.len(), 1);
        let (out, t) = search(0.05, 0.0, 0.8, 10);
        let pi = out.pi_star().unwrap();
        assert!((pi - 0.05).abs() <= 0.05 / 3.0);
        // Levels only grow with an ideal comparator.
        for (i, e) in t.iter().enumerate() {
            assert!(matches!(e, Event::Search { level, .. } if *level == i));
        }
    }

    #[test]
    fn terminates_within_halving_bound() {
        for &pi_g in &[0.002f64, 0.01, 0.037, 0.09, 0.2, 0.33] {
            for &(l, u) in &[(0.0f64, 0.4f64), (0.0, 1.0), (pi_g / 2.0, 0.45)] {
                if !(l <= pi_g && pi_g <= u) {
                    continue;
                }
                let bound = ((u - l) / (2.0 * pi_g / 3.0)).log2().ceil().max(0.0) as usize + 1;
                let (out, _) = search(pi_g, l, u, 64);
                let pi = out.pi_star().expect("found");
                assert!((pi - pi_g).abs() <= pi_g / 3.0);
                assert!(out.iterations() <= bound, "π_g = {pi_g}: {} > {bound}", out.iterations());
            }
        }
    }

    /// An interval that does not bracket π_g triggers restarts until the cap.
    #[test]
    fn restarts_count_against_cap() {
        let (out, t) = search(0.3, 0.0, 0.1, 4);
        assert!(matches!(out, SearchOutcome::Failed { iterations: 4 }));
        assert_eq!(t.iter().filter(|e| matches!(e, Event::Restart)).count(), 4);
    }

    /// A comparator that lies once forces a backtrack, after which the
    /// search still converges.
    #[test]
    fn backtrack_recovers_from_a_wrong_verdict() {
        struct Liar {
            inner: IdealComparator,
            lied: bool,
        }
        impl PiComparator for Liar {
            fn check_close(&mut self, x: f64) -> Result<Option<Option<StateVector>>> {
                self.inner.check_close(x)
            }
            fn compare(&mut self, x: f64) -> Result<Comparison> {
                if !self.lied && x == 0.5 {
                    self.lied = true;
                    return Ok(Comparison::Below);
                }
                self.inner.compare(x)
            }
            fn note(&mut self, e: Event) {
                self.inner.note(e);
            }
        }
        let mut cmp = Liar { inner: IdealComparator::new(0.1), lied: false };
        let out = binary_search_pig(&mut cmp, 0.0, 1.0, 20).unwrap();
        let t = cmp.inner.log;
        assert!((out.pi_star().unwrap() - 0.1).abs() <= 0.1 / 3.0);
        assert!(t.iter().any(|e| matches!(e, Event::Backtrack { level: 1 })));
    }
}
