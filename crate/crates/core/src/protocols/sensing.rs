use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::spectrum::{Cell, SpectrumDb};

use super::ProtocolError;

/// Spectrum sensing against the ground truth: reports the true state of a
/// channel with probability `accuracy` and its negation otherwise.
#[derive(Debug, Clone)]
pub struct SensingOracle<'a> {
    db: &'a SpectrumDb,
    accuracy: f64,
    rng: ChaCha8Rng,
    calls: u64,
}

impl<'a> SensingOracle<'a> {
    pub fn new(db: &'a SpectrumDb, accuracy: f64, seed: u64) -> Result<Self, ProtocolError> {
        if !(0.0..=1.0).contains(&accuracy) {
            return Err(ProtocolError::Invalid(format!(
                "sensing accuracy {accuracy}"
            )));
        }
        Ok(SensingOracle {
            db,
            accuracy,
            rng: ChaCha8Rng::seed_from_u64(seed),
            calls: 0,
        })
    }

    pub fn perfect(db: &'a SpectrumDb) -> Self {
        SensingOracle {
            db,
            accuracy: 1.0,
            rng: ChaCha8Rng::seed_from_u64(0),
            calls: 0,
        }
    }

    pub fn accuracy(&self) -> f64 {
        self.accuracy
    }

    pub fn calls(&self) -> u64 {
        self.calls
    }

    pub fn sense(&mut self, cell: Cell, chn: u16) -> bool {
        self.calls += 1;
        let truth = self.db.is_available(cell, chn);
        if self.rng.gen_bool(self.accuracy) {
            truth
        } else {
            !truth
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{EpochDay, GridSpec, ParamDomain};

    fn db() -> SpectrumDb {
        SpectrumDb::generate(
            GridSpec::new(10, 31).unwrap(),
            ParamDomain::default(),
            0.3,
            EpochDay(0),
            7,
        )
        .unwrap()
    }

    fn probes() -> impl Iterator<Item = (Cell, u16)> {
        (0..10_000u32).map(|i| {
            (
                Cell {
                    lx: i % 10,
                    ly: (i / 10) % 10,
                },
                (i % 31) as u16,
            )
        })
    }

    #[test]
    fn perfect_sensing_is_truth() {
        let db = db();
        let mut o = SensingOracle::new(&db, 1.0, 1).unwrap();
        assert!(probes().all(|(c, ch)| o.sense(c, ch) == db.is_available(c, ch)));
        assert_eq!(o.calls(), 10_000);
    }

    #[test]
    fn zero_accuracy_is_negated_truth() {
        let db = db();
        let mut o = SensingOracle::new(&db, 0.0, 1).unwrap();
        assert!(probes().all(|(c, ch)| o.sense(c, ch) != db.is_available(c, ch)));
    }

    #[test]
    fn coin_flip_accuracy() {
        // binomial(10^4, 0.5): sd = 50, so [4700, 5300] is a 6σ band
        let db = db();
        let mut o = SensingOracle::new(&db, 0.5, 3).unwrap();
        let agree = probes()
            .filter(|&(c, ch)| o.sense(c, ch) == db.is_available(c, ch))
            .count();
        assert!((4700..=5300).contains(&agree), "agree = {agree}");
    }

    #[test]
    fn deterministic_per_seed() {
        let db = db();
        let mut a = SensingOracle::new(&db, 0.7, 11).unwrap();
        let mut b = SensingOracle::new(&db, 0.7, 11).unwrap();
        assert!(probes().all(|(c, ch)| a.sense(c, ch) == b.sense(c, ch)));
    }

    #[test]
    fn accuracy_out_of_range() {
        let db = db();
        assert!(SensingOracle::new(&db, 1.1, 0).is_err());
        assert!(SensingOracle::new(&db, -0.1, 0).is_err());
    }
}
