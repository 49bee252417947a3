//! Randomized checks of the sumset lemmas over seeded set pairs.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;

use super::{
    bsg_construct, exg_construct, plunnecke_check, ruzsa_cover, setsum_bound_check, IntVectorSet,
    PairSubset,
};
use crate::error::{Error, Result};
use crate::seed::{derive_seed, rng_for};

/// Coordinates are drawn from `[-COORD_BOUND, COORD_BOUND]`.
pub const COORD_BOUND: i64 = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Lemma {
    Cover,
    Plunnecke,
    Setsum,
    Exg,
    Bsg,
}

impl Lemma {
    pub const ALL: [Lemma; 5] = [Lemma::Cover, Lemma::Plunnecke, Lemma::Setsum, Lemma::Exg, Lemma::Bsg];

    pub fn name(self) -> &'static str {
        match self {
            Lemma::Cover => "cover",
            Lemma::Plunnecke => "plunnecke",
            Lemma::Setsum => "setsum",
            Lemma::Exg => "exg",
            Lemma::Bsg => "bsg",
        }
    }
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Lemma {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Lemma::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown lemma {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub lemma: Lemma,
    pub trials: usize,
    pub max_card: usize,
    pub seed: u64,
}

/// One checked instance. `constant` is the growth constant the lemma is
/// phrased in (`ε` for the entropy construction), `left`/`bound` the
/// inequality being tested.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRow {
    pub trial: usize,
    pub lemma: Lemma,
    pub size_a: usize,
    pub size_b: usize,
    pub p: i64,
    pub q: i64,
    pub c: f64,
    pub constant: f64,
    pub left: f64,
    pub bound: f64,
    pub pass: bool,
}

pub const CSV_HEADER: &str = "trial,lemma,size_a,size_b,p,q,c,constant,left,bound,pass";

impl TrialRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.trial,
            self.lemma,
            self.size_a,
            self.size_b,
            self.p,
            self.q,
            cell(self.c),
            cell(self.constant),
            cell(self.left),
            cell(self.bound),
            self.pass
        )
    }
}

/// Unused fields stay empty.
fn cell(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        v.to_string()
    }
}

fn random_set<R: Rng>(rng: &mut R, max_card: usize) -> IntVectorSet {
    let n = rng.random_range(1..=max_card);
    let span = (2 * COORD_BOUND + 1) as usize;
    sample(rng, span, n)
        .into_iter()
        .map(|i| i as i64 - COORD_BOUND)
        .collect()
}

fn random_coefficient<R: Rng>(rng: &mut R) -> i64 {
    let v = rng.random_range(1..=3);
    if rng.random_bool(0.5) {
        -v
    } else {
        v
    }
}

pub fn run_trial(lemma: Lemma, trial: usize, max_card: usize, seed: u64) -> Result<TrialRow> {
    let mut rng = rng_for(derive_seed(seed, trial as u64));
    let mut a = random_set(&mut rng, max_card);
    let mut b = random_set(&mut rng, max_card);
    let p = random_coefficient(&mut rng);
    let q = random_coefficient(&mut rng);
    let c = rng.random_range(1.5..4.0);
    let mut row = TrialRow {
        trial,
        lemma,
        size_a: a.len(),
        size_b: b.len(),
        p: 0,
        q: 0,
        c: f64::NAN,
        constant: f64::NAN,
        left: f64::NAN,
        bound: f64::NAN,
        pass: false,
    };
    match lemma {
        Lemma::Cover => {
            let r = ruzsa_cover(&a, &b)?;
            row.constant = r.size_bound;
            row.left = r.cover.len() as f64;
            row.bound = r.size_bound;
            row.pass = r.holds();
        }
        Lemma::Plunnecke => {
            let (pp, qq) = (p.unsigned_abs() as u32, q.unsigned_abs() as u32);
            let r = plunnecke_check(&a, &b, pp, qq)?;
            row.p = pp.into();
            row.q = qq.into();
            row.constant = r.growth;
            row.left = r.left as f64;
            row.bound = r.bound;
            row.pass = r.holds;
        }
        Lemma::Setsum => {
            let r = setsum_bound_check(&a, &b, p, q)?;
            row.p = p;
            row.q = q;
            row.constant = r.growth;
            row.left = r.left as f64;
            row.bound = r.bound;
            row.pass = r.holds;
        }
        Lemma::Exg => {
            if a.len() < b.len() {
                std::mem::swap(&mut a, &mut b);
                row.size_a = a.len();
                row.size_b = b.len();
            }
            let (_, r) = exg_construct(&a, &b, c)?;
            row.c = c;
            row.constant = r.epsilon;
            row.left = r.partial_sumset_size as f64;
            row.bound = r.sumset_bound;
            row.pass = r.holds();
        }
        Lemma::Bsg => {
            let f = PairSubset::full(&a, &b);
            let growth = a.sum(&b)?.len() as f64 / ((a.len() * b.len()) as f64).sqrt();
            row.c = 1.0;
            row.constant = growth;
            match bsg_construct(&a, &b, &f, 1.0, growth) {
                Ok(out) => {
                    row.left = out.report.sumset_size as f64;
                    row.bound = out.report.bound;
                    row.pass = true;
                }
                Err(Error::SearchExhausted(_)) => row.pass = false,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(row)
}

/// Runs `trials` independent instances; rows come back in trial order and
/// do not depend on the thread count.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<TrialRow>> {
    if cfg.trials == 0 {
        return Err(Error::ZeroTrials);
    }
    let span = (2 * COORD_BOUND + 1) as usize;
    if cfg.max_card == 0 || cfg.max_card > span {
        return Err(Error::InvalidArgument(format!(
            "max-card must lie in 1..={span}, got {}",
            cfg.max_card
        )));
    }
    (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(cfg.lemma, t, cfg.max_card, cfg.seed))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_is_reproducible_and_passes() {
        for lemma in Lemma::ALL {
            let cfg = SuiteConfig { lemma, trials: 40, max_card: 12, seed: 9 };
            let rows = run_suite(&cfg).unwrap();
            assert_eq!(rows.len(), 40);
            assert!(rows.iter().all(|r| r.pass), "{lemma}");
            let again = run_suite(&cfg).unwrap();
            let lines = |rs: &[TrialRow]| rs.iter().map(TrialRow::csv_line).collect::<Vec<_>>();
            assert_eq!(lines(&rows), lines(&again));
        }
    }

    #[test]
    fn lemma_names_round_trip() {
        for lemma in Lemma::ALL {
            assert_eq!(lemma.name().parse::<Lemma>().unwrap(), lemma);
        }
        assert!("ruzsa".parse::<Lemma>().is_err());
    }

    #[test]
    fn bad_configs() {
        let cfg = SuiteConfig { lemma: Lemma::Cover, trials: 0, max_card: 5, seed: 0 };
        assert_eq!(run_suite(&cfg), Err(Error::ZeroTrials));
        let cfg = SuiteConfig { trials: 1, max_card: 500, ..cfg };
        assert!(run_suite(&cfg).is_err());
    }
}
