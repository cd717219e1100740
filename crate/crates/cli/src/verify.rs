//! Verification targets and the records each one produces.

use std::time::Instant;

use bpcalc_core::hopf::verify::{verify_coefficient_actions, verify_commutation_relations, verify_structure};
use bpcalc_core::hopf::Hopf;
use bpcalc_core::opcalc::{betap_pipeline, check_complex, differentials, ext1_invariant, gamma1_pipeline, printed_differentials};
use bpcalc_core::report::CheckRecord;
use bpcalc_core::Result;
use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    #[value(name = "lemma7.1")]
    Commutators,
    #[value(name = "lemma7.3")]
    Actions,
    #[value(name = "lemma7.5")]
    Gamma1First,
    #[value(name = "lemma7.7")]
    Gamma1Second,
    #[value(name = "thm7.2")]
    Gamma1,
    #[value(name = "lemma7.9")]
    Ext1,
    #[value(name = "thm7.10")]
    BetaP,
    /// Basis change, integrality of the coproduct, Cartan formula against the right unit.
    #[value(name = "structure")]
    Structure,
    #[value(name = "all")]
    All,
}

const ORDER: [Target; 8] = [
    Target::Commutators,
    Target::Actions,
    Target::Gamma1First,
    Target::Gamma1Second,
    Target::Gamma1,
    Target::Ext1,
    Target::BetaP,
    Target::Structure,
];

const FIRST_STAGE: [&str; 2] = ["gamma1.d0-on-h1", "gamma1.first-stage"];
const SECOND_STAGE: [&str; 4] = ["gamma1.xi-lift", "gamma1.d1-on-xi", "gamma1.second-stage", "indeterminacy.scan"];

impl Target {
    pub fn name(self) -> String {
        self.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
    }
}

/// Memoizes the gamma_1 pipeline, which three targets share.
pub struct Runner<'a> {
    h: &'a Hopf,
    bound_q: u64,
    timings: bool,
    gamma1: Option<Vec<CheckRecord>>,
}

impl<'a> Runner<'a> {
    pub fn new(h: &'a Hopf, bound_q: u64, timings: bool) -> Self {
        Runner { h, bound_q, timings, gamma1: None }
    }

    pub fn run(&mut self, target: Target) -> Result<Vec<CheckRecord>> {
        if target == Target::All {
            let mut out = Vec::new();
            for t in ORDER {
                out.extend(self.run(t)?);
            }
            return Ok(out);
        }
        let start = Instant::now();
        let mut recs = self.records(target)?;
        if self.timings {
            let ms = start.elapsed().as_millis() as u64;
            for r in &mut recs {
                r.runtime_ms = Some(ms);
            }
        }
        Ok(recs)
    }

    fn gamma1(&mut self) -> Result<Vec<CheckRecord>> {
        if self.gamma1.is_none() {
            self.gamma1 = Some(gamma1_pipeline(self.h)?);
        }
        Ok(self.gamma1.clone().unwrap_or_default())
    }

    fn records(&mut self, target: Target) -> Result<Vec<CheckRecord>> {
        let h = self.h;
        let p = h.prime();
        Ok(match target {
            Target::Commutators => {
                let mut out = verify_commutation_relations(h, self.bound_q)?;
                out.extend(check_complex(h, &differentials(h)?, self.bound_q, "complex")?);
                out.push(printed_rejected(h, self.bound_q)?);
                out
            }
            Target::Actions => verify_coefficient_actions(h)?,
            Target::Gamma1First => self.gamma1()?.into_iter().filter(|r| FIRST_STAGE.contains(&r.id.as_str())).collect(),
            Target::Gamma1Second => self.gamma1()?.into_iter().filter(|r| SECOND_STAGE.contains(&r.id.as_str())).collect(),
            Target::Gamma1 => self.gamma1()?,
            Target::Ext1 => {
                let mut out = Vec::new();
                for r in p * p + 1..p * p + p {
                    for mut rec in ext1_invariant(h, r)? {
                        rec.id = format!("{}.r{r}", rec.id);
                        out.push(rec);
                    }
                }
                out
            }
            Target::BetaP => betap_pipeline(h)?,
            Target::Structure => verify_structure(h, 2 * (p.pow(3) - 1))?,
            Target::All => unreachable!("expanded by run"),
        })
    }
}

/// Passes when the displayed variant of `d_1` fails both composites.
fn printed_rejected(h: &Hopf, bound_q: u64) -> Result<CheckRecord> {
    let recs = check_complex(h, &printed_differentials(h)?, bound_q, "printed")?;
    let failed: Vec<&CheckRecord> = recs.iter().filter(|r| !r.passed()).collect();
    let both = ["printed.d1d0", "printed.d2d1"].iter().all(|id| failed.iter().any(|r| r.id == *id));
    let mut rec = CheckRecord::new("complex.printed-d1-rejected", "d1 with entries (1,2) = R1, (2,2) = R1Rp fails d1d0 = 0 and d2d1 = 0", both)
        .expected("printed.d1d0 and printed.d2d1 fail")
        .computed(format!("failing: {}", failed.iter().map(|r| r.id.as_str()).collect::<Vec<_>>().join(", ")));
    if let Some(w) = failed.iter().find_map(|r| r.witness.clone()) {
        rec = rec.witness(w);
    }
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn target_names_round_trip() {
        for t in ORDER.iter().chain([&Target::All]) {
            assert_eq!(Target::from_str(&t.name(), false), Ok(*t));
        }
        assert_eq!(Target::Commutators.name(), "lemma7.1");
    }

    #[test]
    fn all_is_the_concatenation() {
        let h = Hopf::new(5, 4).unwrap();
        let mut runner = Runner::new(&h, 14, false);
        let all = runner.run(Target::All).unwrap();
        let mut parts = Vec::new();
        for t in ORDER {
            parts.extend(runner.run(t).unwrap());
        }
        assert_eq!(all, parts);
        assert!(all.iter().all(CheckRecord::passed));
    }
}
