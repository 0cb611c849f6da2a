//! The `verify` suite: every check that applies to a presentation, one line each.

use equiloc::builtins;
use equiloc::localization::{character, kirillov_check, Normalization};
use equiloc::model::{shift_moment, ManifoldPresentation};
use equiloc::quantize::{main_formula_report, polynomiality_check, RegularTag};
use equiloc::witten::{decay_check, TestFunction, WittenOptions};
use equiloc::Error;
use num_traits::Zero;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::commands::{load, parse_ms};
use crate::{Failure, RunArgs};

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
    /// Reported but not asserted.
    Diag(String),
}

struct Suite<'a> {
    p: &'a ManifoldPresentation,
    ms: Vec<u64>,
    args: &'a RunArgs,
}

impl Suite<'_> {
    fn pole_cancellation(&self) -> Outcome {
        for &m in &self.ms {
            match character(self.p, m) {
                Ok(_) => {}
                Err(Error::NotAPolynomial(msg)) => {
                    return Outcome::Fail(format!("pole cancellation fails at m={}: {}", m, msg))
                }
                Err(e) => return Outcome::Fail(e.to_string()),
            }
        }
        Outcome::Pass(format!("m in {:?}", self.ms))
    }

    fn oracle(&self) -> Result<Outcome, Error> {
        let recipe = match builtins::oracle_recipe(&self.p.name) {
            Ok(r) if builtins::build(&self.p.name)? == *self.p => r,
            _ => return Ok(Outcome::Skip("no enumeration recipe".into())),
        };
        for &m in &self.ms {
            if character(self.p, m)? != recipe.weights(m)?.to_laurent() {
                return Ok(Outcome::Fail(format!("character differs from enumeration at m={}", m)));
            }
        }
        Ok(Outcome::Pass(String::new()))
    }

    fn weight_support(&self) -> Result<Outcome, Error> {
        let lo = self.p.components.iter().map(|f| f.moment).min().unwrap_or(0);
        let hi = self.p.components.iter().map(|f| f.moment).max().unwrap_or(0);
        for &m in &self.ms {
            let chi = character(self.p, m)?;
            let m = m as i64;
            if let Some((e, _)) = chi.coeffs().iter().find(|(e, _)| **e < m * lo || **e > m * hi) {
                return Ok(Outcome::Fail(format!(
                    "z^{} outside [{}, {}] at m={}",
                    e,
                    m * lo,
                    m * hi,
                    m
                )));
            }
        }
        Ok(Outcome::Pass(String::new()))
    }

    fn moment_shift(&self) -> Result<Outcome, Error> {
        let mut rng = StdRng::seed_from_u64(self.args.seed);
        let s: i64 = rng.gen_range(-4..=4);
        let shifted = shift_moment(self.p, s);
        for &m in &self.ms {
            let a = character(self.p, m)?;
            let b = character(&shifted, m)?;
            let expected: std::collections::BTreeMap<_, _> =
                a.coeffs().iter().map(|(e, c)| (e + m as i64 * s, c.clone())).collect();
            if *b.coeffs() != expected {
                return Ok(Outcome::Fail(format!("shift by {} breaks at m={}", s, m)));
            }
        }
        Ok(Outcome::Pass(format!("shift {}", s)))
    }

    fn balance(&self) -> Result<Outcome, Error> {
        if self.p.quotient.is_none() {
            return Ok(Outcome::Skip("no quotient data".into()));
        }
        for &m in &self.ms {
            let r = match main_formula_report(self.p, m) {
                Ok(r) => r,
                Err(Error::Unsupported(msg)) => return Ok(Outcome::Skip(msg)),
                Err(e) => return Err(e),
            };
            if r.balance != Some(true) {
                return Ok(Outcome::Fail(format!("defect {} at m={}", r.defect(), m)));
            }
        }
        Ok(Outcome::Pass(String::new()))
    }

    fn polynomiality(&self) -> Result<Outcome, Error> {
        if !self.p.free_on_regular {
            return Ok(Outcome::Skip("action not free on regular levels".into()));
        }
        let fit = polynomiality_check(self.p, 1, 10)?;
        Ok(if fit.is_exact() {
            Outcome::Pass(format!("degree {:?}", fit.degree()))
        } else {
            Outcome::Fail("rr_invariant is not polynomial on m in 1..10".into())
        })
    }

    fn kirillov(&self) -> Result<Outcome, Error> {
        let mut worst = 0.0f64;
        for m in 1..=4 {
            worst = worst.max(kirillov_check(self.p, m, &[0.05, 0.1, 0.2], Normalization::CALIBRATED)?);
        }
        Ok(if worst <= self.args.kirillov_tol {
            Outcome::Pass(format!("max deviation {:.2e}", worst))
        } else {
            Outcome::Fail(format!("max deviation {:.2e}", worst))
        })
    }

    fn witten(&self) -> Result<Outcome, Error> {
        let phi = TestFunction::<f64>::default_bump(2 * self.p.dim_m as usize + 2);
        let kmax = self
            .p
            .components
            .iter()
            .flat_map(|f| f.weights())
            .map(i64::abs)
            .max()
            .unwrap_or(1) as f64;
        if phi.delta2 * kmax >= 1.0 {
            return Ok(Outcome::Skip("default test function support too wide".into()));
        }
        let opts = WittenOptions::<f64>::default();
        let r = decay_check(self.p, &phi, &[8, 16, 32, 64], &opts, false)?;
        let probe = main_formula_report(self.p, 1)?;
        if probe.regular_term.tag == RegularTag::Diagnostic && !probe.exceptional_sum().is_zero() {
            // the diagnostic regular term is not independent here; report the offset only
            let offset = r.lhs.last().zip(r.rhs.last()).map(|(l, h)| (l - h).re).unwrap_or(0.0);
            return Ok(Outcome::Diag(format!(
                "exponent {:.2}, lhs - rhs at m=64 is {:.6}",
                r.exponent, offset
            )));
        }
        Ok(if r.exponent <= self.args.max_exponent {
            Outcome::Pass(format!("exponent {:.2}", r.exponent))
        } else {
            Outcome::Fail(format!("exponent {:.2}", r.exponent))
        })
    }
}

fn report(name: &str, check: &str, outcome: Result<Outcome, Error>) -> bool {
    let outcome = match outcome {
        Ok(o) => o,
        Err(Error::Unsupported(msg)) => Outcome::Skip(msg),
        Err(e) => Outcome::Fail(e.to_string()),
    };
    let (tag, detail, ok) = match outcome {
        Outcome::Pass(d) => ("PASS", d, true),
        Outcome::Fail(d) => ("FAIL", d, false),
        Outcome::Skip(d) => ("SKIP", d, true),
        Outcome::Diag(d) => ("DIAG", d, true),
    };
    if detail.is_empty() {
        println!("{} {} {}", tag, name, check);
    } else {
        println!("{} {} {}: {}", tag, name, check, detail);
    }
    ok
}

pub fn run(args: &RunArgs) -> Result<(), Failure> {
    let presentations = load(&args.source, true)?;
    let ms = parse_ms(args.m.as_deref(), &(0..=8).collect::<Vec<_>>())?;
    let mut failures = 0;
    for p in &presentations {
        let s = Suite { p, ms: ms.clone(), args };
        let name = p.name.as_str();
        let poles = s.pole_cancellation();
        if !report(name, "pole cancellation", Ok(poles)) {
            failures += 1;
            // everything below needs the character
            continue;
        }
        let checks: [(&str, Result<Outcome, Error>); 7] = [
            ("oracle equivalence", s.oracle()),
            ("weight support", s.weight_support()),
            ("moment shift", s.moment_shift()),
            ("main formula balance", s.balance()),
            ("polynomiality", s.polynomiality()),
            ("kirillov", s.kirillov()),
            ("witten decay", s.witten()),
        ];
        for (check, outcome) in checks {
            if !report(name, check, outcome) {
                failures += 1;
            }
        }
    }
    if failures > 0 {
        return Err(Failure::Verification(format!("{} check(s) failed", failures)));
    }
    Ok(())
}
