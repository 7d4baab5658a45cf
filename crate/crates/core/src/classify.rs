//! Decides whether a base can carry weak-greedy expansions: small elements
//! of Q(beta) representable with negative powers alone. The criterion is
//! that beta is an algebraic integer whose Galois conjugates all stay in the
//! closed unit disk, except beta itself and its complex conjugate. The
//! decision is read off the certified modulus classes of the place system,
//! so a refusal comes with the concrete conjugate balls that break it.

use num_traits::ToPrimitive;
use serde_json::json;

use crate::error::{CoreError, Result};
use crate::places::{BaseLabel, ModulusClass, PlaceSystem, RootBall};

/// Verdict of the admissibility test. `offending` holds the certified
/// conjugates strictly outside the unit disk other than the base and its
/// mirror embedding; it is empty exactly when the verdict admits.
#[derive(Clone, Debug)]
pub struct WeakGreedyVerdict {
    pub admits: bool,
    pub base_class: BaseLabel,
    pub offending: Vec<RootBall>,
}

impl WeakGreedyVerdict {
    /// JSON view used by the command line: class, boolean, witness balls.
    pub fn dump(&self) -> serde_json::Value {
        let witnesses: Vec<serde_json::Value> = self
            .offending
            .iter()
            .map(|rb| {
                let (re, im) = rb.ball.to_f64();
                json!({
                    "re": re,
                    "im": im,
                    "rad": rb.ball.rad.to_f64().unwrap_or(0.0),
                })
            })
            .collect();
        json!({
            "class": self.base_class.to_string(),
            "weak_greedy": self.admits,
            "witnesses": witnesses,
        })
    }
}

/// Decide the weak-greedy criterion for the base of `ps`.
///
/// Non-monic minimal polynomials (rational non-integer bases) fall outside
/// the algebraic-integer hypothesis and are reported as `NotMonic`; callers
/// wanting the total classification read that error as a refusal.
pub fn weak_greedy_decision(ps: &PlaceSystem) -> Result<WeakGreedyVerdict> {
    let mp = ps.field().minpoly();
    if !mp.is_monic() {
        return Err(CoreError::NotMonic {
            degree: mp.degree(),
            leading: mp.leading().clone(),
        });
    }
    let d = ps.distinguished();
    let dist = ps.roots()[d].clone();
    let mut offending = Vec::new();
    for (i, rb) in ps.roots().iter().enumerate() {
        if i == d || ps.root_class(i) != ModulusClass::Expanding {
            continue;
        }
        // complex roots are isolated in mirrored pairs, so the conjugate of
        // the base is recognised exactly
        let is_mirror = !dist.is_real
            && !rb.is_real
            && rb.ball.re == dist.ball.re
            && rb.ball.im == -dist.ball.im.clone();
        if is_mirror {
            continue;
        }
        offending.push(rb.clone());
    }
    Ok(WeakGreedyVerdict {
        admits: offending.is_empty(),
        base_class: ps.label(),
        offending,
    })
}
