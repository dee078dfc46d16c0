//! Absorption criteria as named, interchangeable strategies.
//!
//! Each criterion inspects an [`AbsorptionProblem`] and reports whether its
//! sufficient (or exact) condition holds. The CLI selects them by name.

use std::sync::OnceLock;

use serde::Serialize;

use super::{AbsorptionProblem, BasisTail, Certificate, PairTraceVerdict, TailIdentity, TwinTail};
use crate::error::{Error, Result};
use crate::oracle;
use crate::registry::{Named, Registry};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Fails,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriterionReport {
    pub criterion: String,
    pub verdict: Verdict,
    pub detail: String,
}

pub trait AbsorptionCriterion: Named + Send + Sync {
    fn description(&self) -> &'static str;
    fn evaluate(&self, problem: &AbsorptionProblem<'_>) -> Result<CriterionReport>;
}

fn report(
    c: &dyn AbsorptionCriterion,
    verdict: Verdict,
    detail: impl Into<String>,
) -> CriterionReport {
    CriterionReport {
        criterion: c.name().to_string(),
        verdict,
        detail: detail.into(),
    }
}

fn trace_names(problem: &AbsorptionProblem<'_>, trace: &crate::gf2::BitVector) -> String {
    let names = problem.graph().names_of(problem.table().members(trace));
    format!("{{{}}}", names.join(","))
}

pub struct CoreCorrection;

impl Named for CoreCorrection {
    fn name(&self) -> &'static str {
        "core-correction"
    }
}

impl AbsorptionCriterion for CoreCorrection {
    fn description(&self) -> &'static str {
        "exact span test by elimination; deletion certificate or parity cut"
    }

    fn evaluate(&self, problem: &AbsorptionProblem<'_>) -> Result<CriterionReport> {
        Ok(match problem.solve_core_correction()? {
            Certificate::Deletion(d) => {
                let traces: Vec<String> = d
                    .tuples
                    .iter()
                    .map(|t| trace_names(problem, &t.trace))
                    .collect();
                report(
                    self,
                    Verdict::Holds,
                    format!("delete one q-tuple of each of [{}]", traces.join(" ")),
                )
            }
            Certificate::ParityCut(p) => report(
                self,
                Verdict::Fails,
                format!(
                    "parity cut Y = {{{}}}",
                    problem.graph().names_of(p.cut.iter()).join(",")
                ),
            ),
        })
    }
}

pub struct RankRichCriterion;

impl Named for RankRichCriterion {
    fn name(&self) -> &'static str {
        "rank-rich"
    }
}

impl AbsorptionCriterion for RankRichCriterion {
    fn description(&self) -> &'static str {
        "available trace classes span the quotient, so every label is absorbed"
    }

    fn evaluate(&self, problem: &AbsorptionProblem<'_>) -> Result<CriterionReport> {
        let rr = problem.rank_rich_check()?;
        let verdict = if rr.spans {
            Verdict::Holds
        } else {
            Verdict::Fails
        };
        Ok(report(
            self,
            verdict,
            format!("rank {} of {}", rr.basis.len(), problem.core().len() - 1),
        ))
    }
}

pub struct PairTraceCriterion;

impl Named for PairTraceCriterion {
    fn name(&self) -> &'static str {
        "pair-trace"
    }
}

impl AbsorptionCriterion for PairTraceCriterion {
    fn description(&self) -> &'static str {
        "heavy pair-trace graph connected, plus an odd heavy trace when |U| is even"
    }

    fn evaluate(&self, problem: &AbsorptionProblem<'_>) -> Result<CriterionReport> {
        if problem.core().len() < 2 {
            return Ok(report(
                self,
                Verdict::NotApplicable,
                "core has fewer than two vertices",
            ));
        }
        Ok(match problem.pair_trace_sufficiency()? {
            PairTraceVerdict::Applies => report(self, Verdict::Holds, "applies"),
            PairTraceVerdict::DoesNotApply(gap) => report(self, Verdict::Fails, format!("{gap:?}")),
        })
    }
}

pub struct AllTailCriterion;

impl Named for AllTailCriterion {
    fn name(&self) -> &'static str {
        "all-tail"
    }
}

impl AbsorptionCriterion for AllTailCriterion {
    fn description(&self) -> &'static str {
        "deleting the whole tail leaves a 2q-modular core"
    }

    fn evaluate(&self, problem: &AbsorptionProblem<'_>) -> Result<CriterionReport> {
        Ok(match problem.all_tail_identity_check() {
            TailIdentity::Holds => report(self, Verdict::Holds, "identity holds"),
            TailIdentity::Fails(f) => report(self, Verdict::Fails, format!("{f:?}")),
        })
    }
}

pub struct BasisTailCriterion;

impl Named for BasisTailCriterion {
    fn name(&self) -> &'static str {
        "basis-tail"
    }
}

impl AbsorptionCriterion for BasisTailCriterion {
    fn description(&self) -> &'static str {
        "q-fold twin tail whose singleton blocks match the label's basis expansion for some u0"
    }

    fn evaluate(&self, problem: &AbsorptionProblem<'_>) -> Result<CriterionReport> {
        Ok(match problem.twin_tail_decompose() {
            TwinTail::NotTwinTail { trace, count } => report(
                self,
                Verdict::NotApplicable,
                format!(
                    "trace {} has {count} realizers",
                    trace_names(problem, &trace)
                ),
            ),
            TwinTail::Blocks(blocks) => {
                let mut first_failure = None;
                for u0 in problem.core().iter() {
                    match problem.basis_tail_check(&blocks, u0)? {
                        BasisTail::Holds => {
                            return Ok(report(
                                self,
                                Verdict::Holds,
                                format!(
                                    "{} blocks, u0 = {}",
                                    blocks.len(),
                                    problem.graph().name(u0)
                                ),
                            ))
                        }
                        BasisTail::Fails(f) => {
                            first_failure.get_or_insert(f);
                        }
                    }
                }
                let f = first_failure.expect("core is nonempty");
                report(
                    self,
                    Verdict::Fails,
                    format!("no distinguished vertex works; first: {f:?}"),
                )
            }
        })
    }
}

pub struct SelfLayerCriterion;

impl Named for SelfLayerCriterion {
    fn name(&self) -> &'static str {
        "self-layer"
    }
}

impl AbsorptionCriterion for SelfLayerCriterion {
    fn description(&self) -> &'static str {
        "after the engine's deletion, every retained tail vertex shares the core residue"
    }

    fn evaluate(&self, problem: &AbsorptionProblem<'_>) -> Result<CriterionReport> {
        let Certificate::Deletion(d) = problem.solve_core_correction()? else {
            return Ok(report(
                self,
                Verdict::NotApplicable,
                "core is not absorbable",
            ));
        };
        let violations = problem.self_layer_check(&d)?;
        Ok(if violations.is_empty() {
            report(self, Verdict::Holds, "retained set is 2q-modular")
        } else {
            report(
                self,
                Verdict::Fails,
                format!(
                    "violations: {}",
                    problem.graph().names_of(violations).join(",")
                ),
            )
        })
    }
}

pub struct BruteForceCriterion;

impl Named for BruteForceCriterion {
    fn name(&self) -> &'static str {
        "brute-force"
    }
}

impl AbsorptionCriterion for BruteForceCriterion {
    fn description(&self) -> &'static str {
        "exhaustive search over trace subsets with physical deletion"
    }

    fn evaluate(&self, problem: &AbsorptionProblem<'_>) -> Result<CriterionReport> {
        match oracle::brute_force_absorption(problem) {
            Ok(o) if o.exists => Ok(report(
                self,
                Verdict::Holds,
                "some subset synchronizes the core",
            )),
            Ok(_) => Ok(report(
                self,
                Verdict::Fails,
                "no subset synchronizes the core",
            )),
            Err(e @ Error::TooManyTraces { .. }) => {
                Ok(report(self, Verdict::NotApplicable, e.to_string()))
            }
            Err(e) => Err(e),
        }
    }
}

pub fn registry() -> &'static Registry<dyn AbsorptionCriterion> {
    static REGISTRY: OnceLock<Registry<dyn AbsorptionCriterion>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let mut r: Registry<dyn AbsorptionCriterion> = Registry::new("absorption criterion");
        r.register(Box::new(CoreCorrection));
        r.register(Box::new(RankRichCriterion));
        r.register(Box::new(PairTraceCriterion));
        r.register(Box::new(AllTailCriterion));
        r.register(Box::new(BasisTailCriterion));
        r.register(Box::new(SelfLayerCriterion));
        r.register(Box::new(BruteForceCriterion));
        r
    })
}

/// Evaluates the named criteria, or all registered ones when `names` is empty.
pub fn evaluate(problem: &AbsorptionProblem<'_>, names: &[String]) -> Result<Vec<CriterionReport>> {
    let reg = registry();
    if names.is_empty() {
        reg.iter().map(|c| c.evaluate(problem)).collect()
    } else {
        names
            .iter()
            .map(|n| reg.get(n)?.evaluate(problem))
            .collect()
    }
}
