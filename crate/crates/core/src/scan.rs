//! Exhaustive scans over admissible image shapes for a fixed (p, d).
//!
//! Cyclotomic mode: the image meets SL2 trivially, so det embeds it into
//! F_p^× and it is cyclic; only cyclic classes are enumerated, and that
//! embedding is re-checked on every class. Abelian mode walks the abelian
//! classes from the shape-guided enumeration. In both modes a class is
//! admissible when it conjugate-contains the required subgroups of at least
//! one inertia constraint, and each admissible class is tested against the
//! mode's conclusion.

use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::abelian::{AbelianClass, AbelianShape};
use crate::arith;
use crate::budget::Budget;
use crate::cache::{Cache, CacheFamily};
use crate::classify::{Classifier, ShapeLabel};
use crate::conjugacy::conjugate_contains;
use crate::error::{Error, Result};
use crate::inertia::{divisibility_oracle, InertiaConstraint, LemmaCase, Reduction};
use crate::mat2::Mat2;
use crate::standard::{named, semi_cartan_power, Family};
use crate::subgroup::{Subgroup, SubgroupKey};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanMode {
    Cyclotomic,
    Abelian,
}

impl fmt::Display for ScanMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Cyclotomic => "cyclotomic",
            Self::Abelian => "abelian",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ScanParams {
    pub p: u64,
    pub d: u64,
    pub ramified: bool,
    pub mode: ScanMode,
    #[serde(skip)]
    pub budget: Budget,
}

impl ScanParams {
    pub fn new(mode: ScanMode, p: u64, d: u64, ramified: bool) -> Self {
        Self {
            p,
            d,
            ramified,
            mode,
            budget: Budget::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 2 || !arith::is_prime(self.p) {
            return Err(Error::NotOddPrime(self.p));
        }
        if self.d == 0 {
            return Err(Error::InvalidKind("field degree must be at least 1".into()));
        }
        Ok(())
    }

    /// Whether the conclusion is claimed at (p, d); below the bounds the scan is descriptive.
    /// Ramified abelian scans are never asserted: the bound (6d)! + 1 is far
    /// beyond any enumerable prime.
    pub fn asserted(&self) -> bool {
        match (self.mode, self.ramified) {
            (ScanMode::Cyclotomic, false) => self.p > 13,
            (ScanMode::Cyclotomic, true) => self.p > 12 * self.d + 1,
            (ScanMode::Abelian, false) => self.p >= 17,
            (ScanMode::Abelian, true) => false,
        }
    }

    fn reductions(&self) -> &'static [Reduction] {
        match self.mode {
            // p ∤ |G| for cyclotomic images, which rules out wild inertia.
            ScanMode::Cyclotomic => &Reduction::TAME,
            ScanMode::Abelian => &Reduction::ALL,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstraintHit {
    pub constraint: InertiaConstraint,
    /// One conjugator per required subgroup.
    pub witnesses: Vec<Mat2>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassEntry {
    pub key: SubgroupKey,
    pub order: usize,
    pub generators: Vec<Mat2>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub shapes: Vec<AbelianShape>,
    /// Why the class cannot be an image under the scan's hypotheses.
    pub exclusion: Option<String>,
    pub constraints_met: Vec<ConstraintHit>,
    pub admissible: bool,
    pub labels: Vec<ShapeLabel>,
    /// The conclusion predicate; `None` for classes that are not admissible.
    pub conclusion_ok: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub key: SubgroupKey,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstraintSummary {
    pub constraint: InertiaConstraint,
    /// Admissible-or-not classes passing the hypotheses that meet this constraint.
    pub satisfied_by: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Totals {
    pub classes: usize,
    pub excluded: usize,
    pub admissible: usize,
    pub violations: usize,
}

/// Divisibility arithmetic behind the bound on p, evaluated for each (e, e0).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundArithmetic {
    pub e: u64,
    pub e0: u64,
    pub a: bool,
    pub b: bool,
    pub c: bool,
    pub d: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanReport {
    pub params: ScanParams,
    /// Whether the conclusion is claimed at these parameters; when false the
    /// report is descriptive and violations do not fail the run.
    pub asserted: bool,
    pub classes: Vec<ClassEntry>,
    pub violations: Vec<Violation>,
    pub constraint_summary: Vec<ConstraintSummary>,
    pub bound_arithmetic: Vec<BoundArithmetic>,
    pub totals: Totals,
    pub elapsed_ms: u64,
}

impl ScanReport {
    /// True when an asserted scan found a violation.
    pub fn failed(&self) -> bool {
        self.asserted && !self.violations.is_empty()
    }
}

struct Context {
    p: u64,
    classifier: Classifier,
    cs: Subgroup,
    cns: Subgroup,
    constraints: Vec<InertiaConstraint>,
}

fn det_surjective(g: &Subgroup) -> bool {
    g.det_image().len() as u64 == g.modulus() - 1
}

fn cyclotomic_exclusion(g: &Subgroup, ramified: bool) -> Option<String> {
    if g.sl2_intersection().order() != 1 {
        return Some("meets-sl2".into());
    }
    if !ramified && !det_surjective(g) {
        return Some("det-not-surjective".into());
    }
    None
}

fn abelian_exclusion(g: &Subgroup, shapes: &[AbelianShape], ramified: bool) -> Option<String> {
    if ramified || det_surjective(g) {
        return None;
    }
    if shapes.contains(&AbelianShape::GammaWithScalars) {
        // det <γ, Z'> = {x^2 : xI ∈ Z'} lies in the squares.
        Some("det-image-in-squares".into())
    } else {
        Some("det-not-surjective".into())
    }
}

impl Context {
    fn new(params: &ScanParams) -> Result<Self> {
        let p = params.p;
        Ok(Self {
            p,
            classifier: Classifier::new(p)?,
            cs: named(Family::Cs, p)?,
            cns: named(Family::Cns, p)?,
            constraints: InertiaConstraint::all(params.d, params.ramified, params.reductions())?,
        })
    }

    fn entry(
        &self,
        params: &ScanParams,
        g: &Subgroup,
        shapes: Vec<AbelianShape>,
    ) -> Result<(ClassEntry, Option<Violation>)> {
        let exclusion = match params.mode {
            ScanMode::Cyclotomic => cyclotomic_exclusion(g, params.ramified),
            ScanMode::Abelian => abelian_exclusion(g, &shapes, params.ramified),
        };
        let mut constraints_met = Vec::new();
        if exclusion.is_none() {
            for c in &self.constraints {
                if let Some(witnesses) = c.met_by(g)? {
                    constraints_met.push(ConstraintHit {
                        constraint: *c,
                        witnesses,
                    });
                }
            }
        }
        let admissible = !constraints_met.is_empty();
        let mut violation = None;
        let conclusion_ok = if admissible {
            let failure = match params.mode {
                ScanMode::Cyclotomic => self.cyclotomic_conclusion(g, &constraints_met)?,
                ScanMode::Abelian => self.abelian_conclusion(g)?,
            };
            if let Some(reason) = &failure {
                violation = Some(Violation {
                    key: g.key(),
                    reason: reason.clone(),
                });
            }
            Some(failure.is_none())
        } else {
            None
        };
        let classification = self.classifier.classify(g)?;
        Ok((
            ClassEntry {
                key: g.key(),
                order: g.order(),
                generators: g.generators().to_vec(),
                shapes,
                exclusion,
                constraints_met,
                admissible,
                labels: classification.labels,
                conclusion_ok,
            },
            violation,
        ))
    }

    /// `G ⊆~ Cs(p)` and `D^{e e0} ⊆~ G` for every met constraint.
    fn cyclotomic_conclusion(&self, g: &Subgroup, met: &[ConstraintHit]) -> Result<Option<String>> {
        if !g.is_cyclic() || g.det_image().len() != g.order() {
            return Ok(Some(
                "det is not injective on a group meeting SL2 trivially".into(),
            ));
        }
        if conjugate_contains(&self.cs, g)?.is_none() {
            return Ok(Some("not conjugate into Cs".into()));
        }
        for hit in met {
            let k = hit.constraint.ee0();
            if conjugate_contains(g, &semi_cartan_power(self.p, k)?)?.is_none() {
                return Ok(Some(format!(
                    "{} met but D^{k} is not conjugate-contained",
                    hit.constraint
                )));
            }
        }
        Ok(None)
    }

    /// `G ⊆~ Cs(p)` or `G ⊆~ Cns(p)`.
    fn abelian_conclusion(&self, g: &Subgroup) -> Result<Option<String>> {
        if conjugate_contains(&self.cs, g)?.is_some() || conjugate_contains(&self.cns, g)?.is_some()
        {
            Ok(None)
        } else {
            Ok(Some("not conjugate into Cs or Cns".into()))
        }
    }
}

fn bound_arithmetic(params: &ScanParams) -> Vec<BoundArithmetic> {
    let e0_max = if params.ramified { params.d } else { 1 };
    let mut out = Vec::new();
    for e in crate::inertia::SEMISTABILITY_INDICES {
        for e0 in 1..=e0_max {
            let o = |case| divisibility_oracle(params.p, e, e0, case);
            out.push(BoundArithmetic {
                e,
                e0,
                a: o(LemmaCase::A),
                b: o(LemmaCase::B),
                c: o(LemmaCase::C),
                d: o(LemmaCase::D),
            });
        }
    }
    out
}

fn run(
    params: &ScanParams,
    candidates: Vec<(Subgroup, Vec<AbelianShape>)>,
    started: Instant,
) -> Result<ScanReport> {
    let ctx = Context::new(params)?;
    let rows: Vec<(ClassEntry, Option<Violation>)> = candidates
        .par_iter()
        .map(|(g, shapes)| ctx.entry(params, g, shapes.clone()))
        .collect::<Result<Vec<_>>>()?;
    let mut classes = Vec::with_capacity(rows.len());
    let mut violations = Vec::new();
    for (entry, violation) in rows {
        classes.push(entry);
        violations.extend(violation);
    }
    let constraint_summary = ctx
        .constraints
        .iter()
        .map(|c| ConstraintSummary {
            constraint: *c,
            satisfied_by: classes
                .iter()
                .filter(|e| e.constraints_met.iter().any(|h| h.constraint == *c))
                .count(),
        })
        .collect();
    let totals = Totals {
        classes: classes.len(),
        excluded: classes.iter().filter(|e| e.exclusion.is_some()).count(),
        admissible: classes.iter().filter(|e| e.admissible).count(),
        violations: violations.len(),
    };
    Ok(ScanReport {
        params: *params,
        asserted: params.asserted(),
        classes,
        violations,
        constraint_summary,
        bound_arithmetic: bound_arithmetic(params),
        totals,
        elapsed_ms: started.elapsed().as_millis() as u64,
    })
}

/// Scan of cyclic images meeting SL2 trivially.
pub fn scan_cyclotomic(params: &ScanParams) -> Result<ScanReport> {
    if params.mode != ScanMode::Cyclotomic {
        return Err(Error::InvalidKind(format!(
            "scan_cyclotomic called with mode {}",
            params.mode
        )));
    }
    scan_with(params, &Cache::disabled())
}

/// Scan of abelian images.
pub fn scan_abelian(params: &ScanParams) -> Result<ScanReport> {
    if params.mode != ScanMode::Abelian {
        return Err(Error::InvalidKind(format!(
            "scan_abelian called with mode {}",
            params.mode
        )));
    }
    scan_with(params, &Cache::disabled())
}

/// Dispatches on `params.mode`.
pub fn scan(params: &ScanParams) -> Result<ScanReport> {
    scan_with(params, &Cache::disabled())
}

/// Dispatches on `params.mode`, reading class lists through `cache`.
pub fn scan_with(params: &ScanParams, cache: &Cache) -> Result<ScanReport> {
    let started = Instant::now();
    params.validate()?;
    let classes = cache.classes(family_for(params.mode), params.p, &params.budget)?;
    run(
        params,
        classes.into_iter().map(|c| (c.group, c.shapes)).collect(),
        started,
    )
}

/// Scans an already enumerated class list (as produced by
/// [`Cache::derive`] for the matching family).
pub fn scan_classes(params: &ScanParams, classes: Vec<AbelianClass>) -> Result<ScanReport> {
    let started = Instant::now();
    params.validate()?;
    run(
        params,
        classes.into_iter().map(|c| (c.group, c.shapes)).collect(),
        started,
    )
}

/// Cache family holding the candidate classes for `mode`.
pub fn family_for(mode: ScanMode) -> CacheFamily {
    match mode {
        ScanMode::Cyclotomic => CacheFamily::Cyclic,
        ScanMode::Abelian => CacheFamily::Abelian,
    }
}
