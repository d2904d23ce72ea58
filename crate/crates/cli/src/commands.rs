//! Command implementations. Each returns a report value; rendering as JSON
//! or text is left to the caller.

use std::path::Path;

use choquet_core::classical::{choquet_integral, choquet_via_mobius, mobius};
use choquet_core::comonotone::{are_comonotonic_states_with, compare as preorder};
use choquet_core::family::{compare_with_choquet, solve_family, HermitianParameterization};
use choquet_core::quantum::{choquet, ranking_with};
use choquet_core::{Comonotony, HermitianMatrix, Preorder, RankedFunction, Subset, TolProfile, Tolerances};

use crate::error::{CliError, CliResult};
use crate::problem::{self, ProblemFile};
use crate::report::*;

pub const PROFILE_VAR: &str = "CHOQUET_TOL_PROFILE";
pub const DEFAULT_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, Default)]
pub struct Settings {
    pub profile: TolProfile,
}

impl Settings {
    /// Reads the tolerance profile from the environment.
    pub fn from_env() -> CliResult<Self> {
        let raw = std::env::var(PROFILE_VAR).unwrap_or_default();
        let profile = raw
            .parse::<TolProfile>()
            .map_err(|e| CliError::Validation(format!("{PROFILE_VAR}: {e}")))?;
        Ok(Settings { profile })
    }

    fn tol(&self) -> Tolerances {
        self.profile.tolerances()
    }

    fn tool(&self) -> ToolInfo {
        ToolInfo::new(&self.profile.to_string())
    }
}

pub fn validate(path: &Path, settings: &Settings) -> CliResult<ValidationReport> {
    let problem = problem::read(path)?;
    let mut checked = Vec::new();
    let certificate = if problem.vectors.is_some() || problem.dimension.is_some() {
        let set = problem.reference_set(&settings.tol())?;
        if problem.probabilities.is_some() || problem.rho.is_some() {
            problem.quantum_data(&set)?;
            checked.push(if problem.rho.is_some() { "rho" } else { "probabilities" }.to_string());
        }
        Some(set.certificate().into())
    } else {
        None
    };
    if problem.capacity.is_some() {
        problem.capacity()?;
        checked.push("capacity".into());
    }
    if certificate.is_none() && checked.is_empty() {
        return Err(CliError::Validation("problem has neither `vectors` nor `capacity`".into()));
    }
    Ok(ValidationReport { tool: settings.tool(), certificate, checked_sections: checked })
}

/// Report plus the matrices needed for the text rendering.
pub struct Approximation {
    pub report: ApproximationReport,
    pub c: HermitianMatrix,
    pub r: HermitianMatrix,
}

impl Approximation {
    pub fn to_text(&self) -> String {
        self.report.to_text(&self.c, &self.r)
    }
}

pub fn approximate(path: &Path, settings: &Settings) -> CliResult<Approximation> {
    let problem = problem::read(path)?;
    let set = problem.reference_set(&settings.tol())?;
    let data = problem.quantum_data(&set)?;
    let result = choquet(&set, &data.p)?;
    let report = ApproximationReport::new(settings.tool(), problem, set.certificate(), &result);
    Ok(Approximation { report, c: result.c, r: result.r.into_hermitian() })
}

pub fn classical(
    path: &Path,
    functions: &[Vec<f64>],
    with_mobius: bool,
    settings: &Settings,
) -> CliResult<ClassicalReport> {
    let problem = problem::read(path)?;
    let mu = problem.capacity()?;
    let mob = mobius(&mu)?;
    let mut integrals = Vec::new();
    for f in functions {
        if f.len() != mu.n() {
            return Err(CliError::Validation(format!(
                "function {f:?} has {} values, capacity is on {} points",
                f.len(),
                mu.n()
            )));
        }
        let ranked = RankedFunction::new(f.clone())?;
        integrals.push(IntegralEntry {
            function: f.clone(),
            value: choquet_integral(&ranked, &mu)?,
            value_via_mobius: choquet_via_mobius(&ranked, &mob)?,
        });
    }
    let table = with_mobius.then(|| {
        Subset::all(mu.n())
            .filter(|s| !s.is_empty())
            .map(|s| MobiusEntry { subset: s.labels(), value: mob.value(s) })
            .collect()
    });
    Ok(ClassicalReport { tool: settings.tool(), n: mu.n(), integrals, mobius: table })
}

pub fn compare(first: &Path, second: &Path, settings: &Settings) -> CliResult<ComparisonReport> {
    let a = problem::read(first)?;
    let b = problem::read(second)?;
    if a.dimension != b.dimension || a.vectors != b.vectors {
        return Err(CliError::Validation("the two problems use different reference vectors".into()));
    }
    let tol = settings.tol();
    let set = a.reference_set(&tol)?;
    let pa = a.quantum_data(&set)?.p;
    let pb = b.quantum_data(&set)?.p;
    let verdict = are_comonotonic_states_with(&pa, &pb, &tol)?;
    let relation = match verdict.relation {
        Comonotony::Comonotonic => "comonotonic",
        Comonotony::Weakly => "weakly comonotonic",
        Comonotony::Neither => "neither",
    };
    let (preorder_report, note) = match (verdict.relation, verdict.boundary) {
        (Comonotony::Comonotonic, false) => {
            let v = preorder(&set, &pa, &pb)?;
            let rel = match v.relation {
                Preorder::Succeeds => "succeeds",
                Preorder::Precedes => "precedes",
                Preorder::Equivalent => "equivalent",
            };
            let report = PreorderReport {
                relation: rel.into(),
                first_trace: v.left_trace,
                second_trace: v.right_trace,
            };
            (Some(report), None)
        }
        (Comonotony::Comonotonic, true) => (
            None,
            Some("ties present: the trace preorder is defined only for strict rankings".to_string()),
        ),
        _ => (
            None,
            Some("different comonotone classes: the trace preorder does not apply".to_string()),
        ),
    };
    Ok(ComparisonReport {
        tool: settings.tool(),
        first_ranking: (&ranking_with(&pa, &tol)).into(),
        second_ranking: (&ranking_with(&pb, &tol)).into(),
        relation: relation.into(),
        boundary: verdict.boundary,
        preorder: preorder_report,
        note,
    })
}

pub fn family(path: &Path, samples: usize, seed: Option<u64>, settings: &Settings) -> CliResult<FamilyReport> {
    let problem: ProblemFile = problem::read(path)?;
    let set = problem.reference_set(&settings.tol())?;
    let p = problem.quantum_data(&set)?.p;
    let seed = seed.or(problem.seed).unwrap_or(0);
    let fam = solve_family(&set, &p)?;
    let cmp = compare_with_choquet(&set, &p, &fam, samples, seed)?;
    Ok(FamilyReport {
        tool: settings.tool(),
        coordinates: HermitianParameterization::coordinate_count(set.d()),
        constraints: set.n(),
        rank: fam.rank,
        free_dimension: fam.free_dimension(),
        residual: fam.residual,
        particular: fam.particular.clone(),
        nullspace: fam.basis.clone(),
        samples: cmp.search.samples,
        seed,
        psd_count: cmp.search.psd_count,
        psd_fraction: cmp.search.fraction,
        best_min_eigenvalue: cmp.search.best_min_eigenvalue,
        witnesses: cmp.search.witnesses.iter().map(|w| matrix_rows(w.as_hermitian())).collect(),
        induced_ranking: (&cmp.report.induced_ranking).into(),
        members: cmp
            .members
            .iter()
            .map(|m| MemberReport { sigma: m.sigma.clone(), weakly_comonotonic: m.weakly_comonotonic })
            .collect(),
        agreement: cmp.agreement,
        problem,
    })
}
