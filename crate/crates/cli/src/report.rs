//! Serializable reports. Every report can be written as JSON and read back
//! into an equal value; text rendering lives next to each type.

use std::fmt::Write as _;

use choquet_core::quantum::Bounds;
use choquet_core::{Certificate, ChoquetReport, HermitianMatrix, RankingPermutation};
use serde::{Deserialize, Serialize};

use crate::problem::{ComplexPair, ProblemFile};

pub const TOOL_NAME: &str = "choquet";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
    pub tolerance_profile: String,
}

impl ToolInfo {
    pub fn new(profile: &str) -> Self {
        ToolInfo {
            name: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            tolerance_profile: profile.into(),
        }
    }
}

pub type MatrixRows = Vec<Vec<ComplexPair>>;

pub fn matrix_rows(m: &HermitianMatrix) -> MatrixRows {
    (0..m.dim())
        .map(|i| {
            (0..m.dim())
                .map(|j| {
                    let z = m.entry(i, j);
                    [z.re, z.im]
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub dimension: usize,
    pub vectors: usize,
    pub subsets_checked: usize,
    pub weakest_subset: Vec<usize>,
    pub weakest_singular_value: f64,
    pub warnings: Vec<String>,
}

impl From<&Certificate> for CertificateReport {
    fn from(c: &Certificate) -> Self {
        CertificateReport {
            dimension: c.d,
            vectors: c.n,
            subsets_checked: c.subsets.len(),
            weakest_subset: c.weakest.subset.labels(),
            weakest_singular_value: c.weakest.min_singular_value,
            warnings: c.warnings.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingReport {
    /// Indices in ascending order of probability.
    pub sigma: Vec<usize>,
    pub tie_groups: Vec<Vec<usize>>,
    pub strict: bool,
}

impl From<&RankingPermutation> for RankingReport {
    fn from(r: &RankingPermutation) -> Self {
        RankingReport {
            sigma: r.sigma().labels(),
            tie_groups: r
                .tie_groups()
                .iter()
                .map(|g| g.iter().map(|i| i + 1).collect())
                .collect(),
            strict: r.is_strict(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub mean_probability: f64,
    pub mean_projector_min: f64,
    pub mean_projector_max: f64,
    pub trace_over_dimension: f64,
    pub ranked_projector_min: f64,
    pub ranked_projector_max: f64,
}

impl From<&Bounds> for BoundsReport {
    fn from(b: &Bounds) -> Self {
        BoundsReport {
            mean_probability: b.mean_p,
            mean_projector_min: b.q_min,
            mean_projector_max: b.q_max,
            trace_over_dimension: b.trace_c_over_d,
            ranked_projector_min: b.q_sigma_min,
            ranked_projector_max: b.q_sigma_max,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub tool: ToolInfo,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateReport>,
    pub checked_sections: Vec<String>,
}

impl ValidationReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(c) = &self.certificate {
            writeln!(out, "reference set: {} vectors in dimension {}", c.vectors, c.dimension).unwrap();
            writeln!(out, "{} subsets of size {} checked", c.subsets_checked, c.dimension).unwrap();
            writeln!(
                out,
                "weakest subset {}: smallest singular value {:.4e}",
                braces(&c.weakest_subset),
                c.weakest_singular_value
            )
            .unwrap();
            for w in &c.warnings {
                writeln!(out, "warning: {w}").unwrap();
            }
        }
        if !self.checked_sections.is_empty() {
            writeln!(out, "also valid: {}", self.checked_sections.join(", ")).unwrap();
        }
        out.push_str("valid\n");
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproximationReport {
    pub tool: ToolInfo,
    pub problem: ProblemFile,
    pub certificate: CertificateReport,
    pub probabilities: Vec<f64>,
    pub ranking: RankingReport,
    pub choquet_operator: MatrixRows,
    pub trace: f64,
    pub normalized_state: MatrixRows,
    pub induced_probabilities: Vec<f64>,
    pub induced_ranking: RankingReport,
    pub error: f64,
    pub bounds: BoundsReport,
    pub top_overlap: f64,
    pub weakly_comonotonic: bool,
}

impl ApproximationReport {
    pub fn new(tool: ToolInfo, problem: ProblemFile, certificate: &Certificate, r: &ChoquetReport) -> Self {
        ApproximationReport {
            tool,
            problem,
            certificate: certificate.into(),
            probabilities: r.p.values().to_vec(),
            ranking: (&r.ranking).into(),
            choquet_operator: matrix_rows(&r.c),
            trace: r.trace_c,
            normalized_state: matrix_rows(r.r.as_hermitian()),
            induced_probabilities: r.induced.clone(),
            induced_ranking: (&r.induced_ranking).into(),
            error: r.error,
            bounds: (&r.bounds).into(),
            top_overlap: r.top_overlap,
            weakly_comonotonic: r.weakly_comonotonic,
        }
    }

    pub fn to_text(&self, c: &HermitianMatrix, r: &HermitianMatrix) -> String {
        let mut out = String::new();
        writeln!(out, "probabilities:          {}", list(&self.probabilities)).unwrap();
        writeln!(out, "ranking (ascending):    {}", parens(&self.ranking.sigma)).unwrap();
        if !self.ranking.strict {
            writeln!(out, "tie groups:             {}", groups(&self.ranking.tie_groups)).unwrap();
        }
        writeln!(out, "Choquet operator C:\n{c:.4}").unwrap();
        writeln!(out, "Tr C:                   {:.4}", self.trace).unwrap();
        writeln!(out, "normalized state R = C / Tr C:\n{r:.4}").unwrap();
        writeln!(out, "induced probabilities:  {}", list(&self.induced_probabilities)).unwrap();
        writeln!(out, "induced ranking:        {}", parens(&self.induced_ranking.sigma)).unwrap();
        writeln!(out, "error:                  {:.4}", self.error).unwrap();
        let b = &self.bounds;
        writeln!(
            out,
            "mean probability {:.4} within [{:.4}, {:.4}]",
            b.mean_probability, b.mean_projector_min, b.mean_projector_max
        )
        .unwrap();
        writeln!(
            out,
            "Tr C / d {:.4} within [{:.4}, {:.4}]",
            b.trace_over_dimension, b.ranked_projector_min, b.ranked_projector_max
        )
        .unwrap();
        writeln!(
            out,
            "weakly comonotonic with R: {}",
            if self.weakly_comonotonic { "yes" } else { "no" }
        )
        .unwrap();
        for w in &self.certificate.warnings {
            writeln!(out, "warning: {w}").unwrap();
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralEntry {
    pub function: Vec<f64>,
    pub value: f64,
    /// The same integral evaluated through the Mobius transform.
    pub value_via_mobius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MobiusEntry {
    pub subset: Vec<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalReport {
    pub tool: ToolInfo,
    pub n: usize,
    pub integrals: Vec<IntegralEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mobius: Option<Vec<MobiusEntry>>,
}

impl ClassicalReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.integrals {
            writeln!(out, "f = {}: {:.4}", parens_f(&e.function), e.value).unwrap();
        }
        if let Some(table) = &self.mobius {
            writeln!(out, "Mobius transform:").unwrap();
            for e in table {
                writeln!(out, "  {:<12} {:.4}", braces(&e.subset), e.value).unwrap();
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreorderReport {
    /// `succeeds`, `precedes` or `equivalent`, read as "first ... second".
    pub relation: String,
    pub first_trace: f64,
    pub second_trace: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub tool: ToolInfo,
    pub first_ranking: RankingReport,
    pub second_ranking: RankingReport,
    /// `comonotonic`, `weakly comonotonic` or `neither`.
    pub relation: String,
    /// Set when either probability vector has ties.
    pub boundary: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preorder: Option<PreorderReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ComparisonReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "first ranking:  {}", parens(&self.first_ranking.sigma)).unwrap();
        writeln!(out, "second ranking: {}", parens(&self.second_ranking.sigma)).unwrap();
        let boundary = if self.boundary { " (boundary: ties present)" } else { "" };
        writeln!(out, "verdict: {}{boundary}", self.relation).unwrap();
        if let Some(p) = &self.preorder {
            writeln!(
                out,
                "preorder: first {} second (Tr C {:.4} vs {:.4})",
                p.relation, p.first_trace, p.second_trace
            )
            .unwrap();
        }
        if let Some(note) = &self.note {
            writeln!(out, "note: {note}").unwrap();
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberReport {
    pub sigma: Vec<usize>,
    pub weakly_comonotonic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub tool: ToolInfo,
    pub problem: ProblemFile,
    pub coordinates: usize,
    pub constraints: usize,
    pub rank: usize,
    pub free_dimension: usize,
    pub residual: f64,
    pub particular: Vec<f64>,
    pub nullspace: Vec<Vec<f64>>,
    pub samples: usize,
    pub seed: u64,
    pub psd_count: usize,
    pub psd_fraction: f64,
    pub best_min_eigenvalue: f64,
    pub witnesses: Vec<MatrixRows>,
    pub induced_ranking: RankingReport,
    pub members: Vec<MemberReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agreement: Option<f64>,
}

impl FamilyReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "{} linear constraints on {} coordinates: rank {}, residual {:.2e}",
            self.constraints, self.coordinates, self.rank, self.residual
        )
        .unwrap();
        writeln!(out, "free dimension: {}", self.free_dimension).unwrap();
        writeln!(
            out,
            "positive semi-definite members: {} of {} samples ({:.2}%), seed {}",
            self.psd_count,
            self.samples,
            100.0 * self.psd_fraction,
            self.seed
        )
        .unwrap();
        writeln!(out, "largest minimum eigenvalue seen: {:.4}", self.best_min_eigenvalue).unwrap();
        writeln!(out, "ranking induced by R: {}", parens(&self.induced_ranking.sigma)).unwrap();
        match self.agreement {
            Some(a) => writeln!(out, "weakly comonotonic with R: {:.2}% of members", 100.0 * a).unwrap(),
            None => writeln!(out, "no density matrix found in the family; agreement not applicable").unwrap(),
        }
        out
    }
}

fn list(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("{x:.4}")).collect();
    items.join(", ")
}

fn parens(v: &[usize]) -> String {
    let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", items.join(", "))
}

fn parens_f(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", items.join(", "))
}

fn braces(v: &[usize]) -> String {
    let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

fn groups(g: &[Vec<usize>]) -> String {
    g.iter().map(|x| braces(x)).collect::<Vec<_>>().join(" ")
}
