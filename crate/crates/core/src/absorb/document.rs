//! Versioned JSON form of certificates. Vertices are referenced by their
//! names in the input graph.

use serde::{Deserialize, Serialize};

use super::{AbsorptionProblem, Certificate, DeletionCertificate, ParityCut, TraceTuple};
use crate::error::{Error, Result};
use crate::graph::Graph;

pub const CERTIFICATE_SCHEMA: &str = "modcert-v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    Deletion,
    ParityCut,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChosenTrace {
    pub trace: Vec<String>,
    pub deleted_vertices: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateDocument {
    pub schema: String,
    pub kind: CertificateKind,
    pub q: u64,
    pub d: u64,
    pub witness: Vec<String>,
    pub core: Vec<String>,
    pub chosen_traces: Vec<ChosenTrace>,
    #[serde(rename = "parity_cut_Y")]
    pub parity_cut_y: Option<Vec<String>>,
    pub residue_achieved: Option<u64>,
}

impl CertificateDocument {
    pub fn new(problem: &AbsorptionProblem<'_>, cert: &Certificate) -> Result<Self> {
        let g = problem.graph();
        let table = problem.table();
        let (kind, chosen_traces, parity_cut_y, residue_achieved) = match cert {
            Certificate::Deletion(d) => (
                CertificateKind::Deletion,
                d.tuples
                    .iter()
                    .map(|t| ChosenTrace {
                        trace: g.names_of(table.members(&t.trace)),
                        deleted_vertices: g.names_of(t.deleted.iter().copied()),
                    })
                    .collect(),
                None,
                problem.residue_after(d)?,
            ),
            Certificate::ParityCut(p) => (
                CertificateKind::ParityCut,
                Vec::new(),
                Some(g.names_of(p.cut.iter())),
                None,
            ),
        };
        Ok(Self {
            schema: CERTIFICATE_SCHEMA.to_string(),
            kind,
            q: problem.q(),
            d: problem.lift(),
            witness: g.names_of(problem.witness().set().iter()),
            core: g.names_of(problem.core().iter()),
            chosen_traces,
            parity_cut_y,
            residue_achieved,
        })
    }

    /// Rebuilds the problem this document refers to.
    pub fn problem<'g>(&self, g: &'g Graph) -> Result<AbsorptionProblem<'g>> {
        if self.schema != CERTIFICATE_SCHEMA {
            return Err(Error::MalformedCertificate(format!(
                "unsupported schema {:?}",
                self.schema
            )));
        }
        let problem = AbsorptionProblem::from_parts(
            g,
            g.resolve(&self.witness)?,
            g.resolve(&self.core)?,
            self.q,
        )?;
        if problem.lift() != self.d {
            return Err(Error::MalformedCertificate(format!(
                "lift d = {} does not match the witness (expected {})",
                self.d,
                problem.lift()
            )));
        }
        Ok(problem)
    }

    pub fn to_certificate(&self, problem: &AbsorptionProblem<'_>) -> Result<Certificate> {
        let g = problem.graph();
        match self.kind {
            CertificateKind::Deletion => {
                let tuples = self
                    .chosen_traces
                    .iter()
                    .map(|c| {
                        let trace_ids = g.resolve(&c.trace)?;
                        Ok(TraceTuple {
                            trace: problem.table().mask_of(trace_ids.as_slice())?,
                            deleted: c
                                .deleted_vertices
                                .iter()
                                .map(|n| g.id_of(n).ok_or_else(|| Error::UnknownVertex(n.clone())))
                                .collect::<Result<_>>()?,
                        })
                    })
                    .collect::<Result<_>>()?;
                Ok(Certificate::Deletion(DeletionCertificate { tuples }))
            }
            CertificateKind::ParityCut => {
                let names = self
                    .parity_cut_y
                    .as_ref()
                    .ok_or_else(|| Error::MalformedCertificate("missing parity_cut_Y".into()))?;
                Ok(Certificate::ParityCut(ParityCut {
                    cut: g.resolve(names)?,
                }))
            }
        }
    }

    /// Re-checks the certificate against `g` with the independent verifiers.
    pub fn verify(&self, g: &Graph) -> Result<bool> {
        let problem = self.problem(g)?;
        match self.to_certificate(&problem)? {
            Certificate::Deletion(d) => {
                let residue = problem.residue_after(&d)?;
                Ok(residue.is_some() && residue == self.residue_achieved)
            }
            Certificate::ParityCut(p) => problem.verify_parity_cut(&p.cut),
        }
    }
}
