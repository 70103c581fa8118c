//! JSON document formats: models and localizer certificates.
//!
//! Model documents are diff-friendly: node lists, Hasse edge pairs,
//! per-node domains and facts. Facts are either a bare name (`"p"`) or an
//! array `["R", "0", "1"]`. Certificates store the target, mode, printed
//! sentence, and the witness trace; reloading a certificate together with
//! its model reproduces the verification verdict.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use kripke_core::localize::{
    CertificateMode, LocalizerCertificate, TraceStep, VerifyConfig, VerifyReport,
};
use kripke_core::translate::{pem_instance, realize_chain};
use kripke_core::{parse_formula, KripkeModel, RawFact, RawModel, Signature};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum SignatureDoc {
    #[serde(rename = "propositional")]
    Propositional { atoms: Vec<String> },
    #[serde(rename = "first-order")]
    FirstOrder {
        #[serde(default)]
        relations: Vec<(String, usize)>,
        #[serde(default)]
        constants: Vec<String>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FactDoc {
    Prop(String),
    Rel(Vec<String>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelDocument {
    pub signature: SignatureDoc,
    pub nodes: Vec<String>,
    #[serde(default)]
    pub edges: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub domains: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub atoms: BTreeMap<String, Vec<FactDoc>>,
}

impl ModelDocument {
    pub fn to_raw(&self) -> Result<RawModel, String> {
        let sig = match &self.signature {
            SignatureDoc::Propositional { atoms } => {
                Signature::propositional(atoms.iter().cloned()).map_err(|e| e.to_string())?
            }
            SignatureDoc::FirstOrder { relations, constants } => Signature::first_order(
                relations.iter().map(|(n, a)| (n.clone(), *a)),
                constants.iter().cloned(),
            )
            .map_err(|e| e.to_string())?,
        };
        let atoms = self
            .atoms
            .iter()
            .map(|(node, facts)| {
                let converted: Result<Vec<RawFact>, String> =
                    facts.iter().map(fact_to_raw).collect();
                converted.map(|f| (node.clone(), f))
            })
            .collect::<Result<BTreeMap<_, _>, _>>()?;
        Ok(RawModel {
            sig,
            nodes: self.nodes.clone(),
            edges: self.edges.clone(),
            domains: self.domains.clone(),
            atoms,
        })
    }

    pub fn from_raw(raw: &RawModel) -> Self {
        let signature = match &raw.sig {
            Signature::Propositional { atoms } => {
                SignatureDoc::Propositional { atoms: atoms.clone() }
            }
            Signature::FirstOrder { relations, constants } => SignatureDoc::FirstOrder {
                relations: relations.clone(),
                constants: constants.clone(),
            },
        };
        let atoms = raw
            .atoms
            .iter()
            .map(|(node, facts)| (node.clone(), facts.iter().map(raw_to_fact).collect()))
            .collect();
        ModelDocument {
            signature,
            nodes: raw.nodes.clone(),
            edges: raw.edges.clone(),
            domains: raw.domains.clone(),
            atoms,
        }
    }
}

fn fact_to_raw(f: &FactDoc) -> Result<RawFact, String> {
    match f {
        FactDoc::Prop(name) => Ok(RawFact { name: name.clone(), args: vec![] }),
        FactDoc::Rel(parts) => match parts.split_first() {
            Some((name, args)) => Ok(RawFact { name: name.clone(), args: args.to_vec() }),
            None => Err("empty fact array".to_string()),
        },
    }
}

fn raw_to_fact(f: &RawFact) -> FactDoc {
    if f.args.is_empty() {
        FactDoc::Prop(f.name.clone())
    } else {
        let mut parts = vec![f.name.clone()];
        parts.extend(f.args.iter().cloned());
        FactDoc::Rel(parts)
    }
}

pub const MODE_CLOSURE: &str = "closure-pem";
pub const MODE_SENTENTIAL: &str = "sentential-pem-kuroda";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceDoc {
    /// Printed witness body (the `A` of `A | ~A`).
    pub body: String,
    /// Printed closed instance actually used for pruning.
    pub witness: String,
    pub pruned: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationDoc {
    pub checked: usize,
    pub mismatches: usize,
    pub chain_class_ok: bool,
    pub prop_size: usize,
    pub fo_size: usize,
    pub fo_qdepth: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateDocument {
    pub target: String,
    pub mode: String,
    pub rho: String,
    pub trace: Vec<TraceDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationDoc>,
}

impl CertificateDocument {
    pub fn from_certificate(
        cert: &LocalizerCertificate,
        report: Option<(&VerifyReport, &VerifyConfig)>,
    ) -> Self {
        CertificateDocument {
            target: cert.target_name.clone(),
            mode: match cert.mode {
                CertificateMode::ClosurePem => MODE_CLOSURE.to_string(),
                CertificateMode::SententialPemKuroda => MODE_SENTENTIAL.to_string(),
            },
            rho: cert.rho().to_string(),
            trace: cert
                .trace
                .iter()
                .map(|step: &TraceStep| TraceDoc {
                    body: step.witness.body().to_string(),
                    witness: step.witness.closed().to_string(),
                    pruned: step.pruned.clone(),
                })
                .collect(),
            verification: report.map(|(r, c)| VerificationDoc {
                checked: r.checked,
                mismatches: r.mismatches.len(),
                chain_class_ok: r.chain_class_ok,
                prop_size: c.prop_size,
                fo_size: c.fo_size,
                fo_qdepth: c.fo_qdepth,
            }),
        }
    }

    /// Rebuilds an in-memory certificate against a model: witness bodies are
    /// re-parsed, instances reconstructed and the chain re-realized; the
    /// realized sentence must print-parse-match the stored `rho`.
    pub fn to_certificate(&self, model: &KripkeModel) -> Result<LocalizerCertificate, String> {
        let target = model
            .node(&self.target)
            .ok_or_else(|| format!("unknown target node `{}`", self.target))?;
        let mode = match self.mode.as_str() {
            MODE_CLOSURE => CertificateMode::ClosurePem,
            MODE_SENTENTIAL => CertificateMode::SententialPemKuroda,
            other => return Err(format!("unknown certificate mode `{other}`")),
        };
        let sentential = mode == CertificateMode::SententialPemKuroda;
        let sig = model.signature();
        let mut steps = Vec::new();
        let mut trace = Vec::new();
        for t in &self.trace {
            let body = parse_formula(&t.body, sig)
                .map_err(|e| format!("bad witness body `{}`: {e}", t.body))?;
            let inst = pem_instance(&body, sentential).map_err(|e| e.to_string())?;
            let stored = parse_formula(&t.witness, sig)
                .map_err(|e| format!("bad witness `{}`: {e}", t.witness))?;
            if *inst.closed() != stored {
                return Err(format!(
                    "stored witness `{}` does not match its body `{}`",
                    t.witness, t.body
                ));
            }
            steps.push(inst.clone());
            trace.push(TraceStep { witness: inst, pruned: t.pruned.clone() });
        }
        let chain = realize_chain(kripke_core::Formula::Bot, steps);
        let stored_rho =
            parse_formula(&self.rho, sig).map_err(|e| format!("bad rho `{}`: {e}", self.rho))?;
        if *chain.realized() != stored_rho {
            return Err("stored rho does not match the realized witness chain".to_string());
        }
        Ok(LocalizerCertificate {
            target,
            target_name: self.target.clone(),
            mode,
            chain,
            trace,
        })
    }
}
