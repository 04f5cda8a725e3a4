//! Versioned input documents.

use std::path::Path;
use std::sync::Arc;

use kanalg::comma::{build_w, check_adjunction, is_final};
use kanalg::corpus::AdjunctionInstance;
use kanalg::fincat::{
    product_witness_failure, validate_category, CategoryDoc, FinCategory, Functor, FunctorDoc, ProductWitness,
    Violation, WitnessDoc, WitnessTable,
};
use kanalg::setval::{SetFunctor, SetFunctorDoc};
use kanalg::theory::{validate_clone_doc, AbstractClone, CloneDoc};
use kanalg::{Error, Result};
use serde::{Deserialize, Serialize};

pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Manifest {
    Category { version: u32, category: CategoryDoc },
    Functor { version: u32, functor: FunctorDoc },
    SetFunctor { version: u32, set_functor: SetFunctorDoc },
    Clone { version: u32, clone: CloneDoc },
    Instance { version: u32, name: String, functor: FunctorDoc, b_witnesses: Vec<WitnessDoc>, c_witness: WitnessDoc },
}

impl Manifest {
    pub fn version(&self) -> u32 {
        match self {
            Manifest::Category { version, .. }
            | Manifest::Functor { version, .. }
            | Manifest::SetFunctor { version, .. }
            | Manifest::Clone { version, .. }
            | Manifest::Instance { version, .. } => *version,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Manifest::Category { .. } => "category",
            Manifest::Functor { .. } => "functor",
            Manifest::SetFunctor { .. } => "set_functor",
            Manifest::Clone { .. } => "clone",
            Manifest::Instance { .. } => "instance",
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let m: Manifest = serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("schema: {e}")))?;
        if m.version() != VERSION {
            return Err(Error::InvalidArgument(format!("unsupported manifest version {}", m.version())));
        }
        Ok(m)
    }

    /// Every violation found in the document; empty when it is usable.
    pub fn violations(&self) -> Vec<Violation> {
        match self {
            Manifest::Category { category, .. } => validate_category(category),
            Manifest::Functor { functor, .. } => functor_violations(functor),
            Manifest::SetFunctor { set_functor, .. } => {
                let v = validate_category(&set_functor.base);
                if !v.is_empty() {
                    return v;
                }
                match SetFunctor::from_doc(set_functor) {
                    Ok(_) => Vec::new(),
                    Err(e) => error_violations("set_functor", e),
                }
            }
            Manifest::Clone { clone, .. } => validate_clone_doc(clone),
            Manifest::Instance { .. } => match self.instance() {
                Ok(inst) => {
                    let mut v = Vec::new();
                    for w in inst.b_witnesses.witnesses() {
                        if let Some(f) = product_witness_failure(inst.functor.source(), w) {
                            v.push(Violation::new("product witness", vec![w.apex.0.to_string()], format!("{f:?}")));
                        }
                    }
                    if let Some(f) = product_witness_failure(inst.functor.target(), &inst.c_witness) {
                        v.push(Violation::new("product witness", vec!["c_witness".into()], format!("{f:?}")));
                    }
                    v
                }
                Err(e) => error_violations("instance", e),
            },
        }
    }

    pub fn category(&self) -> Result<Arc<FinCategory>> {
        match self {
            Manifest::Category { category, .. } => Ok(Arc::new(FinCategory::from_doc(category)?)),
            _ => Err(self.wrong_kind("category")),
        }
    }

    pub fn functor(&self) -> Result<Functor> {
        match self {
            Manifest::Functor { functor, .. } => Functor::from_doc(functor),
            _ => Err(self.wrong_kind("functor")),
        }
    }

    /// The set functor, resolved against `base` when given.
    pub fn set_functor(&self, base: Option<Arc<FinCategory>>) -> Result<SetFunctor> {
        match (self, base) {
            (Manifest::SetFunctor { set_functor, .. }, None) => SetFunctor::from_doc(set_functor),
            (Manifest::SetFunctor { set_functor, .. }, Some(b)) => {
                if FinCategory::from_doc(&set_functor.base)? != *b {
                    return Err(Error::ShapeMismatch("the set functor does not live on the source of F".into()));
                }
                SetFunctor::from_doc_on(set_functor, b)
            }
            _ => Err(self.wrong_kind("set_functor")),
        }
    }

    pub fn clone_doc(&self) -> Result<AbstractClone> {
        match self {
            Manifest::Clone { clone, .. } => AbstractClone::from_doc(clone),
            _ => Err(self.wrong_kind("clone")),
        }
    }

    pub fn instance(&self) -> Result<AdjunctionInstance> {
        match self {
            Manifest::Instance { name, functor, b_witnesses, c_witness, .. } => {
                let functor = Functor::from_doc(functor)?;
                let mut table = WitnessTable::new();
                for w in b_witnesses {
                    table.insert(ProductWitness::from_doc(w, functor.source())?);
                }
                let c_witness = ProductWitness::from_doc(c_witness, functor.target())?;
                Ok(AdjunctionInstance { name: name.clone(), functor, b_witnesses: table, c_witness })
            }
            _ => Err(self.wrong_kind("instance")),
        }
    }

    pub fn from_instance(inst: &AdjunctionInstance) -> Self {
        Manifest::Instance {
            version: VERSION,
            name: inst.name.clone(),
            functor: inst.functor.to_doc(),
            b_witnesses: inst.b_witnesses.witnesses().iter().map(|w| w.to_doc(inst.functor.source())).collect(),
            c_witness: inst.c_witness.to_doc(inst.functor.target()),
        }
    }

    fn wrong_kind(&self, expected: &str) -> Error {
        Error::InvalidArgument(format!("expected a {expected} manifest, found {}", self.kind()))
    }
}

fn functor_violations(doc: &FunctorDoc) -> Vec<Violation> {
    let mut v = validate_category(&doc.source);
    v.extend(validate_category(&doc.target));
    if !v.is_empty() {
        return v;
    }
    match Functor::from_doc(doc) {
        Ok(_) => Vec::new(),
        Err(e) => error_violations("functor", e),
    }
}

fn error_violations(what: &str, e: Error) -> Vec<Violation> {
    match e {
        Error::InvalidCategory(v) | Error::InvalidFunctor(v) | Error::InvalidSetFunctor(v) | Error::InvalidClone(v) => v,
        other => vec![Violation::new(what, Vec::new(), other.to_string())],
    }
}

/// Whether the adjunction and the finality of `W` hold for an instance.
pub fn instance_holds(inst: &AdjunctionInstance) -> Result<bool> {
    let w = build_w(&inst.functor, &inst.b_witnesses, &inst.c_witness)?;
    let l = kanalg::comma::build_l(&inst.functor, &inst.b_witnesses, &inst.c_witness)?;
    Ok(check_adjunction(&l, &w)?.holds() && is_final(&w).holds())
}
