use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{CategoryDoc, FinCategory, MorphismId, ObjectId, Violation};
use crate::error::{Error, Result};

/// A functor between finite categories, as explicit object and morphism maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Functor {
    source: Arc<FinCategory>,
    target: Arc<FinCategory>,
    on_objects: Vec<ObjectId>,
    on_morphisms: Vec<MorphismId>,
}

impl Functor {
    pub fn new(
        source: Arc<FinCategory>,
        target: Arc<FinCategory>,
        on_objects: Vec<ObjectId>,
        on_morphisms: Vec<MorphismId>,
    ) -> Result<Self> {
        let f = Self::new_unchecked(source, target, on_objects, on_morphisms);
        let v = f.law_violations();
        if v.is_empty() {
            Ok(f)
        } else {
            Err(Error::InvalidFunctor(v))
        }
    }

    /// Skips the law check. Panics only if the map lengths do not match.
    pub fn new_unchecked(
        source: Arc<FinCategory>,
        target: Arc<FinCategory>,
        on_objects: Vec<ObjectId>,
        on_morphisms: Vec<MorphismId>,
    ) -> Self {
        assert_eq!(on_objects.len(), source.num_objects());
        assert_eq!(on_morphisms.len(), source.num_morphisms());
        Functor { source, target, on_objects, on_morphisms }
    }

    pub fn identity(c: Arc<FinCategory>) -> Self {
        let on_objects = c.objects().collect();
        let on_morphisms = c.morphisms().collect();
        Functor { source: c.clone(), target: c, on_objects, on_morphisms }
    }

    /// The unique functor into the terminal category.
    pub fn to_terminal(source: Arc<FinCategory>) -> Self {
        let target = Arc::new(FinCategory::terminal());
        let on_objects = vec![ObjectId(0); source.num_objects()];
        let on_morphisms = vec![MorphismId(0); source.num_morphisms()];
        Functor { source, target, on_objects, on_morphisms }
    }

    pub fn source(&self) -> &Arc<FinCategory> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FinCategory> {
        &self.target
    }

    pub fn object(&self, o: ObjectId) -> ObjectId {
        self.on_objects[o.0]
    }

    pub fn morphism(&self, m: MorphismId) -> MorphismId {
        self.on_morphisms[m.0]
    }

    /// `self` after `first`.
    pub fn after(&self, first: &Functor) -> Result<Functor> {
        if first.target != self.source {
            return Err(Error::ShapeMismatch("functor composition: categories differ".into()));
        }
        Ok(Functor {
            source: first.source.clone(),
            target: self.target.clone(),
            on_objects: first.on_objects.iter().map(|&o| self.object(o)).collect(),
            on_morphisms: first.on_morphisms.iter().map(|&m| self.morphism(m)).collect(),
        })
    }

    /// Returns a copy with one morphism image replaced; used for mutation tests.
    pub fn with_morphism(&self, m: MorphismId, image: MorphismId) -> Functor {
        let mut f = self.clone();
        f.on_morphisms[m.0] = image;
        f
    }

    /// Preservation of endpoints, identities and composition, exhaustively.
    pub fn law_violations(&self) -> Vec<Violation> {
        let (s, t) = (&*self.source, &*self.target);
        let mut report = Vec::new();
        for m in s.morphisms() {
            let fm = self.morphism(m);
            if t.dom(fm) != self.object(s.dom(m)) || t.cod(fm) != self.object(s.cod(m)) {
                report.push(Violation::new(
                    "functor endpoints",
                    vec![s.morphism_name(m).to_string()],
                    format!("image `{}` has the wrong domain or codomain", t.morphism_name(fm)),
                ));
            }
        }
        if !report.is_empty() {
            return report;
        }
        for o in s.objects() {
            if self.morphism(s.identity(o)) != t.identity(self.object(o)) {
                report.push(Violation::new(
                    "functor identities",
                    vec![s.object_name(o).to_string()],
                    "identity not sent to identity",
                ));
            }
        }
        for f in s.morphisms() {
            for &g in s.out_of(s.cod(f)) {
                if self.morphism(s.compose(g, f)) != t.compose(self.morphism(g), self.morphism(f)) {
                    report.push(Violation::new(
                        "functor composition",
                        vec![s.morphism_name(g).to_string(), s.morphism_name(f).to_string()],
                        "F(g . f) != F g . F f",
                    ));
                }
            }
        }
        report
    }

    pub fn to_doc(&self) -> FunctorDoc {
        let (s, t) = (&*self.source, &*self.target);
        FunctorDoc {
            source: s.to_doc(),
            target: t.to_doc(),
            objects: s
                .objects()
                .map(|o| (s.object_name(o).to_string(), t.object_name(self.object(o)).to_string()))
                .collect(),
            morphisms: s
                .morphisms()
                .map(|m| (s.morphism_name(m).to_string(), t.morphism_name(self.morphism(m)).to_string()))
                .collect(),
        }
    }

    pub fn from_doc(doc: &FunctorDoc) -> Result<Self> {
        let source = Arc::new(FinCategory::from_doc(&doc.source)?);
        let target = Arc::new(FinCategory::from_doc(&doc.target)?);
        Self::from_doc_between(doc, source, target)
    }

    /// Resolves a functor document against already-built categories.
    pub fn from_doc_between(doc: &FunctorDoc, source: Arc<FinCategory>, target: Arc<FinCategory>) -> Result<Self> {
        let on_objects = source
            .objects()
            .map(|o| {
                let name = source.object_name(o);
                let img = doc.objects.get(name).ok_or_else(|| Error::UnknownObject(name.to_string()))?;
                target.object(img)
            })
            .collect::<Result<Vec<_>>>()?;
        let on_morphisms = source
            .morphisms()
            .map(|m| {
                let name = source.morphism_name(m);
                let img = doc.morphisms.get(name).ok_or_else(|| Error::UnknownMorphism(name.to_string()))?;
                target.morphism(img)
            })
            .collect::<Result<Vec<_>>>()?;
        if doc.objects.len() != source.num_objects() || doc.morphisms.len() != source.num_morphisms() {
            return Err(Error::ShapeMismatch("functor maps mention ids outside the source".into()));
        }
        Functor::new(source, target, on_objects, on_morphisms)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctorDoc {
    pub source: CategoryDoc,
    pub target: CategoryDoc,
    pub objects: BTreeMap<String, String>,
    pub morphisms: BTreeMap<String, String>,
}
