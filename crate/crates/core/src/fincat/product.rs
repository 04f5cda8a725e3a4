use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{FinCategory, Functor, MorphismId, ObjectId};
use crate::error::{Error, Result};

/// A chosen product cone: `projections[i]: apex -> factors[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProductWitness {
    pub factors: Vec<ObjectId>,
    pub apex: ObjectId,
    pub projections: Vec<MorphismId>,
}

/// Why a product witness fails its universal property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WitnessFailure {
    Malformed(String),
    /// Some cone from `test_object` has no mediating morphism.
    NoMediator { test_object: ObjectId, cone: Vec<MorphismId> },
    /// Two distinct mediators share a cone.
    NotUnique { test_object: ObjectId, first: MorphismId, second: MorphismId },
}

impl ProductWitness {
    /// Mediating morphism `t -> apex` for a cone `(f_i: t -> factors[i])`.
    pub fn mediate(&self, c: &FinCategory, t: ObjectId, cone: &[MorphismId]) -> Option<MorphismId> {
        c.hom(t, self.apex).iter().copied().find(|&m| {
            self.projections.iter().zip(cone).all(|(&p, &f)| c.compose(p, m) == f)
        })
    }

    pub fn to_doc(&self, c: &FinCategory) -> WitnessDoc {
        WitnessDoc {
            factors: self.factors.iter().map(|&o| c.object_name(o).to_string()).collect(),
            apex: c.object_name(self.apex).to_string(),
            projections: self.projections.iter().map(|&m| c.morphism_name(m).to_string()).collect(),
        }
    }

    pub fn from_doc(doc: &WitnessDoc, c: &FinCategory) -> Result<Self> {
        Ok(ProductWitness {
            factors: doc.factors.iter().map(|o| c.object(o)).collect::<Result<_>>()?,
            apex: c.object(&doc.apex)?,
            projections: doc.projections.iter().map(|m| c.morphism(m)).collect::<Result<_>>()?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessDoc {
    pub factors: Vec<String>,
    pub apex: String,
    pub projections: Vec<String>,
}

/// Checks the universal property of `w` by enumeration over every test
/// object: the map `m |-> (pi_i . m)_i` from `hom(t, apex)` to the set of
/// cones must be a bijection.
pub fn product_witness_failure(c: &FinCategory, w: &ProductWitness) -> Option<WitnessFailure> {
    if w.factors.len() != w.projections.len() {
        return Some(WitnessFailure::Malformed("projection count differs from factor count".into()));
    }
    for (&p, &f) in w.projections.iter().zip(&w.factors) {
        if c.dom(p) != w.apex || c.cod(p) != f {
            return Some(WitnessFailure::Malformed(format!(
                "projection `{}` is not a morphism {} -> {}",
                c.morphism_name(p),
                c.object_name(w.apex),
                c.object_name(f)
            )));
        }
    }
    for t in c.objects() {
        let mut seen: HashMap<Vec<MorphismId>, MorphismId> = HashMap::new();
        for &m in c.hom(t, w.apex) {
            let cone: Vec<MorphismId> = w.projections.iter().map(|&p| c.compose(p, m)).collect();
            if let Some(&first) = seen.get(&cone) {
                return Some(WitnessFailure::NotUnique { test_object: t, first, second: m });
            }
            seen.insert(cone, m);
        }
        let homs: Vec<&[MorphismId]> = w.factors.iter().map(|&f| c.hom(t, f)).collect();
        let total: usize = homs.iter().map(|h| h.len()).product();
        if seen.len() != total {
            let cone = tuples(&homs.iter().map(|h| h.len()).collect::<Vec<_>>())
                .map(|ix| ix.iter().zip(&homs).map(|(&i, h)| h[i]).collect::<Vec<_>>())
                .find(|cone| !seen.contains_key(cone))
                .expect("some cone is missed");
            return Some(WitnessFailure::NoMediator { test_object: t, cone });
        }
    }
    None
}

pub fn check_product_witness(c: &FinCategory, w: &ProductWitness) -> bool {
    product_witness_failure(c, w).is_none()
}

/// Searches for a product of `factors` by enumerating apexes and projections.
pub fn find_product_witness(c: &FinCategory, factors: &[ObjectId]) -> Option<ProductWitness> {
    for apex in c.objects() {
        let sizes_match = c.objects().all(|t| {
            c.hom(t, apex).len() == factors.iter().map(|&f| c.hom(t, f).len()).product::<usize>()
        });
        if !sizes_match {
            continue;
        }
        let homs: Vec<&[MorphismId]> = factors.iter().map(|&f| c.hom(apex, f)).collect();
        for ix in tuples(&homs.iter().map(|h| h.len()).collect::<Vec<_>>()) {
            let w = ProductWitness {
                factors: factors.to_vec(),
                apex,
                projections: ix.iter().zip(&homs).map(|(&i, h)| h[i]).collect(),
            };
            if check_product_witness(c, &w) {
                return Some(w);
            }
        }
    }
    None
}

/// All index tuples of the given radices, in lexicographic order.
pub(crate) fn tuples(radices: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = radices.iter().product();
    (0..total).map(move |mut k| {
        let mut ix = vec![0; radices.len()];
        for i in (0..radices.len()).rev() {
            ix[i] = k % radices[i];
            k /= radices[i];
        }
        ix
    })
}

/// Chosen product witnesses keyed by their factor tuple.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WitnessTable {
    table: HashMap<Vec<ObjectId>, ProductWitness>,
}

impl WitnessTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, w: ProductWitness) {
        self.table.insert(w.factors.clone(), w);
    }

    pub fn get(&self, factors: &[ObjectId]) -> Option<&ProductWitness> {
        self.table.get(factors)
    }

    pub fn require(&self, c: &FinCategory, factors: &[ObjectId]) -> Result<&ProductWitness> {
        self.get(factors).ok_or_else(|| {
            Error::MissingWitness(factors.iter().map(|&o| c.object_name(o)).collect::<Vec<_>>().join(","))
        })
    }

    /// Witnesses in a deterministic order (by factor tuple).
    pub fn witnesses(&self) -> Vec<&ProductWitness> {
        let mut ws: Vec<&ProductWitness> = self.table.values().collect();
        ws.sort_by(|a, b| a.factors.cmp(&b.factors));
        ws
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Every product of at most `max_arity` factors that exists in `c`.
    pub fn search(c: &FinCategory, max_arity: usize) -> Self {
        let mut table = WitnessTable::new();
        for k in 0..=max_arity {
            for ix in tuples(&vec![c.num_objects(); k]) {
                let factors: Vec<ObjectId> = ix.into_iter().map(ObjectId).collect();
                if let Some(w) = find_product_witness(c, &factors) {
                    table.insert(w);
                }
            }
        }
        table
    }
}

impl FromIterator<ProductWitness> for WitnessTable {
    fn from_iter<I: IntoIterator<Item = ProductWitness>>(iter: I) -> Self {
        let mut t = WitnessTable::new();
        for w in iter {
            t.insert(w);
        }
        t
    }
}

/// A product of finite categories with its projections and tuple lookup.
#[derive(Debug, Clone)]
pub struct ProductCategory {
    pub category: Arc<FinCategory>,
    pub projections: Vec<Functor>,
    object_tuples: Vec<Vec<ObjectId>>,
    morphism_tuples: Vec<Vec<MorphismId>>,
    object_lookup: HashMap<Vec<ObjectId>, ObjectId>,
    morphism_lookup: HashMap<Vec<MorphismId>, MorphismId>,
}

impl ProductCategory {
    pub fn object_tuple(&self, o: ObjectId) -> &[ObjectId] {
        &self.object_tuples[o.0]
    }

    pub fn morphism_tuple(&self, m: MorphismId) -> &[MorphismId] {
        &self.morphism_tuples[m.0]
    }

    pub fn object_of(&self, tuple: &[ObjectId]) -> Option<ObjectId> {
        self.object_lookup.get(tuple).copied()
    }

    pub fn morphism_of(&self, tuple: &[MorphismId]) -> Option<MorphismId> {
        self.morphism_lookup.get(tuple).copied()
    }

    pub fn arity(&self) -> usize {
        self.projections.len()
    }
}

fn tuple_name<'a>(parts: impl Iterator<Item = &'a str>) -> String {
    format!("({})", parts.collect::<Vec<_>>().join(","))
}

/// Product of a list of categories (the empty list gives the terminal category).
pub fn product_category(factors: &[Arc<FinCategory>]) -> ProductCategory {
    let obj_radix: Vec<usize> = factors.iter().map(|c| c.num_objects()).collect();
    let mor_radix: Vec<usize> = factors.iter().map(|c| c.num_morphisms()).collect();
    let obj_ix: Vec<Vec<usize>> = tuples(&obj_radix).collect();
    let mor_ix: Vec<Vec<usize>> = tuples(&mor_radix).collect();
    let obj_pos: HashMap<Vec<usize>, usize> = obj_ix.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    let mor_pos: HashMap<Vec<usize>, usize> = mor_ix.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();

    let objects: Vec<String> = obj_ix
        .iter()
        .map(|t| tuple_name(t.iter().zip(factors).map(|(&o, c)| c.object_name(ObjectId(o)))))
        .collect();
    let morphisms: Vec<(String, usize, usize)> = mor_ix
        .iter()
        .map(|t| {
            let name = tuple_name(t.iter().zip(factors).map(|(&m, c)| c.morphism_name(MorphismId(m))));
            let dom: Vec<usize> = t.iter().zip(factors).map(|(&m, c)| c.dom(MorphismId(m)).0).collect();
            let cod: Vec<usize> = t.iter().zip(factors).map(|(&m, c)| c.cod(MorphismId(m)).0).collect();
            (name, obj_pos[&dom], obj_pos[&cod])
        })
        .collect();
    let identities = obj_ix
        .iter()
        .map(|t| {
            let ids: Vec<usize> = t.iter().zip(factors).map(|(&o, c)| c.identity(ObjectId(o)).0).collect();
            mor_pos[&ids]
        })
        .collect();
    let category = FinCategory::from_parts(objects, morphisms, identities, |g, f| {
        let h: Vec<usize> = mor_ix[g]
            .iter()
            .zip(&mor_ix[f])
            .zip(factors)
            .map(|((&g, &f), c)| c.compose(MorphismId(g), MorphismId(f)).0)
            .collect();
        mor_pos.get(&h).copied()
    })
    .expect("product of well-formed categories is well-formed");
    let category = Arc::new(category);

    // rebuild tuple tables in the sorted index order of `category`
    let name_to_obj: HashMap<String, usize> = obj_ix
        .iter()
        .enumerate()
        .map(|(i, t)| (tuple_name(t.iter().zip(factors).map(|(&o, c)| c.object_name(ObjectId(o)))), i))
        .collect();
    let object_tuples: Vec<Vec<ObjectId>> = category
        .objects()
        .map(|o| obj_ix[name_to_obj[category.object_name(o)]].iter().map(|&x| ObjectId(x)).collect())
        .collect();
    let name_to_mor: HashMap<String, usize> = mor_ix
        .iter()
        .enumerate()
        .map(|(i, t)| (tuple_name(t.iter().zip(factors).map(|(&m, c)| c.morphism_name(MorphismId(m)))), i))
        .collect();
    let morphism_tuples: Vec<Vec<MorphismId>> = category
        .morphisms()
        .map(|m| mor_ix[name_to_mor[category.morphism_name(m)]].iter().map(|&x| MorphismId(x)).collect())
        .collect();
    let object_lookup = object_tuples.iter().enumerate().map(|(i, t)| (t.clone(), ObjectId(i))).collect();
    let morphism_lookup = morphism_tuples.iter().enumerate().map(|(i, t)| (t.clone(), MorphismId(i))).collect();

    let projections = factors
        .iter()
        .enumerate()
        .map(|(i, c)| {
            Functor::new_unchecked(
                category.clone(),
                c.clone(),
                object_tuples.iter().map(|t| t[i]).collect(),
                morphism_tuples.iter().map(|t| t[i]).collect(),
            )
        })
        .collect();
    ProductCategory { category, projections, object_tuples, morphism_tuples, object_lookup, morphism_lookup }
}
