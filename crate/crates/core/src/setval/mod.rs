//! Set-valued functors on finite categories, their colimits, and the
//! product comparison for tensors of functors.

mod colimit;
mod tensor;

pub use colimit::{
    colimit, compare_along, is_one_step_transitive, one_step_related, one_step_relation, Partition, Relation, Span,
};
pub use tensor::{product_compare, tensor, ProductComparison, Tensor};

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fincat::{CategoryDoc, FinCategory, Functor, MorphismId, ObjectId, Violation};

/// An element of a set-valued functor: index `index` in the set over `object`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem {
    pub object: ObjectId,
    pub index: usize,
}

impl Elem {
    pub fn new(object: ObjectId, index: usize) -> Self {
        Elem { object, index }
    }
}

/// Outcome of a property check that can fail with a counterexample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Check<C> {
    Holds,
    Fails(C),
}

impl<C> Check<C> {
    pub fn holds(&self) -> bool {
        matches!(self, Check::Holds)
    }

    pub fn counterexample(&self) -> Option<&C> {
        match self {
            Check::Holds => None,
            Check::Fails(c) => Some(c),
        }
    }

    pub fn from_option(c: Option<C>) -> Self {
        match c {
            None => Check::Holds,
            Some(c) => Check::Fails(c),
        }
    }
}

/// A functor from a finite category to finite sets. Element names within
/// each set are sorted; `maps[f][i]` is the index of the image of element
/// `i` of `sets[dom f]` in `sets[cod f]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFunctor {
    base: Arc<FinCategory>,
    sets: Vec<Vec<String>>,
    maps: Vec<Vec<usize>>,
    offsets: Vec<usize>,
}

impl SetFunctor {
    /// Builds a functor from unsorted element lists; `maps` index into the
    /// given lists. Elements are re-sorted by name. Laws are checked.
    pub fn new(base: Arc<FinCategory>, sets: Vec<Vec<String>>, maps: Vec<Vec<usize>>) -> Result<Self> {
        let p = Self::new_unchecked(base, sets, maps)?;
        let v = p.law_violations();
        if v.is_empty() {
            Ok(p)
        } else {
            Err(Error::InvalidSetFunctor(v))
        }
    }

    /// Sorts and indexes but skips the functor-law check.
    pub fn new_unchecked(base: Arc<FinCategory>, sets: Vec<Vec<String>>, maps: Vec<Vec<usize>>) -> Result<Self> {
        if sets.len() != base.num_objects() || maps.len() != base.num_morphisms() {
            return Err(Error::ShapeMismatch("set functor tables do not match its base".into()));
        }
        let mut perms = Vec::with_capacity(sets.len());
        let mut sorted_sets = Vec::with_capacity(sets.len());
        for (o, set) in sets.into_iter().enumerate() {
            let mut order: Vec<usize> = (0..set.len()).collect();
            order.sort_by(|&a, &b| set[a].cmp(&set[b]));
            let mut perm = vec![0; set.len()];
            for (new, &old) in order.iter().enumerate() {
                perm[old] = new;
            }
            let sorted: Vec<String> = order.iter().map(|&i| set[i].clone()).collect();
            for w in sorted.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::Duplicate(format!("{} in set over {}", w[0], base.object_name(ObjectId(o)))));
                }
            }
            perms.push(perm);
            sorted_sets.push(sorted);
        }
        let mut sorted_maps = Vec::with_capacity(maps.len());
        for (m, table) in maps.into_iter().enumerate() {
            let f = MorphismId(m);
            let (d, c) = (base.dom(f).0, base.cod(f).0);
            if table.len() != sorted_sets[d].len() {
                return Err(Error::ShapeMismatch(format!("table of {} has wrong length", base.morphism_name(f))));
            }
            let mut new = vec![0; table.len()];
            for (old_x, &old_y) in table.iter().enumerate() {
                if old_y >= sorted_sets[c].len() {
                    return Err(Error::ShapeMismatch(format!(
                        "table of {} leaves its codomain",
                        base.morphism_name(f)
                    )));
                }
                new[perms[d][old_x]] = perms[c][old_y];
            }
            sorted_maps.push(new);
        }
        Ok(Self::from_sorted(base, sorted_sets, sorted_maps))
    }

    pub(crate) fn from_sorted(base: Arc<FinCategory>, sets: Vec<Vec<String>>, maps: Vec<Vec<usize>>) -> Self {
        let mut offsets = Vec::with_capacity(sets.len() + 1);
        let mut total = 0;
        for s in &sets {
            offsets.push(total);
            total += s.len();
        }
        offsets.push(total);
        SetFunctor { base, sets, maps, offsets }
    }

    /// The constant functor with value `{*}`.
    pub fn singleton(base: Arc<FinCategory>) -> Self {
        let sets = vec![vec!["*".to_string()]; base.num_objects()];
        let maps = vec![vec![0]; base.num_morphisms()];
        Self::from_sorted(base, sets, maps)
    }

    /// The covariant representable `hom(a, -)`; elements are morphism names.
    pub fn representable(base: Arc<FinCategory>, a: ObjectId) -> Self {
        let sets = base.objects().map(|b| base.hom(a, b).iter().map(|&m| base.morphism_name(m).to_string()).collect()).collect();
        let maps = base
            .morphisms()
            .map(|f| base.hom(a, base.dom(f)).iter().map(|&x| base.hom_position(base.compose(f, x))).collect())
            .collect();
        // hom-sets are already sorted by name
        Self::from_sorted(base, sets, maps)
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.base
    }

    pub fn set(&self, b: ObjectId) -> &[String] {
        &self.sets[b.0]
    }

    pub fn size(&self, b: ObjectId) -> usize {
        self.sets[b.0].len()
    }

    pub fn table(&self, f: MorphismId) -> &[usize] {
        &self.maps[f.0]
    }

    pub fn element(&self, b: ObjectId, name: &str) -> Result<usize> {
        self.sets[b.0].binary_search_by(|x| x.as_str().cmp(name)).map_err(|_| Error::UnknownElement {
            object: self.base.object_name(b).to_string(),
            element: name.to_string(),
        })
    }

    pub fn element_name(&self, e: Elem) -> &str {
        &self.sets[e.object.0][e.index]
    }

    /// `P f (x)`; errors if `x` is not in the set over `dom f`.
    pub fn evaluate(&self, f: MorphismId, x: usize) -> Result<usize> {
        let d = self.base.dom(f);
        self.maps[f.0].get(x).copied().ok_or_else(|| Error::UnknownElement {
            object: self.base.object_name(d).to_string(),
            element: format!("#{x}"),
        })
    }

    /// Name-level evaluation.
    pub fn evaluate_named(&self, f: &str, x: &str) -> Result<String> {
        let f = self.base.morphism(f)?;
        let x = self.element(self.base.dom(f), x)?;
        Ok(self.sets[self.base.cod(f).0][self.maps[f.0][x]].clone())
    }

    /// Total number of elements over all objects.
    pub fn total(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// Position of an element in the disjoint union of all sets.
    pub fn flat(&self, e: Elem) -> usize {
        self.offsets[e.object.0] + e.index
    }

    pub fn unflat(&self, i: usize) -> Elem {
        let o = self.offsets.partition_point(|&off| off <= i) - 1;
        Elem::new(ObjectId(o), i - self.offsets[o])
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        self.base.objects().flat_map(move |b| (0..self.size(b)).map(move |i| Elem::new(b, i)))
    }

    pub fn law_violations(&self) -> Vec<Violation> {
        let c = &*self.base;
        let mut report = Vec::new();
        for o in c.objects() {
            let id = c.identity(o);
            if self.maps[id.0].iter().enumerate().any(|(i, &j)| i != j) {
                report.push(Violation::new(
                    "identity acts trivially",
                    vec![c.morphism_name(id).to_string()],
                    "identity morphism is not sent to the identity function",
                ));
            }
        }
        for f in c.morphisms() {
            for &g in c.out_of(c.cod(f)) {
                let gf = c.compose(g, f);
                let (tf, tg, tgf) = (&self.maps[f.0], &self.maps[g.0], &self.maps[gf.0]);
                if (0..tf.len()).any(|x| tg[tf[x]] != tgf[x]) {
                    report.push(Violation::new(
                        "functoriality",
                        vec![c.morphism_name(g).to_string(), c.morphism_name(f).to_string()],
                        "P(g . f) != P g . P f",
                    ));
                }
            }
        }
        report
    }

    /// `self` after a functor `q` into the base.
    pub fn precompose(&self, q: &Functor) -> Result<SetFunctor> {
        if **q.target() != *self.base {
            return Err(Error::ShapeMismatch("precomposition: functor does not land in the base".into()));
        }
        let src = q.source();
        let sets = src.objects().map(|o| self.sets[q.object(o).0].clone()).collect();
        let maps = src.morphisms().map(|m| self.maps[q.morphism(m).0].clone()).collect();
        Ok(Self::from_sorted(src.clone(), sets, maps))
    }

    pub fn to_doc(&self) -> SetFunctorDoc {
        let c = &*self.base;
        SetFunctorDoc {
            base: c.to_doc(),
            sets: c.objects().map(|o| (c.object_name(o).to_string(), self.sets[o.0].clone())).collect(),
            maps: c
                .morphisms()
                .map(|m| {
                    let cod = &self.sets[c.cod(m).0];
                    let table = self.sets[c.dom(m).0]
                        .iter()
                        .zip(&self.maps[m.0])
                        .map(|(x, &y)| (x.clone(), cod[y].clone()))
                        .collect();
                    (c.morphism_name(m).to_string(), table)
                })
                .collect(),
        }
    }

    pub fn from_doc(doc: &SetFunctorDoc) -> Result<Self> {
        let base = Arc::new(FinCategory::from_doc(&doc.base)?);
        Self::from_doc_on(doc, base)
    }

    pub fn from_doc_on(doc: &SetFunctorDoc, base: Arc<FinCategory>) -> Result<Self> {
        let sets: Vec<Vec<String>> = base
            .objects()
            .map(|o| {
                doc.sets
                    .get(base.object_name(o))
                    .cloned()
                    .ok_or_else(|| Error::UnknownObject(base.object_name(o).to_string()))
            })
            .collect::<Result<_>>()?;
        if doc.sets.len() != base.num_objects() || doc.maps.len() != base.num_morphisms() {
            return Err(Error::ShapeMismatch("set functor document mentions unknown ids".into()));
        }
        let maps = base
            .morphisms()
            .map(|m| {
                let name = base.morphism_name(m);
                let table = doc.maps.get(name).ok_or_else(|| Error::UnknownMorphism(name.to_string()))?;
                let (dom, cod) = (&sets[base.dom(m).0], &sets[base.cod(m).0]);
                if table.len() != dom.len() {
                    return Err(Error::ShapeMismatch(format!("table of {name} is not total")));
                }
                dom.iter()
                    .map(|x| {
                        let y = table.get(x).ok_or_else(|| Error::UnknownElement {
                            object: base.object_name(base.dom(m)).to_string(),
                            element: x.clone(),
                        })?;
                        cod.iter().position(|z| z == y).ok_or_else(|| Error::UnknownElement {
                            object: base.object_name(base.cod(m)).to_string(),
                            element: y.clone(),
                        })
                    })
                    .collect::<Result<Vec<usize>>>()
            })
            .collect::<Result<_>>()?;
        SetFunctor::new(base, sets, maps)
    }
}

/// Interchange form of a set-valued functor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetFunctorDoc {
    pub base: CategoryDoc,
    pub sets: BTreeMap<String, Vec<String>>,
    pub maps: BTreeMap<String, BTreeMap<String, String>>,
}

/// Constructs the functor `d |-> hom(d, G -)` as a set functor on the source of `g`.
pub fn hom_from_along(g: &Functor, d: ObjectId) -> SetFunctor {
    let (b, t) = (g.source(), g.target());
    let sets = b.objects().map(|o| t.hom(d, g.object(o)).iter().map(|&m| t.morphism_name(m).to_string()).collect()).collect();
    let maps = b
        .morphisms()
        .map(|f| {
            let gf = g.morphism(f);
            t.hom(d, g.object(b.dom(f))).iter().map(|&x| t.hom_position(t.compose(gf, x))).collect()
        })
        .collect();
    SetFunctor::from_sorted(b.clone(), sets, maps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::poset_category;

    fn arrow() -> Arc<FinCategory> {
        let names = vec!["a".to_string(), "b".to_string()];
        Arc::new(poset_category(&names, |i, j| i <= j).unwrap())
    }

    #[test]
    fn identity_evaluates_to_input() {
        let c = arrow();
        let p = SetFunctor::new(c.clone(), vec![vec!["0".into(), "1".into()], vec!["*".into()]], vec![vec![0, 1], vec![0, 0], vec![0]]);
        // morphism order is a<=a, a<=b, b<=b
        let p = p.unwrap();
        let id = c.identity(c.object("a").unwrap());
        assert_eq!(p.evaluate(id, 1).unwrap(), 1);
        assert_eq!(p.evaluate_named("a<=b", "1").unwrap(), "*");
        assert!(p.evaluate(id, 5).is_err());
    }

    #[test]
    fn non_functorial_tables_are_rejected() {
        let c = arrow();
        // identity on a swaps its elements
        let r = SetFunctor::new(c, vec![vec!["0".into(), "1".into()], vec!["*".into()]], vec![vec![1, 0], vec![0, 0], vec![0]]);
        assert!(matches!(r, Err(Error::InvalidSetFunctor(_))));
    }

    #[test]
    fn elements_are_sorted_by_name() {
        let c = arrow();
        let p = SetFunctor::new(
            c.clone(),
            vec![vec!["z".into(), "y".into()], vec!["q".into(), "p".into()]],
            vec![vec![0, 1], vec![0, 1], vec![0, 1]],
        )
        .unwrap();
        assert_eq!(p.set(c.object("a").unwrap()), ["y", "z"]);
        assert_eq!(p.evaluate_named("a<=b", "z").unwrap(), "q");
    }

    #[test]
    fn representable_is_functorial() {
        let c = arrow();
        let h = SetFunctor::representable(c.clone(), c.object("a").unwrap());
        assert!(h.law_violations().is_empty());
        assert_eq!(h.size(c.object("b").unwrap()), 1);
    }

    #[test]
    fn doc_round_trip() {
        let c = arrow();
        let h = SetFunctor::representable(c.clone(), c.object("a").unwrap());
        assert_eq!(SetFunctor::from_doc(&h.to_doc()).unwrap(), h);
    }
}
