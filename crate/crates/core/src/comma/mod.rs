//! Comma categories `F/c` and `d/Q`, the comparison functor between a
//! product of commas and the comma over a product, and the finality,
//! cofilteredness and weak-pullback checkers.

mod adjunction;
mod checks;

pub use adjunction::{build_l, build_w, check_adjunction, find_unit, product_comma, AdjunctionFailure, ProductComma};
pub use checks::{
    is_final, is_weak_pullback, is_weakly_cofiltered, is_weakly_initial, satisfies_wpc, Cospan, Square,
};

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::Result;
use crate::fincat::{FinCategory, Functor, MorphismId, ObjectId};

/// A comma category together with its forgetful functor.
///
/// For `F/c` an object is `(b, z: F b -> c)` and a morphism is `f: b -> b'`
/// with `z' . F f = z`. For `d/Q` an object is `(a, x: d -> Q a)` and a
/// morphism is `f: a -> a'` with `Q f . x = x'`. In both cases `pairs`
/// records the `(b, z)` or `(a, x)` of each object, and `labels` records
/// the underlying morphism of each morphism together with the fixed
/// structure morphism (`z'` resp. `x`).
#[derive(Debug, Clone)]
pub struct CommaCategory {
    pub category: Arc<FinCategory>,
    pub forget: Functor,
    pairs: Vec<(ObjectId, MorphismId)>,
    lookup: HashMap<(ObjectId, MorphismId), ObjectId>,
    morphism_lookup: HashMap<(MorphismId, MorphismId), MorphismId>,
}

impl CommaCategory {
    /// `(b, z)` for `F/c`, `(a, x)` for `d/Q`.
    pub fn pair(&self, o: ObjectId) -> (ObjectId, MorphismId) {
        self.pairs[o.0]
    }

    pub fn object_of(&self, base: ObjectId, structure: MorphismId) -> Option<ObjectId> {
        self.lookup.get(&(base, structure)).copied()
    }

    /// Morphism with underlying `f` and the given fixed structure morphism
    /// (codomain structure for `F/c`, domain structure for `d/Q`).
    pub fn morphism_of(&self, f: MorphismId, structure: MorphismId) -> Option<MorphismId> {
        self.morphism_lookup.get(&(f, structure)).copied()
    }

    pub fn num_objects(&self) -> usize {
        self.category.num_objects()
    }
}

struct Raw {
    objects: Vec<String>,
    pairs: Vec<(ObjectId, MorphismId)>,
    morphisms: Vec<(String, usize, usize)>,
    labels: Vec<(MorphismId, MorphismId)>,
    identities: Vec<usize>,
}

fn assemble<C>(raw: Raw, base: &Arc<FinCategory>, compose: C) -> Result<CommaCategory>
where
    C: Fn(&(MorphismId, MorphismId), &(MorphismId, MorphismId)) -> (MorphismId, MorphismId) + Sync,
{
    let index: HashMap<(MorphismId, MorphismId), usize> =
        raw.labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let labels = &raw.labels;
    let category = FinCategory::from_parts(raw.objects.clone(), raw.morphisms.clone(), raw.identities, |g, f| {
        index.get(&compose(&labels[g], &labels[f])).copied()
    })?;
    let category = Arc::new(category);
    let mut pairs = vec![(ObjectId(0), MorphismId(0)); raw.pairs.len()];
    let mut lookup = HashMap::new();
    for (name, &p) in raw.objects.iter().zip(&raw.pairs) {
        let o = category.object(name)?;
        pairs[o.0] = p;
        lookup.insert(p, o);
    }
    let mut on_morphisms = vec![MorphismId(0); labels.len()];
    let mut morphism_lookup = HashMap::new();
    for ((name, _, _), &l) in raw.morphisms.iter().zip(labels) {
        let m = category.morphism(name)?;
        on_morphisms[m.0] = l.0;
        morphism_lookup.insert(l, m);
    }
    let on_objects = pairs.iter().map(|p| p.0).collect();
    let forget = Functor::new_unchecked(category.clone(), base.clone(), on_objects, on_morphisms);
    Ok(CommaCategory { category, forget, pairs, lookup, morphism_lookup })
}

/// The comma category `F/c`.
pub fn comma(f: &Functor, c: ObjectId) -> Result<CommaCategory> {
    let (b, t) = (f.source(), f.target());
    if c.0 >= t.num_objects() {
        return Err(crate::Error::UnknownObject(format!("#{}", c.0)));
    }
    let mut raw = Raw { objects: Vec::new(), pairs: Vec::new(), morphisms: Vec::new(), labels: Vec::new(), identities: Vec::new() };
    let mut obj_index = HashMap::new();
    for o in b.objects() {
        for &z in t.hom(f.object(o), c) {
            obj_index.insert((o, z), raw.objects.len());
            raw.objects.push(format!("({},{})", b.object_name(o), t.morphism_name(z)));
            raw.pairs.push((o, z));
        }
    }
    let mut ids = vec![0; raw.objects.len()];
    for m in b.morphisms() {
        let fm = f.morphism(m);
        for &z2 in t.hom(f.object(b.cod(m)), c) {
            let z1 = t.compose(z2, fm);
            let (d, e) = (obj_index[&(b.dom(m), z1)], obj_index[&(b.cod(m), z2)]);
            if b.is_identity(m) {
                ids[e] = raw.morphisms.len();
            }
            raw.morphisms.push((format!("({},{})", b.morphism_name(m), t.morphism_name(z2)), d, e));
            raw.labels.push((m, z2));
        }
    }
    raw.identities = ids;
    // (g, z'') . (f, z') = (g . f, z'')
    assemble(raw, b, |g, h| (b.compose(g.0, h.0), g.1))
}

/// The comma category `d/Q`.
pub fn under_comma(q: &Functor, d: ObjectId) -> Result<CommaCategory> {
    let (a, t) = (q.source(), q.target());
    if d.0 >= t.num_objects() {
        return Err(crate::Error::UnknownObject(format!("#{}", d.0)));
    }
    let mut raw = Raw { objects: Vec::new(), pairs: Vec::new(), morphisms: Vec::new(), labels: Vec::new(), identities: Vec::new() };
    let mut obj_index = HashMap::new();
    for o in a.objects() {
        for &x in t.hom(d, q.object(o)) {
            obj_index.insert((o, x), raw.objects.len());
            raw.objects.push(format!("({},{})", t.morphism_name(x), a.object_name(o)));
            raw.pairs.push((o, x));
        }
    }
    let mut ids = vec![0; raw.objects.len()];
    for m in a.morphisms() {
        let qm = q.morphism(m);
        for &x in t.hom(d, q.object(a.dom(m))) {
            let x2 = t.compose(qm, x);
            let (s, e) = (obj_index[&(a.dom(m), x)], obj_index[&(a.cod(m), x2)]);
            if a.is_identity(m) {
                ids[s] = raw.morphisms.len();
            }
            raw.morphisms.push((format!("({},{})", t.morphism_name(x), a.morphism_name(m)), s, e));
            raw.labels.push((m, x));
        }
    }
    raw.identities = ids;
    // (g, x') . (f, x) = (g . f, x)
    assemble(raw, a, |g, h| (a.compose(g.0, h.0), h.1))
}
