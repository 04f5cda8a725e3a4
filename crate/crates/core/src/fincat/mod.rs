//! Finite categories given by explicit object and morphism lists and a total
//! composition table.
//!
//! Objects and morphisms are stored sorted by their string identifiers, so
//! index order and lexicographic id order coincide. All derived data
//! (hom-sets, composition lookup) is computed once at construction.

mod finset;
mod functor;
mod product;

pub use finset::{finset_op, FinSetOp, MAX_RANK};
pub use functor::{Functor, FunctorDoc};
pub(crate) use product::tuples;
pub use product::{
    check_product_witness, find_product_witness, product_category, product_witness_failure, ProductCategory,
    ProductWitness, WitnessDoc, WitnessFailure, WitnessTable,
};

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjectId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MorphismId(pub usize);

/// One violated law or malformed reference, naming what is at fault.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub law: String,
    pub items: Vec<String>,
    pub detail: String,
}

impl Violation {
    pub fn new(law: &str, items: Vec<String>, detail: impl Into<String>) -> Self {
        Violation { law: law.to_string(), items, detail: detail.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]: {}", self.law, self.items.join(", "), self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct MorphismInfo {
    name: String,
    dom: ObjectId,
    cod: ObjectId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinCategory {
    objects: Vec<String>,
    morphisms: Vec<MorphismInfo>,
    identities: Vec<MorphismId>,
    // hom[a * |ob| + b]
    hom: Vec<Vec<MorphismId>>,
    out: Vec<Vec<MorphismId>>,
    out_pos: Vec<usize>,
    hom_pos: Vec<usize>,
    // comp[f][out_pos[g]] = g . f for every g out of cod f
    comp: Vec<Vec<MorphismId>>,
    object_index: HashMap<String, ObjectId>,
    morphism_index: HashMap<String, MorphismId>,
}

fn sort_permutation(names: &[String]) -> Vec<usize> {
    // old index -> new index
    let mut order: Vec<usize> = (0..names.len()).collect();
    order.sort_by(|&a, &b| names[a].cmp(&names[b]));
    let mut perm = vec![0; names.len()];
    for (new, &old) in order.iter().enumerate() {
        perm[old] = new;
    }
    perm
}

fn permute<T: Clone>(items: &[T], perm: &[usize]) -> Vec<T> {
    let mut out: Vec<Option<T>> = vec![None; items.len()];
    for (old, item) in items.iter().enumerate() {
        out[perm[old]] = Some(item.clone());
    }
    out.into_iter().map(|x| x.expect("permutation is total")).collect()
}

impl FinCategory {
    /// Builds a category from unsorted parts.
    ///
    /// Indices in `morphisms`, `identities` and the values of `compose` refer
    /// to positions in the given vectors. `compose(g, f)` is queried for
    /// every composable pair (`f: a -> b`, `g: b -> c`) and must return a
    /// morphism `a -> c`. Category laws are *not* checked here; see
    /// [`FinCategory::law_violations`].
    pub fn from_parts<C>(
        objects: Vec<String>,
        morphisms: Vec<(String, usize, usize)>,
        identities: Vec<usize>,
        compose: C,
    ) -> Result<Self>
    where
        C: Fn(usize, usize) -> Option<usize> + Sync,
    {
        let n_obj = objects.len();
        let n_mor = morphisms.len();
        if identities.len() != n_obj {
            return Err(Error::InvalidArgument(format!(
                "{} identities for {} objects",
                identities.len(),
                n_obj
            )));
        }
        check_unique(&objects)?;
        let mor_names: Vec<String> = morphisms.iter().map(|m| m.0.clone()).collect();
        check_unique(&mor_names)?;
        for (name, d, c) in &morphisms {
            if *d >= n_obj || *c >= n_obj {
                return Err(Error::UnknownObject(format!("endpoint of {name}")));
            }
        }
        for (o, &i) in identities.iter().enumerate() {
            if i >= n_mor || morphisms[i].1 != o || morphisms[i].2 != o {
                return Err(Error::InvalidCategory(vec![Violation::new(
                    "identity endpoints",
                    vec![objects[o].clone()],
                    "identity is not an endomorphism of its object",
                )]));
            }
        }

        let operm = sort_permutation(&objects);
        let mperm = sort_permutation(&mor_names);
        let mut minv = vec![0; n_mor];
        for (old, &new) in mperm.iter().enumerate() {
            minv[new] = old;
        }

        let objects_sorted = permute(&objects, &operm);
        let morphisms_sorted: Vec<MorphismInfo> = permute(&morphisms, &mperm)
            .into_iter()
            .map(|(name, d, c)| MorphismInfo { name, dom: ObjectId(operm[d]), cod: ObjectId(operm[c]) })
            .collect();
        let mut identities_sorted = vec![MorphismId(0); n_obj];
        for (old, &i) in identities.iter().enumerate() {
            identities_sorted[operm[old]] = MorphismId(mperm[i]);
        }

        let mut hom = vec![Vec::new(); n_obj * n_obj];
        let mut out = vec![Vec::new(); n_obj];
        let mut out_pos = vec![0; n_mor];
        let mut hom_pos = vec![0; n_mor];
        for (m, info) in morphisms_sorted.iter().enumerate() {
            let slot = &mut hom[info.dom.0 * n_obj + info.cod.0];
            hom_pos[m] = slot.len();
            slot.push(MorphismId(m));
            out_pos[m] = out[info.dom.0].len();
            out[info.dom.0].push(MorphismId(m));
        }

        let comp: Vec<Result<Vec<MorphismId>>> = par::map_range(n_mor, |f| {
            let fi = &morphisms_sorted[f];
            out[fi.cod.0]
                .iter()
                .map(|&g| {
                    let gi = &morphisms_sorted[g.0];
                    let h = compose(minv[g.0], minv[f]).ok_or_else(|| {
                        Error::InvalidCategory(vec![Violation::new(
                            "composition total",
                            vec![gi.name.clone(), fi.name.clone()],
                            "missing composite",
                        )])
                    })?;
                    if h >= n_mor {
                        return Err(Error::UnknownMorphism(format!("composite index {h}")));
                    }
                    let h = MorphismId(mperm[h]);
                    let hi = &morphisms_sorted[h.0];
                    if hi.dom != fi.dom || hi.cod != gi.cod {
                        return Err(Error::InvalidCategory(vec![Violation::new(
                            "composition endpoints",
                            vec![gi.name.clone(), fi.name.clone(), hi.name.clone()],
                            "composite has wrong domain or codomain",
                        )]));
                    }
                    Ok(h)
                })
                .collect()
        });
        let comp = comp.into_iter().collect::<Result<Vec<_>>>()?;

        let object_index = objects_sorted.iter().enumerate().map(|(i, n)| (n.clone(), ObjectId(i))).collect();
        let morphism_index =
            morphisms_sorted.iter().enumerate().map(|(i, m)| (m.name.clone(), MorphismId(i))).collect();

        Ok(FinCategory {
            objects: objects_sorted,
            morphisms: morphisms_sorted,
            identities: identities_sorted,
            hom,
            out,
            out_pos,
            hom_pos,
            comp,
            object_index,
            morphism_index,
        })
    }

    /// Like [`FinCategory::from_parts`], then rejects any law violation.
    pub fn from_parts_checked<C>(
        objects: Vec<String>,
        morphisms: Vec<(String, usize, usize)>,
        identities: Vec<usize>,
        compose: C,
    ) -> Result<Self>
    where
        C: Fn(usize, usize) -> Option<usize> + Sync,
    {
        let c = Self::from_parts(objects, morphisms, identities, compose)?;
        let v = c.law_violations();
        if v.is_empty() {
            Ok(c)
        } else {
            Err(Error::InvalidCategory(v))
        }
    }

    /// The category with one object per name and only identities.
    pub fn discrete(names: &[&str]) -> Self {
        let objects: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let morphisms = objects.iter().enumerate().map(|(i, o)| (format!("id_{o}"), i, i)).collect();
        let ids = (0..objects.len()).collect();
        Self::from_parts(objects, morphisms, ids, |g, _| Some(g)).expect("discrete category")
    }

    pub fn terminal() -> Self {
        Self::discrete(&["*"])
    }

    pub fn empty() -> Self {
        Self::discrete(&[])
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_morphisms(&self) -> usize {
        self.morphisms.len()
    }

    pub fn objects(&self) -> impl ExactSizeIterator<Item = ObjectId> + '_ {
        (0..self.objects.len()).map(ObjectId)
    }

    pub fn morphisms(&self) -> impl ExactSizeIterator<Item = MorphismId> + '_ {
        (0..self.morphisms.len()).map(MorphismId)
    }

    pub fn object_name(&self, o: ObjectId) -> &str {
        &self.objects[o.0]
    }

    pub fn morphism_name(&self, m: MorphismId) -> &str {
        &self.morphisms[m.0].name
    }

    pub fn object(&self, name: &str) -> Result<ObjectId> {
        self.object_index.get(name).copied().ok_or_else(|| Error::UnknownObject(name.to_string()))
    }

    pub fn morphism(&self, name: &str) -> Result<MorphismId> {
        self.morphism_index.get(name).copied().ok_or_else(|| Error::UnknownMorphism(name.to_string()))
    }

    pub fn dom(&self, m: MorphismId) -> ObjectId {
        self.morphisms[m.0].dom
    }

    pub fn cod(&self, m: MorphismId) -> ObjectId {
        self.morphisms[m.0].cod
    }

    pub fn identity(&self, o: ObjectId) -> MorphismId {
        self.identities[o.0]
    }

    pub fn is_identity(&self, m: MorphismId) -> bool {
        self.identities[self.dom(m).0] == m
    }

    pub fn hom(&self, a: ObjectId, b: ObjectId) -> &[MorphismId] {
        &self.hom[a.0 * self.objects.len() + b.0]
    }

    /// All morphisms with domain `a`, in id order.
    pub fn out_of(&self, a: ObjectId) -> &[MorphismId] {
        &self.out[a.0]
    }

    /// Position of `m` inside `hom(dom m, cod m)`.
    pub fn hom_position(&self, m: MorphismId) -> usize {
        self.hom_pos[m.0]
    }

    /// `g . f`; panics unless `cod f == dom g`.
    pub fn compose(&self, g: MorphismId, f: MorphismId) -> MorphismId {
        assert_eq!(self.cod(f), self.dom(g), "composing non-composable morphisms");
        self.comp[f.0][self.out_pos[g.0]]
    }

    pub fn try_compose(&self, g: MorphismId, f: MorphismId) -> Option<MorphismId> {
        (self.cod(f) == self.dom(g)).then(|| self.comp[f.0][self.out_pos[g.0]])
    }

    /// Composite of a path given first-to-last.
    pub fn compose_path(&self, path: &[MorphismId]) -> Option<MorphismId> {
        let (&first, rest) = path.split_first()?;
        rest.iter().try_fold(first, |acc, &g| self.try_compose(g, acc))
    }

    /// Identity and associativity laws, checked exhaustively.
    pub fn law_violations(&self) -> Vec<Violation> {
        let mut report = Vec::new();
        for f in self.morphisms() {
            let (a, b) = (self.dom(f), self.cod(f));
            if self.compose(self.identity(b), f) != f {
                report.push(Violation::new(
                    "left identity",
                    vec![self.morphism_name(f).to_string()],
                    format!("id_{} . f != f", self.object_name(b)),
                ));
            }
            if self.compose(f, self.identity(a)) != f {
                report.push(Violation::new(
                    "right identity",
                    vec![self.morphism_name(f).to_string()],
                    format!("f . id_{} != f", self.object_name(a)),
                ));
            }
        }
        let assoc: Vec<Vec<Violation>> = par::map_range(self.num_morphisms(), |f| {
            let f = MorphismId(f);
            let mut found = Vec::new();
            for &g in self.out_of(self.cod(f)) {
                let gf = self.compose(g, f);
                for &h in self.out_of(self.cod(g)) {
                    if self.compose(h, gf) != self.compose(self.compose(h, g), f) {
                        found.push(Violation::new(
                            "associativity",
                            vec![
                                self.morphism_name(h).to_string(),
                                self.morphism_name(g).to_string(),
                                self.morphism_name(f).to_string(),
                            ],
                            "h . (g . f) != (h . g) . f",
                        ));
                    }
                }
            }
            found
        });
        report.extend(assoc.into_iter().flatten());
        report
    }

    pub fn opposite(&self) -> FinCategory {
        let objects = self.objects.clone();
        let morphisms = self.morphisms.iter().map(|m| (m.name.clone(), m.cod.0, m.dom.0)).collect();
        let identities = self.identities.iter().map(|m| m.0).collect();
        // g .op f = f . g
        FinCategory::from_parts(objects, morphisms, identities, |g, f| {
            Some(self.compose(MorphismId(f), MorphismId(g)).0)
        })
        .expect("opposite of a well-formed category is well-formed")
    }

    /// Full subcategory on the given objects, with its inclusion functor.
    pub fn full_subcategory(self: &std::sync::Arc<Self>, keep: &[ObjectId]) -> Functor {
        let mut new_index = vec![None; self.num_objects()];
        for (i, &o) in keep.iter().enumerate() {
            new_index[o.0] = Some(i);
        }
        let objects: Vec<String> = keep.iter().map(|&o| self.object_name(o).to_string()).collect();
        let kept: Vec<MorphismId> = self
            .morphisms()
            .filter(|&m| new_index[self.dom(m).0].is_some() && new_index[self.cod(m).0].is_some())
            .collect();
        let mut local = vec![usize::MAX; self.num_morphisms()];
        for (i, &m) in kept.iter().enumerate() {
            local[m.0] = i;
        }
        let morphisms = kept
            .iter()
            .map(|&m| {
                (
                    self.morphism_name(m).to_string(),
                    new_index[self.dom(m).0].unwrap(),
                    new_index[self.cod(m).0].unwrap(),
                )
            })
            .collect();
        let identities = keep.iter().map(|&o| local[self.identity(o).0]).collect();
        let sub = FinCategory::from_parts(objects, morphisms, identities, |g, f| {
            Some(local[self.compose(kept[g], kept[f]).0])
        })
        .expect("full subcategory is well-formed");
        let sub = std::sync::Arc::new(sub);
        let on_objects = sub.objects().map(|o| self.object(sub.object_name(o)).unwrap()).collect();
        let on_morphisms = sub.morphisms().map(|m| self.morphism(sub.morphism_name(m)).unwrap()).collect();
        Functor::new_unchecked(sub, self.clone(), on_objects, on_morphisms)
    }

    pub fn to_doc(&self) -> CategoryDoc {
        let mut composition = Vec::new();
        for f in self.morphisms() {
            for &g in self.out_of(self.cod(f)) {
                composition.push([
                    self.morphism_name(g).to_string(),
                    self.morphism_name(f).to_string(),
                    self.morphism_name(self.compose(g, f)).to_string(),
                ]);
            }
        }
        composition.sort();
        CategoryDoc {
            objects: self.objects.clone(),
            morphisms: self
                .morphisms
                .iter()
                .map(|m| MorphismDoc {
                    name: m.name.clone(),
                    dom: self.objects[m.dom.0].clone(),
                    cod: self.objects[m.cod.0].clone(),
                })
                .collect(),
            identities: self
                .objects()
                .map(|o| (self.object_name(o).to_string(), self.morphism_name(self.identity(o)).to_string()))
                .collect(),
            composition,
        }
    }

    pub fn from_doc(doc: &CategoryDoc) -> Result<Self> {
        let report = validate_category(doc);
        if !report.is_empty() {
            return Err(Error::InvalidCategory(report));
        }
        build_from_doc(doc)
    }
}

fn check_unique(names: &[String]) -> Result<()> {
    let mut sorted: Vec<&String> = names.iter().collect();
    sorted.sort();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(Error::Duplicate(w[0].clone()));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDoc {
    pub name: String,
    pub dom: String,
    pub cod: String,
}

/// Interchange form of a finite category. `composition` lists triples
/// `[g, f, g . f]` for every composable pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoryDoc {
    pub objects: Vec<String>,
    pub morphisms: Vec<MorphismDoc>,
    pub identities: BTreeMap<String, String>,
    pub composition: Vec<[String; 3]>,
}

fn build_from_doc(doc: &CategoryDoc) -> Result<FinCategory> {
    let oi: HashMap<&str, usize> = doc.objects.iter().enumerate().map(|(i, o)| (o.as_str(), i)).collect();
    let mi: HashMap<&str, usize> = doc.morphisms.iter().enumerate().map(|(i, m)| (m.name.as_str(), i)).collect();
    let morphisms = doc.morphisms.iter().map(|m| (m.name.clone(), oi[m.dom.as_str()], oi[m.cod.as_str()])).collect();
    let identities = doc.objects.iter().map(|o| mi[doc.identities[o].as_str()]).collect();
    let table: HashMap<(usize, usize), usize> = doc
        .composition
        .iter()
        .map(|[g, f, h]| ((mi[g.as_str()], mi[f.as_str()]), mi[h.as_str()]))
        .collect();
    FinCategory::from_parts(doc.objects.clone(), morphisms, identities, |g, f| table.get(&(g, f)).copied())
}

/// Every malformed reference and violated law of a category document.
/// An empty report means the document describes a valid category.
pub fn validate_category(doc: &CategoryDoc) -> Vec<Violation> {
    let mut report = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for o in &doc.objects {
        if !seen.insert(o) {
            report.push(Violation::new("unique object ids", vec![o.clone()], "duplicate object"));
        }
    }
    let objects: std::collections::HashSet<&str> = doc.objects.iter().map(String::as_str).collect();
    let mut mors: HashMap<&str, (&str, &str)> = HashMap::new();
    for m in &doc.morphisms {
        if mors.insert(m.name.as_str(), (m.dom.as_str(), m.cod.as_str())).is_some() {
            report.push(Violation::new("unique morphism ids", vec![m.name.clone()], "duplicate morphism"));
        }
        for end in [&m.dom, &m.cod] {
            if !objects.contains(end.as_str()) {
                report.push(Violation::new(
                    "resolved references",
                    vec![m.name.clone()],
                    format!("endpoint `{end}` is not an object"),
                ));
            }
        }
    }
    for o in &doc.objects {
        match doc.identities.get(o) {
            None => report.push(Violation::new("identity exists", vec![o.clone()], "no identity given")),
            Some(i) => match mors.get(i.as_str()) {
                None => report.push(Violation::new(
                    "resolved references",
                    vec![i.clone()],
                    format!("identity of `{o}` is not a morphism"),
                )),
                Some(&(d, c)) if d != o || c != o => report.push(Violation::new(
                    "identity endpoints",
                    vec![i.clone()],
                    format!("identity of `{o}` is not an endomorphism of `{o}`"),
                )),
                _ => {}
            },
        }
    }
    for k in doc.identities.keys() {
        if !objects.contains(k.as_str()) {
            report.push(Violation::new("resolved references", vec![k.clone()], "identity for unknown object"));
        }
    }
    let mut table: HashMap<(&str, &str), &str> = HashMap::new();
    for [g, f, h] in &doc.composition {
        let ends: Vec<Option<&(&str, &str)>> = [g, f, h].iter().map(|m| mors.get(m.as_str())).collect();
        let unresolved: Vec<String> =
            [g, f, h].iter().zip(&ends).filter(|(_, e)| e.is_none()).map(|(m, _)| m.to_string()).collect();
        if !unresolved.is_empty() {
            report.push(Violation::new("resolved references", unresolved, "composition entry names unknown morphism"));
            continue;
        }
        let (gd, gc) = *ends[0].unwrap();
        let (fd, fc) = *ends[1].unwrap();
        let (hd, hc) = *ends[2].unwrap();
        if fc != gd {
            report.push(Violation::new(
                "composable entries",
                vec![g.clone(), f.clone()],
                "composition entry for a non-composable pair",
            ));
            continue;
        }
        if hd != fd || hc != gc {
            report.push(Violation::new(
                "composition endpoints",
                vec![g.clone(), f.clone(), h.clone()],
                "composite has wrong domain or codomain",
            ));
        }
        if table.insert((g.as_str(), f.as_str()), h.as_str()).is_some() {
            report.push(Violation::new("composition function", vec![g.clone(), f.clone()], "duplicate entry"));
        }
    }
    for f in &doc.morphisms {
        for g in &doc.morphisms {
            if f.cod == g.dom && !table.contains_key(&(g.name.as_str(), f.name.as_str())) {
                report.push(Violation::new(
                    "composition total",
                    vec![g.name.clone(), f.name.clone()],
                    "missing composite",
                ));
            }
        }
    }
    if !report.is_empty() {
        return report;
    }
    match build_from_doc(doc) {
        Ok(c) => c.law_violations(),
        Err(Error::InvalidCategory(v)) => v,
        Err(e) => vec![Violation::new("well-formed", vec![], e.to_string())],
    }
}

/// The opposite of an already-built category.
pub fn opposite(c: &FinCategory) -> FinCategory {
    c.opposite()
}

/// A poset as a thin category; `leq(i, j)` must be a partial order.
/// Morphisms are named `i<=j`.
pub fn poset_category(names: &[String], leq: impl Fn(usize, usize) -> bool) -> Result<FinCategory> {
    let n = names.len();
    let mut morphisms = Vec::new();
    let mut index = HashMap::new();
    for i in 0..n {
        for j in 0..n {
            if leq(i, j) {
                index.insert((i, j), morphisms.len());
                morphisms.push((format!("{}<={}", names[i], names[j]), i, j));
            }
        }
    }
    let identities = (0..n).map(|i| index.get(&(i, i)).copied().ok_or(())).collect::<std::result::Result<Vec<_>, _>>();
    let identities = identities.map_err(|_| Error::InvalidArgument("order relation is not reflexive".into()))?;
    let ends: Vec<(usize, usize)> = morphisms.iter().map(|m| (m.1, m.2)).collect();
    FinCategory::from_parts_checked(names.to_vec(), morphisms, identities, |g, f| {
        index.get(&(ends[f].0, ends[g].1)).copied()
    })
}
