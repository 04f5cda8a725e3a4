use fixedbitset::FixedBitSet;
use petgraph::unionfind::UnionFind;

use super::{Check, Elem, SetFunctor};
use crate::error::{Error, Result};
use crate::fincat::{Functor, MorphismId};
use crate::par;

/// A partition of `0..n` into classes. Classes are numbered in order of
/// their least member, which is also the representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    class_of: Vec<usize>,
    representatives: Vec<usize>,
}

impl Partition {
    /// Finest partition of `0..n` identifying the endpoints of every edge.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut uf = UnionFind::<usize>::new(n);
        for (a, b) in edges {
            uf.union(a, b);
        }
        let labels = uf.into_labeling();
        Self::from_labels(&labels)
    }

    /// Canonicalises an arbitrary labelling (equal labels = same class).
    pub fn from_labels<L: Eq + std::hash::Hash + Clone>(labels: &[L]) -> Self {
        let mut seen = std::collections::HashMap::new();
        let mut class_of = Vec::with_capacity(labels.len());
        let mut representatives = Vec::new();
        for (i, l) in labels.iter().enumerate() {
            let next = representatives.len();
            let c = *seen.entry(l.clone()).or_insert(next);
            if c == next {
                representatives.push(i);
            }
            class_of.push(c);
        }
        Partition { class_of, representatives }
    }

    pub fn len(&self) -> usize {
        self.class_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class_of.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.representatives.len()
    }

    pub fn class_of(&self, i: usize) -> usize {
        self.class_of[i]
    }

    pub fn classes(&self) -> &[usize] {
        &self.class_of
    }

    pub fn representative(&self, class: usize) -> usize {
        self.representatives[class]
    }

    pub fn representatives(&self) -> &[usize] {
        &self.representatives
    }

    pub fn same(&self, i: usize, j: usize) -> bool {
        self.class_of[i] == self.class_of[j]
    }

    /// Members of every class, in increasing order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_classes()];
        for (i, &c) in self.class_of.iter().enumerate() {
            out[c].push(i);
        }
        out
    }
}

/// `(b, x) <- (apex) -> (b', x')` in the element category.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub apex: Elem,
    pub left: MorphismId,
    pub right: MorphismId,
}

impl Span {
    pub fn swap(self) -> Span {
        Span { apex: self.apex, left: self.right, right: self.left }
    }
}

/// Colimit of a set functor: its partition of the flattened element set.
pub fn colimit(p: &SetFunctor) -> Partition {
    let c = p.base();
    let edges = c.morphisms().flat_map(|f| {
        let (d, t) = (c.dom(f), c.cod(f));
        p.table(f).iter().enumerate().map(move |(x, &y)| (p.flat(Elem::new(d, x)), p.flat(Elem::new(t, y))))
    });
    Partition::from_edges(p.total(), edges)
}

fn check_member(p: &SetFunctor, e: Elem) -> Result<()> {
    if e.object.0 < p.base().num_objects() && e.index < p.size(e.object) {
        Ok(())
    } else {
        Err(Error::UnknownElement {
            object: p.base().object_name(e.object).to_string(),
            element: format!("#{}", e.index),
        })
    }
}

/// Searches for a span between two elements; the first one found in
/// (apex, left, right) order is returned.
pub fn one_step_related(p: &SetFunctor, a: Elem, b: Elem) -> Result<Option<Span>> {
    check_member(p, a)?;
    check_member(p, b)?;
    let c = p.base();
    for o in c.objects() {
        for x in 0..p.size(o) {
            for &f in c.hom(o, a.object) {
                if p.table(f)[x] != a.index {
                    continue;
                }
                for &g in c.hom(o, b.object) {
                    if p.table(g)[x] == b.index {
                        return Ok(Some(Span { apex: Elem::new(o, x), left: f, right: g }));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// A binary relation on `0..n` stored as a bit matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    rows: Vec<FixedBitSet>,
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        Relation { rows: vec![FixedBitSet::with_capacity(n); n] }
    }

    pub fn from_rows(rows: Vec<FixedBitSet>) -> Self {
        Relation { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn insert(&mut self, i: usize, j: usize) {
        self.rows[i].insert(j);
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.rows[i].contains(j)
    }

    pub fn row(&self, i: usize) -> &FixedBitSet {
        &self.rows[i]
    }

    pub fn pairs(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones(..)).sum()
    }

    /// The lexicographically first `(a, b, c)` with `a R b`, `b R c` and not `a R c`.
    pub fn first_intransitive(&self) -> Option<(usize, usize, usize)> {
        par::find_first(self.rows.len(), |a| {
            let row_a = &self.rows[a];
            row_a.ones().find_map(|b| self.rows[b].difference(row_a).next().map(|c| (a, b, c)))
        })
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.rows.len()).all(|i| self.rows[i].contains(i))
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.rows.len()).all(|i| self.rows[i].ones().all(|j| self.rows[j].contains(i)))
    }
}

/// The one-step relation on all elements, as a bit matrix over flat indices.
pub fn one_step_relation(p: &SetFunctor) -> Relation {
    let c = p.base();
    let n = p.total();
    // each apex element contributes all pairs of its images
    let images: Vec<Vec<usize>> = par::map_range(n, |i| {
        let e = p.unflat(i);
        let mut img: Vec<usize> =
            c.out_of(e.object).iter().map(|&f| p.flat(Elem::new(c.cod(f), p.table(f)[e.index]))).collect();
        img.sort_unstable();
        img.dedup();
        img
    });
    let mut rel = Relation::empty(n);
    for img in &images {
        for &a in img {
            for &b in img {
                rel.insert(a, b);
            }
        }
    }
    rel
}

/// Transitivity of the one-step relation, with the first failing triple.
pub fn is_one_step_transitive(p: &SetFunctor) -> Check<(Elem, Elem, Elem)> {
    let rel = one_step_relation(p);
    Check::from_option(rel.first_intransitive().map(|(a, b, c)| (p.unflat(a), p.unflat(b), p.unflat(c))))
}

/// The induced map `colim (P . Q) -> colim P` on classes, for `Q` into the base of `P`.
pub fn compare_along(q: &Functor, p: &SetFunctor) -> Result<Vec<usize>> {
    let pq = p.precompose(q)?;
    let (src, tgt) = (colimit(&pq), colimit(p));
    let mut table = vec![usize::MAX; src.num_classes()];
    for e in pq.elements() {
        let image = tgt.class_of(p.flat(Elem::new(q.object(e.object), e.index)));
        let slot = &mut table[src.class_of(pq.flat(e))];
        if *slot != usize::MAX && *slot != image {
            return Err(Error::IllDefined("comparison map depends on the representative".into()));
        }
        *slot = image;
    }
    Ok(table)
}
