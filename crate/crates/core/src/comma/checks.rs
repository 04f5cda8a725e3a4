use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::fincat::{FinCategory, Functor, MorphismId, ObjectId};
use crate::par;
use crate::setval::{Check, Partition};

/// Two morphisms with a common codomain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cospan {
    pub left: MorphismId,
    pub right: MorphismId,
}

/// A square `f . p = g . q` with `p: P -> X`, `q: P -> Y`, `f: X -> Z`, `g: Y -> Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Square {
    pub p: MorphismId,
    pub q: MorphismId,
    pub f: MorphismId,
    pub g: MorphismId,
}

/// Whether every under-comma `d/Q` is nonempty and connected. The first
/// failing `d` is the counterexample.
pub fn is_final(q: &Functor) -> Check<ObjectId> {
    let (a, t) = (q.source(), q.target());
    Check::from_option(par::find_first(t.num_objects(), |d| {
        let d = ObjectId(d);
        // elements (o, x: d -> Q o), flattened
        let mut offsets = Vec::with_capacity(a.num_objects());
        let mut total = 0;
        for o in a.objects() {
            offsets.push(total);
            total += t.hom(d, q.object(o)).len();
        }
        if total == 0 {
            return Some(d);
        }
        let edges = a.morphisms().flat_map(|m| {
            let (s, e) = (a.dom(m), a.cod(m));
            let qm = q.morphism(m);
            let offsets = &offsets;
            t.hom(d, q.object(s)).iter().enumerate().map(move |(i, &x)| {
                (offsets[s.0] + i, offsets[e.0] + t.hom_position(t.compose(qm, x)))
            })
        });
        let part = Partition::from_edges(total, edges);
        (part.num_classes() != 1).then_some(d)
    }))
}

fn commuting_span_exists(c: &FinCategory, f: MorphismId, g: MorphismId) -> bool {
    let (b, e) = (c.dom(f), c.dom(g));
    let mut hit = FixedBitSet::with_capacity(c.num_morphisms());
    c.objects().any(|a| {
        hit.clear();
        for &p in c.hom(a, b) {
            hit.insert(c.compose(f, p).0);
        }
        c.hom(a, e).iter().any(|&q| hit.contains(c.compose(g, q).0))
    })
}

/// Every cospan completes to a commuting square; the first cospan (in
/// morphism index order) without a completion is the counterexample.
pub fn is_weakly_cofiltered(c: &FinCategory) -> Check<Cospan> {
    Check::from_option(par::find_first(c.num_morphisms(), |f| {
        let f = MorphismId(f);
        let d = c.cod(f);
        c.objects()
            .flat_map(|o| c.hom(o, d).iter().copied())
            .filter(|g| g.0 >= f.0)
            .collect::<Vec<_>>()
            .into_iter()
            .find(|&g| !commuting_span_exists(c, f, g))
            .map(|g| Cospan { left: f, right: g })
    }))
}

fn weak_pullback_failure(d: &FinCategory, s: &Square) -> Option<(MorphismId, MorphismId)> {
    let apex = d.dom(s.p);
    let (x, y) = (d.dom(s.f), d.dom(s.g));
    d.objects().find_map(|e| {
        for &u in d.hom(e, x) {
            let fu = d.compose(s.f, u);
            for &v in d.hom(e, y) {
                if d.compose(s.g, v) != fu {
                    continue;
                }
                let filled = d.hom(e, apex).iter().any(|&w| d.compose(s.p, w) == u && d.compose(s.q, w) == v);
                if !filled {
                    return Some((u, v));
                }
            }
        }
        None
    })
}

/// Existence of a fill-in for every competing cone; the first unfilled
/// cone `(u, v)` is the counterexample.
pub fn is_weak_pullback(d: &FinCategory, s: Square) -> Result<Check<(MorphismId, MorphismId)>> {
    let shape_ok = d.dom(s.p) == d.dom(s.q)
        && d.cod(s.p) == d.dom(s.f)
        && d.cod(s.q) == d.dom(s.g)
        && d.cod(s.f) == d.cod(s.g);
    if !shape_ok {
        return Err(Error::ShapeMismatch("square morphisms do not form a square".into()));
    }
    if d.compose(s.f, s.p) != d.compose(s.g, s.q) {
        return Err(Error::NotCommuting("square does not commute".into()));
    }
    Ok(Check::from_option(weak_pullback_failure(d, &s)))
}

/// Every cospan of the source completes to a commuting square whose image
/// under `G` is a weak pullback.
pub fn satisfies_wpc(g: &Functor) -> Check<Cospan> {
    let (b, t) = (g.source(), g.target());
    Check::from_option(par::find_first(b.num_morphisms(), |f| {
        let f = MorphismId(f);
        let z = b.cod(f);
        let x = b.dom(f);
        for o in b.objects() {
            for &h in b.hom(o, z) {
                let y = b.dom(h);
                let completed = b.objects().any(|apex| {
                    b.hom(apex, x).iter().any(|&p| {
                        b.hom(apex, y).iter().any(|&q| {
                            b.compose(f, p) == b.compose(h, q) && {
                                let s = Square {
                                    p: g.morphism(p),
                                    q: g.morphism(q),
                                    f: g.morphism(f),
                                    g: g.morphism(h),
                                };
                                weak_pullback_failure(t, &s).is_none()
                            }
                        })
                    })
                });
                if !completed {
                    return Some(Cospan { left: f, right: h });
                }
            }
        }
        None
    }))
}

/// An object with at least one morphism to every object.
pub fn is_weakly_initial(c: &FinCategory, o: ObjectId) -> bool {
    c.objects().all(|t| !c.hom(o, t).is_empty())
}
