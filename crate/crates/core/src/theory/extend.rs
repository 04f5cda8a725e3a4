use std::sync::Arc;

use fixedbitset::FixedBitSet;

use super::algebraic::{Algebra, AlgebraicTheory};
use super::clone::{builtin, AbstractClone};
use super::free::{free_algebra, FreeAlgebra, Triple};
use super::theory_of;
use crate::error::{Error, Result};
use crate::fincat::{Functor, MorphismId, ProductWitness};
use crate::kan::{lan, preserves_all, KanResult};
use crate::setval::{Check, Partition, SetFunctor};

/// The transformation `Fr(X0) -> Y` extending `f`, with the outcome of
/// the naturality check and of the exhaustive uniqueness search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomExtension {
    /// `components[m][e]`: image of the element `e` of `Fr(X0)(A^m)`.
    pub components: Vec<Vec<usize>>,
    pub natural: bool,
    /// Natural transformations restricting to `f` along the unit, counted
    /// up to two.
    pub solutions: usize,
}

impl HomExtension {
    pub fn unique(&self) -> bool {
        self.natural && self.solutions == 1
    }
}

pub fn hom_extend(fr: &FreeAlgebra, y: &Algebra, f: &[usize]) -> Result<HomExtension> {
    let th = fr.theory();
    if *y.theory.category != *th.category {
        return Err(Error::ShapeMismatch("target algebra lives on another theory".into()));
    }
    if f.len() != fr.generators.len() || f.iter().any(|&v| v >= y.carrier_size()) {
        return Err(Error::InvalidArgument("generator map is not a total map into the carrier".into()));
    }
    let image = |t: &Triple| {
        let args: Vec<usize> = t.x.iter().map(|&g| f[g]).collect();
        let v = y.element(&args);
        y.functor.table(th.morphism(t.n, &t.ops))[v]
    };
    let mut components = Vec::with_capacity(th.rank());
    for m in 0..th.rank() {
        let comp: Vec<usize> = (0..fr.size(m)).map(|e| image(fr.representative(m, e))).collect();
        for i in 0..fr.num_triples(m) {
            let t = fr.triple(m, i);
            if image(&t) != comp[fr.element_of_index(m, i)] {
                return Err(Error::IllDefined(format!("extension differs on the class of {t:?}")));
            }
        }
        components.push(comp);
    }
    let c = &th.category;
    let natural = c.morphisms().all(|h| {
        let (d, e) = (th.arity(c.dom(h)), th.arity(c.cod(h)));
        let (fh, yh) = (fr.algebra.functor.table(h), y.functor.table(h));
        (0..fr.size(d)).all(|x| yh[components[d][x]] == components[e][fh[x]])
    });
    let solutions = count_transformations(fr, y, f, 2);
    Ok(HomExtension { components, natural, solutions })
}

/// Counts natural transformations `Fr(X0) -> Y` sending `unit(i)` to
/// `f(i)`, stopping at `limit`. Backtracking over arc-consistent domains.
pub fn count_transformations(fr: &FreeAlgebra, y: &Algebra, f: &[usize], limit: usize) -> usize {
    let th = fr.theory();
    let c = &th.category;
    let src = &fr.algebra.functor;
    let offsets: Vec<usize> = (0..=th.rank()).map(|m| (0..m).map(|k| fr.size(k)).sum()).collect();
    let var_object: Vec<usize> = (0..th.rank()).flat_map(|m| std::iter::repeat_n(m, fr.size(m))).collect();
    // arcs[v] = (h, target variable); beta(target) = Y(h)(beta(v))
    let mut arcs: Vec<Vec<(MorphismId, usize)>> = vec![Vec::new(); var_object.len()];
    let mut back: Vec<Vec<(MorphismId, usize)>> = vec![Vec::new(); var_object.len()];
    for h in c.morphisms() {
        let (d, e) = (th.arity(c.dom(h)), th.arity(c.cod(h)));
        for (x, &fx) in src.table(h).iter().enumerate() {
            let (a, b) = (offsets[d] + x, offsets[e] + fx);
            arcs[a].push((h, b));
            back[b].push((h, a));
        }
    }
    let mut domains: Vec<FixedBitSet> = var_object
        .iter()
        .map(|&m| {
            let mut s = FixedBitSet::with_capacity(y.functor.size(th.object(m)));
            s.insert_range(..);
            s
        })
        .collect();
    for (g, &v) in f.iter().enumerate() {
        let u = offsets[1] + fr.unit(g);
        domains[u].clear();
        domains[u].insert(v);
    }
    let ctx = Csp { y, arcs: &arcs, back: &back };
    ctx.search(domains, limit)
}

struct Csp<'a> {
    y: &'a Algebra,
    arcs: &'a [Vec<(MorphismId, usize)>],
    back: &'a [Vec<(MorphismId, usize)>],
}

impl Csp<'_> {
    // revise until fixpoint; false on a wipe-out
    fn propagate(&self, domains: &mut [FixedBitSet], mut queue: Vec<usize>) -> bool {
        let mut queued = FixedBitSet::with_capacity(domains.len());
        for &v in &queue {
            queued.insert(v);
        }
        while let Some(v) = queue.pop() {
            queued.set(v, false);
            for &(h, w) in &self.arcs[v] {
                let table = self.y.functor.table(h);
                let mut image = FixedBitSet::with_capacity(domains[w].len());
                for a in domains[v].ones() {
                    image.insert(table[a]);
                }
                let before = domains[w].count_ones(..);
                domains[w].intersect_with(&image);
                let after = domains[w].count_ones(..);
                if after == 0 {
                    return false;
                }
                if after < before {
                    for u in std::iter::once(w).chain(self.back[w].iter().map(|&(_, u)| u)) {
                        if !queued.put(u) {
                            queue.push(u);
                        }
                    }
                }
                let before = domains[v].count_ones(..);
                let keep: Vec<usize> = domains[v].ones().filter(|&a| domains[w].contains(table[a])).collect();
                if keep.len() < before {
                    if keep.is_empty() {
                        return false;
                    }
                    domains[v].clear();
                    for a in keep {
                        domains[v].insert(a);
                    }
                    for u in std::iter::once(v).chain(self.back[v].iter().map(|&(_, u)| u)) {
                        if !queued.put(u) {
                            queue.push(u);
                        }
                    }
                }
            }
        }
        true
    }

    fn search(&self, mut domains: Vec<FixedBitSet>, limit: usize) -> usize {
        let all: Vec<usize> = (0..domains.len()).collect();
        if !self.propagate(&mut domains, all) {
            return 0;
        }
        self.branch(domains, limit)
    }

    fn branch(&self, domains: Vec<FixedBitSet>, limit: usize) -> usize {
        let open = (0..domains.len())
            .filter(|&v| domains[v].count_ones(..) > 1)
            .min_by_key(|&v| domains[v].count_ones(..));
        let Some(v) = open else {
            return 1;
        };
        let mut count = 0;
        for a in domains[v].ones() {
            let mut next = domains.clone();
            next[v].clear();
            next[v].insert(a);
            let mut queue = self.back[v].iter().map(|&(_, u)| u).collect::<Vec<_>>();
            queue.push(v);
            if self.propagate(&mut next, queue) {
                count += self.branch(next, limit - count);
                if count >= limit {
                    break;
                }
            }
        }
        count
    }
}

/// `Lan_J Y` together with the first target witness it fails to preserve.
#[derive(Debug, Clone)]
pub struct LanAlong {
    pub kan: KanResult,
    pub failing_witness: Option<ProductWitness>,
}

impl LanAlong {
    pub fn preserves_products(&self) -> bool {
        self.failing_witness.is_none()
    }

    pub fn functor(&self) -> &SetFunctor {
        &self.kan.functor
    }
}

pub fn lan_along(j: &Functor, y: &Algebra, target: &AlgebraicTheory) -> Result<LanAlong> {
    if **j.target() != *target.category {
        return Err(Error::ShapeMismatch("functor does not land in the target theory".into()));
    }
    let kan = lan(j, &y.functor)?;
    let failing_witness = preserves_all(&kan.functor, &target.witnesses)?;
    Ok(LanAlong { kan, failing_witness })
}

/// First disagreement between the rank-`N` and rank-`N+1` partitions on
/// the triples of the smaller run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityFailure {
    pub object: usize,
    pub triple: Triple,
}

pub fn stability_between(low: &AbstractClone, high: &AbstractClone, generators: &[String]) -> Result<Check<StabilityFailure>> {
    if high.rank() <= low.rank() {
        return Err(Error::InvalidArgument("the second clone must have larger rank".into()));
    }
    let fl = free_algebra(Arc::new(theory_of(low)?), generators)?;
    let fh = free_algebra(Arc::new(theory_of(high)?), generators)?;
    let rename = |n: usize, w: usize| {
        let name = &low.ops(n)[w];
        high.op(n, name).ok_or_else(|| Error::UnknownMorphism(format!("operation {name} of arity {n}")))
    };
    for m in 0..low.rank() {
        let mut labels = Vec::with_capacity(fl.num_triples(m));
        for i in 0..fl.num_triples(m) {
            let t = fl.triple(m, i);
            let ops = t.ops.iter().map(|&w| rename(t.n, w)).collect::<Result<Vec<_>>>()?;
            labels.push(fh.element_of(&Triple { n: t.n, ops, x: t.x })?);
        }
        let restricted = Partition::from_labels(&labels);
        let ours = fl.partition(m);
        if let Some(i) = (0..labels.len()).find(|&i| restricted.class_of(i) != ours.class_of(i)) {
            return Ok(Check::Fails(StabilityFailure { object: m, triple: fl.triple(m, i) }));
        }
    }
    Ok(Check::Holds)
}

/// Stability of a built-in theory between ranks `rank` and `rank + 1`.
pub fn truncation_stability(name: &str, rank: usize, generators: &[String]) -> Result<Check<StabilityFailure>> {
    stability_between(&builtin(name, rank)?, &builtin(name, rank + 1)?, generators)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::{pointed, restricted_hom, semilattice, shift_functor, theory_inclusion, trivial, BUILTIN_NAMES};

    fn gens(k: usize) -> Vec<String> {
        (0..k).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
    }

    fn free(cl: AbstractClone, k: usize) -> FreeAlgebra {
        free_algebra(Arc::new(theory_of(&cl).unwrap()), &gens(k)).unwrap()
    }

    #[test]
    fn extending_the_unit_gives_the_identity() {
        let fr = free(semilattice(4).unwrap(), 2);
        let units: Vec<usize> = (0..2).map(|g| fr.unit(g)).collect();
        let ext = hom_extend(&fr, &fr.algebra, &units).unwrap();
        assert!(ext.unique());
        for m in 0..4 {
            assert_eq!(ext.components[m], (0..fr.size(m)).collect::<Vec<_>>());
        }
    }

    #[test]
    fn extension_into_a_free_algebra_on_fewer_generators() {
        let fr = free(pointed(3).unwrap(), 2);
        let one = free(pointed(3).unwrap(), 1);
        let ext = hom_extend(&fr, &one.algebra, &[one.unit(0), one.unit(0)]).unwrap();
        assert!(ext.unique());
        assert_eq!(ext.components[1].iter().collect::<std::collections::BTreeSet<_>>().len(), 2);
    }

    #[test]
    fn bad_generator_map_is_rejected() {
        let fr = free(pointed(3).unwrap(), 1);
        assert!(hom_extend(&fr, &fr.algebra, &[]).is_err());
        assert!(hom_extend(&fr, &fr.algebra, &[7]).is_err());
    }

    #[test]
    fn lan_along_identity_and_inclusion() {
        let y = restricted_hom(&gens(2), 3).unwrap();
        let id = Functor::identity(y.theory.category.clone());
        let l = lan_along(&id, &y, &y.theory).unwrap();
        assert!(l.preserves_products());
        assert_eq!(l.functor().size(y.theory.object(2)), 4);

        let p = theory_of(&pointed(3).unwrap()).unwrap();
        for k in 0..=2 {
            let y = restricted_hom(&gens(k), 3).unwrap();
            let j = theory_inclusion(&y.theory, &p).unwrap();
            let l = lan_along(&j, &y, &p).unwrap();
            assert!(l.preserves_products());
            assert_eq!(l.functor().size(p.object(1)), k + 1);
        }
    }

    #[test]
    fn shift_adds_a_point() {
        let t = theory_of(&trivial(4).unwrap()).unwrap();
        let s = shift_functor(&t).unwrap();
        for k in 0..=3 {
            let y = restricted_hom(&gens(k), 3).unwrap();
            let l = lan_along(&s.functor, &y, &t).unwrap();
            assert_eq!(l.functor().size(t.object(1)), k + 1);
        }
    }

    #[test]
    fn stability_at_rank_three() {
        for name in BUILTIN_NAMES {
            for k in 0..=2 {
                assert!(truncation_stability(name, 3, &gens(k)).unwrap().holds(), "{name} {k}");
            }
        }
    }
}
