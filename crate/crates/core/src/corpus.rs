//! Seeded random instances and the bundled example instances.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::fincat::{
    finset_op, poset_category, FinCategory, FinSetOp, Functor, MorphismId, ObjectId, ProductWitness, WitnessTable,
};
use crate::setval::SetFunctor;
use crate::theory::{theory_of, trivial};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// `0 < 1 < .. < n-1`.
pub fn chain(n: usize) -> FinCategory {
    poset_category(&names("", n), |i, j| i <= j).expect("chain")
}

/// Subsets of `{0, .., bits-1}` under inclusion, named `{..}`.
pub fn boolean_lattice(bits: usize) -> FinCategory {
    let names: Vec<String> = (0..1usize << bits)
        .map(|s| {
            let parts: Vec<String> = (0..bits).filter(|b| s >> b & 1 == 1).map(|b| b.to_string()).collect();
            format!("{{{}}}", parts.join(","))
        })
        .collect();
    poset_category(&names, |i, j| i & !j == 0).expect("boolean lattice")
}

/// `a -> c <- b`.
pub fn cospan_category() -> FinCategory {
    let names: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
    poset_category(&names, |i, j| i == j || j == 2).expect("cospan")
}

/// Finite lattices with at most four elements, up to isomorphism.
pub fn small_lattices() -> Vec<Arc<FinCategory>> {
    vec![Arc::new(chain(1)), Arc::new(chain(2)), Arc::new(chain(3)), Arc::new(chain(4)), Arc::new(boolean_lattice(2))]
}

/// Finite sets `{0, .., max}` with all functions; `n -> m` is named as the
/// opposite morphism of the truncated `finset_op`.
#[derive(Debug, Clone)]
pub struct FinSets {
    pub category: Arc<FinCategory>,
    op: FinSetOp,
}

impl FinSets {
    pub fn new(max: usize) -> Result<Self> {
        let op = finset_op(max + 1)?;
        Ok(FinSets { category: Arc::new(op.category.opposite()), op })
    }

    pub fn size(&self, o: ObjectId) -> usize {
        self.op.arity(o)
    }

    /// The function of a morphism `n -> m` as a table of length `n`.
    pub fn function(&self, m: MorphismId) -> &[usize] {
        self.op.function(m).2
    }

    /// A set functor through this category.
    pub fn realize(&self, g: &Functor) -> SetFunctor {
        let b = g.source();
        let sets = b.objects().map(|o| names("", self.size(g.object(o)))).collect();
        let maps = b.morphisms().map(|m| self.function(g.morphism(m)).to_vec()).collect();
        // element names "0".."9" sort numerically below ten
        SetFunctor::new_unchecked(b.clone(), sets, maps).expect("realized functor")
    }
}

/// `finset_op(low)` inside `finset_op(high)`, matched by names.
pub fn finset_inclusion(low: usize, high: usize) -> Result<Functor> {
    let (a, b) = (finset_op(low)?.category, finset_op(high)?.category);
    let on_objects = a.objects().map(|o| b.object(a.object_name(o))).collect::<Result<_>>()?;
    let on_morphisms = a.morphisms().map(|m| b.morphism(a.morphism_name(m))).collect::<Result<_>>()?;
    Functor::new(a, b, on_objects, on_morphisms)
}

/// A random poset on `1..=max_objects` objects, from the transitive closure
/// of random forward edges.
pub fn random_poset<R: Rng>(rng: &mut R, max_objects: usize) -> FinCategory {
    let n = rng.gen_range(1..=max_objects);
    let mut leq = vec![vec![false; n]; n];
    for (i, row) in leq.iter_mut().enumerate() {
        row[i] = true;
        for cell in row.iter_mut().skip(i + 1) {
            *cell = rng.gen_bool(0.4);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if leq[i][k] && leq[k][j] {
                    leq[i][j] = true;
                }
            }
        }
    }
    poset_category(&names("p", n), |i, j| leq[i][j]).expect("poset")
}

/// A random category with at most `max_objects` objects: a poset or a full
/// subcategory of finite sets or their opposite.
pub fn random_category<R: Rng>(rng: &mut R, max_objects: usize) -> Arc<FinCategory> {
    match rng.gen_range(0..3) {
        0 => Arc::new(random_poset(rng, max_objects)),
        kind => {
            let base = if kind == 1 { finset_op(3).expect("rank").category } else { FinSets::new(2).expect("rank").category };
            let mut keep: Vec<ObjectId> = base.objects().filter(|_| rng.gen_bool(0.7)).collect();
            if keep.is_empty() {
                keep.push(ObjectId(rng.gen_range(0..base.num_objects())));
            }
            keep.truncate(max_objects);
            base.full_subcategory(&keep).source().clone()
        }
    }
}

// composable (g, f, g . f) triples touching each morphism
fn constraints(c: &FinCategory) -> Vec<Vec<(MorphismId, MorphismId, MorphismId)>> {
    let mut by = vec![Vec::new(); c.num_morphisms()];
    for f in c.morphisms() {
        for &g in c.out_of(c.cod(f)) {
            let t = (g, f, c.compose(g, f));
            by[g.0].push(t);
            by[f.0].push(t);
            if t.2 != g && t.2 != f {
                by[t.2 .0].push(t);
            }
        }
    }
    by
}

struct FunctorSearch<'a, R> {
    src: &'a FinCategory,
    tgt: &'a FinCategory,
    rng: &'a mut R,
    by: Vec<Vec<(MorphismId, MorphismId, MorphismId)>>,
    order: Vec<MorphismId>,
    budget: usize,
}

impl<R: Rng> FunctorSearch<'_, R> {
    fn fill(&mut self, objects: &[ObjectId], images: &mut Vec<Option<MorphismId>>, k: usize) -> bool {
        if k == self.order.len() {
            return true;
        }
        if self.budget == 0 {
            return false;
        }
        self.budget -= 1;
        let m = self.order[k];
        let (d, e) = (objects[self.src.dom(m).0], objects[self.src.cod(m).0]);
        let mut candidates: Vec<MorphismId> = self.tgt.hom(d, e).to_vec();
        candidates.shuffle(self.rng);
        for cand in candidates {
            images[m.0] = Some(cand);
            let ok = self.by[m.0].iter().all(|&(g, f, gf)| match (images[g.0], images[f.0], images[gf.0]) {
                (Some(a), Some(b), Some(c)) => self.tgt.compose(a, b) == c,
                _ => true,
            });
            if ok && self.fill(objects, images, k + 1) {
                return true;
            }
        }
        images[m.0] = None;
        false
    }
}

/// A random functor found by randomized backtracking; falls back to a
/// constant functor when the search budget runs out.
pub fn random_functor<R: Rng>(rng: &mut R, src: Arc<FinCategory>, tgt: Arc<FinCategory>) -> Functor {
    let by = constraints(&src);
    let order: Vec<MorphismId> = src.morphisms().filter(|&m| !src.is_identity(m)).collect();
    for _ in 0..8 {
        let objects: Vec<ObjectId> = src.objects().map(|_| ObjectId(rng.gen_range(0..tgt.num_objects()))).collect();
        let mut images: Vec<Option<MorphismId>> = vec![None; src.num_morphisms()];
        for o in src.objects() {
            images[src.identity(o).0] = Some(tgt.identity(objects[o.0]));
        }
        let mut search = FunctorSearch { src: &src, tgt: &tgt, rng, by: by.clone(), order: order.clone(), budget: 2000 };
        if search.fill(&objects, &mut images, 0) {
            let on_morphisms = images.into_iter().map(|m| m.expect("assigned")).collect();
            return Functor::new(src, tgt, objects, on_morphisms).expect("search respects the laws");
        }
    }
    let o = ObjectId(rng.gen_range(0..tgt.num_objects()));
    let on_objects = vec![o; src.num_objects()];
    let on_morphisms = vec![tgt.identity(o); src.num_morphisms()];
    Functor::new(src, tgt, on_objects, on_morphisms).expect("constant functor")
}

/// A random set functor with fibers of size at most `max_fiber`.
pub fn random_set_functor<R: Rng>(rng: &mut R, base: Arc<FinCategory>, max_fiber: usize) -> SetFunctor {
    let sets = FinSets::new(max_fiber).expect("fiber bound");
    let g = random_functor(rng, base, sets.category.clone());
    sets.realize(&g)
}

/// The principal filter `{x : a <= x}` of a poset as a set functor with
/// fibers `{*}` or empty. On a lattice it preserves all finite products.
pub fn filter_functor(poset: Arc<FinCategory>, a: ObjectId) -> SetFunctor {
    let sets = poset
        .objects()
        .map(|x| if poset.hom(a, x).is_empty() { vec![] } else { vec!["*".to_string()] })
        .collect::<Vec<_>>();
    let maps = poset.morphisms().map(|m| if sets[poset.dom(m).0].is_empty() { vec![] } else { vec![0] }).collect();
    SetFunctor::new(poset, sets, maps).expect("filter functor")
}

/// A random product-preserving set functor on a random small lattice.
pub fn random_product_preserving<R: Rng>(rng: &mut R) -> SetFunctor {
    let lattices = small_lattices();
    let l = lattices.choose(rng).expect("lattices").clone();
    let a = ObjectId(rng.gen_range(0..l.num_objects()));
    filter_functor(l, a)
}

/// Data for `build_w` / `build_l`.
#[derive(Debug, Clone)]
pub struct AdjunctionInstance {
    pub name: String,
    pub functor: Functor,
    pub b_witnesses: WitnessTable,
    pub c_witness: ProductWitness,
}

fn lattice_instance(name: &str, functor: Functor, factors: &[&str]) -> AdjunctionInstance {
    let c = functor.target().clone();
    let ids: Vec<ObjectId> = factors.iter().map(|f| c.object(f).expect("factor")).collect();
    let c_witness = WitnessTable::search(&c, ids.len()).get(&ids).expect("product in a lattice").clone();
    let b_witnesses = WitnessTable::search(functor.source(), ids.len());
    AdjunctionInstance { name: name.to_string(), functor, b_witnesses, c_witness }
}

/// The bundled instances: lattices with identity and non-identity `F`,
/// every arity from the empty product up, and the truncated trivial theory.
pub fn adjunction_instances() -> Result<Vec<AdjunctionInstance>> {
    let diamond = Arc::new(boolean_lattice(2));
    let id = Functor::identity(diamond.clone());
    let mut out = vec![
        lattice_instance("diamond-meet", id.clone(), &["{0}", "{1}"]),
        lattice_instance("diamond-empty", id.clone(), &[]),
        lattice_instance("diamond-single", id.clone(), &["{0}"]),
        lattice_instance("diamond-triple", id, &["{0}", "{1}", "{0,1}"]),
    ];
    let c3 = Arc::new(chain(3));
    let up = Functor::new(
        c3.clone(),
        diamond.clone(),
        ["{}", "{0}", "{0,1}"].iter().map(|n| diamond.object(n).unwrap()).collect(),
        c3.morphisms()
            .map(|m| {
                let name = |o: ObjectId| ["{}", "{0}", "{0,1}"][o.0];
                diamond.morphism(&format!("{}<={}", name(c3.dom(m)), name(c3.cod(m)))).unwrap()
            })
            .collect(),
    )?;
    out.push(lattice_instance("chain-into-diamond", up, &["{0}", "{1}"]));
    let top = diamond.object("{0,1}")?;
    let point = Functor::new(Arc::new(FinCategory::terminal()), diamond.clone(), vec![top], vec![diamond.identity(top)])?;
    out.push(lattice_instance("point-into-diamond", point, &["{0}", "{1}"]));

    let theory = theory_of(&trivial(3)?)?;
    let fs = &theory.finset;
    let sub = fs.category.full_subcategory(&[fs.object(0), fs.object(1)]);
    let a = theory.embedding.after(&sub)?;
    let b_witnesses = WitnessTable::search(a.source(), 2);
    for (name, parts) in [("trivial-theory-square", vec![1, 1]), ("trivial-theory-empty", vec![])] {
        let c_witness = theory.witness(&parts).expect("theory witness").clone();
        out.push(AdjunctionInstance { name: name.to_string(), functor: a.clone(), b_witnesses: b_witnesses.clone(), c_witness });
    }
    Ok(out)
}
