//! Pointwise left Kan extensions into finite sets.
//!
//! `Lan_F X (c)` is the colimit of `X . V` over the comma category `F/c`,
//! whose elements are triples `(b, z: F b -> c, x in X b)`.

use std::collections::HashSet;

use crate::comma::{comma, is_final, product_comma, CommaCategory};
use crate::error::{Error, Result};
use crate::fincat::{Functor, MorphismId, ObjectId, ProductWitness, WitnessTable};
use crate::par;
use crate::setval::{
    colimit, compare_along, hom_from_along, is_one_step_transitive, product_compare, tensor, Elem, Partition,
    SetFunctor,
};

/// `Lan_F X` at one object: the comma category, the diagram `X . V` on it
/// and the colimit partition.
#[derive(Debug, Clone)]
pub struct KanPoint {
    pub object: ObjectId,
    pub comma: CommaCategory,
    pub diagram: SetFunctor,
    pub partition: Partition,
}

impl KanPoint {
    pub fn num_classes(&self) -> usize {
        self.partition.num_classes()
    }

    /// `(b, z, x)` of a flat element index.
    pub fn triple(&self, i: usize) -> (ObjectId, MorphismId, usize) {
        let e = self.diagram.unflat(i);
        let (b, z) = self.comma.pair(e.object);
        (b, z, e.index)
    }

    /// Flat index of `(b, z, x)`, if `z` lands in this point.
    pub fn index_of(&self, b: ObjectId, z: MorphismId, x: usize) -> Option<usize> {
        let o = self.comma.object_of(b, z)?;
        (x < self.diagram.size(o)).then(|| self.diagram.flat(Elem::new(o, x)))
    }

    pub fn class_of_triple(&self, b: ObjectId, z: MorphismId, x: usize) -> Option<usize> {
        self.index_of(b, z, x).map(|i| self.partition.class_of(i))
    }

    /// Representative triple of a class.
    pub fn representative(&self, class: usize) -> (ObjectId, MorphismId, usize) {
        self.triple(self.partition.representative(class))
    }

    /// Readable form `[b, z, x]` of a class representative.
    pub fn class_name(&self, f: &Functor, x: &SetFunctor, class: usize) -> String {
        let (b, z, e) = self.representative(class);
        format!(
            "[{},{},{}]",
            f.source().object_name(b),
            f.target().morphism_name(z),
            x.set(b)[e]
        )
    }
}

fn check_composable(f: &Functor, x: &SetFunctor) -> Result<()> {
    if **f.source() != **x.base() {
        return Err(Error::ShapeMismatch("the set functor does not live on the source of F".into()));
    }
    Ok(())
}

/// `Lan_F X (c)`.
pub fn lan_at(f: &Functor, x: &SetFunctor, c: ObjectId) -> Result<KanPoint> {
    check_composable(f, x)?;
    let comma = comma(f, c)?;
    let diagram = x.precompose(&comma.forget)?;
    let partition = colimit(&diagram);
    Ok(KanPoint { object: c, comma, diagram, partition })
}

/// Class table of `Lan_F X (h)`, checked on every representative.
pub fn lan_map(f: &Functor, from: &KanPoint, to: &KanPoint, h: MorphismId) -> Result<Vec<usize>> {
    let t = f.target();
    if t.dom(h) != from.object || t.cod(h) != to.object {
        return Err(Error::ShapeMismatch(format!("{} does not connect the two points", t.morphism_name(h))));
    }
    let mut table = vec![usize::MAX; from.num_classes()];
    for i in 0..from.partition.len() {
        let (b, z, x) = from.triple(i);
        let image = to
            .class_of_triple(b, t.compose(h, z), x)
            .ok_or_else(|| Error::IllDefined("image triple missing from the target comma".into()))?;
        let slot = &mut table[from.partition.class_of(i)];
        if *slot != usize::MAX && *slot != image {
            return Err(Error::IllDefined(format!(
                "action of {} depends on the representative",
                t.morphism_name(h)
            )));
        }
        *slot = image;
    }
    Ok(table)
}

/// `Lan_F X` on all of the target category.
#[derive(Debug, Clone)]
pub struct KanResult {
    pub points: Vec<KanPoint>,
    /// `tables[h]`: class table of the morphism `h`.
    pub tables: Vec<Vec<usize>>,
    /// The extension as a set functor; elements are named by representatives.
    pub functor: SetFunctor,
    // class index -> element index of `functor`, per object
    element_of_class: Vec<Vec<usize>>,
}

impl KanResult {
    pub fn element_of_class(&self, c: ObjectId, class: usize) -> usize {
        self.element_of_class[c.0][class]
    }

    pub fn class_of_element(&self, c: ObjectId, element: usize) -> usize {
        self.element_of_class[c.0].iter().position(|&e| e == element).expect("element of the extension")
    }
}

pub fn lan(f: &Functor, x: &SetFunctor) -> Result<KanResult> {
    check_composable(f, x)?;
    let t = f.target().clone();
    let objects: Vec<ObjectId> = t.objects().collect();
    let points: Vec<KanPoint> = par::map(&objects, |&c| lan_at(f, x, c)).into_iter().collect::<Result<_>>()?;
    let morphisms: Vec<MorphismId> = t.morphisms().collect();
    let tables: Vec<Vec<usize>> = par::map(&morphisms, |&h| lan_map(f, &points[t.dom(h).0], &points[t.cod(h).0], h))
        .into_iter()
        .collect::<Result<_>>()?;
    let sets: Vec<Vec<String>> =
        points.iter().map(|p| (0..p.num_classes()).map(|k| p.class_name(f, x, k)).collect()).collect();
    let functor = SetFunctor::new(t.clone(), sets.clone(), tables.clone())?;
    let element_of_class = sets
        .iter()
        .enumerate()
        .map(|(o, names)| names.iter().map(|n| functor.element(ObjectId(o), n).expect("class name")).collect())
        .collect();
    Ok(KanResult { points, tables, functor, element_of_class })
}

/// Whether `y |-> (P pi_i y)_i` is a bijection `P(apex) -> prod P(factor_i)`.
pub fn preserves_products(p: &SetFunctor, w: &ProductWitness) -> Result<bool> {
    let c = p.base();
    if w.factors.len() != w.projections.len()
        || w.projections.iter().zip(&w.factors).any(|(&pi, &b)| c.dom(pi) != w.apex || c.cod(pi) != b)
    {
        return Err(Error::ShapeMismatch("malformed product witness".into()));
    }
    let radices: Vec<usize> = w.factors.iter().map(|&b| p.size(b)).collect();
    let target: usize = radices.iter().product();
    if p.size(w.apex) != target {
        return Ok(false);
    }
    let images: HashSet<Vec<usize>> =
        (0..p.size(w.apex)).map(|y| w.projections.iter().map(|&pi| p.table(pi)[y]).collect()).collect();
    Ok(images.len() == target)
}

/// Whether every witness of a table is preserved; the first failure is returned.
pub fn preserves_all(p: &SetFunctor, table: &WitnessTable) -> Result<Option<ProductWitness>> {
    for w in table.witnesses() {
        if !preserves_products(p, w)? {
            return Ok(Some(w.clone()));
        }
    }
    Ok(None)
}

/// `colim P_{c,d}` for `P_{c,d} = D(d, G V -)` on `F/c`, whose elements are
/// triples `(b, x: d -> G b, z: F b -> c)`.
#[derive(Debug, Clone)]
pub struct ProfunctorPoint {
    pub comma: CommaCategory,
    pub diagram: SetFunctor,
    pub partition: Partition,
    /// Whether the one-step relation was already an equivalence.
    pub one_step_transitive: bool,
}

pub fn profunctor_at(f: &Functor, g: &Functor, c: ObjectId, d: ObjectId) -> Result<ProfunctorPoint> {
    if f.source() != g.source() {
        return Err(Error::ShapeMismatch("F and G must share their source".into()));
    }
    if d.0 >= g.target().num_objects() {
        return Err(Error::UnknownObject(format!("#{}", d.0)));
    }
    let comma = comma(f, c)?;
    let gv = g.after(&comma.forget)?;
    let diagram = hom_from_along(&gv, d);
    let partition = colimit(&diagram);
    let one_step_transitive = is_one_step_transitive(&diagram).holds();
    Ok(ProfunctorPoint { comma, diagram, partition, one_step_transitive })
}

/// The steps of the product computation for `Lan_F X` at a product
/// `prod c_i`, each recomputed independently.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductChain {
    /// `W: prod F/c_i -> F/prod c_i` is final.
    pub w_final: bool,
    /// `colim (X V W) -> colim (X V)` is a bijection.
    pub w_invariance: bool,
    /// `X` preserves every product of the source used by `W`.
    pub x_preserves: bool,
    /// `colim (X V W) ~ colim (X V_1 x .. x X V_k)` via `X(prod b_i) ~ prod X b_i`.
    pub tensor_matches: bool,
    /// `colim (X V_1 x .. x X V_k) -> prod colim X V_i` is a bijection.
    pub tensor_comparison: bool,
    /// The canonical map of `Lan_F X` at the product is a bijection.
    pub lan_preserves: bool,
}

impl ProductChain {
    pub fn holds(&self) -> bool {
        self.w_final
            && self.w_invariance
            && self.x_preserves
            && self.tensor_matches
            && self.tensor_comparison
            && self.lan_preserves
    }
}

fn is_bijection(table: &[usize], target: usize) -> bool {
    table.len() == target && table.iter().collect::<HashSet<_>>().len() == target
}

pub fn verify_product_chain(
    f: &Functor,
    x: &SetFunctor,
    b_witnesses: &WitnessTable,
    c_witness: &ProductWitness,
) -> Result<ProductChain> {
    check_composable(f, x)?;
    let pcm = product_comma(f, b_witnesses, c_witness)?;
    let w_final = is_final(&pcm.w).holds();

    let at_product = lan_at(f, x, c_witness.apex)?;
    let xvw = at_product.diagram.precompose(&pcm.w)?;
    let via_w = compare_along(&pcm.w, &at_product.diagram)?;
    let w_invariance = is_bijection(&via_w, at_product.num_classes());

    let factors: Vec<SetFunctor> =
        pcm.commas.iter().map(|k| x.precompose(&k.forget)).collect::<Result<_>>()?;
    let t = tensor(&factors);

    // X(prod b_i) -> prod X b_i at every object of the product of commas
    let bc = f.source();
    let mut x_preserves = true;
    let mut edges = Vec::new();
    let offset = xvw.total();
    for o in pcm.product.category.objects() {
        let parts: Vec<ObjectId> =
            pcm.product.object_tuple(o).iter().zip(&pcm.commas).map(|(&y, k)| k.pair(y).0).collect();
        let wb = b_witnesses.require(bc, &parts)?;
        x_preserves &= preserves_products(x, wb)?;
        let tuple = pcm.product.object_tuple(o);
        for y in 0..xvw.size(o) {
            let local: Vec<Elem> =
                tuple.iter().zip(&wb.projections).map(|(&k, &p)| Elem::new(k, x.table(p)[y])).collect();
            if let Some(te) = t.element_of(&local) {
                edges.push((xvw.flat(Elem::new(o, y)), offset + t.functor.flat(te)));
            }
        }
    }
    // both colimits and the bijection of elements glue to one partition
    let joined = Partition::from_edges(
        offset + t.functor.total(),
        edges.iter().copied().chain(colimit_edges(&xvw)).chain(
            colimit_edges(&t.functor).into_iter().map(|(a, b)| (a + offset, b + offset)),
        ),
    );
    let left = colimit(&xvw);
    let right = colimit(&t.functor);
    let tensor_matches = x_preserves && joined.num_classes() == left.num_classes() && left.num_classes() == right.num_classes();

    let tensor_comparison = product_compare(&factors)?.bijective;

    let points: Vec<KanPoint> = c_witness.factors.iter().map(|&ci| lan_at(f, x, ci)).collect::<Result<_>>()?;
    let maps: Vec<Vec<usize>> = c_witness
        .projections
        .iter()
        .zip(&points)
        .map(|(&pi, p)| lan_map(f, &at_product, p, pi))
        .collect::<Result<_>>()?;
    let target: usize = points.iter().map(|p| p.num_classes()).product();
    let images: HashSet<Vec<usize>> =
        (0..at_product.num_classes()).map(|k| maps.iter().map(|m| m[k]).collect()).collect();
    let lan_preserves = at_product.num_classes() == target && images.len() == target;
    Ok(ProductChain { w_final, w_invariance, x_preserves, tensor_matches, tensor_comparison, lan_preserves })
}

fn colimit_edges(p: &SetFunctor) -> Vec<(usize, usize)> {
    let c = p.base();
    c.morphisms()
        .flat_map(|f| {
            let (d, t) = (c.dom(f), c.cod(f));
            p.table(f).iter().enumerate().map(move |(x, &y)| (p.flat(Elem::new(d, x)), p.flat(Elem::new(t, y))))
        })
        .collect()
}
