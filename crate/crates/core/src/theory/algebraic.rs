use std::collections::HashMap;
use std::sync::Arc;

use super::clone::{trivial, validate_clone, AbstractClone};
use crate::error::{Error, Result};
use crate::fincat::{
    check_product_witness, finset_op, tuples, FinCategory, FinSetOp, Functor, MorphismId, ObjectId, ProductWitness,
    WitnessTable,
};
use crate::kan::preserves_all;
use crate::setval::SetFunctor;

/// The category generated by a truncated clone: objects `A^0 .. A^{N-1}`,
/// morphisms `A^n -> A^m` the `m`-tuples of `n`-ary operations, composition
/// by substitution. `embedding` is the functor from the truncated opposite of
/// finite sets sending a function `phi` to the tuple of projections it selects.
#[derive(Debug, Clone)]
pub struct AlgebraicTheory {
    pub clone: AbstractClone,
    pub category: Arc<FinCategory>,
    pub finset: FinSetOp,
    pub embedding: Functor,
    pub witnesses: WitnessTable,
    objects: Vec<ObjectId>,
    arity_of: Vec<usize>,
    operations: Vec<(usize, Vec<usize>)>,
    lookup: HashMap<(usize, Vec<usize>), MorphismId>,
}

fn object_name(n: usize) -> String {
    format!("A^{n}")
}

fn morphism_name(cl: &AbstractClone, n: usize, ops: &[usize]) -> String {
    let names: Vec<&str> = ops.iter().map(|&w| cl.ops(n)[w].as_str()).collect();
    format!("{n}>{}:<{}>", ops.len(), names.join(";"))
}

pub fn theory_of(cl: &AbstractClone) -> Result<AlgebraicTheory> {
    let v = validate_clone(cl);
    if !v.is_empty() {
        return Err(Error::InvalidClone(v));
    }
    let rank = cl.rank();
    let objects: Vec<String> = (0..rank).map(object_name).collect();
    let mut morphisms = Vec::new();
    let mut raw: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut index: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
    for n in 0..rank {
        for m in 0..rank {
            for ops in tuples(&vec![cl.num_ops(n); m]) {
                index.insert((n, ops.clone()), morphisms.len());
                morphisms.push((morphism_name(cl, n, &ops), n, m));
                raw.push((n, ops));
            }
        }
    }
    let identities = (0..rank).map(|n| index[&(n, (0..n).map(|i| cl.proj(n, i)).collect::<Vec<_>>())]).collect();
    let category = FinCategory::from_parts(objects, morphisms, identities, |g, f| {
        let (n, omega) = &raw[f];
        let (_, psi) = &raw[g];
        let composite: Vec<usize> = psi.iter().map(|&p| cl.subst(p, *n, omega)).collect();
        index.get(&(*n, composite)).copied()
    })?;
    let category = Arc::new(category);

    let object_ids: Vec<ObjectId> = (0..rank).map(|n| category.object(&object_name(n)).expect("object")).collect();
    let mut arity_of = vec![0; rank];
    for (n, o) in object_ids.iter().enumerate() {
        arity_of[o.0] = n;
    }
    let mut operations = vec![(0, Vec::new()); category.num_morphisms()];
    let mut lookup = HashMap::new();
    for (n, ops) in raw {
        let id = category.morphism(&morphism_name(cl, n, &ops)).expect("morphism");
        lookup.insert((n, ops.clone()), id);
        operations[id.0] = (n, ops);
    }

    let finset = finset_op(rank)?;
    let fc = finset.category.clone();
    let on_objects = fc.objects().map(|o| object_ids[finset.arity(o)]).collect();
    let on_morphisms = fc
        .morphisms()
        .map(|m| {
            let (n, _, f) = finset.function(m);
            let ops: Vec<usize> = f.iter().map(|&i| cl.proj(n, i)).collect();
            lookup[&(n, ops)]
        })
        .collect();
    let embedding = Functor::new(fc.clone(), category.clone(), on_objects, on_morphisms)?;

    let mut witnesses = WitnessTable::new();
    for w in finset.witnesses.witnesses() {
        let image = ProductWitness {
            factors: w.factors.iter().map(|&o| embedding.object(o)).collect(),
            apex: embedding.object(w.apex),
            projections: w.projections.iter().map(|&p| embedding.morphism(p)).collect(),
        };
        if !check_product_witness(&category, &image) {
            return Err(Error::MissingWitness(format!(
                "image of the product witness over {:?} is not a product",
                w.factors.iter().map(|&o| finset.arity(o)).collect::<Vec<_>>()
            )));
        }
        witnesses.insert(image);
    }
    Ok(AlgebraicTheory {
        clone: cl.clone(),
        category,
        finset,
        embedding,
        witnesses,
        objects: object_ids,
        arity_of,
        operations,
        lookup,
    })
}

impl AlgebraicTheory {
    pub fn rank(&self) -> usize {
        self.clone.rank()
    }

    /// The object `A^n`.
    pub fn object(&self, n: usize) -> ObjectId {
        self.objects[n]
    }

    pub fn arity(&self, o: ObjectId) -> usize {
        self.arity_of[o.0]
    }

    /// `(n, (w_1, .., w_m))` for a morphism `A^n -> A^m`.
    pub fn operations(&self, m: MorphismId) -> (usize, &[usize]) {
        let (n, ops) = &self.operations[m.0];
        (*n, ops)
    }

    /// The morphism `A^n -> A^{ops.len()}` with the given components.
    pub fn morphism(&self, n: usize, ops: &[usize]) -> MorphismId {
        self.lookup[&(n, ops.to_vec())]
    }

    /// Witness for `A^{n_1} x .. x A^{n_k}`.
    pub fn witness(&self, parts: &[usize]) -> Option<&ProductWitness> {
        let factors: Vec<ObjectId> = parts.iter().map(|&n| self.object(n)).collect();
        self.witnesses.get(&factors)
    }

    /// `A^phi` for a function `phi: m -> n`, a morphism `A^n -> A^m`.
    pub fn power(&self, n: usize, phi: &[usize]) -> MorphismId {
        let ops: Vec<usize> = phi.iter().map(|&i| self.clone.proj(n, i)).collect();
        self.morphism(n, &ops)
    }

    /// `Delta_n: A^1 -> A^n`.
    pub fn diagonal(&self, n: usize) -> MorphismId {
        self.power(1, &vec![0; n])
    }
}

/// Tuples over a finite set indexed both ways, per arity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Powers {
    tuples: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
    names: Vec<Vec<String>>,
}

impl Powers {
    /// All tuples of length `< rank` over `names`, each arity sorted by the
    /// rendered tuple name.
    pub fn new(names: &[String], rank: usize) -> Self {
        let mut all_tuples = Vec::with_capacity(rank);
        let mut all_index = Vec::with_capacity(rank);
        let mut all_names = Vec::with_capacity(rank);
        for n in 0..rank {
            let mut entries: Vec<(String, Vec<usize>)> = tuples(&vec![names.len(); n])
                .map(|t| {
                    let parts: Vec<&str> = t.iter().map(|&i| names[i].as_str()).collect();
                    (format!("({})", parts.join(",")), t)
                })
                .collect();
            entries.sort();
            all_index.push(entries.iter().enumerate().map(|(i, (_, t))| (t.clone(), i)).collect());
            all_names.push(entries.iter().map(|(s, _)| s.clone()).collect());
            all_tuples.push(entries.into_iter().map(|(_, t)| t).collect());
        }
        Powers { tuples: all_tuples, index: all_index, names: all_names }
    }

    pub fn tuple(&self, n: usize, i: usize) -> &[usize] {
        &self.tuples[n][i]
    }

    pub fn index(&self, n: usize, t: &[usize]) -> usize {
        self.index[n][t]
    }

    pub fn len(&self, n: usize) -> usize {
        self.tuples[n].len()
    }

    pub fn names(&self, n: usize) -> &[String] {
        &self.names[n]
    }
}

/// `X^(-)` on the truncated opposite of finite sets: `n |-> X^n`, a
/// function `phi: m -> n` acting by `x |-> x . phi`.
pub fn power_functor(finset: &FinSetOp, x0: &[String]) -> (SetFunctor, Powers) {
    let powers = Powers::new(x0, finset.rank());
    let c = finset.category.clone();
    let sets = c.objects().map(|o| powers.names(finset.arity(o)).to_vec()).collect();
    let maps = c
        .morphisms()
        .map(|m| {
            let (n, k, f) = finset.function(m);
            (0..powers.len(n))
                .map(|i| {
                    let x = powers.tuple(n, i);
                    let y: Vec<usize> = f.iter().map(|&j| x[j]).collect();
                    debug_assert_eq!(y.len(), k);
                    powers.index(k, &y)
                })
                .collect()
        })
        .collect();
    (SetFunctor::from_sorted(c, sets, maps), powers)
}

/// A product-preserving set functor on a theory, with its carrier `Y(A^1)`
/// and the product bijections `Y(A^m) ~ Y(A^1)^m`.
#[derive(Debug, Clone)]
pub struct Algebra {
    pub theory: Arc<AlgebraicTheory>,
    pub functor: SetFunctor,
    tuples: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
}

impl Algebra {
    /// Checks product preservation at every witness of the theory.
    pub fn new(theory: Arc<AlgebraicTheory>, functor: SetFunctor) -> Result<Self> {
        if **functor.base() != *theory.category {
            return Err(Error::ShapeMismatch("algebra does not live on the theory".into()));
        }
        if let Some(w) = preserves_all(&functor, &theory.witnesses)? {
            let parts: Vec<usize> = w.factors.iter().map(|&o| theory.arity(o)).collect();
            return Err(Error::InvalidArgument(format!("set functor does not preserve the product {parts:?}")));
        }
        let mut tuples_by_arity = Vec::with_capacity(theory.rank());
        let mut index = Vec::with_capacity(theory.rank());
        for m in 0..theory.rank() {
            let w = theory.witness(&vec![1; m]).expect("witness of a power of A^1");
            let ts: Vec<Vec<usize>> = (0..functor.size(w.apex))
                .map(|y| w.projections.iter().map(|&p| functor.table(p)[y]).collect())
                .collect();
            index.push(ts.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect());
            tuples_by_arity.push(ts);
        }
        Ok(Algebra { theory, functor, tuples: tuples_by_arity, index })
    }

    /// Builds `Y(A^m) = S^m`, an operation tuple acting componentwise
    /// through `interpret(n, w, args)`. Also returns the position of each
    /// element of `carrier` in the algebra's (sorted) carrier.
    pub fn from_interpretation<I>(
        theory: Arc<AlgebraicTheory>,
        carrier: &[String],
        interpret: I,
    ) -> Result<(Self, Vec<usize>)>
    where
        I: Fn(usize, usize, &[usize]) -> usize,
    {
        let powers = Powers::new(carrier, theory.rank());
        let c = theory.category.clone();
        let sets = c.objects().map(|o| powers.names(theory.arity(o)).to_vec()).collect();
        let maps = c
            .morphisms()
            .map(|m| {
                let (n, ops) = theory.operations(m);
                (0..powers.len(n))
                    .map(|i| {
                        let v = powers.tuple(n, i);
                        let out: Vec<usize> = ops.iter().map(|&w| interpret(n, w, v)).collect();
                        powers.index(ops.len(), &out)
                    })
                    .collect()
            })
            .collect();
        let functor = SetFunctor::new(c, sets, maps)?;
        let positions = (0..carrier.len()).map(|i| powers.index(1, &[i])).collect();
        Ok((Algebra::new(theory, functor)?, positions))
    }

    pub fn carrier(&self) -> &[String] {
        self.functor.set(self.theory.object(1))
    }

    pub fn carrier_size(&self) -> usize {
        self.functor.size(self.theory.object(1))
    }

    /// Components of an element of `Y(A^m)`.
    pub fn tuple(&self, m: usize, y: usize) -> &[usize] {
        &self.tuples[m][y]
    }

    /// The element of `Y(A^m)` with the given components.
    pub fn element(&self, t: &[usize]) -> usize {
        self.index[t.len()][t]
    }

    /// `w(args)` for an `n`-ary operation `w`, `n = args.len()`.
    pub fn apply(&self, w: usize, args: &[usize]) -> usize {
        let n = args.len();
        let m = self.theory.morphism(n, &[w]);
        self.functor.table(m)[self.element(args)]
    }
}

/// `X^(-)` as an algebra for the trivial theory of the given rank.
pub fn restricted_hom(x0: &[String], rank: usize) -> Result<Algebra> {
    let theory = Arc::new(theory_of(&trivial(rank)?)?);
    let cl = theory.clone.clone();
    // the n-ary operations of the trivial clone are exactly the projections
    let var: Vec<Vec<usize>> = (0..rank)
        .map(|n| (0..cl.num_ops(n)).map(|w| (0..n).find(|&i| cl.proj(n, i) == w).expect("projection")).collect())
        .collect();
    Ok(Algebra::from_interpretation(theory, x0, |n, w, args| args[var[n][w]])?.0)
}

/// Theory morphism between clones of equal rank sending each operation to
/// the operation of the same name.
pub fn theory_inclusion(from: &AlgebraicTheory, to: &AlgebraicTheory) -> Result<Functor> {
    if from.rank() != to.rank() {
        return Err(Error::ShapeMismatch("theories of different rank".into()));
    }
    let (fc, tc) = (&from.clone, &to.clone);
    let op_map: Vec<Vec<usize>> = (0..from.rank())
        .map(|n| {
            fc.ops(n)
                .iter()
                .map(|s| tc.op(n, s).ok_or_else(|| Error::UnknownMorphism(format!("operation {s} of arity {n}"))))
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    let src = from.category.clone();
    let on_objects = src.objects().map(|o| to.object(from.arity(o))).collect();
    let on_morphisms = src
        .morphisms()
        .map(|m| {
            let (n, ops) = from.operations(m);
            let image: Vec<usize> = ops.iter().map(|&w| op_map[n][w]).collect();
            to.morphism(n, &image)
        })
        .collect();
    Functor::new(src, to.category.clone(), on_objects, on_morphisms)
}

/// `omega |-> omega x 1_{A^1}` from the rank `N-1` truncation into `T`.
#[derive(Debug, Clone)]
pub struct ShiftFunctor {
    pub source: Arc<AlgebraicTheory>,
    pub functor: Functor,
    /// Whether the image of `A^0` is terminal (it never is).
    pub preserves_terminal: bool,
}

pub fn shift_functor(t: &AlgebraicTheory) -> Result<ShiftFunctor> {
    let rank = t.rank();
    if rank < 2 {
        return Err(Error::InvalidArgument("the shift functor needs rank at least 2".into()));
    }
    let cl = &t.clone;
    let source = Arc::new(theory_of(&cl.truncate(rank - 1)?)?);
    let src = source.category.clone();
    let on_objects = src.objects().map(|o| t.object(source.arity(o) + 1)).collect();
    let on_morphisms = src
        .morphisms()
        .map(|m| {
            let (n, ops) = source.operations(m);
            let inclusion: Vec<usize> = (0..n).collect();
            let mut image: Vec<usize> = ops.iter().map(|&w| cl.rename(w, n + 1, &inclusion)).collect();
            image.push(cl.proj(n + 1, n));
            t.morphism(n + 1, &image)
        })
        .collect();
    let functor = Functor::new(src, t.category.clone(), on_objects, on_morphisms)?;
    let terminal = ProductWitness { factors: vec![], apex: functor.object(source.object(0)), projections: vec![] };
    let preserves_terminal = check_product_witness(&t.category, &terminal);
    Ok(ShiftFunctor { source, functor, preserves_terminal })
}
