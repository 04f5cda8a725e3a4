use std::collections::HashMap;
use std::sync::Arc;

use super::product::tuples;
use super::{FinCategory, MorphismId, ObjectId, ProductWitness, WitnessTable};
use crate::error::{Error, Result};

/// Largest supported truncation rank; keeps object ids single digits.
pub const MAX_RANK: usize = 9;

/// The opposite of the skeletal category of finite sets `{0, .., N-1}`.
///
/// A morphism `n -> m` is stored as a function `m -> n` (a list of `m`
/// values below `n`), named `n>m:[v0,v1,..]`. Composition `g . f` for
/// `f: a -> b`, `g: b -> c` is the function `i |-> f[g[i]]`.
#[derive(Debug, Clone)]
pub struct FinSetOp {
    pub category: Arc<FinCategory>,
    pub witnesses: WitnessTable,
    rank: usize,
    object_of_arity: Vec<ObjectId>,
    functions: Vec<(usize, usize, Vec<usize>)>,
    lookup: HashMap<(usize, Vec<usize>), MorphismId>,
}

pub fn finset_op(rank: usize) -> Result<FinSetOp> {
    FinSetOp::new(rank)
}

fn function_name(n: usize, m: usize, f: &[usize]) -> String {
    let vals: Vec<String> = f.iter().map(|v| v.to_string()).collect();
    format!("{n}>{m}:[{}]", vals.join(","))
}

impl FinSetOp {
    pub fn new(rank: usize) -> Result<Self> {
        if rank < 1 {
            return Err(Error::InvalidArgument("truncation rank must be at least 1".into()));
        }
        if rank > MAX_RANK {
            return Err(Error::InvalidArgument(format!("truncation rank above {MAX_RANK} is not supported")));
        }
        let objects: Vec<String> = (0..rank).map(|n| n.to_string()).collect();
        let mut morphisms = Vec::new();
        let mut funcs = Vec::new();
        let mut index: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        for n in 0..rank {
            for m in 0..rank {
                for f in tuples(&vec![n; m]) {
                    index.insert((n, f.clone()), morphisms.len());
                    morphisms.push((function_name(n, m, &f), n, m));
                    funcs.push((n, m, f));
                }
            }
        }
        let identities = (0..rank).map(|n| index[&(n, (0..n).collect::<Vec<_>>())]).collect();
        let category = FinCategory::from_parts(objects, morphisms, identities, |g, f| {
            let (a, _, ff) = &funcs[f];
            let (_, _, gg) = &funcs[g];
            let h: Vec<usize> = gg.iter().map(|&i| ff[i]).collect();
            index.get(&(*a, h)).copied()
        })?;
        let category = Arc::new(category);

        let object_of_arity: Vec<ObjectId> =
            (0..rank).map(|n| category.object(&n.to_string()).expect("arity object")).collect();
        let mut functions = vec![(0, 0, Vec::new()); category.num_morphisms()];
        let mut lookup = HashMap::new();
        for (n, m, f) in funcs {
            let id = category.morphism(&function_name(n, m, &f)).expect("function morphism");
            lookup.insert((n, f.clone()), id);
            functions[id.0] = (n, m, f);
        }
        let mut fs = FinSetOp {
            category,
            witnesses: WitnessTable::new(),
            rank,
            object_of_arity,
            functions,
            lookup,
        };
        for parts in arity_tuples(rank) {
            let w = fs.coproduct_witness(&parts);
            fs.witnesses.insert(w);
        }
        Ok(fs)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn object(&self, n: usize) -> ObjectId {
        self.object_of_arity[n]
    }

    pub fn arity(&self, o: ObjectId) -> usize {
        self.object_of_arity.iter().position(|&x| x == o).expect("object of finset_op")
    }

    /// `(n, m, f)` for a morphism `n -> m` stored as `f: m -> n`.
    pub fn function(&self, m: MorphismId) -> (usize, usize, &[usize]) {
        let (n, k, f) = &self.functions[m.0];
        (*n, *k, f)
    }

    /// The morphism `n -> f.len()` represented by `f`.
    pub fn morphism(&self, n: usize, f: &[usize]) -> Option<MorphismId> {
        self.lookup.get(&(n, f.to_vec())).copied()
    }

    /// Product witness for `(n_1, .., n_k)`: apex `sum n_i`, projections the
    /// coproduct inclusions of finite sets. Panics if the sum reaches the rank.
    fn coproduct_witness(&self, parts: &[usize]) -> ProductWitness {
        let total: usize = parts.iter().sum();
        let mut offset = 0;
        let mut projections = Vec::new();
        for &p in parts {
            let inclusion: Vec<usize> = (offset..offset + p).collect();
            projections.push(self.morphism(total, &inclusion).expect("inclusion below rank"));
            offset += p;
        }
        ProductWitness {
            factors: parts.iter().map(|&p| self.object(p)).collect(),
            apex: self.object(total),
            projections,
        }
    }

    /// The witness for a tuple of arities, if its sum is below the rank.
    pub fn witness(&self, parts: &[usize]) -> Option<&ProductWitness> {
        let factors: Vec<ObjectId> = parts.iter().map(|&p| self.object(p)).collect();
        self.witnesses.get(&factors)
    }
}

/// Tuples `(n_1, .., n_k)` with `k <= rank` and `sum n_i < rank`.
pub(crate) fn arity_tuples(rank: usize) -> Vec<Vec<usize>> {
    let mut all = Vec::new();
    for k in 0..=rank {
        for t in tuples(&vec![rank; k]) {
            if t.iter().sum::<usize>() < rank {
                all.push(t);
            }
        }
    }
    all
}
