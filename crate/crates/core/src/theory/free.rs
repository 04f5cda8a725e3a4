use std::collections::HashMap;
use std::sync::Arc;

use super::algebraic::{power_functor, Algebra, AlgebraicTheory, Powers};
use crate::error::{Error, Result};
use crate::fincat::{tuples, ObjectId};
use crate::kan::{lan, KanPoint, KanResult};
use crate::par;
use crate::setval::{Check, Partition, Relation};

/// `(n, omega, x)`: an `m`-tuple of `n`-ary operations and `x: n -> X0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub n: usize,
    pub ops: Vec<usize>,
    pub x: Vec<usize>,
}

/// `Lan_A X^(-)` with its product certificate, generators and the triple
/// bookkeeping of the underlying colimits.
#[derive(Debug, Clone)]
pub struct FreeAlgebra {
    pub algebra: Algebra,
    pub kan: KanResult,
    pub generators: Vec<String>,
    powers: Powers,
    // canonical representative per object and element
    representatives: Vec<Vec<Triple>>,
}

// arity, operation tuple in radix order, generator tuple
type RepresentativeKey = (usize, usize, Vec<usize>);

pub fn free_algebra(theory: Arc<AlgebraicTheory>, generators: &[String]) -> Result<FreeAlgebra> {
    let rank = theory.rank();
    if generators.len() >= rank {
        return Err(Error::ArityOverflow { arity: generators.len(), rank });
    }
    let (x, powers) = power_functor(&theory.finset, generators);
    let kan = lan(&theory.embedding, &x)?;
    let algebra = Algebra::new(theory.clone(), kan.functor.clone())?;
    let mut fr = FreeAlgebra { algebra, kan, generators: generators.to_vec(), powers, representatives: Vec::new() };
    let objects: Vec<usize> = (0..rank).collect();
    fr.representatives = par::map(&objects, |&m| {
        let point = fr.point(m);
        let mut best: Vec<Option<(RepresentativeKey, Triple)>> = vec![None; point.num_classes()];
        for i in 0..point.partition.len() {
            let t = fr.triple(m, i);
            let key = (t.n, radix(&t.ops, theory.clone.num_ops(t.n)), t.x.clone());
            let slot = &mut best[point.partition.class_of(i)];
            if slot.as_ref().is_none_or(|(k, _)| key < *k) {
                *slot = Some((key, t));
            }
        }
        let mut reps = vec![None; point.num_classes()];
        for (class, b) in best.into_iter().enumerate() {
            reps[fr.kan.element_of_class(theory.object(m), class)] = b.map(|(_, t)| t);
        }
        reps.into_iter().map(|t| t.expect("nonempty class")).collect()
    });
    Ok(fr)
}

fn radix(digits: &[usize], r: usize) -> usize {
    digits.iter().fold(0, |acc, &d| acc * r + d)
}

impl FreeAlgebra {
    pub fn theory(&self) -> &Arc<AlgebraicTheory> {
        &self.algebra.theory
    }

    pub fn point(&self, m: usize) -> &KanPoint {
        &self.kan.points[self.theory().object(m).0]
    }

    fn object(&self, m: usize) -> ObjectId {
        self.theory().object(m)
    }

    pub fn num_triples(&self, m: usize) -> usize {
        self.point(m).partition.len()
    }

    /// Number of elements of `Fr(X0)(A^m)`.
    pub fn size(&self, m: usize) -> usize {
        self.algebra.functor.size(self.object(m))
    }

    pub fn sizes(&self) -> Vec<usize> {
        (0..self.theory().rank()).map(|m| self.size(m)).collect()
    }

    pub fn triple(&self, m: usize, i: usize) -> Triple {
        let t = self.theory();
        let (b, z, xi) = self.point(m).triple(i);
        let n = t.finset.arity(b);
        Triple { n, ops: t.operations(z).1.to_vec(), x: self.powers.tuple(n, xi).to_vec() }
    }

    /// Flat index of a triple at `A^m`, `m = ops.len()`.
    pub fn index_of(&self, t: &Triple) -> Result<usize> {
        let th = self.theory();
        let m = t.ops.len();
        let well_formed = t.n < th.rank()
            && m < th.rank()
            && t.x.len() == t.n
            && t.ops.iter().all(|&w| w < th.clone.num_ops(t.n))
            && t.x.iter().all(|&g| g < self.generators.len());
        if !well_formed {
            return Err(Error::InvalidArgument(format!("malformed triple {t:?}")));
        }
        let z = th.morphism(t.n, &t.ops);
        let xi = self.powers.index(t.n, &t.x);
        Ok(self.point(m).index_of(th.finset.object(t.n), z, xi).expect("triple in the comma category"))
    }

    /// The element of `Fr(X0)(A^m)` a triple represents.
    pub fn element_of(&self, t: &Triple) -> Result<usize> {
        let m = t.ops.len();
        let i = self.index_of(t)?;
        Ok(self.kan.element_of_class(self.object(m), self.point(m).partition.class_of(i)))
    }

    /// Element of the flat triple index `i` at `A^m`.
    pub fn element_of_index(&self, m: usize, i: usize) -> usize {
        self.kan.element_of_class(self.object(m), self.point(m).partition.class_of(i))
    }

    /// Least triple of an element under `(n, operation tuple, x)`.
    pub fn representative(&self, m: usize, element: usize) -> &Triple {
        &self.representatives[m][element]
    }

    /// `[1, id, x]` in the carrier.
    pub fn unit(&self, generator: usize) -> usize {
        let cl = &self.theory().clone;
        self.element_of(&Triple { n: 1, ops: vec![cl.proj(1, 0)], x: vec![generator] })
            .expect("unit triple")
    }

    /// `omega(args)` in the carrier through the extension's action and the
    /// product bijection.
    pub fn action(&self, omega: usize, args: &[usize]) -> usize {
        self.algebra.apply(omega, args)
    }

    /// The element table of the partition at `A^m` as a partition of
    /// triple indices.
    pub fn partition(&self, m: usize) -> &Partition {
        &self.point(m).partition
    }
}

/// `omega . (omega_1 x .. x omega_k)` on concatenated variables with
/// concatenated assignments.
pub fn op_action_concat_triples(fr: &FreeAlgebra, omega: usize, parts: &[Triple]) -> Result<usize> {
    let th = fr.theory();
    let cl = &th.clone;
    let total: usize = parts.iter().map(|t| t.n).sum();
    if total >= th.rank() {
        return Err(Error::ArityOverflow { arity: total, rank: th.rank() });
    }
    if parts.len() >= th.rank() || omega >= cl.num_ops(parts.len()) || parts.iter().any(|t| t.ops.len() != 1) {
        return Err(Error::InvalidArgument("operation arity does not match the family".into()));
    }
    let mut shifted = Vec::with_capacity(parts.len());
    let mut x = Vec::with_capacity(total);
    let mut offset = 0;
    for t in parts {
        let map: Vec<usize> = (offset..offset + t.n).collect();
        shifted.push(cl.rename(t.ops[0], total, &map));
        x.extend_from_slice(&t.x);
        offset += t.n;
    }
    let op = cl.subst(omega, total, &shifted);
    fr.element_of(&Triple { n: total, ops: vec![op], x })
}

/// The concatenation formula on carrier elements, using canonical
/// representatives.
pub fn op_action_concat(fr: &FreeAlgebra, omega: usize, args: &[usize]) -> Result<usize> {
    let parts: Vec<Triple> = args.iter().map(|&a| fr.representative(1, a).clone()).collect();
    op_action_concat_triples(fr, omega, &parts)
}

/// The span description of the one-step relation, searched literally:
/// some `nbar < N`, `phi: n -> nbar`, `psi: n' -> nbar` and `xbar` with
/// `xbar . phi = x`, `xbar . psi = x'` and `omega . A^phi = omega' . A^psi`.
pub fn relation_check(fr: &FreeAlgebra, a: &Triple, b: &Triple) -> Result<bool> {
    fr.index_of(a)?;
    fr.index_of(b)?;
    if a.ops.len() != b.ops.len() {
        return Err(Error::ShapeMismatch("triples at different objects".into()));
    }
    let cl = &fr.theory().clone;
    let k = fr.generators.len();
    for nbar in 0..fr.theory().rank() {
        for phi in tuples(&vec![nbar; a.n]) {
            let lhs: Vec<usize> = a.ops.iter().map(|&w| cl.rename(w, nbar, &phi)).collect();
            for psi in tuples(&vec![nbar; b.n]) {
                if b.ops.iter().map(|&w| cl.rename(w, nbar, &psi)).ne(lhs.iter().copied()) {
                    continue;
                }
                let found = tuples(&vec![k; nbar]).any(|xbar| {
                    phi.iter().zip(&a.x).all(|(&i, &g)| xbar[i] == g) && psi.iter().zip(&b.x).all(|(&i, &g)| xbar[i] == g)
                });
                if found {
                    return Ok(true);
                }
            }
        }
    }
    Ok(false)
}

/// The span relation at `A^m` over flat triple indices, built by grouping
/// triples under their common apex `(nbar, theta, xbar)`.
pub fn literal_relation(fr: &FreeAlgebra, m: usize) -> Relation {
    let th = fr.theory();
    let cl = &th.clone;
    let k = fr.generators.len();
    let mut rel = Relation::empty(fr.num_triples(m));
    for nbar in 0..th.rank() {
        let xbars: Vec<Vec<usize>> = tuples(&vec![k; nbar]).collect();
        let mut groups: HashMap<(usize, Vec<usize>), Vec<usize>> = HashMap::new();
        for n in 0..th.rank() {
            for phi in tuples(&vec![nbar; n]) {
                for omega in tuples(&vec![cl.num_ops(n); m]) {
                    let theta: Vec<usize> = omega.iter().map(|&w| cl.rename(w, nbar, &phi)).collect();
                    for (xi, xbar) in xbars.iter().enumerate() {
                        let x: Vec<usize> = phi.iter().map(|&i| xbar[i]).collect();
                        let t = Triple { n, ops: omega.clone(), x };
                        groups.entry((xi, theta.clone())).or_default().push(fr.index_of(&t).expect("triple"));
                    }
                }
            }
        }
        for group in groups.values() {
            for &i in group {
                for &j in group {
                    rel.insert(i, j);
                }
            }
        }
    }
    rel
}

/// `[n, omega, x] |-> omega . Delta_n`, defined when `X0` is a singleton.
pub fn fr1_inverse(fr: &FreeAlgebra, element: usize) -> Result<usize> {
    if fr.generators.len() != 1 {
        return Err(Error::InvalidArgument(format!("expected one generator, got {}", fr.generators.len())));
    }
    let cl = &fr.theory().clone;
    let t = fr.representative(1, element);
    Ok(cl.subst(t.ops[0], 1, &vec![cl.proj(1, 0); t.n]))
}

/// `u |-> [1, u, *]` for a unary operation `u`.
pub fn fr1_insert(fr: &FreeAlgebra, unary: usize) -> Result<usize> {
    if fr.generators.len() != 1 {
        return Err(Error::InvalidArgument(format!("expected one generator, got {}", fr.generators.len())));
    }
    fr.element_of(&Triple { n: 1, ops: vec![unary], x: vec![0] })
}

/// Both composites of `fr1_inverse` and `fr1_insert` are identities; the
/// counterexample is a carrier element or a unary operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fr1Failure {
    Element(usize),
    Operation(usize),
}

pub fn fr1_check(fr: &FreeAlgebra) -> Result<Check<Fr1Failure>> {
    let ops = fr.theory().clone.num_ops(1);
    for e in 0..fr.size(1) {
        if fr1_insert(fr, fr1_inverse(fr, e)?)? != e {
            return Ok(Check::Fails(Fr1Failure::Element(e)));
        }
    }
    for u in 0..ops {
        if fr1_inverse(fr, fr1_insert(fr, u)?)? != u {
            return Ok(Check::Fails(Fr1Failure::Operation(u)));
        }
    }
    Ok(Check::Holds)
}
