use super::{comma, CommaCategory};
use crate::error::{Error, Result};
use crate::fincat::{product_category, Functor, MorphismId, ObjectId, ProductCategory, ProductWitness, WitnessTable};
use crate::par;
use crate::setval::Check;

/// The commas `F/c_i`, their product, the comma `F/(prod c_i)` and the
/// functors `W` (product to comma) and `L` (comma to product) between them.
#[derive(Debug, Clone)]
pub struct ProductComma {
    pub commas: Vec<CommaCategory>,
    pub product: ProductCategory,
    pub target: CommaCategory,
    pub w: Functor,
    pub l: Functor,
}

/// Builds `W` and `L` for the factors of `c_witness`. `b_witnesses` must
/// contain a witness for every tuple `(b_1, .., b_k)` that occurs.
pub fn product_comma(f: &Functor, b_witnesses: &WitnessTable, c_witness: &ProductWitness) -> Result<ProductComma> {
    let (bc, cc) = (f.source(), f.target());
    let commas: Vec<CommaCategory> = c_witness.factors.iter().map(|&c| comma(f, c)).collect::<Result<_>>()?;
    let product = product_category(&commas.iter().map(|k| k.category.clone()).collect::<Vec<_>>());
    let target = comma(f, c_witness.apex)?;
    let pc = product.category.clone();

    // W on objects: (b_i, z_i) |-> (prod b_i, <z_i . F p_i>)
    let w_objects: Vec<ObjectId> = pc
        .objects()
        .map(|o| {
            let pairs: Vec<_> = product.object_tuple(o).iter().zip(&commas).map(|(&x, k)| k.pair(x)).collect();
            let bs: Vec<ObjectId> = pairs.iter().map(|p| p.0).collect();
            let wb = b_witnesses.require(bc, &bs)?;
            let cone: Vec<MorphismId> =
                pairs.iter().zip(&wb.projections).map(|(&(_, z), &p)| cc.compose(z, f.morphism(p))).collect();
            let z = c_witness
                .mediate(cc, f.object(wb.apex), &cone)
                .ok_or_else(|| Error::MissingWitness("target witness has no mediating morphism".into()))?;
            target.object_of(wb.apex, z).ok_or_else(|| Error::IllDefined("W object outside the comma".into()))
        })
        .collect::<Result<_>>()?;
    let w_morphisms: Vec<MorphismId> = pc
        .morphisms()
        .map(|m| {
            let (s, e) = (pc.dom(m), pc.cod(m));
            let src: Vec<ObjectId> =
                product.object_tuple(s).iter().zip(&commas).map(|(&x, k)| k.pair(x).0).collect();
            let dst: Vec<ObjectId> =
                product.object_tuple(e).iter().zip(&commas).map(|(&x, k)| k.pair(x).0).collect();
            let (ws, we) = (b_witnesses.require(bc, &src)?, b_witnesses.require(bc, &dst)?);
            let cone: Vec<MorphismId> = product
                .morphism_tuple(m)
                .iter()
                .zip(&commas)
                .zip(&ws.projections)
                .map(|((&x, k), &p)| bc.compose(k.forget.morphism(x), p))
                .collect();
            let under = we
                .mediate(bc, ws.apex, &cone)
                .ok_or_else(|| Error::MissingWitness("source witness has no mediating morphism".into()))?;
            let z = target.pair(w_objects[e.0]).1;
            target.morphism_of(under, z).ok_or_else(|| Error::IllDefined("W morphism outside the comma".into()))
        })
        .collect::<Result<_>>()?;
    let w = Functor::new(pc.clone(), target.category.clone(), w_objects, w_morphisms)?;

    // L: (b, z) |-> (b, pi_i . z)_i
    let tc = target.category.clone();
    let l_objects: Vec<ObjectId> = tc
        .objects()
        .map(|o| {
            let (b, z) = target.pair(o);
            let parts: Vec<ObjectId> = commas
                .iter()
                .zip(&c_witness.projections)
                .map(|(k, &pi)| k.object_of(b, cc.compose(pi, z)).expect("component lies in its comma"))
                .collect();
            product.object_of(&parts).expect("tuple of comma objects")
        })
        .collect();
    let l_morphisms: Vec<MorphismId> = tc
        .morphisms()
        .map(|m| {
            let under = target.forget.morphism(m);
            let z = target.pair(tc.cod(m)).1;
            let parts: Vec<MorphismId> = commas
                .iter()
                .zip(&c_witness.projections)
                .map(|(k, &pi)| k.morphism_of(under, cc.compose(pi, z)).expect("component lies in its comma"))
                .collect();
            product.morphism_of(&parts).expect("tuple of comma morphisms")
        })
        .collect();
    let l = Functor::new(tc, pc, l_objects, l_morphisms)?;
    Ok(ProductComma { commas, product, target, w, l })
}

pub fn build_w(f: &Functor, b_witnesses: &WitnessTable, c_witness: &ProductWitness) -> Result<Functor> {
    Ok(product_comma(f, b_witnesses, c_witness)?.w)
}

pub fn build_l(f: &Functor, b_witnesses: &WitnessTable, c_witness: &ProductWitness) -> Result<Functor> {
    Ok(product_comma(f, b_witnesses, c_witness)?.l)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AdjunctionFailure {
    /// No morphism `d -> W L d` is universal from `d` to `W`.
    NoUniversalArrow(ObjectId),
    /// Universal arrows exist at every object but none can be chosen naturally.
    NotNatural,
}

fn universal_candidates(l: &Functor, w: &Functor, d: ObjectId) -> Vec<MorphismId> {
    let (dc, cc) = (l.source(), l.target());
    let ld = l.object(d);
    dc.hom(d, w.object(ld))
        .iter()
        .copied()
        .filter(|&eta| {
            cc.objects().all(|c| {
                let (from, to) = (cc.hom(ld, c), dc.hom(d, w.object(c)));
                if from.len() != to.len() {
                    return false;
                }
                let mut seen = vec![false; to.len()];
                from.iter().all(|&g| {
                    let i = dc.hom_position(dc.compose(w.morphism(g), eta));
                    !std::mem::replace(&mut seen[i], true)
                })
            })
        })
        .collect()
}

/// A natural unit `d -> W L d` making `g |-> W g . eta_d` bijective, if any.
pub fn find_unit(l: &Functor, w: &Functor) -> Result<std::result::Result<Vec<MorphismId>, AdjunctionFailure>> {
    if l.source() != w.target() || l.target() != w.source() {
        return Err(Error::ShapeMismatch("L and W are not opposed".into()));
    }
    let dc = l.source().clone();
    let candidates: Vec<Vec<MorphismId>> = par::map_range(dc.num_objects(), |d| universal_candidates(l, w, ObjectId(d)));
    if let Some(d) = candidates.iter().position(|c| c.is_empty()) {
        return Ok(Err(AdjunctionFailure::NoUniversalArrow(ObjectId(d))));
    }
    let natural_at = |h: MorphismId, unit: &[Option<MorphismId>]| -> bool {
        let (s, e) = (dc.dom(h), dc.cod(h));
        match (unit[s.0], unit[e.0]) {
            (Some(a), Some(b)) => dc.compose(w.morphism(l.morphism(h)), a) == dc.compose(b, h),
            _ => true,
        }
    };
    let mut unit: Vec<Option<MorphismId>> = vec![None; dc.num_objects()];
    let mut choice = vec![0usize; dc.num_objects()];
    let mut d = 0;
    loop {
        if d == dc.num_objects() {
            return Ok(Ok(unit.into_iter().map(|u| u.expect("assigned")).collect()));
        }
        if choice[d] < candidates[d].len() {
            unit[d] = Some(candidates[d][choice[d]]);
            choice[d] += 1;
            let o = ObjectId(d);
            let ok = dc.objects().all(|x| {
                dc.hom(o, x).iter().chain(dc.hom(x, o)).all(|&h| natural_at(h, &unit))
            });
            if ok {
                d += 1;
            }
        } else {
            unit[d] = None;
            choice[d] = 0;
            if d == 0 {
                return Ok(Err(AdjunctionFailure::NotNatural));
            }
            d -= 1;
            unit[d] = None;
        }
    }
}

/// Decides `L -| W`: a natural bijection `hom(L d, c) ~ hom(d, W c)`.
///
/// The bijection is searched for through its unit and then re-verified
/// directly, including naturality in both variables.
pub fn check_adjunction(l: &Functor, w: &Functor) -> Result<Check<AdjunctionFailure>> {
    let unit = match find_unit(l, w)? {
        Ok(u) => u,
        Err(e) => return Ok(Check::Fails(e)),
    };
    let (dc, cc) = (l.source().clone(), l.target().clone());
    let phi = |d: ObjectId, g: MorphismId| dc.compose(w.morphism(g), unit[d.0]);
    let natural = par::find_first(dc.num_objects(), |d| {
        let d = ObjectId(d);
        let ld = l.object(d);
        for c in cc.objects() {
            for &g in cc.hom(ld, c) {
                for &k in cc.out_of(c) {
                    if phi(d, cc.compose(k, g)) != dc.compose(w.morphism(k), phi(d, g)) {
                        return Some(());
                    }
                }
                for x in dc.objects() {
                    for &h in dc.hom(x, d) {
                        if phi(x, cc.compose(g, l.morphism(h))) != dc.compose(phi(d, g), h) {
                            return Some(());
                        }
                    }
                }
            }
        }
        None
    });
    Ok(if natural.is_some() { Check::Fails(AdjunctionFailure::NotNatural) } else { Check::Holds })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::comma::is_final;
    use crate::fincat::{poset_category, FinCategory};

    fn lattice() -> Arc<FinCategory> {
        let names: Vec<String> = ["{}", "{0}", "{1}", "{0,1}"].iter().map(|s| s.to_string()).collect();
        let sets = [0u8, 1, 2, 3];
        Arc::new(poset_category(&names, |i, j| sets[i] & !sets[j] == 0).unwrap())
    }

    #[test]
    fn identity_is_self_adjoint() {
        let id = Functor::identity(lattice());
        assert!(check_adjunction(&id, &id).unwrap().holds());
    }

    #[test]
    fn lattice_products_give_adjoint_pair() {
        // meets are products in a lattice
        let c = lattice();
        let table = WitnessTable::search(&c, 2);
        let f = Functor::identity(c.clone());
        let w01 = table.get(&[c.object("{0}").unwrap(), c.object("{1}").unwrap()]).unwrap();
        let pcm = product_comma(&f, &table, w01).unwrap();
        assert!(check_adjunction(&pcm.l, &pcm.w).unwrap().holds());
        assert!(is_final(&pcm.w).holds());
    }

    #[test]
    fn empty_product_picks_terminal() {
        let c = lattice();
        let table = WitnessTable::search(&c, 2);
        let f = Functor::identity(c.clone());
        let w = table.get(&[]).unwrap();
        let pcm = product_comma(&f, &table, w).unwrap();
        assert_eq!(pcm.product.category.num_objects(), 1);
        let t = pcm.w.object(ObjectId(0));
        assert_eq!(c.object_name(pcm.target.pair(t).0), "{0,1}");
        assert!(check_adjunction(&pcm.l, &pcm.w).unwrap().holds());
        assert!(is_final(&pcm.w).holds());
    }

    #[test]
    fn perturbed_w_is_rejected() {
        let c = lattice();
        let table = WitnessTable::search(&c, 2);
        let f = Functor::identity(c.clone());
        let top = c.object("{0,1}").unwrap();
        let pcm = product_comma(&f, &table, table.get(&[top, top]).unwrap()).unwrap();
        // swap the images of two parallel endomorphism-free objects
        let mut broken = None;
        for m in pcm.w.source().morphisms() {
            let img = pcm.w.morphism(m);
            let tc = pcm.w.target();
            if let Some(&other) = tc.hom(tc.dom(img), tc.cod(img)).iter().find(|&&x| x != img) {
                broken = Some(pcm.w.with_morphism(m, other));
                break;
            }
            if !tc.is_identity(img) {
                let alt = tc.identity(tc.dom(img));
                broken = Some(pcm.w.with_morphism(m, alt));
                break;
            }
        }
        let broken = broken.expect("some morphism can be remapped");
        assert!(!check_adjunction(&pcm.l, &broken).unwrap().holds());
    }
}
