use std::collections::HashSet;

use super::colimit::{colimit, is_one_step_transitive};
use super::{Elem, SetFunctor};
use crate::error::{Error, Result};
use crate::fincat::{product_category, tuples, ObjectId, ProductCategory};

/// External product of set functors, on the product of their bases.
#[derive(Debug, Clone)]
pub struct Tensor {
    pub product: ProductCategory,
    pub functor: SetFunctor,
    // components[o][i]: factor element indices of element i over object o
    components: Vec<Vec<Vec<usize>>>,
}

impl Tensor {
    /// Factor elements `(b_i, x_i)` of a tensor element.
    pub fn components(&self, e: Elem) -> Vec<Elem> {
        let objs = self.product.object_tuple(e.object);
        objs.iter().zip(&self.components[e.object.0][e.index]).map(|(&b, &x)| Elem::new(b, x)).collect()
    }

    /// The tensor element with the given factor elements.
    pub fn element_of(&self, parts: &[Elem]) -> Option<Elem> {
        let objs: Vec<ObjectId> = parts.iter().map(|e| e.object).collect();
        let o = self.product.object_of(&objs)?;
        let idx: Vec<usize> = parts.iter().map(|e| e.index).collect();
        self.components[o.0].iter().position(|t| *t == idx).map(|i| Elem::new(o, i))
    }
}

fn strides(radices: &[usize]) -> Vec<usize> {
    let mut s = vec![1; radices.len()];
    for i in (0..radices.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * radices[i + 1];
    }
    s
}

pub fn tensor(ps: &[SetFunctor]) -> Tensor {
    let bases: Vec<_> = ps.iter().map(|p| p.base().clone()).collect();
    let product = product_category(&bases);
    let pc = product.category.clone();
    let mut sets = Vec::with_capacity(pc.num_objects());
    let mut components = Vec::with_capacity(pc.num_objects());
    // raw mixed-radix position -> sorted position, per object
    let mut sorted_pos = Vec::with_capacity(pc.num_objects());
    for o in pc.objects() {
        let objs = product.object_tuple(o);
        let radices: Vec<usize> = ps.iter().zip(objs).map(|(p, &b)| p.size(b)).collect();
        let raw: Vec<Vec<usize>> = tuples(&radices).collect();
        let names: Vec<String> = raw
            .iter()
            .map(|t| {
                let parts: Vec<&str> = ps.iter().zip(objs).zip(t).map(|((p, &b), &x)| p.set(b)[x].as_str()).collect();
                format!("({})", parts.join(","))
            })
            .collect();
        let mut order: Vec<usize> = (0..raw.len()).collect();
        order.sort_by(|&a, &b| names[a].cmp(&names[b]));
        let mut pos = vec![0; raw.len()];
        for (new, &old) in order.iter().enumerate() {
            pos[old] = new;
        }
        sets.push(order.iter().map(|&i| names[i].clone()).collect());
        components.push(order.iter().map(|&i| raw[i].clone()).collect::<Vec<_>>());
        sorted_pos.push(pos);
    }
    let maps = pc
        .morphisms()
        .map(|m| {
            let fs = product.morphism_tuple(m);
            let cod_objs = product.object_tuple(pc.cod(m));
            let cod_radices: Vec<usize> = ps.iter().zip(cod_objs).map(|(p, &b)| p.size(b)).collect();
            let st = strides(&cod_radices);
            components[pc.dom(m).0]
                .iter()
                .map(|t: &Vec<usize>| {
                    let raw: usize = ps
                        .iter()
                        .zip(fs)
                        .zip(t)
                        .zip(&st)
                        .map(|(((p, &f), &x), &s)| p.table(f)[x] * s)
                        .sum();
                    sorted_pos[pc.cod(m).0][raw]
                })
                .collect()
        })
        .collect();
    let functor = SetFunctor::from_sorted(pc, sets, maps);
    Tensor { product, functor, components }
}

/// The canonical map `colim (P_1 x .. x P_k) -> colim P_1 x .. x colim P_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductComparison {
    /// Image tuple of each tensor class.
    pub map: Vec<Vec<usize>>,
    pub factor_classes: Vec<usize>,
    pub bijective: bool,
    /// Whether each factor's one-step relation is already transitive.
    pub factor_transitive: Vec<bool>,
}

pub fn product_compare(ps: &[SetFunctor]) -> Result<ProductComparison> {
    for p in ps {
        let v = p.law_violations();
        if !v.is_empty() {
            return Err(Error::InvalidSetFunctor(v));
        }
    }
    let t = tensor(ps);
    let whole = colimit(&t.functor);
    let parts: Vec<_> = ps.iter().map(colimit).collect();
    let mut map: Vec<Option<Vec<usize>>> = vec![None; whole.num_classes()];
    for e in t.functor.elements() {
        let image: Vec<usize> =
            t.components(e).iter().zip(ps).zip(&parts).map(|((&x, p), part)| part.class_of(p.flat(x))).collect();
        let slot = &mut map[whole.class_of(t.functor.flat(e))];
        match slot {
            Some(prev) if *prev != image => {
                return Err(Error::IllDefined("comparison map depends on the representative".into()))
            }
            _ => *slot = Some(image),
        }
    }
    let map: Vec<Vec<usize>> = map.into_iter().map(|m| m.expect("every class has a member")).collect();
    let factor_classes: Vec<usize> = parts.iter().map(|p| p.num_classes()).collect();
    let target: usize = factor_classes.iter().product();
    let distinct: HashSet<&Vec<usize>> = map.iter().collect();
    let bijective = distinct.len() == map.len() && map.len() == target;
    let factor_transitive = ps.iter().map(|p| is_one_step_transitive(p).holds()).collect();
    Ok(ProductComparison { map, factor_classes, bijective, factor_transitive })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{poset_category, FinCategory};
    use std::sync::Arc;
    use crate::setval::one_step_relation;

    fn arrow_functor() -> SetFunctor {
        let names = vec!["a".to_string(), "b".to_string()];
        let c = Arc::new(poset_category(&names, |i, j| i <= j).unwrap());
        SetFunctor::new(c, vec![vec!["0".into(), "1".into()], vec!["*".into()]], vec![vec![0, 1], vec![0, 0], vec![0]])
            .unwrap()
    }

    #[test]
    fn empty_tensor_is_singleton_on_terminal() {
        let t = tensor(&[]);
        assert_eq!(t.functor.base().num_objects(), 1);
        assert_eq!(t.functor.base().num_morphisms(), 1);
        assert_eq!(t.functor.total(), 1);
        let k = product_compare(&[]).unwrap();
        assert!(k.bijective);
    }

    #[test]
    fn unary_tensor_matches_input() {
        let p = arrow_functor();
        let t = tensor(std::slice::from_ref(&p));
        for o in p.base().objects() {
            let to = t.product.object_of(&[o]).unwrap();
            assert_eq!(t.functor.size(to), p.size(o));
        }
        assert!(t.functor.law_violations().is_empty());
    }

    #[test]
    fn binary_tensor_cardinalities_multiply() {
        let p = arrow_functor();
        let t = tensor(&[p.clone(), p.clone()]);
        assert!(t.functor.law_violations().is_empty());
        for o in t.functor.base().objects() {
            let objs = t.product.object_tuple(o);
            assert_eq!(t.functor.size(o), p.size(objs[0]) * p.size(objs[1]));
        }
        let k = product_compare(&[p.clone(), p]).unwrap();
        assert!(k.bijective);
        assert_eq!(k.factor_classes, vec![1, 1]);
    }

    #[test]
    fn components_round_trip() {
        let p = arrow_functor();
        let t = tensor(&[p.clone(), p]);
        for e in t.functor.elements() {
            assert_eq!(t.element_of(&t.components(e)), Some(e));
        }
    }

    #[test]
    fn collapsing_arrow_is_not_transitive() {
        let k = product_compare(&[arrow_functor()]).unwrap();
        assert_eq!(k.factor_transitive, vec![false]);
        assert!(k.bijective);
    }

    #[test]
    fn relation_is_componentwise_for_transitive_factors() {
        let names = vec!["a".to_string(), "b".to_string()];
        let c = Arc::new(poset_category(&names, |i, j| i <= j).unwrap());
        let two = || vec!["0".to_string(), "1".to_string()];
        let p = SetFunctor::new(c, vec![two(), two()], vec![vec![0, 1], vec![1, 0], vec![0, 1]]).unwrap();
        assert!(crate::setval::is_one_step_transitive(&p).holds());
        let t = tensor(&[p.clone(), p.clone()]);
        let whole = one_step_relation(&t.functor);
        let part = one_step_relation(&p);
        for e in t.functor.elements() {
            for e2 in t.functor.elements() {
                let (c1, c2) = (t.components(e), t.components(e2));
                let expected = (0..2).all(|i| part.contains(p.flat(c1[i]), p.flat(c2[i])));
                assert_eq!(whole.contains(t.functor.flat(e), t.functor.flat(e2)), expected);
            }
        }
    }

    #[test]
    fn discrete_factors_give_product_of_classes() {
        let c = Arc::new(FinCategory::discrete(&["x", "y"]));
        let p = SetFunctor::singleton(c);
        let k = product_compare(&[p.clone(), p]).unwrap();
        assert_eq!(k.map.len(), 4);
        assert!(k.bijective);
    }
}
