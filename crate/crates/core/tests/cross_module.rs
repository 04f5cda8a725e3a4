use std::sync::Arc;

use kanalg::corpus::finset_inclusion;
use kanalg::fincat::{finset_op, Functor};
use kanalg::kan::{lan, profunctor_at};
use kanalg::oracles::oracle_free;
use kanalg::theory::{
    builtin, count_transformations, power_functor, free_algebra, hom_extend, lan_along, restricted_hom, theory_inclusion, theory_of,
    AlgebraicTheory, BUILTIN_NAMES,
};
use kanalg::Error;

fn gens(k: usize) -> Vec<String> {
    (0..k).map(|i| format!("g{i}")).collect()
}

fn theory(name: &str, rank: usize) -> Arc<AlgebraicTheory> {
    Arc::new(theory_of(&builtin(name, rank).unwrap()).unwrap())
}

#[test]
fn free_algebra_is_the_extension_of_the_power_functor() {
    for (name, k) in [("trivial", 2), ("pointed", 1), ("f2", 2), ("mset2", 0)] {
        let t = theory(name, 4);
        let (powers, _) = power_functor(&t.finset, &gens(k));
        let ext = lan(&t.embedding, &powers).unwrap();
        let fr = free_algebra(t.clone(), &gens(k)).unwrap();
        for m in 0..4 {
            assert_eq!(ext.functor.size(t.object(m)), fr.size(m));
        }
    }
}

#[test]
fn free_algebra_sizes_are_powers_of_the_oracle() {
    for name in BUILTIN_NAMES {
        for k in 0..3 {
            let fr = free_algebra(theory(name, 4), &gens(k)).unwrap();
            let n = oracle_free(name, &gens(k)).unwrap().len();
            let expected: Vec<usize> = (0..4).map(|m| n.pow(m as u32)).collect();
            assert_eq!(fr.sizes(), expected, "{name} on {k}");
        }
    }
}

#[test]
fn semilattice_projections_agree_with_oracle() {
    let fr = free_algebra(theory("semilattice", 3), &gens(2)).unwrap();
    let t = fr.theory();
    let oracle = oracle_free("semilattice", &gens(2)).unwrap();
    assert_eq!(fr.size(1), oracle.len());
    let w = t.witness(&[1, 1]).unwrap();
    for (i, &p) in w.projections.iter().enumerate() {
        let table = fr.algebra.functor.table(p);
        for (y, &image) in table.iter().enumerate() {
            assert_eq!(image, fr.algebra.tuple(2, y)[i]);
        }
    }
    // the binary join, evaluated on every pair, matches the oracle's join
    let join = t.clone.op(2, "x0|x1").unwrap();
    let (alg, pos) = oracle.to_algebra(t.clone()).unwrap();
    for a in 0..oracle.len() {
        for b in 0..oracle.len() {
            let expected = oracle.interpret("x0|x1", &[a, b]).unwrap();
            assert_eq!(alg.apply(join, &[pos[a], pos[b]]), pos[expected]);
        }
    }
}

#[test]
fn profunctor_classes_are_free_algebra_elements() {
    for name in ["trivial", "pointed", "semilattice"] {
        let t = theory(name, 3);
        let g = Functor::identity(t.finset.category.clone());
        for d in 0..3 {
            let fr = free_algebra(t.clone(), &gens(d)).unwrap();
            for m in 0..3 {
                let p = profunctor_at(&t.embedding, &g, t.object(m), t.finset.object(d)).unwrap();
                assert_eq!(p.partition.num_classes(), fr.size(m), "{name} d={d} m={m}");
            }
        }
    }
}

#[test]
fn extension_along_an_inclusion_of_theories_is_free() {
    let small = theory("trivial", 4);
    let big = theory("pointed", 4);
    let j = theory_inclusion(&small, &big).unwrap();
    for k in 0..3 {
        let y = restricted_hom(&gens(k), 4).unwrap();
        let ext = lan_along(&j, &y, &big).unwrap();
        assert!(ext.preserves_products());
        let fr = free_algebra(big.clone(), &gens(k)).unwrap();
        let sizes: Vec<usize> = (0..4).map(|m| ext.functor().size(big.object(m))).collect();
        assert_eq!(sizes, fr.sizes());
    }
}

#[test]
fn identity_on_generators_extends_to_identity() {
    for name in BUILTIN_NAMES {
        let fr = free_algebra(theory(name, 3), &gens(2)).unwrap();
        let units: Vec<usize> = (0..2).map(|g| fr.unit(g)).collect();
        let ext = hom_extend(&fr, &fr.algebra, &units).unwrap();
        assert!(ext.unique(), "{name}");
        for (m, c) in ext.components.iter().enumerate() {
            assert_eq!(*c, (0..fr.size(m)).collect::<Vec<_>>(), "{name} at A^{m}");
        }
        assert_eq!(count_transformations(&fr, &fr.algebra, &units, 5), 1);
    }
}

#[test]
fn oversized_inputs_are_rejected() {
    let err = free_algebra(theory("pointed", 3), &gens(3)).unwrap_err();
    assert!(matches!(err, Error::ArityOverflow { rank: 3, .. }), "{err}");
    assert!(matches!(finset_op(10), Err(Error::InvalidArgument(_))));
    assert!(builtin("groups", 3).is_err());
}

#[test]
fn rank_inclusion_is_full_on_small_arities() {
    let g = finset_inclusion(3, 5).unwrap();
    assert!(g.law_violations().is_empty());
    for a in g.source().objects() {
        for b in g.source().objects() {
            assert_eq!(g.source().hom(a, b).len(), g.target().hom(g.object(a), g.object(b)).len());
        }
    }
}
