//! One pass/fail line per acceptance criterion. Each criterion is exact;
//! the time budget is part of the criterion.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use kanalg::comma::{build_l, build_w, check_adjunction, is_final, is_weakly_cofiltered, satisfies_wpc, under_comma};
use kanalg::corpus::{
    adjunction_instances, filter_functor, finset_inclusion, random_category, random_functor, random_poset,
    random_product_preserving, random_set_functor, rng, small_lattices,
};
use kanalg::fincat::{
    check_product_witness, validate_category, FinCategory, Functor, ObjectId, WitnessTable,
};
use kanalg::kan::{lan, preserves_all, profunctor_at, verify_product_chain};
use kanalg::oracles::{chain_semilattice, compare_free, oracle_free, OracleAlgebra};
use kanalg::setval::{one_step_related, one_step_relation, product_compare};
use kanalg::theory::{
    builtin, fr1_check, free_algebra, hom_extend, lan_along, literal_relation, op_action_concat_triples,
    relation_check, restricted_hom, shift_functor, theory_of, truncation_stability, validate_clone,
    validate_clone_doc, FreeAlgebra, Triple, BUILTIN_NAMES,
};

type Outcome = Result<String, String>;

fn gens(k: usize) -> Vec<String> {
    (0..k).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
}

fn free(name: &str, rank: usize, k: usize) -> Result<FreeAlgebra, String> {
    let t = theory_of(&builtin(name, rank).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    free_algebra(Arc::new(t), &gens(k)).map_err(|e| format!("{name} k={k}: {e}"))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn trivial_identity() -> Outcome {
    for k in 0..=3usize {
        let fr = free("trivial", 4, k)?;
        let expected: Vec<usize> = (0..4).map(|m| k.pow(m as u32)).collect();
        ensure(fr.sizes() == expected, || format!("k={k}: sizes {:?}, expected {expected:?}", fr.sizes()))?;
    }
    Ok("sizes k^m for k = 0..3, m = 0..3".into())
}

fn free_matches_oracles() -> Outcome {
    let mut cases = 0;
    let mut pairs: Vec<(&str, usize)> = BUILTIN_NAMES.iter().flat_map(|&n| (0..=2).map(move |k| (n, k))).collect();
    pairs.extend([("trivial", 3), ("pointed", 3)]);
    for (name, k) in pairs {
        let fr = free(name, 4, k)?;
        let o = oracle_free(name, &gens(k)).map_err(|e| e.to_string())?;
        let c = compare_free(&fr, &o).map_err(|e| e.to_string())?;
        ensure(c.isomorphic(), || format!("{name} k={k}: {:?}", c.outcome))?;
        cases += 1;
    }
    Ok(format!("{cases} (theory, generators) pairs isomorphic to their oracles"))
}

fn free_on_one() -> Outcome {
    for name in BUILTIN_NAMES {
        let fr = free(name, 4, 1)?;
        let th = fr.theory();
        let unary = th.category.hom(th.object(1), th.object(1)).len();
        ensure(fr.size(1) == unary, || format!("{name}: {} classes, {unary} unary operations", fr.size(1)))?;
        let check = fr1_check(&fr).map_err(|e| e.to_string())?;
        ensure(check.holds(), || format!("{name}: {check:?}"))?;
    }
    Ok(format!("{} theories, both composites identities", BUILTIN_NAMES.len()))
}

fn product_preservation() -> Outcome {
    let mut witnesses = 0;
    for name in BUILTIN_NAMES {
        for k in 0..=2 {
            let fr = free(name, 4, k)?;
            let th = fr.theory();
            let bad = preserves_all(&fr.kan.functor, &th.witnesses).map_err(|e| e.to_string())?;
            ensure(bad.is_none(), || format!("{name} k={k}: fails at {bad:?}"))?;
            witnesses += th.witnesses.len();
        }
    }
    let mut r = rng(4);
    let mut non_preserving_f = 0;
    for i in 0..100 {
        let x = random_product_preserving(&mut r);
        let b = x.base().clone();
        let c = random_category(&mut r, 4);
        let f = random_functor(&mut r, b.clone(), c.clone());
        let bw = WitnessTable::search(&b, 2);
        let f_preserves = bw.witnesses().iter().all(|w| {
            let image = kanalg::fincat::ProductWitness {
                factors: w.factors.iter().map(|&o| f.object(o)).collect(),
                apex: f.object(w.apex),
                projections: w.projections.iter().map(|&p| f.morphism(p)).collect(),
            };
            check_product_witness(&c, &image)
        });
        if !f_preserves {
            non_preserving_f += 1;
        }
        let l = lan(&f, &x).map_err(|e| e.to_string())?;
        let cw = WitnessTable::search(&c, 3);
        let bad = preserves_all(&l.functor, &cw).map_err(|e| e.to_string())?;
        ensure(bad.is_none(), || format!("random instance {i}: fails at {bad:?}"))?;
    }
    ensure(non_preserving_f > 0, || "no non-product-preserving F was sampled".into())?;
    Ok(format!(
        "{witnesses} theory witnesses; 100 random (F, X), {non_preserving_f} with F not preserving products"
    ))
}

fn products_of_colimits() -> Outcome {
    let mut r = rng(5);
    for i in 0..200 {
        let (c1, c2) = (random_category(&mut r, 4), random_category(&mut r, 4));
        let p1 = random_set_functor(&mut r, c1, 3);
        let p2 = random_set_functor(&mut r, c2, 3);
        let cmp = product_compare(&[p1, p2]).map_err(|e| e.to_string())?;
        ensure(cmp.bijective, || format!("pair {i} not bijective"))?;
    }
    Ok("200 random pairs bijective".into())
}

fn adjunction_and_finality() -> Outcome {
    let mut r = rng(6);
    let instances = adjunction_instances().map_err(|e| e.to_string())?;
    let mut chains = 0;
    for inst in &instances {
        let (f, bw, cw) = (&inst.functor, &inst.b_witnesses, &inst.c_witness);
        let w = build_w(f, bw, cw).map_err(|e| e.to_string())?;
        let l = build_l(f, bw, cw).map_err(|e| e.to_string())?;
        let adj = check_adjunction(&l, &w).map_err(|e| e.to_string())?;
        ensure(adj.holds(), || format!("{}: {adj:?}", inst.name))?;
        ensure(is_final(&w).holds(), || format!("{}: W not final", inst.name))?;
        let b = f.source().clone();
        for a in b.objects() {
            let x = filter_functor(b.clone(), a);
            let ch = verify_product_chain(f, &x, bw, cw).map_err(|e| e.to_string())?;
            ensure(ch.holds(), || format!("{}: chain {ch:?}", inst.name))?;
            chains += 1;
        }
        for _ in 0..3 {
            let x = random_set_functor(&mut r, b.clone(), 3);
            let ch = verify_product_chain(f, &x, bw, cw).map_err(|e| e.to_string())?;
            ensure(ch.w_final && ch.w_invariance, || format!("{}: colimit invariance {ch:?}", inst.name))?;
            chains += 1;
        }
    }
    let arities: Vec<usize> = instances.iter().map(|i| i.c_witness.factors.len()).collect();
    ensure(arities.contains(&0), || "no empty-product instance".into())?;
    Ok(format!("{} instances (arities {arities:?}), {chains} colimit recomputations", instances.len()))
}

fn one_step_transitivity() -> Outcome {
    let mut r = rng(7);
    // (a) lattices with G = identity, several F
    let mut checked = 0;
    for l in small_lattices() {
        let g = Functor::identity(l.clone());
        let mut fs = vec![Functor::identity(l.clone()), Functor::to_terminal(l.clone())];
        for _ in 0..3 {
            let c = random_category(&mut r, 4);
            fs.push(random_functor(&mut r, l.clone(), c));
        }
        for f in &fs {
            for c in f.target().objects() {
                for d in l.objects() {
                    let dg = under_comma(&g, d).map_err(|e| e.to_string())?;
                    ensure(is_weakly_cofiltered(&dg.category).holds(), || "lattice d/G not weakly cofiltered".into())?;
                    let p = profunctor_at(f, &g, c, d).map_err(|e| e.to_string())?;
                    ensure(p.one_step_transitive, || format!("lattice instance not transitive at {c:?}, {d:?}"))?;
                    checked += 1;
                }
            }
        }
    }
    // theory instances: F = A, G the inclusion of ranks, d = |X0| below the rank
    for name in ["trivial", "pointed", "semilattice"] {
        let th = theory_of(&builtin(name, 3).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let g = finset_inclusion(3, 4).map_err(|e| e.to_string())?;
        let g = Functor::new(th.finset.category.clone(), g.target().clone(), (0..3).map(|n| g.object(ObjectId(n))).collect(), g_morphisms(&g))
            .map_err(|e| e.to_string())?;
        for k in 0..3 {
            let d = g.target().object(&k.to_string()).map_err(|e| e.to_string())?;
            let dg = under_comma(&g, d).map_err(|e| e.to_string())?;
            ensure(is_weakly_cofiltered(&dg.category).holds(), || format!("{name}: d/G not weakly cofiltered at {k}"))?;
            for m in 0..3 {
                let p = profunctor_at(&th.embedding, &g, th.object(m), d).map_err(|e| e.to_string())?;
                ensure(p.one_step_transitive, || format!("{name}: not transitive at A^{m}, d={k}"))?;
                checked += 1;
            }
        }
    }
    // (b) without cofilteredness the one-step relation can fail to be transitive;
    // count both outcomes over a fixed sample of non-cofiltered d/G
    let (mut intransitive, mut transitive) = (0, 0);
    let mut first = None;
    for attempt in 0..200 {
        let b = Arc::new(random_poset(&mut r, 4));
        let dcat = random_category(&mut r, 4);
        let g = random_functor(&mut r, b.clone(), dcat.clone());
        let f = Functor::to_terminal(b.clone());
        for d in dcat.objects() {
            let dg = under_comma(&g, d).map_err(|e| e.to_string())?;
            if is_weakly_cofiltered(&dg.category).holds() {
                continue;
            }
            let p = profunctor_at(&f, &g, ObjectId(0), d).map_err(|e| e.to_string())?;
            if p.one_step_transitive {
                transitive += 1;
            } else {
                intransitive += 1;
                first.get_or_insert(attempt);
            }
        }
    }
    let attempt = first.ok_or("no non-transitive instance among 200 samples")?;
    // (c) the weak pullback condition implies weak cofilteredness of every d/G
    let mut wpc = 0;
    let mut candidates: Vec<Functor> = small_lattices().into_iter().map(Functor::identity).collect();
    for _ in 0..150 {
        let b = random_category(&mut r, 4);
        let dcat = random_category(&mut r, 4);
        candidates.push(random_functor(&mut r, b, dcat));
    }
    for g in &candidates {
        if !satisfies_wpc(g).holds() {
            continue;
        }
        wpc += 1;
        for d in g.target().objects() {
            let dg = under_comma(g, d).map_err(|e| e.to_string())?;
            ensure(is_weakly_cofiltered(&dg.category).holds(), || "a functor with the weak pullback condition has a non-cofiltered d/G".into())?;
        }
    }
    ensure(wpc > 0, || "no candidate satisfied the weak pullback condition".into())?;
    Ok(format!(
        "{checked} transitive profunctor points; non-cofiltered d/G: {intransitive} intransitive (first at sample {attempt}), {transitive} still transitive; {wpc}/{} candidates with the weak pullback condition",
        candidates.len()
    ))
}

fn g_morphisms(g: &Functor) -> Vec<kanalg::fincat::MorphismId> {
    g.source().morphisms().map(|m| g.morphism(m)).collect()
}

fn shift_adds_a_point() -> Outcome {
    let t = theory_of(&builtin("trivial", 4).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let s = shift_functor(&t).map_err(|e| e.to_string())?;
    ensure(!s.preserves_terminal, || "shift preserves the terminal object".into())?;
    let mut sizes = Vec::new();
    for k in 0..=3 {
        let y = restricted_hom(&gens(k), 3).map_err(|e| e.to_string())?;
        let l = lan_along(&s.functor, &y, &t).map_err(|e| e.to_string())?;
        let n = l.functor().size(t.object(1));
        ensure(n == k + 1, || format!("k={k}: {n} classes"))?;
        sizes.push(n);
    }
    Ok(format!("classes at A^1 {sizes:?}; shift flagged as not preserving the terminal object"))
}

fn oracle_targets(name: &str) -> Vec<OracleAlgebra> {
    let mut out: Vec<OracleAlgebra> =
        (0..=3).filter_map(|j| oracle_free(name, &gens(j)).ok()).filter(|o| o.len() <= 4).collect();
    if name == "semilattice" {
        out.extend((1..=4).map(chain_semilattice));
    }
    out
}

fn universal_property() -> Outcome {
    let mut cases = 0;
    for name in ["pointed", "semilattice"] {
        for k in 0..=2 {
            let fr = free(name, 4, k)?;
            for o in oracle_targets(name) {
                let (y, position) = o.to_algebra(fr.theory().clone()).map_err(|e| e.to_string())?;
                for f in kanalg_tuples(o.len(), k) {
                    let f: Vec<usize> = f.iter().map(|&v| position[v]).collect();
                    let ext = hom_extend(&fr, &y, &f).map_err(|e| e.to_string())?;
                    ensure(ext.natural && ext.solutions == 1, || {
                        format!("{name} k={k} into {:?}: natural {} solutions {}", o.carrier, ext.natural, ext.solutions)
                    })?;
                    cases += 1;
                }
            }
        }
    }
    Ok(format!("{cases} generator maps, each with exactly one natural extension"))
}

fn kanalg_tuples(base: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out.into_iter().flat_map(|t| (0..base).map(move |v| [t.clone(), vec![v]].concat())).collect();
    }
    out
}

fn stability() -> Outcome {
    for name in BUILTIN_NAMES {
        for k in 0..=2 {
            let c = truncation_stability(name, 3, &gens(k)).map_err(|e| e.to_string())?;
            ensure(c.holds(), || format!("{name} k={k}: {c:?}"))?;
        }
    }
    Ok(format!("{} theories x 3 generator counts", BUILTIN_NAMES.len()))
}

fn law_suites() -> Outcome {
    // validators on bundled data
    let mut cats: Vec<Arc<FinCategory>> = small_lattices();
    let mut functors: Vec<Functor> = Vec::new();
    for inst in adjunction_instances().map_err(|e| e.to_string())? {
        cats.push(inst.functor.source().clone());
        cats.push(inst.functor.target().clone());
        functors.push(inst.functor.clone());
    }
    for rank in 1..=4 {
        for name in BUILTIN_NAMES {
            let cl = builtin(name, rank).map_err(|e| e.to_string())?;
            ensure(validate_clone(&cl).is_empty(), || format!("{name} rank {rank} invalid"))?;
            ensure(validate_clone_doc(&cl.to_doc()).is_empty(), || format!("{name} rank {rank} doc invalid"))?;
            let th = theory_of(&cl).map_err(|e| e.to_string())?;
            cats.push(th.category.clone());
            functors.push(th.embedding.clone());
        }
    }
    for c in &cats {
        ensure(validate_category(&c.to_doc()).is_empty(), || "bundled category invalid".into())?;
    }
    for f in &functors {
        ensure(f.law_violations().is_empty(), || "bundled functor invalid".into())?;
    }
    // literal span relation against the generic one-step relation
    let mut pairs = 0usize;
    for rank in 2..=4 {
        for name in BUILTIN_NAMES {
            for k in 0..=2.min(rank - 1) {
                let fr = free(name, rank, k)?;
                for m in 0..rank {
                    let p = fr.point(m);
                    ensure(literal_relation(&fr, m) == one_step_relation(&p.diagram), || {
                        format!("{name} rank {rank} k={k}: relation matrices differ at A^{m}")
                    })?;
                    pairs += fr.num_triples(m).pow(2);
                }
                if rank == 4 {
                    let p = fr.point(1);
                    let n = fr.num_triples(1);
                    for i in 0..n {
                        for j in 0..n {
                            let generic = one_step_related(&p.diagram, p.diagram.unflat(i), p.diagram.unflat(j))
                                .map_err(|e| e.to_string())?
                                .is_some();
                            let literal = relation_check(&fr, &fr.triple(1, i), &fr.triple(1, j)).map_err(|e| e.to_string())?;
                            ensure(generic == literal, || format!("{name} k={k}: pair ({i}, {j}) disagrees"))?;
                        }
                    }
                }
            }
        }
    }
    // concatenation against the extension's action, over all representatives
    let mut evaluations = 0usize;
    for name in BUILTIN_NAMES {
        for k in 0..=2 {
            let fr = free(name, 4, k)?;
            let cl = &fr.theory().clone;
            let members: Vec<Vec<Triple>> = {
                let mut by = vec![Vec::new(); fr.size(1)];
                for i in 0..fr.num_triples(1) {
                    by[fr.element_of_index(1, i)].push(fr.triple(1, i));
                }
                by
            };
            for n in 0..4 {
                for w in 0..cl.num_ops(n) {
                    for args in kanalg_tuples(fr.size(1), n) {
                        let expected = fr.action(w, &args);
                        let mut stack: Vec<(Vec<Triple>, usize)> = vec![(vec![], 0)];
                        while let Some((chosen, used)) = stack.pop() {
                            if chosen.len() == n {
                                let got = op_action_concat_triples(&fr, w, &chosen).map_err(|e| e.to_string())?;
                                ensure(got == expected, || format!("{name} k={k}: {} on {args:?}", cl.ops(n)[w]))?;
                                evaluations += 1;
                                continue;
                            }
                            for t in &members[args[chosen.len()]] {
                                if used + t.n < 4 {
                                    let mut next = chosen.clone();
                                    next.push(t.clone());
                                    stack.push((next, used + t.n));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(format!(
        "{} categories, {} functors valid; {pairs} relation entries compared; {evaluations} concatenations agree",
        cats.len(),
        functors.len()
    ))
}

struct Criterion {
    id: usize,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "trivial theory free algebra is the power", budget: Duration::from_secs(1), run: trivial_identity },
        Criterion { id: 2, name: "free algebras isomorphic to oracles", budget: Duration::from_secs(30), run: free_matches_oracles },
        Criterion { id: 3, name: "free algebra on one generator is hom(A^1, A^1)", budget: Duration::from_secs(5), run: free_on_one },
        Criterion { id: 4, name: "left Kan extensions preserve products", budget: Duration::from_secs(60), run: product_preservation },
        Criterion { id: 5, name: "colimit of a product is the product of colimits", budget: Duration::from_secs(30), run: products_of_colimits },
        Criterion { id: 6, name: "L -| W, W final, colimit invariance", budget: Duration::from_secs(10), run: adjunction_and_finality },
        Criterion { id: 7, name: "one-step transitivity and cofilteredness", budget: Duration::from_secs(30), run: one_step_transitivity },
        Criterion { id: 8, name: "shift extension adds one point", budget: Duration::from_secs(5), run: shift_adds_a_point },
        Criterion { id: 9, name: "unique extension of generator maps", budget: Duration::from_secs(60), run: universal_property },
        Criterion { id: 10, name: "truncation stability from rank 3 to 4", budget: Duration::from_secs(30), run: stability },
        Criterion { id: 11, name: "validators, span relation and concatenation", budget: Duration::from_secs(60), run: law_suites },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let (status, detail) = match outcome {
            Ok(d) if elapsed <= c.budget => ("PASS", d),
            Ok(d) => ("FAIL", format!("over budget: {d}")),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "criterion {:>2} [{status}] {} ({:.2}s of {}s): {detail}",
            c.id,
            c.name,
            elapsed.as_secs_f64(),
            c.budget.as_secs()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
