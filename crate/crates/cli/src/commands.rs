use std::path::Path;
use std::sync::Arc;

use kanalg::comma::{build_l, build_w, check_adjunction, is_final, is_weakly_cofiltered, satisfies_wpc, under_comma, Cospan};
use kanalg::corpus::adjunction_instances;
use kanalg::fincat::{FinCategory, WitnessTable};
use kanalg::kan::{lan, lan_at, preserves_all};
use kanalg::oracles::{compare_free, oracle_free};
use kanalg::setval::{colimit, SetFunctor};
use kanalg::theory::{
    builtin, free_algebra, stability_between, theory_of, truncation_stability, AbstractClone, BUILTIN_NAMES,
};
use kanalg::{Error, Result};
use serde_json::{json, Map, Value};

use crate::manifest::{instance_holds, Manifest};
use crate::report::Report;
use crate::{Check, Command, TheoryArgs};

pub fn run(command: Command) -> Result<Report> {
    match command {
        Command::Validate { file } => validate(&file),
        Command::Colim { functor } => colim(&Manifest::load(&functor)?.set_functor(None)?),
        Command::Lan { f, x, at } => lan_report(&f, &x, at.as_deref()),
        Command::Free(args) => free(&args),
        Command::Check(check) => check_report(check),
        Command::OracleCompare(args) => oracle_compare(&args),
        Command::Stability(args) => stability(&args),
        Command::Instance { name, list } => instance(name.as_deref(), list),
    }
}

fn generators(k: usize) -> Vec<String> {
    (0..k).map(|i| ((b'a' + (i % 26) as u8) as char).to_string() + &"'".repeat(i / 26)).collect()
}

fn validate(file: &Path) -> Result<Report> {
    let m = Manifest::load(file)?;
    let violations = m.violations();
    let json = json!({ "kind": m.kind(), "valid": violations.is_empty(), "violations": violations });
    let mut report = if violations.is_empty() { Report::new(json, true) } else { Report::invalid(json) };
    report = report.row("kind", m.kind()).row("violations", violations.len());
    for v in &violations {
        report = report.row("", v);
    }
    Ok(report)
}

fn element_name(p: &SetFunctor, i: usize) -> String {
    let e = p.unflat(i);
    format!("{}:{}", p.base().object_name(e.object), p.element_name(e))
}

fn colim(p: &SetFunctor) -> Result<Report> {
    let part = colimit(p);
    let classes: Vec<Vec<String>> =
        part.members().iter().map(|c| c.iter().map(|&i| element_name(p, i)).collect()).collect();
    let reps: Vec<String> = part.representatives().iter().map(|&i| element_name(p, i)).collect();
    let json = json!({ "classes": classes, "num_classes": part.num_classes(), "representatives": reps });
    let mut report = Report::new(json, true).row("elements", p.total()).row("classes", part.num_classes());
    for (i, c) in classes.iter().enumerate() {
        report = report.row(format!("[{}]", reps[i]), c.join(" "));
    }
    Ok(report)
}

fn lan_report(f: &Path, x: &Path, at: Option<&str>) -> Result<Report> {
    let f = Manifest::load(f)?.functor()?;
    let x = Manifest::load(x)?.set_functor(Some(f.source().clone()))?;
    let t = f.target().clone();
    if let Some(name) = at {
        let c = t.object(name)?;
        let p = lan_at(&f, &x, c)?;
        let classes: Vec<String> = (0..p.num_classes()).map(|k| p.class_name(&f, &x, k)).collect();
        let json = json!({ "object": name, "classes": classes, "num_triples": p.partition.len() });
        return Ok(Report::new(json, true).row(name, classes.join(" ")));
    }
    let ext = lan(&f, &x)?;
    let json = json!({ "extension": ext.functor.to_doc() });
    let mut report = Report::new(json, true);
    for c in t.objects() {
        report = report.row(t.object_name(c), ext.functor.set(c).join(" "));
    }
    Ok(report)
}

fn load_clone(args: &TheoryArgs) -> Result<AbstractClone> {
    if BUILTIN_NAMES.contains(&args.theory.as_str()) {
        return builtin(&args.theory, args.rank);
    }
    let cl = Manifest::load(Path::new(&args.theory))?.clone_doc()?;
    if args.rank > cl.rank() {
        return Err(Error::InvalidArgument(format!("clone `{}` only has rank {}", cl.name(), cl.rank())));
    }
    if args.rank < cl.rank() {
        return cl.truncate(args.rank);
    }
    Ok(cl)
}

fn free(args: &TheoryArgs) -> Result<Report> {
    let cl = load_clone(args)?;
    let gens = generators(args.gens);
    let fr = free_algebra(Arc::new(theory_of(&cl)?), &gens)?;
    let th = fr.theory();
    let mut carriers = Map::new();
    let mut report = Report::new(Value::Null, true);
    for m in 0..th.rank() {
        let o = th.object(m);
        let names = fr.algebra.functor.set(o);
        report = report.row(th.category.object_name(o), format!("{} | {}", names.len(), names.join(" ")));
        carriers.insert(th.category.object_name(o).to_string(), json!(names));
    }
    report.json = json!({
        "theory": cl.name(),
        "rank": th.rank(),
        "generators": gens,
        "sizes": fr.sizes(),
        "carriers": carriers,
    });
    Ok(report)
}

fn oracle_compare(args: &TheoryArgs) -> Result<Report> {
    if !BUILTIN_NAMES.contains(&args.theory.as_str()) {
        return Err(Error::InvalidArgument(format!("no oracle for `{}`", args.theory)));
    }
    let gens = generators(args.gens);
    let fr = free_algebra(Arc::new(theory_of(&builtin(&args.theory, args.rank)?)?), &gens)?;
    let oracle = oracle_free(&args.theory, &gens)?;
    let cmp = compare_free(&fr, &oracle)?;
    let carrier = fr.algebra.carrier();
    let mut bijection = Map::new();
    for (e, &o) in cmp.forward.iter().enumerate() {
        bijection.insert(carrier[e].clone(), json!(oracle.carrier.get(o)));
    }
    let failure = cmp.outcome.counterexample().map(|c| format!("{c:?}"));
    let json = json!({
        "theory": args.theory,
        "rank": args.rank,
        "isomorphic": cmp.isomorphic(),
        "free_size": carrier.len(),
        "oracle_size": oracle.len(),
        "bijection": bijection,
        "failure": failure,
    });
    let mut report = Report::new(json, cmp.isomorphic()).row("free", carrier.len()).row("oracle", oracle.len());
    for (k, v) in &bijection {
        report = report.row(k.clone(), v.as_str().unwrap_or("-"));
    }
    Ok(report)
}

fn stability(args: &TheoryArgs) -> Result<Report> {
    let gens = generators(args.gens);
    let check = if BUILTIN_NAMES.contains(&args.theory.as_str()) {
        truncation_stability(&args.theory, args.rank, &gens)?
    } else {
        let high = load_clone(&TheoryArgs { theory: args.theory.clone(), rank: args.rank + 1, gens: args.gens })?;
        stability_between(&high.truncate(args.rank)?, &high, &gens)?
    };
    let failure = check.counterexample().map(|f| {
        json!({ "object": f.object, "arity": f.triple.n, "operations": f.triple.ops, "tuple": f.triple.x })
    });
    let json = json!({
        "theory": args.theory,
        "ranks": [args.rank, args.rank + 1],
        "generators": gens,
        "stable": check.holds(),
        "failure": failure,
    });
    Ok(Report::new(json, check.holds()).row("ranks", format!("{} -> {}", args.rank, args.rank + 1)))
}

fn cospan_json(c: &FinCategory, s: &Cospan) -> Value {
    json!({ "left": c.morphism_name(s.left), "right": c.morphism_name(s.right) })
}

fn check_report(check: Check) -> Result<Report> {
    match check {
        Check::Final { functor, instance } => {
            let q = match (functor, instance) {
                (Some(f), _) => Manifest::load(&f)?.functor()?,
                (None, Some(i)) => {
                    let inst = Manifest::load(&i)?.instance()?;
                    build_w(&inst.functor, &inst.b_witnesses, &inst.c_witness)?
                }
                (None, None) => return Err(Error::InvalidArgument("need --functor or --instance".into())),
            };
            let c = is_final(&q);
            let failing = c.counterexample().map(|&o| q.target().object_name(o).to_string());
            let json = json!({ "property": "final", "holds": c.holds(), "failing_object": failing });
            Ok(Report::new(json, c.holds()).row("source objects", q.source().num_objects()))
        }
        Check::Cofiltered { category, functor, at } => {
            let cat = match (category, functor) {
                (Some(c), _) => Manifest::load(&c)?.category()?,
                (None, Some(f)) => {
                    let g = Manifest::load(&f)?.functor()?;
                    let d = g.target().object(at.as_deref().unwrap_or_default())?;
                    under_comma(&g, d)?.category
                }
                (None, None) => return Err(Error::InvalidArgument("need --category or --functor".into())),
            };
            let c = is_weakly_cofiltered(&cat);
            let cospan = c.counterexample().map(|s| cospan_json(&cat, s));
            let json = json!({ "property": "weakly_cofiltered", "holds": c.holds(), "objects": cat.num_objects(), "cospan": cospan });
            Ok(Report::new(json, c.holds()).row("objects", cat.num_objects()))
        }
        Check::Wpc { functor } => {
            let g = Manifest::load(&functor)?.functor()?;
            let c = satisfies_wpc(&g);
            let cospan = c.counterexample().map(|s| cospan_json(g.target(), s));
            let json = json!({ "property": "weak_pullback_condition", "holds": c.holds(), "cospan": cospan });
            Ok(Report::new(json, c.holds()))
        }
        Check::Products { x, f, arity } => {
            let xm = Manifest::load(&x)?;
            let p = match f {
                Some(f) => {
                    let f = Manifest::load(&f)?.functor()?;
                    lan(&f, &xm.set_functor(Some(f.source().clone()))?)?.functor
                }
                None => xm.set_functor(None)?,
            };
            let table = WitnessTable::search(p.base(), arity);
            let bad = preserves_all(&p, &table)?;
            let c = p.base();
            let failing = bad.as_ref().map(|w| w.to_doc(c));
            let json = json!({
                "property": "preserves_products",
                "holds": bad.is_none(),
                "witnesses": table.len(),
                "failing_witness": failing,
            });
            Ok(Report::new(json, bad.is_none()).row("witnesses checked", table.len()))
        }
        Check::Adjunction { instance } => {
            let inst = Manifest::load(&instance)?.instance()?;
            let w = build_w(&inst.functor, &inst.b_witnesses, &inst.c_witness)?;
            let l = build_l(&inst.functor, &inst.b_witnesses, &inst.c_witness)?;
            let adj = check_adjunction(&l, &w)?;
            let fin = is_final(&w);
            let failure = adj.counterexample().map(|f| format!("{f:?}"));
            let holds = adj.holds() && fin.holds();
            let json = json!({
                "property": "adjunction",
                "instance": inst.name,
                "adjunction": adj.holds(),
                "w_final": fin.holds(),
                "comma_objects": w.source().num_objects(),
                "failure": failure,
            });
            Ok(Report::new(json, holds).row("instance", &inst.name).row("adjunction", adj.holds()).row("W final", fin.holds()))
        }
    }
}

fn instance(name: Option<&str>, list: bool) -> Result<Report> {
    let all = adjunction_instances()?;
    if list || name.is_none() {
        let names: Vec<&str> = all.iter().map(|i| i.name.as_str()).collect();
        let holds = all.iter().map(instance_holds).collect::<Result<Vec<_>>>()?;
        let json = json!({ "instances": names });
        let mut report = Report::new(json, true);
        for (n, h) in names.iter().zip(holds) {
            report = report.row(*n, if h { "adjunction holds" } else { "adjunction fails" });
        }
        return Ok(report);
    }
    let name = name.expect("checked above");
    let inst = all
        .iter()
        .find(|i| i.name == name)
        .ok_or_else(|| Error::InvalidArgument(format!("no bundled instance `{name}`")))?;
    let manifest = serde_json::to_value(Manifest::from_instance(inst)).expect("manifest serializes");
    Ok(Report::new(manifest, true).row("instance", name))
}
