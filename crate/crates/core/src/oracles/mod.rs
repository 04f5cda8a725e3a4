//! Brute-force models of the free algebras of the built-in theories,
//! interpreting operations straight from their names.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::tuples;
use crate::par;
use crate::setval::Check;
use crate::theory::{hom_extend, AbstractClone, Algebra, AlgebraicTheory, FreeAlgebra, Monoid, Triple};

/// What the carrier elements are.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleKind {
    /// `X0` itself.
    Trivial,
    /// `X0 + {*}`, the point last.
    Pointed,
    /// Nonempty subsets of `X0`; element `i` is the bitmask `i + 1`.
    Semilattice,
    /// All subsets of `X0`; element `i` is the bitmask `i`.
    F2,
    /// `M x X0`; element `a * |X0| + g` is `(a, g)`.
    MSet(Monoid),
    /// A semilattice given by its join table; generators are ignored.
    Join(Vec<Vec<usize>>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleAlgebra {
    pub theory: String,
    pub kind: OracleKind,
    pub carrier: Vec<String>,
    /// Image of each generator in the carrier.
    pub generators: Vec<usize>,
}

// an operation name, parsed
#[derive(Debug, Clone, PartialEq, Eq)]
enum Term {
    Constant,
    Zero,
    Join(Vec<usize>),
    Sum(Vec<usize>),
    Act(Option<String>, usize),
}

fn parse_var(s: &str) -> Option<usize> {
    s.strip_prefix('x')?.parse().ok()
}

fn parse_term(name: &str) -> Option<Term> {
    match name {
        "c" => return Some(Term::Constant),
        "0" => return Some(Term::Zero),
        _ => {}
    }
    if let Some((a, v)) = name.split_once('.') {
        return Some(Term::Act(Some(a.to_string()), parse_var(v)?));
    }
    if name.contains('+') {
        return name.split('+').map(parse_var).collect::<Option<_>>().map(Term::Sum);
    }
    if name.contains('|') {
        return name.split('|').map(parse_var).collect::<Option<_>>().map(Term::Join);
    }
    Some(Term::Act(None, parse_var(name)?))
}

fn subset_name(mask: usize, gens: &[String]) -> String {
    let parts: Vec<&str> = (0..gens.len()).filter(|g| mask >> g & 1 == 1).map(|g| gens[g].as_str()).collect();
    format!("{{{}}}", parts.join(","))
}

/// The free algebra on `generators` for a built-in theory.
pub fn oracle_free(theory: &str, generators: &[String]) -> Result<OracleAlgebra> {
    let k = generators.len();
    let (kind, carrier, gens): (OracleKind, Vec<String>, Vec<usize>) = match theory {
        "trivial" => (OracleKind::Trivial, generators.to_vec(), (0..k).collect()),
        "pointed" => {
            let mut c = generators.to_vec();
            c.push("*".into());
            (OracleKind::Pointed, c, (0..k).collect())
        }
        "semilattice" => (
            OracleKind::Semilattice,
            (1..1usize << k).map(|m| subset_name(m, generators)).collect(),
            (0..k).map(|g| (1 << g) - 1).collect(),
        ),
        "f2" => (OracleKind::F2, (0..1usize << k).map(|m| subset_name(m, generators)).collect(), (0..k).map(|g| 1 << g).collect()),
        "mset2" | "mset-idem" => {
            let m = if theory == "mset2" { Monoid::z2() } else { Monoid::idempotent() };
            let carrier = m.elements.iter().flat_map(|a| generators.iter().map(move |g| format!("{a}.{g}"))).collect();
            let gens = (0..k).map(|g| m.unit * k + g).collect();
            (OracleKind::MSet(m), carrier, gens)
        }
        other => return Err(Error::InvalidArgument(format!("no oracle for theory `{other}`"))),
    };
    Ok(OracleAlgebra { theory: theory.to_string(), kind, carrier, generators: gens })
}

/// The chain `0 < 1 < .. < size-1` as a semilattice under max, with no
/// generators.
pub fn chain_semilattice(size: usize) -> OracleAlgebra {
    let table = (0..size).map(|a| (0..size).map(|b| a.max(b)).collect()).collect();
    OracleAlgebra {
        theory: "semilattice".into(),
        kind: OracleKind::Join(table),
        carrier: (0..size).map(|i| i.to_string()).collect(),
        generators: Vec::new(),
    }
}

/// An operation interpretation that failed the clone laws.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CompatibilityFailure {
    Projection { arity: usize, index: usize },
    Substitution { outer: String, inner: Vec<String>, args: Vec<usize> },
}

impl OracleAlgebra {
    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    fn eval(&self, term: &Term, args: &[usize]) -> Option<usize> {
        let k = self.generators.len();
        let get = |i: usize| args.get(i).copied();
        match (&self.kind, term) {
            (OracleKind::Pointed, Term::Constant) => Some(self.carrier.len() - 1),
            (OracleKind::F2, Term::Zero) => Some(0),
            (OracleKind::Semilattice, Term::Join(vs)) => {
                vs.iter().try_fold(0, |acc, &i| Some(acc | (get(i)? + 1))).map(|m| m - 1)
            }
            (OracleKind::Join(table), Term::Join(vs)) => {
                let (first, rest) = vs.split_first()?;
                rest.iter().try_fold(get(*first)?, |acc, &i| Some(table[acc][get(i)?]))
            }
            (OracleKind::F2, Term::Sum(vs)) => vs.iter().try_fold(0, |acc, &i| Some(acc ^ get(i)?)),
            (OracleKind::MSet(m), Term::Act(Some(a), i)) => {
                let a = m.elements.iter().position(|e| e == a)?;
                let v = get(*i)?;
                Some(m.mul(a, v / k) * k + v % k)
            }
            (_, Term::Act(None, i)) => get(*i),
            (OracleKind::Semilattice | OracleKind::Join(_) | OracleKind::F2, Term::Join(_) | Term::Sum(_)) => None,
            _ => None,
        }
    }

    /// `op(args)` for an operation named as in the built-in clones.
    pub fn interpret(&self, op: &str, args: &[usize]) -> Result<usize> {
        parse_term(op)
            .and_then(|t| self.eval(&t, args))
            .ok_or_else(|| Error::InvalidArgument(format!("`{op}` is not an operation of {} on {} arguments", self.theory, args.len())))
    }

    /// Checks the projection laws and `op(subst) = op(op_i(v))` over every
    /// operation and argument tuple of the clone.
    pub fn compatibility(&self, cl: &AbstractClone) -> Result<Check<CompatibilityFailure>> {
        let s = self.carrier.len();
        for n in 0..cl.rank() {
            for i in 0..n {
                for v in tuples(&vec![s; n]) {
                    if self.interpret(&cl.ops(n)[cl.proj(n, i)], &v)? != v[i] {
                        return Ok(Check::Fails(CompatibilityFailure::Projection { arity: n, index: i }));
                    }
                }
            }
        }
        // all names must parse before the parallel sweep
        for n in 0..cl.rank() {
            for op in cl.ops(n) {
                if parse_term(op).is_none() {
                    return Err(Error::InvalidArgument(format!("unparseable operation `{op}`")));
                }
            }
        }
        let cases: Vec<(usize, usize, usize)> = (0..cl.rank())
            .flat_map(|m| (0..cl.rank()).flat_map(move |n| (0..cl.num_ops(m)).map(move |w| (m, n, w))))
            .collect();
        let found = par::find_first(cases.len(), |c| {
            let (m, n, w) = cases[c];
            for psi in tuples(&vec![cl.num_ops(n); m]) {
                let composite = &cl.ops(n)[cl.subst(w, n, &psi)];
                for v in tuples(&vec![s; n]) {
                    let inner: Vec<usize> = psi.iter().map(|&p| self.interpret(&cl.ops(n)[p], &v).unwrap_or(usize::MAX)).collect();
                    let lhs = self.interpret(composite, &v).ok();
                    let rhs = if inner.contains(&usize::MAX) { None } else { self.interpret(&cl.ops(m)[w], &inner).ok() };
                    if lhs.is_none() || lhs != rhs {
                        return Some(CompatibilityFailure::Substitution {
                            outer: cl.ops(m)[w].clone(),
                            inner: psi.iter().map(|&p| cl.ops(n)[p].clone()).collect(),
                            args: v,
                        });
                    }
                }
            }
            None
        });
        Ok(Check::from_option(found))
    }

    /// The oracle as a product-preserving functor on the theory, with the
    /// position of each carrier element in the algebra's carrier.
    pub fn to_algebra(&self, theory: Arc<AlgebraicTheory>) -> Result<(Algebra, Vec<usize>)> {
        let cl = &theory.clone;
        let terms: Vec<Vec<Term>> = (0..cl.rank())
            .map(|n| {
                cl.ops(n)
                    .iter()
                    .map(|op| parse_term(op).ok_or_else(|| Error::InvalidArgument(format!("unparseable operation `{op}`"))))
                    .collect()
            })
            .collect::<Result<_>>()?;
        for (n, row) in terms.iter().enumerate() {
            for (w, t) in row.iter().enumerate() {
                if tuples(&vec![self.len(); n]).any(|v| self.eval(t, &v).is_none()) {
                    return Err(Error::InvalidArgument(format!("`{}` is not an operation of {}", cl.ops(n)[w], self.theory)));
                }
            }
        }
        Algebra::from_interpretation(theory, &self.carrier, |n, w, args| self.eval(&terms[n][w], args).expect("checked"))
    }

    /// A term over the generators denoting each carrier element, as a
    /// triple in the free algebra's notation; `None` off the image of the
    /// generators.
    pub fn term_of(&self, cl: &AbstractClone, element: usize) -> Option<Triple> {
        let k = self.generators.len();
        let all = |mask: usize, sep: &str, empty: &str| {
            let gs: Vec<usize> = (0..k).filter(|g| mask >> g & 1 == 1).collect();
            let name = if gs.is_empty() {
                empty.to_string()
            } else {
                (0..gs.len()).map(|i| format!("x{i}")).collect::<Vec<_>>().join(sep)
            };
            (gs.len(), name, gs)
        };
        let (n, name, x) = match &self.kind {
            OracleKind::Trivial => (1, "x0".to_string(), vec![element]),
            OracleKind::Pointed if element == k => (0, "c".to_string(), vec![]),
            OracleKind::Pointed => (1, "x0".to_string(), vec![element]),
            OracleKind::Semilattice => all(element + 1, "|", ""),
            OracleKind::F2 => all(element, "+", "0"),
            OracleKind::MSet(m) => {
                let (a, g) = (element / k, element % k);
                let name = if a == m.unit { "x0".to_string() } else { format!("{}.x0", m.elements[a]) };
                (1, name, vec![g])
            }
            OracleKind::Join(_) => return None,
        };
        if n >= cl.rank() {
            return None;
        }
        Some(Triple { n, ops: vec![cl.op(n, &name)?], x })
    }
}

/// Why a comparison with an oracle failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComparisonFailure {
    NotNatural,
    NotUnique,
    /// An oracle element without a term in the free algebra's rank.
    NoTerm(usize),
    /// `forward(back(e)) != e` for an oracle element.
    OracleRoundTrip(usize),
    /// `back(forward(e)) != e` for a free-algebra element.
    FreeRoundTrip(usize),
    /// `forward(op(args)) != op(forward(args))`.
    Operation { op: String, args: Vec<usize> },
}

/// The bijection between the free algebra's carrier and the oracle's.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeComparison {
    pub forward: Vec<usize>,
    pub backward: Vec<usize>,
    pub outcome: Check<ComparisonFailure>,
}

impl FreeComparison {
    pub fn isomorphic(&self) -> bool {
        self.outcome.holds()
    }
}

/// Compares `fr` with an oracle on the same generators: the unique
/// extension of the generator map forward, terms evaluated back.
pub fn compare_free(fr: &FreeAlgebra, oracle: &OracleAlgebra) -> Result<FreeComparison> {
    if oracle.generators.len() != fr.generators.len() {
        return Err(Error::ShapeMismatch("oracle and free algebra have different generators".into()));
    }
    let th = fr.theory();
    let cl = &th.clone;
    let (y, position) = oracle.to_algebra(th.clone())?;
    let mut index = vec![0; position.len()];
    for (i, &p) in position.iter().enumerate() {
        index[p] = i;
    }
    let gens: Vec<usize> = oracle.generators.iter().map(|&g| position[g]).collect();
    let ext = hom_extend(fr, &y, &gens)?;
    let forward: Vec<usize> = ext.components[1].iter().map(|&e| index[e]).collect();
    let fail = |f: ComparisonFailure, backward: Vec<usize>| Ok(FreeComparison { forward: forward.clone(), backward, outcome: Check::Fails(f) });
    if !ext.natural {
        return fail(ComparisonFailure::NotNatural, vec![]);
    }
    if ext.solutions != 1 {
        return fail(ComparisonFailure::NotUnique, vec![]);
    }
    let mut backward = Vec::with_capacity(oracle.len());
    for e in 0..oracle.len() {
        match oracle.term_of(cl, e) {
            Some(t) => backward.push(fr.element_of(&t)?),
            None => return fail(ComparisonFailure::NoTerm(e), backward),
        }
    }
    if let Some(e) = (0..oracle.len()).find(|&e| forward[backward[e]] != e) {
        return fail(ComparisonFailure::OracleRoundTrip(e), backward);
    }
    if let Some(e) = (0..fr.size(1)).find(|&e| backward[forward[e]] != e) {
        return fail(ComparisonFailure::FreeRoundTrip(e), backward);
    }
    for n in 0..th.rank() {
        for (w, op) in cl.ops(n).iter().enumerate() {
            for args in tuples(&vec![fr.size(1); n]) {
                let mapped: Vec<usize> = args.iter().map(|&a| forward[a]).collect();
                if forward[fr.action(w, &args)] != oracle.interpret(op, &mapped)? {
                    return fail(ComparisonFailure::Operation { op: op.clone(), args }, backward);
                }
            }
        }
    }
    Ok(FreeComparison { forward, backward, outcome: Check::Holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::{builtin, free_algebra, theory_of, BUILTIN_NAMES};

    fn gens(k: usize) -> Vec<String> {
        (0..k).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
    }

    #[test]
    fn carrier_sizes() {
        assert_eq!(oracle_free("trivial", &gens(3)).unwrap().len(), 3);
        assert_eq!(oracle_free("semilattice", &gens(2)).unwrap().len(), 3);
        assert_eq!(oracle_free("f2", &gens(2)).unwrap().len(), 4);
        assert_eq!(oracle_free("pointed", &gens(0)).unwrap().len(), 1);
        assert_eq!(oracle_free("mset2", &gens(2)).unwrap().len(), 4);
        assert!(oracle_free("groups", &gens(1)).is_err());
    }

    #[test]
    fn names_and_interpretation() {
        let o = oracle_free("semilattice", &gens(2)).unwrap();
        assert_eq!(o.carrier, vec!["{a}", "{b}", "{a,b}"]);
        assert_eq!(o.interpret("x0|x1", &[0, 1]).unwrap(), 2);
        let f = oracle_free("f2", &gens(2)).unwrap();
        assert_eq!(f.interpret("x0+x1", &[3, 1]).unwrap(), 2);
        assert_eq!(f.interpret("0", &[]).unwrap(), 0);
        let m = oracle_free("mset2", &gens(2)).unwrap();
        assert_eq!(m.carrier[m.interpret("g.x0", &[1]).unwrap()], "g.b");
        assert!(o.interpret("c", &[]).is_err());
    }

    #[test]
    fn oracles_respect_their_clones() {
        for name in BUILTIN_NAMES {
            let cl = builtin(name, 4).unwrap();
            for k in 0..=2 {
                let o = oracle_free(name, &gens(k)).unwrap();
                assert!(o.compatibility(&cl).unwrap().holds(), "{name} {k}");
            }
        }
        let cl = builtin("semilattice", 4).unwrap();
        for s in 1..=4 {
            assert!(chain_semilattice(s).compatibility(&cl).unwrap().holds());
        }
        // an oracle for the wrong theory is caught
        let o = oracle_free("f2", &gens(1)).unwrap();
        let sl = builtin("semilattice", 3).unwrap();
        assert!(!o.compatibility(&sl).unwrap().holds());
    }

    #[test]
    fn free_algebras_match_oracles() {
        for name in BUILTIN_NAMES {
            let t = Arc::new(theory_of(&builtin(name, 3).unwrap()).unwrap());
            for k in 0..=2 {
                let fr = free_algebra(t.clone(), &gens(k)).unwrap();
                let o = oracle_free(name, &gens(k)).unwrap();
                let c = compare_free(&fr, &o).unwrap();
                assert!(c.isomorphic(), "{name} {k}: {:?}", c.outcome);
            }
        }
    }

    #[test]
    fn mismatched_oracle_is_not_isomorphic() {
        let t = Arc::new(theory_of(&builtin("pointed", 3).unwrap()).unwrap());
        let fr = free_algebra(t, &gens(1)).unwrap();
        let mut o = oracle_free("pointed", &gens(1)).unwrap();
        // send the generator to the base point
        o.generators = vec![1];
        let c = compare_free(&fr, &o).unwrap();
        assert!(!c.isomorphic());
    }
}
