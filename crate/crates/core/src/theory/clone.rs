use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fincat::{tuples, Violation, MAX_RANK};
use crate::par;

/// A truncated abstract clone: all `n`-ary operations for `n < rank`,
/// projections, and substitution.
///
/// Operation names within one arity are sorted; operations are referred to
/// by their index in that list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbstractClone {
    name: String,
    rank: usize,
    ops: Vec<Vec<String>>,
    proj: Vec<Vec<usize>>,
    // subst[m][n][w * |ops n|^m + index of (psi_j)] for w in ops(m), psi_j in ops(n)
    subst: Vec<Vec<Vec<usize>>>,
}

/// Index of a tuple of radix `r` (first entry most significant).
pub(crate) fn radix_index(digits: &[usize], r: usize) -> usize {
    digits.iter().fold(0, |acc, &d| acc * r + d)
}

impl AbstractClone {
    /// Builds a clone from a semantic description: `ops(n)` lists the
    /// operations as (name, key), `proj(n, i)` gives the key of a projection
    /// and `subst(w, psi, n)` substitutes `n`-ary keys into `w`.
    pub fn from_semantics<K, O, P, S>(name: &str, rank: usize, ops: O, proj: P, subst: S) -> Result<Self>
    where
        K: Eq + Hash + Clone + Send + Sync,
        O: Fn(usize) -> Vec<(String, K)>,
        P: Fn(usize, usize) -> K,
        S: Fn(&K, &[&K], usize) -> K + Sync,
    {
        check_rank(rank)?;
        let mut names = Vec::with_capacity(rank);
        let mut keys: Vec<Vec<K>> = Vec::with_capacity(rank);
        for n in 0..rank {
            let mut list = ops(n);
            list.sort_by(|a, b| a.0.cmp(&b.0));
            names.push(list.iter().map(|(s, _)| s.clone()).collect::<Vec<_>>());
            keys.push(list.into_iter().map(|(_, k)| k).collect());
        }
        let index: Vec<HashMap<K, usize>> =
            keys.iter().map(|ks| ks.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect()).collect();
        let lookup = |n: usize, k: &K| -> Result<usize> {
            index[n].get(k).copied().ok_or_else(|| {
                Error::InvalidClone(vec![Violation::new(
                    "closure",
                    vec![format!("arity {n}")],
                    "an operation is missing from the operation list",
                )])
            })
        };
        let proj: Vec<Vec<usize>> =
            (0..rank).map(|n| (0..n).map(|i| lookup(n, &proj(n, i))).collect::<Result<_>>()).collect::<Result<_>>()?;
        let mut table = Vec::with_capacity(rank);
        for m in 0..rank {
            let mut per_n = Vec::with_capacity(rank);
            for n in 0..rank {
                let rows: Vec<Result<Vec<usize>>> = par::map_range(keys[m].len(), |w| {
                    tuples(&vec![keys[n].len(); m])
                        .map(|psi| {
                            let args: Vec<&K> = psi.iter().map(|&j| &keys[n][j]).collect();
                            lookup(n, &subst(&keys[m][w], &args, n))
                        })
                        .collect()
                });
                let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
                per_n.push(rows.concat());
            }
            table.push(per_n);
        }
        Ok(AbstractClone { name: name.to_string(), rank, ops: names, proj, subst: table })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn ops(&self, n: usize) -> &[String] {
        &self.ops[n]
    }

    pub fn num_ops(&self, n: usize) -> usize {
        self.ops[n].len()
    }

    pub fn op(&self, n: usize, name: &str) -> Option<usize> {
        self.ops[n].binary_search_by(|s| s.as_str().cmp(name)).ok()
    }

    pub fn proj(&self, n: usize, i: usize) -> usize {
        self.proj[n][i]
    }

    /// `w(psi_1, .., psi_m)` for `w` of arity `m = psi.len()` and `n`-ary `psi_j`.
    pub fn subst(&self, w: usize, n: usize, psi: &[usize]) -> usize {
        let m = psi.len();
        let stride = self.ops[n].len().pow(m as u32);
        self.subst[m][n][w * stride + radix_index(psi, self.ops[n].len())]
    }

    /// Renames the variables of an `n`-ary `w` along `map: n -> n2`.
    pub fn rename(&self, w: usize, n2: usize, map: &[usize]) -> usize {
        let args: Vec<usize> = map.iter().map(|&i| self.proj[n2][i]).collect();
        self.subst(w, n2, &args)
    }

    /// The same clone restricted to arities below `rank`.
    pub fn truncate(&self, rank: usize) -> Result<Self> {
        check_rank(rank)?;
        if rank > self.rank {
            return Err(Error::InvalidArgument(format!("cannot extend a rank-{} clone to rank {rank}", self.rank)));
        }
        Ok(AbstractClone {
            name: self.name.clone(),
            rank,
            ops: self.ops[..rank].to_vec(),
            proj: self.proj[..rank].to_vec(),
            subst: self.subst[..rank].iter().map(|per_n| per_n[..rank].to_vec()).collect(),
        })
    }

    pub fn to_doc(&self) -> CloneDoc {
        let mut subst = Vec::new();
        for m in 0..self.rank {
            for n in 0..self.rank {
                for w in 0..self.ops[m].len() {
                    for psi in tuples(&vec![self.ops[n].len(); m]) {
                        subst.push(SubstEntry {
                            op: self.ops[m][w].clone(),
                            arity: n,
                            args: psi.iter().map(|&j| self.ops[n][j].clone()).collect(),
                            result: self.ops[n][self.subst(w, n, &psi)].clone(),
                        });
                    }
                }
            }
        }
        CloneDoc {
            name: self.name.clone(),
            rank: self.rank,
            ops: self.ops.clone(),
            proj: self.proj.iter().enumerate().map(|(n, ps)| ps.iter().map(|&p| self.ops[n][p].clone()).collect()).collect(),
            subst,
        }
    }

    /// Resolves a document; structural problems and law violations are errors.
    pub fn from_doc(doc: &CloneDoc) -> Result<Self> {
        let cl = resolve(doc).map_err(Error::InvalidClone)?;
        let v = validate_clone(&cl);
        if v.is_empty() {
            Ok(cl)
        } else {
            Err(Error::InvalidClone(v))
        }
    }
}

fn check_rank(rank: usize) -> Result<()> {
    if rank == 0 || rank > MAX_RANK {
        return Err(Error::InvalidArgument(format!("clone rank must lie in 1..={MAX_RANK}")));
    }
    Ok(())
}

/// Interchange form of a clone. `ops[n]` and `proj[n]` are indexed by arity;
/// each substitution entry substitutes `args` (all of arity `arity`) into `op`
/// (of arity `args.len()`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CloneDoc {
    pub name: String,
    pub rank: usize,
    pub ops: Vec<Vec<String>>,
    pub proj: Vec<Vec<String>>,
    pub subst: Vec<SubstEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubstEntry {
    pub op: String,
    pub arity: usize,
    pub args: Vec<String>,
    pub result: String,
}

fn resolve(doc: &CloneDoc) -> std::result::Result<AbstractClone, Vec<Violation>> {
    let bad = |law: &str, items: Vec<String>, detail: &str| vec![Violation::new(law, items, detail)];
    if doc.rank == 0 || doc.rank > MAX_RANK {
        return Err(bad("rank", vec![doc.rank.to_string()], "rank out of range"));
    }
    if doc.ops.len() != doc.rank || doc.proj.len() != doc.rank {
        return Err(bad("shape", vec![], "ops and proj must list every arity below the rank"));
    }
    let mut ops = doc.ops.clone();
    for (n, list) in ops.iter_mut().enumerate() {
        list.sort();
        if list.windows(2).any(|w| w[0] == w[1]) {
            return Err(bad("unique operations", vec![format!("arity {n}")], "duplicate operation name"));
        }
    }
    let find = |n: usize, s: &str| ops[n].binary_search_by(|x| x.as_str().cmp(s)).ok();
    let mut proj = Vec::with_capacity(doc.rank);
    for (n, ps) in doc.proj.iter().enumerate() {
        if ps.len() != n {
            return Err(bad("projections", vec![format!("arity {n}")], "wrong number of projections"));
        }
        let resolved: Option<Vec<usize>> = ps.iter().map(|p| find(n, p)).collect();
        proj.push(resolved.ok_or_else(|| bad("projections", vec![format!("arity {n}")], "unknown projection"))?);
    }
    let mut subst: Vec<Vec<Vec<Option<usize>>>> = (0..doc.rank)
        .map(|m| (0..doc.rank).map(|n| vec![None; ops[m].len() * ops[n].len().pow(m as u32)]).collect())
        .collect();
    let mut report = Vec::new();
    for e in &doc.subst {
        let (m, n) = (e.args.len(), e.arity);
        if m >= doc.rank || n >= doc.rank {
            report.push(Violation::new("substitution", vec![e.op.clone()], "arity out of range"));
            continue;
        }
        let w = find(m, &e.op);
        let args: Option<Vec<usize>> = e.args.iter().map(|a| find(n, a)).collect();
        let r = find(n, &e.result);
        match (w, args, r) {
            (Some(w), Some(args), Some(r)) => {
                let slot = &mut subst[m][n][w * ops[n].len().pow(m as u32) + radix_index(&args, ops[n].len())];
                if slot.is_some() {
                    report.push(Violation::new("substitution", vec![e.op.clone()], "duplicate entry"));
                }
                *slot = Some(r);
            }
            _ => report.push(Violation::new("substitution", vec![e.op.clone()], "unresolved operation")),
        }
    }
    let mut table = Vec::with_capacity(doc.rank);
    for (m, per_n) in subst.into_iter().enumerate() {
        let mut rows = Vec::with_capacity(doc.rank);
        for (n, row) in per_n.into_iter().enumerate() {
            if row.iter().any(|x| x.is_none()) {
                report.push(Violation::new(
                    "substitution total",
                    vec![format!("arity {m} into arity {n}")],
                    "missing substitution entries",
                ));
            }
            rows.push(row.into_iter().map(|x| x.unwrap_or(0)).collect());
        }
        table.push(rows);
    }
    if !report.is_empty() {
        return Err(report);
    }
    Ok(AbstractClone { name: doc.name.clone(), rank: doc.rank, ops, proj, subst: table })
}

/// Validates the document form: structure first, then the clone laws.
pub fn validate_clone_doc(doc: &CloneDoc) -> Vec<Violation> {
    match resolve(doc) {
        Ok(cl) => validate_clone(&cl),
        Err(v) => v,
    }
}

/// Projection laws and associativity of substitution, exhaustively.
pub fn validate_clone(cl: &AbstractClone) -> Vec<Violation> {
    let rank = cl.rank;
    let mut report = Vec::new();
    for m in 0..rank {
        for n in 0..rank {
            // subst(proj(m, i), psi) = psi_i
            for i in 0..m {
                if tuples(&vec![cl.num_ops(n); m]).any(|psi| cl.subst(cl.proj(m, i), n, &psi) != psi[i]) {
                    report.push(Violation::new(
                        "projection law",
                        vec![cl.ops[m][cl.proj(m, i)].clone()],
                        format!("substituting into a projection of arity {m} does not select argument {i}"),
                    ));
                }
            }
        }
        // subst(w, (proj(m, j))_j) = w
        let ids: Vec<usize> = (0..m).map(|j| cl.proj(m, j)).collect();
        for w in 0..cl.num_ops(m) {
            if cl.subst(w, m, &ids) != w {
                report.push(Violation::new(
                    "projection law",
                    vec![cl.ops[m][w].clone()],
                    "substituting the projections does not return the operation",
                ));
            }
        }
    }
    let triples: Vec<(usize, usize, usize)> =
        (0..rank).flat_map(|m| (0..rank).flat_map(move |n| (0..rank).map(move |p| (m, n, p)))).collect();
    let found: Vec<Option<Violation>> = par::map(&triples, |&(m, n, p)| {
        for w in 0..cl.num_ops(m) {
            for psi in tuples(&vec![cl.num_ops(n); m]) {
                let inner = cl.subst(w, n, &psi);
                for chi in tuples(&vec![cl.num_ops(p); n]) {
                    let lhs = cl.subst(inner, p, &chi);
                    let composed: Vec<usize> = psi.iter().map(|&q| cl.subst(q, p, &chi)).collect();
                    if lhs != cl.subst(w, p, &composed) {
                        return Some(Violation::new(
                            "substitution associativity",
                            vec![cl.ops[m][w].clone()],
                            format!("fails for arities ({m}, {n}, {p})"),
                        ));
                    }
                }
            }
        }
        None
    });
    report.extend(found.into_iter().flatten());
    report
}

/// A finite monoid given by its multiplication table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Monoid {
    pub elements: Vec<String>,
    pub table: Vec<Vec<usize>>,
    pub unit: usize,
}

impl Monoid {
    pub fn new(elements: Vec<String>, table: Vec<Vec<usize>>, unit: usize) -> Result<Self> {
        let k = elements.len();
        let shape = unit < k && table.len() == k && table.iter().all(|r| r.len() == k && r.iter().all(|&x| x < k));
        if !shape {
            return Err(Error::InvalidArgument("monoid table has the wrong shape".into()));
        }
        if elements.iter().any(|e| e.is_empty() || e.contains(['.', ',', ';', '|', '+'])) {
            return Err(Error::InvalidArgument("monoid element names must be plain words".into()));
        }
        let m = Monoid { elements, table, unit };
        let unital = (0..k).all(|a| m.mul(m.unit, a) == a && m.mul(a, m.unit) == a);
        let assoc = (0..k).all(|a| (0..k).all(|b| (0..k).all(|c| m.mul(m.mul(a, b), c) == m.mul(a, m.mul(b, c)))));
        if !(unital && assoc) {
            return Err(Error::InvalidArgument("table is not a monoid".into()));
        }
        Ok(m)
    }

    /// The group of order two, `{e, g}` with `g g = e`.
    pub fn z2() -> Self {
        Monoid { elements: vec!["e".into(), "g".into()], table: vec![vec![0, 1], vec![1, 0]], unit: 0 }
    }

    /// The two-element monoid `{e, a}` with `a a = a`.
    pub fn idempotent() -> Self {
        Monoid { elements: vec!["e".into(), "a".into()], table: vec![vec![0, 1], vec![1, 1]], unit: 0 }
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

pub(crate) fn var(i: usize) -> String {
    format!("x{i}")
}

fn mask_name(mask: u32, sep: &str, empty: &str) -> String {
    if mask == 0 {
        return empty.to_string();
    }
    (0..32).filter(|i| mask >> i & 1 == 1).map(|i| var(i as usize)).collect::<Vec<_>>().join(sep)
}

/// Only projections.
pub fn trivial(rank: usize) -> Result<AbstractClone> {
    AbstractClone::from_semantics(
        "trivial",
        rank,
        |n| (0..n).map(|i| (var(i), i)).collect(),
        |_, i| i,
        |&w, psi, _| *psi[w],
    )
}

/// Projections plus one constant `c`.
pub fn pointed(rank: usize) -> Result<AbstractClone> {
    // None is the constant
    AbstractClone::from_semantics(
        "pointed",
        rank,
        |n| std::iter::once(("c".to_string(), None)).chain((0..n).map(|i| (var(i), Some(i)))).collect(),
        |_, i| Some(i),
        |w, psi, _| match w {
            None => None,
            Some(i) => *psi[*i],
        },
    )
}

/// `n`-ary operations are the nonempty subsets of `n` (joins of variables).
pub fn semilattice(rank: usize) -> Result<AbstractClone> {
    AbstractClone::from_semantics(
        "semilattice",
        rank,
        |n| (1u32..1 << n).map(|s| (mask_name(s, "|", ""), s)).collect(),
        |_, i| 1 << i,
        |&w, psi, _| (0..psi.len()).filter(|j| w >> j & 1 == 1).fold(0, |acc, j| acc | psi[j]),
    )
}

/// `n`-ary operations are all subsets of `n` (sums of variables over F2).
pub fn f2_vector(rank: usize) -> Result<AbstractClone> {
    AbstractClone::from_semantics(
        "f2",
        rank,
        |n| (0u32..1 << n).map(|s| (mask_name(s, "+", "0"), s)).collect(),
        |_, i| 1 << i,
        |&w, psi, _| (0..psi.len()).filter(|j| w >> j & 1 == 1).fold(0, |acc, j| acc ^ psi[j]),
    )
}

/// Left `M`-sets: `n`-ary operations are `a . x_i` for `a` in `M`, `i < n`.
pub fn m_set(name: &str, rank: usize, monoid: &Monoid) -> Result<AbstractClone> {
    let label = |a: usize, i: usize| {
        if a == monoid.unit {
            var(i)
        } else {
            format!("{}.{}", monoid.elements[a], var(i))
        }
    };
    AbstractClone::from_semantics(
        name,
        rank,
        |n| (0..monoid.len()).flat_map(|a| (0..n).map(move |i| (label(a, i), (a, i)))).collect(),
        |_, i| (monoid.unit, i),
        |&(a, i), psi, _| {
            let (b, k) = *psi[i];
            (monoid.mul(a, b), k)
        },
    )
}

pub const BUILTIN_NAMES: [&str; 6] = ["trivial", "pointed", "semilattice", "f2", "mset2", "mset-idem"];

pub fn builtin(name: &str, rank: usize) -> Result<AbstractClone> {
    match name {
        "trivial" => trivial(rank),
        "pointed" => pointed(rank),
        "semilattice" => semilattice(rank),
        "f2" => f2_vector(rank),
        "mset2" => m_set("mset2", rank, &Monoid::z2()),
        "mset-idem" => m_set("mset-idem", rank, &Monoid::idempotent()),
        other => Err(Error::InvalidArgument(format!("unknown theory `{other}`"))),
    }
}

/// Operation counts per arity, for reports.
pub fn op_counts(cl: &AbstractClone) -> BTreeMap<usize, usize> {
    (0..cl.rank()).map(|n| (n, cl.num_ops(n))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_validate() {
        for name in BUILTIN_NAMES {
            let cl = builtin(name, 4).unwrap();
            assert_eq!(validate_clone(&cl), vec![], "{name}");
        }
    }

    #[test]
    fn operation_counts() {
        assert_eq!(pointed(3).unwrap().num_ops(1), 2);
        assert_eq!(semilattice(4).unwrap().num_ops(2), 3);
        assert_eq!(semilattice(4).unwrap().num_ops(0), 0);
        assert_eq!(f2_vector(4).unwrap().num_ops(3), 8);
        assert_eq!(m_set("m", 4, &Monoid::z2()).unwrap().num_ops(3), 6);
        assert_eq!(trivial(3).unwrap().ops(2), ["x0", "x1"]);
    }

    #[test]
    fn semilattice_substitution_is_union() {
        let cl = semilattice(4).unwrap();
        let w = cl.op(2, "x0|x1").unwrap();
        let a = cl.op(3, "x0").unwrap();
        let b = cl.op(3, "x1|x2").unwrap();
        assert_eq!(cl.ops(3)[cl.subst(w, 3, &[a, b])], "x0|x1|x2");
    }

    #[test]
    fn broken_projection_law_is_reported() {
        let mut doc = trivial(3).unwrap().to_doc();
        // x0(x1, x0) should be x1
        for e in &mut doc.subst {
            if e.op == "x0" && e.args == ["x1", "x0"] && e.arity == 2 {
                e.result = "x0".into();
            }
        }
        let v = validate_clone_doc(&doc);
        assert!(v.iter().any(|v| v.law == "projection law"), "{v:?}");
    }

    #[test]
    fn doc_round_trip() {
        let cl = pointed(3).unwrap();
        assert_eq!(AbstractClone::from_doc(&cl.to_doc()).unwrap(), cl);
    }

    #[test]
    fn truncation_keeps_lower_arities() {
        let cl = f2_vector(4).unwrap();
        let low = cl.truncate(3).unwrap();
        assert_eq!(low, f2_vector(3).unwrap());
        assert!(cl.truncate(5).is_err());
    }

    #[test]
    fn monoid_validation() {
        assert!(Monoid::new(vec!["e".into(), "g".into()], vec![vec![0, 1], vec![1, 1]], 1).is_err());
        assert!(Monoid::new(Monoid::z2().elements, Monoid::z2().table, 0).is_ok());
    }

}
