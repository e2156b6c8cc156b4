//! Canonical JSON encodings. Objects use sorted keys (serde_json's default
//! map), output has no insignificant whitespace, rationals are reduced `"p/q"`.
//! Decoders report the JSON path of the first problem.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{json, Map, Value};

use crate::dhj::{CombinatorialSubspace, CorrespondenceMeasure, StationaryLawTruncation, Word};
use crate::error::{Error, Result};
use crate::fberg::VectorSequence;
use crate::measure::{Coupling, ExactProbabilitySpace, Partition};
use crate::perm::Permutation;
use crate::removal::{FamilyEntry, RemovalInstance, UpSet};
use crate::removal::upset::{elements, mask_of};
use crate::scalar::Rational;
use crate::zd::{FiniteZdSystem, GroupRotationSystem, SubgroupSpec};

/// Compact serialisation with sorted keys.
pub fn canonical(v: &Value) -> String {
    serde_json::to_string(v).expect("values always serialise")
}

pub fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Json {
        path: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    })
}

/// A value together with its path, for error messages.
#[derive(Clone, Copy)]
pub struct At<'a> {
    pub value: &'a Value,
    path: &'a str,
}

fn fail<T>(path: &str, message: impl Into<String>) -> Result<T> {
    Err(Error::Json {
        path: if path.is_empty() { "$".into() } else { path.into() },
        message: message.into(),
    })
}

/// Re-tags a validation error from a constructor with the current path.
fn at_path<T>(path: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Json { .. } => e,
        other => Error::Json {
            path: if path.is_empty() { "$".into() } else { path.into() },
            message: other.to_string(),
        },
    })
}

impl<'a> At<'a> {
    pub fn root(value: &'a Value) -> Self {
        Self { value, path: "" }
    }

    pub fn path(&self) -> &str {
        if self.path.is_empty() {
            "$"
        } else {
            self.path
        }
    }

    fn with<T>(&self, sub: &str, value: &Value, f: impl FnOnce(At<'_>) -> Result<T>) -> Result<T> {
        let path = format!("{}{}", self.path(), sub);
        f(At { value, path: &path })
    }

    pub fn field<T>(&self, name: &str, f: impl FnOnce(At<'_>) -> Result<T>) -> Result<T> {
        let Some(obj) = self.value.as_object() else {
            return fail(self.path(), "expected an object");
        };
        match obj.get(name) {
            Some(v) => self.with(&format!(".{name}"), v, f),
            None => fail(self.path(), format!("missing field \"{name}\"")),
        }
    }

    pub fn opt_field<T>(&self, name: &str, f: impl FnOnce(At<'_>) -> Result<T>) -> Result<Option<T>> {
        match self.value.as_object().and_then(|o| o.get(name)) {
            Some(v) => self.with(&format!(".{name}"), v, f).map(Some),
            None => Ok(None),
        }
    }

    pub fn items<T>(&self, mut f: impl FnMut(At<'_>) -> Result<T>) -> Result<Vec<T>> {
        let Some(arr) = self.value.as_array() else {
            return fail(self.path(), "expected an array");
        };
        arr.iter().enumerate().map(|(i, v)| self.with(&format!("[{i}]"), v, &mut f)).collect()
    }

    pub fn usize(&self) -> Result<usize> {
        match self.value.as_u64() {
            Some(n) => Ok(n as usize),
            None => fail(self.path(), "expected a nonnegative integer"),
        }
    }

    pub fn i64(&self) -> Result<i64> {
        match self.value.as_i64() {
            Some(n) => Ok(n),
            None => fail(self.path(), "expected an integer"),
        }
    }

    pub fn str(&self) -> Result<&'a str> {
        match self.value.as_str() {
            Some(s) => Ok(s),
            None => fail(self.path(), "expected a string"),
        }
    }

    pub fn usizes(&self) -> Result<Vec<usize>> {
        self.items(|a| a.usize())
    }

    pub fn rational(&self) -> Result<Rational> {
        rational_from_json(self)
    }

    pub fn fail<T>(&self, message: impl Into<String>) -> Result<T> {
        fail(self.path(), message)
    }
}

pub fn rational_str(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn rational_to_json(q: &Rational) -> Value {
    Value::String(rational_str(q))
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim().parse::<BigInt>().ok()?, d.trim().parse::<BigInt>().ok()?),
        None => (s.parse::<BigInt>().ok()?, BigInt::one()),
    };
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

/// Accepts `"p/q"`, `"p"` or a JSON integer.
pub fn rational_from_json(at: &At<'_>) -> Result<Rational> {
    if let Some(n) = at.value.as_i64() {
        return Ok(Rational::from_integer(n.into()));
    }
    match at.value.as_str().and_then(parse_rational) {
        Some(q) => Ok(q),
        None => at.fail("expected a rational \"p/q\""),
    }
}

pub fn space_to_json(sp: &ExactProbabilitySpace<Rational>) -> Value {
    json!({
        "points": sp.points(),
        "weights": sp.weights().iter().map(rational_to_json).collect::<Vec<_>>(),
    })
}

/// `points` may be omitted, giving labels `"0"`, `"1"`, ….
pub fn space_from_json(at: &At<'_>) -> Result<ExactProbabilitySpace<Rational>> {
    let weights = at.field("weights", |w| w.items(|x| x.rational()))?;
    let points = at.opt_field("points", |p| p.items(|x| x.str().map(str::to_string)))?;
    let points = points.unwrap_or_else(|| (0..weights.len()).map(|i| i.to_string()).collect());
    at_path(at.path(), ExactProbabilitySpace::new(points, weights))
}

pub fn partition_to_json(p: &Partition) -> Value {
    json!(p.blocks())
}

/// Blocks must cover `0..n`; with `n` absent it is the number of listed points.
pub fn partition_from_json(at: &At<'_>, n: Option<usize>) -> Result<Partition> {
    let blocks = at.items(|b| b.usizes())?;
    let n = n.unwrap_or_else(|| blocks.iter().map(Vec::len).sum());
    at_path(at.path(), Partition::new(n, blocks))
}

pub fn coupling_to_json(c: &Coupling<Rational>) -> Value {
    json!({
        "arity": c.arity(),
        "mass": c.mass().iter().map(|(t, m)| json!({"tuple": t, "value": rational_to_json(m)})).collect::<Vec<_>>(),
    })
}

/// Decodes a coupling with the given marginals.
pub fn coupling_from_json(at: &At<'_>, marginals: Vec<ExactProbabilitySpace<Rational>>) -> Result<Coupling<Rational>> {
    let arity = at.field("arity", |a| a.usize())?;
    if arity != marginals.len() {
        return at.fail(format!("arity {arity} but {} marginals", marginals.len()));
    }
    let mass = at.field("mass", |m| {
        m.items(|e| Ok((e.field("tuple", |t| t.usizes())?, e.field("value", |v| v.rational())?)))
    })?;
    at_path(at.path(), Coupling::new(marginals, mass))
}

pub fn system_to_json(sys: &FiniteZdSystem<Rational>) -> Value {
    json!({
        "dim": sys.dim(),
        "space": space_to_json(sys.space()),
        "generators": sys.generators().iter().map(|g| g.images().to_vec()).collect::<Vec<_>>(),
    })
}

pub fn system_from_json(at: &At<'_>) -> Result<FiniteZdSystem<Rational>> {
    let space = at.field("space", |s| space_from_json(&s))?;
    let gens = at.field("generators", |g| {
        g.items(|p| match Permutation::from_images(p.usizes()?) {
            Some(perm) => Ok(perm),
            None => p.fail("not a permutation"),
        })
    })?;
    if let Some(dim) = at.opt_field("dim", |d| d.usize())? {
        if dim != gens.len() {
            return at.fail(format!("dim is {dim} but {} generators are listed", gens.len()));
        }
    }
    at_path(&format!("{}.generators", at.path()), FiniteZdSystem::new(space, gens))
}

pub fn subgroup_to_json(s: &SubgroupSpec) -> Value {
    json!({ "vectors": s.vectors() })
}

pub fn subgroup_from_json(at: &At<'_>) -> Result<SubgroupSpec> {
    Ok(SubgroupSpec::new(at.field("vectors", |v| v.items(|x| x.items(|y| y.i64())))?))
}

pub fn rotation_to_json(r: &GroupRotationSystem) -> Value {
    json!({ "orders": r.orders(), "phi": r.phi() })
}

pub fn rotation_from_json(at: &At<'_>) -> Result<GroupRotationSystem> {
    let orders = at.field("orders", |o| o.items(|x| x.usize().map(|n| n as u64)))?;
    let phi = at.field("phi", |p| p.items(|x| x.items(|y| y.i64())))?;
    at_path(at.path(), GroupRotationSystem::new(orders, phi))
}

pub fn upset_to_json(u: &UpSet) -> Value {
    json!(u.members().iter().map(|&m| elements(m)).collect::<Vec<_>>())
}

/// The up-set generated by the listed subsets of `[d]`.
pub fn upset_from_json(at: &At<'_>, d: usize) -> Result<UpSet> {
    let gens = at.items(|m| {
        let el = m.usizes()?;
        if el.iter().any(|&i| i >= d) {
            return m.fail(format!("coordinate outside [{d}]"));
        }
        Ok(mask_of(&el))
    })?;
    at_path(at.path(), UpSet::generate(d, &gens))
}

pub fn removal_instance_to_json(inst: &RemovalInstance<Rational>) -> Value {
    json!({
        "space": space_to_json(inst.space()),
        "coupling": coupling_to_json(inst.lambda()),
        "psi": inst.psi().iter().map(|(&e, p)| json!({"e": elements(e), "partition": partition_to_json(p)})).collect::<Vec<_>>(),
        "families": inst.families().iter().map(|fam| {
            fam.iter().map(|f| json!({"upset": upset_to_json(&f.upset), "set": f.set})).collect::<Vec<_>>()
        }).collect::<Vec<_>>(),
    })
}

pub fn removal_instance_from_json(at: &At<'_>) -> Result<RemovalInstance<Rational>> {
    let space = at.field("space", |s| space_from_json(&s))?;
    let n = space.len();
    let arity = at.field("coupling", |c| c.field("arity", |a| a.usize()))?;
    let lambda = at.field("coupling", |c| coupling_from_json(&c, vec![space.clone(); arity]))?;
    let psi: BTreeMap<u32, Partition> = at
        .field("psi", |p| {
            p.items(|e| Ok((mask_of(&e.field("e", |x| x.usizes())?), e.field("partition", |x| partition_from_json(&x, Some(n)))?)))
        })?
        .into_iter()
        .collect();
    let families = at.field("families", |f| {
        f.items(|fam| {
            fam.items(|entry| {
                let mut set = entry.field("set", |s| s.usizes())?;
                set.sort_unstable();
                set.dedup();
                Ok(FamilyEntry {
                    upset: entry.field("upset", |u| upset_from_json(&u, arity))?,
                    set,
                })
            })
        })
    })?;
    at_path(at.path(), RemovalInstance::new(space, lambda, psi, families))
}

pub fn word_from_json(at: &At<'_>, k: usize) -> Result<Word> {
    at_path(at.path(), Word::parse(k, at.str()?))
}

pub fn subspace_to_json(s: &CombinatorialSubspace) -> Value {
    json!({ "N": s.breakpoints(), "I": s.wildcards(), "w": s.template().to_string() })
}

pub fn subspace_from_json(at: &At<'_>, k: usize) -> Result<CombinatorialSubspace> {
    let n = at.field("N", |x| x.usizes())?;
    let i = at.field("I", |x| x.items(|y| y.usizes()))?;
    let w = at.field("w", |x| word_from_json(&x, k))?;
    at_path(at.path(), CombinatorialSubspace::new(k, n, i, w))
}

/// `{"sequence": [[q, …], …]}` or a bare array of vectors.
pub fn sequence_from_json(at: &At<'_>) -> Result<VectorSequence<Rational>> {
    let rows = |a: At<'_>| a.items(|v| v.items(|x| x.rational()));
    let entries = if at.value.is_array() { rows(*at)? } else { at.field("sequence", rows)? };
    at_path(at.path(), VectorSequence::new(entries))
}

pub fn correspondence_to_json(mu: &CorrespondenceMeasure) -> Value {
    let mass: Vec<Value> = mu
        .mass()
        .iter()
        .map(|(c, m)| {
            let bits: String = c.iter().map(|&b| if b { '1' } else { '0' }).collect();
            json!({"config": bits, "value": rational_to_json(m)})
        })
        .collect();
    json!({ "k": mu.alphabet(), "L": mu.depth(), "mass": mass })
}

/// Laws are given as `{"kind": "iid" | "constant", "k", "depth", "point": space}`
/// or `{"kind": "explicit", "k", "depth", "values", "mass": [{"config", "value"}]}`.
pub fn law_from_json(at: &At<'_>) -> Result<StationaryLawTruncation> {
    let kind = at.field("kind", |x| x.str().map(str::to_string))?;
    let k = at.field("k", |x| x.usize())?;
    let depth = at.field("depth", |x| x.usize())?;
    let law = match kind.as_str() {
        "iid" => StationaryLawTruncation::iid(k, depth, &at.field("point", |p| space_from_json(&p))?),
        "constant" => StationaryLawTruncation::constant_mixture(k, depth, &at.field("point", |p| space_from_json(&p))?),
        "explicit" => {
            let values = at.field("values", |x| x.usize())?;
            let mut mass: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
            for (c, m) in at.field("mass", |x| x.items(|e| Ok((e.field("config", |c| c.usizes())?, e.field("value", |v| v.rational())?))))? {
                let slot = mass.entry(c).or_insert_with(Rational::zero);
                *slot = slot.clone() + m;
            }
            StationaryLawTruncation::new(k, depth, values, mass)
        }
        other => return at.fail(format!("unknown law kind \"{other}\"")),
    };
    at_path(at.path(), law)
}

pub fn law_to_json(law: &StationaryLawTruncation) -> Value {
    json!({
        "kind": "explicit",
        "k": law.alphabet(),
        "depth": law.depth(),
        "values": law.values(),
        "mass": law.weights().iter().map(|(c, m)| json!({"config": c, "value": rational_to_json(m)})).collect::<Vec<_>>(),
    })
}

/// Builds an object from `(key, value)` pairs.
pub fn object(pairs: impl IntoIterator<Item = (&'static str, Value)>) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<_, _>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;
    use crate::zd::catalog;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    fn round<T>(v: Value, f: impl Fn(&At<'_>) -> Result<T>) -> T {
        let text = canonical(&v);
        let back = parse(&text).unwrap();
        f(&At::root(&back)).unwrap()
    }

    #[test]
    fn rationals() {
        assert_eq!(rational_str(&q(2, 4)), "1/2");
        assert_eq!(rational_str(&q(3, 1)), "3/1");
        assert_eq!(rational_str(&q(0, 5)), "0/1");
        assert_eq!(rational_str(&q(-1, 3)), "-1/3");
        assert_eq!(parse_rational("6/4"), Some(q(3, 2)));
        assert_eq!(parse_rational("7"), Some(q(7, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn space_and_partition_round_trip() {
        let sp = ExactProbabilitySpace::with_weights(vec![q(1, 4), q(3, 4)]).unwrap();
        assert_eq!(canonical(&space_to_json(&sp)), r#"{"points":["0","1"],"weights":["1/4","3/4"]}"#);
        assert_eq!(round(space_to_json(&sp), space_from_json), sp);
        let p = Partition::from_labels(&[0, 1, 0]);
        assert_eq!(canonical(&partition_to_json(&p)), "[[0,2],[1]]");
        assert_eq!(round(partition_to_json(&p), |a| partition_from_json(a, None)), p);
    }

    #[test]
    fn bad_weights_are_located() {
        let v = parse(r#"{"weights":["1/2","49/100"]}"#).unwrap();
        let e = space_from_json(&At::root(&v)).unwrap_err();
        assert!(matches!(&e, Error::Json { path, message } if path == "$" && message.contains("99/100")), "{e}");
        let v = parse(r#"{"space":{"weights":["1/2","x"]}}"#).unwrap();
        let e = At::root(&v).field("space", |s| space_from_json(&s)).unwrap_err();
        assert!(matches!(&e, Error::Json { path, .. } if path == "$.space.weights[1]"), "{e}");
        assert!(parse("{").is_err());
    }

    #[test]
    fn system_round_trip_and_diagnostics() {
        let sys = catalog::cyclic::<Rational>(4, &[1, 2]);
        let v = system_to_json(&sys);
        assert_eq!(round(v, system_from_json), sys);
        let bad = parse(r#"{"dim":2,"space":{"weights":["1/3","1/3","1/3"]},"generators":[[1,0,2],[0,2,1]]}"#).unwrap();
        let e = system_from_json(&At::root(&bad)).unwrap_err();
        assert!(e.to_string().contains("generators 0 and 1"), "{e}");
    }

    #[test]
    fn coupling_is_sorted() {
        let sp = ExactProbabilitySpace::<Rational>::uniform(2);
        let c = Coupling::product(&[sp.clone(), sp.clone()]);
        let text = canonical(&coupling_to_json(&c));
        assert!(text.starts_with(r#"{"arity":2,"mass":[{"tuple":[0,0],"value":"1/4"}"#));
        assert_eq!(round(coupling_to_json(&c), |a| coupling_from_json(a, vec![sp.clone(), sp.clone()])), c);
    }

    #[test]
    fn rotation_subgroup_subspace() {
        let r = GroupRotationSystem::new(vec![2], vec![vec![1], vec![1]]).unwrap();
        assert_eq!(round(rotation_to_json(&r), rotation_from_json), r);
        let s = SubgroupSpec::differences(3, &[0, 2]);
        assert_eq!(round(subgroup_to_json(&s), subgroup_from_json), s);
        let sub = CombinatorialSubspace::new(3, vec![2, 3], vec![vec![1], vec![3]], Word::parse(3, "121").unwrap()).unwrap();
        assert_eq!(canonical(&subspace_to_json(&sub)), r#"{"I":[[1],[3]],"N":[2,3],"w":"121"}"#);
        assert_eq!(round(subspace_to_json(&sub), |a| subspace_from_json(a, 3)), sub);
    }

    #[test]
    fn removal_instance_round_trip() {
        let sp = ExactProbabilitySpace::<Rational>::uniform(2);
        let lam = Coupling::diagonal(&sp, 2);
        let psi = BTreeMap::from([(0b11u32, Partition::singletons(2))]);
        let fam = (0..2).map(|i| vec![FamilyEntry { upset: UpSet::star(2, i), set: vec![i] }]).collect();
        let inst = RemovalInstance::new(sp, lam, psi, fam).unwrap();
        assert_eq!(round(removal_instance_to_json(&inst), removal_instance_from_json), inst);
    }

    #[test]
    fn laws() {
        let v = parse(r#"{"kind":"iid","k":2,"depth":1,"point":{"weights":["1/2","1/2"]}}"#).unwrap();
        let law = law_from_json(&At::root(&v)).unwrap();
        assert_eq!(law.weights().len(), 4);
        assert_eq!(round(law_to_json(&law), law_from_json), law);
        let bad = parse(r#"{"kind":"nope","k":2,"depth":1}"#).unwrap();
        assert!(law_from_json(&At::root(&bad)).is_err());
    }
}
