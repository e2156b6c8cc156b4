use std::path::Path;

use erglab::dhj::{
    build_correspondence, check_inf_dhj_premises, enumerate_lines, line_structure_predicates, max_line_free,
    strong_stationarity_check, subspace_forcing_check, subspaces_of_len, StationaryLawTruncation, Word,
};
use erglab::fberg::{furstenberg_joining, nonconventional_average, recurrence_certificate, vdc_inequality};
use erglab::json::{
    coupling_from_json, coupling_to_json, correspondence_to_json, law_from_json, parse, parse_rational, partition_from_json,
    partition_to_json, rational_to_json, removal_instance_from_json, removal_instance_to_json, rotation_from_json,
    sequence_from_json, space_from_json, space_to_json, subgroup_from_json, subspace_from_json, subspace_to_json,
    system_from_json, upset_to_json, word_from_json, At,
};
use erglab::measure::{IndependenceWitness, SimpleFunction};
use erglab::removal::{
    check_conclusion, check_hypotheses, search_counterexample, CouplingKind, ExhaustiveConfig, RandomConfig,
    SearchConfig,
};
use erglab::zd::{joint_distribution_predicate, two_fold_joining_check, FactorMap, FiniteZdSystem};
use erglab::{Error, Rational, Result, Scalar};
use serde_json::{json, Value};

use crate::report::RunReport;
use crate::{CorrespondArgs, Global, SearchArgs, StationarityArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Holds,
    Violated,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub results: Value,
    pub status: Status,
    pub exhaustive: bool,
    /// Everything the results depend on, for the digest.
    pub inputs: Value,
}

impl Outcome {
    fn new(results: Value, holds: bool, inputs: Value) -> Self {
        Self {
            results,
            status: if holds { Status::Holds } else { Status::Violated },
            exhaustive: true,
            inputs,
        }
    }

    fn exhaustive(mut self, exhaustive: bool) -> Self {
        self.exhaustive = exhaustive;
        self
    }
}

fn with_file(file: &Path, e: Error) -> Error {
    match e {
        Error::Json { path, message } => Error::Json {
            path: format!("{}:{path}", file.display()),
            message,
        },
        other => other,
    }
}

fn load(file: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(file).map_err(|e| Error::Json {
        path: file.display().to_string(),
        message: format!("cannot read file: {e}"),
    })?;
    parse(&text).map_err(|e| with_file(file, e))
}

fn decode<T>(file: &Path, v: &Value, f: impl FnOnce(&At<'_>) -> Result<T>) -> Result<T> {
    f(&At::root(v)).map_err(|e| with_file(file, e))
}

fn inline(what: &str, text: &str) -> Result<Value> {
    parse(text).map_err(|e| match e {
        Error::Json { message, .. } => Error::Json {
            path: format!("--{what}"),
            message,
        },
        other => other,
    })
}

fn q(v: &Rational) -> Value {
    rational_to_json(v)
}

fn witness_json(w: &Option<IndependenceWitness<Rational>>) -> Value {
    match w {
        Some(w) => json!({"blocks": w.blocks, "joint": q(&w.joint), "conditional": q(&w.conditional)}),
        None => Value::Null,
    }
}

fn functions_from_json(at: &At<'_>) -> Result<Vec<SimpleFunction<Rational>>> {
    let rows = |a: At<'_>| a.items(|f| f.items(|x| x.rational()).map(SimpleFunction::new));
    if at.value.is_array() {
        rows(*at)
    } else {
        at.field("functions", rows)
    }
}

pub fn avg(system: &Path, functions: &Path, n: usize) -> Result<Outcome> {
    let sv = load(system)?;
    let fv = load(functions)?;
    let sys = decode(system, &sv, system_from_json)?;
    let fs = decode(functions, &fv, functions_from_json)?;
    let avg = nonconventional_average(&sys, &fs, n)?;
    let results = json!({"N": n, "average": avg.values().iter().map(q).collect::<Vec<_>>()});
    Ok(Outcome::new(results, true, json!({"system": sv, "functions": fv, "N": n})))
}

fn subsets(e: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    (1..(1u32 << e.len()) - 1).map(move |m| (0..e.len()).filter(|&i| m >> i & 1 == 1).map(|i| e[i]).collect())
}

pub fn fjoin(system: &Path, e: Option<&str>) -> Result<Outcome> {
    let sv = load(system)?;
    let sys = decode(system, &sv, system_from_json)?;
    let e: Vec<usize> = match e {
        Some(text) => At::root(&inline("e", text)?).usizes()?,
        None => (0..sys.dim()).collect(),
    };
    let fj = furstenberg_joining(&sys, &e)?;
    let offdiag = fj.check_offdiag_invariance();
    let diagonal = fj.check_diagonal_invariance();
    let diag = fj.check_diag_lemma();
    let mut project = true;
    for sub in subsets(&e) {
        let direct = furstenberg_joining(&sys, &sub)?;
        if !fj.project_joining(&sub)?.mass_equals(direct.coupling().mass()) {
            project = false;
            break;
        }
    }
    let results = json!({
        "coupling": coupling_to_json(fj.coupling()),
        "period": fj.period(),
        "offdiag": offdiag,
        "diagonal": diagonal,
        "diag": diag,
        "project": project,
    });
    Ok(Outcome::new(results, offdiag && diagonal && diag && project, json!({"system": sv, "e": e})))
}

pub fn recur(system: &Path, set: &str) -> Result<Outcome> {
    let sv = load(system)?;
    let sys = decode(system, &sv, system_from_json)?;
    let points = At::root(&inline("set", set)?).usizes()?;
    if let Some(&x) = points.iter().find(|&&x| x >= sys.len()) {
        return Err(Error::Json {
            path: "--set".into(),
            message: format!("point {x} outside a space of {} points", sys.len()),
        });
    }
    let mut mask = vec![false; sys.len()];
    for &x in &points {
        mask[x] = true;
    }
    let cert = recurrence_certificate(&sys, &mask)?;
    let positive = !sys.space().measure(&mask).is_null();
    let holds = !positive || (!cert.limit.is_null() && cert.witness_n.is_some());
    let results = json!({"limit": q(&cert.limit), "witness_n": cert.witness_n});
    Ok(Outcome::new(results, holds, json!({"system": sv, "set": points})))
}

pub fn vdc(seq: &Path, n: usize, h: usize) -> Result<Outcome> {
    let v = load(seq)?;
    let s = decode(seq, &v, sequence_from_json)?;
    let r = vdc_inequality(&s, n, h)?;
    let results = json!({"lhs": q(&r.lhs), "rhs": q(&r.rhs), "holds": r.holds});
    Ok(Outcome::new(results, r.holds, json!({"seq": v, "N": n, "H": h})))
}

fn factor_from_json(at: &At<'_>, y: &FiniteZdSystem<Rational>) -> Result<FactorMap<Rational>> {
    let target = at.field("target", |t| system_from_json(&t))?;
    let map = at.field("map", |m| m.usizes())?;
    FactorMap::new(y.clone(), target, map).map_err(|e| Error::Json {
        path: at.path().to_string(),
        message: e.to_string(),
    })
}

/// `{"joining", "factors": [{"target", "map"}], "gammas", "lambda"?}`. Without
/// `lambda`, two factors are checked with the two-fold joining statement.
pub fn joint(input: &Path) -> Result<Outcome> {
    let v = load(input)?;
    let (y, maps, gammas, lambda) = decode(input, &v, |at| {
        let y = at.field("joining", |j| system_from_json(&j))?;
        let maps = at.field("factors", |f| f.items(|m| factor_from_json(&m, &y)))?;
        let gammas = at.field("gammas", |g| g.items(|s| subgroup_from_json(&s)))?;
        let lambda = at.opt_field("lambda", |l| subgroup_from_json(&l))?;
        Ok((y, maps, gammas, lambda))
    })?;
    let inputs = json!({"input": v});
    match lambda {
        Some(lambda) => {
            let r = joint_distribution_predicate(&y, &maps, &gammas, &lambda)?;
            let results = json!({
                "holds": r.holds(),
                "per_coordinate": r.per_coordinate.iter().map(|c| c.holds).collect::<Vec<_>>(),
                "first_failure": r.first_failure(),
                "witness": r.first_failure().map_or(Value::Null, |i| witness_json(&r.per_coordinate[i].witness)),
            });
            Ok(Outcome::new(results, r.holds(), inputs))
        }
        None => {
            let (Ok(maps), Ok(gammas)) = (<[_; 2]>::try_from(maps), <[_; 2]>::try_from(gammas)) else {
                return Err(Error::Json {
                    path: format!("{}:$", input.display()),
                    message: "without \"lambda\" exactly two factors and two subgroups are expected".into(),
                });
            };
            match two_fold_joining_check(&y, &maps, &gammas) {
                Ok(r) => Ok(Outcome::new(json!({"holds": true, "tuples_checked": r.tuples_checked}), true, inputs)),
                Err(Error::Invariant(message)) => {
                    Ok(Outcome::new(json!({"holds": false, "message": message}), false, inputs))
                }
                Err(e) => Err(e),
            }
        }
    }
}

pub fn removal_check(instance: &Path) -> Result<Outcome> {
    let v = load(instance)?;
    let inst = decode(instance, &v, removal_instance_from_json)?;
    let h = check_hypotheses(&inst)?;
    let hypotheses = json!({"i": h.i, "ii": h.ii, "iii": h.iii});
    let inputs = json!({"instance": v});
    if !h.all() {
        let witness = if let Some((e, f)) = &h.witness_i {
            json!({"hypothesis": "i", "e": e, "f": f})
        } else if let Some((e, i, j)) = &h.witness_ii {
            json!({"hypothesis": "ii", "e": e, "i": i, "j": j})
        } else {
            let (a, b, w) = h.witness_iii.as_ref().expect("some hypothesis failed");
            json!({"hypothesis": "iii", "first": upset_to_json(a), "second": upset_to_json(b), "independence": witness_json(w)})
        };
        let results = json!({"hypotheses": hypotheses, "conclusion": null, "witness": witness, "iii_exhaustive": h.iii_exhaustive});
        return Ok(Outcome::new(results, false, inputs).exhaustive(h.iii_exhaustive));
    }
    let c = check_conclusion(&inst)?;
    let witness = if c.holds {
        Value::Null
    } else {
        json!({"product_mass": q(&c.product_mass), "intersection_mass": q(&c.intersection_mass)})
    };
    let results = json!({"hypotheses": hypotheses, "conclusion": c.holds, "witness": witness, "iii_exhaustive": h.iii_exhaustive});
    Ok(Outcome::new(results, c.holds, inputs).exhaustive(h.iii_exhaustive))
}

fn parse_kinds(text: &str) -> Result<Vec<CouplingKind>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            CouplingKind::parse(s).ok_or_else(|| Error::Json {
                path: "--kinds".into(),
                message: format!("unknown coupling kind \"{s}\""),
            })
        })
        .collect()
}

pub fn removal_search(a: &SearchArgs, g: &Global) -> Result<Outcome> {
    let kinds = parse_kinds(&a.kinds)?;
    let budget = g.budget.unwrap_or(1 << 20);
    let config = match a.mode.as_str() {
        "exhaustive" => SearchConfig::Exhaustive(ExhaustiveConfig {
            points: a.points,
            d: a.d,
            kinds: kinds.clone(),
            budget,
        }),
        "random" => SearchConfig::Random(RandomConfig {
            max_points: a.points,
            d: a.d,
            kinds: kinds.clone(),
            count: a.count,
            seed: g.seed,
            max_attempts: g.budget.unwrap_or(0),
        }),
        other => {
            return Err(Error::Json {
                path: "--mode".into(),
                message: format!("unknown mode \"{other}\""),
            })
        }
    };
    let out = search_counterexample(&config)?;
    let results = json!({
        "counterexample": out.counterexample.as_ref().map_or(Value::Null, removal_instance_to_json),
        "valid_instances": out.valid_instances,
        "rejected": out.rejected,
        "set_tuples_checked": out.set_tuples_checked,
        "exhaustive": out.exhaustive,
    });
    let inputs = json!({
        "mode": a.mode, "points": a.points, "d": a.d, "count": a.count, "budget": budget, "seed": g.seed,
        "kinds": kinds.iter().map(|k| k.name()).collect::<Vec<_>>(),
    });
    Ok(Outcome::new(results, out.counterexample.is_none(), inputs).exhaustive(out.exhaustive))
}

fn word_list(k: usize, n: usize, indices: &[usize]) -> Vec<String> {
    indices.iter().map(|&i| Word::at(k, n, i).to_string()).collect()
}

pub fn lines(k: usize, n: usize) -> Result<Outcome> {
    let lines = enumerate_lines(k, n)?;
    let results = json!({
        "count": lines.len(),
        "lines": lines.iter().map(|l| word_list(k, n, l)).collect::<Vec<_>>(),
    });
    Ok(Outcome::new(results, true, json!({"k": k, "N": n})))
}

pub fn maxfree(k: usize, n: usize, g: &Global) -> Result<Outcome> {
    let budget = g.budget.unwrap_or(1 << 26);
    let r = max_line_free(k, n, budget)?;
    let results = json!({"size": r.size, "exhaustive": r.exhaustive, "set": word_list(k, n, &r.set)});
    Ok(Outcome::new(results, true, json!({"k": k, "N": n, "budget": budget})).exhaustive(r.exhaustive))
}

pub fn force(k: usize, l: usize, n: usize, g: &Global) -> Result<Outcome> {
    let budget = g.budget.unwrap_or(1 << 26);
    let r = subspace_forcing_check(k, l, n, budget)?;
    let results = json!({
        "holds": r.holds,
        "min_size": r.min_size,
        "sets_checked": r.sets_checked,
        "exhaustive": r.exhaustive,
        "counterexample": r.counterexample.as_ref().map(|c| word_list(k, n, c)),
    });
    Ok(Outcome::new(results, r.holds, json!({"k": k, "L": l, "N": n, "budget": budget})).exhaustive(r.exhaustive))
}

pub fn correspond(a: &CorrespondArgs) -> Result<Outcome> {
    let (k, n, l) = (a.k, a.n, a.l);
    let (words, source) = match (&a.words, &a.set) {
        (Some(text), _) => {
            let ws = text
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| {
                    Word::parse(k, s).map_err(|e| Error::Json {
                        path: "--words".into(),
                        message: e.to_string(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            (ws, Value::Null)
        }
        (None, Some(file)) => {
            let v = load(file)?;
            (decode(file, &v, |at| at.items(|w| word_from_json(&w, k)))?, v)
        }
        (None, None) => {
            return Err(Error::Json {
                path: "--words".into(),
                message: "give the set with --words or --set".into(),
            })
        }
    };
    let points = Word::all(k, n).len();
    let mut mask = vec![false; points];
    for w in &words {
        if w.len() != n {
            return Err(Error::Json {
                path: "--words".into(),
                message: format!("word {w} does not have length {n}"),
            });
        }
        mask[w.index(k)] = true;
    }
    let mu = build_correspondence(k, n, &mask, l)?;
    let point_events = Word::all(k, l)
        .iter()
        .map(|w| Ok(json!({"word": w.to_string(), "value": q(&mu.point_event(w)?)})))
        .collect::<Result<Vec<_>>>()?;
    let line_events = if k >= 2 {
        subspaces_of_len(k, 1, l)
            .iter()
            .map(|s| Ok(json!({"line": subspace_to_json(s), "value": q(&mu.line_event(s)?)})))
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    let delta = match &a.delta {
        Some(text) => Some(parse_rational(text).ok_or_else(|| Error::Json {
            path: "--delta".into(),
            message: format!("\"{text}\" is not a rational"),
        })?),
        None => None,
    };
    let premises = delta.as_ref().map(|d| check_inf_dhj_premises(&mu, d));
    let results = json!({
        "measure": correspondence_to_json(&mu),
        "point_events": point_events,
        "line_events": line_events,
        "premises": premises,
    });
    let set: Vec<String> = words.iter().map(Word::to_string).collect();
    let inputs = json!({"k": k, "N": n, "L": l, "set": set, "file": source, "delta": delta.as_ref().map(q)});
    Ok(Outcome::new(results, true, inputs))
}

fn load_law(file: &Path, depth: Option<usize>) -> Result<(StationaryLawTruncation, Value)> {
    let mut v = load(file)?;
    if let (Some(d), Some(obj)) = (depth, v.as_object_mut()) {
        obj.insert("depth".into(), json!(d));
    }
    let law = decode(file, &v, law_from_json)?;
    Ok((law, v))
}

/// Only a failure of stationarity itself counts as a violation; the line
/// predicates are reported as computed.
pub fn stationarity(a: &StationarityArgs, g: &Global) -> Result<Outcome> {
    let (law, v) = load_law(&a.law, g.depth)?;
    let cap = g.dim_cap.unwrap_or(law.depth().min(2));
    let s = strong_stationarity_check(&law, cap)?;
    let stationarity = json!({
        "holds": s.holds,
        "subspaces_checked": s.subspaces_checked,
        "witness": s.witness.as_ref().map(|(x, y)| json!([subspace_to_json(x), subspace_to_json(y)])),
    });
    let inputs = json!({"law": v, "dim_cap": cap});
    if !s.holds {
        return Ok(Outcome::new(json!({"stationarity": stationarity}), false, inputs));
    }
    let r = line_structure_predicates(&law)?;
    let insensitive: Vec<Value> = r
        .insensitive
        .iter()
        .map(|(&e, p)| {
            let letters: Vec<usize> = (0..32).filter(|i| e >> i & 1 == 1).map(|i| i + 1).collect();
            json!({"e": letters, "partition": partition_to_json(p)})
        })
        .collect();
    let results = json!({
        "stationarity": stationarity,
        "marginals": {"point": space_to_json(&r.marginals.point), "line": coupling_to_json(&r.marginals.line)},
        "insensitive": insensitive,
        "line1": {"holds": r.line1.holds, "witness": witness_json(&r.line1.witness)},
        "line2": {
            "holds": r.line2_holds,
            "upset_pairs_checked": r.upset_pairs_checked,
            "all_upsets": r.all_upsets,
            "failure": r.line2_failure.as_ref().map(|f| json!({
                "first": upset_to_json(&f.first),
                "second": upset_to_json(&f.second),
                "independence": witness_json(&f.witness),
            })),
        },
        "dhj2": {
            "holds": r.dhj2.holds,
            "tuples_checked": r.dhj2.tuples_checked,
            "all_measurable": r.dhj2.all_measurable,
            "witness": r.dhj2.witness,
        },
    });
    Ok(Outcome::new(results, true, inputs))
}

pub const SCHEMAS: [&str; 13] = [
    "coupling", "functions", "joint", "law", "partition", "removal", "report", "rotation", "sequence", "space",
    "subgroup", "subspace", "system",
];

/// Decodes `file` under `schema`; constructors enforce the invariants.
pub fn validate(schema: &str, file: &Path) -> Result<Outcome> {
    if !SCHEMAS.contains(&schema) {
        return Err(Error::Json {
            path: "--schema".into(),
            message: format!("unknown schema \"{schema}\"; expected one of {}", SCHEMAS.join(", ")),
        });
    }
    let v = load(file)?;
    decode(file, &v, |at| {
        match schema {
            "coupling" => {
                let marginals = at.field("marginals", |m| m.items(|s| space_from_json(&s)))?;
                coupling_from_json(at, marginals).map(drop)
            }
            "functions" => functions_from_json(at).map(drop),
            "joint" => {
                let y = at.field("joining", |j| system_from_json(&j))?;
                at.field("factors", |f| f.items(|m| factor_from_json(&m, &y)))?;
                at.field("gammas", |g| g.items(|s| subgroup_from_json(&s)))?;
                at.opt_field("lambda", |l| subgroup_from_json(&l)).map(drop)
            }
            "law" => law_from_json(at).map(drop),
            "partition" => partition_from_json(at, None).map(drop),
            "removal" => removal_instance_from_json(at).map(drop),
            "report" => RunReport::from_json(at).map(drop),
            "rotation" => rotation_from_json(at).map(drop),
            "sequence" => sequence_from_json(at).map(drop),
            "space" => space_from_json(at).map(drop),
            "subgroup" => subgroup_from_json(at).map(drop),
            "subspace" => {
                let k = at.opt_field("k", |k| k.usize())?.unwrap_or(erglab::dhj::MAX_ALPHABET);
                subspace_from_json(at, k).map(drop)
            }
            "system" => system_from_json(at).map(drop),
            _ => unreachable!("schema names are checked above"),
        }
    })?;
    Ok(Outcome::new(json!({"schema": schema, "valid": true}), true, json!({"schema": schema, "file": v})))
}
