use std::sync::Arc;

use anyhow::{anyhow, bail, Context as _};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use weil_core::cyclo::{Psi, ScaledCyc};
use weil_core::extrep::{ExtSpace, RestrictedRep, SlReport, DEFAULT_ENUMERATION_CAP};
use weil_core::galois::{field_of_order, Field};
use weil_core::lag::{enumerate_lagrangians, from_coords, lagrangian_count, to_coords, LagCoords};
use weil_core::verify::{
    decode_mat, encode_fe, encode_mat, replay, run_suite, tuples, Case, Context, Counterexample, Pool, Setup,
    Suite, SuiteReport, WireMatrix, SCHEMA,
};
use weil_core::{Error, Lagrangian};

use crate::{Body, Command, Common, Output};

/// Default sample count for pools that feed per-element tables.
const POOL_SIZE: usize = 64;

pub fn run(cmd: Command, c: &Common) -> anyhow::Result<Output> {
    if let Some(path) = &c.replay {
        return replay_file(path, c);
    }
    match cmd {
        Command::Lagrangians => lagrangians(c),
        Command::GaussTable => gauss_table(c),
        Command::ConnectionVerify => suites(c, &[Suite::Connection, Suite::Membership, Suite::Equivariance]),
        Command::CocycleTable => cocycle_table(c),
        Command::Character => character(c),
        Command::SlReport => sl_report(c),
        Command::VerifyAll => suites(c, &Suite::ALL),
    }
}

fn single_q(c: &Common) -> anyhow::Result<u64> {
    match c.q.as_slice() {
        [q] => Ok(*q),
        _ => bail!("this subcommand takes a single --q"),
    }
}

/// Parses `a;b` into wire matrices; entries are element indices.
fn parse_base(k: &Field, s: &str, m: usize) -> anyhow::Result<(WireMatrix, WireMatrix)> {
    let (a, b) = s.split_once(';').ok_or_else(|| anyhow!("--base-point must have the form a;b"))?;
    let parse = |part: &str| -> anyhow::Result<WireMatrix> {
        let rows: Vec<&str> = part.trim().split('/').collect();
        if rows.len() != m {
            bail!("--base-point: expected {m} rows, found {}", rows.len());
        }
        rows.iter()
            .map(|row| {
                let entries: Vec<&str> = row.split(',').collect();
                if entries.len() != m {
                    bail!("--base-point: expected {m} entries per row, found {}", entries.len());
                }
                entries
                    .iter()
                    .map(|e| {
                        let i: u32 = e.trim().parse().with_context(|| format!("--base-point entry {e:?}"))?;
                        Ok(encode_fe(k, k.element(i)?))
                    })
                    .collect()
            })
            .collect()
    };
    Ok((parse(a)?, parse(b)?))
}

fn setup(c: &Common) -> anyhow::Result<Setup> {
    let q = single_q(c)?;
    let mut s = Setup::new(q, c.m);
    s.psi_scale = c.psi_scale;
    s.kernel_sign = c.kernel_sign.into();
    if let Some(b) = &c.base_point {
        s.base = Some(parse_base(&field_of_order(q)?, b, c.m)?);
    }
    Ok(s)
}

fn compact<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("wire values serialize")
}

fn csv_body<T: Serialize>(rows: &[T]) -> anyhow::Result<Body> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(Body::Csv(w.into_inner().map_err(|e| anyhow!("{e}"))?))
}

fn failure(body: Body, cx: Option<&Counterexample>) -> Output {
    Output { body, failed: cx.is_some(), counterexample: cx.map(|cx| serde_json::to_string_pretty(cx).expect("serializes")) }
}

fn replay_file(path: &std::path::Path, c: &Common) -> anyhow::Result<Output> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let cx: Counterexample = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let verdict = replay(&cx)?;
    let failed = !verdict.pass;
    let mut out = Output::json(&json!({
        "schema": SCHEMA,
        "setup": cx.setup,
        "suite": cx.suite,
        "case": cx.case,
        "verdict": verdict,
    }))?;
    if c.csv {
        out.body = csv_body(&[ReplayRow { suite: cx.suite.name(), pass: verdict.pass }])?;
    }
    out.failed = failed;
    Ok(out)
}

#[derive(Serialize)]
struct ReplayRow {
    suite: &'static str,
    pass: bool,
}

#[derive(Serialize)]
struct LagRow {
    index: usize,
    basis: String,
    a: String,
    b: String,
}

fn lagrangians(c: &Common) -> anyhow::Result<Output> {
    let ctx = Context::new(&setup(c)?)?;
    let all = enumerate_lagrangians(&ctx.space);
    let rows: Vec<LagRow> = all
        .iter()
        .enumerate()
        .map(|(index, l)| {
            let co = to_coords(&ctx.space, l)?;
            Ok(LagRow {
                index,
                basis: compact(&ctx.wire_lag(l)),
                a: compact(&encode_mat(&ctx.field, &co.a)),
                b: compact(&encode_mat(&ctx.field, &co.b)),
            })
        })
        .collect::<weil_core::Result<_>>()?;
    if c.csv {
        return Ok(failure(csv_body(&rows)?, None));
    }
    let list: Vec<serde_json::Value> = all
        .iter()
        .zip(&rows)
        .map(|(l, r)| {
            json!({
                "basis": ctx.wire_lag(l),
                "a": serde_json::from_str::<serde_json::Value>(&r.a).expect("round trip"),
                "b": serde_json::from_str::<serde_json::Value>(&r.b).expect("round trip"),
            })
        })
        .collect();
    Output::json(&json!({
        "schema": SCHEMA,
        "q": c.q[0],
        "m": c.m,
        "count": all.len(),
        "expected_count": lagrangian_count(c.q[0], c.m as u32).to_string(),
        "lagrangians": list,
    }))
}

#[derive(Serialize)]
struct GaussRow {
    #[serde(rename = "L")]
    l: String,
    #[serde(rename = "L'")]
    l1: String,
    #[serde(rename = "L''")]
    l2: String,
    #[serde(rename = "S")]
    s: String,
    k: u32,
    agree: bool,
}

fn gauss_table(c: &Common) -> anyhow::Result<Output> {
    use weil_core::gauss::{geometric_gauss, modulus_exponent};
    let ctx = Context::new(&setup(c)?)?;
    let space = &ctx.space;
    let lags = enumerate_lagrangians(space);
    let (p, q) = (Lagrangian::p_frame(space), Lagrangian::q_frame(space));
    let mut triples: Vec<[Lagrangian; 3]> = lags.iter().map(|l| [l.clone(), p.clone(), q.clone()]).collect();
    let standard = triples.len();
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let (sampled, exhaustive) = tuples(&lags, 3, c.samples, &mut rng);
    triples.extend(sampled.into_iter().map(|t| [t[0].clone(), t[1].clone(), t[2].clone()]));

    let cases: Vec<Case> = triples
        .iter()
        .enumerate()
        .map(|(i, [l, l1, l2])| {
            if i < standard {
                Case::GaussStandard { l: ctx.wire_lag(l) }
            } else {
                Case::GaussTriple { l: ctx.wire_lag(l), l1: ctx.wire_lag(l1), l2: ctx.wire_lag(l2) }
            }
        })
        .collect();
    let verdicts: Vec<bool> = {
        use rayon::prelude::*;
        cases.par_iter().map(|case| case.check(&ctx).pass).collect()
    };
    let first = verdicts.iter().position(|ok| !ok).map(|i| Counterexample {
        schema: SCHEMA,
        setup: ctx.setup.clone(),
        suite: Suite::Gauss,
        verdict: cases[i].check(&ctx),
        case: cases[i].clone(),
    });
    let rows: Vec<GaussRow> = triples
        .iter()
        .zip(verdicts)
        .map(|([l, l1, l2], agree)| GaussRow {
            l: compact(&ctx.wire_lag(l)),
            l1: compact(&ctx.wire_lag(l1)),
            l2: compact(&ctx.wire_lag(l2)),
            s: compact(&geometric_gauss(space, ctx.bundle.psi(), l, l1, l2).coeffs()),
            k: modulus_exponent(space, l, l1, l2),
            agree,
        })
        .collect();
    let body = if c.csv {
        csv_body(&rows)?
    } else {
        Body::Json(serde_json::to_value(json!({
            "schema": SCHEMA,
            "setup": ctx.setup,
            "standard_rows": standard,
            "triples_exhaustive": exhaustive,
            "all_agree": first.is_none(),
            "rows": rows,
        }))?)
    };
    Ok(failure(body, first.as_ref()))
}

fn suites(c: &Common, which: &[Suite]) -> anyhow::Result<Output> {
    let ctx = Context::new(&setup(c)?)?;
    let reports: Vec<SuiteReport> =
        which.iter().enumerate().map(|(i, &s)| run_suite(&ctx, s, c.samples, c.seed.wrapping_add(i as u64))).collect();
    let first = reports.iter().find_map(|r| r.first_failure.clone());
    let body = if c.csv {
        #[derive(Serialize)]
        struct Row {
            suite: &'static str,
            cases: usize,
            passed: usize,
            exhaustive: bool,
            literal_agree: Option<usize>,
        }
        let rows: Vec<Row> = reports
            .iter()
            .map(|r| Row {
                suite: r.suite.name(),
                cases: r.cases,
                passed: r.passed,
                exhaustive: r.exhaustive,
                literal_agree: r.literal_agree,
            })
            .collect();
        csv_body(&rows)?
    } else {
        Body::Json(json!({
            "schema": SCHEMA,
            "setup": ctx.setup,
            "passed": first.is_none(),
            "suites": reports,
        }))
    };
    Ok(failure(body, first.as_ref()))
}

fn scaled(v: &ScaledCyc) -> String {
    compact(v)
}

#[derive(Serialize)]
struct CocycleRow {
    g: String,
    h: String,
    c_operator: String,
    c_gauss: String,
    agree: bool,
    agree_conjugate: bool,
}

fn cocycle_table(c: &Common) -> anyhow::Result<Output> {
    use rayon::prelude::*;
    let ctx = Context::new(&setup(c)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let pool = Pool::new(&ctx, &mut rng, POOL_SIZE);
    let (pairs, ex) = tuples(&pool.elements, 2, c.samples, &mut rng);
    let records: Vec<weil_core::Result<_>> =
        pairs.par_iter().map(|t| ctx.rep.cocycle_record(&t[0], &t[1])).collect();
    let mut rows = Vec::with_capacity(pairs.len());
    let mut first: Option<Counterexample> = None;
    for (t, r) in pairs.iter().zip(records) {
        let r = r?;
        let case = Case::Cocycle { g: ctx.wire_elem(&t[0]), h: ctx.wire_elem(&t[1]) };
        if !r.agree_conjugate && first.is_none() {
            first = Some(Counterexample {
                schema: SCHEMA,
                setup: ctx.setup.clone(),
                suite: Suite::Cocycle,
                verdict: case.check(&ctx),
                case,
            });
        }
        rows.push(CocycleRow {
            g: compact(&ctx.wire_elem(&t[0])),
            h: compact(&ctx.wire_elem(&t[1])),
            c_operator: scaled(&r.c_operator),
            c_gauss: scaled(&r.c_gauss),
            agree: r.agree,
            agree_conjugate: r.agree_conjugate,
        });
    }
    let body = if c.csv {
        csv_body(&rows)?
    } else {
        Body::Json(json!({
            "schema": SCHEMA,
            "setup": ctx.setup,
            "exhaustive": ex && pool.whole_group,
            "pairs": rows.len(),
            "literal_agree": rows.iter().filter(|r| r.agree).count(),
            "conjugate_agree": rows.iter().filter(|r| r.agree_conjugate).count(),
            "rows": rows,
        }))
    };
    Ok(failure(body, first.as_ref()))
}

#[derive(Serialize)]
struct CharRow {
    g: String,
    re: f64,
    im: f64,
    abs: f64,
}

/// Rounding noise below this is reported as zero.
const SNAP_TOL: f64 = 1e-12;

fn snap(x: f64) -> f64 {
    if x.abs() < SNAP_TOL {
        0.0
    } else {
        x
    }
}

fn character(c: &Common) -> anyhow::Result<Output> {
    use rayon::prelude::*;
    let ctx = Context::new(&setup(c)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let pool = Pool::new(&ctx, &mut rng, c.samples.min(POOL_SIZE * POOL_SIZE));
    let values: Vec<_> = pool.elements.par_iter().map(|g| ctx.rep.character(g)).collect();
    let rows: Vec<CharRow> = pool
        .elements
        .iter()
        .zip(&values)
        .map(|(g, v)| CharRow { g: compact(&ctx.wire_elem(g)), re: snap(v.re), im: snap(v.im), abs: snap(v.norm()) })
        .collect();
    if c.csv {
        return Ok(failure(csv_body(&rows)?, None));
    }
    let mean_abs_sq =
        pool.whole_group.then(|| values.iter().map(|v| v.norm_sqr()).sum::<f64>() / values.len() as f64);
    Output::json(&json!({
        "schema": SCHEMA,
        "setup": ctx.setup,
        "whole_group": pool.whole_group,
        "elements": rows.len(),
        "mean_abs_sq": mean_abs_sq,
        "rows": rows,
    }))
}

fn sl_report(c: &Common) -> anyhow::Result<Output> {
    let mut reports: Vec<SlReport> = Vec::new();
    let mut failure_note: Option<serde_json::Value> = None;
    for &q in &c.q {
        let field = field_of_order(q)?;
        let ext = Arc::new(ExtSpace::new(&field, c.n)?);
        let psi = Psi::scaled(&field, field.element(c.psi_scale)?)?;
        let rep = match &c.base_point {
            None => RestrictedRep::new(ext, psi)?,
            Some(s) => {
                let m = ext.space().m();
                let (a, b) = parse_base(&field, s, m)?;
                let co = LagCoords { a: decode_mat(&field, &a, m)?, b: decode_mat(&field, &b, m)? };
                let base = from_coords(ext.space(), &co)?;
                RestrictedRep::with_base(ext, psi, base)?
            }
        };
        match rep.commutant_report(DEFAULT_ENUMERATION_CAP, c.seed) {
            Ok(r) => {
                if !r.intertwiners_equivariant && failure_note.is_none() {
                    failure_note = Some(json!({ "n": c.n, "q": q, "report": r }));
                }
                reports.push(r);
            }
            Err(Error::InternalInconsistency(msg)) => {
                failure_note.get_or_insert(json!({ "n": c.n, "q": q, "error": msg }));
            }
            Err(e) => return Err(e.into()),
        }
    }
    let body = if c.csv {
        csv_body(&reports)?
    } else if let [r] = reports.as_slice() {
        let mut v = serde_json::to_value(r)?;
        v.as_object_mut().expect("struct").insert("schema".into(), json!(SCHEMA));
        Body::Json(v)
    } else {
        Body::Json(json!({ "schema": SCHEMA, "n": c.n, "reports": reports }))
    };
    let failed = failure_note.is_some();
    Ok(Output {
        body,
        failed,
        counterexample: failure_note.map(|v| serde_json::to_string_pretty(&v).expect("serializes")),
    })
}
