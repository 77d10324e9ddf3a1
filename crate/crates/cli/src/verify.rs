use endolab::archcmp::{verify_identity, ArchCase, GammaRange};
use endolab::dsconst::{verify_vanishing, Parity};
use endolab::endoscopy::{enumerate_elliptic_all, out_group_size, verify_tau_k, EndoContext};
use endolab::exactnum::{verify_product_formula, SquareClass};
use endolab::hecke::verify_satake;
use endolab::quadspace::exists_global_form;
use endolab::rootdata::{verify_kostant, LeviLabel, Weight};
use endolab::signs::{verify_sign_invariants, verify_waldspurger};
use endolab::{Error, Result};
use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use crate::report::Report;
use crate::{Suite, VerifyArgs};

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("library reports serialize")
}

fn or_default<T: Clone>(given: &[T], default: &[T]) -> Vec<T> {
    if given.is_empty() {
        default.to_vec()
    } else {
        given.to_vec()
    }
}

pub fn run(args: &VerifyArgs) -> Report {
    let name = format!("verify {}", suite_name(args.suite));
    let mut params = Map::new();
    let mut report = Report::new(name.clone(), Map::new());
    let outcome = match args.suite {
        Suite::Arch => arch(args, &mut params, &mut report),
        Suite::Vanishing => vanishing(args, &mut params, &mut report),
        Suite::Satake => satake(args, &mut params, &mut report),
        Suite::Signs => signs(args, &mut params, &mut report),
        Suite::Hilbert => hilbert(args, &mut params, &mut report),
        Suite::Kostant => kostant(args, &mut params, &mut report),
        Suite::Waldspurger => waldspurger(args, &mut params, &mut report),
        Suite::Invariants => invariants(args, &mut params, &mut report),
    };
    match outcome {
        Ok(()) => {
            report.parameters = params;
            report
        }
        Err(e) => Report::error(name, params, e.to_string()),
    }
}

fn suite_name(s: Suite) -> &'static str {
    match s {
        Suite::Arch => "arch",
        Suite::Vanishing => "vanishing",
        Suite::Satake => "satake",
        Suite::Signs => "signs",
        Suite::Hilbert => "hilbert",
        Suite::Kostant => "kostant",
        Suite::Waldspurger => "waldspurger",
        Suite::Invariants => "invariants",
    }
}

fn parse_lambda(s: &str) -> Result<Vec<i64>> {
    s.split(',').map(|t| t.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad weight coordinate {t:?}")))).collect()
}

fn arch(args: &VerifyArgs, params: &mut Map<String, Value>, report: &mut Report) -> Result<()> {
    let levis: Vec<LeviLabel> = match &args.case {
        Some(c) => vec![c.parse()?],
        None => vec![LeviLabel::M1, LeviLabel::M2, LeviLabel::M12],
    };
    let ds = or_default(&args.d, &[7, 8, 9, 10]);
    let explicit = args.case.is_some() && !args.d.is_empty();
    let ranges: Option<Vec<GammaRange>> = args.range.as_deref().map(|r| r.parse().map(|x| vec![x])).transpose()?;
    let samples = args.samples.unwrap_or(50);
    let lambda = args.lambda.as_deref().map(parse_lambda).transpose()?;
    params.insert("case".into(), json!(levis.iter().map(|l| l.to_string()).collect::<Vec<_>>()));
    params.insert("d".into(), json!(ds));
    params.insert("lambda".into(), json!(lambda));
    params.insert("range".into(), json!(args.range.clone().unwrap_or_else(|| "stated,vanishing".into())));
    params.insert("samples".into(), json!(samples));
    params.insert("seed".into(), json!(args.seed));
    let mut runs = Vec::new();
    for &levi in &levis {
        for &d in &ds {
            if levi == LeviLabel::M2 && d % 2 == 0 && !explicit {
                continue;
            }
            let weight = match &lambda {
                Some(c) => Weight::integral(c),
                None => Weight::zero(d / 2),
            };
            let case = ArchCase::new(levi, d, weight)?;
            let rs = match &ranges {
                Some(r) => r.clone(),
                None if levi == LeviLabel::M1 => vec![GammaRange::Stated],
                None => vec![GammaRange::Stated, GammaRange::Vanishing],
            };
            for range in rs {
                let r = verify_identity(&case, range, samples, args.seed)?;
                for w in &r.failures {
                    report.check("arch identity", false, json!({ "case": r.case, "d": d, "range": to_value(&range), "witness": w }));
                }
                runs.push(json!({ "case": r.case, "d": d, "lambda": r.lambda, "range": to_value(&range), "samples": r.samples, "failures": r.failures.len() }));
            }
        }
    }
    if runs.is_empty() {
        return Err(Error::Invalid("no (case, d) combination to run".into()));
    }
    report.result = json!({ "runs": runs });
    Ok(())
}

fn parse_parity(s: &str) -> Result<Parity> {
    match s {
        "odd" => Ok(Parity::Odd),
        "even" => Ok(Parity::Even),
        _ => Err(Error::Parse(format!("unknown parity {s:?}, expected odd or even"))),
    }
}

fn vanishing(args: &VerifyArgs, params: &mut Map<String, Value>, report: &mut Report) -> Result<()> {
    let parities = match &args.case {
        Some(c) => vec![parse_parity(c)?],
        None => vec![Parity::Odd, Parity::Even],
    };
    let samples = args.samples.unwrap_or(20);
    params.insert("case".into(), json!(parities.iter().map(|p| p.to_string()).collect::<Vec<_>>()));
    params.insert("r".into(), json!(args.r));
    params.insert("samples".into(), json!(samples));
    params.insert("seed".into(), json!(args.seed));
    let mut runs = Vec::new();
    for parity in parities {
        let rs = match parity {
            Parity::Odd => or_default(&args.r, &[3, 4, 5, 6, 7]),
            Parity::Even => or_default(&args.r, &[4, 6]),
        };
        for r in rs {
            let rep = verify_vanishing(parity, r, samples, args.seed)?;
            report.check("vanishing configurations", rep.configurations > 0, json!({ "parity": parity.to_string(), "r": r }));
            for w in &rep.failures {
                report.check("vanishing", false, json!({ "parity": parity.to_string(), "r": r, "witness": w }));
            }
            runs.push(json!({
                "parity": parity.to_string(), "r": r, "claim": rep.claim,
                "configurations": rep.configurations, "failures": rep.failures.len(),
            }));
        }
    }
    report.result = json!({ "runs": runs });
    Ok(())
}

fn satake(args: &VerifyArgs, params: &mut Map<String, Value>, report: &mut Report) -> Result<()> {
    let ds = or_default(&args.d, &[7, 8, 9, 10]);
    let a_list = or_default(&args.a, &[1, 2, 3]);
    params.insert("d".into(), json!(ds));
    params.insert("a".into(), json!(a_list));
    params.insert("p".into(), json!(args.p));
    let mut runs = Vec::new();
    for &d in &ds {
        for &a in &a_list {
            let rep = verify_satake(d, a, args.p)?;
            report.check("satake", rep.passed(), to_value(&rep));
            runs.push(json!({ "d": d, "a": a, "data_checked": rep.data_checked, "passed": rep.passed() }));
        }
    }
    report.result = json!({ "runs": runs });
    Ok(())
}

fn signs(args: &VerifyArgs, params: &mut Map<String, Value>, report: &mut Report) -> Result<()> {
    let m_max = args.m_max.unwrap_or(8);
    params.insert("m_max".into(), json!(m_max));
    let rep = verify_sign_invariants(m_max)?;
    for f in &rep.failures {
        report.check("sign identity", false, json!(f));
    }
    report.check("sign coverage", rep.sun_checked > 0, json!("no rows"));
    report.result = json!({ "sun_checked": rep.sun_checked, "type_ii_checked": rep.type_ii_checked });
    Ok(())
}

/// Existence under the sign hypothesis with `delta = +-1`: the local
/// conditions are met exactly for `d = 2, ..., 6 mod 8`.
fn existence_expected(d: usize) -> bool {
    (2..=6).contains(&(d % 8))
}

fn sign_admissible_unit(d: usize) -> i64 {
    if d % 2 == 1 || (d / 2) % 2 == 0 {
        1
    } else {
        -1
    }
}

fn hilbert(args: &VerifyArgs, params: &mut Map<String, Value>, report: &mut Report) -> Result<()> {
    let bound = args.bound.unwrap_or(10_000);
    params.insert("pairs".into(), json!(args.pairs));
    params.insert("bound".into(), json!(bound));
    params.insert("seed".into(), json!(args.seed));
    let rep = verify_product_formula(args.pairs, bound, args.seed)?;
    for (a, b) in &rep.failures {
        report.check("product formula", false, json!({ "a": a, "b": b }));
    }
    let mut table = Vec::new();
    for d in 3..=64usize {
        let unit = sign_admissible_unit(d);
        let got = exists_global_form(d, &SquareClass::Global(BigInt::from(unit)))?;
        report.check("existence", got == existence_expected(d), json!({ "d": d, "delta": unit, "exists": got }));
        table.push(json!({ "d": d, "delta": unit, "exists": got }));
    }
    let mut branch = 0;
    for d in [8usize, 16, 24] {
        for delta in [2i64, 3, 5, 6, 7, 10, 15] {
            let got = exists_global_form(d, &SquareClass::Global(BigInt::from(delta)))?;
            report.check("existence d = 0 mod 8", got, json!({ "d": d, "delta": delta }));
            branch += 1;
        }
    }
    report.result = json!({ "product_formula_pairs": rep.pairs, "existence": table, "zero_mod_8_checked": branch });
    Ok(())
}

fn kostant(args: &VerifyArgs, params: &mut Map<String, Value>, report: &mut Report) -> Result<()> {
    let max_rank = args.m_max.unwrap_or(4) as usize;
    let bound = args.bound.unwrap_or(2);
    params.insert("m_max".into(), json!(max_rank));
    params.insert("bound".into(), json!(bound));
    let rep = verify_kostant(max_rank, bound)?;
    for f in &rep.failures {
        report.check("kostant", false, to_value(f));
    }
    report.check("kostant coverage", rep.identities_checked > 0, json!("nothing checked"));
    report.result = json!({ "identities_checked": rep.identities_checked, "truncations_checked": rep.truncations_checked });
    Ok(())
}

fn waldspurger(args: &VerifyArgs, params: &mut Map<String, Value>, report: &mut Report) -> Result<()> {
    let configurations = args.samples.unwrap_or(200);
    let m_max = args.m_max.unwrap_or(6) as usize;
    params.insert("samples".into(), json!(configurations));
    params.insert("m_max".into(), json!(m_max));
    params.insert("seed".into(), json!(args.seed));
    let rep = verify_waldspurger(configurations, m_max, args.seed)?;
    for f in &rep.failures {
        report.check("waldspurger", false, to_value(f));
    }
    report.check("waldspurger coverage", rep.configurations > 0, json!("no configurations"));
    report.result = json!({ "configurations": rep.configurations });
    Ok(())
}

fn invariants(args: &VerifyArgs, params: &mut Map<String, Value>, report: &mut Report) -> Result<()> {
    let ds = or_default(&args.d, &[7, 8, 9, 10, 11, 12]);
    let (lo, hi) = (*ds.iter().min().expect("nonempty"), *ds.iter().max().expect("nonempty"));
    let contexts = [EndoContext::RealR, EndoContext::LocalQp(3), EndoContext::GlobalQ(vec![3])];
    params.insert("d".into(), json!([lo, hi]));
    params.insert("contexts".into(), json!(["real", "qp:3", "global:3"]));
    let tau = verify_tau_k(lo, hi, &contexts)?;
    for f in &tau.failures {
        report.check("tau k", false, json!(f));
    }
    report.check("tau k coverage", tau.checked > 0, json!("nothing checked"));
    let mut swaps = 0;
    for ctx in &contexts {
        for d in lo..=hi {
            let deltas = if d % 2 == 1 { vec![SquareClass::one(ctx.square_context())] } else { ctx.square_classes()? };
            for delta in deltas {
                for h in enumerate_elliptic_all(d, &delta, ctx)? {
                    swaps += 1;
                    let ok = out_group_size(&h) == out_group_size(&h.swapped());
                    report.check("out group swap", ok, json!(h.to_string()));
                }
            }
        }
    }
    report.result = json!({ "tau_k_checked": tau.checked, "swap_checked": swaps });
    Ok(())
}
