use endolab::endoscopy::{enumerate_elliptic, enumerate_elliptic_all, enumerate_g_endoscopy, enumerate_g_endoscopy_all, EndoContext, EndoRow};
use endolab::exactnum::{format_rational, parse_rational, squareclass_of, Place, Rational};
use endolab::quadspace::{diagonalize, discriminant, hasse_invariant, is_perfect, is_quasi_split_local, signature, QuadraticSpace};
use endolab::rootdata::LeviLabel;
use endolab::signs::{sign_rows, sign_table_tsv};
use endolab::{Error, Result};
use serde_json::{json, Value};

use crate::report::Report;
use crate::{EndoscopyArgs, Format, QuadspaceArgs};

fn parse_list(s: &str) -> Result<Vec<Rational>> {
    s.split(',').map(parse_rational).collect()
}

fn parse_gram(s: &str) -> Result<Vec<Vec<Rational>>> {
    let v: Value = serde_json::from_str(s).map_err(|e| Error::Parse(format!("gram matrix: {e}")))?;
    let rows = v.as_array().ok_or_else(|| Error::Parse("gram matrix must be a JSON array of rows".into()))?;
    rows.iter()
        .map(|row| {
            let row = row.as_array().ok_or_else(|| Error::Parse("each gram row must be an array".into()))?;
            row.iter()
                .map(|x| match x {
                    Value::String(t) => parse_rational(t),
                    Value::Number(n) if n.is_i64() => parse_rational(&n.to_string()),
                    other => Err(Error::Parse(format!("gram entry {other} is not an integer or \"p/q\" string"))),
                })
                .collect()
        })
        .collect()
}

fn quadspace_result(q: &QuadraticSpace) -> Result<Value> {
    let (pos, neg) = signature(q);
    let mut places = vec![json!({ "place": "inf", "hasse": hasse_invariant(q, Place::Real)?, "quasi_split": is_quasi_split_local(q, Place::Real)? })];
    for p in q.bad_primes() {
        let v = Place::Prime(p);
        let mut entry = json!({ "place": p.to_string(), "hasse": hasse_invariant(q, v)?, "quasi_split": is_quasi_split_local(q, v)? });
        if p != 2 {
            entry["perfect"] = json!(is_perfect(q, p)?);
        }
        places.push(entry);
    }
    Ok(json!({
        "d": q.dim(),
        "diagonal": q.diag().iter().map(format_rational).collect::<Vec<_>>(),
        "delta": discriminant(q).to_string(),
        "signed_det": format_rational(&q.signed_det()),
        "signature": [pos, neg],
        "places": places,
    }))
}

pub fn quadspace(args: &QuadspaceArgs) -> Report {
    let params = params! { "diag" => args.diag, "gram" => args.gram };
    let space = match (&args.diag, &args.gram) {
        (Some(d), _) => parse_list(d).and_then(QuadraticSpace::from_diag),
        (None, Some(g)) => parse_gram(g).and_then(|g| diagonalize(&g)),
        (None, None) => Err(Error::Parse("give --diag or --gram".into())),
    };
    let result = space.and_then(|q| quadspace_result(&q));
    match result {
        Ok(v) => {
            let mut r = Report::new("quadspace", params);
            r.result = v;
            r
        }
        Err(e) => Report::error("quadspace", params, e.to_string()),
    }
}

fn endo_rows(args: &EndoscopyArgs) -> Result<Vec<EndoRow>> {
    if args.d < 7 {
        return Err(Error::Domain("the enumeration is for d >= 7".into()));
    }
    let ctx: EndoContext = args.context.parse()?;
    let delta = squareclass_of(&parse_rational(&args.delta)?, ctx.square_context())?;
    let levi: LeviLabel = args.levi.parse()?;
    if levi == LeviLabel::G {
        let data = if args.all { enumerate_elliptic_all(args.d, &delta, &ctx)? } else { enumerate_elliptic(args.d, &delta, &ctx)? };
        data.iter().map(|h| EndoRow::for_group(args.d, &delta, h)).collect()
    } else {
        let data = if args.all {
            enumerate_g_endoscopy_all(levi, args.d, &delta, &ctx)?
        } else {
            enumerate_g_endoscopy(levi, args.d, &delta, &ctx)?
        };
        data.iter().map(|g| EndoRow::for_levi(args.d, &delta, g)).collect()
    }
}

fn opt_cell<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map_or_else(|| "-".into(), T::to_string)
}

fn endo_tsv(rows: &[EndoRow]) -> String {
    let mut out = String::from("case\tdplus\tdeltaplus\tdminus\tdeltaminus\tout\tiota\tA\tcuspidal\tramified\n");
    for r in rows {
        let ramified = r.ramified.as_ref().map(|v| match v.is_empty() {
            true => "none".to_string(),
            false => v.iter().map(u64::to_string).collect::<Vec<_>>().join(","),
        });
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            r.case,
            r.dplus,
            r.deltaplus,
            r.dminus,
            r.deltaminus,
            r.out,
            r.iota,
            opt_cell(&r.subset),
            opt_cell(&r.cuspidal),
            opt_cell(&ramified),
        ));
    }
    out
}

pub fn endoscopy(args: &EndoscopyArgs) -> (Report, Option<String>) {
    let params = params! {
        "d" => args.d, "delta" => args.delta, "context" => args.context, "levi" => args.levi, "all" => args.all,
    };
    match endo_rows(args) {
        Ok(rows) => {
            let tsv = (args.format == Format::Tsv).then(|| endo_tsv(&rows));
            let mut r = Report::new("endoscopy", params);
            r.result = json!({ "count": rows.len(), "rows": rows });
            (r, tsv)
        }
        Err(e) => (Report::error("endoscopy", params, e.to_string()), None),
    }
}

pub fn signs_table(m_min: u64, m_max: u64, format: Format) -> (Report, Option<String>) {
    let params = params! { "m_min" => m_min, "m_max" => m_max };
    match sign_rows(m_min, m_max) {
        Ok(rows) => {
            let tsv = (format == Format::Tsv).then(|| sign_table_tsv(&rows));
            let mut r = Report::new("signs table", params);
            r.result = json!({ "count": rows.len(), "rows": rows });
            (r, tsv)
        }
        Err(e) => (Report::error("signs table", params, e.to_string()), None),
    }
}
