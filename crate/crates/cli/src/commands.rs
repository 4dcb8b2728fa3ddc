//! One function per subcommand. Each builds a report from the library and
//! renders it in the requested format.

use std::fmt::Write as _;

use num_bigint::BigInt;
use polystrat::algebra::QPolynomial;
use polystrat::brute::{self, SieveResult};
use polystrat::census::{self, CountContext};
use polystrat::graded::{self, SymConvention};
use polystrat::partition::{enumerate_partitions, r_minimum, r_of_degree, Partition, RMinimum};
use polystrat::spectral::{self, DimRange};
use polystrat::{Error, Result};
use serde::Serialize;
use serde_json::{json, Value};

use crate::table::Table;
use crate::{
    BettiArgs, BoundsArgs, BruteArgs, CarlitzArgs, CountArgs, E1Args, EulerArgs, Format,
    HydeArgs, Outcome, RuleSet, SeriesArgs,
};

/// Cases run by `brute` when none are given.
pub const DEFAULT_BRUTE_CASES: [(usize, usize, u64); 4] =
    [(2, 2, 2), (3, 2, 2), (2, 2, 3), (2, 3, 2)];

#[derive(Serialize)]
struct Envelope<'a, R: Serialize> {
    command: &'a str,
    params: Value,
    result: &'a R,
}

fn json_document<R: Serialize>(command: &str, params: Value, result: &R) -> Result<String> {
    serde_json::to_string_pretty(&Envelope {
        command,
        params,
        result,
    })
    .map_err(|e| Error::Consistency(format!("JSON encoding failed: {e}")))
}

fn ok(document: String) -> Result<Outcome> {
    Ok(Outcome {
        document,
        passed: true,
    })
}

#[derive(Serialize)]
struct CountEntry {
    space: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    partition: Option<Partition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    polynomial: Option<QPolynomial>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rendered: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<String>,
}

pub fn count(a: &CountArgs, fmt: Format) -> Result<Outcome> {
    if a.d == 0 {
        return Err(Error::Argument("count needs -d >= 1".into()));
    }
    if a.q.is_some_and(|q| q < 2) {
        return Err(Error::Argument("-q must be a prime power >= 2".into()));
    }
    let symbolic = a.symbolic || a.q.is_none();
    let mut ctx = CountContext::new(a.n)?;
    let mut spaces: Vec<(String, Option<Partition>, QPolynomial)> =
        vec![("poly".into(), None, census::poly_exact_count(a.d, a.n)?)];
    spaces.push(("irr".into(), None, ctx.irr_count(a.d)?.clone()));
    for lambda in enumerate_partitions(a.d, 2)? {
        let c = ctx.stratum_count(&lambda)?;
        spaces.push(("stratum".into(), Some(lambda), c));
    }
    let entries: Vec<CountEntry> = spaces
        .into_iter()
        .map(|(space, partition, poly)| -> Result<CountEntry> {
            let value = match a.q {
                Some(q) => Some(poly.eval_integer(q as i64)?.to_string()),
                None => None,
            };
            Ok(CountEntry {
                space,
                partition,
                rendered: symbolic.then(|| poly.to_string()),
                polynomial: symbolic.then_some(poly),
                value,
            })
        })
        .collect::<Result<_>>()?;

    let document = match fmt {
        Format::Json => json_document(
            "count",
            json!({"d": a.d, "n": a.n, "symbolic": symbolic, "q": a.q}),
            &json!({"d": a.d, "n": a.n, "entries": entries}),
        )?,
        Format::Csv | Format::Md => {
            let mut t = Table::new(["space", "partition", "count", "value"]);
            for e in &entries {
                t.push([
                    e.space.clone(),
                    e.partition.as_ref().map(|p| p.to_string()).unwrap_or_default(),
                    e.rendered.clone().unwrap_or_default(),
                    e.value.clone().unwrap_or_default(),
                ]);
            }
            if fmt == Format::Csv {
                t.to_csv()
            } else {
                let mut s = format!("Point counts, d = {}, n = {}", a.d, a.n);
                if let Some(q) = a.q {
                    let _ = write!(s, ", q = {q}");
                }
                s.push_str("\n\n");
                s.push_str(&t.to_markdown());
                s
            }
        }
    };
    ok(document)
}

pub fn euler(a: &EulerArgs, fmt: Format) -> Result<Outcome> {
    let rows = census::euler_table(a.d_max, a.n_max)?;
    let document = match fmt {
        Format::Json => json_document(
            "euler",
            json!({"d_max": a.d_max, "n_max": a.n_max}),
            &json!({ "rows": rows }),
        )?,
        Format::Csv | Format::Md => {
            let mut t = Table::new(["d", "n", "chi"]);
            for r in &rows {
                t.push([r.d.to_string(), r.n.to_string(), r.chi.to_string()]);
            }
            if fmt == Format::Csv {
                t.to_csv()
            } else {
                format!("Euler characteristics of Irr_{{d,n}}\n\n{}", t.to_markdown())
            }
        }
    };
    ok(document)
}

pub fn carlitz(a: &CarlitzArgs, fmt: Format) -> Result<Outcome> {
    let rows = census::carlitz_table(a.q, a.n, a.d_max)?;
    let limit = census::carlitz_limit(a.q);
    let increasing = rows.windows(2).all(|w| w[0].ratio < w[1].ratio);
    let document = match fmt {
        Format::Json => json_document(
            "carlitz",
            json!({"q": a.q, "n": a.n, "d_max": a.d_max}),
            &json!({
                "limit": limit.to_string(),
                "limit_decimal": census::decimal_string(&limit, 12),
                "strictly_increasing": increasing,
                "rows": rows,
            }),
        )?,
        Format::Csv | Format::Md => {
            let mut t = Table::new(["d", "ratio", "decimal"]);
            for r in &rows {
                t.push([r.d.to_string(), r.ratio.to_string(), r.decimal.clone()]);
            }
            if fmt == Format::Csv {
                t.to_csv()
            } else {
                format!(
                    "Carlitz ratios, q = {}, n = {}; limit {} = {}\n\n{}",
                    a.q,
                    a.n,
                    limit,
                    census::decimal_string(&limit, 12),
                    t.to_markdown()
                )
            }
        }
    };
    ok(document)
}

pub fn hyde(a: &HydeArgs, fmt: Format) -> Result<Outcome> {
    let report = census::hyde_stabilization(a.d, a.window, a.n_max)?;
    let document = match fmt {
        Format::Json => json_document(
            "hyde",
            json!({"d": a.d, "window": a.window, "n_max": a.n_max}),
            &report,
        )?,
        Format::Csv => {
            let mut t = Table::new(["n", "exponent", "coefficient"]);
            for row in &report.rows {
                for (k, c) in row.coefficients.iter().enumerate() {
                    t.push([row.n.to_string(), k.to_string(), c.to_string()]);
                }
            }
            t.to_csv()
        }
        Format::Md => {
            let headers: Vec<String> = std::iter::once("n".to_string())
                .chain((0..=a.window).map(|k| format!("q^{k}")))
                .collect();
            let mut t = Table::new(headers);
            for row in &report.rows {
                t.push(
                    std::iter::once(row.n.to_string())
                        .chain(row.coefficients.iter().map(|c| c.to_string())),
                );
            }
            let verdict = match report.result() {
                Ok((n0, _)) => format!("stabilized from n = {n0}"),
                Err(e) => e.to_string(),
            };
            format!(
                "Low coefficients of |Irr_{{{},n}}|\n\n{}\n{verdict}\n",
                a.d,
                t.to_markdown()
            )
        }
    };
    if let Err(e) = report.result() {
        eprintln!("polystrat: {e}");
    }
    Ok(Outcome {
        document,
        passed: report.n0.is_some(),
    })
}

fn rules_for(d: usize, set: RuleSet) -> Vec<spectral::DifferentialRule> {
    match set {
        RuleSet::Shipped => spectral::shipped_rules(d),
        RuleSet::None => Vec::new(),
    }
}

fn range_cells(r: &DimRange) -> [String; 2] {
    [r.lower.to_string(), r.upper.to_string()]
}

fn range_text(r: &DimRange) -> String {
    match r.value() {
        Some(v) => v.to_string(),
        None => format!("[{}, {}]", r.lower, r.upper),
    }
}

pub fn betti(a: &BettiArgs, fmt: Format) -> Result<Outcome> {
    let rules = rules_for(a.d, a.rules);
    let report = spectral::betti_report(a.d, a.max_degree, a.convention, &rules)?;
    let w = &report.requested;
    let document = match fmt {
        Format::Json => json_document(
            "betti",
            json!({
                "d": a.d,
                "max_degree": a.max_degree,
                "convention": a.convention,
                "rules": format!("{:?}", a.rules).to_lowercase(),
            }),
            &report,
        )?,
        Format::Csv => {
            let mut t = Table::new(["i", "lower", "upper", "exact"]);
            for (i, b) in w.betti.iter().enumerate() {
                let [lo, hi] = range_cells(b);
                t.push([i.to_string(), lo, hi, b.is_exact().to_string()]);
            }
            t.to_csv()
        }
        Format::Md => {
            let mut t = Table::new(["i", "b_i"]);
            for (i, b) in w.betti.iter().enumerate() {
                t.push([i.to_string(), range_text(b)]);
            }
            let mut s = format!(
                "Stable Betti numbers b_i({}), convention {}\n\n{}",
                a.d,
                a.convention,
                t.to_markdown()
            );
            for u in w.uncovered() {
                let _ = writeln!(
                    s,
                    "\nd_{} from (p={}, degree {}) is not covered by a rule; rank in {}",
                    u.page,
                    u.from.0,
                    u.from.1,
                    range_text(&u.rank)
                );
            }
            if report.flagged {
                s.push_str("\nConventions diverge:\n\n");
                for div in &report.divergences {
                    let _ = writeln!(
                        s,
                        "- b_{}: koszul {}, naive {}",
                        div.degree,
                        range_text(&div.koszul),
                        range_text(&div.naive)
                    );
                }
            }
            s
        }
    };
    if report.flagged {
        let degrees: Vec<String> = report
            .divergences
            .iter()
            .map(|d| d.degree.to_string())
            .collect();
        eprintln!(
            "polystrat: koszul and naive conventions disagree at b_i for i in {{{}}}",
            degrees.join(", ")
        );
    }
    ok(document)
}

#[derive(Serialize)]
struct E1Dump<'a> {
    d: usize,
    max_total_degree: usize,
    convention: SymConvention,
    columns: &'a [spectral::E1Column],
    rules: &'a [spectral::DifferentialRule],
    betti: serde_json::Map<String, Value>,
}

pub fn e1(a: &E1Args, fmt: Format) -> Result<Outcome> {
    let window = spectral::e1_window(a.d, a.max_degree, a.convention)?;
    let betti = spectral::stable_betti_window(a.d, a.max_degree, a.convention, &window.rules)?;
    let document = match fmt {
        Format::Json => {
            let mut map = serde_json::Map::new();
            for (i, b) in betti.betti.iter().enumerate() {
                map.insert(
                    i.to_string(),
                    serde_json::to_value(b).expect("dimension range encodes"),
                );
            }
            json_document(
                "e1",
                json!({"d": a.d, "max_degree": a.max_degree, "convention": a.convention}),
                &E1Dump {
                    d: window.d,
                    max_total_degree: window.max_total_degree,
                    convention: window.convention,
                    columns: &window.columns,
                    rules: &window.rules,
                    betti: map,
                },
            )?
        }
        Format::Csv => {
            let mut t = Table::new(["p", "degree", "partition", "dim"]);
            for c in &window.columns {
                for e in &c.entries {
                    t.push([
                        c.p.to_string(),
                        e.degree.to_string(),
                        e.partition.to_string(),
                        e.dim.to_string(),
                    ]);
                }
            }
            t.to_csv()
        }
        Format::Md => {
            let mut s = spectral::render_e1_markdown(&window);
            s.push_str("\nRules:\n\n");
            for r in &window.rules {
                let _ = writeln!(
                    s,
                    "- d_{} out of p={}, degrees {}..={}: {:?}",
                    r.page,
                    r.column,
                    r.min_degree,
                    r.max_degree.map_or("".to_string(), |m| m.to_string()),
                    r.kind
                );
            }
            let nonzero: Vec<String> = betti
                .betti
                .iter()
                .enumerate()
                .filter(|(_, b)| b.upper != BigInt::from(0))
                .map(|(i, b)| format!("b_{i} = {}", range_text(b)))
                .collect();
            let _ = writeln!(
                s,
                "\nNonzero b_i for i <= {}: {}",
                a.max_degree,
                if nonzero.is_empty() {
                    "none".to_string()
                } else {
                    nonzero.join(", ")
                }
            );
            s
        }
    };
    ok(document)
}

#[derive(Serialize)]
struct RInfo {
    d: usize,
    r_d: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    minimum: Option<RMinimum>,
}

pub fn bounds(a: &BoundsArgs, fmt: Format) -> Result<Outcome> {
    let thresholds = spectral::bounds_report(a.d, a.n)?;
    let dimensions = spectral::dim_bound_check(a.d, a.n)?;
    let r = RInfo {
        d: a.d,
        r_d: r_of_degree(a.d)?,
        minimum: if a.d >= 2 { Some(r_minimum(a.d)?) } else { None },
    };
    let audit = a
        .audit
        .map(|d_max| spectral::vanishing_audit(d_max, a.convention))
        .transpose()?;
    let passed = dimensions.holds && audit.as_ref().is_none_or(|x| x.passed);
    let opt = |v: &Option<BigInt>| v.as_ref().map(|x| x.to_string()).unwrap_or_default();

    let mut rows: Vec<(String, String)> = vec![
        ("poly_dimension".into(), thresholds.poly_dimension.to_string()),
        ("low_stability_max".into(), opt(&thresholds.low_stability_max)),
        (
            "high_stability_bound".into(),
            thresholds
                .high_stability_bound
                .as_ref()
                .map(|b| b.to_string())
                .unwrap_or_default(),
        ),
        ("high_stability_max".into(), opt(&thresholds.high_stability_max)),
        ("red_vanishing_from".into(), opt(&thresholds.red_vanishing_from)),
        (
            "irr_vanishing_through".into(),
            thresholds
                .irr_vanishing_through
                .map(|x| x.to_string())
                .unwrap_or_default(),
        ),
        ("stratum_dimension_bound".into(), dimensions.bound.to_string()),
        ("r_d".into(), r.r_d.to_string()),
    ];
    for row in &dimensions.rows {
        rows.push((
            format!("dim T_{}", row.partition),
            format!("{}{}", row.dimension, if row.equality { " (equal)" } else { "" }),
        ));
    }
    if let Some(audit) = &audit {
        for deg in &audit.degrees {
            rows.push((
                format!("audit d={} betti_zero_through", deg.d),
                deg.betti_zero_through.to_string(),
            ));
        }
        rows.push(("audit passed".into(), audit.passed.to_string()));
    }

    let document = match fmt {
        Format::Json => json_document(
            "bounds",
            json!({"d": a.d, "n": a.n, "audit": a.audit, "convention": a.convention}),
            &json!({
                "thresholds": thresholds,
                "dimensions": dimensions,
                "r": r,
                "audit": audit,
            }),
        )?,
        Format::Csv => {
            let mut t = Table::new(["key", "value"]);
            for (k, v) in rows {
                t.push([k, v]);
            }
            t.to_csv()
        }
        Format::Md => {
            let mut t = Table::new(["quantity", "value"]);
            for (k, v) in rows {
                t.push([k, v]);
            }
            let mut s = format!("Bounds for d = {}, n = {}\n\n{}", a.d, a.n, t.to_markdown());
            if let Some(audit) = &audit {
                for v in &audit.violations {
                    let _ = writeln!(s, "\nviolation: {v}");
                }
            }
            s
        }
    };
    Ok(Outcome { document, passed })
}

#[derive(Serialize)]
struct CensusRow {
    partition: Partition,
    count: u64,
}

#[derive(Serialize)]
struct BruteCase {
    d: usize,
    n: usize,
    p: u64,
    total: u64,
    irreducible: u64,
    census: Vec<CensusRow>,
}

pub fn brute(a: &BruteArgs, fmt: Format) -> Result<Outcome> {
    let cases: Vec<(usize, usize, u64)> = if a.cases.is_empty() {
        DEFAULT_BRUTE_CASES.to_vec()
    } else {
        a.cases.clone()
    };
    let results = {
        use rayon::prelude::*;
        cases
            .par_iter()
            .map(|&(d, n, p)| brute::irr_sieve(d, n, p))
            .collect::<Result<Vec<SieveResult>>>()?
    };
    let report = brute::compare_with_counts(&results)?;
    let document = match fmt {
        Format::Json => {
            let rows: Vec<BruteCase> = results
                .iter()
                .map(|r| BruteCase {
                    d: r.d,
                    n: r.n,
                    p: r.p,
                    total: r.total,
                    irreducible: r.irreducible,
                    census: r
                        .census
                        .iter()
                        .map(|(partition, count)| CensusRow {
                            partition: partition.clone(),
                            count: *count,
                        })
                        .collect(),
                })
                .collect();
            let case_list: Vec<Value> = cases
                .iter()
                .map(|&(d, n, p)| json!({"d": d, "n": n, "p": p}))
                .collect();
            json_document(
                "brute",
                json!({"cases": case_list, "verify": a.verify}),
                &json!({
                    "cases": rows,
                    "comparisons": report.comparisons,
                    "passed": report.passed,
                }),
            )?
        }
        Format::Csv => brute::census_csv(&results),
        Format::Md => {
            let mut t = Table::new(["d", "n", "p", "quantity", "brute", "formula", "ok"]);
            for c in &report.comparisons {
                t.push([
                    c.d.to_string(),
                    c.n.to_string(),
                    c.p.to_string(),
                    c.quantity.clone(),
                    c.brute.to_string(),
                    c.formula.to_string(),
                    if c.passed { "yes" } else { "NO" }.to_string(),
                ]);
            }
            format!("Brute-force census against exact counts\n\n{}", t.to_markdown())
        }
    };
    for c in report.comparisons.iter().filter(|c| !c.passed) {
        eprintln!(
            "polystrat: mismatch at (d={}, n={}, p={}) {}: brute {} vs formula {}",
            c.d, c.n, c.p, c.quantity, c.brute, c.formula
        );
    }
    Ok(Outcome {
        document,
        passed: !a.verify || report.passed,
    })
}

pub fn series(a: &SeriesArgs, fmt: Format) -> Result<Outcome> {
    let series = graded::stable_irr_series(a.d, a.trunc, a.convention)?;
    let comparison = graded::compare_with_printed(a.d, a.trunc, a.convention).ok();
    let closed_form = graded::pipeline_closed_form(a.d).map(|f| f.to_string());
    let document = match fmt {
        Format::Json => json_document(
            "series",
            json!({"d": a.d, "trunc": a.trunc, "convention": a.convention}),
            &json!({
                "d": a.d,
                "series": series.tagged(a.convention),
                "closed_form": closed_form,
                "comparison": comparison,
            }),
        )?,
        Format::Csv => {
            let mut t = Table::new(["degree", "dim"]);
            for (k, c) in series.series().coeffs().iter().enumerate() {
                t.push([k.to_string(), c.to_string()]);
            }
            t.to_csv()
        }
        Format::Md => {
            let mut s = format!(
                "Stable series P_{}(t), convention {}\n\n    {}\n",
                a.d,
                a.convention,
                series.series()
            );
            if let Some(form) = &closed_form {
                let _ = writeln!(s, "\nClosed form of the computed series: {form}");
            }
            if let Some(c) = &comparison {
                let _ = writeln!(s, "Reference closed form: {}", c.reference_form);
                match c.first_deviation {
                    Some(k) => {
                        let _ = writeln!(
                            s,
                            "First deviation at t^{k}: computed {}, reference {}",
                            c.computed.coeff(k)?,
                            c.reference.coeff(k)?
                        );
                    }
                    None => {
                        let _ = writeln!(s, "Agrees with the reference through t^{}", a.trunc);
                    }
                }
            }
            s
        }
    };
    if let Some(k) = comparison.as_ref().and_then(|c| c.first_deviation) {
        eprintln!(
            "polystrat: computed P_{} differs from the reference closed form from t^{k}",
            a.d
        );
    }
    ok(document)
}
