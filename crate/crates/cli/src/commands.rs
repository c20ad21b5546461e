//! One function per subcommand; each returns the report payload.

use std::fmt::Write as _;

use apportion::analysis::{divergences, divergences_of_seats, verify_minimizer_identity, DivergenceValues, Functional};
use apportion::asymptotics::{
    apparentement_joint_gain, apparentement_party_gain, excess_bounds, ordered_simplex_covariance_matrix,
    ordered_simplex_moments, predict_bias, predict_divergence_mean, predict_moments, predict_ordered_bias,
    predict_ordered_variance, violation_probability,
};
use apportion::harness::{
    apparentement_sweep, compare, detect_period, effective_start, mc_ordered_simplex, mc_simplex_shares,
    period_average_bias, quota_violation_frequency, sweep_with, ComparisonReport, SweepOptions, SweepStats,
    Tolerances, ViolationFrequency, ViolationSource, DEFAULT_BIN_WIDTH,
};
use apportion::{allocate, expected_excess, quota_satisfaction, seat_excess, Allocation, Method, PartyWeights, Real, TiePolicy, DEFAULT_TIE_LIMIT};
use serde_json::{json, Map, Value};

use crate::error::CliError;
use crate::input::Weights;
use crate::report::{dec, decs, num, nums};
use crate::{Cli, Command, Ties};

pub struct Outcome {
    pub result: Value,
    /// Set when a comparison or oracle check failed.
    pub failure: Option<String>,
    pub table: Option<String>,
}

impl Outcome {
    fn ok(result: Value) -> Self {
        Outcome { result, failure: None, table: None }
    }
}

macro_rules! on_weights {
    ($w:expr, |$x:ident| $body:expr) => {
        match $w {
            Weights::Exact($x) => $body,
            Weights::Float($x) => $body,
        }
    };
}

fn policy(cli: &Cli) -> TiePolicy {
    match cli.ties {
        Ties::Random => TiePolicy::SeededRandom(cli.seed),
        Ties::Enumerate => TiePolicy::EnumerateAll,
        Ties::Average => TiePolicy::AverageOverTies,
    }
}

fn check_range(from: u64, to: u64) -> Result<(), CliError> {
    if from > to {
        return Err(CliError::Input(format!("empty range: --seats-from {from} exceeds --seats-to {to}")));
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Allocate { method, weights, seats } => {
            let method = Method::from_name(method)?;
            let w = weights.load()?;
            on_weights!(&w, |w| allocate_cmd(cli, &method, w, *seats))
        }
        Command::Sweep { method, weights, range, histograms } => {
            let method = Method::from_name(method)?;
            check_range(range.seats_from, range.seats_to)?;
            let w = weights.load()?;
            on_weights!(&w, |w| sweep_cmd(cli, &method, w, range.seats_from, range.seats_to, *histograms))
        }
        Command::Verify { method, weights, range, violations } => {
            let method = Method::from_name(method)?;
            check_range(range.seats_from, range.seats_to)?;
            let w = weights.load()?;
            on_weights!(&w, |w| verify_cmd(cli, &method, w, range.seats_from, range.seats_to, *violations))
        }
        Command::McSimplex { parties, method, seats, trials } => {
            let method = method.as_deref().map(Method::from_name).transpose()?;
            mc_simplex_cmd(cli, *parties, method.as_ref(), *seats, *trials)
        }
        Command::Violations { method, weights, seats_from, seats_to, random_simplex, seats, trials } => {
            let method = Method::from_name(method)?;
            let (source, names, shares) = match random_simplex {
                Some(m) => {
                    let house = seats.ok_or_else(|| CliError::Input("--random-simplex needs --seats".into()))?;
                    let names = (1..=*m).map(|j| format!("rank {j}")).collect();
                    (ViolationSource::RandomSimplex { m: *m, house, trials: *trials }, names, None)
                }
                None => {
                    let w = weights.load()?;
                    let to = seats_to.or(*seats).ok_or_else(|| CliError::Input("give --seats-to".into()))?;
                    let from = seats_from.unwrap_or(1);
                    check_range(from, to)?;
                    let shares = w.shares_f64();
                    (ViolationSource::Fixed { weights: w.to_f64(), from, to }, w.names(), Some(shares))
                }
            };
            violations_cmd(cli, &method, &source, names, shares)
        }
        Command::Apparentement { method, weights, pair, range } => {
            let method = Method::from_name(method)?;
            check_range(range.seats_from, range.seats_to)?;
            let w = weights.load()?;
            let keys: Vec<&str> = pair.split(',').map(str::trim).collect();
            let [a, b] = keys[..] else { return Err(CliError::Input("--pair takes two parties".into())) };
            let (i, j) = (w.index_of(a)?, w.index_of(b)?);
            if i == j {
                return Err(CliError::Input("--pair needs two different parties".into()));
            }
            let names = w.names();
            let shares = w.shares_f64();
            let stats = on_weights!(&w, |w| apparentement_sweep(&method, w, (i, j), range.seats_from, range.seats_to)?);
            apparentement_cmd(&method, &names, &shares, stats)
        }
        Command::Divergence { method, weights, seats, seat_vector } => {
            let method = Method::from_name(method)?;
            let w = weights.load()?;
            let vector = seat_vector.as_deref().map(|s| parse_seat_vector(s, w.len(), *seats)).transpose()?;
            on_weights!(&w, |w| divergence_cmd(cli, &method, w, *seats, vector.as_deref()))
        }
        Command::OracleCheck { method, functional, weights, seats } => {
            let method = Method::from_name(method)?;
            let functional = Functional::from_name(functional)?;
            let w = weights.load()?;
            on_weights!(&w, |w| oracle_cmd(&method, functional, w, *seats))
        }
        Command::Period { method, weights } => {
            let method = Method::from_name(method)?;
            let Weights::Exact(w) = weights.load()? else {
                return Err(CliError::Input("period needs integer votes, not float shares".into()));
            };
            period_cmd(&method, &w)
        }
    }
}

fn parse_seat_vector(text: &str, m: usize, house: u64) -> Result<Vec<u64>, CliError> {
    let seats: Vec<u64> = text
        .split(',')
        .map(|s| s.trim().parse().map_err(|_| CliError::Input(format!("bad seat count `{s}`"))))
        .collect::<Result<_, _>>()?;
    if seats.len() != m {
        return Err(CliError::Input(format!("--seat-vector has {} entries for {m} parties", seats.len())));
    }
    if seats.iter().sum::<u64>() != house {
        return Err(CliError::Input(format!("--seat-vector does not sum to {house}")));
    }
    Ok(seats)
}

fn allocation_json<R: Real>(w: &PartyWeights<R>, a: &Allocation<R>) -> Result<Value, CliError> {
    let n = R::from_u64(a.house);
    let delta = seat_excess(a, w)?.delta;
    let expected = a.expected_seats_r();
    let expected_delta = expected_excess(a, w)?.delta;
    let flags = quota_satisfaction(a, w)?;
    let parties: Vec<Value> = (0..w.len())
        .map(|i| {
            json!({
                "name": w.name(i),
                "votes": num(&w.votes()[i]),
                "share": num(&w.shares()[i]),
                "quota": num(&(n.clone() * w.shares()[i].clone())),
                "seats": a.seats[i],
                "delta": num(&delta[i]),
                "expected_seats": num(&expected[i]),
                "expected_delta": num(&expected_delta[i]),
                "lower_quota": flags[i].lower,
                "upper_quota": flags[i].upper,
            })
        })
        .collect();
    let tie = a.tie.as_ref().map(|t| {
        json!({
            "tied": t.tied.iter().map(|&i| w.name(i)).collect::<Vec<_>>(),
            "extra_seats": t.extra,
            "orbit_size": t.size().to_string(),
            "near": t.near,
            "alternatives": a.alternatives,
            "truncated": a.truncated,
        })
    });
    Ok(json!({ "house": a.house, "parties": parties, "tie": tie }))
}

fn allocate_cmd<R: Real>(cli: &Cli, method: &Method, w: &PartyWeights<R>, seats: u64) -> Result<Outcome, CliError> {
    let a = allocate(method, w, seats, policy(cli))?;
    let mut result = allocation_json(w, &a)?;
    result["method"] = json!(method.to_string());
    let mut table = format!("{method}, {} seats\n{:<16} {:>14} {:>6} {:>12}\n", a.house, "party", "quota", "seats", "delta");
    let n = a.house as f64;
    let delta = seat_excess(&a, w)?.delta;
    for i in 0..w.len() {
        let _ = writeln!(
            table,
            "{:<16} {:>14} {:>6} {:>12}",
            w.name(i),
            dec(n * w.shares()[i].to_f64()),
            a.seats[i],
            dec(delta[i].to_f64())
        );
    }
    if let Some(t) = &a.tie {
        let _ = writeln!(table, "tie among {} parties, {} alternatives", t.tied.len(), t.size());
    }
    Ok(Outcome { result, failure: None, table: Some(table) })
}

fn stats_json(stats: &SweepStats, names: &[String], histograms: bool) -> Value {
    let n = stats.count.max(1) as f64;
    let mut out = json!({
        "parties": names,
        "samples": stats.count,
        "range": stats.range,
        "mean": decs(&stats.mean),
        "variance": decs(&stats.variance()),
        "standard_error": decs(&(0..stats.m).map(|i| stats.standard_error(i)).collect::<Vec<_>>()),
        "covariance": stats.covariance_matrix().iter().map(|r| decs(r)).collect::<Vec<_>>(),
        "lower_violation_frequency": decs(&stats.lower_violations.iter().map(|&c| c as f64 / n).collect::<Vec<_>>()),
        "upper_violation_frequency": decs(&stats.upper_violations.iter().map(|&c| c as f64 / n).collect::<Vec<_>>()),
        "any_violation_frequency": dec(stats.any_violation_frequency()),
        "ties": stats.ties,
        "near_ties": stats.near_ties,
    });
    if let Some(bounds) = &stats.bounds {
        out["bounds"] = bounds.iter().map(|&(lo, hi)| json!([dec(lo), dec(hi)])).collect();
        out["bound_violations"] = json!(stats.bound_violations);
    }
    if histograms {
        out["histograms"] = stats
            .histograms
            .iter()
            .map(|h| {
                json!({
                    "bin_width": dec(h.bin_width),
                    "bins": h.bins().iter().map(|&(x, c)| json!([dec(x), c])).collect::<Vec<_>>(),
                })
            })
            .collect();
    }
    out
}

fn prediction_json(method: &Method, p: &[f64]) -> Value {
    match (predict_moments(method, p), excess_bounds(method, p)) {
        (Ok(m), Ok(bounds)) => json!({
            "mean": decs(&m.mean),
            "variance": decs(&m.variance),
            "covariance": m.covariance.iter().map(|r| decs(r)).collect::<Vec<_>>(),
            "bounds": bounds.iter().map(|&(lo, hi)| json!([dec(lo), dec(hi)])).collect::<Vec<_>>(),
        }),
        _ => Value::Null,
    }
}

fn moments_table(stats: &SweepStats, names: &[String], method: &Method, p: &[f64]) -> String {
    let predicted = predict_moments(method, p).ok();
    let mut t = format!("{method}, {} houses\n{:<16} {:>14} {:>14} {:>14} {:>14}\n", stats.count, "party", "mean", "limit mean", "variance", "limit var");
    let var = stats.variance();
    for i in 0..stats.m {
        let (pm, pv) = predicted.as_ref().map_or(("-".into(), "-".into()), |m| (dec(m.mean[i]), dec(m.variance[i])));
        let _ = writeln!(t, "{:<16} {:>14} {:>14} {:>14} {:>14}", names[i], dec(stats.mean[i]), pm, dec(var[i]), pv);
    }
    t
}

fn run_sweep<R: Real + Send + Sync>(cli: &Cli, method: &Method, w: &PartyWeights<R>, from: u64, to: u64) -> Result<SweepStats, CliError> {
    let options = SweepOptions { bin_width: DEFAULT_BIN_WIDTH, check_bounds: true };
    Ok(sweep_with(method, w, from, to, policy(cli), options)?)
}

fn names_of<R: Real>(w: &PartyWeights<R>) -> Vec<String> {
    (0..w.len()).map(|i| w.name(i)).collect()
}

fn sweep_cmd<R: Real + Send + Sync>(cli: &Cli, method: &Method, w: &PartyWeights<R>, from: u64, to: u64, histograms: bool) -> Result<Outcome, CliError> {
    let stats = run_sweep(cli, method, w, from, to)?;
    let names = names_of(w);
    let p: Vec<f64> = w.shares().iter().map(Real::to_f64).collect();
    let result = json!({
        "method": method.to_string(),
        "effective_start": effective_start(method, w, from),
        "empirical": stats_json(&stats, &names, histograms),
        "limit": prediction_json(method, &p),
    });
    Ok(Outcome { result, failure: None, table: Some(moments_table(&stats, &names, method, &p)) })
}

fn comparison_json(report: &ComparisonReport, names: &[String]) -> Value {
    let entries: Vec<Value> = report
        .entries
        .iter()
        .map(|e| {
            json!({
                "quantity": e.quantity,
                "parties": e.parties.iter().map(|&i| names[i].clone()).collect::<Vec<_>>(),
                "empirical": dec(e.empirical),
                "predicted": dec(e.predicted),
                "abs_error": dec(e.abs_error),
                "tolerance": dec(e.tolerance),
                "pass": e.pass,
            })
        })
        .collect();
    json!({ "method": report.method, "samples": report.samples, "range": report.range, "pass": report.pass, "entries": entries })
}

fn verify_cmd<R: Real + Send + Sync>(cli: &Cli, method: &Method, w: &PartyWeights<R>, from: u64, to: u64, violations: bool) -> Result<Outcome, CliError> {
    if !(cli.tolerance.is_finite() && cli.tolerance > 0.0) {
        return Err(CliError::Input("--tolerance must be positive".into()));
    }
    let stats = run_sweep(cli, method, w, from, to)?;
    let names = names_of(w);
    let p: Vec<f64> = w.shares().iter().map(Real::to_f64).collect();
    let mut tol = Tolerances::uniform(cli.tolerance);
    if violations {
        tol.violation = Some(cli.tolerance);
    }
    let report = compare(&stats, method, &p, &tol)?;
    let failure = (!report.pass).then(|| {
        let n = report.failures().count();
        format!("{n} of {} comparisons outside tolerance {}", report.entries.len(), cli.tolerance)
    });
    let mut table = moments_table(&stats, &names, method, &p);
    let _ = writeln!(table, "{}", if report.pass { "all comparisons pass" } else { "comparison FAILED" });
    Ok(Outcome {
        result: json!({ "comparison": comparison_json(&report, &names), "empirical": stats_json(&stats, &names, false) }),
        failure,
        table: Some(table),
    })
}

fn mc_simplex_cmd(cli: &Cli, m: usize, method: Option<&Method>, house: u64, trials: u64) -> Result<Outcome, CliError> {
    let names: Vec<String> = (1..=m).map(|j| format!("rank {j}")).collect();
    let exact: Vec<_> = (1..=m).map(|j| ordered_simplex_moments(m, j)).collect::<Result<_, _>>()?;
    let shares_limit = json!({
        "mean": exact.iter().map(|e| num(&e.mean)).collect::<Vec<_>>(),
        "variance": exact.iter().map(|e| num(&e.variance)).collect::<Vec<_>>(),
        "covariance": ordered_simplex_covariance_matrix(m)?.iter().map(|r| nums(r)).collect::<Vec<_>>(),
    });
    let result = match method {
        None => {
            let stats = mc_simplex_shares(m, trials, cli.seed)?;
            json!({ "parties": m, "trials": trials, "shares": stats_json(&stats, &names, false), "shares_limit": shares_limit })
        }
        Some(method) => {
            let s = mc_ordered_simplex(method, m, house, trials, cli.seed)?;
            let limit = (1..=m)
                .map(|j| Ok(json!({ "mean": dec(predict_ordered_bias(method, m, j)?), "variance": dec(predict_ordered_variance(method, m, j)?) })))
                .collect::<Result<Vec<Value>, apportion::ApportionError>>()
                .map(Value::Array)
                .unwrap_or(Value::Null);
            json!({
                "method": method.to_string(),
                "parties": m,
                "house": house,
                "trials": trials,
                "excess": stats_json(&s.delta, &names, false),
                "excess_limit": limit,
                "shares": stats_json(&s.shares, &names, false),
                "shares_limit": shares_limit,
            })
        }
    };
    Ok(Outcome::ok(result))
}

fn violations_cmd(cli: &Cli, method: &Method, source: &ViolationSource, names: Vec<String>, shares: Option<Vec<f64>>) -> Result<Outcome, CliError> {
    let f: ViolationFrequency = quota_violation_frequency(method, source, cli.seed)?;
    let limit = shares.and_then(|p| {
        p.iter()
            .map(|&pi| violation_probability(method, pi, p.len()))
            .collect::<Result<Vec<_>, _>>()
            .ok()
            .map(|v| {
                json!({
                    "lower": v.iter().map(|x| dec(x.0)).collect::<Vec<_>>(),
                    "upper": v.iter().map(|x| dec(x.1)).collect::<Vec<_>>(),
                })
            })
    });
    Ok(Outcome::ok(json!({
        "method": method.to_string(),
        "parties": names,
        "samples": f.samples,
        "range": f.range,
        "lower": decs(&f.lower),
        "upper": decs(&f.upper),
        "per_party": decs(&f.per_party),
        "overall": dec(f.overall),
        "limit": limit,
    })))
}

fn apparentement_cmd(method: &Method, names: &[String], p: &[f64], s: apportion::harness::ApparentementStats) -> Result<Outcome, CliError> {
    let (i, j) = s.parties;
    let m = p.len();
    let joint = apparentement_joint_gain(method, p[i], p[j], m).ok().map(dec);
    let party = |a: usize, b: usize| apparentement_party_gain(method, p[a], p[b], m).ok().map(|c| json!({ "value": dec(c.value), "conjecture": c.conjecture }));
    Ok(Outcome::ok(json!({
        "method": method.to_string(),
        "pair": [names[i], names[j]],
        "samples": s.joint.count,
        "range": s.joint.range,
        "joint_gain": { "mean": dec(s.joint.mean[0]), "standard_error": dec(s.joint.standard_error(0)), "limit": joint },
        "party_gain": {
            "mean": decs(&s.per_party.mean),
            "limit": [party(i, j), party(j, i)],
        },
        "skipped_splits": s.skipped_splits,
    })))
}

fn functional_key(f: Functional) -> String {
    let key = serde_json::to_value(f).expect("functional serialises");
    key.as_str().expect("unit variant").replace('-', "_")
}

fn divergence_values<R: Real>(values: &DivergenceValues<R>) -> Value {
    let mut out = Map::new();
    for f in Functional::ALL {
        let v = values.get(f).map_or(Value::String("inf".into()), num);
        out.insert(functional_key(f), v);
    }
    Value::Object(out)
}

fn divergence_cmd<R: Real>(cli: &Cli, method: &Method, w: &PartyWeights<R>, seats: u64, vector: Option<&[u64]>) -> Result<Outcome, CliError> {
    let (values, seat_vector) = match vector {
        Some(v) => (divergences_of_seats(w, v)?, v.to_vec()),
        None => {
            let a = allocate(method, w, seats, policy(cli))?;
            (divergences(w, &a)?, a.seats)
        }
    };
    let p: Vec<f64> = w.shares().iter().map(Real::to_f64).collect();
    let mut limit = Map::new();
    for f in Functional::ALL {
        if let Ok(x) = predict_divergence_mean(method, &p, f) {
            limit.insert(functional_key(f), Value::String(dec(x)));
        }
    }
    Ok(Outcome::ok(json!({
        "method": method.to_string(),
        "house": seats,
        "seats": seat_vector,
        "values": divergence_values(&values),
        "limit_mean": limit,
    })))
}

fn oracle_cmd<R: Real>(method: &Method, functional: Functional, w: &PartyWeights<R>, seats: u64) -> Result<Outcome, CliError> {
    let check = verify_minimizer_identity(method, functional, w, seats)?;
    let failure = (!check.holds).then(|| format!("{method} orbit differs from the {functional:?} argmin at witness {:?}", check.witness));
    let orbit: Vec<_> = check.method_orbit.iter().take(DEFAULT_TIE_LIMIT).collect();
    Ok(Outcome {
        result: json!({
            "method": method.to_string(),
            "functional": functional,
            "house": seats,
            "holds": check.holds,
            "method_orbit": orbit,
            "argmin": check.argmin,
            "witness": check.witness,
        }),
        failure,
        table: None,
    })
}

fn period_cmd(method: &Method, w: &PartyWeights<num_rational::BigRational>) -> Result<Outcome, CliError> {
    let period = detect_period(w)?;
    let average = period_average_bias(method, w)?;
    let p: Vec<f64> = w.shares().iter().map(Real::to_f64).collect();
    let limit = predict_bias(method, &p).ok().map(|b| decs(&b));
    Ok(Outcome::ok(json!({
        "method": method.to_string(),
        "parties": names_of(w),
        "period": period,
        "start": method.small_n_guard(w.len(), Real::to_f64(&w.min_share())),
        "average_excess": nums(&average),
        "limit_excess_irrational_shares": limit,
    })))
}
