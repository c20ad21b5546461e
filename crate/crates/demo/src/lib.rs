//! Browser bindings: one allocation, the excess histogram of a sweep, and the
//! running mean excess against its limit.

use apportion::asymptotics::{marginal_density, predict_bias};
use apportion::harness::{for_each_allocation, sqrt_shares, sweep_with, SweepOptions};
use apportion::{allocate, seat_excess, Method, PartyWeights, Real, TiePolicy};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Longest sweep the page may request.
pub const MAX_HOUSE: u64 = 200_000;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn parse_votes(text: &str) -> Result<(Vec<String>, Vec<u64>), String> {
    let mut names = Vec::new();
    let mut votes = Vec::new();
    for (k, item) in text.split(',').map(str::trim).filter(|s| !s.is_empty()).enumerate() {
        let (name, value) = item.split_once('=').unwrap_or(("", item));
        let name = if name.trim().is_empty() { format!("P{}", k + 1) } else { name.trim().to_string() };
        let v: u64 = value.trim().parse().map_err(|_| format!("`{value}` is not a vote count"))?;
        if v == 0 {
            return Err(format!("party {name} has no votes"));
        }
        names.push(name);
        votes.push(v);
    }
    if votes.is_empty() {
        return Err("no parties given".into());
    }
    Ok((names, votes))
}

/// `sqrt:<m>` or a comma list of positive numbers (normalised).
fn parse_shares(text: &str) -> Result<PartyWeights<f64>, String> {
    let text = text.trim();
    let shares = match text.strip_prefix("sqrt:") {
        Some(m) => {
            let m: usize = m.parse().map_err(err)?;
            if !(2..=64).contains(&m) {
                return Err("sqrt preset takes 2 to 64 parties".into());
            }
            sqrt_shares(m)
        }
        None => text.split(',').map(|s| s.trim().parse::<f64>().map_err(err)).collect::<Result<_, _>>()?,
    };
    PartyWeights::from_shares(&shares).map_err(err)
}

fn check_house(to: u64) -> Result<(), String> {
    if to > MAX_HOUSE {
        return Err(format!("house sizes above {MAX_HOUSE} are not offered here"));
    }
    Ok(())
}

pub fn allocate_report(method: &str, votes: &str, seats: u64) -> Result<String, String> {
    let method = Method::from_name(method).map_err(err)?;
    let (names, counts) = parse_votes(votes)?;
    check_house(seats)?;
    let w = PartyWeights::from_counts(&counts).map_err(err)?;
    let a = allocate(&method, &w, seats, TiePolicy::EnumerateAll).map_err(err)?;
    let delta = seat_excess(&a, &w).map_err(err)?.delta;
    let n = seats as f64;
    let parties: Vec<_> = (0..w.len())
        .map(|i| {
            json!({
                "name": names[i],
                "votes": counts[i],
                "quota": n * w.shares()[i].to_f64(),
                "seats": a.seats[i],
                "delta": delta[i].to_f64(),
                "delta_exact": delta[i].to_string(),
            })
        })
        .collect();
    let tied: Vec<&String> = a.tie.iter().flat_map(|t| t.tied.iter().map(|&i| &names[i])).collect();
    Ok(json!({
        "method": method.to_string(),
        "house": seats,
        "parties": parties,
        "tied": tied,
        "alternatives": a.alternatives.len(),
    })
    .to_string())
}

pub fn histogram_report(method: &str, shares: &str, party: usize, from: u64, to: u64) -> Result<String, String> {
    let method = Method::from_name(method).map_err(err)?;
    let w = parse_shares(shares)?;
    check_house(to)?;
    if party >= w.len() {
        return Err(format!("party {party} out of range"));
    }
    let options = SweepOptions { bin_width: 0.02, check_bounds: true };
    let stats = sweep_with(&method, &w, from, to, TiePolicy::AverageOverTies, options).map_err(err)?;
    let hist = &stats.histograms[party];
    let total = hist.total().max(1) as f64;
    let bins: Vec<_> = hist.bins().iter().map(|&(x, c)| json!([x, c as f64 / (total * hist.bin_width)])).collect();
    let p = w.shares()[party];
    let limit = method.family().ok().map(|family| {
        let density = marginal_density(family, p, w.len());
        let (lo, hi) = density.support();
        (0..=200)
            .map(|k| {
                let x = lo + (hi - lo) * k as f64 / 200.0;
                json!([x, density.density(x)])
            })
            .collect::<Vec<_>>()
    });
    Ok(json!({
        "method": method.to_string(),
        "party": party,
        "share": p,
        "samples": stats.count,
        "mean": stats.mean[party],
        "variance": stats.variance()[party],
        "bins": bins,
        "limit_density": limit,
    })
    .to_string())
}

pub fn bias_curve_report(method: &str, shares: &str, to: u64, points: usize) -> Result<String, String> {
    let method = Method::from_name(method).map_err(err)?;
    let w = parse_shares(shares)?;
    check_house(to)?;
    let m = w.len();
    let start = method.small_n_guard(m, w.min_share());
    if start > to {
        return Err(format!("sweep would start at {start}, beyond {to}"));
    }
    let every = ((to - start + 1) / points.max(1) as u64).max(1);
    let mut sums = vec![0.0; m];
    let mut count = 0u64;
    let mut curve = Vec::new();
    for_each_allocation(&method, &w, start, to, TiePolicy::AverageOverTies, &mut |a| {
        let n = a.house as f64;
        for ((s, e), p) in sums.iter_mut().zip(a.expected_seats_f64()).zip(w.shares()) {
            *s += e - n * p;
        }
        count += 1;
        if count.is_multiple_of(every) || a.house == to {
            curve.push(json!([a.house, sums.iter().map(|s| s / count as f64).collect::<Vec<_>>()]));
        }
    })
    .map_err(err)?;
    Ok(json!({
        "method": method.to_string(),
        "shares": w.shares(),
        "curve": curve,
        "limit": predict_bias(&method, w.shares()).ok(),
    })
    .to_string())
}

#[wasm_bindgen]
pub fn allocate_seats(method: &str, votes: &str, seats: u32) -> Result<String, JsValue> {
    allocate_report(method, votes, u64::from(seats)).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn excess_histogram(method: &str, shares: &str, party: u32, from: u32, to: u32) -> Result<String, JsValue> {
    histogram_report(method, shares, party as usize, u64::from(from), u64::from(to)).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn bias_curve(method: &str, shares: &str, to: u32, points: u32) -> Result<String, JsValue> {
    bias_curve_report(method, shares, u64::from(to), points as usize).map_err(|e| JsValue::from_str(&e))
}
