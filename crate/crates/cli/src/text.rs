//! Plain `key=value` output.

use std::fmt::Write;

use crate::{Mode, Solution};

/// Rounds to 13 significant digits so that float noise in the last bits
/// does not show, then prints the shortest form of the result.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.12e}").parse().unwrap_or(x);
    rounded.to_string()
}

pub fn render_text(sol: &Solution) -> String {
    let mut out = String::new();
    match (sol.mode, &sol.star) {
        (Mode::Star, Some(star)) => {
            for (i, h) in star.hub.iter().enumerate() {
                let _ = writeln!(out, "h[{i}]={}", format_number(*h));
            }
            let _ = writeln!(out, "total={}", format_number(star.total));
        }
        (Mode::Cover, _) => {
            let cover = &sol.assignment.cover;
            for (k, cycle) in cover.cycles.iter().enumerate() {
                let vs: Vec<String> = cycle.iter().map(|v| v.to_string()).collect();
                let _ = writeln!(out, "cycle[{k}]={}", vs.join(" "));
            }
            let _ = writeln!(out, "weight={}", format_number(cover.total_weight));
        }
        _ => {
            for (i, r) in sol.radii.iter().enumerate() {
                let _ = writeln!(out, "r[{i}]={}", format_number(*r));
            }
            let _ = writeln!(out, "total={}", format_number(sol.value));
        }
    }
    out
}
