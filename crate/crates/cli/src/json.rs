//! JSON output. Floats are written with 17 significant digits so they
//! parse back to the same bits; field order follows the struct order.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};

use crate::{Mode, Solution};

/// Compact formatter that prints `f64` like C's `%.17g`.
struct Digits17;

impl Formatter for Digits17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_g17(value).as_bytes())
    }
}

/// `%.17g`: 17 significant digits, trailing zeros dropped, exponent form
/// outside `1e-4 <= |x| < 1e17`.
pub fn format_g17(x: f64) -> String {
    if !x.is_finite() {
        return "null".to_string();
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m.replace('.', "")),
        None => ("", mantissa.replace('.', "")),
    };
    let digits = digits.trim_end_matches('0');
    if !(-4..17).contains(&exp) {
        let (head, tail) = digits.split_at(1);
        let frac = if tail.is_empty() {
            String::new()
        } else {
            format!(".{tail}")
        };
        let esign = if exp < 0 { '-' } else { '+' };
        return format!("{sign}{head}{frac}e{esign}{:02}", exp.abs());
    }
    if exp < 0 {
        let zeros = "0".repeat((-exp - 1) as usize);
        return format!("{sign}0.{zeros}{digits}");
    }
    let int_len = exp as usize + 1;
    if digits.len() <= int_len {
        format!("{sign}{digits}{}", "0".repeat(int_len - digits.len()))
    } else {
        format!("{sign}{}.{}", &digits[..int_len], &digits[int_len..])
    }
}

#[derive(Serialize)]
struct Duals<'a> {
    a: &'a [f64],
    b: &'a [f64],
}

#[derive(Serialize)]
struct Output<'a> {
    mode: &'static str,
    engine: &'static str,
    n: usize,
    value: f64,
    radii: &'a [f64],
    cover: Vec<(usize, usize, u8)>,
    cycles: &'a [Vec<usize>],
    cover_weight: f64,
    duals: Duals<'a>,
    certificate: &'static str,
    adjusted: &'a [usize],
    #[serde(skip_serializing_if = "Option::is_none")]
    min_radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    h: Option<&'a [f64]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hub_total: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    diameter: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    negative_hubs: Option<&'a [usize]>,
}

pub fn emit_json(sol: &Solution) -> String {
    let a = &sol.assignment;
    let out = Output {
        mode: match sol.mode {
            Mode::Radii => "radii",
            Mode::Star => "star",
            Mode::Cover => "cover",
        },
        engine: sol.engine.as_str(),
        n: sol.radii.len(),
        value: sol.value,
        radii: &sol.radii,
        cover: a
            .cover
            .edges
            .iter()
            .map(|e| (e.i, e.j, e.multiplicity))
            .collect(),
        cycles: &a.cover.cycles,
        cover_weight: a.cover.total_weight,
        duals: Duals {
            a: &a.duals.a,
            b: &a.duals.b,
        },
        certificate: sol.certificate,
        adjusted: &a.adjusted,
        min_radius: sol.min_radius,
        h: sol.star.as_ref().map(|s| s.hub.as_slice()),
        hub_total: sol.star.as_ref().map(|s| s.total),
        diameter: sol.star.as_ref().map(|s| s.diameter),
        negative_hubs: sol.star.as_ref().map(|s| s.negative_hubs.as_slice()),
    };
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(&mut buf, Digits17);
    out.serialize(&mut ser).expect("serializing to memory");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}
