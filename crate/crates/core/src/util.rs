//! Small shared helpers: UTC timestamps and integer expressions such as
//! `2^64`, `1e9+7` or `2^63-1`.

use std::time::{SystemTime, UNIX_EPOCH};

use num_bigint::BigInt;
use num_traits::One;

/// Current time as `YYYY-MM-DDTHH:MM:SSZ`.
pub fn timestamp_now() -> String {
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    format_timestamp(secs)
}

pub fn format_timestamp(unix_secs: u64) -> String {
    let days = (unix_secs / 86_400) as i64;
    let rem = unix_secs % 86_400;
    // Civil-from-days over 400-year eras.
    let z = days + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z - era * 146_097;
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let day = doy - (153 * mp + 2) / 5 + 1;
    let month = if mp < 10 { mp + 3 } else { mp - 9 };
    let year = yoe + era * 400 + i64::from(month <= 2);
    format!("{year:04}-{month:02}-{day:02}T{:02}:{:02}:{:02}Z", rem / 3600, rem % 3600 / 60, rem % 60)
}

/// Evaluates `+ - * ^` over non-negative integer literals (`1e9` allowed).
/// `^` binds tightest and is right-associative.
pub fn parse_int_expr(text: &str) -> Option<BigInt> {
    let tokens: Vec<char> = text.chars().filter(|c| !c.is_whitespace() && *c != '_').collect();
    let mut pos = 0;
    let value = sum(&tokens, &mut pos)?;
    (pos == tokens.len()).then_some(value)
}

fn sum(t: &[char], pos: &mut usize) -> Option<BigInt> {
    let mut acc = product(t, pos)?;
    while let Some(&op) = t.get(*pos) {
        if op != '+' && op != '-' {
            break;
        }
        *pos += 1;
        let rhs = product(t, pos)?;
        acc = if op == '+' { acc + rhs } else { acc - rhs };
    }
    Some(acc)
}

fn product(t: &[char], pos: &mut usize) -> Option<BigInt> {
    let mut acc = power(t, pos)?;
    while t.get(*pos) == Some(&'*') {
        *pos += 1;
        acc *= power(t, pos)?;
    }
    Some(acc)
}

fn power(t: &[char], pos: &mut usize) -> Option<BigInt> {
    let base = atom(t, pos)?;
    if t.get(*pos) == Some(&'^') || (t.get(*pos) == Some(&'*') && t.get(*pos + 1) == Some(&'*')) {
        *pos += if t[*pos] == '^' { 1 } else { 2 };
        let exp = power(t, pos)?;
        let exp: u32 = exp.try_into().ok().filter(|e| *e <= 4096)?;
        return Some(num_traits::pow(base, exp as usize));
    }
    Some(base)
}

fn atom(t: &[char], pos: &mut usize) -> Option<BigInt> {
    if t.get(*pos) == Some(&'(') {
        *pos += 1;
        let v = sum(t, pos)?;
        if t.get(*pos) != Some(&')') {
            return None;
        }
        *pos += 1;
        return Some(v);
    }
    let start = *pos;
    while t.get(*pos).is_some_and(|c| c.is_ascii_digit()) {
        *pos += 1;
    }
    if start == *pos {
        return None;
    }
    let digits: String = t[start..*pos].iter().collect();
    let mut value: BigInt = digits.parse().ok()?;
    if matches!(t.get(*pos), Some('e') | Some('E')) {
        *pos += 1;
        let exp_start = *pos;
        while t.get(*pos).is_some_and(|c| c.is_ascii_digit()) {
            *pos += 1;
        }
        let exp: usize = t[exp_start..*pos].iter().collect::<String>().parse().ok().filter(|e| *e <= 4096)?;
        let mut scale = BigInt::one();
        for _ in 0..exp {
            scale *= 10;
        }
        value *= scale;
    }
    Some(value)
}
