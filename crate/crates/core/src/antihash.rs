//! Collision construction for polynomial rolling hashes.
//!
//! For moduli `p_i` and bases `q_i`, two equal-length strings collide when
//! their code difference vector `d` satisfies `sum_j d_j q_i^j = 0 (mod p_i)`
//! for every `i` and each `|d_j|` stays below the charset size. Such `d` are
//! short vectors of the lattice spanned by
//!
//! ```text
//! [ lambda*Q  I ]      Q[j][i] = q_i^j mod p_i
//! [ lambda*P  0 ]      P = diag(p_i)
//! ```
//!
//! whose first `n` coordinates vanish. An exact integral LLL reduction exposes
//! them; a birthday search covers small moduli when the lattice route fails.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regex::Regex;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::provider::{HashSpecCandidate, Provider, ProviderRequest, RequestKind, ResponseContent};
use crate::sandbox::{tool_limits, Sandbox};
use crate::util::parse_int_expr;

/// Largest supported modulus: unsigned 64-bit wraparound.
pub const MAX_MODULUS: u128 = 1 << 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AntihashError {
    #[error("CHARSET_VIOLATION: {0:?} is outside the charset")]
    CharsetViolation(char),
    #[error("invalid hash spec: {0}")]
    InvalidSpec(String),
    #[error("NO_SPEC_FOUND")]
    NoSpecFound,
    #[error("NOT_FOUND")]
    NotFound,
    #[error("COLLISION_UNREACHABLE: {0}")]
    CollisionUnreachable(String),
}

/// Which end of the string carries the lowest power of the base.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// `h = sum_j code(s_j) * q^j`.
    #[default]
    Ascending,
    /// `h = h * q + code(c)` over the string, so the first character carries
    /// the highest power.
    Horner,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RollingHashSpec {
    pub bases: Vec<u128>,
    pub moduli: Vec<u128>,
    pub charset: (char, char),
    pub mapping_offset: i64,
    pub orientation: Orientation,
}

impl RollingHashSpec {
    pub fn new(bases: Vec<u128>, moduli: Vec<u128>) -> Result<Self, AntihashError> {
        let spec = RollingHashSpec { bases, moduli, charset: ('a', 'z'), mapping_offset: 1, orientation: Orientation::Ascending };
        spec.validate()?;
        Ok(spec)
    }

    pub fn single(base: u128, modulus: u128) -> Result<Self, AntihashError> {
        Self::new(vec![base], vec![modulus])
    }

    pub fn with_charset(mut self, first: char, last: char) -> Self {
        self.charset = (first, last);
        self
    }

    pub fn with_offset(mut self, offset: i64) -> Self {
        self.mapping_offset = offset;
        self
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn validate(&self) -> Result<(), AntihashError> {
        let bad = |m: String| Err(AntihashError::InvalidSpec(m));
        if self.bases.is_empty() || self.bases.len() != self.moduli.len() {
            return bad(format!("{} bases for {} moduli", self.bases.len(), self.moduli.len()));
        }
        for (&q, &p) in self.bases.iter().zip(&self.moduli) {
            if !(2..=MAX_MODULUS).contains(&p) {
                return bad(format!("modulus {p} outside [2, 2^64]"));
            }
            if q < 2 || q >= p {
                return bad(format!("base {q} not in [2, {p})"));
            }
        }
        if self.charset.0 > self.charset.1 {
            return bad(format!("empty charset {:?}..{:?}", self.charset.0, self.charset.1));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.bases.len()
    }

    pub fn charset_size(&self) -> u32 {
        self.charset.1 as u32 - self.charset.0 as u32 + 1
    }

    fn code(&self, c: char) -> Result<i64, AntihashError> {
        if c < self.charset.0 || c > self.charset.1 {
            return Err(AntihashError::CharsetViolation(c));
        }
        Ok(c as i64 - self.charset.0 as i64 + self.mapping_offset)
    }

    /// Product of the moduli, saturating.
    pub fn modulus_product(&self) -> u128 {
        self.moduli.iter().fold(1u128, |acc, &p| acc.saturating_mul(p))
    }
}

fn mulmod(a: u128, b: u128, p: u128) -> u128 {
    // Both factors are below p <= 2^64, so the product fits in u128.
    (a % p) * (b % p) % p
}

fn reduce_code(code: i64, p: u128) -> u128 {
    let r = code.rem_euclid(p.min(i64::MAX as u128) as i64) as u128;
    if p > i64::MAX as u128 && code < 0 {
        p - code.unsigned_abs() as u128
    } else {
        r
    }
}

pub fn eval_rolling_hash(s: &str, spec: &RollingHashSpec) -> Result<Vec<u128>, AntihashError> {
    let codes: Vec<i64> = s.chars().map(|c| spec.code(c)).collect::<Result<_, _>>()?;
    Ok(spec
        .bases
        .iter()
        .zip(&spec.moduli)
        .map(|(&q, &p)| match spec.orientation {
            Orientation::Horner => codes.iter().fold(0, |h, &c| (mulmod(h, q, p) + reduce_code(c, p)) % p),
            Orientation::Ascending => {
                let (mut h, mut pw) = (0u128, 1 % p);
                for &c in &codes {
                    h = (h + mulmod(reduce_code(c, p), pw, p)) % p;
                    pw = mulmod(pw, q, p);
                }
                h
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeBasis {
    pub n: usize,
    pub l: usize,
    pub lambda: BigInt,
    pub rows: Vec<Vec<BigInt>>,
}

impl LatticeBasis {
    pub fn dimension(&self) -> usize {
        self.n + self.l
    }
}

pub fn build_lattice(spec: &RollingHashSpec, l: usize, lambda: &BigInt) -> LatticeBasis {
    let n = spec.n();
    let dim = n + l;
    let mut rows = vec![vec![BigInt::zero(); dim]; dim];
    for (i, (&q, &p)) in spec.bases.iter().zip(&spec.moduli).enumerate() {
        let mut pw = 1 % p;
        for row in rows.iter_mut().take(l) {
            row[i] = lambda * BigInt::from(pw);
            pw = mulmod(pw, q, p);
        }
        rows[l + i][i] = lambda * BigInt::from(p);
    }
    for (j, row) in rows.iter_mut().enumerate().take(l) {
        row[n + j] = BigInt::one();
    }
    LatticeBasis { n, l, lambda: lambda.clone(), rows }
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Nearest integer to `num / den` for `den > 0`, halves rounded up.
fn round_div(num: &BigInt, den: &BigInt) -> BigInt {
    let twice: BigInt = num * 2 + den;
    twice.div_floor(&(den * 2))
}

/// Integral LLL state: `d[i + 1]` is the Gram determinant of the first `i + 1`
/// vectors (`d[0] = 1`) and `lam[k][j] = d[j + 1] * mu[k][j]`.
struct Lll<'a> {
    b: &'a mut [Vec<BigInt>],
    d: Vec<BigInt>,
    lam: Vec<Vec<BigInt>>,
}

impl Lll<'_> {
    fn dd(&self, i: isize) -> &BigInt {
        &self.d[(i + 1) as usize]
    }

    fn gram_schmidt_row(&mut self, k: usize) {
        for j in 0..=k {
            let mut u = dot(&self.b[k], &self.b[j]);
            for i in 0..j {
                u = (self.dd(i as isize) * &u - &self.lam[k][i] * &self.lam[j][i]) / self.dd(i as isize - 1);
            }
            if j < k {
                self.lam[k][j] = u;
            } else {
                assert!(!u.is_zero(), "lattice basis rows are linearly dependent");
                self.d[k + 1] = u;
            }
        }
    }

    fn reduce(&mut self, k: usize, l: usize) {
        let dl = self.dd(l as isize).clone();
        let twice: BigInt = &self.lam[k][l] * 2;
        if twice.abs() <= dl {
            return;
        }
        let q = round_div(&self.lam[k][l], &dl);
        let bl = self.b[l].clone();
        for (x, y) in self.b[k].iter_mut().zip(&bl) {
            *x -= &q * y;
        }
        self.lam[k][l] -= &q * &dl;
        for i in 0..l {
            let t = &q * &self.lam[l][i];
            self.lam[k][i] -= t;
        }
    }

    fn swap(&mut self, k: usize, kmax: usize) {
        self.b.swap(k, k - 1);
        for j in 0..k - 1 {
            let t = std::mem::take(&mut self.lam[k][j]);
            self.lam[k][j] = std::mem::replace(&mut self.lam[k - 1][j], t);
        }
        let lam = self.lam[k][k - 1].clone();
        let k_i = k as isize;
        let big_b = (self.dd(k_i - 2) * self.dd(k_i) + &lam * &lam) / self.dd(k_i - 1);
        for i in k + 1..=kmax {
            let t = self.lam[i][k].clone();
            self.lam[i][k] = (self.dd(k_i) * &self.lam[i][k - 1] - &lam * &t) / self.dd(k_i - 1);
            self.lam[i][k - 1] = (&big_b * &t + &lam * &self.lam[i][k]) / self.dd(k_i);
        }
        self.d[k] = big_b;
    }
}

/// Exact LLL with Lovasz parameter `delta = num / den`, `1/4 < delta < 1`.
pub fn lll_reduce_rows(rows: &mut [Vec<BigInt>], num: u64, den: u64) {
    assert!(4 * num > den && num < den, "delta must lie in (1/4, 1)");
    let n = rows.len();
    if n < 2 {
        return;
    }
    let (num, den) = (BigInt::from(num), BigInt::from(den));
    let mut s = Lll { b: rows, d: vec![BigInt::one(); n + 1], lam: vec![vec![BigInt::zero(); n]; n] };
    s.gram_schmidt_row(0);
    let (mut k, mut kmax) = (1usize, 0usize);
    while k < n {
        if k > kmax {
            kmax = k;
            s.gram_schmidt_row(k);
        }
        s.reduce(k, k - 1);
        let ki = k as isize;
        let lhs = &den * s.dd(ki) * s.dd(ki - 2);
        let rhs = &num * s.dd(ki - 1) * s.dd(ki - 1) - &den * &s.lam[k][k - 1] * &s.lam[k][k - 1];
        if lhs < rhs {
            s.swap(k, kmax);
            k = (k - 1).max(1);
        } else {
            for l in (0..k - 1).rev() {
                s.reduce(k, l);
            }
            k += 1;
        }
    }
}

pub fn lll_reduce(basis: &LatticeBasis, delta: (u64, u64)) -> LatticeBasis {
    let mut out = basis.clone();
    lll_reduce_rows(&mut out.rows, delta.0, delta.1);
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CollisionPair {
    pub a: String,
    pub b: String,
    pub spec: RollingHashSpec,
}

fn verified_pair(a: String, b: String, spec: &RollingHashSpec) -> Option<CollisionPair> {
    let ok = a != b
        && a.chars().count() == b.chars().count()
        && eval_rolling_hash(&a, spec).ok()? == eval_rolling_hash(&b, spec).ok()?;
    ok.then(|| CollisionPair { a, b, spec: spec.clone() })
}

/// Strings for difference vector `d`: `a_j - b_j = d_j`, padded with the
/// first charset character.
pub fn reconstruct(d: &[i64], start: char) -> (String, String) {
    let ch = |v: i64| char::from_u32(start as u32 + v as u32).expect("within charset");
    (d.iter().map(|&x| ch(x.max(0))).collect(), d.iter().map(|&x| ch((-x).max(0))).collect())
}

/// Scans reduced rows for `(0, d)` with `d != 0` and entries within the
/// charset span. Works in ascending orientation.
pub fn extract_collision(reduced: &LatticeBasis, spec: &RollingHashSpec) -> Result<CollisionPair, AntihashError> {
    let ascending = spec.clone().with_orientation(Orientation::Ascending);
    let span = spec.charset_size() as i64 - 1;
    for row in &reduced.rows {
        if row[..reduced.n].iter().any(|x| !x.is_zero()) {
            continue;
        }
        let d: Option<Vec<i64>> = row[reduced.n..].iter().map(|x| x.to_i64().filter(|v| v.abs() <= span)).collect();
        let Some(d) = d else { continue };
        if d.iter().all(|&x| x == 0) {
            continue;
        }
        let (a, b) = reconstruct(&d, spec.charset.0);
        if let Some(pair) = verified_pair(a, b, &ascending) {
            return Ok(pair);
        }
    }
    Err(AntihashError::NotFound)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AntihashConfig {
    pub delta: f64,
    pub lambda_log2: u32,
    #[serde(rename = "L0")]
    pub l0: Option<usize>,
    #[serde(rename = "L_max")]
    pub l_max: usize,
    /// Most strings the birthday fallback may hash; it draws at most
    /// `4 sqrt(m)` regardless.
    pub birthday_budget: usize,
    /// Birthday fallback only runs when the modulus product is at most this.
    pub birthday_max_modulus: u128,
    pub seed: u64,
}

impl Default for AntihashConfig {
    fn default() -> Self {
        AntihashConfig {
            delta: 0.99,
            lambda_log2: 64,
            l0: None,
            l_max: 256,
            birthday_budget: 1 << 21,
            birthday_max_modulus: 1 << 40,
            seed: 0,
        }
    }
}

impl AntihashConfig {
    pub fn delta_ratio(&self) -> (u64, u64) {
        const DEN: u64 = 1_000_000;
        ((self.delta * DEN as f64).round() as u64, DEN)
    }

    pub fn lambda(&self) -> BigInt {
        BigInt::one() << self.lambda_log2
    }

    /// `max(16, ceil(n * log2(max p) / log2(51)) + 8)`, where 51 counts the
    /// difference values in [-25, 25].
    pub fn initial_length(&self, spec: &RollingHashSpec) -> usize {
        if let Some(l0) = self.l0 {
            return l0.max(1);
        }
        let max_p = *spec.moduli.iter().max().expect("validated spec") as f64;
        let bits = spec.n() as f64 * max_p.log2() / 51f64.log2();
        16usize.max(bits.ceil() as usize + 8)
    }
}

fn lattice_search(spec: &RollingHashSpec, cfg: &AntihashConfig) -> Option<CollisionPair> {
    let lambda = cfg.lambda();
    let mut l = cfg.initial_length(spec).min(cfg.l_max.max(1));
    loop {
        let reduced = lll_reduce(&build_lattice(spec, l, &lambda), cfg.delta_ratio());
        if let Ok(pair) = extract_collision(&reduced, spec) {
            return Some(pair);
        }
        if l >= cfg.l_max {
            return None;
        }
        l = (l * 2).min(cfg.l_max);
    }
}

/// Lattice search with growing length, then the birthday fallback for small
/// moduli. The returned pair is verified under `spec` as given.
pub fn find_collision(spec: &RollingHashSpec, cfg: &AntihashConfig) -> Result<CollisionPair, AntihashError> {
    spec.validate()?;
    if spec.charset_size() < 2 {
        return Err(AntihashError::CollisionUnreachable("charset has a single character".into()));
    }
    let orient = |pair: CollisionPair| -> Option<CollisionPair> {
        let (a, b) = match spec.orientation {
            Orientation::Ascending => (pair.a, pair.b),
            Orientation::Horner => (pair.a.chars().rev().collect(), pair.b.chars().rev().collect()),
        };
        verified_pair(a, b, spec)
    };
    if let Some(pair) = lattice_search(spec, cfg).and_then(orient) {
        return Ok(pair);
    }
    let m = spec.modulus_product();
    if m <= cfg.birthday_max_modulus {
        let hasher = |s: &str| eval_rolling_hash(s, spec).expect("charset strings");
        let budget = cfg.birthday_budget.min(4 * (m as f64).sqrt().ceil() as usize);
        if let Some((a, b)) = birthday_collision(&hasher, m, Some(budget), spec.charset, 16, cfg.seed) {
            if let Some(pair) = verified_pair(a, b, spec) {
                return Ok(pair);
            }
        }
    }
    Err(AntihashError::CollisionUnreachable(format!("no collision up to L = {}", cfg.l_max)))
}

/// `ceil(1.177 * sqrt(m))`, the pool size giving about even odds of a collision.
pub fn birthday_pool_size(m: u128) -> usize {
    (1.177 * (m as f64).sqrt()).ceil() as usize
}

/// Draws up to `budget` seeded random strings (default `1.177 sqrt(m)`),
/// checking each against the table of earlier hashes, so every pair drawn is
/// compared.
pub fn birthday_collision<H, V>(
    hasher: &H,
    m: u128,
    budget: Option<usize>,
    charset: (char, char),
    len: usize,
    seed: u64,
) -> Option<(String, String)>
where
    H: Fn(&str) -> V + ?Sized,
    V: std::hash::Hash + Eq,
{
    birthday_pool(hasher, budget.unwrap_or_else(|| birthday_pool_size(m)), charset, len, seed)
}

/// Birthday search with an explicit pool size.
pub fn birthday_pool<H, V>(hasher: &H, pool: usize, charset: (char, char), len: usize, seed: u64) -> Option<(String, String)>
where
    H: Fn(&str) -> V + ?Sized,
    V: std::hash::Hash + Eq,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = (charset.0 as u32, charset.1 as u32);
    let mut seen: HashMap<V, String> = HashMap::with_capacity(pool);
    for _ in 0..pool {
        let s: String = (0..len).map(|_| char::from_u32(rng.gen_range(lo..=hi)).expect("charset")).collect();
        let h = hasher(&s);
        match seen.get(&h) {
            Some(prev) if *prev != s => return Some((prev.clone(), s)),
            Some(_) => {}
            None => {
                seen.insert(h, s);
            }
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SpecOrigin {
    Provider,
    PatternScan,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DetectedSpec {
    pub spec: RollingHashSpec,
    /// A program built from the submission's own hash statement reproduced
    /// `eval_rolling_hash` on a probe string.
    pub verified: bool,
    pub origin: SpecOrigin,
    pub input_template: Option<String>,
}

fn parse_modulus(text: &str) -> Result<u128, AntihashError> {
    parse_int_expr(text)
        .and_then(|v| v.to_u128())
        .ok_or_else(|| AntihashError::InvalidSpec(format!("cannot read integer `{text}`")))
}

/// `a-z`, `'a'-'z'`, `a..z` or an explicit list `a,b,...,z`.
pub fn parse_charset(text: &str) -> Option<(char, char)> {
    let chars: Vec<char> =
        text.chars().filter(|c| !c.is_whitespace() && !matches!(c, '\'' | '"' | '[' | ']' | '{' | '}')).collect();
    let s: String = chars.iter().collect();
    let range = |a: &str, b: &str| -> Option<(char, char)> {
        let (a, b) = (a.chars().next()?, b.chars().next()?);
        (a <= b).then_some((a, b))
    };
    if s.contains(',') {
        let items: Vec<&str> = s.split(',').filter(|x| !x.is_empty()).collect();
        let first = items.first()?;
        let last = items.last()?;
        if *last == "..." || items.iter().any(|x| *x == "...") {
            return range(first, last).or_else(|| range(first, items.iter().rev().find(|x| **x != "...")?));
        }
        return range(first, last);
    }
    if let Some((a, b)) = s.split_once("..") {
        return range(a, b);
    }
    match chars.as_slice() {
        [a, '-', b] => range(&a.to_string(), &b.to_string()),
        _ => None,
    }
}

/// Character-to-code offset from forms like `c-'a'+1`, `{'a':1,...}` or
/// "raw ASCII".
pub fn parse_mapping(text: &str, charset: (char, char)) -> Option<i64> {
    let lower = text.to_ascii_lowercase();
    if lower.contains("ascii") || lower.contains("raw") {
        return Some(charset.0 as i64);
    }
    static DICT: OnceLock<Regex> = OnceLock::new();
    let dict = DICT.get_or_init(|| Regex::new(r"'(.)'\s*:\s*(-?\d+)").unwrap());
    if let Some(cap) = dict.captures(text) {
        let c = cap[1].chars().next()?;
        let v: i64 = cap[2].parse().ok()?;
        return Some(v - (c as i64 - charset.0 as i64));
    }
    static SUB: OnceLock<Regex> = OnceLock::new();
    let sub = SUB.get_or_init(|| Regex::new(r"-\s*'(.)'\s*(?:([+-])\s*(\d+))?").unwrap());
    if let Some(cap) = sub.captures(text) {
        let c = cap[1].chars().next()?;
        let extra: i64 = cap.get(3).map_or(Some(0), |m| m.as_str().parse().ok())?;
        let extra = if cap.get(2).is_some_and(|s| s.as_str() == "-") { -extra } else { extra };
        return Some(extra + (charset.0 as i64 - c as i64));
    }
    None
}

fn parse_orientation(text: &str) -> Orientation {
    let lower = text.to_ascii_lowercase();
    if lower.contains("horner") || lower.contains("desc") || lower.contains("first") {
        Orientation::Horner
    } else {
        Orientation::Ascending
    }
}

pub fn spec_from_candidate(c: &HashSpecCandidate) -> Result<RollingHashSpec, AntihashError> {
    let bases = c.bases.iter().map(|b| parse_modulus(b)).collect::<Result<Vec<_>, _>>()?;
    let moduli = c.moduli.iter().map(|m| parse_modulus(m)).collect::<Result<Vec<_>, _>>()?;
    let charset = match &c.charset {
        Some(text) => parse_charset(text).ok_or_else(|| AntihashError::InvalidSpec(format!("charset `{text}`")))?,
        None => ('a', 'z'),
    };
    let offset = match &c.mapping {
        Some(text) => parse_mapping(text, charset).ok_or_else(|| AntihashError::InvalidSpec(format!("mapping `{text}`")))?,
        None => 1,
    };
    let orientation = c.orientation.as_deref().map(parse_orientation).unwrap_or_default();
    let spec = RollingHashSpec { bases, moduli, charset, mapping_offset: offset, orientation };
    spec.validate()?;
    Ok(spec)
}

/// A recognised `h = (h * B + term) % M` or wraparound `h = h * B + term`
/// statement.
#[derive(Debug, Clone)]
struct HashStatement {
    spec: RollingHashSpec,
    term: String,
}

fn scan_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(
            r"(?x)
            \b(?P<h>[A-Za-z_]\w*)\s*=\s*\(?\s*\(?\s*(?P<h2>[A-Za-z_]\w*)\s*\*\s*(?P<base>\w+)\s*\)?\s*
            \+\s*(?P<term>[^;%]+?)\s*\)?\s*(?:%\s*(?P<mod>[\w+]+)\s*)?;",
        )
        .unwrap()
    })
}

fn resolve_constant(source: &str, token: &str) -> Option<u128> {
    let token = token.trim_end_matches(['u', 'U', 'l', 'L']);
    if token.starts_with(|c: char| c.is_ascii_digit()) {
        return parse_int_expr(token)?.to_u128();
    }
    let re = Regex::new(&format!(r"\b{}\s*=\s*([0-9][0-9eE+]*)", regex::escape(token))).ok()?;
    let value = re.captures(source)?.get(1)?.as_str().trim_end_matches(['u', 'U', 'l', 'L']);
    parse_int_expr(value)?.to_u128()
}

fn term_offset(term: &str) -> i64 {
    parse_mapping(term, ('a', 'z')).unwrap_or('a' as i64)
}

fn scan_statements(source: &str) -> Vec<HashStatement> {
    let wraps = source.contains("unsigned long long") || source.contains("uint64_t") || source.contains("ull");
    let mut out: Vec<HashStatement> = Vec::new();
    for cap in scan_re().captures_iter(source) {
        if cap["h"] != cap["h2"] {
            continue;
        }
        let Some(base) = resolve_constant(source, &cap["base"]) else { continue };
        let modulus = match cap.name("mod") {
            Some(m) => match resolve_constant(source, m.as_str()) {
                Some(v) => v,
                None => continue,
            },
            None if wraps => MAX_MODULUS,
            None => continue,
        };
        let term = cap["term"].trim().trim_start_matches('(').trim_end_matches(')').to_string();
        let Ok(spec) = RollingHashSpec::single(base, modulus) else { continue };
        let spec = spec.with_offset(term_offset(&term)).with_orientation(Orientation::Horner);
        if !out.iter().any(|s| s.spec == spec) {
            out.push(HashStatement { spec, term });
        }
    }
    out
}

fn probe_string(spec: &RollingHashSpec) -> String {
    let size = spec.charset_size();
    (0..12u32).map(|i| char::from_u32(spec.charset.0 as u32 + (i * 7 + 3) % size).unwrap()).collect()
}

/// Builds a program running the submission's hash statement over a probe
/// string and compares its output with `eval_rolling_hash`.
fn verify_against_source(sb: &Sandbox, stmt: &HashStatement, spec: &RollingHashSpec) -> Option<bool> {
    if spec.n() != 1 {
        return None;
    }
    static INDEXED: OnceLock<Regex> = OnceLock::new();
    static IDENT: OnceLock<Regex> = OnceLock::new();
    let indexed = INDEXED.get_or_init(|| Regex::new(r"[A-Za-z_]\w*\s*\[[^\]]*\]").unwrap());
    let ident = IDENT.get_or_init(|| Regex::new(r"'[^']*'|\b[A-Za-z_]\w*\b").unwrap());
    let term = indexed.replace_all(&stmt.term, "c");
    let term = ident.replace_all(&term, |c: &regex::Captures| {
        let m = &c[0];
        if m.starts_with('\'') || matches!(m, "int" | "long" | "unsigned" | "char") {
            m.to_string()
        } else {
            "c".to_string()
        }
    });
    let (q, p) = (spec.bases[0], spec.moduli[0]);
    let step = if p == MAX_MODULUS {
        format!("h = h * {q}ULL + (unsigned long long)({term});")
    } else {
        format!("h = (h * {q}ULL + (unsigned long long)({term})) % {p}ULL;")
    };
    let probe = probe_string(spec);
    let program = format!(
        "#include <cstdio>\n#include <string>\nint main() {{\n    std::string s = \"{probe}\";\n    unsigned long long h = 0;\n    for (char c : s) {{ {step} }}\n    std::printf(\"%llu\\n\", h);\n}}\n"
    );
    let art = sb.compile(&program, crate::model::DEFAULT_TOOL_TOOLCHAIN).ok()?;
    let run = sb.execute(&art, b"", &tool_limits()).ok()?;
    let printed: u128 = String::from_utf8_lossy(&run.stdout).trim().parse().ok()?;
    Some(eval_rolling_hash(&probe, spec).ok()?[0] == printed)
}

/// Heuristic gate: the source multiplies and adds inside a loop over a
/// string, the shape every polynomial hash has.
pub fn looks_like_hashing(source: &str) -> bool {
    !scan_statements(source).is_empty() || source.to_ascii_lowercase().contains("hash")
}

/// Candidate specs from the provider and from a pattern scan. Candidates
/// that the source-derived check contradicts are dropped; the rest are
/// returned verified or unverified.
pub fn detect_hash_spec(
    sb: &Sandbox,
    source: &str,
    provider: Option<&mut dyn Provider>,
) -> Result<(Vec<DetectedSpec>, Vec<String>), AntihashError> {
    let statements = scan_statements(source);
    let mut notes = Vec::new();
    let mut found: Vec<DetectedSpec> = Vec::new();

    let mut consider = |spec: RollingHashSpec, origin, template: Option<String>, notes: &mut Vec<String>| {
        let mut verified = false;
        for stmt in &statements {
            if stmt.spec.bases != spec.bases || stmt.spec.moduli != spec.moduli {
                continue;
            }
            match verify_against_source(sb, stmt, &spec) {
                Some(true) => verified = true,
                Some(false) => {
                    notes.push(format!("candidate {:?}/{:?} disagrees with the submission", spec.bases, spec.moduli));
                    return;
                }
                None => {}
            }
        }
        if let Some(existing) = found.iter_mut().find(|d| d.spec == spec) {
            existing.verified |= verified;
            if existing.input_template.is_none() {
                existing.input_template = template;
            }
            return;
        }
        found.push(DetectedSpec { spec, verified, origin, input_template: template });
    };

    if let Some(provider) = provider {
        let req = ProviderRequest::new(RequestKind::HashSpecExtract).with("target_source", source);
        match provider.respond(&req) {
            Ok(resp) => match resp.content {
                ResponseContent::HashSpecExtract { candidates } => {
                    for c in candidates {
                        match spec_from_candidate(&c) {
                            Ok(spec) => consider(spec, SpecOrigin::Provider, c.input_template.clone(), &mut notes),
                            Err(e) => notes.push(format!("provider candidate rejected: {e}")),
                        }
                    }
                }
                other => notes.push(format!("unexpected {} content", other.kind())),
            },
            Err(e) => notes.push(format!("provider: {e}")),
        }
    }
    for stmt in &statements {
        consider(stmt.spec.clone(), SpecOrigin::PatternScan, None, &mut notes);
    }
    if found.is_empty() {
        return Err(AntihashError::NoSpecFound);
    }
    Ok((found, notes))
}

/// Spec file accepted by the CLI:
/// `{bases, moduli, charset: [first, last], offset, orientation}`.
pub fn spec_from_json(value: &Value) -> Result<RollingHashSpec, AntihashError> {
    let bad = |m: &str| AntihashError::InvalidSpec(m.to_string());
    let list = |field: &str| -> Result<Vec<u128>, AntihashError> {
        let items = match value.get(field) {
            Some(Value::Array(a)) => a.clone(),
            Some(v @ (Value::Number(_) | Value::String(_))) => vec![v.clone()],
            _ => return Err(bad(&format!("missing `{field}`"))),
        };
        items
            .iter()
            .map(|v| match v {
                Value::Number(n) => parse_modulus(&n.to_string()),
                Value::String(s) => parse_modulus(s),
                _ => Err(bad(&format!("`{field}` entries must be integers"))),
            })
            .collect()
    };
    let mut spec = RollingHashSpec::new(list("bases")?, list("moduli")?)?;
    if let Some(cs) = value.get("charset") {
        spec.charset = match cs {
            Value::Array(a) if a.len() == 2 => {
                let ch = |v: &Value| v.as_str().and_then(|s| s.chars().next());
                (ch(&a[0]).ok_or_else(|| bad("charset"))?, ch(&a[1]).ok_or_else(|| bad("charset"))?)
            }
            Value::String(s) => parse_charset(s).ok_or_else(|| bad("charset"))?,
            _ => return Err(bad("charset must be [first, last]")),
        };
    }
    if let Some(off) = value.get("offset") {
        spec.mapping_offset = off.as_i64().ok_or_else(|| bad("offset must be an integer"))?;
    }
    if let Some(o) = value.get("orientation").and_then(Value::as_str) {
        spec.orientation = parse_orientation(o);
    }
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent evaluator: arbitrary precision, powers computed directly.
    fn reference_hash(s: &str, spec: &RollingHashSpec) -> Vec<BigInt> {
        let codes: Vec<BigInt> =
            s.chars().map(|c| BigInt::from(c as i64 - spec.charset.0 as i64 + spec.mapping_offset)).collect();
        let len = codes.len();
        spec.bases
            .iter()
            .zip(&spec.moduli)
            .map(|(&q, &p)| {
                let (q, p) = (BigInt::from(q), BigInt::from(p));
                let mut total = BigInt::zero();
                for (j, c) in codes.iter().enumerate() {
                    let e = match spec.orientation {
                        Orientation::Ascending => j,
                        Orientation::Horner => len - 1 - j,
                    };
                    total += c * q.pow(e as u32);
                }
                total.mod_floor(&p)
            })
            .collect()
    }

    #[test]
    fn eval_examples() {
        let spec = RollingHashSpec::single(31, 1_000_000_007).unwrap();
        assert_eq!(eval_rolling_hash("", &spec).unwrap(), vec![0]);
        assert_eq!(eval_rolling_hash("ab", &spec).unwrap(), vec![63]);
        assert_eq!(eval_rolling_hash("ba", &spec).unwrap(), vec![33]);
        assert_eq!(eval_rolling_hash("aB", &spec), Err(AntihashError::CharsetViolation('B')));
    }

    #[test]
    fn eval_matches_reference_for_wraparound_and_horner() {
        for orientation in [Orientation::Ascending, Orientation::Horner] {
            for spec in [
                RollingHashSpec::single(131, MAX_MODULUS).unwrap(),
                RollingHashSpec::new(vec![131, 137], vec![1_000_000_007, 1_000_000_009]).unwrap(),
            ] {
                let spec = spec.with_orientation(orientation);
                let s = "thequickbrownfoxjumpsoverthelazydog";
                let got: Vec<BigInt> = eval_rolling_hash(s, &spec).unwrap().into_iter().map(BigInt::from).collect();
                assert_eq!(got, reference_hash(s, &spec));
            }
        }
    }

    #[test]
    fn lattice_block_structure() {
        let spec = RollingHashSpec::single(10, 97).unwrap();
        let basis = build_lattice(&spec, 2, &BigInt::one());
        let want: Vec<Vec<BigInt>> =
            [[1, 1, 0], [10, 0, 1], [97, 0, 0]].iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        assert_eq!(basis.rows, want);
        let two = RollingHashSpec::new(vec![3, 5], vec![7, 11]).unwrap();
        assert_eq!(build_lattice(&two, 4, &BigInt::one()).dimension(), 6);
    }

    #[test]
    fn extraction_example() {
        let spec = RollingHashSpec::single(10, 97).unwrap();
        let (a, b) = reconstruct(&[7, 9, 0, 0], 'a');
        assert_eq!((a.as_str(), b.as_str()), ("hjaa", "aaaa"));
        assert_eq!(eval_rolling_hash(&a, &spec).unwrap(), vec![44]);
        assert_eq!(eval_rolling_hash(&b, &spec).unwrap(), vec![44]);
        let row = |d: [i64; 4]| {
            let mut r = vec![BigInt::zero()];
            r.extend(d.iter().map(|&x| BigInt::from(x)));
            r
        };
        let reduced = LatticeBasis { n: 1, l: 4, lambda: BigInt::one(), rows: vec![row([30, -3, 0, 0]), row([7, 9, 0, 0])] };
        let pair = extract_collision(&reduced, &spec).unwrap();
        assert_eq!((pair.a.as_str(), pair.b.as_str()), ("hjaa", "aaaa"));
        let zeros = LatticeBasis { n: 1, l: 4, lambda: BigInt::one(), rows: vec![row([0, 0, 0, 0])] };
        assert_eq!(extract_collision(&zeros, &spec), Err(AntihashError::NotFound));
    }

    #[test]
    fn charset_and_mapping_parsing() {
        assert_eq!(parse_charset("a-z"), Some(('a', 'z')));
        assert_eq!(parse_charset("'a'-'z'"), Some(('a', 'z')));
        assert_eq!(parse_charset("a,b,c,...,x,y,z"), Some(('a', 'z')));
        assert_eq!(parse_charset("0..9"), Some(('0', '9')));
        assert_eq!(parse_mapping("s[i] - 'a' + 1", ('a', 'z')), Some(1));
        assert_eq!(parse_mapping("c - 'a'", ('a', 'z')), Some(0));
        assert_eq!(parse_mapping("{'a':1,'b':2,...}", ('a', 'z')), Some(1));
        assert_eq!(parse_mapping("raw ASCII", ('a', 'z')), Some(97));
    }

    #[test]
    fn pattern_scan_finds_constants() {
        let src = "const long long MOD = 998244353;\nint main(){ long long h = 0; for (char c : s) h = (h * 131 + c - 'a' + 1) % MOD; }";
        let found = scan_statements(src);
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].spec.bases, vec![131]);
        assert_eq!(found[0].spec.moduli, vec![998244353]);
        assert_eq!(found[0].spec.mapping_offset, 1);
        let ull = "unsigned long long h = 0; for (char c : s) h = h * 131 + c;";
        let found = scan_statements(ull);
        assert_eq!(found[0].spec.moduli, vec![MAX_MODULUS]);
        assert_eq!(found[0].spec.mapping_offset, 'a' as i64);
        assert!(scan_statements("int main(){ int x = 1; x = x + 2; }").is_empty());
    }

    #[test]
    fn spec_json_accepts_expressions() {
        let v: Value = serde_json::json!({"bases": [10], "moduli": ["97"], "charset": ["a", "z"], "offset": 1});
        let spec = spec_from_json(&v).unwrap();
        assert_eq!((spec.bases[0], spec.moduli[0]), (10, 97));
        let v: Value = serde_json::json!({"bases": [131], "moduli": ["2^64"]});
        assert_eq!(spec_from_json(&v).unwrap().moduli, vec![MAX_MODULUS]);
        let v: Value = serde_json::json!({"bases": [131], "moduli": [100]});
        assert!(spec_from_json(&v).is_err(), "base must be below modulus");
    }
}
