//! Reference computations written independently of the library code paths.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use hackforge::antihash::{Orientation, RollingHashSpec};

/// Hash by direct power sums over arbitrary-precision integers.
pub fn reference_hash(s: &str, spec: &RollingHashSpec) -> Vec<BigInt> {
    let codes: Vec<i64> = s.chars().map(|c| c as i64 - spec.charset.0 as i64 + spec.mapping_offset).collect();
    let len = codes.len();
    spec.bases
        .iter()
        .zip(&spec.moduli)
        .map(|(&q, &p)| {
            let q = BigInt::from(q);
            let mut total = BigInt::zero();
            for (j, &c) in codes.iter().enumerate() {
                let e = match spec.orientation {
                    Orientation::Ascending => j,
                    Orientation::Horner => len - 1 - j,
                };
                total += BigInt::from(c) * q.pow(e as u32);
            }
            total.mod_floor(&BigInt::from(p))
        })
        .collect()
}

pub fn in_charset(s: &str, spec: &RollingHashSpec) -> bool {
    s.chars().all(|c| c >= spec.charset.0 && c <= spec.charset.1)
}

pub fn is_verified_collision(a: &str, b: &str, spec: &RollingHashSpec) -> bool {
    a != b
        && a.chars().count() == b.chars().count()
        && in_charset(a, spec)
        && in_charset(b, spec)
        && reference_hash(a, spec) == reference_hash(b, spec)
}

/// Exact fraction with positive denominator.
#[derive(Clone, Debug, PartialEq)]
pub struct Frac(pub BigInt, pub BigInt);

impl Frac {
    fn new(n: BigInt, d: BigInt) -> Frac {
        let g = n.gcd(&d);
        let (mut n, mut d) = if g.is_zero() { (n, d) } else { (n / &g, d / &g) };
        if d.is_negative() {
            n = -n;
            d = -d;
        }
        Frac(n, d)
    }
    fn int(v: &BigInt) -> Frac {
        Frac(v.clone(), BigInt::one())
    }
    fn add(&self, o: &Frac) -> Frac {
        Frac::new(&self.0 * &o.1 + &o.0 * &self.1, &self.1 * &o.1)
    }
    fn sub(&self, o: &Frac) -> Frac {
        Frac::new(&self.0 * &o.1 - &o.0 * &self.1, &self.1 * &o.1)
    }
    fn mul(&self, o: &Frac) -> Frac {
        Frac::new(&self.0 * &o.0, &self.1 * &o.1)
    }
    fn div(&self, o: &Frac) -> Frac {
        Frac::new(&self.0 * &o.1, &self.1 * &o.0)
    }
    fn abs(&self) -> Frac {
        Frac(self.0.abs(), self.1.clone())
    }
    fn le(&self, o: &Frac) -> bool {
        &self.0 * &o.1 <= &o.0 * &self.1
    }
}

/// Textbook Gram-Schmidt over rationals: returns mu and squared norms of b*.
pub fn gram_schmidt(rows: &[Vec<BigInt>]) -> (Vec<Vec<Frac>>, Vec<Frac>) {
    let n = rows.len();
    let mut star: Vec<Vec<Frac>> = Vec::new();
    let mut norms: Vec<Frac> = Vec::new();
    let mut mu = vec![vec![Frac::int(&BigInt::zero()); n]; n];
    let dot = |a: &[Frac], b: &[Frac]| a.iter().zip(b).fold(Frac::int(&BigInt::zero()), |acc, (x, y)| acc.add(&x.mul(y)));
    for i in 0..n {
        let bi: Vec<Frac> = rows[i].iter().map(Frac::int).collect();
        let mut v = bi.clone();
        for j in 0..i {
            mu[i][j] = dot(&bi, &star[j]).div(&norms[j]);
            v = v.iter().zip(&star[j]).map(|(x, y)| x.sub(&mu[i][j].mul(y))).collect();
        }
        norms.push(dot(&v, &v));
        star.push(v);
    }
    (mu, norms)
}

/// Size reduction (|mu| <= 1/2) and the Lovasz condition with delta = num/den.
pub fn is_lll_reduced(rows: &[Vec<BigInt>], num: i64, den: i64) -> bool {
    let (mu, norms) = gram_schmidt(rows);
    let half = Frac::new(BigInt::one(), BigInt::from(2));
    let delta = Frac::new(BigInt::from(num), BigInt::from(den));
    for i in 0..rows.len() {
        for j in 0..i {
            if !mu[i][j].abs().le(&half) {
                return false;
            }
        }
        if i > 0 {
            let rhs = delta.sub(&mu[i][i - 1].mul(&mu[i][i - 1])).mul(&norms[i - 1]);
            if !rhs.le(&norms[i]) {
                return false;
            }
        }
    }
    true
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn determinant(rows: &[Vec<BigInt>]) -> BigInt {
    let n = rows.len();
    let mut m: Vec<Vec<BigInt>> = rows.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}
