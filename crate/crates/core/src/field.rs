//! Exact field elements: arbitrary-precision rationals, prime fields F_p,
//! and cyclotomic fields Q(zeta_n) with elements reduced modulo the n-th
//! cyclotomic polynomial.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Descriptor of the base field all entries of a matrix or tensor share.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Field {
    /// The rational numbers Q.
    Rational,
    /// The prime field F_p.
    Prime(u64),
    /// The cyclotomic field Q(zeta_n), zeta_n a primitive n-th root of unity.
    Cyclotomic(u32),
}

impl Field {
    pub fn prime(p: u64) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::Parse(format!("{p} is not prime")));
        }
        Ok(Field::Prime(p))
    }

    pub fn cyclotomic(n: u32) -> Result<Field> {
        if n == 0 {
            return Err(Error::Parse("cyclotomic order must be positive".into()));
        }
        Ok(Field::Cyclotomic(n))
    }

    /// Parses the CLI spelling: `Q`, `Fp:<p>` or `cyc:<n>`.
    pub fn parse_flag(s: &str) -> Result<Field> {
        if s == "Q" {
            return Ok(Field::Rational);
        }
        if let Some(p) = s.strip_prefix("Fp:") {
            let p: u64 = p
                .parse()
                .map_err(|_| Error::Parse(format!("bad prime in field flag {s:?}")))?;
            return Field::prime(p);
        }
        // Accept the shorthand F2, F3, ... as well.
        if let Some(p) = s.strip_prefix('F') {
            if let Ok(p) = p.parse::<u64>() {
                return Field::prime(p);
            }
        }
        if let Some(n) = s.strip_prefix("cyc:") {
            let n: u32 = n
                .parse()
                .map_err(|_| Error::Parse(format!("bad order in field flag {s:?}")))?;
            return Field::cyclotomic(n);
        }
        Err(Error::Parse(format!("unknown field flag {s:?}")))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Prime(p) => *p,
            _ => 0,
        }
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    /// Interprets a rational literal in this field. Fails on prime fields
    /// when the denominator is divisible by the characteristic.
    pub fn from_rational(&self, r: &BigRational) -> Result<Scalar> {
        match self {
            Field::Rational => Ok(Scalar::Rational(r.clone())),
            Field::Prime(p) => {
                let p_big = BigInt::from(*p);
                let num = r.numer().mod_floor(&p_big);
                let den = r.denom().mod_floor(&p_big);
                let num = u64::try_from(&num).expect("reduced residue fits");
                let den = u64::try_from(&den).expect("reduced residue fits");
                if den == 0 {
                    return Err(Error::Parse(format!(
                        "denominator of {r} vanishes in F_{p}"
                    )));
                }
                let den_inv = Scalar::Prime { value: den, p: *p }.inv()?;
                Ok(Scalar::Prime { value: num, p: *p }.mul(&den_inv))
            }
            Field::Cyclotomic(n) => {
                let deg = cyclotomic_degree(*n);
                let mut coeffs = vec![BigRational::zero(); deg];
                coeffs[0] = r.clone();
                Ok(Scalar::Cyclotomic {
                    order: *n,
                    coeffs,
                })
            }
        }
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match self {
            Field::Rational => Scalar::Rational(BigRational::from_integer(BigInt::from(v))),
            Field::Prime(p) => {
                let m = v.rem_euclid(*p as i64) as u64;
                Scalar::Prime { value: m, p: *p }
            }
            Field::Cyclotomic(n) => {
                let deg = cyclotomic_degree(*n);
                let mut coeffs = vec![BigRational::zero(); deg];
                if deg > 0 {
                    coeffs[0] = BigRational::from_integer(BigInt::from(v));
                } else if v.rem_euclid(1) != 0 {
                    unreachable!()
                }
                Scalar::Cyclotomic { order: *n, coeffs }
            }
        }
    }

    /// The canonical primitive n-th root of unity in this field, when one exists.
    pub fn primitive_root(&self, n: usize) -> Result<Scalar> {
        if n == 0 {
            return Err(Error::BadRoot {
                n,
                reason: "order must be positive".into(),
            });
        }
        match self {
            Field::Rational => match n {
                1 => Ok(self.one()),
                2 => Ok(self.from_i64(-1)),
                _ => Err(Error::BadRoot {
                    n,
                    reason: "Q contains only the roots 1 and -1".into(),
                }),
            },
            Field::Prime(p) => {
                if n as u64 % *p == 0 {
                    return Err(Error::BadRoot {
                        n,
                        reason: format!("characteristic {p} divides {n}"),
                    });
                }
                if (*p - 1) % n as u64 != 0 {
                    return Err(Error::BadRoot {
                        n,
                        reason: format!("{n} does not divide |F_{p}^*| = {}", p - 1),
                    });
                }
                for c in 1..*p {
                    if mul_order(c, *p) == n as u64 {
                        return Ok(Scalar::Prime { value: c, p: *p });
                    }
                }
                Err(Error::BadRoot {
                    n,
                    reason: format!("no element of order {n} in F_{p}"),
                })
            }
            Field::Cyclotomic(m) => {
                if n == 1 {
                    return Ok(self.one());
                }
                if n == 2 {
                    return Ok(self.from_i64(-1));
                }
                if *m as usize % n == 0 {
                    let zeta = self.cyclotomic_generator();
                    return Ok(zeta.pow(*m as u64 / n as u64));
                }
                Err(Error::BadRoot {
                    n,
                    reason: format!("{n} does not divide the cyclotomic order {m}"),
                })
            }
        }
    }

    /// zeta_n itself, as an element of Q(zeta_n).
    pub fn cyclotomic_generator(&self) -> Scalar {
        match self {
            Field::Cyclotomic(n) => {
                let deg = cyclotomic_degree(*n);
                let mut coeffs = vec![BigRational::zero(); deg];
                if deg > 1 {
                    coeffs[1] = BigRational::one();
                    Scalar::Cyclotomic { order: *n, coeffs }
                } else {
                    // n = 1 or 2: zeta is rational (1 or -1) reduced mod a linear polynomial.
                    let phi = cyclotomic_poly(*n);
                    let c0 = -BigRational::from_integer(phi[0].clone());
                    coeffs[0] = c0;
                    Scalar::Cyclotomic { order: *n, coeffs }
                }
            }
            _ => panic!("cyclotomic_generator on a non-cyclotomic field"),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "Q"),
            Field::Prime(p) => write!(f, "Fp:{p}"),
            Field::Cyclotomic(n) => write!(f, "cyc:{n}"),
        }
    }
}

impl Serialize for Field {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(None)?;
        match self {
            Field::Rational => map.serialize_entry("kind", "Q")?,
            Field::Prime(p) => {
                map.serialize_entry("kind", "Fp")?;
                map.serialize_entry("p", p)?;
            }
            Field::Cyclotomic(n) => {
                map.serialize_entry("kind", "cyc")?;
                map.serialize_entry("n", n)?;
            }
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Field {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Field, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        let kind = v
            .get("kind")
            .and_then(|k| k.as_str())
            .ok_or_else(|| D::Error::custom("field descriptor needs a \"kind\""))?;
        match kind {
            "Q" => Ok(Field::Rational),
            "Fp" => {
                let p = v
                    .get("p")
                    .and_then(|p| p.as_u64())
                    .ok_or_else(|| D::Error::custom("Fp descriptor needs \"p\""))?;
                Field::prime(p).map_err(D::Error::custom)
            }
            "cyc" => {
                let n = v
                    .get("n")
                    .and_then(|n| n.as_u64())
                    .ok_or_else(|| D::Error::custom("cyc descriptor needs \"n\""))?;
                Field::cyclotomic(n as u32).map_err(D::Error::custom)
            }
            other => Err(D::Error::custom(format!("unknown field kind {other:?}"))),
        }
    }
}

/// One exact field element. All arithmetic is total within a field; mixing
/// elements of different fields is a programming error and panics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scalar {
    Rational(BigRational),
    Prime { value: u64, p: u64 },
    Cyclotomic { order: u32, coeffs: Vec<BigRational> },
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Rational(_) => Field::Rational,
            Scalar::Prime { p, .. } => Field::Prime(*p),
            Scalar::Cyclotomic { order, .. } => Field::Cyclotomic(*order),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Prime { value, .. } => *value == 0,
            Scalar::Cyclotomic { coeffs, .. } => coeffs.iter().all(|c| c.is_zero()),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Prime { value, .. } => *value == 1,
            Scalar::Cyclotomic { order, coeffs } => {
                let one = Field::Cyclotomic(*order).one();
                match one {
                    Scalar::Cyclotomic { coeffs: oc, .. } => coeffs == &oc,
                    _ => unreachable!(),
                }
            }
        }
    }

    pub fn add(&self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Prime { value: a, p }, Scalar::Prime { value: b, p: q }) if p == q => {
                Scalar::Prime {
                    value: (a + b) % p,
                    p: *p,
                }
            }
            (
                Scalar::Cyclotomic { order: n, coeffs: a },
                Scalar::Cyclotomic { order: m, coeffs: b },
            ) if n == m => Scalar::Cyclotomic {
                order: *n,
                coeffs: a.iter().zip(b).map(|(x, y)| x + y).collect(),
            },
            _ => panic!("field mismatch: {} vs {}", self.field(), rhs.field()),
        }
    }

    pub fn sub(&self, rhs: &Scalar) -> Scalar {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Prime { value, p } => Scalar::Prime {
                value: (p - value) % p,
                p: *p,
            },
            Scalar::Cyclotomic { order, coeffs } => Scalar::Cyclotomic {
                order: *order,
                coeffs: coeffs.iter().map(|c| -c).collect(),
            },
        }
    }

    pub fn mul(&self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Prime { value: a, p }, Scalar::Prime { value: b, p: q }) if p == q => {
                Scalar::Prime {
                    value: ((*a as u128 * *b as u128) % *p as u128) as u64,
                    p: *p,
                }
            }
            (
                Scalar::Cyclotomic { order: n, coeffs: a },
                Scalar::Cyclotomic { order: m, coeffs: b },
            ) if n == m => {
                let prod = poly_mul(a, b);
                let red = poly_rem_cyclotomic(&prod, *n);
                Scalar::Cyclotomic {
                    order: *n,
                    coeffs: red,
                }
            }
            _ => panic!("field mismatch: {} vs {}", self.field(), rhs.field()),
        }
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::SingularMatrix { rank: 0, dim: 1 });
        }
        Ok(match self {
            Scalar::Rational(a) => Scalar::Rational(a.recip()),
            Scalar::Prime { value, p } => Scalar::Prime {
                value: pow_mod(*value, p - 2, *p),
                p: *p,
            },
            Scalar::Cyclotomic { order, coeffs } => {
                let phi: Vec<BigRational> = cyclotomic_poly(*order)
                    .iter()
                    .map(|c| BigRational::from_integer(c.clone()))
                    .collect();
                let inv = poly_inverse_mod(coeffs, &phi).expect("cyclotomic polynomial is irreducible over Q");
                let deg = cyclotomic_degree(*order);
                let mut c = inv;
                c.resize(deg, BigRational::zero());
                Scalar::Cyclotomic {
                    order: *order,
                    coeffs: c,
                }
            }
        })
    }

    pub fn div(&self, rhs: &Scalar) -> Result<Scalar> {
        Ok(self.mul(&rhs.inv()?))
    }

    pub fn pow(&self, mut e: u64) -> Scalar {
        let mut base = self.clone();
        let mut acc = self.field().one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// String form used in all JSON documents: `a/b` (or `a`) for rationals,
    /// `v mod p` for prime fields. Cyclotomic elements serialize as objects.
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Scalar::Rational(r) => {
                if r.denom().is_one() {
                    serde_json::Value::String(r.numer().to_string())
                } else {
                    serde_json::Value::String(format!("{}/{}", r.numer(), r.denom()))
                }
            }
            Scalar::Prime { value, p } => serde_json::Value::String(format!("{value} mod {p}")),
            Scalar::Cyclotomic { order, coeffs } => {
                let cs: Vec<serde_json::Value> = coeffs
                    .iter()
                    .map(|c| {
                        if c.denom().is_one() {
                            serde_json::Value::String(c.numer().to_string())
                        } else {
                            serde_json::Value::String(format!("{}/{}", c.numer(), c.denom()))
                        }
                    })
                    .collect();
                serde_json::json!({"order": order, "coeffs": cs})
            }
        }
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Scalar> {
        match v {
            serde_json::Value::String(s) => Self::parse_flat(s),
            serde_json::Value::Number(n) => {
                let i = n
                    .as_i64()
                    .ok_or_else(|| Error::Parse(format!("non-integer scalar literal {n}")))?;
                Ok(Field::Rational.from_i64(i))
            }
            serde_json::Value::Object(o) => {
                let order = o
                    .get("order")
                    .and_then(|x| x.as_u64())
                    .ok_or_else(|| Error::Parse("cyclotomic scalar needs \"order\"".into()))?
                    as u32;
                let deg = cyclotomic_degree(order);
                let raw = o
                    .get("coeffs")
                    .and_then(|x| x.as_array())
                    .ok_or_else(|| Error::Parse("cyclotomic scalar needs \"coeffs\"".into()))?;
                let mut coeffs = Vec::with_capacity(raw.len());
                for c in raw {
                    let s = c
                        .as_str()
                        .ok_or_else(|| Error::Parse("cyclotomic coefficients are strings".into()))?;
                    coeffs.push(parse_rational(s)?);
                }
                if coeffs.len() > deg {
                    return Err(Error::Parse(format!(
                        "cyclotomic representative of degree {} exceeds deg(Phi_{order}) = {deg}",
                        coeffs.len() - 1
                    )));
                }
                coeffs.resize(deg, BigRational::zero());
                Ok(Scalar::Cyclotomic { order, coeffs })
            }
            _ => Err(Error::Parse(format!("cannot read scalar from {v}"))),
        }
    }

    fn parse_flat(s: &str) -> Result<Scalar> {
        let s = s.trim();
        if let Some((v, p)) = s.split_once(" mod ") {
            let p: u64 = p
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad modulus in {s:?}")))?;
            let field = Field::prime(p)?;
            let v: i64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad residue in {s:?}")))?;
            return Ok(field.from_i64(v));
        }
        Ok(Scalar::Rational(parse_rational(s)?))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => write!(f, "{r}"),
            Scalar::Prime { value, p } => write!(f, "{value} mod {p}"),
            Scalar::Cyclotomic { order, coeffs } => {
                write!(f, "cyc{order}[")?;
                for (i, c) in coeffs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, "]")
            }
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Scalar, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        Scalar::from_json(&v).map_err(D::Error::custom)
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(n, d))
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc: u128 = 1;
    let mut base = b as u128 % p as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u128;
        }
        base = base * base % p as u128;
        e >>= 1;
    }
    b = acc as u64;
    b
}

fn mul_order(c: u64, p: u64) -> u64 {
    let mut x = c % p;
    let mut k = 1;
    while x != 1 {
        x = ((x as u128 * c as u128) % p as u128) as u64;
        k += 1;
        if k > p {
            return 0; // c = 0
        }
    }
    k
}

// ---- integer/rational polynomial helpers for cyclotomic arithmetic ----

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_trim(a: &mut Vec<BigRational>) {
    while a.last().map_or(false, |c| c.is_zero()) {
        a.pop();
    }
}

/// Remainder of `a` modulo the monic polynomial `m` (coefficients ascending).
fn poly_rem(a: &[BigRational], m: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = r.last().unwrap().clone();
        let shift = r.len() - 1 - dm;
        for (i, c) in m.iter().enumerate() {
            let t = &lead * c;
            r[shift + i] -= t;
        }
        poly_trim(&mut r);
    }
    r
}

fn poly_rem_cyclotomic(a: &[BigRational], n: u32) -> Vec<BigRational> {
    let phi: Vec<BigRational> = cyclotomic_poly(n)
        .iter()
        .map(|c| BigRational::from_integer(c.clone()))
        .collect();
    let mut r = poly_rem(a, &phi);
    r.resize(cyclotomic_degree(n), BigRational::zero());
    r
}

/// Quotient and remainder of `a` by monic `b`, both ascending.
fn poly_divmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = b.last().unwrap().recip();
    let mut q = vec![BigRational::zero(); r.len().saturating_sub(db)];
    while r.len() > db {
        let c = r.last().unwrap() * &lead_inv;
        let shift = r.len() - 1 - db;
        q[shift] = c.clone();
        for (i, bc) in b.iter().enumerate() {
            let t = &c * bc;
            r[shift + i] -= t;
        }
        poly_trim(&mut r);
    }
    (q, r)
}

/// Inverse of `a` modulo `m` in Q[x] via the extended Euclidean algorithm.
fn poly_inverse_mod(a: &[BigRational], m: &[BigRational]) -> Option<Vec<BigRational>> {
    let mut r0 = m.to_vec();
    let mut r1 = poly_rem(a, m);
    poly_trim(&mut r0);
    poly_trim(&mut r1);
    let mut s0: Vec<BigRational> = vec![];
    let mut s1: Vec<BigRational> = vec![BigRational::one()];
    while !r1.is_empty() {
        let lead = r1.last().unwrap().clone();
        let monic: Vec<BigRational> = r1.iter().map(|c| c / &lead).collect();
        let (q, r) = poly_divmod(&r0, &monic);
        // r0 = q * monic + r, so r0 = (q/lead) * r1 + r.
        let q: Vec<BigRational> = q.iter().map(|c| c / &lead).collect();
        let qs = poly_mul(&q, &s1);
        let mut s2 = s0.clone();
        s2.resize(s2.len().max(qs.len()), BigRational::zero());
        for (i, c) in qs.iter().enumerate() {
            s2[i] -= c;
        }
        poly_trim(&mut s2);
        r0 = r1;
        r1 = r;
        poly_trim(&mut r1);
        s0 = s1;
        s1 = s2;
    }
    // gcd = r0; invertible iff gcd is a nonzero constant.
    if r0.len() != 1 {
        return None;
    }
    let c = r0[0].recip();
    Some(s0.iter().map(|x| x * &c).collect())
}

static CYCLOTOMIC_CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<BigInt>>>>> = OnceLock::new();

/// Coefficients (ascending) of the n-th cyclotomic polynomial Phi_n.
pub fn cyclotomic_poly(n: u32) -> Arc<Vec<BigInt>> {
    let cache = CYCLOTOMIC_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    // Phi_n = (x^n - 1) / prod_{d | n, d < n} Phi_d
    let mut num = vec![BigInt::zero(); n as usize + 1];
    num[0] = -BigInt::one();
    num[n as usize] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            let phi_d = cyclotomic_poly(d);
            num = int_poly_div_exact(&num, &phi_d);
        }
    }
    let arc = Arc::new(num);
    cache.lock().unwrap().insert(n, arc.clone());
    arc
}

pub fn cyclotomic_degree(n: u32) -> usize {
    cyclotomic_poly(n).len() - 1
}

/// Exact division of integer polynomials (b monic divides a).
fn int_poly_div_exact(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let mut q = vec![BigInt::zero(); r.len() - db];
    for shift in (0..q.len()).rev() {
        let c = r[shift + db].clone();
        if c.is_zero() {
            continue;
        }
        q[shift] = c.clone();
        for (i, bc) in b.iter().enumerate() {
            let t = &c * bc;
            r[shift + i] -= t;
        }
    }
    debug_assert!(r.iter().all(|c| c.is_zero()), "inexact polynomial division");
    q
}

pub fn rational_is_integer(r: &BigRational) -> bool {
    r.denom().is_one()
}

pub fn rational_abs_num(r: &BigRational) -> BigInt {
    r.numer().abs()
}
