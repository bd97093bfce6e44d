//! Multivariate polynomials with exact rational coefficients.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::scalar::{format_rational, parse_rational, rational_to_f64, Rational, Scalar};
use crate::{Error, Result};

/// Exponent vector. Ordered graded-lexicographically with `x1 > x2 > …`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(x)
            .filter(|(e, _)| **e > 0)
            .map(|(e, v)| v.powi(*e as i32))
            .product()
    }

    pub fn eval_exact(&self, x: &[Rational]) -> Rational {
        let mut acc = Rational::one();
        for (e, v) in self.0.iter().zip(x) {
            for _ in 0..*e {
                acc *= v;
            }
        }
        acc
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All degree-`d` monomials in `n` variables, largest first.
pub fn monomials_of_degree(n: usize, d: u32) -> Vec<Monomial> {
    fn rec(n: usize, i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i + 1 == n {
            cur[i] = left;
            out.push(Monomial(cur.clone()));
            return;
        }
        for e in (0..=left).rev() {
            cur[i] = e;
            rec(n, i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    if n == 0 {
        if d == 0 {
            out.push(Monomial(Vec::new()));
        }
        return out;
    }
    rec(n, 0, d, &mut vec![0; n], &mut out);
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::from_terms(nvars, [(Monomial::one(nvars), c)])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::from_terms(nvars, [(Monomial::var(nvars, i), Rational::one())])
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Polynomial::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.0.len(), nvars, "exponent vector length");
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m.clone()).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn homogeneous_part(&self, d: u32) -> Polynomial {
        Self::from_terms(
            self.nvars,
            self.terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (m.clone(), c.clone())),
        )
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars);
        let mut p = self.clone();
        for (m, c) in &other.terms {
            p.add_term(m.clone(), c.clone());
        }
        p
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        Self::from_terms(
            self.nvars,
            self.terms.iter().map(|(m, a)| (m.clone(), a * c)),
        )
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars);
        let mut p = Polynomial::zero(self.nvars);
        for (m, a) in &self.terms {
            for (k, b) in &other.terms {
                p.add_term(m.mul(k), a * b);
            }
        }
        p
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        (0..e).fold(
            Polynomial::constant(self.nvars, Rational::one()),
            |acc, _| acc.mul(self),
        )
    }

    pub fn derivative(&self, i: usize) -> Polynomial {
        Self::from_terms(
            self.nvars,
            self.terms.iter().filter(|(m, _)| m.0[i] > 0).map(|(m, c)| {
                let mut e = m.0.clone();
                let k = e[i];
                e[i] -= 1;
                (Monomial(e), c * Rational::from_integer(k.into()))
            }),
        )
    }

    /// Same polynomial in `m ≥ nvars` variables (new ones unused).
    pub fn extend_vars(&self, m: usize) -> Polynomial {
        assert!(m >= self.nvars);
        Self::from_terms(
            m,
            self.terms.iter().map(|(k, c)| {
                let mut e = k.0.clone();
                e.resize(m, 0);
                (Monomial(e), c.clone())
            }),
        )
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: len,
            });
        }
        Ok(())
    }

    pub fn eval_exact(&self, x: &[Rational]) -> Result<Rational> {
        self.check_len(x.len())?;
        Ok(self
            .terms
            .iter()
            .fold(Rational::zero(), |acc, (m, c)| acc + c * m.eval_exact(x)))
    }

    pub fn eval_f64(&self, x: &[f64]) -> Result<f64> {
        self.check_len(x.len())?;
        Ok(self
            .terms
            .iter()
            .map(|(m, c)| rational_to_f64(c) * m.eval_f64(x))
            .sum())
    }

    /// Exact when every coordinate is exact, float otherwise.
    pub fn evaluate(&self, x: &[Scalar]) -> Result<Scalar> {
        let exact: Option<Vec<Rational>> = x.iter().map(|s| s.as_exact().cloned()).collect();
        match exact {
            Some(q) => self.eval_exact(&q).map(Scalar::Exact),
            None => self
                .eval_f64(&x.iter().map(Scalar::to_f64).collect::<Vec<_>>())
                .map(Scalar::Float),
        }
    }

    /// Text form with variables named by `names`.
    pub fn display_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c < &Rational::zero();
            let a = if neg { -c.clone() } else { c.clone() };
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let vars: Vec<String> =
                m.0.iter()
                    .enumerate()
                    .filter(|(_, e)| **e > 0)
                    .map(|(i, e)| {
                        if *e == 1 {
                            names[i].clone()
                        } else {
                            format!("{}^{}", names[i], e)
                        }
                    })
                    .collect();
            if vars.is_empty() {
                out.push_str(&format_rational(&a));
            } else {
                if !a.is_one() {
                    out.push_str(&format_rational(&a));
                    out.push('*');
                }
                out.push_str(&vars.join("*"));
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| json!({"exponents": m.0, "c": format_rational(c)}))
            .collect();
        json!({"nvars": self.nvars, "terms": terms})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("polynomial JSON: {m}"));
        let n = v
            .get("nvars")
            .and_then(Value::as_u64)
            .ok_or_else(|| bad("nvars"))? as usize;
        let mut p = Polynomial::zero(n);
        for t in v
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("terms"))?
        {
            let e: Vec<u32> = t
                .get("exponents")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("exponents"))?
                .iter()
                .map(|x| x.as_u64().map(|x| x as u32).ok_or_else(|| bad("exponent")))
                .collect::<Result<_>>()?;
            if e.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: e.len(),
                });
            }
            let c = t
                .get("c")
                .and_then(Value::as_str)
                .ok_or_else(|| bad("coefficient"))?;
            p.add_term(Monomial(e), parse_rational(c)?);
        }
        Ok(p)
    }

    /// Parses text such as `x1*x5 - x4*x2 + 1/2*x3^2`.
    ///
    /// Variables are `x1..xn` or any of `names`.
    pub fn parse(s: &str, names: &[String]) -> Result<Self> {
        let mut p = Parser {
            s: s.as_bytes(),
            pos: 0,
            names,
        };
        let out = p.expr()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(out)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.nvars).map(|i| format!("x{i}")).collect();
        f.write_str(&self.display_with(&names))
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    names: &'a [String],
}

impl Parser<'_> {
    fn n(&self) -> usize {
        self.names.len()
    }

    fn err(&self, m: &str) -> Error {
        Error::Parse(format!("polynomial: {m} at offset {}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                self.term()?.scale(&-Rational::one())
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.power()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.power()?;
                    if !d.is_constant() || d.is_zero() {
                        return Err(self.err("division by a non-constant or zero"));
                    }
                    acc = acc.scale(&d.coefficient(&Monomial::one(self.n())).recip());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let e: u32 = std::str::from_utf8(&self.s[start..self.pos])
                .ok()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| self.err("bad exponent"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(self.atom()?.scale(&-Rational::one()))
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let t = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii");
                Ok(Polynomial::constant(self.n(), parse_rational(t)?))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.s.len()
                    && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let word = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii");
                if let Some(i) = self.names.iter().position(|nm| nm == word) {
                    return Ok(Polynomial::var(self.n(), i));
                }
                match word.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
                    Some(i) if i >= 1 && i <= self.n() => Ok(Polynomial::var(self.n(), i - 1)),
                    _ => Err(self.err(&format!("unknown variable `{word}`"))),
                }
            }
            _ => Err(self.err("expected a term")),
        }
    }
}

/// Names `x1..xn`.
pub fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn p(s: &str, n: usize) -> Polynomial {
        Polynomial::parse(s, &default_names(n)).unwrap()
    }

    #[test]
    fn display_is_descending_graded_lex() {
        let q = p("1/2*x3^2 - x4*x2 + x1*x5", 5);
        assert_eq!(q.to_string(), "x1*x5 - x2*x4 + 1/2*x3^2");
        assert_eq!(p("x5 + x1^2", 5).to_string(), "x1^2 + x5");
    }

    #[test]
    fn parse_round_trips_through_display() {
        let q = p("x1*x6^2 + x3*x5*x6 - x5^3/3 - x4^2*x6/2", 6);
        assert_eq!(p(&q.to_string(), 6), q);
        assert_eq!(Polynomial::from_json(&q.to_json()).unwrap(), q);
    }

    #[test]
    fn parse_rejects_unknown_variables() {
        assert!(Polynomial::parse("x7", &default_names(3)).is_err());
        assert!(Polynomial::parse("x1/x2", &default_names(3)).is_err());
    }

    #[test]
    fn evaluation_regimes() {
        let q = p("x1^2 + x2^2 - x3^2", 3);
        assert_eq!(q.eval_exact(&[int(0), int(0), int(-3)]).unwrap(), int(-9));
        assert_eq!(q.eval_f64(&[0.0, 0.0, -3.0]).unwrap(), -9.0);
        assert_eq!(
            p("7", 3).eval_exact(&[int(0), int(0), int(0)]).unwrap(),
            int(7)
        );
        assert!(q.eval_f64(&[1.0]).is_err());
        assert_eq!(
            q.evaluate(&[rat(1, 2).into(), 0.into(), 0.into()]).unwrap(),
            Scalar::Exact(rat(1, 4))
        );
    }

    #[test]
    fn derivative_and_product() {
        let q = p("x1^3*x2", 2);
        assert_eq!(q.derivative(0), p("3*x1^2*x2", 2));
        assert_eq!(p("x1 + x2", 2).mul(&p("x1 - x2", 2)), p("x1^2 - x2^2", 2));
    }

    #[test]
    fn monomial_enumeration() {
        let ms = monomials_of_degree(3, 2);
        assert_eq!(ms.len(), 6);
        assert!(ms.windows(2).all(|w| w[0] > w[1]));
        assert_eq!(ms[0], Monomial(vec![2, 0, 0]));
    }
}
