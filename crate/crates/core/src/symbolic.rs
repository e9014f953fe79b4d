//! Exact operator algebra for Weyl ordering.
//!
//! Expressions are kept over complex rationals. A normal form is a map
//! `(u, v, k) -> d` standing for `d hbar^k x^u p^v` with every `x` to the
//! left of every `p`. Reordering uses
//!
//! `p^b x^c = sum_j C(b, j) C(c, j) j! (-i hbar)^j x^(c-j) p^(b-j)`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::{Complex, Complex64};
use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::symbol::MAX_DEGREE;

pub type Rational = Ratio<i64>;
pub type ComplexRational = Complex<Rational>;

fn rat(n: i64) -> Rational {
    Rational::from_integer(n)
}

fn cr(re: Rational, im: Rational) -> ComplexRational {
    Complex::new(re, im)
}

fn zero() -> ComplexRational {
    cr(rat(0), rat(0))
}

fn binomial(n: u32, k: u32) -> i64 {
    if k > n {
        return 0;
    }
    (0..k as i64).fold(1i64, |acc, j| acc * (n as i64 - j) / (j + 1))
}

fn factorial(n: u32) -> i64 {
    (1..=n as i64).product()
}

/// `(-i)^j`
fn minus_i_pow(j: u32) -> ComplexRational {
    match j % 4 {
        0 => cr(rat(1), rat(0)),
        1 => cr(rat(0), rat(-1)),
        2 => cr(rat(-1), rat(0)),
        _ => cr(rat(0), rat(1)),
    }
}

/// `sum d hbar^k x^u p^v`, keyed by `(u, v, k)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NormalForm {
    terms: BTreeMap<(u32, u32, u32), ComplexRational>,
}

impl NormalForm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(u: u32, v: u32, k: u32, d: ComplexRational) -> Self {
        let mut out = Self::zero();
        out.add_term(u, v, k, d);
        out
    }

    /// Normal form of the word `p^a x^b p^c`.
    pub fn pxp(a: u32, b: u32, c: u32) -> Self {
        let mut out = Self::zero();
        for j in 0..=a.min(b) {
            let n = binomial(a, j) * binomial(b, j) * factorial(j);
            out.add_term(b - j, a - j + c, j, minus_i_pow(j) * rat(n));
        }
        out
    }

    fn add_term(&mut self, u: u32, v: u32, k: u32, d: ComplexRational) {
        let entry = self.terms.entry((u, v, k)).or_insert_with(zero);
        *entry += d;
        if *entry == zero() {
            self.terms.remove(&(u, v, k));
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&(u, v, k), &d) in &other.terms {
            out.add_term(u, v, k, d);
        }
        out
    }

    pub fn scale(&self, c: ComplexRational) -> Self {
        let mut out = Self::zero();
        for (&(u, v, k), &d) in &self.terms {
            out.add_term(u, v, k, d * c);
        }
        out
    }

    /// Operator product `self * other`, reduced to normal form.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&(u1, v1, k1), &d1) in &self.terms {
            for (&(u2, v2, k2), &d2) in &other.terms {
                for (&(u, v, k), &d) in &Self::pxp(v1, u2, 0).terms {
                    out.add_term(u1 + u, v + v2, k1 + k2 + k, d1 * d2 * d);
                }
            }
        }
        out
    }

    /// `(u, v, k, d)` sorted by descending total degree, then descending
    /// power of `x`, then ascending power of `hbar`.
    pub fn terms(&self) -> Vec<(u32, u32, u32, ComplexRational)> {
        let mut v: Vec<_> = self.terms.iter().map(|(&(u, v, k), &d)| (u, v, k, d)).collect();
        v.sort_by(|a, b| (b.0 + b.1).cmp(&(a.0 + a.1)).then(b.0.cmp(&a.0)).then(a.2.cmp(&b.2)));
        v
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Numeric coefficients `(u, v, d hbar^k)` for a given `hbar`.
    pub fn evaluate(&self, hbar: f64) -> Vec<(u32, u32, Complex64)> {
        let mut merged: BTreeMap<(u32, u32), Complex64> = BTreeMap::new();
        for (&(u, v, k), d) in &self.terms {
            let c = Complex64::new(to_f64(&d.re), to_f64(&d.im)) * hbar.powi(k as i32);
            *merged.entry((u, v)).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        merged.into_iter().map(|((u, v), c)| (u, v, c)).collect()
    }
}

fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn fmt_magnitude(r: Rational) -> String {
    let r = if r < rat(0) { -r } else { r };
    if r == rat(1) {
        String::new()
    } else if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("({}/{})", r.numer(), r.denom())
    }
}

fn fmt_power(name: &str, e: u32) -> String {
    match e {
        0 => String::new(),
        1 => name.to_string(),
        _ => format!("{name}^{e}"),
    }
}

/// Sign and unsigned text of one normal-form term.
fn fmt_term(u: u32, v: u32, k: u32, d: ComplexRational) -> (bool, String) {
    let mono = [fmt_power("x", u), fmt_power("p", v)].into_iter().filter(|s| !s.is_empty()).collect::<Vec<_>>();
    let hbar = fmt_power("hbar", k);
    let mut parts: Vec<String> = Vec::new();
    let negative;
    if d.im == rat(0) {
        negative = d.re < rat(0);
        let m = fmt_magnitude(d.re);
        if !m.is_empty() {
            parts.push(m);
        }
        if !hbar.is_empty() {
            parts.push(hbar);
        }
    } else if d.re == rat(0) {
        negative = d.im < rat(0);
        let mut s = format!("{}i", fmt_magnitude(d.im));
        if !hbar.is_empty() {
            s = format!("{s}*{hbar}");
        }
        parts.push(s);
    } else {
        negative = false;
        let sign = if d.im < rat(0) { "-" } else { "+" };
        parts.push(format!("({} {sign} {}i)", d.re, fmt_magnitude(d.im)));
        if !hbar.is_empty() {
            parts.push(hbar);
        }
    }
    parts.extend(mono);
    if parts.is_empty() {
        parts.push("1".into());
    }
    (negative, parts.join(" "))
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (u, v, k, d)) in terms.into_iter().enumerate() {
            let (neg, body) = fmt_term(u, v, k, d);
            match (n, neg) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

/// `sum coeff p^a x^b p^c` together with its normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedOperatorExpr {
    terms: Vec<(u32, u32, u32, Rational)>,
    normal: NormalForm,
}

impl OrderedOperatorExpr {
    pub fn from_words(terms: Vec<(u32, u32, u32, Rational)>) -> Self {
        let normal = terms.iter().fold(NormalForm::zero(), |acc, &(a, b, c, coeff)| {
            acc.add(&NormalForm::pxp(a, b, c).scale(cr(coeff, rat(0))))
        });
        Self { terms, normal }
    }

    /// `(a, b, c, coeff)` for each word `coeff p^a x^b p^c`.
    pub fn terms(&self) -> &[(u32, u32, u32, Rational)] {
        &self.terms
    }

    pub fn normal_form(&self) -> &NormalForm {
        &self.normal
    }

    /// Text of the ordered sum, e.g. `(1/2) p x + (1/2) x p`.
    pub fn ordered_text(&self) -> String {
        let mut out = String::new();
        for (n, &(a, b, c, coeff)) in self.terms.iter().enumerate() {
            let word: Vec<String> = [fmt_power("p", a), fmt_power("x", b), fmt_power("p", c)]
                .into_iter()
                .filter(|s| !s.is_empty())
                .collect();
            let m = fmt_magnitude(coeff);
            let mut parts = Vec::new();
            if !m.is_empty() {
                parts.push(m);
            }
            parts.extend(word);
            if parts.is_empty() {
                parts.push("1".into());
            }
            let sep = match (n, coeff < rat(0)) {
                (0, false) => "",
                (0, true) => "-",
                (_, false) => " + ",
                (_, true) => " - ",
            };
            out.push_str(sep);
            out.push_str(&parts.join(" "));
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

impl fmt::Display for OrderedOperatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.normal)
    }
}

/// Weyl-ordered `x^r p^s`: `2^-s sum_k C(s, k) p^(s-k) x^r p^k`.
pub fn mccoy_order(r: u32, s: u32) -> Result<OrderedOperatorExpr> {
    if r + s > MAX_DEGREE {
        return Err(Error::DegreeTooHigh(r + s));
    }
    let denom = 1i64 << s;
    let words = (0..=s).map(|k| (s - k, r, k, Rational::new(binomial(s, k), denom))).collect();
    Ok(OrderedOperatorExpr::from_words(words))
}

/// Weyl-ordered `x^r p^s` through the mirrored rule
/// `2^-r sum_k C(r, k) x^(r-k) p^s x^k`, reduced to normal form.
pub fn mccoy_order_mirrored(r: u32, s: u32) -> Result<NormalForm> {
    if r + s > MAX_DEGREE {
        return Err(Error::DegreeTooHigh(r + s));
    }
    let denom = 1i64 << r;
    let mut out = NormalForm::zero();
    for k in 0..=r {
        let left = NormalForm::monomial(r - k, s, 0, cr(rat(1), rat(0)));
        let right = NormalForm::monomial(k, 0, 0, cr(rat(1), rat(0)));
        out = out.add(&left.mul(&right).scale(cr(Rational::new(binomial(r, k), denom), rat(0))));
    }
    Ok(out)
}
