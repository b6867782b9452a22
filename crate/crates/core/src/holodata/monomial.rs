//! Exact-rational scalars, symbolic coefficient products, and monomial data.

use crate::error::{Error, Result};
use crate::holodata::case::CaseSpec;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt;

pub type Rat = BigRational;

/// Shorthand for small rational constants.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Parse "p/q", an integer, or a decimal float (converted exactly from its
/// shortest form, e.g. "0.25" -> 1/4).
pub fn parse_rational(s: &str) -> Result<Rat> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let num: BigInt = p
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("bad rational numerator in {s:?}")))?;
        let den: BigInt = q
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("bad rational denominator in {s:?}")))?;
        if den.is_zero() {
            return Err(Error::invalid(format!("zero denominator in {s:?}")));
        }
        return Ok(Rat::new(num, den));
    }
    if let Ok(i) = s.parse::<BigInt>() {
        return Ok(Rat::from_integer(i));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let digits = frac_part.len() as u32;
        let joined = format!("{int_part}{frac_part}");
        let num: BigInt = joined
            .parse()
            .map_err(|_| Error::invalid(format!("bad decimal {s:?}")))?;
        let den = BigInt::from(10u32).pow(digits);
        return Ok(Rat::new(num, den));
    }
    Err(Error::invalid(format!("cannot parse {s:?} as a rational")))
}

/// Convert to the nearest double; exponent magnitudes here are small.
pub fn rat_to_f64(r: &Rat) -> f64 {
    // Good enough for the magnitudes used here; exponents stay small.
    let num = r.numer();
    let den = r.denom();
    bigint_to_f64(num) / bigint_to_f64(den)
}

fn bigint_to_f64(b: &BigInt) -> f64 {
    b.to_string().parse::<f64>().unwrap_or(f64::NAN)
}

/// Symbolic product  Π_i c_i^{powers[i]}  of the data coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffProduct {
    pub powers: Vec<Rat>,
}

impl CoeffProduct {
    pub fn one(n: usize) -> Self {
        CoeffProduct {
            powers: vec![Rat::zero(); n],
        }
    }

    pub fn mul(&self, other: &CoeffProduct) -> CoeffProduct {
        CoeffProduct {
            powers: self
                .powers
                .iter()
                .zip(&other.powers)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn div(&self, other: &CoeffProduct) -> CoeffProduct {
        CoeffProduct {
            powers: self
                .powers
                .iter()
                .zip(&other.powers)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn pow(&self, e: &Rat) -> CoeffProduct {
        CoeffProduct {
            powers: self.powers.iter().map(|p| p * e).collect(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.powers.iter().all(Rat::is_zero)
    }

    /// Evaluate against concrete positive coefficients (positive real branch
    /// of every rational power).
    pub fn value(&self, c: &[f64]) -> f64 {
        self.powers
            .iter()
            .zip(c)
            .map(|(p, &ci)| ci.powf(rat_to_f64(p)))
            .product()
    }
}

impl fmt::Display for CoeffProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (i, p) in self.powers.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            if wrote {
                write!(f, " ")?;
            }
            if p.is_one() {
                write!(f, "c{i}")?;
            } else {
                write!(f, "c{i}^({p})")?;
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// coeff · z^exponent with a symbolic coefficient and an extra exact rational
/// scalar factor (used e.g. by the change of variable t = scalar · Π c^e · z^e).
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub scalar: Rat,
    pub coeff: CoeffProduct,
    pub exponent: Rat,
}

impl Monomial {
    pub fn coefficient_value(&self, c: &[f64]) -> f64 {
        rat_to_f64(&self.scalar) * self.coeff.value(c)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.scalar.is_one() {
            write!(f, "{} ", self.scalar)?;
        }
        if !self.coeff.is_one() {
            write!(f, "{} ", self.coeff)?;
        }
        if self.exponent.is_zero() {
            if self.scalar.is_one() && self.coeff.is_one() {
                write!(f, "1")?;
            }
        } else if self.exponent.is_one() {
            write!(f, "z")?;
        } else {
            write!(f, "z^({})", self.exponent)?;
        }
        Ok(())
    }
}

/// Asymptotic data as exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaPair {
    pub gamma0: Rat,
    pub gamma1: Rat,
}

impl GammaPair {
    pub fn new(gamma0: Rat, gamma1: Rat) -> Self {
        GammaPair { gamma0, gamma1 }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (rat_to_f64(&self.gamma0), rat_to_f64(&self.gamma1))
    }
}

impl fmt::Display for GammaPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.gamma0, self.gamma1)
    }
}

/// Monomial data p_i = c_i z^{k_i}: exponents (exact, constant on each
/// equality class) and positive coefficients (one per index; coefficients may
/// differ inside a class — only exponents are constrained).
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialData {
    k: Vec<Rat>,
    c: Vec<f64>,
}

impl MonomialData {
    /// Build from one exponent per equality class (in the case's class
    /// order), expanded to all indices; unit coefficients unless given.
    pub fn from_class_exponents(
        case: &CaseSpec,
        class_k: &[Rat],
        c: Option<Vec<f64>>,
    ) -> Result<Self> {
        if class_k.len() != case.p_classes.len() {
            return Err(Error::invalid(format!(
                "case ({},{}) has {} exponent classes, got {}",
                case.l1,
                case.l2,
                case.p_classes.len(),
                class_k.len()
            )));
        }
        let mut k = vec![Rat::zero(); case.n_plus_1];
        for (class, kv) in case.p_classes.iter().zip(class_k) {
            for &i in class {
                k[i] = kv.clone();
            }
        }
        let c = c.unwrap_or_else(|| vec![1.0; case.n_plus_1]);
        MonomialData::new(case, k, c)
    }

    /// Build from a full exponent vector; validates class-constancy of the
    /// exponents and the admissibility bounds k_i >= -1, sum k > -(n+1).
    pub fn new(case: &CaseSpec, k: Vec<Rat>, c: Vec<f64>) -> Result<Self> {
        if k.len() != case.n_plus_1 || c.len() != case.n_plus_1 {
            return Err(Error::invalid(format!(
                "case ({},{}) needs {} exponents and coefficients",
                case.l1, case.l2, case.n_plus_1
            )));
        }
        for class in &case.p_classes {
            for w in class.windows(2) {
                if k[w[0]] != k[w[1]] {
                    return Err(Error::invalid(format!(
                        "exponents must agree on the class {class:?}: k{} = {} vs k{} = {}",
                        w[0], k[w[0]], w[1], k[w[1]]
                    )));
                }
            }
        }
        let minus_one = -Rat::one();
        if let Some(i) = k.iter().position(|ki| ki < &minus_one) {
            return Err(Error::invalid(format!("k{i} = {} violates k_i >= -1", k[i])));
        }
        let total: Rat = k.iter().sum();
        if total <= -Rat::from_integer(BigInt::from(case.n_plus_1)) {
            return Err(Error::invalid(format!(
                "sum of exponents {} must exceed -(n+1) = -{}",
                total, case.n_plus_1
            )));
        }
        if let Some(i) = c.iter().position(|&ci| !(ci > 0.0)) {
            return Err(Error::invalid(format!("c{i} = {} must be positive", c[i])));
        }
        Ok(MonomialData { k, c })
    }

    /// Like [`MonomialData::new`] but also requires coefficients to agree on
    /// each class.
    pub fn new_strict(case: &CaseSpec, k: Vec<Rat>, c: Vec<f64>) -> Result<Self> {
        let data = MonomialData::new(case, k, c)?;
        for class in &case.p_classes {
            for w in class.windows(2) {
                if data.c[w[0]] != data.c[w[1]] {
                    return Err(Error::invalid(format!(
                        "strict mode: coefficients differ on class {class:?}: c{} = {} vs c{} = {}",
                        w[0], data.c[w[0]], w[1], data.c[w[1]]
                    )));
                }
            }
        }
        Ok(data)
    }

    pub fn exponents(&self) -> &[Rat] {
        &self.k
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.c
    }

    /// Exponents of the class representatives, in class order.
    pub fn class_exponents(&self, case: &CaseSpec) -> Vec<Rat> {
        case.p_classes.iter().map(|cl| self.k[cl[0]].clone()).collect()
    }

    pub fn total_degree(&self) -> Rat {
        self.k.iter().sum()
    }
}
