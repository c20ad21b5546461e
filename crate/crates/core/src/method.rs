//! Election methods and the named-method registry.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{ApportionError, Result};
use crate::numeric::{format_ratio, parse_rational, ratio_to_f64};
use crate::signpost::SignpostSequence;

#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    Divisor(SignpostSequence),
    /// Largest-remainder method with quota `V / (N + gamma)`.
    Quota(BigRational),
}

/// Linear parameter controlling the asymptotic behaviour of a method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Divisor { beta: f64 },
    Quota { gamma: f64 },
}

impl Family {
    /// `beta - 1/2` for divisor methods, `gamma` for quota methods.
    pub fn offset(&self) -> f64 {
        match *self {
            Family::Divisor { beta } => beta - 0.5,
            Family::Quota { gamma } => gamma,
        }
    }
}

/// Names accepted by [`Method::from_name`], besides `linear:<beta>` and `quota:<gamma>`.
pub const METHOD_NAMES: &[&str] = &[
    "jefferson",
    "dhondt",
    "webster",
    "sainte-lague",
    "adams",
    "imperiali",
    "danish",
    "adjusted-sainte-lague",
    "cambridge",
    "huntington",
    "huntington-hill",
    "dean",
    "estonia",
    "macau",
    "hamilton",
    "hare",
    "droop",
    "imperiali-quota",
];

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

impl Method {
    pub fn linear(beta: BigRational) -> Self {
        Method::Divisor(SignpostSequence::linear(beta))
    }

    pub fn quota(gamma: BigRational) -> Self {
        Method::Quota(gamma)
    }

    pub fn jefferson() -> Self {
        Method::Divisor(SignpostSequence::jefferson())
    }

    pub fn webster() -> Self {
        Method::Divisor(SignpostSequence::webster())
    }

    pub fn adams() -> Self {
        Method::Divisor(SignpostSequence::adams())
    }

    pub fn hamilton() -> Self {
        Method::Quota(int(0))
    }

    pub fn droop() -> Self {
        Method::Quota(int(1))
    }

    /// Looks up a method by registry name or parametric form
    /// (`linear:<beta>`, `quota:<gamma>`, `power:<e>`, `geometric:<r>`).
    pub fn from_name(name: &str) -> Result<Self> {
        let lower = name.trim().to_ascii_lowercase();
        let param = |text: &str| {
            parse_rational(text).ok_or_else(|| ApportionError::InvalidArgument(format!("bad parameter `{text}`")))
        };
        if let Some((family, value)) = lower.split_once(':') {
            let method = match family {
                "linear" | "divisor" => Method::linear(param(value)?),
                "quota" => Method::Quota(param(value)?),
                "power" => Method::Divisor(SignpostSequence::Power {
                    exponent: ratio_to_f64(&param(value)?),
                }),
                "geometric" => Method::Divisor(SignpostSequence::Geometric { ratio: param(value)? }),
                _ => return Err(ApportionError::UnsupportedMethod(name.to_string())),
            };
            method.validate()?;
            return Ok(method);
        }
        let seq = match lower.as_str() {
            "jefferson" | "dhondt" | "d'hondt" => SignpostSequence::jefferson(),
            "webster" | "sainte-lague" => SignpostSequence::webster(),
            "adams" => SignpostSequence::adams(),
            "imperiali" => SignpostSequence::imperiali(),
            "danish" => SignpostSequence::danish(),
            "adjusted-sainte-lague" => SignpostSequence::adjusted_sainte_lague(),
            "cambridge" => SignpostSequence::cambridge(),
            "huntington" | "huntington-hill" => SignpostSequence::huntington(),
            "dean" => SignpostSequence::dean(),
            "estonia" => SignpostSequence::estonia(),
            "macau" => SignpostSequence::macau(),
            "hamilton" | "hare" => return Ok(Method::Quota(int(0))),
            "droop" => return Ok(Method::Quota(int(1))),
            "imperiali-quota" => return Ok(Method::Quota(int(2))),
            _ => return Err(ApportionError::UnsupportedMethod(name.to_string())),
        };
        Ok(Method::Divisor(seq))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Method::Divisor(seq) => seq.validate(),
            Method::Quota(_) => Ok(()),
        }
    }

    pub fn is_divisor(&self) -> bool {
        matches!(self, Method::Divisor(_))
    }

    /// Smallest house size for which the method is defined with `m` parties.
    pub fn minimum_house(&self, m: usize) -> u64 {
        match self {
            Method::Divisor(seq) => seq.zero_count().saturating_mul(m as u64),
            Method::Quota(gamma) => smallest_above(&-gamma.clone()),
        }
    }

    /// Smallest house size from which the deterministic excess bounds are
    /// asserted, given the smallest share.
    pub fn small_n_guard(&self, m: usize, min_share: f64) -> u64 {
        let base = self.minimum_house(m).max(1);
        match self {
            Method::Divisor(seq) => {
                let beta = seq.asymptotic_beta();
                match beta {
                    Some(beta) if beta > BigRational::one() => {
                        let excess = (1.0 / min_share - m as f64).max(0.0) * ratio_to_f64(&(beta - BigRational::one()));
                        base.max(excess.floor() as u64 + 1)
                    }
                    _ => base,
                }
            }
            Method::Quota(gamma) if *gamma > BigRational::one() => {
                let g = ratio_to_f64(gamma);
                let excess = (1.0 / min_share - m as f64).max(0.0) * g / m as f64;
                base.max(excess.floor() as u64 + 1)
            }
            Method::Quota(_) => base,
        }
    }

    /// The linear family this method follows asymptotically.
    pub fn family(&self) -> Result<Family> {
        match self {
            Method::Divisor(seq) => seq
                .asymptotic_beta()
                .map(|b| Family::Divisor { beta: ratio_to_f64(&b) })
                .ok_or_else(|| {
                    ApportionError::UnsupportedMethod(format!("no asymptotic formulas for {self}"))
                }),
            Method::Quota(gamma) => Ok(Family::Quota { gamma: ratio_to_f64(gamma) }),
        }
    }
}

/// Smallest nonnegative integer strictly greater than `x`.
fn smallest_above(x: &BigRational) -> u64 {
    if x.is_negative() {
        return 0;
    }
    let f = x.floor().to_integer();
    (f + BigInt::one()).to_u64().unwrap_or(u64::MAX)
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Quota(gamma) => write!(f, "quota:{}", format_ratio(gamma)),
            Method::Divisor(seq) => match seq {
                SignpostSequence::Linear { beta } | SignpostSequence::ClippedLinear { beta } => {
                    write!(f, "linear:{}", format_ratio(beta))
                }
                SignpostSequence::Power { exponent } => write!(f, "power:{exponent}"),
                SignpostSequence::Geometric { ratio } => write!(f, "geometric:{}", format_ratio(ratio)),
                SignpostSequence::SqrtPairProduct => write!(f, "huntington"),
                SignpostSequence::HarmonicPair => write!(f, "dean"),
                SignpostSequence::Table { values, cap } => {
                    let list: Vec<String> = values.iter().map(format_ratio).collect();
                    write!(f, "table:[{}]", list.join(","))?;
                    if let Some(c) = cap {
                        write!(f, "/cap {c}")?;
                    }
                    Ok(())
                }
            },
        }
    }
}

impl Method {
    /// `gamma` for quota methods (`None` for divisor methods).
    pub fn gamma(&self) -> Option<&BigRational> {
        match self {
            Method::Quota(g) => Some(g),
            Method::Divisor(_) => None,
        }
    }

    pub fn signposts(&self) -> Option<&SignpostSequence> {
        match self {
            Method::Divisor(s) => Some(s),
            Method::Quota(_) => None,
        }
    }
}

impl Default for Method {
    fn default() -> Self {
        Method::Quota(BigRational::zero())
    }
}
