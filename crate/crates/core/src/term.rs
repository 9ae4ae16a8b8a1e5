//! Symbolic identity of candidate library terms.
//!
//! A term is a product `d(u̇) · u^a · w^b · |w|^c · y^e` where the derivative
//! factor `d` is one of `1`, `u̇` or `|u̇|`. Terms are kept in canonical form
//! (`c ∈ {0, 1}`), so `|w|²` and `w²` are the same term.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DerivFactor {
    /// No derivative factor.
    None,
    /// `u̇`
    Signed,
    /// `|u̇|`
    Absolute,
}

impl DerivFactor {
    pub const ALL: [DerivFactor; 3] = [DerivFactor::None, DerivFactor::Signed, DerivFactor::Absolute];

    fn eval(self, du: f64) -> f64 {
        match self {
            DerivFactor::None => 1.0,
            DerivFactor::Signed => du,
            DerivFactor::Absolute => du.abs(),
        }
    }

    fn degree(self) -> u32 {
        match self {
            DerivFactor::None => 0,
            _ => 1,
        }
    }
}

/// Signal values at one instant, as needed to evaluate a term.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Sample {
    pub u: f64,
    pub du: f64,
    pub w: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TermDescriptor {
    pub deriv: DerivFactor,
    pub pow_u: u8,
    pub pow_w: u8,
    pub pow_abs_w: u8,
    pub pow_y: u8,
}

impl TermDescriptor {
    pub const CONSTANT: TermDescriptor = TermDescriptor {
        deriv: DerivFactor::None,
        pow_u: 0,
        pow_w: 0,
        pow_abs_w: 0,
        pow_y: 0,
    };

    /// Canonical descriptor for `deriv · u^pow_u · w^pow_w · |w|^pow_abs_w · y^pow_y`.
    pub fn new(deriv: DerivFactor, pow_u: u8, pow_w: u8, pow_abs_w: u8, pow_y: u8) -> Self {
        TermDescriptor {
            deriv,
            pow_u,
            pow_w,
            pow_abs_w,
            pow_y,
        }
        .canonicalize()
    }

    pub fn constant() -> Self {
        Self::CONSTANT
    }

    /// Rewrites `|w|^(2k)` as `w^(2k)` and `|w|^(2k+1)` as `w^(2k)·|w|`.
    pub fn canonicalize(self) -> Self {
        let even = self.pow_abs_w - self.pow_abs_w % 2;
        TermDescriptor {
            pow_w: self.pow_w + even,
            pow_abs_w: self.pow_abs_w % 2,
            ..self
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.pow_abs_w <= 1
    }

    /// Polynomial degree over `u`, `w` and `|w|`.
    pub fn poly_degree(&self) -> u32 {
        self.pow_u as u32 + self.pow_w as u32 + self.pow_abs_w as u32
    }

    /// Degree counting every factor, the derivative factor and `y` included.
    pub fn total_degree(&self) -> u32 {
        self.poly_degree() + self.deriv.degree() + self.pow_y as u32
    }

    pub fn uses_aux(&self) -> bool {
        self.pow_y > 0
    }

    pub fn evaluate(&self, s: &Sample) -> f64 {
        let mut v = self.deriv.eval(s.du);
        if self.pow_u > 0 {
            v *= s.u.powi(self.pow_u as i32);
        }
        if self.pow_w > 0 {
            v *= s.w.powi(self.pow_w as i32);
        }
        if self.pow_abs_w > 0 {
            v *= s.w.abs().powi(self.pow_abs_w as i32);
        }
        if self.pow_y > 0 {
            v *= s.y.powi(self.pow_y as i32);
        }
        v
    }

    /// Name with the state slot rendered as `state` (normally `w`).
    pub fn name_with_state(&self, state: &str) -> String {
        let mut parts: Vec<String> = Vec::new();
        match self.deriv {
            DerivFactor::None => {}
            DerivFactor::Signed => parts.push("u'".into()),
            DerivFactor::Absolute => parts.push("|u'|".into()),
        }
        push_power(&mut parts, "u", self.pow_u);
        push_power(&mut parts, state, self.pow_w);
        push_power(&mut parts, &format!("|{state}|"), self.pow_abs_w);
        push_power(&mut parts, "y", self.pow_y);
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }

    pub fn name(&self) -> String {
        self.name_with_state("w")
    }
}

fn push_power(parts: &mut Vec<String>, symbol: &str, pow: u8) {
    match pow {
        0 => {}
        1 => parts.push(symbol.to_string()),
        k => parts.push(format!("{symbol}^{k}")),
    }
}

/// Graded order: total degree, then derivative factor, then higher powers of
/// `u`, `w`, `|w|`, `y` first.
impl Ord for TermDescriptor {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then(self.deriv.cmp(&other.deriv))
            .then(other.pow_u.cmp(&self.pow_u))
            .then(other.pow_w.cmp(&self.pow_w))
            .then(other.pow_abs_w.cmp(&self.pow_abs_w))
            .then(other.pow_y.cmp(&self.pow_y))
    }
}

impl PartialOrd for TermDescriptor {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for TermDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for TermDescriptor {
    type Err = Error;

    /// Parses names produced by [`TermDescriptor::name`].
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |msg: &str| Error::InvalidParameter(format!("term `{s}`: {msg}"));
        let s = s.trim();
        let mut d = TermDescriptor::CONSTANT;
        if s == "1" {
            return Ok(d);
        }
        for factor in s.split('*') {
            let (symbol, pow) = match factor.split_once('^') {
                Some((sym, p)) => (sym, p.parse::<u8>().map_err(|_| bad("bad exponent"))?),
                None => (factor, 1),
            };
            if pow == 0 {
                return Err(bad("zero exponent"));
            }
            match symbol {
                "u'" | "|u'|" => {
                    if d.deriv != DerivFactor::None || pow != 1 {
                        return Err(bad("repeated derivative factor"));
                    }
                    d.deriv = if symbol == "u'" {
                        DerivFactor::Signed
                    } else {
                        DerivFactor::Absolute
                    };
                }
                "u" => d.pow_u = d.pow_u.checked_add(pow).ok_or_else(|| bad("exponent overflow"))?,
                "w" => d.pow_w = d.pow_w.checked_add(pow).ok_or_else(|| bad("exponent overflow"))?,
                "|w|" => {
                    d.pow_abs_w = d.pow_abs_w.checked_add(pow).ok_or_else(|| bad("exponent overflow"))?
                }
                "y" => d.pow_y = d.pow_y.checked_add(pow).ok_or_else(|| bad("exponent overflow"))?,
                _ => return Err(bad("unknown factor")),
            }
        }
        Ok(d.canonicalize())
    }
}
