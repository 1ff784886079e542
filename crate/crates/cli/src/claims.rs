//! Published upper bounds for the three built-in functions, and the reference
//! lower bound `√(4 - √15)`.

use minoverlap::rational::{parse_decimal, to_decimal};
use minoverlap::Rational;
use num_bigint::BigInt;
use num_traits::{pow, Signed};

/// Best published upper bound, from the 51-step function.
pub const BEST_UPPER_BOUND: &str = "0.3809268534330870";

/// How a published value constrains the exact maximum `m`.
#[derive(Clone, Copy, Debug)]
pub enum Bracket {
    /// `lo < m <= hi`: the value was rounded upwards to `hi`.
    RoundedUp { lo: &'static str, hi: &'static str },
    /// `lo <= m <= hi`.
    Closed { lo: &'static str, hi: &'static str },
    /// `|m - center| <= radius`.
    Within {
        center: &'static str,
        radius: &'static str,
    },
}

#[derive(Clone, Copy, Debug)]
pub struct Claim {
    pub target: &'static str,
    pub published: &'static str,
    pub bracket: Bracket,
}

pub const CLAIMS: [Claim; 3] = [
    Claim {
        target: "p15",
        published: "0.38153155",
        bracket: Bracket::RoundedUp {
            lo: "0.38153154",
            hi: "0.38153155",
        },
    },
    Claim {
        target: "p19",
        published: "0.381112263316104816",
        bracket: Bracket::Closed {
            lo: "0.381112263316104815",
            hi: "0.381112263316104817",
        },
    },
    Claim {
        target: "p51",
        published: BEST_UPPER_BOUND,
        bracket: Bracket::Within {
            center: BEST_UPPER_BOUND,
            radius: "0.00000000000000005",
        },
    },
];

pub fn claim_for(target: &str) -> Option<&'static Claim> {
    CLAIMS.iter().find(|c| c.target == target)
}

fn dec(s: &str) -> Rational {
    parse_decimal(s).expect("claim constants are well formed")
}

impl Bracket {
    pub fn contains(&self, m: &Rational) -> bool {
        match *self {
            Bracket::RoundedUp { lo, hi } => m > &dec(lo) && m <= &dec(hi),
            Bracket::Closed { lo, hi } => m >= &dec(lo) && m <= &dec(hi),
            Bracket::Within { center, radius } => (m - dec(center)).abs() <= dec(radius),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Bracket::RoundedUp { lo, hi } => format!("{lo} < m <= {hi}"),
            Bracket::Closed { lo, hi } => format!("{lo} <= m <= {hi}"),
            Bracket::Within { center, radius } => format!("|m - {center}| <= {radius}"),
        }
    }
}

/// `√(4 - √15)` truncated to `digits` decimal places, computed with integer square roots.
pub fn moser_lower_bound(digits: u32) -> Rational {
    // Work with 10 guard digits; each isqrt floors by less than one unit.
    let d = digits as usize + 10;
    let scale2 = pow(BigInt::from(10u32), 2 * d);
    let sqrt15 = (BigInt::from(15u32) * &scale2 * &scale2).sqrt();
    let inner = BigInt::from(4u32) * &scale2 - sqrt15;
    let root = inner.sqrt();
    let truncated = root / pow(BigInt::from(10u32), 10);
    Rational::new(truncated, pow(BigInt::from(10u32), digits as usize))
}

/// Lines of the `bounds` report: lower bound, best upper bound, gap.
pub fn bounds_lines() -> [String; 3] {
    let lower = moser_lower_bound(30);
    let upper = dec(BEST_UPPER_BOUND);
    [
        to_decimal(&lower, 15),
        BEST_UPPER_BOUND.to_string(),
        to_decimal(&(upper - lower), 15),
    ]
}
