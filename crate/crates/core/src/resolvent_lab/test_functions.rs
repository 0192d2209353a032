use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::keys::CatalogKey;

/// Bounded initial data and resolvent test functions.
///
/// Keys: `one`, `exp_decay:c=..`, `exp_decay_pos:c=..`,
/// `gaussian:center=..,width=..`, `indicator:a=..,b=..`,
/// `cosine_decay:c=..,omega=..`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum TestFunction {
    One,
    /// `e^{-c|x|}`.
    ExpDecay { c: f64 },
    /// `e^{-cx} 𝟙_{x>0}`.
    ExpDecayPositive { c: f64 },
    /// `e^{-((x-center)/width)^2}`.
    Gaussian { center: f64, width: f64 },
    /// `𝟙_{[a,b]}`.
    Indicator { a: f64, b: f64 },
    /// `cos(ωx) e^{-c|x|}`.
    CosineDecay { c: f64, omega: f64 },
}

impl TestFunction {
    pub fn parse(key: &str) -> Result<Self> {
        const WHAT: &str = "test function";
        let k = CatalogKey::parse(WHAT, key)?;
        let f = match k.family {
            "one" | "const" => {
                k.take(WHAT, &[], &[])?;
                TestFunction::One
            }
            "exp_decay" => {
                let v = k.take(WHAT, &["c"], &[Some(1.0)])?;
                TestFunction::ExpDecay { c: v[0] }
            }
            "exp_decay_pos" => {
                let v = k.take(WHAT, &["c"], &[Some(1.0)])?;
                TestFunction::ExpDecayPositive { c: v[0] }
            }
            "gaussian" => {
                let v = k.take(WHAT, &["center", "width"], &[Some(0.0), Some(1.0)])?;
                TestFunction::Gaussian {
                    center: v[0],
                    width: v[1],
                }
            }
            "indicator" => {
                let v = k.take(WHAT, &["a", "b"], &[None, None])?;
                TestFunction::Indicator { a: v[0], b: v[1] }
            }
            "cosine_decay" => {
                let v = k.take(WHAT, &["c", "omega"], &[Some(1.0), Some(1.0)])?;
                TestFunction::CosineDecay { c: v[0], omega: v[1] }
            }
            other => {
                return Err(Error::parse(
                    WHAT,
                    key,
                    format!("unknown family `{other}` (one, exp_decay, exp_decay_pos, gaussian, indicator, cosine_decay)"),
                ))
            }
        };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::parameter("test function", msg));
        match *self {
            TestFunction::One => Ok(()),
            TestFunction::ExpDecay { c } | TestFunction::ExpDecayPositive { c } | TestFunction::CosineDecay { c, .. }
                if !(c.is_finite() && c > 0.0) =>
            {
                bad(format!("decay rate c = {c} must be positive"))
            }
            TestFunction::CosineDecay { omega, .. } if !omega.is_finite() => bad(format!("omega = {omega} is not finite")),
            TestFunction::Gaussian { center, width } if !(center.is_finite() && width.is_finite() && width > 0.0) => {
                bad(format!("gaussian needs a finite center and positive width, got {center}, {width}"))
            }
            TestFunction::Indicator { a, b } if !(a.is_finite() && b.is_finite() && a < b) => {
                bad(format!("indicator needs finite a < b, got [{a}, {b}]"))
            }
            _ => Ok(()),
        }
    }

    pub fn key(&self) -> String {
        match *self {
            TestFunction::One => "one".into(),
            TestFunction::ExpDecay { c } => format!("exp_decay:c={c}"),
            TestFunction::ExpDecayPositive { c } => format!("exp_decay_pos:c={c}"),
            TestFunction::Gaussian { center, width } => format!("gaussian:center={center},width={width}"),
            TestFunction::Indicator { a, b } => format!("indicator:a={a},b={b}"),
            TestFunction::CosineDecay { c, omega } => format!("cosine_decay:c={c},omega={omega}"),
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            TestFunction::One => 1.0,
            TestFunction::ExpDecay { c } => (-c * x.abs()).exp(),
            TestFunction::ExpDecayPositive { c } => {
                if x > 0.0 {
                    (-c * x).exp()
                } else {
                    0.0
                }
            }
            TestFunction::Gaussian { center, width } => (-((x - center) / width).powi(2)).exp(),
            TestFunction::Indicator { a, b } => {
                if (a..=b).contains(&x) {
                    1.0
                } else {
                    0.0
                }
            }
            TestFunction::CosineDecay { c, omega } => (omega * x).cos() * (-c * x.abs()).exp(),
        }
    }

    pub fn sup(&self) -> f64 {
        1.0
    }

    /// False for the families with jumps.
    pub fn is_continuous(&self) -> bool {
        !matches!(self, TestFunction::ExpDecayPositive { .. } | TestFunction::Indicator { .. })
    }

    pub fn is_even(&self) -> bool {
        match *self {
            TestFunction::One | TestFunction::ExpDecay { .. } | TestFunction::CosineDecay { .. } => true,
            TestFunction::Gaussian { center, .. } => center == 0.0,
            TestFunction::Indicator { a, b } => a == -b,
            TestFunction::ExpDecayPositive { .. } => false,
        }
    }

    /// Points where the function is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            TestFunction::One | TestFunction::Gaussian { .. } => Vec::new(),
            TestFunction::ExpDecay { .. } | TestFunction::ExpDecayPositive { .. } | TestFunction::CosineDecay { .. } => {
                vec![0.0]
            }
            TestFunction::Indicator { a, b } => vec![a, b],
        }
    }

    /// An interval outside which `|f| ≤ tol`; unbounded for `one`.
    pub fn support(&self, tol: f64) -> (f64, f64) {
        let l = (1.0 / tol).ln();
        match *self {
            TestFunction::One => (f64::NEG_INFINITY, f64::INFINITY),
            TestFunction::ExpDecay { c } | TestFunction::CosineDecay { c, .. } => (-l / c, l / c),
            TestFunction::ExpDecayPositive { c } => (0.0, l / c),
            TestFunction::Gaussian { center, width } => (center - width * l.sqrt(), center + width * l.sqrt()),
            TestFunction::Indicator { a, b } => (a, b),
        }
    }
}

impl std::str::FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl std::fmt::Display for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.key())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_round_trip() {
        for key in [
            "one",
            "exp_decay:c=1",
            "exp_decay_pos:c=2",
            "gaussian:center=0.5,width=0.3",
            "indicator:a=-1,b=2",
            "cosine_decay:c=1,omega=3",
        ] {
            let f = TestFunction::parse(key).unwrap();
            assert_eq!(TestFunction::parse(&f.key()).unwrap(), f);
        }
        assert!(TestFunction::parse("indicator:a=1").is_err());
        assert!(TestFunction::parse("indicator:a=2,b=1").is_err());
        assert!(TestFunction::parse("exp_decay:c=-1").is_err());
        assert!(TestFunction::parse("sine").is_err());
    }

    #[test]
    fn values_and_flags() {
        let f = TestFunction::ExpDecayPositive { c: 1.0 };
        assert_eq!(f.eval(0.0), 0.0);
        assert_eq!(f.eval(-1.0), 0.0);
        assert!(!f.is_continuous());
        assert!(TestFunction::Gaussian { center: 0.0, width: 1.0 }.is_even());
        let (lo, hi) = TestFunction::ExpDecay { c: 2.0 }.support(1e-10);
        assert!((TestFunction::ExpDecay { c: 2.0 }.eval(hi) - 1e-10).abs() < 1e-20 && lo == -hi);
    }
}
