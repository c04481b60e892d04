use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Logarithm used inside the threshold rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogBase {
    #[default]
    Natural,
    Two,
    Ten,
}

/// `μ = (1 + 1/t) √(2 ln(N) σ²)`.
pub fn select_threshold<T: Real>(n: usize, sigma2: T, t: T) -> Result<T> {
    select_threshold_with_base(n, sigma2, t, LogBase::Natural)
}

pub fn select_threshold_with_base<T: Real>(n: usize, sigma2: T, t: T, base: LogBase) -> Result<T> {
    if !(t > T::zero()) {
        return Err(Error::arg("t", "must be positive"));
    }
    if n < 2 {
        return Err(Error::arg("n", "grid needs at least two angles"));
    }
    if !(sigma2 >= T::zero()) {
        return Err(Error::arg("sigma2", "must be non-negative"));
    }
    let nf = lit::<T>(n as f64);
    let log = match base {
        LogBase::Natural => nf.ln(),
        LogBase::Two => nf.log2(),
        LogBase::Ten => nf.log10(),
    };
    Ok((T::one() + T::one() / t) * (lit::<T>(2.0) * log * sigma2).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_examples() {
        assert_eq!(select_threshold::<f64>(51, 0.0, 1.0).unwrap(), 0.0);
        // 2 * sqrt(2 ln 51), evaluated independently.
        let expected = 2.0 * (2.0 * 51f64.ln()).sqrt();
        let mu = select_threshold(51, 1.0, 1.0).unwrap();
        assert!((mu - expected).abs() < 1e-12);
        assert!((mu - 5.6084).abs() < 1e-4);
        let a: f64 = select_threshold(51, 0.3, 2.0).unwrap();
        let b: f64 = select_threshold(51, 1.2, 2.0).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-12);
        assert!(select_threshold::<f64>(51, 1.0, 0.0).is_err());
        assert!(select_threshold::<f64>(51, 1.0, -1.0).is_err());
    }

    #[test]
    fn other_bases() {
        let ten = select_threshold_with_base::<f64>(100, 1.0, 1.0, LogBase::Ten).unwrap();
        assert!((ten - 2.0 * 4f64.sqrt()).abs() < 1e-12);
    }
}
