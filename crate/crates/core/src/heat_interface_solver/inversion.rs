use crate::error::{require_positive, Error, Result};

/// Gaver-Stehfest weights `V_k`, `k = 1..=n`, for even `n`.
pub fn stehfest_coefficients(n: usize) -> Result<Vec<f64>> {
    if n < 2 || n % 2 == 1 || n > 20 {
        return Err(Error::parameter(
            "stehfest_coefficients",
            format!("order {n} must be even and between 2 and 20"),
        ));
    }
    let fact = |m: usize| (1..=m).map(|i| i as f64).product::<f64>();
    let half = n / 2;
    Ok((1..=n)
        .map(|k| {
            let sum: f64 = ((k + 1) / 2..=k.min(half))
                .map(|j| {
                    (j as f64).powi(half as i32) * fact(2 * j)
                        / (fact(half - j) * fact(j) * fact(j - 1) * fact(k - j) * fact(2 * j - k))
                })
                .sum();
            if (k + half) % 2 == 0 {
                sum
            } else {
                -sum
            }
        })
        .collect())
}

/// Time-domain value at `t` and the spread across neighbouring orders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inversion {
    pub value: f64,
    pub error: f64,
}

/// Invert a Laplace transform from real samples `F(k ln2 / t)`.
///
/// The nodes are shared by all orders, so `order - 2`, `order` and
/// `order + 2` come from `order + 2` evaluations; their spread is the error
/// estimate. Growing differences signal that the transform is not smooth
/// enough for the method.
pub fn gaver_stehfest(mut transform: impl FnMut(f64) -> Result<f64>, t: f64, order: usize) -> Result<Inversion> {
    require_positive("gaver_stehfest", "t", t)?;
    let low = stehfest_coefficients(order.saturating_sub(2).max(2))?;
    let mid = stehfest_coefficients(order)?;
    let high = stehfest_coefficients(order + 2)?;
    let a = std::f64::consts::LN_2 / t;
    let samples: Vec<f64> = (1..=order + 2).map(|k| transform(k as f64 * a)).collect::<Result<_>>()?;
    let combine = |v: &[f64]| a * v.iter().zip(&samples).map(|(v, s)| v * s).sum::<f64>();
    let (u_low, u_mid, u_high) = (combine(&low), combine(&mid), combine(&high));
    let d_low = (u_mid - u_low).abs();
    let d_high = (u_high - u_mid).abs();
    let scale = u_mid.abs().max(1e-3);
    if d_high > 1e-2 * scale && d_high > d_low {
        return Err(Error::numeric(
            "gaver_stehfest",
            format!(
                "orders {}/{order}/{} give {u_low:e}/{u_mid:e}/{u_high:e} at t = {t}: not converging; a Talbot contour inversion is needed",
                order.saturating_sub(2),
                order + 2
            ),
        ));
    }
    Ok(Inversion {
        value: u_mid,
        error: d_low.max(d_high),
    })
}
