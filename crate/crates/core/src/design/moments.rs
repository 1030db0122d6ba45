//! Weighted running moments with an exact pairwise merge.

use serde::Serialize;

/// Weight, mean and central moment sums up to order four.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Moments {
    pub weight: f64,
    pub mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

impl Moments {
    pub fn single(x: f64, weight: f64) -> Self {
        Self {
            weight,
            mean: x,
            ..Self::default()
        }
    }

    pub fn push(&mut self, x: f64, weight: f64) {
        *self = self.merge(&Self::single(x, weight));
    }

    pub fn merge(&self, other: &Self) -> Self {
        let (na, nb) = (self.weight, other.weight);
        if nb == 0.0 {
            return *self;
        }
        if na == 0.0 {
            return *other;
        }
        let n = na + nb;
        let delta = other.mean - self.mean;
        let dn = delta / n;
        let dn2 = dn * dn;
        let t = delta * dn * na * nb;
        Self {
            weight: n,
            mean: self.mean + nb * dn,
            m2: self.m2 + other.m2 + t,
            m3: self.m3 + other.m3 + t * dn * (na - nb) + 3.0 * dn * (na * other.m2 - nb * self.m2),
            m4: self.m4
                + other.m4
                + t * dn2 * (na * na - na * nb + nb * nb)
                + 6.0 * dn2 * (na * na * other.m2 + nb * nb * self.m2)
                + 4.0 * dn * (na * other.m3 - nb * self.m3),
        }
    }

    /// Variance with divisor equal to the total weight.
    pub fn population_variance(&self) -> f64 {
        if self.weight > 0.0 {
            (self.m2 / self.weight).max(0.0)
        } else {
            f64::NAN
        }
    }

    /// Variance with divisor `weight − 1` (unit weights assumed).
    pub fn sample_variance(&self) -> f64 {
        if self.weight > 1.0 {
            (self.m2 / (self.weight - 1.0)).max(0.0)
        } else {
            f64::NAN
        }
    }

    /// Large-sample standard error of the variance estimate,
    /// `sqrt((μ4 − σ⁴) / n)`.
    pub fn variance_standard_error(&self) -> f64 {
        if self.weight < 2.0 {
            return f64::NAN;
        }
        let s2 = self.m2 / self.weight;
        let mu4 = self.m4 / self.weight;
        ((mu4 - s2 * s2).max(0.0) / self.weight).sqrt()
    }

    pub fn mean_standard_error(&self) -> f64 {
        (self.sample_variance() / self.weight).sqrt()
    }
}
