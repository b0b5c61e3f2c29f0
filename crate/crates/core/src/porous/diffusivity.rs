use serde::{Deserialize, Serialize};

/// Nonlinear diffusivity `D(u)` together with its derivative.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", deny_unknown_fields)]
pub enum DiffusivitySpec {
    /// `D(u) = max(u, 0)^m`.
    PowerLaw {
        m: f64,
    },
    /// `D(u) = m max(u, 0)^(m-1)`, so the equation reads `u_t = lap(u^m)`.
    PorousMedium {
        m: f64,
    },
    Constant {
        kappa: f64,
    },
    /// Caller-supplied `D` and `D'`; not expressible in configuration files.
    #[serde(skip)]
    Custom {
        d: fn(f64) -> f64,
        d_prime: fn(f64) -> f64,
    },
}

impl PartialEq for DiffusivitySpec {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Self::PowerLaw { m: a }, Self::PowerLaw { m: b }) => a == b,
            (Self::PorousMedium { m: a }, Self::PorousMedium { m: b }) => a == b,
            (Self::Constant { kappa: a }, Self::Constant { kappa: b }) => a == b,
            (Self::Custom { d: a, d_prime: da }, Self::Custom { d: b, d_prime: db }) => {
                std::ptr::eq(*a as *const (), *b as *const ())
                    && std::ptr::eq(*da as *const (), *db as *const ())
            }
            _ => false,
        }
    }
}

impl DiffusivitySpec {
    pub fn eval(&self, u: f64) -> f64 {
        match *self {
            DiffusivitySpec::PowerLaw { m } => u.max(0.0).powf(m),
            DiffusivitySpec::PorousMedium { m } => m * u.max(0.0).powf(m - 1.0),
            DiffusivitySpec::Constant { kappa } => kappa,
            DiffusivitySpec::Custom { d, .. } => d(u),
        }
    }

    pub fn derivative(&self, u: f64) -> f64 {
        match *self {
            DiffusivitySpec::PowerLaw { m } => {
                if u > 0.0 {
                    m * u.powf(m - 1.0)
                } else {
                    0.0
                }
            }
            DiffusivitySpec::PorousMedium { m } => {
                if u > 0.0 {
                    m * (m - 1.0) * u.powf(m - 2.0)
                } else {
                    0.0
                }
            }
            DiffusivitySpec::Constant { .. } => 0.0,
            DiffusivitySpec::Custom { d_prime, .. } => d_prime(u),
        }
    }

    /// Exponent `m` for which the Barenblatt profile solves the equation.
    pub fn barenblatt_exponent(&self) -> Option<f64> {
        match *self {
            DiffusivitySpec::PorousMedium { m } if m > 1.0 => Some(m),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_law_values() {
        let d = DiffusivitySpec::PowerLaw { m: 4.0 };
        assert_eq!(d.eval(2.0), 16.0);
        assert_eq!(d.derivative(2.0), 32.0);
        assert_eq!(d.eval(-1.0), 0.0);
        assert_eq!(d.derivative(-1.0), 0.0);
    }

    #[test]
    fn porous_medium_values() {
        let d = DiffusivitySpec::PorousMedium { m: 4.0 };
        assert_eq!(d.eval(2.0), 32.0);
        assert_eq!(d.derivative(2.0), 48.0);
        assert_eq!(d.eval(0.0), 0.0);
        assert_eq!(d.barenblatt_exponent(), Some(4.0));
        assert_eq!(
            DiffusivitySpec::PowerLaw { m: 4.0 }.barenblatt_exponent(),
            None
        );
    }

    #[test]
    fn custom_pair() {
        let d = DiffusivitySpec::Custom {
            d: |u| 1.0 + u * u,
            d_prime: |u| 2.0 * u,
        };
        assert_eq!(d.eval(3.0), 10.0);
        assert_eq!(d.derivative(3.0), 6.0);
    }
}
