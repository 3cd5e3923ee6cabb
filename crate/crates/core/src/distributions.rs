//! Error laws for simulated group samples.
//!
//! Non-normal laws are standardized with their closed-form moments before
//! being placed at a target mean and standard deviation, so every law feeds
//! the same population parameters into a study cell.

use std::f64::consts::PI;
use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Exp, Open01, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::Seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub mean: f64,
    pub variance: f64,
}

/// A sampling law, tagged by `kind` when serialized:
/// `{"kind": "laplace", "location": 0, "scale": 1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DistributionSpec {
    Normal {
        #[serde(default)]
        mean: f64,
        #[serde(default = "one")]
        variance: f64,
    },
    SkewNormal {
        location: f64,
        scale: f64,
        shape: f64,
    },
    StudentT {
        df: f64,
    },
    Laplace {
        location: f64,
        scale: f64,
    },
    NormalMixture {
        components: Vec<MixtureComponent>,
    },
    Exponential {
        rate: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl Default for DistributionSpec {
    fn default() -> Self {
        DistributionSpec::standard_normal()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

impl DistributionSpec {
    pub fn standard_normal() -> Self {
        DistributionSpec::Normal {
            mean: 0.0,
            variance: 1.0,
        }
    }

    /// The five non-normal laws of the robustness study, in table order:
    /// skew-normal(1,1,1), t(3), Laplace(0,1), 0.5 N(1,1) + 0.5 N(5,16),
    /// exponential(2).
    pub fn robustness_suite() -> Vec<DistributionSpec> {
        vec![
            DistributionSpec::SkewNormal {
                location: 1.0,
                scale: 1.0,
                shape: 1.0,
            },
            DistributionSpec::StudentT { df: 3.0 },
            DistributionSpec::Laplace {
                location: 0.0,
                scale: 1.0,
            },
            DistributionSpec::NormalMixture {
                components: vec![
                    MixtureComponent {
                        weight: 0.5,
                        mean: 1.0,
                        variance: 1.0,
                    },
                    MixtureComponent {
                        weight: 0.5,
                        mean: 5.0,
                        variance: 16.0,
                    },
                ],
            },
            DistributionSpec::Exponential { rate: 2.0 },
        ]
    }

    pub fn validate(&self) -> Result<()> {
        fn positive(name: &str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::ParameterDomain(format!(
                    "{name} must be positive and finite, got {v}"
                )))
            }
        }
        fn finite(name: &str, v: f64) -> Result<()> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::ParameterDomain(format!("{name} must be finite, got {v}")))
            }
        }
        match *self {
            DistributionSpec::Normal { mean, variance } => {
                finite("mean", mean)?;
                positive("variance", variance)
            }
            DistributionSpec::SkewNormal { location, scale, shape } => {
                finite("location", location)?;
                finite("shape", shape)?;
                positive("scale", scale)
            }
            DistributionSpec::StudentT { df } => positive("df", df),
            DistributionSpec::Laplace { location, scale } => {
                finite("location", location)?;
                positive("scale", scale)
            }
            DistributionSpec::NormalMixture { ref components } => {
                if components.is_empty() {
                    return Err(Error::ParameterDomain("mixture needs at least one component".into()));
                }
                for c in components {
                    positive("mixture weight", c.weight)?;
                    finite("mixture mean", c.mean)?;
                    positive("mixture variance", c.variance)?;
                }
                let total: f64 = components.iter().map(|c| c.weight).sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::ParameterDomain(format!(
                        "mixture weights must sum to 1, got {total}"
                    )));
                }
                Ok(())
            }
            DistributionSpec::Exponential { rate } => positive("rate", rate),
        }
    }

    /// Closed-form mean and variance.
    pub fn theoretical_moments(&self) -> Result<Moments> {
        self.validate()?;
        let m = match *self {
            DistributionSpec::Normal { mean, variance } => Moments { mean, variance },
            DistributionSpec::SkewNormal { location, scale, shape } => {
                let delta = shape / (1.0 + shape * shape).sqrt();
                Moments {
                    mean: location + scale * delta * (2.0 / PI).sqrt(),
                    variance: scale * scale * (1.0 - 2.0 * delta * delta / PI),
                }
            }
            DistributionSpec::StudentT { df } => {
                if df <= 2.0 {
                    return Err(Error::UnsupportedMoments(format!(
                        "student-t with df = {df} has infinite variance (need df > 2)"
                    )));
                }
                Moments {
                    mean: 0.0,
                    variance: df / (df - 2.0),
                }
            }
            DistributionSpec::Laplace { location, scale } => Moments {
                mean: location,
                variance: 2.0 * scale * scale,
            },
            DistributionSpec::NormalMixture { ref components } => {
                let mean: f64 = components.iter().map(|c| c.weight * c.mean).sum();
                let second: f64 = components
                    .iter()
                    .map(|c| c.weight * (c.variance + c.mean * c.mean))
                    .sum();
                Moments {
                    mean,
                    variance: second - mean * mean,
                }
            }
            DistributionSpec::Exponential { rate } => Moments {
                mean: 1.0 / rate,
                variance: 1.0 / (rate * rate),
            },
        };
        Ok(m)
    }

    /// `n` raw draws from the stream keyed by `seed`.
    pub fn sample(&self, n: usize, seed: &Seed) -> Result<Vec<f64>> {
        check_count(n)?;
        let sampler = Sampler::new(self)?;
        let mut rng = seed.rng();
        Ok((0..n).map(|_| sampler.draw(&mut rng)).collect())
    }

    /// Draws `mean + sd * (Y - E[Y]) / SD[Y]` for raw draws `Y`.
    pub fn sample_standardized_shifted(&self, mean: f64, sd: f64, n: usize, seed: &Seed) -> Result<Vec<f64>> {
        check_count(n)?;
        if !(sd.is_finite() && sd > 0.0) || !mean.is_finite() {
            return Err(Error::ParameterDomain(format!(
                "target mean/sd must be finite with sd > 0, got ({mean}, {sd})"
            )));
        }
        let std = Standardized::new(self)?;
        let mut rng = seed.rng();
        Ok((0..n).map(|_| mean + sd * std.draw(&mut rng)).collect())
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistributionSpec::Normal { mean, variance } => write!(f, "normal({mean};{variance})"),
            DistributionSpec::SkewNormal { location, scale, shape } => {
                write!(f, "skew-normal({location};{scale};{shape})")
            }
            DistributionSpec::StudentT { df } => write!(f, "student-t({df})"),
            DistributionSpec::Laplace { location, scale } => write!(f, "laplace({location};{scale})"),
            DistributionSpec::NormalMixture { components } => {
                write!(f, "normal-mixture(")?;
                for (i, c) in components.iter().enumerate() {
                    if i > 0 {
                        write!(f, "+")?;
                    }
                    write!(f, "{}*N({};{})", c.weight, c.mean, c.variance)?;
                }
                write!(f, ")")
            }
            DistributionSpec::Exponential { rate } => write!(f, "exponential({rate})"),
        }
    }
}

fn check_count(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::ParameterDomain("sample size n must be >= 1".into()))
    } else {
        Ok(())
    }
}

/// A validated law ready to draw from.
#[derive(Debug, Clone)]
pub(crate) enum Sampler {
    Normal {
        mean: f64,
        sd: f64,
    },
    SkewNormal {
        location: f64,
        scale: f64,
        delta: f64,
    },
    StudentT(StudentT<f64>),
    Laplace {
        location: f64,
        scale: f64,
    },
    Mixture {
        cumulative: Vec<f64>,
        means: Vec<f64>,
        sds: Vec<f64>,
    },
    Exponential(Exp<f64>),
}

impl Sampler {
    pub(crate) fn new(spec: &DistributionSpec) -> Result<Self> {
        spec.validate()?;
        let s = match *spec {
            DistributionSpec::Normal { mean, variance } => Sampler::Normal {
                mean,
                sd: variance.sqrt(),
            },
            DistributionSpec::SkewNormal { location, scale, shape } => Sampler::SkewNormal {
                location,
                scale,
                delta: shape / (1.0 + shape * shape).sqrt(),
            },
            DistributionSpec::StudentT { df } => {
                Sampler::StudentT(StudentT::new(df).map_err(|e| Error::ParameterDomain(e.to_string()))?)
            }
            DistributionSpec::Laplace { location, scale } => Sampler::Laplace { location, scale },
            DistributionSpec::NormalMixture { ref components } => {
                let mut acc = 0.0;
                let cumulative = components
                    .iter()
                    .map(|c| {
                        acc += c.weight;
                        acc
                    })
                    .collect();
                Sampler::Mixture {
                    cumulative,
                    means: components.iter().map(|c| c.mean).collect(),
                    sds: components.iter().map(|c| c.variance.sqrt()).collect(),
                }
            }
            DistributionSpec::Exponential { rate } => {
                Sampler::Exponential(Exp::new(rate).map_err(|e| Error::ParameterDomain(e.to_string()))?)
            }
        };
        Ok(s)
    }

    pub(crate) fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Sampler::Normal { mean, sd } => {
                let z: f64 = rng.sample(StandardNormal);
                mean + sd * z
            }
            Sampler::SkewNormal { location, scale, delta } => {
                let u0: f64 = rng.sample(StandardNormal);
                let u1: f64 = rng.sample(StandardNormal);
                location + scale * (delta * u0.abs() + (1.0 - delta * delta).sqrt() * u1)
            }
            Sampler::StudentT(t) => t.sample(rng),
            Sampler::Laplace { location, scale } => {
                // inverse CDF on u in (-1/2, 1/2)
                let u: f64 = rng.sample::<f64, _>(Open01) - 0.5;
                location - scale * u.signum() * (1.0 - 2.0 * u.abs()).ln()
            }
            Sampler::Mixture { cumulative, means, sds } => {
                let u: f64 = rng.random();
                let last = cumulative.len() - 1;
                let j = cumulative.iter().position(|&c| u < c).unwrap_or(last);
                let z: f64 = rng.sample(StandardNormal);
                means[j] + sds[j] * z
            }
            Sampler::Exponential(e) => e.sample(rng),
        }
    }
}

/// Draws with zero mean and unit variance, from theoretical moments.
#[derive(Debug, Clone)]
pub(crate) struct Standardized {
    sampler: Sampler,
    mean: f64,
    sd: f64,
}

impl Standardized {
    pub(crate) fn new(spec: &DistributionSpec) -> Result<Self> {
        let m = spec.theoretical_moments()?;
        Ok(Standardized {
            sampler: Sampler::new(spec)?,
            mean: m.mean,
            sd: m.variance.sqrt(),
        })
    }

    pub(crate) fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        (self.sampler.draw(rng) - self.mean) / self.sd
    }
}
