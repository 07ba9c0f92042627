use std::fmt;

use thiserror::Error;

use crate::network::{CellNetwork, UserId};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PointError {
    #[error("expected {expected} values (one per user), got {got}")]
    Length { expected: usize, got: usize },
    #[error("value {value} for {user} is negative")]
    Negative { user: UserId, value: Rational },
    #[error("point belongs to a network with user counts {point:?}, not {network:?}")]
    Shape {
        point: Vec<usize>,
        network: Vec<usize>,
    },
}

/// A GDoF tuple: one nonnegative value per user, stored in the network's
/// canonical user order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GdofPoint {
    user_counts: Vec<usize>,
    values: Vec<Rational>,
}

impl GdofPoint {
    pub fn zeros(net: &CellNetwork) -> Self {
        GdofPoint {
            user_counts: net.user_counts().to_vec(),
            values: vec![Rational::ZERO; net.user_total()],
        }
    }

    pub fn new(net: &CellNetwork, values: Vec<Rational>) -> Result<Self, PointError> {
        Self::with_shape(net.user_counts().to_vec(), values)
    }

    pub(crate) fn with_shape(user_counts: Vec<usize>, values: Vec<Rational>) -> Result<Self, PointError> {
        let expected: usize = user_counts.iter().sum();
        if values.len() != expected {
            return Err(PointError::Length {
                expected,
                got: values.len(),
            });
        }
        let point = GdofPoint {
            user_counts,
            values,
        };
        if let Some((user, value)) = point.iter().find(|(_, v)| v.is_negative()) {
            return Err(PointError::Negative { user, value });
        }
        Ok(point)
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn user_counts(&self) -> &[usize] {
        &self.user_counts
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, user: UserId) -> Rational {
        let offset: usize = self.user_counts[..user.cell - 1].iter().sum();
        self.values[offset + user.rank - 1]
    }

    pub fn iter(&self) -> impl Iterator<Item = (UserId, Rational)> + '_ {
        self.user_counts
            .iter()
            .enumerate()
            .flat_map(|(c, &l)| (1..=l).map(move |r| UserId::new(c + 1, r)))
            .zip(self.values.iter().copied())
    }

    pub fn total(&self) -> Rational {
        self.values.iter().sum()
    }

    pub fn dot(&self, weights: &[Rational]) -> Rational {
        self.values
            .iter()
            .zip(weights)
            .map(|(&d, &w)| d * w)
            .sum()
    }

    pub fn check_network(&self, net: &CellNetwork) -> Result<(), PointError> {
        if self.user_counts != net.user_counts() {
            Err(PointError::Shape {
                point: self.user_counts.clone(),
                network: net.user_counts().to_vec(),
            })
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for GdofPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}
