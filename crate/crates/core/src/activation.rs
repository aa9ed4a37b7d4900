use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ActivationKind {
    Linear,
    Relu,
    LeakyRelu { beta: f64 },
    Tanh,
}

impl ActivationKind {
    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            ActivationKind::Linear => x,
            ActivationKind::Relu => x.max(0.0),
            ActivationKind::LeakyRelu { beta } => {
                if x >= 0.0 {
                    x
                } else {
                    beta * x
                }
            }
            ActivationKind::Tanh => x.tanh(),
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        !matches!(self, ActivationKind::Tanh)
    }

    /// (φ(1), φ(−1)); a positively homogeneous φ is determined by these two slopes.
    pub fn slopes(&self) -> (f64, f64) {
        (self.apply(1.0), self.apply(-1.0))
    }

    /// Lipschitz constant max(|φ(1)|, |φ(−1)|); 1 for tanh.
    pub fn lipschitz(&self) -> f64 {
        match self {
            ActivationKind::Tanh => 1.0,
            _ => {
                let (a, b) = self.slopes();
                a.abs().max(b.abs())
            }
        }
    }

    /// E[φ(N)²] for N standard normal; `None` for tanh.
    pub fn second_moment(&self) -> Option<f64> {
        self.is_homogeneous().then(|| {
            let (a, b) = self.slopes();
            0.5 * (a * a + b * b)
        })
    }

    /// Envelope constants (A, B, C) with |φ(z)| ≤ A + B|z|^C.
    pub fn envelope(&self) -> (f64, f64, f64) {
        match self {
            ActivationKind::Tanh => (1.0, 0.0, 1.0),
            _ => (0.0, self.lipschitz(), 1.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relu_constants() {
        assert_eq!(ActivationKind::Relu.lipschitz(), 1.0);
        assert_eq!(ActivationKind::Relu.second_moment(), Some(0.5));
        assert_eq!(ActivationKind::LeakyRelu { beta: 0.1 }.slopes(), (1.0, -0.1));
        assert_eq!(ActivationKind::Tanh.second_moment(), None);
    }
}
