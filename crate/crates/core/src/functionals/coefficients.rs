use crate::scalar::Scalar;

/// Weights of ½a_grad‖∇u‖₂² + ½a_mass‖u‖₂² − (a_choq/2p)D_p(u) − (a_pow/q)‖u‖_q^q.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FunctionalCoefficients<T> {
    pub a_grad: T,
    pub a_mass: T,
    pub a_choq: T,
    pub a_pow: T,
}

impl<T: Scalar> FunctionalCoefficients<T> {
    pub fn new(a_grad: T, a_mass: T, a_choq: T, a_pow: T) -> Self {
        Self { a_grad, a_mass, a_choq, a_pow }
    }

    /// Action at frequency ε: (1, ε, 1, 1).
    pub fn action(eps: T) -> Self {
        Self::new(T::one(), eps, T::one(), T::one())
    }

    /// Energy: (1, 0, 1, 1).
    pub fn energy() -> Self {
        Self::new(T::one(), T::zero(), T::one(), T::one())
    }

    /// I_λ: (1, 1, 1, λ).
    pub fn lambda_form(lambda: T) -> Self {
        Self::new(T::one(), T::one(), T::one(), lambda)
    }

    /// I_μ: (1, 1, μ, 1).
    pub fn mu_form(mu: T) -> Self {
        Self::new(T::one(), T::one(), mu, T::one())
    }

    /// J_λ at the lower critical p: (λ^σ, 1, 1, λ^σ).
    pub fn j_lower(lambda: T, sigma: T) -> Self {
        let l = lambda.powf(sigma);
        Self::new(l, T::one(), T::one(), l)
    }

    /// J_λ at the upper critical p: (1, λ^σ, 1, λ^σ).
    pub fn j_upper(lambda: T, sigma: T) -> Self {
        let l = lambda.powf(sigma);
        Self::new(T::one(), l, T::one(), l)
    }

    /// J_μ at q = 2*: (1, μ^σ, μ^σ, 1).
    pub fn j_sobolev(mu: T, sigma: T) -> Self {
        let m = mu.powf(sigma);
        Self::new(T::one(), m, m, T::one())
    }

    /// Pure power limit: (1, 1, 0, 1).
    pub fn pure_power() -> Self {
        Self::new(T::one(), T::one(), T::zero(), T::one())
    }

    /// Pure Choquard limit: (1, 1, 1, 0).
    pub fn pure_choquard() -> Self {
        Self::new(T::one(), T::one(), T::one(), T::zero())
    }

    pub fn is_valid(&self) -> bool {
        [self.a_grad, self.a_mass, self.a_choq, self.a_pow].iter().all(|c| c.is_finite() && *c >= T::zero())
    }
}
