//! Perturbed homotopy operators along `Lie(g)` and parallel transport for the
//! connection `∇ = 𝓛 + H₁`.

use nalgebra::{DMatrix, DVector};

use crate::algebra::HomotopyPair;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

use super::cochain::{act, lie_derivative, Cochain};
use super::deformation::{action_derivative_matrix, expm, jac_derivative_matrix, rigidity_check};
use super::LieStructure;

fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn to_dm(m: &Matrix<f64>) -> DMatrix<f64> {
    m.to_nalgebra()
}

/// Homotopy operators at a nearby structure `μ`.
#[derive(Debug, Clone)]
pub struct PerturbedHomotopies {
    /// `C² → C¹`.
    pub h1: DMatrix<f64>,
    /// `C³ → C²`.
    pub h2: DMatrix<f64>,
    /// Row-sum norms of `P₁h₁` and `P₂h₂`; both must stay below 1.
    pub neumann: (f64, f64),
}

impl PerturbedHomotopies {
    /// Max entry of `d_e m_μ h₁^μ + h₂^μ d_μJac − Id`.
    pub fn residual(&self, mu: &Cochain<f64>) -> f64 {
        let dm = to_dm(&action_derivative_matrix(mu));
        let dj = to_dm(&jac_derivative_matrix(mu));
        let n = dm.nrows();
        let r = &dm * &self.h1 + &self.h2 * &dj - DMatrix::<f64>::identity(n, n);
        r.amax()
    }
}

/// Exact data at `μ₀` in float form, reused for every perturbation.
#[derive(Debug, Clone)]
pub struct Connection {
    pub mu0: Cochain<f64>,
    pub h1: DMatrix<f64>,
    pub h2: DMatrix<f64>,
}

impl Connection {
    pub fn new(mu0: &LieStructure, h: &HomotopyPair) -> Result<Self> {
        if h.degree != 0 || h.h_low.cols() != Cochain::<f64>::dim(mu0.dim(), 2) {
            return Err(Error::Dimension(
                "homotopy pair is not at the C² slot of this structure".into(),
            ));
        }
        Ok(Connection {
            mu0: mu0.to_cochain().to_f64(),
            h1: h.h_low.to_f64(),
            h2: h.h_high.to_f64(),
        })
    }

    /// Runs the rigidity test and builds the connection from its homotopy.
    pub fn at(mu0: &LieStructure) -> Result<Self> {
        let r = rigidity_check(mu0)?;
        match r.homotopy {
            Some(h) => Connection::new(mu0, &h),
            None => Err(Error::NonzeroCohomology {
                degree: 0,
                dimension: r.cohomology_dim,
            }),
        }
    }

    pub fn dim(&self) -> usize {
        self.mu0.n()
    }

    /// `h₁^μ = h₁(1 + P₁h₁)⁻¹`, `h₂^μ = h₂(1 + P₂h₂)⁻¹` with
    /// `P₁ = d_e m_{μ−μ₀}` and `P₂ = d_{μ−μ₀}Jac`.
    pub fn perturb(&self, mu: &Cochain<f64>) -> Result<PerturbedHomotopies> {
        let delta = mu.sub(&self.mu0);
        let p1 = to_dm(&action_derivative_matrix(&delta));
        let p2 = to_dm(&jac_derivative_matrix(&delta));
        let t1 = &p1 * &self.h1;
        let t2 = &p2 * &self.h2;
        let neumann = (inf_norm(&t1), inf_norm(&t2));
        let worst = neumann.0.max(neumann.1);
        if worst.is_nan() || worst >= 1.0 {
            return Err(Error::OutsideNeighbourhood(worst));
        }
        let inv = |t: DMatrix<f64>| {
            let n = t.nrows();
            (DMatrix::<f64>::identity(n, n) + t)
                .try_inverse()
                .ok_or(Error::OutsideNeighbourhood(worst))
        };
        let h1 = &self.h1 * inv(t1)?;
        let h2 = &self.h2 * inv(t2)?;
        Ok(PerturbedHomotopies { h1, h2, neumann })
    }

    /// `H₁(μ)(X) ∈ gl(g)` for a tangent vector `X ∈ C²`.
    pub fn h1_apply(&self, mu: &Cochain<f64>, x: &Cochain<f64>) -> Result<DMatrix<f64>> {
        let ph = self.perturb(mu)?;
        let a = &ph.h1 * DVector::from_column_slice(x.data());
        Ok(Cochain::from_data(self.dim(), 1, a.as_slice().to_vec())?
            .to_matrix()
            .to_nalgebra())
    }
}

pub fn perturbed_homotopies(
    mu0: &LieStructure,
    h: &HomotopyPair,
    mu: &Cochain<f64>,
) -> Result<PerturbedHomotopies> {
    Connection::new(mu0, h)?.perturb(mu)
}

/// A smooth path `t ↦ μ_t` in `C²(g)`.
pub trait DeformationPath {
    fn value(&self, t: f64) -> Cochain<f64>;
    fn derivative(&self, t: f64) -> Cochain<f64>;
}

/// `μ_t = μ₀ · exp(tA)`.
#[derive(Debug, Clone)]
pub struct OrbitPath {
    pub mu0: Cochain<f64>,
    pub generator: DMatrix<f64>,
}

impl DeformationPath for OrbitPath {
    fn value(&self, t: f64) -> Cochain<f64> {
        let g = expm(&(&self.generator * t));
        let g_inv = expm(&(&self.generator * -t));
        act(
            &self.mu0,
            &Matrix::from_nalgebra(&g),
            &Matrix::from_nalgebra(&g_inv),
        )
    }

    fn derivative(&self, t: f64) -> Cochain<f64> {
        let a = Cochain::from_matrix(&Matrix::from_nalgebra(&self.generator));
        lie_derivative(&a, &self.value(t))
    }
}

#[derive(Debug, Clone)]
pub struct ConstantPath(pub Cochain<f64>);

impl DeformationPath for ConstantPath {
    fn value(&self, _t: f64) -> Cochain<f64> {
        self.0.clone()
    }

    fn derivative(&self, _t: f64) -> Cochain<f64> {
        Cochain::zeros(self.0.n(), 2)
    }
}

/// Path given by a closure; the derivative defaults to a fourth-order central difference.
pub struct ClosurePath<F, G = fn(f64) -> Cochain<f64>> {
    value: F,
    derivative: Option<G>,
}

impl<F: Fn(f64) -> Cochain<f64>> ClosurePath<F> {
    pub fn new(value: F) -> Self {
        ClosurePath {
            value,
            derivative: None,
        }
    }
}

impl<F: Fn(f64) -> Cochain<f64>, G: Fn(f64) -> Cochain<f64>> ClosurePath<F, G> {
    pub fn with_derivative(value: F, derivative: G) -> Self {
        ClosurePath {
            value,
            derivative: Some(derivative),
        }
    }
}

impl<F: Fn(f64) -> Cochain<f64>, G: Fn(f64) -> Cochain<f64>> DeformationPath for ClosurePath<F, G> {
    fn value(&self, t: f64) -> Cochain<f64> {
        (self.value)(t)
    }

    fn derivative(&self, t: f64) -> Cochain<f64> {
        if let Some(d) = &self.derivative {
            return d(t);
        }
        let h = 1e-3;
        let f = |s: f64| (self.value)(t + s * h);
        let num = f(-2.0).sub(&f(2.0)).add(&f(1.0).sub(&f(-1.0)).scale(&8.0));
        num.scale(&(1.0 / (12.0 * h)))
    }
}

/// Piecewise cubic Hermite interpolation through samples, with slopes from
/// finite differences of the samples.
#[derive(Debug, Clone)]
pub struct SampledPath {
    times: Vec<f64>,
    values: Vec<Cochain<f64>>,
    slopes: Vec<Cochain<f64>>,
}

impl SampledPath {
    pub fn new(times: Vec<f64>, values: Vec<Cochain<f64>>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::LengthMismatch {
                expected: times.len(),
                found: values.len(),
            });
        }
        if times.is_empty() {
            return Err(Error::OutOfRange(
                "a sampled path needs at least one sample".into(),
            ));
        }
        if times
            .windows(2)
            .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
        {
            return Err(Error::OutOfRange(
                "sample times must be strictly increasing".into(),
            ));
        }
        let n = values[0].n();
        if values.iter().any(|v| v.n() != n || v.arity() != 2) {
            return Err(Error::Dimension(
                "samples must be 2-cochains of one dimension".into(),
            ));
        }
        let m = times.len();
        let secant = |i: usize| {
            values[i + 1]
                .sub(&values[i])
                .scale(&(1.0 / (times[i + 1] - times[i])))
        };
        let slopes = (0..m)
            .map(|i| {
                if m == 1 {
                    Cochain::zeros(n, 2)
                } else if i == 0 {
                    secant(0)
                } else if i == m - 1 {
                    secant(m - 2)
                } else {
                    let (h0, h1) = (times[i] - times[i - 1], times[i + 1] - times[i]);
                    secant(i - 1)
                        .scale(&(h1 / (h0 + h1)))
                        .add(&secant(i).scale(&(h0 / (h0 + h1))))
                }
            })
            .collect();
        Ok(SampledPath {
            times,
            values,
            slopes,
        })
    }

    fn locate(&self, t: f64) -> usize {
        let m = self.times.len();
        match self.times.iter().position(|&s| s > t) {
            Some(0) => 0,
            Some(i) => i - 1,
            None => m.saturating_sub(2),
        }
        .min(m.saturating_sub(2))
    }
}

impl DeformationPath for SampledPath {
    fn value(&self, t: f64) -> Cochain<f64> {
        if self.times.len() == 1 {
            return self.values[0].clone();
        }
        let i = self.locate(t);
        let h = self.times[i + 1] - self.times[i];
        let s = (t - self.times[i]) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        self.values[i]
            .scale(&h00)
            .add(&self.slopes[i].scale(&(h10 * h)))
            .add(&self.values[i + 1].scale(&h01))
            .add(&self.slopes[i + 1].scale(&(h11 * h)))
    }

    fn derivative(&self, t: f64) -> Cochain<f64> {
        if self.times.len() == 1 {
            return self.slopes[0].clone();
        }
        let i = self.locate(t);
        let h = self.times[i + 1] - self.times[i];
        let s = (t - self.times[i]) / h;
        let s2 = s * s;
        let d00 = (6.0 * s2 - 6.0 * s) / h;
        let d10 = 3.0 * s2 - 4.0 * s + 1.0;
        let d01 = (-6.0 * s2 + 6.0 * s) / h;
        let d11 = 3.0 * s2 - 2.0 * s;
        self.values[i]
            .scale(&d00)
            .add(&self.slopes[i].scale(&d10))
            .add(&self.values[i + 1].scale(&d01))
            .add(&self.slopes[i + 1].scale(&d11))
    }
}

#[derive(Debug, Clone)]
pub struct TransportResult {
    pub times: Vec<f64>,
    pub transports: Vec<DMatrix<f64>>,
    /// `‖μ₀ − μ_t · P(t)‖` at each sample.
    pub defects: Vec<f64>,
}

impl TransportResult {
    pub fn final_defect(&self) -> f64 {
        *self.defects.last().unwrap_or(&0.0)
    }
}

/// Integrates `dP/dt = −H₁(μ_t)(∂_t μ_t) P`, `P(0) = Id`, on `[0, t_end]` with classical RK4.
pub fn parallel_transport(
    conn: &Connection,
    path: &dyn DeformationPath,
    t_end: f64,
    steps: usize,
) -> Result<TransportResult> {
    if steps == 0 {
        return Err(Error::OutOfRange("at least one step is required".into()));
    }
    let n = conn.dim();
    let start = path.value(0.0);
    if start.n() != n {
        return Err(Error::Dimension(format!(
            "path lives in dimension {}, connection in {n}",
            start.n()
        )));
    }
    let dt = t_end / steps as f64;
    let rhs = |t: f64, p: &DMatrix<f64>| -> Result<DMatrix<f64>> {
        let a = conn.h1_apply(&path.value(t), &path.derivative(t))?;
        Ok(-(a * p))
    };
    let defect = |t: f64, p: &DMatrix<f64>| -> f64 {
        let p_inv = p
            .clone()
            .try_inverse()
            .unwrap_or_else(|| DMatrix::from_element(n, n, f64::NAN));
        let moved = act(
            &path.value(t),
            &Matrix::from_nalgebra(p),
            &Matrix::from_nalgebra(&p_inv),
        );
        conn.mu0.sub(&moved).max_norm()
    };
    let mut p = DMatrix::<f64>::identity(n, n);
    let mut times = vec![0.0];
    let mut defects = vec![defect(0.0, &p)];
    let mut transports = vec![p.clone()];
    for s in 0..steps {
        let t = s as f64 * dt;
        let k1 = rhs(t, &p)?;
        let k2 = rhs(t + dt / 2.0, &(&p + &k1 * (dt / 2.0)))?;
        let k3 = rhs(t + dt / 2.0, &(&p + &k2 * (dt / 2.0)))?;
        let k4 = rhs(t + dt, &(&p + &k3 * dt))?;
        p += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        let t1 = (s + 1) as f64 * dt;
        times.push(t1);
        defects.push(defect(t1, &p));
        transports.push(p.clone());
    }
    Ok(TransportResult {
        times,
        transports,
        defects,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sl2_conn() -> Connection {
        Connection::at(&LieStructure::sl2()).unwrap()
    }

    fn generator() -> DMatrix<f64> {
        DMatrix::from_row_slice(
            3,
            3,
            &[0.03, -0.05, 0.01, 0.02, -0.04, 0.05, -0.01, 0.05, 0.02],
        )
    }

    #[test]
    fn zero_perturbation_returns_base_operators() {
        let c = sl2_conn();
        let ph = c.perturb(&c.mu0).unwrap();
        assert_eq!(ph.h1, c.h1);
        assert_eq!(ph.h2, c.h2);
        assert_eq!(ph.neumann, (0.0, 0.0));
        assert!(ph.residual(&c.mu0) < 1e-14);
    }

    #[test]
    fn perturbed_identity_near_base() {
        let c = sl2_conn();
        let path = OrbitPath {
            mu0: c.mu0.clone(),
            generator: generator() * 0.2,
        };
        let mu = path.value(1.0);
        let ph = c.perturb(&mu).unwrap();
        assert!(ph.residual(&mu) <= 1e-10, "{}", ph.residual(&mu));
    }

    #[test]
    fn far_structure_is_rejected() {
        let c = sl2_conn();
        let far = c.mu0.scale(&50.0);
        assert!(matches!(
            c.perturb(&far),
            Err(Error::OutsideNeighbourhood(_))
        ));
    }

    #[test]
    fn constant_path_transport_is_identity() {
        let c = sl2_conn();
        let r = parallel_transport(&c, &ConstantPath(c.mu0.clone()), 1.0, 10).unwrap();
        for p in &r.transports {
            assert_eq!(p, &DMatrix::<f64>::identity(3, 3));
        }
        assert_eq!(r.final_defect(), 0.0);
    }

    #[test]
    fn orbit_transport_has_small_defect() {
        let c = sl2_conn();
        let path = OrbitPath {
            mu0: c.mu0.clone(),
            generator: generator(),
        };
        let r = parallel_transport(&c, &path, 1.0, 50).unwrap();
        assert!(r.final_defect() < 1e-8, "{}", r.final_defect());
    }

    #[test]
    fn sampled_and_closure_paths_follow_the_orbit() {
        let c = sl2_conn();
        let orbit = OrbitPath {
            mu0: c.mu0.clone(),
            generator: generator(),
        };
        let times: Vec<f64> = (0..=40).map(|i| i as f64 / 40.0).collect();
        let values = times.iter().map(|&t| orbit.value(t)).collect();
        let sampled = SampledPath::new(times, values).unwrap();
        let diff = sampled.value(0.37).sub(&orbit.value(0.37)).max_norm();
        assert!(diff < 1e-7, "{diff}");
        let closure = ClosurePath::new(|t| orbit.value(t));
        let d = closure
            .derivative(0.4)
            .sub(&orbit.derivative(0.4))
            .max_norm();
        assert!(d < 1e-9, "{d}");
        let r = parallel_transport(&c, &sampled, 1.0, 40).unwrap();
        assert!(r.final_defect() < 1e-5, "{}", r.final_defect());
    }

    #[test]
    fn sampled_path_validation() {
        let z = Cochain::<f64>::zeros(3, 2);
        assert!(SampledPath::new(vec![0.0, 0.0], vec![z.clone(), z.clone()]).is_err());
        assert!(SampledPath::new(vec![0.0], vec![]).is_err());
    }
}
