use std::f64::consts::PI;
use std::sync::Arc;

use super::VerifyError;
use crate::geometry::PolyMesh;
use crate::local::MaterialParams;
use crate::spaces::{scalar_field, vector_field, BcSpec, FlowBc, MechanicalBc};
use crate::system::{ProblemSpec, TimeGrid};
use crate::{Mat3, Vec3};

/// One-dimensional factor of a separable term.
#[derive(Clone, Debug, PartialEq)]
pub enum Factor {
    /// Polynomial with ascending coefficients.
    Poly(Vec<f64>),
    /// `sin(k s)`.
    Sin(f64),
    /// `cos(k s)`.
    Cos(f64),
}

impl Factor {
    pub fn one() -> Self {
        Factor::Poly(vec![1.0])
    }

    /// Derivative of order `order` (0, 1 or 2) at `s`.
    pub fn eval(&self, order: usize, s: f64) -> f64 {
        match self {
            Factor::Poly(c) => c
                .iter()
                    .enumerate()
                    .skip(order)
                    .map(|(i, &ci)| {
                        let falling: f64 = (0..order).map(|j| (i - j) as f64).product();
                    ci * falling * s.powi((i - order) as i32)
                })
                .sum(),
            Factor::Sin(k) => match order {
                0 => (k * s).sin(),
                1 => k * (k * s).cos(),
                2 => -k * k * (k * s).sin(),
                _ => unimplemented!("derivative order {order}"),
            },
            Factor::Cos(k) => match order {
                0 => (k * s).cos(),
                1 => -k * (k * s).sin(),
                2 => -k * k * (k * s).cos(),
                _ => unimplemented!("derivative order {order}"),
            },
        }
    }
}

/// Time factor of a separable term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TimeFactor {
    One,
    /// `e^{r t}`.
    Exp(f64),
    /// `e^t - 1`.
    ExpMinusOne,
}

impl TimeFactor {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            TimeFactor::One => 1.0,
            TimeFactor::Exp(r) => (r * t).exp(),
            TimeFactor::ExpMinusOne => t.exp() - 1.0,
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            TimeFactor::One => 0.0,
            TimeFactor::Exp(r) => r * (r * t).exp(),
            TimeFactor::ExpMinusOne => t.exp(),
        }
    }
}

/// `coef * T(t) * f0(x) f1(y) f2(z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coef: f64,
    pub time: TimeFactor,
    pub factors: [Factor; 3],
}

impl Term {
    pub fn new(coef: f64, time: TimeFactor, factors: [Factor; 3]) -> Self {
        Self {
            coef,
            time,
            factors,
        }
    }

    fn space(&self, orders: [usize; 3], x: &Vec3) -> f64 {
        self.coef
            * (0..3)
                .map(|k| self.factors[k].eval(orders[k], x[k]))
                .product::<f64>()
    }
}

/// Sum of separable terms with analytic space and time derivatives.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Separable {
    pub terms: Vec<Term>,
}

fn orders(dirs: &[usize]) -> [usize; 3] {
    let mut o = [0; 3];
    for &d in dirs {
        o[d] += 1;
    }
    o
}

impl Separable {
    pub fn new(terms: Vec<Term>) -> Self {
        Self { terms }
    }

    /// Mixed space derivative along `dirs` (at most two entries), optionally
    /// differentiated once in time.
    pub fn derivative(&self, dirs: &[usize], time_derivative: bool, x: &Vec3, t: f64) -> f64 {
        let o = orders(dirs);
        self.terms
            .iter()
            .map(|term| {
                let tf = if time_derivative {
                    term.time.derivative(t)
                } else {
                    term.time.value(t)
                };
                tf * term.space(o, x)
            })
            .sum()
    }

    pub fn value(&self, x: &Vec3, t: f64) -> f64 {
        self.derivative(&[], false, x, t)
    }

    pub fn gradient(&self, x: &Vec3, t: f64) -> Vec3 {
        Vec3::from_fn(|i, _| self.derivative(&[i], false, x, t))
    }

    pub fn hessian(&self, x: &Vec3, t: f64) -> Mat3 {
        Mat3::from_fn(|i, j| self.derivative(&[i, j], false, x, t))
    }
}

/// Closed-form displacement and pressure with every derived field of the
/// Biot system.
#[derive(Clone, Debug)]
pub struct ManufacturedCase {
    pub name: String,
    pub material: MaterialParams,
    pub time: TimeGrid,
    pub u: [Separable; 3],
    pub p: Separable,
}

impl ManufacturedCase {
    /// `"test1"` (compressible) or `"test2"` (nearly incompressible, no
    /// storage).
    pub fn named(id: &str) -> Result<Self, VerifyError> {
        match id {
            "test1" => Ok(Self::test1()),
            "test2" => Ok(Self::test2()),
            _ => Err(VerifyError::UnknownCase(id.to_string())),
        }
    }

    /// `u = (phi, phi, phi)`, `p = phi`,
    /// `phi = -xyz(x-1)(y-1)(z-1)(e^t - 1)`, `lambda = mu = 1`.
    pub fn test1() -> Self {
        let g = Factor::Poly(vec![0.0, -1.0, 1.0]);
        let phi = Separable::new(vec![Term::new(
            -1.0,
            TimeFactor::ExpMinusOne,
            [g.clone(), g.clone(), g],
        )]);
        let material = MaterialParams::new(1.0, 1.0, 1.0, 0.002, Mat3::identity())
            .expect("valid parameters");
        Self {
            name: "test1".into(),
            material,
            time: TimeGrid::new(0.0, 0.2, 0.01).expect("valid grid"),
            u: [phi.clone(), phi.clone(), phi.clone()],
            p: phi,
        }
    }

    /// Divergence-free trigonometric displacement plus a small quadratic
    /// part, `lambda = 1e6`, `s0 = 0`.
    pub fn test2() -> Self {
        let lambda = 1e6;
        let mu = 1.0;
        let k = 2.0 * PI;
        let e = TimeFactor::Exp(-1.0);
        let (s, c) = (Factor::Sin(k), Factor::Cos(k));
        let one = Factor::one;
        let sq = || Factor::Poly(vec![0.0, 0.0, 1.0]);
        let q = 1.0 / (lambda + mu);
        // each component: e^{-t}(A - B) + q x_i^2 e^{-t}
        let comp = |plus: [Factor; 3], minus: [Factor; 3], quad: [Factor; 3]| {
            Separable::new(vec![
                Term::new(1.0, e, plus),
                Term::new(-1.0, e, minus),
                Term::new(q, e, quad),
            ])
        };
        let u = [
            comp(
                [s.clone(), c.clone(), s.clone()],
                [s.clone(), s.clone(), c.clone()],
                [sq(), one(), one()],
            ),
            comp(
                [s.clone(), s.clone(), c.clone()],
                [c.clone(), s.clone(), s.clone()],
                [one(), sq(), one()],
            ),
            comp(
                [c.clone(), s.clone(), s.clone()],
                [s.clone(), c, s],
                [one(), one(), sq()],
            ),
        ];
        let sp = Factor::Sin(PI);
        let p = Separable::new(vec![Term::new(1.0, e, [sp.clone(), sp.clone(), sp])]);
        let material =
            MaterialParams::new(lambda, mu, 1.0, 0.0, Mat3::identity()).expect("valid parameters");
        Self {
            name: "test2".into(),
            material,
            time: TimeGrid::new(0.0, 0.2, 0.01).expect("valid grid"),
            u,
            p,
        }
    }

    /// Affine displacement and pressure, constant in time. The exact stress
    /// and velocity are constant.
    pub fn affine(
        name: &str,
        material: MaterialParams,
        time: TimeGrid,
        grad_u: Mat3,
        u0: Vec3,
        grad_p: Vec3,
        p0: f64,
    ) -> Self {
        let lin = |c0: f64, g: Vec3| {
            let mut terms = vec![Term::new(
                c0,
                TimeFactor::One,
                [Factor::one(), Factor::one(), Factor::one()],
            )];
            for k in 0..3 {
                let mut f = [Factor::one(), Factor::one(), Factor::one()];
                f[k] = Factor::Poly(vec![0.0, 1.0]);
                terms.push(Term::new(g[k], TimeFactor::One, f));
            }
            Separable::new(terms)
        };
        Self {
            name: name.into(),
            material,
            time,
            u: [
                lin(u0.x, grad_u.row(0).transpose()),
                lin(u0.y, grad_u.row(1).transpose()),
                lin(u0.z, grad_u.row(2).transpose()),
            ],
            p: lin(p0, grad_p),
        }
    }

    pub fn displacement(&self, x: &Vec3, t: f64) -> Vec3 {
        Vec3::from_fn(|i, _| self.u[i].value(x, t))
    }

    /// `(grad u)_{ij} = d u_i / d x_j`.
    pub fn displacement_gradient(&self, x: &Vec3, t: f64) -> Mat3 {
        Mat3::from_fn(|i, j| self.u[i].derivative(&[j], false, x, t))
    }

    pub fn divergence(&self, x: &Vec3, t: f64) -> f64 {
        (0..3).map(|i| self.u[i].derivative(&[i], false, x, t)).sum()
    }

    pub fn pressure(&self, x: &Vec3, t: f64) -> f64 {
        self.p.value(x, t)
    }

    /// `C eps(u) - alpha p I`.
    pub fn stress(&self, x: &Vec3, t: f64) -> Mat3 {
        let m = &self.material;
        let g = self.displacement_gradient(x, t);
        let eps = (g + g.transpose()) * 0.5;
        eps * (2.0 * m.mu)
            + Mat3::identity() * (m.lambda * eps.trace() - m.alpha * self.pressure(x, t))
    }

    /// `-K grad p`.
    pub fn velocity(&self, x: &Vec3, t: f64) -> Vec3 {
        -self.material.permeability * self.p.gradient(x, t)
    }

    /// `-div sigma`.
    pub fn body_force(&self, x: &Vec3, t: f64) -> Vec3 {
        let m = &self.material;
        let grad_div =
            Vec3::from_fn(|i, _| (0..3).map(|j| self.u[j].derivative(&[i, j], false, x, t)).sum());
        let lap = Vec3::from_fn(|i, _| self.u[i].hessian(x, t).trace());
        -(lap * m.mu + grad_div * (m.mu + m.lambda) - self.p.gradient(x, t) * m.alpha)
    }

    /// `d/dt (s0 p + alpha div u) + div w`.
    pub fn source(&self, x: &Vec3, t: f64) -> f64 {
        let m = &self.material;
        let p_t = self.p.derivative(&[], true, x, t);
        let div_u_t: f64 = (0..3).map(|i| self.u[i].derivative(&[i], true, x, t)).sum();
        let div_w = -m.permeability.component_mul(&self.p.hessian(x, t)).sum();
        m.s0 * p_t + m.alpha * div_u_t + div_w
    }

    /// `s0 p + alpha div u`.
    pub fn fluid_content(&self, x: &Vec3, t: f64) -> f64 {
        self.material.s0 * self.pressure(x, t) + self.material.alpha * self.divergence(x, t)
    }

    /// Problem on `mesh` with displacement and pressure data on every
    /// boundary tag.
    pub fn problem(&self, mesh: PolyMesh) -> Result<ProblemSpec, crate::Error> {
        let case = Arc::new(self.clone());
        let mut bc = BcSpec::new();
        for tag in mesh.tags() {
            let (cu, cp) = (case.clone(), case.clone());
            bc.insert(
                tag,
                MechanicalBc::Displacement(vector_field(move |x, t| cu.displacement(x, t))),
                FlowBc::Pressure(scalar_field(move |x, t| cp.pressure(x, t))),
            )?;
        }
        let (cb, cs, ce) = (case.clone(), case.clone(), case.clone());
        let spec = ProblemSpec::new(mesh, self.material, bc, self.time)
            .with_body_force(vector_field(move |x, t| cb.body_force(x, t)))
            .with_source(scalar_field(move |x, t| cs.source(x, t)))
            .with_initial_content(scalar_field(move |x, t| ce.fluid_content(x, t)));
        Ok(spec)
    }
}
