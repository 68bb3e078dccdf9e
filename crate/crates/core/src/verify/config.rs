//! Run configuration files.
//!
//! A configuration is a TOML document with the sections `[mesh]`,
//! `[material]`, `[time]`, one `[bc.<tag>]` per boundary tag, and optional
//! `[data]` and `[output]` sections. Data fields are numbers or expression
//! strings over `x, y, z, t` (see [`Expr`]).
//!
//! ```toml
//! [mesh]
//! structured = 4
//!
//! [material]
//! lambda = 1.0
//! mu = 1.0
//! alpha = 1.0
//! s0 = 0.002
//! permeability = 1.0
//!
//! [time]
//! dt = 0.01
//! tf = 0.2
//!
//! [bc.zmax]
//! traction = [0, 0, "-sin(pi*x)"]
//! flux = 0
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use super::expr::{Expr, ExprError};
use crate::geometry::{build_structured_cube, load_mesh, BoxDomain, MeshFormat, PolyMesh};
use crate::local::MaterialParams;
use crate::spaces::{
    build_dof_map, scalar_field, vector_field, BcSpec, FlowBc, MechanicalBc, ScalarField, VectorField,
};
use crate::system::{InitialCondition, ProblemSpec, TimeGrid};
use crate::{Error, Mat3, Vec3};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("configuration syntax: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("expression in {field}: {source}")]
    Expr {
        field: String,
        #[source]
        source: ExprError,
    },
    #[error("configuration: {0}")]
    Invalid(String),
}

/// A number or an expression string.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Data {
    Number(f64),
    Text(String),
}

impl Data {
    fn compile(&self, field: &str) -> Result<Expr, ConfigError> {
        match self {
            Data::Number(v) => Ok(Expr::Num(*v)),
            Data::Text(s) => Expr::parse(s).map_err(|source| ConfigError::Expr {
                field: field.to_string(),
                source,
            }),
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SubTag {
    /// Existing boundary tag to split.
    pub parent: String,
    pub name: String,
    /// Faces whose barycenter lies in `[min, max]` are moved to `name`.
    pub min: [f64; 3],
    pub max: [f64; 3],
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MeshSection {
    /// `n` of an `n x n x n` unit cube.
    pub structured: Option<usize>,
    /// Mesh file, relative to the configuration file.
    pub file: Option<PathBuf>,
    #[serde(default)]
    pub subtag: Vec<SubTag>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Permeability {
    Scalar(f64),
    Tensor([[f64; 3]; 3]),
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MaterialSection {
    pub lambda: Option<f64>,
    pub mu: Option<f64>,
    pub young: Option<f64>,
    pub poisson: Option<f64>,
    pub alpha: f64,
    pub s0: f64,
    pub permeability: Permeability,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum InitialKind {
    #[default]
    Equilibrium,
    Zero,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    #[serde(default)]
    pub t0: f64,
    pub tf: f64,
    pub dt: f64,
    #[serde(default)]
    pub initial: InitialKind,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BcSection {
    pub traction: Option<[Data; 3]>,
    pub displacement: Option<[Data; 3]>,
    pub flux: Option<Data>,
    pub pressure: Option<Data>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    pub body_force: Option<[Data; 3]>,
    pub source: Option<Data>,
    pub initial_content: Option<Data>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Write a VTK file every this many steps (the final state is always
    /// written).
    #[serde(default = "one")]
    pub vtk_every: usize,
}

fn one() -> usize {
    1
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { vtk_every: 1 }
    }
}

/// Parsed configuration file.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub title: Option<String>,
    pub mesh: MeshSection,
    pub material: MaterialSection,
    pub time: TimeSection,
    #[serde(default)]
    pub bc: BTreeMap<String, BcSection>,
    #[serde(default)]
    pub data: DataSection,
    #[serde(default)]
    pub output: OutputSection,
    /// Directory for relative paths.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn vector_data(v: &[Data; 3], field: &str) -> Result<VectorField, ConfigError> {
    let e = [
        v[0].compile(&format!("{field}[0]"))?,
        v[1].compile(&format!("{field}[1]"))?,
        v[2].compile(&format!("{field}[2]"))?,
    ];
    Ok(vector_field(move |x, t| {
        Vec3::new(e[0].eval(x, t), e[1].eval(x, t), e[2].eval(x, t))
    }))
}

fn scalar_data(v: &Data, field: &str) -> Result<ScalarField, ConfigError> {
    let e = v.compile(field)?;
    Ok(scalar_field(move |x, t| e.eval(x, t)))
}

impl RunConfig {
    pub fn parse(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self, ConfigError> {
        let mut cfg: RunConfig = toml::from_str(text)?;
        cfg.base_dir = base_dir.into();
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, Error> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(Self::parse(&text, dir)?)
    }

    fn check(&self) -> Result<(), ConfigError> {
        let invalid = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        match (self.mesh.structured, &self.mesh.file) {
            (Some(_), Some(_)) | (None, None) => {
                return invalid("[mesh] needs exactly one of 'structured' or 'file'")
            }
            (Some(0), None) => return invalid("[mesh] structured must be at least 1"),
            _ => {}
        }
        let m = &self.material;
        let lame = m.lambda.is_some() || m.mu.is_some();
        let young = m.young.is_some() || m.poisson.is_some();
        if lame == young
            || (lame && (m.lambda.is_none() || m.mu.is_none()))
            || (young && (m.young.is_none() || m.poisson.is_none()))
        {
            return invalid("[material] needs either 'lambda' and 'mu' or 'young' and 'poisson'");
        }
        for (tag, bc) in &self.bc {
            if bc.traction.is_some() == bc.displacement.is_some() {
                return invalid(&format!(
                    "[bc.{tag}] needs exactly one of 'traction' or 'displacement'"
                ));
            }
            if bc.flux.is_some() == bc.pressure.is_some() {
                return invalid(&format!("[bc.{tag}] needs exactly one of 'flux' or 'pressure'"));
            }
        }
        if self.output.vtk_every == 0 {
            return invalid("[output] vtk_every must be at least 1");
        }
        Ok(())
    }

    pub fn material(&self) -> Result<MaterialParams, Error> {
        let m = &self.material;
        let (lambda, mu) = match (m.lambda, m.mu, m.young, m.poisson) {
            (Some(l), Some(mu), _, _) => (l, mu),
            (_, _, Some(e), Some(nu)) => MaterialParams::lame_from_young(e, nu),
            _ => unreachable!("checked on parse"),
        };
        let k = match m.permeability {
            Permeability::Scalar(k) => Mat3::identity() * k,
            Permeability::Tensor(rows) => Mat3::from_fn(|i, j| rows[i][j]),
        };
        Ok(MaterialParams::new(lambda, mu, m.alpha, m.s0, k)?)
    }

    pub fn build_mesh(&self) -> Result<PolyMesh, Error> {
        let mut mesh = match (self.mesh.structured, &self.mesh.file) {
            (Some(n), None) => build_structured_cube(n, &BoxDomain::unit()),
            (None, Some(f)) => {
                let path = self.base_dir.join(f);
                let format = MeshFormat::from_path(&path).ok_or_else(|| {
                    ConfigError::Invalid(format!("unknown mesh format for {}", path.display()))
                })?;
                load_mesh(&path, format)?
            }
            _ => unreachable!("checked on parse"),
        };
        for s in &self.mesh.subtag {
            let (lo, hi) = (s.min, s.max);
            let tol = 1e-12;
            mesh = mesh.retag(&s.parent, &s.name, |b| {
                (0..3).all(|k| b[k] >= lo[k] - tol && b[k] <= hi[k] + tol)
            })?;
        }
        Ok(mesh)
    }

    fn boundary(&self) -> Result<BcSpec, Error> {
        let mut bc = BcSpec::new();
        for (tag, s) in &self.bc {
            let mech = match (&s.traction, &s.displacement) {
                (Some(v), None) => MechanicalBc::Traction(vector_data(v, &format!("bc.{tag}.traction"))?),
                (None, Some(v)) => {
                    MechanicalBc::Displacement(vector_data(v, &format!("bc.{tag}.displacement"))?)
                }
                _ => unreachable!("checked on parse"),
            };
            let flow = match (&s.flux, &s.pressure) {
                (Some(v), None) => FlowBc::Flux(scalar_data(v, &format!("bc.{tag}.flux"))?),
                (None, Some(v)) => FlowBc::Pressure(scalar_data(v, &format!("bc.{tag}.pressure"))?),
                _ => unreachable!("checked on parse"),
            };
            bc.insert(tag.clone(), mech, flow)?;
        }
        Ok(bc)
    }

    /// Builds the mesh and the full problem.
    pub fn to_problem(&self) -> Result<ProblemSpec, Error> {
        let mesh = self.build_mesh()?;
        let t = &self.time;
        let time = TimeGrid::new(t.t0, t.tf, t.dt)?;
        let mut spec = ProblemSpec::new(mesh, self.material()?, self.boundary()?, time)
            .with_initial_condition(match t.initial {
                InitialKind::Equilibrium => InitialCondition::Equilibrium,
                InitialKind::Zero => InitialCondition::Zero,
            });
        if let Some(b) = &self.data.body_force {
            spec = spec.with_body_force(vector_data(b, "data.body_force")?);
        }
        if let Some(s) = &self.data.source {
            spec = spec.with_source(scalar_data(s, "data.source")?);
        }
        if let Some(e) = &self.data.initial_content {
            spec = spec.with_initial_content(scalar_data(e, "data.initial_content")?);
        }
        spec.validate()?;
        build_dof_map(&spec.mesh, &spec.bc)?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
[mesh]
structured = 2

[material]
young = 3e4
poisson = 0.2
alpha = 1
s0 = 0.002
permeability = 1e-4

[time]
dt = 0.05
tf = 0.1
initial = "zero"

[bc.xmin]
displacement = [0, 0, 0]
pressure = 0
[bc.xmax]
displacement = [0, 0, 0]
pressure = 0
[bc.ymin]
displacement = [0, 0, 0]
pressure = 0
[bc.ymax]
displacement = [0, 0, 0]
pressure = 0
[bc.zmin]
displacement = [0, 0, 0]
pressure = "x*y"
[bc.zmax]
traction = [0, 0, "-1000*t"]
flux = 0
"#;

    #[test]
    fn parses_and_builds() {
        let cfg = RunConfig::parse(BASIC, ".").unwrap();
        let m = cfg.material().unwrap();
        assert!((m.mu - 12500.0).abs() < 1e-9);
        assert!((m.lambda - 25000.0 / 3.0).abs() < 1e-9);
        let spec = cfg.to_problem().unwrap();
        assert_eq!(spec.mesh.num_cells(), 8);
        assert_eq!(spec.time.steps, 2);
        assert_eq!(spec.initial, InitialCondition::Zero);
        assert_eq!(spec.materials.len(), 8);
    }

    #[test]
    fn subtags_split_a_side() {
        let text = BASIC.replace(
            "structured = 2\n",
            "structured = 4\n[[mesh.subtag]]\nparent = \"zmax\"\nname = \"load\"\nmin = [0.2, 0.2, 0.0]\nmax = [0.8, 0.8, 1.0]\n",
        ) + "[bc.load]\ntraction = [0, 0, -1]\nflux = 0\n";
        let cfg = RunConfig::parse(&text, ".").unwrap();
        let mesh = cfg.build_mesh().unwrap();
        let n = mesh
            .boundary_faces()
            .filter(|&f| mesh.boundary_tag(f) == Some("load"))
            .count();
        assert_eq!(n, 4);
        cfg.to_problem().unwrap();
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            RunConfig::parse("[mesh]\nstructured = 2\n", "."),
            Err(ConfigError::Syntax(_))
        ));
        let both = BASIC.replace("pressure = \"x*y\"", "pressure = 0\nflux = 0");
        assert!(matches!(RunConfig::parse(&both, "."), Err(ConfigError::Invalid(_))));
        let unknown = BASIC.replace("[time]", "[time]\nfoo = 1");
        assert!(matches!(RunConfig::parse(&unknown, "."), Err(ConfigError::Syntax(_))));
        let bad_expr = BASIC.replace("\"x*y\"", "\"x**y\"");
        let cfg = RunConfig::parse(&bad_expr, ".").unwrap();
        assert!(matches!(
            cfg.to_problem(),
            Err(Error::Config(ConfigError::Expr { .. }))
        ));
        let missing = BASIC.replace("[bc.zmax]\ntraction = [0, 0, \"-1000*t\"]\nflux = 0\n", "");
        let cfg = RunConfig::parse(&missing, ".").unwrap();
        assert!(matches!(cfg.to_problem(), Err(Error::BoundaryConditions(_))));
    }
}
