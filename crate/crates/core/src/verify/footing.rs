use super::RunConfig;
use crate::system::ProblemSpec;
use crate::Error;

/// The bundled footing configuration: a unit cube, free to drain, fixed on
/// the bottom and sides and loaded by a vertical traction of 5 kPa on the
/// central part `[0.3, 0.7]^2` of the top face.
pub const FOOTING_CONFIG: &str = include_str!("../../configs/footing.cfg");

pub fn footing_config() -> RunConfig {
    RunConfig::parse(FOOTING_CONFIG, ".").expect("bundled footing configuration is valid")
}

/// Footing problem on the structured `n x n x n` cube.
pub fn footing_spec(n: usize) -> Result<ProblemSpec, Error> {
    let mut cfg = footing_config();
    cfg.mesh.structured = Some(n);
    cfg.to_problem()
}
