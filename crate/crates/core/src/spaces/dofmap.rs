use std::collections::BTreeMap;
use std::ops::Range;

use thiserror::Error;

use super::interpolate::traction_moments;
use super::{interpolate_velocity, ScalarField, VectorField};
use crate::geometry::PolyMesh;
use crate::Vec6;

#[derive(Debug, Error)]
pub enum BcError {
    #[error("boundary tag {tag:?} has no boundary condition")]
    Uncovered { tag: String },
    #[error("boundary condition given for tag {tag:?}, which the mesh does not have")]
    UnknownTag { tag: String },
    #[error("conflicting boundary conditions for tag {tag:?}: {message}")]
    Conflict { tag: String, message: String },
}

/// Mechanical condition on a boundary tag. Tractions are `sigma n` with the
/// outward normal.
#[derive(Clone)]
pub enum MechanicalBc {
    Traction(VectorField),
    Displacement(VectorField),
}

/// Flow condition on a boundary tag. Fluxes are `w . n` with the outward
/// normal.
#[derive(Clone)]
pub enum FlowBc {
    Flux(ScalarField),
    Pressure(ScalarField),
}

#[derive(Clone)]
pub struct BoundaryCondition {
    pub mechanical: MechanicalBc,
    pub flow: FlowBc,
}

impl std::fmt::Debug for BoundaryCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let m = match self.mechanical {
            MechanicalBc::Traction(_) => "traction",
            MechanicalBc::Displacement(_) => "displacement",
        };
        let w = match self.flow {
            FlowBc::Flux(_) => "flux",
            FlowBc::Pressure(_) => "pressure",
        };
        write!(f, "{m}/{w}")
    }
}

/// Boundary conditions by tag.
#[derive(Clone, Debug, Default)]
pub struct BcSpec {
    conditions: BTreeMap<String, BoundaryCondition>,
}

impl BcSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(
        &mut self,
        tag: impl Into<String>,
        mechanical: MechanicalBc,
        flow: FlowBc,
    ) -> Result<(), BcError> {
        let tag = tag.into();
        if self.conditions.contains_key(&tag) {
            return Err(BcError::Conflict {
                tag,
                message: "tag assigned twice".into(),
            });
        }
        self.conditions
            .insert(tag, BoundaryCondition { mechanical, flow });
        Ok(())
    }

    /// Builder form of [`insert`](Self::insert).
    pub fn with(
        mut self,
        tag: impl Into<String>,
        mechanical: MechanicalBc,
        flow: FlowBc,
    ) -> Result<Self, BcError> {
        self.insert(tag, mechanical, flow)?;
        Ok(self)
    }

    /// Same condition on every listed tag.
    pub fn uniform<'a>(
        tags: impl IntoIterator<Item = &'a str>,
        mechanical: MechanicalBc,
        flow: FlowBc,
    ) -> Result<Self, BcError> {
        let mut spec = Self::new();
        for t in tags {
            spec.insert(t, mechanical.clone(), flow.clone())?;
        }
        Ok(spec)
    }

    pub fn get(&self, tag: &str) -> Option<&BoundaryCondition> {
        self.conditions.get(tag)
    }

    pub fn tags(&self) -> impl Iterator<Item = &str> {
        self.conditions.keys().map(String::as_str)
    }
}

/// A boundary face with its unique cell and outward sign.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryFace {
    pub face: usize,
    pub cell: usize,
    pub sign: f64,
    pub tag: String,
}

/// Global numbering `[sigma | u | w | p]`: 6 stress DOFs per face, 6
/// displacement DOFs per cell, 1 velocity DOF per face, 1 pressure DOF per
/// cell.
#[derive(Clone, Debug)]
pub struct DofMap {
    num_faces: usize,
    num_cells: usize,
    traction_faces: Vec<BoundaryFace>,
    displacement_faces: Vec<BoundaryFace>,
    flux_faces: Vec<BoundaryFace>,
    pressure_faces: Vec<BoundaryFace>,
    essential: Vec<usize>,
    is_essential: Vec<bool>,
    bc: BcSpec,
}

impl DofMap {
    pub fn new(mesh: &PolyMesh, bc: &BcSpec) -> Result<Self, BcError> {
        let mesh_tags = mesh.tags();
        if let Some(t) = bc.tags().find(|t| !mesh_tags.contains(t)) {
            return Err(BcError::UnknownTag { tag: t.to_string() });
        }
        let (nf, nc) = (mesh.num_faces(), mesh.num_cells());
        let mut map = Self {
            num_faces: nf,
            num_cells: nc,
            traction_faces: Vec::new(),
            displacement_faces: Vec::new(),
            flux_faces: Vec::new(),
            pressure_faces: Vec::new(),
            essential: Vec::new(),
            is_essential: vec![false; 7 * nf + 7 * nc],
            bc: bc.clone(),
        };
        for (&f, tag) in mesh.boundary_tags() {
            let cond = bc.get(tag).ok_or_else(|| BcError::Uncovered { tag: tag.clone() })?;
            let (cell, sign) = mesh.face_cells(f)[0];
            let bf = BoundaryFace {
                face: f,
                cell,
                sign: f64::from(sign),
                tag: tag.clone(),
            };
            match cond.mechanical {
                MechanicalBc::Traction(_) => {
                    for i in map.sigma(f) {
                        map.is_essential[i] = true;
                    }
                    map.traction_faces.push(bf.clone());
                }
                MechanicalBc::Displacement(_) => map.displacement_faces.push(bf.clone()),
            }
            match cond.flow {
                FlowBc::Flux(_) => {
                    let i = map.w(f);
                    map.is_essential[i] = true;
                    map.flux_faces.push(bf);
                }
                FlowBc::Pressure(_) => map.pressure_faces.push(bf),
            }
        }
        map.essential = (0..map.num_dofs()).filter(|&i| map.is_essential[i]).collect();
        Ok(map)
    }

    pub fn num_dofs(&self) -> usize {
        7 * self.num_faces + 7 * self.num_cells
    }

    pub fn num_faces(&self) -> usize {
        self.num_faces
    }

    pub fn num_cells(&self) -> usize {
        self.num_cells
    }

    pub fn u_offset(&self) -> usize {
        6 * self.num_faces
    }

    pub fn w_offset(&self) -> usize {
        6 * self.num_faces + 6 * self.num_cells
    }

    pub fn p_offset(&self) -> usize {
        7 * self.num_faces + 6 * self.num_cells
    }

    pub fn sigma(&self, face: usize) -> Range<usize> {
        6 * face..6 * face + 6
    }

    pub fn u(&self, cell: usize) -> Range<usize> {
        let o = self.u_offset() + 6 * cell;
        o..o + 6
    }

    pub fn w(&self, face: usize) -> usize {
        self.w_offset() + face
    }

    pub fn p(&self, cell: usize) -> usize {
        self.p_offset() + cell
    }

    /// Sorted global indices of essential (traction and flux) DOFs.
    pub fn essential_dofs(&self) -> &[usize] {
        &self.essential
    }

    pub fn is_essential(&self, dof: usize) -> bool {
        self.is_essential[dof]
    }

    pub fn traction_faces(&self) -> &[BoundaryFace] {
        &self.traction_faces
    }

    pub fn displacement_faces(&self) -> &[BoundaryFace] {
        &self.displacement_faces
    }

    pub fn flux_faces(&self) -> &[BoundaryFace] {
        &self.flux_faces
    }

    pub fn pressure_faces(&self) -> &[BoundaryFace] {
        &self.pressure_faces
    }

    pub fn bc(&self) -> &BcSpec {
        &self.bc
    }

    /// Prescribed values of the essential DOFs at time `t`, in the order of
    /// [`essential_dofs`](Self::essential_dofs).
    pub fn essential_values(&self, mesh: &PolyMesh, t: f64) -> Vec<f64> {
        let mut values = vec![0.0; self.num_dofs()];
        for bf in &self.traction_faces {
            let MechanicalBc::Traction(g) = &self.bc.conditions[&bf.tag].mechanical else {
                unreachable!("traction face without traction data")
            };
            let d: Vec6 = traction_moments(mesh, bf.face, |x| g(x, t)) * bf.sign;
            for (k, i) in self.sigma(bf.face).enumerate() {
                values[i] = d[k];
            }
        }
        for bf in &self.flux_faces {
            let FlowBc::Flux(g) = &self.bc.conditions[&bf.tag].flow else {
                unreachable!("flux face without flux data")
            };
            let n = mesh.face_geometry(bf.face).normal;
            // flux data is outward; the DOF refers to the stored normal
            values[self.w(bf.face)] = interpolate_velocity(mesh, bf.face, |x| n * g(x, t)) * bf.sign;
        }
        self.essential.iter().map(|&i| values[i]).collect()
    }
}

pub fn build_dof_map(mesh: &PolyMesh, bc: &BcSpec) -> Result<DofMap, BcError> {
    DofMap::new(mesh, bc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_structured_cube, BoxDomain, BOX_SIDE_TAGS};
    use crate::spaces::{scalar_field, vector_field, zero_scalar, zero_vector};
    use crate::Vec3;

    fn dirichlet() -> BcSpec {
        BcSpec::uniform(
            BOX_SIDE_TAGS,
            MechanicalBc::Displacement(zero_vector()),
            FlowBc::Pressure(zero_scalar()),
        )
        .unwrap()
    }

    #[test]
    fn full_dirichlet_has_no_essential_dofs() {
        let mesh = build_structured_cube(2, &BoxDomain::unit());
        let map = DofMap::new(&mesh, &dirichlet()).unwrap();
        assert_eq!(map.num_dofs(), 6 * 36 + 6 * 8 + 36 + 8);
        assert_eq!(map.num_dofs(), 308);
        assert!(map.essential_dofs().is_empty());
        assert_eq!(map.displacement_faces().len(), 24);
    }

    #[test]
    fn uncovered_and_unknown_tags() {
        let mesh = build_structured_cube(1, &BoxDomain::unit());
        let partial = BcSpec::uniform(
            ["xmin"],
            MechanicalBc::Displacement(zero_vector()),
            FlowBc::Pressure(zero_scalar()),
        )
        .unwrap();
        assert!(matches!(DofMap::new(&mesh, &partial), Err(BcError::Uncovered { .. })));
        let extra = dirichlet()
            .with("nowhere", MechanicalBc::Displacement(zero_vector()), FlowBc::Pressure(zero_scalar()))
            .unwrap();
        assert!(matches!(DofMap::new(&mesh, &extra), Err(BcError::UnknownTag { .. })));
        let dup = dirichlet().with(
            "xmin",
            MechanicalBc::Displacement(zero_vector()),
            FlowBc::Pressure(zero_scalar()),
        );
        assert!(matches!(dup, Err(BcError::Conflict { .. })));
    }

    #[test]
    fn traction_and_flux_faces_are_essential() {
        let mesh = build_structured_cube(2, &BoxDomain::unit());
        let mut bc = BcSpec::new();
        for tag in BOX_SIDE_TAGS {
            if tag == "zmax" {
                bc.insert(
                    tag,
                    MechanicalBc::Traction(vector_field(|_, _| Vec3::new(0.0, 0.0, -2.0))),
                    FlowBc::Flux(scalar_field(|_, _| 3.0)),
                )
                .unwrap();
            } else {
                bc.insert(tag, MechanicalBc::Displacement(zero_vector()), FlowBc::Pressure(zero_scalar()))
                    .unwrap();
            }
        }
        let map = DofMap::new(&mesh, &bc).unwrap();
        assert_eq!(map.essential_dofs().len(), 4 * 7);
        for &i in map.essential_dofs() {
            let face = if i < map.u_offset() { i / 6 } else { i - map.w_offset() };
            assert_eq!(mesh.boundary_tag(face), Some("zmax"));
        }
        let vals = map.essential_values(&mesh, 0.0);
        // normal stress DOF = outward traction . n_f, flux DOF = outward flux
        // (structured boundary faces point outward)
        for (k, &i) in map.essential_dofs().iter().enumerate() {
            if i >= map.w_offset() {
                assert!((vals[k] - 3.0).abs() < 1e-14);
            } else if i % 6 == 3 {
                assert!((vals[k] + 2.0).abs() < 1e-14);
            } else {
                assert!(vals[k].abs() < 1e-14);
            }
        }
    }
}
