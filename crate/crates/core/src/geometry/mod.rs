//! Polyhedral meshes and everything geometric about them.

mod io;
mod mesh;
mod quadrature;
mod quality;
mod shapes;
mod structured;
mod vtk;

pub use io::{load_mesh, parse_mesh, save_mesh, write_mesh, MeshFormat};
pub use mesh::{CellGeometry, FaceGeometry, MeshError, OrientedFace, PolyMesh};
pub use quadrature::{cell_quadrature, face_quadrature, QuadratureRule};
pub use quality::{quality_report, CellQuality, MeshQualityReport};
pub use shapes::{single_hexahedron, single_tetrahedron};
pub use structured::{build_structured_cube, BoxDomain, BOX_SIDE_TAGS};
pub use vtk::{write_vtk, VtkCellData};

/// Mean cell diameter, `h = (1/N_E) * sum_E h_E`.
pub fn mesh_size(mesh: &PolyMesh) -> f64 {
    let n = mesh.num_cells();
    assert!(n > 0, "mesh_size of an empty mesh");
    (0..n).map(|c| mesh.cell_geometry(c).diameter).sum::<f64>() / n as f64
}
