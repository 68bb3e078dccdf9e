use std::path::Path;

use biotvem::geometry::{load_mesh, mesh_size, quality_report, MeshFormat, PolyMesh};
use biotvem::system::AssemblyOptions;
use biotvem::verify::{run_case, ManufacturedCase};
use biotvem::Vec3;

fn fixture(name: &str) -> PolyMesh {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name);
    load_mesh(path, MeshFormat::PolyMesh).unwrap()
}

fn check_cube_tiling(mesh: &PolyMesh) {
    let total: f64 = (0..mesh.num_cells()).map(|c| mesh.cell_geometry(c).volume).sum();
    assert!((total - 1.0).abs() < 1e-12, "volumes sum to {total}");
    for c in 0..mesh.num_cells() {
        let g = mesh.cell_geometry(c);
        assert!(g.volume > 0.0);
        assert!((g.volume - g.fan_volume).abs() <= 1e-10 * g.volume);
        // closed surface: signed area vectors cancel
        let closure: Vec3 = mesh
            .cell(c)
            .iter()
            .map(|of| mesh.face_geometry(of.face).normal * (of.signf() * mesh.face_geometry(of.face).area))
            .sum();
        assert!(closure.norm() < 1e-12, "cell {c} is not closed");
    }
    let tags: Vec<&str> = mesh.tags().into_iter().collect();
    assert_eq!(tags, ["xmax", "xmin", "ymax", "ymin", "zmax", "zmin"]);
    let boundary_area: f64 = mesh.boundary_faces().map(|f| mesh.face_geometry(f).area).sum();
    assert!((boundary_area - 6.0).abs() < 1e-12);
}

#[test]
fn voronoi_fixture_tiles_the_cube() {
    let mesh = fixture("voronoi27.polymesh");
    assert_eq!(mesh.num_cells(), 27);
    check_cube_tiling(&mesh);
    let q = quality_report(&mesh);
    assert!(q.gamma > 0.0);
    assert!(mesh_size(&mesh) < 1.0);
}

#[test]
fn kuhn_fixture_tiles_the_cube() {
    let mesh = fixture("kuhn2.polymesh");
    assert_eq!(mesh.num_cells(), 48);
    assert_eq!(mesh.num_faces(), 120);
    check_cube_tiling(&mesh);
    assert!(mesh.cells().iter().all(|c| c.len() == 4));
}

#[test]
fn test1_runs_on_general_polyhedra() {
    for name in ["voronoi27.polymesh", "kuhn2.polymesh"] {
        let run = run_case(&ManufacturedCase::test1(), fixture(name), AssemblyOptions::default())
            .unwrap();
        assert!(run.max_residual < 1e-10, "{name}: residual {:e}", run.max_residual);
        assert!(run.errors.values().iter().all(|e| e.is_finite()));
        assert!(run.errors.e_sigma < 1.0 && run.errors.e_w < 1.0, "{name}: {:?}", run.errors);
    }
}
