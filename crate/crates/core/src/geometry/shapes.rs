//! Single-cell meshes used by examples and tests.

use std::collections::BTreeMap;

use super::{build_structured_cube, BoxDomain, PolyMesh};
use crate::Vec3;

/// Axis-aligned cube `[0, side]^3` as one hexahedron, tagged like
/// [`build_structured_cube`].
pub fn single_hexahedron(side: f64) -> PolyMesh {
    build_structured_cube(1, &BoxDomain::new(Vec3::zeros(), Vec3::repeat(side)))
}

/// Regular tetrahedron with unit edge length; all faces tagged `"boundary"`.
pub fn single_tetrahedron() -> PolyMesh {
    let s3 = 3f64.sqrt();
    let vertices = vec![
        Vec3::new(0.0, 0.0, 0.0),
        Vec3::new(1.0, 0.0, 0.0),
        Vec3::new(0.5, 0.5 * s3, 0.0),
        Vec3::new(0.5, s3 / 6.0, (2.0f64 / 3.0).sqrt()),
    ];
    let faces = vec![vec![0, 2, 1], vec![0, 1, 3], vec![1, 2, 3], vec![2, 0, 3]];
    let tags: BTreeMap<usize, String> = (0..4).map(|f| (f, "boundary".to_string())).collect();
    PolyMesh::with_inferred_orientation(vertices, faces, vec![vec![0, 1, 2, 3]], tags)
        .expect("regular tetrahedron is valid")
}
