use std::collections::BTreeMap;

use super::{OrientedFace, PolyMesh};
use crate::Vec3;

/// Boundary tags of the six box sides, in the order
/// `x = min, x = max, y = min, y = max, z = min, z = max`.
pub const BOX_SIDE_TAGS: [&str; 6] = ["xmin", "xmax", "ymin", "ymax", "zmin", "zmax"];

/// Axis-aligned box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoxDomain {
    pub min: Vec3,
    pub max: Vec3,
}

impl BoxDomain {
    pub fn new(min: Vec3, max: Vec3) -> Self {
        assert!(
            (0..3).all(|i| max[i] > min[i]),
            "box must have positive extent"
        );
        Self { min, max }
    }

    pub fn unit() -> Self {
        Self::new(Vec3::zeros(), Vec3::repeat(1.0))
    }
}

/// Uniform `n x n x n` hexahedral mesh of a box.
///
/// Interior faces have their normal along the positive axis; boundary faces
/// are oriented outward, so every boundary face has sign `+1` in its cell.
/// Face count is `3 n^2 (n + 1)`.
pub fn build_structured_cube(n: usize, domain: &BoxDomain) -> PolyMesh {
    assert!(n >= 1, "structured cube needs n >= 1");
    let m = n + 1;
    let coord = |axis: usize, i: usize| {
        let (a, b) = (domain.min[axis], domain.max[axis]);
        if i == n {
            b
        } else {
            a + (b - a) * (i as f64 / n as f64)
        }
    };
    let vid = |i: usize, j: usize, k: usize| i + m * (j + m * k);
    let mut vertices = Vec::with_capacity(m * m * m);
    for k in 0..m {
        for j in 0..m {
            for i in 0..m {
                vertices.push(Vec3::new(coord(0, i), coord(1, j), coord(2, k)));
            }
        }
    }

    let nx = m * n * n;
    let xf = |i: usize, j: usize, k: usize| i + m * (j + n * k);
    let yf = |i: usize, j: usize, k: usize| nx + i + n * (j + m * k);
    let zf = |i: usize, j: usize, k: usize| 2 * nx + i + n * (j + n * k);

    let mut faces = vec![Vec::new(); 3 * nx];
    let mut tags = BTreeMap::new();
    for k in 0..n {
        for j in 0..n {
            for i in 0..m {
                let mut lp = vec![
                    vid(i, j, k),
                    vid(i, j + 1, k),
                    vid(i, j + 1, k + 1),
                    vid(i, j, k + 1),
                ];
                if i == 0 {
                    lp.reverse();
                    tags.insert(xf(i, j, k), BOX_SIDE_TAGS[0].to_string());
                } else if i == n {
                    tags.insert(xf(i, j, k), BOX_SIDE_TAGS[1].to_string());
                }
                faces[xf(i, j, k)] = lp;
            }
        }
    }
    for k in 0..n {
        for j in 0..m {
            for i in 0..n {
                let mut lp = vec![
                    vid(i, j, k),
                    vid(i, j, k + 1),
                    vid(i + 1, j, k + 1),
                    vid(i + 1, j, k),
                ];
                if j == 0 {
                    lp.reverse();
                    tags.insert(yf(i, j, k), BOX_SIDE_TAGS[2].to_string());
                } else if j == n {
                    tags.insert(yf(i, j, k), BOX_SIDE_TAGS[3].to_string());
                }
                faces[yf(i, j, k)] = lp;
            }
        }
    }
    for k in 0..m {
        for j in 0..n {
            for i in 0..n {
                let mut lp = vec![
                    vid(i, j, k),
                    vid(i + 1, j, k),
                    vid(i + 1, j + 1, k),
                    vid(i, j + 1, k),
                ];
                if k == 0 {
                    lp.reverse();
                    tags.insert(zf(i, j, k), BOX_SIDE_TAGS[4].to_string());
                } else if k == n {
                    tags.insert(zf(i, j, k), BOX_SIDE_TAGS[5].to_string());
                }
                faces[zf(i, j, k)] = lp;
            }
        }
    }

    let low = |idx: usize| if idx == 0 { 1 } else { -1 };
    let mut cells = Vec::with_capacity(n * n * n);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                cells.push(vec![
                    OrientedFace::new(xf(i, j, k), low(i)),
                    OrientedFace::new(xf(i + 1, j, k), 1),
                    OrientedFace::new(yf(i, j, k), low(j)),
                    OrientedFace::new(yf(i, j + 1, k), 1),
                    OrientedFace::new(zf(i, j, k), low(k)),
                    OrientedFace::new(zf(i, j, k + 1), 1),
                ]);
            }
        }
    }
    PolyMesh::new(vertices, faces, cells, tags).expect("structured cube is a valid mesh")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::mesh_size;

    #[test]
    fn single_cell_counts() {
        let mesh = build_structured_cube(1, &BoxDomain::unit());
        assert_eq!(mesh.num_cells(), 1);
        assert_eq!(mesh.num_faces(), 6);
        assert_eq!(mesh.num_vertices(), 8);
    }

    #[test]
    fn face_count_formula() {
        for n in 1..=4 {
            let mesh = build_structured_cube(n, &BoxDomain::unit());
            assert_eq!(mesh.num_cells(), n * n * n);
            assert_eq!(mesh.num_faces(), 3 * n * n * (n + 1));
            assert_eq!(mesh.boundary_tags().len(), 6 * n * n);
        }
        assert_eq!(build_structured_cube(2, &BoxDomain::unit()).num_faces(), 36);
    }

    #[test]
    fn diameters_and_mesh_size() {
        let mesh = build_structured_cube(2, &BoxDomain::unit());
        for c in 0..mesh.num_cells() {
            assert!((mesh.cell_geometry(c).diameter - 3f64.sqrt() / 2.0).abs() < 1e-14);
        }
        assert!((mesh_size(&mesh) - 3f64.sqrt() / 2.0).abs() < 1e-14);
        let mesh4 = build_structured_cube(4, &BoxDomain::unit());
        assert!((mesh_size(&mesh4) - 3f64.sqrt() / 4.0).abs() < 1e-14);
    }

    #[test]
    fn boundary_faces_point_outward() {
        let mesh = build_structured_cube(3, &BoxDomain::unit());
        let center = Vec3::repeat(0.5);
        for f in mesh.boundary_faces() {
            let g = mesh.face_geometry(f);
            assert!((g.barycenter - center).dot(&g.normal) > 0.0);
            assert_eq!(mesh.face_cells(f)[0].1, 1);
        }
    }

    #[test]
    fn side_tags() {
        let mesh = build_structured_cube(2, &BoxDomain::unit());
        for f in mesh.boundary_faces() {
            let x = mesh.face_geometry(f).barycenter;
            let expected = match mesh.boundary_tag(f).unwrap() {
                "xmin" => x.x == 0.0,
                "xmax" => x.x == 1.0,
                "ymin" => x.y == 0.0,
                "ymax" => x.y == 1.0,
                "zmin" => x.z == 0.0,
                "zmax" => x.z == 1.0,
                t => panic!("unexpected tag {t}"),
            };
            assert!(expected);
        }
    }
}
