//! Shape-regularity proxies.
//!
//! Star-shapedness with respect to a ball is approximated by the largest ball
//! centered at the barycenter that fits inside the supporting planes
//! (cells) or edge lines (faces). The proxies are cheap and flag degenerate
//! elements; they do not certify star-shapedness.

use super::PolyMesh;
use crate::Vec3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellQuality {
    /// Distance from `x_E` to the nearest face plane, over `h_E`.
    pub inradius_ratio: f64,
    /// Smallest face inradius proxy among the cell's faces, over `h_E`.
    pub face_inradius_ratio: f64,
    /// Shortest edge of the cell over `h_E`.
    pub edge_ratio: f64,
}

impl CellQuality {
    fn min(&self) -> f64 {
        self.inradius_ratio
            .min(self.face_inradius_ratio)
            .min(self.edge_ratio)
    }
}

#[derive(Clone, Debug)]
pub struct MeshQualityReport {
    pub cells: Vec<CellQuality>,
    pub min_inradius_ratio: f64,
    pub min_face_inradius_ratio: f64,
    pub min_edge_ratio: f64,
    /// Estimated regularity constant: the smallest proxy ratio in the mesh.
    pub gamma: f64,
    /// Index of the cell attaining `gamma`.
    pub worst_cell: usize,
}

pub fn quality_report(mesh: &PolyMesh) -> MeshQualityReport {
    let cells: Vec<CellQuality> = (0..mesh.num_cells()).map(|c| cell_quality(mesh, c)).collect();
    let fold = |f: fn(&CellQuality) -> f64| cells.iter().map(f).fold(f64::INFINITY, f64::min);
    let (worst_cell, gamma) = cells
        .iter()
        .map(CellQuality::min)
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, g)| if g < acc.1 { (i, g) } else { acc });
    MeshQualityReport {
        min_inradius_ratio: fold(|q| q.inradius_ratio),
        min_face_inradius_ratio: fold(|q| q.face_inradius_ratio),
        min_edge_ratio: fold(|q| q.edge_ratio),
        gamma,
        worst_cell,
        cells,
    }
}

fn cell_quality(mesh: &PolyMesh, c: usize) -> CellQuality {
    let cg = mesh.cell_geometry(c);
    let h = cg.diameter;
    let mut inradius = f64::INFINITY;
    let mut face_inradius = f64::INFINITY;
    let mut min_edge = f64::INFINITY;
    for of in mesh.cell(c) {
        let g = mesh.face_geometry(of.face);
        inradius = inradius.min((cg.barycenter - g.barycenter).dot(&g.normal).abs());
        let n = g.points.len();
        for i in 0..n {
            let a = g.points[i];
            let b = g.points[(i + 1) % n];
            min_edge = min_edge.min((b - a).norm());
            face_inradius = face_inradius.min(distance_to_line(&g.barycenter, &a, &b));
        }
    }
    CellQuality {
        inradius_ratio: inradius / h,
        face_inradius_ratio: face_inradius / h,
        edge_ratio: min_edge / h,
    }
}

fn distance_to_line(p: &Vec3, a: &Vec3, b: &Vec3) -> f64 {
    let d = b - a;
    (p - a).cross(&d).norm() / d.norm()
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::geometry::{build_structured_cube, single_tetrahedron, BoxDomain};

    #[test]
    fn cube_ratios() {
        let r = quality_report(&build_structured_cube(2, &BoxDomain::unit()));
        let s3 = 3f64.sqrt();
        assert!((r.min_edge_ratio - 1.0 / s3).abs() < 1e-14);
        assert!((r.min_inradius_ratio - 0.5 / s3).abs() < 1e-14);
        assert!((r.min_face_inradius_ratio - 0.5 / s3).abs() < 1e-14);
        assert!((r.gamma - 0.5 / s3).abs() < 1e-14);
    }

    #[test]
    fn ratios_in_unit_interval() {
        let r = quality_report(&single_tetrahedron());
        for q in &r.cells {
            for v in [q.inradius_ratio, q.face_inradius_ratio, q.edge_ratio] {
                assert!(v > 0.0 && v <= 1.0);
            }
        }
        assert!((r.min_edge_ratio - 1.0).abs() < 1e-14);
    }

    #[test]
    fn tiny_edge_is_reported() {
        let eps = 1e-6;
        let v = |x: f64, y: f64, z: f64| Vec3::new(x, y, z);
        // unit cube with the vertical edge at (1, 1) cut off by a tiny facet
        let base = [
            v(0.0, 0.0, 0.0),
            v(1.0, 0.0, 0.0),
            v(1.0, 1.0 - eps / 2f64.sqrt() / 2.0, 0.0),
            v(1.0 - eps / 2f64.sqrt() / 2.0, 1.0, 0.0),
            v(0.0, 1.0, 0.0),
        ];
        let mut vertices: Vec<Vec3> = base.to_vec();
        vertices.extend(base.iter().map(|p| p + v(0.0, 0.0, 1.0)));
        let mut faces = vec![vec![4, 3, 2, 1, 0], vec![5, 6, 7, 8, 9]];
        for i in 0..5 {
            let j = (i + 1) % 5;
            faces.push(vec![i, j, j + 5, i + 5]);
        }
        let tags: BTreeMap<usize, String> = (0..7).map(|f| (f, "b".to_string())).collect();
        let mesh =
            PolyMesh::with_inferred_orientation(vertices, faces, vec![(0..7).collect()], tags)
                .unwrap();
        let r = quality_report(&mesh);
        let h = mesh.cell_geometry(0).diameter;
        let short = eps / 2.0;
        assert!((r.min_edge_ratio - short / h).abs() < 1e-9 * short / h);
        assert!(r.min_edge_ratio < 1e-6);
    }
}
