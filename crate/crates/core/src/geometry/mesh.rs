use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::Vec3;

/// Relative planarity tolerance: faces whose vertices deviate from the
/// least-squares plane by more than this (times `h_f`) are projected.
const PLANARITY_TOL: f64 = 1e-10;
/// Beyond this relative deviation a face is rejected outright.
const PLANARITY_REJECT: f64 = 1e-3;
const DEGENERATE_AREA: f64 = 1e-14;
const CLOSURE_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{what} index {index} out of range (len {len})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },
    #[error("face {face} has fewer than 3 vertices")]
    ShortFace { face: usize },
    #[error("cell {cell} has fewer than 4 faces")]
    ShortCell { cell: usize },
    #[error("face {face} is degenerate (area {area:e})")]
    DegenerateFace { face: usize, area: f64 },
    #[error("face {face} is not planar (relative deviation {deviation:e})")]
    NonPlanarFace { face: usize, deviation: f64 },
    #[error("face {face} is shared by {count} cells (non-manifold)")]
    NonManifoldFace { face: usize, count: usize },
    #[error("face {face} is not used by any cell")]
    OrphanFace { face: usize },
    #[error("face {face} is used twice with the same orientation sign")]
    InconsistentOrientation { face: usize },
    #[error("cell {cell} has non-positive volume {volume:e}")]
    NegativeVolume { cell: usize, volume: f64 },
    #[error("cell {cell} is not a closed surface (defect {defect:e})")]
    OpenCell { cell: usize, defect: f64 },
    #[error("boundary face {face} has no tag")]
    UntaggedBoundaryFace { face: usize },
    #[error("interior face {face} carries boundary tag {tag:?}")]
    TaggedInteriorFace { face: usize, tag: String },
    #[error("unknown tag {0:?}")]
    UnknownTag(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// A face reference inside a cell together with the sign that turns the
/// stored face normal into the cell's outward normal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OrientedFace {
    pub face: usize,
    pub sign: i8,
}

impl OrientedFace {
    pub fn new(face: usize, sign: i8) -> Self {
        debug_assert!(sign == 1 || sign == -1);
        Self { face, sign }
    }

    #[inline]
    pub fn signf(&self) -> f64 {
        f64::from(self.sign)
    }
}

/// Geometric data of a planar polygonal face.
#[derive(Clone, Debug)]
pub struct FaceGeometry {
    pub area: f64,
    pub barycenter: Vec3,
    /// Unit normal, counter-clockwise w.r.t. the stored vertex loop.
    pub normal: Vec3,
    /// `t1` along the first stored edge, `t2 = n x t1`.
    pub tangents: [Vec3; 2],
    pub diameter: f64,
    /// Vertex positions, projected on the face plane when the input was
    /// slightly warped.
    pub points: Vec<Vec3>,
    /// Largest vertex distance to the fitted plane, relative to `diameter`.
    pub planarity_defect: f64,
}

/// Geometric data of a polyhedral cell.
#[derive(Clone, Debug)]
pub struct CellGeometry {
    pub volume: f64,
    pub barycenter: Vec3,
    pub diameter: f64,
    /// Volume obtained by summing the fan tetrahedra; equals `volume` up to
    /// rounding for planar faces.
    pub fan_volume: f64,
    /// Distinct vertex indices of the cell, sorted.
    pub vertices: Vec<usize>,
}

/// Polyhedral mesh: vertices, polygonal faces, cells as signed face lists and
/// boundary tags. Immutable once built; all geometry is precomputed.
#[derive(Clone, Debug)]
pub struct PolyMesh {
    vertices: Vec<Vec3>,
    faces: Vec<Vec<usize>>,
    cells: Vec<Vec<OrientedFace>>,
    boundary_tags: BTreeMap<usize, String>,
    face_cells: Vec<Vec<(usize, i8)>>,
    face_geometry: Vec<FaceGeometry>,
    cell_geometry: Vec<CellGeometry>,
}

impl PolyMesh {
    /// Builds and validates a mesh with explicit orientation signs.
    pub fn new(
        vertices: Vec<Vec3>,
        faces: Vec<Vec<usize>>,
        cells: Vec<Vec<OrientedFace>>,
        boundary_tags: BTreeMap<usize, String>,
    ) -> Result<Self, MeshError> {
        let cells = cells
            .into_iter()
            .map(|c| c.into_iter().map(|of| (of.face, Some(of.sign))).collect())
            .collect();
        Self::from_parts(vertices, faces, cells, boundary_tags)
    }

    /// Builds a mesh whose orientation signs are recomputed from geometry:
    /// a face is outward for a cell if its normal points away from the
    /// cell's vertex centroid.
    pub fn with_inferred_orientation(
        vertices: Vec<Vec3>,
        faces: Vec<Vec<usize>>,
        cells: Vec<Vec<usize>>,
        boundary_tags: BTreeMap<usize, String>,
    ) -> Result<Self, MeshError> {
        let cells = cells
            .into_iter()
            .map(|c| c.into_iter().map(|f| (f, None)).collect())
            .collect();
        Self::from_parts(vertices, faces, cells, boundary_tags)
    }

    /// Cells given as `(face, optional sign)`; a cell with any missing sign
    /// has all of its signs inferred.
    pub(crate) fn from_parts(
        vertices: Vec<Vec3>,
        faces: Vec<Vec<usize>>,
        cells: Vec<Vec<(usize, Option<i8>)>>,
        boundary_tags: BTreeMap<usize, String>,
    ) -> Result<Self, MeshError> {
        for (f, face) in faces.iter().enumerate() {
            if face.len() < 3 {
                return Err(MeshError::ShortFace { face: f });
            }
            for &v in face {
                if v >= vertices.len() {
                    return Err(MeshError::IndexOutOfRange {
                        what: "vertex",
                        index: v,
                        len: vertices.len(),
                    });
                }
            }
        }
        let face_geometry = faces
            .iter()
            .enumerate()
            .map(|(f, face)| compute_face_geometry(&vertices, face, f))
            .collect::<Result<Vec<_>, _>>()?;

        let mut oriented = Vec::with_capacity(cells.len());
        for (c, cell) in cells.iter().enumerate() {
            if cell.len() < 4 {
                return Err(MeshError::ShortCell { cell: c });
            }
            for &(f, _) in cell {
                if f >= faces.len() {
                    return Err(MeshError::IndexOutOfRange {
                        what: "face",
                        index: f,
                        len: faces.len(),
                    });
                }
            }
            if cell.iter().all(|(_, s)| s.is_some()) {
                oriented.push(
                    cell.iter()
                        .map(|&(f, s)| OrientedFace::new(f, s.unwrap()))
                        .collect::<Vec<_>>(),
                );
            } else {
                let verts: BTreeSet<usize> = cell
                    .iter()
                    .flat_map(|&(f, _)| faces[f].iter().copied())
                    .collect();
                let center =
                    verts.iter().map(|&v| vertices[v]).sum::<Vec3>() / verts.len() as f64;
                oriented.push(
                    cell.iter()
                        .map(|&(f, _)| {
                            let g = &face_geometry[f];
                            let s = if (g.barycenter - center).dot(&g.normal) >= 0.0 {
                                1
                            } else {
                                -1
                            };
                            OrientedFace::new(f, s)
                        })
                        .collect(),
                );
            }
        }

        let mut face_cells: Vec<Vec<(usize, i8)>> = vec![Vec::new(); faces.len()];
        for (c, cell) in oriented.iter().enumerate() {
            for of in cell {
                face_cells[of.face].push((c, of.sign));
            }
        }
        for (f, fc) in face_cells.iter().enumerate() {
            match fc.len() {
                0 => return Err(MeshError::OrphanFace { face: f }),
                1 => {
                    if !boundary_tags.contains_key(&f) {
                        return Err(MeshError::UntaggedBoundaryFace { face: f });
                    }
                }
                2 => {
                    if fc[0].1 == fc[1].1 {
                        return Err(MeshError::InconsistentOrientation { face: f });
                    }
                    if let Some(tag) = boundary_tags.get(&f) {
                        return Err(MeshError::TaggedInteriorFace {
                            face: f,
                            tag: tag.clone(),
                        });
                    }
                }
                n => return Err(MeshError::NonManifoldFace { face: f, count: n }),
            }
        }
        for &f in boundary_tags.keys() {
            if f >= faces.len() {
                return Err(MeshError::IndexOutOfRange {
                    what: "boundary face",
                    index: f,
                    len: faces.len(),
                });
            }
        }

        let cell_geometry = oriented
            .iter()
            .enumerate()
            .map(|(c, cell)| compute_cell_geometry(&vertices, &faces, &face_geometry, cell, c))
            .collect::<Result<Vec<_>, _>>()?;

        Ok(Self {
            vertices,
            faces,
            cells: oriented,
            boundary_tags,
            face_cells,
            face_geometry,
            cell_geometry,
        })
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn face(&self, f: usize) -> &[usize] {
        &self.faces[f]
    }

    pub fn cells(&self) -> &[Vec<OrientedFace>] {
        &self.cells
    }

    pub fn cell(&self, c: usize) -> &[OrientedFace] {
        &self.cells[c]
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn boundary_tags(&self) -> &BTreeMap<usize, String> {
        &self.boundary_tags
    }

    pub fn boundary_tag(&self, f: usize) -> Option<&str> {
        self.boundary_tags.get(&f).map(String::as_str)
    }

    /// Distinct boundary tag labels.
    pub fn tags(&self) -> BTreeSet<&str> {
        self.boundary_tags.values().map(String::as_str).collect()
    }

    /// Cells incident to a face with their orientation signs.
    pub fn face_cells(&self, f: usize) -> &[(usize, i8)] {
        &self.face_cells[f]
    }

    pub fn is_boundary_face(&self, f: usize) -> bool {
        self.face_cells[f].len() == 1
    }

    pub fn boundary_faces(&self) -> impl Iterator<Item = usize> + '_ {
        self.boundary_tags.keys().copied()
    }

    pub fn face_geometry(&self, f: usize) -> &FaceGeometry {
        &self.face_geometry[f]
    }

    pub fn cell_geometry(&self, c: usize) -> &CellGeometry {
        &self.cell_geometry[c]
    }

    /// Replaces the tag of every face currently tagged `parent` whose
    /// barycenter satisfies `select` by `name`.
    pub fn retag<F>(mut self, parent: &str, name: &str, select: F) -> Result<Self, MeshError>
    where
        F: Fn(&Vec3) -> bool,
    {
        if !self.boundary_tags.values().any(|t| t == parent) {
            return Err(MeshError::UnknownTag(parent.to_string()));
        }
        for (&f, tag) in self.boundary_tags.iter_mut() {
            if tag == parent && select(&self.face_geometry[f].barycenter) {
                *tag = name.to_string();
            }
        }
        Ok(self)
    }
}

fn compute_face_geometry(
    vertices: &[Vec3],
    face: &[usize],
    index: usize,
) -> Result<FaceGeometry, MeshError> {
    let pts: Vec<Vec3> = face.iter().map(|&v| vertices[v]).collect();
    let mut diameter: f64 = 0.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            diameter = diameter.max((pts[i] - pts[j]).norm());
        }
    }
    // Newell area vector
    let p0 = pts[0];
    let mut area_vec = Vec3::zeros();
    for i in 1..pts.len() - 1 {
        area_vec += (pts[i] - p0).cross(&(pts[i + 1] - p0));
    }
    area_vec *= 0.5;
    let area_norm = area_vec.norm();
    if area_norm < DEGENERATE_AREA * diameter * diameter || area_norm == 0.0 {
        return Err(MeshError::DegenerateFace {
            face: index,
            area: area_norm,
        });
    }
    let normal = area_vec / area_norm;

    let center = pts.iter().sum::<Vec3>() / pts.len() as f64;
    let defect = pts
        .iter()
        .map(|p| (p - center).dot(&normal).abs())
        .fold(0.0, f64::max)
        / diameter;
    if defect > PLANARITY_REJECT {
        return Err(MeshError::NonPlanarFace {
            face: index,
            deviation: defect,
        });
    }
    let points: Vec<Vec3> = if defect > PLANARITY_TOL {
        pts.iter()
            .map(|p| p - normal * (p - center).dot(&normal))
            .collect()
    } else {
        pts
    };

    let p0 = points[0];
    let mut area = 0.0;
    let mut moment = Vec3::zeros();
    for i in 1..points.len() - 1 {
        let a = points[i] - p0;
        let b = points[i + 1] - p0;
        let tri = 0.5 * a.cross(&b).dot(&normal);
        area += tri;
        moment += tri * (a + b) / 3.0;
    }
    if area < DEGENERATE_AREA * diameter * diameter {
        return Err(MeshError::DegenerateFace { face: index, area });
    }
    let barycenter = p0 + moment / area;

    let edge = points[1] - points[0];
    let t1 = (edge - normal * edge.dot(&normal)).normalize();
    let t2 = normal.cross(&t1);

    Ok(FaceGeometry {
        area,
        barycenter,
        normal,
        tangents: [t1, t2],
        diameter,
        points,
        planarity_defect: defect,
    })
}

fn compute_cell_geometry(
    vertices: &[Vec3],
    faces: &[Vec<usize>],
    face_geometry: &[FaceGeometry],
    cell: &[OrientedFace],
    index: usize,
) -> Result<CellGeometry, MeshError> {
    let verts: BTreeSet<usize> = cell
        .iter()
        .flat_map(|of| faces[of.face].iter().copied())
        .collect();
    let verts: Vec<usize> = verts.into_iter().collect();
    let center = verts.iter().map(|&v| vertices[v]).sum::<Vec3>() / verts.len() as f64;
    let mut diameter: f64 = 0.0;
    for (i, &a) in verts.iter().enumerate() {
        for &b in &verts[i + 1..] {
            diameter = diameter.max((vertices[a] - vertices[b]).norm());
        }
    }

    let mut closure = Vec3::zeros();
    let mut volume = 0.0;
    let mut fan_volume = 0.0;
    let mut moment = Vec3::zeros();
    for of in cell {
        let g = &face_geometry[of.face];
        let s = of.signf();
        closure += s * g.area * g.normal;
        volume += s * g.area * (g.barycenter - center).dot(&g.normal) / 3.0;
        let xf = g.barycenter - center;
        let n = g.points.len();
        for i in 0..n {
            let a = g.points[i] - center;
            let b = g.points[(i + 1) % n] - center;
            let v = s * xf.dot(&a.cross(&b)) / 6.0;
            fan_volume += v;
            moment += v * (xf + a + b) / 4.0;
        }
    }
    let defect = closure.norm();
    if defect > CLOSURE_TOL * diameter * diameter {
        return Err(MeshError::OpenCell {
            cell: index,
            defect,
        });
    }
    if volume <= 0.0 || fan_volume <= 0.0 {
        return Err(MeshError::NegativeVolume {
            cell: index,
            volume: volume.min(fan_volume),
        });
    }
    Ok(CellGeometry {
        volume,
        barycenter: center + moment / fan_volume,
        diameter,
        fan_volume,
        vertices: verts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{single_hexahedron, single_tetrahedron};

    #[test]
    fn unit_square_face() {
        let mesh = single_hexahedron(1.0);
        let bottom = (0..mesh.num_faces())
            .find(|&f| mesh.face_geometry(f).barycenter.z.abs() < 1e-14)
            .unwrap();
        let g = mesh.face_geometry(bottom);
        assert!((g.area - 1.0).abs() < 1e-14);
        assert!((g.barycenter - Vec3::new(0.5, 0.5, 0.0)).norm() < 1e-14);
        assert!((g.diameter - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn tangent_frame_is_orthonormal() {
        let mesh = single_tetrahedron();
        for f in 0..mesh.num_faces() {
            let g = mesh.face_geometry(f);
            let [t1, t2] = g.tangents;
            assert!((t1.norm() - 1.0).abs() < 1e-14);
            assert!((t2.norm() - 1.0).abs() < 1e-14);
            assert!(t1.dot(&g.normal).abs() < 1e-14);
            assert!(t1.dot(&t2).abs() < 1e-14);
            assert!((t1.cross(&t2) - g.normal).norm() <= 1e-12);
        }
    }

    #[test]
    fn unit_cube_cell() {
        let mesh = single_hexahedron(1.0);
        let g = mesh.cell_geometry(0);
        assert!((g.volume - 1.0).abs() < 1e-14);
        assert!((g.barycenter - Vec3::new(0.5, 0.5, 0.5)).norm() < 1e-14);
        assert!((g.diameter - 3f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn regular_tetrahedron_volume() {
        let mesh = single_tetrahedron();
        let g = mesh.cell_geometry(0);
        let exact = 1.0 / (6.0 * 2f64.sqrt());
        assert!((g.volume - exact).abs() < 1e-15);
        assert!((g.fan_volume - g.volume).abs() <= 1e-12 * g.volume);
        assert!((g.diameter - 1.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_face_rejected() {
        let v = vec![
            Vec3::zeros(),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(2.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
        ];
        let faces = vec![vec![0, 1, 2], vec![0, 1, 3], vec![1, 2, 3], vec![0, 2, 3]];
        let cells = vec![vec![0, 1, 2, 3]];
        let tags = (0..4).map(|f| (f, "b".to_string())).collect();
        let err = PolyMesh::with_inferred_orientation(v, faces, cells, tags).unwrap_err();
        assert!(matches!(err, MeshError::DegenerateFace { face: 0, .. }));
    }

    #[test]
    fn flipped_sign_gives_open_or_negative_cell() {
        let mesh = single_tetrahedron();
        let mut cell: Vec<OrientedFace> = mesh.cell(0).to_vec();
        cell[0].sign = -cell[0].sign;
        let err = PolyMesh::new(
            mesh.vertices().to_vec(),
            mesh.faces().to_vec(),
            vec![cell],
            mesh.boundary_tags().clone(),
        )
        .unwrap_err();
        assert!(matches!(err, MeshError::OpenCell { .. }));
    }

    #[test]
    fn untagged_boundary_face() {
        let mesh = single_tetrahedron();
        let mut tags = mesh.boundary_tags().clone();
        tags.remove(&2);
        let err = PolyMesh::new(
            mesh.vertices().to_vec(),
            mesh.faces().to_vec(),
            mesh.cells().to_vec(),
            tags,
        )
        .unwrap_err();
        assert!(matches!(err, MeshError::UntaggedBoundaryFace { face: 2 }));
    }
}
