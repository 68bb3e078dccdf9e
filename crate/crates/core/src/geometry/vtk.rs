//! VTK legacy ASCII output with `VTK_POLYHEDRON` cells.

use std::io::{self, Write};

use super::PolyMesh;
use crate::{Mat3, Vec3};

const VTK_POLYHEDRON: u32 = 42;

/// One named per-cell field.
#[derive(Clone, Debug)]
pub enum VtkCellData {
    Scalars(String, Vec<f64>),
    Vectors(String, Vec<Vec3>),
    Tensors(String, Vec<Mat3>),
}

impl VtkCellData {
    fn len(&self) -> usize {
        match self {
            Self::Scalars(_, v) => v.len(),
            Self::Vectors(_, v) => v.len(),
            Self::Tensors(_, v) => v.len(),
        }
    }
}

/// Writes `mesh` with the given cell data. `points` overrides the vertex
/// coordinates (e.g. a deformed configuration).
pub fn write_vtk<W: Write>(
    mesh: &PolyMesh,
    points: Option<&[Vec3]>,
    data: &[VtkCellData],
    title: &str,
    mut out: W,
) -> io::Result<()> {
    let points = points.unwrap_or(mesh.vertices());
    if points.len() != mesh.num_vertices() {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            "point array does not match the mesh vertex count",
        ));
    }
    if let Some(d) = data.iter().find(|d| d.len() != mesh.num_cells()) {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            format!("cell data of length {} on {} cells", d.len(), mesh.num_cells()),
        ));
    }

    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "{}", title.lines().next().unwrap_or(""))?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(out, "POINTS {} double", points.len())?;
    for p in points {
        writeln!(out, "{:.16e} {:.16e} {:.16e}", p.x, p.y, p.z)?;
    }

    // each row: L nf (k v1 .. vk) ..., with faces listed outward
    let rows: Vec<Vec<usize>> = mesh
        .cells()
        .iter()
        .map(|cell| {
            let mut row = vec![0, cell.len()];
            for of in cell {
                let face = mesh.face(of.face);
                row.push(face.len());
                if of.sign > 0 {
                    row.extend(face);
                } else {
                    row.extend(face.iter().rev());
                }
            }
            row[0] = row.len() - 1;
            row
        })
        .collect();
    let size: usize = rows.iter().map(Vec::len).sum();
    writeln!(out, "CELLS {} {}", rows.len(), size)?;
    for row in &rows {
        let line: Vec<String> = row.iter().map(usize::to_string).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    writeln!(out, "CELL_TYPES {}", rows.len())?;
    for _ in &rows {
        writeln!(out, "{VTK_POLYHEDRON}")?;
    }

    if !data.is_empty() {
        writeln!(out, "CELL_DATA {}", mesh.num_cells())?;
    }
    for d in data {
        match d {
            VtkCellData::Scalars(name, v) => {
                writeln!(out, "SCALARS {name} double 1")?;
                writeln!(out, "LOOKUP_TABLE default")?;
                for x in v {
                    writeln!(out, "{x:.16e}")?;
                }
            }
            VtkCellData::Vectors(name, v) => {
                writeln!(out, "VECTORS {name} double")?;
                for x in v {
                    writeln!(out, "{:.16e} {:.16e} {:.16e}", x.x, x.y, x.z)?;
                }
            }
            VtkCellData::Tensors(name, v) => {
                writeln!(out, "TENSORS {name} double")?;
                for t in v {
                    for i in 0..3 {
                        writeln!(out, "{:.16e} {:.16e} {:.16e}", t[(i, 0)], t[(i, 1)], t[(i, 2)])?;
                    }
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_structured_cube, BoxDomain};

    #[test]
    fn hexahedron_layout() {
        let mesh = build_structured_cube(1, &BoxDomain::unit());
        let mut buf = Vec::new();
        let data = [VtkCellData::Scalars("pressure".into(), vec![1.5])];
        write_vtk(&mesh, None, &data, "cube", &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        // 1 + 6 * (1 + 4) = 31 entries after the leading count
        assert!(text.contains("CELLS 1 32\n31 6 4 "));
        assert!(text.contains("CELL_TYPES 1\n42\n"));
        assert!(text.contains("SCALARS pressure double 1"));
    }

    #[test]
    fn rejects_wrong_lengths() {
        let mesh = build_structured_cube(1, &BoxDomain::unit());
        let data = [VtkCellData::Scalars("p".into(), vec![1.0, 2.0])];
        assert!(write_vtk(&mesh, None, &data, "x", io::sink()).is_err());
    }
}
