use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::DVector;

use super::ErrorReport;
use crate::geometry::{write_vtk, PolyMesh, VtkCellData};
use crate::spaces::rm_basis;
use crate::system::{Discretization, State};
use crate::{Error, Mat3, Vec3, Vec6};

/// Per-cell fields of a state.
#[derive(Clone, Debug, PartialEq)]
pub struct CellOutput {
    pub pressure: Vec<f64>,
    /// RM field at the cell barycenter.
    pub displacement: Vec<Vec3>,
    pub stress: Vec<Mat3>,
    pub velocity: Vec<Vec3>,
}

pub fn cell_output(mesh: &PolyMesh, disc: &Discretization, state: &State) -> CellOutput {
    let n = mesh.num_cells();
    let mut out = CellOutput {
        pressure: state.p.clone(),
        displacement: Vec::with_capacity(n),
        stress: Vec::with_capacity(n),
        velocity: Vec::with_capacity(n),
    };
    for (c, lb) in disc.blocks.iter().enumerate() {
        let g = mesh.cell_geometry(c);
        let coeffs = Vec6::from_column_slice(&state.u[6 * c..6 * c + 6]);
        out.displacement.push(rm_basis(g).combine(&coeffs, &g.barycenter));
        let sig = DVector::from_iterator(
            6 * lb.faces.len(),
            lb.faces
                .iter()
                .flat_map(|of| state.sigma[6 * of.face..6 * of.face + 6].iter().copied()),
        );
        let vel = DVector::from_iterator(
            lb.faces.len(),
            lb.faces.iter().map(|of| state.w[of.face]),
        );
        out.stress.push(lb.project_stress(&sig));
        out.velocity.push(lb.project_velocity(&vel));
    }
    out
}

/// Vertex displacement: mean over the cells sharing a vertex of each cell's
/// RM field evaluated at that vertex.
pub fn vertex_displacement(mesh: &PolyMesh, state: &State) -> Vec<Vec3> {
    let mut sum = vec![Vec3::zeros(); mesh.num_vertices()];
    let mut count = vec![0usize; mesh.num_vertices()];
    for c in 0..mesh.num_cells() {
        let g = mesh.cell_geometry(c);
        let rm = rm_basis(g);
        let coeffs = Vec6::from_column_slice(&state.u[6 * c..6 * c + 6]);
        for &v in &g.vertices {
            sum[v] += rm.combine(&coeffs, &mesh.vertices()[v]);
            count[v] += 1;
        }
    }
    sum.iter()
        .zip(&count)
        .map(|(s, &k)| if k == 0 { Vec3::zeros() } else { s / k as f64 })
        .collect()
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Writes through a temporary file in the target directory, then renames.
fn write_atomic<F>(path: &Path, body: F) -> Result<(), Error>
where
    F: FnOnce(&mut BufWriter<&mut tempfile::NamedTempFile>) -> std::io::Result<()>,
{
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_error(path, e))?;
    {
        let mut w = BufWriter::new(&mut tmp);
        body(&mut w).map_err(|e| io_error(path, e))?;
        w.flush().map_err(|e| io_error(path, e))?;
    }
    tmp.persist(path).map_err(|e| io_error(path, e.error))?;
    Ok(())
}

/// CSV with one row per mesh; rates are empty on the first row.
pub fn write_errors_csv(report: &ErrorReport, path: impl AsRef<Path>) -> Result<(), Error> {
    let rates = report.rates();
    write_atomic(path.as_ref(), |w| {
        writeln!(w, "h,E_u,E_sigma,E_p,E_w,rate_u,rate_sigma,rate_p,rate_w")?;
        for (row, r) in report.rows.iter().zip(&rates) {
            let e = row.values();
            write!(w, "{:e},{:e},{:e},{:e},{:e}", row.h, e[0], e[1], e[2], e[3])?;
            match r {
                Some(r) => writeln!(w, ",{:.6},{:.6},{:.6},{:.6}", r[0], r[1], r[2], r[3])?,
                None => writeln!(w, ",,,,")?,
            }
        }
        Ok(())
    })
}

/// VTK file of `state`; with `deformed`, vertices are moved by
/// [`vertex_displacement`] scaled by the given factor.
pub fn write_state_vtk(
    mesh: &PolyMesh,
    disc: &Discretization,
    state: &State,
    deformed: Option<f64>,
    path: impl AsRef<Path>,
) -> Result<(), Error> {
    let out = cell_output(mesh, disc, state);
    let data = [
        VtkCellData::Scalars("pressure".into(), out.pressure),
        VtkCellData::Vectors("displacement".into(), out.displacement),
        VtkCellData::Tensors("stress".into(), out.stress),
        VtkCellData::Vectors("velocity".into(), out.velocity),
    ];
    let points: Option<Vec<Vec3>> = deformed.map(|scale| {
        vertex_displacement(mesh, state)
            .iter()
            .zip(mesh.vertices())
            .map(|(d, x)| x + scale * d)
            .collect()
    });
    let title = format!("biotvem t = {}", state.t);
    write_atomic(path.as_ref(), |w| {
        write_vtk(mesh, points.as_deref(), &data, &title, w)
    })
}
