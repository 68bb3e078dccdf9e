//! The `polymesh 1` text format.
//!
//! ```text
//! polymesh 1
//! vertices N
//! x y z            (N lines)
//! faces F
//! k v1 .. vk       (F lines, 0-based vertex indices)
//! cells C
//! m s1f1 .. smfm   (C lines, 0-based face indices with optional + / - sign)
//! boundary B
//! face tag         (B lines)
//! ```
//!
//! Blank lines and anything after `#` are ignored. A cell whose face
//! entries carry no explicit sign gets its orientation inferred from
//! geometry.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use super::{MeshError, PolyMesh};
use crate::Vec3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MeshFormat {
    #[default]
    PolyMesh,
}

impl MeshFormat {
    /// Guesses the format from a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "polymesh" | "pmesh" | "txt" => Some(Self::PolyMesh),
            _ => None,
        }
    }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
            line: 0,
        }
    }

    fn next_tokens(&mut self) -> Option<Vec<&'a str>> {
        for (i, raw) in self.inner.by_ref() {
            let content = raw.split('#').next().unwrap_or("");
            let toks: Vec<&str> = content.split_whitespace().collect();
            if !toks.is_empty() {
                self.line = i + 1;
                return Some(toks);
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<Vec<&'a str>, MeshError> {
        let line = self.line;
        self.next_tokens().ok_or_else(|| MeshError::Parse {
            line,
            message: format!("unexpected end of file, expected {what}"),
        })
    }

    fn err(&self, message: impl Into<String>) -> MeshError {
        MeshError::Parse {
            line: self.line,
            message: message.into(),
        }
    }

    fn header(&mut self, name: &str) -> Result<usize, MeshError> {
        let t = self.expect(name)?;
        if t.len() != 2 || t[0] != name {
            return Err(self.err(format!("expected `{name} <count>`")));
        }
        self.number(t[1])
    }

    fn number<T: std::str::FromStr>(&self, tok: &str) -> Result<T, MeshError> {
        tok.parse()
            .map_err(|_| self.err(format!("invalid number {tok:?}")))
    }
}

/// Parses a mesh from text.
pub fn parse_mesh(text: &str, format: MeshFormat) -> Result<PolyMesh, MeshError> {
    match format {
        MeshFormat::PolyMesh => parse_polymesh(text),
    }
}

fn parse_polymesh(text: &str) -> Result<PolyMesh, MeshError> {
    let mut lines = Lines::new(text);
    let head = lines.expect("header")?;
    if head != ["polymesh", "1"] {
        return Err(lines.err("expected header `polymesh 1`"));
    }

    let nv: usize = lines.header("vertices")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let t = lines.expect("vertex")?;
        if t.len() != 3 {
            return Err(lines.err("vertex needs 3 coordinates"));
        }
        let x: f64 = lines.number(t[0])?;
        let y: f64 = lines.number(t[1])?;
        let z: f64 = lines.number(t[2])?;
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(lines.err("non-finite vertex coordinate"));
        }
        vertices.push(Vec3::new(x, y, z));
    }

    let nf: usize = lines.header("faces")?;
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let t = lines.expect("face")?;
        let k: usize = lines.number(t[0])?;
        if t.len() != k + 1 {
            return Err(lines.err(format!("face declares {k} vertices, found {}", t.len() - 1)));
        }
        let face = t[1..]
            .iter()
            .map(|s| lines.number(s))
            .collect::<Result<Vec<usize>, _>>()?;
        faces.push(face);
    }

    let nc: usize = lines.header("cells")?;
    let mut cells = Vec::with_capacity(nc);
    for _ in 0..nc {
        let t = lines.expect("cell")?;
        let m: usize = lines.number(t[0])?;
        if t.len() != m + 1 {
            return Err(lines.err(format!("cell declares {m} faces, found {}", t.len() - 1)));
        }
        let mut cell = Vec::with_capacity(m);
        for s in &t[1..] {
            let (sign, digits) = match s.as_bytes()[0] {
                b'+' => (Some(1i8), &s[1..]),
                b'-' => (Some(-1i8), &s[1..]),
                _ => (None, *s),
            };
            let f: usize = lines.number(digits)?;
            if f >= nf {
                return Err(MeshError::IndexOutOfRange {
                    what: "face",
                    index: f,
                    len: nf,
                });
            }
            cell.push((f, sign));
        }
        if cell.iter().any(|e| e.1.is_some()) && cell.iter().any(|e| e.1.is_none()) {
            return Err(lines.err("cell mixes signed and unsigned face entries"));
        }
        cells.push(cell);
    }

    let mut tags = BTreeMap::new();
    if let Some(t) = lines.next_tokens() {
        if t.len() != 2 || t[0] != "boundary" {
            return Err(lines.err("expected `boundary <count>`"));
        }
        let nb: usize = lines.number(t[1])?;
        for _ in 0..nb {
            let t = lines.expect("boundary entry")?;
            if t.len() != 2 {
                return Err(lines.err("boundary entry needs `face tag`"));
            }
            let f: usize = lines.number(t[0])?;
            if f >= nf {
                return Err(MeshError::IndexOutOfRange {
                    what: "face",
                    index: f,
                    len: nf,
                });
            }
            if tags.insert(f, t[1].to_string()).is_some() {
                return Err(lines.err(format!("face {f} tagged twice")));
            }
        }
        if lines.next_tokens().is_some() {
            return Err(lines.err("trailing content after boundary section"));
        }
    }

    PolyMesh::from_parts(vertices, faces, cells, tags)
}

/// Reads a mesh file.
pub fn load_mesh(path: impl AsRef<Path>, format: MeshFormat) -> Result<PolyMesh, MeshError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| MeshError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_mesh(&text, format)
}

/// Writes `mesh` in `polymesh 1` format with explicit orientation signs.
pub fn write_mesh<W: Write>(mesh: &PolyMesh, mut out: W) -> std::io::Result<()> {
    writeln!(out, "polymesh 1")?;
    writeln!(out, "vertices {}", mesh.num_vertices())?;
    for v in mesh.vertices() {
        writeln!(out, "{:e} {:e} {:e}", v.x, v.y, v.z)?;
    }
    writeln!(out, "faces {}", mesh.num_faces())?;
    for face in mesh.faces() {
        write!(out, "{}", face.len())?;
        for v in face {
            write!(out, " {v}")?;
        }
        writeln!(out)?;
    }
    writeln!(out, "cells {}", mesh.num_cells())?;
    for cell in mesh.cells() {
        write!(out, "{}", cell.len())?;
        for of in cell {
            let s = if of.sign > 0 { '+' } else { '-' };
            write!(out, " {s}{}", of.face)?;
        }
        writeln!(out)?;
    }
    writeln!(out, "boundary {}", mesh.boundary_tags().len())?;
    for (f, tag) in mesh.boundary_tags() {
        writeln!(out, "{f} {tag}")?;
    }
    Ok(())
}

/// Writes a mesh file atomically.
pub fn save_mesh(mesh: &PolyMesh, path: impl AsRef<Path>) -> Result<(), MeshError> {
    let path = path.as_ref();
    let io_err = |source| MeshError::Io {
        path: path.display().to_string(),
        source,
    };
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    write_mesh(mesh, std::io::BufWriter::new(tmp.as_file_mut())).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_structured_cube, BoxDomain};

    const TET: &str = "polymesh 1
vertices 4
0 0 0
1 0 0
0 1 0
0 0 1
faces 4
3 0 2 1
3 0 1 3
3 0 3 2
3 1 2 3
cells 1
4 0 1 2 3   # unsigned: orientation is inferred
boundary 4
0 bottom
1 side
2 side
3 side
";

    #[test]
    fn parses_tetrahedron() {
        let mesh = parse_mesh(TET, MeshFormat::PolyMesh).unwrap();
        assert_eq!(mesh.num_cells(), 1);
        assert!((mesh.cell_geometry(0).volume - 1.0 / 6.0).abs() < 1e-15);
        assert!(mesh.cell(0).iter().all(|of| of.sign == 1));
        assert_eq!(mesh.boundary_tag(0), Some("bottom"));
    }

    #[test]
    fn flipped_face_is_reoriented() {
        let text = TET.replace("3 1 2 3", "3 3 2 1");
        let mesh = parse_mesh(&text, MeshFormat::PolyMesh).unwrap();
        assert_eq!(mesh.cell(0)[3].sign, -1);
    }

    #[test]
    fn rejects_bad_header() {
        let err = parse_mesh("polymesh 2\n", MeshFormat::PolyMesh).unwrap_err();
        assert!(matches!(err, MeshError::Parse { line: 1, .. }));
    }

    #[test]
    fn rejects_out_of_range_face() {
        let text = TET.replace("4 0 1 2 3 ", "4 0 1 2 7 ");
        let err = parse_mesh(&text, MeshFormat::PolyMesh).unwrap_err();
        assert!(matches!(err, MeshError::IndexOutOfRange { index: 7, .. }));
    }

    #[test]
    fn rejects_non_manifold_face() {
        // the same tetrahedron listed twice shares every face between two
        // cells with the same sign
        let text = TET.replace("cells 1\n4 0 1 2 3", "cells 3\n4 +0 +1 +2 +3\n4 +0 +1 +2 +3\n4 +0 +1 +2 +3");
        let err = parse_mesh(&text, MeshFormat::PolyMesh).unwrap_err();
        assert!(matches!(err, MeshError::NonManifoldFace { .. }), "{err}");
    }

    #[test]
    fn round_trip_structured() {
        let mesh = build_structured_cube(2, &BoxDomain::unit());
        let mut buf = Vec::new();
        write_mesh(&mesh, &mut buf).unwrap();
        let back = parse_mesh(std::str::from_utf8(&buf).unwrap(), MeshFormat::PolyMesh).unwrap();
        assert_eq!(back.faces(), mesh.faces());
        assert_eq!(back.cells(), mesh.cells());
        assert_eq!(back.boundary_tags(), mesh.boundary_tags());
        assert_eq!(back.vertices(), mesh.vertices());
    }

    #[test]
    fn save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cube.polymesh");
        let mesh = build_structured_cube(1, &BoxDomain::unit());
        save_mesh(&mesh, &path).unwrap();
        let back = load_mesh(&path, MeshFormat::PolyMesh).unwrap();
        assert_eq!(back.num_faces(), 6);
    }
}
