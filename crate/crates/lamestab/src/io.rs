//! Plain-text formats for meshes, displacement fields and scalar fields.
//!
//! Numbers are written with 17 significant digits so that a write/read
//! round trip reproduces every `f64` exactly.

use std::fs;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;
use std::sync::Arc;

use lamestab_core::elasticity::DisplacementField;
use lamestab_core::fields::ScalarField;
use lamestab_core::geometry::{Domain, DomainSpec, TriMesh};
use lamestab_core::Point;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Mismatch(String),
    #[error(transparent)]
    Core(#[from] lamestab_core::Error),
}

/// Nodes read back from a file may differ from the mesh nodes by this much,
/// relative to the domain scale.
pub const NODE_TOLERANCE: f64 = 1e-9;

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// `nv nt nb`, then `x y` per vertex, `i j k` per triangle and one boundary
/// loop index per line.
pub fn write_mesh(mesh: &TriMesh, out: &mut impl Write) -> io::Result<()> {
    let nb = mesh.boundary_loop().len();
    writeln!(
        out,
        "{} {} {}",
        mesh.vertex_count(),
        mesh.triangle_count(),
        nb
    )?;
    for p in mesh.vertices() {
        writeln!(out, "{} {}", num(p[0]), num(p[1]))?;
    }
    for t in mesh.triangles() {
        writeln!(out, "{} {} {}", t[0], t[1], t[2])?;
    }
    for v in mesh.boundary_loop() {
        writeln!(out, "{v}")?;
    }
    Ok(())
}

struct Lines<R> {
    inner: io::Lines<BufReader<R>>,
    line: usize,
}

impl<R: Read> Lines<R> {
    fn new(r: R) -> Self {
        Lines {
            inner: BufReader::new(r).lines(),
            line: 0,
        }
    }

    fn err(&self, msg: impl Into<String>) -> FormatError {
        FormatError::Parse {
            line: self.line,
            msg: msg.into(),
        }
    }

    fn next_fields(&mut self) -> Result<Vec<String>, FormatError> {
        loop {
            self.line += 1;
            match self.inner.next() {
                None => return Err(self.err("unexpected end of file")),
                Some(l) => {
                    let l = l?;
                    let f: Vec<String> = l.split_whitespace().map(String::from).collect();
                    if !f.is_empty() {
                        return Ok(f);
                    }
                }
            }
        }
    }

    fn numbers<T: std::str::FromStr>(&mut self, n: usize) -> Result<Vec<T>, FormatError> {
        let f = self.next_fields()?;
        if f.len() != n {
            return Err(self.err(format!("expected {n} fields, found {}", f.len())));
        }
        f.iter()
            .map(|s| {
                s.parse::<T>()
                    .map_err(|_| self.err(format!("cannot parse '{s}'")))
            })
            .collect()
    }

    fn finish(&mut self) -> Result<(), FormatError> {
        for l in self.inner.by_ref() {
            self.line += 1;
            if !l?.trim().is_empty() {
                return Err(FormatError::Parse {
                    line: self.line,
                    msg: "trailing data".into(),
                });
            }
        }
        Ok(())
    }
}

/// Reads a mesh written by [`write_mesh`]; the domain is not stored in the
/// file and must be supplied.
pub fn read_mesh(input: impl Read, spec: DomainSpec) -> Result<TriMesh, FormatError> {
    let mut lines = Lines::new(input);
    let head = lines.numbers::<usize>(3)?;
    let (nv, nt, nb) = (head[0], head[1], head[2]);
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let p = lines.numbers::<f64>(2)?;
        vertices.push([p[0], p[1]]);
    }
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let t = lines.numbers::<usize>(3)?;
        triangles.push([t[0], t[1], t[2]]);
    }
    let mut boundary = Vec::with_capacity(nb);
    for _ in 0..nb {
        boundary.push(lines.numbers::<usize>(1)?[0]);
    }
    lines.finish()?;
    Ok(TriMesh::from_parts(
        Domain::new(spec)?,
        vertices,
        triangles,
        boundary,
    )?)
}

/// `nd 2`, then `x y ux uy` per P2 node.
pub fn write_displacement(u: &DisplacementField, out: &mut impl Write) -> io::Result<()> {
    let mesh = u.mesh();
    writeln!(out, "{} 2", mesh.node_count())?;
    for (i, v) in u.values().iter().enumerate() {
        let p = mesh.node_point(i);
        writeln!(
            out,
            "{} {} {} {}",
            num(p[0]),
            num(p[1]),
            num(v[0]),
            num(v[1])
        )?;
    }
    Ok(())
}

fn check_node(
    mesh: &TriMesh,
    i: usize,
    expected: Point,
    found: Point,
    line: usize,
) -> Result<(), FormatError> {
    let tol = NODE_TOLERANCE * mesh.domain().scale();
    if (expected[0] - found[0]).abs() > tol || (expected[1] - found[1]).abs() > tol {
        return Err(FormatError::Parse {
            line,
            msg: format!(
                "node {i} at ({}, {}) does not match the mesh node ({}, {})",
                found[0], found[1], expected[0], expected[1]
            ),
        });
    }
    Ok(())
}

/// Reads a displacement field onto `mesh`; node coordinates must agree
/// with the mesh nodes.
pub fn read_displacement(
    input: impl Read,
    mesh: Arc<TriMesh>,
) -> Result<DisplacementField, FormatError> {
    let mut lines = Lines::new(input);
    let head = lines.numbers::<usize>(2)?;
    if head[1] != 2 {
        return Err(lines.err(format!("expected 2 components, found {}", head[1])));
    }
    if head[0] != mesh.node_count() {
        return Err(FormatError::Mismatch(format!(
            "file has {} nodes, mesh has {}",
            head[0],
            mesh.node_count()
        )));
    }
    let mut values = Vec::with_capacity(head[0]);
    for i in 0..head[0] {
        let f = lines.numbers::<f64>(4)?;
        check_node(&mesh, i, mesh.node_point(i), [f[0], f[1]], lines.line)?;
        values.push([f[2], f[3]]);
    }
    lines.finish()?;
    Ok(DisplacementField::from_nodal(mesh, values)?)
}

/// `nd 1`, then `x y value` per degree of freedom.
pub fn write_scalar(field: &ScalarField, out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "{} 1", field.dof_count())?;
    for (i, v) in field.values().iter().enumerate() {
        let p = field.dof_point(i);
        writeln!(out, "{} {} {}", num(p[0]), num(p[1]), num(*v))?;
    }
    Ok(())
}

/// Reads a scalar field; the degree (P1 or P2) follows from the count.
pub fn read_scalar(input: impl Read, mesh: Arc<TriMesh>) -> Result<ScalarField, FormatError> {
    let mut lines = Lines::new(input);
    let head = lines.numbers::<usize>(2)?;
    if head[1] != 1 {
        return Err(lines.err(format!("expected 1 component, found {}", head[1])));
    }
    let degree = if head[0] == mesh.vertex_count() {
        1
    } else if head[0] == mesh.node_count() {
        2
    } else {
        return Err(FormatError::Mismatch(format!(
            "file has {} values, mesh has {} vertices and {} nodes",
            head[0],
            mesh.vertex_count(),
            mesh.node_count()
        )));
    };
    let mut values = Vec::with_capacity(head[0]);
    for i in 0..head[0] {
        let f = lines.numbers::<f64>(3)?;
        check_node(&mesh, i, mesh.node_point(i), [f[0], f[1]], lines.line)?;
        values.push(f[2]);
    }
    lines.finish()?;
    Ok(ScalarField::from_values(mesh, degree, values)?)
}

/// Writes through a temporary file in the same directory and renames it into
/// place, so `path` is either absent, the old file or the complete new file.
pub fn write_atomic(
    path: &Path,
    write: impl FnOnce(&mut io::BufWriter<fs::File>) -> io::Result<()>,
) -> io::Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "path has no file name"))?;
    let tmp = dir.join(format!(
        ".{}.tmp{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    let result = (|| {
        let mut f = io::BufWriter::new(fs::File::create(&tmp)?);
        write(&mut f)?;
        f.into_inner().map_err(|e| e.into_error())?.sync_all()
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(e);
    }
    fs::rename(&tmp, path)
}

pub fn write_bytes_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    write_atomic(path, |f| f.write_all(bytes))
}
