//! Plain-text mesh format.
//!
//! ```text
//! poly-mesh v1
//! VERTICES <n>
//! <x> <y>                      (n lines)
//! CELLS <m>
//! <k> <v0> ... <v(k-1)>        (m lines, counterclockwise)
//! DUAL                         (optional)
//! SEEDS <m>
//! <x> <y>
//! TRIANGLES <t>
//! <a> <b> <c>
//! PAIRING <e>
//! <edge> <|E*|> <mx> <my>
//! ```
//!
//! Reals are written with 17 significant digits, so a write/read cycle is
//! bit-exact. Blank lines and `#` comments are ignored.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use super::dual::{build_dual_pairing, DualMeshPair};
use super::point::Point2;
use super::{MeshError, PolygonalMesh};

const HEADER: &str = "poly-mesh v1";
/// Tolerance when comparing a stored pairing with the recomputed one.
const PAIRING_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum MeshFile {
    Plain(PolygonalMesh),
    Dual(DualMeshPair),
}

impl MeshFile {
    pub fn mesh(&self) -> &PolygonalMesh {
        match self {
            MeshFile::Plain(m) => m,
            MeshFile::Dual(d) => d.primary(),
        }
    }

    pub fn dual(&self) -> Option<&DualMeshPair> {
        match self {
            MeshFile::Plain(_) => None,
            MeshFile::Dual(d) => Some(d),
        }
    }
}

impl From<PolygonalMesh> for MeshFile {
    fn from(m: PolygonalMesh) -> Self {
        MeshFile::Plain(m)
    }
}

impl From<DualMeshPair> for MeshFile {
    fn from(d: DualMeshPair) -> Self {
        MeshFile::Dual(d)
    }
}

fn write_polygonal(out: &mut String, mesh: &PolygonalMesh) {
    let _ = writeln!(out, "{HEADER}");
    let _ = writeln!(out, "VERTICES {}", mesh.num_vertices());
    for p in mesh.vertices() {
        let _ = writeln!(out, "{:.16e} {:.16e}", p.x, p.y);
    }
    let _ = writeln!(out, "CELLS {}", mesh.num_cells());
    for c in mesh.cells() {
        let _ = write!(out, "{}", c.len());
        for v in c {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
}

pub fn write_mesh(file: &MeshFile) -> String {
    let mut out = String::new();
    write_polygonal(&mut out, file.mesh());
    if let MeshFile::Dual(d) = file {
        out.push_str("DUAL\n");
        let _ = writeln!(out, "SEEDS {}", d.seeds().len());
        for p in d.seeds() {
            let _ = writeln!(out, "{:.16e} {:.16e}", p.x, p.y);
        }
        let _ = writeln!(out, "TRIANGLES {}", d.triangles().len());
        for t in d.triangles() {
            let _ = writeln!(out, "{} {} {}", t[0], t[1], t[2]);
        }
        let _ = writeln!(out, "PAIRING {}", d.patches().len());
        for p in d.patches() {
            let _ = writeln!(
                out,
                "{} {:.16e} {:.16e} {:.16e}",
                p.edge, p.dual_length, p.dual_midpoint.x, p.dual_midpoint.y
            );
        }
    }
    out
}

pub fn write_mesh_file(path: impl AsRef<Path>, file: &MeshFile) -> Result<(), MeshError> {
    std::fs::write(path, write_mesh(file))?;
    Ok(())
}

pub fn read_mesh_file(path: impl AsRef<Path>) -> Result<MeshFile, MeshError> {
    read_mesh(&std::fs::read_to_string(path)?)
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self { inner: text.lines().enumerate(), last: 0 }
    }

    fn err(&self, msg: impl Into<String>) -> MeshError {
        MeshError::Parse { line: self.last, msg: msg.into() }
    }

    /// Next significant line with its 1-based number.
    fn next(&mut self) -> Option<&'a str> {
        for (i, l) in self.inner.by_ref() {
            self.last = i + 1;
            let l = l.split('#').next().unwrap_or("").trim();
            if !l.is_empty() {
                return Some(l);
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<&'a str, MeshError> {
        self.next().ok_or_else(|| MeshError::Parse {
            line: self.last + 1,
            msg: format!("unexpected end of file, expected {what}"),
        })
    }

    fn section(&mut self, keyword: &str) -> Result<usize, MeshError> {
        let l = self.expect(keyword)?;
        let mut it = l.split_whitespace();
        if it.next() != Some(keyword) {
            return Err(self.err(format!("expected '{keyword} <count>', found '{l}'")));
        }
        let n = it.next().ok_or_else(|| self.err(format!("missing count after {keyword}")))?;
        let n = self.parse::<usize>(n)?;
        if it.next().is_some() {
            return Err(self.err("trailing tokens"));
        }
        Ok(n)
    }

    fn parse<T: FromStr>(&self, tok: &str) -> Result<T, MeshError> {
        tok.parse().map_err(|_| self.err(format!("cannot parse '{tok}'")))
    }

    fn numbers<T: FromStr>(&mut self, what: &str, count: Option<usize>) -> Result<Vec<T>, MeshError> {
        let l = self.expect(what)?;
        let v = l.split_whitespace().map(|t| self.parse(t)).collect::<Result<Vec<T>, _>>()?;
        if let Some(c) = count {
            if v.len() != c {
                return Err(self.err(format!("expected {c} values for {what}, found {}", v.len())));
            }
        }
        Ok(v)
    }

    fn point(&mut self, what: &str) -> Result<Point2, MeshError> {
        let v = self.numbers::<f64>(what, Some(2))?;
        Ok(Point2::new(v[0], v[1]))
    }
}

/// Parses a mesh, validating it (and its dual pairing, if present).
pub fn read_mesh(text: &str) -> Result<MeshFile, MeshError> {
    let mut lines = Lines::new(text);
    let header = lines.expect("header")?;
    if header != HEADER {
        return Err(lines.err(format!("expected '{HEADER}', found '{header}'")));
    }
    let nv = lines.section("VERTICES")?;
    let vertices = (0..nv).map(|_| lines.point("vertex")).collect::<Result<Vec<_>, _>>()?;
    let nc = lines.section("CELLS")?;
    let mut cells = Vec::with_capacity(nc);
    for _ in 0..nc {
        let v = lines.numbers::<usize>("cell", None)?;
        match v.split_first() {
            Some((&k, rest)) if k == rest.len() => cells.push(rest.to_vec()),
            _ => return Err(lines.err("cell line must be '<count> <v0> ... <v(count-1)>'")),
        }
    }
    let mesh = PolygonalMesh::new(vertices, cells)?;
    match lines.next() {
        None => return Ok(MeshFile::Plain(mesh)),
        Some("DUAL") => {}
        Some(other) => return Err(lines.err(format!("unexpected '{other}'"))),
    }
    let ns = lines.section("SEEDS")?;
    let seeds = (0..ns).map(|_| lines.point("seed")).collect::<Result<Vec<_>, _>>()?;
    let nt = lines.section("TRIANGLES")?;
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let v = lines.numbers::<usize>("triangle", Some(3))?;
        triangles.push([v[0], v[1], v[2]]);
    }
    let np = lines.section("PAIRING")?;
    let mut stored = Vec::with_capacity(np);
    for _ in 0..np {
        let l = lines.expect("pairing")?;
        let tok: Vec<&str> = l.split_whitespace().collect();
        if tok.len() != 4 {
            return Err(lines.err("pairing line must be '<edge> <|E*|> <mx> <my>'"));
        }
        let e: usize = lines.parse(tok[0])?;
        let len: f64 = lines.parse(tok[1])?;
        let m = Point2::new(lines.parse(tok[2])?, lines.parse(tok[3])?);
        stored.push((lines.last, e, len, m));
    }
    if let Some(extra) = lines.next() {
        return Err(lines.err(format!("unexpected '{extra}' after pairing")));
    }
    let pair = build_dual_pairing(mesh, seeds, triangles)?;
    if stored.len() != pair.patches().len() {
        return Err(MeshError::Parse {
            line: lines.last,
            msg: format!("{} pairing entries for {} edges", stored.len(), pair.patches().len()),
        });
    }
    for (line, e, len, m) in stored {
        let ok = pair.patches().get(e).is_some_and(|p| {
            (p.dual_length - len).abs() <= PAIRING_TOL && p.dual_midpoint.dist(m) <= PAIRING_TOL
        });
        if !ok {
            return Err(MeshError::Parse { line, msg: format!("stored pairing of edge {e} disagrees with the geometry") });
        }
    }
    Ok(MeshFile::Dual(pair))
}
