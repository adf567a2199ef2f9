//! Plain-text meshes: a header `NV NT`, then `x y boundary_flag` per vertex and
//! `v0 v1 v2 refinement_edge ancestor` per triangle.

use std::io::{BufRead, Write};

use afem_core::mesh::{Mesh, Triangle, Vertex};

use crate::{CliError, CliResult};

pub fn write_mesh(mesh: &Mesh, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{} {}", mesh.n_vertices(), mesh.n_triangles())?;
    for v in mesh.vertices() {
        writeln!(out, "{} {} {}", v.x, v.y, u8::from(v.on_boundary))?;
    }
    for t in mesh.triangles() {
        let [a, b, c] = t.vertices;
        writeln!(out, "{a} {b} {c} {} {}", t.refinement_edge, t.ancestor)?;
    }
    Ok(())
}

pub fn read_mesh(input: impl BufRead) -> CliResult<Mesh> {
    let mut lines = input.lines().filter(|l| l.as_ref().map_or(true, |s| !s.trim().is_empty()));
    let mut next = |what: &str| -> CliResult<Vec<String>> {
        let line = lines.next().ok_or_else(|| CliError::Usage(format!("mesh file ends before {what}")))??;
        Ok(line.split_whitespace().map(str::to_owned).collect())
    };
    let bad = |what: &str, line: &[String]| CliError::Usage(format!("malformed {what}: `{}`", line.join(" ")));
    let header = next("header")?;
    let [nv, nt]: [usize; 2] = parse_all(&header).ok_or_else(|| bad("header", &header))?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let l = next("vertex")?;
        if l.len() != 3 {
            return Err(bad("vertex", &l));
        }
        let x: f64 = l[0].parse().map_err(|_| bad("vertex", &l))?;
        let y: f64 = l[1].parse().map_err(|_| bad("vertex", &l))?;
        let flag = match l[2].as_str() {
            "0" => false,
            "1" => true,
            _ => return Err(bad("vertex", &l)),
        };
        vertices.push(Vertex { x, y, on_boundary: flag });
    }
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let l = next("triangle")?;
        let [a, b, c, r, anc]: [usize; 5] = parse_all(&l).ok_or_else(|| bad("triangle", &l))?;
        let refinement_edge = u8::try_from(r).map_err(|_| bad("triangle", &l))?;
        triangles.push(Triangle { vertices: [a, b, c], refinement_edge, ancestor: anc });
    }
    Ok(Mesh::new(vertices, triangles)?)
}

fn parse_all<const N: usize>(fields: &[String]) -> Option<[usize; N]> {
    if fields.len() != N {
        return None;
    }
    let mut out = [0; N];
    for (o, f) in out.iter_mut().zip(fields) {
        *o = f.parse().ok()?;
    }
    Some(out)
}
