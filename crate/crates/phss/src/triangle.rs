//! Triangle `.node` / `.ele` files.
//!
//! Only what the solver needs is kept: coordinates, the first three corners of
//! each element and the node boundary markers. Attributes are skipped. The
//! indexing base (0 or 1) is taken from the first node row and applies to the
//! element file as well.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use phss_core::{Error, TriangularMesh};

use crate::error::{HarnessError, Result};

/// Data rows of a Triangle file: `(line number, fields)`.
fn rows(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let content = line.split('#').next().unwrap_or("");
        let fields: Vec<&str> = content.split_whitespace().collect();
        (!fields.is_empty()).then_some((i + 1, fields))
    })
}

fn number<T: std::str::FromStr>(src: &str, line: usize, field: &str, what: &str) -> Result<T> {
    field.parse().map_err(|_| HarnessError::parse(src, line, format!("cannot parse {what} `{field}`")))
}

struct NodeFile {
    coords: Vec<[f64; 2]>,
    markers: Option<Vec<bool>>,
    base: usize,
}

fn parse_nodes(text: &str) -> Result<NodeFile> {
    const SRC: &str = "node";
    let mut it = rows(text);
    let (hline, header) = it.next().ok_or_else(|| HarnessError::parse(SRC, 1, "missing header"))?;
    if header.len() < 2 {
        return Err(HarnessError::parse(SRC, hline, "header needs at least a count and a dimension"));
    }
    let count: usize = number(SRC, hline, header[0], "node count")?;
    let dim: usize = number(SRC, hline, header[1], "dimension")?;
    if dim != 2 {
        return Err(HarnessError::parse(SRC, hline, format!("dimension must be 2, got {dim}")));
    }
    let attrs: usize = header.get(2).map_or(Ok(0), |f| number(SRC, hline, f, "attribute count"))?;
    let has_markers = match header.get(3) {
        None => false,
        Some(f) => match number::<usize>(SRC, hline, f, "marker flag")? {
            0 => false,
            1 => true,
            m => return Err(HarnessError::parse(SRC, hline, format!("marker flag must be 0 or 1, got {m}"))),
        },
    };

    let mut coords = Vec::with_capacity(count);
    let mut markers = Vec::with_capacity(if has_markers { count } else { 0 });
    let mut base = 0;
    for (k, (line, fields)) in it.by_ref().take(count).enumerate() {
        let want = 3 + attrs + usize::from(has_markers);
        if fields.len() < want {
            return Err(HarnessError::parse(SRC, line, format!("expected {want} fields, found {}", fields.len())));
        }
        let idx: usize = number(SRC, line, fields[0], "node index")?;
        if k == 0 {
            if idx > 1 {
                return Err(HarnessError::parse(SRC, line, format!("first node index must be 0 or 1, got {idx}")));
            }
            base = idx;
        }
        if idx != base + k {
            return Err(HarnessError::parse(SRC, line, format!("expected node index {}, got {idx}", base + k)));
        }
        let x: f64 = number(SRC, line, fields[1], "coordinate")?;
        let y: f64 = number(SRC, line, fields[2], "coordinate")?;
        if !x.is_finite() || !y.is_finite() {
            return Err(HarnessError::parse(SRC, line, "non-finite coordinate"));
        }
        coords.push([x, y]);
        if has_markers {
            let m: i64 = number(SRC, line, fields[3 + attrs], "boundary marker")?;
            markers.push(m != 0);
        }
    }
    if coords.len() != count {
        let last = text.lines().count();
        return Err(HarnessError::parse(SRC, last, format!("header announces {count} nodes, found {}", coords.len())));
    }
    if let Some((line, _)) = it.next() {
        return Err(HarnessError::parse(SRC, line, "unexpected data after the last node"));
    }
    Ok(NodeFile { coords, markers: has_markers.then_some(markers), base })
}

fn parse_elements(text: &str, base: usize, num_nodes: usize) -> Result<(Vec<[usize; 3]>, Vec<usize>)> {
    const SRC: &str = "ele";
    let mut it = rows(text);
    let (hline, header) = it.next().ok_or_else(|| HarnessError::parse(SRC, 1, "missing header"))?;
    if header.len() < 2 {
        return Err(HarnessError::parse(SRC, hline, "header needs a count and nodes per triangle"));
    }
    let count: usize = number(SRC, hline, header[0], "triangle count")?;
    let per: usize = number(SRC, hline, header[1], "nodes per triangle")?;
    if per != 3 && per != 6 {
        return Err(HarnessError::parse(SRC, hline, format!("nodes per triangle must be 3 or 6, got {per}")));
    }
    let attrs: usize = header.get(2).map_or(Ok(0), |f| number(SRC, hline, f, "attribute count"))?;

    let mut triangles = Vec::with_capacity(count);
    let mut lines = Vec::with_capacity(count);
    for (k, (line, fields)) in it.by_ref().take(count).enumerate() {
        if fields.len() < 1 + per + attrs {
            return Err(HarnessError::parse(
                SRC,
                line,
                format!("expected {} fields, found {}", 1 + per + attrs, fields.len()),
            ));
        }
        let idx: usize = number(SRC, line, fields[0], "triangle index")?;
        if idx != base + k {
            return Err(HarnessError::parse(SRC, line, format!("expected triangle index {}, got {idx}", base + k)));
        }
        let mut tri = [0usize; 3];
        for (slot, field) in tri.iter_mut().zip(&fields[1..4]) {
            let v: usize = number(SRC, line, field, "node index")?;
            if v < base || v - base >= num_nodes {
                return Err(HarnessError::parse(
                    SRC,
                    line,
                    format!("node index {v} out of range {base}..{}", num_nodes + base),
                ));
            }
            *slot = v - base;
        }
        triangles.push(tri);
        lines.push(line);
    }
    if triangles.len() != count {
        let last = text.lines().count();
        return Err(HarnessError::parse(
            SRC,
            last,
            format!("header announces {count} triangles, found {}", triangles.len()),
        ));
    }
    if let Some((line, _)) = it.next() {
        return Err(HarnessError::parse(SRC, line, "unexpected data after the last triangle"));
    }
    Ok((triangles, lines))
}

/// Builds a mesh from the contents of a `.node` and an `.ele` file.
///
/// Boundary flags come from the node markers (nonzero means boundary). Files
/// without markers get flags from the topology instead. Clockwise triangles
/// are reoriented; degenerate ones are reported with their `.ele` line.
pub fn load_triangle_mesh(node_text: &str, ele_text: &str) -> Result<TriangularMesh> {
    let nodes = parse_nodes(node_text)?;
    let (triangles, lines) = parse_elements(ele_text, nodes.base, nodes.coords.len())?;
    let built = match nodes.markers {
        Some(markers) => TriangularMesh::new(nodes.coords, triangles, markers),
        None => TriangularMesh::with_topological_boundary(nodes.coords, triangles),
    };
    built.map_err(|e| match e {
        Error::InvalidMesh { element: Some(t), reason } => HarnessError::parse("ele", lines[t], reason),
        other => other.into(),
    })
}

/// `.node` text with 1-based indices and boundary markers.
pub fn write_node(mesh: &TriangularMesh) -> String {
    let mut out = format!("{} 2 0 1\n", mesh.num_nodes());
    for (i, (p, &b)) in mesh.nodes().iter().zip(mesh.boundary_flags()).enumerate() {
        let _ = writeln!(out, "{} {:?} {:?} {}", i + 1, p[0], p[1], u8::from(b));
    }
    out
}

/// `.ele` text with 1-based indices.
pub fn write_ele(mesh: &TriangularMesh) -> String {
    let mut out = format!("{} 3 0\n", mesh.num_triangles());
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let _ = writeln!(out, "{} {} {} {}", t + 1, tri[0] + 1, tri[1] + 1, tri[2] + 1);
    }
    out
}

/// `base.node` and `base.ele` for a path given with or without extension.
pub fn file_pair(base: &Path) -> (PathBuf, PathBuf) {
    let stem = match base.extension().and_then(|e| e.to_str()) {
        Some("node" | "ele") => base.with_extension(""),
        _ => base.to_path_buf(),
    };
    let with = |ext: &str| {
        let mut s = stem.clone().into_os_string();
        s.push(".");
        s.push(ext);
        PathBuf::from(s)
    };
    (with("node"), with("ele"))
}

pub fn read_triangle_files(base: &Path) -> Result<TriangularMesh> {
    let (node, ele) = file_pair(base);
    let node_text = std::fs::read_to_string(&node).map_err(|e| HarnessError::io(&node, e))?;
    let ele_text = std::fs::read_to_string(&ele).map_err(|e| HarnessError::io(&ele, e))?;
    load_triangle_mesh(&node_text, &ele_text).map_err(|e| match e {
        HarnessError::Parse { source_name, line, message } => {
            let path = if source_name == "node" { &node } else { &ele };
            HarnessError::Parse { source_name: path.display().to_string(), line, message }
        }
        other => other,
    })
}

pub fn write_triangle_files(mesh: &TriangularMesh, base: &Path) -> Result<(PathBuf, PathBuf)> {
    let (node, ele) = file_pair(base);
    std::fs::write(&node, write_node(mesh)).map_err(|e| HarnessError::io(&node, e))?;
    std::fs::write(&ele, write_ele(mesh)).map_err(|e| HarnessError::io(&ele, e))?;
    Ok((node, ele))
}
