//! Reader and writer for the nOFF mesh format: an OFF header variant with an
//! explicit ambient dimension. Layout:
//!
//! ```text
//! nOFF
//! <ambient dimension>
//! <vertices> <faces> <edges>
//! x1 ... xN          (one row per vertex)
//! 3 i j k            (one row per triangle)
//! ```
//!
//! Plain `OFF` is accepted on input as ambient dimension 3. `#` starts a
//! comment that runs to the end of the line. Only triangular faces are
//! supported.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mesh::ImmersedMesh;

/// Parse a mesh from nOFF/OFF text.
pub fn parse_noff(text: &str) -> Result<ImmersedMesh> {
    let stripped: String = text
        .lines()
        .map(|line| match line.find('#') {
            Some(pos) => &line[..pos],
            None => line,
        })
        .collect::<Vec<_>>()
        .join("\n");
    let mut tokens = stripped.split_whitespace();

    let header = tokens.next().ok_or_else(|| Error::malformed("empty file"))?;
    let ambient_dim = match header {
        "OFF" => 3,
        "nOFF" => {
            let tok = tokens
                .next()
                .ok_or_else(|| Error::malformed("missing ambient dimension after nOFF"))?;
            tok.parse::<usize>()
                .map_err(|_| Error::malformed(format!("bad ambient dimension {tok:?}")))?
        }
        other => {
            return Err(Error::malformed(format!(
                "expected OFF or nOFF header, got {other:?}"
            )))
        }
    };
    if ambient_dim < 3 {
        return Err(Error::malformed(format!(
            "ambient dimension must be at least 3, got {ambient_dim}"
        )));
    }

    let mut next_usize = |what: &str| -> Result<usize> {
        let tok = tokens
            .next()
            .ok_or_else(|| Error::malformed(format!("missing {what}")))?;
        tok.parse::<usize>()
            .map_err(|_| Error::malformed(format!("bad {what} {tok:?}")))
    };
    let vertex_count = next_usize("vertex count")?;
    let face_count = next_usize("face count")?;
    let _edge_count = next_usize("edge count")?;

    let mut positions = Vec::with_capacity(vertex_count * ambient_dim);
    for v in 0..vertex_count {
        for d in 0..ambient_dim {
            let tok = tokens.next().ok_or_else(|| {
                Error::malformed(format!("missing coordinate {d} of vertex {v}"))
            })?;
            let value = tok.parse::<f64>().map_err(|_| {
                Error::malformed(format!("bad coordinate {tok:?} at vertex {v}"))
            })?;
            positions.push(value);
        }
    }

    let mut triangles = Vec::with_capacity(face_count);
    for f in 0..face_count {
        let arity = tokens
            .next()
            .ok_or_else(|| Error::malformed(format!("missing face {f}")))?;
        if arity != "3" {
            return Err(Error::malformed(format!(
                "face {f} has vertex count {arity:?}; only triangles are supported"
            )));
        }
        let mut tri = [0usize; 3];
        for slot in &mut tri {
            let tok = tokens
                .next()
                .ok_or_else(|| Error::malformed(format!("truncated face {f}")))?;
            *slot = tok
                .parse::<usize>()
                .map_err(|_| Error::malformed(format!("bad vertex index {tok:?} in face {f}")))?;
        }
        triangles.push(tri);
    }

    if let Some(extra) = tokens.next() {
        return Err(Error::malformed(format!("trailing data {extra:?} after faces")));
    }

    match ImmersedMesh::new(ambient_dim, positions, triangles) {
        Ok(mesh) => Ok(mesh),
        Err(Error::Domain(msg)) => Err(Error::malformed(msg)),
        Err(e) => Err(e),
    }
}

/// Render a mesh as nOFF text. Coordinates use the shortest decimal form
/// that round-trips exactly, so read-after-write reproduces every bit.
pub fn format_noff(mesh: &ImmersedMesh) -> String {
    let mut out = String::new();
    let dim = mesh.ambient_dim();
    out.push_str("nOFF\n");
    let _ = writeln!(out, "{dim}");
    let _ = writeln!(out, "{} {} 0", mesh.vertex_count(), mesh.triangle_count());
    for v in 0..mesh.vertex_count() {
        let pos = mesh.position(v);
        for (d, c) in pos.iter().enumerate() {
            if d > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{c}");
        }
        out.push('\n');
    }
    for tri in mesh.triangles() {
        let _ = writeln!(out, "3 {} {} {}", tri[0], tri[1], tri[2]);
    }
    out
}

/// Read a mesh from a file.
pub fn read_noff(path: impl AsRef<Path>) -> Result<ImmersedMesh> {
    let text = fs::read_to_string(path)?;
    parse_noff(&text)
}

/// Write a mesh to a file.
pub fn write_noff(mesh: &ImmersedMesh, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_noff(mesh))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ImmersedMesh {
        ImmersedMesh::new(
            3,
            vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.25],
            vec![[0, 1, 2]],
        )
        .unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let mesh = sample();
        let text = format_noff(&mesh);
        let back = parse_noff(&text).unwrap();
        assert_eq!(mesh.positions(), back.positions());
        assert_eq!(mesh.triangles(), back.triangles());
        assert_eq!(mesh.ambient_dim(), back.ambient_dim());
    }

    #[test]
    fn round_trip_preserves_awkward_floats() {
        let mesh = ImmersedMesh::new(
            3,
            vec![
                0.1,
                -0.30901699437494745,
                1e-17,
                2.0f64.sqrt(),
                -1.0 / 3.0,
                6.02e23,
                0.0,
                1.0,
                0.0,
            ],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let back = parse_noff(&format_noff(&mesh)).unwrap();
        assert_eq!(mesh.positions(), back.positions());
    }

    #[test]
    fn plain_off_is_dimension_3() {
        let text = "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n";
        let mesh = parse_noff(text).unwrap();
        assert_eq!(mesh.ambient_dim(), 3);
        assert_eq!(mesh.vertex_count(), 3);
    }

    #[test]
    fn noff_dimension_4_round_trips() {
        let mesh = ImmersedMesh::new(
            4,
            vec![
                0.0, 0.0, 0.0, 1.0, //
                1.0, 0.0, 0.0, 1.0, //
                0.0, 1.0, 0.0, 1.0,
            ],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let back = parse_noff(&format_noff(&mesh)).unwrap();
        assert_eq!(back.ambient_dim(), 4);
        assert_eq!(mesh.positions(), back.positions());
    }

    #[test]
    fn comments_are_ignored() {
        let text = "# produced by hand\nOFF\n3 1 0 # counts\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n";
        assert!(parse_noff(text).is_ok());
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert!(matches!(parse_noff(""), Err(Error::MalformedFile(_))));
        assert!(matches!(parse_noff("PLY\n"), Err(Error::MalformedFile(_))));
        assert!(matches!(
            parse_noff("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n4 0 1 2 0\n"),
            Err(Error::MalformedFile(_))
        ));
        assert!(matches!(
            parse_noff("OFF\n3 1 0\n0 0 0\n1 0 0\n"),
            Err(Error::MalformedFile(_))
        ));
        assert!(matches!(
            parse_noff("OFF\n3 1 0\n0 0 zero\n1 0 0\n0 1 0\n3 0 1 2\n"),
            Err(Error::MalformedFile(_))
        ));
        assert!(matches!(
            parse_noff("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\nextra\n"),
            Err(Error::MalformedFile(_))
        ));
        // nOFF with ambient dimension below 3
        assert!(matches!(
            parse_noff("nOFF\n2\n3 1 0\n0 0\n1 0\n0 1\n3 0 1 2\n"),
            Err(Error::MalformedFile(_))
        ));
    }
}
