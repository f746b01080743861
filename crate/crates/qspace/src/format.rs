//! JSON structure files, gamma files and braid files.
//!
//! Every scalar is a complex literal string (see `qspace_core::text`). Pairs `(i, j)` are
//! flattened row-major to `i·N + j`.

use std::fmt;
use std::path::Path;

use qspace_core::text::parse_scalar;
use qspace_core::{Error, Matrix, Scalar, StructureData, StructureParts};
use serde::Deserialize;

type Literals = Vec<Vec<String>>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StructureFile {
    n: usize,
    r: Literals,
    z: Literals,
    t: Vec<String>,
    g: Literals,
    #[serde(default)]
    gammas: Option<Vec<Literals>>,
    #[serde(default)]
    f_tilde: Option<Literals>,
    #[serde(default)]
    degree_cutoff: Option<usize>,
    #[serde(default)]
    star: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GammaFile {
    gammas: Vec<Literals>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BraidFile {
    n: usize,
    b: Literals,
}

/// Failure to obtain a structure from a file.
#[derive(Debug)]
pub enum LoadError {
    Io(std::io::Error),
    Json(serde_json::Error),
    Structure(Error),
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadError::Io(e) => write!(f, "{e}"),
            LoadError::Json(e) => write!(f, "malformed JSON: {e}"),
            LoadError::Structure(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for LoadError {}

impl From<Error> for LoadError {
    fn from(e: Error) -> Self {
        LoadError::Structure(e)
    }
}

fn matrix(name: &str, rows: &Literals) -> Result<Matrix, Error> {
    let parsed = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, s)| parse_scalar(s).map_err(|e| Error::Parse(format!("{name}[{i}][{j}]: {e}"))))
                .collect::<Result<Vec<Scalar>, Error>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    if parsed.is_empty() {
        return Err(Error::Shape(format!("{name} is empty")));
    }
    Matrix::from_rows(parsed).map_err(|e| Error::Shape(format!("{name}: {e}")))
}

fn literals(m: &Matrix) -> Literals {
    m.to_rows().iter().map(|row| row.iter().map(Scalar::to_literal).collect()).collect()
}

pub fn parse_structure(json: &str) -> Result<StructureData, LoadError> {
    let file: StructureFile = serde_json::from_str(json).map_err(LoadError::Json)?;
    let t = file
        .t
        .iter()
        .enumerate()
        .map(|(i, s)| parse_scalar(s).map_err(|e| Error::Parse(format!("t[{i}]: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let gammas = match &file.gammas {
        None => None,
        Some(gs) => Some(
            gs.iter()
                .enumerate()
                .map(|(a, g)| matrix(&format!("gammas[{a}]"), g))
                .collect::<Result<Vec<_>, _>>()?,
        ),
    };
    let f_tilde = file.f_tilde.as_ref().map(|f| matrix("f_tilde", f)).transpose()?;
    let parts = StructureParts {
        n: file.n,
        r: matrix("r", &file.r)?,
        z: matrix("z", &file.z)?,
        t,
        g: matrix("g", &file.g)?,
        gammas,
        f_tilde,
        degree_cutoff: file.degree_cutoff,
        star: file.star,
    };
    Ok(StructureData::new(parts)?)
}

pub fn load_structure(path: &Path) -> Result<StructureData, LoadError> {
    let text = std::fs::read_to_string(path).map_err(LoadError::Io)?;
    parse_structure(&text)
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

fn json_row(row: &[String]) -> String {
    let items: Vec<String> = row.iter().map(|s| json_string(s)).collect();
    format!("[{}]", items.join(", "))
}

fn json_matrix(rows: &Literals, indent: &str) -> String {
    let lines: Vec<String> = rows.iter().map(|r| format!("{indent}  {}", json_row(r))).collect();
    format!("[\n{}\n{indent}]", lines.join(",\n"))
}

/// Canonical JSON for `sd`, one matrix row per line; [`parse_structure`] maps it back to an
/// equal value.
pub fn dump_structure(sd: &StructureData) -> String {
    let parts = sd.to_parts();
    let mut fields = vec![
        format!("\"n\": {}", parts.n),
        format!("\"r\": {}", json_matrix(&literals(&parts.r), "  ")),
        format!("\"z\": {}", json_matrix(&literals(&parts.z), "  ")),
        format!("\"t\": {}", json_row(&parts.t.iter().map(Scalar::to_literal).collect::<Vec<_>>())),
        format!("\"g\": {}", json_matrix(&literals(&parts.g), "  ")),
    ];
    if let Some(gs) = &parts.gammas {
        let ms: Vec<String> = gs.iter().map(|g| format!("    {}", json_matrix(&literals(g), "    "))).collect();
        fields.push(format!("\"gammas\": [\n{}\n  ]", ms.join(",\n")));
    }
    if let Some(f) = &parts.f_tilde {
        fields.push(format!("\"f_tilde\": {}", json_matrix(&literals(f), "  ")));
    }
    if let Some(d) = parts.degree_cutoff {
        fields.push(format!("\"degree_cutoff\": {d}"));
    }
    if let Some(star) = parts.star {
        fields.push(format!("\"star\": {star}"));
    }
    format!("{{\n  {}\n}}\n", fields.join(",\n  "))
}

/// Gamma matrices from `{"gammas": [...]}`.
pub fn load_gammas(path: &Path) -> Result<Vec<Matrix>, LoadError> {
    let text = std::fs::read_to_string(path).map_err(LoadError::Io)?;
    let file: GammaFile = serde_json::from_str(&text).map_err(LoadError::Json)?;
    Ok(file
        .gammas
        .iter()
        .enumerate()
        .map(|(a, g)| matrix(&format!("gammas[{a}]"), g))
        .collect::<Result<Vec<_>, _>>()?)
}

/// Generator-level braiding `B^{ij}_{kl}` at `b[i·N+j][k·N+l]`, from `{"n": N, "b": [...]}`.
pub fn load_braid(path: &Path) -> Result<(usize, Matrix), LoadError> {
    let text = std::fs::read_to_string(path).map_err(LoadError::Io)?;
    let file: BraidFile = serde_json::from_str(&text).map_err(LoadError::Json)?;
    let b = matrix("b", &file.b)?;
    let nn = file.n * file.n;
    if b.rows() != nn || b.cols() != nn {
        return Err(Error::Shape(format!("b is {}×{}, expected {nn}×{nn}", b.rows(), b.cols())).into());
    }
    Ok((file.n, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use qspace_core::structures::presets;

    const CLASSICAL_2D: &str = r#"{
        "n": 2,
        "r": [["1","0","0","0"],["0","0","1","0"],["0","1","0","0"],["0","0","0","1"]],
        "z": [["0","0"],["0","0"],["0","0"],["0","0"]],
        "t": ["0","0","0","0"],
        "g": [["1","0"],["0","-1"]]
    }"#;

    #[test]
    fn parses_literals() {
        let sd = parse_structure(CLASSICAL_2D).unwrap();
        assert_eq!(sd.n(), 2);
        assert!(sd.is_r_tau());
        let odd = CLASSICAL_2D.replace(r#"[["1","0"],["0","-1"]]"#, r#"[["1/3+2/5i","0"],["0","-1"]]"#);
        let sd = parse_structure(&odd).unwrap();
        assert_eq!(sd.g(0, 0), &Scalar::from_parts((1, 3), (2, 5)));
    }

    #[test]
    fn rejects_bad_input() {
        let singular = CLASSICAL_2D.replace(r#"[["1","0"],["0","-1"]]"#, r#"[["0","0"],["0","0"]]"#);
        assert!(matches!(parse_structure(&singular), Err(LoadError::Structure(Error::SingularMetric))));
        let bad = CLASSICAL_2D.replace(r#""-1""#, r#""2/4""#);
        assert!(matches!(parse_structure(&bad), Err(LoadError::Structure(Error::Parse(_)))));
        let short = CLASSICAL_2D.replace(r#"["0","0","0","0"]"#, r#"["0","0"]"#);
        assert!(matches!(parse_structure(&short), Err(LoadError::Structure(Error::Shape(_)))));
        let extra = CLASSICAL_2D.replace(r#""n": 2"#, r#""n": 2, "m": 1"#);
        assert!(matches!(parse_structure(&extra), Err(LoadError::Json(_))));
    }

    #[test]
    fn dump_round_trips() {
        for sd in [
            presets::classical_minkowski(5),
            presets::lattice(Scalar::from_ratio(-3, 7), 6),
            presets::epsilon(Scalar::from_ratio(1, 2), 6),
            presets::n2twist(Scalar::from_parts((0, 1), (1, 2)), 6),
        ] {
            let text = dump_structure(&sd);
            assert_eq!(parse_structure(&text).unwrap(), sd);
            assert_eq!(dump_structure(&parse_structure(&text).unwrap()), text);
        }
    }
}
