//! Shape matching instances are LP files; only the variable and file naming
//! conventions are specific.

use serde::Serialize;

use super::NameError;
use crate::model::TriangleProduct;

const VARIABLE_PATTERN: &str = "x_a1_a2_a3__b1_b2_b3";
const FILE_PATTERN: &str = "<binvars>_<constraints>_<shapeX>_<trisX>_<shapeY>_<trisY>[_partial][_noniso].lp";

/// Decodes `x_a1_a2_a3__b1_b2_b3` into the pair of triangles it matches.
pub fn decode_shape_variable(name: &str) -> Result<TriangleProduct, NameError> {
    let err = || NameError { name: name.to_string(), pattern: VARIABLE_PATTERN };
    let rest = name.strip_prefix("x_").ok_or_else(err)?;
    let (left, right) = rest.split_once("__").ok_or_else(err)?;
    let triple = |s: &str| -> Option<[usize; 3]> {
        let parts: Vec<&str> = s.split('_').collect();
        if parts.len() != 3 || parts.iter().any(|p| p.is_empty() || !p.bytes().all(|b| b.is_ascii_digit())) {
            return None;
        }
        Some([parts[0].parse().ok()?, parts[1].parse().ok()?, parts[2].parse().ok()?])
    };
    Ok(TriangleProduct { x: triple(left).ok_or_else(err)?, y: triple(right).ok_or_else(err)? })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShapeFileMeta {
    pub binvar_count: usize,
    pub constraint_count: usize,
    pub shape_x_name: String,
    pub triangles_x: usize,
    pub shape_y_name: String,
    pub triangles_y: usize,
    pub partial: bool,
    pub noniso: bool,
}

/// Parses the metadata encoded in a shape matching file name. Any leading
/// directory components are ignored.
pub fn parse_shape_filename(name: &str) -> Result<ShapeFileMeta, NameError> {
    let err = || NameError { name: name.to_string(), pattern: FILE_PATTERN };
    let base = name.rsplit(['/', '\\']).next().unwrap_or(name);
    let stem = base.strip_suffix(".lp").ok_or_else(err)?;
    let mut parts: Vec<&str> = stem.split('_').collect();
    let mut noniso = false;
    let mut partial = false;
    if parts.last() == Some(&"noniso") {
        noniso = true;
        parts.pop();
    }
    if parts.last() == Some(&"partial") {
        partial = true;
        parts.pop();
    }
    if parts.len() != 6 {
        return Err(err());
    }
    let count = |s: &str| s.parse::<usize>().ok().filter(|&n| n > 0);
    let shape = |s: &str| Some(s.to_string()).filter(|s| !s.is_empty() && !s.bytes().all(|b| b.is_ascii_digit()));
    Ok(ShapeFileMeta {
        binvar_count: count(parts[0]).ok_or_else(err)?,
        constraint_count: count(parts[1]).ok_or_else(err)?,
        shape_x_name: shape(parts[2]).ok_or_else(err)?,
        triangles_x: count(parts[3]).ok_or_else(err)?,
        shape_y_name: shape(parts[4]).ok_or_else(err)?,
        triangles_y: count(parts[5]).ok_or_else(err)?,
        partial,
        noniso,
    })
}
