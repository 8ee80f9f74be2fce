//! Text readers and writers for every instance format.
//!
//! Each `parse_*` function takes the whole text; the matching `read_*`
//! function streams from any `BufRead` and keeps only the current line in
//! memory. Writers always emit LF line endings and print floats so that they
//! parse back to the same bits.

mod cell_tracking;
mod dd;
mod error;
mod lp;
mod multicut;
pub mod number;
mod reader;
mod shape;
mod uai;

use std::io::BufRead;

pub use cell_tracking::{parse_cell_tracking, read_cell_tracking, write_cell_tracking};
pub use dd::{parse_gm, parse_mgm, read_gm, read_mgm, write_gm, write_mgm};
pub use error::{FormatTag, NameError, ParseError, Position};
pub use lp::{parse_lp, read_lp, write_lp};
pub use multicut::{parse_amwc, parse_multicut, read_amwc, read_multicut, write_amwc, write_multicut, MulticutOptions};
pub use shape::{decode_shape_variable, parse_shape_filename, ShapeFileMeta};
pub use uai::{
    parse_bottleneck_mrf, parse_tomography, parse_uai_mrf, read_bottleneck_mrf, read_tomography, read_uai_mrf,
    write_bottleneck_mrf, write_tomography, write_uai_mrf, UaiOptions,
};

use crate::model::{ProblemClass, ProblemInstance};

/// Parser switches shared by all formats; each applies only where relevant.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// UAI: accept interleaved scopes and missing unary tables.
    pub lenient: bool,
    /// Multicut: sum repeated edges instead of rejecting them.
    pub merge_duplicates: bool,
}

/// Reads an instance of the given format.
pub fn read_instance<R: BufRead>(format: FormatTag, reader: R, opts: ParseOptions) -> Result<ProblemInstance, ParseError> {
    let uai = UaiOptions { lenient: opts.lenient };
    Ok(match format {
        FormatTag::Mrf => read_uai_mrf(reader, uai)?.into(),
        FormatTag::BottleneckMrf => read_bottleneck_mrf(reader, uai)?.into(),
        FormatTag::Tomography => read_tomography(reader, uai)?.into(),
        FormatTag::Multicut => {
            read_multicut(reader, MulticutOptions { merge_duplicates: opts.merge_duplicates })?.into()
        }
        FormatTag::Amwc => read_amwc(reader)?.into(),
        FormatTag::Gm => read_gm(reader)?.into(),
        FormatTag::Mgm => read_mgm(reader)?.into(),
        FormatTag::CellTracking => read_cell_tracking(reader)?.into(),
        FormatTag::ShapeMatching | FormatTag::Lp => {
            let ilp = read_lp(reader).map_err(|mut e| {
                e.format = format;
                e
            })?;
            ilp.into()
        }
    })
}

pub fn parse_instance(format: FormatTag, text: &str, opts: ParseOptions) -> Result<ProblemInstance, ParseError> {
    read_instance(format, text.as_bytes(), opts)
}

/// Format written by [`serialize`] for a problem class.
pub fn format_for(class: ProblemClass) -> FormatTag {
    match class {
        ProblemClass::Mrf => FormatTag::Mrf,
        ProblemClass::BottleneckMrf => FormatTag::BottleneckMrf,
        ProblemClass::Tomography => FormatTag::Tomography,
        ProblemClass::Multicut => FormatTag::Multicut,
        ProblemClass::Amwc => FormatTag::Amwc,
        ProblemClass::GraphMatching => FormatTag::Gm,
        ProblemClass::MultiGraphMatching => FormatTag::Mgm,
        ProblemClass::CellTracking => FormatTag::CellTracking,
        ProblemClass::Ilp => FormatTag::Lp,
    }
}

/// Writes an instance in the native format of its class.
pub fn serialize(instance: &ProblemInstance) -> String {
    match instance {
        ProblemInstance::Mrf(x) => write_uai_mrf(x),
        ProblemInstance::BottleneckMrf(x) => write_bottleneck_mrf(x),
        ProblemInstance::Tomography(x) => write_tomography(x),
        ProblemInstance::Multicut(x) => write_multicut(x),
        ProblemInstance::Amwc(x) => write_amwc(x),
        ProblemInstance::GraphMatching(x) => write_gm(x),
        ProblemInstance::MultiGraphMatching(x) => write_mgm(x),
        ProblemInstance::CellTracking(x) => write_cell_tracking(x),
        ProblemInstance::Ilp(x) => write_lp(x),
    }
}
