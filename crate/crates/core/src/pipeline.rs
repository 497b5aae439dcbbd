//! Ingest, cap, slice, reduce, threshold: the chain behind `graphcode compute`.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::complex::{build_graded_matrix, cap, BifilteredComplex, GradedMatrix};
use crate::error::{Error, Result};
use crate::formats::{parse_presentation, parse_simplicial};
use crate::gcode::{
    assign_slices_with, compute_graphcode_with, threshold_filter, Graphcode, SliceMode,
};
use crate::oracle::{self, HomologySource, VerificationReport};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum InputFormat {
    /// Presentation when the first significant line is `scc2020`.
    #[default]
    Auto,
    Presentation,
    Simplicial,
}

impl FromStr for InputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(InputFormat::Auto),
            "presentation" => Ok(InputFormat::Presentation),
            "simplicial" => Ok(InputFormat::Simplicial),
            _ => Err(Error::InvalidArgument(format!(
                "unknown format `{s}`; expected auto, presentation or simplicial"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Input {
    Simplicial(BifilteredComplex),
    Presentation(GradedMatrix),
}

pub fn parse_input(text: &str, format: InputFormat) -> Result<Input> {
    let format = match format {
        InputFormat::Auto => {
            let first = text
                .lines()
                .map(str::trim)
                .find(|l| !l.is_empty() && !l.starts_with('#'));
            if first == Some("scc2020") {
                InputFormat::Presentation
            } else {
                InputFormat::Simplicial
            }
        }
        f => f,
    };
    Ok(match format {
        InputFormat::Presentation => Input::Presentation(parse_presentation(text)?),
        _ => Input::Simplicial(parse_simplicial(text)?),
    })
}

/// Which grade coordinate is the horizontal (reduction) parameter.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrimaryParameter {
    #[default]
    First,
    Second,
}

impl PrimaryParameter {
    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(PrimaryParameter::First),
            2 => Ok(PrimaryParameter::Second),
            _ => Err(Error::InvalidArgument(format!(
                "primary parameter must be 1 or 2, got {i}"
            ))),
        }
    }
}

/// An input oriented, reduced to one degree and capped.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub input: Input,
    pub degree: usize,
    pub matrix: GradedMatrix,
}

impl Prepared {
    pub fn new(input: Input, degree: usize, primary: PrimaryParameter) -> Result<Self> {
        let input = match (input, primary) {
            (i, PrimaryParameter::First) => i,
            (Input::Simplicial(c), PrimaryParameter::Second) => Input::Simplicial(c.transposed()),
            (Input::Presentation(m), PrimaryParameter::Second) => {
                Input::Presentation(m.transposed()?)
            }
        };
        let matrix = match &input {
            Input::Simplicial(c) => cap(&build_graded_matrix(c, degree)?, Some(c))?,
            Input::Presentation(m) => cap(m, None)?,
        };
        Ok(Prepared {
            input,
            degree,
            matrix,
        })
    }

    pub fn source(&self) -> HomologySource<'_> {
        match &self.input {
            Input::Simplicial(complex) => HomologySource::Simplicial {
                complex,
                degree: self.degree,
            },
            Input::Presentation(m) => HomologySource::Presentation(m),
        }
    }

    /// Unthresholded graphcode.
    pub fn graphcode(
        &self,
        slices: usize,
        mode: SliceMode,
        keep_representatives: bool,
    ) -> Result<Graphcode> {
        let assignment = assign_slices_with(&self.matrix, slices, mode)?;
        compute_graphcode_with(&self.matrix, &assignment, keep_representatives)
    }

    pub fn naive_graphcode(&self, slices: usize, keep_representatives: bool) -> Result<Graphcode> {
        self.naive_graphcode_with(slices, SliceMode::Equidistant, keep_representatives)
    }

    pub fn naive_graphcode_with(
        &self,
        slices: usize,
        mode: SliceMode,
        keep_representatives: bool,
    ) -> Result<Graphcode> {
        let assignment = assign_slices_with(&self.matrix, slices, mode)?;
        oracle::naive_graphcode_with(&self.matrix, &assignment, keep_representatives)
    }

    pub fn verify(&self, gc: &Graphcode) -> Result<VerificationReport> {
        oracle::verify_graphcode(self.source(), &self.matrix, gc)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComputeOptions {
    pub degree: usize,
    pub slices: usize,
    pub threshold: f64,
    pub primary: PrimaryParameter,
    pub keep_representatives: bool,
    pub slicing: SliceMode,
}

impl Default for ComputeOptions {
    fn default() -> Self {
        ComputeOptions {
            degree: 1,
            slices: 10,
            threshold: 0.0,
            primary: PrimaryParameter::First,
            keep_representatives: false,
            slicing: SliceMode::Equidistant,
        }
    }
}

/// Full chain from input text to the thresholded graphcode.
pub fn compute_from_text(
    text: &str,
    format: InputFormat,
    opts: &ComputeOptions,
) -> Result<Graphcode> {
    let prepared = Prepared::new(parse_input(text, format)?, opts.degree, opts.primary)?;
    let gc = prepared.graphcode(opts.slices, opts.slicing, opts.keep_representatives)?;
    threshold_filter(&gc, opts.threshold)
}
