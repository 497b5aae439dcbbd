//! C interface to the graphcode library.
//!
//! Graphcodes are returned behind an opaque `GcGraphcode` handle. Every fallible
//! call returns a `GcStatus`; on failure `gc_last_error` holds a message for the
//! calling thread until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use graphcode::formats::write_graphcode;
use graphcode::gcode::{Graphcode, SliceMode};
use graphcode::pipeline::{compute_from_text, ComputeOptions, InputFormat, PrimaryParameter};
use graphcode::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Parse = 4,
    InvalidInput = 5,
    OutOfRange = 6,
    Internal = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GcFormat {
    Auto = 0,
    Presentation = 1,
    Simplicial = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GcSlicing {
    Equidistant = 0,
    Quantile = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct GcOptions {
    pub format: GcFormat,
    pub degree: u32,
    pub slices: u32,
    pub threshold: f64,
    /// 1 or 2.
    pub primary_parameter: u8,
    pub slicing: GcSlicing,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GcNode {
    /// 1-based.
    pub layer: u32,
    pub birth: f64,
    pub death: f64,
    pub essential: bool,
}

/// Opaque graphcode handle.
pub struct GcGraphcode(Graphcode);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn fail(status: GcStatus, msg: impl Into<String>) -> GcStatus {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
    status
}

fn status_of(e: &Error) -> GcStatus {
    match e {
        Error::InvalidArgument(_) => GcStatus::InvalidArgument,
        Error::Parse { .. } | Error::Json(_) => GcStatus::Parse,
        Error::InvalidComplex(_)
        | Error::Uncapped
        | Error::TooLarge { .. }
        | Error::SimplexBudget { .. } => GcStatus::InvalidInput,
        _ => GcStatus::Internal,
    }
}

fn guarded(f: impl FnOnce() -> GcStatus) -> GcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(GcStatus::Internal, "panic inside graphcode"),
    }
}

/// Message of the last failing call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn gc_options_default() -> GcOptions {
    GcOptions {
        format: GcFormat::Auto,
        degree: 1,
        slices: 10,
        threshold: 0.0,
        primary_parameter: 1,
        slicing: GcSlicing::Equidistant,
    }
}

/// Computes the thresholded graphcode of a presentation or a simplicial
/// bifiltration given as text. `options` may be NULL for the defaults. On
/// success `*out` owns a handle to release with `gc_graphcode_free`.
///
/// # Safety
/// `text` must be a NUL-terminated string, `options` NULL or valid, `out` valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_compute(
    text: *const c_char,
    options: *const GcOptions,
    out: *mut *mut GcGraphcode,
) -> GcStatus {
    guarded(|| {
        if text.is_null() || out.is_null() {
            return fail(GcStatus::NullPointer, "text and out must not be NULL");
        }
        *out = ptr::null_mut();
        let Ok(text) = CStr::from_ptr(text).to_str() else {
            return fail(GcStatus::InvalidUtf8, "input text is not UTF-8");
        };
        let o = if options.is_null() {
            gc_options_default()
        } else {
            *options
        };
        let primary = match PrimaryParameter::from_index(o.primary_parameter) {
            Ok(p) => p,
            Err(e) => return fail(status_of(&e), e.to_string()),
        };
        let opts = ComputeOptions {
            degree: o.degree as usize,
            slices: o.slices as usize,
            threshold: o.threshold,
            primary,
            keep_representatives: false,
            slicing: match o.slicing {
                GcSlicing::Equidistant => SliceMode::Equidistant,
                GcSlicing::Quantile => SliceMode::Quantile,
            },
        };
        let format = match o.format {
            GcFormat::Auto => InputFormat::Auto,
            GcFormat::Presentation => InputFormat::Presentation,
            GcFormat::Simplicial => InputFormat::Simplicial,
        };
        match compute_from_text(text, format, &opts) {
            Ok(gc) => {
                *out = Box::into_raw(Box::new(GcGraphcode(gc)));
                GcStatus::Ok
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// # Safety
/// `gc` must be NULL or a handle from `gc_compute` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gc_graphcode_free(gc: *mut GcGraphcode) {
    if !gc.is_null() {
        drop(Box::from_raw(gc));
    }
}

/// # Safety
/// `gc` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gc_graphcode_slices(gc: *const GcGraphcode) -> usize {
    gc.as_ref().map_or(0, |g| g.0.slices)
}

/// # Safety
/// `gc` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gc_graphcode_node_count(gc: *const GcGraphcode) -> usize {
    gc.as_ref().map_or(0, |g| g.0.nodes.len())
}

/// # Safety
/// `gc` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gc_graphcode_edge_count(gc: *const GcGraphcode) -> usize {
    gc.as_ref().map_or(0, |g| g.0.edges.len())
}

/// # Safety
/// `gc` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_graphcode_node(
    gc: *const GcGraphcode,
    index: usize,
    out: *mut GcNode,
) -> GcStatus {
    let (Some(g), false) = (gc.as_ref(), out.is_null()) else {
        return fail(GcStatus::NullPointer, "gc and out must not be NULL");
    };
    let Some(n) = g.0.nodes.get(index) else {
        return fail(
            GcStatus::OutOfRange,
            format!("node {index} of {}", g.0.nodes.len()),
        );
    };
    *out = GcNode {
        layer: n.layer as u32,
        birth: n.bar.birth,
        death: n.bar.death,
        essential: n.bar.essential,
    };
    GcStatus::Ok
}

/// Writes the node ids of edge `index`, which runs from layer `l` to `l + 1`.
///
/// # Safety
/// `gc` must be a live handle, `source` and `target` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_graphcode_edge(
    gc: *const GcGraphcode,
    index: usize,
    source: *mut usize,
    target: *mut usize,
) -> GcStatus {
    let (Some(g), false, false) = (gc.as_ref(), source.is_null(), target.is_null()) else {
        return fail(
            GcStatus::NullPointer,
            "gc, source and target must not be NULL",
        );
    };
    let Some(&(v, w)) = g.0.edges.get(index) else {
        return fail(
            GcStatus::OutOfRange,
            format!("edge {index} of {}", g.0.edges.len()),
        );
    };
    *source = v;
    *target = w;
    GcStatus::Ok
}

/// Graphcode as JSON, to release with `gc_string_free`. NULL on failure.
///
/// # Safety
/// `gc` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gc_graphcode_to_json(
    gc: *const GcGraphcode,
    with_attributes: bool,
) -> *mut c_char {
    let Some(g) = gc.as_ref() else {
        fail(GcStatus::NullPointer, "gc must not be NULL");
        return ptr::null_mut();
    };
    match CString::new(write_graphcode(&g.0, with_attributes)) {
        Ok(s) => s.into_raw(),
        Err(_) => {
            fail(GcStatus::Internal, "JSON contains a NUL byte");
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
