use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use graphcode_ffi::*;

const THREE_SLICES: &str = include_str!("../../core/tests/data/three_slices.scc");

fn compute(text: &str, opts: Option<GcOptions>) -> (GcStatus, *mut GcGraphcode) {
    let text = CString::new(text).unwrap();
    let mut out = ptr::null_mut();
    let status = unsafe {
        gc_compute(
            text.as_ptr(),
            opts.as_ref().map_or(ptr::null(), |o| o as *const GcOptions),
            &mut out,
        )
    };
    (status, out)
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(gc_last_error()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn three_slices_through_handle() {
    let opts = GcOptions {
        degree: 0,
        slices: 3,
        ..gc_options_default()
    };
    let (status, gc) = compute(THREE_SLICES, Some(opts));
    assert_eq!(status, GcStatus::Ok);
    unsafe {
        assert_eq!(gc_graphcode_slices(gc), 3);
        assert_eq!(gc_graphcode_node_count(gc), 4);
        assert_eq!(gc_graphcode_edge_count(gc), 4);
        let mut nodes = Vec::new();
        for i in 0..4 {
            let mut n = GcNode::default();
            assert_eq!(gc_graphcode_node(gc, i, &mut n), GcStatus::Ok);
            nodes.push((n.layer, n.birth, n.death));
        }
        nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(
            nodes,
            [(1, 2.0, 4.0), (2, 1.0, 4.0), (2, 2.0, 3.0), (3, 1.0, 3.0)]
        );

        let (mut v, mut w) = (0, 0);
        for i in 0..4 {
            assert_eq!(gc_graphcode_edge(gc, i, &mut v, &mut w), GcStatus::Ok);
            let (mut a, mut b) = (GcNode::default(), GcNode::default());
            gc_graphcode_node(gc, v, &mut a);
            gc_graphcode_node(gc, w, &mut b);
            assert_eq!(a.layer + 1, b.layer);
        }
        assert_eq!(
            gc_graphcode_edge(gc, 4, &mut v, &mut w),
            GcStatus::OutOfRange
        );
        assert!(last_error().contains("edge 4"));

        let json = gc_graphcode_to_json(gc, true);
        let parsed: serde_json::Value =
            serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert_eq!(parsed["nodes"].as_array().unwrap().len(), 4);
        assert!(parsed["attrs"].is_object());
        gc_string_free(json);
        gc_graphcode_free(gc);
    }
}

#[test]
fn default_options_on_simplicial_input() {
    let (status, gc) = compute(
        "0 0 ; 0\n0 0 ; 1\n0 0 ; 2\n1 0 ; 0 1\n1 0 ; 1 2\n1 1 ; 0 2\n",
        None,
    );
    assert_eq!(status, GcStatus::Ok);
    unsafe {
        assert_eq!(gc_graphcode_slices(gc), 10);
        let mut n = GcNode::default();
        let count = gc_graphcode_node_count(gc);
        assert!(count > 0);
        assert_eq!(gc_graphcode_node(gc, count - 1, &mut n), GcStatus::Ok);
        assert_eq!((n.layer, n.birth), (10, 1.0));
        assert!(n.essential);
        gc_graphcode_free(gc);
    }
}

#[test]
fn errors_set_status_and_message() {
    let (status, gc) = compute("scc2020\n2\n1 1\n0 0 ; 5\n0 0 ;\n", None);
    assert_eq!(status, GcStatus::Parse);
    assert!(gc.is_null());
    assert!(last_error().starts_with("line 4"), "{}", last_error());

    let opts = GcOptions {
        primary_parameter: 3,
        ..gc_options_default()
    };
    assert_eq!(
        compute("0 0 ; 0\n", Some(opts)).0,
        GcStatus::InvalidArgument
    );

    let opts = GcOptions {
        slices: 0,
        ..gc_options_default()
    };
    assert_eq!(
        compute("0 0 ; 0\n", Some(opts)).0,
        GcStatus::InvalidArgument
    );

    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { gc_compute(ptr::null(), ptr::null(), &mut out) },
        GcStatus::NullPointer
    );

    let bad = [0xffu8, 0];
    let status = unsafe { gc_compute(bad.as_ptr().cast(), ptr::null(), &mut out) };
    assert_eq!(status, GcStatus::InvalidUtf8);
}

#[test]
fn null_handles_are_harmless() {
    unsafe {
        assert_eq!(gc_graphcode_node_count(ptr::null()), 0);
        assert!(gc_graphcode_to_json(ptr::null(), false).is_null());
        gc_graphcode_free(ptr::null_mut());
        gc_string_free(ptr::null_mut());
    }
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/graphcode.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in [
        "gc_compute",
        "gc_graphcode_free",
        "gc_last_error",
        "typedef struct GcGraphcode GcGraphcode",
    ] {
        assert!(text.contains(f), "{f} missing from header");
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"graphcode.h\"\nint main(void) { GcOptions o = gc_options_default(); GcGraphcode *g = 0;\n\
         return gc_compute(\"\", &o, &g) == GC_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    let Ok(out) = Command::new("cc")
        .arg("-fsyntax-only")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(header.parent().unwrap())
        .arg(&src)
        .output()
    else {
        eprintln!("no C compiler, skipping");
        return;
    };
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
