use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use cgc::corpus;
use cgc_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn compile(src: &str, entry: &str, profile: &str, limits: Option<&str>) -> Result<*mut CgcProgram, (CgcStatus, String)> {
    let (src, entry, profile) = (c(src), c(entry), c(profile));
    let limits = limits.map(c);
    let mut out = ptr::null_mut();
    let status = unsafe {
        cgc_compile(src.as_ptr(), entry.as_ptr(), profile.as_ptr(), limits.as_ref().map_or(ptr::null(), |l| l.as_ptr()), &mut out)
    };
    if status == CgcStatus::Ok {
        Ok(out)
    } else {
        assert!(out.is_null());
        let code = unsafe { CStr::from_ptr(cgc_last_error_code()) }.to_str().unwrap().to_string();
        Err((status, code))
    }
}

#[test]
fn compiles_vertex_program() {
    let p = compile(corpus::SIMPLE_TRANSFORM, "simpleTransform", "vs_1_1", None).unwrap();
    unsafe {
        let text = CStr::from_ptr(cgc_program_listing(p)).to_str().unwrap();
        assert_eq!(text, corpus::SIMPLE_TRANSFORM_VS11);
        assert_eq!(cgc_program_instruction_count(p), 7);
        cgc_program_free(p);
    }
}

#[test]
fn compile_errors_carry_the_code() {
    let err = compile(corpus::SIMPLE_TRANSFORM, "simpleTransform", "vs_1_1", Some("max_instructions=3")).unwrap_err();
    assert_eq!(err, (CgcStatus::CompileError, "E_CAPACITY".to_string()));
    let msg = unsafe { CStr::from_ptr(cgc_last_error_message()) }.to_str().unwrap();
    assert!(msg.contains("E_CAPACITY"), "{msg}");

    let err = compile("float4 main(", "main", "arbfp1", None).unwrap_err();
    assert_eq!(err.0, CgcStatus::CompileError);
    assert!(err.1.starts_with("E_"));
}

#[test]
fn null_and_bad_utf8_arguments() {
    let mut out = ptr::null_mut();
    let entry = c("main");
    let status = unsafe { cgc_compile(ptr::null(), entry.as_ptr(), entry.as_ptr(), ptr::null(), &mut out) };
    assert_eq!(status, CgcStatus::NullArgument);
    let status = unsafe { cgc_compile(entry.as_ptr(), entry.as_ptr(), entry.as_ptr(), ptr::null(), ptr::null_mut()) };
    assert_eq!(status, CgcStatus::NullArgument);

    let bad = [0xffu8, 0xfe, 0];
    let status = unsafe { cgc_compile(bad.as_ptr().cast(), entry.as_ptr(), entry.as_ptr(), ptr::null(), &mut out) };
    assert_eq!(status, CgcStatus::InvalidUtf8);
    assert!(out.is_null());

    unsafe {
        assert!(cgc_program_listing(ptr::null()).is_null());
        assert_eq!(cgc_program_instruction_count(ptr::null()), 0);
        assert_eq!(cgc_execution_agrees(ptr::null(), 1.0), 0);
        cgc_program_free(ptr::null_mut());
        cgc_execution_free(ptr::null_mut());
    }
}

#[test]
fn executes_and_reads_outputs() {
    let p = compile(corpus::SIMPLE_TRANSFORM, "simpleTransform", "vs_1_1", None).unwrap();
    let json = c(r#"{
        "varying": {"POSITION": [1, 2, 3, 1], "COLOR": [0.5, 0.25, 1, 1],
                    "TEXCOORD0": [0.1, 0.2, 0, 1], "TEXCOORD1": [0.3, 0.4, 0, 1]},
        "uniform": {"brightness": 2,
                    "modelViewProjection": [1,0,0,0, 0,1,0,0, 0,0,1,0, 0,0,0,1]}
    }"#);
    unsafe {
        let mut exec = ptr::null_mut();
        assert_eq!(cgc_execute(p, json.as_ptr(), &mut exec), CgcStatus::Ok);
        assert_eq!(cgc_execution_agrees(exec, 1e-5), 1);
        assert_eq!(cgc_execution_discarded(exec, CgcInterpreter::Assembly), 0);
        let mut v = [0f32; 4];
        let pos = c("POSITION");
        assert_eq!(cgc_execution_output(exec, CgcInterpreter::Assembly, pos.as_ptr(), v.as_mut_ptr()), CgcStatus::Ok);
        assert_eq!(v, [1.0, 2.0, 3.0, 1.0]);
        let col = c("COLOR0");
        assert_eq!(cgc_execution_output(exec, CgcInterpreter::Source, col.as_ptr(), v.as_mut_ptr()), CgcStatus::Ok);
        assert_eq!(v, [1.0, 0.5, 2.0, 2.0]);
        let missing = c("TEXCOORD7");
        assert_eq!(cgc_execution_output(exec, CgcInterpreter::Source, missing.as_ptr(), v.as_mut_ptr()), CgcStatus::NotFound);
        cgc_execution_free(exec);

        let broken = c("{\"varying\": 3}");
        assert_eq!(cgc_execute(p, broken.as_ptr(), &mut exec), CgcStatus::InputError);
        assert!(exec.is_null());
        cgc_program_free(p);
    }
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include").join("cgc.h")
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(header()).unwrap();
    for name in [
        "cgc_compile",
        "cgc_program_listing",
        "cgc_program_instruction_count",
        "cgc_program_free",
        "cgc_execute",
        "cgc_execution_agrees",
        "cgc_execution_discarded",
        "cgc_execution_output",
        "cgc_execution_free",
        "cgc_last_error_message",
        "cgc_last_error_code",
        "typedef struct CgcProgram CgcProgram;",
        "CGC_STATUS_COMPILE_ERROR = 3",
    ] {
        assert!(h.contains(name), "header lacks {name}");
    }
}

/// Build a tiny C program against the header and static library. Skipped
/// when no C compiler is on the path.
#[test]
fn c_program_links_and_runs() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no cc");
        return;
    }
    // The test binary lives in target/<profile>/deps; the static library
    // one directory up.
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf();
    let lib = lib_dir.join("libcgc_ffi.a");
    if !lib.exists() {
        eprintln!("skipping: {} not built", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let c_src = dir.path().join("smoke.c");
    std::fs::write(
        &c_src,
        r#"#include <stdio.h>
#include "cgc.h"
int main(void) {
    const char *src = "float4 main(float4 c : COLOR) : COLOR { return c * 2; }";
    CgcProgram *p = NULL;
    if (cgc_compile(src, "main", "arbfp1", NULL, &p) != CGC_STATUS_OK) {
        fprintf(stderr, "%s\n", cgc_last_error_message());
        return 1;
    }
    printf("%zu\n%s", cgc_program_instruction_count(p), cgc_program_listing(p));
    cgc_program_free(p);
    if (cgc_compile("void", "main", "arbfp1", NULL, &p) != CGC_STATUS_COMPILE_ERROR) return 2;
    printf("%s\n", cgc_last_error_code());
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.path().join("smoke");
    let status = Command::new("cc")
        .arg(&c_src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("1"));
    assert_eq!(lines.next(), Some("!!ARBfp1.0"));
    assert!(text.contains("MUL result.color"));
    assert!(text.trim_end().lines().last().unwrap().starts_with("E_"));
}
