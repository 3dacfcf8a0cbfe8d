//! Command-line driver.
//!
//! Exit codes: 0 success, 1 I/O or usage fault, 2 compile diagnostics,
//! 3 differential mismatch between the two interpreters.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::codegen::parse_listing;
use crate::diag::Diagnostics;
use crate::pipeline::{check_source, compile, resolve_profile, CompileOptions};
use crate::profiles::validate;
use crate::frontend::SourceUnit;
use crate::vm::{compare, run_asm, run_cg, ShadeInput};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_DIAG: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "cgc", version, about = "Compile and cross-check Cg-subset shaders")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compile a program and write the assembly listing.
    Compile {
        #[command(flatten)]
        common: Common,
        /// Output file; standard output when absent.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Compile, then run both interpreters on each test-vector file and
    /// compare their results.
    Run {
        #[command(flatten)]
        common: Common,
        /// Test-vector JSON file (repeatable).
        #[arg(long, required = true)]
        vectors: Vec<PathBuf>,
        /// Largest accepted absolute difference per component.
        #[arg(long, default_value_t = 1e-5)]
        tolerance: f32,
        /// Run this listing on the assembly interpreter instead of the
        /// compiled one.
        #[arg(long)]
        asm_override: Option<PathBuf>,
    },
    /// Parse, type-check and validate against the profile, without code
    /// generation.
    Check {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Cg source file.
    source: PathBuf,
    #[arg(long)]
    entry: String,
    #[arg(long)]
    profile: String,
    /// Profile limit override `name=value` (repeatable).
    #[arg(long = "limit")]
    limits: Vec<String>,
    /// Predefined macro `NAME` or `NAME=VALUE` (repeatable).
    #[arg(short = 'D', long = "define")]
    defines: Vec<String>,
    #[arg(long, value_enum, default_value_t = DiagFormat::Human)]
    diag_format: DiagFormat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DiagFormat {
    Human,
    Json,
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

/// Run the command line `args` (program name first) and return the exit
/// code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let informational = matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion);
            if informational {
                let _ = write!(out, "{}", e.render());
                return EXIT_OK;
            }
            let _ = write!(err, "{}", e.render());
            return EXIT_IO;
        }
    };
    let mut io = Io { out, err };
    match cli.command {
        Command::Compile { common, out } => cmd_compile(&mut io, &common, out.as_deref()),
        Command::Run { common, vectors, tolerance, asm_override } => {
            cmd_run(&mut io, &common, &vectors, tolerance, asm_override.as_deref())
        }
        Command::Check { common } => cmd_check(&mut io, &common),
    }
}

/// Source unit plus every sibling file, offered to `#include` by name.
fn load(io: &mut Io<'_>, c: &Common) -> Result<(SourceUnit, CompileOptions), i32> {
    let text = std::fs::read_to_string(&c.source).map_err(|e| {
        let _ = writeln!(io.err, "cgc: cannot read {}: {e}", c.source.display());
        EXIT_IO
    })?;
    let mut opts = CompileOptions::new(&c.entry, &c.profile);
    opts.limits = c.limits.clone();
    for d in &c.defines {
        let (k, v) = d.split_once('=').unwrap_or((d, "1"));
        opts.defines.insert(k.to_string(), v.to_string());
    }
    opts.includes = siblings(&c.source);
    let name = c.source.file_name().map_or_else(|| c.source.display().to_string(), |n| n.to_string_lossy().into_owned());
    Ok((SourceUnit::new(name, text), opts))
}

fn siblings(source: &Path) -> BTreeMap<String, String> {
    let dir = source.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut map = BTreeMap::new();
    let Ok(entries) = std::fs::read_dir(dir) else { return map };
    for e in entries.flatten() {
        let path = e.path();
        if path.is_file() && path != source {
            if let (Some(name), Ok(text)) = (path.file_name(), std::fs::read_to_string(&path)) {
                map.insert(name.to_string_lossy().into_owned(), text);
            }
        }
    }
    map
}

fn report(io: &mut Io<'_>, c: &Common, diags: &Diagnostics) {
    for d in &diags.0 {
        let _ = match c.diag_format {
            DiagFormat::Json => writeln!(io.err, "{}", d.to_json_line()),
            DiagFormat::Human => writeln!(io.err, "{}:{d}", c.source.display()),
        };
    }
}

fn cmd_compile(io: &mut Io<'_>, c: &Common, out: Option<&Path>) -> i32 {
    let (unit, opts) = match load(io, c) {
        Ok(x) => x,
        Err(code) => return code,
    };
    let compiled = match compile(&unit, &opts) {
        Ok(x) => x,
        Err(d) => {
            report(io, c, &d);
            return EXIT_DIAG;
        }
    };
    match out {
        None => {
            let _ = io.out.write_all(compiled.listing.text.as_bytes());
            EXIT_OK
        }
        Some(path) => match std::fs::write(path, &compiled.listing.text) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                let _ = writeln!(io.err, "cgc: cannot write {}: {e}", path.display());
                EXIT_IO
            }
        },
    }
}

fn cmd_check(io: &mut Io<'_>, c: &Common) -> i32 {
    let (unit, opts) = match load(io, c) {
        Ok(x) => x,
        Err(code) => return code,
    };
    let result = resolve_profile(&opts).and_then(|p| {
        let tree = check_source(&unit, &opts)?;
        let r = validate(&tree, &p);
        if r.ok() {
            Ok(r.diagnostics)
        } else {
            Err(Diagnostics(r.diagnostics))
        }
    });
    match result {
        Ok(warnings) => {
            if !warnings.is_empty() {
                report(io, c, &Diagnostics(warnings));
            }
            let _ = writeln!(io.out, "ok");
            EXIT_OK
        }
        Err(d) => {
            report(io, c, &d);
            EXIT_DIAG
        }
    }
}

fn cmd_run(io: &mut Io<'_>, c: &Common, vectors: &[PathBuf], tolerance: f32, asm_override: Option<&Path>) -> i32 {
    let (unit, opts) = match load(io, c) {
        Ok(x) => x,
        Err(code) => return code,
    };
    let compiled = match compile(&unit, &opts) {
        Ok(x) => x,
        Err(d) => {
            report(io, c, &d);
            return EXIT_DIAG;
        }
    };
    let listing = match asm_override {
        None => compiled.listing.clone(),
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => {
                    let _ = writeln!(io.err, "cgc: cannot read {}: {e}", path.display());
                    return EXIT_IO;
                }
            };
            match parse_listing(&text) {
                Ok(l) => l,
                Err(d) => {
                    let _ = match c.diag_format {
                        DiagFormat::Json => writeln!(io.err, "{}", d.to_json_line()),
                        DiagFormat::Human => writeln!(io.err, "{}:{d}", path.display()),
                    };
                    return EXIT_DIAG;
                }
            }
        }
    };
    let mut all_agree = true;
    for path in vectors {
        let input = match ShadeInput::from_json_file(path) {
            Ok(i) => i,
            Err(e) => {
                let _ = writeln!(io.err, "cgc: {}: {e}", path.display());
                return EXIT_IO;
            }
        };
        let cg = match run_cg(&compiled.tree, &input) {
            Ok(r) => r,
            Err(e) => {
                let _ = writeln!(io.err, "cgc: {}: source interpreter: {e}", path.display());
                return EXIT_IO;
            }
        };
        let _ = writeln!(io.out, "{}:", path.display());
        let _ = writeln!(io.out, "  cg:  {cg}");
        match run_asm(&listing, &input, &compiled.bindings) {
            Ok(asm) => {
                let _ = writeln!(io.out, "  asm: {asm}");
                let verdict = compare(&cg, &asm, tolerance);
                all_agree &= verdict.equal;
                let _ = writeln!(io.out, "  {verdict}");
            }
            Err(e) => {
                all_agree = false;
                let _ = writeln!(io.out, "  asm: error: {e}");
                let _ = writeln!(io.out, "  MISMATCH (assembly run failed)");
            }
        }
    }
    if all_agree {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    }
}
