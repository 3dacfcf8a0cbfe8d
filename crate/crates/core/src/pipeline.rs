//! The whole compiler as one call.

use std::collections::BTreeMap;

use crate::codegen::{allocate, emit, lower, optimize, AssemblyListing, IrProgram};
use crate::diag::{Diagnostics, Result};
use crate::frontend::{parse_source, SourceUnit};
use crate::profiles::{bind_all, lookup_profile, validate, BindingTable, ProfileDescriptor};
use crate::sema::{check, TypedTree};

#[derive(Debug, Clone, Default)]
pub struct CompileOptions {
    pub entry: String,
    pub profile: String,
    /// `name=value` overrides of profile limits.
    pub limits: Vec<String>,
    /// Files available to `#include`, by name.
    pub includes: BTreeMap<String, String>,
    /// Macros defined before the first line.
    pub defines: BTreeMap<String, String>,
}

impl CompileOptions {
    pub fn new(entry: &str, profile: &str) -> Self {
        CompileOptions { entry: entry.to_string(), profile: profile.to_string(), ..Default::default() }
    }

    pub fn with_limit(mut self, overriding: &str) -> Self {
        self.limits.push(overriding.to_string());
        self
    }
}

/// Everything produced by a successful compilation.
#[derive(Debug, Clone)]
pub struct Compilation {
    pub tree: TypedTree,
    pub profile: ProfileDescriptor,
    pub bindings: BindingTable,
    /// Optimized, allocated IR.
    pub ir: IrProgram,
    pub listing: AssemblyListing,
}

/// Resolve a profile name and apply limit overrides.
pub fn resolve_profile(opts: &CompileOptions) -> Result<ProfileDescriptor> {
    let p = lookup_profile(&opts.profile).map_err(Diagnostics::single)?;
    p.with_overrides(&opts.limits).map_err(Diagnostics::single)
}

/// Parse and type-check without a profile.
pub fn check_source(unit: &SourceUnit, opts: &CompileOptions) -> Result<TypedTree> {
    let syntax = parse_source(unit, &opts.includes, &opts.defines)?;
    check(&syntax, &opts.entry)
}

pub fn compile(unit: &SourceUnit, opts: &CompileOptions) -> Result<Compilation> {
    let profile = resolve_profile(opts)?;
    let tree = check_source(unit, opts)?;
    let report = validate(&tree, &profile);
    if !report.ok() {
        return Err(Diagnostics(report.diagnostics));
    }
    let bindings = bind_all(&tree, &profile)?;
    let ir = allocate(&optimize(&lower(&tree, &bindings, &profile)?), &profile)?;
    let listing = emit(&ir, profile.kind);
    Ok(Compilation { tree, profile, bindings, ir, listing })
}

/// Compile source text held in memory.
pub fn compile_str(name: &str, text: &str, opts: &CompileOptions) -> Result<Compilation> {
    compile(&SourceUnit::new(name, text), opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::diag::Code;

    #[test]
    fn vertex_golden() {
        let c = compile_str("t.cg", corpus::SIMPLE_TRANSFORM, &CompileOptions::new("simpleTransform", "vs_1_1")).unwrap();
        let expected = "vs.1.1\nmov oT0, v7\nmov oT1, v8\ndp4 oPos.x, c1, v0\ndp4 oPos.y, c2, v0\n\
                        dp4 oPos.z, c3, v0\ndp4 oPos.w, c4, v0\nmul oD0, c0.x, v5\n";
        assert_eq!(c.listing.text, expected);
        assert_eq!(c.listing.instruction_count(), 7);
    }

    #[test]
    fn fragment_golden() {
        let c = compile_str("t.cg", corpus::BRIGHT_LIGHT_MAP_DECAL, &CompileOptions::new("brightLightMapDecal", "arbfp1"))
            .unwrap();
        let expected = "!!ARBfp1.0\nPARAM c0 = {2, 2, 2, 2};\nTEMP R0;\nTEMP R1;\nTEMP R2;\n\
                        TXP R0, fragment.texcoord[0], texture[0], 2D;\n\
                        TXP R1, fragment.texcoord[1], texture[1], 2D;\n\
                        MUL R2, c0.x, fragment.color.primary;\nMUL R0, R2, R0;\nMUL result.color, R0, R1;\nEND\n";
        assert_eq!(c.listing.text, expected);
    }

    #[test]
    fn listings_reparse() {
        for (src, entry, profile) in [
            (corpus::SIMPLE_TRANSFORM, "simpleTransform", "vs_1_1"),
            (corpus::SIMPLE_TRANSFORM, "simpleTransform", "arbvp1"),
            (corpus::BRIGHT_LIGHT_MAP_DECAL, "brightLightMapDecal", "arbfp1"),
        ] {
            let c = compile_str("t.cg", src, &CompileOptions::new(entry, profile)).unwrap();
            assert_eq!(crate::codegen::parse_listing(&c.listing.text).unwrap(), c.listing, "{profile}");
        }
    }

    #[test]
    fn stage_errors() {
        let e = compile_str("t.cg", corpus::BRIGHT_LIGHT_MAP_DECAL, &CompileOptions::new("brightLightMapDecal", "vs_1_1"))
            .unwrap_err();
        assert!(e.has_code(Code::TexInVertex));
        let opts = CompileOptions::new("simpleTransform", "vs_1_1").with_limit("max_instructions=3");
        assert!(compile_str("t.cg", corpus::SIMPLE_TRANSFORM, &opts).unwrap_err().has_code(Code::Capacity));
        let opts = CompileOptions::new("simpleTransform", "ps_9_9");
        assert!(compile_str("t.cg", corpus::SIMPLE_TRANSFORM, &opts).unwrap_err().has_code(Code::UnknownProfile));
    }
}
