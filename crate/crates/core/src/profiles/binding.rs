//! Binding of entry parameters and uniform globals to registers.
//!
//! Uniform data goes to constant registers in declaration order from `c0`:
//! entry parameters first, then uniform globals. Scalars and vectors take
//! one register; an R×C matrix takes R consecutive registers, one row each.
//! Samplers take texture units in the same order from unit 0. Unreferenced
//! uniforms are bound too, so the layout depends only on declarations.

use super::{normalize_semantic, ProfileDescriptor};
use crate::diag::{Code, Diagnostic, Diagnostics, Loc, Result};
use crate::sema::{GlobalId, Qualifier, TypedTree, VarId};
use crate::types::{SamplerDim, Type};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UniformSource {
    Param(VarId),
    Global(GlobalId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UniformSlot {
    Constants { base: u32, count: u32 },
    Texture { unit: u32, dim: SamplerDim },
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniformBinding {
    pub name: String,
    pub ty: Type,
    pub source: UniformSource,
    pub slot: UniformSlot,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VaryingBinding {
    /// Parameter name, or `return` for the return value.
    pub name: String,
    /// `None` for the return value.
    pub param: Option<VarId>,
    /// Normalized semantic (`COLOR0`, `TEXCOORD1`, ...).
    pub semantic: String,
    pub register: String,
    pub ty: Type,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BindingTable {
    pub uniforms: Vec<UniformBinding>,
    pub inputs: Vec<VaryingBinding>,
    pub outputs: Vec<VaryingBinding>,
}

impl BindingTable {
    pub fn uniform(&self, name: &str) -> Option<&UniformBinding> {
        self.uniforms.iter().find(|u| u.name == name)
    }

    pub fn uniform_for(&self, source: UniformSource) -> Option<&UniformBinding> {
        self.uniforms.iter().find(|u| u.source == source)
    }

    pub fn input_for(&self, var: VarId) -> Option<&VaryingBinding> {
        self.inputs.iter().find(|b| b.param == Some(var))
    }

    pub fn output(&self, param: Option<VarId>) -> Option<&VaryingBinding> {
        self.outputs.iter().find(|b| b.param == param)
    }

    /// Number of constant registers occupied by uniforms.
    pub fn constant_registers(&self) -> u32 {
        self.uniforms
            .iter()
            .map(|u| match u.slot {
                UniformSlot::Constants { base, count } => base + count,
                UniformSlot::Texture { .. } => 0,
            })
            .max()
            .unwrap_or(0)
    }
}

/// Constant registers needed to hold a uniform of type `ty`.
pub fn constant_register_count(ty: &Type) -> Option<u32> {
    match ty {
        Type::Scalar(_) | Type::Vector(..) => Some(1),
        Type::Matrix(_, r, _) => Some(*r as u32),
        Type::Array(e, n) => Some(constant_register_count(e)? * n),
        Type::Record(r) => r.fields.iter().map(|f| constant_register_count(&f.ty)).sum(),
        Type::Sampler(_) | Type::Void => None,
    }
}

fn varying_type_ok(ty: &Type) -> bool {
    matches!(ty, Type::Scalar(b) | Type::Vector(b, _) if b.is_numeric())
}

/// Input and output registers for the entry's varying parameters and return
/// value.
pub fn bind_inputs(tree: &TypedTree, profile: &ProfileDescriptor) -> Result<BindingTable> {
    let f = tree.entry_fn();
    let mut diags = Vec::new();
    let mut table = BindingTable::default();
    let mut bind = |name: &str, param: Option<VarId>, ty: &Type, sem: &Option<String>, loc: Loc, output: bool| {
        let Some(sem) = sem else {
            return Err(Diagnostic::error(Code::BadSemantic, loc, format!("`{name}` needs a semantic such as `: COLOR`")));
        };
        if !varying_type_ok(ty) {
            return Err(Diagnostic::error(Code::Unsupported, loc, format!("varying `{name}` cannot have type {ty}")));
        }
        let norm = normalize_semantic(sem);
        let reg = if output { profile.output_register(&norm) } else { profile.input_register(&norm) };
        let Some(register) = reg else {
            let dir = if output { "output" } else { "input" };
            return Err(Diagnostic::error(
                Code::BadSemantic,
                loc,
                format!("semantic `{sem}` is not a valid {dir} for profile {}", profile.name),
            ));
        };
        let list = if output { &mut table.outputs } else { &mut table.inputs };
        if list.iter().any(|b| b.semantic == norm) {
            return Err(Diagnostic::error(Code::DuplicateSemantic, loc, format!("semantic `{sem}` is bound twice")));
        }
        list.push(VaryingBinding { name: name.to_string(), param, semantic: norm, register, ty: ty.clone() });
        Ok(())
    };
    for p in &f.params {
        if p.is_uniform() {
            continue;
        }
        if p.qualifier != Qualifier::Out {
            if let Err(d) = bind(&p.name, Some(p.var), &p.ty, &p.semantic, p.loc, false) {
                diags.push(d);
            }
        }
        if p.qualifier.writes_back() {
            if let Err(d) = bind(&p.name, Some(p.var), &p.ty, &p.semantic, p.loc, true) {
                diags.push(d);
            }
        }
    }
    if f.ret != Type::Void {
        if let Err(d) = bind("return", None, &f.ret, &f.return_semantic, f.loc, true) {
            diags.push(d);
        }
    }
    if diags.is_empty() {
        Ok(table)
    } else {
        Err(Diagnostics(diags))
    }
}

/// Constant registers and texture units for every uniform.
pub fn bind_uniforms(tree: &TypedTree, profile: &ProfileDescriptor) -> Result<BindingTable> {
    let f = tree.entry_fn();
    let mut sources: Vec<(String, Type, UniformSource, Loc)> = Vec::new();
    for p in f.params.iter().filter(|p| p.is_uniform()) {
        sources.push((p.name.clone(), p.ty.clone(), UniformSource::Param(p.var), p.loc));
    }
    for (i, g) in tree.globals.iter().enumerate().filter(|(_, g)| g.is_uniform()) {
        sources.push((g.name.clone(), g.ty.clone(), UniformSource::Global(i), g.loc));
    }
    let mut diags = Vec::new();
    let mut table = BindingTable::default();
    let (mut next_reg, mut next_unit) = (0u32, 0u32);
    for (name, ty, source, loc) in sources {
        if table.uniform(&name).is_some() {
            diags.push(Diagnostic::error(Code::Redefinition, loc, format!("two uniforms are named `{name}`")));
            continue;
        }
        let slot = match &ty {
            Type::Sampler(dim) => {
                next_unit += 1;
                UniformSlot::Texture { unit: next_unit - 1, dim: *dim }
            }
            t if t.contains_sampler() => {
                diags.push(Diagnostic::error(Code::Unsupported, loc, format!("uniform `{name}` mixes samplers into {t}")));
                continue;
            }
            t => {
                let count = constant_register_count(t).unwrap_or(0);
                next_reg += count;
                UniformSlot::Constants { base: next_reg - count, count }
            }
        };
        table.uniforms.push(UniformBinding { name, ty, source, slot });
    }
    if next_reg > profile.limits.max_constants {
        diags.push(Diagnostic::error(
            Code::Capacity,
            Loc::default(),
            format!("uniforms need {next_reg} constant registers; profile {} allows {}", profile.name, profile.limits.max_constants),
        ));
    }
    if diags.is_empty() {
        Ok(table)
    } else {
        Err(Diagnostics(diags))
    }
}

/// Inputs, outputs and uniforms together.
pub fn bind_all(tree: &TypedTree, profile: &ProfileDescriptor) -> Result<BindingTable> {
    let io = bind_inputs(tree, profile);
    let uni = bind_uniforms(tree, profile);
    match (io, uni) {
        (Ok(io), Ok(uni)) => Ok(BindingTable { uniforms: uni.uniforms, inputs: io.inputs, outputs: io.outputs }),
        (Err(a), Err(b)) => Err(Diagnostics(a.0.into_iter().chain(b.0).collect())),
        (Err(e), _) | (_, Err(e)) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::frontend::{parse_source, SourceUnit};
    use crate::profiles::lookup_profile;
    use std::collections::BTreeMap;

    fn tree(src: &str, entry: &str) -> TypedTree {
        let t = parse_source(&SourceUnit::new("t.cg", src), &BTreeMap::new(), &BTreeMap::new()).unwrap();
        crate::sema::check(&t, entry).unwrap()
    }

    #[test]
    fn simple_transform_vs11() {
        let t = tree(corpus::SIMPLE_TRANSFORM, "simpleTransform");
        let p = lookup_profile("vs_1_1").unwrap();
        let b = bind_all(&t, &p).unwrap();
        let reg = |n: &str| b.inputs.iter().find(|x| x.name == n).unwrap().register.clone();
        assert_eq!(reg("objectPosition"), "v0");
        assert_eq!(reg("color"), "v5");
        assert_eq!(reg("decalCoord"), "v7");
        assert_eq!(reg("lightMapCoord"), "v8");
        let outs: Vec<&str> = b.outputs.iter().map(|o| o.register.as_str()).collect();
        assert_eq!(outs, vec!["oPos", "oD0", "oT0", "oT1"]);
        assert_eq!(b.uniform("brightness").unwrap().slot, UniformSlot::Constants { base: 0, count: 1 });
        assert_eq!(b.uniform("modelViewProjection").unwrap().slot, UniformSlot::Constants { base: 1, count: 4 });
    }

    #[test]
    fn bright_light_map_decal_arbfp1() {
        let t = tree(corpus::BRIGHT_LIGHT_MAP_DECAL, "brightLightMapDecal");
        let b = bind_all(&t, &lookup_profile("arbfp1").unwrap()).unwrap();
        assert_eq!(b.input_for(0).unwrap().register, "fragment.color.primary");
        assert_eq!(b.inputs[1].register, "fragment.texcoord[0]");
        assert_eq!(b.outputs[0].register, "result.color");
        assert_eq!(b.uniform("decal").unwrap().slot, UniformSlot::Texture { unit: 0, dim: SamplerDim::D2 });
        assert_eq!(b.uniform("lightMap").unwrap().slot, UniformSlot::Texture { unit: 1, dim: SamplerDim::D2 });
    }

    #[test]
    fn empty_and_bad_semantics() {
        let t = tree("float4 f() : COLOR { return float4(1,1,1,1); }", "f");
        let b = bind_all(&t, &lookup_profile("arbfp1").unwrap()).unwrap();
        assert!(b.inputs.is_empty() && b.uniforms.is_empty());
        let t = tree("float4 f(float4 a : BOGUS) : COLOR { return a; }", "f");
        assert!(bind_inputs(&t, &lookup_profile("arbfp1").unwrap()).unwrap_err().has_code(Code::BadSemantic));
        let t = tree("float4 f(float4 a : COLOR, float4 b : COLOR0) : COLOR { return a + b; }", "f");
        assert!(bind_inputs(&t, &lookup_profile("arbfp1").unwrap()).unwrap_err().has_code(Code::DuplicateSemantic));
    }

    #[test]
    fn constant_capacity() {
        let t = tree(corpus::SIMPLE_TRANSFORM, "simpleTransform");
        let p = lookup_profile("vs_1_1").unwrap().with_overrides(&["max_constants=4"]).unwrap();
        assert!(bind_uniforms(&t, &p).unwrap_err().has_code(Code::Capacity));
    }
}
