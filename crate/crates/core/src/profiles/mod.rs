//! Compilation targets: register conventions, capabilities, capacity limits,
//! profile-dependent validation and the binding of parameters to registers.

mod binding;
mod taint;
mod validate;

pub use binding::{bind_inputs, bind_uniforms, bind_all, BindingTable, UniformBinding, UniformSlot, UniformSource, VaryingBinding};
pub use validate::{validate, ValidationReport};
pub(crate) use validate::is_discard_only;

use std::fmt;

use crate::diag::{Code, Diagnostic, Loc};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Vertex,
    Fragment,
}

/// Assembly dialect of an implemented profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProfileKind {
    Vs11,
    ArbVp1,
    ArbFp1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Limits {
    pub max_instructions: u32,
    pub max_constants: u32,
    pub max_temps: u32,
    pub texture_units: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Capabilities {
    pub allows_texture_fetch: bool,
    pub allows_data_dependent_branch: bool,
    pub allows_variable_indexing: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProfileDescriptor {
    pub name: &'static str,
    pub kind: ProfileKind,
    pub stage: Stage,
    pub limits: Limits,
    pub caps: Capabilities,
}

const UNIMPLEMENTED: &[&str] = &["vs_2_0", "ps_1_3", "ps_2_x", "vp20", "vp30", "fp20", "fp30"];

/// Canonical form of a semantic: upper case, `COLOR` ≡ `COLOR0`,
/// `TEXCOORD` ≡ `TEXCOORD0`, `POSITION0` ≡ `POSITION`.
pub fn normalize_semantic(s: &str) -> String {
    let up = s.to_ascii_uppercase();
    match up.as_str() {
        "COLOR" => "COLOR0".into(),
        "TEXCOORD" => "TEXCOORD0".into(),
        "POSITION0" => "POSITION".into(),
        _ => up,
    }
}

fn texcoord_index(sem: &str) -> Option<u32> {
    let n: u32 = sem.strip_prefix("TEXCOORD")?.parse().ok()?;
    (n < 8).then_some(n)
}

/// True for `TEXCOORDn` semantics.
pub fn is_texcoord(sem: &str) -> bool {
    normalize_semantic(sem).starts_with("TEXCOORD")
}

impl ProfileDescriptor {
    pub fn is_vertex(&self) -> bool {
        self.stage == Stage::Vertex
    }

    /// Input register for a (normalized) varying semantic.
    pub fn input_register(&self, semantic: &str) -> Option<String> {
        let sem = normalize_semantic(semantic);
        let tc = texcoord_index(&sem);
        match self.kind {
            ProfileKind::Vs11 => {
                let n = match sem.as_str() {
                    "POSITION" => 0,
                    "BLENDWEIGHT" => 1,
                    "BLENDINDICES" => 2,
                    "NORMAL" => 3,
                    "PSIZE" => 4,
                    "COLOR0" => 5,
                    "COLOR1" => 6,
                    _ => 7 + tc?,
                };
                Some(format!("v{n}"))
            }
            ProfileKind::ArbVp1 => Some(match sem.as_str() {
                "POSITION" => "vertex.position".into(),
                "BLENDWEIGHT" => "vertex.weight".into(),
                "NORMAL" => "vertex.normal".into(),
                "COLOR0" => "vertex.color".into(),
                "COLOR1" => "vertex.color.secondary".into(),
                _ => format!("vertex.texcoord[{}]", tc?),
            }),
            ProfileKind::ArbFp1 => Some(match sem.as_str() {
                "COLOR0" => "fragment.color.primary".into(),
                "COLOR1" => "fragment.color.secondary".into(),
                _ => format!("fragment.texcoord[{}]", tc?),
            }),
        }
    }

    /// Output register for a (normalized) semantic.
    pub fn output_register(&self, semantic: &str) -> Option<String> {
        let sem = normalize_semantic(semantic);
        let tc = texcoord_index(&sem);
        match self.kind {
            ProfileKind::Vs11 => Some(match sem.as_str() {
                "POSITION" => "oPos".into(),
                "COLOR0" => "oD0".into(),
                "COLOR1" => "oD1".into(),
                _ => format!("oT{}", tc?),
            }),
            ProfileKind::ArbVp1 => Some(match sem.as_str() {
                "POSITION" => "result.position".into(),
                "COLOR0" => "result.color".into(),
                "COLOR1" => "result.color.secondary".into(),
                _ => format!("result.texcoord[{}]", tc?),
            }),
            ProfileKind::ArbFp1 => match sem.as_str() {
                "COLOR0" => Some("result.color".into()),
                _ => None,
            },
        }
    }

    /// Override one limit by name (`max_instructions`, `max_constants`,
    /// `max_temps`, `texture_units`).
    pub fn set_limit(&mut self, name: &str, value: u32) -> Result<(), Diagnostic> {
        let slot = match name {
            "max_instructions" => &mut self.limits.max_instructions,
            "max_constants" => &mut self.limits.max_constants,
            "max_temps" => &mut self.limits.max_temps,
            "texture_units" => &mut self.limits.texture_units,
            other => return Err(Diagnostic::error(Code::BadLimit, Loc::default(), format!("unknown limit `{other}`"))),
        };
        if value == 0 && name != "texture_units" {
            return Err(Diagnostic::error(Code::BadLimit, Loc::default(), format!("limit `{name}` must be positive")));
        }
        *slot = value;
        Ok(())
    }

    /// Apply `name=value` overrides in order.
    pub fn with_overrides<S: AsRef<str>>(mut self, overrides: &[S]) -> Result<Self, Diagnostic> {
        for o in overrides {
            let (name, value) = parse_limit_override(o.as_ref())?;
            self.set_limit(&name, value)?;
        }
        Ok(self)
    }
}

impl fmt::Display for ProfileDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name)
    }
}

/// Split `name=value` into its parts.
pub fn parse_limit_override(text: &str) -> Result<(String, u32), Diagnostic> {
    let bad = || Diagnostic::error(Code::BadLimit, Loc::default(), format!("limit override `{text}` must look like name=value"));
    let (name, value) = text.split_once('=').ok_or_else(bad)?;
    let value: u32 = value.trim().parse().map_err(|_| bad())?;
    Ok((name.trim().to_string(), value))
}

/// Descriptor for an implemented profile name.
pub fn lookup_profile(name: &str) -> Result<ProfileDescriptor, Diagnostic> {
    let vertex_caps =
        Capabilities { allows_texture_fetch: false, allows_data_dependent_branch: false, allows_variable_indexing: false };
    let vertex_limits = Limits { max_instructions: 128, max_constants: 96, max_temps: 12, texture_units: 0 };
    let (kind, stage, limits, caps) = match name {
        "vs_1_1" => (ProfileKind::Vs11, Stage::Vertex, vertex_limits, vertex_caps),
        "arbvp1" => (ProfileKind::ArbVp1, Stage::Vertex, vertex_limits, vertex_caps),
        "arbfp1" => (
            ProfileKind::ArbFp1,
            Stage::Fragment,
            Limits { max_instructions: 96, max_constants: 24, max_temps: 16, texture_units: 4 },
            Capabilities { allows_texture_fetch: true, ..vertex_caps },
        ),
        n if UNIMPLEMENTED.contains(&n) => {
            return Err(Diagnostic::error(
                Code::UnimplementedProfile,
                Loc::default(),
                format!("profile `{n}` is recognized but not implemented"),
            ))
        }
        n => return Err(Diagnostic::error(Code::UnknownProfile, Loc::default(), format!("unknown profile `{n}`"))),
    };
    let name = match kind {
        ProfileKind::Vs11 => "vs_1_1",
        ProfileKind::ArbVp1 => "arbvp1",
        ProfileKind::ArbFp1 => "arbfp1",
    };
    Ok(ProfileDescriptor { name, kind, stage, limits, caps })
}
