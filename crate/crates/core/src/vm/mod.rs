//! Execution of single vertices or fragments.
//!
//! [`run_cg`] interprets the typed tree directly and serves as the semantic
//! reference. [`run_asm`] executes an assembly listing on a register
//! machine. [`compare`] decides whether two results agree.

mod asm;
mod cg;

pub use asm::{run_asm, step, MachineState};
pub use cg::run_cg;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde_json::Value as Json;

use crate::profiles::normalize_semantic;
use crate::stdlib::texture::{TextureError, TextureImage};
use crate::stdlib::TextureUnits;
use crate::types::Type;
use crate::value::EvalError;

/// Values for one invocation: varying registers by semantic, uniforms by
/// name (flattened row-major components) and textures by unit.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ShadeInput {
    pub varying: BTreeMap<String, [f32; 4]>,
    pub uniform: BTreeMap<String, Vec<f32>>,
    pub textures: TextureUnits,
}

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("test vectors are not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("test vectors: {0}")]
    Shape(String),
    #[error("texture {path}: {source}")]
    Texture { path: PathBuf, source: TextureError },
}

impl ShadeInput {
    pub fn with_varying(mut self, semantic: &str, v: [f32; 4]) -> Self {
        self.varying.insert(normalize_semantic(semantic), v);
        self
    }

    pub fn with_uniform(mut self, name: &str, v: impl Into<Vec<f32>>) -> Self {
        self.uniform.insert(name.to_string(), v.into());
        self
    }

    pub fn with_texture(mut self, unit: u32, image: TextureImage) -> Self {
        self.textures.insert(unit, image);
        self
    }

    pub fn varying(&self, semantic: &str) -> Option<[f32; 4]> {
        self.varying.get(&normalize_semantic(semantic)).copied()
    }

    /// Parse a test-vector document. Texture paths are resolved against
    /// `base_dir`.
    pub fn from_json_str(text: &str, base_dir: &Path) -> Result<Self, InputError> {
        let doc: Json = serde_json::from_str(text)?;
        let Json::Object(top) = doc else {
            return Err(InputError::Shape("top level must be an object".into()));
        };
        let mut input = ShadeInput::default();
        for (key, value) in &top {
            match key.as_str() {
                "varying" => {
                    for (sem, v) in object(value, "varying")? {
                        let comps = flatten(v).ok_or_else(|| InputError::Shape(format!("varying `{sem}` must be numbers")))?;
                        if comps.is_empty() || comps.len() > 4 {
                            return Err(InputError::Shape(format!("varying `{sem}` needs 1 to 4 numbers")));
                        }
                        let mut reg = [0.0, 0.0, 0.0, 1.0];
                        reg[..comps.len()].copy_from_slice(&comps);
                        input.varying.insert(normalize_semantic(sem), reg);
                    }
                }
                "uniform" => {
                    for (name, v) in object(value, "uniform")? {
                        let comps = flatten(v).ok_or_else(|| InputError::Shape(format!("uniform `{name}` must be numbers")))?;
                        input.uniform.insert(name.clone(), comps);
                    }
                }
                "textures" => {
                    for (unit, v) in object(value, "textures")? {
                        let unit: u32 = unit.parse().map_err(|_| InputError::Shape(format!("texture unit `{unit}` is not a number")))?;
                        let Json::String(rel) = v else {
                            return Err(InputError::Shape(format!("texture unit {unit} must name a file")));
                        };
                        let path = base_dir.join(rel);
                        let text =
                            std::fs::read_to_string(&path).map_err(|source| InputError::Io { path: path.clone(), source })?;
                        let image = TextureImage::parse(&text).map_err(|source| InputError::Texture { path, source })?;
                        input.textures.insert(unit, image);
                    }
                }
                other => return Err(InputError::Shape(format!("unknown key `{other}`"))),
            }
        }
        Ok(input)
    }

    pub fn from_json_file(path: &Path) -> Result<Self, InputError> {
        let text = std::fs::read_to_string(path).map_err(|source| InputError::Io { path: path.to_path_buf(), source })?;
        Self::from_json_str(&text, path.parent().unwrap_or(Path::new(".")))
    }
}

fn object<'a>(v: &'a Json, what: &str) -> Result<&'a serde_json::Map<String, Json>, InputError> {
    v.as_object().ok_or_else(|| InputError::Shape(format!("`{what}` must be an object")))
}

/// Numbers, booleans and (nested) arrays of them, flattened in order.
fn flatten(v: &Json) -> Option<Vec<f32>> {
    match v {
        Json::Number(n) => Some(vec![n.as_f64()? as f32]),
        Json::Bool(b) => Some(vec![if *b { 1.0 } else { 0.0 }]),
        Json::Array(items) => {
            let mut out = Vec::new();
            for i in items {
                out.extend(flatten(i)?);
            }
            Some(out)
        }
        _ => None,
    }
}

/// Number of numeric components in a uniform of type `ty` once flattened.
pub(crate) fn flat_len(ty: &Type) -> usize {
    match ty {
        Type::Scalar(_) | Type::Vector(..) | Type::Matrix(..) => ty.component_count(),
        Type::Array(e, n) => flat_len(e) * *n as usize,
        Type::Record(r) => r.fields.iter().map(|f| flat_len(&f.ty)).sum(),
        Type::Sampler(_) | Type::Void => 0,
    }
}

/// The flattened components supplied for uniform `name`. Single-register
/// types also accept a longer list and use its prefix, so a `float3` can be
/// given as four numbers.
pub(crate) fn uniform_components<'a>(input: &'a ShadeInput, name: &str, ty: &Type) -> Result<&'a [f32], ExecError> {
    let given = input.uniform.get(name).ok_or_else(|| ExecError::MissingUniform(name.to_string()))?;
    let need = flat_len(ty);
    let single = matches!(ty, Type::Scalar(_) | Type::Vector(..));
    if given.len() == need || (single && given.len() > need) {
        Ok(&given[..need])
    } else {
        Err(ExecError::UniformShape { name: name.to_string(), expected: need, got: given.len() })
    }
}

/// Outputs of one invocation, keyed by normalized semantic.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExecResult {
    pub outputs: BTreeMap<String, [f32; 4]>,
    pub discarded: bool,
}

impl ExecResult {
    pub fn discarded() -> Self {
        ExecResult { outputs: BTreeMap::new(), discarded: true }
    }

    pub fn output(&self, semantic: &str) -> Option<[f32; 4]> {
        self.outputs.get(&normalize_semantic(semantic)).copied()
    }
}

impl fmt::Display for ExecResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.discarded {
            return f.write_str("discarded");
        }
        for (i, (sem, v)) in self.outputs.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{sem}=({}, {}, {}, {})", v[0], v[1], v[2], v[3])?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExecError {
    #[error("no value for varying semantic {0}")]
    MissingVarying(String),
    #[error("no value for uniform `{0}`")]
    MissingUniform(String),
    #[error("uniform `{name}` needs {expected} components, got {got}")]
    UniformShape { name: String, expected: usize, got: usize },
    #[error("out parameter `{0}` read before it was written")]
    UnwrittenOut(String),
    #[error("read of uninitialized {0}")]
    Uninitialized(String),
    #[error("unknown opcode `{0}`")]
    UnknownOpcode(String),
    #[error("register {0} is out of range")]
    RegisterOutOfRange(String),
    #[error("execution exceeded {0} steps")]
    StepLimit(u64),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Outcome of [`compare`].
#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub equal: bool,
    pub discard_mismatch: bool,
    /// Largest absolute difference: (semantic, component, difference).
    pub worst: Option<(String, usize, f32)>,
    /// Semantics present in only one of the results (not counted).
    pub unshared: Vec<String>,
}

impl fmt::Display for CompareReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.equal { "agree" } else { "MISMATCH" })?;
        if self.discard_mismatch {
            f.write_str(" (discard flags differ)")?;
        }
        if let Some((sem, c, d)) = &self.worst {
            write!(f, " (max |diff| {d:e} at {sem}.{})", ['x', 'y', 'z', 'w'][*c])?;
        }
        Ok(())
    }
}

/// Equal when discard flags match and every component of every shared
/// semantic differs by at most `tol`. NaN matches only NaN.
pub fn compare(a: &ExecResult, b: &ExecResult, tol: f32) -> CompareReport {
    if a.discarded != b.discarded {
        return CompareReport { equal: false, discard_mismatch: true, worst: None, unshared: Vec::new() };
    }
    let mut equal = true;
    let mut worst: Option<(String, usize, f32)> = None;
    let mut unshared = Vec::new();
    for (sem, x) in &a.outputs {
        let Some(y) = b.outputs.get(sem) else {
            unshared.push(sem.clone());
            continue;
        };
        for c in 0..4 {
            let (p, q) = (x[c], y[c]);
            let diff = if p.is_nan() || q.is_nan() {
                if p.is_nan() && q.is_nan() {
                    0.0
                } else {
                    f32::INFINITY
                }
            } else if p == q {
                0.0
            } else {
                (p - q).abs()
            };
            if !(diff <= tol) {
                equal = false;
            }
            if worst.as_ref().map_or(diff > 0.0, |w| diff > w.2) {
                worst = Some((sem.clone(), c, diff));
            }
        }
    }
    unshared.extend(b.outputs.keys().filter(|k| !a.outputs.contains_key(*k)).cloned());
    CompareReport { equal, discard_mismatch: false, worst, unshared }
}
