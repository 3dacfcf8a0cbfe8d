//! Acceptance criteria, one check per criterion.
//!
//! Runs without the libtest harness so each criterion prints exactly one
//! `PASS`/`FAIL` line whether or not output is captured. The process exits
//! non-zero when any criterion fails.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use cgc::cli::run_cli;
use cgc::codegen::{lower, optimize, parse_listing, Opcode, ParamDecl};
use cgc::frontend::{parse_source, pretty, SourceUnit};
use cgc::pipeline::{check_source, resolve_profile};
use cgc::profiles::{bind_all, UniformSlot};
use cgc::sema::overload::{arithmetic_candidates, ParamSig};
use cgc::sema::{resolve_overload, swizzle_type, FunctionSignature, Qualifier, ResolveError, Swizzle};
use cgc::stdlib::TextureImage;
use cgc::types::{Base, Type};
use cgc::vm::{compare, run_asm, run_cg, ExecResult, ShadeInput};
use cgc::{compile_str, corpus, Code, Compilation, CompileOptions};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

type Check = fn() -> String;

fn main() {
    let criteria: [(&str, Check); 6] = [
        ("golden vertex compile", criterion_1),
        ("golden fragment compile", criterion_2),
        ("differential equivalence", criterion_3),
        ("profile-error suite", criterion_4),
        ("language-feature suite", criterion_5),
        ("property suites", criterion_6),
    ];
    if std::env::args().any(|a| a == "--list") {
        for (i, (name, _)) in criteria.iter().enumerate() {
            println!("criterion_{}: {name}", i + 1);
        }
        return;
    }
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check));
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("criterion {} ({name}): PASS [{ms} ms] {detail}", i + 1),
            Err(e) => {
                failed += 1;
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panic".into());
                println!("criterion {} ({name}): FAIL [{ms} ms] {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn compile(src: &str, entry: &str, profile: &str) -> Compilation {
    compile_str("test.cg", src, &CompileOptions::new(entry, profile))
        .unwrap_or_else(|d| panic!("{entry} for {profile} failed to compile:\n{d}\n{src}"))
}

fn compile_err(src: &str, entry: &str, profile: &str) -> Vec<Code> {
    match compile_str("test.cg", src, &CompileOptions::new(entry, profile)) {
        Ok(_) => panic!("{entry} for {profile} compiled but should not have"),
        Err(d) => d.codes(),
    }
}

fn opcode_counts(c: &Compilation) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    for ins in &c.listing.instructions {
        *m.entry(format!("{:?}", ins.op).to_uppercase()).or_insert(0) += 1;
    }
    m
}

fn counts(pairs: &[(&str, usize)]) -> BTreeMap<String, usize> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn within_second(start: Instant) -> Duration {
    let t = start.elapsed();
    assert!(t < Duration::from_secs(1), "took {t:?}");
    t
}

// ---------------------------------------------------------------------------
// 1

fn criterion_1() -> String {
    let start = Instant::now();
    let c = compile(corpus::SIMPLE_TRANSFORM, "simpleTransform", "vs_1_1");
    let t = within_second(start);
    let text = &c.listing.text;
    assert!(text.starts_with("vs.1.1\n"), "{text}");
    assert_eq!(c.listing.instruction_count(), 7, "{text}");
    assert_eq!(opcode_counts(&c), counts(&[("MOV", 2), ("DP4", 4), ("MUL", 1)]), "{text}");

    let mvp = c.bindings.uniform("modelViewProjection").expect("matrix binding");
    assert_eq!(mvp.slot, UniformSlot::Constants { base: 1, count: 4 });
    let b = c.bindings.uniform("brightness").expect("brightness binding");
    assert_eq!(b.slot, UniformSlot::Constants { base: 0, count: 1 });

    let lines: Vec<&str> = text.lines().collect();
    let dp4: Vec<&str> = lines.iter().copied().filter(|l| l.starts_with("dp4")).collect();
    for (row, l) in dp4.iter().enumerate() {
        assert!(l.ends_with(&format!(", c{}, v0", row + 1)), "{l}");
    }
    let mul = lines.iter().find(|l| l.starts_with("mul")).unwrap();
    assert!(mul.contains("c0.x"), "{mul}");
    // Same listing as the reference, which only differs from ours in order
    // if scheduling changes; compare as multisets.
    let mut ours: Vec<&str> = lines[1..].to_vec();
    let mut reference: Vec<&str> = corpus::SIMPLE_TRANSFORM_VS11.lines().skip(1).collect();
    ours.sort_unstable();
    reference.sort_unstable();
    assert_eq!(ours, reference);
    format!("7 instructions, c0.x brightness, c1..c4 matrix, {t:?}")
}

// ---------------------------------------------------------------------------
// 2

fn criterion_2() -> String {
    let start = Instant::now();
    let c = compile(corpus::BRIGHT_LIGHT_MAP_DECAL, "brightLightMapDecal", "arbfp1");
    let t = within_second(start);
    let text = &c.listing.text;
    assert!(text.starts_with("!!ARBfp1.0\n"), "{text}");
    assert!(text.ends_with("END\n"), "{text}");
    assert_eq!(c.listing.instruction_count(), 5, "{text}");
    assert_eq!(opcode_counts(&c), counts(&[("TXP", 2), ("MUL", 3)]), "{text}");
    let literals: Vec<[f32; 4]> = c
        .listing
        .params
        .iter()
        .filter_map(|p| match p {
            ParamDecl::Literal { value, .. } => Some(*value),
            ParamDecl::Local { .. } => None,
        })
        .collect();
    assert_eq!(literals, vec![[2.0; 4]]);
    assert_eq!(text.lines().filter(|l| l.starts_with("PARAM")).count(), 1, "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("TEMP")).count(), 3, "{text}");
    assert_eq!(c.listing.temps, 3);
    format!("5 instructions, PARAM {{2, 2, 2, 2}}, 3 TEMPs, {t:?}")
}

// ---------------------------------------------------------------------------
// 3

/// Random test vector for a compiled program: every bound varying, uniform
/// and texture unit gets a value. Components lie in [-8, 8]; `w` stays at
/// least 0.25 away from zero so projective lookups are well defined.
fn random_input(c: &Compilation, rng: &mut StdRng) -> ShadeInput {
    let mut input = ShadeInput::default();
    let comp = |rng: &mut StdRng| rng.gen_range(-8.0f32..=8.0);
    for v in &c.bindings.inputs {
        let mut x = [comp(rng), comp(rng), comp(rng), comp(rng)];
        if x[3].abs() < 0.25 {
            x[3] = if x[3] < 0.0 { -0.25 } else { 0.25 } + x[3] * 8.0;
        }
        input = input.with_varying(&v.semantic, x);
    }
    for u in &c.bindings.uniforms {
        match u.slot {
            UniformSlot::Constants { .. } => {
                let n = u.ty.component_count();
                let vals: Vec<f32> = (0..n).map(|_| comp(rng)).collect();
                input = input.with_uniform(&u.name, vals);
            }
            UniformSlot::Texture { unit, .. } => {
                let texels = (0..16).map(|_| [rng.gen(), rng.gen(), rng.gen(), rng.gen()]).collect();
                input = input.with_texture(unit, TextureImage::new(4, 4, 1, texels).unwrap());
            }
        }
    }
    input
}

/// Run both interpreters on `trials` random inputs; panic on the first
/// disagreement beyond 1e-5.
fn differential(c: &Compilation, trials: usize, rng: &mut StdRng, what: &str) {
    for trial in 0..trials {
        let input = random_input(c, rng);
        let cg = run_cg(&c.tree, &input).unwrap_or_else(|e| panic!("{what}: run_cg: {e}"));
        let asm = run_asm(&c.listing, &input, &c.bindings).unwrap_or_else(|e| panic!("{what}: run_asm: {e}"));
        let verdict = compare(&cg, &asm, 1e-5);
        assert!(
            verdict.equal && verdict.unshared.is_empty(),
            "{what}, trial {trial}: {verdict}\ncg:  {cg}\nasm: {asm}\ninput: {input:?}\n{}",
            c.listing.text
        );
    }
}

const LETTERS: [char; 4] = ['x', 'y', 'z', 'w'];

/// Straight-line program generator: float4 temporaries built from inputs,
/// uniforms and literals with `+ - *`, smears, swizzles, write masks,
/// `dot`, `min`, `max`, `abs` and constructors. Fragment programs may
/// sample one texture directly at an interpolated coordinate.
struct Generator {
    rng: StdRng,
    vars: Vec<String>,
}

impl Generator {
    fn swizzle(&mut self, n: usize) -> String {
        (0..n).map(|_| LETTERS[self.rng.gen_range(0..4)]).collect()
    }

    fn operand(&mut self) -> String {
        let v = self.vars[self.rng.gen_range(0..self.vars.len())].clone();
        match self.rng.gen_range(0..4) {
            0 => v,
            1 => format!("-{v}"),
            _ => format!("{v}.{}", self.swizzle(4)),
        }
    }

    fn scalar(&mut self) -> String {
        match self.rng.gen_range(0..4) {
            0 => "k".into(),
            1 => format!("{}", [0.5, 2.0, 0.25, 3.0, -1.5][self.rng.gen_range(0..5)]),
            2 => {
                let a = self.operand();
                let b = self.operand();
                if self.rng.gen() {
                    format!("dot({a}, {b})")
                } else {
                    format!("dot(({a}).xyz, ({b}).xyz)")
                }
            }
            _ => {
                let v = self.vars[self.rng.gen_range(0..self.vars.len())].clone();
                format!("{v}.{}", self.swizzle(1))
            }
        }
    }

    fn expr(&mut self, depth: u32) -> String {
        if depth == 0 {
            return self.operand();
        }
        match self.rng.gen_range(0..9) {
            0 | 1 => format!("({} + {})", self.expr(depth - 1), self.expr(depth - 1)),
            2 => format!("({} - {})", self.expr(depth - 1), self.expr(depth - 1)),
            3 => format!("({} * {})", self.operand(), self.operand()),
            4 => format!("({} * {})", self.scalar(), self.expr(depth - 1)),
            5 => format!("min({}, {})", self.expr(depth - 1), self.expr(depth - 1)),
            6 => format!("max({}, {})", self.expr(depth - 1), self.expr(depth - 1)),
            7 => format!("abs({})", self.expr(depth - 1)),
            _ => {
                let v = self.operand();
                format!("float4({}, ({v}).{}, {})", self.scalar(), self.swizzle(2), self.scalar())
            }
        }
    }

    fn statements(&mut self, fragment_texture: bool) -> Vec<String> {
        let n = self.rng.gen_range(3..=7);
        let tex_at = fragment_texture.then(|| self.rng.gen_range(0..n));
        let mut out = Vec::new();
        for i in 0..n {
            let name = format!("t{i}");
            if tex_at == Some(i) {
                let call = if self.rng.gen() { "tex2D(s, b.xy)" } else { "tex2Dproj(s, c)" };
                out.push(format!("float4 {name} = {call};"));
            } else {
                let e = self.expr(2);
                out.push(format!("float4 {name} = {e};"));
            }
            if i > 0 && self.rng.gen_bool(0.4) {
                let len = self.rng.gen_range(1..=3);
                let mut lanes: Vec<usize> = (0..4).collect();
                lanes.shuffle(&mut self.rng);
                let mut mask: Vec<usize> = lanes[..len].to_vec();
                mask.sort_unstable();
                let mask: String = mask.iter().map(|&l| LETTERS[l]).collect();
                let src = self.expr(1);
                out.push(format!("{name}.{mask} = ({src}).{};", self.swizzle(len)));
            }
            self.vars.push(name);
        }
        out
    }

    fn vertex(&mut self) -> String {
        self.vars = vec!["a".into(), "b".into(), "c".into(), "u".into()];
        let body = self.statements(false).join("\n    ");
        let last = self.vars.len() - 1;
        let pick = |g: &mut Self| g.vars[g.rng.gen_range(4..=last)].clone();
        let (p, q) = (pick(self), pick(self));
        let tail = self.vars[last].clone();
        format!(
            "void main(float4 a : POSITION, float4 b : TEXCOORD0, float4 c : COLOR0,\n\
             \x20         uniform float4 u, uniform float k,\n\
             \x20         out float4 oPos : POSITION, out float4 oCol : COLOR0, out float4 oT : TEXCOORD0)\n\
             {{\n    {body}\n    oPos = {tail};\n    oCol = {p};\n    oT = {q} * k;\n}}\n"
        )
    }

    fn fragment(&mut self, texture: bool) -> String {
        self.vars = vec!["a".into(), "b".into(), "c".into(), "u".into()];
        let body = self.statements(texture).join("\n    ");
        let tail = self.vars.last().unwrap().clone();
        let sampler = if texture { ", uniform sampler2D s" } else { "" };
        format!(
            "float4 main(float4 a : COLOR0, float4 b : TEXCOORD0, float4 c : TEXCOORD1,\n\
             \x20           uniform float4 u, uniform float k{sampler}) : COLOR\n\
             {{\n    {body}\n    return {tail};\n}}\n"
        )
    }
}

fn criterion_3() -> String {
    const PROGRAMS: usize = 24;
    const TRIALS: usize = 100;
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0xC6_2003);

    let vs = compile(corpus::SIMPLE_TRANSFORM, "simpleTransform", "vs_1_1");
    differential(&vs, TRIALS, &mut rng, "simpleTransform/vs_1_1");
    let vp = compile(corpus::SIMPLE_TRANSFORM, "simpleTransform", "arbvp1");
    differential(&vp, TRIALS, &mut rng, "simpleTransform/arbvp1");
    let fp = compile(corpus::BRIGHT_LIGHT_MAP_DECAL, "brightLightMapDecal", "arbfp1");
    differential(&fp, TRIALS, &mut rng, "brightLightMapDecal/arbfp1");

    // The comparison must notice a wrong opcode.
    let mut broken = fp.clone();
    broken.listing = parse_listing(&fp.listing.text.replace("MUL R0, R2, R0", "ADD R0, R2, R0")).unwrap();
    let input = random_input(&broken, &mut rng);
    let cg = run_cg(&broken.tree, &input).unwrap();
    let asm = run_asm(&broken.listing, &input, &broken.bindings).unwrap();
    assert!(!compare(&cg, &asm, 1e-5).equal, "injected ADD went unnoticed");

    let mut gen = Generator { rng: StdRng::seed_from_u64(7), vars: Vec::new() };
    let mut textured = 0;
    for i in 0..PROGRAMS {
        let (src, profile) = match i % 3 {
            0 => (gen.vertex(), "vs_1_1"),
            1 => (gen.vertex(), "arbvp1"),
            _ => {
                let tex = i % 2 == 0;
                textured += usize::from(tex);
                (gen.fragment(tex), "arbfp1")
            }
        };
        let c = compile(&src, "main", profile);
        differential(&c, TRIALS, &mut rng, &format!("generated #{i} ({profile})\n{src}"));
    }
    let t = start.elapsed();
    assert!(t < Duration::from_secs(60), "took {t:?}");
    format!("3 reference + {PROGRAMS} generated programs ({textured} textured) x {TRIALS} inputs agree within 1e-5, {t:?}")
}

// ---------------------------------------------------------------------------
// 4

/// Write `src` to a temporary file, run the command line and return the exit
/// code with the diagnostic codes reported on the error stream.
fn cli_codes(src: &str, command: &str, entry: &str, profile: &str, extra: &[&str]) -> (i32, Vec<String>) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("prog.cg");
    std::fs::write(&path, src).unwrap();
    let mut args = vec![
        "cgc".to_string(),
        command.to_string(),
        path.display().to_string(),
        "--entry".into(),
        entry.into(),
        "--profile".into(),
        profile.into(),
        "--diag-format".into(),
        "json".into(),
    ];
    args.extend(extra.iter().map(|s| s.to_string()));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_cli(args, &mut out, &mut err);
    let codes = String::from_utf8(err)
        .unwrap()
        .lines()
        .map(|l| {
            let v: serde_json::Value = serde_json::from_str(l).unwrap_or_else(|e| panic!("bad json line {l}: {e}"));
            v["code"].as_str().unwrap().to_string()
        })
        .collect();
    (code, codes)
}

const TEXTURED_VERTEX: &str = r#"void simpleTransform(float4 objectPosition : POSITION,
                    float4 color          : COLOR,
                    float4 decalCoord     : TEXCOORD0,
                    out float4 clipPosition : POSITION,
                    out float4 oColor      : COLOR,
                    uniform float brightness,
                    uniform float4x4 modelViewProjection,
                    uniform sampler2D decal)
{
    clipPosition = mul(modelViewProjection, objectPosition);
    oColor = brightness * color * tex2D(decal, decalCoord.xy);
}
"#;

const FRAGMENT_TEXCOORD_OUT: &str = r#"void shade(float4 color : COLOR,
           out float4 oColor : COLOR,
           out float4 oCoord : TEXCOORD0)
{
    oColor = color;
    oCoord = color;
}
"#;

fn criterion_4() -> String {
    let cases = [
        (TEXTURED_VERTEX, "compile", "simpleTransform", "vs_1_1", &[][..], "E_TEX_IN_VERTEX"),
        (FRAGMENT_TEXCOORD_OUT, "check", "shade", "arbfp1", &[][..], "E_FRAG_TEXCOORD_OUT"),
        (corpus::SIMPLE_TRANSFORM, "compile", "simpleTransform", "vs_1_1", &["--limit", "max_instructions=3"][..], "E_CAPACITY"),
    ];
    for (src, cmd, entry, profile, extra, want) in cases {
        let (code, codes) = cli_codes(src, cmd, entry, profile, extra);
        assert_eq!(code, 2, "{want}: exit code");
        assert!(codes.iter().any(|c| c == want), "{want} not in {codes:?}");
    }
    let (ok, _) = cli_codes(corpus::SIMPLE_TRANSFORM, "compile", "simpleTransform", "vs_1_1", &["--limit", "max_instructions=7"]);
    assert_eq!(ok, 0);
    "E_TEX_IN_VERTEX, E_FRAG_TEXCOORD_OUT, E_CAPACITY with exit 2".into()
}

// ---------------------------------------------------------------------------
// 5

fn both(c: &Compilation, input: &ShadeInput) -> (ExecResult, ExecResult) {
    let cg = run_cg(&c.tree, input).expect("run_cg");
    let asm = run_asm(&c.listing, input, &c.bindings).expect("run_asm");
    (cg, asm)
}

fn assert_output(c: &Compilation, input: &ShadeInput, semantic: &str, want: [f32; 4]) {
    let (cg, asm) = both(c, input);
    assert_eq!(cg.output(semantic), Some(want), "run_cg {semantic}");
    assert_eq!(asm.output(semantic), Some(want), "run_asm {semantic}\n{}", c.listing.text);
}

fn criterion_5() -> String {
    // Swizzle typing.
    assert_eq!(swizzle_type(&Type::float(4), "xy").unwrap().0, Type::float(2));
    assert_eq!(swizzle_type(&Type::FLOAT, "xxx").unwrap().0, Type::float(3));

    // The reading `vec1.xy` is positional: (4, -2). A well-known printed
    // example annotates it as (-2, 4); that annotation is not followed.
    let src = "float4 main(float4 a : COLOR) : COLOR { \
               float4 vec1 = float4(4.0, -2.0, 5.0, 3.0); float2 vec2 = vec1.xy; \
               return float4(vec2, 0, 1); }";
    let c = compile(src, "main", "arbfp1");
    assert_output(&c, &ShadeInput::default().with_varying("COLOR", [0.0; 4]), "COLOR", [4.0, -2.0, 0.0, 1.0]);

    // A write mask leaves the other components alone.
    let src = "float4 main(float4 a : COLOR, float4 b : TEXCOORD0) : COLOR { \
               float4 t = a; t.yw = b.zx; return t; }";
    let c = compile(src, "main", "arbfp1");
    let input = ShadeInput::default().with_varying("COLOR", [1.0, 2.0, 3.0, 4.0]).with_varying("TEXCOORD0", [5.0, 6.0, 7.0, 8.0]);
    assert_output(&c, &input, "COLOR", [1.0, 7.0, 3.0, 5.0]);

    // Scalar smear, both as a uniform and as a literal.
    let src = "float4 main(float4 a : COLOR, uniform float k) : COLOR { return k * a + 0.5 * a; }";
    let c = compile(src, "main", "arbfp1");
    let input = ShadeInput::default().with_varying("COLOR", [1.0, -2.0, 4.0, 0.5]).with_uniform("k", vec![3.0]);
    assert_output(&c, &input, "COLOR", [3.5, -7.0, 14.0, 1.75]);
    assert!(c.listing.text.contains("c0.x"), "{}", c.listing.text);

    // inout through a helper.
    let src = "void bump(inout float4 v, float k) { v.x += k; v = v * 2; } \
               float4 main(float4 a : COLOR, uniform float k) : COLOR { float4 t = a; bump(t, k); bump(t, 1); return t; }";
    let c = compile(src, "main", "arbfp1");
    let input = ShadeInput::default().with_varying("COLOR", [1.0, 2.0, 3.0, 4.0]).with_uniform("k", vec![0.5]);
    // x: ((1 + 0.5) * 2 + 1) * 2 = 8; others are scaled by 4.
    assert_output(&c, &input, "COLOR", [8.0, 8.0, 12.0, 16.0]);

    // discard.
    let src = "float4 main(float4 a : COLOR) : COLOR { if (a.x < 0.5) discard; return a; }";
    let c = compile(src, "main", "arbfp1");
    assert!(c.listing.instructions.iter().any(|i| i.op == Opcode::Kil), "{}", c.listing.text);
    for (x, gone) in [(0.25, true), (0.75, false)] {
        let (cg, asm) = both(&c, &ShadeInput::default().with_varying("COLOR", [x, 0.0, 0.0, 1.0]));
        assert_eq!((cg.discarded, asm.discarded), (gone, gone), "x = {x}");
    }

    // Recursion, direct and mutual.
    let direct = "float f(float x) { return f(x); } float4 main(float4 a : COLOR) : COLOR { return a * f(1); }";
    let mutual = "float g(float x); float f(float x) { return g(x); } float g(float x) { return f(x) + 1; } \
                  float4 main(float4 a : COLOR) : COLOR { return a * f(1); }";
    for src in [direct, mutual] {
        for profile in ["arbfp1", "vs_1_1"] {
            let entry_src = if profile == "arbfp1" { src.to_string() } else { src.replace(": COLOR) : COLOR", ": POSITION) : POSITION") };
            assert!(compile_err(&entry_src, "main", profile).contains(&Code::Recursion), "{profile}: {entry_src}");
        }
    }
    "swizzle table, mask complement, smear, inout, discard, recursion; vec1.xy = (4, -2)".into()
}

// ---------------------------------------------------------------------------
// 6

/// Programs for the parse/print round trip and the optimizer property.
fn corpus_programs() -> Vec<(&'static str, &'static str, &'static str)> {
    vec![
        (corpus::SIMPLE_TRANSFORM, "simpleTransform", "vs_1_1"),
        (corpus::SIMPLE_TRANSFORM, "simpleTransform", "arbvp1"),
        (corpus::BRIGHT_LIGHT_MAP_DECAL, "brightLightMapDecal", "arbfp1"),
        (
            "struct Light { float3 dir; float4 color; };\n\
             float4 lit(Light l, float3 n) { return max(dot(n, l.dir), 0) * l.color; }\n\
             float4 main(float3 n : TEXCOORD0, uniform Light light) : COLOR {\n\
             \x20   float4 acc = 0;\n\
             \x20   for (int i = 0; i < 3; i++) { acc += lit(light, n) * 0.25; }\n\
             \x20   return acc.bgra;\n}\n",
            "main",
            "arbfp1",
        ),
        (
            "float4 main(float4 p : POSITION, uniform float4x4 m, uniform float s) : POSITION {\n\
             \x20   float4 q = mul(m, p);\n\
             \x20   q.xy = q.yx * (s > 0 ? s : -s);\n\
             \x20   return q;\n}\n",
            "main",
            "arbvp1",
        ),
    ]
}

fn parse_text(src: &str) -> cgc::frontend::SyntaxTree {
    parse_source(&SourceUnit::new("t.cg", src), &BTreeMap::new(), &BTreeMap::new()).unwrap_or_else(|d| panic!("{d}\n{src}"))
}

fn round_trips() -> usize {
    let mut gen = Generator { rng: StdRng::seed_from_u64(11), vars: Vec::new() };
    let mut sources: Vec<String> = corpus_programs().into_iter().map(|(s, _, _)| s.to_string()).collect();
    sources.extend([TEXTURED_VERTEX, FRAGMENT_TEXCOORD_OUT].map(String::from));
    sources.extend((0..10).map(|i| if i % 2 == 0 { gen.vertex() } else { gen.fragment(true) }));
    for src in &sources {
        let tree = parse_text(src);
        let printed = pretty(&tree);
        let again = parse_text(&printed);
        assert_eq!(tree.without_locations(), again.without_locations(), "round trip changed:\n{src}\n---\n{printed}");
        assert_eq!(pretty(&again), printed, "printing is not stable");
    }
    sources.len()
}

fn swizzle_text(s: &[u8]) -> String {
    s.iter().map(|&i| LETTERS[i as usize]).collect()
}

fn pad(expr: &str, n: usize) -> String {
    if n == 4 {
        expr.to_string()
    } else {
        let zeros = vec!["0"; 4 - n].join(", ");
        format!("float4({expr}, {zeros})")
    }
}

fn swizzle_composition() -> u32 {
    let strategy = prop::collection::vec(0u8..4, 1..=4)
        .prop_flat_map(|inner| {
            let n = inner.len() as u8;
            (Just(inner), prop::collection::vec(0..n, 1..=4))
        })
        .prop_flat_map(|(i, o)| (Just(i), Just(o), prop::array::uniform4(-8.0f32..8.0)));
    let cases = 96;
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    runner
        .run(&strategy, |(inner, outer, a)| {
            let (t1, s1) = swizzle_type(&Type::float(4), &swizzle_text(&inner)).unwrap();
            let (t2, s2) = swizzle_type(&t1, &swizzle_text(&outer)).unwrap();
            let composed = Swizzle::compose(&s1, &s2).unwrap();
            let (t3, _) = swizzle_type(&Type::float(4), &swizzle_text(&composed.components)).unwrap();
            prop_assert_eq!(&t2, &t3);

            let n = outer.len();
            let nested = format!("(a.{}).{}", swizzle_text(&inner), swizzle_text(&outer));
            let flat = format!("a.{}", swizzle_text(&composed.components));
            let src = format!(
                "void main(float4 a : POSITION, out float4 p : POSITION, out float4 q : TEXCOORD0) {{ p = {}; q = {}; }}",
                pad(&nested, n),
                pad(&flat, n)
            );
            let c = compile(&src, "main", "arbvp1");
            let mut want = [0.0f32; 4];
            for (k, &i) in outer.iter().enumerate() {
                want[k] = a[inner[i as usize] as usize];
            }
            let (cg, asm) = both(&c, &ShadeInput::default().with_varying("POSITION", a));
            for r in [&cg, &asm] {
                prop_assert_eq!(r.output("POSITION"), Some(want));
                prop_assert_eq!(r.output("TEXCOORD0"), Some(want));
            }
            Ok(())
        })
        .unwrap_or_else(|e| panic!("swizzle composition: {e}"));
    cases
}

/// Outcome of a resolution in a form independent of candidate order.
fn outcome(r: Result<&FunctionSignature, ResolveError>) -> String {
    match r {
        Ok(sig) => format!("ok {sig}"),
        Err(ResolveError::NoViable { .. }) => "none".into(),
        Err(ResolveError::Ambiguous { candidates, .. }) => {
            let mut names: Vec<String> = candidates.iter().map(|c| c.to_string()).collect();
            names.sort();
            format!("ambiguous {names:?}")
        }
    }
}

fn overload_order() -> u32 {
    let pool = [
        Type::FLOAT,
        Type::INT,
        Type::Scalar(Base::Half),
        Type::Scalar(Base::Double),
        Type::float(2),
        Type::float(3),
        Type::float(4),
        Type::vec(Base::Int, 4),
    ];
    let n = pool.len();
    let cand = prop::collection::vec((0..n, any::<bool>()), 1..=3);
    let strategy = (prop::collection::vec(cand, 1..=6), prop::collection::vec(0..n, 1..=3), any::<u64>());
    let cases = 512;
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    runner
        .run(&strategy, |(cands, args, seed)| {
            let mut sigs: Vec<FunctionSignature> = cands
                .iter()
                .map(|params| FunctionSignature {
                    params: params
                        .iter()
                        .map(|&(t, out)| ParamSig {
                            ty: pool[t].clone(),
                            qualifier: if out { Qualifier::InOut } else { Qualifier::None },
                        })
                        .collect(),
                    ..FunctionSignature::builtin("f", &[], Type::Void)
                })
                .collect();
            sigs.dedup();
            let args: Vec<Type> = args.iter().map(|&t| pool[t].clone()).collect();
            let first = outcome(resolve_overload("f", &args, &sigs));
            let mut shuffled = sigs.clone();
            shuffled.shuffle(&mut StdRng::seed_from_u64(seed));
            prop_assert_eq!(&first, &outcome(resolve_overload("f", &args, &shuffled)));
            shuffled.reverse();
            prop_assert_eq!(&first, &outcome(resolve_overload("f", &args, &shuffled)));
            Ok(())
        })
        .unwrap_or_else(|e| panic!("overload order: {e}"));

    // The built-in operator set behaves the same way.
    let mut ops = arithmetic_candidates("*");
    let probe = [Type::FLOAT, Type::float(4)];
    let a = outcome(resolve_overload("*", &probe, &ops));
    ops.reverse();
    assert_eq!(a, outcome(resolve_overload("*", &probe, &ops)));
    cases
}

fn optimize_idempotent() -> usize {
    let mut gen = Generator { rng: StdRng::seed_from_u64(13), vars: Vec::new() };
    let mut programs: Vec<(String, &str, &str)> =
        corpus_programs().into_iter().map(|(s, e, p)| (s.to_string(), e, p)).collect();
    for i in 0..12 {
        programs.push(if i % 2 == 0 { (gen.vertex(), "main", "arbvp1") } else { (gen.fragment(i % 4 == 1), "main", "arbfp1") });
    }
    for (src, entry, profile) in &programs {
        let opts = CompileOptions::new(entry, profile);
        let p = resolve_profile(&opts).unwrap();
        let tree = check_source(&SourceUnit::new("t.cg", src.as_str()), &opts).unwrap();
        let bindings = bind_all(&tree, &p).unwrap();
        let ir = lower(&tree, &bindings, &p).unwrap();
        let once = optimize(&ir);
        assert_eq!(optimize(&once), once, "not idempotent:\n{src}");
    }
    programs.len()
}

/// `mul(M, v)` from both interpreters against a double-precision
/// sum of products. The bound is relative to the magnitude of the terms,
/// which is the scale binary32 rounding error is proportional to.
fn mul_oracle() -> usize {
    const PAIRS: usize = 1000;
    let src = "float4 main(float4 v : POSITION, uniform float4x4 M) : POSITION { return mul(M, v); }";
    let c = compile(src, "main", "arbvp1");
    assert_eq!(c.listing.instructions.iter().filter(|i| i.op == Opcode::Dp4).count(), 4);
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for pair in 0..PAIRS {
        let m: Vec<f32> = (0..16).map(|_| rng.gen_range(-8.0..8.0)).collect();
        let v: [f32; 4] = std::array::from_fn(|_| rng.gen_range(-8.0..8.0));
        let input = ShadeInput::default().with_varying("POSITION", v).with_uniform("M", m.clone());
        let (cg, asm) = both(&c, &input);
        for row in 0..4 {
            let mut exact = 0.0f64;
            let mut scale = 0.0f64;
            for col in 0..4 {
                let term = m[row * 4 + col] as f64 * v[col] as f64;
                exact += term;
                scale += term.abs();
            }
            for (who, r) in [("run_cg", &cg), ("run_asm", &asm)] {
                let got = r.output("POSITION").unwrap()[row] as f64;
                let err = (got - exact).abs();
                assert!(err <= 1e-6 * scale.max(f64::MIN_POSITIVE), "{who} pair {pair} row {row}: {got} vs {exact}");
            }
        }
    }
    PAIRS
}

fn criterion_6() -> String {
    let rt = round_trips();
    let sw = swizzle_composition();
    let ov = overload_order();
    let op = optimize_idempotent();
    let mul = mul_oracle();
    format!("round trip {rt} programs, swizzle composition {sw} cases, overload order {ov} cases, optimize {op} programs, mul oracle {mul} pairs")
}
