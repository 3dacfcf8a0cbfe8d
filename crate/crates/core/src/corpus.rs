//! Reference programs used by tests, examples and the acceptance suite.

/// The vertex program: transform, scale a color, pass two texture
/// coordinate sets through.
pub const SIMPLE_TRANSFORM: &str = r#"void simpleTransform(float4 objectPosition : POSITION,
                    float4 color          : COLOR,
                    float4 decalCoord     : TEXCOORD0,
                    float4 lightMapCoord  : TEXCOORD1,
                    out float4 clipPosition : POSITION,
                    out float4 oColor      : COLOR,
                    out float4 oDecalCoord : TEXCOORD0,
                    out float4 oLightMapCoord : TEXCOORD1,
                    uniform float brightness,
                    uniform float4x4 modelViewProjection)
{
    clipPosition = mul(modelViewProjection, objectPosition);
    oColor = brightness * color;
    oDecalCoord = decalCoord;
    oLightMapCoord = lightMapCoord;
}
"#;

/// The fragment program: modulate a color by a decal and a light map.
pub const BRIGHT_LIGHT_MAP_DECAL: &str = r#"float4 brightLightMapDecal(float4 color          : COLOR,
                           float4 decalCoord     : TEXCOORD0,
                           float4 lightMapCoord  : TEXCOORD1,
                           uniform sampler2D decal,
                           uniform sampler2D lightMap) : COLOR
{
    float4 d = tex2Dproj(decal, decalCoord);
    float4 lm = tex2Dproj(lightMap, lightMapCoord);
    return 2.0 * color * d * lm;
}
"#;

/// The vertex program's listing for `vs_1_1`.
pub const SIMPLE_TRANSFORM_VS11: &str = "vs.1.1
mov oT0, v7
mov oT1, v8
dp4 oPos.x, c1, v0
dp4 oPos.y, c2, v0
dp4 oPos.z, c3, v0
dp4 oPos.w, c4, v0
mul oD0, c0.x, v5
";

/// The fragment program's listing for `arbfp1`.
pub const BRIGHT_LIGHT_MAP_DECAL_ARBFP1: &str = "!!ARBfp1.0
PARAM c0 = {2, 2, 2, 2}; TEMP R0; TEMP R1; TEMP R2;
TXP R0, fragment.texcoord[0], texture[0], 2D;
TXP R1, fragment.texcoord[1], texture[1], 2D;
MUL R2, c0.x, fragment.color.primary;
MUL R0, R2, R0;
MUL result.color, R0, R1;
END
";
