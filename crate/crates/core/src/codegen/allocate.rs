//! Linear-scan register allocation and the capacity checks of a profile.

use std::collections::{BTreeSet, HashMap};

use super::ir::{IrProgram, Reg};
use crate::diag::{Code, Diagnostic, Diagnostics, Loc};
use crate::profiles::ProfileDescriptor;

/// Map virtual temporaries to physical registers, lowest free first, in
/// order of first definition. A source whose last use is an instruction is
/// released before that instruction's destination is assigned, so the two
/// may share a register.
pub fn allocate(ir: &IrProgram, profile: &ProfileDescriptor) -> Result<IrProgram, Diagnostics> {
    let limits = profile.limits;
    let capacity = |what: String| Err(Diagnostics::single(Diagnostic::error(Code::Capacity, Loc::default(), what)));
    if ir.instrs.len() > limits.max_instructions as usize {
        return capacity(format!(
            "program needs {} instructions; profile {} allows {}",
            ir.instrs.len(),
            profile.name,
            limits.max_instructions
        ));
    }
    let constants = ir.uniform_registers + ir.pool.len() as u32;
    if constants > limits.max_constants {
        return capacity(format!(
            "program needs {constants} constant registers; profile {} has {}",
            profile.name, limits.max_constants
        ));
    }

    let mut last_use: HashMap<u32, usize> = HashMap::new();
    for (i, ins) in ir.instrs.iter().enumerate() {
        let regs = ins.srcs.iter().map(|s| &s.reg).chain(ins.dst.as_ref().map(|d| &d.reg));
        for t in regs.filter_map(Reg::as_temp) {
            last_use.insert(t, i);
        }
    }

    let mut out = ir.clone();
    let mut map: HashMap<u32, u32> = HashMap::new();
    let mut free: BTreeSet<u32> = BTreeSet::new();
    let mut next = 0u32;
    for (i, ins) in out.instrs.iter_mut().enumerate() {
        let dst_temp = ins.dst.as_ref().and_then(|d| d.reg.as_temp());
        for s in &mut ins.srcs {
            if let Reg::Temp(t) = s.reg {
                let phys = map[&t];
                if last_use[&t] == i && dst_temp != Some(t) {
                    free.insert(phys);
                }
                s.reg = Reg::Temp(phys);
            }
        }
        if let Some(t) = dst_temp {
            let phys = *map.entry(t).or_insert_with(|| match free.pop_first() {
                Some(r) => r,
                None => {
                    next += 1;
                    next - 1
                }
            });
            if last_use[&t] == i {
                free.insert(phys);
            }
            ins.dst.as_mut().unwrap().reg = Reg::Temp(phys);
        }
    }
    if next > limits.max_temps {
        return capacity(format!("program needs {next} temporaries; profile {} has {}", profile.name, limits.max_temps));
    }
    out.temps = next;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codegen::lower::tests::lower_src;
    use crate::codegen::optimize::optimize;
    use crate::corpus;
    use crate::profiles::lookup_profile;

    #[test]
    fn bright_light_map_decal_uses_three() {
        let p = lookup_profile("arbfp1").unwrap();
        let ir = allocate(&optimize(&lower_src(corpus::BRIGHT_LIGHT_MAP_DECAL, "brightLightMapDecal", "arbfp1").unwrap()), &p)
            .unwrap();
        assert_eq!(ir.temps, 3);
        let text = ir.instrs.iter().map(|i| i.to_string()).collect::<Vec<_>>();
        assert_eq!(text[3], "MUL t0, t2, t0");
        assert_eq!(text[4], "MUL result.color, t0, t1");
    }

    #[test]
    fn capacity_limits() {
        let ir = optimize(&lower_src(corpus::SIMPLE_TRANSFORM, "simpleTransform", "vs_1_1").unwrap());
        let p = lookup_profile("vs_1_1").unwrap().with_overrides(&["max_instructions=3"]).unwrap();
        assert!(allocate(&ir, &p).unwrap_err().has_code(Code::Capacity));
        let p = lookup_profile("vs_1_1").unwrap().with_overrides(&["max_constants=4"]).unwrap();
        assert!(allocate(&ir, &p).unwrap_err().has_code(Code::Capacity));
        let src = "float4 main(float4 c : COLOR, float4 d : TEXCOORD0) : COLOR { \
                   float4 a = c * d; float4 b = c + d; float4 e = c - d; return a * b * e; }";
        let ir = optimize(&lower_src(src, "main", "arbfp1").unwrap());
        let p = lookup_profile("arbfp1").unwrap();
        assert_eq!(allocate(&ir, &p).unwrap().temps, 3);
        let p = p.with_overrides(&["max_temps=2"]).unwrap();
        assert!(allocate(&ir, &p).unwrap_err().has_code(Code::Capacity));
    }
}
