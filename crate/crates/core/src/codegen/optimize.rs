//! IR clean-up after lowering: copy propagation, dead-lane elimination,
//! folding of result moves into the output registers, and compaction of
//! temporaries and pool entries. Passes repeat until nothing changes, so
//! running [`optimize`] twice gives the same program as running it once.

use std::collections::{BTreeMap, HashMap};

use super::ir::{Instruction, IrProgram, Opcode, Reg, Src, FULL_MASK};

pub fn optimize(ir: &IrProgram) -> IrProgram {
    let mut p = ir.clone();
    loop {
        let before = p.clone();
        propagate_copies(&mut p);
        eliminate_dead(&mut p);
        coalesce_outputs(&mut p);
        hoist_output_copies(&mut p);
        canonicalize(&mut p);
        compact(&mut p);
        if p == before {
            return p;
        }
    }
}

fn lanes(mask: u8) -> impl Iterator<Item = usize> {
    (0..4).filter(move |l| mask & (1 << l) != 0)
}

/// Result positions whose source lane the instruction actually reads.
fn positions_read(ins: &Instruction) -> u8 {
    match ins.op {
        Opcode::Dp3 => 0b0111,
        Opcode::Dp4 | Opcode::Kil | Opcode::Txp => FULL_MASK,
        Opcode::Rcp | Opcode::Rsq | Opcode::Lg2 => 0b0001,
        Opcode::Tex => match ins.tex.map(|t| t.dim) {
            Some(crate::types::SamplerDim::D2) => 0b0011,
            _ => 0b0111,
        },
        _ => ins.dst.as_ref().map_or(FULL_MASK, |d| d.mask),
    }
}

/// Rewrite unread swizzle positions so equivalent operands print alike:
/// replicate when every read position agrees, otherwise the identity.
fn normalize_swizzle(s: &mut Src, read: u8) {
    let used: Vec<u8> = lanes(read).map(|l| s.swizzle[l]).collect();
    if used.is_empty() {
        return;
    }
    if used.iter().all(|&u| u == used[0]) {
        s.swizzle = [used[0]; 4];
        return;
    }
    for l in 0..4 {
        if read & (1 << l) == 0 {
            s.swizzle[l] = l as u8;
        }
    }
}

/// For every temp lane, the index of the instruction writing it.
fn definitions(p: &IrProgram) -> HashMap<(u32, u8), usize> {
    let mut defs = HashMap::new();
    for (i, ins) in p.instrs.iter().enumerate() {
        if let Some(d) = &ins.dst {
            if let Reg::Temp(t) = d.reg {
                for l in lanes(d.mask) {
                    defs.insert((t, l as u8), i);
                }
            }
        }
    }
    defs
}

/// Replace reads of temps written by plain moves with the moved source.
fn propagate_copies(p: &mut IrProgram) {
    let defs = definitions(p);
    for i in 0..p.instrs.len() {
        let read = positions_read(&p.instrs[i]);
        for k in 0..p.instrs[i].srcs.len() {
            let src = &p.instrs[i].srcs[k];
            let Reg::Temp(t) = src.reg else { continue };
            let mut origin: Option<(Reg, bool)> = None;
            let mut swizzle = src.swizzle;
            let mut ok = true;
            for pos in lanes(read) {
                let lane = src.swizzle[pos];
                let Some(&d) = defs.get(&(t, lane)) else {
                    ok = false;
                    break;
                };
                let def = &p.instrs[d];
                if def.op != Opcode::Mov || d >= i {
                    ok = false;
                    break;
                }
                let from = &def.srcs[0];
                let key = (from.reg.clone(), from.negate);
                match &origin {
                    None => origin = Some(key),
                    Some(o) if *o == key => {}
                    Some(_) => {
                        ok = false;
                        break;
                    }
                }
                swizzle[pos] = from.swizzle[lane as usize];
            }
            let (true, Some((reg, neg))) = (ok, origin) else { continue };
            let negate = src.negate ^ neg;
            let mut new = Src { reg, swizzle, negate };
            normalize_swizzle(&mut new, read);
            p.instrs[i].srcs[k] = new;
        }
    }
}

/// Drop instructions and lanes whose results are never read. Output
/// writes and kills are always kept.
fn eliminate_dead(p: &mut IrProgram) {
    let mut live: HashMap<u32, u8> = HashMap::new();
    let mut keep = vec![true; p.instrs.len()];
    for i in (0..p.instrs.len()).rev() {
        let ins = &mut p.instrs[i];
        if let Some(d) = &mut ins.dst {
            if let Reg::Temp(t) = d.reg {
                let needed = d.mask & live.get(&t).copied().unwrap_or(0);
                if needed == 0 {
                    keep[i] = false;
                    continue;
                }
                if needed != d.mask && !ins.op.is_texture() {
                    d.mask = needed;
                }
            }
        }
        for k in 0..ins.srcs.len() {
            if let Reg::Temp(t) = ins.srcs[k].reg {
                *live.entry(t).or_insert(0) |= ins.lanes_read(k);
            }
        }
    }
    let mut it = keep.into_iter();
    p.instrs.retain(|_| it.next().unwrap());
}

/// `MOV out.mask, tN` where tN is used nowhere else and written only in
/// those lanes: let the writers of tN target `out` directly.
fn coalesce_outputs(p: &mut IrProgram) {
    let mut i = 0;
    while i < p.instrs.len() {
        let ins = &p.instrs[i];
        let candidate = match (&ins.op, &ins.dst, ins.srcs.first()) {
            (Opcode::Mov, Some(d), Some(s)) if matches!(d.reg, Reg::Output(_)) && !s.negate => {
                s.reg.as_temp().filter(|_| lanes(d.mask).all(|l| s.swizzle[l] == l as u8)).map(|t| (t, d.clone()))
            }
            _ => None,
        };
        let Some((t, out)) = candidate else {
            i += 1;
            continue;
        };
        let other_use = p.instrs.iter().enumerate().any(|(j, x)| j != i && x.srcs.iter().any(|s| s.reg == Reg::Temp(t)));
        let writers: Vec<usize> = p
            .instrs
            .iter()
            .enumerate()
            .filter(|(_, x)| x.dst.as_ref().is_some_and(|d| d.reg == Reg::Temp(t)))
            .map(|(j, _)| j)
            .collect();
        let inside = writers.iter().all(|&j| p.instrs[j].dst.as_ref().unwrap().mask & !out.mask == 0);
        if other_use || !inside || writers.is_empty() {
            i += 1;
            continue;
        }
        for j in writers {
            p.instrs[j].dst.as_mut().unwrap().reg = out.reg.clone();
        }
        p.instrs.remove(i);
    }
}

/// Moves into outputs that read no temporaries depend on nothing computed,
/// so they go first, in their original order.
fn hoist_output_copies(p: &mut IrProgram) {
    let early = |x: &Instruction| {
        x.op == Opcode::Mov
            && x.dst.as_ref().is_some_and(|d| matches!(d.reg, Reg::Output(_))) && x.srcs.iter().all(|s| s.reg.as_temp().is_none())
    };
    let (mut front, back): (Vec<_>, Vec<_>) = p.instrs.drain(..).partition(|x| early(x));
    front.extend(back);
    p.instrs = front;
}

fn canonicalize(p: &mut IrProgram) {
    for ins in &mut p.instrs {
        let read = positions_read(ins);
        for s in &mut ins.srcs {
            normalize_swizzle(s, read);
        }
    }
}

/// Renumber temporaries by first appearance and drop unused pool entries.
fn compact(p: &mut IrProgram) {
    let mut temps: BTreeMap<u32, u32> = BTreeMap::new();
    let mut pool: BTreeMap<u32, u32> = BTreeMap::new();
    let mut new_pool = Vec::new();
    let mut renumber = |r: &mut Reg| match r {
        Reg::Temp(t) => {
            let n = temps.len() as u32;
            *t = *temps.entry(*t).or_insert(n);
        }
        Reg::Pool(k) => {
            let n = pool.len() as u32;
            let idx = *pool.entry(*k).or_insert_with(|| {
                new_pool.push(p.pool[*k as usize]);
                n
            });
            *k = idx;
        }
        _ => {}
    };
    for ins in &mut p.instrs {
        for s in &mut ins.srcs {
            renumber(&mut s.reg);
        }
        if let Some(d) = &mut ins.dst {
            renumber(&mut d.reg);
        }
    }
    p.temps = temps.len() as u32;
    p.pool = new_pool;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codegen::ir::Dst;
    use crate::codegen::lower::tests::lower_src;
    use crate::corpus;

    fn ops(p: &IrProgram) -> Vec<Opcode> {
        p.instrs.iter().map(|i| i.op).collect()
    }

    #[test]
    fn simple_transform_coalesces() {
        let ir = optimize(&lower_src(corpus::SIMPLE_TRANSFORM, "simpleTransform", "vs_1_1").unwrap());
        use Opcode::*;
        assert_eq!(ops(&ir), vec![Mov, Mov, Dp4, Dp4, Dp4, Dp4, Mul]);
        assert_eq!(ir.temps, 0);
        assert_eq!(ir.instrs[2].dst, Some(Dst { reg: Reg::Output("oPos".into()), mask: 1 }));
        assert_eq!(ir.instrs[0].dst.as_ref().unwrap().reg, Reg::Output("oT0".into()));
    }

    #[test]
    fn bright_light_map_decal() {
        let ir = optimize(&lower_src(corpus::BRIGHT_LIGHT_MAP_DECAL, "brightLightMapDecal", "arbfp1").unwrap());
        use Opcode::*;
        assert_eq!(ops(&ir), vec![Txp, Txp, Mul, Mul, Mul]);
        assert_eq!(ir.temps, 4);
        assert_eq!(ir.pool, vec![[2.0; 4]]);
    }

    #[test]
    fn copies_and_dead_code() {
        let src = "float4 main(float4 c : COLOR, float4 d : TEXCOORD0) : COLOR { \
                   float4 unused = c * d; float4 r = float4(c.x, d.y, c.z, 1); return r * 3; }";
        let ir = optimize(&lower_src(src, "main", "arbfp1").unwrap());
        // gather: two moves from c and d plus one constant lane, then the
        // multiply writes the output.
        assert_eq!(ops(&ir), vec![Opcode::Mov, Opcode::Mov, Opcode::Mov, Opcode::Mul]);
        assert!(!ir.instrs.iter().any(|i| i.srcs.len() == 2 && i.srcs[1].reg == Reg::Input("fragment.texcoord[0]".into()) && i.op == Opcode::Mul));
    }

    #[test]
    fn idempotent_on_samples() {
        for (src, entry, profile) in [
            (corpus::SIMPLE_TRANSFORM, "simpleTransform", "vs_1_1"),
            (corpus::BRIGHT_LIGHT_MAP_DECAL, "brightLightMapDecal", "arbfp1"),
            ("float4 main(float4 c : COLOR) : COLOR { float4 t = c.wzyx; t.x = -t.y; return t; }", "main", "arbfp1"),
        ] {
            let once = optimize(&lower_src(src, entry, profile).unwrap());
            assert_eq!(optimize(&once), once);
        }
    }
}
