//! Benchmark generators.
//!
//! Arithmetic and control circuits are named after the public benchmark
//! designs whose function they follow; sizes are scaled down so a full
//! verification run takes seconds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, Sig};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// Arithmetic and random-control designs in the style of the EPFL suite.
    Epfl,
    /// Small classic designs in the style of MCNC, some sequential.
    Mcnc,
}

#[derive(Copy, Clone)]
pub struct Bench {
    pub name: &'static str,
    pub family: Family,
    build: fn() -> Circuit,
}

impl Bench {
    pub fn circuit(&self) -> Circuit {
        (self.build)()
    }
}

impl std::fmt::Debug for Bench {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Bench")
            .field("name", &self.name)
            .field("family", &self.family)
            .finish()
    }
}

pub fn catalog() -> Vec<Bench> {
    use Family::*;
    let b = |name, family, build| Bench {
        name,
        family,
        build,
    };
    vec![
        b("int2float", Epfl, int2float),
        b("ctrl", Epfl, ctrl),
        b("router", Epfl, router),
        b("cavlc", Epfl, cavlc),
        b("priority", Epfl, priority),
        b("dec", Epfl, dec),
        b("i2c", Epfl, i2c),
        b("arbiter", Epfl, arbiter),
        b("mem_ctrl", Epfl, mem_ctrl),
        b("sin", Epfl, sin),
        b("max", Epfl, max),
        b("square", Epfl, square),
        b("sqrt", Epfl, sqrt),
        b("multiplier", Epfl, multiplier),
        b("log2", Epfl, log2),
        b("div", Epfl, div),
        b("voter", Epfl, voter),
        b("adder", Epfl, adder),
        b("bar", Epfl, bar),
        b("alu4", Mcnc, alu4),
        b("parity", Mcnc, parity),
        b("comp", Mcnc, comp),
        b("lfsr", Mcnc, lfsr),
        b("seqctl", Mcnc, seqctl),
    ]
}

pub fn find(name: &str) -> Option<Bench> {
    catalog().into_iter().find(|b| b.name == name)
}

fn rng(name: &str) -> ChaCha8Rng {
    let seed = name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x100_0000_01b3)
    });
    ChaCha8Rng::seed_from_u64(seed)
}

fn int2float() -> Circuit {
    let mut c = Circuit::new("int2float");
    let x = c.inputs("x", 11);
    // Leading one from the top.
    let rev: Vec<Sig> = x.iter().rev().copied().collect();
    let lead = c.first_one(&rev);
    let pos = c.encode(&lead);
    let nz = c.or_all(&x);
    // Normalize: shift left by the leading-zero count, keep 3 mantissa bits.
    let norm = c.shift_left(&x, &pos);
    let mant: Vec<Sig> = norm[7..10].to_vec();
    let exp: Vec<Sig> = pos.iter().map(|&p| c.not(p)).collect();
    let exp: Vec<Sig> = exp.iter().map(|&e| c.and(e, nz)).collect();
    c.outputs("m", &mant);
    c.outputs("e", &exp);
    c
}

/// Random sum-of-products functions over `inputs`.
fn random_sop(
    c: &mut Circuit,
    r: &mut ChaCha8Rng,
    inputs: &[Sig],
    cubes: usize,
    lits: (usize, usize),
) -> Sig {
    let mut terms = Vec::new();
    for _ in 0..cubes {
        let n = r.gen_range(lits.0..=lits.1);
        let mut lit = Vec::new();
        for _ in 0..n {
            let v = inputs[r.gen_range(0..inputs.len())];
            lit.push(if r.gen_bool(0.5) { v } else { c.not(v) });
        }
        terms.push(c.and_all(&lit));
    }
    c.or_all(&terms)
}

fn ctrl() -> Circuit {
    let mut c = Circuit::new("ctrl");
    let mut r = rng("ctrl");
    let op = c.inputs("op", 7);
    let outs: Vec<Sig> = (0..26)
        .map(|_| random_sop(&mut c, &mut r, &op, 4, (3, 5)))
        .collect();
    c.outputs("ctl", &outs);
    c
}

fn cavlc() -> Circuit {
    let mut c = Circuit::new("cavlc");
    let mut r = rng("cavlc");
    let x = c.inputs("x", 10);
    let outs: Vec<Sig> = (0..11)
        .map(|_| random_sop(&mut c, &mut r, &x, 14, (4, 7)))
        .collect();
    c.outputs("code", &outs);
    c
}

fn router() -> Circuit {
    let mut c = Circuit::new("router");
    let dx = c.inputs("dx", 4);
    let dy = c.inputs("dy", 4);
    let cx = c.inputs("cx", 4);
    let cy = c.inputs("cy", 4);
    let payload = c.inputs("p", 8);
    let valid = c.input("valid");
    let east = c.less_than(&cx, &dx);
    let west = c.less_than(&dx, &cx);
    let north = c.less_than(&cy, &dy);
    let south = c.less_than(&dy, &cy);
    let ex = c.equal(&cx, &dx);
    let ey = c.equal(&cy, &dy);
    let local = c.and(ex, ey);
    let e = c.and(east, valid);
    let w = c.and(west, valid);
    let nx = c.and(ex, north);
    let n = c.and(nx, valid);
    let sx = c.and(ex, south);
    let s = c.and(sx, valid);
    let l = c.and(local, valid);
    let ports = [e, w, n, s, l];
    for (pi, &p) in ports.iter().enumerate() {
        let gated: Vec<Sig> = payload.iter().map(|&b| c.and(b, p)).collect();
        c.outputs(&format!("port{pi}_"), &gated);
        c.output(format!("req{pi}"), p);
    }
    c
}

fn priority() -> Circuit {
    let mut c = Circuit::new("priority");
    let req = c.inputs("r", 64);
    let grant = c.first_one(&req);
    let idx = c.encode(&grant);
    let any = c.or_all(&req);
    c.outputs("idx", &idx);
    c.output("valid", any);
    c
}

fn dec() -> Circuit {
    let mut c = Circuit::new("dec");
    let a = c.inputs("a", 7);
    let na: Vec<Sig> = a.iter().map(|&x| c.not(x)).collect();
    let mut outs = Vec::new();
    for m in 0..128usize {
        let lits: Vec<Sig> = (0..7)
            .map(|i| if (m >> i) & 1 == 1 { a[i] } else { na[i] })
            .collect();
        outs.push(c.and_all(&lits));
    }
    c.outputs("d", &outs);
    c
}

/// Random logic with locality: each gate reads recent signals, which
/// produces reconvergent fanout similar to synthesized control logic.
fn random_logic(name: &str, inputs: usize, gates: usize, outputs: usize, span: usize) -> Circuit {
    let mut c = Circuit::new(name);
    let mut r = rng(name);
    let mut pool: Vec<Sig> = c.inputs("i", inputs);
    for _ in 0..gates {
        let lo = pool.len().saturating_sub(span);
        let pick = |r: &mut ChaCha8Rng| pool[r.gen_range(lo..pool.len())];
        let (a, b, s) = (pick(&mut r), pick(&mut r), pick(&mut r));
        let g = match r.gen_range(0..6) {
            0 => c.and(a, b),
            1 => c.or(a, b),
            2 => c.xor(a, b),
            3 => {
                let nb = c.not(b);
                c.and(a, nb)
            }
            4 => c.mux(s, a, b),
            _ => c.maj(a, b, s),
        };
        pool.push(g);
    }
    let tail = pool.len() - outputs.min(pool.len());
    let outs: Vec<Sig> = pool[tail..].to_vec();
    c.outputs("o", &outs);
    c
}

fn i2c() -> Circuit {
    random_logic("i2c", 40, 700, 30, 60)
}

fn mem_ctrl() -> Circuit {
    random_logic("mem_ctrl", 96, 3200, 80, 160)
}

fn arbiter() -> Circuit {
    let mut c = Circuit::new("arbiter");
    let n = 48;
    let req = c.inputs("req", n);
    let ptr = c.inputs("ptr", n);
    // Thermometer mask: bit i allowed when some pointer bit at or below i is set.
    let mut mask = Vec::with_capacity(n);
    let mut acc = c.constant(false);
    for &p in &ptr {
        acc = c.or(acc, p);
        mask.push(acc);
    }
    let masked: Vec<Sig> = req.iter().zip(&mask).map(|(&r, &m)| c.and(r, m)).collect();
    let any_masked = c.or_all(&masked);
    let g_masked = c.first_one(&masked);
    let g_plain = c.first_one(&req);
    let grant = c.mux_word(any_masked, &g_masked, &g_plain);
    c.outputs("gnt", &grant);
    let any = c.or_all(&req);
    c.output("busy", any);
    c
}

fn sin() -> Circuit {
    // Shift-add rotation iterations on 12-bit fixed point.
    let mut c = Circuit::new("sin");
    let w = 12;
    let z0 = c.inputs("a", w);
    let mut x: Vec<Sig> = (0..w).map(|i| c.constant(i == w - 3)).collect();
    let mut y = c.zeros(w);
    let mut z = z0;
    let angles = [0x324u64, 0x1DA, 0x0FA, 0x07F, 0x03F, 0x01F, 0x00F, 0x007];
    for (k, &ang) in angles.iter().enumerate() {
        let neg = *z.last().unwrap();
        let ys = c.sra_const(&y, k);
        let xs = c.sra_const(&x, k);
        let (xp, _) = c.sub(&x, &ys);
        let zero = c.constant(false);
        let (xm, _) = c.add(&x, &ys, zero);
        let (yp, _) = c.add(&y, &xs, zero);
        let (ym, _) = c.sub(&y, &xs);
        let a: Vec<Sig> = (0..w).map(|i| c.constant((ang >> i) & 1 == 1)).collect();
        let (zp, _) = c.sub(&z, &a);
        let (zm, _) = c.add(&z, &a, zero);
        x = c.mux_word(neg, &xm, &xp);
        y = c.mux_word(neg, &ym, &yp);
        z = c.mux_word(neg, &zm, &zp);
    }
    c.outputs("s", &y);
    c
}

fn max() -> Circuit {
    let mut c = Circuit::new("max");
    let w = 16;
    let v: Vec<Vec<Sig>> = (0..4).map(|i| c.inputs(&format!("v{i}_"), w)).collect();
    let l01 = c.less_than(&v[0], &v[1]);
    let m01 = c.mux_word(l01, &v[1], &v[0]);
    let l23 = c.less_than(&v[2], &v[3]);
    let m23 = c.mux_word(l23, &v[3], &v[2]);
    let lt = c.less_than(&m01, &m23);
    let m = c.mux_word(lt, &m23, &m01);
    let i0 = c.mux(lt, l23, l01);
    c.outputs("m", &m);
    c.output("idx0", i0);
    c.output("idx1", lt);
    c
}

fn square() -> Circuit {
    let mut c = Circuit::new("square");
    let a = c.inputs("a", 12);
    let p = c.multiply(&a, &a);
    c.outputs("p", &p);
    c
}

fn multiplier() -> Circuit {
    let mut c = Circuit::new("multiplier");
    let a = c.inputs("a", 12);
    let b = c.inputs("b", 12);
    let p = c.multiply(&a, &b);
    c.outputs("p", &p);
    c
}

fn sqrt() -> Circuit {
    // Restoring digit-by-digit square root of a 20-bit radicand.
    let mut c = Circuit::new("sqrt");
    let x = c.inputs("x", 20);
    let w = 12;
    let mut rem = c.zeros(w);
    let mut root: Vec<Sig> = Vec::new();
    for step in (0..10).rev() {
        // rem = rem << 2 | next two bits
        let mut shifted = vec![x[2 * step], x[2 * step + 1]];
        shifted.extend_from_slice(&rem[..w - 2]);
        // trial = root << 2 | 01
        let one = c.constant(true);
        let zero = c.constant(false);
        let mut trial = vec![one, zero];
        trial.extend(root.iter().copied());
        trial.resize(w, zero);
        let (diff, ok) = c.sub(&shifted, &trial);
        rem = c.mux_word(ok, &diff, &shifted);
        root.insert(0, ok);
    }
    c.outputs("r", &root);
    c
}

fn div() -> Circuit {
    // Restoring division of a 12-bit dividend by a 12-bit divisor.
    let mut c = Circuit::new("div");
    let w = 12;
    let a = c.inputs("a", w);
    let d = c.inputs("d", w);
    let mut rem = c.zeros(w);
    let mut q = vec![c.constant(false); w];
    for i in (0..w).rev() {
        let mut shifted = vec![a[i]];
        shifted.extend_from_slice(&rem[..w - 1]);
        let top = rem[w - 1];
        let (diff, ok) = c.sub(&shifted, &d);
        let take = c.or(ok, top);
        rem = c.mux_word(take, &diff, &shifted);
        q[i] = take;
    }
    c.outputs("q", &q);
    c.outputs("r", &rem);
    c
}

fn log2() -> Circuit {
    // Integer part from the leading one, fraction by repeated squaring.
    let mut c = Circuit::new("log2");
    let x = c.inputs("x", 16);
    let rev: Vec<Sig> = x.iter().rev().copied().collect();
    let lead = c.first_one(&rev);
    let lz = c.encode(&lead);
    let norm = c.shift_left(&x, &lz);
    let int: Vec<Sig> = lz.iter().map(|&b| c.not(b)).collect();
    let mut m: Vec<Sig> = norm[8..16].to_vec();
    let mut frac = Vec::new();
    for _ in 0..3 {
        let sq = c.multiply(&m, &m);
        let top = sq[15];
        frac.push(top);
        let hi: Vec<Sig> = sq[8..16].to_vec();
        let lo: Vec<Sig> = sq[7..15].to_vec();
        m = c.mux_word(top, &hi, &lo);
    }
    frac.reverse();
    c.outputs("int", &int);
    c.outputs("frac", &frac);
    c
}

fn voter() -> Circuit {
    let mut c = Circuit::new("voter");
    let n = 63;
    let v = c.inputs("v", n);
    // Popcount by a carry-save adder tree on bit columns.
    let mut cols: Vec<Vec<Sig>> = vec![v];
    let mut k = 0;
    while k < cols.len() {
        while cols[k].len() > 1 {
            let mut col = std::mem::take(&mut cols[k]);
            let mut next = Vec::new();
            while col.len() >= 3 {
                let (a, b, cc) = (col.remove(0), col.remove(0), col.remove(0));
                let (s, co) = c.full_add(a, b, cc);
                col.push(s);
                next.push(co);
            }
            if col.len() == 2 {
                let (a, b) = (col[0], col[1]);
                let s = c.xor(a, b);
                let co = c.and(a, b);
                col = vec![s];
                next.push(co);
            }
            cols[k] = col;
            if cols.len() == k + 1 {
                cols.push(Vec::new());
            }
            cols[k + 1].extend(next);
        }
        k += 1;
    }
    let count: Vec<Sig> = cols.iter().filter_map(|col| col.first().copied()).collect();
    let half: Vec<Sig> = (0..count.len())
        .map(|i| c.constant((32 >> i) & 1 == 1))
        .collect();
    let (_, geq) = c.sub(&count, &half);
    c.output("maj", geq);
    c
}

fn adder() -> Circuit {
    let mut c = Circuit::new("adder");
    let a = c.inputs("a", 32);
    let b = c.inputs("b", 32);
    let cin = c.input("cin");
    let (s, co) = c.add(&a, &b, cin);
    c.outputs("s", &s);
    c.output("cout", co);
    c
}

fn bar() -> Circuit {
    let mut c = Circuit::new("bar");
    let a = c.inputs("a", 32);
    let sh = c.inputs("sh", 5);
    // Rotate left.
    let mut cur = a;
    for (k, &s) in sh.iter().enumerate() {
        let amt = 1usize << k;
        let rot: Vec<Sig> = (0..32).map(|i| cur[(i + 32 - amt) % 32]).collect();
        cur = c.mux_word(s, &rot, &cur);
    }
    c.outputs("y", &cur);
    c
}

fn alu4() -> Circuit {
    let mut c = Circuit::new("alu4");
    let a = c.inputs("a", 4);
    let b = c.inputs("b", 4);
    let op = c.inputs("op", 3);
    let cin = c.input("cin");
    let (sum, co) = c.add(&a, &b, cin);
    let (diff, geq) = c.sub(&a, &b);
    let and: Vec<Sig> = a.iter().zip(&b).map(|(&x, &y)| c.and(x, y)).collect();
    let or: Vec<Sig> = a.iter().zip(&b).map(|(&x, &y)| c.or(x, y)).collect();
    let xor: Vec<Sig> = a.iter().zip(&b).map(|(&x, &y)| c.xor(x, y)).collect();
    let shl = c.shift_left(&a, &b[..2]);
    let nota: Vec<Sig> = a.iter().map(|&x| c.not(x)).collect();
    let lt = c.not(geq);
    let mut slt = c.zeros(4);
    slt[0] = lt;
    let l0a = c.mux_word(op[0], &diff, &sum);
    let l0b = c.mux_word(op[0], &or, &and);
    let l0c = c.mux_word(op[0], &shl, &xor);
    let l0d = c.mux_word(op[0], &slt, &nota);
    let l1a = c.mux_word(op[1], &l0b, &l0a);
    let l1b = c.mux_word(op[1], &l0d, &l0c);
    let y = c.mux_word(op[2], &l1b, &l1a);
    let zero_flag = {
        let any = c.or_all(&y);
        c.not(any)
    };
    c.outputs("y", &y);
    c.output("carry", co);
    c.output("zero", zero_flag);
    c
}

fn parity() -> Circuit {
    let mut c = Circuit::new("parity");
    let x = c.inputs("x", 64);
    let p = c.xor_all(&x);
    c.output("par", p);
    c
}

fn comp() -> Circuit {
    let mut c = Circuit::new("comp");
    let a = c.inputs("a", 16);
    let b = c.inputs("b", 16);
    let lt = c.less_than(&a, &b);
    let gt = c.less_than(&b, &a);
    let eq = c.equal(&a, &b);
    c.output("lt", lt);
    c.output("gt", gt);
    c.output("eq", eq);
    c
}

fn lfsr() -> Circuit {
    // 16-bit LFSR plus an 8-bit loadable counter.
    let mut c = Circuit::new("lfsr");
    let en = c.input("en");
    let load = c.input("load");
    let data = c.inputs("d", 8);
    let s: Vec<Sig> = (0..16).map(|i| c.latch(format!("s{i}"), i == 0)).collect();
    let t1 = c.xor(s[15], s[13]);
    let t2 = c.xor(s[12], s[10]);
    let fb = c.xor(t1, t2);
    for i in 0..16 {
        let next = if i == 0 { fb } else { s[i - 1] };
        let d = c.mux(en, next, s[i]);
        c.set_latch_input(s[i], d);
    }
    let q: Vec<Sig> = (0..8).map(|i| c.latch(format!("q{i}"), false)).collect();
    let one: Vec<Sig> = (0..8).map(|i| c.constant(i == 0)).collect();
    let zero = c.constant(false);
    let (inc, _) = c.add(&q, &one, zero);
    let stepped = c.mux_word(en, &inc, &q);
    let next = c.mux_word(load, &data, &stepped);
    for i in 0..8 {
        c.set_latch_input(q[i], next[i]);
    }
    let mixed: Vec<Sig> = (0..8).map(|i| c.xor(s[i], q[i])).collect();
    c.outputs("y", &mixed);
    let all = c.and_all(&q);
    c.output("wrap", all);
    c
}

fn seqctl() -> Circuit {
    // Random next-state logic over a 12-bit state register.
    let mut c = Circuit::new("seqctl");
    let mut r = rng("seqctl");
    let ins = c.inputs("in", 10);
    let st: Vec<Sig> = (0..12).map(|i| c.latch(format!("st{i}"), false)).collect();
    let mut pool: Vec<Sig> = ins.iter().chain(&st).copied().collect();
    for _ in 0..260 {
        let lo = pool.len().saturating_sub(40);
        let a = pool[r.gen_range(lo..pool.len())];
        let b = pool[r.gen_range(0..pool.len())];
        let s = pool[r.gen_range(lo..pool.len())];
        let g = match r.gen_range(0..4) {
            0 => c.and(a, b),
            1 => c.xor(a, b),
            2 => c.mux(s, a, b),
            _ => c.or(a, b),
        };
        pool.push(g);
    }
    let n = pool.len();
    for (i, &l) in st.iter().enumerate() {
        c.set_latch_input(l, pool[n - 1 - i]);
    }
    let outs: Vec<Sig> = pool[n - 28..n - 12].to_vec();
    c.outputs("out", &outs);
    c
}
