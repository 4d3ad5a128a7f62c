use super::{PgaInstr, PgaSeq, PgaTerm};

fn flatten(t: &PgaTerm) -> PgaSeq {
    match t {
        PgaTerm::Instr(i) => PgaSeq::finite(vec![i.clone()]),
        PgaTerm::Concat(parts) => {
            let mut acc = PgaSeq::finite(Vec::new());
            for part in parts {
                // X^w;Y = X^w
                if acc.repeat.is_some() {
                    break;
                }
                let s = flatten(part);
                acc.prefix.extend(s.prefix);
                acc.repeat = s.repeat;
            }
            acc
        }
        PgaTerm::Power(x, n) => {
            let s = flatten(x);
            if s.repeat.is_some() {
                return s;
            }
            let len = s.prefix.len() * n;
            PgaSeq::finite(s.prefix.into_iter().cycle().take(len).collect())
        }
        PgaTerm::Repeat(x) => {
            let s = flatten(x);
            if s.repeat.is_some() {
                return s;
            }
            PgaSeq { prefix: Vec::new(), repeat: Some(s.prefix) }
        }
    }
}

/// Shortest `w` with `r = w^k`.
fn primitive_root(r: &[PgaInstr]) -> usize {
    let n = r.len();
    (1..=n)
        .find(|&d| n % d == 0 && (d..n).all(|i| r[i] == r[i - d]))
        .unwrap_or(n)
}

/// Brings a term into the shape `X` or `X;Y^w`, with the loop as short as
/// possible and the prefix not ending in a copy of the loop's tail.
pub fn first_canonical(t: &PgaTerm) -> PgaSeq {
    let mut s = flatten(t);
    if let Some(r) = &mut s.repeat {
        if r.is_empty() {
            s.repeat = None;
            return s;
        }
        r.truncate(primitive_root(r));
        // u;(Y;u)^w = (u;Y)^w
        while s.prefix.last().is_some() && s.prefix.last() == r.last() {
            s.prefix.pop();
            r.rotate_right(1);
        }
    }
    s
}

/// Top-level positions: the prefix, then one copy of the loop.
struct Layout<'a> {
    s: &'a PgaSeq,
    p: usize,
    r: usize,
}

impl<'a> Layout<'a> {
    fn new(s: &'a PgaSeq) -> Self {
        Layout { s, p: s.prefix.len(), r: s.repeat.as_ref().map_or(0, |r| r.len()) }
    }

    fn get(&self, i: usize) -> Option<&'a PgaInstr> {
        if i < self.p {
            return self.s.prefix.get(i);
        }
        let r = self.s.repeat.as_ref()?;
        Some(&r[(i - self.p) % self.r])
    }

    /// Position reached `k` steps after `i`, folded into one loop copy.
    fn step(&self, i: usize, k: usize) -> usize {
        let t = i + k;
        if self.r > 0 && t >= self.p {
            self.p + (t - self.p) % self.r
        } else {
            t
        }
    }

    /// Shortest positive forward distance from `i` to `t`; going back is
    /// only possible inside the loop.
    fn distance(&self, i: usize, t: usize) -> usize {
        if t > i {
            t - i
        } else {
            self.r - (i - t)
        }
    }
}

/// Where the jump at `i` finally lands, following chains of jumps; `None`
/// when it ends in `#0` or a jump cycle.
fn final_target(l: &Layout, i: usize, k: usize) -> Option<usize> {
    let mut seen = vec![i];
    let mut pos = l.step(i, k);
    loop {
        match l.get(pos) {
            Some(PgaInstr::Jump(0)) => return None,
            Some(PgaInstr::Jump(m)) => {
                if seen.contains(&pos) {
                    return None;
                }
                seen.push(pos);
                pos = l.step(pos, *m);
            }
            _ => return Some(pos),
        }
    }
}

/// Removes chained jumps and shortens counters into the loop. Units are
/// left alone. Jumps past the end of a finite sequence are kept.
pub fn second_canonical(s: &PgaSeq) -> PgaSeq {
    let l = Layout::new(s);
    let total = l.p + l.r;
    let mut out: Vec<PgaInstr> = (0..total).map(|i| l.get(i).unwrap().clone()).collect();
    for (i, slot) in out.iter_mut().enumerate() {
        let PgaInstr::Jump(k) = *slot else { continue };
        if k == 0 {
            continue;
        }
        let first = l.step(i, k);
        if l.r == 0 && first >= total {
            continue;
        }
        *slot = match final_target(&l, i, k) {
            None => PgaInstr::Jump(0),
            Some(t) => PgaInstr::Jump(l.distance(i, t)),
        };
    }
    let repeat = s.repeat.as_ref().map(|_| out.split_off(l.p));
    PgaSeq { prefix: out, repeat }
}
