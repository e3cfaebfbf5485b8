//! Integer-order Bessel functions of the first kind, evaluated as a whole
//! sequence `J_0..=J_n` by Miller's downward recurrence normalised with
//! `J_0 + 2 sum J_2k = 1`.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

const RESCALE_ABOVE: f64 = 1e250;

/// `[J_0(x), J_1(x), ..., J_order(x)]`.
pub fn bessel_j_sequence(order: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; order + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    let top = order.max(ax.ceil() as usize);
    // start well above both the order and the argument
    let start = 2 * ((top + 20 + (160.0 * top as f64).sqrt() as usize) / 2 + 1);

    let mut next = 0.0; // J_{j+1}
    let mut cur = 1e-300; // J_j
    let mut norm = 0.0;
    for j in (1..=start).rev() {
        let prev = 2.0 * j as f64 / ax * cur - next; // J_{j-1}
        next = cur;
        cur = prev;
        let idx = j - 1;
        if idx <= order {
            out[idx] = cur;
        }
        if idx % 2 == 0 && idx > 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > RESCALE_ABOVE {
            cur /= RESCALE_ABOVE;
            next /= RESCALE_ABOVE;
            norm /= RESCALE_ABOVE;
            for v in out.iter_mut() {
                *v /= RESCALE_ABOVE;
            }
        }
    }
    // `next` is now J_1 and `cur` J_0 (the loop ends on idx = 0)
    let _ = next;
    norm += cur;
    for v in out.iter_mut() {
        *v /= norm;
    }
    if x < 0.0 {
        for (j, v) in out.iter_mut().enumerate() {
            if j % 2 == 1 {
                *v = -*v;
            }
        }
    }
    out
}

/// Series cutoff for the kick expansion: the last order whose `|J_j(x)|`
/// is at least `1e-16`, but never less than `ceil(|x|) + 40`.
pub fn series_cutoff(x: f64) -> usize {
    let floor = x.abs().ceil() as usize + 40;
    let mut len = floor;
    loop {
        let seq = bessel_j_sequence(len, x);
        match seq.iter().rposition(|v| v.abs() >= 1e-16) {
            Some(last) if last + 1 >= len => len *= 2,
            Some(last) => return last.max(floor),
            None => return floor,
        }
    }
}
