//! Bessel functions of the first kind, integer order.
//!
//! Small arguments (relative to the order) use the power series, where every
//! term is smaller than the previous one. Everything else goes through Miller's
//! backward recurrence normalized by `J_0 + 2 sum J_2k = 1`, which is stable for
//! every order at once.

const RESCALE: f64 = 1.0e250;

/// `J_order(x)` for `x >= 0`. Negative arguments use `J_m(-x) = (-1)^m J_m(x)`.
pub fn bessel_j(order: usize, x: f64) -> f64 {
    if x < 0.0 {
        let v = bessel_j(order, -x);
        return if order % 2 == 0 { v } else { -v };
    }
    if x == 0.0 {
        return if order == 0 { 1.0 } else { 0.0 };
    }
    let q = 0.25 * x * x;
    if q <= 0.25 * (order as f64 + 1.0) {
        return series(order, x);
    }
    *miller(order, x)
        .last()
        .expect("miller returns order + 1 values")
}

/// `[J_0(x), ..., J_max_order(x)]` for `x >= 0`.
pub fn bessel_j_all(max_order: usize, x: f64) -> Vec<f64> {
    if x < 0.0 {
        let mut v = bessel_j_all(max_order, -x);
        v.iter_mut().skip(1).step_by(2).for_each(|j| *j = -*j);
        return v;
    }
    if x == 0.0 {
        let mut v = vec![0.0; max_order + 1];
        v[0] = 1.0;
        return v;
    }
    if x < 1.0 {
        return series_all(max_order, x);
    }
    miller(max_order, x)
}

/// Power series for every order; every term shrinks when `x < 1`.
fn series_all(max_order: usize, x: f64) -> Vec<f64> {
    let half = 0.5 * x;
    let q = -half * half;
    let mut lead = 1.0; // (x/2)^m / m!
    let mut out = Vec::with_capacity(max_order + 1);
    for m in 0..=max_order {
        if m > 0 {
            lead *= half / m as f64;
        }
        let mut term = lead;
        let mut sum = lead;
        for k in 1..60 {
            term *= q / (k as f64 * (k + m) as f64);
            sum += term;
            if term.abs() <= 1e-17 * sum.abs() {
                break;
            }
        }
        out.push(sum);
    }
    out
}

fn series(order: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    // (x/2)^m / m!, built incrementally so it underflows gracefully.
    let mut term = 1.0;
    for k in 1..=order {
        term *= half / k as f64;
        if term == 0.0 {
            return 0.0;
        }
    }
    let q = -half * half;
    let mut sum = term;
    for k in 1..200 {
        term *= q / (k as f64 * (k + order) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn start_order(max_order: usize, x: f64) -> usize {
    let top = (max_order as f64).max(x);
    let n = top + 15.0 * top.cbrt() + 30.0;
    let n = n.ceil() as usize;
    n + (n % 2)
}

/// Miller's algorithm; returns `J_0..=J_max_order`.
fn miller(max_order: usize, x: f64) -> Vec<f64> {
    let start = start_order(max_order, x);
    let mut out = vec![0.0; max_order + 1];
    let two_over_x = 2.0 / x;
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1.0e-300; // J_k
    let mut norm = 0.0;
    let mut k = start;
    loop {
        if k <= max_order {
            out[k] = cur;
        }
        if k % 2 == 0 {
            norm += if k == 0 { cur } else { 2.0 * cur };
        }
        if k == 0 {
            break;
        }
        let prev = k as f64 * two_over_x * cur - next;
        next = cur;
        cur = prev;
        k -= 1;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            next /= RESCALE;
            norm /= RESCALE;
            let hi = max_order.min(start);
            if k < hi {
                out[k + 1..=hi].iter_mut().for_each(|v| *v /= RESCALE);
            }
        }
    }
    let inv = 1.0 / norm;
    out.iter_mut().for_each(|v| *v *= inv);
    out
}
