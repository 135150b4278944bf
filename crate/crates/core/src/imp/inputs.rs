// SPDX-License-Identifier: Apache-2.0

use std::sync::Arc;

use super::interp::Bounds;
use super::signature::{SemType, Signature};
use super::value::Value;

pub type InputState = Vec<Value>;

/// Every value of type `ty` within `bounds`: shorter lists first, then
/// lexicographic by element, each element ascending from the minimum.
pub fn values_of(ty: SemType, bounds: &Bounds) -> Vec<Value> {
    let (lo, hi) = (bounds.min_int(), bounds.max_int());
    match ty {
        SemType::Int => (lo..=hi).map(Value::Int).collect(),
        SemType::Bool => vec![Value::Bool(false), Value::Bool(true)],
        SemType::ListInt | SemType::TupleInt => {
            let mut out = Vec::new();
            for len in 0..=bounds.max_list_len {
                let mut cur = vec![lo; len];
                'odometer: loop {
                    let items: Vec<Value> = cur.iter().map(|&n| Value::Int(n)).collect();
                    out.push(match ty {
                        SemType::ListInt => Value::list(items),
                        _ => Value::Tuple(Arc::new(items)),
                    });
                    let mut k = len;
                    loop {
                        if k == 0 {
                            break 'odometer;
                        }
                        k -= 1;
                        if cur[k] < hi {
                            cur[k] += 1;
                            cur[k + 1..].iter_mut().for_each(|x| *x = lo);
                            break;
                        }
                    }
                }
            }
            out
        }
    }
}

/// Number of inputs `enumerate_inputs` will produce, saturating.
pub fn input_count(sig: &Signature, bounds: &Bounds) -> u128 {
    let per = |ty: SemType| -> u128 {
        let w = 1u128 << bounds.int_bits.min(100);
        match ty {
            SemType::Int => w,
            SemType::Bool => 2,
            SemType::ListInt | SemType::TupleInt => {
                let mut total = 0u128;
                let mut pow = 1u128;
                for _ in 0..=bounds.max_list_len {
                    total = total.saturating_add(pow);
                    pow = pow.saturating_mul(w);
                }
                total
            }
        }
    };
    sig.params.iter().fold(1u128, |acc, (_, t)| acc.saturating_mul(per(*t)))
}

/// All bounded inputs for `sig`, in a fixed order. With several parameters
/// the first one varies slowest.
pub fn enumerate_inputs(sig: &Signature, bounds: &Bounds) -> Vec<InputState> {
    let domains: Vec<Vec<Value>> = sig.params.iter().map(|(_, t)| values_of(*t, bounds)).collect();
    let mut out = vec![Vec::new()];
    for dom in &domains {
        let mut next = Vec::with_capacity(out.len() * dom.len());
        for prefix in &out {
            for v in dom {
                let mut p = prefix.clone();
                p.push(v.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}
