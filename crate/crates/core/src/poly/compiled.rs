//! Flattened form of a polynomial system for repeated evaluation of values
//! and Jacobians inside path tracking.
//!
//! Every monomial that occurs in a term or in a first partial derivative is
//! stored once in a table and computed from a parent monomial with a single
//! multiplication. Values and Jacobian entries are then plain
//! coefficient-times-table-entry accumulations.

use super::{Polynomial, C64};
use nalgebra::DMatrix;
use std::cell::RefCell;
use std::collections::HashMap;

thread_local! {
    static MONO: RefCell<Vec<C64>> = const { RefCell::new(Vec::new()) };
}

#[derive(Clone, Debug)]
pub struct CompiledSystem {
    nvars: usize,
    nrows: usize,
    /// (parent index, variable) for table entries after the constant monomial
    table: Vec<(u32, u32)>,
    /// (row, monomial, coefficient)
    values: Vec<(u32, u32, C64)>,
    /// (column-major offset into the Jacobian, monomial, coefficient)
    partials: Vec<(u32, u32, C64)>,
    /// the same with real coefficients, which are most of them in practice
    values_re: Vec<(u32, u32, f64)>,
    partials_re: Vec<(u32, u32, f64)>,
}

fn split(all: Vec<(u32, u32, C64)>) -> (Vec<(u32, u32, C64)>, Vec<(u32, u32, f64)>) {
    let (re, cx): (Vec<_>, Vec<_>) = all.into_iter().partition(|t| t.2.im == 0.0);
    (cx, re.into_iter().map(|(a, b, c)| (a, b, c.re)).collect())
}

struct TableBuilder {
    index: HashMap<Vec<u32>, u32>,
    entries: Vec<(Vec<u32>, u32, u32)>,
}

impl TableBuilder {
    fn get(&mut self, e: &[u32]) -> u32 {
        if let Some(&i) = self.index.get(e) {
            return i;
        }
        let v = e.iter().position(|&x| x > 0).expect("constant monomial is preset");
        let mut parent = e.to_vec();
        parent[v] -= 1;
        let p = self.get(&parent);
        let i = self.entries.len() as u32;
        self.entries.push((e.to_vec(), p, v as u32));
        self.index.insert(e.to_vec(), i);
        i
    }
}

impl CompiledSystem {
    pub fn new(polys: &[Polynomial], nvars: usize) -> Self {
        let mut tb = TableBuilder { index: HashMap::new(), entries: Vec::new() };
        tb.entries.push((vec![0; nvars], 0, 0));
        tb.index.insert(vec![0; nvars], 0);
        let nrows = polys.len();
        let mut values = Vec::new();
        let mut partials = Vec::new();
        for (r, p) in polys.iter().enumerate() {
            assert_eq!(p.nvars(), nvars);
            for (m, c) in p.terms() {
                let e = m.exponents();
                values.push((r as u32, tb.get(e), *c));
                let mut d = e.to_vec();
                for k in 0..nvars {
                    if e[k] == 0 {
                        continue;
                    }
                    d[k] -= 1;
                    let idx = tb.get(&d);
                    d[k] += 1;
                    partials.push(((k * nrows + r) as u32, idx, *c * e[k] as f64));
                }
            }
        }
        // parents always precede children because `get` inserts them first
        let table = tb.entries.iter().skip(1).map(|&(_, p, v)| (p, v)).collect();
        let (values, values_re) = split(values);
        let (partials, partials_re) = split(partials);
        CompiledSystem { nvars, nrows, table, values, partials, values_re, partials_re }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.nrows
    }

    pub fn is_empty(&self) -> bool {
        self.nrows == 0
    }

    fn monomials(&self, x: &[C64], buf: &mut Vec<C64>) {
        buf.clear();
        buf.reserve(self.table.len() + 1);
        buf.push(C64::new(1.0, 0.0));
        for &(p, v) in &self.table {
            let val = buf[p as usize] * x[v as usize];
            buf.push(val);
        }
    }

    pub fn eval(&self, x: &[C64], out: &mut [C64]) {
        debug_assert_eq!(x.len(), self.nvars);
        MONO.with_borrow_mut(|mono| {
            self.monomials(x, mono);
            out.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
            for &(r, m, c) in &self.values {
                out[r as usize] += c * mono[m as usize];
            }
            for &(r, m, c) in &self.values_re {
                out[r as usize] += mono[m as usize] * c;
            }
        });
    }

    pub fn eval_vec(&self, x: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::default(); self.nrows];
        self.eval(x, &mut out);
        out
    }

    /// Values into `out`, Jacobian (rows x nvars) into `jac`.
    pub fn eval_jac(&self, x: &[C64], out: &mut [C64], jac: &mut DMatrix<C64>) {
        debug_assert_eq!(x.len(), self.nvars);
        debug_assert_eq!(jac.shape(), (self.nrows, self.nvars));
        MONO.with_borrow_mut(|mono| {
            self.monomials(x, mono);
            out.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
            for &(r, m, c) in &self.values {
                out[r as usize] += c * mono[m as usize];
            }
            for &(r, m, c) in &self.values_re {
                out[r as usize] += mono[m as usize] * c;
            }
            let flat = jac.as_mut_slice();
            flat.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
            for &(o, m, c) in &self.partials {
                flat[o as usize] += c * mono[m as usize];
            }
            for &(o, m, c) in &self.partials_re {
                flat[o as usize] += mono[m as usize] * c;
            }
        });
    }
}
