//! Exact revised simplex for packing LPs `max c.x, A x <= b, x >= 0` with
//! non-negative `A` and `b`, where columns and rows are added on demand.

use std::collections::HashMap;

use num_traits::{Signed, Zero};

use crate::netcore::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Var {
    Slack(usize),
    Col(usize),
}

#[derive(Debug, Clone)]
pub struct Column {
    pub entries: Vec<(usize, Rat)>,
    pub cost: Rat,
}

#[derive(Debug, Default)]
pub struct PackingLp {
    row_of: HashMap<usize, usize>,
    resource: Vec<usize>,
    b: Vec<Rat>,
    cols: Vec<Column>,
    basis: Vec<Var>,
    binv: Vec<Vec<Rat>>,
    xb: Vec<Rat>,
    in_basis: Vec<bool>,
}

const DEGENERATE_SWITCH: usize = 50;

impl PackingLp {
    pub fn new() -> PackingLp {
        PackingLp::default()
    }

    fn ensure_row(&mut self, res: usize, cap: &dyn Fn(usize) -> Rat) -> usize {
        if let Some(&r) = self.row_of.get(&res) {
            return r;
        }
        let r = self.b.len();
        let c = cap(res);
        self.row_of.insert(res, r);
        self.resource.push(res);
        for row in self.binv.iter_mut() {
            row.push(Rat::zero());
        }
        let mut e = vec![Rat::zero(); r + 1];
        e[r] = Rat::from_integer(1.into());
        self.binv.push(e);
        self.xb.push(c.clone());
        self.b.push(c);
        self.basis.push(Var::Slack(r));
        r
    }

    /// Adds a column given as (resource, coefficient) pairs. Unseen resources get a row
    /// with capacity `cap(resource)`.
    pub fn add_column(
        &mut self,
        entries: &[(usize, Rat)],
        cost: Rat,
        cap: &dyn Fn(usize) -> Rat,
    ) -> usize {
        let mut e = Vec::with_capacity(entries.len());
        for (res, a) in entries {
            let r = self.ensure_row(*res, cap);
            e.push((r, a.clone()));
        }
        self.cols.push(Column { entries: e, cost });
        self.in_basis.push(false);
        self.cols.len() - 1
    }

    /// Dual value per resource.
    pub fn duals(&self) -> HashMap<usize, Rat> {
        let y = self.dual_vec();
        self.resource
            .iter()
            .enumerate()
            .map(|(r, &res)| (res, y[r].clone()))
            .collect()
    }

    fn dual_vec(&self) -> Vec<Rat> {
        let m = self.b.len();
        let mut y = vec![Rat::zero(); m];
        for (i, var) in self.basis.iter().enumerate() {
            if let Var::Col(j) = var {
                let c = &self.cols[*j].cost;
                if c.is_zero() {
                    continue;
                }
                for (k, yk) in y.iter_mut().enumerate() {
                    if !self.binv[i][k].is_zero() {
                        *yk += c * &self.binv[i][k];
                    }
                }
            }
        }
        y
    }

    fn reduced(&self, j: usize, y: &[Rat]) -> Rat {
        let c = &self.cols[j];
        let mut rc = c.cost.clone();
        for (r, a) in &c.entries {
            rc -= a * &y[*r];
        }
        rc
    }

    /// Pivots until no existing column improves. Returns the number of pivots.
    pub fn optimize_existing(&mut self) -> usize {
        let mut pivots = 0;
        let mut degenerate = 0;
        loop {
            let y = self.dual_vec();
            let bland = degenerate >= DEGENERATE_SWITCH;
            let mut enter: Option<(Var, Rat)> = None;
            for (r, yr) in y.iter().enumerate() {
                if yr.is_negative() && !self.basis.contains(&Var::Slack(r)) {
                    let rc = -yr.clone();
                    if enter.as_ref().map_or(true, |(_, b)| !bland && rc > *b) {
                        enter = Some((Var::Slack(r), rc));
                    }
                }
            }
            for j in 0..self.cols.len() {
                if self.in_basis[j] {
                    continue;
                }
                let rc = self.reduced(j, &y);
                if rc.is_positive() && enter.as_ref().map_or(true, |(_, b)| !bland && rc > *b) {
                    enter = Some((Var::Col(j), rc));
                }
            }
            let Some((var, _)) = enter else { return pivots };
            let step_zero = self.pivot(var);
            pivots += 1;
            if step_zero {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
        }
    }

    fn column_dense(&self, var: Var) -> Vec<Rat> {
        let m = self.b.len();
        let mut a = vec![Rat::zero(); m];
        match var {
            Var::Slack(r) => a[r] = Rat::from_integer(1.into()),
            Var::Col(j) => {
                for (r, v) in &self.cols[j].entries {
                    a[*r] += v;
                }
            }
        }
        a
    }

    /// Returns true for a degenerate (zero step) pivot.
    fn pivot(&mut self, var: Var) -> bool {
        let m = self.b.len();
        let a = self.column_dense(var);
        let nz: Vec<usize> = (0..m).filter(|&k| !a[k].is_zero()).collect();
        let mut d = vec![Rat::zero(); m];
        for (i, di) in d.iter_mut().enumerate() {
            for &k in &nz {
                if !self.binv[i][k].is_zero() {
                    *di += &self.binv[i][k] * &a[k];
                }
            }
        }
        let mut leave: Option<(usize, Rat)> = None;
        for i in 0..m {
            if d[i].is_positive() {
                let ratio = &self.xb[i] / &d[i];
                let better = match &leave {
                    None => true,
                    Some((p, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*p])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (p, ratio) = leave.expect("packing LP is bounded");
        let dp = d[p].clone();
        for k in 0..m {
            if !self.binv[p][k].is_zero() {
                self.binv[p][k] = &self.binv[p][k] / &dp;
            }
        }
        self.xb[p] = &self.xb[p] / &dp;
        let prow = self.binv[p].clone();
        let px = self.xb[p].clone();
        for i in 0..m {
            if i == p || d[i].is_zero() {
                continue;
            }
            let di = d[i].clone();
            for k in 0..m {
                if !prow[k].is_zero() {
                    let t = &di * &prow[k];
                    self.binv[i][k] -= t;
                }
            }
            self.xb[i] -= &di * &px;
        }
        if let Var::Col(j) = self.basis[p] {
            self.in_basis[j] = false;
        }
        if let Var::Col(j) = var {
            self.in_basis[j] = true;
        }
        self.basis[p] = var;
        ratio.is_zero()
    }

    /// Positive column values of the current basic solution.
    pub fn solution(&self) -> Vec<(usize, Rat)> {
        let mut out: Vec<(usize, Rat)> = self
            .basis
            .iter()
            .zip(&self.xb)
            .filter_map(|(v, x)| match v {
                Var::Col(j) if x.is_positive() => Some((*j, x.clone())),
                _ => None,
            })
            .collect();
        out.sort_by_key(|(j, _)| *j);
        out
    }

    pub fn objective(&self) -> Rat {
        self.solution()
            .iter()
            .fold(Rat::zero(), |a, (j, x)| a + &self.cols[*j].cost * x)
    }
}
