//! Exact linear programming over [`Scalar`]s.
//!
//! A dense two-phase simplex with Bland's rule. Every verdict carries
//! something checkable: a feasible assignment, a Farkas certificate for
//! infeasibility, or an improving ray for an unbounded objective. The
//! `check_*` methods re-verify those by exact substitution.
//!
//! Only closed constraints (`≥`, `=`) are supported. Strict inequalities in
//! positively homogeneous problems are encoded by callers as `≥ 1`.

use std::fmt;

use log::trace;
use thiserror::Error;

use crate::algebra::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("constraint has {actual} coefficients but the system has {expected} variables")]
    RowLength { expected: usize, actual: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Ge,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Scalar>,
    pub relation: Relation,
    pub rhs: Scalar,
}

impl Constraint {
    fn lhs(&self, x: &[Scalar]) -> Scalar {
        dot(&self.coeffs, x)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Objective {
    pub sense: Sense,
    pub coeffs: Vec<Scalar>,
}

fn dot(a: &[Scalar], x: &[Scalar]) -> Scalar {
    a.iter()
        .zip(x)
        .filter(|(c, v)| !c.is_zero() && !v.is_zero())
        .map(|(c, v)| c * v)
        .sum()
}

/// A feasibility problem `A x (≥|=) b` with per-variable sign constraints
/// and an optional linear objective.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinearSystem {
    names: Vec<String>,
    nonneg: Vec<bool>,
    constraints: Vec<Constraint>,
    objective: Option<Objective>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Feasible {
        assignment: Vec<Scalar>,
        objective: Option<Scalar>,
    },
    /// Multipliers `y`, one per constraint (`y ≥ 0` on `≥` rows), with
    /// `yᵀA ≤ 0` on nonnegative variables, `yᵀA = 0` on free ones and
    /// `yᵀb > 0`: summing the rows yields `0 ≥ positive`.
    Infeasible { certificate: Vec<Scalar> },
    /// The objective improves without bound from `assignment` along `ray`.
    Unbounded {
        assignment: Vec<Scalar>,
        ray: Vec<Scalar>,
    },
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible { .. })
    }

    pub fn assignment(&self) -> Option<&[Scalar]> {
        match self {
            LpOutcome::Feasible { assignment, .. } | LpOutcome::Unbounded { assignment, .. } => {
                Some(assignment)
            }
            LpOutcome::Infeasible { .. } => None,
        }
    }
}

impl LinearSystem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable(&mut self, name: impl Into<String>, nonneg: bool) -> usize {
        self.names.push(name.into());
        self.nonneg.push(nonneg);
        for c in &mut self.constraints {
            c.coeffs.push(Scalar::zero());
        }
        if let Some(obj) = &mut self.objective {
            obj.coeffs.push(Scalar::zero());
        }
        self.names.len() - 1
    }

    pub fn num_variables(&self) -> usize {
        self.names.len()
    }

    pub fn variable_names(&self) -> &[String] {
        &self.names
    }

    pub fn is_nonneg(&self, j: usize) -> bool {
        self.nonneg[j]
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> Option<&Objective> {
        self.objective.as_ref()
    }

    fn check_len(&self, coeffs: &[Scalar]) -> Result<(), LpError> {
        if coeffs.len() != self.names.len() {
            return Err(LpError::RowLength {
                expected: self.names.len(),
                actual: coeffs.len(),
            });
        }
        Ok(())
    }

    pub fn add_constraint(
        &mut self,
        coeffs: Vec<Scalar>,
        relation: Relation,
        rhs: Scalar,
    ) -> Result<usize, LpError> {
        self.check_len(&coeffs)?;
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        Ok(self.constraints.len() - 1)
    }

    /// Adds `coeffs · x ≤ rhs`, stored as `−coeffs · x ≥ −rhs`.
    pub fn add_le(&mut self, coeffs: Vec<Scalar>, rhs: Scalar) -> Result<usize, LpError> {
        let neg = coeffs.into_iter().map(|c| -c).collect();
        self.add_constraint(neg, Relation::Ge, -rhs)
    }

    /// Sparse helper: `Σ coeff·x_j (rel) rhs` from `(j, coeff)` pairs.
    pub fn add_sparse(
        &mut self,
        terms: &[(usize, Scalar)],
        relation: Relation,
        rhs: Scalar,
    ) -> Result<usize, LpError> {
        let mut row = vec![Scalar::zero(); self.names.len()];
        for (j, c) in terms {
            if *j >= row.len() {
                return Err(LpError::RowLength {
                    expected: self.names.len(),
                    actual: *j + 1,
                });
            }
            row[*j] = &row[*j] + c;
        }
        self.add_constraint(row, relation, rhs)
    }

    pub fn set_objective(&mut self, sense: Sense, coeffs: Vec<Scalar>) -> Result<(), LpError> {
        self.check_len(&coeffs)?;
        self.objective = Some(Objective { sense, coeffs });
        Ok(())
    }

    pub fn objective_value(&self, x: &[Scalar]) -> Option<Scalar> {
        self.objective.as_ref().map(|o| dot(&o.coeffs, x))
    }

    /// Exact check that `x` satisfies every constraint and sign restriction.
    pub fn check_assignment(&self, x: &[Scalar]) -> bool {
        if x.len() != self.names.len() {
            return false;
        }
        let signs_ok = x
            .iter()
            .zip(&self.nonneg)
            .all(|(v, nn)| !nn || !v.is_negative());
        signs_ok
            && self.constraints.iter().all(|c| {
                let lhs = c.lhs(x);
                match c.relation {
                    Relation::Ge => lhs >= c.rhs,
                    Relation::Eq => lhs == c.rhs,
                }
            })
    }

    /// Exact check of a Farkas certificate (see [`LpOutcome::Infeasible`]).
    pub fn check_certificate(&self, y: &[Scalar]) -> bool {
        if y.len() != self.constraints.len() {
            return false;
        }
        let signs_ok = y
            .iter()
            .zip(&self.constraints)
            .all(|(yi, c)| c.relation == Relation::Eq || !yi.is_negative());
        if !signs_ok {
            return false;
        }
        let cols_ok = (0..self.names.len()).all(|j| {
            let s: Scalar = y
                .iter()
                .zip(&self.constraints)
                .map(|(yi, c)| yi * &c.coeffs[j])
                .sum();
            if self.nonneg[j] {
                !s.is_positive()
            } else {
                s.is_zero()
            }
        });
        let rhs: Scalar = y
            .iter()
            .zip(&self.constraints)
            .map(|(yi, c)| yi * &c.rhs)
            .sum();
        cols_ok && rhs.is_positive()
    }

    /// Exact check that `ray` is a recession direction that strictly
    /// improves the objective.
    pub fn check_ray(&self, ray: &[Scalar]) -> bool {
        let Some(obj) = &self.objective else {
            return false;
        };
        if ray.len() != self.names.len() {
            return false;
        }
        let signs_ok = ray
            .iter()
            .zip(&self.nonneg)
            .all(|(v, nn)| !nn || !v.is_negative());
        let rows_ok = self.constraints.iter().all(|c| {
            let lhs = dot(&c.coeffs, ray);
            match c.relation {
                Relation::Ge => !lhs.is_negative(),
                Relation::Eq => lhs.is_zero(),
            }
        });
        let gain = dot(&obj.coeffs, ray);
        let improves = match obj.sense {
            Sense::Maximize => gain.is_positive(),
            Sense::Minimize => gain.is_negative(),
        };
        signs_ok && rows_ok && improves
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).run(self)
    }
}

impl fmt::Display for LinearSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let term = |coeffs: &[Scalar]| -> String {
            let parts: Vec<String> = coeffs
                .iter()
                .zip(&self.names)
                .filter(|(c, _)| !c.is_zero())
                .map(|(c, n)| format!("{c}*{n}"))
                .collect();
            if parts.is_empty() {
                "0".into()
            } else {
                parts.join(" + ")
            }
        };
        if let Some(o) = &self.objective {
            let s = match o.sense {
                Sense::Maximize => "maximize",
                Sense::Minimize => "minimize",
            };
            writeln!(f, "{s} {}", term(&o.coeffs))?;
        }
        for c in &self.constraints {
            let r = match c.relation {
                Relation::Ge => ">=",
                Relation::Eq => "=",
            };
            writeln!(f, "  {} {r} {}", term(&c.coeffs), c.rhs)?;
        }
        let free: Vec<&str> = self
            .names
            .iter()
            .zip(&self.nonneg)
            .filter(|(_, nn)| !**nn)
            .map(|(n, _)| n.as_str())
            .collect();
        if !free.is_empty() {
            writeln!(f, "  free: {}", free.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
enum Column {
    Plus(usize),
    Minus(usize),
    Surplus,
    Artificial,
}

/// Dense simplex tableau for `min cᵀz, A'z = b' ≥ 0, z ≥ 0`.
struct Tableau {
    rows: Vec<Vec<Scalar>>,
    /// Row sign flips applied so that `b' ≥ 0`.
    row_sign: Vec<bool>,
    /// Original constraint index per row; rows may be dropped as redundant.
    row_origin: Vec<usize>,
    basis: Vec<usize>,
    columns: Vec<Column>,
    /// First artificial column; artificial `i` belongs to original row `i`.
    art_start: usize,
    /// Reduced costs, with `-objective` in the last slot.
    z: Vec<Scalar>,
}

enum Step {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn build(sys: &LinearSystem) -> Tableau {
        let mut columns = Vec::new();
        for (j, nn) in sys.nonneg.iter().enumerate() {
            columns.push(Column::Plus(j));
            if !nn {
                columns.push(Column::Minus(j));
            }
        }
        let surplus_start = columns.len();
        let n_surplus = sys
            .constraints
            .iter()
            .filter(|c| c.relation == Relation::Ge)
            .count();
        columns.extend(std::iter::repeat_n(Column::Surplus, n_surplus));
        let art_start = columns.len();
        let m = sys.constraints.len();
        columns.extend(std::iter::repeat_n(Column::Artificial, m));
        let width = columns.len() + 1;

        let mut rows = Vec::with_capacity(m);
        let mut row_sign = Vec::with_capacity(m);
        let mut surplus = surplus_start;
        for (i, c) in sys.constraints.iter().enumerate() {
            let flip = c.rhs.is_negative();
            let sgn = |v: Scalar| if flip { -v } else { v };
            let mut row = vec![Scalar::zero(); width];
            for (k, col) in columns[..surplus_start].iter().enumerate() {
                row[k] = match col {
                    Column::Plus(j) => sgn(c.coeffs[*j].clone()),
                    Column::Minus(j) => sgn(-&c.coeffs[*j]),
                    _ => unreachable!(),
                };
            }
            if c.relation == Relation::Ge {
                row[surplus] = sgn(Scalar::int(-1));
                surplus += 1;
            }
            row[art_start + i] = Scalar::one();
            row[width - 1] = sgn(c.rhs.clone());
            rows.push(row);
            row_sign.push(flip);
        }
        Tableau {
            rows,
            row_sign,
            row_origin: (0..m).collect(),
            basis: (art_start..art_start + m).collect(),
            columns,
            art_start,
            z: vec![Scalar::zero(); width],
        }
    }

    fn width(&self) -> usize {
        self.columns.len() + 1
    }

    fn rhs(&self, i: usize) -> &Scalar {
        &self.rows[i][self.width() - 1]
    }

    fn set_costs(&mut self, costs: &[Scalar]) {
        let mut z: Vec<Scalar> = costs.to_vec();
        z.push(Scalar::zero());
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (zk, tk) in z.iter_mut().zip(&self.rows[i]) {
                if !tk.is_zero() {
                    *zk = &*zk - &(cb * tk);
                }
            }
        }
        self.z = z;
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let inv = self.rows[r][col].recip().expect("nonzero pivot");
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v = &*v * &inv;
            }
        }
        let pivot_row = self.rows[r].clone();
        let eliminate = |target: &mut Vec<Scalar>| {
            let factor = target[col].clone();
            if factor.is_zero() {
                return;
            }
            for (t, p) in target.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *t = &*t - &(&factor * p);
                }
            }
        };
        for i in 0..self.rows.len() {
            if i != r {
                eliminate(&mut self.rows[i]);
            }
        }
        eliminate(&mut self.z);
        self.basis[r] = col;
    }

    /// One Bland's-rule step over columns `< limit`.
    fn step(&mut self, limit: usize) -> Option<Step> {
        let entering = (0..limit).find(|&j| self.z[j].is_negative());
        let Some(col) = entering else {
            return Some(Step::Optimal);
        };
        let mut best: Option<(usize, Scalar)> = None;
        for i in 0..self.rows.len() {
            let a = &self.rows[i][col];
            if !a.is_positive() {
                continue;
            }
            let ratio = self.rhs(i) / a;
            let better = match &best {
                None => true,
                Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
            };
            if better {
                best = Some((i, ratio));
            }
        }
        match best {
            None => Some(Step::Unbounded(col)),
            Some((r, _)) => {
                self.pivot(r, col);
                None
            }
        }
    }

    fn optimize(&mut self, limit: usize) -> Step {
        loop {
            if let Some(s) = self.step(limit) {
                return s;
            }
        }
    }

    fn dump(&self, label: &str) {
        if !log::log_enabled!(log::Level::Trace) {
            return;
        }
        trace!("tableau ({label}), basis {:?}", self.basis);
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            trace!("  [{}]", cells.join(", "));
        }
        let cells: Vec<String> = self.z.iter().map(|v| v.to_string()).collect();
        trace!("  z [{}]", cells.join(", "));
    }

    fn primal(&self, n_vars: usize) -> Vec<Scalar> {
        let mut x = vec![Scalar::zero(); n_vars];
        for (i, &b) in self.basis.iter().enumerate() {
            match self.columns[b] {
                Column::Plus(j) => x[j] = &x[j] + self.rhs(i),
                Column::Minus(j) => x[j] = &x[j] - self.rhs(i),
                _ => {}
            }
        }
        x
    }

    fn run(mut self, sys: &LinearSystem) -> LpOutcome {
        let n = sys.num_variables();
        let m = sys.constraints.len();
        let ncols = self.columns.len();

        // Phase 1: minimize the sum of artificials.
        let mut costs = vec![Scalar::zero(); ncols];
        for c in costs.iter_mut().skip(self.art_start) {
            *c = Scalar::one();
        }
        self.set_costs(&costs);
        self.dump("phase 1 start");
        match self.optimize(ncols) {
            Step::Optimal => {}
            Step::Unbounded(_) => unreachable!("phase 1 objective is bounded below"),
        }
        self.dump("phase 1 end");
        let infeasibility = -&self.z[ncols];
        if infeasibility.is_positive() {
            let certificate = (0..m)
                .map(|i| {
                    let y = Scalar::one() - &self.z[self.art_start + i];
                    if self.row_sign[i] {
                        -y
                    } else {
                        y
                    }
                })
                .collect();
            return LpOutcome::Infeasible { certificate };
        }

        // Drive zero-level artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= self.art_start {
                let replacement = (0..self.art_start).find(|&j| !self.rows[i][j].is_zero());
                match replacement {
                    Some(j) => self.pivot(i, j),
                    None => {
                        self.rows.remove(i);
                        self.basis.remove(i);
                        self.row_origin.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }

        let Some(obj) = &sys.objective else {
            return LpOutcome::Feasible {
                assignment: self.primal(n),
                objective: None,
            };
        };

        // Phase 2 minimizes; a maximization minimizes the negated objective.
        let sign = |c: &Scalar| match obj.sense {
            Sense::Maximize => -c,
            Sense::Minimize => c.clone(),
        };
        let mut costs = vec![Scalar::zero(); ncols];
        for (k, col) in self.columns.iter().enumerate() {
            costs[k] = match col {
                Column::Plus(j) => sign(&obj.coeffs[*j]),
                Column::Minus(j) => -sign(&obj.coeffs[*j]),
                _ => Scalar::zero(),
            };
        }
        self.set_costs(&costs);
        let art_start = self.art_start;
        match self.optimize(art_start) {
            Step::Optimal => {
                self.dump("phase 2 end");
                let assignment = self.primal(n);
                let objective = sys.objective_value(&assignment);
                LpOutcome::Feasible {
                    assignment,
                    objective,
                }
            }
            Step::Unbounded(col) => {
                let assignment = self.primal(n);
                let mut dir = vec![Scalar::zero(); ncols];
                dir[col] = Scalar::one();
                for (i, &b) in self.basis.iter().enumerate() {
                    dir[b] = -&self.rows[i][col];
                }
                let mut ray = vec![Scalar::zero(); n];
                for (k, c) in self.columns.iter().enumerate() {
                    match c {
                        Column::Plus(j) => ray[*j] = &ray[*j] + &dir[k],
                        Column::Minus(j) => ray[*j] = &ray[*j] - &dir[k],
                        _ => {}
                    }
                }
                LpOutcome::Unbounded { assignment, ray }
            }
        }
    }
}
