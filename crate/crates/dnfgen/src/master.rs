//! The restricted master problem (RMP) for one label: clause columns over a
//! set-covering LP, dual extraction, and the final integer solve.
//!
//! The LP has one covering row per positive example (each positive must
//! satisfy a selected clause or pay its penalty variable) and one complexity
//! row capping the summed clause complexities. Clause variables are relaxed
//! to `[0, 1]`; the penalty variables are implied binary and stay
//! continuous even in the integer solve.

use std::collections::HashMap;

use crate::binarizer::BinaryExample;
use crate::bitset::Bits;
use crate::lp::{solve_lp, Constraint, LinearProgram, LpStatus, Sense};
use crate::pricing::DualSnapshot;
use crate::{Error, Result};

/// A conjunction of word features, stored as a strictly increasing list of
/// feature ids. Complexity is 1 plus the clause length.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause {
    features: Vec<u32>,
}

impl Clause {
    /// Builds a clause from feature ids, sorting and deduplicating.
    ///
    /// Panics on an empty feature list; the empty conjunction is not a
    /// valid clause.
    pub fn new(features: impl Into<Vec<u32>>) -> Clause {
        let mut features = features.into();
        features.sort_unstable();
        features.dedup();
        assert!(!features.is_empty(), "a clause needs at least one feature");
        Clause { features }
    }

    pub fn features(&self) -> &[u32] {
        &self.features
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn complexity(&self) -> u32 {
        1 + self.features.len() as u32
    }

    /// True when every feature of the clause is set in `bits`.
    pub fn satisfied_by(&self, bits: &Bits) -> bool {
        self.features.iter().all(|&j| bits.get(j as usize))
    }
}

/// One clause variable of the RMP with its coverage bitsets. The objective
/// coefficient is the number of negatives the clause satisfies.
#[derive(Clone, Debug)]
pub struct Column {
    pub clause: Clause,
    pub pos_cover: Bits,
    pub neg_cover: Bits,
    pub obj_coeff: f64,
}

fn make_column(clause: Clause, positives: &[BinaryExample], negatives: &[BinaryExample]) -> Column {
    let mut pos_cover = Bits::zeros(positives.len());
    for (i, e) in positives.iter().enumerate() {
        if clause.satisfied_by(&e.bits) {
            pos_cover.set(i);
        }
    }
    let mut neg_cover = Bits::zeros(negatives.len());
    for (i, e) in negatives.iter().enumerate() {
        if clause.satisfied_by(&e.bits) {
            neg_cover.set(i);
        }
    }
    let obj_coeff = neg_cover.count_ones() as f64;
    Column {
        clause,
        pos_cover,
        neg_cover,
        obj_coeff,
    }
}

#[derive(Clone, Debug)]
struct LastLp {
    objective: f64,
    w_values: Vec<f64>,
}

/// The restricted master problem for one label.
#[derive(Clone, Debug)]
pub struct RmpState {
    positives: Vec<BinaryExample>,
    negatives: Vec<BinaryExample>,
    fn_penalty: f64,
    complexity_budget: u32,
    columns: Vec<Column>,
    index: HashMap<Clause, usize>,
    duals: Option<DualSnapshot>,
    last_lp: Option<LastLp>,
}

/// Integer solution over the current column set.
#[derive(Clone, Debug)]
pub struct MasterSolution {
    /// Selected clauses in column order.
    pub selected: Vec<Clause>,
    /// Per positive: true when it satisfies no selected clause.
    pub xi: Vec<bool>,
    pub objective: f64,
}

/// Builds the RMP for one label. Duplicate seed clauses are stored once.
pub fn build_rmp(
    positives: &[BinaryExample],
    negatives: &[BinaryExample],
    fn_penalty: f64,
    complexity_budget: u32,
    seed_columns: &[Clause],
) -> Result<RmpState> {
    if positives.is_empty() {
        return Err(Error::NoPositives);
    }
    if !(fn_penalty > 0.0) {
        return Err(Error::InvalidHyper(format!(
            "fn_penalty must be positive, got {fn_penalty}"
        )));
    }
    if complexity_budget < 2 {
        return Err(Error::InvalidHyper(format!(
            "complexity budget {complexity_budget} cannot fit any clause (minimum complexity is 2)"
        )));
    }
    let mut state = RmpState {
        positives: positives.to_vec(),
        negatives: negatives.to_vec(),
        fn_penalty,
        complexity_budget,
        columns: Vec::new(),
        index: HashMap::new(),
        duals: None,
        last_lp: None,
    };
    state.add_columns(seed_columns);
    Ok(state)
}

impl RmpState {
    pub fn positives(&self) -> &[BinaryExample] {
        &self.positives
    }

    pub fn negatives(&self) -> &[BinaryExample] {
        &self.negatives
    }

    pub fn fn_penalty(&self) -> f64 {
        self.fn_penalty
    }

    pub fn complexity_budget(&self) -> u32 {
        self.complexity_budget
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn duals(&self) -> Option<&DualSnapshot> {
        self.duals.as_ref()
    }

    /// Last LP objective, if a solve has happened since the last column add.
    pub fn lp_value(&self) -> Option<f64> {
        self.last_lp.as_ref().map(|l| l.objective)
    }

    /// True when columns were added after the most recent LP solve.
    pub fn lp_stale(&self) -> bool {
        self.last_lp.is_none()
    }

    /// Appends clauses not already present, with computed coverage. Returns
    /// the number actually added.
    pub fn add_columns(&mut self, clauses: &[Clause]) -> usize {
        let mut added = 0;
        for clause in clauses {
            if self.index.contains_key(clause) {
                continue;
            }
            let column = make_column(clause.clone(), &self.positives, &self.negatives);
            self.index.insert(clause.clone(), self.columns.len());
            self.columns.push(column);
            added += 1;
        }
        if added > 0 {
            self.last_lp = None;
        }
        added
    }

    fn build_lp(&self) -> LinearProgram {
        let p = self.positives.len();
        let k = self.columns.len();
        let n = p + k;
        let mut objective = vec![self.fn_penalty; p];
        objective.extend(self.columns.iter().map(|c| c.obj_coeff));

        let mut constraints = Vec::with_capacity(p + 1);
        for i in 0..p {
            let mut coeffs = vec![0.0; n];
            coeffs[i] = 1.0;
            for (ki, col) in self.columns.iter().enumerate() {
                if col.pos_cover.get(i) {
                    coeffs[p + ki] = 1.0;
                }
            }
            constraints.push(Constraint {
                coeffs,
                sense: Sense::Ge,
                rhs: 1.0,
            });
        }
        let mut budget = vec![0.0; n];
        for (ki, col) in self.columns.iter().enumerate() {
            budget[p + ki] = col.clause.complexity() as f64;
        }
        constraints.push(Constraint {
            coeffs: budget,
            sense: Sense::Le,
            rhs: self.complexity_budget as f64,
        });

        let mut bounds = vec![(0.0, None); p];
        bounds.extend(std::iter::repeat((0.0, Some(1.0))).take(k));
        LinearProgram {
            objective,
            constraints,
            bounds,
        }
    }

    /// Solves the LP relaxation, caching duals and fractional clause values.
    /// Returns the dual snapshot and LP objective.
    pub fn solve_rmp(&mut self) -> Result<(DualSnapshot, f64)> {
        let lp = self.build_lp();
        let sol = solve_lp(&lp)?;
        if sol.status != LpStatus::Optimal {
            // xi = 1 everywhere is always feasible, so this is a bug.
            return Err(Error::Lp(format!(
                "RMP reported {:?}; the master construction is broken",
                sol.status
            )));
        }
        let p = self.positives.len();
        let mu: Vec<f64> = sol.duals[..p].iter().map(|&y| y.max(0.0)).collect();
        let lambda = sol.duals[p].min(0.0);
        let duals = DualSnapshot { lambda, mu };
        self.duals = Some(duals.clone());
        self.last_lp = Some(LastLp {
            objective: sol.objective,
            w_values: sol.primal[p..].to_vec(),
        });
        Ok((duals, sol.objective))
    }

    /// Optimal 0/1 clause selection over the current columns only, within
    /// the complexity budget, minimizing the master objective. Ties resolve
    /// to the lexicographically smallest selection (by sorted column index
    /// list, shorter prefixes first).
    ///
    /// Requires a prior [`solve_rmp`](Self::solve_rmp): the LP fractional
    /// values order the branch-and-bound dive.
    ///
    /// Two passes: a depth-first branch and bound (include branch first,
    /// columns by LP value descending) proves the optimal value, then the
    /// lexicographically smallest selection attaining it is rebuilt
    /// greedily with early-exit completion queries. Splitting value search
    /// from tie-breaking keeps the first pass free to prune equal-bound
    /// subtrees, which otherwise blow up when many columns are
    /// interchangeable.
    pub fn solve_integer_rmp(&self) -> Result<MasterSolution> {
        let last = self
            .last_lp
            .as_ref()
            .ok_or(Error::MasterState("solve_rmp must run before solve_integer_rmp"))?;

        let search = IntSearch::new(self, &last.w_values);
        let selection = search.solve()?;
        let objective = self.objective_of(&selection);

        let mut covered = Bits::zeros(self.positives.len());
        for &ki in &selection {
            covered.or_assign(&self.columns[ki].pos_cover);
        }
        let xi: Vec<bool> = (0..self.positives.len()).map(|i| !covered.get(i)).collect();
        let selected = selection
            .iter()
            .map(|&ki| self.columns[ki].clause.clone())
            .collect();
        Ok(MasterSolution {
            selected,
            xi,
            objective,
        })
    }

    fn leaf_objective(&self, covered: &Bits, negcost: f64) -> f64 {
        let uncovered = self.positives.len() - covered.count_ones();
        self.fn_penalty * uncovered as f64 + negcost
    }

    fn objective_of(&self, selection: &[usize]) -> f64 {
        let mut covered = Bits::zeros(self.positives.len());
        let mut negcost = 0.0;
        for &ki in selection {
            covered.or_assign(&self.columns[ki].pos_cover);
            negcost += self.columns[ki].obj_coeff;
        }
        self.leaf_objective(&covered, negcost)
    }
}

const INT_EPS: f64 = 1e-9;

/// What a node relaxation tells the search.
enum NodeInfo {
    /// LP value plus fixed cost; no integral completion available.
    Bound(f64),
    /// The LP optimum was integral: the best completion of this node, as
    /// (objective, free columns selected).
    Solved(f64, Vec<usize>),
}

/// Branch-and-bound state for the integer restricted master.
///
/// Per node, a free coverage bound (pretend every remaining column is
/// selectable at no cost) is tried first; when it fails to prune, the node
/// LP relaxation decides. Covering LPs are integral often enough that most
/// surviving nodes terminate on the spot.
struct IntSearch<'a> {
    state: &'a RmpState,
    /// Column ids by LP fractional value descending (value pass order).
    lp_order: Vec<usize>,
    /// Union of `pos_cover` over `lp_order[d..]`.
    lp_suffix_cover: Vec<Bits>,
    /// Union of `pos_cover` over columns `d..` in index order.
    idx_suffix_cover: Vec<Bits>,
}

impl<'a> IntSearch<'a> {
    fn new(state: &'a RmpState, w_values: &[f64]) -> IntSearch<'a> {
        let n = state.columns.len();
        let mut lp_order: Vec<usize> = (0..n).collect();
        lp_order.sort_by(|&a, &b| w_values[b].total_cmp(&w_values[a]).then(a.cmp(&b)));

        let suffix = |ids: &dyn Fn(usize) -> usize| {
            let mut out = vec![Bits::zeros(state.positives.len()); n + 1];
            for d in (0..n).rev() {
                let mut cover = out[d + 1].clone();
                cover.or_assign(&state.columns[ids(d)].pos_cover);
                out[d] = cover;
            }
            out
        };
        let lp_suffix_cover = suffix(&|d| lp_order[d]);
        let idx_suffix_cover = suffix(&|d| d);
        IntSearch {
            state,
            lp_order,
            lp_suffix_cover,
            idx_suffix_cover,
        }
    }

    /// Penalty cost assuming every still-free column were selectable for
    /// free: a valid lower bound on any completion.
    fn reachable_bound(&self, covered: &Bits, suffix: &Bits, negcost: f64) -> f64 {
        let mut reachable = covered.clone();
        reachable.or_assign(suffix);
        negcost
            + self.state.fn_penalty * (self.state.positives.len() - reachable.count_ones()) as f64
    }

    /// LP relaxation over the free columns with the remaining budget.
    fn node_lp(&self, free: &[usize], covered: &Bits, used: u32, negcost: f64) -> Result<NodeInfo> {
        let uncovered: Vec<usize> = (0..self.state.positives.len())
            .filter(|&i| !covered.get(i))
            .collect();
        let nu = uncovered.len();
        let nf = free.len();
        let n = nu + nf;

        let mut objective = vec![self.state.fn_penalty; nu];
        objective.extend(free.iter().map(|&ki| self.state.columns[ki].obj_coeff));

        let mut constraints = Vec::with_capacity(nu + 1);
        for (row, &i) in uncovered.iter().enumerate() {
            let mut coeffs = vec![0.0; n];
            coeffs[row] = 1.0;
            for (fi, &ki) in free.iter().enumerate() {
                if self.state.columns[ki].pos_cover.get(i) {
                    coeffs[nu + fi] = 1.0;
                }
            }
            constraints.push(Constraint {
                coeffs,
                sense: Sense::Ge,
                rhs: 1.0,
            });
        }
        let mut budget = vec![0.0; n];
        for (fi, &ki) in free.iter().enumerate() {
            budget[nu + fi] = self.state.columns[ki].clause.complexity() as f64;
        }
        constraints.push(Constraint {
            coeffs: budget,
            sense: Sense::Le,
            rhs: (self.state.complexity_budget - used) as f64,
        });

        let mut bounds = vec![(0.0, None); nu];
        bounds.extend(std::iter::repeat((0.0, Some(1.0))).take(nf));

        let sol = solve_lp(&LinearProgram {
            objective,
            constraints,
            bounds,
        })?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::Lp(format!(
                "integer-search node relaxation reported {:?}",
                sol.status
            )));
        }
        let w = &sol.primal[nu..];
        let integral = w.iter().all(|&v| v < 1e-6 || v > 1.0 - 1e-6);
        if integral {
            let picked: Vec<usize> = free
                .iter()
                .zip(w)
                .filter(|(_, &v)| v > 0.5)
                .map(|(&ki, _)| ki)
                .collect();
            Ok(NodeInfo::Solved(sol.objective + negcost, picked))
        } else {
            Ok(NodeInfo::Bound(sol.objective + negcost))
        }
    }

    fn solve(&self) -> Result<Vec<usize>> {
        let p = self.state.positives.len();
        let mut best_obj = self.state.fn_penalty * p as f64;
        let mut best_sel: Vec<usize> = Vec::new();
        let mut stack: Vec<usize> = Vec::new();
        self.value_pass(
            0,
            0,
            0.0,
            Bits::zeros(p),
            &mut stack,
            &mut best_obj,
            &mut best_sel,
        )?;
        Ok(self.lex_reconstruct(best_obj)?.unwrap_or(best_sel))
    }

    /// Pass 1: prove the optimal value. Prunes equal-bound subtrees, so the
    /// returned selection is optimal but not necessarily the tie-break
    /// winner.
    #[allow(clippy::too_many_arguments)]
    fn value_pass(
        &self,
        depth: usize,
        used: u32,
        negcost: f64,
        covered: Bits,
        stack: &mut Vec<usize>,
        best_obj: &mut f64,
        best_sel: &mut Vec<usize>,
    ) -> Result<()> {
        let stop_obj = self.state.leaf_objective(&covered, negcost);
        if stop_obj < *best_obj - INT_EPS {
            *best_obj = stop_obj;
            *best_sel = stack.clone();
        }
        if depth == self.lp_order.len() {
            return Ok(());
        }
        if self.reachable_bound(&covered, &self.lp_suffix_cover[depth], negcost)
            >= *best_obj - INT_EPS
        {
            return Ok(());
        }
        match self.node_lp(&self.lp_order[depth..], &covered, used, negcost)? {
            NodeInfo::Solved(obj, picked) => {
                if obj < *best_obj - INT_EPS {
                    *best_obj = obj;
                    let mut sel = stack.clone();
                    sel.extend(picked);
                    *best_sel = sel;
                }
                return Ok(());
            }
            NodeInfo::Bound(bound) => {
                if bound >= *best_obj - INT_EPS {
                    return Ok(());
                }
            }
        }
        let ki = self.lp_order[depth];
        let col = &self.state.columns[ki];
        if used + col.clause.complexity() <= self.state.complexity_budget {
            let mut with = covered.clone();
            with.or_assign(&col.pos_cover);
            stack.push(ki);
            self.value_pass(
                depth + 1,
                used + col.clause.complexity(),
                negcost + col.obj_coeff,
                with,
                stack,
                best_obj,
                best_sel,
            )?;
            stack.pop();
        }
        self.value_pass(depth + 1, used, negcost, covered, stack, best_obj, best_sel)
    }

    /// Pass 2: the lexicographically smallest selection with objective
    /// `z_star`, built by repeatedly taking the smallest column index that
    /// still admits an optimal completion among strictly larger indices.
    fn lex_reconstruct(&self, z_star: f64) -> Result<Option<Vec<usize>>> {
        let n = self.state.columns.len();
        let mut chosen: Vec<usize> = Vec::new();
        let mut covered = Bits::zeros(self.state.positives.len());
        let mut used = 0u32;
        let mut negcost = 0.0;
        let mut next = 0usize;
        loop {
            if self.state.leaf_objective(&covered, negcost) <= z_star + INT_EPS {
                return Ok(Some(chosen));
            }
            let mut advanced = false;
            for j in next..n {
                let col = &self.state.columns[j];
                if used + col.clause.complexity() > self.state.complexity_budget {
                    continue;
                }
                let mut with = covered.clone();
                with.or_assign(&col.pos_cover);
                if self.completion_exists(
                    j + 1,
                    used + col.clause.complexity(),
                    negcost + col.obj_coeff,
                    &with,
                    z_star,
                )? {
                    chosen.push(j);
                    covered = with;
                    used += col.clause.complexity();
                    negcost += col.obj_coeff;
                    next = j + 1;
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                // z_star was proven attainable, so this is unreachable;
                // the caller falls back to the value-pass selection.
                return Ok(None);
            }
        }
    }

    /// Whether some selection over columns `from..` (in index order) brings
    /// the objective down to `z_star`.
    fn completion_exists(
        &self,
        from: usize,
        used: u32,
        negcost: f64,
        covered: &Bits,
        z_star: f64,
    ) -> Result<bool> {
        if self.state.leaf_objective(covered, negcost) <= z_star + INT_EPS {
            return Ok(true);
        }
        if from == self.state.columns.len() {
            return Ok(false);
        }
        if self.reachable_bound(covered, &self.idx_suffix_cover[from], negcost) > z_star + INT_EPS
        {
            return Ok(false);
        }
        let free: Vec<usize> = (from..self.state.columns.len()).collect();
        match self.node_lp(&free, covered, used, negcost)? {
            NodeInfo::Solved(obj, _) => return Ok(obj <= z_star + INT_EPS),
            NodeInfo::Bound(bound) => {
                if bound > z_star + INT_EPS {
                    return Ok(false);
                }
            }
        }
        let col = &self.state.columns[from];
        if used + col.clause.complexity() <= self.state.complexity_budget {
            let mut with = covered.clone();
            with.or_assign(&col.pos_cover);
            if self.completion_exists(
                from + 1,
                used + col.clause.complexity(),
                negcost + col.obj_coeff,
                &with,
                z_star,
            )? {
                return Ok(true);
            }
        }
        self.completion_exists(from + 1, used, negcost, covered, z_star)
    }
}

/// The master objective of an explicit selection: the false-negative penalty
/// times the uncovered positives, plus one unit per (selected clause,
/// satisfied negative) pair.
pub fn master_objective(
    selected: &[Clause],
    positives: &[BinaryExample],
    negatives: &[BinaryExample],
    fn_penalty: f64,
) -> f64 {
    let uncovered = positives
        .iter()
        .filter(|e| !selected.iter().any(|c| c.satisfied_by(&e.bits)))
        .count();
    let neg_hits: usize = selected
        .iter()
        .map(|c| negatives.iter().filter(|e| c.satisfied_by(&e.bits)).count())
        .sum();
    fn_penalty * uncovered as f64 + neg_hits as f64
}
