//! Closed loops, stabilization with probability one, finite-horizon optimal
//! control, and both problems solved through a quotient.

use std::collections::BTreeSet;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::algebra::{input_blocks, SparseMatrix, StochasticMatrix};
use crate::error::{Error, Result};
use crate::quotient::{build_quotient, quotient_costs, QuotientSystem};
use crate::relations::{
    max_lumpable_refinement, partition_from_target, projection_pair, relation_from_costs, Partition,
    ProjectionPair,
};

/// A time-invariant state feedback: state `x` receives input `input(x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateFeedback {
    n_inputs: usize,
    inputs: Vec<usize>,
}

impl StateFeedback {
    /// `inputs[x-1]` is the 1-based input applied at state `x`.
    pub fn new(inputs: Vec<usize>, n_inputs: usize) -> Result<Self> {
        if let Some(&u) = inputs.iter().find(|&&u| u == 0 || u > n_inputs) {
            return Err(Error::ControllerMismatch(format!(
                "input {u} outside 1..={n_inputs}"
            )));
        }
        Ok(Self { n_inputs, inputs })
    }

    pub fn constant(n_states: usize, u: usize, n_inputs: usize) -> Result<Self> {
        Self::new(vec![u; n_states], n_inputs)
    }

    pub fn n_states(&self) -> usize {
        self.inputs.len()
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn input(&self, x: usize) -> usize {
        self.inputs[x - 1]
    }

    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    /// States whose input is `u`.
    pub fn states_with_input(&self, u: usize) -> Vec<usize> {
        (1..=self.inputs.len()).filter(|&x| self.inputs[x - 1] == u).collect()
    }
}

/// A time-varying feedback over a finite horizon; row `t` is applied at time `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Policy {
    rows: Vec<StateFeedback>,
}

impl Policy {
    pub fn new(rows: Vec<StateFeedback>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::ControllerMismatch("a policy needs at least one row".into()));
        }
        let (n, m) = (rows[0].n_states(), rows[0].n_inputs());
        if rows.iter().any(|r| r.n_states() != n || r.n_inputs() != m) {
            return Err(Error::ControllerMismatch("policy rows differ in size".into()));
        }
        Ok(Self { rows })
    }

    pub fn from_table(table: Vec<Vec<usize>>, n_inputs: usize) -> Result<Self> {
        Self::new(
            table
                .into_iter()
                .map(|r| StateFeedback::new(r, n_inputs))
                .collect::<Result<_>>()?,
        )
    }

    pub fn horizon(&self) -> usize {
        self.rows.len()
    }

    pub fn n_states(&self) -> usize {
        self.rows[0].n_states()
    }

    pub fn n_inputs(&self) -> usize {
        self.rows[0].n_inputs()
    }

    pub fn row(&self, t: usize) -> &StateFeedback {
        &self.rows[t]
    }

    pub fn rows(&self) -> &[StateFeedback] {
        &self.rows
    }

    pub fn input(&self, t: usize, x: usize) -> usize {
        self.rows[t].input(x)
    }

    /// The input if every row applies the same one at every state.
    pub fn constant_input(&self) -> Option<usize> {
        let u = self.rows[0].inputs().first().copied()?;
        self.rows
            .iter()
            .all(|r| r.inputs().iter().all(|&v| v == u))
            .then_some(u)
    }
}

/// Stage costs `l(u, x)`, terminal costs `g(x)`, a horizon and an initial
/// state.
#[derive(Debug, Clone, PartialEq)]
pub struct CostSpec {
    stage: Vec<Vec<f64>>,
    terminal: Vec<f64>,
    horizon: usize,
    x0: usize,
}

impl CostSpec {
    /// `stage[u-1][x-1]` is `l(δ_M^u, δ_N^x)`; `x0` is 1-based.
    pub fn new(stage: Vec<Vec<f64>>, terminal: Vec<f64>, horizon: usize, x0: usize) -> Result<Self> {
        let n = terminal.len();
        if n == 0 || stage.is_empty() {
            return Err(Error::InvalidCosts("cost tables are empty".into()));
        }
        if let Some(u) = stage.iter().position(|r| r.len() != n) {
            return Err(Error::InvalidCosts(format!(
                "stage cost row {} has {} entries, expected {n}",
                u + 1,
                stage[u].len()
            )));
        }
        if stage.iter().flatten().chain(&terminal).any(|v| !v.is_finite()) {
            return Err(Error::InvalidCosts("costs must be finite".into()));
        }
        if horizon == 0 {
            return Err(Error::InvalidCosts("horizon must be at least 1".into()));
        }
        if x0 == 0 || x0 > n {
            return Err(Error::InvalidCosts(format!("initial state {x0} outside 1..={n}")));
        }
        Ok(Self {
            stage,
            terminal,
            horizon,
            x0,
        })
    }

    pub fn stage(&self) -> &[Vec<f64>] {
        &self.stage
    }

    pub fn terminal(&self) -> &[f64] {
        &self.terminal
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn x0(&self) -> usize {
        self.x0
    }

    pub fn n_states(&self) -> usize {
        self.terminal.len()
    }

    pub fn n_inputs(&self) -> usize {
        self.stage.len()
    }

    pub fn with_x0(&self, x0: usize) -> Result<Self> {
        Self::new(self.stage.clone(), self.terminal.clone(), self.horizon, x0)
    }
}

/// Outcome of the stabilizing-set iterations. State sets are 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilizationCertificate {
    /// `M_0 ⊇ M_1 ⊇ … ⊇ M*`.
    pub m_sets: Vec<BTreeSet<usize>>,
    /// `Z_0 = M* ⊆ Z_1 ⊆ … ⊆ Z_λ`.
    pub z_sets: Vec<BTreeSet<usize>>,
    pub stabilizable: bool,
    pub feedback: Option<StateFeedback>,
}

impl StabilizationCertificate {
    pub fn m_star(&self) -> &BTreeSet<usize> {
        self.m_sets.last().expect("at least the target")
    }
}

fn check_feedback(p: &StochasticMatrix, n_states: usize, n_inputs: usize) -> Result<()> {
    if p.rows() != n_states || p.input_count()? != n_inputs {
        return Err(Error::ControllerMismatch(format!(
            "controller for {n_states} states and {n_inputs} inputs, model has {} states and {} inputs",
            p.rows(),
            p.input_count()?
        )));
    }
    Ok(())
}

/// `P_U`: column `x` is column `x` of `P(δ_M^{U(x)})`.
pub fn closed_loop_matrix(p: &StochasticMatrix, fb: &StateFeedback) -> Result<StochasticMatrix> {
    check_feedback(p, fb.n_states(), fb.n_inputs())?;
    let n = p.rows();
    let columns = (0..n)
        .map(|x| p.raw_column((fb.inputs[x] - 1) * n + x).to_vec())
        .collect();
    Ok(StochasticMatrix::from_sparse_unchecked(SparseMatrix::from_raw_columns(n, columns)?))
}

fn mass_into(pu: &StochasticMatrix, set: &[bool], a: usize) -> f64 {
    pu.raw_column(a).iter().filter(|(r, _)| set[*r]).map(|(_, v)| v).sum()
}

fn target_mask(target: &[usize], n: usize) -> Result<Vec<bool>> {
    if target.is_empty() {
        return Err(Error::EmptyTarget);
    }
    let mut mask = vec![false; n];
    for &x in target {
        if x == 0 || x > n {
            return Err(Error::IndexOutOfRange { index: x, dim: n });
        }
        mask[x - 1] = true;
    }
    Ok(mask)
}

fn to_set(mask: &[bool]) -> BTreeSet<usize> {
    (0..mask.len()).filter(|&x| mask[x]).map(|x| x + 1).collect()
}

/// States that some input sends into `set` with probability at least `1−eps`.
fn one_step_controllable(blocks: &[StochasticMatrix], set: &[bool], eps: f64) -> Vec<bool> {
    (0..set.len())
        .map(|a| blocks.iter().any(|pu| mass_into(pu, set, a) >= 1.0 - eps))
        .collect()
}

/// Computes `M*` and the increasing sets `Z_j`; the system is stabilizable to
/// the target iff the last `Z_j` is every state.
pub fn stabilizing_sets(p: &StochasticMatrix, target: &[usize], eps: f64) -> Result<StabilizationCertificate> {
    let n = p.rows();
    let blocks = input_blocks(p)?;
    let mut m = target_mask(target, n)?;
    let mut m_sets = vec![to_set(&m)];
    loop {
        let reach = one_step_controllable(&blocks, &m, eps);
        let next: Vec<bool> = m.iter().zip(&reach).map(|(a, b)| *a && *b).collect();
        if next == m {
            break;
        }
        m = next;
        m_sets.push(to_set(&m));
    }
    let mut z = m;
    let mut z_sets = vec![to_set(&z)];
    loop {
        let next = one_step_controllable(&blocks, &z, eps);
        // Z_j contains Z_{j-1}; the union guards against rounding at the 1-eps threshold.
        let next: Vec<bool> = next.iter().zip(&z).map(|(a, b)| *a || *b).collect();
        if next == z {
            break;
        }
        z = next;
        z_sets.push(to_set(&z));
    }
    let stabilizable = z.iter().all(|&b| b);
    Ok(StabilizationCertificate {
        m_sets,
        z_sets,
        stabilizable,
        feedback: None,
    })
}

/// [`stabilizing_sets`] plus a feedback when stabilizable: a state first
/// entering at level `j ≥ 1` gets the smallest input moving it into `Z_{j-1}`
/// with probability at least `1−eps`. `M*` itself counts as entering at level 1.
pub fn synthesize_stabilizer(p: &StochasticMatrix, target: &[usize], eps: f64) -> Result<StabilizationCertificate> {
    let mut cert = stabilizing_sets(p, target, eps)?;
    if !cert.stabilizable {
        return Ok(cert);
    }
    let n = p.rows();
    let blocks = input_blocks(p)?;
    let mut inputs = vec![0usize; n];
    let levels = cert.z_sets.len();
    for j in 1..levels.max(2) {
        let prev_set = &cert.z_sets[j - 1];
        let mut prev = vec![false; n];
        for &x in prev_set {
            prev[x - 1] = true;
        }
        let fresh: Vec<usize> = match cert.z_sets.get(j) {
            Some(zj) if j == 1 => zj.iter().copied().collect(),
            Some(zj) => zj.difference(prev_set).copied().collect(),
            // Z_1 = Z_0 = every state: M* is the whole space.
            None => prev_set.iter().copied().collect(),
        };
        for x in fresh {
            let u = blocks
                .iter()
                .position(|pu| mass_into(pu, &prev, x - 1) >= 1.0 - eps)
                .expect("a state of Z_j reaches Z_{j-1} under some input");
            inputs[x - 1] = u + 1;
        }
    }
    cert.feedback = Some(StateFeedback::new(inputs, blocks.len())?);
    Ok(cert)
}

/// Decides whether a closed loop drives all probability mass into the target
/// in finitely many steps from every initial state. On the support digraph
/// (entries above `eps`), every state lying on a cycle and everything
/// reachable from such states must be in the target.
pub fn verify_stabilization(p_u: &StochasticMatrix, target: &[usize], eps: f64) -> Result<bool> {
    let n = p_u.rows();
    if p_u.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "closed loop must be square, got {}x{}",
            n,
            p_u.cols()
        )));
    }
    let defect = p_u.stochasticity_defect();
    if defect > eps.max(1e-12) {
        return Err(Error::NotStochastic(format!("column sums deviate by {defect}")));
    }
    let mask = target_mask(target, n)?;
    let mut graph = DiGraph::<(), ()>::with_capacity(n, p_u.as_sparse().nnz());
    let nodes: Vec<_> = (0..n).map(|_| graph.add_node(())).collect();
    let mut on_cycle = vec![false; n];
    for a in 0..n {
        for &(b, v) in p_u.raw_column(a) {
            if v > eps {
                graph.add_edge(nodes[a], nodes[b], ());
                if a == b {
                    on_cycle[a] = true;
                }
            }
        }
    }
    for scc in tarjan_scc(&graph) {
        if scc.len() > 1 {
            for v in scc {
                on_cycle[v.index()] = true;
            }
        }
    }
    let mut seen = on_cycle.clone();
    let mut stack: Vec<usize> = (0..n).filter(|&x| on_cycle[x]).collect();
    while let Some(a) = stack.pop() {
        if !mask[a] {
            return Ok(false);
        }
        for b in graph.neighbors(nodes[a]) {
            if !seen[b.index()] {
                seen[b.index()] = true;
                stack.push(b.index());
            }
        }
    }
    Ok(true)
}

/// `U(x) = U_R(Cx)`.
pub fn lift_feedback(pair: &ProjectionPair, fb: &StateFeedback) -> Result<StateFeedback> {
    if fb.n_states() != pair.quotient_size() {
        return Err(Error::ControllerMismatch(format!(
            "feedback over {} states for a quotient of {}",
            fb.n_states(),
            pair.quotient_size()
        )));
    }
    let inputs = pair
        .projection()
        .raw_targets()
        .iter()
        .map(|&b| fb.inputs[b])
        .collect();
    StateFeedback::new(inputs, fb.n_inputs())
}

/// `U(t, x) = U_R(t, Cx)`.
pub fn lift_policy(pair: &ProjectionPair, policy: &Policy) -> Result<Policy> {
    Policy::new(
        policy
            .rows()
            .iter()
            .map(|r| lift_feedback(pair, r))
            .collect::<Result<_>>()?,
    )
}

/// Value table and minimizing policy of the backward recursion.
#[derive(Debug, Clone, PartialEq)]
pub struct DpSolution {
    pub policy: Policy,
    /// `values[t][x-1] = H(t, x)` for `t = 0..=T`.
    pub values: Vec<Vec<f64>>,
}

impl DpSolution {
    pub fn value(&self, t: usize, x: usize) -> f64 {
        self.values[t][x - 1]
    }
}

fn check_costs(p: &StochasticMatrix, costs: &CostSpec) -> Result<()> {
    if costs.n_states() != p.rows() || costs.n_inputs() != p.input_count()? {
        return Err(Error::InvalidCosts(format!(
            "costs over {} states and {} inputs, model has {} states and {} inputs",
            costs.n_states(),
            costs.n_inputs(),
            p.rows(),
            p.input_count()?
        )));
    }
    Ok(())
}

/// `H(T, x) = g(x)` and `H(t, x) = min_u { l(u, x) + Σ_ξ H(t+1, ξ)·P(u)[ξ, x] }`.
/// The recorded minimizer is the smallest input whose value is within `eps`
/// of the minimum.
pub fn dp_finite_horizon(p: &StochasticMatrix, costs: &CostSpec, eps: f64) -> Result<DpSolution> {
    check_costs(p, costs)?;
    let blocks = input_blocks(p)?;
    let n = p.rows();
    let t_max = costs.horizon();
    let mut values = vec![Vec::new(); t_max + 1];
    values[t_max] = costs.terminal().to_vec();
    let mut rows = vec![Vec::new(); t_max];
    for t in (0..t_max).rev() {
        let next = &values[t + 1];
        let mut h = Vec::with_capacity(n);
        let mut row = Vec::with_capacity(n);
        for x in 0..n {
            let g: Vec<f64> = blocks
                .iter()
                .zip(costs.stage())
                .map(|(pu, l)| {
                    l[x] + pu
                        .raw_column(x)
                        .iter()
                        .map(|&(xi, v)| next[xi] * v)
                        .sum::<f64>()
                })
                .collect();
            let min = g.iter().copied().fold(f64::INFINITY, f64::min);
            let u = g.iter().position(|&v| v <= min + eps).expect("nonempty");
            h.push(min);
            row.push(u + 1);
        }
        values[t] = h;
        rows[t] = row;
    }
    Ok(DpSolution {
        policy: Policy::from_table(rows, blocks.len())?,
        values,
    })
}

/// Expected cost of `policy` from `x0`, by propagating the state distribution.
pub fn policy_cost(p: &StochasticMatrix, policy: &Policy, costs: &CostSpec, x0: usize) -> Result<f64> {
    check_costs(p, costs)?;
    check_feedback(p, policy.n_states(), policy.n_inputs())?;
    if policy.horizon() != costs.horizon() {
        return Err(Error::ControllerMismatch(format!(
            "policy horizon {} differs from cost horizon {}",
            policy.horizon(),
            costs.horizon()
        )));
    }
    let n = p.rows();
    if x0 == 0 || x0 > n {
        return Err(Error::IndexOutOfRange { index: x0, dim: n });
    }
    let mut mu = vec![0.0; n];
    mu[x0 - 1] = 1.0;
    let mut total = 0.0;
    for row in policy.rows() {
        let mut next = vec![0.0; n];
        for (x, &m) in mu.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            let u = row.inputs[x];
            total += costs.stage()[u - 1][x] * m;
            for &(xi, v) in p.raw_column((u - 1) * n + x) {
                next[xi] += v * m;
            }
        }
        mu = next;
    }
    total += mu.iter().zip(costs.terminal()).map(|(m, g)| m * g).sum::<f64>();
    Ok(total)
}

/// Stabilization solved on the quotient by the coarsest lumpable refinement
/// of `{target, rest}`, with the feedback lifted back.
#[derive(Debug, Clone)]
pub struct StabilizationOutcome {
    pub partition: Partition,
    pub refinement_steps: usize,
    pub quotient: QuotientSystem,
    /// Certificate on the quotient.
    pub certificate: StabilizationCertificate,
    /// Lifted feedback, present iff stabilizable.
    pub feedback: Option<StateFeedback>,
}

pub fn stabilize_via_quotient(p: &StochasticMatrix, target: &[usize], eps: f64) -> Result<StabilizationOutcome> {
    let seed = partition_from_target(target, p.rows())?;
    let refinement = max_lumpable_refinement(p, &seed, eps)?;
    let pair = projection_pair(&refinement.partition);
    let quotient = build_quotient(p, &pair, eps)?;
    let mut q_target: Vec<usize> = target
        .iter()
        .map(|&x| pair.project_state(x))
        .collect::<Result<_>>()?;
    q_target.sort_unstable();
    q_target.dedup();
    let certificate = synthesize_stabilizer(quotient.transition(), &q_target, eps)?;
    let feedback = match &certificate.feedback {
        Some(fb) => {
            let lifted = lift_feedback(&pair, fb)?;
            let closed = closed_loop_matrix(p, &lifted)?;
            assert!(
                verify_stabilization(&closed, target, eps)?,
                "lifted feedback does not stabilize the full system"
            );
            Some(lifted)
        }
        None => None,
    };
    Ok(StabilizationOutcome {
        partition: refinement.partition.clone(),
        refinement_steps: refinement.fixpoint_index(),
        quotient,
        certificate,
        feedback,
    })
}

/// Optimal control solved on the quotient by the coarsest lumpable refinement
/// of the cost-equality relation, with the policy lifted back.
#[derive(Debug, Clone)]
pub struct OptimalControlOutcome {
    pub partition: Partition,
    pub refinement_steps: usize,
    pub quotient: QuotientSystem,
    pub quotient_costs: CostSpec,
    pub quotient_solution: DpSolution,
    pub policy: Policy,
    /// `H_R(0, C x0)`.
    pub cost: f64,
}

pub fn optctl_via_quotient(p: &StochasticMatrix, costs: &CostSpec, eps: f64) -> Result<OptimalControlOutcome> {
    check_costs(p, costs)?;
    let seed = relation_from_costs(costs.stage(), costs.terminal(), eps)?;
    let refinement = max_lumpable_refinement(p, &seed, eps)?;
    let pair = projection_pair(&refinement.partition);
    let quotient = build_quotient(p, &pair, eps)?;
    let q_costs = quotient_costs(costs, &pair, eps)?;
    let solution = dp_finite_horizon(quotient.transition(), &q_costs, eps)?;
    let policy = lift_policy(&pair, &solution.policy)?;
    let cost = solution.value(0, q_costs.x0());
    Ok(OptimalControlOutcome {
        partition: refinement.partition.clone(),
        refinement_steps: refinement.fixpoint_index(),
        quotient,
        quotient_costs: q_costs,
        quotient_solution: solution,
        policy,
        cost,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::LogicalMatrix;

    /// Input 1 sends both states to state 1; input 2 swaps them.
    fn two_state() -> StochasticMatrix {
        StochasticMatrix::from_logical(&LogicalMatrix::new(2, vec![1, 1, 2, 1]).unwrap())
    }

    #[test]
    fn two_state_stabilization() {
        let cert = synthesize_stabilizer(&two_state(), &[1], 1e-9).unwrap();
        assert!(cert.stabilizable);
        assert_eq!(cert.m_star(), &BTreeSet::from([1]));
        assert_eq!(cert.z_sets[1], BTreeSet::from([1, 2]));
        assert_eq!(cert.feedback.unwrap().inputs(), &[1, 1]);
    }

    #[test]
    fn single_input_closed_loop_ignores_feedback() {
        let p = StochasticMatrix::from_logical(&LogicalMatrix::new(3, vec![2, 3, 1]).unwrap());
        let fb = StateFeedback::constant(3, 1, 1).unwrap();
        assert_eq!(closed_loop_matrix(&p, &fb).unwrap(), p);
        assert!(closed_loop_matrix(&p, &StateFeedback::constant(3, 1, 2).unwrap()).is_err());
    }

    #[test]
    fn verify_self_loop_attractor() {
        let p = StochasticMatrix::from_logical(&LogicalMatrix::new(3, vec![1, 1, 2]).unwrap());
        assert!(verify_stabilization(&p, &[1], 1e-9).unwrap());
        assert!(!verify_stabilization(&p, &[2], 1e-9).unwrap());
        let cyc = StochasticMatrix::from_logical(&LogicalMatrix::new(3, vec![2, 1, 1]).unwrap());
        assert!(!verify_stabilization(&cyc, &[1], 1e-9).unwrap());
        assert!(verify_stabilization(&cyc, &[1, 2], 1e-9).unwrap());
    }

    #[test]
    fn whole_space_target() {
        let cert = synthesize_stabilizer(&two_state(), &[1, 2], 1e-9).unwrap();
        assert!(cert.stabilizable);
        assert_eq!(cert.feedback.unwrap().inputs(), &[1, 1]);
    }

    #[test]
    fn empty_target_is_rejected() {
        assert_eq!(stabilizing_sets(&two_state(), &[], 1e-9), Err(Error::EmptyTarget));
    }

    #[test]
    fn lift_identity_and_mismatch() {
        let pair = projection_pair(&Partition::identity(3));
        let fb = StateFeedback::new(vec![2, 1, 2], 2).unwrap();
        assert_eq!(lift_feedback(&pair, &fb).unwrap(), fb);
        let small = StateFeedback::new(vec![1, 1], 2).unwrap();
        assert!(lift_feedback(&pair, &small).is_err());
    }

    #[test]
    fn dp_terminal_row_and_one_step_cost() {
        let p = two_state();
        let costs = CostSpec::new(vec![vec![1.0, 1.0], vec![0.0, 0.0]], vec![5.0, 2.0], 1, 1).unwrap();
        let sol = dp_finite_horizon(&p, &costs, 1e-9).unwrap();
        assert_eq!(sol.values[1], vec![5.0, 2.0]);
        // From state 1: u=1 costs 1+5, u=2 costs 0+2.
        assert_eq!(sol.value(0, 1), 2.0);
        assert_eq!(sol.policy.input(0, 1), 2);
        assert_eq!(policy_cost(&p, &sol.policy, &costs, 1).unwrap(), 2.0);
        let fixed = Policy::from_table(vec![vec![1, 1]], 2).unwrap();
        assert_eq!(policy_cost(&p, &fixed, &costs, 2).unwrap(), 6.0);
    }

    #[test]
    fn dp_ties_pick_smallest_input() {
        let p = StochasticMatrix::from_logical(&LogicalMatrix::new(2, vec![1, 2, 1, 2]).unwrap());
        let costs = CostSpec::new(vec![vec![1.0, 1.0], vec![1.0, 1.0 + 1e-12]], vec![0.0, 0.0], 2, 1).unwrap();
        let sol = dp_finite_horizon(&p, &costs, 1e-9).unwrap();
        assert_eq!(sol.policy.constant_input(), Some(1));
    }

    #[test]
    fn cost_spec_validation() {
        assert!(CostSpec::new(vec![vec![1.0]], vec![0.0], 0, 1).is_err());
        assert!(CostSpec::new(vec![vec![1.0]], vec![0.0], 1, 2).is_err());
        assert!(CostSpec::new(vec![vec![1.0, 2.0]], vec![0.0], 1, 1).is_err());
        assert!(CostSpec::new(vec![vec![f64::NAN]], vec![0.0], 1, 1).is_err());
    }

    #[test]
    fn policy_horizon_mismatch() {
        let p = two_state();
        let costs = CostSpec::new(vec![vec![0.0; 2]; 2], vec![0.0; 2], 2, 1).unwrap();
        let pol = Policy::from_table(vec![vec![1, 1]], 2).unwrap();
        assert!(policy_cost(&p, &pol, &costs, 1).is_err());
    }
}
