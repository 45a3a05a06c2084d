//! Small worked examples and the lac operon network.

use std::collections::BTreeMap;

use crate::algebra::{SparseMatrix, StochasticMatrix, DEFAULT_TOLERANCE};
use crate::control::CostSpec;
use crate::model::{ConstituentSpec, NetworkDef};
use crate::relations::Partition;

/// The 8-state, 2-input example: columns of `P(δ_2^1)` then `P(δ_2^2)`.
pub fn example1_matrix() -> StochasticMatrix {
    let cols: [&[(usize, f64)]; 16] = [
        &[(2, 1.0)],
        &[(1, 0.5), (3, 0.5)],
        &[(1, 0.5), (3, 0.5)],
        &[(5, 1.0)],
        &[(6, 1.0)],
        &[(7, 1.0)],
        &[(8, 1.0)],
        &[(5, 1.0)],
        &[(1, 1.0)],
        &[(1, 1.0)],
        &[(1, 1.0)],
        &[(4, 0.3), (8, 0.7)],
        &[(6, 1.0)],
        &[(7, 1.0)],
        &[(6, 0.5), (8, 0.5)],
        &[(7, 1.0)],
    ];
    let entries = cols
        .iter()
        .enumerate()
        .flat_map(|(j, c)| c.iter().map(move |&(i, v)| (i, j + 1, v)));
    let m = SparseMatrix::from_entries(8, 16, entries).expect("valid entries");
    StochasticMatrix::new(m, DEFAULT_TOLERANCE).expect("column-stochastic")
}

/// `{{1}, {2,3}, {4}, {5,6,7,8}}`, lumpable for [`example1_matrix`].
pub fn example1_partition() -> Partition {
    Partition::new(8, vec![vec![1], vec![2, 3], vec![4], vec![5, 6, 7, 8]]).expect("valid")
}

/// `{{1}, {2,3,4}, {5,6,7,8}}`, whose coarsest lumpable refinement is
/// [`example1_partition`].
pub fn example2_seed() -> Partition {
    Partition::new(8, vec![vec![1], vec![2, 3, 4], vec![5, 6, 7, 8]]).expect("valid")
}

/// Stage costs 1 on states 1..4 and 2 on 5..8 under input 1, 3 under input 2;
/// terminal cost 1 at state 1 and 2 elsewhere.
pub fn example3_costs(horizon: usize, x0: usize) -> CostSpec {
    CostSpec::new(
        vec![
            vec![1.0, 1.0, 1.0, 1.0, 2.0, 2.0, 2.0, 2.0],
            vec![3.0; 8],
        ],
        vec![1.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0],
        horizon,
        x0,
    )
    .expect("valid costs")
}

pub const LAC_STATE_VARS: [&str; 10] = ["M_lac", "P_lac", "B", "C_ap", "R", "R_m", "A", "A_m", "L", "L_m"];
pub const LAC_INPUT_VARS: [&str; 1] = ["G_e"];
pub const LAC_PARAMETERS: [&str; 2] = ["L_e", "L_em"];
pub const LAC_FUNCTIONS: [&str; 10] = [
    "C_ap & !R & !R_m",
    "M_lac",
    "M_lac",
    "!G_e",
    "!A & !A_m",
    "(!A & !A_m) | R",
    "B & L",
    "L | L_m",
    "P_lac & L_e & !G_e",
    "((L_em & P_lac) | L_e) & !G_e",
];

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// Constituent specs of the lac operon PBN: low extracellular lactose
/// `(L_e, L_em) = (0, 0)` and medium `(0, 1)`, each with probability 1/2.
pub fn lac_operon_specs() -> Vec<ConstituentSpec> {
    [(false, false), (false, true)]
        .into_iter()
        .map(|(le, lem)| ConstituentSpec {
            probability: 0.5,
            functions: strings(&LAC_FUNCTIONS),
            bindings: BTreeMap::from([("L_e".to_string(), le), ("L_em".to_string(), lem)]),
        })
        .collect()
}

/// The lac operon PBN with 10 state variables and glucose as input.
pub fn lac_operon_network() -> NetworkDef {
    NetworkDef::parse(
        strings(&LAC_STATE_VARS),
        strings(&LAC_INPUT_VARS),
        &strings(&LAC_PARAMETERS),
        &lac_operon_specs(),
        DEFAULT_TOLERANCE,
    )
    .expect("valid network")
}

/// The steady state `(0,0,0,1,1,1,0,0,0,0)`.
pub const LAC_STABILIZATION_TARGET: usize = 912;

/// Stage cost 1 for glucose present and 0 for absent; terminal cost 3 when
/// the first three variables are ON (states 1..128) and 6 otherwise;
/// horizon 10 from state 1.
pub fn lac_optctl_costs() -> CostSpec {
    let terminal = (1..=1024).map(|x| if x <= 128 { 3.0 } else { 6.0 }).collect();
    CostSpec::new(vec![vec![1.0; 1024], vec![0.0; 1024]], terminal, 10, 1).expect("valid costs")
}
