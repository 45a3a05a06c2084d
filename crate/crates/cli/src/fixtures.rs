//! Bundled input files, referenced on the command line as `@name`.

use pbnq::fixtures as core;
use pbnq::Pbn;

use crate::schema::{
    to_canonical_json, BooleanConstituent, BooleanModel, CostFile, MatrixModel, ModelFile, PartitionFile,
    TargetFile,
};

pub const NAMES: [&str; 7] = [
    "example1",
    "example1_partition",
    "example2_seed",
    "example3_costs",
    "lac_operon",
    "lac_stab_target",
    "lac_optctl_costs",
];

/// The committed text of a bundled file.
pub fn embedded(name: &str) -> Option<&'static str> {
    Some(match name {
        "example1" => include_str!("../fixtures/example1.json"),
        "example1_partition" => include_str!("../fixtures/example1_partition.json"),
        "example2_seed" => include_str!("../fixtures/example2_seed.json"),
        "example3_costs" => include_str!("../fixtures/example3_costs.json"),
        "lac_operon" => include_str!("../fixtures/lac_operon.json"),
        "lac_stab_target" => include_str!("../fixtures/lac_stab_target.json"),
        "lac_optctl_costs" => include_str!("../fixtures/lac_optctl_costs.json"),
        _ => return None,
    })
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// Regenerates a bundled file from the library's built-in examples.
pub fn generate(name: &str) -> Option<String> {
    Some(match name {
        "example1" => {
            let pbn = Pbn::from_matrix(core::example1_matrix(), pbnq::DEFAULT_TOLERANCE).expect("valid");
            let mut m = MatrixModel::from_pbn(&pbn, None);
            m.constituents = None;
            to_canonical_json(&ModelFile::Matrix(m))
        }
        "example1_partition" => to_canonical_json(&PartitionFile::from_partition(&core::example1_partition(), None)),
        "example2_seed" => to_canonical_json(&PartitionFile::from_partition(&core::example2_seed(), None)),
        "example3_costs" => to_canonical_json(&CostFile::from_spec(&core::example3_costs(3, 1))),
        "lac_operon" => to_canonical_json(&ModelFile::Boolean(BooleanModel {
            state_vars: strings(&core::LAC_STATE_VARS),
            input_vars: strings(&core::LAC_INPUT_VARS),
            parameters: strings(&core::LAC_PARAMETERS),
            functions: Some(strings(&core::LAC_FUNCTIONS)),
            constituents: core::lac_operon_specs()
                .into_iter()
                .map(|s| BooleanConstituent {
                    probability: s.probability,
                    functions: None,
                    bindings: s.bindings,
                })
                .collect(),
        })),
        "lac_stab_target" => to_canonical_json(&TargetFile {
            n_states: 1024,
            target: vec![core::LAC_STABILIZATION_TARGET],
        }),
        "lac_optctl_costs" => to_canonical_json(&CostFile::from_spec(&core::lac_optctl_costs())),
        _ => return None,
    })
}
