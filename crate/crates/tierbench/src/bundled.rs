//! Fixtures compiled into the library: two reference topologies, the platform
//! catalog and the transcribed measurement tables.

use crate::catalog::{parse_printed_ratios, Catalog, PrintedRatio};
use crate::measurements::{MeasurementStore, ModelRegistry, ValidationReport};
use crate::topology::{parse_topology, NetworkModel};

pub const CATALOG: &str = include_str!("../../../catalog/platforms.csv");
pub const PRINTED_RATIOS: &str = include_str!("../../../catalog/printed_ratios.csv");

/// `(key, topology text)` of the bundled models.
pub const MODELS: [(&str, &str); 3] = [
    ("resnet50", include_str!("../../../models/resnet50.topo")),
    (
        "resnet50_unfused",
        include_str!("../../../models/resnet50_unfused.topo"),
    ),
    ("googlenetv1", include_str!("../../../models/googlenetv1.topo")),
];

/// `(file name, CSV text)` of the bundled measurement tables.
pub const MEASUREMENTS: [(&str, &str); 5] = [
    ("level1_tx2.csv", include_str!("../../../data/level1_tx2.csv")),
    ("level1_zcu104.csv", include_str!("../../../data/level1_zcu104.csv")),
    ("level2_tx2.csv", include_str!("../../../data/level2_tx2.csv")),
    (
        "level3_googlenetv1.csv",
        include_str!("../../../data/level3_googlenetv1.csv"),
    ),
    ("level3_resnet50.csv", include_str!("../../../data/level3_resnet50.csv")),
];

pub fn catalog() -> Catalog {
    Catalog::parse(CATALOG).expect("bundled catalog parses")
}

pub fn printed_ratios() -> Vec<PrintedRatio> {
    parse_printed_ratios(PRINTED_RATIOS).expect("bundled ratios parse")
}

/// A bundled model by key (`resnet50`) or by model name (`ResNet50`).
pub fn model(name: &str) -> Option<NetworkModel> {
    MODELS
        .iter()
        .map(|(key, text)| (key, parse_topology(text).expect("bundled topology parses")))
        .find(|(key, m)| key.eq_ignore_ascii_case(name) || m.name().eq_ignore_ascii_case(name))
        .map(|(_, m)| m)
}

/// Requirements of the deployment graphs the measurements were taken on.
pub fn registry() -> ModelRegistry {
    let mut reg = ModelRegistry::new();
    for key in ["resnet50", "googlenetv1"] {
        let m = model(key).expect("bundled model");
        reg.insert(m.name(), m.requirements());
    }
    reg
}

pub fn measurement_sources() -> Vec<(String, String)> {
    MEASUREMENTS
        .iter()
        .map(|(n, t)| (n.to_string(), t.to_string()))
        .collect()
}

pub fn store() -> (MeasurementStore, ValidationReport) {
    MeasurementStore::from_sources(&measurement_sources()).expect("bundled measurements parse")
}
