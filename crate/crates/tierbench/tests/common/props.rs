#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use tierbench::catalog::{parse_catalog, Catalog};
use tierbench::measurements::{ingest_measurements, serialize_measurements, MeasurementRecord, Record};
use tierbench::pareto::{pareto_frontier, Direction, FieldReader, Objective, ObjectiveField};
use tierbench::topology::{parse_topology, training_requirements, NetworkModel};

pub const FIELDS: [ObjectiveField; 4] = [
    ObjectiveField::Top1,
    ObjectiveField::Top5,
    ObjectiveField::Throughput,
    ObjectiveField::Power,
];

pub fn objectives(k: usize, minimize: &[bool]) -> Vec<Objective> {
    (0..k)
        .map(|i| Objective {
            field: FIELDS[i],
            direction: if minimize[i] {
                Direction::Minimize
            } else {
                Direction::Maximize
            },
        })
        .collect()
}

fn value(r: &Record, field: ObjectiveField) -> f64 {
    match field {
        ObjectiveField::Top1 => r.top1_pct.unwrap(),
        ObjectiveField::Top5 => r.top5_pct.unwrap(),
        ObjectiveField::Throughput => r.throughput_gops.unwrap(),
        ObjectiveField::Power => r.power_watts.unwrap(),
        _ => unreachable!("not generated"),
    }
}

fn set_value(r: &mut Record, field: ObjectiveField, v: f64) {
    match field {
        ObjectiveField::Top1 => r.value.top1_pct = Some(v),
        ObjectiveField::Top5 => r.value.top5_pct = Some(v),
        ObjectiveField::Throughput => r.value.throughput_gops = Some(v),
        ObjectiveField::Power => r.value.power_watts = Some(v),
        _ => unreachable!("not generated"),
    }
}

/// Brute-force non-dominated set: every pair is compared.
pub fn oracle_frontier(records: &[Record], objectives: &[Objective]) -> Vec<usize> {
    let better_or_equal = |a: f64, b: f64, d: Direction| match d {
        Direction::Maximize => a >= b,
        Direction::Minimize => a <= b,
    };
    let dominated = |i: usize, j: usize| {
        let all = objectives
            .iter()
            .all(|o| better_or_equal(value(&records[j], o.field), value(&records[i], o.field), o.direction));
        let some = objectives
            .iter()
            .any(|o| value(&records[j], o.field) != value(&records[i], o.field));
        all && some
    };
    (0..records.len())
        .filter(|&i| !(0..records.len()).any(|j| j != i && dominated(i, j)))
        .collect()
}

fn membership(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

pub fn pareto_matches_oracle(records: &[Record], objectives: &[Objective]) -> Result<(), TestCaseError> {
    let r =
        pareto_frontier(records, objectives, &FieldReader::plain()).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(membership(r.frontier.clone()), oracle_frontier(records, objectives));
    prop_assert_eq!(r.dominated_count, records.len() - r.frontier.len());
    let first = objectives[0];
    let keys: Vec<f64> = r
        .frontier
        .iter()
        .map(|&i| match first.direction {
            Direction::Maximize => value(&records[i], first.field),
            Direction::Minimize => -value(&records[i], first.field),
        })
        .collect();
    prop_assert!(
        keys.windows(2).all(|w| w[0] >= w[1]),
        "frontier not ordered: {:?}",
        keys
    );
    Ok(())
}

fn frontier_set(records: &[Record], objectives: &[Objective]) -> Vec<usize> {
    membership(
        pareto_frontier(records, objectives, &FieldReader::plain())
            .unwrap()
            .frontier,
    )
}

pub fn direction_inversion(records: &[Record], objectives: &[Objective], which: usize) -> Result<(), TestCaseError> {
    let before = frontier_set(records, objectives);
    let mut flipped = objectives.to_vec();
    let o = &mut flipped[which];
    o.direction = match o.direction {
        Direction::Maximize => Direction::Minimize,
        Direction::Minimize => Direction::Maximize,
    };
    let field = o.field;
    let negated: Vec<Record> = records
        .iter()
        .cloned()
        .map(|mut r| {
            let v = value(&r, field);
            set_value(&mut r, field, -v);
            r
        })
        .collect();
    prop_assert_eq!(before, frontier_set(&negated, &flipped));
    Ok(())
}

pub fn monotone_invariance(records: &[Record], objectives: &[Objective], which: usize) -> Result<(), TestCaseError> {
    let before = frontier_set(records, objectives);
    let field = objectives[which].field;
    let transformed: Vec<Record> = records
        .iter()
        .cloned()
        .map(|mut r| {
            let v = value(&r, field);
            set_value(&mut r, field, v * v * v + 3.0 * v + 7.0);
            r
        })
        .collect();
    prop_assert_eq!(before, frontier_set(&transformed, objectives));
    Ok(())
}

pub fn idempotence(records: &[Record], objectives: &[Objective]) -> Result<(), TestCaseError> {
    let front = pareto_frontier(records, objectives, &FieldReader::plain()).unwrap();
    let members: Vec<Record> = front.frontier.iter().map(|&i| records[i].clone()).collect();
    let again = pareto_frontier(&members, objectives, &FieldReader::plain()).unwrap();
    prop_assert_eq!(again.frontier.len(), members.len());
    prop_assert_eq!(again.dominated_count, 0);
    Ok(())
}

pub fn topology_round_trip(model: &NetworkModel) -> Result<(), TestCaseError> {
    let text = model.to_topology();
    let parsed = parse_topology(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
    prop_assert_eq!(&parsed, model);
    prop_assert_eq!(parsed.to_topology(), text);
    Ok(())
}

pub fn catalog_round_trip(catalog: &Catalog) -> Result<(), TestCaseError> {
    let text = catalog.to_csv();
    let parsed = parse_catalog(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
    prop_assert_eq!(&parsed, catalog);
    Ok(())
}

pub fn measurement_round_trip(records: &[MeasurementRecord]) -> Result<(), TestCaseError> {
    let text = serialize_measurements(records);
    let (parsed, report) = ingest_measurements("rt", &text).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert!(report.findings.is_empty(), "{}", report.to_text());
    let values: Vec<MeasurementRecord> = parsed.into_iter().map(|r| r.value).collect();
    prop_assert_eq!(values.as_slice(), records);
    Ok(())
}

pub fn training_ratios(model: &NetworkModel) -> Result<(), TestCaseError> {
    let req = model.requirements();
    let t = training_requirements(&req);
    prop_assert_eq!(t.ot_total - req.w_total, 3 * req.o_total);
    prop_assert_eq!(t.wu_total_elems, 3 * req.w_total);
    prop_assert_eq!(t.tensor_buffer_elems, 2 * req.t_total);
    prop_assert_eq!(t.tg_total_elems, req.t_total);
    Ok(())
}
