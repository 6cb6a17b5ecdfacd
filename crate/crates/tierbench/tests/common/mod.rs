#![allow(dead_code)]

pub mod props;

use proptest::collection::vec;
use proptest::prelude::*;

use tierbench::catalog::{Catalog, DatatypeSpec, PlatformEntry, PlatformKey};
use tierbench::finding::RecordId;
use tierbench::measurements::{MeasurementRecord, Parallelism, Record, Scope, Sourced};
use tierbench::topology::{LayerFields, LayerKind, LayerSpec, NetworkModel};

fn dim(max: u64) -> impl Strategy<Value = u64> {
    1..=max
}

fn opt_unit() -> impl Strategy<Value = Option<u64>> {
    prop_oneof![Just(None), Just(Some(1))]
}

pub fn arb_fields(kind: LayerKind) -> BoxedStrategy<LayerFields> {
    match kind {
        LayerKind::Conv => (dim(64), dim(64), dim(256), dim(7), dim(7), dim(3), dim(256))
            .prop_map(|(oh, ow, ic, kh, kw, s, oc)| LayerFields {
                out_h: Some(oh),
                out_w: Some(ow),
                in_ch: Some(ic),
                kernel_h: Some(kh),
                kernel_w: Some(kw),
                stride: Some(s),
                out_ch: Some(oc),
                ..Default::default()
            })
            .boxed(),
        LayerKind::Fc => (opt_unit(), opt_unit(), dim(4096), dim(4096))
            .prop_map(|(oh, ow, i, o)| LayerFields {
                out_h: oh,
                out_w: ow,
                in_ch: Some(i),
                out_ch: Some(o),
                ..Default::default()
            })
            .boxed(),
        LayerKind::Pool => (
            dim(64),
            dim(64),
            proptest::option::of(dim(256)),
            dim(5),
            dim(5),
            dim(3),
            dim(256),
        )
            .prop_map(|(oh, ow, ic, kh, kw, s, oc)| LayerFields {
                out_h: Some(oh),
                out_w: Some(ow),
                in_ch: ic,
                kernel_h: Some(kh),
                kernel_w: Some(kw),
                stride: Some(s),
                out_ch: Some(oc),
                ..Default::default()
            })
            .boxed(),
        LayerKind::Batchnorm | LayerKind::Activation | LayerKind::EltwiseAdd => {
            (dim(64), dim(64), proptest::option::of(dim(256)), dim(256))
                .prop_map(|(oh, ow, ic, oc)| LayerFields {
                    out_h: Some(oh),
                    out_w: Some(ow),
                    in_ch: ic,
                    out_ch: Some(oc),
                    ..Default::default()
                })
                .boxed()
        }
        LayerKind::Lstm => (
            opt_unit(),
            opt_unit(),
            dim(1024),
            proptest::option::of(dim(2048)),
            proptest::option::of(dim(5000)),
            dim(1024),
            proptest::option::of(any::<bool>()),
        )
            .prop_map(|(oh, ow, i, oc, seq, h, bi)| LayerFields {
                out_h: oh,
                out_w: ow,
                in_ch: Some(i),
                out_ch: oc,
                seq_len: seq,
                hidden: Some(h),
                bidirectional: bi,
                ..Default::default()
            })
            .boxed(),
    }
}

pub fn arb_kind() -> impl Strategy<Value = LayerKind> {
    proptest::sample::select(LayerKind::ALL.to_vec())
}

pub fn arb_layer(name: String) -> impl Strategy<Value = LayerSpec> {
    arb_kind()
        .prop_flat_map(arb_fields_for)
        .prop_map(move |(kind, fields)| LayerSpec::new(name.clone(), kind, fields).expect("generated layer is valid"))
}

fn arb_fields_for(kind: LayerKind) -> impl Strategy<Value = (LayerKind, LayerFields)> {
    arb_fields(kind).prop_map(move |f| (kind, f))
}

pub fn arb_conv(name: &str) -> impl Strategy<Value = LayerSpec> {
    let name = name.to_string();
    arb_fields(LayerKind::Conv).prop_map(move |f| LayerSpec::new(name.clone(), LayerKind::Conv, f).unwrap())
}

pub fn arb_model(max_layers: usize) -> impl Strategy<Value = NetworkModel> {
    (
        "[A-Za-z][A-Za-z0-9_]{0,8}",
        vec(arb_kind().prop_flat_map(arb_fields_for), 0..=max_layers),
    )
        .prop_map(|(name, layers)| {
            let layers = layers
                .into_iter()
                .enumerate()
                .map(|(i, (kind, f))| LayerSpec::new(format!("layer{i}"), kind, f).unwrap())
                .collect();
            NetworkModel::new(name, layers).expect("generated model is valid")
        })
}

fn positive_f64() -> impl Strategy<Value = f64> {
    prop_oneof![
        (1u64..10_000_000).prop_map(|x| x as f64 / 1000.0),
        proptest::num::f64::POSITIVE | proptest::num::f64::NORMAL,
    ]
    .prop_filter("positive and finite", |x| x.is_finite() && *x > 0.0)
}

fn text_field() -> impl Strategy<Value = String> {
    "[A-Za-z][A-Za-z0-9 ,\"]{0,10}[A-Za-z0-9]"
}

fn arb_datatype() -> impl Strategy<Value = DatatypeSpec> {
    prop_oneof![
        proptest::sample::select(vec!["FP32", "FP16", "INT8", "INT4", "BIN", "TERN"]).prop_map(DatatypeSpec::named),
        (1u32..=32).prop_map(|b| DatatypeSpec::new(&format!("custom{b}"), Some(b)).unwrap()),
    ]
}

pub fn arb_entry() -> impl Strategy<Value = PlatformEntry> {
    (
        text_field(),
        text_field(),
        arb_datatype(),
        positive_f64(),
        proptest::option::of(positive_f64()),
        proptest::option::of(positive_f64()),
        proptest::option::of(positive_f64()),
    )
        .prop_map(
            |(platform, mode, datatype, peak_tops, mem_bw_gbps, tdp_watts, cost_usd)| PlatformEntry {
                platform,
                mode,
                datatype,
                peak_tops,
                mem_bw_gbps,
                tdp_watts,
                cost_usd,
            },
        )
}

pub fn arb_catalog() -> impl Strategy<Value = Catalog> {
    vec(arb_entry(), 0..20).prop_map(|entries| {
        let mut seen = std::collections::HashSet::new();
        let unique = entries
            .into_iter()
            .filter(|e| {
                let k = e.key();
                seen.insert((
                    k.platform.to_lowercase(),
                    k.mode.to_lowercase(),
                    k.datatype.to_lowercase(),
                ))
            })
            .collect();
        Catalog::new(unique).expect("generated catalog is valid")
    })
}

fn pct() -> impl Strategy<Value = f64> {
    prop_oneof![0.0..=100.0f64, (0u32..=10000).prop_map(|x| f64::from(x) / 100.0)]
}

pub fn arb_record() -> impl Strategy<Value = MeasurementRecord> {
    (
        1u8..=3,
        (text_field(), text_field(), "[A-Z][A-Z0-9]{1,5}"),
        "[A-Za-z][A-Za-z0-9]{0,8}",
        "[a-z][a-z0-9_]{0,12}",
        (any::<bool>(), 1u32..=256),
        any::<bool>(),
        positive_f64(),
        (
            proptest::option::of(positive_f64()),
            proptest::option::of(positive_f64()),
            proptest::option::of(pct()),
            pct(),
            proptest::option::of(0.0..2.0f64),
        ),
    )
        .prop_map(
            |(level, (p, m, d), model, layer, (batch, n), system, latency_ms, (thr, power, top1, top5, eff))| {
                MeasurementRecord {
                    level,
                    platform: PlatformKey::new(&p, &m, &d),
                    model,
                    layer: (level < 3).then_some(layer),
                    parallelism: if batch {
                        Parallelism::Batch(n)
                    } else {
                        Parallelism::Threads(n)
                    },
                    scope: if system { Scope::System } else { Scope::Compute },
                    latency_ms,
                    throughput_gops: thr,
                    power_watts: power,
                    top1_pct: if level == 3 { top1 } else { None },
                    top5_pct: if level == 3 { Some(top5) } else { None },
                    reported_efficiency: eff,
                }
            },
        )
}

/// Records whose objective fields come from small integer grids, so ties and
/// dominance are common. `k` objectives are drawn from top1, top5,
/// throughput and power, in that order.
pub fn arb_objective_records(max_n: usize) -> impl Strategy<Value = (usize, Vec<Record>)> {
    (2usize..=4).prop_flat_map(move |k| {
        (Just(k), vec(vec(0i32..12, 4), 1..=max_n)).prop_map(|(k, rows)| {
            let records = rows
                .into_iter()
                .enumerate()
                .map(|(i, v)| objective_record(i, &v))
                .collect();
            (k, records)
        })
    })
}

pub fn objective_record(i: usize, v: &[i32]) -> Record {
    Sourced {
        id: RecordId::new("gen", i + 1),
        value: MeasurementRecord {
            level: 3,
            platform: PlatformKey::new("P", "m", "INT8"),
            model: format!("m{i}"),
            layer: None,
            parallelism: Parallelism::Batch(1),
            scope: Scope::System,
            latency_ms: 1.0,
            top1_pct: Some(f64::from(v[0])),
            top5_pct: Some(f64::from(v[1])),
            throughput_gops: Some(f64::from(v[2])),
            power_watts: Some(f64::from(v[3])),
            reported_efficiency: None,
        },
    }
}
