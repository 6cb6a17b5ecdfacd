//! Network topologies and their inference/training cost.
//!
//! A [`NetworkModel`] is an ordered list of [`LayerSpec`]s. Each layer kind has
//! a closed-form cost: the number of arithmetic operations (a multiply-accumulate
//! counts as two), the number of weight elements (biases included) and the size
//! of the tensor it produces. Model totals are exact integer sums over layers.
//!
//! Spatial dimensions in a layer are always the *output* dimensions, so strided
//! layers need no extra bookkeeping: `stride` is carried for reference only.
//!
//! ```
//! use tierbench::topology::{LayerSpec, NetworkModel};
//!
//! let conv = LayerSpec::conv("res2a_branch2a", (56, 56), 64, (1, 1), 1, 64).unwrap();
//! assert_eq!(conv.requirements().ops, 25_690_112);
//!
//! let fc = LayerSpec::fc("fc1000", 2048, 1000).unwrap();
//! let model = NetworkModel::new("tiny", vec![conv, fc]).unwrap();
//! let req = model.requirements();
//! assert_eq!(req.o_total, 25_690_112 + 4_096_000);
//! ```

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// Sequence length assumed for recurrent layers that do not state one.
pub const DEFAULT_SEQ_LEN: u64 = 3000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerKind {
    Conv,
    Fc,
    Pool,
    Batchnorm,
    Activation,
    EltwiseAdd,
    Lstm,
}

impl LayerKind {
    pub const ALL: [LayerKind; 7] = [
        LayerKind::Conv,
        LayerKind::Fc,
        LayerKind::Pool,
        LayerKind::Batchnorm,
        LayerKind::Activation,
        LayerKind::EltwiseAdd,
        LayerKind::Lstm,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LayerKind::Conv => "conv",
            LayerKind::Fc => "fc",
            LayerKind::Pool => "pool",
            LayerKind::Batchnorm => "batchnorm",
            LayerKind::Activation => "activation",
            LayerKind::EltwiseAdd => "eltwise_add",
            LayerKind::Lstm => "lstm",
        }
    }

    fn schema(self) -> [Presence; FIELD_COUNT] {
        use Presence::*;
        // out_h, out_w, in_ch, kernel_h, kernel_w, stride, out_ch, seq_len, hidden, bidir
        match self {
            LayerKind::Conv => [
                Required, Required, Required, Required, Required, Required, Required, Absent, Absent, Absent,
            ],
            LayerKind::Fc => [
                Unit, Unit, Required, Absent, Absent, Absent, Required, Absent, Absent, Absent,
            ],
            LayerKind::Pool => [
                Required, Required, Optional, Required, Required, Required, Required, Absent, Absent, Absent,
            ],
            LayerKind::Batchnorm | LayerKind::Activation | LayerKind::EltwiseAdd => [
                Required, Required, Optional, Absent, Absent, Absent, Required, Absent, Absent, Absent,
            ],
            LayerKind::Lstm => [
                Unit, Unit, Required, Absent, Absent, Absent, Optional, Optional, Required, Optional,
            ],
        }
    }
}

impl fmt::Display for LayerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LayerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LayerKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown layer kind `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Presence {
    Required,
    Optional,
    /// Optional, and equal to 1 when given (spatial dims of fc/lstm).
    Unit,
    Absent,
}

const FIELD_COUNT: usize = 10;

/// Column names of the topology format, after `name,kind`.
pub const FIELD_NAMES: [&str; FIELD_COUNT] = [
    "out_h", "out_w", "in_ch", "kernel_h", "kernel_w", "stride", "out_ch", "seq_len", "hidden", "bidir",
];

/// The dimensional parameters of a layer. Fields that do not apply to the
/// layer's kind are `None`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct LayerFields {
    pub out_h: Option<u64>,
    pub out_w: Option<u64>,
    pub in_ch: Option<u64>,
    pub kernel_h: Option<u64>,
    pub kernel_w: Option<u64>,
    pub stride: Option<u64>,
    pub out_ch: Option<u64>,
    pub seq_len: Option<u64>,
    pub hidden: Option<u64>,
    pub bidirectional: Option<bool>,
}

impl LayerFields {
    fn numeric(&self) -> [Option<u64>; FIELD_COUNT - 1] {
        [
            self.out_h,
            self.out_w,
            self.in_ch,
            self.kernel_h,
            self.kernel_w,
            self.stride,
            self.out_ch,
            self.seq_len,
            self.hidden,
        ]
    }

    fn is_present(&self, idx: usize) -> bool {
        if idx == FIELD_COUNT - 1 {
            self.bidirectional.is_some()
        } else {
            self.numeric()[idx].is_some()
        }
    }
}

/// One network layer. Constructed through the kind-specific constructors or
/// [`LayerSpec::new`], all of which check the field schema of the kind.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LayerSpec {
    name: String,
    kind: LayerKind,
    #[serde(flatten)]
    fields: LayerFields,
}

/// Per-layer cost.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LayerRequirements {
    /// Arithmetic operations for one input.
    pub ops: u64,
    /// Weight elements, biases included.
    pub weights: u64,
    /// Elements of the produced tensor.
    pub tensor_elems: u64,
}

impl LayerSpec {
    pub fn new(name: impl Into<String>, kind: LayerKind, fields: LayerFields) -> Result<Self> {
        let layer = LayerSpec {
            name: name.into(),
            kind,
            fields,
        };
        layer.validate()?;
        Ok(layer)
    }

    /// Convolution; `out` is the output feature map (height, width).
    pub fn conv(
        name: impl Into<String>,
        out: (u64, u64),
        in_ch: u64,
        kernel: (u64, u64),
        stride: u64,
        out_ch: u64,
    ) -> Result<Self> {
        Self::new(
            name,
            LayerKind::Conv,
            LayerFields {
                out_h: Some(out.0),
                out_w: Some(out.1),
                in_ch: Some(in_ch),
                kernel_h: Some(kernel.0),
                kernel_w: Some(kernel.1),
                stride: Some(stride),
                out_ch: Some(out_ch),
                ..Default::default()
            },
        )
    }

    pub fn fc(name: impl Into<String>, in_features: u64, out_features: u64) -> Result<Self> {
        Self::new(
            name,
            LayerKind::Fc,
            LayerFields {
                in_ch: Some(in_features),
                out_ch: Some(out_features),
                ..Default::default()
            },
        )
    }

    pub fn pool(
        name: impl Into<String>,
        out: (u64, u64),
        channels: u64,
        kernel: (u64, u64),
        stride: u64,
    ) -> Result<Self> {
        Self::new(
            name,
            LayerKind::Pool,
            LayerFields {
                out_h: Some(out.0),
                out_w: Some(out.1),
                kernel_h: Some(kernel.0),
                kernel_w: Some(kernel.1),
                stride: Some(stride),
                out_ch: Some(channels),
                ..Default::default()
            },
        )
    }

    /// Batchnorm, activation or elementwise-add layer over an `out` feature map.
    pub fn elementwise(name: impl Into<String>, kind: LayerKind, out: (u64, u64), channels: u64) -> Result<Self> {
        if !matches!(
            kind,
            LayerKind::Batchnorm | LayerKind::Activation | LayerKind::EltwiseAdd
        ) {
            return Err(Error::invalid(format!("`{kind}` is not an elementwise kind")));
        }
        Self::new(
            name,
            kind,
            LayerFields {
                out_h: Some(out.0),
                out_w: Some(out.1),
                out_ch: Some(channels),
                ..Default::default()
            },
        )
    }

    /// LSTM layer; `seq_len` defaults to [`DEFAULT_SEQ_LEN`].
    pub fn lstm(
        name: impl Into<String>,
        in_features: u64,
        hidden: u64,
        seq_len: Option<u64>,
        bidirectional: bool,
    ) -> Result<Self> {
        Self::new(
            name,
            LayerKind::Lstm,
            LayerFields {
                in_ch: Some(in_features),
                hidden: Some(hidden),
                seq_len,
                bidirectional: Some(bidirectional),
                ..Default::default()
            },
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> LayerKind {
        self.kind
    }

    pub fn fields(&self) -> &LayerFields {
        &self.fields
    }

    fn validate(&self) -> Result<()> {
        if self.name.is_empty() {
            return Err(Error::invalid("empty layer name"));
        }
        if self.name.contains(',') || self.name.trim() != self.name {
            return Err(Error::invalid(format!(
                "layer name `{}` contains a comma or surrounding whitespace",
                self.name
            )));
        }
        let schema = self.kind.schema();
        let numeric = self.fields.numeric();
        for (idx, presence) in schema.iter().enumerate() {
            let present = self.fields.is_present(idx);
            match presence {
                Presence::Required if !present => {
                    return Err(Error::invalid(format!(
                        "{} layer `{}` is missing required field `{}`",
                        self.kind, self.name, FIELD_NAMES[idx]
                    )))
                }
                Presence::Absent if present => {
                    return Err(Error::invalid(format!(
                        "field `{}` does not apply to {} layer `{}`",
                        FIELD_NAMES[idx], self.kind, self.name
                    )))
                }
                Presence::Unit if present && numeric[idx] != Some(1) => {
                    return Err(Error::invalid(format!(
                        "field `{}` of {} layer `{}` must be 1",
                        FIELD_NAMES[idx], self.kind, self.name
                    )))
                }
                _ => {}
            }
        }
        if let Some(idx) = numeric.iter().position(|v| *v == Some(0)) {
            return Err(Error::invalid(format!(
                "non-positive dimension `{}` in layer `{}`",
                FIELD_NAMES[idx], self.name
            )));
        }
        self.checked_requirements()
            .ok_or_else(|| Error::invalid(format!("cost of layer `{}` overflows 64 bits", self.name)))?;
        Ok(())
    }

    fn checked_requirements(&self) -> Option<LayerRequirements> {
        let f = &self.fields;
        let prod =
            |xs: &[Option<u64>]| -> Option<u64> { xs.iter().try_fold(1u64, |acc, x| acc.checked_mul(x.unwrap_or(1))) };
        let spatial = prod(&[f.out_h, f.out_w, f.out_ch])?;
        let req = match self.kind {
            LayerKind::Conv => {
                let kernel = prod(&[f.kernel_h, f.kernel_w, f.in_ch, f.out_ch])?;
                LayerRequirements {
                    ops: prod(&[f.out_h, f.out_w])?.checked_mul(kernel)?.checked_mul(2)?,
                    weights: kernel.checked_add(f.out_ch?)?,
                    tensor_elems: spatial,
                }
            }
            LayerKind::Fc => {
                let dense = prod(&[f.in_ch, f.out_ch])?;
                LayerRequirements {
                    ops: dense.checked_mul(2)?,
                    weights: dense.checked_add(f.out_ch?)?,
                    tensor_elems: f.out_ch?,
                }
            }
            LayerKind::Pool => LayerRequirements {
                ops: spatial.checked_mul(prod(&[f.kernel_h, f.kernel_w])?)?,
                weights: 0,
                tensor_elems: spatial,
            },
            LayerKind::Batchnorm => LayerRequirements {
                ops: spatial.checked_mul(2)?,
                weights: f.out_ch?.checked_mul(2)?,
                tensor_elems: spatial,
            },
            LayerKind::Activation | LayerKind::EltwiseAdd => LayerRequirements {
                ops: spatial,
                weights: 0,
                tensor_elems: spatial,
            },
            LayerKind::Lstm => {
                let hidden = f.hidden?;
                let directions = if f.bidirectional == Some(true) { 2 } else { 1 };
                let seq = f.seq_len.unwrap_or(DEFAULT_SEQ_LEN);
                let gate_inputs = f.in_ch?.checked_add(hidden)?;
                let gate_weights = gate_inputs.checked_mul(hidden)?;
                LayerRequirements {
                    ops: prod(&[Some(gate_weights), Some(seq), Some(8), Some(directions)])?,
                    weights: gate_weights
                        .checked_add(hidden)?
                        .checked_mul(4)?
                        .checked_mul(directions)?,
                    tensor_elems: prod(&[Some(seq), Some(hidden), Some(directions)])?,
                }
            }
        };
        Some(req)
    }

    /// Operation, weight and tensor counts of this layer.
    pub fn requirements(&self) -> LayerRequirements {
        self.checked_requirements().expect("validated layers never overflow")
    }
}

/// Free-function form of [`LayerSpec::requirements`].
pub fn layer_requirements(layer: &LayerSpec) -> LayerRequirements {
    layer.requirements()
}

/// Network totals without the per-layer breakdown.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Totals {
    pub ops: u64,
    pub weights: u64,
    pub tensor_elems: u64,
}

impl Totals {
    /// Totals given in display units: GOP and millions of elements.
    pub fn from_display(gop: f64, me: f64) -> Self {
        Totals {
            ops: (gop * 1e9).round() as u64,
            weights: (me * 1e6).round() as u64,
            tensor_elems: 0,
        }
    }

    pub fn gop(&self) -> f64 {
        self.ops as f64 / 1e9
    }

    pub fn me(&self) -> f64 {
        self.weights as f64 / 1e6
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModelRequirements {
    pub o_total: u64,
    pub w_total: u64,
    pub t_total: u64,
    pub per_layer: Vec<(String, LayerRequirements)>,
}

impl ModelRequirements {
    pub fn totals(&self) -> Totals {
        Totals {
            ops: self.o_total,
            weights: self.w_total,
            tensor_elems: self.t_total,
        }
    }

    /// Ops of a layer, or of a block of layers.
    ///
    /// `reference` first matches a layer name exactly; otherwise it names the
    /// block of all layers called `<reference>_*` (e.g. `res2a` covers
    /// `res2a_branch1`, `res2a_branch2a`, ...).
    pub fn layer_ops(&self, reference: &str) -> Option<u64> {
        if let Some((_, r)) = self.per_layer.iter().find(|(n, _)| n == reference) {
            return Some(r.ops);
        }
        let prefix = format!("{reference}_");
        let mut block = self.per_layer.iter().filter(|(n, _)| n.starts_with(&prefix)).peekable();
        block.peek()?;
        Some(block.map(|(_, r)| r.ops).sum())
    }
}

impl From<&ModelRequirements> for Totals {
    fn from(req: &ModelRequirements) -> Self {
        req.totals()
    }
}

/// Training-time requirements derived from the inference totals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TrainingRequirements {
    /// Forward + backward ops (3x inference) plus one update per weight.
    pub ot_total: u64,
    /// Weights, weight gradients and weight updates.
    pub wu_total_elems: u64,
    /// Gradients of the activation tensors.
    pub tg_total_elems: u64,
    /// Activations plus their gradients.
    pub tensor_buffer_elems: u64,
}

/// Arithmetic saturates at `u64::MAX`; totals of a [`NetworkModel`] never do.
pub fn training_requirements(totals: impl Into<Totals>) -> TrainingRequirements {
    let t = totals.into();
    TrainingRequirements {
        ot_total: t.ops.saturating_mul(3).saturating_add(t.weights),
        wu_total_elems: t.weights.saturating_mul(3),
        tg_total_elems: t.tensor_elems,
        tensor_buffer_elems: t.tensor_elems.saturating_mul(2),
    }
}

/// A named, ordered list of layers with unique names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NetworkModel {
    name: String,
    layers: Vec<LayerSpec>,
}

impl NetworkModel {
    pub fn new(name: impl Into<String>, layers: Vec<LayerSpec>) -> Result<Self> {
        let mut model = NetworkModel {
            name: name.into(),
            layers: Vec::with_capacity(layers.len()),
        };
        for layer in layers {
            model.push(layer)?;
        }
        Ok(model)
    }

    /// Appends a layer, rejecting duplicate names and totals that would
    /// overflow.
    pub fn push(&mut self, layer: LayerSpec) -> Result<()> {
        if self.layers.iter().any(|l| l.name == layer.name) {
            return Err(Error::invalid(format!("duplicate layer name `{}`", layer.name)));
        }
        let cur = self.requirements().totals();
        let add = layer.requirements();
        let fits = || -> Option<()> {
            let ops = cur.ops.checked_add(add.ops)?;
            let weights = cur.weights.checked_add(add.weights)?;
            let tensors = cur.tensor_elems.checked_add(add.tensor_elems)?;
            ops.checked_mul(3)?.checked_add(weights)?;
            weights.checked_mul(3)?;
            tensors.checked_mul(2)?;
            Some(())
        };
        fits().ok_or_else(|| Error::invalid("model totals overflow 64 bits"))?;
        self.layers.push(layer);
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn layers(&self) -> &[LayerSpec] {
        &self.layers
    }

    /// Layer count.
    pub fn n(&self) -> usize {
        self.layers.len()
    }

    pub fn requirements(&self) -> ModelRequirements {
        model_requirements(self)
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse_topology(text)
    }

    pub fn to_topology(&self) -> String {
        serialize_topology(self)
    }
}

pub fn model_requirements(model: &NetworkModel) -> ModelRequirements {
    let per_layer: Vec<_> = model
        .layers
        .iter()
        .map(|l| (l.name.clone(), l.requirements()))
        .collect();
    ModelRequirements {
        o_total: per_layer.iter().map(|(_, r)| r.ops).sum(),
        w_total: per_layer.iter().map(|(_, r)| r.weights).sum(),
        t_total: per_layer.iter().map(|(_, r)| r.tensor_elems).sum(),
        per_layer,
    }
}

const BASE_HEADER: &str = "name,kind,out_h,out_w,in_ch,kernel_h,kernel_w,stride,out_ch";
const RECURRENT_HEADER: &str = "name,kind,out_h,out_w,in_ch,kernel_h,kernel_w,stride,out_ch,seq_len,hidden,bidir";
const NAME_DIRECTIVE: &str = "model:";

fn split_fields(line: &str) -> Vec<&str> {
    line.split(',').map(str::trim).collect()
}

fn parse_dim(line: usize, column: &str, raw: &str) -> Result<Option<u64>> {
    if raw.is_empty() {
        return Ok(None);
    }
    match raw.parse::<u64>() {
        Ok(0) => Err(Error::parse(line, format!("non-positive dimension {column}=0"))),
        Ok(v) => Ok(Some(v)),
        Err(_) if raw.parse::<i64>().is_ok() => {
            Err(Error::parse(line, format!("non-positive dimension {column}={raw}")))
        }
        Err(_) => Err(Error::parse(line, format!("malformed number {column}=`{raw}`"))),
    }
}

fn parse_flag(line: usize, raw: &str) -> Result<Option<bool>> {
    match raw {
        "" => Ok(None),
        "1" | "true" => Ok(Some(true)),
        "0" | "false" => Ok(Some(false)),
        _ => Err(Error::parse(line, format!("malformed bidir flag `{raw}`"))),
    }
}

/// Parses the topology text format.
///
/// `#` starts a comment line; a `# model: NAME` comment names the model. The
/// first other line is the header, then one layer per line.
pub fn parse_topology(text: &str) -> Result<NetworkModel> {
    let mut name = None;
    let mut columns = None;
    let mut model = NetworkModel::new("model", Vec::new())?;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(n) = comment.trim().strip_prefix(NAME_DIRECTIVE) {
                name.get_or_insert_with(|| n.trim().to_string());
            }
            continue;
        }
        let fields = split_fields(line);
        let Some(width) = columns else {
            let header = fields.join(",");
            if header == BASE_HEADER || header == RECURRENT_HEADER {
                columns = Some(fields.len());
                continue;
            }
            return Err(Error::parse(
                line_no,
                format!("expected header `{RECURRENT_HEADER}` (last three columns optional)"),
            ));
        };
        if fields.len() != width {
            return Err(Error::parse(
                line_no,
                format!("expected {width} fields, found {}", fields.len()),
            ));
        }
        let kind: LayerKind = fields[1]
            .parse()
            .map_err(|e: Error| Error::parse(line_no, e.to_string()))?;
        let mut dims = [None; FIELD_COUNT - 1];
        for (i, slot) in dims.iter_mut().enumerate() {
            if let Some(raw) = fields.get(i + 2) {
                *slot = parse_dim(line_no, FIELD_NAMES[i], raw)?;
            }
        }
        let bidirectional = match fields.get(11) {
            Some(raw) => parse_flag(line_no, raw)?,
            None => None,
        };
        let layer_fields = LayerFields {
            out_h: dims[0],
            out_w: dims[1],
            in_ch: dims[2],
            kernel_h: dims[3],
            kernel_w: dims[4],
            stride: dims[5],
            out_ch: dims[6],
            seq_len: dims[7],
            hidden: dims[8],
            bidirectional,
        };
        let layer =
            LayerSpec::new(fields[0], kind, layer_fields).map_err(|e| Error::parse(line_no, strip_invalid(e)))?;
        model.push(layer).map_err(|e| Error::parse(line_no, strip_invalid(e)))?;
    }
    if columns.is_none() {
        return Err(Error::Header("topology has no header line".into()));
    }
    if let Some(name) = name {
        model.name = name;
    }
    Ok(model)
}

fn strip_invalid(e: Error) -> String {
    match e {
        Error::InvalidInput(m) => m,
        other => other.to_string(),
    }
}

/// Writes a model in the topology format accepted by [`parse_topology`].
pub fn serialize_topology(model: &NetworkModel) -> String {
    let recurrent = model.layers.iter().any(|l| l.kind == LayerKind::Lstm);
    let mut out = format!("# {NAME_DIRECTIVE} {}\n", model.name);
    out.push_str(if recurrent { RECURRENT_HEADER } else { BASE_HEADER });
    out.push('\n');
    let width = if recurrent { FIELD_COUNT - 1 } else { 7 };
    for layer in &model.layers {
        out.push_str(&layer.name);
        out.push(',');
        out.push_str(layer.kind.as_str());
        for v in &layer.fields.numeric()[..width] {
            out.push(',');
            if let Some(v) = v {
                out.push_str(&v.to_string());
            }
        }
        if recurrent {
            out.push(',');
            match layer.fields.bidirectional {
                Some(true) => out.push('1'),
                Some(false) => out.push('0'),
                None => {}
            }
        }
        out.push('\n');
    }
    out
}

/// Per-layer requirements as CSV with columns `layer,ops,weights,tensor_elems`.
pub fn requirements_csv(req: &ModelRequirements) -> String {
    crate::csvio::write_table(
        &["layer", "ops", "weights", "tensor_elems"],
        req.per_layer.iter().map(|(name, r)| {
            [
                name.clone(),
                r.ops.to_string(),
                r.weights.to_string(),
                r.tensor_elems.to_string(),
            ]
        }),
    )
}
