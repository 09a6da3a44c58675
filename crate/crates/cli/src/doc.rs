//! Point documents: the JSON interchange format for phase-space points.
//!
//! A document carries a schema version, the coupling `(n, x)`, a model tag
//! naming the phase space, and that model's coordinates.  Complex numbers
//! are `[re, im]` pairs; matrices are row-major lists of such pairs.
//! Loading validates the coordinates against the model's constructors, and
//! saving always emits the canonical form (sorted keys, 17-significant-digit
//! floats), so load ∘ save is a byte-level identity.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use dualpair_core::matrix::{CMatrix, CVector};
use dualpair_core::phase::{
    canonicalize_sutherland, CenterMassPointI, CenterMassPointII, Coupling, CoveringPoint1,
    CoveringPoint2, DualCompletedPoint, DualInteriorPoint, RelPoint, SutherlandPoint,
};
use dualpair_core::reduction::LevelPoint;
use dualpair_core::CoreError;
use num_complex::Complex64;
use serde_json::Value;

use crate::canon::{map, Node};

pub const SCHEMA_VERSION: u64 = 1;

/// Errors surfaced by the command layer, tagged with their process exit
/// code: usage problems exit 2, numerical/domain failures exit 3.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Numerical(msg) => write!(f, "{msg}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            // Bad labels and bad couplings come from the command line or the
            // document header, not from the numerics.
            CoreError::InvalidCoupling { .. } | CoreError::InvalidFlowIndex { .. } => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Numerical(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

// ---------------------------------------------------------------------------
// Model tags
// ---------------------------------------------------------------------------

/// The ten phase-space models a document can name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    P,
    Phat,
    PhatC,
    CmI,
    CmII,
    P1I,
    P1II,
    P2I,
    P2II,
    Level,
}

pub const ALL_MODELS: [Model; 10] = [
    Model::P,
    Model::Phat,
    Model::PhatC,
    Model::CmI,
    Model::CmII,
    Model::P1I,
    Model::P1II,
    Model::P2I,
    Model::P2II,
    Model::Level,
];

impl Model {
    pub fn tag(&self) -> &'static str {
        match self {
            Model::P => "P",
            Model::Phat => "Phat",
            Model::PhatC => "PhatC",
            Model::CmI => "CM-I",
            Model::CmII => "CM-II",
            Model::P1I => "P1-I",
            Model::P1II => "P1-II",
            Model::P2I => "P2-I",
            Model::P2II => "P2-II",
            Model::Level => "Level",
        }
    }

    pub fn parse(tag: &str) -> Result<Model> {
        ALL_MODELS
            .iter()
            .copied()
            .find(|m| m.tag() == tag)
            .ok_or_else(|| {
                let tags: Vec<&str> = ALL_MODELS.iter().map(|m| m.tag()).collect();
                usage(format!(
                    "unknown model tag '{tag}' (expected one of: {})",
                    tags.join(", ")
                ))
            })
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

// ---------------------------------------------------------------------------
// Points
// ---------------------------------------------------------------------------

/// A typed phase-space point; the covering variants carry their sector in
/// the relative factor.
#[derive(Debug, Clone)]
pub enum ModelPoint {
    Sutherland(SutherlandPoint),
    DualInterior(DualInteriorPoint),
    DualCompleted(DualCompletedPoint),
    CmI(CenterMassPointI),
    CmII(CenterMassPointII),
    Covering1(CoveringPoint1),
    Covering2(CoveringPoint2),
    Level(LevelPoint),
}

impl ModelPoint {
    pub fn model(&self) -> Model {
        match self {
            ModelPoint::Sutherland(_) => Model::P,
            ModelPoint::DualInterior(_) => Model::Phat,
            ModelPoint::DualCompleted(_) => Model::PhatC,
            ModelPoint::CmI(_) => Model::CmI,
            ModelPoint::CmII(_) => Model::CmII,
            ModelPoint::Covering1(p) => match p.rel {
                RelPoint::I(_) => Model::P1I,
                RelPoint::II(_) => Model::P1II,
            },
            ModelPoint::Covering2(p) => match p.rel {
                RelPoint::I(_) => Model::P2I,
                RelPoint::II(_) => Model::P2II,
            },
            ModelPoint::Level(_) => Model::Level,
        }
    }
}

/// A loaded document: coupling plus typed point.
#[derive(Debug, Clone)]
pub struct PointDocument {
    pub coupling: Coupling,
    pub point: ModelPoint,
}

// ---------------------------------------------------------------------------
// JSON value helpers (loading)
// ---------------------------------------------------------------------------

fn get<'a>(obj: &'a serde_json::Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| usage(format!("document is missing required field '{key}'")))
}

fn as_f64(v: &Value, what: &str) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| usage(format!("field '{what}' must be a number")))
}

fn as_u64(v: &Value, what: &str) -> Result<u64> {
    v.as_u64()
        .ok_or_else(|| usage(format!("field '{what}' must be a nonnegative integer")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| usage(format!("field '{what}' must be an array")))
}

fn as_complex(v: &Value, what: &str) -> Result<Complex64> {
    let pair = as_array(v, what)?;
    if pair.len() != 2 {
        return Err(usage(format!("field '{what}' must be an [re, im] pair")));
    }
    Ok(Complex64::new(
        as_f64(&pair[0], what)?,
        as_f64(&pair[1], what)?,
    ))
}

fn vec_f64(v: &Value, what: &str) -> Result<Vec<f64>> {
    as_array(v, what)?.iter().map(|e| as_f64(e, what)).collect()
}

fn vec_complex(v: &Value, what: &str) -> Result<Vec<Complex64>> {
    as_array(v, what)?
        .iter()
        .map(|e| as_complex(e, what))
        .collect()
}

fn as_cmatrix(v: &Value, n: usize, what: &str) -> Result<CMatrix> {
    let rows = as_array(v, what)?;
    if rows.len() != n {
        return Err(usage(format!("field '{what}' must have {n} rows")));
    }
    let mut m = CMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        let entries = vec_complex(row, what)?;
        if entries.len() != n {
            return Err(usage(format!("field '{what}' row {i} must have {n} entries")));
        }
        for (j, e) in entries.into_iter().enumerate() {
            m[(i, j)] = e;
        }
    }
    Ok(m)
}

fn expect_keys(obj: &serde_json::Map<String, Value>, keys: &[&str], context: &str) -> Result<()> {
    for key in obj.keys() {
        if !keys.contains(&key.as_str()) {
            return Err(usage(format!(
                "unexpected field '{key}' in {context} (expected: {})",
                keys.join(", ")
            )));
        }
    }
    Ok(())
}

fn expect_len<T>(v: Vec<T>, len: usize, what: &str) -> Result<Vec<T>> {
    if v.len() != len {
        return Err(usage(format!(
            "field '{what}' must have {len} entries, got {}",
            v.len()
        )));
    }
    Ok(v)
}

// ---------------------------------------------------------------------------
// Loading
// ---------------------------------------------------------------------------

pub fn load(path: &Path) -> Result<PointDocument> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read '{}': {e}", path.display())))?;
    parse(&text).map_err(|e| match e {
        CliError::Usage(msg) => usage(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse(text: &str) -> Result<PointDocument> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| usage(format!("invalid JSON: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| usage("document root must be a JSON object"))?;
    expect_keys(
        obj,
        &["coordinates", "coupling", "model", "schemaVersion"],
        "document root",
    )?;

    let version = as_u64(get(obj, "schemaVersion")?, "schemaVersion")?;
    if version != SCHEMA_VERSION {
        return Err(usage(format!(
            "unsupported schemaVersion {version} (this build reads version {SCHEMA_VERSION})"
        )));
    }

    let coupling_obj = get(obj, "coupling")?
        .as_object()
        .ok_or_else(|| usage("field 'coupling' must be an object"))?;
    expect_keys(coupling_obj, &["n", "x"], "coupling")?;
    let n = as_u64(get(coupling_obj, "n")?, "coupling.n")? as usize;
    let x = as_f64(get(coupling_obj, "x")?, "coupling.x")?;
    let coupling = Coupling::new(n, x)?;

    let model = Model::parse(
        get(obj, "model")?
            .as_str()
            .ok_or_else(|| usage("field 'model' must be a string"))?,
    )?;

    let coords = get(obj, "coordinates")?
        .as_object()
        .ok_or_else(|| usage("field 'coordinates' must be an object"))?;
    let point = parse_coordinates(model, coords, &coupling)?;
    Ok(PointDocument { coupling, point })
}

fn parse_coordinates(
    model: Model,
    coords: &serde_json::Map<String, Value>,
    c: &Coupling,
) -> Result<ModelPoint> {
    let n = c.n;
    match model {
        Model::P => {
            expect_keys(coords, &["p", "q"], "P coordinates")?;
            let q = expect_len(vec_f64(get(coords, "q")?, "q")?, n, "q")?;
            let p = expect_len(vec_f64(get(coords, "p")?, "p")?, n, "p")?;
            Ok(ModelPoint::Sutherland(canonicalize_sutherland(&q, &p)?))
        }
        Model::Phat => {
            expect_keys(coords, &["phat", "qhat"], "Phat coordinates")?;
            let qhat = expect_len(vec_f64(get(coords, "qhat")?, "qhat")?, n, "qhat")?;
            let phat = expect_len(vec_f64(get(coords, "phat")?, "phat")?, n, "phat")?;
            Ok(ModelPoint::DualInterior(DualInteriorPoint::new(
                &qhat, &phat, c,
            )?))
        }
        Model::PhatC => {
            expect_keys(coords, &["bigZ", "z"], "PhatC coordinates")?;
            let z = expect_len(vec_complex(get(coords, "z")?, "z")?, n - 1, "z")?;
            let big_z = as_complex(get(coords, "bigZ")?, "bigZ")?;
            Ok(ModelPoint::DualCompleted(DualCompletedPoint::new(
                z, big_z,
            )?))
        }
        Model::CmI => {
            expect_keys(coords, &["delta", "gamma"], "CM-I coordinates")?;
            let delta = expect_len(vec_f64(get(coords, "delta")?, "delta")?, n - 1, "delta")?;
            let gamma = expect_len(vec_f64(get(coords, "gamma")?, "gamma")?, n - 1, "gamma")?;
            Ok(ModelPoint::CmI(CenterMassPointI::new(delta, gamma)?))
        }
        Model::CmII => {
            expect_keys(coords, &["zeta"], "CM-II coordinates")?;
            let zeta = expect_len(vec_complex(get(coords, "zeta")?, "zeta")?, n - 1, "zeta")?;
            Ok(ModelPoint::CmII(CenterMassPointII::new(zeta)))
        }
        Model::P1I => {
            expect_keys(coords, &["delta", "gamma", "v0", "zeta0"], "P1-I coordinates")?;
            let delta = expect_len(vec_f64(get(coords, "delta")?, "delta")?, n - 1, "delta")?;
            let gamma = expect_len(vec_f64(get(coords, "gamma")?, "gamma")?, n - 1, "gamma")?;
            let zeta0 = as_complex(get(coords, "zeta0")?, "zeta0")?;
            let v0 = as_f64(get(coords, "v0")?, "v0")?;
            let rel = RelPoint::I(CenterMassPointI::new(delta, gamma)?);
            Ok(ModelPoint::Covering1(CoveringPoint1::new(zeta0, v0, rel)?))
        }
        Model::P1II => {
            expect_keys(coords, &["v0", "zeta", "zeta0"], "P1-II coordinates")?;
            let zeta = expect_len(vec_complex(get(coords, "zeta")?, "zeta")?, n - 1, "zeta")?;
            let zeta0 = as_complex(get(coords, "zeta0")?, "zeta0")?;
            let v0 = as_f64(get(coords, "v0")?, "v0")?;
            let rel = RelPoint::II(CenterMassPointII::new(zeta));
            Ok(ModelPoint::Covering1(CoveringPoint1::new(zeta0, v0, rel)?))
        }
        Model::P2I => {
            expect_keys(coords, &["delta", "gamma", "u0", "w0"], "P2-I coordinates")?;
            let delta = expect_len(vec_f64(get(coords, "delta")?, "delta")?, n - 1, "delta")?;
            let gamma = expect_len(vec_f64(get(coords, "gamma")?, "gamma")?, n - 1, "gamma")?;
            let u0 = as_f64(get(coords, "u0")?, "u0")?;
            let w0 = as_f64(get(coords, "w0")?, "w0")?;
            let rel = RelPoint::I(CenterMassPointI::new(delta, gamma)?);
            Ok(ModelPoint::Covering2(CoveringPoint2 { u0, w0, rel }))
        }
        Model::P2II => {
            expect_keys(coords, &["u0", "w0", "zeta"], "P2-II coordinates")?;
            let zeta = expect_len(vec_complex(get(coords, "zeta")?, "zeta")?, n - 1, "zeta")?;
            let u0 = as_f64(get(coords, "u0")?, "u0")?;
            let w0 = as_f64(get(coords, "w0")?, "w0")?;
            let rel = RelPoint::II(CenterMassPointII::new(zeta));
            Ok(ModelPoint::Covering2(CoveringPoint2 { u0, w0, rel }))
        }
        Model::Level => {
            expect_keys(coords, &["g", "j", "v"], "Level coordinates")?;
            let g = as_cmatrix(get(coords, "g")?, n, "g")?;
            let j = as_cmatrix(get(coords, "j")?, n, "j")?;
            let v = expect_len(vec_complex(get(coords, "v")?, "v")?, n, "v")?;
            Ok(ModelPoint::Level(LevelPoint {
                g,
                j,
                v: CVector::from_vec(v),
            }))
        }
    }
}

// ---------------------------------------------------------------------------
// Saving
// ---------------------------------------------------------------------------

fn complex_node(z: Complex64) -> Node {
    Node::complex(z.re, z.im)
}

fn complex_list(zs: &[Complex64]) -> Node {
    Node::List(zs.iter().map(|z| complex_node(*z)).collect())
}

fn cmatrix_node(m: &CMatrix) -> Node {
    Node::List(
        (0..m.nrows())
            .map(|i| Node::List((0..m.ncols()).map(|j| complex_node(m[(i, j)])).collect()))
            .collect(),
    )
}

fn coordinates_node(point: &ModelPoint) -> Node {
    match point {
        ModelPoint::Sutherland(p) => map(vec![
            ("p", Node::floats(&p.p)),
            ("q", Node::floats(&p.q)),
        ]),
        ModelPoint::DualInterior(p) => map(vec![
            ("phat", Node::floats(&p.phat)),
            ("qhat", Node::floats(&p.qhat)),
        ]),
        ModelPoint::DualCompleted(p) => map(vec![
            ("bigZ", complex_node(p.big_z)),
            ("z", complex_list(&p.z)),
        ]),
        ModelPoint::CmI(p) => map(vec![
            ("delta", Node::floats(&p.delta)),
            ("gamma", Node::floats(&p.gamma)),
        ]),
        ModelPoint::CmII(p) => map(vec![("zeta", complex_list(&p.zeta))]),
        ModelPoint::Covering1(p) => {
            let mut entries = vec![
                ("v0", Node::Float(p.v0)),
                ("zeta0", complex_node(p.zeta0)),
            ];
            match &p.rel {
                RelPoint::I(r) => {
                    entries.push(("delta", Node::floats(&r.delta)));
                    entries.push(("gamma", Node::floats(&r.gamma)));
                }
                RelPoint::II(r) => entries.push(("zeta", complex_list(&r.zeta))),
            }
            map(entries)
        }
        ModelPoint::Covering2(p) => {
            let mut entries = vec![("u0", Node::Float(p.u0)), ("w0", Node::Float(p.w0))];
            match &p.rel {
                RelPoint::I(r) => {
                    entries.push(("delta", Node::floats(&r.delta)));
                    entries.push(("gamma", Node::floats(&r.gamma)));
                }
                RelPoint::II(r) => entries.push(("zeta", complex_list(&r.zeta))),
            }
            map(entries)
        }
        ModelPoint::Level(p) => map(vec![
            ("g", cmatrix_node(&p.g)),
            ("j", cmatrix_node(&p.j)),
            ("v", complex_list(p.v.as_slice())),
        ]),
    }
}

/// Renders the canonical JSON text for a document.
pub fn save_string(doc: &PointDocument) -> String {
    let coupling = Node::Map(BTreeMap::from([
        ("n".to_string(), Node::Int(doc.coupling.n as u64)),
        ("x".to_string(), Node::Float(doc.coupling.x)),
    ]));
    map(vec![
        ("coordinates", coordinates_node(&doc.point)),
        ("coupling", coupling),
        ("model", Node::Text(doc.point.model().tag().to_string())),
        ("schemaVersion", Node::Int(SCHEMA_VERSION)),
    ])
    .render()
}

/// Writes the canonical form to `path`, or to stdout when `path` is `None`.
pub fn emit(doc: &PointDocument, path: Option<&Path>) -> Result<()> {
    let text = save_string(doc);
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| usage(format!("cannot write '{}': {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
