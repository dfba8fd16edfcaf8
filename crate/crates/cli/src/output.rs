use std::io;

use effres::kron::ReductionResult;
use effres::partition::Bisection;
use effres::report::CheckReport;
use effres::symmetrize::{Decomposition, DecompositionResiduals, SymmetrizationReport};
use nalgebra::DMatrix;
use serde::Serialize;
use serde_json::ser::Formatter;

/// Pretty JSON with every float written as `{:.16e}` (17 significant
/// digits), so equal inputs give byte-identical files.
struct FixedFloat(serde_json::ser::PrettyFormatter<'static>);

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*)),* $(,)?) => {
        $(
            fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
                self.0.$name(w $(, $arg)*)
            }
        )*
    };
}

impl Formatter for FixedFloat {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    delegate!(
        begin_array(),
        end_array(),
        begin_array_value(first: bool),
        end_array_value(),
        begin_object(),
        end_object(),
        begin_object_key(first: bool),
        begin_object_value(),
        end_object_value(),
    );
}

/// Serializes `value` with fixed float formatting and a trailing newline.
/// Non-finite floats become `null`.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloat(Default::default()));
    value.serialize(&mut ser).expect("serializing to memory cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

#[derive(Serialize)]
pub struct LabeledMatrix {
    n: usize,
    labels: Vec<u64>,
    matrix: Vec<Vec<f64>>,
}

impl LabeledMatrix {
    pub fn new(labels: &[u64], m: &DMatrix<f64>) -> Self {
        Self {
            n: labels.len(),
            labels: labels.to_vec(),
            matrix: rows(m),
        }
    }
}

#[derive(Serialize)]
pub struct DecomposeOutput {
    n: usize,
    labels: Vec<u64>,
    h: Vec<Vec<f64>>,
    k: Vec<Vec<f64>>,
    s: Vec<Vec<f64>>,
    sym_laplacian: Vec<Vec<f64>>,
    residuals: DecompositionResiduals,
}

impl DecomposeOutput {
    pub fn new(labels: &[u64], d: &Decomposition, residuals: DecompositionResiduals) -> Self {
        Self {
            n: labels.len(),
            labels: labels.to_vec(),
            h: rows(&d.h_matrix),
            k: rows(&d.k_matrix),
            s: rows(&d.s_matrix),
            sym_laplacian: rows(d.sym_laplacian.matrix()),
            residuals,
        }
    }
}

#[derive(Serialize)]
pub struct BisectOutput {
    n: usize,
    labels: Vec<u64>,
    /// Labels on the side where the Fiedler vector is positive.
    partition: Vec<u64>,
    complement: Vec<u64>,
    urc: f64,
    drc: f64,
    bounds: [f64; 2],
    urc_quadratic: f64,
    expansion_bound: f64,
    fiedler_value: f64,
    multiplicity: usize,
    unique: bool,
    fiedler: Vec<f64>,
}

impl BisectOutput {
    pub fn new(labels: &[u64], b: &Bisection) -> Self {
        let pick = |ids: Vec<usize>| ids.into_iter().map(|i| labels[i]).collect();
        Self {
            n: labels.len(),
            labels: labels.to_vec(),
            partition: pick(b.partition.members()),
            complement: pick(b.partition.complement_members()),
            urc: b.urc_value,
            drc: b.drc_value,
            bounds: [b.bounds.0, b.bounds.1],
            urc_quadratic: b.urc_quadratic,
            expansion_bound: b.expansion_bound,
            fiedler_value: b.fiedler_value,
            multiplicity: b.multiplicity,
            unique: b.is_unique(),
            fiedler: b.fiedler.iter().copied().collect(),
        }
    }
}

#[derive(Serialize)]
pub struct KronOutput {
    kept: Vec<u64>,
    condition: f64,
    reduced_sym: LabeledMatrix,
    reduced_directed: LabeledMatrix,
    reduced_h: LabeledMatrix,
    reduced_k: LabeledMatrix,
    validation: CheckReport,
}

impl KronOutput {
    pub fn new(labels: &[u64], r: &ReductionResult) -> Self {
        let kept: Vec<u64> = r.kept.iter().map(|&i| labels[i]).collect();
        Self {
            condition: r.condition,
            reduced_sym: LabeledMatrix::new(&kept, r.reduced_sym.matrix()),
            reduced_directed: LabeledMatrix::new(&kept, r.reduced_directed.matrix()),
            reduced_h: LabeledMatrix::new(&kept, &r.reduced_h),
            reduced_k: LabeledMatrix::new(&kept, &r.reduced_k),
            validation: r.validation.clone(),
            kept,
        }
    }
}

#[derive(Serialize)]
pub struct VerifyOutput<'a> {
    pub n: usize,
    pub labels: &'a [u64],
    pub tolerance: f64,
    pub passed: bool,
    pub report: &'a SymmetrizationReport,
}
