//! State, channel and unitary files, plus the JSON writer.
//!
//! Matrices are nested arrays of `[re, im]` pairs, row-major. Bipartite
//! indices are a-major: row `i * d_b + j` is `|i>_a |j>_b`.

use std::io::Write;
use std::path::Path;

use coherence_core::channels::{channel_from_kraus, COMPLETENESS_TOL};
use coherence_core::states::{density_from_matrix, STATE_TOL};
use coherence_core::{BipartiteState, ComplexMatrix, KrausChannel, C64};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub type MatrixRows = Vec<Vec<[f64; 2]>>;

pub fn encode_matrix(m: &ComplexMatrix) -> MatrixRows {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn decode_matrix(rows: &MatrixRows) -> Result<ComplexMatrix, CliError> {
    let n = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    if n == 0 || rows.iter().any(|r| r.len() != cols) {
        return Err(CliError::input("matrix rows are empty or ragged"));
    }
    let data = rows.iter().flatten().map(|&[re, im]| C64::new(re, im)).collect();
    ComplexMatrix::new(n, cols, data).map_err(CliError::from_input)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub matrix: MatrixRows,
}

impl StateFile {
    pub fn from_state(rho: &BipartiteState) -> Self {
        let dims = if rho.d_b() == 1 { vec![rho.d_a()] } else { vec![rho.d_a(), rho.d_b()] };
        Self {
            dims,
            matrix: encode_matrix(rho.matrix()),
        }
    }

    /// Validated state; single-system files get `d_b = 1`.
    pub fn to_state(&self) -> Result<BipartiteState, CliError> {
        let (d_a, d_b) = match self.dims[..] {
            [d] => (d, 1),
            [a, b] => (a, b),
            _ => return Err(CliError::input("dims must have length 1 or 2")),
        };
        let m = decode_matrix(&self.matrix)?;
        if m.rows() != m.cols() || m.rows() != d_a * d_b {
            return Err(CliError::input(format!(
                "matrix is {}x{} but dims {:?} need side {}",
                m.rows(),
                m.cols(),
                self.dims,
                d_a * d_b
            )));
        }
        let rho = density_from_matrix(m, STATE_TOL).map_err(CliError::from_input)?;
        BipartiteState::new(rho, d_a, d_b).map_err(CliError::from_input)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelFile {
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<MatrixRows>,
}

impl ChannelFile {
    pub fn from_channel(ch: &KrausChannel) -> Self {
        Self {
            dim_in: ch.dim_in(),
            dim_out: ch.dim_out(),
            kraus: ch.kraus().iter().map(encode_matrix).collect(),
        }
    }

    pub fn to_channel(&self) -> Result<KrausChannel, CliError> {
        let ops = self.kraus.iter().map(decode_matrix).collect::<Result<Vec<_>, _>>()?;
        if let Some(k) = ops.iter().find(|k| k.rows() != self.dim_out || k.cols() != self.dim_in) {
            return Err(CliError::input(format!(
                "Kraus operator is {}x{}, expected {}x{}",
                k.rows(),
                k.cols(),
                self.dim_out,
                self.dim_in
            )));
        }
        channel_from_kraus(ops, COMPLETENESS_TOL).map_err(CliError::from_input)
    }
}

/// Measurement basis file: columns of `matrix` are the basis vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitaryFile {
    pub matrix: MatrixRows,
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("malformed {}: {e}", path.display())))
}

/// Formatter that writes every float with 17 significant digits so values
/// survive a write-read-write cycle unchanged.
struct Exact(serde_json::ser::PrettyFormatter<'static>);

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*);)*) => {
        $(fn $name<W: ?Sized + Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> std::io::Result<()> {
            self.0.$name(w $(, $arg)*)
        })*
    };
}

impl serde_json::ser::Formatter for Exact {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> std::io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> std::io::Result<()> {
        self.write_f64(w, f64::from(value))
    }

    delegate! {
        begin_array();
        end_array();
        begin_array_value(first: bool);
        end_array_value();
        begin_object();
        end_object();
        begin_object_key(first: bool);
        begin_object_value();
        end_object_value();
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String, CliError> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Exact(serde_json::ser::PrettyFormatter::new()));
    value.serialize(&mut ser).map_err(|e| CliError::numerical(format!("serialization failed: {e}")))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

pub fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::input(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
