//! Problem data, evaluation and the instance document format.
//!
//! An instance is
//!
//! ```text
//! minimize    f(x) = xᵀAx + 2aᵀx
//! subject to  g(x) = xᵀBx + 2bᵀx + c  (≤ | =)  0
//! ```
//!
//! Note the factor of two on both linear terms: the document stores `a` and
//! `b`, not `2a` and `2b`.
//!
//! # Document format
//!
//! Instances are TOML documents:
//!
//! ```toml
//! n = 2
//! sense = "eq"          # "le" for g(x) ≤ 0, "eq" for g(x) = 0
//! A = [[1.0, 0.0], [0.0, 1.0]]
//! a = [6.0, 4.0]        # objective linear term is 2aᵀx
//! B = [[0.0, 0.5], [0.5, 0.0]]
//! b = [0.0, 0.0]        # constraint linear term is 2bᵀx
//! c = -1.0
//! ```
//!
//! Matrices are either nested rows or a flat row-major list of `n²` numbers.
//! Integers are accepted wherever a number is expected. A complex instance
//! is given as a `[complex]` table (see [`crate::complex`]); when the real
//! keys are absent the real embedding is built from it.

use std::fmt::Write as _;

use log::warn;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::complex::ComplexGtrsInstance;
use crate::error::{GtrsError, Result};
use crate::tolerances::Tolerances;

/// Whether the constraint is `g(x) ≤ 0` or `g(x) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = "le")]
    Inequality,
    #[serde(rename = "eq")]
    Equality,
}

impl Sense {
    pub fn as_str(self) -> &'static str {
        match self {
            Sense::Inequality => "le",
            Sense::Equality => "eq",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "le" => Ok(Sense::Inequality),
            "eq" => Ok(Sense::Equality),
            other => Err(GtrsError::Parse(format!(
                "sense must be \"le\" or \"eq\", got {other:?}"
            ))),
        }
    }
}

impl std::fmt::Display for Sense {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A validated instance. Matrices are symmetric and the constraint matrix is
/// nonzero. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct GtrsInstance {
    obj_matrix: DMatrix<f64>,
    obj_linear: DVector<f64>,
    con_matrix: DMatrix<f64>,
    con_linear: DVector<f64>,
    con_constant: f64,
    sense: Sense,
    complex_origin: Option<ComplexGtrsInstance>,
}

impl GtrsInstance {
    /// Validates dimensions, symmetrizes both matrices and rejects a zero
    /// constraint matrix.
    pub fn new(
        obj_matrix: DMatrix<f64>,
        obj_linear: DVector<f64>,
        con_matrix: DMatrix<f64>,
        con_linear: DVector<f64>,
        con_constant: f64,
        sense: Sense,
    ) -> Result<Self> {
        let n = obj_linear.len();
        if n == 0 {
            return Err(GtrsError::Parse("dimension must be positive".into()));
        }
        check_square("A", &obj_matrix, n)?;
        check_square("B", &con_matrix, n)?;
        check_len("b", &con_linear, n)?;
        let all_finite = obj_matrix.iter().chain(con_matrix.iter()).all(|v| v.is_finite())
            && obj_linear.iter().chain(con_linear.iter()).all(|v| v.is_finite())
            && con_constant.is_finite();
        if !all_finite {
            return Err(GtrsError::Parse("all data must be finite".into()));
        }
        let obj_matrix = symmetrize("A", obj_matrix);
        let con_matrix = symmetrize("B", con_matrix);
        if con_matrix.iter().all(|&v| v == 0.0) {
            return Err(GtrsError::LinearConstraint);
        }
        Ok(Self {
            obj_matrix,
            obj_linear,
            con_matrix,
            con_linear,
            con_constant,
            sense,
            complex_origin: None,
        })
    }

    pub(crate) fn with_complex_origin(mut self, origin: ComplexGtrsInstance) -> Self {
        self.complex_origin = Some(origin);
        self
    }

    pub fn dim(&self) -> usize {
        self.obj_linear.len()
    }

    /// Objective Hessian `A` (the quadratic form is `xᵀAx`).
    pub fn obj_matrix(&self) -> &DMatrix<f64> {
        &self.obj_matrix
    }

    /// Objective linear vector `a` (the linear term is `2aᵀx`).
    pub fn obj_linear(&self) -> &DVector<f64> {
        &self.obj_linear
    }

    pub fn con_matrix(&self) -> &DMatrix<f64> {
        &self.con_matrix
    }

    pub fn con_linear(&self) -> &DVector<f64> {
        &self.con_linear
    }

    pub fn con_constant(&self) -> f64 {
        self.con_constant
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn complex_origin(&self) -> Option<&ComplexGtrsInstance> {
        self.complex_origin.as_ref()
    }

    /// Same data with the other constraint sense.
    pub fn with_sense(&self, sense: Sense) -> Self {
        Self {
            sense,
            ..self.clone()
        }
    }

    /// `f(x) = xᵀAx + 2aᵀx`.
    pub fn eval_objective(&self, x: &DVector<f64>) -> Result<f64> {
        check_len("x", x, self.dim())?;
        Ok(quad(&self.obj_matrix, &self.obj_linear, 0.0, x))
    }

    /// `g(x) = xᵀBx + 2bᵀx + c`.
    pub fn eval_constraint(&self, x: &DVector<f64>) -> Result<f64> {
        check_len("x", x, self.dim())?;
        Ok(quad(
            &self.con_matrix,
            &self.con_linear,
            self.con_constant,
            x,
        ))
    }

    /// `∇f(x) = 2(Ax + a)`.
    pub fn objective_gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        (&self.obj_matrix * x + &self.obj_linear) * 2.0
    }

    /// `∇g(x) = 2(Bx + b)`.
    pub fn constraint_gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        (&self.con_matrix * x + &self.con_linear) * 2.0
    }

    /// `A + λB`.
    pub fn pencil(&self, lambda: f64) -> DMatrix<f64> {
        &self.obj_matrix + &self.con_matrix * lambda
    }

    /// Stationarity residual `‖(A+λB)x + a + λb‖`.
    pub fn kkt_residual(&self, x: &DVector<f64>, lambda: f64) -> f64 {
        (self.pencil(lambda) * x + &self.obj_linear + &self.con_linear * lambda).norm()
    }

    /// Scale against which the stationarity residual is judged.
    pub fn kkt_scale(&self, x: &DVector<f64>, lambda: f64) -> f64 {
        1.0 + (self.obj_matrix.norm() + lambda.abs() * self.con_matrix.norm()) * x.norm()
            + self.obj_linear.norm()
            + lambda.abs() * self.con_linear.norm()
    }

    /// Scale against which `|g(x)|` is judged.
    pub fn constraint_scale(&self, x: &DVector<f64>) -> f64 {
        let r = x.norm();
        1.0 + self.con_matrix.norm() * r * r + 2.0 * self.con_linear.norm() * r
            + self.con_constant.abs()
    }

    /// Parses an instance document.
    pub fn parse(text: &str) -> Result<Self> {
        let table: Table = text
            .parse()
            .map_err(|e: toml::de::Error| GtrsError::Parse(e.to_string()))?;
        let complex = match table.get("complex") {
            Some(Value::Table(t)) => Some(ComplexGtrsInstance::from_table(t)?),
            Some(_) => return Err(GtrsError::Parse("`complex` must be a table".into())),
            None => None,
        };
        if !table.contains_key("A") {
            return match complex {
                Some(c) => c.embed(),
                None => Err(GtrsError::Parse("missing key `A`".into())),
            };
        }
        let n = get_dim(&table, "n")?;
        let inst = Self::new(
            get_matrix(&table, "A", n)?,
            get_vector(&table, "a", n)?,
            get_matrix(&table, "B", n)?,
            get_vector(&table, "b", n)?,
            get_number(&table, "c")?,
            Sense::parse(get_str(&table, "sense")?)?,
        )?;
        Ok(match complex {
            Some(c) => inst.with_complex_origin(c),
            None => inst,
        })
    }

    /// Writes the instance document. Floats are written in shortest
    /// round-trip form, so `parse(to_document(x)) == x` bit for bit.
    pub fn to_document(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# objective xᵀAx + 2aᵀx; constraint xᵀBx + 2bᵀx + c");
        let _ = writeln!(out, "n = {}", self.dim());
        let _ = writeln!(out, "sense = \"{}\"", self.sense);
        write_matrix(&mut out, "A", &self.obj_matrix);
        write_vector(&mut out, "a", &self.obj_linear);
        write_matrix(&mut out, "B", &self.con_matrix);
        write_vector(&mut out, "b", &self.con_linear);
        let _ = writeln!(out, "c = {}", fmt_f64(self.con_constant));
        if let Some(c) = &self.complex_origin {
            out.push('\n');
            c.write_table(&mut out);
        }
        out
    }
}

fn quad(m: &DMatrix<f64>, lin: &DVector<f64>, constant: f64, x: &DVector<f64>) -> f64 {
    x.dot(&(m * x)) + 2.0 * lin.dot(x) + constant
}

/// `(M + Mᵀ)/2`, leaving already-symmetric pairs untouched so symmetric input
/// is reproduced bit for bit.
fn symmetrize(name: &str, mut m: DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let mut asym = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            let (u, l) = (m[(i, j)], m[(j, i)]);
            if u != l {
                asym = asym.max((u - l).abs());
                let avg = 0.5 * u + 0.5 * l;
                m[(i, j)] = avg;
                m[(j, i)] = avg;
            }
        }
    }
    if asym > Tolerances::default().symmetry_warn {
        warn!("{name} is asymmetric by {asym:e}; using (M + Mᵀ)/2");
    }
    m
}

pub(crate) fn check_square(what: &'static str, m: &DMatrix<f64>, n: usize) -> Result<()> {
    if m.nrows() != n {
        return Err(GtrsError::DimensionMismatch {
            what,
            expected: n,
            found: m.nrows(),
        });
    }
    if m.ncols() != n {
        return Err(GtrsError::DimensionMismatch {
            what,
            expected: n,
            found: m.ncols(),
        });
    }
    Ok(())
}

pub(crate) fn check_len(what: &'static str, v: &DVector<f64>, n: usize) -> Result<()> {
    if v.len() != n {
        return Err(GtrsError::DimensionMismatch {
            what,
            expected: n,
            found: v.len(),
        });
    }
    Ok(())
}

/// Shortest round-trip decimal text that is also a valid TOML float.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e15).contains(&a) {
        let s = format!("{v}");
        if s.contains('.') {
            s
        } else {
            format!("{s}.0")
        }
    } else {
        format!("{v:e}")
    }
}

pub(crate) fn write_vector(out: &mut String, key: &str, v: &DVector<f64>) {
    let items: Vec<String> = v.iter().map(|&x| fmt_f64(x)).collect();
    let _ = writeln!(out, "{key} = [{}]", items.join(", "));
}

pub(crate) fn write_matrix(out: &mut String, key: &str, m: &DMatrix<f64>) {
    let _ = writeln!(out, "{key} = [");
    for i in 0..m.nrows() {
        let row: Vec<String> = m.row(i).iter().map(|&x| fmt_f64(x)).collect();
        let _ = writeln!(out, "  [{}],", row.join(", "));
    }
    let _ = writeln!(out, "]");
}

fn as_number(key: &str, v: &Value) -> Result<f64> {
    let x = match v {
        Value::Float(f) => *f,
        Value::Integer(i) => *i as f64,
        other => {
            return Err(GtrsError::Parse(format!(
                "`{key}`: expected a number, found {}",
                other.type_str()
            )))
        }
    };
    if !x.is_finite() {
        return Err(GtrsError::Parse(format!("`{key}`: non-finite number")));
    }
    Ok(x)
}

pub(crate) fn get<'a>(t: &'a Table, key: &str) -> Result<&'a Value> {
    t.get(key)
        .ok_or_else(|| GtrsError::Parse(format!("missing key `{key}`")))
}

pub(crate) fn get_number(t: &Table, key: &str) -> Result<f64> {
    as_number(key, get(t, key)?)
}

pub(crate) fn get_str<'a>(t: &'a Table, key: &str) -> Result<&'a str> {
    get(t, key)?
        .as_str()
        .ok_or_else(|| GtrsError::Parse(format!("`{key}` must be a string")))
}

pub(crate) fn get_dim(t: &Table, key: &str) -> Result<usize> {
    match get(t, key)? {
        Value::Integer(i) if *i > 0 => Ok(*i as usize),
        _ => Err(GtrsError::Parse(format!("`{key}` must be a positive integer"))),
    }
}

fn as_array<'a>(key: &str, v: &'a Value) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| GtrsError::Parse(format!("`{key}` must be an array")))
}

pub(crate) fn get_vector(t: &Table, key: &'static str, n: usize) -> Result<DVector<f64>> {
    let arr = as_array(key, get(t, key)?)?;
    if arr.len() != n {
        return Err(GtrsError::DimensionMismatch {
            what: key,
            expected: n,
            found: arr.len(),
        });
    }
    let vals = arr
        .iter()
        .map(|v| as_number(key, v))
        .collect::<Result<Vec<_>>>()?;
    Ok(DVector::from_vec(vals))
}

pub(crate) fn get_matrix(t: &Table, key: &'static str, n: usize) -> Result<DMatrix<f64>> {
    let arr = as_array(key, get(t, key)?)?;
    let nested = arr.iter().any(|v| v.is_array());
    let flat: Vec<f64> = if nested {
        if arr.len() != n {
            return Err(GtrsError::DimensionMismatch {
                what: key,
                expected: n,
                found: arr.len(),
            });
        }
        let mut flat = Vec::with_capacity(n * n);
        for row in arr {
            let row = as_array(key, row)?;
            if row.len() != n {
                return Err(GtrsError::DimensionMismatch {
                    what: key,
                    expected: n,
                    found: row.len(),
                });
            }
            for v in row {
                flat.push(as_number(key, v)?);
            }
        }
        flat
    } else {
        if arr.len() != n * n {
            return Err(GtrsError::DimensionMismatch {
                what: key,
                expected: n * n,
                found: arr.len(),
            });
        }
        arr.iter()
            .map(|v| as_number(key, v))
            .collect::<Result<Vec<_>>>()?
    };
    Ok(DMatrix::from_row_slice(n, n, &flat))
}
