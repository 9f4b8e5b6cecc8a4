//! Complex Hermitian instances through their real embedding.
//!
//! With `z = u + iv`, `A = A_re + iA_im` Hermitian and `w = (u, v)`,
//!
//! ```text
//! zᴴAz + 2Re(aᴴz) = wᵀ[[A_re, −A_im], [A_im, A_re]]w + 2(a_re, a_im)ᵀw
//! ```
//!
//! so the complex problem is a real one of twice the dimension. Every
//! eigenvalue of the embedded `A + λB` has even multiplicity, which rules out
//! local nonglobal minimizers (those need exactly one negative eigenvalue).

use std::fmt::Write as _;

use nalgebra::{Complex, DMatrix, DVector};
use serde::Serialize;
use toml::{Table, Value};

use crate::error::{GtrsError, Result};
use crate::instance::{
    check_len, check_square, get_dim, get_matrix, get_number, get_str, get_vector, write_matrix,
    write_vector, GtrsInstance, Sense,
};
use crate::report::{solve, SolveReport};
use crate::serde_util;
use crate::tolerances::Tolerances;

const HERMITIAN_TOL: f64 = 1e-12;
const PAIRING_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexGtrsInstance {
    obj_re: DMatrix<f64>,
    obj_im: DMatrix<f64>,
    con_re: DMatrix<f64>,
    con_im: DMatrix<f64>,
    obj_lin_re: DVector<f64>,
    obj_lin_im: DVector<f64>,
    con_lin_re: DVector<f64>,
    con_lin_im: DVector<f64>,
    con_constant: f64,
    sense: Sense,
}

/// Makes `re + i·im` exactly Hermitian, failing if it is far from it.
fn hermitian_part(
    what: &'static str,
    mut re: DMatrix<f64>,
    mut im: DMatrix<f64>,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = re.nrows();
    let scale = 1.0 + re.amax().max(im.amax());
    for i in 0..n {
        if im[(i, i)].abs() > HERMITIAN_TOL * scale {
            return Err(GtrsError::NotHermitian(what));
        }
        im[(i, i)] = 0.0;
        for j in i + 1..n {
            let (u, l) = (re[(i, j)], re[(j, i)]);
            let (p, q) = (im[(i, j)], im[(j, i)]);
            if (u - l).abs() > HERMITIAN_TOL * scale || (p + q).abs() > HERMITIAN_TOL * scale {
                return Err(GtrsError::NotHermitian(what));
            }
            if u != l {
                re[(i, j)] = 0.5 * u + 0.5 * l;
                re[(j, i)] = re[(i, j)];
            }
            if p != -q {
                im[(i, j)] = 0.5 * p - 0.5 * q;
                im[(j, i)] = -im[(i, j)];
            }
        }
    }
    Ok((re, im))
}

/// `[[re, −im], [im, re]]`.
pub fn embed_matrix(re: &DMatrix<f64>, im: &DMatrix<f64>) -> DMatrix<f64> {
    let n = re.nrows();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(re);
    m.view_mut((n, n), (n, n)).copy_from(re);
    m.view_mut((0, n), (n, n)).copy_from(&(-im));
    m.view_mut((n, 0), (n, n)).copy_from(im);
    m
}

fn stack(re: &DVector<f64>, im: &DVector<f64>) -> DVector<f64> {
    DVector::from_iterator(re.len() + im.len(), re.iter().chain(im.iter()).copied())
}

fn to_complex(re: &DMatrix<f64>, im: &DMatrix<f64>) -> DMatrix<Complex<f64>> {
    DMatrix::from_fn(re.nrows(), re.ncols(), |i, j| Complex::new(re[(i, j)], im[(i, j)]))
}

fn hermitian_form(
    m: &DMatrix<Complex<f64>>,
    lin_re: &DVector<f64>,
    lin_im: &DVector<f64>,
    z: &DVector<Complex<f64>>,
) -> f64 {
    let quad = z.dotc(&(m * z)).re;
    let lin: f64 = (0..z.len())
        .map(|i| (Complex::new(lin_re[i], lin_im[i]).conj() * z[i]).re)
        .sum();
    quad + 2.0 * lin
}

impl ComplexGtrsInstance {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        obj_re: DMatrix<f64>,
        obj_im: DMatrix<f64>,
        obj_lin_re: DVector<f64>,
        obj_lin_im: DVector<f64>,
        con_re: DMatrix<f64>,
        con_im: DMatrix<f64>,
        con_lin_re: DVector<f64>,
        con_lin_im: DVector<f64>,
        con_constant: f64,
        sense: Sense,
    ) -> Result<Self> {
        let n = obj_re.nrows();
        if n == 0 {
            return Err(GtrsError::Parse("dimension must be positive".into()));
        }
        check_square("A_re", &obj_re, n)?;
        check_square("A_im", &obj_im, n)?;
        check_square("B_re", &con_re, n)?;
        check_square("B_im", &con_im, n)?;
        check_len("a_re", &obj_lin_re, n)?;
        check_len("a_im", &obj_lin_im, n)?;
        check_len("b_re", &con_lin_re, n)?;
        check_len("b_im", &con_lin_im, n)?;
        let finite = [&obj_re, &obj_im, &con_re, &con_im]
            .iter()
            .all(|m| m.iter().all(|v| v.is_finite()))
            && [&obj_lin_re, &obj_lin_im, &con_lin_re, &con_lin_im]
                .iter()
                .all(|v| v.iter().all(|x| x.is_finite()))
            && con_constant.is_finite();
        if !finite {
            return Err(GtrsError::Parse("non-finite entry".into()));
        }
        let (obj_re, obj_im) = hermitian_part("A", obj_re, obj_im)?;
        let (con_re, con_im) = hermitian_part("B", con_re, con_im)?;
        if con_re.iter().chain(con_im.iter()).all(|&v| v == 0.0) {
            return Err(GtrsError::LinearConstraint);
        }
        Ok(Self {
            obj_re,
            obj_im,
            con_re,
            con_im,
            obj_lin_re,
            obj_lin_im,
            con_lin_re,
            con_lin_im,
            con_constant,
            sense,
        })
    }

    /// Complex dimension.
    pub fn dim(&self) -> usize {
        self.obj_re.nrows()
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    /// The real instance in `w = (Re z, Im z)`.
    pub fn embed(&self) -> Result<GtrsInstance> {
        Ok(GtrsInstance::new(
            embed_matrix(&self.obj_re, &self.obj_im),
            stack(&self.obj_lin_re, &self.obj_lin_im),
            embed_matrix(&self.con_re, &self.con_im),
            stack(&self.con_lin_re, &self.con_lin_im),
            self.con_constant,
            self.sense,
        )?
        .with_complex_origin(self.clone()))
    }

    /// `zᴴAz + 2Re(aᴴz)`, in complex arithmetic.
    pub fn eval_objective(&self, z: &DVector<Complex<f64>>) -> Result<f64> {
        self.check_point(z)?;
        Ok(hermitian_form(
            &to_complex(&self.obj_re, &self.obj_im),
            &self.obj_lin_re,
            &self.obj_lin_im,
            z,
        ))
    }

    /// `zᴴBz + 2Re(bᴴz) + c`, in complex arithmetic.
    pub fn eval_constraint(&self, z: &DVector<Complex<f64>>) -> Result<f64> {
        self.check_point(z)?;
        Ok(hermitian_form(
            &to_complex(&self.con_re, &self.con_im),
            &self.con_lin_re,
            &self.con_lin_im,
            z,
        ) + self.con_constant)
    }

    fn check_point(&self, z: &DVector<Complex<f64>>) -> Result<()> {
        if z.len() != self.dim() {
            return Err(GtrsError::DimensionMismatch {
                what: "z",
                expected: self.dim(),
                found: z.len(),
            });
        }
        Ok(())
    }

    /// `z = w[..n] + i·w[n..]`.
    pub fn unembed(&self, w: &DVector<f64>) -> DVector<Complex<f64>> {
        let n = self.dim();
        DVector::from_fn(n, |i, _| Complex::new(w[i], w[n + i]))
    }

    /// Checks that the eigenvalues of the embedded `A + λB` pair up at
    /// every sampled `λ`.
    pub fn check_eigenvalue_pairing(&self, lambdas: &[f64]) -> PairingOutcome {
        check_pairing(
            &embed_matrix(&self.obj_re, &self.obj_im),
            &embed_matrix(&self.con_re, &self.con_im),
            lambdas,
        )
    }

    pub(crate) fn from_table(t: &Table) -> Result<Self> {
        let n = match t.get("n") {
            Some(_) => get_dim(t, "n")?,
            None => match t.get("a_re") {
                Some(Value::Array(a)) if !a.is_empty() => a.len(),
                _ => return Err(GtrsError::Parse("`complex.a_re` must be a nonempty array".into())),
            },
        };
        Self::new(
            get_matrix(t, "A_re", n)?,
            get_matrix(t, "A_im", n)?,
            get_vector(t, "a_re", n)?,
            get_vector(t, "a_im", n)?,
            get_matrix(t, "B_re", n)?,
            get_matrix(t, "B_im", n)?,
            get_vector(t, "b_re", n)?,
            get_vector(t, "b_im", n)?,
            get_number(t, "c")?,
            Sense::parse(get_str(t, "sense")?)?,
        )
    }

    pub(crate) fn write_table(&self, out: &mut String) {
        let _ = writeln!(out, "[complex]");
        let _ = writeln!(out, "n = {}", self.dim());
        let _ = writeln!(out, "sense = \"{}\"", self.sense);
        write_matrix(out, "A_re", &self.obj_re);
        write_matrix(out, "A_im", &self.obj_im);
        write_vector(out, "a_re", &self.obj_lin_re);
        write_vector(out, "a_im", &self.obj_lin_im);
        write_matrix(out, "B_re", &self.con_re);
        write_matrix(out, "B_im", &self.con_im);
        write_vector(out, "b_re", &self.con_lin_re);
        write_vector(out, "b_im", &self.con_lin_im);
        let _ = writeln!(out, "c = {}", crate::instance::fmt_f64(self.con_constant));
    }

    /// A standalone document holding only the complex block.
    pub fn to_document(&self) -> String {
        let mut out = String::new();
        self.write_table(&mut out);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairingOutcome {
    pub passed: bool,
    /// The first sampled `λ` at which pairing failed.
    pub offending_lambda: Option<f64>,
    /// Largest gap within a pair, relative to `‖A + λB‖₂`.
    pub worst_gap: f64,
}

/// Sorted eigenvalues of `A + λB` must agree in consecutive pairs to
/// within `1e-7·‖A + λB‖₂`.
pub fn check_pairing(a: &DMatrix<f64>, b: &DMatrix<f64>, lambdas: &[f64]) -> PairingOutcome {
    let mut worst = 0.0f64;
    let mut offending = None;
    for &l in lambdas {
        let h = a + b * l;
        let mut e: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(f64::total_cmp);
        let norm = e.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let ok_len = e.len().is_multiple_of(2);
        let gap = e
            .chunks(2)
            .map(|p| if p.len() == 2 { (p[1] - p[0]) / norm } else { f64::INFINITY })
            .fold(0.0f64, f64::max);
        worst = worst.max(gap);
        if (!ok_len || gap > PAIRING_TOL) && offending.is_none() {
            offending = Some(l);
        }
    }
    PairingOutcome {
        passed: offending.is_none(),
        offending_lambda: offending,
        worst_gap: worst,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComplexSolveReport {
    pub report: SolveReport,
    pub pairing: PairingOutcome,
    /// Global minimizer as `(Re z, Im z)`.
    #[serde(with = "serde_util::opt_vector")]
    pub z_re: Option<DVector<f64>>,
    #[serde(with = "serde_util::opt_vector")]
    pub z_im: Option<DVector<f64>>,
}

/// Solves a complex instance through its embedding.
///
/// The pairing check runs at every multiplier the solve produced plus
/// `λ = 0`. A failed check, or any certified local nonglobal minimizer,
/// is reported as [`GtrsError::PairingViolation`].
pub fn solve_complex(cinst: &ComplexGtrsInstance, tol: &Tolerances) -> Result<ComplexSolveReport> {
    let inst = cinst.embed()?;
    let report = solve(&inst, tol)?;
    let mut lambdas = vec![0.0];
    lambdas.extend(report.kkt_all.iter().map(|p| p.lambda));
    lambdas.extend(report.global.lambda);
    let pairing = cinst.check_eigenvalue_pairing(&lambdas);
    if let Some(l) = pairing.offending_lambda {
        return Err(GtrsError::PairingViolation { lambda: l });
    }
    if let Some(p) = report.local_nonglobal.first() {
        return Err(GtrsError::PairingViolation { lambda: p.lambda });
    }
    let n = cinst.dim();
    let (z_re, z_im) = match &report.global.x {
        Some(w) => (
            Some(w.rows(0, n).into_owned()),
            Some(w.rows(n, n).into_owned()),
        ),
        None => (None, None),
    };
    Ok(ComplexSolveReport {
        report,
        pairing,
        z_re,
        z_im,
    })
}
