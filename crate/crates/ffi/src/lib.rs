//! C ABI over the `pcadca` library.
//!
//! Every entry point returns a [`PcadcaStatus`]; on failure the message is
//! available from [`pcadca_last_error`] on the same thread. Engines and
//! score series are opaque handles released with their `_free` function.
//! Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use pcadca::config::RunConfig;
use pcadca::dca::{self, Engine, KAlphaSeries};
use pcadca::eval;
use pcadca::ingest::Label;
use pcadca::pca::{jacobi_eigen, SymMatrix};
use pcadca::pipeline;
use pcadca::report;
use pcadca::sigmap::{self, Signals, WeightTable};
use pcadca::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcadcaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Data = 3,
    Numerical = 4,
    Io = 5,
    Panic = 6,
}

impl From<&Error> for PcadcaStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Io { .. } => PcadcaStatus::Io,
            Error::Numerical(_) => PcadcaStatus::Numerical,
            Error::InvalidArgument(_) | Error::Config(_) => PcadcaStatus::InvalidArgument,
            _ => PcadcaStatus::Data,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes stripped");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(e: Error) -> PcadcaStatus {
    let status = PcadcaStatus::from(&e);
    set_last_error(e.to_string());
    status
}

fn null(what: &str) -> PcadcaStatus {
    set_last_error(format!("null pointer: {what}"));
    PcadcaStatus::NullPointer
}

fn guard(f: impl FnOnce() -> PcadcaStatus) -> PcadcaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_last_error("internal panic");
            PcadcaStatus::Panic
        }
    }
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pcadca_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Reads three weights, or the default row when `p` is NULL.
unsafe fn weight_row(p: *const f64, default: [f64; 3]) -> [f64; 3] {
    if p.is_null() {
        default
    } else {
        [*p, *p.add(1), *p.add(2)]
    }
}

unsafe fn weights(csm: *const f64, k: *const f64) -> Result<WeightTable, Error> {
    let d = WeightTable::default();
    WeightTable::new(weight_row(csm, d.csm), weight_row(k, d.k))
}

/// Fuses one signal instance into `(csm, k)`. NULL weight rows select the
/// defaults `csm = (2, 1, 2)`, `k = (2, 1, -3)`.
///
/// # Safety
/// Non-NULL `csm_weights`/`k_weights` must point to 3 readable doubles;
/// `out_csm` and `out_k` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pcadca_transform_signals(
    pamp: f64,
    danger: f64,
    safe: f64,
    csm_weights: *const f64,
    k_weights: *const f64,
    out_csm: *mut f64,
    out_k: *mut f64,
) -> PcadcaStatus {
    guard(|| {
        if out_csm.is_null() || out_k.is_null() {
            return null("out_csm/out_k");
        }
        let w = match weights(csm_weights, k_weights) {
            Ok(w) => w,
            Err(e) => return fail(e),
        };
        let (csm, k) = dca::transform_signals(&w, Signals::new(pamp, danger, safe));
        *out_csm = csm;
        *out_k = k;
        PcadcaStatus::Ok
    })
}

/// Antigen copies for a normalised antigen value `x`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pcadca_antigen_frequency(
    x: f64,
    f_min: u32,
    f_max: u32,
    out: *mut u32,
) -> PcadcaStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        match sigmap::antigen_frequency(x, f_min, f_max) {
            Ok(f) => {
                *out = f;
                PcadcaStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Eigendecomposition of a symmetric `n x n` row-major matrix. Eigenvalues
/// are written descending; row `j` of `out_vectors` is the unit eigenvector
/// of eigenvalue `j`.
///
/// # Safety
/// `matrix` and `out_vectors` must hold `n * n` doubles, `out_values` `n`.
#[no_mangle]
pub unsafe extern "C" fn pcadca_jacobi_eigen(
    n: usize,
    matrix: *const f64,
    out_values: *mut f64,
    out_vectors: *mut f64,
) -> PcadcaStatus {
    guard(|| {
        if matrix.is_null() || out_values.is_null() || out_vectors.is_null() {
            return null("matrix/out_values/out_vectors");
        }
        let flat = std::slice::from_raw_parts(matrix, n * n);
        let rows: Vec<Vec<f64>> = flat.chunks(n.max(1)).map(<[f64]>::to_vec).collect();
        let rows = if n == 0 { Vec::new() } else { rows };
        let eig = match SymMatrix::from_rows(&rows).and_then(|m| jacobi_eigen(&m)) {
            Ok(e) => e,
            Err(e) => return fail(e),
        };
        let values = std::slice::from_raw_parts_mut(out_values, n);
        values.copy_from_slice(&eig.values);
        let vectors = std::slice::from_raw_parts_mut(out_vectors, n * n);
        for (j, v) in eig.vectors.iter().enumerate() {
            vectors[j * n..(j + 1) * n].copy_from_slice(v);
        }
        PcadcaStatus::Ok
    })
}

/// Segment statistic `L` at threshold `th`; `*out_anomalous` is set when
/// `L >= 0`.
///
/// # Safety
/// `ks` must hold `len` doubles; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn pcadca_classify_segment(
    ks: *const f64,
    len: usize,
    th: f64,
    out_l: *mut f64,
    out_anomalous: *mut bool,
) -> PcadcaStatus {
    guard(|| {
        if ks.is_null() || out_l.is_null() || out_anomalous.is_null() {
            return null("ks/out_l/out_anomalous");
        }
        match eval::classify_segment(std::slice::from_raw_parts(ks, len), th) {
            Ok((l, label)) => {
                *out_l = l;
                *out_anomalous = label == Label::Anomalous;
                PcadcaStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Opaque DCA engine.
pub struct PcadcaEngine(Engine);

/// Opaque per-antigen score series.
pub struct PcadcaKAlpha(KAlphaSeries);

/// Creates an engine of `population` cells with thresholds `i * delta`.
/// `delta <= 0` selects `3 * csm_max / population`. NULL weight rows select
/// the defaults.
///
/// # Safety
/// Non-NULL weight rows must hold 3 doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pcadca_engine_new(
    population: usize,
    delta: f64,
    csm_weights: *const f64,
    k_weights: *const f64,
    out: *mut *mut PcadcaEngine,
) -> PcadcaStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        *out = ptr::null_mut();
        let w = match weights(csm_weights, k_weights) {
            Ok(w) => w,
            Err(e) => return fail(e),
        };
        let delta = if delta > 0.0 {
            delta
        } else if population > 0 {
            dca::default_delta(population, &w)
        } else {
            delta
        };
        match Engine::new(population, delta, w) {
            Ok(e) => {
                *out = Box::into_raw(Box::new(PcadcaEngine(e)));
                PcadcaStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `engine` must come from [`pcadca_engine_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pcadca_engine_free(engine: *mut PcadcaEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

/// Processes one second: `multiplicity` copies of `antigen` with the given
/// signals.
///
/// # Safety
/// `engine` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pcadca_engine_step(
    engine: *mut PcadcaEngine,
    antigen: usize,
    multiplicity: u32,
    pamp: f64,
    danger: f64,
    safe: f64,
) -> PcadcaStatus {
    guard(|| {
        let Some(engine) = engine.as_mut() else {
            return null("engine");
        };
        match engine.0.step(antigen, multiplicity, Signals::new(pamp, danger, safe)) {
            Ok(()) => PcadcaStatus::Ok,
            Err(e) => fail(e),
        }
    })
}

/// Presents every antigen still held by a cell.
///
/// # Safety
/// `engine` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pcadca_engine_flush(engine: *mut PcadcaEngine) -> PcadcaStatus {
    guard(|| {
        let Some(engine) = engine.as_mut() else {
            return null("engine");
        };
        engine.0.flush();
        PcadcaStatus::Ok
    })
}

/// Number of logged presentations.
///
/// # Safety
/// `engine` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pcadca_engine_presentations(
    engine: *const PcadcaEngine,
    out: *mut usize,
) -> PcadcaStatus {
    guard(|| {
        let Some(engine) = engine.as_ref() else {
            return null("engine");
        };
        if out.is_null() {
            return null("out");
        }
        *out = engine.0.presentations().len();
        PcadcaStatus::Ok
    })
}

/// Scores the presentations logged so far.
///
/// # Safety
/// `engine` must be a live handle; `out` writable. Release the result with
/// [`pcadca_kalpha_free`].
#[no_mangle]
pub unsafe extern "C" fn pcadca_engine_k_alpha(
    engine: *const PcadcaEngine,
    out: *mut *mut PcadcaKAlpha,
) -> PcadcaStatus {
    guard(|| {
        let Some(engine) = engine.as_ref() else {
            return null("engine");
        };
        if out.is_null() {
            return null("out");
        }
        let series = dca::k_alpha(engine.0.presentations());
        *out = Box::into_raw(Box::new(PcadcaKAlpha(series)));
        PcadcaStatus::Ok
    })
}

/// # Safety
/// `series` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pcadca_kalpha_len(series: *const PcadcaKAlpha) -> usize {
    series.as_ref().map_or(0, |s| s.0.len())
}

/// Entry `index` in antigen order.
///
/// # Safety
/// `series` must be a live handle; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn pcadca_kalpha_get(
    series: *const PcadcaKAlpha,
    index: usize,
    out_antigen: *mut usize,
    out_k_alpha: *mut f64,
    out_presented: *mut u64,
) -> PcadcaStatus {
    guard(|| {
        let Some(series) = series.as_ref() else {
            return null("series");
        };
        if out_antigen.is_null() || out_k_alpha.is_null() || out_presented.is_null() {
            return null("outputs");
        }
        let Some(e) = series.0.entries.get(index) else {
            set_last_error(format!(
                "index {index} out of range for {} entries",
                series.0.len()
            ));
            return PcadcaStatus::InvalidArgument;
        };
        *out_antigen = e.antigen;
        *out_k_alpha = e.k_alpha;
        *out_presented = e.presented;
        PcadcaStatus::Ok
    })
}

/// # Safety
/// `series` must come from [`pcadca_engine_k_alpha`] and not be used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn pcadca_kalpha_free(series: *mut PcadcaKAlpha) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Runs the full pipeline from a `key = value` config file, writing every
/// artefact to the configured output directory. `out_dir` overrides it when
/// non-NULL. The ROC area is stored in `out_auc` when non-NULL.
///
/// # Safety
/// `config_path` must be a NUL-terminated string; `out_dir` NULL or one.
#[no_mangle]
pub unsafe extern "C" fn pcadca_run_config(
    config_path: *const c_char,
    out_dir: *const c_char,
    out_auc: *mut f64,
) -> PcadcaStatus {
    guard(|| {
        if config_path.is_null() {
            return null("config_path");
        }
        let path = match CStr::from_ptr(config_path).to_str() {
            Ok(p) => p,
            Err(_) => {
                set_last_error("config path is not UTF-8");
                return PcadcaStatus::InvalidArgument;
            }
        };
        let mut cfg = RunConfig::default();
        if let Err(e) = cfg.apply_file(Path::new(path)) {
            return fail(e);
        }
        if !out_dir.is_null() {
            match CStr::from_ptr(out_dir).to_str() {
                Ok(d) => cfg.out_dir = d.into(),
                Err(_) => {
                    set_last_error("output directory is not UTF-8");
                    return PcadcaStatus::InvalidArgument;
                }
            }
        }
        let result = match pipeline::run(&cfg) {
            Ok(r) => r,
            Err(e) => {
                let status = PcadcaStatus::from(&e.error);
                set_last_error(e.to_string());
                return status;
            }
        };
        if let Err(e) = report::write_run(&result, &cfg.out_dir) {
            return fail(e);
        }
        if !out_auc.is_null() {
            *out_auc = result.roc.auc;
        }
        PcadcaStatus::Ok
    })
}
