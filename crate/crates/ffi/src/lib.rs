//! C ABI over `charge_lattice`.
//!
//! Every fallible function returns a [`ClStatus`]. On failure the message
//! is kept per thread and can be read with [`cl_last_error_message`].
//! Handles are opaque and must be released with their `_free` function.
//! Panics are caught at the boundary and reported as `CL_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use charge_lattice::charge::LedgerJson;
use charge_lattice::lattice::PartitionJson;
use charge_lattice::{
    build_ledger, count_downsets, generic_weights, rational_oracle_ledger, run_mc_experiment,
    verify_lemma, verify_properties, Error, McParams, Partition, PoleLedger, ProjectedPoint,
    SampleMethod,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClStatus {
    Ok = 0,
    /// Null pointer, bad UTF-8, or an argument out of range.
    InvalidArgument = 1,
    /// Malformed JSON input.
    Parse = 2,
    /// The boxes do not form a partition.
    MeltingRule = 3,
    /// Dimension or hypercube size not supported.
    Unsupported = 4,
    /// Work estimate above the configured limit.
    WorkLimit = 5,
    /// Weights were not generic for the requested check.
    Genericity = 6,
    /// A Rust panic was caught.
    Panic = 7,
}

/// Sampling method for [`cl_run_mc`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClSampleMethod {
    Sequential = 0,
    Chain = 1,
}

/// Opaque partition handle.
pub struct ClPartition(Partition);

/// Opaque pole-ledger handle.
pub struct ClLedger {
    ledger: PoleLedger,
    entries: Vec<(ProjectedPoint, i32)>,
}

/// Outcome of [`cl_verify_lemma`].
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct ClLemmaSummary {
    pub total_configs: u64,
    pub members: u64,
    pub violations: u64,
    pub characterization_mismatches: u64,
}

/// Outcome of [`cl_run_mc`].
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct ClMcSummary {
    pub samples: u64,
    pub max_omega: i32,
    pub above_bound: u64,
    pub boundary_failures: u64,
    pub passed: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> ClStatus {
    match e {
        Error::MeltingRule(_) => ClStatus::MeltingRule,
        Error::DimensionOutOfRange(_)
        | Error::Intractable(_)
        | Error::SubdimOutOfRange(_)
        | Error::UnsupportedDimension(_)
        | Error::OddPotential(_) => ClStatus::Unsupported,
        Error::WorkLimit { .. } => ClStatus::WorkLimit,
        Error::GenericityBudget(_) | Error::GenericityFailure { .. } => ClStatus::Genericity,
        _ => ClStatus::InvalidArgument,
    }
}

struct Failure(ClStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn invalid(msg: &str) -> Failure {
    Failure(ClStatus::InvalidArgument, msg.to_owned())
}

/// Runs `f`, records any failure and maps it to a status.
fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> ClStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ClStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| (*s).to_owned())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_owned());
            set_error(format!("panic: {msg}"));
            ClStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| invalid(&format!("{what} is null")))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| invalid(&format!("{what} is null")))
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn cl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn cl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses `{"n": int, "boxes": [[...], ...]}` and checks the melting rule.
///
/// # Safety
/// `json` must be a valid nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cl_partition_from_json(json: *const c_char, out: *mut *mut ClPartition) -> ClStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        if json.is_null() {
            return Err(invalid("json is null"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| invalid("json is not UTF-8"))?;
        let parsed: PartitionJson =
            serde_json::from_str(text).map_err(|e| Failure(ClStatus::Parse, e.to_string()))?;
        let p = parsed.into_partition()?;
        *out = Box::into_raw(Box::new(ClPartition(p)));
        Ok(())
    })
}

/// # Safety
/// `p` must be null or a handle from [`cl_partition_from_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cl_partition_free(p: *mut ClPartition) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Dimension of the partition, 0 for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cl_partition_dimension(p: *const ClPartition) -> usize {
    p.as_ref().map_or(0, |p| p.0.dimension())
}

/// Number of boxes, 0 for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cl_partition_len(p: *const ClPartition) -> usize {
    p.as_ref().map_or(0, |p| p.0.len())
}

/// Builds the pole ledger of the partition.
///
/// # Safety
/// `p` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cl_ledger_build(p: *const ClPartition, out: *mut *mut ClLedger) -> ClStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let p = deref(p, "partition")?;
        let ledger = build_ledger(&p.0)?;
        let entries = ledger.entries().map(|(q, o)| (q.clone(), o)).collect();
        *out = Box::into_raw(Box::new(ClLedger { ledger, entries }));
        Ok(())
    })
}

/// # Safety
/// `l` must be null or a handle from [`cl_ledger_build`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cl_ledger_free(l: *mut ClLedger) {
    if !l.is_null() {
        drop(Box::from_raw(l));
    }
}

/// Number of projected points with non-zero order, 0 for a null handle.
///
/// # Safety
/// `l` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cl_ledger_len(l: *const ClLedger) -> usize {
    l.as_ref().map_or(0, |l| l.entries.len())
}

/// Copies entry `index` (in lexicographic order of the projected point)
/// into `coords[0..n]` and `*order`. `coords_len` must be at least `n`.
///
/// # Safety
/// `l` must be a live handle, `coords` valid for `coords_len` writes and
/// `order` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cl_ledger_entry(
    l: *const ClLedger,
    index: usize,
    coords: *mut i32,
    coords_len: usize,
    order: *mut i32,
) -> ClStatus {
    guard(|| {
        let l = deref(l, "ledger")?;
        let order = out_ref(order, "order")?;
        let (q, o) = l
            .entries
            .get(index)
            .ok_or_else(|| invalid(&format!("index {index} out of range")))?;
        let c = q.components();
        if coords.is_null() || coords_len < c.len() {
            return Err(invalid("coordinate buffer is too small"));
        }
        std::slice::from_raw_parts_mut(coords, c.len()).copy_from_slice(c);
        *order = *o;
        Ok(())
    })
}

/// Net pole order at the projected point of the lattice vector `l[0..n]`.
///
/// # Safety
/// `ledger` must be a live handle, `l` valid for `n` reads and `order` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cl_ledger_pole_order(
    ledger: *const ClLedger,
    l: *const i32,
    n: usize,
    order: *mut i32,
) -> ClStatus {
    guard(|| {
        let ledger = deref(ledger, "ledger")?;
        let order = out_ref(order, "order")?;
        if l.is_null() || n != ledger.ledger.dimension() {
            return Err(invalid("lattice vector does not match the ledger dimension"));
        }
        let q = ProjectedPoint::from_vector(std::slice::from_raw_parts(l, n));
        *order = ledger.ledger.pole_order(&q);
        Ok(())
    })
}

/// Serializes the ledger as `{"n": int, "entries": [{"l": [...], "order": int}]}`.
/// The string must be released with [`cl_string_free`].
///
/// # Safety
/// `l` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cl_ledger_to_json(l: *const ClLedger, out: *mut *mut c_char) -> ClStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let l = deref(l, "ledger")?;
        let text = serde_json::to_string(&LedgerJson::from(&l.ledger))
            .map_err(|e| Failure(ClStatus::Panic, e.to_string()))?;
        *out = CString::new(text).expect("JSON has no nul").into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Checks that every pole is simple and that poles correspond one to one
/// with projected addable and removable boxes.
///
/// # Safety
/// `p` must be a live handle; the output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cl_verify_properties(
    p: *const ClPartition,
    simple_poles: *mut bool,
    bijection: *mut bool,
) -> ClStatus {
    guard(|| {
        let p = deref(p, "partition")?;
        let simple_poles = out_ref(simple_poles, "simple_poles")?;
        let bijection = out_ref(bijection, "bijection")?;
        let r = verify_properties(&p.0)?;
        *simple_poles = r.simple_poles;
        *bijection = r.bijection;
        Ok(())
    })
}

/// Compares the ledger with the rational-root expansion under the generic
/// weights drawn from `seed`.
///
/// # Safety
/// `p` must be a live handle and `matches` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cl_oracle_check(p: *const ClPartition, seed: u64, matches: *mut bool) -> ClStatus {
    guard(|| {
        let p = deref(p, "partition")?;
        let matches = out_ref(matches, "matches")?;
        let w = generic_weights(p.0.dimension(), seed)?;
        *matches = rational_oracle_ledger(&p.0, &w)? == build_ledger(&p.0)?;
        Ok(())
    })
}

/// Number of down-sets of the `d`-dimensional Boolean hypercube, `d <= 6`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cl_count_downsets(d: usize, jobs: usize, out: *mut u64) -> ClStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = count_downsets(d, jobs.max(1))?;
        Ok(())
    })
}

/// Exhaustive pole-order check at the top of `HC^(d)` in dimension `n`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cl_verify_lemma(n: usize, d: usize, jobs: usize, out: *mut ClLemmaSummary) -> ClStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let r = verify_lemma(n, d, jobs.max(1))?;
        *out = ClLemmaSummary {
            total_configs: r.total_configs,
            members: r.members,
            violations: r.violations.len() as u64,
            characterization_mismatches: r.characterization_mismatches,
        };
        Ok(())
    })
}

/// Monte Carlo check with `per_n` samples at every box count.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cl_run_mc(
    n: usize,
    d: usize,
    per_n: usize,
    seed: u64,
    method: ClSampleMethod,
    jobs: usize,
    out: *mut ClMcSummary,
) -> ClStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let method = match method {
            ClSampleMethod::Sequential => SampleMethod::Sequential,
            ClSampleMethod::Chain => SampleMethod::Chain,
        };
        let r = run_mc_experiment(&McParams {
            n,
            d,
            samples_per_n: per_n,
            seed,
            method,
            jobs: jobs.max(1),
        })?;
        *out = ClMcSummary {
            samples: r.samples,
            max_omega: r.max_omega,
            above_bound: r.above_bound,
            boundary_failures: r.boundary_failures,
            passed: r.passed(),
        };
        Ok(())
    })
}
