//! C ABI over the bistab library.
//!
//! Networks and steady-state sets are opaque handles created by this
//! library and released with their `_free` functions. Every fallible call
//! returns a [`BistabStatus`]; on failure a description is available from
//! [`bistab_last_error_message`] on the same thread. Strings returned as
//! `char *` are owned by the caller and released with [`bistab_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bistab::criterion::{decide, Case};
use bistab::network::analyze_network;
use bistab::verifier::{enumerate_steady_states, SteadyStateSet, VerifyError};
use bistab::witness::{make_witness, WitnessError, WitnessOptions};
use bistab::{parse_network, serialize_network, BiNetwork};

/// Result codes of fallible calls.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BistabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    NotApplicable = 4,
    NotMultistable = 5,
    ConstructionFailed = 6,
    DimensionMismatch = 7,
    InvalidArgument = 8,
    OutOfRange = 9,
    Panic = 10,
}

/// Branch of the criterion that decided a network.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BistabCase {
    A = 0,
    B1 = 1,
    B2 = 2,
    B3 = 3,
    B4 = 4,
    C1 = 5,
    C2 = 6,
    COtherPair = 7,
    D = 8,
    NotApplicable = 9,
}

impl From<Case> for BistabCase {
    fn from(c: Case) -> Self {
        match c {
            Case::A => BistabCase::A,
            Case::B1 => BistabCase::B1,
            Case::B2 => BistabCase::B2,
            Case::B3 => BistabCase::B3,
            Case::B4 => BistabCase::B4,
            Case::C1 => BistabCase::C1,
            Case::C2 => BistabCase::C2,
            Case::COtherPair => BistabCase::COtherPair,
            Case::D => BistabCase::D,
            Case::NotApplicable => BistabCase::NotApplicable,
        }
    }
}

/// Multistability decision.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BistabVerdict {
    pub multistable: bool,
    pub case_: BistabCase,
    /// Certificate integers, largest first (`chain[0] > chain[1] > ...`).
    pub chain: [u64; 3],
    pub chain_len: usize,
    /// Bit i set when species i (0-based) is in the certifying subset.
    pub subset_mask: u64,
}

/// Opaque parsed network.
pub struct BistabNetwork {
    net: BiNetwork,
}

/// Opaque list of steady states with the parameters that produced them.
pub struct BistabSteadyStates {
    kappa: [f64; 2],
    c: Vec<f64>,
    set: SteadyStateSet,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn guard(f: impl FnOnce() -> BistabStatus) -> BistabStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            BistabStatus::Panic
        }
    }
}

fn fail(status: BistabStatus, msg: impl Into<String>) -> BistabStatus {
    set_error(msg);
    status
}

fn to_c_string(s: &str) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message for the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bistab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bistab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn bistab_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses network text into a new handle stored in `*out`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bistab_network_parse(text: *const c_char, out: *mut *mut BistabNetwork) -> BistabStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            return fail(BistabStatus::NullPointer, "null argument");
        }
        *out = ptr::null_mut();
        let Ok(text) = CStr::from_ptr(text).to_str() else {
            return fail(BistabStatus::InvalidUtf8, "network text is not UTF-8");
        };
        match parse_network(text) {
            Ok(net) => {
                *out = Box::into_raw(Box::new(BistabNetwork { net }));
                BistabStatus::Ok
            }
            Err(e) => fail(BistabStatus::ParseError, e.to_string()),
        }
    })
}

/// # Safety
/// `net` must be null or a handle from [`bistab_network_parse`].
#[no_mangle]
pub unsafe extern "C" fn bistab_network_free(net: *mut BistabNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Number of species, or 0 for a null handle.
///
/// # Safety
/// `net` must be null or a live network handle.
#[no_mangle]
pub unsafe extern "C" fn bistab_network_species_count(net: *const BistabNetwork) -> usize {
    net.as_ref().map_or(0, |n| n.net.num_species())
}

/// Name of species `index` (0-based); null if out of range. Free with
/// [`bistab_string_free`].
///
/// # Safety
/// `net` must be null or a live network handle.
#[no_mangle]
pub unsafe extern "C" fn bistab_network_species_name(net: *const BistabNetwork, index: usize) -> *mut c_char {
    match net.as_ref().and_then(|n| n.net.species().get(index)) {
        Some(name) => to_c_string(name),
        None => {
            set_error("species index out of range");
            ptr::null_mut()
        }
    }
}

/// Canonical text of the network. Free with [`bistab_string_free`].
///
/// # Safety
/// `net` must be null or a live network handle.
#[no_mangle]
pub unsafe extern "C" fn bistab_network_serialize(net: *const BistabNetwork) -> *mut c_char {
    match net.as_ref() {
        Some(n) => to_c_string(&serialize_network(&n.net)),
        None => {
            set_error("null network");
            ptr::null_mut()
        }
    }
}

/// Decides multistability.
///
/// # Safety
/// `net` must be a live network handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bistab_decide(net: *const BistabNetwork, out: *mut BistabVerdict) -> BistabStatus {
    guard(|| {
        let (Some(n), false) = (net.as_ref(), out.is_null()) else {
            return fail(BistabStatus::NullPointer, "null argument");
        };
        let analysis = analyze_network(&n.net);
        let v = decide(&analysis.partition, analysis.applicability);
        let mut chain = [0u64; 3];
        for (slot, value) in chain.iter_mut().zip(&v.chain) {
            *slot = *value;
        }
        let subset_mask = v
            .cert_subset
            .iter()
            .flatten()
            .filter(|&&i| i < 64)
            .fold(0u64, |m, &i| m | (1 << i));
        *out = BistabVerdict {
            multistable: v.multistable,
            case_: v.case.into(),
            chain,
            chain_len: v.chain.len().min(3),
            subset_mask,
        };
        BistabStatus::Ok
    })
}

/// Builds a certified witness; `*out` receives its steady states together
/// with the rate constants and total constants.
///
/// # Safety
/// `net` must be a live network handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bistab_witness(
    net: *const BistabNetwork,
    seed: u64,
    out: *mut *mut BistabSteadyStates,
) -> BistabStatus {
    guard(|| {
        let (Some(n), false) = (net.as_ref(), out.is_null()) else {
            return fail(BistabStatus::NullPointer, "null argument");
        };
        *out = ptr::null_mut();
        let opts = WitnessOptions {
            seed,
            ..Default::default()
        };
        match make_witness(&n.net, &opts) {
            Ok(w) => {
                *out = Box::into_raw(Box::new(BistabSteadyStates {
                    kappa: w.kappa,
                    c: w.c,
                    set: w.certification,
                }));
                BistabStatus::Ok
            }
            Err(e) => {
                let status = match e {
                    WitnessError::NotMultistable(_) => BistabStatus::NotMultistable,
                    WitnessError::NotApplicable(_) => BistabStatus::NotApplicable,
                    WitnessError::ConstructionFailed(_) => BistabStatus::ConstructionFailed,
                };
                fail(status, e.to_string())
            }
        }
    })
}

/// Enumerates the positive steady states for rate constants (k1, k2) and
/// the `c_len` total constants at `c`.
///
/// # Safety
/// `net` must be a live network handle, `c` must point to `c_len` doubles
/// (or be null when `c_len` is 0) and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bistab_verify(
    net: *const BistabNetwork,
    k1: f64,
    k2: f64,
    c: *const f64,
    c_len: usize,
    out: *mut *mut BistabSteadyStates,
) -> BistabStatus {
    guard(|| {
        let (Some(n), false) = (net.as_ref(), out.is_null()) else {
            return fail(BistabStatus::NullPointer, "null argument");
        };
        *out = ptr::null_mut();
        if c.is_null() && c_len > 0 {
            return fail(BistabStatus::NullPointer, "null total constants");
        }
        let c = if c_len == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(c, c_len)
        };
        match enumerate_steady_states(&n.net, [k1, k2], c) {
            Ok(set) => {
                *out = Box::into_raw(Box::new(BistabSteadyStates {
                    kappa: [k1, k2],
                    c: c.to_vec(),
                    set,
                }));
                BistabStatus::Ok
            }
            Err(e) => {
                let status = match e {
                    VerifyError::DimensionMismatch { .. } => BistabStatus::DimensionMismatch,
                    VerifyError::NotOneDimensional | VerifyError::LambdaNonnegative(_) => BistabStatus::NotApplicable,
                    VerifyError::InvalidKappa | VerifyError::InvalidTotals => BistabStatus::InvalidArgument,
                };
                fail(status, e.to_string())
            }
        }
    })
}

/// # Safety
/// `states` must be null or a handle from [`bistab_witness`] or [`bistab_verify`].
#[no_mangle]
pub unsafe extern "C" fn bistab_states_free(states: *mut BistabSteadyStates) {
    if !states.is_null() {
        drop(Box::from_raw(states));
    }
}

/// Number of steady states, or 0 for a null handle.
///
/// # Safety
/// `states` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bistab_states_count(states: *const BistabSteadyStates) -> usize {
    states.as_ref().map_or(0, |s| s.set.len())
}

/// Number of species per state.
///
/// # Safety
/// `states` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bistab_states_dimension(states: *const BistabSteadyStates) -> usize {
    states.as_ref().map_or(0, |s| s.c.len() + 1)
}

/// Copies state `index` into `buf`, which holds `buf_len` doubles.
///
/// # Safety
/// `states` must be a live handle and `buf` must point to `buf_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn bistab_states_get(
    states: *const BistabSteadyStates,
    index: usize,
    buf: *mut f64,
    buf_len: usize,
) -> BistabStatus {
    guard(|| {
        let (Some(s), false) = (states.as_ref(), buf.is_null()) else {
            return fail(BistabStatus::NullPointer, "null argument");
        };
        let Some(x) = s.set.states.get(index) else {
            return fail(BistabStatus::OutOfRange, "state index out of range");
        };
        if buf_len < x.len() {
            return fail(
                BistabStatus::DimensionMismatch,
                format!("buffer holds {buf_len} values, state has {}", x.len()),
            );
        }
        std::slice::from_raw_parts_mut(buf, x.len()).copy_from_slice(x);
        BistabStatus::Ok
    })
}

/// Whether state `index` is exponentially stable; false when out of range.
///
/// # Safety
/// `states` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bistab_states_is_stable(states: *const BistabSteadyStates, index: usize) -> bool {
    states
        .as_ref()
        .and_then(|s| s.set.stable.get(index).copied())
        .unwrap_or(false)
}

/// The nonzero Jacobian eigenvalue at state `index`.
///
/// # Safety
/// `states` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bistab_states_eigenvalue(
    states: *const BistabSteadyStates,
    index: usize,
    out: *mut f64,
) -> BistabStatus {
    let (Some(s), false) = (states.as_ref(), out.is_null()) else {
        return fail(BistabStatus::NullPointer, "null argument");
    };
    match s.set.eigenvalue.get(index) {
        Some(&ev) => {
            *out = ev;
            BistabStatus::Ok
        }
        None => fail(BistabStatus::OutOfRange, "state index out of range"),
    }
}

/// Writes the rate constants (k1, k2) to `out[0..2]`.
///
/// # Safety
/// `states` must be a live handle and `out` must point to 2 doubles.
#[no_mangle]
pub unsafe extern "C" fn bistab_states_kappa(states: *const BistabSteadyStates, out: *mut f64) -> BistabStatus {
    let (Some(s), false) = (states.as_ref(), out.is_null()) else {
        return fail(BistabStatus::NullPointer, "null argument");
    };
    std::slice::from_raw_parts_mut(out, 2).copy_from_slice(&s.kappa);
    BistabStatus::Ok
}

/// Copies the total constants (species count minus one values) into `buf`.
///
/// # Safety
/// `states` must be a live handle and `buf` must point to `buf_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn bistab_states_total_constants(
    states: *const BistabSteadyStates,
    buf: *mut f64,
    buf_len: usize,
) -> BistabStatus {
    let Some(s) = states.as_ref() else {
        return fail(BistabStatus::NullPointer, "null argument");
    };
    if buf.is_null() && !s.c.is_empty() {
        return fail(BistabStatus::NullPointer, "null buffer");
    }
    if buf_len < s.c.len() {
        return fail(
            BistabStatus::DimensionMismatch,
            format!("buffer holds {buf_len} values, need {}", s.c.len()),
        );
    }
    if !s.c.is_empty() {
        std::slice::from_raw_parts_mut(buf, s.c.len()).copy_from_slice(&s.c);
    }
    BistabStatus::Ok
}
