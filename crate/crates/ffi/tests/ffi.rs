use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use bistab_ffi::*;

const A: &str = "4 X1 + X2 + X3 -> 5 X1 + X4 ; X1 + 2 X2 + X4 -> 3 X2 + X3";
const D: &str = include_str!("../../../networks/monostable.net");

fn parse(text: &str) -> *mut BistabNetwork {
    let text = CString::new(text).unwrap();
    let mut net = ptr::null_mut();
    assert_eq!(
        unsafe { bistab_network_parse(text.as_ptr(), &mut net) },
        BistabStatus::Ok
    );
    assert!(!net.is_null());
    net
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(bistab_last_error_message()) }
        .to_str()
        .unwrap()
        .to_owned()
}

fn take_string(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { bistab_string_free(s) };
    out
}

#[test]
fn parse_and_inspect() {
    let net = parse(A);
    unsafe {
        assert_eq!(bistab_network_species_count(net), 4);
        assert_eq!(take_string(bistab_network_species_name(net, 3)), "X4");
        assert!(bistab_network_species_name(net, 4).is_null());
        let text = take_string(bistab_network_serialize(net));
        assert!(text.contains("->"));
        let again = parse(&text);
        assert_eq!(take_string(bistab_network_serialize(again)), text);
        bistab_network_free(again);
        bistab_network_free(net);
    }
}

#[test]
fn parse_error_sets_message() {
    let text = CString::new("X1 -> X2").unwrap();
    let mut net = ptr::null_mut();
    let status = unsafe { bistab_network_parse(text.as_ptr(), &mut net) };
    assert_eq!(status, BistabStatus::ParseError);
    assert!(net.is_null());
    assert!(!last_error().is_empty());
}

#[test]
fn null_arguments_are_rejected() {
    let mut net = ptr::null_mut();
    unsafe {
        assert_eq!(bistab_network_parse(ptr::null(), &mut net), BistabStatus::NullPointer);
        let mut v = std::mem::MaybeUninit::<BistabVerdict>::uninit();
        assert_eq!(bistab_decide(ptr::null(), v.as_mut_ptr()), BistabStatus::NullPointer);
        assert_eq!(bistab_network_species_count(ptr::null()), 0);
        assert_eq!(bistab_states_count(ptr::null()), 0);
        bistab_network_free(ptr::null_mut());
        bistab_states_free(ptr::null_mut());
        bistab_string_free(ptr::null_mut());
    }
}

#[test]
fn decide_reports_certificate() {
    let net = parse(A);
    let mut v = std::mem::MaybeUninit::<BistabVerdict>::uninit();
    unsafe {
        assert_eq!(bistab_decide(net, v.as_mut_ptr()), BistabStatus::Ok);
        let v = v.assume_init();
        assert!(v.multistable);
        assert_eq!(v.case_, BistabCase::A);
        assert_eq!(&v.chain[..v.chain_len], &[3, 1]);
        bistab_network_free(net);
    }

    let net = parse(D);
    let mut v = std::mem::MaybeUninit::<BistabVerdict>::uninit();
    unsafe {
        assert_eq!(bistab_decide(net, v.as_mut_ptr()), BistabStatus::Ok);
        let v = v.assume_init();
        assert!(!v.multistable);
        assert_eq!(v.case_, BistabCase::D);
        bistab_network_free(net);
    }
}

#[test]
fn verify_matches_known_states() {
    let net = parse(A);
    let c = [-2.0, -1.7, 0.3];
    let mut states = ptr::null_mut();
    unsafe {
        assert_eq!(
            bistab_verify(net, 1.0, 1.0, c.as_ptr(), c.len(), &mut states),
            BistabStatus::Ok
        );
        assert_eq!(bistab_states_count(states), 3);
        assert_eq!(bistab_states_dimension(states), 4);
        let stable: Vec<bool> = (0..3).map(|i| bistab_states_is_stable(states, i)).collect();
        assert_eq!(stable, [true, false, true]);
        assert!(!bistab_states_is_stable(states, 3));

        let mut x = [0.0; 4];
        assert_eq!(bistab_states_get(states, 1, x.as_mut_ptr(), 4), BistabStatus::Ok);
        assert!((x[2] - 0.7).abs() < 1e-9);
        assert_eq!(
            bistab_states_get(states, 1, x.as_mut_ptr(), 3),
            BistabStatus::DimensionMismatch
        );
        assert_eq!(
            bistab_states_get(states, 9, x.as_mut_ptr(), 4),
            BistabStatus::OutOfRange
        );

        let mut ev = 0.0;
        assert_eq!(bistab_states_eigenvalue(states, 1, &mut ev), BistabStatus::Ok);
        assert!(ev > 0.0);

        let mut kappa = [0.0; 2];
        assert_eq!(bistab_states_kappa(states, kappa.as_mut_ptr()), BistabStatus::Ok);
        assert_eq!(kappa, [1.0, 1.0]);
        let mut totals = [0.0; 3];
        assert_eq!(
            bistab_states_total_constants(states, totals.as_mut_ptr(), 3),
            BistabStatus::Ok
        );
        assert_eq!(totals, c);

        bistab_states_free(states);
        bistab_network_free(net);
    }
}

#[test]
fn verify_dimension_mismatch() {
    let net = parse(A);
    let c = [1.0];
    let mut states = ptr::null_mut();
    unsafe {
        assert_eq!(
            bistab_verify(net, 1.0, 1.0, c.as_ptr(), 1, &mut states),
            BistabStatus::DimensionMismatch
        );
        assert!(states.is_null());
        assert!(last_error().contains('3'));
        bistab_network_free(net);
    }
}

#[test]
fn witness_round_trip() {
    let net = parse(A);
    let mut states = ptr::null_mut();
    unsafe {
        assert_eq!(bistab_witness(net, 0, &mut states), BistabStatus::Ok);
        let n = bistab_states_count(states);
        assert!((0..n).filter(|&i| bistab_states_is_stable(states, i)).count() >= 2);

        // the reported parameters reproduce the same states
        let mut kappa = [0.0; 2];
        let mut c = [0.0; 3];
        bistab_states_kappa(states, kappa.as_mut_ptr());
        bistab_states_total_constants(states, c.as_mut_ptr(), 3);
        let mut again = ptr::null_mut();
        assert_eq!(
            bistab_verify(net, kappa[0], kappa[1], c.as_ptr(), 3, &mut again),
            BistabStatus::Ok
        );
        assert_eq!(bistab_states_count(again), n);
        bistab_states_free(again);
        bistab_states_free(states);
        bistab_network_free(net);
    }

    let net = parse(D);
    let mut states = ptr::null_mut();
    unsafe {
        assert_eq!(bistab_witness(net, 0, &mut states), BistabStatus::NotMultistable);
        assert!(states.is_null());
        bistab_network_free(net);
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(bistab_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_api() {
    let header = include_str!("../include/bistab.h");
    for name in [
        "bistab_network_parse",
        "bistab_decide",
        "bistab_witness",
        "bistab_verify",
        "bistab_states_get",
        "bistab_last_error_message",
        "typedef struct BistabNetwork BistabNetwork",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

/// Compiles and runs a C program against the header and static library.
#[test]
fn c_program_links() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|p| p.parent()).unwrap();
    let lib = profile_dir.join("libbistab_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: static library or C compiler unavailable");
        return;
    }
    let out = tempfile::tempdir().unwrap();
    let bin = out.path().join("smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "3 2");
}
