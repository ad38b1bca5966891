//! C ABI over the `mmlevel` library.
//!
//! Every object crosses the boundary as an opaque pointer created by an
//! `mm_*_new`/`mm_*_load` style function and released by the matching
//! `mm_*_free`. Fallible calls return an [`MmStatus`]; the message for the
//! most recent failure on the calling thread is available through
//! [`mm_last_error`]. Strings returned to the caller must be released with
//! [`mm_string_free`].

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use mmlevel::agent::JumpModel;
use mmlevel::approach::{Approach, TrainedApproach};
use mmlevel::assembler::GeneratedLevel;
use mmlevel::corpus::{load_corpus, Corpus, LoadOptions};
use mmlevel::metrics::level_playable;
use mmlevel::TileAlphabet;

/// Result codes returned by fallible calls.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MmStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// An argument was malformed (bad UTF-8, unknown approach, zero rooms).
    InvalidArgument = 2,
    /// Level data could not be read or parsed.
    DataError = 3,
    /// Training or generation failed.
    ModelError = 4,
    /// A panic was caught at the boundary.
    Internal = 5,
}

/// A loaded corpus of annotated levels.
pub struct MmCorpus {
    inner: Corpus,
}

/// A trained generator for one approach.
pub struct MmGenerator {
    model: TrainedApproach,
    alphabet: TileAlphabet,
}

/// One generated level.
pub struct MmLevel {
    level: GeneratedLevel,
    alphabet: TileAlphabet,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: MmStatus, msg: impl Into<String>) -> MmStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> MmStatus) -> MmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(MmStatus::Internal, "panic inside mmlevel"),
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, MmStatus> {
    if p.is_null() {
        return Err(fail(MmStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(MmStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(std::ptr::null_mut(), CString::into_raw)
}

/// Message for the last failed call on this thread, or null. The caller
/// owns the returned string.
#[no_mangle]
pub extern "C" fn mm_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null_mut(), |s| s.clone().into_raw()))
}

/// Release a string returned by this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn mm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version, as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Load every level with a path sidecar from `dir`.
#[no_mangle]
pub unsafe extern "C" fn mm_corpus_load(dir: *const c_char, out: *mut *mut MmCorpus) -> MmStatus {
    guard(|| {
        if out.is_null() {
            return fail(MmStatus::NullArgument, "out is null");
        }
        let dir = match str_arg(dir, "dir") {
            Ok(d) => d,
            Err(s) => return s,
        };
        match load_corpus(Path::new(dir), &LoadOptions::default()) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(MmCorpus { inner }));
                MmStatus::Ok
            }
            Err(e) => fail(MmStatus::DataError, e.to_string()),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn mm_corpus_free(corpus: *mut MmCorpus) {
    if !corpus.is_null() {
        drop(Box::from_raw(corpus));
    }
}

/// Number of levels in the corpus; 0 for null.
#[no_mangle]
pub unsafe extern "C" fn mm_corpus_level_count(corpus: *const MmCorpus) -> usize {
    corpus.as_ref().map_or(0, |c| c.inner.levels.len())
}

/// Train `approach` ("ensemble", "simplified" or "hierarchical") on the
/// corpus, leaving out `withheld` when it is not null.
#[no_mangle]
pub unsafe extern "C" fn mm_generator_train(
    corpus: *const MmCorpus,
    approach: *const c_char,
    withheld: *const c_char,
    out: *mut *mut MmGenerator,
) -> MmStatus {
    guard(|| {
        let Some(corpus) = corpus.as_ref() else {
            return fail(MmStatus::NullArgument, "corpus is null");
        };
        if out.is_null() {
            return fail(MmStatus::NullArgument, "out is null");
        }
        let approach: Approach = match str_arg(approach, "approach").map(str::parse) {
            Ok(Ok(a)) => a,
            Ok(Err(e)) => return fail(MmStatus::InvalidArgument, e),
            Err(s) => return s,
        };
        let training = if withheld.is_null() {
            corpus.inner.clone()
        } else {
            let name = match str_arg(withheld, "withheld") {
                Ok(n) => n,
                Err(s) => return s,
            };
            match corpus.inner.withhold(name) {
                Some((train, _)) => train,
                None => return fail(MmStatus::InvalidArgument, format!("no level named {name:?}")),
            }
        };
        let levels: Vec<_> = training.annotated().collect();
        match TrainedApproach::train(approach, &levels, training.chunk, &training.alphabet) {
            Ok(model) => {
                *out = Box::into_raw(Box::new(MmGenerator {
                    model,
                    alphabet: training.alphabet.clone(),
                }));
                MmStatus::Ok
            }
            Err(e) => fail(MmStatus::ModelError, e.to_string()),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn mm_generator_free(generator: *mut MmGenerator) {
    if !generator.is_null() {
        drop(Box::from_raw(generator));
    }
}

/// Generate one level of `rooms` rooms from `seed`.
#[no_mangle]
pub unsafe extern "C" fn mm_generator_generate(
    generator: *const MmGenerator,
    seed: u64,
    rooms: usize,
    resample_cap: u32,
    out: *mut *mut MmLevel,
) -> MmStatus {
    guard(|| {
        let Some(g) = generator.as_ref() else {
            return fail(MmStatus::NullArgument, "generator is null");
        };
        if out.is_null() {
            return fail(MmStatus::NullArgument, "out is null");
        }
        if rooms == 0 {
            return fail(MmStatus::InvalidArgument, "rooms must be positive");
        }
        match g.model.generate(seed, rooms, resample_cap, &g.alphabet, None) {
            Ok(level) => {
                *out = Box::into_raw(Box::new(MmLevel {
                    level,
                    alphabet: g.alphabet.clone(),
                }));
                MmStatus::Ok
            }
            Err(e) => fail(MmStatus::ModelError, e.to_string()),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn mm_level_free(level: *mut MmLevel) {
    if !level.is_null() {
        drop(Box::from_raw(level));
    }
}

/// The level as text, one row per line, top row first. Null on a null level.
#[no_mangle]
pub unsafe extern "C" fn mm_level_text(level: *const MmLevel) -> *mut c_char {
    level.as_ref().map_or(std::ptr::null_mut(), |l| into_c_string(l.level.grid.to_text()))
}

/// Width and height in tiles.
#[no_mangle]
pub unsafe extern "C" fn mm_level_size(level: *const MmLevel, width: *mut usize, height: *mut usize) -> MmStatus {
    let Some(l) = level.as_ref() else {
        return fail(MmStatus::NullArgument, "level is null");
    };
    if width.is_null() || height.is_null() {
        return fail(MmStatus::NullArgument, "size pointer is null");
    }
    *width = l.level.grid.width();
    *height = l.level.grid.height();
    MmStatus::Ok
}

/// Seam resamples spent building the level.
#[no_mangle]
pub unsafe extern "C" fn mm_level_resample_count(level: *const MmLevel) -> u32 {
    level.as_ref().map_or(0, |l| l.level.resample_count)
}

/// Whether the agent can cross the level with the given jump budget.
#[no_mangle]
pub unsafe extern "C" fn mm_level_is_playable(
    level: *const MmLevel,
    max_rise: u8,
    max_horizontal: u8,
    out: *mut bool,
) -> MmStatus {
    guard(|| {
        let Some(l) = level.as_ref() else {
            return fail(MmStatus::NullArgument, "level is null");
        };
        if out.is_null() {
            return fail(MmStatus::NullArgument, "out is null");
        }
        let jump = JumpModel {
            max_rise,
            max_horizontal,
        };
        *out = level_playable(&l.level, jump, &l.alphabet);
        MmStatus::Ok
    })
}
