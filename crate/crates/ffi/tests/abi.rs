use std::ffi::{c_char, CStr, CString};
use std::ptr;

use mmlevel_ffi::*;

fn corpus_dir() -> CString {
    CString::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/synthetic")).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    mm_string_free(s);
    out
}

unsafe fn load() -> *mut MmCorpus {
    let mut corpus = ptr::null_mut();
    assert_eq!(mm_corpus_load(corpus_dir().as_ptr(), &mut corpus), MmStatus::Ok);
    corpus
}

unsafe fn train(corpus: *const MmCorpus, approach: &str) -> *mut MmGenerator {
    let name = CString::new(approach).unwrap();
    let withheld = CString::new("synth_3.txt").unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(mm_generator_train(corpus, name.as_ptr(), withheld.as_ptr(), &mut g), MmStatus::Ok);
    g
}

unsafe fn level_text(g: *const MmGenerator, seed: u64) -> String {
    let mut level = ptr::null_mut();
    assert_eq!(mm_generator_generate(g, seed, 8, 70, &mut level), MmStatus::Ok);
    let text = take(mm_level_text(level));
    mm_level_free(level);
    text
}

#[test]
fn train_generate_and_inspect() {
    unsafe {
        let corpus = load();
        assert_eq!(mm_corpus_level_count(corpus), 3);
        for approach in ["ensemble", "simplified", "hierarchical"] {
            let g = train(corpus, approach);
            let mut level = ptr::null_mut();
            assert_eq!(mm_generator_generate(g, 9, 8, 70, &mut level), MmStatus::Ok);
            let (mut w, mut h) = (0, 0);
            assert_eq!(mm_level_size(level, &mut w, &mut h), MmStatus::Ok);
            assert_eq!((w % 16, h % 15), (0, 0));
            let text = take(mm_level_text(level));
            assert_eq!(text.lines().count(), h);
            assert!(text.lines().all(|l| l.len() == w));
            assert!(mm_level_resample_count(level) <= 70);
            let mut playable = false;
            assert_eq!(mm_level_is_playable(level, 4, 5, &mut playable), MmStatus::Ok);
            mm_level_free(level);
            mm_generator_free(g);
        }
        mm_corpus_free(corpus);
    }
}

#[test]
fn generation_is_seeded() {
    unsafe {
        let corpus = load();
        let g = train(corpus, "ensemble");
        assert_eq!(level_text(g, 3), level_text(g, 3));
        mm_generator_free(g);
        mm_corpus_free(corpus);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut corpus = ptr::null_mut();
        assert_eq!(mm_corpus_load(ptr::null(), &mut corpus), MmStatus::NullArgument);
        assert!(take(mm_last_error()).contains("dir"));

        let missing = CString::new("/nonexistent/levels").unwrap();
        assert_eq!(mm_corpus_load(missing.as_ptr(), &mut corpus), MmStatus::DataError);
        assert!(corpus.is_null());
        assert!(take(mm_last_error()).contains("/nonexistent/levels"));

        let corpus = load();
        let bogus = CString::new("bogus").unwrap();
        let mut g = ptr::null_mut();
        assert_eq!(mm_generator_train(corpus, bogus.as_ptr(), ptr::null(), &mut g), MmStatus::InvalidArgument);
        assert!(take(mm_last_error()).contains("bogus"));

        let g = train(corpus, "simplified");
        let mut level = ptr::null_mut();
        assert_eq!(mm_generator_generate(g, 1, 0, 70, &mut level), MmStatus::InvalidArgument);
        assert_eq!(mm_generator_generate(ptr::null(), 1, 4, 70, &mut level), MmStatus::NullArgument);
        assert!(level.is_null());
        mm_generator_free(g);
        mm_corpus_free(corpus);
    }
}

#[test]
fn null_handles_are_tolerated() {
    unsafe {
        mm_corpus_free(ptr::null_mut());
        mm_generator_free(ptr::null_mut());
        mm_level_free(ptr::null_mut());
        mm_string_free(ptr::null_mut());
        assert_eq!(mm_corpus_level_count(ptr::null()), 0);
        assert!(mm_level_text(ptr::null()).is_null());
        let version = CStr::from_ptr(mm_version()).to_str().unwrap();
        assert_eq!(version, env!("CARGO_PKG_VERSION"));
    }
}
