use std::ffi::{CStr, CString};
use std::ptr;

use fairspread_ffi::*;

const TWO_STARS: &str = r#"{"n": 10, "directed": false, "p": 1.0,
  "edges": [[0,1],[0,2],[0,3],[0,4],[5,6],[5,7]],
  "communities": [0,0,0,0,0,1,1,1,1,1]}"#;

fn parse(text: &str) -> *mut FsGraph {
    let c = CString::new(text).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { fs_graph_parse(c.as_ptr(), &mut g) }, FsStatus::Ok);
    g
}

fn last_error() -> String {
    let p = fs_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn select_and_evaluate() {
    let g = parse(TWO_STARS);
    unsafe {
        assert_eq!(fs_graph_vertex_count(g), 10);
        assert_eq!(fs_graph_community_count(g), 2);
        let mut sizes = [0usize; 2];
        let mut n = 0;
        assert_eq!(fs_graph_community_sizes(g, sizes.as_mut_ptr(), 2, &mut n), FsStatus::Ok);
        assert_eq!(sizes, [5, 5]);

        let mut sk = ptr::null_mut();
        assert_eq!(fs_sketches_sample(g, 8, 3, &mut sk), FsStatus::Ok);
        for method in [FsMethod::Utilitarian, FsMethod::Welfare, FsMethod::Maximin, FsMethod::Dc] {
            let opts = fs_select_options_default(method, 2);
            let mut seeds = [usize::MAX; 2];
            let mut count = 0;
            assert_eq!(fs_select(g, sk, &opts, seeds.as_mut_ptr(), 2, &mut count), FsStatus::Ok, "{method:?}");
            assert_eq!((count, seeds), (2, [0, 5]), "{method:?}");
        }

        let seeds = [0usize, 5];
        let mut est = [0.0; 2];
        let mut exact = [0.0; 2];
        assert_eq!(fs_estimate_utilities(g, sk, seeds.as_ptr(), 2, est.as_mut_ptr(), 2, &mut n), FsStatus::Ok);
        assert_eq!(fs_exact_utilities(g, seeds.as_ptr(), 2, exact.as_mut_ptr(), 2, &mut n), FsStatus::Ok);
        assert_eq!(est, [1.0, 0.6]);
        assert_eq!(est, exact);

        let mut w = 0.0;
        assert_eq!(fs_welfare(exact.as_ptr(), sizes.as_ptr(), 2, 0.0, 0.05, &mut w), FsStatus::Ok);
        assert!((w - 5.0 * 0.6f64.ln()).abs() < 1e-12);
        let mut gap = 0.0;
        assert_eq!(fs_utility_gap(exact.as_ptr(), 2, &mut gap), FsStatus::Ok);
        assert!((gap - 0.4).abs() < 1e-12);
        let mut p = 0.0;
        assert_eq!(fs_price_of_fairness(3.0, 4.0, &mut p), FsStatus::Ok);
        assert_eq!(p, 0.25);

        fs_sketches_free(sk);
        fs_graph_free(g);
    }
}

#[test]
fn errors_map_to_status_codes() {
    unsafe {
        let mut g = ptr::null_mut();
        let bad = CString::new("{\"n\": 2}").unwrap();
        assert_eq!(fs_graph_parse(bad.as_ptr(), &mut g), FsStatus::Malformed);
        assert!(g.is_null());
        assert!(last_error().contains("malformed"));

        let missing = CString::new("/nonexistent/graph.json").unwrap();
        assert_eq!(fs_graph_load(missing.as_ptr(), &mut g), FsStatus::FileError);
        assert_eq!(fs_graph_parse(ptr::null(), &mut g), FsStatus::NullPointer);

        let g = parse(TWO_STARS);
        let mut sk = ptr::null_mut();
        assert_eq!(fs_sketches_sample(g, 0, 1, &mut sk), FsStatus::InvalidArgument);
        assert_eq!(fs_sketches_sample(g, 4, 1, &mut sk), FsStatus::Ok);

        let opts = fs_select_options_default(FsMethod::Welfare, 11);
        let mut seeds = [0usize; 11];
        let mut count = 0;
        assert_eq!(fs_select(g, sk, &opts, seeds.as_mut_ptr(), 11, &mut count), FsStatus::Infeasible);

        let opts = fs_select_options_default(FsMethod::Utilitarian, 3);
        assert_eq!(fs_select(g, sk, &opts, seeds.as_mut_ptr(), 1, &mut count), FsStatus::BufferTooSmall);
        assert_eq!(count, 3);

        let mut out = 0.0;
        assert_eq!(fs_price_of_fairness(1.0, 0.0, &mut out), FsStatus::InvalidArgument);
        assert_eq!(fs_price_of_fairness(1.0, 2.0, &mut out), FsStatus::Ok);
        assert!(fs_last_error().is_null());

        fs_sketches_free(sk);
        fs_graph_free(g);
        fs_graph_free(ptr::null_mut());
    }
}

#[test]
fn sbm_generation_is_seeded() {
    let spec = CString::new(r#"{"community_sizes": [20, 10], "within_prob": [0.3, 0.2], "between_prob": 0.05}"#).unwrap();
    unsafe {
        let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(fs_graph_generate_sbm(spec.as_ptr(), 9, &mut a), FsStatus::Ok);
        assert_eq!(fs_graph_generate_sbm(spec.as_ptr(), 9, &mut b), FsStatus::Ok);
        assert_eq!(fs_graph_vertex_count(a), 30);
        let (mut ska, mut skb) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(fs_sketches_sample(a, 50, 1, &mut ska), FsStatus::Ok);
        assert_eq!(fs_sketches_sample(b, 50, 1, &mut skb), FsStatus::Ok);
        let opts = fs_select_options_default(FsMethod::Welfare, 3);
        let (mut sa, mut sb) = ([0usize; 3], [0usize; 3]);
        let mut n = 0;
        assert_eq!(fs_select(a, ska, &opts, sa.as_mut_ptr(), 3, &mut n), FsStatus::Ok);
        assert_eq!(fs_select(b, skb, &opts, sb.as_mut_ptr(), 3, &mut n), FsStatus::Ok);
        assert_eq!(sa, sb);
        let c = CStr::from_ptr(fs_version()).to_str().unwrap();
        assert_eq!(c, env!("CARGO_PKG_VERSION"));
        for h in [ska, skb] {
            fs_sketches_free(h);
        }
        fs_graph_free(a);
        fs_graph_free(b);
    }
}
