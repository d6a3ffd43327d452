//! C ABI over the `fairspread` library.
//!
//! Objects cross the boundary as opaque handles created by `fs_*_new`/`fs_*_load`
//! style functions and released with the matching `fs_*_free`. Every fallible
//! call returns an [`FsStatus`]; on failure [`fs_last_error`] describes the error
//! for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fairspread::cascade::{estimate_utilities, exact_utilities, sample_sketches, SketchSet, UtilityVector};
use fairspread::graph::{CommunityPartition, Graph, SeedSet};
use fairspread::io::{load_graph, parse_graph};
use fairspread::optimize::{
    dc_lower_bounds, run_greedy, saturate_dc_with, saturate_maximin_with, Evaluator, Objective, Strategy,
};
use fairspread::sbm::{generate_sbm, SbmSpec};
use fairspread::welfare::{pof, utility_gap, welfare, WelfareParams};
use fairspread::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    FileError = 3,
    Malformed = 4,
    Infeasible = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// Seed selector for [`fs_select`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FsMethod {
    Utilitarian = 0,
    Welfare = 1,
    Maximin = 2,
    Dc = 3,
}

/// A graph together with its community partition.
pub struct FsGraph {
    graph: Graph,
    partition: CommunityPartition,
}

/// Live-edge sketches sampled from one graph.
pub struct FsSketches {
    sketches: SketchSet,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FsStatus {
    match e {
        Error::File { .. } | Error::Io(_) => FsStatus::FileError,
        Error::Malformed(_)
        | Error::Json(_)
        | Error::VertexOutOfRange { .. }
        | Error::SelfLoop(_)
        | Error::DuplicateEdge(..)
        | Error::Partition(_)
        | Error::GraphMismatch { .. } => FsStatus::Malformed,
        Error::BudgetTooLarge { .. } | Error::EnumerationLimit { .. } | Error::CombinatorialLimit { .. } => {
            FsStatus::Infeasible
        }
        _ => FsStatus::InvalidArgument,
    }
}

struct Fail(FsStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(FsStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, turning errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> FsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            FsStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            FsStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(FsStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Copies `values` into a caller buffer of `capacity` entries; `written` gets the
/// full length even when the buffer is too small.
unsafe fn write_out<T: Copy>(values: &[T], out: *mut T, capacity: usize, written: *mut usize) -> Result<(), Fail> {
    if !written.is_null() {
        *written = values.len();
    }
    if values.len() > capacity {
        return Err(Fail(
            FsStatus::BufferTooSmall,
            format!("output needs {} entries, buffer holds {capacity}", values.len()),
        ));
    }
    if !values.is_empty() {
        if out.is_null() {
            return Err(null("output buffer"));
        }
        ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    }
    Ok(())
}

fn seed_set(ids: &[usize], n: usize) -> Result<SeedSet, Fail> {
    Ok(SeedSet::from_vertices(ids.iter().copied(), n)?)
}

/// Message for the last failed call on this thread, or null after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn fs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

fn boxed_graph(out: *mut *mut FsGraph, (graph, partition): (Graph, CommunityPartition)) -> Result<(), Fail> {
    let out = unsafe { out_arg(out, "out")? };
    *out = Box::into_raw(Box::new(FsGraph { graph, partition }));
    Ok(())
}

/// Loads a graph document from a file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fs_graph_load(path: *const c_char, out: *mut *mut FsGraph) -> FsStatus {
    guard(|| boxed_graph(out, load_graph(str_arg(path, "path")?)?))
}

/// Parses a graph document from JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fs_graph_parse(json: *const c_char, out: *mut *mut FsGraph) -> FsStatus {
    guard(|| boxed_graph(out, parse_graph(str_arg(json, "json")?)?))
}

/// Samples a stochastic block model from a JSON spec
/// (`community_sizes`, `within_prob`, `between_prob`, optional `p`).
///
/// # Safety
/// `spec_json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fs_graph_generate_sbm(spec_json: *const c_char, seed: u64, out: *mut *mut FsGraph) -> FsStatus {
    guard(|| {
        let spec: SbmSpec =
            serde_json::from_str(str_arg(spec_json, "spec_json")?).map_err(|e| Fail(FsStatus::Malformed, e.to_string()))?;
        boxed_graph(out, generate_sbm(&spec, seed)?)
    })
}

/// # Safety
/// `graph` must come from an `fs_graph_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fs_graph_free(graph: *mut FsGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Vertex count, or 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fs_graph_vertex_count(graph: *const FsGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.graph.n())
}

/// Number of communities, or 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fs_graph_community_count(graph: *const FsGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.partition.num_communities())
}

/// Community sizes into `out` (capacity `capacity`); `written` receives the count.
///
/// # Safety
/// Pointers must be valid for the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn fs_graph_community_sizes(
    graph: *const FsGraph,
    out: *mut usize,
    capacity: usize,
    written: *mut usize,
) -> FsStatus {
    guard(|| write_out(handle(graph, "graph")?.partition.sizes(), out, capacity, written))
}

/// Samples `r` live-edge sketches; the same `(graph, r, seed)` always gives the same set.
///
/// # Safety
/// `graph` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fs_sketches_sample(
    graph: *const FsGraph,
    r: usize,
    seed: u64,
    out: *mut *mut FsSketches,
) -> FsStatus {
    guard(|| {
        let g = handle(graph, "graph")?;
        let sketches = sample_sketches(&g.graph, r, seed)?;
        *out_arg(out, "out")? = Box::into_raw(Box::new(FsSketches { sketches }));
        Ok(())
    })
}

/// # Safety
/// `sketches` must come from [`fs_sketches_sample`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fs_sketches_free(sketches: *mut FsSketches) {
    if !sketches.is_null() {
        drop(Box::from_raw(sketches));
    }
}

fn check_pair(g: &FsGraph, sk: &FsSketches) -> Result<(), Fail> {
    if g.graph.n() != sk.sketches.vertex_count() {
        return Err(Fail(FsStatus::InvalidArgument, "sketches were sampled from a different graph".into()));
    }
    Ok(())
}

/// Sketch estimate of per-community influenced fractions of `seeds`.
///
/// # Safety
/// Handles must be live; `seeds` holds `seed_count` ids and `out` has room for
/// `capacity` values.
#[no_mangle]
pub unsafe extern "C" fn fs_estimate_utilities(
    graph: *const FsGraph,
    sketches: *const FsSketches,
    seeds: *const usize,
    seed_count: usize,
    out: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> FsStatus {
    guard(|| {
        let (g, sk) = (handle(graph, "graph")?, handle(sketches, "sketches")?);
        check_pair(g, sk)?;
        let s = seed_set(slice_arg(seeds, seed_count, "seeds")?, g.graph.n())?;
        let u = estimate_utilities(&sk.sketches, &s, &g.partition)?;
        write_out(u.values(), out, capacity, written)
    })
}

/// Exact per-community influenced fractions (small or forest-shaped graphs).
///
/// # Safety
/// As [`fs_estimate_utilities`].
#[no_mangle]
pub unsafe extern "C" fn fs_exact_utilities(
    graph: *const FsGraph,
    seeds: *const usize,
    seed_count: usize,
    out: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> FsStatus {
    guard(|| {
        let g = handle(graph, "graph")?;
        let s = seed_set(slice_arg(seeds, seed_count, "seeds")?, g.graph.n())?;
        let u = exact_utilities(&g.graph, &s, &g.partition)?;
        write_out(u.values(), out, capacity, written)
    })
}

/// Parameters for [`fs_select`]. `epsilon <= 0` means the default floor `1/(2n)`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FsSelectOptions {
    pub method: FsMethod,
    pub k: usize,
    pub alpha: f64,
    pub epsilon: f64,
    /// Tolerance for the maximin and DC selectors.
    pub tol: f64,
    /// Seed for the sketches behind the DC bounds.
    pub dc_seed: u64,
}

/// Options with the library defaults for `method` and budget `k`.
#[no_mangle]
pub extern "C" fn fs_select_options_default(method: FsMethod, k: usize) -> FsSelectOptions {
    FsSelectOptions { method, k, alpha: 0.0, epsilon: 0.0, tol: fairspread::optimize::DEFAULT_TOL, dc_seed: 0 }
}

/// Chooses up to `k` seeds; ids go to `out_seeds` in ascending order.
///
/// # Safety
/// Handles must be live, `options` valid, and `out_seeds` has room for `capacity` ids.
#[no_mangle]
pub unsafe extern "C" fn fs_select(
    graph: *const FsGraph,
    sketches: *const FsSketches,
    options: *const FsSelectOptions,
    out_seeds: *mut usize,
    capacity: usize,
    written: *mut usize,
) -> FsStatus {
    guard(|| {
        let (g, sk, o) = (handle(graph, "graph")?, handle(sketches, "sketches")?, handle(options, "options")?);
        check_pair(g, sk)?;
        let ev = Evaluator::new(&sk.sketches, &g.partition)?;
        let seeds = match o.method {
            FsMethod::Utilitarian => run_greedy(&ev, &Objective::Total, None, o.k, Strategy::Lazy)?.0,
            FsMethod::Welfare => {
                let eps = if o.epsilon > 0.0 { o.epsilon } else { 1.0 / (2.0 * g.graph.n() as f64) };
                let params = WelfareParams::new(o.alpha, eps)?;
                run_greedy(&ev, &Objective::Welfare(params), None, o.k, Strategy::Lazy)?.0
            }
            FsMethod::Maximin => saturate_maximin_with(&ev, o.k, o.tol)?.seeds,
            FsMethod::Dc => {
                let bounds = dc_lower_bounds(&g.graph, &g.partition, o.k, sk.sketches.len(), o.dc_seed)?;
                saturate_dc_with(&ev, o.k, &bounds, o.tol)?.seeds
            }
        };
        write_out(seeds.vertices(), out_seeds, capacity, written)
    })
}

/// Isoelastic welfare of `utilities` weighted by `sizes`.
///
/// # Safety
/// `utilities` and `sizes` hold `count` entries; `out` is valid.
#[no_mangle]
pub unsafe extern "C" fn fs_welfare(
    utilities: *const f64,
    sizes: *const usize,
    count: usize,
    alpha: f64,
    epsilon: f64,
    out: *mut f64,
) -> FsStatus {
    guard(|| {
        let u = UtilityVector::new(
            slice_arg(utilities, count, "utilities")?.to_vec(),
            slice_arg(sizes, count, "sizes")?.to_vec(),
        )?;
        *out_arg(out, "out")? = welfare(&u, &WelfareParams::new(alpha, epsilon)?);
        Ok(())
    })
}

/// Largest minus smallest entry.
///
/// # Safety
/// `utilities` holds `count` entries; `out` is valid.
#[no_mangle]
pub unsafe extern "C" fn fs_utility_gap(utilities: *const f64, count: usize, out: *mut f64) -> FsStatus {
    guard(|| {
        let values = slice_arg(utilities, count, "utilities")?;
        let u = UtilityVector::uniform(values.to_vec(), 1)?;
        *out_arg(out, "out")? = utility_gap(&u);
        Ok(())
    })
}

/// Price of fairness `1 - fair_total / im_total`, clamped to `[0, 1]`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fs_price_of_fairness(fair_total: f64, im_total: f64, out: *mut f64) -> FsStatus {
    guard(|| {
        *out_arg(out, "out")? = pof(fair_total, im_total)?;
        Ok(())
    })
}
