//! C ABI for the `robinson` crate.
//!
//! Matrices live behind the opaque [`RobinsonMatrix`] handle. Every fallible
//! function returns a [`RobinsonStatus`]; on failure a description is
//! available from [`robinson_last_error`] on the same thread. Trees are
//! exchanged as JSON documents (points labelled from 1), returned as
//! NUL-terminated strings owned by the caller and released with
//! [`robinson_string_free`]. Orders written into caller buffers use 0-based
//! point indices.
//!
//! The constructions recurse once per tree level, so each call runs on a
//! worker thread with a large stack rather than on the caller's.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use robinson::document::{translate_document, TreeDocument};
use robinson::io::read_matrix;
use robinson::{
    build_dendrogram, mmodule_tree, recognize_robinson, DissimilarityMatrix, Recognition, Scale,
    Weight,
};

/// Stack of the worker thread each call runs on.
const STACK_BYTES: usize = 512 << 20;

/// Result of a call. The first three match the exit codes of the
/// command-line tool.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RobinsonStatus {
    Ok = 0,
    /// The matrix is not Robinson.
    NotRobinson = 1,
    /// Malformed, invalid or mismatched input.
    InvalidInput = 2,
    /// A required pointer argument was null.
    NullArgument = 3,
    /// A caller buffer is too small; the required length was reported.
    BufferTooSmall = 4,
    /// An internal error; the library state is unaffected.
    Internal = 5,
}

/// Which tree to build.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RobinsonTreeKind {
    Pq = 0,
    Mmodule = 1,
    Dendrogram = 2,
}

/// A validated dissimilarity matrix.
pub struct RobinsonMatrix {
    inner: DissimilarityMatrix,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).expect("NUL bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

type Outcome<T> = Result<T, (RobinsonStatus, String)>;

fn invalid(message: impl ToString) -> (RobinsonStatus, String) {
    (RobinsonStatus::InvalidInput, message.to_string())
}

/// Run `f` on a worker thread with a large stack, catching panics, and
/// translate the outcome into a status.
fn call<T: Send>(f: impl FnOnce() -> Outcome<T> + Send) -> Result<T, RobinsonStatus> {
    let joined = std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(STACK_BYTES)
            .spawn_scoped(s, || catch_unwind(AssertUnwindSafe(f)))
            .map(|h| h.join())
    });
    let outcome = match joined {
        Ok(Ok(Ok(outcome))) => outcome,
        Ok(_) => Err((RobinsonStatus::Internal, "internal error".to_string())),
        Err(e) => Err((
            RobinsonStatus::Internal,
            format!("cannot start worker thread: {e}"),
        )),
    };
    outcome.map_err(|(status, message)| {
        set_error(&message);
        status
    })
}

fn status_of(r: Result<(), RobinsonStatus>) -> RobinsonStatus {
    r.err().unwrap_or(RobinsonStatus::Ok)
}

unsafe fn text_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, RobinsonStatus> {
    if p.is_null() {
        set_error(&format!("{what} is null"));
        return Err(RobinsonStatus::NullArgument);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(&format!("{what} is not UTF-8"));
        RobinsonStatus::InvalidInput
    })
}

unsafe fn matrix_arg<'a>(
    p: *const RobinsonMatrix,
) -> Result<&'a DissimilarityMatrix, RobinsonStatus> {
    p.as_ref().map(|m| &m.inner).ok_or_else(|| {
        set_error("matrix is null");
        RobinsonStatus::NullArgument
    })
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, RobinsonStatus> {
    p.as_mut().ok_or_else(|| {
        set_error(&format!("{what} is null"));
        RobinsonStatus::NullArgument
    })
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s)
        .expect("documents contain no NUL")
        .into_raw()
}

/// Message describing the last failure on this thread; empty if none. The
/// pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn robinson_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parse and validate a matrix in the text format (full square or upper
/// triangle, decimal entries). On success `*out` receives a handle to
/// release with [`robinson_matrix_free`].
#[no_mangle]
pub unsafe extern "C" fn robinson_matrix_parse(
    text: *const c_char,
    out: *mut *mut RobinsonMatrix,
) -> RobinsonStatus {
    status_of((|| {
        let text = text_arg(text, "text")?;
        let out = out_arg(out, "out")?;
        let m = call(|| read_matrix(text).map_err(invalid))?;
        *out = Box::into_raw(Box::new(RobinsonMatrix { inner: m }));
        Ok(())
    })())
}

/// Build a matrix from `n * n` integer entries in row-major order. The
/// entries must be symmetric with a zero diagonal.
#[no_mangle]
pub unsafe extern "C" fn robinson_matrix_from_values(
    n: usize,
    values: *const u64,
    out: *mut *mut RobinsonMatrix,
) -> RobinsonStatus {
    status_of((|| {
        if values.is_null() {
            set_error("values is null");
            return Err(RobinsonStatus::NullArgument);
        }
        let out = out_arg(out, "out")?;
        let len = n.checked_mul(n).ok_or_else(|| {
            set_error("matrix size overflows");
            RobinsonStatus::InvalidInput
        })?;
        let data: Vec<Weight> = std::slice::from_raw_parts(values, len)
            .iter()
            .map(|&v| Weight(v))
            .collect();
        let m = call(|| {
            DissimilarityMatrix::new(n, data, Scale(0)).map_err(|e| invalid(e.one_based()))
        })?;
        *out = Box::into_raw(Box::new(RobinsonMatrix { inner: m }));
        Ok(())
    })())
}

/// Release a matrix handle. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn robinson_matrix_free(matrix: *mut RobinsonMatrix) {
    if !matrix.is_null() {
        drop(Box::from_raw(matrix));
    }
}

/// Number of points of a matrix; 0 for null.
#[no_mangle]
pub unsafe extern "C" fn robinson_matrix_size(matrix: *const RobinsonMatrix) -> usize {
    matrix.as_ref().map_or(0, |m| m.inner.n())
}

/// Decide whether the matrix is Robinson. On success a compatible order
/// (0-based indices) is written to `order`, which must hold `capacity`
/// entries; `order` may be null when `capacity` is 0. `*order_len`, if not
/// null, receives the number of points whenever the matrix is Robinson,
/// including when the buffer is too small.
#[no_mangle]
pub unsafe extern "C" fn robinson_recognize(
    matrix: *const RobinsonMatrix,
    order: *mut usize,
    capacity: usize,
    order_len: *mut usize,
) -> RobinsonStatus {
    status_of((|| {
        let m = matrix_arg(matrix)?;
        let found = call(|| match recognize_robinson(m) {
            Recognition::Accepted { order, .. } => Ok(order),
            Recognition::Rejected { reason } => {
                Err((RobinsonStatus::NotRobinson, reason.one_based().to_string()))
            }
        })?;
        if let Some(len) = order_len.as_mut() {
            *len = found.len();
        }
        if capacity < found.len() {
            set_error(&format!(
                "order buffer holds {capacity} entries; {} needed",
                found.len()
            ));
            return Err(RobinsonStatus::BufferTooSmall);
        }
        if order.is_null() {
            set_error("order is null");
            return Err(RobinsonStatus::NullArgument);
        }
        ptr::copy_nonoverlapping(found.as_ptr(), order, found.len());
        Ok(())
    })())
}

fn tree_json(m: &DissimilarityMatrix, kind: RobinsonTreeKind) -> Outcome<String> {
    let not_robinson =
        |e: robinson::Error| (RobinsonStatus::NotRobinson, e.one_based().to_string());
    let doc = match kind {
        RobinsonTreeKind::Dendrogram => TreeDocument::from_dendrogram(
            &build_dendrogram(m, m.all().as_slice()).map_err(invalid)?,
            m.scale(),
        ),
        RobinsonTreeKind::Pq | RobinsonTreeKind::Mmodule => {
            let tree = match recognize_robinson(m) {
                Recognition::Accepted { tree, .. } => tree,
                Recognition::Rejected { reason } => return Err(not_robinson(reason)),
            };
            if kind == RobinsonTreeKind::Pq {
                TreeDocument::from_pq(&tree, Some(m))
            } else {
                TreeDocument::from_mmodule(
                    &mmodule_tree(m, &m.all()).map_err(not_robinson)?.canonical(),
                    m.scale(),
                )
            }
        }
    };
    Ok(doc.to_json())
}

/// Build one tree of the matrix as a JSON document. The PQ-tree and the
/// mmodule tree require a Robinson matrix; the dendrogram does not.
#[no_mangle]
pub unsafe extern "C" fn robinson_tree_json(
    matrix: *const RobinsonMatrix,
    kind: RobinsonTreeKind,
    out: *mut *mut c_char,
) -> RobinsonStatus {
    status_of((|| {
        let m = matrix_arg(matrix)?;
        let out = out_arg(out, "out")?;
        *out = into_c_string(call(|| tree_json(m, kind))?);
        Ok(())
    })())
}

fn translate(m: &DissimilarityMatrix, doc: &str) -> Outcome<String> {
    let doc = TreeDocument::from_json(doc).map_err(invalid)?;
    if !recognize_robinson(m).is_accepted() {
        return Err((
            RobinsonStatus::NotRobinson,
            "the matrix is not Robinson".into(),
        ));
    }
    Ok(translate_document(m, &doc)
        .map_err(|e| invalid(e.one_based()))?
        .to_json())
}

/// Translate a `pq` document into the `mmodule` document of the same
/// matrix, or back.
#[no_mangle]
pub unsafe extern "C" fn robinson_translate_json(
    matrix: *const RobinsonMatrix,
    document: *const c_char,
    out: *mut *mut c_char,
) -> RobinsonStatus {
    status_of((|| {
        let m = matrix_arg(matrix)?;
        let doc = text_arg(document, "document")?;
        let out = out_arg(out, "out")?;
        *out = into_c_string(call(|| translate(m, doc))?);
        Ok(())
    })())
}

/// Release a string returned by this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn robinson_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
