//! C ABI over `toeplitz_core`.
//!
//! Every function returns a [`ToeplitzStatus`]; results go through out
//! pointers. On failure `toeplitz_last_error()` describes the cause. Handles
//! come from `toeplitz_subshift_new` / `toeplitz_subshift_from_preset` and
//! are released with `toeplitz_subshift_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use toeplitz_core::boshernitzan::bosh_verdict;
use toeplitz_core::complexity::{complexity, complexity_oracle, growth};
use toeplitz_core::debruijn::{palindrome_oracle, palindromes};
use toeplitz_core::grammar::parse_coding;
use toeplitz_core::presets::preset;
use toeplitz_core::repetitivity::{repetitivity, repetitivity_oracle, Decision};
use toeplitz_core::spectral::{finite_section_spectrum, lyapunov_estimate, CoefficientMap};
use toeplitz_core::{Error, Subshift};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToeplitzStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    Budget = 5,
    Horizon = 6,
    Overflow = 7,
    OutOfRange = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToeplitzVerdict {
    Satisfied = 0,
    Violated = 1,
    Inconclusive = 2,
}

/// Opaque subshift handle.
pub struct ToeplitzSubshift {
    inner: Subshift,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let text = CString::new(message.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
}

fn status_of(e: &Error) -> ToeplitzStatus {
    match e {
        Error::Parse(_) | Error::UnknownRule(_) => ToeplitzStatus::Parse,
        Error::BudgetExceeded { .. } => ToeplitzStatus::Budget,
        Error::HorizonExceeded { .. } => ToeplitzStatus::Horizon,
        Error::Overflow(_) => ToeplitzStatus::Overflow,
        Error::OutOfTheoremRange { .. } | Error::LevelOutOfRange { .. } => {
            ToeplitzStatus::OutOfRange
        }
        _ => ToeplitzStatus::InvalidArgument,
    }
}

/// Runs `f`, recording errors and converting panics.
fn guard(f: impl FnOnce() -> Result<(), (ToeplitzStatus, String)>) -> ToeplitzStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ToeplitzStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            ToeplitzStatus::Panic
        }
    }
}

type Failure = (ToeplitzStatus, String);

fn lift<T>(r: toeplitz_core::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> Failure {
    (ToeplitzStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (ToeplitzStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a>(h: *const ToeplitzSubshift) -> Result<&'a Subshift, Failure> {
    h.as_ref().map(|h| &h.inner).ok_or_else(|| null("handle"))
}

unsafe fn out_ref<'a, T>(p: *mut T) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null("output pointer"))
}

fn big(v: BigUint) -> Result<u64, Failure> {
    v.to_u64().ok_or_else(|| {
        (
            ToeplitzStatus::Overflow,
            format!("{v} does not fit in 64 bits"),
        )
    })
}

/// The last error message on this thread, or null. Valid until the next
/// call into this library on the same thread.
#[no_mangle]
pub extern "C" fn toeplitz_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Builds a subshift from a coding spec such as `"a:2 | x:2 y:2 z:2"`.
///
/// # Safety
/// `spec` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn toeplitz_subshift_new(
    spec: *const c_char,
    out: *mut *mut ToeplitzSubshift,
) -> ToeplitzStatus {
    guard(|| {
        let out = out_ref(out)?;
        let spec = text(spec, "spec")?;
        let coding = lift(parse_coding(spec).and_then(|raw| raw.normalize()))?;
        *out = Box::into_raw(Box::new(ToeplitzSubshift {
            inner: Subshift::new(coding),
        }));
        Ok(())
    })
}

/// Builds a subshift from a preset name such as `"grigorchuk"`.
///
/// # Safety
/// `name` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn toeplitz_subshift_from_preset(
    name: *const c_char,
    out: *mut *mut ToeplitzSubshift,
) -> ToeplitzStatus {
    guard(|| {
        let out = out_ref(out)?;
        let name = text(name, "name")?;
        let coding = lift(preset(name, None))?;
        *out = Box::into_raw(Box::new(ToeplitzSubshift {
            inner: Subshift::new(coding),
        }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `h` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn toeplitz_subshift_free(h: *mut ToeplitzSubshift) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Number of letters; letter ids used by the coefficient arrays run below it.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn toeplitz_alphabet_size(
    h: *const ToeplitzSubshift,
    out: *mut usize,
) -> ToeplitzStatus {
    guard(|| {
        *out_ref(out)? = handle(h)?.coding().alphabet().len();
        Ok(())
    })
}

/// Writes the first `len` letters as a nul-terminated string. When `cap` is
/// too small, `*needed` receives the required capacity.
///
/// # Safety
/// `buf` must hold `cap` bytes; `needed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn toeplitz_word_prefix(
    h: *const ToeplitzSubshift,
    len: usize,
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> ToeplitzStatus {
    guard(|| {
        let sub = handle(h)?;
        let needed = out_ref(needed)?;
        let word = sub.render(&lift(sub.word_prefix(len))?);
        *needed = word.len() + 1;
        if buf.is_null() || cap < word.len() + 1 {
            return Err((
                ToeplitzStatus::BufferTooSmall,
                format!("need {} bytes", word.len() + 1),
            ));
        }
        ptr::copy_nonoverlapping(word.as_ptr().cast::<c_char>(), buf, word.len());
        *buf.add(word.len()) = 0;
        Ok(())
    })
}

/// Shared body of the length-to-count functions.
unsafe fn count(
    h: *const ToeplitzSubshift,
    len: u64,
    out: *mut u64,
    f: impl FnOnce(&Subshift, u64) -> Result<u64, Failure>,
) -> ToeplitzStatus {
    guard(|| {
        let sub = handle(h)?;
        let out = out_ref(out)?;
        *out = f(sub, len)?;
        Ok(())
    })
}

fn small(len: u64) -> Result<usize, Failure> {
    len.to_usize()
        .ok_or_else(|| (ToeplitzStatus::Overflow, format!("length {len}")))
}

/// Number of factors of length `len`, by closed form.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn toeplitz_complexity(
    h: *const ToeplitzSubshift,
    len: u64,
    out: *mut u64,
) -> ToeplitzStatus {
    count(h, len, out, |s, l| big(lift(complexity(s.coding(), l))?))
}

/// Number of factors of length `len`, by enumeration.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn toeplitz_complexity_oracle(
    h: *const ToeplitzSubshift,
    len: u64,
    out: *mut u64,
) -> ToeplitzStatus {
    count(h, len, out, |s, l| {
        Ok(lift(complexity_oracle(s, small(l)?))? as u64)
    })
}

/// Complexity difference `p(len + 1) - p(len)`.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn toeplitz_growth(
    h: *const ToeplitzSubshift,
    len: u64,
    out: *mut u64,
) -> ToeplitzStatus {
    count(h, len, out, |s, l| big(lift(growth(s.coding(), l))?))
}

/// Palindromic factors of length `len >= 1`, by closed form.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn toeplitz_palindromes(
    h: *const ToeplitzSubshift,
    len: u64,
    out: *mut u64,
) -> ToeplitzStatus {
    count(h, len, out, |s, l| big(lift(palindromes(s.coding(), l))?))
}

/// Palindromic factors of length `len`, by enumeration.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn toeplitz_palindromes_oracle(
    h: *const ToeplitzSubshift,
    len: u64,
    out: *mut u64,
) -> ToeplitzStatus {
    count(h, len, out, |s, l| {
        Ok(lift(palindrome_oracle(s, small(l)?))? as u64)
    })
}

/// Repetitivity by closed form; `OUT_OF_RANGE` below its first length.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn toeplitz_repetitivity(
    h: *const ToeplitzSubshift,
    len: u64,
    out: *mut u64,
) -> ToeplitzStatus {
    count(h, len, out, |s, l| big(lift(repetitivity(s.coding(), l))?))
}

/// Repetitivity by containment search.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn toeplitz_repetitivity_oracle(
    h: *const ToeplitzSubshift,
    len: u64,
    out: *mut u64,
) -> ToeplitzStatus {
    count(h, len, out, |s, l| {
        Ok(lift(repetitivity_oracle(s, small(l)?))? as u64)
    })
}

/// Boshernitzan verdict from `horizon` product samples.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn toeplitz_bosh_verdict(
    h: *const ToeplitzSubshift,
    horizon: usize,
    out: *mut ToeplitzVerdict,
) -> ToeplitzStatus {
    guard(|| {
        let sub = handle(h)?;
        let out = out_ref(out)?;
        *out = match lift(bosh_verdict(sub.coding(), horizon))?.verdict {
            Decision::Satisfied => ToeplitzVerdict::Satisfied,
            Decision::Violated => ToeplitzVerdict::Violated,
            Decision::Inconclusive => ToeplitzVerdict::Inconclusive,
        };
        Ok(())
    })
}

unsafe fn coefficients(
    sub: &Subshift,
    p: *const f64,
    q: *const f64,
    letters: usize,
) -> Result<CoefficientMap, Failure> {
    if p.is_null() || q.is_null() {
        return Err(null("coefficient array"));
    }
    let size = sub.coding().alphabet().len();
    if letters != size {
        return Err((
            ToeplitzStatus::InvalidArgument,
            format!("expected {size} coefficients per array, got {letters}"),
        ));
    }
    let exact = |xs: &[f64]| -> Result<Vec<_>, Failure> {
        xs.iter()
            .map(|&x| {
                BigRational::from_float(x).ok_or_else(|| {
                    (
                        ToeplitzStatus::InvalidArgument,
                        format!("coefficient {x} is not finite"),
                    )
                })
            })
            .collect()
    };
    let p = exact(std::slice::from_raw_parts(p, letters))?;
    let q = exact(std::slice::from_raw_parts(q, letters))?;
    lift(CoefficientMap::new(p, q))
}

/// Eigenvalues (ascending) of the `size`-point section with diagonal `q` and
/// off-diagonal `p`, both indexed by letter id.
///
/// # Safety
/// `p`, `q` must hold `letters` values; `out` must hold `size` values.
#[no_mangle]
pub unsafe extern "C" fn toeplitz_finite_section_spectrum(
    h: *const ToeplitzSubshift,
    p: *const f64,
    q: *const f64,
    letters: usize,
    size: usize,
    out: *mut f64,
) -> ToeplitzStatus {
    guard(|| {
        let sub = handle(h)?;
        if out.is_null() {
            return Err(null("output array"));
        }
        let coeff = coefficients(sub, p, q, letters)?;
        let spectrum = lift(finite_section_spectrum(sub, &coeff, size, 0.0))?;
        ptr::copy_nonoverlapping(spectrum.eigenvalues.as_ptr(), out, size);
        Ok(())
    })
}

/// `(1/n) ln ||M(n)||` for the transfer cocycle at `energy`.
///
/// # Safety
/// `p`, `q` must hold `letters` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn toeplitz_lyapunov(
    h: *const ToeplitzSubshift,
    p: *const f64,
    q: *const f64,
    letters: usize,
    energy: f64,
    n: usize,
    out: *mut f64,
) -> ToeplitzStatus {
    guard(|| {
        let sub = handle(h)?;
        let out = out_ref(out)?;
        let coeff = coefficients(sub, p, q, letters)?;
        *out = lift(lyapunov_estimate(sub, &coeff, energy, n))?.value;
        Ok(())
    })
}
