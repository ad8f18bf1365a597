//! C ABI for the aniso walk simulator.
//!
//! The interface follows the usual handle/status pattern: constructors
//! return an opaque pointer through an out-parameter and an
//! [`AnisoStatus`] code, every fallible call reports through its return
//! status, and each handle has exactly one `_free` function. Handles are
//! immutable after construction and may be shared across threads.
//!
//! All functions are panic-free; invalid input is reported through
//! status codes.

use std::ffi::{c_char, CStr};

use aniso_core::env::{self, Environment};
use aniso_core::timechange::{self, DensitySpec, DensityTable, DensityVariant};
use aniso_core::walk::{self, PathMode};
use aniso_core::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnisoStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    Utf8 = 2,
    /// A numeric or structural argument was out of contract.
    InvalidArgument = 3,
    /// The environment violates the probability bounds or is degenerate.
    InvalidEnvironment = 4,
    /// A value fell outside the supported range.
    OutOfRange = 5,
    /// A JSON spec failed to parse.
    Json = 6,
    /// An unexpected internal failure.
    Internal = 7,
}

fn status_of(err: &Error) -> AnisoStatus {
    match err {
        Error::InvalidProbability { .. } | Error::DegenerateEnvironment => {
            AnisoStatus::InvalidEnvironment
        }
        Error::InvalidParameter(_) | Error::TooFewPoints { .. } => AnisoStatus::InvalidArgument,
        Error::OutOfRange { .. } | Error::Singularity { .. } => AnisoStatus::OutOfRange,
        Error::Json(_) => AnisoStatus::Json,
        _ => AnisoStatus::Internal,
    }
}

/// A static, NUL-terminated description of a status code.
#[no_mangle]
pub extern "C" fn aniso_status_message(status: AnisoStatus) -> *const c_char {
    let msg: &'static str = match status {
        AnisoStatus::Ok => "ok\0",
        AnisoStatus::NullPointer => "null pointer argument\0",
        AnisoStatus::Utf8 => "string argument is not valid UTF-8\0",
        AnisoStatus::InvalidArgument => "invalid argument\0",
        AnisoStatus::InvalidEnvironment => "invalid or degenerate environment\0",
        AnisoStatus::OutOfRange => "value out of range\0",
        AnisoStatus::Json => "malformed JSON spec\0",
        AnisoStatus::Internal => "internal error\0",
    };
    msg.as_ptr() as *const c_char
}

const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");

/// The library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn aniso_version() -> *const c_char {
    VERSION.as_ptr() as *const c_char
}

/// Opaque handle to a validated level-probability environment.
pub struct AnisoEnv {
    inner: Environment,
}

/// Opaque handle to a tabulated closed-form law.
pub struct AnisoDensity {
    table: DensityTable,
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, AnisoStatus> {
    if ptr.is_null() {
        return Err(AnisoStatus::NullPointer);
    }
    // SAFETY: caller guarantees `ptr` is a valid NUL-terminated string.
    unsafe { CStr::from_ptr(ptr) }.to_str().map_err(|_| AnisoStatus::Utf8)
}

unsafe fn write_out<T>(out: *mut T, value: T) -> AnisoStatus {
    if out.is_null() {
        return AnisoStatus::NullPointer;
    }
    // SAFETY: caller guarantees `out` is valid for writes.
    unsafe { out.write(value) };
    AnisoStatus::Ok
}

/// Builds an environment from a spec string: a preset name (`comb`,
/// `hphc`, `uniform(p)` with `p` a decimal or fraction) or a JSON object
/// such as `{"kind": "table", "default": 0.5, "levels": {"0": 0.25}}`.
/// On success writes a handle that must be released with
/// [`aniso_env_free`].
///
/// # Safety
/// `spec` must point to a valid NUL-terminated string and `out` must be
/// valid for writing one pointer; neither may alias freed memory for the
/// duration of the call.
#[no_mangle]
pub unsafe extern "C" fn aniso_env_new(
    spec: *const c_char,
    out: *mut *mut AnisoEnv,
) -> AnisoStatus {
    if out.is_null() {
        return AnisoStatus::NullPointer;
    }
    let text = match unsafe { read_str(spec) } {
        Ok(t) => t,
        Err(status) => return status,
    };
    let spec = match aniso_core::cli::parse_env_spec(text) {
        Ok(s) => s,
        Err(e) => return status_of(&e),
    };
    match env::make_environment(spec) {
        Ok(inner) => unsafe { write_out(out, Box::into_raw(Box::new(AnisoEnv { inner }))) },
        Err(e) => status_of(&e),
    }
}

/// Releases an environment handle. A null handle is a no-op.
///
/// # Safety
/// `env` must be null or a pointer returned by [`aniso_env_new`] that has
/// not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn aniso_env_free(env: *mut AnisoEnv) {
    if !env.is_null() {
        // SAFETY: caller guarantees ownership of a live handle.
        drop(unsafe { Box::from_raw(env) });
    }
}

/// Writes the vertical-step probability `p(level)` to `out`.
///
/// # Safety
/// `env` must be a live handle from [`aniso_env_new`]; `out` must be
/// valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn aniso_env_prob(
    env: *const AnisoEnv,
    level: i64,
    out: *mut f64,
) -> AnisoStatus {
    let Some(handle) = (unsafe { env.as_ref() }) else {
        return AnisoStatus::NullPointer;
    };
    unsafe { write_out(out, handle.inner.p(level)) }
}

/// Estimates the Cesaro constants over `window` levels per half-plane
/// (at least 16) and writes `gamma1 >= gamma2` plus the fitted rate
/// exponent `tau`. Any out-parameter may be null to skip it.
///
/// # Safety
/// `env` must be a live handle; each non-null out-parameter must be
/// valid for writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn aniso_env_cesaro(
    env: *const AnisoEnv,
    window: u64,
    gamma1: *mut f64,
    gamma2: *mut f64,
    tau: *mut f64,
) -> AnisoStatus {
    let Some(handle) = (unsafe { env.as_ref() }) else {
        return AnisoStatus::NullPointer;
    };
    if window < 16 {
        return AnisoStatus::InvalidArgument;
    }
    let profile = env::cesaro_estimate(&handle.inner, window);
    unsafe {
        if !gamma1.is_null() {
            gamma1.write(profile.gamma1);
        }
        if !gamma2.is_null() {
            gamma2.write(profile.gamma2);
        }
        if !tau.is_null() {
            tau.write(profile.tau);
        }
    }
    AnisoStatus::Ok
}

/// Simulates `n` steps of the walk from the origin with the Markov
/// kernel and writes the endpoint. Identical (env, n, seed) triples give
/// identical endpoints.
///
/// # Safety
/// `env` must be a live handle; `c1` and `c2` must each be valid for
/// writing one `int64_t`.
#[no_mangle]
pub unsafe extern "C" fn aniso_walk_endpoint(
    env: *const AnisoEnv,
    n: u64,
    seed: u64,
    c1: *mut i64,
    c2: *mut i64,
) -> AnisoStatus {
    let Some(handle) = (unsafe { env.as_ref() }) else {
        return AnisoStatus::NullPointer;
    };
    if c1.is_null() || c2.is_null() {
        return AnisoStatus::NullPointer;
    }
    let path = walk::simulate_direct_with(&handle.inner, n, seed, PathMode::Summary);
    let (x, y) = path.end();
    unsafe {
        c1.write(x);
        c2.write(y);
    }
    AnisoStatus::Ok
}

/// Simulates `n` steps with the geometric-block construction and writes
/// the step bookkeeping: horizontal count `h`, vertical count `v`
/// (`h + v = n`) and the untruncated horizontal total `h_star >= h`.
/// Any out-parameter may be null to skip it.
///
/// # Safety
/// `env` must be a live handle; each non-null out-parameter must be
/// valid for writing one `uint64_t`.
#[no_mangle]
pub unsafe extern "C" fn aniso_walk_block_counts(
    env: *const AnisoEnv,
    n: u64,
    seed: u64,
    h: *mut u64,
    v: *mut u64,
    h_star: *mut u64,
) -> AnisoStatus {
    let Some(handle) = (unsafe { env.as_ref() }) else {
        return AnisoStatus::NullPointer;
    };
    let (_, dec) = walk::simulate_constructive_with(&handle.inner, n, seed, PathMode::Summary);
    unsafe {
        if !h.is_null() {
            h.write(dec.h);
        }
        if !v.is_null() {
            v.write(dec.v);
        }
        if !h_star.is_null() {
            h_star.write(dec.h_star);
        }
    }
    AnisoStatus::Ok
}

/// Tabulates the law of the inverse time change at `t` (or of its
/// complement when `complement` is true) for constants
/// `gamma1 >= gamma2 >= 1` on `intervals` quadrature cells (pass 0 for
/// the default resolution). Equal constants yield a point-mass table.
/// The handle must be released with [`aniso_density_free`].
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn aniso_density_new(
    t: f64,
    gamma1: f64,
    gamma2: f64,
    complement: bool,
    intervals: usize,
    out: *mut *mut AnisoDensity,
) -> AnisoStatus {
    if out.is_null() {
        return AnisoStatus::NullPointer;
    }
    let variant = if complement { DensityVariant::Complement } else { DensityVariant::Inverse };
    let intervals = if intervals == 0 { timechange::DENSITY_INTERVALS } else { intervals };
    match timechange::density_table(t, gamma1, gamma2, variant, intervals) {
        Ok(table) => unsafe { write_out(out, Box::into_raw(Box::new(AnisoDensity { table }))) },
        Err(e) => status_of(&e),
    }
}

/// Releases a density handle. A null handle is a no-op.
///
/// # Safety
/// `density` must be null or a pointer returned by [`aniso_density_new`]
/// that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn aniso_density_free(density: *mut AnisoDensity) {
    if !density.is_null() {
        // SAFETY: caller guarantees ownership of a live handle.
        drop(unsafe { Box::from_raw(density) });
    }
}

/// Writes the open support interval of the tabulated law. A point mass
/// reports `lo == hi`.
///
/// # Safety
/// `density` must be a live handle; `lo` and `hi` must each be valid for
/// writing one `double`.
#[no_mangle]
pub unsafe extern "C" fn aniso_density_support(
    density: *const AnisoDensity,
    lo: *mut f64,
    hi: *mut f64,
) -> AnisoStatus {
    let Some(handle) = (unsafe { density.as_ref() }) else {
        return AnisoStatus::NullPointer;
    };
    if lo.is_null() || hi.is_null() {
        return AnisoStatus::NullPointer;
    }
    let t = &handle.table;
    let (a, b) = match t.point_mass {
        Some(v) => (v, v),
        None => match DensitySpec::new(t.t, t.gamma1, t.gamma2, t.variant) {
            Ok(spec) => spec.support(),
            Err(_) => return AnisoStatus::Internal,
        },
    };
    unsafe {
        lo.write(a);
        hi.write(b);
    }
    AnisoStatus::Ok
}

/// Writes the density value at `v`; zero outside the support. The
/// density diverges at the support endpoints and at the location of a
/// point mass, which reports `ANISO_STATUS_OUT_OF_RANGE`.
///
/// # Safety
/// `density` must be a live handle; `out` must be valid for writing one
/// `double`.
#[no_mangle]
pub unsafe extern "C" fn aniso_density_pdf(
    density: *const AnisoDensity,
    v: f64,
    out: *mut f64,
) -> AnisoStatus {
    let Some(handle) = (unsafe { density.as_ref() }) else {
        return AnisoStatus::NullPointer;
    };
    if out.is_null() {
        return AnisoStatus::NullPointer;
    }
    let t = &handle.table;
    if let Some(mass) = t.point_mass {
        if v == mass {
            return AnisoStatus::OutOfRange;
        }
        return unsafe { write_out(out, 0.0) };
    }
    let spec = match DensitySpec::new(t.t, t.gamma1, t.gamma2, t.variant) {
        Ok(spec) => spec,
        Err(_) => return AnisoStatus::Internal,
    };
    let value = match t.variant {
        DensityVariant::Inverse => timechange::inverse_density(&spec, v),
        DensityVariant::Complement => timechange::complement_density(&spec, v),
    };
    match value {
        Ok(p) => unsafe { write_out(out, p) },
        Err(e) => status_of(&e),
    }
}

/// Writes the cumulative probability at `v` (0 below the support, 1
/// above it; a point mass is a unit step).
///
/// # Safety
/// `density` must be a live handle; `out` must be valid for writing one
/// `double`.
#[no_mangle]
pub unsafe extern "C" fn aniso_density_cdf(
    density: *const AnisoDensity,
    v: f64,
    out: *mut f64,
) -> AnisoStatus {
    let Some(handle) = (unsafe { density.as_ref() }) else {
        return AnisoStatus::NullPointer;
    };
    unsafe { write_out(out, handle.table.cdf(v)) }
}
