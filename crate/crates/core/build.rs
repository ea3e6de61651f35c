use std::env;
use std::path::Path;

// The QZ, reordering and SVD routines come from a system LAPACK. The reference
// implementation is linked statically when it can be found so that the library does
// not depend on which optimized BLAS the runtime alternatives point to.
//
// DESCFACT_LAPACK_DIR: directory holding `liblapack.a` and `libblas.a`.
// DESCFACT_LAPACK_DYLIB: link this shared library (for example `openblas`) instead.
fn main() {
    println!("cargo:rerun-if-env-changed=DESCFACT_LAPACK_DIR");
    println!("cargo:rerun-if-env-changed=DESCFACT_LAPACK_DYLIB");

    if let Ok(lib) = env::var("DESCFACT_LAPACK_DYLIB") {
        println!("cargo:rustc-link-lib=dylib={lib}");
        return;
    }

    let triple_dir = format!(
        "/usr/lib/{}-linux-gnu",
        env::var("CARGO_CFG_TARGET_ARCH").unwrap_or_else(|_| "x86_64".into())
    );
    let candidates = [
        env::var("DESCFACT_LAPACK_DIR").ok().map(|d| (d.clone(), d)),
        Some((format!("{triple_dir}/lapack"), format!("{triple_dir}/blas"))),
    ];
    for (lapack_dir, blas_dir) in candidates.into_iter().flatten() {
        let lapack = Path::new(&lapack_dir).join("liblapack.a");
        let blas = Path::new(&blas_dir).join("libblas.a");
        if lapack.exists() && blas.exists() {
            println!("cargo:rustc-link-search=native={lapack_dir}");
            println!("cargo:rustc-link-search=native={blas_dir}");
            println!("cargo:rustc-link-lib=static=lapack");
            println!("cargo:rustc-link-lib=static=blas");
            println!("cargo:rustc-link-lib=dylib=gfortran");
            return;
        }
    }
    println!("cargo:rustc-link-lib=dylib=lapack");
    println!("cargo:rustc-link-lib=dylib=blas");
}
