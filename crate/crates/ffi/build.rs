use std::env;
use std::fs;
use std::path::PathBuf;

fn main() {
    let crate_dir = PathBuf::from(env::var("CARGO_MANIFEST_DIR").unwrap());
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");

    let config =
        cbindgen::Config::from_file(crate_dir.join("cbindgen.toml")).expect("read cbindgen.toml");
    let bindings = cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(config)
        .generate()
        .expect("generate C header");

    let mut header = Vec::new();
    bindings.write(&mut header);
    let out = PathBuf::from(env::var("OUT_DIR").unwrap()).join("qrules.h");
    fs::write(&out, &header).expect("write header to OUT_DIR");

    // keep the checked-in copy current, touching it only when it changes
    let include = crate_dir.join("include").join("qrules.h");
    if fs::read(&include).ok().as_deref() != Some(header.as_slice()) {
        fs::create_dir_all(include.parent().unwrap()).expect("create include/");
        fs::write(&include, &header).expect("write include/qrules.h");
    }
}
