//! Fixed seeds give identical numbers, independent of the thread count.

use rmtlab::gue::{self, SpectralParams};
use rmtlab::hciz::{self, HcizInput};
use rmtlab::{RngStream, C64};

fn with_threads<T: Send>(k: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(k)
        .build()
        .unwrap()
        .install(f)
}

#[test]
fn correlator_mc_is_bitwise_reproducible_across_thread_counts() {
    let sp = SpectralParams::new(
        vec![C64::new(0.2, 1.0)],
        vec![C64::new(-0.3, -1.0)],
        vec![],
        false,
    )
    .unwrap();
    let run = || gue::correlator_mc(&sp, 6, 5_000, &RngStream::new(42, 0)).unwrap();
    let a = with_threads(1, run);
    let b = with_threads(4, run);
    let c = with_threads(3, run);
    assert_eq!(a, b);
    assert_eq!(a, c);
    let d = gue::correlator_mc(&sp, 6, 5_000, &RngStream::new(43, 0)).unwrap();
    assert_ne!(a.mean, d.mean);
}

#[test]
fn haar_mc_is_reproducible() {
    let inp = HcizInput::real(&[0.5, -0.4], &[1.0, 0.1]).unwrap();
    let a = with_threads(1, || {
        hciz::haar_mc_hciz(&inp, 2_000, &RngStream::new(7, 1)).unwrap()
    });
    let b = with_threads(2, || {
        hciz::haar_mc_hciz(&inp, 2_000, &RngStream::new(7, 1)).unwrap()
    });
    assert_eq!(a, b);
}

#[test]
fn histogram_is_reproducible() {
    let a = gue::spectral_histogram(16, 40, 20, &RngStream::new(5, 0)).unwrap();
    let b = gue::spectral_histogram(16, 40, 20, &RngStream::new(5, 0)).unwrap();
    assert_eq!(a.counts, b.counts);
}

#[test]
fn cli_output_is_identical_across_runs_and_threads() {
    let dir = std::env::temp_dir().join(format!("rmtlab-repro-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bin = env!("CARGO_BIN_EXE_rmtlab");
    let mut outs = Vec::new();
    for (k, threads) in ["1", "2"].iter().enumerate() {
        let out = dir.join(format!("run{k}.csv"));
        let status = std::process::Command::new(bin)
            .args([
                "correlator",
                "--mode",
                "mc",
                "--n",
                "5",
                "--mu-1b",
                "0.1+1i",
                "--mu-2b",
                "0.2-1i",
            ])
            .args([
                "--samples",
                "2000",
                "--seed",
                "11",
                "--threads",
                threads,
                "--out",
            ])
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        outs.push(std::fs::read_to_string(&out).unwrap());
        let record: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(out.with_extension("json")).unwrap())
                .unwrap();
        assert!(record["calibration"]["generated_by"]
            .as_str()
            .unwrap()
            .starts_with("rmtlab calibrate"));
        assert!(record["wall_seconds"].as_f64().unwrap() >= 0.0);
    }
    assert_eq!(outs[0], outs[1]);
    assert!(outs[0].starts_with("mode,n,re,im,err_re,err_im\n"));
}

#[test]
fn cli_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_rmtlab");
    let code = |args: &[&str]| {
        std::process::Command::new(bin)
            .args(args)
            .output()
            .unwrap()
            .status
            .code()
    };
    assert_eq!(code(&["--help"]), Some(0));
    assert_eq!(
        code(&["hciz", "--method", "nope", "--x", "1", "--y", "1"]),
        Some(2)
    );
    // Coincident eigenvalues: a numeric failure, not a usage error.
    assert_eq!(code(&["hciz", "--x", "1,1", "--y", "0,2"]), Some(1));
    assert_eq!(code(&["acceptance", "--only", "2,6"]), Some(0));
}
