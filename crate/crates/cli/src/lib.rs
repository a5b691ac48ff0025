//! Command line front end.
//!
//! Every command returns an [`Outcome`]: the text to print and the process
//! exit code (0 pass, 2 input error, 3 hypotheses fail, 4 trapdoor found).

pub mod files;

use files::{read_sbox_file, read_spec_file, SpecFile};
use ptrap_core::f2lin::Word;
use ptrap_core::feistel::RoundKeys;
use ptrap_core::sboxprops::analyze_sbox;
use ptrap_core::trapdoor::{
    build_strong_cipher, build_weak_cipher, check_exclusion_theorem, distinguish_spec,
    recover_key_coset, AttackReport, ExclusionReport, SearchFamily, Variant,
};
use ptrap_core::verify::{self, Scope};
use ptrap_core::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::Path;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_HYPOTHESES: i32 = 3;
pub const EXIT_TRAPDOOR: i32 = 4;
/// A verify suite failed.
pub const EXIT_CHECK: i32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(code: i32, stdout: String) -> Self {
        Outcome {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    pub fn input_error(msg: impl std::fmt::Display) -> Self {
        Outcome {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }
}

fn machine<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn cmd_sbox(path: &Path, format: Format) -> Outcome {
    let sbox = match read_sbox_file(path) {
        Ok(s) => s,
        Err(e) => return Outcome::input_error(e),
    };
    let rep = analyze_sbox(&sbox);
    let out = match format {
        Format::Machine => machine(&rep),
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(
                s,
                "width={} delta={} APN={}",
                rep.width,
                rep.delta,
                yes(rep.apn)
            );
            for k in 1..rep.width {
                let _ = writeln!(
                    s,
                    "weakly 2^{k}-uniform: {}",
                    yes(rep.weak_uniform[k as usize])
                );
            }
            let ai = rep.anti_invariance;
            let m = ai
                .max_invariant_dim
                .map_or("none".to_string(), |m| m.to_string());
            let _ = writeln!(
                s,
                "anti-invariance order={} (largest subspace mapped to a subspace: {m})",
                ai.order
            );
            if ai.normalized {
                s.push_str("note: box does not fix 0; analysed as x -> f(x) + f(0)\n");
            }
            s
        }
    };
    Outcome::ok(EXIT_PASS, out)
}

/// Exit code for a finished analysis. A condition-satisfying chain is
/// reported even when the hypotheses also fail.
pub fn analysis_exit_code(rep: &ExclusionReport) -> i32 {
    if rep.trapdoor_found {
        EXIT_TRAPDOOR
    } else if !rep.hypotheses.holds {
        EXIT_HYPOTHESES
    } else {
        EXIT_PASS
    }
}

fn words(ws: &[Word]) -> String {
    let parts: Vec<String> = ws.iter().map(|w| format!("{w:#x}")).collect();
    format!("[{}]", parts.join(", "))
}

fn render_exclusion(rep: &ExclusionReport) -> String {
    let mut s = String::new();
    let h = &rep.hypotheses;
    let _ = writeln!(s, "variant: {}", h.variant);
    for r in &h.rounds {
        let deltas: Vec<String> = r.boxes.iter().map(|b| b.delta.to_string()).collect();
        let orders: Vec<String> = r
            .boxes
            .iter()
            .map(|b| b.anti_invariance.order.to_string())
            .collect();
        let _ = writeln!(
            s,
            "round {}: box uniformity [{}], anti-invariance [{}], admissible delta {:?}, proper={}, strongly proper={}{}",
            r.round,
            deltas.join(", "),
            orders.join(", "),
            r.admissible_deltas,
            yes(r.diffusion.proper),
            yes(r.diffusion.strongly_proper),
            if r.normalized { " (normalized)" } else { "" }
        );
    }
    let best = h.best_delta.map_or("none".into(), |d| d.to_string());
    let _ = writeln!(
        s,
        "hypotheses: {} (best delta {best})",
        if h.holds { "hold" } else { "fail" }
    );
    for f in &rep.families {
        match &f.skipped {
            Some(why) => {
                let _ = writeln!(s, "family {}: skipped ({why})", f.family);
            }
            None => {
                let _ = writeln!(s, "family {}: {} chain(s)", f.family, f.chains);
            }
        }
    }
    for (i, v) in rep.chains.iter().enumerate() {
        let fams: Vec<&str> = v.found_by.iter().map(|f| f.name()).collect();
        let _ = writeln!(s, "chain {} (found by {}):", i + 1, fams.join(", "));
        for (j, u) in v.chain.subgroups().iter().enumerate() {
            let _ = writeln!(
                s,
                "  U{} = span{} (dim {})",
                j + 1,
                words(u.space().basis()),
                u.dim()
            );
        }
        let cond = |c: Option<usize>| c.map_or("-".to_string(), |i| format!("at i={i}"));
        let _ = writeln!(
            s,
            "  conditions: 1 {}, 2 {}, 3 {}, 4 {}",
            cond(v.two_cycle),
            cond(v.three_products),
            cond(v.trivial_d),
            cond(v.trivial_a)
        );
    }
    for n in &rep.notes {
        let _ = writeln!(s, "note: {n}");
    }
    let verdict = if rep.trapdoor_found {
        "TRAPDOOR FOUND"
    } else if !h.holds {
        "HYPOTHESES FAIL"
    } else {
        "PASS (no condition-satisfying chain in the searched families)"
    };
    let _ = writeln!(s, "result: {verdict}");
    s
}

pub fn cmd_analyze(
    path: &Path,
    families: &[SearchFamily],
    variant: Variant,
    format: Format,
) -> Outcome {
    let spec = match read_spec_file(path) {
        Ok(s) => s,
        Err(e) => return Outcome::input_error(e),
    };
    match check_exclusion_theorem(&spec, variant, families) {
        Ok(rep) => {
            let out = match format {
                Format::Machine => machine(&rep),
                Format::Text => render_exclusion(&rep),
            };
            Outcome::ok(analysis_exit_code(&rep), out)
        }
        Err(e @ Error::RawTableRound(_)) => Outcome {
            code: EXIT_HYPOTHESES,
            stdout: String::new(),
            stderr: format!(
                "error: {e}; hypotheses need S-box and diffusion layers given separately\n"
            ),
        },
        Err(e) => Outcome::input_error(e),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DemoParams {
    pub s: u32,
    pub b: u32,
    pub r: usize,
    pub seed: u64,
    pub samples: usize,
    pub apn: bool,
    /// Write the strong `s = 3, b = 2, r = 4` spec instead of attacking the
    /// weak cipher.
    pub strong: bool,
}

impl Default for DemoParams {
    fn default() -> Self {
        DemoParams {
            s: 3,
            b: 2,
            r: 4,
            seed: 1,
            samples: 10_000,
            apn: false,
            strong: false,
        }
    }
}

#[derive(Serialize)]
struct DemoChain<'a> {
    seed: u64,
    subgroups: Vec<Vec<Word>>,
    verified: &'a [bool],
}

/// Builds the weak cipher, attacks it, and writes `spec.json`, `chain.json`
/// and `report.json` to `out`.
pub fn cmd_demo(params: &DemoParams, out: &Path, format: Format) -> Outcome {
    if params.strong {
        return demo_strong(params.seed, out);
    }
    let (spec, chain) =
        match build_weak_cipher(params.s, params.b, params.r, params.seed, params.apn) {
            Ok(x) => x,
            Err(e) => return Outcome::input_error(e),
        };
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let keys = RoundKeys::random(spec.n(), spec.round_count(), &mut rng);
    let dist = match distinguish_spec(&spec, &keys, &chain, params.samples, params.seed) {
        Ok(d) => d,
        Err(e) => return Outcome::input_error(e),
    };
    let rec = match recover_key_coset(&spec, &keys, &chain) {
        Ok(r) => Some(r),
        Err(Error::SearchTooLarge(_)) => None,
        Err(e) => return Outcome::input_error(e),
    };
    let report = AttackReport::new(Some(dist), rec);
    let demo_chain = DemoChain {
        seed: params.seed,
        subgroups: chain
            .subgroups()
            .iter()
            .map(|u| u.space().basis().to_vec())
            .collect(),
        verified: chain.link_flags(),
    };
    let files = [
        ("spec.json", machine(&SpecFile::from_spec(&spec))),
        ("chain.json", machine(&demo_chain)),
        ("report.json", machine(&report)),
    ];
    if let Err(o) = write_files(out, &files) {
        return o;
    }
    let text = match format {
        Format::Machine => machine(&report),
        Format::Text => {
            let d = report.distinguisher.as_ref().expect("set above");
            let mut s = String::new();
            let _ = writeln!(
                s,
                "weak cipher s={} b={} r={} seed={}",
                params.s, params.b, params.r, params.seed
            );
            let _ = writeln!(s, "method: {}", report.method);
            let _ = writeln!(s, "hit rate {:.6} over {} pairs", d.hit_rate, d.samples);
            let _ = writeln!(
                s,
                "baseline {:.6} (expected {:.6}, {:.2} standard errors)",
                d.baseline_rate,
                d.expected_baseline,
                d.baseline_z()
            );
            match &report.key_recovery {
                Some(k) => {
                    let _ = writeln!(
                        s,
                        "last round key: {} candidate class(es) mod span{}, {:.2} of {} bits, true key inside: {}",
                        k.candidates.len(),
                        words(k.key_subspace.basis()),
                        k.bits,
                        k.coset_bits,
                        yes(k.contains_true_key == Some(true))
                    );
                }
                None => s.push_str("last round key: search too large, skipped\n"),
            }
            let _ = writeln!(
                s,
                "wrote spec.json, chain.json, report.json to {}",
                out.display()
            );
            s
        }
    };
    Outcome::ok(EXIT_PASS, text)
}

fn write_files(out: &Path, files: &[(&str, String)]) -> Result<(), Outcome> {
    std::fs::create_dir_all(out)
        .map_err(|e| Outcome::input_error(format!("{}: {e}", out.display())))?;
    for (name, body) in files {
        let path = out.join(name);
        std::fs::write(&path, body)
            .map_err(|e| Outcome::input_error(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn demo_strong(seed: u64, out: &Path) -> Outcome {
    let spec = match build_strong_cipher(seed) {
        Ok(s) => s,
        Err(e) => return Outcome::input_error(e),
    };
    if let Err(o) = write_files(out, &[("spec.json", machine(&SpecFile::from_spec(&spec)))]) {
        return o;
    }
    Outcome::ok(
        EXIT_PASS,
        format!(
            "wrote strong spec (seed {seed}) to {}\n",
            out.join("spec.json").display()
        ),
    )
}

pub fn cmd_verify(scope: Scope, seed: u64, format: Format) -> Outcome {
    let checks = match verify::run(scope, seed) {
        Ok(c) => c,
        Err(e) => return Outcome::input_error(e),
    };
    let all_ok = checks.iter().all(|c| c.ok());
    let out = match format {
        Format::Machine => machine(&checks),
        Format::Text => {
            let mut s: String = checks.iter().map(|c| format!("{c}\n")).collect();
            let _ = writeln!(
                s,
                "{} checks, {}",
                checks.len(),
                if all_ok { "all passed" } else { "FAILURES" }
            );
            s
        }
    };
    Outcome::ok(if all_ok { EXIT_PASS } else { EXIT_CHECK }, out)
}

/// Parses a comma-separated family list.
pub fn parse_families(list: &str) -> Result<Vec<SearchFamily>, Error> {
    if list == "all" {
        return Ok(SearchFamily::ALL.to_vec());
    }
    list.split(',').map(|f| f.trim().parse()).collect()
}
